//! CSR sparse matrices and a restarted GMRES solver, generic over real and
//! complex scalars.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Field operations needed by assembly and Krylov iteration, implemented for
/// `f64` and `Complex64`.
pub trait Scalar:
    Copy
    + PartialEq
    + std::fmt::Debug
    + std::ops::Add<Output = Self>
    + std::ops::Sub<Output = Self>
    + std::ops::Mul<Output = Self>
    + std::ops::Div<Output = Self>
    + std::ops::Neg<Output = Self>
    + std::ops::AddAssign
    + std::ops::SubAssign
    + Send
    + Sync
    + 'static
{
    fn zero() -> Self;
    fn one() -> Self;
    fn conj(self) -> Self;
    fn modulus(self) -> f64;
    fn modulus_sq(self) -> f64;
    fn scale(self, s: f64) -> Self;
    fn from_real(x: f64) -> Self;
    fn is_finite_scalar(self) -> bool;
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn conj(self) -> Self {
        self
    }
    fn modulus(self) -> f64 {
        self.abs()
    }
    fn modulus_sq(self) -> f64 {
        self * self
    }
    fn scale(self, s: f64) -> Self {
        self * s
    }
    fn from_real(x: f64) -> Self {
        x
    }
    fn is_finite_scalar(self) -> bool {
        self.is_finite()
    }
}

impl Scalar for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn conj(self) -> Self {
        Complex64::conj(&self)
    }
    fn modulus(self) -> f64 {
        self.norm()
    }
    fn modulus_sq(self) -> f64 {
        self.norm_sqr()
    }
    fn scale(self, s: f64) -> Self {
        self * s
    }
    fn from_real(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
    fn is_finite_scalar(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

/// Conjugate-linear-in-first-argument dot product.
pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    let mut s = T::zero();
    for (&x, &y) in a.iter().zip(b) {
        s += x.conj() * y;
    }
    s
}

pub fn norm2<T: Scalar>(a: &[T]) -> f64 {
    a.iter().map(|&x| x.modulus_sq()).sum::<f64>().sqrt()
}

#[derive(Debug, Clone)]
pub struct SparseMatrix<T> {
    pub n_rows: usize,
    pub n_cols: usize,
    pub row_offsets: Vec<usize>,
    pub col_indices: Vec<usize>,
    pub values: Vec<T>,
}

impl<T: Scalar> SparseMatrix<T> {
    /// Build from (row, col, value) triplets; duplicates are summed, columns
    /// are sorted and unique per row.
    pub fn from_triplets(
        n_rows: usize,
        n_cols: usize,
        triplets: &[(usize, usize, T)],
    ) -> Result<Self> {
        for &(r, c, _) in triplets {
            if r >= n_rows || c >= n_cols {
                return Err(Error::DimensionMismatch(format!(
                    "triplet ({r}, {c}) outside {n_rows} x {n_cols}"
                )));
            }
        }
        let mut sorted: Vec<(usize, usize, T)> = triplets.to_vec();
        sorted.sort_by_key(|&(r, c, _)| (r, c));
        let mut row_offsets = vec![0usize; n_rows + 1];
        let mut col_indices = Vec::with_capacity(sorted.len());
        let mut values: Vec<T> = Vec::with_capacity(sorted.len());
        let mut it = sorted.into_iter().peekable();
        for r in 0..n_rows {
            while let Some(&(tr, c, _)) = it.peek() {
                if tr != r {
                    break;
                }
                let mut v = it.next().unwrap().2;
                while let Some(&(tr2, c2, _)) = it.peek() {
                    if tr2 != r || c2 != c {
                        break;
                    }
                    v += it.next().unwrap().2;
                }
                col_indices.push(c);
                values.push(v);
            }
            row_offsets[r + 1] = col_indices.len();
        }
        let m = SparseMatrix {
            n_rows,
            n_cols,
            row_offsets,
            col_indices,
            values,
        };
        m.check_structure()?;
        Ok(m)
    }

    pub fn identity(n: usize) -> Self {
        SparseMatrix {
            n_rows: n,
            n_cols: n,
            row_offsets: (0..=n).collect(),
            col_indices: (0..n).collect(),
            values: vec![T::one(); n],
        }
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, r: usize) -> (&[usize], &[T]) {
        let span = self.row_offsets[r]..self.row_offsets[r + 1];
        (&self.col_indices[span.clone()], &self.values[span])
    }

    fn check_structure(&self) -> Result<()> {
        if self.row_offsets.len() != self.n_rows + 1 {
            return Err(Error::DimensionMismatch("row offset table".into()));
        }
        for r in 0..self.n_rows {
            let (cols, vals) = self.row(r);
            for w in cols.windows(2) {
                if w[0] >= w[1] {
                    return Err(Error::InvalidArgument(format!(
                        "row {r}: column indices not sorted/unique"
                    )));
                }
            }
            if cols.iter().any(|&c| c >= self.n_cols) {
                return Err(Error::DimensionMismatch(format!("row {r}: column range")));
            }
            if vals.iter().any(|&v| !v.is_finite_scalar()) {
                return Err(Error::InvalidArgument(format!(
                    "row {r}: non-finite stored value"
                )));
            }
        }
        Ok(())
    }

    pub fn spmv(&self, x: &[T]) -> Result<Vec<T>> {
        if x.len() != self.n_cols {
            return Err(Error::DimensionMismatch(format!(
                "spmv: vector length {} against {} columns",
                x.len(),
                self.n_cols
            )));
        }
        let mut y = vec![T::zero(); self.n_rows];
        self.spmv_into(x, &mut y);
        Ok(y)
    }

    pub fn spmv_into(&self, x: &[T], y: &mut [T]) {
        assert_eq!(x.len(), self.n_cols);
        assert_eq!(y.len(), self.n_rows);
        for r in 0..self.n_rows {
            let mut acc = T::zero();
            for k in self.row_offsets[r]..self.row_offsets[r + 1] {
                acc += self.values[k] * x[self.col_indices[k]];
            }
            y[r] = acc;
        }
    }

    pub fn diagonal(&self) -> Vec<T> {
        let mut d = vec![T::zero(); self.n_rows.min(self.n_cols)];
        for r in 0..d.len() {
            let (cols, vals) = self.row(r);
            if let Ok(k) = cols.binary_search(&r) {
                d[r] = vals[k];
            }
        }
        d
    }

    /// Dense copy, row-major. Intended for small oracle checks.
    pub fn to_dense(&self) -> Vec<Vec<T>> {
        let mut d = vec![vec![T::zero(); self.n_cols]; self.n_rows];
        for r in 0..self.n_rows {
            let (cols, vals) = self.row(r);
            for (&c, &v) in cols.iter().zip(vals) {
                d[r][c] = v;
            }
        }
        d
    }

    /// Quadratic form conj(x)^T A y.
    pub fn quadratic_form(&self, x: &[T], y: &[T]) -> T {
        assert_eq!(x.len(), self.n_rows);
        assert_eq!(y.len(), self.n_cols);
        let mut s = T::zero();
        for r in 0..self.n_rows {
            let mut acc = T::zero();
            for k in self.row_offsets[r]..self.row_offsets[r + 1] {
                acc += self.values[k] * y[self.col_indices[k]];
            }
            s += x[r].conj() * acc;
        }
        s
    }
}

// ---------------------------------------------------------------------------
// GMRES
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preconditioner {
    None,
    /// Symmetric diagonal scaling; preserves Hermitian structure.
    Jacobi,
}

#[derive(Debug, Clone)]
pub struct GmresConfig {
    pub restart: usize,
    pub rel_tol: f64,
    pub max_iters: usize,
    pub preconditioner: Preconditioner,
}

impl Default for GmresConfig {
    fn default() -> Self {
        GmresConfig {
            restart: 50,
            rel_tol: 1e-10,
            max_iters: 10_000,
            preconditioner: Preconditioner::Jacobi,
        }
    }
}

#[derive(Debug, Clone)]
pub struct GmresOutcome<T> {
    pub x: Vec<T>,
    pub iterations: usize,
    /// Recomputed true relative residual ||b - A x|| / ||b||.
    pub residual: f64,
}

#[derive(Debug, thiserror::Error)]
pub enum GmresError<T: Scalar> {
    #[error("gmres: {0}")]
    Invalid(String),
    #[error(
        "gmres did not converge: {} iterations, best relative residual {:.3e}",
        best.iterations,
        best.residual
    )]
    NotConverged { best: GmresOutcome<T> },
}

/// Restarted GMRES with optional symmetric Jacobi scaling. On success the
/// returned residual satisfies the configured tolerance and is recomputed
/// from the unscaled system; on failure the best iterate found is returned.
pub fn gmres_solve<T: Scalar>(
    a: &SparseMatrix<T>,
    b: &[T],
    x0: Option<&[T]>,
    cfg: &GmresConfig,
) -> std::result::Result<GmresOutcome<T>, GmresError<T>> {
    let n = a.n_rows;
    if a.n_cols != n {
        return Err(GmresError::Invalid(format!(
            "matrix is {} x {}, not square",
            a.n_rows, a.n_cols
        )));
    }
    if b.len() != n {
        return Err(GmresError::Invalid(format!(
            "rhs length {} against {n} rows",
            b.len()
        )));
    }
    if let Some(x0) = x0 {
        if x0.len() != n {
            return Err(GmresError::Invalid(format!(
                "initial guess length {} against {n} unknowns",
                x0.len()
            )));
        }
    }
    if cfg.restart == 0 || cfg.rel_tol <= 0.0 || cfg.max_iters == 0 {
        return Err(GmresError::Invalid(
            "restart >= 1, rel_tol > 0 and max_iters >= 1 required".into(),
        ));
    }
    if b.iter().any(|v| !v.is_finite_scalar()) {
        return Err(GmresError::Invalid("rhs contains non-finite entries".into()));
    }

    let b_norm = norm2(b);
    if b_norm == 0.0 {
        return Ok(GmresOutcome {
            x: vec![T::zero(); n],
            iterations: 0,
            residual: 0.0,
        });
    }

    // Symmetric scaling factors: s_i = 1 / sqrt(|a_ii|).
    let scale: Vec<f64> = match cfg.preconditioner {
        Preconditioner::None => vec![1.0; n],
        Preconditioner::Jacobi => a
            .diagonal()
            .iter()
            .map(|d| {
                let m = d.modulus();
                if m > 0.0 {
                    1.0 / m.sqrt()
                } else {
                    1.0
                }
            })
            .collect(),
    };
    let mut a_s = a.clone();
    for r in 0..n {
        for k in a_s.row_offsets[r]..a_s.row_offsets[r + 1] {
            let c = a_s.col_indices[k];
            a_s.values[k] = a_s.values[k].scale(scale[r] * scale[c]);
        }
    }
    let b_s: Vec<T> = b.iter().zip(&scale).map(|(&v, &s)| v.scale(s)).collect();
    let bs_norm = norm2(&b_s);

    // Unknowns of the scaled system: x = S y.
    let mut y: Vec<T> = match x0 {
        Some(x0) => x0.iter().zip(&scale).map(|(&v, &s)| v.scale(1.0 / s)).collect(),
        None => vec![T::zero(); n],
    };

    let unscale = |y: &[T]| -> Vec<T> {
        y.iter().zip(&scale).map(|(&v, &s)| v.scale(s)).collect()
    };
    let true_residual = |x: &[T]| -> f64 {
        let mut r = vec![T::zero(); n];
        a.spmv_into(x, &mut r);
        let mut s = 0.0;
        for i in 0..n {
            s += (b[i] - r[i]).modulus_sq();
        }
        s.sqrt() / b_norm
    };

    let m = cfg.restart;
    let mut total_iters = 0usize;
    let mut best: Option<GmresOutcome<T>> = None;
    let consider = |x: Vec<T>, iters: usize, best: &mut Option<GmresOutcome<T>>| -> f64 {
        let res = true_residual(&x);
        if best.as_ref().map_or(true, |b| res < b.residual) {
            *best = Some(GmresOutcome {
                x,
                iterations: iters,
                residual: res,
            });
        }
        res
    };

    loop {
        // Residual of the scaled system at the current iterate.
        let mut r = vec![T::zero(); n];
        a_s.spmv_into(&y, &mut r);
        for i in 0..n {
            r[i] = b_s[i] - r[i];
        }
        let beta = norm2(&r);
        if beta == 0.0 {
            let x = unscale(&y);
            let res = consider(x, total_iters, &mut best);
            if res <= cfg.rel_tol {
                return Ok(best.unwrap());
            }
            return Err(GmresError::NotConverged { best: best.unwrap() });
        }

        let mut basis: Vec<Vec<T>> = Vec::with_capacity(m + 1);
        basis.push(r.iter().map(|&v| v.scale(1.0 / beta)).collect());
        // Hessenberg columns after Givens reduction, plus rotation history.
        let mut h_cols: Vec<Vec<T>> = Vec::with_capacity(m);
        let mut cs: Vec<f64> = Vec::with_capacity(m);
        let mut sn: Vec<T> = Vec::with_capacity(m);
        let mut g: Vec<T> = vec![T::zero(); m + 1];
        g[0] = T::from_real(beta);

        let mut k_used = 0usize;
        let mut lucky = false;
        while k_used < m && total_iters < cfg.max_iters {
            let j = k_used;
            let mut w = vec![T::zero(); n];
            a_s.spmv_into(&basis[j], &mut w);
            let mut h = vec![T::zero(); j + 2];
            // Modified Gram-Schmidt.
            for (i, v) in basis.iter().enumerate() {
                let hij = dot(v, &w);
                h[i] = hij;
                for (wk, vk) in w.iter_mut().zip(v) {
                    *wk -= hij * *vk;
                }
            }
            let wnorm = norm2(&w);
            h[j + 1] = T::from_real(wnorm);
            // Apply previous rotations to the new column.
            for i in 0..j {
                let hi = h[i];
                let hi1 = h[i + 1];
                h[i] = hi.scale(cs[i]) + sn[i] * hi1;
                h[i + 1] = -(sn[i].conj()) * hi + hi1.scale(cs[i]);
            }
            let (c, s, rr) = givens(h[j], h[j + 1]);
            h[j] = rr;
            h[j + 1] = T::zero();
            cs.push(c);
            sn.push(s);
            let gj = g[j];
            g[j] = gj.scale(c) + s * g[j + 1];
            g[j + 1] = -(s.conj()) * gj + g[j + 1].scale(c);
            h_cols.push(h);
            k_used += 1;
            total_iters += 1;

            let est = g[k_used].modulus();
            if wnorm <= f64::EPSILON * beta {
                // Arnoldi breakdown: the Krylov space is invariant, the
                // least-squares solution is exact up to roundoff.
                lucky = true;
                break;
            }
            basis.push(w.iter().map(|&v| v.scale(1.0 / wnorm)).collect());
            if est <= cfg.rel_tol * bs_norm {
                break;
            }
        }

        if k_used > 0 {
            // Back substitution on the reduced triangular system.
            let mut z = vec![T::zero(); k_used];
            for i in (0..k_used).rev() {
                let mut acc = g[i];
                for l in (i + 1)..k_used {
                    acc -= h_cols[l][i] * z[l];
                }
                z[i] = acc / h_cols[i][i];
            }
            for (i, zi) in z.iter().enumerate() {
                for (yk, vk) in y.iter_mut().zip(&basis[i]) {
                    *yk += *zi * *vk;
                }
            }
        }

        let x = unscale(&y);
        let res = consider(x, total_iters, &mut best);
        if res <= cfg.rel_tol {
            return Ok(best.unwrap());
        }
        if lucky || total_iters >= cfg.max_iters {
            return Err(GmresError::NotConverged { best: best.unwrap() });
        }
    }
}

fn givens<T: Scalar>(a: T, b: T) -> (f64, T, T) {
    let am = a.modulus();
    let bm = b.modulus();
    if bm == 0.0 {
        return (1.0, T::zero(), a);
    }
    if am == 0.0 {
        return (0.0, b.conj().scale(1.0 / bm), T::from_real(bm));
    }
    let t = am.hypot(bm);
    let c = am / t;
    let s = a.scale(1.0 / am) * b.conj().scale(1.0 / t);
    let r = a.scale(t / am);
    (c, s, r)
}
