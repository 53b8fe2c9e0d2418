//! Triangle meshes for the two computational domains, with the boundary
//! metadata needed to impose the A·n = 0 essential condition, plus the
//! P1/P2 degree-of-freedom numbering.
//!
//! Both generators produce structured right-triangle grids, every cell split
//! along the bottom-left to top-right diagonal. All boundary edges are
//! axis-aligned, so the normal-component constraint reduces to pinning one
//! Cartesian component per boundary dof.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

/// Where a dof sits relative to the boundary, for A·n = 0 elimination.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryClass {
    Interior,
    /// On a boundary edge with x = const (normal along x): pins A_x.
    OnVerticalEdge,
    /// On a boundary edge with y = const (normal along y): pins A_y.
    OnHorizontalEdge,
    /// Meeting point of a vertical and a horizontal boundary edge: pins both.
    Corner,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LoopTag {
    Outer,
    Inner,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundaryEdge {
    pub v0: usize,
    pub v1: usize,
    pub tag: LoopTag,
}

#[derive(Debug, Clone)]
pub struct Mesh {
    pub vertices: Vec<[f64; 2]>,
    /// Vertex-index triples, counterclockwise.
    pub triangles: Vec<[usize; 3]>,
    pub boundary_edges: Vec<BoundaryEdge>,
    pub vertex_class: Vec<BoundaryClass>,
}

impl Mesh {
    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn signed_area(&self, tri: usize) -> f64 {
        let [a, b, c] = self.triangles[tri];
        let pa = self.vertices[a];
        let pb = self.vertices[b];
        let pc = self.vertices[c];
        0.5 * ((pb[0] - pa[0]) * (pc[1] - pa[1]) - (pc[0] - pa[0]) * (pb[1] - pa[1]))
    }

    pub fn total_area(&self) -> f64 {
        (0..self.n_triangles()).map(|t| self.signed_area(t)).sum()
    }

    /// Longest edge over all triangles.
    pub fn mesh_size(&self) -> f64 {
        let mut h: f64 = 0.0;
        for &[a, b, c] in &self.triangles {
            for (i, j) in [(a, b), (b, c), (c, a)] {
                let dx = self.vertices[i][0] - self.vertices[j][0];
                let dy = self.vertices[i][1] - self.vertices[j][1];
                h = h.max((dx * dx + dy * dy).sqrt());
            }
        }
        h
    }

    /// Number of connected loops formed by the boundary edges.
    pub fn boundary_loop_count(&self) -> usize {
        let mut parent: Vec<usize> = (0..self.n_vertices()).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        let mut on_boundary = vec![false; self.n_vertices()];
        for e in &self.boundary_edges {
            on_boundary[e.v0] = true;
            on_boundary[e.v1] = true;
            let (a, b) = (find(&mut parent, e.v0), find(&mut parent, e.v1));
            if a != b {
                parent[a] = b;
            }
        }
        (0..self.n_vertices())
            .filter(|&v| on_boundary[v] && find(&mut parent, v) == v)
            .count()
    }

    /// Structural checks shared by generated and imported meshes.
    pub fn validate(&self) -> Result<()> {
        for (t, &[a, b, c]) in self.triangles.iter().enumerate() {
            if a.max(b).max(c) >= self.n_vertices() {
                return Err(Error::InvalidArgument(format!(
                    "triangle {t} references a vertex out of range"
                )));
            }
            if self.signed_area(t) <= 0.0 {
                return Err(Error::DegenerateElement { index: t });
            }
        }
        if self.vertex_class.len() != self.n_vertices() {
            return Err(Error::InvalidArgument(
                "vertex class table length mismatch".into(),
            ));
        }
        // Every boundary edge must belong to exactly one triangle, and every
        // boundary vertex must have exactly two incident boundary edges.
        let counts = edge_triangle_counts(self);
        for e in &self.boundary_edges {
            let key = edge_key(e.v0, e.v1);
            match counts.get(&key) {
                Some(1) => {}
                Some(k) => {
                    return Err(Error::InvalidArgument(format!(
                        "boundary edge ({}, {}) belongs to {k} triangles",
                        e.v0, e.v1
                    )))
                }
                None => {
                    return Err(Error::InvalidArgument(format!(
                        "boundary edge ({}, {}) is not a triangle edge",
                        e.v0, e.v1
                    )))
                }
            }
        }
        let mut incidence = vec![0usize; self.n_vertices()];
        for e in &self.boundary_edges {
            incidence[e.v0] += 1;
            incidence[e.v1] += 1;
        }
        for (v, &k) in incidence.iter().enumerate() {
            if k != 0 && k != 2 {
                return Err(Error::InvalidArgument(format!(
                    "boundary vertex {v} has {k} incident boundary edges"
                )));
            }
            if k == 2 && self.vertex_class[v] == BoundaryClass::Interior {
                return Err(Error::InvalidArgument(format!(
                    "boundary vertex {v} is classified interior"
                )));
            }
        }
        Ok(())
    }
}

fn edge_key(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

fn edge_triangle_counts(mesh: &Mesh) -> HashMap<(usize, usize), usize> {
    let mut counts = HashMap::new();
    for &[a, b, c] in &mesh.triangles {
        for (i, j) in [(a, b), (b, c), (c, a)] {
            *counts.entry(edge_key(i, j)).or_insert(0) += 1;
        }
    }
    counts
}

/// Edges that belong to exactly one triangle, in deterministic order.
fn free_boundary_edges(triangles: &[[usize; 3]]) -> Vec<(usize, usize)> {
    let mut counts: HashMap<(usize, usize), usize> = HashMap::new();
    let mut order: Vec<(usize, usize)> = Vec::new();
    for &[a, b, c] in triangles {
        for (i, j) in [(a, b), (b, c), (c, a)] {
            let key = edge_key(i, j);
            let e = counts.entry(key).or_insert(0);
            if *e == 0 {
                order.push(key);
            }
            *e += 1;
        }
    }
    order.into_iter().filter(|k| counts[k] == 1).collect()
}

/// Classify boundary vertices from the incident boundary edges. Requires all
/// boundary edges axis-aligned.
fn classify_vertices(
    vertices: &[[f64; 2]],
    boundary_edges: &[BoundaryEdge],
) -> Result<Vec<BoundaryClass>> {
    let mut extent: f64 = 0.0;
    for v in vertices {
        extent = extent.max(v[0].abs()).max(v[1].abs());
    }
    let tol = 1e-9 * extent.max(1.0);
    let mut on_vertical = vec![false; vertices.len()];
    let mut on_horizontal = vec![false; vertices.len()];
    for e in boundary_edges {
        let orient = edge_orientation(vertices[e.v0], vertices[e.v1], tol).ok_or_else(|| {
            Error::UnsupportedGeometry(format!(
                "boundary edge ({}, {}) is not axis-aligned",
                e.v0, e.v1
            ))
        })?;
        match orient {
            EdgeOrientation::Vertical => {
                on_vertical[e.v0] = true;
                on_vertical[e.v1] = true;
            }
            EdgeOrientation::Horizontal => {
                on_horizontal[e.v0] = true;
                on_horizontal[e.v1] = true;
            }
        }
    }
    Ok((0..vertices.len())
        .map(|v| match (on_vertical[v], on_horizontal[v]) {
            (false, false) => BoundaryClass::Interior,
            (true, false) => BoundaryClass::OnVerticalEdge,
            (false, true) => BoundaryClass::OnHorizontalEdge,
            (true, true) => BoundaryClass::Corner,
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeOrientation {
    Vertical,
    Horizontal,
}

pub fn edge_orientation(p0: [f64; 2], p1: [f64; 2], tol: f64) -> Option<EdgeOrientation> {
    let dx = (p0[0] - p1[0]).abs();
    let dy = (p0[1] - p1[1]).abs();
    if dx <= tol && dy > tol {
        Some(EdgeOrientation::Vertical)
    } else if dy <= tol && dx > tol {
        Some(EdgeOrientation::Horizontal)
    } else {
        None
    }
}

/// Structured right-triangle grid on the unit square, n cells per side.
pub fn unit_square_mesh(n: usize) -> Result<Mesh> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "unit_square_mesh requires n >= 1".into(),
        ));
    }
    let vid = |i: usize, j: usize| j * (n + 1) + i;
    let mut vertices = Vec::with_capacity((n + 1) * (n + 1));
    for j in 0..=n {
        for i in 0..=n {
            vertices.push([i as f64 / n as f64, j as f64 / n as f64]);
        }
    }
    let mut triangles = Vec::with_capacity(2 * n * n);
    for j in 0..n {
        for i in 0..n {
            let v00 = vid(i, j);
            let v10 = vid(i + 1, j);
            let v01 = vid(i, j + 1);
            let v11 = vid(i + 1, j + 1);
            // Split along the v00-v11 diagonal.
            triangles.push([v00, v10, v11]);
            triangles.push([v00, v11, v01]);
        }
    }
    finish_structured_mesh(vertices, triangles, |_, _| LoopTag::Outer)
}

/// Structured mesh on Omega1 \ Omega2 with Omega1 = [-0.5,1] x [-1,0.5] and
/// Omega2 = [0,0.5] x [-0.5,0]; n cells across the 1.5-length side.
pub fn multiconnected_mesh(n: usize) -> Result<Mesh> {
    if n < 3 || n % 3 != 0 {
        return Err(Error::InvalidArgument(format!(
            "multiconnected_mesh requires n divisible by 3 and >= 3 so the hole \
             corners land on grid nodes; got n = {n}"
        )));
    }
    let h = 1.5 / n as f64;
    let x0 = -0.5;
    let y0 = -1.0;
    // Grid node -> vertex id, allocated only for nodes touching an active cell.
    let mut node_id = vec![usize::MAX; (n + 1) * (n + 1)];
    let node = |i: usize, j: usize| j * (n + 1) + i;
    let hole = n / 3..2 * n / 3; // cells covering [0,0.5] x [-0.5,0]
    let mut vertices = Vec::new();
    let mut triangles = Vec::new();
    for j in 0..n {
        for i in 0..n {
            if hole.contains(&i) && hole.contains(&j) {
                continue;
            }
            let mut ids = [0usize; 4];
            for (k, (di, dj)) in [(0, 0), (1, 0), (0, 1), (1, 1)].iter().enumerate() {
                let key = node(i + di, j + dj);
                if node_id[key] == usize::MAX {
                    node_id[key] = vertices.len();
                    vertices.push([
                        x0 + (i + di) as f64 * h,
                        y0 + (j + dj) as f64 * h,
                    ]);
                }
                ids[k] = node_id[key];
            }
            let [v00, v10, v01, v11] = ids;
            triangles.push([v00, v10, v11]);
            triangles.push([v00, v11, v01]);
        }
    }
    finish_structured_mesh(vertices, triangles, |p0, p1| {
        let on_outer = |p: [f64; 2]| {
            (p[0] - x0).abs() <= 1e-12
                || (p[0] - 1.0).abs() <= 1e-12
                || (p[1] - y0).abs() <= 1e-12
                || (p[1] - 0.5).abs() <= 1e-12
        };
        if on_outer(p0) && on_outer(p1) {
            LoopTag::Outer
        } else {
            LoopTag::Inner
        }
    })
}

fn finish_structured_mesh(
    vertices: Vec<[f64; 2]>,
    triangles: Vec<[usize; 3]>,
    tag: impl Fn([f64; 2], [f64; 2]) -> LoopTag,
) -> Result<Mesh> {
    let boundary_edges = free_boundary_edges(&triangles)
        .into_iter()
        .map(|(v0, v1)| BoundaryEdge {
            v0,
            v1,
            tag: tag(vertices[v0], vertices[v1]),
        })
        .collect::<Vec<_>>();
    let vertex_class = classify_vertices(&vertices, &boundary_edges)?;
    let mesh = Mesh {
        vertices,
        triangles,
        boundary_edges,
        vertex_class,
    };
    mesh.validate()?;
    Ok(mesh)
}

// ---------------------------------------------------------------------------
// Plain-text mesh format:
//   vertices <V> triangles <T> bedges <B>
//   V lines: x y
//   T lines: i j k        (0-based, counterclockwise)
//   B lines: i j tag      (tag: outer | inner)
// ---------------------------------------------------------------------------

impl Mesh {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "vertices {} triangles {} bedges {}",
            self.n_vertices(),
            self.n_triangles(),
            self.boundary_edges.len()
        );
        for v in &self.vertices {
            let _ = writeln!(s, "{:.17e} {:.17e}", v[0], v[1]);
        }
        for t in &self.triangles {
            let _ = writeln!(s, "{} {} {}", t[0], t[1], t[2]);
        }
        for e in &self.boundary_edges {
            let tag = match e.tag {
                LoopTag::Outer => "outer",
                LoopTag::Inner => "inner",
            };
            let _ = writeln!(s, "{} {} {tag}", e.v0, e.v1);
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Mesh> {
        let bad = |line: usize, msg: &str| Error::MeshFormat(format!("line {}: {msg}", line + 1));
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty());
        let (hline, header) = lines
            .next()
            .ok_or_else(|| Error::MeshFormat("empty mesh file".into()))?;
        let tok: Vec<&str> = header.split_whitespace().collect();
        if tok.len() != 6 || tok[0] != "vertices" || tok[2] != "triangles" || tok[4] != "bedges" {
            return Err(bad(hline, "expected header `vertices V triangles T bedges B`"));
        }
        let parse_count = |s: &str, line: usize| {
            s.parse::<usize>()
                .map_err(|_| bad(line, &format!("bad count `{s}`")))
        };
        let nv = parse_count(tok[1], hline)?;
        let nt = parse_count(tok[3], hline)?;
        let nb = parse_count(tok[5], hline)?;

        let mut vertices = Vec::with_capacity(nv);
        for _ in 0..nv {
            let (ln, l) = lines
                .next()
                .ok_or_else(|| Error::MeshFormat("truncated vertex list".into()))?;
            let f: Vec<&str> = l.split_whitespace().collect();
            if f.len() != 2 {
                return Err(bad(ln, "expected `x y`"));
            }
            let x: f64 = f[0].parse().map_err(|_| bad(ln, "bad x coordinate"))?;
            let y: f64 = f[1].parse().map_err(|_| bad(ln, "bad y coordinate"))?;
            vertices.push([x, y]);
        }
        let mut triangles = Vec::with_capacity(nt);
        for _ in 0..nt {
            let (ln, l) = lines
                .next()
                .ok_or_else(|| Error::MeshFormat("truncated triangle list".into()))?;
            let f: Vec<&str> = l.split_whitespace().collect();
            if f.len() != 3 {
                return Err(bad(ln, "expected `i j k`"));
            }
            let mut t = [0usize; 3];
            for (k, s) in f.iter().enumerate() {
                t[k] = s.parse().map_err(|_| bad(ln, "bad vertex index"))?;
            }
            triangles.push(t);
        }
        let mut boundary_edges = Vec::with_capacity(nb);
        for _ in 0..nb {
            let (ln, l) = lines
                .next()
                .ok_or_else(|| Error::MeshFormat("truncated boundary edge list".into()))?;
            let f: Vec<&str> = l.split_whitespace().collect();
            if f.len() != 3 {
                return Err(bad(ln, "expected `i j tag`"));
            }
            let v0: usize = f[0].parse().map_err(|_| bad(ln, "bad vertex index"))?;
            let v1: usize = f[1].parse().map_err(|_| bad(ln, "bad vertex index"))?;
            let tag = match f[2] {
                "outer" => LoopTag::Outer,
                "inner" => LoopTag::Inner,
                other => return Err(bad(ln, &format!("unknown loop tag `{other}`"))),
            };
            boundary_edges.push(BoundaryEdge { v0, v1, tag });
        }
        if let Some((ln, _)) = lines.next() {
            return Err(bad(ln, "trailing content after boundary edge list"));
        }
        let vertex_class = classify_vertices(&vertices, &boundary_edges)?;
        let mesh = Mesh {
            vertices,
            triangles,
            boundary_edges,
            vertex_class,
        };
        mesh.validate()?;
        Ok(mesh)
    }

    pub fn write_file(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path.as_ref(), self.to_text()).map_err(|e| Error::io(path.as_ref(), e))
    }

    pub fn read_file(path: impl AsRef<Path>) -> Result<Mesh> {
        let text =
            std::fs::read_to_string(path.as_ref()).map_err(|e| Error::io(path.as_ref(), e))?;
        Mesh::from_text(&text)
    }
}

// ---------------------------------------------------------------------------
// Degrees of freedom
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct DofMap {
    pub order: usize,
    pub n_dofs: usize,
    pub n_vertices: usize,
    pub n_edges: usize,
    /// Global dof ids per triangle: 3 (P1) or 6 (P2, midpoints of edges
    /// (0,1), (1,2), (2,0) after the vertices).
    pub tri_dofs: Vec<Vec<usize>>,
    pub coords: Vec<[f64; 2]>,
    pub class: Vec<BoundaryClass>,
}

/// Number a P1 or P2 Lagrange space on the mesh. Edge midpoint dofs are
/// shared between the two triangles of an interior edge and inherit the
/// boundary class of their edge.
pub fn build_dof_map(mesh: &Mesh, order: usize) -> Result<DofMap> {
    if order != 1 && order != 2 {
        return Err(Error::InvalidArgument(format!(
            "element order must be 1 or 2, got {order}"
        )));
    }
    mesh.validate()?;
    let nv = mesh.n_vertices();
    if order == 1 {
        return Ok(DofMap {
            order,
            n_dofs: nv,
            n_vertices: nv,
            n_edges: 0,
            tri_dofs: mesh.triangles.iter().map(|t| t.to_vec()).collect(),
            coords: mesh.vertices.clone(),
            class: mesh.vertex_class.clone(),
        });
    }
    // Edge numbering in first-encounter order over the triangle list.
    let mut edge_ids: HashMap<(usize, usize), usize> = HashMap::new();
    let mut edge_list: Vec<(usize, usize)> = Vec::new();
    let mut tri_dofs = Vec::with_capacity(mesh.n_triangles());
    for &[a, b, c] in &mesh.triangles {
        let mut dofs = Vec::with_capacity(6);
        dofs.extend_from_slice(&[a, b, c]);
        for (i, j) in [(a, b), (b, c), (c, a)] {
            let key = edge_key(i, j);
            let id = *edge_ids.entry(key).or_insert_with(|| {
                edge_list.push(key);
                edge_list.len() - 1
            });
            dofs.push(nv + id);
        }
        tri_dofs.push(dofs);
    }
    let ne = edge_list.len();
    let mut coords = mesh.vertices.clone();
    let mut class = mesh.vertex_class.clone();
    coords.resize(nv + ne, [0.0, 0.0]);
    class.resize(nv + ne, BoundaryClass::Interior);
    for (id, &(i, j)) in edge_list.iter().enumerate() {
        coords[nv + id] = [
            0.5 * (mesh.vertices[i][0] + mesh.vertices[j][0]),
            0.5 * (mesh.vertices[i][1] + mesh.vertices[j][1]),
        ];
    }
    let mut extent: f64 = 0.0;
    for v in &mesh.vertices {
        extent = extent.max(v[0].abs()).max(v[1].abs());
    }
    let tol = 1e-9 * extent.max(1.0);
    for e in &mesh.boundary_edges {
        let id = edge_ids.get(&edge_key(e.v0, e.v1)).copied().ok_or_else(|| {
            Error::InvalidArgument(format!(
                "boundary edge ({}, {}) is not a triangle edge",
                e.v0, e.v1
            ))
        })?;
        class[nv + id] = match edge_orientation(mesh.vertices[e.v0], mesh.vertices[e.v1], tol) {
            Some(EdgeOrientation::Vertical) => BoundaryClass::OnVerticalEdge,
            Some(EdgeOrientation::Horizontal) => BoundaryClass::OnHorizontalEdge,
            None => {
                return Err(Error::UnsupportedGeometry(format!(
                    "boundary edge ({}, {}) is not axis-aligned",
                    e.v0, e.v1
                )))
            }
        };
    }
    Ok(DofMap {
        order,
        n_dofs: nv + ne,
        n_vertices: nv,
        n_edges: ne,
        tri_dofs,
        coords,
        class,
    })
}
