//! Lagrange basis functions on the reference triangle with vertices
//! (0,0), (1,0), (0,1).
//!
//! Local node order: vertices 0,1,2, then (P2 only) midpoints of edges
//! (0,1), (1,2), (2,0).

/// Maximum local basis size (P2).
pub const MAX_LOCAL: usize = 6;

/// Basis values and reference gradients at one point.
#[derive(Debug, Clone, Copy)]
pub struct ShapeEval {
    pub values: [f64; MAX_LOCAL],
    pub grads: [[f64; 2]; MAX_LOCAL],
    pub n: usize,
}

pub fn n_local(order: usize) -> usize {
    match order {
        1 => 3,
        2 => 6,
        _ => panic!("unsupported element order {order}"),
    }
}

/// Evaluate the P1 or P2 Lagrange basis at a reference point.
pub fn eval_shapes(order: usize, p: [f64; 2]) -> ShapeEval {
    let [x, y] = p;
    let l0 = 1.0 - x - y;
    let l1 = x;
    let l2 = y;
    let mut values = [0.0; MAX_LOCAL];
    let mut grads = [[0.0; 2]; MAX_LOCAL];
    // Barycentric gradients: dl0 = (-1,-1), dl1 = (1,0), dl2 = (0,1).
    match order {
        1 => {
            values[0] = l0;
            values[1] = l1;
            values[2] = l2;
            grads[0] = [-1.0, -1.0];
            grads[1] = [1.0, 0.0];
            grads[2] = [0.0, 1.0];
            ShapeEval { values, grads, n: 3 }
        }
        2 => {
            values[0] = l0 * (2.0 * l0 - 1.0);
            values[1] = l1 * (2.0 * l1 - 1.0);
            values[2] = l2 * (2.0 * l2 - 1.0);
            values[3] = 4.0 * l0 * l1;
            values[4] = 4.0 * l1 * l2;
            values[5] = 4.0 * l2 * l0;
            // d/dl of l(2l-1) is 4l-1; chain through the barycentric gradients.
            let d0 = 4.0 * l0 - 1.0;
            let d1 = 4.0 * l1 - 1.0;
            let d2 = 4.0 * l2 - 1.0;
            grads[0] = [-d0, -d0];
            grads[1] = [d1, 0.0];
            grads[2] = [0.0, d2];
            grads[3] = [4.0 * (l0 - l1), -4.0 * l1];
            grads[4] = [4.0 * l2, 4.0 * l1];
            grads[5] = [-4.0 * l2, 4.0 * (l0 - l2)];
            ShapeEval { values, grads, n: 6 }
        }
        _ => panic!("unsupported element order {order}"),
    }
}

/// Reference coordinates of the local nodes.
pub fn local_nodes(order: usize) -> Vec<[f64; 2]> {
    match order {
        1 => vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]],
        2 => vec![
            [0.0, 0.0],
            [1.0, 0.0],
            [0.0, 1.0],
            [0.5, 0.0],
            [0.5, 0.5],
            [0.0, 0.5],
        ],
        _ => panic!("unsupported element order {order}"),
    }
}
