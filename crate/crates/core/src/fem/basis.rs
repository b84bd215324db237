//! Lagrange bases on the reference triangle, evaluated at barycentric points.
//!
//! Local node order for P2: vertices 0, 1, 2, then the midpoints of the local
//! edges (0,1), (1,2), (2,0).

/// Reference gradients of the barycentric coordinates `l0 = 1 - x - y`,
/// `l1 = x`, `l2 = y`.
pub const BARY_GRAD: [[f64; 2]; 3] = [[-1.0, -1.0], [1.0, 0.0], [0.0, 1.0]];

/// Local edge `k` joins local vertices `EDGE_VERTS[k]`.
pub const EDGE_VERTS: [[usize; 2]; 3] = [[0, 1], [1, 2], [2, 0]];

pub fn p1_basis(l: [f64; 3]) -> ([f64; 3], [[f64; 2]; 3]) {
    (l, BARY_GRAD)
}

pub fn p2_basis(l: [f64; 3]) -> ([f64; 6], [[f64; 2]; 6]) {
    let mut val = [0.0; 6];
    let mut grad = [[0.0; 2]; 6];
    for i in 0..3 {
        val[i] = l[i] * (2.0 * l[i] - 1.0);
        let s = 4.0 * l[i] - 1.0;
        grad[i] = [s * BARY_GRAD[i][0], s * BARY_GRAD[i][1]];
    }
    for (k, &[a, b]) in EDGE_VERTS.iter().enumerate() {
        val[3 + k] = 4.0 * l[a] * l[b];
        grad[3 + k] = [
            4.0 * (l[b] * BARY_GRAD[a][0] + l[a] * BARY_GRAD[b][0]),
            4.0 * (l[b] * BARY_GRAD[a][1] + l[a] * BARY_GRAD[b][1]),
        ];
    }
    (val, grad)
}

/// Barycentric coordinates of the six P2 nodes.
pub fn p2_nodes() -> [[f64; 3]; 6] {
    [
        [1.0, 0.0, 0.0],
        [0.0, 1.0, 0.0],
        [0.0, 0.0, 1.0],
        [0.5, 0.5, 0.0],
        [0.0, 0.5, 0.5],
        [0.5, 0.0, 0.5],
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn bary() -> impl Strategy<Value = [f64; 3]> {
        (0.0..1.0f64, 0.0..1.0f64).prop_map(|(a, b)| {
            let (x, y) = if a + b > 1.0 {
                (1.0 - a, 1.0 - b)
            } else {
                (a, b)
            };
            [1.0 - x - y, x, y]
        })
    }

    #[test]
    fn p1_kronecker_and_centroid() {
        for i in 0..3 {
            let mut l = [0.0; 3];
            l[i] = 1.0;
            let (v, _) = p1_basis(l);
            assert_eq!(v, l);
        }
        let (v, _) = p1_basis([1.0 / 3.0; 3]);
        assert!(v.iter().all(|x| (x - 1.0 / 3.0).abs() < 1e-16));
    }

    #[test]
    fn p2_kronecker_at_nodes() {
        for (i, node) in p2_nodes().iter().enumerate() {
            let (v, _) = p2_basis(*node);
            for (j, vj) in v.iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((vj - want).abs() < 1e-15, "node {i} basis {j}: {vj}");
            }
        }
    }

    #[test]
    fn p2_gradient_matches_finite_difference() {
        let l = [0.2, 0.5, 0.3];
        let (_, g) = p2_basis(l);
        let h = 1e-6;
        for i in 0..6 {
            let (x, y) = (l[1], l[2]);
            let at = |x: f64, y: f64| p2_basis([1.0 - x - y, x, y]).0[i];
            let gx = (at(x + h, y) - at(x - h, y)) / (2.0 * h);
            let gy = (at(x, y + h) - at(x, y - h)) / (2.0 * h);
            assert!((g[i][0] - gx).abs() < 1e-8);
            assert!((g[i][1] - gy).abs() < 1e-8);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]
        #[test]
        fn partition_of_unity(l in bary()) {
            let (v1, g1) = p1_basis(l);
            prop_assert!((v1.iter().sum::<f64>() - 1.0).abs() < 1e-14);
            let gs: [f64; 2] = [g1.iter().map(|g| g[0]).sum(), g1.iter().map(|g| g[1]).sum()];
            prop_assert!(gs[0].abs() < 1e-14 && gs[1].abs() < 1e-14);
            let (v2, g2) = p2_basis(l);
            prop_assert!((v2.iter().sum::<f64>() - 1.0).abs() < 1e-14);
            let gs: [f64; 2] = [g2.iter().map(|g| g[0]).sum(), g2.iter().map(|g| g[1]).sum()];
            prop_assert!(gs[0].abs() < 1e-13 && gs[1].abs() < 1e-13);
        }
    }
}
