//! Quadrature on the reference triangle `(0,0), (1,0), (0,1)`.
//!
//! Degrees 1 and 2 use the classical centroid and three-point rules, degrees
//! 3 to 5 Radon's seven-point rule, and degrees 6 to 8 a collapsed
//! Gauss-Legendre product rule.

use crate::error::{Error, Result};

/// Points are barycentric `(l0, l1, l2)` with reference coordinates
/// `x = l1, y = l2`. Weights sum to the reference area `1/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub points: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
    pub exactness_degree: usize,
}

/// Exactness used for every assembled form.
pub const ASSEMBLY_DEGREE: usize = 5;
/// Exactness used for error norms.
pub const NORM_DEGREE: usize = 7;

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Integrates `f(x, y)` over the reference triangle.
    pub fn integrate_reference(&self, f: impl Fn(f64, f64) -> f64) -> f64 {
        self.points
            .iter()
            .zip(&self.weights)
            .map(|(p, w)| w * f(p[1], p[2]))
            .sum()
    }
}

pub fn triangle_quadrature(min_degree: usize) -> Result<QuadratureRule> {
    match min_degree {
        1 => Ok(QuadratureRule {
            points: vec![[1.0 / 3.0; 3]],
            weights: vec![0.5],
            exactness_degree: 1,
        }),
        2 => {
            let (a, b) = (1.0 / 6.0, 2.0 / 3.0);
            Ok(QuadratureRule {
                points: vec![[b, a, a], [a, b, a], [a, a, b]],
                weights: vec![1.0 / 6.0; 3],
                exactness_degree: 2,
            })
        }
        3..=5 => Ok(radon7()),
        6..=8 => {
            // u-direction carries the (1 - u) Jacobian, so it needs one more
            // degree than the v-direction.
            let n = (min_degree + 3) / 2;
            Ok(collapsed_gauss(n))
        }
        _ => Err(Error::InvalidArgument(format!(
            "triangle quadrature degree must be in 1..=8, got {min_degree}"
        ))),
    }
}

fn radon7() -> QuadratureRule {
    let s15 = 15f64.sqrt();
    let a = (6.0 - s15) / 21.0;
    let b = (6.0 + s15) / 21.0;
    let wa = (155.0 - s15) / 2400.0;
    let wb = (155.0 + s15) / 2400.0;
    let third = 1.0 / 3.0;
    let (ca, cb) = (1.0 - 2.0 * a, 1.0 - 2.0 * b);
    QuadratureRule {
        points: vec![
            [third, third, third],
            [ca, a, a],
            [a, ca, a],
            [a, a, ca],
            [cb, b, b],
            [b, cb, b],
            [b, b, cb],
        ],
        weights: vec![9.0 / 80.0, wa, wa, wa, wb, wb, wb],
        exactness_degree: 5,
    }
}

fn collapsed_gauss(n: usize) -> QuadratureRule {
    let (nodes, weights) = gauss_legendre_unit(n);
    let mut points = Vec::with_capacity(n * n);
    let mut w = Vec::with_capacity(n * n);
    for (u, wu) in nodes.iter().zip(&weights) {
        for (v, wv) in nodes.iter().zip(&weights) {
            let x = *u;
            let y = v * (1.0 - u);
            points.push([1.0 - x - y, x, y]);
            w.push(wu * wv * (1.0 - u));
        }
    }
    QuadratureRule {
        points,
        weights: w,
        exactness_degree: 2 * n - 2,
    }
}

/// Gauss-Legendre nodes and weights mapped to `[0, 1]`.
pub fn gauss_legendre_unit(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        // Tricomi initial guess, then Newton on P_n.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != 0.0 {
            dp = d;
        }
        nodes[i] = 0.5 * (1.0 - x);
        weights[i] = 1.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}
