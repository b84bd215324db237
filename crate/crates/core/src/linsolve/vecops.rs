//! Dense vector helpers used throughout the solver.

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// `y += alpha * x`
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// `sum_k alpha_k x_k` over vectors of equal length.
pub fn combine(terms: &[(f64, &[f64])]) -> Vec<f64> {
    let n = terms.first().map_or(0, |(_, v)| v.len());
    let mut out = vec![0.0; n];
    for (alpha, v) in terms {
        axpy(*alpha, v, &mut out);
    }
    out
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scale(alpha: f64, a: &[f64]) -> Vec<f64> {
    a.iter().map(|x| alpha * x).collect()
}
