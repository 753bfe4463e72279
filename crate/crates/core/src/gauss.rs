//! Gauss-Legendre nodes by Newton iteration on the three-term recurrence.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

/// Nodes and weights on `[-1, 1]`, nodes ascending.
pub fn gauss_legendre(n: usize) -> Arc<(Vec<f64>, Vec<f64>)> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<(Vec<f64>, Vec<f64>)>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(hit) = cache.lock().unwrap().get(&n) {
        return hit.clone();
    }
    let rule = Arc::new(compute(n));
    cache.lock().unwrap().insert(n, rule.clone());
    rule
}

fn compute(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            if n == 1 {
                p0 = 1.0;
                p1 = z;
            }
            dp = nf * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// Nodes and weights mapped to `[a, b]`.
pub fn gauss_legendre_on(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let base = gauss_legendre(n);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let nodes = base.0.iter().map(|x| mid + half * x).collect();
    let weights = base.1.iter().map(|w| half * w).collect();
    (nodes, weights)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_two_and_integrate_polynomials() {
        for n in [1, 2, 5, 16, 64, 257] {
            let r = gauss_legendre(n);
            let s: f64 = r.1.iter().sum();
            assert!((s - 2.0).abs() < 1e-13, "n={n} sum={s}");
            // x^(2n-2) integrates to 2 / (2n-1)
            let k = 2 * n as i32 - 2;
            let got: f64 = r.0.iter().zip(&r.1).map(|(x, w)| w * x.powi(k)).sum();
            let exact = 2.0 / (k as f64 + 1.0);
            assert!((got - exact).abs() < 1e-12 * exact.max(1e-3), "n={n}");
        }
    }

    #[test]
    fn mapped_rule_integrates_exponential() {
        let (x, w) = gauss_legendre_on(12, 0.0, 1.0);
        let got: f64 = x.iter().zip(&w).map(|(x, w)| w * x.exp()).sum();
        assert!((got - (1f64.exp() - 1.0)).abs() < 1e-14);
    }
}
