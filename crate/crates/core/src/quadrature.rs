//! Gauss–Legendre quadrature: fixed rules, composite rules, and an adaptive
//! bisection driver for integrands with kinks.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

/// Nodes and weights of an n-point Gauss–Legendre rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Computes the rule by Newton iteration on P_n from Chebyshev-like
    /// starting points. Cost is O(n²); use [`GaussLegendre::cached`] in loops.
    pub fn new(n: usize) -> Self {
        assert!(n > 0, "Gauss–Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() <= 1e-16 * x.abs().max(1.0) {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    /// Process-wide cache keyed by node count.
    pub fn cached(n: usize) -> Arc<Self> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<GaussLegendre>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(rule) = cache.lock().expect("quadrature cache poisoned").get(&n) {
            return Arc::clone(rule);
        }
        let rule = Arc::new(Self::new(n));
        cache
            .lock()
            .expect("quadrature cache poisoned")
            .entry(n)
            .or_insert(rule)
            .clone()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// ∫_a^b f(x) dx with this rule mapped onto [a, b].
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(mid + half * x))
            .sum::<f64>()
            * half
    }

    /// Applies the rule on each of `panels` equal sub-intervals of [a, b].
    pub fn integrate_composite<F: FnMut(f64) -> f64>(
        &self,
        a: f64,
        b: f64,
        panels: usize,
        mut f: F,
    ) -> f64 {
        let panels = panels.max(1);
        let h = (b - a) / panels as f64;
        (0..panels)
            .map(|k| {
                let lo = a + h * k as f64;
                let hi = if k + 1 == panels { b } else { lo + h };
                self.integrate(lo, hi, &mut f)
            })
            .sum()
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let (p, pm1) = if n == 0 { (1.0, 0.0) } else { (p1, p0) };
    let d = n as f64 * (x * p - pm1) / (x * x - 1.0);
    (p, d)
}

/// Result of [`integrate_adaptive`].
#[derive(Debug, Clone, Copy)]
pub struct AdaptiveEstimate {
    pub value: f64,
    pub error_estimate: f64,
    pub intervals: usize,
}

/// Adaptive bisection with a 20-point rule, comparing each interval against
/// its two halves. Stops once the local difference is below `rel_tol` of the
/// running magnitude or `max_depth` levels are used.
pub fn integrate_adaptive<F: Fn(f64) -> f64>(
    a: f64,
    b: f64,
    rel_tol: f64,
    max_depth: u32,
    f: F,
) -> AdaptiveEstimate {
    let rule = GaussLegendre::cached(20);
    let whole = rule.integrate(a, b, &f);
    let scale = rule.integrate(a, b, |x| f(x).abs()).max(f64::MIN_POSITIVE);
    let mut out = AdaptiveEstimate {
        value: 0.0,
        error_estimate: 0.0,
        intervals: 0,
    };
    let mut stack = vec![(a, b, whole, 0u32)];
    while let Some((lo, hi, coarse, depth)) = stack.pop() {
        let mid = 0.5 * (lo + hi);
        let left = rule.integrate(lo, mid, &f);
        let right = rule.integrate(mid, hi, &f);
        let fine = left + right;
        let diff = (fine - coarse).abs();
        let width_share = (hi - lo) / (b - a);
        if diff <= rel_tol * scale * width_share.max(1e-3) || depth >= max_depth {
            out.value += fine;
            out.error_estimate += diff;
            out.intervals += 2;
        } else {
            stack.push((mid, hi, right, depth + 1));
            stack.push((lo, mid, left, depth + 1));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_two_and_rule_is_symmetric() {
        for n in [1, 2, 5, 64, 257, 2000] {
            let rule = GaussLegendre::new(n);
            let s: f64 = rule.weights().iter().sum();
            assert!((s - 2.0).abs() < 1e-12, "n={n} sum={s}");
            for i in 0..n {
                assert!((rule.nodes()[i] + rule.nodes()[n - 1 - i]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn exact_for_polynomials_up_to_degree_2n_minus_1() {
        let rule = GaussLegendre::new(6);
        // ∫_0^2 x^11 dx = 2^12 / 12
        let got = rule.integrate(0.0, 2.0, |x| x.powi(11));
        let want = 2f64.powi(12) / 12.0;
        assert!((got - want).abs() / want < 1e-14);
    }

    #[test]
    fn composite_integrates_oscillatory_function() {
        let rule = GaussLegendre::cached(64);
        let got = rule.integrate_composite(0.0, 20.0, 8, f64::sin);
        let want = 1.0 - 20f64.cos();
        assert!((got - want).abs() < 1e-13);
    }

    #[test]
    fn adaptive_handles_a_kink() {
        // ∫_0^3 |x - 1| dx = 0.5 + 2
        let est = integrate_adaptive(0.0, 3.0, 1e-14, 40, |x| (x - 1.0).abs());
        assert!((est.value - 2.5).abs() < 1e-12, "{est:?}");
    }
}
