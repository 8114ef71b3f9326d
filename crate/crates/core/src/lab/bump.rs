//! The smooth reference bump and its exact derivative representation.

use num_traits::{ToPrimitive, Zero};
use std::collections::BTreeMap;

use crate::param::{qi, Q};

/// Beyond this value of `1/(1 - |x|^2)` the bump underflows to zero.
const W_CUTOFF: f64 = 1e4;

/// Multiplicative constant in front of `exp(-1/(1 - |x|^2))`; chosen so the peak is 1.
pub const NORMALIZATION: f64 = std::f64::consts::E;

/// Polynomial in `x_1..x_d` and `w = 1/(1 - |x|^2)`; keys are exponent vectors of length `d + 1`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Prefactor {
    pub dim: u32,
    pub terms: BTreeMap<Vec<u32>, Q>,
}

impl Prefactor {
    pub fn one(dim: u32) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(vec![0; dim as usize + 1], qi(1));
        Prefactor { dim, terms }
    }

    fn add(&mut self, key: Vec<u32>, c: Q) {
        let e = self.terms.entry(key).or_insert_with(Q::zero);
        *e += c;
        // keep the map free of cancelled terms
    }

    fn prune(mut self) -> Self {
        self.terms.retain(|_, v| !v.is_zero());
        self
    }

    /// Prefactor of `d/dx_j (P f)`, using `d/dx_j f = -2 x_j w^2 f` and `d/dx_j w = 2 x_j w^2`.
    pub fn differentiate(&self, j: usize) -> Prefactor {
        let wi = self.dim as usize;
        let mut out = Prefactor { dim: self.dim, terms: BTreeMap::new() };
        for (k, c) in &self.terms {
            if k[j] > 0 {
                let mut e = k.clone();
                e[j] -= 1;
                out.add(e, c * qi(k[j] as i64));
            }
            if k[wi] > 0 {
                let mut e = k.clone();
                e[j] += 1;
                e[wi] += 1;
                out.add(e, c * qi(2 * k[wi] as i64));
            }
            let mut e = k.clone();
            e[j] += 1;
            e[wi] += 2;
            out.add(e, c * qi(-2));
        }
        out.prune()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn compile(&self) -> Vec<(Vec<i32>, f64)> {
        self.terms
            .iter()
            .map(|(k, c)| (k.iter().map(|&v| v as i32).collect(), c.to_f64().unwrap_or(f64::NAN)))
            .collect()
    }
}

/// `x -> e * exp(-1/(1 - |x|^2))` on the open unit ball of `R^d`, zero outside.
#[derive(Debug, Clone)]
pub struct SmoothBump {
    dim: u32,
}

/// A derivative `d_alpha f = P_alpha(x, w) f(x)` ready for evaluation.
#[derive(Debug, Clone)]
pub struct BumpDerivative {
    pub alpha: Vec<u32>,
    pub prefactor: Prefactor,
    compiled: Vec<(Vec<i32>, f64)>,
}

impl SmoothBump {
    pub fn new(dim: u32) -> Self {
        assert!(dim >= 1, "dimension must be positive");
        SmoothBump { dim }
    }

    pub fn dim(&self) -> u32 {
        self.dim
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let r2: f64 = x.iter().map(|v| v * v).sum();
        if r2 >= 1.0 {
            return 0.0;
        }
        let w = 1.0 / (1.0 - r2);
        if w > W_CUTOFF {
            return 0.0;
        }
        (1.0 - w).exp()
    }

    /// Exact prefactor table for `d_alpha`, built by applying the recurrence axis by axis.
    pub fn derivative(&self, alpha: &[u32]) -> BumpDerivative {
        assert_eq!(alpha.len(), self.dim as usize, "multi-index length must equal the dimension");
        let mut p = Prefactor::one(self.dim);
        for (j, &a) in alpha.iter().enumerate() {
            for _ in 0..a {
                p = p.differentiate(j);
            }
        }
        let compiled = p.compile();
        BumpDerivative { alpha: alpha.to_vec(), prefactor: p, compiled }
    }

    pub fn eval_derivative(&self, alpha: &[u32], x: &[f64]) -> f64 {
        self.derivative(alpha).eval(x)
    }
}

impl BumpDerivative {
    pub fn order(&self) -> u32 {
        self.alpha.iter().sum()
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let r2: f64 = x.iter().map(|v| v * v).sum();
        if r2 >= 1.0 {
            return 0.0;
        }
        let w = 1.0 / (1.0 - r2);
        if w > W_CUTOFF {
            return 0.0;
        }
        let d = x.len();
        let mut poly = 0.0;
        for (k, c) in &self.compiled {
            let mut term = *c * w.powi(k[d]);
            for i in 0..d {
                if k[i] != 0 {
                    term *= x[i].powi(k[i]);
                }
            }
            poly += term;
        }
        poly * (1.0 - w).exp()
    }
}

/// All multi-indices of length `d` with total order at most `max_order`.
pub fn multi_indices(d: u32, max_order: u32) -> Vec<Vec<u32>> {
    let mut out = vec![vec![]];
    for _ in 0..d {
        let mut next = Vec::new();
        for v in &out {
            let used: u32 = v.iter().sum();
            for a in 0..=(max_order - used) {
                let mut w = v.clone();
                w.push(a);
                next.push(w);
            }
        }
        out = next;
    }
    out
}

/// Richardson-extrapolated central difference of `g` along axis `j`.
pub fn richardson_partial(g: &dyn Fn(&[f64]) -> f64, x: &[f64], j: usize, h: f64) -> f64 {
    let cd = |h: f64| {
        let mut a = x.to_vec();
        let mut b = x.to_vec();
        a[j] += h;
        b[j] -= h;
        (g(&a) - g(&b)) / (2.0 * h)
    };
    let d1 = cd(h);
    let d2 = cd(h / 2.0);
    let d4 = cd(h / 4.0);
    let r1 = (4.0 * d2 - d1) / 3.0;
    let r2 = (4.0 * d4 - d2) / 3.0;
    (16.0 * r2 - r1) / 15.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn peak_and_support() {
        let f = SmoothBump::new(1);
        assert_eq!(f.eval(&[0.0]), 1.0);
        assert_eq!(f.eval(&[1.0]), 0.0);
        assert_eq!(f.eval(&[2.0]), 0.0);
        let f2 = SmoothBump::new(2);
        assert_eq!(f2.eval(&[0.6, 0.8]), 0.0);
    }

    #[test]
    fn zeroth_derivative_is_the_bump() {
        let f = SmoothBump::new(2);
        let x = [0.3, -0.2];
        assert_eq!(f.eval_derivative(&[0, 0], &x), f.eval(&x));
    }

    #[test]
    fn odd_derivative_vanishes_at_origin() {
        assert_eq!(SmoothBump::new(1).eval_derivative(&[1], &[0.0]), 0.0);
    }

    #[test]
    fn first_derivative_matches_differences() {
        let f = SmoothBump::new(1);
        let exact = f.eval_derivative(&[1], &[0.5]);
        let fd = richardson_partial(&|x| f.eval(x), &[0.5], 0, 1e-2);
        assert!((exact - fd).abs() <= 1e-6 * exact.abs(), "{exact} vs {fd}");
    }

    #[test]
    fn no_derivative_vanishes_identically() {
        let f = SmoothBump::new(2);
        for a in multi_indices(2, 4) {
            assert!(!f.derivative(&a).prefactor.is_zero(), "{a:?}");
        }
    }

    #[test]
    fn derivatives_commute() {
        let p = Prefactor::one(2);
        assert_eq!(p.differentiate(0).differentiate(1), p.differentiate(1).differentiate(0));
    }
}
