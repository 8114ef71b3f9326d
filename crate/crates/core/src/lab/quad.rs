//! Quadrature settings and one-dimensional helpers.

use gauss_quad::GaussLegendre;
use serde::{Deserialize, Serialize};
use std::num::NonZeroUsize;

use super::LabError;

/// Environment variable selecting a quadrature profile (`fast`, `default`, `accurate`).
pub const PROFILE_ENV: &str = "RKHS_SANDWICH_QUADRATURE";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    /// Fixed tensor grid at the configured resolution.
    MidpointTensor,
    /// Grid doubled until the relative change drops below the tolerance.
    AdaptiveRefinement,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    /// Cells per axis on the coarsest grid.
    pub resolution: usize,
    pub scheme: Scheme,
    pub rel_tol: f64,
    pub mc_samples: usize,
    pub seed: u64,
    /// Number of grid doublings allowed in adaptive mode.
    pub max_refinements: u32,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            resolution: 16,
            scheme: Scheme::AdaptiveRefinement,
            rel_tol: 1e-6,
            mc_samples: 256,
            seed: 0x5eed,
            max_refinements: 6,
        }
    }
}

impl QuadratureConfig {
    pub fn fast() -> Self {
        QuadratureConfig { rel_tol: 1e-4, mc_samples: 64, max_refinements: 4, ..Self::default() }
    }

    pub fn accurate() -> Self {
        QuadratureConfig { resolution: 32, rel_tol: 1e-8, mc_samples: 1024, max_refinements: 8, ..Self::default() }
    }

    pub fn profile(name: &str) -> Option<Self> {
        match name {
            "fast" => Some(Self::fast()),
            "default" => Some(Self::default()),
            "accurate" => Some(Self::accurate()),
            _ => None,
        }
    }

    /// Profile named by [`PROFILE_ENV`], or the default.
    pub fn from_env() -> Self {
        std::env::var(PROFILE_ENV).ok().and_then(|v| Self::profile(&v)).unwrap_or_default()
    }

    pub fn validate(&self) -> Result<(), LabError> {
        if self.resolution < 16 {
            return Err(LabError::Config(format!("resolution {} is below 16", self.resolution)));
        }
        if !(self.rel_tol > 0.0 && self.rel_tol <= 1e-3) {
            return Err(LabError::Config(format!("tolerance {} outside (0, 1e-3]", self.rel_tol)));
        }
        if self.mc_samples == 0 {
            return Err(LabError::Config("mc_samples must be positive".into()));
        }
        Ok(())
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

/// Gauss-Legendre nodes and weights mapped to `[0, 1]`.
pub fn unit_gauss(m: usize) -> Vec<(f64, f64)> {
    let rule = GaussLegendre::new(NonZeroUsize::new(m.max(1)).expect("nonzero"));
    rule.as_node_weight_pairs().iter().map(|&(x, w)| (0.5 * (x + 1.0), 0.5 * w)).collect()
}

/// Volume of the Euclidean unit ball in `R^d`.
pub fn unit_ball_volume(d: u32) -> f64 {
    let h = d as f64 / 2.0;
    std::f64::consts::PI.powf(h) / libm::tgamma(h + 1.0)
}

fn tanh_sinh(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    quadrature::double_exponential::integrate(f, a, b, tol).integral
}

/// `d V_d \int_a^b f(r) r^{d-1} dr`, the integral of the radial function `x -> f(|x|)`
/// over the shell `a < |x| < b`. `b` may be infinite.
///
/// Divergence at either end is detected by watching the integral over shrinking
/// (or growing) cut-offs: if the contributions stop decaying, a divergence error is returned.
pub fn radial_integral(f: impl Fn(f64) -> f64, a: f64, b: f64, d: u32) -> Result<f64, LabError> {
    if !(a >= 0.0 && b > a) || d == 0 {
        return Err(LabError::BadInput(format!("need 0 <= a < b and d >= 1, got a={a}, b={b}, d={d}")));
    }
    let g = |r: f64| f(r) * r.powi(d as i32 - 1);
    let scale = d as f64 * unit_ball_volume(d);
    let tol = 1e-12;

    // Split at a finite midpoint and push each end toward its limit.
    let mid = if b.is_finite() { 0.5 * (a + b) } else { a + 1.0 };
    let lower = limit_integral(&g, mid, a, tol)?;
    let upper = if b.is_finite() { limit_integral(&g, mid, b, tol)? } else { tail_integral(&g, mid, tol)? };
    Ok(scale * (lower + upper))
}

/// `\int_end^mid g`, approached by cut-offs closing in on `end`.
fn limit_integral(g: &dyn Fn(f64) -> f64, mid: f64, end: f64, tol: f64) -> Result<f64, LabError> {
    let whole = tanh_sinh(g, end.min(mid), end.max(mid), tol);
    // Compare with the integral that stops a tiny distance short of the end.
    let sign = if end < mid { 1.0 } else { -1.0 };
    let mut pieces = Vec::new();
    let mut gap = (mid - end).abs() / 2.0;
    for _ in 0..40 {
        let cut = end + sign * gap;
        let next = end + sign * gap / 2.0;
        pieces.push(tanh_sinh(g, cut.min(next), cut.max(next), tol).abs());
        gap /= 2.0;
    }
    check_decay(&pieces, whole)
}

fn tail_integral(g: &dyn Fn(f64) -> f64, start: f64, tol: f64) -> Result<f64, LabError> {
    let mut total = 0.0;
    let mut pieces = Vec::new();
    let mut lo = start;
    let mut width = 1.0;
    for _ in 0..200 {
        let v = tanh_sinh(g, lo, lo + width, tol);
        total += v;
        pieces.push(v.abs());
        lo += width;
        width *= 2.0;
        let n = pieces.len();
        if n >= 8 && pieces[n - 1] <= 1e-15 * total.abs() {
            return Ok(total);
        }
        if n >= 8 && pieces[n - 4..].windows(2).all(|w| w[1] >= 0.97 * w[0]) {
            return Err(LabError::Divergence { last: total });
        }
    }
    check_decay(&pieces, total)
}

fn check_decay(pieces: &[f64], value: f64) -> Result<f64, LabError> {
    if !value.is_finite() {
        return Err(LabError::Divergence { last: value });
    }
    let tiny = 1e-15 * value.abs().max(1e-300);
    let n = pieces.len();
    let converging = pieces[n - 7..].windows(2).all(|w| w[1] <= tiny || w[1] < 0.97 * w[0]);
    if converging {
        Ok(value)
    } else {
        Err(LabError::Divergence { last: value })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disk_area_and_interval_length() {
        let a = radial_integral(|_| 1.0, 0.0, 1.0, 2).unwrap();
        assert!((a - std::f64::consts::PI).abs() < 1e-10);
        let b = radial_integral(|_| 1.0, 0.0, 1.0, 1).unwrap();
        assert!((b - 2.0).abs() < 1e-12);
    }

    #[test]
    fn lipschitz_cell_bound() {
        // r^{p - theta p - d} over the ball of radius delta.
        let (d, p, theta, delta) = (2u32, 2.0, 0.5, 0.25f64);
        let e = (1.0 - theta) * p;
        let got = radial_integral(|r| r.powf(p - theta * p - d as f64), 0.0, delta, d).unwrap();
        let want = d as f64 * unit_ball_volume(d) * delta.powf(e) / e;
        assert!((got - want).abs() < 1e-8 * want, "{got} vs {want}");
    }

    #[test]
    fn gaussian_tail_and_divergence() {
        let g = radial_integral(|r| (-r * r).exp(), 0.0, f64::INFINITY, 2).unwrap();
        assert!((g - std::f64::consts::PI).abs() < 1e-8);
        assert!(matches!(radial_integral(|r| 1.0 / r, 1.0, f64::INFINITY, 1), Err(LabError::Divergence { .. })));
        assert!(matches!(radial_integral(|r| r.powi(-3), 0.0, 1.0, 2), Err(LabError::Divergence { .. })));
    }

    #[test]
    fn config_bounds() {
        assert!(QuadratureConfig::default().validate().is_ok());
        let bad = QuadratureConfig { resolution: 8, ..QuadratureConfig::default() };
        assert!(bad.validate().is_err());
        let bad = QuadratureConfig { rel_tol: 1e-2, ..QuadratureConfig::default() };
        assert!(bad.validate().is_err());
    }
}
