//! Rescaled bump families and their `L_p` norms.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::bump::{BumpDerivative, SmoothBump};
use super::quad::{unit_gauss, QuadratureConfig, Scheme};
use super::LabError;
use crate::packing::{ball_candidates, candidate_grid, greedy_indices};
use crate::param::DomainSpec;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Reference {
    Smooth,
    /// `(delta - |x - t|^alpha)_+`.
    HoelderTent { alpha: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BumpFamily {
    pub reference: Reference,
    pub delta: f64,
    pub centers: Vec<Vec<f64>>,
    pub domain: DomainSpec,
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn check_delta(delta: f64) -> Result<(), LabError> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(LabError::BadInput(format!("delta must lie in (0, 1], got {delta}")));
    }
    Ok(())
}

impl BumpFamily {
    /// Greedy `3 delta`-packing of the closed ball of radius 1/2, one bump of radius `delta` per center.
    pub fn smooth_packing(dim: u32, delta: f64) -> Result<Self, LabError> {
        check_delta(delta)?;
        let c = ball_candidates(dim, 0.5, 3.0 * delta)?;
        let idx = greedy_indices(&c);
        let centers = idx.iter().map(|&i| c.point(i)).collect();
        Ok(BumpFamily { reference: Reference::Smooth, delta, centers, domain: DomainSpec::ball(dim) })
    }

    /// Smooth family on user-chosen centers; they must be `3 delta`-separated.
    pub fn smooth_with_centers(dim: u32, delta: f64, centers: Vec<Vec<f64>>) -> Result<Self, LabError> {
        check_delta(delta)?;
        let fam = BumpFamily { reference: Reference::Smooth, delta, centers, domain: DomainSpec::ball(dim) };
        fam.check_separation()?;
        Ok(fam)
    }

    /// The reference bump itself: one center at the origin, `delta = 1`.
    pub fn reference(dim: u32) -> Self {
        BumpFamily { reference: Reference::Smooth, delta: 1.0, centers: vec![vec![0.0; dim as usize]], domain: DomainSpec::ball(dim) }
    }

    /// Greedy `3 delta`-packing of the cube in the metric `|x - y|^alpha`, one tent per center.
    pub fn tent_packing(dim: u32, delta: f64, alpha: f64) -> Result<Self, LabError> {
        check_delta(delta)?;
        let dom = DomainSpec::cube(dim);
        let c = candidate_grid(&dom, 3.0 * delta, alpha)?;
        let idx = greedy_indices(&c);
        let centers = idx.iter().map(|&i| c.point(i)).collect();
        Ok(BumpFamily { reference: Reference::HoelderTent { alpha }, delta, centers, domain: dom })
    }

    pub fn tent_with_centers(dim: u32, delta: f64, alpha: f64, centers: Vec<Vec<f64>>) -> Result<Self, LabError> {
        check_delta(delta)?;
        let fam = BumpFamily {
            reference: Reference::HoelderTent { alpha },
            delta,
            centers,
            domain: DomainSpec::cube(dim),
        };
        fam.check_separation()?;
        Ok(fam)
    }

    fn check_separation(&self) -> Result<(), LabError> {
        for i in 0..self.centers.len() {
            for j in 0..i {
                let d = self.metric(&self.centers[i], &self.centers[j]);
                if d < 3.0 * self.delta * (1.0 - 1e-12) {
                    return Err(LabError::BadInput(format!("centers {j} and {i} are {d} apart, need {}", 3.0 * self.delta)));
                }
            }
        }
        Ok(())
    }

    /// Distance in which the family is separated: Euclidean for smooth bumps, `d^alpha` for tents.
    pub fn metric(&self, a: &[f64], b: &[f64]) -> f64 {
        match self.reference {
            Reference::Smooth => dist(a, b),
            Reference::HoelderTent { alpha } => dist(a, b).powf(alpha),
        }
    }

    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    pub fn dim(&self) -> u32 {
        self.domain.dim.unwrap_or(1)
    }

    pub fn truncate(mut self, n: usize) -> Self {
        self.centers.truncate(n);
        self
    }

    /// Euclidean radius of each member's support.
    pub fn support_radius(&self) -> f64 {
        match self.reference {
            Reference::Smooth => self.delta,
            Reference::HoelderTent { alpha } => self.delta.powf(1.0 / alpha),
        }
    }

    pub fn member(&self, i: usize, x: &[f64]) -> f64 {
        let c = &self.centers[i];
        match self.reference {
            Reference::Smooth => {
                let y: Vec<f64> = x.iter().zip(c).map(|(a, b)| (a - b) / self.delta).collect();
                SmoothBump::new(self.dim()).eval(&y)
            }
            Reference::HoelderTent { alpha } => (self.delta - dist(x, c).powf(alpha)).max(0.0),
        }
    }

    /// `sum_i signs[i] * f_i(x)`.
    pub fn signed_sum(&self, signs: &[f64], x: &[f64]) -> f64 {
        signs.iter().enumerate().map(|(i, s)| s * self.member(i, x)).sum()
    }
}

/// What [`lp_norm`] integrates.
#[derive(Debug, Clone, Copy)]
pub enum LpTarget<'a> {
    /// The unscaled bump on `R^d`.
    Reference { dim: u32 },
    Member { family: &'a BumpFamily, index: usize },
    Sum { family: &'a BumpFamily, signs: &'a [f64] },
}

/// Sampled derivative values of every family member on a tensor Gauss grid.
struct NodeTable {
    weights: Vec<f64>,
    /// Per node, the members that are nonzero there with their values.
    entries: Vec<Vec<(u32, f64)>>,
}

impl NodeTable {
    fn integrate(&self, signs: &[f64], p: f64) -> f64 {
        self.weights
            .par_iter()
            .zip(self.entries.par_iter())
            .map(|(w, e)| {
                let v: f64 = e.iter().map(|&(i, v)| signs[i as usize] * v).sum();
                w * v.abs().powf(p)
            })
            .sum()
    }
}

struct Scaled {
    center: Vec<f64>,
    delta: f64,
    factor: f64,
}

/// Builds the node table over the cube `origin + [0, extent]^d` with `cells` cells per axis and
/// `m` Gauss nodes per cell; cells in which some member changes sign are split further, up to
/// `depth` times.
#[allow(clippy::too_many_arguments)]
fn build_table(
    deriv: &BumpDerivative,
    members: &[Scaled],
    origin: &[f64],
    extent: f64,
    cells: usize,
    m: usize,
    depth: u32,
) -> NodeTable {
    let d = origin.len();
    let gauss = unit_gauss(m);
    let side = extent / cells as f64;
    let total = cells.pow(d as u32);
    let eval_at = |x: &[f64]| -> Vec<(u32, f64)> {
        let mut out = Vec::new();
        for (k, s) in members.iter().enumerate() {
            let mut r2 = 0.0;
            for i in 0..d {
                let y = (x[i] - s.center[i]) / s.delta;
                r2 += y * y;
            }
            if r2 < 1.0 {
                let y: Vec<f64> = (0..d).map(|i| (x[i] - s.center[i]) / s.delta).collect();
                let v = deriv.eval(&y) * s.factor;
                if v != 0.0 {
                    out.push((k as u32, v));
                }
            }
        }
        out
    };
    let parts: Vec<(Vec<f64>, Vec<Vec<(u32, f64)>>)> = (0..total)
        .into_par_iter()
        .map(|flat| {
            let mut lo = vec![0.0; d];
            let mut rest = flat;
            for (i, l) in lo.iter_mut().enumerate() {
                *l = origin[i] + (rest % cells) as f64 * side;
                rest /= cells;
            }
            let mut w_out = Vec::new();
            let mut e_out = Vec::new();
            cell_nodes(&lo, side, &gauss, depth, &eval_at, &mut w_out, &mut e_out);
            (w_out, e_out)
        })
        .collect();
    let mut weights = Vec::new();
    let mut entries = Vec::new();
    for (w, e) in parts {
        weights.extend(w);
        entries.extend(e);
    }
    NodeTable { weights, entries }
}

fn cell_nodes(
    lo: &[f64],
    side: f64,
    gauss: &[(f64, f64)],
    depth: u32,
    eval_at: &dyn Fn(&[f64]) -> Vec<(u32, f64)>,
    w_out: &mut Vec<f64>,
    e_out: &mut Vec<Vec<(u32, f64)>>,
) {
    let d = lo.len();
    let m = gauss.len();
    let count = m.pow(d as u32);
    let mut ws = Vec::with_capacity(count);
    let mut es = Vec::with_capacity(count);
    let mut x = vec![0.0; d];
    for flat in 0..count {
        let mut rest = flat;
        let mut w = 1.0;
        for i in 0..d {
            let (node, wt) = gauss[rest % m];
            x[i] = lo[i] + node * side;
            w *= wt * side;
            rest /= m;
        }
        ws.push(w);
        es.push(eval_at(&x));
    }
    if es.iter().all(|e| e.is_empty()) && depth == 0 {
        return;
    }
    let crosses = depth > 0 && {
        let mut pos = std::collections::HashSet::new();
        let mut neg = std::collections::HashSet::new();
        for e in &es {
            for &(k, v) in e {
                if v > 0.0 {
                    pos.insert(k);
                } else {
                    neg.insert(k);
                }
            }
        }
        pos.intersection(&neg).next().is_some()
    };
    if crosses {
        let half = side / 2.0;
        for child in 0..(1usize << d) {
            let clo: Vec<f64> = (0..d).map(|i| lo[i] + if child >> i & 1 == 1 { half } else { 0.0 }).collect();
            cell_nodes(&clo, half, gauss, depth - 1, eval_at, w_out, e_out);
        }
        return;
    }
    for (w, e) in ws.into_iter().zip(es) {
        if !e.is_empty() {
            w_out.push(w);
            e_out.push(e);
        }
    }
}

fn members_of(family: &BumpFamily, order: u32) -> Vec<Scaled> {
    family
        .centers
        .iter()
        .map(|c| Scaled { center: c.clone(), delta: family.delta, factor: family.delta.powi(-(order as i32)) })
        .collect()
}

/// `||d_alpha h||_{L_p}` for every sign pattern, integrated over a cube covering all supports.
///
/// In adaptive mode the grid is doubled until every pattern changes by less than the
/// relative tolerance; the last two estimates must agree before a value is returned.
pub fn lp_norm_patterns(
    family: &BumpFamily,
    alpha: &[u32],
    p: f64,
    patterns: &[Vec<f64>],
    cfg: &QuadratureConfig,
) -> Result<Vec<f64>, LabError> {
    cfg.validate()?;
    if family.reference != Reference::Smooth {
        return Err(LabError::BadInput("L_p norms are implemented for smooth families".into()));
    }
    if !(p >= 1.0 && p.is_finite()) {
        return Err(LabError::BadInput(format!("p must be finite and >= 1, got {p}")));
    }
    let d = family.dim() as usize;
    if alpha.len() != d {
        return Err(LabError::BadInput("multi-index length must equal the dimension".into()));
    }
    if patterns.iter().any(|s| s.len() != family.len()) {
        return Err(LabError::BadInput("sign pattern length must equal the family size".into()));
    }
    let deriv = SmoothBump::new(d as u32).derivative(alpha);
    let members = members_of(family, deriv.order());
    if family.is_empty() {
        return Ok(vec![0.0; patterns.len()]);
    }
    let mut origin = vec![f64::INFINITY; d];
    let mut extent = 0.0f64;
    for i in 0..d {
        let lo = family.centers.iter().map(|c| c[i]).fold(f64::INFINITY, f64::min) - family.delta;
        let hi = family.centers.iter().map(|c| c[i]).fold(f64::NEG_INFINITY, f64::max) + family.delta;
        origin[i] = lo;
        extent = extent.max(hi - lo);
    }
    let base = cfg.resolution.max((4.0 * extent / family.delta).ceil() as usize);
    let run = |cells: usize, m: usize, depth: u32| -> Vec<f64> {
        let table = build_table(&deriv, &members, &origin, extent, cells, m, depth);
        patterns.iter().map(|s| table.integrate(s, p).powf(1.0 / p)).collect()
    };
    if cfg.scheme == Scheme::MidpointTensor {
        return Ok(run(base, 1, 0));
    }
    let depth = if p == 2.0 { 0 } else { 3 };
    let mut prev = run(base, 6, depth);
    let mut cells = base;
    let mut achieved = f64::INFINITY;
    for _ in 0..cfg.max_refinements {
        cells *= 2;
        let next = run(cells, 6, depth);
        achieved = prev
            .iter()
            .zip(&next)
            .map(|(a, b)| if *b == 0.0 { (a - b).abs() } else { ((a - b) / b).abs() })
            .fold(0.0, f64::max);
        if achieved <= cfg.rel_tol {
            return Ok(next);
        }
        prev = next;
    }
    Err(LabError::Accuracy { achieved, target: cfg.rel_tol })
}

/// `||d_alpha g||_{L_p}` for a single target.
pub fn lp_norm(target: LpTarget<'_>, alpha: &[u32], p: f64, cfg: &QuadratureConfig) -> Result<f64, LabError> {
    match target {
        LpTarget::Reference { dim } => {
            let fam = BumpFamily::reference(dim);
            Ok(lp_norm_patterns(&fam, alpha, p, &[vec![1.0]], cfg)?[0])
        }
        LpTarget::Member { family, index } => {
            if index >= family.len() {
                return Err(LabError::BadInput(format!("member {index} out of range")));
            }
            let fam = BumpFamily { centers: vec![family.centers[index].clone()], ..family.clone() };
            Ok(lp_norm_patterns(&fam, alpha, p, &[vec![1.0]], cfg)?[0])
        }
        LpTarget::Sum { family, signs } => Ok(lp_norm_patterns(family, alpha, p, &[signs.to_vec()], cfg)?[0]),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> QuadratureConfig {
        QuadratureConfig { rel_tol: 1e-7, ..QuadratureConfig::default() }
    }

    #[test]
    fn one_member_at_unit_scale_is_the_reference() {
        let fam = BumpFamily::smooth_with_centers(1, 1.0, vec![vec![0.0]]).unwrap();
        let a = lp_norm(LpTarget::Sum { family: &fam, signs: &[1.0] }, &[0], 2.0, &cfg()).unwrap();
        let b = lp_norm(LpTarget::Reference { dim: 1 }, &[0], 2.0, &cfg()).unwrap();
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn four_quarter_bumps_in_l2() {
        let fam = BumpFamily::smooth_with_centers(1, 0.125, vec![vec![-0.5], vec![-0.125], vec![0.25]]).unwrap();
        let f = lp_norm(LpTarget::Reference { dim: 1 }, &[0], 2.0, &cfg()).unwrap();
        let h = lp_norm(LpTarget::Sum { family: &fam, signs: &[1.0, -1.0, 1.0] }, &[0], 2.0, &cfg()).unwrap();
        let want = 3f64.sqrt() * 0.125f64.sqrt() * f;
        assert!((h - want).abs() < 1e-6 * want, "{h} vs {want}");
    }

    #[test]
    fn scaling_examples_with_quarter_bumps() {
        let centers = (0..4).map(|i| vec![0.75 * i as f64]).collect();
        let fam = BumpFamily::smooth_with_centers(1, 0.25, centers).unwrap();
        let signs = [1.0, 1.0, -1.0, 1.0];
        let f2 = lp_norm(LpTarget::Reference { dim: 1 }, &[0], 2.0, &cfg()).unwrap();
        let h2 = lp_norm(LpTarget::Sum { family: &fam, signs: &signs }, &[0], 2.0, &cfg()).unwrap();
        assert!((h2 - f2).abs() < 1e-6 * f2);
        let g1 = lp_norm(LpTarget::Reference { dim: 1 }, &[1], 1.0, &cfg()).unwrap();
        let h1 = lp_norm(LpTarget::Sum { family: &fam, signs: &signs }, &[1], 1.0, &cfg()).unwrap();
        assert!((h1 - 4.0 * g1).abs() < 1e-6 * h1, "{h1} vs {}", 4.0 * g1);
    }

    #[test]
    fn separation_is_enforced() {
        assert!(BumpFamily::smooth_with_centers(1, 0.25, vec![vec![0.0], vec![0.5]]).is_err());
        assert!(BumpFamily::tent_with_centers(1, 0.1, 0.5, vec![vec![0.1], vec![0.15]]).is_err());
    }

    #[test]
    fn packing_family_is_separated() {
        let fam = BumpFamily::smooth_packing(2, 0.125).unwrap();
        assert!(fam.len() >= 4);
        fam.check_separation().unwrap();
        for c in &fam.centers {
            assert!(dist(c, &[0.0, 0.0]) <= 0.5 + 1e-12);
        }
    }
}
