//! Slobodeckij seminorms, Hölder norms on samples, and Rademacher averages.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

use super::bump::richardson_partial;
use super::family::{BumpFamily, Reference};
use super::quad::{unit_gauss, QuadratureConfig, Scheme};
use super::LabError;
use crate::param::{DomainKind, DomainSpec};

/// The cube `lower + [0, side]^d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxRegion {
    pub lower: Vec<f64>,
    pub side: f64,
}

impl BoxRegion {
    pub fn unit(d: u32) -> Self {
        BoxRegion { lower: vec![0.0; d as usize], side: 1.0 }
    }

    pub fn new(lower: Vec<f64>, side: f64) -> Self {
        BoxRegion { lower, side }
    }

    /// Only cubes have a box form.
    pub fn from_domain(domain: &DomainSpec) -> Result<Self, LabError> {
        match (domain.kind, domain.dim) {
            (DomainKind::UnitCube, Some(d)) => Ok(BoxRegion::unit(d)),
            _ => Err(LabError::BadInput(format!("no box form for domain {domain}"))),
        }
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }
}

/// `E|u_1|^p` for `u` uniform on the unit sphere of `R^d`.
fn sphere_moment(d: usize, p: f64) -> f64 {
    let g = libm::tgamma;
    g(d as f64 / 2.0) * g((p + 1.0) / 2.0) / (std::f64::consts::PI.sqrt() * g((d as f64 + p) / 2.0))
}

/// `\int_{[-1,1]^d} prod_k (1 - |tau_k|) |delta + tau|^beta d tau`, the overlap weight of two unit
/// cells whose offset is `delta`.
fn cell_weight(delta: &[i64], beta: f64) -> f64 {
    let d = delta.len();
    if d == 1 {
        let phi = |t: f64| t.abs().powf(beta + 2.0) / ((beta + 1.0) * (beta + 2.0));
        let x = delta[0] as f64;
        return phi(x + 1.0) - 2.0 * phi(x) + phi(x - 1.0);
    }
    let inf_norm = delta.iter().map(|v| v.abs()).max().unwrap_or(0);
    if inf_norm >= 12 {
        // Two-term expansion; the next term is O(|delta|^(beta - 4)).
        let r2: f64 = delta.iter().map(|&v| (v * v) as f64).sum();
        let r = r2.sqrt();
        return r.powf(beta) * (1.0 + beta * (beta + d as f64 - 2.0) / (12.0 * r2));
    }
    let tent = |tau: &[f64]| tau.iter().map(|t| 1.0 - t.abs()).product::<f64>();
    let mut total = 0.0;
    for orth in 0..(1usize << d) {
        // Orthant of tau: [-1, 0] or [0, 1] per axis.
        let lo: Vec<f64> = (0..d).map(|k| if orth >> k & 1 == 1 { 0.0 } else { -1.0 }).collect();
        let sing: Vec<f64> = delta.iter().map(|&v| -(v as f64)).collect();
        let corner = (0..d).all(|k| sing[k] == lo[k] || sing[k] == lo[k] + 1.0);
        if corner {
            // Directions pointing from the singular corner into the orthant.
            let dir: Vec<f64> = (0..d).map(|k| if sing[k] == lo[k] { 1.0 } else { -1.0 }).collect();
            let f = |u: &[f64]| {
                let tau: Vec<f64> = (0..d).map(|k| sing[k] + dir[k] * u[k]).collect();
                let r: f64 = u.iter().map(|v| v * v).sum::<f64>().sqrt();
                tent(&tau) * r.powf(beta)
            };
            total += corner_integral(&f, d, beta);
        } else {
            let f = |tau: &[f64]| {
                let r: f64 = (0..d).map(|k| (tau[k] - sing[k]).powi(2)).sum::<f64>().sqrt();
                tent(tau) * r.powf(beta)
            };
            total += box_gauss(&f, &lo, 1.0, if d <= 2 { 2 } else { 1 }, 16);
        }
    }
    total
}

/// Tensor Gauss rule on `lo + [0, side]^d`, split into `split^d` sub-boxes.
fn box_gauss(f: &dyn Fn(&[f64]) -> f64, lo: &[f64], side: f64, split: usize, m: usize) -> f64 {
    let d = lo.len();
    let g = unit_gauss(m);
    let h = side / split as f64;
    let pts = split * m;
    let mut total = 0.0;
    let mut x = vec![0.0; d];
    for flat in 0..pts.pow(d as u32) {
        let mut rest = flat;
        let mut w = 1.0;
        for k in 0..d {
            let i = rest % pts;
            rest /= pts;
            let (node, wt) = g[i % m];
            x[k] = lo[k] + ((i / m) as f64 + node) * h;
            w *= wt * h;
        }
        total += w * f(&x);
    }
    total
}

/// `\int_{[0,1]^d} f` for an integrand singular like `|u|^beta` at the origin, by dyadic shells
/// plus a geometric tail.
fn corner_integral(f: &dyn Fn(&[f64]) -> f64, d: usize, beta: f64) -> f64 {
    let levels = 30;
    let mut total = 0.0;
    let mut last = 0.0;
    for j in 0..levels {
        let outer = 0.5f64.powi(j);
        let half = outer / 2.0;
        let mut shell = 0.0;
        for sub in 1..(1usize << d) {
            let lo: Vec<f64> = (0..d).map(|k| if sub >> k & 1 == 1 { half } else { 0.0 }).collect();
            shell += box_gauss(f, &lo, half, 1, 10);
        }
        total += shell;
        last = shell;
    }
    let r = 0.5f64.powf(d as f64 + beta);
    total + last * r / (1.0 - r)
}

fn weight_table(n: usize, d: usize, beta: f64) -> Vec<f64> {
    // Indexed by |delta| per axis; the weight is symmetric in signs and permutations.
    let count = n.pow(d as u32);
    let mut cache: HashMap<Vec<i64>, f64> = HashMap::new();
    let keys: Vec<Vec<i64>> = (0..count)
        .map(|flat| {
            let mut rest = flat;
            let mut k: Vec<i64> = (0..d)
                .map(|_| {
                    let v = (rest % n) as i64;
                    rest /= n;
                    v
                })
                .collect();
            k.sort_unstable();
            k
        })
        .collect();
    let mut uniq: Vec<Vec<i64>> = keys.clone();
    uniq.sort();
    uniq.dedup();
    let vals: Vec<f64> = uniq.par_iter().map(|k| cell_weight(k, beta)).collect();
    for (k, v) in uniq.into_iter().zip(vals) {
        cache.insert(k, v);
    }
    keys.iter().map(|k| cache[k]).collect()
}

/// One product-integration pass with `n` cells per axis; returns the double integral.
fn slobodeckij_pass(
    g: &(dyn Fn(&[f64]) -> f64 + Sync),
    theta: f64,
    p: f64,
    region: &BoxRegion,
    n: usize,
) -> f64 {
    let d = region.dim();
    let h = region.side / n as f64;
    let beta = (1.0 - theta) * p - d as f64;
    let weights = weight_table(n, d, beta);
    let cells = n.pow(d as u32);
    let mids: Vec<Vec<f64>> = (0..cells)
        .map(|flat| {
            let mut rest = flat;
            (0..d)
                .map(|k| {
                    let i = rest % n;
                    rest /= n;
                    region.lower[k] + (i as f64 + 0.5) * h
                })
                .collect()
        })
        .collect();
    let idx: Vec<Vec<i64>> = (0..cells)
        .map(|flat| {
            let mut rest = flat;
            (0..d)
                .map(|_| {
                    let i = (rest % n) as i64;
                    rest /= n;
                    i
                })
                .collect()
        })
        .collect();
    let vals: Vec<f64> = mids.iter().map(|m| g(m)).collect();
    let c = sphere_moment(d, p);
    let diag: Vec<f64> = mids
        .par_iter()
        .map(|m| {
            let grad2: f64 = (0..d).map(|k| richardson_partial(&|x| g(x), m, k, h / 4.0).powi(2)).sum();
            c * grad2.sqrt().powf(p)
        })
        .collect();
    let scale = h.powf(2.0 * d as f64 + beta);
    let sum: f64 = (0..cells)
        .into_par_iter()
        .map(|i| {
            let mut acc = weights[0] * diag[i];
            for j in 0..cells {
                if j == i {
                    continue;
                }
                let mut flat = 0usize;
                let mut stride = 1usize;
                let mut r2 = 0.0;
                for k in 0..d {
                    let dk = (idx[i][k] - idx[j][k]).unsigned_abs() as usize;
                    flat += dk * stride;
                    stride *= n;
                    r2 += (mids[i][k] - mids[j][k]).powi(2);
                }
                let q = (vals[i] - vals[j]).abs().powf(p) / r2.sqrt().powf(p);
                acc += weights[flat] * q;
            }
            acc
        })
        .sum();
    sum * scale
}

/// Slobodeckij seminorm `(\int\int |g(x) - g(y)|^p / |x - y|^{theta p + d})^{1/p}` over a cube.
///
/// The difference quotient is frozen at cell midpoints and integrated against exact cell-pair
/// weights of `|x - y|^{(1 - theta) p - d}`; diagonal cells use the directional average of the
/// gradient. Refinement continues until the Richardson error estimate is below
/// `max(rel_tol, 1e-5)`. Sustained growth under refinement is reported as divergence.
pub fn slobodeckij_seminorm(
    g: &(dyn Fn(&[f64]) -> f64 + Sync),
    theta: f64,
    p: f64,
    region: &BoxRegion,
    cfg: &QuadratureConfig,
) -> Result<f64, LabError> {
    cfg.validate()?;
    if !(theta > 0.0 && theta < 1.0) || !(p >= 1.0 && p.is_finite()) {
        return Err(LabError::BadInput(format!("need 0 < theta < 1 and 1 <= p < inf, got {theta}, {p}")));
    }
    if region.dim() == 0 || !(region.side > 0.0) {
        return Err(LabError::BadInput("empty region".into()));
    }
    let d = region.dim();
    let mut n = match d {
        1 => cfg.resolution.max(64),
        _ => cfg.resolution,
    };
    if cfg.scheme == Scheme::MidpointTensor {
        return Ok(slobodeckij_pass(g, theta, p, region, n).max(0.0).powf(1.0 / p));
    }
    let tol = cfg.rel_tol.max(1e-5);
    // Work grows like cells^2; cap the total cell count.
    let max_total: usize = 1 << 14;
    let mut history = vec![slobodeckij_pass(g, theta, p, region, n)];
    let mut achieved = f64::INFINITY;
    while (n * 2).pow(d as u32) <= max_total {
        n *= 2;
        let v = slobodeckij_pass(g, theta, p, region, n);
        history.push(v);
        let k = history.len();
        let (a, b) = (history[k - 2], history[k - 1]);
        if k >= 3 {
            let d1 = history[k - 2] - history[k - 3];
            let d2 = b - a;
            if d1 > 0.0 && d2 > 0.0 && d2 >= 0.7 * d1 && d2 > tol * b.abs() {
                return Err(LabError::Divergence { last: b.max(0.0).powf(1.0 / p) });
            }
        }
        let extrap = (4.0 * b - a) / 3.0;
        if extrap.abs() < 1e-300 && b.abs() < 1e-300 {
            return Ok(0.0);
        }
        achieved = ((extrap - b) / extrap).abs();
        if achieved <= tol {
            return Ok(extrap.max(0.0).powf(1.0 / p));
        }
    }
    Err(LabError::Accuracy { achieved, target: tol })
}

/// Hölder norm on a finite sample: `max(sup |g|, sup_{i != j} |g_i - g_j| / dist(i, j)^alpha)`.
pub fn hoelder_norm(values: &[f64], dist: &(dyn Fn(usize, usize) -> f64 + Sync), alpha: f64) -> f64 {
    let sup = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let semi = (0..values.len())
        .into_par_iter()
        .map(|i| {
            let mut m = 0.0f64;
            for j in 0..i {
                let dd = dist(i, j);
                if dd > 0.0 {
                    m = m.max((values[i] - values[j]).abs() / dd.powf(alpha));
                }
            }
            m
        })
        .reduce(|| 0.0, f64::max);
    sup.max(semi)
}

/// Sign-independent pieces of the Hölder norm of `sum eps_i f_i` over a disjoint tent family,
/// evaluated on a Euclidean sample with quotient exponent `gamma`.
#[derive(Debug, Clone)]
pub struct TentTable {
    pub sup: f64,
    /// Largest quotient with both points in one support or one point outside all supports.
    pub single: f64,
    /// `(i, j, max (f_i + f_j)/d^gamma, max |f_i - f_j|/d^gamma)` for pairs that can matter.
    pub pairs: Vec<(usize, usize, f64, f64)>,
}

fn edist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

impl TentTable {
    /// With `gamma = 0` only the sup norm is recorded.
    pub fn build(family: &BumpFamily, sample: &[Vec<f64>], gamma: f64) -> Result<Self, LabError> {
        if !matches!(family.reference, Reference::HoelderTent { .. }) {
            return Err(LabError::BadInput("tent table needs a tent family".into()));
        }
        let n = family.len();
        let mut members: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        let mut outside: Vec<usize> = Vec::new();
        for (k, x) in sample.iter().enumerate() {
            let mut hit = false;
            for i in 0..n {
                let v = family.member(i, x);
                if v > 0.0 {
                    members[i].push((k, v));
                    hit = true;
                }
            }
            if !hit {
                outside.push(k);
            }
        }
        let sup = members.iter().flatten().fold(0.0f64, |m, &(_, v)| m.max(v));
        if gamma == 0.0 {
            return Ok(TentTable { sup, single: 0.0, pairs: Vec::new() });
        }
        let q = |a: f64, b: f64, x: &[f64], y: &[f64]| (a - b).abs() / edist(x, y).powf(gamma);
        let index = NearestIndex::new(sample, &outside, family.support_radius() / 2.0);
        let single = (0..n)
            .into_par_iter()
            .map(|i| {
                let s = &members[i];
                let mut m = 0.0f64;
                for (a, &(k, v)) in s.iter().enumerate() {
                    for &(l, w) in &s[..a] {
                        m = m.max(q(v, w, &sample[k], &sample[l]));
                    }
                    if let Some(dn) = index.nearest(&sample[k]) {
                        m = m.max(v / dn.powf(gamma));
                    }
                }
                m
            })
            .reduce(|| 0.0, f64::max);
        let floor = sup.max(single);
        let r = family.support_radius();
        let peak = family.delta;
        let cand: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..i).map(move |j| (j, i))).collect();
        let pairs = cand
            .into_par_iter()
            .filter_map(|(i, j)| {
                let gap = edist(&family.centers[i], &family.centers[j]) - 2.0 * r;
                if gap > 0.0 && 2.0 * peak / gap.powf(gamma) <= floor {
                    return None;
                }
                let mut plus = 0.0f64;
                let mut minus = 0.0f64;
                for &(k, v) in &members[i] {
                    for &(l, w) in &members[j] {
                        let dd = edist(&sample[k], &sample[l]).powf(gamma);
                        plus = plus.max((v + w) / dd);
                        minus = minus.max((v - w).abs() / dd);
                    }
                }
                Some((i, j, plus, minus))
            })
            .collect();
        Ok(TentTable { sup, single, pairs })
    }

    /// Norm of `sum signs[i] f_i` on the sample.
    pub fn norm(&self, signs: &[f64]) -> f64 {
        let mut m = self.sup.max(self.single);
        for &(i, j, plus, minus) in &self.pairs {
            m = m.max(if signs[i] != signs[j] { plus } else { minus });
        }
        m
    }
}

/// Bucketed point set answering nearest-distance queries.
struct NearestIndex<'a> {
    sample: &'a [Vec<f64>],
    cell: f64,
    buckets: HashMap<Vec<i64>, Vec<usize>>,
    extent: i64,
}

impl<'a> NearestIndex<'a> {
    fn new(sample: &'a [Vec<f64>], ids: &[usize], cell: f64) -> Self {
        let mut buckets: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
        let mut extent = 0i64;
        for &k in ids {
            let key: Vec<i64> = sample[k].iter().map(|v| (v / cell).floor() as i64).collect();
            extent = extent.max(key.iter().map(|v| v.abs()).max().unwrap_or(0));
            buckets.entry(key).or_default().push(k);
        }
        NearestIndex { sample, cell, buckets, extent }
    }

    fn nearest(&self, x: &[f64]) -> Option<f64> {
        if self.buckets.is_empty() {
            return None;
        }
        let d = x.len();
        let home: Vec<i64> = x.iter().map(|v| (v / self.cell).floor() as i64).collect();
        let mut best = f64::INFINITY;
        let reach = 2 * self.extent + home.iter().map(|v| v.abs()).max().unwrap_or(0) + 2;
        for ring in 0..=reach {
            // Everything in rings beyond `ring` is at least (ring - 1) * cell away.
            if (ring - 1) as f64 * self.cell > best {
                break;
            }
            let side = 2 * ring + 1;
            for flat in 0..(side as usize).pow(d as u32) {
                let mut rest = flat;
                let off: Vec<i64> = (0..d)
                    .map(|_| {
                        let v = (rest % side as usize) as i64 - ring;
                        rest /= side as usize;
                        v
                    })
                    .collect();
                if off.iter().map(|v| v.abs()).max().unwrap_or(0) != ring {
                    continue;
                }
                let key: Vec<i64> = home.iter().zip(&off).map(|(a, b)| a + b).collect();
                if let Some(v) = self.buckets.get(&key) {
                    for &k in v {
                        best = best.min(edist(x, &self.sample[k]));
                    }
                }
            }
        }
        best.is_finite().then_some(best)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RadMode {
    Exhaustive,
    MonteCarlo,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadEstimate {
    pub mean: f64,
    /// Zero in exhaustive mode.
    pub std_err: f64,
    pub samples: usize,
}

/// All `2^n` patterns in `{-1, +1}^n`, the all-plus pattern first.
pub fn sign_patterns(n: usize) -> Result<Vec<Vec<f64>>, LabError> {
    if n > 20 {
        return Err(LabError::Mode(n));
    }
    Ok((0..(1usize << n))
        .map(|b| (0..n).map(|i| if b >> i & 1 == 1 { -1.0 } else { 1.0 }).collect())
        .collect())
}

/// `E || sum eps_i x_i ||`, given the norm of each signed combination.
pub fn rademacher_norm(
    n: usize,
    norm: &(dyn Fn(&[f64]) -> f64 + Sync),
    mode: RadMode,
    cfg: &QuadratureConfig,
) -> Result<RadEstimate, LabError> {
    match mode {
        RadMode::Exhaustive => {
            let pats = sign_patterns(n)?;
            let total: f64 = pats.par_iter().map(|s| norm(s)).sum();
            Ok(RadEstimate { mean: total / pats.len() as f64, std_err: 0.0, samples: pats.len() })
        }
        RadMode::MonteCarlo => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            let pats: Vec<Vec<f64>> = (0..cfg.mc_samples)
                .map(|_| (0..n).map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 }).collect())
                .collect();
            let vals: Vec<f64> = pats.par_iter().map(|s| norm(s)).collect();
            let m = vals.len() as f64;
            let mean = vals.iter().sum::<f64>() / m;
            let var = if vals.len() > 1 { vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (m - 1.0) } else { 0.0 };
            Ok(RadEstimate { mean, std_err: (var / m).sqrt(), samples: vals.len() })
        }
    }
}

/// `(sum ||x_i||^2)^{1/2}`.
pub fn seq_l2_norm(norms: &[f64]) -> f64 {
    norms.iter().map(|v| v * v).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    #[test]
    fn constant_has_zero_seminorm() {
        let v = slobodeckij_seminorm(&|_| 3.0, 0.5, 2.0, &BoxRegion::unit(1), &cfg()).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn identity_on_unit_interval() {
        let v = slobodeckij_seminorm(&|x| x[0], 0.5, 2.0, &BoxRegion::unit(1), &cfg()).unwrap();
        assert!((v - 1.0).abs() < 1e-9, "{v}");
    }

    #[test]
    fn one_dimensional_weights_sum_to_the_full_integral() {
        // sum over all cell pairs of |x - y|^beta on [0,1]^2 equals 2/((beta+1)(beta+2)).
        let beta = -0.4;
        let n = 50usize;
        let h = 1.0 / n as f64;
        let mut s = 0.0;
        for i in 0..n as i64 {
            for j in 0..n as i64 {
                s += cell_weight(&[i - j], beta);
            }
        }
        s *= h.powf(2.0 + beta);
        let want = 2.0 / ((beta + 1.0) * (beta + 2.0));
        assert!((s - want).abs() < 1e-10 * want);
    }

    #[test]
    fn square_weights_match_direct_gauss() {
        // Far weight against the expansion, near weight against a fine direct rule.
        let beta = -1.0;
        let w = cell_weight(&[2, 1], beta);
        let f = |t: &[f64]| {
            (1.0 - t[0].abs()) * (1.0 - t[1].abs()) * ((2.0 + t[0]).powi(2) + (1.0 + t[1]).powi(2)).sqrt().powf(beta)
        };
        let direct = box_gauss(&f, &[-1.0, -1.0], 2.0, 8, 12);
        assert!((w - direct).abs() < 1e-10, "{w} vs {direct}");
        let far = cell_weight(&[13, 0], beta);
        let direct_far = box_gauss(
            &|t: &[f64]| (1.0 - t[0].abs()) * (1.0 - t[1].abs()) * ((13.0 + t[0]).powi(2) + t[1].powi(2)).sqrt().powf(beta),
            &[-1.0, -1.0],
            2.0,
            2,
            12,
        );
        assert!((far - direct_far).abs() < 1e-6 * direct_far, "{far} vs {direct_far}");
    }

    #[test]
    fn singular_weight_matches_radial_closed_form() {
        // beta = 0 makes the weight the tent mass, which is 1.
        let w = cell_weight(&[0, 0], 0.0);
        assert!((w - 1.0).abs() < 1e-9, "{w}");
    }

    #[test]
    fn holder_of_constant_is_its_sup() {
        let pts: Vec<f64> = (0..10).map(|i| i as f64 / 10.0).collect();
        let v = hoelder_norm(&[1.0; 10], &|i, j| (pts[i] - pts[j]).abs(), 0.5);
        assert_eq!(v, 1.0);
    }

    #[test]
    fn tent_table_matches_generic_evaluator() {
        let alpha = 0.5;
        let fam = BumpFamily::tent_with_centers(2, 0.1, alpha, vec![vec![0.25, 0.25], vec![0.75, 0.3], vec![0.4, 0.8]]).unwrap();
        let m = 30;
        let sample: Vec<Vec<f64>> =
            (0..m * m).map(|k| vec![((k % m) as f64 + 0.5) / m as f64, ((k / m) as f64 + 0.5) / m as f64]).collect();
        let table = TentTable::build(&fam, &sample, alpha).unwrap();
        for s in sign_patterns(3).unwrap() {
            let vals: Vec<f64> = sample.iter().map(|x| fam.signed_sum(&s, x)).collect();
            let g = hoelder_norm(&vals, &|i, j| edist(&sample[i], &sample[j]), alpha);
            assert!((g - table.norm(&s)).abs() < 1e-12, "{g} vs {}", table.norm(&s));
        }
    }

    #[test]
    fn exhaustive_rademacher_of_unit_vectors() {
        let n = 5;
        let est = rademacher_norm(n, &|s: &[f64]| s.iter().map(|v| v.abs().powi(3)).sum::<f64>().cbrt(), RadMode::Exhaustive, &cfg()).unwrap();
        assert!((est.mean - 5f64.cbrt()).abs() < 1e-12);
        assert!(sign_patterns(21).is_err());
    }

    #[test]
    fn monte_carlo_is_seeded() {
        let f = |s: &[f64]| s.iter().sum::<f64>().abs();
        let a = rademacher_norm(30, &f, RadMode::MonteCarlo, &cfg()).unwrap();
        let b = rademacher_norm(30, &f, RadMode::MonteCarlo, &cfg()).unwrap();
        assert_eq!(a, b);
        assert!(a.std_err > 0.0);
    }
}
