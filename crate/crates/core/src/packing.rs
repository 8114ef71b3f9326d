//! Greedy and exact packings on grids and finite metric spaces.

use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use thiserror::Error;

use crate::param::{DomainKind, DomainSpec};

/// Grids beyond this many candidates are refused.
pub const MAX_CANDIDATES: usize = 4_000_000;
/// Largest candidate set the exact search accepts.
pub const MAX_EXACT: usize = 24;

const TIE_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PackingError {
    #[error("delta must be positive and finite, got {0}")]
    BadDelta(f64),
    #[error("metric power must lie in (0, 1], got {0}")]
    BadAlpha(f64),
    #[error("domain {0} is unbounded")]
    Unbounded(String),
    #[error("empty candidate set")]
    EmptyCandidates,
    #[error("{0} candidates exceed the grid limit")]
    TooManyCandidates(usize),
    #[error("exact search handles at most {MAX_EXACT} candidates, got {0}")]
    TooLargeForExact(usize),
    #[error("need at least 3 strictly decreasing deltas")]
    BadDeltas,
    #[error("all packing counts are equal; no slope to fit")]
    DegenerateFit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PackingResult {
    pub delta: f64,
    pub alpha: f64,
    pub centers: Vec<Vec<f64>>,
    pub count: usize,
    /// Every candidate lies within `delta` of some center.
    pub maximal: bool,
}

/// A finite candidate set with its own exact separation test.
#[derive(Debug, Clone)]
pub enum Candidates {
    /// Points `k * h` for integer vectors `k`, separated when `|k - l|^2 >= min_sq`.
    Lattice { h: f64, ks: Vec<Vec<i64>>, min_sq: i64 },
    /// Points of a finite metric space, separated when `dist >= radius`.
    Table { table: Vec<Vec<f64>>, radius: f64 },
}

impl Candidates {
    pub fn len(&self) -> usize {
        match self {
            Candidates::Lattice { ks, .. } => ks.len(),
            Candidates::Table { table, .. } => table.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn point(&self, i: usize) -> Vec<f64> {
        match self {
            Candidates::Lattice { h, ks, .. } => ks[i].iter().map(|&k| k as f64 * h).collect(),
            Candidates::Table { .. } => vec![i as f64],
        }
    }

    pub fn points(&self) -> Vec<Vec<f64>> {
        (0..self.len()).map(|i| self.point(i)).collect()
    }

    /// Euclidean (or table) distance between two candidates.
    pub fn dist(&self, i: usize, j: usize) -> f64 {
        match self {
            Candidates::Lattice { h, ks, .. } => (sq_int(&ks[i], &ks[j]) as f64).sqrt() * h,
            Candidates::Table { table, .. } => table[i][j],
        }
    }

    fn separated(&self, i: usize, j: usize) -> bool {
        match self {
            Candidates::Lattice { ks, min_sq, .. } => sq_int(&ks[i], &ks[j]) >= *min_sq,
            Candidates::Table { table, radius } => table[i][j] >= radius * (1.0 - TIE_TOL),
        }
    }
}

fn sq_int(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn check_args(delta: f64, alpha: f64) -> Result<(), PackingError> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(PackingError::BadDelta(delta));
    }
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(PackingError::BadAlpha(alpha));
    }
    Ok(())
}

/// Largest integer `k` with `k * h < limit`, robust to `limit / h` landing on an integer.
fn last_below(limit: f64, h: f64) -> i64 {
    ((limit / h) - TIE_TOL).ceil() as i64 - 1
}

fn lattice_size(d: u32, per_axis: usize) -> Result<usize, PackingError> {
    let total = (per_axis as f64).powi(d as i32);
    if total > MAX_CANDIDATES as f64 {
        return Err(PackingError::TooManyCandidates(total as usize));
    }
    Ok(total as usize)
}

fn product(d: u32, lo: i64, hi: i64, keep: impl Fn(&[i64]) -> bool) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    if hi < lo {
        return out;
    }
    let mut cur = vec![lo; d as usize];
    loop {
        if keep(&cur) {
            out.push(cur.clone());
        }
        let mut axis = d as usize;
        loop {
            if axis == 0 {
                return out;
            }
            axis -= 1;
            if cur[axis] < hi {
                cur[axis] += 1;
                break;
            }
            cur[axis] = lo;
        }
    }
}

/// Grid of spacing `r/4` inside the domain, where `r = delta^(1/alpha)` is the Euclidean radius.
/// Lexicographic order; the cube is open, the ball is the open unit ball.
pub fn candidate_grid(domain: &DomainSpec, delta: f64, alpha: f64) -> Result<Candidates, PackingError> {
    check_args(delta, alpha)?;
    match domain.kind {
        DomainKind::UnitCube | DomainKind::EuclideanBall => {
            let d = domain.dim.unwrap_or(1);
            let r = delta.powf(1.0 / alpha);
            let h = r / 4.0;
            let ks = if domain.kind == DomainKind::UnitCube {
                let k_max = last_below(1.0, h);
                lattice_size(d, k_max.max(0) as usize)?;
                product(d, 1, k_max, |_| true)
            } else {
                let k_max = last_below(1.0, h);
                lattice_size(d, (2 * k_max + 1).max(0) as usize)?;
                let lim = 1.0 / (h * h);
                product(d, -k_max, k_max, |k| (k.iter().map(|v| v * v).sum::<i64>() as f64) < lim * (1.0 - TIE_TOL))
            };
            Ok(Candidates::Lattice { h, ks, min_sq: 16 })
        }
        DomainKind::FiniteMetricSet => {
            let table = domain.metric.clone().ok_or(PackingError::EmptyCandidates)?;
            Ok(Candidates::Table { table, radius: delta.powf(1.0 / alpha) })
        }
        DomainKind::EuclideanSpace | DomainKind::SequenceIndex => Err(PackingError::Unbounded(domain.to_string())),
    }
}

/// Grid candidates in the closed ball of the given radius around the origin, separated at `sep`.
pub fn ball_candidates(d: u32, radius: f64, sep: f64) -> Result<Candidates, PackingError> {
    check_args(sep, 1.0)?;
    let h = sep / 4.0;
    let k_max = (radius / h + TIE_TOL).floor() as i64;
    lattice_size(d, (2 * k_max + 1) as usize)?;
    let lim = (radius / h) * (radius / h);
    let ks = product(d, -k_max, k_max, |k| (k.iter().map(|v| v * v).sum::<i64>() as f64) <= lim * (1.0 + TIE_TOL));
    Ok(Candidates::Lattice { h, ks, min_sq: 16 })
}

/// Greedy insertion in candidate order; returns the chosen indices.
pub fn greedy_indices(c: &Candidates) -> Vec<usize> {
    match c {
        Candidates::Lattice { ks, .. } => {
            // Buckets of side 4 lattice steps; closer pairs sit in neighbouring buckets.
            let d = ks.first().map_or(0, |k| k.len());
            let mut buckets: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
            let mut chosen = Vec::new();
            let offsets = product(d as u32, -1, 1, |_| true);
            for i in 0..ks.len() {
                let key: Vec<i64> = ks[i].iter().map(|v| v.div_euclid(4)).collect();
                let clash = offsets.iter().any(|o| {
                    let nb: Vec<i64> = key.iter().zip(o).map(|(a, b)| a + b).collect();
                    buckets.get(&nb).is_some_and(|v| v.iter().any(|&j| !c.separated(i, j)))
                });
                if !clash {
                    buckets.entry(key).or_default().push(i);
                    chosen.push(i);
                }
            }
            chosen
        }
        Candidates::Table { .. } => {
            let mut chosen: Vec<usize> = Vec::new();
            for i in 0..c.len() {
                if chosen.iter().all(|&j| c.separated(i, j)) {
                    chosen.push(i);
                }
            }
            chosen
        }
    }
}

fn result_from(c: &Candidates, idx: &[usize], delta: f64, alpha: f64, maximal: bool) -> PackingResult {
    PackingResult {
        delta,
        alpha,
        centers: idx.iter().map(|&i| c.point(i)).collect(),
        count: idx.len(),
        maximal,
    }
}

/// Greedy maximal `delta`-packing in the metric `d^alpha`.
pub fn greedy_packing(domain: &DomainSpec, delta: f64, alpha: f64) -> Result<PackingResult, PackingError> {
    let c = candidate_grid(domain, delta, alpha)?;
    if c.is_empty() {
        return Err(PackingError::EmptyCandidates);
    }
    let idx = greedy_indices(&c);
    Ok(result_from(&c, &idx, delta, alpha, true))
}

/// Maximum independent set of the conflict graph by branch and bound over bitmasks.
pub fn max_independent(n: usize, conflict: impl Fn(usize, usize) -> bool) -> Vec<usize> {
    let mut adj = vec![0u32; n];
    for i in 0..n {
        for j in 0..n {
            if i != j && conflict(i, j) {
                adj[i] |= 1 << j;
            }
        }
    }
    fn go(avail: u32, adj: &[u32], cur: u32, best: &mut u32) {
        if avail == 0 {
            if cur.count_ones() > best.count_ones() {
                *best = cur;
            }
            return;
        }
        if cur.count_ones() + avail.count_ones() <= best.count_ones() {
            return;
        }
        let v = avail.trailing_zeros() as usize;
        let bit = 1u32 << v;
        go(avail & !bit & !adj[v], adj, cur | bit, best);
        go(avail & !bit, adj, cur, best);
    }
    let full = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    let mut best = 0u32;
    go(full, &adj, 0, &mut best);
    (0..n).filter(|i| best & (1 << i) != 0).collect()
}

/// Exact packing number of the candidate grid, for at most [`MAX_EXACT`] candidates.
pub fn exact_packing(domain: &DomainSpec, delta: f64, alpha: f64) -> Result<PackingResult, PackingError> {
    let c = candidate_grid(domain, delta, alpha)?;
    if c.is_empty() {
        return Err(PackingError::EmptyCandidates);
    }
    if c.len() > MAX_EXACT {
        return Err(PackingError::TooLargeForExact(c.len()));
    }
    let idx = max_independent(c.len(), |i, j| !c.separated(i, j));
    Ok(result_from(&c, &idx, delta, alpha, true))
}

/// Runs greedy with `d^alpha >= delta` and with `d >= delta^(1/alpha)` on the same candidates
/// and reports whether the two center sets coincide.
pub fn alpha_transform_check(domain: &DomainSpec, delta: f64, alpha: f64) -> Result<bool, PackingError> {
    let c = candidate_grid(domain, delta, alpha)?;
    let plain = greedy_indices(&c);
    let mut powered: Vec<usize> = Vec::new();
    for i in 0..c.len() {
        if powered.iter().all(|&j| c.dist(i, j).powf(alpha) >= delta * (1.0 - TIE_TOL)) {
            powered.push(i);
        }
    }
    Ok(plain == powered)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentFit {
    pub slope: f64,
    pub intercept: f64,
    pub residual: f64,
    pub deltas: Vec<f64>,
    pub counts: Vec<usize>,
}

/// Least-squares slope of `y` against `x`, with intercept and residual norm.
pub fn least_squares(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let res = x
        .iter()
        .zip(y)
        .map(|(a, b)| (b - intercept - slope * a).powi(2))
        .sum::<f64>()
        .sqrt();
    (slope, intercept, res)
}

/// Slope of `log count` against `log(1/delta)`.
pub fn exponent_fit(domain: &DomainSpec, deltas: &[f64], alpha: f64) -> Result<ExponentFit, PackingError> {
    if deltas.len() < 3 || deltas.windows(2).any(|w| w[1] >= w[0]) {
        return Err(PackingError::BadDeltas);
    }
    let counts: Vec<usize> = deltas
        .iter()
        .map(|&dl| greedy_packing(domain, dl, alpha).map(|r| r.count))
        .collect::<Result<_, _>>()?;
    if counts.iter().all(|&c| c == counts[0]) {
        return Err(PackingError::DegenerateFit);
    }
    let x: Vec<f64> = deltas.iter().map(|d| (1.0 / d).ln()).collect();
    let y: Vec<f64> = counts.iter().map(|&c| (c as f64).ln()).collect();
    let (slope, intercept, residual) = least_squares(&x, &y);
    Ok(ExponentFit { slope, intercept, residual, deltas: deltas.to_vec(), counts })
}

/// Packing exponent of a finite metric sample, fitted on dyadic radii between its
/// diameter and twice its smallest distance. `None` when fewer than three radii fit.
pub fn estimate_metric_exponent(domain: &DomainSpec) -> Option<f64> {
    let table = domain.metric.as_ref()?;
    let mut diam = 0.0f64;
    let mut min_pos = f64::INFINITY;
    for (i, row) in table.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            if i != j {
                diam = diam.max(v);
                min_pos = min_pos.min(v);
            }
        }
    }
    let mut deltas = Vec::new();
    let mut dl = diam / 2.0;
    while dl >= 2.0 * min_pos {
        deltas.push(dl);
        dl /= 2.0;
    }
    exponent_fit(domain, &deltas, 1.0).ok().map(|f| f.slope)
}

/// Centers as CSV, one point per row.
pub fn centers_csv(r: &PackingResult) -> String {
    let d = r.centers.first().map_or(0, |c| c.len());
    let mut out = (0..d).map(|i| format!("x{i}")).collect::<Vec<_>>().join(",");
    out.push('\n');
    for c in &r.centers {
        out.push_str(&c.iter().map(|v| format!("{v}")).collect::<Vec<_>>().join(","));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_interval_quarter() {
        let r = greedy_packing(&DomainSpec::cube(1), 0.25, 1.0).unwrap();
        assert_eq!(r.count, 4);
        let e = exact_packing(&DomainSpec::cube(1), 0.25, 1.0).unwrap();
        assert_eq!(e.count, 4);
    }

    #[test]
    fn two_point_space() {
        let dom = DomainSpec::finite_metric(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert_eq!(greedy_packing(&dom, 0.5, 1.0).unwrap().count, 2);
    }

    #[test]
    fn square_eighth_has_64_interior_centers() {
        let r = greedy_packing(&DomainSpec::cube(2), 0.125, 1.0).unwrap();
        assert_eq!(r.count, 64);
    }

    #[test]
    fn centers_are_separated() {
        let r = greedy_packing(&DomainSpec::cube(2), 0.2, 1.0).unwrap();
        for i in 0..r.count {
            for j in 0..i {
                let d: f64 = r.centers[i].iter().zip(&r.centers[j]).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
                assert!(d >= 0.2 - 1e-12);
            }
        }
    }

    #[test]
    fn transform_examples() {
        assert!(alpha_transform_check(&DomainSpec::cube(1), 0.25, 1.0).unwrap());
        assert!(alpha_transform_check(&DomainSpec::cube(1), 0.25, 0.5).unwrap());
        assert!(alpha_transform_check(&DomainSpec::line_metric(5), 1.0, 0.5).unwrap());
        let a = greedy_packing(&DomainSpec::cube(1), 0.25, 0.5).unwrap();
        let b = greedy_packing(&DomainSpec::cube(1), 1.0 / 16.0, 1.0).unwrap();
        assert_eq!(a.count, b.count);
    }

    #[test]
    fn exact_beats_or_ties_greedy_on_small_sets() {
        let dom = DomainSpec::line_metric(7);
        for dl in [1.0, 2.0, 3.0] {
            let g = greedy_packing(&dom, dl, 1.0).unwrap().count;
            let e = exact_packing(&dom, dl, 1.0).unwrap().count;
            assert!(e >= g);
        }
    }

    #[test]
    fn fit_rejects_bad_input() {
        assert_eq!(exponent_fit(&DomainSpec::cube(1), &[0.25, 0.125], 1.0), Err(PackingError::BadDeltas));
        assert!(greedy_packing(&DomainSpec::whole_space(2), 0.25, 1.0).is_err());
    }

    #[test]
    fn csv_has_header_and_rows() {
        let r = greedy_packing(&DomainSpec::cube(2), 0.5, 1.0).unwrap();
        let csv = centers_csv(&r);
        assert_eq!(csv.lines().count(), r.count + 1);
    }
}
