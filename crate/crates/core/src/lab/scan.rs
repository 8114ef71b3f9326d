//! Ratio scans along obstruction families.
//!
//! For each scale the family is built, the type or cotype quotient is evaluated and
//! `log(ratio)` is regressed on `log n` or `log(1/delta)`.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::bump::{multi_indices, SmoothBump};
use super::family::{lp_norm_patterns, BumpFamily};
use super::norms::{rademacher_norm, seq_l2_norm, sign_patterns, RadMode, TentTable};
use super::quad::QuadratureConfig;
use super::LabError;
use crate::decide::{Construction, ObstructionRecipe, RatioMode, ScanVariable};
use crate::packing::{candidate_grid, least_squares, Candidates};
use crate::param::{q_to_f64, DomainKind, DomainSpec, ExtRational};

/// Exhaustive sign enumeration is used up to this family size.
const EXHAUSTIVE_LIMIT: usize = 10;

/// Scales to scan. For `log n` constructions `n = round(1/delta)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanSpec {
    pub deltas: Vec<f64>,
}

impl ScanSpec {
    pub fn deltas(deltas: Vec<f64>) -> Self {
        ScanSpec { deltas }
    }

    pub fn ns(ns: &[usize]) -> Self {
        ScanSpec { deltas: ns.iter().map(|&n| 1.0 / n as f64).collect() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    pub delta: f64,
    pub n: usize,
    pub ratio: f64,
    /// Standard error of the Rademacher side; zero when enumerated exhaustively.
    pub std_err: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanSeries {
    pub construction: Construction,
    pub mode: RatioMode,
    pub variable: ScanVariable,
    pub points: Vec<ScanPoint>,
    pub slope: f64,
    pub intercept: f64,
    pub residual: f64,
    pub predicted_exponent: f64,
}

impl ScanSeries {
    pub fn to_csv(&self) -> String {
        let mode = match self.mode {
            RatioMode::Type2 => "type2",
            RatioMode::Cotype2 => "cotype2",
        };
        let mut out = String::from("delta,n,ratio,std_err,mode\n");
        for p in &self.points {
            out.push_str(&format!("{},{},{},{},{}\n", p.delta, p.n, p.ratio, p.std_err, mode));
        }
        out
    }
}

fn ext(x: &ExtRational) -> f64 {
    x.to_f64()
}

fn lr_norm(v: &[f64], r: f64, cell: f64) -> f64 {
    if r.is_infinite() {
        v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
    } else {
        (v.iter().map(|x| x.abs().powf(r)).sum::<f64>() * cell).powf(1.0 / r)
    }
}

fn rad_mode(n: usize) -> RadMode {
    if n <= EXHAUSTIVE_LIMIT {
        RadMode::Exhaustive
    } else {
        RadMode::MonteCarlo
    }
}

fn patterns(n: usize, cfg: &QuadratureConfig) -> Result<Vec<Vec<f64>>, LabError> {
    if n <= EXHAUSTIVE_LIMIT {
        return sign_patterns(n);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    Ok((0..cfg.mc_samples)
        .map(|_| (0..n).map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 }).collect())
        .collect())
}

fn mean_se(vals: &[f64]) -> (f64, f64) {
    let m = vals.len() as f64;
    let mean = vals.iter().sum::<f64>() / m;
    if vals.len() < 2 {
        return (mean, 0.0);
    }
    let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (m - 1.0);
    (mean, (var / m).sqrt())
}

/// Runs the recipe's construction at each scale and fits the growth exponent.
pub fn scan(recipe: &ObstructionRecipe, spec: &ScanSpec, cfg: &QuadratureConfig) -> Result<ScanSeries, LabError> {
    cfg.validate()?;
    let predicted = ext(&recipe.predicted_exponent);
    if !(predicted > 0.0) {
        return Err(LabError::Precondition("predicted exponent is not positive; nothing diverges".into()));
    }
    let ds = &spec.deltas;
    if ds.len() < 2 || ds.iter().any(|d| !(*d > 0.0 && *d <= 0.5)) || ds.windows(2).any(|w| w[1] >= w[0]) {
        return Err(LabError::BadInput("deltas must be strictly decreasing in (0, 1/2], at least two".into()));
    }
    let mut points = Vec::new();
    for &delta in ds {
        let pt = match recipe.construction {
            Construction::LpUnitVectors => unit_vectors(recipe, delta, cfg)?,
            Construction::LpIndicatorPartition => indicators(recipe, delta, cfg)?,
            Construction::HoelderTentBumps => tents(recipe, delta, cfg)?,
            Construction::SmoothScaledBumps => smooth_bumps(recipe, delta, cfg)?,
            Construction::SmoothTranslates => translates(recipe, delta, cfg)?,
        };
        points.push(pt);
    }
    let x: Vec<f64> = points
        .iter()
        .map(|p| match recipe.variable {
            ScanVariable::LogN => (p.n as f64).ln(),
            ScanVariable::LogInvDelta => (1.0 / p.delta).ln(),
        })
        .collect();
    let y: Vec<f64> = points.iter().map(|p| p.ratio.ln()).collect();
    let (slope, intercept, residual) = least_squares(&x, &y);
    Ok(ScanSeries {
        construction: recipe.construction,
        mode: recipe.mode,
        variable: recipe.variable,
        points,
        slope,
        intercept,
        residual,
        predicted_exponent: predicted,
    })
}

fn unit_vectors(recipe: &ObstructionRecipe, delta: f64, cfg: &QuadratureConfig) -> Result<ScanPoint, LabError> {
    let n = (1.0 / delta).round() as usize;
    let (p, q) = (ext(&recipe.params.p1), ext(&recipe.params.p2));
    // Every unit vector has norm 1 in every l_r.
    let seq = seq_l2_norm(&vec![1.0; n]);
    let r = match recipe.mode {
        RatioMode::Type2 => q,
        RatioMode::Cotype2 => p,
    };
    let rad = rademacher_norm(n, &|s: &[f64]| lr_norm(s, r, 1.0), rad_mode(n), cfg)?;
    let ratio = match recipe.mode {
        RatioMode::Type2 => rad.mean / seq,
        RatioMode::Cotype2 => seq / rad.mean,
    };
    Ok(ScanPoint { delta, n, ratio, std_err: rad.std_err })
}

fn indicators(recipe: &ObstructionRecipe, delta: f64, cfg: &QuadratureConfig) -> Result<ScanPoint, LabError> {
    let d = recipe.params.dim.max(1);
    let m = (1.0 / delta).round() as usize;
    let n = m.pow(d);
    let cell = (1.0 / m as f64).powi(d as i32);
    let (p, q) = (ext(&recipe.params.p1), ext(&recipe.params.p2));
    let member = |r: f64| if r.is_infinite() { 1.0 } else { cell.powf(1.0 / r) };
    let (seq_r, rad_r) = match recipe.mode {
        RatioMode::Type2 => (p, q),
        RatioMode::Cotype2 => (q, p),
    };
    let seq = seq_l2_norm(&vec![member(seq_r); n]);
    let rad = rademacher_norm(n, &|s: &[f64]| lr_norm(s, rad_r, cell), rad_mode(n), cfg)?;
    let ratio = match recipe.mode {
        RatioMode::Type2 => rad.mean / seq,
        RatioMode::Cotype2 => seq / rad.mean,
    };
    Ok(ScanPoint { delta: 1.0 / m as f64, n, ratio, std_err: rad.std_err })
}

fn tents(recipe: &ObstructionRecipe, delta: f64, cfg: &QuadratureConfig) -> Result<ScanPoint, LabError> {
    if recipe.source.domain.kind != DomainKind::UnitCube && recipe.source.domain.kind != DomainKind::EuclideanBall {
        return Err(LabError::Precondition("tent scans run on Euclidean cubes".into()));
    }
    if recipe.mode != RatioMode::Cotype2 {
        return Err(LabError::Precondition("tent families witness cotype blow-up".into()));
    }
    let k = recipe.params.dim;
    let alpha = q_to_f64(&recipe.params.s);
    let beta = q_to_f64(&recipe.params.t);
    let fam = BumpFamily::tent_packing(k, delta, alpha)?;
    let n = fam.len();
    if n < 2 {
        return Err(LabError::DomainTooSmall(n));
    }
    // Sample on the packing grid, so every center has grid points at distance delta^(1/alpha).
    let sample = match candidate_grid(&DomainSpec::cube(k), delta, alpha)? {
        c @ Candidates::Lattice { .. } => c.points(),
        Candidates::Table { .. } => unreachable!("cube grids are lattices"),
    };
    let e_table = TentTable::build(&fam, &sample, alpha)?;
    let f_norm = if beta == 0.0 {
        fam.delta
    } else {
        let one = fam.clone().truncate(1);
        TentTable::build(&one, &sample, beta)?.norm(&[1.0])
    };
    let seq = seq_l2_norm(&vec![f_norm; n]);
    let rad = rademacher_norm(n, &|s: &[f64]| e_table.norm(s), rad_mode(n), cfg)?;
    Ok(ScanPoint { delta, n, ratio: seq / rad.mean, std_err: rad.std_err })
}

/// Sup of `|d_alpha f|` for the reference bump, sampled along a fine grid of the unit ball.
fn reference_sup(d: u32, alpha: &[u32]) -> f64 {
    let der = SmoothBump::new(d).derivative(alpha);
    let m: usize = match d {
        1 => 20_001,
        2 => 401,
        3 => 61,
        _ => 21,
    };
    let mut best = 0.0f64;
    let mut x = vec![0.0; d as usize];
    for flat in 0..m.pow(d) {
        let mut rest = flat;
        for v in x.iter_mut() {
            *v = -1.0 + 2.0 * (rest % m) as f64 / (m - 1) as f64;
            rest /= m;
        }
        best = best.max(der.eval(&x).abs());
    }
    best
}

/// Norm proxy of smoothness `sigma` and integrability `p` for every pattern.
///
/// Integer `sigma = k`: the largest `||d_alpha h||_p` over `|alpha| = k`. Fractional
/// `sigma = k + theta`: the interpolation `N_k^(1 - theta) N_(k+1)^theta`, which scales
/// in `n` and `delta` exactly like the Slobodeckij seminorm of a disjoint family.
fn norm_proxy(fam: &BumpFamily, sigma: f64, p: f64, pats: &[Vec<f64>], cfg: &QuadratureConfig) -> Result<Vec<f64>, LabError> {
    let d = fam.dim();
    let k = sigma.floor() as u32;
    let theta = sigma - k as f64;
    let top = |order: u32| -> Result<Vec<f64>, LabError> {
        let alphas: Vec<Vec<u32>> =
            multi_indices(d, order).into_iter().filter(|a| a.iter().sum::<u32>() == order).collect();
        let mut best = vec![0.0f64; pats.len()];
        for a in alphas {
            let vals = if p.is_infinite() {
                // Disjoint supports: the sup of the sum is the sup of one member.
                vec![reference_sup(d, &a) * fam.delta.powi(-(order as i32)); pats.len()]
            } else {
                lp_norm_patterns(fam, &a, p, pats, cfg)?
            };
            for (b, v) in best.iter_mut().zip(vals) {
                *b = b.max(v);
            }
        }
        Ok(best)
    };
    let lo = top(k)?;
    if theta == 0.0 {
        return Ok(lo);
    }
    let hi = top(k + 1)?;
    Ok(lo.iter().zip(hi).map(|(a, b)| a.powf(1.0 - theta) * b.powf(theta)).collect())
}

fn smooth_bumps(recipe: &ObstructionRecipe, delta: f64, cfg: &QuadratureConfig) -> Result<ScanPoint, LabError> {
    let pr = &recipe.params;
    let d = pr.dim.max(1);
    let fam = BumpFamily::smooth_packing(d, delta)?;
    let n = fam.len();
    if n < 2 {
        return Err(LabError::DomainTooSmall(n));
    }
    let (s, t) = (q_to_f64(&pr.s), q_to_f64(&pr.t));
    let (p1, p2) = (ext(&pr.p1), ext(&pr.p2));
    let pats = patterns(n, cfg)?;
    let one = fam.clone().truncate(1);
    // Members are translates of each other, so one member gives every sequence entry.
    let (rad_sigma, rad_p, seq_sigma, seq_p) = match recipe.mode {
        RatioMode::Type2 => (t, p2, s, p1),
        RatioMode::Cotype2 => (s, p1, t, p2),
    };
    let rad_vals = norm_proxy(&fam, rad_sigma, rad_p, &pats, cfg)?;
    let member = norm_proxy(&one, seq_sigma, seq_p, &[vec![1.0]], cfg)?[0];
    let seq = seq_l2_norm(&vec![member; n]);
    let (rad, se) = mean_se(&rad_vals);
    let se = if n <= EXHAUSTIVE_LIMIT { 0.0 } else { se };
    let ratio = match recipe.mode {
        RatioMode::Type2 => rad / seq,
        RatioMode::Cotype2 => seq / rad,
    };
    Ok(ScanPoint { delta, n, ratio, std_err: se })
}

fn translates(recipe: &ObstructionRecipe, delta: f64, cfg: &QuadratureConfig) -> Result<ScanPoint, LabError> {
    let n = (1.0 / delta).round() as usize;
    let d = recipe.params.dim.max(1);
    let f = SmoothBump::new(d);
    let mut e1 = vec![0u32; d as usize];
    e1[0] = 1;
    let df = f.derivative(&e1);
    // Unit bumps centred at 3i on the first axis; sample that axis finely.
    let step = 1e-3;
    let line: Vec<f64> = (0..=((3 * n) as f64 / step) as usize).map(|i| -1.0 + i as f64 * step).collect();
    let at = |x: f64, i: usize| {
        let mut y = vec![0.0; d as usize];
        y[0] = x - 3.0 * i as f64;
        y
    };
    // Sup of one bump and of its first derivative, which the sum attains on disjoint supports.
    let c1 = |s: &[f64]| {
        let mut m = 0.0f64;
        for &x in &line {
            let i = ((x + 1.5) / 3.0).floor().max(0.0) as usize;
            if i >= n {
                continue;
            }
            let y = at(x, i);
            m = m.max((s[i] * f.eval(&y)).abs()).max((s[i] * df.eval(&y)).abs());
        }
        m
    };
    let rad = rademacher_norm(n, &c1, rad_mode(n), cfg)?;
    let seq = seq_l2_norm(&vec![1.0; n]);
    Ok(ScanPoint { delta: 1.0 / n as f64, n, ratio: seq / rad.mean, std_err: rad.std_err })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decide::decide;
    use crate::param::{Family, SpaceSpec};

    fn lp(p: &str) -> SpaceSpec {
        SpaceSpec::new(Family::SequenceLp { p: p.parse().unwrap() }, DomainSpec::sequence())
    }

    #[test]
    fn l3_to_l4_slope() {
        let v = decide(&lp("3"), &lp("4")).unwrap();
        let r = v.obstruction.unwrap();
        let s = scan(&r, &ScanSpec::ns(&[4, 16, 64]), &QuadratureConfig::default()).unwrap();
        assert!((s.slope - 1.0 / 6.0).abs() < 0.05, "{}", s.slope);
    }

    #[test]
    fn l1_to_l3_2_is_type_blowup() {
        let v = decide(&lp("1"), &lp("3/2")).unwrap();
        let r = v.obstruction.unwrap();
        assert_eq!(r.mode, RatioMode::Type2);
        let s = scan(&r, &ScanSpec::ns(&[4, 8, 16]), &QuadratureConfig::default()).unwrap();
        assert!((s.slope - (2.0 / 3.0 - 0.5)).abs() < 0.05, "{}", s.slope);
    }

    #[test]
    fn csv_has_one_row_per_point() {
        let v = decide(&lp("3"), &lp("4")).unwrap();
        let s = scan(&v.obstruction.unwrap(), &ScanSpec::ns(&[4, 8]), &QuadratureConfig::default()).unwrap();
        assert_eq!(s.to_csv().lines().count(), 3);
    }

    #[test]
    fn bad_scales_are_rejected() {
        let v = decide(&lp("3"), &lp("4")).unwrap();
        let r = v.obstruction.unwrap();
        assert!(scan(&r, &ScanSpec::deltas(vec![0.25, 0.5]), &QuadratureConfig::default()).is_err());
    }
}
