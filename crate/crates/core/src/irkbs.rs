//! Power-series activations `Psi(x, y) = sum_i lambda_i <x, y>^i`: split into two
//! positive-definite parts and check when the integral space they generate sits inside
//! the RKHS of `k1 + k2`.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::param::{q_to_f64, q_vec_serde, Q};

/// Default number of coefficients kept for named series.
pub const DEFAULT_TRUNCATION: usize = 24;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IrkbsError {
    #[error("need at least 2 coefficients, got {0}")]
    TooShort(usize),
    #[error("all coefficients are zero")]
    AllZero,
    #[error("domain radius squared {rho_sq} is not below the convergence radius {radius}")]
    OutOfDomain { rho_sq: f64, radius: f64 },
    #[error("domain radius must be positive and finite, got {0}")]
    BadRadius(f64),
    #[error("unknown series {0:?}; try cos, sin, exp, geometric:<r>")]
    UnknownSeries(String),
    #[error("normalizing function must be bounded, got sup |beta| = {0}")]
    Unbounded(f64),
    #[error("direct and reduced paths disagree: {0}")]
    ReductionMismatch(String),
}

/// Which series the coefficients came from; named ones carry closed forms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SeriesName {
    Cos,
    Sin,
    Exp,
    Geometric {
        #[serde(with = "crate::param::q_serde")]
        ratio: Q,
    },
    Custom,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesSpec {
    pub name: SeriesName,
    #[serde(with = "q_vec_serde")]
    pub coefficients: Vec<Q>,
    /// Inputs lie in the open ball of this radius; `None` means all of `R^d`.
    pub domain_radius: Option<f64>,
}

fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * k)
}

fn inv_factorial(n: u32, negative: bool) -> Q {
    let v = Q::new(BigInt::one(), factorial(n));
    if negative {
        -v
    } else {
        v
    }
}

impl SeriesSpec {
    pub fn new(coefficients: Vec<Q>, domain_radius: Option<f64>) -> Result<Self, IrkbsError> {
        SeriesSpec { name: SeriesName::Custom, coefficients, domain_radius }.validated()
    }

    /// `cos t = sum (-1)^i t^(2i) / (2i)!`, truncated to `len` coefficients.
    pub fn cosine(len: usize, domain_radius: Option<f64>) -> Result<Self, IrkbsError> {
        let coefficients = (0..len as u32)
            .map(|i| if i % 2 == 0 { inv_factorial(i, i % 4 == 2) } else { Q::zero() })
            .collect();
        SeriesSpec { name: SeriesName::Cos, coefficients, domain_radius }.validated()
    }

    pub fn sine(len: usize, domain_radius: Option<f64>) -> Result<Self, IrkbsError> {
        let coefficients = (0..len as u32)
            .map(|i| if i % 2 == 1 { inv_factorial(i, i % 4 == 3) } else { Q::zero() })
            .collect();
        SeriesSpec { name: SeriesName::Sin, coefficients, domain_radius }.validated()
    }

    pub fn exponential(len: usize, domain_radius: Option<f64>) -> Result<Self, IrkbsError> {
        let coefficients = (0..len as u32).map(|i| inv_factorial(i, false)).collect();
        SeriesSpec { name: SeriesName::Exp, coefficients, domain_radius }.validated()
    }

    /// `lambda_i = ratio^i`.
    pub fn geometric(ratio: Q, len: usize, domain_radius: Option<f64>) -> Result<Self, IrkbsError> {
        let mut coefficients = Vec::with_capacity(len);
        let mut c = Q::one();
        for _ in 0..len {
            coefficients.push(c.clone());
            c *= &ratio;
        }
        SeriesSpec { name: SeriesName::Geometric { ratio }, coefficients, domain_radius }.validated()
    }

    /// `cos`, `sin`, `exp` or `geometric:<r>`.
    pub fn named(name: &str, len: usize, domain_radius: Option<f64>) -> Result<Self, IrkbsError> {
        match name {
            "cos" | "cosine" => Self::cosine(len, domain_radius),
            "sin" | "sine" => Self::sine(len, domain_radius),
            "exp" => Self::exponential(len, domain_radius),
            other => {
                let r = other
                    .strip_prefix("geometric:")
                    .and_then(|r| r.parse::<Q>().ok())
                    .ok_or_else(|| IrkbsError::UnknownSeries(other.to_string()))?;
                Self::geometric(r, len, domain_radius)
            }
        }
    }

    fn validated(self) -> Result<Self, IrkbsError> {
        if self.coefficients.len() < 2 {
            return Err(IrkbsError::TooShort(self.coefficients.len()));
        }
        if self.coefficients.iter().all(Zero::is_zero) {
            return Err(IrkbsError::AllZero);
        }
        if let Some(r) = self.domain_radius {
            if !(r > 0.0 && r.is_finite()) {
                return Err(IrkbsError::BadRadius(r));
            }
        }
        Ok(self)
    }

    pub fn truncation(&self) -> usize {
        self.coefficients.len()
    }

    /// `Psi` as a function of `t = <x, y>`. Named series use the closed form.
    pub fn eval(&self, t: f64) -> f64 {
        match self.name {
            SeriesName::Cos => t.cos(),
            SeriesName::Sin => t.sin(),
            SeriesName::Exp => t.exp(),
            _ => horner(&self.coefficients, t),
        }
    }

    /// `sum |lambda_i| t^i`, the function whose integrability is required.
    pub fn abs_eval(&self, t: f64) -> f64 {
        match &self.name {
            SeriesName::Cos => t.cosh(),
            SeriesName::Sin => t.sinh(),
            SeriesName::Exp => t.exp(),
            SeriesName::Geometric { ratio } if (q_to_f64(ratio).abs() * t).abs() < 1.0 => {
                1.0 / (1.0 - q_to_f64(ratio).abs() * t)
            }
            _ => {
                let abs: Vec<Q> = self.coefficients.iter().map(|c| c.abs()).collect();
                horner(&abs, t)
            }
        }
    }

    fn abs_closed_form(&self, arg: &str) -> Option<String> {
        match &self.name {
            SeriesName::Cos => Some(format!("cosh({arg})")),
            SeriesName::Sin => Some(format!("sinh({arg})")),
            SeriesName::Exp => Some(format!("exp({arg})")),
            SeriesName::Geometric { ratio } => Some(format!("1/(1 - {}*{arg})", ratio.abs())),
            SeriesName::Custom => None,
        }
    }
}

fn horner(c: &[Q], t: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, x| acc * t + q_to_f64(x))
}

/// Index-aligned positive and negative parts of the coefficients.
pub fn split_series(spec: &SeriesSpec) -> (Vec<Q>, Vec<Q>) {
    spec.coefficients
        .iter()
        .map(|c| if c.is_negative() { (Q::zero(), -c) } else { (c.clone(), Q::zero()) })
        .unzip()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RadiusMethod {
    /// Consecutive nonzero coefficients have a constant ratio.
    GeometricFit,
    /// Consecutive ratios keep growing: factorial-type decay, reported as infinite.
    FactorialDetect,
    /// `1 / max |lambda_i|^(1/i)` over the upper half of the truncation.
    CauchyHadamard,
    /// Nothing to estimate; infinite by convention.
    AllZero,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadiusEstimate {
    /// `None` is an infinite radius.
    pub value: Option<f64>,
    pub method: RadiusMethod,
    /// Set when the value is a convention or rests on few terms.
    pub flagged: bool,
}

impl RadiusEstimate {
    pub fn as_f64(&self) -> f64 {
        self.value.unwrap_or(f64::INFINITY)
    }
}

impl fmt::Display for RadiusEstimate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = serde_json::to_value(self.method).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
        match self.value {
            Some(v) => write!(f, "{v} ({m})"),
            None => write!(f, "inf ({m})"),
        }
    }
}

/// Estimate of the convergence radius from a truncation. Never claims more than the
/// terms support: only a detected pattern yields an exact value or infinity.
pub fn radius_lower_bound(coeffs: &[Q]) -> Result<RadiusEstimate, IrkbsError> {
    if coeffs.len() < 2 {
        return Err(IrkbsError::TooShort(coeffs.len()));
    }
    let nz: Vec<(usize, f64)> = coeffs
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, c)| (i, ln_abs(c)))
        .collect();
    if nz.is_empty() {
        return Ok(RadiusEstimate { value: None, method: RadiusMethod::AllZero, flagged: true });
    }
    // Ratio-test radii between consecutive nonzero terms, in log form.
    let ratios: Vec<f64> = nz.windows(2).map(|w| (w[0].1 - w[1].1) / (w[1].0 - w[0].0) as f64).collect();
    if ratios.len() >= 2 {
        let first = ratios[0];
        if ratios.iter().all(|r| (r - first).abs() <= 1e-12 * first.abs().max(1.0)) {
            return Ok(RadiusEstimate { value: Some(first.exp()), method: RadiusMethod::GeometricFit, flagged: false });
        }
        let tail = &ratios[ratios.len() / 2..];
        let increasing = ratios.windows(2).all(|w| w[1] > w[0]);
        // Ratios growing like the index: the log ratio keeps gaining ground.
        if increasing && tail.len() >= 2 && ratios[ratios.len() - 1] - ratios[0] >= 2f64.ln() {
            return Ok(RadiusEstimate { value: None, method: RadiusMethod::FactorialDetect, flagged: false });
        }
    }
    let half = coeffs.len() / 2;
    let worst = nz
        .iter()
        .filter(|(i, _)| *i >= half.max(1))
        .map(|(i, l)| l / *i as f64)
        .fold(f64::NEG_INFINITY, f64::max);
    if worst == f64::NEG_INFINITY {
        // Nonzero terms only at low order: the truncation is a polynomial.
        return Ok(RadiusEstimate { value: None, method: RadiusMethod::CauchyHadamard, flagged: true });
    }
    Ok(RadiusEstimate { value: Some((-worst).exp()), method: RadiusMethod::CauchyHadamard, flagged: true })
}

fn ln_abs(c: &Q) -> f64 {
    let c = c.abs();
    let (n, d) = (c.numer(), c.denom());
    big_ln(n) - big_ln(d)
}

fn big_ln(x: &BigInt) -> f64 {
    let bits = x.bits();
    if bits < 1000 {
        return x.to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    (x >> shift).to_f64().unwrap().ln() + shift as f64 * 2f64.ln()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MeasureClass {
    AllFiniteSigned,
    /// A user-described subclass of the finite signed measures.
    Restricted(String),
}

impl MeasureClass {
    fn describe(&self) -> String {
        match self {
            MeasureClass::AllFiniteSigned => "M(X)".into(),
            MeasureClass::Restricted(s) => s.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Tri {
    Yes,
    No,
    Undetermined,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Applicability {
    YesBoundedKernels,
    Conditional,
    No,
}

impl fmt::Display for Applicability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Applicability::YesBoundedKernels => "yes-bounded-kernels",
            Applicability::Conditional => "conditional",
            Applicability::No => "no",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionReport {
    pub series: SeriesName,
    #[serde(with = "q_vec_serde")]
    pub sigma_plus: Vec<Q>,
    #[serde(with = "q_vec_serde")]
    pub sigma_minus: Vec<Q>,
    pub radius_plus: RadiusEstimate,
    pub radius_minus: RadiusEstimate,
    pub domain_radius: Option<f64>,
    pub measure_class: MeasureClass,
    pub psi_bounded_on_domain: Tri,
    pub lemma_applicable: Applicability,
    /// `sup_x k1(x,x) + k2(x,x) = sum |lambda_i| rho^(2i)` on a bounded domain.
    pub diagonal_bound: Option<f64>,
    pub diagonal_closed_form: Option<String>,
    /// Necessary condition for the kernel sections to be integrable.
    pub required_integrability: String,
    /// Sufficient condition via the kernel diagonal.
    pub sufficient_integrability: String,
    pub chain: Vec<String>,
    pub notes: Vec<String>,
}

/// A bounded normalizing function, described by its sup and, if constant, its value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Normalizer {
    pub label: String,
    pub sup_abs: f64,
    pub constant: Option<f64>,
}

impl Normalizer {
    pub fn one() -> Self {
        Normalizer { label: "1".into(), sup_abs: 1.0, constant: Some(1.0) }
    }
}

fn reduced_class(m: &MeasureClass, beta: &Normalizer) -> MeasureClass {
    match (m, beta.constant) {
        (MeasureClass::AllFiniteSigned, Some(c)) if c != 0.0 => MeasureClass::AllFiniteSigned,
        _ => MeasureClass::Restricted(format!("{} * {}", beta.label, m.describe())),
    }
}

/// Decides whether the positive decomposition gives a surrounding RKHS for the given
/// measures, with normalizing function `1`.
pub fn check_applicability(spec: &SeriesSpec, measure: &MeasureClass) -> Result<DecompositionReport, IrkbsError> {
    assess(spec, measure, None)
}

fn assess(spec: &SeriesSpec, measure: &MeasureClass, beta: Option<&Normalizer>) -> Result<DecompositionReport, IrkbsError> {
    let (plus, minus) = split_series(spec);
    let rp = radius_lower_bound(&plus)?;
    let rm = radius_lower_bound(&minus)?;
    let radius = rp.as_f64().min(rm.as_f64());
    let rho_sq = spec.domain_radius.map_or(f64::INFINITY, |r| r * r);
    let inside = if rho_sq.is_infinite() { radius.is_infinite() } else { rho_sq < radius };
    if !inside {
        return Err(IrkbsError::OutOfDomain { rho_sq, radius });
    }
    let weight = beta.map(|b| format!(" * {}", b.label)).unwrap_or_default();
    let mu = measure.describe();
    let section = spec
        .abs_closed_form("<., x>")
        .unwrap_or_else(|| "sum_i |lambda_i| <., x>^i".into());
    let required = format!("{section}{weight} in L1(mu) for all x in X, mu in {mu}");
    let sufficient = format!("integral of sqrt(k1(x,x) + k2(x,x)){weight} d|mu|(x) < inf for all mu in {mu}");
    let mut notes = Vec::new();
    let (psi_bounded, lemma, diag, diag_form, chain);
    match spec.domain_radius {
        Some(r) => {
            let b = spec.abs_eval(r * r);
            psi_bounded = Tri::Yes;
            lemma = Applicability::YesBoundedKernels;
            diag = Some(b);
            diag_form = spec.abs_closed_form(&format!("{}", r * r));
            chain = vec!["E_{M,Psi,1}".to_string(), "H1 + H2".into(), "l_inf(X)".into()];
            notes.push("kernels are bounded on the domain, so the diagonal condition holds for every finite measure".into());
        }
        None => {
            psi_bounded = match spec.name {
                SeriesName::Cos | SeriesName::Sin => Tri::Yes,
                SeriesName::Exp => Tri::No,
                _ if spec.coefficients.iter().skip(1).any(|c| c.is_positive())
                    && spec.coefficients.iter().all(|c| !c.is_negative()) =>
                {
                    Tri::No
                }
                _ => Tri::Undetermined,
            };
            diag = None;
            diag_form = None;
            chain = Vec::new();
            lemma = match psi_bounded {
                Tri::No => {
                    notes.push("Psi is unbounded on R^d, so 1 is not a normalizing function".into());
                    Applicability::No
                }
                Tri::Undetermined => {
                    notes.push("boundedness of Psi is not decidable from the truncation".into());
                    Applicability::Conditional
                }
                Tri::Yes => Applicability::Conditional,
            };
            if lemma == Applicability::Conditional {
                notes.push("the required condition is necessary; how far it is from sufficient is open".into());
            }
        }
    }
    Ok(DecompositionReport {
        series: spec.name.clone(),
        sigma_plus: plus,
        sigma_minus: minus,
        radius_plus: rp,
        radius_minus: rm,
        domain_radius: spec.domain_radius,
        measure_class: measure.clone(),
        psi_bounded_on_domain: psi_bounded,
        lemma_applicable: lemma,
        diagonal_bound: diag,
        diagonal_closed_form: diag_form,
        required_integrability: required,
        sufficient_integrability: sufficient,
        chain,
        notes,
    })
}

/// Runs the check for `(Psi, beta, M)` directly and via `(Psi, 1, beta M)` and
/// insists both give the same verdict. Returns the reduced report.
pub fn check_with_normalizer(
    spec: &SeriesSpec,
    measure: &MeasureClass,
    beta: &Normalizer,
) -> Result<DecompositionReport, IrkbsError> {
    if !beta.sup_abs.is_finite() {
        return Err(IrkbsError::Unbounded(beta.sup_abs));
    }
    let direct = assess(spec, measure, Some(beta))?;
    let reduced = assess(spec, &reduced_class(measure, beta), None)?;
    if direct.lemma_applicable != reduced.lemma_applicable || direct.psi_bounded_on_domain != reduced.psi_bounded_on_domain
    {
        return Err(IrkbsError::ReductionMismatch(format!(
            "{} vs {}",
            direct.lemma_applicable, reduced.lemma_applicable
        )));
    }
    Ok(reduced)
}

/// `f(x) = sum_j w_j Psi(x, y_j) beta(y_j)` for a discrete measure.
pub fn discrete_embedding(spec: &SeriesSpec, atoms: &[(Vec<f64>, f64)], beta: &dyn Fn(&[f64]) -> f64, x: &[f64]) -> f64 {
    atoms
        .iter()
        .map(|(y, w)| w * spec.eval(dot(x, y)) * beta(y))
        .sum()
}

/// The atoms of `beta mu`.
pub fn reweight(atoms: &[(Vec<f64>, f64)], beta: &dyn Fn(&[f64]) -> f64) -> Vec<(Vec<f64>, f64)> {
    atoms.iter().map(|(y, w)| (y.clone(), w * beta(y))).collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::param::q;

    #[test]
    fn cosine_split_pattern() {
        let s = SeriesSpec::cosine(DEFAULT_TRUNCATION, None).unwrap();
        let (p, m) = split_series(&s);
        for i in 0..DEFAULT_TRUNCATION as u32 {
            let want_p = if i % 4 == 0 { inv_factorial(i, false) } else { Q::zero() };
            let want_m = if i % 4 == 2 { inv_factorial(i, false) } else { Q::zero() };
            assert_eq!(p[i as usize], want_p, "plus {i}");
            assert_eq!(m[i as usize], want_m, "minus {i}");
        }
    }

    #[test]
    fn radii() {
        let g = SeriesSpec::geometric(q(1, 2), 12, None).unwrap();
        let r = radius_lower_bound(&g.coefficients).unwrap();
        assert_eq!(r.method, RadiusMethod::GeometricFit);
        assert!((r.as_f64() - 2.0).abs() < 1e-12);
        let ones = vec![Q::one(); 8];
        assert!((radius_lower_bound(&ones).unwrap().as_f64() - 1.0).abs() < 1e-12);
        let (p, m) = split_series(&SeriesSpec::cosine(DEFAULT_TRUNCATION, None).unwrap());
        assert_eq!(radius_lower_bound(&p).unwrap().value, None);
        assert_eq!(radius_lower_bound(&m).unwrap().method, RadiusMethod::FactorialDetect);
        let z = radius_lower_bound(&[Q::zero(), Q::zero()]).unwrap();
        assert!(z.flagged && z.value.is_none());
    }

    #[test]
    fn cosine_verdicts() {
        let all = MeasureClass::AllFiniteSigned;
        let unb = check_applicability(&SeriesSpec::cosine(DEFAULT_TRUNCATION, None).unwrap(), &all).unwrap();
        assert_eq!(unb.lemma_applicable, Applicability::Conditional);
        assert!(unb.required_integrability.starts_with("cosh(<., x>)"));
        let b = check_applicability(&SeriesSpec::cosine(DEFAULT_TRUNCATION, Some(1.0)).unwrap(), &all).unwrap();
        assert_eq!(b.lemma_applicable, Applicability::YesBoundedKernels);
        assert!((b.diagonal_bound.unwrap() - 1f64.cosh()).abs() < 1e-12);
    }

    #[test]
    fn geometric_out_of_domain() {
        let all = MeasureClass::AllFiniteSigned;
        let ok = SeriesSpec::geometric(q(1, 2), 12, Some(0.5)).unwrap();
        assert_eq!(check_applicability(&ok, &all).unwrap().lemma_applicable, Applicability::YesBoundedKernels);
        let bad = SeriesSpec::geometric(q(1, 2), 12, Some(1.5)).unwrap();
        assert!(matches!(check_applicability(&bad, &all), Err(IrkbsError::OutOfDomain { .. })));
    }

    #[test]
    fn exp_on_whole_space_fails() {
        let r = check_applicability(&SeriesSpec::exponential(20, None).unwrap(), &MeasureClass::AllFiniteSigned).unwrap();
        assert_eq!(r.lemma_applicable, Applicability::No);
    }

    #[test]
    fn normalizer_paths_agree() {
        let s = SeriesSpec::cosine(DEFAULT_TRUNCATION, None).unwrap();
        let beta = Normalizer { label: "exp(-|y|^2)".into(), sup_abs: 1.0, constant: None };
        let r = check_with_normalizer(&s, &MeasureClass::AllFiniteSigned, &beta).unwrap();
        assert_eq!(r.lemma_applicable, Applicability::Conditional);
        let b = |y: &[f64]| (-y.iter().map(|v| v * v).sum::<f64>()).exp();
        let atoms = vec![(vec![0.3, -1.0], 0.7), (vec![2.0, 0.5], -1.2)];
        let x = [0.4, 0.9];
        let direct = discrete_embedding(&s, &atoms, &b, &x);
        let reduced = discrete_embedding(&s, &reweight(&atoms, &b), &|_| 1.0, &x);
        assert!((direct - reduced).abs() < 1e-14);
    }
}
