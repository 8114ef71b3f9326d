//! Exact parameters and validated function-space descriptors.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Exact rational used throughout the decision path.
pub type Q = BigRational;

/// Shorthand for the rational `n/d`.
pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Shorthand for the integer `n` as a rational.
pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// Best-effort float view of an exact rational.
pub fn q_to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or_else(|| {
        let n = x.numer().to_f64().unwrap_or(f64::NAN);
        let d = x.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParamError {
    #[error("cannot parse `{0}` as an exact rational or `inf`")]
    Parse(String),
    #[error("integrability index {name} = {value} lies outside [1, inf]")]
    IndexRange { name: &'static str, value: String },
    #[error("empty multi-index set")]
    EmptySet,
    #[error("multi-index {0:?} does not have length {1}")]
    IndexLength(Vec<u32>, u32),
    #[error("unknown domain `{0}`")]
    UnknownDomain(String),
    #[error("unknown space `{0}`")]
    UnknownSpace(String),
    #[error("metric table: {0}")]
    Metric(String),
}

/// An exact rational or `+inf`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ExtRational {
    Finite(Q),
    Infinity,
}

impl ExtRational {
    pub fn int(n: i64) -> Self {
        ExtRational::Finite(qi(n))
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        ExtRational::Finite(q(n, d))
    }

    pub fn inf() -> Self {
        ExtRational::Infinity
    }

    pub fn zero() -> Self {
        ExtRational::Finite(Q::zero())
    }

    pub fn is_inf(&self) -> bool {
        matches!(self, ExtRational::Infinity)
    }

    pub fn finite(&self) -> Option<&Q> {
        match self {
            ExtRational::Finite(x) => Some(x),
            ExtRational::Infinity => None,
        }
    }

    pub fn is_integer(&self) -> bool {
        self.finite().is_some_and(|x| x.is_integer())
    }

    /// `1/x` with `1/inf = 0` and `1/0 = inf`. Negative values are inverted as usual.
    pub fn recip(&self) -> ExtRational {
        match self {
            ExtRational::Infinity => ExtRational::zero(),
            ExtRational::Finite(x) if x.is_zero() => ExtRational::Infinity,
            ExtRational::Finite(x) => ExtRational::Finite(x.recip()),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            ExtRational::Infinity => f64::INFINITY,
            ExtRational::Finite(x) => q_to_f64(x),
        }
    }

    pub fn add(&self, other: &ExtRational) -> ExtRational {
        match (self, other) {
            (ExtRational::Finite(a), ExtRational::Finite(b)) => ExtRational::Finite(a + b),
            _ => ExtRational::Infinity,
        }
    }

    /// `self - other`; `None` when the subtrahend is infinite.
    pub fn checked_sub(&self, other: &ExtRational) -> Option<ExtRational> {
        match (self, other) {
            (ExtRational::Finite(a), ExtRational::Finite(b)) => Some(ExtRational::Finite(a - b)),
            (ExtRational::Infinity, ExtRational::Finite(_)) => Some(ExtRational::Infinity),
            _ => None,
        }
    }

    pub fn neg_finite(&self) -> Option<ExtRational> {
        self.finite().map(|x| ExtRational::Finite(-x))
    }
}

impl From<Q> for ExtRational {
    fn from(x: Q) -> Self {
        ExtRational::Finite(x)
    }
}

impl Ord for ExtRational {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (ExtRational::Finite(a), ExtRational::Finite(b)) => a.cmp(b),
            (ExtRational::Finite(_), ExtRational::Infinity) => Ordering::Less,
            (ExtRational::Infinity, ExtRational::Finite(_)) => Ordering::Greater,
            (ExtRational::Infinity, ExtRational::Infinity) => Ordering::Equal,
        }
    }
}

impl PartialOrd for ExtRational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for ExtRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtRational::Infinity => write!(f, "inf"),
            ExtRational::Finite(x) => write!(f, "{x}"),
        }
    }
}

/// Accepts `inf`, `∞`, integers, `a/b` and finite decimals such as `2.2` (read exactly as 11/5).
impl FromStr for ExtRational {
    type Err = ParamError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        let err = || ParamError::Parse(s.to_string());
        if t.eq_ignore_ascii_case("inf") || t == "∞" || t.eq_ignore_ascii_case("infinity") {
            return Ok(ExtRational::Infinity);
        }
        if let Some((n, d)) = t.split_once('/') {
            let n: BigInt = n.trim().parse().map_err(|_| err())?;
            let d: BigInt = d.trim().parse().map_err(|_| err())?;
            if d.is_zero() {
                return Err(err());
            }
            return Ok(ExtRational::Finite(Q::new(n, d)));
        }
        if let Some((whole, frac)) = t.split_once('.') {
            if frac.is_empty() || !frac.chars().all(|c| c.is_ascii_digit()) {
                return Err(err());
            }
            let neg = whole.starts_with('-');
            let whole_digits = whole.trim_start_matches(['-', '+']);
            let digits = format!("{whole_digits}{frac}");
            let n: BigInt = digits.parse().map_err(|_| err())?;
            let d = num_traits::pow(BigInt::from(10), frac.len());
            let v = Q::new(n, d);
            return Ok(ExtRational::Finite(if neg { -v } else { v }));
        }
        let n: BigInt = t.parse().map_err(|_| err())?;
        Ok(ExtRational::Finite(Q::from_integer(n)))
    }
}

impl Serialize for ExtRational {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for ExtRational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Serde adapter for plain rationals, written as `a/b` strings.
pub mod q_serde {
    use super::*;

    pub fn serialize<S: Serializer>(x: &Q, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&x.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Q, D::Error> {
        let s = String::deserialize(d)?;
        match s.parse::<ExtRational>().map_err(serde::de::Error::custom)? {
            ExtRational::Finite(x) => Ok(x),
            ExtRational::Infinity => Err(serde::de::Error::custom("expected a finite rational")),
        }
    }
}

/// Lists of rationals as lists of strings.
pub mod q_vec_serde {
    use super::*;

    pub fn serialize<S: Serializer>(xs: &[Q], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(xs.iter().map(|x| x.to_string()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Q>, D::Error> {
        Vec::<String>::deserialize(d)?
            .iter()
            .map(|s| match s.parse::<ExtRational>().map_err(serde::de::Error::custom)? {
                ExtRational::Finite(x) => Ok(x),
                ExtRational::Infinity => Err(serde::de::Error::custom("expected a finite rational")),
            })
            .collect()
    }
}

/// `max(0, x)`.
pub fn pos_part(x: &ExtRational) -> ExtRational {
    match x {
        ExtRational::Finite(v) if v.is_negative() => ExtRational::zero(),
        other => other.clone(),
    }
}

pub(crate) fn pos_q(x: Q) -> Q {
    if x.is_negative() {
        Q::zero()
    } else {
        x
    }
}

fn check_index(name: &'static str, p: &ExtRational) -> Result<(), ParamError> {
    if *p < ExtRational::int(1) {
        return Err(ParamError::IndexRange {
            name,
            value: p.to_string(),
        });
    }
    Ok(())
}

/// `1/p` as an exact rational, for `p >= 1` or `p = inf`.
pub(crate) fn inv(p: &ExtRational) -> Q {
    match p.recip() {
        ExtRational::Finite(x) => x,
        ExtRational::Infinity => Q::zero(),
    }
}

/// `(d/p1 - d/2)_+ + (d/2 - d/p2)_+` with `d/inf = 0`.
pub fn deficiency(p1: &ExtRational, p2: &ExtRational, d: u32) -> Result<ExtRational, ParamError> {
    check_index("p1", p1)?;
    check_index("p2", p2)?;
    Ok(ExtRational::Finite(deficiency_q(p1, p2, d)))
}

pub(crate) fn deficiency_q(p1: &ExtRational, p2: &ExtRational, d: u32) -> Q {
    let (a, b) = deficiency_parts(p1, p2, d);
    a + b
}

/// The two positive parts of the deficiency, source side first.
pub(crate) fn deficiency_parts(p1: &ExtRational, p2: &ExtRational, d: u32) -> (Q, Q) {
    let dq = qi(d as i64);
    let half = q(1, 2);
    let a = pos_q(&dq * (inv(p1) - &half));
    let b = pos_q(&dq * (half - inv(p2)));
    (a, b)
}

/// A finite, downward-closed set of multi-indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CoherentSet {
    dim: u32,
    elements: BTreeSet<Vec<u32>>,
}

impl CoherentSet {
    pub fn dim(&self) -> u32 {
        self.dim
    }

    pub fn elements(&self) -> &BTreeSet<Vec<u32>> {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// `|A|_1`, the largest total order in the set.
    pub fn order(&self) -> u32 {
        self.elements
            .iter()
            .map(|a| a.iter().sum::<u32>())
            .max()
            .unwrap_or(0)
    }

    pub fn contains(&self, alpha: &[u32]) -> bool {
        self.elements.contains(alpha)
    }

    pub fn is_superset(&self, other: &CoherentSet) -> bool {
        self.dim == other.dim && self.elements.is_superset(&other.elements)
    }

    /// All multi-indices of total order at most `k`.
    pub fn isotropic(k: u32, dim: u32) -> CoherentSet {
        let mut out = BTreeSet::new();
        let mut cur = vec![0u32; dim as usize];
        fill_isotropic(&mut cur, 0, k, &mut out);
        CoherentSet { dim, elements: out }
    }

    /// True when the set is exactly `{|a|_1 <= k}` for some `k`.
    pub fn is_isotropic(&self) -> bool {
        *self == CoherentSet::isotropic(self.order(), self.dim)
    }

    pub fn is_coherent(&self) -> bool {
        self.elements.iter().all(|a| {
            (0..a.len()).all(|j| {
                if a[j] == 0 {
                    return true;
                }
                let mut b = a.clone();
                b[j] -= 1;
                self.elements.contains(&b)
            })
        })
    }
}

fn fill_isotropic(cur: &mut Vec<u32>, pos: usize, left: u32, out: &mut BTreeSet<Vec<u32>>) {
    if pos == cur.len() {
        out.insert(cur.clone());
        return;
    }
    for v in 0..=left {
        cur[pos] = v;
        fill_isotropic(cur, pos + 1, left - v, out);
    }
    cur[pos] = 0;
}

/// Smallest coherent superset of `s`.
pub fn coherent_closure(s: &[Vec<u32>], d: u32) -> Result<CoherentSet, ParamError> {
    if s.is_empty() {
        return Err(ParamError::EmptySet);
    }
    let mut elements = BTreeSet::new();
    for a in s {
        if a.len() != d as usize {
            return Err(ParamError::IndexLength(a.clone(), d));
        }
        let mut stack = vec![a.clone()];
        while let Some(b) = stack.pop() {
            if !elements.insert(b.clone()) {
                continue;
            }
            for j in 0..b.len() {
                if b[j] > 0 {
                    let mut c = b.clone();
                    c[j] -= 1;
                    stack.push(c);
                }
            }
        }
    }
    Ok(CoherentSet { dim: d, elements })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DomainKind {
    UnitCube,
    EuclideanBall,
    /// All of `R^d`; the only unbounded Euclidean domain the rules know about.
    EuclideanSpace,
    FiniteMetricSet,
    SequenceIndex,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainSpec {
    pub kind: DomainKind,
    pub dim: Option<u32>,
    pub bounded: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metric: Option<Vec<Vec<f64>>>,
}

impl DomainSpec {
    pub fn cube(d: u32) -> Self {
        DomainSpec {
            kind: DomainKind::UnitCube,
            dim: Some(d),
            bounded: true,
            metric: None,
        }
    }

    pub fn ball(d: u32) -> Self {
        DomainSpec {
            kind: DomainKind::EuclideanBall,
            dim: Some(d),
            bounded: true,
            metric: None,
        }
    }

    pub fn whole_space(d: u32) -> Self {
        DomainSpec {
            kind: DomainKind::EuclideanSpace,
            dim: Some(d),
            bounded: false,
            metric: None,
        }
    }

    pub fn sequence() -> Self {
        DomainSpec {
            kind: DomainKind::SequenceIndex,
            dim: None,
            bounded: false,
            metric: None,
        }
    }

    /// A finite metric space given by its distance table.
    pub fn finite_metric(table: Vec<Vec<f64>>) -> Result<Self, ParamError> {
        check_metric(&table)?;
        Ok(DomainSpec {
            kind: DomainKind::FiniteMetricSet,
            dim: None,
            bounded: true,
            metric: Some(table),
        })
    }

    /// Points `0, 1, .., n-1` on the real line.
    pub fn line_metric(n: usize) -> Self {
        let table = (0..n)
            .map(|i| (0..n).map(|j| (i as f64 - j as f64).abs()).collect())
            .collect();
        DomainSpec {
            kind: DomainKind::FiniteMetricSet,
            dim: None,
            bounded: true,
            metric: Some(table),
        }
    }

    pub fn is_euclidean(&self) -> bool {
        matches!(
            self.kind,
            DomainKind::UnitCube | DomainKind::EuclideanBall | DomainKind::EuclideanSpace
        )
    }

    /// Cube or ball, where the Besov/TL identifications are available.
    pub fn is_smooth_bounded(&self) -> bool {
        matches!(self.kind, DomainKind::UnitCube | DomainKind::EuclideanBall)
    }

    pub fn validate(&self) -> Result<(), ValidationError> {
        let needs_dim = self.is_euclidean();
        match (needs_dim, self.dim) {
            (true, None) | (true, Some(0)) => return Err(ValidationError::MissingDimension),
            (false, Some(_)) if self.kind == DomainKind::SequenceIndex => {
                return Err(ValidationError::UnexpectedDimension)
            }
            _ => {}
        }
        let must_bound = match self.kind {
            DomainKind::UnitCube | DomainKind::EuclideanBall | DomainKind::FiniteMetricSet => true,
            DomainKind::EuclideanSpace | DomainKind::SequenceIndex => false,
        };
        if self.bounded != must_bound {
            return Err(ValidationError::BoundedFlag);
        }
        match (&self.metric, self.kind) {
            (Some(t), DomainKind::FiniteMetricSet) => {
                check_metric(t).map_err(|e| ValidationError::Metric(e.to_string()))
            }
            (None, DomainKind::FiniteMetricSet) => {
                Err(ValidationError::Metric("missing distance table".into()))
            }
            (Some(_), _) => Err(ValidationError::Metric(
                "distance table only allowed on finite metric sets".into(),
            )),
            (None, _) => Ok(()),
        }
    }
}

fn check_metric(t: &[Vec<f64>]) -> Result<(), ParamError> {
    let n = t.len();
    if n == 0 {
        return Err(ParamError::Metric("empty table".into()));
    }
    let scale = t
        .iter()
        .flatten()
        .fold(0.0f64, |m, &v| m.max(v.abs()))
        .max(1.0);
    let tol = 1e-12 * scale;
    for (i, row) in t.iter().enumerate() {
        if row.len() != n {
            return Err(ParamError::Metric(format!("row {i} has {} entries, expected {n}", row.len())));
        }
        if row[i] != 0.0 {
            return Err(ParamError::Metric(format!("nonzero diagonal at {i}")));
        }
        for j in 0..n {
            let v = row[j];
            if !v.is_finite() || v < 0.0 {
                return Err(ParamError::Metric(format!("bad distance at ({i},{j})")));
            }
            if i != j && v == 0.0 {
                return Err(ParamError::Metric(format!("distinct points {i},{j} at distance 0")));
            }
            if (v - t[j][i]).abs() > tol {
                return Err(ParamError::Metric(format!("asymmetric at ({i},{j})")));
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if t[i][j] > t[i][k] + t[k][j] + tol {
                    return Err(ParamError::Metric(format!(
                        "triangle inequality fails for ({i},{j}) via {k}"
                    )));
                }
            }
        }
    }
    Ok(())
}

impl fmt::Display for DomainSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = self.dim.unwrap_or(0);
        match self.kind {
            DomainKind::UnitCube => write!(f, "cube:{d}"),
            DomainKind::EuclideanBall => write!(f, "ball:{d}"),
            DomainKind::EuclideanSpace => write!(f, "rd:{d}"),
            DomainKind::SequenceIndex => write!(f, "seq"),
            DomainKind::FiniteMetricSet => {
                write!(f, "metric[{}]", self.metric.as_ref().map_or(0, |m| m.len()))
            }
        }
    }
}

/// Parses `cube:d`, `ball:d`, `rd:d` and `seq`. Finite metric sets are built from a table.
impl FromStr for DomainSpec {
    type Err = ParamError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        if t == "seq" || t == "n" {
            return Ok(DomainSpec::sequence());
        }
        let (kind, d) = t
            .split_once(':')
            .ok_or_else(|| ParamError::UnknownDomain(s.into()))?;
        let d: u32 = d
            .trim()
            .parse()
            .map_err(|_| ParamError::UnknownDomain(s.into()))?;
        match kind.trim() {
            "cube" => Ok(DomainSpec::cube(d)),
            "ball" => Ok(DomainSpec::ball(d)),
            "rd" | "R" => Ok(DomainSpec::whole_space(d)),
            _ => Err(ParamError::UnknownDomain(s.into())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum Family {
    Holder { alpha: ExtRational },
    Sobolev { s: ExtRational, p: ExtRational },
    Slobodeckij { s: ExtRational, p: ExtRational },
    Besov { s: ExtRational, p: ExtRational, q: ExtRational },
    TriebelLizorkin { s: ExtRational, p: ExtRational, q: ExtRational },
    MixedSobolev { set: CoherentSet, p: ExtRational },
    SequenceLp { p: ExtRational },
    LebesgueLp { p: ExtRational },
    SupSpace,
    ContinuousBounded,
    /// Infinitely differentiable functions with bounded derivatives.
    Smooth,
}

impl Family {
    pub fn tag(&self) -> &'static str {
        match self {
            Family::Holder { .. } => "holder",
            Family::Sobolev { .. } => "sobolev",
            Family::Slobodeckij { .. } => "slobo",
            Family::Besov { .. } => "besov",
            Family::TriebelLizorkin { .. } => "tl",
            Family::MixedSobolev { .. } => "mixed",
            Family::SequenceLp { .. } => "lp",
            Family::LebesgueLp { .. } => "leb",
            Family::SupSpace => "sup",
            Family::ContinuousBounded => "c0",
            Family::Smooth => "cinf",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Holder { alpha } => write!(f, "holder:{alpha}"),
            Family::Sobolev { s, p } => write!(f, "sobolev:{s}:{p}"),
            Family::Slobodeckij { s, p } => write!(f, "slobo:{s}:{p}"),
            Family::Besov { s, p, q } => write!(f, "besov:{s}:{p}:{q}"),
            Family::TriebelLizorkin { s, p, q } => write!(f, "tl:{s}:{p}:{q}"),
            Family::MixedSobolev { set, p } => {
                let parts: Vec<String> = set
                    .elements()
                    .iter()
                    .map(|a| a.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(","))
                    .collect();
                write!(f, "mixed:{p}:{}", parts.join(";"))
            }
            Family::SequenceLp { p } => write!(f, "lp:{p}"),
            Family::LebesgueLp { p } => write!(f, "leb:{p}"),
            Family::SupSpace => write!(f, "sup"),
            Family::ContinuousBounded => write!(f, "c0"),
            Family::Smooth => write!(f, "cinf"),
        }
    }
}

/// Parses the `family:param:..` syntax. `mixed:p:1,0;0,1` takes the coherent closure
/// of the listed indices, so its dimension comes from the index length.
impl FromStr for Family {
    type Err = ParamError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        let unknown = || ParamError::UnknownSpace(s.into());
        let mut it = t.splitn(2, ':');
        let head = it.next().unwrap_or("");
        let rest = it.next();
        if head == "mixed" {
            let rest = rest.ok_or_else(unknown)?;
            let (p, idx) = rest.split_once(':').ok_or_else(unknown)?;
            let p: ExtRational = p.parse()?;
            let mut indices = Vec::new();
            for part in idx.split(';') {
                let a: Result<Vec<u32>, _> = part.split(',').map(|v| v.trim().parse::<u32>()).collect();
                indices.push(a.map_err(|_| unknown())?);
            }
            let d = indices.first().map_or(0, |a| a.len()) as u32;
            let set = coherent_closure(&indices, d)?;
            return Ok(Family::MixedSobolev { set, p });
        }
        let args: Vec<ExtRational> = match rest {
            None => Vec::new(),
            Some(r) => r.split(':').map(str::parse).collect::<Result<_, _>>()?,
        };
        let take = |n: usize| -> Result<&[ExtRational], ParamError> {
            if args.len() == n {
                Ok(&args)
            } else {
                Err(unknown())
            }
        };
        Ok(match head {
            "holder" => {
                let a = take(1)?;
                Family::Holder { alpha: a[0].clone() }
            }
            "sobolev" => {
                let a = take(2)?;
                Family::Sobolev { s: a[0].clone(), p: a[1].clone() }
            }
            "slobo" | "slobodeckij" => {
                let a = take(2)?;
                Family::Slobodeckij { s: a[0].clone(), p: a[1].clone() }
            }
            "besov" => {
                let a = take(3)?;
                Family::Besov { s: a[0].clone(), p: a[1].clone(), q: a[2].clone() }
            }
            "tl" => {
                let a = take(3)?;
                Family::TriebelLizorkin { s: a[0].clone(), p: a[1].clone(), q: a[2].clone() }
            }
            "lp" => Family::SequenceLp { p: take(1)?[0].clone() },
            "leb" | "Lp" => Family::LebesgueLp { p: take(1)?[0].clone() },
            "sup" => {
                take(0)?;
                Family::SupSpace
            }
            "c0" => {
                take(0)?;
                Family::ContinuousBounded
            }
            "cinf" => {
                take(0)?;
                Family::Smooth
            }
            _ => return Err(unknown()),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SpaceSpec {
    #[serde(flatten)]
    pub family: Family,
    pub domain: DomainSpec,
}

// Domains carry f64 metric tables, but those are validated finite, so equality is total.
impl Eq for DomainSpec {}
impl std::hash::Hash for DomainSpec {
    fn hash<H: std::hash::Hasher>(&self, h: &mut H) {
        self.kind.hash(h);
        self.dim.hash(h);
        self.bounded.hash(h);
        if let Some(m) = &self.metric {
            for v in m.iter().flatten() {
                v.to_bits().hash(h);
            }
        }
    }
}

impl SpaceSpec {
    pub fn new(family: Family, domain: DomainSpec) -> Self {
        SpaceSpec { family, domain }
    }

    pub fn holder(alpha: Q, domain: DomainSpec) -> Self {
        SpaceSpec::new(Family::Holder { alpha: alpha.into() }, domain)
    }

    pub fn slobodeckij(s: Q, p: ExtRational, domain: DomainSpec) -> Self {
        SpaceSpec::new(Family::Slobodeckij { s: s.into(), p }, domain)
    }

    pub fn besov(s: Q, p: ExtRational, q: ExtRational, domain: DomainSpec) -> Self {
        SpaceSpec::new(Family::Besov { s: s.into(), p, q }, domain)
    }

    pub fn tl(s: Q, p: ExtRational, q: ExtRational, domain: DomainSpec) -> Self {
        SpaceSpec::new(Family::TriebelLizorkin { s: s.into(), p, q }, domain)
    }

    /// The Hilbert space `W^u_2`, written as `F^u_{2,2}`.
    pub fn hilbert_sobolev(u: Q, domain: DomainSpec) -> Self {
        let two = ExtRational::int(2);
        SpaceSpec::tl(u, two.clone(), two, domain)
    }

    pub fn dim(&self) -> Option<u32> {
        self.domain.dim
    }

    /// Whether the space is a Hilbert space under its standard norm.
    pub fn is_hilbert(&self) -> bool {
        let two = ExtRational::int(2);
        match &self.family {
            Family::SequenceLp { p } | Family::LebesgueLp { p } => *p == two,
            Family::Sobolev { p, .. } => *p == two,
            Family::Slobodeckij { p, .. } => *p == two,
            Family::Besov { p, q, .. } | Family::TriebelLizorkin { p, q, .. } => *p == two && *q == two,
            _ => false,
        }
    }
}

impl fmt::Display for SpaceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} on {}", self.family, self.domain)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ValidationError {
    #[error("Hölder exponent must lie in (0, 1], got {0}")]
    HolderExponent(String),
    #[error("{family} smoothness must be finite and >= 0, got {value}")]
    Smoothness { family: &'static str, value: String },
    #[error("Sobolev order must be a non-negative integer, got {0}")]
    SobolevOrder(String),
    #[error("{family} integrability index p must lie in {range}, got {value}")]
    Integrability { family: &'static str, range: &'static str, value: String },
    #[error("{family} fine index q must lie in [1, inf], got {value}")]
    FineIndex { family: &'static str, value: String },
    #[error("Slobodeckij space with integer smoothness {0} needs p > 1")]
    SlobodeckijIntegerP1(String),
    #[error("multi-index set has dimension {set}, domain has {domain:?}")]
    MixedDimension { set: u32, domain: Option<u32> },
    #[error("multi-index set is not coherent")]
    NotCoherent,
    #[error("domain needs a positive dimension")]
    MissingDimension,
    #[error("sequence index domain carries no dimension")]
    UnexpectedDimension,
    #[error("bounded flag disagrees with the domain kind")]
    BoundedFlag,
    #[error("{0}")]
    Metric(String),
    #[error("{family} is not defined on {domain}")]
    DomainFamily { family: &'static str, domain: String },
}

fn finite_nonneg(family: &'static str, s: &ExtRational) -> Result<(), ValidationError> {
    match s.finite() {
        Some(x) if !x.is_negative() => Ok(()),
        _ => Err(ValidationError::Smoothness { family, value: s.to_string() }),
    }
}

fn p_closed(family: &'static str, p: &ExtRational) -> Result<(), ValidationError> {
    if *p < ExtRational::int(1) {
        return Err(ValidationError::Integrability { family, range: "[1, inf]", value: p.to_string() });
    }
    Ok(())
}

fn p_finite(family: &'static str, p: &ExtRational) -> Result<(), ValidationError> {
    if *p < ExtRational::int(1) || p.is_inf() {
        return Err(ValidationError::Integrability { family, range: "[1, inf)", value: p.to_string() });
    }
    Ok(())
}

fn q_closed(family: &'static str, q: &ExtRational) -> Result<(), ValidationError> {
    if *q < ExtRational::int(1) {
        return Err(ValidationError::FineIndex { family, value: q.to_string() });
    }
    Ok(())
}

/// Returns the spec unchanged when every family invariant holds.
pub fn validate_space(spec: SpaceSpec) -> Result<SpaceSpec, ValidationError> {
    spec.domain.validate()?;
    let on_seq = spec.domain.kind == DomainKind::SequenceIndex;
    let wrong_domain = |family: &'static str| ValidationError::DomainFamily {
        family,
        domain: spec.domain.to_string(),
    };
    match &spec.family {
        Family::Holder { alpha } => {
            if *alpha <= ExtRational::zero() || *alpha > ExtRational::int(1) {
                return Err(ValidationError::HolderExponent(alpha.to_string()));
            }
        }
        Family::Sobolev { s, p } => {
            if !s.is_integer() || s.finite().is_some_and(|x| x.is_negative()) {
                return Err(ValidationError::SobolevOrder(s.to_string()));
            }
            p_finite("Sobolev", p)?;
            if !spec.domain.is_euclidean() {
                return Err(wrong_domain("Sobolev"));
            }
        }
        Family::Slobodeckij { s, p } => {
            finite_nonneg("Slobodeckij", s)?;
            p_finite("Slobodeckij", p)?;
            if s.is_integer() && *p == ExtRational::int(1) {
                return Err(ValidationError::SlobodeckijIntegerP1(s.to_string()));
            }
            if !spec.domain.is_euclidean() {
                return Err(wrong_domain("Slobodeckij"));
            }
        }
        Family::Besov { s, p, q } => {
            finite_nonneg("Besov", s)?;
            p_closed("Besov", p)?;
            q_closed("Besov", q)?;
            if !spec.domain.is_euclidean() {
                return Err(wrong_domain("Besov"));
            }
        }
        Family::TriebelLizorkin { s, p, q } => {
            finite_nonneg("Triebel-Lizorkin", s)?;
            p_finite("Triebel-Lizorkin", p)?;
            q_closed("Triebel-Lizorkin", q)?;
            if !spec.domain.is_euclidean() {
                return Err(wrong_domain("Triebel-Lizorkin"));
            }
        }
        Family::MixedSobolev { set, p } => {
            p_finite("mixed Sobolev", p)?;
            if !set.is_coherent() {
                return Err(ValidationError::NotCoherent);
            }
            if Some(set.dim()) != spec.domain.dim || !spec.domain.is_euclidean() {
                return Err(ValidationError::MixedDimension { set: set.dim(), domain: spec.domain.dim });
            }
        }
        Family::SequenceLp { p } => {
            p_closed("sequence l_p", p)?;
            if !on_seq {
                return Err(wrong_domain("sequence l_p"));
            }
        }
        Family::LebesgueLp { p } => {
            p_closed("Lebesgue L_p", p)?;
            if on_seq {
                return Err(wrong_domain("Lebesgue L_p"));
            }
        }
        Family::SupSpace => {}
        Family::ContinuousBounded | Family::Smooth => {
            if on_seq {
                return Err(wrong_domain(spec.family.tag()));
            }
        }
    }
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(s: &str) -> ExtRational {
        s.parse().unwrap()
    }

    #[test]
    fn pos_part_examples() {
        assert_eq!(pos_part(&r("3")), r("3"));
        assert_eq!(pos_part(&r("-2")), r("0"));
        assert_eq!(pos_part(&r("0")), r("0"));
        assert_eq!(pos_part(&r("inf")), r("inf"));
    }

    #[test]
    fn deficiency_examples() {
        assert_eq!(deficiency(&r("1"), &r("inf"), 3).unwrap(), r("3"));
        assert_eq!(deficiency(&r("2"), &r("2"), 5).unwrap(), r("0"));
        assert_eq!(deficiency(&r("4"), &r("4"), 2).unwrap(), r("1/2"));
        assert!(deficiency(&r("1/2"), &r("2"), 1).is_err());
    }

    #[test]
    fn parse_decimals_exactly() {
        assert_eq!(r("2.2"), ExtRational::ratio(11, 5));
        assert_eq!(r("-0.25"), ExtRational::ratio(-1, 4));
        assert_eq!(r("6/4"), ExtRational::ratio(3, 2));
        assert!("1/0".parse::<ExtRational>().is_err());
        assert!("abc".parse::<ExtRational>().is_err());
    }

    #[test]
    fn infinity_orders_last_and_inverts_to_zero() {
        assert!(r("inf") > r("1000000"));
        assert_eq!(r("inf").recip(), r("0"));
        assert_eq!(r("0").recip(), r("inf"));
    }

    #[test]
    fn closure_examples() {
        let c = coherent_closure(&[vec![2, 0]], 2).unwrap();
        let want: BTreeSet<Vec<u32>> = [vec![0, 0], vec![1, 0], vec![2, 0]].into_iter().collect();
        assert_eq!(c.elements(), &want);
        let c = coherent_closure(&[vec![1, 1]], 2).unwrap();
        assert_eq!(c.len(), 4);
        assert_eq!(c.order(), 2);
        let c = coherent_closure(&[vec![0, 0]], 2).unwrap();
        assert_eq!(c.len(), 1);
        assert!(coherent_closure(&[], 2).is_err());
    }

    #[test]
    fn isotropic_set_is_coherent() {
        let a = CoherentSet::isotropic(2, 3);
        assert!(a.is_coherent());
        assert!(a.is_isotropic());
        assert_eq!(a.len(), 10);
        assert!(!coherent_closure(&[vec![1, 1]], 2).unwrap().is_isotropic());
    }

    #[test]
    fn validation_examples() {
        let h = SpaceSpec::holder(q(1, 2), DomainSpec::cube(2));
        assert!(validate_space(h).is_ok());
        let h = SpaceSpec::holder(qi(2), DomainSpec::cube(2));
        assert!(matches!(validate_space(h), Err(ValidationError::HolderExponent(_))));
        let f = SpaceSpec::tl(qi(1), r("inf"), r("2"), DomainSpec::cube(2));
        assert!(matches!(validate_space(f), Err(ValidationError::Integrability { .. })));
        let s = SpaceSpec::slobodeckij(qi(1), r("1"), DomainSpec::cube(1));
        assert!(matches!(validate_space(s), Err(ValidationError::SlobodeckijIntegerP1(_))));
        let l = SpaceSpec::new(Family::SequenceLp { p: r("2") }, DomainSpec::cube(1));
        assert!(matches!(validate_space(l), Err(ValidationError::DomainFamily { .. })));
    }

    #[test]
    fn metric_table_checks() {
        assert!(DomainSpec::finite_metric(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).is_ok());
        assert!(DomainSpec::finite_metric(vec![vec![0.0, 1.0], vec![2.0, 0.0]]).is_err());
        let bad = vec![vec![0.0, 1.0, 5.0], vec![1.0, 0.0, 1.0], vec![5.0, 1.0, 0.0]];
        assert!(DomainSpec::finite_metric(bad).is_err());
    }

    #[test]
    fn family_syntax_round_trips() {
        for s in ["holder:1/2", "besov:2:2:inf", "tl:3/2:3:3", "lp:inf", "sup", "mixed:2:1,1", "sobolev:2:2"] {
            let f: Family = s.parse().unwrap();
            let back: Family = f.to_string().parse().unwrap();
            assert_eq!(f, back);
        }
        let m: Family = "mixed:2:1,1".parse().unwrap();
        assert_eq!(m.to_string(), "mixed:2:0,0;0,1;1,0;1,1");
    }

    #[test]
    fn spec_serde_round_trip() {
        let s = SpaceSpec::besov(q(1, 2), r("inf"), r("4"), DomainSpec::cube(3));
        let j = serde_json::to_string(&s).unwrap();
        let back: SpaceSpec = serde_json::from_str(&j).unwrap();
        assert_eq!(s, back);
    }
}
