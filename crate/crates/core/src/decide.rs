//! Decides whether an embedding factors through a Hilbert space.
//!
//! A `Feasible` verdict carries a witness chain whose links are replayed through
//! [`embeds`]; an `Infeasible` verdict carries an obstruction recipe that the
//! bump lab can execute.

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

use crate::embedding::{embeds, rewrite, EmbedError, EmbedStatus};
use crate::packing::estimate_metric_exponent;
use crate::param::{
    deficiency_parts, inv, pos_q, q, q_serde, qi, validate_space, DomainKind, ExtRational, Family, SpaceSpec, Q,
};
use crate::rules::RuleId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Feasible,
    Infeasible,
    Borderline,
    Undetermined,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Status::Feasible => "feasible",
            Status::Infeasible => "infeasible",
            Status::Borderline => "borderline",
            Status::Undetermined => "undetermined",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Relation {
    Lt,
    Le,
    Gt,
    Ge,
}

impl Relation {
    pub fn holds(self, lhs: &ExtRational, rhs: &ExtRational) -> bool {
        match self {
            Relation::Lt => lhs < rhs,
            Relation::Le => lhs <= rhs,
            Relation::Gt => lhs > rhs,
            Relation::Ge => lhs >= rhs,
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            Relation::Lt => "<",
            Relation::Le => "<=",
            Relation::Gt => ">",
            Relation::Ge => ">=",
        }
    }
}

/// A required inequality, recorded with the values it was evaluated at.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Inequality {
    pub lhs: ExtRational,
    pub relation: Relation,
    pub rhs: ExtRational,
    pub description: String,
}

impl Inequality {
    fn new(lhs: impl Into<ExtRational>, relation: Relation, rhs: impl Into<ExtRational>, description: &str) -> Self {
        Inequality { lhs: lhs.into(), relation, rhs: rhs.into(), description: description.to_string() }
    }

    pub fn is_satisfied(&self) -> bool {
        self.relation.holds(&self.lhs, &self.rhs)
    }
}

impl fmt::Display for Inequality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {} {} {}", self.description, self.lhs, self.relation.symbol(), self.rhs)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Construction {
    LpUnitVectors,
    LpIndicatorPartition,
    HoelderTentBumps,
    SmoothScaledBumps,
    /// Translates of one smooth bump drifting off to infinity.
    SmoothTranslates,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RatioMode {
    /// Rademacher norm of the images over the l2 norm of the inputs.
    Type2,
    /// l2 norm of the images over the Rademacher norm of the inputs.
    Cotype2,
}

/// What the ratio grows against: `log n` or `log(1/delta)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScanVariable {
    LogN,
    LogInvDelta,
}

/// Numbers the bump lab needs to run an obstruction.
///
/// Smoothness is `s` on the source and `t` on the target (Hölder exponents for tents,
/// zero for sequence and Lebesgue spaces); `p1`, `p2` are the integrability indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanParams {
    pub dim: u32,
    #[serde(with = "q_serde")]
    pub s: Q,
    #[serde(with = "q_serde")]
    pub t: Q,
    pub p1: ExtRational,
    pub p2: ExtRational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObstructionRecipe {
    pub violated: Inequality,
    pub construction: Construction,
    /// Growth rate of the ratio in `variable`.
    pub predicted_exponent: ExtRational,
    pub mode: RatioMode,
    pub variable: ScanVariable,
    pub params: ScanParams,
    pub source: SpaceSpec,
    pub target: SpaceSpec,
    /// Packing exponent used, when the construction depends on one.
    pub packing_exponent: Option<ExtRational>,
    /// True when the packing exponent was estimated numerically.
    pub estimated: bool,
}

/// Interval of admissible `u`, with each end open or closed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UInterval {
    #[serde(with = "q_serde")]
    pub lower: Q,
    #[serde(with = "q_serde")]
    pub upper: Q,
    pub lower_closed: bool,
    pub upper_closed: bool,
}

impl UInterval {
    pub fn open(lower: Q, upper: Q) -> Self {
        UInterval { lower, upper, lower_closed: false, upper_closed: false }
    }

    pub fn contains(&self, u: &Q) -> bool {
        let lo = if self.lower_closed { *u >= self.lower } else { *u > self.lower };
        let hi = if self.upper_closed { *u <= self.upper } else { *u < self.upper };
        lo && hi
    }

    pub fn is_empty(&self) -> bool {
        if self.lower_closed && self.upper_closed {
            self.lower > self.upper
        } else {
            self.lower >= self.upper
        }
    }

    pub fn midpoint(&self) -> Q {
        (&self.lower + &self.upper) * q(1, 2)
    }
}

impl fmt::Display for UInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let l = if self.lower_closed { '[' } else { '(' };
        let r = if self.upper_closed { ']' } else { ')' };
        write!(f, "{l}{}, {}{r}", self.lower, self.upper)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessChain {
    pub links: Vec<SpaceSpec>,
    pub hilbert_index: usize,
    pub u_interval: Option<UInterval>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub status: Status,
    pub rule: Option<RuleId>,
    pub witness: Option<WitnessChain>,
    pub obstruction: Option<ObstructionRecipe>,
    pub note: Option<String>,
}

impl Verdict {
    fn feasible(rule: RuleId, witness: WitnessChain) -> Self {
        Verdict { status: Status::Feasible, rule: Some(rule), witness: Some(witness), obstruction: None, note: None }
    }

    fn infeasible(rule: RuleId, recipe: ObstructionRecipe) -> Self {
        Verdict { status: Status::Infeasible, rule: Some(rule), witness: None, obstruction: Some(recipe), note: None }
    }

    fn borderline(rule: RuleId, note: impl Into<String>) -> Self {
        Verdict { status: Status::Borderline, rule: Some(rule), witness: None, obstruction: None, note: Some(note.into()) }
    }

    fn undetermined(rule: Option<RuleId>, note: impl Into<String>) -> Self {
        Verdict { status: Status::Undetermined, rule, witness: None, obstruction: None, note: Some(note.into()) }
    }

    fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DecideError {
    #[error(transparent)]
    Embed(#[from] EmbedError),
    #[error("precondition failed: {0} does not embed")]
    Precondition(String),
    #[error("no admissible interval: verdict is {0}")]
    NotFeasible(Status),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundedTarget {
    SupSpace,
    ContinuousBounded,
}

impl BoundedTarget {
    pub fn spec(self, domain: &crate::param::DomainSpec) -> SpaceSpec {
        let fam = match self {
            BoundedTarget::SupSpace => Family::SupSpace,
            BoundedTarget::ContinuousBounded => Family::ContinuousBounded,
        };
        SpaceSpec::new(fam, domain.clone())
    }
}

fn fin(x: &ExtRational) -> Q {
    x.finite().cloned().unwrap_or_else(Q::zero)
}

fn two() -> ExtRational {
    ExtRational::int(2)
}

/// Builds a chain from the given links, dropping repeated neighbours, and confirms every link.
fn confirmed_chain(links: Vec<SpaceSpec>, u_interval: Option<UInterval>) -> Result<Option<WitnessChain>, DecideError> {
    let mut out: Vec<SpaceSpec> = Vec::new();
    for l in links {
        if out.last() != Some(&l) {
            out.push(l);
        }
    }
    for w in out.windows(2) {
        if embeds(&w[0], &w[1])?.status != EmbedStatus::Holds {
            return Ok(None);
        }
    }
    let Some(hilbert_index) = out.iter().position(|s| s.is_hilbert()) else {
        return Ok(None);
    };
    Ok(Some(WitnessChain { links: out, hilbert_index, u_interval }))
}

fn feasible_or_unknown(rule: RuleId, chain: Option<WitnessChain>) -> Verdict {
    match chain {
        Some(c) => Verdict::feasible(rule, c),
        None => Verdict::undetermined(Some(rule), "witness chain could not be confirmed link by link"),
    }
}

/// Decides whether `E -> F` factors through a Hilbert space.
pub fn decide(e: &SpaceSpec, f: &SpaceSpec) -> Result<Verdict, DecideError> {
    let e = validate_space(e.clone()).map_err(EmbedError::from)?;
    let f = validate_space(f.clone()).map_err(EmbedError::from)?;
    if e.domain != f.domain {
        return Err(EmbedError::DomainMismatch { left: e.domain.to_string(), right: f.domain.to_string() }.into());
    }
    if e.domain.kind != DomainKind::SequenceIndex {
        match f.family {
            Family::SupSpace => return decide_bounded_target(&e, BoundedTarget::SupSpace),
            Family::ContinuousBounded => return decide_bounded_target(&e, BoundedTarget::ContinuousBounded),
            _ => {}
        }
    }
    let ev = embeds(&e, &f)?;
    if ev.status == EmbedStatus::Fails {
        return Err(DecideError::Precondition(format!("{e} -> {f}")));
    }

    if let (Family::Holder { .. }, Family::Holder { .. }) = (&e.family, &f.family) {
        return decide_holder(&e, &f);
    }
    let e2 = rewrite(&e, true);
    let f2 = rewrite(&f, true);
    if e2 == f2 && e2.is_hilbert() {
        let chain = confirmed_chain(vec![e.clone(), f.clone()], None)?;
        return Ok(feasible_or_unknown(RuleId::D0, chain));
    }

    let dom = &e.domain;
    match (&e2.family, &f2.family) {
        (Family::SequenceLp { p }, Family::SequenceLp { p: q }) => decide_lp(&e, &f, p, q, true),
        (Family::LebesgueLp { p }, Family::LebesgueLp { p: q }) if dom.is_smooth_bounded() => {
            decide_lp(&e, &f, p, q, false)
        }
        (Family::MixedSobolev { set: a, p: p1 }, Family::MixedSobolev { set: b, p: p2 }) if dom.is_smooth_bounded() => {
            let d = dom.dim.unwrap_or(1);
            let s = qi(a.order() as i64);
            let t = qi(b.order() as i64);
            decide_mixed(&e, &f, s, t, p1, p2, d, ev.status == EmbedStatus::Holds)
        }
        _ if dom.is_smooth_bounded() => decide_btl(&e, &f, &e2, &f2),
        _ => Ok(Verdict::undetermined(None, "no rule covers this pair")),
    }
}

fn decide_lp(e: &SpaceSpec, f: &SpaceSpec, p: &ExtRational, r: &ExtRational, seq: bool) -> Result<Verdict, DecideError> {
    let (rule, hilbert, ordered) = if seq {
        (RuleId::D1, Family::SequenceLp { p: two() }, p <= r)
    } else {
        (RuleId::D2, Family::LebesgueLp { p: two() }, r <= p)
    };
    if !ordered {
        return Err(DecideError::Precondition(format!("{e} -> {f}")));
    }
    // `lo` is the index on the small-space side, `hi` on the large-space side.
    let (lo, hi) = if seq { (p, r) } else { (r, p) };
    if *lo <= two() && two() <= *hi {
        let mid = SpaceSpec::new(hilbert, e.domain.clone());
        let chain = confirmed_chain(vec![e.clone(), mid, f.clone()], None)?;
        return Ok(feasible_or_unknown(rule, chain));
    }
    let half = q(1, 2);
    let d = if seq { 1 } else { e.domain.dim.unwrap_or(1) };
    let dq = qi(d as i64);
    // Sequence case: p > 2 breaks cotype, q < 2 breaks type. Lebesgue case mirrors it.
    let (mode, exponent, violated) = if seq {
        if *p > two() {
            (RatioMode::Cotype2, &half - inv(p), Inequality::new(p.clone(), Relation::Le, two(), "source index p <= 2"))
        } else {
            (RatioMode::Type2, inv(r) - &half, Inequality::new(r.clone(), Relation::Ge, two(), "target index q >= 2"))
        }
    } else if *r > two() {
        (RatioMode::Cotype2, &dq * (&half - inv(r)), Inequality::new(r.clone(), Relation::Le, two(), "target index q <= 2"))
    } else {
        (RatioMode::Type2, &dq * (inv(p) - &half), Inequality::new(p.clone(), Relation::Ge, two(), "source index p >= 2"))
    };
    let recipe = ObstructionRecipe {
        violated,
        construction: if seq { Construction::LpUnitVectors } else { Construction::LpIndicatorPartition },
        predicted_exponent: exponent.into(),
        mode,
        variable: if seq { ScanVariable::LogN } else { ScanVariable::LogInvDelta },
        params: ScanParams { dim: d, s: Q::zero(), t: Q::zero(), p1: p.clone(), p2: r.clone() },
        source: e.clone(),
        target: f.clone(),
        packing_exponent: None,
        estimated: false,
    };
    Ok(Verdict::infeasible(rule, recipe))
}

/// Packing exponent of the domain: `d` on Euclidean domains, estimated on finite metric sets.
fn packing_exponent(spec: &SpaceSpec) -> Option<(Q, bool)> {
    let dom = &spec.domain;
    match dom.kind {
        DomainKind::UnitCube | DomainKind::EuclideanBall => Some((qi(dom.dim.unwrap_or(1) as i64), false)),
        DomainKind::FiniteMetricSet => {
            let k = estimate_metric_exponent(dom)?;
            Some((Q::new(((k * 1000.0).round() as i64).into(), 1000.into()), true))
        }
        _ => None,
    }
}

fn tent_recipe(e: &SpaceSpec, f: &SpaceSpec, alpha: &Q, beta: &Q, k: &Q, estimated: bool) -> ObstructionRecipe {
    let gap = alpha - beta;
    let exponent = (k * q(1, 2) - &gap) / alpha;
    ObstructionRecipe {
        violated: Inequality::new(qi(2) * &gap, Relation::Ge, k.clone(), "2(a - b) >= packing exponent"),
        construction: Construction::HoelderTentBumps,
        predicted_exponent: exponent.into(),
        mode: RatioMode::Cotype2,
        variable: ScanVariable::LogInvDelta,
        params: ScanParams {
            dim: e.domain.dim.unwrap_or(0),
            s: alpha.clone(),
            t: beta.clone(),
            p1: ExtRational::Infinity,
            p2: ExtRational::Infinity,
        },
        source: e.clone(),
        target: f.clone(),
        packing_exponent: Some(k.clone().into()),
        estimated,
    }
}

/// Hölder to Hölder (`beta > 0`) or Hölder to the sup-normed space (`beta = 0`).
fn holder_core(e: &SpaceSpec, f: &SpaceSpec, alpha: Q, beta: Q, rule: RuleId) -> Result<Verdict, DecideError> {
    if alpha < beta {
        return Ok(Verdict::undetermined(Some(rule), "a < b"));
    }
    let Some((k, estimated)) = packing_exponent(e) else {
        return Ok(Verdict::undetermined(Some(rule), "no packing exponent for this domain"));
    };
    let gap = &alpha - &beta;
    let twice = qi(2) * &gap;
    if estimated {
        // Only a clear violation counts; the estimate carries no error bar.
        if k > &twice + q(1, 4) {
            let recipe = tent_recipe(e, f, &alpha, &beta, &k, true);
            return Ok(Verdict::infeasible(rule, recipe).with_note("packing exponent estimated from the metric table"));
        }
        return Ok(Verdict::undetermined(Some(rule), "no sufficient condition on general metric spaces"));
    }
    if twice < k {
        return Ok(Verdict::infeasible(rule, tent_recipe(e, f, &alpha, &beta, &k, false)));
    }
    if twice == k {
        return Ok(Verdict::borderline(rule, format!("2(a - b) = {k} sits on the threshold")));
    }
    let d = e.domain.dim.unwrap_or(1);
    let interval = UInterval::open(&beta + q(d as i64, 2), alpha.clone());
    let mid = SpaceSpec::hilbert_sobolev(interval.midpoint(), e.domain.clone());
    let chain = confirmed_chain(vec![e.clone(), mid, f.clone()], Some(interval))?;
    Ok(feasible_or_unknown(rule, chain))
}

fn decide_holder(e: &SpaceSpec, f: &SpaceSpec) -> Result<Verdict, DecideError> {
    match (&e.family, &f.family) {
        (Family::Holder { alpha }, Family::Holder { alpha: beta }) => holder_core(e, f, fin(alpha), fin(beta), RuleId::D3),
        _ => Ok(Verdict::undetermined(None, "not a Hölder pair")),
    }
}

fn smooth_recipe(e: &SpaceSpec, f: &SpaceSpec, s: &Q, t: &Q, p1: &ExtRational, p2: &ExtRational, d: u32) -> ObstructionRecipe {
    let (a, b) = deficiency_parts(p1, p2, d);
    let gap = s - t;
    let (mode, exponent) = if &a - &gap > Q::zero() {
        (RatioMode::Type2, &a - &gap)
    } else {
        (RatioMode::Cotype2, &b - &gap)
    };
    ObstructionRecipe {
        violated: Inequality::new(gap, Relation::Ge, &a + &b, "s - t >= deficiency"),
        construction: Construction::SmoothScaledBumps,
        predicted_exponent: exponent.into(),
        mode,
        variable: ScanVariable::LogInvDelta,
        params: ScanParams { dim: d, s: s.clone(), t: t.clone(), p1: p1.clone(), p2: p2.clone() },
        source: e.clone(),
        target: f.clone(),
        packing_exponent: None,
        estimated: false,
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Scale {
    B,
    F,
}

fn btl(spec: &SpaceSpec) -> Option<(Scale, Q, ExtRational)> {
    match &spec.family {
        Family::Besov { s, p, .. } => Some((Scale::B, fin(s), p.clone())),
        Family::TriebelLizorkin { s, p, .. } => Some((Scale::F, fin(s), p.clone())),
        _ => None,
    }
}

fn decide_btl(e: &SpaceSpec, f: &SpaceSpec, e2: &SpaceSpec, f2: &SpaceSpec) -> Result<Verdict, DecideError> {
    let (Some((ka, s, p1)), Some((kb, t, p2))) = (btl(e2), btl(f2)) else {
        return Ok(Verdict::undetermined(None, "no rule covers this pair"));
    };
    let slobo = matches!((&e.family, &f.family), (Family::Slobodeckij { .. }, Family::Slobodeckij { .. }));
    let rule = if slobo { RuleId::D4 } else { RuleId::D5 };
    let d = e.domain.dim.unwrap_or(1);
    let dq = qi(d as i64);
    let gap = &s - &t;
    let scale_gap = &dq * (inv(&p1) - inv(&p2));
    let tl_pair = ka == Scale::F && kb == Scale::F;
    let strict_needed = !slobo && !tl_pair;
    if t.is_negative() || gap <= Q::zero() {
        return Ok(Verdict::undetermined(Some(rule), "needs 0 <= t < s"));
    }
    if gap < scale_gap || (strict_needed && gap == scale_gap) {
        return Ok(Verdict::undetermined(Some(rule), "smoothness gap does not cover d(1/p1 - 1/p2)"));
    }
    // C^1 sits strictly inside B^1_{inf,inf}; only the sufficient side carries over.
    let holder_one = matches!(&e.family, Family::Holder { alpha } if *alpha == ExtRational::int(1));

    let (a, b) = deficiency_parts(&p1, &p2, d);
    let def = &a + &b;
    if gap > def {
        let lower = &t + &b;
        let upper = &s - &a;
        let interval = if tl_pair && !slobo {
            UInterval { lower_closed: lower != t, upper_closed: upper != s, lower, upper }
        } else {
            UInterval::open(lower, upper)
        };
        let mid = SpaceSpec::hilbert_sobolev(interval.midpoint(), e.domain.clone());
        let chain = confirmed_chain(vec![e.clone(), mid, f.clone()], Some(interval))?;
        return Ok(feasible_or_unknown(rule, chain));
    }
    if gap == def {
        return Ok(Verdict::borderline(rule, format!("s - t = {def} equals the deficiency")));
    }
    if !slobo && !t.is_positive() {
        return Ok(Verdict::undetermined(Some(rule), "the necessary condition needs t > 0"));
    }
    if holder_one {
        return Ok(Verdict::undetermined(Some(rule), "C^1 is strictly smaller than B^1_{inf,inf}"));
    }
    Ok(Verdict::infeasible(rule, smooth_recipe(e, f, &s, &t, &p1, &p2, d)))
}

#[allow(clippy::too_many_arguments)]
fn decide_mixed(
    e: &SpaceSpec,
    f: &SpaceSpec,
    s: Q,
    t: Q,
    p1: &ExtRational,
    p2: &ExtRational,
    d: u32,
    embedding_known: bool,
) -> Result<Verdict, DecideError> {
    let scale_gap = qi(d as i64) * (inv(p1) - inv(p2));
    let gap = &s - &t;
    if !embedding_known || gap < scale_gap {
        return Ok(Verdict::undetermined(Some(RuleId::D6), "needs an established embedding and |A| - |B| >= d(1/p1 - 1/p2)"));
    }
    let (a, b) = deficiency_parts(p1, p2, d);
    if gap < &a + &b {
        return Ok(Verdict::infeasible(RuleId::D6, smooth_recipe(e, f, &s, &t, p1, p2, d)));
    }
    Ok(Verdict::undetermined(Some(RuleId::D6), "only the necessary side is known for mixed smoothness"))
}

fn contains_smooth(spec: &SpaceSpec) -> bool {
    match &spec.family {
        Family::Smooth | Family::Holder { .. } | Family::SupSpace | Family::ContinuousBounded => true,
        Family::Besov { p, .. } => p.is_inf(),
        _ => false,
    }
}

fn bounded_recipe(e: &SpaceSpec, target: &SpaceSpec, s: &Q, p: &ExtRational, d: u32) -> ObstructionRecipe {
    let half_d = q(d as i64, 2);
    let threshold = pos_q(qi(d as i64) * inv(p) - &half_d) + &half_d;
    ObstructionRecipe {
        violated: Inequality::new(s.clone(), Relation::Ge, threshold, "s >= (d/p - d/2)_+ + d/2"),
        construction: Construction::SmoothScaledBumps,
        predicted_exponent: (&half_d - s).into(),
        mode: RatioMode::Cotype2,
        variable: ScanVariable::LogInvDelta,
        params: ScanParams { dim: d, s: s.clone(), t: Q::zero(), p1: p.clone(), p2: ExtRational::Infinity },
        source: e.clone(),
        target: target.clone(),
        packing_exponent: None,
        estimated: false,
    }
}

/// Decides whether `E` sits inside an RKHS with bounded kernel, i.e. whether
/// `E -> target` factors through a Hilbert space.
pub fn decide_bounded_target(e: &SpaceSpec, target: BoundedTarget) -> Result<Verdict, DecideError> {
    let e = validate_space(e.clone()).map_err(EmbedError::from)?;
    let tspec = target.spec(&e.domain);
    let dom = &e.domain;

    if dom.kind == DomainKind::EuclideanSpace {
        if contains_smooth(&e) {
            let recipe = ObstructionRecipe {
                violated: Inequality::new(ExtRational::Infinity, Relation::Lt, ExtRational::Infinity, "domain is bounded"),
                construction: Construction::SmoothTranslates,
                predicted_exponent: q(1, 2).into(),
                mode: RatioMode::Cotype2,
                variable: ScanVariable::LogN,
                params: ScanParams {
                    dim: dom.dim.unwrap_or(1),
                    s: Q::zero(),
                    t: Q::zero(),
                    p1: ExtRational::Infinity,
                    p2: ExtRational::Infinity,
                },
                source: e.clone(),
                target: tspec,
                packing_exponent: None,
                estimated: false,
            };
            return Ok(Verdict::infeasible(RuleId::T1, recipe));
        }
        return Ok(Verdict::undetermined(Some(RuleId::T1), "space is not known to contain all smooth functions"));
    }
    if dom.kind == DomainKind::SequenceIndex {
        let f = SpaceSpec::new(Family::SequenceLp { p: ExtRational::Infinity }, dom.clone());
        return decide(&e, &f);
    }

    let ev = embeds(&e, &tspec)?;
    if ev.status == EmbedStatus::Fails {
        return Err(DecideError::Precondition(format!("{e} -> {tspec}")));
    }

    if let Family::Holder { alpha } = &e.family {
        return holder_core(&e, &tspec, fin(alpha), Q::zero(), RuleId::T3);
    }
    let d = dom.dim.unwrap_or(1);
    let dq = qi(d as i64);
    let half_d = q(d as i64, 2);

    if let Family::MixedSobolev { set, p } = &e.family {
        let s = qi(set.order() as i64);
        if s < &dq * inv(p) || ev.status != EmbedStatus::Holds {
            return Ok(Verdict::undetermined(Some(RuleId::T4), "needs |A| >= d/p and an established embedding"));
        }
        let threshold = pos_q(&dq * inv(p) - &half_d) + &half_d;
        if s < threshold {
            return Ok(Verdict::infeasible(RuleId::T4, bounded_recipe(&e, &tspec, &s, p, d)));
        }
        return Ok(Verdict::undetermined(Some(RuleId::T4), "only the necessary side is known for mixed smoothness"));
    }

    let e2 = rewrite(&e, true);
    let Some((_, s, p)) = btl(&e2) else {
        return Ok(Verdict::undetermined(None, "no rule covers this space"));
    };
    if !dom.is_smooth_bounded() {
        return Ok(Verdict::undetermined(Some(RuleId::T2), "needs a bounded smooth domain"));
    }
    if !s.is_positive() || s <= &dq * inv(&p) {
        return Ok(Verdict::undetermined(Some(RuleId::T2), "needs s > d/p"));
    }
    let a = pos_q(&dq * inv(&p) - &half_d);
    let threshold = &a + &half_d;
    if s > threshold {
        let interval = UInterval::open(half_d, &s - &a);
        let mid = SpaceSpec::hilbert_sobolev(interval.midpoint(), dom.clone());
        let chain = confirmed_chain(vec![e.clone(), mid, tspec], Some(interval))?;
        return Ok(feasible_or_unknown(RuleId::T2, chain));
    }
    if s == threshold {
        return Ok(Verdict::borderline(RuleId::T2, format!("s = {threshold} sits on the threshold")));
    }
    Ok(Verdict::infeasible(RuleId::T2, bounded_recipe(&e, &tspec, &s, &p, d)))
}

/// The exact `u`-interval of a Feasible verdict.
pub fn admissible_u_interval(e: &SpaceSpec, f: &SpaceSpec) -> Result<UInterval, DecideError> {
    let v = decide(e, f)?;
    match (v.status, v.witness.and_then(|w| w.u_interval)) {
        (Status::Feasible, Some(i)) => Ok(i),
        (status, _) => Err(DecideError::NotFeasible(status)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::param::DomainSpec;

    fn lp(p: &str) -> SpaceSpec {
        SpaceSpec::new(Family::SequenceLp { p: p.parse().unwrap() }, DomainSpec::sequence())
    }

    #[test]
    fn l1_to_linf_through_l2() {
        let v = decide(&lp("1"), &lp("inf")).unwrap();
        assert_eq!(v.status, Status::Feasible);
        let w = v.witness.unwrap();
        assert_eq!(w.links, vec![lp("1"), lp("2"), lp("inf")]);
        assert_eq!(w.hilbert_index, 1);
    }

    #[test]
    fn l3_to_l4_is_infeasible() {
        let v = decide(&lp("3"), &lp("4")).unwrap();
        assert_eq!(v.status, Status::Infeasible);
        let o = v.obstruction.unwrap();
        assert_eq!(o.predicted_exponent, ExtRational::ratio(1, 6));
        assert!(!o.violated.is_satisfied());
    }

    #[test]
    fn slobodeckij_example() {
        let dom = DomainSpec::cube(2);
        let e = SpaceSpec::slobodeckij(q(11, 5), two(), dom.clone());
        let f = SpaceSpec::slobodeckij(q(3, 10), two(), dom);
        let v = decide(&e, &f).unwrap();
        assert_eq!(v.status, Status::Feasible);
        assert_eq!(v.witness.unwrap().u_interval.unwrap(), UInterval::open(q(3, 10), q(11, 5)));
    }

    #[test]
    fn tl_interval_drops_endpoints() {
        let dom = DomainSpec::cube(2);
        let e = SpaceSpec::tl(qi(2), two(), two(), dom.clone());
        let f = SpaceSpec::tl(qi(1), two(), two(), dom);
        let i = admissible_u_interval(&e, &f).unwrap();
        assert_eq!(i, UInterval::open(qi(1), qi(2)));
    }

    #[test]
    fn slobodeckij_p1_interval() {
        let dom = DomainSpec::cube(1);
        let e = SpaceSpec::slobodeckij(q(3, 2), ExtRational::int(1), dom.clone());
        let f = SpaceSpec::slobodeckij(Q::zero(), two(), dom);
        assert_eq!(admissible_u_interval(&e, &f).unwrap(), UInterval::open(Q::zero(), qi(1)));
    }

    #[test]
    fn besov_sup_indices_interval() {
        let dom = DomainSpec::cube(1);
        let inf = ExtRational::Infinity;
        let e = SpaceSpec::besov(qi(2), inf.clone(), inf.clone(), dom.clone());
        let f = SpaceSpec::besov(q(1, 2), inf.clone(), inf, dom);
        assert_eq!(admissible_u_interval(&e, &f).unwrap(), UInterval::open(qi(1), qi(2)));
    }

    #[test]
    fn holder_into_sup() {
        let v = decide_bounded_target(&SpaceSpec::holder(qi(1), DomainSpec::cube(1)), BoundedTarget::SupSpace).unwrap();
        assert_eq!(v.status, Status::Feasible);
        assert_eq!(v.witness.unwrap().u_interval.unwrap(), UInterval::open(q(1, 2), qi(1)));
        let v = decide_bounded_target(&SpaceSpec::holder(qi(1), DomainSpec::cube(3)), BoundedTarget::SupSpace).unwrap();
        assert_eq!(v.status, Status::Infeasible);
        assert_eq!(v.obstruction.unwrap().predicted_exponent, ExtRational::ratio(1, 2));
        let v = decide_bounded_target(&SpaceSpec::holder(qi(1), DomainSpec::cube(2)), BoundedTarget::SupSpace).unwrap();
        assert_eq!(v.status, Status::Borderline);
    }

    #[test]
    fn smooth_on_whole_space() {
        let e = SpaceSpec::new(Family::Smooth, DomainSpec::whole_space(1));
        let v = decide_bounded_target(&e, BoundedTarget::SupSpace).unwrap();
        assert_eq!(v.status, Status::Infeasible);
        assert_eq!(v.rule, Some(RuleId::T1));
    }

    #[test]
    fn failing_embedding_is_an_error() {
        let dom = DomainSpec::cube(3);
        let e = SpaceSpec::new(Family::Sobolev { s: ExtRational::int(1), p: two() }, dom.clone());
        let f = SpaceSpec::new(Family::Sobolev { s: ExtRational::int(0), p: ExtRational::int(8) }, dom);
        assert!(matches!(decide(&e, &f), Err(DecideError::Precondition(_))));
    }

    #[test]
    fn hilbert_identity() {
        let dom = DomainSpec::cube(2);
        let e = SpaceSpec::slobodeckij(q(3, 2), two(), dom);
        let v = decide(&e, &e).unwrap();
        assert_eq!(v.status, Status::Feasible);
        assert_eq!(v.rule, Some(RuleId::D0));
    }
}
