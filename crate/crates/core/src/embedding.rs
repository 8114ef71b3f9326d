//! Three-valued oracle for continuous embeddings `E -> F`.

use num_traits::Signed;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::param::{inv, q, qi, validate_space, DomainKind, ExtRational, Family, SpaceSpec, ValidationError, Q};
use crate::rules::RuleId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EmbedStatus {
    Holds,
    Fails,
    Undetermined,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbedVerdict {
    pub status: EmbedStatus,
    pub rule: Option<RuleId>,
    /// True when a family identification was applied before matching.
    pub identified: bool,
    pub reason: Option<String>,
    pub chain: Option<Vec<SpaceSpec>>,
}

impl EmbedVerdict {
    fn holds(rule: RuleId) -> Self {
        EmbedVerdict { status: EmbedStatus::Holds, rule: Some(rule), identified: false, reason: None, chain: None }
    }

    fn fails(rule: RuleId, reason: impl Into<String>) -> Self {
        EmbedVerdict {
            status: EmbedStatus::Fails,
            rule: Some(rule),
            identified: false,
            reason: Some(reason.into()),
            chain: None,
        }
    }

    fn unknown(reason: impl Into<String>) -> Self {
        EmbedVerdict {
            status: EmbedStatus::Undetermined,
            rule: None,
            identified: false,
            reason: Some(reason.into()),
            chain: None,
        }
    }

    fn with_chain(mut self, chain: Vec<SpaceSpec>) -> Self {
        self.chain = Some(chain);
        self
    }

    fn identified(mut self, yes: bool) -> Self {
        self.identified = yes;
        self
    }

    pub fn is_holds(&self) -> bool {
        self.status == EmbedStatus::Holds
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EmbedError {
    #[error("spaces live on different domains: {left} vs {right}")]
    DomainMismatch { left: String, right: String },
    #[error("invalid space: {0}")]
    Invalid(#[from] ValidationError),
    #[error("{0} has no Besov/Triebel-Lizorkin identification")]
    NotIdentifiable(String),
}

fn one() -> ExtRational {
    ExtRational::int(1)
}

/// Canonical Besov/TL form of Sobolev, Slobodeckij, Hölder and diagonal Besov specs.
///
/// Hölder spaces are rewritten only on the cube and the ball. For `a = 1` the rewrite
/// is an inclusion rather than an identity, which is why [`embeds`] never uses it for
/// that exponent.
pub fn rewrite_identifications(spec: &SpaceSpec) -> Result<SpaceSpec, EmbedError> {
    if let Family::Slobodeckij { s, p } = &spec.family {
        if s.is_integer() && *p == one() {
            return Err(EmbedError::NotIdentifiable(spec.to_string()));
        }
    }
    let spec = validate_space(spec.clone())?;
    Ok(rewrite(&spec, true))
}

pub(crate) fn rewrite(spec: &SpaceSpec, holder_one: bool) -> SpaceSpec {
    let dom = spec.domain.clone();
    let two = ExtRational::int(2);
    let fam = match &spec.family {
        Family::Slobodeckij { s, p } => {
            let fine = if s.is_integer() { two } else { p.clone() };
            Family::TriebelLizorkin { s: s.clone(), p: p.clone(), q: fine }
        }
        Family::Sobolev { s, p } if *p > one() => Family::TriebelLizorkin { s: s.clone(), p: p.clone(), q: two },
        Family::Holder { alpha } if dom.is_smooth_bounded() && (holder_one || *alpha < one()) => Family::Besov {
            s: alpha.clone(),
            p: ExtRational::Infinity,
            q: ExtRational::Infinity,
        },
        Family::Besov { s, p, q } if p == q && !p.is_inf() => {
            Family::TriebelLizorkin { s: s.clone(), p: p.clone(), q: q.clone() }
        }
        Family::SupSpace if dom.kind == DomainKind::SequenceIndex => Family::SequenceLp { p: ExtRational::Infinity },
        other => other.clone(),
    };
    SpaceSpec::new(fam, dom)
}

fn same_domain(e: &SpaceSpec, f: &SpaceSpec) -> Result<(), EmbedError> {
    if e.domain != f.domain {
        return Err(EmbedError::DomainMismatch { left: e.domain.to_string(), right: f.domain.to_string() });
    }
    Ok(())
}

fn fin(x: &ExtRational) -> Q {
    x.finite().cloned().expect("smoothness is finite after validation")
}

/// `(s, p)` when the spec is an integer-order classical Sobolev space given as such.
fn classical_sobolev(spec: &SpaceSpec) -> Option<(Q, ExtRational)> {
    match &spec.family {
        Family::Sobolev { s, p } => Some((fin(s), p.clone())),
        Family::MixedSobolev { set, p } if set.is_isotropic() => Some((qi(set.order() as i64), p.clone())),
        _ => None,
    }
}

/// Integer-order member of the TL scale with `q = 2` and `1 < p < inf`, i.e. a classical Sobolev space.
fn tl_sobolev_member(spec: &SpaceSpec) -> Option<(Q, ExtRational)> {
    match &spec.family {
        Family::TriebelLizorkin { s, p, q } if s.is_integer() && *q == ExtRational::int(2) && *p > one() && !p.is_inf() => {
            Some((fin(s), p.clone()))
        }
        _ => None,
    }
}

fn sobolev_iff(s: &Q, p1: &ExtRational, t: &Q, p2: &ExtRational, d: u32) -> bool {
    let gap = qi(d as i64) * (inv(p1) - inv(p2));
    s >= t && (s - t) >= gap
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Scale {
    B,
    F,
}

struct Btl {
    kind: Scale,
    s: Q,
    p: ExtRational,
    q: ExtRational,
}

fn as_btl(spec: &SpaceSpec) -> Option<Btl> {
    match &spec.family {
        Family::Besov { s, p, q } => Some(Btl { kind: Scale::B, s: fin(s), p: p.clone(), q: q.clone() }),
        Family::TriebelLizorkin { s, p, q } => Some(Btl { kind: Scale::F, s: fin(s), p: p.clone(), q: q.clone() }),
        _ => None,
    }
}

fn btl_spec(kind: Scale, s: Q, p: ExtRational, q: ExtRational, spec: &SpaceSpec) -> SpaceSpec {
    let fam = match kind {
        Scale::B => Family::Besov { s: s.into(), p, q },
        Scale::F => Family::TriebelLizorkin { s: s.into(), p, q },
    };
    SpaceSpec::new(fam, spec.domain.clone())
}

fn btl_rule(e: &SpaceSpec, f: &SpaceSpec, a: &Btl, b: &Btl, d: u32) -> EmbedVerdict {
    let gap = qi(d as i64) * (inv(&a.p) - inv(&b.p));
    if a.s > b.s {
        let diff = &a.s - &b.s;
        return match (a.kind, b.kind) {
            (Scale::F, Scale::F) if diff >= gap => EmbedVerdict::holds(RuleId::R1),
            (Scale::B, Scale::B) if diff > gap => EmbedVerdict::holds(RuleId::R2),
            (Scale::F, Scale::B) | (Scale::B, Scale::F) if diff > gap => EmbedVerdict::holds(RuleId::R5),
            _ => EmbedVerdict::unknown("smoothness gap below the integrability cost"),
        };
    }
    if a.s == b.s && a.kind == b.kind {
        let fine_ok = |q: &ExtRational| a.kind == Scale::B || !q.is_inf();
        if a.p >= b.p && a.q == b.q && fine_ok(&a.q) && a.p != b.p {
            return EmbedVerdict::holds(RuleId::R3);
        }
        if a.p == b.p && a.q <= b.q {
            return EmbedVerdict::holds(RuleId::R4);
        }
        if a.p > b.p && a.q < b.q && fine_ok(&a.q) {
            let mid = btl_spec(a.kind, a.s.clone(), b.p.clone(), a.q.clone(), e);
            return EmbedVerdict::holds(RuleId::R4).with_chain(vec![e.clone(), mid, f.clone()]);
        }
    }
    EmbedVerdict::unknown("no Besov/Triebel-Lizorkin rule matches")
}

/// Decides `E -> F` by the fixed rule order: identity, Hölder, classical Sobolev,
/// mixed inclusion, identifications, then the family-pair rules.
pub fn embeds(e: &SpaceSpec, f: &SpaceSpec) -> Result<EmbedVerdict, EmbedError> {
    let e = validate_space(e.clone())?;
    let f = validate_space(f.clone())?;
    same_domain(&e, &f)?;
    if e == f {
        return Ok(EmbedVerdict::holds(RuleId::R0));
    }
    let dom = &e.domain;
    let d = dom.dim.unwrap_or(0);

    match (&e.family, &f.family) {
        (Family::Holder { alpha }, Family::Holder { alpha: beta }) => {
            return Ok(if dom.bounded && alpha >= beta {
                EmbedVerdict::holds(RuleId::R7)
            } else {
                EmbedVerdict::unknown("Hölder inclusion needs a bounded space and a >= b")
            });
        }
        (Family::Holder { .. }, Family::SupSpace) => return Ok(EmbedVerdict::holds(RuleId::R7)),
        (Family::Holder { .. }, Family::ContinuousBounded) if dom.is_euclidean() => {
            return Ok(EmbedVerdict::holds(RuleId::R7))
        }
        (Family::ContinuousBounded, Family::SupSpace) => return Ok(EmbedVerdict::holds(RuleId::R10)),
        _ => {}
    }

    if dom.is_smooth_bounded() {
        if let (Some((s, p1)), Some((t, p2))) = (classical_sobolev(&e), classical_sobolev(&f)) {
            return Ok(if sobolev_iff(&s, &p1, &t, &p2, d) {
                EmbedVerdict::holds(RuleId::R6)
            } else {
                EmbedVerdict::fails(RuleId::R6, format!("needs s >= t and s - t >= d/p1 - d/p2, got s={s}, t={t}"))
            });
        }
    }

    if let (Family::MixedSobolev { set: a, p: p1 }, Family::MixedSobolev { set: b, p: p2 }) = (&e.family, &f.family) {
        return Ok(if dom.bounded && a.is_superset(b) && p1 >= p2 {
            EmbedVerdict::holds(RuleId::R12)
        } else {
            EmbedVerdict::unknown("no rule for these mixed smoothness sets")
        });
    }

    let e2 = rewrite(&e, false);
    let f2 = rewrite(&f, false);
    let identified = e2 != e || f2 != f;
    if e2 == f2 {
        return Ok(EmbedVerdict::holds(RuleId::R11).identified(true));
    }

    let v = match (&e2.family, &f2.family) {
        (Family::SequenceLp { p }, Family::SequenceLp { p: q }) => {
            if p <= q {
                EmbedVerdict::holds(RuleId::R8)
            } else {
                EmbedVerdict::unknown("l_p into l_q is only asserted for p <= q")
            }
        }
        (Family::LebesgueLp { p }, Family::LebesgueLp { p: q }) => {
            if dom.is_smooth_bounded() && q <= p {
                EmbedVerdict::holds(RuleId::R9)
            } else {
                EmbedVerdict::unknown("L_p into L_q is only asserted for q <= p on bounded domains")
            }
        }
        (_, Family::SupSpace | Family::ContinuousBounded) if dom.is_smooth_bounded() => match as_btl(&e2) {
            Some(a) if a.s.is_positive() && a.s > qi(d as i64) * inv(&a.p) => EmbedVerdict::holds(RuleId::R10),
            _ => EmbedVerdict::unknown("embedding into C^0 needs s > d/p"),
        },
        (Family::Holder { .. }, _) if dom.is_smooth_bounded() => holder_one_detour(&e, &f, &f2)?,
        _ => match (as_btl(&e2), as_btl(&f2)) {
            (Some(a), Some(b)) if dom.is_smooth_bounded() => {
                let v = btl_rule(&e, &f, &a, &b, d);
                if v.status == EmbedStatus::Undetermined {
                    sobolev_member_fail(&e2, &f2, d).unwrap_or(v)
                } else {
                    v
                }
            }
            _ => EmbedVerdict::unknown("no rule for this family pair"),
        },
    };
    Ok(v.identified(identified))
}

/// Fails branch for classical Sobolev spaces written in Triebel-Lizorkin form.
fn sobolev_member_fail(e2: &SpaceSpec, f2: &SpaceSpec, d: u32) -> Option<EmbedVerdict> {
    let (s, p1) = tl_sobolev_member(e2)?;
    let (t, p2) = tl_sobolev_member(f2)?;
    if sobolev_iff(&s, &p1, &t, &p2, d) {
        None
    } else {
        Some(EmbedVerdict::fails(RuleId::R6, "integer-order Sobolev pair violates s - t >= d/p1 - d/p2"))
    }
}

/// `C^1` is not identified with a Besov space; reach smoothness `t < 1` through `C^a'` with `t < a' < 1`.
fn holder_one_detour(e: &SpaceSpec, f: &SpaceSpec, f2: &SpaceSpec) -> Result<EmbedVerdict, EmbedError> {
    let t = match as_btl(f2) {
        Some(b) => b.s,
        None => return Ok(EmbedVerdict::unknown("no rule for this family pair")),
    };
    if t >= qi(1) {
        return Ok(EmbedVerdict::unknown("C^1 reaches only targets of smoothness below 1"));
    }
    let mid_alpha = (qi(1) + &t) * q(1, 2);
    let mid = SpaceSpec::holder(mid_alpha, e.domain.clone());
    let second = embeds(&mid, f)?;
    if !second.is_holds() {
        return Ok(EmbedVerdict::unknown("no chain through a lower Hölder space"));
    }
    let rule = second.rule.unwrap_or(RuleId::R7);
    Ok(EmbedVerdict::holds(rule).with_chain(vec![e.clone(), mid, f.clone()]))
}

/// Holds with chain `[E, G, F]` when both legs hold.
pub fn embeds_via(e: &SpaceSpec, g: &SpaceSpec, f: &SpaceSpec) -> Result<EmbedVerdict, EmbedError> {
    let a = embeds(e, g)?;
    let b = embeds(g, f)?;
    if a.is_holds() && b.is_holds() {
        let rule = b.rule.or(a.rule).unwrap_or(RuleId::R0);
        return Ok(EmbedVerdict::holds(rule).with_chain(vec![e.clone(), g.clone(), f.clone()]));
    }
    Ok(EmbedVerdict::unknown("one leg of the chain is not established"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::param::DomainSpec;

    fn sp(f: &str, dom: DomainSpec) -> SpaceSpec {
        SpaceSpec::new(f.parse().unwrap(), dom)
    }

    #[test]
    fn tl_lowering_holds_by_r1() {
        let v = embeds(&sp("tl:2:2:2", DomainSpec::cube(3)), &sp("tl:1:2:2", DomainSpec::cube(3))).unwrap();
        assert_eq!(v.status, EmbedStatus::Holds);
        assert_eq!(v.rule, Some(RuleId::R1));
    }

    #[test]
    fn sobolev_smoothness_increase_fails() {
        let v = embeds(&sp("sobolev:1:2", DomainSpec::cube(1)), &sp("sobolev:2:2", DomainSpec::cube(1))).unwrap();
        assert_eq!(v.status, EmbedStatus::Fails);
        assert_eq!(v.rule, Some(RuleId::R6));
    }

    #[test]
    fn besov_to_tl_crossing_holds() {
        let v = embeds(&sp("besov:1:inf:inf", DomainSpec::cube(2)), &sp("tl:1/2:4:4", DomainSpec::cube(2))).unwrap();
        assert_eq!(v.status, EmbedStatus::Holds);
        assert_eq!(v.rule, Some(RuleId::R5));
    }

    #[test]
    fn rewrite_examples() {
        let c = DomainSpec::cube(2);
        assert_eq!(rewrite_identifications(&sp("slobo:3/2:3", c.clone())).unwrap(), sp("tl:3/2:3:3", c.clone()));
        assert_eq!(rewrite_identifications(&sp("sobolev:2:2", c.clone())).unwrap(), sp("tl:2:2:2", c.clone()));
        assert_eq!(rewrite_identifications(&sp("holder:1/2", c.clone())).unwrap(), sp("besov:1/2:inf:inf", c.clone()));
        assert!(matches!(
            rewrite_identifications(&sp("slobo:2:1", c)),
            Err(EmbedError::NotIdentifiable(_))
        ));
    }

    #[test]
    fn rewrite_is_idempotent_on_examples() {
        let c = DomainSpec::cube(1);
        for s in ["slobo:3/2:3", "sobolev:2:2", "holder:1", "besov:1:2:2", "besov:1:2:3", "sup", "lp:2"] {
            let dom = if s.starts_with("lp") { DomainSpec::sequence() } else { c.clone() };
            let once = rewrite_identifications(&sp(s, dom)).unwrap();
            assert_eq!(rewrite_identifications(&once).unwrap(), once);
        }
    }

    #[test]
    fn fine_index_and_integrability_chain() {
        let c = DomainSpec::cube(2);
        let v = embeds(&sp("tl:1:4:2", c.clone()), &sp("tl:1:2:3", c)).unwrap();
        assert!(v.is_holds());
        let chain = v.chain.unwrap();
        assert_eq!(chain.len(), 3);
        for w in chain.windows(2) {
            let leg = embeds(&w[0], &w[1]).unwrap();
            assert!(leg.is_holds() && leg.chain.is_none());
        }
    }

    #[test]
    fn holder_one_reaches_sobolev_below_one() {
        let c = DomainSpec::cube(1);
        let w = SpaceSpec::hilbert_sobolev(q(3, 4), c.clone());
        let v = embeds(&sp("holder:1", c), &w).unwrap();
        assert!(v.is_holds());
        assert_eq!(v.chain.as_ref().map(|c| c.len()), Some(3));
    }

    #[test]
    fn sequence_and_lebesgue_rules() {
        let s = DomainSpec::sequence();
        assert_eq!(embeds(&sp("lp:1", s.clone()), &sp("lp:inf", s.clone())).unwrap().rule, Some(RuleId::R8));
        assert_eq!(embeds(&sp("lp:3", s.clone()), &sp("lp:2", s.clone())).unwrap().status, EmbedStatus::Undetermined);
        let v = embeds(&sp("lp:2", s.clone()), &sp("sup", s)).unwrap();
        assert!(v.is_holds() && v.identified);
        let c = DomainSpec::cube(2);
        assert_eq!(embeds(&sp("leb:3", c.clone()), &sp("leb:2", c)).unwrap().rule, Some(RuleId::R9));
    }

    #[test]
    fn domain_mismatch_is_an_error() {
        let e = sp("tl:2:2:2", DomainSpec::cube(2));
        let f = sp("tl:1:2:2", DomainSpec::cube(3));
        assert!(matches!(embeds(&e, &f), Err(EmbedError::DomainMismatch { .. })));
    }

    #[test]
    fn into_sup_needs_s_above_d_over_p() {
        let c = DomainSpec::cube(2);
        assert!(embeds(&sp("tl:3/2:2:2", c.clone()), &sp("sup", c.clone())).unwrap().is_holds());
        assert_eq!(embeds(&sp("tl:1:2:2", c.clone()), &sp("sup", c)).unwrap().status, EmbedStatus::Undetermined);
    }
}
