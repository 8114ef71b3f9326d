//! Property suites for the invariants of each module.

use num_traits::{Signed, Zero};
use proptest::prelude::*;

use rkhs_sandwich::decide::{decide, Status};
use rkhs_sandwich::embedding::{embeds, rewrite_identifications, EmbedStatus};
use rkhs_sandwich::irkbs::{
    check_applicability, check_with_normalizer, split_series, Applicability, MeasureClass, Normalizer, SeriesSpec,
};
use rkhs_sandwich::lab::bump::{multi_indices, richardson_partial};
use rkhs_sandwich::lab::{lp_norm_patterns, scan, sign_patterns, BumpFamily, QuadratureConfig, ScanSpec, SmoothBump};
use rkhs_sandwich::packing::{greedy_indices, greedy_packing, Candidates};
use rkhs_sandwich::param::{
    coherent_closure, deficiency, pos_part, q, validate_space, DomainSpec, ExtRational, Family, SpaceSpec, Q,
};

fn rational(lo: i64, hi: i64, den: i64) -> impl Strategy<Value = Q> {
    (lo..=hi, 1..=den).prop_map(|(n, d)| q(n, d))
}

/// Integrability index in `[1, inf]`.
fn index() -> impl Strategy<Value = ExtRational> {
    prop_oneof![
        4 => (1i64..=4, 1i64..=3).prop_map(|(a, b)| ExtRational::Finite(q(a + b, b))),
        1 => Just(ExtRational::inf()),
    ]
}

fn finite_index() -> impl Strategy<Value = ExtRational> {
    (0i64..=8, 1i64..=4).prop_map(|(a, b)| ExtRational::Finite(q(a + b, b)))
}

fn smoothness() -> impl Strategy<Value = Q> {
    (0i64..=24).prop_map(|k| q(k, 4))
}

fn btl(d: u32) -> impl Strategy<Value = SpaceSpec> {
    let dom = DomainSpec::cube(d);
    prop_oneof![
        (smoothness(), index(), index()).prop_map({
            let dom = dom.clone();
            move |(s, p, r)| SpaceSpec::besov(s, p, r, dom.clone())
        }),
        (smoothness(), finite_index(), index()).prop_map({
            let dom = dom.clone();
            move |(s, p, r)| SpaceSpec::tl(s, p, r, dom.clone())
        }),
        (smoothness(), finite_index()).prop_map(move |(s, p)| SpaceSpec::slobodeckij(s, p, dom.clone())),
    ]
}

fn two() -> ExtRational {
    ExtRational::int(2)
}

proptest! {
    #[test]
    fn pos_parts_sum_to_abs(x in rational(-40, 40, 9)) {
        let e = ExtRational::Finite(x.clone());
        let n = ExtRational::Finite(-x.clone());
        let sum = pos_part(&e).add(&pos_part(&n));
        prop_assert_eq!(sum, ExtRational::Finite(x.abs()));
    }

    #[test]
    fn deficiency_cases(p1 in index(), p2 in index(), d in 1u32..=5) {
        prop_assert_eq!(deficiency(&two(), &two(), d).unwrap(), ExtRational::zero());
        let dq = Q::from_integer(d.into());
        let half = q(1, 2);
        let a = &dq * (p1.recip().finite().unwrap() - &half);
        let b = &dq * (&half - p2.recip().finite().unwrap());
        let def = deficiency(&p1, &p2, d).unwrap();
        if a.is_positive() && b.is_positive() {
            let want = &dq * (p1.recip().finite().unwrap() - p2.recip().finite().unwrap());
            prop_assert_eq!(def.clone(), ExtRational::Finite(want));
        }
        prop_assert!(def >= ExtRational::zero());
    }

    #[test]
    fn coherent_closure_idempotent_and_monotone(
        a in prop::collection::vec(prop::collection::vec(0u32..4, 3), 1..4),
        b in prop::collection::vec(prop::collection::vec(0u32..4, 3), 0..3),
    ) {
        let ca = coherent_closure(&a, 3).unwrap();
        let again: Vec<Vec<u32>> = ca.elements().iter().cloned().collect();
        prop_assert_eq!(coherent_closure(&again, 3).unwrap(), ca.clone());
        let mut ab = a.clone();
        ab.extend(b);
        let cab = coherent_closure(&ab, 3).unwrap();
        prop_assert!(cab.is_superset(&ca));
        prop_assert!(cab.is_coherent());
    }

    #[test]
    fn embedding_reflexive_and_rewrite_idempotent(d in 1u32..=4, e in (1u32..=4).prop_flat_map(btl)) {
        let e = SpaceSpec::new(e.family, DomainSpec::cube(d));
        prop_assume!(validate_space(e.clone()).is_ok());
        prop_assert_eq!(embeds(&e, &e).unwrap().status, EmbedStatus::Holds);
        if let Ok(r) = rewrite_identifications(&e) {
            prop_assert_eq!(rewrite_identifications(&r).unwrap(), r);
        }
    }

    #[test]
    fn tl_monotone_in_source_smoothness(
        s in smoothness(), extra in smoothness(), p in finite_index(), r in index(),
        f in btl(2),
    ) {
        let dom = DomainSpec::cube(2);
        let e = SpaceSpec::tl(s.clone(), p.clone(), r.clone(), dom.clone());
        let e2 = SpaceSpec::tl(s + extra, p, r, dom);
        prop_assume!(validate_space(e.clone()).is_ok() && validate_space(f.clone()).is_ok());
        if embeds(&e, &f).map(|v| v.status == EmbedStatus::Holds).unwrap_or(false) {
            prop_assert_eq!(embeds(&e2, &f).unwrap().status, EmbedStatus::Holds);
        }
    }

    #[test]
    fn slobodeckij_threshold_trichotomy(
        d in 1u32..=4, s in smoothness(), t in smoothness(), p1 in finite_index(), p2 in finite_index(),
    ) {
        let dom = DomainSpec::cube(d);
        let e = SpaceSpec::slobodeckij(s.clone(), p1.clone(), dom.clone());
        let f = SpaceSpec::slobodeckij(t.clone(), p2.clone(), dom.clone());
        // The rule is stated for t < s only.
        prop_assume!(s > t);
        prop_assume!(embeds(&e, &f).map(|v| v.status == EmbedStatus::Holds).unwrap_or(false));
        let Ok(v) = decide(&e, &f) else { return Ok(()) };
        let gap = ExtRational::Finite(&s - &t);
        let def = deficiency(&p1, &p2, d).unwrap();
        let want = if gap > def {
            Status::Feasible
        } else if gap < def {
            Status::Infeasible
        } else {
            Status::Borderline
        };
        prop_assert_eq!(v.status, want, "{} -> {}", e, f);
        if want == Status::Borderline {
            let bumped = SpaceSpec::slobodeckij(s + q(1, 1000), p1, dom);
            prop_assert_eq!(decide(&bumped, &f).unwrap().status, Status::Feasible);
        }
    }

    #[test]
    fn feasible_chains_replay(d in 1u32..=4, e in (1u32..=4).prop_flat_map(btl), f in (1u32..=4).prop_flat_map(btl)) {
        let e = SpaceSpec::new(e.family, DomainSpec::cube(d));
        let f = SpaceSpec::new(f.family, DomainSpec::cube(d));
        let Ok(v) = decide(&e, &f) else { return Ok(()) };
        match v.status {
            Status::Feasible => {
                let w = v.witness.unwrap();
                prop_assert!(w.links[w.hilbert_index].is_hilbert());
                for l in w.links.windows(2) {
                    prop_assert_eq!(embeds(&l[0], &l[1]).unwrap().status, EmbedStatus::Holds);
                }
            }
            Status::Infeasible => {
                let r = v.obstruction.unwrap();
                prop_assert!(r.predicted_exponent > ExtRational::zero());
            }
            _ => {}
        }
    }

    #[test]
    fn holder_feasible_respects_packing(a in 1i64..=8, b in 1i64..=8, k in 1u32..=3) {
        prop_assume!(b < a);
        let dom = DomainSpec::cube(k);
        let v = decide(&SpaceSpec::holder(q(a, 8), dom.clone()), &SpaceSpec::holder(q(b, 8), dom)).unwrap();
        if v.status == Status::Feasible {
            prop_assert!(2 * (a - b) >= 8 * k as i64);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn lp_recipes_are_scannable(p in index(), r in index()) {
        let seq = DomainSpec::sequence();
        let e = SpaceSpec::new(Family::SequenceLp { p: p.clone() }, seq.clone());
        let f = SpaceSpec::new(Family::SequenceLp { p: r.clone() }, seq);
        prop_assume!(p <= r);
        let v = decide(&e, &f).unwrap();
        if v.status == Status::Infeasible {
            let rec = v.obstruction.unwrap();
            prop_assert!(rec.predicted_exponent > ExtRational::zero());
            let s = scan(&rec, &ScanSpec::ns(&[4, 8, 16]), &QuadratureConfig::default()).unwrap();
            prop_assert!(s.slope > 0.0);
        }
    }

    #[test]
    fn derivative_matches_richardson(d in 1u32..=2, pick in 0usize..6, x in prop::collection::vec(-0.75f64..0.75, 2), j in 0usize..2) {
        let j = j % d as usize;
        let x = &x[..d as usize];
        prop_assume!(x.iter().map(|v| v * v).sum::<f64>() < 0.7);
        let alphas = multi_indices(d, 1);
        let alpha = alphas[pick % alphas.len()].clone();
        let f = SmoothBump::new(d);
        let lower = f.derivative(&alpha);
        let mut up = alpha.clone();
        up[j] += 1;
        let exact = f.eval_derivative(&up, x);
        let fd = richardson_partial(&|y| lower.eval(y), x, j, 1e-2);
        prop_assert!((exact - fd).abs() <= 1e-6 * exact.abs().max(1e-2), "{} vs {}", exact, fd);
    }

    #[test]
    fn packing_centers_are_separated(d in 1u32..=2, k in 2i64..=12, a in 1i64..=4) {
        let delta = 1.0 / k as f64;
        let alpha = a as f64 / 4.0;
        let dom = DomainSpec::cube(d);
        let Ok(r) = greedy_packing(&dom, delta, alpha) else { return Ok(()) };
        for i in 0..r.centers.len() {
            for j in 0..i {
                let dist: f64 = r.centers[i].iter().zip(&r.centers[j]).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
                prop_assert!(dist.powf(alpha) >= delta * (1.0 - 1e-9));
            }
            prop_assert!(r.centers[i].iter().all(|&c| c > 0.0 && c < 1.0));
        }
        if let Ok(finer) = greedy_packing(&dom, delta / 2.0, alpha) {
            prop_assert!(finer.count >= r.count);
        }
    }

    #[test]
    fn greedy_monotone_on_one_grid(n in 8usize..40, r1 in 1usize..8, r2 in 1usize..8) {
        // Shared 1-d candidate table; separation radius in grid steps.
        let table: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| (i as f64 - j as f64).abs()).collect()).collect();
        let (small, large) = (r1.min(r2) as f64, r1.max(r2) as f64);
        let c_small = Candidates::Table { table: table.clone(), radius: small };
        let c_large = Candidates::Table { table, radius: large };
        prop_assert!(greedy_indices(&c_small).len() >= greedy_indices(&c_large).len());
    }

    #[test]
    fn split_reconstructs(coeffs in prop::collection::vec(rational(-9, 9, 7), 2..12), rho in 0.05f64..0.5) {
        prop_assume!(coeffs.iter().any(|c| !c.is_zero()));
        let s = SeriesSpec::new(coeffs.clone(), Some(rho)).unwrap();
        let (p, m) = split_series(&s);
        for i in 0..coeffs.len() {
            prop_assert_eq!(&p[i] - &m[i], coeffs[i].clone());
            prop_assert!((&p[i] * &m[i]).is_zero());
        }
    }

    #[test]
    fn applicability_monotone_in_radius(r1 in 0.05f64..1.4, r2 in 0.05f64..1.4) {
        let (small, large) = (r1.min(r2), r1.max(r2));
        let all = MeasureClass::AllFiniteSigned;
        let g = |r: f64| check_applicability(&SeriesSpec::geometric(q(1, 2), 16, Some(r)).unwrap(), &all);
        if let Ok(big) = g(large) {
            if big.lemma_applicable == Applicability::YesBoundedKernels {
                prop_assert_eq!(g(small).unwrap().lemma_applicable, Applicability::YesBoundedKernels);
            }
        }
    }

    #[test]
    fn normalizer_reduction_agrees(sup in 0.1f64..5.0, constant in prop::bool::ANY, radius in prop::option::of(0.1f64..2.0)) {
        let s = SeriesSpec::cosine(24, radius).unwrap();
        let beta = Normalizer { label: "beta".into(), sup_abs: sup, constant: constant.then_some(sup) };
        for m in [MeasureClass::AllFiniteSigned, MeasureClass::Restricted("compactly supported".into())] {
            let direct = check_applicability(&s, &m).unwrap();
            let reduced = check_with_normalizer(&s, &m, &beta).unwrap();
            prop_assert_eq!(direct.lemma_applicable, reduced.lemma_applicable);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn rademacher_sign_independent_for_disjoint_bumps(d in 1u32..=2, k in 0usize..3, p in prop::sample::select(vec![1.0, 2.0, 3.0])) {
        let delta = [0.25, 0.2, 0.125][k];
        let fam = BumpFamily::smooth_packing(d, delta).unwrap();
        let n = fam.len().min(8);
        let fam = fam.truncate(n);
        let pats = sign_patterns(n).unwrap();
        let vals = lp_norm_patterns(&fam, &vec![0; d as usize], p, &pats, &QuadratureConfig::default()).unwrap();
        for v in &vals {
            prop_assert!((v - vals[0]).abs() <= 1e-9 * vals[0]);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn reports_round_trip_and_are_deterministic(vals in prop::collection::vec(prop::sample::select(vec!["1", "4/3", "2", "5/2", "4", "inf"]), 1..4)) {
        use rkhs_sandwich::report::{decision_table, Payload, Report};
        let vals: Vec<String> = vals.into_iter().map(String::from).collect();
        let mk = || {
            let t = decision_table("lp:{}", "lp:{}", "seq", &vals).unwrap();
            Report::new("table", Default::default(), Payload::Table { table: t }).to_json().unwrap()
        };
        let a = mk();
        prop_assert_eq!(&a, &mk());
        let back = Report::from_json(&a).unwrap();
        prop_assert_eq!(back.to_json().unwrap(), a);
    }
}
