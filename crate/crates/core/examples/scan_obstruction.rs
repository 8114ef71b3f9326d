//! Exhibit the blow-up behind two infeasible verdicts.
use rkhs_sandwich::decide::decide;
use rkhs_sandwich::lab::{scan, QuadratureConfig, ScanSpec};
use rkhs_sandwich::param::{q, DomainSpec, ExtRational, Family, SpaceSpec};

fn main() {
    let cfg = QuadratureConfig::fast();
    let seq = DomainSpec::sequence();
    let e = SpaceSpec::new(Family::SequenceLp { p: ExtRational::int(3) }, seq.clone());
    let f = SpaceSpec::new(Family::SequenceLp { p: ExtRational::int(4) }, seq);
    let cases = [
        (e, f, ScanSpec::ns(&[4, 16, 64, 256])),
        (
            SpaceSpec::slobodeckij(q(3, 4), ExtRational::int(4), DomainSpec::cube(2)),
            SpaceSpec::slobodeckij(q(1, 2), ExtRational::int(4), DomainSpec::cube(2)),
            ScanSpec::deltas(vec![0.125, 0.0625, 0.03125]),
        ),
    ];
    for (e, f, spec) in cases {
        let v = decide(&e, &f).unwrap();
        let Some(recipe) = v.obstruction else {
            println!("{} -> {}: {}, nothing to scan", e.family, f.family, v.status);
            continue;
        };
        let s = scan(&recipe, &spec, &cfg).unwrap();
        println!("{} -> {}: predicted {}, fitted slope {:.4}", e.family, f.family, recipe.predicted_exponent, s.slope);
        print!("{}", s.to_csv());
    }
}
