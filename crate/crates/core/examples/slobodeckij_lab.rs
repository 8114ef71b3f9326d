//! Slobodeckij decisions next to a numerical seminorm.
use rkhs_sandwich::decide::decide;
use rkhs_sandwich::lab::{slobodeckij_seminorm, BoxRegion, QuadratureConfig};
use rkhs_sandwich::param::{q, DomainSpec, ExtRational, SpaceSpec};

fn main() {
    let dom = DomainSpec::cube(2);
    let two = ExtRational::int(2);
    for (s, p1, t, p2) in [(q(11, 5), two.clone(), q(3, 10), two.clone()), (q(3, 2), ExtRational::int(1), q(0, 1), two.clone()), (q(3, 4), ExtRational::int(4), q(1, 2), ExtRational::int(4))] {
        let e = SpaceSpec::slobodeckij(s, p1, dom.clone());
        let f = SpaceSpec::slobodeckij(t, p2, dom.clone());
        let v = decide(&e, &f).unwrap();
        println!("{} -> {}: {}", e.family, f.family, v.status);
        if let Some(iv) = v.witness.and_then(|w| w.u_interval) {
            println!("  admissible u between {} and {}", iv.lower, iv.upper);
        }
    }
    // |x|_{W^{1/2}_2(0,1)} for g(x) = x is exactly 1.
    let cfg = QuadratureConfig::default();
    let v = slobodeckij_seminorm(&|x: &[f64]| x[0], 0.5, 2.0, &BoxRegion::unit(1), &cfg).unwrap();
    println!("seminorm of x on (0,1), theta = 1/2: {v:.6}");
    let w = slobodeckij_seminorm(&|x: &[f64]| (x[0] * x[1]).sin(), 0.25, 2.0, &BoxRegion::unit(2), &QuadratureConfig::fast()).unwrap();
    println!("seminorm of sin(xy) on (0,1)^2, theta = 1/4: {w:.5}");
}
