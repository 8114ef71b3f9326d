//! Hölder spaces on cubes, into the bounded functions and into each other.
use rkhs_sandwich::decide::{decide, decide_bounded_target, BoundedTarget};
use rkhs_sandwich::param::{q, DomainSpec, SpaceSpec};

fn main() {
    for d in 1..=3 {
        let dom = DomainSpec::cube(d);
        let v = decide_bounded_target(&SpaceSpec::holder(q(1, 1), dom.clone()), BoundedTarget::SupSpace).unwrap();
        println!("C^1 on cube:{d} -> sup: {} [{:?}]", v.status, v.rule);
    }
    let dom = DomainSpec::cube(1);
    for (a, b) in [(q(1, 1), q(1, 4)), (q(1, 1), q(1, 2)), (q(3, 4), q(1, 2))] {
        let v = decide(&SpaceSpec::holder(a.clone(), dom.clone()), &SpaceSpec::holder(b.clone(), dom.clone())).unwrap();
        println!("C^{a} -> C^{b} on cube:1: {}", v.status);
    }
}
