//! Packing counts of cubes under d(x,y)^alpha and the fitted exponent.
use rkhs_sandwich::packing::{alpha_transform_check, exact_packing, exponent_fit, greedy_packing};
use rkhs_sandwich::param::DomainSpec;

fn main() {
    let deltas = [0.25, 0.125, 0.0625];
    for d in 1..=3 {
        let dom = DomainSpec::cube(d);
        let counts: Vec<usize> = deltas.iter().map(|&x| greedy_packing(&dom, x, 1.0).unwrap().count).collect();
        let fit = exponent_fit(&dom, &deltas, 1.0).unwrap();
        println!("cube:{d} counts {counts:?} slope {:.3}", fit.slope);
    }
    let dom = DomainSpec::cube(1);
    let g = greedy_packing(&dom, 0.25, 1.0).unwrap().count;
    let x = exact_packing(&dom, 0.25, 1.0).unwrap().count;
    println!("cube:1 at 1/4: greedy {g}, exact {x}");
    let ok = alpha_transform_check(&DomainSpec::cube(2), 0.125, 0.5).unwrap();
    println!("P(d^1/2, 1/8) = P(d, 1/64) on cube:2: {ok}");
}
