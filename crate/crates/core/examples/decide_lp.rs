//! Sequence spaces: which `l_p -> l_q` pairs admit a Hilbert space in between.
use rkhs_sandwich::decide::decide;
use rkhs_sandwich::param::{DomainSpec, Family, SpaceSpec};

fn main() {
    let seq = DomainSpec::sequence();
    for (a, b) in [("1", "inf"), ("1", "2"), ("3", "4"), ("3/2", "3"), ("1", "3/2")] {
        let e = SpaceSpec::new(format!("lp:{a}").parse::<Family>().unwrap(), seq.clone());
        let f = SpaceSpec::new(format!("lp:{b}").parse::<Family>().unwrap(), seq.clone());
        let v = decide(&e, &f).unwrap();
        print!("l_{a} -> l_{b}: {}", v.status);
        if let Some(w) = &v.witness {
            print!("  via {}", w.links[w.hilbert_index].family);
        }
        if let Some(r) = &v.obstruction {
            print!("  blow-up exponent {}", r.predicted_exponent);
        }
        println!();
    }
}
