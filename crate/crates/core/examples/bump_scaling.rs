//! `||d_alpha h_delta||_p` for a scaled smooth bump, against the predicted `delta^(d/p - |alpha|)`.
use rkhs_sandwich::lab::{lp_norm_patterns, BumpFamily, QuadratureConfig};

fn main() {
    let cfg = QuadratureConfig::default();
    let d = 2;
    for (alpha, p) in [(vec![0, 0], 2.0), (vec![1, 0], 2.0), (vec![1, 1], 4.0)] {
        let order: u32 = alpha.iter().sum();
        let mut prev: Option<(f64, f64)> = None;
        for delta in [0.25, 0.125, 0.0625] {
            let fam = BumpFamily::smooth_with_centers(d, delta, vec![vec![0.5, 0.5]]).unwrap();
            let v = lp_norm_patterns(&fam, &alpha, p, &[vec![1.0]], &cfg).unwrap()[0];
            if let Some((pd, pv)) = prev {
                let slope = (v / pv).ln() / (delta / pd).ln();
                println!("alpha {alpha:?} p {p}: delta {delta} norm {v:.4e} local exponent {slope:.4}");
            }
            prev = Some((delta, v));
        }
        println!("  predicted {}", d as f64 / p - order as f64);
    }
}
