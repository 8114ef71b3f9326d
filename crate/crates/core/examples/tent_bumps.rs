//! Hölder tents: the signed sums stay in the unit ball while single tents are large in C^beta.
use rkhs_sandwich::lab::{sign_patterns, BumpFamily, TentTable};

fn main() {
    let m = 80;
    let mut sample: Vec<Vec<f64>> = (0..m * m)
        .map(|k| vec![((k % m) as f64 + 0.5) / m as f64, ((k / m) as f64 + 0.5) / m as f64])
        .collect();
    let (alpha, delta) = (0.5, 0.1);
    let fam = BumpFamily::tent_packing(2, delta, alpha).unwrap().truncate(8);
    // The supports have radius delta^(1/alpha); add each center and a ring at that radius.
    let r = delta.powf(1.0 / alpha);
    for c in &fam.centers {
        sample.push(c.clone());
        for k in 0..16 {
            let t = k as f64 * std::f64::consts::TAU / 16.0;
            sample.push(vec![c[0] + r * t.cos(), c[1] + r * t.sin()]);
        }
    }
    let table = TentTable::build(&fam, &sample, alpha).unwrap();
    let pats = sign_patterns(fam.len()).unwrap();
    let worst = pats.iter().map(|s| table.norm(s)).fold(0.0f64, f64::max);
    println!("{} tents, alpha = {alpha}, delta = {delta}", fam.len());
    println!("largest C^alpha norm over {} sign patterns: {worst:.6}", pats.len());
    for beta in [0.0, 0.25] {
        let one = TentTable::build(&fam.clone().truncate(1), &sample, beta).unwrap();
        println!("single tent in C^{beta}: {:.4} (lower bound delta^((a-b)/a) = {:.4})", one.norm(&[1.0]), delta.powf((alpha - beta) / alpha));
    }
}
