//! Decision matrices over parameter grids.
use rkhs_sandwich::report::decision_table;

fn main() {
    let v: Vec<String> = ["1", "3/2", "2", "3", "inf"].iter().map(|s| s.to_string()).collect();
    let t = decision_table("lp:{}", "lp:{}", "seq", &v).unwrap();
    println!("l_p -> l_q\n{}", t.render());
    let s: Vec<String> = ["1/2", "3/4", "3/2", "7/4", "5/2"].iter().map(|s| s.to_string()).collect();
    let t = decision_table("slobo:{}:1", "slobo:{}:2", "cube:2", &s).unwrap();
    println!("W^s_1 -> W^t_2 on cube:2\n{}", t.render());
    println!("rules used: {:?}", t.rules());
}
