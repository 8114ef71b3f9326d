//! Positive decomposition of power-series activations.
use rkhs_sandwich::irkbs::{check_applicability, check_with_normalizer, split_series, MeasureClass, Normalizer, SeriesSpec};

fn main() {
    let all = MeasureClass::AllFiniteSigned;
    let cos = SeriesSpec::cosine(12, Some(1.0)).unwrap();
    let (plus, minus) = split_series(&cos);
    println!("cos: sigma+ {:?}", plus.iter().map(|c| c.to_string()).collect::<Vec<_>>());
    println!("     sigma- {:?}", minus.iter().map(|c| c.to_string()).collect::<Vec<_>>());
    for (name, spec) in [
        ("cos, |x| < 1", cos.clone()),
        ("cos on R^d", SeriesSpec::cosine(24, None).unwrap()),
        ("exp on R^d", SeriesSpec::exponential(24, None).unwrap()),
        ("geometric 1/2, |x| < 1", SeriesSpec::geometric(rkhs_sandwich::param::q(1, 2), 24, Some(1.0)).unwrap()),
    ] {
        match check_applicability(&spec, &all) {
            Ok(r) => println!(
                "{name}: {:?}, radius+ {:?}, diagonal {}",
                r.lemma_applicable,
                r.radius_plus.value,
                r.diagonal_closed_form.unwrap_or_else(|| "-".into())
            ),
            Err(e) => println!("{name}: {e}"),
        }
    }
    let beta = Normalizer { label: "beta = 1/2".into(), sup_abs: 0.5, constant: Some(0.5) };
    let r = check_with_normalizer(&cos, &all, &beta).unwrap();
    println!("with a constant normalizer: {:?}", r.lemma_applicable);
}
