//! `sandwich`: one-shot decisions, tables, scans, packing runs and series checks.
//! Prints one JSON report per run on stdout.

use std::collections::BTreeMap;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use rkhs_sandwich::decide::{decide, ObstructionRecipe, ScanVariable, Status};
use rkhs_sandwich::irkbs::{check_applicability, MeasureClass, SeriesSpec, DEFAULT_TRUNCATION};
use rkhs_sandwich::lab::{scan, QuadratureConfig, ScanSpec};
use rkhs_sandwich::packing::{alpha_transform_check, centers_csv, exact_packing, exponent_fit, greedy_packing};
use rkhs_sandwich::param::{DomainSpec, ExtRational, Family, SpaceSpec, Q};
use rkhs_sandwich::report::{decision_table, Payload, Report, EXIT_DATA, EXIT_USAGE};

#[derive(Parser, Debug)]
#[command(name = "sandwich", version, about = "Decide when a Hilbert space fits between two function spaces")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Decide one pair. Exit code: 0 feasible, 10 infeasible, 11 borderline, 12 undetermined.
    Decide(PairArgs),
    /// Run the obstruction scan for an infeasible pair or a saved recipe.
    Scan(ScanArgs),
    /// Decide every pair over a grid of parameter values.
    Table(TableArgs),
    /// Greedy or exact packing counts and the fitted exponent.
    Packing(PackingArgs),
    /// Positive decomposition of a power-series activation.
    Irkbs(IrkbsArgs),
}

#[derive(Args, Debug)]
struct PairArgs {
    /// Source space, e.g. `lp:1`, `holder:1`, `besov:2:2:2`.
    #[arg(long)]
    from: Option<String>,
    /// Target space; `sup` and `c0` give the bounded-kernel targets.
    #[arg(long)]
    to: Option<String>,
    /// `seq`, `cube:d`, `ball:d` or `rd:d`. Defaults to `seq` for sequence spaces.
    #[arg(long)]
    domain: Option<String>,
    /// Print a one-line summary instead of JSON.
    #[arg(long)]
    summary: bool,
}

#[derive(Args, Debug)]
struct ScanArgs {
    #[command(flatten)]
    pair: PairArgs,
    /// JSON file holding an obstruction recipe; replaces --from/--to.
    #[arg(long)]
    recipe: Option<String>,
    /// Comma-separated scales, rationals allowed.
    #[arg(long, value_delimiter = ',')]
    deltas: Vec<String>,
    /// Comma-separated family sizes, for `log n` scans.
    #[arg(long, value_delimiter = ',')]
    ns: Vec<usize>,
    /// Quadrature profile: fast, default or accurate. Falls back to the environment.
    #[arg(long)]
    profile: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Write the series as CSV here.
    #[arg(long)]
    csv: Option<String>,
}

#[derive(Args, Debug)]
struct TableArgs {
    /// Shorthand for both templates: `lp`, `leb`, `slobo:<p>`.
    #[arg(long)]
    grid: Option<String>,
    #[arg(long)]
    from_template: Option<String>,
    #[arg(long)]
    to_template: Option<String>,
    #[arg(long, value_delimiter = ',', default_value = "1,3/2,2,3,inf")]
    values: Vec<String>,
    #[arg(long)]
    domain: Option<String>,
    /// Print the matrix as text instead of JSON.
    #[arg(long)]
    text: bool,
}

#[derive(Args, Debug)]
struct PackingArgs {
    #[arg(long)]
    domain: String,
    #[arg(long, value_delimiter = ',', default_value = "1/4,1/8,1/16")]
    deltas: Vec<String>,
    #[arg(long, default_value = "1")]
    alpha: String,
    /// Exact maximum packing by branch and bound (small instances only).
    #[arg(long)]
    exact: bool,
    /// Write the centers of the finest run as CSV here.
    #[arg(long)]
    centers: Option<String>,
}

#[derive(Args, Debug)]
struct IrkbsArgs {
    /// `cos`, `sin`, `exp` or `geometric:<r>`.
    #[arg(long, conflicts_with = "coefficients")]
    series: Option<String>,
    /// Explicit coefficients, comma separated.
    #[arg(long, value_delimiter = ',')]
    coefficients: Vec<String>,
    #[arg(long, default_value_t = DEFAULT_TRUNCATION)]
    terms: usize,
    /// Inputs lie in the open ball of this radius; omit for all of R^d.
    #[arg(long)]
    domain_radius: Option<f64>,
    /// `all` or a free-text description of a restricted class.
    #[arg(long, default_value = "all")]
    measure_class: String,
}

struct Fail {
    code: u8,
    msg: String,
}

fn usage(msg: impl Into<String>) -> Fail {
    Fail { code: EXIT_USAGE as u8, msg: msg.into() }
}

fn data(msg: impl ToString) -> Fail {
    Fail { code: EXIT_DATA as u8, msg: msg.to_string() }
}

fn real(s: &str) -> Result<f64, Fail> {
    match s.parse::<ExtRational>() {
        Ok(ExtRational::Finite(x)) => Ok(rkhs_sandwich::param::q_to_f64(&x)),
        _ => Err(usage(format!("not a finite number: {s}"))),
    }
}

fn pair(a: &PairArgs) -> Result<(SpaceSpec, SpaceSpec), Fail> {
    let from = a.from.as_deref().ok_or_else(|| usage("--from is required"))?;
    let to = a.to.as_deref().ok_or_else(|| usage("--to is required"))?;
    let fe: Family = from.parse().map_err(|e| usage(format!("--from: {e}")))?;
    let ff: Family = to.parse().map_err(|e| usage(format!("--to: {e}")))?;
    let dom = match &a.domain {
        Some(d) => d.parse::<DomainSpec>().map_err(|e| usage(format!("--domain: {e}")))?,
        None if matches!(fe, Family::SequenceLp { .. }) || matches!(ff, Family::SequenceLp { .. }) => DomainSpec::sequence(),
        None => return Err(usage("--domain is required for function spaces")),
    };
    Ok((SpaceSpec::new(fe, dom.clone()), SpaceSpec::new(ff, dom)))
}

fn query(pairs: &[(&str, Option<String>)]) -> BTreeMap<String, String> {
    pairs.iter().filter_map(|(k, v)| v.clone().map(|v| (k.to_string(), v))).collect()
}

fn emit(r: &Report) -> Result<(), Fail> {
    println!("{}", r.to_json().map_err(data)?);
    Ok(())
}

fn quad(profile: &Option<String>, seed: Option<u64>) -> Result<QuadratureConfig, Fail> {
    let cfg = match profile {
        Some(p) => QuadratureConfig::profile(p).ok_or_else(|| usage(format!("unknown profile {p}")))?,
        None => QuadratureConfig::from_env(),
    };
    Ok(match seed {
        Some(s) => cfg.with_seed(s),
        None => cfg,
    })
}

fn run_decide(a: PairArgs) -> Result<u8, Fail> {
    let (e, f) = pair(&a)?;
    let v = decide(&e, &f).map_err(data)?;
    let q = query(&[("from", a.from.clone()), ("to", a.to.clone()), ("domain", a.domain.clone())]);
    let r = Report::new("decide", q, Payload::Decide { verdict: v.clone() });
    if a.summary {
        let rule = v.rule.map(|r| format!(" [{r:?}]")).unwrap_or_default();
        let chain = v
            .witness
            .as_ref()
            .map(|w| {
                let l: Vec<String> = w.links.iter().map(|s| s.family.to_string()).collect();
                format!(" via {}", l.join(" -> "))
            })
            .unwrap_or_default();
        println!("{}{rule}{chain}", v.status);
    } else {
        emit(&r)?;
    }
    Ok(r.exit_code() as u8)
}

fn run_scan(a: ScanArgs) -> Result<u8, Fail> {
    let recipe: ObstructionRecipe = match &a.recipe {
        Some(path) => {
            let s = std::fs::read_to_string(path).map_err(data)?;
            serde_json::from_str(&s).map_err(data)?
        }
        None => {
            let (e, f) = pair(&a.pair)?;
            let v = decide(&e, &f).map_err(data)?;
            if v.status != Status::Infeasible {
                return Err(data(format!("precondition: verdict is {}, scans need an infeasible pair", v.status)));
            }
            v.obstruction.ok_or_else(|| data("infeasible verdict without a recipe"))?
        }
    };
    let spec = if !a.ns.is_empty() {
        ScanSpec::ns(&a.ns)
    } else if !a.deltas.is_empty() {
        ScanSpec::deltas(a.deltas.iter().map(|s| real(s)).collect::<Result<_, _>>()?)
    } else {
        match recipe.variable {
            ScanVariable::LogN => ScanSpec::ns(&[4, 16, 64]),
            ScanVariable::LogInvDelta => ScanSpec::deltas(vec![0.25, 0.125, 0.0625]),
        }
    };
    let cfg = quad(&a.profile, a.seed)?;
    let series = scan(&recipe, &spec, &cfg).map_err(data)?;
    if let Some(path) = &a.csv {
        std::fs::write(path, series.to_csv()).map_err(data)?;
    }
    let mut q = query(&[
        ("from", a.pair.from.clone()),
        ("to", a.pair.to.clone()),
        ("domain", a.pair.domain.clone()),
        ("recipe", a.recipe.clone()),
        ("csv", a.csv.clone()),
    ]);
    q.insert("deltas".into(), format!("{:?}", spec.deltas));
    emit(&Report::new("scan", q, Payload::Scan { series }).with_quadrature(&cfg))?;
    Ok(0)
}

fn run_table(a: TableArgs) -> Result<u8, Fail> {
    let (ft, tt, dom) = match a.grid.as_deref() {
        Some("lp") => ("lp:{}".to_string(), "lp:{}".to_string(), "seq".to_string()),
        Some("leb") => ("leb:{}".into(), "leb:{}".into(), a.domain.clone().unwrap_or_else(|| "cube:1".into())),
        Some(g) if g.starts_with("slobo:") => {
            let p = &g["slobo:".len()..];
            (format!("slobo:{{}}:{p}"), format!("slobo:{{}}:{p}"), a.domain.clone().unwrap_or_else(|| "cube:2".into()))
        }
        Some(g) => return Err(usage(format!("unknown grid {g}"))),
        None => (
            a.from_template.clone().ok_or_else(|| usage("--from-template or --grid is required"))?,
            a.to_template.clone().ok_or_else(|| usage("--to-template or --grid is required"))?,
            a.domain.clone().unwrap_or_else(|| "seq".into()),
        ),
    };
    let t = decision_table(&ft, &tt, &dom, &a.values).map_err(data)?;
    if a.text {
        print!("{}", t.render());
    } else {
        let q = query(&[
            ("from_template", Some(ft)),
            ("to_template", Some(tt)),
            ("domain", Some(dom)),
            ("values", Some(a.values.join(","))),
        ]);
        emit(&Report::new("table", q, Payload::Table { table: t }))?;
    }
    Ok(0)
}

fn run_packing(a: PackingArgs) -> Result<u8, Fail> {
    let dom: DomainSpec = a.domain.parse().map_err(|e| usage(format!("--domain: {e}")))?;
    let alpha = real(&a.alpha)?;
    let deltas: Vec<f64> = a.deltas.iter().map(|s| real(s)).collect::<Result<_, _>>()?;
    let mut results = Vec::new();
    let mut ok = true;
    for &d in &deltas {
        let r = if a.exact { exact_packing(&dom, d, alpha) } else { greedy_packing(&dom, d, alpha) };
        results.push(r.map_err(data)?);
        if alpha != 1.0 {
            ok &= alpha_transform_check(&dom, d, alpha).map_err(data)?;
        }
    }
    let fit = if deltas.len() >= 3 { Some(exponent_fit(&dom, &deltas, alpha).map_err(data)?) } else { None };
    if let (Some(path), Some(last)) = (&a.centers, results.last()) {
        std::fs::write(path, centers_csv(last)).map_err(data)?;
    }
    let q = query(&[
        ("domain", Some(a.domain.clone())),
        ("deltas", Some(a.deltas.join(","))),
        ("alpha", Some(a.alpha.clone())),
        ("exact", Some(a.exact.to_string())),
    ]);
    let alpha_check = (alpha != 1.0).then_some(ok);
    emit(&Report::new("packing", q, Payload::Packing { results, fit, alpha_check }))?;
    Ok(if ok { 0 } else { EXIT_DATA as u8 })
}

fn run_irkbs(a: IrkbsArgs) -> Result<u8, Fail> {
    let spec = match (&a.series, a.coefficients.is_empty()) {
        (Some(name), _) => SeriesSpec::named(name, a.terms, a.domain_radius).map_err(data)?,
        (None, false) => {
            let c: Vec<Q> = a
                .coefficients
                .iter()
                .map(|s| s.trim().parse::<Q>().map_err(|_| usage(format!("bad coefficient {s}"))))
                .collect::<Result<_, _>>()?;
            SeriesSpec::new(c, a.domain_radius).map_err(data)?
        }
        (None, true) => return Err(usage("--series or --coefficients is required")),
    };
    let measure = match a.measure_class.as_str() {
        "all" | "all-finite-signed" => MeasureClass::AllFiniteSigned,
        other => MeasureClass::Restricted(other.to_string()),
    };
    let report = check_applicability(&spec, &measure).map_err(data)?;
    let q = query(&[
        ("series", a.series.clone()),
        ("coefficients", (!a.coefficients.is_empty()).then(|| a.coefficients.join(","))),
        ("terms", Some(a.terms.to_string())),
        ("domain_radius", a.domain_radius.map(|r| r.to_string())),
        ("measure_class", Some(a.measure_class.clone())),
    ]);
    emit(&Report::new("irkbs", q, Payload::Irkbs { report }))?;
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE as u8 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let out = match cli.cmd {
        Cmd::Decide(a) => run_decide(a),
        Cmd::Scan(a) => run_scan(a),
        Cmd::Table(a) => run_table(a),
        Cmd::Packing(a) => run_packing(a),
        Cmd::Irkbs(a) => run_irkbs(a),
    };
    match out {
        Ok(c) => ExitCode::from(c),
        Err(f) => {
            eprintln!("sandwich: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
