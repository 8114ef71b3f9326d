//! Self-describing run reports and the batch decision table.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::decide::{decide, Status, Verdict};
use crate::irkbs::DecompositionReport;
use crate::lab::{QuadratureConfig, ScanSeries};
use crate::packing::{ExponentFit, PackingResult};
use crate::param::SpaceSpec;
use crate::rules::{Citation, RuleId};

pub const SCHEMA: &str = "rkhs-sandwich/report/v1";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
/// Refuse tables larger than this.
pub const MAX_TABLE_CELLS: usize = 10_000;

pub const EXIT_FEASIBLE: i32 = 0;
pub const EXIT_INFEASIBLE: i32 = 10;
pub const EXIT_BORDERLINE: i32 = 11;
pub const EXIT_UNDETERMINED: i32 = 12;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_DATA: i32 = 65;

pub fn exit_code(status: Status) -> i32 {
    match status {
        Status::Feasible => EXIT_FEASIBLE,
        Status::Infeasible => EXIT_INFEASIBLE,
        Status::Borderline => EXIT_BORDERLINE,
        Status::Undetermined => EXIT_UNDETERMINED,
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ReportError {
    #[error("table has {0} cells; the limit is {MAX_TABLE_CELLS}")]
    TooLarge(usize),
    #[error("template {0:?} has no '{{}}' placeholder")]
    Template(String),
    #[error("bad space {0:?}: {1}")]
    Space(String, String),
    #[error("report json: {0}")]
    Json(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableCell {
    pub from: String,
    pub to: String,
    pub status: Option<Status>,
    pub rule: Option<RuleId>,
    /// Set when the pair could not be decided at all, e.g. `E` does not embed in `F`.
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTable {
    pub from_template: String,
    pub to_template: String,
    pub domain: String,
    pub values: Vec<String>,
    pub cells: Vec<TableCell>,
}

impl DecisionTable {
    pub fn cell(&self, from: &str, to: &str) -> Option<&TableCell> {
        let f = self.from_template.replace("{}", from);
        let t = self.to_template.replace("{}", to);
        self.cells.iter().find(|c| c.from == f && c.to == t)
    }

    pub fn rules(&self) -> Vec<RuleId> {
        let set: BTreeSet<String> = self.cells.iter().filter_map(|c| c.rule).map(|r| format!("{r:?}")).collect();
        RuleId::ALL.iter().copied().filter(|r| set.contains(&format!("{r:?}"))).collect()
    }

    /// Plain-text matrix, rows are sources.
    pub fn render(&self) -> String {
        let w = self.values.iter().map(String::len).max().unwrap_or(1).max(12);
        let mut out = format!("{:>w$} |", "from \\ to");
        for v in &self.values {
            out.push_str(&format!(" {v:>w$}"));
        }
        out.push('\n');
        for a in &self.values {
            out.push_str(&format!("{a:>w$} |"));
            for b in &self.values {
                let s = match self.cell(a, b) {
                    Some(TableCell { status: Some(s), .. }) => s.to_string(),
                    _ => "-".into(),
                };
                out.push_str(&format!(" {s:>w$}"));
            }
            out.push('\n');
        }
        out
    }
}

/// Decides every `(from(v), to(w))` pair over `values x values`. Templates contain `{}`.
pub fn decision_table(from_template: &str, to_template: &str, domain: &str, values: &[String]) -> Result<DecisionTable, ReportError> {
    for t in [from_template, to_template] {
        if !t.contains("{}") {
            return Err(ReportError::Template(t.into()));
        }
    }
    let n = values.len() * values.len();
    if n > MAX_TABLE_CELLS {
        return Err(ReportError::TooLarge(n));
    }
    let parse = |s: &str| -> Result<SpaceSpec, ReportError> {
        let fam = s.parse().map_err(|e: crate::param::ParamError| ReportError::Space(s.into(), e.to_string()))?;
        let dom = domain.parse().map_err(|e: crate::param::ParamError| ReportError::Space(domain.into(), e.to_string()))?;
        Ok(SpaceSpec::new(fam, dom))
    };
    let mut cells = Vec::with_capacity(n);
    for a in values {
        for b in values {
            let from = from_template.replace("{}", a);
            let to = to_template.replace("{}", b);
            let (e, f) = (parse(&from)?, parse(&to)?);
            let cell = match decide(&e, &f) {
                Ok(v) => TableCell { from, to, status: Some(v.status), rule: v.rule, error: None },
                Err(err) => TableCell { from, to, status: None, rule: None, error: Some(err.to_string()) },
            };
            cells.push(cell);
        }
    }
    Ok(DecisionTable {
        from_template: from_template.into(),
        to_template: to_template.into(),
        domain: domain.into(),
        values: values.to_vec(),
        cells,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Payload {
    Decide { verdict: Verdict },
    Scan { series: ScanSeries },
    Table { table: DecisionTable },
    Packing { results: Vec<PackingResult>, fit: Option<ExponentFit>, alpha_check: Option<bool> },
    Irkbs { report: DecompositionReport },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub tool_version: String,
    pub command: String,
    /// Every argument of the run, as given.
    pub query: BTreeMap<String, String>,
    pub seed: Option<u64>,
    pub quadrature: Option<QuadratureConfig>,
    pub payload: Payload,
    pub citations: Vec<Citation>,
}

impl Report {
    pub fn new(command: &str, query: BTreeMap<String, String>, payload: Payload) -> Self {
        let rules: Vec<RuleId> = match &payload {
            Payload::Decide { verdict } => verdict.rule.into_iter().collect(),
            Payload::Table { table } => table.rules(),
            _ => Vec::new(),
        };
        Report {
            schema: SCHEMA.into(),
            tool_version: TOOL_VERSION.into(),
            command: command.into(),
            query,
            seed: None,
            quadrature: None,
            payload,
            citations: rules.into_iter().map(RuleId::citation).collect(),
        }
    }

    pub fn with_quadrature(mut self, cfg: &QuadratureConfig) -> Self {
        self.seed = Some(cfg.seed);
        self.quadrature = Some(cfg.clone());
        self
    }

    pub fn to_json(&self) -> Result<String, ReportError> {
        serde_json::to_string_pretty(self).map_err(|e| ReportError::Json(e.to_string()))
    }

    pub fn from_json(s: &str) -> Result<Self, ReportError> {
        serde_json::from_str(s).map_err(|e| ReportError::Json(e.to_string()))
    }

    /// Status-based exit code for decide reports, 0 otherwise.
    pub fn exit_code(&self) -> i32 {
        match &self.payload {
            Payload::Decide { verdict } => exit_code(verdict.status),
            _ => EXIT_FEASIBLE,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vals(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn lp_table_pattern() {
        let v = vals(&["1", "3/2", "2", "3", "inf"]);
        let t = decision_table("lp:{}", "lp:{}", "seq", &v).unwrap();
        for a in &v {
            for b in &v {
                let p: crate::param::ExtRational = a.parse().unwrap();
                let q: crate::param::ExtRational = b.parse().unwrap();
                let two = crate::param::ExtRational::int(2);
                let c = t.cell(a, b).unwrap();
                if p <= q {
                    assert_eq!(c.status == Some(Status::Feasible), p <= two && two <= q, "{a} {b}");
                }
            }
        }
        assert!(!t.rules().is_empty());
    }

    #[test]
    fn round_trip() {
        let t = decision_table("lp:{}", "lp:{}", "seq", &vals(&["1", "2", "inf"])).unwrap();
        let r = Report::new("table", BTreeMap::new(), Payload::Table { table: t });
        let back = Report::from_json(&r.to_json().unwrap()).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn template_needs_placeholder() {
        assert!(decision_table("lp:1", "lp:{}", "seq", &vals(&["2"])).is_err());
    }
}
