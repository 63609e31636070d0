//! Versioned JSON run report.

use std::collections::BTreeMap;
use std::time::Instant;

use groupcut::extremality::{additivity_domain, covered_components, CoveredComponents};
use groupcut::{extremality_test, minimality_test, ExtremalityVerdict, Face, MinimalityReport, PwlPeriodic};
use serde::Serialize;

pub const SCHEMA: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum InputDescriptor {
    Constructor { constructor: String, params: BTreeMap<String, String> },
    File { file: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Tool {
    pub name: &'static str,
    pub version: &'static str,
}

pub const TOOL: Tool = Tool {
    name: "groupcut",
    version: env!("CARGO_PKG_VERSION"),
};

#[derive(Clone, Debug, Serialize)]
pub struct Timings {
    pub minimality_ms: f64,
    pub extremality_ms: f64,
}

/// Outcome of a step that may fail on malformed input.
#[derive(Clone, Debug, Serialize)]
#[serde(untagged)]
pub enum Step<T> {
    Done(T),
    Failed { error: String },
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub schema: u32,
    pub tool: Tool,
    pub input: InputDescriptor,
    pub function: PwlPeriodic,
    pub minimality: MinimalityReport,
    pub additive_faces: Step<Vec<Face>>,
    pub covered_components: Step<CoveredComponents>,
    pub extremality: Step<ExtremalityVerdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings: Option<Timings>,
}

fn step<T, E: std::fmt::Display>(r: Result<T, E>) -> Step<T> {
    match r {
        Ok(v) => Step::Done(v),
        Err(e) => Step::Failed { error: e.to_string() },
    }
}

/// Runs minimality and extremality on `pi`. Timings are wall-clock and
/// therefore only included on request.
pub fn run_report(input: InputDescriptor, pi: &PwlPeriodic, with_timings: bool) -> RunReport {
    let t0 = Instant::now();
    let minimality = minimality_test(pi, None);
    let t1 = Instant::now();
    let extremality = step(extremality_test(pi));
    let t2 = Instant::now();
    RunReport {
        schema: SCHEMA,
        tool: TOOL,
        input,
        function: pi.clone(),
        minimality,
        additive_faces: step(additivity_domain(pi).map(|d| d.faces)),
        covered_components: step(covered_components(pi)),
        extremality,
        timings: with_timings.then(|| Timings {
            minimality_ms: (t1 - t0).as_secs_f64() * 1e3,
            extremality_ms: (t2 - t1).as_secs_f64() * 1e3,
        }),
    }
}

pub fn to_json(report: &RunReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}
