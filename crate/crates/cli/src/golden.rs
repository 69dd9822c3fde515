//! `chameleon paper-examples`: replays the worked examples against the
//! values recorded in `data/golden.json`.

use chameleon::arith::{parse_rational, Rational};
use chameleon::break_calculus::{pl_criterion, sigma, sigma_table};
use chameleon::conjugacy::{periodic_points, Conjugator, Counterexample};
use chameleon::markov::MarkovSystem;
use chameleon::Error;
use serde::Deserialize;

use crate::{error_kind, ExitStatus, RunReport};

pub const GOLDEN: &str = include_str!("../data/golden.json");

#[derive(Debug, Deserialize)]
pub struct GoldenFile {
    pub examples: Vec<Example>,
}

#[derive(Debug, Deserialize)]
pub struct Example {
    pub id: u32,
    pub base: u32,
    pub lengths: Vec<u64>,
    pub checks: Vec<Check>,
}

#[derive(Debug, Deserialize)]
pub struct Check {
    pub cite: String,
    #[serde(flatten)]
    pub kind: Expect,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Expect {
    Slopes { expect: Vec<(usize, String)> },
    Endpoints { expect: Vec<(usize, String)> },
    Breaks { expect: Vec<(String, i64)> },
    BreakAt { at: String, expect: i64 },
    BreakNonzero { at: String },
    SumOfBreaks { expect: i64 },
    StableLevel { expect: u32 },
    SigmaTable { expect: Vec<i64> },
    SigmaTableError { expect: String },
    SigmaError { at: String, expect: String },
    EqualPairs { expect: bool },
    Criterion { expect: String },
    ExtractedH { expect: Vec<(String, String)> },
    HInverse { expect: Vec<(String, String)> },
    PeriodicContains { period: u32, point: String },
    Cycle { from: String, expect: Vec<String>, breaks: Vec<i64> },
    DyadicStatus { depth: u32, subset_holds: bool, counterexample: String },
    CheckConjugacy { depth: u32, expect: bool },
}

pub fn load() -> GoldenFile {
    serde_json::from_str(GOLDEN).expect("golden data parses")
}

fn q(s: &str) -> Rational {
    parse_rational(s).expect("golden rationals parse")
}

fn err_name(r: Result<impl std::fmt::Debug, Error>) -> String {
    match r {
        Ok(v) => format!("Ok({v:?})"),
        Err(e) => error_kind(&e),
    }
}

fn counterexample_kind(c: &Option<Counterexample>) -> String {
    match c {
        None => "none".into(),
        Some(Counterexample::NonNAdicPreimage { .. }) => "non_n_adic_preimage".into(),
        Some(Counterexample::PeriodicPoint { .. }) => "periodic_point".into(),
    }
}

/// Runs one check; `Ok(detail)` on a match, `Err(detail)` otherwise.
fn evaluate(conj: &Conjugator, expect: &Expect) -> Result<String, String> {
    let sys = conj.system();
    let g = sys.g();
    let n = sys.base();
    let cmp = |ok: bool, got: String| if ok { Ok(got) } else { Err(format!("got {got}")) };
    match expect {
        Expect::Slopes { expect } => {
            let got: Vec<(usize, String)> = expect.iter().map(|(i, _)| (*i, sys.partition().slope(*i).to_string())).collect();
            cmp(&got == expect, format!("{got:?}"))
        }
        Expect::Endpoints { expect } => {
            let got: Vec<(usize, String)> = expect.iter().map(|(i, _)| (*i, sys.x(*i as u64).to_string())).collect();
            cmp(&got == expect, format!("{got:?}"))
        }
        Expect::Breaks { expect } => {
            let got: Vec<(String, i64)> = g
                .breaks(n)
                .map_err(|e| e.to_string())?
                .into_iter()
                .map(|(x, b)| (x.to_string(), b))
                .collect();
            cmp(&got == expect, format!("{got:?}"))
        }
        Expect::BreakAt { at, expect } => {
            let got = g.break_value(&q(at), n).map_err(|e| e.to_string())?;
            cmp(got == *expect, got.to_string())
        }
        Expect::BreakNonzero { at } => {
            let got = g.break_value(&q(at), n).map_err(|e| e.to_string())?;
            cmp(got != 0, got.to_string())
        }
        Expect::SumOfBreaks { expect } => {
            let got = g.sum_of_breaks(n).map_err(|e| e.to_string())?;
            cmp(got == *expect, got.to_string())
        }
        Expect::StableLevel { expect } => {
            let got = sys.stable_level().map_err(|e| e.to_string())?;
            cmp(got == *expect, got.to_string())
        }
        Expect::SigmaTable { expect } => {
            let got = sigma_table(sys).map_err(|e| e.to_string())?.values();
            cmp(&got == expect, format!("{got:?}"))
        }
        Expect::SigmaTableError { expect } => {
            let got = err_name(sigma_table(sys).map(|t| t.values()));
            cmp(&got == expect, got)
        }
        Expect::SigmaError { at, expect } => {
            let got = err_name(sigma(g, n, &q(at)));
            cmp(&got == expect, got)
        }
        Expect::EqualPairs { expect } => {
            let got = conj.equal_pairs().map_err(|e| e.to_string())?;
            cmp(got == *expect, got.to_string())
        }
        Expect::Criterion { expect } => {
            let got = match pl_criterion(sys) {
                Ok(v) if v.is_pl() => "PL".to_string(),
                Ok(_) => "NotPL".to_string(),
                Err(e) => error_kind(&e),
            };
            cmp(&got == expect, got)
        }
        Expect::ExtractedH { expect } => {
            let h = conj.extract_pl_h().map_err(|e| e.to_string())?;
            let got: Vec<(String, String)> = expect.iter().map(|(x, _)| (x.clone(), h.eval(&q(x)).to_string())).collect();
            cmp(&got == expect, format!("{got:?}"))
        }
        Expect::HInverse { expect } => {
            let got = expect
                .iter()
                .map(|(x, _)| conj.h_inverse_eval(&q(x)).map(|v| (x.clone(), v.to_string())))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| e.to_string())?;
            cmp(&got == expect, format!("{got:?}"))
        }
        Expect::PeriodicContains { period, point } => {
            let got = periodic_points(g, *period).map_err(|e| e.to_string())?;
            let shown: Vec<String> = got.iter().map(|x| x.to_string()).collect();
            cmp(got.contains(&q(point)), format!("[{}]", shown.join(", ")))
        }
        Expect::Cycle { from, expect, breaks } => {
            let orbit = g.orbit(&q(from), 10_000).map_err(|e| e.to_string())?;
            let got: Vec<String> = orbit.cycle.iter().map(|x| x.to_string()).collect();
            let got_breaks = orbit
                .cycle
                .iter()
                .map(|x| g.break_value(x, n))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| e.to_string())?;
            cmp(&got == expect && &got_breaks == breaks, format!("{got:?} with breaks {got_breaks:?}"))
        }
        Expect::DyadicStatus { depth, subset_holds, counterexample } => {
            let st = conj.dyadic_image_status(*depth).map_err(|e| e.to_string())?;
            let kind = counterexample_kind(&st.counterexample);
            let detail = format!(
                "subset {}, counterexample {}",
                st.subset_holds,
                serde_json::to_string(&st.counterexample).unwrap()
            );
            cmp(st.subset_holds == *subset_holds && &kind == counterexample, detail)
        }
        Expect::CheckConjugacy { depth, expect } => {
            let c = conj.check_conjugacy(*depth).map_err(|e| e.to_string())?;
            cmp(c.holds == *expect, format!("{} on {} vertices", c.holds, c.checked))
        }
    }
}

fn label(expect: &Expect) -> String {
    let dbg = format!("{expect:?}");
    dbg.split(|c: char| !c.is_alphanumeric()).next().unwrap_or_default().to_string()
}

pub fn run(ids: &[u32]) -> (RunReport, ExitStatus) {
    let golden = load();
    let mut report = RunReport::new("paper-examples");
    let wanted: Vec<u32> = if ids.is_empty() {
        golden.examples.iter().map(|e| e.id).collect()
    } else {
        let mut v = ids.to_vec();
        v.sort_unstable();
        v.dedup();
        v
    };
    report.input("ids", &wanted);
    for id in &wanted {
        if !golden.examples.iter().any(|e| e.id == *id) {
            let status = report.fail(&Error::Parse(format!("no example with id {id}")));
            return (report, status);
        }
    }
    for ex in golden.examples.iter().filter(|e| wanted.contains(&e.id)) {
        let conj = match MarkovSystem::from_lengths(ex.base, ex.lengths.clone()) {
            Ok(s) => Conjugator::new(s),
            Err(e) => {
                report.check(format!("example {} builds", ex.id), false, e.to_string());
                continue;
            }
        };
        for c in &ex.checks {
            let name = format!("example {} {}", ex.id, label(&c.kind));
            match evaluate(&conj, &c.kind) {
                Ok(got) => report.check(name, true, got),
                Err(got) => report.check(name, false, format!("{got}; expected per {}", c.cite)),
            }
        }
    }
    let passed = report.checks.iter().filter(|c| c.pass).count();
    report.output("passed", passed);
    report.output("total", report.checks.len());
    let status = if report.all_passed() {
        ExitStatus::Success
    } else {
        ExitStatus::Refused
    };
    (report, status)
}
