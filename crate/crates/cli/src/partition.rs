//! `chameleon partition <sub> <file>`.

use std::path::Path;

use chameleon::arith::{parse_rational, pow_n, Rational};
use chameleon::break_calculus::{pl_criterion, sigma_table, CriterionVerdict};
use chameleon::conjugacy::{max_depth_from_env, Conjugator};
use chameleon::markov::{AffineMarkovPartition, MarkovSystem, VertexRef};
use chameleon::Error;
use serde_json::json;

use crate::{ExitStatus, RunReport};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sub {
    Validate,
    Sigma,
    ConjugatorEval,
    EqualPairs,
    PlCriterion,
    DyadicStatus,
    CheckConjugacy,
}

impl Sub {
    pub fn name(self) -> &'static str {
        match self {
            Sub::Validate => "validate",
            Sub::Sigma => "sigma",
            Sub::ConjugatorEval => "conjugator-eval",
            Sub::EqualPairs => "equal-pairs",
            Sub::PlCriterion => "pl-criterion",
            Sub::DyadicStatus => "dyadic-status",
            Sub::CheckConjugacy => "check-conjugacy",
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct Options {
    pub depth: Option<u32>,
    pub at: Option<String>,
}

/// Reads `{"base": n, "lengths": [..]}`, or a bare array of lengths for base 2.
pub fn load(path: &Path) -> Result<AffineMarkovPartition, Error> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    if let Ok(lengths) = serde_json::from_str::<Vec<u64>>(&text) {
        return AffineMarkovPartition::new(2, lengths);
    }
    AffineMarkovPartition::from_json(&text)
}

pub fn run(sub: Sub, path: &Path, opts: &Options) -> (RunReport, ExitStatus) {
    let mut report = RunReport::new(format!("partition {}", sub.name()));
    report.input("file", path.display().to_string());
    if let Some(d) = opts.depth {
        report.input("depth", d);
    }
    if let Some(q) = &opts.at {
        report.input("at", q);
    }
    let result = load(path).and_then(|p| {
        report.input("base", p.base());
        report.input("lengths", p.lengths());
        let conj = Conjugator::new(MarkovSystem::new(p)?).with_max_depth(max_depth_from_env());
        dispatch(sub, &conj, opts, &mut report)
    });
    match result {
        Ok(status) => (report, status),
        Err(e) => {
            let status = report.fail(&e);
            (report, status)
        }
    }
}

fn dispatch(sub: Sub, conj: &Conjugator, opts: &Options, report: &mut RunReport) -> Result<ExitStatus, Error> {
    let sys = conj.system();
    match sub {
        Sub::Validate => validate(sys, report)?,
        Sub::Sigma => {
            let table = sigma_table(sys)?;
            report.line(format!("stable level K = {}", table.stable_level));
            for e in &table.entries {
                let x = sys.vertex_value(VertexRef::new(e.index, e.level));
                report.line(format!("x_{}^{} = {x}\tsigma = {}", e.index, e.level, e.value));
            }
            report.output("sigma_table", &table);
        }
        Sub::ConjugatorEval => conjugator_eval(conj, opts, report)?,
        Sub::EqualPairs => {
            let holds = conj.equal_pairs()?;
            report.line(format!("equal pairs: {holds}"));
            report.output("equal_pairs", holds);
        }
        Sub::PlCriterion => {
            let verdict = pl_criterion(sys)?;
            match &verdict {
                CriterionVerdict::Pl { h_bar, initial_slope, assignment } => {
                    report.line(format!("PL, initial slope {initial_slope}"));
                    for b in &assignment.entries {
                        report.line(format!("b({}) = {}", b.at, b.value));
                    }
                    for (a, b, p) in h_bar.segments() {
                        report.line(format!("h on [{a}, {b}): {} x + {}", p.slope, p.intercept));
                    }
                }
                CriterionVerdict::NotPl { witness } => {
                    let (a, b) = witness;
                    report.line(format!(
                        "not PL: sigma(x_{}^{}) = {} but sigma(x_{}^{}) = {}",
                        a.index, a.level, a.value, b.index, b.level, b.value
                    ));
                }
            }
            report.output("verdict", &verdict);
        }
        Sub::DyadicStatus => {
            let st = conj.dyadic_image_status(opts.depth.unwrap_or(4))?;
            report.line(format!("h(Z[1/n]) inside Z[1/n] to depth {}: {}", st.depth, st.subset_holds));
            match &st.counterexample {
                Some(c) => report.line(format!("equality fails: {}", serde_json::to_string(c).unwrap())),
                None => report.line("no equality counterexample found"),
            }
            report.output("dyadic_status", &st);
        }
        Sub::CheckConjugacy => {
            let check = conj.check_conjugacy(opts.depth.unwrap_or(8))?;
            report.line(format!(
                "g h = h nu on {} Q-vertices to depth {}: {}",
                check.checked, check.depth, check.holds
            ));
            report.output("conjugacy", &check);
            if !check.holds {
                return Ok(ExitStatus::Refused);
            }
        }
    }
    Ok(ExitStatus::Success)
}

fn validate(sys: &MarkovSystem, report: &mut RunReport) -> Result<(), Error> {
    let p = sys.partition();
    let xs = p.endpoints();
    let mut intervals = Vec::new();
    for i in 0..p.len() {
        let end = xs.get(i + 1).cloned().unwrap_or_else(|| Rational::from_integer(sys.circumference().into()));
        let slope = p.slope(i);
        report.line(format!("I_{i} = [{}, {end})\tslope {slope}", xs[i]));
        intervals.push(json!({"start": xs[i].to_string(), "end": end.to_string(), "slope": slope.to_string()}));
    }
    let breaks = sys.g().breaks(p.base())?;
    for (x, b) in &breaks {
        report.line(format!("break at {x}: {b:+}"));
    }
    let stable = sys.stable_level().ok();
    match (p.power_form(), stable) {
        (Some(m), Some(k)) => report.line(format!("power form m = {m}, stable level K = {k}")),
        _ => report.line("not in power form"),
    }
    report.output("intervals", intervals);
    report.output(
        "breaks",
        breaks.iter().map(|(x, b)| json!({"at": x.to_string(), "value": b})).collect::<Vec<_>>(),
    );
    report.output("power_form", p.power_form());
    report.output("stable_level", stable);
    report.output("g", sys.g());
    Ok(())
}

fn conjugator_eval(conj: &Conjugator, opts: &Options, report: &mut RunReport) -> Result<(), Error> {
    let Some(at) = &opts.at else {
        let depth = opts.depth.unwrap_or(2);
        let period = conj.system().depth_period(depth)?;
        let mut rows = Vec::new();
        for i in 0..period {
            let (q, x) = (conj.q_vertex(i, depth), conj.system().value_at(i, depth));
            report.line(format!("h({q}) = {x}"));
            rows.push(json!({"q": q.to_string(), "h": x.to_string()}));
        }
        report.output("values", rows);
        return Ok(());
    };
    let q = parse_rational(at)?;
    match conj.h_eval(&q) {
        Ok(v) => {
            report.line(format!("h({q}) = {v}"));
            report.output("value", v.to_string());
        }
        Err(Error::NotAVertex { .. }) => {
            let width = pow_n(2, -(opts.depth.unwrap_or(20) as i64));
            let e = conj.h_eval_enclosure(&q, &width)?;
            report.line(format!("h({q}) in [{}, {}]", e.lo, e.hi));
            report.output("enclosure", json!({"lo": e.lo.to_string(), "hi": e.hi.to_string()}));
        }
        Err(e) => return Err(e),
    }
    Ok(())
}
