//! `chameleon roundtrip`: build `g = h ν₂ h⁻¹` from random `h` in `T_{2,1}`
//! and check that the criterion gives back `h`.

use chameleon::arith::power_of;
use chameleon::break_calculus::{pl_criterion, CriterionVerdict};
use chameleon::conjugacy::{markov_partition_for, random_thompson_element};
use chameleon::markov::MarkovSystem;
use chameleon::{CircleMap, Error};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::{ExitStatus, RunReport};

/// Points fed to the random generator.
pub const MAX_POINTS: usize = 8;

fn trial(h: &CircleMap) -> Result<(bool, u32), Error> {
    let sys = MarkovSystem::new(markov_partition_for(h)?)?;
    let k = sys.stable_level()?;
    Ok(match pl_criterion(&sys)? {
        CriterionVerdict::Pl { h_bar, initial_slope, .. } => {
            (h_bar == *h && power_of(&initial_slope, 2).is_some(), k)
        }
        CriterionVerdict::NotPl { .. } => (false, k),
    })
}

pub fn run(seed: u64, count: usize) -> (RunReport, ExitStatus) {
    let mut report = RunReport::new("roundtrip");
    report.input("seed", seed);
    report.input("count", count);
    if count == 0 {
        let status = report.fail(&Error::BadLength("count must be at least 1".into()));
        return (report, status);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut passed, mut max_breaks, mut max_depth) = (0, 0, 0);
    for t in 0..count {
        let h = random_thompson_element(&mut rng, MAX_POINTS);
        max_breaks = max_breaks.max(h.breakpoints().len());
        match trial(&h) {
            Ok((true, k)) => {
                passed += 1;
                max_depth = max_depth.max(k);
            }
            Ok((false, _)) => report.check(format!("trial {t}"), false, "h was not recovered"),
            Err(e) => report.check(format!("trial {t}"), false, e.to_string()),
        }
    }
    report.line(format!("recovered h exactly in {passed}/{count} trials"));
    report.line(format!("max break count {max_breaks}, max stable level {max_depth}"));
    report.output("passed", passed);
    report.output("max_break_count", max_breaks);
    report.output("max_stable_level", max_depth);
    let status = if passed == count {
        ExitStatus::Success
    } else {
        ExitStatus::Refused
    };
    (report, status)
}
