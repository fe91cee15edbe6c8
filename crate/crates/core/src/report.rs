//! End-to-end runs over an instance: structural analysis, exact counting and
//! the bound check, plus a seeded fuzz driver built on top of them.

use std::collections::BTreeMap;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{assemble_report, BoundReport, Finiteness, Parity, ParityClass};
use crate::circuit::{circuit_profile, CircuitProfile};
use crate::error::{Error, Result};
use crate::forge::{random_instance, Instance, RandomSpec};
use crate::gale::{analyze_gale, s_alpha, GaleSystem, SignSequence};
use crate::oracle::{check_dimensions, count_with_gale, CountMethod, CountResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Ok,
    Violation,
    NotApplicable,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderingSummary {
    pub alpha: Vec<usize>,
    pub classes: Vec<Vec<usize>>,
    pub k: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub instance_label: String,
    pub n: usize,
    pub profile: CircuitProfile,
    pub halfspace_ok: bool,
    /// Absent when no open halfplane contains the dual vectors.
    pub ordering: Option<OrderingSummary>,
    pub s_alpha: Option<SignSequence>,
    pub bounds: Option<BoundReport>,
    pub count: Option<CountResult>,
    pub verdict: Option<Verdict>,
    /// Human-readable reasons for a violation or a not-applicable verdict.
    pub violations: Vec<String>,
    pub notes: Vec<String>,
    pub timing_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountReport {
    pub instance_label: String,
    pub count: CountResult,
    pub timing_ms: f64,
}

struct Structure {
    profile: CircuitProfile,
    gale: GaleSystem,
    s: Option<SignSequence>,
    bounds: Option<BoundReport>,
}

fn structure(instance: &Instance) -> Result<Structure> {
    check_dimensions(&instance.config, &instance.coefficients)?;
    let profile = circuit_profile(&instance.config);
    let gale = analyze_gale(&instance.coefficients);
    let (s, bounds) = if gale.halfspace_ok() {
        let s = s_alpha(&gale, &profile)?;
        let bounds = assemble_report(&profile, &gale, &s)?;
        (Some(s), Some(bounds))
    } else {
        (None, None)
    };
    Ok(Structure {
        profile,
        gale,
        s,
        bounds,
    })
}

fn base_report(instance: &Instance, st: Structure) -> RunReport {
    let mut notes = Vec::new();
    if !st.gale.halfspace_ok() {
        notes.push(
            "no positive kernel vector: the system has no positive solutions and every bound holds"
                .into(),
        );
    }
    if !st.profile.is_circuit {
        notes.push(format!(
            "pyramid (points {:?} off the relation): multiplicities follow the circuit-case bijection",
            st.profile.zero_support
        ));
    }
    RunReport {
        instance_label: instance.label.clone(),
        n: instance.n(),
        halfspace_ok: st.gale.halfspace_ok(),
        ordering: st.gale.ordering().map(|o| OrderingSummary {
            alpha: o.alpha.clone(),
            classes: o.classes.clone(),
            k: o.k(),
        }),
        profile: st.profile,
        s_alpha: st.s,
        bounds: st.bounds,
        count: None,
        verdict: None,
        violations: Vec::new(),
        notes,
        timing_ms: 0.0,
    }
}

fn elapsed_ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

/// Structure and bounds, without counting.
pub fn analyze(instance: &Instance) -> Result<RunReport> {
    let start = Instant::now();
    let mut report = base_report(instance, structure(instance)?);
    report.timing_ms = elapsed_ms(start);
    Ok(report)
}

/// Exact count only.
pub fn count(instance: &Instance) -> Result<CountReport> {
    let start = Instant::now();
    check_dimensions(&instance.config, &instance.coefficients)?;
    let gale = analyze_gale(&instance.coefficients);
    let count = count_with_gale(&instance.config, &gale, CountMethod::default())?;
    Ok(CountReport {
        instance_label: instance.label.clone(),
        count,
        timing_ms: elapsed_ms(start),
    })
}

/// Structure, bounds, exact count and the verdict comparing them.
pub fn verify(instance: &Instance) -> Result<RunReport> {
    verify_with(instance, CountMethod::default())
}

pub fn verify_with(instance: &Instance, method: CountMethod) -> Result<RunReport> {
    let start = Instant::now();
    let st = structure(instance)?;
    let count = count_with_gale(&instance.config, &st.gale, method)?;
    let mut report = base_report(instance, st);
    let (verdict, violations) = judge(report.bounds.as_ref(), &count);
    report.count = Some(count);
    report.verdict = Some(verdict);
    report.violations = violations;
    report.timing_ms = elapsed_ms(start);
    Ok(report)
}

impl RunReport {
    /// Adds a caller-supplied cap on the count; exceeding it is a violation.
    pub fn assert_at_most(&mut self, cap: usize) {
        let Some(found) = self.count.and_then(|c| c.finite_count()) else {
            return;
        };
        if found > cap {
            self.violations
                .push(format!("count {found} exceeds the asserted bound {cap}"));
            self.verdict = Some(Verdict::Violation);
        }
    }
}

fn judge(bounds: Option<&BoundReport>, count: &CountResult) -> (Verdict, Vec<String>) {
    let Some(b) = bounds else {
        return match count {
            CountResult::NoPositiveSolutions { .. } => (Verdict::Ok, Vec::new()),
            other => (
                Verdict::Violation,
                vec![format!("{other:?} although no positive kernel vector exists")],
            ),
        };
    };
    let found = match count {
        CountResult::Infinite => {
            return (Verdict::NotApplicable, vec!["infinitely many solutions".into()])
        }
        _ if b.finiteness == Finiteness::PossiblyInfinite => {
            return (
                Verdict::NotApplicable,
                vec!["all class sums vanish: finiteness is not guaranteed".into()],
            )
        }
        other => other.finite_count().expect("finite"),
    };
    let mut violations = Vec::new();
    for (name, bound) in [
        ("sign variation", b.sgnvar_bound),
        ("lattice volume", b.vol_bound),
        ("k - 1", b.k_minus_1),
        ("signature", b.signature_bound),
    ] {
        if found > bound {
            violations.push(format!("count {found} exceeds the {name} bound {bound}"));
        }
    }
    if let Parity::Applies { expected } = b.parity {
        if ParityClass::of(found) != expected {
            violations.push(format!(
                "count {found} has parity {:?}, sign variation {} predicts {expected:?}",
                ParityClass::of(found),
                b.sgnvar_bound
            ));
        }
    }
    if violations.is_empty() {
        (Verdict::Ok, violations)
    } else {
        (Verdict::Violation, violations)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FuzzSpec {
    pub n_max: usize,
    pub trials: usize,
    pub seed: u64,
    pub require_halfspace: bool,
    /// Worker threads; `None` uses the global pool.
    pub jobs: Option<usize>,
}

/// One fuzz trial; `n` cycles through `1..=n_max`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trial {
    pub index: usize,
    pub n: usize,
    pub seed: u64,
    pub count: Option<CountResult>,
    pub verdict: Option<Verdict>,
    pub violations: Vec<String>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FuzzSummary {
    pub trials: usize,
    pub ok: usize,
    pub not_applicable: usize,
    pub violations: usize,
    pub errors: usize,
    /// Finite counts with multiplicity, by value; no positive solutions counts as 0.
    pub histogram: BTreeMap<usize, usize>,
    /// Largest finite count per dimension.
    pub max_count_by_n: BTreeMap<usize, usize>,
    /// Trials with a violation or an error, in seed order.
    pub failures: Vec<Trial>,
}

impl FuzzSummary {
    pub fn passed(&self) -> bool {
        self.violations == 0 && self.errors == 0
    }
}

/// Seed of trial `index`; distinct trials get well-separated seeds.
pub fn trial_seed(seed: u64, index: usize) -> u64 {
    let mut z = seed ^ (index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn run_trial(spec: &FuzzSpec, index: usize) -> Trial {
    let n = 1 + index % spec.n_max;
    let seed = trial_seed(spec.seed, index);
    let mut trial = Trial {
        index,
        n,
        seed,
        count: None,
        verdict: None,
        violations: Vec::new(),
        error: None,
    };
    let random = RandomSpec {
        require_halfspace: spec.require_halfspace,
        ..RandomSpec::new(n, seed)
    };
    match random_instance(&random).and_then(|inst| verify(&inst)) {
        Ok(report) => {
            trial.count = report.count;
            trial.verdict = report.verdict;
            trial.violations = report.violations;
        }
        Err(e) => trial.error = Some(e.to_string()),
    }
    trial
}

pub fn fuzz(spec: &FuzzSpec) -> Result<FuzzSummary> {
    if spec.n_max == 0 {
        return Err(Error::Domain("n_max must be at least 1".into()));
    }
    let run = || -> Vec<Trial> {
        (0..spec.trials)
            .into_par_iter()
            .map(|i| run_trial(spec, i))
            .collect()
    };
    let trials = match spec.jobs {
        Some(jobs) => rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| Error::Domain(format!("cannot start {jobs} workers: {e}")))?
            .install(run),
        None => run(),
    };
    Ok(summarize(trials))
}

/// Folds trials in index order, so the summary does not depend on scheduling.
pub fn summarize(mut trials: Vec<Trial>) -> FuzzSummary {
    trials.sort_by_key(|t| t.index);
    let mut summary = FuzzSummary {
        trials: trials.len(),
        ..FuzzSummary::default()
    };
    for trial in trials {
        if let Some(found) = trial.count.and_then(|c| c.finite_count()) {
            *summary.histogram.entry(found).or_default() += 1;
            let best = summary.max_count_by_n.entry(trial.n).or_default();
            *best = (*best).max(found);
        }
        match (&trial.error, trial.verdict) {
            (Some(_), _) | (None, None) => summary.errors += 1,
            (None, Some(Verdict::Ok)) => summary.ok += 1,
            (None, Some(Verdict::NotApplicable)) => summary.not_applicable += 1,
            (None, Some(Verdict::Violation)) => summary.violations += 1,
        }
        if trial.error.is_some() || trial.verdict == Some(Verdict::Violation) {
            summary.failures.push(trial);
        }
    }
    summary
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;
    use crate::forge::family_prs;
    use crate::gale::CoefficientMatrix;

    #[test]
    fn family_verifies_at_the_bound() {
        let report = verify(&family_prs(3, &rat(1, 4)).unwrap()).unwrap();
        assert_eq!(report.verdict, Some(Verdict::Ok));
        assert_eq!(
            report.count,
            Some(CountResult::Finite {
                distinct: 4,
                with_multiplicity: 4
            })
        );
        assert_eq!(report.bounds.unwrap().combined, 4);
    }

    #[test]
    fn infinite_square_is_not_applicable() {
        let inst = Instance::new(
            crate::circuit::ExponentConfig::new(vec![
                vec![0, 0],
                vec![1, 0],
                vec![0, 1],
                vec![1, 1],
            ])
            .unwrap(),
            CoefficientMatrix::from_i64_rows(&[vec![1, -1, -1, 1], vec![1, -1, 1, -1]]).unwrap(),
        )
        .unwrap();
        let report = verify(&inst).unwrap();
        assert_eq!(report.count, Some(CountResult::Infinite));
        assert_eq!(report.verdict, Some(Verdict::NotApplicable));
    }

    #[test]
    fn judge_flags_excess_and_parity() {
        let mut bounds = verify(&family_prs(2, &rat(1, 4)).unwrap())
            .unwrap()
            .bounds
            .unwrap();
        let four = CountResult::Finite {
            distinct: 4,
            with_multiplicity: 4,
        };
        let (verdict, why) = judge(Some(&bounds), &four);
        assert_eq!(verdict, Verdict::Violation);
        assert_eq!(why.len(), 5);
        bounds.sgnvar_bound = 5;
        bounds.combined = 5;
        let two = CountResult::Finite {
            distinct: 2,
            with_multiplicity: 2,
        };
        assert_eq!(judge(Some(&bounds), &two).0, Verdict::Violation);
    }

    #[test]
    fn fuzz_is_deterministic_across_pools() {
        let spec = FuzzSpec {
            n_max: 3,
            trials: 60,
            seed: 7,
            require_halfspace: false,
            jobs: Some(1),
        };
        let one = fuzz(&spec).unwrap();
        let many = fuzz(&FuzzSpec {
            jobs: Some(3),
            ..spec.clone()
        })
        .unwrap();
        assert_eq!(one, many);
        assert!(one.passed());
        assert_eq!(one.trials, 60);
    }
}
