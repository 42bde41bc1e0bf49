//! Desk-scale versions of the success-rate, efficiency and resilience
//! experiments on randomly generated `Pr(X1, X2, Y)`.
//!
//! Every trial derives its own seed from the master seed, so results do not
//! depend on the number of worker threads.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::info::mutual_info;
use crate::jointpmf::JointPmf;
use crate::seeds::sub_seed;
use crate::srv::{find_srv, SearchConfig, SrvResult};
use crate::stats::{mood_median_test, quartiles};
use crate::synergy::srv_upper_bound;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SrvExperimentConfig {
    pub trials: usize,
    pub states: Vec<usize>,
    pub seed: u64,
    pub search: SearchConfig,
}

impl Default for SrvExperimentConfig {
    fn default() -> Self {
        Self { trials: 30, states: vec![2, 3, 4], seed: 0, search: SearchConfig::default() }
    }
}

impl SrvExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials < 10 {
            return Err(Error::InvalidConfig(format!("trials = {} but at least 10 are needed", self.trials)));
        }
        if self.states.is_empty() || self.states.iter().any(|&m| m < 2) {
            return Err(Error::InvalidConfig("states must be a non-empty list of values >= 2".into()));
        }
        self.search.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ResilienceConfig {
    pub trials: usize,
    /// Length of the perturbation step in hypercube coordinates.
    pub norm: f64,
    pub states: usize,
    pub seed: u64,
    /// Search attempts (with fresh seeds) for a successful SRV per trial.
    pub srv_attempts: usize,
    /// Allowed total-variation drift of the marginals under a non-local step.
    pub marginal_tol: f64,
    pub search: SearchConfig,
}

impl Default for ResilienceConfig {
    fn default() -> Self {
        Self {
            trials: 50,
            norm: 0.1,
            states: 3,
            seed: 0,
            srv_attempts: 5,
            marginal_tol: 1e-6,
            search: SearchConfig::default(),
        }
    }
}

impl ResilienceConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 || self.srv_attempts == 0 {
            return Err(Error::InvalidConfig("trials and srv_attempts must be positive".into()));
        }
        if !(self.norm >= 0.0) || !(self.marginal_tol > 0.0) {
            return Err(Error::InvalidConfig("norm must be >= 0 and marginal_tol > 0".into()));
        }
        if self.states < 2 {
            return Err(Error::InvalidConfig(format!("states = {} must be at least 2", self.states)));
        }
        self.search.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    /// e.g. `states=3` or `srv/local`.
    pub group: String,
    pub states: usize,
    pub trial: usize,
    pub seed: u64,
    pub succeeded: bool,
    /// The quantity summarized for the group; `None` when undefined.
    pub value: Option<f64>,
    pub details: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupSummary {
    pub group: String,
    pub states: usize,
    pub trials: usize,
    pub successes: usize,
    pub success_rate: f64,
    /// Quartiles of `value` over successful trials.
    pub q25: Option<f64>,
    pub median: Option<f64>,
    pub q75: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MedianTestRecord {
    pub name: String,
    pub group_a: String,
    pub group_b: String,
    pub chi_square: f64,
    pub p_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub experiment: String,
    pub config: serde_json::Value,
    pub records: Vec<TrialRecord>,
    pub groups: Vec<GroupSummary>,
    pub tests: Vec<MedianTestRecord>,
    pub runtime_seconds: f64,
}

impl ExperimentReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn group(&self, name: &str) -> Option<&GroupSummary> {
        self.groups.iter().find(|g| g.group == name)
    }

    pub fn test(&self, name: &str) -> Option<&MedianTestRecord> {
        self.tests.iter().find(|t| t.name == name)
    }

    /// Successful values of a group, in trial order.
    pub fn values(&self, group: &str) -> Vec<f64> {
        self.records
            .iter()
            .filter(|r| r.group == group && r.succeeded)
            .filter_map(|r| r.value)
            .collect()
    }

    /// Plot-ready summary table.
    ///
    /// `fig2`: `states,trials,success_rate,err_q25,err_median,err_q75`;
    /// `fig3`: the same with `ratio_` columns;
    /// `fig4`: `arm,perturbation,trials,q25,median,q75,chi_square,p_value`.
    pub fn to_csv(&self) -> String {
        let opt = |v: Option<f64>| v.map(|x| format!("{x:.10}")).unwrap_or_default();
        let mut out = String::new();
        match self.experiment.as_str() {
            "fig4" => {
                out.push_str("arm,perturbation,trials,q25,median,q75,chi_square,p_value\n");
                for g in &self.groups {
                    let (arm, kind) = g.group.split_once('/').unwrap_or((&g.group, ""));
                    let test = self.test(kind);
                    let _ = writeln!(
                        out,
                        "{arm},{kind},{},{},{},{},{},{}",
                        g.successes,
                        opt(g.q25),
                        opt(g.median),
                        opt(g.q75),
                        opt(test.map(|t| t.chi_square)),
                        opt(test.map(|t| t.p_value)),
                    );
                }
            }
            kind => {
                let prefix = if kind == "fig3" { "ratio" } else { "err" };
                let _ = writeln!(out, "states,trials,success_rate,{prefix}_q25,{prefix}_median,{prefix}_q75");
                for g in &self.groups {
                    let _ = writeln!(
                        out,
                        "{},{},{:.10},{},{},{}",
                        g.states,
                        g.trials,
                        g.success_rate,
                        opt(g.q25),
                        opt(g.median),
                        opt(g.q75)
                    );
                }
            }
        }
        out
    }
}

fn summarize(group: &str, states: usize, records: &[TrialRecord]) -> GroupSummary {
    let mine: Vec<&TrialRecord> = records.iter().filter(|r| r.group == group).collect();
    let successes = mine.iter().filter(|r| r.succeeded).count();
    let values: Vec<f64> = mine.iter().filter(|r| r.succeeded).filter_map(|r| r.value).collect();
    let q = quartiles(&values);
    GroupSummary {
        group: group.to_string(),
        states,
        trials: mine.len(),
        successes,
        success_rate: if mine.is_empty() { 0.0 } else { successes as f64 / mine.len() as f64 },
        q25: q.map(|q| q[0]),
        median: q.map(|q| q[1]),
        q75: q.map(|q| q[2]),
    }
}

struct SrvTrial {
    states: usize,
    trial: usize,
    seed: u64,
    result: SrvResult,
    upper_bound: f64,
}

fn srv_trials(config: &SrvExperimentConfig) -> Result<Vec<SrvTrial>> {
    config.validate()?;
    let jobs: Vec<(usize, usize)> = config
        .states
        .iter()
        .flat_map(|&m| (0..config.trials).map(move |t| (m, t)))
        .collect();
    jobs.into_par_iter()
        .map(|(m, trial)| {
            let seed = sub_seed(sub_seed(config.seed, m as u64), trial as u64);
            let pmf = JointPmf::random(&[m, m, m], seed)?;
            let search = config.search.clone().with_seed(sub_seed(seed, 1));
            let result = find_srv(&pmf, &[0, 1], &search)?;
            let upper_bound = srv_upper_bound(&pmf, &[0, 1])?;
            Ok(SrvTrial { states: m, trial, seed, result, upper_bound })
        })
        .collect()
}

fn srv_report(experiment: &str, config: &SrvExperimentConfig, start: Instant, value: impl Fn(&SrvTrial) -> Option<f64>) -> Result<ExperimentReport> {
    let trials = srv_trials(config)?;
    let records: Vec<TrialRecord> = trials
        .iter()
        .map(|t| TrialRecord {
            group: format!("states={}", t.states),
            states: t.states,
            trial: t.trial,
            seed: t.seed,
            succeeded: t.result.succeeded,
            value: value(t),
            details: BTreeMap::from([
                ("mi_with_x".to_string(), t.result.mi_with_x),
                ("leakage_sum".to_string(), t.result.leakage_sum()),
                ("upper_bound".to_string(), t.upper_bound),
            ]),
        })
        .collect();
    let groups = config
        .states
        .iter()
        .map(|&m| summarize(&format!("states={m}"), m, &records))
        .collect();
    Ok(ExperimentReport {
        experiment: experiment.to_string(),
        config: serde_json::to_value(config)?,
        records,
        groups,
        tests: Vec::new(),
        runtime_seconds: start.elapsed().as_secs_f64(),
    })
}

/// How often a single SRV is found within the relative-error threshold, and
/// the relative error of the ones found, per number of input states.
pub fn cmd_fig2(config: &SrvExperimentConfig) -> Result<ExperimentReport> {
    let start = Instant::now();
    srv_report("fig2", config, start, |t| t.result.relative_error.is_finite().then_some(t.result.relative_error))
}

/// `I(S : X)` of a successful SRV relative to the largest value any SRV
/// can reach, per number of input states.
pub fn cmd_fig3(config: &SrvExperimentConfig) -> Result<ExperimentReport> {
    let start = Instant::now();
    srv_report("fig3", config, start, |t| (t.upper_bound > 0.0).then(|| t.result.mi_with_x / t.upper_bound))
}

const ARMS: [&str; 2] = ["random", "srv"];
const KINDS: [&str; 2] = ["local", "nonlocal"];

/// `|I_after - I_before| / I_before` for `I = I(X1, X2 : Y)`.
fn relative_change(before: &JointPmf, after: &JointPmf) -> Result<Option<f64>> {
    let b = mutual_info(before, &[0, 1], &[2])?;
    let a = mutual_info(after, &[0, 1], &[2])?;
    Ok((b > 0.0).then(|| (a - b).abs() / b))
}

fn resilience_trial(config: &ResilienceConfig, trial: usize) -> Result<Vec<TrialRecord>> {
    let m = config.states;
    let seed = sub_seed(config.seed, trial as u64);
    // shared inputs for both arms
    let random = JointPmf::random(&[m, m, m], seed)?;
    let inputs = random.marginal(&[0, 1])?;

    let mut srv = None;
    let mut attempts = 0;
    for attempt in 0..config.srv_attempts {
        attempts = attempt + 1;
        let search = config.search.clone().with_seed(sub_seed(seed, 100 + attempt as u64));
        let found = find_srv(&inputs, &[0, 1], &search)?;
        let done = found.succeeded;
        srv = Some(found);
        if done {
            break;
        }
    }
    let srv = srv.expect("at least one attempt");
    let synergistic = inputs.append_variable(&srv.cond)?;

    let mut rng = ChaCha8Rng::seed_from_u64(sub_seed(seed, 2));
    let local_var = rng.random_range(0..2usize);
    let perturb_seed = sub_seed(seed, 3);
    let mut records = Vec::with_capacity(4);
    for (arm, pmf) in ARMS.iter().zip([&random, &synergistic]) {
        for kind in KINDS {
            let perturbed = if kind == "local" {
                pmf.perturb_local(local_var, config.norm, perturb_seed)?
            } else {
                pmf.perturb_nonlocal(0, 1, config.norm, perturb_seed, config.marginal_tol)?
            };
            let value = relative_change(pmf, &perturbed.pmf)?;
            let succeeded = (*arm == "random" || srv.succeeded) && value.is_some();
            let mut details = BTreeMap::from([
                ("mi_before".to_string(), mutual_info(pmf, &[0, 1], &[2])?),
                ("mi_after".to_string(), mutual_info(&perturbed.pmf, &[0, 1], &[2])?),
                ("realized_norm".to_string(), perturbed.realized_norm),
            ]);
            if *arm == "srv" {
                details.insert("srv_relative_error".to_string(), srv.relative_error);
                details.insert("srv_attempts".to_string(), attempts as f64);
            }
            records.push(TrialRecord {
                group: format!("{arm}/{kind}"),
                states: m,
                trial,
                seed,
                succeeded,
                value,
                details,
            });
        }
    }
    Ok(records)
}

/// Impact of small perturbations on `I(X1, X2 : Y)` for a random `Y`
/// versus an SRV `Y`, with Mood's median test per perturbation type.
pub fn cmd_fig4(config: &ResilienceConfig) -> Result<ExperimentReport> {
    let start = Instant::now();
    config.validate()?;
    let per_trial: Vec<Vec<TrialRecord>> = (0..config.trials)
        .into_par_iter()
        .map(|t| resilience_trial(config, t))
        .collect::<Result<_>>()?;
    let records: Vec<TrialRecord> = per_trial.into_iter().flatten().collect();
    let mut groups = Vec::new();
    for arm in ARMS {
        for kind in KINDS {
            groups.push(summarize(&format!("{arm}/{kind}"), config.states, &records));
        }
    }
    let mut report = ExperimentReport {
        experiment: "fig4".to_string(),
        config: serde_json::to_value(config)?,
        records,
        groups,
        tests: Vec::new(),
        runtime_seconds: 0.0,
    };
    for kind in KINDS {
        let (a, b) = (format!("random/{kind}"), format!("srv/{kind}"));
        let (va, vb) = (report.values(&a), report.values(&b));
        let (chi_square, p_value) = if va.is_empty() || vb.is_empty() {
            (0.0, 1.0)
        } else {
            let t = mood_median_test(&va, &vb)?;
            (t.chi_square, t.p_value)
        };
        report.tests.push(MedianTestRecord { name: kind.to_string(), group_a: a, group_b: b, chi_square, p_value });
    }
    report.runtime_seconds = start.elapsed().as_secs_f64();
    Ok(report)
}
