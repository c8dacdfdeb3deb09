use std::fmt::Write as _;
use std::path::PathBuf;

use num_traits::ToPrimitive;

use super::config::{ClassKind, Experiment, ExperimentConfig};
use super::csv::{fmt_f64, CsvTable};
use crate::constructions::{dense_experiment, divergence_example, gap_experiment, DenseConfig};
use crate::diagnostics::{
    exact_expected_sum, mc_expected_sum, ExpectationJob, Functional,
};
use crate::error::{Error, Result};
use crate::measure::{BernoulliModel, ParamClass, Seq};
use crate::mixture::{dominance_check, Mixture};
use crate::solomonoff::{
    check_prefix_free, literal_programs, Budget, Dyadic, ProgramFamilyMachine, StagedApprox,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckStatus {
    Pass,
    Fail,
    /// Reported, not asserted.
    Info,
}

impl CheckStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            CheckStatus::Pass => "pass",
            CheckStatus::Fail => "fail",
            CheckStatus::Info => "info",
        }
    }
}

/// One line of `summary.tsv`.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub status: CheckStatus,
    pub value: f64,
    pub bound: f64,
}

impl Check {
    /// Passes when `value ≤ bound`.
    pub fn at_most(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self::new(name, value <= bound, value, bound)
    }

    /// Passes when `value > bound`.
    pub fn above(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self::new(name, value > bound, value, bound)
    }

    pub fn new(name: impl Into<String>, passed: bool, value: f64, bound: f64) -> Self {
        Check {
            name: name.into(),
            status: if passed { CheckStatus::Pass } else { CheckStatus::Fail },
            value,
            bound,
        }
    }

    pub fn info(name: impl Into<String>, value: f64) -> Self {
        Check {
            name: name.into(),
            status: CheckStatus::Info,
            value,
            bound: f64::NAN,
        }
    }

    pub fn passed(&self) -> bool {
        self.status != CheckStatus::Fail
    }
}

/// What a run produced.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub experiment: Experiment,
    pub anchor: &'static str,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
    pub files: Vec<PathBuf>,
}

impl RunOutcome {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    /// Contents of `summary.tsv`.
    pub fn summary(&self) -> String {
        let mut out = String::from("check\tstatus\tvalue\tbound\n");
        let _ = writeln!(out, "anchor\tinfo\t{}\t-", self.anchor);
        for c in &self.checks {
            let bound = if c.bound.is_nan() { "-".to_string() } else { fmt_f64(c.bound) };
            let _ = writeln!(out, "{}\t{}\t{}\t{}", c.name, c.status.as_str(), fmt_f64(c.value), bound);
        }
        for n in &self.notes {
            let _ = writeln!(out, "note\tinfo\t{n}\t-");
        }
        out
    }
}

/// Exit status for a run: 0 when every check passes, 1 when one fails, 2 when
/// the configuration could not be run.
pub fn exit_code(result: &Result<RunOutcome>) -> i32 {
    match result {
        Ok(o) if o.all_passed() => 0,
        Ok(_) => 1,
        Err(_) => 2,
    }
}

struct Produced {
    anchor: &'static str,
    checks: Vec<Check>,
    notes: Vec<String>,
    tables: Vec<(String, String)>,
}

/// Runs the configured experiment and writes its CSV, `summary.tsv` and the
/// effective `config.txt` into `config.out`.
pub fn run(config: &ExperimentConfig) -> Result<RunOutcome> {
    config.validate()?;
    let produced = match config.experiment {
        Experiment::Dominance => run_dominance(config),
        Experiment::ConvergeExact => run_converge_exact(config),
        Experiment::ConvergeMc => run_converge_mc(config),
        Experiment::Gap => run_gap(config),
        Experiment::Dense => run_dense(config),
        Experiment::Diverge => run_diverge(config),
        Experiment::SolomonoffInvariants => run_solomonoff(config),
    }
    .map_err(|e| match e {
        Error::Configuration(_) => e,
        other => Error::Configuration(other.to_string()),
    })?;
    let mut outcome = RunOutcome {
        experiment: config.experiment,
        anchor: produced.anchor,
        checks: produced.checks,
        notes: produced.notes,
        files: Vec::new(),
    };
    let io = |e: std::io::Error| Error::Configuration(format!("cannot write to {}: {e}", config.out.display()));
    std::fs::create_dir_all(&config.out).map_err(io)?;
    let mut files: Vec<(String, String)> = produced.tables;
    files.push(("summary.tsv".into(), outcome.summary()));
    files.push(("config.txt".into(), config.serialize()));
    for (name, body) in files {
        let path = config.out.join(name);
        std::fs::write(&path, body).map_err(io)?;
        outcome.files.push(path);
    }
    Ok(outcome)
}

/// The parameter class named by the configuration.
pub fn build_class(config: &ExperimentConfig) -> Result<ParamClass> {
    let (lo, hi) = config.gap.clone();
    match config.class {
        ClassKind::Dense => ParamClass::dense(config.q),
        ClassKind::Gapped if config.thetas.is_empty() => ParamClass::gapped_rationals(config.q, lo, hi),
        ClassKind::Gapped => ParamClass::gapped(config.thetas.clone(), lo, hi),
        ClassKind::Custom => ParamClass::custom(config.thetas.clone()),
    }
}

fn mixture_and_truth(config: &ExperimentConfig) -> Result<(Mixture, BernoulliModel)> {
    let class = build_class(config)?;
    if !class.contains(&config.theta_true) {
        return Err(Error::Configuration(format!(
            "theta_true = {} is not a member of the class",
            config.theta_true
        )));
    }
    let mix = Mixture::from_class(&class, &config.weight_choice())?;
    Ok((mix, BernoulliModel::new(config.theta_true.clone())?))
}

fn run_dominance(config: &ExperimentConfig) -> Result<Produced> {
    let mix = Mixture::from_class(&build_class(config)?, &config.weight_choice())?;
    let report = dominance_check(&mix, config.n, config.backend)?;
    let mut table = CsvTable::new(&["check", "status", "slack"]);
    let mut checks = Vec::new();
    for c in &report.components {
        let name = format!("dominance[{}]", c.name);
        let ok = c.min_slack_exact.as_ref().map_or(c.min_slack >= 1.0 - 1e-12, |s| {
            *s >= num_rational::BigRational::from_integer(1.into())
        });
        let status = if ok { "pass" } else { "fail" };
        table.push(vec![name.clone(), status.into(), fmt_f64(c.min_slack)])?;
        checks.push(Check::new(name, ok, c.min_slack, 1.0));
    }
    checks.push(Check::info("strings_checked", report.checks as f64));
    Ok(Produced {
        anchor: "Bayes mixture dominance xi(x) >= w_nu nu(x) for every component",
        checks,
        notes: vec![format!("slack is min over x of xi(x) / (w_nu nu(x)); backend {:?}", report.backend)],
        tables: vec![("dominance.csv".into(), table.render())],
    })
}

fn converge_table(per_step: &[f64], bound: f64) -> Result<CsvTable> {
    let mut table = CsvTable::new(&["t", "hellinger_term", "cumulative", "bound"]);
    let mut acc = 0.0;
    for (i, v) in per_step.iter().enumerate() {
        acc += v;
        table.push_step(i + 1, &[*v, acc, bound])?;
    }
    Ok(table)
}

fn run_converge_exact(config: &ExperimentConfig) -> Result<Produced> {
    let (mix, truth) = mixture_and_truth(config)?;
    let job = ExpectationJob::new(&mix, &truth, config.n);
    let hellinger = exact_expected_sum(&job)?;
    let ratio = exact_expected_sum(&job.functional(Functional::Ratio))?;
    let squared = exact_expected_sum(&job.functional(Functional::SquaredDiff))?;
    let tol = 1e-9;
    Ok(Produced {
        anchor: "convergence of xi to mu: expected Hellinger sum at most ln(1/w_mu)",
        checks: vec![
            Check::at_most("hellinger_sum", hellinger.value, hellinger.bound + tol),
            Check::at_most("ratio_form_sum", ratio.value, ratio.bound + tol),
            Check::at_most("squared_diff_sum", squared.value, squared.bound + tol),
        ],
        notes: vec![format!("squared_diff_sum bound is {}", squared.envelope.label())],
        tables: vec![("converge.csv".into(), converge_table(&hellinger.per_step, hellinger.bound)?.render())],
    })
}

fn run_converge_mc(config: &ExperimentConfig) -> Result<Produced> {
    if config.n < 10 {
        return Err(Error::Configuration("converge-mc needs n ≥ 10".into()));
    }
    let (mix, truth) = mixture_and_truth(config)?;
    let job = ExpectationJob::new(&mix, &truth, config.n).monte_carlo(config.seed, config.samples);
    let est = mc_expected_sum(&job)?;
    let n = config.n;
    let early = est.window_mean(1, n / 10);
    let late = est.window_mean(n - n / 10 + 1, n);
    Ok(Produced {
        anchor: "convergence in mean sum: Monte Carlo estimate of the Hellinger sum",
        checks: vec![
            Check::at_most("mean_cumulative_hellinger", est.estimate, est.bound),
            Check::at_most("late_to_early_decay", late, early / 10.0),
            Check::info("stderr", est.stderr),
        ],
        notes: vec![format!("{} paths, seed {}", est.samples, config.seed)],
        tables: vec![("converge.csv".into(), converge_table(&est.per_step_mean, est.bound)?.render())],
    })
}

/// Largest value over the second half minus the largest over the first half.
fn late_growth(running_sup: &[f64]) -> f64 {
    let half = running_sup.len() / 2;
    match (running_sup.get(half.saturating_sub(1)), running_sup.last()) {
        (Some(a), Some(b)) => b - a,
        _ => 0.0,
    }
}

/// Running suprema may creep up by this much after the first half before a
/// bounded trace is called unbounded.
const FLAT_TOLERANCE: f64 = 0.05;

fn run_gap(config: &ExperimentConfig) -> Result<Produced> {
    let class = build_class(config)?;
    if class.gap().is_none() {
        return Err(Error::Configuration("gap needs class = gapped".into()));
    }
    let r = gap_experiment(&class, &config.weight_choice(), config.n)?;
    let mut table = CsvTable::new(&["t", "predictive_1", "deficiency_theta0", "deficiency_theta1"]);
    for t in 0..r.predictive.len() {
        table.push_step(
            t + 1,
            &[r.predictive[t], r.deficiency0.log_ratios[t], r.deficiency1.log_ratios[t]],
        )?;
    }
    let freq_err = (r.ones_frequency - r.balance_frequency).abs();
    Ok(Produced {
        anchor: "gapped class: a sequence random for both gap endpoints on which the predictive does not converge",
        checks: vec![
            Check::at_most("state_bounded", r.max_abs_state, r.state_bound),
            Check::at_most("frequency_law", freq_err, r.frequency_error_bound() + 1e-12),
            Check::above("margin_theta0", r.distance_theta0, 0.0),
            Check::above("margin_theta1", r.distance_theta1, 0.0),
            Check::at_most("deficiency_theta0_flat", late_growth(&r.deficiency0.running_sup), FLAT_TOLERANCE),
            Check::at_most("deficiency_theta1_flat", late_growth(&r.deficiency1.running_sup), FLAT_TOLERANCE),
            Check::info("deficiency_theta0_sup", r.deficiency0.sup()),
            Check::info("deficiency_theta1_sup", r.deficiency1.sup()),
            Check::info("window_spread", r.window_spread()),
        ],
        notes: vec![format!(
            "window t in [{}, {}]; greedy sequence for theta0 = {}, theta1 = {}",
            r.window.0, r.window.1, r.theta0, r.theta1
        )],
        tables: vec![("gap.csv".into(), table.render())],
    })
}

/// Mean last-decade deviation accepted for a dense class run.
pub const DENSE_DEVIATION_BOUND: f64 = 0.02;

fn run_dense(config: &ExperimentConfig) -> Result<Produced> {
    let cfg = DenseConfig {
        class: build_class(config)?,
        weights: config.weight_choice(),
        theta_true: config.theta_true.clone(),
        n: config.n,
        seed: config.seed,
        paths: config.samples,
    };
    let r = dense_experiment(&cfg)?;
    let mut table = CsvTable::new(&["t", "predictive_1", "deficiency_theta0", "deficiency_theta1"]);
    let tr = &r.trace;
    for t in 0..tr.predictive.len() {
        let nearest = tr.deficiency_nearest.get(t).copied().unwrap_or(f64::NAN);
        table.push_step(t + 1, &[tr.predictive[t], tr.deficiency_true[t], nearest])?;
    }
    let mut checks = Vec::new();
    if r.in_class {
        checks.push(Check::at_most(
            "mean_last_decade_deviation",
            r.mean_last_decade_deviation,
            DENSE_DEVIATION_BOUND,
        ));
    } else {
        checks.push(Check::info("mean_last_decade_deviation", r.mean_last_decade_deviation));
    }
    checks.push(Check::info("max_deficiency_sup", r.max_deficiency_sup()));
    let mut notes = vec![format!(
        "{} paths from B({}); column 3 is against theta_true, column 4 against the nearest other member{}",
        r.paths.len(),
        r.theta_true,
        tr.nearest_theta.as_ref().map(|t| format!(" ({t})")).unwrap_or_default()
    )];
    notes.extend(r.warning.clone());
    Ok(Produced {
        anchor: "dense class: the predictive converges to mu on mu-random sequences",
        checks,
        notes,
        tables: vec![("dense.csv".into(), table.render())],
    })
}

fn run_diverge(config: &ExperimentConfig) -> Result<Produced> {
    let r = divergence_example(config.n)?;
    let mut table = CsvTable::new(&["t", "ratio"]);
    for (i, v) in r.ratios.iter().enumerate() {
        table.push_step(i + 1, &[*v])?;
    }
    let growth = if config.n >= 10_000 {
        let (lo, hi) = crate::constructions::GROWTH_RANGE;
        Check::new("linear_growth", r.growth_in_range(), r.growth(), if r.growth() < lo { lo } else { hi })
    } else {
        Check::info("linear_growth", r.growth())
    };
    Ok(Produced {
        anchor: "xi(1|0_<t)/mu(1|0_<t) grows like t although the all-zeros sequence is mu-random",
        checks: vec![
            growth,
            Check::at_most("deficiency_sup", r.deficiency.sup(), 1e-12),
            Check::info("ratio_at_n", r.ratio_at(config.n)),
        ],
        notes: vec!["mu = vanishing(t^-3), nu = vanishing(t^-2), weights 1/2, 1/2".into()],
        tables: vec![("diverge.csv".into(), table.render())],
    })
}

fn run_solomonoff(config: &ExperimentConfig) -> Result<Produced> {
    let machine = ProgramFamilyMachine::default();
    let (l, t, h) = (config.max_bits, config.max_steps, config.n);
    let budget = Budget::new(l, t)?;
    let table = StagedApprox::build(&machine, budget, h)?;
    let mut rows = Vec::new();
    let mut checks = Vec::new();
    let mut add = |name: String, passed: bool, slack: f64, bound: f64| {
        rows.push(vec![name.clone(), if passed { "pass" } else { "fail" }.to_string(), fmt_f64(slack)]);
        checks.push(Check::new(name, passed, slack, bound));
    };

    let kraft = table.kraft_sum();
    add("kraft".into(), kraft <= Dyadic::ONE, 1.0 - kraft.to_f64(), 0.0);

    let (slack, at) = table.semimeasure_slack();
    add(format!("semimeasure[worst={at}]"), slack >= 0.0, slack, 0.0);

    let ls = [l / 2, 3 * l / 4, l];
    let ts = [(t / 100).max(1), (t / 10).max(1), t];
    let mut stages = Vec::new();
    for &li in &ls {
        for &ti in &ts {
            stages.push(((li, ti), StagedApprox::build(&machine, Budget::new(li, ti)?, h)?));
        }
    }
    let mut min_step = f64::INFINITY;
    let mut monotone = true;
    for ((la, ta), a) in &stages {
        for ((lb, tb), b) in &stages {
            if (la, ta) == (lb, tb) || la > lb || ta > tb {
                continue;
            }
            for x in machine_strings(&machine, h) {
                let (va, vb) = (a.value(&x)?, b.value(&x)?);
                monotone &= va <= vb;
                min_step = min_step.min(vb.to_f64() - va.to_f64());
            }
        }
    }
    add("monotone_stages".into(), monotone, min_step, 0.0);

    match table.strict_witness() {
        Some(x) => {
            let parent = table.value(&x)?.to_f64();
            let children: f64 = [0u8, 1]
                .iter()
                .map(|&a| table.value(&x.extended(a)).map(Dyadic::to_f64))
                .sum::<Result<f64>>()?;
            add(format!("strict_witness[{x}]"), true, parent - children, 0.0);
        }
        None => add("strict_witness".into(), false, 0.0, 0.0),
    }

    let pf_bits = l.min(16);
    let pf = check_prefix_free(&machine, pf_bits)?;
    add(format!("prefix_free[L={pf_bits}]"), pf.passed(), 1.0 - pf.kraft_sum.to_f64(), 0.0);

    let programs: Vec<(Seq, Vec<bool>)> = literal_programs(&machine, h)?
        .into_iter()
        .filter(|(x, p)| p.len() as u32 <= l && (p.len() + x.len()) as u64 <= t)
        .collect();
    let dominance = table.dominance(&programs)?;
    for d in &dominance {
        add(
            format!("dominance[{}]", d.output),
            d.holds,
            d.value.to_f64() - d.required.to_f64(),
            0.0,
        );
    }
    let count = dominance.len();
    checks.push(Check::info("registered_programs", count as f64));
    let m1 = table.value(&[1]).ok().map(Dyadic::to_f64).and_then(|v| v.to_f64());
    Ok(Produced {
        anchor: "stage M_{L,T} of the universal prior: Kraft, semimeasure, monotone stages, per-program dominance",
        checks,
        notes: vec![format!(
            "L = {l}, T = {t}, horizon {h}, {} nodes explored, M(1) = {}",
            table.nodes_explored(),
            m1.map(fmt_f64).unwrap_or_else(|| "-".into())
        )],
        tables: vec![
            ("solomonoff.csv".into(), render_rows(&rows)),
            ("programs.tsv".into(), table.listing()),
        ],
    })
}

fn machine_strings(machine: &ProgramFamilyMachine, h: usize) -> impl Iterator<Item = Seq> {
    use crate::solomonoff::MonotoneMachine;
    machine.alphabet().strings_up_to(h)
}

fn render_rows(rows: &[Vec<String>]) -> String {
    let mut t = CsvTable::new(&["check", "status", "slack"]);
    for r in rows {
        t.push(r.clone()).expect("three columns");
    }
    t.render()
}
