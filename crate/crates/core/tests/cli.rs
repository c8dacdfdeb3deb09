use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;
use unipred::cli::{run, Experiment, ExperimentConfig};

fn unipred(args: &[&str], threads: Option<usize>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_unipred"));
    cmd.args(args).arg("--quiet");
    if let Some(t) = threads {
        cmd.env("RAYON_NUM_THREADS", t.to_string());
    }
    cmd.output().expect("binary runs")
}

fn run_in(dir: &Path, args: &[&str]) -> i32 {
    let out = dir.to_str().unwrap();
    let mut all = args.to_vec();
    all.extend(["--out", out]);
    unipred(&all, None).status.code().unwrap()
}

fn header(path: &Path) -> String {
    fs::read_to_string(path).unwrap().lines().next().unwrap().to_string()
}

#[test]
fn prints_defaults_in_accepted_format() {
    let out = Command::new(env!("CARGO_BIN_EXE_unipred"))
        .arg("--print-defaults")
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let config = ExperimentConfig::parse(&text).unwrap();
    assert_eq!(config, ExperimentConfig::default());
    assert!(text.contains("n = 10000\n"));
    assert!(text.contains("backend = float\n"));
    assert!(text.contains("q = 8\n"));
}

#[test]
fn exact_dominance_on_two_point_class_exits_zero() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("dominance.cfg");
    fs::write(
        &cfg,
        "# two-point class\nexperiment = dominance\nclass = custom\nthetas = 1/4,1/2\nn = 8\nbackend = exact\n",
    )
    .unwrap();
    let code = run_in(dir.path(), &["--config", cfg.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(header(&dir.path().join("dominance.csv")), "check,status,slack");
    let summary = fs::read_to_string(dir.path().join("summary.tsv")).unwrap();
    assert!(summary.starts_with("check\tstatus\tvalue\tbound\nanchor\tinfo\t"));
    assert!(summary.contains("dominance[B(1/4)]\tpass\t"));
}

#[test]
fn malformed_config_exits_two() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("bad.cfg");
    fs::write(&cfg, "experiment = diverge\nhorizon = 10\n").unwrap();
    assert_eq!(run_in(dir.path(), &["--config", cfg.to_str().unwrap()]), 2);
    fs::write(&cfg, "experiment = diverge\nn = many\n").unwrap();
    assert_eq!(run_in(dir.path(), &["--config", cfg.to_str().unwrap()]), 2);
    assert_eq!(run_in(dir.path(), &["--experiment", "converge-exact", "--n", "30"]), 2);
    assert_eq!(run_in(dir.path(), &["--experiment", "gap"]), 2);
    assert_eq!(run_in(dir.path(), &["--backend", "quad"]), 2);
}

#[test]
fn failed_assertion_exits_one() {
    let dir = TempDir::new().unwrap();
    let code = run_in(dir.path(), &["--experiment", "dense", "--n", "20", "--samples", "4"]);
    assert_eq!(code, 1);
    let summary = fs::read_to_string(dir.path().join("summary.tsv")).unwrap();
    assert!(summary.contains("mean_last_decade_deviation\tfail\t"));
}

#[test]
fn schemas_per_experiment() {
    let cases: [(&[&str], &str, &str); 6] = [
        (&["--experiment", "diverge", "--n", "1000"], "diverge.csv", "t,ratio"),
        (&["--experiment", "converge-exact", "--n", "8"], "converge.csv", "t,hellinger_term,cumulative,bound"),
        (&["--experiment", "converge-mc", "--n", "100", "--samples", "50"], "converge.csv", "t,hellinger_term,cumulative,bound"),
        (&["--experiment", "gap", "--class", "gapped", "--n", "5000"], "gap.csv", "t,predictive_1,deficiency_theta0,deficiency_theta1"),
        (&["--experiment", "dense", "--n", "2000", "--samples", "8"], "dense.csv", "t,predictive_1,deficiency_theta0,deficiency_theta1"),
        (&["--experiment", "solomonoff-invariants", "--n", "6"], "solomonoff.csv", "check,status,slack"),
    ];
    for (args, file, want) in cases {
        let dir = TempDir::new().unwrap();
        assert_eq!(run_in(dir.path(), args), 0, "{args:?}");
        let path = dir.path().join(file);
        assert_eq!(header(&path), want);
        let body = fs::read_to_string(&path).unwrap();
        let width = want.split(',').count();
        assert!(body.lines().all(|l| l.split(',').count() == width));
        assert!(dir.path().join("config.txt").exists());
    }
}

#[test]
fn output_is_identical_across_runs_and_thread_counts() {
    let cases: [&[&str]; 3] = [
        &["--experiment", "dense", "--n", "3000", "--samples", "16", "--seed", "5"],
        &["--experiment", "converge-mc", "--n", "200", "--samples", "300", "--seed", "9"],
        &["--experiment", "solomonoff-invariants", "--n", "6"],
    ];
    for args in cases {
        let mut outputs = Vec::new();
        for threads in [Some(1), Some(4), None] {
            let dir = TempDir::new().unwrap();
            let mut all = args.to_vec();
            all.extend(["--out", dir.path().to_str().unwrap()]);
            let out = unipred(&all, threads);
            assert_eq!(out.status.code(), Some(0), "{args:?}");
            let mut files: Vec<_> = fs::read_dir(dir.path())
                .unwrap()
                .map(|e| e.unwrap().path())
                .filter(|p| p.file_name().unwrap() != "config.txt")
                .collect();
            files.sort();
            let bytes: Vec<Vec<u8>> = files.iter().map(|p| fs::read(p).unwrap()).collect();
            outputs.push(bytes);
        }
        assert!(outputs.windows(2).all(|w| w[0] == w[1]), "{args:?}");
    }
}

#[test]
fn every_summary_names_its_anchor() {
    for e in Experiment::ALL {
        let dir = TempDir::new().unwrap();
        let mut config = ExperimentConfig {
            experiment: e,
            out: dir.path().to_path_buf(),
            samples: 8,
            ..ExperimentConfig::default()
        };
        config.n = match e {
            Experiment::Dominance | Experiment::ConvergeExact => 6,
            Experiment::SolomonoffInvariants => 4,
            _ => 500,
        };
        if e == Experiment::Gap {
            config.set("class", "gapped").unwrap();
        }
        let outcome = run(&config).unwrap();
        assert!(!outcome.anchor.is_empty());
        let summary = fs::read_to_string(dir.path().join("summary.tsv")).unwrap();
        assert!(summary.lines().nth(1).unwrap().starts_with("anchor\tinfo\t"), "{e}");
        let written = fs::read_to_string(dir.path().join("config.txt")).unwrap();
        assert_eq!(ExperimentConfig::parse(&written).unwrap(), config);
    }
}
