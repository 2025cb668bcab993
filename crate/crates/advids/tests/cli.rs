use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use advids::model_io::load_model;
use advids::report::{read_report_json, ReportFile};
use advids_core::experiment::fresh_model;

fn advids(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_advids"))
        .args(args)
        .env("RUST_LOG", "warn")
        .output()
        .unwrap()
}

fn ok(args: &[&str]) {
    let out = advids(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}

fn report(dir: &Path) -> ReportFile {
    read_report_json(&dir.join("report.json")).unwrap()
}

const SMALL: [&str; 6] = [
    "--synthetic",
    "--n-normal",
    "150",
    "--n-attack",
    "150",
    "--seed",
];

fn small(sub: &str, seed: &str, out: &Path, extra: &[&str]) -> Vec<String> {
    let mut v = vec![sub.to_string()];
    v.extend(SMALL.iter().map(|s| s.to_string()));
    v.push(seed.into());
    v.push("--out".into());
    v.push(out.to_str().unwrap().into());
    v.extend(extra.iter().map(|s| s.to_string()));
    v
}

fn run_small(sub: &str, seed: &str, out: &Path, extra: &[&str]) {
    let args = small(sub, seed, out, extra);
    ok(&args.iter().map(String::as_str).collect::<Vec<_>>());
}

#[test]
fn train_creates_output_dir_and_converges() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("a/b/c");
    ok(&[
        "train",
        "--synthetic",
        "--schema",
        "bot_iot",
        "--seed",
        "42",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(out.join("model.json").is_file());
    assert!(out.join("manifest.json").is_file());
    let loss: Vec<f64> = fs::read_to_string(out.join("loss.csv"))
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(loss.len(), 20);
    for w in loss[loss.len() - 5..].windows(2) {
        assert!(w[1] <= w[0], "loss rose in the last epochs: {loss:?}");
    }
}

#[test]
fn zero_epochs_saves_fresh_initialization() {
    let tmp = tempfile::tempdir().unwrap();
    run_small(
        "train",
        "7",
        tmp.path(),
        &["--epochs", "0", "--schema", "modbus"],
    );
    let model = load_model(&tmp.path().join("model.json")).unwrap();
    assert_eq!(model, fresh_model(8, 7).unwrap());
}

#[test]
fn sweep_row_counts() {
    let tmp = tempfile::tempdir().unwrap();
    run_small("sweep", "1", tmp.path(), &[]);
    let r = &report(tmp.path()).experiments[0];
    assert_eq!(r.sweep.len(), 6);
    assert_eq!(r.table_rows().count(), 7);
    assert!(r.defense.is_none());
    assert!(r.is_consistent(1e-9));
    let plot = fs::read_to_string(tmp.path().join("plot_synthetic_bot_iot.csv")).unwrap();
    assert_eq!(plot.lines().count(), 7);

    run_small("sweep", "1", tmp.path(), &["--epsilons", "0,0.5"]);
    let r = &report(tmp.path()).experiments[0];
    assert_eq!(r.sweep.len(), 2);
    assert_eq!(r.sweep[1].epsilon, Some(0.5));
}

#[test]
fn pretrained_model_gives_same_report() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    run_small("sweep", "3", &a, &[]);
    let model = a.join("model.json");
    run_small("sweep", "3", &b, &["--model", model.to_str().unwrap()]);
    let (ra, rb) = (report(&a).experiments, report(&b).experiments);
    assert_eq!(ra[0].clean, rb[0].clean);
    assert_eq!(ra[0].sweep, rb[0].sweep);
}

#[test]
fn defend_labels_and_zero_fraction() {
    let tmp = tempfile::tempdir().unwrap();
    run_small("defend", "5", tmp.path(), &[]);
    let r = &report(tmp.path()).experiments[0];
    let d = r.defense.as_ref().unwrap();
    let labels: Vec<&str> = d.rows.iter().map(|row| row.label.as_str()).collect();
    assert_eq!(labels, ["experiment-1 (10%)", "experiment-2 (20%)"]);
    let text = fs::read_to_string(tmp.path().join("report.txt")).unwrap();
    assert!(text.contains("experiment-2 (20%)"));

    run_small("defend", "5", tmp.path(), &["--fractions", "0"]);
    let r = &report(tmp.path()).experiments[0];
    let d = r.defense.as_ref().unwrap();
    let eps1 = r.sweep.iter().find(|row| row.epsilon == Some(1.0)).unwrap();
    assert_eq!(d.rows[0].eval.confusion, eps1.confusion);
    assert_eq!(d.rows[0].eval.confusion, d.undefended.confusion);
}

#[test]
fn export_perturbed_writes_csv_per_epsilon() {
    let tmp = tempfile::tempdir().unwrap();
    run_small(
        "sweep",
        "2",
        tmp.path(),
        &["--epsilons", "0,0.3", "--export-perturbed"],
    );
    let p = tmp.path().join("perturbed_synthetic_bot_iot_eps0.3.csv");
    let text = fs::read_to_string(p).unwrap();
    assert!(text.starts_with("# schema=bot_iot seed=2 rows="));
    assert!(text.contains("epsilon=0.3 source_sha256="));
}

#[test]
fn replicate_emits_three_blocks() {
    let tmp = tempfile::tempdir().unwrap();
    ok(&[
        "replicate",
        "--synthetic",
        "--n-normal",
        "200",
        "--n-attack",
        "30",
        "--seed",
        "4",
        "--epochs",
        "5",
        "--out",
        tmp.path().to_str().unwrap(),
    ]);
    let r = report(tmp.path());
    let names: Vec<&str> = r.experiments.iter().map(|e| e.name.as_str()).collect();
    assert_eq!(
        names,
        [
            "synthetic_bot_iot",
            "synthetic_bot_iot_balanced",
            "synthetic_modbus"
        ]
    );
    for e in &r.experiments {
        assert_eq!(e.table_rows().count(), 7);
        assert_eq!(e.defense.as_ref().unwrap().rows.len(), 2);
    }
    assert_eq!(
        r.experiments[1].provenance.train_counts[0],
        r.experiments[1].provenance.train_counts[1]
    );
    for name in names {
        assert!(tmp.path().join(format!("plot_{name}.csv")).is_file());
    }
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().to_str().unwrap();
    let code = |args: &[&str]| advids(args).status.code().unwrap();
    assert_eq!(
        code(&["defend", "--synthetic", "--fractions", "1.5", "--out", out]),
        1
    );
    assert_eq!(
        code(&[
            "sweep",
            "--synthetic",
            "--epsilons",
            "0.5,0.1",
            "--out",
            out
        ]),
        1
    );
    assert_eq!(
        code(&["sweep", "--synthetic", "--schema", "kdd", "--out", out]),
        1
    );
    assert_eq!(code(&["sweep", "--no-such-flag"]), 1);
    assert_eq!(code(&["sweep", "--out", out]), 1);
    assert_eq!(code(&["--help"]), 0);
    let missing = tmp.path().join("missing.csv");
    assert_eq!(
        code(&["sweep", "--data", missing.to_str().unwrap(), "--out", out]),
        2
    );
    let bad = tmp.path().join("bad.csv");
    fs::write(&bad, "seq,stddev,category\n1,2,DoS\n").unwrap();
    let o = advids(&["sweep", "--data", bad.to_str().unwrap(), "--out", out]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("N_IN_Conn_P_SrcIP"));
}

#[test]
fn csv_input_end_to_end() {
    let tmp = tempfile::tempdir().unwrap();
    let csv = tmp.path().join("modbus.csv");
    let mut body = String::from("ts,FC1_Read_Input_Register,FC2_Read_Discrete_Value,FC3_Read_Holding_Register,FC1_Read_Coil,type\n");
    for i in 0..120u64 {
        let (class, base) = if i % 3 == 0 {
            ("ddos", 900)
        } else {
            ("normal", 100)
        };
        body.push_str(&format!(
            "{},{},{},{},{},{class}\n",
            1_556_000_000 + i * 977,
            base + i % 7,
            base + i % 5,
            base + i % 11,
            base / 100,
        ));
    }
    body.push_str("1556999999,x,1,1,1,normal\n");
    fs::write(&csv, body).unwrap();
    let out = tmp.path().join("out");
    ok(&[
        "defend",
        "--data",
        csv.to_str().unwrap(),
        "--schema",
        "modbus",
        "--seed",
        "9",
        "--epsilons",
        "0,1",
        "--out",
        out.to_str().unwrap(),
    ]);
    let r = &report(&out).experiments[0];
    assert_eq!(r.name, "modbus");
    assert_eq!(
        r.provenance.train_counts.iter().sum::<usize>()
            + r.provenance.test_counts.iter().sum::<usize>(),
        120
    );
    assert!(r.is_consistent(1e-9));
}
