use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use l01svm::bench::rows_from_csv;
use l01svm::model::Model;
use l01svm::{accuracy, parse_libsvm};
use tempfile::TempDir;

fn l01svm(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_l01svm")).current_dir(dir).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

#[test]
fn train_two_points_then_predict() {
    let dir = TempDir::new().unwrap();
    fs::write(dir.path().join("two.txt"), "+1 1:1\n-1 1:-1\n").unwrap();

    let out = l01svm(dir.path(), &["train", "two.txt", "--out", "two.model"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let report = json(&out);
    assert_eq!(report["acc"], 1.0);
    assert_eq!(report["converged"], true);
    let model = Model::from_text(&fs::read_to_string(dir.path().join("two.model")).unwrap()).unwrap();
    assert_eq!(model.feature_count(), 1);
    assert!(model.scaler.is_some());

    let out = l01svm(dir.path(), &["predict", "two.model", "two.txt", "--out", "pred.csv"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert_eq!(json(&out)["acc"], 1.0);
    let pred = fs::read_to_string(dir.path().join("pred.csv")).unwrap();
    assert_eq!(pred, "index,prediction,label\n0,1,1\n1,-1,-1\n");
}

#[test]
fn predict_accuracy_matches_formula() {
    let dir = TempDir::new().unwrap();
    fs::write(dir.path().join("two.txt"), "+1 1:1\n-1 1:-1\n").unwrap();
    fs::write(dir.path().join("flipped.txt"), "+1 1:1\n+1 1:-1\n").unwrap();
    assert_eq!(code(&l01svm(dir.path(), &["train", "two.txt", "--out", "m"])), 0);
    let out = l01svm(dir.path(), &["predict", "m", "flipped.txt", "--out", "p.csv"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["acc"], 0.5);

    let mut rd = csv::Reader::from_path(dir.path().join("p.csv")).unwrap();
    let (mut p, mut y) = (Vec::new(), Vec::new());
    for rec in rd.records() {
        let rec = rec.unwrap();
        p.push(rec[1].parse::<f64>().unwrap());
        y.push(rec[2].parse::<f64>().unwrap());
    }
    assert_eq!(accuracy(&p, &y), 0.5);
}

#[test]
fn io_and_usage_errors_exit_two() {
    let dir = TempDir::new().unwrap();
    let out = l01svm(dir.path(), &["train", "missing.txt"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("file not found"));

    // Validation happens before the data file is even opened.
    let out = l01svm(dir.path(), &["train", "missing.txt", "--C", "0"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("C must be positive"), "{}", stderr(&out));

    fs::write(dir.path().join("empty.txt"), "").unwrap();
    fs::write(dir.path().join("two.txt"), "+1 1:1\n-1 1:-1\n").unwrap();
    assert_eq!(code(&l01svm(dir.path(), &["train", "two.txt", "--out", "m"])), 0);
    assert_eq!(code(&l01svm(dir.path(), &["predict", "m", "empty.txt"])), 2);

    fs::write(dir.path().join("wide.txt"), "+1 1:1 2:3\n-1 1:-1\n").unwrap();
    assert_eq!(code(&l01svm(dir.path(), &["predict", "m", "wide.txt"])), 2);
    fs::write(dir.path().join("bad.model"), "l01svm-model 1\nn two\n").unwrap();
    assert_eq!(code(&l01svm(dir.path(), &["predict", "bad.model", "two.txt"])), 2);

    assert_eq!(code(&l01svm(dir.path(), &["synth", "example3"])), 2);
    assert_eq!(code(&l01svm(dir.path(), &["synth", "example2", "--r", "0.7"])), 2);
    assert_eq!(code(&l01svm(dir.path(), &["frobnicate"])), 2);
}

#[test]
fn non_convergence_exits_one_but_keeps_the_model() {
    let dir = TempDir::new().unwrap();
    fs::write(dir.path().join("two.txt"), "+1 1:1\n-1 1:-1\n").unwrap();
    let out = l01svm(dir.path(), &["train", "two.txt", "--max-iter", "1", "--out", "m"]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("without meeting the tolerance"));
    assert_eq!(json(&out)["converged"], false);
    assert!(dir.path().join("m").exists());
}

#[test]
fn synth_writes_balanced_splits() {
    let dir = TempDir::new().unwrap();
    let out = l01svm(dir.path(), &["synth", "example1", "--m", "100", "--seed", "3", "--out", "ex1"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    for split in ["ex1.train", "ex1.test"] {
        let d = parse_libsvm(&fs::read_to_string(dir.path().join(split)).unwrap(), None).unwrap();
        assert_eq!(d.sample_count(), 100);
        assert_eq!(d.class_counts(), (50, 50));
    }

    assert_eq!(code(&l01svm(dir.path(), &["synth", "example2", "--m", "100", "--r", "0.1", "--seed", "3", "--out", "ex2"])), 0);
    for split in ["train", "test"] {
        let clean = parse_libsvm(&fs::read_to_string(dir.path().join(format!("ex1.{split}"))).unwrap(), None).unwrap();
        let noisy = parse_libsvm(&fs::read_to_string(dir.path().join(format!("ex2.{split}"))).unwrap(), None).unwrap();
        assert_eq!(clean.x(), noisy.x());
        let flips = clean.y().iter().zip(noisy.y()).filter(|(a, b)| a != b).count();
        assert_eq!(flips, 10, "{split}");
    }
}

#[test]
fn cv_emits_full_grid_with_one_winner() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&l01svm(dir.path(), &["synth", "example1", "--m", "40", "--out", "d"])), 0);
    let out = l01svm(dir.path(), &["cv", "d.train", "--k", "5", "--max-iter", "50", "--out", "grid.csv"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let mut rd = csv::Reader::from_path(dir.path().join("grid.csv")).unwrap();
    let rows: Vec<csv::StringRecord> = rd.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 225);
    assert_eq!(rows.iter().filter(|r| &r[4] == "*").count(), 1);

    fs::write(dir.path().join("three.txt"), "+1 1:1\n-1 1:-1\n+1 1:2\n").unwrap();
    let out = l01svm(dir.path(), &["cv", "three.txt", "--k", "2", "--C", "1", "--sigma", "0.5"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert_eq!(String::from_utf8_lossy(&out.stdout).lines().count(), 2);
}

#[test]
fn bench_rows_round_trip_and_repeat() {
    let dir = TempDir::new().unwrap();
    let args = [
        "bench", "table2", "--m", "40", "--r", "0.1", "--repeats", "1", "--seed", "7", "--k", "2", "--C", "2",
        "--sigma", "0.5", "--max-iter", "50", "--out",
    ];
    let run = |prefix: &str| {
        let mut a = args.to_vec();
        a.push(prefix);
        let out = l01svm(dir.path(), &a);
        assert_eq!(code(&out), 0, "{}", stderr(&out));
        fs::read_to_string(dir.path().join(format!("{prefix}.csv"))).unwrap()
    };
    let first = run("a");
    let rows = rows_from_csv(&first).unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!((rows[0].m, rows[0].r, rows[0].repeats), (40, 0.1, 1));
    let json = l01svm::bench::rows_from_json(&fs::read_to_string(dir.path().join("a.json")).unwrap()).unwrap();
    assert_eq!(json, rows);

    let second = rows_from_csv(&run("b")).unwrap();
    let strip = |mut r: l01svm::bench::BenchRow| {
        r.cpu_mean = 0.0;
        r.cpu_median = 0.0;
        r
    };
    assert_eq!(strip(second[0].clone()), strip(rows[0].clone()));
}
