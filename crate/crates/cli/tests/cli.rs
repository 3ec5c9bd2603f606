use std::path::Path;
use std::process::{Command, Output};

fn mbrecon(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mbrecon"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = mbrecon(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn code(args: &[&str]) -> i32 {
    mbrecon(args).status.code().unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn generate_fit_predict_evaluate() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("q.dat");
    let truth = dir.path().join("truth.dat");
    let model = dir.path().join("q.mbr");
    ok(&[
        "generate",
        "--map",
        "quadratic",
        "--mu",
        "3.8",
        "--n",
        "5000",
        "--out",
        p(&data),
    ]);
    // the continuation starts one step after the last training sample
    let tail = ok(&[
        "generate",
        "--map",
        "quadratic",
        "--mu",
        "3.8",
        "--n",
        "5100",
    ]);
    let lines: Vec<&str> = tail.lines().collect();
    std::fs::write(&truth, lines[5000..].join("\n") + "\n").unwrap();
    assert_eq!(
        std::fs::read_to_string(&data).unwrap(),
        lines[..5000].join("\n") + "\n"
    );

    ok(&[
        "fit",
        "--input",
        p(&data),
        "--order",
        "2",
        "--out",
        p(&model),
    ]);
    assert!(std::fs::read_to_string(&model).unwrap().starts_with("mbr1"));

    let pred = ok(&[
        "predict",
        "--model",
        p(&model),
        "--steps",
        "5",
        "--input",
        p(&data),
    ]);
    assert_eq!(pred.lines().count(), 5);
    for (a, b) in pred.lines().zip(&lines[5000..]) {
        let (a, b): (f64, f64) = (a.parse().unwrap(), b.parse().unwrap());
        assert!((a - b).abs() < 1e-6);
    }

    let csv = ok(&[
        "eval",
        "predlen",
        "--model",
        p(&model),
        "--input",
        p(&data),
        "--truth",
        p(&truth),
        "--eps",
        "0.01:0.05:0.01",
    ]);
    let rows: Vec<&str> = csv.lines().collect();
    assert_eq!(rows[0], "epsilon,T");
    assert_eq!(rows.len(), 6);
    let ts: Vec<usize> = rows[1..]
        .iter()
        .map(|r| r.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert!(ts.windows(2).all(|w| w[0] <= w[1]) && ts[0] >= 5);

    let mean = ok(&[
        "eval",
        "predlen",
        "--model",
        p(&model),
        "--input",
        p(&data),
        "--mode",
        "mean",
        "--eps",
        "0.05:0.05:0.01",
    ]);
    assert_eq!(mean.lines().count(), 2);

    let spectrum = ok(&["eval", "spectrum", "--input", p(&data)]);
    assert!(spectrum.starts_with("omega,period,I\n"));
    assert_eq!(spectrum.lines().count(), 1 + 2500);

    let lag = ok(&["eval", "lag", "--input", p(&data), "--lag", "3"]);
    assert!(lag.starts_with("x_t,x_t_plus_lag\n"));
    assert_eq!(lag.lines().count(), 1 + 4997);
}

#[test]
fn noise_is_seeded() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("q.dat");
    ok(&[
        "generate",
        "--map",
        "quadratic",
        "--n",
        "500",
        "--out",
        p(&data),
    ]);
    let args = [
        "noise",
        "--input",
        p(&data),
        "--level",
        "0.1",
        "--seed",
        "7",
        "--scaling",
        "relative",
    ];
    let a = ok(&args);
    assert_eq!(a, ok(&args));
    assert_eq!(a.lines().count(), 500);
    assert_ne!(a, std::fs::read_to_string(&data).unwrap());
}

#[test]
fn planar_workflow() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("h.dat");
    let model = dir.path().join("h.mbr");
    ok(&[
        "generate",
        "--map",
        "henon",
        "--n",
        "20000",
        "--out",
        p(&data),
    ]);
    ok(&[
        "fit",
        "--input",
        p(&data),
        "--order",
        "2",
        "--out",
        p(&model),
    ]);
    assert!(std::fs::read_to_string(&model).unwrap().starts_with("mbr2"));
    let pred = ok(&[
        "predict",
        "--model",
        p(&model),
        "--steps",
        "3",
        "--x0",
        "0",
        "--y0",
        "0",
    ]);
    let first: Vec<f64> = pred
        .lines()
        .next()
        .unwrap()
        .split_whitespace()
        .map(|v| v.parse().unwrap())
        .collect();
    assert!((first[0] - 1.0).abs() < 1e-8 && first[1].abs() < 1e-8);

    let diag = mbrecon(&["diagnose2d", "--input", p(&data), "--order", "2"]);
    assert!(diag.status.success());
    let csv = String::from_utf8(diag.stdout).unwrap();
    assert!(csv.starts_with("i,j,N_paper,N_oracle,status\n"));
    assert_eq!(csv.lines().count(), 1 + 5);
    assert!(String::from_utf8_lossy(&diag.stderr).contains("recursion stopped"));
}

#[test]
fn experiment_writes_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    ok(&[
        "experiment",
        "diagnose-2d",
        "--out",
        p(&out),
        "--n",
        "5000",
        "--continuation",
        "200",
    ]);
    let manifest = std::fs::read_to_string(out.join("manifest.txt")).unwrap();
    assert!(manifest.contains("experiment=diagnose-2d\n"));
    assert!(out.join("henon_diagnosis.csv").exists());
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.dat");
    let constant = dir.path().join("c.dat");
    let short = dir.path().join("s.dat");
    let mixed = dir.path().join("m.dat");
    std::fs::write(&constant, "0.5\n".repeat(100)).unwrap();
    std::fs::write(&short, "0.1\n0.2\n0.3\n").unwrap();
    std::fs::write(&mixed, "1 2\n3\n").unwrap();

    // usage
    assert_eq!(code(&["fit", "--input", p(&constant)]), 2);
    assert_eq!(code(&["experiment", "fig9", "--out", p(dir.path())]), 2);
    assert_eq!(code(&["eval", "spectrum"]), 2);
    assert_eq!(
        code(&["generate", "--map", "quadratic", "--mu", "5", "--n", "10"]),
        2
    );
    assert_eq!(
        code(&[
            "experiment",
            "replicate-1d",
            "--out",
            p(dir.path()),
            "--eps",
            "0.2:0.1:0.01"
        ]),
        2
    );
    // data
    assert_eq!(code(&["fit", "--input", p(&missing), "--order", "2"]), 3);
    assert_eq!(code(&["fit", "--input", p(&short), "--order", "2"]), 3);
    assert_eq!(code(&["fit", "--input", p(&mixed), "--order", "1"]), 3);
    // numerical
    assert_eq!(code(&["fit", "--input", p(&constant), "--order", "2"]), 4);
    let err = mbrecon(&["fit", "--input", p(&constant), "--order", "2"]);
    assert!(String::from_utf8_lossy(&err.stderr).contains("ill-conditioned"));
}
