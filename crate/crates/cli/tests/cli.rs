use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_qkd-resonance");

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

const ONE_QUBIT: &[&str] = &[
    "--family",
    "one-qubit",
    "--a",
    "0.5",
    "--delta",
    "0.05",
    "--param",
    "c",
    "--from",
    "0.01",
    "--to",
    "0.99",
    "--steps",
    "1961",
];

const TWO_QUBIT: &[&str] = &[
    "--family",
    "two-qubit",
    "--s",
    "0.5",
    "--delta",
    "0.05",
    "--param",
    "alpha2",
    "--tie",
    "beta2=1.8-alpha2",
    "--from",
    "0.8",
    "--to",
    "1.0",
    "--steps",
    "2001",
];

fn sweep_to(out: &Path, template: &[&str], extra: &[&str]) -> Output {
    let mut args = vec!["sweep"];
    args.extend_from_slice(template);
    args.extend_from_slice(extra);
    args.extend_from_slice(&["--out", path(out)]);
    run(&args)
}

fn peak_lines(csv: &Path, column: &str, min: &str) -> Vec<String> {
    let o = run(&[
        "peaks",
        "--input",
        path(csv),
        "--column",
        column,
        "--min-prominence",
        min,
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    stdout(&o).lines().map(str::to_owned).collect()
}

#[test]
fn one_qubit_sweep_has_two_peaks() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("one-qubit.csv");
    let o = sweep_to(&csv, ONE_QUBIT, &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stderr(&o).contains("measurement: closed-form"));

    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("param,value,D,Du,Dv,q0,q1,G,IAE,bound,degenerate")
    );
    assert_eq!(text.lines().count(), 1962);
    assert!(!text.contains('\r'));
    assert!(lines.all(|l| l.starts_with("c,") && l.split(',').count() == 11));

    let peaks = peak_lines(&csv, "D", "0.05");
    assert_eq!(peaks.len(), 2, "{peaks:?}");
    assert!(peaks.iter().all(|l| l.split(',').count() == 4));
}

#[test]
fn two_qubit_sweep_has_one_peak() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("two-qubit.csv");
    let o = sweep_to(&csv, TWO_QUBIT, &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stderr(&o).contains("measurement: principal-axis"));
    assert_eq!(peak_lines(&csv, "D", "0.05").len(), 1);
}

#[test]
fn tradeoff_sweep_flags_degenerate_row() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("tradeoff.csv");
    let o = sweep_to(
        &csv,
        &[
            "--family",
            "one-qubit",
            "--a",
            "0.01",
            "--delta",
            "0",
            "--param",
            "c",
            "--from",
            "0",
            "--to",
            "1",
            "--steps",
            "1001",
        ],
        &[],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let text = std::fs::read_to_string(&csv).unwrap();
    let flagged: Vec<&str> = text.lines().skip(1).filter(|l| l.ends_with(",1")).collect();
    assert_eq!(flagged.len(), 1);
    assert!(flagged[0].starts_with("c,0.01,"));
}

#[test]
fn output_is_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for threads in ["1", "4"] {
        let csv = dir.path().join(format!("two-qubit-{threads}.csv"));
        let o = sweep_to(&csv, TWO_QUBIT, &["--threads", threads]);
        assert!(o.status.success(), "{}", stderr(&o));
        outputs.push(std::fs::read(&csv).unwrap());
    }
    let csv = dir.path().join("two-qubit-default.csv");
    assert!(sweep_to(&csv, TWO_QUBIT, &[]).status.success());
    outputs.push(std::fs::read(&csv).unwrap());
    assert!(outputs.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn gnuplot_script_references_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("one-qubit.csv");
    let gp = dir.path().join("one-qubit.gp");
    let o = sweep_to(&csv, ONE_QUBIT, &["--gnuplot", path(&gp)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let script = std::fs::read_to_string(&gp).unwrap();
    assert!(script.contains(path(&csv)));
    assert!(script.contains("set datafile separator ','"));
}

#[test]
fn gain_reports() {
    let o = run(&[
        "gain",
        "--family",
        "one-qubit",
        "--a",
        "1",
        "--c",
        "0",
        "--delta",
        "0",
    ]);
    assert!(o.status.success());
    let line = stdout(&o);
    for field in ["G=1 ", "IAE=1 ", " D=0.5 ", "bound=1 "] {
        assert!(line.contains(field), "{line}");
    }

    let o = run(&[
        "gain",
        "--family",
        "one-qubit",
        "--a",
        "0.6",
        "--c",
        "0.9",
        "--delta",
        "0",
    ]);
    assert!(stdout(&o).contains(" D=0.0556440422584 "), "{}", stdout(&o));

    let o = run(&[
        "gain",
        "--family",
        "one-qubit",
        "--a",
        "0.70710678",
        "--c",
        "0.70710678",
        "--delta",
        "0",
    ]);
    assert!(o.status.success());
    let line = stdout(&o);
    assert!(
        line.contains(" G=0 ") && line.trim_end().ends_with("degenerate"),
        "{line}"
    );

    let o = run(&[
        "gain",
        "--family",
        "two-qubit",
        "--alpha2",
        "0.85",
        "--beta2",
        "0.95",
        "--s",
        "0.5",
        "--delta",
        "0.05",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("measurement=principal-axis"));
}

#[test]
fn attenuation_table() {
    let mut args = vec!["attenuation"];
    args.extend_from_slice(ONE_QUBIT);
    args.extend_from_slice(&["--deltas", "0.05,0.1,0.2,0.3"]);
    let o = run(&args);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "delta,maxProminence");
    assert_eq!(lines.len(), 5);
    let prom = |l: &str| l.split(',').nth(1).unwrap().parse::<f64>().unwrap();
    assert!(prom(lines[4]) < prom(lines[1]));
}

#[test]
fn single_delta_attenuation_matches_peaks() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("one-qubit.csv");
    assert!(sweep_to(&csv, ONE_QUBIT, &[]).status.success());
    let max = peak_lines(&csv, "D", "0")
        .iter()
        .map(|l| l.split(',').nth(2).unwrap().parse::<f64>().unwrap())
        .fold(0.0, f64::max);

    let mut args = vec!["attenuation"];
    args.extend_from_slice(ONE_QUBIT);
    args.extend_from_slice(&["--deltas", "0.05"]);
    let o = run(&args);
    let text = stdout(&o);
    let row = text.lines().nth(1).unwrap();
    // the peaks side reads D back at 12 significant digits
    let direct = row.split(',').nth(1).unwrap().parse::<f64>().unwrap();
    assert!((direct - max).abs() < 1e-10, "{direct} vs {max}");
}

#[test]
fn monotone_column_gives_empty_output() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("mono.csv");
    std::fs::write(
        &csv,
        "param,value,D,Du,Dv,q0,q1,G,IAE,bound,degenerate\n\
         c,0,0.1,0,0,0.5,0.5,0,0,0,0\n\
         c,0.5,0.2,0,0,0.5,0.5,0,0,0,0\n\
         c,1,0.3,0,0,0.5,0.5,0,0,0,0\n",
    )
    .unwrap();
    assert!(peak_lines(&csv, "D", "0").is_empty());
}

#[test]
fn invalid_input_exits_2() {
    let o = run(&["sweep", "--family", "one-qubit", "--bogus", "1"]);
    assert_eq!(o.status.code(), Some(2));

    // beta2 = 1.8 - 0.7 leaves [0, 1]
    let o = run(&[
        "sweep",
        "--family",
        "two-qubit",
        "--s",
        "0.5",
        "--delta",
        "0.05",
        "--param",
        "alpha2",
        "--tie",
        "beta2=1.8-alpha2",
        "--from",
        "0.7",
        "--to",
        "1.0",
        "--steps",
        "11",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("grid point 0"), "{}", stderr(&o));

    let o = run(&[
        "gain",
        "--family",
        "one-qubit",
        "--a",
        "1.5",
        "--c",
        "0",
        "--delta",
        "0",
    ]);
    assert_eq!(o.status.code(), Some(2));

    let o = run(&["gain", "--family", "one-qubit", "--a", "0.5", "--c", "0"]);
    assert_eq!(o.status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "param,value,D\nc,0,0.1\nc,zero,0.2\nc,1,0.3\n").unwrap();
    let o = run(&["peaks", "--input", path(&bad), "--column", "D"]);
    assert_eq!(o.status.code(), Some(2));

    let o = run(&["peaks", "--input", path(&bad), "--column", "Width"]);
    assert_eq!(o.status.code(), Some(2));

    let o = run(&["peaks", "--input", path(&dir.path().join("missing.csv"))]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn degenerate_only_sweep_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("deg.csv");
    let o = sweep_to(
        &csv,
        &[
            "--family",
            "one-qubit",
            "--delta",
            "0",
            "--param",
            "a",
            "--tie",
            "c=0+a",
            "--from",
            "0",
            "--to",
            "1",
            "--steps",
            "5",
        ],
        &[],
    );
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    assert_eq!(std::fs::read_to_string(&csv).unwrap().lines().count(), 6);
}
