use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_shannon-bounds"))
}

fn fixture(name: &str) -> String {
    let mut p = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    p.push("tests/fixtures");
    p.push(name);
    p.to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn classic_point_evaluation() {
    let o = run(&["bounds", "classic", "--source", &fixture("gaussian.json"), "--delta", "0.25"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    assert!(header.starts_with("delta,"));
    assert!(header.contains("lower_nats"));
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    let lower: f64 = row[3].parse().unwrap();
    assert!((lower - 2f64.ln()).abs() < 1e-12);
}

#[test]
fn bits_switch_changes_units() {
    let o = run(&["bounds", "classic", "--source", &fixture("gaussian.json"), "--delta", "0.25", "--bits"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.lines().next().unwrap().contains("lower_bits"));
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert!((row[3].parse::<f64>().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn sweep_emits_one_row_per_point() {
    let o = run(&["bounds", "classic", "--source", &fixture("laplace.json"), "--sweep", "0.1:0.5:5"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 6);
}

#[test]
fn config_errors_exit_two() {
    let missing = run(&["bounds", "classic", "--source", "/nonexistent/source.json", "--delta", "0.25"]);
    assert_eq!(missing.status.code(), Some(2));
    let negative = run(&["bounds", "classic", "--source", &fixture("gaussian.json"), "--delta", "-1"]);
    assert_eq!(negative.status.code(), Some(2));
    let no_oracle = run(&["oracle", "wyner-ziv", "--source", &fixture("gaussian.json"), "--delta", "0.25"]);
    assert_eq!(no_oracle.status.code(), Some(2));
}

#[test]
fn infeasible_distortion_exits_three() {
    let g = fixture("gaussian.json");
    let o = run(&["bounds", "remote", "--source", &g, "--source2", &g, "--delta", "0.4"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("infeasible"));
}

#[test]
fn out_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rows.csv");
    let args = ["bounds", "classic", "--source", &fixture("mixture.json"), "--sweep", "0.05:0.3:4"];
    let direct = run(&args);
    let mut with_out = args.to_vec();
    let p = path.to_string_lossy().into_owned();
    with_out.extend(["--out", &p]);
    let o = run(&with_out);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(std::fs::read_to_string(&path).unwrap(), stdout(&direct));
}

#[test]
fn runs_are_deterministic() {
    let args = ["bounds", "classic", "--source", &fixture("uniform.json"), "--delta", "0.02", "--oracle", "--grid-n", "128"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

fn functionals(text: &str) -> Vec<(String, f64)> {
    text.lines()
        .filter_map(|l| {
            let (k, v) = l.split_once(' ')?;
            Some((k.to_string(), v.parse().ok()?))
        })
        .collect()
}

#[test]
fn describe_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["gaussian.json", "uniform.json", "laplace.json", "mixture.json"] {
        let first = run(&["describe", &fixture(name)]);
        assert_eq!(first.status.code(), Some(0), "{name}");
        let path = dir.path().join(name);
        std::fs::write(&path, &first.stdout).unwrap();
        let second = run(&["describe", &path.to_string_lossy()]);
        assert_eq!(second.status.code(), Some(0), "{name}");
        assert_eq!(first.stdout, second.stdout, "{name}");
        let (a, b) = (functionals(&stderr(&first)), functionals(&stderr(&second)));
        assert!(!a.is_empty());
        assert_eq!(a.len(), b.len());
        for ((ka, va), (kb, vb)) in a.iter().zip(&b) {
            assert_eq!(ka, kb);
            assert!((va - vb).abs() <= 1e-12 * va.abs().max(1.0), "{name} {ka}: {va} vs {vb}");
        }
    }
}
