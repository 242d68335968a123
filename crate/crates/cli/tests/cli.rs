use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn domains() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../domains")
}

fn starquad(args: &[&str]) -> Output {
    starquad_env(args, &[])
}

fn starquad_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_starquad"));
    cmd.args(args).env_remove("STARQUAD_THREADS");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn cfg(name: &str) -> String {
    domains().join(name).to_string_lossy().into_owned()
}

#[test]
fn constant_and_bound_match_closed_forms() {
    let o = starquad(&["constant", "-d", "2", "-p", "inf"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), format!("{:.10}\n", 8.0 / 3.0));

    let o = starquad(&["constant", "-d", "3", "-p", "inf"]);
    assert_eq!(stdout(&o).trim(), format!("{:.10}", 6.0));

    // c(2, inf) (1/4)^(1/2 + 1) 100^(-1/2) = 1 / (3 sqrt 100)
    let o = starquad(&["bound", "-d", "2", "-p", "inf", "--mes", "1", "-n", "100"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "0.0333333333\n");
}

#[test]
fn square_rule_has_four_equal_weights() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("rule.csv");
    let o = starquad(&[
        "rule",
        "--domain",
        &cfg("square.cfg"),
        "-n",
        "4",
        "--subgrid",
        "8",
        "-o",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("# starquad-rule v1\n"));
    let rows: Vec<Vec<&str>> = text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split(',').collect())
        .collect();
    assert_eq!(rows.len(), 4);
    let mut centers: Vec<(f64, f64)> = Vec::new();
    for r in &rows {
        assert_eq!(r.len(), 4);
        assert_eq!(r[2].parse::<f64>().unwrap(), 0.25);
        centers.push((r[0].parse().unwrap(), r[1].parse().unwrap()));
    }
    centers.sort_by(|a, b| a.partial_cmp(b).unwrap());
    assert_eq!(centers, [(0.25, 0.25), (0.25, 0.75), (0.75, 0.25), (0.75, 0.75)]);
}

#[test]
fn rule_to_stdout_and_integrate_from_file() {
    let o = starquad(&["rule", "--domain", &cfg("disk.cfg"), "-n", "300"]);
    assert_eq!(o.status.code(), Some(0));
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("disk.csv");
    std::fs::write(&path, stdout(&o)).unwrap();

    let from_file = starquad(&[
        "integrate",
        "--domain",
        &cfg("disk.cfg"),
        "--rule-file",
        path.to_str().unwrap(),
        "-f",
        "const",
    ]);
    let fresh = starquad(&["integrate", "--domain", &cfg("disk.cfg"), "-n", "300", "-f", "const"]);
    assert_eq!(from_file.status.code(), Some(0));
    assert_eq!(stdout(&from_file), stdout(&fresh));
    let v: f64 = stdout(&fresh).trim().strip_prefix("cubature\t").unwrap().parse().unwrap();
    assert!((v - std::f64::consts::PI).abs() < 0.05, "{v}");
}

#[test]
fn fooling_error_on_aligned_square() {
    let o = starquad(&[
        "integrate",
        "--domain",
        &cfg("square.cfg"),
        "-n",
        "16",
        "-f",
        "fooling",
        "--reference-resolution",
        "2048",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let get = |key: &str| -> f64 {
        text.lines()
            .find_map(|l| l.strip_prefix(key))
            .unwrap()
            .trim()
            .parse()
            .unwrap()
    };
    assert_eq!(get("cubature\t"), 0.0);
    // 16 cells of side 1/4, each contributing ∫ |x|∞ over a square of half-side 1/8.
    let exact = 16.0 * 2.0 * 4.0 * 0.125f64.powi(3) / 3.0;
    assert!((get("error\t") - exact).abs() < 2e-3 * exact, "{text}");
}

#[test]
fn measure_brackets_closed_form() {
    let o = starquad(&["measure", "--domain", &cfg("star5.cfg"), "--resolution", "400"]);
    assert_eq!(o.status.code(), Some(0));
    let vals: Vec<f64> = stdout(&o)
        .lines()
        .filter(|l| !l.starts_with("resolution"))
        .map(|l| l.split('\t').nth(1).unwrap().parse().unwrap())
        .collect();
    assert!(vals[0] <= vals[2] && vals[2] <= vals[1], "{vals:?}");
}

#[test]
fn convergence_report_is_thread_count_independent() {
    let dir = tempfile::tempdir().unwrap();
    let mut reports = Vec::new();
    for threads in ["1", "3", "0"] {
        let out = dir.path().join(format!("conv{threads}.csv"));
        let o = starquad_env(
            &[
                "convergence",
                "--domain",
                &cfg("cross.cfg"),
                "--n-list",
                "64,128,256",
                "-o",
                out.to_str().unwrap(),
            ],
            &[("STARQUAD_THREADS", threads)],
        );
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        reports.push(std::fs::read_to_string(&out).unwrap());
    }
    assert!(reports[0].starts_with("# starquad-convergence v1\n# domain=cross\n"));
    assert_eq!(reports[0], reports[1]);
    assert_eq!(reports[0], reports[2]);
    let report = starquad_core::parse_report(&reports[0]).unwrap();
    assert_eq!(report.rows.len(), 3);
    assert!(report.slope.is_finite());
}

#[test]
fn verify_lemmas_prints_tsv() {
    let o = starquad(&["verify-lemmas", "--quick", "--no-w-region"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("check\tstatus\tsamples\tworst\ttolerance\tdetail"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split('\t').collect()).collect();
    assert_eq!(rows.len(), 10);
    assert_eq!(rows[0][0], "det-identity");
    assert!(rows.iter().all(|r| r.len() == 6 && r[1] == "pass"));
}

#[test]
fn exit_codes() {
    // usage errors
    assert_eq!(starquad(&["constant", "-d", "2", "-p", "inf", "--bogus"]).status.code(), Some(1));
    assert_eq!(starquad(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(starquad(&[]).status.code(), Some(1));
    assert_eq!(starquad_env(&["constant", "-d", "2", "-p", "inf"], &[("STARQUAD_THREADS", "many")]).status.code(), Some(1));
    // configuration and domain errors
    assert_eq!(starquad(&["measure", "--domain", "/no/such/file.cfg"]).status.code(), Some(1));
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.cfg");
    std::fs::write(&bad, "dim = 2\nshape = dodecahedron\n").unwrap();
    let o = starquad(&["measure", "--domain", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line"));
    assert_eq!(
        starquad(&["integrate", "--domain", &cfg("disk.cfg"), "-n", "10", "-f", "cubic"]).status.code(),
        Some(1)
    );
    assert_eq!(
        starquad(&["convergence", "--domain", &cfg("disk.cfg"), "--n-list", "64,32,128"]).status.code(),
        Some(1)
    );
    // numerical preconditions
    assert_eq!(starquad(&["constant", "-d", "3", "-p", "2"]).status.code(), Some(2));
    assert_eq!(
        starquad(&["measure", "--domain", &cfg("cross3d.cfg"), "--resolution", "100000000"]).status.code(),
        Some(2)
    );
}

#[test]
fn help_on_every_subcommand() {
    for sub in ["measure", "rule", "integrate", "constant", "bound", "convergence", "verify-lemmas"] {
        let o = starquad(&[sub, "--help"]);
        assert_eq!(o.status.code(), Some(0), "{sub}");
        assert!(stdout(&o).contains("Usage: starquad"), "{sub}");
    }
}
