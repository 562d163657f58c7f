use std::f64::consts::PI;
use std::process::{Command, Output};

use atomloc_cli::args::Cli;
use atomloc_cli::config::RunConfig;
use clap::Parser;

fn atomloc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_atomloc")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn resolve(args: &[&str]) -> RunConfig {
    RunConfig::resolve(&Cli::try_parse_from(std::iter::once("atomloc").chain(args.iter().copied())).unwrap()).unwrap()
}

#[test]
fn flat_profile_csv() {
    let o = atomloc(&["profile", "--preset", "fig4e", "--format", "csv"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("kappa_x,chi_re,chi_im"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 513);
    assert!(rows.iter().all(|r| (r[2] - 1.0).abs() <= 1e-12));
    assert!(rows.windows(2).all(|w| w[1][0] > w[0][0]));
    // 17 significant digits
    let first = text.lines().nth(1).unwrap().split(',').next().unwrap();
    assert_eq!(first, "-3.1415926535897931e0");
}

#[test]
fn sub_half_peaks_json() {
    let o = atomloc(&["peaks", "--preset", "subhalf_phi0"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["class"], "SubHalfNegative");
    let xs: Vec<f64> = v["peaks"].as_array().unwrap().iter().map(|p| p["kappa_x"].as_f64().unwrap()).collect();
    assert_eq!(xs.len(), 2);
    assert!((xs[0] + 5.0 * PI / 6.0).abs() < 1e-3 && (xs[1] + PI / 6.0).abs() < 1e-3, "{xs:?}");
    // printed to four places: -2.6180, -0.5236
    assert!(format!("{:.4}", xs[0]) == "-2.6180" && format!("{:.4}", xs[1]) == "-0.5236", "{xs:?}");
}

#[test]
fn grid_override_reaches_peak_search() {
    let o = atomloc(&["peaks", "--preset", "subhalf_phipi", "--grid-n", "4096"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["grid_n"], 4096);
    assert_eq!(v["class"], "SubHalfPositive");
    let o = atomloc(&["classify", "--preset", "fig4e", "--format", "csv"]);
    assert_eq!(stdout(&o), "class\nUniform\n");
}

#[test]
fn verify_passes_on_fig2b() {
    let o = atomloc(&["verify", "--preset", "fig2b", "--x-count", "65"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["passed"], true);
    assert_eq!(v["points"], 65);
    assert!(v["max_deviation"].as_f64().unwrap() <= 1e-6);
    assert!(v["summary"].as_str().unwrap().starts_with("3-way max deviation"));
    assert!(stderr(&o).contains("<= 1e-6"));
}

#[test]
fn computational_failures_exit_1() {
    // no drives, no decay on the ground coherences and zero detuning: M is singular
    let singular = ["--omega1", "0", "--theta2", "pi/2", "--theta3", "0", "--delta", "0", "--x-count", "5"];
    let o = atomloc(&[&["peaks"][..], &singular].concat());
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).starts_with("atomloc: "));
    let o = atomloc(&[&["verify"][..], &singular].concat());
    assert_eq!(code(&o), 1);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["passed"], false);
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["profile", "--phi", "banana"][..],
        &["profile", "--preset", "fig2a", "--frobnicate"],
        &["profile"],
        &["profile", "--preset", "nope"],
        &["fly", "--preset", "fig2a"],
        &["heatmap", "--preset", "fig2a"],
        &["heatmap", "--preset", "fig3_phi0", "--format", "svg"],
        &["curves", "--preset", "fig3_phi0", "--phi", "1"],
        &["profile", "--preset", "fig2a", "--x-count", "1"],
        &["profile", "--preset", "fig2a", "--omega1", "-3"],
        &["profile", "--preset", "fig2a", "--delta-range", "1:2"],
    ] {
        let o = atomloc(args);
        assert_eq!(code(&o), 2, "{args:?}: {}", stderr(&o));
        assert!(!stderr(&o).is_empty());
        assert!(o.stdout.is_empty(), "{args:?}");
    }
}

#[test]
fn angle_expressions() {
    let a = resolve(&["profile", "--omega1", "3", "--phi", "pi/2", "--theta2", "3pi/4", "--theta3", "pi/4"]);
    assert_eq!(a.params.drive.phi, PI / 2.0);
    assert_eq!(a.params.drive.theta2, 3.0 * PI / 4.0);
    assert_eq!(a.params.drive.theta3, PI / 4.0);
    assert_eq!(resolve(&["profile", "--delta", "pi"]).params.delta, PI);
}

#[test]
fn dumped_config_reparses_identically() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.json");
    let p = path.to_str().unwrap();
    let args = [
        "heatmap",
        "--preset",
        "fig3_phi0",
        "--omega1",
        "12.5",
        "--theta2",
        "pi/5",
        "--gamma-bc",
        "0.1",
        "--grid-n",
        "1024",
    ];
    let o = atomloc(&[&args[..], &["--dump-config", "--output", p]].concat());
    assert_eq!(code(&o), 0, "{}", stderr(&o));

    let original = resolve(&args);
    let reparsed = resolve(&["heatmap", "--config", p]);
    assert_eq!(reparsed, original);

    let again = atomloc(&["heatmap", "--config", p, "--dump-config"]);
    assert_eq!(stdout(&again), std::fs::read_to_string(&path).unwrap());

    let doc: serde_json::Value = serde_json::from_str(&stdout(&again)).unwrap();
    for key in ["drive", "decay", "probe", "medium", "scan"] {
        assert!(doc[key].is_object(), "{key}");
    }
    assert_eq!(doc["scan"]["delta_range"]["count"], 121);
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.json");
    std::fs::write(
        &path,
        r#"{"drive": {"omega1": 3, "omega2": 1, "omega3": 1, "phi": 1.5707963267948966}, "probe": {"delta": 5}}"#,
    )
    .unwrap();
    let p = path.to_str().unwrap();
    let rc = resolve(&["profile", "--config", p, "--delta", "1.4"]);
    assert_eq!(rc.params.delta, 1.4);
    assert_eq!(rc.params.drive.omega1, 3.0);
    std::fs::write(&path, r#"{"drive": {"omega9": 3}}"#).unwrap();
    assert_eq!(code(&atomloc(&["profile", "--config", p])), 2);
    assert_eq!(code(&atomloc(&["profile", "--config", "/nonexistent/atomloc.json"])), 2);
}

#[test]
fn heatmap_csv() {
    let o = atomloc(&["heatmap", "--preset", "fig3_phipi", "--delta-range", "0:30:11", "--x-count", "9"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "delta,kappa_x,chi_re,chi_im");
    assert_eq!(lines.len(), 1 + 11 * 9);
    // delta outer, kappa_x inner
    let cols: Vec<Vec<&str>> = lines[1..].iter().map(|l| l.split(',').collect()).collect();
    assert!(cols[..9].iter().all(|c| c[0] == cols[0][0]));
    assert_eq!(cols[9][0].parse::<f64>().unwrap(), 3.0);
    assert_eq!(cols[1][1].parse::<f64>().unwrap(), -0.75 * PI);
}

#[test]
fn undefined_cells_in_outputs() {
    let singular = ["--omega1", "0", "--theta2", "pi/2", "--theta3", "0", "--delta", "0", "--x-count", "3"];
    let o = atomloc(&[&["profile"][..], &singular].concat());
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).lines().skip(1).all(|l| l.ends_with(",undefined,undefined")));
    let o = atomloc(&[&["profile", "--format", "json"][..], &singular].concat());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["rows"].as_array().unwrap().iter().all(|r| r["value"].is_null()));
}

#[test]
fn curves_csv() {
    let o = atomloc(&["curves", "--preset", "fig3_phi0", "--x-count", "5"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = stdout(&o);
    assert_eq!(text.lines().next(), Some("branch_id,kappa_x,delta"));
    assert_eq!(text.lines().count(), 1 + 3 * 5);
    let o = atomloc(&["curves", "--preset", "fig3_phihalf", "--x-count", "5", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 2);
}

#[test]
fn preset_list() {
    let o = atomloc(&["preset-list"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    for name in [
        "fig2a",
        "fig2b",
        "fig2c",
        "fig2d",
        "fig3_phi0",
        "fig3_phihalf",
        "fig3_phipi",
        "fig4e",
        "subhalf_phi0",
        "subhalf_phipi",
    ] {
        assert!(text.lines().any(|l| l.starts_with(&format!("{name},"))), "{name}");
    }
}

/// Local maxima of the plotted curve; SVG `y` grows downward.
fn polyline_peaks(svg: &str) -> usize {
    let pts = svg.split("points=\"").nth(1).unwrap().split('"').next().unwrap();
    let ys: Vec<f64> = pts.split(' ').map(|p| p.split(',').nth(1).unwrap().parse().unwrap()).collect();
    let (lo, hi) = ys.iter().fold((f64::MAX, f64::MIN), |(a, b), &y| (a.min(y), b.max(y)));
    let threshold = 0.05 * (hi - lo);
    // count descents into a top that is followed by a climb of at least `threshold`
    let mut peaks = 0;
    let mut best = ys[0];
    let mut rising = false;
    for &y in &ys[1..] {
        if rising {
            if y < best {
                best = y;
            } else if y - best > threshold {
                peaks += 1;
                rising = false;
                best = y;
            }
        } else if y > best {
            best = y;
        } else if best - y > threshold {
            rising = true;
            best = y;
        }
    }
    peaks
}

#[test]
fn svg_output() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fig2a.svg");
    let o = atomloc(&["profile", "--preset", "fig2a", "--format", "svg", "--output", path.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(o.stdout.is_empty());
    let svg = std::fs::read_to_string(&path).unwrap();
    assert!(svg.starts_with("<svg"));
    assert_eq!(svg.matches("<polyline").count(), 1);
    assert_eq!(svg.matches(r#"class="guide""#).count(), 1);
    assert_eq!(polyline_peaks(&svg), 2);
    let again = atomloc(&["profile", "--preset", "fig2a", "--format", "svg"]);
    assert_eq!(stdout(&again), svg);

    let d = stdout(&atomloc(&["profile", "--preset", "fig2d", "--format", "svg"]));
    assert_eq!(polyline_peaks(&d), 4);
}

#[test]
fn help_exits_cleanly() {
    let o = atomloc(&["--help"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("preset-list"));
}
