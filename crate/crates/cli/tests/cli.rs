use std::path::PathBuf;
use std::process::{Command, Output};

fn lhsphere(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lhsphere"))
        .args(args)
        .env_remove("LHSPHERE_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

type Parsed = (Vec<(String, String)>, Vec<String>, Vec<Vec<String>>);

/// Metadata lines, header and data rows of a CSV document.
fn parse_csv(text: &str) -> Parsed {
    let meta: Vec<(String, String)> = text
        .lines()
        .take_while(|l| l.starts_with('#'))
        .map(|l| {
            let (k, v) = l.trim_start_matches("# ").split_once(" = ").unwrap();
            (k.to_string(), v.to_string())
        })
        .collect();
    let body: String = text.lines().skip(meta.len()).map(|l| format!("{l}\n")).collect();
    let mut reader = csv::Reader::from_reader(body.as_bytes());
    let header = reader.headers().unwrap().iter().map(str::to_string).collect();
    let rows = reader
        .records()
        .map(|r| r.unwrap().iter().map(str::to_string).collect())
        .collect();
    (meta, header, rows)
}

fn column(header: &[String], name: &str) -> usize {
    header
        .iter()
        .position(|h| h == name)
        .unwrap_or_else(|| panic!("no column {name}"))
}

fn num(s: &str) -> f64 {
    s.parse().unwrap()
}

fn temp_path(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("lhsphere-cli-{}-{name}", std::process::id()))
}

#[test]
fn trivial_sphere_rates_are_unity() {
    let out = lhsphere(&[
        "rates", "--eps1", "1", "--mu1", "1", "--ka-min", "0.5", "--ka-max", "2", "--steps", "4", "--rho", "1.5",
    ]);
    assert!(out.status.success());
    let (meta, header, rows) = parse_csv(&stdout(&out));
    assert!(meta[0].1.starts_with("lhsphere "));
    assert!(meta.iter().any(|(k, v)| k == "rho" && v == "1.5"));
    assert_eq!(rows.len(), 4);
    for row in &rows {
        for name in ["e1_radial", "e1_tangential", "m1_radial", "m1_tangential"] {
            let v = num(&row[column(&header, name)]);
            assert!((v - 1.0).abs() < 1e-12, "{name} = {v}");
        }
    }
}

#[test]
fn two_steps_give_the_endpoints() {
    let out = lhsphere(&[
        "rates", "--eps1", "2", "--ka-min", "0.5", "--ka-max", "2", "--steps", "2",
    ]);
    let (_, header, rows) = parse_csv(&stdout(&out));
    let ka: Vec<f64> = rows.iter().map(|r| num(&r[column(&header, "ka")])).collect();
    assert_eq!(ka, vec![0.5, 2.0]);
}

#[test]
fn subset_and_rho_sweep() {
    let out = lhsphere(&[
        "rates",
        "--eps1",
        "-4",
        "--mu1",
        "-1.05",
        "--vary",
        "rho",
        "--rho-min",
        "1.1",
        "--rho-max",
        "3",
        "--steps",
        "5",
        "--ka",
        "1.3",
        "--only",
        "m1-radial,e1-average",
    ]);
    assert!(out.status.success());
    let (_, header, rows) = parse_csv(&stdout(&out));
    assert_eq!(header, ["ka", "rho", "m1_radial", "e1_average", "n_used", "resonant"]);
    assert_eq!(rows.len(), 5);
    assert!(rows.iter().all(|r| num(&r[0]) == 1.3));
}

#[test]
fn vacuum_sphere_coefficient_vanishes() {
    let out = lhsphere(&["mie", "--n", "3", "--pol", "tm", "--steps", "50"]);
    assert!(out.status.success());
    let (_, header, rows) = parse_csv(&stdout(&out));
    assert_eq!(rows.len(), 50);
    for row in rows {
        assert_eq!(num(&row[column(&header, "abs")]), 0.0);
    }
}

#[test]
fn left_handed_mode_table() {
    let te = lhsphere(&["modes", "--eps1", "-4", "--mu1", "-1.05", "--pol", "te"]);
    assert!(te.status.success());
    let (meta, header, rows) = parse_csv(&stdout(&te));
    let orders: Vec<u32> = rows.iter().map(|r| r[column(&header, "n")].parse().unwrap()).collect();
    assert_eq!(orders, (1..=19).collect::<Vec<_>>());
    assert!(rows.iter().all(|r| r[column(&header, "kind")] == "surface"));
    assert!(rows.iter().all(|r| num(&r[column(&header, "q")]) > 0.0));
    let te_max: f64 = num(&meta.iter().find(|(k, _)| k == "n_max_te").unwrap().1);
    assert!((te_max - 20.0).abs() < 1e-9);

    let tm = lhsphere(&["modes", "--eps1", "-4", "--mu1", "-1.05", "--pol", "tm"]);
    let (meta, _, rows) = parse_csv(&stdout(&tm));
    assert!(rows.is_empty());
    assert!(meta
        .iter()
        .any(|(k, v)| k == "n_max_tm" && (num(v) - 1.0 / 3.0).abs() < 1e-12));
}

#[test]
fn vacuum_has_no_modes() {
    let out = lhsphere(&["modes"]);
    assert!(out.status.success());
    let (meta, _, rows) = parse_csv(&stdout(&out));
    assert!(rows.is_empty());
    assert!(meta.iter().any(|(k, _)| k == "n_max_tm"));
    assert!(meta.iter().any(|(k, _)| k == "n_max_te"));
}

#[test]
fn mixed_handedness_rays_are_rejected() {
    let out = lhsphere(&["rays", "--eps1", "-4", "--mu1", "1.05"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("neither right- nor left-handed"));
}

#[test]
fn center_aimed_ray_is_straight() {
    for eps in ["4", "-4"] {
        let mu = if eps == "4" { "1.05" } else { "-1.05" };
        let out = lhsphere(&["rays", "--eps1", eps, "--mu1", mu, "--fan", "1", "--format", "csv"]);
        assert!(out.status.success());
        let (_, header, rows) = parse_csv(&stdout(&out));
        let y = column(&header, "y");
        assert!(rows.len() >= 3);
        assert!(rows.iter().all(|r| num(&r[y]).abs() < 1e-15));
    }
}

#[test]
fn ray_csv_round_trips() {
    let path = temp_path("fig3.csv");
    let out = lhsphere(&["figure", "fig3", "--format", "csv", "-o", path.to_str().unwrap()]);
    assert!(out.status.success());
    let (_, header, rows) = parse_csv(&std::fs::read_to_string(&path).unwrap());
    std::fs::remove_file(&path).ok();

    let interior = lhsphere::Medium::real(-4.0, -1.05).unwrap();
    let paths = lhsphere::rays::trace_fan(
        lhsphere::rays::Vec2::new(1.5, 0.0),
        &interior,
        &lhsphere::Medium::vacuum(),
        61,
        8,
    )
    .unwrap();
    let expected: Vec<(usize, f64, f64)> = paths
        .iter()
        .enumerate()
        .flat_map(|(i, p)| p.points.iter().map(move |v| (i, v.x, v.y)))
        .collect();
    assert_eq!(rows.len(), expected.len());
    let (ray, x, y) = (column(&header, "ray"), column(&header, "x"), column(&header, "y"));
    for (row, (i, ex, ey)) in rows.iter().zip(expected) {
        assert_eq!(row[ray].parse::<usize>().unwrap(), i);
        assert!((num(&row[x]) - ex).abs() <= 1e-12);
        assert!((num(&row[y]) - ey).abs() <= 1e-12);
    }
}

#[test]
fn ray_presets_differ_in_focusing() {
    let metric = |name: &str| {
        let out = lhsphere(&["figure", name]);
        assert!(out.status.success());
        let svg = stdout(&out);
        assert!(svg.starts_with("<svg"));
        let line = svg.lines().find(|l| l.starts_with("focusing_metric = ")).unwrap();
        num(line.trim_start_matches("focusing_metric = "))
    };
    let (rh, lh) = (metric("fig2"), metric("fig3"));
    assert!(lh < 0.25 * rh, "LH {lh} vs RH {rh}");
}

#[test]
fn output_is_deterministic() {
    let args = [
        "rates", "--eps1", "-4", "--mu1", "-1.05", "--ka-min", "1.8", "--ka-max", "2", "--steps", "40",
    ];
    let a = lhsphere(&args);
    let b = Command::new(env!("CARGO_BIN_EXE_lhsphere"))
        .args(args)
        .env("LHSPHERE_THREADS", "1")
        .output()
        .unwrap();
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn config_supplies_defaults_and_flags_win() {
    let path = temp_path("config.txt");
    std::fs::write(&path, "# sphere\neps1 = -4\nmu1=-1.05\nsteps = 3\nfan = 7\n").unwrap();
    let cfg = path.to_str().unwrap();
    let out = lhsphere(&["mie", "--config", cfg, "--steps", "5"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let (meta, _, rows) = parse_csv(&stdout(&out));
    assert_eq!(rows.len(), 5);
    assert!(meta.iter().any(|(k, v)| k == "eps1" && v == "-4"));
    assert!(meta.iter().any(|(k, v)| k == "mu1" && v == "-1.05"));

    std::fs::write(&path, "colour = blue\n").unwrap();
    let out = lhsphere(&["mie", "--config", cfg]);
    std::fs::remove_file(&path).ok();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn fig4_curves() {
    let out = lhsphere(&["figure", "fig4"]);
    assert!(out.status.success());
    let (_, header, rows) = parse_csv(&stdout(&out));
    let (curve, ka, abs) = (
        column(&header, "curve"),
        column(&header, "ka"),
        column(&header, "p_abs"),
    );
    let peak = |label: &str| {
        rows.iter()
            .filter(|r| r[curve] == label && num(&r[ka]) < 2.5)
            .map(|r| num(&r[abs]))
            .fold(0.0, f64::max)
    };
    assert!(peak("LH") > 0.99);
    assert!(peak("RH") < 0.5);
    let lh_center = rows
        .iter()
        .find(|r| r[curve] == "LH" && r[column(&header, "center")] == "TE8")
        .unwrap();
    assert!((num(&lh_center[ka]) - 1.941943712446498).abs() < 1e-9);
}

#[test]
fn jsonl_has_meta_then_rows() {
    let out = lhsphere(&[
        "mie", "--eps1", "4", "--mu1", "1.05", "--steps", "3", "--format", "jsonl",
    ]);
    let text = stdout(&out);
    let lines: Vec<serde_json::Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 4);
    assert_eq!(lines[0]["meta"]["command"], "mie");
    assert_eq!(lines[3]["ka"], 10.0);
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        vec!["rates", "--bogus"],
        vec!["rates", "--steps", "1"],
        vec!["rates", "--ka-min", "3", "--ka-max", "2"],
        vec!["rates", "--steps", "20000000"],
        vec!["rates", "--rho", "0.5"],
        vec!["rates", "--rel-tol", "0.01"],
        vec!["mie", "--eps1", "abc"],
        vec!["mie", "--format", "svg"],
        vec!["modes", "--ka-min", "0"],
    ] {
        assert_eq!(lhsphere(&args).status.code(), Some(2), "{args:?}");
    }
    let out = Command::new(env!("CARGO_BIN_EXE_lhsphere"))
        .args(["mie"])
        .env("LHSPHERE_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}
