use std::process::{Command, Output};

use aw_cli::report::Report;
use rug::Float;

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_anger-weber"))
        .args(args)
        .env_remove("AW_DIGITS")
        .output()
        .expect("spawn binary")
}

fn csv(args: &[&str]) -> Report {
    let mut full = vec!["--output", "csv"];
    full.extend_from_slice(args);
    let out = bin(&full);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    Report::from_csv(&String::from_utf8(out.stdout).unwrap()).unwrap()
}

fn num(s: &str) -> Float {
    Float::with_val(
        400,
        Float::parse(s).unwrap_or_else(|_| panic!("not a number: {s}")),
    )
}

fn quantity(rep: &Report, name: &str) -> (Float, Float) {
    let row = rep
        .rows
        .iter()
        .find(|r| r[0] == name)
        .unwrap_or_else(|| panic!("no row {name}"));
    (num(&row[1]), num(&row[2]))
}

fn digits(a: &Float, b: &Float) -> f64 {
    anger_weber::numerics::agreement_digits(a, b, 200.0)
}

#[test]
fn coefficient_zero_is_one_over_one_plus_lambda() {
    let rep = csv(&["coeff", "-n", "0", "--lambda", "1"]);
    let (a0, _) = quantity(&rep, "a_n");
    assert!(digits(&a0, &num("0.5")) >= 50.0);
}

#[test]
fn coefficient_fifty_at_beta_pi_over_six() {
    let rep = csv(&["coeff", "-n", "50", "--beta", "pi/6"]);
    let (a, _) = quantity(&rep, "a_n");
    assert!(digits(&a, &num("0.2004926124399177097019512509947129e-51")) >= 33.0);
}

#[test]
fn series_and_integral_coefficients_agree() {
    let rep = csv(&[
        "--digits", "40", "coeff", "-n", "3", "--lambda", "2", "--method", "both",
    ]);
    let (s, _) = quantity(&rep, "a_n series");
    let (q, _) = quantity(&rep, "a_n integral");
    assert!(digits(&s, &q) >= 20.0);
}

#[test]
fn optimally_truncated_error_is_below_the_bound() {
    let direct = csv(&[
        "eval", "--nu", "10", "--arg", "0", "--lambda", "1", "--mode", "direct",
    ]);
    let series = csv(&[
        "eval", "--nu", "10", "--arg", "0", "--lambda", "1", "--mode", "poincare", "--auto-N",
    ]);
    let (d, _) = quantity(&direct, "value");
    let (v, _) = quantity(&series, "value");
    let (b, _) = quantity(&series, "bound");
    let diff = Float::with_val(400, &d - &v).abs();
    assert!(diff < b, "{diff} vs {b}");
}

#[test]
fn improved_mode_gains_from_a_third_term() {
    let run = |m: &str| {
        let rep = csv(&[
            "--digits", "40", "eval", "--nu", "12", "--arg", "0.25pi", "--beta", "pi/3", "--mode",
            "improved", "-M", m,
        ]);
        quantity(&rep, "residual").0
    };
    let (r2, r3) = (run("2"), run("3"));
    assert!(r3 < r2, "{r3} vs {r2}");
}

#[test]
fn improved_mode_rejects_lambda_below_one() {
    let out = bin(&[
        "eval", "--nu", "10", "--arg", "0.6pi", "--lambda", "0.5", "--mode", "improved",
    ]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("regime LT1 unsupported"));
}

#[test]
fn sector_violation_names_the_constraint() {
    let out = bin(&[
        "eval", "--nu", "10", "--arg", "pi", "--lambda", "2", "--mode", "direct",
    ]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("|arg nu| < pi"));
}

#[test]
fn table_needs_fifty_digits() {
    let out = bin(&["--digits", "40", "reproduce-table", "--id", "1"]);
    assert!(!out.status.success());
}

fn table_rows<'a>(rep: &'a Report, label: &str) -> Vec<&'a Vec<String>> {
    rep.rows.iter().filter(|r| r[0] == label).collect()
}

#[test]
fn second_table_row_ten() {
    let rep = csv(&["reproduce-table", "--id", "2"]);
    let col = |n: &str| rep.column(n).unwrap();
    let rows = table_rows(&rep, "n=10, M=20");
    assert_eq!(rows.len(), 4);
    for r in rows {
        assert_eq!(r[col("case")], "M2");
        assert_eq!(r[col("pass")], "yes", "{r:?}");
    }
}

#[test]
fn third_table_row_five_error_magnitude() {
    // the tabulated value has four digits; exact - approx is negative here
    let rep = csv(&["reproduce-table", "--id", "3"]);
    let col = |n: &str| rep.column(n).unwrap();
    let row = table_rows(&rep, "alpha=5, M=62")
        .into_iter()
        .find(|r| r[col("column")] == "error")
        .unwrap();
    let got = num(&row[col("computed")]);
    assert!(got < 0);
    assert!(digits(&got.abs(), &num("0.1280e-102")) >= 3.0);
}

#[test]
fn emissions_round_trip_to_the_same_scores() {
    let text = |fmt: &str| {
        let out = bin(&["--output", fmt, "reproduce-table", "--id", "1"]);
        assert!(out.status.success());
        String::from_utf8(out.stdout).unwrap()
    };
    let from_csv = Report::from_csv(&text("csv")).unwrap();
    let from_json = Report::from_json(&text("json")).unwrap();
    assert_eq!(
        from_json
            .meta
            .iter()
            .find(|(k, _)| k == "digits")
            .unwrap()
            .1,
        "60"
    );
    for rep in [&from_csv, &from_json] {
        let col = |n: &str| rep.column(n).unwrap();
        assert_eq!(rep.rows.len(), 12);
        for r in &rep.rows {
            let again = digits(&num(&r[col("computed")]), &num(&r[col("reference")])).min(60.0);
            let reported: f64 = r[col("digits")].parse().unwrap();
            assert!((again - reported).abs() <= 0.1, "{r:?}");
        }
    }
}

#[test]
fn scan_columns_and_default_window() {
    let rep = csv(&["stokes-scan", "--beta", "pi/3", "--oracle", "none"]);
    assert_eq!(
        rep.columns,
        [
            "theta",
            "terminant_re",
            "terminant_im",
            "erf_pred_re",
            "erf_pred_im",
            "residual",
            "oracle_ok"
        ]
    );
    assert_eq!(rep.rows.len(), 41);
    let mid = &rep.rows[20];
    let half_pi = Float::with_val(200, rug::float::Constant::Pi) / 2u32;
    assert!(digits(&num(&mid[0]), &half_pi) > 50.0);
    let t = num(&mid[1]).to_f64();
    assert!((0.4..=0.6).contains(&t));
    let dev = rep
        .rows
        .iter()
        .map(|r| (num(&r[1]).to_f64() - num(&r[3]).to_f64()).abs())
        .fold(0.0, f64::max);
    assert!(dev <= 0.02);
}

#[test]
fn scan_with_oracle_fills_residuals() {
    let rep = csv(&[
        "--digits",
        "30",
        "stokes-scan",
        "--beta",
        "pi/3",
        "--steps",
        "3",
        "--lo",
        "1.4",
        "--hi",
        "1.7",
    ]);
    for r in &rep.rows {
        assert_eq!(r[6], "yes");
        assert!(num(&r[5]) < 1e-30);
    }
}

/// Every numeric cell of a `--digits d` run against the `2d` run.
fn assert_stable(args: &[&str], d: u32) {
    let lo = d.to_string();
    let hi = (2 * d).to_string();
    let a = csv(&[&["--digits", lo.as_str()], args].concat());
    let b = csv(&[&["--digits", hi.as_str()], args].concat());
    assert_eq!(a.rows.len(), b.rows.len());
    for (ra, rb) in a.rows.iter().zip(&b.rows) {
        for (x, y) in ra.iter().zip(rb) {
            let (Ok(x), Ok(y)) = (Float::parse(x), Float::parse(y)) else {
                assert_eq!(x, y);
                continue;
            };
            let (x, y) = (Float::with_val(400, x), Float::with_val(400, y));
            if x.is_zero() && y.is_zero() {
                continue;
            }
            let dg = digits(&x, &y);
            assert!(dg >= f64::from(d) - 10.0, "{args:?}: {x} vs {y} ({dg:.1})");
        }
    }
}

#[test]
fn doubling_digits_keeps_the_printed_digits() {
    assert_stable(&["coeff", "-n", "7", "--beta", "pi/5"], 30);
    assert_stable(
        &[
            "eval", "--nu", "10", "--arg", "0.2pi", "--lambda", "2", "-N", "6",
        ],
        30,
    );
    assert_stable(
        &[
            "eval", "--nu", "12", "--arg", "0.3pi", "--lambda", "1", "--mode", "improved", "-M",
            "2",
        ],
        30,
    );
    assert_stable(&["late", "-n", "20", "--alpha", "1"], 30);
    assert_stable(
        &["terminant", "-p", "10.5", "--r", "10", "--phi", "0.9pi"],
        30,
    );
}
