use std::f64::consts::PI;

use anger_weber::expansion::{
    anger_weber_continued, eval_improved_with_n, eval_poincare, optimal_n, oracle_precision, Nu,
    Side, TruncatedExpansion,
};
use anger_weber::kernels::{coeff_via_integral, tilde_a, Lambda, Regime};
use anger_weber::latecoeff::{late_one, late_sec, late_sech, optimal_m};
use anger_weber::numerics::{agreement_digits, ln_abs, Precision};
use anger_weber::powser::anger_weber_coeff;
use anger_weber::stokes::{default_window, grid, stokes_scan, Oracle, ScanOptions};
use anger_weber::terminant::{
    terminant_continued, terminant_erf_lower, terminant_erf_upper, terminant_polar,
};
use anger_weber::Error;
use clap::{Args, Parser, Subcommand, ValueEnum};
use rug::{Complex, Float};

use crate::angle::{parse_angle, Angle};
use crate::report::{sci, Format, Report};
use crate::tables::table_report;

#[derive(Debug, Parser)]
#[command(
    name = "anger-weber",
    version,
    about = "Asymptotics of the Anger-Weber function A_nu(lambda nu)"
)]
pub struct Cli {
    /// Working precision in decimal digits (at least 30).
    #[arg(long, global = true, env = "AW_DIGITS", default_value_t = 60)]
    pub digits: u32,

    /// text, csv or json.
    #[arg(long, global = true, default_value = "text")]
    pub output: Format,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
#[group(required = true, multiple = false)]
pub struct LambdaSpec {
    /// lambda itself.
    #[arg(long, value_parser = angle_arg, allow_hyphen_values = true)]
    pub lambda: Option<Angle>,
    /// lambda = sec(beta), 0 < beta < pi/2.
    #[arg(long, value_parser = angle_arg)]
    pub beta: Option<Angle>,
    /// lambda = sech(alpha), alpha > 0.
    #[arg(long, value_parser = angle_arg)]
    pub alpha: Option<Angle>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CoeffMethod {
    Series,
    Integral,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EvalMode {
    Poincare,
    Improved,
    Direct,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TerminantArg {
    /// Principal sheet by quadrature, connection formula elsewhere.
    Auto,
    /// Quadrature along a rotated ray, |phi| < 7 pi / 6.
    Quadrature,
    Erf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SideArg {
    Upper,
    Lower,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OracleArg {
    None,
    Integral,
    Kernel,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// The coefficient a_n(lambda) of the large-nu expansion.
    Coeff {
        #[arg(short = 'n')]
        n: usize,
        #[command(flatten)]
        lambda: LambdaSpec,
        #[arg(long, value_enum, default_value_t = CoeffMethod::Series)]
        method: CoeffMethod,
        /// Also print ã_n (lambda < 1 only).
        #[arg(long)]
        tilde: bool,
    },
    /// A_nu(lambda nu) at nu = |nu| e^{i arg}.
    Eval {
        #[arg(long, value_parser = angle_arg)]
        nu: Angle,
        #[arg(long, value_parser = angle_arg, allow_hyphen_values = true, default_value = "0")]
        arg: Angle,
        #[command(flatten)]
        lambda: LambdaSpec,
        #[arg(long, value_enum, default_value_t = EvalMode::Poincare)]
        mode: EvalMode,
        /// Truncation index.
        #[arg(short = 'N', conflicts_with = "auto_n")]
        n: Option<usize>,
        /// Truncate near the smallest term (the default when -N is absent).
        #[arg(long = "auto-N")]
        auto_n: bool,
        /// Terminant terms per side in improved mode.
        #[arg(short = 'M', default_value_t = 3)]
        m: usize,
    },
    /// The scaled terminant function at w = r e^{i phi}.
    Terminant {
        #[arg(short = 'p', value_parser = angle_arg)]
        p: Angle,
        #[arg(long, value_parser = angle_arg)]
        r: Angle,
        #[arg(long, value_parser = angle_arg, allow_hyphen_values = true)]
        phi: Angle,
        #[arg(long, value_enum, default_value_t = TerminantArg::Auto)]
        method: TerminantArg,
    },
    /// Large-n approximation of a_n with its error bound.
    Late {
        #[arg(short = 'n')]
        n: usize,
        #[command(flatten)]
        lambda: LambdaSpec,
        /// Number of terms; chosen near the optimum when absent.
        #[arg(short = 'M')]
        m: Option<usize>,
    },
    /// Sweep arg nu across a Stokes line.
    StokesScan {
        #[command(flatten)]
        lambda: LambdaSpec,
        #[arg(long, value_parser = angle_arg, default_value = "20")]
        nu: Angle,
        #[arg(long, value_parser = angle_arg, allow_hyphen_values = true)]
        lo: Option<Angle>,
        #[arg(long, value_parser = angle_arg, allow_hyphen_values = true)]
        hi: Option<Angle>,
        #[arg(long, default_value_t = 41)]
        steps: usize,
        #[arg(long, value_enum, default_value_t = SideArg::Upper)]
        side: SideArg,
        #[arg(long, value_enum, default_value_t = OracleArg::Integral)]
        oracle: OracleArg,
        #[arg(short = 'M', default_value_t = 3)]
        m: usize,
    },
    /// Recompute one of the late-coefficient tables and score it.
    ReproduceTable {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
        id: u8,
    },
}

fn angle_arg(s: &str) -> std::result::Result<Angle, String> {
    parse_angle(s).ok_or_else(|| format!("cannot parse {s:?} as a number or a multiple of pi"))
}

fn lambda_of(spec: &LambdaSpec, prec: Precision) -> anger_weber::Result<Lambda> {
    let bits = prec.bits();
    match (&spec.lambda, &spec.beta, &spec.alpha) {
        (Some(l), _, _) => Lambda::from_value(&l.to_float(bits), prec),
        (_, Some(b), _) => Lambda::from_beta(&b.to_float(bits), prec),
        (_, _, Some(a)) => Lambda::from_alpha(&a.to_float(bits), prec),
        _ => Err(Error::Domain(
            "one of --lambda, --beta or --alpha is required".into(),
        )),
    }
}

/// Digits printed for every number: a few below the working precision.
fn shown(prec: Precision) -> u32 {
    prec.digits() - 5
}

fn lambda_meta(rep: &mut Report, lambda: &Lambda, prec: Precision) {
    rep.meta("digits", prec.digits().to_string());
    rep.meta("lambda", sci(lambda.value(), shown(prec)));
    rep.meta("regime", lambda.regime().tag());
}

fn push_real(rep: &mut Report, name: &str, x: &Float, prec: Precision) {
    rep.push(vec![name.to_string(), sci(x, shown(prec)), "0".to_string()]);
}

fn push_complex(rep: &mut Report, name: &str, z: &Complex, prec: Precision) {
    rep.push(vec![
        name.to_string(),
        sci(z.real(), shown(prec)),
        sci(z.imag(), shown(prec)),
    ]);
}

const QUANTITY_COLUMNS: [&str; 3] = ["quantity", "re", "im"];

/// Run a parsed command line and return the rendered report.
pub fn run(cli: &Cli) -> anger_weber::Result<String> {
    let prec = Precision::new(cli.digits)?;
    let rep = match &cli.command {
        Command::Coeff {
            n,
            lambda,
            method,
            tilde,
        } => coeff(*n, lambda, *method, *tilde, prec)?,
        Command::Eval {
            nu,
            arg,
            lambda,
            mode,
            n,
            auto_n: _,
            m,
        } => eval(nu, arg, lambda, *mode, *n, *m, prec)?,
        Command::Terminant { p, r, phi, method } => terminant(p, r, phi, *method, prec)?,
        Command::Late { n, lambda, m } => late(*n, lambda, *m, prec)?,
        Command::StokesScan {
            lambda,
            nu,
            lo,
            hi,
            steps,
            side,
            oracle,
            m,
        } => scan(
            lambda,
            nu,
            lo.as_ref(),
            hi.as_ref(),
            *steps,
            *side,
            *oracle,
            *m,
            prec,
        )?,
        Command::ReproduceTable { id } => {
            if cli.digits < 50 {
                return Err(Error::Domain(format!(
                    "table reproduction needs --digits >= 50, got {}",
                    cli.digits
                )));
            }
            table_report(*id, prec)?
        }
    };
    Ok(rep.render(cli.output))
}

fn coeff(
    n: usize,
    spec: &LambdaSpec,
    method: CoeffMethod,
    tilde: bool,
    prec: Precision,
) -> anger_weber::Result<Report> {
    let lambda = lambda_of(spec, prec)?;
    if tilde && lambda.regime() != Regime::Lt1 {
        return Err(Error::Domain("--tilde needs lambda < 1".into()));
    }
    let mut rep = Report::new(format!("a_{n}(lambda)"), &QUANTITY_COLUMNS);
    lambda_meta(&mut rep, &lambda, prec);
    rep.meta("method", format!("{method:?}").to_lowercase());
    match method {
        CoeffMethod::Series => {
            push_real(&mut rep, "a_n", &anger_weber_coeff(n, &lambda, prec)?, prec)
        }
        CoeffMethod::Integral => push_real(
            &mut rep,
            "a_n",
            &coeff_via_integral(n, &lambda, prec)?,
            prec,
        ),
        CoeffMethod::Both => {
            let s = anger_weber_coeff(n, &lambda, prec)?;
            let q = coeff_via_integral(n, &lambda, prec)?;
            let d = Float::with_val(prec.bits(), &s - &q);
            push_real(&mut rep, "a_n series", &s, prec);
            push_real(&mut rep, "a_n integral", &q, prec);
            push_real(&mut rep, "difference", &d, prec);
            rep.meta(
                "agreement_digits",
                format!("{:.1}", agreement_digits(&s, &q, prec.digits() as f64)),
            );
        }
    }
    if tilde {
        push_real(&mut rep, "tilde_a_n", &tilde_a(n, &lambda, prec)?, prec);
    }
    Ok(rep)
}

fn expansion_rows(rep: &mut Report, t: &TruncatedExpansion, prec: Precision) {
    push_complex(rep, "value", &t.value, prec);
    if let Some(b) = &t.bound {
        push_real(rep, "bound", b, prec);
    }
    if let Some(e) = &t.envelope {
        push_real(rep, "envelope", e, prec);
    }
    rep.meta("N", t.n.to_string());
    if let Some(m) = t.m {
        rep.meta("M", m.to_string());
    }
    rep.meta("bound_id", t.bound_id.tag());
    for (k, note) in t.notes.iter().enumerate() {
        rep.meta(&format!("note {k}"), note.clone());
    }
}

#[allow(clippy::too_many_arguments)]
fn eval(
    modulus: &Angle,
    arg: &Angle,
    spec: &LambdaSpec,
    mode: EvalMode,
    n: Option<usize>,
    m: usize,
    prec: Precision,
) -> anger_weber::Result<Report> {
    let shown_prec = prec;
    let lambda = lambda_of(spec, prec)?;
    let mut rep = Report::new("A_nu(lambda nu)", &QUANTITY_COLUMNS);
    lambda_meta(&mut rep, &lambda, shown_prec);
    rep.meta("mode", format!("{mode:?}").to_lowercase());
    let oracle_ok = arg.to_float(64).to_f64().abs() < PI;
    // the true error is a difference of nearly equal numbers
    let prec = if oracle_ok && mode != EvalMode::Direct {
        let terms = if mode == EvalMode::Improved { m } else { 0 };
        oracle_precision(&modulus.to_float(prec.bits()), &lambda, terms, prec)
    } else {
        prec
    };
    let bits = prec.bits();
    let lambda = lambda_of(spec, prec)?;
    let nu = Nu::new(&modulus.to_float(bits), &arg.to_float(bits))?;
    let value = match mode {
        EvalMode::Direct => {
            let v = anger_weber_continued(&nu, &lambda, prec)?;
            push_complex(&mut rep, "value", &v, shown_prec);
            return Ok(rep);
        }
        EvalMode::Poincare => {
            let n_trunc = match n {
                Some(n) => n,
                None => optimal_n(nu.modulus(), &lambda)?,
            };
            let t = eval_poincare(&nu, &lambda, n_trunc, prec)?;
            expansion_rows(&mut rep, &t, shown_prec);
            t.value
        }
        EvalMode::Improved => {
            if lambda.regime() == Regime::Lt1 {
                return Err(Error::RegimeUnsupported("LT1"));
            }
            let n_trunc = match n {
                Some(n) => n,
                None => optimal_n(nu.modulus(), &lambda)?,
            };
            let t = eval_improved_with_n(&nu, &lambda, n_trunc, m, prec)?;
            expansion_rows(&mut rep, &t, shown_prec);
            t.value
        }
    };
    if oracle_ok {
        let exact = anger_weber_continued(&nu, &lambda, prec)?;
        let err = Complex::with_val(bits, &exact - &value);
        push_complex(&mut rep, "true_error", &err, shown_prec);
        let name = if mode == EvalMode::Improved {
            "residual"
        } else {
            "abs_error"
        };
        push_real(
            &mut rep,
            name,
            &Float::with_val(bits, err.abs_ref()),
            shown_prec,
        );
    }
    Ok(rep)
}

fn terminant(
    p: &Angle,
    r: &Angle,
    phi: &Angle,
    method: TerminantArg,
    prec: Precision,
) -> anger_weber::Result<Report> {
    let bits = prec.bits();
    let (p, r, phi) = (p.to_float(bits), r.to_float(bits), phi.to_float(bits));
    let mut rep = Report::new("scaled terminant", &QUANTITY_COLUMNS);
    rep.meta("digits", prec.digits().to_string());
    let value = match method {
        TerminantArg::Auto => {
            let t = terminant_polar(&p, &r, &phi, prec)?;
            rep.meta("method", t.method.tag());
            rep.meta("sheet", t.sheet.to_string());
            t.value
        }
        TerminantArg::Quadrature => {
            rep.meta("method", "quadrature");
            terminant_continued(&p, &r, &phi, prec)?
        }
        TerminantArg::Erf => {
            rep.meta("method", "erf");
            if phi > 0 {
                terminant_erf_upper(&p, &r, &phi, prec)?
            } else {
                terminant_erf_lower(&p, &r, &phi, prec)?
            }
        }
    };
    push_complex(&mut rep, "value", &value, prec);
    Ok(rep)
}

fn late(
    n: usize,
    spec: &LambdaSpec,
    m: Option<usize>,
    prec: Precision,
) -> anger_weber::Result<Report> {
    let lambda = lambda_of(spec, prec)?;
    let m = match m {
        Some(m) => m,
        None => optimal_m(n, &lambda, prec)?,
    };
    let compute = |work: Precision| -> anger_weber::Result<_> {
        let lambda = lambda_of(spec, work)?;
        let approx = match lambda.regime() {
            Regime::Gt1 => late_sec(n, lambda.beta().expect("beta for lambda > 1"), m, work)?,
            Regime::Eq1 => late_one(n, m, work)?,
            Regime::Lt1 => late_sech(n, lambda.alpha().expect("alpha for lambda < 1"), m, work)?,
        };
        let exact = anger_weber_coeff(n, &lambda, work)?;
        let err = Float::with_val(work.bits(), &exact - &approx.approx);
        Ok((approx, exact, err))
    };
    let (mut approx, mut exact, mut err) = compute(prec.with_extra_bits(32))?;
    // redo with enough guard bits to carry the cancellation in the error
    let lost = (ln_abs(&exact) - ln_abs(&err)) / std::f64::consts::LN_2;
    if lost.is_finite() && lost > 16.0 {
        (approx, exact, err) = compute(prec.with_extra_bits(lost.ceil() as u32 + 32))?;
    }
    let mut rep = Report::new(format!("late approximation of a_{n}"), &QUANTITY_COLUMNS);
    lambda_meta(&mut rep, &lambda, prec);
    rep.meta("n", n.to_string());
    rep.meta("M", m.to_string());
    rep.meta("bound_case", approx.bound_case.tag());
    if let Some(w) = &approx.warning {
        rep.meta("warning", w.clone());
    }
    push_real(&mut rep, "exact", &exact, prec);
    push_real(&mut rep, "approx", &approx.approx, prec);
    push_real(&mut rep, "error", &err, prec);
    if let Some(b) = &approx.errbound {
        push_real(&mut rep, "bound", b, prec);
    }
    Ok(rep)
}

#[allow(clippy::too_many_arguments)]
fn scan(
    spec: &LambdaSpec,
    modulus: &Angle,
    lo: Option<&Angle>,
    hi: Option<&Angle>,
    steps: usize,
    side: SideArg,
    oracle: OracleArg,
    m: usize,
    prec: Precision,
) -> anger_weber::Result<Report> {
    let bits = prec.bits();
    let lambda = lambda_of(spec, prec)?;
    let side = match side {
        SideArg::Upper => Side::Upper,
        SideArg::Lower => Side::Lower,
    };
    let (dlo, dhi, _) = default_window(side, prec);
    let lo = lo.map(|a| a.to_float(bits)).unwrap_or(dlo);
    let hi = hi.map(|a| a.to_float(bits)).unwrap_or(dhi);
    let thetas = grid(&lo, &hi, steps, prec)?;
    let opts = ScanOptions {
        side,
        m_terms: m,
        oracle: match oracle {
            OracleArg::None => Oracle::None,
            OracleArg::Integral => Oracle::Integral,
            OracleArg::Kernel => Oracle::Kernel,
        },
    };
    let prof = stokes_scan(&lambda, &modulus.to_float(bits), &thetas, &opts, prec)?;
    let mut rep = Report::new(
        "Stokes scan",
        &[
            "theta",
            "terminant_re",
            "terminant_im",
            "erf_pred_re",
            "erf_pred_im",
            "residual",
            "oracle_ok",
        ],
    );
    lambda_meta(&mut rep, &lambda, prec);
    rep.meta("nu_modulus", sci(&prof.modulus, shown(prec)));
    rep.meta("N", prof.n.to_string());
    rep.meta("M", prof.m.to_string());
    rep.meta(
        "max_real_deviation",
        format!("{:.6e}", prof.max_real_deviation()),
    );
    let digits = shown(prec);
    for row in &prof.rows {
        let ok = match (&row.failure, oracle) {
            (Some(_), _) => "no",
            (None, OracleArg::None) => "skipped",
            (None, _) if row.improved_residual.is_some() => "yes",
            (None, _) => "no",
        };
        rep.push(vec![
            sci(&row.theta, digits),
            sci(row.terminant_lead.real(), digits),
            sci(row.terminant_lead.imag(), digits),
            sci(row.erf_pred.real(), digits),
            sci(row.erf_pred.imag(), digits),
            row.improved_residual
                .as_ref()
                .map(|r| sci(r, digits))
                .unwrap_or_default(),
            ok.to_string(),
        ]);
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn command_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn lambda_flags_are_exclusive() {
        assert!(
            Cli::try_parse_from(["aw", "coeff", "-n", "1", "--lambda", "1", "--beta", "pi/6"])
                .is_err()
        );
        assert!(Cli::try_parse_from(["aw", "coeff", "-n", "1"]).is_err());
    }

    #[test]
    fn low_precision_is_rejected() {
        let cli =
            Cli::try_parse_from(["aw", "--digits", "20", "coeff", "-n", "0", "--lambda", "1"])
                .unwrap();
        assert!(matches!(run(&cli), Err(Error::PrecisionTooLow { .. })));
    }

    #[test]
    fn tilde_needs_small_lambda() {
        let cli =
            Cli::try_parse_from(["aw", "coeff", "-n", "1", "--lambda", "2", "--tilde"]).unwrap();
        assert!(run(&cli).is_err());
    }
}
