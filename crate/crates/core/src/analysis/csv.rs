//! CSV rendering: `#` comment header echoing the configuration, one header
//! row, floats with 12 significant digits, `\n` line endings.

use std::io::{self, Write};

use super::sweep::{SweepPoint, ThresholdRow};

/// `printf("%.12g")`.
pub fn format_float(x: f64) -> String {
    format_general(x, 12)
}

fn format_general(x: f64, precision: usize) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{:.*e}", precision - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("exponent digits");
    if exp < -4 || exp >= precision as i32 {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (precision as i32 - 1 - exp) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub const SWEEP_HEADER: &str = "beta,gamma_tau,F_a,F_c,diff,p1,p_ap";
pub const THRESHOLD_HEADER: &str = "beta,gamma_tau_threshold_a,gamma_tau_threshold_c";

pub fn write_comments<W: Write>(out: &mut W, config: &[(String, String)]) -> io::Result<()> {
    for (k, v) in config {
        writeln!(out, "# {k}={v}")?;
    }
    Ok(())
}

pub fn write_row<W: Write>(out: &mut W, values: &[f64]) -> io::Result<()> {
    let line: Vec<String> = values.iter().map(|&v| format_float(v)).collect();
    writeln!(out, "{}", line.join(","))
}

/// Trailer appended after the last complete row when a run aborts.
pub fn write_error_trailer<W: Write>(out: &mut W, message: &str) -> io::Result<()> {
    writeln!(out, "# error: {}", message.replace('\n', " "))
}

pub fn write_sweep<W: Write>(out: &mut W, config: &[(String, String)], rows: &[SweepPoint]) -> io::Result<()> {
    write_comments(out, config)?;
    writeln!(out, "{SWEEP_HEADER}")?;
    for r in rows {
        write_row(out, &[r.beta, r.gamma_tau, r.f_a, r.f_c, r.diff(), r.p1, r.p_ap])?;
    }
    Ok(())
}

pub fn write_thresholds<W: Write>(out: &mut W, config: &[(String, String)], rows: &[ThresholdRow]) -> io::Result<()> {
    write_comments(out, config)?;
    writeln!(out, "{THRESHOLD_HEADER}")?;
    for r in rows {
        write_row(out, &[r.beta, r.a.gamma_tau, r.c.gamma_tau])?;
    }
    Ok(())
}
