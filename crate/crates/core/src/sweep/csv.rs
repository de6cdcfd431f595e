use std::fmt::Write as _;
use std::io;

use super::{Param, SweepRow};

pub const CSV_HEADER: &str = "param,value,D,Du,Dv,q0,q1,G,IAE,bound,degenerate";

/// `printf("%.12g")`: 12 significant digits, trailing zeros dropped,
/// scientific notation outside `1e-4 <= |x| < 1e12`.
pub fn format_sig12(x: f64) -> String {
    const P: i32 = 12;
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    if x == 0.0 {
        return if x.is_sign_negative() {
            "-0".into()
        } else {
            "0".into()
        };
    }
    // the exponent after rounding to P digits decides the style
    let sci = format!("{:.*e}", (P - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..P).contains(&exp) {
        let mut out = trim_zeros(mantissa).to_string();
        let sign = if exp < 0 { '-' } else { '+' };
        let _ = write!(out, "e{sign}{:02}", exp.abs());
        out
    } else {
        trim_zeros(&format!("{:.*}", (P - 1 - exp) as usize, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Writes a sweep as CSV with `\n` line endings.
pub fn write_csv<W: io::Write>(mut out: W, param: Param, rows: &[SweepRow]) -> io::Result<()> {
    let mut buf = String::with_capacity(64 * (rows.len() + 1));
    buf.push_str(CSV_HEADER);
    buf.push('\n');
    for r in rows {
        buf.push_str(param.name());
        for v in [r.value, r.d, r.du, r.dv, r.q0, r.q1, r.g, r.iae, r.bound] {
            buf.push(',');
            buf.push_str(&format_sig12(v));
        }
        buf.push_str(if r.degenerate { ",1\n" } else { ",0\n" });
    }
    out.write_all(buf.as_bytes())
}
