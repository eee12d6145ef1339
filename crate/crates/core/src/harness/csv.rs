use std::fmt::Write;

use super::SweepRow;

pub const CSV_HEADER: &str =
    "algorithm,family,K,p,delta,trials,errors,error_rate,wilson95,qmean,qmin,qmax,qstd,lower_bound,upper_bound";

/// Shortest rendering of `x` with at most 9 significant digits, in the
/// style of C's `%.9g`.
pub fn format_sig9(x: f64) -> String {
    if x == 0.0 {
        return "0".to_owned();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan"
        } else if x > 0.0 {
            "inf"
        } else {
            "-inf"
        }
        .to_owned();
    }
    let sci = format!("{x:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..9).contains(&exp) {
        let decimals = (8 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        format!(
            "{}e{}{:02}",
            trim_zeros(mantissa.to_owned()),
            if exp < 0 { '-' } else { '+' },
            exp.abs()
        )
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    s.trim_end_matches('0').trim_end_matches('.').to_owned()
}

/// Renders rows under [`CSV_HEADER`], LF line endings.
pub fn to_csv(rows: &[SweepRow]) -> String {
    let mut out = String::new();
    out.push_str(CSV_HEADER);
    out.push('\n');
    for row in rows {
        let s = &row.stats;
        let c = &s.config;
        let (lower, upper) = match &row.bound {
            Some(b) => (format_sig9(b.lower), format_sig9(b.upper)),
            None => (String::new(), String::new()),
        };
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            c.algorithm,
            c.family,
            c.k,
            format_sig9(c.p),
            format_sig9(c.delta),
            s.trials,
            s.errors,
            format_sig9(s.error_rate),
            format_sig9(s.wilson95),
            format_sig9(s.queries_mean),
            s.queries_min,
            s.queries_max,
            format_sig9(s.queries_stddev),
            lower,
            upper,
        )
        .expect("writing to a String");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig9_matches_printf_g() {
        // Reference strings from Python's "%.9g".
        let cases = [
            (0.1, "0.1"),
            (4.503102636634972, "4.50310264"),
            (1.0 / 3.0, "0.333333333"),
            (123456789.0, "123456789"),
            (1234567890.0, "1.23456789e+09"),
            (0.000012345, "1.2345e-05"),
            (0.00012345, "0.00012345"),
            (2.0, "2"),
            (-0.25, "-0.25"),
            (56.379504228573, "56.3795042"),
        ];
        for (x, want) in cases {
            assert_eq!(format_sig9(x), want, "{x}");
        }
    }
}
