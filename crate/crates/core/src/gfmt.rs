//! Shortest-faithful float formatting for reports and CSV output.

/// Formats a float the way C's `printf("%.17g", v)` would.
///
/// Seventeen significant digits round-trip any `f64`. Trailing zeros are
/// trimmed, the exponent form is used when the decimal exponent is below -4
/// or at least 17, and exponents are always written with a sign and at
/// least two digits.
pub fn g17(v: f64) -> String {
    if v.is_nan() {
        return "nan".to_string();
    }
    if v.is_infinite() {
        return if v < 0.0 { "-inf" } else { "inf" }.to_string();
    }
    if v == 0.0 {
        return if v.is_sign_negative() { "-0" } else { "0" }.to_string();
    }

    let neg = v < 0.0;
    let s = format!("{:.16e}", v.abs());
    let (mant, exp) = s.split_once('e').expect("exponential format");
    let e: i32 = exp.parse().expect("exponent is an integer");
    let digits: String = mant.chars().filter(|c| c.is_ascii_digit()).collect();
    debug_assert_eq!(digits.len(), 17);

    let body = if !(-4..17).contains(&e) {
        let frac = digits[1..].trim_end_matches('0');
        let mantissa = if frac.is_empty() {
            digits[..1].to_string()
        } else {
            format!("{}.{}", &digits[..1], frac)
        };
        format!(
            "{}e{}{:02}",
            mantissa,
            if e < 0 { '-' } else { '+' },
            e.abs()
        )
    } else if e >= 0 {
        let split = (e + 1) as usize;
        let frac = digits[split..].trim_end_matches('0');
        if frac.is_empty() {
            digits[..split].to_string()
        } else {
            format!("{}.{}", &digits[..split], frac)
        }
    } else {
        let frac = format!("{}{}", "0".repeat((-e - 1) as usize), digits);
        format!("0.{}", frac.trim_end_matches('0'))
    };

    if neg {
        format!("-{body}")
    } else {
        body
    }
}
