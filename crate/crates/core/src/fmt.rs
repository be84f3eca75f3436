//! `%g`-style float formatting with a fixed number of significant digits.

/// Formats `x` like C's `%.{digits}g`: scientific notation when the decimal
/// exponent is below -4 or at least `digits`, trailing zeros stripped.
pub fn sig(x: f64, digits: usize) -> String {
    let digits = digits.max(1);
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    if x == 0.0 {
        return "0".to_string();
    }
    // Round once in scientific form so the exponent reflects the rounding.
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if exp < -4 || exp >= digits as i32 {
        let mantissa = strip_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        strip_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::sig;

    #[test]
    fn matches_printf_g() {
        assert_eq!(sig(1.0, 12), "1");
        assert_eq!(sig(1.25, 10), "1.25");
        assert_eq!(sig(1.0 / 3.0, 10), "0.3333333333");
        assert_eq!(sig(123456789012345.0, 12), "1.23456789012e+14");
        assert_eq!(sig(0.000012345, 3), "1.23e-05");
        assert_eq!(sig(0.00012345, 3), "0.000123");
        assert_eq!(sig(-2.5, 12), "-2.5");
        assert_eq!(sig(9.9999999999999, 10), "10");
        assert_eq!(sig(0.0, 10), "0");
    }
}
