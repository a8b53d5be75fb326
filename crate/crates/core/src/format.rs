//! Fixed-point rendering with six significant digits, shared by every CSV
//! export.

/// Renders `x` rounded to six significant digits in plain decimal notation,
/// keeping trailing zeros (`25.5` -> `25.5000`, `12` -> `12.0000`).
/// Values of a million or more are printed as integers rounded to six
/// significant digits.
pub fn sig6(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0.00000".to_string();
    }
    // Scientific formatting rounds the mantissa correctly, including carries
    // such as 9.999995 -> 1.00000e1.
    let sci = format!("{x:.5e}");
    let (_, exp) = sci.split_once('e').expect("scientific notation");
    let exp: i32 = exp.parse().expect("integer exponent");
    let rounded: f64 = sci.parse().expect("round-trips");
    let decimals = (5 - exp).max(0) as usize;
    format!("{rounded:.decimals$}")
}

#[cfg(test)]
mod tests {
    use super::sig6;

    #[test]
    fn renders_six_significant_digits() {
        assert_eq!(sig6(25.5), "25.5000");
        assert_eq!(sig6(12.0), "12.0000");
        assert_eq!(sig6(34.333333333), "34.3333");
        assert_eq!(sig6(1.0), "1.00000");
        assert_eq!(sig6(0.5), "0.500000");
        assert_eq!(sig6(0.000123456789), "0.000123457");
        assert_eq!(sig6(9.999995), "10.0000");
        assert_eq!(sig6(999999.5), "1000000");
        assert_eq!(sig6(123456789.0), "123457000");
        assert_eq!(sig6(-2.5), "-2.50000");
        assert_eq!(sig6(0.0), "0.00000");
    }

    #[test]
    fn parses_back_within_precision() {
        for &x in &[1.0 / 3.0, 2.0f64.sqrt() * 1e4, 7.123456789e-3, 98765.4321] {
            let back: f64 = sig6(x).parse().unwrap();
            assert!(((back - x) / x).abs() <= 5e-6, "{x} -> {back}");
        }
    }
}
