/// Shortest decimal text that parses back to the same `f64`.
///
/// Plain notation for moderate magnitudes, exponent notation otherwise.
/// Non-finite values give an empty string.
pub fn fmt_f64(x: f64) -> String {
    if !x.is_finite() {
        return String::new();
    }
    let m = x.abs();
    if m == 0.0 || (1e-5..1e16).contains(&m) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips() {
        for x in [
            0.0,
            -0.0,
            1.0,
            0.1,
            1.0 / 3.0,
            1e-300,
            2.5e-7,
            6.02e23,
            -123.456,
            f64::MIN_POSITIVE,
            f64::MAX,
        ] {
            let s = fmt_f64(x);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), x.to_bits(), "{s}");
        }
        assert_eq!(fmt_f64(1.0), "1");
        assert_eq!(fmt_f64(1e-300), "1e-300");
        assert_eq!(fmt_f64(f64::NAN), "");
    }
}
