/// Shortest text that parses back to exactly `v`, in plain notation for
/// moderate magnitudes and scientific notation otherwise.
pub fn format_f64(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || !v.is_finite() || (1e-5..1e16).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips() {
        for v in [
            0.0,
            -0.0,
            1.0,
            0.1,
            1e-300,
            5e300,
            -3.25e-7,
            f64::MAX,
            f64::MIN_POSITIVE,
        ] {
            let s = format_f64(v);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), v.to_bits(), "{s}");
        }
        assert_eq!(format_f64(2.0), "2");
        assert_eq!(format_f64(1e-7), "1e-7");
        assert_eq!(format_f64(f64::NAN), "NaN");
    }
}
