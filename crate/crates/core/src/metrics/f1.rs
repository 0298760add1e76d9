/// `2ab / (a + b)`, or 0 when both inputs are 0.
pub fn harmonic_mean(a: f64, b: f64) -> f64 {
    if a + b == 0.0 {
        0.0
    } else {
        2.0 * a * b / (a + b)
    }
}

/// Rounds to one decimal place, the precision scores are reported at.
pub fn round1(x: f64) -> f64 {
    (x * 10.0).round() / 10.0
}

/// Harmonic F-1 of faithfulness and coverage given on the 0-100 scale,
/// rounded to one decimal.
pub fn harmonic_f1(faithfulness: f64, coverage: f64) -> f64 {
    round1(harmonic_mean(faithfulness, coverage))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn reported_rows() {
        assert_eq!(harmonic_f1(72.8, 86.4), 79.0);
        assert_eq!(harmonic_f1(84.6, 87.8), 86.2);
        assert_eq!(harmonic_f1(40.0, 40.0), 40.0);
        assert_eq!(harmonic_f1(0.0, 55.0), 0.0);
        assert_eq!(harmonic_f1(0.0, 0.0), 0.0);
    }

    proptest! {
        #[test]
        fn between_min_and_arithmetic_mean(a in 0.01f64..100.0, b in 0.01f64..100.0) {
            let f = harmonic_mean(a, b);
            prop_assert!(f >= a.min(b) - 1e-9);
            prop_assert!(f <= (a + b) / 2.0 + 1e-9);
        }
    }
}
