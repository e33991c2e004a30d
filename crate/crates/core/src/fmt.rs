//! Fixed-precision number formatting shared by the text and CSV emitters.

/// Significant digits used by every text/CSV emitter.
pub const SIG_DIGITS: usize = 9;

/// Formats `x` with [`SIG_DIGITS`] significant digits, trailing zeros trimmed.
///
/// Plain decimal notation is used for magnitudes in `[1e-4, 1e9)`, scientific
/// notation otherwise. Re-formatting a parsed output reproduces it exactly.
pub fn sig(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 {
            "0".to_string()
        } else {
            format!("{x}")
        };
    }
    let mag = x.abs();
    if !(1e-4..1e9).contains(&mag) {
        let s = format!("{:.*e}", SIG_DIGITS - 1, x);
        let (mantissa, exp) = s.split_once('e').unwrap();
        return format!("{}e{}", trim_zeros(mantissa), exp);
    }
    let exponent = mag.log10().floor() as i32;
    let decimals = (SIG_DIGITS as i32 - 1 - exponent).max(0) as usize;
    let s = format!("{:.*}", decimals, x);
    trim_zeros(&s).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if !s.contains('.') {
        return s;
    }
    let s = s.trim_end_matches('0');
    let s = s.trim_end_matches('.');
    if s == "-0" {
        "0"
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn formats_examples() {
        assert_eq!(sig(std::f64::consts::FRAC_PI_2), "1.57079633");
        assert_eq!(
            sig(1.0 / (2.0 * 7.17)),
            "0.0697350070".trim_end_matches('0')
        );
        assert_eq!(sig(0.0), "0");
        assert_eq!(sig(-382.5), "-382.5");
        assert_eq!(sig(2048.0), "2048");
        assert_eq!(sig(1.5e-7), "1.5e-7");
    }

    proptest! {
        #[test]
        fn reformat_is_stable(x in -1e12f64..1e12) {
            let once = sig(x);
            let parsed: f64 = once.parse().unwrap();
            prop_assert_eq!(sig(parsed), once.clone());
            if x != 0.0 {
                prop_assert!(((parsed - x) / x).abs() <= 5.1e-9);
            }
        }
    }
}
