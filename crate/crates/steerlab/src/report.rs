//! Numeric formatting for emitted records: 15 significant digits, '.' decimal
//! separator, no locale dependence (printf %.15g semantics).

/// Format with 15 significant digits, %g style: positional notation for
/// decimal exponents in [-4, 15), scientific otherwise, trailing zeros
/// trimmed.
pub fn fmt_g15(x: f64) -> String {
    if x == 0.0 {
        return if x.is_sign_negative() {
            "-0".into()
        } else {
            "0".into()
        };
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.*e}", 14, x); // "-1.23456789012345e-7"
    let epos = sci.find('e').expect("exponent marker");
    let exp: i32 = sci[epos + 1..].parse().expect("exponent");
    let neg = sci.starts_with('-');
    let mantissa: String = sci[..epos].chars().filter(|c| c.is_ascii_digit()).collect();
    let digits = mantissa.trim_end_matches('0');
    let digits = if digits.is_empty() { "0" } else { digits };
    let sign = if neg { "-" } else { "" };

    if (-4..15).contains(&exp) {
        let point = exp + 1; // digits before the decimal point
        if point <= 0 {
            format!("{sign}0.{}{}", "0".repeat(-point as usize), digits)
        } else if (point as usize) >= digits.len() {
            format!(
                "{sign}{}{}",
                digits,
                "0".repeat(point as usize - digits.len())
            )
        } else {
            format!(
                "{sign}{}.{}",
                &digits[..point as usize],
                &digits[point as usize..]
            )
        }
    } else {
        let head = &digits[..1];
        let tail = &digits[1..];
        if tail.is_empty() {
            format!("{sign}{head}e{exp}")
        } else {
            format!("{sign}{head}.{tail}e{exp}")
        }
    }
}

/// Round to 15 significant digits. Applied to every float before JSON
/// serialization so emitted numbers match the CSV formatting.
pub fn round_sig15(x: f64) -> f64 {
    if !x.is_finite() {
        return x;
    }
    format!("{:.*e}", 14, x).parse().expect("round-trip")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn positional_forms() {
        assert_eq!(fmt_g15(0.0), "0");
        assert_eq!(fmt_g15(1.0), "1");
        assert_eq!(fmt_g15(0.98), "0.98");
        assert_eq!(fmt_g15(-0.5), "-0.5");
        assert_eq!(fmt_g15(100.0), "100");
        assert_eq!(fmt_g15(0.0001), "0.0001");
        assert_eq!(fmt_g15(1.0 + 1.0 / 2f64.sqrt()), "1.70710678118655");
    }

    #[test]
    fn scientific_forms() {
        assert_eq!(fmt_g15(1e-5), "1e-5");
        assert_eq!(fmt_g15(1.5e20), "1.5e20");
        assert_eq!(fmt_g15(2.5e-7), "2.5e-7");
    }

    #[test]
    fn fifteen_digit_round_trip() {
        for &x in &[
            std::f64::consts::PI,
            1.0 / 3.0,
            0.343145750507620,
            1.02333454720338,
            123456.789012345,
        ] {
            let printed = fmt_g15(x);
            let parsed: f64 = printed.parse().unwrap();
            assert_eq!(fmt_g15(parsed), printed);
            assert!(((parsed - x) / x).abs() < 1e-14);
            assert_eq!(round_sig15(x), parsed);
        }
    }
}
