//! Number formatting shared by all output formats.

/// `v` with exactly 17 significant digits, positional for moderate
/// magnitudes and scientific otherwise. Always re-parses to the same bits.
pub fn sig17(v: f64) -> String {
    if !v.is_finite() {
        return if v.is_nan() {
            "nan".into()
        } else if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    if v == 0.0 {
        return if v.is_sign_negative() {
            "-0.0000000000000000"
        } else {
            "0.0000000000000000"
        }
        .into();
    }
    let sci = format!("{v:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if !(-5..17).contains(&exp) {
        return sci;
    }
    let (sign, digits) = match mantissa.strip_prefix('-') {
        Some(m) => ("-", m),
        None => ("", mantissa),
    };
    let digits: String = digits.chars().filter(|c| *c != '.').collect();
    if exp < 0 {
        format!("{sign}0.{}{digits}", "0".repeat((-exp - 1) as usize))
    } else {
        let split = exp as usize + 1;
        if split >= digits.len() {
            format!("{sign}{digits}.0")
        } else {
            format!("{sign}{}.{}", &digits[..split], &digits[split..])
        }
    }
}

/// A CSV field; optional values are left empty.
pub fn field(v: Option<f64>) -> String {
    v.map(sig17).unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits() {
        assert_eq!(sig17(7.0 / 3.0), "2.3333333333333335");
        assert_eq!(sig17(1.5), "1.5000000000000000");
        assert_eq!(sig17(-0.001234), "-0.0012340000000000001");
        assert_eq!(sig17(12345.0), "12345.000000000000");
        assert_eq!(sig17(1e300), "1.0000000000000001e300");
        assert_eq!(sig17(1e16), "10000000000000000.0");
    }

    #[test]
    fn round_trips() {
        let mut x = 1.234_567_890_123_4e-310;
        while x < 1e308 {
            for v in [x, -x, x * 1.000_000_000_000_000_2] {
                let s = sig17(v);
                assert_eq!(s.parse::<f64>().unwrap().to_bits(), v.to_bits(), "{s}");
            }
            x *= 3.7;
        }
    }
}
