//! Lossless decimal formatting shared by the CSV and QASM writers.

/// Formats `x` with 17 significant digits: the shortest round-trip digits of
/// `x`, right-padded with zeros.
///
/// Plain decimal notation is used for exponents in `-8..=16`; other magnitudes
/// fall back to scientific notation. Both forms parse back to the identical `f64`.
pub fn fmt17(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    if x == 0.0 {
        return "0.0000000000000000".to_string();
    }
    let sci = format!("{:e}", x.abs());
    let (mantissa, exp) = sci.split_once('e').expect("scientific form");
    let exp: i32 = exp.parse().expect("exponent");
    let mut digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    while digits.len() < 17 {
        digits.push('0');
    }
    let sign = if x < 0.0 { "-" } else { "" };
    if !(-8..=16).contains(&exp) {
        return format!("{sign}{}.{}e{exp}", &digits[..1], &digits[1..]);
    }
    if exp >= 0 {
        let split = exp as usize + 1;
        let frac = &digits[split..];
        if frac.is_empty() {
            format!("{sign}{digits}.0")
        } else {
            format!("{sign}{}.{frac}", &digits[..split])
        }
    } else {
        let zeros = "0".repeat((-exp - 1) as usize);
        format!("{sign}0.{zeros}{digits}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_fixed_layout() {
        assert_eq!(fmt17(1.3782), "1.3782000000000000");
        assert_eq!(fmt17(-0.5), "-0.50000000000000000");
        assert_eq!(fmt17(0.0), "0.0000000000000000");
    }

    #[test]
    fn round_trips() {
        for &x in &[
            std::f64::consts::PI,
            1e-7,
            -123456.789,
            1e20,
            3e-300,
            0.1 + 0.2,
            10.0,
            1000.0,
            0.001,
        ] {
            let s = fmt17(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
        }
    }
}
