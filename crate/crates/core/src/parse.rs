//! Textual forms: complex numbers as `a+bi` and rotation numbers.

use num_complex::Complex64;

use crate::rotation::{cf_expand, RotationNumber};
use crate::{Error, Result};

/// Partial quotients kept for `golden`.
pub const GOLDEN_DEPTH: usize = 64;
/// Largest depth tried when expanding a decimal rotation number.
pub const DECIMAL_DEPTH: usize = 30;

fn real(s: &str, whole: &str) -> Result<f64> {
    let bad = || Error::InvalidInput(format!("'{whole}' is not a complex number of the form a+bi"));
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit() || b"+-.eE".contains(&b)) {
        return Err(bad());
    }
    let x: f64 = s.parse().map_err(|_| bad())?;
    if !x.is_finite() {
        return Err(bad());
    }
    Ok(x)
}

/// Parses `a+bi`, `a-bi`, `a`, `bi`, `i` or `-i`, without spaces.
pub fn parse_complex(s: &str) -> Result<Complex64> {
    let Some(body) = s.strip_suffix('i') else {
        return Ok(Complex64::new(real(s, s)?, 0.0));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (real(&body[..k], s)?, &body[k..]),
        None => (0.0, body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        other => real(other, s)?,
    };
    Ok(Complex64::new(re, im))
}

/// Formats so that [`parse_complex`] gives the same value back.
pub fn format_complex(z: Complex64) -> String {
    if z.im.is_sign_negative() {
        format!("{:?}{:?}i", z.re, z.im)
    } else {
        format!("{:?}+{:?}i", z.re, z.im)
    }
}

/// `golden`, `cf:a1,a2,...` or a decimal in `(0, 1)`.
pub fn parse_theta(s: &str) -> Result<RotationNumber> {
    if s == "golden" {
        return Ok(RotationNumber::golden(GOLDEN_DEPTH));
    }
    if let Some(list) = s.strip_prefix("cf:") {
        let quotients = list
            .split(',')
            .map(|a| a.parse::<u64>().map_err(|_| Error::InvalidInput(format!("'{a}' is not a partial quotient"))))
            .collect::<Result<Vec<u64>>>()?;
        return RotationNumber::new(quotients, false);
    }
    let x: f64 = s
        .parse()
        .map_err(|_| Error::InvalidInput(format!("'{s}' is not golden, cf:a1,a2,... or a decimal")))?;
    let mut last = Error::InvalidInput(format!("{s} is not in (0, 1)"));
    for depth in (1..=DECIMAL_DEPTH).rev() {
        match cf_expand(x, depth) {
            Ok(r) => return Ok(r),
            Err(e @ Error::InvalidInput(_)) => return Err(e),
            Err(e) => last = e,
        }
    }
    Err(last)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn complex_forms() {
        assert_eq!(parse_complex("0+0.4i").unwrap(), c(0.0, 0.4));
        assert_eq!(parse_complex("1.5-2i").unwrap(), c(1.5, -2.0));
        assert_eq!(parse_complex("-3").unwrap(), c(-3.0, 0.0));
        assert_eq!(parse_complex("0.4i").unwrap(), c(0.0, 0.4));
        assert_eq!(parse_complex("-i").unwrap(), c(0.0, -1.0));
        assert_eq!(parse_complex("i").unwrap(), c(0.0, 1.0));
        assert_eq!(parse_complex("1e-3+2E+2i").unwrap(), c(1e-3, 200.0));
        assert_eq!(parse_complex("-1e-3-1e-3i").unwrap(), c(-1e-3, -1e-3));
    }

    #[test]
    fn complex_rejections() {
        for bad in ["", "1 + 2i", "a+bi", "1+2j", "inf", "nan+1i", "1+i+i", "--1", "+", "1e", "0x10"] {
            assert!(parse_complex(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn theta_forms() {
        assert_eq!(parse_theta("golden").unwrap().partial_quotients().len(), GOLDEN_DEPTH);
        assert_eq!(parse_theta("cf:1,2,3").unwrap().partial_quotients(), &[1, 2, 3]);
        let x = parse_theta("0.6180339887498949").unwrap();
        assert!(x.partial_quotients().iter().take(20).all(|&a| a == 1));
        assert!(parse_theta("1.5").is_err());
        assert!(parse_theta("cf:1,0").is_err());
        assert!(parse_theta("cf:").is_err());
        assert!(parse_theta("silver").is_err());
    }

    proptest! {
        #[test]
        fn complex_round_trip(re in -1e6f64..1e6, im in -1e6f64..1e6) {
            let z = c(re, im);
            prop_assert_eq!(parse_complex(&format_complex(z)).unwrap(), z);
        }

        #[test]
        fn parse_complex_never_panics(s in "\\PC{0,24}") {
            let _ = parse_complex(&s);
        }
    }
}
