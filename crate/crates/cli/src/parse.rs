//! Argument parsing helpers: complex literals `RE[+-]IMi` and exact
//! rationals (`p/q` or decimal, never via floating point).

use num_complex::Complex64;

/// Parse a complex literal: `0.3`, `-0.1+0.25i`, `1e-2-3i`, `0.5i`, `i`.
pub fn parse_complex(text: &str) -> Result<Complex64, String> {
    let s = text.trim();
    if s.is_empty() {
        return Err("empty complex literal".into());
    }
    let bad = |_| format!("bad complex literal `{text}` (expected RE[+-]IMi)");
    if let Some(body) = s.strip_suffix(['i', 'I']) {
        // Split at the last top-level sign (not a leading sign, not part of
        // an exponent).
        let bytes = body.as_bytes();
        let mut split = None;
        for idx in (1..bytes.len()).rev() {
            let b = bytes[idx];
            if (b == b'+' || b == b'-') && !matches!(bytes[idx - 1], b'e' | b'E') {
                split = Some(idx);
                break;
            }
        }
        let (re_str, im_str) = match split {
            Some(idx) => (&body[..idx], &body[idx..]),
            None => ("0", body),
        };
        let re: f64 = if re_str.is_empty() {
            0.0
        } else {
            re_str.parse().map_err(bad)?
        };
        let im: f64 = match im_str {
            "" | "+" => 1.0,
            "-" => -1.0,
            other => other.parse().map_err(bad)?,
        };
        Ok(Complex64::new(re, im))
    } else {
        let re: f64 = s.parse().map_err(bad)?;
        Ok(Complex64::new(re, 0.0))
    }
}

/// Render a complex value compactly: `a`, `bi`, or `a+bi`.
pub fn format_complex(z: Complex64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else if z.re == 0.0 {
        format!("{}i", z.im)
    } else if z.im < 0.0 {
        format!("{}{}i", z.re, z.im)
    } else {
        format!("{}+{}i", z.re, z.im)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_real_and_complex_forms() {
        assert_eq!(parse_complex("0.108").unwrap(), Complex64::new(0.108, 0.0));
        assert_eq!(
            parse_complex("0.1+0.05i").unwrap(),
            Complex64::new(0.1, 0.05)
        );
        assert_eq!(
            parse_complex("-0.1-0.2i").unwrap(),
            Complex64::new(-0.1, -0.2)
        );
        assert_eq!(parse_complex("0.5i").unwrap(), Complex64::new(0.0, 0.5));
        assert_eq!(parse_complex("i").unwrap(), Complex64::new(0.0, 1.0));
        assert_eq!(parse_complex("-i").unwrap(), Complex64::new(0.0, -1.0));
        assert_eq!(
            parse_complex("1e-2-3i").unwrap(),
            Complex64::new(0.01, -3.0)
        );
        assert_eq!(
            parse_complex("2.5e-3i").unwrap(),
            Complex64::new(0.0, 0.0025)
        );
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_complex("").is_err());
        assert!(parse_complex("1+2j").is_err());
        assert!(parse_complex("one").is_err());
        assert!(parse_complex("1..2").is_err());
    }

    #[test]
    fn formats_roundtrip_visually() {
        assert_eq!(format_complex(Complex64::new(0.5, 0.0)), "0.5");
        assert_eq!(format_complex(Complex64::new(0.0, -2.0)), "-2i");
        assert_eq!(format_complex(Complex64::new(1.5, 2.0)), "1.5+2i");
        assert_eq!(format_complex(Complex64::new(1.5, -2.0)), "1.5-2i");
    }
}
