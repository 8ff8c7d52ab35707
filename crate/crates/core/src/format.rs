//! Text formats for complex numbers, polynomials and matrices.
//!
//! Shorthand forms: complex literals such as `2`, `-0.5i`, `1-2.5i`, `3e-2+i`;
//! polynomials as an ascending comma list (`"0,0,1"` is `z^2`); matrices as a
//! row-major `"a;b;c;d"` list. JSON forms use `[re, im]` pairs.

use crate::error::{Error, Result};
use crate::matrix::Mat2;
use crate::poly::{Complex, Polynomial};

pub fn parse_complex(text: &str) -> Result<Complex> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err(Error::Parse("empty complex literal".into()));
    }
    let bad = || Error::Parse(format!("invalid complex literal '{text}'"));
    let Some(body) = s.strip_suffix(['i', 'j']) else {
        return s.parse::<f64>().map(|re| Complex::new(re, 0.0)).map_err(|_| bad());
    };
    // Split at the last sign that is not an exponent sign.
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| {
            (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E')
        });
    let (re_text, im_text) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("", body),
    };
    let re = if re_text.is_empty() {
        0.0
    } else {
        re_text.parse::<f64>().map_err(|_| bad())?
    };
    let im = match im_text {
        "" | "+" => 1.0,
        "-" => -1.0,
        t => t.parse::<f64>().map_err(|_| bad())?,
    };
    Ok(Complex::new(re, im))
}

pub fn format_complex(z: Complex) -> String {
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

/// Parses either a JSON array of `[re, im]` pairs or an ascending comma list.
pub fn parse_polynomial(text: &str) -> Result<Polynomial> {
    let t = text.trim();
    if t.starts_with('[') {
        return serde_json::from_str(t).map_err(|e| Error::Parse(e.to_string()));
    }
    let coeffs = t
        .split(',')
        .map(parse_complex)
        .collect::<Result<Vec<_>>>()?;
    Polynomial::new(coeffs)
}

/// Parses either the JSON form `[[[re,im],[re,im]],[[re,im],[re,im]]]` or the
/// shorthand `"a;b;c;d"`.
pub fn parse_matrix(text: &str) -> Result<Mat2> {
    let t = text.trim();
    if t.starts_with('[') {
        return serde_json::from_str(t).map_err(|e| Error::Parse(e.to_string()));
    }
    let entries = t
        .split(';')
        .map(parse_complex)
        .collect::<Result<Vec<_>>>()?;
    match entries[..] {
        [a, b, c, d] => Ok(Mat2::new(a, b, c, d)),
        _ => Err(Error::Parse(format!(
            "matrix shorthand needs 4 entries, got {}",
            entries.len()
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    #[test]
    fn complex_literals() {
        assert_eq!(parse_complex("2").unwrap(), c(2.0, 0.0));
        assert_eq!(parse_complex("-0.5").unwrap(), c(-0.5, 0.0));
        assert_eq!(parse_complex("i").unwrap(), c(0.0, 1.0));
        assert_eq!(parse_complex("-i").unwrap(), c(0.0, -1.0));
        assert_eq!(parse_complex("0.25i").unwrap(), c(0.0, 0.25));
        assert_eq!(parse_complex("1+2i").unwrap(), c(1.0, 2.0));
        assert_eq!(parse_complex("1-i").unwrap(), c(1.0, -1.0));
        assert_eq!(parse_complex("-1e-3-2e+2i").unwrap(), c(-1e-3, -2e2));
        assert_eq!(parse_complex(" 3 + 4i ").unwrap(), c(3.0, 4.0));
        assert!(parse_complex("abc").is_err());
        assert!(parse_complex("").is_err());
        assert!(parse_complex("1+2").is_err());
    }

    #[test]
    fn format_roundtrip() {
        for z in [c(1.0, 0.0), c(0.0, -2.5), c(-1.5, 0.25), c(3.0, -4.0)] {
            assert_eq!(parse_complex(&format_complex(z)).unwrap(), z);
        }
    }

    #[test]
    fn polynomial_forms() {
        let p = parse_polynomial("0,0,1").unwrap();
        assert_eq!(p.degree(), 2);
        let q = parse_polynomial("[[0,0],[0,0],[1,0]]").unwrap();
        assert_eq!(p, q);
        let r = parse_polynomial("0.25i,0,1").unwrap();
        assert_eq!(r.coeffs()[0], c(0.0, 0.25));
        assert!(parse_polynomial("1,1").is_err());
    }

    #[test]
    fn matrix_forms() {
        let m = parse_matrix("1;1;0;1").unwrap();
        assert_eq!(m, Mat2::new(c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)));
        let j = parse_matrix("[[[1,0],[1,0]],[[0,0],[1,0]]]").unwrap();
        assert_eq!(m, j);
        assert!(parse_matrix("1;2;3").is_err());
    }
}
