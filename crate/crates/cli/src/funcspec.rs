//! Textual trigonometric polynomials and vectors for `generate`.
//!
//! A function is a sum of terms `[coef*]cos(m…)`, `[coef*]sin(m…)` or a bare
//! rational constant, e.g. `cos(1,0,0,0) - 1/2*sin(1,1,0,0) + 3`.

use sympconn::exact::rational::{self, Rational};
use sympconn::fourier::FourierScalar;
use sympconn::{Error, Result};

fn bad(src: &str, why: impl std::fmt::Display) -> Error {
    Error::parse(format!("function {src:?}: {why}"))
}

/// Splits at top-level `+`/`-` signs, keeping the sign with each term.
fn split_terms(src: &str) -> Result<Vec<(bool, String)>> {
    let mut terms = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    let mut negative = false;
    for ch in src.chars().filter(|c| !c.is_whitespace()) {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            _ => {}
        }
        if depth < 0 {
            return Err(bad(src, "unbalanced parentheses"));
        }
        if depth == 0 && (ch == '+' || ch == '-') {
            if cur.is_empty() {
                if !terms.is_empty() || negative {
                    return Err(bad(src, "dangling sign"));
                }
                negative = ch == '-';
                continue;
            }
            terms.push((negative, std::mem::take(&mut cur)));
            negative = ch == '-';
            continue;
        }
        cur.push(ch);
    }
    if depth != 0 {
        return Err(bad(src, "unbalanced parentheses"));
    }
    if cur.is_empty() {
        return Err(bad(src, "empty term"));
    }
    terms.push((negative, cur));
    Ok(terms)
}

fn parse_mode(src: &str, body: &str, dim: usize) -> Result<Vec<i64>> {
    let m = body
        .split(',')
        .map(|s| s.parse::<i64>().map_err(|_| bad(src, format!("bad mode entry {s:?}"))))
        .collect::<Result<Vec<_>>>()?;
    if m.len() != dim {
        return Err(bad(src, format!("mode {m:?} has {} entries, expected {dim}", m.len())));
    }
    Ok(m)
}

pub fn parse_function(src: &str, dim: usize) -> Result<FourierScalar> {
    let mut f = FourierScalar::zero(dim);
    for (negative, term) in split_terms(src)? {
        let (coef, atom) = match term.split_once('*') {
            Some((c, a)) => (rational::parse(c)?, a),
            None if term.starts_with("cos(") || term.starts_with("sin(") => (rational::one(), term.as_str()),
            None => (rational::parse(&term)?, ""),
        };
        let coef = if negative { -coef } else { coef };
        let g = if atom.is_empty() {
            FourierScalar::constant(dim, rational::one())
        } else {
            let body = atom
                .strip_suffix(')')
                .and_then(|a| a.strip_prefix("cos(").or_else(|| a.strip_prefix("sin(")))
                .ok_or_else(|| bad(src, format!("unknown term {atom:?}")))?;
            let m = parse_mode(src, body, dim)?;
            if atom.starts_with("cos(") {
                FourierScalar::cos(&m)
            } else {
                FourierScalar::sin(&m)
            }
        };
        f.add_scaled_assign(&g, &coef);
    }
    Ok(f)
}

/// Comma-separated exact rationals.
pub fn parse_vector(src: &str, dim: usize) -> Result<Vec<Rational>> {
    let v = src.split(',').map(rational::parse).collect::<Result<Vec<_>>>()?;
    if v.len() != dim {
        return Err(Error::parse(format!("vector {src:?} has {} entries, expected {dim}", v.len())));
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use sympconn::exact::rational::rat;

    #[test]
    fn parses_sums_with_coefficients() {
        let f = parse_function("cos(1,0,0,0) - 1/2*sin(1,1,0,0) + 3", 4).unwrap();
        let mut g = FourierScalar::cos(&[1, 0, 0, 0]);
        g.add_scaled_assign(&FourierScalar::sin(&[1, 1, 0, 0]), &rat(-1, 2));
        g.add_scaled_assign(&FourierScalar::constant(4, rational::one()), &rat(3, 1));
        assert_eq!(f, g);
    }

    #[test]
    fn leading_minus() {
        assert_eq!(parse_function("-cos(0,1,0,0)", 4).unwrap(), FourierScalar::cos(&[0, 1, 0, 0]).neg());
    }

    #[test]
    fn rejects_wrong_mode_length_and_garbage() {
        assert!(parse_function("cos(1,0)", 4).is_err());
        assert!(parse_function("tan(1,0,0,0)", 4).is_err());
        assert!(parse_function("cos(1,0,0,0", 4).is_err());
        assert!(parse_function("", 4).is_err());
    }

    #[test]
    fn vectors() {
        assert_eq!(parse_vector("1, 0, -1/2, 0", 4).unwrap()[2], rat(-1, 2));
        assert!(parse_vector("1,0", 4).is_err());
    }
}
