//! Norm sources and parameter ranges as given on the command line.

use std::path::Path;

use moduli::norm::{Exponent, Norm, NormSpec};
use moduli::vector::Vector2;

/// Why an argument could not be turned into a value; I/O problems map to a
/// different exit code than malformed input.
#[derive(Debug)]
pub enum InputError {
    Usage(String),
    Io(String),
}

impl std::fmt::Display for InputError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            InputError::Usage(m) | InputError::Io(m) => f.write_str(m),
        }
    }
}

fn usage(m: impl Into<String>) -> InputError {
    InputError::Usage(m.into())
}

/// A norm file holds a norm JSON object, or just a vertex list for a polygon.
fn norm_from_file(path: &Path) -> Result<Norm, InputError> {
    let text =
        std::fs::read_to_string(path).map_err(|e| InputError::Io(format!("cannot read {}: {e}", path.display())))?;
    let spec = match serde_json::from_str::<NormSpec>(&text) {
        Ok(spec) => spec,
        Err(first) => match serde_json::from_str::<Vec<Vector2>>(&text) {
            Ok(vertices) => NormSpec::Polygon { vertices },
            Err(_) => return Err(usage(format!("{}: not a norm description: {first}", path.display()))),
        },
    };
    Norm::new(spec).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn exponent(s: &str) -> Result<Exponent, InputError> {
    let s = if s == "∞" { "inf" } else { s };
    Exponent::parse(s).map_err(|e| usage(e.to_string()))
}

/// `euclidean`, `lp:P` (`P` may be `inf`), `weighted-lp:P:W1,W2`,
/// `regular:N`, `polygon:FILE`, or a path to a norm JSON file.
pub fn parse_norm(arg: &str) -> Result<Norm, InputError> {
    let (head, rest) = match arg.split_once(':') {
        Some((h, r)) => (h, Some(r)),
        None => (arg, None),
    };
    let norm = match (head, rest) {
        ("euclidean", None) => Ok(Norm::euclidean()),
        ("lp", Some(p)) => Norm::new(NormSpec::Lp { p: exponent(p)? }),
        ("weighted-lp", Some(r)) => {
            let (p, w) = r.split_once(':').ok_or_else(|| usage("expected weighted-lp:P:W1,W2"))?;
            let w: Vec<f64> = w
                .split(',')
                .map(|x| x.trim().parse::<f64>().map_err(|_| usage(format!("bad weight {x:?}"))))
                .collect::<Result<_, _>>()?;
            let w: [f64; 2] = w.try_into().map_err(|_| usage("expected two weights"))?;
            Norm::new(NormSpec::WeightedLp { p: exponent(p)?, w })
        }
        ("regular", Some(n)) => {
            let n = n.parse().map_err(|_| usage(format!("bad vertex count {n:?}")))?;
            Norm::regular_polygon(n)
        }
        ("polygon", Some(path)) => return norm_from_file(Path::new(path)),
        _ if Path::new(arg).is_file() => return norm_from_file(Path::new(arg)),
        _ => {
            return Err(usage(format!(
                "unknown norm {arg:?}; expected euclidean, lp:P, weighted-lp:P:W1,W2, regular:N, polygon:FILE or a JSON file"
            )))
        }
    };
    norm.map_err(|e| usage(e.to_string()))
}

/// `a:b:step` (inclusive of `b` up to rounding) or a single value.
pub fn parse_range(arg: &str) -> Result<Vec<f64>, InputError> {
    let num = |s: &str| {
        s.trim()
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| usage(format!("bad number {s:?} in {arg:?}")))
    };
    let parts: Vec<&str> = arg.split(':').collect();
    let (a, b, step) = match parts.as_slice() {
        [v] => return Ok(vec![num(v)?]),
        [a, b, s] => (num(a)?, num(b)?, num(s)?),
        _ => return Err(usage(format!("expected a:b:step, got {arg:?}"))),
    };
    if step <= 0.0 {
        return Err(usage(format!("step must be positive in {arg:?}")));
    }
    if b < a {
        return Err(usage(format!("empty range {arg:?}")));
    }
    let n = ((b - a) / step + 1e-9).floor() as usize + 1;
    Ok((0..n)
        .map(|i| {
            let v = a + step * i as f64;
            if (v - b).abs() <= 1e-9 * step {
                b
            } else {
                v
            }
        })
        .collect())
}
