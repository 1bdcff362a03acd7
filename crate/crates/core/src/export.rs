//! Curve export. CSV rows carry `eps,value,grid_n,refine_tol` (plus an
//! optional `hilbert` column) with 17 significant digits, so every value
//! survives a text round trip exactly.

use serde::{Deserialize, Serialize};

use crate::error::{ModuliError, Result};
use crate::moduli::{hilbert_reference, ModulusCurve};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub eps: f64,
    pub value: f64,
    pub grid_n: usize,
    pub refine_tol: f64,
    pub hilbert: Option<f64>,
}

pub fn curve_rows(curve: &ModulusCurve, with_hilbert: bool) -> Result<Vec<CurveRow>> {
    curve
        .samples
        .iter()
        .map(|s| {
            let hilbert = if with_hilbert { Some(hilbert_reference(curve.kind, s.eps)?) } else { None };
            Ok(CurveRow { eps: s.eps, value: s.value, grid_n: s.grid_n, refine_tol: s.refine_tol, hilbert })
        })
        .collect()
}

fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

fn csv_err(e: csv::Error) -> ModuliError {
    ModuliError::Parse(format!("csv: {e}"))
}

/// The `hilbert` column is written when the first row has it.
pub fn rows_to_csv(rows: &[CurveRow]) -> Result<String> {
    let with_hilbert = rows.first().is_some_and(|r| r.hilbert.is_some());
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["eps", "value", "grid_n", "refine_tol"];
    if with_hilbert {
        header.push("hilbert");
    }
    w.write_record(&header).map_err(csv_err)?;
    for r in rows {
        let mut rec = vec![fmt17(r.eps), fmt17(r.value), r.grid_n.to_string(), fmt17(r.refine_tol)];
        if with_hilbert {
            let h = r.hilbert.ok_or_else(|| ModuliError::Input("hilbert column missing in some rows".into()))?;
            rec.push(fmt17(h));
        }
        w.write_record(&rec).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| ModuliError::Parse(format!("csv: {e}")))?;
    String::from_utf8(bytes).map_err(|e| ModuliError::Parse(e.to_string()))
}

pub fn rows_from_csv(text: &str) -> Result<Vec<CurveRow>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header: Vec<String> = r.headers().map_err(csv_err)?.iter().map(str::to_owned).collect();
    let with_hilbert = match header.iter().map(String::as_str).collect::<Vec<_>>().as_slice() {
        ["eps", "value", "grid_n", "refine_tol"] => false,
        ["eps", "value", "grid_n", "refine_tol", "hilbert"] => true,
        other => return Err(ModuliError::Parse(format!("unexpected curve header {other:?}"))),
    };
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| ModuliError::Parse(format!("bad number {s:?}")));
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(csv_err)?;
        let grid_n = rec[2].trim().parse().map_err(|_| ModuliError::Parse(format!("bad grid_n {:?}", &rec[2])))?;
        rows.push(CurveRow {
            eps: num(&rec[0])?,
            value: num(&rec[1])?,
            grid_n,
            refine_tol: num(&rec[3])?,
            hilbert: if with_hilbert { Some(num(&rec[4])?) } else { None },
        });
    }
    Ok(rows)
}

pub fn curve_to_csv(curve: &ModulusCurve, with_hilbert: bool) -> Result<String> {
    rows_to_csv(&curve_rows(curve, with_hilbert)?)
}

/// Full curve including witnesses.
pub fn curve_to_json(curve: &ModulusCurve) -> Result<String> {
    serde_json::to_string_pretty(curve).map_err(|e| ModuliError::Parse(e.to_string())).map(|s| s + "\n")
}

pub fn curve_from_json(text: &str) -> Result<ModulusCurve> {
    serde_json::from_str(text).map_err(|e| ModuliError::Parse(format!("curve json: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moduli::{modulus_curve, ModulusConfig, ModulusKind};
    use crate::norm::Norm;

    fn curve() -> ModulusCurve {
        let n = Norm::lp(3.0).unwrap();
        modulus_curve(&n, ModulusKind::ZetaPlus, &[0.05, 0.1, 0.15, 1.0 / 3.0], &ModulusConfig::with_grid(128, 2))
            .unwrap()
    }

    #[test]
    fn csv_round_trip_is_byte_identical() {
        for hilbert in [false, true] {
            let text = curve_to_csv(&curve(), hilbert).unwrap();
            let rows = rows_from_csv(&text).unwrap();
            assert_eq!(rows.len(), 4);
            assert_eq!(rows_to_csv(&rows).unwrap(), text);
            assert_eq!(rows[3].eps, 1.0 / 3.0);
        }
    }

    #[test]
    fn csv_layout() {
        let text = curve_to_csv(&curve(), false).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("eps,value,grid_n,refine_tol"));
        assert!(lines.next().unwrap().starts_with("5.0000000000000003e-2,"));
    }

    #[test]
    fn json_round_trip_is_byte_identical() {
        let text = curve_to_json(&curve()).unwrap();
        let back = curve_from_json(&text).unwrap();
        assert_eq!(back, curve());
        assert_eq!(curve_to_json(&back).unwrap(), text);
    }

    #[test]
    fn bad_input() {
        assert!(rows_from_csv("a,b\n1,2\n").is_err());
        assert!(rows_from_csv("eps,value,grid_n,refine_tol\nx,1,2,3\n").is_err());
        assert!(curve_from_json("{}").is_err());
    }
}
