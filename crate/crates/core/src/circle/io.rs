use std::io::{Read, Write};

use num_complex::Complex;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::boundary::BoundaryFunction;
use crate::error::{HardyError, Result};
use crate::scalar::{Cx, Real};

/// JSON layout `{"n": N, "re": [...], "im": [...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryFunctionWire {
    pub n: usize,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl<T: Real> From<&BoundaryFunction<T>> for BoundaryFunctionWire {
    fn from(f: &BoundaryFunction<T>) -> Self {
        BoundaryFunctionWire {
            n: f.len(),
            re: f.samples().iter().map(|z| z.re.as_f64()).collect(),
            im: f.samples().iter().map(|z| z.im.as_f64()).collect(),
        }
    }
}

impl<T: Real> TryFrom<BoundaryFunctionWire> for BoundaryFunction<T> {
    type Error = HardyError;

    fn try_from(w: BoundaryFunctionWire) -> Result<Self> {
        if w.re.len() != w.n {
            return Err(HardyError::SizeMismatch { expected: w.n, found: w.re.len() });
        }
        if w.im.len() != w.n {
            return Err(HardyError::SizeMismatch { expected: w.n, found: w.im.len() });
        }
        BoundaryFunction::new(w.re.iter().zip(&w.im).map(|(&a, &b)| Complex::new(T::lit(a), T::lit(b))).collect())
    }
}

impl<T: Real> Serialize for BoundaryFunction<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        BoundaryFunctionWire::from(self).serialize(s)
    }
}

impl<'de, T: Real> Deserialize<'de> for BoundaryFunction<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let w = BoundaryFunctionWire::deserialize(d)?;
        BoundaryFunction::try_from(w).map_err(serde::de::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
struct CsvRow {
    k: usize,
    re: f64,
    im: f64,
}

/// CSV with columns `k, re, im`.
pub fn write_csv<T: Real, W: Write>(f: &BoundaryFunction<T>, w: W) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    for (k, z) in f.samples().iter().enumerate() {
        wr.serialize(CsvRow { k, re: z.re.as_f64(), im: z.im.as_f64() })?;
    }
    wr.flush()?;
    Ok(())
}

pub fn read_csv<T: Real, R: Read>(r: R) -> Result<BoundaryFunction<T>> {
    let mut rd = csv::Reader::from_reader(r);
    let mut rows: Vec<CsvRow> = rd.deserialize().collect::<std::result::Result<_, _>>()?;
    rows.sort_by_key(|row| row.k);
    if let Some((i, row)) = rows.iter().enumerate().find(|(i, row)| row.k != *i) {
        return Err(HardyError::Format(format!("row {i} has node index {}", row.k)));
    }
    let samples: Vec<Cx<T>> = rows.iter().map(|row| Complex::new(T::lit(row.re), T::lit(row.im))).collect();
    BoundaryFunction::new(samples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn json_layout() {
        let f = BoundaryFunction::<f64>::from_fn(8, |t| t * Complex64::new(2.0, 0.0)).unwrap();
        let v: serde_json::Value = serde_json::to_value(&f).unwrap();
        assert_eq!(v["n"], 8);
        assert_eq!(v["re"].as_array().unwrap().len(), 8);
        let back: BoundaryFunction<f64> = serde_json::from_value(v).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn json_rejects_inconsistent_length() {
        let bad = r#"{"n": 8, "re": [1,2,3], "im": [0,0,0]}"#;
        assert!(serde_json::from_str::<BoundaryFunction<f64>>(bad).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let f = BoundaryFunction::<f64>::from_fn(16, |t| t.powi(3) + 0.25).unwrap();
        let mut buf = Vec::new();
        write_csv(&f, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("k,re,im\n"));
        let back: BoundaryFunction<f64> = read_csv(&buf[..]).unwrap();
        assert_eq!(back, f);
    }
}
