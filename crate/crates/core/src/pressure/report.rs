//! CSV and JSON serialization of estimates.

use serde::Serialize;

use super::PressureEstimate;
use crate::error::{Error, Result};

pub const CSV_HEADER: &str = "kind,n,epsilon,lower,upper,cover_size,method,seed";

/// One row per estimate under [`CSV_HEADER`]; floats use the shortest
/// round-trip representation.
pub fn estimates_to_csv(estimates: &[PressureEstimate]) -> Result<String> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    w.write_record(CSV_HEADER.split(','))?;
    for e in estimates {
        w.write_record([
            e.kind.label(),
            e.n.to_string(),
            e.epsilon.to_string(),
            e.lower.to_string(),
            e.upper.to_string(),
            e.cover_size.to_string(),
            e.method.to_string(),
            e.seed.to_string(),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
}

#[derive(Serialize)]
struct Report<'a> {
    schema_version: u32,
    estimates: &'a [PressureEstimate],
}

pub fn estimates_to_json(estimates: &[PressureEstimate]) -> Result<String> {
    serde_json::to_string_pretty(&Report { schema_version: 1, estimates }).map_err(|e| Error::Io(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pressure::{Method, PressureKind};

    #[test]
    fn csv_and_json_shapes() {
        let e = PressureEstimate {
            kind: PressureKind::Free,
            lower: 0.5,
            upper: 0.75,
            n: 3,
            epsilon: 0.25,
            method: Method::GenericGrid,
            cover_size: 12.0,
            seed: 9,
            stochastic: false,
        };
        let csv = estimates_to_csv(&[e.clone()]).unwrap();
        assert_eq!(csv, format!("{CSV_HEADER}\nfree,3,0.25,0.5,0.75,12,generic_grid,9\n"));
        let v: serde_json::Value = serde_json::from_str(&estimates_to_json(&[e]).unwrap()).unwrap();
        assert_eq!(v["schema_version"], 1);
        assert_eq!(v["estimates"][0]["n"], 3);
    }
}
