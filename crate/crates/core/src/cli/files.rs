//! Scenario documents and sweep CSV files.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::Point;
use crate::sim::SweepRow;
use crate::taxonomy::{normalize, Scenario};

pub const CSV_HEADER: [&str; 4] = ["eta", "mean_error", "std_error", "failures"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub sensors: Vec<[f64; 2]>,
    pub ranges: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

impl ScenarioFile {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("scenario file: {e}")))
    }

    pub fn to_scenario(&self) -> Result<Scenario> {
        if self.sensors.len() != 3 {
            return Err(Error::InvalidInput(format!(
                "field \"sensors\": expected 3 entries, found {}",
                self.sensors.len()
            )));
        }
        if self.ranges.len() != 3 {
            return Err(Error::InvalidInput(format!(
                "field \"ranges\": expected 3 entries, found {}",
                self.ranges.len()
            )));
        }
        for (j, r) in self.ranges.iter().enumerate() {
            if !(r.is_finite() && *r > 0.0) {
                return Err(Error::InvalidInput(format!(
                    "field \"ranges[{j}]\": must be finite and positive, got {r}"
                )));
            }
        }
        let z = [0, 1, 2].map(|j| Point::new(self.sensors[j][0], self.sensors[j][1]));
        normalize(z, [self.ranges[0], self.ranges[1], self.ranges[2]])
    }
}

/// `%.12g`-style formatting: 12 significant digits, trailing zeros removed,
/// scientific notation outside `1e-4 <= |v| < 1e12`.
pub fn format_g(v: f64) -> String {
    if v.is_nan() {
        return "NaN".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    let sci = format!("{v:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent in {:e} output");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..12).contains(&exp) {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{m}e{sign}{:02}", exp.abs());
    }
    let decimals = (11 - exp) as usize;
    trim_zeros(&format!("{v:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], w: W) -> Result<()> {
    let io = |e: csv::Error| Error::InvalidInput(format!("writing CSV: {e}"));
    let mut out = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w);
    out.write_record(CSV_HEADER).map_err(io)?;
    for r in rows {
        out.write_record([
            format_g(r.eta),
            format_g(r.mean_error),
            format_g(r.std_error),
            r.failures.to_string(),
        ])
        .map_err(io)?;
    }
    out.flush().map_err(|e| Error::InvalidInput(format!("writing CSV: {e}")))
}

pub fn read_sweep_csv<R: Read>(r: R) -> Result<Vec<SweepRow>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(r);
    let header = rdr
        .headers()
        .map_err(|e| Error::InvalidInput(format!("CSV header: {e}")))?;
    if header.iter().ne(CSV_HEADER) {
        return Err(Error::InvalidInput(format!(
            "CSV header must be \"{}\"",
            CSV_HEADER.join(",")
        )));
    }
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let line = i + 2;
        let rec = rec.map_err(|e| Error::InvalidInput(format!("CSV line {line}: {e}")))?;
        let num = |k: usize| -> Result<f64> {
            rec[k].trim().parse::<f64>().map_err(|_| {
                Error::InvalidInput(format!("CSV line {line}, column {}: not a number: {:?}", CSV_HEADER[k], &rec[k]))
            })
        };
        let failures = rec[3].trim().parse::<usize>().map_err(|_| {
            Error::InvalidInput(format!("CSV line {line}, column failures: not a count: {:?}", &rec[3]))
        })?;
        let row = SweepRow {
            eta: num(0)?,
            mean_error: num(1)?,
            std_error: num(2)?,
            failures,
        };
        if let Some(prev) = rows.last().map(|p: &SweepRow| p.eta) {
            if !(row.eta > prev) {
                return Err(Error::InvalidInput(format!("CSV line {line}: eta not ascending")));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::InvalidInput("CSV has no data rows".into()));
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn format_g_matches_printf() {
        let cases = [
            (0.02, "0.02"),
            (1.0, "1"),
            (0.1 + 0.2, "0.3"),
            (123456.789, "123456.789"),
            (1.0 / 3.0, "0.333333333333"),
            (2.5e-7, "2.5e-07"),
            (-1.5e13, "-1.5e+13"),
            (0.0001, "0.0001"),
            (999999999999.5, "1e+12"),
            (f64::NAN, "NaN"),
        ];
        for (v, want) in cases {
            assert_eq!(format_g(v), want, "{v}");
        }
    }

    #[test]
    fn csv_round_trip_is_byte_identical() {
        let rows = vec![
            SweepRow { eta: 0.0, mean_error: 1e-17, std_error: 0.0, failures: 0 },
            SweepRow { eta: 0.02, mean_error: 0.0123456789012345, std_error: 0.3, failures: 1 },
            SweepRow { eta: 0.04, mean_error: f64::NAN, std_error: f64::NAN, failures: 50 },
        ];
        let mut a = Vec::new();
        write_sweep_csv(&rows, &mut a).unwrap();
        let parsed = read_sweep_csv(a.as_slice()).unwrap();
        let mut b = Vec::new();
        write_sweep_csv(&parsed, &mut b).unwrap();
        assert_eq!(a, b);
        assert!(String::from_utf8(a).unwrap().starts_with("eta,mean_error,std_error,failures\n"));
    }

    #[test]
    fn csv_errors() {
        assert!(read_sweep_csv("eta,mean_error,std_error,failures\n".as_bytes()).is_err());
        assert!(read_sweep_csv("a,b,c,d\n0,1,1,0\n".as_bytes()).is_err());
        assert!(read_sweep_csv("eta,mean_error,std_error,failures\n0,x,1,0\n".as_bytes()).is_err());
        assert!(read_sweep_csv("eta,mean_error,std_error,failures\n0.1,1,1,0\n0,1,1,0\n".as_bytes()).is_err());
    }

    #[test]
    fn scenario_file_diagnostics() {
        let err = ScenarioFile::parse("{\"sensors\": [[0,0],[1,0]],\n \"ranges\": [1,1,}").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
        let f = ScenarioFile::parse(r#"{"sensors": [[0,0],[1,0]], "ranges": [1,1,1]}"#).unwrap();
        assert!(f.to_scenario().unwrap_err().to_string().contains("sensors"));
        let f = ScenarioFile::parse(r#"{"sensors": [[0,0],[1,0],[0,1]], "ranges": [1,-1,1]}"#).unwrap();
        assert!(f.to_scenario().unwrap_err().to_string().contains("ranges[1]"));
        assert!(ScenarioFile::parse(r#"{"sensors": [], "ranges": [], "extra": 1}"#).is_err());
    }
}
