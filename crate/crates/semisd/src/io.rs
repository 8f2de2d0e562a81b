//! Report envelopes (JSON) and sample files (CSV with a JSON header line).

use std::io::{self, Write};

use serde::Serialize;
use serde_json::Value;

use semisd_core::autoregressive::{SeriesSample, SeriesValues};
use semisd_core::subordination::SubordinatedSample;

pub const SCHEMA_VERSION: u32 = 1;

/// Top-level JSON document every command writes.
#[derive(Debug, Clone, Serialize)]
pub struct Envelope {
    pub schema_version: u32,
    pub command: String,
    /// The effective configuration (file merged with flags).
    pub config: Value,
    pub verdict: Option<String>,
    pub result: Value,
}

impl Envelope {
    pub fn new(command: &str, config: Value, verdict: Option<String>, result: Value) -> Self {
        Envelope {
            schema_version: SCHEMA_VERSION,
            command: command.into(),
            config,
            verdict,
            result,
        }
    }

    pub fn to_pretty(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("envelope serialises");
        s.push('\n');
        s
    }
}

fn header<W: Write>(w: &mut W, meta: &Value) -> io::Result<()> {
    writeln!(w, "# {}", serde_json::to_string(meta).map_err(io::Error::other)?)
}

fn csv_writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(w)
}

/// `index,value` rows after a `#`-prefixed JSON header.
pub fn write_series_csv<W: Write>(mut w: W, sample: &SeriesSample, meta: &Value) -> io::Result<()> {
    header(&mut w, meta)?;
    let mut out = csv_writer(w);
    out.write_record(["index", "value"])?;
    match &sample.values {
        SeriesValues::Real(v) => {
            for (i, x) in v.iter().enumerate() {
                out.write_record([i.to_string(), format_f64(*x)])?;
            }
        }
        SeriesValues::Count(v) => {
            for (i, k) in v.iter().enumerate() {
                out.write_record([i.to_string(), k.to_string()])?;
            }
        }
    }
    out.flush()
}

/// `path_id,t,T_value,X_value` rows after a `#`-prefixed JSON header.
pub fn write_paths_csv<W: Write>(mut w: W, sample: &SubordinatedSample, meta: &Value) -> io::Result<()> {
    header(&mut w, meta)?;
    let mut out = csv_writer(w);
    out.write_record(["path_id", "t", "T_value", "X_value"])?;
    for p in &sample.paths {
        for ((t, big_t), x) in p.times.iter().zip(&p.clock).zip(&p.values) {
            out.write_record([p.path_id.to_string(), format_f64(*t), format_f64(*big_t), format_f64(*x)])?;
        }
    }
    out.flush()
}

/// Shortest representation that round-trips.
pub fn format_f64(x: f64) -> String {
    format!("{x:?}")
}

/// Reads back an `index,value` series, skipping `#` lines.
pub fn read_series_csv<R: io::Read>(r: R) -> io::Result<Vec<f64>> {
    let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(r);
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let v = rec
            .get(1)
            .and_then(|s| s.parse::<f64>().ok())
            .ok_or_else(|| io::Error::new(io::ErrorKind::InvalidData, "bad value column"))?;
        out.push(v);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> SeriesSample {
        SeriesSample {
            values: SeriesValues::Real(vec![0.5, -1.25, 3.0]),
            seed: 1,
            replicate: 0,
            burn_in: 0,
            n: 3,
            rho: 0.5,
            label: "t".into(),
        }
    }

    #[test]
    fn series_round_trip() {
        let mut buf = Vec::new();
        write_series_csv(&mut buf, &sample(), &serde_json::json!({"seed": 1})).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("# {\"seed\":1}\nindex,value\n0,0.5\n"));
        assert!(!text.contains('\r'));
        assert_eq!(read_series_csv(&buf[..]).unwrap(), vec![0.5, -1.25, 3.0]);
    }

    #[test]
    fn envelope_has_schema_version() {
        let e = Envelope::new("x", Value::Null, Some("pass".into()), Value::Null);
        let v: Value = serde_json::from_str(&e.to_pretty()).unwrap();
        assert_eq!(v["schema_version"], 1);
    }
}
