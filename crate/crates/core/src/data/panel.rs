use crate::error::{AtmError, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::io::Read;
use std::path::Path;

/// Column layout of a long-format panel file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PanelSchema {
    pub period_column: String,
    pub value_column: String,
    pub delimiter: u8,
}

impl Default for PanelSchema {
    fn default() -> Self {
        PanelSchema { period_column: "period".into(), value_column: "value".into(), delimiter: b',' }
    }
}

/// Per-period samples, periods in ascending label order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawPanel {
    periods: Vec<String>,
    samples: Vec<Vec<f64>>,
}

/// Numeric order when every label parses as a number, otherwise lexicographic.
fn sort_labels(labels: &mut [String]) {
    let numeric: Option<Vec<f64>> = labels.iter().map(|l| l.trim().parse::<f64>().ok()).collect();
    match numeric {
        Some(_) => labels.sort_by(|a, b| {
            let (x, y) = (a.trim().parse::<f64>().unwrap(), b.trim().parse::<f64>().unwrap());
            x.total_cmp(&y).then_with(|| a.cmp(b))
        }),
        None => labels.sort(),
    }
}

impl RawPanel {
    /// Build from `(label, samples)` pairs; labels are sorted and must be distinct.
    pub fn new(mut groups: Vec<(String, Vec<f64>)>) -> Result<Self> {
        if groups.len() < 2 {
            return Err(AtmError::DegenerateData(format!("need at least 2 periods, got {}", groups.len())));
        }
        let mut labels: Vec<String> = groups.iter().map(|g| g.0.clone()).collect();
        sort_labels(&mut labels);
        if labels.windows(2).any(|w| w[0] == w[1]) {
            return Err(AtmError::Schema("duplicate period label".into()));
        }
        let mut by_label: BTreeMap<String, Vec<f64>> = groups.drain(..).collect();
        let mut samples = Vec::with_capacity(labels.len());
        for l in &labels {
            let s = by_label.remove(l).expect("label present");
            if s.len() < 2 {
                return Err(AtmError::DegenerateData(format!("period {l} has {} observation(s); need 2", s.len())));
            }
            if let Some(v) = s.iter().find(|v| !v.is_finite()) {
                return Err(AtmError::DegenerateData(format!("period {l} contains non-finite value {v}")));
            }
            samples.push(s);
        }
        Ok(RawPanel { periods: labels, samples })
    }

    pub fn periods(&self) -> &[String] {
        &self.periods
    }

    /// Samples of period `i` (0-based), in file order.
    pub fn samples(&self, i: usize) -> &[f64] {
        &self.samples[i]
    }

    pub fn len(&self) -> usize {
        self.periods.len()
    }

    pub fn is_empty(&self) -> bool {
        self.periods.is_empty()
    }

    /// Smallest and largest value over all periods.
    pub fn value_range(&self) -> (f64, f64) {
        self.samples
            .iter()
            .flatten()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)))
    }

    /// Long-format CSV with `period,value` columns.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("period,value\n");
        for (p, s) in self.periods.iter().zip(&self.samples) {
            for v in s {
                out.push_str(&format!("{p},{v}\n"));
            }
        }
        out
    }
}

/// Read a long-format panel (one row per observation) from `path`.
pub fn ingest_csv(path: &Path, schema: &PanelSchema) -> Result<RawPanel> {
    ingest_reader(std::fs::File::open(path)?, schema)
}

pub fn ingest_reader<R: Read>(reader: R, schema: &PanelSchema) -> Result<RawPanel> {
    let mut rdr = csv::ReaderBuilder::new().delimiter(schema.delimiter).trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers().map_err(|e| AtmError::Schema(e.to_string()))?.clone();
    let find = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| AtmError::Schema(format!("column '{name}' not found in header {:?}", headers.iter().collect::<Vec<_>>())))
    };
    let (pc, vc) = (find(&schema.period_column)?, find(&schema.value_column)?);
    let mut groups: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| AtmError::Parse {
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        let (period, raw) = match (rec.get(pc), rec.get(vc)) {
            (Some(p), Some(v)) => (p, v),
            _ => return Err(AtmError::Parse { line, message: "missing field".into() }),
        };
        let value: f64 = raw
            .parse()
            .ok()
            .filter(|v: &f64| v.is_finite())
            .ok_or_else(|| AtmError::Parse { line, message: format!("value '{raw}' is not a finite number") })?;
        groups.entry(period.to_string()).or_default().push(value);
    }
    RawPanel::new(groups.into_iter().collect())
}
