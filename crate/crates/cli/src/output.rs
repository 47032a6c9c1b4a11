//! Command results rendered as JSON or CSV.

use std::io::Write;

use cutlocus::trajectory::Trajectory;
use cutlocus::{ComplexMatrix, MatrixJson, RealMatrix};
use serde_json::{json, Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// A JSON document together with its CSV table.
pub struct Report {
    pub json: Value,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Report {
    pub fn write(&self, format: Format, sink: &mut dyn Write) -> std::io::Result<()> {
        match format {
            Format::Json => {
                serde_json::to_writer_pretty(&mut *sink, &self.json)?;
                writeln!(sink)
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(sink);
                w.write_record(&self.header)?;
                for row in &self.rows {
                    w.write_record(row)?;
                }
                w.flush()
            }
        }
    }
}

/// Shortest decimal form that parses back to the same `f64`, with an exponent for tiny or huge values.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}

/// Key-value report; CSV columns `quantity,value`, matrices flattened to `name[i,j]`.
#[derive(Default)]
pub struct Record {
    json: Map<String, Value>,
    rows: Vec<Vec<String>>,
}

impl Record {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn scalar(mut self, key: &str, v: f64) -> Self {
        self.json.insert(key.into(), json!(v));
        self.rows.push(vec![key.into(), num(v)]);
        self
    }

    pub fn count(mut self, key: &str, v: usize) -> Self {
        self.json.insert(key.into(), json!(v));
        self.rows.push(vec![key.into(), v.to_string()]);
        self
    }

    pub fn flag(mut self, key: &str, v: bool) -> Self {
        self.json.insert(key.into(), json!(v));
        self.rows.push(vec![key.into(), v.to_string()]);
        self
    }

    pub fn text(mut self, key: &str, v: &str) -> Self {
        self.json.insert(key.into(), json!(v));
        self.rows.push(vec![key.into(), v.into()]);
        self
    }

    pub fn real_matrix(mut self, key: &str, m: &RealMatrix) -> Self {
        self.json.insert(
            key.into(),
            serde_json::to_value(MatrixJson::from_real(m)).expect("serializable"),
        );
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                self.rows
                    .push(vec![format!("{key}[{i},{j}]"), num(m[(i, j)])]);
            }
        }
        self
    }

    pub fn complex_matrix(mut self, key: &str, m: &ComplexMatrix) -> Self {
        self.json.insert(
            key.into(),
            serde_json::to_value(MatrixJson::from_complex(m)).expect("serializable"),
        );
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                self.rows
                    .push(vec![format!("{key}[{i},{j}].re"), num(m[(i, j)].re)]);
                self.rows
                    .push(vec![format!("{key}[{i},{j}].im"), num(m[(i, j)].im)]);
            }
        }
        self
    }

    pub fn into_report(self) -> Report {
        Report {
            json: Value::Object(self.json),
            header: vec!["quantity".into(), "value".into()],
            rows: self.rows,
        }
    }
}

/// Trajectory as `{"times": [...], "points": [[...], ...]}`; CSV columns `t,x0,x1,…`.
pub fn trajectory_report(tr: &Trajectory) -> Report {
    Report {
        json: serde_json::to_value(tr).expect("serializable"),
        header: tr.header(),
        rows: tr
            .rows()
            .into_iter()
            .map(|r| r.into_iter().map(num).collect())
            .collect(),
    }
}

/// Matrix path as `{"times": [...], "points": [matrix, ...]}`; CSV columns `t,m00,m01,…` (row-major).
pub fn matrix_trajectory_report(times: &[f64], mats: &[RealMatrix]) -> Report {
    let (r, c) = mats.first().map_or((0, 0), |m| m.shape());
    let header = std::iter::once("t".to_string())
        .chain((0..r).flat_map(|i| (0..c).map(move |j| format!("m{i}{j}"))))
        .collect();
    let rows = times
        .iter()
        .zip(mats)
        .map(|(t, m)| {
            std::iter::once(num(*t))
                .chain(MatrixJson::from_real(m).real.into_iter().map(num))
                .collect()
        })
        .collect();
    let points: Vec<MatrixJson> = mats.iter().map(MatrixJson::from_real).collect();
    Report {
        json: json!({ "times": times, "points": points }),
        header,
        rows,
    }
}
