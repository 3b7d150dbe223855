//! Per-step observable tables and their CSV/JSON forms.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::numfmt::fmt17;
use crate::C64;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Column {
    pub name: String,
    pub values: Vec<f64>,
    /// Standard error of each value; absent for exact columns.
    pub stderr: Option<Vec<f64>>,
}

/// Observables recorded at `t = 0..=T`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    pub n_qubits: usize,
    pub g: [f64; 2],
    pub t: Vec<usize>,
    pub columns: Vec<Column>,
    /// `sites[t][n] = <Z_n(t)>`, present when site magnetisations were requested.
    pub sites: Option<Vec<Vec<f64>>>,
    pub sites_stderr: Option<Vec<Vec<f64>>>,
    /// Bitstring counts per time point (qubit 0 leftmost), shot mode only.
    pub counts: Option<Vec<BTreeMap<String, u64>>>,
    pub shots: usize,
}

impl TimeSeries {
    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.columns.iter().find(|c| c.name == name).map(|c| c.values.as_slice())
    }

    pub fn stderr(&self, name: &str) -> Option<&[f64]> {
        self.columns.iter().find(|c| c.name == name).and_then(|c| c.stderr.as_deref())
    }

    /// Header: `t`, each observable followed by `<name>_se` when it carries errors,
    /// then `z_0..z_{N-1}` (and `z_<n>_se`) when site data is present.
    pub fn csv_header(&self) -> Vec<String> {
        let mut h = vec!["t".to_string()];
        for c in &self.columns {
            h.push(c.name.clone());
            if c.stderr.is_some() {
                h.push(format!("{}_se", c.name));
            }
        }
        if self.sites.is_some() {
            h.extend((0..self.n_qubits).map(|n| format!("z_{n}")));
        }
        if self.sites_stderr.is_some() {
            h.extend((0..self.n_qubits).map(|n| format!("z_{n}_se")));
        }
        h
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.csv_header().join(",");
        out.push('\n');
        for (row, &t) in self.t.iter().enumerate() {
            let mut cells = vec![t.to_string()];
            for c in &self.columns {
                cells.push(fmt17(c.values[row]));
                if let Some(se) = &c.stderr {
                    cells.push(fmt17(se[row]));
                }
            }
            for table in [&self.sites, &self.sites_stderr].into_iter().flatten() {
                cells.extend(table[row].iter().map(|&z| fmt17(z)));
            }
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("plain data serialises")
    }
}

/// Parsed CSV table: header plus numeric rows (the `t` column included).
#[derive(Clone, Debug, PartialEq)]
pub struct CsvTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl CsvTable {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }
}

/// Reads a single-header numeric CSV, checking every row has the header's width.
pub fn parse_csv(text: &str) -> Result<CsvTable, String> {
    let mut lines = text.lines();
    let header: Vec<String> = lines
        .next()
        .ok_or("empty file")?
        .split(',')
        .map(str::to_string)
        .collect();
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        let row: Vec<f64> = line
            .split(',')
            .map(|c| c.parse::<f64>().map_err(|e| format!("row {}: `{c}`: {e}", i + 1)))
            .collect::<Result<_, _>>()?;
        if row.len() != header.len() {
            return Err(format!("row {} has {} cells, header has {}", i + 1, row.len(), header.len()));
        }
        rows.push(row);
    }
    Ok(CsvTable { header, rows })
}

/// `g` as used in file names: the shortest round-trip decimal of the real part,
/// with `+<im>i` appended for complex values.
pub fn format_g(g: C64) -> String {
    if g.im == 0.0 {
        format!("{}", g.re)
    } else {
        format!("{}{:+}i", g.re, g.im)
    }
}

/// `{run_id}_{N}_{g}.csv`.
pub fn csv_file_name(run_id: &str, n: usize, g: C64) -> String {
    format!("{run_id}_{n}_{}.csv", format_g(g))
}
