//! The per-publication indicator table and its CSV / JSON-lines exports.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::cited::{score_all_cited_side, DegenerateSet};
use crate::citing::{AnomalyTally, CitingSide, WindowLength};
use crate::corpus::{CitationIndex, Corpus, FileFormat, PubIdx};
use crate::error::{Error, Result};
use crate::refsets::{partition_reference_sets, MultiCategoryRule};
use crate::stats::z_transform;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Indicator {
    #[serde(rename = "citations_3y")]
    Citations3y,
    Mncs,
    Incites,
    Hazen,
    P100,
    P100Prime,
    Sncs1,
    Sncs2,
    Sncs3,
}

impl Indicator {
    /// Export column order.
    pub const ALL: [Indicator; 9] = [
        Indicator::Citations3y,
        Indicator::Mncs,
        Indicator::Incites,
        Indicator::Hazen,
        Indicator::P100,
        Indicator::P100Prime,
        Indicator::Sncs1,
        Indicator::Sncs2,
        Indicator::Sncs3,
    ];

    /// Row order of the evaluation tables.
    pub const REPORT_ORDER: [Indicator; 9] = [
        Indicator::Citations3y,
        Indicator::Incites,
        Indicator::Hazen,
        Indicator::Mncs,
        Indicator::P100,
        Indicator::P100Prime,
        Indicator::Sncs1,
        Indicator::Sncs2,
        Indicator::Sncs3,
    ];

    pub fn column(self) -> &'static str {
        match self {
            Indicator::Citations3y => "citations_3y",
            Indicator::Mncs => "mncs",
            Indicator::Incites => "incites",
            Indicator::Hazen => "hazen",
            Indicator::P100 => "p100",
            Indicator::P100Prime => "p100_prime",
            Indicator::Sncs1 => "sncs1",
            Indicator::Sncs2 => "sncs2",
            Indicator::Sncs3 => "sncs3",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Indicator::Citations3y => "Citations",
            Indicator::Mncs => "MNCS",
            Indicator::Incites => "InCites",
            Indicator::Hazen => "Hazen",
            Indicator::P100 => "P100",
            Indicator::P100Prime => "P100'",
            Indicator::Sncs1 => "SNCS1",
            Indicator::Sncs2 => "SNCS2",
            Indicator::Sncs3 => "SNCS3",
        }
    }

    pub fn is_citing_side(self) -> bool {
        matches!(self, Indicator::Sncs1 | Indicator::Sncs2 | Indicator::Sncs3)
    }
}

impl fmt::Display for Indicator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.column())
    }
}

impl FromStr for Indicator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Indicator::ALL
            .into_iter()
            .find(|i| i.column() == s.trim())
            .ok_or_else(|| Error::UnknownIndicator(s.to_string()))
    }
}

/// Parses a comma-separated indicator list, returned in export order.
pub fn parse_indicator_list(list: &str) -> Result<Vec<Indicator>> {
    let set: BTreeSet<Indicator> = list
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(Indicator::from_str)
        .collect::<Result<_>>()?;
    Ok(set.into_iter().collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComputeConfig {
    pub indicators: Vec<Indicator>,
    pub multi_category_rule: MultiCategoryRule,
    pub window_length: WindowLength,
    pub cohort_cache: bool,
}

impl Default for ComputeConfig {
    fn default() -> Self {
        ComputeConfig {
            indicators: Indicator::ALL.to_vec(),
            multi_category_rule: MultiCategoryRule::default(),
            window_length: WindowLength::default(),
            cohort_cache: true,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TableMeta {
    pub horizon_year: Option<i32>,
    pub citable_types: Vec<String>,
    pub multi_category_rule: MultiCategoryRule,
    pub window_length: WindowLength,
    pub cohort_scope: String,
    pub z_sd_convention: String,
    pub rows: usize,
    pub degenerate_sets: Vec<DegenerateSet>,
    /// Publications whose three-year window is cut off by the horizon.
    pub truncated_window: Vec<String>,
    pub sncs_anomalies: AnomalyTally,
    /// Columns whose z-transform is undefined (constant values).
    pub z_undefined: Vec<Indicator>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndicatorRow {
    pub pub_id: String,
    /// Aligned with `IndicatorTable::indicators`.
    pub values: Vec<f64>,
    pub z: Vec<Option<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndicatorTable {
    pub indicators: Vec<Indicator>,
    pub rows: Vec<IndicatorRow>,
    pub meta: TableMeta,
}

impl IndicatorTable {
    pub fn column(&self, indicator: Indicator) -> Option<Vec<f64>> {
        let k = self.indicators.iter().position(|&i| i == indicator)?;
        Some(self.rows.iter().map(|r| r.values[k]).collect())
    }

    pub fn value(&self, row: usize, indicator: Indicator) -> Option<f64> {
        let k = self.indicators.iter().position(|&i| i == indicator)?;
        self.rows.get(row).map(|r| r.values[k])
    }

    pub fn row_of(&self, pub_id: &str) -> Option<usize> {
        self.rows.iter().position(|r| r.pub_id == pub_id)
    }

    /// Fills the z-score mirror columns; constant columns are left empty.
    fn standardize(&mut self) {
        self.meta.z_undefined.clear();
        for r in &mut self.rows {
            r.z = vec![None; self.indicators.len()];
        }
        for (k, &ind) in self.indicators.iter().enumerate() {
            let col: Vec<f64> = self.rows.iter().map(|r| r.values[k]).collect();
            match z_transform(&col) {
                Ok(z) => {
                    for (r, v) in self.rows.iter_mut().zip(z) {
                        r.z[k] = Some(v);
                    }
                }
                Err(_) => self.meta.z_undefined.push(ind),
            }
        }
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        let mut header = vec!["pub_id".to_string()];
        header.extend(self.indicators.iter().map(|i| i.column().to_string()));
        header.extend(self.indicators.iter().map(|i| format!("z_{}", i.column())));
        w.write_record(&header)?;
        for r in &self.rows {
            let mut rec = vec![r.pub_id.clone()];
            for (&ind, v) in self.indicators.iter().zip(&r.values) {
                rec.push(match ind {
                    Indicator::Citations3y => format!("{}", *v as u64),
                    _ => format!("{v:.6}"),
                });
            }
            rec.extend(r.z.iter().map(|z| z.map(|v| format!("{v:.6}")).unwrap_or_default()));
            w.write_record(&rec)?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }

    pub fn write_jsonl(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(file);
        let io_err = |e| Error::io(path, e);
        for r in &self.rows {
            let mut line = format!("{{\"pub_id\":{}", serde_json::to_string(&r.pub_id)?);
            for (&ind, v) in self.indicators.iter().zip(&r.values) {
                let num = match ind {
                    Indicator::Citations3y => serde_json::to_string(&(*v as u64))?,
                    _ => serde_json::to_string(v)?,
                };
                line.push_str(&format!(",\"{}\":{num}", ind.column()));
            }
            for (&ind, z) in self.indicators.iter().zip(&r.z) {
                line.push_str(&format!(",\"z_{}\":{}", ind.column(), serde_json::to_string(z)?));
            }
            line.push('}');
            writeln!(w, "{line}").map_err(io_err)?;
        }
        w.flush().map_err(io_err)
    }

    /// Reads an exported table (`.csv` or `.jsonl`). z columns are
    /// recomputed rather than read.
    pub fn read(path: &Path) -> Result<Self> {
        let rows: Vec<(String, HashMap<String, f64>)> =
            match path.extension().and_then(|e| e.to_str()) {
                Some("csv") => read_csv_rows(path)?,
                _ => match FileFormat::from_path(path)? {
                    FileFormat::JsonLines => read_jsonl_rows(path)?,
                    FileFormat::Tsv => return Err(Error::UnsupportedFormat(path.to_path_buf())),
                },
            };
        let indicators: Vec<Indicator> = Indicator::ALL
            .into_iter()
            .filter(|i| rows.first().is_some_and(|(_, m)| m.contains_key(i.column())))
            .collect();
        let mut out_rows = Vec::with_capacity(rows.len());
        for (line, (pub_id, values)) in rows.into_iter().enumerate() {
            let vals = indicators
                .iter()
                .map(|i| {
                    values.get(i.column()).copied().ok_or_else(|| {
                        Error::parse(path, line as u64 + 2, format!("missing `{}`", i.column()))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            out_rows.push(IndicatorRow {
                pub_id,
                values: vals,
                z: Vec::new(),
            });
        }
        let mut table = IndicatorTable {
            indicators,
            rows: out_rows,
            meta: TableMeta::default(),
        };
        table.meta.rows = table.rows.len();
        table.standardize();
        Ok(table)
    }
}

fn read_csv_rows(path: &Path) -> Result<Vec<(String, HashMap<String, f64>)>> {
    let mut rdr = csv::Reader::from_path(path)?;
    let header = rdr.headers()?.clone();
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        let mut pub_id = None;
        let mut values = HashMap::new();
        for (name, field) in header.iter().zip(rec.iter()) {
            if name == "pub_id" {
                pub_id = Some(field.to_string());
            } else if !name.starts_with("z_") {
                let v: f64 = field
                    .parse()
                    .map_err(|_| Error::parse(path, line, format!("invalid number `{field}` in `{name}`")))?;
                values.insert(name.to_string(), v);
            }
        }
        let pub_id = pub_id.ok_or_else(|| Error::parse(path, line, "missing pub_id"))?;
        out.push((pub_id, values));
    }
    Ok(out)
}

fn read_jsonl_rows(path: &Path) -> Result<Vec<(String, HashMap<String, f64>)>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let line_no = i as u64 + 1;
        let obj: serde_json::Map<String, Value> =
            serde_json::from_str(&line).map_err(|e| Error::parse(path, line_no, e.to_string()))?;
        let pub_id = obj
            .get("pub_id")
            .and_then(Value::as_str)
            .ok_or_else(|| Error::parse(path, line_no, "missing pub_id"))?
            .to_string();
        let values = obj
            .iter()
            .filter(|(k, _)| *k != "pub_id" && !k.starts_with("z_"))
            .filter_map(|(k, v)| v.as_f64().map(|f| (k.clone(), f)))
            .collect();
        out.push((pub_id, values));
    }
    Ok(out)
}

/// Computes the configured indicators for every citable publication.
pub fn compute_indicators(corpus: &Corpus, config: &ComputeConfig) -> Result<IndicatorTable> {
    let index = CitationIndex::build(corpus);
    let mut indicators = config.indicators.clone();
    indicators.sort();
    indicators.dedup();

    let sets = partition_reference_sets(corpus, &index);
    let cited = score_all_cited_side(corpus, &index, &sets, config.multi_category_rule)?;

    let citing = indicators
        .iter()
        .any(|i| i.is_citing_side())
        .then(|| CitingSide::new(corpus, &index, config.window_length).score_all(config.cohort_cache));

    let rows = cited
        .rows
        .iter()
        .enumerate()
        .map(|(k, row)| {
            let sncs = citing.as_ref().map(|c| {
                debug_assert_eq!(c.rows[k].0, row.publication);
                c.rows[k].1
            });
            let values = indicators
                .iter()
                .map(|ind| match ind {
                    Indicator::Citations3y => row.citations_3y as f64,
                    Indicator::Mncs => row.mncs,
                    Indicator::Incites => row.incites,
                    Indicator::Hazen => row.hazen,
                    Indicator::P100 => row.p100,
                    Indicator::P100Prime => row.p100_prime,
                    Indicator::Sncs1 => sncs.map_or(0.0, |s| s.sncs1),
                    Indicator::Sncs2 => sncs.map_or(0.0, |s| s.sncs2),
                    Indicator::Sncs3 => sncs.map_or(0.0, |s| s.sncs3),
                })
                .collect();
            IndicatorRow {
                pub_id: corpus.publication(row.publication).pub_id.clone(),
                values,
                z: Vec::new(),
            }
        })
        .collect::<Vec<_>>();

    let pub_id = |p: &PubIdx| corpus.publication(*p).pub_id.clone();
    let mut table = IndicatorTable {
        indicators,
        meta: TableMeta {
            horizon_year: Some(corpus.horizon_year()),
            citable_types: corpus.citable_types().iter().cloned().collect(),
            multi_category_rule: config.multi_category_rule,
            window_length: config.window_length,
            cohort_scope: "all publications in the citing journal-year".into(),
            z_sd_convention: "sample (n - 1)".into(),
            rows: rows.len(),
            degenerate_sets: cited.degenerate_sets,
            truncated_window: cited.truncated_window.iter().map(pub_id).collect(),
            sncs_anomalies: citing.map(|c| c.anomalies).unwrap_or_default(),
            z_undefined: Vec::new(),
        },
        rows,
    };
    table.standardize();
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn indicator_names_roundtrip() {
        for i in Indicator::ALL {
            assert_eq!(i.column().parse::<Indicator>().unwrap(), i);
        }
        assert!("bogus".parse::<Indicator>().is_err());
        assert_eq!(
            parse_indicator_list("hazen,mncs").unwrap(),
            vec![Indicator::Mncs, Indicator::Hazen]
        );
        assert_eq!(
            serde_json::to_string(&Indicator::Citations3y).unwrap(),
            "\"citations_3y\""
        );
    }
}
