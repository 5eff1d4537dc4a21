use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::FileFormat;
use crate::error::{Error, Result};

/// Recommendation level on the 1..=3 rating scale.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum Level {
    Good = 1,
    VeryGood = 2,
    Exceptional = 3,
}

impl Level {
    pub const ALL: [Level; 3] = [Level::Good, Level::VeryGood, Level::Exceptional];

    pub fn score(self) -> u8 {
        self as u8
    }

    pub fn label(self) -> &'static str {
        match self {
            Level::Good => "Good",
            Level::VeryGood => "Very good",
            Level::Exceptional => "Exceptional",
        }
    }

    pub(crate) fn slot(self) -> usize {
        self as usize - 1
    }
}

impl TryFrom<u8> for Level {
    type Error = Error;

    fn try_from(v: u8) -> Result<Self> {
        match v {
            1 => Ok(Level::Good),
            2 => Ok(Level::VeryGood),
            3 => Ok(Level::Exceptional),
            other => Err(Error::InvalidRecommendation(format!(
                "score {other} outside 1..=3"
            ))),
        }
    }
}

impl From<Level> for u8 {
    fn from(l: Level) -> u8 {
        l.score()
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecommendationRecord {
    pub pub_id: String,
    pub rater_id: String,
    pub score: Level,
    /// Intake order within the paper.
    pub seq: u32,
}

/// Checks `(pub_id, rater_id)` and `(pub_id, seq)` uniqueness.
pub fn validate_recommendations(records: &[RecommendationRecord]) -> Result<()> {
    let mut raters = HashSet::new();
    let mut seqs = HashSet::new();
    for r in records {
        if !raters.insert((r.pub_id.as_str(), r.rater_id.as_str())) {
            return Err(Error::InvalidRecommendation(format!(
                "rater `{}` rates `{}` twice",
                r.rater_id, r.pub_id
            )));
        }
        if !seqs.insert((r.pub_id.as_str(), r.seq)) {
            return Err(Error::InvalidRecommendation(format!(
                "sequence {} repeated for `{}`",
                r.seq, r.pub_id
            )));
        }
    }
    Ok(())
}

/// Keeps the lowest-`seq` record of each paper, ordered by `pub_id`.
pub fn dedup_first_recommendation(records: &[RecommendationRecord]) -> Vec<RecommendationRecord> {
    let mut first: BTreeMap<&str, &RecommendationRecord> = BTreeMap::new();
    for r in records {
        first
            .entry(r.pub_id.as_str())
            .and_modify(|cur| {
                if r.seq < cur.seq {
                    *cur = r;
                }
            })
            .or_insert(r);
    }
    first.into_values().cloned().collect()
}

pub fn read_recommendations(path: &Path) -> Result<Vec<RecommendationRecord>> {
    let format = FileFormat::from_path(path)?;
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let line_no = i as u64 + 1;
        if line.trim().is_empty() {
            continue;
        }
        let record = match format {
            FileFormat::Tsv => {
                let fields: Vec<&str> = line.trim_end_matches('\r').split('\t').collect();
                if fields.len() != 4 {
                    return Err(Error::parse(
                        path,
                        line_no,
                        format!("expected 4 tab-separated fields, found {}", fields.len()),
                    ));
                }
                if fields[0] == "pub_id" {
                    continue;
                }
                let score: u8 = fields[2]
                    .parse()
                    .map_err(|_| Error::parse(path, line_no, format!("invalid score `{}`", fields[2])))?;
                RecommendationRecord {
                    pub_id: fields[0].to_string(),
                    rater_id: fields[1].to_string(),
                    score: Level::try_from(score)
                        .map_err(|e| Error::parse(path, line_no, e.to_string()))?,
                    seq: fields[3]
                        .parse()
                        .map_err(|_| Error::parse(path, line_no, format!("invalid seq `{}`", fields[3])))?,
                }
            }
            FileFormat::JsonLines => serde_json::from_str(&line)
                .map_err(|e| Error::parse(path, line_no, e.to_string()))?,
        };
        out.push(record);
    }
    validate_recommendations(&out)?;
    Ok(out)
}

pub fn write_recommendations(records: &[RecommendationRecord], path: &Path) -> Result<()> {
    let format = FileFormat::from_path(path)?;
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let io_err = |e| Error::io(path, e);
    match format {
        FileFormat::Tsv => {
            writeln!(w, "pub_id\trater_id\tscore\tseq").map_err(io_err)?;
            for r in records {
                writeln!(w, "{}\t{}\t{}\t{}", r.pub_id, r.rater_id, r.score.score(), r.seq)
                    .map_err(io_err)?;
            }
        }
        FileFormat::JsonLines => {
            for r in records {
                serde_json::to_writer(&mut w, r)?;
                writeln!(w).map_err(io_err)?;
            }
        }
    }
    w.flush().map_err(io_err)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(p: &str, rater: &str, score: u8, seq: u32) -> RecommendationRecord {
        RecommendationRecord {
            pub_id: p.into(),
            rater_id: rater.into(),
            score: Level::try_from(score).unwrap(),
            seq,
        }
    }

    #[test]
    fn dedup_keeps_minimum_seq() {
        let recs = vec![rec("P", "b", 3, 2), rec("P", "a", 2, 1)];
        let first = dedup_first_recommendation(&recs);
        assert_eq!(first.len(), 1);
        assert_eq!(first[0].score, Level::VeryGood);

        let singles = vec![rec("A", "x", 1, 1), rec("B", "x", 2, 1)];
        assert_eq!(dedup_first_recommendation(&singles), singles);

        let five = vec![
            rec("C", "x", 1, 1),
            rec("A", "x", 1, 1),
            rec("A", "y", 3, 2),
            rec("B", "x", 2, 1),
            rec("C", "y", 2, 2),
        ];
        let first = dedup_first_recommendation(&five);
        let ids: Vec<_> = first.iter().map(|r| r.pub_id.as_str()).collect();
        assert_eq!(ids, ["A", "B", "C"]);
    }

    #[test]
    fn score_range_and_uniqueness() {
        assert!(Level::try_from(0).is_err());
        assert!(Level::try_from(4).is_err());
        assert!(validate_recommendations(&[rec("A", "x", 1, 1), rec("A", "x", 2, 2)]).is_err());
        assert!(validate_recommendations(&[rec("A", "x", 1, 1), rec("A", "y", 2, 1)]).is_err());
    }

    #[test]
    fn tsv_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("recs.tsv");
        let recs = vec![rec("A", "x", 1, 1), rec("A", "y", 3, 2)];
        write_recommendations(&recs, &path).unwrap();
        assert_eq!(read_recommendations(&path).unwrap(), recs);

        std::fs::write(&path, "pub_id\trater_id\tscore\tseq\nA\tx\t4\t1\n").unwrap();
        assert!(matches!(
            read_recommendations(&path),
            Err(Error::Parse { line: 2, .. })
        ));
    }
}
