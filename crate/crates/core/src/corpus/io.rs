//! Publication and reference file formats.
//!
//! Publications: `pub_id, year, journal_id, doc_type, categories`, either
//! tab-separated with categories joined by `;`, or JSON lines with a
//! `categories` array. A TSV header row is optional; when present it may
//! name an alternative category column. References: `citing_id, cited_id`.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{Corpus, CorpusConfig, Publication};
use crate::error::{Error, Result};

const PUBLICATION_COLUMNS: [&str; 5] = ["pub_id", "year", "journal_id", "doc_type", "categories"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FileFormat {
    Tsv,
    JsonLines,
}

impl FileFormat {
    pub fn from_path(path: &Path) -> Result<Self> {
        match path.extension().and_then(|e| e.to_str()) {
            Some("tsv") => Ok(FileFormat::Tsv),
            Some("jsonl") => Ok(FileFormat::JsonLines),
            _ => Err(Error::UnsupportedFormat(path.to_path_buf())),
        }
    }
}

/// A reference row as it appears on disk, before id resolution.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawReference {
    pub citing_id: String,
    pub cited_id: String,
}

pub fn load_corpus(
    publications: impl AsRef<Path>,
    references: impl AsRef<Path>,
    config: &CorpusConfig,
) -> Result<Corpus> {
    let pubs = read_publications(publications.as_ref(), &config.category_column)?;
    let refs = read_references(references.as_ref())?;
    Corpus::build(pubs, refs, config)
}

/// Non-empty lines of a file with their 1-based line numbers.
fn lines(path: &Path) -> Result<Vec<(u64, String)>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let line = line.trim_end_matches('\r');
        if !line.trim().is_empty() {
            out.push((i as u64 + 1, line.to_string()));
        }
    }
    Ok(out)
}

pub fn read_publications(path: &Path, category_column: &str) -> Result<Vec<Publication>> {
    match FileFormat::from_path(path)? {
        FileFormat::Tsv => read_publications_tsv(path, category_column),
        FileFormat::JsonLines => read_publications_jsonl(path, category_column),
    }
}

fn read_publications_tsv(path: &Path, category_column: &str) -> Result<Vec<Publication>> {
    let mut rows = lines(path)?.into_iter().peekable();

    // column positions: pub_id, year, journal_id, doc_type, categories
    let mut cols = [0usize, 1, 2, 3, 4];
    let mut width = PUBLICATION_COLUMNS.len();
    if let Some((line_no, header)) = rows.peek() {
        let names: Vec<&str> = header.split('\t').collect();
        if names.first() == Some(&"pub_id") {
            for (slot, wanted) in cols.iter_mut().zip(
                PUBLICATION_COLUMNS[..4]
                    .iter()
                    .copied()
                    .chain(std::iter::once(category_column)),
            ) {
                *slot = names.iter().position(|n| *n == wanted).ok_or_else(|| {
                    Error::parse(path, *line_no, format!("header lacks column `{wanted}`"))
                })?;
            }
            width = names.len();
            rows.next();
        } else if category_column != "categories" {
            return Err(Error::parse(
                path,
                *line_no,
                format!("category column `{category_column}` requires a header row"),
            ));
        }
    }

    let mut out = Vec::new();
    for (line_no, line) in rows {
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != width {
            return Err(Error::parse(
                path,
                line_no,
                format!("expected {width} tab-separated fields, found {}", fields.len()),
            ));
        }
        let year = fields[cols[1]].trim().parse::<i32>().map_err(|_| {
            Error::parse(path, line_no, format!("invalid year `{}`", fields[cols[1]]))
        })?;
        out.push(Publication {
            pub_id: fields[cols[0]].to_string(),
            year,
            journal_id: fields[cols[2]].to_string(),
            doc_type: fields[cols[3]].to_string(),
            categories: split_categories(fields[cols[4]]),
        });
    }
    Ok(out)
}

fn split_categories(field: &str) -> Vec<String> {
    if field.trim().is_empty() {
        return Vec::new();
    }
    field.split(';').map(|c| c.trim().to_string()).collect()
}

fn read_publications_jsonl(path: &Path, category_column: &str) -> Result<Vec<Publication>> {
    let mut out = Vec::new();
    for (line_no, line) in lines(path)? {
        let value: Value = serde_json::from_str(&line)
            .map_err(|e| Error::parse(path, line_no, e.to_string()))?;
        let str_field = |key: &str| -> Result<String> {
            match value.get(key) {
                Some(Value::String(s)) => Ok(s.clone()),
                _ => Err(Error::parse(path, line_no, format!("missing string field `{key}`"))),
            }
        };
        let year = value
            .get("year")
            .and_then(Value::as_i64)
            .and_then(|y| i32::try_from(y).ok())
            .ok_or_else(|| Error::parse(path, line_no, "missing integer field `year`"))?;
        let categories = match value.get(category_column) {
            Some(Value::Array(items)) => items
                .iter()
                .map(|v| {
                    v.as_str().map(str::to_string).ok_or_else(|| {
                        Error::parse(path, line_no, "category entries must be strings")
                    })
                })
                .collect::<Result<Vec<_>>>()?,
            _ => {
                return Err(Error::parse(
                    path,
                    line_no,
                    format!("missing array field `{category_column}`"),
                ))
            }
        };
        out.push(Publication {
            pub_id: str_field("pub_id")?,
            year,
            journal_id: str_field("journal_id")?,
            doc_type: str_field("doc_type")?,
            categories,
        });
    }
    Ok(out)
}

pub fn read_references(path: &Path) -> Result<Vec<RawReference>> {
    let format = FileFormat::from_path(path)?;
    let mut out = Vec::new();
    for (n, (line_no, line)) in lines(path)?.into_iter().enumerate() {
        match format {
            FileFormat::Tsv => {
                let fields: Vec<&str> = line.split('\t').collect();
                if fields.len() != 2 {
                    return Err(Error::parse(
                        path,
                        line_no,
                        format!("expected 2 tab-separated fields, found {}", fields.len()),
                    ));
                }
                if n == 0 && fields == ["citing_id", "cited_id"] {
                    continue;
                }
                if fields.iter().any(|f| f.is_empty()) {
                    return Err(Error::parse(path, line_no, "empty identifier"));
                }
                out.push(RawReference {
                    citing_id: fields[0].to_string(),
                    cited_id: fields[1].to_string(),
                });
            }
            FileFormat::JsonLines => {
                let r: RawReference = serde_json::from_str(&line)
                    .map_err(|e| Error::parse(path, line_no, e.to_string()))?;
                out.push(r);
            }
        }
    }
    Ok(out)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::io(path, e))
}

pub fn write_publications(publications: &[Publication], path: &Path) -> Result<()> {
    let format = FileFormat::from_path(path)?;
    let mut w = create(path)?;
    let io_err = |e| Error::io(PathBuf::from(path), e);
    match format {
        FileFormat::Tsv => {
            writeln!(w, "{}", PUBLICATION_COLUMNS.join("\t")).map_err(io_err)?;
            for p in publications {
                writeln!(
                    w,
                    "{}\t{}\t{}\t{}\t{}",
                    p.pub_id,
                    p.year,
                    p.journal_id,
                    p.doc_type,
                    p.categories.join(";")
                )
                .map_err(io_err)?;
            }
        }
        FileFormat::JsonLines => {
            for p in publications {
                serde_json::to_writer(&mut w, p)?;
                writeln!(w).map_err(io_err)?;
            }
        }
    }
    w.flush().map_err(io_err)
}

pub fn write_references(references: &[RawReference], path: &Path) -> Result<()> {
    let format = FileFormat::from_path(path)?;
    let mut w = create(path)?;
    let io_err = |e| Error::io(PathBuf::from(path), e);
    match format {
        FileFormat::Tsv => {
            writeln!(w, "citing_id\tcited_id").map_err(io_err)?;
            for r in references {
                writeln!(w, "{}\t{}", r.citing_id, r.cited_id).map_err(io_err)?;
            }
        }
        FileFormat::JsonLines => {
            for r in references {
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
    use std::fs;

    #[test]
    fn tsv_without_header_uses_default_order() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.tsv");
        fs::write(&path, "A\t2008\tJ1\tarticle\tX;Y\nB\t2009\tJ2\treview\tX\n").unwrap();
        let pubs = read_publications(&path, "categories").unwrap();
        assert_eq!(pubs.len(), 2);
        assert_eq!(pubs[0].categories, vec!["X", "Y"]);
        assert_eq!(pubs[1].doc_type, "review");
    }

    #[test]
    fn header_selects_alternative_category_column() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.tsv");
        fs::write(
            &path,
            "pub_id\tyear\tjournal_id\tdoc_type\tcategories\toecd\nA\t2008\tJ1\tarticle\tOncology\tMedical sciences\n",
        )
        .unwrap();
        let wos = read_publications(&path, "categories").unwrap();
        let oecd = read_publications(&path, "oecd").unwrap();
        assert_eq!(wos[0].categories, vec!["Oncology"]);
        assert_eq!(oecd[0].categories, vec!["Medical sciences"]);
    }

    #[test]
    fn malformed_row_reports_line_number() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.tsv");
        fs::write(&path, "A\t2008\tJ1\tarticle\tX\nB\tlate\tJ1\tarticle\tX\n").unwrap();
        match read_publications(&path, "categories") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }

        let refs = dir.path().join("r.tsv");
        fs::write(&refs, "citing_id\tcited_id\nA\tB\nA\n").unwrap();
        match read_references(&refs) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn jsonl_publications_parse() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.jsonl");
        fs::write(
            &path,
            r#"{"pub_id":"A","year":2008,"journal_id":"J","doc_type":"article","categories":["X","Y"]}
{"pub_id":"B","year":"2009","journal_id":"J","doc_type":"article","categories":["X"]}
"#,
        )
        .unwrap();
        match read_publications(&path, "categories") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn unknown_extension_rejected() {
        assert!(FileFormat::from_path(Path::new("x.csv")).is_err());
    }
}
