//! Ingestion and validation of observed choice-proportion datasets.
//!
//! The on-disk format is a UTF-8 CSV with header
//! `word_class,cue,probe,proportion`, exactly 64 data rows covering the
//! full word-class x cue x probe design, values in `[0, 1]`, and comment
//! lines starting with `#`. A trailing unpacking-factor section in the
//! shape emitted by `qem predict` (`word_class,cue,UF` plus 16 rows) is
//! recognized and ignored, so prediction output can be re-ingested as a
//! synthetic dataset.

use std::io::Read;

use thiserror::Error;

use crate::model::{Cue, Probe, WordClass};

#[derive(Debug, Error)]
pub enum DataError {
    #[error("cannot read dataset: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("line {line}: expected 4 comma-separated fields, found {count}")]
    WrongFieldCount { line: u64, count: usize },
    #[error("line {line}: unknown {column} token {token:?}")]
    UnknownToken {
        line: u64,
        column: &'static str,
        token: String,
    },
    #[error("line {line}: proportion {token:?} is not a number")]
    InvalidProportion { line: u64, token: String },
    #[error("line {line}: proportion {value} out of range [0, 1]")]
    OutOfRange { line: u64, value: f64 },
    #[error("line {line}: duplicate cell ({class}, {cue}, {probe})")]
    DuplicateCell {
        line: u64,
        class: WordClass,
        cue: Cue,
        probe: Probe,
    },
    #[error("missing cell ({class}, {cue}, {probe}): expected all 64 design rows")]
    MissingCell {
        class: WordClass,
        cue: Cue,
        probe: Probe,
    },
    #[error("line {line}: sample_size {token:?} is not a positive integer")]
    InvalidSampleSize { line: u64, token: String },
}

/// Observed acceptance proportions over the full 4 x 4 x 4 design.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservedDataset {
    proportions: [[[f64; 4]; 4]; 4],
    /// Number of participants, when the file declares it via a
    /// `# sample_size: N` comment. Informational only.
    pub sample_size: Option<u32>,
}

impl ObservedDataset {
    pub fn proportion(&self, class: WordClass, cue: Cue, probe: Probe) -> f64 {
        self.proportions[class as usize][cue as usize][probe as usize]
    }

    /// Builds a dataset directly from a full probability table, for
    /// synthetic-data fitting.
    pub fn from_cells(cells: impl IntoIterator<Item = (WordClass, Cue, Probe, f64)>) -> Self {
        let mut proportions = [[[f64::NAN; 4]; 4]; 4];
        for (class, cue, probe, value) in cells {
            proportions[class as usize][cue as usize][probe as usize] = value;
        }
        let filled = proportions.iter().flatten().flatten().all(|v| v.is_finite());
        assert!(filled, "from_cells requires all 64 design cells");
        ObservedDataset {
            proportions,
            sample_size: None,
        }
    }
}

/// Marker row that starts the ignorable unpacking-factor trailer.
const UF_SECTION_HEADER: [&str; 3] = ["word_class", "cue", "UF"];

/// Parses and validates an observations CSV.
///
/// Errors carry the 1-based line number of the offending row where one
/// exists; completeness violations name the missing design cell instead.
pub fn load_observations<R: Read>(mut source: R) -> Result<ObservedDataset, DataError> {
    let mut text = String::new();
    source.read_to_string(&mut text)?;

    let sample_size = scan_sample_size(&text)?;

    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .has_headers(true)
        .flexible(true)
        .from_reader(text.as_bytes());

    let mut proportions = [[[f64::NAN; 4]; 4]; 4];
    let mut seen = [[[false; 4]; 4]; 4];

    for record in reader.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        if record.iter().eq(UF_SECTION_HEADER) {
            break;
        }
        if record.len() != 4 {
            return Err(DataError::WrongFieldCount {
                line,
                count: record.len(),
            });
        }
        let class: WordClass = parse_token(&record[0], "word_class", line)?;
        let cue: Cue = parse_token(&record[1], "cue", line)?;
        let probe: Probe = parse_token(&record[2], "probe", line)?;
        let raw = record[3].trim();
        let value: f64 = raw.parse().map_err(|_| DataError::InvalidProportion {
            line,
            token: raw.to_string(),
        })?;
        if !(0.0..=1.0).contains(&value) {
            return Err(DataError::OutOfRange { line, value });
        }
        let slot = &mut seen[class as usize][cue as usize][probe as usize];
        if *slot {
            return Err(DataError::DuplicateCell {
                line,
                class,
                cue,
                probe,
            });
        }
        *slot = true;
        proportions[class as usize][cue as usize][probe as usize] = value;
    }

    for &class in &WordClass::ALL {
        for &cue in &Cue::ALL {
            for &probe in &Probe::ALL {
                if !seen[class as usize][cue as usize][probe as usize] {
                    return Err(DataError::MissingCell { class, cue, probe });
                }
            }
        }
    }

    Ok(ObservedDataset {
        proportions,
        sample_size,
    })
}

fn parse_token<T: std::str::FromStr>(
    raw: &str,
    column: &'static str,
    line: u64,
) -> Result<T, DataError> {
    raw.trim().parse().map_err(|_| DataError::UnknownToken {
        line,
        column,
        token: raw.trim().to_string(),
    })
}

fn scan_sample_size(text: &str) -> Result<Option<u32>, DataError> {
    for (idx, raw_line) in text.lines().enumerate() {
        let Some(comment) = raw_line.trim_start().strip_prefix('#') else {
            continue;
        };
        let comment = comment.trim();
        let Some(rest) = comment.strip_prefix("sample_size") else {
            continue;
        };
        let token = rest.trim_start_matches([':', '=']).trim();
        let line = idx as u64 + 1;
        return match token.parse::<u32>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(DataError::InvalidSampleSize {
                line,
                token: token.to_string(),
            }),
        };
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn full_csv() -> String {
        let mut s = String::from("# sample_size: 70\nword_class,cue,probe,proportion\n");
        for &class in &WordClass::ALL {
            for &cue in &Cue::ALL {
                for &probe in &Probe::ALL {
                    s.push_str(&format!("{class},{cue},{probe},0.25\n"));
                }
            }
        }
        s
    }

    #[test]
    fn loads_complete_dataset() {
        let obs = load_observations(full_csv().as_bytes()).unwrap();
        assert_eq!(obs.sample_size, Some(70));
        assert_eq!(obs.proportion(WordClass::Lfa, Cue::L4, Probe::L123), 0.25);
    }

    #[test]
    fn missing_row_names_the_cell() {
        let mut csv = full_csv();
        let cut = csv.rfind("LFA,L4,L123").unwrap();
        csv.truncate(cut);
        let err = load_observations(csv.as_bytes()).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("missing cell"), "{msg}");
        assert!(msg.contains("LFA, L4, L123"), "{msg}");
    }

    #[test]
    fn out_of_range_value_names_the_line() {
        let csv = full_csv().replace("HFA,L2,L3,0.25", "HFA,L2,L3,1.2");
        let err = load_observations(csv.as_bytes()).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("out of range"), "{msg}");
        // 2 leading lines, then HFA block starts after HFC's 16 rows.
        assert!(matches!(err, DataError::OutOfRange { line, .. } if line > 2));
    }

    #[test]
    fn duplicate_cell_is_rejected() {
        let csv = full_csv().replace("HFC,L1,L2,0.25", "HFC,L1,L1,0.25");
        let err = load_observations(csv.as_bytes()).unwrap_err();
        assert!(err.to_string().contains("duplicate cell"), "{err}");
    }

    #[test]
    fn unknown_token_is_rejected_with_line() {
        let csv = full_csv().replace("LFC,L3,L1,0.25", "LXC,L3,L1,0.25");
        let err = load_observations(csv.as_bytes()).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("unknown word_class token"), "{msg}");
        assert!(msg.contains("LXC"), "{msg}");
    }

    #[test]
    fn non_numeric_proportion_is_rejected() {
        let csv = full_csv().replace("HFC,L4,L123,0.25", "HFC,L4,L123,high");
        let err = load_observations(csv.as_bytes()).unwrap_err();
        assert!(err.to_string().contains("is not a number"), "{err}");
    }

    #[test]
    fn tolerates_uf_trailer_from_predict_output() {
        let mut csv = full_csv();
        csv.push_str("word_class,cue,UF\nHFC,L1,1.500000\n");
        let obs = load_observations(csv.as_bytes()).unwrap();
        assert_eq!(obs.proportion(WordClass::Hfc, Cue::L1, Probe::L1), 0.25);
    }

    #[test]
    fn bad_sample_size_is_rejected() {
        let csv = full_csv().replace("# sample_size: 70", "# sample_size: zero");
        let err = load_observations(csv.as_bytes()).unwrap_err();
        assert!(matches!(err, DataError::InvalidSampleSize { line: 1, .. }), "{err}");
    }
}
