//! File formats: the interaction CSV, the summary JSON/CSV and trajectory CSVs.
//!
//! Interaction rows carry
//! `repetition,index_a,index_b,name_a,name_b,actions_a,actions_b,score_a,score_b`
//! with actions spelled over `{C, D}` and scores in their shortest decimal
//! form. Lines end with LF; fields are quoted only when they contain a comma
//! or quote (transformed names such as `Initial(DD,Tit For Tat)` do).

use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::engine::MatchRecord;
use crate::game::{actions_to_string, parse_actions};
use crate::results::{emit_boxplot_data, morality_metrics, FiveNumber, Morality, ResultSet};
use crate::seeding::derive_match_seed;
use crate::tournament::{ArchiveEntry, InteractionArchive};

pub const INTERACTIONS_HEADER: [&str; 9] =
    ["repetition", "index_a", "index_b", "name_a", "name_b", "actions_a", "actions_b", "score_a", "score_b"];

#[derive(Debug, Error)]
pub enum ExportError {
    #[error("i/o failure: {0}")]
    Io(#[from] io::Error),
    #[error("csv failure: {0}")]
    Csv(#[from] csv::Error),
    #[error("json failure: {0}")]
    Json(#[from] serde_json::Error),
    #[error("record {record}: {message}")]
    Malformed { record: u64, message: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    #[default]
    Json,
}

impl FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format {other:?} (expected csv or json)")),
        }
    }
}

fn csv_writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w)
}

pub fn write_interactions<W: Write>(archive: &InteractionArchive, w: W) -> Result<(), ExportError> {
    let mut out = csv_writer(w);
    out.write_record(INTERACTIONS_HEADER)?;
    let name = |i: usize| archive.names.get(i).map(String::as_str).unwrap_or("");
    for e in &archive.entries {
        out.write_record([
            e.repetition.to_string(),
            e.a.to_string(),
            e.b.to_string(),
            name(e.a).to_owned(),
            name(e.b).to_owned(),
            actions_to_string(&e.record.actions_a),
            actions_to_string(&e.record.actions_b),
            e.record.score_a.to_string(),
            e.record.score_b.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_interactions_file(archive: &InteractionArchive, path: &Path) -> Result<(), ExportError> {
    write_interactions(archive, BufWriter::new(File::create(path)?))
}

/// Reads an interaction CSV. Match seeds are not stored in the file and are
/// re-derived from `master_seed`; names come from the rows, so a player that
/// appears in no row is not recovered.
pub fn read_interactions<R: Read>(r: R, master_seed: u64) -> Result<InteractionArchive, ExportError> {
    let mut reader = csv::ReaderBuilder::new().from_reader(r);
    let headers = reader.headers()?.clone();
    if headers.iter().ne(INTERACTIONS_HEADER) {
        return Err(ExportError::Malformed { record: 0, message: format!("unexpected header {headers:?}") });
    }
    let mut names: Vec<Option<String>> = Vec::new();
    let mut entries = Vec::new();
    for (k, row) in reader.records().enumerate() {
        let row = row?;
        let record = k as u64 + 1;
        let bad = |message: String| ExportError::Malformed { record, message };
        let field = |i: usize| row.get(i).ok_or_else(|| bad(format!("missing field {}", INTERACTIONS_HEADER[i])));
        let int = |i: usize| -> Result<usize, ExportError> {
            field(i)?.parse().map_err(|_| bad(format!("{} is not an integer", INTERACTIONS_HEADER[i])))
        };
        let float = |i: usize| -> Result<f64, ExportError> {
            field(i)?.parse().map_err(|_| bad(format!("{} is not a number", INTERACTIONS_HEADER[i])))
        };
        let acts = |i: usize| parse_actions(field(i)?).ok_or_else(|| bad("actions must be C/D strings".into()));

        let (repetition, a, b) = (int(0)?, int(1)?, int(2)?);
        let (actions_a, actions_b) = (acts(5)?, acts(6)?);
        if actions_a.len() != actions_b.len() || actions_a.is_empty() {
            return Err(bad("action sequences must be non-empty and of equal length".into()));
        }
        for (idx, col) in [(a, 3), (b, 4)] {
            if names.len() <= idx {
                names.resize(idx + 1, None);
            }
            names[idx].get_or_insert_with(|| row[col].to_owned());
        }
        entries.push(ArchiveEntry {
            repetition,
            a,
            b,
            record: MatchRecord {
                actions_a,
                actions_b,
                score_a: float(7)?,
                score_b: float(8)?,
                seed: derive_match_seed(master_seed, a, b, repetition),
            },
        });
    }
    let names = names.into_iter().map(Option::unwrap_or_default).collect();
    Ok(InteractionArchive::new(names, entries))
}

#[derive(Serialize)]
struct BoxplotRow<'a> {
    name: &'a str,
    #[serde(flatten)]
    summary: Option<FiveNumber>,
}

#[derive(Serialize)]
struct MoralityRow<'a> {
    name: &'a str,
    #[serde(flatten)]
    metrics: Morality,
}

/// Summary document; field order is the serialized key order.
#[derive(Serialize)]
struct Summary<'a> {
    names: &'a [String],
    ranking: Vec<&'a str>,
    median_normalized_scores: Vec<Option<f64>>,
    wins: &'a [Vec<u32>],
    payoff_matrix: &'a [Vec<Option<f64>>],
    cooperation_rates: &'a [Vec<Option<f64>>],
    morality: Vec<MoralityRow<'a>>,
    boxplot: Vec<BoxplotRow<'a>>,
}

fn summary(rs: &ResultSet) -> Summary<'_> {
    Summary {
        names: &rs.names,
        ranking: rs.ranking.iter().map(|&i| rs.names[i].as_str()).collect(),
        median_normalized_scores: rs.median_normalized_scores(),
        wins: &rs.wins,
        payoff_matrix: &rs.payoff_matrix,
        cooperation_rates: &rs.cooperation_rates,
        morality: rs
            .names
            .iter()
            .zip(morality_metrics(rs))
            .map(|(name, metrics)| MoralityRow { name, metrics })
            .collect(),
        boxplot: rs
            .names
            .iter()
            .zip(emit_boxplot_data(rs))
            .map(|(name, summary)| BoxplotRow { name, summary })
            .collect(),
    }
}

/// The summary as a JSON string (pretty-printed, trailing newline).
pub fn summary_json(rs: &ResultSet) -> Result<String, ExportError> {
    let mut s = serde_json::to_string_pretty(&summary(rs))?;
    s.push('\n');
    Ok(s)
}

/// Writes the summary. JSON carries every metric; CSV is a flat ranking table
/// `rank,name,median_normalized_score,total_wins,cooperation_rating,good_partner_rating`.
pub fn write_summary<W: Write>(rs: &ResultSet, mut w: W, format: Format) -> Result<(), ExportError> {
    match format {
        Format::Json => {
            w.write_all(summary_json(rs)?.as_bytes())?;
            w.flush()?;
        }
        Format::Csv => {
            let medians = rs.median_normalized_scores();
            let wins = rs.total_wins();
            let morality = morality_metrics(rs);
            let mut out = csv_writer(w);
            out.write_record([
                "rank",
                "name",
                "median_normalized_score",
                "total_wins",
                "cooperation_rating",
                "good_partner_rating",
            ])?;
            for (rank, &i) in rs.ranking.iter().enumerate() {
                out.write_record([
                    (rank + 1).to_string(),
                    rs.names[i].clone(),
                    medians[i].map(|m| m.to_string()).unwrap_or_default(),
                    wins[i].to_string(),
                    morality[i].cooperation_rating.to_string(),
                    morality[i].good_partner_rating.to_string(),
                ])?;
            }
            out.flush()?;
        }
    }
    Ok(())
}

pub fn write_summary_file(rs: &ResultSet, path: &Path, format: Format) -> Result<(), ExportError> {
    write_summary(rs, BufWriter::new(File::create(path)?), format)
}

/// One row per generation: `generation,<name>...` with a count or share per strategy.
pub fn write_trajectory<W: Write, T: ToString>(names: &[String], rows: &[Vec<T>], w: W) -> Result<(), ExportError> {
    let mut out = csv_writer(w);
    out.write_record(std::iter::once("generation").chain(names.iter().map(String::as_str)))?;
    for (generation, row) in rows.iter().enumerate() {
        out.write_record(std::iter::once(generation.to_string()).chain(row.iter().map(ToString::to_string)))?;
    }
    out.flush()?;
    Ok(())
}
