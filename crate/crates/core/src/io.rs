//! File formats: network lists (JSON), evaluation results and error
//! surfaces (CSV), and study reports (JSON).
//!
//! Every floating-point value is written in scientific notation with 17
//! significant digits, which round-trips any `f64` exactly.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};
use thiserror::Error;

use crate::engine::RuleSet;
use crate::study::{EvaluationRecord, StudyReport, SurfacePoint};
use crate::table::JointTable;

pub const NETWORK_FORMAT: &str = "prospector-networks/1";

#[derive(Debug, Error)]
pub enum FileError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("unsupported network file format `{0}`")]
    Format(String),
}

/// `f64` in the 17-significant-digit file representation.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Pretty JSON whose floats are written with [`fmt17`].
struct Sci17Formatter<'a>(PrettyFormatter<'a>);

impl Formatter for Sci17Formatter<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(fmt17(value).as_bytes())
    }

    fn begin_array<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.begin_array(writer)
    }

    fn end_array<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_array(writer)
    }

    fn begin_array_value<W: ?Sized + Write>(&mut self, writer: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(writer, first)
    }

    fn end_array_value<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_array_value(writer)
    }

    fn begin_object<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.begin_object(writer)
    }

    fn end_object<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_object(writer)
    }

    fn begin_object_key<W: ?Sized + Write>(&mut self, writer: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(writer, first)
    }

    fn begin_object_value<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.begin_object_value(writer)
    }

    fn end_object_value<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_object_value(writer)
    }
}

/// Serializes any value as pretty JSON with 17-digit floats.
pub fn to_json_writer<W: Write, T: Serialize + ?Sized>(writer: W, value: &T) -> Result<(), FileError> {
    let mut ser = serde_json::Serializer::with_formatter(writer, Sci17Formatter(PrettyFormatter::new()));
    value.serialize(&mut ser)?;
    let mut w = ser.into_inner();
    w.write_all(b"\n")?;
    Ok(())
}

pub fn to_json_string<T: Serialize + ?Sized>(value: &T) -> Result<String, FileError> {
    let mut buf = Vec::new();
    to_json_writer(&mut buf, value)?;
    Ok(String::from_utf8(buf).expect("serde_json emits UTF-8"))
}

#[derive(Serialize)]
struct NetworkFileOut<'a> {
    format: &'static str,
    networks: &'a [JointTable],
}

#[derive(Deserialize)]
struct NetworkFileIn {
    format: String,
    networks: Vec<JointTable>,
}

pub fn write_networks<W: Write>(writer: W, networks: &[JointTable]) -> Result<(), FileError> {
    to_json_writer(
        writer,
        &NetworkFileOut {
            format: NETWORK_FORMAT,
            networks,
        },
    )
}

/// Parses a network file; each table is validated on the way in.
pub fn read_networks<R: Read>(reader: R) -> Result<Vec<JointTable>, FileError> {
    let file: NetworkFileIn = serde_json::from_reader(reader)?;
    if file.format != NETWORK_FORMAT {
        return Err(FileError::Format(file.format));
    }
    Ok(file.networks)
}

pub fn save_networks(path: &Path, networks: &[JointTable]) -> Result<(), FileError> {
    let mut w = BufWriter::new(File::create(path)?);
    write_networks(&mut w, networks)?;
    w.flush()?;
    Ok(())
}

pub fn load_networks(path: &Path) -> Result<Vec<JointTable>, FileError> {
    read_networks(BufReader::new(File::open(path)?))
}

pub const RESULTS_HEADER: [&str; 13] = [
    "network",
    "kind",
    "pattern",
    "p_new_e1",
    "p_new_e2",
    "conjunctive",
    "disjunctive",
    "independent",
    "correct",
    "error_conjunctive",
    "error_disjunctive",
    "error_independent",
    "failure",
];

/// One CSV row per record; failed records leave the numeric answer
/// columns empty and carry the message in `failure`.
pub fn write_results<W: Write>(writer: W, records: &[EvaluationRecord]) -> Result<(), FileError> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(RESULTS_HEADER)?;
    for r in records {
        let mut row = vec![
            r.network.clone(),
            r.kind.to_string(),
            r.pattern.name().to_string(),
            fmt17(r.update.e1()),
            fmt17(r.update.e2()),
        ];
        match &r.outcome {
            Ok(o) => {
                row.extend(RuleSet::ALL.iter().map(|&rule| fmt17(o.prospector.get(rule))));
                row.push(fmt17(o.correct));
                row.extend(RuleSet::ALL.iter().map(|&rule| fmt17(o.signed_error(rule))));
                row.push(String::new());
            }
            Err(message) => {
                row.extend(std::iter::repeat_n(String::new(), 7));
                row.push(message.clone());
            }
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_surface<W: Write>(writer: W, points: &[SurfacePoint]) -> Result<(), FileError> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["p_new_e1", "p_new_e2", "signed_error"])?;
    for p in points {
        w.write_record([fmt17(p.e1), fmt17(p.e2), fmt17(p.signed_error)])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_report<W: Write>(writer: W, report: &StudyReport) -> Result<(), FileError> {
    to_json_writer(writer, report)
}
