use std::fs;
use std::io::Write;

use qudit_optics::Error;
use serde::Serialize;
use serde_json::Value;

use crate::{Format, GlobalArgs};

/// Process exit codes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExitClass {
    Io = 1,
    Parse = 2,
    Cap = 3,
    Convergence = 4,
    Verification = 5,
}

#[derive(Debug)]
pub struct Failure {
    pub code: ExitClass,
    pub message: String,
}

impl Failure {
    pub fn new(code: ExitClass, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Io(_) => ExitClass::Io,
            Error::SizeCap { .. } => ExitClass::Cap,
            Error::Verification(_) => ExitClass::Verification,
            _ => ExitClass::Parse,
        };
        Self::new(code, e.to_string())
    }
}

pub type CmdResult<T> = Result<T, Failure>;

/// A finished run: the document plus an optional failure to report after
/// it has been written.
pub type Outcome = (Document, Option<Failure>);

pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

pub struct Document {
    pub command: &'static str,
    pub config: Value,
    pub result: Value,
    pub table: Option<Table>,
    pub default_format: Format,
}

impl Document {
    pub fn new(command: &'static str, config: &impl Serialize, result: &impl Serialize) -> CmdResult<Self> {
        let to_value = |v: serde_json::Result<Value>| v.map_err(|e| Failure::new(ExitClass::Parse, e.to_string()));
        Ok(Self {
            command,
            config: to_value(serde_json::to_value(config))?,
            result: to_value(serde_json::to_value(result))?,
            table: None,
            default_format: Format::Json,
        })
    }

    pub fn with_table(mut self, header: &[&str], rows: Vec<Vec<String>>) -> Self {
        self.table = Some(Table {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows,
        });
        self
    }

    pub fn csv_by_default(mut self) -> Self {
        self.default_format = Format::Csv;
        self
    }
}

fn render(doc: &Document, format: Format) -> CmdResult<String> {
    match format {
        Format::Json => {
            let v = serde_json::json!({
                "tool": "qudit-optics",
                "version": env!("CARGO_PKG_VERSION"),
                "command": doc.command,
                "config": doc.config,
                "result": doc.result,
            });
            let mut s = serde_json::to_string_pretty(&v)
                .map_err(|e| Failure::new(ExitClass::Parse, e.to_string()))?;
            s.push('\n');
            Ok(s)
        }
        Format::Csv => {
            let table = doc.table.as_ref().ok_or_else(|| {
                Failure::new(ExitClass::Parse, format!("`{}` has no csv form", doc.command))
            })?;
            let mut w = csv::Writer::from_writer(Vec::new());
            let io = |e: csv::Error| Failure::new(ExitClass::Io, e.to_string());
            w.write_record(&table.header).map_err(io)?;
            for r in &table.rows {
                w.write_record(r).map_err(io)?;
            }
            let bytes = w
                .into_inner()
                .map_err(|e| Failure::new(ExitClass::Io, e.to_string()))?;
            String::from_utf8(bytes).map_err(|e| Failure::new(ExitClass::Io, e.to_string()))
        }
    }
}

pub fn emit(doc: &Document, g: &GlobalArgs) -> CmdResult<()> {
    let text = render(doc, g.format.unwrap_or(doc.default_format))?;
    let io = |e: std::io::Error| Failure::new(ExitClass::Io, e.to_string());
    match &g.output {
        Some(path) => fs::write(path, text).map_err(io),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(io),
    }
}

pub fn read_file(path: &std::path::Path) -> CmdResult<String> {
    fs::read_to_string(path)
        .map_err(|e| Failure::new(ExitClass::Io, format!("{}: {e}", path.display())))
}
