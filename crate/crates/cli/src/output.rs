//! Buffered data output in JSON, CSV or plain text.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

/// Collects the whole data output and writes it once, so a failed run leaves no partial file.
pub struct Sink {
    format: Option<Format>,
    path: Option<PathBuf>,
    buf: Vec<u8>,
}

/// Shortest decimal that round-trips to the same double.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}

impl Sink {
    pub fn new(format: Option<Format>, path: Option<&Path>) -> Result<Self> {
        Ok(Self { format, path: path.map(Path::to_path_buf), buf: Vec::new() })
    }

    pub fn format(&self) -> Option<Format> {
        self.format
    }

    pub fn format_or(&self, default: Format) -> Format {
        self.format.unwrap_or(default)
    }

    pub fn record<T: Serialize>(&mut self, value: &T, default: Format) -> Result<()> {
        match self.format_or(default) {
            Format::Json => self.json(value),
            Format::Csv => self.rows(std::slice::from_ref(value), Format::Csv),
        }
    }

    pub fn rows<T: Serialize>(&mut self, rows: &[T], default: Format) -> Result<()> {
        match self.format_or(default) {
            Format::Json => self.json(&rows),
            Format::Csv => {
                let mut w = csv::Writer::from_writer(&mut self.buf);
                for r in rows {
                    w.serialize(r).context("value has no flat CSV form; use --json")?;
                }
                w.flush()?;
                Ok(())
            }
        }
    }

    pub fn raw_rows(&mut self, rows: &[Vec<String>]) -> Result<()> {
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(&mut self.buf);
        for r in rows {
            w.write_record(r)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn text(&mut self, s: &str) -> Result<()> {
        self.buf.extend_from_slice(s.as_bytes());
        Ok(())
    }

    fn json<T: Serialize + ?Sized>(&mut self, value: &T) -> Result<()> {
        serde_json::to_writer_pretty(&mut self.buf, value)?;
        self.buf.push(b'\n');
        Ok(())
    }

    pub fn finish(self) -> Result<()> {
        match &self.path {
            Some(p) => fs::write(p, &self.buf).with_context(|| format!("cannot write {}", p.display())),
            None => {
                let mut out = io::stdout().lock();
                out.write_all(&self.buf)?;
                out.flush()?;
                Ok(())
            }
        }
    }
}
