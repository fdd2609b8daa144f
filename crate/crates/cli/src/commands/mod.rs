use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use inh_fr3::records::{read_observations, Format, Observation};

use crate::cli::FormatArg;
use crate::error::{CliError, CliResult};

pub mod fit;
pub mod generate;
pub mod plotdata;
pub mod tables;
pub mod validate;

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Jsonl => Format::Jsonl,
        }
    }
}

/// Explicit format, else `.jsonl`/`.json` extension, else CSV.
pub fn resolve_format(explicit: Option<FormatArg>, path: Option<&Path>) -> Format {
    if let Some(f) = explicit {
        return f.into();
    }
    match path.and_then(|p| p.extension()).and_then(|e| e.to_str()) {
        Some("jsonl" | "json") => Format::Jsonl,
        _ => Format::Csv,
    }
}

/// Buffered sink for a file path or stdout, remembering its name for errors.
pub struct Output {
    name: PathBuf,
    inner: Box<dyn Write>,
}

impl Output {
    pub fn open(path: Option<&Path>) -> CliResult<Self> {
        match path {
            Some(p) => {
                let f = File::create(p).map_err(|e| CliError::io(p, e))?;
                Ok(Output { name: p.to_path_buf(), inner: Box::new(BufWriter::new(f)) })
            }
            None => Ok(Output { name: "<stdout>".into(), inner: Box::new(BufWriter::new(io::stdout().lock())) }),
        }
    }

    pub fn line(&mut self, text: &str) -> CliResult<()> {
        writeln!(self.inner, "{text}").map_err(|e| CliError::io(&self.name, e))
    }

    pub fn writer(&mut self) -> &mut dyn Write {
        &mut self.inner
    }

    pub fn name(&self) -> &Path {
        &self.name
    }

    pub fn finish(mut self) -> CliResult<()> {
        self.inner.flush().map_err(|e| CliError::io(&self.name, e))
    }
}

pub fn read_input(path: Option<&Path>, format: Option<FormatArg>) -> CliResult<Vec<Observation>> {
    let path = path.ok_or_else(|| CliError::Usage("an input file is required".into()))?;
    let f = File::open(path).map_err(|e| CliError::io(path, e))?;
    let fmt = resolve_format(format, Some(path));
    read_observations(BufReader::new(f), fmt).map_err(|e| match e {
        inh_fr3::Error::Io(io) => CliError::io(path, io),
        other => CliError::Usage(format!("{}: {other}", path.display())),
    })
}
