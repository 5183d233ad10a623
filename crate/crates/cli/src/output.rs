use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};

/// Float with at most 15 significant digits, shortest form.
pub fn num(v: f64) -> String {
    if !v.is_finite() {
        return v.to_string();
    }
    let rounded: f64 = format!("{v:.14e}").parse().expect("formatted float parses");
    let a = rounded.abs();
    if a == 0.0 || (1e-4..1e15).contains(&a) {
        rounded.to_string()
    } else {
        format!("{rounded:e}")
    }
}

/// A closed downstream pipe (`| head`) ends output quietly.
fn quiet_pipe(r: io::Result<()>) -> Result<()> {
    match r {
        Err(e) if e.kind() == io::ErrorKind::BrokenPipe => Ok(()),
        r => Ok(r?),
    }
}

/// CSV document: a `# config:` line, a header and rows.
pub struct Csv {
    config: String,
    header: String,
    rows: Vec<String>,
}

impl Csv {
    pub fn new(config: &serde_json::Value, columns: &[&str]) -> Self {
        Self { config: config.to_string(), header: columns.join(","), rows: Vec::new() }
    }

    pub fn row(&mut self, fields: &[String]) {
        self.rows.push(fields.join(","));
    }

    fn write_to(&self, w: &mut dyn Write) -> io::Result<()> {
        writeln!(w, "# config: {}", self.config)?;
        writeln!(w, "{}", self.header)?;
        for r in &self.rows {
            writeln!(w, "{r}")?;
        }
        Ok(())
    }

    /// Writes to `out`, or stdout when `out` is `None`.
    pub fn emit(&self, out: Option<&Path>) -> Result<()> {
        match out {
            Some(p) => write_atomic(p, |w| self.write_to(w)),
            None => {
                let mut lock = io::stdout().lock();
                quiet_pipe(self.write_to(&mut lock).and_then(|_| lock.flush()))
            }
        }
    }
}

fn temp_path(p: &Path) -> PathBuf {
    let mut name = p.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(format!(".tmp{}", std::process::id()));
    p.with_file_name(name)
}

/// Writes through a temporary sibling file and renames it into place; the
/// temporary is removed if anything fails.
pub fn write_atomic(p: &Path, body: impl FnOnce(&mut dyn Write) -> io::Result<()>) -> Result<()> {
    let tmp = temp_path(p);
    let result = (|| -> Result<()> {
        let mut w = BufWriter::new(File::create(&tmp).with_context(|| format!("creating {}", tmp.display()))?);
        body(&mut w)?;
        w.into_inner().map_err(|e| e.into_error())?.sync_all()?;
        fs::rename(&tmp, p).with_context(|| format!("renaming into {}", p.display()))?;
        Ok(())
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result
}

pub fn print_json(v: &serde_json::Value) -> Result<()> {
    let text = serde_json::to_string_pretty(v)?;
    let mut lock = io::stdout().lock();
    quiet_pipe(writeln!(lock, "{text}").and_then(|_| lock.flush()))
}
