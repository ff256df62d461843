use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use damix::diagnostics::Trace;
use damix::io::{sidecar_path, write_json, write_trace};
use serde::Serialize;

use crate::error::CliError;

/// Sidecar written next to every non-trace artifact.
#[derive(Debug, Serialize)]
struct ArtifactMeta<'a> {
    command: &'a str,
    file: String,
    seed: u64,
    config_hash: &'a str,
}

/// Files written by one run, removed again if the run fails.
pub struct Outputs {
    dir: PathBuf,
    command: String,
    seed: u64,
    hash: String,
    created: Vec<PathBuf>,
    created_dir: bool,
}

impl Outputs {
    pub fn new(dir: &Path, command: &str, seed: u64, hash: String) -> Result<Self, CliError> {
        let created_dir = !dir.exists();
        fs::create_dir_all(dir).map_err(|e| CliError::Config(format!("cannot create {}: {e}", dir.display())))?;
        Ok(Self { dir: dir.to_path_buf(), command: command.into(), seed, hash, created: Vec::new(), created_dir })
    }

    pub fn hash(&self) -> &str {
        &self.hash
    }

    fn path(&mut self, name: &str) -> PathBuf {
        let p = self.dir.join(name);
        self.created.push(p.clone());
        p
    }

    fn meta(&mut self, path: &Path) -> Result<(), CliError> {
        let side = sidecar_path(path);
        self.created.push(side.clone());
        let meta = ArtifactMeta {
            command: &self.command,
            file: path.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default(),
            seed: self.seed,
            config_hash: &self.hash,
        };
        write_json(&side, &meta)?;
        Ok(())
    }

    /// Writes `name` through `body`, then its sidecar.
    pub fn write_with<F>(&mut self, name: &str, body: F) -> Result<PathBuf, CliError>
    where
        F: FnOnce(&mut dyn Write) -> Result<(), CliError>,
    {
        let path = self.path(name);
        let mut w = BufWriter::new(fs::File::create(&path)?);
        body(&mut w)?;
        w.flush()?;
        self.meta(&path)?;
        Ok(path)
    }

    pub fn write_text(&mut self, name: &str, contents: &str) -> Result<PathBuf, CliError> {
        self.write_with(name, |w| Ok(w.write_all(contents.as_bytes())?))
    }

    pub fn write_json<T: Serialize + ?Sized>(&mut self, name: &str, value: &T) -> Result<PathBuf, CliError> {
        self.write_with(name, |w| {
            serde_json::to_writer_pretty(&mut *w, value).map_err(|e| CliError::Config(e.to_string()))?;
            Ok(writeln!(w)?)
        })
    }

    /// Trace CSV plus the trace sidecar, which carries the config hash.
    pub fn write_trace(&mut self, name: &str, trace: &Trace) -> Result<PathBuf, CliError> {
        let path = self.path(name);
        self.created.push(sidecar_path(&path));
        write_trace(&path, trace, Some(&self.hash))?;
        Ok(path)
    }

    /// Keeps everything written so far.
    pub fn commit(mut self) -> Vec<PathBuf> {
        self.created_dir = false;
        std::mem::take(&mut self.created)
    }
}

impl Drop for Outputs {
    fn drop(&mut self) {
        for p in &self.created {
            let _ = fs::remove_file(p);
        }
        if self.created_dir {
            let _ = fs::remove_dir(&self.dir);
        }
    }
}
