use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::Serialize;

use crate::failure::Failure;

/// Files produced by one command, held in memory until the run succeeds.
#[derive(Default)]
pub struct Artifacts {
    files: Vec<(String, Vec<u8>)>,
}

impl Artifacts {
    pub fn text(&mut self, name: &str, body: String) {
        self.files.push((name.to_string(), body.into_bytes()));
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), Failure> {
        let mut body = serde_json::to_string_pretty(value)
            .map_err(|e| Failure::Invalid(format!("cannot encode {name}: {e}")))?;
        body.push('\n');
        self.text(name, body);
        Ok(())
    }

    /// Writes into a sibling staging directory, then moves each file into `out`.
    pub fn commit(self, out: &Path) -> Result<(), Failure> {
        let io = |e: std::io::Error, p: &Path| Failure::Io(format!("{}: {e}", p.display()));
        let parent = match out.parent() {
            Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
            _ => PathBuf::from("."),
        };
        let name = out
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_else(|| "out".into());
        let staging = parent.join(format!(".{name}.staging-{}", std::process::id()));
        fs::create_dir_all(&staging).map_err(|e| io(e, &staging))?;
        let staged = self.files.iter().try_for_each(|(file, bytes)| {
            let p = staging.join(file);
            fs::write(&p, bytes).map_err(|e| io(e, &p))
        });
        let moved = staged.and_then(|_| {
            fs::create_dir_all(out).map_err(|e| io(e, out))?;
            self.files.iter().try_for_each(|(file, _)| {
                let to = out.join(file);
                fs::rename(staging.join(file), &to).map_err(|e| io(e, &to))
            })
        });
        let _ = fs::remove_dir_all(&staging);
        moved
    }
}

pub fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

pub fn pairs(zs: &[Complex64]) -> Vec<[f64; 2]> {
    zs.iter().copied().map(pair).collect()
}
