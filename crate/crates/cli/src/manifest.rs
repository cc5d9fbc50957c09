use std::fs;
use std::path::Path;

use sha2::{Digest, Sha256};
use xlembed::Error;

/// `key=value` record of one run: resolved settings and input checksums.
/// No timestamps or host data, so equal runs give equal manifests.
#[derive(Debug, Default)]
pub struct Manifest {
    lines: Vec<(String, String)>,
}

impl Manifest {
    pub fn new(command: &str) -> Self {
        let mut m = Self::default();
        m.set("command", command);
        m.set("version", env!("CARGO_PKG_VERSION"));
        m
    }

    pub fn set(&mut self, key: &str, value: impl ToString) {
        self.lines.push((key.to_string(), value.to_string()));
    }

    /// Records the path and SHA-256 of an input file.
    pub fn input(&mut self, name: &str, path: &Path) -> Result<(), Error> {
        let bytes = fs::read(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        self.set(&format!("input.{name}"), path.display());
        self.set(&format!("sha256.{name}"), hex::encode(Sha256::digest(&bytes)));
        Ok(())
    }

    pub fn render(&self) -> String {
        self.lines.iter().map(|(k, v)| format!("{k}={v}\n")).collect()
    }

    pub fn write(&self, path: &Path) -> Result<(), Error> {
        fs::write(path, self.render()).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn checksum_of_known_bytes() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("x.txt");
        fs::write(&p, b"abc").unwrap();
        let mut m = Manifest::new("t");
        m.input("src", &p).unwrap();
        assert!(m
            .render()
            .contains("sha256.src=ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad\n"));
    }
}
