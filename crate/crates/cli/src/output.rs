use std::fs;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

/// Output directory that records every file written through it.
pub struct OutputDir {
    root: PathBuf,
    written: Vec<PathBuf>,
}

impl OutputDir {
    pub fn create(root: &Path) -> std::io::Result<Self> {
        fs::create_dir_all(root)?;
        Ok(Self { root: root.to_path_buf(), written: Vec::new() })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    /// Writes `name` atomically (temporary file, then rename).
    pub fn write(&mut self, name: &str, contents: &[u8]) -> std::io::Result<PathBuf> {
        let path = write_atomic(&self.root.join(name), contents)?;
        if !self.written.iter().any(|p| p == Path::new(name)) {
            self.written.push(PathBuf::from(name));
        }
        Ok(path)
    }

    /// Records a file that something else wrote under the root.
    pub fn record(&mut self, relative: &Path) -> std::io::Result<()> {
        if !self.root.join(relative).is_file() {
            return Err(std::io::Error::new(std::io::ErrorKind::NotFound, relative.display().to_string()));
        }
        if !self.written.iter().any(|p| p == relative) {
            self.written.push(relative.to_path_buf());
        }
        Ok(())
    }

    /// Relative paths of every file written so far, in write order.
    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }
}

pub fn write_atomic(path: &Path, contents: &[u8]) -> std::io::Result<PathBuf> {
    let file_name = path.file_name().and_then(|n| n.to_str()).unwrap_or("out");
    let tmp = path.with_file_name(format!(".{file_name}.tmp"));
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path)?;
    Ok(path.to_path_buf())
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn file_sha256(path: &Path) -> std::io::Result<String> {
    Ok(sha256_hex(&fs::read(path)?))
}
