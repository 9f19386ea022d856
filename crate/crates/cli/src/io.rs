use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::failure::Failure;

/// Parses a JSON config; errors carry the path of the offending field.
pub fn load<T: DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
    let de = &mut serde_json::Deserializer::from_str(&text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let at = e.path().to_string();
        if at == "." {
            Failure::Config(e.into_inner().to_string())
        } else {
            Failure::Config(format!("at `{at}`: {}", e.into_inner()))
        }
    })
}

/// Directory holding the config file, for resolving relative inputs.
pub fn base_dir(config: &Path) -> PathBuf {
    config.parent().map(Path::to_path_buf).unwrap_or_default()
}

pub fn resolve(base: &Path, path: &Path) -> PathBuf {
    if path.is_absolute() {
        path.to_path_buf()
    } else {
        base.join(path)
    }
}

pub struct OutDir(PathBuf);

impl OutDir {
    pub fn create(path: &Path) -> Result<Self, Failure> {
        fs::create_dir_all(path)?;
        Ok(OutDir(path.to_path_buf()))
    }

    pub fn file(&self, name: &str) -> Result<BufWriter<File>, Failure> {
        let p = self.0.join(name);
        if let Some(dir) = p.parent() {
            fs::create_dir_all(dir)?;
        }
        Ok(BufWriter::new(File::create(p)?))
    }

    pub fn json<T: Serialize>(&self, name: &str, value: &T) -> Result<(), Failure> {
        let mut w = self.file(name)?;
        serde_json::to_writer_pretty(&mut w, value)?;
        std::io::Write::write_all(&mut w, b"\n")?;
        Ok(())
    }
}
