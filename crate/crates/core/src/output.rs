//! Atomic file output.

use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::Result;

/// Environment variable that overrides the configured output directory.
pub const OUTPUT_DIR_ENV: &str = "ROTHE_OUTPUT_DIR";

pub fn resolve_output_dir(configured: &Path) -> PathBuf {
    match std::env::var_os(OUTPUT_DIR_ENV) {
        Some(dir) if !dir.is_empty() => PathBuf::from(dir),
        _ => configured.to_path_buf(),
    }
}

/// Writes `contents` to `dir/name` through a temporary sibling and a rename.
pub fn write_atomic(dir: &Path, name: &str, contents: &str) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let target = dir.join(name);
    let tmp = dir.join(format!(".{name}.tmp"));
    {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(contents.as_bytes())?;
        f.sync_all()?;
    }
    std::fs::rename(&tmp, &target)?;
    Ok(target)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn writes_and_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let sub = dir.path().join("a/b");
        let p = write_atomic(&sub, "x.txt", "one").unwrap();
        write_atomic(&sub, "x.txt", "two").unwrap();
        assert_eq!(std::fs::read_to_string(p).unwrap(), "two");
        let names: Vec<_> = std::fs::read_dir(&sub).unwrap().map(|e| e.unwrap().file_name()).collect();
        assert_eq!(names.len(), 1);
    }
}
