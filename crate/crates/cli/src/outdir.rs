//! All-or-nothing output directories.
//!
//! Files are written into a hidden sibling directory and moved into place
//! only once every one of them has been written. A failed command leaves
//! no trace at the destination.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};

pub struct Staging {
    tmp: PathBuf,
    dest: PathBuf,
    committed: bool,
}

fn is_empty_dir(path: &Path) -> Result<bool> {
    Ok(fs::read_dir(path)?.next().is_none())
}

impl Staging {
    /// Refuses a non-empty destination unless `force` is set.
    pub fn new(dest: &Path, force: bool) -> Result<Self> {
        if dest.exists() {
            if !dest.is_dir() {
                bail!("{} exists and is not a directory", dest.display());
            }
            if !force && !is_empty_dir(dest)? {
                bail!(
                    "output directory {} is not empty (use --force to replace it)",
                    dest.display()
                );
            }
        }
        let name = dest
            .file_name()
            .with_context(|| format!("bad output path {}", dest.display()))?
            .to_string_lossy()
            .into_owned();
        let parent = match dest.parent() {
            Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
            _ => PathBuf::from("."),
        };
        fs::create_dir_all(&parent)
            .with_context(|| format!("creating {}", parent.display()))?;
        let tmp = parent.join(format!(".{name}.partial-{}", std::process::id()));
        if tmp.exists() {
            fs::remove_dir_all(&tmp)?;
        }
        fs::create_dir(&tmp).with_context(|| format!("creating {}", tmp.display()))?;
        Ok(Staging {
            tmp,
            dest: dest.to_path_buf(),
            committed: false,
        })
    }

    pub fn file(&self, name: &str) -> PathBuf {
        self.tmp.join(name)
    }

    pub fn commit(mut self) -> Result<()> {
        if self.dest.exists() {
            fs::remove_dir_all(&self.dest)
                .with_context(|| format!("removing {}", self.dest.display()))?;
        }
        fs::rename(&self.tmp, &self.dest)
            .with_context(|| format!("moving results to {}", self.dest.display()))?;
        self.committed = true;
        Ok(())
    }
}

impl Drop for Staging {
    fn drop(&mut self) {
        if !self.committed {
            let _ = fs::remove_dir_all(&self.tmp);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dropped_staging_leaves_nothing() {
        let root = tempfile::tempdir().unwrap();
        let dest = root.path().join("out");
        {
            let s = Staging::new(&dest, false).unwrap();
            fs::write(s.file("a.csv"), "x\n").unwrap();
        }
        assert!(!dest.exists());
        assert_eq!(fs::read_dir(root.path()).unwrap().count(), 0);
    }

    #[test]
    fn commit_and_overwrite_rules() {
        let root = tempfile::tempdir().unwrap();
        let dest = root.path().join("out");
        let s = Staging::new(&dest, false).unwrap();
        fs::write(s.file("a.csv"), "x\n").unwrap();
        s.commit().unwrap();
        assert_eq!(fs::read_to_string(dest.join("a.csv")).unwrap(), "x\n");

        assert!(Staging::new(&dest, false).is_err());
        let s = Staging::new(&dest, true).unwrap();
        fs::write(s.file("b.csv"), "y\n").unwrap();
        s.commit().unwrap();
        assert!(!dest.join("a.csv").exists());
        assert!(dest.join("b.csv").exists());
    }
}
