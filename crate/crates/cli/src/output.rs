use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use serde_json::value::RawValue;
use tempfile::NamedTempFile;

/// Writes every file or none: each goes to a temporary file in `dir`, and the
/// renames happen only after all contents are on disk.
pub fn write_all(dir: &Path, files: &[(String, String)]) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut staged = Vec::with_capacity(files.len());
    for (name, contents) in files {
        let mut tmp = NamedTempFile::new_in(dir).with_context(|| format!("staging {name}"))?;
        tmp.write_all(contents.as_bytes()).with_context(|| format!("writing {name}"))?;
        #[cfg(unix)]
        {
            use std::os::unix::fs::PermissionsExt;
            tmp.as_file()
                .set_permissions(fs::Permissions::from_mode(0o644))
                .with_context(|| format!("setting permissions of {name}"))?;
        }
        tmp.as_file().sync_all().with_context(|| format!("syncing {name}"))?;
        staged.push((tmp, dir.join(name)));
    }
    for (tmp, target) in staged {
        tmp.persist(&target).with_context(|| format!("renaming into {}", target.display()))?;
    }
    Ok(())
}

/// JSON number with 17 significant digits, or `null` when not finite.
pub fn number(x: f64) -> Option<Box<RawValue>> {
    if x.is_finite() {
        RawValue::from_string(logpot::spectrum::decimal(x)).ok()
    } else {
        None
    }
}
