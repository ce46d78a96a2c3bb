//! Experiment runners behind the `item` binary. Everything here is a pure
//! function of its config, so runs reproduce byte-identically from a
//! config file and seed.

pub mod configs;
pub mod experiments;

use std::path::Path;

/// Writes a string to `dir/name`, creating the directory first.
pub fn write_output(dir: &Path, name: &str, content: &str) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join(name), content)
}
