//! Download-once cache for public datasets.
//!
//! A dataset is addressed by a URL template containing `{id}` and an
//! identifier. The bytes are stored untouched under the cache directory;
//! parsing happens afterwards with [`crate::harness::io`].

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use crate::error::{invalid, Error, Result};

/// Environment variable naming the cache directory.
pub const CACHE_DIR_ENV: &str = "CYCLEFIND_CACHE_DIR";
/// When set to a non-empty value other than `0`, never touch the network.
pub const OFFLINE_ENV: &str = "CYCLEFIND_OFFLINE";

/// `$CYCLEFIND_CACHE_DIR`, or `.cyclefind-cache` in the working directory.
pub fn default_cache_dir() -> PathBuf {
    std::env::var_os(CACHE_DIR_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(".cyclefind-cache"))
}

fn offline_from_env() -> bool {
    std::env::var(OFFLINE_ENV).is_ok_and(|v| !v.is_empty() && v != "0")
}

#[derive(Debug, Clone)]
pub struct Fetcher {
    pub url_template: String,
    pub cache_dir: PathBuf,
    pub offline: bool,
    pub timeout: Duration,
}

impl Fetcher {
    pub fn new(url_template: impl Into<String>, cache_dir: impl Into<PathBuf>) -> Self {
        Self {
            url_template: url_template.into(),
            cache_dir: cache_dir.into(),
            offline: offline_from_env(),
            timeout: Duration::from_secs(60),
        }
    }

    pub fn url_for(&self, id: &str) -> Result<String> {
        if !self.url_template.contains("{id}") {
            return Err(invalid(format!(
                "url template {:?} has no {{id}} placeholder",
                self.url_template
            )));
        }
        Ok(self.url_template.replace("{id}", id))
    }

    /// Cache file for `id`; characters outside `[A-Za-z0-9._-]` become `_`.
    pub fn cache_path(&self, id: &str) -> PathBuf {
        let safe: String = id
            .chars()
            .map(|c| {
                if c.is_ascii_alphanumeric() || matches!(c, '.' | '_' | '-') {
                    c
                } else {
                    '_'
                }
            })
            .collect();
        self.cache_dir.join(format!("{safe}.dat"))
    }

    /// Returns the cached file for `id`, downloading it first on a miss.
    pub fn fetch(&self, id: &str) -> Result<PathBuf> {
        let path = self.cache_path(id);
        if path.is_file() {
            return Ok(path);
        }
        let url = self.url_for(id)?;
        if self.offline {
            return Err(Error::Offline(format!("{id} ({url})")));
        }
        let bytes = download(&url, self.timeout)?;
        fs::create_dir_all(&self.cache_dir)?;
        write_atomic(&path, &bytes)?;
        Ok(path)
    }
}

/// Downloads `url_template` with `{id}` replaced into `cache_dir`, unless
/// already cached.
pub fn fetch_remote(url_template: &str, id: &str, cache_dir: impl AsRef<Path>) -> Result<PathBuf> {
    Fetcher::new(url_template, cache_dir.as_ref()).fetch(id)
}

fn download(url: &str, timeout: Duration) -> Result<Vec<u8>> {
    let agent: ureq::Agent = ureq::Agent::config_builder()
        .timeout_global(Some(timeout))
        .build()
        .into();
    match agent.get(url).call() {
        Ok(mut response) => response
            .body_mut()
            .with_config()
            .limit(256 * 1024 * 1024)
            .read_to_vec()
            .map_err(|e| Error::Offline(format!("{url}: {e}"))),
        Err(ureq::Error::StatusCode(status)) => Err(Error::Http {
            status,
            url: url.to_string(),
        }),
        Err(e) => Err(Error::Offline(format!("{url}: {e}"))),
    }
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension("part");
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cache_paths_are_sanitized() {
        let f = Fetcher::new("http://example.invalid/{id}", "/tmp/c");
        assert_eq!(f.cache_path("256/rlr monthly"), PathBuf::from("/tmp/c/256_rlr_monthly.dat"));
        assert_eq!(f.url_for("256").unwrap(), "http://example.invalid/256");
        let bad = Fetcher::new("http://example.invalid/", "/tmp/c");
        assert!(bad.url_for("1").is_err());
    }
}
