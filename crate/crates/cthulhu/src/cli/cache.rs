use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{de::DeserializeOwned, Serialize};
use sha2::{Digest, Sha256};

use crate::catalog::ClassRecord;
use crate::detect::{d_pair, Checkpoint, ClassRack, DPair, FWitness, ScanProgress, SubrackSet, SUBGROUP_CAP};
use crate::error::{Error, Result};
use crate::matgroup::{GroupSpec, Mat};

/// Bumped whenever cached values could change meaning.
pub const ARTIFACT_VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "+cache1");

pub const CACHE_ENV: &str = "CTHULHU_CACHE_DIR";

/// Cache directory: explicit flag, then the environment, then the user cache.
pub fn resolve_dir(flag: Option<&Path>) -> PathBuf {
    if let Some(p) = flag {
        return p.to_path_buf();
    }
    if let Some(p) = std::env::var_os(CACHE_ENV) {
        return PathBuf::from(p);
    }
    let base = std::env::var_os("XDG_CACHE_HOME")
        .map(PathBuf::from)
        .or_else(|| std::env::var_os("HOME").map(|h| PathBuf::from(h).join(".cache")))
        .unwrap_or_else(|| PathBuf::from("."));
    base.join("cthulhu")
}

/// Key material of a cache entry; the key is its SHA-256.
#[derive(Clone, Debug, Serialize)]
pub struct KeyMaterial {
    pub group: String,
    pub label: String,
    pub split_index: usize,
    pub operation: String,
    pub caps: serde_json::Value,
    pub seed: u64,
    pub version: String,
}

impl KeyMaterial {
    pub fn digest(&self) -> String {
        let text = serde_json::to_string(self).expect("plain data");
        hex::encode(Sha256::digest(text.as_bytes()))
    }
}

/// Exclusive owner of a cache directory for the life of the value.
#[derive(Debug)]
pub struct Cache {
    dir: PathBuf,
    lock: PathBuf,
}

fn pid_alive(pid: u32) -> bool {
    Path::new("/proc").exists() && Path::new(&format!("/proc/{pid}")).exists()
}

impl Cache {
    /// Create the directory and take its lock file. A lock left by a process
    /// that no longer exists is replaced.
    pub fn open(dir: &Path) -> Result<Cache> {
        fs::create_dir_all(dir.join("checkpoints"))?;
        let lock = dir.join(".lock");
        for _ in 0..2 {
            match fs::OpenOptions::new().write(true).create_new(true).open(&lock) {
                Ok(mut f) => {
                    write!(f, "{}", std::process::id())?;
                    return Ok(Cache { dir: dir.to_path_buf(), lock });
                }
                Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => {
                    let owner = fs::read_to_string(&lock).ok().and_then(|s| s.trim().parse::<u32>().ok());
                    match owner {
                        Some(pid) if pid_alive(pid) && pid != std::process::id() => {
                            return Err(Error::Precondition(format!(
                                "cache {} is locked by process {pid}",
                                dir.display()
                            )))
                        }
                        _ => fs::remove_file(&lock)?,
                    }
                }
                Err(e) => return Err(e.into()),
            }
        }
        Err(Error::Precondition(format!("could not lock cache {}", dir.display())))
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn entry_path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.json"))
    }

    pub fn checkpoint_path(&self, key: &str, scan: &str) -> PathBuf {
        self.dir.join("checkpoints").join(format!("{key}-{scan}.json"))
    }

    /// Stored value, or `None` on a miss. Unreadable or mismatched entries
    /// are misses and are reported on stderr.
    pub fn get<T: DeserializeOwned>(&self, key: &KeyMaterial) -> Option<T> {
        let path = self.entry_path(&key.digest());
        let text = fs::read_to_string(&path).ok()?;
        let parsed: Result<(String, T)> = (|| {
            let v: serde_json::Value = serde_json::from_str(&text)?;
            let version = v.get("version").and_then(|x| x.as_str()).unwrap_or_default().to_string();
            let value = serde_json::from_value(v.get("value").cloned().unwrap_or_default())?;
            Ok((version, value))
        })();
        match parsed {
            Ok((version, value)) if version == key.version => Some(value),
            Ok(_) => None,
            Err(e) => {
                eprintln!("cache: ignoring corrupt entry {}: {e}", path.display());
                None
            }
        }
    }

    pub fn put<T: Serialize>(&self, key: &KeyMaterial, value: &T) -> Result<()> {
        let body = serde_json::json!({ "key": key, "version": key.version, "value": value });
        atomic_write(&self.entry_path(&key.digest()), serde_json::to_string_pretty(&body)?.as_bytes())
    }
}

impl Drop for Cache {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.lock);
    }
}

/// Write to a temporary sibling, then rename over the target.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

/// Scan progress kept in a file so an interrupted scan resumes.
pub struct FileCheckpoint {
    pub path: PathBuf,
}

impl Checkpoint for FileCheckpoint {
    fn load(&self) -> Option<ScanProgress> {
        let text = fs::read_to_string(&self.path).ok()?;
        serde_json::from_str(&text).ok()
    }

    fn save(&self, progress: &ScanProgress) -> Result<()> {
        atomic_write(&self.path, serde_json::to_string(progress)?.as_bytes())
    }
}

fn mat_field(v: &serde_json::Value, spec: &GroupSpec) -> Result<Mat> {
    let s = v.as_str().ok_or_else(|| Error::Parse("matrix is not a string".into()))?;
    Mat::parse(&spec.field, s)
}

fn mat_list(v: &serde_json::Value, spec: &GroupSpec) -> Result<Vec<Mat>> {
    v.as_array()
        .ok_or_else(|| Error::Parse("expected a matrix list".into()))?
        .iter()
        .map(|m| mat_field(m, spec))
        .collect()
}

/// Recheck a cached record's witness from its matrices: a D witness must
/// lie in the class and pass [`d_pair`] again; an F witness must pass the
/// brute-force subrack check.
pub fn revalidate(record: &ClassRecord, class: &ClassRack, spec: &GroupSpec) -> Result<()> {
    let Some(w) = &record.witness else {
        return Ok(());
    };
    if let (Some(r), Some(s)) = (w.get("r"), w.get("s")) {
        let (r, s) = (mat_field(r, spec)?, mat_field(s, spec)?);
        if !class.contains(&r) || !class.contains(&s) {
            return Err(Error::Verification("cached D witness leaves the class".into()));
        }
        return match d_pair(&r, &s, SUBGROUP_CAP)? {
            DPair::Witness(fresh) => fresh.validate(),
            other => Err(Error::Verification(format!("cached D witness rechecks as {other:?}"))),
        };
    }
    if let (Some(reps), Some(subs)) = (w.get("reps"), w.get("subracks")) {
        let reps = mat_list(reps, spec)?;
        let subracks = subs
            .as_array()
            .ok_or_else(|| Error::Parse("subracks".into()))?
            .iter()
            .map(|x| mat_list(x, spec).map(SubrackSet))
            .collect::<Result<Vec<_>>>()?;
        if reps.iter().any(|r| !class.contains(r)) {
            return Err(Error::Verification("cached F witness leaves the class".into()));
        }
        return FWitness { reps, subracks }.validate().map_err(|f| Error::Verification(f.to_string()));
    }
    Err(Error::Parse("unrecognized witness".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn key(version: &str) -> KeyMaterial {
        KeyMaterial {
            group: "Sp_4(2)".into(),
            label: "V(4)".into(),
            split_index: 0,
            operation: "classify".into(),
            caps: serde_json::json!({}),
            seed: 0,
            version: version.into(),
        }
    }

    #[test]
    fn miss_put_get_and_version_bump() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::open(dir.path()).unwrap();
        assert_eq!(cache.get::<serde_json::Value>(&key("1")), None);
        let v = serde_json::json!({"verdict": "D", "n": [1, 2]});
        cache.put(&key("1"), &v).unwrap();
        assert_eq!(cache.get::<serde_json::Value>(&key("1")), Some(v));
        assert_eq!(cache.get::<serde_json::Value>(&key("2")), None);
    }

    #[test]
    fn corrupt_entry_is_a_miss() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::open(dir.path()).unwrap();
        fs::write(cache.entry_path(&key("1").digest()), "{not json").unwrap();
        assert_eq!(cache.get::<serde_json::Value>(&key("1")), None);
    }

    #[test]
    fn lock_is_exclusive_and_released() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join(".lock"), "1").unwrap();
        // pid 1 is alive in any container
        if pid_alive(1) {
            assert!(Cache::open(dir.path()).is_err());
        }
        fs::write(dir.path().join(".lock"), "4294967295").unwrap();
        let c = Cache::open(dir.path()).unwrap();
        drop(c);
        assert!(!dir.path().join(".lock").exists());
    }
}
