//! Count cache keyed by (shift fingerprint, length), with optional directory
//! persistence. One file per key in a line-based text framing; corrupt
//! entries are recomputed, never trusted. Writers of the same key are
//! idempotent (identical content), so concurrent use is safe.

use crate::error::Result;
use crate::language::{count_words, CountResult};
use crate::shift::Shift;
use std::collections::HashMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::RwLock;

const MAGIC: &str = "subshift-count v1";
const WORDS_MAGIC: &str = "subshift-words v1";

pub struct CountCache {
    dir: Option<PathBuf>,
    mem: RwLock<HashMap<(String, usize), CountResult>>,
}

impl CountCache {
    pub fn in_memory() -> CountCache {
        CountCache {
            dir: None,
            mem: RwLock::new(HashMap::new()),
        }
    }

    pub fn with_dir(dir: &Path) -> Result<CountCache> {
        std::fs::create_dir_all(dir)?;
        Ok(CountCache {
            dir: Some(dir.to_path_buf()),
            mem: RwLock::new(HashMap::new()),
        })
    }

    fn count_path(&self, fp: &str, n: usize) -> Option<PathBuf> {
        self.dir.as_ref().map(|d| d.join(format!("{fp}-{n}.count")))
    }

    fn words_path(&self, fp: &str, n: usize) -> Option<PathBuf> {
        self.dir.as_ref().map(|d| d.join(format!("{fp}-{n}.words")))
    }

    pub fn count(&self, shift: &Shift, n: usize) -> Result<CountResult> {
        let fp = shift.fingerprint().to_string();
        let key = (fp.clone(), n);
        if let Some(c) = self.mem.read().unwrap().get(&key) {
            return Ok(*c);
        }
        if let Some(path) = self.count_path(&fp, n) {
            if let Some(c) = read_count_file(&path, &fp, n) {
                self.mem.write().unwrap().insert(key, c);
                return Ok(c);
            }
        }
        let c = count_words(shift, n)?;
        if let Some(path) = self.count_path(&fp, n) {
            let _ = write_count_file(&path, &fp, n, &c);
        }
        self.mem.write().unwrap().insert(key, c);
        Ok(c)
    }

    /// Persist a word list alongside the count entry.
    pub fn store_words(&self, shift: &Shift, n: usize, words: &[crate::alphabet::Word]) -> Result<()> {
        let fp = shift.fingerprint();
        if let Some(path) = self.words_path(fp, n) {
            let mut body = format!("{WORDS_MAGIC}\n{fp}\n{n}\n{}\n", words.len());
            for w in words {
                body.push_str(&shift.alphabet().render(w));
                body.push('\n');
            }
            atomic_write(&path, body.as_bytes())?;
        }
        Ok(())
    }

    pub fn load_words(&self, shift: &Shift, n: usize) -> Option<Vec<String>> {
        let fp = shift.fingerprint();
        let path = self.words_path(fp, n)?;
        let text = std::fs::read_to_string(path).ok()?;
        let mut lines = text.lines();
        if lines.next() != Some(WORDS_MAGIC) || lines.next() != Some(fp) {
            return None;
        }
        if lines.next().and_then(|s| s.parse::<usize>().ok()) != Some(n) {
            return None;
        }
        let count: usize = lines.next().and_then(|s| s.parse().ok())?;
        let words: Vec<String> = lines.map(|s| s.to_string()).collect();
        (words.len() == count).then_some(words)
    }
}

fn read_count_file(path: &Path, fp: &str, n: usize) -> Option<CountResult> {
    let text = std::fs::read_to_string(path).ok()?;
    let mut lines = text.lines();
    if lines.next() != Some(MAGIC) || lines.next() != Some(fp) {
        return None;
    }
    if lines.next().and_then(|s| s.parse::<usize>().ok()) != Some(n) {
        return None;
    }
    let certain: u128 = lines.next().and_then(|s| s.parse().ok())?;
    let possible: u128 = match lines.next()? {
        "-" => certain,
        s => s.parse().ok()?,
    };
    let approximate = match lines.next()? {
        "exact" => false,
        "approx" => true,
        _ => return None,
    };
    if lines.next().is_some() {
        return None;
    }
    Some(CountResult {
        certain,
        possible,
        approximate,
    })
}

fn write_count_file(path: &Path, fp: &str, n: usize, c: &CountResult) -> Result<()> {
    let possible = if c.possible == c.certain && !c.approximate {
        "-".to_string()
    } else {
        c.possible.to_string()
    };
    let body = format!(
        "{MAGIC}\n{fp}\n{n}\n{}\n{}\n{}\n",
        c.certain,
        possible,
        if c.approximate { "approx" } else { "exact" }
    );
    atomic_write(path, body.as_bytes())
}

fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension(format!("tmp.{}", std::process::id()));
    {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    std::fs::rename(&tmp, path)?;
    Ok(())
}
