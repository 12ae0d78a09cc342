//! On-disk cache of solved correlators, one text file per `(n, g)`.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::exact::RatFn;
use crate::solver::CorrFn;
use crate::{GbeError, Result};

pub const FORMAT_VERSION: u32 = 1;
const MANIFEST: &str = "manifest.txt";
const FILE_MAGIC: &str = "gbe-corrfn";

#[derive(Clone, Debug)]
pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    pub fn new(dir: impl Into<PathBuf>) -> Cache {
        Cache { dir: dir.into() }
    }

    /// `$GBE_CACHE_DIR`, or `./gbe-cache`.
    pub fn from_env() -> Cache {
        let dir = std::env::var_os("GBE_CACHE_DIR")
            .map(PathBuf::from)
            .unwrap_or_else(|| PathBuf::from("gbe-cache"));
        Cache::new(dir)
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn file_name(n: usize, g: usize) -> String {
        format!("W_{n}_{g}.txt")
    }

    fn path(&self, n: usize, g: usize) -> PathBuf {
        self.dir.join(Cache::file_name(n, g))
    }

    fn manifest_ok(&self) -> bool {
        fs::read_to_string(self.dir.join(MANIFEST))
            .map(|s| s.trim() == manifest_line())
            .unwrap_or(false)
    }

    fn ensure_dir(&self) -> Result<()> {
        fs::create_dir_all(&self.dir)?;
        if !self.manifest_ok() {
            write_atomic(&self.dir.join(MANIFEST), &format!("{}\n", manifest_line()))?;
        }
        Ok(())
    }

    /// A cached entry, or `None` when missing, stale or corrupt.
    pub fn load(&self, n: usize, g: usize) -> Option<CorrFn> {
        if !self.manifest_ok() {
            return None;
        }
        let text = fs::read_to_string(self.path(n, g)).ok()?;
        let w = parse_corrfn(&text).ok()?;
        (w.n == n && w.g == g).then_some(w)
    }

    pub fn store(&self, w: &CorrFn) -> Result<()> {
        self.ensure_dir()?;
        write_atomic(&self.path(w.n, w.g), &serialize_corrfn(w))
    }

    /// Cached `(n, g)` keys, sorted.
    pub fn list(&self) -> Result<Vec<(usize, usize)>> {
        let mut out = Vec::new();
        let Ok(rd) = fs::read_dir(&self.dir) else {
            return Ok(out);
        };
        for entry in rd {
            let name = entry?.file_name().to_string_lossy().into_owned();
            if let Some(key) = parse_file_name(&name) {
                out.push(key);
            }
        }
        out.sort();
        Ok(out)
    }

    /// Remove all cache files; returns how many entries were removed.
    pub fn clear(&self) -> Result<usize> {
        let keys = self.list()?;
        for &(n, g) in &keys {
            fs::remove_file(self.path(n, g))?;
        }
        let manifest = self.dir.join(MANIFEST);
        if manifest.exists() {
            fs::remove_file(manifest)?;
        }
        Ok(keys.len())
    }
}

fn manifest_line() -> String {
    format!("gbe-cache format {FORMAT_VERSION}")
}

fn parse_file_name(name: &str) -> Option<(usize, usize)> {
    let core = name.strip_prefix("W_")?.strip_suffix(".txt")?;
    let (n, g) = core.split_once('_')?;
    Some((n.parse().ok()?, g.parse().ok()?))
}

fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let tmp = path.with_extension(format!("tmp{}", std::process::id()));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents.as_bytes())?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn serialize_corrfn(w: &CorrFn) -> String {
    let mut s = format!("{FILE_MAGIC} {FORMAT_VERSION}\nn {}\ng {}\n", w.n, w.g);
    for (r, p) in w.parts.iter().enumerate() {
        s.push_str(&format!("part {r} "));
        p.write_canonical(&mut s);
        s.push('\n');
    }
    s
}

pub fn parse_corrfn(text: &str) -> Result<CorrFn> {
    let bad = |m: &str| GbeError::Cache(m.to_string());
    let mut lines = text.lines();
    if lines.next() != Some(&format!("{FILE_MAGIC} {FORMAT_VERSION}")) {
        return Err(bad("bad header"));
    }
    let mut field = |name: &str| -> Result<usize> {
        lines
            .next()
            .and_then(|l| l.strip_prefix(name))
            .and_then(|v| v.trim().parse().ok())
            .ok_or_else(|| bad(&format!("missing {name}")))
    };
    let n = field("n ")?;
    let g = field("g ")?;
    let mut parts = Vec::new();
    for (r, line) in lines.enumerate() {
        let body = line
            .strip_prefix(&format!("part {r} "))
            .ok_or_else(|| bad("bad part line"))?;
        let f = RatFn::parse_canonical(body).map_err(|e| bad(&e.to_string()))?;
        if f.npoints() != n {
            return Err(bad("part has wrong point count"));
        }
        parts.push(f);
    }
    if parts.len() != g / 2 + 1 {
        return Err(bad("wrong number of parts"));
    }
    Ok(CorrFn { n, g, parts })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::Engine;

    #[test]
    fn round_trip_and_corruption() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::new(dir.path());
        let e = Engine::new();
        let w = e.solve(2, 1).unwrap();
        cache.store(&w).unwrap();
        let back = cache.load(2, 1).unwrap();
        assert!(back.equal(&w));
        assert_eq!(back, *w);
        assert_eq!(cache.list().unwrap(), vec![(2, 1)]);

        fs::write(dir.path().join(Cache::file_name(2, 1)), "gbe-corrfn 1\nn 2\ng 1\npart 0 junk").unwrap();
        assert!(cache.load(2, 1).is_none());

        let cached = Engine::with_cache(cache.clone());
        let again = cached.solve(2, 1).unwrap();
        assert!(again.equal(&w));
        assert!(cache.load(2, 1).is_some());
        assert!(cache.clear().unwrap() >= 4);
        assert!(cache.list().unwrap().is_empty());
    }
}
