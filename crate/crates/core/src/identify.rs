//! Knot catalog, fingerprint index and identification up to mirror image.
//!
//! The catalog is a line file `name;crossing_number;PD[...]`. Fingerprints
//! of every entry are computed once and cached in a text file whose name
//! carries a hash of the catalog content:
//!
//! ```text
//! # fingerprint cache v1
//! # catalog sha256 <hex>
//! # jones exponents are quarter powers of q (stored x4)
//! name;jones;alexander;determinant
//! ```

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::OnceLock;

use sha2::{Digest, Sha256};

use crate::error::{MosaicError, Result};
use crate::exec::Execution;
use crate::invariants::{fingerprint, Fingerprint};
use crate::pd::PdCode;

/// Prime knots per crossing number that a catalog must contain, as
/// `(crossing_number, count)`; the names are `c_1 ..= c_count`.
pub const MANDATORY: [(u32, u32); 8] = [(3, 1), (4, 1), (5, 2), (6, 3), (7, 7), (8, 21), (9, 49), (10, 165)];

const BUILTIN: &str = include_str!("../data/catalog.txt");
const CACHE_HEADER: &str = "# fingerprint cache v1";

/// Crossing number encoded in a table name such as `10_139` or `11a_341`.
pub fn name_crossing_number(name: &str) -> Option<u32> {
    let digits: String = name.chars().take_while(|c| c.is_ascii_digit()).collect();
    digits.parse().ok()
}

/// Sort key ordering names by crossing number, then family (`""`, `a`, `n`),
/// then table index. Unparseable names sort last, alphabetically.
pub fn name_sort_key(name: &str) -> (u32, String, u64, String) {
    let parsed = name.split_once('_').and_then(|(head, idx)| {
        let cn = name_crossing_number(head)?;
        let family = head.trim_start_matches(|c: char| c.is_ascii_digit()).to_string();
        Some((cn, family, idx.parse::<u64>().ok()?))
    });
    match parsed {
        Some((cn, family, idx)) => (cn, family, idx, String::new()),
        None => (u32::MAX, String::new(), u64::MAX, name.to_string()),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CatalogEntry {
    pub name: String,
    pub crossing_number: u32,
    pub reference_pd: PdCode,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Catalog {
    entries: Vec<CatalogEntry>,
}

impl Catalog {
    /// Parses a catalog and checks that every prime knot up to ten
    /// crossings is present.
    pub fn parse(text: &str) -> Result<Catalog> {
        let catalog = Catalog::parse_partial(text)?;
        catalog.check_coverage()?;
        Ok(catalog)
    }

    /// Parses without the coverage requirement.
    pub fn parse_partial(text: &str) -> Result<Catalog> {
        let mut entries = Vec::new();
        let mut seen = HashSet::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |m: String| MosaicError::Catalog(format!("line {}: {m}", i + 1));
            let mut fields = line.splitn(3, ';');
            let (Some(name), Some(cn), Some(pd)) = (fields.next(), fields.next(), fields.next()) else {
                return Err(err("expected name;crossing_number;PD[...]".into()));
            };
            let name = name.trim().to_string();
            if name.is_empty() {
                return Err(err("empty name".into()));
            }
            let crossing_number: u32 =
                cn.trim().parse().map_err(|_| err(format!("bad crossing number {cn:?}")))?;
            let reference_pd: PdCode = pd.trim().parse().map_err(|e| err(format!("{name}: {e}")))?;
            if reference_pd.crossing_count() != crossing_number as usize {
                return Err(err(format!(
                    "{name}: crossing number {crossing_number} but PD has {} crossings",
                    reference_pd.crossing_count()
                )));
            }
            if name_crossing_number(&name).is_some_and(|c| c != crossing_number) {
                return Err(err(format!("{name}: name disagrees with crossing number {crossing_number}")));
            }
            if !seen.insert(name.clone()) {
                return Err(err(format!("duplicate name {name}")));
            }
            entries.push(CatalogEntry { name, crossing_number, reference_pd });
        }
        Ok(Catalog { entries })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Catalog> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| MosaicError::io(path, e))?;
        Catalog::parse(&text)
    }

    /// The shipped catalog of the 249 prime knots with 3 to 10 crossings.
    pub fn builtin() -> &'static Catalog {
        static CATALOG: OnceLock<Catalog> = OnceLock::new();
        CATALOG.get_or_init(|| Catalog::parse(BUILTIN).expect("built-in catalog is valid"))
    }

    fn check_coverage(&self) -> Result<()> {
        let names: HashSet<&str> = self.entries.iter().map(|e| e.name.as_str()).collect();
        let mut missing = Vec::new();
        for (cn, count) in MANDATORY {
            for i in 1..=count {
                let name = format!("{cn}_{i}");
                if !names.contains(name.as_str()) {
                    missing.push(name);
                }
            }
        }
        match missing.len() {
            0 => Ok(()),
            n => Err(MosaicError::Catalog(format!(
                "{n} mandatory knots missing (first: {})",
                missing[..n.min(5)].join(", ")
            ))),
        }
    }

    pub fn entries(&self) -> &[CatalogEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, name: &str) -> Option<&CatalogEntry> {
        self.entries.iter().find(|e| e.name == name)
    }

    /// Entries with crossing number at most `max`.
    pub fn restricted(&self, max: u32) -> Catalog {
        Catalog { entries: self.entries.iter().filter(|e| e.crossing_number <= max).cloned().collect() }
    }

    /// Canonical text form; comments and blank lines are dropped.
    pub fn to_text(&self) -> String {
        self.entries
            .iter()
            .map(|e| format!("{};{};{}\n", e.name, e.crossing_number, e.reference_pd))
            .collect()
    }

    /// SHA-256 of [`Catalog::to_text`], hex encoded.
    pub fn content_hash(&self) -> String {
        hex::encode(Sha256::digest(self.to_text().as_bytes()))
    }

    /// File name of the fingerprint cache for this catalog.
    pub fn cache_file_name(&self) -> String {
        format!("fingerprints-{}.txt", &self.content_hash()[..16])
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Identification {
    Unknot,
    Prime(String),
    Ambiguous(Vec<String>),
    Unidentified,
}

impl Identification {
    pub fn prime_name(&self) -> Option<&str> {
        match self {
            Identification::Prime(name) => Some(name),
            _ => None,
        }
    }
}

/// `unknot`, the knot name, `ambiguous:[a,b]` or `unknown`.
impl fmt::Display for Identification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Identification::Unknot => f.write_str("unknot"),
            Identification::Prime(name) => f.write_str(name),
            Identification::Ambiguous(names) => write!(f, "ambiguous:[{}]", names.join(",")),
            Identification::Unidentified => f.write_str("unknown"),
        }
    }
}

/// Catalog fingerprints keyed by their mirror-insensitive canonical form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FingerprintIndex {
    catalog_hash: String,
    entries: Vec<(String, Fingerprint)>,
    crossing_numbers: Vec<u32>,
    by_key: BTreeMap<String, Vec<usize>>,
}

impl FingerprintIndex {
    /// Computes every entry's fingerprint.
    pub fn build(catalog: &Catalog, exec: Execution) -> Result<FingerprintIndex> {
        let computed = exec.map(catalog.entries(), |e| {
            fingerprint(&e.reference_pd)
                .map(|fp| (e.name.clone(), fp))
                .map_err(|source| MosaicError::Invariant { name: e.name.clone(), source: Box::new(source) })
        });
        let entries = computed.into_iter().collect::<Result<Vec<_>>>()?;
        Ok(FingerprintIndex::from_entries(catalog, entries))
    }

    fn from_entries(catalog: &Catalog, entries: Vec<(String, Fingerprint)>) -> FingerprintIndex {
        let mut by_key: BTreeMap<String, Vec<usize>> = BTreeMap::new();
        for (i, (_, fp)) in entries.iter().enumerate() {
            by_key.entry(fp.canonical_key()).or_default().push(i);
        }
        let crossing_numbers = catalog.entries().iter().map(|e| e.crossing_number).collect();
        FingerprintIndex { catalog_hash: catalog.content_hash(), entries, crossing_numbers, by_key }
    }

    /// Reads `dir/<cache file>` if it exists and matches the catalog,
    /// otherwise computes the index and writes the cache.
    pub fn load_or_build(catalog: &Catalog, dir: impl AsRef<Path>, exec: Execution) -> Result<FingerprintIndex> {
        let path = dir.as_ref().join(catalog.cache_file_name());
        if path.exists() {
            let text = fs::read_to_string(&path).map_err(|e| MosaicError::io(&path, e))?;
            if let Ok(index) = FingerprintIndex::from_cache_text(&text, catalog) {
                return Ok(index);
            }
        }
        let index = FingerprintIndex::build(catalog, exec)?;
        index.write_cache(&path)?;
        Ok(index)
    }

    pub fn write_cache(&self, path: &Path) -> Result<()> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir).map_err(|e| MosaicError::io(dir, e))?;
        }
        let tmp = PathBuf::from(format!("{}.tmp", path.display()));
        fs::write(&tmp, self.to_cache_text()).map_err(|e| MosaicError::io(&tmp, e))?;
        fs::rename(&tmp, path).map_err(|e| MosaicError::io(path, e))
    }

    pub fn to_cache_text(&self) -> String {
        let mut out = format!(
            "{CACHE_HEADER}\n# catalog sha256 {}\n# jones exponents are quarter powers of q (stored x4)\n",
            self.catalog_hash
        );
        for (name, fp) in &self.entries {
            out.push_str(&format!("{name};{fp}\n"));
        }
        out
    }

    /// Parses a cache file, rejecting it unless it was built from `catalog`.
    pub fn from_cache_text(text: &str, catalog: &Catalog) -> Result<FingerprintIndex> {
        let hash = catalog.content_hash();
        let mut lines = text.lines();
        let stale = || MosaicError::Catalog("fingerprint cache does not match catalog".into());
        if lines.next() != Some(CACHE_HEADER) {
            return Err(MosaicError::Catalog("not a fingerprint cache".into()));
        }
        if lines.next().and_then(|l| l.strip_prefix("# catalog sha256 ")) != Some(hash.as_str()) {
            return Err(stale());
        }
        let mut entries = Vec::with_capacity(catalog.len());
        for line in lines.filter(|l| !l.starts_with('#') && !l.trim().is_empty()) {
            let parts: Vec<&str> = line.split(';').collect();
            let [name, j, a, d] = parts[..] else {
                return Err(MosaicError::Catalog(format!("bad cache line {line:?}")));
            };
            entries.push((name.to_string(), Fingerprint::parse(j, a, d)?));
        }
        let names_match = entries.len() == catalog.len()
            && entries.iter().zip(catalog.entries()).all(|((n, _), e)| *n == e.name);
        if !names_match {
            return Err(stale());
        }
        Ok(FingerprintIndex::from_entries(catalog, entries))
    }

    pub fn catalog_hash(&self) -> &str {
        &self.catalog_hash
    }

    pub fn entries(&self) -> &[(String, Fingerprint)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn fingerprint_of(&self, name: &str) -> Option<&Fingerprint> {
        self.entries.iter().find(|(n, _)| n == name).map(|(_, fp)| fp)
    }

    /// Catalog names whose fingerprint equals `fp` up to mirror image.
    pub fn matches(&self, fp: &Fingerprint) -> Vec<&str> {
        let mut names: Vec<&str> = self
            .by_key
            .get(&fp.canonical_key())
            .map(|ids| ids.iter().map(|&i| self.entries[i].0.as_str()).collect())
            .unwrap_or_default();
        names.sort_by_key(|n| name_sort_key(n));
        names
    }

    /// Verdict for the fingerprint of a diagram with `diagram_crossings`
    /// crossings. Matches whose crossing number exceeds that count cannot be
    /// drawn by the diagram and are dropped.
    pub fn identify_fingerprint(&self, fp: &Fingerprint, diagram_crossings: usize) -> Identification {
        if *fp == Fingerprint::unknot() {
            return Identification::Unknot;
        }
        let mut ids: Vec<usize> = self.by_key.get(&fp.canonical_key()).cloned().unwrap_or_default();
        ids.retain(|&i| self.crossing_numbers[i] as usize <= diagram_crossings);
        let mut names: Vec<&str> = ids.iter().map(|&i| self.entries[i].0.as_str()).collect();
        names.sort_by_key(|n| name_sort_key(n));
        match names.as_slice() {
            [] => Identification::Unidentified,
            [one] => Identification::Prime(one.to_string()),
            many => Identification::Ambiguous(many.iter().map(|s| s.to_string()).collect()),
        }
    }

    pub fn identify(&self, pd: &PdCode) -> Result<Identification> {
        if pd.crossing_count() == 0 {
            return Ok(Identification::Unknot);
        }
        Ok(self.identify_fingerprint(&fingerprint(pd)?, pd.crossing_count()))
    }

    /// Groups of two or more names sharing a fingerprint, sorted.
    pub fn collision_report(&self) -> Vec<Vec<String>> {
        let mut groups: Vec<Vec<String>> = self
            .by_key
            .values()
            .filter(|ids| ids.len() > 1)
            .map(|ids| {
                let mut names: Vec<String> = ids.iter().map(|&i| self.entries[i].0.clone()).collect();
                names.sort_by_key(|n| name_sort_key(n));
                names
            })
            .collect();
        groups.sort_by_key(|g| name_sort_key(&g[0]));
        groups
    }
}

/// Fingerprints every catalog entry with the default execution mode.
pub fn bootstrap_fingerprints(catalog: &Catalog) -> Result<FingerprintIndex> {
    FingerprintIndex::build(catalog, Execution::default())
}

/// Identifies the knot drawn by `pd`. Invariant failures on a malformed PD
/// count as unidentified.
pub fn identify(pd: &PdCode, index: &FingerprintIndex) -> Identification {
    index.identify(pd).unwrap_or(Identification::Unidentified)
}

pub fn collision_report(index: &FingerprintIndex) -> Vec<Vec<String>> {
    index.collision_report()
}

/// The index for the built-in catalog, computed on first use.
pub fn builtin_index() -> &'static FingerprintIndex {
    static INDEX: OnceLock<FingerprintIndex> = OnceLock::new();
    INDEX.get_or_init(|| bootstrap_fingerprints(Catalog::builtin()).expect("built-in catalog fingerprints"))
}
