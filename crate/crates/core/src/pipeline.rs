//! Enumerate, trace, identify; then store, summarize and compare.
//!
//! A store is a JSON-lines file, one prime hit per line:
//!
//! ```text
//! {"knot":"3_1","grid":"0 2 1 0 / 2 10 9 1 / 3 9 8 4 / 0 3 4 0","n":4,"nonblank":12,"crossings":3,"layout":"shell4"}
//! ```
//!
//! Lines are unique by `grid`. Ambiguous hits go to a sibling file with the
//! suffix `.ambiguous`, in the same format with `knot` set to
//! `ambiguous:[a,b,...]`.

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;
use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::ops::AddAssign;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{MosaicError, Result};
use crate::exec::Execution;
use crate::identify::{name_crossing_number, name_sort_key, Catalog, FingerprintIndex, Identification};
use crate::layout::{parse_layout, Layout, SplitTable};
use crate::tile::{parse_matrix, MosaicGrid};
use crate::trace::{to_pd, trace, TraceKind};

/// What one candidate grid turned out to be.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Link,
    Unknot,
    Unidentified,
    Ambiguous(Vec<String>),
    Prime(String),
}

pub fn classify(grid: &MosaicGrid, index: &FingerprintIndex) -> Result<Verdict> {
    let result = trace(grid)?;
    Ok(match result.kind {
        TraceKind::Link => Verdict::Link,
        TraceKind::UnknottedNoCrossings => Verdict::Unknot,
        TraceKind::Knot => match index.identify(&to_pd(&result)?)? {
            Identification::Unknot => Verdict::Unknot,
            Identification::Prime(name) => Verdict::Prime(name),
            Identification::Ambiguous(names) => Verdict::Ambiguous(names),
            Identification::Unidentified => Verdict::Unidentified,
        },
    })
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunStats {
    pub enumerated: u64,
    pub links: u64,
    pub unknots: u64,
    pub unidentified: u64,
    pub ambiguous: u64,
    pub prime_hits: u64,
}

impl RunStats {
    /// Every enumerated candidate landed in exactly one bucket.
    pub fn is_balanced(&self) -> bool {
        self.enumerated == self.links + self.unknots + self.unidentified + self.ambiguous + self.prime_hits
    }
}

impl AddAssign for RunStats {
    fn add_assign(&mut self, o: RunStats) {
        self.enumerated += o.enumerated;
        self.links += o.links;
        self.unknots += o.unknots;
        self.unidentified += o.unidentified;
        self.ambiguous += o.ambiguous;
        self.prime_hits += o.prime_hits;
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct KnotHit {
    pub knot: String,
    pub grid: String,
    pub n: usize,
    pub nonblank: usize,
    pub crossings: usize,
    pub layout: String,
}

impl KnotHit {
    pub fn new(knot: impl Into<String>, grid: &MosaicGrid, layout: impl Into<String>) -> KnotHit {
        KnotHit {
            knot: knot.into(),
            grid: grid.to_inline(),
            n: grid.size(),
            nonblank: grid.nonblank_count(),
            crossings: grid.crossing_count(),
            layout: layout.into(),
        }
    }

    pub fn mosaic(&self) -> Result<MosaicGrid> {
        parse_matrix(&self.grid)
    }

    /// Checks the stored counts against the grid.
    pub fn check(&self) -> std::result::Result<MosaicGrid, String> {
        let grid = self.mosaic().map_err(|e| e.to_string())?;
        let actual = (grid.size(), grid.nonblank_count(), grid.crossing_count());
        if actual != (self.n, self.nonblank, self.crossings) {
            return Err(format!(
                "counts (n, nonblank, crossings) = {:?} but grid gives {actual:?}",
                (self.n, self.nonblank, self.crossings)
            ));
        }
        Ok(grid)
    }

    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("hit serializes")
    }
}

/// Reads and validates every hit in a store.
pub fn read_hits(path: impl AsRef<Path>) -> Result<Vec<KnotHit>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| MosaicError::io(path, e))?;
    let mut hits = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| MosaicError::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let store_err = |message: String| MosaicError::Store { path: path.to_path_buf(), line: i + 1, message };
        let hit: KnotHit = serde_json::from_str(&line).map_err(|e| store_err(e.to_string()))?;
        hit.check().map_err(store_err)?;
        hits.push(hit);
    }
    Ok(hits)
}

/// The store's lines in sorted order.
pub fn sorted_store_lines(path: impl AsRef<Path>) -> Result<Vec<String>> {
    let mut lines: Vec<String> = read_hits(path)?.iter().map(KnotHit::to_line).collect();
    lines.sort();
    Ok(lines)
}

/// Append-only writer that skips grids already present.
pub struct HitStore {
    path: PathBuf,
    seen: HashSet<String>,
}

impl HitStore {
    pub fn open(path: impl Into<PathBuf>) -> Result<HitStore> {
        let path = path.into();
        let seen = if path.exists() {
            read_hits(&path)?.into_iter().map(|h| h.grid).collect()
        } else {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir).map_err(|e| MosaicError::io(dir, e))?;
            }
            File::create(&path).map_err(|e| MosaicError::io(&path, e))?;
            HashSet::new()
        };
        Ok(HitStore { path, seen })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn len(&self) -> usize {
        self.seen.len()
    }

    pub fn is_empty(&self) -> bool {
        self.seen.is_empty()
    }

    /// Appends the hits whose grid is new; returns how many were written.
    pub fn append(&mut self, hits: &[KnotHit]) -> Result<usize> {
        let file = OpenOptions::new().append(true).open(&self.path).map_err(|e| MosaicError::io(&self.path, e))?;
        let mut w = BufWriter::new(file);
        let mut written = 0;
        for hit in hits {
            if self.seen.insert(hit.grid.clone()) {
                writeln!(w, "{}", hit.to_line()).map_err(|e| MosaicError::io(&self.path, e))?;
                written += 1;
            }
        }
        w.flush().map_err(|e| MosaicError::io(&self.path, e))?;
        Ok(written)
    }
}

/// What to search and how.
#[derive(Debug, Clone)]
pub struct SearchOptions {
    pub layout_id: String,
    pub min_crossings: usize,
    pub shard_index: u64,
    pub shard_total: u64,
    pub execution: Execution,
}

impl SearchOptions {
    pub fn new(layout_id: impl Into<String>, min_crossings: usize) -> SearchOptions {
        SearchOptions {
            layout_id: layout_id.into(),
            min_crossings,
            shard_index: 0,
            shard_total: 1,
            execution: Execution::default(),
        }
    }

    pub fn shard(mut self, index: u64, total: u64) -> SearchOptions {
        self.shard_index = index;
        self.shard_total = total;
        self
    }

    pub fn execution(mut self, execution: Execution) -> SearchOptions {
        self.execution = execution;
        self
    }

    fn prefixes(&self, table: &SplitTable) -> Result<Vec<u64>> {
        if self.shard_total == 0 || self.shard_index >= self.shard_total {
            return Err(MosaicError::Report(format!(
                "shard index {} out of range for {} shards",
                self.shard_index, self.shard_total
            )));
        }
        Ok((self.shard_index..table.prefix_count()).step_by(self.shard_total as usize).collect())
    }
}

/// Stats and hits from some slice of a search, in enumeration order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Batch {
    pub stats: RunStats,
    pub primes: Vec<KnotHit>,
    pub ambiguous: Vec<KnotHit>,
}

impl Batch {
    fn absorb(&mut self, other: Batch) {
        self.stats += other.stats;
        self.primes.extend(other.primes);
        self.ambiguous.extend(other.ambiguous);
    }
}

fn search_prefix(
    layout: &Layout,
    table: &SplitTable,
    prefix: u64,
    layout_id: &str,
    index: &FingerprintIndex,
) -> Result<Batch> {
    let mut batch = Batch::default();
    let mut failure = None;
    layout.for_each_with_prefix(table, prefix, |grid| {
        if failure.is_some() {
            return;
        }
        let verdict = match classify(grid, index) {
            Ok(v) => v,
            Err(e) => {
                failure = Some(MosaicError::Malformed(format!("{}: {e}", grid.to_inline())));
                return;
            }
        };
        let s = &mut batch.stats;
        s.enumerated += 1;
        match verdict {
            Verdict::Link => s.links += 1,
            Verdict::Unknot => s.unknots += 1,
            Verdict::Unidentified => s.unidentified += 1,
            Verdict::Ambiguous(names) => {
                s.ambiguous += 1;
                let label = Identification::Ambiguous(names).to_string();
                batch.ambiguous.push(KnotHit::new(label, grid, layout_id));
            }
            Verdict::Prime(name) => {
                s.prime_hits += 1;
                batch.primes.push(KnotHit::new(name, grid, layout_id));
            }
        }
    });
    match failure {
        Some(e) => Err(e),
        None => Ok(batch),
    }
}

fn search_prefixes(
    layout: &Layout,
    table: &SplitTable,
    prefixes: &[u64],
    opts: &SearchOptions,
    index: &FingerprintIndex,
) -> Result<Batch> {
    let parts = opts.execution.map(prefixes, |&p| search_prefix(layout, table, p, &opts.layout_id, index));
    let mut batch = Batch::default();
    for part in parts {
        batch.absorb(part?);
    }
    Ok(batch)
}

/// Searches one shard of a layout in memory.
pub fn search_layout(layout: &Layout, opts: &SearchOptions, index: &FingerprintIndex) -> Result<Batch> {
    let table = SplitTable::new(layout.wildcard_count(), opts.min_crossings);
    let prefixes = opts.prefixes(&table)?;
    search_prefixes(layout, &table, &prefixes, opts, index)
}

/// A pipeline run driven by files.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub layout: PathBuf,
    pub min_crossings: usize,
    pub shard_index: u64,
    pub shard_total: u64,
    pub out: PathBuf,
    /// `None` uses the built-in catalog.
    pub catalog: Option<PathBuf>,
    /// Where fingerprint caches live; `None` computes them in memory.
    pub cache_dir: Option<PathBuf>,
    pub execution: Execution,
    /// Continue from the shard's checkpoint file if there is one.
    pub resume: bool,
    /// Prefixes processed between checkpoints.
    pub checkpoint_every: u64,
}

impl RunConfig {
    pub fn new(layout: impl Into<PathBuf>, out: impl Into<PathBuf>) -> RunConfig {
        RunConfig {
            layout: layout.into(),
            min_crossings: 0,
            shard_index: 0,
            shard_total: 1,
            out: out.into(),
            catalog: None,
            cache_dir: None,
            execution: Execution::default(),
            resume: false,
            checkpoint_every: 4096,
        }
    }

    /// Layout id recorded in hits: the layout file's stem.
    pub fn layout_id(&self) -> String {
        self.layout.file_stem().map_or_else(|| "layout".into(), |s| s.to_string_lossy().into_owned())
    }

    pub fn checkpoint_path(&self) -> PathBuf {
        sibling(&self.out, &format!("checkpoint-{}-of-{}", self.shard_index, self.shard_total))
    }

    pub fn ambiguous_path(&self) -> PathBuf {
        sibling(&self.out, "ambiguous")
    }
}

fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".");
    s.push(suffix);
    PathBuf::from(s)
}

/// Progress of one shard: every prefix below `next_prefix` (in shard order)
/// has been searched and its hits written.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
struct Checkpoint {
    layout: String,
    min_crossings: usize,
    shard_index: u64,
    shard_total: u64,
    catalog_hash: String,
    next_prefix: usize,
    stats: RunStats,
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let tmp = sibling(path, "tmp");
    let text = serde_json::to_string_pretty(value).expect("serializable");
    fs::write(&tmp, text + "\n").map_err(|e| MosaicError::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| MosaicError::io(path, e))
}

/// Loads the layout and catalog named by `config`, searches the shard and
/// appends hits to the store.
pub fn run_pipeline(config: &RunConfig) -> Result<RunStats> {
    let text = fs::read_to_string(&config.layout).map_err(|e| MosaicError::io(&config.layout, e))?;
    let layout = parse_layout(&text)?;
    let catalog = match &config.catalog {
        Some(path) => Catalog::load(path)?,
        None => Catalog::builtin().clone(),
    };
    let index = match &config.cache_dir {
        Some(dir) => FingerprintIndex::load_or_build(&catalog, dir, config.execution)?,
        None => FingerprintIndex::build(&catalog, config.execution)?,
    };
    run_with_index(config, &layout, &index)
}

/// [`run_pipeline`] with the layout and index already in hand.
pub fn run_with_index(config: &RunConfig, layout: &Layout, index: &FingerprintIndex) -> Result<RunStats> {
    let opts = SearchOptions {
        layout_id: config.layout_id(),
        min_crossings: config.min_crossings,
        shard_index: config.shard_index,
        shard_total: config.shard_total,
        execution: config.execution,
    };
    let table = SplitTable::new(layout.wildcard_count(), opts.min_crossings);
    let prefixes = opts.prefixes(&table)?;

    let mut checkpoint = Checkpoint {
        layout: layout.to_string(),
        min_crossings: opts.min_crossings,
        shard_index: opts.shard_index,
        shard_total: opts.shard_total,
        catalog_hash: index.catalog_hash().to_string(),
        next_prefix: 0,
        stats: RunStats::default(),
    };
    let ckpt_path = config.checkpoint_path();
    if config.resume && ckpt_path.exists() {
        let text = fs::read_to_string(&ckpt_path).map_err(|e| MosaicError::io(&ckpt_path, e))?;
        let saved: Checkpoint = serde_json::from_str(&text)
            .map_err(|e| MosaicError::Store { path: ckpt_path.clone(), line: e.line(), message: e.to_string() })?;
        let same_run = Checkpoint { next_prefix: 0, stats: RunStats::default(), ..saved.clone() } == checkpoint;
        if !same_run {
            return Err(MosaicError::Report(format!(
                "checkpoint {} belongs to a different run",
                ckpt_path.display()
            )));
        }
        checkpoint = saved;
    }

    let mut store = HitStore::open(&config.out)?;
    let mut ambiguous = HitStore::open(config.ambiguous_path())?;
    let step = config.checkpoint_every.max(1) as usize;
    while checkpoint.next_prefix < prefixes.len() {
        let end = (checkpoint.next_prefix + step).min(prefixes.len());
        let batch = search_prefixes(layout, &table, &prefixes[checkpoint.next_prefix..end], &opts, index)?;
        store.append(&batch.primes)?;
        ambiguous.append(&batch.ambiguous)?;
        checkpoint.stats += batch.stats;
        checkpoint.next_prefix = end;
        write_json(&ckpt_path, &checkpoint)?;
    }
    if checkpoint.next_prefix == 0 {
        write_json(&ckpt_path, &checkpoint)?;
    }
    Ok(checkpoint.stats)
}

/// Minimal realizations of one knot across a set of hits.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SummaryRecord {
    pub knot: String,
    /// Crossing number read from the name, when it has the table form.
    pub crossing_number: Option<u32>,
    /// Fewest non-blank tiles seen on each mosaic size.
    pub min_nonblank_by_size: BTreeMap<usize, usize>,
    /// Smallest mosaic size seen.
    pub mosaic_size: usize,
    /// Fewest non-blank tiles seen on any size.
    pub tile_count: usize,
    /// Smallest mosaic size attaining `tile_count`.
    pub tile_minimal_size: usize,
    pub min_crossings: usize,
    pub crossing_number_realized: bool,
    pub best_mosaic: KnotHit,
    pub best_tiles: KnotHit,
    pub best_crossings: KnotHit,
}

/// One record per knot name, sorted by table order.
pub fn best_per_knot(hits: &[KnotHit]) -> Vec<SummaryRecord> {
    let mut by_knot: BTreeMap<&str, Vec<&KnotHit>> = BTreeMap::new();
    for h in hits {
        by_knot.entry(&h.knot).or_default().push(h);
    }
    let mut out: Vec<SummaryRecord> = by_knot
        .into_iter()
        .map(|(knot, hs)| {
            let pick = |key: fn(&KnotHit) -> (usize, usize, usize)| {
                (*hs.iter().min_by(|a, b| key(a).cmp(&key(b)).then_with(|| a.grid.cmp(&b.grid))).unwrap()).clone()
            };
            let best_mosaic = pick(|h| (h.n, h.nonblank, h.crossings));
            let best_tiles = pick(|h| (h.nonblank, h.n, h.crossings));
            let best_crossings = pick(|h| (h.crossings, h.nonblank, h.n));
            let mut min_nonblank_by_size = BTreeMap::new();
            for h in &hs {
                let e = min_nonblank_by_size.entry(h.n).or_insert(h.nonblank);
                *e = (*e).min(h.nonblank);
            }
            let crossing_number = name_crossing_number(knot);
            SummaryRecord {
                knot: knot.to_string(),
                crossing_number,
                min_nonblank_by_size,
                mosaic_size: best_mosaic.n,
                tile_count: best_tiles.nonblank,
                tile_minimal_size: best_tiles.n,
                min_crossings: best_crossings.crossings,
                crossing_number_realized: crossing_number == Some(best_crossings.crossings as u32),
                best_mosaic,
                best_tiles,
                best_crossings,
            }
        })
        .collect();
    out.sort_by_key(|r| name_sort_key(&r.knot));
    out
}

/// Knot names found by one store, the other, or both.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayoutComparison {
    pub only_a: Vec<String>,
    pub only_b: Vec<String>,
    pub both: Vec<String>,
}

pub fn compare_layouts(a: &[KnotHit], b: &[KnotHit]) -> LayoutComparison {
    let names = |hs: &[KnotHit]| hs.iter().map(|h| h.knot.clone()).collect::<HashSet<_>>();
    let (sa, sb) = (names(a), names(b));
    let sorted = |mut v: Vec<String>| {
        v.sort_by_key(|n| name_sort_key(n));
        v
    };
    LayoutComparison {
        only_a: sorted(sa.difference(&sb).cloned().collect()),
        only_b: sorted(sb.difference(&sa).cloned().collect()),
        both: sorted(sa.intersection(&sb).cloned().collect()),
    }
}

/// Knots grouped by (mosaic size, tile count). A `*` marks knots whose
/// fewest-tile mosaic is larger than their smallest mosaic.
pub fn report_table(summaries: &[SummaryRecord]) -> Result<String> {
    if summaries.is_empty() {
        return Err(MosaicError::Report("no knots to report".into()));
    }
    let mut rows: BTreeMap<(usize, usize), Vec<&SummaryRecord>> = BTreeMap::new();
    for s in summaries {
        rows.entry((s.mosaic_size, s.tile_count)).or_default().push(s);
    }
    let mut out = String::from("mosaic  tiles  knots\n");
    let mut marked = false;
    for ((m, t), mut knots) in rows {
        knots.sort_by_key(|s| name_sort_key(&s.knot));
        let names: Vec<String> = knots
            .iter()
            .map(|s| {
                if s.tile_minimal_size > s.mosaic_size {
                    marked = true;
                    format!("{}*", s.knot)
                } else {
                    s.knot.clone()
                }
            })
            .collect();
        writeln!(out, "{m:<7} {t:<6} {}", names.join(" ")).unwrap();
    }
    if marked {
        out.push_str("* tile number realized only on a mosaic larger than the mosaic number\n");
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mismatch {
    pub line: usize,
    pub grid: String,
    pub stored: String,
    pub found: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub checked: usize,
    pub mismatches: Vec<Mismatch>,
}

impl VerifyReport {
    pub fn is_clean(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Re-traces and re-identifies every hit.
pub fn verify(hits: &[KnotHit], index: &FingerprintIndex, exec: Execution) -> VerifyReport {
    let found = exec.map(hits, |h| match h.check() {
        Err(e) => e,
        Ok(grid) => match classify(&grid, index) {
            Ok(Verdict::Prime(name)) => name,
            Ok(Verdict::Ambiguous(names)) => Identification::Ambiguous(names).to_string(),
            Ok(other) => format!("{other:?}").to_lowercase(),
            Err(e) => e.to_string(),
        },
    });
    let mismatches = hits
        .iter()
        .zip(found)
        .enumerate()
        .filter(|(_, (h, f))| h.knot != *f)
        .map(|(i, (h, f))| Mismatch { line: i + 1, grid: h.grid.clone(), stored: h.knot.clone(), found: f })
        .collect();
    VerifyReport { checked: hits.len(), mismatches }
}
