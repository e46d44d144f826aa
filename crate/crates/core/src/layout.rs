//! Space-efficient layouts and the enumeration of their interior fillings.
//!
//! A layout is matrix text where `*` marks a wildcard cell that must hold one
//! of the four-point tiles `T7`..`T10`. Fillings are generated by splitting
//! the wildcard list into a prefix of `k = floor(n/2)` cells and a suffix of
//! `n - k` cells, enumerating every vector over `{7, 8, 9, 10}` for each part,
//! and joining only the pairs whose combined count of crossing tiles reaches
//! the requested minimum `m`.
//!
//! Order is deterministic: prefix-major, suffix-minor, each lexicographic with
//! `7 < 8 < 9 < 10`.

use std::fmt;

use crate::error::{MosaicError, Result};
use crate::tile::{tokenize_matrix, CellCoord, MosaicGrid, Side, Tile};

/// Largest wildcard count the split tables support (suffix tables hold
/// `4^(n - k)` codes per crossing threshold).
pub const MAX_WILDCARDS: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Layout {
    n: usize,
    cells: Vec<Option<Tile>>,
    wildcards: Vec<CellCoord>,
    /// The layout with every wildcard replaced by `T9`.
    template: MosaicGrid,
}

impl Layout {
    pub fn size(&self) -> usize {
        self.n
    }

    pub fn cell(&self, at: CellCoord) -> Option<Tile> {
        self.cells[at.row * self.n + at.col]
    }

    /// Wildcard coordinates in row-major order.
    pub fn wildcards(&self) -> &[CellCoord] {
        &self.wildcards
    }

    pub fn wildcard_count(&self) -> usize {
        self.wildcards.len()
    }

    /// Crossing tiles fixed by the layout itself (outside the wildcards).
    pub fn fixed_crossings(&self) -> usize {
        self.cells.iter().flatten().filter(|t| t.is_crossing()).count()
    }

    /// Non-blank tiles of any filling.
    pub fn nonblank_count(&self) -> usize {
        self.template.nonblank_count()
    }

    pub fn template(&self) -> &MosaicGrid {
        &self.template
    }

    /// The grid for one filling vector.
    pub fn fill(&self, fill: &FillVector) -> MosaicGrid {
        assert_eq!(fill.0.len(), self.wildcards.len(), "fill vector length mismatch");
        let mut grid = self.template.clone();
        for (&at, &t) in self.wildcards.iter().zip(&fill.0) {
            grid.set(at, t);
        }
        grid
    }

    /// Wraps a complete grid as a layout without wildcards.
    pub fn from_grid(grid: &MosaicGrid) -> Result<Layout> {
        let cells = grid.cells().iter().map(|t| Some(*t)).collect();
        Layout::validated(grid.size(), cells)
    }

    /// Replaces every four-point tile of `grid` with a wildcard.
    pub fn wildcard_four_point(grid: &MosaicGrid) -> Result<Layout> {
        let cells = grid.cells().iter().map(|t| (!t.is_four_point()).then_some(*t)).collect();
        Layout::validated(grid.size(), cells)
    }

    fn validated(n: usize, cells: Vec<Option<Tile>>) -> Result<Layout> {
        let mut template = MosaicGrid::blank(n)?;
        let mut wildcards = Vec::new();
        for (i, cell) in cells.iter().enumerate() {
            let at = CellCoord::new(i / n, i % n);
            match cell {
                Some(t) => template.set(at, *t),
                None => {
                    template.set(at, Tile::new(9)?);
                    wildcards.push(at);
                }
            }
        }
        if wildcards.len() > MAX_WILDCARDS {
            return Err(MosaicError::Layout {
                cell: wildcards[MAX_WILDCARDS],
                message: format!("more than {MAX_WILDCARDS} wildcards"),
            });
        }
        for &at in &wildcards {
            for side in Side::ALL {
                let Some(next) = at.step(side, n) else {
                    return Err(MosaicError::Layout {
                        cell: at,
                        message: format!("wildcard on the outer boundary ({side} side)"),
                    });
                };
                if !template.get(next).connection_points().contains(side.opposite()) {
                    return Err(MosaicError::Layout {
                        cell: at,
                        message: format!("neighbour {next} has no connection point facing the wildcard"),
                    });
                }
            }
        }
        if let Some(mark) = template.edge_marks().first() {
            return Err(MosaicError::Layout {
                cell: mark.cell,
                message: format!("not suitably connected on its {} side", mark.side),
            });
        }
        Ok(Layout { n, cells, wildcards, template })
    }
}

/// Matrix text with `*` for wildcards.
impl fmt::Display for Layout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, row) in self.cells.chunks(self.n).enumerate() {
            if i > 0 {
                f.write_str("\n")?;
            }
            let parts: Vec<String> = row
                .iter()
                .map(|c| c.map_or_else(|| "*".to_string(), |t| t.kind().to_string()))
                .collect();
            f.write_str(&parts.join(" "))?;
        }
        Ok(())
    }
}

/// Parses layout text; `*` marks wildcard cells.
pub fn parse_layout(text: &str) -> Result<Layout> {
    let rows = tokenize_matrix(text)?;
    let n = rows.len();
    let mut cells = Vec::with_capacity(n * n);
    for (r, toks) in rows {
        for (c, tok) in toks.into_iter().enumerate() {
            if tok == "*" {
                cells.push(None);
                continue;
            }
            let kind: u8 = tok.parse().ok().filter(|k| *k <= 10).ok_or_else(|| MosaicError::Parse {
                row: r,
                col: c + 1,
                message: format!("expected a tile kind 0..=10 or '*', got {tok:?}"),
            })?;
            cells.push(Some(Tile::new(kind)?));
        }
    }
    Layout::validated(n, cells)
}

/// Sizes of the split enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumerationPlan {
    /// Number of wildcard cells.
    pub n_interior: usize,
    /// Prefix length, `floor(n_interior / 2)`.
    pub k: usize,
    /// Minimum number of crossing tiles among the wildcards.
    pub m: usize,
}

impl EnumerationPlan {
    pub fn new(n_interior: usize, m: usize) -> Self {
        EnumerationPlan { n_interior, k: n_interior / 2, m }
    }

    pub fn candidates(&self) -> u128 {
        count_candidates(self.n_interior as u32, self.m as u32)
    }
}

/// Entries for the wildcards, each one of `T7`..`T10`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FillVector(pub Vec<Tile>);

impl FillVector {
    pub fn crossing_count(&self) -> usize {
        self.0.iter().filter(|t| t.is_crossing()).count()
    }
}

/// `2^n * sum_{i=m}^{n} C(n, i)`: vectors of length `n` over `{7,8,9,10}`
/// with at least `m` entries in `{9, 10}`. Zero when `m > n`.
pub fn count_candidates(n: u32, m: u32) -> u128 {
    assert!(n <= 63, "count_candidates supports n <= 63");
    if m > n {
        return 0;
    }
    let mut binom: u128 = 1;
    let mut sum: u128 = 0;
    for i in 0..=n {
        if i >= m {
            sum += binom;
        }
        binom = binom * (n - i) as u128 / (i + 1) as u128;
    }
    sum << n
}

/// Precomputed prefix/suffix tables for one `(wildcard count, m)` pair.
#[derive(Debug, Clone)]
pub struct SplitTable {
    plan: EnumerationPlan,
    suffix_len: usize,
    /// `suffixes_at_least[c]`: suffix codes with at least `c` crossings, ascending.
    suffixes_at_least: Vec<Vec<u32>>,
}

/// Entries are packed two bits each, first entry most significant, so code
/// order is lexicographic order.
fn crossings_in(code: u64) -> usize {
    (code & 0xAAAA_AAAA_AAAA_AAAA).count_ones() as usize
}

impl SplitTable {
    pub fn new(n_interior: usize, m: usize) -> Self {
        assert!(n_interior <= MAX_WILDCARDS, "at most {MAX_WILDCARDS} wildcards");
        let plan = EnumerationPlan::new(n_interior, m);
        let suffix_len = n_interior - plan.k;
        let mut suffixes_at_least = vec![Vec::new(); suffix_len + 1];
        for code in 0..1u32 << (2 * suffix_len) {
            let c = crossings_in(code as u64);
            for list in &mut suffixes_at_least[..=c] {
                list.push(code);
            }
        }
        SplitTable { plan, suffix_len, suffixes_at_least }
    }

    pub fn plan(&self) -> EnumerationPlan {
        self.plan
    }

    pub fn prefix_count(&self) -> u64 {
        1u64 << (2 * self.plan.k)
    }

    /// Suffix codes that may follow `prefix` (ascending).
    pub fn suffixes_for(&self, prefix: u64) -> &[u32] {
        if self.plan.m > self.plan.n_interior {
            return &[];
        }
        let need = self.plan.m.saturating_sub(crossings_in(prefix));
        self.suffixes_at_least.get(need).map_or(&[], Vec::as_slice)
    }

    /// Writes the tiles of `(prefix, suffix)` into `out`.
    pub fn decode(&self, prefix: u64, suffix: u32, out: &mut [Tile]) {
        let k = self.plan.k;
        for (i, slot) in out[..k].iter_mut().enumerate() {
            *slot = Tile::FILLERS[(prefix >> (2 * (k - 1 - i)) & 3) as usize];
        }
        let s = self.suffix_len;
        for (i, slot) in out[k..k + s].iter_mut().enumerate() {
            *slot = Tile::FILLERS[(suffix >> (2 * (s - 1 - i)) & 3) as usize];
        }
    }

    pub fn fill_vector(&self, prefix: u64, suffix: u32) -> FillVector {
        let mut v = vec![Tile::BLANK; self.plan.n_interior];
        self.decode(prefix, suffix, &mut v);
        FillVector(v)
    }
}

impl Layout {
    /// Calls `f` with every grid whose fill vector starts with `prefix`, in
    /// suffix order. One grid buffer is reused across calls.
    pub fn for_each_with_prefix(&self, table: &SplitTable, prefix: u64, mut f: impl FnMut(&MosaicGrid)) {
        let mut scratch = vec![Tile::BLANK; self.wildcard_count()];
        let mut grid = self.template().clone();
        for &suffix in table.suffixes_for(prefix) {
            table.decode(prefix, suffix, &mut scratch);
            for (&at, &t) in self.wildcards().iter().zip(&scratch) {
                grid.set(at, t);
            }
            f(&grid);
        }
    }
}

/// Streams the grids of a layout, optionally restricted to one shard of the
/// prefix range (`prefix % total == index`).
pub struct FillEnumerator<'a> {
    layout: &'a Layout,
    table: SplitTable,
    prefixes: std::iter::StepBy<std::ops::Range<u64>>,
    current: Option<u64>,
    suffix_pos: usize,
    scratch: Vec<Tile>,
}

impl<'a> FillEnumerator<'a> {
    fn new(layout: &'a Layout, m: usize, shard_index: u64, shard_total: u64) -> Self {
        assert!(shard_total > 0 && shard_index < shard_total, "shard index out of range");
        let table = SplitTable::new(layout.wildcard_count(), m);
        let prefixes = (shard_index..table.prefix_count()).step_by(shard_total as usize);
        FillEnumerator {
            layout,
            table,
            prefixes,
            current: None,
            suffix_pos: 0,
            scratch: vec![Tile::BLANK; layout.wildcard_count()],
        }
    }

    pub fn table(&self) -> &SplitTable {
        &self.table
    }
}

impl Iterator for FillEnumerator<'_> {
    type Item = MosaicGrid;

    fn next(&mut self) -> Option<MosaicGrid> {
        loop {
            let prefix = match self.current {
                Some(p) => p,
                None => {
                    let p = self.prefixes.next()?;
                    self.current = Some(p);
                    self.suffix_pos = 0;
                    p
                }
            };
            let suffixes = self.table.suffixes_for(prefix);
            if let Some(&suffix) = suffixes.get(self.suffix_pos) {
                self.suffix_pos += 1;
                self.table.decode(prefix, suffix, &mut self.scratch);
                let mut grid = self.layout.template().clone();
                for (&at, &t) in self.layout.wildcards().iter().zip(&self.scratch) {
                    grid.set(at, t);
                }
                return Some(grid);
            }
            self.current = None;
        }
    }
}

/// Every filling with at least `m` crossing tiles among the wildcards.
pub fn enumerate_fills(layout: &Layout, m: usize) -> FillEnumerator<'_> {
    FillEnumerator::new(layout, m, 0, 1)
}

/// The fillings whose prefix index is congruent to `shard_index` modulo
/// `shard_total`.
pub fn shard_fills(layout: &Layout, m: usize, shard_index: u64, shard_total: u64) -> FillEnumerator<'_> {
    FillEnumerator::new(layout, m, shard_index, shard_total)
}
