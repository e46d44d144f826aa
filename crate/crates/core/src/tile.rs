//! Tiles, the mosaic grid, and the integer-matrix text codec.
//!
//! A mosaic is written as a square matrix where tile `T_i` is the number `i`:
//!
//! ```text
//! 0 2 1 0
//! 2 10 9 1
//! 3 9 8 4
//! 0 3 4 0
//! ```
//!
//! Rows may be separated by newlines or by `/`, entries by whitespace or
//! commas. The serializer always emits one row per line, single-space
//! separated.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{MosaicError, Result};

/// One side of a tile.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Side {
    Top,
    Bottom,
    Left,
    Right,
}

impl Side {
    pub const ALL: [Side; 4] = [Side::Top, Side::Bottom, Side::Left, Side::Right];

    pub fn opposite(self) -> Side {
        match self {
            Side::Top => Side::Bottom,
            Side::Bottom => Side::Top,
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }

    /// Next side counterclockwise, as drawn (rows grow downwards).
    pub fn ccw(self) -> Side {
        match self {
            Side::Bottom => Side::Right,
            Side::Right => Side::Top,
            Side::Top => Side::Left,
            Side::Left => Side::Bottom,
        }
    }

    pub fn is_vertical(self) -> bool {
        matches!(self, Side::Top | Side::Bottom)
    }

    fn bit(self) -> u8 {
        match self {
            Side::Top => 1,
            Side::Bottom => 2,
            Side::Left => 4,
            Side::Right => 8,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Side::Top => "Top",
            Side::Bottom => "Bottom",
            Side::Left => "Left",
            Side::Right => "Right",
        };
        f.write_str(s)
    }
}

/// Bit set of [`Side`]s.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct SideSet(u8);

impl SideSet {
    pub const EMPTY: SideSet = SideSet(0);

    pub fn contains(self, side: Side) -> bool {
        self.0 & side.bit() != 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = Side> {
        Side::ALL.into_iter().filter(move |s| self.contains(*s))
    }
}

impl FromIterator<Side> for SideSet {
    fn from_iter<I: IntoIterator<Item = Side>>(iter: I) -> Self {
        SideSet(iter.into_iter().fold(0, |acc, s| acc | s.bit()))
    }
}

// Connection-point masks indexed by tile kind (Top=1, Bottom=2, Left=4, Right=8).
const CONNECTIONS: [u8; 11] = [0, 6, 10, 9, 5, 12, 3, 15, 15, 15, 15];

/// One of the eleven mosaic tiles `T0`..`T10`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Tile(u8);

impl Tile {
    pub const BLANK: Tile = Tile(0);
    /// Four-point tiles that may fill a layout wildcard, in enumeration order.
    pub const FILLERS: [Tile; 4] = [Tile(7), Tile(8), Tile(9), Tile(10)];

    pub fn new(kind: u8) -> Result<Tile> {
        if kind <= 10 {
            Ok(Tile(kind))
        } else {
            Err(MosaicError::InvalidTile(kind as i64))
        }
    }

    pub const fn kind(self) -> u8 {
        self.0
    }

    pub fn all() -> impl Iterator<Item = Tile> {
        (0..=10).map(Tile)
    }

    pub fn is_blank(self) -> bool {
        self.0 == 0
    }

    pub fn is_crossing(self) -> bool {
        self.0 == 9 || self.0 == 10
    }

    /// Tiles carrying two strands (`T7`..`T10`).
    pub fn is_four_point(self) -> bool {
        self.0 >= 7
    }

    /// Number of strands passing through the tile.
    pub fn strand_count(self) -> usize {
        match self.0 {
            0 => 0,
            1..=6 => 1,
            _ => 2,
        }
    }

    pub fn connection_points(self) -> SideSet {
        SideSet(CONNECTIONS[self.0 as usize])
    }

    /// Side where a strand entering through `entry` leaves the tile.
    pub fn exit_side(self, entry: Side) -> Result<Side> {
        use Side::*;
        if !self.connection_points().contains(entry) {
            return Err(MosaicError::NoStrand { tile: self.0, side: entry });
        }
        let exit = match (self.0, entry) {
            (1, Left) => Bottom,
            (1, Bottom) => Left,
            (2, Bottom) => Right,
            (2, Right) => Bottom,
            (3, Top) => Right,
            (3, Right) => Top,
            (4, Top) => Left,
            (4, Left) => Top,
            (7, Top) => Right,
            (7, Right) => Top,
            (7, Bottom) => Left,
            (7, Left) => Bottom,
            (8, Top) => Left,
            (8, Left) => Top,
            (8, Bottom) => Right,
            (8, Right) => Bottom,
            // T5, T6, T9, T10 pass straight through.
            (_, s) => s.opposite(),
        };
        Ok(exit)
    }

    /// Whether a strand entering through `entry` passes under the other one.
    ///
    /// `T9` carries the vertical strand over, `T10` the horizontal one.
    pub fn passes_under(self, entry: Side) -> bool {
        match self.0 {
            9 => !entry.is_vertical(),
            10 => entry.is_vertical(),
            _ => false,
        }
    }

    /// The tile seen after rotating the whole mosaic by 180 degrees.
    pub fn rotated_half_turn(self) -> Tile {
        Tile(match self.0 {
            1 => 3,
            3 => 1,
            2 => 4,
            4 => 2,
            k => k,
        })
    }

    /// The tile seen after reflecting the mosaic left to right.
    ///
    /// Reflection reverses every crossing, so `T9` and `T10` swap.
    pub fn mirrored_left_right(self) -> Tile {
        Tile(match self.0 {
            1 => 2,
            2 => 1,
            3 => 4,
            4 => 3,
            7 => 8,
            8 => 7,
            9 => 10,
            10 => 9,
            k => k,
        })
    }
}

impl fmt::Display for Tile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "T{}", self.0)
    }
}

/// Zero-based cell position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CellCoord {
    pub row: usize,
    pub col: usize,
}

impl CellCoord {
    pub const fn new(row: usize, col: usize) -> Self {
        CellCoord { row, col }
    }

    /// The neighbouring cell across `side`, if it lies inside an `n`-grid.
    pub fn step(self, side: Side, n: usize) -> Option<CellCoord> {
        let CellCoord { row, col } = self;
        let next = match side {
            Side::Top => CellCoord::new(row.checked_sub(1)?, col),
            Side::Bottom => CellCoord::new(row + 1, col),
            Side::Left => CellCoord::new(row, col.checked_sub(1)?),
            Side::Right => CellCoord::new(row, col + 1),
        };
        (next.row < n && next.col < n).then_some(next)
    }
}

impl fmt::Display for CellCoord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.row, self.col)
    }
}

/// A mismatched edge: `side` of `cell` has a connection point the other
/// side lacks (or vice versa), or faces the outer boundary with one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EdgeMark {
    pub cell: CellCoord,
    pub side: Side,
}

/// An `n`×`n` array of tiles.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MosaicGrid {
    n: usize,
    cells: Vec<Tile>,
}

impl MosaicGrid {
    pub fn blank(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(MosaicError::Parse { row: 0, col: 0, message: "empty grid".into() });
        }
        Ok(MosaicGrid { n, cells: vec![Tile::BLANK; n * n] })
    }

    /// Builds a grid from rows of tile kinds.
    pub fn from_rows<R: AsRef<[u8]>>(rows: &[R]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(MosaicError::Parse { row: 0, col: 0, message: "empty grid".into() });
        }
        let mut cells = Vec::with_capacity(n * n);
        for (r, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != n {
                return Err(MosaicError::Parse {
                    row: r + 1,
                    col: row.len().min(n) + 1,
                    message: format!("row has {} entries, expected {n}", row.len()),
                });
            }
            for (c, &k) in row.iter().enumerate() {
                cells.push(Tile::new(k).map_err(|_| MosaicError::Parse {
                    row: r + 1,
                    col: c + 1,
                    message: format!("tile kind {k} out of range 0..=10"),
                })?);
            }
        }
        Ok(MosaicGrid { n, cells })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, at: CellCoord) -> Tile {
        self.cells[at.row * self.n + at.col]
    }

    pub fn set(&mut self, at: CellCoord, tile: Tile) {
        self.cells[at.row * self.n + at.col] = tile;
    }

    pub fn cells(&self) -> &[Tile] {
        &self.cells
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Tile]> {
        self.cells.chunks(self.n)
    }

    pub fn coords(&self) -> impl Iterator<Item = CellCoord> {
        let n = self.n;
        (0..n * n).map(move |i| CellCoord::new(i / n, i % n))
    }

    pub fn to_rows(&self) -> Vec<Vec<u8>> {
        self.rows().map(|r| r.iter().map(|t| t.kind()).collect()).collect()
    }

    pub fn nonblank_count(&self) -> usize {
        self.cells.iter().filter(|t| !t.is_blank()).count()
    }

    pub fn crossing_count(&self) -> usize {
        self.cells.iter().filter(|t| t.is_crossing()).count()
    }

    /// Total strand incidences: every non-blank tile once, two-strand tiles twice.
    pub fn strand_incidences(&self) -> usize {
        self.cells.iter().map(|t| t.strand_count()).sum()
    }

    /// First non-blank cell in row-major order.
    pub fn first_nonblank(&self) -> Option<CellCoord> {
        self.cells.iter().position(|t| !t.is_blank()).map(|i| CellCoord::new(i / self.n, i % self.n))
    }

    /// True iff every shared edge has connection points on both sides or on
    /// neither, and no connection point faces the outer boundary.
    pub fn is_suitably_connected(&self) -> bool {
        self.edge_marks_inner(true).is_empty()
    }

    /// Every edge that breaks suitable connectedness. Shared edges are
    /// reported once, from the upper or left cell.
    pub fn edge_marks(&self) -> Vec<EdgeMark> {
        self.edge_marks_inner(false)
    }

    fn edge_marks_inner(&self, stop_at_first: bool) -> Vec<EdgeMark> {
        let n = self.n;
        let mut marks = Vec::new();
        for at in self.coords() {
            let points = self.get(at).connection_points();
            for side in Side::ALL {
                let here = points.contains(side);
                match at.step(side, n) {
                    None => {
                        if here {
                            marks.push(EdgeMark { cell: at, side });
                        }
                    }
                    Some(next) => {
                        // Shared edges are checked from the upper/left cell only.
                        if matches!(side, Side::Top | Side::Left) {
                            continue;
                        }
                        let there = self.get(next).connection_points().contains(side.opposite());
                        if here != there {
                            marks.push(EdgeMark { cell: at, side });
                        }
                    }
                }
                if stop_at_first && !marks.is_empty() {
                    return marks;
                }
            }
        }
        marks
    }

    /// The grid rotated by a half turn.
    pub fn rotated_half_turn(&self) -> MosaicGrid {
        let cells = self.cells.iter().rev().map(|t| t.rotated_half_turn()).collect();
        MosaicGrid { n: self.n, cells }
    }

    /// The grid reflected left to right (columns reversed, tiles mirrored).
    pub fn mirrored_left_right(&self) -> MosaicGrid {
        let cells = self
            .rows()
            .flat_map(|row| row.iter().rev().map(|t| t.mirrored_left_right()))
            .collect();
        MosaicGrid { n: self.n, cells }
    }

    /// Single-line form, rows joined by ` / `.
    pub fn to_inline(&self) -> String {
        self.rows()
            .map(|row| row.iter().map(|t| t.kind().to_string()).collect::<Vec<_>>().join(" "))
            .collect::<Vec<_>>()
            .join(" / ")
    }
}

impl fmt::Debug for MosaicGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MosaicGrid[{}]", self.to_inline())
    }
}

/// Matrix text, one row per line.
impl fmt::Display for MosaicGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, row) in self.rows().enumerate() {
            if i > 0 {
                f.write_str("\n")?;
            }
            for (j, t) in row.iter().enumerate() {
                if j > 0 {
                    f.write_str(" ")?;
                }
                write!(f, "{}", t.kind())?;
            }
        }
        Ok(())
    }
}

impl FromStr for MosaicGrid {
    type Err = MosaicError;

    fn from_str(s: &str) -> Result<Self> {
        parse_matrix(s)
    }
}

/// Splits matrix text into rows of raw tokens (1-based row numbers kept
/// for error reporting; blank lines dropped).
pub(crate) fn tokenize_matrix(text: &str) -> Result<Vec<(usize, Vec<&str>)>> {
    let rows: Vec<(usize, Vec<&str>)> = text
        .split(['\n', '/'])
        .map(|line| line.split(|c: char| c.is_whitespace() || c == ',').filter(|t| !t.is_empty()).collect::<Vec<_>>())
        .filter(|toks| !toks.is_empty())
        .enumerate()
        .map(|(i, toks)| (i + 1, toks))
        .collect();
    if rows.is_empty() {
        return Err(MosaicError::Parse { row: 0, col: 0, message: "empty input".into() });
    }
    let n = rows.len();
    for (r, toks) in &rows {
        if toks.len() != n {
            return Err(MosaicError::Parse {
                row: *r,
                col: toks.len().min(n) + 1,
                message: format!("row has {} entries but the matrix has {n} rows", toks.len()),
            });
        }
    }
    Ok(rows)
}

/// Parses matrix text into a grid.
pub fn parse_matrix(text: &str) -> Result<MosaicGrid> {
    let rows = tokenize_matrix(text)?;
    let n = rows.len();
    let mut cells = Vec::with_capacity(n * n);
    for (r, toks) in rows {
        for (c, tok) in toks.into_iter().enumerate() {
            let kind: i64 = tok.parse().map_err(|_| MosaicError::Parse {
                row: r,
                col: c + 1,
                message: format!("not an integer: {tok:?}"),
            })?;
            if !(0..=10).contains(&kind) {
                return Err(MosaicError::Parse {
                    row: r,
                    col: c + 1,
                    message: format!("tile kind {kind} out of range 0..=10"),
                });
            }
            cells.push(Tile(kind as u8));
        }
    }
    Ok(MosaicGrid { n, cells })
}

pub fn serialize_matrix(grid: &MosaicGrid) -> String {
    grid.to_string()
}

/// JSON form used by the service: `{"n": 4, "cells": [[0,2,1,0], ...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridJson {
    pub n: usize,
    pub cells: Vec<Vec<i64>>,
}

impl From<&MosaicGrid> for GridJson {
    fn from(grid: &MosaicGrid) -> Self {
        GridJson {
            n: grid.size(),
            cells: grid.rows().map(|r| r.iter().map(|t| t.kind() as i64).collect()).collect(),
        }
    }
}

impl TryFrom<&GridJson> for MosaicGrid {
    type Error = MosaicError;

    fn try_from(json: &GridJson) -> Result<Self> {
        if json.n == 0 || json.cells.len() != json.n {
            return Err(MosaicError::Parse {
                row: json.cells.len().min(json.n) + 1,
                col: 0,
                message: format!("expected {} rows, found {}", json.n, json.cells.len()),
            });
        }
        let mut cells = Vec::with_capacity(json.n * json.n);
        for (r, row) in json.cells.iter().enumerate() {
            if row.len() != json.n {
                return Err(MosaicError::Parse {
                    row: r + 1,
                    col: row.len().min(json.n) + 1,
                    message: format!("row has {} entries, expected {}", row.len(), json.n),
                });
            }
            for (c, &k) in row.iter().enumerate() {
                if !(0..=10).contains(&k) {
                    return Err(MosaicError::Parse {
                        row: r + 1,
                        col: c + 1,
                        message: format!("tile kind {k} out of range 0..=10"),
                    });
                }
                cells.push(Tile(k as u8));
            }
        }
        Ok(MosaicGrid { n: json.n, cells })
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use proptest::prelude::*;

    pub const TREFOIL: &str = "0 2 1 0\n2 10 9 1\n3 9 8 4\n0 3 4 0";

    fn sides(list: &[Side]) -> SideSet {
        list.iter().copied().collect()
    }

    #[test]
    fn connection_points_table() {
        use Side::*;
        assert_eq!(Tile(0).connection_points(), SideSet::EMPTY);
        assert_eq!(Tile(1).connection_points(), sides(&[Left, Bottom]));
        assert_eq!(Tile(2).connection_points(), sides(&[Bottom, Right]));
        assert_eq!(Tile(3).connection_points(), sides(&[Top, Right]));
        assert_eq!(Tile(4).connection_points(), sides(&[Top, Left]));
        assert_eq!(Tile(5).connection_points(), sides(&[Left, Right]));
        assert_eq!(Tile(6).connection_points(), sides(&[Top, Bottom]));
        for k in 7..=10 {
            assert_eq!(Tile(k).connection_points().len(), 4);
        }
    }

    #[test]
    fn exit_side_examples() {
        assert_eq!(Tile(1).exit_side(Side::Left).unwrap(), Side::Bottom);
        assert_eq!(Tile(8).exit_side(Side::Top).unwrap(), Side::Left);
        assert_eq!(Tile(10).exit_side(Side::Bottom).unwrap(), Side::Top);
        assert!(matches!(Tile(1).exit_side(Side::Top), Err(MosaicError::NoStrand { .. })));
        assert!(Tile(0).exit_side(Side::Left).is_err());
    }

    #[test]
    fn strand_pairings_are_involutions() {
        for t in Tile::all() {
            for s in t.connection_points().iter() {
                let out = t.exit_side(s).unwrap();
                assert!(t.connection_points().contains(out));
                assert_ne!(out, s);
                assert_eq!(t.exit_side(out).unwrap(), s, "{t} {s}");
            }
        }
    }

    #[test]
    fn side_opposite_is_involution() {
        for s in Side::ALL {
            assert_eq!(s.opposite().opposite(), s);
            assert_eq!(s.ccw().ccw(), s.opposite());
        }
    }

    #[test]
    fn parse_trefoil_and_counts() {
        let g = parse_matrix(TREFOIL).unwrap();
        assert_eq!(g.size(), 4);
        assert_eq!(g.get(CellCoord::new(1, 1)), Tile(10));
        assert_eq!(g.nonblank_count(), 12);
        assert_eq!(g.crossing_count(), 3);
        assert!(g.is_suitably_connected());
        let inline: MosaicGrid = "0 2 1 0 / 2 10 9 1 / 3 9 8 4 / 0 3 4 0".parse().unwrap();
        assert_eq!(inline, g);
        let csv: MosaicGrid = "0,2,1,0\n2,10,9,1\n3,9,8,4\n0,3,4,0\n".parse().unwrap();
        assert_eq!(csv, g);
        assert_eq!(serialize_matrix(&g), TREFOIL);
    }

    #[test]
    fn parse_small_and_errors() {
        let g = parse_matrix("0").unwrap();
        assert_eq!(g.size(), 1);
        assert_eq!(serialize_matrix(&g), "0");
        match parse_matrix("0 2\n2 11") {
            Err(MosaicError::Parse { row: 2, col: 2, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse_matrix(""), Err(MosaicError::Parse { .. })));
        assert!(matches!(parse_matrix("  \n "), Err(MosaicError::Parse { .. })));
        assert!(matches!(parse_matrix("0 0 0\n0 0 0"), Err(MosaicError::Parse { .. })));
        assert!(matches!(parse_matrix("0 x\n0 0"), Err(MosaicError::Parse { row: 1, col: 2, .. })));
        assert!(matches!(parse_matrix("0 -1\n0 0"), Err(MosaicError::Parse { .. })));
    }

    #[test]
    fn connectivity_examples() {
        assert!(MosaicGrid::blank(5).unwrap().is_suitably_connected());
        let g = parse_matrix("5").unwrap();
        assert!(!g.is_suitably_connected());
        assert_eq!(g.edge_marks().len(), 2);
        let g = parse_matrix("0 2 0\n0 0 0\n0 0 0").unwrap();
        let marks = g.edge_marks();
        assert_eq!(
            marks,
            vec![
                EdgeMark { cell: CellCoord::new(0, 1), side: Side::Bottom },
                EdgeMark { cell: CellCoord::new(0, 1), side: Side::Right },
            ]
        );
    }

    #[test]
    fn grid_json_round_trip_and_errors() {
        let g = parse_matrix(TREFOIL).unwrap();
        let json = GridJson::from(&g);
        assert_eq!(MosaicGrid::try_from(&json).unwrap(), g);
        let bad = GridJson { n: 2, cells: vec![vec![0, 2], vec![2, 11]] };
        assert!(MosaicGrid::try_from(&bad).is_err());
        let bad = GridJson { n: 3, cells: vec![vec![0, 0, 0]] };
        assert!(MosaicGrid::try_from(&bad).is_err());
    }

    pub fn arb_grid(max_n: usize) -> impl Strategy<Value = MosaicGrid> {
        (1..=max_n).prop_flat_map(|n| {
            proptest::collection::vec(0u8..=10, n * n).prop_map(move |kinds| MosaicGrid {
                n,
                cells: kinds.into_iter().map(Tile).collect(),
            })
        })
    }

    proptest! {
        #[test]
        fn text_round_trip(g in arb_grid(7)) {
            let text = serialize_matrix(&g);
            prop_assert_eq!(parse_matrix(&text).unwrap(), g.clone());
            prop_assert_eq!(parse_matrix(&g.to_inline()).unwrap(), g);
        }

        #[test]
        fn counts_subset(g in arb_grid(6)) {
            prop_assert!(g.crossing_count() <= g.nonblank_count());
        }

        #[test]
        fn connectivity_invariant_under_half_turn(g in arb_grid(5)) {
            prop_assert_eq!(g.is_suitably_connected(), g.rotated_half_turn().is_suitably_connected());
            prop_assert_eq!(g.rotated_half_turn().rotated_half_turn(), g);
        }

        #[test]
        fn four_point_tiles_interchangeable(g in arb_grid(5), seed in any::<u64>()) {
            let mut as_t9 = g.clone();
            let mut shuffled = g.clone();
            for (i, at) in g.coords().enumerate() {
                if g.get(at).is_four_point() {
                    as_t9.set(at, Tile(9));
                    shuffled.set(at, Tile::FILLERS[((seed >> (2 * (i % 32))) & 3) as usize]);
                }
            }
            prop_assert_eq!(shuffled.is_suitably_connected(), as_t9.is_suitably_connected());
        }
    }
}
