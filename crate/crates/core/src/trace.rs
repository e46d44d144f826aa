//! Strand tracing, Gauss pairs and DT codes.
//!
//! The walk starts at the first non-blank cell in row-major order (always a
//! `T2`), leaves through its right side, and follows the strand from cell to
//! cell until it re-enters the start cell through the bottom. A closed walk
//! that visited fewer incidences than the grid holds means the diagram has
//! more than one component.

use std::collections::HashMap;
use std::fmt;

use crate::error::{MosaicError, Result};
use crate::pd::{Crossing, PdCode, Sign};
use crate::tile::{CellCoord, MosaicGrid, Side, Tile};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TraceKind {
    Knot,
    Link,
    /// One component and no crossing tiles.
    UnknottedNoCrossings,
}

/// One cell incidence along the walk.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Visit {
    pub cell: CellCoord,
    pub entry: Side,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CrossingVisit {
    pub cell: CellCoord,
    /// 1-based label in traversal order.
    pub label: u32,
    pub entry: Side,
    pub passed_under: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceResult {
    pub kind: TraceKind,
    pub visits: Vec<Visit>,
    pub crossing_visits: Vec<CrossingVisit>,
}

impl TraceResult {
    pub fn crossing_count(&self) -> usize {
        self.crossing_visits.len() / 2
    }
}

/// Walks the strand through `grid` from the canonical start.
pub fn trace(grid: &MosaicGrid) -> Result<TraceResult> {
    let n = grid.size();
    let start = grid.first_nonblank().ok_or_else(|| MosaicError::Malformed("no strand".into()))?;
    let start_tile = grid.get(start);
    if start_tile != Tile::new(2)? {
        return Err(MosaicError::Malformed(format!(
            "first non-blank tile at {start} is {start_tile}, expected T2"
        )));
    }
    let expected = grid.strand_incidences();
    let mut visits = Vec::with_capacity(expected);
    let mut crossing_visits = Vec::new();
    visits.push(Visit { cell: start, entry: Side::Bottom });

    let mut at = start;
    let mut exit = Side::Right;
    loop {
        let next = at.step(exit, n).ok_or(MosaicError::Connectivity { cell: at, side: exit })?;
        let entry = exit.opposite();
        let tile = grid.get(next);
        if !tile.connection_points().contains(entry) {
            return Err(MosaicError::Connectivity { cell: next, side: entry });
        }
        if next == start {
            // Only T2's bottom is left to come back through.
            break;
        }
        if visits.len() >= expected {
            return Err(MosaicError::Malformed("walk does not close".into()));
        }
        visits.push(Visit { cell: next, entry });
        if tile.is_crossing() {
            crossing_visits.push(CrossingVisit {
                cell: next,
                label: crossing_visits.len() as u32 + 1,
                entry,
                passed_under: tile.passes_under(entry),
            });
        }
        at = next;
        exit = tile.exit_side(entry)?;
    }

    let kind = if visits.len() < expected {
        TraceKind::Link
    } else if crossing_visits.is_empty() {
        TraceKind::UnknottedNoCrossings
    } else {
        TraceKind::Knot
    };
    Ok(TraceResult { kind, visits, crossing_visits })
}

/// `(odd label, signed even label)` per crossing, sorted by odd label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GaussPairs(Vec<(u32, i64)>);

impl GaussPairs {
    pub fn new(mut pairs: Vec<(u32, i64)>) -> Result<Self> {
        pairs.sort_by_key(|p| p.0);
        let c = pairs.len() as u32;
        let odds_ok = pairs.iter().enumerate().all(|(i, &(o, _))| o == 2 * i as u32 + 1);
        let mut evens: Vec<u64> = pairs.iter().map(|&(_, e)| e.unsigned_abs()).collect();
        evens.sort_unstable();
        let evens_ok = evens.iter().enumerate().all(|(i, &e)| e == 2 * (i as u64 + 1));
        if !odds_ok || !evens_ok {
            return Err(MosaicError::NotAKnot(format!(
                "labels are not a pairing of 1..={} by parity",
                2 * c
            )));
        }
        Ok(GaussPairs(pairs))
    }

    pub fn pairs(&self) -> &[(u32, i64)] {
        &self.0
    }
}

/// Exported as `(1,4),(3,-6),(5,2)`.
impl fmt::Display for GaussPairs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|(o, e)| format!("({o},{e})")).collect();
        f.write_str(&parts.join(","))
    }
}

/// Dowker-Thistlethwaite code: the even labels in odd-label order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DtCode(pub Vec<i64>);

impl DtCode {
    pub fn magnitudes(&self) -> Vec<u64> {
        self.0.iter().map(|e| e.unsigned_abs()).collect()
    }
}

/// Exported as `4 -6 2`.
impl fmt::Display for DtCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|e| e.to_string()).collect();
        f.write_str(&parts.join(" "))
    }
}

/// Pairs the two labels of every crossing; even labels are negated where
/// that pass goes under.
pub fn gauss_pairs(result: &TraceResult) -> Result<GaussPairs> {
    match result.kind {
        TraceKind::Link => return Err(MosaicError::NotAKnot("diagram is a link".into())),
        TraceKind::UnknottedNoCrossings => return Err(MosaicError::NotAKnot("no crossings".into())),
        TraceKind::Knot => {}
    }
    let mut by_cell: HashMap<CellCoord, Vec<&CrossingVisit>> = HashMap::new();
    for v in &result.crossing_visits {
        by_cell.entry(v.cell).or_default().push(v);
    }
    let mut pairs = Vec::with_capacity(by_cell.len());
    for (cell, visits) in by_cell {
        let [a, b] = visits[..] else {
            return Err(MosaicError::NotAKnot(format!("crossing {cell} visited {} times", visits.len())));
        };
        let (odd, even) = if a.label % 2 == 1 { (a, b) } else { (b, a) };
        if odd.label % 2 != 1 || even.label % 2 != 0 {
            return Err(MosaicError::NotAKnot(format!("crossing {cell} labels share parity")));
        }
        let e = even.label as i64;
        pairs.push((odd.label, if even.passed_under { -e } else { e }));
    }
    GaussPairs::new(pairs)
}

pub fn dt_code(pairs: &GaussPairs) -> DtCode {
    DtCode(pairs.pairs().iter().map(|&(_, e)| e).collect())
}

/// PD code of a traced knot. Arc `k` is the stretch of strand arriving at
/// crossing visit `k`.
pub fn to_pd(result: &TraceResult) -> Result<PdCode> {
    match result.kind {
        TraceKind::Link => return Err(MosaicError::NotAKnot("diagram is a link".into())),
        TraceKind::UnknottedNoCrossings => return Ok(PdCode::unknot()),
        TraceKind::Knot => {}
    }
    let arcs = result.crossing_visits.len() as u32;
    let next = |label: u32| label % arcs + 1;
    let mut by_cell: HashMap<CellCoord, [Option<&CrossingVisit>; 2]> = HashMap::new();
    // Preserve first-visit order so the crossing list follows the walk.
    let mut order = Vec::new();
    for v in &result.crossing_visits {
        let slot = by_cell.entry(v.cell).or_insert_with(|| {
            order.push(v.cell);
            [None, None]
        });
        if v.passed_under {
            slot[0] = Some(v);
        } else {
            slot[1] = Some(v);
        }
    }
    let mut crossings = Vec::with_capacity(order.len());
    for cell in order {
        let [Some(under), Some(over)] = by_cell[&cell] else {
            return Err(MosaicError::NotAKnot(format!("crossing {cell} lacks an over and an under pass")));
        };
        let (a, c) = (under.label, next(under.label));
        let (o_in, o_out) = (over.label, next(over.label));
        let crossing = if over.entry == under.entry.ccw() {
            Crossing::new([a, o_in, c, o_out], Sign::Negative)
        } else {
            Crossing::new([a, o_out, c, o_in], Sign::Positive)
        };
        crossings.push(crossing);
    }
    PdCode::new(crossings)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tile::parse_matrix;
    use crate::tile::tests::TREFOIL;

    #[test]
    fn trefoil_trace() {
        let g = parse_matrix(TREFOIL).unwrap();
        let t = trace(&g).unwrap();
        assert_eq!(t.kind, TraceKind::Knot);
        assert_eq!(t.visits.len(), 16);
        let cells: Vec<(usize, usize)> = t.crossing_visits.iter().map(|v| (v.cell.row, v.cell.col)).collect();
        assert_eq!(cells, vec![(1, 2), (2, 1), (1, 1), (1, 2), (2, 1), (1, 1)]);
        let pairs = gauss_pairs(&t).unwrap();
        let mags: Vec<(u32, u64)> = pairs.pairs().iter().map(|&(o, e)| (o, e.unsigned_abs())).collect();
        assert_eq!(mags, vec![(1, 4), (3, 6), (5, 2)]);
        let signs: Vec<bool> = pairs.pairs().iter().map(|p| p.1 > 0).collect();
        assert!(signs.iter().all(|s| *s == signs[0]));
        let dt = dt_code(&pairs);
        assert_eq!(dt.magnitudes(), vec![4, 6, 2]);
        let pd = to_pd(&t).unwrap();
        assert_eq!(pd.crossing_count(), 3);
        assert_eq!(pd.writhe().abs(), 3);
    }

    #[test]
    fn worked_gauss_pairs() {
        let pairs = GaussPairs::new(vec![(1, 4), (3, -6), (5, 2)]).unwrap();
        assert_eq!(dt_code(&pairs), DtCode(vec![4, -6, 2]));
        assert_eq!(dt_code(&pairs).to_string(), "4 -6 2");
        assert_eq!(pairs.to_string(), "(1,4),(3,-6),(5,2)");
        assert_eq!(dt_code(&GaussPairs::new(vec![(1, 2)]).unwrap()), DtCode(vec![2]));
        assert!(GaussPairs::new(vec![(1, 4), (3, 6)]).is_err());
        assert!(GaussPairs::new(vec![(2, 4)]).is_err());
    }

    #[test]
    fn two_unknots_are_a_link() {
        let g = parse_matrix("2 1 0 0\n3 4 0 0\n0 0 2 1\n0 0 3 4").unwrap();
        let t = trace(&g).unwrap();
        assert_eq!(t.kind, TraceKind::Link);
        assert_eq!(t.visits.len(), 4);
        assert!(gauss_pairs(&t).is_err());
        assert!(to_pd(&t).is_err());
    }

    #[test]
    fn crossing_free_loop() {
        let g = parse_matrix("2 1\n3 4").unwrap();
        let t = trace(&g).unwrap();
        assert_eq!(t.kind, TraceKind::UnknottedNoCrossings);
        assert_eq!(to_pd(&t).unwrap(), PdCode::unknot());
        assert!(matches!(gauss_pairs(&t), Err(MosaicError::NotAKnot(_))));
    }

    #[test]
    fn one_crossing_kink() {
        // A loop with a single self-crossing.
        let g = parse_matrix("0 2 1 0\n2 9 4 0\n3 4 0 0\n0 0 0 0").unwrap();
        assert!(g.is_suitably_connected());
        let t = trace(&g).unwrap();
        assert_eq!(t.kind, TraceKind::Knot);
        let pairs = gauss_pairs(&t).unwrap();
        assert_eq!(pairs.pairs().len(), 1);
        assert_eq!(pairs.pairs()[0].0, 1);
        assert_eq!(pairs.pairs()[0].1.abs(), 2);
        assert_eq!(to_pd(&t).unwrap().crossing_count(), 1);
    }

    #[test]
    fn malformed_inputs() {
        assert!(matches!(trace(&MosaicGrid::blank(4).unwrap()), Err(MosaicError::Malformed(_))));
        let g = parse_matrix("0 0\n0 3").unwrap();
        assert!(matches!(trace(&g), Err(MosaicError::Malformed(_))));
        let g = parse_matrix("2 5\n0 0").unwrap();
        assert!(matches!(trace(&g), Err(MosaicError::Connectivity { .. })));
    }
}
