//! Full analysis of one mosaic: validation, trace, DT code, invariants and
//! identification. The CLI `identify` command and the HTTP service both
//! answer with this record, so their outputs agree by construction.

use serde::{Deserialize, Serialize};

use crate::identify::FingerprintIndex;
use crate::invariants::fingerprint;
use crate::tile::{MosaicGrid, Side};
use crate::trace::{dt_code, gauss_pairs, to_pd, trace, TraceKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MosaicKind {
    Knot,
    Link,
    Invalid,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvariantSummary {
    pub jones: String,
    pub alexander: String,
    pub determinant: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Analysis {
    pub valid: bool,
    pub kind: MosaicKind,
    pub nonblank: usize,
    pub crossings: usize,
    pub dt: Option<Vec<i64>>,
    pub knot: Option<String>,
    pub invariants: Option<InvariantSummary>,
    pub errors: Vec<String>,
}

impl Analysis {
    fn invalid(grid: &MosaicGrid, valid: bool, errors: Vec<String>) -> Analysis {
        Analysis {
            valid,
            kind: MosaicKind::Invalid,
            nonblank: grid.nonblank_count(),
            crossings: grid.crossing_count(),
            dt: None,
            knot: None,
            invariants: None,
            errors,
        }
    }
}

fn describe_mark(grid: &MosaicGrid, cell: crate::tile::CellCoord, side: Side) -> String {
    match cell.step(side, grid.size()) {
        None => format!("connection point faces the boundary at {cell} {side}"),
        Some(next) => format!("unmatched edge between {cell} and {next}"),
    }
}

pub fn analyze(grid: &MosaicGrid, index: &FingerprintIndex) -> Analysis {
    let marks = grid.edge_marks();
    if !marks.is_empty() {
        let errors = marks.iter().map(|m| describe_mark(grid, m.cell, m.side)).collect();
        return Analysis::invalid(grid, false, errors);
    }
    if grid.nonblank_count() == 0 {
        return Analysis::invalid(grid, true, vec!["no strand".into()]);
    }
    let result = match trace(grid) {
        Ok(r) => r,
        Err(e) => return Analysis::invalid(grid, false, vec![e.to_string()]),
    };
    let mut out = Analysis {
        valid: true,
        kind: MosaicKind::Knot,
        nonblank: grid.nonblank_count(),
        crossings: grid.crossing_count(),
        dt: None,
        knot: None,
        invariants: None,
        errors: Vec::new(),
    };
    match result.kind {
        TraceKind::Link => out.kind = MosaicKind::Link,
        TraceKind::UnknottedNoCrossings | TraceKind::Knot => {
            if result.crossing_count() > 0 {
                match gauss_pairs(&result) {
                    Ok(pairs) => out.dt = Some(dt_code(&pairs).0),
                    Err(e) => out.errors.push(e.to_string()),
                }
            } else {
                out.dt = Some(Vec::new());
            }
            let fp = to_pd(&result).and_then(|pd| fingerprint(&pd).map(|fp| (pd, fp)));
            match fp {
                Ok((pd, fp)) => {
                    out.knot = Some(index.identify_fingerprint(&fp, pd.crossing_count()).to_string());
                    out.invariants = Some(InvariantSummary {
                        jones: fp.jones.to_string(),
                        alexander: fp.alexander.to_string(),
                        determinant: fp.determinant.to_string(),
                    });
                }
                Err(e) => out.errors.push(e.to_string()),
            }
        }
    }
    out
}
