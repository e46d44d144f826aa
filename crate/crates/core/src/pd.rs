//! Oriented planar-diagram codes for knot diagrams.
//!
//! A crossing is four arc labels `(a, b, c, d)` listed counterclockwise
//! starting from the incoming under-arc `a`; the under strand runs `a -> c`.
//! The sign says which way the over strand runs: positive crossings have it
//! running `d -> b`, negative ones `b -> d`.
//!
//! Arcs are numbered `1..=2c` along the orientation, so every label occurs
//! exactly twice: once entering a crossing and once leaving one.

use std::fmt;
use std::str::FromStr;

use crate::error::{MosaicError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Positive,
    Negative,
}

impl Sign {
    pub fn value(self) -> i64 {
        match self {
            Sign::Positive => 1,
            Sign::Negative => -1,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Positive => Sign::Negative,
            Sign::Negative => Sign::Positive,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Crossing {
    pub arcs: [u32; 4],
    pub sign: Sign,
}

impl Crossing {
    pub fn new(arcs: [u32; 4], sign: Sign) -> Self {
        Crossing { arcs, sign }
    }

    pub fn under_in(&self) -> u32 {
        self.arcs[0]
    }

    pub fn under_out(&self) -> u32 {
        self.arcs[2]
    }

    pub fn over_in(&self) -> u32 {
        match self.sign {
            Sign::Positive => self.arcs[3],
            Sign::Negative => self.arcs[1],
        }
    }

    pub fn over_out(&self) -> u32 {
        match self.sign {
            Sign::Positive => self.arcs[1],
            Sign::Negative => self.arcs[3],
        }
    }

    /// Whether tuple position `i` holds an arc entering the crossing.
    fn is_incoming(&self, i: usize) -> bool {
        match i {
            0 => true,
            2 => false,
            1 => self.sign == Sign::Negative,
            _ => self.sign == Sign::Positive,
        }
    }

    /// The same crossing with over and under exchanged.
    pub fn mirrored(&self) -> Crossing {
        let [a, b, c, d] = self.arcs;
        match self.sign {
            Sign::Positive => Crossing::new([d, a, b, c], Sign::Negative),
            Sign::Negative => Crossing::new([b, c, d, a], Sign::Positive),
        }
    }
}

impl fmt::Display for Crossing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.arcs;
        let s = if self.sign == Sign::Positive { '+' } else { '-' };
        write!(f, "({a},{b},{c},{d}){s}")
    }
}

/// PD code of a single-component diagram. The empty code is the
/// crossing-free unknot.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct PdCode {
    crossings: Vec<Crossing>,
}

impl PdCode {
    pub fn unknot() -> Self {
        PdCode::default()
    }

    /// Validates the arc structure and builds the code.
    pub fn new(crossings: Vec<Crossing>) -> Result<Self> {
        let pd = PdCode { crossings };
        pd.validate()?;
        Ok(pd)
    }

    pub fn crossings(&self) -> &[Crossing] {
        &self.crossings
    }

    pub fn crossing_count(&self) -> usize {
        self.crossings.len()
    }

    pub fn arc_count(&self) -> usize {
        2 * self.crossings.len()
    }

    fn validate(&self) -> Result<()> {
        let arcs = self.arc_count();
        let mut incoming = vec![None; arcs + 1];
        let mut outgoing = vec![None; arcs + 1];
        for (ci, x) in self.crossings.iter().enumerate() {
            for (pos, &label) in x.arcs.iter().enumerate() {
                if label == 0 || label as usize > arcs {
                    return Err(MosaicError::InvalidPd(format!("arc label {label} outside 1..={arcs}")));
                }
                let slot = if x.is_incoming(pos) { &mut incoming } else { &mut outgoing };
                if slot[label as usize].replace((ci, pos)).is_some() {
                    return Err(MosaicError::InvalidPd(format!(
                        "arc {label} {} more than one crossing",
                        if x.is_incoming(pos) { "enters" } else { "leaves" }
                    )));
                }
            }
        }
        if arcs == 0 {
            return Ok(());
        }
        // Every label now occurs exactly once entering and once leaving;
        // walking arc -> crossing -> next arc must visit all of them.
        let mut seen = vec![false; arcs + 1];
        let mut label = 1u32;
        for _ in 0..arcs {
            if seen[label as usize] {
                return Err(MosaicError::InvalidPd("diagram has more than one component".into()));
            }
            seen[label as usize] = true;
            let (ci, pos) = incoming[label as usize].expect("every label enters once");
            let x = &self.crossings[ci];
            label = if pos == 0 { x.under_out() } else { x.over_out() };
        }
        if label != 1 {
            return Err(MosaicError::InvalidPd("diagram has more than one component".into()));
        }
        Ok(())
    }

    pub fn writhe(&self) -> i64 {
        self.crossings.iter().map(|x| x.sign.value()).sum()
    }

    /// The mirror image: every crossing changed.
    pub fn mirror(&self) -> PdCode {
        PdCode { crossings: self.crossings.iter().map(Crossing::mirrored).collect() }
    }

    /// Changes the crossings at the given indices.
    pub fn with_crossings_changed(&self, indices: &[usize]) -> PdCode {
        let mut crossings = self.crossings.clone();
        for &i in indices {
            crossings[i] = crossings[i].mirrored();
        }
        PdCode { crossings }
    }

    /// Adds a Reidemeister-I kink on arc `arc` (ignored for the empty code).
    pub fn with_kink(&self, arc: u32, sign: Sign) -> PdCode {
        let k = if self.crossings.is_empty() { 1 } else { arc };
        let relabel = |label: u32, incoming: bool| match label {
            l if l > k => l + 2,
            l if l == k && incoming => k + 2,
            l => l,
        };
        let mut crossings: Vec<Crossing> = self
            .crossings
            .iter()
            .map(|x| {
                let mut arcs = x.arcs;
                for (i, a) in arcs.iter_mut().enumerate() {
                    *a = relabel(*a, x.is_incoming(i));
                }
                Crossing::new(arcs, x.sign)
            })
            .collect();
        // Under pass first on arc k, the small loop is arc k+1, leave on k+2.
        let (a, l, out) = (k, k + 1, k + 2);
        let kink = match sign {
            Sign::Positive => Crossing::new([a, out, l, l], Sign::Positive),
            Sign::Negative => Crossing::new([a, l, l, out], Sign::Negative),
        };
        crossings.push(kink);
        let n = crossings.len() as u32 * 2;
        if self.crossings.is_empty() {
            // The single kink closes on itself: arc 3 is arc 1.
            for x in &mut crossings {
                for a in &mut x.arcs {
                    if *a > n {
                        *a -= n;
                    }
                }
            }
        }
        PdCode { crossings }
    }

    /// Connected sum, joining the two diagrams at their arc 1.
    pub fn connected_sum(&self, other: &PdCode) -> PdCode {
        if self.crossings.is_empty() {
            return other.clone();
        }
        if other.crossings.is_empty() {
            return self.clone();
        }
        let offset = self.arc_count() as u32;
        let mut crossings = Vec::with_capacity(self.crossings.len() + other.crossings.len());
        for x in &self.crossings {
            let mut arcs = x.arcs;
            for (i, a) in arcs.iter_mut().enumerate() {
                // Leaving the last visit of the first diagram now enters the second.
                if *a == 1 && !x.is_incoming(i) {
                    *a = offset + 1;
                }
            }
            crossings.push(Crossing::new(arcs, x.sign));
        }
        for x in &other.crossings {
            let mut arcs = x.arcs;
            for (i, a) in arcs.iter_mut().enumerate() {
                *a = if *a == 1 && !x.is_incoming(i) { 1 } else { *a + offset };
            }
            crossings.push(Crossing::new(arcs, x.sign));
        }
        PdCode { crossings }
    }

    /// Relabels arcs so that numbering starts at `new_first` (basepoint shift).
    pub fn rebased(&self, new_first: u32) -> PdCode {
        let n = self.arc_count() as u32;
        if n == 0 {
            return self.clone();
        }
        let shift = |a: u32| (a + n - new_first) % n + 1;
        PdCode {
            crossings: self
                .crossings
                .iter()
                .map(|x| Crossing::new(x.arcs.map(shift), x.sign))
                .collect(),
        }
    }
}

/// `PD[(a,b,c,d)s,...]`
impl fmt::Display for PdCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("PD[")?;
        for (i, x) in self.crossings.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{x}")?;
        }
        f.write_str("]")
    }
}

impl FromStr for PdCode {
    type Err = MosaicError;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |msg: String| MosaicError::InvalidPd(msg);
        let body = s
            .trim()
            .strip_prefix("PD[")
            .and_then(|r| r.strip_suffix(']'))
            .ok_or_else(|| bad(format!("expected PD[...], got {s:?}")))?;
        let mut crossings = Vec::new();
        let mut rest = body.trim();
        while !rest.is_empty() {
            let inner = rest.strip_prefix('(').ok_or_else(|| bad(format!("expected '(' at {rest:?}")))?;
            let close = inner.find(')').ok_or_else(|| bad("unclosed crossing".into()))?;
            let nums: Vec<u32> = inner[..close]
                .split(',')
                .map(|t| t.trim().parse::<u32>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| bad(format!("bad arc label: {e}")))?;
            let arcs: [u32; 4] = nums.try_into().map_err(|_| bad("crossing needs 4 arcs".into()))?;
            let after = &inner[close + 1..];
            let sign = match after.chars().next() {
                Some('+') => Sign::Positive,
                Some('-') => Sign::Negative,
                _ => return Err(bad("crossing needs a sign mark".into())),
            };
            crossings.push(Crossing::new(arcs, sign));
            rest = after[1..].trim_start();
            if let Some(r) = rest.strip_prefix(',') {
                rest = r.trim_start();
                if rest.is_empty() {
                    return Err(bad("trailing comma".into()));
                }
            } else if !rest.is_empty() {
                return Err(bad(format!("expected ',' at {rest:?}")));
            }
        }
        PdCode::new(crossings)
    }
}
