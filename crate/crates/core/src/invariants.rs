//! Polynomial invariants of PD codes and the identification fingerprint.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed};

use crate::error::{MosaicError, Result};
use crate::pd::{PdCode, Sign};
use crate::poly::{AlexanderPoly, BracketPoly, JonesPoly};

/// A piece of a (possibly partially smoothed) diagram.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Element {
    Crossing([u32; 4]),
    /// Two arc ends joined without a crossing.
    #[cfg_attr(not(test), allow(dead_code))]
    Joint(u32, u32),
}

/// `d = -A^2 - A^-2`, the value of one extra loop.
fn loop_value() -> BracketPoly {
    BracketPoly::from_terms([(2, -1), (-2, -1)])
}

/// Open path ends of a partial state, as a sorted list of end pairs.
type Boundary = Vec<(u32, u32)>;

fn partner(boundary: &Boundary, label: u32) -> Option<(usize, u32)> {
    boundary.iter().enumerate().find_map(|(i, &(x, y))| {
        if x == label {
            Some((i, y))
        } else if y == label {
            Some((i, x))
        } else {
            None
        }
    })
}

/// Joins `p` and `q`, returning whether a loop closed.
fn join(boundary: &mut Boundary, p: u32, q: u32) -> bool {
    if p == q {
        return true;
    }
    let closed = match (partner(boundary, p), partner(boundary, q)) {
        (None, None) => {
            boundary.push((p.min(q), p.max(q)));
            false
        }
        (Some((i, p2)), None) => {
            boundary[i] = (p2.min(q), p2.max(q));
            false
        }
        (None, Some((j, q2))) => {
            boundary[j] = (q2.min(p), q2.max(p));
            false
        }
        (Some((i, p2)), Some((j, q2))) => {
            if i == j {
                boundary.remove(i);
                true
            } else {
                let (hi, lo) = (i.max(j), i.min(j));
                boundary.remove(hi);
                boundary[lo] = (p2.min(q2), p2.max(q2));
                false
            }
        }
    };
    boundary.sort_unstable();
    closed
}

/// State-sum bracket computed by absorbing one element at a time and
/// merging partial states that leave the same open ends.
pub(crate) fn bracket_of_elements(elements: &[Element]) -> BracketPoly {
    if elements.is_empty() {
        return BracketPoly::one();
    }
    let d = loop_value();
    let mut states: HashMap<Boundary, BracketPoly> = HashMap::new();
    states.insert(Vec::new(), BracketPoly::one());
    for el in elements {
        let mut next: HashMap<Boundary, BracketPoly> = HashMap::with_capacity(states.len() * 2);
        for (boundary, value) in &states {
            let options: &[(i64, [(u32, u32); 2])] = match *el {
                Element::Crossing([a, b, c, dd]) => &[(1, [(a, b), (c, dd)]), (-1, [(a, dd), (b, c)])],
                Element::Joint(p, q) => &[(0, [(p, q), (0, 0)])],
            };
            for &(a_exp, pairs) in options {
                let mut bnd = boundary.clone();
                let mut loops = 0;
                for (p, q) in pairs {
                    if (p, q) != (0, 0) && join(&mut bnd, p, q) {
                        loops += 1;
                    }
                }
                let mut v = value.shift(a_exp);
                for _ in 0..loops {
                    v = &v * &d;
                }
                *next.entry(bnd).or_insert_with(BracketPoly::zero) += &v;
            }
        }
        next.retain(|_, v| !v.is_zero());
        states = next;
    }
    let total = states.remove(&Vec::new()).unwrap_or_default();
    // Every closed loop contributed a factor d; the bracket counts loops - 1.
    total.div_exact(&d).expect("every state closes at least one loop")
}

fn elements(pd: &PdCode) -> Vec<Element> {
    pd.crossings().iter().map(|x| Element::Crossing(x.arcs)).collect()
}

/// Kauffman bracket `<K>` in `A`; the unknot evaluates to 1.
///
/// The A-smoothing of `(a, b, c, d)` joins `a` with `b` and `c` with `d`.
pub fn kauffman_bracket(pd: &PdCode) -> BracketPoly {
    bracket_of_elements(&elements(pd))
}

pub fn writhe(pd: &PdCode) -> i64 {
    pd.writhe()
}

/// Jones polynomial, `(-A^3)^(-w) <K>` with `A = q^(-1/4)`. Exponents of
/// `q` are stored multiplied by 4.
pub fn jones(pd: &PdCode) -> JonesPoly {
    jones_from_bracket(&kauffman_bracket(pd), pd.writhe())
}

pub(crate) fn jones_from_bracket(bracket: &BracketPoly, writhe: i64) -> JonesPoly {
    let sign = if writhe.rem_euclid(2) == 0 { 1 } else { -1 };
    let normalized = bracket.shift(-3 * writhe).scale(&BigInt::from(sign));
    // A^e = q^(-e/4): negate exponents, which are already in quarter units.
    normalized.scale_exponents(-1).rename()
}

/// Alexander polynomial normalized to lowest exponent 0 and a positive
/// leading coefficient.
pub fn alexander(pd: &PdCode) -> Result<AlexanderPoly> {
    let c = pd.crossing_count();
    if c == 0 {
        return Ok(AlexanderPoly::one());
    }
    let generators = over_arc_generators(pd);
    // Row per crossing, column per over-arc generator.
    let mut matrix = vec![vec![AlexanderPoly::zero(); c]; c];
    for (row, x) in pd.crossings().iter().enumerate() {
        let k = generators[x.over_in() as usize];
        let i = generators[x.under_in() as usize];
        let j = generators[x.under_out() as usize];
        let entries = match x.sign {
            Sign::Positive => [(k, &[(0, 1), (1, -1)][..]), (i, &[(1, 1)][..]), (j, &[(0, -1)][..])],
            Sign::Negative => [(k, &[(1, 1), (0, -1)][..]), (i, &[(0, 1)][..]), (j, &[(1, -1)][..])],
        };
        for (col, terms) in entries {
            matrix[row][col] += &AlexanderPoly::from_terms(terms.iter().copied());
        }
    }
    let minor: Vec<Vec<AlexanderPoly>> = matrix[1..].iter().map(|r| r[1..].to_vec()).collect();
    let det = bareiss_determinant(minor);
    if det.is_zero() {
        return Err(MosaicError::InvalidPd("Alexander matrix is singular".into()));
    }
    Ok(normalize_alexander(&det))
}

/// Maps every arc label to the index of the over-arc (Wirtinger generator)
/// containing it.
fn over_arc_generators(pd: &PdCode) -> Vec<usize> {
    let arcs = pd.arc_count();
    let mut parent: Vec<usize> = (0..=arcs).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for x in pd.crossings() {
        let (a, b) = (find(&mut parent, x.over_in() as usize), find(&mut parent, x.over_out() as usize));
        parent[a] = b;
    }
    let mut ids = HashMap::new();
    let mut out = vec![0; arcs + 1];
    for (label, slot) in out.iter_mut().enumerate().skip(1) {
        let root = find(&mut parent, label);
        let next = ids.len();
        *slot = *ids.entry(root).or_insert(next);
    }
    out
}

/// Fraction-free Gaussian elimination over `Z[t]`.
pub(crate) fn bareiss_determinant(mut m: Vec<Vec<AlexanderPoly>>) -> AlexanderPoly {
    let n = m.len();
    if n == 0 {
        return AlexanderPoly::one();
    }
    let mut sign = 1;
    let mut prev = AlexanderPoly::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                Some(r) => {
                    m.swap(k, r);
                    sign = -sign;
                }
                None => return AlexanderPoly::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &(&m[i][j] * &m[k][k]) - &(&m[i][k] * &m[k][j]);
                m[i][j] = num.div_exact(&prev).expect("Bareiss step divides exactly");
            }
        }
        prev = m[k][k].clone();
    }
    let det = m[n - 1][n - 1].clone();
    if sign < 0 {
        -det
    } else {
        det
    }
}

fn normalize_alexander(p: &AlexanderPoly) -> AlexanderPoly {
    let lo = p.min_exp().unwrap_or(0);
    let hi = p.max_exp().unwrap_or(0);
    let shifted = p.shift(-lo);
    if p.coeff(hi).is_negative() {
        -shifted
    } else {
        shifted
    }
}

/// `|Δ(-1)|`.
pub fn determinant(pd: &PdCode) -> Result<BigInt> {
    Ok(alexander(pd)?.eval_unit(-1).abs())
}

/// The identification key: Jones, Alexander and determinant.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Fingerprint {
    pub jones: JonesPoly,
    pub alexander: AlexanderPoly,
    pub determinant: BigInt,
}

impl Fingerprint {
    pub fn unknot() -> Self {
        Fingerprint { jones: JonesPoly::one(), alexander: AlexanderPoly::one(), determinant: BigInt::one() }
    }

    /// Fingerprint of the mirror image (`q -> q^-1`).
    pub fn mirror(&self) -> Self {
        Fingerprint {
            jones: self.jones.scale_exponents(-1),
            alexander: self.alexander.clone(),
            determinant: self.determinant.clone(),
        }
    }

    /// Serialization that identifies a fingerprint with its mirror image:
    /// the lexicographically smaller of the two.
    pub fn canonical_key(&self) -> String {
        let a = self.to_string();
        let b = self.mirror().to_string();
        a.min(b)
    }

    pub fn parse(jones: &str, alexander: &str, determinant: &str) -> Result<Self> {
        Ok(Fingerprint {
            jones: jones.parse()?,
            alexander: alexander.parse()?,
            determinant: determinant
                .trim()
                .parse()
                .map_err(|_| MosaicError::Report(format!("bad determinant {determinant:?}")))?,
        })
    }
}

/// `jones;alexander;determinant`
impl fmt::Display for Fingerprint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{};{};{}", self.jones, self.alexander, self.determinant)
    }
}

pub fn fingerprint(pd: &PdCode) -> Result<Fingerprint> {
    if pd.crossing_count() == 0 {
        return Ok(Fingerprint::unknot());
    }
    let alexander = alexander(pd)?;
    let determinant = alexander.eval_unit(-1).abs();
    Ok(Fingerprint { jones: jones(pd), alexander, determinant })
}
