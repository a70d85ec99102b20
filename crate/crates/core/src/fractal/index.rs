//! Index algebra for the infinite iterated function system.
//!
//! A single [`Index`] addresses one similarity map: a side curve (labelled 3
//! and 4 in the serialized form) together with a word over {1,2} locating a
//! removed middle-third gap on that curve. A [`CompositeIndex`] is a nonempty
//! sequence of indices addressing a composition of maps. The partial order,
//! the four-way successor split, and the norm ‖i*‖ drive every grouped
//! enumeration in the crate.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which of the two generator curves a map attaches to.
///
/// `Left` carries the label 3 and `Right` the label 4: with the
/// orientation-preserving corner assignment (label-3 maps send the base-right
/// corner to the gap endpoint nearer the cusp), label 3 produces outward bumps
/// exactly when it acts on the left curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SideCurve {
    Left,
    Right,
}

impl SideCurve {
    pub fn code(self) -> u8 {
        match self {
            SideCurve::Left => 3,
            SideCurve::Right => 4,
        }
    }

    pub fn from_code(code: u8) -> Result<Self> {
        match code {
            3 => Ok(SideCurve::Left),
            4 => Ok(SideCurve::Right),
            other => Err(Error::Domain(format!("side curve code must be 3 or 4, got {other}"))),
        }
    }
}

fn check_digits(digits: &[u8]) -> Result<()> {
    if digits.iter().any(|&d| d != 1 && d != 2) {
        return Err(Error::Domain("gap digits must be over {1,2}".into()));
    }
    Ok(())
}

/// One map of the system: i = (i', i'').
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Index {
    pub side: SideCurve,
    pub digits: Vec<u8>,
}

impl Index {
    pub fn new(side: SideCurve, digits: Vec<u8>) -> Result<Self> {
        check_digits(&digits)?;
        Ok(Index { side, digits })
    }

    pub fn root(side: SideCurve) -> Self {
        Index { side, digits: Vec::new() }
    }

    /// |i| = 1 + |i''|.
    pub fn len(&self) -> u32 {
        1 + self.digits.len() as u32
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Endpoints (x⁻, x⁺) of the removed middle-third interval addressed by
/// `digits`, inside [0,1]. Digit 1 selects the gap to the left of the parent
/// gap, digit 2 the gap to the right.
pub fn cantor_interval(digits: &[u8]) -> (f64, f64) {
    debug_assert!(digits.iter().all(|&d| d == 1 || d == 2));
    let mut a = 0.0f64;
    let mut b = 1.0f64;
    for &d in digits {
        let w = (b - a) / 3.0;
        if d == 1 {
            b = a + w;
        } else {
            a = b - w;
        }
    }
    let w = (b - a) / 3.0;
    (a + w, b - w)
}

/// Nonempty composition address i* = (i_1, ..., i_{j*}).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CompositeIndex {
    entries: Vec<Index>,
}

impl CompositeIndex {
    pub fn new(entries: Vec<Index>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Domain("composite index must be nonempty".into()));
        }
        Ok(CompositeIndex { entries })
    }

    pub fn single(index: Index) -> Self {
        CompositeIndex { entries: vec![index] }
    }

    pub fn root(side: SideCurve) -> Self {
        Self::single(Index::root(side))
    }

    pub fn entries(&self) -> &[Index] {
        &self.entries
    }

    /// |i*|: number of composed maps.
    pub fn len(&self) -> u32 {
        self.entries.len() as u32
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// ‖i*‖ = Σ |i_k| ≥ |i*|.
    pub fn norm(&self) -> u32 {
        self.entries.iter().map(|e| e.len()).sum()
    }

    /// i* ++ (digit): extend the last entry's gap word.
    pub fn extended_last(&self, digit: u8) -> Self {
        debug_assert!(digit == 1 || digit == 2);
        let mut entries = self.entries.clone();
        entries.last_mut().unwrap().digits.push(digit);
        CompositeIndex { entries }
    }

    /// i* ++ (i'): append a fresh root entry.
    pub fn appended(&self, side: SideCurve) -> Self {
        let mut entries = self.entries.clone();
        entries.push(Index::root(side));
        CompositeIndex { entries }
    }

    /// The four norm-(‖i*‖+1) successors, in the order 1, 2, 3, 4.
    pub fn successors(&self) -> [CompositeIndex; 4] {
        [
            self.extended_last(1),
            self.extended_last(2),
            self.appended(SideCurve::Left),
            self.appended(SideCurve::Right),
        ]
    }

    /// The norm-lowering truncation ī*; `None` at norm 1.
    pub fn parent(&self) -> Option<CompositeIndex> {
        let mut entries = self.entries.clone();
        let last = entries.last_mut().unwrap();
        if !last.digits.is_empty() {
            last.digits.pop();
            return Some(CompositeIndex { entries });
        }
        if entries.len() > 1 {
            entries.pop();
            return Some(CompositeIndex { entries });
        }
        None
    }

    /// Partial order i*₁ ≤ i*₂: all earlier entries agree and the last entry
    /// of i*₁ is a same-side prefix of the corresponding entry of i*₂.
    pub fn leq(&self, other: &CompositeIndex) -> bool {
        let j1 = self.entries.len();
        let j2 = other.entries.len();
        if j1 > j2 {
            return false;
        }
        if self.entries[..j1 - 1] != other.entries[..j1 - 1] {
            return false;
        }
        let a = &self.entries[j1 - 1];
        let b = &other.entries[j1 - 1];
        a.side == b.side && b.digits.len() >= a.digits.len() && b.digits[..a.digits.len()] == a.digits[..]
    }

    /// Serialized form `3|4.1|3.21`: per entry, the side code, then a dot and
    /// the gap digits when the word is nonempty.
    pub fn to_index_string(&self) -> String {
        self.entries
            .iter()
            .map(|e| {
                if e.digits.is_empty() {
                    format!("{}", e.side.code())
                } else {
                    let w: String = e.digits.iter().map(|d| d.to_string()).collect();
                    format!("{}.{}", e.side.code(), w)
                }
            })
            .collect::<Vec<_>>()
            .join("|")
    }

    pub fn parse_index_string(s: &str) -> Result<Self> {
        let mut entries = Vec::new();
        for part in s.split('|') {
            let (code, word) = match part.split_once('.') {
                Some((c, w)) => (c, w),
                None => (part, ""),
            };
            let code: u8 = code
                .parse()
                .map_err(|_| Error::Domain(format!("bad side code in index string: {part:?}")))?;
            let side = SideCurve::from_code(code)?;
            let digits: Vec<u8> = word
                .chars()
                .map(|c| {
                    c.to_digit(10)
                        .map(|d| d as u8)
                        .ok_or_else(|| Error::Domain(format!("bad digit in index string: {part:?}")))
                })
                .collect::<Result<_>>()?;
            entries.push(Index::new(side, digits)?);
        }
        CompositeIndex::new(entries)
    }
}

/// All î* with base ≤ î* and ‖î*‖ ≤ max_norm, enumerated depth-first through
/// the four-way successor tree (deterministic order).
pub fn grouped_family(base: &CompositeIndex, max_norm: u32) -> Result<Vec<CompositeIndex>> {
    if max_norm < base.norm() {
        return Err(Error::Domain(format!(
            "max_norm {} is below the base norm {}",
            max_norm,
            base.norm()
        )));
    }
    let mut out = Vec::new();
    let mut stack = vec![base.clone()];
    while let Some(cur) = stack.pop() {
        if cur.norm() < max_norm {
            let succ = cur.successors();
            for s in succ.into_iter().rev() {
                stack.push(s);
            }
        }
        out.push(cur);
    }
    Ok(out)
}

/// Every composite index with ‖i*‖ ≤ max_norm (both roots' successor trees).
pub fn enumerate_up_to_norm(max_norm: u32) -> Vec<CompositeIndex> {
    let mut out = Vec::new();
    for side in [SideCurve::Left, SideCurve::Right] {
        if max_norm >= 1 {
            out.extend(grouped_family(&CompositeIndex::root(side), max_norm).unwrap());
        }
    }
    out
}
