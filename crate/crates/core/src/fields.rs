//! Evaluable scalar fields u and exponent fields s on a domain, including the
//! strict-containment counterexample built from lacunary indicator blocks.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{DomainApprox, Point2};

/// Regularity class driving the quadrature strategy for inner-ball means.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regularity {
    Smooth,
    PiecewiseConstant,
    IndicatorSum,
}

/// How the written interval (4^{−j}, a_j·4^{−j}) is realized when a_j < 1
/// reverses its endpoints.
///
/// `Offset` keeps the block length a_j·4^{−j} by placing the block just past
/// the left endpoint (the length every series computation uses); `MinMax`
/// takes the interval between the sorted endpoints literally.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Convention {
    #[default]
    Offset,
    MinMax,
}

/// Parameters of the counterexample field.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CounterexampleSpec {
    pub p: f64,
    pub s0: f64,
    pub j_max: u32,
    #[serde(default)]
    pub convention: Convention,
    /// Replace unit amplitudes by 1/ln(j+1), the vanishing-amplitude variant.
    #[serde(default)]
    pub log_amplitude: bool,
}

impl CounterexampleSpec {
    pub fn new(p: f64, s0: f64, j_max: u32) -> Result<Self> {
        if !(p >= 1.0) {
            return Err(Error::Domain(format!("counterexample needs p >= 1, got {p}")));
        }
        if !(s0 * p >= 1.0) {
            return Err(Error::Domain(format!(
                "counterexample needs s0·p >= 1, got s0={s0}, p={p}"
            )));
        }
        if j_max == 0 {
            return Err(Error::Domain("counterexample needs j_max >= 1".into()));
        }
        Ok(CounterexampleSpec { p, s0, j_max, convention: Convention::Offset, log_amplitude: false })
    }

    pub fn with_convention(mut self, convention: Convention) -> Self {
        self.convention = convention;
        self
    }
}

/// a_j = 4^{−j(s₀−1/p)} / (5 j^{1/p} (ln(j+2))^{2/p}).
pub fn amplitude_a(spec: &CounterexampleSpec, j: u32) -> f64 {
    assert!(j >= 1);
    let j = j as f64;
    let decay = 4f64.powf(-j * (spec.s0 - 1.0 / spec.p));
    decay / (5.0 * j.powf(1.0 / spec.p) * ((j + 2.0).ln()).powf(2.0 / spec.p))
}

/// One realized indicator block.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Block {
    pub j: u32,
    pub lo: f64,
    pub hi: f64,
    pub amplitude: f64,
}

/// The counterexample field on Ω = (0,2): u = Σ_j amp_j·χ_{E_j} on (0,1],
/// extended by the mirror symmetry u(x) = u(2−x).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CounterexampleField {
    pub spec: CounterexampleSpec,
    /// Blocks on (0,1], ascending in x.
    pub blocks: Vec<Block>,
    /// j values whose written endpoints were reversed (a_j < 1).
    pub degenerate_js: Vec<u32>,
    /// Sorted breakpoints on (0,2), including the mirrored copies.
    edges: Vec<f64>,
}

impl CounterexampleField {
    pub fn new(spec: CounterexampleSpec) -> Result<Self> {
        let mut blocks = Vec::with_capacity(spec.j_max as usize);
        let mut degenerate_js = Vec::new();
        for j in (1..=spec.j_max).rev() {
            let a = amplitude_a(&spec, j);
            if a < 1.0 {
                degenerate_js.push(j);
            }
            let base = 4f64.powi(-(j as i32));
            let (lo, hi) = match spec.convention {
                Convention::Offset => (base, (1.0 + a) * base),
                Convention::MinMax => {
                    let w = a * base;
                    (w.min(base), w.max(base))
                }
            };
            if hi > lo {
                let amplitude = if spec.log_amplitude { 1.0 / ((j as f64) + 1.0).ln() } else { 1.0 };
                blocks.push(Block { j, lo, hi, amplitude });
            }
        }
        degenerate_js.sort_unstable();
        let mut edges = Vec::with_capacity(blocks.len() * 4 + 1);
        for b in &blocks {
            edges.push(b.lo);
            edges.push(b.hi);
        }
        for b in &blocks {
            edges.push(2.0 - b.hi);
            edges.push(2.0 - b.lo);
        }
        edges.push(1.0);
        edges.sort_by(|a, b| a.partial_cmp(b).unwrap());
        edges.dedup();
        Ok(CounterexampleField { spec, blocks, degenerate_js, edges })
    }

    pub fn eval(&self, x: f64) -> f64 {
        if !(0.0..2.0).contains(&x) {
            return 0.0;
        }
        let x = if x > 1.0 { 2.0 - x } else { x };
        // Blocks are ascending and disjoint: binary search on lo.
        let idx = self.blocks.partition_point(|b| b.lo <= x);
        if idx == 0 {
            return 0.0;
        }
        let b = &self.blocks[idx - 1];
        if x > b.lo && x < b.hi {
            b.amplitude
        } else {
            0.0
        }
    }

    /// Total length of the realized support (both halves of Ω).
    pub fn support_measure(&self) -> f64 {
        2.0 * self.blocks.iter().map(|b| b.hi - b.lo).sum::<f64>()
    }

    /// Breakpoints of the piecewise-constant field strictly inside (lo, hi).
    pub fn edges_in(&self, lo: f64, hi: f64) -> &[f64] {
        let start = self.edges.partition_point(|&e| e <= lo);
        let end = self.edges.partition_point(|&e| e < hi);
        &self.edges[start.min(end)..end]
    }
}

/// Evaluable scalar field over a domain.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScalarField {
    Constant { value: f64 },
    /// ax·x + ay·y + c.
    Linear { ax: f64, ay: f64, c: f64 },
    /// offset + coef·d_∂Ω(x)^exponent; blows up at the boundary for
    /// negative exponents.
    DistancePower { offset: f64, coef: f64, exponent: f64 },
    Counterexample(CounterexampleField),
}

impl ScalarField {
    pub fn counterexample(spec: CounterexampleSpec) -> Result<Self> {
        Ok(ScalarField::Counterexample(CounterexampleField::new(spec)?))
    }

    pub fn eval(&self, domain: &DomainApprox, x: Point2) -> f64 {
        match self {
            ScalarField::Constant { value } => *value,
            ScalarField::Linear { ax, ay, c } => ax * x.x + ay * x.y + c,
            ScalarField::DistancePower { offset, coef, exponent } => {
                offset + coef * domain.distance_to_boundary(x).powf(*exponent)
            }
            ScalarField::Counterexample(f) => f.eval(x.x),
        }
    }

    pub fn regularity(&self) -> Regularity {
        match self {
            ScalarField::Constant { .. } | ScalarField::Linear { .. } => Regularity::Smooth,
            ScalarField::DistancePower { .. } => Regularity::Smooth,
            ScalarField::Counterexample(_) => Regularity::IndicatorSum,
        }
    }

    /// The underlying piecewise-constant structure, when the field has one.
    pub fn piecewise(&self) -> Option<&CounterexampleField> {
        match self {
            ScalarField::Counterexample(f) => Some(f),
            _ => None,
        }
    }
}

/// Evaluable exponent field s: Ω → [0, ∞).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExponentField {
    Constant { s0: f64 },
    /// base + coef·d_∂Ω(x).
    DistancePower { base: f64, coef: f64 },
}

impl ExponentField {
    pub fn constant(s0: f64) -> Result<Self> {
        if !(s0 >= 0.0 && s0.is_finite()) {
            return Err(Error::Domain(format!("exponent field needs s0 >= 0, got {s0}")));
        }
        Ok(ExponentField::Constant { s0 })
    }

    pub fn distance_power(base: f64, coef: f64) -> Result<Self> {
        if !(base.is_finite() && coef.is_finite()) {
            return Err(Error::Domain("exponent field parameters must be finite".into()));
        }
        if base < 0.0 {
            return Err(Error::Domain(format!("exponent field needs base >= 0, got {base}")));
        }
        Ok(ExponentField::DistancePower { base, coef })
    }

    pub fn eval(&self, domain: &DomainApprox, x: Point2) -> f64 {
        match self {
            ExponentField::Constant { s0 } => *s0,
            ExponentField::DistancePower { base, coef } => {
                base + coef * domain.distance_to_boundary(x)
            }
        }
    }

    /// Uniform upper bound over the domain.
    pub fn bound(&self, domain: &DomainApprox) -> f64 {
        match self {
            ExponentField::Constant { s0 } => *s0,
            ExponentField::DistancePower { base, coef } => {
                let (lo, hi) = domain.bounding_box();
                let d_max = 0.5 * (hi - lo).norm();
                base + coef.max(0.0) * d_max
            }
        }
    }
}
