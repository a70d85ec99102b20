//! Conformal-measure masses on the attractor, empirical Ahlfors-regularity
//! scans, and an independent box-counting dimension oracle.
//!
//! The t-conformal measure m is normalized to m(Γ) = 1 and satisfies
//! m(Γ_{i*}) = σ_{i*}^t, so every mass here is closed-form in the scale
//! algebra; geometry enters only through the enclosure radii 3σD₀ used to
//! build covers and containment witnesses.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fractal::{CompositeIndex, Index, PricklyDomain, SideCurve, SimilarityMap};
use crate::geometry::Point2;
use crate::sampling::rng_for;
use crate::util::stable_sum;
use rand::Rng;

/// The t-conformal measure on the attractor, normalized to m(Γ) = 1.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ConformalMeasure {
    pub t: f64,
}

impl ConformalMeasure {
    pub fn new(t: f64) -> Result<Self> {
        if !(t > 1.0 && t < 2.0) {
            return Err(Error::Domain(format!("conformal measure needs t in (1,2), got {t}")));
        }
        Ok(ConformalMeasure { t })
    }

    /// m(Γ_{i*}) = σ^t for a piece of scale σ.
    pub fn piece_mass(&self, sigma: f64) -> f64 {
        sigma.powf(self.t)
    }

    /// m(Γ̂_{i*}) = (3^t / (3^t − 2)) σ^t for the grouped set of scale σ.
    pub fn grouped_mass(&self, sigma: f64) -> f64 {
        let p3 = 3f64.powf(self.t);
        p3 / (p3 - 2.0) * sigma.powf(self.t)
    }
}

/// m(Γ̂_{i*}) for a composite index.
pub fn group_mass(domain: &PricklyDomain, istar: &CompositeIndex, t: f64) -> Result<f64> {
    let m = ConformalMeasure::new(t)?;
    Ok(m.grouped_mass(domain.sigma_composite(istar)))
}

/// An attractor point carried together with its composition address, so the
/// nested chain of groups containing it is known exactly.
#[derive(Debug, Clone)]
pub struct AttractorPoint {
    pub address: CompositeIndex,
    pub point: Point2,
}

impl AttractorPoint {
    pub fn from_address(domain: &PricklyDomain, address: CompositeIndex) -> Result<Self> {
        let point = domain.cusp_image(&address)?;
        Ok(AttractorPoint { address, point })
    }
}

/// Seeded sample of addressed attractor points at a fixed address norm.
pub fn sample_attractor_points(
    domain: &PricklyDomain,
    count: usize,
    norm: u32,
    seed: u64,
) -> Result<Vec<AttractorPoint>> {
    assert!(norm >= 1);
    let mut out = Vec::with_capacity(count);
    for k in 0..count {
        let mut rng = rng_for(seed, "attractor-point", k as u64);
        let side = if rng.random::<bool>() { SideCurve::Left } else { SideCurve::Right };
        let mut addr = CompositeIndex::root(side);
        for _ in 1..norm {
            let step = rng.random_range(0..4usize);
            addr = match step {
                0 => addr.extended_last(1),
                1 => addr.extended_last(2),
                2 => addr.appended(SideCurve::Left),
                _ => addr.appended(SideCurve::Right),
            };
        }
        out.push(AttractorPoint::from_address(domain, addr)?);
    }
    Ok(out)
}

/// Every cusp image at exactly the given address norm, enumerated
/// depth-first with incremental map composition. 2·4^{norm−1} points.
pub fn frontier_points(domain: &PricklyDomain, norm: u32) -> Result<Vec<Point2>> {
    assert!(norm >= 1);
    struct Node {
        prefix: SimilarityMap,
        last: Index,
        len: u32,
        norm: u32,
    }
    let mut out = Vec::with_capacity(2usize * 4usize.pow(norm - 1));
    let mut stack: Vec<Node> = vec![
        Node { prefix: SimilarityMap::identity(), last: Index::root(SideCurve::Left), len: 1, norm: 1 },
        Node { prefix: SimilarityMap::identity(), last: Index::root(SideCurve::Right), len: 1, norm: 1 },
    ];
    while let Some(node) = stack.pop() {
        let f_last = domain.similarity_for_index(&node.last)?;
        if node.norm == norm {
            out.push(node.prefix.apply(f_last.apply(domain.apex())));
            continue;
        }
        for digit in [1u8, 2u8] {
            let mut last = node.last.clone();
            last.digits.push(digit);
            stack.push(Node { prefix: node.prefix, last, len: node.len, norm: node.norm + 1 });
        }
        let deeper_prefix = node.prefix.compose(&f_last);
        for side in [SideCurve::Left, SideCurve::Right] {
            stack.push(Node {
                prefix: deeper_prefix,
                last: Index::root(side),
                len: node.len + 1,
                norm: node.norm + 1,
            });
        }
    }
    Ok(out)
}

/// σ of the truncation ī* (one norm unit up); 1 for the roots.
fn parent_sigma(domain: &PricklyDomain, sigma: f64, last: &Index, len: u32) -> f64 {
    if !last.digits.is_empty() {
        3.0 * sigma
    } else if len > 1 {
        3.0 * sigma / domain.big_l
    } else {
        1.0
    }
}

/// Conformal-mass bracket for m(Γ ∩ B_ρ(x)).
///
/// The upper bound sums grouped masses over the ρ-scale cover
/// I*_ρ(x) = {i*: σ_{i*}D₀ ≤ ρ < σ_{ī*}D₀, Γ̂_{i*} ∩ B_ρ(x) ≠ ∅}; the lower
/// bound is the mass of the largest group in the center's address chain whose
/// enclosing ball is certified inside B_ρ(x).
pub fn ball_mass(
    domain: &PricklyDomain,
    center: &AttractorPoint,
    rho: f64,
    t: f64,
) -> Result<(f64, f64)> {
    if !(rho > 0.0) {
        return Err(Error::Domain(format!("ball radius must be positive, got {rho}")));
    }
    let m = ConformalMeasure::new(t)?;
    let d0 = domain.d0;
    let x = center.point;

    // Upper bound by the grouped cover.
    let upper = if rho >= d0 {
        1.0
    } else {
        // DFS node carrying the composition split (prefix ∘ last), so word
        // extensions of the last entry reuse the prefix map.
        struct Node {
            prefix: SimilarityMap,
            last: Index,
            len: u32,
            norm: u32,
        }
        let mut masses: Vec<f64> = Vec::new();
        let mut stack: Vec<Node> = vec![
            Node {
                prefix: SimilarityMap::identity(),
                last: Index::root(SideCurve::Left),
                len: 1,
                norm: 1,
            },
            Node {
                prefix: SimilarityMap::identity(),
                last: Index::root(SideCurve::Right),
                len: 1,
                norm: 1,
            },
        ];
        while let Some(node) = stack.pop() {
            if node.norm > 64 {
                return Err(Error::Resolution(format!(
                    "cover enumeration for rho = {rho} exceeded the depth budget"
                )));
            }
            let sigma = 3f64.powi(-(node.norm as i32)) * domain.big_l.powi(node.len as i32);
            let f_last = domain.similarity_for_index(&node.last)?;
            let centre = node.prefix.apply(f_last.apply(domain.apex()));
            if centre.dist(x) > rho + 3.0 * sigma * d0 {
                continue; // the whole subtree's group misses the ball
            }
            if sigma * d0 <= rho {
                let psig = parent_sigma(domain, sigma, &node.last, node.len);
                debug_assert!(node.norm == 1 || psig * d0 > rho);
                let _ = psig;
                masses.push(m.grouped_mass(sigma));
                continue;
            }
            for digit in [1u8, 2u8] {
                let mut last = node.last.clone();
                last.digits.push(digit);
                stack.push(Node { prefix: node.prefix, last, len: node.len, norm: node.norm + 1 });
            }
            let deeper_prefix = node.prefix.compose(&f_last);
            for side in [SideCurve::Left, SideCurve::Right] {
                stack.push(Node {
                    prefix: deeper_prefix,
                    last: Index::root(side),
                    len: node.len + 1,
                    norm: node.norm + 1,
                });
            }
        }
        stable_sum(&masses).min(1.0)
    };

    // Lower bound: shallowest certified-contained ancestor group.
    let mut lower = None;
    let mut chain = Vec::new();
    let mut cursor = Some(center.address.clone());
    while let Some(c) = cursor {
        cursor = c.parent();
        chain.push(c);
    }
    for anc in chain.iter().rev() {
        let sigma = domain.sigma_composite(anc);
        let centre = domain.cusp_image(anc)?;
        if centre.dist(x) + 3.0 * sigma * d0 <= rho {
            lower = Some(m.grouped_mass(sigma));
            break;
        }
    }
    let lower = lower.ok_or_else(|| {
        Error::Resolution(format!(
            "no witness group of the address (norm {}) fits inside rho = {rho}",
            center.address.norm()
        ))
    })?;
    Ok((lower, upper))
}

/// One row of an Ahlfors-regularity scan.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AhlforsSample {
    pub center: Point2,
    pub rho: f64,
    pub lower: f64,
    pub upper: f64,
    pub lower_ratio: f64,
    pub upper_ratio: f64,
}

/// Per-radius mass ratios with the extracted regularity constants.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AhlforsReport {
    pub t: f64,
    pub samples: Vec<AhlforsSample>,
    /// max over samples of upper/ρ^t (the empirical A in the upper bound).
    pub upper_const: f64,
    /// min over samples of lower/ρ^t (the empirical 1/A in the lower bound).
    pub lower_const: f64,
}

impl AhlforsReport {
    /// Overall spread max/min of the mass ratios.
    pub fn spread(&self) -> f64 {
        self.upper_const / self.lower_const
    }

    pub fn passes(&self, a_max: f64) -> bool {
        self.lower_const > 0.0 && self.spread().is_finite() && self.spread() <= a_max
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("center_x,center_y,rho,lower,upper,lower_ratio,upper_ratio\n");
        for s in &self.samples {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                s.center.x, s.center.y, s.rho, s.lower, s.upper, s.lower_ratio, s.upper_ratio
            ));
        }
        out
    }
}

/// Scan m(Γ ∩ B_ρ)/ρ^t over centers × radii.
pub fn ahlfors_scan(
    domain: &PricklyDomain,
    t: f64,
    centers: &[AttractorPoint],
    radii: &[f64],
) -> Result<AhlforsReport> {
    if centers.is_empty() || radii.is_empty() {
        return Err(Error::Domain("ahlfors scan needs centers and radii".into()));
    }
    let mut samples = Vec::with_capacity(centers.len() * radii.len());
    let mut upper_const = f64::NEG_INFINITY;
    let mut lower_const = f64::INFINITY;
    for c in centers {
        for &rho in radii {
            let (lower, upper) = ball_mass(domain, c, rho, t)?;
            let scale = rho.powf(t);
            let s = AhlforsSample {
                center: c.point,
                rho,
                lower,
                upper,
                lower_ratio: lower / scale,
                upper_ratio: upper / scale,
            };
            upper_const = upper_const.max(s.upper_ratio);
            lower_const = lower_const.min(s.lower_ratio);
            samples.push(s);
        }
    }
    Ok(AhlforsReport { t, samples, upper_const, lower_const })
}

/// Box-counting dimension estimate: least-squares slope of log N(ε) against
/// log(1/ε).
pub fn box_counting_dimension(points: &[Point2], scales: &[f64]) -> Result<f64> {
    if points.len() < 1000 {
        return Err(Error::Estimation(format!(
            "box counting needs at least 1000 points, got {}",
            points.len()
        )));
    }
    if scales.len() < 4 {
        return Err(Error::Estimation("box counting needs at least 4 scales".into()));
    }
    let (min_s, max_s) =
        scales.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &s| (lo.min(s), hi.max(s)));
    if !(min_s > 0.0) || max_s / min_s < 100.0 {
        return Err(Error::Estimation("box-counting scales must span two decades".into()));
    }
    let mut xs = Vec::with_capacity(scales.len());
    let mut ys = Vec::with_capacity(scales.len());
    for &eps in scales {
        let mut cells: HashSet<(i64, i64)> = HashSet::new();
        for p in points {
            cells.insert(((p.x / eps).floor() as i64, (p.y / eps).floor() as i64));
        }
        if cells.len() < 2 && eps == min_s {
            return Err(Error::Estimation("degenerate point set for box counting".into()));
        }
        xs.push((1.0 / eps).ln());
        ys.push((cells.len() as f64).ln());
    }
    let (_, slope, _) = crate::util::linear_fit(&xs, &ys);
    Ok(slope)
}
