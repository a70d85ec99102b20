//! Infinite iterated function system behind the prickly snowflake: index
//! algebra, generator curves, similarity maps, boundary generation, and the
//! dimension solver for 2(L^t + 1) = 3^t.

pub mod curve;
pub mod index;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{DomainApprox, DomainKind, Point2, Polyline};

pub use curve::GeneratorCurve;
pub use index::{
    cantor_interval, enumerate_up_to_norm, grouped_family, CompositeIndex, Index, SideCurve,
};

use curve::CurveCore;

/// Direct similarity z ↦ a·z + b (optionally conjugating first), stored as
/// scale, rotation, and translation.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SimilarityMap {
    pub scale: f64,
    pub rotation: f64,
    pub translation: Point2,
    pub reflection: bool,
}

impl SimilarityMap {
    pub fn identity() -> Self {
        SimilarityMap { scale: 1.0, rotation: 0.0, translation: Point2::new(0.0, 0.0), reflection: false }
    }

    fn a(&self) -> (f64, f64) {
        (self.scale * self.rotation.cos(), self.scale * self.rotation.sin())
    }

    pub fn apply(&self, p: Point2) -> Point2 {
        let (px, py) = if self.reflection { (p.x, -p.y) } else { (p.x, p.y) };
        let (ar, ai) = self.a();
        Point2::new(
            ar * px - ai * py + self.translation.x,
            ai * px + ar * py + self.translation.y,
        )
    }

    /// self ∘ other.
    pub fn compose(&self, other: &SimilarityMap) -> SimilarityMap {
        let (ar, ai) = self.a();
        let (br, bi) = other.a();
        let (br, bi) = if self.reflection { (br, -bi) } else { (br, bi) };
        let (tx, ty) = if self.reflection {
            (other.translation.x, -other.translation.y)
        } else {
            (other.translation.x, other.translation.y)
        };
        let cr = ar * br - ai * bi;
        let ci = ar * bi + ai * br;
        SimilarityMap {
            scale: self.scale * other.scale,
            rotation: ci.atan2(cr),
            translation: Point2::new(
                ar * tx - ai * ty + self.translation.x,
                ai * tx + ar * ty + self.translation.y,
            ),
            reflection: self.reflection != other.reflection,
        }
    }

    /// Unique direct similarity with f(z1) = w1 and f(z2) = w2.
    pub fn from_two_points(z1: Point2, w1: Point2, z2: Point2, w2: Point2) -> Result<Self> {
        let dz = z2 - z1;
        let dw = w2 - w1;
        let dz2 = dz.dot(dz);
        if dz2 == 0.0 {
            return Err(Error::Construction("similarity from coincident source points".into()));
        }
        // a = dw / dz in complex arithmetic.
        let ar = (dw.x * dz.x + dw.y * dz.y) / dz2;
        let ai = (dw.y * dz.x - dw.x * dz.y) / dz2;
        let scale = ar.hypot(ai);
        if scale == 0.0 {
            return Err(Error::Construction("similarity with zero scale".into()));
        }
        let rotation = ai.atan2(ar);
        let b = Point2::new(w1.x - (ar * z1.x - ai * z1.y), w1.y - (ai * z1.x + ar * z1.y));
        Ok(SimilarityMap { scale, rotation, translation: b, reflection: false })
    }
}

/// Unique t in [1,2] with 2(L^t + 1) = 3^t, solved by bisection.
///
/// The residual function 3^t − 2L^t − 2 is strictly increasing on [1,2] for
/// every admissible L, so bisection converges unconditionally.
pub fn hausdorff_dimension(big_l: f64) -> Result<f64> {
    if !(big_l > 0.5 && big_l <= 0.5 * (1.0 + 3f64.sqrt())) {
        return Err(Error::Domain(format!("L must lie in (1/2, (1+sqrt(3))/2], got {big_l}")));
    }
    let f = |t: f64| 3f64.powf(t) - 2.0 * big_l.powf(t) - 2.0;
    let mut lo = 1.0f64;
    let mut hi = 2.0f64;
    debug_assert!(f(lo) < 0.0 && f(hi) > 0.0);
    for _ in 0..64 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let t = 0.5 * (lo + hi);
    debug_assert!((2.0 * (big_l.powf(t) + 1.0) - 3f64.powf(t)).abs() < 1e-12);
    Ok(t)
}

/// L realized by the depth-0 generator geometry for the given wedge shape.
pub fn l_from_geometry(theta0: f64, h: f64) -> Result<f64> {
    Ok(CurveCore::new(theta0, h)?.big_l)
}

/// The prickly snowflake: wedge shape parameters, realized L and dimension t,
/// the shared generator placements, and the truncation policy.
#[derive(Clone)]
pub struct PricklyDomain {
    pub theta0: f64,
    pub h: f64,
    pub big_l: f64,
    pub t: f64,
    /// Depth policy: maximum ‖i*‖ expanded by boundary generation.
    pub max_norm: u32,
    core: Arc<CurveCore>,
    /// Incircle of the initial wedge: witness ball for the paper's r₀.
    pub inradius: f64,
    pub incenter: Point2,
    /// Certified upper bound on the boundary diameter (the D₀ entering all
    /// grouped enclosure radii 3σD₀).
    pub d0: f64,
}

impl std::fmt::Debug for PricklyDomain {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PricklyDomain")
            .field("theta0", &self.theta0)
            .field("h", &self.h)
            .field("big_l", &self.big_l)
            .field("t", &self.t)
            .field("max_norm", &self.max_norm)
            .finish()
    }
}

/// Extra Cantor-dust refinement levels beyond the bump expansion budget.
const DUST_EXTRA: u32 = 2;

/// Hard cap on generated polyline vertices.
pub const VERTEX_BUDGET: usize = 4_000_000;

impl PricklyDomain {
    pub fn new(theta0: f64, h: f64, max_norm: u32) -> Result<Self> {
        let core = CurveCore::new(theta0, h)?;
        let big_l = core.big_l;
        let t = hausdorff_dimension(big_l)?;
        let (incenter, inradius) = wedge_incircle(&core);
        let mut dom = PricklyDomain {
            theta0,
            h,
            big_l,
            t,
            max_norm,
            core,
            inradius,
            incenter,
            d0: 0.0,
        };
        let (poly, err) = dom.boundary_polyline(4.min(max_norm))?;
        let (lo, hi) = bbox(&poly.vertices);
        dom.d0 = (hi - lo).norm() + 2.0 * err;
        Ok(dom)
    }

    pub fn curve(&self, side: SideCurve) -> GeneratorCurve {
        GeneratorCurve::from_core(side, self.core.clone())
    }

    /// The common cusp point γ₃(0) = γ₄(0).
    pub fn apex(&self) -> Point2 {
        Point2::new(0.0, self.h)
    }

    pub fn kind(&self) -> DomainKind {
        if self.theta0 == 1.0 {
            DomainKind::Koch
        } else {
            DomainKind::PricklySnowflake
        }
    }

    /// σ_i = 3^{−|i|} L for a single index.
    pub fn sigma(&self, index: &Index) -> f64 {
        3f64.powi(-(index.len() as i32)) * self.big_l
    }

    /// σ_{i*} = 3^{−‖i*‖} L^{|i*|}.
    pub fn sigma_composite(&self, istar: &CompositeIndex) -> f64 {
        3f64.powi(-(istar.norm() as i32)) * self.big_l.powi(istar.len() as i32)
    }

    /// The similarity attaching a copy of the initial set over the gap chord
    /// addressed by `index`. Label-3 (left-curve) maps send the base-right
    /// corner to γ(x⁻); label-4 maps send the base-left corner there.
    pub fn similarity_for_index(&self, index: &Index) -> Result<SimilarityMap> {
        let curve = self.curve(index.side);
        let (a_minus, a_plus) = curve.gap_endpoints(&index.digits)?;
        let (src_minus, src_plus) = match index.side {
            SideCurve::Left => (Point2::new(0.5, 0.0), Point2::new(-0.5, 0.0)),
            SideCurve::Right => (Point2::new(-0.5, 0.0), Point2::new(0.5, 0.0)),
        };
        let mut sim = SimilarityMap::from_two_points(src_minus, a_minus, src_plus, a_plus)?;
        // The chord length equals 3^{−|i|}L to placement precision; store the
        // exact arithmetic value so composed scales satisfy the scale law as
        // an identity.
        sim.scale = self.sigma(index);
        Ok(sim)
    }

    /// f_{i*} = f_{i₁} ∘ ... ∘ f_{i_{j*}}.
    pub fn compose(&self, istar: &CompositeIndex) -> Result<SimilarityMap> {
        let mut out: Option<SimilarityMap> = None;
        for e in istar.entries() {
            let f = self.similarity_for_index(e)?;
            out = Some(match out {
                None => f,
                Some(acc) => acc.compose(&f),
            });
        }
        Ok(out.unwrap())
    }

    /// Exact attractor point: the image of the cusp under f_{i*}.
    pub fn cusp_image(&self, istar: &CompositeIndex) -> Result<Point2> {
        Ok(self.compose(istar)?.apply(self.apex()))
    }

    /// Dust point γ_{side}(c) for a Cantor parameter selected by a {1,2} word.
    pub fn dust_point(&self, side: SideCurve, word: &[u8]) -> Result<Point2> {
        self.curve(side).dust_point(word, 15)
    }

    /// Closed boundary polyline: base segment joining (±1/2, 0) plus the
    /// depth-truncated fractal arc, counterclockwise. Returns the polyline
    /// and the certified Hausdorff-distance bound to the true boundary.
    pub fn boundary_polyline(&self, depth: u32) -> Result<(Polyline, f64)> {
        let mut arcs: Vec<Vec<Point2>> = Vec::with_capacity(depth as usize + 1);
        let mut dust_gaps: Vec<f64> = Vec::with_capacity(depth as usize + 1);
        let mut total: usize = 0;
        for b in 0..=depth {
            let (arc, own_gap) = self.build_arc(b, &arcs)?;
            total += arc.len();
            if total > VERTEX_BUDGET {
                return Err(Error::Resource(format!(
                    "boundary polyline at depth {depth} exceeds the vertex budget {VERTEX_BUDGET}"
                )));
            }
            // Dust chord deviation for this budget level, including deviation
            // inherited from spliced sub-arcs at their reduced scale.
            let mut gap = own_gap;
            for level in 1..=b {
                let sigma = 3f64.powi(-(level as i32)) * self.big_l;
                gap = gap.max(sigma * dust_gaps[(b - level) as usize]);
            }
            dust_gaps.push(gap);
            arcs.push(arc);
        }
        let arc = arcs.pop().unwrap();
        let mut verts = Vec::with_capacity(arc.len() + 1);
        verts.push(Point2::new(-0.5, 0.0));
        for p in arc {
            push_dedup(&mut verts, p);
        }
        if verts.len() > 1 && verts.last().unwrap().dist(verts[0]) < 1e-13 {
            verts.pop();
        }
        let poly = Polyline::new(verts, true)?;
        // Certified error: untruncated bumps live inside balls of radius
        // 3 σ D₀ around frontier chords, plus the smooth-chord deviation.
        let (lo, hi) = bbox(&poly.vertices);
        let d0 = (hi - lo).norm();
        let frontier = depth + 1;
        let sigma_max = (1..=frontier)
            .map(|j| 3f64.powi(-(frontier as i32)) * self.big_l.powi(j as i32))
            .fold(0.0f64, f64::max);
        let err = 3.0 * sigma_max * d0 + dust_gaps.last().unwrap();
        Ok((poly, err))
    }

    /// Boundary polyline wrapped as a queryable domain.
    pub fn domain_approx(&self, depth: u32) -> Result<DomainApprox> {
        let (poly, err) = self.boundary_polyline(depth)?;
        Ok(DomainApprox::from_closed_polyline(self.kind(), poly, depth, err))
    }

    /// One fractal arc from (1/2, 0) over the cusp to (−1/2, 0) with bump
    /// budget `budget`. Returns the vertices and the worst smooth-chord
    /// deviation among its own dust terminals.
    fn build_arc(&self, budget: u32, arcs: &[Vec<Point2>]) -> Result<(Vec<Point2>, f64)> {
        let mut out: Vec<Point2> = Vec::new();
        let mut worst_gap = 0.0f64;
        self.walk(SideCurve::Right, &mut Vec::new(), budget, arcs, &mut out, &mut worst_gap)?;
        self.walk(SideCurve::Left, &mut Vec::new(), budget, arcs, &mut out, &mut worst_gap)?;
        Ok((out, worst_gap))
    }

    fn walk(
        &self,
        side: SideCurve,
        digits: &mut Vec<u8>,
        budget: u32,
        arcs: &[Vec<Point2>],
        out: &mut Vec<Point2>,
        worst_gap: &mut f64,
    ) -> Result<()> {
        let level = 1 + digits.len() as u32;
        if level > budget + DUST_EXTRA {
            // Terminal dust segment: emit its endpoints in walk order and
            // track the chord's certified deviation from the smooth profile.
            let (y_hi, y_lo) = self.core.segment(digits)?;
            let gap = profile_chord_gap(&self.core, y_lo, y_hi);
            if gap > *worst_gap {
                *worst_gap = gap;
            }
            match side {
                SideCurve::Right => {
                    push_dedup(out, self.core.point_on(side, y_lo));
                    push_dedup(out, self.core.point_on(side, y_hi));
                }
                SideCurve::Left => {
                    push_dedup(out, self.core.point_on(side, y_hi));
                    push_dedup(out, self.core.point_on(side, y_lo));
                }
            }
            return Ok(());
        }
        match side {
            SideCurve::Right => {
                digits.push(2);
                self.walk(side, digits, budget, arcs, out, worst_gap)?;
                digits.pop();
                self.splice(side, digits, level, budget, arcs, out)?;
                digits.push(1);
                self.walk(side, digits, budget, arcs, out, worst_gap)?;
                digits.pop();
            }
            SideCurve::Left => {
                digits.push(1);
                self.walk(side, digits, budget, arcs, out, worst_gap)?;
                digits.pop();
                self.splice(side, digits, level, budget, arcs, out)?;
                digits.push(2);
                self.walk(side, digits, budget, arcs, out, worst_gap)?;
                digits.pop();
            }
        }
        Ok(())
    }

    fn splice(
        &self,
        side: SideCurve,
        digits: &[u8],
        level: u32,
        budget: u32,
        arcs: &[Vec<Point2>],
        out: &mut Vec<Point2>,
    ) -> Result<()> {
        if level > budget {
            return Ok(());
        }
        let index = Index::new(side, digits.to_vec())?;
        let sim = self.similarity_for_index(&index)?;
        for p in &arcs[(budget - level) as usize] {
            push_dedup(out, sim.apply(*p));
        }
        Ok(())
    }
}

fn push_dedup(out: &mut Vec<Point2>, p: Point2) {
    if let Some(last) = out.last() {
        if last.dist(p) < 1e-13 {
            return;
        }
    }
    out.push(p);
}

fn bbox(pts: &[Point2]) -> (Point2, Point2) {
    let mut lo = Point2::new(f64::INFINITY, f64::INFINITY);
    let mut hi = Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in pts {
        lo.x = lo.x.min(p.x);
        lo.y = lo.y.min(p.y);
        hi.x = hi.x.max(p.x);
        hi.y = hi.y.max(p.y);
    }
    (lo, hi)
}

/// Certified bound for the gap between the side profile and a chord between
/// heights y_lo < y_hi (both sides share the profile by symmetry).
fn profile_chord_gap(core: &CurveCore, y_lo: f64, y_hi: f64) -> f64 {
    // In the depth coordinate u = h − y the profile is the wedge power curve,
    // so reuse its exact convex-gap formula.
    crate::geometry::wedge_power_gap(core.theta0, core.h, core.h - y_hi, core.h - y_lo)
}

/// Incircle of the initial wedge (center on the axis).
fn wedge_incircle(core: &CurveCore) -> (Point2, f64) {
    let dist_to_side = |yc: f64| -> f64 {
        let mut best = f64::INFINITY;
        let n = 512;
        for k in 0..=n {
            let y = core.h * k as f64 / n as f64;
            let p = core.point_on(SideCurve::Right, y);
            let d = p.dist(Point2::new(0.0, yc));
            if d < best {
                best = d;
            }
        }
        best
    };
    // Largest yc with dist_to_side(yc) >= yc; below that the base dominates.
    let mut lo = 0.0f64;
    let mut hi = core.h;
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if dist_to_side(mid) >= mid {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let yc = 0.5 * (lo + hi);
    (Point2::new(0.0, yc), yc.min(dist_to_side(yc)))
}
