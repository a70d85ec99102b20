//! Generator curves: the two cusp-shaped sides of the initial wedge, carrying
//! the recursive gap-chord placements that the similarity maps attach to.
//!
//! The curve geometry is the smooth power profile of the wedge; the
//! parameterization is pinned only at the Cantor gap endpoints, where the
//! chord law ‖γ(x⁺)−γ(x⁻)‖ = 3^{−(1+|i''|)}·L must hold exactly. The top gap
//! is placed at the arc-length thirds of the side (which defines L); every
//! deeper gap is placed with equal arc-length flanks and its chord solved to
//! machine precision. Equal flanks keep the flank-to-chord ratio at the
//! stable value 3 plus curvature slack, so the recursion stays solvable at
//! every depth (an inset symmetric in the height coordinate instead loses
//! length on the steep part of the curve and runs out of room near the cusp).

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use crate::error::{Error, Result};
use crate::geometry::{wedge_half_width, Point2};

use super::index::SideCurve;

const SQRT3_2: f64 = 0.866025403784438646763;

/// Resolution of the cumulative arc-length table.
const ARC_CELLS: usize = 32_768;

/// y-coordinates of a placed gap: `y_minus` corresponds to the parameter x⁻
/// (nearer the cusp, so the larger height), `y_plus` to x⁺.
#[derive(Debug, Clone, Copy)]
pub(crate) struct GapY {
    pub y_minus: f64,
    pub y_plus: f64,
}

/// Shared placement table for both sides (the two sides are mirror images, so
/// the height placements coincide).
#[derive(Debug)]
pub(crate) struct CurveCore {
    pub theta0: f64,
    pub h: f64,
    pub arc_length: f64,
    pub big_l: f64,
    /// Cumulative arc from the apex, tabulated on a uniform height grid.
    arc_table: Vec<f64>,
    gaps: RwLock<HashMap<Vec<u8>, GapY>>,
}

impl CurveCore {
    pub fn new(theta0: f64, h: f64) -> Result<Arc<Self>> {
        if !(theta0 >= 1.0) {
            return Err(Error::Domain(format!("generator curve needs theta0 >= 1, got {theta0}")));
        }
        if !(h > 0.5 && h <= SQRT3_2) {
            return Err(Error::Domain(format!(
                "generator curve needs 1/2 < H <= sqrt(3)/2, got {h}"
            )));
        }
        let mut core = CurveCore {
            theta0,
            h,
            arc_length: 0.0,
            big_l: 0.0,
            arc_table: Vec::new(),
            gaps: RwLock::new(HashMap::new()),
        };
        core.build_arc_table();
        core.arc_length = *core.arc_table.last().unwrap();
        let y1 = core.y_at_arc(core.arc_length / 3.0);
        let y2 = core.y_at_arc(2.0 * core.arc_length / 3.0);
        core.big_l = 3.0 * core.chord(y1, y2);
        if !(core.big_l > 0.5 && core.big_l < 0.5 * (1.0 + 3f64.sqrt())) {
            return Err(Error::Construction(format!(
                "realized L = {} outside (1/2, (1+sqrt(3))/2); invalid initial-set height",
                core.big_l
            )));
        }
        core.gaps.write().unwrap().insert(Vec::new(), GapY { y_minus: y1, y_plus: y2 });
        Ok(Arc::new(core))
    }

    /// Half-width of the wedge at height y (distance cusp→base is h).
    pub fn profile(&self, y: f64) -> f64 {
        wedge_half_width(self.theta0, self.h, self.h - y)
    }

    fn profile_slope(&self, y: f64) -> f64 {
        // d/dy [ ((h−y)/h)^θ / 2 ] = −θ/(2h) ((h−y)/h)^{θ−1}
        -(self.theta0 / (2.0 * self.h)) * ((self.h - y) / self.h).powf(self.theta0 - 1.0)
    }

    pub fn chord(&self, y1: f64, y2: f64) -> f64 {
        let dx = self.profile(y1) - self.profile(y2);
        let dy = y1 - y2;
        dx.hypot(dy)
    }

    fn build_arc_table(&mut self) {
        // arc_table[i] = arc length from the apex down to y = h(1 − i/N),
        // i.e. indexed by depth u = h − y. Composite Simpson per cell.
        let n = ARC_CELLS;
        let du = self.h / n as f64;
        let g = |u: f64| {
            let s = self.profile_slope(self.h - u);
            (1.0 + s * s).sqrt()
        };
        let mut table = Vec::with_capacity(n + 1);
        table.push(0.0);
        let mut acc = 0.0;
        for i in 0..n {
            let a = i as f64 * du;
            let b = a + du;
            acc += du / 6.0 * (g(a) + 4.0 * g(0.5 * (a + b)) + g(b));
            table.push(acc);
        }
        self.arc_table = table;
    }

    /// Arc length of the side between height `y` and the apex.
    pub fn arc_from_apex(&self, y: f64) -> f64 {
        let u = (self.h - y).clamp(0.0, self.h);
        let pos = u / self.h * ARC_CELLS as f64;
        let i = (pos.floor() as usize).min(ARC_CELLS - 1);
        let frac = pos - i as f64;
        self.arc_table[i] + frac * (self.arc_table[i + 1] - self.arc_table[i])
    }

    /// Height at a given arc distance from the apex.
    fn y_at_arc(&self, s: f64) -> f64 {
        let s = s.clamp(0.0, self.arc_length);
        // Binary search the monotone table, then interpolate.
        let (mut lo, mut hi) = (0usize, ARC_CELLS);
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if self.arc_table[mid] <= s {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let seg = self.arc_table[hi] - self.arc_table[lo];
        let frac = if seg > 0.0 { (s - self.arc_table[lo]) / seg } else { 0.0 };
        let u = (lo as f64 + frac) * self.h / ARC_CELLS as f64;
        self.h - u
    }

    /// Heights bounding the dust segment that hosts the gap at `digits`:
    /// (y_hi, y_lo) with y_hi nearer the apex.
    pub fn segment(&self, digits: &[u8]) -> Result<(f64, f64)> {
        if digits.is_empty() {
            return Ok((self.h, 0.0));
        }
        let (parent, last) = (&digits[..digits.len() - 1], digits[digits.len() - 1]);
        let (p_hi, p_lo) = self.segment(parent)?;
        let g = self.gap(parent)?;
        match last {
            1 => Ok((p_hi, g.y_minus)),
            2 => Ok((g.y_plus, p_lo)),
            other => Err(Error::Domain(format!("gap digit must be 1 or 2, got {other}"))),
        }
    }

    /// Placed gap heights for `digits`, memoized.
    pub fn gap(&self, digits: &[u8]) -> Result<GapY> {
        if let Some(g) = self.gaps.read().unwrap().get(digits) {
            return Ok(*g);
        }
        let (y_hi, y_lo) = self.segment(digits)?;
        let level = 1 + digits.len() as u32;
        let target = 3f64.powi(-(level as i32)) * self.big_l;
        let g = self.place_equal_flanks(y_hi, y_lo, target, digits)?;
        self.gaps.write().unwrap().insert(digits.to_vec(), g);
        Ok(g)
    }

    /// Solve for the arc-symmetric inset w with
    /// ‖P(y_at(s_top+w)) − P(y_at(s_bot−w))‖ = chord.
    fn place_equal_flanks(&self, y_hi: f64, y_lo: f64, chord: f64, digits: &[u8]) -> Result<GapY> {
        if y_hi - y_lo < 1e-15 {
            return Err(Error::Resolution(format!(
                "gap word of length {} descends below float resolution",
                digits.len()
            )));
        }
        let full = self.chord(y_hi, y_lo);
        if full < chord {
            return Err(Error::Construction(format!(
                "segment at {digits:?} has chord {full} and cannot host a gap chord {chord}"
            )));
        }
        let s_top = self.arc_from_apex(y_hi);
        let s_bot = self.arc_from_apex(y_lo);
        let span = s_bot - s_top;
        let mut lo = 0.0f64;
        let mut hi = 0.5 * span;
        // chord(w) decreases from `full` to 0; bisect to machine precision.
        for _ in 0..90 {
            let mid = 0.5 * (lo + hi);
            let ym = self.y_at_arc(s_top + mid);
            let yp = self.y_at_arc(s_bot - mid);
            if self.chord(ym, yp) >= chord {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let w = 0.5 * (lo + hi);
        Ok(GapY { y_minus: self.y_at_arc(s_top + w), y_plus: self.y_at_arc(s_bot - w) })
    }

    pub fn point_on(&self, side: SideCurve, y: f64) -> Point2 {
        let x = self.profile(y);
        match side {
            SideCurve::Left => Point2::new(-x, y),
            SideCurve::Right => Point2::new(x, y),
        }
    }
}

/// A parameterized side curve view over the shared placement core.
#[derive(Clone)]
pub struct GeneratorCurve {
    pub side: SideCurve,
    pub(crate) core: Arc<CurveCore>,
}

impl std::fmt::Debug for GeneratorCurve {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GeneratorCurve")
            .field("side", &self.side)
            .field("theta0", &self.core.theta0)
            .field("h", &self.core.h)
            .field("big_l", &self.core.big_l)
            .finish()
    }
}

impl GeneratorCurve {
    pub fn new(side: SideCurve, theta0: f64, h: f64) -> Result<Self> {
        Ok(GeneratorCurve { side, core: CurveCore::new(theta0, h)? })
    }

    pub(crate) fn from_core(side: SideCurve, core: Arc<CurveCore>) -> Self {
        GeneratorCurve { side, core }
    }

    pub fn theta0(&self) -> f64 {
        self.core.theta0
    }

    pub fn height(&self) -> f64 {
        self.core.h
    }

    pub fn arc_length(&self) -> f64 {
        self.core.arc_length
    }

    /// L = 3‖γ(1/3) − γ(2/3)‖, fixed by the top-gap placement.
    pub fn big_l(&self) -> f64 {
        self.core.big_l
    }

    /// Cusp point γ(0).
    pub fn cusp(&self) -> Point2 {
        Point2::new(0.0, self.core.h)
    }

    /// Base corner γ(1).
    pub fn base_corner(&self) -> Point2 {
        match self.side {
            SideCurve::Left => Point2::new(-0.5, 0.0),
            SideCurve::Right => Point2::new(0.5, 0.0),
        }
    }

    /// (γ(x⁻), γ(x⁺)) for the gap addressed by `digits`.
    pub fn gap_endpoints(&self, digits: &[u8]) -> Result<(Point2, Point2)> {
        let g = self.core.gap(digits)?;
        Ok((self.core.point_on(self.side, g.y_minus), self.core.point_on(self.side, g.y_plus)))
    }

    /// Sample map γ(τ). Gap interiors and unresolved dust are interpolated
    /// linearly in height; gap endpoints are exact.
    pub fn point_at(&self, tau: f64) -> Result<Point2> {
        if !(0.0..=1.0).contains(&tau) {
            return Err(Error::Domain(format!("curve parameter must be in [0,1], got {tau}")));
        }
        let mut a = 0.0f64;
        let mut b = 1.0f64;
        let mut digits: Vec<u8> = Vec::new();
        for _ in 0..40 {
            let w = (b - a) / 3.0;
            let g = self.core.gap(&digits)?;
            if tau <= a + w {
                b = a + w;
                digits.push(1);
            } else if tau >= a + 2.0 * w {
                a = b - w;
                digits.push(2);
            } else {
                // Inside the removed gap: interpolate across the chord span.
                let s = (tau - (a + w)) / w;
                let y = g.y_minus + s * (g.y_plus - g.y_minus);
                return Ok(self.core.point_on(self.side, y));
            }
            if b - a < 1e-14 {
                break;
            }
        }
        let (y_hi, y_lo) = self.core.segment(&digits)?;
        let s = if b > a { (tau - a) / (b - a) } else { 0.5 };
        let y = y_hi + s * (y_lo - y_hi);
        Ok(self.core.point_on(self.side, y))
    }

    /// Limit point of the nested dust segments selected by a {1,2} word.
    pub fn dust_point(&self, word: &[u8], extra_depth: usize) -> Result<Point2> {
        let mut digits: Vec<u8> = Vec::new();
        for &d in word {
            if d != 1 && d != 2 {
                return Err(Error::Domain("dust word digits must be 1 or 2".into()));
            }
            digits.push(d);
        }
        // Positions converge by a factor 3 per level; depth 25 puts the
        // midpoint within ~1e-12 of the limit, well above float resolution.
        for _ in 0..extra_depth {
            if digits.len() >= 25 {
                break;
            }
            digits.push(1);
        }
        let (y_hi, y_lo) = self.core.segment(&digits)?;
        Ok(self.core.point_on(self.side, 0.5 * (y_hi + y_lo)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn koch_case_has_unit_l() {
        let c = GeneratorCurve::new(SideCurve::Right, 1.0, SQRT3_2).unwrap();
        assert!((c.big_l() - 1.0).abs() < 1e-10, "L = {}", c.big_l());
        // Straight side: arc length equals the chord length 1.
        assert!((c.arc_length() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn koch_case_gaps_are_exact_thirds() {
        let c = GeneratorCurve::new(SideCurve::Right, 1.0, SQRT3_2).unwrap();
        let g = c.core.gap(&[]).unwrap();
        let h = SQRT3_2;
        assert!((g.y_minus - 2.0 * h / 3.0).abs() < 1e-9);
        assert!((g.y_plus - h / 3.0).abs() < 1e-9);
        let g1 = c.core.gap(&[1]).unwrap();
        assert!((g1.y_minus - 8.0 * h / 9.0).abs() < 1e-9);
        assert!((g1.y_plus - 7.0 * h / 9.0).abs() < 1e-9);
    }

    #[test]
    fn chord_scaling_law_holds_at_depth() {
        for (theta0, h) in [(1.0, SQRT3_2), (2.0, SQRT3_2), (2.0, 0.6), (3.5, 0.75)] {
            let c = GeneratorCurve::new(SideCurve::Left, theta0, h).unwrap();
            let l = c.big_l();
            for path in [
                vec![1, 1, 1, 1, 1, 1, 1, 1],
                vec![2, 2, 2, 2, 2, 2, 2, 2],
                vec![1, 2, 1, 2, 1, 2, 1, 2],
                vec![2, 1, 1, 2, 2, 1, 2, 1],
            ] {
                for k in 0..=path.len() {
                    let digits = &path[..k];
                    let (p, q) = c.gap_endpoints(digits).unwrap();
                    let want = 3f64.powi(-(1 + k as i32)) * l;
                    let got = p.dist(q);
                    // Chords are solved to float resolution of the ambient
                    // coordinates, so allow absolute rounding at scale 1.
                    assert!(
                        (got - want).abs() < 1e-13,
                        "theta0={theta0} H={h} path={digits:?}: got {got}, want {want}"
                    );
                }
            }
        }
    }

    #[test]
    fn deep_placements_stay_feasible_near_the_cusp() {
        // The all-1 digit chain hugs the cusp, where naive placements run
        // out of room; it must stay solvable to depth 20.
        for (theta0, h) in [(2.0, 0.7), (3.0, SQRT3_2), (1.5, 0.55)] {
            let c = GeneratorCurve::new(SideCurve::Right, theta0, h).unwrap();
            let digits: Vec<u8> = vec![1; 20];
            for k in 0..=20 {
                assert!(
                    c.gap_endpoints(&digits[..k]).is_ok(),
                    "collapse at depth {k} for theta0={theta0}, H={h}"
                );
            }
        }
    }

    #[test]
    fn parent_to_child_chord_ratio_is_three() {
        let c = GeneratorCurve::new(SideCurve::Right, 2.0, 0.8).unwrap();
        let (p0, q0) = c.gap_endpoints(&[]).unwrap();
        let (p1, q1) = c.gap_endpoints(&[1]).unwrap();
        let ratio = p0.dist(q0) / p1.dist(q1);
        assert!((ratio - 3.0).abs() < 1e-10, "ratio {ratio}");
    }

    #[test]
    fn big_l_grows_with_cusp_sharpness() {
        let l1 = GeneratorCurve::new(SideCurve::Right, 1.0, SQRT3_2).unwrap().big_l();
        let l2 = GeneratorCurve::new(SideCurve::Right, 2.0, SQRT3_2).unwrap().big_l();
        let l3 = GeneratorCurve::new(SideCurve::Right, 4.0, SQRT3_2).unwrap().big_l();
        assert!(l1 < l2 && l2 < l3, "{l1} {l2} {l3}");
        assert!(l3 < 0.5 * (1.0 + 3f64.sqrt()));
    }

    #[test]
    fn endpoints_and_orientation() {
        let c = GeneratorCurve::new(SideCurve::Left, 2.0, 0.7).unwrap();
        let p0 = c.point_at(0.0).unwrap();
        let p1 = c.point_at(1.0).unwrap();
        assert!(p0.dist(Point2::new(0.0, 0.7)) < 1e-9);
        assert!(p1.dist(Point2::new(-0.5, 0.0)) < 1e-9);
        // Mid-gap parameter lands between the gap endpoints.
        let (gm, gp) = c.gap_endpoints(&[]).unwrap();
        let mid = c.point_at(0.5).unwrap();
        assert!(mid.y <= gm.y + 1e-12 && mid.y >= gp.y - 1e-12);
    }

    #[test]
    fn dust_points_lie_on_the_profile() {
        let c = GeneratorCurve::new(SideCurve::Right, 2.0, 0.8).unwrap();
        let p = c.dust_point(&[1, 2, 2, 1], 20).unwrap();
        assert!((p.x - c.core.profile(p.y)).abs() < 1e-12);
    }
}
