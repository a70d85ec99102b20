//! Planar domains with certified boundary-distance queries.
//!
//! A [`DomainApprox`] is the geometric substrate every other module works on:
//! a closed boundary polyline (or an exact 1-D interval), a point-in-domain
//! test, and a distance-to-boundary oracle whose error against the true
//! domain is tracked in `distance_error`. All types are immutable after
//! construction and all queries are re-entrant.

pub mod bvh;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use bvh::SegmentBvh;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub fn new(x: f64, y: f64) -> Self {
        Point2 { x, y }
    }

    pub fn dot(self, o: Point2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist(self, o: Point2) -> f64 {
        (self - o).norm()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl std::ops::Add for Point2 {
    type Output = Point2;
    fn add(self, o: Point2) -> Point2 {
        Point2::new(self.x + o.x, self.y + o.y)
    }
}

impl std::ops::Sub for Point2 {
    type Output = Point2;
    fn sub(self, o: Point2) -> Point2 {
        Point2::new(self.x - o.x, self.y - o.y)
    }
}

impl std::ops::Mul<f64> for Point2 {
    type Output = Point2;
    fn mul(self, s: f64) -> Point2 {
        Point2::new(self.x * s, self.y * s)
    }
}

/// Ordered vertex chain; `closed` chains implicitly join last to first.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Polyline {
    pub vertices: Vec<Point2>,
    pub closed: bool,
}

impl Polyline {
    pub fn new(vertices: Vec<Point2>, closed: bool) -> Result<Self> {
        if vertices.len() < 2 {
            return Err(Error::Construction("polyline needs at least 2 vertices".into()));
        }
        for w in vertices.windows(2) {
            if !w[0].is_finite() || w[0] == w[1] {
                return Err(Error::Construction(
                    "polyline vertices must be finite and consecutive vertices distinct".into(),
                ));
            }
        }
        if !vertices.last().unwrap().is_finite() {
            return Err(Error::Construction("polyline vertices must be finite".into()));
        }
        Ok(Polyline { vertices, closed })
    }

    pub fn segments(&self) -> Vec<(Point2, Point2)> {
        let mut segs: Vec<(Point2, Point2)> =
            self.vertices.windows(2).map(|w| (w[0], w[1])).collect();
        if self.closed {
            segs.push((*self.vertices.last().unwrap(), self.vertices[0]));
        }
        segs
    }

    /// Signed area (positive for counterclockwise closed chains).
    pub fn signed_area(&self) -> f64 {
        let mut a = 0.0;
        let n = self.vertices.len();
        for i in 0..n {
            let p = self.vertices[i];
            let q = self.vertices[(i + 1) % n];
            a += p.x * q.y - q.x * p.y;
        }
        0.5 * a
    }

    /// One `x,y` row per vertex.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(self.vertices.len() * 24);
        out.push_str("x,y\n");
        for v in &self.vertices {
            out.push_str(&format!("{},{}\n", v.x, v.y));
        }
        out
    }
}

/// Open ball specification used for the inner means Ψ(x) and Φ(x).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct BallSpec {
    pub center: Point2,
    pub radius: f64,
}

/// Parameters of the approach region Q^θ_{λ,δ}(x̄).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ApproachParams {
    pub base_point: Point2,
    pub lambda: f64,
    pub theta: f64,
    pub delta: f64,
}

impl ApproachParams {
    pub fn new(base_point: Point2, lambda: f64, theta: f64, delta: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda < 1.0 && theta >= 1.0 && delta > 0.0) {
            return Err(Error::Domain(format!(
                "approach params need 0<lambda<1<=theta, delta>0; got lambda={lambda}, theta={theta}, delta={delta}"
            )));
        }
        Ok(ApproachParams { base_point, lambda, theta, delta })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DomainKind {
    Wedge,
    PricklySnowflake,
    Interval1d,
    Koch,
}

/// Classification of a query point against the approximate boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    Inside,
    Outside,
    /// Within `distance_error` of the boundary; excluded from quadrature.
    Boundary,
}

/// A planar (or 1-D) domain with a depth-k polygonal boundary and a certified
/// distance oracle.
#[derive(Debug, Clone)]
pub struct DomainApprox {
    pub kind: DomainKind,
    pub boundary: Polyline,
    pub depth: u32,
    /// Certified bound on |d_approx − d_exact|.
    pub distance_error: f64,
    interval: Option<(f64, f64)>,
    bvh: Option<SegmentBvh>,
    bbox: (Point2, Point2),
}

/// Width profile of the cusped wedge: half-opening at depth `x1` from the cusp.
pub fn wedge_half_width(theta0: f64, h: f64, x1: f64) -> f64 {
    0.5 * (x1 / h).powf(theta0)
}

/// Exact bound for the gap between the power curve `y = (x/h)^θ/2` and its
/// chord on `[a, b]`. The curve is convex for θ ≥ 1, so the gap peaks where
/// the tangent is parallel to the chord.
pub fn wedge_power_gap(theta0: f64, h: f64, a: f64, b: f64) -> f64 {
    debug_assert!(b > a && a >= 0.0);
    if theta0 == 1.0 {
        return 0.0;
    }
    let f = |x: f64| wedge_half_width(theta0, h, x);
    let slope = (f(b) - f(a)) / (b - a);
    if slope <= 0.0 {
        return 0.0;
    }
    // f'(x) = θ/(2h) (x/h)^{θ−1} = slope  ⇒  x* in closed form.
    let c = 0.5 / h.powf(theta0);
    let xs = (slope / (c * theta0)).powf(1.0 / (theta0 - 1.0));
    let xs = xs.clamp(a, b);
    let chord = f(a) + slope * (xs - a);
    (chord - f(xs)).max(0.0)
}

fn sample_power_curve(theta0: f64, h: f64, tol: f64, budget: usize) -> Result<Vec<f64>> {
    // Breakpoints in x1 for the curve y = wedge_half_width(x1), certified so
    // every chord deviates from the curve by at most tol.
    let mut xs = vec![0.0];
    let mut stack = vec![(0.0f64, h)];
    let mut accepted: Vec<(f64, f64)> = Vec::new();
    while let Some((a, b)) = stack.pop() {
        if accepted.len() + stack.len() > budget {
            return Err(Error::Resource(format!(
                "wedge sampling exceeds {budget} segments at tolerance {tol}"
            )));
        }
        if wedge_power_gap(theta0, h, a, b) <= tol && (b - a) <= h * 0.26 {
            accepted.push((a, b));
        } else {
            let m = 0.5 * (a + b);
            stack.push((m, b));
            stack.push((a, m));
        }
    }
    accepted.sort_by(|p, q| p.0.partial_cmp(&q.0).unwrap());
    for (_, b) in accepted {
        xs.push(b);
    }
    Ok(xs)
}

impl DomainApprox {
    /// Cusped wedge Ω^θ₀ = {0 < x₁ < H, |x₂| < (x₁/H)^θ₀ / 2}, cusp at the
    /// origin, sampled so the polyline is within `tol` of the true boundary.
    pub fn wedge(theta0: f64, h: f64, tol: f64) -> Result<Self> {
        if !(theta0 >= 1.0) {
            return Err(Error::Domain(format!("wedge needs theta0 >= 1, got {theta0}")));
        }
        if !(h > 0.5 && h <= 3f64.sqrt() / 2.0) {
            return Err(Error::Domain(format!("wedge needs 1/2 < H <= sqrt(3)/2, got {h}")));
        }
        if !(tol > 0.0) {
            return Err(Error::Domain("wedge tolerance must be positive".into()));
        }
        let xs = sample_power_curve(theta0, h, tol, 2_000_000)?;
        // Counterclockwise: cusp → lower curve → base edge → upper curve.
        let mut verts: Vec<Point2> = Vec::with_capacity(2 * xs.len() + 1);
        for &x in &xs {
            verts.push(Point2::new(x, -wedge_half_width(theta0, h, x)));
        }
        for &x in xs.iter().rev() {
            let y = wedge_half_width(theta0, h, x);
            let p = Point2::new(x, y);
            if *verts.last().unwrap() != p {
                verts.push(p);
            }
        }
        // Drop the duplicated cusp closing vertex; the chain closes itself.
        if verts.len() > 1 && verts[0] == *verts.last().unwrap() {
            verts.pop();
        }
        let boundary = Polyline::new(verts, true)?;
        Ok(Self::from_closed_polyline(DomainKind::Wedge, boundary, 0, tol))
    }

    /// 1-D interval domain (a, b) with an exact distance oracle.
    pub fn interval(a: f64, b: f64) -> Result<Self> {
        if !(a < b) {
            return Err(Error::Domain(format!("interval needs a < b, got a={a}, b={b}")));
        }
        let boundary = Polyline::new(vec![Point2::new(a, 0.0), Point2::new(b, 0.0)], false)?;
        Ok(DomainApprox {
            kind: DomainKind::Interval1d,
            boundary,
            depth: 0,
            distance_error: 0.0,
            interval: Some((a, b)),
            bvh: None,
            bbox: (Point2::new(a, 0.0), Point2::new(b, 0.0)),
        })
    }

    /// Wrap an externally built closed boundary (snowflake, test polygons).
    pub fn from_closed_polyline(
        kind: DomainKind,
        boundary: Polyline,
        depth: u32,
        distance_error: f64,
    ) -> Self {
        assert!(boundary.closed, "2-D domains need a closed boundary");
        let segs = boundary.segments();
        let bvh = SegmentBvh::build(segs);
        let mut lo = Point2::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for v in &boundary.vertices {
            lo.x = lo.x.min(v.x);
            lo.y = lo.y.min(v.y);
            hi.x = hi.x.max(v.x);
            hi.y = hi.y.max(v.y);
        }
        DomainApprox {
            kind,
            boundary,
            depth,
            distance_error,
            interval: None,
            bvh: Some(bvh),
            bbox: (lo, hi),
        }
    }

    /// Axis-aligned unit square (0,1)², exact boundary. Test fixture.
    pub fn unit_square() -> Self {
        let boundary = Polyline::new(
            vec![
                Point2::new(0.0, 0.0),
                Point2::new(1.0, 0.0),
                Point2::new(1.0, 1.0),
                Point2::new(0.0, 1.0),
            ],
            true,
        )
        .unwrap();
        Self::from_closed_polyline(DomainKind::Wedge, boundary, 0, 0.0)
    }

    pub fn is_one_dimensional(&self) -> bool {
        self.interval.is_some()
    }

    pub fn interval_bounds(&self) -> Option<(f64, f64)> {
        self.interval
    }

    pub fn bounding_box(&self) -> (Point2, Point2) {
        self.bbox
    }

    /// Distance from `x` to the approximate boundary; defined for every `x`.
    pub fn distance_to_boundary(&self, x: Point2) -> f64 {
        match self.interval {
            Some((a, b)) => (x.x - a).abs().min((x.x - b).abs()),
            None => self.bvh.as_ref().unwrap().distance(x),
        }
    }

    /// Point-in-domain test against the depth-k boundary.
    pub fn contains(&self, x: Point2) -> bool {
        match self.interval {
            Some((a, b)) => x.x > a && x.x < b,
            None => self.point_in_polygon(x),
        }
    }

    /// Containment with the near-boundary band flagged separately.
    pub fn classify(&self, x: Point2) -> Region {
        let d = self.distance_to_boundary(x);
        if d <= self.distance_error {
            return Region::Boundary;
        }
        if self.contains(x) {
            Region::Inside
        } else {
            Region::Outside
        }
    }

    fn point_in_polygon(&self, p: Point2) -> bool {
        // Even-odd crossing rule on the closed vertex chain.
        let v = &self.boundary.vertices;
        let n = v.len();
        let mut inside = false;
        let mut j = n - 1;
        for i in 0..n {
            let (pi, pj) = (v[i], v[j]);
            if (pi.y > p.y) != (pj.y > p.y) {
                let x_cross = pj.x + (p.y - pj.y) / (pi.y - pj.y) * (pi.x - pj.x);
                if p.x < x_cross {
                    inside = !inside;
                }
            }
            j = i;
        }
        inside
    }

    fn interior_ball(&self, x: Point2, ratio: f64) -> Result<BallSpec> {
        match self.classify(x) {
            Region::Inside => {}
            Region::Boundary => {
                return Err(Error::Domain(format!(
                    "point ({}, {}) is within the boundary band",
                    x.x, x.y
                )))
            }
            Region::Outside => {
                return Err(Error::Domain(format!("point ({}, {}) is outside the domain", x.x, x.y)))
            }
        }
        let d = self.distance_to_boundary(x);
        Ok(BallSpec { center: x, radius: d * ratio })
    }

    /// Ψ(x): the ball of radius d(x)/2 about an interior point.
    pub fn psi_ball(&self, x: Point2) -> Result<BallSpec> {
        self.interior_ball(x, 0.5)
    }

    /// Φ(x): the ball of radius d(x)/6 about an interior point.
    pub fn phi_ball(&self, x: Point2) -> Result<BallSpec> {
        self.interior_ball(x, 1.0 / 6.0)
    }

    /// Membership of `x` in Q^θ_{λ,δ}(x̄).
    pub fn approach_contains(&self, a: &ApproachParams, x: Point2) -> Result<bool> {
        if !self.contains(x) {
            return Err(Error::Domain(format!(
                "approach query point ({}, {}) lies outside the domain",
                x.x, x.y
            )));
        }
        let r = a.base_point.dist(x);
        Ok(r < a.delta && self.distance_to_boundary(x) > (a.lambda * r).powf(a.theta))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SQRT3_2: f64 = 0.8660254037844386;

    #[test]
    fn wedge_membership_examples() {
        let w = DomainApprox::wedge(1.0, SQRT3_2, 1e-9).unwrap();
        // Interior of the connected wedge, including the axis.
        assert!(w.contains(Point2::new(0.5, 0.0)));
        assert!(w.contains(Point2::new(0.5, 0.1))); // 0.1 < 0.2887
        assert!(!w.contains(Point2::new(0.5, 0.3)));

        let w2 = DomainApprox::wedge(2.0, 0.6, 1e-9).unwrap();
        assert!(w2.contains(Point2::new(0.3, 0.05))); // 0.05 < 0.125
        assert!(!w2.contains(Point2::new(0.3, 0.2))); // 0.2 > 0.125
    }

    #[test]
    fn wedge_rejects_bad_parameters() {
        assert!(matches!(DomainApprox::wedge(1.0, 0.4, 1e-6), Err(Error::Domain(_))));
        assert!(matches!(DomainApprox::wedge(0.5, 0.7, 1e-6), Err(Error::Domain(_))));
    }

    #[test]
    fn wedge_boundary_distance_certified() {
        let tol = 1e-7;
        let w = DomainApprox::wedge(2.0, 0.75, tol).unwrap();
        // True boundary points must read as distance <= tol.
        for k in 1..40 {
            let x1 = 0.75 * k as f64 / 40.0;
            let p = Point2::new(x1, wedge_half_width(2.0, 0.75, x1));
            assert!(w.distance_to_boundary(p) <= tol * 1.0001, "x1={x1}");
        }
        // Points on the base edge are boundary points.
        assert!(w.distance_to_boundary(Point2::new(0.75, 0.0)) <= 1e-12);
        assert!(w.distance_to_boundary(Point2::new(0.75, 0.1)) <= 1e-12);
    }

    #[test]
    fn wedge_base_corner_on_boundary() {
        let w = DomainApprox::wedge(1.0, SQRT3_2, 1e-9).unwrap();
        let d = w.distance_to_boundary(Point2::new(SQRT3_2, 0.5));
        assert!(d <= 1e-9);
    }

    #[test]
    fn interval_distances_exact() {
        let dom = DomainApprox::interval(0.0, 2.0).unwrap();
        assert_eq!(dom.distance_to_boundary(Point2::new(1.0, 0.0)), 1.0);
        assert_eq!(dom.distance_to_boundary(Point2::new(0.25, 0.0)), 0.25);
        assert_eq!(dom.distance_to_boundary(Point2::new(0.3, 0.0)), 0.3);
        assert!(dom.contains(Point2::new(1.0, 0.0)));
        assert!(!dom.contains(Point2::new(-0.1, 0.0)));
        assert!(matches!(DomainApprox::interval(1.0, 1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn unit_square_center_distance() {
        let sq = DomainApprox::unit_square();
        assert!((sq.distance_to_boundary(Point2::new(0.5, 0.5)) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn psi_and_phi_balls() {
        let dom = DomainApprox::interval(0.0, 2.0).unwrap();
        let psi = dom.psi_ball(Point2::new(0.4, 0.0)).unwrap();
        assert!((psi.radius - 0.2).abs() < 1e-15);
        let phi = dom.phi_ball(Point2::new(0.6, 0.0)).unwrap();
        assert!((phi.radius - 0.1).abs() < 1e-15);

        let sq = DomainApprox::unit_square();
        assert!((sq.psi_ball(Point2::new(0.5, 0.5)).unwrap().radius - 0.25).abs() < 1e-12);
        assert!(
            (sq.phi_ball(Point2::new(0.5, 0.5)).unwrap().radius - 1.0 / 12.0).abs() < 1e-12
        );
        assert!(sq.psi_ball(Point2::new(0.0, 0.5)).is_err());
        assert!(sq.phi_ball(Point2::new(2.0, 2.0)).is_err());
    }

    #[test]
    fn psi_ball_stays_inside() {
        let w = DomainApprox::wedge(2.0, 0.75, 1e-8).unwrap();
        let x = Point2::new(0.5, 0.05);
        let ball = w.psi_ball(x).unwrap();
        for k in 0..64 {
            let ang = k as f64 / 64.0 * std::f64::consts::TAU;
            let p = Point2::new(
                x.x + 0.999 * ball.radius * ang.cos(),
                x.y + 0.999 * ball.radius * ang.sin(),
            );
            assert!(w.contains(p), "angle {ang}");
        }
    }

    #[test]
    fn approach_region_examples() {
        let sq = DomainApprox::unit_square();
        // Fabricate the base point at the boundary and probe an interior point
        // at distance 0.5 from it with known boundary distance 0.3.
        let xbar = Point2::new(0.2, 0.0);
        let x = Point2::new(0.2, 0.5); // ||xbar-x|| = 0.5, d(x) = min(0.2, 0.5, ...) hmm
        let d = sq.distance_to_boundary(x);
        assert!((d - 0.2).abs() < 1e-12);
        // Use a point with d(x)=0.3 instead.
        let x = Point2::new(0.3, 0.5);
        assert!((sq.distance_to_boundary(x) - 0.3).abs() < 1e-12);
        let r = xbar.dist(x);
        let a1 = ApproachParams::new(xbar, 0.5, 1.0, 1.0).unwrap();
        let a2 = ApproachParams::new(xbar, 0.5, 2.0, 1.0).unwrap();
        // d(x)=0.3 against (0.5 r)^θ.
        assert_eq!(sq.approach_contains(&a1, x).unwrap(), 0.3 > 0.5 * r);
        assert!(sq.approach_contains(&a2, x).unwrap());
        assert!(sq.approach_contains(&a1, Point2::new(5.0, 5.0)).is_err());
    }

    #[test]
    fn approach_monotone_in_lambda_and_theta() {
        let sq = DomainApprox::unit_square();
        let xbar = Point2::new(0.0, 0.5);
        for k in 0..50 {
            let x = Point2::new(0.02 + 0.017 * (k as f64 % 7.0), 0.1 + 0.015 * k as f64 % 0.8);
            if !sq.contains(x) {
                continue;
            }
            let tight = ApproachParams::new(xbar, 0.7, 1.0, 2.0).unwrap();
            let loose = ApproachParams::new(xbar, 0.4, 1.8, 2.0).unwrap();
            if sq.approach_contains(&tight, x).unwrap() {
                assert!(sq.approach_contains(&loose, x).unwrap());
            }
        }
    }

    #[test]
    fn distance_is_lipschitz() {
        let w = DomainApprox::wedge(2.0, 0.6, 1e-7).unwrap();
        let pts: Vec<Point2> = (0..60)
            .map(|k| Point2::new(0.01 + (k as f64 * 0.013) % 0.6, ((k as f64 * 0.029) % 0.3) - 0.15))
            .collect();
        for i in 0..pts.len() {
            for j in (i + 1)..pts.len() {
                let lhs = (w.distance_to_boundary(pts[i]) - w.distance_to_boundary(pts[j])).abs();
                assert!(lhs <= pts[i].dist(pts[j]) + 1e-12);
            }
        }
    }

    #[test]
    fn wedge_polyline_is_ccw_and_closed() {
        let w = DomainApprox::wedge(1.5, 0.8, 1e-6).unwrap();
        assert!(w.boundary.closed);
        assert!(w.boundary.signed_area() > 0.0);
    }
}
