//! Quadrature engine for the distance-weighted oscillation seminorm, its
//! (p,q) variant, the mean field g, and the α(s,θ) exponent calculus.
//!
//! The outer integral runs on a mesh graded toward the boundary (cell size
//! proportional to the boundary distance), with the band d ≤ ε_cut excluded:
//! the integrand carries d^{−ps} and misclassified near-boundary points would
//! dominate everything else. Inner-ball means are exact for piecewise-constant
//! fields in one dimension, tensor midpoint for smooth fields, and seeded
//! stratified sampling for indicator fields in two dimensions — all routes
//! average the same sample set for every q, so the Jensen ordering between
//! ν and ν^{(p,q)} holds sample-by-sample and not just in expectation.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{ExponentField, Regularity, ScalarField};
use crate::geometry::{DomainApprox, Point2, Region};
use crate::sampling::rng_for;
use crate::util::{linear_fit, stable_sum};
use rand::Rng;

/// Mesh and sampling parameters for the quadrature engine.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct QuadratureSpec {
    /// Cell size proportionality to the boundary distance (1.0 = dyadic shells).
    pub grading: f64,
    /// Graded-mesh density per decade of distance (one dimension).
    pub cells_per_decade: u32,
    /// Boundary cutoff: the band d ≤ ε_cut is excluded from outer integrals.
    pub eps_cut: f64,
    /// Sample budget for one inner-ball mean (at least 8).
    pub inner_samples: u32,
    /// Seed for every stochastic stage.
    pub seed: u64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            grading: 1.0,
            cells_per_decade: 24,
            eps_cut: 1e-4,
            inner_samples: 32,
            seed: 0,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self, domain: &DomainApprox) -> Result<()> {
        if self.inner_samples < 8 {
            return Err(Error::Domain("inner-ball sample count must be at least 8".into()));
        }
        if !(self.eps_cut > domain.distance_error) {
            return Err(Error::Domain(format!(
                "eps_cut = {} must exceed the domain distance error {}",
                self.eps_cut, domain.distance_error
            )));
        }
        if !(self.grading > 0.0 && self.grading <= 4.0) {
            return Err(Error::Domain("grading must lie in (0, 4]".into()));
        }
        Ok(())
    }
}

/// Result of a seminorm quadrature.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NuResult {
    pub value: f64,
    /// A-posteriori refinement estimate, not a rigorous enclosure.
    pub error: f64,
    pub cutoff: f64,
    pub cells: u64,
    pub divergent: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub growth_exponent: Option<f64>,
}

/// Measurable region descriptor for the outer integral.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RegionSpec {
    Whole,
    Box { lo: Point2, hi: Point2 },
    Ball { center: Point2, radius: f64 },
}

impl RegionSpec {
    pub fn contains(&self, p: Point2) -> bool {
        match self {
            RegionSpec::Whole => true,
            RegionSpec::Box { lo, hi } => {
                p.x >= lo.x && p.x <= hi.x && p.y >= lo.y && p.y <= hi.y
            }
            RegionSpec::Ball { center, radius } => center.dist(p) <= *radius,
        }
    }
}

fn check_interior(domain: &DomainApprox, x: Point2, eps: f64) -> Result<f64> {
    match domain.classify(x) {
        Region::Inside => {}
        _ => {
            return Err(Error::Cutoff(format!(
                "point ({}, {}) is not interior to the domain",
                x.x, x.y
            )))
        }
    }
    let d = domain.distance_to_boundary(x);
    if d <= eps {
        return Err(Error::Cutoff(format!(
            "point ({}, {}) has boundary distance {d} inside the cutoff {eps}",
            x.x, x.y
        )));
    }
    Ok(d)
}

// ---------------------------------------------------------------------------
// Inner-ball means
// ---------------------------------------------------------------------------

/// Mean of |u(y) − c|^q over the interval (lo, hi); exact for
/// piecewise-constant u, midpoint for smooth u.
fn interval_mean_pow(
    u: &ScalarField,
    domain: &DomainApprox,
    lo: f64,
    hi: f64,
    c: f64,
    q: f64,
    n: u32,
) -> f64 {
    debug_assert!(hi > lo);
    if let Some(pcw) = u.piecewise() {
        let mut acc = 0.0;
        let mut prev = lo;
        for &e in pcw.edges_in(lo, hi) {
            let mid = 0.5 * (prev + e);
            acc += (pcw.eval(mid) - c).abs().powf(q) * (e - prev);
            prev = e;
        }
        let mid = 0.5 * (prev + hi);
        acc += (pcw.eval(mid) - c).abs().powf(q) * (hi - prev);
        return acc / (hi - lo);
    }
    let n = (n.max(8) & !1) as usize;
    let h = (hi - lo) / n as f64;
    let mut acc = 0.0;
    for i in 0..n {
        let y = lo + (i as f64 + 0.5) * h;
        acc += (u.eval(domain, Point2::new(y, 0.0)) - c).abs().powf(q);
    }
    acc / n as f64
}

/// Mean of u over the interval (lo, hi), same quadrature family.
fn interval_mean(u: &ScalarField, domain: &DomainApprox, lo: f64, hi: f64, n: u32) -> f64 {
    if let Some(pcw) = u.piecewise() {
        let mut acc = 0.0;
        let mut prev = lo;
        for &e in pcw.edges_in(lo, hi) {
            acc += pcw.eval(0.5 * (prev + e)) * (e - prev);
            prev = e;
        }
        acc += pcw.eval(0.5 * (prev + hi)) * (hi - prev);
        return acc / (hi - lo);
    }
    let n = (n.max(8) & !1) as usize;
    let h = (hi - lo) / n as f64;
    let mut acc = 0.0;
    for i in 0..n {
        acc += u.eval(domain, Point2::new(lo + (i as f64 + 0.5) * h, 0.0));
    }
    acc / n as f64
}

/// Equal-area polar sample points of a disk: midpoint grid for smooth fields,
/// jittered within each cell for indicator fields (seeded per outer point).
fn disk_points(
    center: Point2,
    radius: f64,
    n_target: u32,
    jitter: Option<&mut rand_chacha::ChaCha8Rng>,
) -> Vec<Point2> {
    let n_r = ((n_target as f64 / 8.0).sqrt().ceil() as usize).max(2);
    let n_phi = ((n_target as usize + n_r - 1) / n_r).max(4);
    let mut pts = Vec::with_capacity(n_r * n_phi);
    match jitter {
        None => {
            for i in 0..n_r {
                let r = radius * ((i as f64 + 0.5) / n_r as f64).sqrt();
                for k in 0..n_phi {
                    let phi = std::f64::consts::TAU * (k as f64 + 0.5) / n_phi as f64;
                    pts.push(Point2::new(center.x + r * phi.cos(), center.y + r * phi.sin()));
                }
            }
        }
        Some(rng) => {
            for i in 0..n_r {
                for k in 0..n_phi {
                    let fr: f64 = rng.random();
                    let fp: f64 = rng.random();
                    let r = radius * (((i as f64) + fr) / n_r as f64).sqrt();
                    let phi = std::f64::consts::TAU * ((k as f64) + fp) / n_phi as f64;
                    pts.push(Point2::new(center.x + r * phi.cos(), center.y + r * phi.sin()));
                }
            }
        }
    }
    pts
}

/// Mean of |u(y) − c|^q over the disk Ψ or Φ at an interior point.
fn disk_mean_pow(
    u: &ScalarField,
    domain: &DomainApprox,
    center: Point2,
    radius: f64,
    c: f64,
    q: f64,
    spec: &QuadratureSpec,
    cell_id: u64,
) -> f64 {
    let mut rng;
    let jitter = if u.regularity() == Regularity::IndicatorSum {
        rng = rng_for(spec.seed, "disk-jitter", cell_id);
        Some(&mut rng)
    } else {
        None
    };
    let pts = disk_points(center, radius, spec.inner_samples, jitter);
    let mut acc = 0.0;
    for p in &pts {
        acc += (u.eval(domain, *p) - c).abs().powf(q);
    }
    acc / pts.len() as f64
}

fn disk_mean(
    u: &ScalarField,
    domain: &DomainApprox,
    center: Point2,
    radius: f64,
    spec: &QuadratureSpec,
    cell_id: u64,
) -> f64 {
    let mut rng;
    let jitter = if u.regularity() == Regularity::IndicatorSum {
        rng = rng_for(spec.seed, "disk-jitter", cell_id);
        Some(&mut rng)
    } else {
        None
    };
    let pts = disk_points(center, radius, spec.inner_samples, jitter);
    let mut acc = 0.0;
    for p in &pts {
        acc += u.eval(domain, *p);
    }
    acc / pts.len() as f64
}

/// ⨍_{Ψ(x)} |u(y) − u(x)| dy at an interior point beyond the cutoff.
pub fn mean_oscillation(
    u: &ScalarField,
    domain: &DomainApprox,
    x: Point2,
    spec: &QuadratureSpec,
) -> Result<f64> {
    Ok(mean_oscillation_pow(u, domain, x, 1.0, spec)?)
}

/// ⨍_{Ψ(x)} |u(y) − u(x)|^q dy.
pub fn mean_oscillation_pow(
    u: &ScalarField,
    domain: &DomainApprox,
    x: Point2,
    q: f64,
    spec: &QuadratureSpec,
) -> Result<f64> {
    let d = check_interior(domain, x, spec.eps_cut)?;
    let ux = u.eval(domain, x);
    let r = 0.5 * d;
    if domain.is_one_dimensional() {
        Ok(interval_mean_pow(u, domain, x.x - r, x.x + r, ux, q, spec.inner_samples))
    } else {
        let id = crate::util::fnv1a64(&x.x.to_le_bytes()) ^ crate::util::fnv1a64(&x.y.to_le_bytes());
        Ok(disk_mean_pow(u, domain, x, r, ux, q, spec, id))
    }
}

/// g(x; u) = ⨍_{Φ(x)} u(y) dy with Φ of radius d(x)/6.
pub fn g_mean(
    u: &ScalarField,
    domain: &DomainApprox,
    x: Point2,
    spec: &QuadratureSpec,
) -> Result<f64> {
    g_mean_cut(u, domain, x, spec, spec.eps_cut)
}

/// g(x; u) with an explicit cutoff; trace extraction passes 0 to follow
/// corkscrew sequences below the quadrature band.
pub fn g_mean_cut(
    u: &ScalarField,
    domain: &DomainApprox,
    x: Point2,
    spec: &QuadratureSpec,
    eps: f64,
) -> Result<f64> {
    let d = if eps > 0.0 {
        check_interior(domain, x, eps)?
    } else {
        if !domain.contains(x) {
            return Err(Error::Cutoff(format!(
                "point ({}, {}) is outside the domain",
                x.x, x.y
            )));
        }
        let d = domain.distance_to_boundary(x);
        if d <= 0.0 {
            return Err(Error::Cutoff("point lies on the approximate boundary".into()));
        }
        d
    };
    let r = d / 6.0;
    if domain.is_one_dimensional() {
        Ok(interval_mean(u, domain, x.x - r, x.x + r, spec.inner_samples))
    } else {
        let id = crate::util::fnv1a64(&x.x.to_le_bytes()) ^ crate::util::fnv1a64(&x.y.to_le_bytes());
        Ok(disk_mean(u, domain, x, r, spec, id))
    }
}

// ---------------------------------------------------------------------------
// Outer quadrature
// ---------------------------------------------------------------------------

/// Pointwise integrand (⨍_{Ψ(x)} |u(y)−u(x)|^q dy)^{p/q} · d(x)^{−ps(x)}.
fn integrand(
    u: &ScalarField,
    s: &ExponentField,
    p: f64,
    q: f64,
    domain: &DomainApprox,
    x: Point2,
    d: f64,
    spec: &QuadratureSpec,
    cell_id: u64,
) -> f64 {
    let ux = u.eval(domain, x);
    let r = 0.5 * d;
    let mq = if domain.is_one_dimensional() {
        interval_mean_pow(u, domain, x.x - r, x.x + r, ux, q, spec.inner_samples)
    } else {
        disk_mean_pow(u, domain, x, r, ux, q, spec, cell_id)
    };
    let sx = s.eval(domain, x);
    mq.powf(p / q) * d.powf(-p * sx)
}

/// Graded 1-D mesh breakpoints on [a+eps, b−eps] with field-event splitting.
fn mesh_1d(
    u: &ScalarField,
    domain: &DomainApprox,
    region: &RegionSpec,
    eps: f64,
    cells_per_decade: u32,
) -> Vec<f64> {
    let (a, b) = domain.interval_bounds().unwrap();
    let mid = 0.5 * (a + b);
    let ratio = 10f64.powf(1.0 / cells_per_decade as f64);
    let mut pts = vec![a + eps, b - eps, mid];
    let mut from_a = a + eps;
    while from_a < mid {
        pts.push(from_a);
        from_a = a + (from_a - a) * ratio;
    }
    let mut from_b = b - eps;
    while from_b > mid {
        pts.push(from_b);
        from_b = b - (b - from_b) * ratio;
    }
    if let Some(pcw) = u.piecewise() {
        for &e in pcw.edges_in(a, b) {
            // The integrand kinks where Ψ(x) edges cross a field edge and at
            // the edge itself, on either side of the midpoint.
            for cand in [e, 2.0 * e - a, (2.0 * e + a) / 3.0, 2.0 * e - b, (2.0 * e + b) / 3.0] {
                pts.push(cand);
            }
        }
    }
    // Region cuts.
    match region {
        RegionSpec::Whole => {}
        RegionSpec::Box { lo, hi } => {
            pts.push(lo.x);
            pts.push(hi.x);
        }
        RegionSpec::Ball { center, radius } => {
            pts.push(center.x - radius);
            pts.push(center.x + radius);
        }
    }
    pts.retain(|&x| x >= a + eps && x <= b - eps);
    pts.sort_by(|u, v| u.partial_cmp(v).unwrap());
    pts.dedup_by(|u, v| (*u - *v).abs() < 1e-15);
    pts
}

fn nu_pass_1d(
    u: &ScalarField,
    s: &ExponentField,
    p: f64,
    q: f64,
    region: &RegionSpec,
    domain: &DomainApprox,
    spec: &QuadratureSpec,
    eps: f64,
    refine: u32,
) -> (f64, u64) {
    let pts = mesh_1d(u, domain, region, eps, spec.cells_per_decade);
    let mut contributions: Vec<f64> = Vec::new();
    let mut cells = 0u64;
    let gauss = [0.5 - 0.5 / 3f64.sqrt(), 0.5 + 0.5 / 3f64.sqrt()];
    let (a, b) = domain.interval_bounds().unwrap();
    for w in pts.windows(2) {
        let sub = 1u32 << refine;
        for k in 0..sub {
            let lo = w[0] + (w[1] - w[0]) * k as f64 / sub as f64;
            let hi = w[0] + (w[1] - w[0]) * (k + 1) as f64 / sub as f64;
            let len = hi - lo;
            if len <= 0.0 {
                continue;
            }
            let mid = 0.5 * (lo + hi);
            if !region.contains(Point2::new(mid, 0.0)) {
                continue;
            }
            cells += 1;
            let mut acc = 0.0;
            for &g in &gauss {
                let x = lo + g * len;
                let d = (x - a).min(b - x);
                acc += 0.5 * integrand(u, s, p, q, domain, Point2::new(x, 0.0), d, spec, cells);
            }
            contributions.push(acc * len);
        }
    }
    (stable_sum(&contributions), cells)
}

/// Quadtree cell queue entry.
struct QtCell {
    cx: f64,
    cy: f64,
    half: f64,
}

fn nu_pass_2d(
    u: &ScalarField,
    s: &ExponentField,
    p: f64,
    q: f64,
    region: &RegionSpec,
    domain: &DomainApprox,
    spec: &QuadratureSpec,
    eps: f64,
    grading: f64,
) -> (f64, u64) {
    let (lo, hi) = domain.bounding_box();
    let w = (hi.x - lo.x).max(hi.y - lo.y);
    let root_half = 0.5 * w;
    let min_half = 0.25 * eps * grading.min(1.0);
    let mut accepted: Vec<(Point2, f64, f64)> = Vec::new(); // center, area, d
    let mut stack = vec![QtCell {
        cx: 0.5 * (lo.x + hi.x),
        cy: 0.5 * (lo.y + hi.y),
        half: root_half,
    }];
    while let Some(cell) = stack.pop() {
        let c = Point2::new(cell.cx, cell.cy);
        let half_diag = cell.half * std::f64::consts::SQRT_2;
        let d_c = domain.distance_to_boundary(c);
        let inside = domain.contains(c);
        // Certified fully outside.
        if !inside && d_c > half_diag {
            continue;
        }
        // Region test: conservative uniformity on corners.
        let region_uniform = match region {
            RegionSpec::Whole => true,
            _ => {
                let mut all = true;
                let mut any = false;
                for (sx, sy) in [(-1.0, -1.0), (-1.0, 1.0), (1.0, -1.0), (1.0, 1.0), (0.0, 0.0)] {
                    let corner = Point2::new(cell.cx + sx * cell.half, cell.cy + sy * cell.half);
                    if region.contains(corner) {
                        any = true;
                    } else {
                        all = false;
                    }
                }
                if !any && !region.contains(c) {
                    continue; // fully outside the region (conservatively)
                }
                all
            }
        };
        let certified_inside = inside && d_c > half_diag + domain.distance_error;
        let clear_of_cutoff = d_c - half_diag > eps;
        let fine_enough = 2.0 * cell.half <= grading * (d_c - half_diag).max(eps);
        if certified_inside && clear_of_cutoff && fine_enough && region_uniform {
            accepted.push((c, 4.0 * cell.half * cell.half, d_c));
            continue;
        }
        if cell.half <= min_half {
            // Midpoint classification at the resolution floor.
            if inside && d_c > eps && region.contains(c) {
                accepted.push((c, 4.0 * cell.half * cell.half, d_c));
            }
            continue;
        }
        let h = 0.5 * cell.half;
        for (sx, sy) in [(-1.0, -1.0), (-1.0, 1.0), (1.0, -1.0), (1.0, 1.0)] {
            stack.push(QtCell { cx: cell.cx + sx * h, cy: cell.cy + sy * h, half: h });
        }
    }
    let values: Vec<f64> = accepted
        .par_iter()
        .enumerate()
        .map(|(k, (c, area, d))| area * integrand(u, s, p, q, domain, *c, *d, spec, k as u64))
        .collect();
    (stable_sum(&values), accepted.len() as u64)
}

fn nu_single(
    u: &ScalarField,
    s: &ExponentField,
    p: f64,
    q: f64,
    region: &RegionSpec,
    domain: &DomainApprox,
    spec: &QuadratureSpec,
    eps: f64,
) -> (f64, f64, u64) {
    if domain.is_one_dimensional() {
        let (coarse, _) = nu_pass_1d(u, s, p, q, region, domain, spec, eps, 0);
        let (fine, cells) = nu_pass_1d(u, s, p, q, region, domain, spec, eps, 1);
        (fine, (fine - coarse).abs(), cells)
    } else {
        let (coarse, _) = nu_pass_2d(u, s, p, q, region, domain, spec, eps, spec.grading * 2.0);
        let (fine, cells) = nu_pass_2d(u, s, p, q, region, domain, spec, eps, spec.grading);
        (fine, (fine - coarse).abs(), cells)
    }
}

/// ν^{s(·),p}(E; u): the q = 1 case of [`nu_pq`].
pub fn nu(
    u: &ScalarField,
    s: &ExponentField,
    p: f64,
    region: &RegionSpec,
    domain: &DomainApprox,
    spec: &QuadratureSpec,
) -> Result<NuResult> {
    nu_pq(u, s, p, 1.0, region, domain, spec)
}

/// ν^{s(·),(p,q)}(E; u) with a cutoff-ladder divergence diagnostic.
pub fn nu_pq(
    u: &ScalarField,
    s: &ExponentField,
    p: f64,
    q: f64,
    region: &RegionSpec,
    domain: &DomainApprox,
    spec: &QuadratureSpec,
) -> Result<NuResult> {
    if !(p >= 1.0) || !(q >= 1.0) {
        return Err(Error::Domain(format!("seminorm needs p, q >= 1; got p={p}, q={q}")));
    }
    spec.validate(domain)?;
    let eps = spec.eps_cut;
    let (value, error, cells) = nu_single(u, s, p, q, region, domain, spec, eps);
    // Growth fit over a short cutoff ladder {4ε, 2ε, ε}.
    let mut lx = Vec::with_capacity(3);
    let mut ly = Vec::with_capacity(3);
    let mut vals = Vec::with_capacity(3);
    for &e in &[4.0 * eps, 2.0 * eps, eps] {
        let v = if e == eps {
            value
        } else {
            nu_single(u, s, p, q, region, domain, spec, e).0
        };
        vals.push(v);
        if v > 0.0 {
            lx.push((1.0 / e).ln());
            ly.push(v.ln());
        }
    }
    let (divergent, growth) = if lx.len() == 3 {
        let (_, slope, _) = linear_fit(&lx, &ly);
        let increasing = vals[0] < vals[1] && vals[1] < vals[2];
        (slope > 0.05 && increasing, Some(slope))
    } else {
        (false, None)
    };
    Ok(NuResult {
        value,
        error,
        cutoff: eps,
        cells,
        divergent,
        growth_exponent: if divergent { growth } else { None },
    })
}

// ---------------------------------------------------------------------------
// The α exponent and its lower envelopes
// ---------------------------------------------------------------------------

/// Piecewise-bilinear admissibility exponent:
/// p(1−θ) + (ps−n)θ on {ps−n ≤ p−1}, (1−θ) + (ps−n) on {ps−n > p−1}.
pub fn alpha(s: f64, theta: f64, p: f64, n: u32) -> f64 {
    let ps_n = p * s - n as f64;
    if ps_n <= p - 1.0 {
        p * (1.0 - theta) + ps_n * theta
    } else {
        (1.0 - theta) + ps_n
    }
}

/// Sampled infimum with its resolution slack.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct EnvelopeEstimate {
    pub value: f64,
    /// Upper bound on how far the sampled minimum can sit above the true inf.
    pub slack: f64,
    pub samples: usize,
}

/// s̲_δ(x̄) = inf over Ω ∩ B_δ(x̄) of s, by dense sampling.
pub fn s_lower_envelope(
    s: &ExponentField,
    domain: &DomainApprox,
    xbar: Point2,
    delta: f64,
    spec: &QuadratureSpec,
) -> Result<EnvelopeEstimate> {
    if !(delta > 0.0) {
        return Err(Error::Domain(format!("envelope radius must be positive, got {delta}")));
    }
    let lipschitz = match s {
        ExponentField::Constant { .. } => 0.0,
        ExponentField::DistancePower { coef, .. } => coef.abs(),
    };
    let mut best = f64::INFINITY;
    let mut used = 0usize;
    let mut step;
    if domain.is_one_dimensional() {
        let (a, b) = domain.interval_bounds().unwrap();
        let n = (spec.inner_samples as usize * 16).max(512);
        step = 2.0 * delta / n as f64;
        for i in 0..=n {
            let x = xbar.x - delta + i as f64 * step;
            if x > a && x < b && (x - xbar.x).abs() < delta {
                best = best.min(s.eval(domain, Point2::new(x, 0.0)));
                used += 1;
            }
        }
    } else {
        let n = ((spec.inner_samples as usize * 2).max(48)).min(96);
        step = 2.0 * delta / n as f64;
        for i in 0..=n {
            for j in 0..=n {
                let p = Point2::new(
                    xbar.x - delta + i as f64 * step,
                    xbar.y - delta + j as f64 * step,
                );
                if p.dist(xbar) < delta && domain.classify(p) == Region::Inside {
                    best = best.min(s.eval(domain, p));
                    used += 1;
                }
            }
        }
        step *= std::f64::consts::SQRT_2;
    }
    if used == 0 {
        return Err(Error::Resolution(format!(
            "no interior sample inside B_{delta} around ({}, {})",
            xbar.x, xbar.y
        )));
    }
    Ok(EnvelopeEstimate { value: best, slack: lipschitz * step, samples: used })
}

/// One rung of an α̲_δ ladder.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct AlphaRung {
    pub delta: f64,
    pub value: f64,
    /// Sampling slack propagated through the α derivative bound.
    pub slack: f64,
}

/// α̲_δ(x̄) = α(s̲_δ(x̄), θ_Γ(x̄)), with the envelope slack mapped through the
/// steeper α branch slope p·θ.
pub fn alpha_lower_envelope(
    s: &ExponentField,
    domain: &DomainApprox,
    xbar: Point2,
    theta_gamma: f64,
    delta: f64,
    p: f64,
    n: u32,
    spec: &QuadratureSpec,
) -> Result<AlphaRung> {
    let env = s_lower_envelope(s, domain, xbar, delta, spec)?;
    Ok(AlphaRung {
        delta,
        value: alpha(env.value, theta_gamma, p, n),
        slack: p * theta_gamma * env.slack,
    })
}

/// α̲_δ over a decreasing δ ladder plus the δ → 0 limit estimate (the last
/// rung; the true ladder is monotone nondecreasing as δ decreases, the
/// sampled one up to the per-rung slack).
pub fn alpha_lower_ladder(
    s: &ExponentField,
    domain: &DomainApprox,
    xbar: Point2,
    theta_gamma: f64,
    deltas: &[f64],
    p: f64,
    n: u32,
    spec: &QuadratureSpec,
) -> Result<(Vec<AlphaRung>, f64)> {
    if deltas.is_empty() {
        return Err(Error::Domain("alpha ladder needs at least one delta".into()));
    }
    let mut ladder = Vec::with_capacity(deltas.len());
    for &d in deltas {
        ladder.push(alpha_lower_envelope(s, domain, xbar, theta_gamma, d, p, n, spec)?);
    }
    let limit = ladder.last().unwrap().value;
    Ok((ladder, limit))
}
