//! Trace extraction along corkscrew sequences, Hölder-rate fitting, Lebesgue
//! point ladders, the Sobolev–Slobodeckij seminorm on boundary samples, and
//! the (p, s₀) admissibility-region classifier.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::ScalarField;
use crate::geometry::{DomainApprox, Point2};
use crate::sampling::Sobol2;
use crate::seminorm::{alpha, g_mean_cut, QuadratureSpec};
use crate::util::{kendall_tau, linear_fit, stable_sum};

/// Search parameters for a corkscrew sequence.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CorkscrewParams {
    pub lambda: f64,
    pub eta: f64,
    pub theta: f64,
    /// Outermost shell radius ρ₀.
    pub rho0: f64,
    /// Number of shells ρ_j = η^j ρ₀ to search.
    pub j_max: u32,
    /// Candidate points per annulus.
    pub candidates: u32,
    pub seed: u64,
}

impl Default for CorkscrewParams {
    fn default() -> Self {
        CorkscrewParams {
            lambda: 0.3,
            eta: 0.5,
            theta: 1.0,
            rho0: 0.2,
            j_max: 12,
            candidates: 256,
            seed: 0,
        }
    }
}

/// A witness point in one corkscrew shell.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CorkscrewPoint {
    pub j: u32,
    pub x: Point2,
    pub rho: f64,
    pub dist: f64,
}

/// Corkscrew sequence toward a boundary point: per shell
/// ρ_{j+1} ≤ ‖x̄−x_j‖ < ρ_j, the found witness maximizes d(x) subject to
/// d(x) > (λ‖x̄−x_j‖)^θ. Missing shells are recorded, not fatal.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CorkscrewSequence {
    pub base: Point2,
    pub params: CorkscrewParams,
    pub points: Vec<CorkscrewPoint>,
    pub missing: Vec<u32>,
    /// sup of d over the found witnesses (the R₀ diagnostic).
    pub r0_sup: f64,
}

impl CorkscrewSequence {
    pub fn complete(&self) -> bool {
        self.missing.is_empty()
    }
}

/// Maximize d(x̄ + r·e(φ)) over the angle by deterministic shrinking-bracket
/// scans. The admissible direction band at a cusp narrows like r^{θ−1}, so a
/// found candidate is polished to the band center before seeding the next
/// shell's search cone.
fn refine_angle(
    domain: &DomainApprox,
    xbar: Point2,
    r: f64,
    phi0: f64,
    halfwidth0: f64,
) -> (f64, Option<(Point2, f64)>) {
    let mut center = phi0;
    let mut hw = halfwidth0.max(1e-4);
    let mut best: Option<(f64, Point2, f64)> = None; // (phi, point, d)
    for _ in 0..14 {
        for k in 0..9 {
            let phi = center + hw * ((k as f64) / 4.0 - 1.0);
            let x = Point2::new(xbar.x + r * phi.cos(), xbar.y + r * phi.sin());
            if !domain.contains(x) {
                continue;
            }
            let d = domain.distance_to_boundary(x);
            if best.as_ref().map_or(true, |(_, _, bd)| d > *bd) {
                best = Some((phi, x, d));
            }
        }
        if let Some((phi, _, _)) = best {
            center = phi;
        }
        hw *= 0.4;
    }
    match best {
        Some((phi, x, d)) => (phi, Some((x, d))),
        None => (phi0, None),
    }
}

/// Best-clearance point in the annulus (r_lo, r_hi) around x̄.
///
/// Three widening passes of Sobol candidates (half global, half in a cone
/// around the previous shell's direction), then angular refinement at the
/// winner's radius. Deterministic under the seed.
pub(crate) fn annulus_witness(
    domain: &DomainApprox,
    xbar: Point2,
    r_lo: f64,
    r_hi: f64,
    candidates: u32,
    seed: u64,
    label: &str,
    index: u64,
    prev_dir: Option<(f64, f64)>,
) -> Option<(Point2, f64)> {
    let mut best: Option<(Point2, f64, f64)> = None; // (pt, d, r)
    let consider = |best: &mut Option<(Point2, f64, f64)>, x: Point2, r: f64| {
        if !domain.contains(x) {
            return;
        }
        let d = domain.distance_to_boundary(x);
        let better = match &*best {
            None => true,
            Some((_, bd, br)) => d > *bd || (d == *bd && r < *br),
        };
        if better {
            *best = Some((x, d, r));
        }
    };
    // Ray continuation: a cusp approach direction persists across shells, so
    // probe it explicitly before any stratified sampling.
    if let Some((angle, _)) = prev_dir {
        for frac in [0.25, 0.5, 0.75] {
            let r = r_lo + frac * (r_hi - r_lo);
            let x = Point2::new(xbar.x + r * angle.cos(), xbar.y + r * angle.sin());
            consider(&mut best, x, r);
        }
    }
    for pass in 0..3u32 {
        let mut sobol = Sobol2::new(seed, label, index ^ ((pass as u64) << 56));
        let widen = 6f64.powi(pass as i32);
        for k in 0..candidates.max(16) {
            let (u, v) = sobol.next_point();
            let r = r_lo + u * (r_hi - r_lo);
            let phi = match prev_dir {
                Some((angle, ratio)) if k % 2 == 0 => {
                    let halfwidth =
                        (8.0 * ratio * widen).clamp(1e-5 * widen, std::f64::consts::PI);
                    angle + (2.0 * v - 1.0) * halfwidth
                }
                _ => std::f64::consts::TAU * v,
            };
            consider(&mut best, Point2::new(xbar.x + r * phi.cos(), xbar.y + r * phi.sin()), r);
        }
        if best.is_some() || prev_dir.is_none() {
            break;
        }
    }
    let (x, d, r) = best?;
    let phi = (x.y - xbar.y).atan2(x.x - xbar.x);
    let bracket = (4.0 * d / r).max(0.01);
    match refine_angle(domain, xbar, r, phi, bracket) {
        (_, Some((rx, rd))) if rd > d => Some((rx, rd)),
        _ => Some((x, d)),
    }
}

/// Stratified witness search over the shells around a boundary point.
///
/// Candidates per shell mix globally distributed Sobol points with a cone
/// around the direction of the previous shell's witness; the cone width
/// tracks the observed clearance ratio, which keeps cusp-adapted approach
/// directions discoverable at depth where they occupy a vanishing angular
/// fraction of the annulus.
pub fn corkscrew_sequence(
    domain: &DomainApprox,
    xbar: Point2,
    params: &CorkscrewParams,
) -> Result<CorkscrewSequence> {
    if !(params.lambda > 0.0 && params.lambda < 1.0) || !(params.eta > 0.0 && params.eta < 1.0) {
        return Err(Error::Domain("corkscrew needs 0 < lambda, eta < 1".into()));
    }
    if !(params.theta >= 1.0) || !(params.rho0 > 0.0) {
        return Err(Error::Domain("corkscrew needs theta >= 1 and rho0 > 0".into()));
    }
    let mut points = Vec::new();
    let mut missing = Vec::new();
    let mut r0_sup = 0.0f64;
    let mut prev_dir: Option<(f64, f64)> = None; // (angle, clearance ratio)
    for j in 0..params.j_max {
        let rho_hi = params.rho0 * params.eta.powi(j as i32);
        let rho_lo = rho_hi * params.eta;
        let found = annulus_witness(
            domain,
            xbar,
            rho_lo,
            rho_hi,
            params.candidates,
            params.seed,
            "corkscrew",
            j as u64,
            prev_dir,
        );
        let mut admitted = None;
        if let Some((x, d)) = found {
            let r = x.dist(xbar);
            if d > (params.lambda * r).powf(params.theta) {
                admitted = Some(CorkscrewPoint { j, x, rho: r, dist: d });
            }
            // Even an inadmissible best still orients the next shell.
            prev_dir = Some(((x.y - xbar.y).atan2(x.x - xbar.x), d / r));
        }
        match admitted {
            Some(pt) => {
                r0_sup = r0_sup.max(pt.dist);
                points.push(pt);
            }
            None => missing.push(j),
        }
    }
    Ok(CorkscrewSequence { base: xbar, params: *params, points, missing, r0_sup })
}

/// g values along a corkscrew sequence with the Cauchy-tail diagnostic.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TraceSample {
    pub xbar: Point2,
    pub sequence: CorkscrewSequence,
    pub g_values: Vec<f64>,
    /// Defined only when the tail is Cauchy within the tolerance.
    pub limit: Option<f64>,
    pub cauchy_tail: f64,
    pub tolerance: f64,
}

/// Evaluate g along the sequence and extract the limit when the tail is
/// Cauchy. A non-Cauchy tail is a report state, not an error: inputs that
/// violate the oscillation constraint are legitimate experiments.
pub fn trace_at(
    u: &ScalarField,
    domain: &DomainApprox,
    sequence: &CorkscrewSequence,
    spec: &QuadratureSpec,
    rel_tolerance: f64,
) -> Result<TraceSample> {
    if sequence.points.is_empty() {
        return Err(Error::Domain("trace extraction needs a nonempty corkscrew sequence".into()));
    }
    let mut g_values = Vec::with_capacity(sequence.points.len());
    for pt in &sequence.points {
        g_values.push(g_mean_cut(u, domain, pt.x, spec, 0.0)?);
    }
    let tail = g_values.len().min(5);
    let window = &g_values[g_values.len() - tail..];
    let mut cauchy_tail = 0.0f64;
    for i in 0..window.len() {
        for k in (i + 1)..window.len() {
            cauchy_tail = cauchy_tail.max((window[i] - window[k]).abs());
        }
    }
    let scale = window.last().unwrap().abs().max(1.0);
    let tolerance = rel_tolerance * scale;
    let limit = if cauchy_tail < tolerance { Some(*window.last().unwrap()) } else { None };
    Ok(TraceSample {
        xbar: sequence.base,
        sequence: sequence.clone(),
        g_values,
        limit,
        cauchy_tail,
        tolerance,
    })
}

/// Log-log rate fit of |Tu(x̄) − g(x_j)| against ‖x̄ − x_j‖.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HolderFit {
    pub beta_hat: f64,
    pub c_hat: f64,
    pub r2: f64,
    pub predicted_beta: f64,
    /// Residuals at or below float noise: the rate is not resolvable.
    pub noise_limited: bool,
    pub scales_used: usize,
}

/// Fit from explicit (distance, residual) pairs.
pub fn holder_fit_from_residuals(
    dists: &[f64],
    residuals: &[f64],
    predicted_beta: f64,
) -> Result<HolderFit> {
    assert_eq!(dists.len(), residuals.len());
    let floor = 1e-14;
    let mut lx = Vec::new();
    let mut ly = Vec::new();
    for (&d, &r) in dists.iter().zip(residuals) {
        if d > 0.0 && r > floor {
            lx.push(d.ln());
            ly.push(r.ln());
        }
    }
    if lx.len() < 5 {
        return Ok(HolderFit {
            beta_hat: f64::NAN,
            c_hat: f64::NAN,
            r2: 0.0,
            predicted_beta,
            noise_limited: true,
            scales_used: lx.len(),
        });
    }
    let (intercept, slope, r2) = linear_fit(&lx, &ly);
    Ok(HolderFit {
        beta_hat: slope,
        c_hat: intercept.exp(),
        r2,
        predicted_beta,
        noise_limited: false,
        scales_used: lx.len(),
    })
}

/// Fit the Hölder rate of a trace sample against its own limit.
pub fn holder_fit(sample: &TraceSample, predicted_beta: f64) -> Result<HolderFit> {
    let limit = sample
        .limit
        .ok_or_else(|| Error::Estimation("holder fit needs a defined trace limit".into()))?;
    let dists: Vec<f64> =
        sample.sequence.points.iter().map(|p| p.x.dist(sample.xbar)).collect();
    let residuals: Vec<f64> = sample.g_values.iter().map(|g| (g - limit).abs()).collect();
    holder_fit_from_residuals(&dists, &residuals, predicted_beta)
}

/// Mean of |u − c|^p over Ω ∩ B_ρ(x̄) by graded quadrature.
fn region_mean_pow(
    u: &ScalarField,
    domain: &DomainApprox,
    center: Point2,
    rho: f64,
    c: f64,
    p: f64,
    _spec: &QuadratureSpec,
) -> Result<f64> {
    if domain.is_one_dimensional() {
        let (a, b) = domain.interval_bounds().unwrap();
        let lo = (center.x - rho).max(a);
        let hi = (center.x + rho).min(b);
        if hi <= lo {
            return Err(Error::Resolution(format!("empty 1-d region at rho = {rho}")));
        }
        let n = 4096;
        let h = (hi - lo) / n as f64;
        let mut acc = 0.0;
        for i in 0..n {
            let x = lo + (i as f64 + 0.5) * h;
            acc += (u.eval(domain, Point2::new(x, 0.0)) - c).abs().powf(p);
        }
        return Ok(acc / n as f64);
    }
    // Quadtree over the ball's bounding box; cells accepted when certified
    // inside both the domain and the ball, or at the resolution floor by
    // midpoint classification.
    let min_half = rho / 256.0;
    let mut num: Vec<f64> = Vec::new();
    let mut den: Vec<f64> = Vec::new();
    let mut stack = vec![(center.x, center.y, rho)];
    while let Some((cx, cy, half)) = stack.pop() {
        let cpt = Point2::new(cx, cy);
        let half_diag = half * std::f64::consts::SQRT_2;
        let dc = domain.distance_to_boundary(cpt);
        let inside_dom = domain.contains(cpt);
        if !inside_dom && dc > half_diag {
            continue;
        }
        let ball_d = cpt.dist(center);
        if ball_d - half_diag > rho {
            continue;
        }
        let cert_dom = inside_dom && dc > half_diag + domain.distance_error;
        let cert_ball = ball_d + half_diag < rho;
        if (cert_dom && cert_ball) || half <= min_half {
            if half <= min_half && !(inside_dom && ball_d < rho) {
                continue;
            }
            let area = 4.0 * half * half;
            num.push(area * (u.eval(domain, cpt) - c).abs().powf(p));
            den.push(area);
            continue;
        }
        let h = 0.5 * half;
        for (sx, sy) in [(-1.0, -1.0), (-1.0, 1.0), (1.0, -1.0), (1.0, 1.0)] {
            stack.push((cx + sx * h, cy + sy * h, h));
        }
    }
    let area = stable_sum(&den);
    if area <= 0.0 {
        return Err(Error::Resolution(format!(
            "region around ({}, {}) empty at rho = {rho}",
            center.x, center.y
        )));
    }
    Ok(stable_sum(&num) / area)
}

/// One rung of a Lebesgue-point ladder.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct LebesgueRung {
    pub rho: f64,
    pub mean: f64,
}

/// Ladder of p-means ⨍_{Ω∩B_ρ(x̄)} |Tu(x̄) − u|^p with a monotone-trend
/// statistic (Kendall τ of mean against ρ; positive means the deviation
/// shrinks with the radius).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LebesgueLadder {
    pub rungs: Vec<LebesgueRung>,
    pub kendall_tau: f64,
}

pub fn lebesgue_point_check(
    u: &ScalarField,
    domain: &DomainApprox,
    xbar: Point2,
    tu_value: f64,
    p: f64,
    rho_ladder: &[f64],
    spec: &QuadratureSpec,
) -> Result<LebesgueLadder> {
    if rho_ladder.is_empty() {
        return Err(Error::Domain("lebesgue check needs a rho ladder".into()));
    }
    let mut rungs = Vec::with_capacity(rho_ladder.len());
    for &rho in rho_ladder {
        let mean = region_mean_pow(u, domain, xbar, rho, tu_value, p, spec)?;
        rungs.push(LebesgueRung { rho, mean });
    }
    let rhos: Vec<f64> = rungs.iter().map(|r| r.rho).collect();
    let means: Vec<f64> = rungs.iter().map(|r| r.mean).collect();
    Ok(LebesgueLadder { rungs, kendall_tau: kendall_tau(&rhos, &means) })
}

/// The approach-region variant: means over Q_{λ,ρ}(x̄) only, by seeded
/// stratified sampling of the ball.
pub fn corkscrew_region_means(
    u: &ScalarField,
    domain: &DomainApprox,
    xbar: Point2,
    lambda: f64,
    theta: f64,
    rho_ladder: &[f64],
    p: f64,
    tu_value: f64,
    spec: &QuadratureSpec,
) -> Result<LebesgueLadder> {
    if rho_ladder.is_empty() {
        return Err(Error::Domain("approach-region check needs a rho ladder".into()));
    }
    let mut rungs = Vec::with_capacity(rho_ladder.len());
    for (k, &rho) in rho_ladder.iter().enumerate() {
        let mut sobol = Sobol2::new(spec.seed, "q-region", k as u64);
        let n = 4096;
        let mut vals = Vec::new();
        for _ in 0..n {
            let (a, b) = sobol.next_point();
            let r = rho * a.sqrt();
            let phi = std::f64::consts::TAU * b;
            let x = Point2::new(xbar.x + r * phi.cos(), xbar.y + r * phi.sin());
            if !domain.contains(x) {
                continue;
            }
            let d = domain.distance_to_boundary(x);
            if d > (lambda * x.dist(xbar)).powf(theta) {
                vals.push((u.eval(domain, x) - tu_value).abs().powf(p));
            }
        }
        if vals.is_empty() {
            return Err(Error::Resolution(format!(
                "approach region empty at rho = {rho} around ({}, {})",
                xbar.x, xbar.y
            )));
        }
        rungs.push(LebesgueRung { rho, mean: stable_sum(&vals) / vals.len() as f64 });
    }
    let rhos: Vec<f64> = rungs.iter().map(|r| r.rho).collect();
    let means: Vec<f64> = rungs.iter().map(|r| r.mean).collect();
    Ok(LebesgueLadder { rungs, kendall_tau: kendall_tau(&rhos, &means) })
}

/// Discrete Sobolev–Slobodeckij seminorm on weighted boundary samples:
/// Σ_{i≠j} w_i w_j |v_i − v_j|^p / ‖x_i − x_j‖^{t+βp}.
pub fn sobolev_slobodeckij_seminorm(
    samples: &[(Point2, f64, f64)],
    beta: f64,
    p: f64,
    t: f64,
) -> Result<f64> {
    if samples.len() < 2 {
        return Err(Error::Domain("seminorm needs at least two boundary samples".into()));
    }
    let exponent = t + beta * p;
    let mut terms = Vec::with_capacity(samples.len() * (samples.len() - 1));
    for (i, (xi, vi, wi)) in samples.iter().enumerate() {
        for (j, (xj, vj, wj)) in samples.iter().enumerate() {
            if i == j {
                continue;
            }
            let dist = xi.dist(*xj);
            if dist == 0.0 {
                return Err(Error::DegeneratePair(format!(
                    "coincident boundary samples at ({}, {})",
                    xi.x, xi.y
                )));
            }
            terms.push(wi * wj * (vi - vj).abs().powf(p) / dist.powf(exponent));
        }
    }
    Ok(stable_sum(&terms))
}

/// Which admissibility threshold to test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AdmissibilityMode {
    /// Trace existence and W^{β,p} continuity: α(s₀,θ₀) > −t.
    TraceWbp,
    /// Lebesgue point property: α(s₀,θ₀) > n(θ₀−1) − t.
    Lebesgue,
}

pub fn admissible_region(
    p: f64,
    s0: f64,
    theta0: f64,
    t: f64,
    n: u32,
    mode: AdmissibilityMode,
) -> bool {
    let a = alpha(s0, theta0, p, n);
    match mode {
        AdmissibilityMode::TraceWbp => a > -t,
        AdmissibilityMode::Lebesgue => a > n as f64 * (theta0 - 1.0) - t,
    }
}

/// Admissibility masks over a (p, s) grid plus the two threshold curves.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RegionGrid {
    pub ps: Vec<f64>,
    pub ss: Vec<f64>,
    /// Row-major masks indexed [s_index * ps.len() + p_index].
    pub mask_trace: Vec<bool>,
    pub mask_lebesgue: Vec<bool>,
    /// s*(p) solving α(s,θ₀) = −t and = n(θ₀−1) − t.
    pub curve_trace: Vec<(f64, f64)>,
    pub curve_lebesgue: Vec<(f64, f64)>,
}

/// Invert α(·, θ) = target in s for fixed p (α is nondecreasing in s).
pub fn alpha_threshold_s(target: f64, theta: f64, p: f64, n: u32) -> f64 {
    let nf = n as f64;
    // Lower branch first: valid while ps − n ≤ p − 1 at the solution.
    let s1 = (nf + (target - p * (1.0 - theta)) / theta) / p;
    if p * s1 - nf <= p - 1.0 + 1e-15 {
        s1
    } else {
        (nf + target - (1.0 - theta)) / p
    }
}

pub fn region_grid(
    p_range: (f64, f64),
    s_range: (f64, f64),
    theta0: f64,
    t: f64,
    n: u32,
    resolution: u32,
) -> Result<RegionGrid> {
    if resolution < 32 {
        return Err(Error::Domain(format!("grid resolution must be >= 32, got {resolution}")));
    }
    let (p_lo, p_hi) = p_range;
    let (s_lo, s_hi) = s_range;
    if !(p_lo >= 1.0 && p_hi > p_lo && s_hi > s_lo) {
        return Err(Error::Domain("region grid needs p >= 1 and nonempty ranges".into()));
    }
    let m = resolution as usize;
    let ps: Vec<f64> = (0..m).map(|i| p_lo + (p_hi - p_lo) * i as f64 / (m - 1) as f64).collect();
    let ss: Vec<f64> = (0..m).map(|i| s_lo + (s_hi - s_lo) * i as f64 / (m - 1) as f64).collect();
    let mut mask_trace = vec![false; m * m];
    let mut mask_lebesgue = vec![false; m * m];
    for (si, &s) in ss.iter().enumerate() {
        for (pi, &p) in ps.iter().enumerate() {
            mask_trace[si * m + pi] =
                admissible_region(p, s, theta0, t, n, AdmissibilityMode::TraceWbp);
            mask_lebesgue[si * m + pi] =
                admissible_region(p, s, theta0, t, n, AdmissibilityMode::Lebesgue);
        }
    }
    let curve = |target: f64| -> Vec<(f64, f64)> {
        ps.iter().map(|&p| (p, alpha_threshold_s(target, theta0, p, n))).collect()
    };
    let curve_trace = curve(-t);
    let curve_lebesgue = curve(n as f64 * (theta0 - 1.0) - t);
    Ok(RegionGrid { ps, ss, mask_trace, mask_lebesgue, curve_trace, curve_lebesgue })
}

impl RegionGrid {
    pub fn mask_csv(&self, lebesgue: bool) -> String {
        let mask = if lebesgue { &self.mask_lebesgue } else { &self.mask_trace };
        let m = self.ps.len();
        let mut out = String::new();
        out.push_str("s\\p,");
        out.push_str(&self.ps.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(","));
        out.push('\n');
        for (si, s) in self.ss.iter().enumerate() {
            out.push_str(&s.to_string());
            for pi in 0..m {
                out.push(',');
                out.push(if mask[si * m + pi] { '1' } else { '0' });
            }
            out.push('\n');
        }
        out
    }

    pub fn curves_csv(&self) -> String {
        let mut out = String::from("p,s_trace,s_lebesgue\n");
        for (k, (p, s_tr)) in self.curve_trace.iter().enumerate() {
            out.push_str(&format!("{},{},{}\n", p, s_tr, self.curve_lebesgue[k].1));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fractal::PricklyDomain;

    #[test]
    fn corkscrew_at_wedge_cusp_with_matching_theta() {
        let dom = DomainApprox::wedge(2.0, 0.75, 1e-8).unwrap();
        let params = CorkscrewParams {
            lambda: 0.3,
            eta: 0.5,
            theta: 2.0,
            rho0: 0.2,
            j_max: 10,
            candidates: 256,
            seed: 1,
        };
        let seq = corkscrew_sequence(&dom, Point2::new(0.0, 0.0), &params).unwrap();
        assert!(seq.complete(), "missing shells {:?}", seq.missing);
        // Witnesses hug the axis where d(x) is comparable to rho^theta.
        for pt in &seq.points {
            assert!(pt.dist > 0.2 * pt.rho.powi(2), "{pt:?}");
        }
        assert!(seq.r0_sup > 0.0);
    }

    #[test]
    fn corkscrew_at_wedge_cusp_fails_with_linear_cone() {
        // No linear (theta = 1) cone fits inside the quadratic cusp: deep
        // shells must come back empty.
        let dom = DomainApprox::wedge(2.0, 0.75, 1e-8).unwrap();
        let params = CorkscrewParams {
            lambda: 0.3,
            eta: 0.5,
            theta: 1.0,
            rho0: 0.2,
            j_max: 10,
            candidates: 512,
            seed: 1,
        };
        let seq = corkscrew_sequence(&dom, Point2::new(0.0, 0.0), &params).unwrap();
        assert!(!seq.missing.is_empty(), "linear cone unexpectedly found witnesses everywhere");
    }

    #[test]
    fn corkscrew_on_flat_boundary() {
        let dom = DomainApprox::unit_square();
        let params = CorkscrewParams { theta: 1.0, rho0: 0.3, ..Default::default() };
        let seq = corkscrew_sequence(&dom, Point2::new(0.5, 0.0), &params).unwrap();
        assert!(seq.complete(), "missing {:?}", seq.missing);
    }

    #[test]
    fn trace_of_continuous_field_matches_boundary_value() {
        let dom = DomainApprox::unit_square();
        let spec = QuadratureSpec::default();
        let u = ScalarField::Linear { ax: 1.0, ay: 1.0, c: 0.0 };
        let xbar = Point2::new(0.4, 0.0);
        let params = CorkscrewParams { theta: 1.0, rho0: 0.2, j_max: 18, ..Default::default() };
        let seq = corkscrew_sequence(&dom, xbar, &params).unwrap();
        let sample = trace_at(&u, &dom, &seq, &spec, 1e-4).unwrap();
        let limit = sample.limit.expect("cauchy limit");
        assert!((limit - 0.4).abs() < 2e-4, "limit {limit}");
    }

    #[test]
    fn trace_of_constant_field() {
        let dom = DomainApprox::unit_square();
        let spec = QuadratureSpec::default();
        let u = ScalarField::Constant { value: 3.0 };
        let params = CorkscrewParams { theta: 1.0, rho0: 0.2, ..Default::default() };
        let seq = corkscrew_sequence(&dom, Point2::new(0.7, 0.0), &params).unwrap();
        let sample = trace_at(&u, &dom, &seq, &spec, 1e-6).unwrap();
        assert_eq!(sample.limit, Some(3.0));
        assert_eq!(sample.cauchy_tail, 0.0);
    }

    #[test]
    fn blowup_field_yields_non_cauchy_report() {
        let dom = DomainApprox::unit_square();
        let spec = QuadratureSpec::default();
        let u = ScalarField::DistancePower { offset: 0.0, coef: 1.0, exponent: -0.5 };
        let params = CorkscrewParams { theta: 1.0, rho0: 0.2, j_max: 14, ..Default::default() };
        let seq = corkscrew_sequence(&dom, Point2::new(0.5, 0.0), &params).unwrap();
        let sample = trace_at(&u, &dom, &seq, &spec, 1e-6).unwrap();
        assert!(sample.limit.is_none(), "blow-up field produced a limit");
        assert!(sample.cauchy_tail > 0.1);
    }

    #[test]
    fn holder_fit_recovers_synthetic_rate() {
        let dists: Vec<f64> = (0..10).map(|k| 0.5f64.powi(k)).collect();
        let residuals: Vec<f64> = dists.iter().map(|d| d.sqrt()).collect();
        let fit = holder_fit_from_residuals(&dists, &residuals, 0.5).unwrap();
        assert!((fit.beta_hat - 0.5).abs() < 1e-6, "beta {}", fit.beta_hat);
        assert!((fit.c_hat - 1.0).abs() < 1e-6);
        assert!(fit.r2 > 1.0 - 1e-12);
    }

    #[test]
    fn holder_fit_flags_noise_limited() {
        let dom = DomainApprox::unit_square();
        let spec = QuadratureSpec::default();
        let u = ScalarField::Constant { value: 1.0 };
        let params = CorkscrewParams { theta: 1.0, rho0: 0.2, ..Default::default() };
        let seq = corkscrew_sequence(&dom, Point2::new(0.5, 0.0), &params).unwrap();
        let sample = trace_at(&u, &dom, &seq, &spec, 1e-6).unwrap();
        let fit = holder_fit(&sample, 0.5).unwrap();
        assert!(fit.noise_limited);
    }

    #[test]
    fn smooth_field_has_first_order_residuals() {
        let dom = DomainApprox::unit_square();
        let spec = QuadratureSpec::default();
        let u = ScalarField::Linear { ax: 1.0, ay: 1.0, c: 0.0 };
        let params = CorkscrewParams { theta: 1.0, rho0: 0.25, j_max: 20, ..Default::default() };
        let seq = corkscrew_sequence(&dom, Point2::new(0.3, 0.0), &params).unwrap();
        let sample = trace_at(&u, &dom, &seq, &spec, 1e-4).unwrap();
        let fit = holder_fit(&sample, 0.5).unwrap();
        if !fit.noise_limited {
            assert!(fit.beta_hat >= 0.8, "Lipschitz field fitted beta {}", fit.beta_hat);
        }
    }

    #[test]
    fn lebesgue_ladder_on_continuous_field() {
        let dom = DomainApprox::unit_square();
        let spec = QuadratureSpec::default();
        let u = ScalarField::Linear { ax: 1.0, ay: 1.0, c: 0.0 };
        let xbar = Point2::new(0.5, 0.0);
        let rhos = [0.2, 0.1, 0.05, 0.025, 0.0125];
        let ladder = lebesgue_point_check(&u, &dom, xbar, 0.5, 2.0, &rhos, &spec).unwrap();
        let first = ladder.rungs.first().unwrap().mean;
        let last = ladder.rungs.last().unwrap().mean;
        assert!(last < first / 10.0, "means {first} .. {last}");
        assert!(ladder.kendall_tau > 0.99);
    }

    #[test]
    fn lebesgue_ladder_constant_cases() {
        let dom = DomainApprox::unit_square();
        let spec = QuadratureSpec::default();
        let u = ScalarField::Constant { value: 2.0 };
        let rhos = [0.2, 0.1, 0.05];
        let ladder = lebesgue_point_check(&u, &dom, Point2::new(0.5, 0.0), 2.0, 2.0, &rhos, &spec)
            .unwrap();
        for r in &ladder.rungs {
            assert_eq!(r.mean, 0.0);
        }
        // Deliberately wrong trace value: means equal |offset|^p.
        let ladder = lebesgue_point_check(&u, &dom, Point2::new(0.5, 0.0), 3.0, 2.0, &rhos, &spec)
            .unwrap();
        for r in &ladder.rungs {
            assert!((r.mean - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn corkscrew_region_means_shrink() {
        let dom = DomainApprox::unit_square();
        let spec = QuadratureSpec::default();
        let u = ScalarField::Linear { ax: 1.0, ay: 1.0, c: 0.0 };
        let xbar = Point2::new(0.5, 0.0);
        let rhos = [0.2, 0.1, 0.05, 0.025];
        let ladder =
            corkscrew_region_means(&u, &dom, xbar, 0.4, 1.0, &rhos, 2.0, 0.5, &spec).unwrap();
        let first = ladder.rungs.first().unwrap().mean;
        let last = ladder.rungs.last().unwrap().mean;
        assert!(last < first, "approach-region means did not shrink: {first} vs {last}");
    }

    #[test]
    fn sobolev_seminorm_examples() {
        let two = vec![
            (Point2::new(0.0, 0.0), 0.0, 1.0),
            (Point2::new(1.0, 0.0), 1.0, 1.0),
        ];
        let v = sobolev_slobodeckij_seminorm(&two, 0.5, 2.0, 1.3).unwrap();
        assert!((v - 2.0).abs() < 1e-12, "two-point value {v}");

        let constant: Vec<(Point2, f64, f64)> = (0..50)
            .map(|k| (Point2::new(k as f64 * 0.02, (k % 5) as f64 * 0.1), 4.0, 1.0 / 50.0))
            .collect();
        let v = sobolev_slobodeckij_seminorm(&constant, 0.5, 2.0, 1.3).unwrap();
        assert_eq!(v, 0.0);

        let coincident = vec![
            (Point2::new(0.1, 0.1), 0.0, 1.0),
            (Point2::new(0.1, 0.1), 1.0, 1.0),
        ];
        assert!(matches!(
            sobolev_slobodeckij_seminorm(&coincident, 0.5, 2.0, 1.3),
            Err(Error::DegeneratePair(_))
        ));
    }

    #[test]
    fn sobolev_seminorm_stable_under_refinement_for_smooth_trace() {
        // Boundary samples on the Koch-parameter attractor with grouped
        // masses as weights; trace = restriction of x + y.
        let prickly = PricklyDomain::new(2.0, 0.75, 8).unwrap();
        let t = prickly.t;
        let measure = crate::measure::ConformalMeasure::new(t).unwrap();
        let build = |norm: u32, count: usize| -> Vec<(Point2, f64, f64)> {
            let pts = crate::measure::sample_attractor_points(&prickly, count, norm, 13).unwrap();
            pts.iter()
                .map(|a| {
                    let w = measure.grouped_mass(prickly.sigma_composite(&a.address));
                    (a.point, a.point.x + a.point.y, w)
                })
                .collect()
        };
        let coarse = build(12, 150);
        let fine = build(12, 300);
        let beta = 0.4;
        let a = sobolev_slobodeckij_seminorm(&coarse, beta, 2.0, t).unwrap();
        let b = sobolev_slobodeckij_seminorm(&fine, beta, 2.0, t).unwrap();
        // Estimates are weighted double sums; doubling the sample count scales
        // the total weight, so compare per unit weight squared.
        let wa: f64 = coarse.iter().map(|s| s.2).sum();
        let wb: f64 = fine.iter().map(|s| s.2).sum();
        let (na, nb) = (a / (wa * wa), b / (wb * wb));
        assert!((na - nb).abs() / na.max(nb) < 0.5, "normalized {na} vs {nb}");
    }

    #[test]
    fn admissible_region_examples() {
        assert!(admissible_region(2.0, 2.0, 2.0, 1.3, 2, AdmissibilityMode::TraceWbp));
        assert!(admissible_region(2.0, 2.0, 2.0, 1.3, 2, AdmissibilityMode::Lebesgue));
        assert!(!admissible_region(1.0, 1.0, 2.0, 1.3, 2, AdmissibilityMode::TraceWbp));
    }

    #[test]
    fn region_grid_masks_and_curves() {
        let grid = region_grid((1.0, 6.0), (0.0, 4.0), 2.0, 1.3, 2, 64).unwrap();
        let m = grid.ps.len();
        let mut strict = false;
        for si in 0..m {
            for pi in 0..m {
                let idx = si * m + pi;
                if grid.mask_lebesgue[idx] {
                    assert!(grid.mask_trace[idx], "containment violated at {idx}");
                }
                if grid.mask_trace[idx] && !grid.mask_lebesgue[idx] {
                    strict = true;
                }
            }
        }
        assert!(strict, "masks coincide; containment not strict");
        // Monotone in s along each p column.
        for pi in 0..m {
            let mut seen_true = false;
            for si in 0..m {
                let v = grid.mask_trace[si * m + pi];
                if seen_true {
                    assert!(v, "mask not monotone in s at column {pi}");
                }
                seen_true |= v;
            }
        }
    }

    #[test]
    fn threshold_curve_continuous_at_branch_switch() {
        let theta = 2.0;
        let n = 2u32;
        for target in [-1.3, 0.7] {
            // Find the p where the branch changes and compare both formulas.
            for k in 0..2000 {
                let p = 1.0 + k as f64 * 0.005;
                let s1 = (n as f64 + (target - p * (1.0 - theta)) / theta) / p;
                let s2 = (n as f64 + target - (1.0 - theta)) / p;
                let on_break = (p * s1 - n as f64 - (p - 1.0)).abs() < 5e-3;
                if on_break {
                    assert!((s1 - s2).abs() < 5e-3, "jump at p={p}: {s1} vs {s2}");
                }
            }
            // Exact algebra: the threshold curve hits the bilinear breakpoint
            // where α = p − θ = target, i.e. p* = target + θ; both branch
            // formulas must agree there.
            let p_star = target + theta;
            let s1 = (n as f64 + (target - p_star * (1.0 - theta)) / theta) / p_star;
            let s2 = (n as f64 + target - (1.0 - theta)) / p_star;
            assert!((s1 - s2).abs() < 1e-12, "exact breakpoint mismatch: {s1} vs {s2}");
        }
    }
}
