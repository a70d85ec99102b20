//! Small numeric utilities: stable summation, least-squares fits, rank
//! statistics, and a stable 64-bit content hash.

/// Neumaier-compensated sum in a fixed left-to-right order.
///
/// Used for every reduction that must be reproducible across thread counts:
/// parallel stages collect per-item values into an indexed buffer and this
/// performs the only floating-point accumulation.
pub fn stable_sum(values: &[f64]) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for &v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Ordinary least squares fit `y ≈ a + b x`, returning `(a, b, r²)`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    assert_eq!(x.len(), y.len());
    let n = x.len() as f64;
    assert!(n >= 2.0, "fit needs at least two points");
    let mx = stable_sum(x) / n;
    let my = stable_sum(y) / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for i in 0..x.len() {
        let dx = x[i] - mx;
        let dy = y[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if sxx == 0.0 {
        return (my, 0.0, 0.0);
    }
    let b = sxy / sxx;
    let a = my - b * mx;
    let r2 = if syy == 0.0 { 1.0 } else { (sxy * sxy) / (sxx * syy) };
    (a, b, r2)
}

/// Kendall rank correlation τ between paired samples.
///
/// O(n²); the ladders it is applied to have at most a few dozen rungs.
pub fn kendall_tau(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len());
    let n = x.len();
    if n < 2 {
        return 0.0;
    }
    let mut concordant = 0i64;
    let mut discordant = 0i64;
    for i in 0..n {
        for j in (i + 1)..n {
            let sx = (x[j] - x[i]).signum();
            let sy = (y[j] - y[i]).signum();
            let s = sx * sy;
            if s > 0.0 {
                concordant += 1;
            } else if s < 0.0 {
                discordant += 1;
            }
        }
    }
    let pairs = (n * (n - 1) / 2) as f64;
    (concordant - discordant) as f64 / pairs
}

/// FNV-1a 64-bit hash. Stable across runs, platforms, and toolchains, which
/// `std::hash` does not guarantee; used for config hashes and sub-seed
/// derivation.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Derive a deterministic sub-seed for a named parallel work item.
pub fn subseed(seed: u64, label: &str, index: u64) -> u64 {
    let mut buf = Vec::with_capacity(label.len() + 16);
    buf.extend_from_slice(&seed.to_le_bytes());
    buf.extend_from_slice(label.as_bytes());
    buf.extend_from_slice(&index.to_le_bytes());
    fnv1a64(&buf)
}

/// Relative difference `|a−b| / max(|a|,|b|,floor)`.
pub fn rel_diff(a: f64, b: f64, floor: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(floor)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stable_sum_cancellation() {
        let v = vec![1e16, 1.0, -1e16];
        assert_eq!(stable_sum(&v), 1.0);
    }

    #[test]
    fn linear_fit_exact_line() {
        let x: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let y: Vec<f64> = x.iter().map(|&xi| 3.0 - 0.5 * xi).collect();
        let (a, b, r2) = linear_fit(&x, &y);
        assert!((a - 3.0).abs() < 1e-12);
        assert!((b + 0.5).abs() < 1e-12);
        assert!((r2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn kendall_tau_signs() {
        let x = vec![1.0, 2.0, 3.0, 4.0];
        let up = vec![0.1, 0.2, 0.3, 0.4];
        let down = vec![0.4, 0.3, 0.2, 0.1];
        assert_eq!(kendall_tau(&x, &up), 1.0);
        assert_eq!(kendall_tau(&x, &down), -1.0);
    }

    #[test]
    fn fnv_is_stable() {
        // Reference value for "hello" from the FNV-1a specification.
        assert_eq!(fnv1a64(b"hello"), 0xa430d84680aabd0b);
    }
}
