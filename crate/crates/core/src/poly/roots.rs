//! Complex univariate root finding.
//!
//! Primary method: Aberth–Ehrlich simultaneous iteration. Fallback: the
//! Frobenius companion matrix reduced by a shifted Hessenberg QR iteration.
//! Both routes finish with Newton polishing and are verified against the
//! backward-error criterion `|p(root)| <= tol * sum_k |c_k| |root|^k`.

use crate::error::{Error, Result};
use num_complex::Complex64;

/// Tuning knobs for the root finder.
#[derive(Debug, Clone)]
pub struct RootConfig {
    /// Residual tolerance on |p(root)| / |leading coefficient|.
    pub tol: f64,
    /// Iteration budget for the simultaneous iteration.
    pub max_iterations: usize,
}

impl Default for RootConfig {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            max_iterations: 400,
        }
    }
}

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// All roots of `sum_k coeffs[k] x^k` (ascending powers), sorted by
/// (real part, imaginary part).
pub fn roots_from_coeffs(coeffs: &[Complex64], config: &RootConfig) -> Result<Vec<Complex64>> {
    let mut cs: Vec<Complex64> = coeffs.to_vec();
    while cs.last().is_some_and(|c| c.norm() == 0.0) {
        cs.pop();
    }
    if cs.is_empty() {
        return Err(Error::ZeroPolynomial);
    }
    let mut roots: Vec<Complex64> = Vec::new();
    // Exact zero constant terms factor out as roots at the origin.
    let mut start = 0;
    while start < cs.len() - 1 && cs[start].norm() == 0.0 {
        roots.push(ZERO);
        start += 1;
    }
    let cs = &cs[start..];
    let deg = cs.len() - 1;
    match deg {
        0 => {}
        1 => roots.push(-cs[0] / cs[1]),
        2 => roots.extend(quadratic_roots(cs[0], cs[1], cs[2])),
        _ => {
            let found = match aberth(cs, config) {
                Ok(r) => r,
                Err(_) => companion_roots(cs)?,
            };
            let mut worst = 0.0f64;
            for r in found {
                let polished = newton_polish(cs, r, 6);
                let (p, _) = eval_with_deriv(cs, polished);
                worst = worst.max(p.norm() / eval_scale(cs, polished));
                roots.push(polished);
            }
            if worst > config.tol {
                return Err(Error::RootsDiverged {
                    iterations: config.max_iterations,
                    residual: worst,
                });
            }
        }
    }
    sort_roots(&mut roots);
    Ok(roots)
}

fn sort_roots(roots: &mut [Complex64]) {
    roots.sort_by(|a, b| a.re.total_cmp(&b.re).then_with(|| a.im.total_cmp(&b.im)));
}

fn quadratic_roots(c0: Complex64, c1: Complex64, c2: Complex64) -> [Complex64; 2] {
    // Citardauq form avoids cancellation in the small root.
    let disc = (c1 * c1 - 4.0 * c2 * c0).sqrt();
    let q = if (c1 + disc).norm() >= (c1 - disc).norm() {
        -(c1 + disc) / 2.0
    } else {
        -(c1 - disc) / 2.0
    };
    if q.norm() == 0.0 {
        [ZERO, ZERO]
    } else {
        [q / c2, c0 / q]
    }
}

fn eval_with_deriv(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = ZERO;
    let mut dp = ZERO;
    for c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// Backward-error scale `sum_k |c_k| |z|^k`; a residual below
/// `tol * scale` means `z` is an exact root of a polynomial whose
/// coefficients differ relatively by at most `tol`.
fn eval_scale(coeffs: &[Complex64], z: Complex64) -> f64 {
    let r = z.norm();
    let mut s = 0.0f64;
    for c in coeffs.iter().rev() {
        s = s * r + c.norm();
    }
    s.max(f64::MIN_POSITIVE)
}

fn newton_polish(coeffs: &[Complex64], mut z: Complex64, steps: usize) -> Complex64 {
    for _ in 0..steps {
        let (p, dp) = eval_with_deriv(coeffs, z);
        if dp.norm() == 0.0 {
            break;
        }
        let step = p / dp;
        if !step.re.is_finite() || !step.im.is_finite() {
            break;
        }
        z -= step;
        if step.norm() <= 1e-17 * (1.0 + z.norm()) {
            break;
        }
    }
    z
}

/// Aberth–Ehrlich simultaneous iteration on a polynomial of degree >= 3.
fn aberth(coeffs: &[Complex64], config: &RootConfig) -> Result<Vec<Complex64>> {
    let deg = coeffs.len() - 1;
    let lc = coeffs[deg];
    let lc_norm = lc.norm();
    // Cauchy bound: all roots lie inside |z| <= 1 + max |c_i / lc|.
    let bound = 1.0
        + coeffs[..deg]
            .iter()
            .map(|c| c.norm() / lc_norm)
            .fold(0.0, f64::max);
    let radius = bound.min(1.0 + (coeffs[0].norm() / lc_norm).powf(1.0 / deg as f64));
    let mut u: Vec<Complex64> = (0..deg)
        .map(|k| {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / deg as f64 + 0.4;
            radius * Complex64::new(theta.cos(), theta.sin())
        })
        .collect();

    let mut last_residual = f64::INFINITY;
    for iter in 0..config.max_iterations {
        let mut max_step = 0.0f64;
        let mut max_residual = 0.0f64;
        for i in 0..deg {
            let (p, dp) = eval_with_deriv(coeffs, u[i]);
            max_residual = max_residual.max(p.norm() / eval_scale(coeffs, u[i]));
            if p.norm() == 0.0 {
                continue;
            }
            let w = if dp.norm() == 0.0 {
                // Sitting on a critical point: nudge off it.
                Complex64::new(1e-8, 1e-8)
            } else {
                p / dp
            };
            let mut sum = ZERO;
            for j in 0..deg {
                if j != i {
                    let d = u[i] - u[j];
                    let d = if d.norm() < 1e-300 {
                        Complex64::new(1e-12, 1e-12)
                    } else {
                        d
                    };
                    sum += 1.0 / d;
                }
            }
            let denom = Complex64::new(1.0, 0.0) - w * sum;
            let step = if denom.norm() < 1e-300 { w } else { w / denom };
            if !step.re.is_finite() || !step.im.is_finite() {
                return Err(Error::RootsDiverged {
                    iterations: iter,
                    residual: max_residual,
                });
            }
            u[i] -= step;
            max_step = max_step.max(step.norm() / (1.0 + u[i].norm()));
        }
        if max_residual <= config.tol {
            return Ok(u);
        }
        if max_step <= 1e-16 && (max_residual - last_residual).abs() <= f64::EPSILON {
            break; // stagnation: let the caller polish and re-check
        }
        last_residual = max_residual;
    }
    // Converged-in-place but above tolerance: hand back for polish if close,
    // otherwise report divergence so the fallback runs.
    let worst = u
        .iter()
        .map(|&z| eval_with_deriv(coeffs, z).0.norm() / eval_scale(coeffs, z))
        .fold(0.0, f64::max);
    if worst <= config.tol.max(1e-6) {
        Ok(u)
    } else {
        Err(Error::RootsDiverged {
            iterations: config.max_iterations,
            residual: worst,
        })
    }
}

/// Companion-matrix route: eigenvalues of the Frobenius companion matrix via
/// a shifted Hessenberg QR iteration.
fn companion_roots(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    let deg = coeffs.len() - 1;
    let lc = coeffs[deg];
    let mut h = vec![vec![ZERO; deg]; deg];
    for i in 0..deg {
        if i + 1 < deg {
            h[i + 1][i] = Complex64::new(1.0, 0.0);
        }
        h[i][deg - 1] = -coeffs[i] / lc;
    }
    hessenberg_eigenvalues(h)
}

fn eig2(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> (Complex64, Complex64) {
    let tr = a + d;
    let disc = ((a - d) * (a - d) + 4.0 * b * c).sqrt();
    ((tr + disc) / 2.0, (tr - disc) / 2.0)
}

/// Eigenvalues of a complex upper-Hessenberg matrix by single-shift QR with
/// Wilkinson shifts and deflation.
fn hessenberg_eigenvalues(mut h: Vec<Vec<Complex64>>) -> Result<Vec<Complex64>> {
    let n = h.len();
    let mut eigs: Vec<Complex64> = Vec::with_capacity(n);
    let mut hi = n;
    let mut stalled = 0usize;
    let budget = 60 * n + 100;
    let mut total = 0usize;
    while hi > 0 {
        total += 1;
        if total > budget {
            return Err(Error::RootsDiverged {
                iterations: budget,
                residual: f64::NAN,
            });
        }
        // Kill negligible subdiagonals.
        for k in 1..hi {
            let small = f64::EPSILON * (h[k - 1][k - 1].norm() + h[k][k].norm() + 1e-300);
            if h[k][k - 1].norm() <= small {
                h[k][k - 1] = ZERO;
            }
        }
        if hi == 1 {
            eigs.push(h[0][0]);
            break;
        }
        if h[hi - 1][hi - 2].norm() == 0.0 {
            eigs.push(h[hi - 1][hi - 1]);
            hi -= 1;
            stalled = 0;
            continue;
        }
        if hi == 2 || h[hi - 2][hi - 3].norm() == 0.0 {
            let (l1, l2) = eig2(
                h[hi - 2][hi - 2],
                h[hi - 2][hi - 1],
                h[hi - 1][hi - 2],
                h[hi - 1][hi - 1],
            );
            eigs.push(l1);
            eigs.push(l2);
            hi -= 2;
            stalled = 0;
            continue;
        }
        let mut lo = hi - 1;
        while lo > 0 && h[lo][lo - 1].norm() != 0.0 {
            lo -= 1;
        }
        stalled += 1;
        let mu = if stalled.is_multiple_of(12) {
            // Exceptional shift to break symmetric stagnation.
            h[hi - 1][hi - 1] + Complex64::new(1.0, 0.5) * h[hi - 1][hi - 2].norm()
        } else {
            let (l1, l2) = eig2(
                h[hi - 2][hi - 2],
                h[hi - 2][hi - 1],
                h[hi - 1][hi - 2],
                h[hi - 1][hi - 1],
            );
            let d = h[hi - 1][hi - 1];
            if (l1 - d).norm() <= (l2 - d).norm() {
                l1
            } else {
                l2
            }
        };
        qr_step(&mut h, lo, hi, mu);
    }
    Ok(eigs)
}

/// One explicit single-shift QR sweep on the active block `lo..hi`.
fn qr_step(h: &mut [Vec<Complex64>], lo: usize, hi: usize, mu: Complex64) {
    for k in lo..hi {
        h[k][k] -= mu;
    }
    // Left Givens chain turning (H - mu I) into R.
    let mut rotations: Vec<(f64, Complex64)> = Vec::with_capacity(hi - lo);
    for k in lo..hi - 1 {
        let a = h[k][k];
        let b = h[k + 1][k];
        let (c, s) = givens(a, b);
        rotations.push((c, s));
        for j in k..hi {
            let top = h[k][j];
            let bot = h[k + 1][j];
            h[k][j] = c * top + s * bot;
            h[k + 1][j] = -s.conj() * top + c * bot;
        }
    }
    // Right multiplication by the adjoint rotations: R Q.
    for (idx, (c, s)) in rotations.iter().enumerate() {
        let k = lo + idx;
        let row_end = (k + 2).min(hi);
        for row in h.iter_mut().take(row_end).skip(lo) {
            let left = row[k];
            let right = row[k + 1];
            row[k] = *c * left + s.conj() * right;
            row[k + 1] = -*s * left + *c * right;
        }
    }
    for k in lo..hi {
        h[k][k] += mu;
    }
}

/// Unitary rotation with real `c` sending (a, b) to (r, 0).
fn givens(a: Complex64, b: Complex64) -> (f64, Complex64) {
    if b.norm() == 0.0 {
        return (1.0, ZERO);
    }
    if a.norm() == 0.0 {
        return (0.0, b.conj() / b.norm());
    }
    let r = a.norm().hypot(b.norm());
    let c = a.norm() / r;
    let s = c * (b / a).conj();
    (c, s)
}
