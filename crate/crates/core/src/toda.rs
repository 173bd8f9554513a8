//! The open Toda chain prepotential in closed form, its derivative
//! tensors, the rational-spectral-curve residue formula, and the duality
//! bridge to the polynomial Frobenius side.
//!
//! The prepotential on n coordinates is
//!
//!   F(z) = 1/2 sum_{i<j} (z_i - z_j)^2 log(e^{-3/2} (z_i - z_j))
//!          + 1/2 sum_k z_k^2 log z_k
//!
//! with the principal branch of log. Its third derivatives are rational
//! and branch-free; the Hessian contraction with z is the constant matrix
//! (n+1) I - AllOnes.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::esk::{guarded_inverse, PrepotentialProvider};
use crate::poly::{roots_from_coeffs, ComplexVector, RootConfig};
use crate::report::{fmt_f64, CheckReport};
use crate::saito::FrobeniusData;

/// Minimal separation treated as "distinct" / "nonzero" in the domain
/// predicate.
const DOMAIN_FLOOR: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct TodaModel {
    n: usize,
}

impl TodaModel {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Config("the chain needs at least one site".into()));
        }
        Ok(Self { n })
    }

    pub fn rank(&self) -> usize {
        self.n
    }

    fn check_domain(&self, z: &[Complex64]) -> Result<()> {
        if z.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: z.len(),
            });
        }
        for (k, zk) in z.iter().enumerate() {
            if !zk.re.is_finite() || !zk.im.is_finite() {
                return Err(Error::NonFinite(format!("z_{} is not finite", k + 1)));
            }
            if zk.norm() < DOMAIN_FLOOR {
                return Err(Error::DomainViolation(format!("z_{} vanishes", k + 1)));
            }
        }
        for i in 0..self.n {
            for j in i + 1..self.n {
                if (z[i] - z[j]).norm() < DOMAIN_FLOOR {
                    return Err(Error::DomainViolation(format!(
                        "z_{} and z_{} coincide",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        Ok(())
    }

    /// F(z) with the principal branch of log.
    pub fn prepotential(&self, z: &[Complex64]) -> Result<Complex64> {
        self.check_domain(z)?;
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..self.n {
            for j in i + 1..self.n {
                let d = z[i] - z[j];
                acc += 0.5 * d * d * (Complex64::new(-1.5, 0.0) + d.ln());
            }
        }
        for zk in z {
            acc += 0.5 * zk * zk * zk.ln();
        }
        Ok(acc)
    }

    /// Hessian [F_jk]: off-diagonal -log(z_i - z_j) taken with i < j;
    /// diagonal sum_{j != i} log(z_i - z_j) + log z_i + 3/2.
    pub fn hessian_matrix(&self, z: &[Complex64]) -> Result<DMatrix<Complex64>> {
        self.check_domain(z)?;
        let n = self.n;
        let mut m = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
        for i in 0..n {
            let mut diag = z[i].ln() + Complex64::new(1.5, 0.0);
            for j in 0..n {
                if i == j {
                    continue;
                }
                let l = if i < j {
                    (z[i] - z[j]).ln()
                } else {
                    (z[j] - z[i]).ln()
                };
                diag += l;
                m[(i, j)] = -l;
            }
            m[(i, i)] = diag;
        }
        Ok(m)
    }

    /// Third-derivative matrices out[i][(j,k)] = F_ijk in closed form:
    /// F_iii = sum_{j != i} 1/(z_i - z_j) + 1/z_i, F_iij = -1/(z_i - z_j),
    /// zero for three distinct indices.
    pub fn third_derivative_mats(&self, z: &[Complex64]) -> Result<Vec<DMatrix<Complex64>>> {
        self.check_domain(z)?;
        let n = self.n;
        let one = Complex64::new(1.0, 0.0);
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let mut m = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
            let mut diag = one / z[i];
            for j in 0..n {
                if j == i {
                    continue;
                }
                let inv = one / (z[i] - z[j]);
                diag += inv;
                // F_iij sits at (i,j) and (j,i) of [F_i]; F_ijj at (j,j).
                m[(i, j)] = -inv;
                m[(j, i)] = -inv;
                m[(j, j)] = inv;
            }
            m[(i, i)] = diag;
            out.push(m);
        }
        Ok(out)
    }

    /// [F_E]_{ij} = sum_k z_k F_kij; equals (n+1) I - AllOnes on the whole
    /// domain.
    pub fn f_e_matrix(&self, z: &[Complex64]) -> Result<DMatrix<Complex64>> {
        let f3 = self.third_derivative_mats(z)?;
        let n = self.n;
        let mut m = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
        for (k, fk) in f3.iter().enumerate() {
            m += fk.map(|e| e * z[k]);
        }
        Ok(m)
    }

    /// The constant value of [F_E]: (n+1) I - AllOnes.
    pub fn expected_f_e(&self) -> DMatrix<Complex64> {
        let n = self.n;
        DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                Complex64::new(n as f64, 0.0)
            } else {
                Complex64::new(-1.0, 0.0)
            }
        })
    }

    /// Draw a point with decreasing real parts separated by at least 0.4
    /// and positive real parts, keeping every log on the principal branch.
    pub fn sample_point(&self, rng: &mut impl Rng) -> Vec<Complex64> {
        let n = self.n;
        let mut z = vec![Complex64::new(0.0, 0.0); n];
        let mut re = rng.gen_range(0.4..1.6);
        for k in (0..n).rev() {
            let im = rng.gen_range(-0.4..0.4);
            z[k] = Complex64::new(re, im);
            re += rng.gen_range(0.4..1.6);
        }
        z
    }

    /// Generalized associativity at seeded sample points:
    /// [F_i][F_E]^{-1}[F_j] must be symmetric in (i,j).
    pub fn gen_wdvv_check(
        &self,
        samples: usize,
        tol: f64,
        rng: &mut impl Rng,
    ) -> Result<CheckReport> {
        let points: Vec<Vec<Complex64>> = (0..samples).map(|_| self.sample_point(rng)).collect();
        let residuals: Vec<f64> = points
            .par_iter()
            .map(|z| {
                let mats = self.third_derivative_mats(z)?;
                let fe = self.f_e_matrix(z)?;
                gen_wdvv_residual(&mats, &fe)
            })
            .collect::<Result<_>>()?;
        let worst = residuals.into_iter().fold(0.0, f64::max);
        Ok(CheckReport::from_residual("gen-wdvv", worst, tol, samples))
    }

    /// Constancy of [F_E]: max deviation from (n+1) I - AllOnes over
    /// seeded sample points.
    pub fn euler_metric_check(
        &self,
        samples: usize,
        tol: f64,
        rng: &mut impl Rng,
    ) -> Result<CheckReport> {
        let expected = self.expected_f_e();
        let points: Vec<Vec<Complex64>> = (0..samples).map(|_| self.sample_point(rng)).collect();
        let residuals: Vec<f64> = points
            .par_iter()
            .map(|z| {
                let fe = self.f_e_matrix(z)?;
                Ok((&fe - &expected)
                    .iter()
                    .map(|e| e.norm())
                    .fold(0.0, f64::max))
            })
            .collect::<Result<_>>()?;
        let worst = residuals.into_iter().fold(0.0, f64::max);
        Ok(CheckReport::from_residual(
            "euler-metric-constancy",
            worst,
            tol,
            samples,
        ))
    }

    /// Iterated central difference of the prepotential along `dirs`.
    pub fn fd_derivative(&self, z: &[Complex64], dirs: &[usize], step: f64) -> Result<Complex64> {
        match dirs.split_last() {
            None => self.prepotential(z),
            Some((&d, rest)) => {
                let mut zp = z.to_vec();
                zp[d] += Complex64::new(step, 0.0);
                let mut zm = z.to_vec();
                zm[d] -= Complex64::new(step, 0.0);
                let num =
                    self.fd_derivative(&zp, rest, step)? - self.fd_derivative(&zm, rest, step)?;
                Ok(num / Complex64::new(2.0 * step, 0.0))
            }
        }
    }

    /// Central difference of the analytic Hessian along one direction.
    fn fd_of_hessian(&self, z: &[Complex64], dir: usize, step: f64) -> Result<DMatrix<Complex64>> {
        let mut zp = z.to_vec();
        zp[dir] += Complex64::new(step, 0.0);
        let mut zm = z.to_vec();
        zm[dir] -= Complex64::new(step, 0.0);
        let num = self.hessian_matrix(&zp)? - self.hessian_matrix(&zm)?;
        Ok(num.map(|e| e / Complex64::new(2.0 * step, 0.0)))
    }

    /// Closed-form third derivatives against finite differences of the
    /// prepotential. The comparison is staged through the analytic Hessian
    /// (values -> second differences -> Hessian -> first differences ->
    /// third derivatives) because a direct third difference of values is
    /// dominated by rounding noise at any useful step size. Both stages
    /// are verified: the Hessian against second differences of F at a
    /// coarser step, the third derivatives against first differences of
    /// the Hessian at `step`.
    pub fn fd_oracle_check(
        &self,
        samples: usize,
        step: f64,
        tol: f64,
        rng: &mut impl Rng,
    ) -> Result<CheckReport> {
        let n = self.n;
        let hessian_step = step.max(1e-5).sqrt().min(1e-4).max(step);
        let mut worst: f64 = 0.0;
        for _ in 0..samples {
            let z = self.sample_point(rng);
            // Stage 1: analytic Hessian vs second differences of F.
            let hess = self.hessian_matrix(&z)?;
            for i in 0..n {
                for j in i..n {
                    let fd = self.fd_derivative(&z, &[i, j], hessian_step)?;
                    let scale = hess[(i, j)].norm().max(1.0);
                    worst = worst.max((fd - hess[(i, j)]).norm() / scale);
                }
            }
            // Stage 2: closed-form third derivatives vs differences of the
            // Hessian.
            let f3 = self.third_derivative_mats(&z)?;
            for k in 0..n {
                let dh = self.fd_of_hessian(&z, k, step)?;
                for i in 0..n {
                    for j in 0..n {
                        let scale = f3[i][(j, k)].norm().max(1.0);
                        worst = worst.max((dh[(i, j)] - f3[i][(j, k)]).norm() / scale);
                    }
                }
            }
        }
        Ok(
            CheckReport::from_residual("third-derivative-fd", worst, tol, samples)
                .with_note("fd-step", format!("{step:e}"))
                .with_note("route", "staged-through-hessian"),
        )
    }

    /// Scaling covariance F_ijk(lambda z) = lambda^{-1} F_ijk(z) for
    /// random complex lambda.
    pub fn homogeneity_check(
        &self,
        samples: usize,
        tol: f64,
        rng: &mut impl Rng,
    ) -> Result<CheckReport> {
        let n = self.n;
        let mut worst: f64 = 0.0;
        for _ in 0..samples {
            let z = self.sample_point(rng);
            let lam = Complex64::new(rng.gen_range(0.5..2.0), rng.gen_range(-0.5..0.5));
            let zs: Vec<Complex64> = z.iter().map(|w| w * lam).collect();
            let base = self.third_derivative_mats(&z)?;
            let scaled = self.third_derivative_mats(&zs)?;
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        let want = base[i][(j, k)] / lam;
                        let scale = want.norm().max(1.0);
                        worst = worst.max((scaled[i][(j, k)] - want).norm() / scale);
                    }
                }
            }
        }
        Ok(CheckReport::from_residual(
            "scaling-covariance",
            worst,
            tol,
            samples,
        ))
    }
}

impl PrepotentialProvider for TodaModel {
    fn dim(&self) -> usize {
        self.n
    }

    fn domain_ok(&self, z: &[Complex64]) -> bool {
        self.check_domain(z).is_ok()
    }

    fn third_derivatives(&self, z: &[Complex64]) -> Result<Vec<DMatrix<Complex64>>> {
        self.third_derivative_mats(z)
    }

    fn hessian(&self, z: &[Complex64]) -> Result<Option<DMatrix<Complex64>>> {
        Ok(Some(self.hessian_matrix(z)?))
    }
}

/// Max commutator entry of M_i G^{-1} M_j - M_j G^{-1} M_i over all pairs.
pub fn gen_wdvv_residual(mats: &[DMatrix<Complex64>], metric: &DMatrix<Complex64>) -> Result<f64> {
    let inv = guarded_inverse(metric, "metric")?;
    let n = mats.len();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        let left = &mats[i] * &inv;
        for j in i + 1..n {
            let lhs = &left * &mats[j];
            let rhs = &mats[j] * &inv * &mats[i];
            let dev = (&lhs - &rhs).iter().map(|e| e.norm()).fold(0.0, f64::max);
            worst = worst.max(dev);
        }
    }
    Ok(worst)
}

/// The rational spectral curve of a base point: the monic polynomial
/// x^{n+1} + sum_k b_k x^{k-1}, its n+1 roots (summing to zero), and its n
/// critical points.
#[derive(Debug, Clone)]
pub struct SpectralCurveData {
    pub b: ComplexVector,
    pub roots: ComplexVector,
    pub crit: ComplexVector,
}

/// Ascending x-coefficients of the curve polynomial at a base point.
fn curve_coeffs(b: &[Complex64]) -> Vec<Complex64> {
    let n = b.len();
    let mut coeffs = b.to_vec();
    coeffs.push(Complex64::new(0.0, 0.0)); // no x^n term
    coeffs.push(Complex64::new(1.0, 0.0));
    let _ = n;
    coeffs
}

fn horner(coeffs: &[Complex64], x: Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for c in coeffs.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

fn derivative_coeffs(coeffs: &[Complex64]) -> Vec<Complex64> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(j, c)| c * Complex64::new(j as f64, 0.0))
        .collect()
}

/// Roots and critical points of the curve at b, with discriminant guards:
/// distinct roots, distinct simple critical points, no critical value near
/// zero, no vanishing root, and the trace-free root-sum invariant.
pub fn spectral_curve(b: &[Complex64]) -> Result<SpectralCurveData> {
    let n = b.len();
    if n == 0 {
        return Err(Error::Config(
            "base point must have at least one entry".into(),
        ));
    }
    let coeffs = curve_coeffs(b);
    let cfg = RootConfig::default();
    let roots = roots_from_coeffs(&coeffs, &cfg)?;
    let scale = roots.iter().map(|r| r.norm()).fold(1.0, f64::max);
    let sum: Complex64 = roots.iter().sum();
    if sum.norm() > 1e-8 * scale {
        return Err(Error::Degenerate(format!(
            "root sum {:.3e} deviates from zero",
            sum.norm()
        )));
    }
    for (i, r) in roots.iter().enumerate() {
        if r.norm() < 1e-8 * scale {
            return Err(Error::DomainViolation(format!(
                "root {} vanishes; the chain coordinates must be nonzero",
                i + 1
            )));
        }
        for s in roots.iter().skip(i + 1) {
            if (r - s).norm() < 1e-6 * scale {
                return Err(Error::Degenerate(
                    "curve has nearly coincident roots".into(),
                ));
            }
        }
    }
    let dcoeffs = derivative_coeffs(&coeffs);
    let crit = roots_from_coeffs(&dcoeffs, &cfg)?;
    for (i, c) in crit.iter().enumerate() {
        if horner(&coeffs, *c).norm() < 1e-8 {
            return Err(Error::Degenerate(
                "critical value vanishes; base point is on the discriminant".into(),
            ));
        }
        for d in crit.iter().skip(i + 1) {
            if (c - d).norm() < 1e-6 * scale {
                return Err(Error::Degenerate(
                    "curve has nearly coincident critical points".into(),
                ));
            }
        }
    }
    Ok(SpectralCurveData {
        b: ComplexVector::new(b.to_vec())?,
        roots: ComplexVector::new(roots)?,
        crit: ComplexVector::new(crit)?,
    })
}

/// The residue 3-tensor over the trace-free root directions
/// e_i = d/dx_i - d/dx_{n+1}:
///
///   T(e_i, e_j, e_k) = sum over critical points x_c of
///     (e_i S)(e_j S)(e_k S) / (S^2 S'')  evaluated at x_c,
///
/// where d S/d x_m = -prod_{l != m}(x - x_l). Returned as n matrices
/// out[i][(j,k)].
pub fn residue_tensor(curve: &SpectralCurveData) -> Result<Vec<DMatrix<Complex64>>> {
    let roots = curve.roots.as_slice();
    let n = roots.len() - 1;
    let coeffs = curve_coeffs(curve.b.as_slice());
    let d2 = derivative_coeffs(&derivative_coeffs(&coeffs));
    let mut out = vec![DMatrix::from_element(n, n, Complex64::new(0.0, 0.0)); n];
    for &xc in curve.crit.iter() {
        let s_val = horner(&coeffs, xc);
        if s_val.norm() < 1e-8 {
            return Err(Error::Degenerate("critical value vanishes".into()));
        }
        let hess = horner(&d2, xc);
        if hess.norm() < 1e-10 {
            return Err(Error::Degenerate("critical point is not simple".into()));
        }
        // dS/dx_m at x_c for every root index.
        let dm: Vec<Complex64> = (0..=n)
            .map(|m| {
                let mut p = Complex64::new(1.0, 0.0);
                for (l, r) in roots.iter().enumerate() {
                    if l != m {
                        p *= xc - r;
                    }
                }
                -p
            })
            .collect();
        let e: Vec<Complex64> = (0..n).map(|i| dm[i] - dm[n]).collect();
        let w = Complex64::new(1.0, 0.0) / (s_val * s_val * hess);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    out[i][(j, k)] += e[i] * e[j] * e[k] * w;
                }
            }
        }
    }
    Ok(out)
}

/// Largest deviation of the residue tensor from full symmetry.
pub fn tensor_asymmetry(t: &[DMatrix<Complex64>]) -> f64 {
    let n = t.len();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let base = t[i][(j, k)];
                for &(a, b, c) in &[(i, k, j), (j, i, k), (j, k, i), (k, i, j), (k, j, i)] {
                    worst = worst.max((t[a][(b, c)] - base).norm());
                }
            }
        }
    }
    worst
}

/// Generalized associativity of the residue tensor, with the metric given
/// by contracting the tensor against the Euler direction (the root values
/// themselves).
pub fn residue_gen_wdvv_residual(curve: &SpectralCurveData) -> Result<f64> {
    let t = residue_tensor(curve)?;
    let n = t.len();
    let mut metric = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
    for (i, ti) in t.iter().enumerate() {
        metric += ti.map(|e| e * curve.roots[i]);
    }
    gen_wdvv_residual(&t, &metric)
}

/// Draw a complex base point whose curve passes every discriminant guard.
pub fn sample_base_point(
    n: usize,
    rng: &mut impl Rng,
) -> Result<(Vec<Complex64>, SpectralCurveData)> {
    for _ in 0..500 {
        let b: Vec<Complex64> = (0..n)
            .map(|_| Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)))
            .collect();
        if b.iter().all(|c| c.norm() < 0.2) {
            continue;
        }
        match spectral_curve(&b) {
            Ok(curve) => return Ok((b, curve)),
            Err(Error::Degenerate(_)) | Err(Error::DomainViolation(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::Degenerate(
        "could not sample a base point off the discriminant".into(),
    ))
}

/// Almost duality bridge: the polynomial intersection form at t(b), pulled
/// back to the trace-free root coordinates z_i = x_i, against the constant
/// Toda matrix [F_E] at z = the first n roots. Reports the best-fit
/// proportionality constant and the relative residual; the verdict is
/// informational because the prepotential normalization is not canonical.
pub fn duality_check(frob: &FrobeniusData, b: &[Complex64], _tol: f64) -> Result<CheckReport> {
    let n = frob.rank();
    if b.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: b.len(),
        });
    }
    let curve = spectral_curve(b)?;
    let roots = curve.roots.as_slice();
    let z: Vec<Complex64> = roots[..n].to_vec();

    let model = TodaModel::new(n)?;
    let fe = model.f_e_matrix(&z)?;
    let fe_dev = (&fe - &model.expected_f_e())
        .iter()
        .map(|e| e.norm())
        .fold(0.0, f64::max);

    // Saito side: covariant intersection form at t(b).
    let tb: Vec<Complex64> = frob
        .flat
        .t_of_b
        .iter()
        .map(|p| p.eval(b))
        .collect::<Result<_>>()?;
    let g_contra = frob.intersection_form_at(&tb)?;
    let g_cov = guarded_inverse(&g_contra, "intersection form")?;

    // Jacobian dt/dz through b: dt_k/db_a at b, then db_a/dz_i from
    // dS/dx_m = -prod_{l != m}(x - x_l) (coefficient-wise), restricted to
    // the trace-free directions.
    let b_names: Vec<String> = (1..=n).map(|a| format!("b{a}")).collect();
    let mut dt_db = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
    for k in 0..n {
        for a in 0..n {
            dt_db[(k, a)] = frob.flat.t_of_b[k].diff(&b_names[a])?.eval(b)?;
        }
    }
    // subproduct_coeffs[m] = ascending coefficients of prod_{l != m}(x - x_l).
    let mut db_dz = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
    let sub_coeffs: Vec<Vec<Complex64>> = (0..=n)
        .map(|m| {
            let mut c = vec![Complex64::new(1.0, 0.0)];
            for (l, r) in roots.iter().enumerate() {
                if l == m {
                    continue;
                }
                let mut next = vec![Complex64::new(0.0, 0.0); c.len() + 1];
                for (d, &cd) in c.iter().enumerate() {
                    next[d + 1] += cd;
                    next[d] -= cd * r;
                }
                c = next;
            }
            c
        })
        .collect();
    for a in 0..n {
        for i in 0..n {
            // db_a/dx_m = -(coefficient of x^{a-1}); e_i subtracts m = n.
            db_dz[(a, i)] = -sub_coeffs[i][a] + sub_coeffs[n][a];
        }
    }
    let jac = &dt_db * &db_dz;
    let pulled = jac.transpose() * g_cov * jac;

    // Best-fit constant: pulled ~ c * fe in the Frobenius inner product.
    let mut num = Complex64::new(0.0, 0.0);
    let mut den = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            num += fe[(i, j)].conj() * pulled[(i, j)];
            den += fe[(i, j)].conj() * fe[(i, j)];
        }
    }
    if den.norm() == 0.0 {
        return Err(Error::Singular("reference matrix vanishes".into()));
    }
    let c = num / den;
    let scale = pulled.iter().map(|e| e.norm()).fold(0.0, f64::max).max(1.0);
    let resid = (&pulled - &fe.map(|e| e * c))
        .iter()
        .map(|e| e.norm())
        .fold(0.0, f64::max)
        / scale;

    Ok(CheckReport::info("almost-duality")
        .with_samples(1)
        .with_note("constant-re", fmt_f64(c.re))
        .with_note("constant-im", fmt_f64(c.im))
        .with_note("relative-residual", fmt_f64(resid))
        .with_note("euler-metric-deviation", fmt_f64(fe_dev)))
}

/// The fitted duality constant at a base point, for cross-point constancy
/// studies.
pub fn duality_constant(frob: &FrobeniusData, b: &[Complex64]) -> Result<Complex64> {
    let report = duality_check(frob, b, 0.0)?;
    let re: f64 = report.metadata["constant-re"]
        .parse()
        .map_err(|_| Error::PipelineBug("unparseable duality constant".into()))?;
    let im: f64 = report.metadata["constant-im"]
        .parse()
        .map_err(|_| Error::PipelineBug("unparseable duality constant".into()))?;
    Ok(Complex64::new(re, im))
}
