//! Numeric geometry checks over any prepotential family given by its third
//! derivatives: rescaled multiplications, associativity, the weak Frobenius
//! (F-manifold) identity, metric flatness by finite-difference curvature,
//! Kähler positivity diagnostics, and the rescaling composition law.
//!
//! A family enters through [`PrepotentialProvider`], which serves the Hesse
//! matrices [F_i] of the first derivatives at a point. For a rescaling
//! vector V the metric is F_V = sum_k V_k [F_k] and the multiplication
//! tensor is carried by the structure matrices C_i = [F_i] F_V^{-1}.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::report::{fmt_f64, CheckReport};

/// Relative singular-value floor below which a metric counts as singular.
const SV_RATIO_FLOOR: f64 = 1e-10;

/// A family of prepotentials presented numerically: the third-derivative
/// matrices at a point, and optionally the Hessian for metric diagnostics.
pub trait PrepotentialProvider {
    fn dim(&self) -> usize;

    /// Whether a point is inside the domain of the family.
    fn domain_ok(&self, z: &[Complex64]) -> bool;

    /// out[i] is the Hesse matrix of dF/dz_i, so out[i][(j,k)] = F_ijk.
    fn third_derivatives(&self, z: &[Complex64]) -> Result<Vec<DMatrix<Complex64>>>;

    /// The Hessian [F_jk], when the family can provide second derivatives.
    fn hessian(&self, _z: &[Complex64]) -> Result<Option<DMatrix<Complex64>>> {
        Ok(None)
    }
}

fn check_point(p: &dyn PrepotentialProvider, z: &[Complex64]) -> Result<()> {
    if z.len() != p.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            got: z.len(),
        });
    }
    if !p.domain_ok(z) {
        return Err(Error::DomainViolation(
            "sample point is outside the model domain".into(),
        ));
    }
    Ok(())
}

/// Invert with a singular-value guard: the smallest singular value must
/// stay above `SV_RATIO_FLOOR` times the largest.
pub fn guarded_inverse(m: &DMatrix<Complex64>, what: &str) -> Result<DMatrix<Complex64>> {
    let svd = m.clone().svd(false, false);
    let max = svd.singular_values.max();
    let min = svd.singular_values.min();
    // NaN singular values must land in the degenerate branch too, so test
    // the well-conditioned case and negate.
    let well_conditioned = max > 0.0 && min > SV_RATIO_FLOOR * max;
    if !well_conditioned {
        return Err(Error::Degenerate(format!(
            "{what} is numerically singular (sv ratio {:.3e})",
            if max > 0.0 { min / max } else { 0.0 }
        )));
    }
    m.clone()
        .try_inverse()
        .ok_or_else(|| Error::Degenerate(format!("{what} could not be inverted")))
}

/// The rescaling metric F_V = sum_k V_k [F_k] at a point.
pub fn metric_v(
    p: &dyn PrepotentialProvider,
    z: &[Complex64],
    v: &[Complex64],
) -> Result<DMatrix<Complex64>> {
    check_point(p, z)?;
    let n = p.dim();
    if v.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: v.len(),
        });
    }
    let f3 = p.third_derivatives(z)?;
    let mut m = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
    for (k, fk) in f3.iter().enumerate() {
        m += fk.map(|e| e * v[k]);
    }
    Ok(m)
}

/// Structure matrices C_i = [F_i] F_V^{-1} of the V-rescaled multiplication.
pub fn structure_matrices(
    p: &dyn PrepotentialProvider,
    z: &[Complex64],
    v: &[Complex64],
) -> Result<Vec<DMatrix<Complex64>>> {
    check_point(p, z)?;
    let f3 = p.third_derivatives(z)?;
    let fv = metric_v(p, z, v)?;
    let a = guarded_inverse(&fv, "rescaling metric")?;
    Ok(f3.iter().map(|fi| fi * &a).collect())
}

/// Tangent product X *_V Y = F_V^{-1} F_X Y, where F_X = sum_i X_i [F_i].
pub fn multiply(
    p: &dyn PrepotentialProvider,
    z: &[Complex64],
    v: &[Complex64],
    x: &[Complex64],
    y: &[Complex64],
) -> Result<DVector<Complex64>> {
    check_point(p, z)?;
    let n = p.dim();
    if x.len() != n || y.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: x.len().min(y.len()),
        });
    }
    let f3 = p.third_derivatives(z)?;
    let fv = metric_v(p, z, v)?;
    let a = guarded_inverse(&fv, "rescaling metric")?;
    let mut fx = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
    for (i, fi) in f3.iter().enumerate() {
        fx += fi.map(|e| e * x[i]);
    }
    let yv = DVector::from_column_slice(y);
    Ok(&a * (&fx * yv))
}

fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|e| e.norm()).fold(0.0, f64::max)
}

/// V must be the unit of its own multiplication: sum_k V_k C_k = I.
pub fn unit_law_check(
    p: &dyn PrepotentialProvider,
    points: &[Vec<Complex64>],
    v: &[Complex64],
    tol: f64,
) -> Result<CheckReport> {
    let n = p.dim();
    let identity = DMatrix::<Complex64>::identity(n, n);
    let mut worst: f64 = 0.0;
    for z in points {
        let c = structure_matrices(p, z, v)?;
        let mut acc = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
        for (k, ck) in c.iter().enumerate() {
            acc += ck.map(|e| e * v[k]);
        }
        worst = worst.max(max_abs(&(&acc - &identity)));
    }
    Ok(CheckReport::from_residual(
        "unit-law",
        worst,
        tol,
        points.len(),
    ))
}

/// Associativity of the V-rescaled multiplication: all structure matrices
/// must commute. Equivalent to the generalized associativity equations
/// [F_i] F_V^{-1} [F_j] = [F_j] F_V^{-1} [F_i].
pub fn associativity_check(
    p: &dyn PrepotentialProvider,
    points: &[Vec<Complex64>],
    v: &[Complex64],
    tol: f64,
) -> Result<CheckReport> {
    let n = p.dim();
    let mut worst: f64 = 0.0;
    for z in points {
        let c = structure_matrices(p, z, v)?;
        for i in 0..n {
            for j in i + 1..n {
                let comm = &c[i] * &c[j] - &c[j] * &c[i];
                worst = worst.max(max_abs(&comm));
            }
        }
    }
    Ok(CheckReport::from_residual(
        "associativity",
        worst,
        tol,
        points.len(),
    ))
}

/// A position-dependent rescaling vector, re-evaluated wherever the
/// finite-difference stencils probe the manifold. Constant V is the
/// special case of a closure ignoring its argument.
pub type VField<'a> = &'a dyn Fn(&[Complex64]) -> Vec<Complex64>;

/// Structure matrices at z displaced by +/- step along every coordinate,
/// plus the matrices at z itself. The rescaling vector is re-evaluated at
/// each displaced point.
#[allow(clippy::type_complexity)]
fn displaced_structure(
    p: &dyn PrepotentialProvider,
    z: &[Complex64],
    v_field: VField,
    step: f64,
) -> Result<(
    Vec<DMatrix<Complex64>>,
    Vec<Vec<DMatrix<Complex64>>>,
    Vec<Vec<DMatrix<Complex64>>>,
)> {
    let n = p.dim();
    let c0 = structure_matrices(p, z, &v_field(z))?;
    let mut plus = Vec::with_capacity(n);
    let mut minus = Vec::with_capacity(n);
    for s in 0..n {
        let mut zp = z.to_vec();
        zp[s] += Complex64::new(step, 0.0);
        let mut zm = z.to_vec();
        zm[s] -= Complex64::new(step, 0.0);
        plus.push(structure_matrices(p, &zp, &v_field(&zp))?);
        minus.push(structure_matrices(p, &zm, &v_field(&zm))?);
    }
    Ok((c0, plus, minus))
}

/// The weak Frobenius (F-manifold) identity, evaluated through its
/// derivative reduction: for all coordinate directions i, j, l, m the
/// matrix entries of
///
///   d_l (C_i C_m - C_m C_i)_{j.} + d_i (C_j C_l - C_l C_j)_{m.}
///     + (C_j d_l C_i)_{m.} - (C_m d_i C_l)_{j.}
///
/// must vanish. Derivatives are central finite differences of step `step`.
pub fn fmanifold_identity_check(
    p: &dyn PrepotentialProvider,
    points: &[Vec<Complex64>],
    v: &[Complex64],
    step: f64,
    tol: f64,
) -> Result<CheckReport> {
    let constant = |_: &[Complex64]| v.to_vec();
    fmanifold_identity_field_check(p, points, &constant, step, tol)
}

/// Field-aware form of [`fmanifold_identity_check`]: the rescaling vector
/// is a function of position, so its variation enters the product-field
/// derivatives. The identity is a theorem of the underlying geometry
/// exactly when the rescaling metric F_V is position-independent and the
/// generalized associativity equations hold; for other choices of V a
/// failure is a genuine property of that multiplication, not noise.
pub fn fmanifold_identity_field_check(
    p: &dyn PrepotentialProvider,
    points: &[Vec<Complex64>],
    v_field: VField,
    step: f64,
    tol: f64,
) -> Result<CheckReport> {
    let n = p.dim();
    let inv2h = Complex64::new(1.0 / (2.0 * step), 0.0);
    let mut worst: f64 = 0.0;
    for z in points {
        let (c0, plus, minus) = displaced_structure(p, z, v_field, step)?;
        // dc[s][i] = d C_i / d z_s
        let dc: Vec<Vec<DMatrix<Complex64>>> = (0..n)
            .map(|s| {
                (0..n)
                    .map(|i| (&plus[s][i] - &minus[s][i]).map(|e| e * inv2h))
                    .collect()
            })
            .collect();
        // dcomm[s][a][b] = d (C_a C_b - C_b C_a) / d z_s
        let mut dcomm =
            vec![vec![vec![DMatrix::from_element(n, n, Complex64::new(0.0, 0.0)); n]; n]; n];
        for s in 0..n {
            for a in 0..n {
                for b in a + 1..n {
                    let cp = &plus[s][a] * &plus[s][b] - &plus[s][b] * &plus[s][a];
                    let cm = &minus[s][a] * &minus[s][b] - &minus[s][b] * &minus[s][a];
                    let d = (cp - cm).map(|e| e * inv2h);
                    dcomm[s][b][a] = d.map(|e| -e);
                    dcomm[s][a][b] = d;
                }
            }
        }
        // prod[a][s][b] = C_a * d C_b / d z_s
        let prod: Vec<Vec<Vec<DMatrix<Complex64>>>> = (0..n)
            .map(|a| {
                (0..n)
                    .map(|s| (0..n).map(|b| &c0[a] * &dc[s][b]).collect())
                    .collect()
            })
            .collect();
        for i in 0..n {
            for j in 0..n {
                for l in 0..n {
                    for m in 0..n {
                        for col in 0..n {
                            let r = dcomm[l][i][m][(j, col)]
                                + dcomm[i][j][l][(m, col)]
                                + prod[j][l][i][(m, col)]
                                - prod[m][i][l][(j, col)];
                            worst = worst.max(r.norm());
                        }
                    }
                }
            }
        }
    }
    Ok(
        CheckReport::from_residual("fmanifold-identity", worst, tol, points.len())
            .with_note("fd-step", format!("{step:e}")),
    )
}

/// Christoffel symbols of a metric field by central differences:
/// out[k][(i,j)] = Gamma^k_ij at z.
pub fn christoffel<F>(metric: &F, z: &[Complex64], step: f64) -> Result<Vec<DMatrix<Complex64>>>
where
    F: Fn(&[Complex64]) -> Result<DMatrix<Complex64>> + ?Sized,
{
    let n = z.len();
    let g0 = metric(z)?;
    if g0.nrows() != n || g0.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: g0.nrows(),
        });
    }
    let ginv = guarded_inverse(&g0, "metric")?;
    let inv2h = Complex64::new(1.0 / (2.0 * step), 0.0);
    let mut dg = Vec::with_capacity(n);
    for s in 0..n {
        let mut zp = z.to_vec();
        zp[s] += Complex64::new(step, 0.0);
        let mut zm = z.to_vec();
        zm[s] -= Complex64::new(step, 0.0);
        dg.push((metric(&zp)? - metric(&zm)?).map(|e| e * inv2h));
    }
    let half = Complex64::new(0.5, 0.0);
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let mut gk = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
        for i in 0..n {
            for j in 0..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for l in 0..n {
                    acc += ginv[(k, l)] * (dg[i][(l, j)] + dg[j][(i, l)] - dg[l][(i, j)]);
                }
                gk[(i, j)] = half * acc;
            }
        }
        out.push(gk);
    }
    Ok(out)
}

/// Riemann tensor of a metric field at z, with all derivatives taken by
/// central differences of step `step`: out[l][k][(i,j)] = R^l_kij.
fn riemann_tensor<F>(metric: &F, z: &[Complex64], step: f64) -> Result<Vec<Vec<DMatrix<Complex64>>>>
where
    F: Fn(&[Complex64]) -> Result<DMatrix<Complex64>> + ?Sized,
{
    let n = z.len();
    let gam = christoffel(metric, z, step)?;
    let inv2h = Complex64::new(1.0 / (2.0 * step), 0.0);
    let mut dgam: Vec<Vec<DMatrix<Complex64>>> = Vec::with_capacity(n);
    for s in 0..n {
        let mut zp = z.to_vec();
        zp[s] += Complex64::new(step, 0.0);
        let mut zm = z.to_vec();
        zm[s] -= Complex64::new(step, 0.0);
        let gp = christoffel(metric, &zp, step)?;
        let gm = christoffel(metric, &zm, step)?;
        dgam.push(
            (0..n)
                .map(|k| (&gp[k] - &gm[k]).map(|e| e * inv2h))
                .collect(),
        );
    }
    // R^l_kij = d_i Gamma^l_jk - d_j Gamma^l_ik
    //           + sum_m (Gamma^l_im Gamma^m_jk - Gamma^l_jm Gamma^m_ik)
    let mut out = vec![vec![DMatrix::from_element(n, n, Complex64::new(0.0, 0.0)); n]; n];
    for l in 0..n {
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let mut r = dgam[i][l][(j, k)] - dgam[j][l][(i, k)];
                    for m in 0..n {
                        r += gam[l][(i, m)] * gam[m][(j, k)] - gam[l][(j, m)] * gam[m][(i, k)];
                    }
                    out[l][k][(i, j)] = r;
                }
            }
        }
    }
    Ok(out)
}

/// Largest absolute entry of the Riemann tensor of a metric field at z,
/// with all derivatives taken by central differences of step `step`.
pub fn curvature_max_abs<F>(metric: &F, z: &[Complex64], step: f64) -> Result<f64>
where
    F: Fn(&[Complex64]) -> Result<DMatrix<Complex64>> + ?Sized,
{
    let r = riemann_tensor(metric, z, step)?;
    Ok(r.iter()
        .flat_map(|row| row.iter())
        .map(max_abs)
        .fold(0.0, f64::max))
}

/// Richardson-extrapolated curvature: combines the Riemann tensors at
/// steps h and h/2 entrywise, cancelling the leading O(h^2) error of the
/// central differences.
pub fn curvature_max_abs_richardson<F>(metric: &F, z: &[Complex64], step: f64) -> Result<f64>
where
    F: Fn(&[Complex64]) -> Result<DMatrix<Complex64>> + ?Sized,
{
    let coarse = riemann_tensor(metric, z, step)?;
    let fine = riemann_tensor(metric, z, step / 2.0)?;
    let third = Complex64::new(1.0 / 3.0, 0.0);
    let mut worst: f64 = 0.0;
    for (cl, fl) in coarse.iter().zip(&fine) {
        for (ck, fk) in cl.iter().zip(fl) {
            let extrap = (fk.map(|e| e * 4.0) - ck).map(|e| e * third);
            worst = worst.max(max_abs(&extrap));
        }
    }
    Ok(worst)
}

/// Flatness of the rescaling metric F_V, reported in two tiers. Tier (a)
/// measures coordinate-constancy: the largest central-difference derivative
/// |d g_ij / d z_k| over the samples. When that already vanishes (below
/// min(tol, 1e-8)) the connection is zero in these coordinates, the metric
/// is flat, and tier (b) is skipped. Otherwise tier (b) assembles the
/// Riemann tensor by nested finite differences at every sample and the
/// verdict comes from its largest entry. Both tier residuals are recorded.
pub fn flatness_check(
    p: &dyn PrepotentialProvider,
    points: &[Vec<Complex64>],
    v: &[Complex64],
    step: f64,
    tol: f64,
) -> Result<CheckReport> {
    let constant = |_: &[Complex64]| v.to_vec();
    flatness_field_check(p, points, &constant, step, tol)
}

/// Field-aware form of [`flatness_check`]: the metric under test is
/// z -> F_{V(z)}(z), with the rescaling vector re-evaluated inside every
/// stencil. With the position field V(z) = z on a conic family, tier (a)
/// detects exact constancy; a frozen vector would instead see the
/// variation of the individual Hessian contractions.
pub fn flatness_field_check(
    p: &dyn PrepotentialProvider,
    points: &[Vec<Complex64>],
    v_field: VField,
    step: f64,
    tol: f64,
) -> Result<CheckReport> {
    if points.is_empty() {
        return Err(Error::Config(
            "flatness check needs at least one point".into(),
        ));
    }
    let metric = |z: &[Complex64]| metric_v(p, z, &v_field(z));
    let inv2h = Complex64::new(1.0 / (2.0 * step), 0.0);
    let mut tier_a: f64 = 0.0;
    for z in points {
        for k in 0..z.len() {
            let mut zp = z.to_vec();
            zp[k] += Complex64::new(step, 0.0);
            let mut zm = z.to_vec();
            zm[k] -= Complex64::new(step, 0.0);
            let d = (metric(&zp)? - metric(&zm)?).map(|e| e * inv2h);
            tier_a = tier_a.max(max_abs(&d));
        }
    }
    if tier_a <= tol.min(1e-8) {
        return Ok(
            CheckReport::from_residual("metric-flatness", 0.0, tol, points.len())
                .with_note("route", "constant-metric")
                .with_note("constancy-residual", fmt_f64(tier_a))
                .with_note("curvature-residual", "skipped: metric constant"),
        );
    }
    let mut tier_b: f64 = 0.0;
    for z in points {
        tier_b = tier_b.max(curvature_max_abs(&metric, z, step)?);
    }
    Ok(
        CheckReport::from_residual("metric-flatness", tier_b, tol, points.len())
            .with_note("route", "finite-difference-curvature")
            .with_note("constancy-residual", fmt_f64(tier_a))
            .with_note("curvature-residual", fmt_f64(tier_b)),
    )
}

/// Smallest eigenvalue of the imaginary part of the Hessian [F_jk] at z;
/// positive values witness a Kähler metric at the point.
pub fn kahler_min_eigenvalue(p: &dyn PrepotentialProvider, z: &[Complex64]) -> Result<f64> {
    check_point(p, z)?;
    let hess = p
        .hessian(z)?
        .ok_or_else(|| Error::Degenerate("family does not expose a Hessian".into()))?;
    let im = hess.map(|e| e.im);
    let sym = (&im + &im.transpose()).map(|e| 0.5 * e);
    let eig = sym.symmetric_eigen();
    Ok(eig
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min))
}

/// Informational report on Kähler positivity over a set of points: the
/// fraction of samples where Im [F_jk] is positive definite, and the
/// smallest eigenvalue seen anywhere. Positivity is region-dependent, so
/// this never hard-fails.
pub fn kahler_positivity_report(
    p: &dyn PrepotentialProvider,
    points: &[Vec<Complex64>],
) -> Result<CheckReport> {
    let mut min_eig = f64::INFINITY;
    let mut positive = 0usize;
    for z in points {
        let e = kahler_min_eigenvalue(p, z)?;
        if e > 0.0 {
            positive += 1;
        }
        min_eig = min_eig.min(e);
    }
    let frac = positive as f64 / points.len().max(1) as f64;
    Ok(CheckReport::info("kahler-positivity")
        .with_samples(points.len())
        .with_note("min-imag-hessian-eigenvalue", fmt_f64(min_eig))
        .with_note("positive-fraction", fmt_f64(frac))
        .with_note("positive", if min_eig > 0.0 { "true" } else { "false" }))
}

/// The multiplication and metric reproduce the defining tensor: the
/// reconstruction (e_i, e_j *_V e_k)_V must return F_ijk, and random
/// triples satisfy the Frobenius compatibility
/// (X *_V Y, Z)_V = (X, Y *_V Z)_V.
pub fn defmul_check(
    p: &dyn PrepotentialProvider,
    points: &[Vec<Complex64>],
    v: &[Complex64],
    rng: &mut impl Rng,
    tol: f64,
) -> Result<CheckReport> {
    let n = p.dim();
    let mut worst: f64 = 0.0;
    for z in points {
        check_point(p, z)?;
        let f3 = p.third_derivatives(z)?;
        let fv = metric_v(p, z, v)?;
        let a = guarded_inverse(&fv, "rescaling metric")?;
        // Reconstruction on basis triples.
        for j in 0..n {
            for k in 0..n {
                let u = &a * f3[j].column(k);
                let xi = &fv * &u;
                for i in 0..n {
                    worst = worst.max((xi[i] - f3[j][(i, k)]).norm());
                }
            }
        }
        // Frobenius compatibility on random triples.
        let field = |u: &DVector<Complex64>| -> DMatrix<Complex64> {
            let mut acc = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
            for (i, fi) in f3.iter().enumerate() {
                acc += fi.map(|e| e * u[i]);
            }
            acc
        };
        let inner = |x: &DVector<Complex64>, y: &DVector<Complex64>| -> Complex64 {
            (x.transpose() * &fv * y)[(0, 0)]
        };
        for _ in 0..4 {
            let draw = |rng: &mut dyn rand::RngCore| {
                DVector::from_iterator(
                    n,
                    (0..n).map(|_| {
                        Complex64::new(
                            rand::Rng::gen_range(&mut *rng, -1.0..1.0),
                            rand::Rng::gen_range(&mut *rng, -1.0..1.0),
                        )
                    }),
                )
            };
            let x = draw(rng);
            let y = draw(rng);
            let w = draw(rng);
            let xy = &a * (field(&x) * &y);
            let yw = &a * (field(&y) * &w);
            let lhs = inner(&xy, &w);
            let rhs = inner(&x, &yw);
            let scale = lhs.norm().max(1.0);
            worst = worst.max((lhs - rhs).norm() / scale);
        }
    }
    Ok(CheckReport::from_residual(
        "defmul-consistency",
        worst,
        tol,
        points.len(),
    ))
}

/// Composition law of the rescalings: X *_W Y = (X *_V Y) *_V W^{-1},
/// where W^{-1} is the *_V-inverse of W (so W *_V W^{-1} = V, the unit of
/// *_V). Checked on random tangent vectors at every sample point.
pub fn rescaling_check(
    p: &dyn PrepotentialProvider,
    points: &[Vec<Complex64>],
    v: &[Complex64],
    w: &[Complex64],
    rng: &mut impl Rng,
    tol: f64,
) -> Result<CheckReport> {
    let n = p.dim();
    let mut worst: f64 = 0.0;
    for z in points {
        check_point(p, z)?;
        let f3 = p.third_derivatives(z)?;
        let fv = metric_v(p, z, v)?;
        let fw = metric_v(p, z, w)?;
        // A singular metric for either vector is reported as a degenerate
        // verdict, not an error: the law is simply not applicable there.
        let av = match guarded_inverse(&fv, "rescaling metric F_V") {
            Ok(m) => m,
            Err(Error::Degenerate(why)) => {
                return Ok(CheckReport::degenerate("rescaling-law", &why))
            }
            Err(e) => return Err(e),
        };
        let aw = match guarded_inverse(&fw, "rescaling metric F_W") {
            Ok(m) => m,
            Err(Error::Degenerate(why)) => {
                return Ok(CheckReport::degenerate("rescaling-law", &why))
            }
            Err(e) => return Err(e),
        };
        // W^{-1} with respect to *_V: solve W *_V s = V, i.e. s = F_W^{-1} F_V V.
        let vv = DVector::from_column_slice(v);
        let s = &aw * (&fv * &vv);
        let field = |u: &DVector<Complex64>| -> DMatrix<Complex64> {
            let mut acc = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
            for (i, fi) in f3.iter().enumerate() {
                acc += fi.map(|e| e * u[i]);
            }
            acc
        };
        for _ in 0..4 {
            let x: Vec<Complex64> = (0..n)
                .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            let y = DVector::from_iterator(
                n,
                (0..n).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))),
            );
            let fx = field(&DVector::from_column_slice(&x));
            let lhs = &aw * (&fx * &y);
            let u = &av * (&fx * &y);
            let fu = field(&u);
            let rhs = &av * (&fu * &s);
            let dev = (&lhs - &rhs).iter().map(|e| e.norm()).fold(0.0, f64::max);
            let scale = lhs.iter().map(|e| e.norm()).fold(0.0, f64::max).max(1.0);
            worst = worst.max(dev / scale);
        }
    }
    Ok(CheckReport::from_residual(
        "rescaling-law",
        worst,
        tol,
        points.len(),
    ))
}

/// Search for a rescaling vector with a nondegenerate metric at z. Returns
/// `None` when every attempt is singular, which is how a degenerate family
/// (for example one with a quadratic prepotential) announces itself.
pub fn find_nondegenerate_v(
    p: &dyn PrepotentialProvider,
    z: &[Complex64],
    rng: &mut impl Rng,
    attempts: usize,
) -> Result<Option<Vec<Complex64>>> {
    check_point(p, z)?;
    for _ in 0..attempts {
        let v: Vec<Complex64> = (0..p.dim())
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let fv = metric_v(p, z, &v)?;
        let svd = fv.svd(false, false);
        let max = svd.singular_values.max();
        let min = svd.singular_values.min();
        if max > 0.0 && min > SV_RATIO_FLOOR * max {
            return Ok(Some(v));
        }
    }
    Ok(None)
}

/// Deliberately constructed prepotential families for negative-control
/// and regression testing: a fully associative diagonal family, broken
/// couplings that violate associativity or the F-manifold identity, a
/// degenerate quadratic family, and a point-dependent diagonal family.
pub mod fixtures {
    use super::*;

    /// F = sum z_i^3 / 6: constant diagonal third derivatives, associative
    /// for every rescaling, and an F-manifold.
    pub struct DiagonalCubic {
        pub n: usize,
    }

    impl PrepotentialProvider for DiagonalCubic {
        fn dim(&self) -> usize {
            self.n
        }
        fn domain_ok(&self, z: &[Complex64]) -> bool {
            z.len() == self.n
        }
        fn third_derivatives(&self, z: &[Complex64]) -> Result<Vec<DMatrix<Complex64>>> {
            let _ = z;
            Ok((0..self.n)
                .map(|i| {
                    let mut m = DMatrix::from_element(self.n, self.n, Complex64::new(0.0, 0.0));
                    m[(i, i)] = Complex64::new(1.0, 0.0);
                    m
                })
                .collect())
        }
    }

    /// F = sum z_i^3 / 6 + eps z_1 z_2 z_3: symmetric but not associative.
    pub struct CoupledCubic {
        pub eps: f64,
    }

    impl PrepotentialProvider for CoupledCubic {
        fn dim(&self) -> usize {
            3
        }
        fn domain_ok(&self, z: &[Complex64]) -> bool {
            z.len() == 3
        }
        fn third_derivatives(&self, _z: &[Complex64]) -> Result<Vec<DMatrix<Complex64>>> {
            let e = Complex64::new(self.eps, 0.0);
            let one = Complex64::new(1.0, 0.0);
            let zero = Complex64::new(0.0, 0.0);
            let f1 =
                DMatrix::from_row_slice(3, 3, &[one, zero, zero, zero, zero, e, zero, e, zero]);
            let f2 =
                DMatrix::from_row_slice(3, 3, &[zero, zero, e, zero, one, zero, e, zero, zero]);
            let f3 =
                DMatrix::from_row_slice(3, 3, &[zero, e, zero, e, zero, zero, zero, zero, one]);
            Ok(vec![f1, f2, f3])
        }
    }

    /// F = sum z_i^3 / 6 + (delta/2) z_1^2 z_2 z_3: the coupling now varies
    /// with the point, so the derivative terms of the weak Frobenius
    /// identity no longer cancel.
    pub struct QuarticCoupling {
        pub delta: f64,
    }

    impl PrepotentialProvider for QuarticCoupling {
        fn dim(&self) -> usize {
            3
        }
        fn domain_ok(&self, z: &[Complex64]) -> bool {
            z.len() == 3
        }
        fn third_derivatives(&self, z: &[Complex64]) -> Result<Vec<DMatrix<Complex64>>> {
            let d = Complex64::new(self.delta, 0.0);
            let one = Complex64::new(1.0, 0.0);
            let zero = Complex64::new(0.0, 0.0);
            let (z1, z2, z3) = (z[0], z[1], z[2]);
            let f1 = DMatrix::from_row_slice(
                3,
                3,
                &[
                    one,
                    d * z3,
                    d * z2,
                    d * z3,
                    zero,
                    d * z1,
                    d * z2,
                    d * z1,
                    zero,
                ],
            );
            let f2 = DMatrix::from_row_slice(
                3,
                3,
                &[d * z3, zero, d * z1, zero, one, zero, d * z1, zero, zero],
            );
            let f3 = DMatrix::from_row_slice(
                3,
                3,
                &[d * z2, d * z1, zero, d * z1, zero, zero, zero, zero, one],
            );
            Ok(vec![f1, f2, f3])
        }
    }

    /// F homogeneous of degree 2: all third derivatives vanish, every
    /// rescaling metric is singular.
    pub struct Quadratic {
        pub n: usize,
    }

    impl PrepotentialProvider for Quadratic {
        fn dim(&self) -> usize {
            self.n
        }
        fn domain_ok(&self, z: &[Complex64]) -> bool {
            z.len() == self.n
        }
        fn third_derivatives(&self, _z: &[Complex64]) -> Result<Vec<DMatrix<Complex64>>> {
            Ok(vec![
                DMatrix::from_element(
                    self.n,
                    self.n,
                    Complex64::new(0.0, 0.0)
                );
                self.n
            ])
        }
    }

    /// F = sum z_i^4 / 24: F_V = diag(v_i z_i) varies with the point but
    /// the multiplication stays diagonal, hence flat and associative.
    pub struct DiagonalQuartic {
        pub n: usize,
    }

    impl PrepotentialProvider for DiagonalQuartic {
        fn dim(&self) -> usize {
            self.n
        }
        fn domain_ok(&self, z: &[Complex64]) -> bool {
            z.len() == self.n
        }
        fn third_derivatives(&self, z: &[Complex64]) -> Result<Vec<DMatrix<Complex64>>> {
            Ok((0..self.n)
                .map(|i| {
                    let mut m = DMatrix::from_element(self.n, self.n, Complex64::new(0.0, 0.0));
                    m[(i, i)] = z[i];
                    m
                })
                .collect())
        }
        fn hessian(&self, z: &[Complex64]) -> Result<Option<DMatrix<Complex64>>> {
            let mut m = DMatrix::from_element(self.n, self.n, Complex64::new(0.0, 0.0));
            for i in 0..self.n {
                m[(i, i)] = z[i] * z[i] / 2.0;
            }
            Ok(Some(m))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn pts3() -> Vec<Vec<Complex64>> {
        vec![
            vec![
                Complex64::new(0.3, 0.1),
                Complex64::new(-0.4, 0.2),
                Complex64::new(0.5, -0.3),
            ],
            vec![
                Complex64::new(1.1, -0.2),
                Complex64::new(0.7, 0.4),
                Complex64::new(-0.6, 0.1),
            ],
        ]
    }

    #[test]
    fn diagonal_cubic_passes_everything() {
        let p = DiagonalCubic { n: 3 };
        let v = vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(2.0, 0.0),
            Complex64::new(-1.5, 0.0),
        ];
        let pts = pts3();
        assert!(unit_law_check(&p, &pts, &v, 1e-12).unwrap().is_pass());
        assert!(associativity_check(&p, &pts, &v, 1e-12).unwrap().is_pass());
        assert!(fmanifold_identity_check(&p, &pts, &v, 1e-4, 1e-8)
            .unwrap()
            .is_pass());
        let r = flatness_check(&p, &pts, &v, 1e-4, 1e-6).unwrap();
        assert!(r.is_pass());
        assert_eq!(r.metadata.get("route").unwrap(), "constant-metric");
    }

    #[test]
    fn coupled_cubic_fails_associativity() {
        let p = CoupledCubic { eps: 0.5 };
        let v = vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(1.0, 0.0),
        ];
        let report = associativity_check(&p, &pts3(), &v, 1e-9).unwrap();
        assert!(!report.is_pass());
        assert!(report.max_residual.unwrap() > 1e-2);
    }

    #[test]
    fn quartic_coupling_fails_fmanifold_identity() {
        let p = QuarticCoupling { delta: 0.4 };
        let v = vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(1.0, 0.0),
        ];
        let pts = vec![vec![
            Complex64::new(0.3, 0.0),
            Complex64::new(0.4, 0.0),
            Complex64::new(0.5, 0.0),
        ]];
        let report = fmanifold_identity_check(&p, &pts, &v, 1e-4, 1e-6).unwrap();
        assert!(!report.is_pass());
        assert!(report.max_residual.unwrap() > 1e-3);
    }

    #[test]
    fn rescaling_law_holds_for_associative_family() {
        let p = DiagonalCubic { n: 3 };
        let v = vec![
            Complex64::new(1.0, 0.2),
            Complex64::new(0.8, -0.1),
            Complex64::new(-1.1, 0.3),
        ];
        let w = vec![
            Complex64::new(0.5, -0.4),
            Complex64::new(1.3, 0.1),
            Complex64::new(0.9, 0.6),
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(0xF40B);
        let report = rescaling_check(&p, &pts3(), &v, &w, &mut rng, 1e-10).unwrap();
        assert!(report.is_pass(), "residual {:?}", report.max_residual);
    }

    #[test]
    fn rescaling_law_fails_without_associativity() {
        let p = CoupledCubic { eps: 0.5 };
        let v = vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(1.0, 0.0),
        ];
        let w = vec![
            Complex64::new(0.4, 0.1),
            Complex64::new(1.2, -0.2),
            Complex64::new(0.8, 0.3),
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(0xF40B);
        let report = rescaling_check(&p, &pts3(), &v, &w, &mut rng, 1e-9).unwrap();
        assert!(!report.is_pass());
    }

    #[test]
    fn curvature_detects_a_curved_metric() {
        // g = diag(1, exp(z1)) has Gaussian curvature -1/4.
        let metric = |z: &[Complex64]| -> Result<DMatrix<Complex64>> {
            let mut m = DMatrix::from_element(2, 2, Complex64::new(0.0, 0.0));
            m[(0, 0)] = Complex64::new(1.0, 0.0);
            m[(1, 1)] = z[0].exp();
            Ok(m)
        };
        let z = vec![Complex64::new(0.2, 0.0), Complex64::new(-0.1, 0.0)];
        let r = curvature_max_abs(&metric, &z, 1e-4).unwrap();
        assert!(r > 0.1, "curvature residual {r}");
    }

    #[test]
    fn curvature_vanishes_for_flat_polar_like_metric() {
        // g = diag(1, z1^2) is the plane in disguise.
        let metric = |z: &[Complex64]| -> Result<DMatrix<Complex64>> {
            let mut m = DMatrix::from_element(2, 2, Complex64::new(0.0, 0.0));
            m[(0, 0)] = Complex64::new(1.0, 0.0);
            m[(1, 1)] = z[0] * z[0];
            Ok(m)
        };
        let z = vec![Complex64::new(1.3, 0.0), Complex64::new(0.7, 0.0)];
        let r = curvature_max_abs(&metric, &z, 1e-4).unwrap();
        assert!(r < 1e-6, "curvature residual {r}");
    }

    #[test]
    fn flatness_uses_curvature_when_metric_varies() {
        let p = DiagonalQuartic { n: 2 };
        let v = vec![Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)];
        let pts = vec![
            vec![Complex64::new(1.2, 0.0), Complex64::new(0.8, 0.0)],
            vec![Complex64::new(0.9, 0.0), Complex64::new(1.4, 0.0)],
        ];
        let r = flatness_check(&p, &pts, &v, 1e-4, 1e-6).unwrap();
        assert!(r.is_pass(), "residual {:?}", r.max_residual);
        assert_eq!(
            r.metadata.get("route").unwrap(),
            "finite-difference-curvature"
        );
    }

    #[test]
    fn degenerate_family_is_detected() {
        let p = Quadratic { n: 3 };
        let z = vec![
            Complex64::new(0.4, 0.0),
            Complex64::new(0.6, 0.0),
            Complex64::new(-0.2, 0.0),
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(0xF40B);
        let found = find_nondegenerate_v(&p, &z, &mut rng, 10).unwrap();
        assert!(found.is_none());
        // And a healthy family is not flagged.
        let q = DiagonalCubic { n: 3 };
        let found = find_nondegenerate_v(&q, &z, &mut rng, 10).unwrap();
        assert!(found.is_some());
    }

    #[test]
    fn kahler_eigenvalue_reads_the_hessian() {
        let p = DiagonalQuartic { n: 2 };
        // At z = (1+i, 1): Im(z^2/2) = 1 for the first entry, 0 for the
        // second, so the smallest eigenvalue is 0.
        let z = vec![Complex64::new(1.0, 1.0), Complex64::new(1.0, 0.0)];
        let min = kahler_min_eigenvalue(&p, &z).unwrap();
        assert!((min - 0.0).abs() < 1e-12);
        let report = kahler_positivity_report(&p, &[z]).unwrap();
        assert_eq!(report.metadata.get("positive").unwrap(), "false");
    }

    #[test]
    fn structure_matrices_guard_singular_metrics() {
        let p = DiagonalCubic { n: 2 };
        let z = vec![Complex64::new(0.1, 0.0), Complex64::new(0.2, 0.0)];
        // V with a vanishing component makes F_V singular for the diagonal
        // cubic.
        let v = vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
        let err = structure_matrices(&p, &z, &v).unwrap_err();
        assert!(matches!(err, Error::Degenerate(_)));
    }

    #[test]
    fn rescaling_with_singular_metric_reports_degenerate() {
        let p = DiagonalCubic { n: 2 };
        let pts = vec![vec![Complex64::new(0.3, 0.0), Complex64::new(0.5, 0.0)]];
        let v = vec![Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)];
        let w = vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
        let mut rng = ChaCha8Rng::seed_from_u64(0xF40B);
        let report = rescaling_check(&p, &pts, &v, &w, &mut rng, 1e-10).unwrap();
        assert!(matches!(report.verdict, crate::report::Verdict::Degenerate));
    }

    #[test]
    fn richardson_extrapolation_sharpens_the_curvature() {
        // g = diag(1, e^{z1}) has constant nonzero curvature; at a coarse
        // step the plain estimate carries a visible O(h^2) error that the
        // extrapolated one cancels.
        let metric = |z: &[Complex64]| -> Result<DMatrix<Complex64>> {
            let mut m = DMatrix::from_element(2, 2, Complex64::new(0.0, 0.0));
            m[(0, 0)] = Complex64::new(1.0, 0.0);
            m[(1, 1)] = z[0].exp();
            Ok(m)
        };
        let z = vec![Complex64::new(0.2, 0.0), Complex64::new(-0.1, 0.0)];
        let reference = curvature_max_abs(&metric, &z, 1e-4).unwrap();
        let plain = curvature_max_abs(&metric, &z, 0.05).unwrap();
        let sharp = curvature_max_abs_richardson(&metric, &z, 0.05).unwrap();
        assert!(
            (sharp - reference).abs() < 1e-5,
            "sharp {sharp} ref {reference}"
        );
        assert!(
            (sharp - reference).abs() < (plain - reference).abs(),
            "sharp {sharp} plain {plain} ref {reference}"
        );
    }

    #[test]
    fn defmul_reconstructs_the_tensor() {
        let mut rng = ChaCha8Rng::seed_from_u64(0xF40B);
        let p = CoupledCubic { eps: 0.5 };
        let pts = vec![vec![
            Complex64::new(0.4, 0.1),
            Complex64::new(0.7, -0.2),
            Complex64::new(-0.3, 0.3),
        ]];
        let v = vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(0.8, 0.1),
            Complex64::new(-0.6, 0.2),
        ];
        let report = defmul_check(&p, &pts, &v, &mut rng, 1e-10).unwrap();
        assert!(report.is_pass(), "residual {:?}", report.max_residual);
    }

    #[test]
    fn associativity_verdict_is_independent_of_rescaling_vector() {
        let mut rng = ChaCha8Rng::seed_from_u64(0xF40B);
        let pts = vec![vec![
            Complex64::new(0.4, 0.1),
            Complex64::new(0.7, -0.2),
            Complex64::new(-0.3, 0.3),
        ]];
        let good = DiagonalCubic { n: 3 };
        let bad = CoupledCubic { eps: 0.5 };
        for _ in 0..3 {
            let v = find_nondegenerate_v(&good, &pts[0], &mut rng, 20)
                .unwrap()
                .unwrap();
            let r = associativity_check(&good, &pts, &v, 1e-8).unwrap();
            assert!(r.is_pass(), "diagonal cubic with V {v:?}");
            let w = find_nondegenerate_v(&bad, &pts[0], &mut rng, 20)
                .unwrap()
                .unwrap();
            let r = associativity_check(&bad, &pts, &w, 1e-8).unwrap();
            assert!(!r.is_pass(), "coupled cubic with V {w:?}");
        }
    }
}
