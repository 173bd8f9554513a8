//! Frobenius manifold of a one-variable unfolding, assembled by exact
//! rational algebra: flat coordinates, structure constants from the residue
//! form, a polynomial prepotential, the Euler field, and the intersection
//! form. Every identity used downstream (third derivatives, scaling, unit
//! row) is verified exactly during construction, so numeric consumers can
//! trust the stored polynomials.

mod flat;

pub use flat::{flat_coordinates, FlatCoords};

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rand::Rng;

use crate::catalog::{LieType, UnfoldingSpec};
use crate::error::{Error, Result};
use crate::jacobi::{JacobiRing, RingElement};
use crate::poly::{rat, rat_to_f64, MultiPoly};
use crate::ratmat::{solve_least_structured, RatMat};
use crate::report::CheckReport;

/// The fully constructed Frobenius manifold data of one catalog entry.
///
/// All tensors live in the flat coordinates t1..tn. The structure constants
/// `c[i][j][k]` are the third derivatives of `prepotential`; both facts are
/// established exactly while building, so they are interchangeable.
#[derive(Debug, Clone)]
pub struct FrobeniusData {
    pub spec: UnfoldingSpec,
    pub flat: FlatCoords,
    /// The constant metric in flat coordinates.
    pub eta: RatMat,
    pub eta_inv: RatMat,
    /// c[i][j][k] as polynomials in t; totally symmetric.
    pub c: Vec<Vec<Vec<MultiPoly>>>,
    /// Polynomial prepotential F(t) with d3 F = c.
    pub prepotential: MultiPoly,
    /// Second derivatives of F (Hessian entries), kept for numeric callers.
    pub hess: Vec<Vec<MultiPoly>>,
    /// Euler coefficients: E = sum_k euler[k] * t_{k+1} d/dt_{k+1}.
    pub euler: Vec<BigRational>,
    /// Scaling exponent: E(F) = lambda * F, exactly.
    pub lambda: BigRational,
    /// Contravariant intersection form entries g^{ij}(t).
    pub intersection: Vec<Vec<MultiPoly>>,
    /// The multiplication engine over the t-side coefficients.
    ring_t: JacobiRing,
    t_names: Vec<String>,
}

/// Convenience free function mirroring `FrobeniusData::build`.
pub fn build(spec: &UnfoldingSpec) -> Result<FrobeniusData> {
    FrobeniusData::build(spec)
}

/// Exponent vectors over the coordinate weights summing to `target`.
fn weighted_monomials(weights: &[u32], target: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut exps = vec![0u32; weights.len()];
    fn rec(pos: usize, rem: u32, weights: &[u32], exps: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if pos == weights.len() {
            if rem == 0 {
                out.push(exps.clone());
            }
            return;
        }
        let w = weights[pos];
        for e in 0..=(rem / w) {
            exps[pos] = e;
            rec(pos + 1, rem - e * w, weights, exps, out);
        }
        exps[pos] = 0;
    }
    rec(0, target, weights, &mut exps, &mut out);
    out
}

impl FrobeniusData {
    pub fn build(spec: &UnfoldingSpec) -> Result<Self> {
        if spec.lie_type != LieType::A {
            return Err(Error::UnsupportedFamily(format!(
                "Frobenius construction requires a one-variable unfolding, got {}{}",
                spec.lie_type, spec.rank
            )));
        }
        let n = spec.rank;
        let flat = flat_coordinates(spec)?;
        let eta = flat.eta.clone();
        let eta_inv = eta.inverse()?;
        let t_names: Vec<String> = (1..=n).map(|k| format!("t{k}")).collect();
        let t_refs: Vec<&str> = t_names.iter().map(|s| s.as_str()).collect();

        // Move the multiplication engine to the t side: substitute b -> b(t)
        // into the x-coefficients of the unfolding.
        let ring_b = JacobiRing::new(spec)?;
        let mut b_images: BTreeMap<String, MultiPoly> = BTreeMap::new();
        for a in 1..=n {
            b_images.insert(format!("b{a}"), flat.b_of_t[a - 1].clone());
        }
        let coeffs_t: Vec<MultiPoly> = ring_b
            .s_tilde_coeffs()
            .iter()
            .map(|c| c.substitute(&b_images))
            .collect::<Result<_>>()?;
        let ring_t = JacobiRing::from_s_tilde_coeffs(coeffs_t)?;

        // Coordinate fields through the Kodaira-Spencer map: the field
        // d/dt_i acts as the x-polynomial sum_a (db_a/dt_i) x^{a-1}.
        let mut kappa: Vec<RingElement> = Vec::with_capacity(n);
        for i in 1..=n {
            let coeffs: Vec<MultiPoly> = (1..=n)
                .map(|a| flat.b_of_t[a - 1].diff(&format!("t{i}")))
                .collect::<Result<_>>()?;
            kappa.push(ring_t.kodaira_spencer(&coeffs)?);
        }

        // Structure constants from the residue form, totally symmetric.
        let mut c = vec![vec![vec![MultiPoly::zero(&t_refs); n]; n]; n];
        for i in 0..n {
            for j in i..n {
                for k in j..n {
                    let v = ring_t.residue_triple(&kappa[i], &kappa[j], &kappa[k])?;
                    for (a, b, d) in [
                        (i, j, k),
                        (i, k, j),
                        (j, i, k),
                        (j, k, i),
                        (k, i, j),
                        (k, j, i),
                    ] {
                        c[a][b][d] = v.clone();
                    }
                }
            }
        }

        // The unit-field row must reproduce the flat metric exactly.
        for j in 0..n {
            for k in 0..n {
                let want = MultiPoly::constant(&t_refs, eta[(j, k)].clone());
                if c[0][j][k] != want {
                    return Err(Error::PipelineBug(format!(
                        "unit-field row ({j},{k}) is {} instead of the metric entry",
                        c[0][j][k]
                    )));
                }
            }
        }

        // Closedness: d_l c_ijk == d_k c_ijl, the integrability condition
        // that lets the tensor descend from a single potential.
        for i in 0..n {
            for j in i..n {
                for k in 0..n {
                    for l in k + 1..n {
                        let lhs = c[i][j][k].diff(&t_names[l])?;
                        let rhs = c[i][j][l].diff(&t_names[k])?;
                        if lhs != rhs {
                            return Err(Error::PipelineBug(format!(
                                "structure constants not integrable at ({i},{j},{k},{l})"
                            )));
                        }
                    }
                }
            }
        }

        // Integrate: the prepotential is supported on monomials of weighted
        // degree 2n+4 under the coordinate weights (n+1, n, .., 2). Every
        // candidate has total degree >= 3 because two factors reach at most
        // 2(n+1) < 2n+4, so the quadratic ambiguity never enters.
        let weights: Vec<u32> = (1..=n).map(|k| (n + 2 - k) as u32).collect();
        let target = (2 * n + 4) as u32;
        let candidates = weighted_monomials(&weights, target);
        debug_assert!(candidates.iter().all(|e| e.iter().sum::<u32>() >= 3));
        let mut index: BTreeMap<Vec<u32>, usize> = BTreeMap::new();
        for (pos, e) in candidates.iter().enumerate() {
            index.insert(e.clone(), pos);
        }
        let mut rows: Vec<(usize, BigRational, BigRational)> = Vec::new();
        for i in 0..n {
            for j in i..n {
                for k in j..n {
                    for (mono, coeff) in c[i][j][k].terms() {
                        let mut e = mono.0.clone();
                        e[i] += 1;
                        e[j] += 1;
                        e[k] += 1;
                        let col = *index.get(&e).ok_or_else(|| {
                            Error::PipelineBug(format!(
                                "structure constant ({i},{j},{k}) leaves the weighted basis"
                            ))
                        })?;
                        let mut mu = 1i64;
                        let mut tmp = e.clone();
                        for d in [i, j, k] {
                            mu *= tmp[d] as i64;
                            tmp[d] -= 1;
                        }
                        rows.push((col, rat(mu, 1), coeff.clone()));
                    }
                }
            }
        }
        let mut a = RatMat::zeros(rows.len(), candidates.len());
        let mut rhs = vec![BigRational::zero(); rows.len()];
        for (r, (col, mu, cv)) in rows.iter().enumerate() {
            a[(r, *col)] = mu.clone();
            rhs[r] = cv.clone();
        }
        let sol = solve_least_structured(&a, &rhs)
            .map_err(|_| Error::PipelineBug("prepotential system is inconsistent".into()))?;
        let mut prepotential = MultiPoly::zero(&t_refs);
        for (pos, e) in candidates.iter().enumerate() {
            if sol[pos].is_zero() {
                continue;
            }
            let term = MultiPoly::monomial(&t_refs, e, sol[pos].clone())?;
            prepotential = prepotential.add(&term)?;
        }
        // Exact round trip: the third derivatives must reproduce c.
        for i in 0..n {
            for j in i..n {
                for k in j..n {
                    let d3 = prepotential
                        .diff(&t_names[i])?
                        .diff(&t_names[j])?
                        .diff(&t_names[k])?;
                    if d3 != c[i][j][k] {
                        return Err(Error::PipelineBug(format!(
                            "prepotential does not integrate the tensor at ({i},{j},{k})"
                        )));
                    }
                }
            }
        }
        let mut hess = vec![vec![MultiPoly::zero(&t_refs); n]; n];
        for i in 0..n {
            let fi = prepotential.diff(&t_names[i])?;
            for j in i..n {
                let fij = fi.diff(&t_names[j])?;
                hess[i][j] = fij.clone();
                hess[j][i] = fij;
            }
        }

        // Euler field: coordinate scaling by the weights. The prepotential
        // is quasihomogeneous, so E(F) = lambda F with lambda = 2n+4.
        let euler: Vec<BigRational> = weights.iter().map(|&w| rat(w as i64, 1)).collect();
        let lambda = rat(target as i64, 1);
        let scaled = apply_scaling_field(&prepotential, &euler, &t_names)?;
        if &scaled - &prepotential.scale(&lambda) != MultiPoly::zero(&t_refs) {
            return Err(Error::PipelineBug(
                "prepotential is not quasihomogeneous of the expected degree".into(),
            ));
        }

        // Contravariant intersection form:
        // g^{ij}(t) = sum_{a,b,s} eta^{ia} eta^{jb} E^s(t) c_{abs}(t).
        let mut intersection = vec![vec![MultiPoly::zero(&t_refs); n]; n];
        for i in 0..n {
            for j in i..n {
                let mut acc = MultiPoly::zero(&t_refs);
                for ai in 0..n {
                    let eia = eta_inv[(i, ai)].clone();
                    if eia.is_zero() {
                        continue;
                    }
                    for bj in 0..n {
                        let ejb = eta_inv[(j, bj)].clone();
                        if ejb.is_zero() {
                            continue;
                        }
                        for s in 0..n {
                            if c[ai][bj][s].is_zero() {
                                continue;
                            }
                            let mut exps = vec![0u32; n];
                            exps[s] = 1;
                            let es =
                                MultiPoly::monomial(&t_refs, &exps, &(&eia * &ejb) * &euler[s])?;
                            acc = acc.add(&c[ai][bj][s].mul(&es)?)?;
                        }
                    }
                }
                intersection[i][j] = acc.clone();
                intersection[j][i] = acc;
            }
        }

        Ok(Self {
            spec: spec.clone(),
            flat,
            eta,
            eta_inv,
            c,
            prepotential,
            hess,
            euler,
            lambda,
            intersection,
            ring_t,
            t_names,
        })
    }

    pub fn rank(&self) -> usize {
        self.t_names.len()
    }

    pub fn t_names(&self) -> &[String] {
        &self.t_names
    }

    pub fn ring(&self) -> &JacobiRing {
        &self.ring_t
    }

    /// Apply the Euler field to a polynomial in the flat coordinates.
    pub fn euler_apply(&self, p: &MultiPoly) -> Result<MultiPoly> {
        apply_scaling_field(p, &self.euler, &self.t_names)
    }

    /// Exact check that E(F) = lambda F; the scaling exponent is stored so
    /// callers can pin its value independently.
    pub fn euler_check(&self) -> Result<CheckReport> {
        let scaled = self.euler_apply(&self.prepotential)?;
        let diff = &scaled - &self.prepotential.scale(&self.lambda);
        let residual = poly_sup_norm(&diff);
        Ok(
            CheckReport::from_residual("euler-scaling", residual, 0.0, 1)
                .with_note("lambda", self.lambda.to_string()),
        )
    }

    /// Hessian matrices of the coordinate derivatives of F at an exact
    /// rational point: out[i][(j,k)] = c_ijk(t).
    pub fn third_derivative_mats_exact(&self, t: &[BigRational]) -> Result<Vec<RatMat>> {
        let n = self.rank();
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let mut m = RatMat::zeros(n, n);
            for j in 0..n {
                for k in j..n {
                    let v = self.c[i][j][k].eval_exact(t)?;
                    m[(j, k)] = v.clone();
                    m[(k, j)] = v;
                }
            }
            out.push(m);
        }
        Ok(out)
    }

    /// Same tensor numerically at a complex point.
    pub fn third_derivative_mats(&self, t: &[Complex64]) -> Result<Vec<DMatrix<Complex64>>> {
        let n = self.rank();
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let mut m = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
            for j in 0..n {
                for k in j..n {
                    let v = self.c[i][j][k].eval(t)?;
                    m[(j, k)] = v;
                    m[(k, j)] = v;
                }
            }
            out.push(m);
        }
        Ok(out)
    }

    /// The constant metric as a complex matrix.
    pub fn eta_complex(&self) -> DMatrix<Complex64> {
        let n = self.rank();
        DMatrix::from_fn(n, n, |i, j| {
            Complex64::new(rat_to_f64(&self.eta[(i, j)]), 0.0)
        })
    }

    /// Contravariant intersection form at an exact rational point.
    pub fn intersection_form_exact(&self, t: &[BigRational]) -> Result<RatMat> {
        let n = self.rank();
        let mut g = RatMat::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v = self.intersection[i][j].eval_exact(t)?;
                g[(i, j)] = v.clone();
                g[(j, i)] = v;
            }
        }
        Ok(g)
    }

    /// Contravariant intersection form at a complex point.
    pub fn intersection_form_at(&self, t: &[Complex64]) -> Result<DMatrix<Complex64>> {
        let n = self.rank();
        let mut g = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
        for i in 0..n {
            for j in i..n {
                let v = self.intersection[i][j].eval(t)?;
                g[(i, j)] = v;
                g[(j, i)] = v;
            }
        }
        Ok(g)
    }

    /// Independent pointwise route to the intersection form: build the
    /// operator of multiplication by the Euler field in the flat frame,
    /// U^a_b = sum_s E^s(t) eta^{ae} c_{ebs}(t), and push the metric
    /// through it: g = U eta^{-1}. Must agree with the closed formula.
    pub fn intersection_via_euler_mult(&self, t: &[BigRational]) -> Result<RatMat> {
        let n = self.rank();
        let mut u = RatMat::zeros(n, n);
        for a in 0..n {
            for b in 0..n {
                let mut acc = BigRational::zero();
                for s in 0..n {
                    let es = &self.euler[s] * &t[s];
                    if es.is_zero() {
                        continue;
                    }
                    for e in 0..n {
                        if self.eta_inv[(a, e)].is_zero() {
                            continue;
                        }
                        acc += &(&es * &self.eta_inv[(a, e)]) * &self.c[e][b][s].eval_exact(t)?;
                    }
                }
                u[(a, b)] = acc;
            }
        }
        u.mul(&self.eta_inv)
    }

    /// Draw a rational flat-coordinate point away from the discriminant.
    pub fn sample_rational_t(&self, rng: &mut impl Rng) -> Result<Vec<BigRational>> {
        self.ring_t.sample_rational_base(rng)
    }

    /// Exact associativity: at sampled rational points the Hessian matrices
    /// [F_i] must satisfy [F_i] eta^{-1} [F_j] = [F_j] eta^{-1} [F_i] as
    /// rational matrices, with zero residual.
    pub fn wdvv_check(&self, samples: usize, rng: &mut impl Rng) -> Result<CheckReport> {
        let n = self.rank();
        let mut worst = BigRational::zero();
        for _ in 0..samples {
            let t = self.sample_rational_t(rng)?;
            let mats = self.third_derivative_mats_exact(&t)?;
            for i in 0..n {
                for j in i + 1..n {
                    let lhs = mats[i].mul(&self.eta_inv)?.mul(&mats[j])?;
                    let rhs = mats[j].mul(&self.eta_inv)?.mul(&mats[i])?;
                    for r in 0..n {
                        for s in 0..n {
                            let d = (&lhs[(r, s)] - &rhs[(r, s)]).abs();
                            if d > worst {
                                worst = d;
                            }
                        }
                    }
                }
            }
        }
        Ok(
            CheckReport::from_residual("wdvv-exact", rat_to_f64(&worst), 0.0, samples)
                .with_note("arithmetic", "rational"),
        )
    }

    /// Flat-pencil check: for each pencil parameter the covariant metric
    /// inverse to g^{contra} + lambda eta^{contra} must be flat. Curvature
    /// is measured by finite differences around sampled points.
    ///
    /// The covariant metric has a pole where the pencil degenerates, so
    /// curvature is only defined away from that locus; points that lie too
    /// close to it (for any requested parameter) are discarded and
    /// resampled (the discard count is reported). At each kept point the
    /// residual is the smaller of two independent discretization-error
    /// estimators — a plain second-order stencil and a Richardson
    /// extrapolation at a coarser step. For a genuinely curved metric both
    /// converge to the same nonzero value, so the minimum cannot mask real
    /// curvature.
    pub fn flat_pencil_check(
        &self,
        lambdas: &[Complex64],
        samples: usize,
        tol: f64,
        rng: &mut impl Rng,
    ) -> Result<CheckReport> {
        // Reject points whose estimated distance to the pencil degeneracy
        // locus (smallest singular value over the local metric-gradient
        // scale) is below this floor: the stencil then probes the pole of
        // the covariant metric and the curvature estimate is meaningless.
        const POLE_DISTANCE_FLOOR: f64 = 0.2;
        let n = self.rank();
        let eta_contra = DMatrix::from_fn(n, n, |i, j| {
            Complex64::new(rat_to_f64(&self.eta_inv[(i, j)]), 0.0)
        });
        let mut worst: f64 = 0.0;
        let mut used = 0;
        let mut discarded = 0usize;
        let mut attempts = 0;
        while used < samples && attempts < 200 * samples.max(1) {
            attempts += 1;
            let t = self.sample_rational_t(rng)?;
            let z0: Vec<Complex64> = t
                .iter()
                .map(|r| Complex64::new(rat_to_f64(r), 0.0))
                .collect();
            let g0 = self.intersection_form_at(&z0)?;
            // Local gradient scale of the pencil; only g varies with t.
            let mut dg_norm: f64 = 0.0;
            for k in 0..n {
                let h = 1e-3;
                let mut zp = z0.clone();
                zp[k] += Complex64::new(h, 0.0);
                let mut zm = z0.clone();
                zm[k] -= Complex64::new(h, 0.0);
                let d = (self.intersection_form_at(&zp)? - self.intersection_form_at(&zm)?)
                    / Complex64::new(2.0 * h, 0.0);
                dg_norm = dg_norm.max(d.singular_values().iter().cloned().fold(0.0f64, f64::max));
            }
            let far_from_degeneracy = lambdas.iter().all(|&lam| {
                let pencil = &g0 + &eta_contra.map(|e| e * lam);
                let sv = pencil.singular_values();
                let smin = sv.iter().cloned().fold(f64::INFINITY, f64::min);
                smin >= POLE_DISTANCE_FLOOR * dg_norm.max(f64::MIN_POSITIVE)
            });
            if !far_from_degeneracy {
                discarded += 1;
                continue;
            }
            let mut point_ok = true;
            let mut point_worst: f64 = 0.0;
            for &lam in lambdas {
                let metric = |z: &[Complex64]| -> Result<DMatrix<Complex64>> {
                    let g = self.intersection_form_at(z)?;
                    let pencil = &g + &eta_contra.map(|e| e * lam);
                    pencil
                        .try_inverse()
                        .ok_or_else(|| Error::Singular("pencil metric is singular".into()))
                };
                let plain = crate::esk::curvature_max_abs(&metric, &z0, 1e-4);
                let sharp = crate::esk::curvature_max_abs_richardson(&metric, &z0, 1e-3);
                match (plain, sharp) {
                    (Ok(a), Ok(b)) => point_worst = point_worst.max(a.min(b)),
                    (Err(Error::Singular(_)), _) | (_, Err(Error::Singular(_))) => {
                        point_ok = false;
                        break;
                    }
                    (Err(e), _) | (_, Err(e)) => return Err(e),
                }
            }
            if !point_ok {
                discarded += 1;
                continue;
            }
            worst = worst.max(point_worst);
            used += 1;
        }
        if used < samples {
            return Err(Error::Degenerate(
                "could not sample enough points away from the pencil degeneracy locus".into(),
            ));
        }
        Ok(
            CheckReport::from_residual("flat-pencil", worst, tol, samples)
                .with_note("pencil-parameters", format!("{}", lambdas.len()))
                .with_note("discarded-near-degenerate", format!("{discarded}")),
        )
    }
}

impl crate::esk::PrepotentialProvider for FrobeniusData {
    fn dim(&self) -> usize {
        self.rank()
    }

    fn domain_ok(&self, z: &[Complex64]) -> bool {
        z.len() == self.rank() && z.iter().all(|w| w.re.is_finite() && w.im.is_finite())
    }

    fn third_derivatives(&self, z: &[Complex64]) -> Result<Vec<DMatrix<Complex64>>> {
        self.third_derivative_mats(z)
    }

    fn hessian(&self, z: &[Complex64]) -> Result<Option<DMatrix<Complex64>>> {
        let n = self.rank();
        let mut m = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
        for i in 0..n {
            for j in i..n {
                let v = self.hess[i][j].eval(z)?;
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        Ok(Some(m))
    }
}

/// sum_k coeffs[k] * t_{k+1} * d p/d t_{k+1}, the action of a diagonal
/// scaling field.
fn apply_scaling_field(
    p: &MultiPoly,
    coeffs: &[BigRational],
    names: &[String],
) -> Result<MultiPoly> {
    let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
    let mut acc = MultiPoly::zero(&refs);
    for (k, name) in names.iter().enumerate() {
        let d = p.diff(name)?;
        if d.is_zero() {
            continue;
        }
        let mut exps = vec![0u32; names.len()];
        exps[k] = 1;
        let tk = MultiPoly::monomial(&refs, &exps, coeffs[k].clone())?;
        acc = acc.add(&d.mul(&tk)?)?;
    }
    Ok(acc)
}

/// Largest absolute coefficient, as f64; zero for the zero polynomial.
fn poly_sup_norm(p: &MultiPoly) -> f64 {
    p.terms()
        .map(|(_, c)| rat_to_f64(&c.abs()))
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::get_unfolding;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn data(n: usize) -> FrobeniusData {
        FrobeniusData::build(&get_unfolding(LieType::A, n).unwrap()).unwrap()
    }

    #[test]
    fn rank_one_prepotential_is_cubic() {
        let d = data(1);
        let refs = ["t1"];
        let want = MultiPoly::monomial(&refs, &[3], rat(1, 12)).unwrap();
        assert_eq!(d.prepotential, want);
        assert_eq!(d.lambda, rat(6, 1));
    }

    #[test]
    fn rank_two_prepotential_and_intersection_form() {
        let d = data(2);
        let refs = ["t1", "t2"];
        // F = t1^2 t2 / 6 - t2^4 / 216
        let want = MultiPoly::monomial(&refs, &[2, 1], rat(1, 6))
            .unwrap()
            .add(&MultiPoly::monomial(&refs, &[0, 4], rat(-1, 216)).unwrap())
            .unwrap();
        assert_eq!(d.prepotential, want);
        assert_eq!(d.lambda, rat(8, 1));
        // c_222 = -t2/9
        assert_eq!(
            d.c[1][1][1],
            MultiPoly::monomial(&refs, &[0, 1], rat(-1, 9)).unwrap()
        );
        // g = [[-2 t2^2, 9 t1], [9 t1, 6 t2]]
        assert_eq!(
            d.intersection[0][0],
            MultiPoly::monomial(&refs, &[0, 2], rat(-2, 1)).unwrap()
        );
        assert_eq!(
            d.intersection[0][1],
            MultiPoly::monomial(&refs, &[1, 0], rat(9, 1)).unwrap()
        );
        assert_eq!(
            d.intersection[1][1],
            MultiPoly::monomial(&refs, &[0, 1], rat(6, 1)).unwrap()
        );
    }

    #[test]
    fn euler_scaling_is_exact_for_small_ranks() {
        for n in 1..=4 {
            let d = data(n);
            let report = d.euler_check().unwrap();
            assert!(report.is_pass(), "rank {n}");
            assert_eq!(d.lambda, rat(2 * n as i64 + 4, 1));
        }
    }

    #[test]
    fn prepotential_weights_cover_expected_candidates() {
        // Rank 2, weights (3, 2), degree 8: only t1^2 t2 and t2^4 solve
        // 3a + 2b = 8, exactly the monomials of the known prepotential.
        let cands = weighted_monomials(&[3, 2], 8);
        assert_eq!(cands.len(), 2);
        assert!(cands.contains(&vec![2, 1]));
        assert!(cands.contains(&vec![0, 4]));
    }

    #[test]
    fn unit_row_equals_metric() {
        let d = data(4);
        for j in 0..4 {
            for k in 0..4 {
                let refs: Vec<&str> = d.t_names.iter().map(|s| s.as_str()).collect();
                assert_eq!(
                    d.c[0][j][k],
                    MultiPoly::constant(&refs, d.eta[(j, k)].clone())
                );
            }
        }
    }

    #[test]
    fn wdvv_holds_exactly() {
        let mut rng = ChaCha8Rng::seed_from_u64(0xF40B);
        for n in 2..=4 {
            let d = data(n);
            let report = d.wdvv_check(5, &mut rng).unwrap();
            assert!(report.is_pass(), "rank {n}: {:?}", report.verdict);
            assert_eq!(report.max_residual, Some(0.0));
        }
    }

    #[test]
    fn intersection_form_routes_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(0xF40B);
        for n in 2..=4 {
            let d = data(n);
            for _ in 0..3 {
                let t = d.sample_rational_t(&mut rng).unwrap();
                let direct = d.intersection_form_exact(&t).unwrap();
                let via_mult = d.intersection_via_euler_mult(&t).unwrap();
                for i in 0..n {
                    for j in 0..n {
                        assert_eq!(direct[(i, j)], via_mult[(i, j)], "n={n} ({i},{j})");
                    }
                }
            }
        }
    }

    #[test]
    fn scaling_exponents_match_weights() {
        for (n, lam) in [(1usize, 6i64), (2, 8), (3, 10), (4, 12), (5, 14)] {
            let d = data(n);
            assert_eq!(d.lambda, rat(lam, 1), "rank {n}");
        }
    }

    #[test]
    fn third_derivatives_match_numeric_evaluation() {
        let d = data(3);
        let t = vec![rat(1, 2), rat(-1, 3), rat(2, 1)];
        let exact = d.third_derivative_mats_exact(&t).unwrap();
        let zt: Vec<Complex64> = t
            .iter()
            .map(|r| Complex64::new(rat_to_f64(r), 0.0))
            .collect();
        let numeric = d.third_derivative_mats(&zt).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    let e = rat_to_f64(&exact[i][(j, k)]);
                    let v = numeric[i][(j, k)];
                    assert!((v - Complex64::new(e, 0.0)).norm() < 1e-12);
                }
            }
        }
    }
}
