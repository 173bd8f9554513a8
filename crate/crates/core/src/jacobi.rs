//! The A_n Jacobi ring C[x]/(d/dx s_tilde): Kodaira–Spencer map, ring
//! multiplication, and the exact residue pairing via the Euler–Jacobi
//! coefficient rule (reduce, take the x^{n-1} coefficient, divide by the
//! leading coefficient n+1).
//!
//! The ring is generic over its coefficient base: constructed from a catalog
//! entry the base variables are b1..bn, but the same reduction engine runs
//! over t1..tn once the flat coordinate substitution b(t) is applied.

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;

use crate::catalog::{LieType, UnfoldingSpec};
use crate::error::{Error, Result};
use crate::poly::{rat, roots_from_coeffs, MultiPoly, RootConfig};

/// An element written in the monomial basis {1, x, .., x^{n-1}}; each
/// coordinate is an exact polynomial over the base variables.
#[derive(Debug, Clone, PartialEq)]
pub struct RingElement {
    pub coeffs: Vec<MultiPoly>,
}

impl RingElement {
    /// Numeric value of the represented x-polynomial at (x, base point).
    pub fn eval(&self, x: Complex64, base: &[Complex64]) -> Result<Complex64> {
        let mut acc = Complex64::new(0.0, 0.0);
        let mut xp = Complex64::new(1.0, 0.0);
        for c in &self.coeffs {
            acc += c.eval(base)? * xp;
            xp *= x;
        }
        Ok(acc)
    }
}

#[derive(Debug, Clone)]
pub struct JacobiRing {
    base_vars: Vec<String>,
    /// Coefficients of s_tilde as an x-polynomial, ascending, length n+2.
    s_tilde_coeffs: Vec<MultiPoly>,
    /// Coefficients of d s_tilde/dx, ascending, length n+1; the leading
    /// entry is the constant n+1.
    modulus: Vec<MultiPoly>,
    n: usize,
    lead: BigRational,
}

impl JacobiRing {
    /// Build the ring of an A-type catalog entry over base variables b1..bn.
    pub fn new(spec: &UnfoldingSpec) -> Result<Self> {
        if spec.lie_type != LieType::A {
            return Err(Error::UnsupportedFamily(format!(
                "{}{} has no univariate reduction",
                spec.lie_type, spec.rank
            )));
        }
        let st = spec
            .s_tilde
            .as_ref()
            .ok_or_else(|| Error::PipelineBug("A-type entry lacks s_tilde".into()))?;
        let coeffs = st.coeffs_in("x")?;
        Self::from_s_tilde_coeffs(coeffs)
    }

    /// Build from explicit x-coefficients of s_tilde over any base, e.g.
    /// after substituting b = b(t). The top coefficient must be the
    /// constant 1 and the x^n coefficient zero.
    pub fn from_s_tilde_coeffs(s_tilde_coeffs: Vec<MultiPoly>) -> Result<Self> {
        if s_tilde_coeffs.len() < 3 {
            return Err(Error::DimensionMismatch {
                expected: 3,
                got: s_tilde_coeffs.len(),
            });
        }
        let n = s_tilde_coeffs.len() - 2;
        let base_vars = s_tilde_coeffs[0].variables().to_vec();
        let refs: Vec<&str> = base_vars.iter().map(|s| s.as_str()).collect();
        if s_tilde_coeffs[n + 1] != MultiPoly::constant(&refs, BigRational::one()) {
            return Err(Error::PipelineBug(
                "s_tilde is not monic of degree n+1".into(),
            ));
        }
        if !s_tilde_coeffs[n].is_zero() {
            return Err(Error::PipelineBug("s_tilde has an x^n term".into()));
        }
        let modulus: Vec<MultiPoly> = (1..s_tilde_coeffs.len())
            .map(|j| s_tilde_coeffs[j].scale(&rat(j as i64, 1)))
            .collect();
        let lead = rat((n + 1) as i64, 1);
        Ok(Self {
            base_vars,
            s_tilde_coeffs,
            modulus,
            n,
            lead,
        })
    }

    pub fn rank(&self) -> usize {
        self.n
    }

    pub fn base_vars(&self) -> &[String] {
        &self.base_vars
    }

    pub fn s_tilde_coeffs(&self) -> &[MultiPoly] {
        &self.s_tilde_coeffs
    }

    pub fn modulus_coeffs(&self) -> &[MultiPoly] {
        &self.modulus
    }

    fn zero_base(&self) -> MultiPoly {
        let refs: Vec<&str> = self.base_vars.iter().map(|s| s.as_str()).collect();
        MultiPoly::zero(&refs)
    }

    fn one_base(&self) -> MultiPoly {
        let refs: Vec<&str> = self.base_vars.iter().map(|s| s.as_str()).collect();
        MultiPoly::constant(&refs, BigRational::one())
    }

    /// The class of x^{k} for 0 <= k < n.
    pub fn basis_element(&self, k: usize) -> RingElement {
        let mut coeffs = vec![self.zero_base(); self.n];
        coeffs[k] = self.one_base();
        RingElement { coeffs }
    }

    /// The unit class.
    pub fn one(&self) -> RingElement {
        self.basis_element(0)
    }

    /// Reduce an x-polynomial (ascending coefficients over the base) modulo
    /// d s_tilde/dx. Exact: the modulus has constant leading coefficient.
    pub fn reduce(&self, poly: &[MultiPoly]) -> Result<Vec<MultiPoly>> {
        let mut v: Vec<MultiPoly> = poly.to_vec();
        while v.len() > self.n {
            let d = v.len() - 1;
            let c = v[d].clone();
            if !c.is_zero() {
                let factor = c.scale(&(BigRational::one() / &self.lead));
                for (j, m) in self.modulus.iter().enumerate() {
                    let t = factor.mul(m)?;
                    v[d - self.n + j] = &v[d - self.n + j] - &t;
                }
            }
            debug_assert!(v[d].is_zero());
            v.pop();
        }
        while v.len() < self.n {
            v.push(self.zero_base());
        }
        Ok(v)
    }

    /// Kodaira–Spencer image of a vector field given in the coordinate
    /// basis of the base: sum_k X_k x^{k-1}.
    pub fn kodaira_spencer(&self, x_coeffs: &[MultiPoly]) -> Result<RingElement> {
        if x_coeffs.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: x_coeffs.len(),
            });
        }
        Ok(RingElement {
            coeffs: self.reduce(x_coeffs)?,
        })
    }

    /// Product in the quotient ring.
    pub fn multiply(&self, u: &RingElement, v: &RingElement) -> Result<RingElement> {
        if u.coeffs.len() != self.n || v.coeffs.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: u.coeffs.len().max(v.coeffs.len()),
            });
        }
        let mut prod = vec![self.zero_base(); 2 * self.n - 1];
        for (i, a) in u.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in v.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let t = a.mul(b)?;
                prod[i + j] = (&prod[i + j] + &t).clone();
            }
        }
        Ok(RingElement {
            coeffs: self.reduce(&prod)?,
        })
    }

    /// Residue pairing by the Euler–Jacobi rule: the x^{n-1} coefficient of
    /// the reduced product, divided by the leading coefficient n+1.
    pub fn residue_pairing(&self, u: &RingElement, v: &RingElement) -> Result<MultiPoly> {
        let p = self.multiply(u, v)?;
        Ok(p.coeffs[self.n - 1].scale(&(BigRational::one() / &self.lead)))
    }

    /// Trilinear residue form: same rule applied to a triple product.
    pub fn residue_triple(
        &self,
        u: &RingElement,
        v: &RingElement,
        w: &RingElement,
    ) -> Result<MultiPoly> {
        let p = self.multiply(&self.multiply(u, v)?, w)?;
        Ok(p.coeffs[self.n - 1].scale(&(BigRational::one() / &self.lead)))
    }

    /// Gram matrix of the pairing on the monomial basis, as polynomials.
    pub fn gram_matrix(&self) -> Result<Vec<Vec<MultiPoly>>> {
        let mut g = vec![vec![self.zero_base(); self.n]; self.n];
        for i in 0..self.n {
            for j in i..self.n {
                let p = self.residue_pairing(&self.basis_element(i), &self.basis_element(j))?;
                g[i][j] = p.clone();
                g[j][i] = p;
            }
        }
        Ok(g)
    }

    /// Numeric critical points: roots of d s_tilde/dx at a base point.
    pub fn critical_points(&self, base: &[Complex64]) -> Result<Vec<Complex64>> {
        let coeffs: Vec<Complex64> = self
            .modulus
            .iter()
            .map(|c| c.eval(base))
            .collect::<Result<_>>()?;
        roots_from_coeffs(&coeffs, &RootConfig::default())
    }

    /// Value of d2 s_tilde/dx2 at (x, base).
    pub fn second_derivative_at(&self, x: Complex64, base: &[Complex64]) -> Result<Complex64> {
        let mut acc = Complex64::new(0.0, 0.0);
        let mut xp = Complex64::new(1.0, 0.0);
        for (j, c) in self.modulus.iter().enumerate().skip(1) {
            acc += c.eval(base)? * (j as f64) * xp;
            xp *= x;
        }
        Ok(acc)
    }

    /// Value of s_tilde at (x, base).
    pub fn s_tilde_at(&self, x: Complex64, base: &[Complex64]) -> Result<Complex64> {
        let mut acc = Complex64::new(0.0, 0.0);
        let mut xp = Complex64::new(1.0, 0.0);
        for c in &self.s_tilde_coeffs {
            acc += c.eval(base)? * xp;
            xp *= x;
        }
        Ok(acc)
    }

    /// Independent numeric oracle for the pairing: the sum over simple
    /// critical points of f*g / s_tilde''.
    pub fn pairing_by_critical_sum(
        &self,
        u: &RingElement,
        v: &RingElement,
        base: &[Complex64],
    ) -> Result<Complex64> {
        let crit = self.critical_points(base)?;
        let mut acc = Complex64::new(0.0, 0.0);
        for &xc in &crit {
            let hess = self.second_derivative_at(xc, base)?;
            if hess.norm() < 1e-12 {
                return Err(Error::Degenerate(
                    "critical point is not simple".to_string(),
                ));
            }
            acc += u.eval(xc, base)? * v.eval(xc, base)? / hess;
        }
        Ok(acc)
    }

    /// Same oracle for the trilinear form.
    pub fn triple_by_critical_sum(
        &self,
        u: &RingElement,
        v: &RingElement,
        w: &RingElement,
        base: &[Complex64],
    ) -> Result<Complex64> {
        let crit = self.critical_points(base)?;
        let mut acc = Complex64::new(0.0, 0.0);
        for &xc in &crit {
            let hess = self.second_derivative_at(xc, base)?;
            if hess.norm() < 1e-12 {
                return Err(Error::Degenerate(
                    "critical point is not simple".to_string(),
                ));
            }
            acc += u.eval(xc, base)? * v.eval(xc, base)? * w.eval(xc, base)? / hess;
        }
        Ok(acc)
    }

    /// True when the base point sits comfortably off the discriminant:
    /// critical points pairwise separated by more than `min_gap` and the
    /// discriminant of the modulus above `min_disc` in absolute value.
    pub fn off_discriminant(&self, base: &[Complex64], min_gap: f64, min_disc: f64) -> bool {
        let crit = match self.critical_points(base) {
            Ok(c) => c,
            Err(_) => return false,
        };
        let lc = (self.n + 1) as f64;
        let mut disc = lc.powi(2 * self.n as i32 - 2);
        for i in 0..crit.len() {
            for j in i + 1..crit.len() {
                let d = (crit[i] - crit[j]).norm();
                if d < min_gap {
                    return false;
                }
                disc *= d * d;
            }
        }
        disc > min_disc
    }

    /// Draw a rational base point off the discriminant; deterministic given
    /// the RNG state.
    pub fn sample_rational_base(&self, rng: &mut impl Rng) -> Result<Vec<BigRational>> {
        for _ in 0..2000 {
            let cand: Vec<BigRational> = (0..self.base_vars.len())
                .map(|_| {
                    let p = rng.gen_range(-12i64..=12);
                    let q = rng.gen_range(1i64..=6);
                    rat(p, q)
                })
                .collect();
            if cand.iter().all(|c| c.is_zero()) {
                continue;
            }
            let numeric: Vec<Complex64> = cand
                .iter()
                .map(|r| Complex64::new(crate::poly::rat_to_f64(r), 0.0))
                .collect();
            if self.off_discriminant(&numeric, 1e-3, 1e-8) {
                return Ok(cand);
            }
        }
        Err(Error::Degenerate(
            "could not sample a base point off the discriminant".to_string(),
        ))
    }
}

/// Convenience: the ring element representing a plain x-polynomial with
/// rational coefficients, e.g. test vectors.
pub fn element_from_x_poly(ring: &JacobiRing, coeffs: &[BigRational]) -> Result<RingElement> {
    let refs: Vec<&str> = ring.base_vars().iter().map(|s| s.as_str()).collect();
    let lifted: Vec<MultiPoly> = coeffs
        .iter()
        .map(|c| MultiPoly::constant(&refs, c.clone()))
        .collect();
    Ok(RingElement {
        coeffs: ring.reduce(&lifted)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::get_unfolding;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ring(n: usize) -> JacobiRing {
        JacobiRing::new(&get_unfolding(LieType::A, n).unwrap()).unwrap()
    }

    #[test]
    fn kodaira_spencer_basis_images() {
        let r2 = ring(2);
        let e1 = r2
            .kodaira_spencer(&[r2.one_base(), r2.zero_base()])
            .unwrap();
        assert_eq!(e1, r2.basis_element(0));
        let e2 = r2
            .kodaira_spencer(&[r2.zero_base(), r2.one_base()])
            .unwrap();
        assert_eq!(e2, r2.basis_element(1));
        let r3 = ring(3);
        let e3 = r3
            .kodaira_spencer(&[r3.zero_base(), r3.zero_base(), r3.one_base()])
            .unwrap();
        assert_eq!(e3, r3.basis_element(2));
    }

    #[test]
    fn a2_multiplication_table() {
        let r = ring(2);
        let x = r.basis_element(1);
        let xx = r.multiply(&x, &x).unwrap();
        // x * x = -b2/3
        let refs = ["b1", "b2"];
        let want = MultiPoly::monomial(&refs, &[0, 1], rat(-1, 3)).unwrap();
        assert_eq!(xx.coeffs[0], want);
        assert!(xx.coeffs[1].is_zero());
        // unit law
        let v = r.multiply(&r.one(), &x).unwrap();
        assert_eq!(v, x);
    }

    #[test]
    fn a3_multiplication_table() {
        let r = ring(3);
        let x = r.basis_element(1);
        let x2 = r.basis_element(2);
        let p = r.multiply(&x, &x2).unwrap();
        // x * x^2 = -(b3/2) x - b2/4
        let refs = ["b1", "b2", "b3"];
        assert_eq!(
            p.coeffs[0],
            MultiPoly::monomial(&refs, &[0, 1, 0], rat(-1, 4)).unwrap()
        );
        assert_eq!(
            p.coeffs[1],
            MultiPoly::monomial(&refs, &[0, 0, 1], rat(-1, 2)).unwrap()
        );
        assert!(p.coeffs[2].is_zero());
    }

    #[test]
    fn a2_pairings() {
        let r = ring(2);
        let one = r.one();
        let x = r.basis_element(1);
        let refs = ["b1", "b2"];
        assert_eq!(
            r.residue_pairing(&one, &x).unwrap(),
            MultiPoly::constant(&refs, rat(1, 3))
        );
        assert!(r.residue_pairing(&one, &one).unwrap().is_zero());
        assert!(r.residue_pairing(&x, &x).unwrap().is_zero());
    }

    #[test]
    fn a3_pairing_example() {
        let r = ring(3);
        let x2 = r.basis_element(2);
        let refs = ["b1", "b2", "b3"];
        assert_eq!(
            r.residue_pairing(&x2, &x2).unwrap(),
            MultiPoly::monomial(&refs, &[0, 0, 1], rat(-1, 8)).unwrap()
        );
    }

    #[test]
    fn a2_triple_examples() {
        let r = ring(2);
        let one = r.one();
        let x = r.basis_element(1);
        let refs = ["b1", "b2"];
        assert_eq!(
            r.residue_triple(&x, &x, &x).unwrap(),
            MultiPoly::monomial(&refs, &[0, 1], rat(-1, 9)).unwrap()
        );
        assert_eq!(
            r.residue_triple(&one, &one, &x).unwrap(),
            MultiPoly::constant(&refs, rat(1, 3))
        );
    }

    #[test]
    fn triple_with_unit_collapses_to_pairing() {
        for n in 1..=4 {
            let r = ring(n);
            for i in 0..n {
                for j in 0..n {
                    let u = r.basis_element(i);
                    let v = r.basis_element(j);
                    assert_eq!(
                        r.residue_triple(&r.one(), &u, &v).unwrap(),
                        r.residue_pairing(&u, &v).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn frobenius_property_exact() {
        // <u*v, w> = <u, v*w> on all basis triples for n up to 5.
        for n in 2..=5 {
            let r = ring(n);
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        let u = r.basis_element(i);
                        let v = r.basis_element(j);
                        let w = r.basis_element(k);
                        let uv = r.multiply(&u, &v).unwrap();
                        let vw = r.multiply(&v, &w).unwrap();
                        assert_eq!(
                            r.residue_pairing(&uv, &w).unwrap(),
                            r.residue_pairing(&u, &vw).unwrap()
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn ring_is_commutative_and_associative() {
        let r = ring(4);
        let u = r.basis_element(2);
        let v = r.basis_element(3);
        let w = r.basis_element(1);
        assert_eq!(r.multiply(&u, &v).unwrap(), r.multiply(&v, &u).unwrap());
        let uv_w = r.multiply(&r.multiply(&u, &v).unwrap(), &w).unwrap();
        let u_vw = r.multiply(&u, &r.multiply(&v, &w).unwrap()).unwrap();
        assert_eq!(uv_w, u_vw);
    }

    #[test]
    fn gram_determinant_is_nonzero() {
        // Evaluating the polynomial Gram determinant at b = 0 yields the
        // antidiagonal matrix with entries 1/(n+1), so the determinant is
        // not the zero polynomial.
        for n in 1..=5 {
            let r = ring(n);
            let g = r.gram_matrix().unwrap();
            let zeros = vec![rat(0, 1); n];
            let mut m = crate::ratmat::RatMat::zeros(n, n);
            for i in 0..n {
                for j in 0..n {
                    m[(i, j)] = g[i][j].eval_exact(&zeros).unwrap();
                }
            }
            let det = m.det().unwrap();
            assert!(!det.is_zero(), "rank {n}");
        }
    }

    #[test]
    fn pairing_matches_critical_point_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(0xF40B);
        for n in 2..=4 {
            let r = ring(n);
            for _ in 0..10 {
                let b = r.sample_rational_base(&mut rng).unwrap();
                let point: Vec<Complex64> = b
                    .iter()
                    .map(|x| Complex64::new(crate::poly::rat_to_f64(x), 0.0))
                    .collect();
                for i in 0..n {
                    for j in 0..n {
                        let u = r.basis_element(i);
                        let v = r.basis_element(j);
                        let exact = r.residue_pairing(&u, &v).unwrap();
                        let exact_val = exact.eval(&point).unwrap();
                        let numeric = r.pairing_by_critical_sum(&u, &v, &point).unwrap();
                        let scale = exact_val.norm().max(1.0);
                        assert!(
                            (exact_val - numeric).norm() / scale < 1e-9,
                            "n={n} i={i} j={j}: {exact_val} vs {numeric}"
                        );
                    }
                }
            }
        }
    }
}
