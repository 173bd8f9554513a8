//! Exact multivariate polynomials over arbitrary-precision rationals, with an
//! optional quasihomogeneous grading, plus complex univariate root finding.
//!
//! Coefficients are `BigRational` throughout; numerics enter only at
//! evaluation and root-finding time. Terms are kept in graded-lexicographic
//! order so the canonical text form is byte-stable.

mod roots;

pub use roots::{roots_from_coeffs, RootConfig};

use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Shorthand for an exact rational `n/d`.
pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Convert an exact rational to the nearest double.
pub fn rat_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// An exponent vector, ordered graded-lexicographically (total degree first).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn total_degree(&self) -> u32 {
        self.0.iter().sum()
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

/// A vector of complex evaluation points; entries are always finite.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexVector {
    entries: Vec<Complex64>,
}

impl ComplexVector {
    /// Wrap entries, rejecting NaN/Inf.
    pub fn new(entries: Vec<Complex64>) -> Result<Self> {
        if entries
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::NonFinite("ComplexVector".into()));
        }
        Ok(Self { entries })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.entries
    }
}

impl std::ops::Deref for ComplexVector {
    type Target = [Complex64];
    fn deref(&self) -> &Self::Target {
        &self.entries
    }
}

/// Exact sparse multivariate polynomial over rationals.
#[derive(Debug, Clone)]
pub struct MultiPoly {
    vars: Vec<String>,
    terms: BTreeMap<Monomial, BigRational>,
    weights: Option<Vec<BigRational>>,
}

/// Equality is semantic: same variable frame and same terms. The optional
/// weight annotation is bookkeeping and does not affect identity.
impl PartialEq for MultiPoly {
    fn eq(&self, other: &Self) -> bool {
        self.vars == other.vars && self.terms == other.terms
    }
}

impl Eq for MultiPoly {}

impl MultiPoly {
    /// The zero polynomial over the given variables.
    pub fn zero(vars: &[&str]) -> Self {
        Self {
            vars: vars.iter().map(|s| s.to_string()).collect(),
            terms: BTreeMap::new(),
            weights: None,
        }
    }

    fn zero_owned(vars: Vec<String>) -> Self {
        Self {
            vars,
            terms: BTreeMap::new(),
            weights: None,
        }
    }

    /// A constant polynomial.
    pub fn constant(vars: &[&str], c: BigRational) -> Self {
        let mut p = Self::zero(vars);
        if !c.is_zero() {
            p.terms.insert(Monomial(vec![0; p.vars.len()]), c);
        }
        p
    }

    /// The named variable as a degree-one polynomial.
    pub fn var(vars: &[&str], name: &str) -> Result<Self> {
        let mut p = Self::zero(vars);
        let idx = p.var_index(name)?;
        let mut exps = vec![0; p.vars.len()];
        exps[idx] = 1;
        p.terms.insert(Monomial(exps), BigRational::one());
        Ok(p)
    }

    /// A single term `coeff * vars^exps`.
    pub fn monomial(vars: &[&str], exps: &[u32], coeff: BigRational) -> Result<Self> {
        let mut p = Self::zero(vars);
        if exps.len() != p.vars.len() {
            return Err(Error::DimensionMismatch {
                expected: p.vars.len(),
                got: exps.len(),
            });
        }
        if !coeff.is_zero() {
            p.terms.insert(Monomial(exps.to_vec()), coeff);
        }
        Ok(p)
    }

    pub fn variables(&self) -> &[String] {
        &self.vars
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Iterate terms in ascending graded-lex order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    /// Total degree; 0 for the zero polynomial.
    pub fn total_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|m| m.total_degree())
            .max()
            .unwrap_or(0)
    }

    /// The coefficient of an exponent vector (zero if absent).
    pub fn coeff(&self, exps: &[u32]) -> BigRational {
        self.terms
            .get(&Monomial(exps.to_vec()))
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    /// The constant term.
    pub fn constant_term(&self) -> BigRational {
        self.coeff(&vec![0; self.vars.len()])
    }

    pub fn var_index(&self, name: &str) -> Result<usize> {
        self.vars
            .iter()
            .position(|v| v == name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    fn check_same_vars(&self, other: &Self) -> Result<()> {
        if self.vars != other.vars {
            return Err(Error::VariableMismatch(
                self.vars.clone(),
                other.vars.clone(),
            ));
        }
        Ok(())
    }

    fn add_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                let sum = e.get() + &c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    /// Exact sum. Errors on mismatched variable lists.
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_vars(other)?;
        let mut out = self.clone();
        out.weights = self.weights.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    /// Exact product. Errors on mismatched variable lists.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_same_vars(other)?;
        let mut out = Self::zero_owned(self.vars.clone());
        out.weights = self.weights.clone();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let exps: Vec<u32> = ma.0.iter().zip(&mb.0).map(|(a, b)| a + b).collect();
                out.add_term(Monomial(exps), ca * cb);
            }
        }
        Ok(out)
    }

    /// Multiply by an exact scalar.
    pub fn scale(&self, c: &BigRational) -> Self {
        let mut out = Self::zero_owned(self.vars.clone());
        out.weights = self.weights.clone();
        if c.is_zero() {
            return out;
        }
        for (m, a) in &self.terms {
            out.terms.insert(m.clone(), a * c);
        }
        out
    }

    /// Integer power by repeated multiplication.
    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::constant(
            &self.vars.iter().map(|s| s.as_str()).collect::<Vec<_>>(),
            BigRational::one(),
        );
        out.weights = self.weights.clone();
        for _ in 0..k {
            out = out.mul(self).expect("same vars");
        }
        out
    }

    /// Exact formal partial derivative.
    pub fn diff(&self, var: &str) -> Result<Self> {
        let idx = self.var_index(var)?;
        let mut out = Self::zero_owned(self.vars.clone());
        out.weights = self.weights.clone();
        for (m, c) in &self.terms {
            let e = m.0[idx];
            if e == 0 {
                continue;
            }
            let mut exps = m.0.clone();
            exps[idx] = e - 1;
            out.add_term(Monomial(exps), c * BigRational::from(BigInt::from(e)));
        }
        Ok(out)
    }

    fn sorted_terms(&self) -> Vec<(&[u32], &BigRational)> {
        self.terms
            .iter()
            .map(|(m, c)| (m.0.as_slice(), c))
            .collect()
    }

    /// Horner-style evaluation at a complex point.
    pub fn eval(&self, point: &[Complex64]) -> Result<Complex64> {
        if point.len() != self.vars.len() {
            return Err(Error::DimensionMismatch {
                expected: self.vars.len(),
                got: point.len(),
            });
        }
        Ok(eval_rec(&self.sorted_terms(), 0, point, &|c| {
            Complex64::new(rat_to_f64(c), 0.0)
        }))
    }

    /// Horner-style evaluation at an exact rational point.
    pub fn eval_exact(&self, point: &[BigRational]) -> Result<BigRational> {
        if point.len() != self.vars.len() {
            return Err(Error::DimensionMismatch {
                expected: self.vars.len(),
                got: point.len(),
            });
        }
        Ok(eval_rec(&self.sorted_terms(), 0, point, &|c| c.clone()))
    }

    /// Substitute every variable by a polynomial over a common new variable
    /// list. The map must cover all variables of `self`.
    pub fn substitute(&self, images: &BTreeMap<String, MultiPoly>) -> Result<Self> {
        let mut target_vars: Option<Vec<String>> = None;
        for v in &self.vars {
            let img = images
                .get(v)
                .ok_or_else(|| Error::UnknownVariable(v.clone()))?;
            match &target_vars {
                None => target_vars = Some(img.vars.clone()),
                Some(tv) => {
                    if tv != &img.vars {
                        return Err(Error::VariableMismatch(tv.clone(), img.vars.clone()));
                    }
                }
            }
        }
        let target_vars = target_vars.unwrap_or_else(|| self.vars.clone());
        let tv_refs: Vec<&str> = target_vars.iter().map(|s| s.as_str()).collect();
        let mut out = MultiPoly::zero(&tv_refs);
        for (m, c) in &self.terms {
            let mut term = MultiPoly::constant(&tv_refs, c.clone());
            for (idx, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    term = term.mul(&images[&self.vars[idx]].pow(e))?;
                }
            }
            out = out.add(&term)?;
        }
        Ok(out)
    }

    /// Re-express over a superset variable list (same polynomial).
    pub fn embed(&self, new_vars: &[&str]) -> Result<Self> {
        let positions: Vec<usize> = self
            .vars
            .iter()
            .map(|v| {
                new_vars
                    .iter()
                    .position(|nv| nv == v)
                    .ok_or_else(|| Error::UnknownVariable(v.clone()))
            })
            .collect::<Result<_>>()?;
        let mut out = MultiPoly::zero(new_vars);
        for (m, c) in &self.terms {
            let mut exps = vec![0u32; new_vars.len()];
            for (i, &e) in m.0.iter().enumerate() {
                exps[positions[i]] = e;
            }
            out.terms.insert(Monomial(exps), c.clone());
        }
        Ok(out)
    }

    /// Coefficients of powers of `var`, as polynomials over the remaining
    /// variables, ascending from `var^0`.
    pub fn coeffs_in(&self, var: &str) -> Result<Vec<MultiPoly>> {
        let idx = self.var_index(var)?;
        let rest: Vec<&str> = self
            .vars
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != idx)
            .map(|(_, v)| v.as_str())
            .collect();
        let deg = self.terms.keys().map(|m| m.0[idx]).max().unwrap_or(0) as usize;
        let mut out = vec![MultiPoly::zero(&rest); deg + 1];
        for (m, c) in &self.terms {
            let k = m.0[idx] as usize;
            let exps: Vec<u32> =
                m.0.iter()
                    .enumerate()
                    .filter(|(i, _)| *i != idx)
                    .map(|(_, &e)| e)
                    .collect();
            out[k].add_term(Monomial(exps), c.clone());
        }
        Ok(out)
    }

    /// Collapse to univariate complex coefficients of `var` after assigning
    /// all other variables.
    pub fn univariate_coeffs(
        &self,
        var: &str,
        assignment: &BTreeMap<String, Complex64>,
    ) -> Result<Vec<Complex64>> {
        let idx = self.var_index(var)?;
        for (i, v) in self.vars.iter().enumerate() {
            if i != idx && self.terms.keys().any(|m| m.0[i] > 0) && !assignment.contains_key(v) {
                return Err(Error::UnknownVariable(format!("{v} (unassigned)")));
            }
        }
        let deg = self.terms.keys().map(|m| m.0[idx]).max().unwrap_or(0) as usize;
        let mut coeffs = vec![Complex64::new(0.0, 0.0); deg + 1];
        for (m, c) in &self.terms {
            let mut val = Complex64::new(rat_to_f64(c), 0.0);
            for (i, &e) in m.0.iter().enumerate() {
                if i != idx && e > 0 {
                    val *= assignment[&self.vars[i]].powu(e);
                }
            }
            coeffs[m.0[idx] as usize] += val;
        }
        Ok(coeffs)
    }

    /// All complex roots in `var` after assigning the other variables;
    /// deterministic (re, im) ordering.
    pub fn univariate_roots(
        &self,
        var: &str,
        assignment: &BTreeMap<String, Complex64>,
        config: &RootConfig,
    ) -> Result<ComplexVector> {
        let coeffs = self.univariate_coeffs(var, assignment)?;
        let roots = roots_from_coeffs(&coeffs, config)?;
        ComplexVector::new(roots)
    }

    /// Attach per-variable grading weights (must all be positive).
    pub fn with_weights(mut self, weights: Vec<BigRational>) -> Result<Self> {
        if weights.len() != self.vars.len() {
            return Err(Error::DimensionMismatch {
                expected: self.vars.len(),
                got: weights.len(),
            });
        }
        if weights.iter().any(|w| !w.is_positive()) {
            return Err(Error::Config("grading weights must be positive".into()));
        }
        self.weights = Some(weights);
        Ok(self)
    }

    pub fn weights(&self) -> Option<&[BigRational]> {
        self.weights.as_deref()
    }

    /// Weighted degree of one exponent vector under the attached weights.
    pub fn weighted_degree(&self, m: &Monomial) -> Option<BigRational> {
        let w = self.weights.as_ref()?;
        let mut d = BigRational::zero();
        for (e, wi) in m.0.iter().zip(w) {
            d += wi * BigRational::from(BigInt::from(*e));
        }
        Some(d)
    }

    /// True iff all terms share one weighted degree. `None` when no weights
    /// are attached.
    pub fn is_quasihomogeneous(&self) -> Option<bool> {
        self.weights.as_ref()?;
        let mut degrees = self.terms.keys().map(|m| self.weighted_degree(m).unwrap());
        let first = match degrees.next() {
            None => return Some(true),
            Some(d) => d,
        };
        Some(degrees.all(|d| d == first))
    }

    /// The common weighted degree of a quasihomogeneous polynomial.
    pub fn quasi_degree(&self) -> Option<BigRational> {
        if self.is_quasihomogeneous()? {
            self.terms
                .keys()
                .next()
                .map(|m| self.weighted_degree(m).unwrap())
        } else {
            None
        }
    }

    /// Canonical text form: terms in descending graded-lex order joined by
    /// ` + `, each `c * v1^a1*...*vk^ak` with zero exponents omitted.
    pub fn canonical_string(&self) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .rev()
            .map(|(m, c)| {
                let mut factors: Vec<String> = Vec::new();
                for (i, &e) in m.0.iter().enumerate() {
                    match e {
                        0 => {}
                        1 => factors.push(self.vars[i].clone()),
                        _ => factors.push(format!("{}^{}", self.vars[i], e)),
                    }
                }
                if factors.is_empty() {
                    format!("{c}")
                } else {
                    format!("{c} * {}", factors.join("*"))
                }
            })
            .collect();
        parts.join(" + ")
    }
}

/// Recursive Horner evaluation over any commutative coefficient target.
fn eval_rec<T>(
    terms: &[(&[u32], &BigRational)],
    vi: usize,
    point: &[T],
    conv: &dyn Fn(&BigRational) -> T,
) -> T
where
    T: Clone + Zero + Add<Output = T> + Mul<Output = T> + OneLike,
{
    if terms.is_empty() {
        return T::zero();
    }
    if vi == point.len() {
        let mut acc = T::zero();
        for (_, c) in terms {
            acc = acc + conv(c);
        }
        return acc;
    }
    let mut groups: BTreeMap<u32, Vec<(&[u32], &BigRational)>> = BTreeMap::new();
    for t in terms {
        groups.entry(t.0[vi]).or_default().push(*t);
    }
    let x = &point[vi];
    let mut acc = T::zero();
    let mut prev: Option<u32> = None;
    for (&e, group) in groups.iter().rev() {
        let val = eval_rec(group, vi + 1, point, conv);
        acc = match prev {
            None => val,
            Some(p) => acc * pow_t(x, p - e) + val,
        };
        prev = Some(e);
    }
    acc * pow_t(x, prev.unwrap_or(0))
}

fn pow_t<T>(x: &T, k: u32) -> T
where
    T: Clone + Zero + Add<Output = T> + Mul<Output = T> + OneLike,
{
    let mut acc: Option<T> = None;
    for _ in 0..k {
        acc = Some(match acc {
            None => x.clone(),
            Some(a) => a * x.clone(),
        });
    }
    acc.unwrap_or_else(T::one_like)
}

/// Multiplicative identity for the two coefficient targets we evaluate into.
trait OneLike {
    fn one_like() -> Self;
}

impl OneLike for Complex64 {
    fn one_like() -> Self {
        Complex64::new(1.0, 0.0)
    }
}

impl OneLike for BigRational {
    fn one_like() -> Self {
        BigRational::one()
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.canonical_string())
    }
}

impl Add for &MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        MultiPoly::add(self, rhs).expect("variable lists must match")
    }
}

impl Sub for &MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        self + &(-rhs)
    }
}

impl Mul for &MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        MultiPoly::mul(self, rhs).expect("variable lists must match")
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        self.scale(&-BigRational::one())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xp(s: &str) -> MultiPoly {
        MultiPoly::var(&["x", "b1", "b2"], s).unwrap()
    }

    fn c(n: i64, d: i64) -> MultiPoly {
        MultiPoly::constant(&["x", "b1", "b2"], rat(n, d))
    }

    /// S-tilde for the rank-2 chain: x^3 + b2 x + b1.
    fn cubic() -> MultiPoly {
        &(&xp("x").pow(3) + &(&xp("b2") * &xp("x"))) + &xp("b1")
    }

    #[test]
    fn add_cancels() {
        let p = &xp("x") + &c(1, 1);
        let q = &xp("x") - &c(1, 1);
        let s = &p + &q;
        assert_eq!(s, xp("x").scale(&rat(2, 1)));
        assert_eq!((&p + &MultiPoly::zero(&["x", "b1", "b2"])), p);
        let r = &(&xp("x").pow(2) + &(&xp("b2") * &xp("x"))) + &-&(&xp("b2") * &xp("x"));
        assert_eq!(r, xp("x").pow(2));
    }

    #[test]
    fn mul_basic() {
        let p = &xp("x") + &c(1, 1);
        let q = &xp("x") - &c(1, 1);
        assert_eq!(&p * &q, &xp("x").pow(2) - &c(1, 1));
        assert_eq!(&p * &c(1, 1), p);
        assert_eq!(&xp("x") * &xp("x"), xp("x").pow(2));
    }

    #[test]
    fn add_rejects_mismatched_vars() {
        let p = MultiPoly::var(&["x"], "x").unwrap();
        let q = MultiPoly::var(&["y"], "y").unwrap();
        assert!(matches!(p.add(&q), Err(Error::VariableMismatch(_, _))));
    }

    #[test]
    fn diff_matches_by_hand() {
        let s = cubic();
        let ds = s.diff("x").unwrap();
        let expected = &xp("x").pow(2).scale(&rat(3, 1)) + &xp("b2");
        assert_eq!(ds, expected);
        assert_eq!(s.diff("b1").unwrap(), c(1, 1));
        assert!(c(7, 2).diff("x").unwrap().is_zero());
        assert!(matches!(s.diff("q"), Err(Error::UnknownVariable(_))));
    }

    #[test]
    fn eval_points() {
        let p = &xp("x").pow(2) + &c(1, 1);
        let at = |x: Complex64| p.eval(&[x, 0.0.into(), 0.0.into()]).unwrap();
        assert_eq!(at(Complex64::new(1.0, 0.0)), Complex64::new(2.0, 0.0));
        let z = at(Complex64::new(0.0, 1.0));
        assert!(z.norm() < 1e-15);
        // S-tilde(0, 5, 0) = b1 = 5.
        let v = cubic()
            .eval(&[0.0.into(), Complex64::new(5.0, 0.0), 0.0.into()])
            .unwrap();
        assert_eq!(v, Complex64::new(5.0, 0.0));
    }

    #[test]
    fn eval_exact_is_exact() {
        let p = cubic();
        let v = p.eval_exact(&[rat(1, 3), rat(-2, 7), rat(5, 11)]).unwrap();
        // (1/3)^3 + (5/11)(1/3) - 2/7 = by hand
        let expect = rat(1, 27) + rat(5, 33) - rat(2, 7);
        assert_eq!(v, expect);
    }

    #[test]
    fn substitute_composes() {
        // p(x) = x^2 with x -> y + 1 gives y^2 + 2y + 1.
        let p = MultiPoly::var(&["x"], "x").unwrap().pow(2);
        let img = &MultiPoly::var(&["y"], "y").unwrap() + &MultiPoly::constant(&["y"], rat(1, 1));
        let mut map = BTreeMap::new();
        map.insert("x".to_string(), img);
        let q = p.substitute(&map).unwrap();
        let y = MultiPoly::var(&["y"], "y").unwrap();
        let expect = &(&y.pow(2) + &y.scale(&rat(2, 1))) + &MultiPoly::constant(&["y"], rat(1, 1));
        assert_eq!(q, expect);
    }

    #[test]
    fn coeffs_in_splits_by_power() {
        let s = cubic();
        let cs = s.coeffs_in("x").unwrap();
        assert_eq!(cs.len(), 4);
        assert_eq!(cs[0], MultiPoly::var(&["b1", "b2"], "b1").unwrap());
        assert_eq!(cs[1], MultiPoly::var(&["b1", "b2"], "b2").unwrap());
        assert!(cs[2].is_zero());
        assert_eq!(cs[3], MultiPoly::constant(&["b1", "b2"], rat(1, 1)));
    }

    #[test]
    fn quasihomogeneity_of_cubic() {
        // weights x=1, b1=3, b2=2 make x^3 + b2 x + b1 quasihomogeneous.
        let s = cubic()
            .with_weights(vec![rat(1, 1), rat(3, 1), rat(2, 1)])
            .unwrap();
        assert_eq!(s.is_quasihomogeneous(), Some(true));
        assert_eq!(s.quasi_degree(), Some(rat(3, 1)));
        let bad = (&cubic() + &xp("x")).with_weights(vec![rat(1, 1), rat(3, 1), rat(2, 1)]);
        assert_eq!(bad.unwrap().is_quasihomogeneous(), Some(false));
        assert_eq!(cubic().is_quasihomogeneous(), None);
    }

    #[test]
    fn canonical_text_is_stable() {
        let p = &(&xp("x").pow(2).scale(&rat(-1, 8)) + &(&xp("b2") * &xp("x"))) + &c(5, 1);
        assert_eq!(p.canonical_string(), "-1/8 * x^2 + 1 * x*b2 + 5");
        assert_eq!(MultiPoly::zero(&["x"]).canonical_string(), "0");
    }

    #[test]
    fn complex_vector_rejects_nan() {
        assert!(ComplexVector::new(vec![Complex64::new(f64::NAN, 0.0)]).is_err());
        assert!(ComplexVector::new(vec![Complex64::new(1.0, -2.0)]).is_ok());
    }
}
