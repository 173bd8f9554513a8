//! Flat coordinates by graded undetermined coefficients.
//!
//! Ansatz: b_k = t_k + Q_k(t_{k+1}, .., t_n) with Q_k a quasihomogeneous
//! polynomial of the weight of b_k and unknown rational coefficients. The
//! pairing of the coordinate fields, pushed through the Jacobian of b(t),
//! must be constant in t; every coefficient of a nonconstant t-monomial is
//! an equation on the unknowns. The system is polynomial, but enough of it
//! is affine-linear at each stage: we repeatedly solve the affine subset
//! exactly, substitute, and finish by verifying every equation at exact
//! rational arithmetic. Inverting t(b) is then a triangular substitution.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::catalog::{LieType, UnfoldingSpec};
use crate::error::{Error, Result};
use crate::jacobi::JacobiRing;
use crate::poly::MultiPoly;
use crate::ratmat::{forced_solutions, RatMat};

#[derive(Debug, Clone)]
pub struct FlatCoords {
    /// t_k as a polynomial in b (t_k = b_k + P_k(b_{k+1}, .., b_n)).
    pub t_of_b: Vec<MultiPoly>,
    /// b_k as a polynomial in t (the inverse substitution).
    pub b_of_t: Vec<MultiPoly>,
    /// The constant metric in the flat coordinates.
    pub eta: RatMat,
}

/// Exponent vectors over t_1..t_n supported on indices > k with weighted
/// degree equal to the weight of b_k.
fn ansatz_monomials(k: usize, weights: &[u32]) -> Vec<Vec<u32>> {
    let n = weights.len();
    let mut out = Vec::new();
    let mut exps = vec![0u32; n];
    // positions k..n-1 (0-based) are t_{k+1}..t_n
    fn rec(pos: usize, rem: u32, weights: &[u32], exps: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if pos == weights.len() {
            if rem == 0 {
                out.push(exps.clone());
            }
            return;
        }
        let w = weights[pos];
        let max = rem / w;
        for e in 0..=max {
            exps[pos] = e;
            rec(pos + 1, rem - e * w, weights, exps, out);
        }
        exps[pos] = 0;
    }
    rec(k, weights[k - 1], weights, &mut exps, &mut out);
    out
}

pub fn flat_coordinates(spec: &UnfoldingSpec) -> Result<FlatCoords> {
    if spec.lie_type != LieType::A {
        return Err(Error::UnsupportedFamily(format!(
            "flat coordinates implemented for A-type only, got {}{}",
            spec.lie_type, spec.rank
        )));
    }
    let n = spec.rank;
    let ring = JacobiRing::new(spec)?;
    let gram = ring.gram_matrix()?;
    // weight of b_k (= weight of t_k) is n + 2 - k
    let weights: Vec<u32> = (1..=n).map(|k| (n + 2 - k) as u32).collect();

    // Unknowns: one coefficient per (k, ansatz monomial).
    let mut unknowns: Vec<(usize, Vec<u32>)> = Vec::new();
    for k in 1..=n {
        for m in ansatz_monomials(k, &weights) {
            unknowns.push((k, m));
        }
    }
    let m_count = unknowns.len();

    let t_names: Vec<String> = (1..=n).map(|k| format!("t{k}")).collect();
    let q_names: Vec<String> = (0..m_count).map(|u| format!("q{u}")).collect();
    let mut tq_names = t_names.clone();
    tq_names.extend(q_names.iter().cloned());
    let tq: Vec<&str> = tq_names.iter().map(|s| s.as_str()).collect();
    let q_refs: Vec<&str> = q_names.iter().map(|s| s.as_str()).collect();
    let t_refs: Vec<&str> = t_names.iter().map(|s| s.as_str()).collect();

    // b_a(t, q) = t_a + sum of q * t-monomial over this parameter's ansatz.
    let mut b_tq: Vec<MultiPoly> = Vec::with_capacity(n);
    for a in 1..=n {
        let mut p = MultiPoly::var(&tq, &format!("t{a}"))?;
        for (u, (k, te)) in unknowns.iter().enumerate() {
            if *k == a {
                let mut exps = vec![0u32; n + m_count];
                exps[..n].copy_from_slice(te);
                exps[n + u] = 1;
                p = p.add(&MultiPoly::monomial(&tq, &exps, BigRational::one())?)?;
            }
        }
        b_tq.push(p);
    }

    // Jacobian d b_a / d t_i over (t, q).
    let mut jac = vec![vec![MultiPoly::zero(&tq); n]; n];
    for a in 0..n {
        for i in 0..n {
            jac[a][i] = b_tq[a].diff(&format!("t{}", i + 1))?;
        }
    }

    // Gram entries with b -> b(t, q) substituted.
    let mut images: BTreeMap<String, MultiPoly> = BTreeMap::new();
    for a in 0..n {
        images.insert(format!("b{}", a + 1), b_tq[a].clone());
    }
    let mut gram_tq = vec![vec![MultiPoly::zero(&tq); n]; n];
    for a in 0..n {
        for c in a..n {
            let g = gram[a][c].substitute(&images)?;
            gram_tq[a][c] = g.clone();
            gram_tq[c][a] = g;
        }
    }

    // eta_ij(t, q) = sum_{a,c} J_{a,i} J_{c,j} G_{ac}(t, q); keep i <= j.
    let mut eta_tq: Vec<Vec<MultiPoly>> = vec![vec![MultiPoly::zero(&tq); n]; n];
    for i in 0..n {
        for j in i..n {
            let mut acc = MultiPoly::zero(&tq);
            for a in 0..n {
                if jac[a][i].is_zero() {
                    continue;
                }
                for c in 0..n {
                    if jac[c][j].is_zero() || gram_tq[a][c].is_zero() {
                        continue;
                    }
                    let term = jac[a][i].mul(&jac[c][j])?.mul(&gram_tq[a][c])?;
                    acc = acc.add(&term)?;
                }
            }
            eta_tq[i][j] = acc;
        }
    }

    // Equations: the coefficient of each nonconstant t-monomial, as a
    // polynomial over the unknowns, must vanish.
    let mut equations: Vec<MultiPoly> = Vec::new();
    for i in 0..n {
        for j in i..n {
            let mut groups: BTreeMap<Vec<u32>, MultiPoly> = BTreeMap::new();
            for (mono, coeff) in eta_tq[i][j].terms() {
                let t_part = mono.0[..n].to_vec();
                if t_part.iter().all(|&e| e == 0) {
                    continue;
                }
                let q_part = mono.0[n..].to_vec();
                let entry = groups
                    .entry(t_part)
                    .or_insert_with(|| MultiPoly::zero(&q_refs));
                let term = MultiPoly::monomial(&q_refs, &q_part, coeff.clone())?;
                *entry = entry.add(&term)?;
            }
            equations.extend(groups.into_values().filter(|e| !e.is_zero()));
        }
    }

    // Solve: rounds of exact elimination on the affine-linear subset.
    let mut values: Vec<Option<BigRational>> = vec![None; m_count];
    let mut eqs = equations;
    loop {
        // Substitute the values found so far.
        let mut q_images: BTreeMap<String, MultiPoly> = BTreeMap::new();
        for (u, name) in q_names.iter().enumerate() {
            let img = match &values[u] {
                Some(v) => MultiPoly::constant(&q_refs, v.clone()),
                None => MultiPoly::var(&q_refs, name)?,
            };
            q_images.insert(name.clone(), img);
        }
        eqs = eqs
            .iter()
            .map(|e| e.substitute(&q_images))
            .collect::<Result<Vec<_>>>()?;
        eqs.retain(|e| !e.is_zero());
        if let Some(bad) = eqs.iter().find(|e| e.total_degree() == 0) {
            return Err(Error::PipelineBug(format!(
                "flat-coordinate system inconsistent: {bad} = 0"
            )));
        }
        if eqs.is_empty() {
            if values.iter().all(|v| v.is_some()) {
                break;
            }
            return Err(Error::PipelineBug(
                "flat-coordinate system is underdetermined".into(),
            ));
        }
        let linear: Vec<&MultiPoly> = eqs.iter().filter(|e| e.total_degree() <= 1).collect();
        if linear.is_empty() {
            return Err(Error::PipelineBug(
                "flat-coordinate system has no affine-linear equations left".into(),
            ));
        }
        let mut a = RatMat::zeros(linear.len(), m_count);
        let mut rhs = vec![BigRational::zero(); linear.len()];
        for (r, e) in linear.iter().enumerate() {
            for (mono, coeff) in e.terms() {
                match mono.0.iter().position(|&x| x > 0) {
                    None => rhs[r] -= coeff,
                    Some(u) => a[(r, u)] = coeff.clone(),
                }
            }
        }
        let forced = forced_solutions(&a, &rhs)
            .map_err(|e| Error::PipelineBug(format!("flat-coordinate linear stage failed: {e}")))?;
        let mut progress = false;
        for (u, v) in forced {
            if values[u].is_none() {
                values[u] = Some(v);
                progress = true;
            }
        }
        if !progress {
            return Err(Error::PipelineBug(
                "flat-coordinate solver made no progress".into(),
            ));
        }
    }
    let q_values: Vec<BigRational> = values.into_iter().map(|v| v.unwrap()).collect();

    // Substitute the solution everywhere; eta must come out exactly constant.
    let mut final_images: BTreeMap<String, MultiPoly> = BTreeMap::new();
    for (k, name) in t_names.iter().enumerate() {
        let _ = k;
        final_images.insert(name.clone(), MultiPoly::var(&t_refs, name)?);
    }
    for (u, name) in q_names.iter().enumerate() {
        final_images.insert(
            name.clone(),
            MultiPoly::constant(&t_refs, q_values[u].clone()),
        );
    }
    let b_of_t: Vec<MultiPoly> = b_tq
        .iter()
        .map(|p| p.substitute(&final_images))
        .collect::<Result<_>>()?;
    let mut eta = RatMat::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let e = eta_tq[i][j].substitute(&final_images)?;
            if !e.is_zero() && e.total_degree() > 0 {
                return Err(Error::PipelineBug(format!(
                    "metric entry ({i},{j}) did not become constant: {e}"
                )));
            }
            let v = e.constant_term();
            eta[(i, j)] = v.clone();
            eta[(j, i)] = v;
        }
    }
    eta.inverse()
        .map_err(|_| Error::PipelineBug("flat metric is degenerate".into()))?;

    // Invert the triangular substitution: t_k = b_k - Q_k(t_{k+1}, .., t_n).
    let b_names: Vec<String> = (1..=n).map(|k| format!("b{k}")).collect();
    let b_refs: Vec<&str> = b_names.iter().map(|s| s.as_str()).collect();
    let mut t_of_b: Vec<MultiPoly> = vec![MultiPoly::zero(&b_refs); n];
    for k in (1..=n).rev() {
        let tk_var = MultiPoly::var(&t_refs, &format!("t{k}"))?;
        let qk = &b_of_t[k - 1] - &tk_var; // Q_k over t
        for (mono, _) in qk.terms() {
            if mono.0[..k].iter().any(|&e| e > 0) {
                return Err(Error::PipelineBug(format!(
                    "Q_{k} involves t-indices <= {k}"
                )));
            }
        }
        let mut im: BTreeMap<String, MultiPoly> = BTreeMap::new();
        for j in 1..=n {
            let img = if j > k {
                t_of_b[j - 1].clone()
            } else {
                MultiPoly::zero(&b_refs)
            };
            im.insert(format!("t{j}"), img);
        }
        let qk_b = qk.substitute(&im)?;
        let bk_var = MultiPoly::var(&b_refs, &format!("b{k}"))?;
        t_of_b[k - 1] = &bk_var - &qk_b;
    }

    // Round trip: t(b(t)) must be the identity exactly.
    let mut back: BTreeMap<String, MultiPoly> = BTreeMap::new();
    for a in 1..=n {
        back.insert(format!("b{a}"), b_of_t[a - 1].clone());
    }
    for k in 1..=n {
        let composed = t_of_b[k - 1].substitute(&back)?;
        let expect = MultiPoly::var(&t_refs, &format!("t{k}"))?;
        if &composed - &expect != MultiPoly::zero(&t_refs) {
            return Err(Error::PipelineBug(format!(
                "coordinate inversion failed for t{k}"
            )));
        }
    }
    // Shape: t_k - b_k only involves b-indices > k.
    for k in 1..=n {
        let bk_var = MultiPoly::var(&b_refs, &format!("b{k}"))?;
        let pk = &t_of_b[k - 1] - &bk_var;
        for (mono, _) in pk.terms() {
            if mono.0[..k].iter().any(|&e| e > 0) {
                return Err(Error::PipelineBug(format!(
                    "t{k} correction involves b-indices <= {k}"
                )));
            }
        }
    }

    Ok(FlatCoords {
        t_of_b,
        b_of_t,
        eta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::get_unfolding;
    use crate::poly::rat;

    #[test]
    fn ansatz_enumeration_matches_hand_count() {
        // Rank 5 weights (6,5,4,3,2): Q_5 and Q_4 empty; Q_3 = {t5^2};
        // Q_2 = {t4 t5}; Q_1 = {t3 t5, t4^2, t5^3}.
        let w: Vec<u32> = vec![6, 5, 4, 3, 2];
        assert_eq!(ansatz_monomials(5, &w), Vec::<Vec<u32>>::new());
        assert_eq!(ansatz_monomials(4, &w), Vec::<Vec<u32>>::new());
        assert_eq!(ansatz_monomials(3, &w), vec![vec![0, 0, 0, 0, 2]]);
        assert_eq!(ansatz_monomials(2, &w), vec![vec![0, 0, 0, 1, 1]]);
        let q1 = ansatz_monomials(1, &w);
        assert_eq!(q1.len(), 3);
        assert!(q1.contains(&vec![0, 0, 1, 0, 1]));
        assert!(q1.contains(&vec![0, 0, 0, 2, 0]));
        assert!(q1.contains(&vec![0, 0, 0, 0, 3]));
    }

    #[test]
    fn a1_and_a2_are_already_flat() {
        for n in 1..=2 {
            let fc = flat_coordinates(&get_unfolding(LieType::A, n).unwrap()).unwrap();
            let b_refs: Vec<String> = (1..=n).map(|k| format!("b{k}")).collect();
            let refs: Vec<&str> = b_refs.iter().map(|s| s.as_str()).collect();
            for k in 1..=n {
                assert_eq!(
                    fc.t_of_b[k - 1],
                    MultiPoly::var(&refs, &format!("b{k}")).unwrap()
                );
            }
        }
        let fc2 = flat_coordinates(&get_unfolding(LieType::A, 2).unwrap()).unwrap();
        assert_eq!(fc2.eta[(0, 0)], rat(0, 1));
        assert_eq!(fc2.eta[(0, 1)], rat(1, 3));
        assert_eq!(fc2.eta[(1, 1)], rat(0, 1));
    }

    #[test]
    fn a3_flat_coordinates() {
        let fc = flat_coordinates(&get_unfolding(LieType::A, 3).unwrap()).unwrap();
        let refs = ["b1", "b2", "b3"];
        // t1 = b1 - b3^2/8, t2 = b2, t3 = b3
        let t1 = &MultiPoly::var(&refs, "b1").unwrap()
            + &MultiPoly::monomial(&refs, &[0, 0, 2], rat(-1, 8)).unwrap();
        assert_eq!(fc.t_of_b[0], t1);
        assert_eq!(fc.t_of_b[1], MultiPoly::var(&refs, "b2").unwrap());
        assert_eq!(fc.t_of_b[2], MultiPoly::var(&refs, "b3").unwrap());
        // eta: antidiagonal 1/4 with eta_22 = 1/4
        assert_eq!(fc.eta[(0, 2)], rat(1, 4));
        assert_eq!(fc.eta[(1, 1)], rat(1, 4));
        assert_eq!(fc.eta[(0, 0)], rat(0, 1));
        assert_eq!(fc.eta[(0, 1)], rat(0, 1));
        assert_eq!(fc.eta[(1, 2)], rat(0, 1));
        assert_eq!(fc.eta[(2, 2)], rat(0, 1));
    }

    #[test]
    fn flat_metric_is_antidiagonal_for_small_ranks() {
        for n in 1..=5 {
            let fc = flat_coordinates(&get_unfolding(LieType::A, n).unwrap()).unwrap();
            for i in 0..n {
                for j in 0..n {
                    let expect = if i + j == n - 1 {
                        rat(1, (n + 1) as i64)
                    } else {
                        rat(0, 1)
                    };
                    assert_eq!(fc.eta[(i, j)], expect, "n={n} ({i},{j})");
                }
            }
        }
    }
}
