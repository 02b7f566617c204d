//! The polynomial ring A = F_q[θ]: exact arithmetic, enumeration by
//! degree, and the coefficientwise substitution a(θ) -> a(t).

use std::fmt;

use crate::error::{Error, Result};
use crate::field::FieldElement;

/// An element of A = F_q[θ] (coefficients ascending, no trailing zeros).
/// The same representation doubles as a polynomial in t over F_q after
/// `substitute_t`, which is the identity on coefficients.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PolyA {
    pub q: u32,
    coeffs: Vec<FieldElement>,
}

impl PolyA {
    pub fn zero(q: u32) -> Self {
        PolyA { q, coeffs: vec![] }
    }

    pub fn one(q: u32) -> Self {
        PolyA::constant(FieldElement::one(q, 1))
    }

    pub fn constant(c: FieldElement) -> Self {
        assert_eq!(c.m, 1, "A has coefficients in F_q");
        let q = c.q;
        if c.is_zero() {
            PolyA::zero(q)
        } else {
            PolyA { q, coeffs: vec![c] }
        }
    }

    pub fn theta(q: u32) -> Self {
        PolyA::from_coeffs(
            q,
            vec![FieldElement::zero(q, 1), FieldElement::one(q, 1)],
        )
    }

    pub fn from_coeffs(q: u32, mut coeffs: Vec<FieldElement>) -> Self {
        while coeffs.last().is_some_and(FieldElement::is_zero) {
            coeffs.pop();
        }
        for c in &coeffs {
            assert_eq!(c.q, q);
            assert_eq!(c.m, 1);
        }
        PolyA { q, coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or None for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn coeff(&self, i: usize) -> FieldElement {
        self.coeffs
            .get(i)
            .copied()
            .unwrap_or_else(|| FieldElement::zero(self.q, 1))
    }

    pub fn coeffs(&self) -> &[FieldElement] {
        &self.coeffs
    }

    pub fn leading(&self) -> Option<FieldElement> {
        self.coeffs.last().copied()
    }

    /// Monic test; membership in A_+.
    pub fn is_monic(&self) -> bool {
        self.leading() == Some(FieldElement::one(self.q, 1))
    }

    pub fn add(&self, other: &PolyA) -> PolyA {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|i| self.coeff(i).add(&other.coeff(i))).collect();
        PolyA::from_coeffs(self.q, coeffs)
    }

    pub fn neg(&self) -> PolyA {
        PolyA::from_coeffs(self.q, self.coeffs.iter().map(FieldElement::neg).collect())
    }

    pub fn sub(&self, other: &PolyA) -> PolyA {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &PolyA) -> PolyA {
        if self.is_zero() || other.is_zero() {
            return PolyA::zero(self.q);
        }
        let mut coeffs =
            vec![FieldElement::zero(self.q, 1); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] = coeffs[i + j].add(&a.mul(b));
            }
        }
        PolyA::from_coeffs(self.q, coeffs)
    }

    pub fn scale(&self, c: &FieldElement) -> PolyA {
        PolyA::from_coeffs(self.q, self.coeffs.iter().map(|a| a.mul(c)).collect())
    }

    /// θ^k * self
    pub fn shift(&self, k: usize) -> PolyA {
        if self.is_zero() {
            return self.clone();
        }
        let mut coeffs = vec![FieldElement::zero(self.q, 1); k];
        coeffs.extend_from_slice(&self.coeffs);
        PolyA::from_coeffs(self.q, coeffs)
    }

    /// The substitution θ -> t. Coefficientwise identity; the result is
    /// the same data reinterpreted as a polynomial in t.
    pub fn substitute_t(&self) -> PolyA {
        self.clone()
    }

    /// The value a(θ) in C∞ (exact).
    pub fn eval_theta(&self) -> crate::cinfty::CInfty {
        let mut acc = crate::cinfty::CInfty::zero(self.q);
        for (i, c) in self.coeffs.iter().enumerate() {
            acc = acc.add(&crate::cinfty::CInfty::monomial(*c, i as i64, 1));
        }
        acc
    }

    /// Horner evaluation at an arbitrary value.
    pub fn eval_at(&self, x: &crate::cinfty::CInfty) -> crate::cinfty::CInfty {
        let mut acc = crate::cinfty::CInfty::zero(self.q);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(x).add(&crate::cinfty::CInfty::from_field(*c));
        }
        acc
    }
}

impl fmt::Debug for PolyA {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{:?}", c)?,
                1 => write!(f, "{:?}*X", c)?,
                _ => write!(f, "{:?}*X^{}", c, i)?,
            }
        }
        Ok(())
    }
}

/// Deterministic enumeration of the elements of F_q:
/// 0, g^0, g^1, ..., g^(q-2) for the canonical generator g.
pub fn fq_elements(q: u32) -> Vec<FieldElement> {
    std::iter::once(FieldElement::zero(q, 1))
        .chain((0..q as u64 - 1).map(|k| FieldElement::gen_pow(q, 1, k)))
        .collect()
}

/// All a in A with deg a <= max_degree (monic only if requested), in a
/// deterministic order: by degree, then lexicographically on the
/// coefficient vector (c_d, ..., c_1, c_0) — constant term last — with
/// field elements ordered 0 < g^0 < g^1 < ...
pub fn enumerate_polys(q: u32, max_degree: i64, monic_only: bool) -> Vec<PolyA> {
    let mut out = Vec::new();
    if max_degree < 0 {
        return out;
    }
    if !monic_only {
        out.push(PolyA::zero(q));
    }
    for d in 0..=max_degree as usize {
        out.extend(enumerate_polys_exact_degree(q, d, monic_only));
    }
    out
}

/// All a with deg a = d exactly, same order as `enumerate_polys`.
pub fn enumerate_polys_exact_degree(q: u32, d: usize, monic_only: bool) -> Vec<PolyA> {
    let els = fq_elements(q);
    let leads: Vec<FieldElement> = if monic_only {
        vec![FieldElement::one(q, 1)]
    } else {
        els[1..].to_vec()
    };
    let ell = els.len() as u64;
    let total = ell.pow(d as u32);
    let mut out = Vec::with_capacity(leads.len() * total as usize);
    for lead in &leads {
        for code in 0..total {
            let mut coeffs = vec![FieldElement::zero(q, 1); d + 1];
            coeffs[d] = *lead;
            // lex on (c_{d-1}, ..., c_0): constant term is the fastest digit
            let mut c = code;
            for coeff in coeffs.iter_mut().take(d) {
                *coeff = els[(c % ell) as usize];
                c /= ell;
            }
            out.push(PolyA::from_coeffs(q, coeffs));
        }
    }
    out
}

/// Exact determinant of a square matrix over A (Laplace expansion;
/// matrices here are tiny).
pub fn poly_det(m: &[Vec<PolyA>]) -> PolyA {
    let n = m.len();
    let q = m[0][0].q;
    if n == 1 {
        return m[0][0].clone();
    }
    let mut det = PolyA::zero(q);
    for j in 0..n {
        let minor: Vec<Vec<PolyA>> = m[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(k, _)| *k != j)
                    .map(|(_, e)| e.clone())
                    .collect()
            })
            .collect();
        let term = m[0][j].mul(&poly_det(&minor));
        det = if j % 2 == 0 { det.add(&term) } else { det.sub(&term) };
    }
    det
}

/// (i,j)-cofactor of a square matrix over A (1-indexed signs, 0-indexed args).
pub fn poly_cofactor(m: &[Vec<PolyA>], i: usize, j: usize) -> PolyA {
    let n = m.len();
    let q = m[0][0].q;
    if n == 1 {
        return PolyA::one(q);
    }
    let minor: Vec<Vec<PolyA>> = (0..n)
        .filter(|&r| r != i)
        .map(|r| {
            (0..n)
                .filter(|&c| c != j)
                .map(|c| m[r][c].clone())
                .collect()
        })
        .collect();
    let d = poly_det(&minor);
    if (i + j) % 2 == 0 {
        d
    } else {
        d.neg()
    }
}

pub fn validate_gl(m: &[Vec<PolyA>]) -> Result<FieldElement> {
    let det = poly_det(m);
    match det.degree() {
        Some(0) => Ok(det.coeff(0)),
        _ => Err(Error::Invalid(
            "matrix is not in GL_r(A): determinant is not a nonzero constant".into(),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly_from_ints(q: u32, cs: &[u32]) -> PolyA {
        PolyA::from_coeffs(
            q,
            cs.iter().map(|&c| FieldElement::from_int(q, 1, c)).collect(),
        )
    }

    #[test]
    fn enumeration_examples() {
        // q=2, monic, degree exactly 1 -> {θ, θ+1}
        let polys = enumerate_polys_exact_degree(2, 1, true);
        assert_eq!(polys.len(), 2);
        assert_eq!(polys[0], poly_from_ints(2, &[0, 1]));
        assert_eq!(polys[1], poly_from_ints(2, &[1, 1]));
        // q=3, monic, degree exactly 0 -> {1}
        let polys = enumerate_polys_exact_degree(3, 0, true);
        assert_eq!(polys, vec![PolyA::one(3)]);
        // q=2, all, deg <= 1 -> 4 elements {0, 1, θ, θ+1}
        let polys = enumerate_polys(2, 1, false);
        assert_eq!(polys.len(), 4);
        assert!(polys.contains(&PolyA::zero(2)));
        assert!(polys.contains(&PolyA::one(2)));
    }

    #[test]
    fn enumeration_counts_and_uniqueness() {
        // |{a monic, deg a = d}| = q^d for d <= 4
        for q in [2u32, 3] {
            for d in 0..=4usize {
                let polys = enumerate_polys_exact_degree(q, d, true);
                assert_eq!(polys.len(), (q as usize).pow(d as u32));
                let set: std::collections::HashSet<_> = polys.iter().cloned().collect();
                assert_eq!(set.len(), polys.len(), "duplicates at q={q} d={d}");
                assert!(polys.iter().all(PolyA::is_monic));
            }
            // deg <= D, all: q^(D+1) including zero
            let all = enumerate_polys(q, 2, false);
            assert_eq!(all.len(), (q as usize).pow(3));
        }
    }

    #[test]
    fn substitute_t_examples() {
        // θ^2 + θ -> t^2 + t (identity on coefficients), 0 -> 0, const -> const
        let a = poly_from_ints(3, &[0, 1, 1]);
        assert_eq!(a.substitute_t(), a);
        assert_eq!(PolyA::zero(3).substitute_t(), PolyA::zero(3));
        let c = poly_from_ints(3, &[2]);
        assert_eq!(c.substitute_t(), c);
        assert_eq!(c.substitute_t().degree(), c.degree());
    }

    #[test]
    fn substitution_is_ring_hom() {
        // substitute_t(ab) = substitute_t(a)·substitute_t(b), deg <= 6
        for q in [2u32, 3] {
            let polys = enumerate_polys(q, 3, false);
            for a in polys.iter().step_by(3) {
                for b in polys.iter().step_by(4) {
                    let ab = a.mul(b);
                    assert!(ab.degree().map_or(true, |d| d <= 6));
                    assert_eq!(
                        ab.substitute_t(),
                        a.substitute_t().mul(&b.substitute_t())
                    );
                }
            }
        }
    }

    #[test]
    fn det_and_cofactor() {
        let q = 3;
        let id3: Vec<Vec<PolyA>> = (0..3)
            .map(|i| {
                (0..3)
                    .map(|j| if i == j { PolyA::one(q) } else { PolyA::zero(q) })
                    .collect()
            })
            .collect();
        assert_eq!(poly_det(&id3), PolyA::one(q));
        let mut m = id3.clone();
        m[1][0] = PolyA::theta(q);
        assert_eq!(poly_det(&m), PolyA::one(q));
        assert_eq!(poly_cofactor(&m, 0, 0), PolyA::one(q));
        assert_eq!(poly_cofactor(&m, 0, 1), PolyA::theta(q).neg());
        assert!(validate_gl(&m).is_ok());
        m[0][0] = PolyA::theta(q);
        assert!(validate_gl(&m).is_err());
    }
}
