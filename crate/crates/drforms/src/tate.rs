//! Truncated power series in t over C∞: elements of the Tate algebra
//! with a Gauss norm, a certified coefficient-tail envelope, Frobenius
//! twisting and evaluation at t-values.
//!
//! A `Tate` stores coefficients c_0..c_{N-1} plus a tail certificate:
//! |c_i| <= B·q^(-rr·(i-N)) for all i >= N, valid as a function on the
//! open disk |t| < q^rr. Series produced by purely formal manipulation
//! (t-adic inversion) carry no certificate and cannot be evaluated.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::cinfty::CInfty;
use crate::error::{Error, Result};
use crate::norm::{exp_int, rat_pair, Exp, NormBound};
use crate::poly::PolyA;

/// Certified coefficient tail for i >= N, two bounds at once:
/// the flat supremum |c_i| <= sup, and the decaying envelope
/// |c_i| <= bound·q^(-rr(i-N)), the latter valid as a function on the
/// open disk |t| < q^rr. `rr = None` means the tail is exactly zero
/// beyond the window (a polynomial) and the radius is infinite.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tail {
    pub sup: NormBoundRepr,
    pub bound: NormBoundRepr,
    pub rr: Option<(i64, i64)>,
}

/// Serializable twin of `NormBound`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum NormBoundRepr {
    Zero,
    LogQ(i64, i64),
}

impl From<NormBound> for NormBoundRepr {
    fn from(b: NormBound) -> Self {
        match b.exp() {
            None => NormBoundRepr::Zero,
            Some(v) => {
                let (n, d) = crate::norm::exp_to_i64_pair(v);
                NormBoundRepr::LogQ(n, d)
            }
        }
    }
}

impl From<NormBoundRepr> for NormBound {
    fn from(r: NormBoundRepr) -> Self {
        match r {
            NormBoundRepr::Zero => NormBound::NegInf,
            NormBoundRepr::LogQ(n, d) => NormBound::Le(rat_pair(n, d)),
        }
    }
}

#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct Tate {
    q: u32,
    coeffs: Vec<CInfty>,
    /// None: formal truncation, no certified tail.
    tail: Option<Tail>,
}

impl Tate {
    /// Constructor with a tail certificate. The flat supremum defaults
    /// to the envelope intercept, which always dominates it.
    pub fn new(q: u32, coeffs: Vec<CInfty>, bound: NormBound, rr: Option<Exp>) -> Self {
        Tate::with_sup(q, coeffs, bound, bound, rr)
    }

    pub fn with_sup(
        q: u32,
        coeffs: Vec<CInfty>,
        sup: NormBound,
        bound: NormBound,
        rr: Option<Exp>,
    ) -> Self {
        debug_assert!(
            rr.is_some() || bound.is_zero(),
            "infinite radius requires an exactly zero tail"
        );
        Tate {
            q,
            coeffs,
            tail: Some(Tail {
                sup: sup.into(),
                bound: bound.into(),
                rr: rr.map(crate::norm::exp_to_i64_pair),
            }),
        }
    }

    pub fn formal(q: u32, coeffs: Vec<CInfty>) -> Self {
        Tate {
            q,
            coeffs,
            tail: None,
        }
    }

    pub fn zero(q: u32, n: usize) -> Self {
        Tate::new(
            q,
            vec![CInfty::zero(q); n],
            NormBound::NegInf,
            None,
        )
    }

    pub fn from_scalar(c: &CInfty, n: usize) -> Self {
        let q = c.q();
        let mut coeffs = vec![CInfty::zero(q); n];
        coeffs[0] = c.clone();
        Tate::new(q, coeffs, NormBound::NegInf, None)
    }

    /// A polynomial in t with coefficients in F_q (degree < n required).
    pub fn from_t_poly(p: &PolyA, n: usize) -> Self {
        let q = p.q;
        assert!(p.degree().map_or(true, |d| d < n), "t-degree exceeds window");
        let mut coeffs = vec![CInfty::zero(q); n];
        for (i, c) in p.coeffs().iter().enumerate() {
            coeffs[i] = CInfty::from_field(*c);
        }
        Tate::new(q, coeffs, NormBound::NegInf, None)
    }

    /// t - c as a certified series.
    pub fn t_minus(c: &CInfty, n: usize) -> Self {
        let q = c.q();
        let mut coeffs = vec![CInfty::zero(q); n];
        coeffs[0] = c.neg();
        if n > 1 {
            coeffs[1] = CInfty::one(q);
        }
        Tate::new(q, coeffs, NormBound::NegInf, None)
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeff(&self, i: usize) -> &CInfty {
        &self.coeffs[i]
    }

    pub fn coeffs(&self) -> &[CInfty] {
        &self.coeffs
    }

    pub fn has_certified_tail(&self) -> bool {
        self.tail.is_some()
    }

    pub fn tail_bound(&self) -> Option<NormBound> {
        self.tail.map(|t| t.bound.into())
    }

    pub fn tail_sup(&self) -> Option<NormBound> {
        self.tail.map(|t| t.sup.into())
    }

    /// log_q of the certified radius (None inside = infinite).
    pub fn radius(&self) -> Option<Option<Exp>> {
        self.tail
            .map(|t| t.rr.map(|(n, d)| rat_pair(n, d)))
    }

    /// Gauss norm upper bound over window and tail.
    pub fn gauss_norm(&self) -> NormBound {
        let mut b = NormBound::NegInf;
        for c in &self.coeffs {
            b = b.max(c.norm_bound());
        }
        if let Some(t) = self.tail {
            b = b.max(t.sup.into());
        }
        b
    }

    /// True when every stored coefficient is zero to its precision.
    pub fn window_empty(&self) -> bool {
        self.coeffs.iter().all(CInfty::window_empty)
    }

    fn align(&self, other: &Tate) -> usize {
        assert_eq!(self.q, other.q);
        self.coeffs.len().min(other.coeffs.len())
    }

    fn combined_tail_add(&self, other: &Tate) -> Option<Tail> {
        let (a, b) = (self.tail?, other.tail?);
        let sup = NormBound::from(a.sup).max(b.sup.into());
        let bound = NormBound::from(a.bound).max(b.bound.into());
        let rr = min_radius(a.rr, b.rr);
        if bound.is_zero() {
            Some(Tail {
                sup: NormBoundRepr::Zero,
                bound: NormBoundRepr::Zero,
                rr: None,
            })
        } else {
            Some(Tail {
                sup: sup.into(),
                bound: bound.into(),
                rr,
            })
        }
    }

    pub fn add(&self, other: &Tate) -> Tate {
        let n = self.align(other);
        let coeffs = (0..n)
            .map(|i| self.coeffs[i].add(&other.coeffs[i]))
            .collect();
        Tate {
            q: self.q,
            coeffs,
            tail: self.combined_tail_add(other),
        }
    }

    pub fn neg(&self) -> Tate {
        Tate {
            q: self.q,
            coeffs: self.coeffs.iter().map(CInfty::neg).collect(),
            tail: self.tail,
        }
    }

    pub fn sub(&self, other: &Tate) -> Tate {
        self.add(&other.neg())
    }

    pub fn scalar_mul(&self, c: &CInfty) -> Tate {
        let tail = self.tail.map(|t| Tail {
            sup: NormBound::from(t.sup).mul(c.norm_bound()).into(),
            bound: NormBound::from(t.bound).mul(c.norm_bound()).into(),
            rr: t.rr,
        });
        Tate {
            q: self.q,
            coeffs: self.coeffs.iter().map(|x| x.mul(c)).collect(),
            tail,
        }
    }

    pub fn mul(&self, other: &Tate) -> Tate {
        let n = self.align(other);
        let q = self.q;
        let mut coeffs = vec![CInfty::zero(q); n];
        for i in 0..n {
            for j in 0..n - i {
                if self.coeffs[i].window_empty() && self.coeffs[i].is_exact() {
                    break;
                }
                coeffs[i + j] = coeffs[i + j].add(&self.coeffs[i].mul(&other.coeffs[j]));
            }
        }
        // window-by-window error coupling: errors in c_i of one factor
        // multiply known coefficients of the other
        let tail = self.mul_tail(other, n);
        Tate { q, coeffs, tail }
    }

    fn mul_tail(&self, other: &Tate, n: usize) -> Option<Tail> {
        let (ta, tb) = (self.tail?, other.tail?);
        let rr = min_radius(ta.rr, tb.rr);
        match rr {
            None => {
                // both tails exactly zero: overflow coefficients are the
                // actual polynomial coefficients beyond the window
                let mut overflow = NormBound::NegInf;
                for i in 0..self.coeffs.len() {
                    for j in 0..other.coeffs.len() {
                        if i + j >= n {
                            overflow = overflow.max(
                                self.coeffs[i]
                                    .norm_bound()
                                    .mul(other.coeffs[j].norm_bound()),
                            );
                        }
                    }
                }
                if overflow.is_zero() {
                    Some(Tail {
                        sup: NormBoundRepr::Zero,
                        bound: NormBoundRepr::Zero,
                        rr: None,
                    })
                } else {
                    // finitely many overflow terms; radius exponent 0 is a
                    // valid (weak) envelope for them
                    Some(Tail {
                        sup: overflow.into(),
                        bound: overflow.into(),
                        rr: Some((0, 1)),
                    })
                }
            }
            Some((rn, rd)) => {
                let r = rat_pair(rn, rd);
                // weighted sup W = sup_j |c_j| q^(r j) over window and tail
                let weighted = |g: &Tate, t: &Tail| -> NormBound {
                    let mut w = NormBound::NegInf;
                    for (j, c) in g.coeffs.iter().enumerate() {
                        w = w.max(c.norm_bound().mul(NormBound::Le(r * exp_int(j as i64))));
                    }
                    w.max(
                        NormBound::from(t.bound)
                            .mul(NormBound::Le(r * exp_int(g.coeffs.len() as i64))),
                    )
                };
                let w = weighted(self, &ta).mul(weighted(other, &tb));
                let bound = w.mul(NormBound::Le(-r * exp_int(n as i64)));
                // flat tail sup: every product coefficient is bounded by
                // the product of Gauss norms
                let sup = self.gauss_norm().mul(other.gauss_norm());
                Some(Tail {
                    sup: sup.into(),
                    bound: bound.into(),
                    rr: Some((rn, rd)),
                })
            }
        }
    }

    /// Coefficientwise Frobenius twist g -> g^(j) (j may be negative).
    pub fn twist(&self, j: i64) -> Tate {
        let coeffs = self.coeffs.iter().map(|c| c.frobenius(j)).collect();
        let scale = if j >= 0 {
            Exp::from_integer((self.q as i128).pow(j as u32))
        } else {
            rat_pair(1, (self.q as i64).pow((-j) as u32))
        };
        let pow_bound = |b: NormBoundRepr| -> NormBoundRepr {
            match NormBound::from(b) {
                NormBound::NegInf => NormBoundRepr::Zero,
                NormBound::Le(x) => NormBound::Le(x * scale).into(),
            }
        };
        let tail = self.tail.map(|t| Tail {
            sup: pow_bound(t.sup),
            bound: pow_bound(t.bound),
            rr: t.rr.map(|(n, d)| {
                let r = rat_pair(n, d) * scale;
                crate::norm::exp_to_i64_pair(r)
            }),
        });
        Tate {
            q: self.q,
            coeffs,
            tail,
        }
    }

    /// Evaluation at a point of C∞ strictly inside the certified radius.
    pub fn eval_at(&self, t0: &CInfty) -> Result<CInfty> {
        let Some(tail) = self.tail else {
            return Err(Error::OutOfDomain(
                "series carries no convergence certificate".into(),
            ));
        };
        let sigma = t0.norm_bound();
        if let Some((rn, rd)) = tail.rr {
            let r = rat_pair(rn, rd);
            match sigma {
                NormBound::Le(s) if s >= r => {
                    return Err(Error::OutOfDomain(format!(
                        "|t0| = q^{s} is not inside the certified radius q^{r}"
                    )));
                }
                _ => {}
            }
        }
        // Horner
        let mut acc = CInfty::zero(self.q);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(t0).add(c);
        }
        // tail: sup_{i>=N} |c_i| |t0|^i <= B σ^N from the envelope; when
        // σ <= 1 the flat sup gives (sup)·σ^N as well — take the smaller
        let n = self.coeffs.len() as i64;
        let mut tail_err = NormBound::from(tail.bound).mul(sigma.pow(n));
        let flat_ok = match sigma {
            NormBound::NegInf => true,
            NormBound::Le(s) => s <= Exp::from_integer(0i128),
        };
        if flat_ok {
            let flat = NormBound::from(tail.sup).mul(sigma.pow(n));
            if flat.le(&tail_err) {
                tail_err = flat;
            }
        }
        Ok(acc.with_error_at_least(tail_err))
    }

    /// Formal t-adic inverse to the stored order. The result carries no
    /// tail certificate.
    pub fn inv_series(&self, prec: i64) -> Result<Tate> {
        let n = self.coeffs.len();
        let c0 = &self.coeffs[0];
        let d0 = c0.inv(prec).map_err(|_| {
            Error::precision("t-series inversion: constant term is 0 to precision")
        })?;
        let mut inv = vec![CInfty::zero(self.q); n];
        inv[0] = d0.clone();
        for k in 1..n {
            let mut s = CInfty::zero(self.q);
            for i in 1..=k {
                s = s.add(&self.coeffs[i].mul(&inv[k - i]));
            }
            inv[k] = d0.neg().mul(&s);
        }
        Ok(Tate::formal(self.q, inv))
    }

    /// Raises every coefficient's error floor (used to fold in external
    /// tail estimates).
    pub fn with_coeff_error(&self, bound: NormBound) -> Tate {
        Tate {
            q: self.q,
            coeffs: self
                .coeffs
                .iter()
                .map(|c| c.with_error_at_least(bound))
                .collect(),
            tail: self.tail,
        }
    }

    /// Replaces the tail certificate (caller asserts its validity).
    pub fn with_tail(&self, bound: NormBound, rr: Option<Exp>) -> Tate {
        Tate::new(self.q, self.coeffs.clone(), bound, rr)
    }

    pub fn truncated(&self, n: usize) -> Tate {
        assert!(n <= self.coeffs.len());
        let mut sup = self.tail.map(|t| t.sup.into()).unwrap_or(NormBound::NegInf);
        for i in n..self.coeffs.len() {
            sup = sup.max(self.coeffs[i].norm_bound());
        }
        let rr = self.tail.and_then(|t| t.rr).map(|(a, b)| rat_pair(a, b));
        if let Some(r) = rr {
            // rebase the envelope from index N to index n
            let mut bound = NormBound::NegInf;
            for i in n..self.coeffs.len() {
                bound = bound.max(
                    self.coeffs[i]
                        .norm_bound()
                        .mul(NormBound::Le(r * exp_int((i as i64) - n as i64))),
                );
            }
            if let Some(t) = self.tail {
                let shift = r * exp_int((self.coeffs.len() - n) as i64);
                bound = NormBound::from(t.bound).mul(NormBound::Le(shift)).max(bound);
            }
            Tate::with_sup(self.q, self.coeffs[..n].to_vec(), sup, bound, Some(r))
        } else if self.tail.is_some() {
            if sup.is_zero() {
                Tate::new(self.q, self.coeffs[..n].to_vec(), sup, None)
            } else {
                Tate::new(self.q, self.coeffs[..n].to_vec(), sup, Some(exp_int(0)))
            }
        } else {
            Tate::formal(self.q, self.coeffs[..n].to_vec())
        }
    }
}

fn min_radius(a: Option<(i64, i64)>, b: Option<(i64, i64)>) -> Option<(i64, i64)> {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some((an, ad)), Some((bn, bd))) => {
            let (ra, rb) = (rat_pair(an, ad), rat_pair(bn, bd));
            Some(crate::norm::exp_to_i64_pair(ra.min(rb)))
        }
    }
}

/// 1/(θ^(q^j) - t) = Σ_n t^n θ^(-q^j (n+1)), exact coefficients with the
/// exact geometric tail envelope.
pub fn geometric_kernel(q: u32, j: u32, n: usize) -> Tate {
    let qj = (q as i64).pow(j);
    let coeffs = (0..n)
        .map(|i| CInfty::theta_pow(q, -qj * (i as i64 + 1), 1))
        .collect();
    Tate::new(
        q,
        coeffs,
        NormBound::Le(exp_int(-qj * (n as i64 + 1))),
        Some(exp_int(qj)),
    )
}

// ---- matrices over the Tate algebra ----

pub type TateMat = Vec<Vec<Tate>>;

pub fn mat_transpose(m: &TateMat) -> TateMat {
    let rows = m.len();
    let cols = m[0].len();
    (0..cols)
        .map(|j| (0..rows).map(|i| m[i][j].clone()).collect())
        .collect()
}

pub fn mat_twist(m: &TateMat, j: i64) -> TateMat {
    m.iter()
        .map(|row| row.iter().map(|g| g.twist(j)).collect())
        .collect()
}

pub fn mat_mul(a: &TateMat, b: &TateMat) -> TateMat {
    let n = a.len();
    let k = b.len();
    let m = b[0].len();
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| {
                    let mut s = a[i][0].mul(&b[0][j]);
                    for l in 1..k {
                        s = s.add(&a[i][l].mul(&b[l][j]));
                    }
                    s
                })
                .collect()
        })
        .collect()
}

pub fn mat_vec_mul(a: &TateMat, v: &[Tate]) -> Vec<Tate> {
    a.iter()
        .map(|row| {
            let mut s = row[0].mul(&v[0]);
            for (l, g) in row.iter().enumerate().skip(1) {
                s = s.add(&g.mul(&v[l]));
            }
            s
        })
        .collect()
}

/// Laplace-expansion determinant (matrices here are at most 4x4).
pub fn mat_det(m: &TateMat) -> Tate {
    let n = m.len();
    if n == 1 {
        return m[0][0].clone();
    }
    let mut det: Option<Tate> = None;
    for j in 0..n {
        let minor: TateMat = m[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(k, _)| *k != j)
                    .map(|(_, e)| e.clone())
                    .collect()
            })
            .collect();
        let mut term = m[0][j].mul(&mat_det(&minor));
        if j % 2 == 1 {
            term = term.neg();
        }
        det = Some(match det {
            None => term,
            Some(d) => d.add(&term),
        });
    }
    det.unwrap()
}

/// (i,j)-cofactor (0-indexed arguments, standard signs).
pub fn mat_cofactor(m: &TateMat, i: usize, j: usize) -> Tate {
    let n = m.len();
    if n == 1 {
        return Tate::from_scalar(&CInfty::one(m[0][0].q()), m[0][0].order());
    }
    let minor: TateMat = (0..n)
        .filter(|&r| r != i)
        .map(|r| {
            (0..n)
                .filter(|&c| c != j)
                .map(|c| m[r][c].clone())
                .collect()
        })
        .collect();
    let d = mat_det(&minor);
    if (i + j) % 2 == 0 {
        d
    } else {
        d.neg()
    }
}

/// Inverse via the adjugate; requires the determinant's constant term to
/// be invertible at the working precision. The result is formally
/// truncated (no tail certificate).
pub fn mat_inverse(m: &TateMat, prec: i64) -> Result<TateMat> {
    let n = m.len();
    let det = mat_det(m);
    let det_inv = det.inv_series(prec)?;
    let mut out = vec![vec![Tate::zero(m[0][0].q(), m[0][0].order()); n]; n];
    for i in 0..n {
        for j in 0..n {
            // adj(M)_{ij} = cofactor_{ji}
            out[i][j] = mat_cofactor(m, j, i).mul(&det_inv);
        }
    }
    Ok(out)
}

impl fmt::Debug for Tate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Tate[")?;
        for (i, c) in self.coeffs.iter().enumerate().take(4) {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "t^{i}: {:?}", c)?;
        }
        if self.coeffs.len() > 4 {
            write!(f, ", …")?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cinfty::canonical_beta;
    use crate::norm::exp_frac;
    use crate::testkit::SplitMix64;

    fn random_tate(rng: &mut SplitMix64, q: u32, n: usize) -> Tate {
        let coeffs = (0..n)
            .map(|i| {
                let c = crate::field::FieldElement::gen_pow(q, 1, rng.below(q as u64 - 1));
                CInfty::monomial(c, rng.below(7) as i64 - 3 - i as i64, 1)
            })
            .collect();
        Tate::new(
            q,
            coeffs,
            NormBound::Le(exp_int(-(n as i64))),
            Some(exp_int(1)),
        )
    }

    #[test]
    fn kernel_examples() {
        let q = 3;
        let n = 8;
        // j=0: coefficient of t^0 is θ^{-1}
        let k0 = geometric_kernel(q, 0, n);
        assert_eq!(*k0.coeff(0), CInfty::theta_pow(q, -1, 1));
        // j=1: coefficient of t^m is θ^{-q(m+1)}
        let k1 = geometric_kernel(q, 1, n);
        for m in 0..n {
            assert_eq!(
                *k1.coeff(m),
                CInfty::theta_pow(q, -(q as i64) * (m as i64 + 1), 1)
            );
        }
        // (θ^{q^j} - t)·kernel(j) = 1 + O(t^n)
        for j in 0..2u32 {
            let kj = geometric_kernel(q, j, n);
            let lin = Tate::t_minus(&CInfty::theta_pow(q, (q as i64).pow(j), 1), n).neg();
            let prod = lin.mul(&kj);
            let one = Tate::from_scalar(&CInfty::one(q), n);
            let resid = prod.sub(&one);
            assert!(resid.window_empty(), "kernel defining identity, j={j}");
        }
    }

    #[test]
    fn twist_is_automorphism_and_invertible() {
        let mut rng = SplitMix64::new(5);
        for q in [2u32, 3] {
            for _ in 0..10 {
                let g = random_tate(&mut rng, q, 6);
                let h = random_tate(&mut rng, q, 6);
                for j in -2i64..=2 {
                    let lhs = g.mul(&h).twist(j);
                    let rhs = g.twist(j).mul(&h.twist(j));
                    assert!(lhs.sub(&rhs).window_empty(), "q={q} j={j}");
                }
                let back = g.twist(1).twist(-1);
                assert!(g.sub(&back).window_empty());
            }
        }
        // twist of a constant is its q-th power
        let c = canonical_beta(3);
        let g = Tate::from_scalar(&c, 4);
        let t = g.twist(1);
        assert!(t.coeff(0).sub(&c.pow(3, 40).unwrap()).window_empty());
    }

    #[test]
    fn gauss_norm_ultrametric() {
        let mut rng = SplitMix64::new(11);
        for _ in 0..100 {
            let g = random_tate(&mut rng, 3, 5);
            let h = random_tate(&mut rng, 3, 5);
            let s = g.add(&h);
            // ‖g+h‖ <= max(‖g‖, ‖h‖)
            assert!(s.gauss_norm().le(&g.gauss_norm().max(h.gauss_norm())));
            // ‖g·h‖ <= ‖g‖·‖h‖
            assert!(g
                .mul(&h)
                .gauss_norm()
                .le(&g.gauss_norm().mul(h.gauss_norm())));
        }
    }

    #[test]
    fn eval_examples() {
        let q = 3;
        let n = 12;
        let k0 = geometric_kernel(q, 0, n);
        // eval at 0 gives c_0
        let v0 = k0.eval_at(&CInfty::zero(q)).unwrap();
        assert!(v0.sub(k0.coeff(0)).window_empty());
        // the geometric expansion of 1/(θ - t) is certified on |t| < |θ|;
        // evaluating at θ itself must fail
        assert!(matches!(
            k0.eval_at(&CInfty::theta(q)),
            Err(Error::OutOfDomain(_))
        ));
        // evaluating 1/(θ^q - t) at θ works and matches the exact inverse
        let k1 = geometric_kernel(q, 1, n);
        let v = k1.eval_at(&CInfty::theta(q)).unwrap();
        let exact = CInfty::theta_pow(q, q as i64, 1)
            .sub(&CInfty::theta(q))
            .inv(60)
            .unwrap();
        assert!(v.sub(&exact).window_empty());
    }

    #[test]
    fn eval_multiplicative() {
        let mut rng = SplitMix64::new(21);
        let q = 3;
        for _ in 0..20 {
            let g = random_tate(&mut rng, q, 6);
            let h = random_tate(&mut rng, q, 6);
            let t0 = CInfty::monomial(
                crate::field::FieldElement::one(q, 1),
                -(1 + rng.below(3) as i64),
                1,
            );
            let lhs = g.mul(&h).eval_at(&t0).unwrap();
            let rhs = g.eval_at(&t0).unwrap().mul(&h.eval_at(&t0).unwrap());
            assert!(lhs.sub(&rhs).window_empty());
        }
    }

    #[test]
    fn matrix_ops_small() {
        let q = 2;
        let n = 6;
        let g = geometric_kernel(q, 0, n);
        let h = geometric_kernel(q, 1, n);
        // 1x1 matrix
        let m1 = vec![vec![g.clone()]];
        assert!(mat_det(&m1).sub(&g).window_empty());
        assert!(mat_cofactor(&m1, 0, 0)
            .sub(&Tate::from_scalar(&CInfty::one(q), n))
            .window_empty());
        // det of diag(g, h) = g·h
        let z = Tate::zero(q, n);
        let m2 = vec![vec![g.clone(), z.clone()], vec![z.clone(), h.clone()]];
        assert!(mat_det(&m2).sub(&g.mul(&h)).window_empty());
        // M·M^{-1} = Id + O(t^n)
        let one = Tate::from_scalar(&CInfty::one(q), n);
        let m = vec![
            vec![g.clone().add(&one), h.clone()],
            vec![h.clone(), one.clone()],
        ];
        let mi = mat_inverse(&m, 50).unwrap();
        let prod = mat_mul(&m, &mi);
        for i in 0..2 {
            for j in 0..2 {
                let expect = if i == j { &one } else { &z };
                assert!(
                    prod[i][j].sub(expect).window_empty(),
                    "entry ({i},{j}) of M·M^-1"
                );
            }
        }
    }

    #[test]
    fn serde_roundtrip() {
        let mut rng = SplitMix64::new(77);
        for _ in 0..10 {
            let g = random_tate(&mut rng, 3, 5).mul(&geometric_kernel(3, 0, 5));
            let json = serde_json::to_string(&g).unwrap();
            let h: Tate = serde_json::from_str(&json).unwrap();
            assert_eq!(g, h);
            assert_eq!(json, serde_json::to_string(&h).unwrap());
            // the serialized form carries the tail certificate
            assert!(json.contains("tail") && json.contains("rr"));
        }
    }

    #[test]
    fn tail_envelope_tracks_radius() {
        let q = 3;
        let k1 = geometric_kernel(q, 1, 8);
        assert_eq!(k1.radius(), Some(Some(exp_int(q as i64))));
        let tw = k1.twist(1);
        assert_eq!(tw.radius(), Some(Some(exp_int((q * q) as i64))));
        let neg = k1.twist(-1);
        assert_eq!(neg.radius(), Some(Some(exp_frac(1, 1))));
        let prod = k1.mul(&geometric_kernel(q, 0, 8));
        assert_eq!(prod.radius(), Some(Some(exp_int(1))));
    }
}
