//! Elements of C∞ as truncated ramified Laurent series in θ^(1/e)
//! over F_{q^m}, with the absolute value normalized so |θ| = q.
//!
//! A value is Σ_{k > err} c_k θ^(k/e) together with the error exponent
//! `err`: every digit at exponent <= err is unknown, so the value is
//! known up to an additive error of absolute value <= q^(err/e).
//! Stored digits are exact; addition never rounds. `err = None` marks
//! an exactly known value (a polynomial expression in θ^(1/e)).

use std::collections::BTreeMap;
use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::field::{lcm_u32, FieldElement};
use crate::norm::{exp_int, rat_pair, Exp, NormBound};

#[derive(Clone, PartialEq, Eq)]
pub struct CInfty {
    q: u32,
    /// ramification index: exponents are k/e
    e: i64,
    /// digits at exponents <= err are unknown; None = exact value
    err: Option<i64>,
    /// exponent k -> coefficient of θ^(k/e); no zero coefficients
    terms: BTreeMap<i64, FieldElement>,
}

struct ScaledView {
    q: u32,
    err: Option<i64>,
    terms: Vec<(i64, FieldElement)>,
}

/// Working precision and truncation parameters for series pipelines.
#[derive(Clone, Copy, Debug)]
pub struct PrecisionBudget {
    /// guaranteed θ-digits carried by constructed values
    pub digits: i64,
    /// degree bound for brute-force Eisenstein/u-expansion sums
    pub degree_bound: i64,
    /// degree bound for the module pipeline (exponential coefficients);
    /// the subspace tower makes much deeper bounds affordable here
    pub module_degree_bound: i64,
    /// truncation order for t-series
    pub t_trunc: usize,
    /// truncation order for Z-series
    pub z_trunc: usize,
}

impl PrecisionBudget {
    pub fn new(digits: i64, degree_bound: i64, t_trunc: usize, z_trunc: usize) -> Self {
        assert!(digits >= 1 && t_trunc >= 1 && z_trunc >= 1 && degree_bound >= 0);
        PrecisionBudget {
            digits,
            degree_bound,
            module_degree_bound: degree_bound.max(12),
            t_trunc,
            z_trunc,
        }
    }

    pub fn with_module_degree(mut self, d: i64) -> Self {
        assert!(d >= 0);
        self.module_degree_bound = d;
        self
    }

    /// Defaults used throughout: 80 guaranteed digits, brute-force degree
    /// bound 3 for rank 2 and 2 for rank 3, module pipeline degree 10/14,
    /// 24 t-terms, q^2-1 Z-terms.
    pub fn default_for(q: u32, r: usize) -> Self {
        let d = if r <= 2 { 3 } else { 2 };
        let dm = if r <= 2 { 10 } else { 14 };
        PrecisionBudget::new(80, d, 24, ((q as usize) * (q as usize) - 1).max(3))
            .with_module_degree(dm)
    }
}

impl CInfty {
    pub fn zero(q: u32) -> Self {
        CInfty {
            q,
            e: 1,
            err: None,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(q: u32) -> Self {
        CInfty::from_field(FieldElement::one(q, 1))
    }

    pub fn from_field(c: FieldElement) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(0, c);
        }
        CInfty {
            q: c.q,
            e: 1,
            err: None,
            terms,
        }
    }

    pub fn from_int(q: u32, v: u32) -> Self {
        CInfty::from_field(FieldElement::from_int(q, 1, v))
    }

    /// c * θ^(num/den), exact.
    pub fn monomial(c: FieldElement, num: i64, den: i64) -> Self {
        assert!(den >= 1);
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(num, c);
        }
        let mut v = CInfty {
            q: c.q,
            e: den,
            err: None,
            terms,
        };
        v.normalize();
        v
    }

    pub fn theta(q: u32) -> Self {
        CInfty::monomial(FieldElement::one(q, 1), 1, 1)
    }

    pub fn theta_pow(q: u32, num: i64, den: i64) -> Self {
        CInfty::monomial(FieldElement::one(q, 1), num, den)
    }

    /// An unknown value bounded by q^exp: empty window, error floor exp.
    pub fn unknown(q: u32, exp: Exp) -> Self {
        let mut v = CInfty::zero(q);
        v.e = i64::try_from(*exp.denom()).expect("exponent fits i64");
        v.err = Some(i64::try_from(*exp.numer()).expect("exponent fits i64"));
        v.normalize();
        v
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn ramification(&self) -> i64 {
        self.e
    }

    pub fn is_exact(&self) -> bool {
        self.err.is_none()
    }

    /// True when no digit is known (zero to the tracked precision).
    pub fn window_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_exactly_zero(&self) -> bool {
        self.terms.is_empty() && self.err.is_none()
    }

    /// Valuation of the known leading digit: |x| = q^val. None when no
    /// digit is known.
    pub fn val(&self) -> Option<Exp> {
        self.terms
            .keys()
            .next_back()
            .map(|&k| rat_pair(k, self.e))
    }

    /// The error floor as a bound: the unknown part is <= q^(err/e).
    pub fn err_bound(&self) -> NormBound {
        match self.err {
            None => NormBound::NegInf,
            Some(k) => NormBound::Le(rat_pair(k, self.e)),
        }
    }

    /// Rigorous upper bound on |x|.
    pub fn norm_bound(&self) -> NormBound {
        let known = match self.val() {
            None => NormBound::NegInf,
            Some(v) => NormBound::Le(v),
        };
        known.max(self.err_bound())
    }

    pub fn leading(&self) -> Option<(Exp, FieldElement)> {
        self.terms
            .iter()
            .next_back()
            .map(|(&k, &c)| (rat_pair(k, self.e), c))
    }

    pub fn coeff_at(&self, exp: Exp) -> FieldElement {
        let k = exp * exp_int(self.e);
        if !k.is_integer() {
            return FieldElement::zero(self.q, 1);
        }
        let key = i64::try_from(k.to_integer()).expect("exponent fits i64");
        self.terms
            .get(&key)
            .copied()
            .unwrap_or_else(|| FieldElement::zero(self.q, 1))
    }

    fn normalize(&mut self) {
        // drop digits at or below the error floor
        if let Some(err) = self.err {
            self.terms = std::mem::take(&mut self.terms)
                .into_iter()
                .filter(|&(k, _)| k > err)
                .collect();
        }
        self.terms.retain(|_, c| !c.is_zero());
        // canonical coefficients: minimal subfield representation
        self.terms = std::mem::take(&mut self.terms)
            .into_iter()
            .map(|(k, c)| (k, c.reduce()))
            .collect();
        // reduce the ramification index
        let mut g = self.e;
        for &k in self.terms.keys() {
            g = gcd_i64(g, k);
        }
        if let Some(err) = self.err {
            g = gcd_i64(g, err);
        }
        if g > 1 && self.e % g == 0 {
            self.e /= g;
            self.terms = std::mem::take(&mut self.terms)
                .into_iter()
                .map(|(k, c)| (k / g, c))
                .collect();
            if let Some(err) = &mut self.err {
                *err /= g;
            }
        }
        if self.terms.is_empty() && self.err.is_none() {
            self.e = 1;
        }
    }

    fn rescaled(&self, new_e: i64) -> CInfty {
        assert!(new_e % self.e == 0);
        let f = new_e / self.e;
        CInfty {
            q: self.q,
            e: new_e,
            err: self.err.map(|k| k * f),
            terms: self.terms.iter().map(|(&k, &c)| (k * f, c)).collect(),
        }
    }

    fn aligned(&self, other: &CInfty) -> (CInfty, CInfty) {
        assert_eq!(self.q, other.q, "mixed base fields");
        let e = lcm_i64(self.e, other.e);
        (self.rescaled(e), other.rescaled(e))
    }

    pub fn add(&self, other: &CInfty) -> CInfty {
        let (mut a, b) = self.aligned(other);
        for (&k, &c) in &b.terms {
            let entry = a
                .terms
                .entry(k)
                .or_insert_with(|| FieldElement::zero(a.q, 1));
            *entry = entry.add(&c);
        }
        a.err = match (a.err, b.err) {
            (None, e) | (e, None) => e,
            (Some(x), Some(y)) => Some(x.max(y)),
        };
        a.normalize();
        a
    }

    pub fn neg(&self) -> CInfty {
        let mut v = self.clone();
        v.terms = std::mem::take(&mut v.terms)
            .into_iter()
            .map(|(k, c)| (k, c.neg()))
            .collect();
        v
    }

    pub fn sub(&self, other: &CInfty) -> CInfty {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &FieldElement) -> CInfty {
        if c.is_zero() {
            let mut z = CInfty::zero(self.q);
            z.e = self.e;
            z.err = self.err;
            z.normalize();
            return z;
        }
        let mut v = self.clone();
        v.terms = std::mem::take(&mut v.terms)
            .into_iter()
            .map(|(k, x)| (k, x.mul(c)))
            .collect();
        v
    }

    pub fn mul(&self, other: &CInfty) -> CInfty {
        assert_eq!(self.q, other.q, "mixed base fields");
        let e = lcm_i64(self.e, other.e);
        let fa = e / self.e;
        let fb = e / other.e;
        let a = ScaledView {
            q: self.q,
            err: self.err.map(|k| k * fa),
            terms: self.terms.iter().map(|(&k, &c)| (k * fa, c)).collect(),
        };
        let b = ScaledView {
            q: other.q,
            err: other.err.map(|k| k * fb),
            terms: other.terms.iter().map(|(&k, &c)| (k * fb, c)).collect(),
        };
        // error floor of the product
        let bound_k = |v: &ScaledView| -> Option<i64> {
            // upper bound on |v| in k-units; None = exactly zero
            let top = v.terms.last().map(|&(k, _)| k);
            match (top, v.err) {
                (None, None) => None,
                (Some(t), None) => Some(t),
                (None, Some(er)) => Some(er),
                (Some(t), Some(er)) => Some(t.max(er)),
            }
        };
        let err = match (a.err, b.err, bound_k(&a), bound_k(&b)) {
            (None, None, _, _) => None,
            (ea, eb, Some(ba), Some(bb)) => {
                let mut cands = Vec::new();
                if let Some(x) = ea {
                    cands.push(x + bb);
                }
                if let Some(y) = eb {
                    cands.push(y + ba);
                }
                cands.into_iter().max()
            }
            // one factor exactly zero: product exactly zero
            _ => {
                let mut z = CInfty::zero(a.q);
                z.e = e;
                return z;
            }
        };
        let mut v = if a.terms.is_empty() || b.terms.is_empty() {
            CInfty {
                q: a.q,
                e,
                err,
                terms: BTreeMap::new(),
            }
        } else {
            // dense accumulation over the (clipped) exponent range
            let ta = &a.terms;
            let tb = &b.terms;
            let lo_raw = ta[0].0 + tb[0].0;
            let lo = match err {
                Some(er) => lo_raw.max(er + 1),
                None => lo_raw,
            };
            let hi = ta[ta.len() - 1].0 + tb[tb.len() - 1].0;
            let mut dense = vec![FieldElement::zero(a.q, 1); (hi - lo + 1).max(0) as usize];
            for &(ka, ca) in ta {
                for &(kb, cb) in tb {
                    let k = ka + kb;
                    if k < lo {
                        continue;
                    }
                    let slot = &mut dense[(k - lo) as usize];
                    *slot = slot.add(&ca.mul(&cb));
                }
            }
            let terms = dense
                .into_iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(i, c)| (lo + i as i64, c))
                .collect();
            CInfty {
                q: a.q,
                e,
                err,
                terms,
            }
        };
        v.normalize();
        v
    }

    /// Raise the error floor to at least `bound` (sound: forgets digits).
    pub fn with_error_at_least(&self, bound: NormBound) -> CInfty {
        let NormBound::Le(b) = bound else {
            return self.clone();
        };
        let e = lcm_i64(self.e, i64::try_from(*b.denom()).expect("ramification fits i64"));
        let mut v = self.rescaled(e);
        let bk_exp = b * exp_int(e);
        let bk = i64::try_from(bk_exp.floor().to_integer()).expect("error exponent fits i64");
        v.err = Some(match v.err {
            None => bk,
            Some(er) => er.max(bk),
        });
        v.normalize();
        v
    }

    /// x -> x^(q^j) for any integer j; exact in characteristic p.
    pub fn frobenius(&self, j: i64) -> CInfty {
        if j >= 0 {
            let f = (self.q as i64)
                .checked_pow(j as u32)
                .expect("Frobenius exponent overflow");
            let mut v = CInfty {
                q: self.q,
                e: self.e,
                err: self.err.map(|k| k.saturating_mul(f)),
                terms: self
                    .terms
                    .iter()
                    .map(|(&k, &c)| (k * f, c.frobenius(j)))
                    .collect(),
            };
            v.normalize();
            v
        } else {
            let f = (self.q as i64)
                .checked_pow((-j) as u32)
                .expect("Frobenius exponent overflow");
            // exponent k/e -> k/(e q^|j|): same keys, larger ramification
            let mut v = CInfty {
                q: self.q,
                e: self.e.checked_mul(f).expect("ramification overflow"),
                err: self.err,
                terms: self
                    .terms
                    .iter()
                    .map(|(&k, &c)| (k, c.frobenius(j)))
                    .collect(),
            };
            v.normalize();
            v
        }
    }

    pub fn pow(&self, k: i64, prec: i64) -> Result<CInfty> {
        if k < 0 {
            return self.inv(prec)?.pow(-k, prec);
        }
        let mut acc = CInfty::one(self.q);
        let mut base = self.clone();
        let mut k = k as u64;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        Ok(acc)
    }

    /// Multiplicative inverse via Newton iteration, carrying at least
    /// `prec` digits of relative precision (or the propagated precision
    /// of the input, whichever is worse).
    pub fn inv(&self, prec: i64) -> Result<CInfty> {
        let Some((v_top, c_top)) = self.leading() else {
            return Err(Error::precision(
                "inversion of a value indistinguishable from 0",
            ));
        };
        let c_inv = c_top.inv().expect("leading coefficient nonzero");
        if self.terms.len() == 1 && self.is_exact() {
            // exact monomial: exact inverse
            let (n64, d64) = crate::norm::exp_to_i64_pair(v_top);
            return Ok(CInfty::monomial(c_inv, -n64, d64));
        }
        let e = self.e;
        let guard = 2 * e + 8;
        // working floor for intermediates, in absolute exponent
        let floor_x = v_top - exp_int(prec) - rat_pair(guard, e);
        let x = self.with_error_at_least(NormBound::Le(floor_x));
        let (vn, vd) = crate::norm::exp_to_i64_pair(v_top);
        let mut y = CInfty::monomial(c_inv, -vn, vd);
        let one = CInfty::one(self.q);
        let floor_y = -v_top - exp_int(prec) - rat_pair(guard, e);
        // stop when the Newton residual r = 1 - x y either is zero to the
        // working precision or has |r| <= q^(-prec)
        let target = NormBound::Le(-exp_int(prec));
        let mut last_r = NormBound::Le(exp_int(0));
        let mut converged = false;
        for _ in 0..64 {
            let r = one.sub(&x.mul(&y));
            last_r = r.norm_bound();
            if r.window_empty() || last_r.le(&target) {
                converged = true;
                break;
            }
            y = y.add(&y.mul(&r)).with_error_at_least(NormBound::Le(floor_y));
        }
        if !converged {
            return Err(Error::precision("inversion did not converge"));
        }
        // final error: Newton residual scaled by |1/x|, and the input's
        // own error propagated through 1/x
        let mut out = y;
        let resid = last_r.mul(NormBound::Le(-v_top));
        out = out.with_error_at_least(resid);
        if let Some(er) = self.err {
            let propagated = rat_pair(er, e) - v_top - v_top;
            out = out.with_error_at_least(NormBound::Le(propagated));
        }
        Ok(out)
    }

    /// Canonical n-th root (gcd(n, p) = 1). The leading coefficient's
    /// root is the canonical one derived from the field generator; the
    /// series part uses Newton iteration.
    pub fn nth_root(&self, n: u32, prec: i64) -> Result<CInfty> {
        assert!(n >= 1);
        if n == 1 {
            return Ok(self.clone());
        }
        let p = crate::field::split_prime_power(self.q)?.0;
        if n % p == 0 {
            return Err(Error::Invalid(format!(
                "no canonical {n}-th root in characteristic {p}"
            )));
        }
        let Some((v_top, c_top)) = self.leading() else {
            return Err(Error::precision("root of a value indistinguishable from 0"));
        };
        // leading monomial root: exponent v/n, coefficient canonical root
        let d = field_nth_root(&c_top, n as u64)?;
        let head_exp = v_top / exp_int(n as i64);
        let (hn, hd) = crate::norm::exp_to_i64_pair(head_exp);
        let head = CInfty::monomial(d, hn, hd);
        // w = self / head^n = 1 + u with |u| < 1
        let head_n = head.pow(n as i64, prec)?;
        let w = self.mul(&head_n.inv(prec + 8)?);
        let one = CInfty::one(self.q);
        let n_inv_int = mod_inverse(n as u64, p as u64);
        let n_inv = CInfty::from_int(self.q, n_inv_int as u32);
        let mut y = one.clone();
        let target = NormBound::Le(-exp_int(prec));
        let mut converged = false;
        for _ in 0..64 {
            // y' = y + (w y^{-(n-1)} ... ) Newton on G(y) = y^n - w:
            // y' = y - (y^n - w)/(n y^(n-1)) = y + (w y^(1-n) - y)/n
            let y_pow = y.pow(n as i64 - 1, prec)?;
            let delta = w.mul(&y_pow.inv(prec + 8)?).sub(&y).mul(&n_inv);
            if delta.window_empty() || delta.norm_bound().le(&target) {
                y = y.add(&delta);
                converged = true;
                break;
            }
            y = y.add(&delta);
        }
        if !converged {
            return Err(Error::precision("n-th root iteration did not converge"));
        }
        let mut out = head.mul(&y);
        out = out.with_error_at_least(NormBound::Le(
            head_exp - exp_int(prec),
        ));
        if let Some(er) = self.err {
            // relative precision is preserved by the root
            let rel = rat_pair(er, self.e) - v_top;
            out = out.with_error_at_least(NormBound::Le(head_exp + rel));
        }
        Ok(out)
    }

    /// Iterator over the known digits (exponent, coefficient), ascending.
    pub fn digits(&self) -> impl Iterator<Item = (Exp, FieldElement)> + '_ {
        self.terms.iter().map(|(&k, &c)| (rat_pair(k, self.e), c))
    }
}

fn gcd_i64(a: i64, b: i64) -> i64 {
    let (a, b) = (a.abs(), b.abs());
    if b == 0 {
        a
    } else {
        gcd_i64(b, a % b)
    }
}

fn lcm_i64(a: i64, b: i64) -> i64 {
    a / gcd_i64(a, b) * b
}

fn mod_inverse(n: u64, p: u64) -> u64 {
    // p prime, gcd(n, p) = 1
    let mut acc = 1u64;
    let mut base = n % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    acc
}

/// Canonical n-th root in the extension tower: the argument is embedded
/// into the smallest extension where a root exists and the root is the
/// canonical generator power there.
pub fn field_nth_root(c: &FieldElement, n: u64) -> Result<FieldElement> {
    if c.is_zero() {
        return Ok(*c);
    }
    let q = c.q;
    let m = c.m;
    let group = |mm: u32| (q as u64).pow(mm) - 1;
    // smallest multiple M of m with n * (q^m - 1) | q^M - 1; then the
    // embedded dlog is divisible by n
    let target = n * group(m);
    let mut big_m = m;
    loop {
        if group(big_m) % target == 0 {
            break;
        }
        big_m += m;
        if big_m > 64 {
            return Err(Error::Invalid(format!(
                "no tractable extension contains a canonical {n}-th root"
            )));
        }
    }
    let lifted = c.embed(big_m);
    let jj = lifted.dlog().unwrap();
    debug_assert_eq!(jj % n, 0, "embedding stride guarantees divisibility");
    let root = FieldElement::gen_pow(q, big_m, jj / n);
    debug_assert_eq!(root.pow(n), lifted);
    Ok(root.reduce())
}

/// β = ζ θ^(1/(q-1)) with ζ the canonical (q-1)-st root of -1, so that
/// β^(q-1) = -θ. Every construction downstream uses this same branch.
pub fn canonical_beta(q: u32) -> CInfty {
    let zeta = canonical_root_of_minus_one(q);
    CInfty::monomial(zeta, 1, q as i64 - 1)
}

/// The canonical ζ with ζ^(q-1) = -1: for even q this is 1; for odd q
/// it is g^((q^2-1)/(2(q-1))) in F_{q^2}.
pub fn canonical_root_of_minus_one(q: u32) -> FieldElement {
    if q % 2 == 0 {
        FieldElement::one(q, 1)
    } else {
        let k = (q as u64 + 1) / 2;
        FieldElement::gen_pow(q, 2, k).reduce()
    }
}

impl fmt::Debug for CInfty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            write!(f, "0")?;
        } else {
            let mut first = true;
            for (&k, c) in self.terms.iter().rev() {
                if !first {
                    write!(f, " + ")?;
                }
                first = false;
                if k == 0 {
                    write!(f, "{:?}", c)?;
                } else if self.e == 1 {
                    write!(f, "{:?}·θ^{}", c, k)?;
                } else {
                    write!(f, "{:?}·θ^({}/{})", c, k, self.e)?;
                }
            }
        }
        if let Some(er) = self.err {
            write!(f, " + O(θ^({}/{}))", er, self.e)?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct CInftyJson {
    q: u32,
    e: i64,
    m: u32,
    terms: Vec<(i64, Vec<u32>)>,
    err: Option<i64>,
}

impl Serialize for CInfty {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let m = self
            .terms
            .values()
            .map(|c| c.m)
            .fold(1u32, lcm_u32);
        let terms = self
            .terms
            .iter()
            .map(|(&k, c)| (k, c.embed(m).coords()))
            .collect();
        CInftyJson {
            q: self.q,
            e: self.e,
            m,
            terms,
            err: self.err,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CInfty {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = CInftyJson::deserialize(d)?;
        let mut terms = BTreeMap::new();
        for (k, coords) in j.terms {
            let c = FieldElement::from_coords(j.q, j.m, &coords)
                .map_err(|e| D::Error::custom(e.to_string()))?
                .reduce();
            if !c.is_zero() {
                terms.insert(k, c);
            }
        }
        let mut v = CInfty {
            q: j.q,
            e: j.e,
            err: j.err,
            terms,
        };
        v.normalize();
        Ok(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testkit::SplitMix64;

    fn random_value(rng: &mut SplitMix64, q: u32, exact: bool) -> CInfty {
        let e = [1, 2, 3][rng.below(3) as usize];
        let mut v = CInfty::zero(q);
        let top = rng.below(20) as i64 - 10;
        for i in 0..(1 + rng.below(6) as i64) {
            let c = FieldElement::gen_pow(q, 1, rng.below(q as u64 - 1));
            v = v.add(&CInfty::monomial(c, top - i - rng.below(3) as i64, e));
        }
        if !exact {
            v = v.with_error_at_least(NormBound::Le(rat_pair(top - 30, e)));
        }
        v
    }

    #[test]
    fn theta_times_theta_inv_is_one() {
        let q = 3;
        let t = CInfty::theta(q);
        let ti = t.inv(40).unwrap();
        let prod = t.mul(&ti);
        let r = prod.sub(&CInfty::one(q));
        assert!(r.window_empty());
        // in fact exact: θ^{-1} is a monomial
        assert!(ti.is_exact());
        assert!(prod.is_exactly_zero() || prod == CInfty::one(q));
    }

    #[test]
    fn ultrametric_norm_of_theta_plus_one() {
        let q = 3;
        let x = CInfty::theta(q).add(&CInfty::one(q));
        assert_eq!(x.val(), Some(exp_int(1))); // |θ+1| = q
    }

    #[test]
    fn geometric_inverse() {
        // (1 - θ^(1-q))^{-1} = 1 + θ^(1-q) + θ^(2(1-q)) + ...
        let q = 3;
        let one = CInfty::one(q);
        let x = one.sub(&CInfty::theta_pow(q, 1 - q as i64, 1));
        let y = x.inv(30).unwrap();
        for i in 0..5 {
            assert_eq!(
                y.coeff_at(exp_int((1 - q as i64) * i)),
                FieldElement::one(q, 1),
                "coefficient at θ^({}*(1-q))",
                i
            );
        }
        assert!(x.mul(&y).sub(&one).window_empty());
    }

    #[test]
    fn frobenius_examples() {
        let q = 3;
        assert_eq!(
            CInfty::theta(q).frobenius(1),
            CInfty::theta_pow(q, q as i64, 1)
        );
        // θ^(1/2) -> θ^(3/2) for q = 3
        assert_eq!(
            CInfty::theta_pow(q, 1, 2).frobenius(1),
            CInfty::theta_pow(q, 3, 2)
        );
        let mut rng = SplitMix64::new(7);
        for _ in 0..20 {
            let x = random_value(&mut rng, q, true);
            assert_eq!(x.frobenius(1).frobenius(-1), x);
            // frobenius(x,1) = x^q
            let mut xq = CInfty::one(q);
            for _ in 0..q {
                xq = xq.mul(&x);
            }
            assert_eq!(x.frobenius(1), xq);
        }
    }

    #[test]
    fn norm_multiplicativity_and_ultrametric_inequality() {
        let mut rng = SplitMix64::new(42);
        for _ in 0..200 {
            let q = if rng.below(2) == 0 { 2 } else { 3 };
            let x = random_value(&mut rng, q, true);
            let y = random_value(&mut rng, q, true);
            if x.window_empty() || y.window_empty() {
                continue;
            }
            let xv = x.val().unwrap();
            let yv = y.val().unwrap();
            assert_eq!(x.mul(&y).val().unwrap(), xv + yv);
            let s = x.add(&y);
            if let Some(sv) = s.val() {
                assert!(sv <= xv.max(yv));
                if xv != yv {
                    assert_eq!(sv, xv.max(yv));
                }
            }
        }
    }

    #[test]
    fn double_inverse_roundtrip() {
        let mut rng = SplitMix64::new(1);
        for _ in 0..40 {
            let q = 3;
            let x = random_value(&mut rng, q, false);
            if x.window_empty() {
                continue;
            }
            let y = x.inv(60).unwrap().inv(60).unwrap();
            assert!(x.sub(&y).window_empty(), "x = {:?}, inv(inv(x)) = {:?}", x, y);
        }
    }

    #[test]
    fn addition_is_exact_and_order_independent() {
        let mut rng = SplitMix64::new(9);
        let q = 2;
        let vals: Vec<CInfty> = (0..8).map(|_| random_value(&mut rng, q, false)).collect();
        let sum_fwd = vals.iter().fold(CInfty::zero(q), |a, b| a.add(b));
        let sum_rev = vals.iter().rev().fold(CInfty::zero(q), |a, b| a.add(b));
        let mid: Vec<&CInfty> = vals.iter().skip(3).chain(vals.iter().take(3)).collect();
        let sum_mid = mid.into_iter().fold(CInfty::zero(q), |a, b| a.add(b));
        assert_eq!(sum_fwd, sum_rev);
        assert_eq!(sum_fwd, sum_mid);
    }

    #[test]
    fn canonical_beta_defining_relation() {
        // β^(q-1) + θ = 0 to full precision, and the stated shapes
        let b2 = canonical_beta(2);
        assert_eq!(b2, CInfty::theta(2)); // q = 2: β = θ
        for q in [2u32, 3, 5] {
            let b = canonical_beta(q);
            let pow = b.pow(q as i64 - 1, 40).unwrap();
            let resid = pow.add(&CInfty::theta(q));
            assert!(resid.is_exactly_zero(), "q={q}: β^(q-1) = {:?}", pow);
        }
        // q = 3: β = i θ^(1/2) with i^2 = -1
        let b3 = canonical_beta(3);
        let i = b3.coeff_at(rat_pair(1, 2));
        let minus_one = FieldElement::one(3, 2).neg();
        assert_eq!(i.mul(&i), minus_one.embed(i.m));
        assert_eq!(b3.mul(&b3), CInfty::theta(3).neg());
    }

    #[test]
    fn nth_root_examples() {
        let q = 3;
        // cube... use (q^2-1)=8th root of θ^8: must be θ (times canonical unit root 1)
        let x = CInfty::theta_pow(q, 8, 1);
        let r = x.nth_root(8, 40).unwrap();
        assert_eq!(r.val(), Some(exp_int(1)));
        let back = r.pow(8, 40).unwrap();
        assert!(back.sub(&x).window_empty());
        // root of a non-monomial
        let y = CInfty::theta(q).add(&CInfty::one(q));
        let ry = y.nth_root(2, 50).unwrap();
        assert!(ry.mul(&ry).sub(&y).window_empty());
    }

    #[test]
    fn inversion_of_unresolved_value_fails_loudly() {
        let q = 3;
        // no known digits: inversion must signal precision exhaustion
        let x = CInfty::unknown(q, exp_int(-5));
        assert!(matches!(
            x.inv(40),
            Err(crate::error::Error::PrecisionExhausted { .. })
        ));
        // a value that cancels to nothing at its precision behaves the same
        let y = CInfty::theta(q)
            .with_error_at_least(NormBound::Le(exp_int(2)))
            .sub(&CInfty::theta(q));
        assert!(y.inv(40).is_err());
    }

    #[test]
    fn prime_power_base_field() {
        // q = 4: β = θ^(1/3) with β^3 = -θ = θ
        let b = canonical_beta(4);
        let cube = b.pow(3, 20).unwrap();
        assert!(cube.sub(&CInfty::theta(4)).is_exactly_zero());
        let x = CInfty::theta(4).add(&CInfty::from_field(
            FieldElement::gen_pow(4, 1, 1),
        ));
        let y = x.inv(30).unwrap();
        assert!(x.mul(&y).sub(&CInfty::one(4)).window_empty());
    }

    #[test]
    fn error_propagation_in_products() {
        let q = 3;
        let x = CInfty::theta(q).with_error_at_least(NormBound::Le(exp_int(-10)));
        let y = CInfty::theta_pow(q, 5, 1);
        let p = x.mul(&y);
        // error floor shifts by the exact factor's size
        assert_eq!(p.err_bound(), NormBound::Le(exp_int(-5)));
        let unknown = CInfty::unknown(q, exp_int(-3));
        let s = unknown.add(&CInfty::one(q));
        assert_eq!(s.val(), Some(exp_int(0)));
        assert_eq!(s.err_bound(), NormBound::Le(exp_int(-3)));
    }

    #[test]
    fn serde_roundtrip_bit_exact() {
        let mut rng = SplitMix64::new(33);
        for _ in 0..30 {
            let q = if rng.below(2) == 0 { 2 } else { 3 };
            let exact = rng.below(2) == 0;
            let mut x = random_value(&mut rng, q, exact);
            if rng.below(2) == 0 {
                x = x.mul(&canonical_beta(q));
            }
            let json = serde_json::to_string(&x).unwrap();
            let y: CInfty = serde_json::from_str(&json).unwrap();
            assert_eq!(x, y);
            let json2 = serde_json::to_string(&y).unwrap();
            assert_eq!(json, json2);
        }
    }
}
