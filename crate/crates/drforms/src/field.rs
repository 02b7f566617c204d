//! Arithmetic in F_q and its extensions F_{q^m}.
//!
//! Every extension F_{p^n} is realized as F_p[x]/(f_n) where f_n is the
//! first primitive polynomial (in a fixed enumeration order) compatible
//! with the polynomials chosen for all proper subfields: for d | n the
//! element x^((p^n-1)/(p^d-1)) is a root of f_d. Compatibility makes the
//! generator-power maps genuine field embeddings, so every root of unity
//! and every subfield inclusion is reproducible across runs.
//!
//! Fields here are small (a few thousand elements at most), so elements
//! are stored as discrete logarithms with respect to the canonical
//! generator and addition goes through a Zech logarithm table.

use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, LazyLock, Mutex};

use crate::error::{Error, Result};

/// Multiplicative structure of F_{p^n} with Zech logarithms.
pub struct FieldTable {
    pub p: u32,
    pub n: u32,
    /// p^n
    pub size: u64,
    /// Coefficients of the chosen primitive polynomial, ascending, length n+1.
    pub modulus: Vec<u32>,
    /// power[k] = coordinate vector of g^k, k in 0..size-1.
    power: Vec<Vec<u32>>,
    /// Discrete log of a nonzero coordinate vector.
    dlog: HashMap<Vec<u32>, u64>,
    /// zech[k] = dlog(1 + g^k), or u64::MAX when 1 + g^k = 0.
    zech: Vec<u64>,
}

static TABLES: LazyLock<Mutex<HashMap<(u32, u32), Arc<FieldTable>>>> =
    LazyLock::new(|| Mutex::new(HashMap::new()));

fn poly_mul_mod(a: &[u32], b: &[u32], modulus: &[u32], p: u32) -> Vec<u32> {
    let n = modulus.len() - 1;
    let mut prod = vec![0u64; a.len() + b.len()];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + ai as u64 * bj as u64) % p as u64;
        }
    }
    // reduce by the monic modulus
    for i in (n..prod.len()).rev() {
        let c = prod[i] % p as u64;
        if c == 0 {
            continue;
        }
        prod[i] = 0;
        for (j, &mj) in modulus.iter().enumerate().take(n) {
            let idx = i - n + j;
            let sub = (c * mj as u64) % p as u64;
            prod[idx] = (prod[idx] + p as u64 - sub) % p as u64;
        }
    }
    prod.truncate(n.max(1));
    prod.resize(n.max(1), 0);
    prod.iter().map(|&c| c as u32).collect()
}

fn prime_factors(mut v: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= v {
        if v % d == 0 {
            out.push(d);
            while v % d == 0 {
                v /= d;
            }
        }
        d += 1;
    }
    if v > 1 {
        out.push(v);
    }
    out
}

/// Order of x in (F_p[x]/(f))^* is p^n - 1, checked via the prime factors.
fn is_primitive(modulus: &[u32], p: u32) -> bool {
    let n = (modulus.len() - 1) as u32;
    if modulus[0] == 0 {
        return false;
    }
    let order = p.pow(n) as u64 - 1;
    let x = {
        let mut v = vec![0u32; n.max(1) as usize];
        if n == 1 {
            // x mod (x + c) = -c
            v[0] = (p - modulus[0] % p) % p;
        } else {
            v[1] = 1;
        }
        v
    };
    let one = {
        let mut v = vec![0u32; n.max(1) as usize];
        v[0] = 1;
        v
    };
    let pow = |mut base: Vec<u32>, mut exp: u64| -> Vec<u32> {
        let mut acc = one.clone();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = poly_mul_mod(&acc, &base, modulus, p);
            }
            base = poly_mul_mod(&base, &base, modulus, p);
            exp >>= 1;
        }
        acc
    };
    if pow(x.clone(), order) != one {
        return false;
    }
    for ell in prime_factors(order) {
        if pow(x.clone(), order / ell) == one {
            return false;
        }
    }
    true
}

/// Finds the canonical primitive polynomial of degree n over F_p:
/// the first one, enumerating coefficient vectors (c_{n-1},...,c_0) in
/// lexicographic order, that is primitive and subfield-compatible.
fn canonical_modulus(p: u32, n: u32) -> Vec<u32> {
    let subs: Vec<(u32, Arc<FieldTable>)> = (1..n)
        .filter(|d| n % d == 0)
        .map(|d| (d, field_table(p, d)))
        .collect();
    let count = (p as u64).pow(n);
    for code in 0..count {
        // code digits give (c_{n-1}, ..., c_1, c_0), most significant first
        let mut coeffs = vec![0u32; (n + 1) as usize];
        coeffs[n as usize] = 1;
        let mut c = code;
        for i in 0..n {
            coeffs[i as usize] = (c % p as u64) as u32;
            c /= p as u64;
        }
        if !is_primitive(&coeffs, p) {
            continue;
        }
        // subfield compatibility: f_d(x^((p^n-1)/(p^d-1))) = 0 mod f
        let order = p.pow(n) as u64 - 1;
        let mut ok = true;
        for (d, sub) in &subs {
            let stride = order / (p.pow(*d) as u64 - 1);
            let x = {
                let mut v = vec![0u32; n as usize];
                if n == 1 {
                    v[0] = (p - coeffs[0] % p) % p;
                } else {
                    v[1] = 1;
                }
                v
            };
            let mut y = {
                let mut v = vec![0u32; n as usize];
                v[0] = 1;
                v
            };
            let mut base = x;
            let mut e = stride;
            while e > 0 {
                if e & 1 == 1 {
                    y = poly_mul_mod(&y, &base, &coeffs, p);
                }
                base = poly_mul_mod(&base, &base, &coeffs, p);
                e >>= 1;
            }
            // evaluate f_d at y
            let mut acc = vec![0u32; n as usize];
            for &fc in sub.modulus.iter().rev() {
                acc = poly_mul_mod(&acc, &y, &coeffs, p);
                acc[0] = (acc[0] + fc) % p;
            }
            if acc.iter().any(|&c| c != 0) {
                ok = false;
                break;
            }
        }
        if ok {
            return coeffs;
        }
    }
    unreachable!("no compatible primitive polynomial of degree {n} over F_{p}");
}

fn build_table(p: u32, n: u32) -> FieldTable {
    let modulus = canonical_modulus(p, n);
    let size = (p as u64).pow(n);
    let order = size - 1;
    let x = {
        let mut v = vec![0u32; n as usize];
        if n == 1 {
            v[0] = (p - modulus[0] % p) % p;
        } else {
            v[1] = 1;
        }
        v
    };
    let mut power = Vec::with_capacity(order as usize);
    let mut dlog = HashMap::with_capacity(order as usize);
    let mut cur = vec![0u32; n as usize];
    cur[0] = 1;
    for k in 0..order {
        power.push(cur.clone());
        dlog.insert(cur.clone(), k);
        cur = poly_mul_mod(&cur, &x, &modulus, p);
    }
    debug_assert_eq!(cur, power[0], "generator order mismatch");
    let mut zech = vec![u64::MAX; order as usize];
    for k in 0..order as usize {
        let mut v = power[k].clone();
        v[0] = (v[0] + 1) % p;
        if v.iter().all(|&c| c == 0) {
            zech[k] = u64::MAX;
        } else {
            zech[k] = dlog[&v];
        }
    }
    FieldTable {
        p,
        n,
        size,
        modulus,
        power,
        dlog,
        zech,
    }
}

thread_local! {
    static LOCAL_TABLES: RefCell<HashMap<(u32, u32), Arc<FieldTable>>> =
        RefCell::new(HashMap::new());
    // single-slot cache: coefficient loops touch one field at a time
    static LAST_TABLE: RefCell<Option<((u32, u32), Arc<FieldTable>)>> =
        const { RefCell::new(None) };
}

/// The (cached) table for F_{p^n}.
pub fn field_table(p: u32, n: u32) -> Arc<FieldTable> {
    debug_assert!(n >= 1, "extension degree must be positive");
    LAST_TABLE.with(|slot| {
        if let Some((key, t)) = slot.borrow().as_ref() {
            if *key == (p, n) {
                return t.clone();
            }
        }
        let t = LOCAL_TABLES.with(|cell| {
            if let Some(t) = cell.borrow().get(&(p, n)) {
                return t.clone();
            }
            let t = shared_table(p, n);
            cell.borrow_mut().insert((p, n), t.clone());
            t
        });
        *slot.borrow_mut() = Some(((p, n), t.clone()));
        t
    })
}

fn shared_table(p: u32, n: u32) -> Arc<FieldTable> {
    if let Some(t) = TABLES.lock().unwrap().get(&(p, n)) {
        return t.clone();
    }
    // Build outside the lock: construction recurses into subfields.
    let t = Arc::new(build_table(p, n));
    TABLES
        .lock()
        .unwrap()
        .entry((p, n))
        .or_insert(t)
        .clone()
}

/// Splits a prime power q = p^s. Errors when q is not a prime power.
pub fn split_prime_power(q: u32) -> Result<(u32, u32)> {
    // fast path for the fields this crate actually exercises
    match q {
        2 | 3 | 5 | 7 => return Ok((q, 1)),
        4 => return Ok((2, 2)),
        8 => return Ok((2, 3)),
        9 => return Ok((3, 2)),
        _ => {}
    }
    if q < 2 {
        return Err(Error::InvalidConfig(format!("q = {q} is not a prime power")));
    }
    let fs = prime_factors(q as u64);
    if fs.len() != 1 {
        return Err(Error::InvalidConfig(format!("q = {q} is not a prime power")));
    }
    let p = fs[0] as u32;
    let mut s = 0;
    let mut v = q;
    while v > 1 {
        v /= p;
        s += 1;
    }
    if p.pow(s) != q {
        return Err(Error::InvalidConfig(format!("q = {q} is not a prime power")));
    }
    Ok((p, s))
}

/// An element of F_{q^m}, stored as a discrete logarithm with respect to
/// the canonical generator (`log == None` encodes zero).
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldElement {
    pub q: u32,
    pub m: u32,
    log: Option<u64>,
}

impl FieldElement {
    fn table(&self) -> Arc<FieldTable> {
        let (p, s) = split_prime_power(self.q).expect("validated at construction");
        field_table(p, s * self.m)
    }

    fn group_order(&self) -> u64 {
        (self.q as u64).pow(self.m) - 1
    }

    pub fn zero(q: u32, m: u32) -> Self {
        FieldElement { q, m, log: None }
    }

    pub fn one(q: u32, m: u32) -> Self {
        FieldElement { q, m, log: Some(0) }
    }

    /// The canonical generator of F_{q^m}^*.
    pub fn generator(q: u32, m: u32) -> Self {
        // force table construction so that invalid q panics early
        let (p, s) = split_prime_power(q).expect("q must be a prime power");
        let _ = field_table(p, s * m);
        FieldElement { q, m, log: Some(1) }
    }

    pub fn gen_pow(q: u32, m: u32, k: u64) -> Self {
        let e = FieldElement::generator(q, m);
        FieldElement {
            q,
            m,
            log: Some(k % e.group_order()),
        }
    }

    /// Maps a prime-field integer into F_{q^m}.
    pub fn from_int(q: u32, m: u32, v: u32) -> Self {
        let (p, s) = split_prime_power(q).expect("q must be a prime power");
        let v = v % p;
        if v == 0 {
            return FieldElement::zero(q, m);
        }
        let t = field_table(p, s * m);
        let mut coords = vec![0u32; t.n as usize];
        coords[0] = v;
        let log = t.dlog[&coords];
        FieldElement { q, m, log: Some(log) }
    }

    pub fn is_zero(&self) -> bool {
        self.log.is_none()
    }

    pub fn dlog(&self) -> Option<u64> {
        self.log
    }

    /// Coordinates over F_p (length s*m) of this element.
    pub fn coords(&self) -> Vec<u32> {
        let t = self.table();
        match self.log {
            None => vec![0; t.n as usize],
            Some(k) => t.power[k as usize].clone(),
        }
    }

    pub fn from_coords(q: u32, m: u32, coords: &[u32]) -> Result<Self> {
        let (p, s) = split_prime_power(q)?;
        let t = field_table(p, s * m);
        if coords.len() != t.n as usize {
            return Err(Error::Invalid(format!(
                "coordinate vector has length {} but F_{{{}^{}}} needs {}",
                coords.len(),
                q,
                m,
                t.n
            )));
        }
        let coords: Vec<u32> = coords.iter().map(|&c| c % p).collect();
        if coords.iter().all(|&c| c == 0) {
            return Ok(FieldElement::zero(q, m));
        }
        match t.dlog.get(&coords) {
            Some(&k) => Ok(FieldElement { q, m, log: Some(k) }),
            None => Err(Error::Invalid("coordinates not in field".into())),
        }
    }

    /// Canonical embedding into F_{q^M} for m | M.
    pub fn embed(&self, big_m: u32) -> Self {
        assert!(
            big_m % self.m == 0,
            "no embedding of F_{{q^{}}} into F_{{q^{}}}",
            self.m,
            big_m
        );
        if big_m == self.m {
            return *self;
        }
        let stride =
            ((self.q as u64).pow(big_m) - 1) / ((self.q as u64).pow(self.m) - 1);
        FieldElement {
            q: self.q,
            m: big_m,
            log: self.log.map(|k| k * stride),
        }
    }

    /// Reduces to the smallest subfield containing this element.
    pub fn reduce(&self) -> Self {
        let Some(k) = self.log else {
            return FieldElement::zero(self.q, 1);
        };
        let full = self.group_order();
        for d in 1..=self.m {
            if self.m % d != 0 {
                continue;
            }
            let sub = (self.q as u64).pow(d) - 1;
            let stride = full / sub;
            if k % stride == 0 {
                return FieldElement {
                    q: self.q,
                    m: d,
                    log: Some(k / stride),
                };
            }
        }
        *self
    }

    fn lift_pair(a: &FieldElement, b: &FieldElement) -> (FieldElement, FieldElement) {
        assert_eq!(a.q, b.q, "mixed base fields");
        let m = lcm_u32(a.m, b.m);
        (a.embed(m), b.embed(m))
    }

    pub fn add(&self, other: &FieldElement) -> FieldElement {
        let (a, b) = FieldElement::lift_pair(self, other);
        match (a.log, b.log) {
            (None, _) => b,
            (_, None) => a,
            (Some(x), Some(y)) => {
                let t = a.table();
                let ord = a.group_order();
                // g^x + g^y = g^x (1 + g^(y-x))
                let diff = (y + ord - x) % ord;
                let z = t.zech[diff as usize];
                if z == u64::MAX {
                    FieldElement::zero(a.q, a.m)
                } else {
                    FieldElement {
                        q: a.q,
                        m: a.m,
                        log: Some((x + z) % ord),
                    }
                }
            }
        }
    }

    pub fn neg(&self) -> FieldElement {
        let Some(k) = self.log else { return *self };
        if self.q % 2 == 0 {
            return *self;
        }
        let ord = self.group_order();
        FieldElement {
            q: self.q,
            m: self.m,
            log: Some((k + ord / 2) % ord),
        }
    }

    pub fn sub(&self, other: &FieldElement) -> FieldElement {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &FieldElement) -> FieldElement {
        let (a, b) = FieldElement::lift_pair(self, other);
        match (a.log, b.log) {
            (Some(x), Some(y)) => FieldElement {
                q: a.q,
                m: a.m,
                log: Some((x + y) % a.group_order()),
            },
            _ => FieldElement::zero(a.q, a.m),
        }
    }

    pub fn inv(&self) -> Result<FieldElement> {
        let Some(k) = self.log else {
            return Err(Error::Invalid("division by zero in F_{q^m}".into()));
        };
        let ord = self.group_order();
        Ok(FieldElement {
            q: self.q,
            m: self.m,
            log: Some((ord - k) % ord),
        })
    }

    /// x -> x^(q^j), for any integer j (negative j inverts the Frobenius).
    pub fn frobenius(&self, j: i64) -> FieldElement {
        let Some(k) = self.log else { return *self };
        let ord = self.group_order() as u128;
        let jj = j.rem_euclid(self.m as i64) as u32;
        let mut f = 1u128;
        for _ in 0..jj {
            f = (f * self.q as u128) % ord;
        }
        FieldElement {
            q: self.q,
            m: self.m,
            log: Some(((k as u128 * f) % ord) as u64),
        }
    }

    pub fn pow(&self, e: u64) -> FieldElement {
        let Some(k) = self.log else {
            return if e == 0 {
                FieldElement::one(self.q, self.m)
            } else {
                *self
            };
        };
        let ord = self.group_order() as u128;
        FieldElement {
            q: self.q,
            m: self.m,
            log: Some(((k as u128 * e as u128) % ord) as u64),
        }
    }

    /// Multiplicative order (1 for the identity); zero has no order.
    pub fn order(&self) -> Option<u64> {
        let k = self.log?;
        let ord = self.group_order();
        Some(ord / gcd_u64(k, ord))
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.log {
            None => write!(f, "0"),
            Some(0) => write!(f, "1"),
            Some(k) => write!(f, "g{}^{}", if self.m > 1 { format!("[{}]", self.m) } else { String::new() }, k),
        }
    }
}

pub fn gcd_u64(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd_u64(b, a % b)
    }
}

pub fn lcm_u32(a: u32, b: u32) -> u32 {
    a / (gcd_u64(a as u64, b as u64) as u32) * b
}

/// The canonical element of the given multiplicative order in F_{q^m},
/// namely g^((q^m-1)/order) for the fixed generator g.
pub fn root_of_unity(q: u32, m: u32, order: u64) -> Result<FieldElement> {
    let group = (q as u64).pow(m) - 1;
    if order == 0 || group % order != 0 {
        return Err(Error::Invalid(format!(
            "no element of order {order} in F_{{{q}^{m}}}: {order} does not divide {group}"
        )));
    }
    Ok(FieldElement::gen_pow(q, m, group / order))
}
