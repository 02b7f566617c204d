//! The generating function H(Z) = exp(Z)^(-1)·exp(Z/(θ-t)) of Perkins
//! series coefficients: its three-case coefficient recurrence, the
//! higher-derivative extracts D_j, the weak modular forms G_{j,r} (which
//! vanish identically), and the H_k chain feeding the terminal identity.

use std::collections::BTreeSet;

use crate::cinfty::CInfty;
use crate::drinfeld::DrinfeldModule;
use crate::eisenstein::PointContext;
use crate::error::Result;
use crate::norm::exp_int;
use crate::tate::{geometric_kernel, Tate};

/// Coefficients c_0, ..., c_M of H(Z) as truncated t-series.
pub struct HSeries {
    pub coeffs: Vec<Tate>,
}

/// Largest j with q^j - 1 <= m.
fn max_exp_index(q: u32, m: usize) -> usize {
    let mut j = 0usize;
    while (q as u64).pow(j as u32 + 1) - 1 <= m as u64 {
        j += 1;
    }
    j
}

/// The coefficient recurrence: c_0 = 1/(θ-t);
/// c_i = -Σ_{j=1}^{l-1} α_j c_{i-(q^j-1)} for q^(l-1)-1 < i < q^l-1;
/// c_i = α_l/(θ^(q^l)-t) - Σ_{j=1}^{l} α_j c_{i-(q^j-1)} for i = q^l-1.
pub fn h_series(module: &DrinfeldModule, m: usize, n: usize) -> Result<HSeries> {
    let q = module.q();
    let mut coeffs: Vec<Tate> = Vec::with_capacity(m + 1);
    coeffs.push(geometric_kernel(q, 0, n));
    for i in 1..=m {
        // both cases collapse to: sum over all j with q^j - 1 <= i, plus
        // the pole part exactly when i = q^l - 1
        let mut acc = Tate::zero(q, n);
        for j in 1..=max_exp_index(q, i) {
            let step = (q as u64).pow(j as u32) as usize - 1;
            acc = acc.sub(&coeffs[i - step].scalar_mul(module.alpha(j)));
        }
        if is_qpow_minus_one(q, i) {
            let l = exact_qpow_index(q, i);
            acc = acc.add(&geometric_kernel(q, l as u32, n).scalar_mul(module.alpha(l)));
        }
        coeffs.push(acc);
    }
    Ok(HSeries { coeffs })
}

fn is_qpow_minus_one(q: u32, i: usize) -> bool {
    let mut p = q as u64;
    while p - 1 <= i as u64 {
        if p - 1 == i as u64 {
            return true;
        }
        p *= q as u64;
    }
    false
}

fn exact_qpow_index(q: u32, i: usize) -> usize {
    let mut p = q as u64;
    let mut j = 1usize;
    loop {
        if p - 1 == i as u64 {
            return j;
        }
        p *= q as u64;
        j += 1;
    }
}

/// Division oracle: H = N(Z)/D(Z) with N = Σ α_j kernel(j) Z^(q^j - 1)
/// and D = Σ α_j Z^(q^j - 1), divided as formal series in Z.
pub fn h_series_by_division(module: &DrinfeldModule, m: usize, n: usize) -> Result<HSeries> {
    let q = module.q();
    let jmax = max_exp_index(q, m);
    let zero = Tate::zero(q, n);
    let mut num = vec![zero.clone(); m + 1];
    let mut den = vec![zero.clone(); m + 1];
    num[0] = geometric_kernel(q, 0, n);
    den[0] = Tate::from_scalar(&CInfty::one(q), n);
    for j in 1..=jmax {
        let idx = (q as u64).pow(j as u32) as usize - 1;
        if idx <= m {
            num[idx] = geometric_kernel(q, j as u32, n).scalar_mul(module.alpha(j));
            den[idx] = Tate::from_scalar(module.alpha(j), n);
        }
    }
    // h_k = n_k - Σ_{s=1}^{k} d_s h_{k-s} (d_0 = 1)
    let mut h = vec![zero; m + 1];
    for k in 0..=m {
        let mut acc = num[k].clone();
        for s in 1..=k {
            if den[s].window_empty() && !den[s].coeffs().iter().any(|c| !c.is_exactly_zero()) {
                continue;
            }
            acc = acc.sub(&den[s].mul(&h[k - s]));
        }
        h[k] = acc;
    }
    Ok(HSeries { coeffs: h })
}

/// D_j(z,t): the Z^(q^j - 1) coefficient of H(Z).
pub fn d_extract(h: &HSeries, q: u32, j: usize) -> &Tate {
    &h.coeffs[(q as u64).pow(j as u32) as usize - 1]
}

/// G_{j,r} = ((t-θ)D_j - g_1 D_{j-1}^((1)) - ... - g_j D_0^((j)))/Δ_r;
/// vanishes identically as a T-valued function.
pub fn g_jr(ctx: &PointContext, h: &HSeries, j: usize, n: usize) -> Result<Tate> {
    let q = ctx.q();
    assert!(1 <= j && j < ctx.rank());
    let mut acc = Tate::t_minus(&CInfty::theta(q), n).mul(d_extract(h, q, j));
    for i in 1..=j {
        let twisted = d_extract(h, q, j - i).twist(i as i64);
        acc = acc.sub(&twisted.scalar_mul(ctx.module.g(i)));
    }
    let delta_inv = ctx.module.delta().inv(ctx.module.precision())?;
    Ok(acc.scalar_mul(&delta_inv))
}

/// The chain H_0 = G_{r-1,r}^(-(r-2)),
/// H_k = G_{r-(k+1),r}^(-(r-(k+2))) - Σ_l (g_{r-l}/Δ)^(-(r-(k+2))) H_{k-l};
/// every member vanishes identically.
pub fn h_chain(ctx: &PointContext, h: &HSeries, n: usize) -> Result<Vec<Tate>> {
    let r = ctx.rank();
    let prec = ctx.module.precision();
    let delta_inv = ctx.module.delta().inv(prec)?;
    let mut out: Vec<Tate> = Vec::new();
    for k in 0..=r.saturating_sub(2) {
        let tw = -((r as i64) - (k as i64 + 2));
        let g = g_jr(ctx, h, r - (k + 1), n)?;
        let mut acc = g.twist(tw);
        for l in 1..=k {
            let ratio = ctx.module.g(r - l).mul(&delta_inv).frobenius(tw);
            acc = acc.sub(&out[k - l].scalar_mul(&ratio));
        }
        out.push(acc);
    }
    Ok(out)
}

/// The Perkins-series coefficient at Z^(j-1), by literal expansion of
/// Σ' (a_1(t),...,a_r(t))/(Z - a·z) on a small disk: equals -ℰ_z(j,t)^T.
/// Returns the coordinate vectors for j = 1, ..., j_max.
pub fn perkins_coefficients(
    ctx: &PointContext,
    d: i64,
    n: usize,
    j_max: usize,
) -> Result<Vec<Vec<Tate>>> {
    let q = ctx.q();
    let r = ctx.rank();
    let prec = ctx.module.precision();
    let mut out: Vec<Vec<Vec<CInfty>>> =
        vec![vec![vec![CInfty::zero(q); n]; r]; j_max];
    for (a, v) in crate::lattice::lattice_vectors(&ctx.z, d, true) {
        // 1/(Z - v) = -Σ_m Z^m / v^(m+1)
        let v_inv = v.inv(prec)?;
        let mut pow = v_inv.clone();
        for m in 0..j_max {
            for (coord, aj) in a.iter().enumerate() {
                if aj.is_zero() {
                    continue;
                }
                for (i, c) in aj.coeffs().iter().enumerate() {
                    if c.is_zero() || i >= n {
                        continue;
                    }
                    out[m][coord][i] = out[m][coord][i].sub(&pow.scale(c));
                }
            }
            if m + 1 < j_max {
                pow = pow.mul(&v_inv);
            }
        }
    }
    let low = ctx.z.model().shell_low(d + 1);
    Ok(out
        .into_iter()
        .enumerate()
        .map(|(m, coords)| {
            let k = m as i64 + 1;
            let tail_err = crate::norm::NormBound::Le(-exp_int(k) * low);
            coords
                .into_iter()
                .map(|cs| {
                    Tate::new(
                        q,
                        cs,
                        crate::norm::NormBound::Le(-exp_int(k) * exp_int(n as i64)),
                        Some(exp_int(k)),
                    )
                    .with_coeff_error(tail_err)
                })
                .collect()
        })
        .collect())
}

/// Structural weight check for the recurrence: every monomial Πα_j^(e_j)
/// appearing in c_i has weight Σ e_j (q^j - 1) equal to i.
pub fn weights_are_homogeneous(q: u32, m: usize, alphas: usize) -> bool {
    // symbolic coefficients: sets of exponent vectors over α_1..α_alphas;
    // the pole parts 1/(θ^(q^l)-t) carry weight 0 except the α_l factor
    type Monos = BTreeSet<Vec<u32>>;
    let mut coeffs: Vec<Monos> = Vec::with_capacity(m + 1);
    let empty = vec![0u32; alphas];
    coeffs.push(std::iter::once(empty.clone()).collect());
    for i in 1..=m {
        let mut set = Monos::new();
        for j in 1..=alphas {
            let step = (q as u64).pow(j as u32) as usize - 1;
            if step > i {
                break;
            }
            for mono in &coeffs[i - step] {
                let mut v = mono.clone();
                v[j - 1] += 1;
                set.insert(v);
            }
        }
        if is_qpow_minus_one(q, i) {
            let l = exact_qpow_index(q, i);
            if l <= alphas {
                let mut v = empty.clone();
                v[l - 1] += 1;
                set.insert(v);
            }
        }
        coeffs.push(set);
    }
    for (i, set) in coeffs.iter().enumerate() {
        for mono in set {
            let w: u64 = mono
                .iter()
                .enumerate()
                .map(|(j, &e)| e as u64 * ((q as u64).pow(j as u32 + 1) - 1))
                .sum();
            if w != i as u64 {
                return false;
            }
        }
    }
    true
}
