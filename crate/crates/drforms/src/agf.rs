//! Anderson generating functions, the matrix F(z,t) of their twists,
//! the Anderson–Thakur function ω(t), and the determinant identity
//! linking det F to ω through the h-function.

use crate::cinfty::{canonical_beta, CInfty};
use crate::drinfeld::{carlitz_pi, DrinfeldModule};
use crate::error::{Error, Result};
use crate::norm::{exp_int, Exp, NormBound};
use crate::tate::{geometric_kernel, mat_mul, mat_transpose, mat_twist, Tate, TateMat};

/// The Anderson generating function s_φ(w;t) as a truncated t-series,
/// through the partial-fraction expansion Σ_j α_j w^(q^j)/(θ^(q^j) - t).
pub fn agf(module: &DrinfeldModule, w: &CInfty, n: usize) -> Result<Tate> {
    let q = module.q();
    let mut acc = Tate::zero(q, n);
    let NormBound::Le(x_log) = w.norm_bound() else {
        return Ok(acc);
    };
    for j in 0..module.alpha_count() {
        let c = module.alpha(j).mul(&w.frobenius(j as i64));
        if c.is_exactly_zero() {
            continue;
        }
        acc = acc.add(&geometric_kernel(q, j as u32, n).scalar_mul(&c));
    }
    // series tail over the omitted j: dominated by the t^0 coefficient
    // bound sup_j |α_j| |w|^(q^j) q^(-q^j)
    let tail = module
        .oracle()
        .tail_sup(x_log - exp_int(1), module.alpha_count())?;
    Ok(acc.with_coeff_error(tail))
}

/// Definition-route oracle: coefficient i of s_φ(w;t) is exp(w/θ^(i+1)).
pub fn agf_by_definition(module: &DrinfeldModule, w: &CInfty, n: usize) -> Result<Tate> {
    let q = module.q();
    let mut coeffs = Vec::with_capacity(n);
    let theta_inv = CInfty::theta_pow(q, -1, 1);
    let mut arg = w.mul(&theta_inv);
    for _ in 0..n {
        coeffs.push(module.eval_exp(&arg)?);
        arg = arg.mul(&theta_inv);
    }
    // |c_i| = |exp(w/θ^(i+1))|; for the arguments used here this sits on
    // the geometric envelope |w| q^(-(i+1))
    let NormBound::Le(x_log) = w.norm_bound() else {
        return Ok(Tate::zero(q, n));
    };
    Ok(Tate::new(
        q,
        coeffs,
        NormBound::Le(x_log - exp_int(n as i64 + 1)),
        Some(exp_int(1)),
    ))
}

/// (t - θ)·s_φ(w;t) with the sharpened tail envelope coming from the
/// functional equation: its i-th coefficient is Σ_k g_k exp(w/θ^(i+1))^(q^k),
/// so the tail decays with ratio q^(-q) and the series extends to |t| < q^q.
/// Requires |w|/q below the least lattice norm.
pub fn agf_residue_series(module: &DrinfeldModule, w: &CInfty, n: usize) -> Result<Tate> {
    let q = module.q();
    let s = agf(module, w, n)?;
    let lin = Tate::t_minus(&CInfty::theta(q), n);
    let prod = lin.mul(&s);
    let NormBound::Le(x_log) = w.norm_bound() else {
        return Ok(prod);
    };
    let min_norm = module.scale_val() + module.point().model().shell_low(0);
    if x_log - exp_int(1) >= min_norm {
        return Err(Error::OutOfDomain(
            "residue-series envelope needs |w|/q below the least lattice norm".into(),
        ));
    }
    // B = max_k |g_k| (|w| q^-(N+1))^(q^k)
    let mut b = NormBound::NegInf;
    for k in 1..=module.rank() {
        let g_log = module.g(k).norm_bound();
        let x = (x_log - exp_int(n as i64 + 1)) * Exp::from_integer((q as i128).pow(k as u32));
        b = b.max(g_log.mul(NormBound::Le(x)));
    }
    Ok(prod.with_tail(b, Some(exp_int(q as i64))))
}

/// The r×r matrix F(z,t) with entries s_i^((j-1))(z;t).
pub fn build_f(module: &DrinfeldModule, n: usize) -> Result<TateMat> {
    let r = module.rank();
    let gens = module.generators();
    let mut rows = Vec::with_capacity(r);
    for w in &gens {
        let s = agf(module, w, n)?;
        let row: Vec<Tate> = (0..r).map(|j| s.twist(j as i64)).collect();
        rows.push(row);
    }
    Ok(rows)
}

/// The companion matrix Φ_z of the difference equation τ(F^T) = Φ_z F^T.
pub fn phi_matrix(module: &DrinfeldModule, n: usize) -> Result<TateMat> {
    let q = module.q();
    let r = module.rank();
    let prec = module.precision();
    let delta_inv = module.delta().inv(prec)?;
    let mut rows: Vec<Vec<Tate>> = Vec::with_capacity(r);
    for i in 0..r - 1 {
        let row: Vec<Tate> = (0..r)
            .map(|j| {
                if j == i + 1 {
                    Tate::from_scalar(&CInfty::one(q), n)
                } else {
                    Tate::zero(q, n)
                }
            })
            .collect();
        rows.push(row);
    }
    let mut last: Vec<Tate> = Vec::with_capacity(r);
    last.push(Tate::t_minus(&CInfty::theta(q), n).scalar_mul(&delta_inv));
    for i in 1..r {
        last.push(Tate::from_scalar(
            &module.g(i).neg().mul(&delta_inv),
            n,
        ));
    }
    rows.push(last);
    Ok(rows)
}

/// Residual of the difference equation τ(F^T) - Φ_z F^T (each entry
/// should be zero to its precision).
pub fn difference_equation_residual(module: &DrinfeldModule, n: usize) -> Result<TateMat> {
    let f = build_f(module, n)?;
    let ft = mat_transpose(&f);
    let lhs = mat_twist(&ft, 1);
    let rhs = mat_mul(&phi_matrix(module, n)?, &ft);
    let r = module.rank();
    Ok((0..r)
        .map(|i| (0..r).map(|j| lhs[i][j].sub(&rhs[i][j])).collect())
        .collect())
}

/// ψ_φ applied to a t-series: Δ_r g^((r)) + ... + g_1 g^((1)) - (t-θ)g.
pub fn apply_psi(module: &DrinfeldModule, g: &Tate) -> Tate {
    let q = module.q();
    let n = g.order();
    let mut acc = Tate::t_minus(&CInfty::theta(q), n).mul(g).neg();
    for i in 1..=module.rank() {
        acc = acc.add(&g.twist(i as i64).scalar_mul(module.g(i)));
    }
    acc
}

/// The Anderson–Thakur function ω(t) = β Π_{i>=0} (1 - t/θ^(q^i))^(-1).
pub fn omega_function(q: u32, n: usize, prec: i64) -> Result<Tate> {
    omega_function_with_beta(q, n, prec, &canonical_beta(q))
}

/// ω with an explicit branch of (-θ)^(1/(q-1)); the mutation suite feeds
/// a flipped branch through here to demonstrate test sensitivity.
pub fn omega_function_with_beta(q: u32, n: usize, prec: i64, beta: &CInfty) -> Result<Tate> {
    let mut acc = Tate::from_scalar(beta, n);
    let mut i = 0u32;
    loop {
        let qi = (q as i64).checked_pow(i).ok_or_else(|| {
            Error::precision("ω factor exponent overflow")
        })?;
        if qi > prec + 8 {
            break;
        }
        // (1 - t/θ^(q^i))^(-1) = θ^(q^i)·kernel(i)
        let factor = geometric_kernel(q, i, n).scalar_mul(&CInfty::theta_pow(q, qi, 1));
        acc = acc.mul(&factor);
        i += 1;
    }
    // dropped factors perturb every coefficient by ‖ω‖·q^(-q^i)
    let gauss = acc.gauss_norm();
    Ok(acc.with_coeff_error(gauss.mul(NormBound::Le(-exp_int(prec)))))
}

/// Report data for an identity of truncated t-series.
#[derive(Debug, Clone)]
pub struct SeriesResidual {
    /// first coefficient index with a known nonzero residual digit
    pub first_bad: Option<usize>,
    /// valuation bound of the residual (max over coefficients)
    pub residual_bound: NormBound,
    /// combined certified error level of the comparison
    pub certified: NormBound,
    pub pass: bool,
}

pub fn series_residual(lhs: &Tate, rhs: &Tate) -> SeriesResidual {
    let d = lhs.sub(rhs);
    let mut first_bad = None;
    let mut bound = NormBound::NegInf;
    let mut certified = NormBound::NegInf;
    for i in 0..d.order() {
        let c = d.coeff(i);
        if !c.window_empty() && first_bad.is_none() {
            first_bad = Some(i);
        }
        bound = bound.max(c.norm_bound());
        certified = certified.max(c.err_bound());
    }
    SeriesResidual {
        first_bad,
        residual_bound: bound,
        certified,
        pass: first_bad.is_none(),
    }
}

/// Checks det F(z,t)·π̃^((q^r-1)/(q-1))·h_r(z) = ω(t) coefficientwise.
pub fn verify_det_identity(
    module: &DrinfeldModule,
    h_r: &CInfty,
    n: usize,
) -> Result<SeriesResidual> {
    let omega = omega_function(module.q(), n, module.precision())?;
    verify_det_identity_against(module, h_r, &omega)
}

pub fn verify_det_identity_against(
    module: &DrinfeldModule,
    h_r: &CInfty,
    omega: &Tate,
) -> Result<SeriesResidual> {
    let q = module.q();
    let r = module.rank();
    let n = omega.order();
    let prec = module.precision();
    let f = build_f(module, n)?;
    let det = crate::tate::mat_det(&f);
    let pi = carlitz_pi(q, prec)?;
    let s: i64 = (0..r).map(|i| (q as i64).pow(i as u32)).sum();
    let scalar = pi.pow(s, prec)?.mul(h_r);
    let lhs = det.scalar_mul(&scalar);
    Ok(series_residual(&lhs, omega))
}

/// The residue form: Res_{t=θ} det F = Σ_i (-w_i)·C_i1(θ) must equal
/// -π̃^(-(q+...+q^(r-1))) h_r^(-1). Evaluated through the sharpened
/// (t-θ)s_i envelopes and the twisted minors, which are regular at θ.
pub fn verify_det_residue(module: &DrinfeldModule, h_r: &CInfty, n: usize) -> Result<CInfty> {
    let q = module.q();
    let r = module.rank();
    let prec = module.precision();
    let theta = CInfty::theta(q);
    let f = build_f(module, n)?;
    let mut res = CInfty::zero(q);
    for (i, w) in module.generators().iter().enumerate() {
        let rs = agf_residue_series(module, w, n)?;
        let rs_at = rs.eval_at(&theta)?;
        let c_i1 = crate::tate::mat_cofactor(&f, i, 0).eval_at(&theta)?;
        res = res.add(&rs_at.mul(&c_i1));
    }
    let pi = carlitz_pi(q, prec)?;
    let s: i64 = (1..r).map(|i| (q as i64).pow(i as u32)).sum();
    let expect = pi.pow(s, prec)?.mul(h_r).inv(prec)?.neg();
    Ok(res.sub(&expect))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cinfty::PrecisionBudget;
    use crate::lattice::OmegaPoint;
    use crate::norm::exp_frac;
    use crate::poly::PolyA;
    use crate::tate::mat_cofactor;

    fn module23() -> DrinfeldModule {
        let z = OmegaPoint::canonical_cm(2, 3);
        DrinfeldModule::from_point(&z, &PrecisionBudget::default_for(2, 3)).unwrap()
    }

    fn module32() -> DrinfeldModule {
        let z = OmegaPoint::canonical_cm(3, 2);
        DrinfeldModule::from_point(&z, &PrecisionBudget::default_for(3, 2)).unwrap()
    }

    #[test]
    fn agf_basics() {
        let m = module32();
        let n = 10;
        // s(0;t) = 0
        let s0 = agf(&m, &CInfty::zero(3), n).unwrap();
        assert!(s0.window_empty());
        // t^0 coefficient = exp(w/θ)
        let w = m.generators()[0].clone();
        let s = agf(&m, &w, n).unwrap();
        let e = m
            .eval_exp(&w.mul(&CInfty::theta_pow(3, -1, 1)))
            .unwrap();
        assert!(s.coeff(0).sub(&e).window_empty());
        // both routes agree coefficientwise
        let s_def = agf_by_definition(&m, &w, n).unwrap();
        assert!(series_residual(&s, &s_def).pass);
    }

    #[test]
    fn agf_linearity_on_lattice() {
        // s(a·w; t) = a(t)·s(w; t) for lattice w
        let m = module32();
        let n = 8;
        let w = m.generators()[0].clone();
        let a = PolyA::theta(3);
        let lhs = agf(&m, &a.eval_theta().mul(&w), n).unwrap();
        let rhs = agf(&m, &w, n)
            .unwrap()
            .mul(&Tate::from_t_poly(&a.substitute_t(), n));
        assert!(series_residual(&lhs, &rhs).pass);
    }

    #[test]
    fn psi_annihilates_lattice_agfs() {
        for m in [module32(), module23()] {
            let n = 8;
            for w in m.generators() {
                let s = agf(&m, &w, n).unwrap();
                let psi = apply_psi(&m, &s);
                assert!(
                    psi.window_empty(),
                    "ψ_φ(s) nonzero for generator {:?}",
                    w
                );
            }
        }
    }

    #[test]
    fn difference_equation() {
        for m in [module32(), module23()] {
            let resid = difference_equation_residual(&m, 8).unwrap();
            for row in &resid {
                for entry in row {
                    assert!(entry.window_empty(), "difference equation residual");
                }
            }
        }
    }

    #[test]
    fn omega_shape_and_twist_identity() {
        for q in [2u32, 3] {
            let n = 12;
            let om = omega_function(q, n, 60).unwrap();
            // t^0 coefficient is β
            assert!(om.coeff(0).sub(&canonical_beta(q)).window_empty());
            // ω^(1) = (t-θ)·ω
            let lhs = om.twist(1);
            let rhs = Tate::t_minus(&CInfty::theta(q), n).mul(&om);
            assert!(series_residual(&lhs, &rhs).pass, "q={q}");
            // ω^(1)(θ) = -π̃
            let at_theta = om.twist(1).eval_at(&CInfty::theta(q)).unwrap();
            let pi = carlitz_pi(q, 60).unwrap();
            assert!(
                at_theta.add(&pi).window_empty(),
                "q={q}: ω^(1)(θ) = {:?}, -π̃ = {:?}",
                at_theta,
                pi.neg()
            );
        }
    }

    #[test]
    fn omega_is_carlitz_agf_at_pi() {
        // ω(t) = s_C(π̃; t) coefficientwise, and the residue of ω at θ
        // recovers -π̃ through the sharpened (t-θ)s envelope
        for q in [2u32, 3] {
            let n = 10;
            let c = DrinfeldModule::carlitz(q, 70).unwrap();
            let pi = carlitz_pi(q, 70).unwrap();
            let om = omega_function(q, n, 70).unwrap();
            let s = agf(&c, &pi, n).unwrap();
            assert!(series_residual(&om, &s).pass, "q={q}: ω vs s_C(π̃)");
            let res = agf_residue_series(&c, &pi, n).unwrap();
            let at_theta = res.eval_at(&CInfty::theta(q)).unwrap();
            assert!(
                at_theta.add(&pi).window_empty(),
                "q={q}: Res ω = {:?}",
                at_theta
            );
        }
    }

    #[test]
    fn agf_residues_at_theta() {
        // Res_{t=θ} s_i = -z_i: (t-θ)s_i at θ equals -z_i
        let m = module32();
        for w in m.generators() {
            let res = agf_residue_series(&m, &w, 14).unwrap();
            let at_theta = res.eval_at(&CInfty::theta(3)).unwrap();
            assert!(
                at_theta.add(&w).window_empty(),
                "residue at θ: {:?} vs {:?}",
                at_theta,
                w.neg()
            );
        }
    }

    #[test]
    fn omega_matrix_from_negative_twists() {
        // Ω_{zA} = F^(-(r-1))·V with V the antidiagonal
        let m = module23();
        let n = 6;
        let f = build_f(&m, n).unwrap();
        let r = m.rank();
        let fm = mat_twist(&f, -(r as i64 - 1));
        // (F^(-(r-1)) V)[i][k] = F^(...)[i][r-1-k]
        for i in 0..r {
            for k in 0..r {
                let lhs = &fm[i][r - 1 - k];
                let s_i = agf(&m, &m.generators()[i], n).unwrap();
                let rhs = s_i.twist(-(k as i64));
                assert!(
                    series_residual(lhs, &rhs).pass,
                    "Ω entry ({i},{k})"
                );
            }
        }
    }

    #[test]
    fn quasi_periods_from_twisted_agf_at_theta() {
        // F_{δ_i}(w) = s^((i))(w;t) at t = θ
        for m in [module32(), module23()] {
            let w = m.generators()[0].clone();
            for i in 1..m.rank() {
                let s = agf(&m, &w, 16).unwrap();
                let tw = s.twist(i as i64);
                let at_theta = tw.eval_at(&CInfty::theta(m.q())).unwrap();
                let qp = m.quasi_period(i, &w).unwrap();
                assert!(
                    at_theta.sub(&qp).window_empty(),
                    "rank {} i={i}: {:?} vs {:?}",
                    m.rank(),
                    at_theta,
                    qp
                );
            }
        }
    }

    #[test]
    fn det_f_leading_norm() {
        // |det F| at t^0 agrees with q^(-s·q/(q-1)) |h|^(-1) |β| via the
        // determinant identity; here just check det F is a unit series
        // with the expected valuation from the cofactor expansion
        let m = module32();
        let f = build_f(&m, 10).unwrap();
        let det = crate::tate::mat_det(&f);
        assert!(det.coeff(0).val().is_some(), "det F has unit constant term");
        // cofactors appear in later identities; smoke-test one
        let c11 = mat_cofactor(&f, 0, 0);
        assert!(c11.coeff(0).val().is_some());
        let _ = exp_frac(1, 2);
    }
}
