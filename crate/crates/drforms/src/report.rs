//! Machine-readable verification reports: one record per identity, with
//! the residual and certified valuations as exact rationals (log_q
//! scale) and a pass flag. No floating point.

use serde::{Deserialize, Serialize};

use crate::cinfty::CInfty;
use crate::norm::{exp_to_i64_pair, NormBound};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct RatJson {
    pub num: i64,
    pub den: i64,
}

fn bound_to_json(b: NormBound) -> Option<RatJson> {
    b.exp().map(|e| {
        let (num, den) = exp_to_i64_pair(e);
        RatJson { num, den }
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Report {
    pub name: String,
    pub params: serde_json::Value,
    /// Upper bound on |lhs - rhs| as log_q (None: residual exactly 0).
    pub residual_valuation: Option<RatJson>,
    /// The certified error level of the comparison (None: exact).
    pub certified_valuation: Option<RatJson>,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Report {
    /// Report from a scalar residual value: passes when every known digit
    /// of the residual vanishes, i.e. |lhs - rhs| is below the combined
    /// certified error.
    pub fn from_value(name: &str, params: serde_json::Value, residual: &CInfty) -> Report {
        let pass = residual.window_empty();
        let certified = bound_to_json(residual.err_bound());
        let residual_valuation = bound_to_json(residual.norm_bound());
        let detail = if pass {
            None
        } else {
            residual.leading().map(|(v, c)| {
                let (n, d) = exp_to_i64_pair(v);
                format!("first nonzero residual digit {:?} at θ^({}/{})", c, n, d)
            })
        };
        Report {
            name: name.into(),
            params,
            residual_valuation,
            certified_valuation: certified,
            pass,
            detail,
        }
    }

    /// Report from a series residual (coefficientwise comparison).
    pub fn from_series(
        name: &str,
        params: serde_json::Value,
        resid: &crate::agf::SeriesResidual,
        certified: NormBound,
    ) -> Report {
        Report {
            name: name.into(),
            params,
            residual_valuation: bound_to_json(resid.residual_bound),
            certified_valuation: bound_to_json(certified),
            pass: resid.pass,
            detail: resid
                .first_bad
                .map(|i| format!("first disagreeing t-coefficient at index {i}")),
        }
    }

    pub fn expect(name: &str, params: serde_json::Value, pass: bool, detail: String) -> Report {
        Report {
            name: name.into(),
            params,
            residual_valuation: None,
            certified_valuation: None,
            pass,
            detail: Some(detail),
        }
    }
}

/// Residual/certified data for a full series comparison: the certified
/// level is the worst coefficient error floor of the difference.
pub fn series_certified(diff: &crate::tate::Tate) -> NormBound {
    let mut b = NormBound::NegInf;
    for i in 0..diff.order() {
        b = b.max(diff.coeff(i).err_bound());
    }
    b
}
