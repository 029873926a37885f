//! The numeric bounds attached to a pair (m, d).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Binomial coefficient, zero when `k > n`.
pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    u64::try_from(acc).expect("binomial overflows u64")
}

/// Number of monomials of degree `degree` in `m + 1` variables.
pub fn monomial_count(m: usize, degree: u32) -> usize {
    binomial(m as u64 + degree as u64, m as u64) as usize
}

/// Ambient dimension m of P^m, degree d and optionally the number of
/// summands t.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Params {
    pub m: usize,
    pub d: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<usize>,
}

impl Params {
    pub fn new(m: usize, d: u32, t: Option<usize>) -> Result<Self> {
        if m < 1 {
            return Err(Error::InvalidParams(format!("m must be >= 1, got {m}")));
        }
        if d < 1 {
            return Err(Error::InvalidParams(format!("d must be >= 1, got {d}")));
        }
        if let Some(t) = t {
            if t < 2 {
                return Err(Error::InvalidParams(format!("t must be >= 2, got {t}")));
            }
        }
        Ok(Self { m, d, t })
    }

    pub fn table(&self) -> ParameterTable {
        ParameterTable::new(self.m, self.d)
    }
}

/// N, alpha and beta for (m, d), plus the expected join dimensions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParameterTable {
    pub m: usize,
    pub d: u32,
    /// Projective dimension of the space of degree-d forms.
    pub n: u64,
    /// floor(C(m+d-1, m) / (m+1)): the double-point count bound for triple-point unions.
    pub alpha: u64,
    /// floor(C(m+d-2, m) / (m+1)): t ranges up to beta + 1.
    pub beta: u64,
}

impl ParameterTable {
    pub fn new(m: usize, d: u32) -> Self {
        let (mm, dd) = (m as u64, d as u64);
        let n = binomial(mm + dd, mm) - 1;
        let alpha = binomial(mm + dd - 1, mm) / (mm + 1);
        let beta = if dd >= 2 {
            binomial(mm + dd - 2, mm) / (mm + 1)
        } else {
            0
        };
        Self {
            m,
            d,
            n,
            alpha,
            beta,
        }
    }

    /// min{N, t(m+1) - 2}
    pub fn expected_dim_tau(&self, t: usize) -> u64 {
        self.n.min((t as u64 * (self.m as u64 + 1)).saturating_sub(2))
    }

    /// min{N, t(m+1) - 1}
    pub fn expected_dim_sigma(&self, t: usize) -> u64 {
        self.n.min((t as u64 * (self.m as u64 + 1)).saturating_sub(1))
    }
}

pub fn parameter_table(m: usize, d: u32) -> ParameterTable {
    ParameterTable::new(m, d)
}
