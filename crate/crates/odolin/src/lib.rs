//! Exact-arithmetic toolkit for the linear dynamics of composition operators
//! induced by odometers.
//!
//! An odometer is the "+1 with carry over to the right" map `f` on a product
//! `∏ A_i` of finite digit spaces `A_i = {0, …, α_i − 1}`. Equipping each
//! coordinate with a probability measure `μ_i` (all masses strictly positive)
//! yields a product measure `μ` and a composition operator
//! `T_f: φ ↦ φ ∘ f` on `L^p(μ)`. Whether `T_f` is topologically transitive or
//! mixing is governed by a handful of scalar sequences derived from the
//! masses:
//!
//! * `η_i` / `δ_i` — largest / smallest single-digit mass of `μ_i`,
//! * `λ_i(j) = μ_i(j)/μ_i(j−1)` with cyclic predecessor,
//! * `ρ_n = ∏_{i≤n} η_i/δ_i`,
//! * `ψ_i`, `ψ_{i,j}` — the largest measure of a digit set disjoint from some
//!   nonzero cyclic shift of itself,
//! * Condition (◇): positivity of `inf λ_l(j)·∏_{i<l} λ_i(0)`, which is
//!   equivalent to continuity of `T_f`.
//!
//! Everything here is computed in exact rational arithmetic: window sets,
//! their measures, images under `f^k` via a carry-state dynamic program,
//! maximum-weight shift-disjoint subsets via cycle decomposition, and the
//! explicit witness sets certifying the transitivity/mixing criteria. Floats
//! appear only in report rendering, never in a comparison.

pub mod base;
pub mod classify;
pub mod cylinder;
mod error;
pub mod measure;
pub mod operator;
pub mod shift;
pub mod witness;

pub use error::Error;

/// Exact rational scalar used throughout.
pub type Rational = num_rational::BigRational;
/// Unbounded non-negative integer (digit window products get huge fast).
pub type Natural = num_bigint::BigUint;

pub type Result<T> = std::result::Result<T, Error>;

/// Resource limits for the dynamic programs that materialize window cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Largest number of cells a shift-disjoint scan or a materialized
    /// window segment may have. Overridable via `ODOLIN_SIZE_CAP` in the CLI.
    pub size_cap: u64,
    /// Cells allowed for a single ψ entry inside evidence tables; entries
    /// over coordinates larger than this are omitted and flagged.
    pub psi_sample_cap: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            size_cap: 1 << 14,
            psi_sample_cap: 1 << 10,
        }
    }
}

pub(crate) fn rational_int(v: i64) -> Rational {
    Rational::from_integer(v.into())
}

pub(crate) fn rational_ratio(num: i64, den: i64) -> Rational {
    Rational::new(num.into(), den.into())
}
