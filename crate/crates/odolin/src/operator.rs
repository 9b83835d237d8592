//! Finite-window realization of `T_f` on window-measurable step functions.
//!
//! For `k < β(J+1)`, `f^k` acts on window cells as `+k mod β(J+1)`, so the
//! subspace of step functions measurable on the window `[0..J]` is invariant
//! under `T_f^k` and the operator restricted to it has `L^p` norm
//! `R^(1/p)` with
//!
//! `R = max over window cells w of μ(cell_{w−k})/μ(cell_w)`,
//!
//! a `p`-free rational. Everything here stays on `R`; the `1/p`-th root only
//! appears in decimal report rendering. The best Condition (*) constant on
//! the window is the dual minimum `c_J = min_w μ(cell_w)/μ(cell_{w−1})`,
//! computed by its own min-product traversal rather than as a reciprocal, so
//! the two routes check each other.

use crate::cylinder::{max_cell_ratio, min_cell_ratio, shifted_intersection_measure, WindowSet};
use crate::measure::MeasureFamily;
use crate::{Error, Limits, Natural, Rational, Result};
use num_traits::{One, Zero};

/// A validated operator query: window, exponent `p ≥ 1`, power `k < β(J+1)`.
#[derive(Debug, Clone)]
pub struct OperatorQuery {
    pub window: usize,
    pub p: Rational,
    pub k: Natural,
}

impl OperatorQuery {
    pub fn new(family: &MeasureFamily, window: usize, p: Rational, k: Natural) -> Result<Self> {
        if p < Rational::one() {
            return Err(Error::InvalidFamily(format!("exponent p = {p} must be ≥ 1")));
        }
        let beta = family.base().beta(window + 1);
        if k >= beta {
            return Err(Error::WindowTooSmall {
                window,
                needed: format!("k = {k} needs β(J+1) > k, have {beta}"),
            });
        }
        Ok(OperatorQuery { window, p, k })
    }
}

/// The rational `R` with `‖T_f^k‖ = R^(1/p)` on window step functions.
pub fn norm_ratio_tfk(family: &MeasureFamily, query: &OperatorQuery, limits: &Limits) -> Result<Rational> {
    max_cell_ratio(family, query.window, &query.k, limits)
}

/// Best Condition (*) constant for window sets:
/// `c_J = min_w μ(cell_w)/μ(cell_{w−1})`; non-increasing in `J`.
pub fn star_constant(family: &MeasureFamily, window: usize, limits: &Limits) -> Result<Rational> {
    min_cell_ratio(family, window, &Natural::one(), limits)
}

/// `‖T_f^k 1_S‖_p^p = μ(f^{−k}(S))` for `k = 0 .. k_max`, exact. The window
/// is widened as needed to cover both `S` and `k_max`.
pub fn indicator_orbit(
    family: &MeasureFamily,
    set: &WindowSet,
    k_max: u64,
    limits: &Limits,
) -> Result<Vec<Rational>> {
    let base = family.base();
    let window = set
        .last_constrained()
        .unwrap_or(0)
        .max(base.window_for(&Natural::from(k_max)));
    let beta = base.beta(window + 1);
    let full = WindowSet::full();
    let mut out = Vec::with_capacity(k_max as usize + 1);
    for k in 0..=k_max {
        // f^{−k} acts on the window as +(β − k) mod β.
        let m = (&beta - Natural::from(k)) % &beta;
        out.push(shifted_intersection_measure(family, set, &full, &m, limits)?);
    }
    Ok(out)
}

/// Decimal rendering of `R^(1/p)` for reports; approximate by construction.
pub fn approx_norm(r: &Rational, p: &Rational) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    // ln via bit lengths stays finite even when R overflows f64.
    let ln_num = ln_big(r.numer());
    let ln_den = ln_big(r.denom());
    let p_f = big_to_f64(p.numer()) / big_to_f64(p.denom());
    ((ln_num - ln_den) / p_f).exp()
}

fn ln_big(v: &num_bigint::BigInt) -> f64 {
    let (_, digits) = v.to_u64_digits();
    match digits.len() {
        0 => f64::NEG_INFINITY,
        1 => (digits[0] as f64).ln(),
        n => {
            let top = digits[n - 1] as f64 * 2f64.powi(64) + digits[n - 2] as f64;
            top.ln() + (n as f64 - 2.0) * 64.0 * 2f64.ln()
        }
    }
}

fn big_to_f64(v: &num_bigint::BigInt) -> f64 {
    use num_traits::ToPrimitive;
    v.to_f64().unwrap_or(f64::MAX)
}
