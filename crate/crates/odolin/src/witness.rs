//! Explicit witness sets certifying the transitivity/mixing criteria, verified
//! exactly.
//!
//! The criteria ask, for small ε, for sets `B` with `μ(complement) < ε` that
//! miss their own image: `f^k(B) ∩ B = ∅`. Three constructions produce them:
//!
//! * `mixing_witness` — when η pairs sit above `1 − ε` from some index on,
//!   fixing the two heaviest digits at positions `j, j+1` (with `j` the top
//!   nonzero digit of `k`) works for every large `k`.
//! * `ex33_witness` — for the sparse-set family: remove the (at most two)
//!   shift collisions from `D_l` and drop 0 from `D_{l+1}`.
//! * `transitive_witness` — a single block built from a ψ optimizer, shifted
//!   by the integer whose digits are the optimal shift.
//!
//! `nonmixing_probe` runs the reverse direction: two digits `a ≠ b` of mass
//! bounded below yield a shift `m = |a−b|·β_l` at which *no* window set of
//! measure `> 1 − ε` can avoid its image; the probe reports the exact
//! optimum per window and checks it stays ≤ 1 − ε.
//!
//! Every report is re-verified through the cylinder-set DP; nothing is
//! trusted from the construction.

use crate::base::BaseSeq;
use crate::cylinder::{disjoint_under, set_measure, WindowSet};
use crate::measure::{FamilyKind, MeasureFamily};
use crate::shift::{best_for_shift, psi_range, range_weights, ShiftProblem};
use crate::{Error, Limits, Natural, Rational, Result};
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::BTreeSet;

/// How a witness set was built.
#[derive(Debug, Clone)]
pub enum WitnessConstruction {
    /// Heaviest digits fixed at positions `j` and `j+1`.
    EtaPair {
        l: usize,
        k0: Natural,
        j: usize,
        fixed_digits: (u64, u64),
    },
    /// Sparse difference sets `E_l ⊆ D_l` and `F_{l+1} = D_{l+1} \ {0}`.
    SparseSets {
        l0: usize,
        k0: Natural,
        l: usize,
        j: u64,
        e_l: Vec<u64>,
        f_next: Vec<u64>,
    },
    /// Block over `[lo..hi]` from a ψ optimizer.
    BlockShift {
        lo: usize,
        hi: usize,
        shift: u64,
        psi_value: Rational,
    },
}

/// A constructed set together with its exact verification results.
#[derive(Debug, Clone)]
pub struct WitnessReport {
    pub k: Natural,
    pub set: WindowSet,
    pub set_measure: Rational,
    pub complement_measure: Rational,
    pub disjoint: bool,
    pub construction: WitnessConstruction,
}

impl WitnessReport {
    /// Both verified facts the criteria need.
    pub fn accepted(&self, eps: &Rational) -> bool {
        self.disjoint && self.complement_measure < *eps
    }
}

fn verify(
    family: &MeasureFamily,
    set: WindowSet,
    k: Natural,
    construction: WitnessConstruction,
    limits: &Limits,
) -> Result<WitnessReport> {
    let measure = set_measure(family, &set);
    let disjoint = disjoint_under(family, &set, &k, limits)?;
    Ok(WitnessReport {
        k,
        complement_measure: Rational::one() - &measure,
        set_measure: measure,
        set,
        disjoint,
        construction,
    })
}

fn top_nonzero_digit(base: &BaseSeq, k: &Natural) -> Option<(usize, Vec<u64>)> {
    if k.is_zero() {
        return None;
    }
    let window = base.window_for(k);
    let digits = base.digits(k, window).expect("window chosen to fit");
    let top = digits.iter().rposition(|&d| d != 0)?;
    Some((top, digits))
}

/// Mixing witness for a single `k`: find `l` with `η_i η_{i+1} > 1 − ε` for
/// every `i ≥ l` up to the search horizon, require `k > k_0 = β(l+1)`, and
/// fix the heaviest digits at the top nonzero position of `k` and its
/// successor.
pub fn mixing_witness(
    family: &MeasureFamily,
    k: &Natural,
    eps: &Rational,
    search_horizon: usize,
    limits: &Limits,
) -> Result<WitnessReport> {
    if !eps.is_positive() {
        return Err(Error::EpsilonTooLarge {
            eps: eps.to_string(),
            bound: "ε must be positive".into(),
        });
    }
    let base = family.base();
    let Some((j, _)) = top_nonzero_digit(base, k) else {
        return Err(Error::KTooSmall {
            k: k.to_string(),
            bound: "must exceed k_0 ≥ 1".into(),
        });
    };
    let horizon = search_horizon.max(j + 1);
    let threshold = Rational::one() - eps;
    // Smallest l such that every pair product η_i η_{i+1}, l ≤ i ≤ horizon,
    // clears the threshold.
    let etas: Vec<Rational> = (0..=horizon + 1)
        .map(|i| family.eta_delta(i).0)
        .collect();
    let mut l = None;
    for start in (0..=horizon).rev() {
        if &etas[start] * &etas[start + 1] > threshold {
            l = Some(start);
        } else {
            break;
        }
    }
    let Some(l) = l else {
        return Err(Error::HorizonExhausted { horizon });
    };
    let k0 = base.beta(l + 1);
    if *k <= k0 {
        return Err(Error::KTooSmall {
            k: k.to_string(),
            bound: format!("> k_0 = {k0}"),
        });
    }
    // k > β(l+1) guarantees a nonzero digit at position ≥ l+1, so j ≥ l+1.
    debug_assert!(j > l);
    let a_j = family.coordinate(j).argmax_digit();
    let a_j1 = family.coordinate(j + 1).argmax_digit();
    let set = WindowSet::fixing(&[(j, a_j), (j + 1, a_j1)], base)?;
    verify(
        family,
        set,
        k.clone(),
        WitnessConstruction::EtaPair {
            l,
            k0,
            j,
            fixed_digits: (a_j, a_j1),
        },
        limits,
    )
}

/// `D_l = {2^t − 1 : 0 ≤ t ≤ l}`.
pub fn sparse_powers_set(l: usize) -> Vec<u64> {
    (0..=l as u32).map(|t| (1u64 << t) - 1).collect()
}

/// max over `1 ≤ j ≤ j_max` of `|(D_l + j) ∩ D_l|`, in plain integers.
pub fn dl_overlap_check(l: usize, j_max: u64) -> u64 {
    let d: BTreeSet<u64> = sparse_powers_set(l).into_iter().collect();
    (1..=j_max)
        .map(|j| d.iter().filter(|&&x| d.contains(&(x + j))).count() as u64)
        .max()
        .unwrap_or(0)
}

fn shifted_overlap(d: &[u64], j: u64) -> Vec<u64> {
    let set: BTreeSet<u64> = d.iter().copied().collect();
    d.iter()
        .filter_map(|&x| {
            let y = x + j;
            set.contains(&y).then_some(y)
        })
        .collect()
}

/// Witness for the sparse-set family, valid for every `k ≥ k_0(ε)`.
pub fn ex33_witness(
    family: &MeasureFamily,
    k: &Natural,
    eps: &Rational,
    limits: &Limits,
) -> Result<WitnessReport> {
    if !matches!(family.kind(), FamilyKind::Ex33) {
        return Err(Error::InvalidFamily(
            "this construction is specific to the ex33 family".into(),
        ));
    }
    if !eps.is_positive() || *eps >= Rational::one() {
        return Err(Error::EpsilonTooLarge {
            eps: eps.to_string(),
            bound: "ε must lie in (0, 1)".into(),
        });
    }
    let base = family.base();
    let threshold = Rational::one() - eps;
    // The product bound is increasing in l; find where it clears 1 − ε.
    let bound_at = |l: usize| -> Rational {
        let m_l = Rational::one()
            - Rational::new(1.into(), num_bigint::BigInt::one() << (l + 2));
        let m_l1 = Rational::one()
            - Rational::new(1.into(), num_bigint::BigInt::one() << (l + 3));
        let d_l = l as i64 + 1;
        let d_l1 = l as i64 + 2;
        m_l * m_l1
            * crate::rational_ratio(d_l - 2, d_l)
            * crate::rational_ratio(d_l1 - 1, d_l1)
    };
    const SEARCH_BOUND: usize = 512;
    let Some(l0) = (2..SEARCH_BOUND).find(|&l| bound_at(l) > threshold) else {
        return Err(Error::HorizonExhausted {
            horizon: SEARCH_BOUND,
        });
    };
    let k0 = base.beta(l0 + 1);
    if *k < k0 {
        return Err(Error::KTooSmall {
            k: k.to_string(),
            bound: format!("≥ k_0 = {k0}"),
        });
    }
    let (l, digits) = top_nonzero_digit(base, k).expect("k ≥ k_0 ≥ 1");
    let j = digits[l];
    let d_l = sparse_powers_set(l);
    // Drop the (at most one per shift) collision elements under +j and
    // +(j+1); when both shifts hit the same element only it is removed.
    let mut removed: BTreeSet<u64> = BTreeSet::new();
    removed.extend(shifted_overlap(&d_l, j));
    removed.extend(shifted_overlap(&d_l, j + 1));
    let e_l: Vec<u64> = d_l.iter().copied().filter(|d| !removed.contains(d)).collect();
    let f_next: Vec<u64> = sparse_powers_set(l + 1)
        .into_iter()
        .filter(|&d| d != 0)
        .collect();
    let set = WindowSet::boxed(
        vec![
            (l, e_l.iter().copied().collect()),
            (l + 1, f_next.iter().copied().collect()),
        ],
        base,
    )?;
    verify(
        family,
        set,
        k.clone(),
        WitnessConstruction::SparseSets {
            l0,
            k0,
            l,
            j,
            e_l,
            f_next,
        },
        limits,
    )
}

/// Search windows `[i..j]` for `ψ_{i,j} > 1 − ε` and build the block witness
/// with `k` supported on the window. Single coordinates are tried before
/// wider ranges at each right endpoint.
pub fn transitive_witness(
    family: &MeasureFamily,
    eps: &Rational,
    window_budget: usize,
    limits: &Limits,
) -> Result<WitnessReport> {
    let base = family.base();
    let threshold = Rational::one() - eps;
    for j in 0..=window_budget {
        for i in (0..=j).rev() {
            let mut size: u128 = 1;
            let mut fits = true;
            for s in i..=j {
                match base.alpha_checked(s) {
                    Some(a) => size = size.saturating_mul(a as u128),
                    None => {
                        fits = false;
                        break;
                    }
                }
                if size > limits.size_cap as u128 {
                    fits = false;
                    break;
                }
            }
            if !fits {
                continue;
            }
            let psi = psi_range(family, i, j, None, limits)?;
            if psi.value <= threshold {
                continue;
            }
            let set = WindowSet::block(
                i,
                j - i + 1,
                psi.witness.iter().copied().collect(),
                base,
            )?;
            let k = Natural::from(psi.shift) * base.beta(i);
            return verify(
                family,
                set,
                k,
                WitnessConstruction::BlockShift {
                    lo: i,
                    hi: j,
                    shift: psi.shift,
                    psi_value: psi.value,
                },
                limits,
            );
        }
    }
    Err(Error::NotFound {
        budget: window_budget,
    })
}

/// Non-mixing probe report: the obstructing shift `m` and the exact optimum
/// of shift-disjoint window sets per window.
#[derive(Debug, Clone)]
pub struct ProbeReport {
    pub l: usize,
    pub digit_a: u64,
    pub digit_b: u64,
    pub m: Natural,
    pub eps: Rational,
    pub eps_bound: Rational,
    /// `(window J, max measure of a window set disjoint from its m-shift)`.
    pub window_maxima: Vec<(usize, Rational)>,
    /// Every reported maximum is ≤ 1 − ε.
    pub all_within: bool,
}

/// Probe the obstruction at coordinate `l`: take the two heaviest digits
/// `a, b`, require `ε < (1/16)·min{μ_l(a), μ_l(b)}`, and report the exact
/// fixed-shift optima at `m = |a−b|·β_l` over the windows
/// `J = l+1, …, l+window_budget`.
pub fn nonmixing_probe(
    family: &MeasureFamily,
    l: usize,
    eps: &Rational,
    window_budget: usize,
    limits: &Limits,
) -> Result<ProbeReport> {
    let coord = family.coordinate(l);
    let a = coord.argmax_digit();
    let b = coord
        .second_argmax_digit()
        .expect("α ≥ 2 always leaves a second digit");
    let bound = coord.mass(a).min(coord.mass(b)) / crate::rational_int(16);
    if *eps >= bound {
        return Err(Error::EpsilonTooLarge {
            eps: eps.to_string(),
            bound: bound.to_string(),
        });
    }
    let base = family.base();
    let gap = a.abs_diff(b);
    let m = Natural::from(gap) * base.beta(l);
    let mut window_maxima = Vec::new();
    let mut all_within = true;
    let threshold = Rational::one() - eps;
    for window in l + 1..=l + window_budget {
        let beta = base.beta(window + 1);
        let Some(cells) = beta.to_u64() else {
            break;
        };
        if cells > limits.size_cap {
            break;
        }
        let weights = range_weights(family, 0, window, limits.size_cap)?;
        let shift = m.to_u64().expect("m < β(window+1) ≤ cap");
        let outcome = best_for_shift(&ShiftProblem {
            weights,
            shift,
        })?;
        if outcome.value > threshold {
            all_within = false;
        }
        window_maxima.push((window, outcome.value));
    }
    Ok(ProbeReport {
        l,
        digit_a: a,
        digit_b: b,
        m,
        eps: eps.clone(),
        eps_bound: bound,
        window_maxima,
        all_within,
    })
}
