//! Maximum-weight shift-disjoint subsets: the quantities `ψ_i` and `ψ_{i,j}`.
//!
//! For a weight vector over `Z_N` and a shift `k`, the goal is the heaviest
//! `A ⊆ Z_N` with `(A + k mod N) ∩ A = ∅`. The permutation `a ↦ a + k`
//! splits `Z_N` into `gcd(N,k)` cycles of length `N/gcd(N,k) ≥ 2`, and the
//! constraint is exactly independence in each cycle graph, so each cycle is
//! solved by the standard two-pass path DP (first vertex excluded / first
//! vertex included).
//!
//! `ψ_{i,j}` maximizes over all shifts `k ∈ [1, N)` with `N = ∏_{s=i..j} α_s`
//! and cell weights `∏ μ_s(d_s)`; addition is mod `N`, i.e. a carry out of
//! the top coordinate is ignored. `ψ_i = ψ_{i,i}`. Shift `k = 0` is excluded
//! throughout: it would force `A = ∅`.
//!
//! Ties are broken deterministically: smallest shift first, then the witness
//! minimizing its sorted element list lexicographically.

use crate::measure::MeasureFamily;
use crate::{Error, Limits, Rational, Result};
use num_traits::Zero;
use std::collections::BTreeSet;

/// A fixed-shift instance: weights over `Z_N` in mixed-radix order and a
/// shift `k ∈ [1, N)`.
#[derive(Debug, Clone)]
pub struct ShiftProblem {
    pub weights: Vec<Rational>,
    pub shift: u64,
}

/// Optimal set for one shift.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShiftOutcome {
    pub value: Rational,
    pub witness: BTreeSet<u64>,
}

/// Optimum over shifts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PsiOutcome {
    pub value: Rational,
    pub shift: u64,
    pub witness: BTreeSet<u64>,
}

impl ShiftProblem {
    fn n(&self) -> u64 {
        self.weights.len() as u64
    }
}

/// Max-weight subset of `Z_N` disjoint from its own `k`-shift, with the
/// lexicographically smallest witness among maximizers.
pub fn best_for_shift(problem: &ShiftProblem) -> Result<ShiftOutcome> {
    let n = problem.n();
    if problem.shift == 0 || problem.shift >= n {
        return Err(Error::InvalidShift {
            shift: problem.shift,
            size: n,
        });
    }
    let mut value = Rational::zero();
    let mut witness = BTreeSet::new();
    for cycle in shift_cycles(n, problem.shift) {
        let weights: Vec<Rational> = cycle
            .iter()
            .map(|&v| problem.weights[v as usize].clone())
            .collect();
        let (cycle_value, chosen) = cycle_mwis_lexmin(&cycle, &weights);
        value += cycle_value;
        witness.extend(chosen);
    }
    Ok(ShiftOutcome { value, witness })
}

/// Value-only variant used inside shift scans.
fn best_value_for_shift(weights: &[Rational], shift: u64) -> Rational {
    let n = weights.len() as u64;
    let mut value = Rational::zero();
    for cycle in shift_cycles(n, shift) {
        let ws: Vec<Rational> = cycle.iter().map(|&v| weights[v as usize].clone()).collect();
        value += cycle_mwis_value(&ws);
    }
    value
}

fn shift_cycles(n: u64, k: u64) -> Vec<Vec<u64>> {
    let g = gcd(n, k);
    let len = n / g;
    (0..g)
        .map(|start| {
            let mut cycle = Vec::with_capacity(len as usize);
            let mut v = start;
            for _ in 0..len {
                cycle.push(v);
                v = (v + k) % n;
            }
            cycle
        })
        .collect()
}

fn gcd(a: u64, b: u64) -> u64 {
    num_integer::gcd(a, b)
}

/// Path MWIS with optional forced decisions; `None` when the forces are
/// contradictory (adjacent forced-in vertices).
fn path_mwis(weights: &[Rational], forced: &[Option<bool>]) -> Option<Rational> {
    // (best with current vertex excluded, best with current vertex included)
    let mut excluded = Some(Rational::zero());
    let mut included: Option<Rational> = None;
    for (w, f) in weights.iter().zip(forced) {
        let take = match (excluded.as_ref(), *f) {
            (_, Some(false)) => None,
            (Some(e), _) => Some(e + w),
            (None, _) => None,
        };
        let skip = match *f {
            Some(true) => None,
            _ => match (excluded, included) {
                (Some(e), Some(i)) => Some(e.max(i)),
                (Some(e), None) => Some(e),
                (None, Some(i)) => Some(i),
                (None, None) => None,
            },
        };
        excluded = skip;
        included = take;
    }
    match (excluded, included) {
        (Some(e), Some(i)) => Some(e.max(i)),
        (Some(e), None) => Some(e),
        (None, Some(i)) => Some(i),
        (None, None) => None,
    }
}

/// Cycle MWIS value with optional forced decisions, splitting on the first
/// vertex.
fn cycle_mwis_forced(weights: &[Rational], forced: &[Option<bool>]) -> Option<Rational> {
    let len = weights.len();
    debug_assert!(len >= 2);
    // Case 1: first vertex excluded.
    let mut best: Option<Rational> = None;
    if forced[0] != Some(true) {
        best = path_mwis(&weights[1..], &forced[1..]);
    }
    // Case 2: first vertex included; neighbours 1 and len−1 must be out.
    if forced[0] != Some(false)
        && forced[1] != Some(true)
        && (len == 2 || forced[len - 1] != Some(true))
    {
        let inner = if len <= 3 {
            Some(Rational::zero())
        } else {
            path_mwis(&weights[2..len - 1], &forced[2..len - 1])
        };
        if let Some(v) = inner {
            let candidate = v + &weights[0];
            best = Some(match best {
                Some(b) => b.max(candidate),
                None => candidate,
            });
        }
    }
    best
}

fn cycle_mwis_value(weights: &[Rational]) -> Rational {
    let forced = vec![None; weights.len()];
    cycle_mwis_forced(weights, &forced).expect("unforced cycle always feasible")
}

/// Lexicographically smallest maximizer of a cycle, by ascending vertex
/// value: greedily keep a vertex iff some maximizer contains it and every
/// decision made so far.
fn cycle_mwis_lexmin(vertices: &[u64], weights: &[Rational]) -> (Rational, Vec<u64>) {
    let len = vertices.len();
    let total = cycle_mwis_value(weights);
    let mut forced: Vec<Option<bool>> = vec![None; len];
    let mut order: Vec<usize> = (0..len).collect();
    order.sort_by_key(|&p| vertices[p]);
    let mut chosen = Vec::new();
    for p in order {
        forced[p] = Some(true);
        match cycle_mwis_forced(weights, &forced) {
            Some(v) if v == total => chosen.push(vertices[p]),
            _ => forced[p] = Some(false),
        }
    }
    chosen.sort_unstable();
    (total, chosen)
}

/// Cell weights `∏_{s=i..j} μ_s(d_s)` over the range, mixed-radix order
/// (coordinate `i` least significant).
pub fn range_weights(family: &MeasureFamily, i: usize, j: usize, cap: u64) -> Result<Vec<Rational>> {
    assert!(i <= j);
    let mut size: u128 = 1;
    for s in i..=j {
        size *= family.base().alpha(s) as u128;
        if size > cap as u128 {
            return Err(Error::SizeLimit {
                needed: size.to_string(),
                cap,
            });
        }
    }
    let mut weights = vec![Rational::from_integer(1.into())];
    for s in i..=j {
        let m = family.coordinate(s);
        let masses = m.masses()?;
        let mut next = Vec::with_capacity(weights.len() * masses.len());
        for mass in &masses {
            for w in &weights {
                next.push(w * mass);
            }
        }
        weights = next;
    }
    Ok(weights)
}

fn scan_shifts(weights: &[Rational], candidates: impl Iterator<Item = u64>) -> Option<PsiOutcome> {
    let mut best: Option<(Rational, u64)> = None;
    for k in candidates {
        let value = best_value_for_shift(weights, k);
        let better = match &best {
            None => true,
            Some((b, _)) => value > *b,
        };
        if better {
            best = Some((value, k));
        }
    }
    let (value, shift) = best?;
    let outcome = best_for_shift(&ShiftProblem {
        weights: weights.to_vec(),
        shift,
    })
    .expect("chosen shift is valid");
    debug_assert_eq!(outcome.value, value);
    Some(PsiOutcome {
        value,
        shift,
        witness: outcome.witness,
    })
}

/// `ψ_i`: optimum over shifts `k ∈ [1, α_i)` on a single coordinate.
pub fn psi_single(family: &MeasureFamily, i: usize, limits: &Limits) -> Result<PsiOutcome> {
    psi_range(family, i, i, None, limits)
}

/// `ψ_{i,j}`: optimum over shifts `k ∈ [1, N)` on the coordinate range, or
/// over an explicit shift candidate list. Without a candidate list the cell
/// count is capped by `limits.size_cap`.
pub fn psi_range(
    family: &MeasureFamily,
    i: usize,
    j: usize,
    shift_candidates: Option<&[u64]>,
    limits: &Limits,
) -> Result<PsiOutcome> {
    if i > j {
        return Err(Error::InvalidWindowSet(format!(
            "coordinate range [{i}..{j}] is reversed"
        )));
    }
    let cap = match shift_candidates {
        Some(_) => u64::MAX,
        None => limits.size_cap,
    };
    let weights = range_weights(family, i, j, cap)?;
    let n = weights.len() as u64;
    let outcome = match shift_candidates {
        Some(ks) => {
            if let Some(&bad) = ks.iter().find(|&&k| k == 0 || k >= n) {
                return Err(Error::InvalidShift { shift: bad, size: n });
            }
            scan_shifts(&weights, ks.iter().copied())
        }
        None => scan_shifts(&weights, 1..n),
    };
    outcome.ok_or(Error::InvalidShift { shift: 0, size: n })
}

/// Exhaustive oracle: every subset of `Z_N` against every shift; `N ≤ 16`.
pub fn brute_force_psi(family: &MeasureFamily, i: usize, j: usize) -> Result<PsiOutcome> {
    let weights = range_weights(family, i, j, 16)?;
    brute_force_over_weights(&weights)
}

/// Exhaustive optimum for explicit weights; the testing oracle for the DP.
pub fn brute_force_over_weights(weights: &[Rational]) -> Result<PsiOutcome> {
    let n = weights.len() as u64;
    if n > 16 {
        return Err(Error::SizeLimit {
            needed: n.to_string(),
            cap: 16,
        });
    }
    let mut best: Option<PsiOutcome> = None;
    for k in 1..n {
        for mask in 0u32..(1u32 << n) {
            let subset: Vec<u64> = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
            let shifted_disjoint = subset
                .iter()
                .all(|&v| mask >> ((v + k) % n) & 1 == 0);
            if !shifted_disjoint {
                continue;
            }
            let value: Rational = subset.iter().map(|&v| weights[v as usize].clone()).sum();
            let witness: BTreeSet<u64> = subset.into_iter().collect();
            let replace = match &best {
                None => true,
                Some(b) => {
                    value > b.value
                        || (value == b.value
                            && (k < b.shift
                                || (k == b.shift && lex_smaller(&witness, &b.witness))))
                }
            };
            if replace {
                best = Some(PsiOutcome {
                    value,
                    shift: k,
                    witness,
                });
            }
        }
    }
    best.ok_or(Error::InvalidShift { shift: 0, size: n })
}

fn lex_smaller(a: &BTreeSet<u64>, b: &BTreeSet<u64>) -> bool {
    a.iter().lt(b.iter())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::BaseSeq;
    use crate::{rational_ratio, Natural};
    use proptest::prelude::*;

    fn uniform_weights(n: usize) -> Vec<Rational> {
        vec![rational_ratio(1, n as i64); n]
    }

    #[test]
    fn two_cycle_forces_one_vertex() {
        let p = ShiftProblem {
            weights: uniform_weights(2),
            shift: 1,
        };
        let out = best_for_shift(&p).unwrap();
        assert_eq!(out.value, rational_ratio(1, 2));
        assert_eq!(out.witness, BTreeSet::from([0]));
    }

    #[test]
    fn weighted_four_cycle() {
        let p = ShiftProblem {
            weights: vec![
                rational_ratio(7, 10),
                rational_ratio(1, 10),
                rational_ratio(1, 10),
                rational_ratio(1, 10),
            ],
            shift: 2,
        };
        let out = best_for_shift(&p).unwrap();
        assert_eq!(out.value, rational_ratio(8, 10));
        assert_eq!(out.witness, BTreeSet::from([0, 1]));
    }

    #[test]
    fn six_cycle_uniform_shift_two() {
        let p = ShiftProblem {
            weights: uniform_weights(6),
            shift: 2,
        };
        let out = best_for_shift(&p).unwrap();
        assert_eq!(out.value, rational_ratio(1, 3));
        // Two 3-cycles {0,2,4} and {1,3,5}: one vertex each, smallest wins.
        assert_eq!(out.witness, BTreeSet::from([0, 1]));
    }

    #[test]
    fn invalid_shifts_rejected() {
        let p = ShiftProblem {
            weights: uniform_weights(4),
            shift: 0,
        };
        assert!(matches!(
            best_for_shift(&p),
            Err(Error::InvalidShift { .. })
        ));
        let p = ShiftProblem {
            weights: uniform_weights(4),
            shift: 4,
        };
        assert!(best_for_shift(&p).is_err());
    }

    #[test]
    fn psi_single_uniform_two() {
        let f = MeasureFamily::uniform(BaseSeq::constant(2).unwrap());
        let out = psi_single(&f, 0, &Limits::default()).unwrap();
        assert_eq!(out.value, rational_ratio(1, 2));
        assert_eq!(out.shift, 1);
        assert_eq!(out.witness, BTreeSet::from([0]));
    }

    #[test]
    fn psi_single_tie_breaks_on_smallest_shift() {
        // Weights (7/10,1/10,1/10,1/10): shifts 1 and 2 both reach 8/10.
        let f = MeasureFamily::custom(
            BaseSeq::constant(4).unwrap(),
            vec![vec![
                rational_ratio(7, 10),
                rational_ratio(1, 10),
                rational_ratio(1, 10),
                rational_ratio(1, 10),
            ]],
            vec![],
        )
        .unwrap();
        let out = psi_single(&f, 0, &Limits::default()).unwrap();
        assert_eq!(out.value, rational_ratio(8, 10));
        assert_eq!(out.shift, 1);
        assert_eq!(out.witness, BTreeSet::from([0, 2]));
    }

    #[test]
    fn psi_thm37_heavy_pair() {
        // Coordinate 2 of thm37 (m = 5): ψ = 1 − 1/5 at shift 2, witness {0,1}.
        let f = MeasureFamily::thm37(BaseSeq::constant(4).unwrap()).unwrap();
        let out = psi_single(&f, 2, &Limits::default()).unwrap();
        assert_eq!(out.value, rational_ratio(4, 5));
        assert_eq!(out.shift, 2);
        assert_eq!(out.witness, BTreeSet::from([0, 1]));
        // The pair {0,1} under +2 certifies ψ_n ≥ 1 − 1/m_n for every n.
        for n in 0..8 {
            let out = psi_single(&f, n, &Limits::default()).unwrap();
            let m = rational_ratio(1, (1i64 << n) + 1);
            assert!(out.value >= Rational::from_integer(1.into()) - m);
        }
    }

    #[test]
    fn psi_range_uniform_pair() {
        let f = MeasureFamily::uniform(BaseSeq::constant(2).unwrap());
        let out = psi_range(&f, 0, 1, None, &Limits::default()).unwrap();
        assert_eq!(out.value, rational_ratio(1, 2));
        assert_eq!(out.shift, 1);
        assert_eq!(out.witness, BTreeSet::from([0, 2]));
    }

    #[test]
    fn psi_range_single_equals_psi_single() {
        let f = MeasureFamily::thm32(BaseSeq::constant(3).unwrap());
        for i in 0..4 {
            let a = psi_single(&f, i, &Limits::default()).unwrap();
            let b = psi_range(&f, i, i, None, &Limits::default()).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn psi_respects_size_cap() {
        let f = MeasureFamily::uniform(BaseSeq::constant(2).unwrap());
        let tight = Limits {
            size_cap: 8,
            ..Limits::default()
        };
        assert!(matches!(
            psi_range(&f, 0, 5, None, &tight),
            Err(Error::SizeLimit { .. })
        ));
        // An explicit candidate list bypasses the scan cap.
        let out = psi_range(&f, 0, 5, Some(&[32]), &tight).unwrap();
        assert_eq!(out.value, rational_ratio(1, 2));
    }

    #[test]
    fn psi_eta_lower_bound() {
        // 0 < η_i ≤ ψ_i: a single heaviest digit is disjoint from any shift
        // of itself.
        let families = [
            MeasureFamily::thm32(BaseSeq::constant(2).unwrap()),
            MeasureFamily::thm37(BaseSeq::constant(4).unwrap()).unwrap(),
            MeasureFamily::ex33(BaseSeq::power_of_two(2).unwrap()).unwrap(),
        ];
        for f in &families {
            for i in 0..5 {
                if f.base().alpha(i) > Limits::default().size_cap {
                    continue;
                }
                let psi = psi_single(f, i, &Limits::default()).unwrap();
                assert!(psi.value >= f.eta_delta(i).0, "{} at {i}", f.kind_name());
            }
        }
    }

    #[test]
    fn psi_range_dominates_single_coordinates() {
        let f = MeasureFamily::thm37(BaseSeq::constant(4).unwrap()).unwrap();
        let pair = psi_range(&f, 1, 2, None, &Limits::default()).unwrap();
        for s in 1..=2 {
            let single = psi_single(&f, s, &Limits::default()).unwrap();
            assert!(pair.value >= single.value);
        }
    }

    #[test]
    fn fixed_shift_monotone_under_window_extension() {
        // For a shift supported on [0..j], extending the window can only help.
        let f = MeasureFamily::thm37(BaseSeq::constant(4).unwrap()).unwrap();
        let w2 = range_weights(&f, 0, 1, 1 << 14).unwrap();
        let w3 = range_weights(&f, 0, 2, 1 << 14).unwrap();
        for k in 1..16u64 {
            let narrow = best_value_for_shift(&w2, k);
            let wide = best_value_for_shift(&w3, k);
            assert!(wide >= narrow, "k = {k}");
        }
    }

    #[test]
    fn witness_is_valid_and_disjoint() {
        let f = MeasureFamily::thm36(BaseSeq::periodic(vec![], vec![2, 3]).unwrap()).unwrap();
        let out = psi_range(&f, 0, 2, None, &Limits::default()).unwrap();
        let n = 12u64;
        for &v in &out.witness {
            assert!(!out.witness.contains(&((v + out.shift) % n)));
        }
        let weights = range_weights(&f, 0, 2, 1 << 14).unwrap();
        let total: Rational = out.witness.iter().map(|&v| weights[v as usize].clone()).sum();
        assert_eq!(total, out.value);
    }

    #[test]
    fn window_obstruction_bound_from_two_heavy_digits() {
        // Two distinct digits a, b of mass ≥ 1/4 at coordinate l obstruct
        // near-full shift-disjoint sets at shift m = |a−b|·β_l: every window
        // value stays ≤ 1 − ε for ε < (1/16)·min{μ_l(a), μ_l(b)}.
        let f = MeasureFamily::thm37(BaseSeq::constant(4).unwrap()).unwrap();
        let eps = rational_ratio(1, 128);
        for l in 0..3usize {
            // |0 − 1| · β_l
            let m: u64 = f.base().beta(l).to_u64_digits().first().copied().unwrap();
            for window in l + 1..=l + 2 {
                let size = f.base().beta(window + 1);
                let weights = range_weights(&f, 0, window, 1 << 14).unwrap();
                assert!(Natural::from(m) < size);
                let value = best_value_for_shift(&weights, m);
                assert!(
                    value <= Rational::from_integer(1.into()) - eps.clone(),
                    "l={l} window={window}"
                );
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn dp_matches_brute_force(nums in proptest::collection::vec(1u32..9, 2..9)) {
            let total: u32 = nums.iter().sum();
            let weights: Vec<Rational> = nums
                .iter()
                .map(|&v| rational_ratio(v as i64, total as i64))
                .collect();
            let n = weights.len() as u64;
            let oracle = brute_force_over_weights(&weights).unwrap();
            let dp = scan_shifts(&weights, 1..n).unwrap();
            prop_assert_eq!(&dp.value, &oracle.value);
            prop_assert_eq!(dp.shift, oracle.shift);
            prop_assert_eq!(&dp.witness, &oracle.witness);
        }
    }
}
