//! Per-coordinate probability measures and the scalar sequences that govern
//! the dynamics of `T_f`.
//!
//! Coordinate measures are stored structurally, not as flat vectors: every
//! built-in family puts one mass value on a small distinguished digit set and
//! another on the rest. That keeps `η_i`, `δ_i`, `λ_i(j)` minima and prefix
//! masses computable in `O(|special set|)` even when `α_i = 2^(i+2)` makes the
//! digit space astronomically large.
//!
//! Built-in families:
//!
//! * `uniform` — `μ_i(d) = 1/α_i`.
//! * `thm32` — `μ_n(0) = 1 − 1/m_n`, rest uniform, `m_n = 2^(n+1) + 1`;
//!   `η_n = 1 − 1/(2^(n+1)+1) → 1`. (The masses are the definition here; the
//!   exact η value follows from them.)
//! * `ex33`  — on `α_n = 2^(n+2)`: mass `1 − 1/m_n` spread uniformly over the
//!   sparse set `D_n = {2^t − 1 : t ≤ n}`, the rest uniform on the complement,
//!   `m_n = 2^(n+2)`; `η_n → 0` while the operator still mixes.
//! * `thm36` — requires a smallest infinitely-recurring digit size `t`;
//!   alternate occurrences of `t` get `μ_n(0) = 1 − 1/(k+3)`, every other
//!   coordinate stays uniform.
//! * `thm37` — requires `α_n ≥ 4`; digits 0 and 1 each carry
//!   `(1/2)(1 − 1/m_n)`, rest uniform, `m_n = 2^n + 1`.

use crate::base::BaseSeq;
use crate::{Error, Rational, Result};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

fn big_rat(num: BigInt, den: BigInt) -> Rational {
    Rational::new(num, den)
}

fn pow2(exp: usize) -> BigInt {
    BigInt::one() << exp
}

/// One coordinate's probability measure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CoordinateMeasure {
    /// Explicit mass vector; only used when α is small.
    Dense(Vec<Rational>),
    /// `special_mass` on the sorted digit set `special`, `other_mass` on the
    /// complement.
    TwoLevel {
        alpha: u64,
        special: Vec<u64>,
        special_mass: Rational,
        other_mass: Rational,
    },
}

/// A maximal set of digits behaving identically under one carry transition:
/// `count` digits, each of preimage mass `pre`, mapping to image digits of
/// mass `img`, all producing the same outgoing carry.
#[derive(Debug, Clone)]
pub struct ShiftClass {
    pub count: u64,
    pub pre: Rational,
    pub img: Rational,
    pub carry: bool,
}

impl CoordinateMeasure {
    pub fn uniform(alpha: u64) -> Self {
        let m = big_rat(BigInt::one(), BigInt::from(alpha));
        CoordinateMeasure::TwoLevel {
            alpha,
            special: Vec::new(),
            special_mass: m.clone(),
            other_mass: m,
        }
    }

    pub fn alpha(&self) -> u64 {
        match self {
            CoordinateMeasure::Dense(v) => v.len() as u64,
            CoordinateMeasure::TwoLevel { alpha, .. } => *alpha,
        }
    }

    fn is_special(&self, d: u64) -> bool {
        match self {
            CoordinateMeasure::Dense(_) => false,
            CoordinateMeasure::TwoLevel { special, .. } => special.binary_search(&d).is_ok(),
        }
    }

    pub fn mass(&self, d: u64) -> Rational {
        match self {
            CoordinateMeasure::Dense(v) => v[d as usize].clone(),
            CoordinateMeasure::TwoLevel {
                special_mass,
                other_mass,
                ..
            } => {
                if self.is_special(d) {
                    special_mass.clone()
                } else {
                    other_mass.clone()
                }
            }
        }
    }

    /// Σ_{d < c} μ(d).
    pub fn prefix_mass(&self, c: u64) -> Rational {
        match self {
            CoordinateMeasure::Dense(v) => v[..c as usize].iter().sum(),
            CoordinateMeasure::TwoLevel {
                special,
                special_mass,
                other_mass,
                ..
            } => {
                let below = special.partition_point(|&s| s < c) as u64;
                Rational::from_integer(BigInt::from(below)) * special_mass
                    + Rational::from_integer(BigInt::from(c - below)) * other_mass
            }
        }
    }

    pub fn total_mass(&self) -> Rational {
        self.prefix_mass(self.alpha())
    }

    /// Largest single-digit mass η.
    pub fn eta(&self) -> Rational {
        match self {
            CoordinateMeasure::Dense(v) => v.iter().max().unwrap().clone(),
            CoordinateMeasure::TwoLevel {
                alpha,
                special,
                special_mass,
                other_mass,
            } => {
                if special.is_empty() {
                    other_mass.clone()
                } else if special.len() as u64 == *alpha {
                    special_mass.clone()
                } else {
                    special_mass.clone().max(other_mass.clone())
                }
            }
        }
    }

    /// Smallest single-digit mass δ.
    pub fn delta(&self) -> Rational {
        match self {
            CoordinateMeasure::Dense(v) => v.iter().min().unwrap().clone(),
            CoordinateMeasure::TwoLevel {
                alpha,
                special,
                special_mass,
                other_mass,
            } => {
                if special.is_empty() {
                    other_mass.clone()
                } else if special.len() as u64 == *alpha {
                    special_mass.clone()
                } else {
                    special_mass.clone().min(other_mass.clone())
                }
            }
        }
    }

    /// Smallest digit whose mass equals η.
    pub fn argmax_digit(&self) -> u64 {
        let eta = self.eta();
        self.smallest_digit_with_mass(&eta, None)
            .expect("η is attained")
    }

    /// Smallest digit (≠ argmax) attaining the maximum of the remaining
    /// masses; `None` when α = 1 (never happens for valid bases).
    pub fn second_argmax_digit(&self) -> Option<u64> {
        let a = self.argmax_digit();
        let second_value = match self {
            CoordinateMeasure::Dense(v) => v
                .iter()
                .enumerate()
                .filter(|&(d, _)| d as u64 != a)
                .map(|(_, m)| m.clone())
                .max()?,
            CoordinateMeasure::TwoLevel {
                alpha,
                special,
                special_mass,
                other_mass,
            } => {
                let specials_left = special.len() as u64 - u64::from(self.is_special(a));
                let others_left = (*alpha - special.len() as u64) - u64::from(!self.is_special(a));
                match (specials_left > 0, others_left > 0) {
                    (true, true) => special_mass.clone().max(other_mass.clone()),
                    (true, false) => special_mass.clone(),
                    (false, true) => other_mass.clone(),
                    (false, false) => return None,
                }
            }
        };
        self.smallest_digit_with_mass(&second_value, Some(a))
    }

    fn smallest_digit_with_mass(&self, value: &Rational, skip: Option<u64>) -> Option<u64> {
        match self {
            CoordinateMeasure::Dense(v) => v
                .iter()
                .enumerate()
                .find(|&(d, m)| Some(d as u64) != skip && m == value)
                .map(|(d, _)| d as u64),
            CoordinateMeasure::TwoLevel {
                alpha,
                special,
                special_mass,
                other_mass,
            } => {
                let mut best: Option<u64> = None;
                if special_mass == value {
                    let cand = special.iter().copied().find(|&d| Some(d) != skip);
                    best = pick_min(best, cand);
                }
                if other_mass == value {
                    let cand = first_gap(special, *alpha, skip);
                    best = pick_min(best, cand);
                }
                best
            }
        }
    }

    /// `λ(j) = μ(j)/μ(j−1)` with cyclic predecessor.
    pub fn lambda(&self, j: u64) -> Rational {
        let alpha = self.alpha();
        let pred = if j == 0 { alpha - 1 } else { j - 1 };
        self.mass(j) / self.mass(pred)
    }

    /// Minimum of λ over all digits, together with the smallest digit
    /// attaining it.
    pub fn min_lambda(&self) -> (Rational, u64) {
        match self {
            CoordinateMeasure::Dense(v) => {
                let mut best = (self.lambda(0), 0u64);
                for j in 1..v.len() as u64 {
                    let l = self.lambda(j);
                    if l < best.0 {
                        best = (l, j);
                    }
                }
                best
            }
            CoordinateMeasure::TwoLevel {
                alpha,
                special,
                special_mass,
                other_mass,
            } => {
                if special.is_empty()
                    || special.len() as u64 == *alpha
                    || special_mass == other_mass
                {
                    return (Rational::one(), 0);
                }
                // Only the four (digit level, predecessor level) patterns can
                // occur; find the smallest digit realizing each.
                let pred_special = |j: u64| {
                    let p = if j == 0 { *alpha - 1 } else { j - 1 };
                    special.binary_search(&p).is_ok()
                };
                let mut candidates: Vec<(Rational, u64)> = Vec::new();
                // Patterns with a special digit: scan the special set.
                for &j in special.iter() {
                    let value = if pred_special(j) {
                        Rational::one()
                    } else {
                        special_mass / other_mass
                    };
                    if !candidates.iter().any(|(v, _)| *v == value) {
                        candidates.push((value, j));
                    }
                }
                // Patterns with an ordinary digit: successors of specials and
                // the first doubly-ordinary digit.
                for &p in special.iter() {
                    let j = (p + 1) % *alpha;
                    if !self.is_special(j) {
                        let value = if pred_special(j) {
                            other_mass / special_mass
                        } else {
                            Rational::one()
                        };
                        match candidates.iter_mut().find(|(v, _)| *v == value) {
                            Some(entry) => entry.1 = entry.1.min(j),
                            None => candidates.push((value, j)),
                        }
                    }
                }
                if let Some(j) = first_doubly_ordinary(special, *alpha) {
                    let value = Rational::one();
                    match candidates.iter_mut().find(|(v, _)| *v == value) {
                        Some(entry) => entry.1 = entry.1.min(j),
                        None => candidates.push((value, j)),
                    }
                }
                candidates
                    .into_iter()
                    .min_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(&b.1)))
                    .expect("nonempty digit space")
            }
        }
    }

    /// Explicit mass vector; refuses to materialize gigantic coordinates.
    pub fn masses(&self) -> Result<Vec<Rational>> {
        const MATERIALIZE_CAP: u64 = 1 << 20;
        let alpha = self.alpha();
        if alpha > MATERIALIZE_CAP {
            return Err(Error::SizeLimit {
                needed: alpha.to_string(),
                cap: MATERIALIZE_CAP,
            });
        }
        Ok(match self {
            CoordinateMeasure::Dense(v) => v.clone(),
            _ => (0..alpha).map(|d| self.mass(d)).collect(),
        })
    }

    pub fn is_uniform(&self) -> bool {
        self.eta() == self.delta()
    }

    /// Transition classes for one carry-DP step over a fully free coordinate:
    /// preimage digit `d` maps to `(d + shift) mod α` with carry out iff the
    /// sum wraps. `shift = k_i + incoming carry`, so `0 ≤ shift ≤ α`.
    pub fn shift_classes(&self, shift: u64) -> Vec<ShiftClass> {
        let alpha = self.alpha();
        debug_assert!(shift <= alpha);
        match self {
            CoordinateMeasure::Dense(v) => {
                let mut out = Vec::with_capacity(v.len());
                for d in 0..alpha {
                    let raw = d + shift;
                    let carry = raw >= alpha;
                    let z = if carry { raw - alpha } else { raw };
                    out.push(ShiftClass {
                        count: 1,
                        pre: v[d as usize].clone(),
                        img: v[z as usize].clone(),
                        carry,
                    });
                }
                out
            }
            CoordinateMeasure::TwoLevel {
                special,
                special_mass,
                other_mass,
                ..
            } => {
                let mut out = Vec::new();
                // No-wrap segment [0, α−shift), image offset +shift; wrap
                // segment [α−shift, α), image offset shift−α.
                let segments = [
                    (0u64, alpha - shift, shift as i128, false),
                    (alpha - shift, alpha, shift as i128 - alpha as i128, true),
                ];
                for (lo, hi, delta, carry) in segments {
                    if lo >= hi {
                        continue;
                    }
                    let len = hi - lo;
                    // Digits of P inside [lo, hi), split by whether the image
                    // lands back in P.
                    let pre_in: Vec<u64> = special
                        .iter()
                        .copied()
                        .filter(|&d| d >= lo && d < hi)
                        .collect();
                    let pre_in_img_in = pre_in
                        .iter()
                        .filter(|&&d| special.binary_search(&((d as i128 + delta) as u64)).is_ok())
                        .count() as u64;
                    let pre_in_img_out = pre_in.len() as u64 - pre_in_img_in;
                    // Images in P whose preimage is ordinary.
                    let img_in_pre_out = special
                        .iter()
                        .filter(|&&z| {
                            let d = z as i128 - delta;
                            d >= lo as i128
                                && d < hi as i128
                                && special.binary_search(&(d as u64)).is_err()
                        })
                        .count() as u64;
                    let plain = len - pre_in_img_in - pre_in_img_out - img_in_pre_out;
                    let combos = [
                        (pre_in_img_in, special_mass, special_mass),
                        (pre_in_img_out, special_mass, other_mass),
                        (img_in_pre_out, other_mass, special_mass),
                        (plain, other_mass, other_mass),
                    ];
                    for (count, pre, img) in combos {
                        if count > 0 {
                            out.push(ShiftClass {
                                count,
                                pre: pre.clone(),
                                img: img.clone(),
                                carry,
                            });
                        }
                    }
                }
                out
            }
        }
    }
}

fn pick_min(a: Option<u64>, b: Option<u64>) -> Option<u64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

/// Smallest digit not in the sorted set `special` (optionally skipping one).
fn first_gap(special: &[u64], alpha: u64, skip: Option<u64>) -> Option<u64> {
    let mut d = 0u64;
    let mut idx = 0usize;
    while d < alpha {
        if Some(d) == skip {
            d += 1;
            continue;
        }
        while idx < special.len() && special[idx] < d {
            idx += 1;
        }
        if idx < special.len() && special[idx] == d {
            d += 1;
            idx += 1;
        } else {
            return Some(d);
        }
    }
    None
}

/// Smallest digit j with both j and its cyclic predecessor ordinary.
fn first_doubly_ordinary(special: &[u64], alpha: u64) -> Option<u64> {
    let mut blocked: Vec<u64> = special
        .iter()
        .flat_map(|&p| [p, (p + 1) % alpha])
        .collect();
    blocked.sort_unstable();
    blocked.dedup();
    let mut expected = 0u64;
    for b in blocked {
        if b > expected {
            break;
        }
        expected = b + 1;
    }
    if expected < alpha {
        Some(expected)
    } else {
        None
    }
}

/// Asymptotic facts a family may declare about itself. Finite horizons never
/// prove a limit, so certified classifications lean only on these.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DeclaredFact {
    /// `lim η_i = v`.
    EtaLimit(Rational),
    /// `limsup η_i = v`.
    EtaLimsup(Rational),
    /// `lim (1 − η_i)/α_i = v`.
    EtaGapOverAlphaLimit(Rational),
    /// `ρ_n` stays bounded.
    RhoBounded,
    /// `limsup ρ_n = ∞`.
    RhoUnbounded,
    /// The digit sizes are bounded.
    AlphaBounded,
    /// `limsup_{i≤j} ψ_{i,j} = 1`.
    PsiLimsupOne,
    /// Infinitely many coordinates carry two distinct digits of mass ≥ floor.
    TwoDigitMassFloor(Rational),
    /// Condition (◇) holds, i.e. `T_f` is continuous.
    DiamondHolds,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Justification {
    /// Guaranteed by the defining formulas of a built-in family.
    Construction(&'static str),
    /// Asserted by the user; never verified.
    UserAsserted,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Declaration {
    pub fact: DeclaredFact,
    pub justification: Justification,
}

impl Declaration {
    fn built_in(fact: DeclaredFact, why: &'static str) -> Self {
        Declaration {
            fact,
            justification: Justification::Construction(why),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FamilyKind {
    Uniform,
    Thm32,
    Ex33,
    Thm36 { t: u64 },
    Thm37,
    Custom { masses: Vec<Vec<Rational>> },
}

/// A base together with a rule assigning each coordinate its measure, plus
/// declared asymptotics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeasureFamily {
    base: BaseSeq,
    kind: FamilyKind,
    declarations: Vec<Declaration>,
}

impl MeasureFamily {
    pub fn uniform(base: BaseSeq) -> Self {
        let mut declarations = vec![
            Declaration::built_in(
                DeclaredFact::DiamondHolds,
                "uniform masses: every λ equals 1",
            ),
            Declaration::built_in(DeclaredFact::RhoBounded, "uniform masses: ρ_n ≡ 1"),
        ];
        if base.is_bounded() {
            declarations.push(Declaration::built_in(
                DeclaredFact::AlphaBounded,
                "rule-based base is bounded",
            ));
        }
        MeasureFamily {
            base,
            kind: FamilyKind::Uniform,
            declarations,
        }
    }

    /// `μ_n(0) = 1 − 1/m_n`, rest uniform, with `m_n = 2^(n+1) + 1`.
    pub fn thm32(base: BaseSeq) -> Self {
        let mut declarations = vec![
            Declaration::built_in(
                DeclaredFact::DiamondHolds,
                "thm32 masses: λ products admit a positive lower bound for every rule-based base",
            ),
            Declaration::built_in(
                DeclaredFact::EtaLimit(Rational::one()),
                "thm32 masses: η_n = 1 − 1/(2^(n+1)+1)",
            ),
        ];
        if base.is_bounded() {
            declarations.push(Declaration::built_in(
                DeclaredFact::AlphaBounded,
                "rule-based base is bounded",
            ));
        }
        MeasureFamily {
            base,
            kind: FamilyKind::Thm32,
            declarations,
        }
    }

    /// Sparse-set family on `α_n = 2^(n+2)`; mixing with `η → 0`.
    pub fn ex33(base: BaseSeq) -> Result<Self> {
        if base != (BaseSeq::PowerOfTwo { offset: 2 }) {
            return Err(Error::InvalidFamily(
                "ex33 requires the power base α_n = 2^(n+2)".into(),
            ));
        }
        let declarations = vec![
            Declaration::built_in(
                DeclaredFact::DiamondHolds,
                "ex33 masses: λ products are bounded below by 9/64",
            ),
            Declaration::built_in(
                DeclaredFact::EtaLimit(Rational::zero()),
                "ex33 masses: η_n = (1 − 1/m_n)/(n+1)",
            ),
            Declaration::built_in(
                DeclaredFact::PsiLimsupOne,
                "ex33 construction mixes, which forces limsup ψ = 1",
            ),
        ];
        Ok(MeasureFamily {
            base,
            kind: FamilyKind::Ex33,
            declarations,
        })
    }

    /// Needs a digit size `t` recurring infinitely often; alternate
    /// occurrences get a heavy zero digit, the rest stay uniform.
    pub fn thm36(base: BaseSeq) -> Result<Self> {
        let Some(t) = base.liminf_alpha() else {
            return Err(Error::InvalidFamily(
                "thm36 requires liminf α_n < ∞ (a recurring digit size)".into(),
            ));
        };
        let floor = big_rat(BigInt::one(), BigInt::from(t));
        let declarations = vec![
            Declaration::built_in(
                DeclaredFact::DiamondHolds,
                "thm36 masses: λ products are bounded below by 1/(2(t−1))",
            ),
            Declaration::built_in(
                DeclaredFact::EtaLimsup(Rational::one()),
                "thm36 masses: η on the weighted subsequence is 1 − 1/(k+3)",
            ),
            Declaration::built_in(
                DeclaredFact::TwoDigitMassFloor(floor),
                "uniform coordinates with α = t recur, each digit of mass 1/t",
            ),
            Declaration::built_in(
                DeclaredFact::AlphaBounded,
                "rule-based base with finite liminf is bounded",
            ),
        ];
        Ok(MeasureFamily {
            base,
            kind: FamilyKind::Thm36 { t },
            declarations,
        })
    }

    /// Digits 0 and 1 each carry `(1/2)(1 − 1/m_n)`; needs `α_n ≥ 4`.
    pub fn thm37(base: BaseSeq) -> Result<Self> {
        let min_alpha = match &base {
            BaseSeq::Constant(c) => *c,
            BaseSeq::Periodic { prefix, cycle } => {
                prefix.iter().chain(cycle.iter()).copied().min().unwrap()
            }
            BaseSeq::PowerOfTwo { offset } => 1u64 << *offset.min(&63),
        };
        if min_alpha < 4 {
            return Err(Error::InvalidFamily(format!(
                "thm37 requires α_n ≥ 4 everywhere, found α = {min_alpha}"
            )));
        }
        let mut declarations = vec![
            Declaration::built_in(
                DeclaredFact::DiamondHolds,
                "thm37 masses: λ products admit a positive lower bound for every rule-based base",
            ),
            Declaration::built_in(
                DeclaredFact::PsiLimsupOne,
                "thm37 masses: ψ_n ≥ 1 − 1/(2^n+1) via the digit pair {0,1} shifted by 2",
            ),
            Declaration::built_in(
                DeclaredFact::TwoDigitMassFloor(crate::rational_ratio(1, 4)),
                "thm37 masses: μ_n(0) = μ_n(1) = (1/2)(1 − 1/m_n) ≥ 1/4",
            ),
        ];
        if base.is_bounded() {
            declarations.push(Declaration::built_in(
                DeclaredFact::AlphaBounded,
                "rule-based base is bounded",
            ));
        }
        Ok(MeasureFamily {
            base,
            kind: FamilyKind::Thm37,
            declarations,
        })
    }

    /// Explicit mass vectors, repeated cyclically along the coordinates.
    /// Declarations are user assertions and are never verified.
    pub fn custom(
        base: BaseSeq,
        masses: Vec<Vec<Rational>>,
        facts: Vec<DeclaredFact>,
    ) -> Result<Self> {
        if masses.is_empty() {
            return Err(Error::InvalidFamily("custom family needs mass vectors".into()));
        }
        if !base.is_bounded() {
            return Err(Error::InvalidFamily(
                "custom cyclic masses cannot follow an unbounded base".into(),
            ));
        }
        for (idx, v) in masses.iter().enumerate() {
            if v.iter().any(|m| !m.is_positive()) {
                return Err(Error::InvalidFamily(format!(
                    "mass vector {idx} has a non-positive entry; every digit needs positive mass"
                )));
            }
            let total: Rational = v.iter().sum();
            if !total.is_one() {
                return Err(Error::InvalidFamily(format!(
                    "mass vector {idx} sums to {total}, not 1"
                )));
            }
        }
        // The base is eventually periodic and the vectors cycle, so checking
        // one joint period after the prefix validates every coordinate.
        let (prefix_len, base_cycle) = match &base {
            BaseSeq::Constant(_) => (0, 1),
            BaseSeq::Periodic { prefix, cycle } => (prefix.len(), cycle.len()),
            BaseSeq::PowerOfTwo { .. } => unreachable!(),
        };
        let joint = lcm(base_cycle, masses.len());
        for i in 0..prefix_len + joint {
            let expect = base.alpha(i);
            let got = masses[i % masses.len()].len() as u64;
            if got != expect {
                return Err(Error::InvalidFamily(format!(
                    "mass vector for coordinate {i} has {got} entries but α({i}) = {expect}"
                )));
            }
        }
        let declarations = facts
            .into_iter()
            .map(|fact| Declaration {
                fact,
                justification: Justification::UserAsserted,
            })
            .collect();
        Ok(MeasureFamily {
            base,
            kind: FamilyKind::Custom { masses },
            declarations,
        })
    }

    pub fn base(&self) -> &BaseSeq {
        &self.base
    }

    pub fn kind(&self) -> &FamilyKind {
        &self.kind
    }

    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            FamilyKind::Uniform => "uniform",
            FamilyKind::Thm32 => "thm32",
            FamilyKind::Ex33 => "ex33",
            FamilyKind::Thm36 { .. } => "thm36",
            FamilyKind::Thm37 => "thm37",
            FamilyKind::Custom { .. } => "custom",
        }
    }

    pub fn declarations(&self) -> &[Declaration] {
        &self.declarations
    }

    pub fn declares(&self, fact: &DeclaredFact) -> bool {
        self.declarations.iter().any(|d| d.fact == *fact)
    }

    pub fn find_declaration(
        &self,
        pred: impl Fn(&DeclaredFact) -> bool,
    ) -> Option<&Declaration> {
        self.declarations.iter().find(|d| pred(&d.fact))
    }

    /// The measure on coordinate `i`.
    pub fn coordinate(&self, i: usize) -> CoordinateMeasure {
        let alpha = self.base.alpha(i);
        match &self.kind {
            FamilyKind::Uniform => CoordinateMeasure::uniform(alpha),
            FamilyKind::Thm32 => {
                let m: BigInt = pow2(i + 1) + 1u32;
                let special_mass = big_rat(&m - 1u32, m.clone());
                let other_mass = big_rat(BigInt::one(), m * BigInt::from(alpha - 1));
                CoordinateMeasure::TwoLevel {
                    alpha,
                    special: vec![0],
                    special_mass,
                    other_mass,
                }
            }
            FamilyKind::Ex33 => {
                let m: BigInt = pow2(i + 2);
                let sparse: Vec<u64> = (0..=i as u32).map(|t| (1u64 << t) - 1).collect();
                let d_len = sparse.len() as u64;
                let special_mass = big_rat(&m - 1u32, m.clone() * BigInt::from(d_len));
                let other_mass = big_rat(BigInt::one(), m * BigInt::from(alpha - d_len));
                CoordinateMeasure::TwoLevel {
                    alpha,
                    special: sparse,
                    special_mass,
                    other_mass,
                }
            }
            FamilyKind::Thm36 { t } => {
                if alpha != *t {
                    return CoordinateMeasure::uniform(alpha);
                }
                let occurrence = self.t_occurrence_index(i, *t);
                if !occurrence.is_multiple_of(2) {
                    return CoordinateMeasure::uniform(alpha);
                }
                let k = occurrence / 2;
                let m = BigInt::from(k as u64 + 3);
                let special_mass = big_rat(&m - 1u32, m.clone());
                let other_mass = big_rat(BigInt::one(), m * BigInt::from(alpha - 1));
                CoordinateMeasure::TwoLevel {
                    alpha,
                    special: vec![0],
                    special_mass,
                    other_mass,
                }
            }
            FamilyKind::Thm37 => {
                let m: BigInt = pow2(i) + 1u32;
                let special_mass = big_rat(&m - 1u32, m.clone() * 2u32);
                let other_mass = big_rat(BigInt::one(), m * BigInt::from(alpha - 2));
                CoordinateMeasure::TwoLevel {
                    alpha,
                    special: vec![0, 1],
                    special_mass,
                    other_mass,
                }
            }
            FamilyKind::Custom { masses } => {
                CoordinateMeasure::Dense(masses[i % masses.len()].clone())
            }
        }
    }

    /// Position of coordinate `i` among coordinates with `α = t`.
    fn t_occurrence_index(&self, i: usize, t: u64) -> usize {
        debug_assert_eq!(self.base.alpha(i), t);
        (0..i).filter(|&j| self.base.alpha(j) == t).count()
    }

    /// Explicit masses of coordinate `i`.
    pub fn masses(&self, i: usize) -> Result<Vec<Rational>> {
        self.coordinate(i).masses()
    }

    /// `(η_i, δ_i)`.
    pub fn eta_delta(&self, i: usize) -> (Rational, Rational) {
        let c = self.coordinate(i);
        (c.eta(), c.delta())
    }

    /// `λ_i(j) = μ_i(j)/μ_i(j−1)`, cyclic predecessor.
    pub fn lambda(&self, i: usize, j: u64) -> Result<Rational> {
        let c = self.coordinate(i);
        if j >= c.alpha() {
            return Err(Error::InvalidDigit {
                coordinate: i,
                digit: j,
                alpha: c.alpha(),
            });
        }
        Ok(c.lambda(j))
    }

    /// `ρ_n = ∏_{i≤n} η_i/δ_i`.
    pub fn rho(&self, n: usize) -> Rational {
        let mut acc = Rational::one();
        for i in 0..=n {
            let (eta, delta) = self.eta_delta(i);
            acc *= eta / delta;
        }
        acc
    }

    /// Exact minimum of `λ_l(j) ∏_{i<l} λ_i(0)` over `1 ≤ l ≤ L`, `j ∈ A_l`,
    /// plus where it is attained. This is an upper bound for the true
    /// infimum of Condition (◇); it certifies nothing about the tail.
    pub fn diamond_inf(&self, horizon: usize) -> DiamondInf {
        assert!(horizon >= 1, "Condition (◇) ranges over l ≥ 1");
        let mut prefix = Rational::one();
        let mut best: Option<(Rational, usize, u64)> = None;
        for l in 1..=horizon {
            let previous = self.coordinate(l - 1);
            prefix *= previous.lambda(0);
            let (min_lambda, j) = self.coordinate(l).min_lambda();
            let value = min_lambda * &prefix;
            let better = match &best {
                None => true,
                Some((b, _, _)) => value < *b,
            };
            if better {
                best = Some((value, l, j));
            }
        }
        let (value, at_l, at_j) = best.expect("horizon ≥ 1");
        DiamondInf { value, at_l, at_j }
    }

    /// `∏_{i≤L} η_i`: decay indicator for the non-atomicity product.
    pub fn nonatomic_product(&self, horizon: usize) -> Rational {
        let mut acc = Rational::one();
        for i in 0..=horizon {
            acc *= self.eta_delta(i).0;
        }
        acc
    }
}

/// Result of a finite-horizon Condition (◇) evaluation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiamondInf {
    pub value: Rational,
    pub at_l: usize,
    pub at_j: u64,
}

fn lcm(a: usize, b: usize) -> usize {
    num_integer::lcm(a, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{rational_int, rational_ratio};

    fn base2() -> BaseSeq {
        BaseSeq::constant(2).unwrap()
    }

    fn ex33_family() -> MeasureFamily {
        MeasureFamily::ex33(BaseSeq::power_of_two(2).unwrap()).unwrap()
    }

    #[test]
    fn thm32_first_coordinate_masses() {
        let f = MeasureFamily::thm32(base2());
        assert_eq!(
            f.masses(0).unwrap(),
            vec![rational_ratio(2, 3), rational_ratio(1, 3)]
        );
    }

    #[test]
    fn uniform_masses() {
        let f = MeasureFamily::uniform(BaseSeq::constant(5).unwrap());
        assert_eq!(f.masses(0).unwrap(), vec![rational_ratio(1, 5); 5]);
    }

    #[test]
    fn ex33_first_coordinate_masses() {
        // α_0 = 4, m_0 = 4, sparse set {0}.
        let f = ex33_family();
        assert_eq!(
            f.masses(0).unwrap(),
            vec![
                rational_ratio(3, 4),
                rational_ratio(1, 12),
                rational_ratio(1, 12),
                rational_ratio(1, 12)
            ]
        );
    }

    #[test]
    fn eta_delta_examples() {
        let u = MeasureFamily::uniform(BaseSeq::constant(3).unwrap());
        assert_eq!(
            u.eta_delta(0),
            (rational_ratio(1, 3), rational_ratio(1, 3))
        );

        let t = MeasureFamily::thm32(base2());
        assert_eq!(
            t.eta_delta(1),
            (rational_ratio(4, 5), rational_ratio(1, 5))
        );

        // ex33 coordinate 1: α = 8, m = 8, sparse {0, 1}.
        let e = ex33_family();
        assert_eq!(
            e.eta_delta(1),
            (rational_ratio(7, 16), rational_ratio(1, 48))
        );
    }

    #[test]
    fn ex33_eta_follows_the_sparse_set_size() {
        // Coordinate 2: α = 16, m = 16, sparse {0, 1, 3} of size 3,
        // so η_2 = (1 − 1/16)/3 = 5/16.
        let e = ex33_family();
        assert_eq!(e.eta_delta(2).0, rational_ratio(5, 16));
        assert_eq!(e.eta_delta(2).1, rational_ratio(1, 208));
    }

    #[test]
    fn lambda_examples() {
        let u = MeasureFamily::uniform(BaseSeq::constant(4).unwrap());
        for j in 0..4 {
            assert_eq!(u.lambda(0, j).unwrap(), rational_int(1));
        }

        let t = MeasureFamily::thm32(base2());
        assert_eq!(t.lambda(0, 0).unwrap(), rational_int(2));
        assert_eq!(t.lambda(0, 1).unwrap(), rational_ratio(1, 2));

        // thm37: λ_n(0) = (1/2)(1 − 1/m_n) · m_n(α_n − 2).
        let s = MeasureFamily::thm37(BaseSeq::constant(4).unwrap()).unwrap();
        for n in 0..6 {
            let m = rational_int(1 << n) + rational_int(1);
            let expected = rational_ratio(1, 2)
                * (rational_int(1) - m.recip())
                * m.clone()
                * rational_int(2);
            assert_eq!(s.lambda(n, 0).unwrap(), expected);
        }
        assert!(s.lambda(0, 4).is_err());
    }

    #[test]
    fn rho_examples() {
        let u = MeasureFamily::uniform(base2());
        assert_eq!(u.rho(7), rational_int(1));

        let t = MeasureFamily::thm32(base2());
        assert_eq!(t.rho(0), rational_int(2));
        assert_eq!(t.rho(1), rational_int(8));
    }

    #[test]
    fn diamond_uniform_is_one() {
        let u = MeasureFamily::uniform(BaseSeq::periodic(vec![], vec![2, 3]).unwrap());
        let d = u.diamond_inf(10);
        assert_eq!(d.value, rational_int(1));
    }

    #[test]
    fn diamond_ex33_exact_value() {
        // Minimum sits at l = 1, j = 2: λ_1(2)·λ_0(0) = (1/21)·9 = 3/7,
        // comfortably above the 9/64 floor.
        let e = ex33_family();
        let d = e.diamond_inf(10);
        assert_eq!(d.value, rational_ratio(3, 7));
        assert_eq!((d.at_l, d.at_j), (1, 2));
        assert!(d.value >= rational_ratio(9, 64));
    }

    #[test]
    fn diamond_thm37_beats_its_chain_bound() {
        let s = MeasureFamily::thm37(BaseSeq::constant(4).unwrap()).unwrap();
        let d = s.diamond_inf(10);
        assert_eq!(d.value, rational_ratio(1, 2));
        assert_eq!((d.at_l, d.at_j), (1, 2));
        // Chain bound (1/2^{2l}) · 2^{l(l−1)/2}/(2^l+1) · ∏α_i/α_l at l = 1.
        let bound = rational_ratio(1, 4) * rational_ratio(1, 3) * rational_int(1);
        assert!(d.value >= bound);
        assert!(d.value > rational_int(0));
    }

    #[test]
    fn nonatomic_product_examples() {
        let u = MeasureFamily::uniform(base2());
        assert_eq!(u.nonatomic_product(3), rational_ratio(1, 16));

        let e = ex33_family();
        assert_eq!(
            e.nonatomic_product(1),
            rational_ratio(3, 4) * rational_ratio(7, 16)
        );
    }

    #[test]
    fn masses_sum_to_one_everywhere() {
        let families = [
            MeasureFamily::uniform(BaseSeq::periodic(vec![5], vec![2, 3]).unwrap()),
            MeasureFamily::thm32(base2()),
            ex33_family(),
            MeasureFamily::thm36(BaseSeq::periodic(vec![], vec![2, 3]).unwrap()).unwrap(),
            MeasureFamily::thm37(BaseSeq::constant(4).unwrap()).unwrap(),
        ];
        for f in &families {
            for i in 0..12 {
                assert!(
                    f.coordinate(i).total_mass().is_one(),
                    "family {} coordinate {i}",
                    f.kind_name()
                );
            }
        }
    }

    #[test]
    fn delta_le_uniform_le_eta() {
        let families = [
            MeasureFamily::thm32(base2()),
            ex33_family(),
            MeasureFamily::thm37(BaseSeq::constant(4).unwrap()).unwrap(),
        ];
        for f in &families {
            for i in 0..10 {
                let (eta, delta) = f.eta_delta(i);
                let alpha = f.base().alpha(i);
                let unif = Rational::new(1.into(), (alpha as i64).into());
                assert!(delta <= unif && unif <= eta);
            }
        }
    }

    #[test]
    fn lambda_cycle_product_is_one_on_small_coordinates() {
        let f = MeasureFamily::thm37(BaseSeq::constant(5).unwrap()).unwrap();
        for i in 0..6 {
            let c = f.coordinate(i);
            let product: Rational = (0..c.alpha()).map(|j| c.lambda(j)).product();
            assert!(product.is_one());
        }
    }

    #[test]
    fn rho_is_nondecreasing() {
        let f = MeasureFamily::thm36(BaseSeq::periodic(vec![], vec![2, 3]).unwrap()).unwrap();
        let mut last = rational_int(0);
        for n in 0..16 {
            let r = f.rho(n);
            assert!(r >= last);
            last = r;
        }
    }

    #[test]
    fn thm32_eta_strictly_increasing_toward_one() {
        let f = MeasureFamily::thm32(base2());
        let mut last = rational_int(0);
        for i in 0..20 {
            let eta = f.eta_delta(i).0;
            // η_i = 1 − 1/(2^(i+1)+1), directly from the masses.
            let m = rational_int(2).pow(i as i32 + 1) + rational_int(1);
            assert_eq!(eta, rational_int(1) - m.recip());
            assert!(eta > last);
            last = eta;
        }
    }

    #[test]
    fn ex33_eta_strictly_decreasing() {
        let f = ex33_family();
        let mut last = rational_int(2);
        for i in 0..20 {
            let eta = f.eta_delta(i).0;
            assert!(eta < last);
            last = eta;
        }
    }

    #[test]
    fn thm37_keeps_two_heavy_digits() {
        // min{μ_n(0), μ_n(1)} ≥ 1/4 is exactly what blocks mixing.
        let f = MeasureFamily::thm37(BaseSeq::constant(4).unwrap()).unwrap();
        for n in 0..20 {
            let c = f.coordinate(n);
            assert!(c.mass(0).min(c.mass(1)) >= rational_ratio(1, 4));
        }
    }

    #[test]
    fn thm36_alternates_weighted_and_uniform() {
        let f = MeasureFamily::thm36(BaseSeq::periodic(vec![], vec![2, 3]).unwrap()).unwrap();
        // t = 2 occurs at even positions; occurrences 0, 2, 4 (positions
        // 0, 4, 8) get m = 3, 4, 5, the others stay uniform.
        assert_eq!(f.eta_delta(0).0, rational_ratio(2, 3));
        assert_eq!(f.eta_delta(2).0, rational_ratio(1, 2));
        assert_eq!(f.eta_delta(4).0, rational_ratio(3, 4));
        assert_eq!(f.eta_delta(6).0, rational_ratio(1, 2));
        assert_eq!(f.eta_delta(8).0, rational_ratio(4, 5));
        assert_eq!(f.eta_delta(1).0, rational_ratio(1, 3));
    }

    #[test]
    fn family_preconditions_enforced() {
        assert!(MeasureFamily::ex33(BaseSeq::constant(4).unwrap()).is_err());
        assert!(MeasureFamily::ex33(BaseSeq::power_of_two(3).unwrap()).is_err());
        assert!(MeasureFamily::thm37(base2()).is_err());
        assert!(MeasureFamily::thm36(BaseSeq::power_of_two(2).unwrap()).is_err());
    }

    #[test]
    fn custom_validation() {
        let good = MeasureFamily::custom(
            base2(),
            vec![vec![rational_ratio(1, 2), rational_ratio(1, 2)]],
            vec![],
        );
        assert!(good.is_ok());

        let bad_sum = MeasureFamily::custom(
            base2(),
            vec![vec![rational_ratio(1, 2), rational_ratio(1, 3)]],
            vec![],
        );
        assert!(bad_sum.is_err());

        let bad_len = MeasureFamily::custom(
            BaseSeq::periodic(vec![], vec![2, 3]).unwrap(),
            vec![vec![rational_ratio(1, 2), rational_ratio(1, 2)]],
            vec![],
        );
        assert!(bad_len.is_err());

        let zero_mass = MeasureFamily::custom(
            base2(),
            vec![vec![rational_int(1), rational_int(0)]],
            vec![],
        );
        assert!(zero_mass.is_err());
    }

    #[test]
    fn shift_classes_cover_the_coordinate() {
        let f = ex33_family();
        for i in 0..6 {
            let c = f.coordinate(i);
            for shift in [0, 1, 2, c.alpha() / 2, c.alpha() - 1, c.alpha()] {
                let classes = c.shift_classes(shift);
                let count: u64 = classes.iter().map(|cl| cl.count).sum();
                assert_eq!(count, c.alpha());
                let pre_total: Rational = classes
                    .iter()
                    .map(|cl| cl.pre.clone() * Rational::from_integer((cl.count as i64).into()))
                    .sum();
                let img_total: Rational = classes
                    .iter()
                    .map(|cl| cl.img.clone() * Rational::from_integer((cl.count as i64).into()))
                    .sum();
                assert!(pre_total.is_one(), "preimages partition the coordinate");
                assert!(img_total.is_one(), "images partition the coordinate");
            }
        }
    }

    #[test]
    fn min_lambda_matches_dense_scan() {
        let families = [
            MeasureFamily::thm32(BaseSeq::constant(6).unwrap()),
            ex33_family(),
            MeasureFamily::thm37(BaseSeq::constant(7).unwrap()).unwrap(),
        ];
        for f in &families {
            for i in 0..5 {
                let c = f.coordinate(i);
                let (min_l, at_j) = c.min_lambda();
                let dense: Vec<Rational> = (0..c.alpha()).map(|j| c.lambda(j)).collect();
                let expect = dense.iter().min().unwrap();
                assert_eq!(&min_l, expect);
                assert_eq!(dense[at_j as usize], min_l);
                assert!(dense[..at_j as usize].iter().all(|v| v > &min_l));
            }
        }
    }
}
