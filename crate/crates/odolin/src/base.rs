//! Mixed-radix representation and the odometer's carry-over addition.
//!
//! A base is the digit-size sequence `α = (α_0, α_1, …)` with every
//! `α_i ≥ 2`; the radix products are `β_0 = 1`, `β_i = ∏_{j<i} α_j`.
//! A non-negative integer `k < β(J+1)` is identified with its unique digit
//! vector `(k_0, …, k_J)` via `k = k_0 + Σ_{i≥1} k_i β_i`, and the odometer
//! `f` is addition of `(1, 0, 0, …)` with carry propagating to the right.

use crate::{Error, Natural, Result};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

/// Rule-based digit-size sequence. Rules keep arbitrarily many coordinates
/// available without storing an infinite list: constant bases, an explicit
/// prefix followed by a periodic tail, and the power rule `α_i = 2^(i+offset)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BaseSeq {
    Constant(u64),
    Periodic { prefix: Vec<u64>, cycle: Vec<u64> },
    PowerOfTwo { offset: u32 },
}

impl BaseSeq {
    pub fn constant(c: u64) -> Result<Self> {
        if c < 2 {
            return Err(Error::InvalidBase(format!("α = {c} < 2")));
        }
        Ok(BaseSeq::Constant(c))
    }

    /// `α_i = prefix[i]` while the prefix lasts, then `cycle` repeats forever.
    pub fn periodic(prefix: Vec<u64>, cycle: Vec<u64>) -> Result<Self> {
        if cycle.is_empty() {
            return Err(Error::InvalidBase("periodic tail must be nonempty".into()));
        }
        if let Some(&bad) = prefix.iter().chain(cycle.iter()).find(|&&a| a < 2) {
            return Err(Error::InvalidBase(format!("α = {bad} < 2")));
        }
        Ok(BaseSeq::Periodic { prefix, cycle })
    }

    /// `α_i = 2^(i + offset)`; `offset ≥ 1` keeps `α_0 ≥ 2`.
    pub fn power_of_two(offset: u32) -> Result<Self> {
        if offset == 0 {
            return Err(Error::InvalidBase("power rule needs offset ≥ 1".into()));
        }
        Ok(BaseSeq::PowerOfTwo { offset })
    }

    /// Digit size at coordinate `i`.
    ///
    /// Panics for power-rule coordinates whose α does not fit in `u64`
    /// (i + offset ≥ 64); callers validate horizons with [`alpha_checked`].
    ///
    /// [`alpha_checked`]: BaseSeq::alpha_checked
    pub fn alpha(&self, i: usize) -> u64 {
        self.alpha_checked(i)
            .unwrap_or_else(|| panic!("α({i}) exceeds u64 for {self:?}"))
    }

    pub fn alpha_checked(&self, i: usize) -> Option<u64> {
        match self {
            BaseSeq::Constant(c) => Some(*c),
            BaseSeq::Periodic { prefix, cycle } => Some(if i < prefix.len() {
                prefix[i]
            } else {
                cycle[(i - prefix.len()) % cycle.len()]
            }),
            BaseSeq::PowerOfTwo { offset } => {
                let exp = (i as u64).checked_add(*offset as u64)?;
                if exp >= 64 {
                    None
                } else {
                    Some(1u64 << exp)
                }
            }
        }
    }

    /// `β_i = ∏_{j<i} α_j`, with `β_0 = 1`.
    pub fn beta(&self, i: usize) -> Natural {
        let mut b = Natural::one();
        for j in 0..i {
            b *= Natural::from(self.alpha(j));
        }
        b
    }

    /// Whether the α sequence is bounded (exact for rule-based sequences).
    pub fn is_bounded(&self) -> bool {
        !matches!(self, BaseSeq::PowerOfTwo { .. })
    }

    /// Smallest α value occurring infinitely often, when finite.
    pub fn liminf_alpha(&self) -> Option<u64> {
        match self {
            BaseSeq::Constant(c) => Some(*c),
            BaseSeq::Periodic { cycle, .. } => cycle.iter().copied().min(),
            BaseSeq::PowerOfTwo { .. } => None,
        }
    }

    /// Smallest window J with `bound < β(J+1)`, i.e. the window needed to
    /// represent `bound` as a digit vector.
    pub fn window_for(&self, bound: &Natural) -> usize {
        let mut j = 0;
        let mut capacity = Natural::from(self.alpha(0));
        while capacity <= *bound {
            j += 1;
            capacity *= Natural::from(self.alpha(j));
        }
        j
    }

    /// Digit expansion of `k` padded/truncated to exactly `window + 1` digits.
    /// Fails with `OutOfRange` if `k ≥ β(window+1)`.
    pub fn digits(&self, k: &Natural, window: usize) -> Result<Vec<u64>> {
        let mut digits = Vec::with_capacity(window + 1);
        let mut rest = k.clone();
        for i in 0..=window {
            let (q, r) = rest.div_rem(&Natural::from(self.alpha(i)));
            digits.push(r.to_u64().expect("remainder below a u64 radix"));
            rest = q;
        }
        if !rest.is_zero() {
            return Err(Error::OutOfRange {
                value: k.to_string(),
                window,
                capacity: self.beta(window + 1).to_string(),
            });
        }
        Ok(digits)
    }
}

/// A digit vector `(d_0, …, d_J)` over some base, `0 ≤ d_i < α_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MixedRadixInt {
    digits: Vec<u64>,
}

/// Result of a carry-over addition: the digit-wise sum, the carry leaving the
/// window, and the full carry vector `ε_0 … ε_{J+1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CarryAddition {
    pub sum: MixedRadixInt,
    pub carry_out: bool,
    pub carries: Vec<bool>,
}

impl MixedRadixInt {
    pub fn new(digits: Vec<u64>, base: &BaseSeq) -> Result<Self> {
        if digits.is_empty() {
            return Err(Error::InvalidWindowSet("empty digit vector".into()));
        }
        for (i, &d) in digits.iter().enumerate() {
            let alpha = base.alpha(i);
            if d >= alpha {
                return Err(Error::InvalidDigit {
                    coordinate: i,
                    digit: d,
                    alpha,
                });
            }
        }
        Ok(MixedRadixInt { digits })
    }

    pub fn zero(window: usize) -> Self {
        MixedRadixInt {
            digits: vec![0; window + 1],
        }
    }

    pub fn window(&self) -> usize {
        self.digits.len() - 1
    }

    pub fn digits(&self) -> &[u64] {
        &self.digits
    }

    /// Unique representation of `k` on window `J`; requires `k < β(J+1)`.
    pub fn encode(k: &Natural, window: usize, base: &BaseSeq) -> Result<Self> {
        Ok(MixedRadixInt {
            digits: base.digits(k, window)?,
        })
    }

    /// `k_0 + Σ k_i β_i`, the inverse of [`encode`](MixedRadixInt::encode).
    pub fn decode(&self, base: &BaseSeq) -> Natural {
        let mut total = Natural::zero();
        let mut beta = Natural::one();
        for (i, &d) in self.digits.iter().enumerate() {
            total += Natural::from(d) * &beta;
            beta *= Natural::from(base.alpha(i));
        }
        total
    }

    /// Digit-wise addition with carry over to the right:
    /// `z_i = (x_i + y_i + ε_i) mod α_i`, `ε_0 = 0`, `ε_{i+1} = 1` iff
    /// `x_i + y_i + ε_i ≥ α_i`. The carry out of the window is returned,
    /// never dropped.
    pub fn add_with_carry(&self, other: &Self, base: &BaseSeq) -> Result<CarryAddition> {
        if self.window() != other.window() {
            return Err(Error::WindowMismatch {
                left: self.window(),
                right: other.window(),
            });
        }
        let mut digits = Vec::with_capacity(self.digits.len());
        let mut carries = Vec::with_capacity(self.digits.len() + 1);
        let mut carry = false;
        carries.push(false);
        for (i, (&x, &y)) in self.digits.iter().zip(&other.digits).enumerate() {
            let alpha = base.alpha(i);
            let raw = x + y + u64::from(carry);
            carry = raw >= alpha;
            digits.push(if carry { raw - alpha } else { raw });
            carries.push(carry);
        }
        Ok(CarryAddition {
            sum: MixedRadixInt { digits },
            carry_out: carry,
            carries,
        })
    }
}

/// The carry `ε_n` produced while computing `x + k`; this decides membership
/// of `x` in the carry class `C(k, W, n, t)`. Position `n` may be anywhere in
/// `0 ..= J+1`, the top value being the carry out of the window.
pub fn carry_at(k: &MixedRadixInt, x: &MixedRadixInt, n: usize, base: &BaseSeq) -> Result<bool> {
    if k.window() != x.window() {
        return Err(Error::WindowMismatch {
            left: k.window(),
            right: x.window(),
        });
    }
    if n > k.window() + 1 {
        return Err(Error::WindowTooSmall {
            window: k.window(),
            needed: format!("carry position {n} needs window ≥ {}", n.saturating_sub(1)),
        });
    }
    let mut carry = false;
    for i in 0..n {
        let raw = k.digits[i] + x.digits[i] + u64::from(carry);
        carry = raw >= base.alpha(i);
    }
    Ok(carry)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn nat(v: u64) -> Natural {
        Natural::from(v)
    }

    fn base232() -> BaseSeq {
        BaseSeq::periodic(vec![2, 3, 2], vec![2]).unwrap()
    }

    #[test]
    fn rules_produce_expected_alphas() {
        let c = BaseSeq::constant(4).unwrap();
        assert_eq!(c.alpha(0), 4);
        assert_eq!(c.alpha(17), 4);

        let p = BaseSeq::periodic(vec![5], vec![2, 3]).unwrap();
        assert_eq!(
            (0..6).map(|i| p.alpha(i)).collect::<Vec<_>>(),
            vec![5, 2, 3, 2, 3, 2]
        );

        let w = BaseSeq::power_of_two(2).unwrap();
        assert_eq!(w.alpha(0), 4);
        assert_eq!(w.alpha(3), 32);
        assert_eq!(w.alpha_checked(61), Some(1 << 63));
        assert_eq!(w.alpha_checked(62), None);
    }

    #[test]
    fn betas_multiply_up() {
        let b = base232();
        assert_eq!(b.beta(0), nat(1));
        assert_eq!(b.beta(1), nat(2));
        assert_eq!(b.beta(2), nat(6));
        assert_eq!(b.beta(3), nat(12));
    }

    #[test]
    fn bad_rules_rejected() {
        assert!(BaseSeq::constant(1).is_err());
        assert!(BaseSeq::periodic(vec![2], vec![]).is_err());
        assert!(BaseSeq::periodic(vec![1], vec![2]).is_err());
        assert!(BaseSeq::power_of_two(0).is_err());
    }

    #[test]
    fn encode_zero_is_all_zero() {
        let b = base232();
        let x = MixedRadixInt::encode(&nat(0), 2, &b).unwrap();
        assert_eq!(x.digits(), &[0, 0, 0]);
        assert_eq!(x.decode(&b), nat(0));
    }

    // Independent oracle: repeated divide-and-remainder on plain integers.
    fn divrem_digits(mut k: u64, alphas: &[u64]) -> Vec<u64> {
        let mut out = Vec::new();
        for &a in alphas {
            out.push(k % a);
            k /= a;
        }
        out
    }

    #[test]
    fn encode_matches_divrem_oracle() {
        let b = base232();
        assert_eq!(divrem_digits(7, &[2, 3, 2]), vec![1, 0, 1]);
        let x = MixedRadixInt::encode(&nat(7), 2, &b).unwrap();
        assert_eq!(x.digits(), &[1, 0, 1]);

        assert_eq!(divrem_digits(11, &[2, 3, 2]), vec![1, 2, 1]);
        let y = MixedRadixInt::encode(&nat(11), 2, &b).unwrap();
        assert_eq!(y.digits(), &[1, 2, 1]);
    }

    #[test]
    fn decode_is_weighted_sum() {
        // Independent oracle: Σ d_i β_i with β = (1, 2, 6).
        let weighted =
            |digits: &[u64]| -> u64 { digits.iter().zip([1u64, 2, 6]).map(|(d, b)| d * b).sum() };
        let b = base232();
        let x = MixedRadixInt::new(vec![1, 0, 1], &b).unwrap();
        assert_eq!(x.decode(&b), nat(weighted(&[1, 0, 1])));
        assert_eq!(x.decode(&b), nat(7));
        let y = MixedRadixInt::new(vec![1, 2, 1], &b).unwrap();
        assert_eq!(y.decode(&b), nat(weighted(&[1, 2, 1])));
        assert_eq!(y.decode(&b), nat(11));
    }

    #[test]
    fn encode_rejects_out_of_range() {
        let b = base232();
        assert!(matches!(
            MixedRadixInt::encode(&nat(12), 2, &b),
            Err(Error::OutOfRange { .. })
        ));
    }

    #[test]
    fn add_identity() {
        let b = base232();
        let x = MixedRadixInt::new(vec![1, 2, 0], &b).unwrap();
        let z = MixedRadixInt::zero(2);
        let out = x.add_with_carry(&z, &b).unwrap();
        assert_eq!(out.sum, x);
        assert!(!out.carry_out);
    }

    #[test]
    fn add_wraps_with_carry_out() {
        // 11 + 1 = 12 ≡ 0 mod 12, carry out of the window.
        let b = base232();
        let x = MixedRadixInt::new(vec![1, 2, 1], &b).unwrap();
        let y = MixedRadixInt::new(vec![1, 0, 0], &b).unwrap();
        let out = x.add_with_carry(&y, &b).unwrap();
        assert_eq!(out.sum.digits(), &[0, 0, 0]);
        assert!(out.carry_out);
        assert_eq!(out.carries, vec![false, true, true, true]);
    }

    #[test]
    fn add_without_carry_out() {
        let b = BaseSeq::periodic(vec![2, 3], vec![2]).unwrap();
        let x = MixedRadixInt::new(vec![1, 0], &b).unwrap();
        let out = x.add_with_carry(&x, &b).unwrap();
        assert_eq!(out.sum.digits(), &[0, 1]);
        assert!(!out.carry_out);
    }

    #[test]
    fn window_mismatch_detected() {
        let b = base232();
        let x = MixedRadixInt::new(vec![1, 0], &b).unwrap();
        let y = MixedRadixInt::new(vec![1, 0, 0], &b).unwrap();
        assert!(matches!(
            x.add_with_carry(&y, &b),
            Err(Error::WindowMismatch { .. })
        ));
    }

    #[test]
    fn carry_chain_through_positions() {
        let b = BaseSeq::constant(2).unwrap();
        let k = MixedRadixInt::new(vec![1, 0, 0], &b).unwrap();
        let x = MixedRadixInt::new(vec![1, 1, 0], &b).unwrap();
        assert!(!carry_at(&k, &x, 0, &b).unwrap());
        assert!(carry_at(&k, &x, 1, &b).unwrap());
        assert!(carry_at(&k, &x, 2, &b).unwrap());
        assert!(!carry_at(&k, &x, 3, &b).unwrap());
    }

    #[test]
    fn no_carry_when_first_digit_fits() {
        let b = base232();
        let k = MixedRadixInt::new(vec![0, 2, 0], &b).unwrap();
        let x = MixedRadixInt::zero(2);
        assert!(!carry_at(&k, &x, 1, &b).unwrap());
    }

    #[test]
    fn adding_one_permutes_the_window() {
        // f is a bijection of Z_{β(J+1)}.
        let b = base232();
        let cap = 12u64;
        let one = MixedRadixInt::encode(&nat(1), 2, &b).unwrap();
        let mut seen = vec![false; cap as usize];
        for v in 0..cap {
            let x = MixedRadixInt::encode(&nat(v), 2, &b).unwrap();
            let img = x.add_with_carry(&one, &b).unwrap().sum.decode(&b);
            let idx = img.to_u64().unwrap() as usize;
            assert!(!seen[idx]);
            seen[idx] = true;
        }
        assert!(seen.into_iter().all(|s| s));
    }

    prop_compose! {
        fn small_base()(prefix in proptest::collection::vec(2u64..6, 0..3),
                        cycle in proptest::collection::vec(2u64..6, 1..3)) -> BaseSeq {
            BaseSeq::periodic(prefix, cycle).unwrap()
        }
    }

    proptest! {
        #[test]
        fn roundtrip_encode_decode(base in small_base(), window in 1usize..5, seed in 0u64..1_000_000) {
            let cap = base.beta(window + 1).to_u64().unwrap();
            let k = nat(seed % cap);
            let x = MixedRadixInt::encode(&k, window, &base).unwrap();
            prop_assert_eq!(x.decode(&base), k);
        }

        #[test]
        fn addition_is_mod_beta(base in small_base(), window in 1usize..5,
                                a in 0u64..1_000_000, b in 0u64..1_000_000) {
            let cap = base.beta(window + 1).to_u64().unwrap();
            let (a, b) = (a % cap, b % cap);
            let x = MixedRadixInt::encode(&nat(a), window, &base).unwrap();
            let y = MixedRadixInt::encode(&nat(b), window, &base).unwrap();
            let out = x.add_with_carry(&y, &base).unwrap();
            prop_assert_eq!(out.sum.decode(&base), nat((a + b) % cap));
            prop_assert_eq!(out.carry_out, a + b >= cap);
        }
    }
}
