//! Exact measure algebra on window-constrained subsets of the odometer.
//!
//! A window set constrains finitely many coordinates and leaves the tail
//! free. Two forms cover every set used by the witness constructions:
//!
//! * `Box`  — independent per-coordinate digit subsets,
//! * `Block` — an arbitrary subset of the mixed-radix product over one
//!   contiguous coordinate range.
//!
//! Images `f^k(S)` are never materialized (they are not boxes in general).
//! Every query about them runs through a carry-state dynamic program: process
//! coordinates low to high, the only state being the incoming carry bit. For
//! sets constrained within window `J` and `k < β(J+1)`, `f^k` acts on the
//! window exactly as `+k mod β(J+1)` while mapping the free tail bijectively
//! onto the free tail, so the DP is exact. The traversal is written once over
//! a pluggable accumulation scheme: rational sums for measures, max/min
//! products for the operator-norm ratios, boolean reachability for emptiness.

use crate::base::BaseSeq;
use crate::measure::MeasureFamily;
use crate::{Error, Limits, Natural, Rational, Result};
use num_traits::{One, Zero};
use std::collections::BTreeSet;

/// A measurable subset of the odometer constrained on finitely many
/// coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WindowSet {
    /// The designated empty set.
    Empty,
    /// Per-coordinate digit subsets; coordinates beyond the vector (or with
    /// `None`) are free.
    Box { coords: Vec<Option<BTreeSet<u64>>> },
    /// An explicit subset of the cell space over coordinates
    /// `lo ..= lo+width−1`, encoded in mixed-radix order (coordinate `lo` is
    /// the least significant digit).
    Block {
        lo: usize,
        width: usize,
        cells: BTreeSet<u64>,
    },
}

impl WindowSet {
    /// The full space.
    pub fn full() -> Self {
        WindowSet::Box { coords: Vec::new() }
    }

    /// Box from explicit (coordinate, allowed digits) constraints.
    pub fn boxed(constraints: Vec<(usize, BTreeSet<u64>)>, base: &BaseSeq) -> Result<Self> {
        let mut coords: Vec<Option<BTreeSet<u64>>> = Vec::new();
        for (i, digits) in constraints {
            if digits.is_empty() {
                return Err(Error::InvalidWindowSet(format!(
                    "coordinate {i} got an empty digit set; use WindowSet::Empty instead"
                )));
            }
            let alpha = base.alpha(i);
            if let Some(&d) = digits.iter().find(|&&d| d >= alpha) {
                return Err(Error::InvalidDigit {
                    coordinate: i,
                    digit: d,
                    alpha,
                });
            }
            if coords.len() <= i {
                coords.resize(i + 1, None);
            }
            if coords[i].is_some() {
                return Err(Error::InvalidWindowSet(format!(
                    "coordinate {i} constrained twice"
                )));
            }
            coords[i] = Some(digits);
        }
        Ok(WindowSet::Box { coords })
    }

    /// Box fixing single digits: `x_i = d` for each pair.
    pub fn fixing(pairs: &[(usize, u64)], base: &BaseSeq) -> Result<Self> {
        WindowSet::boxed(
            pairs
                .iter()
                .map(|&(i, d)| (i, BTreeSet::from([d])))
                .collect(),
            base,
        )
    }

    /// Block over `lo ..= lo+width−1` from explicit cells.
    pub fn block(lo: usize, width: usize, cells: BTreeSet<u64>, base: &BaseSeq) -> Result<Self> {
        if width == 0 {
            return Err(Error::InvalidWindowSet("block width must be ≥ 1".into()));
        }
        if cells.is_empty() {
            return Ok(WindowSet::Empty);
        }
        let size = range_size(base, lo, lo + width - 1)?;
        if let Some(&c) = cells.iter().find(|&&c| c >= size) {
            return Err(Error::InvalidWindowSet(format!(
                "cell {c} out of range for a block of {size} cells"
            )));
        }
        if cells.len() as u64 == size {
            return Ok(WindowSet::full());
        }
        Ok(WindowSet::Block { lo, width, cells })
    }

    pub fn is_empty_set(&self) -> bool {
        matches!(self, WindowSet::Empty)
    }

    /// Last constrained coordinate, if any.
    pub fn last_constrained(&self) -> Option<usize> {
        match self {
            WindowSet::Empty => None,
            WindowSet::Box { coords } => coords.iter().rposition(|c| c.is_some()),
            WindowSet::Block { lo, width, .. } => Some(lo + width - 1),
        }
    }

    fn box_digits(&self, i: usize) -> Option<&BTreeSet<u64>> {
        match self {
            WindowSet::Box { coords } => coords.get(i).and_then(|c| c.as_ref()),
            _ => None,
        }
    }

    fn block_range(&self) -> Option<(usize, usize)> {
        match self {
            WindowSet::Block { lo, width, .. } => Some((*lo, lo + width - 1)),
            _ => None,
        }
    }

    /// Whether the digit vector of a window cell belongs to the set.
    pub fn contains_digits(&self, digits: &[u64], base: &BaseSeq) -> bool {
        match self {
            WindowSet::Empty => false,
            WindowSet::Box { coords } => coords.iter().enumerate().all(|(i, c)| match c {
                None => true,
                Some(set) => digits.get(i).is_some_and(|d| set.contains(d)),
            }),
            WindowSet::Block { lo, width, cells } => {
                let mut cell = 0u64;
                let mut scale = 1u64;
                for offset in 0..*width {
                    let d = digits.get(lo + offset).copied().unwrap_or(0);
                    cell += d * scale;
                    scale *= base.alpha(lo + offset);
                }
                cells.contains(&cell)
            }
        }
    }
}

fn range_size(base: &BaseSeq, lo: usize, hi: usize) -> Result<u64> {
    let mut size: u128 = 1;
    for i in lo..=hi {
        size = size.saturating_mul(base.alpha(i) as u128);
        if size > u64::MAX as u128 {
            return Err(Error::SizeLimit {
                needed: format!("product of α over [{lo}..{hi}]"),
                cap: u64::MAX,
            });
        }
    }
    Ok(size as u64)
}

fn cell_digits(base: &BaseSeq, lo: usize, hi: usize, cell: u64) -> Vec<u64> {
    let mut rest = cell;
    (lo..=hi)
        .map(|i| {
            let a = base.alpha(i);
            let d = rest % a;
            rest /= a;
            d
        })
        .collect()
}

fn cell_mass(family: &MeasureFamily, lo: usize, hi: usize, cell: u64) -> Rational {
    let digits = cell_digits(family.base(), lo, hi, cell);
    digits
        .iter()
        .enumerate()
        .map(|(off, &d)| family.coordinate(lo + off).mass(d))
        .product()
}

/// `μ(S)`: product of coordinate sums for boxes, sum of cell products for
/// blocks.
pub fn set_measure(family: &MeasureFamily, set: &WindowSet) -> Rational {
    match set {
        WindowSet::Empty => Rational::zero(),
        WindowSet::Box { coords } => coords
            .iter()
            .enumerate()
            .map(|(i, c)| match c {
                None => Rational::one(),
                Some(digits) => {
                    let m = family.coordinate(i);
                    digits.iter().map(|&d| m.mass(d)).sum()
                }
            })
            .product(),
        WindowSet::Block { lo, width, cells } => cells
            .iter()
            .map(|&c| cell_mass(family, *lo, lo + width - 1, c))
            .sum(),
    }
}

/// Materialize a set as explicit cells over the coordinate range `[lo..hi]`.
/// Constraints outside the range are ignored (this is what projection needs);
/// callers that must not lose constraints check the span first.
fn materialize_cells(
    set: &WindowSet,
    lo: usize,
    hi: usize,
    base: &BaseSeq,
    cap: u64,
) -> Result<Vec<u64>> {
    let size = range_size(base, lo, hi)?;
    if size > cap {
        return Err(Error::SizeLimit {
            needed: size.to_string(),
            cap,
        });
    }
    match set {
        WindowSet::Empty => Ok(Vec::new()),
        WindowSet::Box { .. } => {
            // Product expansion, least significant coordinate first.
            let mut cells: Vec<u64> = vec![0];
            let mut scale = 1u64;
            for i in lo..=hi {
                let alpha = base.alpha(i);
                let allowed: Vec<u64> = match set.box_digits(i) {
                    Some(s) => s.iter().copied().collect(),
                    None => (0..alpha).collect(),
                };
                let mut next = Vec::with_capacity(cells.len() * allowed.len());
                for &d in &allowed {
                    for &c in &cells {
                        next.push(c + d * scale);
                    }
                }
                cells = next;
                scale *= alpha;
            }
            cells.sort_unstable();
            Ok(cells)
        }
        WindowSet::Block {
            lo: blo,
            width,
            cells,
        } => {
            let bhi = blo + width - 1;
            // Project the block cells onto the overlap, then pad the rest of
            // the range with free digits.
            let overlap_lo = lo.max(*blo);
            let overlap_hi = hi.min(bhi);
            if overlap_lo > overlap_hi {
                return materialize_cells(&WindowSet::full(), lo, hi, base, cap);
            }
            let mut projected: BTreeSet<Vec<u64>> = BTreeSet::new();
            for &c in cells {
                let digits = cell_digits(base, *blo, bhi, c);
                projected.insert(digits[overlap_lo - blo..=overlap_hi - blo].to_vec());
            }
            let mut out: Vec<u64> = vec![0];
            let mut scale = 1u64;
            let mut pattern_scale = Vec::new();
            for i in lo..=hi {
                if i >= overlap_lo && i <= overlap_hi {
                    pattern_scale.push((i, scale));
                    scale *= base.alpha(i);
                } else {
                    let alpha = base.alpha(i);
                    let mut next = Vec::with_capacity(out.len() * alpha as usize);
                    for d in 0..alpha {
                        for &c in &out {
                            next.push(c + d * scale);
                        }
                    }
                    out = next;
                    scale *= alpha;
                }
            }
            let mut cells_out = Vec::with_capacity(out.len() * projected.len());
            for pattern in &projected {
                let offset: u64 = pattern
                    .iter()
                    .zip(&pattern_scale)
                    .map(|(&d, &(_, s))| d * s)
                    .sum();
                for &c in &out {
                    cells_out.push(c + offset);
                }
            }
            cells_out.sort_unstable();
            Ok(cells_out)
        }
    }
}

/// Projection `p_{i,j}(S)` as a block over `[i..j]`.
pub fn project(
    base: &BaseSeq,
    set: &WindowSet,
    i: usize,
    j: usize,
    limits: &Limits,
) -> Result<WindowSet> {
    if set.is_empty_set() {
        return Ok(WindowSet::Empty);
    }
    let cells = materialize_cells(set, i, j, base, limits.size_cap)?;
    WindowSet::block(i, j - i + 1, cells.into_iter().collect(), base)
}

/// Complement of `S` inside its constrained span, as a block. The complement
/// of a window set constrains exactly the same coordinates.
pub fn complement_within_span(
    base: &BaseSeq,
    set: &WindowSet,
    limits: &Limits,
) -> Result<WindowSet> {
    let Some(hi) = set.last_constrained() else {
        return Ok(match set {
            WindowSet::Empty => WindowSet::full(),
            _ => WindowSet::Empty,
        });
    };
    let lo = match set {
        WindowSet::Box { coords } => coords.iter().position(|c| c.is_some()).unwrap(),
        WindowSet::Block { lo, .. } => *lo,
        WindowSet::Empty => unreachable!(),
    };
    let inside: BTreeSet<u64> = materialize_cells(set, lo, hi, base, limits.size_cap)?
        .into_iter()
        .collect();
    let size = range_size(base, lo, hi)?;
    let complement: BTreeSet<u64> = (0..size).filter(|c| !inside.contains(c)).collect();
    WindowSet::block(lo, hi - lo + 1, complement, base)
}

// ---------------------------------------------------------------------------
// Carry-state dynamic program
// ---------------------------------------------------------------------------

/// One class of digits behaving identically in a transition: `count` choices,
/// each of preimage mass `pre` and image mass `img`, same outgoing carry.
struct Step {
    count: u64,
    pre: Rational,
    img: Rational,
    carry: bool,
}

/// Accumulation scheme for the traversal.
trait DpMode {
    type Value: Clone;
    fn start() -> Self::Value;
    fn dead() -> Self::Value;
    fn is_dead(v: &Self::Value) -> bool;
    fn merge(a: Self::Value, b: Self::Value) -> Self::Value;
    fn extend(v: &Self::Value, step: &Step) -> Self::Value;
}

/// Σ over paths of the product of image masses (the measure lives on the
/// image side of the intersection).
struct SumImage;
impl DpMode for SumImage {
    type Value = Rational;
    fn start() -> Rational {
        Rational::one()
    }
    fn dead() -> Rational {
        Rational::zero()
    }
    fn is_dead(v: &Rational) -> bool {
        v.is_zero()
    }
    fn merge(a: Rational, b: Rational) -> Rational {
        a + b
    }
    fn extend(v: &Rational, step: &Step) -> Rational {
        v * &step.img * Rational::from_integer(step.count.into())
    }
}

/// max over paths of ∏ pre/img — the window operator-norm ratio.
struct MaxPreOverImage;
impl DpMode for MaxPreOverImage {
    type Value = Option<Rational>;
    fn start() -> Self::Value {
        Some(Rational::one())
    }
    fn dead() -> Self::Value {
        None
    }
    fn is_dead(v: &Self::Value) -> bool {
        v.is_none()
    }
    fn merge(a: Self::Value, b: Self::Value) -> Self::Value {
        match (a, b) {
            (Some(x), Some(y)) => Some(x.max(y)),
            (x, None) => x,
            (None, y) => y,
        }
    }
    fn extend(v: &Self::Value, step: &Step) -> Self::Value {
        v.as_ref().map(|x| x * &step.pre / &step.img)
    }
}

/// min over paths of ∏ img/pre — the best Condition (*) constant on the
/// window.
struct MinImageOverPre;
impl DpMode for MinImageOverPre {
    type Value = Option<Rational>;
    fn start() -> Self::Value {
        Some(Rational::one())
    }
    fn dead() -> Self::Value {
        None
    }
    fn is_dead(v: &Self::Value) -> bool {
        v.is_none()
    }
    fn merge(a: Self::Value, b: Self::Value) -> Self::Value {
        match (a, b) {
            (Some(x), Some(y)) => Some(x.min(y)),
            (x, None) => x,
            (None, y) => y,
        }
    }
    fn extend(v: &Self::Value, step: &Step) -> Self::Value {
        v.as_ref().map(|x| x * &step.img / &step.pre)
    }
}

/// Does any path exist at all? With strictly positive masses this is exactly
/// non-emptiness of `f^k(S) ∩ T` on the window.
struct Reach;
impl DpMode for Reach {
    type Value = bool;
    fn start() -> bool {
        true
    }
    fn dead() -> bool {
        false
    }
    fn is_dead(v: &bool) -> bool {
        !v
    }
    fn merge(a: bool, b: bool) -> bool {
        a || b
    }
    fn extend(v: &bool, step: &Step) -> bool {
        *v && step.count > 0
    }
}

/// `(lo, hi, preimage cells, image cells)` for a materialized range.
type RangeSpec = (usize, usize, Option<Vec<u64>>, Option<Vec<u64>>);

enum Segment {
    Single(usize),
    Range {
        lo: usize,
        hi: usize,
        /// Preimage-side cells, when that side is a block here.
        s_cells: Option<Vec<u64>>,
        /// Image-side cells, when that side is a block here.
        t_cells: Option<Vec<u64>>,
    },
}

/// The pair query `(S, T, k)` compiled into ordered segments.
struct PairDp<'a> {
    family: &'a MeasureFamily,
    s: &'a WindowSet,
    t: &'a WindowSet,
    k_digits: Vec<u64>,
    segments: Vec<Segment>,
}

impl<'a> PairDp<'a> {
    /// `window_hint` forces the traversal to cover at least `0..=hint`
    /// (operator-norm queries quantify over a caller-chosen window).
    fn build(
        family: &'a MeasureFamily,
        s: &'a WindowSet,
        t: &'a WindowSet,
        k: &Natural,
        window_hint: Option<usize>,
        limits: &Limits,
    ) -> Result<Self> {
        let base = family.base();
        let mut end = s
            .last_constrained()
            .into_iter()
            .chain(t.last_constrained())
            .chain(window_hint)
            .max()
            .unwrap_or(0);
        end = end.max(base.window_for(k));
        let k_digits = base.digits(k, end)?;

        let mut segments = Vec::new();
        let mut ranges: Vec<RangeSpec> = Vec::new();
        match (s.block_range(), t.block_range()) {
            (Some((slo, shi)), Some((tlo, thi))) if slo.max(tlo) <= shi.min(thi) => {
                // Overlapping blocks merge into one materialized range.
                let lo = slo.min(tlo);
                let hi = shi.max(thi);
                ranges.push((
                    lo,
                    hi,
                    Some(materialize_cells(s, lo, hi, base, limits.size_cap)?),
                    Some(materialize_cells(t, lo, hi, base, limits.size_cap)?),
                ));
            }
            (srange, trange) => {
                if let Some((lo, hi)) = srange {
                    ranges.push((
                        lo,
                        hi,
                        Some(materialize_cells(s, lo, hi, base, limits.size_cap)?),
                        None,
                    ));
                }
                if let Some((lo, hi)) = trange {
                    ranges.push((
                        lo,
                        hi,
                        None,
                        Some(materialize_cells(t, lo, hi, base, limits.size_cap)?),
                    ));
                }
                ranges.sort_by_key(|r| r.0);
            }
        }
        let mut i = 0usize;
        let mut range_iter = ranges.into_iter().peekable();
        while i <= end {
            match range_iter.peek() {
                Some(&(lo, hi, _, _)) if lo == i => {
                    let (_, _, s_cells, t_cells) = range_iter.next().unwrap();
                    segments.push(Segment::Range {
                        lo,
                        hi,
                        s_cells,
                        t_cells,
                    });
                    i = hi + 1;
                }
                _ => {
                    segments.push(Segment::Single(i));
                    i += 1;
                }
            }
        }
        Ok(PairDp {
            family,
            s,
            t,
            k_digits,
            segments,
        })
    }

    fn run<M: DpMode>(&self) -> M::Value {
        let base = self.family.base();
        let mut cur = [M::start(), M::dead()];
        for segment in &self.segments {
            let mut next = [M::dead(), M::dead()];
            match segment {
                Segment::Single(i) => {
                    let measure = self.family.coordinate(*i);
                    let alpha = measure.alpha();
                    let k_i = self.k_digits.get(*i).copied().unwrap_or(0);
                    for (carry_in, current) in cur.iter().enumerate() {
                        if M::is_dead(current) {
                            continue;
                        }
                        let shift = k_i + carry_in as u64;
                        match (self.s.box_digits(*i), self.t.box_digits(*i)) {
                            (Some(s_set), t_set) => {
                                for &d in s_set {
                                    let raw = d + shift;
                                    let carry = raw >= alpha;
                                    let z = if carry { raw - alpha } else { raw };
                                    if t_set.is_some_and(|t| !t.contains(&z)) {
                                        continue;
                                    }
                                    let step = Step {
                                        count: 1,
                                        pre: measure.mass(d),
                                        img: measure.mass(z),
                                        carry,
                                    };
                                    let slot = usize::from(step.carry);
                                    next[slot] = M::merge(
                                        next[slot].clone(),
                                        M::extend(current, &step),
                                    );
                                }
                            }
                            (None, Some(t_set)) => {
                                for &z in t_set {
                                    // Unique preimage digit of z under +shift.
                                    let (d, carry) = if z >= shift {
                                        (z - shift, false)
                                    } else {
                                        (z + alpha - shift, true)
                                    };
                                    let step = Step {
                                        count: 1,
                                        pre: measure.mass(d),
                                        img: measure.mass(z),
                                        carry,
                                    };
                                    let slot = usize::from(carry);
                                    next[slot] = M::merge(
                                        next[slot].clone(),
                                        M::extend(current, &step),
                                    );
                                }
                            }
                            (None, None) => {
                                for class in measure.shift_classes(shift) {
                                    let step = Step {
                                        count: class.count,
                                        pre: class.pre,
                                        img: class.img,
                                        carry: class.carry,
                                    };
                                    let slot = usize::from(step.carry);
                                    next[slot] = M::merge(
                                        next[slot].clone(),
                                        M::extend(current, &step),
                                    );
                                }
                            }
                        }
                    }
                }
                Segment::Range {
                    lo,
                    hi,
                    s_cells,
                    t_cells,
                } => {
                    let size = range_size(base, *lo, *hi).expect("validated at build");
                    let k_seg: u64 = {
                        let mut acc: u128 = 0;
                        let mut scale: u128 = 1;
                        for i in *lo..=*hi {
                            acc += self.k_digits.get(i).copied().unwrap_or(0) as u128 * scale;
                            scale *= base.alpha(i) as u128;
                        }
                        acc as u64
                    };
                    for (carry_in, current) in cur.iter().enumerate() {
                        if M::is_dead(current) {
                            continue;
                        }
                        let shift = k_seg + carry_in as u64;
                        let mut emit = |pre_cell: u64, img_cell: u64, carry: bool| {
                            if let Some(sc) = s_cells {
                                if sc.binary_search(&pre_cell).is_err() {
                                    return;
                                }
                            } else if !self.preimage_box_allows(*lo, *hi, pre_cell) {
                                return;
                            }
                            if let Some(tc) = t_cells {
                                if tc.binary_search(&img_cell).is_err() {
                                    return;
                                }
                            } else if !self.image_box_allows(*lo, *hi, img_cell) {
                                return;
                            }
                            let step = Step {
                                count: 1,
                                pre: cell_mass(self.family, *lo, *hi, pre_cell),
                                img: cell_mass(self.family, *lo, *hi, img_cell),
                                carry,
                            };
                            let slot = usize::from(carry);
                            next[slot] =
                                M::merge(next[slot].clone(), M::extend(current, &step));
                        };
                        match (s_cells, t_cells) {
                            (Some(sc), _) => {
                                for &c in sc {
                                    let raw = c as u128 + shift as u128;
                                    let carry = raw >= size as u128;
                                    let img = (raw - if carry { size as u128 } else { 0 }) as u64;
                                    emit(c, img, carry);
                                }
                            }
                            (None, Some(tc)) => {
                                for &z in tc {
                                    let (c, carry) = if z >= shift {
                                        (z - shift, false)
                                    } else {
                                        (z + size - shift, true)
                                    };
                                    emit(c, z, carry);
                                }
                            }
                            (None, None) => unreachable!("ranges come from a block side"),
                        }
                    }
                }
            }
            cur = next;
        }
        M::merge(cur[0].clone(), cur[1].clone())
    }

    fn preimage_box_allows(&self, lo: usize, hi: usize, cell: u64) -> bool {
        box_allows(self.s, self.family.base(), lo, hi, cell)
    }

    fn image_box_allows(&self, lo: usize, hi: usize, cell: u64) -> bool {
        box_allows(self.t, self.family.base(), lo, hi, cell)
    }
}

fn box_allows(set: &WindowSet, base: &BaseSeq, lo: usize, hi: usize, cell: u64) -> bool {
    let digits = cell_digits(base, lo, hi, cell);
    digits.iter().enumerate().all(|(off, d)| {
        set.box_digits(lo + off)
            .map(|allowed| allowed.contains(d))
            .unwrap_or(true)
    })
}

/// `μ(f^k(S) ∩ T)`, exact. The traversal window automatically covers both
/// sets and all digits of `k`, so `f^k` is realized as `+k mod β` on the
/// window with the free tail mapped bijectively onto the free tail.
pub fn shifted_intersection_measure(
    family: &MeasureFamily,
    s: &WindowSet,
    t: &WindowSet,
    k: &Natural,
    limits: &Limits,
) -> Result<Rational> {
    if s.is_empty_set() || t.is_empty_set() {
        return Ok(Rational::zero());
    }
    let dp = PairDp::build(family, s, t, k, None, limits)?;
    Ok(dp.run::<SumImage>())
}

/// Whether `f^k(S) ∩ S = ∅`. Since all masses are positive and window sets
/// are unions of cells, emptiness coincides with measure zero.
pub fn disjoint_under(
    family: &MeasureFamily,
    s: &WindowSet,
    k: &Natural,
    limits: &Limits,
) -> Result<bool> {
    if s.is_empty_set() {
        return Ok(true);
    }
    let dp = PairDp::build(family, s, s, k, None, limits)?;
    Ok(!dp.run::<Reach>())
}

/// max over window cells `w` of `μ(cell_{w−k})/μ(cell_w)` over the window
/// `0..=window`; requires `k < β(window+1)`.
pub fn max_cell_ratio(
    family: &MeasureFamily,
    window: usize,
    k: &Natural,
    limits: &Limits,
) -> Result<Rational> {
    let beta = family.base().beta(window + 1);
    if *k >= beta {
        return Err(Error::WindowTooSmall {
            window,
            needed: format!("k = {k} needs β(J+1) > k, have {beta}"),
        });
    }
    let full = WindowSet::full();
    let dp = PairDp::build(family, &full, &full, k, Some(window), limits)?;
    Ok(dp.run::<MaxPreOverImage>().expect("full sets always reach"))
}

/// min over window cells `w` of `μ(cell_w)/μ(cell_{w−k})` over the window
/// `0..=window`; requires `k < β(window+1)`.
pub fn min_cell_ratio(
    family: &MeasureFamily,
    window: usize,
    k: &Natural,
    limits: &Limits,
) -> Result<Rational> {
    let beta = family.base().beta(window + 1);
    if *k >= beta {
        return Err(Error::WindowTooSmall {
            window,
            needed: format!("k = {k} needs β(J+1) > k, have {beta}"),
        });
    }
    let full = WindowSet::full();
    let dp = PairDp::build(family, &full, &full, k, Some(window), limits)?;
    Ok(dp.run::<MinImageOverPre>().expect("full sets always reach"))
}

/// `(μ(C(k,S,n,0)), μ(C(k,S,n,1)))`: the split of `S` by the carry arriving
/// at position `n` while computing `x + k`. The components sum to `μ(S)`.
pub fn carry_split_measure(
    family: &MeasureFamily,
    s: &WindowSet,
    k: &Natural,
    n: usize,
) -> Result<(Rational, Rational)> {
    if s.is_empty_set() {
        return Ok((Rational::zero(), Rational::zero()));
    }
    if n == 0 {
        // ε_0 = 0 by definition.
        return Ok((set_measure(family, s), Rational::zero()));
    }
    let base = family.base();
    // Only k mod β(n) can influence ε_n.
    let k_low = k % base.beta(n);
    let k_digits = base.digits(&k_low, n - 1)?;

    // Measure of the constraints at coordinates ≥ n (independent of the
    // carry unless a block straddles n, which is handled below).
    let straddling = s
        .block_range()
        .filter(|&(lo, hi)| lo < n && hi >= n);

    let mut cur = [Rational::one(), Rational::zero()];
    let mut i = 0usize;
    while i < n {
        if let Some((lo, hi)) = straddling {
            if i == lo {
                // Walk each cell digit-by-digit up to n−1, recording ε_n; the
                // cell's full mass (digits ≥ n included) comes along.
                let mut out = [Rational::zero(), Rational::zero()];
                let WindowSet::Block { cells, .. } = s else {
                    unreachable!()
                };
                for (carry_in, current) in cur.iter().enumerate() {
                    if current.is_zero() {
                        continue;
                    }
                    for &c in cells {
                        let digits = cell_digits(base, lo, hi, c);
                        let mut carry = carry_in == 1;
                        for (off, &d) in digits.iter().enumerate().take(n - lo) {
                            let coord = lo + off;
                            let raw = d + k_digits.get(coord).copied().unwrap_or(0)
                                + u64::from(carry);
                            carry = raw >= base.alpha(coord);
                        }
                        let slot = usize::from(carry);
                        out[slot] += current * cell_mass(family, lo, hi, c);
                    }
                }
                return Ok((out[0].clone(), out[1].clone()));
            }
        }
        match s.block_range() {
            Some((lo, hi)) if i == lo && hi < n => {
                // Entire block below n: integer addition over the range.
                let size = range_size(base, lo, hi)?;
                let k_seg: u64 = {
                    let mut acc: u128 = 0;
                    let mut scale: u128 = 1;
                    for c in lo..=hi {
                        acc += k_digits.get(c).copied().unwrap_or(0) as u128 * scale;
                        scale *= base.alpha(c) as u128;
                    }
                    acc as u64
                };
                let WindowSet::Block { cells, .. } = s else {
                    unreachable!()
                };
                let mut next = [Rational::zero(), Rational::zero()];
                for (carry_in, current) in cur.iter().enumerate() {
                    if current.is_zero() {
                        continue;
                    }
                    let shift = k_seg + carry_in as u64;
                    for &c in cells {
                        let carry = (c as u128 + shift as u128) >= size as u128;
                        let slot = usize::from(carry);
                        next[slot] += current * cell_mass(family, lo, hi, c);
                    }
                }
                cur = next;
                i = hi + 1;
            }
            _ => {
                let measure = family.coordinate(i);
                let alpha = measure.alpha();
                let k_i = k_digits.get(i).copied().unwrap_or(0);
                let mut next = [Rational::zero(), Rational::zero()];
                for (carry_in, current) in cur.iter().enumerate() {
                    if current.is_zero() {
                        continue;
                    }
                    let shift = k_i + carry_in as u64;
                    match s.box_digits(i) {
                        Some(set) => {
                            for &d in set {
                                let carry = d + shift >= alpha;
                                let slot = usize::from(carry);
                                next[slot] += current * measure.mass(d);
                            }
                        }
                        None => {
                            for class in measure.shift_classes(shift) {
                                let slot = usize::from(class.carry);
                                next[slot] += current
                                    * class.pre
                                    * Rational::from_integer(class.count.into());
                            }
                        }
                    }
                }
                cur = next;
                i += 1;
            }
        }
    }

    // Remaining constraints at coordinates ≥ n scale both components.
    let tail_factor = match s {
        WindowSet::Box { coords } => coords
            .iter()
            .enumerate()
            .skip(n)
            .map(|(c, digits)| match digits {
                None => Rational::one(),
                Some(set) => {
                    let m = family.coordinate(c);
                    set.iter().map(|&d| m.mass(d)).sum()
                }
            })
            .product(),
        WindowSet::Block { lo, .. } if *lo >= n => set_measure(family, s),
        _ => Rational::one(),
    };
    Ok((&cur[0] * &tail_factor, &cur[1] * &tail_factor))
}
