//! Verdicts with cited rule chains plus finite-horizon evidence.
//!
//! Finite horizons cannot decide limits, so certification and numeric
//! evidence are kept strictly apart: a `CertifiedYes`/`CertifiedNo` entry is
//! derived only from declared asymptotics together with the rule licensing
//! the conclusion, while horizon trends can at most produce an
//! `EvidenceLeaning` entry, always labeled non-conclusive.
//!
//! Rules applied (conditions stated on the declared facts):
//!
//! * `rho-necessary` — `limsup ρ_n = ∞` is necessary for transitivity, so a
//!   declared bounded ρ certifies NOT transitive (hence NOT mixing).
//! * `eta-pair-route` — `lim η_i = 1` forces mixing (pairs `η_j η_{j+1}` get
//!   arbitrarily close to 1, yielding the required disjoint sets).
//! * `eta-characterization-bounded` — with bounded α, mixing holds iff
//!   `lim η_i = 1`; the "only if" side certifies NOT mixing when a limit
//!   value < 1 is declared.
//! * `eta-gap-necessary` — mixing forces `lim (1−η_i)/α_i = 0`.
//! * `two-digit-floor` — infinitely many coordinates carrying two digits of
//!   mass ≥ c > 0 obstruct mixing.
//! * `psi-characterization` — transitivity holds iff `limsup ψ_{i,j} = 1`.
//! * `eta-limsup-sufficient` — `limsup η_i = 1` suffices for transitivity.

use crate::measure::{DeclaredFact, MeasureFamily};
use crate::shift::{psi_range, psi_single, PsiOutcome};
use crate::{Error, Limits, Rational, Result};
use num_traits::{One, Signed, Zero};

/// Classification certainty for one dynamical property.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Certainty {
    CertifiedYes,
    CertifiedNo,
    /// Horizon data leans toward "yes" but certifies nothing.
    EvidenceLeaning,
    Unknown,
}

/// How continuity of the operator was established.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ContinuityStatus {
    /// Condition (◇) declared by the family construction or the user.
    Declared,
    /// Only the finite-horizon minimum (necessarily positive) was inspected.
    FiniteEvidenceOnly,
}

/// One rule application, for the report.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleFired {
    pub rule: &'static str,
    pub condition: &'static str,
    pub inputs: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct EvidenceRow {
    pub i: usize,
    pub alpha: u64,
    pub eta: Rational,
    pub delta: Rational,
    /// `(1 − η_i)/α_i`.
    pub eta_gap_over_alpha: Rational,
    pub lambda0: Rational,
    pub rho: Rational,
    /// Running Condition (◇) minimum over `1 ≤ l ≤ i`.
    pub diamond_running: Option<Rational>,
    /// `ψ_i`; omitted (and flagged) when α_i exceeds the sampling cap.
    pub psi: Option<PsiOutcome>,
}

#[derive(Debug, Clone)]
pub struct PsiPairSample {
    pub i: usize,
    pub j: usize,
    pub outcome: PsiOutcome,
}

#[derive(Debug, Clone)]
pub struct EvidenceTable {
    pub rows: Vec<EvidenceRow>,
    /// Sampled ψ over consecutive coordinate pairs within the size cap.
    pub psi_pairs: Vec<PsiPairSample>,
    /// Coordinates whose ψ entry was omitted for size.
    pub omitted_psi: Vec<usize>,
    pub nonatomic_product: Rational,
}

impl EvidenceTable {
    /// Largest ψ value seen anywhere in the table.
    pub fn max_psi(&self) -> Option<Rational> {
        self.rows
            .iter()
            .filter_map(|r| r.psi.as_ref().map(|p| p.value.clone()))
            .chain(self.psi_pairs.iter().map(|p| p.outcome.value.clone()))
            .max()
    }
}

/// Verdict for both dynamical properties, with the rules that fired.
#[derive(Debug, Clone)]
pub struct Verdict {
    pub mixing: Certainty,
    pub transitive: Certainty,
    pub continuity: ContinuityStatus,
    pub rules_fired: Vec<RuleFired>,
    pub evidence: EvidenceTable,
}

/// Thresholds for the non-conclusive evidence-leaning flags; these are
/// report knobs, not semantics.
#[derive(Debug, Clone)]
pub struct LeaningThresholds {
    /// η counts as "near 1" when `η ≥ 1 − eta_margin` over the last quarter
    /// of the horizon.
    pub eta_margin: Rational,
    /// ψ counts as "near 1" when some sampled value is `≥ 1 − psi_margin`.
    pub psi_margin: Rational,
}

impl Default for LeaningThresholds {
    fn default() -> Self {
        LeaningThresholds {
            eta_margin: crate::rational_ratio(1, 100),
            psi_margin: crate::rational_ratio(1, 100),
        }
    }
}

/// Fully populated per-coordinate table up to the horizon.
pub fn evidence(family: &MeasureFamily, horizon: usize, limits: &Limits) -> EvidenceTable {
    assert!(horizon >= 1);
    let mut rows = Vec::with_capacity(horizon + 1);
    let mut omitted = Vec::new();
    let mut rho = Rational::one();
    let mut lambda_prefix = Rational::one();
    let mut diamond: Option<Rational> = None;
    for i in 0..=horizon {
        let coord = family.coordinate(i);
        let alpha = coord.alpha();
        let (eta, delta) = (coord.eta(), coord.delta());
        rho *= &eta / &delta;
        let lambda0 = coord.lambda(0);
        if i >= 1 {
            let (min_lambda, _) = coord.min_lambda();
            let candidate = min_lambda * &lambda_prefix;
            diamond = Some(match diamond.take() {
                None => candidate,
                Some(d) => d.min(candidate),
            });
        }
        lambda_prefix *= &lambda0;
        let psi = if alpha <= limits.psi_sample_cap {
            let sample_limits = Limits {
                size_cap: limits.psi_sample_cap,
                ..*limits
            };
            psi_single(family, i, &sample_limits).ok()
        } else {
            None
        };
        if psi.is_none() {
            omitted.push(i);
        }
        let eta_gap_over_alpha =
            (Rational::one() - &eta) / Rational::from_integer(alpha.into());
        rows.push(EvidenceRow {
            i,
            alpha,
            eta,
            delta,
            eta_gap_over_alpha,
            lambda0,
            rho: rho.clone(),
            diamond_running: diamond.clone(),
            psi,
        });
    }
    let mut psi_pairs = Vec::new();
    for i in 0..horizon {
        let size = family.base().alpha_checked(i).zip(family.base().alpha_checked(i + 1));
        let fits = size.is_some_and(|(a, b)| a.checked_mul(b).is_some_and(|n| n <= limits.psi_sample_cap));
        if fits {
            let sample_limits = Limits {
                size_cap: limits.psi_sample_cap,
                ..*limits
            };
            if let Ok(outcome) = psi_range(family, i, i + 1, None, &sample_limits) {
                psi_pairs.push(PsiPairSample {
                    i,
                    j: i + 1,
                    outcome,
                });
            }
        }
    }
    EvidenceTable {
        rows,
        psi_pairs,
        omitted_psi: omitted,
        nonatomic_product: family.nonatomic_product(horizon),
    }
}

fn declared_eta_limit(family: &MeasureFamily) -> Option<Rational> {
    family
        .find_declaration(|f| matches!(f, DeclaredFact::EtaLimit(_)))
        .map(|d| match &d.fact {
            DeclaredFact::EtaLimit(v) => v.clone(),
            _ => unreachable!(),
        })
}

fn declared_eta_limsup(family: &MeasureFamily) -> Option<Rational> {
    family
        .find_declaration(|f| matches!(f, DeclaredFact::EtaLimsup(_)))
        .map(|d| match &d.fact {
            DeclaredFact::EtaLimsup(v) => v.clone(),
            _ => unreachable!(),
        })
}

fn declared_eta_gap_limit(family: &MeasureFamily) -> Option<Rational> {
    family
        .find_declaration(|f| matches!(f, DeclaredFact::EtaGapOverAlphaLimit(_)))
        .map(|d| match &d.fact {
            DeclaredFact::EtaGapOverAlphaLimit(v) => v.clone(),
            _ => unreachable!(),
        })
}

fn declared_floor(family: &MeasureFamily) -> Option<Rational> {
    family
        .find_declaration(|f| matches!(f, DeclaredFact::TwoDigitMassFloor(_)))
        .map(|d| match &d.fact {
            DeclaredFact::TwoDigitMassFloor(v) => v.clone(),
            _ => unreachable!(),
        })
}

/// Reject mutually contradictory declarations before any rule fires.
fn check_declaration_consistency(family: &MeasureFamily) -> Result<()> {
    let one = Rational::one();
    let eta_limit = declared_eta_limit(family);
    let eta_limsup = declared_eta_limsup(family);
    let gap_limit = declared_eta_gap_limit(family);
    let floor = declared_floor(family);
    let rho_bounded = family.declares(&DeclaredFact::RhoBounded);
    let rho_unbounded = family.declares(&DeclaredFact::RhoUnbounded);
    let psi_one = family.declares(&DeclaredFact::PsiLimsupOne);

    if rho_bounded && rho_unbounded {
        return Err(Error::InconsistentDeclarations(
            "ρ declared both bounded and unbounded".into(),
        ));
    }
    if let (Some(l), Some(s)) = (&eta_limit, &eta_limsup) {
        if l != s {
            return Err(Error::InconsistentDeclarations(format!(
                "lim η = {l} but limsup η = {s}; a convergent sequence has limsup = lim"
            )));
        }
    }
    if let Some(v) = &eta_limit {
        if *v > one || (eta_limsup.as_ref().is_some_and(|s| s < v)) {
            return Err(Error::InconsistentDeclarations(format!(
                "lim η = {v} is not a probability-mass limit"
            )));
        }
    }
    let transitive_declared = psi_one
        || eta_limsup.as_ref() == Some(&one)
        || eta_limit.as_ref() == Some(&one);
    if rho_bounded && transitive_declared {
        return Err(Error::InconsistentDeclarations(
            "bounded ρ excludes transitivity, but a declaration forces it".into(),
        ));
    }
    if eta_limit.as_ref() == Some(&one) {
        if let Some(g) = &gap_limit {
            if !g.is_zero() {
                return Err(Error::InconsistentDeclarations(format!(
                    "lim η = 1 forces lim (1−η)/α = 0, but {g} was declared"
                )));
            }
        }
        if let Some(f) = &floor {
            if f.is_positive() {
                return Err(Error::InconsistentDeclarations(
                    "lim η = 1 leaves no room for a second digit of fixed positive mass".into(),
                ));
            }
        }
    }
    if let Some(f) = &floor {
        if !f.is_positive() || f > &crate::rational_ratio(1, 2) {
            return Err(Error::InconsistentDeclarations(format!(
                "two-digit mass floor {f} is outside (0, 1/2]"
            )));
        }
    }
    Ok(())
}

/// Apply the characterization rules to the declarations, fall back to
/// horizon-trend leanings.
pub fn classify(
    family: &MeasureFamily,
    horizon: usize,
    limits: &Limits,
    thresholds: &LeaningThresholds,
) -> Result<Verdict> {
    check_declaration_consistency(family)?;
    let table = evidence(family, horizon, limits);
    let mut rules = Vec::new();
    let one = Rational::one();

    let continuity = if family.declares(&DeclaredFact::DiamondHolds) {
        ContinuityStatus::Declared
    } else {
        ContinuityStatus::FiniteEvidenceOnly
    };
    let diamond = family.diamond_inf(horizon);
    rules.push(RuleFired {
        rule: "diamond-continuity",
        condition: "0 < inf λ_l(j)·∏_{i<l} λ_i(0)",
        inputs: vec![
            format!(
                "finite minimum {} at (l = {}, j = {})",
                diamond.value, diamond.at_l, diamond.at_j
            ),
            match continuity {
                ContinuityStatus::Declared => "declared by the family".into(),
                ContinuityStatus::FiniteEvidenceOnly => {
                    "no declaration; finite evidence only".into()
                }
            },
        ],
    });

    let eta_limit = declared_eta_limit(family);
    let eta_limsup = declared_eta_limsup(family);
    let gap_limit = declared_eta_gap_limit(family);
    let floor = declared_floor(family);
    let rho_bounded = family.declares(&DeclaredFact::RhoBounded);
    let psi_one = family.declares(&DeclaredFact::PsiLimsupOne);
    let alpha_bounded = family.declares(&DeclaredFact::AlphaBounded);

    // --- transitivity ---
    let mut transitive = Certainty::Unknown;
    if rho_bounded {
        transitive = Certainty::CertifiedNo;
        rules.push(RuleFired {
            rule: "rho-necessary",
            condition: "limsup ρ_n = ∞ is necessary for transitivity",
            inputs: vec![format!("declared ρ bounded; ρ_{horizon} = {}", table.rows[horizon].rho)],
        });
    } else if eta_limit.as_ref() == Some(&one) || eta_limsup.as_ref() == Some(&one) {
        transitive = Certainty::CertifiedYes;
        rules.push(RuleFired {
            rule: "eta-limsup-sufficient",
            condition: "limsup η_i = 1 implies transitivity",
            inputs: vec![if eta_limit.as_ref() == Some(&one) {
                "declared lim η = 1".into()
            } else {
                "declared limsup η = 1".into()
            }],
        });
    } else if psi_one {
        transitive = Certainty::CertifiedYes;
        rules.push(RuleFired {
            rule: "psi-characterization",
            condition: "transitivity holds iff limsup ψ_{i,j} = 1",
            inputs: vec!["declared limsup ψ = 1".into()],
        });
    }

    // --- mixing ---
    let mut mixing = Certainty::Unknown;
    if eta_limit.as_ref() == Some(&one) {
        mixing = Certainty::CertifiedYes;
        rules.push(RuleFired {
            rule: "eta-pair-route",
            condition: "lim η_i = 1 implies mixing (η_j η_{j+1} > 1 − ε eventually)",
            inputs: vec!["declared lim η = 1".into()],
        });
    } else if transitive == Certainty::CertifiedNo {
        mixing = Certainty::CertifiedNo;
        rules.push(RuleFired {
            rule: "mixing-implies-transitive",
            condition: "mixing implies transitivity",
            inputs: vec!["transitivity certified impossible".into()],
        });
    } else if let Some(f) = &floor {
        mixing = Certainty::CertifiedNo;
        rules.push(RuleFired {
            rule: "two-digit-floor",
            condition: "two digits of mass ≥ c on infinitely many coordinates obstruct mixing",
            inputs: vec![format!("declared floor c = {f}")],
        });
    } else if gap_limit.as_ref().is_some_and(|g| !g.is_zero()) {
        mixing = Certainty::CertifiedNo;
        rules.push(RuleFired {
            rule: "eta-gap-necessary",
            condition: "mixing implies lim (1 − η_i)/α_i = 0",
            inputs: vec![format!(
                "declared lim (1 − η)/α = {}",
                gap_limit.as_ref().unwrap()
            )],
        });
    } else if alpha_bounded && eta_limit.as_ref().is_some_and(|v| v < &one) {
        mixing = Certainty::CertifiedNo;
        rules.push(RuleFired {
            rule: "eta-characterization-bounded",
            condition: "with bounded α, mixing holds iff lim η_i = 1",
            inputs: vec![format!(
                "declared α bounded and lim η = {} < 1",
                eta_limit.as_ref().unwrap()
            )],
        });
    } else if alpha_bounded && eta_limsup.as_ref().is_some_and(|v| v < &one) {
        mixing = Certainty::CertifiedNo;
        rules.push(RuleFired {
            rule: "eta-characterization-bounded",
            condition: "with bounded α, mixing holds iff lim η_i = 1",
            inputs: vec![format!(
                "declared α bounded and limsup η = {} < 1",
                eta_limsup.as_ref().unwrap()
            )],
        });
    }

    // --- evidence-leaning fallbacks, never conclusive ---
    if mixing == Certainty::Unknown {
        let quarter = (horizon * 3) / 4;
        let near_one = table.rows[quarter..]
            .iter()
            .all(|r| r.eta >= &one - &thresholds.eta_margin);
        if near_one {
            mixing = Certainty::EvidenceLeaning;
            rules.push(RuleFired {
                rule: "eta-trend",
                condition: "η stayed within the margin of 1 over the last quarter horizon",
                inputs: vec![format!("η_{horizon} = {}", table.rows[horizon].eta)],
            });
        }
    }
    if transitive == Certainty::Unknown {
        let psi_near_one = table
            .max_psi()
            .is_some_and(|p| p >= &one - &thresholds.psi_margin);
        if psi_near_one {
            transitive = Certainty::EvidenceLeaning;
            rules.push(RuleFired {
                rule: "psi-trend",
                condition: "a sampled ψ value came within the margin of 1",
                inputs: vec![format!("max sampled ψ = {}", table.max_psi().unwrap())],
            });
        }
    }
    if mixing == Certainty::CertifiedYes && transitive != Certainty::CertifiedYes {
        transitive = Certainty::CertifiedYes;
        rules.push(RuleFired {
            rule: "mixing-implies-transitive",
            condition: "mixing implies transitivity",
            inputs: vec!["mixing certified".into()],
        });
    }
    debug_assert!(
        !(mixing == Certainty::CertifiedYes && transitive == Certainty::CertifiedNo),
        "rule soundness: mixing forces transitivity"
    );

    Ok(Verdict {
        mixing,
        transitive,
        continuity,
        rules_fired: rules,
        evidence: table,
    })
}

/// A declared asymptotic contradicted by the exact horizon data.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConsistencyWarning {
    pub about: String,
    pub detail: String,
}

/// Flag declared asymptotics that the exact horizon data visibly contradicts.
/// Heuristic by nature; warnings never upgrade or downgrade certifications.
pub fn consistency_check(
    family: &MeasureFamily,
    horizon: usize,
    limits: &Limits,
) -> Vec<ConsistencyWarning> {
    let table = evidence(family, horizon, limits);
    let mut warnings = Vec::new();
    let half = horizon / 2;
    let eta_at = |i: usize| table.rows[i].eta.clone();

    if let Some(v) = declared_eta_limit(family) {
        let d_half = (eta_at(half) - &v).abs();
        let d_end = (eta_at(horizon) - &v).abs();
        if d_end >= d_half && !d_end.is_zero() {
            warnings.push(ConsistencyWarning {
                about: format!("lim η = {v}"),
                detail: format!(
                    "η is not approaching the declared limit: |η_{half} − v| = {d_half}, |η_{horizon} − v| = {d_end}"
                ),
            });
        }
    }
    if declared_eta_limsup(family).is_some_and(|v| v.is_one()) {
        let first_max = table.rows[..=half].iter().map(|r| r.eta.clone()).max();
        let second_max = table.rows.iter().map(|r| r.eta.clone()).max();
        if let (Some(a), Some(b)) = (first_max, second_max) {
            if b <= a && !b.is_one() {
                warnings.push(ConsistencyWarning {
                    about: "limsup η = 1".into(),
                    detail: format!("max η did not grow past the half horizon (stuck at {b})"),
                });
            }
        }
    }
    if family.declares(&DeclaredFact::RhoBounded) {
        let ratio = &table.rows[horizon].rho / &table.rows[half].rho;
        if ratio >= crate::rational_int(2) {
            warnings.push(ConsistencyWarning {
                about: "ρ bounded".into(),
                detail: format!(
                    "ρ more than doubled over the second half horizon (ρ_{half} = {}, ρ_{horizon} = {})",
                    table.rows[half].rho, table.rows[horizon].rho
                ),
            });
        }
    }
    if let Some(f) = declared_floor(family) {
        let late_support = (half..=horizon).any(|i| {
            let c = family.coordinate(i);
            let a = c.argmax_digit();
            match c.second_argmax_digit() {
                Some(b) => c.mass(a).min(c.mass(b)) >= f,
                None => false,
            }
        });
        if !late_support {
            warnings.push(ConsistencyWarning {
                about: format!("two-digit mass floor {f}"),
                detail: format!("no coordinate in [{half}..{horizon}] carries two digits of mass ≥ {f}"),
            });
        }
    }
    if family.declares(&DeclaredFact::AlphaBounded) && !family.base().is_bounded() {
        warnings.push(ConsistencyWarning {
            about: "α bounded".into(),
            detail: "the base rule is unbounded".into(),
        });
    }
    warnings
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::BaseSeq;
    use crate::measure::MeasureFamily;
    use crate::{rational_int, rational_ratio};

    fn limits() -> Limits {
        Limits::default()
    }

    fn thresholds() -> LeaningThresholds {
        LeaningThresholds::default()
    }

    #[test]
    fn evidence_uniform_base2() {
        let f = MeasureFamily::uniform(BaseSeq::constant(2).unwrap());
        let t = evidence(&f, 4, &limits());
        for row in &t.rows {
            assert_eq!(row.eta, rational_ratio(1, 2));
            assert_eq!(row.rho, rational_int(1));
            assert_eq!(row.psi.as_ref().unwrap().value, rational_ratio(1, 2));
        }
        assert!(t.omitted_psi.is_empty());
    }

    #[test]
    fn evidence_thm32_etas() {
        let f = MeasureFamily::thm32(BaseSeq::constant(2).unwrap());
        let t = evidence(&f, 3, &limits());
        let etas: Vec<Rational> = t.rows.iter().map(|r| r.eta.clone()).collect();
        assert_eq!(
            etas,
            vec![
                rational_ratio(2, 3),
                rational_ratio(4, 5),
                rational_ratio(8, 9),
                rational_ratio(16, 17)
            ]
        );
    }

    #[test]
    fn evidence_ex33_etas() {
        let f = MeasureFamily::ex33(BaseSeq::power_of_two(2).unwrap()).unwrap();
        let t = evidence(&f, 2, &limits());
        let etas: Vec<Rational> = t.rows.iter().map(|r| r.eta.clone()).collect();
        assert_eq!(
            etas,
            vec![
                rational_ratio(3, 4),
                rational_ratio(7, 16),
                rational_ratio(5, 16)
            ]
        );
    }

    #[test]
    fn running_diamond_matches_direct_computation() {
        let families = [
            MeasureFamily::thm32(BaseSeq::constant(2).unwrap()),
            MeasureFamily::ex33(BaseSeq::power_of_two(2).unwrap()).unwrap(),
            MeasureFamily::thm36(BaseSeq::periodic(vec![], vec![2, 3]).unwrap()).unwrap(),
        ];
        for f in &families {
            let horizon = 10;
            let t = evidence(f, horizon, &limits());
            assert_eq!(
                t.rows[horizon].diamond_running.as_ref().unwrap(),
                &f.diamond_inf(horizon).value
            );
        }
    }

    #[test]
    fn evidence_omits_oversized_psi() {
        let f = MeasureFamily::ex33(BaseSeq::power_of_two(2).unwrap()).unwrap();
        let t = evidence(&f, 12, &limits());
        assert!(!t.omitted_psi.is_empty());
        assert!(t.rows[12].psi.is_none());
    }

    #[test]
    fn uniform_certified_not_transitive() {
        let f = MeasureFamily::uniform(BaseSeq::constant(2).unwrap());
        let v = classify(&f, 8, &limits(), &thresholds()).unwrap();
        assert_eq!(v.transitive, Certainty::CertifiedNo);
        assert_eq!(v.mixing, Certainty::CertifiedNo);
        assert!(v.rules_fired.iter().any(|r| r.rule == "rho-necessary"));
        assert_eq!(v.continuity, ContinuityStatus::Declared);
    }

    #[test]
    fn thm32_certified_mixing() {
        let f = MeasureFamily::thm32(BaseSeq::constant(2).unwrap());
        let v = classify(&f, 8, &limits(), &thresholds()).unwrap();
        assert_eq!(v.mixing, Certainty::CertifiedYes);
        assert_eq!(v.transitive, Certainty::CertifiedYes);
        assert!(v.rules_fired.iter().any(|r| r.rule == "eta-pair-route"));
    }

    #[test]
    fn thm37_transitive_not_mixing() {
        let f = MeasureFamily::thm37(BaseSeq::constant(4).unwrap()).unwrap();
        let v = classify(&f, 8, &limits(), &thresholds()).unwrap();
        assert_eq!(v.transitive, Certainty::CertifiedYes);
        assert_eq!(v.mixing, Certainty::CertifiedNo);
        assert!(v.rules_fired.iter().any(|r| r.rule == "psi-characterization"));
        assert!(v.rules_fired.iter().any(|r| r.rule == "two-digit-floor"));
    }

    #[test]
    fn thm36_transitive_not_mixing() {
        let f = MeasureFamily::thm36(BaseSeq::periodic(vec![], vec![2, 3]).unwrap()).unwrap();
        let v = classify(&f, 12, &limits(), &thresholds()).unwrap();
        assert_eq!(v.transitive, Certainty::CertifiedYes);
        assert_eq!(v.mixing, Certainty::CertifiedNo);
        assert!(v
            .rules_fired
            .iter()
            .any(|r| r.rule == "eta-limsup-sufficient"));
    }

    #[test]
    fn ex33_mixing_stays_unknown() {
        // η → 0 with unbounded α: no declared fact licenses a mixing
        // certification either way; transitivity is certified through ψ.
        let f = MeasureFamily::ex33(BaseSeq::power_of_two(2).unwrap()).unwrap();
        let v = classify(&f, 8, &limits(), &thresholds()).unwrap();
        assert_eq!(v.mixing, Certainty::Unknown);
        assert_eq!(v.transitive, Certainty::CertifiedYes);
    }

    #[test]
    fn custom_without_declarations_gets_leanings_only() {
        let f = MeasureFamily::custom(
            BaseSeq::constant(2).unwrap(),
            vec![vec![rational_ratio(99, 100), rational_ratio(1, 100)]],
            vec![],
        )
        .unwrap();
        let v = classify(&f, 8, &limits(), &thresholds()).unwrap();
        assert_eq!(v.continuity, ContinuityStatus::FiniteEvidenceOnly);
        assert_eq!(v.mixing, Certainty::EvidenceLeaning);
        assert_eq!(v.transitive, Certainty::EvidenceLeaning);
    }

    #[test]
    fn inconsistent_declarations_rejected() {
        let f = MeasureFamily::custom(
            BaseSeq::constant(2).unwrap(),
            vec![vec![rational_ratio(1, 2), rational_ratio(1, 2)]],
            vec![
                DeclaredFact::EtaLimit(rational_int(1)),
                DeclaredFact::RhoBounded,
            ],
        )
        .unwrap();
        assert!(matches!(
            classify(&f, 4, &limits(), &thresholds()),
            Err(Error::InconsistentDeclarations(_))
        ));
    }

    #[test]
    fn determinism() {
        let f = MeasureFamily::thm37(BaseSeq::constant(4).unwrap()).unwrap();
        let a = classify(&f, 10, &limits(), &thresholds()).unwrap();
        let b = classify(&f, 10, &limits(), &thresholds()).unwrap();
        assert_eq!(a.mixing, b.mixing);
        assert_eq!(a.transitive, b.transitive);
        assert_eq!(a.rules_fired, b.rules_fired);
    }

    #[test]
    fn consistency_clean_families() {
        let thm32 = MeasureFamily::thm32(BaseSeq::constant(2).unwrap());
        assert!(consistency_check(&thm32, 20, &limits()).is_empty());

        let ex33 = MeasureFamily::ex33(BaseSeq::power_of_two(2).unwrap()).unwrap();
        assert!(consistency_check(&ex33, 20, &limits()).is_empty());

        let thm36 =
            MeasureFamily::thm36(BaseSeq::periodic(vec![], vec![2, 3]).unwrap()).unwrap();
        assert!(consistency_check(&thm36, 20, &limits()).is_empty());
    }

    #[test]
    fn consistency_flags_false_eta_limit() {
        let f = MeasureFamily::custom(
            BaseSeq::constant(2).unwrap(),
            vec![vec![rational_ratio(1, 2), rational_ratio(1, 2)]],
            vec![DeclaredFact::EtaLimit(rational_int(1))],
        )
        .unwrap();
        let warnings = consistency_check(&f, 20, &limits());
        assert!(warnings.iter().any(|w| w.about.contains("lim η")));
    }
}
