//! `verify-paper`: re-derive the defining inequalities of the bundled
//! constructions with exact arithmetic and report each one pass/fail.

use crate::config::{CliError, CliResult, Config};
use crate::render::{decimal_approx, rational_str};
use num_traits::{One, Zero};
use odolin::base::BaseSeq;
use odolin::classify::{classify, Certainty, LeaningThresholds};
use odolin::measure::{FamilyKind, MeasureFamily};
use odolin::shift::psi_single;
use odolin::witness::{
    dl_overlap_check, ex33_witness, mixing_witness, nonmixing_probe, transitive_witness,
};
use odolin::{Limits, Natural, Rational};

pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn check(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Check {
    Check {
        name: name.into(),
        passed,
        detail: detail.into(),
    }
}

fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

/// Use the configured base when it is admissible for the named construction,
/// otherwise the canonical one.
fn family_for(name: &str, config: &Config) -> CliResult<MeasureFamily> {
    let configured = config.family.base().clone();
    Ok(match name {
        "thm32" => MeasureFamily::thm32(configured),
        "ex33" => MeasureFamily::ex33(BaseSeq::power_of_two(2).map_err(CliError::from)?)
            .map_err(CliError::from)?,
        "thm36" => {
            let base = if configured.liminf_alpha().is_some() {
                configured
            } else {
                BaseSeq::periodic(vec![], vec![2, 3]).map_err(CliError::from)?
            };
            MeasureFamily::thm36(base).map_err(CliError::from)?
        }
        "thm37" => MeasureFamily::thm37(configured)
            .or_else(|_| MeasureFamily::thm37(BaseSeq::constant(4).unwrap()))
            .map_err(CliError::from)?,
        other => {
            return Err(CliError::config(format!(
                "verify-paper target {other:?} is not one of thm32, ex33, thm36, thm37, lemma45"
            )))
        }
    })
}

pub fn run(name: &str, config: &Config) -> CliResult<Vec<Check>> {
    let horizon = config.horizon;
    let limits = &config.limits;
    match name {
        "lemma45" => Ok(verify_lemma45(horizon)),
        "thm32" => verify_thm32(&family_for(name, config)?, horizon, limits),
        "ex33" => verify_ex33(&family_for(name, config)?, horizon, limits),
        "thm36" => verify_thm36(&family_for(name, config)?, horizon, limits),
        "thm37" => verify_thm37(&family_for(name, config)?, horizon, limits),
        other => Err(CliError::config(format!(
            "verify-paper target {other:?} is not one of thm32, ex33, thm36, thm37, lemma45"
        ))),
    }
}

fn verify_lemma45(horizon: usize) -> Vec<Check> {
    let top = horizon.min(16);
    let mut worst = 0;
    for l in 0..=top {
        worst = worst.max(dl_overlap_check(l, 1u64 << l));
    }
    vec![check(
        format!("sparse-set overlap ≤ 1 for l ≤ {top}, shifts ≤ 2^l"),
        worst <= 1,
        format!("max |(D_l + j) ∩ D_l| observed = {worst}"),
    )]
}

fn verify_thm32(family: &MeasureFamily, horizon: usize, limits: &Limits) -> CliResult<Vec<Check>> {
    let mut checks = Vec::new();
    let mut increasing = true;
    let mut formula = true;
    let mut last = Rational::zero();
    for i in 0..=horizon {
        let eta = family.eta_delta(i).0;
        increasing &= eta > last;
        let m = Rational::from_integer(num_bigint::BigInt::one() << (i + 1))
            + Rational::one();
        formula &= eta == Rational::one() - m.recip();
        last = eta;
    }
    checks.push(check(
        format!("η strictly increasing up to {horizon} with η_n = 1 − 1/(2^(n+1)+1)"),
        increasing && formula,
        format!("η_{horizon} = {}", rational_str(&last)),
    ));
    let diamond = family.diamond_inf(horizon);
    checks.push(check(
        "finite diamond minimum positive",
        diamond.value > Rational::zero(),
        format!(
            "min = {} at (l = {}, j = {})",
            rational_str(&diamond.value),
            diamond.at_l,
            diamond.at_j
        ),
    ));
    let eps = ratio(1, 2);
    let k0 = family.base().beta(1);
    let mut all_accepted = true;
    let mut tried = 0usize;
    let mut k = &k0 + Natural::from(1u32);
    let upper = &k0 + Natural::from(64u32);
    while k <= upper {
        let report = mixing_witness(family, &k, &eps, 64, limits)?;
        all_accepted &= report.accepted(&eps);
        tried += 1;
        k += Natural::from(1u32);
    }
    checks.push(check(
        "mixing witnesses accepted for every k in (k_0, k_0+64] at ε = 1/2",
        all_accepted,
        format!("{tried} values of k checked, k_0 = {k0}"),
    ));
    let verdict = classify(family, horizon, limits, &LeaningThresholds::default())
        .map_err(CliError::from)?;
    checks.push(check(
        "classifier certifies mixing",
        verdict.mixing == Certainty::CertifiedYes,
        format!("mixing: {:?}", verdict.mixing),
    ));
    Ok(checks)
}

fn verify_ex33(family: &MeasureFamily, horizon: usize, limits: &Limits) -> CliResult<Vec<Check>> {
    let mut checks = Vec::new();
    let diamond = family.diamond_inf(horizon);
    checks.push(check(
        "diamond minimum ≥ 9/64",
        diamond.value >= ratio(9, 64),
        format!(
            "min = {} ≈ {}",
            rational_str(&diamond.value),
            decimal_approx(&diamond.value)
        ),
    ));
    let etas: Vec<Rational> = (0..=horizon).map(|i| family.eta_delta(i).0).collect();
    let decreasing = etas.windows(2).skip(2).all(|w| w[0] > w[1]);
    checks.push(check(
        format!("η strictly decreasing for 2 ≤ i ≤ {horizon}"),
        decreasing,
        format!(
            "η_2 = {}, η_{horizon} = {}",
            rational_str(&etas[2.min(horizon)]),
            rational_str(&etas[horizon])
        ),
    ));
    let nonatomic = family.nonatomic_product(horizon);
    checks.push(check(
        "non-atomicity product decaying",
        nonatomic < family.nonatomic_product(horizon / 2),
        format!("∏ η up to {horizon} = {}", decimal_approx(&nonatomic)),
    ));
    let eps = ratio(1, 2);
    let probe = ex33_witness(family, &Natural::from(1u32), &eps, limits);
    let k0: Natural = match probe {
        Err(odolin::Error::KTooSmall { bound, .. }) => bound
            .trim_start_matches("≥ k_0 = ")
            .parse()
            .map_err(|_| CliError::config("unexpected k_0 bound format"))?,
        _ => Natural::from(1u32),
    };
    let mut all_accepted = true;
    for offset in [0u32, 1, 7] {
        let k = &k0 + Natural::from(offset);
        let report = ex33_witness(family, &k, &eps, limits)?;
        all_accepted &= report.accepted(&eps);
    }
    checks.push(check(
        "sparse-set witnesses accepted at ε = 1/2",
        all_accepted,
        format!("k_0 = {k0}"),
    ));
    let verdict = classify(family, horizon, limits, &LeaningThresholds::default())
        .map_err(CliError::from)?;
    checks.push(check(
        "classifier certifies transitivity",
        verdict.transitive == Certainty::CertifiedYes,
        format!("transitive: {:?}", verdict.transitive),
    ));
    Ok(checks)
}

fn verify_thm36(family: &MeasureFamily, horizon: usize, limits: &Limits) -> CliResult<Vec<Check>> {
    let mut checks = Vec::new();
    let FamilyKind::Thm36 { t } = *family.kind() else {
        return Err(CliError::config("thm36 verification needs the thm36 family"));
    };
    let diamond = family.diamond_inf(horizon);
    let floor = ratio(1, 2) * ratio(1, t as i64 - 1);
    checks.push(check(
        format!("diamond minimum ≥ (1/2)·1/(t−1) with t = {t}"),
        diamond.value >= floor,
        format!(
            "min = {} at (l = {}, j = {}), floor = {}",
            rational_str(&diamond.value),
            diamond.at_l,
            diamond.at_j,
            rational_str(&floor)
        ),
    ));
    // η along the weighted subsequence is 1 − 1/(k+3), increasing toward 1.
    let mut weighted_etas = Vec::new();
    for i in 0..=horizon {
        let eta = family.eta_delta(i).0;
        if family.base().alpha(i) == t && eta > ratio(1, t as i64) {
            weighted_etas.push(eta);
        }
    }
    let expected: Vec<Rational> = (0..weighted_etas.len())
        .map(|k| Rational::one() - ratio(1, k as i64 + 3))
        .collect();
    checks.push(check(
        "weighted subsequence has η = 1 − 1/(k+3), increasing",
        weighted_etas == expected && !weighted_etas.is_empty(),
        format!("{} weighted coordinates within horizon", weighted_etas.len()),
    ));
    let verdict = classify(family, horizon, limits, &LeaningThresholds::default())
        .map_err(CliError::from)?;
    checks.push(check(
        "classifier certifies transitive and not mixing",
        verdict.transitive == Certainty::CertifiedYes && verdict.mixing == Certainty::CertifiedNo,
        format!(
            "transitive: {:?}, mixing: {:?}",
            verdict.transitive, verdict.mixing
        ),
    ));
    Ok(checks)
}

fn verify_thm37(family: &MeasureFamily, horizon: usize, limits: &Limits) -> CliResult<Vec<Check>> {
    let mut checks = Vec::new();
    let top = horizon.min(20);
    let mut psi_ok = true;
    let mut last = Rational::zero();
    for n in 0..=top {
        let psi = psi_single(family, n, limits)?;
        let floor = Rational::one() - ratio(1, (1i64 << n) + 1);
        psi_ok &= psi.value >= floor;
        last = psi.value;
    }
    checks.push(check(
        format!("ψ_n ≥ 1 − 1/(2^n+1) for n ≤ {top}"),
        psi_ok,
        format!("ψ_{top} = {}", rational_str(&last)),
    ));
    let eps = ratio(1, 3);
    let witness = transitive_witness(family, &eps, 8, limits)?;
    checks.push(check(
        "block witness accepted at ε = 1/3",
        witness.accepted(&eps),
        format!(
            "k = {}, μ(B) = {}",
            witness.k,
            rational_str(&witness.set_measure)
        ),
    ));
    let eps = ratio(1, 128);
    let mut probes_ok = true;
    for l in 0..=2usize {
        let probe = nonmixing_probe(family, l, &eps, 2, limits)?;
        probes_ok &= probe.all_within;
    }
    checks.push(check(
        "non-mixing probes stay ≤ 1 − ε for l ≤ 2 at ε = 1/128",
        probes_ok,
        "windows l+1 and l+2 per probe".to_string(),
    ));
    let verdict = classify(family, horizon, limits, &LeaningThresholds::default())
        .map_err(CliError::from)?;
    checks.push(check(
        "classifier certifies transitive and not mixing",
        verdict.transitive == Certainty::CertifiedYes && verdict.mixing == Certainty::CertifiedNo,
        format!(
            "transitive: {:?}, mixing: {:?}",
            verdict.transitive, verdict.mixing
        ),
    ));
    Ok(checks)
}
