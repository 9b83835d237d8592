//! `odolin` — exact classification of composition operators induced by
//! odometers with product measures.

mod config;
mod render;
mod verify;

use clap::{Parser, Subcommand};
use config::{parse_rational, CliError, CliResult, Config, Format, Overrides};
use num_traits::One;
use odolin::classify::{classify, consistency_check, Certainty, ContinuityStatus, LeaningThresholds, Verdict};
use odolin::cylinder::WindowSet;
use odolin::operator::{approx_norm, indicator_orbit, norm_ratio_tfk, star_constant, OperatorQuery};
use odolin::shift::psi_range;
use odolin::witness::{
    ex33_witness, mixing_witness, nonmixing_probe, transitive_witness, ProbeReport,
    WitnessConstruction, WitnessReport,
};
use odolin::{Natural, Rational};
use render::{csv_table, decimal_approx, exact_value, rational_str, text_table, Report};
use serde_json::{json, Value};
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "odolin",
    version,
    about = "Exact-arithmetic classification of odometer-induced composition operators"
)]
struct Cli {
    /// JSON configuration file (base, measure family, horizon, caps)
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Coordinate horizon L (overrides the config file)
    #[arg(long, global = true)]
    horizon: Option<usize>,
    /// Output format: text, json or csv
    #[arg(long, global = true)]
    format: Option<Format>,
    /// Exponent p as an exact rational, e.g. 2 or 3/2
    #[arg(long, global = true)]
    p: Option<String>,
    /// Cell cap for shift scans and materialized windows
    #[arg(long = "size-cap", global = true)]
    size_cap: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Inspect a measure family
    Family {
        #[command(subcommand)]
        cmd: FamilyCommand,
    },
    /// Classify the operator as mixing / transitive / neither
    Classify,
    /// Maximum measure of a shift-disjoint set over a coordinate window
    Psi {
        /// First coordinate of the window
        #[arg(long, default_value_t = 0)]
        i: usize,
        /// Last coordinate of the window (defaults to i)
        #[arg(long)]
        j: Option<usize>,
        /// Explicit comma-separated shift candidates (skips the full scan)
        #[arg(long, value_delimiter = ',')]
        shifts: Option<Vec<u64>>,
    },
    /// Construct and verify witness sets
    Witness {
        #[command(subcommand)]
        cmd: WitnessCommand,
    },
    /// Re-verify the defining inequalities of a bundled construction
    VerifyPaper {
        /// One of thm32, ex33, thm36, thm37, lemma45
        name: String,
    },
    /// Window operator norms and indicator orbits
    Operator {
        #[command(subcommand)]
        cmd: OperatorCommand,
    },
}

#[derive(Subcommand)]
enum FamilyCommand {
    /// Per-coordinate table of η, δ, λ, ρ, the running diamond minimum and ψ
    Show,
}

#[derive(Subcommand)]
enum WitnessCommand {
    /// Near-full set disjoint from its k-image, via the heavy digit pair
    Mixing {
        /// Power of the odometer (an arbitrary-precision non-negative integer)
        #[arg(long)]
        k: String,
        /// Complement bound ε as an exact rational
        #[arg(long)]
        eps: String,
        /// How many coordinates the index search may inspect
        #[arg(long, default_value_t = 64)]
        search_horizon: usize,
    },
    /// Near-full block witness from a ψ optimizer
    Transitive {
        #[arg(long)]
        eps: String,
        /// Largest coordinate the window search may reach
        #[arg(long, default_value_t = 16)]
        window_budget: usize,
    },
    /// Fixed-shift obstruction probe from two heavy digits at coordinate l
    Nonmixing {
        #[arg(long)]
        l: usize,
        #[arg(long)]
        eps: String,
        /// Number of windows (l+1 … l+windows) to probe
        #[arg(long, default_value_t = 2)]
        windows: usize,
    },
}

#[derive(Subcommand)]
enum OperatorCommand {
    /// Window norm ratios of T_f^k plus the Condition (*) constant
    Norms {
        /// Window J (the norm quantifies over cells of [0..J])
        #[arg(long)]
        window: usize,
        /// Comma-separated powers k (default 1..=8 within the window)
        #[arg(long, value_delimiter = ',')]
        k: Option<Vec<String>>,
    },
    /// ‖T_f^k 1_S‖_p^p = μ(f^{−k}(S)) for k = 0..k-max
    Orbit {
        #[arg(long = "k-max", default_value_t = 8)]
        k_max: u64,
        /// Box constraints i=d, repeatable/comma-separated (default: full space)
        #[arg(long = "fix", value_delimiter = ',')]
        fixes: Vec<String>,
    },
}

fn main() {
    let cli = Cli::parse();
    let overrides = Overrides {
        horizon: cli.horizon,
        p: cli.p.clone(),
        format: cli.format,
        size_cap: cli.size_cap,
    };
    let exit = match run(&cli, &overrides) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    };
    std::process::exit(exit);
}

fn run(cli: &Cli, overrides: &Overrides) -> CliResult<i32> {
    let config = config::load_config(cli.config.as_deref(), overrides)?;
    match &cli.command {
        Command::Family { cmd: FamilyCommand::Show } => family_show(&config),
        Command::Classify => cmd_classify(&config),
        Command::Psi { i, j, shifts } => cmd_psi(&config, *i, j.unwrap_or(*i), shifts.as_deref()),
        Command::Witness { cmd } => cmd_witness(&config, cmd),
        Command::VerifyPaper { name } => cmd_verify_paper(&config, name),
        Command::Operator { cmd } => cmd_operator(&config, cmd),
    }
}

fn emit(report: &Report, config: &Config) {
    println!("{}", report.render(config.format));
}

fn window_set_json(set: &WindowSet) -> Value {
    match set {
        WindowSet::Empty => json!({"form": "empty"}),
        WindowSet::Box { coords } => {
            let constraints: Vec<Value> = coords
                .iter()
                .enumerate()
                .filter_map(|(i, c)| {
                    c.as_ref().map(|digits| {
                        json!({"coordinate": i, "digits": digits.iter().collect::<Vec<_>>()})
                    })
                })
                .collect();
            json!({"form": "box", "constraints": constraints})
        }
        WindowSet::Block { lo, width, cells } => json!({
            "form": "block",
            "lo": lo,
            "width": width,
            "cells": cells.iter().collect::<Vec<_>>(),
        }),
    }
}

fn window_set_text(set: &WindowSet) -> String {
    match set {
        WindowSet::Empty => "∅".to_string(),
        WindowSet::Box { coords } => {
            let parts: Vec<String> = coords
                .iter()
                .enumerate()
                .filter_map(|(i, c)| {
                    c.as_ref().map(|digits| {
                        let ds: Vec<String> = digits.iter().map(|d| d.to_string()).collect();
                        format!("x_{i} ∈ {{{}}}", ds.join(","))
                    })
                })
                .collect();
            if parts.is_empty() {
                "full space".to_string()
            } else {
                format!("Box{{{}}}", parts.join(", "))
            }
        }
        WindowSet::Block { lo, width, cells } => {
            let cs: Vec<String> = cells.iter().map(|c| c.to_string()).collect();
            format!("Block[{}..{}]{{{}}}", lo, lo + width - 1, cs.join(","))
        }
    }
}

fn family_show(config: &Config) -> CliResult<i32> {
    let family = &config.family;
    let table = odolin::classify::evidence(family, config.horizon, &config.limits);
    let mut report = Report::new(config.echo.clone());

    let header = [
        "i",
        "alpha",
        "eta",
        "delta",
        "(1-eta)/alpha",
        "lambda0",
        "rho",
        "diamond_running",
        "psi",
        "psi_shift",
    ];
    let mut text_rows = Vec::new();
    let mut csv_rows = Vec::new();
    let mut json_rows = Vec::new();
    for row in &table.rows {
        let diamond = row
            .diamond_running
            .as_ref()
            .map(rational_str)
            .unwrap_or_else(|| "-".into());
        let psi = row
            .psi
            .as_ref()
            .map(|p| rational_str(&p.value))
            .unwrap_or_else(|| "omitted".into());
        let psi_shift = row
            .psi
            .as_ref()
            .map(|p| p.shift.to_string())
            .unwrap_or_else(|| "-".into());
        text_rows.push(vec![
            row.i.to_string(),
            row.alpha.to_string(),
            rational_str(&row.eta),
            rational_str(&row.delta),
            rational_str(&row.eta_gap_over_alpha),
            rational_str(&row.lambda0),
            rational_str(&row.rho),
            diamond,
            psi,
            psi_shift.clone(),
        ]);
        csv_rows.push(vec![
            row.i.to_string(),
            row.alpha.to_string(),
            decimal_approx(&row.eta),
            decimal_approx(&row.delta),
            decimal_approx(&row.eta_gap_over_alpha),
            decimal_approx(&row.lambda0),
            decimal_approx(&row.rho),
            row.diamond_running
                .as_ref()
                .map(decimal_approx)
                .unwrap_or_default(),
            row.psi
                .as_ref()
                .map(|p| decimal_approx(&p.value))
                .unwrap_or_default(),
            psi_shift,
        ]);
        json_rows.push(json!({
            "i": row.i,
            "alpha": row.alpha,
            "eta": exact_value(&row.eta),
            "delta": exact_value(&row.delta),
            "eta_gap_over_alpha": exact_value(&row.eta_gap_over_alpha),
            "lambda0": exact_value(&row.lambda0),
            "rho": exact_value(&row.rho),
            "diamond_running": row.diamond_running.as_ref().map(exact_value),
            "psi": row.psi.as_ref().map(|p| json!({
                "value": exact_value(&p.value),
                "shift": p.shift,
                "witness": p.witness.iter().collect::<Vec<_>>(),
            })),
        }));
    }
    let pair_rows: Vec<Value> = table
        .psi_pairs
        .iter()
        .map(|p| {
            json!({
                "i": p.i,
                "j": p.j,
                "value": exact_value(&p.outcome.value),
                "shift": p.outcome.shift,
            })
        })
        .collect();

    let diamond = family.diamond_inf(config.horizon);
    report.headline("diamond_inf", &diamond.value);
    report.headline("nonatomic_product", &table.nonatomic_product);
    report.headline("rho_horizon", &table.rows[config.horizon].rho);

    let decls: Vec<String> = family
        .declarations()
        .iter()
        .map(|d| format!("{:?} [{:?}]", d.fact, d.justification))
        .collect();
    let warnings = consistency_check(family, config.horizon, &config.limits);

    report.results = json!({
        "family": family.kind_name(),
        "rows": json_rows,
        "psi_pairs": pair_rows,
        "omitted_psi": table.omitted_psi,
        "declarations": decls,
        "diamond_at": {"l": diamond.at_l, "j": diamond.at_j},
        "warnings": warnings.iter().map(|w| format!("{}: {}", w.about, w.detail)).collect::<Vec<_>>(),
    });
    let mut text = format!(
        "family {} over horizon {}\n\n",
        family.kind_name(),
        config.horizon
    );
    text.push_str(&text_table(&header, &text_rows));
    text.push_str(&format!(
        "\ndiamond_inf({}) = {} at (l = {}, j = {})\nnon-atomicity product = {}\n",
        config.horizon,
        rational_str(&diamond.value),
        diamond.at_l,
        diamond.at_j,
        rational_str(&table.nonatomic_product),
    ));
    if !table.psi_pairs.is_empty() {
        text.push_str("sampled psi over pairs: ");
        let entries: Vec<String> = table
            .psi_pairs
            .iter()
            .map(|p| format!("[{}..{}] = {}", p.i, p.j, rational_str(&p.outcome.value)))
            .collect();
        text.push_str(&entries.join(", "));
        text.push('\n');
    }
    for w in &warnings {
        text.push_str(&format!("warning: {}: {}\n", w.about, w.detail));
    }
    report.text = text;
    report.csv = csv_table(&header, &csv_rows);
    emit(&report, config);
    Ok(0)
}

fn certainty_text(c: Certainty, yes: &str, no: &str) -> String {
    match c {
        Certainty::CertifiedYes => format!("{yes} (certified)"),
        Certainty::CertifiedNo => format!("{no} (certified)"),
        Certainty::EvidenceLeaning => format!("leaning {yes} (non-conclusive evidence)"),
        Certainty::Unknown => "unknown".to_string(),
    }
}

fn certainty_key(c: Certainty) -> &'static str {
    match c {
        Certainty::CertifiedYes => "certified-yes",
        Certainty::CertifiedNo => "certified-no",
        Certainty::EvidenceLeaning => "evidence-leaning",
        Certainty::Unknown => "unknown",
    }
}

fn rules_json(verdict: &Verdict) -> Value {
    Value::Array(
        verdict
            .rules_fired
            .iter()
            .map(|r| {
                json!({
                    "rule": r.rule,
                    "condition": r.condition,
                    "inputs": r.inputs,
                })
            })
            .collect(),
    )
}

fn cmd_classify(config: &Config) -> CliResult<i32> {
    let verdict = classify(
        &config.family,
        config.horizon,
        &config.limits,
        &LeaningThresholds::default(),
    )?;
    let mut report = Report::new(config.echo.clone());
    report.rules_fired = rules_json(&verdict);
    report.results = json!({
        "family": config.family.kind_name(),
        "mixing": certainty_key(verdict.mixing),
        "transitive": certainty_key(verdict.transitive),
        "continuity": match verdict.continuity {
            ContinuityStatus::Declared => "declared",
            ContinuityStatus::FiniteEvidenceOnly => "finite-evidence-only",
        },
    });
    let diamond = config.family.diamond_inf(config.horizon);
    report.headline("diamond_inf", &diamond.value);
    report.headline(
        "rho_horizon",
        &verdict.evidence.rows[config.horizon].rho,
    );
    let mut text = String::new();
    text.push_str(&format!(
        "transitive: {}\n",
        certainty_text(verdict.transitive, "TRANSITIVE", "NOT TRANSITIVE")
    ));
    text.push_str(&format!(
        "mixing:     {}\n",
        certainty_text(verdict.mixing, "MIXING", "NOT MIXING")
    ));
    text.push_str(&format!(
        "continuity: {}\n\nrules fired:\n",
        match verdict.continuity {
            ContinuityStatus::Declared => "Condition (◇) declared",
            ContinuityStatus::FiniteEvidenceOnly => "finite-horizon evidence only",
        }
    ));
    for r in &verdict.rules_fired {
        text.push_str(&format!("  - {}: {} [{}]\n", r.rule, r.condition, r.inputs.join("; ")));
    }
    report.text = text;
    let header = ["property", "verdict"];
    report.csv = csv_table(
        &header,
        &[
            vec!["transitive".into(), certainty_key(verdict.transitive).into()],
            vec!["mixing".into(), certainty_key(verdict.mixing).into()],
        ],
    );
    emit(&report, config);
    Ok(0)
}

fn cmd_psi(config: &Config, i: usize, j: usize, shifts: Option<&[u64]>) -> CliResult<i32> {
    let outcome = psi_range(&config.family, i, j, shifts, &config.limits)?;
    let mut report = Report::new(config.echo.clone());
    report.headline("psi", &outcome.value);
    report.results = json!({
        "i": i,
        "j": j,
        "value": exact_value(&outcome.value),
        "shift": outcome.shift,
        "witness": outcome.witness.iter().collect::<Vec<_>>(),
    });
    let witness: Vec<String> = outcome.witness.iter().map(|v| v.to_string()).collect();
    report.text = format!(
        "psi[{i}..{j}] = {} (≈ {})\nbest shift k = {}\nwitness cells {{{}}}\n",
        rational_str(&outcome.value),
        decimal_approx(&outcome.value),
        outcome.shift,
        witness.join(",")
    );
    report.csv = csv_table(
        &["i", "j", "psi_approx", "shift"],
        &[vec![
            i.to_string(),
            j.to_string(),
            decimal_approx(&outcome.value),
            outcome.shift.to_string(),
        ]],
    );
    emit(&report, config);
    Ok(0)
}

fn witness_report_json(r: &WitnessReport) -> Value {
    let construction = match &r.construction {
        WitnessConstruction::EtaPair {
            l,
            k0,
            j,
            fixed_digits,
        } => json!({
            "kind": "eta-pair",
            "l": l,
            "k0": k0.to_string(),
            "j": j,
            "fixed_digits": [fixed_digits.0, fixed_digits.1],
        }),
        WitnessConstruction::SparseSets {
            l0,
            k0,
            l,
            j,
            e_l,
            f_next,
        } => json!({
            "kind": "sparse-sets",
            "l0": l0,
            "k0": k0.to_string(),
            "l": l,
            "j": j,
            "e_l": e_l,
            "f_next": f_next,
        }),
        WitnessConstruction::BlockShift {
            lo,
            hi,
            shift,
            psi_value,
        } => json!({
            "kind": "block-shift",
            "lo": lo,
            "hi": hi,
            "shift": shift,
            "psi_value": exact_value(psi_value),
        }),
    };
    json!({
        "k": r.k.to_string(),
        "set": window_set_json(&r.set),
        "set_measure": exact_value(&r.set_measure),
        "complement_measure": exact_value(&r.complement_measure),
        "disjoint": r.disjoint,
        "construction": construction,
    })
}

fn emit_witness(config: &Config, r: &WitnessReport, eps: &Rational) -> CliResult<i32> {
    let mut report = Report::new(config.echo.clone());
    report.headline("set_measure", &r.set_measure);
    report.headline("complement_measure", &r.complement_measure);
    report.results = witness_report_json(r);
    report.text = format!(
        "k = {}\nset = {}\nμ(set) = {} (≈ {})\nμ(complement) = {} (≈ {})\ndisjoint from image: {}\naccepted at ε = {}: {}\n",
        r.k,
        window_set_text(&r.set),
        rational_str(&r.set_measure),
        decimal_approx(&r.set_measure),
        rational_str(&r.complement_measure),
        decimal_approx(&r.complement_measure),
        r.disjoint,
        rational_str(eps),
        r.accepted(eps),
    );
    report.csv = csv_table(
        &["k", "set_measure_approx", "complement_approx", "disjoint"],
        &[vec![
            r.k.to_string(),
            decimal_approx(&r.set_measure),
            decimal_approx(&r.complement_measure),
            r.disjoint.to_string(),
        ]],
    );
    emit(&report, config);
    Ok(if r.accepted(eps) { 0 } else { 4 })
}

fn parse_natural(s: &str) -> CliResult<Natural> {
    s.trim()
        .parse()
        .map_err(|_| CliError::config(format!("{s:?} is not a non-negative integer")))
}

fn cmd_witness(config: &Config, cmd: &WitnessCommand) -> CliResult<i32> {
    match cmd {
        WitnessCommand::Mixing {
            k,
            eps,
            search_horizon,
        } => {
            let k = parse_natural(k)?;
            let eps = parse_rational(eps).map_err(CliError::config)?;
            let report = if matches!(config.family.kind(), odolin::measure::FamilyKind::Ex33) {
                ex33_witness(&config.family, &k, &eps, &config.limits)?
            } else {
                mixing_witness(&config.family, &k, &eps, *search_horizon, &config.limits)?
            };
            emit_witness(config, &report, &eps)
        }
        WitnessCommand::Transitive { eps, window_budget } => {
            let eps = parse_rational(eps).map_err(CliError::config)?;
            let report = transitive_witness(&config.family, &eps, *window_budget, &config.limits)?;
            emit_witness(config, &report, &eps)
        }
        WitnessCommand::Nonmixing { l, eps, windows } => {
            let eps = parse_rational(eps).map_err(CliError::config)?;
            let probe = nonmixing_probe(&config.family, *l, &eps, *windows, &config.limits)?;
            emit_probe(config, &probe)
        }
    }
}

fn emit_probe(config: &Config, probe: &ProbeReport) -> CliResult<i32> {
    let mut report = Report::new(config.echo.clone());
    report.headline("eps_bound", &probe.eps_bound);
    let windows: Vec<Value> = probe
        .window_maxima
        .iter()
        .map(|(w, v)| json!({"window": w, "max_disjoint_measure": exact_value(v)}))
        .collect();
    report.results = json!({
        "l": probe.l,
        "digits": [probe.digit_a, probe.digit_b],
        "m": probe.m.to_string(),
        "eps": exact_value(&probe.eps),
        "eps_bound": exact_value(&probe.eps_bound),
        "windows": windows,
        "all_within": probe.all_within,
    });
    let mut text = format!(
        "obstruction shift m = {} from digits ({}, {}) at coordinate {}\nε = {} (admissible below {})\n",
        probe.m,
        probe.digit_a,
        probe.digit_b,
        probe.l,
        rational_str(&probe.eps),
        rational_str(&probe.eps_bound),
    );
    let mut csv_rows = Vec::new();
    for (window, value) in &probe.window_maxima {
        let threshold = Rational::one() - &probe.eps;
        text.push_str(&format!(
            "  window {window}: max shift-disjoint measure = {} (≈ {}) {} 1 − ε\n",
            rational_str(value),
            decimal_approx(value),
            if *value <= threshold { "≤" } else { ">" },
        ));
        csv_rows.push(vec![
            window.to_string(),
            decimal_approx(value),
        ]);
    }
    text.push_str(&format!(
        "all maxima within 1 − ε: {}\n",
        probe.all_within
    ));
    report.text = text;
    report.csv = csv_table(&["window", "max_disjoint_measure_approx"], &csv_rows);
    emit(&report, config);
    Ok(if probe.all_within { 0 } else { 4 })
}

fn cmd_verify_paper(config: &Config, name: &str) -> CliResult<i32> {
    let checks = verify::run(name, config)?;
    let mut report = Report::new(config.echo.clone());
    let rows: Vec<Value> = checks
        .iter()
        .map(|c| json!({"check": c.name, "passed": c.passed, "detail": c.detail}))
        .collect();
    let all_passed = checks.iter().all(|c| c.passed);
    report.results = json!({
        "target": name,
        "checks": rows,
        "all_passed": all_passed,
    });
    let mut text = format!("verify {name} at horizon {}\n", config.horizon);
    let mut csv_rows = Vec::new();
    for c in &checks {
        text.push_str(&format!(
            "  [{}] {} — {}\n",
            if c.passed { "pass" } else { "FAIL" },
            c.name,
            c.detail
        ));
        csv_rows.push(vec![
            c.name.clone(),
            if c.passed { "pass" } else { "fail" }.to_string(),
        ]);
    }
    text.push_str(if all_passed { "all checks passed\n" } else { "FAILURES present\n" });
    report.text = text;
    report.csv = csv_table(&["check", "result"], &csv_rows);
    emit(&report, config);
    Ok(if all_passed { 0 } else { 4 })
}

fn cmd_operator(config: &Config, cmd: &OperatorCommand) -> CliResult<i32> {
    match cmd {
        OperatorCommand::Norms { window, k } => {
            let beta = config.family.base().beta(window + 1);
            let ks: Vec<Natural> = match k {
                Some(list) => list
                    .iter()
                    .map(|s| parse_natural(s))
                    .collect::<CliResult<_>>()?,
                None => (1u64..=8)
                    .map(Natural::from)
                    .filter(|k| *k < beta)
                    .collect(),
            };
            let star = star_constant(&config.family, *window, &config.limits)?;
            let mut report = Report::new(config.echo.clone());
            report.headline("star_constant", &star);
            let mut rows_json = Vec::new();
            let mut text_rows = Vec::new();
            let mut csv_rows = Vec::new();
            for k in &ks {
                let query =
                    OperatorQuery::new(&config.family, *window, config.p.clone(), k.clone())?;
                let ratio = norm_ratio_tfk(&config.family, &query, &config.limits)?;
                let norm = approx_norm(&ratio, &config.p);
                rows_json.push(json!({
                    "k": k.to_string(),
                    "ratio": exact_value(&ratio),
                    "norm_approx": format!("{norm:.12}"),
                }));
                text_rows.push(vec![
                    k.to_string(),
                    rational_str(&ratio),
                    format!("{norm:.12}"),
                ]);
                csv_rows.push(vec![
                    k.to_string(),
                    decimal_approx(&ratio),
                    format!("{norm:.12}"),
                ]);
            }
            report.results = json!({
                "window": window,
                "p": rational_str(&config.p),
                "star_constant": exact_value(&star),
                "norms": rows_json,
            });
            let header = ["k", "ratio_R", "norm_R^(1/p)_approx"];
            let mut text = format!(
                "window J = {window}, p = {}\nCondition (*) constant c_J = {} (≈ {})\n\n",
                rational_str(&config.p),
                rational_str(&star),
                decimal_approx(&star),
            );
            text.push_str(&text_table(&header, &text_rows));
            report.text = text;
            report.csv = csv_table(&["k", "ratio_approx", "norm_approx"], &csv_rows);
            emit(&report, config);
            Ok(0)
        }
        OperatorCommand::Orbit { k_max, fixes } => {
            let mut pairs = Vec::new();
            for f in fixes {
                let (i, d) = f
                    .split_once('=')
                    .ok_or_else(|| CliError::config(format!("--fix {f:?} must be i=digit")))?;
                let i: usize = i
                    .trim()
                    .parse()
                    .map_err(|_| CliError::config(format!("--fix {f:?}: bad coordinate")))?;
                let d: u64 = d
                    .trim()
                    .parse()
                    .map_err(|_| CliError::config(format!("--fix {f:?}: bad digit")))?;
                pairs.push((i, d));
            }
            let set = if pairs.is_empty() {
                WindowSet::full()
            } else {
                WindowSet::fixing(&pairs, config.family.base())?
            };
            let orbit = indicator_orbit(&config.family, &set, *k_max, &config.limits)?;
            let mut report = Report::new(config.echo.clone());
            let mut rows_json = Vec::new();
            let mut text_rows = Vec::new();
            let mut csv_rows = Vec::new();
            for (k, mass) in orbit.iter().enumerate() {
                let norm = approx_norm(mass, &config.p);
                rows_json.push(json!({
                    "k": k,
                    "pullback_measure": exact_value(mass),
                    "norm_approx": format!("{norm:.12}"),
                }));
                text_rows.push(vec![
                    k.to_string(),
                    rational_str(mass),
                    format!("{norm:.12}"),
                ]);
                csv_rows.push(vec![
                    k.to_string(),
                    decimal_approx(mass),
                    format!("{norm:.12}"),
                ]);
            }
            report.results = json!({
                "set": window_set_json(&set),
                "p": rational_str(&config.p),
                "orbit": rows_json,
            });
            let mut text = format!(
                "indicator orbit of {} (p = {})\n\n",
                window_set_text(&set),
                rational_str(&config.p)
            );
            text.push_str(&text_table(
                &["k", "mu(f^-k S)", "norm_approx"],
                &text_rows,
            ));
            report.text = text;
            report.csv = csv_table(&["k", "pullback_measure_approx", "norm_approx"], &csv_rows);
            emit(&report, config);
            Ok(0)
        }
    }
}
