//! Configuration ingestion: JSON documents with exact rational strings.
//!
//! Masses and ε values are parsed from `"p/q"` strings (or bare integers);
//! floating-point ingestion is rejected so every downstream comparison stays
//! exact.

use num_bigint::{BigInt, Sign};
use odolin::base::BaseSeq;
use odolin::measure::{DeclaredFact, MeasureFamily};
use odolin::{Limits, Rational};
use serde_json::Value;
use std::path::Path;

/// CLI failure with its process exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        CliError {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<odolin::Error> for CliError {
    fn from(e: odolin::Error) -> Self {
        let code = match &e {
            odolin::Error::SizeLimit { .. } => 3,
            odolin::Error::NotFound { .. } | odolin::Error::HorizonExhausted { .. } => 4,
            _ => 2,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
    Csv,
}

impl std::str::FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "text" => Ok(Format::Text),
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(format!("unknown format {other:?}; use text, json or csv")),
        }
    }
}

/// Fully resolved run configuration.
#[derive(Debug, Clone)]
pub struct Config {
    pub family: MeasureFamily,
    pub horizon: usize,
    pub p: Rational,
    pub limits: Limits,
    pub format: Format,
    /// The raw document, echoed into reports.
    pub echo: Value,
}

/// Parse `"p/q"` or a bare integer, exactly. Decimal or scientific notation
/// is rejected.
pub fn parse_rational(s: &str) -> Result<Rational, String> {
    let s = s.trim();
    let parse_int = |t: &str| -> Result<BigInt, String> {
        t.parse::<BigInt>()
            .map_err(|_| format!("{t:?} is not an exact integer (decimals are rejected)"))
    };
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (parse_int(n)?, parse_int(d)?),
        None => (parse_int(s)?, BigInt::from(1)),
    };
    if den.sign() != Sign::Plus {
        return Err(format!("denominator in {s:?} must be positive"));
    }
    Ok(Rational::new(num, den))
}

fn field<'v>(value: &'v Value, path: &str, key: &str) -> CliResult<&'v Value> {
    value
        .get(key)
        .ok_or_else(|| CliError::config(format!("missing field {path}.{key}")))
}

fn as_u64(value: &Value, path: &str) -> CliResult<u64> {
    value
        .as_u64()
        .ok_or_else(|| CliError::config(format!("{path} must be a non-negative integer")))
}

fn as_str<'v>(value: &'v Value, path: &str) -> CliResult<&'v str> {
    value
        .as_str()
        .ok_or_else(|| CliError::config(format!("{path} must be a string")))
}

fn rational_field(value: &Value, path: &str) -> CliResult<Rational> {
    let s = value.as_str().ok_or_else(|| {
        CliError::config(format!(
            "{path} must be an exact rational string like \"3/4\" (got {value})"
        ))
    })?;
    parse_rational(s).map_err(|e| CliError::config(format!("{path}: {e}")))
}

fn parse_base(doc: &Value) -> CliResult<BaseSeq> {
    let base = field(doc, "$", "base")?;
    let kind = as_str(field(base, "base", "kind")?, "base.kind")?;
    let built = match kind {
        "constant" => {
            let v = as_u64(field(base, "base", "value")?, "base.value")?;
            BaseSeq::constant(v)
        }
        "list" => {
            let values = field(base, "base", "values")?
                .as_array()
                .ok_or_else(|| CliError::config("base.values must be an array"))?;
            let cycle: Vec<u64> = values
                .iter()
                .enumerate()
                .map(|(i, v)| as_u64(v, &format!("base.values[{i}]")))
                .collect::<CliResult<_>>()?;
            let prefix: Vec<u64> = match base.get("prefix") {
                None => Vec::new(),
                Some(p) => p
                    .as_array()
                    .ok_or_else(|| CliError::config("base.prefix must be an array"))?
                    .iter()
                    .enumerate()
                    .map(|(i, v)| as_u64(v, &format!("base.prefix[{i}]")))
                    .collect::<CliResult<_>>()?,
            };
            BaseSeq::periodic(prefix, cycle)
        }
        "power" => {
            let offset = as_u64(field(base, "base", "offset")?, "base.offset")?;
            BaseSeq::power_of_two(offset.try_into().map_err(|_| {
                CliError::config("base.offset does not fit in a u32")
            })?)
        }
        other => {
            return Err(CliError::config(format!(
                "base.kind {other:?} is not one of constant, list, power"
            )))
        }
    };
    built.map_err(CliError::from)
}

fn parse_declaration(decl: &Value, path: &str) -> CliResult<DeclaredFact> {
    let fact = as_str(field(decl, path, "fact")?, &format!("{path}.fact"))?;
    let value = || rational_field(field(decl, path, "value")?, &format!("{path}.value"));
    Ok(match fact {
        "lim_eta" => DeclaredFact::EtaLimit(value()?),
        "limsup_eta" => DeclaredFact::EtaLimsup(value()?),
        "lim_eta_gap_over_alpha" => DeclaredFact::EtaGapOverAlphaLimit(value()?),
        "rho_bounded" => DeclaredFact::RhoBounded,
        "rho_unbounded" => DeclaredFact::RhoUnbounded,
        "alpha_bounded" => DeclaredFact::AlphaBounded,
        "psi_limsup_one" => DeclaredFact::PsiLimsupOne,
        "two_digit_mass_floor" => DeclaredFact::TwoDigitMassFloor(value()?),
        "diamond_holds" => DeclaredFact::DiamondHolds,
        other => {
            return Err(CliError::config(format!(
                "{path}.fact {other:?} is not a known declarable fact"
            )))
        }
    })
}

fn parse_family(doc: &Value, base: BaseSeq) -> CliResult<MeasureFamily> {
    let measure = field(doc, "$", "measure")?;
    let family = as_str(field(measure, "measure", "family")?, "measure.family")?;
    match family {
        "uniform" => Ok(MeasureFamily::uniform(base)),
        "thm32" => Ok(MeasureFamily::thm32(base)),
        "ex33" => MeasureFamily::ex33(base).map_err(CliError::from),
        "thm36" => MeasureFamily::thm36(base).map_err(CliError::from),
        "thm37" => MeasureFamily::thm37(base).map_err(CliError::from),
        "custom" => {
            let masses_doc = field(measure, "measure", "masses")?
                .as_array()
                .ok_or_else(|| CliError::config("measure.masses must be an array of arrays"))?;
            let mut masses = Vec::with_capacity(masses_doc.len());
            for (i, row) in masses_doc.iter().enumerate() {
                let row = row.as_array().ok_or_else(|| {
                    CliError::config(format!("measure.masses[{i}] must be an array"))
                })?;
                let parsed: Vec<Rational> = row
                    .iter()
                    .enumerate()
                    .map(|(j, v)| rational_field(v, &format!("measure.masses[{i}][{j}]")))
                    .collect::<CliResult<_>>()?;
                masses.push(parsed);
            }
            let declarations = match measure.get("declarations") {
                None => Vec::new(),
                Some(decls) => decls
                    .as_array()
                    .ok_or_else(|| CliError::config("measure.declarations must be an array"))?
                    .iter()
                    .enumerate()
                    .map(|(i, d)| parse_declaration(d, &format!("measure.declarations[{i}]")))
                    .collect::<CliResult<_>>()?,
            };
            MeasureFamily::custom(base, masses, declarations).map_err(CliError::from)
        }
        other => Err(CliError::config(format!(
            "measure.family {other:?} is not one of uniform, thm32, ex33, thm36, thm37, custom"
        ))),
    }
}

/// Flag overrides applied on top of the document (flags beat the environment,
/// the environment beats the file).
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub horizon: Option<usize>,
    pub p: Option<String>,
    pub format: Option<Format>,
    pub size_cap: Option<u64>,
}

pub fn load_config(path: Option<&Path>, overrides: &Overrides) -> CliResult<Config> {
    let doc: Value = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| {
                CliError::config(format!("cannot read config {}: {e}", p.display()))
            })?;
            serde_json::from_str(&text).map_err(|e| {
                CliError::config(format!(
                    "config {} is not valid JSON (line {}, column {})",
                    p.display(),
                    e.line(),
                    e.column()
                ))
            })?
        }
        None => serde_json::json!({
            "base": {"kind": "constant", "value": 2},
            "measure": {"family": "uniform"},
        }),
    };
    let base = parse_base(&doc)?;
    let family = parse_family(&doc, base)?;
    let horizon = match overrides.horizon {
        Some(h) => h,
        None => match doc.get("horizon") {
            Some(h) => as_u64(h, "horizon")? as usize,
            None => 20,
        },
    };
    if horizon < 1 {
        return Err(CliError::config("horizon must be ≥ 1"));
    }
    // Keep power-rule digit sizes within u64 for the whole horizon.
    if family.base().alpha_checked(horizon + 2).is_none() {
        return Err(CliError::config(format!(
            "horizon {horizon} overflows the digit sizes of this base rule"
        )));
    }
    let p = match &overrides.p {
        Some(s) => parse_rational(s).map_err(CliError::config)?,
        None => match doc.get("p") {
            Some(v) => rational_field(v, "p")?,
            None => Rational::from_integer(2.into()),
        },
    };
    if p < Rational::from_integer(1.into()) {
        return Err(CliError::config(format!("p = {p} must be ≥ 1")));
    }
    let mut limits = Limits::default();
    if let Some(v) = doc.get("size_cap") {
        limits.size_cap = as_u64(v, "size_cap")?;
    }
    if let Ok(env_cap) = std::env::var("ODOLIN_SIZE_CAP") {
        limits.size_cap = env_cap
            .parse()
            .map_err(|_| CliError::config("ODOLIN_SIZE_CAP must be an integer"))?;
    }
    if let Some(cap) = overrides.size_cap {
        limits.size_cap = cap;
    }
    if let Some(v) = doc.get("psi_sample_cap") {
        limits.psi_sample_cap = as_u64(v, "psi_sample_cap")?;
    }
    limits.psi_sample_cap = limits.psi_sample_cap.min(limits.size_cap);
    let format = match overrides.format {
        Some(f) => f,
        None => match doc.get("format") {
            Some(v) => as_str(v, "format")?
                .parse()
                .map_err(CliError::config)?,
            None => Format::Text,
        },
    };
    Ok(Config {
        family,
        horizon,
        p,
        limits,
        format,
        echo: doc,
    })
}
