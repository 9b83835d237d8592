//! Report assembly and rendering: JSON carries exact rationals as `"p/q"`
//! strings (the format of record), CSV and the decimal columns are
//! approximate renderings at 12 significant digits.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::Zero;
use odolin::Rational;
use serde_json::{json, Map, Value};

pub const SIGNIFICANT_DIGITS: usize = 12;

/// Exact serialization, always `numerator/denominator`.
pub fn rational_str(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Decimal rendering at 12 significant digits, computed by big-integer long
/// division so values far beyond f64 range stay meaningful. Approximate by
/// construction.
pub fn decimal_approx(r: &Rational) -> String {
    if r.is_zero() {
        return "0".to_string();
    }
    let neg = r < &Rational::zero();
    let num = r.numer().magnitude();
    let den = r.denom().magnitude();
    let ten = BigUint::from(10u32);
    // Exponent e with 10^e ≤ |r| < 10^(e+1).
    let cmp_pow = |e: i64| -> std::cmp::Ordering {
        if e >= 0 {
            num.cmp(&(den * ten.pow(e as u32)))
        } else {
            (num * ten.pow((-e) as u32)).cmp(den)
        }
    };
    let mut e = num.to_string().len() as i64 - den.to_string().len() as i64;
    while cmp_pow(e) == std::cmp::Ordering::Less {
        e -= 1;
    }
    while cmp_pow(e + 1) != std::cmp::Ordering::Less {
        e += 1;
    }
    let sig = SIGNIFICANT_DIGITS as i64;
    let shift = sig - 1 - e;
    let (scaled_num, scaled_den) = if shift >= 0 {
        (num * ten.pow(shift as u32), den.clone())
    } else {
        (num.clone(), den * ten.pow((-shift) as u32))
    };
    let (q, rem) = scaled_num.div_rem(&scaled_den);
    let mut mantissa = q;
    if &rem * 2u32 >= scaled_den {
        mantissa += 1u32;
    }
    let mut digits = mantissa.to_string();
    if digits.len() as i64 > sig {
        digits.truncate(sig as usize);
        e += 1;
    }
    let body = if e >= 0 && e < sig {
        let split = (e + 1) as usize;
        let int_part = &digits[..split];
        let frac = digits[split..].trim_end_matches('0');
        if frac.is_empty() {
            int_part.to_string()
        } else {
            format!("{int_part}.{frac}")
        }
    } else if (-4..0).contains(&e) {
        let zeros = "0".repeat((-e - 1) as usize);
        format!("0.{zeros}{}", digits.trim_end_matches('0'))
    } else {
        let frac = digits[1..].trim_end_matches('0');
        if frac.is_empty() {
            format!("{}e{e}", &digits[..1])
        } else {
            format!("{}.{frac}e{e}", &digits[..1])
        }
    };
    if neg {
        format!("-{body}")
    } else {
        body
    }
}

/// A finished command report in all three renderings.
pub struct Report {
    pub config_echo: Value,
    pub results: Value,
    pub rules_fired: Value,
    pub exact: Map<String, Value>,
    pub approx: Map<String, Value>,
    pub text: String,
    pub csv: String,
}

impl Report {
    pub fn new(config_echo: Value) -> Self {
        Report {
            config_echo,
            results: Value::Null,
            rules_fired: json!([]),
            exact: Map::new(),
            approx: Map::new(),
            text: String::new(),
            csv: String::new(),
        }
    }

    /// Record a headline rational under both the exact and approx maps.
    pub fn headline(&mut self, key: &str, value: &Rational) {
        self.exact
            .insert(key.to_string(), Value::String(rational_str(value)));
        self.approx
            .insert(key.to_string(), Value::String(decimal_approx(value)));
    }

    pub fn render(&self, format: crate::config::Format) -> String {
        match format {
            crate::config::Format::Text => self.text.clone(),
            crate::config::Format::Csv => self.csv.clone(),
            crate::config::Format::Json => {
                let doc = json!({
                    "config_echo": self.config_echo,
                    "results": self.results,
                    "rules_fired": self.rules_fired,
                    "exact": Value::Object(self.exact.clone()),
                    "approx": Value::Object(self.approx.clone()),
                });
                serde_json::to_string_pretty(&doc).expect("report serializes")
            }
        }
    }
}

/// `"p/q"` JSON value for exact fields inside `results`.
pub fn exact_value(r: &Rational) -> Value {
    Value::String(rational_str(r))
}

/// Simple aligned text table.
pub fn text_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let mut out = String::new();
    let fmt_row = |cells: Vec<String>, widths: &[usize]| -> String {
        cells
            .iter()
            .zip(widths)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect::<Vec<_>>()
            .join("  ")
            .trim_end()
            .to_string()
    };
    out.push_str(&fmt_row(
        header.iter().map(|s| s.to_string()).collect(),
        &widths,
    ));
    out.push('\n');
    for row in rows {
        out.push_str(&fmt_row(row.clone(), &widths));
        out.push('\n');
    }
    out
}

/// CSV with decimal renderings only; the `_approx` suffix marks every
/// numeric column as approximate.
pub fn csv_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(decimal_approx(&rat(1, 2)), "0.5");
        assert_eq!(decimal_approx(&rat(1, 3)), "0.333333333333");
        assert_eq!(decimal_approx(&rat(2, 1)), "2");
        assert_eq!(decimal_approx(&rat(32, 45)), "0.711111111111");
        assert_eq!(decimal_approx(&rat(-7, 4)), "-1.75");
        assert_eq!(decimal_approx(&rat(1, 10000)), "0.0001");
        assert_eq!(decimal_approx(&rat(1, 100000)), "1e-5");
        assert_eq!(decimal_approx(&rat(1, 10_000_000)), "1e-7");
        // Far beyond f64: 2^2000.
        let huge = Rational::from_integer(num_bigint::BigInt::from(2).pow(2000));
        let s = decimal_approx(&huge);
        assert!(s.ends_with("e602"), "{s}");
    }

    #[test]
    fn exact_round_trip() {
        let values = [rat(1, 3), rat(22, 7), rat(0, 1), rat(-5, 8)];
        for v in &values {
            let s = rational_str(v);
            let back = crate::config::parse_rational(&s).unwrap();
            assert_eq!(&back, v);
        }
    }
}
