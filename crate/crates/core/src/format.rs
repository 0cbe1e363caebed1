//! Plain-text `key = value` serialization of [`EntireFunctionSpec`].
//!
//! ```text
//! origin_power = 0
//! poly = 0 0 -1
//! factor_index = 0
//! generator = power-law
//! scale = 1
//! exponent = 2
//! ```
//!
//! Explicit zeros use `generator = list` followed by `zero = location multiplicity`
//! lines. Blank lines and lines starting with `#` are ignored.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::spec::{
    ClosedForm, EntireFunctionSpec, PowerLaw, RealPolynomial, RecursiveRule, RecursiveZeros, ZeroEntry,
    ZeroSequence,
};

/// Writes a spec in the text format. Floats use the shortest representation
/// that parses back to the same value.
pub fn to_text(spec: &EntireFunctionSpec) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "origin_power = {}", spec.origin_power);
    let coeffs: Vec<String> = spec.exponent_poly.coefficients().iter().map(|c| format!("{c}")).collect();
    let _ = writeln!(out, "poly = {}", coeffs.join(" "));
    let _ = writeln!(out, "factor_index = {}", spec.factor_index);
    if let Some(cf) = spec.closed_form {
        let _ = writeln!(out, "closed_form = {}", cf.name());
    }
    match &spec.zeros {
        ZeroSequence::Finite(entries) => {
            let _ = writeln!(out, "generator = list");
            for e in entries {
                let _ = writeln!(out, "zero = {} {}", e.location, e.multiplicity);
            }
        }
        ZeroSequence::PowerLaw(p) => {
            let _ = writeln!(out, "generator = power-law");
            let _ = writeln!(out, "scale = {}", p.scale);
            let _ = writeln!(out, "exponent = {}", p.exponent);
            let _ = writeln!(out, "log_exponent = {}", p.log_exponent);
            let _ = writeln!(out, "shift = {}", p.shift);
            let _ = writeln!(out, "start = {}", p.start);
            let _ = writeln!(out, "multiplicity = {}", p.multiplicity);
            let _ = writeln!(out, "symmetric = {}", p.symmetric);
        }
        ZeroSequence::Recursive(r) => {
            let _ = writeln!(out, "generator = recursive");
            match r.rule {
                RecursiveRule::Construction { rho } => {
                    let _ = writeln!(out, "rule = construction");
                    let _ = writeln!(out, "rho = {rho}");
                }
                RecursiveRule::ConstructionOrder1 => {
                    let _ = writeln!(out, "rule = construction-order1");
                }
            }
            let _ = writeln!(out, "squared = {}", r.squared);
        }
    }
    out
}

struct Fields {
    values: BTreeMap<String, (usize, String)>,
    zeros: Vec<(usize, String)>,
}

impl Fields {
    fn take(&mut self, key: &str) -> Option<(usize, String)> {
        self.values.remove(key)
    }

    fn parse<T: std::str::FromStr>(&mut self, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        match self.take(key) {
            None => Ok(None),
            Some((line, v)) => v.parse::<T>().map(Some).map_err(|e| Error::Parse {
                line,
                field: key.to_string(),
                message: format!("cannot parse `{v}`: {e}"),
            }),
        }
    }

    fn require<T: std::str::FromStr>(&mut self, key: &str, last_line: usize) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        self.parse(key)?.ok_or_else(|| Error::Parse {
            line: last_line,
            field: key.to_string(),
            message: "missing required field".into(),
        })
    }
}

/// Parses the text format. Errors carry the offending line and field.
pub fn from_text(text: &str) -> Result<EntireFunctionSpec> {
    let mut fields = Fields {
        values: BTreeMap::new(),
        zeros: Vec::new(),
    };
    let mut last_line = 0;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        last_line = line;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let (key, value) = trimmed.split_once('=').ok_or_else(|| Error::Parse {
            line,
            field: trimmed.to_string(),
            message: "expected `key = value`".into(),
        })?;
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        if key == "zero" {
            fields.zeros.push((line, value));
        } else if let Some((prev, _)) = fields.values.get(&key) {
            return Err(Error::Parse {
                line,
                field: key,
                message: format!("duplicate field (first on line {prev})"),
            });
        } else {
            fields.values.insert(key, (line, value));
        }
    }
    let origin_power: u32 = fields.parse("origin_power")?.unwrap_or(0);
    let poly = match fields.take("poly") {
        None => RealPolynomial::zero(),
        Some((line, v)) => {
            let coeffs = v
                .split_whitespace()
                .map(|t| {
                    t.parse::<f64>().map_err(|e| Error::Parse {
                        line,
                        field: "poly".into(),
                        message: format!("cannot parse `{t}`: {e}"),
                    })
                })
                .collect::<Result<Vec<f64>>>()?;
            RealPolynomial::new(coeffs).map_err(|e| Error::Parse {
                line,
                field: "poly".into(),
                message: e.to_string(),
            })?
        }
    };
    let factor_index: Option<u32> = fields.parse("factor_index")?;
    let closed_form = match fields.take("closed_form") {
        None => None,
        Some((line, v)) => Some(ClosedForm::from_name(&v).ok_or_else(|| Error::Parse {
            line,
            field: "closed_form".into(),
            message: format!("unknown closed form `{v}`"),
        })?),
    };
    let (gen_line, generator) = fields.take("generator").unwrap_or((0, "list".into()));
    let zeros = match generator.as_str() {
        "list" => {
            let mut entries = Vec::new();
            for (line, v) in std::mem::take(&mut fields.zeros) {
                let parts: Vec<&str> = v.split_whitespace().collect();
                let bad = |message: String| Error::Parse {
                    line,
                    field: "zero".into(),
                    message,
                };
                if parts.is_empty() || parts.len() > 2 {
                    return Err(bad(format!("expected `location [multiplicity]`, got `{v}`")));
                }
                let loc: f64 = parts[0].parse().map_err(|e| bad(format!("location `{}`: {e}", parts[0])))?;
                let mult: u64 = match parts.get(1) {
                    Some(t) => t.parse().map_err(|e| bad(format!("multiplicity `{t}`: {e}")))?,
                    None => 1,
                };
                entries.push(ZeroEntry::new(loc, mult).map_err(|e| bad(e.to_string()))?);
            }
            ZeroSequence::finite(entries)
        }
        "power-law" => {
            let law = PowerLaw {
                scale: fields.require("scale", last_line)?,
                exponent: fields.require("exponent", last_line)?,
                log_exponent: fields.parse("log_exponent")?.unwrap_or(0.0),
                shift: fields.parse("shift")?.unwrap_or(0.0),
                start: fields.parse("start")?.unwrap_or(1),
                multiplicity: fields.parse("multiplicity")?.unwrap_or(1),
                symmetric: fields.parse("symmetric")?.unwrap_or(false),
            };
            law.validate().map_err(|e| Error::Parse {
                line: gen_line,
                field: "generator".into(),
                message: e.to_string(),
            })?;
            ZeroSequence::PowerLaw(law)
        }
        "recursive" => {
            let (rule_line, rule) = fields.take("rule").ok_or_else(|| Error::Parse {
                line: last_line,
                field: "rule".into(),
                message: "missing required field".into(),
            })?;
            let rule = match rule.as_str() {
                "construction" => RecursiveRule::Construction {
                    rho: fields.require("rho", last_line)?,
                },
                "construction-order1" => RecursiveRule::ConstructionOrder1,
                other => {
                    return Err(Error::Parse {
                        line: rule_line,
                        field: "rule".into(),
                        message: format!("unknown recursive rule `{other}`"),
                    })
                }
            };
            let squared = fields.parse("squared")?.unwrap_or(false);
            ZeroSequence::Recursive(RecursiveZeros::new(rule, squared).map_err(|e| Error::Parse {
                line: rule_line,
                field: "rule".into(),
                message: e.to_string(),
            })?)
        }
        other => {
            return Err(Error::Parse {
                line: gen_line,
                field: "generator".into(),
                message: format!("unknown generator `{other}`"),
            })
        }
    };
    if let Some((line, _)) = fields.zeros.first() {
        return Err(Error::Parse {
            line: *line,
            field: "zero".into(),
            message: format!("zero lines need `generator = list`, found `{generator}`"),
        });
    }
    if let Some((key, (line, _))) = fields.values.iter().next() {
        return Err(Error::Parse {
            line: *line,
            field: key.clone(),
            message: "unknown field".into(),
        });
    }
    let factor_index = match factor_index {
        Some(m) => m,
        None => zeros.minimal_factor_index()?,
    };
    EntireFunctionSpec::new(origin_power, poly, zeros, factor_index, closed_form)
}

pub fn read_spec(path: &Path) -> Result<EntireFunctionSpec> {
    from_text(&std::fs::read_to_string(path)?)
}

pub fn write_spec(spec: &EntireFunctionSpec, path: &Path) -> Result<()> {
    std::fs::write(path, to_text(spec))?;
    Ok(())
}
