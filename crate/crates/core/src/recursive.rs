//! Materialization of the recursively defined zero sequences.
//!
//! Values are kept as exact integers while the recursion stays integral and
//! the numbers stay below a size cap; past that point they are carried as
//! logarithms and the integer parts get a recorded slack of one.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::spec::RecursiveRule;

const LN_12: f64 = 2.484_906_649_788_000_3;
const MAX_EXACT_BITS: u64 = 1 << 17;

/// One zero `a_k` with multiplicity `m_k` and counting value `n(a_k)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstructedZero {
    pub index: u32,
    pub log_a: f64,
    #[serde(with = "opt_big")]
    pub exact_a: Option<BigUint>,
    /// `n(a_k) = Σ_{j<=k} m_j`.
    #[serde(with = "opt_big")]
    pub count_exact: Option<BigUint>,
    pub log_count: f64,
    #[serde(with = "opt_big")]
    pub mult_exact: Option<BigUint>,
    pub log_mult: f64,
    /// Multiplicity as a float; `+inf` once it leaves the native range.
    #[serde(with = "crate::logvalue::extended_f64")]
    pub weight: f64,
    /// Uncertainty of `count` in units (0 when exact).
    pub slack: f64,
}

impl ConstructedZero {
    pub fn count_f64(&self) -> f64 {
        match &self.count_exact {
            Some(n) => n.to_f64().unwrap_or(f64::INFINITY),
            None => self.log_count.exp(),
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Limits {
    pub max_k: u32,
    pub max_log_a: f64,
    pub max_weight: f64,
}

pub const EVAL_LIMITS: Limits = Limits {
    max_k: 600,
    max_log_a: 4000.0,
    max_weight: 1e300,
};

pub fn biguint_ln(x: &BigUint) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = x.bits();
    if bits < 1000 {
        return x.to_f64().expect("fits").ln();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_f64().expect("64 bits");
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// `rho = p/q` with a small denominator, if there is one.
fn rational(rho: f64) -> Option<(u32, u32)> {
    (1..=64u32).find_map(|q| {
        let pq = rho * q as f64;
        let p = pq.round();
        ((pq - p).abs() < 1e-12 && p >= 1.0).then_some((p as u32, q))
    })
}

/// Floor of `a^(p/q)` and whether the root is exact; `None` when too large.
fn floor_rational_power(a: &BigUint, p: u32, q: u32) -> Option<(BigUint, bool)> {
    if a.bits().saturating_mul(p as u64) > MAX_EXACT_BITS {
        return None;
    }
    let x = a.pow(p);
    let root = x.nth_root(q);
    let exact = root.pow(q) == x;
    Some((root, exact))
}

struct Count {
    exact: Option<BigUint>,
    log: f64,
    slack: f64,
}

fn count_for(a_exact: Option<&BigUint>, log_a: f64, p: u32, q: u32) -> Count {
    if let Some(a) = a_exact {
        if let Some((n, _)) = floor_rational_power(a, p, q) {
            let log = biguint_ln(&n);
            return Count {
                exact: Some(n),
                log,
                slack: 0.0,
            };
        }
    }
    let log = log_a * p as f64 / q as f64;
    if log < 36.0 {
        // a^rho below 4e15: the floor in native arithmetic is exact up to
        // the accuracy of log_a itself
        let v = log.exp().floor();
        return Count {
            exact: Some(BigUint::from(v as u64)),
            log: v.ln(),
            slack: 1.0,
        };
    }
    Count {
        exact: None,
        log,
        slack: 1.0,
    }
}

/// Materializes `a_1, a_2, ...` until one of the limits is hit.
pub fn materialize(rule: RecursiveRule, limits: Limits) -> Vec<ConstructedZero> {
    let frac = match rule {
        RecursiveRule::Construction { rho } => rational(rho),
        RecursiveRule::ConstructionOrder1 => None,
    };
    let mut out: Vec<ConstructedZero> = Vec::new();
    let mut a_exact: Option<BigUint> = Some(BigUint::one());
    let mut log_a = 0.0_f64;
    // a_{k-1}^rho for the construction rule: (floor, exact?)
    let mut prev_power: Option<(BigUint, bool)> = Some((BigUint::one(), true));
    let mut prev_count_exact: Option<BigUint> = Some(BigUint::zero());
    let mut prev_log_count = f64::NEG_INFINITY;

    for k in 1..=limits.max_k {
        // a_k from a_{k-1}
        let (next_exact, next_log) = match rule {
            RecursiveRule::Construction { rho } => {
                let next_log = (LN_12 + rho * log_a) / (1.0 - rho);
                let exact = match (frac, &prev_power) {
                    (Some((p, q)), Some((root, true))) => {
                        let base = root * 12u32;
                        if base.bits().saturating_mul(q as u64) > MAX_EXACT_BITS {
                            None
                        } else {
                            let y = base.pow(q);
                            let t = y.nth_root(q - p);
                            (t.pow(q - p) == y).then_some(t)
                        }
                    }
                    _ => None,
                };
                (exact, next_log)
            }
            RecursiveRule::ConstructionOrder1 => {
                let kf = k as f64;
                let next_log = kf * (LN_12 + log_a);
                let exact = a_exact.as_ref().and_then(|a| {
                    let base = a * 12u32;
                    (base.bits().saturating_mul(k as u64) <= MAX_EXACT_BITS).then(|| base.pow(k))
                });
                (exact, next_log)
            }
        };
        let next_log = next_exact.as_ref().map_or(next_log, biguint_ln);
        if next_log > limits.max_log_a {
            break;
        }
        a_exact = next_exact;
        log_a = next_log;

        let (p, q) = match rule {
            RecursiveRule::Construction { .. } => frac.unwrap_or((0, 0)),
            RecursiveRule::ConstructionOrder1 => (k - 1, k),
        };
        let count = if q == 0 {
            // irrational rho: log-space only
            let rho = match rule {
                RecursiveRule::Construction { rho } => rho,
                RecursiveRule::ConstructionOrder1 => unreachable!(),
            };
            let log = rho * log_a;
            if log < 36.0 {
                let v = log.exp().floor();
                Count {
                    exact: Some(BigUint::from(v as u64)),
                    log: v.ln(),
                    slack: 1.0,
                }
            } else {
                Count {
                    exact: None,
                    log,
                    slack: 1.0,
                }
            }
        } else {
            count_for(a_exact.as_ref(), log_a, p, q)
        };
        if let RecursiveRule::Construction { .. } = rule {
            prev_power = match (&a_exact, frac) {
                (Some(a), Some((p, q))) => floor_rational_power(a, p, q),
                _ => None,
            };
        }

        let (mult_exact, log_mult) = match (&count.exact, &prev_count_exact) {
            (Some(n), Some(prev)) if n >= prev => {
                let m = n - prev;
                let lm = biguint_ln(&m);
                (Some(m), lm)
            }
            _ => {
                let lm = count.log + (-(prev_log_count - count.log).exp()).ln_1p();
                (None, lm)
            }
        };
        let weight = match &mult_exact {
            Some(m) => m.to_f64().unwrap_or(f64::INFINITY),
            None => log_mult.exp(),
        };
        if weight > limits.max_weight {
            break;
        }
        let slack = if count.slack > 0.0 || out.last().is_some_and(|z| z.slack > 0.0) {
            count.slack.max(1.0)
        } else {
            0.0
        };
        prev_count_exact = count.exact.clone();
        prev_log_count = count.log;
        out.push(ConstructedZero {
            index: k,
            log_a,
            exact_a: a_exact.clone(),
            count_exact: count.exact,
            log_count: count.log,
            mult_exact,
            log_mult,
            weight,
            slack,
        });
    }
    out
}

mod opt_big {
    use num_bigint::BigUint;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Option<BigUint>, s: S) -> Result<S::Ok, S::Error> {
        match x {
            Some(v) => s.serialize_some(&v.to_str_radix(10)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<BigUint>, D::Error> {
        let v: Option<String> = Option::deserialize(d)?;
        v.map(|t| BigUint::parse_bytes(t.as_bytes(), 10).ok_or_else(|| serde::de::Error::custom("bad integer")))
            .transpose()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(x: u64) -> BigUint {
        BigUint::from(x)
    }

    #[test]
    fn half_construction_is_powers_of_144() {
        let zs = materialize(RecursiveRule::Construction { rho: 0.5 }, Limits { max_k: 8, ..EVAL_LIMITS });
        assert_eq!(zs.len(), 8);
        let mut a = big(1);
        for z in &zs {
            a *= 144u32;
            assert_eq!(z.exact_a.as_ref(), Some(&a));
            assert_eq!(z.slack, 0.0);
        }
        assert_eq!(zs[0].mult_exact, Some(big(12)));
        assert_eq!(zs[1].mult_exact, Some(big(132)));
        assert_eq!(zs[2].mult_exact, Some(big(1584)));
        assert_eq!(zs[2].exact_a, Some(big(2_985_984)));
    }

    #[test]
    fn order_one_construction_first_terms() {
        let zs = materialize(RecursiveRule::ConstructionOrder1, Limits { max_k: 3, ..EVAL_LIMITS });
        assert_eq!(zs[0].exact_a, Some(big(12)));
        assert_eq!(zs[0].mult_exact, Some(big(1)));
        assert_eq!(zs[1].exact_a, Some(big(20736)));
        assert_eq!(zs[1].mult_exact, Some(big(143)));
        assert_eq!(zs[2].exact_a, Some(big(248_832u64.pow(3))));
        assert_eq!(zs[2].count_exact, Some(big(248_832u64.pow(2))));
    }

    #[test]
    fn three_quarter_construction_is_exact() {
        let zs = materialize(RecursiveRule::Construction { rho: 0.75 }, Limits { max_k: 3, ..EVAL_LIMITS });
        assert_eq!(zs[0].exact_a, Some(big(20736)));
        assert_eq!(zs[0].mult_exact, Some(big(1728)));
        assert_eq!(zs[1].exact_a, Some(BigUint::from(12u32).pow(16)));
        assert!(zs.iter().all(|z| z.slack == 0.0));
    }

    #[test]
    fn irrational_rho_falls_back_to_logs() {
        let zs = materialize(RecursiveRule::Construction { rho: 0.6 }, Limits { max_k: 4, ..EVAL_LIMITS });
        assert!((zs[0].log_a - 2.5 * LN_12).abs() < 1e-12);
        assert!(zs[0].exact_a.is_none());
        assert!(zs.iter().all(|z| z.slack == 1.0));
        assert!(zs.windows(2).all(|w| w[1].log_a > w[0].log_a));
    }

    #[test]
    fn ln_of_large_integers() {
        let x = BigUint::from(12u32).pow(400);
        assert!((biguint_ln(&x) - 400.0 * LN_12).abs() < 1e-9);
    }
}
