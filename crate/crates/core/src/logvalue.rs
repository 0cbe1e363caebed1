use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// A complex number stored as `(ln |w|, arg w)`.
///
/// The value zero is encoded by `log_modulus == -inf`; its argument is
/// meaningless and kept at 0.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogComplexValue {
    #[serde(with = "crate::logvalue::extended_f64")]
    pub log_modulus: f64,
    pub argument: f64,
}

impl LogComplexValue {
    pub const ZERO: LogComplexValue = LogComplexValue {
        log_modulus: f64::NEG_INFINITY,
        argument: 0.0,
    };

    pub const ONE: LogComplexValue = LogComplexValue {
        log_modulus: 0.0,
        argument: 0.0,
    };

    /// Builds a value from a log-modulus and an unreduced argument.
    pub fn new(log_modulus: f64, argument: f64) -> Self {
        if log_modulus == f64::NEG_INFINITY {
            return Self::ZERO;
        }
        Self {
            log_modulus,
            argument: reduce_angle(argument),
        }
    }

    /// Log of a complex number given as a complex logarithm `ln w`.
    pub fn from_log(ln: Complex64) -> Self {
        Self::new(ln.re, ln.im)
    }

    pub fn from_complex(w: Complex64) -> Self {
        if w.re == 0.0 && w.im == 0.0 {
            return Self::ZERO;
        }
        Self::new(w.norm().ln(), w.arg())
    }

    pub fn is_zero(&self) -> bool {
        self.log_modulus == f64::NEG_INFINITY
    }

    /// Converts back to a native complex number; overflows to infinity
    /// for large moduli.
    pub fn to_complex(&self) -> Complex64 {
        if self.is_zero() {
            return Complex64::new(0.0, 0.0);
        }
        Complex64::from_polar(self.log_modulus.exp(), self.argument)
    }
}

/// Reduces an angle to `(-pi, pi]`.
pub fn reduce_angle(theta: f64) -> f64 {
    if !theta.is_finite() {
        return theta;
    }
    let mut t = theta.rem_euclid(TAU);
    if t > PI {
        t -= TAU;
    }
    t
}

/// Neumaier-compensated running sum.
#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// Serde helper: JSON has no infinities, so `-inf`/`inf`/`NaN` are written
/// as strings.
pub(crate) mod extended_f64 {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_finite() {
            Repr::Num(*x).serialize(s)
        } else if x.is_nan() {
            Repr::Text("NaN".into()).serialize(s)
        } else if *x > 0.0 {
            Repr::Text("inf".into()).serialize(s)
        } else {
            Repr::Text("-inf".into()).serialize(s)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(x) => Ok(x),
            Repr::Text(t) => match t.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "NaN" => Ok(f64::NAN),
                other => Err(serde::de::Error::custom(format!("bad number {other}"))),
            },
        }
    }

    pub mod vec {
        use serde::{Deserialize, Deserializer, Serialize, Serializer};

        #[derive(Serialize, Deserialize)]
        struct Wrap(#[serde(with = "super")] f64);

        pub fn serialize<S: Serializer>(xs: &[f64], s: S) -> Result<S::Ok, S::Error> {
            let v: Vec<Wrap> = xs.iter().map(|x| Wrap(*x)).collect();
            v.serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
            let v: Vec<Wrap> = Vec::deserialize(d)?;
            Ok(v.into_iter().map(|w| w.0).collect())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn angle_reduction_range() {
        assert_eq!(reduce_angle(PI), PI);
        assert!((reduce_angle(-PI) - PI).abs() < 1e-15);
        assert!((reduce_angle(3.0 * PI + 0.5) - (-PI + 0.5)).abs() < 1e-12);
    }

    #[test]
    fn zero_sentinel_roundtrip() {
        let z = LogComplexValue::from_complex(Complex64::new(0.0, 0.0));
        assert!(z.is_zero());
        let json = serde_json::to_string(&z).unwrap();
        let back: LogComplexValue = serde_json::from_str(&json).unwrap();
        assert!(back.is_zero());
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut s = CompensatedSum::default();
        s.add(1e16);
        for _ in 0..1000 {
            s.add(1.0);
        }
        s.add(-1e16);
        assert_eq!(s.value(), 1000.0);
    }
}
