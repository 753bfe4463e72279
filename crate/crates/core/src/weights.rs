//! Weight families and their duals.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum WeightSpec {
    /// `σ ≡ c`.
    Constant(f64),
    /// `σ(w) = |w - w2|^s` on the disk.
    PairPower { s: f64, w2: C64 },
    /// `|w1 - w2|^{2l}` on the bidisk.
    PullbackDelta { l: f64 },
    /// `|z1^2 - 4 z2|^{3kp/2}` on the symmetrized bidisk.
    SobolevTarget { k: u32, p: f64 },
}

impl WeightSpec {
    /// Exponent of `|w1 - w2|` for the bidisk families.
    pub fn bidisk_exponent(&self) -> Option<f64> {
        match self {
            Self::PullbackDelta { l } => Some(2.0 * l),
            Self::SobolevTarget { k, p } => Some(3.0 * *k as f64 * p),
            _ => None,
        }
    }

    pub fn is_disk_family(&self) -> bool {
        matches!(self, Self::Constant(_) | Self::PairPower { .. })
    }
}

/// Evaluates a disk weight; `+∞` on the singular point of a negative power.
pub fn eval_disk(w: C64, spec: &WeightSpec) -> Result<f64> {
    match *spec {
        WeightSpec::Constant(c) => Ok(c),
        WeightSpec::PairPower { s, w2 } => {
            if s == 0.0 {
                return Ok(1.0);
            }
            let d = (w - w2).norm();
            if d == 0.0 && s < 0.0 {
                return Ok(f64::INFINITY);
            }
            Ok(d.powf(s))
        }
        _ => Err(Error::UnsupportedFamily(format!("{spec} is not a weight on the disk"))),
    }
}

/// Evaluates a bidisk weight at `(w1, w2)`; disk families act on `w1`.
pub fn eval_bidisk(w1: C64, w2: C64, spec: &WeightSpec) -> Result<f64> {
    match spec.bidisk_exponent() {
        Some(e) => {
            let d = (w1 - w2).norm();
            if d == 0.0 && e < 0.0 {
                return Ok(f64::INFINITY);
            }
            Ok(d.powf(e))
        }
        None => eval_disk(w1, spec),
    }
}

/// `σ^{-1/(p-1)}`.
pub fn dual_weight(spec: &WeightSpec, p: f64) -> Result<WeightSpec> {
    if p <= 1.0 {
        return Err(Error::InvalidExponent(p));
    }
    match *spec {
        WeightSpec::Constant(c) => Ok(WeightSpec::Constant(c.powf(-1.0 / (p - 1.0)))),
        WeightSpec::PairPower { s, w2 } => Ok(WeightSpec::PairPower {
            s: -s / (p - 1.0) + 0.0,
            w2,
        }),
        _ => Err(Error::UnsupportedFamily(format!("no dual defined for {spec}"))),
    }
}

impl fmt::Display for WeightSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Constant(c) => write!(f, "constant:{c}"),
            Self::PairPower { s, w2 } => write!(f, "pair_power:{s}:{}:{}", w2.re, w2.im),
            Self::PullbackDelta { l } => write!(f, "pullback_delta:{l}"),
            Self::SobolevTarget { k, p } => write!(f, "sobolev_target:{k}:{p}"),
        }
    }
}

/// A weight family as named on the command line. The exponent of
/// `pair_power` may be written `2-p`, tying it to the exponent of each run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum WeightFamily {
    Fixed(WeightSpec),
    PairPowerTwoMinusP { w2: C64 },
}

impl WeightFamily {
    pub fn at(&self, p: f64) -> WeightSpec {
        match *self {
            Self::Fixed(s) => s,
            Self::PairPowerTwoMinusP { w2 } => WeightSpec::PairPower { s: 2.0 - p, w2 },
        }
    }

    /// Replaces the singular point of a pair-power family.
    pub fn with_w2(&self, w2: C64) -> Self {
        match *self {
            Self::Fixed(WeightSpec::PairPower { s, .. }) => Self::Fixed(WeightSpec::PairPower { s, w2 }),
            Self::PairPowerTwoMinusP { .. } => Self::PairPowerTwoMinusP { w2 },
            other => other,
        }
    }

    pub fn label(&self) -> String {
        match self {
            Self::Fixed(WeightSpec::PairPower { s, .. }) => format!("pair_power:{s}"),
            Self::Fixed(s) => s.to_string(),
            Self::PairPowerTwoMinusP { .. } => "pair_power:2-p".into(),
        }
    }
}

fn num(field: &str, text: &str) -> Result<f64> {
    text.trim()
        .parse::<f64>()
        .map_err(|_| Error::Config(format!("cannot parse {field} from '{text}'")))
}

impl FromStr for WeightFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let spec = match parts.as_slice() {
            ["constant", c] => {
                let c = num("constant", c)?;
                if c <= 0.0 {
                    return Err(Error::Config(format!("constant weight must be positive, got {c}")));
                }
                WeightSpec::Constant(c)
            }
            ["pair_power", e, re, im] => {
                let w2 = C64::new(num("w2 real part", re)?, num("w2 imaginary part", im)?);
                if e.trim() == "2-p" {
                    return Ok(Self::PairPowerTwoMinusP { w2 });
                }
                WeightSpec::PairPower { s: num("exponent", e)?, w2 }
            }
            ["pullback_delta", l] => WeightSpec::PullbackDelta { l: num("l", l)? },
            ["sobolev_target", k, p] => WeightSpec::SobolevTarget {
                k: k.trim().parse().map_err(|_| Error::Config(format!("cannot parse k from '{k}'")))?,
                p: num("p", p)?,
            },
            _ => return Err(Error::Config(format!("unrecognised weight '{s}'"))),
        };
        Ok(Self::Fixed(spec))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn eval_examples() {
        assert_eq!(eval_disk(c(0.3, 0.3), &WeightSpec::Constant(1.0)).unwrap(), 1.0);
        let pp = WeightSpec::PairPower { s: 2.0, w2: c(0.5, 0.0) };
        assert!((eval_disk(c(0.0, 0.0), &pp).unwrap() - 0.25).abs() < 1e-16);
        let pd = WeightSpec::PullbackDelta { l: 1.5 };
        assert!((eval_bidisk(c(0.6, 0.0), c(0.2, 0.0), &pd).unwrap() - 0.064).abs() < 1e-15);
        let neg = WeightSpec::PairPower { s: -1.0, w2: c(0.5, 0.0) };
        assert_eq!(eval_disk(c(0.5, 0.0), &neg).unwrap(), f64::INFINITY);
        let st = WeightSpec::SobolevTarget { k: 1, p: 3.0 };
        assert!((eval_bidisk(c(0.5, 0.0), c(0.0, 0.0), &st).unwrap() - 0.5f64.powi(9)).abs() < 1e-16);
    }

    #[test]
    fn dual_examples() {
        let w2 = c(0.1, 0.2);
        assert_eq!(
            dual_weight(&WeightSpec::PairPower { s: 2.0, w2 }, 3.0).unwrap(),
            WeightSpec::PairPower { s: -1.0, w2 }
        );
        let at_two = WeightFamily::PairPowerTwoMinusP { w2 }.at(2.0);
        assert_eq!(dual_weight(&at_two, 2.0).unwrap(), WeightSpec::PairPower { s: 0.0, w2 });
        assert_eq!(dual_weight(&WeightSpec::Constant(4.0), 3.0).unwrap(), WeightSpec::Constant(0.5));
        assert_eq!(dual_weight(&WeightSpec::Constant(4.0), 1.0), Err(Error::InvalidExponent(1.0)));
    }

    #[test]
    fn parse_round_trip() {
        for text in ["constant:2", "pair_power:2:0.5:0", "pullback_delta:1.5", "sobolev_target:1:3"] {
            let fam: WeightFamily = text.parse().unwrap();
            let WeightFamily::Fixed(spec) = fam else { panic!() };
            let again: WeightFamily = spec.to_string().parse().unwrap();
            assert_eq!(again, fam);
        }
        let fam: WeightFamily = "pair_power:2-p:0.5:0".parse().unwrap();
        assert_eq!(fam.at(4.5), WeightSpec::PairPower { s: -2.5, w2: c(0.5, 0.0) });
        assert!("pair_power:2".parse::<WeightFamily>().is_err());
        assert!("constant:-1".parse::<WeightFamily>().is_err());
    }
}
