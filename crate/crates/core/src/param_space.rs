//! Bounded continuous parameter spaces and the native ↔ unit-cube scaling.
//!
//! Surrogates and acquisition work on `[0, 1]^D`; tasks are evaluated in
//! native units. The two maps here are the only crossing between the two.

use alloc::borrow::ToOwned;
use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{validation, Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Parameter {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
    #[serde(default)]
    pub unit: String,
}

impl Parameter {
    pub fn new(name: &str, lower: f64, upper: f64, unit: &str) -> Self {
        Self { name: name.to_owned(), lower, upper, unit: unit.to_owned() }
    }

    fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

/// An ordered, non-empty list of uniquely named bounded parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Parameter>", into = "Vec<Parameter>")]
pub struct ParameterSpace {
    params: Vec<Parameter>,
}

/// A point in native units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Configuration {
    pub values: Vec<f64>,
}

impl Configuration {
    pub fn new(values: Vec<f64>) -> Self {
        Self { values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

impl From<Vec<f64>> for Configuration {
    fn from(values: Vec<f64>) -> Self {
        Self { values }
    }
}

impl ParameterSpace {
    pub fn new(params: Vec<Parameter>) -> Result<Self> {
        if params.is_empty() {
            return Err(validation("parameter space needs at least one parameter"));
        }
        let mut seen = BTreeSet::new();
        for p in &params {
            if !(p.lower.is_finite() && p.upper.is_finite()) || p.lower >= p.upper {
                return Err(Error::Parameter {
                    name: p.name.clone(),
                    reason: format!("bounds [{}, {}] must satisfy lower < upper", p.lower, p.upper),
                });
            }
            if !seen.insert(p.name.as_str()) {
                return Err(Error::Parameter {
                    name: p.name.clone(),
                    reason: "duplicate parameter name".into(),
                });
            }
        }
        Ok(Self { params })
    }

    pub fn dim(&self) -> usize {
        self.params.len()
    }

    pub fn params(&self) -> &[Parameter] {
        &self.params
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.params.iter().map(|p| p.name.as_str())
    }

    /// Checks length and bounds; the error names the offending parameter.
    pub fn validate(&self, c: &Configuration) -> Result<()> {
        if c.len() != self.dim() {
            return Err(validation(format!(
                "configuration has {} values, space has {} parameters",
                c.len(),
                self.dim()
            )));
        }
        for (p, &v) in self.params.iter().zip(&c.values) {
            if !(v >= p.lower && v <= p.upper) {
                return Err(Error::Parameter {
                    name: p.name.clone(),
                    reason: format!("value {v} outside [{}, {}]", p.lower, p.upper),
                });
            }
        }
        Ok(())
    }

    pub fn to_unit(&self, c: &Configuration) -> Result<Vec<f64>> {
        self.validate(c)?;
        Ok(self
            .params
            .iter()
            .zip(&c.values)
            .map(|(p, &v)| ((v - p.lower) / p.width()).clamp(0.0, 1.0))
            .collect())
    }

    pub fn from_unit(&self, u: &[f64]) -> Result<Configuration> {
        check_unit(u, self.dim())?;
        Ok(Configuration::new(
            self.params
                .iter()
                .zip(u)
                .map(|(p, &x)| (p.lower + x * p.width()).clamp(p.lower, p.upper))
                .collect(),
        ))
    }

    /// Center of the box, in native units.
    pub fn midpoint(&self) -> Configuration {
        Configuration::new(self.params.iter().map(|p| 0.5 * (p.lower + p.upper)).collect())
    }

    pub fn lower_corner(&self) -> Configuration {
        Configuration::new(self.params.iter().map(|p| p.lower).collect())
    }

    pub fn upper_corner(&self) -> Configuration {
        Configuration::new(self.params.iter().map(|p| p.upper).collect())
    }

    /// True when every bound of `self` lies inside the matching bound of `outer`
    /// and the names agree position by position.
    pub fn is_subspace_of(&self, outer: &ParameterSpace) -> bool {
        self.dim() == outer.dim()
            && self
                .params
                .iter()
                .zip(&outer.params)
                .all(|(a, b)| a.name == b.name && a.lower >= b.lower && a.upper <= b.upper)
    }
}

impl TryFrom<Vec<Parameter>> for ParameterSpace {
    type Error = Error;

    fn try_from(params: Vec<Parameter>) -> Result<Self> {
        Self::new(params)
    }
}

impl From<ParameterSpace> for Vec<Parameter> {
    fn from(space: ParameterSpace) -> Self {
        space.params
    }
}

/// Validates a unit-cube vector of the expected dimension.
pub fn check_unit(u: &[f64], dim: usize) -> Result<()> {
    if u.len() != dim {
        return Err(validation(format!("unit vector has {} components, expected {dim}", u.len())));
    }
    if let Some((i, x)) = u.iter().enumerate().find(|(_, x)| !(**x >= 0.0 && **x <= 1.0)) {
        return Err(validation(format!("unit component {i} = {x} outside [0, 1]")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn space() -> ParameterSpace {
        ParameterSpace::new(vec![
            Parameter::new("a", 0.0, 10.0, "m"),
            Parameter::new("b", 2.0, 4.0, "s"),
            Parameter::new("c", -1.0, 1.0, ""),
        ])
        .unwrap()
    }

    #[test]
    fn to_unit_examples() {
        let s = space();
        let u = s.to_unit(&Configuration::new(vec![5.0, 4.0, -1.0])).unwrap();
        assert_eq!(u, vec![0.5, 1.0, 0.0]);
        let u = s.to_unit(&Configuration::new(vec![0.0, 2.0, 1.0])).unwrap();
        assert_eq!(u, vec![0.0, 0.0, 1.0]);
    }

    #[test]
    fn from_unit_examples() {
        let s = space();
        let c = s.from_unit(&[0.5, 0.5, 0.0]).unwrap();
        assert_eq!(c.values, vec![5.0, 3.0, -1.0]);
    }

    #[test]
    fn out_of_bounds_names_parameter() {
        let s = space();
        let err = s.to_unit(&Configuration::new(vec![5.0, 4.5, 0.0])).unwrap_err();
        match err {
            Error::Parameter { name, .. } => assert_eq!(name, "b"),
            other => panic!("unexpected {other:?}"),
        }
        assert!(s.from_unit(&[0.5, 1.01, 0.0]).is_err());
        assert!(s.from_unit(&[0.5, 0.5]).is_err());
        assert!(s.from_unit(&[f64::NAN, 0.5, 0.5]).is_err());
    }

    #[test]
    fn rejects_bad_spaces() {
        assert!(ParameterSpace::new(vec![]).is_err());
        assert!(ParameterSpace::new(vec![Parameter::new("x", 1.0, 1.0, "")]).is_err());
        assert!(ParameterSpace::new(vec![
            Parameter::new("x", 0.0, 1.0, ""),
            Parameter::new("x", 0.0, 2.0, ""),
        ])
        .is_err());
    }
}
