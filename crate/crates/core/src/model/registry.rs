//! String identifiers for models and priors.
//!
//! Models: `normal[:variance]`, `exp`.
//! Priors: `trunc-normal:mu,tau2,a0,b0`, `trunc-gamma:shape,rate,a0,b0`,
//! `bump:a0,b0`, `uniform:a0,b0`.

use std::fmt;
use std::str::FromStr;

use super::{ExponentialRate, NormalLocation, ParametricModel, Prior, PriorKind};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BuiltinModel {
    Normal(NormalLocation),
    Exponential(ExponentialRate),
}

impl BuiltinModel {
    pub fn as_model(&self) -> &dyn ParametricModel {
        match self {
            BuiltinModel::Normal(m) => m,
            BuiltinModel::Exponential(m) => m,
        }
    }
}

impl fmt::Display for BuiltinModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BuiltinModel::Normal(m) => write!(f, "normal:{}", m.variance()),
            BuiltinModel::Exponential(_) => f.write_str("exp"),
        }
    }
}

impl FromStr for BuiltinModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_model(s)
    }
}

fn parse_err(id: &str, reason: impl Into<String>) -> Error {
    Error::Parse {
        id: id.to_string(),
        reason: reason.into(),
    }
}

fn split_id(id: &str) -> (&str, Option<&str>) {
    match id.split_once(':') {
        Some((name, args)) => (name.trim(), Some(args)),
        None => (id.trim(), None),
    }
}

fn parse_args(id: &str, args: Option<&str>, expected: usize) -> Result<Vec<f64>> {
    let Some(args) = args else {
        return Err(parse_err(id, format!("expected {expected} parameters")));
    };
    let values = args
        .split(',')
        .map(|a| {
            a.trim()
                .parse::<f64>()
                .map_err(|e| parse_err(id, format!("bad number `{}`: {e}", a.trim())))
        })
        .collect::<Result<Vec<_>>>()?;
    if values.len() != expected {
        return Err(parse_err(
            id,
            format!("expected {expected} parameters, got {}", values.len()),
        ));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(parse_err(id, "parameters must be finite"));
    }
    Ok(values)
}

pub fn parse_model(id: &str) -> Result<BuiltinModel> {
    match split_id(id) {
        ("normal", None) => Ok(BuiltinModel::Normal(NormalLocation::new(1.0))),
        ("normal", args) => {
            let v = parse_args(id, args, 1)?[0];
            if v <= 0.0 {
                return Err(parse_err(id, "variance must be positive"));
            }
            Ok(BuiltinModel::Normal(NormalLocation::new(v)))
        }
        ("exp", None) => Ok(BuiltinModel::Exponential(ExponentialRate)),
        ("exp", Some(_)) => Err(parse_err(id, "`exp` takes no parameters")),
        (name, _) => Err(parse_err(id, format!("unknown model `{name}`"))),
    }
}

pub fn parse_prior(id: &str) -> Result<Prior> {
    let (name, args) = split_id(id);
    let wrap = |r: Result<Prior>| r.map_err(|e| parse_err(id, e.to_string()));
    match name {
        "trunc-normal" => {
            let p = parse_args(id, args, 4)?;
            wrap(Prior::truncated_normal(p[0], p[1], p[2], p[3]))
        }
        "trunc-gamma" => {
            let p = parse_args(id, args, 4)?;
            wrap(Prior::truncated_gamma(p[0], p[1], p[2], p[3]))
        }
        "bump" => {
            let p = parse_args(id, args, 2)?;
            wrap(Prior::bump(p[0], p[1]))
        }
        "uniform" => {
            let p = parse_args(id, args, 2)?;
            wrap(Prior::uniform(p[0], p[1]))
        }
        other => Err(parse_err(id, format!("unknown prior `{other}`"))),
    }
}

impl fmt::Display for Prior {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (a0, b0) = self.support();
        match self.kind() {
            PriorKind::TruncatedNormal { mean, variance } => {
                write!(f, "trunc-normal:{mean},{variance},{a0},{b0}")
            }
            PriorKind::TruncatedGamma { shape, rate } => {
                write!(f, "trunc-gamma:{shape},{rate},{a0},{b0}")
            }
            PriorKind::Bump => write!(f, "bump:{a0},{b0}"),
            PriorKind::Uniform => write!(f, "uniform:{a0},{b0}"),
        }
    }
}

impl FromStr for Prior {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_prior(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_models() {
        assert_eq!(
            parse_model("normal:2.5").unwrap(),
            BuiltinModel::Normal(NormalLocation::new(2.5))
        );
        assert_eq!(parse_model("normal").unwrap().to_string(), "normal:1");
        assert_eq!(parse_model("exp").unwrap().as_model().name(), "exp");
        assert!(parse_model("normal:-1").is_err());
        assert!(parse_model("exp:3").is_err());
        assert!(parse_model("cauchy").is_err());
    }

    #[test]
    fn parses_priors_and_round_trips() {
        for id in [
            "trunc-normal:0,1,-10,10",
            "trunc-gamma:2,1,0,50",
            "bump:-1,3",
            "uniform:0,1",
        ] {
            let p = parse_prior(id).unwrap();
            assert_eq!(p.to_string(), id);
            assert_eq!(parse_prior(&p.to_string()).unwrap(), p);
        }
        assert!(parse_prior("bump:1").is_err());
        assert!(parse_prior("bump:3,1").is_err());
        assert!(parse_prior("trunc-normal:0,1,a,2").is_err());
        assert!(parse_prior("laplace:0,1").is_err());
    }
}
