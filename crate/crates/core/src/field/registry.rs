use std::collections::BTreeMap;

use serde_json::Value;

use super::*;
use crate::{Error, Result};

/// Named parameters of a catalog entry, as they appear in config documents.
pub type FieldParams = BTreeMap<String, Value>;

/// Names accepted by [`from_name`], with their parameters and defaults.
pub fn catalog_names() -> &'static [(&'static str, &'static str)] {
    &[
        ("abc", "A=1, B=1, C=1"),
        ("rigid", "omega=1"),
        ("ptg", "(none)"),
        ("strain", "alpha=1, beta=1, gamma=-2"),
        ("shear", "profile=\"sin\""),
        ("expansion", "rho0=1, gamma=1.4, K=1"),
    ]
}

fn check_keys(field: &str, params: &FieldParams, allowed: &[&str]) -> Result<()> {
    for key in params.keys() {
        if !allowed.contains(&key.as_str()) {
            return Err(Error::param(
                key,
                format!("not a parameter of field `{field}` (expected one of {allowed:?})"),
            ));
        }
    }
    Ok(())
}

fn number(params: &FieldParams, key: &str, default: f64) -> Result<f64> {
    match params.get(key) {
        None => Ok(default),
        Some(v) => v
            .as_f64()
            .ok_or_else(|| Error::param(key, format!("expected a number, got {v}"))),
    }
}

/// Builds a catalog field from its name and parameter map.
pub fn from_name(name: &str, params: &FieldParams) -> Result<Box<dyn FlowField>> {
    let field: Box<dyn FlowField> = match name {
        "abc" => {
            check_keys(name, params, &["A", "B", "C"])?;
            Box::new(make_abc(
                number(params, "A", 1.0)?,
                number(params, "B", 1.0)?,
                number(params, "C", 1.0)?,
            )?)
        }
        "rigid" => {
            check_keys(name, params, &["omega"])?;
            Box::new(make_rigid_rotation(number(params, "omega", 1.0)?)?)
        }
        "ptg" => {
            check_keys(name, params, &[])?;
            Box::new(make_planar_taylor_green())
        }
        "strain" => {
            check_keys(name, params, &["alpha", "beta", "gamma"])?;
            Box::new(make_linear_strain(
                number(params, "alpha", 1.0)?,
                number(params, "beta", 1.0)?,
                number(params, "gamma", -2.0)?,
            )?)
        }
        "shear" => {
            check_keys(name, params, &["profile"])?;
            let profile = match params.get("profile") {
                None => "sin",
                Some(Value::String(s)) => s.as_str(),
                Some(v) => {
                    return Err(Error::param(
                        "profile",
                        format!("expected a string, got {v}"),
                    ))
                }
            };
            Box::new(make_shear(profile)?)
        }
        "expansion" => {
            check_keys(name, params, &["rho0", "gamma", "K"])?;
            let closure =
                BarotropicClosure::new(number(params, "gamma", 1.4)?, number(params, "K", 1.0)?)?;
            Box::new(make_free_expansion(number(params, "rho0", 1.0)?, closure)?)
        }
        other => return Err(Error::UnknownField(other.to_string())),
    };
    Ok(field)
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn params(v: Value) -> FieldParams {
        serde_json::from_value(v).unwrap()
    }

    #[test]
    fn every_listed_name_builds_with_defaults() {
        for (name, _) in catalog_names() {
            let f = from_name(name, &FieldParams::new()).unwrap();
            assert_eq!(f.name(), *name);
        }
    }

    #[test]
    fn parameters_are_applied() {
        let f = from_name("rigid", &params(json!({"omega": 2.0}))).unwrap();
        assert_eq!(f.velocity(&Vec3::x(), 0.0), Vec3::new(0.0, 2.0, 0.0));
    }

    #[test]
    fn errors_are_specific() {
        assert!(matches!(
            from_name("vortex", &FieldParams::new()),
            Err(Error::UnknownField(_))
        ));
        assert!(matches!(
            from_name("abc", &params(json!({"D": 1}))),
            Err(Error::InvalidParameter { .. })
        ));
        assert!(matches!(
            from_name("abc", &params(json!({"A": "one"}))),
            Err(Error::InvalidParameter { .. })
        ));
        assert!(matches!(
            from_name("shear", &params(json!({"profile": "cos"}))),
            Err(Error::UnknownProfile(_))
        ));
        assert!(matches!(
            from_name(
                "strain",
                &params(json!({"alpha": 1, "beta": 1, "gamma": 1}))
            ),
            Err(Error::Constraint(_))
        ));
    }
}
