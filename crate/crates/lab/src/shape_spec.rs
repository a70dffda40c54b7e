//! JSON description of a pulse shape in laboratory units.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use superbroad_core::shapes::{amplitude_for_area, Family, PulseShape};
use superbroad_core::units::{mhz_to_rad_per_ns, POWER_LAW_DURATION_NS, QUADRATIC_DURATION_NS};

use crate::exit::LabError;

/// Shape file schema. Exactly one of `omega0_mhz` and `area` fixes the amplitude;
/// `duration_ns` defaults per family.
///
/// ```json
/// {"family": "quadratic", "beta": 1.0, "omega0_mhz": 8.437, "duration_ns": 177.8}
/// ```
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShapeSpec {
    pub family: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, alias = "P", skip_serializing_if = "Option::is_none")]
    pub p: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma_ns: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau_ns: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega0_mhz: Option<f64>,
    /// Pulse area in radians.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub area: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub duration_ns: Option<f64>,
}

fn need<T: Copy>(v: Option<T>, what: &str, family: &str) -> Result<T, LabError> {
    v.ok_or_else(|| LabError::Usage(format!("family '{family}' needs {what}")))
}

/// Default window: 800 clock samples for most families, 1600 for power laws.
pub fn default_duration(family: &Family) -> f64 {
    match family {
        Family::PowerLaw { .. } => POWER_LAW_DURATION_NS,
        _ => QUADRATIC_DURATION_NS,
    }
}

impl ShapeSpec {
    pub fn from_json(text: &str) -> Result<Self, LabError> {
        serde_json::from_str(text).map_err(|e| LabError::Usage(format!("bad shape file: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("shape spec serialises")
    }

    pub fn family(&self) -> Result<Family, LabError> {
        let name = self.family.to_ascii_lowercase();
        Ok(match name.as_str() {
            "rectangular" | "rect" => Family::Rectangular,
            "quadratic" => Family::Quadratic {
                beta: need(self.beta, "beta", &name)?,
            },
            "powerlaw" | "power-law" => Family::PowerLaw {
                p: need(self.p, "p", &name)?,
            },
            "gaussian" => Family::Gaussian {
                sigma: need(self.sigma_ns, "sigma_ns", &name)?,
            },
            "sech" => Family::Sech {
                tau: need(self.tau_ns, "tau_ns", &name)?,
            },
            "sampled" => Family::Sampled {
                values: self
                    .values
                    .clone()
                    .ok_or_else(|| LabError::Usage("family 'sampled' needs values".into()))?,
            },
            other => return Err(LabError::Usage(format!("unknown family '{other}'"))),
        })
    }

    pub fn duration(&self, family: &Family) -> f64 {
        self.duration_ns.unwrap_or_else(|| default_duration(family))
    }

    /// Shape with Ω₀ = 0; family and duration only.
    pub fn template(&self) -> Result<PulseShape, LabError> {
        let family = self.family()?;
        let duration = self.duration(&family);
        Ok(PulseShape::new(family, 0.0, duration)?)
    }

    pub fn build(&self) -> Result<PulseShape, LabError> {
        let family = self.family()?;
        let duration = self.duration(&family);
        let omega0 = match (self.omega0_mhz, self.area) {
            (Some(mhz), None) => mhz_to_rad_per_ns(mhz),
            (None, Some(area)) => amplitude_for_area(&family, duration, area)?,
            (None, None) => return Err(LabError::Usage("shape needs omega0_mhz or area".into())),
            (Some(_), Some(_)) => {
                return Err(LabError::Usage("give either omega0_mhz or area, not both".into()))
            }
        };
        Ok(PulseShape::new(family, omega0, duration)?)
    }
}

/// Parses `pi`, `3pi`, `0.5pi`, `π` or a plain number of radians.
pub fn parse_area(text: &str) -> Result<f64, String> {
    let t = text.trim().to_ascii_lowercase().replace('π', "pi");
    let value = if let Some(head) = t.strip_suffix("pi") {
        let head = head.trim_end_matches('*');
        let k = if head.is_empty() { 1.0 } else { head.parse::<f64>().map_err(|e| e.to_string())? };
        k * PI
    } else {
        t.parse::<f64>().map_err(|e| e.to_string())?
    };
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(format!("area must be positive, got '{text}'"))
    }
}

/// Area in units of π, for labels.
pub fn area_label(area: f64) -> String {
    let k = area / PI;
    if (k - k.round()).abs() < 1e-9 {
        match k.round() as i64 {
            1 => "pi".into(),
            n => format!("{n}pi"),
        }
    } else {
        format!("{area:.6}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use superbroad_core::units::rad_per_ns_to_mhz;

    #[test]
    fn parses_file_schema() {
        let s = ShapeSpec::from_json(r#"{"family":"quadratic","beta":1.0,"omega0_mhz":8.0,"duration_ns":177.8}"#).unwrap();
        let shape = s.build().unwrap();
        assert_eq!(shape.id(), "quadratic(beta=1)");
        assert_eq!(shape.duration(), 177.8);
        assert!((rad_per_ns_to_mhz(shape.omega0()) - 8.0).abs() < 1e-12);
        let p = ShapeSpec::from_json(r#"{"family":"powerlaw","P":3,"area":3.141592653589793}"#).unwrap();
        let shape = p.build().unwrap();
        assert_eq!(shape.duration(), POWER_LAW_DURATION_NS);
        assert!((shape.area() - PI).abs() < 1e-12);
    }

    #[test]
    fn round_trips() {
        let s = ShapeSpec {
            family: "sech".into(),
            tau_ns: Some(10.0),
            area: Some(PI),
            ..Default::default()
        };
        assert_eq!(ShapeSpec::from_json(&s.to_json()).unwrap(), s);
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(ShapeSpec::from_json(r#"{"family":"quadratic","omega0_mhz":1}"#).unwrap().build().is_err());
        assert!(ShapeSpec::from_json(r#"{"family":"quadratic","beta":2,"omega0_mhz":1}"#).unwrap().build().is_err());
        assert!(ShapeSpec::from_json(r#"{"family":"triangle","omega0_mhz":1}"#).unwrap().build().is_err());
        assert!(ShapeSpec::from_json(r#"{"family":"rectangular"}"#).unwrap().build().is_err());
        assert!(ShapeSpec::from_json(r#"{"family":"rectangular","bogus":1}"#).is_err());
    }

    #[test]
    fn area_strings() {
        assert_eq!(parse_area("pi").unwrap(), PI);
        assert_eq!(parse_area("3pi").unwrap(), 3.0 * PI);
        assert_eq!(parse_area("3π").unwrap(), 3.0 * PI);
        assert_eq!(parse_area("1.5").unwrap(), 1.5);
        assert!(parse_area("-pi").is_err());
        assert!(parse_area("x").is_err());
        assert_eq!(area_label(3.0 * PI), "3pi");
        assert_eq!(area_label(PI), "pi");
    }
}
