//! Hardware profiles from presets or JSON files.
//!
//! The file schema mirrors [`HardwareProfile`]:
//!
//! | field | unit |
//! |---|---|
//! | `name` | free text |
//! | `dt_ns` | ns per sample |
//! | `max_amplitude` | device units |
//! | `amp_calibration_mhz` | Ω/2π in MHz at amplitude 1 |
//! | `max_duration_ns` | ns |
//! | `qubit_frequency_ghz`, `anharmonicity_ghz` | GHz |
//! | `days[]` | `{label, t1_us, t2_us, readout_error}` |

use std::path::Path;

use superbroad_core::hardware::HardwareProfile;

use crate::exit::LabError;

/// Preset name, or path to a JSON profile.
pub fn load_profile(source: &str) -> Result<HardwareProfile, LabError> {
    if HardwareProfile::preset_names().contains(&source) {
        return Ok(HardwareProfile::preset(source)?);
    }
    let text = std::fs::read_to_string(source).map_err(|e| LabError::io(format!("reading profile {source}"), e))?;
    parse_profile(&text)
}

pub fn parse_profile(text: &str) -> Result<HardwareProfile, LabError> {
    let profile: HardwareProfile = serde_json::from_str(text).map_err(|e| LabError::Format {
        what: "hardware profile",
        detail: e.to_string(),
    })?;
    profile.validate()?;
    Ok(profile)
}

pub fn profile_json(profile: &HardwareProfile) -> String {
    serde_json::to_string_pretty(profile).expect("profile serialises")
}

pub fn save_profile(profile: &HardwareProfile, path: &Path) -> Result<(), LabError> {
    std::fs::write(path, profile_json(profile) + "\n")
        .map_err(|e| LabError::io(format!("writing profile {}", path.display()), e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exit::Exit;

    #[test]
    fn save_then_load_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("q46.json");
        let p = HardwareProfile::sherbrooke_q46();
        save_profile(&p, &path).unwrap();
        let back = load_profile(path.to_str().unwrap()).unwrap();
        assert_eq!(back, p);
        assert_eq!(back.dt_ns.to_bits(), p.dt_ns.to_bits());
    }

    #[test]
    fn preset_by_name() {
        let p = load_profile("sherbrooke-q46").unwrap();
        let day = p.day("27 Nov").unwrap();
        assert_eq!((day.t1_us, day.t2_us, day.readout_error), (393.66, 596.88, 0.0066));
    }

    #[test]
    fn bad_files_are_rejected() {
        let mut p = HardwareProfile::sherbrooke_q46();
        p.days[0].t2_us = 2.5 * p.days[0].t1_us;
        let err = parse_profile(&profile_json(&p)).unwrap_err();
        assert_eq!(err.exit(), Exit::Constraint);
        let err = parse_profile(r#"{"name": "x"}"#).unwrap_err();
        assert!(err.to_string().contains("missing field"), "{err}");
        assert!(load_profile("/nonexistent/profile.json").is_err());
    }
}
