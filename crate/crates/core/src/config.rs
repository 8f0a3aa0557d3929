//! Config-file loading.
//!
//! The on-disk format is line-oriented `key = value` under `[molecule]`,
//! `[drive]`, and `[simulation]` section headers (a strict TOML subset), all
//! physical values in atomic units. Unknown keys and unknown sections are
//! rejected. Omitted keys fall back to the bundled propanediol dataset.

use crate::model::{Enantiomer, EnantiomerSelection, SimConfig};
use crate::TfcError;
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(default)]
    molecule: RawMolecule,
    #[serde(default)]
    drive: RawDrive,
    #[serde(default)]
    simulation: RawSimulation,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMolecule {
    mu_a: Option<f64>,
    mu_b: Option<f64>,
    mu_c: Option<f64>,
    eps21: Option<f64>,
    eps31: Option<f64>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDrive {
    e21: Option<f64>,
    e32: Option<f64>,
    e31: Option<f64>,
    m: Option<f64>,
    delta: Option<f64>,
    omega1: Option<f64>,
    omega2: Option<f64>,
    omega_r: Option<f64>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSimulation {
    dt: Option<f64>,
    tstar_periods: Option<f64>,
    grid_n: Option<usize>,
    sample_stride: Option<usize>,
    ramp: Option<bool>,
    enantiomer: Option<String>,
}

fn parse_enantiomer(s: &str) -> Result<EnantiomerSelection, TfcError> {
    match s {
        "R" | "r" => Ok(EnantiomerSelection::Single(Enantiomer::R)),
        "S" | "s" => Ok(EnantiomerSelection::Single(Enantiomer::S)),
        "both" | "Both" | "BOTH" => Ok(EnantiomerSelection::Both),
        other => Err(TfcError::ConfigParse(format!(
            "enantiomer must be R, S, or both; got '{other}'"
        ))),
    }
}

/// Parses config text, filling omitted keys from the propanediol defaults.
pub fn parse_config(text: &str) -> Result<SimConfig<f64>, TfcError> {
    let raw: RawConfig =
        toml::from_str(text).map_err(|e| TfcError::ConfigParse(e.to_string()))?;
    let mut cfg = SimConfig::<f64>::propanediol();

    let m = &raw.molecule;
    if let Some(v) = m.mu_a {
        cfg.molecule.mu_a = v;
    }
    if let Some(v) = m.mu_b {
        cfg.molecule.mu_b = v;
    }
    if let Some(v) = m.mu_c {
        cfg.molecule.mu_c = v;
    }
    if let Some(v) = m.eps21 {
        cfg.molecule.eps21 = v;
    }
    if let Some(v) = m.eps31 {
        cfg.molecule.eps31 = v;
    }

    let d = &raw.drive;
    if let Some(v) = d.e21 {
        cfg.drive.e21 = v;
    }
    if let Some(v) = d.e32 {
        cfg.drive.e32 = v;
    }
    if let Some(v) = d.e31 {
        cfg.drive.e31 = v;
    }
    if let Some(v) = d.m {
        cfg.drive.m = v;
    }
    if let Some(v) = d.delta {
        cfg.drive.delta = v;
    }
    if let Some(v) = d.omega1 {
        cfg.drive.omega1 = v;
    }
    if let Some(v) = d.omega2 {
        cfg.drive.omega2 = v;
    }
    if let Some(v) = d.omega_r {
        cfg.drive.omega_r = v;
    }

    let s = &raw.simulation;
    if let Some(v) = s.dt {
        cfg.sim.dt = v;
    }
    if let Some(v) = s.tstar_periods {
        cfg.sim.tstar_periods = v;
    }
    if let Some(v) = s.grid_n {
        cfg.sim.grid_n = v;
    }
    if let Some(v) = s.sample_stride {
        cfg.sim.sample_stride = v;
    }
    if let Some(v) = s.ramp {
        cfg.sim.ramp = v;
    }
    if let Some(v) = &s.enantiomer {
        cfg.sim.enantiomer = parse_enantiomer(v)?;
    }

    Ok(cfg)
}

/// Loads and parses a config file.
pub fn load_config(path: &Path) -> Result<SimConfig<f64>, TfcError> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        TfcError::ConfigParse(format!("cannot read {}: {e}", path.display()))
    })?;
    parse_config(&text)
}

/// Serializes a config back to the file format, for manifests and reruns.
pub fn config_to_string(cfg: &SimConfig<f64>) -> String {
    let raw = RawConfig {
        molecule: RawMolecule {
            mu_a: Some(cfg.molecule.mu_a),
            mu_b: Some(cfg.molecule.mu_b),
            mu_c: Some(cfg.molecule.mu_c),
            eps21: Some(cfg.molecule.eps21),
            eps31: Some(cfg.molecule.eps31),
        },
        drive: RawDrive {
            e21: Some(cfg.drive.e21),
            e32: Some(cfg.drive.e32),
            e31: Some(cfg.drive.e31),
            m: Some(cfg.drive.m),
            delta: Some(cfg.drive.delta),
            omega1: Some(cfg.drive.omega1),
            omega2: Some(cfg.drive.omega2),
            omega_r: Some(cfg.drive.omega_r),
        },
        simulation: RawSimulation {
            dt: Some(cfg.sim.dt),
            tstar_periods: Some(cfg.sim.tstar_periods),
            grid_n: Some(cfg.sim.grid_n),
            sample_stride: Some(cfg.sim.sample_stride),
            ramp: Some(cfg.sim.ramp),
            enantiomer: Some(match cfg.sim.enantiomer {
                EnantiomerSelection::Single(Enantiomer::R) => "R".to_string(),
                EnantiomerSelection::Single(Enantiomer::S) => "S".to_string(),
                EnantiomerSelection::Both => "both".to_string(),
            }),
        },
    };
    toml::to_string(&raw).expect("config serialization cannot fail")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip() {
        let cfg = parse_config("").unwrap();
        let text = config_to_string(&cfg);
        let again = parse_config(&text).unwrap();
        assert_eq!(cfg.drive.e21, again.drive.e21);
        assert_eq!(cfg.molecule.mu_c, again.molecule.mu_c);
        assert_eq!(cfg.sim.grid_n, again.sim.grid_n);
    }

    #[test]
    fn sections_and_overrides() {
        let text = r#"
[molecule]
mu_c = -0.14

[drive]
m = 0.5
delta = 0.0

[simulation]
grid_n = 16
enantiomer = "S"
"#;
        let cfg = parse_config(text).unwrap();
        assert_eq!(cfg.molecule.mu_c, -0.14);
        assert_eq!(cfg.drive.m, 0.5);
        assert_eq!(cfg.drive.delta, 0.0);
        assert_eq!(cfg.sim.grid_n, 16);
        assert_eq!(
            cfg.sim.enantiomer,
            EnantiomerSelection::Single(Enantiomer::S)
        );
        // Untouched keys keep bundled values.
        assert_eq!(cfg.molecule.mu_b, 0.75);
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(parse_config("[molecule]\nmu_x = 1.0\n").is_err());
        assert!(parse_config("[detector]\narea = 1.0\n").is_err());
        assert!(parse_config("[simulation]\nenantiomer = \"Q\"\n").is_err());
    }
}
