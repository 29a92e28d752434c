//! TOML scenario configs: layout, initial amplitudes as (re, im) pairs,
//! per-subsystem channel specs, and observable labels.

use serde::Deserialize;

use foursurf::linalg::{ComplexMatrix, SubsystemLayout};
use foursurf::objects::{
    computational_observable, dephasing_kraus, hadamard_channel, make_state, rotation_unitary,
    LocalObservable, QuantumChannel,
};
use foursurf::surfaces::FourSurfaceScenario;
use foursurf::Complex64;

/// Channel spec: a named builder string ("identity", "hadamard",
/// "rotation:<phi>", "dephasing:<p>"), an explicit unitary, or an explicit
/// Kraus list. Matrices are rows of [re, im] entries.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum ChannelSpec {
    Named(String),
    Unitary { unitary: Vec<Vec<[f64; 2]>> },
    Kraus { kraus: Vec<Vec<Vec<[f64; 2]>>> },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObservableSpec {
    pub labels: Vec<String>,
    pub eigenvalues: Vec<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default = "default_name")]
    pub name: String,
    pub dims: Vec<usize>,
    /// Amplitudes as [re, im] pairs, row-major over the layout.
    pub state: Vec<[f64; 2]>,
    pub channel_1: ChannelSpec,
    pub channel_2: ChannelSpec,
    #[serde(default)]
    pub observables: Option<ObservableSpec>,
}

fn default_name() -> String {
    "custom".to_string()
}

impl ScenarioConfig {
    pub fn parse(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }

    /// Builds and fully validates the scenario.
    pub fn build(&self) -> Result<FourSurfaceScenario, String> {
        let layout = SubsystemLayout::new(self.dims.clone()).map_err(|e| e.to_string())?;
        if layout.subsystem_count() != 2 {
            return Err(format!(
                "dims must list exactly two subsystems, got {}",
                layout.subsystem_count()
            ));
        }
        let amplitudes: Vec<Complex64> = self
            .state
            .iter()
            .map(|&[re, im]| Complex64::new(re, im))
            .collect();
        let state = make_state(layout.clone(), amplitudes).map_err(|e| e.to_string())?;

        let ch1 = build_channel(&self.channel_1, 0, layout.dims()[0])?;
        let ch2 = build_channel(&self.channel_2, 1, layout.dims()[1])?;

        let (labels, eigenvalues) = match &self.observables {
            Some(spec) => {
                if spec.labels.len() != spec.eigenvalues.len() {
                    return Err("observables.labels and observables.eigenvalues differ in length".into());
                }
                (spec.labels.clone(), spec.eigenvalues.clone())
            }
            None => (vec!["+".into(), "-".into()], vec![1.0, -1.0]),
        };
        let build_obs = |subsystem: usize| -> Result<LocalObservable, String> {
            let local = layout.dims()[subsystem];
            if labels.len() != local {
                return Err(format!(
                    "observable has {} outcomes but subsystem {} has dimension {local}",
                    labels.len(),
                    subsystem + 1
                ));
            }
            let refs: Vec<&str> = labels.iter().map(|s| s.as_str()).collect();
            computational_observable(subsystem, &refs, &eigenvalues).map_err(|e| e.to_string())
        };

        FourSurfaceScenario::new(
            state.to_density(),
            ch1,
            ch2,
            (build_obs(0)?, build_obs(1)?),
            (build_obs(0)?, build_obs(1)?),
        )
        .map_err(|e| e.to_string())
    }
}

fn matrix_from_rows(rows: &[Vec<[f64; 2]>]) -> Result<ComplexMatrix, String> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, |r| r.len());
    if nrows == 0 || rows.iter().any(|r| r.len() != ncols) {
        return Err("matrix rows are empty or ragged".into());
    }
    let data: Vec<Complex64> = rows
        .iter()
        .flatten()
        .map(|&[re, im]| Complex64::new(re, im))
        .collect();
    ComplexMatrix::new(nrows, ncols, data).map_err(|e| e.to_string())
}

fn build_channel(
    spec: &ChannelSpec,
    subsystem: usize,
    local_dim: usize,
) -> Result<QuantumChannel, String> {
    let check_dim = |ch: &QuantumChannel| -> Result<(), String> {
        if ch.local_dim() != local_dim {
            Err(format!(
                "channel on subsystem {} has dimension {}, layout has {local_dim}",
                subsystem + 1,
                ch.local_dim()
            ))
        } else {
            Ok(())
        }
    };
    let ch = match spec {
        ChannelSpec::Named(name) => {
            if name == "identity" {
                QuantumChannel::identity(subsystem, local_dim)
            } else if name == "hadamard" {
                hadamard_channel(subsystem).map_err(|e| e.to_string())?
            } else if let Some(arg) = name.strip_prefix("rotation:") {
                let phi: f64 = arg
                    .parse()
                    .map_err(|_| format!("bad rotation angle {arg:?}"))?;
                // Subsystem 2 rotates opposite to subsystem 1, matching the
                // paired rotation builder.
                let signed = if subsystem == 0 { phi } else { -phi };
                let u = rotation_unitary(signed).map_err(|e| e.to_string())?;
                QuantumChannel::unitary(subsystem, u).map_err(|e| e.to_string())?
            } else if let Some(arg) = name.strip_prefix("dephasing:") {
                let p: f64 = arg
                    .parse()
                    .map_err(|_| format!("bad dephasing probability {arg:?}"))?;
                dephasing_kraus(subsystem, p).map_err(|e| e.to_string())?
            } else {
                return Err(format!(
                    "unknown channel {name:?}; expected identity, hadamard, rotation:<phi>, or dephasing:<p>"
                ));
            }
        }
        ChannelSpec::Unitary { unitary } => {
            let u = matrix_from_rows(unitary)?;
            QuantumChannel::unitary(subsystem, u).map_err(|e| e.to_string())?
        }
        ChannelSpec::Kraus { kraus } => {
            let ops = kraus
                .iter()
                .map(|m| matrix_from_rows(m))
                .collect::<Result<Vec<_>, _>>()?;
            QuantumChannel::kraus(subsystem, ops).map_err(|e| e.to_string())?
        }
    };
    check_dim(&ch)?;
    Ok(ch)
}

#[cfg(test)]
mod tests {
    use super::*;

    const HADAMARD_CONFIG: &str = r#"
name = "hardy"
dims = [2, 2]
state = [
  [2.8867513459481292e-1, 0.0],
  [-2.8867513459481292e-1, 0.0],
  [-2.8867513459481292e-1, 0.0],
  [-8.6602540378443882e-1, 0.0],
]
channel_1 = "hadamard"
channel_2 = "hadamard"
"#;

    #[test]
    fn parses_and_builds_named_channels() {
        let cfg = ScenarioConfig::parse(HADAMARD_CONFIG).unwrap();
        assert_eq!(cfg.name, "hardy");
        let sc = cfg.build().unwrap();
        assert_eq!(sc.rho_alpha().layout().dims(), &[2, 2]);
    }

    #[test]
    fn rejects_non_normalized_state() {
        let bad = HADAMARD_CONFIG.replace("-8.6602540378443882e-1", "-0.5");
        let cfg = ScenarioConfig::parse(&bad).unwrap();
        assert!(cfg.build().is_err());
    }

    #[test]
    fn rejects_unknown_channel_and_bad_kraus() {
        let cfg = ScenarioConfig::parse(&HADAMARD_CONFIG.replace("\"hadamard\"", "\"sideways\""))
            .unwrap();
        assert!(cfg.build().unwrap_err().contains("unknown channel"));

        let kraus = r#"
dims = [2, 2]
state = [[0.0, 0.0], [0.70710678118654752, 0.0], [-0.70710678118654752, 0.0], [0.0, 0.0]]
channel_1 = { kraus = [ [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]], [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]] ] }
channel_2 = "identity"
"#;
        let cfg = ScenarioConfig::parse(kraus).unwrap();
        assert!(cfg.build().is_err());
    }

    #[test]
    fn rotation_spec_is_opposite_on_the_second_subsystem() {
        let text = r#"
dims = [2, 2]
state = [[0.0, 0.0], [0.70710678118654752, 0.0], [-0.70710678118654752, 0.0], [0.0, 0.0]]
channel_1 = "rotation:0.25"
channel_2 = "rotation:0.25"
"#;
        let sc = ScenarioConfig::parse(text).unwrap().build().unwrap();
        let (expected_1, expected_2) = foursurf::objects::rotation_channels(0.25).unwrap();
        for (built, expected) in [
            (sc.channel_1(), &expected_1),
            (sc.channel_2(), &expected_2),
        ] {
            match (built.kind(), expected.kind()) {
                (
                    foursurf::objects::ChannelKind::Unitary(a),
                    foursurf::objects::ChannelKind::Unitary(b),
                ) => assert!(a.max_abs_diff(b) < 1e-15),
                _ => panic!("expected unitary channels"),
            }
        }
    }

    #[test]
    fn parse_error_mentions_location() {
        let err = ScenarioConfig::parse("dims = [2, 2]\nstate = 5\n").unwrap_err();
        assert!(err.contains("line"), "error should locate the problem: {err}");
    }
}
