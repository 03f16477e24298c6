use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use phasecorr_core::numerics::{GridPair, GridSpec};
use phasecorr_core::states::{
    build_custom, build_gaussian_packet, build_generalized_coherent, GaussianPacketParams, GeneralizedCoherentParams,
    Representation, WaveFunction,
};
use serde::{Deserialize, Serialize};

use crate::error::{config, CliError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// One-mode state, tagged by `kind`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum StateSpec {
    Gaussian {
        alpha: f64,
        #[serde(default)]
        beta: f64,
        #[serde(default)]
        t0_over_m: f64,
    },
    Coherent {
        n: usize,
        amplitude: f64,
        #[serde(default)]
        theta: f64,
        #[serde(default = "one")]
        omega: f64,
        #[serde(default)]
        t0: f64,
    },
    Custom {
        representation: RepresentationSpec,
        x_min: f64,
        x_max: f64,
        re: Vec<f64>,
        #[serde(default)]
        im: Vec<f64>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RepresentationSpec {
    Position,
    Momentum,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridOverride {
    /// Number of grid points.
    pub n: Option<usize>,
    /// Half-width of the position window around the state's mean.
    pub span: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum CompositeSpec {
    Epr {
        alpha1: f64,
        alpha2: f64,
        #[serde(default)]
        q0: f64,
        #[serde(default)]
        p0: f64,
        #[serde(default)]
        pairs: Vec<[String; 2]>,
    },
    EntangledCoherent {
        m: usize,
        n: usize,
        #[serde(default)]
        alpha: [f64; 2],
        #[serde(default)]
        beta: [f64; 2],
        #[serde(default = "one")]
        omega: f64,
        #[serde(default)]
        t0: f64,
        #[serde(default)]
        pairs: Vec<[String; 2]>,
    },
}

/// Everything a run may be configured with. Command-line flags override the
/// corresponding keys.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub state: Option<StateSpec>,
    pub b: Option<f64>,
    pub b_schedule: Option<Vec<f64>>,
    pub dqdp_schedule: Option<Vec<f64>>,
    pub grid: Option<GridOverride>,
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    pub bins: Option<usize>,
    pub out: Option<PathBuf>,
    pub summary: Option<PathBuf>,
    pub format: Option<Format>,
    pub composite: Option<CompositeSpec>,
}

/// Parses a TOML document, or JSON when the file name ends in `.json`.
pub fn load<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_owned(),
        source,
    })?;
    let parsed = if path.extension().is_some_and(|e| e == "json") {
        serde_json::from_str(&text).map_err(|e| e.to_string())
    } else {
        toml::from_str(&text).map_err(|e| e.to_string())
    };
    parsed.map_err(|e| config(format!("{}: {e}", path.display())))
}

fn positive(name: &str, value: f64) -> Result<f64, CliError> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(config(format!("{name} must be positive and finite, got {value}")))
    }
}

pub fn check_b(b: f64) -> Result<f64, CliError> {
    positive("b", b)
}

pub fn check_schedule(name: &str, values: &[f64]) -> Result<(), CliError> {
    if values.is_empty() {
        return Err(config(format!("{name} is empty")));
    }
    values.iter().try_for_each(|&v| positive(name, v).map(|_| ()))
}

impl GridOverride {
    pub fn validate(&self) -> Result<(), CliError> {
        if let Some(n) = self.n {
            if n < 16 {
                return Err(config(format!("grid n must be at least 16, got {n}")));
            }
        }
        if let Some(span) = self.span {
            positive("grid span", span)?;
        }
        Ok(())
    }

    fn is_empty(&self) -> bool {
        self.n.is_none() && self.span.is_none()
    }

    /// `auto` with the requested point count and position half-width.
    fn apply(&self, auto: GridPair, q_center: f64, p_center: f64) -> Result<GridPair, CliError> {
        if self.is_empty() {
            return Ok(auto);
        }
        let q = auto.position();
        let n = self.n.unwrap_or(q.len());
        let span = self.span.unwrap_or(0.5 * (q.x_max() - q.x_min()));
        let position = GridSpec::new(q_center - span, q_center + span, n)?;
        Ok(GridPair::new(position, p_center)?)
    }
}

impl StateSpec {
    pub fn validate(&self) -> Result<(), CliError> {
        match self {
            StateSpec::Gaussian { alpha, beta, t0_over_m } => {
                GaussianPacketParams::new(*alpha, *beta, *t0_over_m).map_err(|e| config(e.to_string()))?;
            }
            StateSpec::Coherent {
                n,
                amplitude,
                theta,
                omega,
                t0,
            } => {
                GeneralizedCoherentParams::new(*n, *amplitude, *theta, *omega, *t0)
                    .map_err(|e| config(e.to_string()))?;
            }
            StateSpec::Custom {
                x_min, x_max, re, im, ..
            } => {
                if !(x_min.is_finite() && x_max.is_finite() && x_max > x_min) {
                    return Err(config(format!("custom grid range [{x_min}, {x_max}] is invalid")));
                }
                if re.len() < 16 {
                    return Err(config("custom state needs at least 16 amplitudes"));
                }
                if !im.is_empty() && im.len() != re.len() {
                    return Err(config(format!("re has {} values but im has {}", re.len(), im.len())));
                }
                if re.iter().chain(im).any(|v| !v.is_finite()) {
                    return Err(config("custom amplitudes must be finite"));
                }
            }
        }
        Ok(())
    }

    pub fn build(&self, grid: &GridOverride) -> Result<WaveFunction, CliError> {
        match *self {
            StateSpec::Gaussian { alpha, beta, t0_over_m } => {
                let p = GaussianPacketParams::new(alpha, beta, t0_over_m)?;
                let grids = grid.apply(p.auto_grid()?, p.mean_q(), p.mean_p())?;
                Ok(build_gaussian_packet(&p, &grids)?)
            }
            StateSpec::Coherent {
                n,
                amplitude,
                theta,
                omega,
                t0,
            } => {
                let p = GeneralizedCoherentParams::new(n, amplitude, theta, omega, t0)?;
                let grids = grid.apply(p.auto_grid()?, p.q_bar(), p.p_bar())?;
                Ok(build_generalized_coherent(&p, &grids)?)
            }
            StateSpec::Custom {
                representation,
                x_min,
                x_max,
                ref re,
                ref im,
            } => {
                if !grid.is_empty() {
                    return Err(config("grid overrides do not apply to custom states"));
                }
                let samples = GridSpec::new(x_min, x_max, re.len())?;
                let amplitudes: Vec<Complex64> = re
                    .iter()
                    .enumerate()
                    .map(|(k, &r)| Complex64::new(r, im.get(k).copied().unwrap_or(0.0)))
                    .collect();
                let (grids, rep) = match representation {
                    RepresentationSpec::Position => (GridPair::new(samples, 0.0)?, Representation::Position),
                    RepresentationSpec::Momentum => {
                        let n = re.len();
                        let hq = 2.0 * PI / (n as f64 * samples.step());
                        let position = GridSpec::centered(0.0, hq, n)?;
                        (GridPair::new(position, samples.center())?, Representation::Momentum)
                    }
                };
                Ok(build_custom(amplitudes, &grids, rep)?)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_are_rejected() {
        let err = toml::from_str::<RunConfig>("b = 1.0\nbogus = 2\n").unwrap_err();
        assert!(err.to_string().contains("bogus"));
        let err = toml::from_str::<RunConfig>("[state]\nkind = \"gaussian\"\nalpha = 1.0\ngamma = 3.0\n").unwrap_err();
        assert!(err.to_string().contains("gamma"));
    }

    #[test]
    fn state_defaults() {
        let c: RunConfig = toml::from_str("[state]\nkind = \"coherent\"\nn = 2\namplitude = 1.0\n").unwrap();
        assert_eq!(
            c.state,
            Some(StateSpec::Coherent {
                n: 2,
                amplitude: 1.0,
                theta: 0.0,
                omega: 1.0,
                t0: 0.0
            })
        );
    }

    #[test]
    fn json_and_toml_agree() {
        let t: RunConfig = toml::from_str("b_schedule = [0.5, 1.0]\nformat = \"csv\"\n[grid]\nn = 512\n").unwrap();
        let j: RunConfig =
            serde_json::from_str(r#"{"b_schedule": [0.5, 1.0], "format": "csv", "grid": {"n": 512}}"#).unwrap();
        assert_eq!(t, j);
    }

    #[test]
    fn grid_override_sets_points_and_span() {
        let spec = StateSpec::Gaussian {
            alpha: 1.0,
            beta: 0.5,
            t0_over_m: 1.0,
        };
        let g = GridOverride {
            n: Some(600),
            span: Some(15.0),
        };
        let wf = spec.build(&g).unwrap();
        let q = wf.position_grid();
        assert_eq!(q.len(), 600);
        assert!((q.x_min() + 14.5).abs() < 1e-12 && (q.x_max() - 15.5).abs() < 1e-12);
        assert!(GridOverride { n: Some(8), span: None }.validate().is_err());
    }

    #[test]
    fn custom_momentum_state() {
        let n = 256;
        let step = 24.0 / (n - 1) as f64;
        let re: Vec<f64> = (0..n)
            .map(|k| {
                let p = -12.0 + step * k as f64;
                (-p * p / 2.0).exp()
            })
            .collect();
        let spec = StateSpec::Custom {
            representation: RepresentationSpec::Momentum,
            x_min: -11.0,
            x_max: 13.0,
            re,
            im: vec![],
        };
        spec.validate().unwrap();
        let wf = spec.build(&GridOverride::default()).unwrap();
        let m = phasecorr_core::states::moments(&wf).unwrap();
        assert!((m.mean_p - 1.0).abs() < 1e-9);
        assert!((wf.momentum_grid().x_min() + 11.0).abs() < 1e-9);
    }
}
