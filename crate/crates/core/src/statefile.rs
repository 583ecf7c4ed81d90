//! TOML state files.
//!
//! Every file carries a `kind` key selecting one of the layouts below.
//! Complex numbers are written as `[re, im]` pairs.
//!
//! ```toml
//! kind = "binomial"
//! n = 200
//! ```
//!
//! ```toml
//! kind = "fock_product"
//! n = 3
//! m = 2
//! ```
//!
//! ```toml
//! kind = "coherent_product"   # |alpha> (x) |alpha + c>
//! alpha = [1.0, 0.0]
//! c = [1.0, 0.0]
//! leakage_tol = 1e-12          # optional
//! ```
//!
//! ```toml
//! kind = "cat"                 # (|n,0> + |0,n>) / sqrt(2)
//! n = 4
//! ```
//!
//! ```toml
//! kind = "custom_two_mode"
//! renormalize = false          # optional
//! amplitudes = [[0, 1, 0.7071067811865476, 0.0], [1, 0, 0.7071067811865476, 0.0]]
//! ```
//!
//! ```toml
//! kind = "separable_ensemble"
//! [[components]]
//! weight = 0.5
//! mode_a = [[0.0, 0.0], [1.0, 0.0]]   # amplitudes of |0>, |1>, ...
//! mode_b = [[1.0, 0.0]]
//! [[components]]
//! weight = 0.5
//! mode_a = [[1.0, 0.0]]
//! mode_b = [[0.0, 0.0], [1.0, 0.0]]
//! ```

use crate::criteria::Subject;
use crate::error::{Error, Result};
use crate::fock::{ProductComponent, SeparableEnsemble, SingleModeState, TwoModeState};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::path::Path;

fn default_leakage() -> f64 {
    crate::tolerance::LEAKAGE
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum StateFile {
    Binomial {
        n: usize,
    },
    FockProduct {
        n: usize,
        m: usize,
    },
    CoherentProduct {
        alpha: [f64; 2],
        c: [f64; 2],
        #[serde(default = "default_leakage")]
        leakage_tol: f64,
    },
    Cat {
        n: usize,
    },
    CustomTwoMode {
        /// `[n, m, re, im]` entries; unlisted amplitudes are zero.
        amplitudes: Vec<[f64; 4]>,
        #[serde(default)]
        renormalize: bool,
    },
    SeparableEnsemble {
        components: Vec<ComponentSpec>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentSpec {
    pub weight: f64,
    pub mode_a: Vec<[f64; 2]>,
    pub mode_b: Vec<[f64; 2]>,
    /// Normalize the local amplitude lists instead of requiring unit norm.
    #[serde(default)]
    pub renormalize: bool,
}

/// A state file turned into something the criteria accept.
#[derive(Debug, Clone, PartialEq)]
pub enum LoadedState {
    Pure(TwoModeState),
    Ensemble(SeparableEnsemble),
}

impl LoadedState {
    pub fn subject(&self) -> Subject<'_> {
        match self {
            LoadedState::Pure(s) => Subject::Pure(s),
            LoadedState::Ensemble(e) => Subject::Ensemble(e),
        }
    }
}

fn complex(pair: [f64; 2]) -> Complex64 {
    Complex64::new(pair[0], pair[1])
}

fn index(value: f64, field: &str, entry: usize) -> Result<usize> {
    if value >= 0.0 && value.fract() == 0.0 && value <= crate::tolerance::MAX_CUTOFF as f64 {
        Ok(value as usize)
    } else {
        Err(Error::Schema(format!(
            "amplitudes[{entry}]: {field} = {value} is not a number-state index in 0..={}",
            crate::tolerance::MAX_CUTOFF
        )))
    }
}

fn local_state(amps: &[[f64; 2]], renormalize: bool, field: String) -> Result<SingleModeState> {
    let amps: Vec<Complex64> = amps.iter().copied().map(complex).collect();
    let built = if renormalize {
        SingleModeState::from_unnormalized(amps)
    } else {
        SingleModeState::new(amps)
    };
    built.map_err(|e| Error::Schema(format!("{field}: {e}")))
}

impl StateFile {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Schema(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("state files serialize to TOML")
    }

    pub fn build(&self) -> Result<LoadedState> {
        Ok(match self {
            StateFile::Binomial { n } => LoadedState::Pure(TwoModeState::binomial(*n)?),
            StateFile::FockProduct { n, m } => LoadedState::Pure(TwoModeState::fock_product(*n, *m)?),
            StateFile::CoherentProduct { alpha, c, leakage_tol } => {
                LoadedState::Pure(TwoModeState::coherent_product(complex(*alpha), complex(*c), *leakage_tol)?)
            }
            StateFile::Cat { n } => LoadedState::Pure(TwoModeState::cat(*n)?),
            StateFile::CustomTwoMode {
                amplitudes,
                renormalize,
            } => {
                if amplitudes.is_empty() {
                    return Err(Error::Schema("amplitudes: list is empty".into()));
                }
                let entries = amplitudes
                    .iter()
                    .enumerate()
                    .map(|(i, e)| Ok((index(e[0], "n", i)?, index(e[1], "m", i)?, Complex64::new(e[2], e[3]))))
                    .collect::<Result<Vec<_>>>()?;
                let state = TwoModeState::from_entries(&entries, *renormalize)
                    .map_err(|e| Error::Schema(format!("amplitudes: {e}")))?;
                LoadedState::Pure(state)
            }
            StateFile::SeparableEnsemble { components } => {
                let parts = components
                    .iter()
                    .enumerate()
                    .map(|(i, c)| {
                        ProductComponent::new(
                            c.weight,
                            local_state(&c.mode_a, c.renormalize, format!("components[{i}].mode_a"))?,
                            local_state(&c.mode_b, c.renormalize, format!("components[{i}].mode_b"))?,
                        )
                        .map_err(|e| Error::Schema(format!("components[{i}].weight: {e}")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                LoadedState::Ensemble(
                    SeparableEnsemble::new(parts).map_err(|e| Error::Schema(format!("components: {e}")))?,
                )
            }
        })
    }
}

/// Reads, parses and builds a state file.
pub fn load(path: &Path) -> Result<LoadedState> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Schema(format!("cannot read {}: {e}", path.display())))?;
    StateFile::parse(&text)?.build()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomial_round_trip() {
        let f = StateFile::Binomial { n: 4 };
        let back = StateFile::parse(&f.to_toml()).unwrap();
        assert_eq!(back, f);
        match back.build().unwrap() {
            LoadedState::Pure(s) => assert!((s.mean_number() - 4.0).abs() < 1e-12),
            _ => panic!("expected a pure state"),
        }
    }

    #[test]
    fn custom_entries_accept_integer_indices() {
        let text = "kind = \"custom_two_mode\"\namplitudes = [[0, 1, 0.6, 0.0], [1, 0, 0.0, 0.8]]\n";
        match StateFile::parse(text).unwrap().build().unwrap() {
            LoadedState::Pure(s) => {
                assert_eq!(s.amp(1, 0), Complex64::new(0.0, 0.8));
                assert_eq!(s.amp(0, 1), Complex64::new(0.6, 0.0));
            }
            _ => panic!("expected a pure state"),
        }
    }

    #[test]
    fn ensemble_file() {
        let text = r#"
kind = "separable_ensemble"
[[components]]
weight = 0.5
mode_a = [[0.0, 0.0], [1.0, 0.0]]
mode_b = [[1.0, 0.0]]
[[components]]
weight = 0.5
mode_a = [[1.0, 0.0]]
mode_b = [[0.0, 0.0], [2.0, 0.0]]
renormalize = true
"#;
        match StateFile::parse(text).unwrap().build().unwrap() {
            LoadedState::Ensemble(e) => {
                let m = e.moments().unwrap();
                assert!((m.mean_n - 1.0).abs() < 1e-12 && m.var_n.abs() < 1e-12);
            }
            _ => panic!("expected an ensemble"),
        }
    }

    #[test]
    fn errors_name_the_field() {
        let unknown = StateFile::parse("kind = \"binomial\"\nn = 3\nextra = 1\n").unwrap_err();
        assert!(unknown.to_string().contains("extra"), "{unknown}");
        let bad_kind = StateFile::parse("kind = \"squeezed\"\n").unwrap_err();
        assert!(matches!(bad_kind, Error::Schema(_)));
        let bad_index = StateFile::parse("kind = \"custom_two_mode\"\namplitudes = [[0.5, 0, 1.0, 0.0]]\n")
            .unwrap()
            .build()
            .unwrap_err();
        assert!(bad_index.to_string().contains("amplitudes[0]: n"), "{bad_index}");
        let unnormalized = StateFile::parse(
            "kind = \"separable_ensemble\"\n[[components]]\nweight = 1.0\nmode_a = [[2.0, 0.0]]\nmode_b = [[1.0, 0.0]]\n",
        )
        .unwrap()
        .build()
        .unwrap_err();
        assert!(unnormalized.to_string().contains("components[0].mode_a"), "{unnormalized}");
    }
}
