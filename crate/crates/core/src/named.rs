//! Reference two-particle states used as golden vectors.
//!
//! Spin-½ particles with two orthogonal spatial locations R and L are
//! modeled on a flattened four-mode space, index `2·spin + place` with
//! spin ↑ = 0, ↓ = 1 and place R = 0, L = 1.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::hilbert::{ModeSpace, Statistics, StateVector};
use crate::linalg::{c, C64, ZERO};

pub const SPIN_LABELS: [&str; 2] = ["z↑", "z↓"];
pub const SPIN_SPACE_LABELS: [&str; 4] = ["z↑⊗R", "z↑⊗L", "z↓⊗R", "z↓⊗L"];

const UP_R: usize = 0;
const UP_L: usize = 1;
const DOWN_R: usize = 2;
const DOWN_L: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NamedState {
    /// Spin-only singlet `(|↑↓⟩ − |↓↑⟩)/√2`, tagged fermion.
    Singlet,
    /// Antisymmetrized `|↑,R⟩|↓,L⟩`: spin up sits in R, spin down in L.
    LocalizedPair,
    /// Spin singlet times the symmetric spatial state `(|RL⟩ + |LR⟩)/√2`.
    EprPair,
}

impl NamedState {
    pub const ALL: [NamedState; 3] = [NamedState::Singlet, NamedState::LocalizedPair, NamedState::EprPair];

    pub fn name(self) -> &'static str {
        match self {
            NamedState::Singlet => "singlet",
            NamedState::LocalizedPair => "localized-pair",
            NamedState::EprPair => "epr-pair",
        }
    }

    pub fn build(self) -> StateVector {
        let (labels, entries): (&[&str], Vec<((usize, usize), f64)>) = match self {
            NamedState::Singlet => {
                let h = 0.5f64.sqrt();
                (&SPIN_LABELS, vec![((0, 1), h), ((1, 0), -h)])
            }
            NamedState::LocalizedPair => {
                let h = 0.5f64.sqrt();
                (&SPIN_SPACE_LABELS, vec![((UP_R, DOWN_L), h), ((DOWN_L, UP_R), -h)])
            }
            NamedState::EprPair => (
                &SPIN_SPACE_LABELS,
                vec![((UP_R, DOWN_L), 0.5), ((UP_L, DOWN_R), 0.5), ((DOWN_R, UP_L), -0.5), ((DOWN_L, UP_R), -0.5)],
            ),
        };
        let d = labels.len();
        let mut amps = vec![ZERO; d * d];
        for ((i, j), v) in entries {
            amps[i * d + j] = c(v);
        }
        let space = ModeSpace::with_labels(labels.iter().map(|s| s.to_string()).collect()).expect("nonempty labels");
        StateVector::from_amplitudes(space, 2, amps, Statistics::Fermion).expect("reference states are valid")
    }

    /// Raw amplitude list, for bit-exact comparisons.
    pub fn amplitudes(self) -> Vec<C64> {
        self.build().amplitudes().to_vec()
    }
}

impl fmt::Display for NamedState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for NamedState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "singlet" => Ok(NamedState::Singlet),
            "localized-pair" => Ok(NamedState::LocalizedPair),
            "epr-pair" => Ok(NamedState::EprPair),
            other => Err(Error::InvalidArgument(format!("unknown named state '{other}'"))),
        }
    }
}
