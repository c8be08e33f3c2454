//! Near-orthogonality of spatially separated groups of electrons.
//!
//! The overlap of two normalized `e^{−r/a}` orbitals whose centers are a
//! distance `d` apart is `S(d) = e^{−x}(1 + x + x²/3)` with `x = d/a`. At
//! macroscopic separations `S` is far below the smallest `f64`, so only
//! `log₁₀ S` is ever formed.

use std::f64::consts::LN_10;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default decay length, in centimetres.
pub const DEFAULT_DECAY_LENGTH_CM: f64 = 1e-8;

/// Default cutoff on `log₁₀` of the overlap.
pub const DEFAULT_THRESHOLD_LOG10: f64 = -100.0;

pub const CAVEAT: &str = "strictly speaking the groups are not one-particle orthogonal: \
the exponential tails of the orbitals overlap, so the factorized description is an \
approximation, accurate to the reported overlap";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LengthUnit {
    Cm,
    M,
    Nm,
    Angstrom,
    Bohr,
}

impl LengthUnit {
    /// Size of one unit in centimetres.
    pub fn in_cm(self) -> f64 {
        match self {
            LengthUnit::Cm => 1.0,
            LengthUnit::M => 100.0,
            LengthUnit::Nm => 1e-7,
            LengthUnit::Angstrom => 1e-8,
            LengthUnit::Bohr => 5.291_772_109_03e-9,
        }
    }
}

impl fmt::Display for LengthUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LengthUnit::Cm => "cm",
            LengthUnit::M => "m",
            LengthUnit::Nm => "nm",
            LengthUnit::Angstrom => "angstrom",
            LengthUnit::Bohr => "bohr",
        })
    }
}

impl FromStr for LengthUnit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "cm" => Ok(LengthUnit::Cm),
            "m" => Ok(LengthUnit::M),
            "nm" => Ok(LengthUnit::Nm),
            "angstrom" | "a" | "å" => Ok(LengthUnit::Angstrom),
            "bohr" | "a0" => Ok(LengthUnit::Bohr),
            other => Err(Error::InvalidArgument(format!("unknown length unit '{other}'"))),
        }
    }
}

/// Shape of the orbital tails.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Envelope {
    ExponentialDecay,
}

/// Two identical orbitals a distance `separation` apart, lengths in one unit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrbitalModel {
    pub envelope: Envelope,
    pub decay_length: f64,
    pub separation: f64,
}

impl OrbitalModel {
    pub fn new(decay_length: f64, separation: f64) -> Result<Self> {
        if !(decay_length > 0.0) || !decay_length.is_finite() {
            return Err(Error::InvalidArgument(format!("decay length must be positive, got {decay_length}")));
        }
        if !(separation >= 0.0) || !separation.is_finite() {
            return Err(Error::InvalidArgument(format!("separation must be nonnegative, got {separation}")));
        }
        Ok(Self { envelope: Envelope::ExponentialDecay, decay_length, separation })
    }

    /// Separation `d` in `unit` with the default decay length.
    pub fn with_default_decay(separation: f64, unit: LengthUnit) -> Result<Self> {
        Self::new(DEFAULT_DECAY_LENGTH_CM / unit.in_cm(), separation)
    }

    /// `d / a`.
    pub fn ratio(&self) -> f64 {
        self.separation / self.decay_length
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApproxVerdict {
    pub log10_overlap: f64,
    pub threshold_log10: f64,
    pub almost_nonentangled: bool,
    pub caveat: String,
}

/// `ln S` for `x = d/a`.
fn ln_overlap(x: f64) -> f64 {
    if x > 1e3 {
        // ln(1 + x + x²/3) = 2 ln x − ln 3 + ln(1 + 3(1 + x)/x²)
        -x + 2.0 * x.ln() - 3f64.ln() + (3.0 * (1.0 + x) / (x * x)).ln_1p()
    } else {
        -x + (x + x * x / 3.0).ln_1p()
    }
}

/// `log₁₀` of the two-center overlap under `model`.
pub fn log10_overlap(model: &OrbitalModel) -> Result<f64> {
    if !(model.decay_length > 0.0) {
        return Err(Error::InvalidArgument(format!("decay length must be positive, got {}", model.decay_length)));
    }
    Ok(ln_overlap(model.ratio()) / LN_10)
}

/// Almost non-entangled when the overlap is below `10^threshold_log10`.
pub fn classify_separated_groups(model: &OrbitalModel, threshold_log10: f64) -> Result<ApproxVerdict> {
    let log10 = log10_overlap(model)?;
    Ok(ApproxVerdict {
        log10_overlap: log10,
        threshold_log10,
        almost_nonentangled: log10 < threshold_log10,
        caveat: CAVEAT.to_string(),
    })
}
