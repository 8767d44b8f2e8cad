use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::fock::FockState;
use crate::linalg::{cis, CMatrix, ONE};
use crate::multirail::MultiRailRegister;
use crate::qudit::{controlled_z, one_level_cz, QuditOperator};

const MAX_MODES: usize = 24;
const MAX_PHOTONS: usize = 12;

/// A gate to synthesize plus ancilla budget and optimizer schedule.
///
/// `target` is square over `inputs`: column `j` is the image of `inputs[j]`
/// expanded in the same states. Computational modes come first in `u`,
/// then the `ancilla_photons` single-photon modes, then the `vacuum_modes`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SynthesisProblem {
    pub name: String,
    pub inputs: Vec<FockState>,
    #[serde(with = "crate::linalg::serde_cmatrix")]
    pub target: CMatrix,
    pub ancilla_photons: usize,
    pub vacuum_modes: usize,
    /// First nonzero `λ` of the schedule; stage 0 always runs with `λ = 0`.
    #[serde(default = "defaults::lambda_start")]
    pub lambda_start: f64,
    #[serde(default = "defaults::lambda_growth")]
    pub lambda_growth: f64,
    #[serde(default = "defaults::max_stages")]
    pub max_stages: usize,
    #[serde(default = "defaults::sigma")]
    pub sigma: f64,
    /// Penalty weight for stage 0 only; a soft constraint lets the search
    /// pass through non-unitary matrices on its way to an exact solution.
    #[serde(default = "defaults::sigma_start")]
    pub sigma_start: f64,
    #[serde(default = "defaults::restarts")]
    pub restarts: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "defaults::max_iterations")]
    pub max_iterations: usize,
    #[serde(default = "defaults::gradient_tolerance")]
    pub gradient_tolerance: f64,
    /// Scale of the Gaussian perturbation added to the random unitary start.
    #[serde(default = "defaults::init_noise")]
    pub init_noise: f64,
}

mod defaults {
    pub fn lambda_start() -> f64 {
        1e-3
    }
    pub fn lambda_growth() -> f64 {
        2.0
    }
    pub fn max_stages() -> usize {
        30
    }
    pub fn sigma() -> f64 {
        10.0
    }
    pub fn sigma_start() -> f64 {
        0.1
    }
    pub fn restarts() -> usize {
        20
    }
    pub fn max_iterations() -> usize {
        2000
    }
    pub fn gradient_tolerance() -> f64 {
        1e-9
    }
    pub fn init_noise() -> f64 {
        0.1
    }
}

impl SynthesisProblem {
    /// General constructor with default schedule settings.
    pub fn new(
        name: impl Into<String>,
        inputs: Vec<FockState>,
        target: CMatrix,
        ancilla_photons: usize,
        vacuum_modes: usize,
    ) -> Result<Self> {
        let p = Self {
            name: name.into(),
            inputs,
            target,
            ancilla_photons,
            vacuum_modes,
            lambda_start: defaults::lambda_start(),
            lambda_growth: defaults::lambda_growth(),
            max_stages: defaults::max_stages(),
            sigma: defaults::sigma(),
            sigma_start: defaults::sigma_start(),
            restarts: defaults::restarts(),
            seed: 0,
            max_iterations: defaults::max_iterations(),
            gradient_tolerance: defaults::gradient_tolerance(),
            init_noise: defaults::init_noise(),
        };
        p.validate()?;
        Ok(p)
    }

    /// A qudit gate acting on the multi-rail codewords of its register.
    pub fn multirail(
        name: impl Into<String>,
        gate: &QuditOperator,
        ancilla_photons: usize,
        vacuum_modes: usize,
    ) -> Result<Self> {
        let reg = MultiRailRegister::new(gate.site_count(), gate.dimension())?;
        Self::new(
            name,
            reg.codewords(),
            gate.matrix().clone(),
            ancilla_photons,
            vacuum_modes,
        )
    }

    pub fn named(target: NamedTarget) -> Result<Self> {
        let (na, nv) = target.default_ancillas();
        Self::named_with(target, na, nv)
    }

    pub fn named_with(target: NamedTarget, na: usize, nv: usize) -> Result<Self> {
        let name = target.to_string();
        match target {
            NamedTarget::CzQubit => Self::multirail(name, &controlled_z(2)?, na, nv),
            NamedTarget::CzBarQutrit => Self::multirail(name, &one_level_cz(3)?, na, nv),
            NamedTarget::CzQutrit => Self::multirail(name, &controlled_z(3)?, na, nv),
            NamedTarget::Identity => {
                Self::multirail(name, &QuditOperator::identity(2, 1)?, na, nv)
            }
            NamedTarget::NsPi => {
                let inputs = (0..3).map(|n| FockState::new(vec![n])).collect();
                let t = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
                    ONE,
                    ONE,
                    cis(PI),
                ]));
                Self::new(name, inputs, t, na, nv)
            }
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let p: Self = serde_json::from_str(text)?;
        p.validate()?;
        Ok(p)
    }

    pub fn computational_modes(&self) -> usize {
        self.inputs.first().map_or(0, FockState::mode_count)
    }

    pub fn total_modes(&self) -> usize {
        self.computational_modes() + self.ancilla_photons + self.vacuum_modes
    }

    /// Heralding pattern on the ancilla modes.
    pub fn ancilla_pattern(&self) -> FockState {
        let mut occ = vec![1; self.ancilla_photons];
        occ.resize(self.ancilla_photons + self.vacuum_modes, 0);
        FockState::new(occ)
    }

    pub fn ancilla_modes(&self) -> Vec<usize> {
        (self.computational_modes()..self.total_modes()).collect()
    }

    /// Distinct computational photon numbers, ascending.
    pub fn photon_numbers(&self) -> Vec<usize> {
        let mut n: Vec<usize> = self.inputs.iter().map(FockState::photon_count).collect();
        n.sort_unstable();
        n.dedup();
        n
    }

    pub fn validate(&self) -> Result<()> {
        let k = self.inputs.len();
        if k == 0 {
            return Err(invalid("synthesis target needs at least one input state"));
        }
        if self.target.nrows() != k || self.target.ncols() != k {
            return Err(Error::DimensionMismatch {
                expected: k,
                found: self.target.nrows().max(self.target.ncols()),
            });
        }
        let m = self.computational_modes();
        if m == 0 || self.inputs.iter().any(|s| s.mode_count() != m) {
            return Err(invalid("input states must share a nonzero mode count"));
        }
        for (i, a) in self.inputs.iter().enumerate() {
            if self.inputs[..i].contains(a) {
                return Err(invalid(format!("input state {a:?} listed twice")));
            }
        }
        if self.total_modes() > MAX_MODES {
            return Err(Error::SizeCap {
                what: "synthesis mode count",
                size: self.total_modes(),
                cap: MAX_MODES,
            });
        }
        let photons = self.photon_numbers().last().copied().unwrap_or(0) + self.ancilla_photons;
        if photons > MAX_PHOTONS {
            return Err(Error::SizeCap {
                what: "synthesis photon count",
                size: photons,
                cap: MAX_PHOTONS,
            });
        }
        let gram = self.target.adjoint() * &self.target;
        let scale = gram[(0, 0)].re;
        let off = (&gram - CMatrix::identity(k, k).map(|z| z * scale))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if scale <= 0.0 || off > 1e-10 * scale.max(1.0) {
            return Err(invalid("target must be proportional to a unitary on its inputs"));
        }
        for (label, v) in [
            ("sigma", self.sigma),
            ("sigma_start", self.sigma_start),
            ("lambda_start", self.lambda_start),
            ("gradient_tolerance", self.gradient_tolerance),
            ("init_noise", self.init_noise),
        ] {
            if !v.is_finite() || v < 0.0 {
                return Err(invalid(format!("{label} must be finite and non-negative")));
            }
        }
        if !(self.lambda_growth > 1.0) {
            return Err(invalid("lambda_growth must exceed 1"));
        }
        Ok(())
    }
}

/// Built-in synthesis targets.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NamedTarget {
    CzQubit,
    CzBarQutrit,
    CzQutrit,
    NsPi,
    Identity,
}

impl NamedTarget {
    pub const ALL: [NamedTarget; 5] = [
        NamedTarget::CzQubit,
        NamedTarget::CzBarQutrit,
        NamedTarget::CzQutrit,
        NamedTarget::NsPi,
        NamedTarget::Identity,
    ];

    /// The smallest ancilla budget known to admit an exact solution.
    pub fn default_ancillas(self) -> (usize, usize) {
        match self {
            NamedTarget::CzQubit => (2, 0),
            NamedTarget::CzBarQutrit => (3, 3),
            NamedTarget::CzQutrit => (5, 4),
            NamedTarget::NsPi => (1, 1),
            NamedTarget::Identity => (0, 0),
        }
    }
}

impl fmt::Display for NamedTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NamedTarget::CzQubit => "cz-qubit",
            NamedTarget::CzBarQutrit => "czbar-qutrit",
            NamedTarget::CzQutrit => "cz-qutrit",
            NamedTarget::NsPi => "ns-pi",
            NamedTarget::Identity => "identity",
        })
    }
}

impl FromStr for NamedTarget {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|t| t.to_string() == s)
            .ok_or_else(|| {
                let names: Vec<String> = Self::ALL.iter().map(ToString::to_string).collect();
                invalid(format!("unknown target {s:?}; expected one of {}", names.join(", ")))
            })
    }
}
