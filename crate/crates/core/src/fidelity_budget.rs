//! Spontaneous-scattering error budget of a lattice gate.
//!
//! Scattering from the catalysis field falls with tighter localization, while the
//! lattice needed for that localization scatters more as its detuning shrinks at
//! fixed power. The product of the two survival probabilities has an interior
//! optimum in the lattice detuning.
//!
//! Units: detunings and rates in γ, times in 1/γ, energies in E_R unless noted.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::figures_of_merit::FomValue;
use crate::optimize::{maximize, SearchConfig};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeParams {
    /// Single-beam intensity over saturation intensity, I₁/I₀.
    pub intensity_ratio: f64,
    /// ħγ/E_R.
    pub linewidth_over_recoil: f64,
    /// Ground hyperfine F of the trapped atom.
    pub hyperfine_f: u32,
    /// Transport time in oscillation periods, n ≥ 2.
    pub transport_factor: f64,
    /// Protocol constant c in |ℱ| = c/η³.
    pub protocol_constant: f64,
    /// Δ_L/γ.
    pub lattice_detuning: f64,
    /// Catalysis time added to the transport time; 0 uses T ≈ n·2π/ω_osc.
    #[serde(default)]
    pub entangling_time: f64,
}

impl LatticeParams {
    /// The cesium example: F = 4, ħγ/E_R = 2.5e3, I₁/I₀ = 1e5, c = 0.015, n = 2.
    pub fn cesium(lattice_detuning: f64) -> Self {
        Self {
            intensity_ratio: 1e5,
            linewidth_over_recoil: 2.5e3,
            hyperfine_f: 4,
            transport_factor: 2.0,
            protocol_constant: 0.015,
            lattice_detuning,
            entangling_time: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let pos = [
            ("intensity_ratio", self.intensity_ratio),
            ("linewidth_over_recoil", self.linewidth_over_recoil),
            ("protocol_constant", self.protocol_constant),
            ("lattice_detuning", self.lattice_detuning),
        ];
        for (name, v) in pos {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Domain(format!("{name} must be positive and finite, got {v}")));
            }
        }
        if self.hyperfine_f == 0 {
            return Err(Error::Domain("hyperfine_f must be at least 1".into()));
        }
        if !(self.transport_factor >= 2.0) || !self.transport_factor.is_finite() {
            return Err(Error::Domain(format!("transport_factor must be >= 2, got {}", self.transport_factor)));
        }
        if !(self.entangling_time >= 0.0) || !self.entangling_time.is_finite() {
            return Err(Error::Domain(format!("entangling_time must be >= 0, got {}", self.entangling_time)));
        }
        Ok(())
    }

    fn with_detuning(&self, d: f64) -> Self {
        Self { lattice_detuning: d, ..*self }
    }
}

/// ħΓ_L/U_L · Δ_L/γ for a far-detuned lattice: 2/3 − 1/(3F).
pub fn branching_factor(hyperfine_f: u32) -> f64 {
    2.0 / 3.0 - 1.0 / (3.0 * hyperfine_f as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatticeTrap {
    /// U₁/E_R.
    pub single_beam_shift: f64,
    /// ħω_osc/E_R.
    pub omega_osc: f64,
    /// Lamb-Dicke parameter, η² = E_R/ħω_osc.
    pub eta: f64,
}

pub fn trap_from_lattice(p: &LatticeParams) -> Result<LatticeTrap> {
    p.validate()?;
    let u1 = p.intensity_ratio * p.linewidth_over_recoil / (8.0 * p.lattice_detuning);
    let omega = 4.0 * (2.0 * u1 / 3.0).sqrt();
    Ok(LatticeTrap { single_beam_shift: u1, omega_osc: omega, eta: omega.recip().sqrt() })
}

/// 1 − exp(−π/|ℱ|): scattering probability over the half exchange cycle π/|V_dd|.
pub fn catalysis_error(fom: f64) -> Result<f64> {
    if fom == 0.0 || fom.is_nan() {
        return Err(Error::Domain(format!("figure of merit must be nonzero, got {fom}")));
    }
    Ok(-(-PI / fom.abs()).exp_m1())
}

pub fn catalysis_error_of(fom: &FomValue) -> Result<f64> {
    catalysis_error(fom.value)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatticeScattering {
    /// Γ_L/γ averaged over transport.
    pub rate: f64,
    /// Gate time γT.
    pub gate_time: f64,
    /// 1 − exp(−Γ_L T).
    pub probability: f64,
}

pub fn lattice_scattering(p: &LatticeParams) -> Result<LatticeScattering> {
    let trap = trap_from_lattice(p)?;
    // Averaged over transport the + standing wave contributes about half its
    // antinode maximum 2U₁, i.e. U_L ≈ U₁.
    let u_l = trap.single_beam_shift / p.linewidth_over_recoil;
    let rate = u_l * branching_factor(p.hyperfine_f) / p.lattice_detuning;
    let gate_time = p.entangling_time + p.transport_factor * 2.0 * PI * p.linewidth_over_recoil / trap.omega_osc;
    Ok(LatticeScattering { rate, gate_time, probability: -(-rate * gate_time).exp_m1() })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FidelityBudget {
    pub fidelity: f64,
    pub catalysis_fidelity: f64,
    pub lattice_fidelity: f64,
    pub catalysis_error: f64,
    pub lattice_error: f64,
    pub eta: f64,
    /// |ℱ| = c/η³ at this localization.
    pub fom: f64,
}

pub fn total_fidelity(p: &LatticeParams) -> Result<FidelityBudget> {
    let trap = trap_from_lattice(p)?;
    let fom = p.protocol_constant / trap.eta.powi(3);
    let ce = catalysis_error(fom)?;
    let ls = lattice_scattering(p)?;
    let (fc, fl) = (1.0 - ce, 1.0 - ls.probability);
    Ok(FidelityBudget {
        fidelity: fc * fl,
        catalysis_fidelity: fc,
        lattice_fidelity: fl,
        catalysis_error: ce,
        lattice_error: ls.probability,
        eta: trap.eta,
        fom,
    })
}

/// Coefficients of the small-error expansion 1 − ℱ ≈ A Δ^{3/4} + C Δ^{−3/2}.
pub fn error_coefficients(p: &LatticeParams) -> Result<(f64, f64)> {
    p.validate()?;
    let ri = p.linewidth_over_recoil * p.intensity_ratio;
    let a = PI / (8.0 * p.protocol_constant) * (12.0 / ri).powf(0.75);
    let c = 3f64.sqrt() * PI / 8.0 * p.transport_factor * branching_factor(p.hyperfine_f) * ri.sqrt();
    Ok((a, c))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetuningOptimum {
    /// Δ* = (2C/A)^{4/9} from the small-error expansion.
    pub analytic_detuning: f64,
    /// 1 − (3/2) A^{2/3} (2C)^{1/3}.
    pub analytic_fidelity: f64,
    pub detuning: f64,
    pub fidelity: f64,
    /// False when the numeric optimum sits on a search bound.
    pub interior: bool,
}

/// Maximize the total fidelity over Δ_L in [lo, hi] (log-spaced search).
pub fn optimize_detuning(p: &LatticeParams, lo: f64, hi: f64) -> Result<DetuningOptimum> {
    if !(lo > 0.0 && hi > lo && hi.is_finite()) {
        return Err(Error::Domain(format!("detuning bracket [{lo}, {hi}] is invalid")));
    }
    let (a, c) = error_coefficients(p)?;
    let d0 = (2.0 * c / a).powf(4.0 / 9.0);
    let e0 = 1.5 * a.powf(2.0 / 3.0) * (2.0 * c).powf(1.0 / 3.0);
    let cfg = SearchConfig { scan_points: 96, x_tol: 1e-12, max_iter: 200 };
    let m = maximize(|x| Ok(total_fidelity(&p.with_detuning(x.exp()))?.fidelity), lo.ln(), hi.ln(), cfg)?;
    Ok(DetuningOptimum {
        analytic_detuning: d0,
        analytic_fidelity: 1.0 - e0,
        detuning: m.argmax.exp(),
        fidelity: m.value,
        interior: m.interior,
    })
}

/// Default search range for `optimize_detuning`.
pub const DETUNING_SEARCH: (f64, f64) = (1.0, 1e12);
