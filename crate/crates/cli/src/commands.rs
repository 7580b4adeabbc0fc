//! Subcommand parameter sets and the rows they produce.

use clap::ValueEnum;
use dipolatt::angular::HyperfineContext;
use dipolatt::ensemble_protocol::{estimate_fidelity, run_ensemble, EnsembleConfig, ErrorModel, ErrorSplit};
use dipolatt::fidelity_budget::{optimize_detuning, total_fidelity, LatticeParams};
use dipolatt::figures_of_merit::{fom_generic, fom_nearfield, tensor_means, tensor_means_nearfield, FomOptions, TrapGeometry};
use dipolatt::gate_sim::{cphase_levelshift, ramsey_cphase, sqrt_swap, GateReport, PulseConfig, TwoLevelParams};
use dipolatt::interaction::DriveParams;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::config::{to_params, typed, Params};
use crate::error::{CliError, Result};
use crate::range::parse_range;

pub const FOM_COLUMNS: &[&str] = &["geometry", "value", "scaled", "method", "includes_retardation", "in_regime"];
pub const GATE_COLUMNS: &[&str] =
    &["kind", "fidelity", "superposition_fidelity", "leakage", "phase", "duration", "scattering_error"];
pub const FIDELITY_COLUMNS: &[&str] = &[
    "lattice_detuning",
    "fidelity",
    "catalysis_error",
    "lattice_error",
    "eta",
    "fom",
    "analytic_detuning",
    "analytic_fidelity",
];
pub const ENSEMBLE_COLUMNS: &[&str] =
    &["cycle", "pairs", "targets", "retained", "flushed", "lost", "controls_lost", "ratio", "std_error", "rng"];
/// Sweep rows lead with the swept key.
pub const SWEEP_COLUMNS: &[&str] = &["value", "scaled", "in_regime"];
/// Keys a sweep may range over.
pub const RANGE_KEYS: &[&str] = &["eta", "zbar", "eta_perp", "eta_par"];

pub const COMMANDS: &[&str] = &["fom", "gate", "fidelity", "ensemble", "sweep"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Geometry {
    /// Two spherical wells a distance zbar·x₀ apart along the drive axis.
    Separated,
    /// One cylindrical well with widths eta_perp, eta_par.
    Ellipsoid,
    /// One spherical well.
    Sphere,
}

fn trap(geometry: Geometry, eta: f64, zbar: f64, eta_perp: f64, eta_par: f64) -> TrapGeometry {
    match geometry {
        Geometry::Separated => TrapGeometry::SeparatedSpheres { eta, zbar },
        Geometry::Ellipsoid => TrapGeometry::CommonEllipsoid { eta_perp, eta_par },
        Geometry::Sphere => TrapGeometry::CommonSphere { eta },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FomParams {
    pub geometry: Geometry,
    pub eta: f64,
    pub zbar: f64,
    pub eta_perp: f64,
    pub eta_par: f64,
    /// Drive polarization q ∈ {−1, 0, 1}.
    pub q: i32,
    pub retarded: bool,
    pub keep_n0: bool,
}

impl Default for FomParams {
    fn default() -> Self {
        Self {
            geometry: Geometry::Separated,
            eta: 0.05,
            zbar: 2.5,
            eta_perp: 0.05,
            eta_par: 0.1,
            q: 0,
            retarded: false,
            keep_n0: false,
        }
    }
}

impl FomParams {
    pub fn trap(&self) -> TrapGeometry {
        trap(self.geometry, self.eta, self.zbar, self.eta_perp, self.eta_par)
    }

    fn width(&self) -> f64 {
        match self.geometry {
            Geometry::Ellipsoid => self.eta_perp,
            _ => self.eta,
        }
    }
}

pub fn fom_row(p: &FomParams) -> Result<Params> {
    let v = if p.retarded {
        fom_generic(p.trap(), p.q, &FomOptions { keep_n0: p.keep_n0, ..FomOptions::default() })?
    } else {
        fom_nearfield(p.trap(), p.q)?
    };
    Ok(to_params(&json!({
        "geometry": p.geometry,
        "value": v.value,
        "scaled": v.value * p.width().powi(3),
        "method": v.method,
        "includes_retardation": v.includes_retardation,
        "in_regime": v.in_regime,
    })))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum GateKind {
    /// Controlled phase from the dressed pair level shift.
    Cphase,
    /// Controlled phase by π pulse, free exchange, −π pulse.
    Ramsey,
    /// Exchange gate on stretched vibrational states of one spherical well.
    SqrtSwap,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GateParams {
    pub kind: GateKind,
    pub geometry: Geometry,
    pub eta: f64,
    pub zbar: f64,
    pub eta_perp: f64,
    pub eta_par: f64,
    pub q: i32,
    pub retarded: bool,
    /// Catalysis drive Ω/γ and Δ/γ.
    pub rabi: f64,
    pub detuning: f64,
    /// Twice the nuclear spin.
    pub twice_i: u32,
    pub pulse_rabi: f64,
    pub pulse_detuning: f64,
    pub min_ratio: f64,
}

impl Default for GateParams {
    fn default() -> Self {
        let f = FomParams::default();
        let pulse = PulseConfig::default();
        Self {
            kind: GateKind::Cphase,
            geometry: f.geometry,
            eta: f.eta,
            zbar: f.zbar,
            eta_perp: f.eta_perp,
            eta_par: f.eta_par,
            q: f.q,
            retarded: f.retarded,
            rabi: 1.0,
            detuning: 100.0,
            twice_i: 7,
            pulse_rabi: pulse.rabi,
            pulse_detuning: pulse.detuning,
            min_ratio: pulse.min_ratio,
        }
    }
}

fn gate_row(kind: GateKind, g: &GateReport) -> Params {
    to_params(&json!({
        "kind": kind,
        "fidelity": g.fidelity,
        "superposition_fidelity": g.superposition_fidelity,
        "leakage": g.leakage,
        "phase": g.phase,
        "duration": g.duration,
        "scattering_error": g.scattering_error,
    }))
}

pub fn gate_rows(p: &GateParams) -> Result<Vec<Params>> {
    let geometry = trap(p.geometry, p.eta, p.zbar, p.eta_perp, p.eta_par);
    let drive = DriveParams::spherical(p.rabi, p.detuning, p.q)?;
    let report = match p.kind {
        GateKind::Cphase => cphase_levelshift(geometry, &drive, p.q, p.retarded)?,
        GateKind::Ramsey => {
            let (f, g) = if p.retarded {
                tensor_means(geometry, p.q, &FomOptions::default())?
            } else {
                tensor_means_nearfield(geometry, p.q)?
            };
            let two = TwoLevelParams::from_tensor_means(p.rabi, p.detuning, f, g);
            let pulse = PulseConfig { rabi: p.pulse_rabi, detuning: p.pulse_detuning, min_ratio: p.min_ratio };
            ramsey_cphase(&two, &pulse)?.gate
        }
        GateKind::SqrtSwap => sqrt_swap(p.eta, &drive, HyperfineContext::d2(p.twice_i), p.retarded)?.gate,
    };
    Ok(vec![gate_row(p.kind, &report)])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FidelityParams {
    pub intensity_ratio: f64,
    pub linewidth_over_recoil: f64,
    pub hyperfine_f: u32,
    pub transport_factor: f64,
    pub protocol_constant: f64,
    /// Used as is unless `optimize` is set.
    pub lattice_detuning: f64,
    pub entangling_time: f64,
    pub optimize: bool,
    pub detuning_min: f64,
    pub detuning_max: f64,
}

impl Default for FidelityParams {
    fn default() -> Self {
        let c = LatticeParams::cesium(6e3);
        Self {
            intensity_ratio: c.intensity_ratio,
            linewidth_over_recoil: c.linewidth_over_recoil,
            hyperfine_f: c.hyperfine_f,
            transport_factor: c.transport_factor,
            protocol_constant: c.protocol_constant,
            lattice_detuning: c.lattice_detuning,
            entangling_time: c.entangling_time,
            optimize: true,
            detuning_min: 1.0,
            detuning_max: 1e12,
        }
    }
}

impl FidelityParams {
    pub fn lattice(&self) -> LatticeParams {
        LatticeParams {
            intensity_ratio: self.intensity_ratio,
            linewidth_over_recoil: self.linewidth_over_recoil,
            hyperfine_f: self.hyperfine_f,
            transport_factor: self.transport_factor,
            protocol_constant: self.protocol_constant,
            lattice_detuning: self.lattice_detuning,
            entangling_time: self.entangling_time,
        }
    }
}

pub fn fidelity_rows(p: &FidelityParams) -> Result<Vec<Params>> {
    let mut lattice = p.lattice();
    let opt = optimize_detuning(&lattice, p.detuning_min, p.detuning_max)?;
    if p.optimize {
        if !opt.interior {
            return Err(CliError::Numerical(format!(
                "optimal detuning sits on the search bound {:e}",
                opt.detuning
            )));
        }
        lattice.lattice_detuning = opt.detuning;
    }
    let b = total_fidelity(&lattice)?;
    Ok(vec![to_params(&json!({
        "lattice_detuning": lattice.lattice_detuning,
        "fidelity": b.fidelity,
        "catalysis_error": b.catalysis_error,
        "lattice_error": b.lattice_error,
        "eta": b.eta,
        "fom": b.fom,
        "analytic_detuning": opt.analytic_detuning,
        "analytic_fidelity": opt.analytic_fidelity,
    }))])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleParams {
    pub n_sites: usize,
    pub fill_probability: f64,
    pub seed: u64,
    pub gate_fidelity: f64,
    /// Shares of the failures; they must sum to 1.
    pub partner_lost: f64,
    pub both_lost: f64,
    pub wrong_state: f64,
    pub control_fraction: f64,
    pub unpaired_flip_probability: f64,
    pub pre_cycles: usize,
    pub replicas: usize,
}

impl Default for EnsembleParams {
    fn default() -> Self {
        Self {
            n_sites: 400_000,
            fill_probability: 0.5,
            seed: 0,
            gate_fidelity: 0.92,
            partner_lost: 0.0,
            both_lost: 0.0,
            wrong_state: 1.0,
            control_fraction: 0.5,
            unpaired_flip_probability: 0.0,
            pre_cycles: 0,
            replicas: 1,
        }
    }
}

impl EnsembleParams {
    pub fn ensemble(&self) -> EnsembleConfig {
        EnsembleConfig {
            n_sites: self.n_sites,
            fill_probability: self.fill_probability,
            seed: self.seed,
            model: ErrorModel {
                gate_fidelity: self.gate_fidelity,
                error_split: ErrorSplit {
                    partner_lost: self.partner_lost,
                    both_lost: self.both_lost,
                    wrong_state: self.wrong_state,
                },
                control_fraction: self.control_fraction,
                unpaired_flip_probability: self.unpaired_flip_probability,
            },
            pre_cycles: self.pre_cycles,
            replicas: self.replicas,
        }
    }
}

/// One row per cycle. Each cycle's `targets` are the previous cycle's survivors, so
/// `ratio` of the last row is the fidelity estimate.
pub fn ensemble_rows(p: &EnsembleParams) -> Result<Vec<Params>> {
    let run = run_ensemble(&p.ensemble())?;
    run.cycles
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let e = estimate_fidelity(c.targets, c.retained)?;
            Ok(to_params(&json!({
                "cycle": i,
                "pairs": c.pairs,
                "targets": c.targets,
                "retained": c.retained,
                "flushed": c.flushed,
                "lost": c.lost,
                "controls_lost": c.controls_lost,
                "ratio": e.value,
                "std_error": e.std_error,
                "rng": run.rng_algorithm,
            })))
        })
        .collect()
}

/// The swept key and its grid. Exactly one range key may hold a `start:stop:count` string.
pub fn sweep_grid(map: &Params) -> Result<(String, Vec<f64>)> {
    let mut found = None;
    for (k, v) in map {
        if let Value::String(s) = v {
            if !RANGE_KEYS.contains(&k.as_str()) {
                continue;
            }
            if found.is_some() {
                return Err(CliError::Validation("sweep takes exactly one range".into()));
            }
            found = Some((k.clone(), parse_range(s).map_err(|e| match e {
                CliError::Validation(m) => CliError::Validation(format!("field `{k}`: {m}")),
                other => other,
            })?));
        }
    }
    found.ok_or_else(|| {
        CliError::Validation(format!("sweep needs one of {} as start:stop:count", RANGE_KEYS.join(", ")))
    })
}

pub fn sweep_rows(map: &Params) -> Result<Vec<Params>> {
    let (key, grid) = sweep_grid(map)?;
    // validate the fixed keys once
    let mut base = map.clone();
    base.insert(key.clone(), json!(grid[0]));
    typed::<FomParams>(&base)?;
    grid.par_iter()
        .map(|&x| {
            let mut m = base.clone();
            m.insert(key.clone(), json!(x));
            let full = fom_row(&typed::<FomParams>(&m)?)?;
            let mut row = Params::new();
            row.insert(key.clone(), json!(x));
            for c in SWEEP_COLUMNS {
                row.insert(c.to_string(), full[*c].clone());
            }
            Ok(row)
        })
        .collect()
}

pub fn defaults(command: &str) -> Result<Params> {
    match command {
        "fom" | "sweep" => Ok(to_params(&FomParams::default())),
        "gate" => Ok(to_params(&GateParams::default())),
        "fidelity" => Ok(to_params(&FidelityParams::default())),
        "ensemble" => Ok(to_params(&EnsembleParams::default())),
        _ => Err(CliError::Validation(format!("unknown command `{command}`"))),
    }
}

/// Type-check a merged map without running anything.
pub fn validate(command: &str, map: &Params) -> Result<()> {
    match command {
        "fom" => typed::<FomParams>(map).map(|_| ()),
        "gate" => typed::<GateParams>(map).map(|_| ()),
        "fidelity" => typed::<FidelityParams>(map).map(|_| ()),
        "ensemble" => typed::<EnsembleParams>(map).map(|_| ()),
        "sweep" => {
            let (key, grid) = sweep_grid(map)?;
            let mut m = map.clone();
            m.insert(key, json!(grid[0]));
            typed::<FomParams>(&m).map(|_| ())
        }
        _ => Err(CliError::Validation(format!("unknown command `{command}`"))),
    }
}

pub fn rows(command: &str, map: &Params) -> Result<Vec<Params>> {
    match command {
        "fom" => Ok(vec![fom_row(&typed(map)?)?]),
        "gate" => gate_rows(&typed(map)?),
        "fidelity" => fidelity_rows(&typed(map)?),
        "ensemble" => ensemble_rows(&typed(map)?),
        "sweep" => sweep_rows(map),
        _ => Err(CliError::Validation(format!("unknown command `{command}`"))),
    }
}
