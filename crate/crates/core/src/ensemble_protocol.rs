//! Monte Carlo of the ensemble truth-table measurement in a sparsely filled lattice.
//!
//! The lattice is a 1D chain of sites, each a nearest-neighbour pair of wells for
//! the control (+) and target (−) species. Every cycle prepares targets in |0⟩ and
//! controls in |1⟩, applies the gate, and flushes every target left in |0⟩. Paired
//! targets survive a cycle with the gate fidelity, so two successive counts give
//! F̂ = N₂/N₁.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Identifier of the generator, written next to results for reproducibility.
pub const RNG_ALGORITHM: &str = "ChaCha8 (rand_chacha 0.10, seed_from_u64, stream = replica index)";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Site {
    pub control: bool,
    pub target: bool,
}

impl Site {
    pub fn paired(&self) -> bool {
        self.control && self.target
    }
}

#[derive(Debug, Clone)]
pub struct LatticeEnsemble {
    pub n_sites: usize,
    pub fill_probability: f64,
    pub seed: u64,
    pub sites: Vec<Site>,
    rng: ChaCha8Rng,
}

impl LatticeEnsemble {
    pub fn controls(&self) -> usize {
        self.sites.iter().filter(|s| s.control).count()
    }
    pub fn targets(&self) -> usize {
        self.sites.iter().filter(|s| s.target).count()
    }
    pub fn pairs(&self) -> usize {
        self.sites.iter().filter(|s| s.paired()).count()
    }
}

/// Relative weights of the three failure channels of a paired gate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ErrorSplit {
    /// One atom of the pair is lost.
    pub partner_lost: f64,
    pub both_lost: f64,
    /// Both atoms stay but the target ends in the wrong logical state.
    pub wrong_state: f64,
}

impl Default for ErrorSplit {
    fn default() -> Self {
        Self { partner_lost: 0.0, both_lost: 0.0, wrong_state: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ErrorModel {
    pub gate_fidelity: f64,
    /// Fractions of 1 − F per channel; must sum to 1.
    #[serde(default)]
    pub error_split: ErrorSplit,
    /// Share of `partner_lost` events that lose the control rather than the target.
    #[serde(default = "half")]
    pub control_fraction: f64,
    /// Probability that an unpaired target flips anyway and escapes the flush.
    #[serde(default)]
    pub unpaired_flip_probability: f64,
}

fn half() -> f64 {
    0.5
}

impl ErrorModel {
    pub fn ideal_split(gate_fidelity: f64) -> Self {
        Self { gate_fidelity, error_split: ErrorSplit::default(), control_fraction: 0.5, unpaired_flip_probability: 0.0 }
    }

    pub fn validate(&self) -> Result<()> {
        let probs = [
            ("gate_fidelity", self.gate_fidelity),
            ("control_fraction", self.control_fraction),
            ("unpaired_flip_probability", self.unpaired_flip_probability),
            ("error_split.partner_lost", self.error_split.partner_lost),
            ("error_split.both_lost", self.error_split.both_lost),
            ("error_split.wrong_state", self.error_split.wrong_state),
        ];
        for (name, p) in probs {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Domain(format!("{name} must lie in [0, 1], got {p}")));
            }
        }
        let s = self.error_split;
        let total = s.partner_lost + s.both_lost + s.wrong_state;
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::Domain(format!("error_split must sum to 1, got {total}")));
        }
        Ok(())
    }
}

/// Bookkeeping for one cycle. Every target present at the start is exactly one of
/// retained, flushed or lost.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycleCounts {
    pub pairs: u64,
    pub targets: u64,
    pub retained: u64,
    pub flushed: u64,
    pub lost: u64,
    pub controls_lost: u64,
}

impl std::ops::Add for CycleCounts {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self {
            pairs: self.pairs + o.pairs,
            targets: self.targets + o.targets,
            retained: self.retained + o.retained,
            flushed: self.flushed + o.flushed,
            lost: self.lost + o.lost,
            controls_lost: self.controls_lost + o.controls_lost,
        }
    }
}

fn check_fill(n_sites: usize, p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!("fill_probability must lie in [0, 1], got {p}")));
    }
    if n_sites == 0 {
        return Err(Error::Domain("n_sites must be positive".into()));
    }
    Ok(())
}

fn fill_with(n_sites: usize, fill_probability: f64, seed: u64, mut rng: ChaCha8Rng) -> LatticeEnsemble {
    let sites = (0..n_sites)
        .map(|_| Site { control: rng.random_bool(fill_probability), target: rng.random_bool(fill_probability) })
        .collect();
    LatticeEnsemble { n_sites, fill_probability, seed, sites, rng }
}

/// Independent Bernoulli filling of every well.
pub fn fill_lattice(n_sites: usize, fill_probability: f64, seed: u64) -> Result<LatticeEnsemble> {
    check_fill(n_sites, fill_probability)?;
    Ok(fill_with(n_sites, fill_probability, seed, ChaCha8Rng::seed_from_u64(seed)))
}

/// Probability that a site holds a complete pair.
pub fn paired_probability(fill_probability: f64) -> f64 {
    fill_probability * fill_probability
}

/// Gate on every site, then flush targets that did not flip.
pub fn cnot_flush_cycle(ens: &mut LatticeEnsemble, model: &ErrorModel) -> Result<CycleCounts> {
    model.validate()?;
    let s = model.error_split;
    let mut c = CycleCounts::default();
    for site in ens.sites.iter_mut() {
        if !site.target {
            continue;
        }
        c.targets += 1;
        if !site.control {
            if ens.rng.random_bool(model.unpaired_flip_probability) {
                c.retained += 1;
            } else {
                site.target = false;
                c.flushed += 1;
            }
            continue;
        }
        c.pairs += 1;
        if ens.rng.random_bool(model.gate_fidelity) {
            c.retained += 1;
            continue;
        }
        let u: f64 = ens.rng.random::<f64>();
        site.target = false;
        if u < s.partner_lost {
            if ens.rng.random_bool(model.control_fraction) {
                // The control is gone; its target never flips and is flushed.
                site.control = false;
                c.controls_lost += 1;
                c.flushed += 1;
            } else {
                c.lost += 1;
            }
        } else if u < s.partner_lost + s.both_lost {
            site.control = false;
            c.controls_lost += 1;
            c.lost += 1;
        } else {
            c.flushed += 1;
        }
    }
    Ok(c)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FidelityEstimate {
    pub value: f64,
    /// Binomial standard error √(F̂(1 − F̂)/N₁).
    pub std_error: f64,
}

impl FidelityEstimate {
    /// value ± k·σ, clipped to [0, 1].
    pub fn interval(&self, k: f64) -> (f64, f64) {
        ((self.value - k * self.std_error).max(0.0), (self.value + k * self.std_error).min(1.0))
    }
}

/// F̂ = N₂/N₁ from the survivor counts of two successive cycles.
pub fn estimate_fidelity(retained_first: u64, retained_second: u64) -> Result<FidelityEstimate> {
    if retained_first == 0 {
        return Err(Error::Estimation("no targets survived the first cycle".into()));
    }
    if retained_second > retained_first {
        return Err(Error::Estimation(format!(
            "second count {retained_second} exceeds first count {retained_first}"
        )));
    }
    let f = retained_second as f64 / retained_first as f64;
    Ok(FidelityEstimate { value: f, std_error: (f * (1.0 - f) / retained_first as f64).sqrt() })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleConfig {
    pub n_sites: usize,
    pub fill_probability: f64,
    pub seed: u64,
    pub model: ErrorModel,
    /// Cycles run before the two counted ones; each removes most unpaired targets.
    #[serde(default)]
    pub pre_cycles: usize,
    #[serde(default = "one")]
    pub replicas: usize,
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleRun {
    pub rng_algorithm: String,
    pub initial_pairs: u64,
    /// Pooled counts per cycle, pre-cycles included.
    pub cycles: Vec<CycleCounts>,
    pub estimate: FidelityEstimate,
}

fn run_replica(cfg: &EnsembleConfig, replica: u64) -> Result<(u64, Vec<CycleCounts>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(replica);
    let mut ens = fill_with(cfg.n_sites, cfg.fill_probability, cfg.seed, rng);
    let pairs = ens.pairs() as u64;
    let cycles = (0..cfg.pre_cycles + 2).map(|_| cnot_flush_cycle(&mut ens, &cfg.model)).collect::<Result<_>>()?;
    Ok((pairs, cycles))
}

/// Run independent replicas in parallel and pool their counts.
pub fn run_ensemble(cfg: &EnsembleConfig) -> Result<EnsembleRun> {
    check_fill(cfg.n_sites, cfg.fill_probability)?;
    cfg.model.validate()?;
    if cfg.replicas == 0 {
        return Err(Error::Domain("replicas must be positive".into()));
    }
    let per: Vec<(u64, Vec<CycleCounts>)> =
        (0..cfg.replicas as u64).into_par_iter().map(|r| run_replica(cfg, r)).collect::<Result<_>>()?;
    let n_cycles = cfg.pre_cycles + 2;
    let mut cycles = vec![CycleCounts::default(); n_cycles];
    let mut pairs = 0;
    for (p, cs) in per {
        pairs += p;
        for (acc, c) in cycles.iter_mut().zip(cs) {
            *acc = *acc + c;
        }
    }
    let estimate = estimate_fidelity(cycles[n_cycles - 2].retained, cycles[n_cycles - 1].retained)?;
    Ok(EnsembleRun { rng_algorithm: RNG_ALGORITHM.to_string(), initial_pairs: pairs, cycles, estimate })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratio_estimate() {
        let e = estimate_fidelity(9000, 8100).unwrap();
        assert!((e.value - 0.9).abs() < 1e-15);
        assert!(estimate_fidelity(0, 0).is_err());
    }

    #[test]
    fn fill_extremes() {
        assert_eq!(fill_lattice(100, 0.0, 1).unwrap().targets(), 0);
        assert_eq!(fill_lattice(100, 1.0, 1).unwrap().pairs(), 100);
    }

    #[test]
    fn split_must_normalize() {
        let mut m = ErrorModel::ideal_split(0.9);
        m.error_split.both_lost = 0.5;
        assert!(m.validate().is_err());
    }
}
