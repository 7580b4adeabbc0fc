//! Two particles in a common isotropic harmonic well: product states, Moshinsky
//! transformation to relative and centre-of-mass motion, and matrix elements of
//! rank-2 tensor potentials V(r) Y_2^{m_r}(r̂) acting on the relative coordinate.

mod cartesian;
mod moshinsky;
mod radial;

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::angular::{clebsch_gordan, AngMom};
use crate::error::{Error, Result};

pub use cartesian::{solid_harmonic, spherical_to_cartesian};
pub use moshinsky::{moshinsky_bracket, uncoupled_expansion};
pub use radial::{
    b_coefficients, laguerre_coefficients, radial_reduced_element, radial_wavefunction, talmi_integral, Constant,
    FnPotential, Neumann2, Power, QuasiStatic, RadialPotential,
};

/// Isotropic oscillator state |n l m⟩.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct OscState {
    pub n: u32,
    pub l: u32,
    pub m: i32,
}

impl OscState {
    pub fn new(n: u32, l: u32, m: i32) -> Result<Self> {
        if m.unsigned_abs() > l {
            return Err(Error::Domain(format!("|m| = {} exceeds l = {l}", m.abs())));
        }
        Ok(Self { n, l, m })
    }

    pub const GROUND: OscState = OscState { n: 0, l: 0, m: 0 };

    /// Oscillator quanta 2n + l.
    pub fn quanta(&self) -> u32 {
        2 * self.n + self.l
    }

    /// Energy in units of ħω.
    pub fn energy(&self) -> f64 {
        self.quanta() as f64 + 1.5
    }

    /// Number of states in this state's shell.
    pub fn shell_degeneracy(&self) -> u32 {
        let q = self.quanta();
        (q + 1) * (q + 2) / 2
    }

    fn valid(&self) -> bool {
        self.m.unsigned_abs() <= self.l
    }
}

impl fmt::Display for OscState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|{}{}{}⟩", self.n, self.l, self.m)
    }
}

/// Coupled relative/centre-of-mass state |n l, N L; λ μ⟩.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RelCmState {
    pub n: u32,
    pub l: u32,
    pub big_n: u32,
    pub big_l: u32,
    pub lam: u32,
    pub mu: i32,
}

impl RelCmState {
    pub fn quanta(&self) -> u32 {
        2 * self.n + self.l + 2 * self.big_n + self.big_l
    }
}

/// ⟨l' m'| Y_k^q |l m⟩.
pub fn gaunt(lp: u32, mp: i32, k: u32, q: i32, l: u32, m: i32) -> f64 {
    let am = |j: u32, m: i32| AngMom::int(j, m).ok();
    let (Some(a), Some(b), Some(c), Some(a0), Some(b0), Some(c0)) =
        (am(l, m), am(k, q), am(lp, mp), am(l, 0), am(k, 0), am(lp, 0))
    else {
        return 0.0;
    };
    let c_par = clebsch_gordan(a0, b0, c0);
    if c_par == 0.0 {
        return 0.0;
    }
    let pref = ((2 * l + 1) as f64 * (2 * k + 1) as f64 / (4.0 * std::f64::consts::PI * (2 * lp + 1) as f64)).sqrt();
    pref * c_par * clebsch_gordan(a, b, c)
}

fn cg_int(l1: u32, m1: i32, l2: u32, m2: i32, l: u32, m: i32) -> f64 {
    match (AngMom::int(l1, m1), AngMom::int(l2, m2), AngMom::int(l, m)) {
        (Ok(a), Ok(b), Ok(c)) => clebsch_gordan(a, b, c),
        _ => 0.0,
    }
}

/// Product state expanded as Σ c |rel⟩|cm⟩ through coupled Moshinsky brackets:
/// couple (l₁ l₂) → λ, transform, and uncouple (l L) → λ again.
pub fn product_to_rel_cm(s1: OscState, s2: OscState) -> Vec<(OscState, OscState, f64)> {
    let q = s1.quanta() + s2.quanta();
    let mu = s1.m + s2.m;
    let mut acc: HashMap<(OscState, OscState), f64> = HashMap::new();
    for lam in s1.l.abs_diff(s2.l)..=(s1.l + s2.l) {
        let c12 = cg_int(s1.l, s1.m, s2.l, s2.m, lam, mu);
        if c12 == 0.0 {
            continue;
        }
        for q_rel in 0..=q {
            for n in 0..=q_rel / 2 {
                let l = q_rel - 2 * n;
                let q_cm = q - q_rel;
                for big_n in 0..=q_cm / 2 {
                    let big_l = q_cm - 2 * big_n;
                    if lam < l.abs_diff(big_l) || lam > l + big_l {
                        continue;
                    }
                    let b = moshinsky_bracket(n, l, big_n, big_l, s1.n, s1.l, s2.n, s2.l, lam);
                    if b == 0.0 {
                        continue;
                    }
                    for m in -(l as i32)..=(l as i32) {
                        let big_m = mu - m;
                        if big_m.unsigned_abs() > big_l {
                            continue;
                        }
                        let c = cg_int(l, m, big_l, big_m, lam, mu);
                        if c != 0.0 {
                            *acc.entry((OscState { n, l, m }, OscState { n: big_n, l: big_l, m: big_m }))
                                .or_default() += c12 * b * c;
                        }
                    }
                }
            }
        }
    }
    let mut v: Vec<_> = acc.into_iter().filter(|(_, c)| c.abs() > 1e-15).map(|((a, b), c)| (a, b, c)).collect();
    v.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
    v
}

/// ⟨s₁' s₂'| V(r) Y_2^{m_r}(r̂) |s₁ s₂⟩ with r the relative coordinate, restricted to
/// the degenerate (energy-conserving) couplings. Returns exactly 0 if the projection
/// rule m₁' + m₂' = m₁ + m₂ + m_r fails or the total quanta differ.
pub fn external_tensor_element(
    bra: (OscState, OscState),
    ket: (OscState, OscState),
    m_r: i32,
    potential: &dyn RadialPotential,
) -> Result<f64> {
    external_multipole_element(bra, ket, 2, m_r, potential)
}

/// Rank-k generalization of [`external_tensor_element`]: V(r) Y_k^{m_r}(r̂).
pub fn external_multipole_element(
    bra: (OscState, OscState),
    ket: (OscState, OscState),
    k: u32,
    m_r: i32,
    potential: &dyn RadialPotential,
) -> Result<f64> {
    for s in [bra.0, bra.1, ket.0, ket.1] {
        if !s.valid() {
            return Err(Error::Domain(format!("invalid oscillator state {s}")));
        }
    }
    if m_r.unsigned_abs() > k {
        return Err(Error::Domain(format!("tensor projection {m_r} outside [-{k}, {k}]")));
    }
    if bra.0.m + bra.1.m != ket.0.m + ket.1.m + m_r {
        return Ok(0.0);
    }
    if bra.0.quanta() + bra.1.quanta() != ket.0.quanta() + ket.1.quanta() {
        return Ok(0.0);
    }
    let wk = product_to_rel_cm(ket.0, ket.1);
    let wb = product_to_rel_cm(bra.0, bra.1);
    let mut radial_cache: HashMap<(u32, u32, u32, u32), f64> = HashMap::new();
    let mut sum = 0.0;
    for (rel_b, cm_b, cb) in &wb {
        for (rel_k, cm_k, ck) in &wk {
            if cm_b != cm_k {
                continue;
            }
            let g = gaunt(rel_b.l, rel_b.m, k, m_r, rel_k.l, rel_k.m);
            if g == 0.0 {
                continue;
            }
            let key = (rel_b.n, rel_b.l, rel_k.n, rel_k.l);
            let rad = match radial_cache.get(&key) {
                Some(v) => *v,
                None => {
                    let v = radial_reduced_element(rel_b.n, rel_b.l, rel_k.n, rel_k.l, potential)?;
                    radial_cache.insert(key, v);
                    v
                }
            };
            sum += cb * ck * g * rad;
        }
    }
    Ok(sum)
}

/// Single-particle states with exactly `q` quanta, ordered by (n, l, m) descending in l.
pub fn shell(q: u32) -> Vec<OscState> {
    let mut v = Vec::new();
    for n in 0..=q / 2 {
        let l = q - 2 * n;
        for m in (-(l as i32)..=(l as i32)).rev() {
            v.push(OscState { n, l, m });
        }
    }
    v
}

/// All two-particle product states sharing `total_quanta`, optionally with fixed
/// total projection m₁ + m₂. Ordered by the quanta of particle 1, descending.
pub fn degenerate_subspace(total_quanta: u32, m_total: Option<i32>) -> Vec<(OscState, OscState)> {
    let mut out = Vec::new();
    for q1 in (0..=total_quanta).rev() {
        let q2 = total_quanta - q1;
        let mut pairs: Vec<(OscState, OscState)> = Vec::new();
        for a in shell(q1) {
            for b in shell(q2) {
                if m_total.is_none_or(|m| a.m + b.m == m) {
                    pairs.push((a, b));
                }
            }
        }
        out.extend(pairs);
    }
    out
}
