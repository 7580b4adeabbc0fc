//! Radial oscillator functions, Talmi integrals and radial expansion coefficients.
//!
//! Lengths are in units of the oscillator length √(ħ/mω); the radial function is
//! R_nl(r) = N r^l e^{−r²/2} L_n^{l+1/2}(r²) with N² = 2 n!/Γ(n+l+3/2).

use libm::tgamma;

use crate::dipole_tensor::radial_functions;
use crate::error::{Error, Result};
use crate::quadrature::{integrate, QuadConfig};

/// A central potential V(r) in oscillator units.
pub trait RadialPotential: Sync {
    fn value(&self, r: f64) -> f64;

    /// Leading power k of V ~ r^k at the origin; decides integrability.
    fn origin_power(&self) -> i32 {
        0
    }

    /// Closed-form Talmi integral if one exists.
    fn talmi_exact(&self, _p: f64) -> Option<f64> {
        None
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constant(pub f64);

impl RadialPotential for Constant {
    fn value(&self, _r: f64) -> f64 {
        self.0
    }
    fn talmi_exact(&self, _p: f64) -> Option<f64> {
        Some(self.0)
    }
}

/// V(r) = r^k.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Power(pub i32);

impl RadialPotential for Power {
    fn value(&self, r: f64) -> f64 {
        r.powi(self.0)
    }
    fn origin_power(&self) -> i32 {
        self.0
    }
    fn talmi_exact(&self, p: f64) -> Option<f64> {
        let a = p + 1.5 + 0.5 * self.0 as f64;
        (a > 0.0).then(|| tgamma(a) / tgamma(p + 1.5))
    }
}

/// Retarded dipole-dipole radial potential n_2(2η r) in the relative coordinate.
/// The factor 2 converts the relative oscillator coordinate to the physical
/// separation in units of the single-particle rms width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Neumann2 {
    pub eta: f64,
}

impl RadialPotential for Neumann2 {
    fn value(&self, r: f64) -> f64 {
        radial_functions(2, 2.0 * self.eta * r).map(|(_, n)| n).unwrap_or(f64::NEG_INFINITY)
    }
    fn origin_power(&self) -> i32 {
        -3
    }
}

/// Near-field limit of [`Neumann2`]: −3/(2η r)³.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuasiStatic {
    pub eta: f64,
}

impl RadialPotential for QuasiStatic {
    fn value(&self, r: f64) -> f64 {
        let x = 2.0 * self.eta * r;
        -3.0 / (x * x * x)
    }
    fn origin_power(&self) -> i32 {
        -3
    }
    fn talmi_exact(&self, p: f64) -> Option<f64> {
        (p > 0.0).then(|| -3.0 / (8.0 * self.eta.powi(3)) * tgamma(p) / tgamma(p + 1.5))
    }
}

/// Wraps a closure as a potential with a declared origin power.
pub struct FnPotential<F: Fn(f64) -> f64 + Sync> {
    pub f: F,
    pub origin_power: i32,
}

impl<F: Fn(f64) -> f64 + Sync> RadialPotential for FnPotential<F> {
    fn value(&self, r: f64) -> f64 {
        (self.f)(r)
    }
    fn origin_power(&self) -> i32 {
        self.origin_power
    }
}

/// Coefficients of L_n^α(x) in powers of x.
pub fn laguerre_coefficients(n: u32, alpha: f64) -> Vec<f64> {
    // (−1)^k Γ(n+α+1) / (Γ(n−k+1) Γ(α+k+1) k!)
    let mut c = Vec::with_capacity(n as usize + 1);
    let mut term = tgamma(n as f64 + alpha + 1.0) / (tgamma(n as f64 + 1.0) * tgamma(alpha + 1.0));
    for k in 0..=n {
        c.push(term);
        let kf = k as f64;
        term *= -((n as f64 - kf) / ((alpha + kf + 1.0) * (kf + 1.0)));
    }
    c
}

pub fn radial_norm(n: u32, l: u32) -> f64 {
    (2.0 * tgamma(n as f64 + 1.0) / tgamma(n as f64 + l as f64 + 1.5)).sqrt()
}

pub fn radial_wavefunction(n: u32, l: u32, r: f64) -> f64 {
    let c = laguerre_coefficients(n, l as f64 + 0.5);
    let r2 = r * r;
    let lag = c.iter().rev().fold(0.0, |acc, &ck| acc * r2 + ck);
    radial_norm(n, l) * r.powi(l as i32) * (-0.5 * r2).exp() * lag
}

/// I_p(V) = 2/Γ(p+3/2) ∫_0^∞ r^{2p+2} e^{−r²} V(r) dr.
pub fn talmi_integral(p: f64, potential: &dyn RadialPotential) -> Result<f64> {
    if !(p >= 0.0) || !p.is_finite() {
        return Err(Error::Domain(format!("Talmi index must be non-negative, got {p}")));
    }
    let k = potential.origin_power() as f64;
    if 2.0 * p + 3.0 + k <= 0.0 {
        return Err(Error::Integrability(format!(
            "r^(2p+2) V(r) with p = {p} and V ~ r^{k} diverges at the origin"
        )));
    }
    if let Some(v) = potential.talmi_exact(p) {
        return Ok(v);
    }
    let rmax = (p + 1.0).sqrt() + 8.0;
    let cfg = QuadConfig { rel_tol: 1e-12, abs_tol: 1e-300, max_evals: 2_000_000 };
    let res = integrate(
        |r| {
            if r <= 0.0 {
                return 0.0;
            }
            r.powf(2.0 * p + 2.0) * (-r * r).exp() * potential.value(r)
        },
        0.0,
        rmax,
        cfg,
    )?;
    Ok(2.0 / tgamma(p + 1.5) * res.value)
}

/// B(nl, n'l', p) for p = (l+l')/2 + k, k = 0..=n+n'. Returned as (p, B) pairs.
pub fn b_coefficients(n: u32, l: u32, np: u32, lp: u32) -> Vec<(f64, f64)> {
    let a = laguerre_coefficients(n, l as f64 + 0.5);
    let b = laguerre_coefficients(np, lp as f64 + 0.5);
    let mut c = vec![0.0; (n + np + 1) as usize];
    for (i, ai) in a.iter().enumerate() {
        for (j, bj) in b.iter().enumerate() {
            c[i + j] += ai * bj;
        }
    }
    let nn = radial_norm(n, l) * radial_norm(np, lp);
    c.iter()
        .enumerate()
        .map(|(k, ck)| {
            let p = 0.5 * (l + lp) as f64 + k as f64;
            (p, nn * ck * tgamma(p + 1.5) / 2.0)
        })
        .collect()
}

/// ⟨n l | V | n' l'⟩ = Σ_p B(nl, n'l', p) I_p(V).
pub fn radial_reduced_element(n: u32, l: u32, np: u32, lp: u32, potential: &dyn RadialPotential) -> Result<f64> {
    let mut sum = 0.0;
    for (p, b) in b_coefficients(n, l, np, lp) {
        sum += b * talmi_integral(p, potential)?;
    }
    Ok(sum)
}
