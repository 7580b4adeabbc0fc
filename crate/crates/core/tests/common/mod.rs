//! Shared oracles for the integration tests.
#![allow(dead_code)]

use dipolatt::angular::spherical_harmonic;
use dipolatt::oscillator_basis::{radial_wavefunction, shell, OscState, RadialPotential};
use gauss_quad::{FiniteAboveNegOneF64, GaussHermite, GaussLaguerre, GaussLegendre};
use nalgebra::Vector3;
use num_complex::Complex64;
use rand::RngExt;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use std::num::NonZeroUsize;

fn nz(n: usize) -> NonZeroUsize {
    NonZeroUsize::new(n).unwrap()
}

fn psi(s: OscState, v: &Vector3<f64>) -> Complex64 {
    let r = v.norm();
    let theta = if r > 0.0 { (v.z / r).clamp(-1.0, 1.0).acos() } else { 0.0 };
    let phi = v.y.atan2(v.x);
    radial_wavefunction(s.n, s.l, r) * spherical_harmonic(s.l, s.m, theta, phi).unwrap()
}

/// V(u) = u^p e^{−β u²} times Y_2^{m_r}(û), u = (r₁ − r₂)/√2.
pub struct Oracle {
    pub p: i32,
    pub beta: f64,
    pub shift: i32,
}

impl Oracle {
    pub fn element(&self, bra: (OscState, OscState), ket: (OscState, OscState), m_r: i32) -> Complex64 {
        let gh = GaussHermite::new(nz(5));
        let gh = gh.as_node_weight_pairs();
        let gl = GaussLegendre::new(nz(8));
        let nphi = 12;
        let alpha = 0.5 * (1 + self.p) as f64 + self.shift as f64;
        let lag = GaussLaguerre::new(nz(6), FiniteAboveNegOneF64::new(alpha).unwrap());
        let s2 = std::f64::consts::FRAC_1_SQRT_2;
        let mut total = Complex64::new(0.0, 0.0);
        for &(s, ws) in lag.as_node_weight_pairs() {
            let t = s / (1.0 + self.beta);
            let u = t.sqrt();
            // A(u) = ∫ dΩ Y₂ F(u û), with F the centre-of-mass integral
            let mut a = Complex64::new(0.0, 0.0);
            for &(c, wc) in gl.as_node_weight_pairs() {
                let th = c.acos();
                let st = (1.0 - c * c).sqrt();
                for k in 0..nphi {
                    let ph = 2.0 * PI * k as f64 / nphi as f64;
                    let uv = Vector3::new(u * st * ph.cos(), u * st * ph.sin(), u * c);
                    let y = spherical_harmonic(2, m_r, th, ph).unwrap();
                    let mut f = Complex64::new(0.0, 0.0);
                    for &(x, wx) in gh {
                        for &(yy, wy) in gh {
                            for &(z, wz) in gh {
                                let rv = Vector3::new(x, yy, z);
                                let r1 = (rv + uv) * s2;
                                let r2 = (rv - uv) * s2;
                                let prod = (psi(bra.0, &r1) * psi(bra.1, &r2)).conj() * psi(ket.0, &r1) * psi(ket.1, &r2);
                                f += prod * (wx * wy * wz * rv.norm_squared().exp());
                            }
                        }
                    }
                    a += y * f * (wc * 2.0 * PI / nphi as f64);
                }
            }
            total += a * (t.exp() * t.powi(-self.shift) * ws);
        }
        total * (0.5 * (1.0 + self.beta).powf(-alpha - 1.0))
    }
}

pub struct GaussPower {
    pub p: i32,
    pub beta: f64,
}

impl RadialPotential for GaussPower {
    fn value(&self, r: f64) -> f64 {
        r.powi(self.p) * (-self.beta * r * r).exp()
    }
    fn origin_power(&self) -> i32 {
        self.p
    }
}

pub fn random_state(rng: &mut ChaCha8Rng, q: u32) -> OscState {
    let sh = shell(q);
    sh[rng.random_range(0..sh.len())]
}
