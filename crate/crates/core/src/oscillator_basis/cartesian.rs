//! Expansion of spherical oscillator states |n l m⟩ in the Cartesian product basis
//! |n_x n_y n_z⟩, carried out through the polynomial part of the wave function.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use num_complex::Complex64;

use super::radial::{laguerre_coefficients, radial_norm};

type Poly = HashMap<[u32; 3], Complex64>;

fn mul(a: &Poly, b: &Poly) -> Poly {
    let mut out = Poly::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            let e = [ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2]];
            *out.entry(e).or_default() += ca * cb;
        }
    }
    out
}

fn pow(a: &Poly, k: u32) -> Poly {
    let mut out = Poly::from([([0, 0, 0], Complex64::new(1.0, 0.0))]);
    for _ in 0..k {
        out = mul(&out, a);
    }
    out
}

fn fact(n: u32) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

fn linear(cx: Complex64, cy: Complex64, cz: Complex64) -> Poly {
    let mut p = Poly::new();
    for (e, c) in [([1, 0, 0], cx), ([0, 1, 0], cy), ([0, 0, 1], cz)] {
        if c != Complex64::new(0.0, 0.0) {
            p.insert(e, c);
        }
    }
    p
}

/// Regular solid harmonic r^l Y_l^m as a polynomial in (x, y, z).
pub fn solid_harmonic(l: u32, m: i32) -> Vec<([u32; 3], Complex64)> {
    let c = |re: f64, im: f64| Complex64::new(re, im);
    let plus = linear(c(-0.5, 0.0), c(0.0, -0.5), c(0.0, 0.0));
    let minus = linear(c(0.5, 0.0), c(0.0, -0.5), c(0.0, 0.0));
    let z = linear(c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0));
    let am = m.unsigned_abs();
    let norm = ((2 * l + 1) as f64 / (4.0 * std::f64::consts::PI) * fact(l + am) * fact(l - am)).sqrt();
    let mut out = Poly::new();
    // p − q = m, p + q + s = l
    for q in 0..=l {
        let p = q as i32 + m;
        if p < 0 {
            continue;
        }
        let p = p as u32;
        if p + q > l {
            continue;
        }
        let s = l - p - q;
        let term = mul(&mul(&pow(&plus, p), &pow(&minus, q)), &pow(&z, s));
        let w = norm / (fact(p) * fact(q) * fact(s));
        for (e, v) in term {
            *out.entry(e).or_default() += v * w;
        }
    }
    let mut v: Vec<_> = out.into_iter().filter(|(_, c)| c.norm() > 0.0).collect();
    v.sort_by_key(|(e, _)| *e);
    v
}

/// Coefficients of x^k in the physicists' Hermite basis, multiplied by the 1D
/// oscillator normalization so they apply to x^k e^{−x²/2} in terms of φ_j(x).
fn monomial_to_oscillator(k: u32) -> Vec<(u32, f64)> {
    let sqrt_pi = std::f64::consts::PI.sqrt();
    (0..=k / 2)
        .map(|m| {
            let j = k - 2 * m;
            let h = fact(k) / (2f64.powi(k as i32) * fact(m) * fact(j));
            let c = (2f64.powi(j as i32) * fact(j) * sqrt_pi).sqrt();
            (j, h * c)
        })
        .collect()
}

/// |n l m⟩ = Σ_c S_c |c⟩ over Cartesian triples c with c_x + c_y + c_z = 2n + l.
pub fn spherical_to_cartesian(n: u32, l: u32, m: i32) -> Arc<Vec<([u32; 3], Complex64)>> {
    type Key = (u32, u32, i32);
    static CACHE: OnceLock<RwLock<HashMap<Key, Arc<Vec<([u32; 3], Complex64)>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| RwLock::new(HashMap::new()));
    if let Some(v) = cache.read().unwrap().get(&(n, l, m)) {
        return v.clone();
    }

    let solid: Poly = solid_harmonic(l, m).into_iter().collect();
    let r2 = Poly::from([
        ([2, 0, 0], Complex64::new(1.0, 0.0)),
        ([0, 2, 0], Complex64::new(1.0, 0.0)),
        ([0, 0, 2], Complex64::new(1.0, 0.0)),
    ]);
    let lag = laguerre_coefficients(n, l as f64 + 0.5);
    let mut radial = Poly::new();
    for (k, ck) in lag.iter().enumerate() {
        for (e, v) in pow(&r2, k as u32) {
            *radial.entry(e).or_default() += v * ck;
        }
    }
    let poly = mul(&solid, &radial);
    let norm = radial_norm(n, l);

    let shell = 2 * n + l;
    let mut out: HashMap<[u32; 3], Complex64> = HashMap::new();
    for (e, c) in poly {
        let (hx, hy, hz) = (
            monomial_to_oscillator(e[0]),
            monomial_to_oscillator(e[1]),
            monomial_to_oscillator(e[2]),
        );
        for &(jx, cx) in &hx {
            for &(jy, cy) in &hy {
                for &(jz, cz) in &hz {
                    // Lower shells cancel identically; skip them instead of summing noise.
                    if jx + jy + jz == shell {
                        *out.entry([jx, jy, jz]).or_default() += c * (norm * cx * cy * cz);
                    }
                }
            }
        }
    }
    let mut v: Vec<_> = out.into_iter().filter(|(_, c)| c.norm() > 1e-15).collect();
    v.sort_by_key(|(e, _)| *e);
    let v = Arc::new(v);
    cache.write().unwrap().insert((n, l, m), v.clone());
    v
}
