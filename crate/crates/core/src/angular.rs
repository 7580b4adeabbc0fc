//! Angular-momentum algebra in the Condon-Shortley phase convention.
//!
//! Angular momenta are stored doubled so half-integers stay exact. Clebsch-Gordan
//! coefficients and 6j symbols are evaluated from the Racah sums with exact rational
//! arithmetic; the only rounding happens in the final square root.

use std::collections::HashMap;
use std::sync::{OnceLock, RwLock};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Angular momentum |j, m⟩ with both numbers doubled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AngMom {
    pub twice_j: u32,
    pub twice_m: i32,
}

impl AngMom {
    pub fn new(twice_j: u32, twice_m: i32) -> Result<Self> {
        if twice_m.unsigned_abs() > twice_j {
            return Err(Error::Domain(format!(
                "|m| exceeds j (2j = {twice_j}, 2m = {twice_m})"
            )));
        }
        if (twice_j as i64 - twice_m as i64) % 2 != 0 {
            return Err(Error::Domain(format!(
                "j and m differ in parity (2j = {twice_j}, 2m = {twice_m})"
            )));
        }
        Ok(Self { twice_j, twice_m })
    }

    /// Integer angular momentum |j, m⟩.
    pub fn int(j: u32, m: i32) -> Result<Self> {
        Self::new(2 * j, 2 * m)
    }

    pub fn j(&self) -> f64 {
        self.twice_j as f64 / 2.0
    }

    pub fn m(&self) -> f64 {
        self.twice_m as f64 / 2.0
    }
}

/// Nuclear spin and fine-structure levels of a D2-type alkali transition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HyperfineContext {
    pub twice_i: u32,
    pub twice_j_ground: u32,
    pub twice_j_excited: u32,
}

impl HyperfineContext {
    /// J = 1/2 → J' = 3/2 with nuclear spin I = twice_i / 2.
    pub fn d2(twice_i: u32) -> Self {
        Self {
            twice_i,
            twice_j_ground: 1,
            twice_j_excited: 3,
        }
    }

    fn f_range(twice_i: u32, twice_j: u32) -> (u32, u32) {
        (twice_i.abs_diff(twice_j), twice_i + twice_j)
    }

    /// Doubled F values of the ground manifold.
    pub fn ground_levels(&self) -> Vec<u32> {
        let (lo, hi) = Self::f_range(self.twice_i, self.twice_j_ground);
        (lo..=hi).step_by(2).collect()
    }

    /// Doubled F' values of the excited manifold.
    pub fn excited_levels(&self) -> Vec<u32> {
        let (lo, hi) = Self::f_range(self.twice_i, self.twice_j_excited);
        (lo..=hi).step_by(2).collect()
    }

    fn check(&self, twice_f: u32, excited: bool) -> Result<()> {
        let tj = if excited {
            self.twice_j_excited
        } else {
            self.twice_j_ground
        };
        let (lo, hi) = Self::f_range(self.twice_i, tj);
        if twice_f < lo || twice_f > hi || (twice_f + lo) % 2 != 0 {
            return Err(Error::Domain(format!(
                "2F = {twice_f} not allowed for 2I = {}, 2J = {tj}",
                self.twice_i
            )));
        }
        Ok(())
    }
}

fn triangle(ta: u32, tb: u32, tc: u32) -> bool {
    tc >= ta.abs_diff(tb) && tc <= ta + tb && (ta + tb + tc) % 2 == 0
}

fn factorial(n: i64) -> BigInt {
    static CACHE: OnceLock<RwLock<Vec<BigInt>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| RwLock::new(vec![BigInt::one()]));
    let n = n as usize;
    {
        let c = cache.read().unwrap();
        if n < c.len() {
            return c[n].clone();
        }
    }
    let mut c = cache.write().unwrap();
    while c.len() <= n {
        let k = c.len();
        let next = &c[k - 1] * BigInt::from(k);
        c.push(next);
    }
    c[n].clone()
}

/// sign(s) * sqrt(s^2 * p) evaluated in floating point at the very end.
fn signed_sqrt(sum: &BigRational, square: &BigRational) -> f64 {
    if sum.is_zero() {
        return 0.0;
    }
    let mag = (sum * sum * square).to_f64().unwrap_or(f64::NAN).sqrt();
    if sum.is_negative() {
        -mag
    } else {
        mag
    }
}

type CgKey = (u32, i32, u32, i32, u32, i32);

fn cg_cache() -> &'static RwLock<HashMap<CgKey, f64>> {
    static CACHE: OnceLock<RwLock<HashMap<CgKey, f64>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// ⟨j1 m1; j2 m2 | J M⟩. Returns 0 when the triangle or projection rule fails.
pub fn clebsch_gordan(j1: AngMom, j2: AngMom, jj: AngMom) -> f64 {
    if j1.twice_m + j2.twice_m != jj.twice_m || !triangle(j1.twice_j, j2.twice_j, jj.twice_j) {
        return 0.0;
    }
    let key = (
        j1.twice_j, j1.twice_m, j2.twice_j, j2.twice_m, jj.twice_j, jj.twice_m,
    );
    if let Some(v) = cg_cache().read().unwrap().get(&key) {
        return *v;
    }
    let v = cg_racah(j1, j2, jj);
    cg_cache().write().unwrap().insert(key, v);
    v
}

fn cg_racah(j1: AngMom, j2: AngMom, jj: AngMom) -> f64 {
    let (a, b, c) = (j1.twice_j as i64, j2.twice_j as i64, jj.twice_j as i64);
    let (ma, mb, mc) = (j1.twice_m as i64, j2.twice_m as i64, jj.twice_m as i64);
    let f = |x2: i64| factorial(x2 / 2);

    let mut square = BigRational::new(
        BigInt::from(c + 1) * f(c + a - b) * f(c - a + b) * f(a + b - c),
        f(a + b + c + 2),
    );
    square *= BigRational::from_integer(
        f(c + mc) * f(c - mc) * f(a - ma) * f(a + ma) * f(b - mb) * f(b + mb),
    );

    // Summation bounds on k keep every factorial argument non-negative.
    let kmin = 0.max((b - c - ma) / 2).max((a - c + mb) / 2);
    let kmax = ((a + b - c) / 2).min((a - ma) / 2).min((b + mb) / 2);
    let mut sum = BigRational::zero();
    for k in kmin..=kmax {
        let den = factorial(k)
            * factorial((a + b - c) / 2 - k)
            * factorial((a - ma) / 2 - k)
            * factorial((b + mb) / 2 - k)
            * factorial((c - b + ma) / 2 + k)
            * factorial((c - a - mb) / 2 + k);
        let term = BigRational::new(BigInt::one(), den);
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    signed_sqrt(&sum, &square)
}

fn delta_sq(a: i64, b: i64, c: i64) -> BigRational {
    let f = |x2: i64| factorial(x2 / 2);
    BigRational::new(f(a + b - c) * f(a - b + c) * f(b + c - a), f(a + b + c + 2))
}

/// Wigner 6j symbol {j1 j2 j3; j4 j5 j6}, arguments given as doubled j.
///
/// A triad whose doubled sum is odd can never couple and is reported as a domain
/// error; triads failing only the triangle inequality give 0.
pub fn wigner_6j(tj: [u32; 6]) -> Result<f64> {
    let triads = [
        (tj[0], tj[1], tj[2]),
        (tj[0], tj[4], tj[5]),
        (tj[3], tj[1], tj[5]),
        (tj[3], tj[4], tj[2]),
    ];
    for &(a, b, c) in &triads {
        if (a + b + c) % 2 != 0 {
            return Err(Error::Domain(format!(
                "6j triad ({a}/2, {b}/2, {c}/2) has half-integer sum"
            )));
        }
    }
    if !triads.iter().all(|&(a, b, c)| triangle(a, b, c)) {
        return Ok(0.0);
    }
    type Key = [u32; 6];
    static CACHE: OnceLock<RwLock<HashMap<Key, f64>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| RwLock::new(HashMap::new()));
    if let Some(v) = cache.read().unwrap().get(&tj) {
        return Ok(*v);
    }

    let [a, b, c, d, e, ff] = tj.map(|x| x as i64);
    let square = delta_sq(a, b, c) * delta_sq(a, e, ff) * delta_sq(d, b, ff) * delta_sq(d, e, c);
    let sums = [a + b + c, a + e + ff, d + b + ff, d + e + c];
    let diffs = [a + b + d + e, a + c + d + ff, b + c + e + ff];
    let tmin = sums.iter().max().unwrap() / 2;
    let tmax = diffs.iter().min().unwrap() / 2;
    let mut sum = BigRational::zero();
    for t in tmin..=tmax {
        let mut den = BigInt::one();
        for s in sums {
            den *= factorial(t - s / 2);
        }
        for s in diffs {
            den *= factorial(s / 2 - t);
        }
        let term = BigRational::new(factorial(t + 1), den);
        if t % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    let v = signed_sqrt(&sum, &square);
    cache.write().unwrap().insert(tj, v);
    Ok(v)
}

/// Relative oscillator strength f_{F'F} for the F → F' hyperfine component.
///
/// f_{F'F} = √((2J'+1)(2F+1)) {J J' 1; F' F I}, normalized so the stretched cycling
/// transition has unit strength. Summed over F' and q a ground sublevel then carries
/// Σ |f ⟨F M; 1 q | F' M+q⟩|² = (2J'+1)/(2J+1), the fine-structure completeness
/// factor. The sign follows (−1)^{F'+J+1+I} and drops out of every physical quantity.
pub fn oscillator_strength_factor(
    twice_f_excited: u32,
    twice_f_ground: u32,
    ctx: HyperfineContext,
) -> Result<f64> {
    ctx.check(twice_f_excited, true)?;
    ctx.check(twice_f_ground, false)?;
    let (tj, tjp, ti) = (ctx.twice_j_ground, ctx.twice_j_excited, ctx.twice_i);
    let six = wigner_6j([tj, tjp, 2, twice_f_excited, twice_f_ground, ti])?;
    let phase_twice = twice_f_excited + tj + 2 + ti;
    let sign = if (phase_twice / 2) % 2 == 0 { 1.0 } else { -1.0 };
    Ok(sign * (((tjp + 1) * (twice_f_ground + 1)) as f64).sqrt() * six)
}

/// Associated Legendre P_l^m(x) for m ≥ 0, including the (−1)^m phase.
pub fn assoc_legendre(l: u32, m: u32, x: f64) -> f64 {
    if m > l {
        return 0.0;
    }
    let somx2 = ((1.0 - x) * (1.0 + x)).max(0.0).sqrt();
    let mut pmm = 1.0;
    let mut fact = 1.0;
    for _ in 0..m {
        pmm *= -fact * somx2;
        fact += 2.0;
    }
    if l == m {
        return pmm;
    }
    let mut pmmp1 = x * (2 * m + 1) as f64 * pmm;
    if l == m + 1 {
        return pmmp1;
    }
    let mut pll = 0.0;
    for ll in (m + 2)..=l {
        pll = (x * (2 * ll - 1) as f64 * pmmp1 - (ll + m - 1) as f64 * pmm) / (ll - m) as f64;
        pmm = pmmp1;
        pmmp1 = pll;
    }
    pll
}

/// Orthonormal spherical harmonic Y_l^m(θ, φ) with the Condon-Shortley phase.
pub fn spherical_harmonic(l: u32, m: i32, theta: f64, phi: f64) -> Result<Complex64> {
    if m.unsigned_abs() > l {
        return Err(Error::Domain(format!("|m| = {} exceeds l = {l}", m.abs())));
    }
    if !theta.is_finite() || !phi.is_finite() {
        return Err(Error::Domain("non-finite angle".into()));
    }
    let am = m.unsigned_abs();
    let mut ratio = 1.0;
    for k in (l - am + 1)..=(l + am) {
        ratio /= k as f64;
    }
    let norm = ((2 * l + 1) as f64 / (4.0 * std::f64::consts::PI) * ratio).sqrt();
    let y = norm * assoc_legendre(l, am, theta.cos()) * Complex64::from_polar(1.0, am as f64 * phi);
    if m >= 0 {
        Ok(y)
    } else {
        let sign = if am % 2 == 0 { 1.0 } else { -1.0 };
        Ok(sign * y.conj())
    }
}
