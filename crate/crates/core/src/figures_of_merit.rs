//! Figure of merit ℱ = −⟨f_qq⟩ / (2(1 + ⟨g_qq⟩)): coherent dipole-dipole shift over
//! cooperative scattering, averaged over the relative-coordinate distribution of two
//! trapped atoms.
//!
//! All lengths are in units of 1/k_L. A ground-state atom has rms width η = k_L x₀
//! along each axis, so the relative coordinate has width √2 η.

use std::f64::consts::PI;

use libm::erf;
use serde::{Deserialize, Serialize};

use crate::dipole_tensor::{diagonal_p2_coefficient, j2, radial_functions};
use crate::error::{Error, Result};
use crate::optimize::{maximize, Maximum, SearchConfig};
use crate::oscillator_basis::{external_tensor_element, Neumann2, OscState, QuasiStatic, RadialPotential};
use crate::quadrature::{integrate, QuadConfig};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TrapGeometry {
    /// Both atoms in one cylindrically symmetric well.
    CommonEllipsoid { eta_perp: f64, eta_par: f64 },
    /// Spherical wells displaced along z by zbar = Δz/x₀.
    SeparatedSpheres { eta: f64, zbar: f64 },
    CommonSphere { eta: f64 },
}

impl TrapGeometry {
    pub fn validate(&self) -> Result<()> {
        let ok = |v: f64| v > 0.0 && v.is_finite();
        let valid = match *self {
            TrapGeometry::CommonEllipsoid { eta_perp, eta_par } => ok(eta_perp) && ok(eta_par),
            TrapGeometry::SeparatedSpheres { eta, zbar } => ok(eta) && zbar >= 0.0 && zbar.is_finite(),
            TrapGeometry::CommonSphere { eta } => ok(eta),
        };
        if valid {
            Ok(())
        } else {
            Err(Error::Domain(format!("invalid trap geometry {self:?}")))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Analytic,
    Quadrature,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FomValue {
    pub value: f64,
    pub method: Method,
    pub includes_retardation: bool,
    /// False when the localization is outside the regime where the model holds.
    pub in_regime: bool,
}

impl FomValue {
    fn analytic(value: f64, in_regime: bool) -> Self {
        Self { value, method: Method::Analytic, includes_retardation: false, in_regime }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FomOptions {
    /// Keep the isotropic n₀ radiation term of f.
    pub keep_n0: bool,
    pub quad: QuadConfig,
}

impl Default for FomOptions {
    fn default() -> Self {
        Self { keep_n0: false, quad: QuadConfig::default() }
    }
}

const REGIME_ETA: f64 = 0.3;

/// Near-field ℱ for a common cylindrical well, q = 0 drive.
pub fn fom_ellipsoid_nearfield(eta_perp: f64, eta_par: f64) -> Result<FomValue> {
    TrapGeometry::CommonEllipsoid { eta_perp, eta_par }.validate()?;
    let sp = 2f64.sqrt() * eta_perp;
    let sz = 2f64.sqrt() * eta_par;
    let a = 1.0 / (2.0 * sp * sp);
    let b = 1.0 / (2.0 * sz * sz);
    let t = b - a;
    let norm = (2.0 * PI).powf(-1.5) / (sp * sp * sz);
    // I = t ∫_{−1}^{1} c²(1−c²)/(a + t c²) dc, ⟨P₂/r³⟩ = −π N I.
    let i = if (t / a).abs() < 0.05 {
        let mut sum = 0.0;
        let mut pow = 1.0;
        for k in 0..40 {
            let term = pow * 4.0 / (((2 * k + 3) * (2 * k + 5)) as f64);
            sum += term;
            if term.abs() < 1e-17 * sum.abs() {
                break;
            }
            pow *= -t / a;
        }
        t * sum / a
    } else {
        let k = if t > 0.0 {
            2.0 / (a * t).sqrt() * (t / a).sqrt().atan()
        } else {
            2.0 / (a * -t).sqrt() * (-t / a).sqrt().atanh()
        };
        t * (-2.0 / (3.0 * t) + 2.0 * (1.0 + a / t) / t - a * (t + a) / (t * t) * k)
    };
    let value = 0.75 * PI * norm * i;
    Ok(FomValue::analytic(value, eta_perp.max(eta_par) <= REGIME_ETA))
}

/// Near-field ℱ for two spherical wells separated along the drive axis, q = 0.
pub fn fom_separated_spheres(zbar: f64, eta: f64) -> Result<FomValue> {
    TrapGeometry::SeparatedSpheres { eta, zbar }.validate()?;
    let d = zbar / 2f64.sqrt();
    let g = if d < 0.5 {
        let mut sum = 0.0;
        let mut pow = d * d; // D^{2k+2}
        let mut fact = 1.0; // 2^k k!
        for k in 0..30 {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            let term = sign * pow / (3.0 * fact * (2 * k + 5) as f64);
            sum += term;
            if term.abs() < 1e-18 * sum.abs().max(1e-300) {
                break;
            }
            pow *= d * d;
            fact *= 2.0 * (k + 1) as f64;
        }
        (2.0 / PI).sqrt() * sum
    } else {
        erf(d / 2f64.sqrt()) / d.powi(3) - (2.0 / PI).sqrt() * (-0.5 * d * d).exp() * (1.0 / 3.0 + 1.0 / (d * d))
    };
    let value = -3.0 / (8.0 * 2f64.sqrt() * eta.powi(3)) * g;
    Ok(FomValue::analytic(value, eta <= REGIME_ETA))
}

/// Near-field ℱ for either geometry and drive polarization q.
pub fn fom_nearfield(geometry: TrapGeometry, q: i32) -> Result<FomValue> {
    let aq = diagonal_p2_coefficient(q)?;
    let mut v = match geometry {
        TrapGeometry::CommonEllipsoid { eta_perp, eta_par } => fom_ellipsoid_nearfield(eta_perp, eta_par)?,
        TrapGeometry::SeparatedSpheres { eta, zbar } => fom_separated_spheres(zbar, eta)?,
        TrapGeometry::CommonSphere { eta } => {
            geometry.validate()?;
            FomValue::analytic(0.0, eta <= REGIME_ETA)
        }
    };
    v.value *= aq;
    Ok(v)
}

/// Angular moments M_l(r) = ∫ dΩ ρ(r, Ω) P_l(cos θ), l ∈ {0, 2}.
struct Moments<'a> {
    geometry: TrapGeometry,
    quad: &'a QuadConfig,
}

fn p2(c: f64) -> f64 {
    1.5 * c * c - 0.5
}

/// e^{−κ} i_l(κ) for the modified spherical Bessel functions, l ∈ {0, 2}.
fn scaled_i(l: u32, k: f64) -> f64 {
    if k < 0.5 {
        let (pre, start) = if l == 0 { (1.0, 3) } else { (k * k / 15.0, 7) };
        let y = 0.5 * k * k;
        let mut term = 1.0;
        let mut sum = 1.0;
        for j in 1..30 {
            term *= y / (j as f64 * (start - 2 + 2 * j) as f64);
            sum += term;
        }
        (-k).exp() * pre * sum
    } else {
        let em = (-2.0 * k).exp();
        let sh = 0.5 * (1.0 - em); // e^{−κ} sinh κ
        let ch = 0.5 * (1.0 + em);
        if l == 0 {
            sh / k
        } else {
            (3.0 / (k * k) + 1.0) * sh / k - 3.0 * ch / (k * k)
        }
    }
}

impl Moments<'_> {
    fn eval(&self, r: f64) -> Result<(f64, f64)> {
        match self.geometry {
            TrapGeometry::CommonSphere { eta } => {
                let s2 = 2.0 * eta * eta;
                let norm = (2.0 * PI * s2).powf(-1.5);
                Ok((4.0 * PI * norm * (-r * r / (2.0 * s2)).exp(), 0.0))
            }
            TrapGeometry::SeparatedSpheres { eta, zbar } => {
                let s2 = 2.0 * eta * eta;
                let d = zbar * eta;
                let norm = (2.0 * PI * s2).powf(-1.5);
                let k = r * d / s2;
                let env = (-(r - d) * (r - d) / (2.0 * s2)).exp();
                let base = 2.0 * PI * norm * env * 2.0;
                Ok((base * scaled_i(0, k), base * scaled_i(2, k)))
            }
            TrapGeometry::CommonEllipsoid { eta_perp, eta_par } => {
                let sp2 = 2.0 * eta_perp * eta_perp;
                let sz2 = 2.0 * eta_par * eta_par;
                let norm = (2.0 * PI).powf(-1.5) / (sp2 * sz2.sqrt());
                let a = 1.0 / (2.0 * sp2);
                let t = 1.0 / (2.0 * sz2) - a;
                let cfg = QuadConfig { abs_tol: 1e-300, ..*self.quad };
                let m0 = integrate(|c| (-r * r * (a + t * c * c)).exp(), 0.0, 1.0, cfg)?.value;
                // m2 vanishes like r² against m0; resolve it only to m0's scale
                let cfg2 = QuadConfig { abs_tol: (1e-3 * self.quad.rel_tol * m0).max(1e-300), ..*self.quad };
                let m2 = integrate(|c| p2(c) * (-r * r * (a + t * c * c)).exp(), 0.0, 1.0, cfg2)?.value;
                // factor 2 for c ∈ [−1, 0]
                Ok((4.0 * PI * norm * m0, 4.0 * PI * norm * m2))
            }
        }
    }

    fn radial_range(&self) -> (f64, f64) {
        match self.geometry {
            TrapGeometry::CommonSphere { eta } => (0.0, 14.0 * 2f64.sqrt() * eta),
            TrapGeometry::SeparatedSpheres { eta, zbar } => (0.0, zbar * eta + 14.0 * 2f64.sqrt() * eta),
            TrapGeometry::CommonEllipsoid { eta_perp, eta_par } => (0.0, 14.0 * 2f64.sqrt() * eta_perp.max(eta_par)),
        }
    }
}

/// ℱ with full retardation by quadrature: radial integral of the angular moments.
pub fn fom_generic(geometry: TrapGeometry, q: i32, opts: &FomOptions) -> Result<FomValue> {
    let (f_mean, g_mean) = tensor_means(geometry, q, opts)?;
    let in_regime = match geometry {
        TrapGeometry::CommonEllipsoid { eta_perp, eta_par } => eta_perp.max(eta_par) <= REGIME_ETA,
        TrapGeometry::SeparatedSpheres { eta, .. } | TrapGeometry::CommonSphere { eta } => eta <= REGIME_ETA,
    };
    let value = -f_mean / (2.0 * (1.0 + g_mean));
    Ok(FomValue { value, method: Method::Quadrature, includes_retardation: true, in_regime })
}

/// Retarded averages (⟨f_qq⟩, ⟨g_qq⟩) over the relative-coordinate distribution.
pub fn tensor_means(geometry: TrapGeometry, q: i32, opts: &FomOptions) -> Result<(f64, f64)> {
    geometry.validate()?;
    let aq = diagonal_p2_coefficient(q)?;
    let mom = Moments { geometry, quad: &opts.quad };
    let isotropic = matches!(geometry, TrapGeometry::CommonSphere { .. });
    let (lo, hi) = mom.radial_range();
    let cfg = QuadConfig { abs_tol: 1e-300, ..opts.quad };
    let f_mean = if isotropic && !opts.keep_n0 {
        // No P₂ moment: the anisotropic part averages to exactly zero.
        0.0
    } else {
        let mut err: Option<Error> = None;
        let res = integrate(
            |r| {
                if r <= 0.0 {
                    return 0.0;
                }
                let (m0, m2) = match mom.eval(r) {
                    Ok(v) => v,
                    Err(e) => {
                        err.get_or_insert(e);
                        return 0.0;
                    }
                };
                let (_, n2) = radial_functions(2, r).unwrap_or((0.0, 0.0));
                let mut v = -aq * n2 * m2;
                if opts.keep_n0 {
                    v += r.cos() / r * m0;
                }
                r * r * v
            },
            lo,
            hi,
            cfg,
        );
        if let Some(e) = err {
            return Err(Error::Numerical(format!("angular moment failed: {e}")));
        }
        res.map_err(|e| Error::Numerical(format!("<f> quadrature: {e}")))?.value
    };
    let g_mean = integrate(
        |r| {
            if r <= 0.0 {
                return 0.0;
            }
            let (m0, m2) = mom.eval(r).unwrap_or((0.0, 0.0));
            let j0 = if r < 1e-4 { 1.0 - r * r / 6.0 } else { r.sin() / r };
            r * r * (j0 * m0 + aq * j2(r) * m2)
        },
        lo,
        hi,
        cfg,
    )
    .map_err(|e| Error::Numerical(format!("<g> quadrature: {e}")))?
    .value;
    Ok((f_mean, g_mean))
}

/// Near-field averages: ⟨g⟩ = 1 and ⟨f⟩ = −4ℱ.
pub fn tensor_means_nearfield(geometry: TrapGeometry, q: i32) -> Result<(f64, f64)> {
    Ok((-4.0 * fom_nearfield(geometry, q)?.value, 1.0))
}

/// Probability that the two atoms in separated spherical wells are closer than
/// abar (in units of x₀).
pub fn close_approach_probability(abar: f64, zbar: f64) -> Result<f64> {
    if !(abar >= 0.0) || !(zbar >= 0.0) {
        return Err(Error::Domain(format!("abar = {abar}, zbar = {zbar} must be non-negative")));
    }
    if abar.is_infinite() {
        return Ok(1.0);
    }
    let sp = PI.sqrt();
    let p = if zbar == 0.0 {
        erf(abar / 2.0) - abar / sp * (-abar * abar / 4.0).exp()
    } else {
        let x = 0.5 * abar * zbar;
        // e^{−(a−z)²/4} − e^{−(a+z)²/4}, written to stay accurate for small z.
        let diff = if x < 20.0 {
            2.0 * (-(abar * abar + zbar * zbar) / 4.0).exp() * x.sinh()
        } else {
            (-(abar - zbar).powi(2) / 4.0).exp() - (-(abar + zbar).powi(2) / 4.0).exp()
        };
        0.5 * (erf((abar + zbar) / 2.0) + erf((abar - zbar) / 2.0)) - diff / (zbar * sp)
    };
    Ok(p.clamp(0.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SqrtSwapFom {
    /// Stretched-state encoding |1⟩ = |0 1 1⟩.
    pub stretched: FomValue,
    /// Encoding |1⟩ = |0 1 0⟩, set by its exchange coupling.
    pub z_oscillation: FomValue,
    pub improvement: f64,
}

/// √SWAP figure of merit −¼⟨f₀₀⟩ on the stretched vibrational basis, with n₀
/// dropped. `retarded` selects n₂(2η r̄) instead of its 1/r³ limit.
pub fn fom_sqrt_swap(eta: f64, retarded: bool) -> Result<SqrtSwapFom> {
    if !(eta > 0.0) || !eta.is_finite() {
        return Err(Error::Domain(format!("eta must be positive, got {eta}")));
    }
    let pot: Box<dyn RadialPotential> = if retarded { Box::new(Neumann2 { eta }) } else { Box::new(QuasiStatic { eta }) };
    // f₀₀ = −P₂ n₂ = −√(4π/5) Y₂⁰ n₂
    let c = -(4.0 * PI / 5.0).sqrt();
    let one = OscState { n: 0, l: 1, m: 1 };
    let z = OscState { n: 0, l: 1, m: 0 };
    let g = OscState::GROUND;
    let diag = c * external_tensor_element((one, one), (one, one), 0, pot.as_ref())?;
    let exch = c * external_tensor_element((g, z), (z, g), 0, pot.as_ref())?;
    let in_regime = eta <= REGIME_ETA;
    let mk = |v: f64| FomValue { value: v, method: Method::Analytic, includes_retardation: retarded, in_regime };
    let stretched = mk(-0.25 * diag);
    let z_oscillation = mk(-0.25 * exch);
    Ok(SqrtSwapFom { stretched, z_oscillation, improvement: z_oscillation.value / stretched.value })
}

/// Maximize |objective| over [lo, hi].
pub fn optimize_geometry<F: FnMut(f64) -> Result<f64>>(mut objective: F, lo: f64, hi: f64) -> Result<Maximum> {
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::Domain(format!("bounds [{lo}, {hi}] are not a finite interval")));
    }
    maximize(|x| objective(x).map(f64::abs), lo, hi, SearchConfig::default())
}

/// Aspect ratio z₀/x₀ maximizing |ℱ| η⊥³ of the common cylindrical well.
pub fn optimal_aspect_ratio(lo: f64, hi: f64) -> Result<Maximum> {
    optimize_geometry(|ratio| Ok(fom_ellipsoid_nearfield(1.0, ratio)?.value), lo, hi)
}

/// Well separation z̄ maximizing |ℱ| η³ for separated spheres.
pub fn optimal_well_separation(lo: f64, hi: f64) -> Result<Maximum> {
    optimize_geometry(|zbar| Ok(fom_separated_spheres(zbar, 1.0)?.value), lo, hi)
}
