//! Retarded dipole-dipole interaction tensor T = f + i g between two atoms at
//! scaled separation x = k_L r.
//!
//! Spherical components use the basis e_{+1} = −(x̂ + iŷ)/√2, e_0 = ẑ,
//! e_{−1} = (x̂ − iŷ)/√2 with T_{qq'} = e_q* · T · e_{q'}.

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;

use crate::angular::{clebsch_gordan, spherical_harmonic, AngMom};
use crate::error::{Error, Result};

/// Separation vector in units of 1/k_L.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledSeparation {
    pub x: Vector3<f64>,
}

impl ScaledSeparation {
    pub fn new(x: [f64; 3]) -> Self {
        Self { x: Vector3::from(x) }
    }

    pub fn from_spherical(r: f64, theta: f64, phi: f64) -> Self {
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        Self::new([r * st * cp, r * st * sp, r * ct])
    }

    pub fn r_mag(&self) -> f64 {
        self.x.norm()
    }

    pub fn r_hat(&self) -> Result<Vector3<f64>> {
        let r = self.r_mag();
        if r == 0.0 || !r.is_finite() {
            return Err(Error::Singularity);
        }
        Ok(self.x / r)
    }

    /// (θ, φ) of the separation direction.
    pub fn angles(&self) -> (f64, f64) {
        let r = self.r_mag();
        let theta = if r > 0.0 { (self.x.z / r).clamp(-1.0, 1.0).acos() } else { 0.0 };
        (theta, self.x.y.atan2(self.x.x))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InteractionTensor {
    pub f: Matrix3<f64>,
    pub g: Matrix3<f64>,
}

/// Spherical basis vector e_q.
pub fn spherical_unit(q: i32) -> Result<Vector3<Complex64>> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let c = |re: f64, im: f64| Complex64::new(re, im);
    match q {
        1 => Ok(Vector3::new(c(-s, 0.0), c(0.0, -s), c(0.0, 0.0))),
        0 => Ok(Vector3::new(c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0))),
        -1 => Ok(Vector3::new(c(s, 0.0), c(0.0, -s), c(0.0, 0.0))),
        _ => Err(Error::Domain(format!("spherical index {q} not in {{-1, 0, 1}}"))),
    }
}

impl InteractionTensor {
    /// e_q* · M · e_q' for the real Cartesian matrix M.
    fn project(m: &Matrix3<f64>, q: i32, qp: i32) -> Result<Complex64> {
        let a = spherical_unit(q)?;
        let b = spherical_unit(qp)?;
        let mc = m.map(|v| Complex64::new(v, 0.0));
        Ok(a.map(|z| z.conj()).dot(&(mc * b)))
    }

    /// (f_qq', g_qq') by projecting the Cartesian tensors.
    pub fn spherical(&self, q: i32, qp: i32) -> Result<(Complex64, Complex64)> {
        Ok((Self::project(&self.f, q, qp)?, Self::project(&self.g, q, qp)?))
    }

    /// Complex T_qq' = f_qq' + i g_qq'.
    pub fn t(&self, q: i32, qp: i32) -> Result<Complex64> {
        let (f, g) = self.spherical(q, qp)?;
        Ok(f + Complex64::i() * g)
    }
}

/// Spherical Bessel and Neumann functions of order m ∈ {0, 2}: (j_m, n_m).
pub fn radial_functions(m: u32, x: f64) -> Result<(f64, f64)> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("radial argument must be positive, got {x}")));
    }
    let (s, c) = x.sin_cos();
    match m {
        0 => Ok((j0(x), -c / x)),
        2 => {
            let x2 = x * x;
            let n2 = (-3.0 / (x2 * x) + 1.0 / x) * c - 3.0 * s / x2;
            Ok((j2(x), n2))
        }
        _ => Err(Error::Domain(format!("order {m} not supported (only 0 and 2)"))),
    }
}

fn j0(x: f64) -> f64 {
    if x < 1e-4 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// j_2 with a power series below x = 0.5 where the closed form cancels.
pub(crate) fn j2(x: f64) -> f64 {
    if x < 0.5 {
        // x²/15 Σ_k (−x²/2)^k / (k! · 7·9···(2k+5))
        let y = -0.5 * x * x;
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..20 {
            term *= y / (k as f64 * (2 * k + 5) as f64);
            sum += term;
            if term.abs() < 1e-18 * sum.abs() {
                break;
            }
        }
        x * x / 15.0 * sum
    } else {
        let (s, c) = x.sin_cos();
        (3.0 / (x * x * x) - 1.0 / x) * s - 3.0 * c / (x * x)
    }
}

fn outer(r: &Vector3<f64>) -> Matrix3<f64> {
    r * r.transpose()
}

/// Cartesian f and g at separation `sep`.
pub fn tensor_cartesian(sep: &ScaledSeparation) -> Result<InteractionTensor> {
    let r = sep.r_hat()?;
    let x = sep.r_mag();
    let rr = outer(&r);
    let id = Matrix3::identity();
    let trans = id - rr;
    let long = id - 3.0 * rr;
    let (s, c) = x.sin_cos();
    let f = 1.5 * (trans * (c / x) - long * (s / (x * x) + c / (x * x * x)));
    // The sin/x² − ... combination cancels at small x; use the radial functions there.
    let g = if x < 0.5 {
        let j2 = j2(x);
        id * j0(x) + (rr - id / 3.0) * (1.5 * j2)
    } else {
        1.5 * (trans * (s / x) + long * (c / (x * x) - s / (x * x * x)))
    };
    Ok(InteractionTensor { f, g })
}

/// Quasi-static (near-field) limit: f = −(3/2)(1 − 3 r̂r̂)/x³, g = 1.
pub fn tensor_near_field(sep: &ScaledSeparation) -> Result<InteractionTensor> {
    let r = sep.r_hat()?;
    let x = sep.r_mag();
    let f = -1.5 * (Matrix3::identity() - 3.0 * outer(&r)) / (x * x * x);
    Ok(InteractionTensor { f, g: Matrix3::identity() })
}

/// Spherical components (f_qq', g_qq') from the multipole form
/// f_qq' = −n_0 δ − (−1)^q √(6π/5) ⟨1 −q; 1 q' | 2 q'−q⟩ Y_2^{q'−q}(r̂) n_2,
/// g_qq' =  j_0 δ + (−1)^q √(6π/5) ⟨1 −q; 1 q' | 2 q'−q⟩ Y_2^{q'−q}(r̂) j_2.
pub fn tensor_spherical(q: i32, qp: i32, sep: &ScaledSeparation) -> Result<(Complex64, Complex64)> {
    if q.abs() > 1 || qp.abs() > 1 {
        return Err(Error::Domain(format!("spherical indices ({q}, {qp}) out of range")));
    }
    let x = sep.r_mag();
    if x == 0.0 {
        return Err(Error::Singularity);
    }
    let (j0, n0) = radial_functions(0, x)?;
    let (j2, n2) = radial_functions(2, x)?;
    let (theta, phi) = sep.angles();
    let c = quadrupole_coupling(q, qp, theta, phi)?;
    let d = if q == qp { 1.0 } else { 0.0 };
    let f = -n0 * d - c * n2;
    let g = j0 * d + c * j2;
    Ok((f, g))
}

/// (−1)^q √(6π/5) ⟨1 −q; 1 q' | 2 q'−q⟩ Y_2^{q'−q}(θ, φ).
pub fn quadrupole_coupling(q: i32, qp: i32, theta: f64, phi: f64) -> Result<Complex64> {
    let mr = qp - q;
    let cg = clebsch_gordan(AngMom::int(1, -q)?, AngMom::int(1, qp)?, AngMom::int(2, mr)?);
    let y = spherical_harmonic(2, mr, theta, phi)?;
    let sign = if q.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    Ok(sign * (6.0 * std::f64::consts::PI / 5.0).sqrt() * cg * y)
}

/// √(6π/5) ⟨1 −q; 1 q | 2 0⟩ (−1)^q Y_2^0 expressed through P_2: returns the
/// coefficient a_q with f_qq = −n_0 − a_q P_2(cos θ) n_2.
pub fn diagonal_p2_coefficient(q: i32) -> Result<f64> {
    match q {
        0 => Ok(1.0),
        1 | -1 => Ok(-0.5),
        _ => Err(Error::Domain(format!("spherical index {q} out of range"))),
    }
}
