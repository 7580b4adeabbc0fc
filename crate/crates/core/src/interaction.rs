//! Ground-manifold effective dipole-dipole Hamiltonian for two driven multilevel
//! atoms, and its matrix elements on products of internal and oscillator states.
//!
//! Energies are in units of ħγ. The weak-drive effective Hamiltonian is the
//! four-photon process in which one atom absorbs a laser photon and emits a virtual
//! photon q', the partner absorbs it as q and returns the photon to the laser:
//!
//! H = −(sγ/4) Σ_{qq'} T_{qq'}(r) [ (A₂·e_L*) A_{2q}† ⊗ A_{1q'} (A₁†·e_L) + (1 ↔ 2) ].
//!
//! For two-level atoms this gives s(V_c − iΓ_c/2) with V_c = −⟨f⟩/2, Γ_c = ⟨g⟩.

use std::collections::HashMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::angular::{clebsch_gordan, oscillator_strength_factor, AngMom, HyperfineContext};
use crate::dipole_tensor::{radial_functions, ScaledSeparation, tensor_cartesian, tensor_near_field};
use crate::error::{Error, Result};
use crate::oscillator_basis::{
    degenerate_subspace, external_multipole_element, FnPotential, Neumann2, OscState, QuasiStatic,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Manifold {
    Ground,
    Excited,
}

/// Hyperfine sublevel |F, M_F⟩ with both numbers doubled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct InternalState {
    pub twice_f: u32,
    pub twice_m: i32,
    pub manifold: Manifold,
}

impl InternalState {
    pub fn ground(twice_f: u32, twice_m: i32) -> Result<Self> {
        AngMom::new(twice_f, twice_m)?;
        Ok(Self { twice_f, twice_m, manifold: Manifold::Ground })
    }

    pub fn excited(twice_f: u32, twice_m: i32) -> Result<Self> {
        AngMom::new(twice_f, twice_m)?;
        Ok(Self { twice_f, twice_m, manifold: Manifold::Excited })
    }

    /// Stretched ground sublevel |F, M_F = F⟩.
    pub fn stretched(twice_f: u32) -> Self {
        Self { twice_f, twice_m: twice_f as i32, manifold: Manifold::Ground }
    }
}

/// Drive field. Energies in units of ħγ; polarization components e_q = e_q*·e_L,
/// indexed by q + 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriveParams {
    pub rabi: f64,
    pub detuning: f64,
    pub polarization: [Complex64; 3],
}

impl DriveParams {
    /// Pure spherical polarization e_L = e_q.
    pub fn spherical(rabi: f64, detuning: f64, q: i32) -> Result<Self> {
        if q.abs() > 1 {
            return Err(Error::Domain(format!("polarization index {q} out of range")));
        }
        let mut p = [Complex64::new(0.0, 0.0); 3];
        p[(q + 1) as usize] = Complex64::new(1.0, 0.0);
        Ok(Self { rabi, detuning, polarization: p })
    }

    pub fn component(&self, q: i32) -> Complex64 {
        self.polarization[(q + 1) as usize]
    }

    pub fn saturation(&self) -> f64 {
        saturation(self)
    }
}

/// s = (Ω²/2)/(Δ² + γ²/4) with γ = 1.
pub fn saturation(drive: &DriveParams) -> f64 {
    0.5 * drive.rabi * drive.rabi / (drive.detuning * drive.detuning + 0.25)
}

/// Dipole raising operator A_q† = Σ f_{F'F} ⟨F M; 1 q | F' M+q⟩ |F' M+q⟩⟨F M|.
#[derive(Debug, Clone, PartialEq)]
pub struct DipoleOperator {
    pub ground: Vec<InternalState>,
    pub excited: Vec<InternalState>,
    /// raise[q + 1] has shape (excited, ground).
    pub raise: [DMatrix<f64>; 3],
}

impl DipoleOperator {
    fn build(ctx: HyperfineContext, ground_levels: &[u32]) -> Result<Self> {
        let mut ground = Vec::new();
        for &tf in ground_levels {
            for tm in (-(tf as i32)..=(tf as i32)).step_by(2) {
                ground.push(InternalState::ground(tf, tm)?);
            }
        }
        let mut excited = Vec::new();
        for tf in ctx.excited_levels() {
            for tm in (-(tf as i32)..=(tf as i32)).step_by(2) {
                excited.push(InternalState::excited(tf, tm)?);
            }
        }
        let mut raise = [
            DMatrix::zeros(excited.len(), ground.len()),
            DMatrix::zeros(excited.len(), ground.len()),
            DMatrix::zeros(excited.len(), ground.len()),
        ];
        let mut strengths = HashMap::new();
        for (j, g) in ground.iter().enumerate() {
            for (i, e) in excited.iter().enumerate() {
                let dq2 = e.twice_m - g.twice_m;
                if dq2.abs() > 2 {
                    continue;
                }
                let q = dq2 / 2;
                let f = match strengths.get(&(e.twice_f, g.twice_f)) {
                    Some(v) => *v,
                    None => {
                        let v = oscillator_strength_factor(e.twice_f, g.twice_f, ctx)?;
                        strengths.insert((e.twice_f, g.twice_f), v);
                        v
                    }
                };
                let c = clebsch_gordan(
                    AngMom::new(g.twice_f, g.twice_m)?,
                    AngMom::new(2, dq2)?,
                    AngMom::new(e.twice_f, e.twice_m)?,
                );
                raise[(q + 1) as usize][(i, j)] = f * c;
            }
        }
        Ok(Self { ground, excited, raise })
    }

    /// All ground hyperfine levels of the context.
    pub fn full(ctx: HyperfineContext) -> Result<Self> {
        Self::build(ctx, &ctx.ground_levels())
    }

    pub fn ground_index(&self, s: &InternalState) -> Option<usize> {
        self.ground.iter().position(|g| g == s)
    }

    /// ⟨e| A_q† |g⟩ by state.
    pub fn element(&self, e: &InternalState, q: i32, g: &InternalState) -> f64 {
        match (self.excited.iter().position(|x| x == e), self.ground_index(g)) {
            (Some(i), Some(j)) if q.abs() <= 1 => self.raise[(q + 1) as usize][(i, j)],
            _ => 0.0,
        }
    }

    /// Column of (e_L · A†)|g⟩ amplitudes over excited states.
    fn laser_raise(&self, drive: &DriveParams, j: usize) -> Vec<Complex64> {
        (0..self.excited.len())
            .map(|i| (-1..=1).map(|q| drive.component(q) * self.raise[(q + 1) as usize][(i, j)]).sum())
            .collect()
    }

    /// ⟨g'| A_{q'} (A†·e_L) |g⟩: absorb from the laser, emit photon q'.
    fn absorb_laser_emit(&self, drive: &DriveParams, gp: usize, q_emit: i32, g: usize) -> Complex64 {
        let up = self.laser_raise(drive, g);
        let down = &self.raise[(q_emit + 1) as usize];
        (0..self.excited.len()).map(|i| up[i] * down[(i, gp)]).sum()
    }

    /// ⟨g'| (A·e_L*) A_q† |g⟩: absorb photon q, emit into the laser.
    fn absorb_emit_laser(&self, drive: &DriveParams, gp: usize, q_abs: i32, g: usize) -> Complex64 {
        let down = self.laser_raise(drive, gp);
        let up = &self.raise[(q_abs + 1) as usize];
        (0..self.excited.len()).map(|i| down[i].conj() * up[(i, g)]).sum()
    }
}

/// Raising operator restricted to one ground hyperfine level.
pub fn dipole_raising(ctx: HyperfineContext, twice_f_ground: u32) -> Result<DipoleOperator> {
    if !ctx.ground_levels().contains(&twice_f_ground) {
        return Err(Error::Domain(format!("2F = {twice_f_ground} is not a ground level")));
    }
    DipoleOperator::build(ctx, &[twice_f_ground])
}

/// Averaged interaction tensor ⟨T_qq'⟩, indexed [q + 1][q' + 1].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TensorAverage {
    pub t: [[Complex64; 3]; 3],
}

impl TensorAverage {
    pub fn zero() -> Self {
        Self { t: [[Complex64::new(0.0, 0.0); 3]; 3] }
    }

    /// Point separation, optionally in the quasi-static limit.
    pub fn point(sep: &ScaledSeparation, near_field: bool) -> Result<Self> {
        let tensor = if near_field { tensor_near_field(sep)? } else { tensor_cartesian(sep)? };
        let mut t = [[Complex64::new(0.0, 0.0); 3]; 3];
        for q in -1..=1 {
            for qp in -1..=1 {
                t[(q + 1) as usize][(qp + 1) as usize] = tensor.t(q, qp)?;
            }
        }
        Ok(Self { t })
    }

    pub fn get(&self, q: i32, qp: i32) -> Complex64 {
        self.t[(q + 1) as usize][(qp + 1) as usize]
    }
}

/// Regime limits for adiabatic elimination of the excited manifold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeLimits {
    pub max_saturation: f64,
}

impl Default for RegimeLimits {
    fn default() -> Self {
        Self { max_saturation: 0.1 }
    }
}

/// Effective operator on the two-atom ground manifold (product basis of
/// `dip.ground` ⊗ `dip.ground`, atom 1 major), in units of ħγ. Includes the
/// single-atom light shifts (s/2)(Δ − iγ/2) per atom.
pub fn ground_manifold_hdd(
    drive: &DriveParams,
    dip: &DipoleOperator,
    tensor: &TensorAverage,
    limits: RegimeLimits,
) -> Result<DMatrix<Complex64>> {
    let s = saturation(drive);
    if s > limits.max_saturation {
        return Err(Error::Regime(format!(
            "saturation {s:.3} exceeds the weak-drive limit {}",
            limits.max_saturation
        )));
    }
    let n = dip.ground.len();
    let mut h = DMatrix::<Complex64>::zeros(n * n, n * n);
    let light = Complex64::new(drive.detuning, -0.5) * (0.5 * s);
    // single-atom operator (A·e_L*)(A†·e_L)
    let mut single = DMatrix::<Complex64>::zeros(n, n);
    for gp in 0..n {
        let down = dip.laser_raise(drive, gp);
        for g in 0..n {
            let up = dip.laser_raise(drive, g);
            single[(gp, g)] = (0..dip.excited.len()).map(|i| down[i].conj() * up[i]).sum();
        }
    }
    // Cache atom-resolved factors: emit[q'][(g', g)], absorb[q][(g', g)].
    let mut emit = Vec::new();
    let mut absorb = Vec::new();
    for q in -1..=1 {
        emit.push(DMatrix::from_fn(n, n, |gp, g| dip.absorb_laser_emit(drive, gp, q, g)));
        absorb.push(DMatrix::from_fn(n, n, |gp, g| dip.absorb_emit_laser(drive, gp, q, g)));
    }
    let pref = -0.25 * s;
    for a1p in 0..n {
        for a2p in 0..n {
            for a1 in 0..n {
                for a2 in 0..n {
                    let mut v = Complex64::new(0.0, 0.0);
                    for q in 0..3 {
                        for qp in 0..3 {
                            let t = tensor.t[q][qp];
                            if t == Complex64::new(0.0, 0.0) {
                                continue;
                            }
                            // 1 emits q', 2 absorbs q; and the mirrored process.
                            v += t * (absorb[q][(a2p, a2)] * emit[qp][(a1p, a1)]
                                + absorb[q][(a1p, a1)] * emit[qp][(a2p, a2)]);
                        }
                    }
                    let mut e = pref * v;
                    if a2p == a2 {
                        e += light * single[(a1p, a1)];
                    }
                    if a1p == a1 {
                        e += light * single[(a2p, a2)];
                    }
                    h[(a1p * n + a2p, a1 * n + a2)] = e;
                }
            }
        }
    }
    Ok(h)
}

/// Internal ⊗ external product state of the two atoms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TwoAtomBasisState {
    pub internal: [InternalState; 2],
    pub external: [OscState; 2],
}

/// Options for external matrix elements in a common spherical well.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ElementOptions {
    /// Lamb-Dicke parameter k_L x₀ of the single-atom ground state.
    pub eta: f64,
    /// Use the quasi-static 1/r³ potential instead of the retarded n₂.
    pub near_field: bool,
    /// Keep the isotropic n₀ radiation term.
    pub keep_n0: bool,
    /// Add the cooperative decay part −iΓ/2 from g.
    pub include_decay: bool,
    /// Only couple states whose individual internal states are unchanged.
    pub preserve_internal: bool,
}

impl ElementOptions {
    pub fn new(eta: f64) -> Self {
        Self { eta, near_field: false, keep_n0: false, include_decay: false, preserve_internal: true }
    }
}

fn cg1(q: i32, qp: i32) -> Result<f64> {
    Ok(clebsch_gordan(AngMom::int(1, -q)?, AngMom::int(1, qp)?, AngMom::int(2, qp - q)?))
}

/// External factor of T_qq' between oscillator pairs:
/// ⟨ext'| f_qq' + i g_qq' |ext⟩ with f, g in their multipole form.
fn external_t(
    bra: (OscState, OscState),
    ket: (OscState, OscState),
    q: i32,
    qp: i32,
    opts: &ElementOptions,
    cache: &mut HashMap<(OscState, OscState, OscState, OscState, i32, i32), Complex64>,
) -> Result<Complex64> {
    let key = (bra.0, bra.1, ket.0, ket.1, q, qp);
    if let Some(v) = cache.get(&key) {
        return Ok(*v);
    }
    let eta = opts.eta;
    let sign = if q.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    let coupling = sign * (6.0 * std::f64::consts::PI / 5.0).sqrt() * cg1(q, qp)?;
    let four_pi_sqrt = (4.0 * std::f64::consts::PI).sqrt();
    let mut v = Complex64::new(0.0, 0.0);
    if coupling != 0.0 {
        let n2 = if opts.near_field {
            external_multipole_element(bra, ket, 2, qp - q, &QuasiStatic { eta })?
        } else {
            external_multipole_element(bra, ket, 2, qp - q, &Neumann2 { eta })?
        };
        v -= coupling * n2;
        if opts.include_decay && !opts.near_field {
            let j2 = FnPotential { f: |r: f64| crate::dipole_tensor::j2(2.0 * eta * r), origin_power: 2 };
            v += Complex64::i() * coupling * external_multipole_element(bra, ket, 2, qp - q, &j2)?;
        }
    }
    if q == qp {
        // Isotropic parts: Y_0^0 = 1/√(4π).
        if opts.keep_n0 && !opts.near_field {
            let n0 = FnPotential {
                f: |r: f64| radial_functions(0, 2.0 * eta * r).map(|x| x.1).unwrap_or(0.0),
                origin_power: -1,
            };
            v -= four_pi_sqrt * external_multipole_element(bra, ket, 0, 0, &n0)?;
        }
        if opts.include_decay {
            let j0 = FnPotential {
                f: |r: f64| {
                    let x = 2.0 * eta * r;
                    if opts.near_field || x == 0.0 {
                        1.0
                    } else {
                        x.sin() / x
                    }
                },
                origin_power: 0,
            };
            v += Complex64::i() * four_pi_sqrt * external_multipole_element(bra, ket, 0, 0, &j0)?;
        }
    }
    cache.insert(key, v);
    Ok(v)
}

type ExternalCache = HashMap<(OscState, OscState, OscState, OscState, i32, i32), Complex64>;

fn element_with_cache(
    bra: &TwoAtomBasisState,
    ket: &TwoAtomBasisState,
    drive: &DriveParams,
    dip: &DipoleOperator,
    opts: &ElementOptions,
    cache: &mut ExternalCache,
) -> Result<Complex64> {
    let idx = |s: &InternalState| {
        dip.ground_index(s)
            .ok_or_else(|| Error::Input(format!("internal state 2F={} 2M={} not in the ground manifold", s.twice_f, s.twice_m)))
    };
    let (b1, b2, k1, k2) = (idx(&bra.internal[0])?, idx(&bra.internal[1])?, idx(&ket.internal[0])?, idx(&ket.internal[1])?);
    if opts.preserve_internal && (b1 != k1 || b2 != k2) {
        return Ok(Complex64::new(0.0, 0.0));
    }
    // Projection bookkeeping: internal change q − q' balanced by m_r = q' − q.
    let dm_int = bra.internal[0].twice_m + bra.internal[1].twice_m - ket.internal[0].twice_m - ket.internal[1].twice_m;
    let dm_ext = 2 * (bra.external[0].m + bra.external[1].m - ket.external[0].m - ket.external[1].m);
    if dm_int + dm_ext != 0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let ext_b = (bra.external[0], bra.external[1]);
    let ext_k = (ket.external[0], ket.external[1]);
    let mut sum = Complex64::new(0.0, 0.0);
    for q in -1..=1 {
        for qp in -1..=1 {
            let internal = dip.absorb_emit_laser(drive, b2, q, k2) * dip.absorb_laser_emit(drive, b1, qp, k1)
                + dip.absorb_emit_laser(drive, b1, q, k1) * dip.absorb_laser_emit(drive, b2, qp, k2);
            if internal.norm() == 0.0 {
                continue;
            }
            sum += internal * external_t(ext_b, ext_k, q, qp, opts, cache)?;
        }
    }
    Ok(-0.25 * sum)
}

/// ⟨bra| H_dd |ket⟩ in units of s·ħγ for atoms in a common spherical well.
pub fn two_atom_element(
    bra: &TwoAtomBasisState,
    ket: &TwoAtomBasisState,
    drive: &DriveParams,
    ctx: HyperfineContext,
    opts: &ElementOptions,
) -> Result<Complex64> {
    let dip = DipoleOperator::full(ctx)?;
    element_with_cache(bra, ket, drive, &dip, opts, &mut HashMap::new())
}

/// Interaction matrix on a chosen basis, extended by the degenerate states it couples to.
#[derive(Debug, Clone, PartialEq)]
pub struct InteractionMatrix {
    /// The requested basis followed by the leakage states.
    pub states: Vec<TwoAtomBasisState>,
    pub n_basis: usize,
    /// Full matrix in units of s·ħγ.
    pub matrix: DMatrix<Complex64>,
}

impl InteractionMatrix {
    pub fn basis_block(&self) -> DMatrix<Complex64> {
        self.matrix.view((0, 0), (self.n_basis, self.n_basis)).into_owned()
    }

    pub fn leakage_states(&self) -> &[TwoAtomBasisState] {
        &self.states[self.n_basis..]
    }
}

/// Build V_dd on `basis` plus every degenerate product state (same internal
/// states as some basis member) reachable through non-zero couplings.
pub fn build_interaction_matrix(
    basis: &[TwoAtomBasisState],
    drive: &DriveParams,
    ctx: HyperfineContext,
    opts: &ElementOptions,
) -> Result<InteractionMatrix> {
    for (i, a) in basis.iter().enumerate() {
        if basis[..i].contains(a) {
            return Err(Error::Input(format!("basis state {i} is repeated; basis must be orthogonal")));
        }
    }
    let dip = DipoleOperator::full(ctx)?;
    let mut cache = ExternalCache::new();
    let mut states: Vec<TwoAtomBasisState> = basis.to_vec();
    let mut internals: Vec<[InternalState; 2]> = Vec::new();
    for s in basis {
        if !internals.contains(&s.internal) {
            internals.push(s.internal);
        }
    }
    // Breadth-first closure within the degenerate shells.
    let mut frontier = 0;
    while frontier < states.len() {
        let s = states[frontier];
        frontier += 1;
        let q = s.external[0].quanta() + s.external[1].quanta();
        for internal in &internals {
            for (e1, e2) in degenerate_subspace(q, None) {
                let cand = TwoAtomBasisState { internal: *internal, external: [e1, e2] };
                if states.contains(&cand) {
                    continue;
                }
                let v = element_with_cache(&cand, &s, drive, &dip, opts, &mut cache)?;
                if v.norm() > 1e-12 * opts.eta.powi(-3) {
                    states.push(cand);
                }
            }
        }
    }
    let n = states.len();
    let mut m = DMatrix::<Complex64>::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = element_with_cache(&states[i], &states[j], drive, &dip, opts, &mut cache)?;
        }
    }
    Ok(InteractionMatrix { states, n_basis: basis.len(), matrix: m })
}

/// Logical basis {|00⟩, |01⟩, |10⟩, |11⟩} (control ⊗ target) with |0⟩ = |000⟩ and
/// |1⟩ = |011⟩, both atoms in the same internal state.
pub fn stretched_logical_basis(internal: InternalState) -> [TwoAtomBasisState; 4] {
    let zero = OscState::GROUND;
    let one = OscState { n: 0, l: 1, m: 1 };
    let mk = |a, b| TwoAtomBasisState { internal: [internal, internal], external: [a, b] };
    [mk(zero, zero), mk(zero, one), mk(one, zero), mk(one, one)]
}
