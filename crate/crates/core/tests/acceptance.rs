//! Acceptance checks, one line per criterion.

mod common;

use common::{random_state, GaussPower, Oracle};
use dipolatt::angular::HyperfineContext;
use dipolatt::dipole_tensor::{tensor_cartesian, tensor_near_field, ScaledSeparation};
use dipolatt::ensemble_protocol::{run_ensemble, EnsembleConfig, ErrorModel};
use dipolatt::fidelity_budget::{optimize_detuning, LatticeParams, DETUNING_SEARCH};
use dipolatt::figures_of_merit::{
    fom_ellipsoid_nearfield, fom_nearfield, fom_separated_spheres, fom_sqrt_swap, optimal_aspect_ratio,
    optimal_well_separation, tensor_means, FomOptions, TrapGeometry,
};
use dipolatt::gate_sim::{fom_from_ground_energy, ground_energy_perturbative, sqrt_swap, TwoLevelParams};
use dipolatt::interaction::{
    build_interaction_matrix, stretched_logical_basis, two_atom_element, DriveParams, ElementOptions, InternalState,
    TwoAtomBasisState,
};
use dipolatt::oscillator_basis::{
    degenerate_subspace, external_tensor_element, moshinsky_bracket, talmi_integral, Constant, FnPotential, OscState,
    Power,
};
use nalgebra::{DMatrix, Matrix3};
use num_complex::Complex64;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::FRAC_1_SQRT_2;
use std::process::ExitCode;
use std::time::Instant;

type Check = Result<String, String>;

fn within(name: &str, got: f64, want: f64, rel: f64) -> Check {
    let err = (got / want - 1.0).abs();
    if err <= rel {
        Ok(format!("{name} = {got:.6} (target {want}, rel err {err:.2e})"))
    } else {
        Err(format!("{name} = {got:.6}, target {want} ± {rel}"))
    }
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e(err: dipolatt::Error) -> String {
    err.to_string()
}

fn ellipsoid_optimum() -> Check {
    let m = optimal_aspect_ratio(1.0, 5.0).map_err(e)?;
    let a = within("z0/x0", m.argmax, 2.18, 0.02)?;
    let b = within("peak |F| eta_perp^3", m.value, 8.5e-3, 0.05)?;
    Ok(format!("{a}; {b}"))
}

fn lamb_dicke_ellipsoid() -> Check {
    within("F", fom_ellipsoid_nearfield(0.05, 0.1).map_err(e)?.value, -68.0, 0.05)
}

fn separated_spheres() -> Check {
    let m = optimal_well_separation(0.5, 6.0).map_err(e)?;
    let a = within("argmax zbar", m.argmax, 2.5, 0.02)?;
    let b = within("|F| eta^3", m.value, 0.015, 0.05)?;
    let c = within("F(eta = 0.05)", fom_separated_spheres(2.5, 0.05).map_err(e)?.value, -123.0, 0.05)?;
    let start = Instant::now();
    let sweep: Vec<f64> = (0..200)
        .map(|i| fom_separated_spheres(0.1 + 5.9 * i as f64 / 199.0, 0.05).map(|v| v.value))
        .collect::<Result<_, _>>()
        .map_err(e)?;
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 5.0, || format!("200-point sweep took {secs:.2} s"))?;
    ensure(sweep.iter().all(|v| v.is_finite()), || "non-finite sweep value".into())?;
    Ok(format!("{a}; {b}; {c}"))
}

fn sqrt_swap_fom() -> Check {
    let eta = 0.05;
    let near = fom_sqrt_swap(eta, false).map_err(e)?;
    let ret = fom_sqrt_swap(eta, true).map_err(e)?;
    let a = within("coefficient", near.stretched.value.abs() * eta.powi(3), 4.02e-3, 0.05)?;
    let b = within("|F| at eta = 0.05", ret.stretched.value.abs(), 32.0, 0.05)?;
    let c = within("z-oscillation improvement", ret.improvement, 3.5, 0.10)?;
    Ok(format!("{a}; {b}; {c}"))
}

fn matrix_patterns() -> Check {
    let ctx = HyperfineContext::d2(7);
    let drive = DriveParams::spherical(0.1, 100.0, 1).map_err(e)?;
    let opts = ElementOptions { near_field: true, ..ElementOptions::new(0.05) };
    let basis = stretched_logical_basis(InternalState::stretched(8));
    let im = build_interaction_matrix(&basis, &drive, ctx, &opts).map_err(e)?;
    let m = &im.matrix;
    let kappa = m[(3, 3)].re;
    ensure(kappa != 0.0, || "kappa vanishes".into())?;
    let leak: Vec<usize> = (4..im.states.len()).collect();
    ensure(leak.len() == 2, || format!("{} leakage states, expected 2", leak.len()))?;
    let d = OscState { n: 0, l: 2, m: 2 };
    let g = OscState::GROUND;
    let pos = |ext: [OscState; 2]| im.states.iter().position(|s| s.external == ext);
    let (a, b) = (pos([d, g]).ok_or("no |022,000>")?, pos([g, d]).ok_or("no |000,022>")?);
    let r = 7.0 / 4.0;
    let mut want = DMatrix::<f64>::zeros(6, 6);
    want[(1, 1)] = r;
    want[(2, 2)] = r;
    want[(1, 2)] = -r;
    want[(2, 1)] = -r;
    want[(3, 3)] = 4.0 / 7.0 * r;
    let order = [0, 1, 2, 3, a, b];
    for &x in &[4, 5] {
        want[(x, 3)] = -FRAC_1_SQRT_2;
        want[(3, x)] = -FRAC_1_SQRT_2;
        want[(x, x)] = 9.0 / 4.0;
    }
    want[(4, 5)] = -5.0 / 4.0;
    want[(5, 4)] = -5.0 / 4.0;
    let mut worst: f64 = 0.0;
    for i in 0..6 {
        for j in 0..6 {
            let got = m[(order[i], order[j])] / kappa;
            worst = worst.max((got - want[(i, j)]).norm() / want[(i, j)].abs().max(1.0));
        }
    }
    ensure(worst < 1e-8, || format!("pattern mismatch {worst:.2e}"))?;
    Ok(format!("kappa = {kappa:.4} s gamma, worst relative deviation {worst:.1e}"))
}

fn sqrt_swap_suite() -> Check {
    let ctx = HyperfineContext::d2(7);
    let mut notes = Vec::new();
    for q in [1, 0] {
        let drive = DriveParams::spherical(0.1, 100.0, q).map_err(e)?;
        let r = sqrt_swap(0.05, &drive, ctx, false).map_err(e)?;
        let u = &r.gate.unitary;
        let unit = (u * u.adjoint() - DMatrix::<Complex64>::identity(4, 4)).norm();
        ensure(unit < 1e-10, || format!("q={q}: unitarity error {unit:.2e}"))?;
        ensure(r.gate.leakage < 1e-10, || format!("q={q}: leakage {:.2e}", r.gate.leakage))?;
        let b = u.view((1, 1), (2, 2)).into_owned();
        let b2 = &b * &b;
        let diag = b2[(0, 0)].norm().max(b2[(1, 1)].norm());
        let off = (b2[(0, 1)].norm() - 1.0).abs().max((b2[(1, 0)].norm() - 1.0).abs());
        let outer = (u[(0, 0)].norm() - 1.0).abs().max((u[(3, 3)].norm() - 1.0).abs());
        ensure(diag < 1e-10 && off < 1e-10 && outer < 1e-10, || {
            format!("q={q}: U^2 is not SWAP up to phases ({diag:.1e}, {off:.1e}, {outer:.1e})")
        })?;
        notes.push(format!("q={q} unitarity {unit:.0e} leakage {:.0e}", r.gate.leakage));
    }
    Ok(notes.join("; "))
}

fn cesium_budget() -> Check {
    let o = optimize_detuning(&LatticeParams::cesium(6e3), DETUNING_SEARCH.0, DETUNING_SEARCH.1).map_err(e)?;
    ensure((4e3..=9e3).contains(&o.detuning), || format!("optimal detuning {:.1} outside [4e3, 9e3]", o.detuning))?;
    let f = within("fidelity", o.fidelity, 0.92, 0.02 / 0.92)?;
    Ok(format!("{f}; detuning {:.1} gamma", o.detuning))
}

fn oracle_equivalence() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut checked = 0;
    let mut worst: f64 = 0.0;
    let mut tries = 0;
    while checked < 21 {
        tries += 1;
        ensure(tries < 1000, || "could not draw enough non-trivial cases".into())?;
        let q = rng.random_range(1..=3u32);
        let q1 = rng.random_range(0..=q);
        let ket = (random_state(&mut rng, q1), random_state(&mut rng, q - q1));
        let m_r = rng.random_range(-2..=2i32);
        let bras = degenerate_subspace(q, Some(ket.0.m + ket.1.m + m_r));
        if bras.is_empty() {
            continue;
        }
        let bra = bras[rng.random_range(0..bras.len())];
        let (oracle, value) = match checked % 3 {
            0 => (Oracle { p: -3, beta: 0.0, shift: 1 }, external_tensor_element(bra, ket, m_r, &Power(-3))),
            1 => (Oracle { p: 2, beta: 0.0, shift: 0 }, external_tensor_element(bra, ket, m_r, &Power(2))),
            _ => (
                Oracle { p: -1, beta: 0.7, shift: 0 },
                external_tensor_element(bra, ket, m_r, &GaussPower { p: -1, beta: 0.7 }),
            ),
        };
        let value = value.map_err(e)?;
        if value.abs() < 1e-8 {
            continue;
        }
        let want = oracle.element(bra, ket, m_r).re;
        worst = worst.max((value - want).abs() / want.abs());
        checked += 1;
    }
    ensure(worst < 1e-6, || format!("Moshinsky vs quadrature relative error {worst:.2e}"))?;

    let mut unit: f64 = 0.0;
    for q in 0..=6u32 {
        let mut states = Vec::new();
        for qa in 0..=q {
            for na in 0..=qa / 2 {
                for nb in 0..=(q - qa) / 2 {
                    states.push((na, qa - 2 * na, nb, q - qa - 2 * nb));
                }
            }
        }
        for lam in 0..=q {
            let c: Vec<_> = states.iter().filter(|s| lam >= s.1.abs_diff(s.3) && lam <= s.1 + s.3).collect();
            for a in &c {
                for b in &c {
                    let s: f64 = c
                        .iter()
                        .map(|k| {
                            moshinsky_bracket(k.0, k.1, k.2, k.3, a.0, a.1, a.2, a.3, lam)
                                * moshinsky_bracket(k.0, k.1, k.2, k.3, b.0, b.1, b.2, b.3, lam)
                        })
                        .sum();
                    unit = unit.max((s - if a == b { 1.0 } else { 0.0 }).abs());
                }
            }
        }
    }
    ensure(unit < 1e-10, || format!("bracket unitarity error {unit:.2e}"))?;

    let mut talmi: f64 = 0.0;
    for p in 0..=8 {
        talmi = talmi.max((talmi_integral(p as f64, &Constant(1.0)).map_err(e)? - 1.0).abs());
        let numeric = FnPotential { f: |_| 1.0, origin_power: 0 };
        talmi = talmi.max((talmi_integral(p as f64, &numeric).map_err(e)? - 1.0).abs());
    }
    ensure(talmi < 1e-12, || format!("Talmi I_p(1) error {talmi:.2e}"))?;
    Ok(format!("{checked} oracle cases worst {worst:.1e}; unitarity {unit:.1e}; Talmi {talmi:.1e}"))
}

fn selection_rules() -> Check {
    let ctx = HyperfineContext::d2(7);
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let opts = ElementOptions { near_field: true, preserve_internal: false, ..ElementOptions::new(0.1) };
    let mut violations = 0;
    let mut nonzero = 0;
    for _ in 0..10_000 {
        let q = rng.random_range(-1..=1i32);
        let drive = DriveParams::spherical(1.0, 50.0, q).map_err(e)?;
        let mut internal = || {
            let twice_f = if rng.random_bool(0.5) { 6 } else { 8 };
            let twice_m = 2 * rng.random_range(0..=twice_f as i32) - twice_f as i32;
            InternalState::ground(twice_f, twice_m)
        };
        let ints = [internal().map_err(e)?, internal().map_err(e)?, internal().map_err(e)?, internal().map_err(e)?];
        let total = rng.random_range(0..=2u32);
        let sub = degenerate_subspace(total, None);
        let (a, b) = (sub[rng.random_range(0..sub.len())], sub[rng.random_range(0..sub.len())]);
        let bra = TwoAtomBasisState { internal: [ints[0], ints[1]], external: [a.0, a.1] };
        let ket = TwoAtomBasisState { internal: [ints[2], ints[3]], external: [b.0, b.1] };
        let v = two_atom_element(&bra, &ket, &drive, ctx, &opts).map_err(e)?;
        let dm_int = ints[0].twice_m + ints[1].twice_m - ints[2].twice_m - ints[3].twice_m;
        let dm_ext = 2 * (a.0.m + a.1.m - b.0.m - b.1.m);
        // photon deficit |ΔM_F| ≤ 2 and its balance against rotation
        let allowed = dm_int + dm_ext == 0 && dm_int.abs() <= 4;
        if !allowed && v.norm() != 0.0 {
            violations += 1;
        }
        if v.norm() != 0.0 {
            nonzero += 1;
        }
    }
    ensure(violations == 0, || format!("{violations} elements violate the selection rules"))?;
    ensure(nonzero > 100, || format!("only {nonzero} non-zero elements drawn"))?;

    let mut worst_f: f64 = 0.0;
    let mut worst_g: f64 = 0.0;
    for (t, p) in [(0.3, 0.1), (1.2, -2.0), (2.8, 0.9)] {
        let sep = ScaledSeparation::from_spherical(1e-3, t, p);
        let full = tensor_cartesian(&sep).map_err(e)?;
        let near = tensor_near_field(&sep).map_err(e)?;
        worst_f = worst_f.max((full.f - near.f).abs().max() / near.f.abs().max());
        worst_g = worst_g.max((full.g - Matrix3::identity()).abs().max());
    }
    ensure(worst_f < 1e-5 && worst_g < 1e-6, || format!("near-field limits off: f {worst_f:.1e}, g {worst_g:.1e}"))?;

    let common = fom_nearfield(TrapGeometry::CommonSphere { eta: 0.05 }, 0).map_err(e)?.value;
    ensure(common.abs() < 1e-12, || format!("common sphere F = {common}"))?;

    let geometry = TrapGeometry::SeparatedSpheres { eta: 0.05, zbar: 2.5 };
    let (f, g) = tensor_means(geometry, 0, &FomOptions::default()).map_err(e)?;
    let mut spread: f64 = 0.0;
    let mut reference = None;
    for k in 0..=20 {
        let det = 10f64.powf(2.0 + 2.0 * k as f64 / 20.0);
        let p = TwoLevelParams::from_tensor_means(1.0, det, f, g);
        let en = ground_energy_perturbative(&p).map_err(e)?;
        let fom = fom_from_ground_energy(en.energy, p.rabi, p.detuning, p.gamma).map_err(e)?;
        let r = *reference.get_or_insert(fom);
        spread = spread.max((fom / r - 1.0).abs());
    }
    ensure(spread < 1e-6, || format!("FOM varies by {spread:.1e} across detuning"))?;
    Ok(format!("{nonzero} non-zero of 10^4, no violations; FOM detuning spread {spread:.1e}"))
}

fn ensemble_estimator() -> Check {
    let cfg = EnsembleConfig {
        n_sites: 100_000,
        fill_probability: 1.0,
        seed: 314,
        model: ErrorModel::ideal_split(0.92),
        pre_cycles: 0,
        replicas: 1,
    };
    let run = run_ensemble(&cfg).map_err(e)?;
    ensure(run.initial_pairs == 100_000, || format!("{} initial pairs", run.initial_pairs))?;
    let (lo, hi) = run.estimate.interval(3.0);
    ensure(lo <= 0.92 && 0.92 <= hi, || format!("0.92 outside [{lo:.5}, {hi:.5}]"))?;
    let again = run_ensemble(&cfg).map_err(e)?;
    ensure(again == run, || "seeded rerun differs".into())?;
    Ok(format!("F = {:.5} ± {:.5}, reproducible", run.estimate.value, run.estimate.std_error))
}

fn main() -> ExitCode {
    let criteria: [(&str, f64, fn() -> Check); 10] = [
        ("ellipsoid aspect-ratio optimum", 1.0, ellipsoid_optimum),
        ("Lamb-Dicke ellipsoid value", 1.0, lamb_dicke_ellipsoid),
        ("separated-sphere optimum and sweep", 5.0, separated_spheres),
        ("sqrt-swap figure of merit", 10.0, sqrt_swap_fom),
        ("stretched-basis interaction matrix", 10.0, matrix_patterns),
        ("sqrt-swap gate properties", 1.0, sqrt_swap_suite),
        ("cesium fidelity budget", 1.0, cesium_budget),
        ("oracle equivalence", 60.0, oracle_equivalence),
        ("selection rules and limits", 30.0, selection_rules),
        ("ensemble fidelity estimator", 10.0, ensemble_estimator),
    ];
    let mut failed = 0;
    for (i, (name, budget, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let secs = start.elapsed().as_secs_f64();
        let result = result.and_then(|msg| {
            if secs < *budget {
                Ok(msg)
            } else {
                Err(format!("took {secs:.2} s, budget {budget} s"))
            }
        });
        match result {
            Ok(msg) => println!("criterion {:>2} PASS  {name} ({secs:.2} s): {msg}", i + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name} ({secs:.2} s): {msg}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
