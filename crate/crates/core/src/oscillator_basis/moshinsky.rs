//! Moshinsky brackets for equal masses with r = (r₁ − r₂)/√2, R = (r₁ + r₂)/√2.
//!
//! Each product state is written in the Cartesian basis, every Cartesian axis is
//! rotated by 45° into centre-of-mass and relative quanta exactly, and the result is
//! projected back onto spherical states.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use num_complex::Complex64;

use super::cartesian::spherical_to_cartesian;
use super::OscState;
use crate::angular::{clebsch_gordan, AngMom};

fn fact(n: u32) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

fn binom(n: u32, k: u32) -> f64 {
    fact(n) / (fact(k) * fact(n - k))
}

/// |n₁⟩|n₂⟩ along one axis → Σ c |N⟩_cm |n⟩_rel, returned as (N, n, c).
fn axis_rotation(n1: u32, n2: u32) -> Vec<(u32, u32, f64)> {
    let mut acc: HashMap<(u32, u32), f64> = HashMap::new();
    let pref = 2f64.powf(-0.5 * (n1 + n2) as f64) / (fact(n1) * fact(n2)).sqrt();
    for i in 0..=n1 {
        for j in 0..=n2 {
            let rel = i + j;
            let cm = n1 + n2 - rel;
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            let c = sign * binom(n1, i) * binom(n2, j) * (fact(cm) * fact(rel)).sqrt() * pref;
            *acc.entry((cm, rel)).or_default() += c;
        }
    }
    acc.into_iter().map(|((a, b), c)| (a, b, c)).collect()
}

fn shell_states(q: u32) -> Vec<OscState> {
    let mut v = Vec::new();
    for n in 0..=q / 2 {
        let l = q - 2 * n;
        for m in -(l as i32)..=(l as i32) {
            v.push(OscState { n, l, m });
        }
    }
    v
}

/// Relative and centre-of-mass components of a product state.
pub type Uncoupled = Vec<(OscState, OscState, f64)>;

/// ⟨rel, cm | s₁, s₂⟩ for all non-zero (rel, cm).
pub fn uncoupled_expansion(s1: OscState, s2: OscState) -> Arc<Uncoupled> {
    type Key = (OscState, OscState);
    static CACHE: OnceLock<RwLock<HashMap<Key, Arc<Uncoupled>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| RwLock::new(HashMap::new()));
    if let Some(v) = cache.read().unwrap().get(&(s1, s2)) {
        return v.clone();
    }

    let c1 = spherical_to_cartesian(s1.n, s1.l, s1.m);
    let c2 = spherical_to_cartesian(s2.n, s2.l, s2.m);
    // amplitudes over (cm triple, rel triple)
    let mut cart: HashMap<([u32; 3], [u32; 3]), Complex64> = HashMap::new();
    for (e1, a1) in c1.iter() {
        for (e2, a2) in c2.iter() {
            let amp = a1 * a2;
            let rx = axis_rotation(e1[0], e2[0]);
            let ry = axis_rotation(e1[1], e2[1]);
            let rz = axis_rotation(e1[2], e2[2]);
            for &(nx, kx, cx) in &rx {
                for &(ny, ky, cy) in &ry {
                    for &(nz, kz, cz) in &rz {
                        *cart.entry(([nx, ny, nz], [kx, ky, kz])).or_default() += amp * (cx * cy * cz);
                    }
                }
            }
        }
    }

    let total = s1.quanta() + s2.quanta();
    let mut out = Vec::new();
    for q_rel in 0..=total {
        let rels = shell_states(q_rel);
        let cms = shell_states(total - q_rel);
        for rel in &rels {
            let rc = spherical_to_cartesian(rel.n, rel.l, rel.m);
            for cm in &cms {
                // Projection conserves m; skip early.
                if rel.m + cm.m != s1.m + s2.m {
                    continue;
                }
                let cc = spherical_to_cartesian(cm.n, cm.l, cm.m);
                let mut amp = Complex64::new(0.0, 0.0);
                for (er, ar) in rc.iter() {
                    for (ec, ac) in cc.iter() {
                        if let Some(v) = cart.get(&(*ec, *er)) {
                            amp += ar.conj() * ac.conj() * v;
                        }
                    }
                }
                debug_assert!(amp.im.abs() < 1e-10, "bracket not real: {amp}");
                if amp.re.abs() > 1e-14 {
                    out.push((*rel, *cm, amp.re));
                }
            }
        }
    }
    let out = Arc::new(out);
    cache.write().unwrap().insert((s1, s2), out.clone());
    out
}

fn cg(l1: u32, m1: i32, l2: u32, m2: i32, l: u32, m: i32) -> f64 {
    match (AngMom::int(l1, m1), AngMom::int(l2, m2), AngMom::int(l, m)) {
        (Ok(a), Ok(b), Ok(c)) => clebsch_gordan(a, b, c),
        _ => 0.0,
    }
}

/// ⟨n l, N L; λ | n₁ l₁, n₂ l₂; λ⟩, the relative angular momentum coupled first.
#[allow(clippy::too_many_arguments)]
pub fn moshinsky_bracket(n: u32, l: u32, nn: u32, ll: u32, n1: u32, l1: u32, n2: u32, l2: u32, lam: u32) -> f64 {
    if 2 * n + l + 2 * nn + ll != 2 * n1 + l1 + 2 * n2 + l2 {
        return 0.0;
    }
    if lam < l.abs_diff(ll) || lam > l + ll || lam < l1.abs_diff(l2) || lam > l1 + l2 {
        return 0.0;
    }
    type Key = [u32; 9];
    static CACHE: OnceLock<RwLock<HashMap<Key, f64>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| RwLock::new(HashMap::new()));
    let key = [n, l, nn, ll, n1, l1, n2, l2, lam];
    if let Some(v) = cache.read().unwrap().get(&key) {
        return *v;
    }
    let mut sum = 0.0;
    for m1 in -(l1 as i32)..=(l1 as i32) {
        let m2 = -m1;
        if m2.unsigned_abs() > l2 {
            continue;
        }
        let c1 = cg(l1, m1, l2, m2, lam, 0);
        if c1 == 0.0 {
            continue;
        }
        let s1 = OscState { n: n1, l: l1, m: m1 };
        let s2 = OscState { n: n2, l: l2, m: m2 };
        for (rel, cm, amp) in uncoupled_expansion(s1, s2).iter() {
            if rel.n == n && rel.l == l && cm.n == nn && cm.l == ll {
                sum += c1 * cg(l, rel.m, ll, cm.m, lam, 0) * amp;
            }
        }
    }
    cache.write().unwrap().insert(key, sum);
    sum
}
