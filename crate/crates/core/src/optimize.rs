//! Deterministic 1D maximization: a uniform scan to bracket the best point, then
//! Brent's method (golden section with parabolic steps) inside the bracket.

use serde::{Deserialize, Serialize};

use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Maximum {
    pub argmax: f64,
    pub value: f64,
    /// False when the best point sits on a bound (no interior maximum found).
    pub interior: bool,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchConfig {
    pub scan_points: usize,
    pub x_tol: f64,
    pub max_iter: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self { scan_points: 64, x_tol: 1e-10, max_iter: 200 }
    }
}

/// Maximize `f` on [lo, hi].
pub fn maximize<F: FnMut(f64) -> Result<f64>>(mut f: F, lo: f64, hi: f64, cfg: SearchConfig) -> Result<Maximum> {
    let n = cfg.scan_points.max(3);
    let xs: Vec<f64> = (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect();
    let mut ys = Vec::with_capacity(n);
    for &x in &xs {
        ys.push(f(x)?);
    }
    let mut evals = n;
    let mut best = 0;
    for i in 1..n {
        if ys[i] > ys[best] {
            best = i;
        }
    }
    if best == 0 || best == n - 1 {
        return Ok(Maximum { argmax: xs[best], value: ys[best], interior: false, evaluations: evals });
    }

    // Brent minimization of −f on [xs[best−1], xs[best+1]].
    const CGOLD: f64 = 0.381_966_011_250_105_1;
    let (mut a, mut b) = (xs[best - 1], xs[best + 1]);
    let (mut x, mut w, mut v) = (xs[best], xs[best], xs[best]);
    let (mut fx, mut fw, mut fv) = (-ys[best], -ys[best], -ys[best]);
    let mut d: f64 = 0.0;
    let mut e: f64 = 0.0;
    for _ in 0..cfg.max_iter {
        let xm = 0.5 * (a + b);
        let tol1 = cfg.x_tol * (x.abs() + 1.0);
        let tol2 = 2.0 * tol1;
        if (x - xm).abs() <= tol2 - 0.5 * (b - a) {
            break;
        }
        let mut golden = true;
        if e.abs() > tol1 {
            let r = (x - w) * (fx - fv);
            let mut q = (x - v) * (fx - fw);
            let mut p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if q > 0.0 {
                p = -p;
            }
            q = q.abs();
            let etemp = e;
            e = d;
            if p.abs() < (0.5 * q * etemp).abs() && p > q * (a - x) && p < q * (b - x) {
                d = p / q;
                let u = x + d;
                if u - a < tol2 || b - u < tol2 {
                    d = tol1.copysign(xm - x);
                }
                golden = false;
            }
        }
        if golden {
            e = if x >= xm { a - x } else { b - x };
            d = CGOLD * e;
        }
        let u = if d.abs() >= tol1 { x + d } else { x + tol1.copysign(d) };
        let fu = -f(u)?;
        evals += 1;
        if fu <= fx {
            if u >= x {
                a = x;
            } else {
                b = x;
            }
            v = w;
            fv = fw;
            w = x;
            fw = fx;
            x = u;
            fx = fu;
        } else {
            if u < x {
                a = u;
            } else {
                b = u;
            }
            if fu <= fw || w == x {
                v = w;
                fv = fw;
                w = u;
                fw = fu;
            } else if fu <= fv || v == x || v == w {
                v = u;
                fv = fu;
            }
        }
    }
    Ok(Maximum { argmax: x, value: -fx, interior: true, evaluations: evals })
}
