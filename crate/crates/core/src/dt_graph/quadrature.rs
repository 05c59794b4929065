use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::error::{Error, Result};

use super::poly::DtParams;

const GL_ORDER: usize = 20;
const MAX_DEPTH: u32 = 40;
const MAX_PANELS: usize = 200_000;

/// Gauss-Legendre nodes and weights on `[-1, 1]`, by Newton iteration on `P_n`.
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; order];
    let mut weights = vec![0.0; order];
    for i in 0..order.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (order as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=order {
                let k = k as f64;
                let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = order as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[order - 1 - i] = x;
        weights[i] = w;
        weights[order - 1 - i] = w;
    }
    (nodes, weights)
}

fn rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(GL_ORDER))
}

fn panel(f: &impl Fn(f64) -> f64, lo: f64, hi: f64) -> f64 {
    let (nodes, weights) = rule();
    let (mid, half) = (0.5 * (lo + hi), 0.5 * (hi - lo));
    half * nodes.iter().zip(weights).map(|(x, w)| w * f(mid + half * x)).sum::<f64>()
}

/// Adaptive composite Gauss-Legendre quadrature: a panel is accepted when
/// splitting it changes the estimate by at most its share of `tol`.
pub fn integrate(f: impl Fn(f64) -> f64, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    let mut stack = vec![(lo, hi, panel(&f, lo, hi), 0u32)];
    let mut total = 0.0;
    let mut panels = 0usize;
    let width = hi - lo;
    while let Some((a, b, whole, depth)) = stack.pop() {
        panels += 1;
        let m = 0.5 * (a + b);
        let (left, right) = (panel(&f, a, m), panel(&f, m, b));
        let delta = (left + right - whole).abs();
        if delta <= tol * (b - a) / width || delta <= 1e-15 * (left + right).abs() {
            total += left + right;
        } else if depth >= MAX_DEPTH || panels >= MAX_PANELS || !delta.is_finite() {
            return Err(Error::QuadratureFailure { delta });
        } else {
            stack.push((a, m, left, depth + 1));
            stack.push((m, b, right, depth + 1));
        }
    }
    Ok(total)
}

/// Density `w(x) = (a / 2 pi) sqrt(1 - x^2) / ((s1 - x)(x - s0))` of the
/// continuous part of the orthogonality measure.
pub fn ortho_density(params: DtParams, x: f64) -> f64 {
    let (s0, s1) = params.special_points();
    params.a as f64 / (2.0 * PI) * (1.0 - x * x).max(0.0).sqrt() / ((s1 - x) * (x - s0))
}

/// Mass of the atom at `s0`: `(b - a) / b` when `b > a`, else zero.
pub fn ortho_atom(params: DtParams) -> f64 {
    if params.b > params.a {
        (params.b - params.a) as f64 / params.b as f64
    } else {
        0.0
    }
}

/// `int f d rho`: the density part over `[-1, 1]` after `x = cos(theta)`, plus
/// the atom at `s0` when `b > a`.
pub fn ortho_measure_integrate(params: DtParams, f: impl Fn(f64) -> f64) -> Result<f64> {
    let (s0, s1) = params.special_points();
    let scale = params.a as f64 / (2.0 * PI);
    // Endpoint-stable forms of the factors of the density.
    let integrand = |theta: f64| {
        let (sh, ch) = ((0.5 * theta).sin(), (0.5 * theta).cos());
        let sin2 = 4.0 * sh * sh * ch * ch;
        let upper = (s1 - 1.0) + 2.0 * sh * sh;
        let lower = (-1.0 - s0) + 2.0 * ch * ch;
        scale * f(theta.cos()) * sin2 / (upper * lower)
    };
    let continuous = integrate(integrand, 0.0, PI, 1e-13)?;
    let atom = ortho_atom(params);
    Ok(continuous + if atom > 0.0 { atom * f(s0) } else { 0.0 })
}
