use std::sync::{Arc, RwLock};

use num::bigint::BigInt;
use num::complex::Complex64;
use num::traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{Rational, Scalar};

/// Parameters of `Gamma(a, b)`: `a` copies of the complete graph on `b`
/// vertices meet at every vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct DtParams {
    pub a: u32,
    pub b: u32,
}

impl DtParams {
    pub fn new(a: u32, b: u32) -> Result<Self> {
        if a < 2 || b < 2 {
            return Err(Error::invalid(format!("need a, b >= 2, got a={a}, b={b}")));
        }
        Ok(Self { a, b })
    }

    fn af(self) -> f64 {
        self.a as f64
    }

    fn bf(self) -> f64 {
        self.b as f64
    }

    /// `(a-1)(b-1)`.
    pub fn q(self) -> f64 {
        (self.af() - 1.0) * (self.bf() - 1.0)
    }

    /// Size of a sphere of radius `h`: `a (a-1)^{h-1} (b-1)^h`, and 1 for `h = 0`.
    pub fn sphere_size(self, h: usize) -> u128 {
        if h == 0 {
            return 1;
        }
        let (a, b) = (self.a as u128, self.b as u128);
        let mut s = a;
        for _ in 1..h {
            s = s.saturating_mul((a - 1) * (b - 1));
        }
        s.saturating_mul(b - 1)
    }

    /// Number of vertices within distance `radius` of a vertex.
    pub fn ball_size(self, radius: usize) -> u128 {
        (0..=radius).fold(0u128, |acc, h| acc.saturating_add(self.sphere_size(h)))
    }

    /// Haar weight `omega_n`, exactly.
    pub fn haar_weight(self, n: usize) -> Rational {
        Rational::from_integer(BigInt::from(self.sphere_size(n)))
    }

    /// `s0 = (2-a-b) / (2 sqrt((a-1)(b-1)))` and `s1 = (ab-a-b+2) / (2 sqrt((a-1)(b-1)))`.
    pub fn special_points(self) -> (f64, f64) {
        let (a, b) = (self.af(), self.bf());
        let r = 2.0 * self.q().sqrt();
        ((2.0 - a - b) / r, (a * b - a - b + 2.0) / r)
    }

    /// `P_1(x) = (2/a) sqrt((a-1)/(b-1)) x + (b-2)/(a(b-1))`.
    pub fn p1(self, x: f64) -> f64 {
        let (a, b) = (self.af(), self.bf());
        2.0 / a * ((a - 1.0) / (b - 1.0)).sqrt() * x + (b - 2.0) / (a * (b - 1.0))
    }

    /// `P_0(x), .., P_n(x)` by the three-term recurrence.
    pub fn poly_values(self, n: usize, x: f64) -> Vec<f64> {
        let (a, b) = (self.af(), self.bf());
        let lower = 1.0 / (a * (b - 1.0));
        let mid = (b - 2.0) / (a * (b - 1.0));
        let upper = (a - 1.0) / a;
        let p1 = self.p1(x);
        let mut out = Vec::with_capacity(n + 1);
        out.push(1.0);
        if n >= 1 {
            out.push(p1);
        }
        for k in 1..n {
            let next = ((p1 - mid) * out[k] - lower * out[k - 1]) / upper;
            out.push(next);
        }
        out
    }

    /// `P_n(x)`.
    pub fn poly_eval(self, n: usize, x: f64) -> f64 {
        self.poly_values(n, x)[n]
    }

    /// `P_n((z + 1/z)/2) = (c(z) z^n + c(1/z) z^{-n}) / ((a-1)(b-1))^{n/2}` with
    /// `c(z) = ((a-1) z - 1/z + (b-2) sqrt(a-1)/sqrt(b-1)) / (a (z - 1/z))`.
    pub fn closed_form_eval(self, n: usize, z: Complex64) -> Result<Complex64> {
        let one = Complex64::new(1.0, 0.0);
        if z.norm() < 1e-300 || (z - one).norm() < 1e-12 || (z + one).norm() < 1e-12 {
            return Err(Error::DomainError(format!("closed form undefined at z = {z}")));
        }
        let (a, b) = (self.af(), self.bf());
        let k = (b - 2.0) * (a - 1.0).sqrt() / (b - 1.0).sqrt();
        let c = |z: Complex64| ((a - 1.0) * z - z.inv() + k) / (a * (z - z.inv()));
        let zn = z.powu(n as u32);
        let num = c(z) * zn + c(z.inv()) * zn.inv();
        Ok(num / self.q().powf(n as f64 / 2.0))
    }

    /// `|P_m(x) P_n(x) - sum_k g_{m,n,k} P_k(x)|`.
    pub fn product_formula_residual(self, m: usize, n: usize, x: f64) -> f64 {
        let p = self.poly_values(m + n, x);
        let (lo, g) = g_coeffs_f64(self, m, n);
        let rhs: f64 = g.iter().enumerate().map(|(t, gk)| gk * p[lo + t]).sum();
        (p[m] * p[n] - rhs).abs()
    }

    /// Eigenvalue of the sphere-average operator `T_h` on `e^{c d(., B)}`, as the
    /// direct sum over the horocycle levels of the sphere.
    pub fn horocycle_eigenvalue(self, h: usize, c: f64) -> f64 {
        if h == 0 {
            return 1.0;
        }
        let (a, b) = (self.af(), self.bf());
        let q = self.q();
        let h_f = h as f64;
        let mut total = (-c * h_f).exp() + q.powi(h as i32) * (c * h_f).exp();
        for k in 0..h {
            total += (b - 2.0) * q.powi(k as i32) * (c * (2.0 * k as f64 + 1.0 - h_f)).exp();
        }
        for k in 0..h.saturating_sub(1) {
            total += (a - 2.0) * (b - 1.0) * q.powi(k as i32) * (c * (2.0 * k as f64 + 2.0 - h_f)).exp();
        }
        total / self.sphere_size(h) as f64
    }

    /// `x_c = (e^c sqrt(q) + 1/(e^c sqrt(q))) / 2`.
    pub fn x_c(self, c: f64) -> f64 {
        let t = c.exp() * self.q().sqrt();
        0.5 * (t + 1.0 / t)
    }
}

/// Exact linearization coefficients `delta_m * delta_n = sum_k g_{m,n,k} delta_k`,
/// returned as `(k, g_{m,n,k})` for `k = |m-n|, .., m+n` (zeros included).
pub fn g_coeffs(params: DtParams, m: usize, n: usize) -> Vec<(usize, Rational)> {
    let lo = m.abs_diff(n);
    g_pattern(params, m.min(n)).into_iter().enumerate().map(|(t, g)| (lo + t, g)).collect()
}

fn big_pow(base: u32, exp: usize) -> BigInt {
    num::pow(BigInt::from(base), exp)
}

/// Coefficients at offsets `0..=2s` from `|m-n|`, where `s = min(m, n)`.
fn g_pattern(params: DtParams, s: usize) -> Vec<Rational> {
    if s == 0 {
        return vec![Rational::one()];
    }
    let (a, b) = (params.a, params.b);
    let ratio = |num: i64, am1: usize, bm1: usize| {
        Rational::new(BigInt::from(num), BigInt::from(a) * big_pow(a - 1, am1) * big_pow(b - 1, bm1))
    };
    let mut g = vec![Rational::zero(); 2 * s + 1];
    g[2 * s] = Rational::from_ratio(a as i64 - 1, a as i64);
    g[0] = ratio(1, s - 1, s);
    for k in 0..s {
        g[2 * k + 1] = ratio(b as i64 - 2, s - k - 1, s - k);
    }
    for k in 0..s.saturating_sub(1) {
        g[2 * k + 2] = ratio(a as i64 - 2, s - k - 1, s - k - 1);
    }
    g
}

/// Floating-point coefficients as `(|m-n|, values)`.
pub fn g_coeffs_f64(params: DtParams, m: usize, n: usize) -> (usize, Vec<f64>) {
    (m.abs_diff(n), g_pattern(params, m.min(n)).iter().map(|g| g.to_f64()).collect())
}

/// The polynomial hypergroup on `N_0` attached to `Gamma(a, b)`, with
/// coefficient patterns cached per `min(m, n)`.
#[derive(Debug)]
pub struct PolyHypergroup {
    params: DtParams,
    exact: RwLock<Vec<Arc<Vec<Rational>>>>,
}

impl PolyHypergroup {
    pub fn new(params: DtParams) -> Self {
        Self { params, exact: RwLock::new(Vec::new()) }
    }

    pub fn params(&self) -> DtParams {
        self.params
    }

    /// Coefficients of `delta_m * delta_n` as `(|m-n|, pattern)`.
    pub fn g(&self, m: usize, n: usize) -> (usize, Arc<Vec<Rational>>) {
        let s = m.min(n);
        if let Some(p) = self.exact.read().expect("cache lock").get(s) {
            return (m.abs_diff(n), p.clone());
        }
        let mut cache = self.exact.write().expect("cache lock");
        while cache.len() <= s {
            let next = g_pattern(self.params, cache.len());
            cache.push(Arc::new(next));
        }
        (m.abs_diff(n), cache[s].clone())
    }

    pub fn haar_weight(&self, n: usize) -> Rational {
        self.params.haar_weight(n)
    }

    /// Exact convolution of finitely supported measures given as dense vectors from 0.
    pub fn convolve(&self, mu: &[Rational], nu: &[Rational]) -> Vec<Rational> {
        let len = (mu.len() + nu.len()).saturating_sub(1).max(1);
        let mut out = vec![Rational::zero(); len];
        for (m, a) in mu.iter().enumerate().filter(|(_, a)| !a.is_zero()) {
            for (n, b) in nu.iter().enumerate().filter(|(_, b)| !b.is_zero()) {
                let ab = a * b;
                let (lo, g) = self.g(m, n);
                for (t, gk) in g.iter().enumerate().filter(|(_, g)| !g.is_zero()) {
                    out[lo + t] += &ab * gk;
                }
            }
        }
        out
    }

    /// Deformation by the positive semicharacter `h -> P_h(x)`, valid for `x >= 1`.
    pub fn deformed(&self, x: f64, max_degree: usize) -> Result<DeformedPoly> {
        DeformedPoly::new(self.params, x, max_degree)
    }
}

/// The polynomial hypergroup deformed by `alpha(h) = P_h(x)`:
/// `g~_{m,n,k} = alpha(k) / (alpha(m) alpha(n)) g_{m,n,k}`, in floating point,
/// for degrees up to a fixed bound.
#[derive(Debug, Clone)]
pub struct DeformedPoly {
    params: DtParams,
    x: f64,
    alpha: Vec<f64>,
}

impl DeformedPoly {
    pub fn new(params: DtParams, x: f64, max_degree: usize) -> Result<Self> {
        if !(x >= 1.0) {
            return Err(Error::NotASemicharacter {
                reason: format!("P_h({x}) is not a positive semicharacter for x < 1"),
                residual: 1.0 - x,
            });
        }
        let alpha = params.poly_values(max_degree, x);
        if let Some(h) = alpha.iter().position(|v| !(*v > 0.0) || !v.is_finite()) {
            return Err(Error::NotASemicharacter {
                reason: format!("P_{h}({x}) = {} is not positive and finite", alpha[h]),
                residual: alpha[h].abs(),
            });
        }
        Ok(Self { params, x, alpha })
    }

    pub fn params(&self) -> DtParams {
        self.params
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn max_degree(&self) -> usize {
        self.alpha.len() - 1
    }

    /// `alpha(h) = P_h(x)`.
    pub fn alpha(&self, h: usize) -> f64 {
        self.alpha[h]
    }

    /// Coefficients of `delta_m *~ delta_n` as `(|m-n|, values)`; needs `m + n <= max_degree`.
    pub fn g(&self, m: usize, n: usize) -> Result<(usize, Vec<f64>)> {
        if m + n > self.max_degree() {
            return Err(Error::SupportCap { needed: m + n, cap: self.max_degree() });
        }
        let (lo, g) = g_coeffs_f64(self.params, m, n);
        let scale = self.alpha[m] * self.alpha[n];
        Ok((lo, g.iter().enumerate().map(|(t, gk)| self.alpha[lo + t] / scale * gk).collect()))
    }

    /// Haar weights `alpha(n)^2 omega_n` of the deformed hypergroup.
    pub fn haar_weight(&self, n: usize) -> f64 {
        self.alpha[n] * self.alpha[n] * self.params.sphere_size(n) as f64
    }
}
