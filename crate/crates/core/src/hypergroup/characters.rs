//! Dual space of a finite commutative hypergroup: characters, Plancherel
//! weights, Fourier transforms, positive definiteness and the dual convolution.

use nalgebra::DMatrix;
use num::complex::Complex64;
use num::traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::scalar::{rationalize, Rational, Scalar, EQ_TOL, PSD_FLOOR};

use super::finite::{haar, FiniteHypergroup};

/// Seed used when the caller does not pick one.
pub const DEFAULT_SEED: u64 = 0x5eed_cafe;
/// Fresh random combinations tried before giving up on a degenerate spectrum.
pub const MAX_ATTEMPTS: usize = 5;
/// Smallest eigenvalue separation accepted for the combined matrix.
pub const GAP_TOL: f64 = 1e-8;

/// Characters of a finite commutative hypergroup, one row per character,
/// with the Haar weights (`omega(e) = 1`) and Plancherel weights
/// `pi(alpha) = 1 / sum_x omega(x) |alpha(x)|^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct CharacterTable {
    pub chars: Vec<Vec<Complex64>>,
    pub haar: Vec<f64>,
    pub plancherel: Vec<f64>,
    pub identity: usize,
    pub involution: Vec<usize>,
    pub scheme_derived: bool,
    pub seed: u64,
    /// Random combinations tried, including the successful one.
    pub attempts: usize,
    /// Largest `|alpha(i) alpha(j) - sum_k c[i][j][k] alpha(k)|` over all rows.
    pub max_residual: f64,
    /// `|sum_alpha pi(alpha) - 1|`.
    pub parseval_residual: f64,
}

/// Joint eigenvectors of the left-convolution matrices `M_i[j][k] = c[i][j][k]`,
/// found by diagonalizing a random convex combination of them.
pub fn characters<T: Scalar>(h: &FiniteHypergroup<T>, seed: u64) -> Result<CharacterTable> {
    if !h.is_commutative() {
        return Err(Error::NotCommutative);
    }
    let hf = h.to_f64();
    let n = hf.n();
    let e = hf.identity();
    let mats: Vec<DMatrix<f64>> = (0..n).map(|i| DMatrix::from_fn(n, n, |j, k| *hf.c(i, j, k))).collect();
    let omega = haar(&hf).left;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best_gap = 0.0f64;
    for attempt in 1..=MAX_ATTEMPTS {
        let w: Vec<f64> = (0..n).map(|_| rng.random::<f64>() + 0.1).collect();
        let total: f64 = w.iter().sum();
        let mut mw = DMatrix::<f64>::zeros(n, n);
        for (m, wi) in mats.iter().zip(&w) {
            mw += m * (wi / total);
        }
        let eig: Vec<Complex64> = mw.complex_eigenvalues().iter().copied().collect();
        let gap = min_gap(&eig);
        best_gap = best_gap.max(gap);
        if gap < GAP_TOL {
            continue;
        }
        let mwc = mw.map(|v| Complex64::new(v, 0.0));
        let mut chars = Vec::with_capacity(n);
        for &lambda in &eig {
            let shifted = &mwc - DMatrix::<Complex64>::identity(n, n) * lambda;
            let v = null_vector(shifted);
            let scale = v[e];
            if scale.norm() < 1e-300 {
                break;
            }
            let alpha: Vec<Complex64> = v.iter().map(|x| x / scale).collect();
            chars.push(refine(&mats, &alpha));
        }
        if chars.len() != n {
            continue;
        }
        let max_residual = chars.iter().map(|a| multiplicativity_residual(&hf, a)).fold(0.0, f64::max);
        if max_residual > EQ_TOL {
            continue;
        }
        sort_characters(&mut chars);
        let plancherel: Vec<f64> =
            chars.iter().map(|a| 1.0 / a.iter().zip(&omega).map(|(x, w)| w * x.norm_sqr()).sum::<f64>()).collect();
        let parseval_residual = (plancherel.iter().sum::<f64>() - 1.0).abs();
        return Ok(CharacterTable {
            chars,
            haar: omega,
            plancherel,
            identity: e,
            involution: hf.involution().to_vec(),
            scheme_derived: hf.is_scheme_derived(),
            seed,
            attempts: attempt,
            max_residual,
            parseval_residual,
        });
    }
    Err(Error::DegenerateSpectrum { attempts: MAX_ATTEMPTS, gap: best_gap })
}

fn min_gap(eig: &[Complex64]) -> f64 {
    let mut gap = f64::INFINITY;
    for (a, x) in eig.iter().enumerate() {
        for y in &eig[a + 1..] {
            gap = gap.min((x - y).norm());
        }
    }
    gap
}

/// Right singular vector for the smallest singular value.
fn null_vector(a: DMatrix<Complex64>) -> Vec<Complex64> {
    let svd = a.svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let idx =
        svd.singular_values.iter().enumerate().min_by(|x, y| x.1.total_cmp(y.1)).map(|(i, _)| i).expect("non-empty");
    v_t.row(idx).iter().map(|z| z.conj()).collect()
}

/// Replaces each `alpha(i)` by the Rayleigh quotient of `M_i` at `alpha`,
/// then snaps negligible imaginary parts to zero.
fn refine(mats: &[DMatrix<f64>], alpha: &[Complex64]) -> Vec<Complex64> {
    let norm: f64 = alpha.iter().map(|z| z.norm_sqr()).sum();
    mats.iter()
        .map(|m| {
            let mut q = Complex64::zero();
            for j in 0..alpha.len() {
                let mut row = Complex64::zero();
                for (k, a) in alpha.iter().enumerate() {
                    row += a * m[(j, k)];
                }
                q += alpha[j].conj() * row;
            }
            let q = q / norm;
            if q.im.abs() < 1e-13 {
                Complex64::new(q.re, 0.0)
            } else {
                q
            }
        })
        .collect()
}

fn multiplicativity_residual(h: &FiniteHypergroup<f64>, alpha: &[Complex64]) -> f64 {
    let n = h.n();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let rhs: Complex64 = (0..n).map(|k| alpha[k] * h.c(i, j, k)).sum();
            worst = worst.max((alpha[i] * alpha[j] - rhs).norm());
        }
    }
    worst
}

/// Real part at index 1 descending, then lexicographic on `(re, im)`.
fn sort_characters(chars: &mut [Vec<Complex64>]) {
    let key = |z: &Complex64| ((z.re * 1e9).round() as i64, (z.im * 1e9).round() as i64);
    chars.sort_by(|a, b| {
        let first = match (a.get(1), b.get(1)) {
            (Some(x), Some(y)) => key(y).0.cmp(&key(x).0),
            _ => std::cmp::Ordering::Equal,
        };
        first.then_with(|| a.iter().map(key).cmp(b.iter().map(key)))
    });
}

impl CharacterTable {
    pub fn n_chars(&self) -> usize {
        self.chars.len()
    }

    /// `f^(alpha) = sum_x f(x) conj(alpha(x)) omega(x)`.
    pub fn fourier(&self, f: &[Complex64]) -> Vec<Complex64> {
        self.chars
            .iter()
            .map(|a| f.iter().zip(a).zip(&self.haar).map(|((fx, ax), w)| fx * ax.conj() * w).sum())
            .collect()
    }

    /// `mu-check(x) = sum_alpha mu(alpha) alpha(x)`.
    pub fn inverse_fourier(&self, mu: &[Complex64]) -> Vec<Complex64> {
        let n = self.haar.len();
        (0..n).map(|x| self.chars.iter().zip(mu).map(|(a, m)| m * a[x]).sum()).collect()
    }

    /// Coefficients `mu(alpha)` with `f = sum_alpha mu(alpha) alpha`, i.e.
    /// `pi(alpha) f^(alpha)`.
    pub fn expand(&self, f: &[Complex64]) -> Vec<Complex64> {
        self.fourier(f).iter().zip(&self.plancherel).map(|(v, p)| v * p).collect()
    }

    /// Dual convolution `delta_alpha *^ delta_beta = sum_gamma n_gamma delta_gamma`
    /// with `n_gamma = pi(gamma) sum_x omega(x) alpha(x) beta(x) conj(gamma(x))`.
    pub fn dual_convolution(&self, a: usize, b: usize) -> Result<Vec<Complex64>> {
        let m = self.n_chars();
        if a >= m || b >= m {
            return Err(Error::invalid(format!("character index out of range 0..{m}")));
        }
        let prod: Vec<Complex64> = self.chars[a].iter().zip(&self.chars[b]).map(|(x, y)| x * y).collect();
        Ok(self.expand(&prod))
    }

    /// Index of the trivial character `alpha = 1`.
    pub fn trivial_index(&self) -> Option<usize> {
        self.chars.iter().position(|a| a.iter().all(|z| (z - 1.0).norm() <= EQ_TOL))
    }

    /// Index of the character `conj(alpha)`.
    pub fn conjugate_index(&self, a: usize) -> Option<usize> {
        self.chars.iter().position(|b| b.iter().zip(&self.chars[a]).all(|(x, y)| (x - y.conj()).norm() <= EQ_TOL))
    }
}

/// Outcome of [`positive_definite_check`].
#[derive(Debug, Clone, PartialEq)]
pub struct PositiveDefiniteness {
    /// All expansion coefficients are real and at least `-EQ_TOL`.
    pub positive_definite: bool,
    pub coefficients: Vec<Complex64>,
    /// Whether the Gram matrix `F[k][l] = sum_m c[k][l-bar][m] f(m)` is Hermitian.
    pub gram_hermitian: bool,
    /// Smallest eigenvalue of the Hermitian part of the Gram matrix.
    pub gram_min_eig: f64,
    /// Whether the Gram criterion gives the same verdict as the expansion.
    pub gram_agrees: bool,
}

/// Expands `f` in characters and cross-checks with the Gram matrix criterion.
pub fn positive_definite_check<T: Scalar>(
    h: &FiniteHypergroup<T>,
    table: &CharacterTable,
    f: &[Complex64],
) -> Result<PositiveDefiniteness> {
    if !h.is_commutative() {
        return Err(Error::NotCommutative);
    }
    let n = h.n();
    if f.len() != n {
        return Err(Error::invalid(format!("function has {} values, expected {n}", f.len())));
    }
    let coefficients = table.expand(f);
    let positive_definite = coefficients.iter().all(|m| m.im.abs() <= EQ_TOL && m.re >= -EQ_TOL);

    let hf = h.to_f64();
    let inv = hf.involution();
    let gram = DMatrix::from_fn(n, n, |k, l| (0..n).map(|m| f[m] * hf.c(k, inv[l], m)).sum::<Complex64>());
    let gram_hermitian = (0..n).all(|k| (0..n).all(|l| (gram[(k, l)] - gram[(l, k)].conj()).norm() <= EQ_TOL));
    let herm = (&gram + gram.adjoint()) * Complex64::new(0.5, 0.0);
    let gram_min_eig = herm.symmetric_eigen().eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    let gram_psd = gram_hermitian && gram_min_eig >= PSD_FLOOR;
    Ok(PositiveDefiniteness {
        positive_definite,
        coefficients,
        gram_hermitian,
        gram_min_eig,
        gram_agrees: gram_psd == positive_definite,
    })
}

/// Real multiplicative functions with `alpha(e) = 1` and `alpha(x-bar) = alpha(x)`.
/// On a finite hypergroup these are exactly the real rows of the character table.
pub fn semicharacters<T: Scalar>(h: &FiniteHypergroup<T>, seed: u64) -> Result<Vec<Vec<f64>>> {
    let table = characters(h, seed)?;
    let inv = h.involution();
    Ok(table
        .chars
        .iter()
        .filter(|a| a.iter().all(|z| z.im.abs() <= EQ_TOL))
        .map(|a| a.iter().map(|z| z.re).collect::<Vec<f64>>())
        .filter(|a| (0..a.len()).all(|x| (a[x] - a[inv[x]]).abs() <= EQ_TOL))
        .collect())
}

/// Character table with rational entries, reconstructed from a floating-point
/// table and then verified exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactCharacterTable {
    pub chars: Vec<Vec<Rational>>,
    pub haar: Vec<Rational>,
    pub plancherel: Vec<Rational>,
}

/// Largest denominator tried when recognizing character values as rationals.
pub const MAX_DENOMINATOR: i64 = 1 << 20;

impl ExactCharacterTable {
    /// Succeeds when every character value is real and rational with a small
    /// denominator and the recovered rows are exactly multiplicative.
    pub fn reconstruct(h: &FiniteHypergroup<Rational>, table: &CharacterTable) -> Option<Self> {
        let n = h.n();
        let mut chars = Vec::with_capacity(table.n_chars());
        for row in &table.chars {
            let exact: Vec<Rational> = row
                .iter()
                .map(|z| if z.im.abs() <= EQ_TOL { rationalize(z.re, MAX_DENOMINATOR) } else { None })
                .collect::<Option<_>>()?;
            for i in 0..n {
                for j in 0..n {
                    let rhs = (0..n).fold(Rational::zero(), |acc, k| acc + h.c(i, j, k) * &exact[k]);
                    if &exact[i] * &exact[j] != rhs {
                        return None;
                    }
                }
            }
            chars.push(exact);
        }
        let haar = haar(h).left;
        let plancherel = chars
            .iter()
            .map(|a| {
                let norm = a.iter().zip(&haar).fold(Rational::zero(), |acc, (x, w)| acc + w * x * x);
                Rational::from_int(1) / norm
            })
            .collect();
        Some(Self { chars, haar, plancherel })
    }

    pub fn plancherel_sum(&self) -> Rational {
        self.plancherel.iter().fold(Rational::zero(), |a, b| a + b)
    }

    /// Exact dual convolution coefficients; characters are real here.
    pub fn dual_convolution(&self, a: usize, b: usize) -> Vec<Rational> {
        self.chars
            .iter()
            .zip(&self.plancherel)
            .map(|(g, p)| {
                let s = (0..self.haar.len()).fold(Rational::zero(), |acc, x| {
                    acc + &self.haar[x] * &self.chars[a][x] * &self.chars[b][x] * &g[x]
                });
                p * s
            })
            .collect()
    }
}
