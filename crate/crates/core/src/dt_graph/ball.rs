use std::collections::VecDeque;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};

use super::poly::{DeformedPoly, DtParams};

/// Default vertex cap for [`build_ball`].
pub const DEFAULT_BALL_CAP: usize = 200_000;

/// Environment variable overriding [`DEFAULT_BALL_CAP`].
pub const BALL_CAP_ENV: &str = "HYPERSCHEME_BALL_CAP";

/// The vertex cap in effect: `HYPERSCHEME_BALL_CAP` if set and valid, else the default.
pub fn ball_cap() -> usize {
    std::env::var(BALL_CAP_ENV).ok().and_then(|v| v.trim().parse().ok()).unwrap_or(DEFAULT_BALL_CAP)
}

/// The ball of radius `R` around a root of `Gamma(a, b)`.
///
/// Vertices are step words stored by parent pointer in breadth-first order.
/// A step is `(clique, member)`: the root has cliques `1..=a`, every other
/// vertex `1..=a-1` new cliques (its parent's clique is the remaining one),
/// and each clique contributes members `1..=b-1`.
#[derive(Debug, Clone)]
pub struct Ball {
    params: DtParams,
    radius: usize,
    parent: Vec<usize>,
    depth: Vec<usize>,
    clique: Vec<u32>,
    member: Vec<u32>,
    children: Vec<(usize, usize)>,
}

/// Builds the ball, refusing when it would exceed [`ball_cap`] vertices.
pub fn build_ball(params: DtParams, radius: usize) -> Result<Ball> {
    build_ball_with_cap(params, radius, ball_cap())
}

pub fn build_ball_with_cap(params: DtParams, radius: usize, cap: usize) -> Result<Ball> {
    let size = params.ball_size(radius);
    if size > cap as u128 {
        return Err(Error::BallTooLarge { radius, vertices: size, cap });
    }
    let size = size as usize;
    let mut ball = Ball {
        params,
        radius,
        parent: Vec::with_capacity(size),
        depth: Vec::with_capacity(size),
        clique: Vec::with_capacity(size),
        member: Vec::with_capacity(size),
        children: Vec::with_capacity(size),
    };
    ball.parent.push(usize::MAX);
    ball.depth.push(0);
    ball.clique.push(0);
    ball.member.push(0);
    let mut v = 0;
    while v < ball.parent.len() {
        let start = ball.parent.len();
        if ball.depth[v] < radius {
            let cliques = if v == 0 { params.a } else { params.a - 1 };
            for c in 1..=cliques {
                for m in 1..params.b {
                    ball.parent.push(v);
                    ball.depth.push(ball.depth[v] + 1);
                    ball.clique.push(c);
                    ball.member.push(m);
                }
            }
        }
        ball.children.push((start, ball.parent.len()));
        v += 1;
    }
    debug_assert_eq!(ball.parent.len(), size);
    Ok(ball)
}

impl Ball {
    pub fn params(&self) -> DtParams {
        self.params
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn root(&self) -> usize {
        0
    }

    pub fn depth(&self, v: usize) -> usize {
        self.depth[v]
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        (v != 0).then(|| self.parent[v])
    }

    pub fn children(&self, v: usize) -> std::ops::Range<usize> {
        let (s, e) = self.children[v];
        s..e
    }

    /// Step word of `v` from the root.
    pub fn word(&self, v: usize) -> Vec<(u32, u32)> {
        let mut w = Vec::with_capacity(self.depth[v]);
        let mut x = v;
        while x != 0 {
            w.push((self.clique[x], self.member[x]));
            x = self.parent[x];
        }
        w.reverse();
        w
    }

    /// Number of vertices at each depth `0..=R`.
    pub fn sphere_sizes(&self) -> Vec<usize> {
        let mut s = vec![0; self.radius + 1];
        self.depth.iter().for_each(|&d| s[d] += 1);
        s
    }

    /// Graph distance: climb to the common ancestor; when the two branches
    /// leave it through the same clique the path saves one step.
    pub fn dist(&self, u: usize, w: usize) -> usize {
        let (mut x, mut y) = (u, w);
        let (mut cx, mut cy) = (usize::MAX, usize::MAX);
        while self.depth[x] > self.depth[y] {
            cx = x;
            x = self.parent[x];
        }
        while self.depth[y] > self.depth[x] {
            cy = y;
            y = self.parent[y];
        }
        while x != y {
            cx = x;
            cy = y;
            x = self.parent[x];
            y = self.parent[y];
        }
        let d = self.depth[u] + self.depth[w] - 2 * self.depth[x];
        if cx != usize::MAX && cy != usize::MAX && self.clique[cx] == self.clique[cy] {
            d - 1
        } else {
            d
        }
    }

    /// Parent, siblings in the same clique, and children.
    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        let mut out = Vec::new();
        if v != 0 {
            let p = self.parent[v];
            out.push(p);
            out.extend(self.children(p).filter(|&s| s != v && self.clique[s] == self.clique[v]));
        }
        out.extend(self.children(v));
        out
    }

    /// Breadth-first distances from `from` inside the ball.
    pub fn bfs(&self, from: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.len()];
        dist[from] = 0;
        let mut queue = VecDeque::from([from]);
        while let Some(v) = queue.pop_front() {
            for w in self.neighbors(v) {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// The symmetric matrix `M[u][v] = P_{d(u,v)}(x)`.
    pub fn gram_matrix(&self, x: f64) -> DMatrix<f64> {
        let p = self.params.poly_values(2 * self.radius, x);
        let n = self.len();
        let mut m = DMatrix::zeros(n, n);
        for u in 0..n {
            for v in u..n {
                let val = p[self.dist(u, v)];
                m[(u, v)] = val;
                m[(v, u)] = val;
            }
        }
        m
    }

    /// Smallest eigenvalue of [`Ball::gram_matrix`].
    pub fn gram_min_eig(&self, x: f64) -> f64 {
        self.gram_matrix(x).symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Minimum Gram eigenvalue at `x` for every radius `0..=max_radius`.
pub fn psd_sweep(params: DtParams, x: f64, max_radius: usize) -> Result<Vec<f64>> {
    (0..=max_radius).map(|r| Ok(build_ball(params, r)?.gram_min_eig(x))).collect()
}

/// First radius `<= max_radius` whose minimum Gram eigenvalue at `x` is below
/// `threshold`, with that eigenvalue.
pub fn psd_onset(params: DtParams, x: f64, max_radius: usize, threshold: f64) -> Result<Option<(usize, f64)>> {
    for r in 0..=max_radius {
        let eig = build_ball(params, r)?.gram_min_eig(x);
        if eig < threshold {
            return Ok(Some((r, eig)));
        }
    }
    Ok(None)
}

/// Distance from the vertex with step word `word` to the ray vertex `v_n`
/// (the word of `n` steps `(1, 1)`), which need not lie in the ball.
fn dist_to_ray_vertex(word: &[(u32, u32)], n: usize) -> usize {
    let m = word.len();
    let common = word.iter().take(n).take_while(|&&s| s == (1, 1)).count();
    if common == m || common == n {
        return m.abs_diff(n);
    }
    let d = (m - common) + (n - common);
    if word[common].0 == 1 {
        d - 1
    } else {
        d
    }
}

/// All minimizers of `n -> d(v, v_n)` for `n` in `0..=R + depth(v)`.
fn ray_minimizers(ball: &Ball, v: usize) -> (usize, Vec<usize>) {
    let word = ball.word(v);
    let mut best = usize::MAX;
    let mut mins = Vec::new();
    for n in 0..=ball.radius + word.len() {
        let d = dist_to_ray_vertex(&word, n);
        if d < best {
            best = d;
            mins.clear();
        }
        if d == best {
            mins.push(n);
        }
    }
    (best, mins)
}

/// `d(v, B) = d(v, v_n0) - n0` for the largest nearest ray index `n0`.
///
/// For `b > 2` a vertex whose branch leaves the ray through a ray clique is
/// equidistant from two consecutive ray vertices; the largest minimizer gives
/// the horocycle index `lim_n d(v, v_n) - n`, which is the one compatible with
/// the level counts of spheres.
pub fn boundary_distance(ball: &Ball, v: usize) -> i64 {
    let (best, mins) = ray_minimizers(ball, v);
    best as i64 - *mins.last().expect("non-empty scan") as i64
}

/// As [`boundary_distance`], but fails when the nearest ray vertex is not unique.
pub fn boundary_distance_strict(ball: &Ball, v: usize) -> Result<i64> {
    let (best, mins) = ray_minimizers(ball, v);
    if mins.len() > 1 {
        return Err(Error::NonUniqueMinimizer { vertex: v, minimizers: mins });
    }
    Ok(best as i64 - mins[0] as i64)
}

/// The boundary ray through the all-`(1, 1)` word, with the horocycle index
/// of every ball vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundaryRay {
    /// Ball indices of `v_0, .., v_R`.
    pub ray: Vec<usize>,
    /// `d(v, B)` per vertex.
    pub horocycle: Vec<i64>,
}

impl BoundaryRay {
    pub fn new(ball: &Ball) -> Self {
        let mut ray = vec![0];
        while let Some(&last) = ray.last() {
            let ch = ball.children(last);
            if ch.is_empty() {
                break;
            }
            ray.push(ch.start);
        }
        let horocycle = (0..ball.len()).map(|v| boundary_distance(ball, v)).collect();
        Self { ray, horocycle }
    }
}

/// Sphere-indexed Markov kernels on a ball, optionally deformed by
/// `e^{c d(., B)}`:
/// Sparse kernel row: `(target, probability)` pairs.
type SparseRow = Vec<(usize, f64)>;

/// `K_h(x, y) = e^{c (d(y,B) - d(x,B))} / (P_h(x_c) |S_h|)` for `d(x, y) = h`.
/// Only rows whose whole sphere lies in the ball (`depth(x) + h <= R`) are kept.
#[derive(Debug, Clone)]
pub struct BallKernels {
    ball: Ball,
    c: f64,
    x_c: f64,
    /// `alpha[h] = P_h(x_c)` for `h <= R`.
    alpha: Vec<f64>,
    /// `rows[h][x]`, `None` for rows that are not interior-valid.
    rows: Vec<Vec<Option<SparseRow>>>,
}

/// Diagnostics of [`deform_ball_kernels`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelDiagnostics {
    pub interior_rows: usize,
    pub omitted_rows: usize,
    /// Largest `|sum_y K_h(x, y) - 1|` over interior rows.
    pub max_row_residual: f64,
}

/// Kernels of the deformation with parameter `c` (plain sphere kernels for `c = 0`).
pub fn deform_ball_kernels(ball: &Ball, ray: &BoundaryRay, c: f64) -> BallKernels {
    let params = ball.params;
    let r = ball.radius;
    let x_c = params.x_c(c);
    let alpha = params.poly_values(r, x_c);
    let n = ball.len();
    let mut rows: Vec<Vec<Option<SparseRow>>> = vec![vec![None; n]; r + 1];
    for x in 0..n {
        let reach = r - ball.depth[x];
        let dist = ball.bfs(x);
        let mut spheres: Vec<Vec<usize>> = vec![Vec::new(); reach + 1];
        for (y, &d) in dist.iter().enumerate() {
            if d <= reach {
                spheres[d].push(y);
            }
        }
        for (h, sphere) in spheres.into_iter().enumerate() {
            debug_assert_eq!(sphere.len() as u128, params.sphere_size(h));
            let norm = alpha[h] * sphere.len() as f64;
            let hx = ray.horocycle[x];
            let row = sphere.into_iter().map(|y| (y, (c * (ray.horocycle[y] - hx) as f64).exp() / norm)).collect();
            rows[h][x] = Some(row);
        }
    }
    BallKernels { ball: ball.clone(), c, x_c, alpha, rows }
}

impl BallKernels {
    pub fn ball(&self) -> &Ball {
        &self.ball
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn x_c(&self) -> f64 {
        self.x_c
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    /// Row `K_h(x, .)` as `(vertex, weight)` pairs, if interior-valid.
    pub fn row(&self, h: usize, x: usize) -> Option<&[(usize, f64)]> {
        self.rows.get(h)?.get(x)?.as_deref()
    }

    pub fn diagnostics(&self) -> KernelDiagnostics {
        let mut interior = 0;
        let mut omitted = 0;
        let mut worst = 0.0f64;
        for by_x in &self.rows {
            for row in by_x {
                match row {
                    Some(row) => {
                        interior += 1;
                        worst = worst.max((row.iter().map(|(_, w)| w).sum::<f64>() - 1.0).abs());
                    }
                    None => omitted += 1,
                }
            }
        }
        KernelDiagnostics { interior_rows: interior, omitted_rows: omitted, max_row_residual: worst }
    }

    /// Largest entrywise `|(K_i K_j)(x, .) - sum_k g~_{i,j,k} K_k(x, .)|` over all
    /// `x, i, j` with `depth(x) + i + j <= R`, against the deformed hypergroup
    /// coefficients at `x_c`.
    pub fn composition_residual(&self) -> Result<f64> {
        let r = self.ball.radius;
        let poly = DeformedPoly::new(self.ball.params, self.x_c, 2 * r)?;
        let n = self.ball.len();
        let mut worst = 0.0f64;
        let mut acc = vec![0.0; n];
        for x in 0..n {
            let reach = r - self.ball.depth[x];
            for i in 0..=reach {
                for j in 0..=reach - i {
                    acc.iter_mut().for_each(|v| *v = 0.0);
                    let mut touched = Vec::new();
                    for &(y, wy) in self.row(i, x).expect("interior") {
                        for &(z, wz) in self.row(j, y).expect("interior") {
                            if acc[z] == 0.0 {
                                touched.push(z);
                            }
                            acc[z] += wy * wz;
                        }
                    }
                    let (lo, g) = poly.g(i, j)?;
                    for (t, gk) in g.iter().enumerate() {
                        for &(z, wz) in self.row(lo + t, x).expect("interior") {
                            if acc[z] == 0.0 {
                                touched.push(z);
                            }
                            acc[z] -= gk * wz;
                        }
                    }
                    for z in touched {
                        worst = worst.max(acc[z].abs());
                    }
                }
            }
        }
        Ok(worst)
    }
}

/// Pushforward of `e^{2c d(., B)}` to sphere 1 against the deformed Haar weight
/// at 1, for the homogeneous tree (`b = 2`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PushforwardReport {
    /// `e^{-2c} + (a-1) e^{2c}`.
    pub pf1: f64,
    /// `((a-1) e^{2c} + 1)^2 / (a e^{2c})`.
    pub haar1: f64,
    /// `sum_{d(root, v) = 1} e^{2c d(v, B)}` on a ball.
    pub pf1_ball: f64,
    /// `1 / g~_{1,1,0}` of the deformed polynomial hypergroup.
    pub haar1_deformed: f64,
    /// `P_1(x_c)^2 omega_1`.
    pub haar1_semicharacter: f64,
}

pub fn pushforward_vs_haar(params: DtParams, c: f64) -> Result<PushforwardReport> {
    if params.b != 2 {
        return Err(Error::UnsupportedParams(format!("needs b = 2 (a tree), got b = {}", params.b)));
    }
    let a = params.a as f64;
    let e2c = (2.0 * c).exp();
    let pf1 = 1.0 / e2c + (a - 1.0) * e2c;
    let haar1 = ((a - 1.0) * e2c + 1.0).powi(2) / (a * e2c);

    let ball = build_ball(params, 1)?;
    let ray = BoundaryRay::new(&ball);
    let pf1_ball =
        (0..ball.len()).filter(|&v| ball.depth(v) == 1).map(|v| (2.0 * c * ray.horocycle[v] as f64).exp()).sum();

    let poly = DeformedPoly::new(params, params.x_c(c), 2)?;
    let (lo, g) = poly.g(1, 1)?;
    debug_assert_eq!(lo, 0);
    let haar1_deformed = 1.0 / g[0];
    let haar1_semicharacter = poly.haar_weight(1);
    Ok(PushforwardReport { pf1, haar1, pf1_ball, haar1_deformed, haar1_semicharacter })
}
