//! Acceptance suite: one pass/fail line per criterion, each with its
//! tolerance and runtime bound. Exits non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use hyperscheme::constructions::{direct_product, direct_product_scheme, join, join_scheme};
use hyperscheme::dt_graph::{
    build_ball, deform_ball_kernels, g_coeffs, ortho_measure_integrate, psd_onset, pushforward_vs_haar, BoundaryRay,
    DeformedPoly, DtParams, PolyHypergroup,
};
use hyperscheme::hypergroup::{characters, haar, verify_hypergroup, ExactCharacterTable, FiniteHypergroup};
use hyperscheme::random_walk::{
    convolution_power, project, projection_check, propagate, simulate_walk, StepDistribution, WalkKernels,
};
use hyperscheme::scalar::PSD_FLOOR;
use hyperscheme::scheme::{
    finite_rigidity_check, from_double_cosets, verify_generalized, verify_scheme, AssociationScheme, FiniteGroup,
    GeneralizedScheme, RelationPartition,
};
use hyperscheme::{DenseMatrix, Rational, Result, Scalar};

const SEED: u64 = 20_240_601;

struct Outcome {
    ok: bool,
    detail: String,
}

fn pass_if(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome { ok, detail: detail.into() }
}

fn r(p: i64, q: i64) -> Rational {
    Rational::from_ratio(p, q)
}

/// Criterion 1: K3 from the double cosets of S3 by a transposition, all exact.
fn scheme_pipeline() -> Result<Outcome> {
    let (s3, perms) = FiniteGroup::symmetric(3);
    let transposition = perms.iter().position(|p| p == &[1, 0, 2]).expect("(12) in S3");
    let (labels, scheme) = from_double_cosets(&s3, &[s3.identity(), transposition])?;
    let k3 = labels.cosets.len() == 3 && scheme.n_relations() == 2 && scheme.valencies() == [1, 2];

    let h = FiniteHypergroup::<Rational>::from_scheme(&scheme);
    let conv = h.conv().fiber(1, 1) == [r(1, 2), r(1, 2)];
    let haar_ok = haar(&h).left == [r(1, 1), r(2, 1)];

    let table = characters(&h, SEED)?;
    let Some(exact) = ExactCharacterTable::reconstruct(&h, &table) else {
        return Ok(pass_if(false, "character table is not rational"));
    };
    let chars_ok = exact.chars == [vec![r(1, 1), r(1, 1)], vec![r(1, 1), r(-1, 2)]];
    let planch_ok = exact.plancherel == [r(1, 3), r(2, 3)];
    let dual = exact.dual_convolution(1, 1);
    let dual_ok = dual == [r(1, 2), r(1, 2)] && dual.iter().all(|c| *c >= Rational::zero());
    Ok(pass_if(
        k3 && conv && haar_ok && chars_ok && planch_ok && dual_ok,
        format!(
            "K3={k3} conv={conv} haar={haar_ok} chars={chars_ok} plancherel={planch_ok} dual={:?}",
            dual.iter().map(ToString::to_string).collect::<Vec<_>>()
        ),
    ))
}

fn grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    (0..points).map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64).collect()
}

/// `z` with `(z + 1/z) / 2 = x`.
fn joukowski_preimage(x: f64) -> num::complex::Complex64 {
    let x = num::complex::Complex64::new(x, 0.0);
    x + (x * x - 1.0).sqrt()
}

/// Criterion 2: identities of the Gamma(a, b) polynomials.
fn dt_identities() -> Result<Outcome> {
    let mut worst_special = 0.0f64;
    let mut worst_closed = 0.0f64;
    let mut worst_product = 0.0f64;
    let mut mass_ok = true;
    let mut skipped = 0;
    for a in 2..=6 {
        for b in 2..=6 {
            let p = DtParams::new(a, b)?;
            let (s0, s1) = p.special_points();
            for m in 0..=30 {
                for n in 0..=30 {
                    let total = g_coeffs(p, m, n).into_iter().fold(Rational::zero(), |acc, (_, g)| acc + g);
                    mass_ok &= total.is_one();
                }
            }
            let at_s1 = p.poly_values(30, s1);
            let at_s0 = p.poly_values(30, s0);
            for n in 0..=30 {
                worst_special = worst_special.max((at_s1[n] - 1.0).abs());
                worst_special = worst_special.max((at_s0[n] - (1.0 - b as f64).powi(-(n as i32))).abs());
            }
            for x in grid(s0, s1, 21) {
                let vals = p.poly_values(30, x);
                for (n, v) in vals.iter().enumerate() {
                    match p.closed_form_eval(n, joukowski_preimage(x)) {
                        Ok(z) => worst_closed = worst_closed.max((z - v).norm()),
                        Err(_) => skipped += 1,
                    }
                }
                for m in 0..=20 {
                    for n in 0..=20 {
                        worst_product = worst_product.max(p.product_formula_residual(m, n, x));
                    }
                }
            }
        }
    }
    Ok(pass_if(
        mass_ok && worst_special <= 1e-9 && worst_closed <= 1e-8 && worst_product <= 1e-8,
        format!(
            "unit mass={mass_ok} special points {worst_special:.2e} (tol 1e-9) closed form {worst_closed:.2e} \
             (tol 1e-8, {skipped} points at z = +-1 skipped) product formula {worst_product:.2e} (tol 1e-8)"
        ),
    ))
}

/// Criterion 3: orthogonality against the measure, including its atom.
fn orthogonality() -> Result<Outcome> {
    let mut worst = 0.0f64;
    for (a, b) in [(3, 2), (2, 2), (2, 4)] {
        let p = DtParams::new(a, b)?;
        for m in 0..=12 {
            for n in m..=12 {
                let v = ortho_measure_integrate(p, |x| {
                    let vals = p.poly_values(n, x);
                    vals[m] * vals[n]
                })?;
                let want = if m == n { 1.0 / p.haar_weight(n).to_f64() } else { 0.0 };
                worst = worst.max((v - want).abs());
            }
        }
    }
    Ok(pass_if(worst <= 1e-6, format!("max |<P_m,P_n> - delta/omega_n)| = {worst:.2e} (tol 1e-6)")))
}

/// Criterion 4: positive semidefiniteness inside `[s0, s1]` and failure outside.
fn psd() -> Result<Outcome> {
    let mut worst = f64::INFINITY;
    let mut onsets = Vec::new();
    let mut onset_ok = true;
    for (a, b) in [(3, 2), (2, 4)] {
        let p = DtParams::new(a, b)?;
        let (s0, s1) = p.special_points();
        let ball = build_ball(p, 4)?;
        for x in grid(s0, s1, 9) {
            worst = worst.min(ball.gram_min_eig(x));
        }
        match psd_onset(p, s1 + 0.2, 8, -1e-6)? {
            Some((radius, eig)) => onsets.push(format!("({a},{b}): R*={radius} eig={eig:.3e}")),
            None => onset_ok = false,
        }
    }
    Ok(pass_if(
        worst >= PSD_FLOOR && onset_ok,
        format!("min eig on grid {worst:.2e} (floor {PSD_FLOOR:e}); outside at s1+0.2: {}", onsets.join(", ")),
    ))
}

/// Criterion 5: deformed kernels on a Gamma(3, 2) ball.
fn deformation() -> Result<Outcome> {
    let p = DtParams::new(3, 2)?;
    let ball = build_ball(p, 6)?;
    let ray = BoundaryRay::new(&ball);
    let mut row = 0.0f64;
    let mut comp = 0.0f64;
    let mut closed = 0.0f64;
    let mut differ = true;
    for c in [0.0, 0.3, -0.5 * 2f64.ln()] {
        let k = deform_ball_kernels(&ball, &ray, c);
        row = row.max(k.diagnostics().max_row_residual);
        comp = comp.max(k.composition_residual()?);
        let rep = pushforward_vs_haar(p, c)?;
        let (a, e2c) = (3.0, (2.0 * c).exp());
        let pf1 = 1.0 / e2c + (a - 1.0) * e2c;
        let haar1 = ((a - 1.0) * e2c + 1.0).powi(2) / (a * e2c);
        for (got, want) in [
            (rep.pf1, pf1),
            (rep.pf1_ball, pf1),
            (rep.haar1, haar1),
            (rep.haar1_deformed, haar1),
            (rep.haar1_semicharacter, haar1),
        ] {
            closed = closed.max((got - want).abs());
        }
        if c != 0.0 {
            differ &= (pf1 - haar1).abs() > 1e-6;
        }
    }
    Ok(pass_if(
        row <= 1e-12 && comp <= 1e-10 && closed <= 1e-10 && differ,
        format!(
            "row sums {row:.2e} (tol 1e-12) composition {comp:.2e} (tol 1e-10) closed forms {closed:.2e} \
             (tol 1e-10) pf1 != haar1 for c != 0: {differ}"
        ),
    ))
}

/// Criterion 6: projection of walks on a Gamma(3, 2) ball to the hypergroup.
fn projection() -> Result<Outcome> {
    let p = DtParams::new(3, 2)?;
    let ball = build_ball(p, 8)?;
    let ray = BoundaryRay::new(&ball);
    let plain = WalkKernels::from_ball(&deform_ball_kernels(&ball, &ray, 0.0));
    let deformed_k = deform_ball_kernels(&ball, &ray, 0.3);
    let deformed = WalkKernels::from_ball(&deformed_k);
    let poly = PolyHypergroup::new(p);
    let dpoly = DeformedPoly::new(p, deformed_k.x_c(), 8)?;
    let mu = StepDistribution::<f64>::delta(1);
    let mu_exact = StepDistribution::<Rational>::delta(1);

    let mut residual = 0.0f64;
    for steps in 0..=6 {
        let exact: Vec<f64> = convolution_power(&poly, &mu_exact, steps)?.iter().map(Scalar::to_f64).collect();
        let got = project(&plain, 0, &propagate(&plain, 0, &mu, steps)?);
        residual = residual.max(max_diff(&got, &exact));
        let exact = convolution_power(&dpoly, &mu, steps)?;
        let got = project(&deformed, 0, &propagate(&deformed, 0, &mu, steps)?);
        residual = residual.max(max_diff(&got, &exact));
    }

    let walk = simulate_walk(&plain, 0, &mu, 6, 100_000, SEED)?;
    let tv_plain = projection_check(&walk, &plain, &poly, &mu_exact, 6)?.tv;
    let walk = simulate_walk(&deformed, 0, &mu, 6, 100_000, SEED)?;
    let tv_deformed = projection_check(&walk, &deformed, &dpoly, &mu, 6)?.tv;
    Ok(pass_if(
        residual <= 1e-10 && tv_plain <= 0.02 && tv_deformed <= 0.02,
        format!(
            "propagation vs convolution power {residual:.2e} (tol 1e-10); Monte Carlo 1e5 trials TV plain \
             {tv_plain:.4} deformed {tv_deformed:.4} (tol 0.02)"
        ),
    ))
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    let at = |v: &[f64], i: usize| v.get(i).copied().unwrap_or(0.0);
    (0..a.len().max(b.len())).map(|i| (at(a, i) - at(b, i)).abs()).fold(0.0, f64::max)
}

/// A random stochastic family supported on the relations of `s`: either a
/// perturbation of the canonical kernels or fresh random rows, with a random
/// positive weight on the points.
fn random_family(s: &AssociationScheme, rng: &mut ChaCha8Rng) -> GeneralizedScheme<f64> {
    let n = s.n_points();
    let part = s.partition();
    let eps = if rng.random_bool(0.5) { 10f64.powf(rng.random_range(-8.0..0.0)) } else { f64::INFINITY };
    let kernels = (0..s.n_relations())
        .map(|i| {
            let canon = s.stochastic::<f64>(i);
            let raw = DenseMatrix::from_fn(n, n, |x, y| {
                if part.label(x, y) != i {
                    0.0
                } else if eps.is_infinite() {
                    rng.random_range(0.01..1.0)
                } else {
                    canon[(x, y)] * (1.0 + eps * rng.random_range(-1.0..1.0))
                }
            });
            DenseMatrix::from_fn(n, n, |x, y| raw[(x, y)] / raw.row_sum(x))
        })
        .collect();
    let omega = (0..n).map(|_| if rng.random_bool(0.5) { 1.0 } else { rng.random_range(0.1..10.0) }).collect();
    GeneralizedScheme::new(part.clone(), kernels, omega).expect("shapes")
}

/// Criterion 7: randomized search for non-canonical generalized schemes.
fn rigidity() -> Result<Outcome> {
    let k3 = verify_scheme(&RelationPartition::from_fn(3, |x, y| usize::from(x != y))?)?;
    let (_, z4) = from_double_cosets(&FiniteGroup::cyclic(4), &[0])?;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut details = Vec::new();
    let mut ok = true;
    for (name, s) in [("K3", &k3), ("Z4", &z4)] {
        let (mut attempts, mut accepted, mut non_canonical) = (0, 0, 0);
        let mut candidates = vec![s.canonical_generalized::<f64>()?];
        for _ in 0..2000 {
            candidates.push(random_family(s, &mut rng));
        }
        for gs in candidates {
            attempts += 1;
            if let Ok(v) = verify_generalized(&gs) {
                accepted += 1;
                if !finite_rigidity_check(&gs, &v) {
                    non_canonical += 1;
                }
            }
        }
        ok &= non_canonical == 0 && accepted >= 1;
        details.push(format!("{name}: {attempts} attempts, {accepted} accepted, {non_canonical} non-canonical"));
    }
    Ok(pass_if(ok, details.join("; ")))
}

/// `sum_h omega_D(h) K_h(x, .) = omega_X` for every `x`, with the Haar
/// measure scaled so that `omega_D(e) = omega_X(x)`.
fn t2_exact(gs: &GeneralizedScheme<Rational>, h: &FiniteHypergroup<Rational>) -> bool {
    let w = haar(h).left;
    let e = h.identity();
    (0..gs.n_points()).all(|x| {
        let scale = gs.omega_x()[x].clone() / w[e].clone();
        (0..gs.n_points()).all(|y| {
            let sum = (0..gs.n_relations())
                .fold(Rational::zero(), |acc, k| acc + scale.clone() * w[k].clone() * gs.kernel(k)[(x, y)].clone());
            sum == gs.omega_x()[y]
        })
    })
}

/// Criterion 8: product and join of the K3 data.
fn constructions() -> Result<Outcome> {
    let k3 = verify_scheme(&RelationPartition::from_fn(3, |x, y| usize::from(x != y))?)?;
    let h = FiniteHypergroup::<Rational>::from_scheme(&k3);
    let gs = k3.canonical_generalized::<Rational>()?;

    let prod = direct_product(&h, &h);
    let prod_ok = verify_hypergroup(&prod).is_ok();
    let prod_s = direct_product_scheme(&gs, &gs)?;
    let prod_v = verify_generalized(&prod_s)?;
    let prod_t2 = t2_exact(&prod_s, &FiniteHypergroup::from_generalized(&prod_s, &prod_v));

    let joined = join(&h, &h)?;
    let jh = &joined.result;
    let join_ok = verify_hypergroup(jh).is_ok();
    let one = joined.index.from_discrete(1).expect("non-identity");
    let one_prime = joined.index.from_compact(1);
    let mut want = vec![Rational::zero(); jh.n()];
    want[one] = r(1, 2);
    want[jh.identity()] = r(1, 6);
    want[one_prime] = r(1, 3);
    let coeff_ok = jh.conv().fiber(one, one) == want.as_slice();
    let join_s = join_scheme(&gs, &gs)?.result;
    let join_v = verify_generalized(&join_s)?;
    let join_h = FiniteHypergroup::from_generalized(&join_s, &join_v);
    let same = &join_h == jh;
    let join_t2 = t2_exact(&join_s, &join_h);
    Ok(pass_if(
        prod_ok && prod_t2 && join_ok && coeff_ok && same && join_t2,
        format!(
            "product hypergroup={prod_ok} product T2={prod_t2} join hypergroup={join_ok} \
             d1*d1={coeff_ok} join scheme matches={same} join T2={join_t2} (exact)"
        ),
    ))
}

type Criterion = (&'static str, fn() -> Result<Outcome>, Duration);

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("scheme pipeline on K3", scheme_pipeline, Duration::from_secs(1)),
        ("Gamma(a,b) polynomial identities", dt_identities, Duration::from_secs(10)),
        ("orthogonality measure", orthogonality, Duration::from_secs(30)),
        ("positive definiteness on balls", psd, Duration::from_secs(60)),
        ("deformation consistency", deformation, Duration::from_secs(10)),
        ("projection of random walks", projection, Duration::from_secs(60)),
        ("rigidity of finite generalized schemes", rigidity, Duration::from_secs(30)),
        ("products and joins", constructions, Duration::from_secs(5)),
    ];
    let mut failed = 0;
    for (i, (name, run, bound)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = run().unwrap_or_else(|e| pass_if(false, format!("error: {e}")));
        let elapsed = start.elapsed();
        let in_time = elapsed <= bound;
        let ok = outcome.ok && in_time;
        failed += usize::from(!ok);
        println!(
            "criterion {}: {} {name}: {} [{:.2?} of {:?}]",
            i + 1,
            if ok { "PASS" } else { "FAIL" },
            outcome.detail,
            elapsed,
            bound,
        );
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
