//! Property tests for the structural invariants of schemes, hypergroups,
//! the Gamma(a, b) family, constructions and random walks.

use std::sync::OnceLock;

use num::complex::Complex64;
use num::Zero;
use proptest::prelude::*;

use hyperscheme::constructions::{direct_product, direct_product_scheme, join, join_scheme};
use hyperscheme::dt_graph::{
    build_ball, deform_ball_kernels, g_coeffs, BoundaryRay, DeformedPoly, DtParams, PolyHypergroup,
};
use hyperscheme::hypergroup::{
    characters, haar, positive_definite_check, semicharacter_deform, semicharacters, FiniteHypergroup,
};
use hyperscheme::random_walk::{
    convolution_power, omega_invariance_residual, project, propagate, simulate_walk, StepDistribution, WalkKernels,
};
use hyperscheme::scheme::{
    from_double_cosets, verify_generalized, verify_scheme, AssociationScheme, FiniteGroup, GeneralizedScheme,
    RelationPartition,
};
use hyperscheme::{DenseMatrix, Rational, Scalar};

const SEED: u64 = 7;

/// Schemes of small finite groups and complete graphs, at most 12 points.
fn pool() -> &'static [AssociationScheme] {
    static POOL: OnceLock<Vec<AssociationScheme>> = OnceLock::new();
    POOL.get_or_init(|| {
        let mut out = Vec::new();
        for n in 1..=6 {
            out.push(from_double_cosets(&FiniteGroup::cyclic(n), &[0]).unwrap().1);
        }
        for n in 2..=5 {
            out.push(verify_scheme(&RelationPartition::from_fn(n, |x, y| usize::from(x != y)).unwrap()).unwrap());
        }
        for n in [3, 4] {
            let (g, _) = FiniteGroup::symmetric(n);
            for x in 0..g.order() {
                let mut sub = vec![g.identity()];
                let mut y = x;
                while y != g.identity() {
                    sub.push(y);
                    y = g.mul(y, x);
                }
                if g.order() / sub.len() <= 12 {
                    out.push(from_double_cosets(&g, &sub).unwrap().1);
                }
            }
        }
        out
    })
}

fn any_scheme() -> impl Strategy<Value = AssociationScheme> {
    (0..pool().len()).prop_map(|i| pool()[i].clone())
}

fn small_scheme() -> impl Strategy<Value = AssociationScheme> {
    any_scheme().prop_filter("at most 4 points", |s| s.n_points() <= 4)
}

fn commutative_scheme() -> impl Strategy<Value = AssociationScheme> {
    any_scheme().prop_filter("commutative", AssociationScheme::is_commutative)
}

fn params() -> impl Strategy<Value = DtParams> {
    (2u32..=6, 2u32..=6).prop_map(|(a, b)| DtParams::new(a, b).unwrap())
}

fn rat(s: &AssociationScheme, i: usize, j: usize, k: usize) -> Rational {
    Rational::from_int(s.p(i, j, k) as i64)
}

fn linear_combination(
    terms: impl Iterator<Item = (Rational, DenseMatrix<Rational>)>,
    n: usize,
) -> DenseMatrix<Rational> {
    let mut acc = DenseMatrix::zeros(n, n);
    for (c, m) in terms {
        acc.add_scaled(&c, &m);
    }
    acc
}

fn hg(s: &AssociationScheme) -> FiniteHypergroup<Rational> {
    FiniteHypergroup::from_scheme(s)
}

fn nonneg_function(table: &hyperscheme::hypergroup::CharacterTable, weights: &[f64]) -> Vec<Complex64> {
    let n = table.chars[0].len();
    (0..n).map(|x| table.chars.iter().zip(weights).map(|(a, w)| a[x] * *w).sum()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn valencies_sum_and_bose_mesner(s in any_scheme()) {
        let n = s.n_points();
        let r = s.n_relations();
        prop_assert_eq!(s.valencies().iter().sum::<u64>(), n as u64);
        for i in 0..r {
            for j in 0..r {
                let lhs = s.adjacency::<Rational>(i).matmul(&s.adjacency(j));
                let rhs = linear_combination((0..r).map(|k| (rat(&s, i, j, k), s.adjacency(k))), n);
                prop_assert_eq!(lhs, rhs);
                let lhs = s.stochastic::<Rational>(i).matmul(&s.stochastic(j));
                let rhs = linear_combination((0..r).map(|k| (s.canonical_coefficient(i, j, k), s.stochastic(k))), n);
                prop_assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn commutativity_both_ways(s in any_scheme()) {
        let r = s.n_relations();
        let matrices_commute = (0..r).all(|i| (0..r).all(|j| {
            let (a, b) = (s.adjacency::<Rational>(i), s.adjacency::<Rational>(j));
            a.matmul(&b) == b.matmul(&a)
        }));
        prop_assert_eq!(s.is_commutative(), matrices_commute);
        prop_assert_eq!(hg(&s).is_commutative(), matrices_commute);
    }

    #[test]
    fn unimodular_iff_haar_sides_agree(s in any_scheme()) {
        let w = haar(&hg(&s));
        prop_assert_eq!(s.is_unimodular(), w.unimodular);
        prop_assert!(w.invariant);
        let valencies: Vec<Rational> = s.valencies().iter().map(|&v| Rational::from_int(v as i64)).collect();
        prop_assert_eq!(w.left, valencies);
    }

    #[test]
    fn canonical_family_is_generalized(s in any_scheme()) {
        let gs = s.canonical_generalized::<Rational>().unwrap();
        let v = verify_generalized(&gs).unwrap();
        prop_assert_eq!(&FiniteHypergroup::from_generalized(&gs, &v), &hg(&s));
        prop_assert_eq!(omega_invariance_residual(&gs), 0.0);
    }

    #[test]
    fn dual_convolution_is_nonnegative(s in commutative_scheme()) {
        let h = hg(&s);
        let table = characters(&h, SEED).unwrap();
        let m = table.n_chars();
        for a in 0..m {
            for b in 0..m {
                let d = table.dual_convolution(a, b).unwrap();
                prop_assert!(d.iter().all(|z| z.re >= -1e-9 && z.im.abs() <= 1e-9), "{a} {b}: {d:?}");
                let bbar = table.conjugate_index(b).unwrap();
                let triv = table.trivial_index().unwrap();
                if a != b {
                    let d = table.dual_convolution(a, bbar).unwrap();
                    prop_assert!(d[triv].norm() <= 1e-9);
                }
            }
        }
    }

    #[test]
    fn characters_and_schur_products_are_positive_definite(
        s in commutative_scheme(),
        w1 in prop::collection::vec(0.0f64..1.0, 12),
        w2 in prop::collection::vec(0.0f64..1.0, 12),
    ) {
        let h = hg(&s);
        let table = characters(&h, SEED).unwrap();
        for a in &table.chars {
            let pd = positive_definite_check(&h, &table, a).unwrap();
            prop_assert!(pd.positive_definite && pd.gram_agrees);
        }
        let f1 = nonneg_function(&table, &w1);
        let f2 = nonneg_function(&table, &w2);
        let prod: Vec<Complex64> = f1.iter().zip(&f2).map(|(a, b)| a * b).collect();
        let pd = positive_definite_check(&h, &table, &prod).unwrap();
        prop_assert!(pd.positive_definite && pd.gram_agrees, "{pd:?}");
    }

    #[test]
    fn fourier_round_trip(
        s in commutative_scheme(),
        re in prop::collection::vec(-1.0f64..1.0, 12),
        im in prop::collection::vec(-1.0f64..1.0, 12),
    ) {
        let h = hg(&s);
        let table = characters(&h, SEED).unwrap();
        let f: Vec<Complex64> = (0..h.n()).map(|x| Complex64::new(re[x], im[x])).collect();
        // inverse_fourier(fourier(f) pi) = f, and fourier(inverse_fourier(mu)) pi = mu.
        let back = table.inverse_fourier(&table.expand(&f));
        prop_assert!(f.iter().zip(&back).all(|(a, b)| (a - b).norm() <= 1e-9));
        let mu: Vec<Complex64> = (0..table.n_chars()).map(|a| Complex64::new(re[a], im[a])).collect();
        let again = table.fourier(&table.inverse_fourier(&mu));
        let again: Vec<Complex64> = again.iter().zip(&table.plancherel).map(|(v, p)| v * p).collect();
        prop_assert!(mu.iter().zip(&again).all(|(a, b)| (a - b).norm() <= 1e-9));
    }

    #[test]
    fn finite_deformation_round_trip(s in commutative_scheme()) {
        let h = hg(&s);
        for alpha in semicharacters(&h, SEED).unwrap() {
            if alpha.iter().any(|v| *v <= 0.0) {
                continue;
            }
            let exact: Vec<Rational> = alpha.iter().map(|v| hyperscheme::scalar::rationalize(*v, 1 << 20).unwrap()).collect();
            let inverse: Vec<Rational> = exact.iter().map(|v| Rational::from_int(1) / v.clone()).collect();
            let there = semicharacter_deform(&h, &exact).unwrap();
            prop_assert_eq!(&semicharacter_deform(&there, &inverse).unwrap(), &h);
        }
    }

    #[test]
    fn poly_deformation_round_trip(p in params(), x in 1.0f64..3.0, m in 0usize..10, n in 0usize..10) {
        let d = DeformedPoly::new(p, x, 20).unwrap();
        let (lo, deformed) = d.g(m, n).unwrap();
        let (lo0, plain) = hyperscheme::dt_graph::g_coeffs_f64(p, m, n);
        prop_assert_eq!(lo, lo0);
        for (t, (gd, g)) in deformed.iter().zip(&plain).enumerate() {
            let back = gd * d.alpha(m) * d.alpha(n) / d.alpha(lo + t);
            prop_assert!((back - g).abs() <= 1e-12 * g.abs().max(1.0));
        }
        let total: f64 = deformed.iter().sum();
        prop_assert!((total - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn g_coeffs_nonnegative_unit_mass(p in params(), m in 0usize..=30, n in 0usize..=30) {
        let g = g_coeffs(p, m, n);
        prop_assert!(g.iter().all(|(_, v)| *v >= Rational::zero()));
        prop_assert_eq!(g.iter().fold(Rational::zero(), |a, (_, v)| a + v), Rational::from_int(1));
    }

    #[test]
    fn g_linearization_is_associative(p in params(), m in 0usize..=12, n in 0usize..=12, l in 0usize..=12) {
        let h = PolyHypergroup::new(p);
        let delta = |i: usize| {
            let mut v = vec![Rational::zero(); i + 1];
            v[i] = Rational::from_int(1);
            v
        };
        let left = h.convolve(&h.convolve(&delta(m), &delta(n)), &delta(l));
        let right = h.convolve(&delta(m), &h.convolve(&delta(n), &delta(l)));
        prop_assert_eq!(left, right);
    }

    #[test]
    fn polys_bounded_and_closed_form(p in params(), t in 0.0f64..=1.0, n in 0usize..=30) {
        let (_, s1) = p.special_points();
        let x = -s1 + 2.0 * s1 * t;
        prop_assert!(p.poly_eval(n, x).abs() <= 1.0 + 1e-9);
        let z = Complex64::new(x, 0.0);
        let z = z + (z * z - 1.0).sqrt();
        if let Ok(v) = p.closed_form_eval(n, z) {
            prop_assert!((v - p.poly_eval(n, x)).norm() <= 1e-8);
        }
    }

    #[test]
    fn horocycle_eigenvalue_matches_poly(p in params(), c in -1.5f64..1.5, h in 0usize..=15) {
        let want = p.poly_eval(h, p.x_c(c));
        prop_assert!((p.horocycle_eigenvalue(h, c) - want).abs() <= 1e-9 * want.abs().max(1.0));
    }

    #[test]
    fn ball_metric_matches_bfs(a in 2u32..=4, b in 2u32..=4, radius in 1usize..=4, seed in any::<u64>()) {
        let ball = build_ball(DtParams::new(a, b).unwrap(), radius).unwrap();
        let from = (seed % ball.len() as u64) as usize;
        let bfs = ball.bfs(from);
        prop_assert!((0..ball.len()).all(|v| ball.dist(from, v) == bfs[v]));
    }

    #[test]
    fn products_preserve_translation_properties(s1 in small_scheme(), s2 in small_scheme()) {
        let (a, b) = (s1.translation_property_check().unwrap(), s2.translation_property_check().unwrap());
        let prod = verify_scheme(&s1.partition().product(s2.partition())).unwrap();
        let p = prod.translation_property_check().unwrap();
        prop_assert_eq!(p, (a.0 && b.0, a.1 && b.1));
        prop_assert_eq!(&FiniteHypergroup::from_scheme(&prod), &direct_product(&hg(&s1), &hg(&s2)));
        let gs = direct_product_scheme(
            &s1.canonical_generalized::<Rational>().unwrap(),
            &s2.canonical_generalized::<Rational>().unwrap(),
        ).unwrap();
        prop_assert!(verify_generalized(&gs).is_ok());
    }

    #[test]
    fn join_t2_and_haar(s1 in small_scheme(), s2 in small_scheme()) {
        let (h1, h2) = (hg(&s1), hg(&s2));
        let joined = join(&h1, &h2).unwrap();
        let h = &joined.result;
        let w = haar(h).left;
        let (w1, w2) = (haar(&h1).left, haar(&h2).left);
        for i2 in 0..h2.n() {
            prop_assert_eq!(&w[joined.index.from_compact(i2)], &w2[i2]);
        }
        for &i1 in &joined.index.discrete {
            prop_assert_eq!(&w[joined.index.from_discrete(i1).unwrap()], &(w1[i1].clone() * joined.scale.clone()));
        }

        let js = join_scheme(
            &s1.canonical_generalized::<Rational>().unwrap(),
            &s2.canonical_generalized::<Rational>().unwrap(),
        ).unwrap().result;
        let v = verify_generalized(&js).unwrap();
        prop_assert_eq!(&FiniteHypergroup::from_generalized(&js, &v), h);
        prop_assert_eq!(omega_invariance_residual(&js), 0.0);
        // sum_h omega_D(h) K_h(x, .) = omega_X with omega_D(e) = omega_X(x).
        let e = h.identity();
        for x in 0..js.n_points() {
            let scale = js.omega_x()[x].clone() / w[e].clone();
            for y in 0..js.n_points() {
                let sum = (0..js.n_relations()).fold(Rational::zero(), |acc, k| {
                    acc + scale.clone() * w[k].clone() * js.kernel(k)[(x, y)].clone()
                });
                prop_assert_eq!(&sum, &js.omega_x()[y]);
            }
        }
    }

    #[test]
    fn scheme_propagation_matches_convolution(
        s in any_scheme(),
        raw in prop::collection::vec(0.0f64..1.0, 12),
        steps in 0usize..6,
        start_seed in any::<u64>(),
    ) {
        let r = s.n_relations();
        let total: f64 = raw[..r].iter().sum::<f64>().max(1e-9);
        let mu = StepDistribution::new(raw[..r].iter().map(|w| w / total).collect::<Vec<f64>>());
        prop_assume!(mu.is_ok());
        let mu = mu.unwrap();
        let gs = s.canonical_generalized::<f64>().unwrap();
        let kern = WalkKernels::from_scheme(&gs);
        let start = (start_seed % s.n_points() as u64) as usize;
        let law = project(&kern, start, &propagate(&kern, start, &mu, steps).unwrap());
        let power = convolution_power(&FiniteHypergroup::<f64>::from_scheme(&s), &mu, steps).unwrap();
        prop_assert!(law.iter().zip(&power).all(|(a, b)| (a - b).abs() <= 1e-10));
    }

    #[test]
    fn ball_propagation_matches_convolution(
        a in 2u32..=4,
        b in 2u32..=3,
        c in -0.7f64..0.7,
        steps in 0usize..=3,
        w in 0.0f64..1.0,
    ) {
        let p = DtParams::new(a, b).unwrap();
        let ball = build_ball(p, 4).unwrap();
        let ray = BoundaryRay::new(&ball);
        let k = deform_ball_kernels(&ball, &ray, c);
        let kern = WalkKernels::from_ball(&k);
        let mu = StepDistribution::new(vec![w, 1.0 - w]).unwrap();
        let law = project(&kern, 0, &propagate(&kern, 0, &mu, steps).unwrap());
        let power = convolution_power(&DeformedPoly::new(p, k.x_c(), 4).unwrap(), &mu, steps).unwrap();
        let n = law.len().max(power.len());
        let at = |v: &[f64], i: usize| v.get(i).copied().unwrap_or(0.0);
        prop_assert!((0..n).all(|i| (at(&law, i) - at(&power, i)).abs() <= 1e-10));
    }

    #[test]
    fn walks_do_not_depend_on_thread_count(s in any_scheme(), seed in any::<u64>()) {
        let gs: GeneralizedScheme<f64> = s.canonical_generalized().unwrap();
        let kern = WalkKernels::from_scheme(&gs);
        let mu = StepDistribution::delta(s.n_relations() - 1);
        let run = |threads: usize| {
            rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap()
                .install(|| simulate_walk(&kern, 0, &mu, 3, 500, seed).unwrap())
        };
        prop_assert_eq!(run(1), run(4));
    }
}
