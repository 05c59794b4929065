use serde::Serialize;

use crate::error::{Axiom, AxiomViolation, Error, Result, Witness};
use crate::matrix::DenseMatrix;
use crate::scalar::{Scalar, EQ_TOL};
use crate::scheme::{AssociationScheme, GeneralizedScheme, GeneralizedVerification};
use crate::tensor::Tensor3;

/// A finite hypergroup on `D = {0, .., n-1}` given by its convolution tensor:
/// `delta_i * delta_j = sum_k conv[i][j][k] delta_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteHypergroup<T> {
    conv: Tensor3<T>,
    identity: usize,
    involution: Vec<usize>,
    scheme_derived: bool,
}

/// Outcome of [`verify_hypergroup`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct HypergroupReport {
    pub commutative: bool,
    pub symmetric: bool,
}

/// Left and right Haar weights, normalized so the identity has weight one.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HaarWeights<T> {
    pub left: Vec<T>,
    pub right: Vec<T>,
    pub unimodular: bool,
    /// Whether both weight vectors passed the translation-invariance summation.
    pub invariant: bool,
}

impl<T: Scalar> FiniteHypergroup<T> {
    /// Checks shapes and index ranges only; see [`verify_hypergroup`] for the axioms.
    pub fn new(conv: Tensor3<T>, identity: usize, involution: Vec<usize>) -> Result<Self> {
        let n = conv.dim();
        if n == 0 {
            return Err(Error::invalid("hypergroup must have at least one element"));
        }
        if identity >= n {
            return Err(Error::invalid(format!("identity {identity} out of range 0..{n}")));
        }
        if involution.len() != n {
            return Err(Error::invalid(format!("involution has {} entries, expected {n}", involution.len())));
        }
        let mut seen = vec![false; n];
        for (i, &t) in involution.iter().enumerate() {
            if t >= n || seen[t] {
                return Err(Error::invalid(format!("involution is not a permutation at {i}")));
            }
            seen[t] = true;
        }
        Ok(Self { conv, identity, involution, scheme_derived: false })
    }

    /// `c[i][j][k] = (omega_k / (omega_i omega_j)) p_{i,j}^k`.
    pub fn from_scheme(scheme: &AssociationScheme) -> Self {
        let r = scheme.n_relations();
        let conv = Tensor3::from_fn(r, |i, j, k| {
            T::from_ratio(
                (scheme.p(i, j, k) * scheme.valency(k)) as i64,
                (scheme.valency(i) * scheme.valency(j)) as i64,
            )
        });
        Self {
            conv,
            identity: scheme.partition().identity_relation(),
            involution: scheme.involution().to_vec(),
            scheme_derived: true,
        }
    }

    /// The hypergroup `(D, *)` with `conv = p-tilde` of a verified generalized scheme.
    pub fn from_generalized(_gs: &GeneralizedScheme<T>, verification: &GeneralizedVerification<T>) -> Self {
        Self {
            conv: verification.p_tilde.clone(),
            identity: verification.scheme.partition().identity_relation(),
            involution: verification.scheme.involution().to_vec(),
            scheme_derived: true,
        }
    }

    pub fn n(&self) -> usize {
        self.conv.dim()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn involution(&self) -> &[usize] {
        &self.involution
    }

    pub fn conv(&self) -> &Tensor3<T> {
        &self.conv
    }

    /// `c[i][j][k]`.
    pub fn c(&self, i: usize, j: usize, k: usize) -> &T {
        &self.conv[(i, j, k)]
    }

    /// Whether this hypergroup comes from a (generalized) association scheme.
    pub fn is_scheme_derived(&self) -> bool {
        self.scheme_derived
    }

    pub fn with_scheme_derived(mut self, flag: bool) -> Self {
        self.scheme_derived = flag;
        self
    }

    pub fn is_commutative(&self) -> bool {
        let n = self.n();
        (0..n).all(|i| (0..n).all(|j| (0..n).all(|k| self.conv[(i, j, k)].near(&self.conv[(j, i, k)], EQ_TOL))))
    }

    pub fn is_symmetric(&self) -> bool {
        self.involution.iter().enumerate().all(|(i, &t)| i == t)
    }

    /// Matrix of left convolution by `delta_i`: entry `(j, k)` is `c[i][j][k]`.
    pub fn left_matrix(&self, i: usize) -> DenseMatrix<T> {
        let n = self.n();
        DenseMatrix::from_fn(n, n, |j, k| self.conv[(i, j, k)].clone())
    }

    /// Convolution of two measures on `D`.
    pub fn convolve(&self, mu: &[T], nu: &[T]) -> Vec<T> {
        let n = self.n();
        let mut out = vec![T::zero(); n];
        for (i, a) in mu.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in nu.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let ab = a.clone() * b.clone();
                for (k, o) in out.iter_mut().enumerate() {
                    let c = &self.conv[(i, j, k)];
                    if !c.is_zero() {
                        *o = o.clone() + ab.clone() * c.clone();
                    }
                }
            }
        }
        out
    }

    /// Point mass at `i`.
    pub fn delta(&self, i: usize) -> Vec<T> {
        let mut v = vec![T::zero(); self.n()];
        v[i] = T::one();
        v
    }

    pub fn to_f64(&self) -> FiniteHypergroup<f64> {
        FiniteHypergroup {
            conv: self.conv.to_f64(),
            identity: self.identity,
            involution: self.involution.clone(),
            scheme_derived: self.scheme_derived,
        }
    }
}

/// Checks, in order: nonnegativity and unit mass, the identity acting
/// trivially, the involution fixing `e` and being an involution,
/// `e in supp(delta_x * delta_y) iff y = x-bar`, the anti-homomorphism
/// `c[x][y][k] = c[y-bar][x-bar][k-bar]`, and associativity.
pub fn verify_hypergroup<T: Scalar>(h: &FiniteHypergroup<T>) -> Result<HypergroupReport, AxiomViolation> {
    let n = h.n();
    let e = h.identity;
    let inv = &h.involution;
    let c = |i: usize, j: usize, k: usize| &h.conv[(i, j, k)];
    let zero = T::zero();

    for i in 0..n {
        for j in 0..n {
            if let Some(k) = (0..n).find(|&k| *c(i, j, k) < zero && !c(i, j, k).is_near_zero(EQ_TOL)) {
                return Err(AxiomViolation::new(
                    Axiom::ProbabilityPreserving,
                    Witness::relations(i, j, k),
                    format!("negative coefficient {}", c(i, j, k)),
                ));
            }
            let mass = h.conv.fiber(i, j).iter().fold(T::zero(), |a, b| a + b.clone());
            if !mass.near(&T::one(), EQ_TOL) {
                return Err(AxiomViolation::new(
                    Axiom::ProbabilityPreserving,
                    Witness { i: Some(i), j: Some(j), ..Witness::default() },
                    format!("delta_{i} * delta_{j} has mass {mass}"),
                ));
            }
        }
    }

    for x in 0..n {
        for k in 0..n {
            let want = if k == x { T::one() } else { T::zero() };
            for (i, j) in [(x, e), (e, x)] {
                if !c(i, j, k).near(&want, EQ_TOL) {
                    return Err(AxiomViolation::new(
                        Axiom::HypergroupIdentity,
                        Witness::relations(i, j, k),
                        format!("c[{i}][{j}][{k}] = {}, expected {want}", c(i, j, k)),
                    ));
                }
            }
        }
    }

    if inv[e] != e {
        return Err(AxiomViolation::new(
            Axiom::InvolutionAntihom,
            Witness::relation(e),
            "the involution does not fix the identity",
        ));
    }
    if let Some(i) = (0..n).find(|&i| inv[inv[i]] != i) {
        return Err(AxiomViolation::new(
            Axiom::InvolutionAntihom,
            Witness::relation(i),
            "the involution is not of order two",
        ));
    }

    for x in 0..n {
        for y in 0..n {
            let positive = !c(x, y, e).is_near_zero(EQ_TOL) && *c(x, y, e) > zero;
            if positive != (y == inv[x]) {
                return Err(AxiomViolation::new(
                    Axiom::IdentityInSupport,
                    Witness::relations(x, y, e),
                    format!("c[{x}][{y}][e] = {} with x-bar = {}", c(x, y, e), inv[x]),
                ));
            }
        }
    }

    for x in 0..n {
        for y in 0..n {
            for k in 0..n {
                if !c(x, y, k).near(c(inv[y], inv[x], inv[k]), EQ_TOL) {
                    return Err(AxiomViolation::new(
                        Axiom::InvolutionAntihom,
                        Witness::relations(x, y, k),
                        format!(
                            "c[{x}][{y}][{k}] = {} but c[{}][{}][{}] = {}",
                            c(x, y, k),
                            inv[y],
                            inv[x],
                            inv[k],
                            c(inv[y], inv[x], inv[k])
                        ),
                    ));
                }
            }
        }
    }

    // (delta_i * delta_j) * delta_l against delta_i * (delta_j * delta_l).
    for i in 0..n {
        for j in 0..n {
            for l in 0..n {
                let lhs = h.convolve(h.conv.fiber(i, j), &h.delta(l));
                let rhs = h.convolve(&h.delta(i), h.conv.fiber(j, l));
                if let Some(k) = (0..n).find(|&k| !lhs[k].near(&rhs[k], EQ_TOL)) {
                    return Err(AxiomViolation::new(
                        Axiom::Associativity,
                        Witness::relations(i, j, k).with_l(l),
                        format!("(i*j)*l gives {} at {k}, i*(j*l) gives {}", lhs[k], rhs[k]),
                    ));
                }
            }
        }
    }

    Ok(HypergroupReport { commutative: h.is_commutative(), symmetric: h.is_symmetric() })
}

/// Haar weights `left(x) = 1 / (delta_{x-bar} * delta_x)({e})` and
/// `right(x) = 1 / (delta_x * delta_{x-bar})({e})`. Assumes a verified hypergroup.
pub fn haar<T: Scalar>(h: &FiniteHypergroup<T>) -> HaarWeights<T> {
    let n = h.n();
    let e = h.identity;
    let inv = &h.involution;
    let left: Vec<T> = (0..n).map(|x| T::one() / h.conv[(inv[x], x, e)].clone()).collect();
    let right: Vec<T> = (0..n).map(|x| T::one() / h.conv[(x, inv[x], e)].clone()).collect();
    let unimodular = left.iter().zip(&right).all(|(l, r)| l.near(r, EQ_TOL));
    let invariant = haar_invariance(h, &left, true) && haar_invariance(h, &right, false);
    HaarWeights { left, right, unimodular, invariant }
}

/// Direct summation check of translation invariance on singletons:
/// left: `sum_y w(y) c[x][y][k] = w(k)`; right: `sum_y w(y) c[y][x][k] = w(k)`.
pub fn haar_invariance<T: Scalar>(h: &FiniteHypergroup<T>, w: &[T], left: bool) -> bool {
    let n = h.n();
    let tol = EQ_TOL * w.iter().map(|v| v.abs_f64()).fold(1.0, f64::max);
    (0..n).all(|x| {
        (0..n).all(|k| {
            let s = (0..n).fold(T::zero(), |acc, y| {
                let c = if left { &h.conv[(x, y, k)] } else { &h.conv[(y, x, k)] };
                acc + w[y].clone() * c.clone()
            });
            s.near(&w[k], tol)
        })
    })
}

/// Deforms `h` by a positive semicharacter:
/// `c~[i][j][k] = alpha0(k) / (alpha0(i) alpha0(j)) c[i][j][k]`.
pub fn semicharacter_deform<T: Scalar>(h: &FiniteHypergroup<T>, alpha0: &[T]) -> Result<FiniteHypergroup<T>> {
    let n = h.n();
    if alpha0.len() != n {
        return Err(Error::invalid(format!("alpha0 has {} entries, expected {n}", alpha0.len())));
    }
    verify_hypergroup(h)?;
    let e = h.identity;
    let not_semi = |reason: String, residual: f64| Err(Error::NotASemicharacter { reason, residual });
    if let Some(i) = (0..n).find(|&i| alpha0[i] <= T::zero()) {
        return not_semi(format!("alpha0({i}) = {} is not positive", alpha0[i]), alpha0[i].abs_f64());
    }
    if !alpha0[e].near(&T::one(), EQ_TOL) {
        return not_semi("alpha0(e) != 1".into(), (alpha0[e].clone() - T::one()).abs_f64());
    }
    if let Some(i) = (0..n).find(|&i| !alpha0[i].near(&alpha0[h.involution[i]], EQ_TOL)) {
        let residual = (alpha0[i].clone() - alpha0[h.involution[i]].clone()).abs_f64();
        return not_semi(format!("alpha0 differs on {i} and its involute"), residual);
    }
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let rhs = (0..n).fold(T::zero(), |a, k| a + h.conv[(i, j, k)].clone() * alpha0[k].clone());
            let lhs = alpha0[i].clone() * alpha0[j].clone();
            let scale = lhs.abs_f64().max(1.0);
            if !lhs.near(&rhs, EQ_TOL * scale) {
                worst = worst.max((lhs - rhs).abs_f64());
            }
        }
    }
    if worst > 0.0 {
        return not_semi("multiplicativity fails".into(), worst);
    }
    let conv = Tensor3::from_fn(n, |i, j, k| {
        alpha0[k].clone() / (alpha0[i].clone() * alpha0[j].clone()) * h.conv[(i, j, k)].clone()
    });
    // A deformed scheme is again a (generalized) scheme, so the origin flag carries over.
    let deformed =
        FiniteHypergroup { conv, identity: e, involution: h.involution.clone(), scheme_derived: h.scheme_derived };
    verify_hypergroup(&deformed)?;
    Ok(deformed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;
    use crate::scheme::{from_double_cosets, verify_generalized, verify_scheme, FiniteGroup, RelationPartition};

    fn r(p: i64, q: i64) -> Rational {
        Rational::from_ratio(p, q)
    }

    pub(crate) fn k3() -> FiniteHypergroup<Rational> {
        let s = verify_scheme(&RelationPartition::from_fn(3, |x, y| usize::from(x != y)).unwrap()).unwrap();
        FiniteHypergroup::from_scheme(&s)
    }

    fn z4() -> FiniteHypergroup<Rational> {
        let (_, s) = from_double_cosets(&FiniteGroup::cyclic(4), &[0]).unwrap();
        FiniteHypergroup::from_scheme(&s)
    }

    #[test]
    fn k3_from_scheme() {
        let h = k3();
        assert_eq!(h.conv().fiber(1, 1), &[r(1, 2), r(1, 2)]);
        let rep = verify_hypergroup(&h).unwrap();
        assert!(rep.commutative && rep.symmetric);
        let w = haar(&h);
        assert_eq!(w.left, vec![r(1, 1), r(2, 1)]);
        assert_eq!(w.right, w.left);
        assert!(w.unimodular && w.invariant);
    }

    #[test]
    fn trivial_hypergroup() {
        let s = verify_scheme(&RelationPartition::new(vec![vec![0]]).unwrap()).unwrap();
        let h = FiniteHypergroup::<Rational>::from_scheme(&s);
        assert_eq!(h.c(0, 0, 0), &r(1, 1));
        verify_hypergroup(&h).unwrap();
        assert_eq!(haar(&h).left, vec![r(1, 1)]);
    }

    #[test]
    fn z4_is_the_group_algebra() {
        let h = z4();
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    let want = if k == (i + j) % 4 { r(1, 1) } else { r(0, 1) };
                    assert_eq!(h.c(i, j, k), &want);
                }
            }
        }
        assert!(haar(&h).left.iter().all(|w| *w == r(1, 1)));
    }

    #[test]
    fn from_generalized_matches_from_scheme() {
        let s = verify_scheme(&RelationPartition::from_fn(3, |x, y| usize::from(x != y)).unwrap()).unwrap();
        let gs = s.canonical_generalized::<Rational>().unwrap();
        let v = verify_generalized(&gs).unwrap();
        assert_eq!(FiniteHypergroup::from_generalized(&gs, &v), k3());

        let gs = GeneralizedScheme::new(
            RelationPartition::new(vec![vec![0]]).unwrap(),
            vec![DenseMatrix::identity(1)],
            vec![r(1, 1)],
        )
        .unwrap();
        let v = verify_generalized(&gs).unwrap();
        assert_eq!(FiniteHypergroup::from_generalized(&gs, &v).n(), 1);

        let (_, z) = from_double_cosets(&FiniteGroup::cyclic(4), &[0]).unwrap();
        let gs = z.canonical_generalized::<Rational>().unwrap();
        let v = verify_generalized(&gs).unwrap();
        assert_eq!(FiniteHypergroup::from_generalized(&gs, &v), z4());
    }

    #[test]
    fn missing_identity_in_support_is_axiom_three() {
        // delta_1 * delta_1 = delta_1 with 1-bar = 1.
        let conv = Tensor3::from_nested(vec![
            vec![vec![r(1, 1), r(0, 1)], vec![r(0, 1), r(1, 1)]],
            vec![vec![r(0, 1), r(1, 1)], vec![r(0, 1), r(1, 1)]],
        ])
        .unwrap();
        let h = FiniteHypergroup::new(conv, 0, vec![0, 1]).unwrap();
        let err = verify_hypergroup(&h).unwrap_err();
        assert_eq!(err.axiom, Axiom::IdentityInSupport);
        assert_eq!(err.witness.i, Some(1));
    }

    #[test]
    fn non_associative_tensor_is_caught() {
        // Identity and axiom (3) hold but the products do not associate.
        let n = 3;
        let mut conv = Tensor3::filled(n, 0.0);
        for x in 0..n {
            conv[(0, x, x)] = 1.0;
            conv[(x, 0, x)] = 1.0;
        }
        let rows = [
            ((1, 1), [0.5, 0.2, 0.3]),
            ((1, 2), [0.0, 0.9, 0.1]),
            ((2, 1), [0.0, 0.9, 0.1]),
            ((2, 2), [0.4, 0.1, 0.5]),
        ];
        for ((i, j), v) in rows {
            for k in 0..n {
                conv[(i, j, k)] = v[k];
            }
        }
        let h = FiniteHypergroup::new(conv, 0, vec![0, 1, 2]).unwrap();
        let err = verify_hypergroup(&h).unwrap_err();
        assert_eq!(err.axiom, Axiom::Associativity);
    }

    #[test]
    fn deformation_rejects_non_positive_and_non_multiplicative() {
        let h = k3();
        assert_eq!(semicharacter_deform(&h, &[r(1, 1), r(1, 1)]).unwrap(), h);
        assert!(matches!(semicharacter_deform(&h, &[r(1, 1), r(-1, 2)]), Err(Error::NotASemicharacter { .. })));
        assert!(matches!(semicharacter_deform(&h, &[r(1, 1), r(2, 1)]), Err(Error::NotASemicharacter { .. })));
    }

    #[test]
    fn deformation_rejects_truncated_tensor() {
        // Row sums below one: not a hypergroup, so not a valid input.
        let conv = Tensor3::from_nested(vec![
            vec![vec![1.0, 0.0], vec![0.0, 1.0]],
            vec![vec![0.0, 1.0], vec![1.0 / 3.0, 0.0]],
        ])
        .unwrap();
        let h = FiniteHypergroup::new(conv, 0, vec![0, 1]).unwrap();
        assert!(matches!(semicharacter_deform(&h, &[1.0, 1.0]), Err(Error::Axiom(_))));
    }
}
