use crate::error::{Axiom, AxiomViolation, Error, Result, Witness};
use crate::matrix::DenseMatrix;
use crate::scalar::{Scalar, EQ_TOL};
use crate::tensor::Tensor3;

use super::association::{verify_scheme, AssociationScheme};
use super::partition::RelationPartition;

/// A finite generalized association scheme: a relation partition carrying
/// one stochastic kernel per relation and a weight vector on the points.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralizedScheme<T> {
    partition: RelationPartition,
    kernels: Vec<DenseMatrix<T>>,
    omega_x: Vec<T>,
}

/// Result of a successful [`verify_generalized`].
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralizedVerification<T> {
    /// The underlying (counting) association scheme.
    pub scheme: AssociationScheme,
    /// Deformed intersection numbers: `S_i S_j = sum_k p[i][j][k] S_k`.
    pub p_tilde: Tensor3<T>,
}

impl<T: Scalar> GeneralizedScheme<T> {
    /// Checks shapes only; the axioms are checked by [`verify_generalized`].
    pub fn new(partition: RelationPartition, kernels: Vec<DenseMatrix<T>>, omega_x: Vec<T>) -> Result<Self> {
        let n = partition.n_points();
        if kernels.len() != partition.n_relations() {
            return Err(Error::invalid(format!(
                "{} kernels given for {} relations",
                kernels.len(),
                partition.n_relations()
            )));
        }
        if let Some(i) = kernels.iter().position(|k| k.rows() != n || k.cols() != n) {
            return Err(Error::invalid(format!("kernel {i} is not {n}x{n}")));
        }
        if omega_x.len() != n {
            return Err(Error::invalid(format!("omega_x has {} entries, expected {n}", omega_x.len())));
        }
        Ok(Self { partition, kernels, omega_x })
    }

    pub fn partition(&self) -> &RelationPartition {
        &self.partition
    }

    pub fn kernels(&self) -> &[DenseMatrix<T>] {
        &self.kernels
    }

    pub fn kernel(&self, i: usize) -> &DenseMatrix<T> {
        &self.kernels[i]
    }

    pub fn omega_x(&self) -> &[T] {
        &self.omega_x
    }

    pub fn n_points(&self) -> usize {
        self.partition.n_points()
    }

    pub fn n_relations(&self) -> usize {
        self.partition.n_relations()
    }

    pub fn to_f64(&self) -> GeneralizedScheme<f64> {
        GeneralizedScheme {
            partition: self.partition.clone(),
            kernels: self.kernels.iter().map(DenseMatrix::to_f64).collect(),
            omega_x: self.omega_x.iter().map(Scalar::to_f64).collect(),
        }
    }

    pub fn with_omega_x(mut self, omega_x: Vec<T>) -> Result<Self> {
        if omega_x.len() != self.n_points() {
            return Err(Error::invalid("omega_x has the wrong length"));
        }
        self.omega_x = omega_x;
        Ok(self)
    }
}

/// Checks the generalized scheme axioms and extracts the deformed
/// intersection numbers.
///
/// Checks run in the order: stochasticity, (1) counting, (4) identity,
/// (2) support, (5) adjoint relation, (3) span. Each coefficient
/// `p[i][j][k]` is read off the entry of `S_k` that is largest among pairs in
/// `R_k`, then the full identity `S_i S_j = sum_k p[i][j][k] S_k` is checked
/// entrywise.
pub fn verify_generalized<T: Scalar>(gs: &GeneralizedScheme<T>) -> Result<GeneralizedVerification<T>, AxiomViolation> {
    let n = gs.n_points();
    let r = gs.n_relations();
    let part = &gs.partition;
    let zero = T::zero();

    for (i, s) in gs.kernels.iter().enumerate() {
        for x in 0..n {
            if let Some(y) = (0..n).find(|&y| s[(x, y)] < zero) {
                return Err(AxiomViolation::new(
                    Axiom::Stochastic,
                    Witness::relation(i).with_pair(x, y),
                    format!("negative entry {}", s[(x, y)]),
                ));
            }
            let sum = s.row_sum(x);
            if !sum.near(&T::one(), EQ_TOL) {
                return Err(AxiomViolation::new(
                    Axiom::Stochastic,
                    Witness::relation(i).with_pair(x, x),
                    format!("row {x} sums to {sum}"),
                ));
            }
        }
    }

    let scheme = verify_scheme(part).map_err(|v| {
        if v.axiom == Axiom::Counting {
            AxiomViolation { axiom: Axiom::GeneralizedCounting, ..v }
        } else {
            v
        }
    })?;
    let inv = scheme.involution().to_vec();

    let e = part.identity_relation();
    if !gs.kernels[e].near(&DenseMatrix::identity(n), EQ_TOL) {
        let (x, y) = first_mismatch(&gs.kernels[e], &DenseMatrix::identity(n));
        return Err(AxiomViolation::new(
            Axiom::IdentityKernel,
            Witness::relation(e).with_pair(x, y),
            "identity kernel is not the identity matrix",
        ));
    }

    for (i, s) in gs.kernels.iter().enumerate() {
        for x in 0..n {
            for y in 0..n {
                let in_rel = part.label(x, y) == i;
                let ok = if in_rel { s[(x, y)] > zero } else { s[(x, y)].is_near_zero(EQ_TOL) };
                if !ok {
                    return Err(AxiomViolation::new(
                        Axiom::Support,
                        Witness::relation(i).with_pair(x, y),
                        format!(
                            "entry {} {} in relation {}",
                            s[(x, y)],
                            if in_rel { "is not positive" } else { "is nonzero outside" },
                            i
                        ),
                    ));
                }
            }
        }
    }

    if let Some(x) = (0..n).find(|&x| !(gs.omega_x[x] > zero)) {
        return Err(AxiomViolation::new(
            Axiom::Adjoint,
            Witness { x: Some(x), ..Witness::default() },
            "omega_x must be strictly positive",
        ));
    }
    for i in 0..r {
        let (s, sbar) = (&gs.kernels[i], &gs.kernels[inv[i]]);
        for x in 0..n {
            for y in 0..n {
                let lhs = gs.omega_x[y].clone() * sbar[(y, x)].clone();
                let rhs = gs.omega_x[x].clone() * s[(x, y)].clone();
                if !lhs.near(&rhs, EQ_TOL) {
                    return Err(AxiomViolation::new(
                        Axiom::Adjoint,
                        Witness::relation(i).with_pair(x, y),
                        format!("omega(y) S_bar(y,x) = {lhs} but omega(x) S(x,y) = {rhs}"),
                    ));
                }
            }
        }
    }

    // Representative pair per relation: the largest kernel entry.
    let reps: Vec<(usize, usize)> = (0..r)
        .map(|k| {
            let s = &gs.kernels[k];
            let mut best: Option<(usize, usize)> = None;
            for x in 0..n {
                for y in 0..n {
                    if part.label(x, y) == k && best.is_none_or(|(bx, by)| s[(x, y)] > s[(bx, by)]) {
                        best = Some((x, y));
                    }
                }
            }
            best.expect("relations are nonempty after verify_scheme")
        })
        .collect();

    let mut p_tilde = Tensor3::filled(r, T::zero());
    for i in 0..r {
        for j in 0..r {
            let prod = gs.kernels[i].matmul(&gs.kernels[j]);
            let mut combo = DenseMatrix::zeros(n, n);
            let mut total = T::zero();
            for k in 0..r {
                let (x, y) = reps[k];
                let coeff = prod[(x, y)].clone() / gs.kernels[k][(x, y)].clone();
                if coeff < zero && !coeff.is_near_zero(EQ_TOL) {
                    return Err(AxiomViolation::new(
                        Axiom::Span,
                        Witness::relations(i, j, k).with_pair(x, y),
                        format!("negative coefficient {coeff}"),
                    ));
                }
                combo.add_scaled(&coeff, &gs.kernels[k]);
                total = total + coeff.clone();
                p_tilde[(i, j, k)] = coeff;
            }
            if !combo.near(&prod, EQ_TOL) {
                let (x, y) = first_mismatch(&combo, &prod);
                return Err(AxiomViolation::new(
                    Axiom::Span,
                    Witness::relations(i, j, part.label(x, y)).with_pair(x, y),
                    format!("S_{i} S_{j} is not in the span of the kernels (residual {:e})", combo.max_abs_diff(&prod)),
                ));
            }
            if !total.near(&T::one(), EQ_TOL) {
                return Err(AxiomViolation::new(
                    Axiom::Span,
                    Witness { i: Some(i), j: Some(j), ..Witness::default() },
                    format!("coefficients sum to {total}"),
                ));
            }
        }
    }

    Ok(GeneralizedVerification { scheme, p_tilde })
}

fn first_mismatch<T: Scalar>(a: &DenseMatrix<T>, b: &DenseMatrix<T>) -> (usize, usize) {
    for x in 0..a.rows() {
        for y in 0..a.cols() {
            if !a[(x, y)].near(&b[(x, y)], EQ_TOL) {
                return (x, y);
            }
        }
    }
    (0, 0)
}

/// True iff every kernel equals the renormalized adjacency matrix `A_i / omega_i`
/// of the underlying scheme, entrywise within tolerance.
pub fn finite_rigidity_check<T: Scalar>(gs: &GeneralizedScheme<T>, verification: &GeneralizedVerification<T>) -> bool {
    (0..gs.n_relations()).all(|i| gs.kernels[i].near(&verification.scheme.stochastic::<T>(i), EQ_TOL))
}

impl<T: Scalar> GeneralizedVerification<T> {
    /// Left Haar weights `1 / p[i-bar][i][e]` of the associated hypergroup.
    pub fn left_haar(&self) -> Vec<T> {
        let inv = self.scheme.involution();
        (0..inv.len()).map(|i| T::one() / self.p_tilde[(inv[i], i, 0)].clone()).collect()
    }
}

/// Checks the translation properties for a verified generalized scheme.
///
/// (T1) is tested on indicators of single relations:
/// `sum_z S_h(y,z) [pi(x,z) = r]` must equal `p[pi(x,y)][h][r]`.
/// (T2) is tested through its reformulation: `sum_h omega_D(h) S_h(x, .)`
/// must be the same multiple of `omega_x` for every `x`, where `omega_D` is
/// the left Haar measure normalized at the identity.
pub fn translation_properties<T: Scalar>(
    gs: &GeneralizedScheme<T>,
    verification: &GeneralizedVerification<T>,
) -> (bool, bool) {
    let n = gs.n_points();
    let r = gs.n_relations();
    let part = &gs.partition;
    let c = &verification.p_tilde;

    let mut t1 = true;
    'outer: for x in 0..n {
        for y in 0..n {
            let k = part.label(x, y);
            for h in 0..r {
                let mut mass = vec![T::zero(); r];
                for z in 0..n {
                    let v = &gs.kernels[h][(y, z)];
                    if !v.is_zero() {
                        let rel = part.label(x, z);
                        mass[rel] = mass[rel].clone() + v.clone();
                    }
                }
                if (0..r).any(|rel| !mass[rel].near(&c[(k, h, rel)], EQ_TOL)) {
                    t1 = false;
                    break 'outer;
                }
            }
        }
    }

    let haar = verification.left_haar();
    let sums: Vec<Vec<T>> = (0..n)
        .map(|x| {
            (0..n)
                .map(|y| (0..r).fold(T::zero(), |acc, h| acc + haar[h].clone() * gs.kernels[h][(x, y)].clone()))
                .collect()
        })
        .collect();
    // Cross-multiplied proportionality against the (0,0) entry.
    let t2 = (0..n).all(|x| {
        (0..n).all(|y| {
            let lhs = sums[x][y].clone() * gs.omega_x[0].clone();
            let rhs = sums[0][0].clone() * gs.omega_x[y].clone();
            lhs.near(&rhs, EQ_TOL)
        })
    });
    (t1, t2)
}
