use crate::error::{Axiom, AxiomViolation, Error, Result, Witness};
use crate::matrix::DenseMatrix;
use crate::scalar::{Rational, Scalar};
use crate::tensor::Tensor3;

use super::generalized::GeneralizedScheme;
use super::partition::RelationPartition;

/// A verified finite association scheme with its intersection numbers.
#[derive(Debug, Clone, PartialEq)]
pub struct AssociationScheme {
    partition: RelationPartition,
    involution: Vec<usize>,
    p: Tensor3<u64>,
    valency: Vec<u64>,
}

/// Checks the association scheme axioms on `partition` and computes the
/// involution, the intersection numbers `p[i][j][k]`, and the valencies.
pub fn verify_scheme(partition: &RelationPartition) -> Result<AssociationScheme, AxiomViolation> {
    partition.check_basic()?;
    let n = partition.n_points();
    let r = partition.n_relations();

    // p[i][j][k] together with the pair it was first read from.
    let mut p = Tensor3::filled(r, 0u64);
    let mut reference: Vec<Option<(usize, usize)>> = vec![None; r];
    let mut counts = vec![0u64; r * r];
    for x in 0..n {
        for y in 0..n {
            let k = partition.label(x, y);
            counts.iter_mut().for_each(|c| *c = 0);
            for z in 0..n {
                counts[partition.label(x, z) * r + partition.label(z, y)] += 1;
            }
            match reference[k] {
                None => {
                    for i in 0..r {
                        for j in 0..r {
                            p[(i, j, k)] = counts[i * r + j];
                        }
                    }
                    reference[k] = Some((x, y));
                }
                Some((xr, yr)) => {
                    for i in 0..r {
                        for j in 0..r {
                            if p[(i, j, k)] != counts[i * r + j] {
                                return Err(AxiomViolation::new(
                                    Axiom::Counting,
                                    Witness::relations(i, j, k).with_pair(x, y).with_reference(xr, yr),
                                    format!(
                                        "p_{{{i},{j}}}^{k} is {} at ({x},{y}) but {} at ({xr},{yr})",
                                        counts[i * r + j],
                                        p[(i, j, k)]
                                    ),
                                ));
                            }
                        }
                    }
                }
            }
        }
    }

    let involution = partition.involution()?;
    let valency: Vec<u64> = (0..r).map(|i| p[(i, involution[i], 0)]).collect();
    for x in 0..n {
        let mut row = vec![0u64; r];
        for y in 0..n {
            row[partition.label(x, y)] += 1;
        }
        if let Some(i) = (0..r).find(|&i| row[i] != valency[i]) {
            return Err(AxiomViolation::new(
                Axiom::Counting,
                Witness::relation(i).with_pair(x, x),
                format!("row {x} meets relation {i} {} times, valency is {}", row[i], valency[i]),
            ));
        }
    }

    Ok(AssociationScheme { partition: partition.clone(), involution, p, valency })
}

impl AssociationScheme {
    pub fn partition(&self) -> &RelationPartition {
        &self.partition
    }

    pub fn n_points(&self) -> usize {
        self.partition.n_points()
    }

    pub fn n_relations(&self) -> usize {
        self.partition.n_relations()
    }

    pub fn involution(&self) -> &[usize] {
        &self.involution
    }

    /// Intersection number `p_{i,j}^k`.
    pub fn p(&self, i: usize, j: usize, k: usize) -> u64 {
        self.p[(i, j, k)]
    }

    pub fn intersection_numbers(&self) -> &Tensor3<u64> {
        &self.p
    }

    pub fn valency(&self, i: usize) -> u64 {
        self.valency[i]
    }

    pub fn valencies(&self) -> &[u64] {
        &self.valency
    }

    pub fn is_commutative(&self) -> bool {
        let r = self.n_relations();
        (0..r).all(|i| (0..r).all(|j| (0..r).all(|k| self.p(i, j, k) == self.p(j, i, k))))
    }

    pub fn is_symmetric(&self) -> bool {
        self.involution.iter().enumerate().all(|(i, &t)| i == t)
    }

    pub fn is_unimodular(&self) -> bool {
        (0..self.n_relations()).all(|i| self.valency[i] == self.valency[self.involution[i]])
    }

    /// Adjacency matrix `A_i` of relation `i`.
    pub fn adjacency<T: Scalar>(&self, i: usize) -> DenseMatrix<T> {
        let n = self.n_points();
        DenseMatrix::from_fn(n, n, |x, y| if self.partition.label(x, y) == i { T::one() } else { T::zero() })
    }

    /// Renormalized adjacency matrix `S_i = A_i / omega_i`.
    pub fn stochastic<T: Scalar>(&self, i: usize) -> DenseMatrix<T> {
        let w = T::from_int(self.valency[i] as i64);
        let n = self.n_points();
        DenseMatrix::from_fn(
            n,
            n,
            |x, y| {
                if self.partition.label(x, y) == i {
                    T::one() / w.clone()
                } else {
                    T::zero()
                }
            },
        )
    }

    /// The canonical convolution coefficient `(omega_k / (omega_i omega_j)) p_{i,j}^k`.
    pub fn canonical_coefficient(&self, i: usize, j: usize, k: usize) -> Rational {
        let w = |t: usize| self.valency[t] as i64;
        Rational::from_ratio(self.p(i, j, k) as i64 * w(k), w(i) * w(j))
    }

    pub fn require_unimodular(&self) -> Result<()> {
        match (0..self.n_relations()).find(|&i| self.valency[i] != self.valency[self.involution[i]]) {
            Some(relation) => Err(Error::NotUnimodular { relation }),
            None => Ok(()),
        }
    }

    /// The generalized scheme `(S_i)` with counting measure on `X`.
    pub fn canonical_generalized<T: Scalar>(&self) -> Result<GeneralizedScheme<T>> {
        self.require_unimodular()?;
        let kernels = (0..self.n_relations()).map(|i| self.stochastic(i)).collect();
        GeneralizedScheme::new(self.partition.clone(), kernels, vec![T::one(); self.n_points()])
    }

    /// Checks the translation properties (T1) and (T2) of the associated
    /// strong scheme exactly, over indicator functions of single relations.
    pub fn translation_property_check(&self) -> Result<(bool, bool)> {
        self.require_unimodular()?;
        let n = self.n_points();
        let r = self.n_relations();
        let lab = |x: usize, y: usize| self.partition.label(x, y);

        // (T1): T_h(1_r o pi_x)(y) = |{z : pi(x,z)=r, pi(y,z)=h}| / omega_h
        //       must equal (delta_{pi(x,y)} * delta_h)({r}).
        let mut t1 = true;
        let mut counts = vec![0i64; r * r];
        'outer: for x in 0..n {
            for y in 0..n {
                counts.iter_mut().for_each(|c| *c = 0);
                for z in 0..n {
                    counts[lab(x, z) * r + lab(y, z)] += 1;
                }
                let k = lab(x, y);
                for rel in 0..r {
                    for h in 0..r {
                        let lhs = Rational::from_ratio(counts[rel * r + h], self.valency[h] as i64);
                        if lhs != self.canonical_coefficient(k, h, rel) {
                            t1 = false;
                            break 'outer;
                        }
                    }
                }
            }
        }

        // (T2) via its reformulation: sum_h omega_h S_h(x, .) is the counting measure.
        let t2 = (0..n).all(|x| {
            (0..n).all(|y| {
                let total: Rational = (0..r)
                    .map(|h| {
                        let s = if lab(x, y) == h {
                            Rational::from_ratio(1, self.valency[h] as i64)
                        } else {
                            Rational::from_int(0)
                        };
                        Rational::from_int(self.valency[h] as i64) * s
                    })
                    .fold(Rational::from_int(0), |a, b| a + b);
                total == Rational::from_int(1)
            })
        });
        Ok((t1, t2))
    }
}
