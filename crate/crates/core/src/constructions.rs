//! Direct products and joins of finite hypergroups and of finite
//! generalized association schemes.

use serde::Serialize;

use crate::error::Result;
use crate::hypergroup::{haar, verify_hypergroup, FiniteHypergroup};
use crate::matrix::DenseMatrix;
use crate::scalar::Scalar;
use crate::scheme::{verify_generalized, GeneralizedScheme, RelationPartition};
use crate::tensor::Tensor3;

/// Row-major flattening of `D1 x D2`: `(i1, i2) -> i1 * n2 + i2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ProductIndex {
    pub n1: usize,
    pub n2: usize,
}

impl ProductIndex {
    pub fn len(&self) -> usize {
        self.n1 * self.n2
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn flat(&self, i1: usize, i2: usize) -> usize {
        i1 * self.n2 + i2
    }

    pub fn split(&self, k: usize) -> (usize, usize) {
        (k / self.n2, k % self.n2)
    }
}

/// Flattening of `D2 ⊔ (D1 \ {e1})`: the elements of `D2` keep their indices,
/// followed by `D1 \ {e1}` in increasing order. The identity is `e2`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct JoinIndex {
    pub n2: usize,
    /// Elements of `D1 \ {e1}` in flat order.
    pub discrete: Vec<usize>,
}

/// Where a flat join index lives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum JoinElement {
    /// An element of the compact factor `D2`.
    Compact(usize),
    /// A non-identity element of the discrete factor `D1`.
    Discrete(usize),
}

impl JoinIndex {
    fn new(n1: usize, e1: usize, n2: usize) -> Self {
        Self { n2, discrete: (0..n1).filter(|&i| i != e1).collect() }
    }

    pub fn len(&self) -> usize {
        self.n2 + self.discrete.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn from_compact(&self, i2: usize) -> usize {
        i2
    }

    /// Flat index of `i1 in D1`, or `None` for the identity `e1`.
    pub fn from_discrete(&self, i1: usize) -> Option<usize> {
        self.discrete.iter().position(|&d| d == i1).map(|p| self.n2 + p)
    }

    pub fn element(&self, k: usize) -> JoinElement {
        if k < self.n2 {
            JoinElement::Compact(k)
        } else {
            JoinElement::Discrete(self.discrete[k - self.n2])
        }
    }
}

/// A join together with its index layout and the normalizing constant applied
/// to the compact factor's measure.
#[derive(Debug, Clone, PartialEq)]
pub struct Joined<T, S> {
    pub result: S,
    pub index: JoinIndex,
    /// Total mass of the compact factor's measure before normalization.
    pub scale: T,
}

/// `delta_(i1,i2) * delta_(j1,j2) = (delta_i1 *1 delta_j1) x (delta_i2 *2 delta_j2)`.
pub fn direct_product<T: Scalar>(h1: &FiniteHypergroup<T>, h2: &FiniteHypergroup<T>) -> FiniteHypergroup<T> {
    let idx = ProductIndex { n1: h1.n(), n2: h2.n() };
    let conv = Tensor3::from_fn(idx.len(), |i, j, k| {
        let ((i1, i2), (j1, j2), (k1, k2)) = (idx.split(i), idx.split(j), idx.split(k));
        h1.c(i1, j1, k1).clone() * h2.c(i2, j2, k2).clone()
    });
    let involution = (0..idx.len())
        .map(|i| {
            let (i1, i2) = idx.split(i);
            idx.flat(h1.involution()[i1], h2.involution()[i2])
        })
        .collect();
    FiniteHypergroup::new(conv, idx.flat(h1.identity(), h2.identity()), involution)
        .expect("product of valid shapes")
        .with_scheme_derived(h1.is_scheme_derived() && h2.is_scheme_derived())
}

/// Product scheme on `X1 x X2` with kernels `K1_i1 (x) K2_i2` and
/// `omega_X = omega_X1 (x) omega_X2`.
pub fn direct_product_scheme<T: Scalar>(
    s1: &GeneralizedScheme<T>,
    s2: &GeneralizedScheme<T>,
) -> Result<GeneralizedScheme<T>> {
    let partition = s1.partition().product(s2.partition());
    let kernels = s1.kernels().iter().flat_map(|k1| s2.kernels().iter().map(move |k2| k1.kron(k2))).collect();
    let omega = s1.omega_x().iter().flat_map(|w1| s2.omega_x().iter().map(move |w2| w1.clone() * w2.clone())).collect();
    GeneralizedScheme::new(partition, kernels, omega)
}

fn normalized<T: Scalar>(w: &[T]) -> (Vec<T>, T) {
    let total = w.iter().fold(T::zero(), |a, b| a + b.clone());
    (w.iter().map(|v| v.clone() / total.clone()).collect(), total)
}

/// Join of a discrete factor `h1` with a compact factor `h2`.
///
/// Within `D2` the product is `*2`; within `D1 \ {e1}` it is `*1` with the
/// mass at `e1` spread over the normalized Haar measure of `h2`; a product of
/// an element of `D1 \ {e1}` with one of `D2` is the former.
pub fn join<T: Scalar>(h1: &FiniteHypergroup<T>, h2: &FiniteHypergroup<T>) -> Result<Joined<T, FiniteHypergroup<T>>> {
    verify_hypergroup(h1)?;
    verify_hypergroup(h2)?;
    let index = JoinIndex::new(h1.n(), h1.identity(), h2.n());
    let (omega2, scale) = normalized(&haar(h2).left);
    let e1 = h1.identity();
    let n = index.len();
    let conv = Tensor3::from_fn(n, |i, j, k| match (index.element(i), index.element(j), index.element(k)) {
        (JoinElement::Compact(x), JoinElement::Compact(y), JoinElement::Compact(z)) => h2.c(x, y, z).clone(),
        (JoinElement::Compact(_), JoinElement::Compact(_), JoinElement::Discrete(_)) => T::zero(),
        (JoinElement::Discrete(x), JoinElement::Discrete(y), JoinElement::Compact(z)) => {
            h1.c(x, y, e1).clone() * omega2[z].clone()
        }
        (JoinElement::Discrete(x), JoinElement::Discrete(y), JoinElement::Discrete(z)) => h1.c(x, y, z).clone(),
        (JoinElement::Discrete(x), JoinElement::Compact(_), JoinElement::Discrete(z))
        | (JoinElement::Compact(_), JoinElement::Discrete(x), JoinElement::Discrete(z)) => {
            if x == z {
                T::one()
            } else {
                T::zero()
            }
        }
        _ => T::zero(),
    });
    let involution = (0..n)
        .map(|i| match index.element(i) {
            JoinElement::Compact(x) => h2.involution()[x],
            JoinElement::Discrete(x) => index.from_discrete(h1.involution()[x]).expect("involution fixes e1 only"),
        })
        .collect();
    let result = FiniteHypergroup::new(conv, h2.identity(), involution)?
        .with_scheme_derived(h1.is_scheme_derived() && h2.is_scheme_derived());
    verify_hypergroup(&result)?;
    Ok(Joined { result, index, scale })
}

/// Join of generalized schemes on `X1 x X2`: `K_h = I (x) K2_h` for `h in D2`
/// and `K_h = K1_h (x) (1 omega2^T)` for `h in D1 \ {e1}`, with `omega2` the
/// normalized weight of `X2`. Relations are indexed as in [`join`].
pub fn join_scheme<T: Scalar>(
    s1: &GeneralizedScheme<T>,
    s2: &GeneralizedScheme<T>,
) -> Result<Joined<T, GeneralizedScheme<T>>> {
    let v1 = verify_generalized(s1)?;
    verify_generalized(s2)?;
    let e1 = v1.scheme.partition().identity_relation();
    let index = JoinIndex::new(s1.n_relations(), e1, s2.n_relations());
    let (n1, n2) = (s1.n_points(), s2.n_points());
    let pidx = ProductIndex { n1, n2 };
    let (omega2, scale) = normalized(s2.omega_x());

    let labels: Vec<Vec<usize>> = (0..pidx.len())
        .map(|x| {
            let (x1, x2) = pidx.split(x);
            (0..pidx.len())
                .map(|y| {
                    let (y1, y2) = pidx.split(y);
                    if x1 == y1 {
                        index.from_compact(s2.partition().label(x2, y2))
                    } else {
                        index.from_discrete(s1.partition().label(x1, y1)).expect("off-diagonal label")
                    }
                })
                .collect()
        })
        .collect();
    let partition = RelationPartition::with_relation_count(labels, index.len())?;

    let spread = DenseMatrix::from_fn(n2, n2, |_, y| omega2[y].clone());
    let kernels = (0..index.len())
        .map(|h| match index.element(h) {
            JoinElement::Compact(h2) => DenseMatrix::<T>::identity(n1).kron(s2.kernel(h2)),
            JoinElement::Discrete(h1) => s1.kernel(h1).kron(&spread),
        })
        .collect();
    let omega = s1.omega_x().iter().flat_map(|w1| omega2.iter().map(move |w2| w1.clone() * w2.clone())).collect();
    let result = GeneralizedScheme::new(partition, kernels, omega)?;
    Ok(Joined { result, index, scale })
}
