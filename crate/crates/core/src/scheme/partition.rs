use crate::error::{Axiom, AxiomViolation, Error, Result, Witness};

/// A labeling of `X x X` by relation indices; relation 0 is the identity
/// relation whenever the diagonal carries a single label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationPartition {
    n_points: usize,
    n_relations: usize,
    labels: Vec<usize>,
}

impl RelationPartition {
    /// Builds a partition from a square label matrix. The relation count is
    /// one more than the largest label. If the diagonal carries a single
    /// label `d != 0`, labels `d` and `0` are swapped.
    pub fn new(labels: Vec<Vec<usize>>) -> Result<Self> {
        let n_relations = labels.iter().flatten().copied().max().map_or(0, |m| m + 1);
        Self::with_relation_count(labels, n_relations)
    }

    /// Like [`RelationPartition::new`] but with an explicit relation count, so
    /// that unused indices can be reported by verification.
    pub fn with_relation_count(labels: Vec<Vec<usize>>, n_relations: usize) -> Result<Self> {
        let n_points = labels.len();
        if n_points == 0 {
            return Err(Error::invalid("empty point set"));
        }
        if let Some((r, row)) = labels.iter().enumerate().find(|(_, row)| row.len() != n_points) {
            return Err(Error::invalid(format!(
                "label matrix is not square: row {r} has {} entries, expected {n_points}",
                row.len()
            )));
        }
        let mut flat: Vec<usize> = labels.into_iter().flatten().collect();
        if let Some(bad) = flat.iter().find(|&&l| l >= n_relations) {
            return Err(Error::invalid(format!("label {bad} out of range 0..{n_relations}")));
        }
        let d = flat[0];
        if d != 0 && (0..n_points).all(|x| flat[x * n_points + x] == d) {
            for l in flat.iter_mut() {
                if *l == d {
                    *l = 0;
                } else if *l == 0 {
                    *l = d;
                }
            }
        }
        Ok(Self { n_points, n_relations, labels: flat })
    }

    /// Builds a partition from a labeling function.
    pub fn from_fn(n_points: usize, f: impl Fn(usize, usize) -> usize) -> Result<Self> {
        Self::new((0..n_points).map(|x| (0..n_points).map(|y| f(x, y)).collect()).collect())
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn n_relations(&self) -> usize {
        self.n_relations
    }

    pub fn identity_relation(&self) -> usize {
        0
    }

    #[inline]
    pub fn label(&self, x: usize, y: usize) -> usize {
        self.labels[x * self.n_points + y]
    }

    pub fn to_rows(&self) -> Vec<Vec<usize>> {
        self.labels.chunks(self.n_points).map(<[usize]>::to_vec).collect()
    }

    /// Checks that every relation occurs and that relation 0 is exactly the diagonal.
    pub fn check_basic(&self) -> Result<(), AxiomViolation> {
        let mut seen = vec![false; self.n_relations];
        for &l in &self.labels {
            seen[l] = true;
        }
        if let Some(i) = seen.iter().position(|s| !s) {
            return Err(AxiomViolation::new(
                Axiom::EmptyRelation,
                Witness::relation(i),
                format!("relation {i} is empty"),
            ));
        }
        for x in 0..self.n_points {
            for y in 0..self.n_points {
                let on_diag = x == y;
                let is_e = self.label(x, y) == 0;
                if on_diag != is_e {
                    return Err(AxiomViolation::new(
                        Axiom::Diagonal,
                        Witness::relation(self.label(x, y)).with_pair(x, y),
                        "identity relation must equal the diagonal",
                    ));
                }
            }
        }
        Ok(())
    }

    /// Recovers the involution from transposition: `i-bar := label(y, x)`
    /// for the first `(x, y)` in `R_i`, then checks it everywhere.
    pub fn involution(&self) -> Result<Vec<usize>, AxiomViolation> {
        let mut inv: Vec<Option<usize>> = vec![None; self.n_relations];
        for x in 0..self.n_points {
            for y in 0..self.n_points {
                let i = self.label(x, y);
                let t = self.label(y, x);
                match inv[i] {
                    None => inv[i] = Some(t),
                    Some(prev) if prev != t => {
                        return Err(AxiomViolation::new(
                            Axiom::Involution,
                            Witness::relation(i).with_pair(x, y),
                            format!("transpose of relation {i} meets relations {prev} and {t}"),
                        ));
                    }
                    _ => {}
                }
            }
        }
        let inv: Vec<usize> = inv
            .into_iter()
            .enumerate()
            .map(|(i, v)| {
                v.ok_or_else(|| AxiomViolation::new(Axiom::EmptyRelation, Witness::relation(i), "empty relation"))
            })
            .collect::<Result<_, _>>()?;
        for (i, &t) in inv.iter().enumerate() {
            if inv[t] != i {
                return Err(AxiomViolation::new(
                    Axiom::Involution,
                    Witness::relation(i),
                    format!("transpose map is not an involution: {i} -> {t} -> {}", inv[t]),
                ));
            }
        }
        Ok(inv)
    }

    /// Row-major product labeling on `X1 x X2` with relation `(i1, i2) -> i1 * n2 + i2`.
    pub fn product(&self, other: &Self) -> Self {
        let n2 = other.n_points;
        let r2 = other.n_relations;
        let n = self.n_points * n2;
        let mut labels = Vec::with_capacity(n * n);
        for x in 0..n {
            for y in 0..n {
                let l1 = self.label(x / n2, y / n2);
                let l2 = other.label(x % n2, y % n2);
                labels.push(l1 * r2 + l2);
            }
        }
        Self { n_points: n, n_relations: self.n_relations * r2, labels }
    }
}
