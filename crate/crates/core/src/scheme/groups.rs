//! Finite groups given by multiplication tables, and the double coset
//! association scheme `(G/H, G//H)`.

use crate::error::{Error, Result};

use super::association::{verify_scheme, AssociationScheme};
use super::partition::RelationPartition;

/// A finite group as a Cayley table: `table[a][b]` is the index of `a * b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    table: Vec<Vec<usize>>,
    identity: usize,
    inverse: Vec<usize>,
}

impl FiniteGroup {
    /// Validates a multiplication table: shape, closure, identity, inverses,
    /// and associativity by exhaustive triple scan.
    pub fn from_table(table: Vec<Vec<usize>>) -> Result<Self> {
        let n = table.len();
        if n == 0 {
            return Err(Error::NotAGroup("empty table".into()));
        }
        for (a, row) in table.iter().enumerate() {
            if row.len() != n {
                return Err(Error::NotAGroup(format!("row {a} has {} entries, expected {n}", row.len())));
            }
            if let Some(&b) = row.iter().find(|&&b| b >= n) {
                return Err(Error::NotAGroup(format!("entry {b} in row {a} is out of range")));
            }
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|a| table[e][a] == a && table[a][e] == a))
            .ok_or_else(|| Error::NotAGroup("no identity element".into()))?;
        let inverse = (0..n)
            .map(|a| {
                (0..n)
                    .find(|&b| table[a][b] == identity && table[b][a] == identity)
                    .ok_or_else(|| Error::NotAGroup(format!("element {a} has no inverse")))
            })
            .collect::<Result<Vec<_>>>()?;
        for a in 0..n {
            for b in 0..n {
                let ab = table[a][b];
                for c in 0..n {
                    if table[ab][c] != table[a][table[b][c]] {
                        return Err(Error::NotAGroup(format!("({a}*{b})*{c} != {a}*({b}*{c})")));
                    }
                }
            }
        }
        Ok(Self { table, identity, inverse })
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    /// The cyclic group `Z_n` with element `k` standing for `k mod n`.
    pub fn cyclic(n: usize) -> Self {
        let table = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        Self::from_table(table).expect("cyclic table is a group")
    }

    /// The symmetric group on `n` letters, elements in lexicographic order of
    /// their one-line notation (element 0 is the identity). Products compose
    /// right to left: `(a * b)(i) = a(b(i))`.
    pub fn symmetric(n: usize) -> (Self, Vec<Vec<usize>>) {
        let perms = permutations(n);
        let index = |p: &[usize]| perms.iter().position(|q| q == p).expect("closed");
        let table = perms
            .iter()
            .map(|a| perms.iter().map(|b| index(&b.iter().map(|&i| a[i]).collect::<Vec<_>>())).collect())
            .collect();
        (Self::from_table(table).expect("symmetric table is a group"), perms)
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                rec(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// Left cosets and double cosets of a subgroup, as sorted element lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CosetLabels {
    /// Points of `X = G/H`, ordered by smallest element.
    pub cosets: Vec<Vec<usize>>,
    /// Relations `D = H\G/H`; index 0 is `H` itself, the rest ordered by smallest element.
    pub double_cosets: Vec<Vec<usize>>,
}

/// Builds the association scheme on `G/H` whose relation between `xH` and
/// `yH` is the double coset `H x^{-1} y H`.
pub fn from_double_cosets(group: &FiniteGroup, subgroup: &[usize]) -> Result<(CosetLabels, AssociationScheme)> {
    let n = group.order();
    let mut h: Vec<usize> = subgroup.to_vec();
    h.sort_unstable();
    h.dedup();
    if h.len() != subgroup.len() {
        return Err(Error::NotASubgroup("repeated elements".into()));
    }
    if let Some(&a) = h.iter().find(|&&a| a >= n) {
        return Err(Error::NotASubgroup(format!("element {a} out of range")));
    }
    let mut in_h = vec![false; n];
    h.iter().for_each(|&a| in_h[a] = true);
    if !in_h[group.identity()] {
        return Err(Error::NotASubgroup("missing the identity".into()));
    }
    for &a in &h {
        if !in_h[group.inv(a)] {
            return Err(Error::NotASubgroup(format!("inverse of {a} missing")));
        }
        for &b in &h {
            if !in_h[group.mul(a, b)] {
                return Err(Error::NotASubgroup(format!("{a}*{b} not in the subset")));
            }
        }
    }

    let mut coset_of = vec![usize::MAX; n];
    let mut cosets: Vec<Vec<usize>> = Vec::new();
    for g in 0..n {
        if coset_of[g] == usize::MAX {
            let mut c: Vec<usize> = h.iter().map(|&s| group.mul(g, s)).collect();
            c.sort_unstable();
            for &m in &c {
                coset_of[m] = cosets.len();
            }
            cosets.push(c);
        }
    }

    let mut double_of = vec![usize::MAX; n];
    let mut double_cosets: Vec<Vec<usize>> = Vec::new();
    let mut seeds = vec![group.identity()];
    seeds.extend((0..n).filter(|&g| g != group.identity()));
    for g in seeds {
        if double_of[g] == usize::MAX {
            let mut d: Vec<usize> = h
                .iter()
                .flat_map(|&s| h.iter().map(move |&t| (s, t)))
                .map(|(s, t)| group.mul(group.mul(s, g), t))
                .collect();
            d.sort_unstable();
            d.dedup();
            for &m in &d {
                double_of[m] = double_cosets.len();
            }
            double_cosets.push(d);
        }
    }

    let reps: Vec<usize> = cosets.iter().map(|c| c[0]).collect();
    let labels: Vec<Vec<usize>> =
        reps.iter().map(|&x| reps.iter().map(|&y| double_of[group.mul(group.inv(x), y)]).collect()).collect();
    let partition = RelationPartition::with_relation_count(labels, double_cosets.len())?;
    let scheme = verify_scheme(&partition)?;
    Ok((CosetLabels { cosets, double_cosets }, scheme))
}
