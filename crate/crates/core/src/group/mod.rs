//! Finite groups given by multiplication tables, and their representations
//! into the invertibles of a semisimple algebra.

mod representation;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tolerance::MAX_GROUP_ORDER;

pub use representation::{
    rep_defect, rep_distance, restrict_to_group, Representation, RepresentationDescriptor,
    RESTRICT_DEFECT_THRESHOLD,
};

/// Wire form: `{"order":6,"table":[[...],...]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GroupDescriptor {
    pub order: usize,
    pub table: Vec<Vec<usize>>,
}

/// A finite group of order at most 64, stored as its full Cayley table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GroupDescriptor", into = "GroupDescriptor")]
pub struct FiniteGroup {
    table: Vec<Vec<usize>>,
    identity: usize,
    inverse: Vec<usize>,
}

impl TryFrom<GroupDescriptor> for FiniteGroup {
    type Error = Error;

    fn try_from(desc: GroupDescriptor) -> Result<Self> {
        if desc.order != desc.table.len() {
            return Err(Error::InvalidGroup(format!(
                "declared order {} but table has {} rows",
                desc.order,
                desc.table.len()
            )));
        }
        FiniteGroup::from_table(desc.table)
    }
}

impl From<FiniteGroup> for GroupDescriptor {
    fn from(g: FiniteGroup) -> Self {
        GroupDescriptor { order: g.order(), table: g.table }
    }
}

impl FiniteGroup {
    /// Validates the table exhaustively: Latin square, two-sided identity,
    /// inverses and associativity on all triples.
    pub fn from_table(table: Vec<Vec<usize>>) -> Result<Self> {
        let n = table.len();
        if n == 0 {
            return Err(Error::InvalidGroup("empty table".into()));
        }
        if n > MAX_GROUP_ORDER {
            return Err(Error::GroupTooLarge { order: n, max: MAX_GROUP_ORDER });
        }
        if table.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidGroup("table is not square".into()));
        }
        if table.iter().flatten().any(|&x| x >= n) {
            return Err(Error::InvalidGroup("entry out of range".into()));
        }
        let mut seen = vec![false; n];
        for row in &table {
            seen.iter_mut().for_each(|s| *s = false);
            for &x in row {
                if std::mem::replace(&mut seen[x], true) {
                    return Err(Error::InvalidGroup("a row repeats an element".into()));
                }
            }
        }
        for c in 0..n {
            seen.iter_mut().for_each(|s| *s = false);
            for row in &table {
                if std::mem::replace(&mut seen[row[c]], true) {
                    return Err(Error::InvalidGroup("a column repeats an element".into()));
                }
            }
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|g| table[e][g] == g && table[g][e] == g))
            .ok_or_else(|| Error::InvalidGroup("no identity element".into()))?;
        for a in 0..n {
            for b in 0..n {
                let ab = table[a][b];
                for c in 0..n {
                    if table[ab][c] != table[a][table[b][c]] {
                        return Err(Error::InvalidGroup(format!(
                            "associativity fails on ({a}, {b}, {c})"
                        )));
                    }
                }
            }
        }
        let inverse = (0..n)
            .map(|g| (0..n).find(|&h| table[g][h] == identity).expect("Latin square"))
            .collect();
        Ok(FiniteGroup { table, identity, inverse })
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

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.order()
    }

    pub fn trivial() -> Self {
        Self::cyclic(1)
    }

    /// `Z/n` with `k` the class of `k`.
    pub fn cyclic(n: usize) -> Self {
        let table = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        Self::from_table(table).expect("cyclic table")
    }

    /// Symmetric group on `k <= 4` letters; elements are permutations in
    /// lexicographic order, composed as `(st)(x) = s(t(x))`.
    pub fn symmetric(k: usize) -> Result<Self> {
        if k == 0 || k > 4 {
            return Err(Error::InvalidGroup(format!("S_{k} is not a built-in group")));
        }
        let perms = permutations(k);
        Ok(Self::from_permutations(&perms))
    }

    /// Dihedral group of order `2m`: `r^a s^b` at index `a + m b`.
    pub fn dihedral(m: usize) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidGroup("dihedral group needs m >= 2".into()));
        }
        let n = 2 * m;
        let table = (0..n)
            .map(|x| {
                let (a1, b1) = (x % m, x / m);
                (0..n)
                    .map(|y| {
                        let (a2, b2) = (y % m, y / m);
                        // r^a1 s^b1 r^a2 s^b2 = r^(a1 +- a2) s^(b1 + b2)
                        let a = if b1 == 0 { (a1 + a2) % m } else { (a1 + m - a2) % m };
                        a + m * ((b1 + b2) % 2)
                    })
                    .collect()
            })
            .collect();
        Self::from_table(table)
    }

    /// Quaternion group `{1, i, j, k, -1, -i, -j, -k}` in that order.
    pub fn quaternion() -> Self {
        // unit quaternion products on the basis (1, i, j, k) with signs
        const UNIT: [[(usize, bool); 4]; 4] = [
            [(0, false), (1, false), (2, false), (3, false)],
            [(1, false), (0, true), (3, false), (2, true)],
            [(2, false), (3, true), (0, true), (1, false)],
            [(3, false), (2, false), (1, true), (0, true)],
        ];
        let table = (0..8)
            .map(|x| {
                (0..8)
                    .map(|y| {
                        let (u, neg_x) = (x % 4, x >= 4);
                        let (v, neg_y) = (y % 4, y >= 4);
                        let (w, neg) = UNIT[u][v];
                        w + 4 * usize::from(neg ^ neg_x ^ neg_y)
                    })
                    .collect()
            })
            .collect();
        Self::from_table(table).expect("quaternion table")
    }

    /// Built-in groups by short name: `trivial`, `Z<n>`, `S3`, `S4`, `D<m>`, `Q8`.
    pub fn builtin(name: &str) -> Result<Self> {
        let bad = || Error::InvalidGroup(format!("unknown built-in group {name:?}"));
        let parse = |s: &str| s.parse::<usize>().map_err(|_| bad());
        match name {
            "trivial" => Ok(Self::trivial()),
            "Q8" => Ok(Self::quaternion()),
            _ if name.starts_with('Z') || name.starts_with('C') => {
                let n = parse(&name[1..])?;
                if n == 0 || n > MAX_GROUP_ORDER {
                    return Err(bad());
                }
                Ok(Self::cyclic(n))
            }
            _ if name.starts_with('S') => Self::symmetric(parse(&name[1..])?),
            _ if name.starts_with('D') => Self::dihedral(parse(&name[1..])?),
            _ => Err(bad()),
        }
    }

    fn from_permutations(perms: &[Vec<usize>]) -> Self {
        let index = |p: &[usize]| perms.iter().position(|q| q == p).expect("closed");
        let table = perms
            .iter()
            .map(|s| {
                perms
                    .iter()
                    .map(|t| index(&t.iter().map(|&x| s[x]).collect::<Vec<_>>()))
                    .collect()
            })
            .collect();
        Self::from_table(table).expect("permutation table")
    }
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == k {
            out.push(prefix.clone());
            return;
        }
        for x in 0..k {
            if !prefix.contains(&x) {
                prefix.push(x);
                go(prefix, k, out);
                prefix.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), k, &mut out);
    out
}
