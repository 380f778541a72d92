//! Exact arithmetic in the two supported group families:
//! lattice semidirect products `Z^n ⋊ F` with `F` finite, and the discrete
//! Heisenberg group `(Z^3, *)` with `(x,y,z)(x',y',z') = (x+x', y+y', z+z'+xy')`.

pub mod finite;
pub mod lattice;
mod subgroup;

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{ChainError, Result};
pub use finite::FiniteGroupTable;
pub use lattice::{IntMatrix, Lattice};
pub use subgroup::{CosetKey, HeisenbergSubgroup, LatticeSubgroup, SubgroupData};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    LatticeSemidirect,
    Heisenberg,
}

/// A group element. Integers are arbitrary precision.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GroupElement {
    /// `(v, f)` with `v` in `Z^n` and `f` an index into the finite table.
    Lattice { v: Vec<BigInt>, f: usize },
    Heisenberg { x: BigInt, y: BigInt, z: BigInt },
}

impl GroupElement {
    pub fn lattice<T: Into<BigInt> + Copy>(v: &[T], f: usize) -> Self {
        GroupElement::Lattice {
            v: v.iter().map(|&x| x.into()).collect(),
            f,
        }
    }

    pub fn heisenberg(x: impl Into<BigInt>, y: impl Into<BigInt>, z: impl Into<BigInt>) -> Self {
        GroupElement::Heisenberg {
            x: x.into(),
            y: y.into(),
            z: z.into(),
        }
    }

    pub fn family(&self) -> Family {
        match self {
            GroupElement::Lattice { .. } => Family::LatticeSemidirect,
            GroupElement::Heisenberg { .. } => Family::Heisenberg,
        }
    }
}

impl fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupElement::Lattice { v, f: fin } => {
                write!(f, "(")?;
                for (i, x) in v.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{x}")?;
                }
                write!(f, "; f{fin})")
            }
            GroupElement::Heisenberg { x, y, z } => write!(f, "({x},{y},{z})"),
        }
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug)]
enum Kind {
    Lattice {
        rank: usize,
        finite: FiniteGroupTable,
        action: Vec<IntMatrix>,
    },
    Heisenberg,
}

#[derive(Debug)]
struct Inner {
    kind: Kind,
    generators: Vec<GroupElement>,
    generator_names: Vec<String>,
}

/// A finitely generated group from one of the supported families, with a
/// fixed ordered generating set. Cheap to clone.
#[derive(Clone, Debug)]
pub struct GroupContext(Arc<Inner>);

impl PartialEq for GroupContext {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || match (&self.0.kind, &other.0.kind) {
                (Kind::Heisenberg, Kind::Heisenberg) => true,
                (
                    Kind::Lattice { rank: r1, finite: f1, action: a1 },
                    Kind::Lattice { rank: r2, finite: f2, action: a2 },
                ) => r1 == r2 && f1 == f2 && a1 == a2,
                _ => false,
            }
    }
}

impl GroupContext {
    /// `Z^rank ⋊ F` where `F` acts through `action[f]`. The generating set is
    /// the standard lattice basis followed by the table's generators.
    pub fn lattice_semidirect(rank: usize, finite: FiniteGroupTable, action: Vec<IntMatrix>) -> Result<Self> {
        if rank == 0 {
            return Err(ChainError::validation("lattice rank must be positive"));
        }
        let order = finite.order();
        if action.len() != order {
            return Err(ChainError::validation(format!(
                "expected {order} action matrices, got {}",
                action.len()
            )));
        }
        for (f, m) in action.iter().enumerate() {
            if m.rows() != rank || m.cols() != rank {
                return Err(ChainError::validation(format!("action of {} is not {rank}x{rank}", finite.name(f))));
            }
            if m.det().abs() != BigInt::one() {
                return Err(ChainError::validation(format!(
                    "action of {} does not have determinant ±1",
                    finite.name(f)
                )));
            }
        }
        for a in 0..order {
            for b in 0..order {
                if action[finite.mul(a, b)] != action[a].mul(&action[b]) {
                    return Err(ChainError::validation(format!(
                        "action is not a homomorphism at ({}, {})",
                        finite.name(a),
                        finite.name(b)
                    )));
                }
            }
        }
        let mut generators = Vec::new();
        let mut names = Vec::new();
        for j in 0..rank {
            let mut v = vec![BigInt::zero(); rank];
            v[j] = BigInt::one();
            generators.push(GroupElement::Lattice { v, f: 0 });
            names.push(if rank == 1 { "a".to_string() } else { format!("x{}", j + 1) });
        }
        for (k, &g) in finite.generators().iter().enumerate() {
            generators.push(GroupElement::Lattice {
                v: vec![BigInt::zero(); rank],
                f: g,
            });
            names.push(if finite.generators().len() == 1 && rank == 1 {
                "b".to_string()
            } else {
                format!("s{}", k + 1)
            });
        }
        Ok(GroupContext(Arc::new(Inner {
            kind: Kind::Lattice { rank, finite, action },
            generators,
            generator_names: names,
        })))
    }

    /// `Z^rank ⋊ F` with the trivial action (a direct product).
    pub fn direct_product(rank: usize, finite: FiniteGroupTable) -> Result<Self> {
        let action = vec![IntMatrix::identity(rank); finite.order()];
        Self::lattice_semidirect(rank, finite, action)
    }

    /// `Z^n ⋊ F` where `F` is a permutation group on `n` points acting by
    /// permuting coordinates.
    pub fn permutation_semidirect(finite: FiniteGroupTable) -> Result<Self> {
        let n = finite
            .degree()
            .ok_or_else(|| ChainError::validation("finite group is not given by permutations"))?;
        let action = (0..finite.order())
            .map(|f| permutation_matrix(finite.permutation(f).unwrap()))
            .collect();
        Self::lattice_semidirect(n, finite, action)
    }

    /// The discrete Heisenberg group with generators `x = (1,0,0)`, `y = (0,1,0)`.
    pub fn heisenberg() -> Self {
        GroupContext(Arc::new(Inner {
            kind: Kind::Heisenberg,
            generators: vec![GroupElement::heisenberg(1, 0, 0), GroupElement::heisenberg(0, 1, 0)],
            generator_names: vec!["x".into(), "y".into()],
        }))
    }

    pub fn family(&self) -> Family {
        match self.0.kind {
            Kind::Lattice { .. } => Family::LatticeSemidirect,
            Kind::Heisenberg => Family::Heisenberg,
        }
    }

    /// Lattice rank; 2 for the Heisenberg group (the `(x, y)` plane).
    pub fn rank(&self) -> usize {
        match &self.0.kind {
            Kind::Lattice { rank, .. } => *rank,
            Kind::Heisenberg => 2,
        }
    }

    pub fn finite(&self) -> Option<&FiniteGroupTable> {
        match &self.0.kind {
            Kind::Lattice { finite, .. } => Some(finite),
            Kind::Heisenberg => None,
        }
    }

    pub fn action(&self, f: usize) -> Option<&IntMatrix> {
        match &self.0.kind {
            Kind::Lattice { action, .. } => action.get(f),
            Kind::Heisenberg => None,
        }
    }

    pub fn generators(&self) -> &[GroupElement] {
        &self.0.generators
    }

    pub fn generator_names(&self) -> &[String] {
        &self.0.generator_names
    }

    pub fn identity(&self) -> GroupElement {
        match &self.0.kind {
            Kind::Lattice { rank, .. } => GroupElement::Lattice {
                v: vec![BigInt::zero(); *rank],
                f: 0,
            },
            Kind::Heisenberg => GroupElement::heisenberg(0, 0, 0),
        }
    }

    /// Fails when `g` does not belong to this context's family and rank.
    pub fn check(&self, g: &GroupElement) -> Result<()> {
        match (&self.0.kind, g) {
            (Kind::Lattice { rank, finite, .. }, GroupElement::Lattice { v, f }) => {
                if v.len() != *rank {
                    Err(ChainError::structure(format!(
                        "element has lattice part of length {}, context rank is {rank}",
                        v.len()
                    )))
                } else if *f >= finite.order() {
                    Err(ChainError::structure(format!("finite index {f} out of range")))
                } else {
                    Ok(())
                }
            }
            (Kind::Heisenberg, GroupElement::Heisenberg { .. }) => Ok(()),
            _ => Err(ChainError::structure(format!(
                "element of family {:?} used in a {:?} context",
                g.family(),
                self.family()
            ))),
        }
    }

    pub fn multiply(&self, g: &GroupElement, h: &GroupElement) -> Result<GroupElement> {
        self.check(g)?;
        self.check(h)?;
        Ok(self.mul(g, h))
    }

    pub fn inverse(&self, g: &GroupElement) -> Result<GroupElement> {
        self.check(g)?;
        Ok(self.inv(g))
    }

    /// Unchecked product; callers guarantee both elements belong here.
    pub(crate) fn mul(&self, g: &GroupElement, h: &GroupElement) -> GroupElement {
        match (&self.0.kind, g, h) {
            (Kind::Lattice { finite, action, .. }, GroupElement::Lattice { v, f }, GroupElement::Lattice { v: w, f: f2 }) => {
                let aw = action[*f].mul_vec(w);
                GroupElement::Lattice {
                    v: v.iter().zip(aw).map(|(a, b)| a + b).collect(),
                    f: finite.mul(*f, *f2),
                }
            }
            (
                Kind::Heisenberg,
                GroupElement::Heisenberg { x, y, z },
                GroupElement::Heisenberg { x: x2, y: y2, z: z2 },
            ) => GroupElement::Heisenberg {
                x: x + x2,
                y: y + y2,
                z: z + z2 + x * y2,
            },
            _ => panic!("element family does not match context"),
        }
    }

    pub(crate) fn inv(&self, g: &GroupElement) -> GroupElement {
        match (&self.0.kind, g) {
            (Kind::Lattice { finite, action, .. }, GroupElement::Lattice { v, f }) => {
                let fi = finite.inv(*f);
                GroupElement::Lattice {
                    v: action[fi].mul_vec(v).into_iter().map(|x| -x).collect(),
                    f: fi,
                }
            }
            (Kind::Heisenberg, GroupElement::Heisenberg { x, y, z }) => GroupElement::Heisenberg {
                x: -x,
                y: -y,
                z: x * y - z,
            },
            _ => panic!("element family does not match context"),
        }
    }

    /// `g^n` for any integer `n`.
    pub fn power(&self, g: &GroupElement, n: &BigInt) -> GroupElement {
        if let GroupElement::Heisenberg { x, y, z } = g {
            let tri: BigInt = (n * (n - 1u32)) / 2u32;
            return GroupElement::Heisenberg {
                x: n * x,
                y: n * y,
                z: n * z + x * y * tri,
            };
        }
        let base = if n.is_negative() { self.inv(g) } else { g.clone() };
        let mut e = n.abs();
        let mut acc = self.identity();
        let mut sq = base;
        while !e.is_zero() {
            if e.is_odd() {
                acc = self.mul(&acc, &sq);
            }
            sq = self.mul(&sq, &sq);
            e >>= 1;
        }
        acc
    }

    /// `g h g^-1`.
    pub fn conjugate(&self, g: &GroupElement, h: &GroupElement) -> GroupElement {
        self.mul(&self.mul(g, h), &self.inv(g))
    }

    /// Evaluate a word of generator indices (leftmost letter applied last).
    pub fn eval_word(&self, word: &[usize]) -> GroupElement {
        word.iter()
            .fold(self.identity(), |acc, &s| self.mul(&acc, &self.0.generators[s]))
    }

    /// Runs of a letter become powers: `[0, 0, 1]` renders as `a^2 b`.
    pub fn render_word(&self, word: &[usize]) -> String {
        if word.is_empty() {
            return "e".to_string();
        }
        let mut parts: Vec<String> = Vec::new();
        let mut k = 0;
        while k < word.len() {
            let run = word[k..].iter().take_while(|&&s| s == word[k]).count();
            let name = &self.0.generator_names[word[k]];
            parts.push(if run == 1 { name.clone() } else { format!("{name}^{run}") });
            k += run;
        }
        parts.join(" ")
    }

    pub fn is_identity(&self, g: &GroupElement) -> bool {
        *g == self.identity()
    }
}

pub fn permutation_matrix(p: &[usize]) -> IntMatrix {
    let n = p.len();
    let mut m = IntMatrix::zeros(n, n);
    for (j, &i) in p.iter().enumerate() {
        m[(i, j)] = BigInt::one();
    }
    m
}
