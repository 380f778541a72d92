//! Finite-index subgroups in canonical form.
//!
//! Lattice family: `H = {(v_k + L w, k) : k in K, w in Z^n}` with `L` in
//! Hermite normal form and `v_k` reduced modulo `L`.
//!
//! Heisenberg family: `H` projects onto a lattice `Λ ⊂ Z^2` with normal-form
//! columns `c1, c2`, meets the center in `mZ`, and contains the sections
//! `s1 = (c1, t1)`, `s2 = (c2, t2)` with `0 <= t1, t2 < m`. With `t1 = t2 = 0`
//! this is exactly `MZ^2 × mZ` whenever that set is a subgroup.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;
use std::hash::{Hash, Hasher};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::{Serialize, Serializer};

use super::{GroupContext, GroupElement, IntMatrix, Kind, Lattice};
use crate::error::{ChainError, Result};
use crate::groups::lattice::hermite_reduce;

/// Canonical label of a left coset `gH`; equal labels iff equal cosets.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CosetKey {
    Lattice(usize, Vec<BigInt>),
    Heisenberg(BigInt, BigInt, BigInt),
}

#[derive(Clone)]
pub struct LatticeSubgroup {
    lattice: Lattice,
    finite: Vec<usize>,
    translations: Vec<Vec<BigInt>>,
    // A(f) L for every f in F, used for coset labels.
    images: Vec<Lattice>,
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct HeisenbergSubgroup {
    lattice: Lattice,
    center: BigInt,
    twist: [BigInt; 2],
}

/// A finite-index subgroup with a membership test and a finite generating set.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum SubgroupData {
    Lattice(LatticeSubgroup),
    Heisenberg(HeisenbergSubgroup),
}

impl PartialEq for LatticeSubgroup {
    fn eq(&self, other: &Self) -> bool {
        self.lattice == other.lattice && self.finite == other.finite && self.translations == other.translations
    }
}
impl Eq for LatticeSubgroup {}
impl Hash for LatticeSubgroup {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.lattice.hash(state);
        self.finite.hash(state);
        self.translations.hash(state);
    }
}

impl LatticeSubgroup {
    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    /// Sorted finite parts `K`.
    pub fn finite_part(&self) -> &[usize] {
        &self.finite
    }

    pub fn translation(&self, k: usize) -> Option<&[BigInt]> {
        self.finite.binary_search(&k).ok().map(|i| self.translations[i].as_slice())
    }
}

impl HeisenbergSubgroup {
    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn center(&self) -> &BigInt {
        &self.center
    }

    pub fn twist(&self) -> &[BigInt; 2] {
        &self.twist
    }

    fn sections(&self) -> [GroupElement; 2] {
        let b = self.lattice.basis();
        [
            GroupElement::Heisenberg {
                x: b[(0, 0)].clone(),
                y: b[(1, 0)].clone(),
                z: self.twist[0].clone(),
            },
            GroupElement::Heisenberg {
                x: b[(0, 1)].clone(),
                y: b[(1, 1)].clone(),
                z: self.twist[1].clone(),
            },
        ]
    }

    /// z-coordinate of `s1^a s2^b`, the canonical element over lattice coordinates `(a, b)`.
    fn section_height(&self, ctx: &GroupContext, coords: &[BigInt]) -> BigInt {
        let [s1, s2] = self.sections();
        let e = ctx.mul(&ctx.power(&s1, &coords[0]), &ctx.power(&s2, &coords[1]));
        match e {
            GroupElement::Heisenberg { z, .. } => z,
            _ => unreachable!(),
        }
    }
}

impl SubgroupData {
    /// Lattice-family subgroup `{(v_k + L w, k)}`. `translations[j]` belongs to
    /// `finite[j]`. Closure is checked.
    pub fn lattice(
        ctx: &GroupContext,
        lattice: Lattice,
        finite: Vec<usize>,
        translations: Vec<Vec<BigInt>>,
    ) -> Result<Self> {
        let Kind::Lattice { rank, finite: table, action } = &ctx.0.kind else {
            return Err(ChainError::structure("lattice subgroup in a Heisenberg context"));
        };
        if lattice.rank() != *rank {
            return Err(ChainError::structure("subgroup lattice rank differs from context rank"));
        }
        if finite.len() != translations.len() {
            return Err(ChainError::validation("one translation vector per finite element is required"));
        }
        if finite.iter().any(|&k| k >= table.order()) || translations.iter().any(|v| v.len() != *rank) {
            return Err(ChainError::structure("finite index or translation length out of range"));
        }
        let mut pairs: Vec<(usize, Vec<BigInt>)> = finite
            .into_iter()
            .zip(translations)
            .map(|(k, v)| (k, lattice.reduce(&v)))
            .collect();
        pairs.sort_by_key(|p| p.0);
        pairs.dedup_by_key(|p| p.0);
        let finite: Vec<usize> = pairs.iter().map(|p| p.0).collect();
        let translations: Vec<Vec<BigInt>> = pairs.into_iter().map(|p| p.1).collect();
        if !table.is_subgroup(&finite) {
            return Err(ChainError::validation("finite part K is not a subgroup"));
        }
        if translations[0].iter().any(|x| !x.is_zero()) {
            return Err(ChainError::validation("translation of the identity must lie in L"));
        }
        for &k in &finite {
            if !lattice.transform(&action[k])?.is_sublattice_of(&lattice) {
                return Err(ChainError::validation(format!(
                    "lattice is not invariant under {}",
                    table.name(k)
                )));
            }
        }
        let pos = |k: usize| finite.binary_search(&k).unwrap();
        for (i, &k1) in finite.iter().enumerate() {
            for (j, &k2) in finite.iter().enumerate() {
                let prod = table.mul(k1, k2);
                let lhs: Vec<BigInt> = translations[i]
                    .iter()
                    .zip(action[k1].mul_vec(&translations[j]))
                    .map(|(a, b)| a + b)
                    .collect();
                let diff: Vec<BigInt> = lhs.iter().zip(&translations[pos(prod)]).map(|(a, b)| a - b).collect();
                if !lattice.contains(&diff) {
                    return Err(ChainError::validation(format!(
                        "translations are not closed under multiplication at ({}, {})",
                        table.name(k1),
                        table.name(k2)
                    )));
                }
            }
        }
        let images = action
            .iter()
            .map(|a| lattice.transform(a))
            .collect::<Result<Vec<_>>>()?;
        Ok(SubgroupData::Lattice(LatticeSubgroup {
            lattice,
            finite,
            translations,
            images,
        }))
    }

    /// Heisenberg subgroup `MZ^2 × mZ` (columns of `M` span the lattice).
    /// Valid iff the set is closed, i.e. `m` divides `g1*g2` where `g_r` is the
    /// gcd of row `r` of `M`.
    pub fn heisenberg(ctx: &GroupContext, m_matrix: &IntMatrix, m: impl Into<BigInt>) -> Result<Self> {
        let m = m.into();
        if ctx.family() != super::Family::Heisenberg {
            return Err(ChainError::structure("Heisenberg subgroup in a lattice context"));
        }
        if m_matrix.rows() != 2 || m_matrix.cols() != 2 {
            return Err(ChainError::validation("Heisenberg subgroup matrix must be 2x2"));
        }
        if !m.is_positive() {
            return Err(ChainError::validation("center modulus m must be positive"));
        }
        let lattice = Lattice::from_matrix(m_matrix)?;
        if !(lattice.row_gcd(0) * lattice.row_gcd(1)).is_multiple_of(&m) {
            return Err(ChainError::validation(format!(
                "M Z^2 x {m} Z is not closed under multiplication: {m} does not divide the product of the row gcds of {m_matrix:?}"
            )));
        }
        Ok(SubgroupData::Heisenberg(HeisenbergSubgroup {
            lattice,
            center: m,
            twist: [BigInt::zero(), BigInt::zero()],
        }))
    }

    /// General Heisenberg subgroup with sections `(c1, t1)`, `(c2, t2)`.
    pub fn heisenberg_twisted(lattice: Lattice, m: BigInt, twist: [BigInt; 2]) -> Result<Self> {
        if lattice.rank() != 2 {
            return Err(ChainError::structure("Heisenberg lattice must have rank 2"));
        }
        if !m.is_positive() {
            return Err(ChainError::validation("center modulus m must be positive"));
        }
        if !lattice.index().is_multiple_of(&m) {
            return Err(ChainError::validation(
                "sections do not generate a subgroup meeting the center in mZ (m must divide det)",
            ));
        }
        let twist = [twist[0].mod_floor(&m), twist[1].mod_floor(&m)];
        Ok(SubgroupData::Heisenberg(HeisenbergSubgroup {
            lattice,
            center: m,
            twist,
        }))
    }

    /// The whole group.
    pub fn whole(ctx: &GroupContext) -> Self {
        match &ctx.0.kind {
            Kind::Lattice { rank, finite, .. } => SubgroupData::lattice(
                ctx,
                Lattice::full(*rank),
                (0..finite.order()).collect(),
                vec![vec![BigInt::zero(); *rank]; finite.order()],
            )
            .expect("whole group is a subgroup"),
            Kind::Heisenberg => SubgroupData::heisenberg(ctx, &IntMatrix::identity(2), 1).unwrap(),
        }
    }

    /// Subgroup generated by `gens`; fails if it does not have finite index.
    pub fn from_generators(ctx: &GroupContext, gens: &[GroupElement]) -> Result<Self> {
        for g in gens {
            ctx.check(g)?;
        }
        match &ctx.0.kind {
            Kind::Lattice { rank, finite: table, .. } => {
                // transversal over K = generated finite parts, then Schreier vectors
                let parts: Vec<usize> = gens
                    .iter()
                    .map(|g| match g {
                        GroupElement::Lattice { f, .. } => *f,
                        _ => unreachable!(),
                    })
                    .collect();
                let mut reps: Vec<Option<GroupElement>> = vec![None; table.order()];
                reps[0] = Some(ctx.identity());
                let mut queue = VecDeque::from([0usize]);
                let mut order = vec![0usize];
                while let Some(k) = queue.pop_front() {
                    for (g, &f) in gens.iter().zip(&parts) {
                        let nk = table.mul(f, k);
                        if reps[nk].is_none() {
                            reps[nk] = Some(ctx.mul(g, reps[k].as_ref().unwrap()));
                            queue.push_back(nk);
                            order.push(nk);
                        }
                    }
                }
                let mut vectors = Vec::new();
                for &k in &order {
                    let rk = reps[k].as_ref().unwrap();
                    for (g, &f) in gens.iter().zip(&parts) {
                        let nk = table.mul(f, k);
                        let s = ctx.mul(&ctx.inv(reps[nk].as_ref().unwrap()), &ctx.mul(g, rk));
                        if let GroupElement::Lattice { v, .. } = s {
                            if v.iter().any(|x| !x.is_zero()) {
                                vectors.push(v);
                            }
                        }
                    }
                }
                if vectors.len() < *rank {
                    return Err(ChainError::validation("generated subgroup has infinite index"));
                }
                let lattice = Lattice::from_generators(*rank, &vectors)?;
                let mut finite = order.clone();
                finite.sort_unstable();
                let translations = finite
                    .iter()
                    .map(|&k| match reps[k].as_ref().unwrap() {
                        GroupElement::Lattice { v, .. } => v.clone(),
                        _ => unreachable!(),
                    })
                    .collect();
                SubgroupData::lattice(ctx, lattice, finite, translations)
            }
            Kind::Heisenberg => {
                let cols: Vec<Vec<BigInt>> = gens
                    .iter()
                    .map(|g| match g {
                        GroupElement::Heisenberg { x, y, .. } => vec![x.clone(), y.clone()],
                        _ => unreachable!(),
                    })
                    .collect();
                if cols.len() < 2 {
                    return Err(ChainError::validation("generated subgroup has infinite index"));
                }
                let red = hermite_reduce(&IntMatrix::from_columns(2, &cols))?;
                let lattice = Lattice::from_matrix(&red.hnf)?;
                let section = |c: usize| {
                    gens.iter().enumerate().fold(ctx.identity(), |acc, (j, g)| {
                        ctx.mul(&acc, &ctx.power(g, &red.transform[(j, c)]))
                    })
                };
                let s = [section(0), section(1)];
                let height = |e: &GroupElement| match e {
                    GroupElement::Heisenberg { z, .. } => z.clone(),
                    _ => unreachable!(),
                };
                // the center meets H in the span of [s1, s2] and the generator corrections
                let mut m = lattice.index();
                for g in gens {
                    let GroupElement::Heisenberg { x, y, .. } = g else { unreachable!() };
                    let coords = lattice.coordinates(&[x.clone(), y.clone()]).unwrap();
                    let canon = ctx.mul(&ctx.power(&s[0], &coords[0]), &ctx.power(&s[1], &coords[1]));
                    let corr = ctx.mul(g, &ctx.inv(&canon));
                    m = m.gcd(&height(&corr));
                }
                SubgroupData::heisenberg_twisted(lattice, m, [height(&s[0]), height(&s[1])])
            }
        }
    }

    pub fn family(&self) -> super::Family {
        match self {
            SubgroupData::Lattice(_) => super::Family::LatticeSemidirect,
            SubgroupData::Heisenberg(_) => super::Family::Heisenberg,
        }
    }

    /// `|G : H|`.
    pub fn index(&self, ctx: &GroupContext) -> BigInt {
        match self {
            SubgroupData::Lattice(h) => {
                let order = ctx.finite().map_or(1, |f| f.order());
                h.lattice.index() * BigInt::from(order) / BigInt::from(h.finite.len())
            }
            SubgroupData::Heisenberg(h) => h.lattice.index() * &h.center,
        }
    }

    pub fn contains(&self, ctx: &GroupContext, g: &GroupElement) -> bool {
        match (self, g) {
            (SubgroupData::Lattice(h), GroupElement::Lattice { v, f }) => match h.translation(*f) {
                Some(t) => {
                    let d: Vec<BigInt> = v.iter().zip(t).map(|(a, b)| a - b).collect();
                    h.lattice.contains(&d)
                }
                None => false,
            },
            (SubgroupData::Heisenberg(h), GroupElement::Heisenberg { x, y, z }) => {
                match h.lattice.coordinates(&[x.clone(), y.clone()]) {
                    Some(c) => (z - h.section_height(ctx, &c)).is_multiple_of(&h.center),
                    None => false,
                }
            }
            _ => false,
        }
    }

    /// Canonical label of the left coset `gH`.
    pub fn coset_key(&self, ctx: &GroupContext, g: &GroupElement) -> CosetKey {
        match (self, g) {
            (SubgroupData::Lattice(h), GroupElement::Lattice { v, f }) => {
                let Kind::Lattice { finite: table, action, .. } = &ctx.0.kind else { unreachable!() };
                let (j, fstar) = h
                    .finite
                    .iter()
                    .enumerate()
                    .map(|(j, &k)| (j, table.mul(*f, k)))
                    .min_by_key(|p| p.1)
                    .unwrap();
                let w: Vec<BigInt> = v
                    .iter()
                    .zip(action[*f].mul_vec(&h.translations[j]))
                    .map(|(a, b)| a + b)
                    .collect();
                CosetKey::Lattice(fstar, h.images[fstar].reduce(&w))
            }
            (SubgroupData::Heisenberg(h), GroupElement::Heisenberg { x, y, z }) => {
                let r = h.lattice.reduce(&[x.clone(), y.clone()]);
                let lam = [&r[0] - x, &r[1] - y];
                let c = h.lattice.coordinates(&lam).unwrap();
                let height = z + h.section_height(ctx, &c) + x * &lam[1];
                let [r0, r1]: [BigInt; 2] = r.try_into().unwrap();
                CosetKey::Heisenberg(r0, r1, height.mod_floor(&h.center))
            }
            _ => panic!("element family does not match subgroup"),
        }
    }

    /// A finite generating set.
    pub fn generators(&self, ctx: &GroupContext) -> Vec<GroupElement> {
        match self {
            SubgroupData::Lattice(h) => {
                let table = ctx.finite().unwrap();
                let mut gens: Vec<GroupElement> = h
                    .lattice
                    .basis()
                    .columns()
                    .into_iter()
                    .map(|v| GroupElement::Lattice { v, f: 0 })
                    .collect();
                let mut chosen: Vec<usize> = Vec::new();
                let mut span: BTreeSet<usize> = BTreeSet::from([0]);
                for &k in &h.finite {
                    if !span.contains(&k) {
                        chosen.push(k);
                        span = table.subgroup_generated(&chosen).into_iter().collect();
                    }
                }
                for k in chosen {
                    gens.push(GroupElement::Lattice {
                        v: h.translation(k).unwrap().to_vec(),
                        f: k,
                    });
                }
                gens
            }
            SubgroupData::Heisenberg(h) => {
                let mut gens = h.sections().to_vec();
                gens.push(GroupElement::Heisenberg {
                    x: BigInt::zero(),
                    y: BigInt::zero(),
                    z: h.center.clone(),
                });
                gens
            }
        }
    }

    /// `g H g^-1` in canonical form.
    pub fn conjugate(&self, ctx: &GroupContext, g: &GroupElement) -> Result<SubgroupData> {
        ctx.check(g)?;
        match (self, g) {
            (SubgroupData::Lattice(h), GroupElement::Lattice { v: u, f }) => {
                let Kind::Lattice { finite: table, action, .. } = &ctx.0.kind else { unreachable!() };
                let lattice = h.images[*f].clone();
                let fi = table.inv(*f);
                let mut finite = Vec::new();
                let mut translations = Vec::new();
                for (j, &k) in h.finite.iter().enumerate() {
                    let kc = table.mul(table.mul(*f, k), fi);
                    let av = action[*f].mul_vec(&h.translations[j]);
                    let au = action[kc].mul_vec(u);
                    finite.push(kc);
                    translations.push(
                        u.iter()
                            .zip(av)
                            .zip(au)
                            .map(|((a, b), c)| a + b - c)
                            .collect(),
                    );
                }
                SubgroupData::lattice(ctx, lattice, finite, translations)
            }
            (SubgroupData::Heisenberg(h), GroupElement::Heisenberg { x, y, .. }) => {
                // g (a,b,c) g^-1 = (a, b, c + x b - a y)
                let b = h.lattice.basis();
                let shift = |j: usize| x * &b[(1, j)] - &b[(0, j)] * y;
                SubgroupData::heisenberg_twisted(
                    h.lattice.clone(),
                    h.center.clone(),
                    [&h.twist[0] + shift(0), &h.twist[1] + shift(1)],
                )
            }
            _ => Err(ChainError::structure("element family does not match subgroup")),
        }
    }

    /// `self ⊆ other`, checked on generators.
    pub fn is_subgroup_of(&self, ctx: &GroupContext, other: &SubgroupData) -> bool {
        self.generators(ctx).iter().all(|g| other.contains(ctx, g))
    }

    /// Row condition for `MZ^2 × mZ`: untwisted and `m` divides both entries
    /// of one row of `M`.
    pub fn heisenberg_row_condition(&self) -> Option<bool> {
        match self {
            SubgroupData::Heisenberg(h) => {
                let untwisted = h.twist.iter().all(Zero::is_zero);
                Some(
                    untwisted
                        && (h.lattice.row_gcd(0).is_multiple_of(&h.center)
                            || h.lattice.row_gcd(1).is_multiple_of(&h.center)),
                )
            }
            SubgroupData::Lattice(_) => None,
        }
    }

    pub fn describe(&self, ctx: &GroupContext) -> String {
        match self {
            SubgroupData::Lattice(h) => {
                let table = ctx.finite().unwrap();
                let names: Vec<String> = h
                    .finite
                    .iter()
                    .zip(&h.translations)
                    .map(|(&k, v)| {
                        if v.iter().all(Zero::is_zero) {
                            table.name(k).to_string()
                        } else {
                            format!("{}@{}", table.name(k), fmt_vec(v))
                        }
                    })
                    .collect();
                format!("L={:?} K={{{}}}", h.lattice.basis(), names.join(", "))
            }
            SubgroupData::Heisenberg(h) => {
                let tw = if h.twist.iter().all(Zero::is_zero) {
                    String::new()
                } else {
                    format!(" twist=({},{})", h.twist[0], h.twist[1])
                };
                format!("M={:?} m={}{}", h.lattice.basis(), h.center, tw)
            }
        }
    }
}

fn fmt_vec(v: &[BigInt]) -> String {
    format!("({})", v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","))
}

impl fmt::Debug for SubgroupData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SubgroupData::Lattice(h) => write!(
                f,
                "LatticeSubgroup {{ L: {:?}, K: {:?}, v: {:?} }}",
                h.lattice.basis(),
                h.finite,
                h.translations
            ),
            SubgroupData::Heisenberg(h) => write!(
                f,
                "HeisenbergSubgroup {{ M: {:?}, m: {}, twist: ({}, {}) }}",
                h.lattice.basis(),
                h.center,
                h.twist[0],
                h.twist[1]
            ),
        }
    }
}

impl Serialize for SubgroupData {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        #[serde(tag = "family", rename_all = "snake_case")]
        enum Repr<'a> {
            Lattice {
                lattice: Vec<Vec<String>>,
                finite: &'a [usize],
                translations: Vec<Vec<String>>,
            },
            Heisenberg {
                lattice: Vec<Vec<String>>,
                center: String,
                twist: [String; 2],
            },
        }
        let strs = |m: &IntMatrix| -> Vec<Vec<String>> {
            m.to_rows().iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect()
        };
        let repr = match self {
            SubgroupData::Lattice(h) => Repr::Lattice {
                lattice: strs(h.lattice.basis()),
                finite: &h.finite,
                translations: h
                    .translations
                    .iter()
                    .map(|v| v.iter().map(|x| x.to_string()).collect())
                    .collect(),
            },
            SubgroupData::Heisenberg(h) => Repr::Heisenberg {
                lattice: strs(h.lattice.basis()),
                center: h.center.to_string(),
                twist: [h.twist[0].to_string(), h.twist[1].to_string()],
            },
        };
        repr.serialize(s)
    }
}
