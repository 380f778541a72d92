#![allow(dead_code)]

use std::collections::{HashSet, VecDeque};

use chaincalc::chains::{GroupChain, Provenance};
use chaincalc::cosets::CosetTable;
use chaincalc::groups::{FiniteGroupTable, Lattice};
use chaincalc::{GroupContext, GroupElement, SubgroupData};
use num_bigint::BigInt;
use proptest::prelude::*;

pub fn big(x: i64) -> BigInt {
    BigInt::from(x)
}

pub fn diag_lattice(entries: &[i64]) -> Lattice {
    let n = entries.len();
    let gens: Vec<Vec<BigInt>> = (0..n)
        .map(|j| (0..n).map(|r| if r == j { big(entries[j]) } else { big(0) }).collect())
        .collect();
    Lattice::from_generators(n, &gens).unwrap()
}

pub fn mul(ctx: &GroupContext, g: &GroupElement, h: &GroupElement) -> GroupElement {
    ctx.multiply(g, h).unwrap()
}

pub fn inv(ctx: &GroupContext, g: &GroupElement) -> GroupElement {
    ctx.inverse(g).unwrap()
}

// ---------------------------------------------------------------------------
// Families

pub fn dihedral_ctx() -> GroupContext {
    chaincalc::catalog::dihedral_context()
}

pub fn swap_ctx() -> GroupContext {
    chaincalc::catalog::swap_context()
}

pub fn product_ctx() -> GroupContext {
    GroupContext::direct_product(1, FiniteGroupTable::symmetric(3).unwrap()).unwrap()
}

/// `Z ⋊ Z2` chains: reflection levels `<a^m_i, a^t_i b>` followed by
/// rotation levels `<a^m_i>`.
pub fn dihedral_chain(depth: usize) -> impl Strategy<Value = GroupChain> {
    (
        prop::collection::vec(2i64..=3, depth),
        0..=depth,
        prop::collection::vec(0i64..3, depth),
    )
        .prop_map(move |(mults, reflect, offsets)| {
            let ctx = dihedral_ctx();
            let (mut m, mut t) = (1i64, 0i64);
            let levels = (0..depth)
                .map(|k| {
                    t += m * offsets[k];
                    m *= mults[k];
                    if k < reflect {
                        SubgroupData::lattice(&ctx, diag_lattice(&[m]), vec![0, 1], vec![vec![big(0)], vec![big(t)]])
                    } else {
                        SubgroupData::lattice(&ctx, diag_lattice(&[m]), vec![0], vec![vec![big(0)]])
                    }
                    .unwrap()
                })
                .collect();
            GroupChain::new(&ctx, levels, Provenance::Explicit).unwrap()
        })
}

/// `Z^2 ⋊ Z2` (swap) chains with diagonal lattices and trivial finite part.
pub fn swap_chain(depth: usize) -> impl Strategy<Value = GroupChain> {
    prop::collection::vec((1i64..=3, 1i64..=3).prop_filter("proper", |(a, b)| a * b > 1), depth).prop_map(
        move |steps| {
            let ctx = swap_ctx();
            let (mut a, mut b) = (1, 1);
            let levels = steps
                .iter()
                .map(|(x, y)| {
                    a *= x;
                    b *= y;
                    SubgroupData::lattice(&ctx, diag_lattice(&[a, b]), vec![0], vec![vec![big(0), big(0)]]).unwrap()
                })
                .collect();
            GroupChain::new(&ctx, levels, Provenance::Explicit).unwrap()
        },
    )
}

/// `Z × S3` chains `K_i × r^i Z` with `K_i` descending.
pub fn product_chain(depth: usize) -> impl Strategy<Value = GroupChain> {
    // subgroup chains of S3 by generators
    let paths: Vec<Vec<&'static [&'static str]>> = vec![
        vec![&["(0 1)", "(0 1 2)"], &["(0 1)"], &[]],
        vec![&["(0 1)", "(0 1 2)"], &["(0 1 2)"], &[]],
        vec![&["(0 2)"], &["(0 2)"], &[]],
        vec![&["(0 1 2)"], &[], &[]],
        vec![&["(1 2)"], &["(1 2)"], &["(1 2)"]],
    ];
    (0..paths.len(), 2i64..=3, prop::collection::vec(0usize..2, depth)).prop_map(move |(p, r, stay)| {
        let ctx = product_ctx();
        let table = ctx.finite().unwrap().clone();
        let path = &paths[p];
        let mut pos = 0;
        let mut m = 1;
        let levels = (0..depth)
            .map(|k| {
                if k > 0 && stay[k] == 0 {
                    pos = (pos + 1).min(path.len() - 1);
                }
                m *= r;
                let gens: Vec<usize> = path[pos].iter().map(|c| table.element(c).unwrap()).collect();
                let k_part = table.subgroup_generated(&gens);
                let n = k_part.len();
                SubgroupData::lattice(&ctx, diag_lattice(&[m]), k_part, vec![vec![big(0)]; n]).unwrap()
            })
            .collect();
        GroupChain::new(&ctx, levels, Provenance::Explicit).unwrap()
    })
}

/// Heisenberg chains `diag(a_i, b_i) Z^2 × m_i Z` with `m_i` equal to `a_i` or `b_i`.
pub fn heisenberg_chain(depth: usize) -> impl Strategy<Value = GroupChain> {
    (
        prop::collection::vec((1i64..=2, 1i64..=2).prop_filter("proper", |(a, b)| a * b > 1), depth),
        any::<bool>(),
    )
        .prop_map(move |(steps, use_a)| {
            let ctx = GroupContext::heisenberg();
            let (mut a, mut b) = (1i64, 1i64);
            let levels = steps
                .iter()
                .map(|(x, y)| {
                    a *= x;
                    b *= y;
                    let m = chaincalc::groups::IntMatrix::from_rows(&[vec![a, 0], vec![0, b]]).unwrap();
                    SubgroupData::heisenberg(&ctx, &m, if use_a { a } else { b }).unwrap()
                })
                .collect();
            GroupChain::new(&ctx, levels, Provenance::Explicit).unwrap()
        })
}

pub fn small_int() -> impl Strategy<Value = i64> {
    -6i64..=6
}

pub fn element_in(ctx: &GroupContext) -> BoxedStrategy<GroupElement> {
    match ctx.finite() {
        None => (small_int(), small_int(), -20i64..=20)
            .prop_map(|(x, y, z)| GroupElement::heisenberg(x, y, z))
            .boxed(),
        Some(table) => {
            let rank = ctx.rank();
            (prop::collection::vec(small_int(), rank), 0..table.order())
                .prop_map(|(v, f)| GroupElement::lattice(&v, f))
                .boxed()
        }
    }
}

/// Random word of length `0..len` in the generators and their inverses.
pub fn word_element(ctx: &GroupContext, len: usize) -> BoxedStrategy<GroupElement> {
    let ctx = ctx.clone();
    let n = ctx.generators().len();
    prop::collection::vec((0..n, any::<bool>()), 0..len)
        .prop_map(move |letters| {
            letters.iter().fold(ctx.identity(), |acc, &(s, invert)| {
                let g = &ctx.generators()[s];
                let g = if invert { inv(&ctx, g) } else { g.clone() };
                mul(&ctx, &acc, &g)
            })
        })
        .boxed()
}

// ---------------------------------------------------------------------------
// Brute-force oracles, using only group arithmetic and `contains`.

/// Left cosets of `h` found by breadth-first search; a new coset is opened
/// when no earlier representative `r` has `r^-1 x ∈ H`.
pub struct BruteCosets {
    pub ctx: GroupContext,
    pub subgroup: SubgroupData,
    pub reps: Vec<GroupElement>,
}

impl BruteCosets {
    pub fn new(ctx: &GroupContext, h: &SubgroupData) -> Self {
        let mut out = BruteCosets {
            ctx: ctx.clone(),
            subgroup: h.clone(),
            reps: vec![ctx.identity()],
        };
        let mut queue = VecDeque::from([0usize]);
        while let Some(c) = queue.pop_front() {
            for s in ctx.generators() {
                let x = mul(ctx, s, &out.reps[c]);
                if out.find(&x).is_none() {
                    out.reps.push(x);
                    queue.push_back(out.reps.len() - 1);
                }
            }
        }
        out
    }

    pub fn find(&self, x: &GroupElement) -> Option<usize> {
        self.reps
            .iter()
            .position(|r| self.subgroup.contains(&self.ctx, &mul(&self.ctx, &inv(&self.ctx, r), x)))
    }

    pub fn len(&self) -> usize {
        self.reps.len()
    }

    /// `g ∈ ⋂_r r H r^-1`.
    pub fn in_core(&self, g: &GroupElement) -> bool {
        self.reps.iter().all(|r| {
            let h = mul(&self.ctx, &inv(&self.ctx, r), &mul(&self.ctx, g, r));
            self.subgroup.contains(&self.ctx, &h)
        })
    }

    pub fn perm_of(&self, g: &GroupElement) -> Vec<usize> {
        self.reps
            .iter()
            .map(|r| self.find(&mul(&self.ctx, g, r)).expect("coset exists"))
            .collect()
    }

    /// All of `G / core(H)` as permutations, by closure under the generator actions.
    pub fn quotient(&self) -> Vec<Vec<usize>> {
        let gens: Vec<Vec<usize>> = self.ctx.generators().iter().map(|g| self.perm_of(g)).collect();
        let id: Vec<usize> = (0..self.len()).collect();
        let mut seen: HashSet<Vec<usize>> = HashSet::from([id.clone()]);
        let mut out = vec![id.clone()];
        let mut queue = VecDeque::from([id]);
        while let Some(p) = queue.pop_front() {
            for g in &gens {
                let q: Vec<usize> = p.iter().map(|&c| g[c]).collect();
                if seen.insert(q.clone()) {
                    out.push(q.clone());
                    queue.push_back(q);
                }
            }
        }
        out
    }

    /// Translate a permutation of these cosets into the numbering of `table`.
    pub fn to_table(&self, table: &CosetTable, p: &[usize]) -> Vec<u32> {
        let sigma: Vec<usize> = self.reps.iter().map(|r| table.coset_of(r).unwrap()).collect();
        let mut out = vec![0u32; p.len()];
        for (c, &t) in p.iter().enumerate() {
            out[sigma[c]] = sigma[t] as u32;
        }
        out
    }
}

/// `D_i` from scratch: elements of `G / C_i` fixing the base coset.
pub fn brute_discriminant(cosets: &BruteCosets) -> Vec<Vec<usize>> {
    cosets.quotient().into_iter().filter(|p| p[0] == 0).collect()
}

/// `⋂_{n=i}^{probe} θ^n_i(D_n)` from scratch, as permutations of the level-`i` cosets.
pub fn brute_stable_image(chain: &GroupChain, i: usize, probe: usize) -> HashSet<Vec<usize>> {
    let ctx = chain.context();
    let base = BruteCosets::new(ctx, chain.level(i));
    let mut acc: Option<HashSet<Vec<usize>>> = None;
    for n in i..=probe {
        let deep = BruteCosets::new(ctx, chain.level(n));
        // level-n coset of each level-i representative, and the level-i coset of each level-n representative
        let down: Vec<usize> = base.reps.iter().map(|r| deep.find(r).unwrap()).collect();
        let up: Vec<usize> = deep.reps.iter().map(|r| base.find(r).unwrap()).collect();
        let image: HashSet<Vec<usize>> = brute_discriminant(&deep)
            .iter()
            .map(|p| down.iter().map(|&c| up[p[c]]).collect())
            .collect();
        acc = Some(match acc {
            None => image,
            Some(a) => a.intersection(&image).cloned().collect(),
        });
    }
    acc.unwrap()
}

/// Order of `g` acting on the cosets, so that `g^order` lies in the core.
pub fn action_order(cosets: &BruteCosets, g: &GroupElement) -> usize {
    let p = cosets.perm_of(g);
    let id: Vec<usize> = (0..p.len()).collect();
    let mut q = p.clone();
    let mut k = 1;
    while q != id {
        q = q.iter().map(|&c| p[c]).collect();
        k += 1;
    }
    k
}

/// Sample elements for core checks: small elements and powers landing in the core.
pub fn core_samples(cosets: &BruteCosets, count: usize) -> Vec<GroupElement> {
    let ctx = &cosets.ctx;
    let mut out = chaincalc::catalog::sample_elements(ctx, count);
    let extra: Vec<GroupElement> = out
        .iter()
        .take(count / 4)
        .map(|g| ctx.power(g, &big(action_order(cosets, g) as i64)))
        .collect();
    out.extend(extra);
    out
}

pub mod invariants;

/// `Θ(H)` as the closure of the generators' permutations; used where
/// `G / C_i` is too large to enumerate here.
pub fn brute_subgroup_image(cosets: &BruteCosets, gens: &[GroupElement]) -> HashSet<Vec<usize>> {
    let perms: Vec<Vec<usize>> = gens.iter().map(|g| cosets.perm_of(g)).collect();
    let id: Vec<usize> = (0..cosets.len()).collect();
    let mut seen = HashSet::from([id.clone()]);
    let mut queue = VecDeque::from([id]);
    while let Some(p) = queue.pop_front() {
        for g in &perms {
            let q: Vec<usize> = p.iter().map(|&c| g[c]).collect();
            if seen.insert(q.clone()) {
                queue.push_back(q);
            }
        }
    }
    seen
}
