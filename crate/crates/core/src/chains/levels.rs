use std::collections::{HashSet, VecDeque};

use serde::Serialize;

use super::{GroupChain, Provenance};
use crate::cosets::{Caps, CosetTable, FiniteQuotient};
use crate::error::{ChainError, Result};
use crate::groups::{GroupElement, SubgroupData};

/// Extra probe levels a stable image must survive unchanged.
pub const DEFAULT_WINDOW: usize = 2;

/// Coset table, permutation quotient `Θ_i(G) ≅ G/C_i`, and the bonding map
/// to the previous level.
#[derive(Clone, Debug)]
pub struct LevelData {
    pub level: usize,
    pub table: CosetTable,
    pub quotient: FiniteQuotient,
    // bond[e] = δ(e) in the previous level's quotient; trivial for level 1
    bond: Vec<u32>,
}

impl LevelData {
    /// `D_i = G_i/C_i` as elements of the quotient.
    pub fn discriminant(&self) -> &[u32] {
        self.quotient.stabilizer()
    }

    /// Image of `δ: Θ_i(G) → Θ_{i-1}(G)`.
    pub fn bond(&self, e: usize) -> usize {
        self.bond[e] as usize
    }

    /// Quotient element of `Θ_i(g)`.
    pub fn element_of(&self, g: &GroupElement) -> Option<usize> {
        self.quotient.index_of(&self.table.theta(g)?)
    }
}

/// Levels `1..=depth` of a chain.
#[derive(Clone, Debug)]
pub struct Levels {
    chain: GroupChain,
    data: Vec<LevelData>,
}

/// Build coset tables, permutation quotients and bonding maps through `depth`.
pub fn build_levels(chain: &GroupChain, depth: usize, caps: &Caps) -> Result<Levels> {
    if depth > chain.depth() {
        return Err(ChainError::Precondition(format!(
            "depth {depth} exceeds chain depth {}",
            chain.depth()
        )));
    }
    let ctx = chain.context();
    let mut data: Vec<LevelData> = Vec::with_capacity(depth);
    for i in 1..=depth {
        let table = CosetTable::enumerate(ctx, chain.level(i), caps).map_err(|e| e.at_level(i))?;
        let quotient = FiniteQuotient::from_table(&table, caps).map_err(|e| e.at_level(i))?;
        let mut bond = vec![0u32; quotient.len()];
        if let Some(prev) = data.last() {
            // quotient elements are in BFS order, so parents come first
            for e in 1..quotient.len() {
                let (p, s) = quotient.parent(e).unwrap();
                bond[e] = prev.quotient.left_mul(s, bond[p] as usize) as u32;
            }
        }
        data.push(LevelData {
            level: i,
            table,
            quotient,
            bond,
        });
    }
    Ok(Levels {
        chain: chain.truncate(depth),
        data,
    })
}

/// `S_i` for every built level.
#[derive(Clone, Debug, Serialize)]
pub struct StableImages {
    pub probe_depth: usize,
    pub window: usize,
    /// Sorted quotient elements of `S_i`; index `i-1`.
    pub sets: Vec<Vec<u32>>,
    /// `|θ^n_i(D_n)|` for `n = i..=probe_depth`.
    pub image_sizes: Vec<Vec<usize>>,
    pub stabilized: Vec<bool>,
}

impl StableImages {
    pub fn size(&self, i: usize) -> usize {
        self.sets[i - 1].len()
    }

    pub fn set(&self, i: usize) -> &[u32] {
        &self.sets[i - 1]
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "verdict")]
pub enum DiscriminantVerdict {
    Trivial,
    /// `|S_i| = order` for every level from `stabilized_at` on, and
    /// `G_i ∩ C_m = C_i` for some base level `m <= stabilized_at`.
    Finite { order: usize, stabilized_at: usize },
    /// Finite truncations only bound the size from below.
    LowerBound { bound: usize, growth: Vec<usize> },
}

impl std::fmt::Display for DiscriminantVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DiscriminantVerdict::Trivial => write!(f, "trivial"),
            DiscriminantVerdict::Finite { order, stabilized_at } => {
                write!(f, "finite({order}), stable from level {stabilized_at}")
            }
            DiscriminantVerdict::LowerBound { bound, growth } => {
                let g: Vec<String> = growth.iter().map(|x| x.to_string()).collect();
                write!(f, "lowerBound({bound}), growth {}", g.join(","))
            }
        }
    }
}

impl Levels {
    pub fn chain(&self) -> &GroupChain {
        &self.chain
    }

    pub fn depth(&self) -> usize {
        self.data.len()
    }

    /// Level `i`, `1 <= i <= depth`.
    pub fn level(&self, i: usize) -> &LevelData {
        &self.data[i - 1]
    }

    pub fn iter(&self) -> impl Iterator<Item = &LevelData> {
        self.data.iter()
    }

    /// `θ^n_i(e)` for `e` in the level-`n` quotient, through adjacent bonds.
    pub fn project(&self, n: usize, i: usize, e: usize) -> usize {
        let mut e = e;
        for k in ((i + 1)..=n).rev() {
            e = self.level(k).bond(e);
        }
        e
    }

    /// `θ^n_i(e)` by re-evaluating the witness word of `e` at level `i`.
    pub fn project_direct(&self, n: usize, i: usize, e: usize) -> usize {
        let word = self.level(n).quotient.witness(e);
        let q = &self.level(i).quotient;
        word.iter().rev().fold(0, |acc, &s| q.left_mul(s, acc))
    }

    /// Whether `δ` maps `D_i` onto `D_{i-1}`.
    pub fn bond_surjective(&self, i: usize) -> bool {
        if i == 1 {
            return true;
        }
        let image: HashSet<usize> = self.level(i).discriminant().iter().map(|&e| self.project(i, i - 1, e as usize)).collect();
        image.len() == self.level(i - 1).discriminant().len()
    }

    /// Whether `δ` is injective on `D_i`.
    pub fn bond_injective(&self, i: usize) -> bool {
        if i == 1 {
            return self.level(1).discriminant().len() == 1;
        }
        let image: HashSet<usize> = self.level(i).discriminant().iter().map(|&e| self.project(i, i - 1, e as usize)).collect();
        image.len() == self.level(i).discriminant().len()
    }

    /// `D_i ∩ ker δ^i_m = {id}`, i.e. `G_i ∩ C_m = C_i`.
    pub fn core_criterion(&self, m: usize, i: usize) -> bool {
        self.level(i)
            .discriminant()
            .iter()
            .all(|&e| e == 0 || self.project(i, m, e as usize) != 0)
    }

    /// Least base level `m` with `G_i ∩ C_m = C_i` for every built `i >= m`,
    /// checked over at least `span` levels beyond `m`.
    pub fn core_witness_level(&self, span: usize) -> Option<usize> {
        (1..=self.depth().saturating_sub(span)).find(|&m| (m..=self.depth()).all(|i| self.core_criterion(m, i)))
    }

    /// `S_i = ⋂_{n <= probe} θ^n_i(D_n)`.
    pub fn stable_images(&self, probe_depth: usize, window: usize) -> StableImages {
        let probe = probe_depth.min(self.depth());
        let mut sets = Vec::new();
        let mut sizes = Vec::new();
        let mut stabilized = Vec::new();
        for i in 1..=self.depth() {
            let mut current: HashSet<u32> = self.level(i).discriminant().iter().copied().collect();
            let mut images: Vec<HashSet<u32>> = vec![current.clone()];
            for n in (i + 1)..=probe {
                let image: HashSet<u32> = self
                    .level(n)
                    .discriminant()
                    .iter()
                    .map(|&e| self.project(n, i, e as usize) as u32)
                    .collect();
                current = current.intersection(&image).copied().collect();
                images.push(current.clone());
            }
            let stable = probe >= i + window && images[images.len() - 1 - window..].iter().all(|s| *s == current);
            let mut set: Vec<u32> = current.into_iter().collect();
            set.sort_unstable();
            sizes.push(images.iter().map(HashSet::len).collect());
            sets.push(set);
            stabilized.push(stable);
        }
        StableImages {
            probe_depth: probe,
            window,
            sets,
            image_sizes: sizes,
            stabilized,
        }
    }

    pub fn discriminant_verdict(&self, stable: &StableImages) -> DiscriminantVerdict {
        let sizes: Vec<usize> = (1..=self.depth()).map(|i| stable.size(i)).collect();
        if sizes.iter().all(|&s| s == 1) {
            return DiscriminantVerdict::Trivial;
        }
        let last = *sizes.last().unwrap();
        let from = sizes.iter().rposition(|&s| s != last).map_or(1, |p| p + 2);
        let base = self.core_witness_level(stable.window);
        if base.is_some_and(|m| m <= from) && stable.stabilized[from - 1] && (from..=self.depth()).all(|i| stable.size(i) == last) {
            return DiscriminantVerdict::Finite {
                order: last,
                stabilized_at: from,
            };
        }
        DiscriminantVerdict::LowerBound {
            bound: *sizes.iter().max().unwrap(),
            growth: sizes,
        }
    }

    /// Per level: `S_i = D_i`.
    pub fn normal_form_flags(&self, stable: &StableImages) -> Vec<bool> {
        (1..=self.depth())
            .map(|i| stable.size(i) == self.level(i).discriminant().len())
            .collect()
    }

    /// `|Θ_i(G) : N(S)|` by brute force; `None` above `limit` elements.
    pub fn normalizer_index(&self, i: usize, set: &[u32], limit: usize) -> Option<usize> {
        let q = &self.level(i).quotient;
        if q.len() > limit {
            return None;
        }
        let members: HashSet<u32> = set.iter().copied().collect();
        let normalizing = (0..q.len())
            .filter(|&x| {
                let xi = q.inverse(x);
                set.iter()
                    .all(|&s| members.contains(&(q.compose(q.compose(x, s as usize), xi) as u32)))
            })
            .count();
        Some(q.len() / normalizing)
    }

    /// `⋂_x x S x^-1` over the level-`i` quotient.
    pub fn conjugate_intersection(&self, i: usize, set: &[u32]) -> Vec<u32> {
        let q = &self.level(i).quotient;
        let members: HashSet<u32> = set.iter().copied().collect();
        set.iter()
            .copied()
            .filter(|&s| {
                (0..q.len()).all(|x| {
                    let xi = q.inverse(x);
                    // s ∈ x S x^-1  iff  x^-1 s x ∈ S
                    members.contains(&(q.compose(q.compose(xi, s as usize), x) as u32))
                })
            })
            .collect()
    }

    pub fn is_normal_subset(&self, i: usize, set: &[u32]) -> bool {
        self.conjugate_intersection(i, set).len() == set.len()
    }

    /// Subgroup of the level-`i` quotient generated by `elems`.
    pub fn generated(&self, i: usize, elems: &[usize]) -> Vec<u32> {
        let q = &self.level(i).quotient;
        let mut seen: HashSet<usize> = HashSet::from([0]);
        let mut queue = VecDeque::from([0usize]);
        while let Some(x) = queue.pop_front() {
            for &g in elems {
                let y = q.compose(g, x);
                if seen.insert(y) {
                    queue.push_back(y);
                }
            }
        }
        let mut out: Vec<u32> = seen.into_iter().map(|x| x as u32).collect();
        out.sort_unstable();
        out
    }
}

/// Per level: whether the images of `⟨kernel_gens⟩` cover `D_i`, i.e.
/// `G_i = K C_i` at that level.
pub fn kernel_core_factorization(levels: &Levels, kernel_gens: &[GroupElement]) -> Vec<bool> {
    (1..=levels.depth())
        .map(|i| {
            let lvl = levels.level(i);
            let images: Option<Vec<usize>> = kernel_gens.iter().map(|k| lvl.element_of(k)).collect();
            let Some(images) = images else { return false };
            let d: HashSet<u32> = lvl.discriminant().iter().copied().collect();
            if images.iter().any(|&e| !d.contains(&(e as u32))) {
                return false;
            }
            levels.generated(i, &images).len() == d.len()
        })
        .collect()
}

/// The chain `G_i' = {g ∈ G_i : Θ_i(g) ∈ S_i}`, with subgroups rebuilt from
/// generators.
pub fn normal_form_transform(levels: &Levels, stable: &StableImages) -> Result<GroupChain> {
    let chain = levels.chain();
    let ctx = chain.context();
    let mut out = Vec::new();
    for i in 1..=levels.depth() {
        let lvl = levels.level(i);
        if stable.size(i) == lvl.discriminant().len() {
            out.push(chain.level(i).clone());
            continue;
        }
        // G acts on left cosets x S_i of the quotient; the stabilizer of S_i is G_i'.
        let q = &lvl.quotient;
        let set = stable.set(i);
        let label = |x: usize| set.iter().map(|&s| q.compose(x, s as usize)).min().unwrap();
        let gens = lvl.table.generators();
        let mut reps: Vec<GroupElement> = vec![ctx.identity()];
        let mut rep_elem: Vec<usize> = vec![0];
        let mut index = std::collections::HashMap::from([(label(0), 0usize)]);
        let mut c = 0;
        let mut schreier = Vec::new();
        let mut pending: Vec<(usize, usize, usize)> = Vec::new();
        while c < reps.len() {
            for (s, g) in gens.iter().enumerate() {
                let y = q.left_mul(s, rep_elem[c]);
                let key = label(y);
                let target = match index.get(&key) {
                    Some(&t) => t,
                    None => {
                        let t = reps.len();
                        index.insert(key, t);
                        reps.push(ctx.mul(g, &reps[c]));
                        rep_elem.push(y);
                        t
                    }
                };
                pending.push((c, s, target));
            }
            c += 1;
        }
        for (c, s, t) in pending {
            let e = ctx.mul(&ctx.inv(&reps[t]), &ctx.mul(&gens[s], &reps[c]));
            if !ctx.is_identity(&e) && !schreier.contains(&e) {
                schreier.push(e);
            }
        }
        let h = SubgroupData::from_generators(ctx, &schreier).map_err(|e| match e {
            ChainError::Validation(m) => ChainError::Unrepresentable(format!("level {i}: {m}")),
            other => other,
        })?;
        out.push(h);
    }
    GroupChain::nested(ctx, out, Provenance::NormalForm)
}
