//! Coset enumeration and the permutation representation on `G/H`.

use std::collections::hash_map::DefaultHasher;
use std::collections::{HashMap, VecDeque};
use std::hash::{Hash, Hasher};

use num_traits::ToPrimitive;

use crate::error::{ChainError, Result};
use crate::groups::{CosetKey, GroupContext, GroupElement, SubgroupData};

pub const DEFAULT_COSET_CAP: usize = 100_000;
pub const DEFAULT_PERM_CAP: usize = 1_000_000;
pub const COSET_CAP_ENV: &str = "CHAINCALC_COSET_CAP";
pub const PERM_CAP_ENV: &str = "CHAINCALC_PERM_CAP";

/// Guardrails for coset enumeration and permutation closure.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Caps {
    pub cosets: usize,
    pub perms: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            cosets: DEFAULT_COSET_CAP,
            perms: DEFAULT_PERM_CAP,
        }
    }
}

impl Caps {
    /// Defaults, overridden by `CHAINCALC_COSET_CAP` / `CHAINCALC_PERM_CAP` when set.
    pub fn from_env() -> Self {
        let read = |name: &str, default: usize| {
            std::env::var(name)
                .ok()
                .and_then(|s| s.trim().parse().ok())
                .unwrap_or(default)
        };
        Caps {
            cosets: read(COSET_CAP_ENV, DEFAULT_COSET_CAP),
            perms: read(PERM_CAP_ENV, DEFAULT_PERM_CAP),
        }
    }
}

/// The left coset space `A/H` for an ambient group `A` given by generators
/// (by default all of `G`), with BFS-canonical representatives.
#[derive(Clone)]
pub struct CosetTable {
    ctx: GroupContext,
    subgroup: SubgroupData,
    generators: Vec<GroupElement>,
    reps: Vec<GroupElement>,
    // (parent coset, generator) for every coset but 0
    parent: Vec<(u32, u32)>,
    lookup: HashMap<CosetKey, u32>,
    actions: Vec<Vec<u32>>,
}

impl CosetTable {
    /// Enumerate `G/H` over the context's generators.
    pub fn enumerate(ctx: &GroupContext, subgroup: &SubgroupData, caps: &Caps) -> Result<Self> {
        let index = subgroup.index(ctx);
        if index.to_usize().is_none_or(|n| n > caps.cosets) {
            return Err(ChainError::Resource {
                what: format!("coset count {index}"),
                cap: caps.cosets,
                level: None,
            });
        }
        Self::enumerate_with(ctx, subgroup, ctx.generators().to_vec(), caps)
    }

    /// Enumerate `A/(H ∩ A)` where `A` is generated by `generators`. Requires
    /// `H ∩ A` to have finite index in `A`; the coset cap bounds the search.
    pub fn enumerate_with(
        ctx: &GroupContext,
        subgroup: &SubgroupData,
        generators: Vec<GroupElement>,
        caps: &Caps,
    ) -> Result<Self> {
        for g in &generators {
            ctx.check(g)?;
        }
        let id = ctx.identity();
        let mut reps = vec![id.clone()];
        let mut parent = vec![(0, 0)];
        let mut lookup = HashMap::new();
        lookup.insert(subgroup.coset_key(ctx, &id), 0u32);
        let mut queue = VecDeque::from([0usize]);
        let mut edges: Vec<Vec<u32>> = vec![Vec::new(); generators.len()];
        while let Some(c) = queue.pop_front() {
            for (s, g) in generators.iter().enumerate() {
                let h = ctx.mul(g, &reps[c]);
                let key = subgroup.coset_key(ctx, &h);
                let next = reps.len() as u32;
                let target = *lookup.entry(key).or_insert(next);
                if target == next {
                    if reps.len() >= caps.cosets {
                        return Err(ChainError::Resource {
                            what: "coset count".into(),
                            cap: caps.cosets,
                            level: None,
                        });
                    }
                    reps.push(h);
                    parent.push((c as u32, s as u32));
                    queue.push_back(target as usize);
                }
                // BFS visits cosets in index order, so `c` is the next slot.
                edges[s].push(target);
            }
        }
        Ok(CosetTable {
            ctx: ctx.clone(),
            subgroup: subgroup.clone(),
            generators,
            reps,
            parent,
            lookup,
            actions: edges,
        })
    }

    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    pub fn context(&self) -> &GroupContext {
        &self.ctx
    }

    pub fn subgroup(&self) -> &SubgroupData {
        &self.subgroup
    }

    /// Ambient generators the table was built over.
    pub fn generators(&self) -> &[GroupElement] {
        &self.generators
    }

    pub fn rep(&self, c: usize) -> &GroupElement {
        &self.reps[c]
    }

    pub fn reps(&self) -> &[GroupElement] {
        &self.reps
    }

    /// Word over the table's generators evaluating to `rep(c)`.
    pub fn rep_word(&self, c: usize) -> Vec<usize> {
        let mut word = Vec::new();
        let mut c = c;
        while c != 0 {
            let (p, s) = self.parent[c];
            word.push(s as usize);
            c = p as usize;
        }
        word
    }

    /// Evaluate a word over the table's generators (`w[0] * w[1] * ...`).
    pub fn eval_word(&self, word: &[usize]) -> GroupElement {
        word.iter()
            .fold(self.ctx.identity(), |acc, &s| self.ctx.mul(&acc, &self.generators[s]))
    }

    /// Permutation of the cosets induced by generator `s`.
    pub fn action(&self, s: usize) -> &[u32] {
        &self.actions[s]
    }

    pub fn actions(&self) -> &[Vec<u32>] {
        &self.actions
    }

    /// Index of the coset `gH`, if `g` lies in the ambient group.
    pub fn coset_of(&self, g: &GroupElement) -> Option<usize> {
        self.lookup
            .get(&self.subgroup.coset_key(&self.ctx, g))
            .map(|&c| c as usize)
    }

    /// `c'` with `g * rep(c) * H = rep(c') * H`.
    pub fn act(&self, g: &GroupElement, c: usize) -> Option<usize> {
        self.coset_of(&self.ctx.mul(g, &self.reps[c]))
    }

    /// Permutation `Θ(g)` of the cosets.
    pub fn theta(&self, g: &GroupElement) -> Option<Vec<u32>> {
        (0..self.len())
            .map(|c| self.act(g, c).map(|t| t as u32))
            .collect()
    }

    /// Whether `Θ(g)` is the identity, i.e. `g` lies in every conjugate of `H`.
    pub fn acts_trivially(&self, g: &GroupElement) -> bool {
        (0..self.len()).all(|c| {
            let r = &self.reps[c];
            let h = self.ctx.mul(&self.ctx.inv(r), &self.ctx.mul(g, r));
            self.subgroup.contains(&self.ctx, &h)
        })
    }

    /// Schreier generators `rep(j)^-1 * s * rep(i)` with `j = s(i)`, without
    /// identities and repeats. They generate `H ∩ A`.
    pub fn schreier_generators(&self) -> Vec<GroupElement> {
        let mut seen = std::collections::HashSet::new();
        let mut out = Vec::new();
        for (s, g) in self.generators.iter().enumerate() {
            for i in 0..self.len() {
                let j = self.actions[s][i] as usize;
                let e = self
                    .ctx
                    .mul(&self.ctx.inv(&self.reps[j]), &self.ctx.mul(g, &self.reps[i]));
                if !self.ctx.is_identity(&e) && seen.insert(e.clone()) {
                    out.push(e);
                }
            }
        }
        out
    }
}

/// The permutation group `Θ(A)` acting on a coset table, closed by BFS, with
/// a witness word for every element. Element 0 is the identity.
#[derive(Clone)]
pub struct FiniteQuotient {
    degree: usize,
    perms: Vec<u32>,
    parent: Vec<(u32, u32)>,
    buckets: HashMap<u64, Vec<u32>>,
    // left_mul[s][e] = index of Θ(s) ∘ e
    left_mul: Vec<Vec<u32>>,
    stabilizer: Vec<u32>,
}

fn hash_perm(p: &[u32]) -> u64 {
    let mut h = DefaultHasher::new();
    p.hash(&mut h);
    h.finish()
}

impl FiniteQuotient {
    pub fn from_table(table: &CosetTable, caps: &Caps) -> Result<Self> {
        Self::from_generators(table.len(), table.actions(), caps)
    }

    /// Closure of the given permutations of `0..degree`.
    pub fn from_generators(degree: usize, gens: &[Vec<u32>], caps: &Caps) -> Result<Self> {
        let mut fq = FiniteQuotient {
            degree,
            perms: (0..degree as u32).collect(),
            parent: vec![(0, 0)],
            buckets: HashMap::new(),
            left_mul: vec![Vec::new(); gens.len()],
            stabilizer: Vec::new(),
        };
        fq.buckets.entry(hash_perm(&fq.perms)).or_default().push(0);
        let mut scratch = vec![0u32; degree];
        let mut e = 0usize;
        while e < fq.len() {
            for (s, g) in gens.iter().enumerate() {
                let base = e * degree;
                for c in 0..degree {
                    scratch[c] = g[fq.perms[base + c] as usize];
                }
                let idx = match fq.index_of(&scratch) {
                    Some(i) => i,
                    None => {
                        if fq.len() >= caps.perms {
                            return Err(ChainError::Resource {
                                what: "permutation group order".into(),
                                cap: caps.perms,
                                level: None,
                            });
                        }
                        let i = fq.len();
                        fq.perms.extend_from_slice(&scratch);
                        fq.parent.push((e as u32, s as u32));
                        fq.buckets.entry(hash_perm(&scratch)).or_default().push(i as u32);
                        i
                    }
                };
                fq.left_mul[s].push(idx as u32);
            }
            e += 1;
        }
        fq.stabilizer = (0..fq.len())
            .filter(|&e| degree == 0 || fq.perm(e)[0] == 0)
            .map(|e| e as u32)
            .collect();
        Ok(fq)
    }

    /// Group order `|Θ(A)|`.
    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn perm(&self, e: usize) -> &[u32] {
        &self.perms[e * self.degree..(e + 1) * self.degree]
    }

    pub fn index_of(&self, p: &[u32]) -> Option<usize> {
        self.buckets
            .get(&hash_perm(p))?
            .iter()
            .map(|&i| i as usize)
            .find(|&i| self.perm(i) == p)
    }

    /// Word over the generators whose image is element `e`.
    pub fn witness(&self, e: usize) -> Vec<usize> {
        let mut word = Vec::new();
        let mut e = e;
        while e != 0 {
            let (p, s) = self.parent[e];
            word.push(s as usize);
            e = p as usize;
        }
        word
    }

    /// Parent in the BFS tree and the generator applied on the left, for `e != 0`.
    pub fn parent(&self, e: usize) -> Option<(usize, usize)> {
        (e != 0).then(|| (self.parent[e].0 as usize, self.parent[e].1 as usize))
    }

    pub fn left_mul(&self, s: usize, e: usize) -> usize {
        self.left_mul[s][e] as usize
    }

    /// Index of `a ∘ b`.
    pub fn compose(&self, a: usize, b: usize) -> usize {
        let pa = self.perm(a);
        let p: Vec<u32> = self.perm(b).iter().map(|&c| pa[c as usize]).collect();
        self.index_of(&p).expect("closed under composition")
    }

    pub fn inverse(&self, a: usize) -> usize {
        let mut p = vec![0u32; self.degree];
        for (c, &t) in self.perm(a).iter().enumerate() {
            p[t as usize] = c as u32;
        }
        self.index_of(&p).expect("closed under inverses")
    }

    /// Elements fixing coset 0, i.e. `Θ(H)`.
    pub fn stabilizer(&self) -> &[u32] {
        &self.stabilizer
    }

    pub fn is_identity(&self, e: usize) -> bool {
        e == 0
    }
}

impl std::fmt::Debug for CosetTable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "CosetTable {{ cosets: {}, subgroup: {:?} }}", self.len(), self.subgroup)
    }
}

impl std::fmt::Debug for FiniteQuotient {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "FiniteQuotient {{ order: {}, degree: {}, stabilizer: {} }}",
            self.len(),
            self.degree,
            self.stabilizer.len()
        )
    }
}

/// Whether `g` acts trivially on `table`, i.e. `g` lies in the normal core.
pub fn core_membership(table: &CosetTable, g: &GroupElement) -> bool {
    table
        .theta(g)
        .is_some_and(|p| p.iter().enumerate().all(|(c, &t)| c as u32 == t))
}
