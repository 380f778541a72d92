//! Group chains `G = G_0 ⊃ G_1 ⊃ ...` and the level-wise calculus on them.

mod levels;
mod regularity;
mod report;

pub use levels::{
    build_levels, kernel_core_factorization, normal_form_transform, DiscriminantVerdict, LevelData,
    Levels, StableImages, DEFAULT_WINDOW,
};
pub use regularity::{regular_at_depth, regularity_flags, weakly_normal_at, RegularityFlags};
pub use report::{analyze, AnalysisOptions, ChainReport, KernelFindings, LevelRow, REPORT_VERSION};

use serde::Serialize;

use crate::error::{ChainError, Result};
use crate::groups::{GroupContext, GroupElement, SubgroupData};

/// How a chain was produced.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Provenance {
    Explicit,
    Parametric { params: Vec<(String, i64)> },
    Conjugate,
    NormalForm,
}

/// A nested sequence of finite-index subgroups; `levels[0]` is `G_1`.
#[derive(Clone, Debug)]
pub struct GroupChain {
    ctx: GroupContext,
    levels: Vec<SubgroupData>,
    provenance: Provenance,
}

impl GroupChain {
    /// A properly descending chain: each level contains the next and has
    /// strictly smaller index.
    pub fn new(ctx: &GroupContext, levels: Vec<SubgroupData>, provenance: Provenance) -> Result<Self> {
        let chain = Self::nested(ctx, levels, provenance)?;
        let mut prev = num_bigint::BigInt::from(1);
        for (i, h) in chain.levels.iter().enumerate() {
            let idx = h.index(ctx);
            if idx <= prev {
                return Err(ChainError::validation(format!(
                    "chain does not descend properly at level {}: index {idx} after {prev}",
                    i + 1
                )));
            }
            prev = idx;
        }
        Ok(chain)
    }

    /// A nested chain where consecutive levels may coincide.
    pub fn nested(ctx: &GroupContext, levels: Vec<SubgroupData>, provenance: Provenance) -> Result<Self> {
        for (i, h) in levels.iter().enumerate() {
            if h.family() != ctx.family() {
                return Err(ChainError::structure(format!("level {} has the wrong family", i + 1)));
            }
            if i > 0 && !h.is_subgroup_of(ctx, &levels[i - 1]) {
                return Err(ChainError::validation(format!(
                    "chain is not nested: level {} is not contained in level {}",
                    i + 1,
                    i
                )));
            }
        }
        Ok(GroupChain {
            ctx: ctx.clone(),
            levels,
            provenance,
        })
    }

    pub fn context(&self) -> &GroupContext {
        &self.ctx
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    /// `G_i` for `1 <= i <= depth`.
    pub fn level(&self, i: usize) -> &SubgroupData {
        &self.levels[i - 1]
    }

    pub fn levels(&self) -> &[SubgroupData] {
        &self.levels
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// The first `depth` levels.
    pub fn truncate(&self, depth: usize) -> GroupChain {
        GroupChain {
            ctx: self.ctx.clone(),
            levels: self.levels[..depth.min(self.depth())].to_vec(),
            provenance: self.provenance.clone(),
        }
    }

    /// `{g_i G_i g_i^-1}` for point representatives with `g_i^-1 g_j ∈ G_i`
    /// whenever `j >= i`.
    pub fn conjugate(&self, point_reps: &[GroupElement]) -> Result<GroupChain> {
        if point_reps.len() < self.depth() {
            return Err(ChainError::Precondition(format!(
                "need {} point representatives, got {}",
                self.depth(),
                point_reps.len()
            )));
        }
        let ctx = &self.ctx;
        for i in 0..self.depth() {
            let gi_inv = ctx.inverse(&point_reps[i])?;
            for (j, gj) in point_reps.iter().enumerate().take(self.depth()).skip(i + 1) {
                if !self.levels[i].contains(ctx, &ctx.mul(&gi_inv, gj)) {
                    return Err(ChainError::Precondition(format!(
                        "point representatives are not compatible at level {}: g_{}^-1 g_{} is not in G_{}",
                        i + 1,
                        i + 1,
                        j + 1,
                        i + 1
                    )));
                }
            }
        }
        let levels = self
            .levels
            .iter()
            .zip(point_reps)
            .map(|(h, g)| h.conjugate(ctx, g))
            .collect::<Result<Vec<_>>>()?;
        GroupChain::new(ctx, levels, Provenance::Conjugate)
    }
}

/// Interleaving witness: `a_to_b[i-1] = j` means `A_j ⊆ B_i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Interleaving {
    pub a_to_b: Vec<usize>,
    pub b_to_a: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "result")]
pub enum Equivalence {
    Equivalent(Interleaving),
    NoWitnessAtDepth { depth: usize, failed_level: usize },
}

impl Equivalence {
    pub fn is_equivalent(&self) -> bool {
        matches!(self, Equivalence::Equivalent(_))
    }
}

fn least_contained(ctx: &GroupContext, from: &GroupChain, target: &SubgroupData, depth: usize) -> Option<usize> {
    (1..=depth.min(from.depth())).find(|&j| from.level(j).is_subgroup_of(ctx, target))
}

/// Search for a mutual interleaving of two chains over their first `depth`
/// levels. Failure is inconclusive beyond the probed depth.
pub fn chains_equivalent(a: &GroupChain, b: &GroupChain, depth: usize) -> Result<Equivalence> {
    if a.context() != b.context() {
        return Err(ChainError::structure("chains live in different groups"));
    }
    let ctx = a.context();
    let depth = depth.min(a.depth()).min(b.depth());
    let mut a_to_b = Vec::new();
    let mut b_to_a = Vec::new();
    for i in 1..=depth {
        match least_contained(ctx, a, b.level(i), depth) {
            Some(j) => a_to_b.push(j),
            None => return Ok(Equivalence::NoWitnessAtDepth { depth, failed_level: i }),
        }
        match least_contained(ctx, b, a.level(i), depth) {
            Some(j) => b_to_a.push(j),
            None => return Ok(Equivalence::NoWitnessAtDepth { depth, failed_level: i }),
        }
    }
    Ok(Equivalence::Equivalent(Interleaving { a_to_b, b_to_a }))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "result", content = "level")]
pub enum KernelProbe {
    InKernelUpTo(usize),
    ExitsAt(usize),
}

/// First level `i <= max_level` with `g ∉ G_i`, if any.
pub fn kernel_probe(chain: &GroupChain, g: &GroupElement, max_level: usize) -> Result<KernelProbe> {
    chain.context().check(g)?;
    let max_level = max_level.min(chain.depth());
    for i in 1..=max_level {
        if !chain.level(i).contains(chain.context(), g) {
            return Ok(KernelProbe::ExitsAt(i));
        }
    }
    Ok(KernelProbe::InKernelUpTo(max_level))
}
