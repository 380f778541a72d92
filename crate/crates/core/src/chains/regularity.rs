use serde::Serialize;

use super::{GroupChain, Levels};
use crate::cosets::{Caps, CosetTable};
use crate::error::Result;
use crate::groups::GroupElement;

/// Finite-depth regularity certificates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RegularityFlags {
    pub probe_depth: usize,
    /// For each level `i`, the least `j` with `G_j ⊆ C_i`, if one exists within the probe.
    pub regular_witnesses: Vec<Option<usize>>,
    pub regular: bool,
    pub weakly_normal_at: Option<usize>,
    /// Least base level `m` with `G_i ∩ C_m = C_i` at every built level `i >= m`.
    pub core_witness_level: Option<usize>,
    pub virtually_regular: bool,
}

fn acts_trivially(table: &CosetTable, g: &GroupElement) -> bool {
    (0..table.len()).all(|c| table.act(g, c) == Some(c))
}

/// For levels `from+1..=probe`, the least `j` in `i..=probe` with `G_j`
/// inside the core of `G_i` relative to `G_from`. Stops at the first level
/// without a witness.
fn relative_witnesses(chain: &GroupChain, from: usize, probe: usize, caps: &Caps) -> Result<Vec<Option<usize>>> {
    let ctx = chain.context();
    let ambient = if from == 0 {
        ctx.generators().to_vec()
    } else {
        chain.level(from).generators(ctx)
    };
    let mut out = Vec::new();
    for i in (from + 1)..=probe {
        let table = CosetTable::enumerate_with(ctx, chain.level(i), ambient.clone(), caps).map_err(|e| e.at_level(i))?;
        let j = (i..=probe).find(|&j| chain.level(j).generators(ctx).iter().all(|h| acts_trivially(&table, h)));
        out.push(j);
        if j.is_none() {
            break;
        }
    }
    Ok(out)
}

/// For each level `i <= probe`, the least `j` with `G_j ⊆ C_i`.
pub fn regular_at_depth(chain: &GroupChain, probe: usize, caps: &Caps) -> Result<Vec<Option<usize>>> {
    let probe = probe.min(chain.depth());
    let mut w = relative_witnesses(chain, 0, probe, caps)?;
    w.resize(probe, None);
    Ok(w)
}

/// Least `i0` such that `{G_i}_{i > i0}` is regular inside `G_{i0}` through
/// the probe depth. At least two levels below `i0` are required, since a
/// single index-2 step is always normal.
pub fn weakly_normal_at(chain: &GroupChain, probe: usize, caps: &Caps) -> Result<Option<usize>> {
    let probe = probe.min(chain.depth());
    for i0 in 0..probe.saturating_sub(1) {
        let w = relative_witnesses(chain, i0, probe, caps)?;
        if w.len() == probe - i0 && w.iter().all(Option::is_some) {
            return Ok(Some(i0));
        }
    }
    Ok(None)
}

/// Regularity, weak normality (over `probe` chain levels, coset tables only)
/// and the core witness for virtual regularity (over the built levels,
/// spanning at least `window` levels).
pub fn regularity_flags(
    levels: &Levels,
    chain: &GroupChain,
    probe: usize,
    window: usize,
    caps: &Caps,
) -> Result<RegularityFlags> {
    let probe = probe.min(chain.depth());
    let regular_witnesses = regular_at_depth(chain, probe, caps)?;
    let regular = regular_witnesses.iter().all(Option::is_some);
    let weakly_normal_at = if regular { Some(0) } else { weakly_normal_at(chain, probe, caps)? };
    let witness = levels.core_witness_level(window);
    Ok(RegularityFlags {
        probe_depth: probe,
        regular_witnesses,
        regular,
        weakly_normal_at,
        core_witness_level: witness,
        virtually_regular: weakly_normal_at.is_some() || witness.is_some(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chains::build_levels;
    use crate::chains::tests::dihedral_chain;

    #[test]
    fn dihedral_is_virtually_regular_only() {
        let chain = dihedral_chain(6);
        let caps = Caps::default();
        let levels = build_levels(&chain, 4, &caps).unwrap();
        let flags = regularity_flags(&levels, &chain, 6, 2, &caps).unwrap();
        assert!(!flags.regular);
        // G_1 is normal, nothing deeper lies in C_2
        assert_eq!(flags.regular_witnesses, vec![Some(1), None, None, None, None, None]);
        assert_eq!(flags.weakly_normal_at, None);
        assert_eq!(flags.core_witness_level, Some(2));
        assert!(flags.virtually_regular);
    }
}
