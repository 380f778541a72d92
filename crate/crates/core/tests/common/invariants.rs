//! Invariant checks shared by the property tests and the acceptance suite.

use std::collections::HashSet;

use chaincalc::chains::{
    build_levels, chains_equivalent, kernel_probe, normal_form_transform, DiscriminantVerdict, Equivalence, GroupChain,
    KernelProbe,
};
use chaincalc::cosets::{core_membership, Caps};
use chaincalc::odometer::{CosetTree, TreePoint};
use chaincalc::{ChainError, GroupContext, GroupElement};

use super::{inv, mul, big, brute_discriminant, brute_stable_image, core_samples, BruteCosets};

pub fn caps() -> Caps {
    Caps::default()
}

pub fn check_theta_homomorphism(chain: &GroupChain, g: &GroupElement, h: &GroupElement) {
    let ctx = chain.context();
    let levels = build_levels(chain, chain.depth(), &caps()).unwrap();
    let gh = mul(ctx, g, h);
    for lvl in levels.iter() {
        let (eg, eh) = (lvl.element_of(g).unwrap(), lvl.element_of(h).unwrap());
        assert_eq!(lvl.element_of(&gh).unwrap(), lvl.quotient.compose(eg, eh), "level {}", lvl.level);
        assert_eq!(lvl.element_of(&inv(ctx, g)).unwrap(), lvl.quotient.inverse(eg));
    }
}

pub fn check_bonding(chain: &GroupChain) {
    let d = chain.depth();
    let levels = build_levels(chain, d, &caps()).unwrap();
    for n in 1..=d {
        for e in 0..levels.level(n).quotient.len() {
            for i in 1..=n {
                let direct = levels.project_direct(n, i, e);
                assert_eq!(levels.project(n, i, e), direct, "θ^{n}_{i}({e})");
                for m in i..=n {
                    assert_eq!(levels.project(m, i, levels.project(n, m, e)), direct);
                }
            }
        }
    }
}

pub fn check_tables_against_brute_force(chain: &GroupChain) {
    let ctx = chain.context();
    let levels = build_levels(chain, chain.depth(), &caps()).unwrap();
    for lvl in levels.iter() {
        let brute = BruteCosets::new(ctx, chain.level(lvl.level));
        let index = chain.level(lvl.level).index(ctx);
        assert_eq!(index, big(brute.len() as i64));
        assert_eq!(lvl.table.len(), brute.len());
        // quotient order = |G / C_i|
        let quotient = brute.quotient();
        assert_eq!(lvl.quotient.len(), quotient.len());
        // D_i element by element
        let mut lib: Vec<u32> = lvl.discriminant().to_vec();
        lib.sort_unstable();
        let mut mine: Vec<u32> = brute_discriminant(&brute)
            .iter()
            .map(|p| lvl.quotient.index_of(&brute.to_table(&lvl.table, p)).unwrap() as u32)
            .collect();
        mine.sort_unstable();
        assert_eq!(lib, mine, "D_{}", lvl.level);
    }
}

pub fn check_cores(chain: &GroupChain) {
    let ctx = chain.context();
    let levels = build_levels(chain, chain.depth(), &caps()).unwrap();
    let brutes: Vec<BruteCosets> = (1..=chain.depth()).map(|i| BruteCosets::new(ctx, chain.level(i))).collect();
    for i in 0..chain.depth() {
        for g in core_samples(&brutes[i], 60) {
            let in_core = brutes[i].in_core(&g);
            assert_eq!(core_membership(&levels.level(i + 1).table, &g), in_core);
            assert_eq!(levels.level(i + 1).element_of(&g) == Some(0), in_core);
            // C_{i+1} ⊆ C_i
            if i + 1 < chain.depth() && brutes[i + 1].in_core(&g) {
                assert!(in_core, "core nesting fails at level {}", i + 1);
            }
        }
    }
}

pub fn check_stable_images(chain: &GroupChain) {
    let d = chain.depth();
    let levels = build_levels(chain, d, &caps()).unwrap();
    let stable = levels.stable_images(d, 1);
    for i in 1..=d {
        let lvl = levels.level(i);
        let brute = BruteCosets::new(chain.context(), chain.level(i));
        let mine: HashSet<u32> = brute_stable_image(chain, i, d)
            .iter()
            .map(|p| lvl.quotient.index_of(&brute.to_table(&lvl.table, p)).unwrap() as u32)
            .collect();
        let lib: HashSet<u32> = stable.set(i).iter().copied().collect();
        assert_eq!(lib, mine, "S_{i}");
        // the core of S_i in G/C_i is trivial, so S_i is normal only when trivial
        assert_eq!(levels.conjugate_intersection(i, stable.set(i)), vec![0]);
        if levels.is_normal_subset(i, stable.set(i)) {
            assert_eq!(stable.set(i), &[0]);
        }
    }
    if let DiscriminantVerdict::Finite { order, stabilized_at } = levels.discriminant_verdict(&stable) {
        assert!((stabilized_at..=d).all(|i| stable.size(i) == order));
    }
}

pub fn probe_in_kernel(chain: &GroupChain, g: &GroupElement, d: usize) -> bool {
    matches!(kernel_probe(chain, g, d).unwrap(), KernelProbe::InKernelUpTo(_))
}

pub fn check_equivalence(chain: &GroupChain, point: &GroupElement, probes: &[GroupElement]) {
    let d = chain.depth();
    let ctx = chain.context();
    let other = chain.conjugate(&vec![point.clone(); d]).unwrap();
    if let Equivalence::Equivalent(w) = chains_equivalent(chain, &other, d).unwrap() {
        for i in 1..=d {
            assert!(chain.level(w.a_to_b[i - 1]).is_subgroup_of(ctx, other.level(i)));
            assert!(other.level(w.b_to_a[i - 1]).is_subgroup_of(ctx, chain.level(i)));
        }
        for g in probes {
            assert_eq!(probe_in_kernel(chain, g, d), probe_in_kernel(&other, g, d), "{g}");
        }
    }
    // conjugating by an element of the deepest level changes nothing
    let inner = chain.level(d).generators(ctx).into_iter().fold(ctx.identity(), |acc, x| mul(ctx, &acc, &x));
    let same = chain.conjugate(&vec![inner; d]).unwrap();
    match chains_equivalent(chain, &same, d).unwrap() {
        Equivalence::Equivalent(w) => assert_eq!(w.a_to_b, (1..=d).collect::<Vec<_>>()),
        other => panic!("conjugate by a deep element is not equivalent: {other:?}"),
    }
}

pub fn check_tree_action(chain: &GroupChain, g: &GroupElement, h: &GroupElement) {
    let d = chain.depth();
    let tree = CosetTree::from_chain(chain, d, &caps()).unwrap();
    let ctx = chain.context();
    let p = tree.point_of(h, d).unwrap();
    assert!(tree.is_compatible(&p));
    let gh = tree.act(g, &p).unwrap();
    assert_eq!(gh, tree.point_of(&mul(ctx, g, h), d).unwrap());
    assert_eq!(tree.act(&ctx.identity(), &p).unwrap(), p);
    let back = tree.act(&inv(ctx, g), &gh).unwrap();
    assert_eq!(back, p);
    for k in 0..=d {
        assert_eq!(tree.act(g, &p.truncate(k)).unwrap(), gh.truncate(k));
    }
    assert_eq!(p == TreePoint::basepoint(d), chain.level(d).contains(ctx, h));
}

pub fn check_group_axioms(ctx: &GroupContext, g: &GroupElement, h: &GroupElement, k: &GroupElement) {
    let e = ctx.identity();
    assert_eq!(mul(ctx, &mul(ctx, g, h), k), mul(ctx, g, &mul(ctx, h, k)));
    assert_eq!(&mul(ctx, g, &e), g);
    assert_eq!(&mul(ctx, &e, g), g);
    assert!(ctx.is_identity(&mul(ctx, g, &inv(ctx, g))));
    assert!(ctx.is_identity(&mul(ctx, &inv(ctx, g), g)));
}

/// `G_i' = {g ∈ G_i : Θ_i(g) ∈ S_i}`, and its discriminants have trivial core.
pub fn check_normal_form(chain: &GroupChain, samples: &[GroupElement]) {
    let d = chain.depth();
    let levels = build_levels(chain, d, &caps()).unwrap();
    let stable = levels.stable_images(d, 1);
    let nf = match normal_form_transform(&levels, &stable) {
        Ok(nf) => nf,
        Err(ChainError::Unrepresentable(_)) => return,
        Err(e) => panic!("{e}"),
    };
    for i in 1..=d {
        let lvl = levels.level(i);
        for g in samples {
            let expected = chain.level(i).contains(chain.context(), g)
                && stable.set(i).contains(&(lvl.element_of(g).unwrap() as u32));
            assert_eq!(nf.level(i).contains(chain.context(), g), expected, "level {i}, {g}");
        }
    }
    let nf_levels = build_levels(&nf, d, &caps()).unwrap();
    for i in 1..=d {
        assert_eq!(nf_levels.conjugate_intersection(i, nf_levels.level(i).discriminant()), vec![0]);
    }
}
