//! Acceptance suite: one line per criterion, non-zero exit if any fails.

mod common;

use std::collections::HashSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::Command;

use chaincalc::catalog::{self, Params};
use chaincalc::chains::{
    analyze, build_levels, chains_equivalent, kernel_core_factorization, kernel_probe, AnalysisOptions,
    DiscriminantVerdict, GroupChain, KernelProbe, Levels, StableImages,
};
use chaincalc::cosets::{core_membership, Caps};
use chaincalc::{GroupContext, GroupElement};
use common::invariants::*;
use common::*;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn caps() -> Caps {
    Caps::default()
}

fn chain(name: &str, depth: usize) -> GroupChain {
    catalog::instantiate(name, &Params::new(), depth).unwrap()
}

/// Analysis through `depth` levels with regularity checks through `regularity` levels.
fn run(chain: &GroupChain, depth: usize, regularity: usize, kernel: Option<Vec<GroupElement>>) -> (chaincalc::chains::ChainReport, Levels, StableImages) {
    let mut opts = AnalysisOptions::new(depth);
    opts.caps = caps();
    opts.regularity_depth = regularity;
    opts.kernel_generators = kernel;
    analyze(chain, &opts).unwrap()
}

/// Library `S_i` as permutations of the level-`i` coset table.
fn library_set(levels: &Levels, i: usize, set: &[u32]) -> HashSet<Vec<u32>> {
    let q = &levels.level(i).quotient;
    set.iter().map(|&e| q.perm(e as usize).to_vec()).collect()
}

fn brute_in_table(levels: &Levels, brute: &BruteCosets, i: usize, perms: &HashSet<Vec<usize>>) -> HashSet<Vec<u32>> {
    perms.iter().map(|p| brute.to_table(&levels.level(i).table, p)).collect()
}

fn b() -> GroupElement {
    GroupElement::lattice(&[0], 1)
}

fn criterion_1() -> Outcome {
    let c = chain("dihedral", 6);
    let ctx = c.context();
    for i in 1..=6 {
        let expected = 1i64 << i;
        let index = c.level(i).index(ctx);
        ensure(index == big(expected), || format!("|G:G_{i}| = {index}, expected {expected}"))?;
        let counted = BruteCosets::new(ctx, c.level(i)).len();
        ensure(counted as i64 == expected, || format!("brute-force coset count {counted} at level {i}"))?;
    }
    Ok("|G:G_i| = 2, 4, 8, 16, 32, 64".into())
}

fn criterion_2() -> Outcome {
    let c = chain("dihedral", 8);
    let (report, levels, stable) = run(&c, 6, 6, None);
    ensure(matches!(report.discriminant, DiscriminantVerdict::Finite { order: 2, .. }), || {
        format!("verdict {}", report.discriminant)
    })?;
    for i in 2..=6 {
        let brute = BruteCosets::new(c.context(), c.level(i));
        let expected: HashSet<Vec<usize>> = [(0..brute.len()).collect(), brute.perm_of(&b())].into();
        let from_scratch = brute_stable_image(&c, i, 6);
        ensure(from_scratch == expected, || format!("recomputed S_{i} is not {{id, Θ(b)}}"))?;
        ensure(library_set(&levels, i, stable.set(i)) == brute_in_table(&levels, &brute, i, &expected), || {
            format!("S_{i} differs from {{id, Θ_{i}(b)}}")
        })?;
    }
    Ok(format!("{}; S_i = {{id, Θ_i(b)}} for i = 2..6", report.discriminant))
}

fn criterion_3() -> Outcome {
    let c = chain("dihedral", 6);
    let ctx = c.context();
    let (report, levels, _) = run(&c, 6, 6, Some(vec![b()]));
    let reg = &report.regularity;
    ensure(reg.weakly_normal_at.is_none(), || format!("weakly normal from level {:?}", reg.weakly_normal_at))?;
    ensure(reg.core_witness_level.is_some() && reg.virtually_regular, || "no core witness level".into())?;
    let factor = kernel_core_factorization(&levels, &[b()]);
    ensure(factor.iter().all(|&x| x), || format!("G_i = <b> C_i fails: {factor:?}"))?;
    let a = GroupElement::lattice(&[1], 0);
    let conj = c.conjugate(&vec![a.clone(); 6]).unwrap();
    let a2b = GroupElement::lattice(&[2], 1);
    ensure(kernel_probe(&conj, &a2b, 6).unwrap() == KernelProbe::InKernelUpTo(6), || "a^2 b leaves a G_i a^-1".into())?;
    // a^-1 (a^2 b) a ∈ G_i directly
    let back = mul(ctx, &mul(ctx, &inv(ctx, &a), &a2b), &a);
    ensure((1..=6).all(|i| c.level(i).contains(ctx, &back)), || "a b a not in every G_i".into())?;
    let eq = chains_equivalent(&c, &conj, 6).unwrap();
    ensure(!eq.is_equivalent(), || "chain is equivalent to its conjugate by a".into())?;
    Ok(format!(
        "no weak-normality certificate; core witness at level {}; stable with K = <b>; conjugate by a has kernel a^2 b and is not equivalent",
        reg.core_witness_level.unwrap()
    ))
}

fn criterion_4() -> Outcome {
    let c = chain("product", 5);
    let ctx = c.context();
    let kernel = catalog::kernel_generators(&c, "product", &catalog::resolve_params("product", &Params::new()).unwrap());
    let (report, levels, _) = run(&c, 3, 5, Some(kernel.clone()));
    let order = ctx.finite().unwrap().order();
    for i in 1..=3 {
        let brute = BruteCosets::new(ctx, c.level(i));
        let r = 3i64.pow(i as u32);
        for k in 0..order {
            for v in [-2 * r, -r, -1, 0, 1, r / 3, r, 2 * r, r + 1] {
                let g = GroupElement::lattice(&[v], k);
                let expected = k == 0 && v % r == 0;
                ensure(brute.in_core(&g) == expected, || format!("oracle: {g} in C_{i} should be {expected}"))?;
                ensure(core_membership(&levels.level(i).table, &g) == expected, || format!("{g} in C_{i} should be {expected}"))?;
            }
        }
        let d = levels.level(i).discriminant().len();
        ensure(d == 12, || format!("|D_{i}| = {d}"))?;
    }
    ensure(matches!(report.discriminant, DiscriminantVerdict::Finite { order: 12, .. }), || {
        format!("verdict {}", report.discriminant)
    })?;
    let stable = catalog::stable_at_orbit_points(&c, &kernel, 3, &caps()).unwrap();
    ensure(stable, || "not stable".into())?;
    Ok(format!("C_i = {{e}} × 3^i Z; |D_i| = 12; {}; stable", report.discriminant))
}

fn criterion_5() -> Outcome {
    let c = chain("heis-wr", 5);
    let (report, _, stable) = run(&c, 3, 5, None);
    for (i, h) in c.levels().iter().enumerate() {
        ensure(h.heisenberg_row_condition() == Some(true), || format!("level {} fails the row condition", i + 1))?;
    }
    let sizes: Vec<usize> = (1..=3).map(|i| stable.size(i)).collect();
    ensure(sizes == [2, 2, 2], || format!("|S_i| = {sizes:?}"))?;
    Ok(format!("row condition at all levels; |S_i| = {sizes:?}; {}", report.discriminant))
}

fn criterion_6() -> Outcome {
    let c = chain("heis-main6", 5);
    let ctx = c.context();
    let samples = catalog::sample_elements(ctx, 100);
    ensure(samples.len() == 100, || "fewer than 100 samples".into())?;
    for g in &samples {
        ensure(kernel_probe(&c, g, 3).unwrap() != KernelProbe::InKernelUpTo(3), || format!("{g} survives to level 3"))?;
        ensure(!(1..=3).all(|i| c.level(i).contains(ctx, g)), || format!("{g} lies in G_1, G_2, G_3"))?;
    }
    let (report, _, stable) = run(&c, 3, 5, None);
    let sizes: Vec<usize> = (1..=3).map(|i| stable.size(i)).collect();
    ensure(sizes.windows(2).all(|w| w[0] < w[1]) && (0..3).all(|k| sizes[k] >= 2usize.pow(k as u32 + 1)), || {
        format!("|S_n| = {sizes:?}")
    })?;
    ensure(matches!(report.discriminant, DiscriminantVerdict::LowerBound { bound: 8, .. }), || {
        format!("verdict {}", report.discriminant)
    })?;
    Ok(format!("no survivors among 100 samples; |S_n| = {sizes:?}; {}", report.discriminant))
}

fn criterion_7() -> Outcome {
    let c = chain("dihedral-swap", 4);
    let ctx = c.context();
    let (report, levels, _) = run(&c, 2, 4, Some(vec![]));
    for i in 1..=2 {
        let brute = BruteCosets::new(ctx, c.level(i));
        let d = brute_discriminant(&brute).len();
        ensure(d == 6usize.pow(i as u32), || format!("recomputed |D_{i}| = {d}"))?;
        ensure(levels.level(i).discriminant().len() == d, || format!("|D_{i}| differs from recomputation"))?;
        ensure(levels.bond_surjective(i), || format!("bond onto D_{} fails", i.saturating_sub(1)))?;
    }
    ensure(report.regularity.weakly_normal_at == Some(1), || {
        format!("weakly normal from {:?}", report.regularity.weakly_normal_at)
    })?;
    let stable = catalog::stable_at_orbit_points(&c, &[], 2, &caps()).unwrap();
    ensure(!stable, || "trivial kernel but reported stable".into())?;
    Ok("|D_i| = 6, 36; bonding onto; weakly normal from level 1; not stable".into())
}

fn criterion_8() -> Outcome {
    let mut notes = Vec::new();
    for name in catalog::names() {
        let depth = if name == "gen-dihedral" { 1 } else { 2 };
        let c = chain(name, depth);
        let ctx = c.context().clone();
        let levels = build_levels(&c, depth, &caps()).unwrap();
        let stable = levels.stable_images(depth, 1);
        for i in 1..=depth {
            let brute = BruteCosets::new(&ctx, c.level(i));
            let table = levels.level(i).table.clone();
            for g in core_samples(&brute, 80) {
                ensure(core_membership(&table, &g) == brute.in_core(&g), || format!("{name} level {i}: core membership of {g}"))?;
            }
            let mut runner = TestRunner::new(Config::with_cases(100));
            runner
                .run(&element_in(&ctx), |g| {
                    prop_assert_eq!(core_membership(&table, &g), brute.in_core(&g));
                    Ok(())
                })
                .map_err(|e| format!("{name} level {i}: {e}"))?;
            let lib_d = library_set(&levels, i, levels.level(i).discriminant());
            let small = levels.level(i).quotient.len() <= 5000;
            let brute_d: HashSet<Vec<usize>> = if small {
                brute_discriminant(&brute).into_iter().collect()
            } else {
                brute_subgroup_image(&brute, &c.level(i).generators(&ctx))
            };
            ensure(lib_d == brute_in_table(&levels, &brute, i, &brute_d), || format!("{name}: D_{i} differs"))?;
            let brute_s = if small { brute_stable_image(&c, i, depth) } else { brute_d };
            ensure(library_set(&levels, i, stable.set(i)) == brute_in_table(&levels, &brute, i, &brute_s), || {
                format!("{name}: S_{i} differs")
            })?;
        }
        if depth == 1 {
            notes.push(format!("{name} at level 1 only"));
        }
    }
    Ok(format!("all catalog chains agree with brute force ({})", notes.join(", ")))
}

fn cases<S: Strategy>(what: &str, strategy: S, check: impl Fn(S::Value)) -> Result<(), String>
where
    S::Value: std::fmt::Debug,
{
    TestRunner::new(Config::with_cases(100))
        .run(&strategy, |v| {
            check(v);
            Ok(())
        })
        .map_err(|e| format!("{what}: {e}"))
}

fn family_invariants(name: &str, ctx: GroupContext, chains: BoxedStrategy<GroupChain>) -> Result<(), String> {
    let el = element_in(&ctx);
    let w = word_element(&ctx, 8);
    let tag = |what: &str| format!("{name} {what}");
    cases(&tag("group axioms"), (el.clone(), el.clone(), el.clone()), |(g, h, k)| check_group_axioms(&ctx, &g, &h, &k))?;
    cases(&tag("Θ homomorphism"), (chains.clone(), el.clone(), w.clone()), |(c, g, h)| check_theta_homomorphism(&c, &g, &h))?;
    cases(&tag("bonding coherence"), chains.clone(), |c| check_bonding(&c))?;
    cases(&tag("core nesting"), chains.clone(), |c| check_cores(&c))?;
    cases(&tag("normal-form rational core"), (chains.clone(), prop::collection::vec(w.clone(), 16)), |(c, samples)| {
        check_normal_form(&c, &samples)
    })?;
    cases(&tag("normality dichotomy"), chains.clone(), |c| check_stable_images(&c))?;
    cases(
        &tag("equivalence and kernel probes"),
        (chains, word_element(&ctx, 6), prop::collection::vec(el, 12)),
        |(c, p, probes)| check_equivalence(&c, &p, &probes),
    )
}

fn criterion_9() -> Outcome {
    family_invariants("dihedral", dihedral_ctx(), dihedral_chain(4).boxed())?;
    family_invariants("product", product_ctx(), product_chain(3).boxed())?;
    family_invariants("heisenberg", GroupContext::heisenberg(), heisenberg_chain(2).boxed())?;
    family_invariants("swap", swap_ctx(), swap_chain(2).boxed())?;
    Ok("7 invariants × 4 families × 100 cases".into())
}

fn criterion_10() -> Outcome {
    let specs = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../specs");
    for name in catalog::names() {
        let path = specs.join(format!("{name}.toml"));
        let once = || {
            Command::new(env!("CARGO_BIN_EXE_chaincalc"))
                .args(["analyze", path.to_str().unwrap(), "--format", "machine"])
                .output()
                .unwrap()
        };
        let (a, b) = (once(), once());
        ensure(a.status.success(), || format!("{name}: {}", String::from_utf8_lossy(&a.stderr)))?;
        ensure(a.stdout == b.stdout, || format!("{name}: reports differ"))?;
    }
    Ok(format!("{} specs, byte-identical reports", catalog::names().len()))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("dihedral indices", criterion_1),
        ("dihedral discriminant", criterion_2),
        ("dihedral regularity, stability and conjugates", criterion_3),
        ("product example", criterion_4),
        ("Heisenberg wreath-type chain", criterion_5),
        ("Heisenberg chain with growing discriminant", criterion_6),
        ("Z^2 ⋊ Z2 swap chain", criterion_7),
        ("brute-force oracle agreement", criterion_8),
        ("invariant suite", criterion_9),
        ("determinism", criterion_10),
    ];
    let mut failed = 0;
    for (n, (name, f)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        match outcome {
            Ok(detail) => println!("criterion {:>2} {name}: PASS ({detail})", n + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} {name}: FAIL ({why})", n + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
