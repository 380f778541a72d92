//! Built-in example chains with their expected invariants.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::Serialize;

use crate::chains::{
    analyze, chains_equivalent, kernel_core_factorization, kernel_probe, regularity_flags, AnalysisOptions,
    ChainReport, DiscriminantVerdict, GroupChain, KernelProbe, Levels, Provenance,
};
use crate::cosets::{core_membership, Caps};
use crate::error::{ChainError, Result};
use crate::groups::{FiniteGroupTable, GroupContext, GroupElement, IntMatrix, Lattice, SubgroupData};
use crate::odometer::CosetTree;

pub type Params = BTreeMap<String, i64>;

#[derive(Clone, Debug, Serialize)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub summary: &'static str,
    pub default_params: &'static [(&'static str, i64)],
    /// Levels with full permutation quotients in the regression run.
    pub default_depth: usize,
}

pub const ENTRIES: &[CatalogEntry] = &[
    CatalogEntry {
        name: "dihedral",
        summary: "Z ⋊ Z2 (infinite dihedral group), G_i = <a^(2^i), b>",
        default_params: &[],
        default_depth: 6,
    },
    CatalogEntry {
        name: "product",
        summary: "A5 × Z, G_i = A4 × r^i Z",
        default_params: &[("r", 3)],
        default_depth: 3,
    },
    CatalogEntry {
        name: "heis-wr",
        summary: "Heisenberg group, G_n = M_n Z^2 × pZ with M_n = [[q p^n, p q^n], [p^(n+1), q^(n+1)]]",
        default_params: &[("p", 2), ("q", 3)],
        default_depth: 3,
    },
    CatalogEntry {
        name: "heis-main6",
        summary: "Heisenberg group, G_n = diag(p^n, q^n) Z^2 × p^n Z",
        default_params: &[("p", 2), ("q", 3)],
        default_depth: 3,
    },
    CatalogEntry {
        name: "dihedral-swap",
        summary: "Z^2 ⋊ Z2 with the swap action, G_i = diag(p^i, q^i) Z^2 × {e}",
        default_params: &[("p", 2), ("q", 3)],
        default_depth: 2,
    },
    CatalogEntry {
        name: "gen-dihedral",
        summary: "Z^n ⋊ S_n permuting coordinates, G_i = diag(p_1^i, ..., p_n^i) Z^n × {e}",
        default_params: &[("n", 3), ("p1", 2), ("p2", 3), ("p3", 5)],
        default_depth: 1,
    },
    CatalogEntry {
        name: "all-normal",
        summary: "Z × Z2, G_i = 2^i Z × Z2 (every level normal)",
        default_params: &[],
        default_depth: 4,
    },
];

pub fn entry(name: &str) -> Option<&'static CatalogEntry> {
    ENTRIES.iter().find(|e| e.name == name)
}

pub fn names() -> Vec<&'static str> {
    ENTRIES.iter().map(|e| e.name).collect()
}

fn lookup(name: &str) -> Result<&'static CatalogEntry> {
    entry(name).ok_or_else(|| {
        ChainError::validation(format!(
            "unknown catalog entry `{name}` (known: {})",
            names().join(", ")
        ))
    })
}

/// Defaults overridden by `overrides`; unknown keys are rejected.
pub fn resolve_params(name: &str, overrides: &Params) -> Result<Params> {
    let e = lookup(name)?;
    let mut params: Params = e.default_params.iter().map(|(k, v)| (k.to_string(), *v)).collect();
    for (k, v) in overrides {
        let known = params.contains_key(k) || (e.name == "gen-dihedral" && k.starts_with('p'));
        if !known {
            return Err(ChainError::validation(format!("entry `{}` has no parameter `{k}`", e.name)));
        }
        params.insert(k.clone(), *v);
    }
    Ok(params)
}

fn is_prime(n: i64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

/// Every value must be prime and all must differ.
pub fn check_distinct_primes(primes: &[(String, i64)]) -> Result<()> {
    for (k, p) in primes {
        if !is_prime(*p) {
            return Err(ChainError::validation(format!("{k} = {p} is not prime")));
        }
    }
    for (i, (k1, p1)) in primes.iter().enumerate() {
        for (k2, p2) in &primes[i + 1..] {
            if p1 == p2 {
                return Err(ChainError::validation(format!(
                    "primes must be distinct ({k1} = {k2} = {p1})"
                )));
            }
        }
    }
    Ok(())
}

fn big(x: i64) -> BigInt {
    BigInt::from(x)
}

fn pow(p: i64, n: usize) -> BigInt {
    num_traits::pow(big(p), n)
}

fn param(params: &Params, k: &str) -> i64 {
    params[k]
}

fn diagonal(entries: Vec<BigInt>) -> IntMatrix {
    let n = entries.len();
    let mut m = IntMatrix::zeros(n, n);
    for (i, x) in entries.into_iter().enumerate() {
        m[(i, i)] = x;
    }
    m
}

fn lattice_level(ctx: &GroupContext, basis: &IntMatrix, finite: Vec<usize>) -> Result<SubgroupData> {
    let rank = basis.rows();
    let n = finite.len();
    SubgroupData::lattice(ctx, Lattice::from_matrix(basis)?, finite, vec![vec![BigInt::zero(); rank]; n])
}

pub fn dihedral_context() -> GroupContext {
    let z2 = FiniteGroupTable::cyclic(2).expect("Z2");
    let action = vec![IntMatrix::identity(1), IntMatrix::from_rows(&[vec![-1]]).unwrap()];
    GroupContext::lattice_semidirect(1, z2, action).expect("dihedral action")
}

pub fn swap_context() -> GroupContext {
    let z2 = FiniteGroupTable::cyclic(2).expect("Z2");
    let swap = IntMatrix::from_rows(&[vec![0, 1], vec![1, 0]]).unwrap();
    GroupContext::lattice_semidirect(2, z2, vec![IntMatrix::identity(2), swap]).expect("swap action")
}

/// The primes of an entry, in parameter order.
fn primes_of(name: &str, params: &Params) -> Vec<(String, i64)> {
    match name {
        "heis-wr" | "heis-main6" | "dihedral-swap" => vec![("p".into(), params["p"]), ("q".into(), params["q"])],
        "gen-dihedral" => (1..=params["n"]).map(|j| (format!("p{j}"), params[&format!("p{j}")])).collect(),
        _ => Vec::new(),
    }
}

/// Build an entry's chain with `depth` levels.
pub fn instantiate(name: &str, overrides: &Params, depth: usize) -> Result<GroupChain> {
    let e = lookup(name)?;
    let params = resolve_params(name, overrides)?;
    if e.name == "gen-dihedral" {
        let n = params["n"];
        if !(1..=4).contains(&n) {
            return Err(ChainError::validation("gen-dihedral needs 1 <= n <= 4"));
        }
        for j in 1..=n {
            if !params.contains_key(&format!("p{j}")) {
                return Err(ChainError::validation(format!("gen-dihedral with n = {n} needs parameter p{j}")));
            }
        }
    }
    check_distinct_primes(&primes_of(e.name, &params))?;
    let provenance = Provenance::Parametric {
        params: params.iter().map(|(k, v)| (k.clone(), *v)).collect(),
    };
    let levels_1 = 1..=depth;
    match e.name {
        "dihedral" => {
            let ctx = dihedral_context();
            let levels = levels_1
                .map(|i| lattice_level(&ctx, &diagonal(vec![pow(2, i)]), vec![0, 1]))
                .collect::<Result<_>>()?;
            GroupChain::new(&ctx, levels, provenance)
        }
        "product" => {
            let r = param(&params, "r");
            if r < 2 {
                return Err(ChainError::validation("r must be at least 2"));
            }
            let a5 = FiniteGroupTable::alternating(5)?;
            let k = product_kernel_part(&a5);
            let ctx = GroupContext::direct_product(1, a5)?;
            let levels = levels_1
                .map(|i| lattice_level(&ctx, &diagonal(vec![pow(r, i)]), k.clone()))
                .collect::<Result<_>>()?;
            GroupChain::new(&ctx, levels, provenance)
        }
        "heis-wr" => {
            let (p, q) = (param(&params, "p"), param(&params, "q"));
            let ctx = GroupContext::heisenberg();
            let levels = levels_1
                .map(|n| {
                    let m = IntMatrix::from_rows(&[
                        vec![big(q) * pow(p, n), big(p) * pow(q, n)],
                        vec![pow(p, n + 1), pow(q, n + 1)],
                    ])?;
                    SubgroupData::heisenberg(&ctx, &m, p)
                })
                .collect::<Result<_>>()?;
            GroupChain::new(&ctx, levels, provenance)
        }
        "heis-main6" => {
            let (p, q) = (param(&params, "p"), param(&params, "q"));
            let ctx = GroupContext::heisenberg();
            let levels = levels_1
                .map(|n| SubgroupData::heisenberg(&ctx, &diagonal(vec![pow(p, n), pow(q, n)]), pow(p, n)))
                .collect::<Result<_>>()?;
            GroupChain::new(&ctx, levels, provenance)
        }
        "dihedral-swap" => {
            let (p, q) = (param(&params, "p"), param(&params, "q"));
            let ctx = swap_context();
            let levels = levels_1
                .map(|i| lattice_level(&ctx, &diagonal(vec![pow(p, i), pow(q, i)]), vec![0]))
                .collect::<Result<_>>()?;
            GroupChain::new(&ctx, levels, provenance)
        }
        "gen-dihedral" => {
            let n = params["n"] as usize;
            let primes: Vec<i64> = (1..=n).map(|j| params[&format!("p{j}")]).collect();
            let ctx = GroupContext::permutation_semidirect(FiniteGroupTable::symmetric(n)?)?;
            let levels = levels_1
                .map(|i| lattice_level(&ctx, &diagonal(primes.iter().map(|&p| pow(p, i)).collect()), vec![0]))
                .collect::<Result<_>>()?;
            GroupChain::new(&ctx, levels, provenance)
        }
        "all-normal" => {
            let ctx = GroupContext::direct_product(1, FiniteGroupTable::cyclic(2)?)?;
            let levels = levels_1
                .map(|i| lattice_level(&ctx, &diagonal(vec![pow(2, i)]), vec![0, 1]))
                .collect::<Result<_>>()?;
            GroupChain::new(&ctx, levels, provenance)
        }
        _ => unreachable!(),
    }
}

/// A4 inside A5 as the stabilizer of the point 4.
fn product_kernel_part(a5: &FiniteGroupTable) -> Vec<usize> {
    let gens: Vec<usize> = ["(0 1 2)", "(1 2 3)"]
        .iter()
        .map(|c| a5.element(c).expect("3-cycle in A5"))
        .collect();
    a5.subgroup_generated(&gens)
}

/// Generators of `⋂ G_i` where it is known in closed form.
pub fn kernel_generators(chain: &GroupChain, name: &str, params: &Params) -> Vec<GroupElement> {
    let ctx = chain.context();
    match entry(name).map(|e| e.name) {
        Some("dihedral") => vec![GroupElement::lattice(&[0], 1)],
        Some("all-normal") => vec![GroupElement::lattice(&[0], 1)],
        Some("product") => {
            let a5 = ctx.finite().unwrap();
            ["(0 1 2)", "(1 2 3)"]
                .iter()
                .map(|c| GroupElement::lattice(&[0], a5.element(c).unwrap()))
                .collect()
        }
        Some("heis-wr") => vec![GroupElement::heisenberg(0, 0, params["p"])],
        _ => Vec::new(),
    }
}

/// `-1/3` in the 2-adic integers, truncated mod `2^i`.
pub fn two_adic_minus_third(i: usize) -> BigInt {
    let m = pow(2, i);
    // 3x ≡ -1 (mod 2^i)
    let x = (&m * if i.is_multiple_of(2) { 1 } else { 2 } - 1) / 3;
    x % m
}

/// Deterministic small elements other than the identity.
pub fn sample_elements(ctx: &GroupContext, count: usize) -> Vec<GroupElement> {
    let mut out = Vec::new();
    let range = [0i64, 1, -1, 2, -2, 3, -3];
    match ctx.family() {
        crate::groups::Family::Heisenberg => {
            for x in range {
                for y in range {
                    for z in range {
                        out.push(GroupElement::heisenberg(x, y, z));
                    }
                }
            }
        }
        crate::groups::Family::LatticeSemidirect => {
            let rank = ctx.rank();
            let order = ctx.finite().unwrap().order();
            let mut vecs: Vec<Vec<i64>> = vec![vec![]];
            for _ in 0..rank {
                vecs = vecs
                    .into_iter()
                    .flat_map(|v| {
                        range.iter().map(move |&x| {
                            let mut w = v.clone();
                            w.push(x);
                            w
                        })
                    })
                    .collect();
            }
            for f in 0..order {
                for v in &vecs {
                    out.push(GroupElement::lattice(v, f));
                }
            }
        }
    }
    out.retain(|g| !ctx.is_identity(g));
    out.truncate(count);
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ClaimStatus {
    Pass,
    Fail,
    /// Computed and shown, not asserted.
    Reported,
    /// Not computed because a cap was hit.
    Unevaluated,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClaimResult {
    pub claim: String,
    pub expected: String,
    pub observed: String,
    pub status: ClaimStatus,
}

#[derive(Clone, Debug, Serialize)]
pub struct RegressionReport {
    pub version: u32,
    pub entry: String,
    pub params: Params,
    pub depth: usize,
    pub claims: Vec<ClaimResult>,
    pub report: ChainReport,
}

impl RegressionReport {
    pub fn passed(&self) -> bool {
        self.claims.iter().all(|c| c.status != ClaimStatus::Fail)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    pub fn to_human(&self) -> String {
        let mut out = format!("catalog {} depth {}", self.entry, self.depth);
        if !self.params.is_empty() {
            let ps: Vec<String> = self.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
            out.push_str(&format!(" ({})", ps.join(", ")));
        }
        out.push('\n');
        out.push_str(&self.report.to_human());
        let w = self.claims.iter().map(|c| c.claim.len()).max().unwrap_or(0);
        for c in &self.claims {
            let tag = match c.status {
                ClaimStatus::Pass => "pass",
                ClaimStatus::Fail => "FAIL",
                ClaimStatus::Reported => "info",
                ClaimStatus::Unevaluated => "skip",
            };
            out.push_str(&format!(
                "[{tag}] {:<w$}  expected {}  observed {}\n",
                c.claim, c.expected, c.observed
            ));
        }
        out.push_str(if self.passed() { "all definite claims pass\n" } else { "some claims FAILED\n" });
        out
    }
}

struct Claims(Vec<ClaimResult>);

impl Claims {
    fn check(&mut self, claim: &str, expected: impl ToString, observed: impl ToString, ok: bool) {
        self.0.push(ClaimResult {
            claim: claim.into(),
            expected: expected.to_string(),
            observed: observed.to_string(),
            status: if ok { ClaimStatus::Pass } else { ClaimStatus::Fail },
        });
    }

    fn eq<T: PartialEq + std::fmt::Debug>(&mut self, claim: &str, expected: T, observed: T) {
        let ok = expected == observed;
        self.check(claim, format!("{expected:?}"), format!("{observed:?}"), ok);
    }

    fn report(&mut self, claim: &str, observed: impl ToString) {
        self.0.push(ClaimResult {
            claim: claim.into(),
            expected: "-".into(),
            observed: observed.to_string(),
            status: ClaimStatus::Reported,
        });
    }
}

fn yn(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

/// Stability at finite depth: `G_i = K C_i` at every level, at the basepoint
/// and at every depth-`d` point of the basepoint's orbit (conjugated kernels).
pub fn stable_at_orbit_points(chain: &GroupChain, kernel: &[GroupElement], depth: usize, caps: &Caps) -> Result<bool> {
    let ctx = chain.context();
    let truncated = chain.truncate(depth);
    let tree = CosetTree::from_chain(&truncated, depth, caps)?;
    let reps = tree.table(depth).reps().to_vec();
    for g in reps {
        let conj = truncated.conjugate(&vec![g.clone(); depth])?;
        let levels = crate::chains::build_levels(&conj, depth, caps)?;
        let kernel_g: Vec<GroupElement> = kernel.iter().map(|k| ctx.conjugate(&g, k)).collect();
        if !kernel_core_factorization(&levels, &kernel_g).iter().all(|&b| b) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Evaluate an entry's expected claims at closure depth `depth`.
pub fn run_regression(name: &str, overrides: &Params, depth: Option<usize>, caps: &Caps) -> Result<RegressionReport> {
    let e = lookup(name)?;
    let params = resolve_params(name, overrides)?;
    let depth = depth.unwrap_or(e.default_depth);
    let window = crate::chains::DEFAULT_WINDOW;
    let chain_depth = depth + window;
    let chain = instantiate(e.name, &params, chain_depth)?;
    let kernel = kernel_generators(&chain, e.name, &params);
    let mut opts = AnalysisOptions::new(depth);
    opts.caps = *caps;
    opts.kernel_generators = Some(kernel.clone());
    let (report, levels, stable) = analyze(&chain, &opts)?;
    let ctx = chain.context().clone();
    let mut c = Claims(Vec::new());
    let sizes: Vec<usize> = (1..=depth).map(|i| stable.size(i)).collect();
    let d_sizes: Vec<usize> = (1..=depth).map(|i| levels.level(i).discriminant().len()).collect();
    let indices: Vec<String> = (1..=depth).map(|i| chain.level(i).index(&ctx).to_string()).collect();
    let reg = &report.regularity;
    let factorization = report.kernel.as_ref().map(|k| k.factorization.clone()).unwrap_or_default();
    match e.name {
        "dihedral" => {
            let expect: Vec<String> = (1..=depth).map(|i| pow(2, i).to_string()).collect();
            c.eq("indices |G:G_i|", expect, indices);
            c.eq("|D_1| (G_1 has index 2, so is normal)", 1, d_sizes[0]);
            c.eq("|S_i| for i >= 2", vec![2; depth - 1], sizes[1..].to_vec());
            let b_elem = levels.level(depth).element_of(&GroupElement::lattice(&[0], 1)).unwrap() as u32;
            c.check(
                "S_i = {id, Θ_i(b)} for i >= 2",
                "yes",
                yn((2..=depth).all(|i| stable.set(i) == [0, levels.project(depth, i, b_elem as usize) as u32])),
                (2..=depth).all(|i| stable.set(i) == [0, levels.project(depth, i, b_elem as usize) as u32]),
            );
            c.check("discriminant", "finite(2)", &report.discriminant, matches!(report.discriminant, DiscriminantVerdict::Finite { order: 2, .. }));
            c.eq("weakly normal", None, reg.weakly_normal_at);
            c.check("virtually regular", "yes", yn(reg.virtually_regular), reg.virtually_regular);
            c.check("core witness G_i ∩ C_m = C_i", "exists", format!("{:?}", reg.core_witness_level), reg.core_witness_level.is_some());
            c.eq("G_i = K C_i at the basepoint, K = <b>", vec![true; depth], factorization.clone());
            let a = GroupElement::lattice(&[1], 0);
            let conj = chain.conjugate(&vec![a; chain.depth()])?;
            let a2b = GroupElement::lattice(&[2], 1);
            c.eq("a^2 b in the kernel of the chain conjugated by a", KernelProbe::InKernelUpTo(conj.depth()), kernel_probe(&conj, &a2b, conj.depth())?);
            let eq = chains_equivalent(&chain, &conj, chain.depth())?;
            c.check("chain equivalent to its conjugate by a", "no witness", if eq.is_equivalent() { "equivalent" } else { "no witness" }, !eq.is_equivalent());
            // y = lim a^{k_i} G_i with k = -1/3 in Z_2; its kernel is trivial
            let reps: Vec<GroupElement> = (1..=chain.depth())
                .map(|i| GroupElement::Lattice { v: vec![two_adic_minus_third(i)], f: 0 })
                .collect();
            let at_y = chain.conjugate(&reps)?;
            let survivors: Vec<String> = (-16i64..=16)
                .map(|n| GroupElement::lattice(&[2 * n], 1))
                .filter(|g| matches!(kernel_probe(&at_y, g, at_y.depth()), Ok(KernelProbe::InKernelUpTo(_))))
                .map(|g| g.to_string())
                .collect();
            let y_levels = crate::chains::build_levels(&at_y, depth, caps)?;
            let y_fact = kernel_core_factorization(&y_levels, &[]);
            let unstable = survivors.is_empty() && !y_fact[1..].iter().any(|&b| b);
            c.check(
                "stable",
                "no",
                format!("{} (no a^(2n)b with |n| <= 16 fixes the point with k = -1/3 in Z_2)", yn(!unstable)),
                unstable,
            );
            c.eq("normalizer index of S_2", Some(2), report.levels[1].normalizer_index);
        }
        "product" => {
            let r = params["r"];
            let expect: Vec<String> = (1..=depth).map(|i| (pow(r, i) * big(5)).to_string()).collect();
            c.eq("indices |G:G_i| = 5 r^i", expect, indices);
            let mut core_ok = true;
            let k_elems: Vec<usize> = product_kernel_part(ctx.finite().unwrap());
            for i in 1..=depth {
                let t = &levels.level(i).table;
                core_ok &= core_membership(t, &GroupElement::Lattice { v: vec![pow(r, i)], f: 0 });
                core_ok &= !core_membership(t, &GroupElement::Lattice { v: vec![pow(r, i - 1)], f: 0 });
                for &k in &k_elems[1..] {
                    core_ok &= !core_membership(t, &GroupElement::lattice(&[0], k));
                }
            }
            c.check("C_i = {e} × r^i Z (membership)", "yes", yn(core_ok), core_ok);
            c.eq("|D_i|", vec![12; depth], d_sizes.clone());
            c.check("discriminant", "finite(12)", &report.discriminant, matches!(report.discriminant, DiscriminantVerdict::Finite { order: 12, .. }));
            c.eq("weakly normal from level", Some(1), reg.weakly_normal_at);
            c.check("virtually regular", "yes", yn(reg.virtually_regular), reg.virtually_regular);
            c.eq("G_i = K C_i at the basepoint, K = A4 × {0}", vec![true; depth], factorization.clone());
            let stable_all = stable_at_orbit_points(&chain, &kernel, depth, caps)?;
            c.check("stable (basepoint and all depth-d orbit points)", "yes", yn(stable_all), stable_all);
            c.eq("normalizer index of S_1", Some(5), report.levels[0].normalizer_index);
        }
        "heis-wr" => {
            let p = params["p"];
            let rows_ok: Vec<bool> = chain.levels().iter().map(|h| h.heisenberg_row_condition() == Some(true)).collect();
            c.eq("row condition at every level", vec![true; chain.depth()], rows_ok);
            let ok = sizes.iter().all(|&s| s >= 2 && s as i64 <= p);
            c.check("|S_i| in [2, p]", format!("[2, {p}]"), format!("{sizes:?}"), ok);
            let finite = matches!(&report.discriminant, DiscriminantVerdict::Finite { order, .. } if *order >= 2 && *order as i64 <= p);
            c.check("discriminant", format!("finite, size in [2, {p}]"), &report.discriminant, finite);
            c.eq("weakly normal from level", Some(1), reg.weakly_normal_at);
            c.check("virtually regular", "yes", yn(reg.virtually_regular), reg.virtually_regular);
            c.report("G_i = K C_i at the basepoint, K = <(0,0,p)>", format!("{factorization:?}"));
        }
        "heis-main6" => {
            let p = params["p"];
            let samples = sample_elements(&ctx, 100);
            let survivors: Vec<String> = samples
                .iter()
                .filter(|g| matches!(kernel_probe(&chain, g, depth), Ok(KernelProbe::InKernelUpTo(_))))
                .map(|g| g.to_string())
                .collect();
            c.check("kernel survivors among 100 samples", "none", format!("{survivors:?}"), survivors.is_empty());
            let growth: Vec<usize> = (1..=depth).map(|n| num_traits::pow(p as usize, n)).collect();
            c.eq("|S_n| = p^n", growth.clone(), sizes.clone());
            c.check(
                "discriminant",
                format!("lowerBound({})", growth[depth - 1]),
                &report.discriminant,
                report.discriminant
                    == DiscriminantVerdict::LowerBound {
                        bound: growth[depth - 1],
                        growth: growth.clone(),
                    },
            );
            c.eq("weakly normal", None, reg.weakly_normal_at);
            c.report("core witness G_i ∩ C_1 = C_i (C_1 only)", yn((1..=depth).all(|i| levels.core_criterion(1, i))));
            c.check(
                "stable",
                "no",
                format!("{} (trivial kernel, G_i = K C_i fails)", yn(factorization.iter().all(|&b| b))),
                !factorization.iter().any(|&b| b),
            );
        }
        "dihedral-swap" => {
            let (p, q) = (params["p"], params["q"]);
            let growth: Vec<usize> = (1..=depth).map(|i| num_traits::pow((p * q) as usize, i)).collect();
            c.eq("|D_i| = (pq)^i", growth.clone(), d_sizes.clone());
            let onto = (1..=depth).all(|i| levels.bond_surjective(i));
            c.check("bonding maps onto", "yes", yn(onto), onto);
            c.eq("weakly normal from level", Some(1), reg.weakly_normal_at);
            c.check(
                "stable",
                "no",
                format!("{} (trivial kernel, G_i = K C_i fails)", yn(factorization.iter().all(|&b| b))),
                !factorization.iter().any(|&b| b),
            );
            let t = GroupElement::lattice(&[0, 0], 1);
            let conj = chain.conjugate(&vec![t; chain.depth()])?;
            let transposed = lattice_level(&ctx, &diagonal(vec![big(q), big(p)]), vec![0])?;
            c.check(
                "t G_1 t^-1 = diag(q, p) Z^2 × {e}",
                "yes",
                yn(*conj.level(1) == transposed),
                *conj.level(1) == transposed,
            );
            c.check(
                "discriminant",
                format!("lowerBound({})", growth[depth - 1]),
                &report.discriminant,
                matches!(report.discriminant, DiscriminantVerdict::LowerBound { bound, .. } if bound == growth[depth - 1]),
            );
        }
        "gen-dihedral" => {
            c.eq("weakly normal from level", Some(1), reg.weakly_normal_at);
            c.check("virtually regular", "yes", yn(reg.virtually_regular), reg.virtually_regular);
            c.check(
                "stable",
                "no",
                format!("{} (trivial kernel, G_i = K C_i fails)", yn(factorization.iter().all(|&b| b))),
                !factorization.iter().any(|&b| b),
            );
            c.report("|D_i|", format!("{d_sizes:?}"));
        }
        "all-normal" => {
            c.check("discriminant", "trivial", &report.discriminant, report.discriminant == DiscriminantVerdict::Trivial);
            c.eq("weakly normal from level", Some(0), reg.weakly_normal_at);
            c.check("regular", "yes", yn(reg.regular), reg.regular);
        }
        _ => unreachable!(),
    }
    Ok(RegressionReport {
        version: crate::chains::REPORT_VERSION,
        entry: e.name.to_string(),
        params,
        depth,
        claims: c.0,
        report,
    })
}

/// Regularity flags alone for a chain through `probe` levels, with closures at `depth`.
pub fn regularity_only(chain: &GroupChain, depth: usize, probe: usize, caps: &Caps) -> Result<crate::chains::RegularityFlags> {
    let levels: Levels = crate::chains::build_levels(chain, depth, caps)?;
    regularity_flags(&levels, chain, probe, crate::chains::DEFAULT_WINDOW, caps)
}
