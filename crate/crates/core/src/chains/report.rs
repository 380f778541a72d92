use std::fmt::Write as _;

use serde::Serialize;

use super::{
    build_levels, kernel_core_factorization, kernel_probe, regularity_flags, DiscriminantVerdict, GroupChain,
    KernelProbe, Levels, RegularityFlags, StableImages, DEFAULT_WINDOW,
};
use crate::cosets::Caps;
use crate::error::Result;
use crate::groups::GroupElement;

pub const REPORT_VERSION: u32 = 1;

#[derive(Clone, Debug)]
pub struct AnalysisOptions {
    /// Levels with full permutation quotients.
    pub depth: usize,
    /// Levels used for stable images; clamped to `depth`.
    pub probe_depth: usize,
    /// Chain levels used by the regularity checks (coset tables only).
    pub regularity_depth: usize,
    pub window: usize,
    pub caps: Caps,
    /// Quotients larger than this skip the normalizer diagnostic.
    pub normalizer_limit: usize,
    pub kernel_generators: Option<Vec<GroupElement>>,
}

impl AnalysisOptions {
    pub fn new(depth: usize) -> Self {
        AnalysisOptions {
            depth,
            probe_depth: depth,
            regularity_depth: depth + DEFAULT_WINDOW,
            window: DEFAULT_WINDOW,
            caps: Caps::from_env(),
            normalizer_limit: 20_000,
            kernel_generators: None,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LevelRow {
    pub level: usize,
    pub subgroup: String,
    pub index: String,
    pub quotient_order: usize,
    pub discriminant_order: usize,
    pub stable_image_size: usize,
    pub stabilized: bool,
    pub bond_surjective: bool,
    pub bond_injective: bool,
    pub normal_in_group: bool,
    pub normal_form: bool,
    pub core_criterion: bool,
    pub normalizer_index: Option<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct KernelFindings {
    pub generators: Vec<String>,
    pub probes: Vec<KernelProbe>,
    pub factorization: Vec<bool>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ChainReport {
    pub version: u32,
    pub family: String,
    pub generators: Vec<String>,
    pub depth: usize,
    pub probe_depth: usize,
    pub window: usize,
    pub levels: Vec<LevelRow>,
    pub discriminant: DiscriminantVerdict,
    pub normal_form: bool,
    pub regularity: RegularityFlags,
    pub kernel: Option<KernelFindings>,
    /// `G_i = K C_i` at the basepoint and every orbit point of the closure depth.
    pub stable: Option<bool>,
}

/// Build levels through `opts.depth` and assemble every per-level datum and verdict.
pub fn analyze(chain: &GroupChain, opts: &AnalysisOptions) -> Result<(ChainReport, Levels, StableImages)> {
    let depth = opts.depth.min(chain.depth());
    let levels = build_levels(chain, depth, &opts.caps)?;
    let stable = levels.stable_images(opts.probe_depth.min(depth), opts.window);
    let discriminant = levels.discriminant_verdict(&stable);
    let nf = levels.normal_form_flags(&stable);
    let regularity = regularity_flags(&levels, chain, opts.regularity_depth.max(depth), opts.window, &opts.caps)?;
    let ctx = chain.context();
    let rows = (1..=depth)
        .map(|i| {
            let lvl = levels.level(i);
            LevelRow {
                level: i,
                subgroup: chain.level(i).describe(ctx),
                index: chain.level(i).index(ctx).to_string(),
                quotient_order: lvl.quotient.len(),
                discriminant_order: lvl.discriminant().len(),
                stable_image_size: stable.size(i),
                stabilized: stable.stabilized[i - 1],
                bond_surjective: levels.bond_surjective(i),
                bond_injective: levels.bond_injective(i),
                normal_in_group: lvl.discriminant().len() == 1,
                normal_form: nf[i - 1],
                core_criterion: levels.core_criterion(1, i),
                normalizer_index: levels.normalizer_index(i, stable.set(i), opts.normalizer_limit),
            }
        })
        .collect();
    let kernel = match &opts.kernel_generators {
        Some(gens) => Some(KernelFindings {
            generators: gens.iter().map(|g| g.to_string()).collect(),
            probes: gens
                .iter()
                .map(|g| kernel_probe(chain, g, chain.depth()))
                .collect::<Result<_>>()?,
            factorization: kernel_core_factorization(&levels, gens),
        }),
        None => None,
    };
    let report = ChainReport {
        version: REPORT_VERSION,
        family: format!("{:?}", ctx.family()),
        generators: ctx.generator_names().to_vec(),
        depth,
        probe_depth: stable.probe_depth,
        window: opts.window,
        levels: rows,
        discriminant,
        normal_form: nf.iter().all(|&b| b),
        regularity,
        kernel,
        stable: None,
    };
    Ok((report, levels, stable))
}

fn yn(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

impl ChainReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    /// Aligned-column text rendering.
    pub fn to_human(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "family {}  generators {}  depth {}  probe depth {}  window {}",
            self.family,
            self.generators.join(","),
            self.depth,
            self.probe_depth,
            self.window
        );
        let header = [
            "level", "index", "|G/C|", "|D|", "|S|", "stable", "onto", "1-1", "normal", "nform", "core", "N-index",
        ];
        let rows: Vec<Vec<String>> = self
            .levels
            .iter()
            .map(|r| {
                vec![
                    r.level.to_string(),
                    r.index.clone(),
                    r.quotient_order.to_string(),
                    r.discriminant_order.to_string(),
                    r.stable_image_size.to_string(),
                    yn(r.stabilized).into(),
                    yn(r.bond_surjective).into(),
                    yn(r.bond_injective).into(),
                    yn(r.normal_in_group).into(),
                    yn(r.normal_form).into(),
                    yn(r.core_criterion).into(),
                    r.normalizer_index.map_or("-".into(), |n| n.to_string()),
                ]
            })
            .collect();
        let widths: Vec<usize> = (0..header.len())
            .map(|c| rows.iter().map(|r| r[c].len()).chain([header[c].len()]).max().unwrap())
            .collect();
        let line = |cells: Vec<String>| {
            cells
                .iter()
                .zip(&widths)
                .map(|(c, w)| format!("{c:>w$}"))
                .collect::<Vec<_>>()
                .join("  ")
        };
        let _ = writeln!(out, "{}", line(header.iter().map(|s| s.to_string()).collect()));
        for r in rows {
            let _ = writeln!(out, "{}", line(r));
        }
        for r in &self.levels {
            let _ = writeln!(out, "G_{} = {}", r.level, r.subgroup);
        }
        let _ = writeln!(out, "discriminant: {}", self.discriminant);
        let _ = writeln!(out, "normal form: {}", yn(self.normal_form));
        let reg = &self.regularity;
        let _ = writeln!(out, "regular (through level {}): {}", reg.probe_depth, yn(reg.regular));
        let _ = writeln!(
            out,
            "weakly normal: {}",
            reg.weakly_normal_at
                .map_or("no certificate".into(), |i| format!("from level {i}"))
        );
        let _ = writeln!(
            out,
            "virtually regular: {} (core witness: {})",
            yn(reg.virtually_regular),
            reg.core_witness_level
                .map_or("none".into(), |m| format!("C_{m}"))
        );
        if let Some(k) = &self.kernel {
            let _ = writeln!(out, "kernel generators: {}", k.generators.join(", "));
            for (g, p) in k.generators.iter().zip(&k.probes) {
                let s = match p {
                    KernelProbe::InKernelUpTo(n) => format!("survives through level {n}"),
                    KernelProbe::ExitsAt(n) => format!("exits at level {n}"),
                };
                let _ = writeln!(out, "  {g}: {s}");
            }
            let f: Vec<&str> = k.factorization.iter().map(|&b| yn(b)).collect();
            let _ = writeln!(out, "G_i = K C_i per level: {}", f.join(" "));
        }
        if let Some(s) = self.stable {
            let _ = writeln!(out, "stable at all depth-{} orbit points: {}", self.depth, yn(s));
        }
        out
    }
}
