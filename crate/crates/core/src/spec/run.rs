use super::ChainSpecDocument;
use crate::catalog::stable_at_orbit_points;
use crate::chains::{analyze, AnalysisOptions, ChainReport, GroupChain};
use crate::cosets::Caps;
use crate::error::{ChainError, Result};

/// Command-line values that take precedence over the `[analysis]` table.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Overrides {
    pub depth: Option<usize>,
    pub probe_depth: Option<usize>,
    pub coset_cap: Option<usize>,
    pub perm_cap: Option<usize>,
}

impl ChainSpecDocument {
    /// Caps from the environment, then the spec, then `o`.
    pub fn caps(&self, o: &Overrides) -> Caps {
        let mut caps = Caps::from_env();
        if let Some(c) = o.coset_cap.or(self.analysis.coset_cap) {
            caps.cosets = c;
        }
        if let Some(c) = o.perm_cap.or(self.analysis.perm_cap) {
            caps.perms = c;
        }
        caps
    }

    pub fn analysis_options(&self, o: &Overrides) -> AnalysisOptions {
        let depth = o.depth.unwrap_or_else(|| self.depth());
        let mut opts = AnalysisOptions::new(depth);
        opts.probe_depth = o.probe_depth.or(self.analysis.probe_depth).unwrap_or(depth);
        if let Some(r) = self.analysis.regularity_depth {
            opts.regularity_depth = r;
        }
        if let Some(w) = self.analysis.window {
            opts.window = w;
        }
        opts.caps = self.caps(o);
        opts
    }

    /// The chain with enough levels for `opts`: `regularity_depth` levels when
    /// the chain is parametric, all listed levels when explicit.
    pub fn chain_for(&self, opts: &AnalysisOptions) -> Result<GroupChain> {
        match self.max_depth() {
            Some(max) if opts.depth > max => Err(ChainError::validation(format!(
                "explicit chain has only {max} levels, depth {} requested",
                opts.depth
            ))),
            Some(max) => self.build_chain(max),
            None => self.build_chain(opts.regularity_depth.max(opts.depth)),
        }
    }

    /// Full analysis plus the kernel and stability reports the spec requests.
    pub fn analyze(&self, o: &Overrides) -> Result<(GroupChain, ChainReport)> {
        let mut opts = self.analysis_options(o);
        let chain = self.chain_for(&opts)?;
        let kernel = self.kernel_generators(chain.context())?;
        if self.wants_report("kernel") || !kernel.is_empty() {
            opts.kernel_generators = Some(kernel.clone());
        }
        let (mut report, _, _) = analyze(&chain, &opts)?;
        if self.wants_report("stability") {
            report.stable = Some(stable_at_orbit_points(&chain, &kernel, report.depth, &opts.caps)?);
        }
        Ok((chain, report))
    }
}
