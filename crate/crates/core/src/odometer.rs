//! The left-translation action of `G` on the coset tree `lim G/G_i`, at finite depth.

use std::fmt::Write as _;

use serde::Serialize;

use crate::chains::{GroupChain, Levels};
use crate::cosets::{Caps, CosetTable};
use crate::error::{ChainError, Result};
use crate::groups::GroupElement;

pub const TREE_FORMAT_HEADER: &str = "chaincalc-tree 1";

/// Coset tables of levels `1..=depth`; level 0 is the single coset `G`.
#[derive(Clone, Debug)]
pub struct CosetTree {
    tables: Vec<CosetTable>,
}

/// A point of the tree at finite depth: coset indices `(c_1, ..., c_d)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct TreePoint {
    pub path: Vec<usize>,
}

impl TreePoint {
    pub fn basepoint(depth: usize) -> Self {
        TreePoint { path: vec![0; depth] }
    }

    pub fn depth(&self) -> usize {
        self.path.len()
    }

    pub fn truncate(&self, depth: usize) -> TreePoint {
        TreePoint {
            path: self.path[..depth.min(self.depth())].to_vec(),
        }
    }
}

/// Level-`i` coset indices of `w · p` for sample words `w`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CodingTrace {
    pub level: usize,
    pub codes: Vec<(String, usize)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TreeVertex {
    pub level: usize,
    pub index: usize,
    pub rep_word: String,
    pub parent: Option<usize>,
    pub on_basepoint_path: bool,
}

/// The coset tree through some depth, vertices in level order then coset order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TreeDocument {
    pub depth: usize,
    pub vertices: Vec<TreeVertex>,
}

impl CosetTree {
    pub fn from_chain(chain: &GroupChain, depth: usize, caps: &Caps) -> Result<Self> {
        let depth = depth.min(chain.depth());
        let tables = (1..=depth)
            .map(|i| CosetTable::enumerate(chain.context(), chain.level(i), caps).map_err(|e| e.at_level(i)))
            .collect::<Result<Vec<_>>>()?;
        Ok(CosetTree { tables })
    }

    pub fn from_levels(levels: &Levels) -> Self {
        CosetTree {
            tables: levels.iter().map(|l| l.table.clone()).collect(),
        }
    }

    pub fn depth(&self) -> usize {
        self.tables.len()
    }

    /// Table of level `i >= 1`.
    pub fn table(&self, i: usize) -> &CosetTable {
        &self.tables[i - 1]
    }

    /// Coset of level `i - 1` containing coset `c` of level `i`.
    pub fn parent(&self, i: usize, c: usize) -> usize {
        if i == 1 {
            return 0;
        }
        self.table(i - 1)
            .coset_of(self.table(i).rep(c))
            .expect("nested chain")
    }

    pub fn is_compatible(&self, p: &TreePoint) -> bool {
        p.depth() <= self.depth()
            && p.path.iter().enumerate().all(|(k, &c)| c < self.tables[k].len())
            && (2..=p.depth()).all(|i| self.parent(i, p.path[i - 1]) == p.path[i - 2])
    }

    fn check(&self, p: &TreePoint) -> Result<()> {
        if self.is_compatible(p) {
            Ok(())
        } else {
            Err(ChainError::Precondition(format!("{:?} is not a compatible coset path", p.path)))
        }
    }

    /// `g · p`, level by level.
    pub fn act(&self, g: &GroupElement, p: &TreePoint) -> Result<TreePoint> {
        self.check(p)?;
        let path = p
            .path
            .iter()
            .enumerate()
            .map(|(k, &c)| {
                self.tables[k]
                    .act(g, c)
                    .ok_or_else(|| ChainError::structure("element outside the enumerated group"))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(TreePoint { path })
    }

    /// The point `(g G_1, ..., g G_d)`.
    pub fn point_of(&self, g: &GroupElement, depth: usize) -> Result<TreePoint> {
        self.act(g, &TreePoint::basepoint(depth.min(self.depth())))
    }

    /// Level-`level` coset of `w · p` for each sample element.
    pub fn orbit_coding(&self, p: &TreePoint, samples: &[GroupElement], level: usize) -> Result<CodingTrace> {
        if level == 0 || level > p.depth() {
            return Err(ChainError::Precondition(format!("level {level} outside 1..={}", p.depth())));
        }
        let codes = samples
            .iter()
            .map(|w| Ok((w.to_string(), self.act(w, p)?.path[level - 1])))
            .collect::<Result<Vec<_>>>()?;
        Ok(CodingTrace { level, codes })
    }

    /// Candidates `g` with `g · p = p`.
    pub fn point_stabilizer_probe(&self, p: &TreePoint, candidates: &[GroupElement]) -> Result<Vec<GroupElement>> {
        let mut out = Vec::new();
        for g in candidates {
            if self.act(g, p)? == *p {
                out.push(g.clone());
            }
        }
        Ok(out)
    }

    pub fn export_tree(&self, depth: usize) -> TreeDocument {
        let depth = depth.min(self.depth());
        let mut vertices = vec![TreeVertex {
            level: 0,
            index: 0,
            rep_word: "e".into(),
            parent: None,
            on_basepoint_path: true,
        }];
        for i in 1..=depth {
            let t = self.table(i);
            let ctx = t.context();
            for c in 0..t.len() {
                vertices.push(TreeVertex {
                    level: i,
                    index: c,
                    rep_word: ctx.render_word(&t.rep_word(c)),
                    parent: Some(self.parent(i, c)),
                    on_basepoint_path: c == 0,
                });
            }
        }
        TreeDocument { depth, vertices }
    }
}

impl TreeDocument {
    pub fn edge_count(&self) -> usize {
        self.vertices.iter().filter(|v| v.parent.is_some()).count()
    }

    /// Line format: header, `V level:index:repWord` (basepoint path marked
    /// with a trailing `*`), then `E parent child` per inclusion.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{TREE_FORMAT_HEADER}");
        let _ = writeln!(out, "depth {}", self.depth);
        for v in &self.vertices {
            let mark = if v.on_basepoint_path { " *" } else { "" };
            let _ = writeln!(out, "V {}:{}:{}{}", v.level, v.index, v.rep_word, mark);
        }
        for v in &self.vertices {
            if let Some(p) = v.parent {
                let _ = writeln!(out, "E {}:{} {}:{}", v.level - 1, p, v.level, v.index);
            }
        }
        out
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph coset_tree {\n  node [shape=circle];\n");
        for v in &self.vertices {
            let style = if v.on_basepoint_path { ", style=bold, color=red" } else { "" };
            let _ = writeln!(out, "  \"{}:{}\" [label=\"{}\"{}];", v.level, v.index, v.rep_word, style);
        }
        for v in &self.vertices {
            if let Some(p) = v.parent {
                let _ = writeln!(out, "  \"{}:{}\" -> \"{}:{}\";", v.level - 1, p, v.level, v.index);
            }
        }
        out.push_str("}\n");
        out
    }

    /// Parse the line format back.
    pub fn parse_text(text: &str) -> Result<TreeDocument> {
        let bad = |line: usize, msg: &str| ChainError::validation(format!("tree line {line}: {msg}"));
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, h)) if h == TREE_FORMAT_HEADER => {}
            _ => return Err(bad(1, "missing header")),
        }
        let depth = match lines.next() {
            Some((n, l)) => l
                .strip_prefix("depth ")
                .and_then(|d| d.parse().ok())
                .ok_or_else(|| bad(n + 1, "expected `depth N`"))?,
            None => return Err(bad(2, "missing depth")),
        };
        let mut vertices: Vec<TreeVertex> = Vec::new();
        let mut lookup = std::collections::HashMap::new();
        for (n, line) in lines {
            if let Some(rest) = line.strip_prefix("V ") {
                let (body, on_path) = match rest.strip_suffix(" *") {
                    Some(b) => (b, true),
                    None => (rest, false),
                };
                let mut parts = body.splitn(3, ':');
                let level: usize = parts.next().and_then(|s| s.parse().ok()).ok_or_else(|| bad(n + 1, "level"))?;
                let index: usize = parts.next().and_then(|s| s.parse().ok()).ok_or_else(|| bad(n + 1, "index"))?;
                let rep_word = parts.next().ok_or_else(|| bad(n + 1, "rep word"))?.to_string();
                lookup.insert((level, index), vertices.len());
                vertices.push(TreeVertex {
                    level,
                    index,
                    rep_word,
                    parent: None,
                    on_basepoint_path: on_path,
                });
            } else if let Some(rest) = line.strip_prefix("E ") {
                let ends: Vec<(usize, usize)> = rest
                    .split(' ')
                    .map(|s| {
                        let (l, i) = s.split_once(':')?;
                        Some((l.parse().ok()?, i.parse().ok()?))
                    })
                    .collect::<Option<_>>()
                    .ok_or_else(|| bad(n + 1, "edge"))?;
                if ends.len() != 2 {
                    return Err(bad(n + 1, "edge needs two endpoints"));
                }
                let child = *lookup.get(&ends[1]).ok_or_else(|| bad(n + 1, "unknown vertex"))?;
                vertices[child].parent = Some(ends[0].1);
            } else if !line.trim().is_empty() {
                return Err(bad(n + 1, "unrecognized line"));
            }
        }
        Ok(TreeDocument { depth, vertices })
    }
}
