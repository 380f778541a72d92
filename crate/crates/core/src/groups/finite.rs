//! Finite groups given by explicit multiplication tables.

use std::collections::{BTreeSet, HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{ChainError, Result};

/// A finite group as a Cayley table. Element 0 is always the identity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteGroupTable {
    names: Vec<String>,
    mul: Vec<Vec<usize>>,
    inv: Vec<usize>,
    generators: Vec<usize>,
    /// Point permutations for groups built from permutations, `(a*b)(x) = a(b(x))`.
    perms: Option<Vec<Vec<usize>>>,
}

impl FiniteGroupTable {
    /// Build from an explicit table; checks the group axioms.
    pub fn from_table(names: Vec<String>, mul: Vec<Vec<usize>>, generators: Vec<usize>) -> Result<Self> {
        let n = names.len();
        if n == 0 || mul.len() != n || mul.iter().any(|r| r.len() != n || r.iter().any(|&x| x >= n)) {
            return Err(ChainError::validation("multiplication table has the wrong shape"));
        }
        if (0..n).any(|a| mul[0][a] != a || mul[a][0] != a) {
            return Err(ChainError::validation("element 0 is not the identity of the table"));
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if mul[mul[a][b]][c] != mul[a][mul[b][c]] {
                        return Err(ChainError::validation(format!(
                            "table is not associative at ({}, {}, {})",
                            names[a], names[b], names[c]
                        )));
                    }
                }
            }
        }
        let mut inv = Vec::with_capacity(n);
        for a in 0..n {
            match (0..n).find(|&b| mul[a][b] == 0 && mul[b][a] == 0) {
                Some(b) => inv.push(b),
                None => {
                    return Err(ChainError::validation(format!("element {} has no inverse", names[a])))
                }
            }
        }
        let distinct: BTreeSet<&String> = names.iter().collect();
        if distinct.len() != n {
            return Err(ChainError::validation("element names are not distinct"));
        }
        if generators.iter().any(|&g| g >= n) {
            return Err(ChainError::validation("generator index out of range"));
        }
        let table = FiniteGroupTable {
            names,
            mul,
            inv,
            generators,
            perms: None,
        };
        if table.subgroup_generated(&table.generators).len() != n {
            return Err(ChainError::validation("listed generators do not generate the table"));
        }
        Ok(table)
    }

    /// Closure of the given permutations of `{0..degree-1}`, in BFS order from
    /// the identity.
    pub fn from_permutations(degree: usize, gens: &[Vec<usize>]) -> Result<Self> {
        for g in gens {
            let mut seen = vec![false; degree];
            if g.len() != degree || g.iter().any(|&x| x >= degree || std::mem::replace(&mut seen[x], true)) {
                return Err(ChainError::validation("invalid permutation generator"));
            }
        }
        let id: Vec<usize> = (0..degree).collect();
        let mut elems = vec![id.clone()];
        let mut index: HashMap<Vec<usize>, usize> = HashMap::from([(id, 0)]);
        let mut queue = VecDeque::from([0usize]);
        while let Some(e) = queue.pop_front() {
            for g in gens {
                let p: Vec<usize> = (0..degree).map(|x| g[elems[e][x]]).collect();
                if !index.contains_key(&p) {
                    index.insert(p.clone(), elems.len());
                    queue.push_back(elems.len());
                    elems.push(p);
                }
            }
        }
        let n = elems.len();
        let mul: Vec<Vec<usize>> = (0..n)
            .map(|a| {
                (0..n)
                    .map(|b| {
                        let p: Vec<usize> = (0..degree).map(|x| elems[a][elems[b][x]]).collect();
                        index[&p]
                    })
                    .collect()
            })
            .collect();
        let inv = (0..n).map(|a| (0..n).find(|&b| mul[a][b] == 0).unwrap()).collect();
        let generators = gens.iter().map(|g| index[g]).collect();
        let names = elems.iter().map(|p| cycle_notation(p)).collect();
        Ok(FiniteGroupTable {
            names,
            mul,
            inv,
            generators,
            perms: Some(elems),
        })
    }

    pub fn trivial() -> Self {
        Self::from_table(vec!["e".into()], vec![vec![0]], vec![]).unwrap()
    }

    /// Cyclic group of order `n`; for `n = 2` the elements are `e, t`.
    pub fn cyclic(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(ChainError::validation("cyclic group of order 0"));
        }
        let names = (0..n)
            .map(|k| match (n, k) {
                (_, 0) => "e".to_string(),
                (2, 1) => "t".to_string(),
                (_, 1) => "t".to_string(),
                _ => format!("t^{k}"),
            })
            .collect();
        let mul = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        let gens = if n > 1 { vec![1] } else { vec![] };
        Self::from_table(names, mul, gens)
    }

    /// Symmetric group on `n` points, generated by `(0 1)` and `(0 1 .. n-1)`.
    pub fn symmetric(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(ChainError::validation("symmetric group on 0 points"));
        }
        let mut gens = Vec::new();
        if n >= 2 {
            gens.push(transposition(n, 0, 1));
        }
        if n >= 3 {
            gens.push((0..n).map(|x| (x + 1) % n).collect());
        }
        Self::from_permutations(n, &gens)
    }

    /// Alternating group on `n` points, generated by 3-cycles `(0 1 k)`.
    pub fn alternating(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(ChainError::validation("alternating group on 0 points"));
        }
        let gens: Vec<Vec<usize>> = (2..n).map(|k| three_cycle(n, 0, 1, k)).collect();
        Self::from_permutations(n.max(1), &gens)
    }

    /// Bundled tables: `Z1`..`Z12`, `S1`..`S4`, `A1`..`A5`.
    pub fn builtin(name: &str) -> Result<Self> {
        let (kind, rest) = name.split_at(name.len().min(1));
        let n: usize = rest
            .parse()
            .map_err(|_| ChainError::validation(format!("unknown finite group `{name}`")))?;
        match (kind, n) {
            ("Z", 1..=12) => Self::cyclic(n),
            ("S", 1..=4) => Self::symmetric(n),
            ("A", 1..=5) => Self::alternating(n),
            _ => Err(ChainError::validation(format!("unknown finite group `{name}`"))),
        }
    }

    pub fn order(&self) -> usize {
        self.names.len()
    }

    pub fn identity(&self) -> usize {
        0
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a][b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inv[a]
    }

    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    pub fn name(&self, a: usize) -> &str {
        &self.names[a]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.mul
    }

    pub fn element(&self, name: &str) -> Option<usize> {
        let norm = name.trim();
        self.names.iter().position(|n| n == norm).or_else(|| {
            // accept cycle notation in any rotation, e.g. "(1 2 0)"
            let perms = self.perms.as_ref()?;
            let degree = perms[0].len();
            let p = parse_cycles(norm, degree)?;
            perms.iter().position(|q| *q == p)
        })
    }

    pub fn permutation(&self, a: usize) -> Option<&[usize]> {
        self.perms.as_ref().map(|p| p[a].as_slice())
    }

    pub fn degree(&self) -> Option<usize> {
        self.perms.as_ref().map(|p| p[0].len())
    }

    /// Sorted element list of the subgroup generated by `gens`.
    pub fn subgroup_generated(&self, gens: &[usize]) -> Vec<usize> {
        let mut seen = vec![false; self.order()];
        seen[0] = true;
        let mut queue = VecDeque::from([0usize]);
        while let Some(a) = queue.pop_front() {
            for &g in gens {
                let b = self.mul[g][a];
                if !seen[b] {
                    seen[b] = true;
                    queue.push_back(b);
                }
            }
        }
        (0..self.order()).filter(|&a| seen[a]).collect()
    }

    pub fn is_subgroup(&self, set: &[usize]) -> bool {
        let member: BTreeSet<usize> = set.iter().copied().collect();
        member.contains(&0)
            && set
                .iter()
                .all(|&a| member.contains(&self.inv[a]) && set.iter().all(|&b| member.contains(&self.mul[a][b])))
    }
}

fn transposition(n: usize, a: usize, b: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    p.swap(a, b);
    p
}

fn three_cycle(n: usize, a: usize, b: usize, c: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    p[a] = b;
    p[b] = c;
    p[c] = a;
    p
}

/// Cycle notation with each cycle starting at its smallest point, e.g. `(0 1 2)(3 4)`.
pub fn cycle_notation(p: &[usize]) -> String {
    let mut seen = vec![false; p.len()];
    let mut out = String::new();
    for start in 0..p.len() {
        if seen[start] || p[start] == start {
            continue;
        }
        let mut cycle = vec![start];
        seen[start] = true;
        let mut x = p[start];
        while x != start {
            seen[x] = true;
            cycle.push(x);
            x = p[x];
        }
        out.push('(');
        out.push_str(&cycle.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" "));
        out.push(')');
    }
    if out.is_empty() {
        "e".to_string()
    } else {
        out
    }
}

fn parse_cycles(s: &str, degree: usize) -> Option<Vec<usize>> {
    let mut p: Vec<usize> = (0..degree).collect();
    if s == "e" {
        return Some(p);
    }
    let mut rest = s.trim();
    let mut cycles: Vec<Vec<usize>> = Vec::new();
    while !rest.is_empty() {
        let body = rest.strip_prefix('(')?;
        let close = body.find(')')?;
        let pts: Option<Vec<usize>> = body[..close]
            .split([' ', ','])
            .filter(|t| !t.is_empty())
            .map(|t| t.parse().ok().filter(|&x| x < degree))
            .collect();
        cycles.push(pts?);
        rest = body[close + 1..].trim_start();
    }
    // product of cycles, rightmost applied first
    for cycle in cycles.iter().rev() {
        let mut c = (0..degree).collect::<Vec<usize>>();
        for (k, &x) in cycle.iter().enumerate() {
            c[x] = cycle[(k + 1) % cycle.len()];
        }
        p = (0..degree).map(|x| c[p[x]]).collect();
    }
    Some(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_orders() {
        for (name, order) in [("Z2", 2), ("S3", 6), ("S4", 24), ("A4", 12), ("A5", 60), ("Z1", 1)] {
            assert_eq!(FiniteGroupTable::builtin(name).unwrap().order(), order, "{name}");
        }
        assert!(FiniteGroupTable::builtin("Q8").is_err());
    }

    #[test]
    fn cycle_names_round_trip() {
        let a5 = FiniteGroupTable::alternating(5).unwrap();
        for a in 0..a5.order() {
            assert_eq!(a5.element(a5.name(a)), Some(a));
        }
        assert_eq!(a5.element("(1 2 0)"), a5.element("(0 1 2)"));
        assert!(a5.element("(0 1)").is_none());
    }

    #[test]
    fn a4_inside_a5() {
        let a5 = FiniteGroupTable::alternating(5).unwrap();
        let gens = [a5.element("(0 1 2)").unwrap(), a5.element("(1 2 3)").unwrap()];
        let k = a5.subgroup_generated(&gens);
        assert_eq!(k.len(), 12);
        assert!(a5.is_subgroup(&k));
    }

    #[test]
    fn rejects_non_group_table() {
        let bad = FiniteGroupTable::from_table(
            vec!["e".into(), "x".into()],
            vec![vec![0, 1], vec![1, 1]],
            vec![1],
        );
        assert!(bad.is_err());
    }
}
