//! Group presentations: free groups on named generators, and finite groups
//! given by a multiplication table.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A generator or its inverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Letter {
    pub gen: usize,
    pub inv: bool,
}

pub type Word = Vec<Letter>;

/// Inverse word.
pub fn word_inverse(w: &[Letter]) -> Word {
    w.iter().rev().map(|l| Letter { gen: l.gen, inv: !l.inv }).collect()
}

/// Free reduction.
pub fn word_reduce(w: &[Letter]) -> Word {
    let mut out: Word = Vec::with_capacity(w.len());
    for &l in w {
        if let Some(&last) = out.last() {
            if last.gen == l.gen && last.inv != l.inv {
                out.pop();
                continue;
            }
        }
        out.push(l);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteTable {
    /// table[a][b] = a·b on element indices.
    pub table: Vec<Vec<usize>>,
    /// Element index of each generator.
    pub gens: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroupKind {
    Free,
    Finite {
        table: Vec<Vec<usize>>,
        identity: usize,
        inverse: Vec<usize>,
        gens: Vec<usize>,
        /// A shortest word for each element.
        words: Vec<Word>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupPresentation {
    generators: Vec<String>,
    kind: GroupKind,
}

impl fmt::Display for GroupPresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            GroupKind::Free => write!(f, "free<{}>", self.generators.join(", ")),
            GroupKind::Finite { table, .. } => {
                write!(f, "finite<{}> of order {}", self.generators.join(", "), table.len())
            }
        }
    }
}

fn check_names(names: &[String]) -> Result<()> {
    for (i, n) in names.iter().enumerate() {
        if n.is_empty() || !n.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') || n.starts_with(|c: char| c.is_ascii_digit())
        {
            return Err(Error::arg(format!("bad generator name {n:?}")));
        }
        if names[..i].contains(n) {
            return Err(Error::arg(format!("duplicate generator {n:?}")));
        }
    }
    Ok(())
}

impl GroupPresentation {
    pub fn free(names: &[&str]) -> Result<Self> {
        let generators: Vec<String> = names.iter().map(|s| s.to_string()).collect();
        check_names(&generators)?;
        Ok(GroupPresentation {
            generators,
            kind: GroupKind::Free,
        })
    }

    /// A finite group from its table; validates associativity, identity,
    /// inverses, and that the generators generate.
    pub fn finite(names: &[&str], table: FiniteTable) -> Result<Self> {
        let generators: Vec<String> = names.iter().map(|s| s.to_string()).collect();
        check_names(&generators)?;
        let FiniteTable { table, gens } = table;
        let n = table.len();
        if n == 0 || table.iter().any(|r| r.len() != n || r.iter().any(|&x| x >= n)) {
            return Err(Error::arg("group table must be square with entries in range"));
        }
        if gens.len() != generators.len() || gens.iter().any(|&g| g >= n) {
            return Err(Error::arg("one element index per generator is required"));
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|a| table[e][a] == a && table[a][e] == a))
            .ok_or_else(|| Error::arg("group table has no identity"))?;
        let mut inverse = vec![usize::MAX; n];
        for a in 0..n {
            inverse[a] = (0..n)
                .find(|&b| table[a][b] == identity && table[b][a] == identity)
                .ok_or_else(|| Error::arg(format!("element {a} has no inverse")))?;
        }
        for a in 0..n {
            for b in 0..n {
                let ab = table[a][b];
                for c in 0..n {
                    if table[ab][c] != table[a][table[b][c]] {
                        return Err(Error::arg(format!("table is not associative at ({a}, {b}, {c})")));
                    }
                }
            }
        }
        // shortest words by breadth-first search over generator letters
        let mut words: Vec<Option<Word>> = vec![None; n];
        words[identity] = Some(Vec::new());
        let mut queue = VecDeque::from([identity]);
        while let Some(a) = queue.pop_front() {
            for (gi, &g) in gens.iter().enumerate() {
                for (inv, h) in [(false, g), (true, inverse[g])] {
                    let b = table[a][h];
                    if words[b].is_none() {
                        let mut w = words[a].clone().unwrap();
                        w.push(Letter { gen: gi, inv });
                        words[b] = Some(w);
                        queue.push_back(b);
                    }
                }
            }
        }
        if words.iter().any(|w| w.is_none()) {
            return Err(Error::arg("generators do not generate the group"));
        }
        Ok(GroupPresentation {
            generators,
            kind: GroupKind::Finite {
                table,
                identity,
                inverse,
                gens,
                words: words.into_iter().map(|w| w.unwrap()).collect(),
            },
        })
    }

    /// The group generated by permutations of {0, …, k−1}.
    pub fn from_permutations(names: &[&str], perms: &[Vec<usize>]) -> Result<Self> {
        if perms.is_empty() {
            return Err(Error::arg("at least one generator is required"));
        }
        let k = perms[0].len();
        for p in perms {
            let mut seen = vec![false; k];
            if p.len() != k || p.iter().any(|&i| i >= k || std::mem::replace(&mut seen[i], true)) {
                return Err(Error::arg("generators must be permutations of the same set"));
            }
        }
        let compose = |a: &[usize], b: &[usize]| -> Vec<usize> { (0..k).map(|i| a[b[i]]).collect() };
        let id: Vec<usize> = (0..k).collect();
        let mut elems = vec![id.clone()];
        let mut index: HashMap<Vec<usize>, usize> = HashMap::from([(id, 0)]);
        let mut i = 0;
        while i < elems.len() {
            for p in perms {
                let q = compose(&elems[i], p);
                if !index.contains_key(&q) {
                    index.insert(q.clone(), elems.len());
                    elems.push(q);
                }
            }
            i += 1;
        }
        let table = elems
            .iter()
            .map(|a| elems.iter().map(|b| index[&compose(a, b)]).collect())
            .collect();
        let gens = perms.iter().map(|p| index[p]).collect();
        Self::finite(names, FiniteTable { table, gens })
    }

    pub fn cyclic(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::arg("cyclic group order must be positive"));
        }
        let table = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        Self::finite(&["g"], FiniteTable { table, gens: vec![1 % n] })
    }

    /// S_k on generators s = (0 1) and c = (0 1 … k−1).
    pub fn symmetric(k: usize) -> Result<Self> {
        if k < 2 {
            return Self::cyclic(1);
        }
        let mut s: Vec<usize> = (0..k).collect();
        s.swap(0, 1);
        let c: Vec<usize> = (0..k).map(|i| (i + 1) % k).collect();
        Self::from_permutations(&["s", "c"], &[s, c])
    }

    /// The dihedral group of order 2n on r (rotation) and s (reflection).
    pub fn dihedral(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::arg("dihedral group needs n ≥ 2"));
        }
        let r: Vec<usize> = (0..n).map(|i| (i + 1) % n).collect();
        let s: Vec<usize> = (0..n).map(|i| (n - i) % n).collect();
        Self::from_permutations(&["r", "s"], &[r, s])
    }

    pub fn generators(&self) -> &[String] {
        &self.generators
    }
    pub fn kind(&self) -> &GroupKind {
        &self.kind
    }
    pub fn is_finite(&self) -> bool {
        matches!(self.kind, GroupKind::Finite { .. })
    }
    pub fn order(&self) -> Option<usize> {
        match &self.kind {
            GroupKind::Free => None,
            GroupKind::Finite { table, .. } => Some(table.len()),
        }
    }

    /// The table data needed to rebuild a finite group.
    pub fn table(&self) -> Option<FiniteTable> {
        match &self.kind {
            GroupKind::Free => None,
            GroupKind::Finite { table, gens, .. } => Some(FiniteTable {
                table: table.clone(),
                gens: gens.clone(),
            }),
        }
    }

    /// Parses `g*h^-1*g^2`; `1` or the empty string is the identity.
    pub fn parse_word(&self, s: &str) -> Result<Word> {
        let s = s.trim();
        if s.is_empty() || s == "1" {
            return Ok(Vec::new());
        }
        let mut w = Vec::new();
        for part in s.split(|c: char| c == '*' || c.is_whitespace()).filter(|p| !p.is_empty()) {
            let (name, exp) = match part.split_once('^') {
                Some((n, e)) => (
                    n,
                    e.parse::<i64>()
                        .map_err(|_| Error::arg(format!("bad exponent in {part:?}")))?,
                ),
                None => (part, 1),
            };
            let gen = self
                .generators
                .iter()
                .position(|g| g == name)
                .ok_or_else(|| Error::arg(format!("unknown generator {name:?}")))?;
            for _ in 0..exp.unsigned_abs() {
                w.push(Letter { gen, inv: exp < 0 });
            }
        }
        Ok(w)
    }

    pub fn word_to_string(&self, w: &[Letter]) -> String {
        if w.is_empty() {
            return "1".into();
        }
        let mut parts: Vec<String> = Vec::new();
        let mut i = 0;
        while i < w.len() {
            let mut j = i;
            while j < w.len() && w[j] == w[i] {
                j += 1;
            }
            let k = (j - i) as i64 * if w[i].inv { -1 } else { 1 };
            let name = &self.generators[w[i].gen];
            parts.push(if k == 1 { name.clone() } else { format!("{name}^{k}") });
            i = j;
        }
        parts.join("*")
    }

    /// All freely reduced words of length ≤ cap, shortest first.
    pub fn words_up_to(&self, cap: usize) -> Vec<Word> {
        let letters: Vec<Letter> = (0..self.generators.len())
            .flat_map(|gen| [Letter { gen, inv: false }, Letter { gen, inv: true }])
            .collect();
        let mut out = vec![Vec::new()];
        let mut frontier: Vec<Word> = vec![Vec::new()];
        for _ in 0..cap {
            let mut next = Vec::new();
            for w in &frontier {
                for &l in &letters {
                    if let Some(last) = w.last() {
                        if last.gen == l.gen && last.inv != l.inv {
                            continue;
                        }
                    }
                    let mut v = w.clone();
                    v.push(l);
                    next.push(v);
                }
            }
            out.extend(next.iter().cloned());
            frontier = next;
        }
        out
    }

    /// Element index of a word (finite groups).
    pub fn element_of(&self, w: &[Letter]) -> Result<usize> {
        match &self.kind {
            GroupKind::Free => Err(Error::arg("free groups have no element table")),
            GroupKind::Finite {
                table,
                identity,
                inverse,
                gens,
                ..
            } => Ok(w.iter().fold(*identity, |a, l| {
                let g = gens[l.gen];
                table[a][if l.inv { inverse[g] } else { g }]
            })),
        }
    }

    /// Shortest word for each element, in element order (finite groups).
    pub fn element_words(&self) -> Result<&[Word]> {
        match &self.kind {
            GroupKind::Free => Err(Error::arg("free groups have no element table")),
            GroupKind::Finite { words, .. } => Ok(words),
        }
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        match &self.kind {
            GroupKind::Finite { table, .. } => table[a][b],
            GroupKind::Free => panic!("mul on a free group"),
        }
    }
    pub fn inv(&self, a: usize) -> usize {
        match &self.kind {
            GroupKind::Finite { inverse, .. } => inverse[a],
            GroupKind::Free => panic!("inv on a free group"),
        }
    }
    pub fn identity(&self) -> Option<usize> {
        match &self.kind {
            GroupKind::Finite { identity, .. } => Some(*identity),
            GroupKind::Free => None,
        }
    }

    /// Conjugacy classes (finite groups), each sorted, ordered by least
    /// element.
    pub fn conjugacy_classes(&self) -> Result<Vec<Vec<usize>>> {
        let n = self.order().ok_or_else(|| Error::arg("free groups have no classes"))?;
        let mut class_of: BTreeMap<usize, usize> = BTreeMap::new();
        let mut classes: Vec<Vec<usize>> = Vec::new();
        for a in 0..n {
            if class_of.contains_key(&a) {
                continue;
            }
            let mut cls: Vec<usize> = (0..n).map(|g| self.mul(self.mul(g, a), self.inv(g))).collect();
            cls.sort_unstable();
            cls.dedup();
            for &c in &cls {
                class_of.insert(c, classes.len());
            }
            classes.push(cls);
        }
        Ok(classes)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_groups() {
        assert_eq!(GroupPresentation::symmetric(3).unwrap().order(), Some(6));
        assert_eq!(GroupPresentation::dihedral(6).unwrap().order(), Some(12));
        assert_eq!(GroupPresentation::cyclic(4).unwrap().order(), Some(4));
        let s3 = GroupPresentation::symmetric(3).unwrap();
        assert_eq!(s3.conjugacy_classes().unwrap().len(), 3);
    }

    #[test]
    fn bad_tables_rejected() {
        let t = FiniteTable {
            table: vec![vec![0, 1], vec![1, 1]],
            gens: vec![1],
        };
        assert!(GroupPresentation::finite(&["g"], t).is_err());
    }

    #[test]
    fn words() {
        let g = GroupPresentation::free(&["a", "b"]).unwrap();
        let w = g.parse_word("a*b^-2*a").unwrap();
        assert_eq!(w.len(), 4);
        assert_eq!(g.word_to_string(&w), "a*b^-2*a");
        assert_eq!(word_reduce(&[w.clone(), word_inverse(&w)].concat()), Vec::new());
        // 1 + 4 + 12 reduced words of length ≤ 2
        assert_eq!(g.words_up_to(2).len(), 17);
        let c4 = GroupPresentation::cyclic(4).unwrap();
        let w = c4.parse_word("g^5").unwrap();
        assert_eq!(c4.element_of(&w).unwrap(), 1);
    }
}
