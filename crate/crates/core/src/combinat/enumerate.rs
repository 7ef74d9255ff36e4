use std::collections::BTreeSet;
use std::fmt;

use super::{
    is_palindromic, is_unimodal, BinaryTree, BinaryWord, CombObject, CombinatError, Composition,
    Matching, Partition, Permutation, Result,
};

type Candidates<S> = Box<dyn Fn(&[S]) -> Vec<S> + Send + Sync>;
type Done<S> = Box<dyn Fn(&[S]) -> bool + Send + Sync>;

/// Lazy depth-first search over prefixes.
///
/// `candidates(prefix)` lists the admissible next symbols in the order they
/// should be tried; `done(prefix)` marks complete objects, which are yielded
/// and not extended further. Output order is lexicographic in the candidate
/// order.
pub struct Backtrack<S> {
    candidates: Candidates<S>,
    done: Done<S>,
    prefix: Vec<S>,
    stack: Vec<(Vec<S>, usize)>,
    started: bool,
}

impl<S: Clone> Backtrack<S> {
    pub fn new(
        candidates: impl Fn(&[S]) -> Vec<S> + Send + Sync + 'static,
        done: impl Fn(&[S]) -> bool + Send + Sync + 'static,
    ) -> Self {
        Self {
            candidates: Box::new(candidates),
            done: Box::new(done),
            prefix: Vec::new(),
            stack: Vec::new(),
            started: false,
        }
    }
}

impl<S: Clone> Iterator for Backtrack<S> {
    type Item = Vec<S>;

    fn next(&mut self) -> Option<Vec<S>> {
        if !self.started {
            self.started = true;
            if (self.done)(&[]) {
                return Some(Vec::new());
            }
            let root = (self.candidates)(&[]);
            self.stack.push((root, 0));
        }
        loop {
            let (cands, idx) = self.stack.last_mut()?;
            if *idx < cands.len() {
                let c = cands[*idx].clone();
                *idx += 1;
                self.prefix.push(c);
                if (self.done)(&self.prefix) {
                    let out = self.prefix.clone();
                    self.prefix.pop();
                    return Some(out);
                }
                let next = (self.candidates)(&self.prefix);
                self.stack.push((next, 0));
            } else {
                self.stack.pop();
                self.prefix.pop();
            }
        }
    }
}

/// Allowed part sizes for restricted compositions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PartSet {
    All,
    Finite(BTreeSet<u32>),
    Odd,
    Even,
}

impl PartSet {
    pub fn finite(parts: &[u32]) -> Self {
        Self::Finite(parts.iter().copied().filter(|&p| p > 0).collect())
    }

    pub fn contains(&self, p: u32) -> bool {
        p > 0
            && match self {
                Self::All => true,
                Self::Finite(s) => s.contains(&p),
                Self::Odd => p % 2 == 1,
                Self::Even => p.is_multiple_of(2),
            }
    }
}

impl fmt::Display for PartSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::All => f.write_str("all"),
            Self::Odd => f.write_str("odd"),
            Self::Even => f.write_str("even"),
            Self::Finite(s) => {
                let v: Vec<String> = s.iter().map(u32::to_string).collect();
                f.write_str(&v.join(","))
            }
        }
    }
}

impl std::str::FromStr for PartSet {
    type Err = CombinatError;

    /// `all`, `odd`, `even`, or a comma separated list such as `1,2`.
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "all" => Ok(Self::All),
            "odd" => Ok(Self::Odd),
            "even" => Ok(Self::Even),
            list => Ok(Self::finite(&super::parse_list(list)?)),
        }
    }
}

/// Largest sizes the enumerators accept, per family.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Caps {
    pub compositions: usize,
    pub words: usize,
    pub balanced: usize,
    pub trees: usize,
    pub matchings: usize,
    pub permutations: usize,
    pub unimodal: usize,
    pub partitions: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Self {
            compositions: 14,
            words: 14,
            balanced: 8,
            trees: 12,
            matchings: 6,
            permutations: 8,
            unimodal: 20,
            partitions: 40,
        }
    }
}

impl Caps {
    /// The same cap for every family.
    pub fn uniform(n: usize) -> Self {
        Self {
            compositions: n,
            words: n,
            balanced: n,
            trees: n,
            matchings: n,
            permutations: n,
            unimodal: n,
            partitions: n,
        }
    }
}

/// An enumerable family at a fixed size.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Family {
    Compositions { n: usize },
    CompositionsWithParts { n: usize, parts: PartSet },
    Words { m: u32, length: usize },
    BalancedWords { n: usize },
    BinaryTrees { n: usize },
    Matchings { n: usize },
    Permutations { n: usize },
    UnimodalCompositions { n: usize },
    PalindromicUnimodal { n: usize },
    SingleParityPartitions { n: usize },
}

impl Family {
    /// Family names accepted by [`Family::parse`].
    pub const NAMES: [&'static str; 10] = [
        "compositions",
        "compositions-with-parts",
        "words",
        "balanced",
        "trees",
        "matchings",
        "permutations",
        "unimodal",
        "palindromic-unimodal",
        "single-parity-partitions",
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Self::Compositions { .. } => "compositions",
            Self::CompositionsWithParts { .. } => "compositions-with-parts",
            Self::Words { .. } => "words",
            Self::BalancedWords { .. } => "balanced",
            Self::BinaryTrees { .. } => "trees",
            Self::Matchings { .. } => "matchings",
            Self::Permutations { .. } => "permutations",
            Self::UnimodalCompositions { .. } => "unimodal",
            Self::PalindromicUnimodal { .. } => "palindromic-unimodal",
            Self::SingleParityPartitions { .. } => "single-parity-partitions",
        }
    }

    /// Builds a family from its name. `m` is the alphabet size for words,
    /// `parts` the allowed part set for restricted compositions.
    pub fn parse(name: &str, n: usize, m: Option<u32>, parts: Option<PartSet>) -> Result<Self> {
        Ok(match name {
            "compositions" => Self::Compositions { n },
            "compositions-with-parts" => Self::CompositionsWithParts {
                n,
                parts: parts.ok_or_else(|| {
                    CombinatError::Contract("compositions-with-parts needs a part set".into())
                })?,
            },
            "words" => Self::Words {
                m: m.unwrap_or(2),
                length: n,
            },
            "balanced" => Self::BalancedWords { n },
            "trees" => Self::BinaryTrees { n },
            "matchings" => Self::Matchings { n },
            "permutations" => Self::Permutations { n },
            "unimodal" => Self::UnimodalCompositions { n },
            "palindromic-unimodal" => Self::PalindromicUnimodal { n },
            "single-parity-partitions" => Self::SingleParityPartitions { n },
            other => {
                return Err(CombinatError::Parse(format!(
                    "unknown family `{other}`; expected one of {}",
                    Self::NAMES.join(", ")
                )))
            }
        })
    }

    /// The size parameter (word length for `Words`).
    pub fn size(&self) -> usize {
        match *self {
            Self::Compositions { n }
            | Self::CompositionsWithParts { n, .. }
            | Self::BalancedWords { n }
            | Self::BinaryTrees { n }
            | Self::Matchings { n }
            | Self::Permutations { n }
            | Self::UnimodalCompositions { n }
            | Self::PalindromicUnimodal { n }
            | Self::SingleParityPartitions { n } => n,
            Self::Words { length, .. } => length,
        }
    }

    pub fn cap(&self, caps: &Caps) -> usize {
        match self {
            Self::Compositions { .. } | Self::CompositionsWithParts { .. } => caps.compositions,
            Self::Words { .. } => caps.words,
            Self::BalancedWords { .. } => caps.balanced,
            Self::BinaryTrees { .. } => caps.trees,
            Self::Matchings { .. } => caps.matchings,
            Self::Permutations { .. } => caps.permutations,
            Self::UnimodalCompositions { .. } | Self::PalindromicUnimodal { .. } => caps.unimodal,
            Self::SingleParityPartitions { .. } => caps.partitions,
        }
    }

    /// Stream of every object in the family, after checking the size cap.
    pub fn enumerate(&self, caps: &Caps) -> Result<Box<dyn Iterator<Item = CombObject> + Send>> {
        let (n, cap) = (self.size(), self.cap(caps));
        if n > cap {
            return Err(CombinatError::OverCap {
                family: self.name().to_string(),
                n,
                cap,
            });
        }
        Ok(match self.clone() {
            Self::Compositions { n } => Box::new(
                compositions(n, PartSet::All).map(|c| CombObject::Composition(Composition(c))),
            ),
            Self::CompositionsWithParts { n, parts } => {
                Box::new(compositions(n, parts).map(|c| CombObject::Composition(Composition(c))))
            }
            Self::Words { m, length } => {
                if m == 0 && length > 0 {
                    return Ok(Box::new(std::iter::empty()));
                }
                Box::new(
                    Backtrack::new(
                        move |_: &[u32]| (0..m).collect(),
                        move |p| p.len() == length,
                    )
                    .map(move |w| {
                        if m == 2 {
                            CombObject::Binary(BinaryWord(w.into_iter().map(|b| b as u8).collect()))
                        } else {
                            CombObject::Word(w)
                        }
                    }),
                )
            }
            Self::BalancedWords { n } => {
                Box::new(balanced_words(n).map(|w| CombObject::Binary(BinaryWord(w))))
            }
            Self::BinaryTrees { n } => {
                Box::new(dyck_words(n).map(|w| CombObject::Tree(decode_dyck(&w))))
            }
            Self::Matchings { n } => Box::new(matchings(n).map(CombObject::Matching)),
            Self::Permutations { n } => Box::new(
                Backtrack::new(
                    move |p: &[u32]| (1..=n as u32).filter(|v| !p.contains(v)).collect(),
                    move |p| p.len() == n,
                )
                .map(|p| CombObject::Permutation(Permutation(p))),
            ),
            Self::UnimodalCompositions { n } => {
                Box::new(unimodal(n).map(|c| CombObject::Composition(Composition(c))))
            }
            Self::PalindromicUnimodal { n } => Box::new(
                unimodal(n)
                    .filter(|c| is_palindromic(c))
                    .map(|c| CombObject::Composition(Composition(c))),
            ),
            Self::SingleParityPartitions { n } => Box::new(
                Backtrack::new(
                    move |p: &[u32]| {
                        let rem = n as u32 - p.iter().sum::<u32>();
                        let top = p.last().copied().unwrap_or(rem).min(rem);
                        (1..=top)
                            .rev()
                            .filter(|&q| p.first().is_none_or(|&f| f % 2 == q % 2))
                            .collect()
                    },
                    move |p| p.iter().sum::<u32>() as usize == n,
                )
                .map(|p| CombObject::Partition(Partition(p))),
            ),
        })
    }
}

fn compositions(n: usize, parts: PartSet) -> Backtrack<u32> {
    let n = n as u32;
    Backtrack::new(
        move |p: &[u32]| {
            let rem = n - p.iter().sum::<u32>();
            (1..=rem).filter(|&q| parts.contains(q)).collect()
        },
        move |p| p.iter().sum::<u32>() == n,
    )
}

fn unimodal(n: usize) -> impl Iterator<Item = Vec<u32>> {
    let n = n as u32;
    Backtrack::new(
        move |p: &[u32]| {
            let rem = n - p.iter().sum::<u32>();
            let descending = p.windows(2).any(|w| w[0] > w[1]);
            let top = if descending {
                rem.min(*p.last().unwrap())
            } else {
                rem
            };
            (1..=top).collect()
        },
        move |p| p.iter().sum::<u32>() == n,
    )
    .inspect(|c| debug_assert!(is_unimodal(c)))
}

fn balanced_words(n: usize) -> Backtrack<u8> {
    Backtrack::new(
        move |p: &[u8]| {
            let ones = p.iter().filter(|&&b| b == 1).count();
            let zeros = p.len() - ones;
            let mut c = Vec::with_capacity(2);
            if zeros < n {
                c.push(0);
            }
            if ones < n {
                c.push(1);
            }
            c
        },
        move |p| p.len() == 2 * n,
    )
}

/// Dyck words of semilength `n`, `1` an up step.
fn dyck_words(n: usize) -> Backtrack<u8> {
    Backtrack::new(
        move |p: &[u8]| {
            let ups = p.iter().filter(|&&b| b == 1).count();
            let downs = p.len() - ups;
            let mut c = Vec::with_capacity(2);
            if downs < ups {
                c.push(0);
            }
            if ups < n {
                c.push(1);
            }
            c
        },
        move |p| p.len() == 2 * n,
    )
}

/// Inverse of `node(L, R) -> 1 w(L) 0 w(R)`.
fn decode_dyck(w: &[u8]) -> BinaryTree {
    fn go(w: &[u8], pos: &mut usize) -> BinaryTree {
        if *pos >= w.len() || w[*pos] == 0 {
            return BinaryTree::Empty;
        }
        *pos += 1;
        let left = go(w, pos);
        *pos += 1; // the matching down step
        let right = go(w, pos);
        BinaryTree::node(left, right)
    }
    let mut pos = 0;
    go(w, &mut pos)
}

/// Partner choices for successive smallest unmatched points.
fn matchings(n: usize) -> impl Iterator<Item = Matching> {
    let m = 2 * n as u32;
    let open = move |p: &[u32]| -> (Vec<bool>, Vec<(u32, u32)>) {
        let mut used = vec![false; m as usize + 1];
        let mut arcs = Vec::with_capacity(p.len());
        for &j in p {
            let i = (1..=m).find(|&i| !used[i as usize]).unwrap();
            used[i as usize] = true;
            used[j as usize] = true;
            arcs.push((i, j));
        }
        (used, arcs)
    };
    Backtrack::new(
        move |p: &[u32]| {
            let (used, _) = open(p);
            match (1..=m).find(|&i| !used[i as usize]) {
                Some(i) => (i + 1..=m).filter(|&j| !used[j as usize]).collect(),
                None => Vec::new(),
            }
        },
        move |p| p.len() == n,
    )
    .map(move |p| Matching { arcs: open(&p).1 })
}

#[cfg(test)]
mod tests {
    use super::super::{histogram, Statistic};
    use super::*;

    fn count(f: Family) -> usize {
        f.enumerate(&Caps::default()).unwrap().count()
    }

    #[test]
    fn cardinalities() {
        for n in 1..=10 {
            assert_eq!(count(Family::Compositions { n }), 1 << (n - 1));
        }
        assert_eq!(count(Family::Compositions { n: 0 }), 1);
        let cat = [1, 1, 2, 5, 14, 42, 132, 429];
        for (n, &c) in cat.iter().enumerate() {
            assert_eq!(count(Family::BinaryTrees { n }), c);
        }
        let central = [1, 2, 6, 20, 70, 252];
        for (n, &c) in central.iter().enumerate() {
            assert_eq!(count(Family::BalancedWords { n }), c);
        }
        let dfact = [1, 1, 3, 15, 105, 945];
        for (n, &c) in dfact.iter().enumerate() {
            assert_eq!(count(Family::Matchings { n }), c);
        }
        assert_eq!(count(Family::Permutations { n: 5 }), 120);
        assert_eq!(count(Family::Words { m: 3, length: 4 }), 81);
        let uni = [1, 1, 2, 4, 8, 15, 27, 47];
        for (n, &c) in uni.iter().enumerate() {
            assert_eq!(count(Family::UnimodalCompositions { n }), c);
        }
        let pu = [1, 1, 2, 2, 4, 3, 7, 5, 11];
        for (n, &c) in pu.iter().enumerate() {
            assert_eq!(count(Family::PalindromicUnimodal { n }), c);
        }
        assert_eq!(count(Family::SingleParityPartitions { n: 6 }), 7);
    }

    #[test]
    fn order_is_lexicographic() {
        let all: Vec<CombObject> = Family::Compositions { n: 3 }
            .enumerate(&Caps::default())
            .unwrap()
            .collect();
        let parts: Vec<Vec<u32>> = all
            .into_iter()
            .map(|o| match o {
                CombObject::Composition(c) => c.0,
                _ => unreachable!(),
            })
            .collect();
        assert_eq!(parts, vec![vec![1, 1, 1], vec![1, 2], vec![2, 1], vec![3]]);
    }

    #[test]
    fn restricted_parts() {
        let fib = [1, 1, 2, 3, 5, 8, 13];
        for (n, &c) in fib.iter().enumerate() {
            let f = Family::CompositionsWithParts {
                n,
                parts: PartSet::finite(&[1, 2]),
            };
            assert_eq!(count(f), c);
            let f = Family::CompositionsWithParts {
                n: n + 1,
                parts: PartSet::Odd,
            };
            assert_eq!(count(f), c);
        }
    }

    #[test]
    fn over_cap_is_refused() {
        let err = Family::Matchings { n: 7 }
            .enumerate(&Caps::default())
            .err()
            .unwrap();
        assert!(matches!(err, CombinatError::OverCap { n: 7, cap: 6, .. }));
        assert!(Family::Matchings { n: 7 }
            .enumerate(&Caps::uniform(7))
            .is_ok());
    }

    #[test]
    fn balanced_da_histogram() {
        let h = histogram(
            &Family::BalancedWords { n: 2 },
            &[Statistic::Da],
            &Caps::default(),
        )
        .unwrap();
        assert_eq!(h.get(&[0]), 2);
        assert_eq!(h.get(&[2]), 4);
        assert_eq!(h.total(), 6);
    }

    #[test]
    fn symmetric_subfamilies() {
        let caps = Caps::default();
        let sym_trees = [1, 1, 0, 1, 0, 2, 0, 5, 0, 14];
        for (n, &c) in sym_trees.iter().enumerate() {
            let h = histogram(&Family::BinaryTrees { n }, &[Statistic::Da], &caps).unwrap();
            assert_eq!(h.get(&[0]), c);
        }
        let inv = [1, 1, 2, 4, 10, 26];
        for (n, &c) in inv.iter().enumerate() {
            let h = histogram(&Family::Permutations { n }, &[Statistic::Da], &caps).unwrap();
            assert_eq!(h.get(&[0]), c);
        }
    }

    #[test]
    fn tree_decoding_is_injective() {
        let trees: BTreeSet<BinaryTree> = dyck_words(6).map(|w| decode_dyck(&w)).collect();
        assert_eq!(trees.len(), 132);
        assert!(trees.iter().all(|t| t.size() == 6));
    }
}
