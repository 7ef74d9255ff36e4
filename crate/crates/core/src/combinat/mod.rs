//! Combinatorial objects and the statistics defined on them.
//!
//! Everything here is exhaustive and exact: these are the brute-force
//! oracles that the generating functions in [`crate::catalog`] are checked
//! against.

mod enumerate;

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

pub use enumerate::{Backtrack, Caps, Family, PartSet};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CombinatError {
    #[error("refusing to enumerate {family} at size {n}: cap is {cap} (raise it with --cap)")]
    OverCap {
        family: String,
        n: usize,
        cap: usize,
    },
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("statistic `{stat}` is not defined for {family}")]
    UnsupportedStatistic { stat: String, family: String },
}

pub type Result<T> = std::result::Result<T, CombinatError>;

/// Number of symmetrically placed pairs `(a_i, a_{m+1-i})` with distinct entries.
pub fn seq_da<T: PartialEq>(s: &[T]) -> u32 {
    let m = s.len();
    (0..m / 2).filter(|&i| s[i] != s[m - 1 - i]).count() as u32
}

pub fn is_palindromic<T: PartialEq>(s: &[T]) -> bool {
    seq_da(s) == 0
}

/// Weakly increasing then weakly decreasing.
pub fn is_unimodal(s: &[u32]) -> bool {
    let mut i = 0;
    while i + 1 < s.len() && s[i] <= s[i + 1] {
        i += 1;
    }
    while i + 1 < s.len() && s[i] >= s[i + 1] {
        i += 1;
    }
    i + 1 >= s.len()
}

/// Overlapping occurrences of `pattern` as a consecutive subword.
pub fn count_pattern(w: &[u8], pattern: &[u8]) -> u32 {
    if pattern.is_empty() || pattern.len() > w.len() {
        return 0;
    }
    w.windows(pattern.len())
        .filter(|win| *win == pattern)
        .count() as u32
}

/// A composition: a finite sequence of positive parts.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Composition(Vec<u32>);

impl Composition {
    pub fn new(parts: Vec<u32>) -> Result<Self> {
        if parts.contains(&0) {
            return Err(CombinatError::Contract(format!(
                "composition parts must be positive: {parts:?}"
            )));
        }
        Ok(Self(parts))
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    pub fn sum(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn da(&self) -> u32 {
        seq_da(&self.0)
    }

    pub fn is_palindromic(&self) -> bool {
        is_palindromic(&self.0)
    }

    pub fn is_unimodal(&self) -> bool {
        is_unimodal(&self.0)
    }
}

impl FromStr for Composition {
    type Err = CombinatError;

    /// Comma separated parts, e.g. `1,2,1`; the empty string is the empty composition.
    fn from_str(s: &str) -> Result<Self> {
        Self::new(parse_list(s)?)
    }
}

impl fmt::Display for Composition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_list(f, &self.0)
    }
}

/// A partition: weakly decreasing positive parts.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Partition(Vec<u32>);

impl Partition {
    pub fn new(parts: Vec<u32>) -> Result<Self> {
        if parts.contains(&0) || parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(CombinatError::Contract(format!(
                "partition parts must be positive and weakly decreasing: {parts:?}"
            )));
        }
        Ok(Self(parts))
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    pub fn sum(&self) -> u32 {
        self.0.iter().sum()
    }

    /// All parts odd, or all parts even (vacuously true for the empty partition).
    pub fn is_single_parity(&self) -> bool {
        self.0.iter().all(|p| p % 2 == 0) || self.0.iter().all(|p| p % 2 == 1)
    }
}

impl FromStr for Partition {
    type Err = CombinatError;

    fn from_str(s: &str) -> Result<Self> {
        Self::new(parse_list(s)?)
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_list(f, &self.0)
    }
}

fn parse_list(s: &str) -> Result<Vec<u32>> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<u32>()
                .map_err(|e| CombinatError::Parse(format!("bad part `{p}`: {e}")))
        })
        .collect()
}

fn write_list(f: &mut fmt::Formatter<'_>, xs: &[u32]) -> fmt::Result {
    for (i, x) in xs.iter().enumerate() {
        if i > 0 {
            write!(f, ",")?;
        }
        write!(f, "{x}")?;
    }
    Ok(())
}

/// A word over `{0, 1}`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BinaryWord(Vec<u8>);

/// Every pairing and pattern statistic of an even-length binary word.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct WordStats {
    pub da: u32,
    pub sz: u32,
    pub o00: u32,
    pub o01: u32,
    pub o10: u32,
    pub o11: u32,
    pub o0: u32,
    pub cnt001: u32,
    pub cnt01: u32,
}

impl BinaryWord {
    pub fn new(letters: Vec<u8>) -> Result<Self> {
        if letters.iter().any(|&b| b > 1) {
            return Err(CombinatError::Contract(
                "binary word letters must be 0 or 1".to_string(),
            ));
        }
        Ok(Self(letters))
    }

    pub fn letters(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn zeros(&self) -> usize {
        self.0.iter().filter(|&&b| b == 0).count()
    }

    /// Same number of zeros and ones.
    pub fn is_balanced(&self) -> bool {
        2 * self.zeros() == self.0.len()
    }

    pub fn count(&self, pattern: &str) -> u32 {
        let p: Vec<u8> = pattern.bytes().map(|b| b - b'0').collect();
        count_pattern(&self.0, &p)
    }

    /// One pass over the word. Pairing statistics need even length.
    pub fn stats(&self) -> Result<WordStats> {
        let len = self.0.len();
        if len % 2 == 1 {
            return Err(CombinatError::Contract(format!(
                "pairing statistics need even length, got {len}"
            )));
        }
        let w = &self.0;
        let n = len / 2;
        let mut s = WordStats {
            da: 0,
            sz: 0,
            o00: 0,
            o01: 0,
            o10: 0,
            o11: 0,
            o0: 0,
            cnt001: count_pattern(w, &[0, 0, 1]),
            cnt01: count_pattern(w, &[0, 1]),
        };
        for i in 0..n {
            let (a, b) = (w[i], w[len - 1 - i]);
            if a != b {
                s.da += 1;
            } else if a == 0 {
                s.sz += 1;
            }
            match (w[2 * i], w[2 * i + 1]) {
                (0, 0) => s.o00 += 1,
                (0, 1) => s.o01 += 1,
                (1, 0) => s.o10 += 1,
                _ => s.o11 += 1,
            }
            if w[2 * i] == 0 {
                s.o0 += 1;
            }
        }
        Ok(s)
    }
}

impl FromStr for BinaryWord {
    type Err = CombinatError;

    fn from_str(s: &str) -> Result<Self> {
        s.trim()
            .chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                other => Err(CombinatError::Parse(format!(
                    "binary words use only 0 and 1, found `{other}`"
                ))),
            })
            .collect::<Result<Vec<u8>>>()
            .map(Self)
    }
}

impl fmt::Display for BinaryWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.0 {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

/// Step in a node address.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Dir {
    L,
    R,
}

/// The word over `{L, R}` leading from the root to a node.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeAddress(pub Vec<Dir>);

impl NodeAddress {
    pub fn complement(&self) -> Self {
        Self(
            self.0
                .iter()
                .map(|d| match d {
                    Dir::L => Dir::R,
                    Dir::R => Dir::L,
                })
                .collect(),
        )
    }
}

impl FromStr for NodeAddress {
    type Err = CombinatError;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                'L' => Ok(Dir::L),
                'R' => Ok(Dir::R),
                other => Err(CombinatError::Parse(format!(
                    "bad address letter `{other}`"
                ))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Self)
    }
}

impl fmt::Display for NodeAddress {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in &self.0 {
            write!(f, "{d:?}")?;
        }
        Ok(())
    }
}

/// A binary tree; each node has an optional left and right child.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BinaryTree {
    Empty,
    Node(Box<BinaryTree>, Box<BinaryTree>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TreeStats {
    pub n: u32,
    pub da: u32,
    pub ds: u32,
}

impl BinaryTree {
    pub fn leaf() -> Self {
        Self::node(Self::Empty, Self::Empty)
    }

    pub fn node(left: Self, right: Self) -> Self {
        Self::Node(Box::new(left), Box::new(right))
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, Self::Empty)
    }

    pub fn size(&self) -> u32 {
        match self {
            Self::Empty => 0,
            Self::Node(l, r) => 1 + l.size() + r.size(),
        }
    }

    pub fn children(&self) -> Option<(&BinaryTree, &BinaryTree)> {
        match self {
            Self::Empty => None,
            Self::Node(l, r) => Some((l, r)),
        }
    }

    pub fn addresses(&self) -> Vec<NodeAddress> {
        fn walk(t: &BinaryTree, path: &mut Vec<Dir>, out: &mut Vec<NodeAddress>) {
            if let BinaryTree::Node(l, r) = t {
                out.push(NodeAddress(path.clone()));
                path.push(Dir::L);
                walk(l, path, out);
                path.pop();
                path.push(Dir::R);
                walk(r, path, out);
                path.pop();
            }
        }
        let mut out = Vec::new();
        walk(self, &mut Vec::new(), &mut out);
        out
    }

    /// Builds the tree whose node set is exactly `addrs`, which must be
    /// closed under taking prefixes.
    pub fn from_addresses(addrs: &[NodeAddress]) -> Result<Self> {
        let set: HashSet<&NodeAddress> = addrs.iter().collect();
        if set.len() != addrs.len() {
            return Err(CombinatError::Contract("duplicate node address".into()));
        }
        for a in addrs {
            if !a.0.is_empty() && !set.contains(&NodeAddress(a.0[..a.0.len() - 1].to_vec())) {
                return Err(CombinatError::Contract(format!(
                    "address {a} has no parent in the set"
                )));
            }
        }
        fn build(set: &HashSet<&NodeAddress>, path: &mut Vec<Dir>) -> BinaryTree {
            if !set.contains(&NodeAddress(path.clone())) {
                return BinaryTree::Empty;
            }
            path.push(Dir::L);
            let l = build(set, path);
            path.pop();
            path.push(Dir::R);
            let r = build(set, path);
            path.pop();
            BinaryTree::node(l, r)
        }
        Ok(build(&set, &mut Vec::new()))
    }

    /// Mirror image over a vertical line.
    pub fn reflect(&self) -> Self {
        match self {
            Self::Empty => Self::Empty,
            Self::Node(l, r) => Self::node(r.reflect(), l.reflect()),
        }
    }

    /// Node count, number of nodes without a mirror image, and number of
    /// mirror pairs among non-root nodes.
    pub fn stats(&self) -> TreeStats {
        let addrs = self.addresses();
        let set: HashSet<&NodeAddress> = addrs.iter().collect();
        let mut da = 0;
        let mut mirrored = 0;
        for a in &addrs {
            if set.contains(&a.complement()) {
                if !a.0.is_empty() {
                    mirrored += 1;
                }
            } else {
                da += 1;
            }
        }
        TreeStats {
            n: addrs.len() as u32,
            da,
            ds: mirrored / 2,
        }
    }

    /// Nested `[left, right]` arrays with `null` for empty subtrees.
    pub fn to_json(&self) -> Value {
        match self {
            Self::Empty => Value::Null,
            Self::Node(l, r) => json!([l.to_json(), r.to_json()]),
        }
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        match v {
            Value::Null => Ok(Self::Empty),
            Value::Array(xs) if xs.len() == 2 => Ok(Self::node(
                Self::from_json(&xs[0])?,
                Self::from_json(&xs[1])?,
            )),
            other => Err(CombinatError::Parse(format!(
                "trees are null or [left, right], got {other}"
            ))),
        }
    }
}

impl FromStr for BinaryTree {
    type Err = CombinatError;

    fn from_str(s: &str) -> Result<Self> {
        let v: Value =
            serde_json::from_str(s).map_err(|e| CombinatError::Parse(format!("tree JSON: {e}")))?;
        Self::from_json(&v)
    }
}

/// A perfect matching of `[2n]`, arcs stored with 1-based endpoints.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Matching {
    arcs: Vec<(u32, u32)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MatchingStats {
    pub c: u32,
    pub p: u32,
    pub da: u32,
}

impl Matching {
    pub fn new(arcs: Vec<(u32, u32)>) -> Result<Self> {
        let n2 = 2 * arcs.len() as u32;
        let mut seen = vec![false; n2 as usize + 1];
        let mut norm: Vec<(u32, u32)> = Vec::with_capacity(arcs.len());
        for (a, b) in arcs {
            let (i, j) = (a.min(b), a.max(b));
            if i == 0 || j > n2 || i == j || seen[i as usize] || seen[j as usize] {
                return Err(CombinatError::Contract(format!(
                    "arcs do not form a perfect matching of [{n2}]"
                )));
            }
            seen[i as usize] = true;
            seen[j as usize] = true;
            norm.push((i, j));
        }
        norm.sort_unstable();
        Ok(Self { arcs: norm })
    }

    pub fn n(&self) -> u32 {
        self.arcs.len() as u32
    }

    pub fn arcs(&self) -> &[(u32, u32)] {
        &self.arcs
    }

    /// Centered arcs, coupled arc pairs and asymmetric arcs under `i -> 2n+1-i`.
    pub fn stats(&self) -> MatchingStats {
        let m = 2 * self.n() + 1;
        let set: HashSet<(u32, u32)> = self.arcs.iter().copied().collect();
        let mut s = MatchingStats { c: 0, p: 0, da: 0 };
        let mut coupled = 0;
        for &(i, j) in &self.arcs {
            let (a, b) = (m - j, m - i);
            if (a, b) == (i, j) {
                s.c += 1;
            } else if set.contains(&(a, b)) {
                coupled += 1;
            } else {
                s.da += 1;
            }
        }
        s.p = coupled / 2;
        s
    }
}

impl FromStr for Matching {
    type Err = CombinatError;

    /// Arcs like `1-4,2-3`.
    fn from_str(s: &str) -> Result<Self> {
        let mut arcs = Vec::new();
        for tok in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let (a, b) = tok
                .split_once('-')
                .ok_or_else(|| CombinatError::Parse(format!("arc `{tok}` is not i-j")))?;
            let p = |x: &str| {
                x.trim()
                    .parse::<u32>()
                    .map_err(|e| CombinatError::Parse(format!("bad endpoint `{x}`: {e}")))
            };
            arcs.push((p(a)?, p(b)?));
        }
        Self::new(arcs)
    }
}

impl fmt::Display for Matching {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let arcs: Vec<String> = self.arcs.iter().map(|(a, b)| format!("{a}-{b}")).collect();
        f.write_str(&arcs.join(","))
    }
}

/// A permutation of `[n]` in one-line notation `(pi(1), ..., pi(n))`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Permutation(Vec<u32>);

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PermStats {
    pub c1: u32,
    pub c2: u32,
    pub da: u32,
    /// Cycle lengths in weakly decreasing order.
    pub cycle_type: Vec<u32>,
}

impl Permutation {
    pub fn new(images: Vec<u32>) -> Result<Self> {
        let n = images.len() as u32;
        let mut seen = vec![false; images.len() + 1];
        for &v in &images {
            if v == 0 || v > n || seen[v as usize] {
                return Err(CombinatError::Contract(format!(
                    "{images:?} is not a permutation of [{n}]"
                )));
            }
            seen[v as usize] = true;
        }
        Ok(Self(images))
    }

    pub fn images(&self) -> &[u32] {
        &self.0
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.0.len()];
        for (i, &v) in self.0.iter().enumerate() {
            inv[v as usize - 1] = i as u32 + 1;
        }
        Self(inv)
    }

    pub fn stats(&self) -> PermStats {
        let n = self.0.len();
        let mut visited = vec![false; n];
        let mut cycles = Vec::new();
        for start in 0..n {
            if visited[start] {
                continue;
            }
            let mut len = 0;
            let mut i = start;
            while !visited[i] {
                visited[i] = true;
                i = self.0[i] as usize - 1;
                len += 1;
            }
            cycles.push(len);
        }
        cycles.sort_unstable_by(|a, b| b.cmp(a));
        let c1 = cycles.iter().filter(|&&l| l == 1).count() as u32;
        let c2 = cycles.iter().filter(|&&l| l == 2).count() as u32;
        PermStats {
            c1,
            c2,
            da: n as u32 - c1 - 2 * c2,
            cycle_type: cycles,
        }
    }

    /// `|{i : pi(i) != pi^{-1}(i)}|`, computed without cycles.
    pub fn da_direct(&self) -> u32 {
        let inv = self.inverse();
        self.0.iter().zip(&inv.0).filter(|(a, b)| a != b).count() as u32
    }
}

impl FromStr for Permutation {
    type Err = CombinatError;

    fn from_str(s: &str) -> Result<Self> {
        Self::new(parse_list(s)?)
    }
}

/// Statistic names understood by [`CombObject::stat`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Statistic {
    Da,
    Sz,
    O00,
    O01,
    O10,
    O11,
    O0,
    Cnt001,
    Cnt01,
    Parts,
    Ds,
    C,
    P,
    C1,
    C2,
}

impl Statistic {
    pub const ALL: [Statistic; 15] = [
        Self::Da,
        Self::Sz,
        Self::O00,
        Self::O01,
        Self::O10,
        Self::O11,
        Self::O0,
        Self::Cnt001,
        Self::Cnt01,
        Self::Parts,
        Self::Ds,
        Self::C,
        Self::P,
        Self::C1,
        Self::C2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Da => "da",
            Self::Sz => "sz",
            Self::O00 => "o00",
            Self::O01 => "o01",
            Self::O10 => "o10",
            Self::O11 => "o11",
            Self::O0 => "o0",
            Self::Cnt001 => "cnt001",
            Self::Cnt01 => "cnt01",
            Self::Parts => "parts",
            Self::Ds => "ds",
            Self::C => "c",
            Self::P => "p",
            Self::C1 => "c1",
            Self::C2 => "c2",
        }
    }
}

impl FromStr for Statistic {
    type Err = CombinatError;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .iter()
            .copied()
            .find(|st| st.name() == s.trim())
            .ok_or_else(|| CombinatError::Parse(format!("unknown statistic `{s}`")))
    }
}

impl fmt::Display for Statistic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Any enumerated object.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CombObject {
    Composition(Composition),
    /// m-ary word, letters `0..m`.
    Word(Vec<u32>),
    Binary(BinaryWord),
    Tree(BinaryTree),
    Matching(Matching),
    Permutation(Permutation),
    Partition(Partition),
}

impl CombObject {
    fn kind(&self) -> &'static str {
        match self {
            Self::Composition(_) => "compositions",
            Self::Word(_) => "words",
            Self::Binary(_) => "binary words",
            Self::Tree(_) => "binary trees",
            Self::Matching(_) => "matchings",
            Self::Permutation(_) => "permutations",
            Self::Partition(_) => "partitions",
        }
    }

    pub fn stat(&self, st: Statistic) -> Result<u32> {
        use Statistic as S;
        let unsupported = || CombinatError::UnsupportedStatistic {
            stat: st.name().to_string(),
            family: self.kind().to_string(),
        };
        match self {
            Self::Composition(c) => match st {
                S::Da => Ok(c.da()),
                S::Parts => Ok(c.parts().len() as u32),
                _ => Err(unsupported()),
            },
            Self::Partition(p) => match st {
                S::Parts => Ok(p.parts().len() as u32),
                _ => Err(unsupported()),
            },
            Self::Word(w) => match st {
                S::Da => Ok(seq_da(w)),
                _ => Err(unsupported()),
            },
            Self::Binary(w) => {
                if st == S::Da && w.len() % 2 == 1 {
                    return Ok(seq_da(w.letters()));
                }
                let s = w.stats()?;
                match st {
                    S::Da => Ok(s.da),
                    S::Sz => Ok(s.sz),
                    S::O00 => Ok(s.o00),
                    S::O01 => Ok(s.o01),
                    S::O10 => Ok(s.o10),
                    S::O11 => Ok(s.o11),
                    S::O0 => Ok(s.o0),
                    S::Cnt001 => Ok(s.cnt001),
                    S::Cnt01 => Ok(s.cnt01),
                    _ => Err(unsupported()),
                }
            }
            Self::Tree(t) => {
                let s = t.stats();
                match st {
                    S::Da => Ok(s.da),
                    S::Ds => Ok(s.ds),
                    _ => Err(unsupported()),
                }
            }
            Self::Matching(m) => {
                let s = m.stats();
                match st {
                    S::C => Ok(s.c),
                    S::P => Ok(s.p),
                    S::Da => Ok(s.da),
                    _ => Err(unsupported()),
                }
            }
            Self::Permutation(p) => {
                let s = p.stats();
                match st {
                    S::C1 => Ok(s.c1),
                    S::C2 => Ok(s.c2),
                    S::Da => Ok(s.da),
                    _ => Err(unsupported()),
                }
            }
        }
    }

    /// Compact JSON: arrays for sequences, 0/1 strings for binary words,
    /// nested pairs for trees, sorted arc lists for matchings.
    pub fn to_json(&self) -> Value {
        match self {
            Self::Composition(c) => json!(c.parts()),
            Self::Partition(p) => json!(p.parts()),
            Self::Word(w) if w.iter().all(|&l| l < 10) => {
                Value::String(w.iter().map(|l| char::from(b'0' + *l as u8)).collect())
            }
            Self::Word(w) => json!(w),
            Self::Binary(w) => Value::String(w.to_string()),
            Self::Tree(t) => t.to_json(),
            Self::Matching(m) => json!(m.arcs().iter().map(|&(i, j)| [i, j]).collect::<Vec<_>>()),
            Self::Permutation(p) => json!(p.images()),
        }
    }
}

/// Exact joint counts of a statistic vector over one size class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StatHistogram {
    pub family: String,
    pub n: usize,
    pub stats: Vec<Statistic>,
    pub counts: BTreeMap<Vec<u32>, u64>,
}

impl StatHistogram {
    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn get(&self, key: &[u32]) -> u64 {
        self.counts.get(key).copied().unwrap_or(0)
    }

    /// Marginal histogram of one statistic.
    pub fn marginal(&self, index: usize) -> BTreeMap<u32, u64> {
        let mut out = BTreeMap::new();
        for (k, v) in &self.counts {
            *out.entry(k[index]).or_insert(0) += v;
        }
        out
    }
}

/// Enumerates `family` and tallies the requested statistics jointly.
pub fn histogram(family: &Family, stats: &[Statistic], caps: &Caps) -> Result<StatHistogram> {
    let mut counts: BTreeMap<Vec<u32>, u64> = BTreeMap::new();
    for obj in family.enumerate(caps)? {
        let key = stats
            .iter()
            .map(|&s| obj.stat(s))
            .collect::<Result<Vec<u32>>>()?;
        *counts.entry(key).or_insert(0) += 1;
    }
    Ok(StatHistogram {
        family: family.name().to_string(),
        n: family.size(),
        stats: stats.to_vec(),
        counts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> BinaryWord {
        s.parse().unwrap()
    }

    #[test]
    fn sequence_da() {
        assert_eq!(seq_da(&[2, 5, 1, 3, 2]), 1);
        assert_eq!(seq_da(&[1, 2, 3, 2, 1]), 0);
        assert_eq!(seq_da(&[1, 2]), 1);
        assert_eq!(seq_da::<u32>(&[]), 0);
    }

    #[test]
    fn word_pair_statistics() {
        let s = w("0110").stats().unwrap();
        assert_eq!((s.da, s.sz), (0, 1));
        let ex = w("0111000010110110110001").stats().unwrap();
        assert_eq!(ex.o00, 3);
        assert_eq!(ex.o0, 6);
        assert!(w("011").stats().is_err());
        assert_eq!(w("00100").count("001"), 1);
        assert_eq!(w("0101").count("01"), 2);
    }

    #[test]
    fn unimodality() {
        assert!(is_unimodal(&[1, 2, 1]) && is_palindromic(&[1, 2, 1]));
        assert!(!is_unimodal(&[2, 1, 2]));
        assert!(is_unimodal(&[1, 3]) && !is_palindromic(&[1, 3]));
        assert!(is_unimodal(&[]));
    }

    fn tree(addrs: &[&str]) -> BinaryTree {
        let a: Vec<NodeAddress> = addrs.iter().map(|s| s.parse().unwrap()).collect();
        BinaryTree::from_addresses(&a).unwrap()
    }

    #[test]
    fn figure_tree_has_five_unmirrored_nodes() {
        let t = tree(&[
            "", "L", "LL", "LLR", "LR", "LRL", "LRR", "R", "RR", "RRR", "RRRL", "RRL",
        ]);
        let s = t.stats();
        assert_eq!((s.n, s.da), (12, 5));
        assert_eq!(2 * s.ds + s.da + 1, s.n);
    }

    #[test]
    fn small_tree_statistics() {
        let balanced = tree(&["", "L", "R"]);
        assert_eq!(balanced.stats(), TreeStats { n: 3, da: 0, ds: 1 });
        for path in [
            ["", "L", "LL"],
            ["", "L", "LR"],
            ["", "R", "RL"],
            ["", "R", "RR"],
        ] {
            assert_eq!(tree(&path).stats(), TreeStats { n: 3, da: 2, ds: 0 });
        }
        assert_eq!(BinaryTree::leaf().stats(), TreeStats { n: 1, da: 0, ds: 0 });
        assert!(BinaryTree::from_addresses(&["LL".parse().unwrap()]).is_err());
    }

    #[test]
    fn tree_json_round_trip() {
        let t = tree(&["", "L", "LR"]);
        let j = t.to_json();
        assert_eq!(j.to_string(), "[[null,[null,null]],null]");
        assert_eq!(BinaryTree::from_json(&j).unwrap(), t);
    }

    #[test]
    fn matching_classification() {
        let fig: Matching = "1-4,2-9,3-7,5-8,6-10,11-12".parse().unwrap();
        assert_eq!(fig.stats(), MatchingStats { c: 1, p: 1, da: 3 });
        let m: Matching = "1-4,2-3".parse().unwrap();
        assert_eq!(m.stats(), MatchingStats { c: 2, p: 0, da: 0 });
        let m: Matching = "1-2,3-4".parse().unwrap();
        assert_eq!(m.stats(), MatchingStats { c: 0, p: 1, da: 0 });
        assert!(Matching::new(vec![(1, 2), (2, 3)]).is_err());
    }

    #[test]
    fn permutation_statistics() {
        let id = Permutation::new(vec![1, 2, 3]).unwrap().stats();
        assert_eq!((id.c1, id.c2, id.da), (3, 0, 0));
        let cyc = Permutation::new(vec![2, 3, 1]).unwrap();
        assert_eq!(cyc.stats().da, 3);
        assert_eq!(cyc.da_direct(), 3);
        assert!(Permutation::new(vec![1, 1]).is_err());
    }

    #[test]
    fn statistic_names_round_trip() {
        for s in Statistic::ALL {
            assert_eq!(s.name().parse::<Statistic>().unwrap(), s);
        }
        assert!("bogus".parse::<Statistic>().is_err());
    }

    #[test]
    fn unsupported_statistic_is_reported() {
        let o = CombObject::Tree(BinaryTree::leaf());
        assert!(matches!(
            o.stat(Statistic::Sz),
            Err(CombinatError::UnsupportedStatistic { .. })
        ));
    }
}
