//! Explicit bijections: the zigzag reading of balanced words, the map `phi`
//! transporting odd-position pair statistics to pattern counts, tree
//! splitting, and palindromic unimodal compositions vs single-parity
//! partitions.

use std::collections::{BTreeSet, HashSet};

use serde::Serialize;

use crate::combinat::{
    is_palindromic, is_unimodal, BinaryTree, BinaryWord, CombinatError, Composition, NodeAddress,
    Partition, Result,
};

fn contract(msg: impl Into<String>) -> CombinatError {
    CombinatError::Contract(msg.into())
}

fn require_balanced(w: &BinaryWord) -> Result<usize> {
    if !w.is_balanced() {
        return Err(contract(format!(
            "{w} does not have equally many zeros and ones"
        )));
    }
    Ok(w.len() / 2)
}

/// `w_1 w_{2n} w_2 w_{2n-1} ... w_n w_{n+1}`.
pub fn zigzag(w: &BinaryWord) -> Result<BinaryWord> {
    let l = w.letters();
    if l.len() % 2 == 1 {
        return Err(contract("zigzag needs even length"));
    }
    let n = l.len() / 2;
    let mut out = Vec::with_capacity(l.len());
    for i in 0..n {
        out.push(l[i]);
        out.push(l[l.len() - 1 - i]);
    }
    BinaryWord::new(out)
}

pub fn zigzag_inverse(w: &BinaryWord) -> Result<BinaryWord> {
    let l = w.letters();
    if l.len() % 2 == 1 {
        return Err(contract("zigzag needs even length"));
    }
    let n = l.len() / 2;
    let mut out = vec![0; l.len()];
    for i in 0..n {
        out[i] = l[2 * i];
        out[l.len() - 1 - i] = l[2 * i + 1];
    }
    BinaryWord::new(out)
}

/// Disjoint sets covering `[n]` with `|Q| = |R|`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OmegaTuple {
    pub n: u32,
    pub q: BTreeSet<u32>,
    pub r: BTreeSet<u32>,
    pub s: BTreeSet<u32>,
    pub t: BTreeSet<u32>,
}

impl OmegaTuple {
    pub fn validate(&self) -> Result<()> {
        let total = self.q.len() + self.r.len() + self.s.len() + self.t.len();
        let union: BTreeSet<u32> = self
            .q
            .iter()
            .chain(&self.r)
            .chain(&self.s)
            .chain(&self.t)
            .copied()
            .collect();
        let expected: BTreeSet<u32> = (1..=self.n).collect();
        if total != self.n as usize || union != expected {
            return Err(contract("Q, R, S, T must partition [n]"));
        }
        if self.q.len() != self.r.len() {
            return Err(contract("|Q| must equal |R|"));
        }
        Ok(())
    }
}

/// Pairs `00, 11, 01, 10` at positions `2i-1, 2i` send `i` to Q, R, S, T.
pub fn word_to_omega(w: &BinaryWord) -> Result<OmegaTuple> {
    let n = require_balanced(w)?;
    let l = w.letters();
    let mut o = OmegaTuple {
        n: n as u32,
        q: BTreeSet::new(),
        r: BTreeSet::new(),
        s: BTreeSet::new(),
        t: BTreeSet::new(),
    };
    for i in 0..n {
        let idx = i as u32 + 1;
        match (l[2 * i], l[2 * i + 1]) {
            (0, 0) => o.q.insert(idx),
            (1, 1) => o.r.insert(idx),
            (0, 1) => o.s.insert(idx),
            _ => o.t.insert(idx),
        };
    }
    Ok(o)
}

pub fn omega_to_word(o: &OmegaTuple) -> Result<BinaryWord> {
    o.validate()?;
    let mut out = Vec::with_capacity(2 * o.n as usize);
    for i in 1..=o.n {
        let pair: [u8; 2] = if o.q.contains(&i) {
            [0, 0]
        } else if o.r.contains(&i) {
            [1, 1]
        } else if o.s.contains(&i) {
            [0, 1]
        } else {
            [1, 0]
        };
        out.extend(pair);
    }
    BinaryWord::new(out)
}

/// The intermediate data of `phi`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PhiDecomposition {
    pub omega: OmegaTuple,
    /// `d_1 .. d_{k+1}`: elements of T strictly between consecutive
    /// elements of R, with sentinels `0` and `n+1`.
    pub d: Vec<u32>,
    /// Lengths of the zero blocks `mu_1 .. mu_{n+1}`.
    pub mu: Vec<u32>,
}

pub fn phi_decomposition(w: &BinaryWord) -> Result<PhiDecomposition> {
    let omega = word_to_omega(w)?;
    let n = omega.n;
    let mut bounds: Vec<u32> = vec![0];
    bounds.extend(omega.r.iter().copied());
    bounds.push(n + 1);
    let d: Vec<u32> = bounds
        .windows(2)
        .map(|b| omega.t.range(b[0] + 1..b[1]).count() as u32)
        .collect();
    let mut mu = vec![0u32; n as usize + 1];
    for (j, &q) in omega.q.iter().enumerate() {
        mu[q as usize - 1] = 2 + d[j];
    }
    for &s in &omega.s {
        mu[s as usize - 1] = 1;
    }
    mu[n as usize] = *d.last().unwrap();
    Ok(PhiDecomposition { omega, d, mu })
}

/// `phi(w) = mu_1 1 mu_2 1 ... mu_n 1 mu_{n+1}`.
pub fn phi(w: &BinaryWord) -> Result<BinaryWord> {
    let dec = phi_decomposition(w)?;
    let mut out = Vec::with_capacity(w.len());
    for (i, &len) in dec.mu.iter().enumerate() {
        out.extend(std::iter::repeat_n(0u8, len as usize));
        if i < dec.omega.n as usize {
            out.push(1);
        }
    }
    BinaryWord::new(out)
}

pub fn phi_inverse(w: &BinaryWord) -> Result<BinaryWord> {
    let n = require_balanced(w)?;
    let mu: Vec<u32> = w
        .letters()
        .split(|&b| b == 1)
        .map(|block| block.len() as u32)
        .collect();
    debug_assert_eq!(mu.len(), n + 1);
    let mut o = OmegaTuple {
        n: n as u32,
        q: BTreeSet::new(),
        r: BTreeSet::new(),
        s: BTreeSet::new(),
        t: BTreeSet::new(),
    };
    let mut d = Vec::new();
    let mut rest = Vec::new();
    for (i, &len) in mu[..n].iter().enumerate() {
        let idx = i as u32 + 1;
        match len {
            0 => rest.push(idx),
            1 => {
                o.s.insert(idx);
            }
            _ => {
                o.q.insert(idx);
                d.push(len - 2);
            }
        }
    }
    d.push(mu[n]);
    // Walk the remaining indices: d_j go to T, then one goes to R.
    let mut it = rest.into_iter();
    for (j, &dj) in d.iter().enumerate() {
        for _ in 0..dj {
            let i = it
                .next()
                .ok_or_else(|| contract("inconsistent block lengths"))?;
            o.t.insert(i);
        }
        if j + 1 < d.len() {
            let i = it
                .next()
                .ok_or_else(|| contract("inconsistent block lengths"))?;
            o.r.insert(i);
        }
    }
    if it.next().is_some() {
        return Err(contract("inconsistent block lengths"));
    }
    omega_to_word(&o)
}

/// Left subtree of the root and the mirror image of the right subtree.
pub fn tree_reflect_pair(t: &BinaryTree) -> Result<(BinaryTree, BinaryTree)> {
    match t.children() {
        None => Err(contract("tree_reflect_pair needs a nonempty tree")),
        Some((l, r)) => Ok((l.clone(), r.reflect())),
    }
}

pub fn reflect(t: &BinaryTree) -> BinaryTree {
    t.reflect()
}

/// Nodes of either tree whose address does not occur in the other.
pub fn unique_nodes(a: &BinaryTree, b: &BinaryTree) -> u32 {
    let sa: HashSet<NodeAddress> = a.addresses().into_iter().collect();
    let sb: HashSet<NodeAddress> = b.addresses().into_iter().collect();
    sa.symmetric_difference(&sb).count() as u32
}

/// `lambda_i = #{j : a_j >= i}` for a palindromic unimodal composition.
pub fn unimodal_partition(a: &Composition) -> Result<Partition> {
    if !a.is_palindromic() || !a.is_unimodal() {
        return Err(contract(format!("({a}) is not palindromic and unimodal")));
    }
    let top = a.parts().iter().copied().max().unwrap_or(0);
    let parts = (1..=top)
        .map(|i| a.parts().iter().filter(|&&p| p >= i).count() as u32)
        .collect();
    Partition::new(parts)
}

/// Each part `lambda_i` adds one to the `lambda_i` most central of
/// `m = lambda_1` positions.
pub fn unimodal_partition_inverse(p: &Partition) -> Result<Composition> {
    if !p.is_single_parity() {
        return Err(contract(format!("({p}) mixes odd and even parts")));
    }
    let m = p.parts().first().copied().unwrap_or(0) as usize;
    let mut a = vec![0u32; m];
    for &l in p.parts() {
        let l = l as usize;
        // Same parity as m, so the central block is exact.
        for slot in &mut a[(m - l) / 2..(m + l) / 2] {
            *slot += 1;
        }
    }
    debug_assert!(is_palindromic(&a) && is_unimodal(&a));
    Composition::new(a)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> BinaryWord {
        s.parse().unwrap()
    }

    const EXAMPLE: &str = "0111000010110110110001";

    #[test]
    fn zigzag_small() {
        assert_eq!(zigzag(&w("0011")).unwrap(), w("0101"));
        assert_eq!(zigzag_inverse(&w("0101")).unwrap(), w("0011"));
        assert!(zigzag(&w("011")).is_err());
    }

    #[test]
    fn example_omega() {
        let o = word_to_omega(&w(EXAMPLE)).unwrap();
        assert_eq!(o.q, [3, 4, 10].into());
        assert_eq!(o.r, [2, 6, 9].into());
        assert_eq!(o.s, [1, 7, 11].into());
        assert_eq!(o.t, [5, 8].into());
        assert_eq!(omega_to_word(&o).unwrap(), w(EXAMPLE));
    }

    #[test]
    fn example_phi() {
        let dec = phi_decomposition(&w(EXAMPLE)).unwrap();
        assert_eq!(dec.d, [0, 1, 1, 0]);
        assert_eq!(dec.mu[2], 2);
        assert_eq!(dec.mu[3], 3);
        assert_eq!(dec.mu[9], 3);
        let out = phi(&w(EXAMPLE)).unwrap();
        assert_eq!(out, w("0110010001110111000101"));
        assert_eq!(phi_inverse(&out).unwrap(), w(EXAMPLE));
        let s = w(EXAMPLE).stats().unwrap();
        assert_eq!(out.count("001"), s.o00);
        assert_eq!(out.count("01"), s.o0);
    }

    #[test]
    fn simple_omega_cases() {
        let o = word_to_omega(&w("0011")).unwrap();
        assert_eq!((o.q, o.r), ([1].into(), [2].into()));
        let o = word_to_omega(&w("010101")).unwrap();
        assert!(o.q.is_empty() && o.r.is_empty());
        assert_eq!(o.s, [1, 2, 3].into());
        assert!(word_to_omega(&w("0001")).is_err());
        assert!(phi(&w("0111")).is_err());
    }

    #[test]
    fn tree_pairs() {
        let t = BinaryTree::node(BinaryTree::leaf(), BinaryTree::leaf());
        let (a, b) = tree_reflect_pair(&t).unwrap();
        assert_eq!(unique_nodes(&a, &b), 0);
        let chain = BinaryTree::node(
            BinaryTree::node(BinaryTree::leaf(), BinaryTree::Empty),
            BinaryTree::Empty,
        );
        let (a, b) = tree_reflect_pair(&chain).unwrap();
        assert_eq!((a.size(), b.size()), (2, 0));
        assert_eq!(unique_nodes(&a, &b), 2);
        assert!(tree_reflect_pair(&BinaryTree::Empty).is_err());
    }

    #[test]
    fn unimodal_partitions() {
        let c = |v: Vec<u32>| Composition::new(v).unwrap();
        let p = |v: Vec<u32>| Partition::new(v).unwrap();
        assert_eq!(
            unimodal_partition(&c(vec![1, 2, 1])).unwrap(),
            p(vec![3, 1])
        );
        assert_eq!(unimodal_partition(&c(vec![2, 2])).unwrap(), p(vec![2, 2]));
        assert_eq!(
            unimodal_partition(&c(vec![4])).unwrap(),
            p(vec![1, 1, 1, 1])
        );
        assert_eq!(
            unimodal_partition_inverse(&p(vec![3, 1])).unwrap(),
            c(vec![1, 2, 1])
        );
        assert!(unimodal_partition(&c(vec![1, 2])).is_err());
        assert!(unimodal_partition_inverse(&p(vec![2, 1])).is_err());
        assert_eq!(unimodal_partition(&c(vec![])).unwrap(), p(vec![]));
    }
}
