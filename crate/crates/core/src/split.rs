//! Descent structures for a contaminated pool.
//!
//! [`SfhTree`] is a prefix code tree over the pool-normalised probabilities
//! `p_i / mu_S`. By default codeword lengths are `ceil(log2(mu_S / p_i))`
//! (see [`CodeLengths`] for the alternatives), codewords are assigned
//! canonically in descending-p order, and the resulting trie has its
//! one-child chains contracted. Every node covers a contiguous run of leaves.
//!
//! [`me_split`] is the on-the-fly alternative: cut the pool at the prefix whose
//! conditional contamination probability is closest to 1/2.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write as _;

use crate::pool::Pool;
use crate::population::PriorVector;
use crate::saturation::sort_by_priority;
use crate::{Error, Result};

const MAX_CODE_LENGTH: u32 = 62;

pub type NodeId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeKind {
    Leaf,
    Internal { left: NodeId, right: NodeId },
}

/// A node covering leaves `start..end`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Node {
    pub start: usize,
    pub end: usize,
    pub kind: NodeKind,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SfhTree {
    leaves: Vec<usize>,
    lengths: Vec<u32>,
    depths: Vec<u32>,
    nodes: Vec<Node>,
}

/// `ceil(log2(mu / p_i))` per item, nondecreasing along `items` when `items`
/// is in descending-p order; adjusted upwards if rounding broke Kraft.
pub fn shannon_lengths(items: &[usize], prior: &PriorVector) -> Vec<u32> {
    let mu: f64 = items.iter().map(|&i| prior.p(i)).sum();
    let mut lengths: Vec<u32> = items
        .iter()
        .map(|&i| {
            let l = libm::ceil(libm::log2(mu / prior.p(i)));
            (l.max(0.0) as u32).min(MAX_CODE_LENGTH)
        })
        .collect();
    while kraft_excess(&lengths) {
        let min = lengths[0];
        let last_of_run = lengths.iter().rposition(|&l| l == min).unwrap_or(0);
        lengths[last_of_run] += 1;
    }
    lengths
}

fn kraft_excess(lengths: &[u32]) -> bool {
    let Some(&max) = lengths.iter().max() else {
        return false;
    };
    let total: u128 = lengths.iter().map(|&l| 1u128 << (max - l)).sum();
    total > 1u128 << max
}

/// `sum 2^-l_i`.
pub fn kraft_sum(lengths: &[u32]) -> f64 {
    lengths.iter().map(|&l| libm::exp2(-(l as f64))).sum()
}

impl SfhTree {
    pub fn root(&self) -> NodeId {
        0
    }

    pub fn node(&self, id: NodeId) -> Node {
        self.nodes[id]
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    /// Items covered by `id`, in leaf order.
    pub fn items(&self, id: NodeId) -> &[usize] {
        let node = self.nodes[id];
        &self.leaves[node.start..node.end]
    }

    /// All leaves, left to right.
    pub fn leaves(&self) -> &[usize] {
        &self.leaves
    }

    /// Codeword length per leaf.
    pub fn lengths(&self) -> &[u32] {
        &self.lengths
    }

    /// Depth per leaf after contraction; never exceeds the codeword length.
    pub fn depths(&self) -> &[u32] {
        &self.depths
    }

    pub fn internal_count(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n.kind, NodeKind::Internal { .. })).count()
    }

    /// Indented text, one node per line with its leaf range, items and `P` (no defective).
    pub fn dump(&self, prior: &PriorVector) -> String {
        let mut out = String::new();
        let mut stack = alloc::vec![(self.root(), 0usize)];
        while let Some((id, depth)) = stack.pop() {
            let node = self.nodes[id];
            let items = &self.leaves[node.start..node.end];
            let clean: f64 = items.iter().map(|&i| 1.0 - prior.p(i)).product();
            for _ in 0..depth {
                out.push_str("  ");
            }
            let _ = write!(out, "[{}..{}) items={:?} P={:.6}", node.start, node.end, items, clean);
            if node.end - node.start == 1 {
                let _ = write!(out, " leaf l={}", self.lengths[node.start]);
            }
            out.push('\n');
            if let NodeKind::Internal { left, right } = node.kind {
                stack.push((right, depth + 1));
                stack.push((left, depth + 1));
            }
        }
        out
    }

    fn build(&mut self, codes: &[u64], start: usize, end: usize, bit: u32, depth: u32) -> NodeId {
        let id = self.nodes.len();
        self.nodes.push(Node { start, end, kind: NodeKind::Leaf });
        if end - start == 1 {
            self.depths[start] = depth;
            return id;
        }
        // Within a prefix-free range of two or more leaves every code is longer
        // than `bit`, and the codes are sorted, so bit `bit` splits a prefix.
        let mut bit = bit;
        let mid = loop {
            let mid = (start..end).find(|&k| (codes[k] >> (self.lengths[k] - 1 - bit)) & 1 == 1).unwrap_or(end);
            if mid != start && mid != end {
                break mid;
            }
            bit += 1;
        };
        let left = self.build(codes, start, mid, bit + 1, depth + 1);
        let right = self.build(codes, mid, end, bit + 1, depth + 1);
        self.nodes[id].kind = NodeKind::Internal { left, right };
        id
    }
}

/// Builds the contracted Shannon code tree for `pool`.
pub fn build_sfh_tree(pool: &Pool, prior: &PriorVector) -> Result<SfhTree> {
    build_code_tree(pool, prior, CodeLengths::Shannon)
}

/// How codeword lengths are chosen for a [`SfhTree`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CodeLengths {
    /// `ceil(log2(mu_S / p_i))`; the per-item cost bounds rely on these.
    #[default]
    Shannon,
    /// Minimum-redundancy lengths. Shorter on average, but an individual
    /// item may get a longer codeword than its Shannon length. Falls back to
    /// Shannon if a codeword would be longer than 62 bits.
    Huffman,
    /// Huffman lengths when no item's exceeds its Shannon length, Shannon
    /// lengths otherwise. Keeps the Shannon per-item guarantee.
    Capped,
}

/// Huffman codeword lengths for `items`, nondecreasing along descending-p order.
pub fn huffman_lengths(items: &[usize], prior: &PriorVector) -> Vec<u32> {
    use alloc::collections::BinaryHeap;
    use core::cmp::{Ordering, Reverse};

    #[derive(PartialEq)]
    struct Weight(f64, usize);
    impl Eq for Weight {}
    impl PartialOrd for Weight {
        fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
            Some(self.cmp(other))
        }
    }
    impl Ord for Weight {
        fn cmp(&self, other: &Self) -> Ordering {
            self.0.total_cmp(&other.0).then(self.1.cmp(&other.1))
        }
    }

    let n = items.len();
    if n == 1 {
        return alloc::vec![0];
    }
    // Nodes 0..n are leaves; merged nodes follow. parent[k] for every node but the root.
    let mut parent = alloc::vec![usize::MAX; 2 * n - 1];
    let mut heap: BinaryHeap<Reverse<Weight>> =
        items.iter().enumerate().map(|(k, &i)| Reverse(Weight(prior.p(i), k))).collect();
    let mut next = n;
    while heap.len() > 1 {
        let Reverse(a) = heap.pop().expect("two nodes left");
        let Reverse(b) = heap.pop().expect("two nodes left");
        parent[a.1] = next;
        parent[b.1] = next;
        heap.push(Reverse(Weight(a.0 + b.0, next)));
        next += 1;
    }
    let mut depth = alloc::vec![0u32; 2 * n - 1];
    for k in (0..2 * n - 2).rev() {
        depth[k] = depth[parent[k]] + 1;
    }
    let mut lengths = depth[..n].to_vec();
    lengths.sort_unstable();
    lengths
}

/// Builds the contracted code tree for `pool` with the chosen lengths.
pub fn build_code_tree(pool: &Pool, prior: &PriorVector, construction: CodeLengths) -> Result<SfhTree> {
    if pool.is_empty() {
        return Err(Error::Usage("cannot build a tree over an empty pool"));
    }
    let mut leaves = pool.items().to_vec();
    sort_by_priority(&mut leaves, prior);
    let lengths = match construction {
        CodeLengths::Shannon => shannon_lengths(&leaves, prior),
        CodeLengths::Huffman => {
            let huffman = huffman_lengths(&leaves, prior);
            if huffman.last().is_some_and(|&l| l > MAX_CODE_LENGTH) {
                shannon_lengths(&leaves, prior)
            } else {
                huffman
            }
        }
        CodeLengths::Capped => {
            let shannon = shannon_lengths(&leaves, prior);
            let huffman = huffman_lengths(&leaves, prior);
            if huffman.iter().zip(&shannon).all(|(h, s)| h <= s) {
                huffman
            } else {
                shannon
            }
        }
    };

    let mut codes = Vec::with_capacity(lengths.len());
    let mut code = 0u64;
    for (k, &l) in lengths.iter().enumerate() {
        if k > 0 {
            code = (code + 1) << (l - lengths[k - 1]);
        }
        codes.push(code);
    }

    let n = leaves.len();
    let mut tree = SfhTree { leaves, lengths, depths: alloc::vec![0; n], nodes: Vec::with_capacity(2 * n - 1) };
    tree.build(&codes, 0, n, 0, 0);
    Ok(tree)
}

/// Index `k` such that the first `k` items of `pool` form the maximum-entropy
/// left part: `|P_{L,C} - 1/2|` is minimal over all prefix cuts, smallest `k` on ties.
pub fn me_cut(pool: &Pool, prior: &PriorVector) -> Result<usize> {
    if pool.len() < 2 {
        return Err(Error::Usage("maximum-entropy split needs at least two items"));
    }
    let denom = pool.contamination_prob();
    if denom <= 0.0 {
        return Err(Error::NumericDomain("pool can never be contaminated"));
    }
    let mut ln_prefix = 0.0;
    let mut best = (f64::INFINITY, 1);
    for (k, &item) in pool.items()[..pool.len() - 1].iter().enumerate() {
        ln_prefix += libm::log1p(-prior.p(item));
        let conditional = -libm::expm1(ln_prefix) / denom;
        let gap = libm::fabs(conditional - 0.5);
        if gap < best.0 {
            best = (gap, k + 1);
        }
    }
    Ok(best.1)
}

/// Splits a contaminated pool into its maximum-entropy prefix and the remainder.
pub fn me_split(pool: &Pool, prior: &PriorVector) -> Result<(Pool, Pool)> {
    let cut = me_cut(pool, prior)?;
    Ok(pool.split_at(cut, prior))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pool::conditional_contamination;
    use proptest::prelude::*;

    fn pool_of(probs: &[f64]) -> (PriorVector, Pool) {
        let prior = PriorVector::new(probs.to_vec()).unwrap();
        let pool = Pool::new((0..probs.len()).collect(), &prior).unwrap();
        (prior, pool)
    }

    #[test]
    fn half_quarter_quarter() {
        // Normalised 0.5, 0.25, 0.25.
        let (prior, pool) = pool_of(&[0.2, 0.1, 0.1]);
        let tree = build_sfh_tree(&pool, &prior).unwrap();
        assert_eq!(tree.lengths(), &[1, 2, 2]);
        assert_eq!(tree.depths(), &[1, 2, 2]);
        let NodeKind::Internal { left, right } = tree.node(tree.root()).kind else { panic!() };
        assert_eq!(tree.items(left), &[0]);
        assert_eq!(tree.node(left).kind, NodeKind::Leaf);
        assert_eq!(tree.items(right), &[1, 2]);
        assert!(matches!(tree.node(right).kind, NodeKind::Internal { .. }));
    }

    #[test]
    fn singleton_tree() {
        let (prior, pool) = pool_of(&[0.3]);
        let tree = build_sfh_tree(&pool, &prior).unwrap();
        assert_eq!(tree.lengths(), &[0]);
        assert_eq!(tree.depths(), &[0]);
        assert_eq!(tree.internal_count(), 0);
        assert!(build_sfh_tree(&Pool::empty(), &prior).is_err());
    }

    #[test]
    fn unary_chain_is_contracted() {
        // Normalised 0.9, 0.1: codes 0 and 1000.
        let (prior, pool) = pool_of(&[0.36, 0.04]);
        let tree = build_sfh_tree(&pool, &prior).unwrap();
        assert_eq!(tree.lengths(), &[1, 4]);
        assert_eq!(tree.depths(), &[1, 1]);
        assert_eq!(tree.nodes().len(), 3);
    }

    #[test]
    fn contraction_at_the_root() {
        // Normalised 0.4, 0.3, 0.3: lengths 2, 2, 2 -> codes 00, 01, 10.
        let (prior, pool) = pool_of(&[0.2, 0.15, 0.15]);
        let tree = build_sfh_tree(&pool, &prior).unwrap();
        assert_eq!(tree.lengths(), &[2, 2, 2]);
        assert_eq!(tree.depths(), &[2, 2, 1]);
    }

    #[test]
    fn dump_lists_every_node() {
        let (prior, pool) = pool_of(&[0.2, 0.1, 0.1]);
        let dump = build_sfh_tree(&pool, &prior).unwrap().dump(&prior);
        assert_eq!(dump.lines().count(), 5);
        assert!(dump.starts_with("[0..3) items=[0, 1, 2] P=0.648000\n  [0..1) items=[0] P=0.800000 leaf l=1\n"));
    }

    #[test]
    fn me_examples() {
        let (prior, pool) = pool_of(&[0.3, 0.3]);
        let (l, r) = me_split(&pool, &prior).unwrap();
        assert_eq!((l.items(), r.items()), (&[0][..], &[1][..]));
        assert!((conditional_contamination(&l, &pool).unwrap() - 0.588_235_294_117_647).abs() < 1e-12);

        // iid 0.2 x4: cuts give 0.3388, 0.6098, 0.8266.
        let (prior, pool) = pool_of(&[0.2; 4]);
        assert_eq!(me_cut(&pool, &prior).unwrap(), 2);
        let (l, _) = me_split(&pool, &prior).unwrap();
        assert!((conditional_contamination(&l, &pool).unwrap() - 0.609_756_097_560_975_6).abs() < 1e-12);

        let (prior, pool) = pool_of(&[0.3]);
        assert!(matches!(me_split(&pool, &prior), Err(Error::Usage(_))));
    }

    #[test]
    fn huffman_examples() {
        let (prior, pool) = pool_of(&[0.25, 0.25, 0.25, 0.125, 0.125]);
        assert_eq!(huffman_lengths(pool.items(), &prior), [2, 2, 2, 3, 3]);
        let tree = build_code_tree(&pool, &prior, CodeLengths::Capped).unwrap();
        assert_eq!(tree.lengths(), build_sfh_tree(&pool, &prior).unwrap().lengths());

        // Huffman gives the 0.27 item three bits against a Shannon length of two.
        let (prior, pool) = pool_of(&[0.47, 0.28, 0.27, 0.05]);
        let huffman = huffman_lengths(pool.items(), &prior);
        let shannon = shannon_lengths(pool.items(), &prior);
        assert_eq!((&huffman[..], &shannon[..]), (&[1, 2, 3, 3][..], &[2, 2, 2, 5][..]));
        let capped = build_code_tree(&pool, &prior, CodeLengths::Capped).unwrap();
        assert_eq!(capped.lengths(), &shannon[..]);

        let (prior, pool) = pool_of(&[0.45, 0.05]);
        let capped = build_code_tree(&pool, &prior, CodeLengths::Capped).unwrap();
        assert_eq!(capped.lengths(), [1, 1]);
    }

    fn arb_pool() -> impl Strategy<Value = (PriorVector, Pool)> {
        prop::collection::vec(1e-9f64..0.4999, 1..40).prop_map(|mut v| {
            v.sort_by(|a, b| b.total_cmp(a));
            pool_of(&v)
        })
    }

    proptest! {
        #[test]
        fn sfh_tree_invariants((prior, pool) in arb_pool()) {
            let tree = build_sfh_tree(&pool, &prior).unwrap();
            prop_assert!(kraft_sum(tree.lengths()) <= 1.0 + 1e-12);
            let mu = pool.mu();
            for (k, &item) in tree.leaves().iter().enumerate() {
                let l = tree.lengths()[k];
                let bar = prior.p(item) / mu;
                prop_assert!(tree.depths()[k] <= l);
                prop_assert!((l as f64) < libm::log2(1.0 / bar) + 1.0 + 1e-9);
                if mu < 1.0 {
                    prop_assert!((l as f64) < libm::log2(1.0 / prior.p(item)) + 1.0);
                }
            }
            for node in tree.nodes() {
                prop_assert!(node.start < node.end);
                if let NodeKind::Internal { left, right } = node.kind {
                    let (l, r) = (tree.node(left), tree.node(right));
                    prop_assert_eq!((l.start, l.end, r.start, r.end), (node.start, r.start, l.end, node.end));
                    prop_assert!(l.start < l.end && r.start < r.end);
                }
            }
            prop_assert_eq!(tree.nodes().len(), 2 * pool.len() - 1);
        }

        #[test]
        fn huffman_and_capped_lengths((prior, pool) in arb_pool()) {
            let mut items = pool.items().to_vec();
            sort_by_priority(&mut items, &prior);
            let shannon = shannon_lengths(&items, &prior);
            let huffman = huffman_lengths(&items, &prior);
            if items.len() > 1 {
                prop_assert!((kraft_sum(&huffman) - 1.0).abs() < 1e-12);
            }
            let expected = |lengths: &[u32]| -> f64 {
                items.iter().zip(lengths).map(|(&i, &l)| prior.p(i) * l as f64).sum()
            };
            prop_assert!(expected(&huffman) <= expected(&shannon) + 1e-9);

            let capped = build_code_tree(&pool, &prior, CodeLengths::Capped).unwrap();
            prop_assert_eq!(capped.leaves(), &items[..]);
            for (k, &l) in capped.lengths().iter().enumerate() {
                prop_assert!(l <= shannon[k]);
                prop_assert!(capped.depths()[k] <= l);
            }
            prop_assert_eq!(capped.nodes().len(), 2 * pool.len() - 1);
            let plain = build_code_tree(&pool, &prior, CodeLengths::Huffman).unwrap();
            prop_assert_eq!(plain.nodes().len(), 2 * pool.len() - 1);
        }

        #[test]
        fn me_cut_is_exhaustive_argmin((prior, pool) in arb_pool()) {
            prop_assume!(pool.len() >= 2 && pool.len() <= 12);
            let cut = me_cut(&pool, &prior).unwrap();
            let gap = |k: usize| {
                let (l, _) = pool.split_at(k, &prior);
                let direct: f64 = (1.0 - l.items().iter().map(|&i| 1.0 - prior.p(i)).product::<f64>())
                    / (1.0 - pool.items().iter().map(|&i| 1.0 - prior.p(i)).product::<f64>());
                (direct - 0.5).abs()
            };
            let best = (1..pool.len()).map(gap).fold(f64::INFINITY, f64::min);
            prop_assert!(gap(cut) <= best + 1e-9);
            prop_assert!(cut >= 1 && cut < pool.len());
        }
    }
}
