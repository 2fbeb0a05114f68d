//! The binary space-partitioning tree with per-cell bandit statistics.
//!
//! Nodes are held in an arena in insertion order, so children always come
//! after their parent and one reverse sweep visits children before parents.
//! A node labeled `(h, i)` covers a cell of the root box; its children
//! `(h+1, 2i-1)` and `(h+1, 2i)` are the two halves produced by bisecting the
//! cell at the midpoint of its widest dimension. Children that have not been
//! inserted yet are "virtual" and carry an optimistic bound of positive
//! infinity.

use std::cmp::Ordering;
use std::fmt;
use std::io::{self, Write};

use num_bigint::BigUint;
use thiserror::Error;

use crate::real::Real;
use crate::region::{Region, RegionError};

#[derive(Debug, Error)]
pub enum TreeError {
    #[error("batch carries {got} observations, expected {expected}")]
    BatchSizeMismatch { expected: u64, got: usize },
    #[error("cell cannot be split further: {0}")]
    Split(#[from] RegionError),
    #[error("child already inserted")]
    ChildExists,
}

/// Index into the tree arena.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct NodeId(usize);

impl NodeId {
    pub const ROOT: NodeId = NodeId(0);
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChildSide {
    Left,
    Right,
}

impl ChildSide {
    fn slot(self) -> usize {
        match self {
            ChildSide::Left => 0,
            ChildSide::Right => 1,
        }
    }
}

/// `(h, i)` with `h >= 0` and `i` in `1..=2^h`. The index is exact at any
/// depth.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeLabel {
    pub depth: u32,
    pub index: BigUint,
}

impl NodeLabel {
    pub fn root() -> Self {
        Self { depth: 0, index: BigUint::from(1u32) }
    }

    /// Label of this node's child on the given side.
    pub fn child(&self, side: ChildSide) -> Self {
        let two = BigUint::from(2u32);
        let index = match side {
            ChildSide::Left => &self.index * &two - BigUint::from(1u32),
            ChildSide::Right => &self.index * &two,
        };
        Self { depth: self.depth + 1, index }
    }
}

impl fmt::Display for NodeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.depth, self.index)
    }
}

impl PartialOrd for NodeLabel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for NodeLabel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.depth.cmp(&other.depth).then_with(|| self.index.cmp(&other.index))
    }
}

/// One cell of the partition with its bandit statistics.
#[derive(Debug, Clone)]
pub struct TreeNode<F: Real> {
    depth: u32,
    parent: Option<(NodeId, ChildSide)>,
    region: Region<F>,
    children: [Option<NodeId>; 2],
    /// Batches routed through this node.
    visits: u64,
    /// Simulator calls routed through this node; always `batch_size * visits`.
    sample_count: u64,
    /// Empirical mean of every observation routed through this node.
    emp_mean: F,
    u_value: F,
    b_value: F,
}

impl<F: Real> TreeNode<F> {
    fn fresh(depth: u32, parent: Option<(NodeId, ChildSide)>, region: Region<F>) -> Self {
        Self {
            depth,
            parent,
            region,
            children: [None, None],
            visits: 0,
            sample_count: 0,
            emp_mean: F::zero(),
            u_value: F::infinity(),
            b_value: F::infinity(),
        }
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn region(&self) -> &Region<F> {
        &self.region
    }

    pub fn visits(&self) -> u64 {
        self.visits
    }

    pub fn sample_count(&self) -> u64 {
        self.sample_count
    }

    pub fn emp_mean(&self) -> F {
        self.emp_mean
    }

    pub fn u_value(&self) -> F {
        self.u_value
    }

    pub fn b_value(&self) -> F {
        self.b_value
    }

    pub fn child(&self, side: ChildSide) -> Option<NodeId> {
        self.children[side.slot()]
    }

    pub fn is_leaf(&self) -> bool {
        self.children == [None, None]
    }
}

/// Result of walking the optimistic-bound path from the root.
#[derive(Debug, Clone)]
pub struct Traversal {
    /// Every existing node visited, root first.
    pub path: Vec<NodeId>,
    /// Node whose virtual child was reached.
    pub parent: NodeId,
    /// Which virtual child was reached.
    pub side: ChildSide,
}

/// Confidence radius `sqrt(2 sigma^2 ln(m) / samples)` of a cell mean built
/// from `samples` observations, `m` completed batches in the whole tree.
pub fn confidence_radius<F: Real>(sigma: F, ln_batches: F, samples: u64) -> F {
    let n = F::from_u64(samples).expect("sample count representable");
    (F::cast(2.0) * sigma * sigma * ln_batches / n).sqrt()
}

/// Optimistic cell bound: empirical mean plus confidence radius plus the
/// smoothness allowance `nu * rho^depth`.
pub fn optimistic_bound<F: Real>(
    emp_mean: F,
    sigma: F,
    ln_batches: F,
    samples: u64,
    nu: F,
    rho: F,
    depth: u32,
) -> F {
    emp_mean + confidence_radius(sigma, ln_batches, samples) + nu * rho.powi(depth as i32)
}

/// The statistics tree. Starts as a lone root covering the whole search box;
/// grows by exactly one node per completed batch.
#[derive(Debug, Clone)]
pub struct Tree<F: Real> {
    nodes: Vec<TreeNode<F>>,
    batch_count: u64,
    query_count: u64,
}

impl<F: Real> Tree<F> {
    pub fn new(domain: Region<F>) -> Self {
        Self {
            nodes: vec![TreeNode::fresh(0, None, domain)],
            batch_count: 0,
            query_count: 0,
        }
    }

    pub fn node(&self, id: NodeId) -> &TreeNode<F> {
        &self.nodes[id.0]
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Completed batches, `m`.
    pub fn batch_count(&self) -> u64 {
        self.batch_count
    }

    /// Simulator calls consumed through the tree, `n`.
    pub fn query_count(&self) -> u64 {
        self.query_count
    }

    pub fn max_depth(&self) -> u32 {
        self.nodes.iter().map(|n| n.depth).max().unwrap_or(0)
    }

    /// Arena ids in insertion order (root first).
    pub fn ids(&self) -> impl Iterator<Item = NodeId> {
        (0..self.nodes.len()).map(NodeId)
    }

    /// Exact `(h, i)` label, reconstructed from the path to the root.
    pub fn label(&self, id: NodeId) -> NodeLabel {
        let mut sides = Vec::with_capacity(self.nodes[id.0].depth as usize);
        let mut cur = id;
        while let Some((parent, side)) = self.nodes[cur.0].parent {
            sides.push(side);
            cur = parent;
        }
        let mut label = NodeLabel::root();
        for side in sides.into_iter().rev() {
            label = label.child(side);
        }
        label
    }

    /// B-value of a child slot; virtual children are infinitely optimistic.
    fn child_bound(&self, id: NodeId, side: ChildSide) -> F {
        match self.nodes[id.0].children[side.slot()] {
            Some(c) => self.nodes[c.0].b_value,
            None => F::infinity(),
        }
    }

    /// Walk from the root toward the larger child bound (ties toward the left
    /// child) until a virtual child is reached.
    pub fn traverse(&self) -> Traversal {
        let mut path = Vec::new();
        let mut cur = NodeId::ROOT;
        loop {
            path.push(cur);
            let left = self.child_bound(cur, ChildSide::Left);
            let right = self.child_bound(cur, ChildSide::Right);
            let side = if right > left { ChildSide::Right } else { ChildSide::Left };
            match self.nodes[cur.0].children[side.slot()] {
                Some(next) => cur = next,
                None => return Traversal { path, parent: cur, side },
            }
        }
    }

    /// Insert the virtual child of `parent` on `side`, splitting the parent's
    /// cell. Returns the new node's id.
    pub fn insert_child(&mut self, parent: NodeId, side: ChildSide) -> Result<NodeId, TreeError> {
        if self.nodes[parent.0].children[side.slot()].is_some() {
            return Err(TreeError::ChildExists);
        }
        let (left, right) = self.nodes[parent.0].region.split()?;
        let region = match side {
            ChildSide::Left => left,
            ChildSide::Right => right,
        };
        let depth = self.nodes[parent.0].depth + 1;
        let id = NodeId(self.nodes.len());
        self.nodes.push(TreeNode::fresh(depth, Some((parent, side)), region));
        self.nodes[parent.0].children[side.slot()] = Some(id);
        Ok(id)
    }

    /// Fold one batch of observations into every node on the path. The mean
    /// update keeps `emp_mean` equal to the mean of all observations ever
    /// routed through the node.
    pub fn update_path(
        &mut self,
        path: &[NodeId],
        observations: &[F],
        batch_size: u64,
    ) -> Result<(), TreeError> {
        if observations.len() as u64 != batch_size {
            return Err(TreeError::BatchSizeMismatch {
                expected: batch_size,
                got: observations.len(),
            });
        }
        let batch_sum: F = observations.iter().copied().sum();
        let b = F::from_u64(batch_size).expect("batch size representable");
        for id in path {
            let node = &mut self.nodes[id.0];
            node.visits += 1;
            node.sample_count += batch_size;
            let count = F::from_u64(node.sample_count).expect("sample count representable");
            node.emp_mean = (F::one() - b / count) * node.emp_mean + batch_sum / count;
        }
        Ok(())
    }

    /// Account one completed batch of `batch_size` simulator calls.
    pub fn complete_batch(&mut self, batch_size: u64) {
        self.batch_count += 1;
        self.query_count += batch_size;
    }

    /// Recompute `U` for every visited node with the current global batch
    /// count, then back `B` up from the leaves. Arena order puts children
    /// after parents, so one reverse sweep suffices.
    pub fn backup_all(&mut self, sigma: F, nu: F, rho: F, batch_size: u64) {
        let ln_batches = F::from_u64(self.batch_count)
            .expect("batch count representable")
            .ln();
        for i in (0..self.nodes.len()).rev() {
            let (u, b) = {
                let node = &self.nodes[i];
                if node.visits == 0 {
                    (F::infinity(), F::infinity())
                } else {
                    debug_assert_eq!(node.sample_count, batch_size * node.visits);
                    let u = optimistic_bound(
                        node.emp_mean,
                        sigma,
                        ln_batches,
                        node.sample_count,
                        nu,
                        rho,
                        node.depth,
                    );
                    let left = self.child_bound(NodeId(i), ChildSide::Left);
                    let right = self.child_bound(NodeId(i), ChildSide::Right);
                    (u, u.min(left.max(right)))
                }
            };
            self.nodes[i].u_value = u;
            self.nodes[i].b_value = b;
        }
    }

    /// Among the nodes at the maximum inserted depth, the one with the largest
    /// B-value; ties go to the lowest index.
    pub fn best_at_max_depth(&self) -> NodeId {
        let h = self.max_depth();
        let mut best: Option<NodeId> = None;
        for id in self.ids() {
            if self.nodes[id.0].depth != h {
                continue;
            }
            match best {
                None => best = Some(id),
                Some(cur) => {
                    let b_new = self.nodes[id.0].b_value;
                    let b_cur = self.nodes[cur.0].b_value;
                    if b_new > b_cur
                        || (b_new == b_cur && self.label(id).index < self.label(cur).index)
                    {
                        best = Some(id);
                    }
                }
            }
        }
        best.expect("tree always has a root")
    }

    /// Line-oriented debug dump: one node per line in insertion order.
    pub fn dump(&self, out: &mut dyn Write) -> io::Result<()> {
        for id in self.ids() {
            let node = &self.nodes[id.0];
            let label = self.label(id);
            let bounds: Vec<String> = node
                .region
                .lower()
                .iter()
                .zip(node.region.upper())
                .map(|(lo, hi)| format!("[{lo},{hi}]"))
                .collect();
            writeln!(
                out,
                "{label} region={} t={} count={} mean={} u={} b={}",
                bounds.join("x"),
                node.visits,
                node.sample_count,
                node.emp_mean,
                node.u_value,
                node.b_value,
            )?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::StreamSeed;
    use approx::assert_relative_eq;
    use rand::Rng;

    fn unit_tree(dim: usize) -> Tree<f64> {
        Tree::new(Region::unit(dim))
    }

    #[test]
    fn fresh_tree_traverses_to_left_child_of_root() {
        let tree = unit_tree(2);
        let t = tree.traverse();
        assert_eq!(t.path, vec![NodeId::ROOT]);
        assert_eq!(t.parent, NodeId::ROOT);
        assert_eq!(t.side, ChildSide::Left);
        let label = tree.label(t.parent).child(t.side);
        assert_eq!(label, NodeLabel { depth: 1, index: BigUint::from(1u32) });
    }

    #[test]
    fn traversal_follows_larger_bound_then_left_tie() {
        let mut tree = unit_tree(1);
        let left = tree.insert_child(NodeId::ROOT, ChildSide::Left).unwrap();
        let right = tree.insert_child(NodeId::ROOT, ChildSide::Right).unwrap();
        tree.nodes[left.0].b_value = 0.2;
        tree.nodes[right.0].b_value = 0.9;
        tree.nodes[NodeId::ROOT.0].b_value = 0.9;

        let t = tree.traverse();
        assert_eq!(t.path, vec![NodeId::ROOT, right]);
        assert_eq!(t.parent, right);
        assert_eq!(t.side, ChildSide::Left);
        let label = tree.label(t.parent).child(t.side);
        assert_eq!(label, NodeLabel { depth: 2, index: BigUint::from(3u32) });
    }

    // Postcondition oracle: every step of the returned path must beat the
    // sibling bound (strictly, when the right child was taken).
    fn assert_greedy_optimal(tree: &Tree<f64>, t: &Traversal) {
        for (pos, id) in t.path.iter().enumerate() {
            let left = tree.child_bound(*id, ChildSide::Left);
            let right = tree.child_bound(*id, ChildSide::Right);
            let taken = if pos + 1 < t.path.len() {
                let next = t.path[pos + 1];
                if tree.nodes[id.0].children[0] == Some(next) {
                    ChildSide::Left
                } else {
                    ChildSide::Right
                }
            } else {
                t.side
            };
            match taken {
                ChildSide::Left => assert!(left >= right || left.is_infinite()),
                ChildSide::Right => assert!(right > left),
            }
        }
        assert_eq!(*t.path.last().unwrap(), t.parent);
        assert!(tree.nodes[t.parent.0].children[t.side.slot()].is_none());
    }

    #[test]
    fn traversal_matches_exhaustive_argmax_on_random_trees() {
        let mut rng = StreamSeed::new(99, 0).rng();
        for _ in 0..200 {
            let mut tree = unit_tree(2);
            for _ in 0..rng.random_range(0..25) {
                let t = tree.traverse();
                let id = tree.insert_child(t.parent, t.side).unwrap();
                // Random finite bounds keep subsequent traversals interesting.
                for n in [id, t.parent] {
                    let v: f64 = rng.random();
                    tree.nodes[n.0].b_value = v;
                    tree.nodes[n.0].visits = 1;
                }
            }
            let t = tree.traverse();
            assert_greedy_optimal(&tree, &t);
        }
    }

    #[test]
    fn first_batch_is_plain_mean() {
        let mut tree = unit_tree(1);
        let id = tree.insert_child(NodeId::ROOT, ChildSide::Left).unwrap();
        tree.update_path(&[id], &[1.0, 0.0, 1.0, 0.0], 4).unwrap();
        assert_eq!(tree.node(id).emp_mean(), 0.5);
        assert_eq!(tree.node(id).visits(), 1);
        assert_eq!(tree.node(id).sample_count(), 4);
    }

    #[test]
    fn second_batch_reweights_the_mean() {
        let mut tree = unit_tree(1);
        let id = tree.insert_child(NodeId::ROOT, ChildSide::Left).unwrap();
        tree.update_path(&[id], &[1.0, 0.0, 1.0, 0.0], 4).unwrap();
        tree.update_path(&[id], &[1.0, 1.0, 1.0, 1.0], 4).unwrap();
        assert_eq!(tree.node(id).emp_mean(), 0.75);
        assert_eq!(tree.node(id).sample_count(), 8);
    }

    #[test]
    fn wrong_batch_length_is_a_contract_violation() {
        let mut tree = unit_tree(1);
        let err = tree.update_path(&[NodeId::ROOT], &[1.0, 0.0], 4).unwrap_err();
        assert!(matches!(err, TreeError::BatchSizeMismatch { expected: 4, got: 2 }));
    }

    #[test]
    fn mean_matches_full_observation_log() {
        let mut tree = unit_tree(1);
        let id = tree.insert_child(NodeId::ROOT, ChildSide::Left).unwrap();
        let mut rng = StreamSeed::new(5, 0).rng();
        let mut log = Vec::new();
        let b = 7u64;
        for _ in 0..10 {
            let batch: Vec<f64> = (0..b).map(|_| rng.random::<f64>()).collect();
            log.extend_from_slice(&batch);
            tree.update_path(&[id], &batch, b).unwrap();
        }
        let from_log = log.iter().sum::<f64>() / log.len() as f64;
        assert_relative_eq!(tree.node(id).emp_mean(), from_log, epsilon = 1e-12);
    }

    #[test]
    fn backup_with_single_batch_has_no_confidence_term() {
        let mut tree = unit_tree(1);
        let id = tree.insert_child(NodeId::ROOT, ChildSide::Left).unwrap();
        tree.update_path(&[NodeId::ROOT, id], &[0.5], 1).unwrap();
        tree.complete_batch(1);
        tree.backup_all(0.5, 1.0, 0.5, 1);
        // ln(1) = 0, so U is the mean plus the smoothness allowance only.
        assert_eq!(tree.node(id).u_value(), 1.0);
        assert_eq!(tree.node(id).b_value(), 1.0);
    }

    #[test]
    fn backup_tightens_internal_bounds_through_children() {
        let mut tree = unit_tree(1);
        let mid = tree.insert_child(NodeId::ROOT, ChildSide::Left).unwrap();
        let a = tree.insert_child(mid, ChildSide::Left).unwrap();
        let b = tree.insert_child(mid, ChildSide::Right).unwrap();
        for (id, mean) in [(NodeId::ROOT, 0.3), (mid, 0.35), (a, 0.3), (b, 0.4)] {
            tree.nodes[id.0].visits = 1;
            tree.nodes[id.0].sample_count = 1;
            tree.nodes[id.0].emp_mean = mean;
        }
        tree.batch_count = 1;
        // sigma = 0 and nu = 0 make U equal the empirical mean.
        tree.backup_all(0.0, 0.0, 0.5, 1);
        assert_eq!(tree.node(mid).u_value(), 0.35);
        assert_eq!(tree.node(a).b_value(), 0.3);
        assert_eq!(tree.node(b).b_value(), 0.4);
        assert_eq!(tree.node(mid).b_value(), 0.35);
    }

    #[test]
    fn optimistic_bound_matches_direct_evaluation() {
        // sigma = 0.5, ln m = 1, 8 samples: radius = sqrt(2 * 0.25 / 8) = 0.25.
        assert_eq!(confidence_radius(0.5, 1.0, 8), 0.25);
        let u = 0.2 + confidence_radius(0.5, 1.0, 8) + 1.0 * 0.5f64.powi(2);
        assert_eq!(u, 0.7);
        assert_eq!(optimistic_bound(0.2, 0.5, 1.0, 8, 1.0, 0.5, 2), 0.7);
    }

    #[test]
    fn confidence_radius_shrinks_with_samples() {
        let mut last = f64::INFINITY;
        for samples in [1u64, 2, 5, 10, 100, 1000] {
            let r = confidence_radius(0.5, 2.3, samples);
            assert!(r < last);
            last = r;
        }
    }

    #[test]
    fn labels_render_exactly_at_depth() {
        let mut tree = unit_tree(1);
        let mut cur = NodeId::ROOT;
        for _ in 0..3 {
            cur = tree.insert_child(cur, ChildSide::Right).unwrap();
        }
        // Rightmost chain: index 2^h.
        assert_eq!(tree.label(cur).to_string(), "(3, 8)");
    }

    #[test]
    fn dump_is_line_per_node() {
        let mut tree = unit_tree(2);
        let id = tree.insert_child(NodeId::ROOT, ChildSide::Left).unwrap();
        tree.update_path(&[NodeId::ROOT, id], &[1.0, 0.0], 2).unwrap();
        tree.complete_batch(2);
        tree.backup_all(0.5, 1.0, 0.5, 2);
        let mut buf = Vec::new();
        tree.dump(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert!(lines[0].starts_with("(0, 1) region=[0,1]x[0,1]"));
        assert!(lines[1].starts_with("(1, 1) region=[0,0.5]x[0,1]"));
        assert!(lines[1].contains("t=1 count=2 mean=0.5"));
    }
}
