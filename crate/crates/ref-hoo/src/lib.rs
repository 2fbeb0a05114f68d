//! A deliberately plain single-sample hierarchical optimistic optimizer,
//! kept as an independent reference for cross-checking the batched engine at
//! batch size 1. It shares only the objective contract and the random-stream
//! type with the main crate: the tree (recursive boxed nodes), the cell
//! arithmetic and the statistics updates are all reimplemented here.

use hoover_core::objective::{NoisyObjective, SimError};
use hoover_core::real::Real;
use hoover_core::rng::{RngStream, StreamSeed};
use num_bigint::BigUint;

#[derive(Debug, Clone)]
pub struct RefHooConfig<F> {
    /// Number of single-observation iterations.
    pub iterations: u64,
    pub sigma: F,
    pub nu: F,
    pub rho: F,
    pub seed: StreamSeed,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RefLabel {
    pub depth: u32,
    pub index: BigUint,
}

#[derive(Debug, Clone)]
pub struct RefHooOutcome<F> {
    /// Labels of the inserted nodes, in insertion order.
    pub insertions: Vec<RefLabel>,
    pub best_point: Vec<F>,
    pub best_label: RefLabel,
}

struct Node<F> {
    depth: u32,
    index: BigUint,
    cell: Vec<(F, F)>,
    pulls: u64,
    mean: F,
    u: F,
    b: F,
    kids: [Option<Box<Node<F>>>; 2],
}

impl<F: Real> Node<F> {
    fn fresh(depth: u32, index: BigUint, cell: Vec<(F, F)>) -> Self {
        Self {
            depth,
            index,
            cell,
            pulls: 0,
            mean: F::zero(),
            u: F::infinity(),
            b: F::infinity(),
            kids: [None, None],
        }
    }

    fn kid_bound(&self, side: usize) -> F {
        self.kids[side].as_ref().map_or(F::infinity(), |k| k.b)
    }
}

fn widest_dim<F: Real>(cell: &[(F, F)]) -> usize {
    let mut best = 0;
    for d in 1..cell.len() {
        if cell[d].1 - cell[d].0 > cell[best].1 - cell[best].0 {
            best = d;
        }
    }
    best
}

fn halves<F: Real>(cell: &[(F, F)]) -> (Vec<(F, F)>, Vec<(F, F)>) {
    let d = widest_dim(cell);
    let mid = (cell[d].0 + cell[d].1) / F::cast(2.0);
    let mut lo = cell.to_vec();
    let mut hi = cell.to_vec();
    lo[d].1 = mid;
    hi[d].0 = mid;
    (lo, hi)
}

fn cell_midpoint<F: Real>(cell: &[(F, F)]) -> Vec<F> {
    cell.iter().map(|(lo, hi)| (*lo + *hi) / F::cast(2.0)).collect()
}

fn draw_in_cell<F: Real>(cell: &[(F, F)], rng: &mut RngStream) -> Vec<F> {
    cell.iter()
        .map(|(lo, hi)| {
            let u = F::uniform_01(rng);
            *lo + u * (*hi - *lo)
        })
        .collect()
}

/// Walk down by the larger child bound (left on ties), create the first
/// missing child met, observe a uniformly drawn point of its cell, and fold
/// the observation into every node on the way back up.
fn pull<F: Real>(
    node: &mut Node<F>,
    objective: &dyn NoisyObjective<F>,
    rng: &mut RngStream,
    inserted: &mut Vec<RefLabel>,
) -> Result<F, SimError> {
    let side = if node.kid_bound(1) > node.kid_bound(0) { 1 } else { 0 };
    let y = match &mut node.kids[side] {
        Some(child) => pull(child, objective, rng, inserted)?,
        None => {
            let (lo, hi) = halves(&node.cell);
            let cell = if side == 0 { lo } else { hi };
            let index = if side == 0 {
                &node.index * 2u32 - 1u32
            } else {
                &node.index * 2u32
            };
            let mut leaf = Node::fresh(node.depth + 1, index, cell);
            let point = draw_in_cell(&leaf.cell, rng);
            let y = objective.observe(&point, rng)?;
            leaf.pulls = 1;
            leaf.mean = y;
            inserted.push(RefLabel { depth: leaf.depth, index: leaf.index.clone() });
            node.kids[side] = Some(Box::new(leaf));
            y
        }
    };
    node.pulls += 1;
    let t = F::from_u64(node.pulls).expect("pull count representable");
    node.mean = (F::one() - F::one() / t) * node.mean + y / t;
    Ok(y)
}

fn backup<F: Real>(node: &mut Node<F>, sigma: F, ln_n: F, nu: F, rho: F) {
    for side in 0..2 {
        if let Some(kid) = node.kids[side].as_mut() {
            backup(kid, sigma, ln_n, nu, rho);
        }
    }
    if node.pulls == 0 {
        node.u = F::infinity();
        node.b = F::infinity();
    } else {
        let t = F::from_u64(node.pulls).expect("pull count representable");
        let radius = (F::cast(2.0) * sigma * sigma * ln_n / t).sqrt();
        node.u = node.mean + radius + nu * rho.powi(node.depth as i32);
        node.b = node.u.min(node.kid_bound(0).max(node.kid_bound(1)));
    }
}

fn deepest_best<'a, F: Real>(node: &'a Node<F>, best: &mut Option<&'a Node<F>>) {
    match best {
        None => *best = Some(node),
        Some(cur) => {
            let deeper = node.depth > cur.depth;
            let same_depth = node.depth == cur.depth;
            if deeper
                || (same_depth && (node.b > cur.b || (node.b == cur.b && node.index < cur.index)))
            {
                *best = Some(node);
            }
        }
    }
    for side in 0..2 {
        if let Some(kid) = node.kids[side].as_ref() {
            deepest_best(kid, best);
        }
    }
}

pub fn run_ref_hoo<F: Real>(
    objective: &dyn NoisyObjective<F>,
    domain: &[(F, F)],
    cfg: &RefHooConfig<F>,
) -> Result<RefHooOutcome<F>, SimError> {
    assert!(cfg.iterations >= 1, "need at least one iteration");
    let mut rng = cfg.seed.rng();
    let mut root = Node::fresh(0, BigUint::from(1u32), domain.to_vec());
    let mut inserted = Vec::new();
    for n in 1..=cfg.iterations {
        pull(&mut root, objective, &mut rng, &mut inserted)?;
        let ln_n = F::from_u64(n).expect("iteration representable").ln();
        backup(&mut root, cfg.sigma, ln_n, cfg.nu, cfg.rho);
    }
    let mut best = None;
    deepest_best(&root, &mut best);
    let best = best.expect("tree has a root");
    Ok(RefHooOutcome {
        insertions: inserted,
        best_point: cell_midpoint(&best.cell),
        best_label: RefLabel { depth: best.depth, index: best.index.clone() },
    })
}
