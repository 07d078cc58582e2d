//! Level-wise exact greedy tree growth on presorted columns.

use super::tree::TreeNode;
use crate::features::FeatureMatrix;

const NONE: u32 = u32::MAX;

/// Each column's `(value, row)` pairs in ascending value order, computed once
/// per training matrix and shared by every tree.
pub(crate) struct Presorted {
    columns: Vec<Vec<(f64, u32)>>,
}

impl Presorted {
    pub(crate) fn new(x: &FeatureMatrix) -> Self {
        let columns = (0..x.n_features())
            .map(|j| {
                let mut col: Vec<(f64, u32)> =
                    x.rows().enumerate().map(|(i, r)| (r[j], i as u32)).collect();
                col.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
                col
            })
            .collect();
        Presorted { columns }
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct TreeParams {
    pub max_depth: usize,
    pub lambda: f64,
    pub gamma: f64,
}

/// Threshold between two adjacent distinct values. Falls back to the upper
/// value when the midpoint rounds onto the lower one, so the lower value
/// still routes left.
pub fn split_threshold(lower: f64, upper: f64) -> f64 {
    let mid = lower + (upper - lower) * 0.5;
    if mid <= lower {
        upper
    } else {
        mid
    }
}

/// Squared-loss split gain with unit hessians folded into `h`.
pub fn split_gain(gl: f64, hl: f64, gr: f64, hr: f64, lambda: f64, gamma: f64) -> f64 {
    let score = |g: f64, h: f64| g * g / (h + lambda);
    0.5 * (score(gl, hl) + score(gr, hr) - score(gl + gr, hl + hr)) - gamma
}

pub fn leaf_weight(g: f64, h: f64, lambda: f64) -> f64 {
    -g / (h + lambda)
}

enum Proto {
    Pending,
    Leaf(f64),
    Split {
        feature: usize,
        threshold: f64,
        gain: f64,
        left: usize,
        right: usize,
    },
}

struct Active {
    node: usize,
    g: f64,
    h: f64,
}

#[derive(Clone, Copy)]
struct Candidate {
    gain: f64,
    feature: usize,
    threshold: f64,
}

/// Grows one tree on the gradients `grad` (hessians are all 1).
pub(crate) fn grow_tree(
    x: &FeatureMatrix,
    sorted: &Presorted,
    grad: &[f64],
    params: TreeParams,
) -> TreeNode {
    let n = grad.len();
    let mut arena = vec![Proto::Pending];
    let mut slot = vec![0u32; n];
    let mut active = vec![Active {
        node: 0,
        g: grad.iter().sum(),
        h: n as f64,
    }];

    let mut depth = 0;
    while !active.is_empty() {
        if depth == params.max_depth {
            for a in &active {
                arena[a.node] = Proto::Leaf(leaf_weight(a.g, a.h, params.lambda));
            }
            break;
        }
        let best = find_splits(sorted, grad, &slot, &active, params);

        // Children of split nodes become the next level's active set.
        let mut next = Vec::new();
        let mut child_slots = vec![(NONE, NONE); active.len()];
        for (s, a) in active.iter().enumerate() {
            match best[s] {
                Some(c) => {
                    let left = arena.len();
                    arena.push(Proto::Pending);
                    arena.push(Proto::Pending);
                    arena[a.node] = Proto::Split {
                        feature: c.feature,
                        threshold: c.threshold,
                        gain: c.gain,
                        left,
                        right: left + 1,
                    };
                    let l = next.len() as u32;
                    next.push(Active { node: left, g: 0.0, h: 0.0 });
                    next.push(Active { node: left + 1, g: 0.0, h: 0.0 });
                    child_slots[s] = (l, l + 1);
                }
                None => {
                    arena[a.node] = Proto::Leaf(leaf_weight(a.g, a.h, params.lambda));
                }
            }
        }
        for r in 0..n {
            let s = slot[r];
            if s == NONE {
                continue;
            }
            let new = match best[s as usize] {
                Some(c) => {
                    let (l, rt) = child_slots[s as usize];
                    if x.value(r, c.feature) < c.threshold {
                        l
                    } else {
                        rt
                    }
                }
                None => NONE,
            };
            slot[r] = new;
            if new != NONE {
                next[new as usize].g += grad[r];
                next[new as usize].h += 1.0;
            }
        }
        active = next;
        depth += 1;
    }
    assemble(&mut arena, 0)
}

fn find_splits(
    sorted: &Presorted,
    grad: &[f64],
    slot: &[u32],
    active: &[Active],
    params: TreeParams,
) -> Vec<Option<Candidate>> {
    let k = active.len();
    let mut best: Vec<Option<Candidate>> = vec![None; k];
    let mut gl = vec![0.0; k];
    let mut hl = vec![0.0; k];
    let mut last = vec![0.0; k];
    for (feature, col) in sorted.columns.iter().enumerate() {
        gl.fill(0.0);
        hl.fill(0.0);
        for &(v, r) in col {
            let s = slot[r as usize];
            if s == NONE {
                continue;
            }
            let s = s as usize;
            if hl[s] > 0.0 && v > last[s] {
                let a = &active[s];
                let gain = split_gain(
                    gl[s],
                    hl[s],
                    a.g - gl[s],
                    a.h - hl[s],
                    params.lambda,
                    params.gamma,
                );
                if gain > 0.0 && best[s].is_none_or(|b| gain > b.gain) {
                    best[s] = Some(Candidate {
                        gain,
                        feature,
                        threshold: split_threshold(last[s], v),
                    });
                }
            }
            gl[s] += grad[r as usize];
            hl[s] += 1.0;
            last[s] = v;
        }
    }
    best
}

fn assemble(arena: &mut [Proto], i: usize) -> TreeNode {
    match std::mem::replace(&mut arena[i], Proto::Pending) {
        Proto::Leaf(w) => TreeNode::leaf(w),
        Proto::Split {
            feature,
            threshold,
            gain,
            left,
            right,
        } => TreeNode::Branch {
            feature,
            threshold,
            gain,
            left: Box::new(assemble(arena, left)),
            right: Box::new(assemble(arena, right)),
        },
        Proto::Pending => unreachable!("every arena node is resolved before assembly"),
    }
}
