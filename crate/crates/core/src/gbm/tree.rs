use serde::{Deserialize, Serialize};

/// A regression tree. Rows with `x[feature] < threshold` go left.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum TreeNode {
    Branch {
        feature: usize,
        threshold: f64,
        /// Realized loss reduction of this split, net of the gamma penalty.
        gain: f64,
        left: Box<TreeNode>,
        right: Box<TreeNode>,
    },
    Leaf {
        weight: f64,
    },
}

impl TreeNode {
    pub fn leaf(weight: f64) -> Self {
        TreeNode::Leaf { weight }
    }

    pub fn predict(&self, row: &[f64]) -> f64 {
        let mut node = self;
        loop {
            match node {
                TreeNode::Leaf { weight } => return *weight,
                TreeNode::Branch {
                    feature,
                    threshold,
                    left,
                    right,
                    ..
                } => {
                    node = if row[*feature] < *threshold { left } else { right };
                }
            }
        }
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self, TreeNode::Leaf { .. })
    }

    pub fn depth(&self) -> usize {
        match self {
            TreeNode::Leaf { .. } => 0,
            TreeNode::Branch { left, right, .. } => 1 + left.depth().max(right.depth()),
        }
    }

    pub fn n_leaves(&self) -> usize {
        match self {
            TreeNode::Leaf { .. } => 1,
            TreeNode::Branch { left, right, .. } => left.n_leaves() + right.n_leaves(),
        }
    }

    /// Visits every branch as `(feature, threshold, gain)` in pre-order.
    pub fn for_each_split(&self, f: &mut impl FnMut(usize, f64, f64)) {
        if let TreeNode::Branch {
            feature,
            threshold,
            gain,
            left,
            right,
        } = self
        {
            f(*feature, *threshold, *gain);
            left.for_each_split(f);
            right.for_each_split(f);
        }
    }

    /// Adds each split's gain to `out[feature]`.
    pub fn accumulate_gain(&self, out: &mut [f64]) {
        self.for_each_split(&mut |feature, _, gain| out[feature] += gain);
    }
}
