//! Bagged CART trees with Gini impurity.
//!
//! Each tree sees a bootstrap resample of size `n`. At every node the
//! features are visited in random order until `floor(sqrt(d))` of them
//! (at least one) have been found that are not constant on the node; the
//! best axis-aligned Gini split among those is taken. Trees grow until their
//! leaves are pure or `max_depth` is reached. The forest averages leaf class
//! frequencies.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::data::feature_dim;
use crate::error::{Error, Result};
use crate::gaussian_shift::LabeledSample;
use crate::rng::SimRng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
enum Node {
    Leaf {
        positive_fraction: f64,
    },
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    nodes: Vec<Node>,
}

impl Tree {
    /// Fraction of positive training labels in the leaf `x` lands in;
    /// features are read through `feature`.
    pub fn positive_fraction(&self, mut feature: impl FnMut(usize) -> f64) -> f64 {
        let mut at = 0;
        loop {
            match self.nodes[at] {
                Node::Leaf { positive_fraction } => return positive_fraction,
                Node::Split {
                    feature: f,
                    threshold,
                    left,
                    right,
                } => at = if feature(f) <= threshold { left } else { right },
            }
        }
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], at: usize) -> usize {
            match nodes[at] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, left).max(walk(nodes, right)),
            }
        }
        walk(&self.nodes, 0)
    }

    pub fn is_leaf(&self) -> bool {
        self.nodes.len() == 1
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestModel {
    trees: Vec<Tree>,
    dims: usize,
}

impl ForestModel {
    pub fn trees(&self) -> &[Tree] {
        &self.trees
    }

    /// Number of leading features the forest was trained on.
    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn predict(&self, x: &[f64]) -> f64 {
        self.predict_with(|j| x[j])
    }

    /// Prediction with features supplied on demand.
    pub fn predict_with(&self, mut feature: impl FnMut(usize) -> f64) -> f64 {
        let mean = self
            .trees
            .iter()
            .map(|t| t.positive_fraction(&mut feature))
            .sum::<f64>()
            / self.trees.len() as f64;
        if mean > 0.5 {
            1.0
        } else {
            -1.0
        }
    }
}

pub fn train_forest(
    data: &[LabeledSample],
    n_trees: usize,
    max_depth: Option<usize>,
    rng: &mut SimRng,
) -> Result<ForestModel> {
    let dims = feature_dim(data)?;
    if n_trees == 0 {
        return Err(Error::domain("forest needs at least one tree"));
    }
    let n = data.len();
    let mtry = ((dims as f64).sqrt() as usize).max(1);
    let trees = (0..n_trees)
        .map(|_| {
            let bag: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n)).collect();
            let mut builder = TreeBuilder {
                data,
                dims,
                mtry,
                max_depth,
                nodes: Vec::new(),
                rng: &mut *rng,
            };
            builder.grow(bag, 0);
            Tree {
                nodes: builder.nodes,
            }
        })
        .collect();
    Ok(ForestModel { trees, dims })
}

struct TreeBuilder<'a> {
    data: &'a [LabeledSample],
    dims: usize,
    mtry: usize,
    max_depth: Option<usize>,
    nodes: Vec<Node>,
    rng: &'a mut SimRng,
}

struct SplitChoice {
    feature: usize,
    threshold: f64,
    impurity: f64,
}

impl TreeBuilder<'_> {
    fn grow(&mut self, idx: Vec<usize>, depth: usize) -> usize {
        let at = self.nodes.len();
        let positives = idx.iter().filter(|&&i| self.data[i].y > 0.0).count();
        let fraction = positives as f64 / idx.len() as f64;
        self.nodes.push(Node::Leaf {
            positive_fraction: fraction,
        });
        let pure = positives == 0 || positives == idx.len();
        if pure || self.max_depth.is_some_and(|m| depth >= m) {
            return at;
        }
        let Some(split) = self.best_split(&idx) else {
            return at;
        };
        let (left_idx, right_idx): (Vec<usize>, Vec<usize>) = idx
            .iter()
            .partition(|&&i| self.data[i].x[split.feature] <= split.threshold);
        let left = self.grow(left_idx, depth + 1);
        let right = self.grow(right_idx, depth + 1);
        self.nodes[at] = Node::Split {
            feature: split.feature,
            threshold: split.threshold,
            left,
            right,
        };
        at
    }

    fn best_split(&mut self, idx: &[usize]) -> Option<SplitChoice> {
        let mut features: Vec<usize> = (0..self.dims).collect();
        let mut best: Option<SplitChoice> = None;
        let mut informative = 0;
        let mut column: Vec<(f64, f64)> = Vec::with_capacity(idx.len());
        for visited in 0..self.dims {
            if informative >= self.mtry {
                break;
            }
            let pick = self.rng.gen_range(visited..self.dims);
            features.swap(visited, pick);
            let f = features[visited];

            column.clear();
            column.extend(idx.iter().map(|&i| (self.data[i].x[f], self.data[i].y)));
            column.sort_by(|a, b| a.0.total_cmp(&b.0));
            if column[0].0 == column[column.len() - 1].0 {
                continue;
            }
            informative += 1;
            if let Some(candidate) = best_threshold(&column, f) {
                if best.as_ref().is_none_or(|b| candidate.impurity < b.impurity) {
                    best = Some(candidate);
                }
            }
        }
        best
    }
}

/// Lowest weighted Gini split of a column sorted by value.
fn best_threshold(column: &[(f64, f64)], feature: usize) -> Option<SplitChoice> {
    let n = column.len() as f64;
    let total_pos = column.iter().filter(|c| c.1 > 0.0).count() as f64;
    let gini_mass = |count: f64, pos: f64| {
        // count * gini = count - (pos² + neg²) / count
        let neg = count - pos;
        count - (pos * pos + neg * neg) / count
    };
    let mut best: Option<SplitChoice> = None;
    let mut left_pos = 0.0;
    for i in 0..column.len() - 1 {
        if column[i].1 > 0.0 {
            left_pos += 1.0;
        }
        if column[i].0 == column[i + 1].0 {
            continue;
        }
        let left_n = (i + 1) as f64;
        let impurity = gini_mass(left_n, left_pos) + gini_mass(n - left_n, total_pos - left_pos);
        if best.as_ref().is_none_or(|b| impurity < b.impurity) {
            let mut threshold = 0.5 * (column[i].0 + column[i + 1].0);
            if threshold >= column[i + 1].0 {
                threshold = column[i].0;
            }
            best = Some(SplitChoice {
                feature,
                threshold,
                impurity,
            });
        }
    }
    best
}
