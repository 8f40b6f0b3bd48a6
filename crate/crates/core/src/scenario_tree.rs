//! Finite filtered probability spaces as rooted trees.
//!
//! Node depth is the time index: the root is time 0 and carries the trivial
//! sigma-algebra, the nodes at depth `t` are the atoms of the time-`t`
//! sigma-algebra, and every leaf sits at the horizon `T`. Each non-root node
//! stores the exact probability of moving to it from its parent.
//!
//! Trees are immutable once built. Exact arithmetic keeps every derived
//! quantity exact, which matters for the certificates built on top; the
//! intended scale is up to roughly 10^4 nodes.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use crate::rational::{self, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub usize);

impl NodeId {
    pub const ROOT: NodeId = NodeId(0);

    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n{}", self.0)
    }
}

/// Values attached to the nodes of one depth.
pub type NodeValues = BTreeMap<NodeId, Rational>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TreeError {
    #[error("tree has no nodes")]
    Empty,
    #[error("node ids must be dense: expected id {expected}, found {found}")]
    NonDenseIds { expected: usize, found: usize },
    #[error("tree must have exactly one root, found {0}")]
    RootCount(usize),
    #[error("root must be node 0, found {0}")]
    RootNotFirst(NodeId),
    #[error("{node} refers to unknown parent {parent}")]
    UnknownParent { node: NodeId, parent: NodeId },
    #[error("{0} is not reachable from the root (cycle in parent links)")]
    Unreachable(NodeId),
    #[error("transition probability of {node} must be positive, got {prob}")]
    NonPositiveProbability { node: NodeId, prob: String },
    #[error("children of {node} have probabilities summing to {sum}, expected 1")]
    ProbabilitiesDoNotSumToOne { node: NodeId, sum: String },
    #[error("leaf {node} sits at depth {depth}, but the horizon is {horizon}")]
    LeafDepth { node: NodeId, depth: usize, horizon: usize },
    #[error("declared horizon {declared} does not match tree depth {actual}")]
    HorizonMismatch { declared: usize, actual: usize },
    #[error("depth {depth} outside 0..={horizon}")]
    DepthOutOfRange { depth: usize, horizon: usize },
    #[error("conditioning depth {to} exceeds the depth {from} of the values")]
    BadConditioning { from: usize, to: usize },
    #[error("no value supplied for {0}")]
    MissingValue(NodeId),
    #[error("value supplied for {node} at depth {depth}, expected depth {expected}")]
    ValueAtWrongDepth { node: NodeId, depth: usize, expected: usize },
}

#[derive(Debug, Clone)]
struct Node {
    parent: Option<NodeId>,
    depth: usize,
    children: Vec<NodeId>,
    prob: Rational,
}

#[derive(Debug, Clone)]
pub struct ScenarioTree {
    nodes: Vec<Node>,
    horizon: usize,
    by_depth: Vec<Vec<NodeId>>,
    path_prob: Vec<Rational>,
}

impl ScenarioTree {
    /// Builds a tree from `(parent, transition probability)` pairs indexed by
    /// node id. The root has parent `None`; its probability entry is ignored.
    /// When `horizon` is given it must equal the depth of the leaves.
    pub fn new(horizon: Option<usize>, parents: Vec<(Option<NodeId>, Rational)>) -> Result<Self, TreeError> {
        if parents.is_empty() {
            return Err(TreeError::Empty);
        }
        let n = parents.len();
        let roots: Vec<usize> = (0..n).filter(|&i| parents[i].0.is_none()).collect();
        if roots.len() != 1 {
            return Err(TreeError::RootCount(roots.len()));
        }
        if roots[0] != 0 {
            return Err(TreeError::RootNotFirst(NodeId(roots[0])));
        }
        let mut nodes: Vec<Node> = parents
            .iter()
            .map(|(parent, prob)| Node {
                parent: *parent,
                depth: 0,
                children: Vec::new(),
                prob: if parent.is_none() { Rational::one() } else { prob.clone() },
            })
            .collect();
        for i in 1..n {
            let parent = nodes[i].parent.expect("single root checked");
            if parent.0 >= n {
                return Err(TreeError::UnknownParent { node: NodeId(i), parent });
            }
            if !nodes[i].prob.is_positive() {
                return Err(TreeError::NonPositiveProbability {
                    node: NodeId(i),
                    prob: rational::to_string(&nodes[i].prob),
                });
            }
            nodes[parent.0].children.push(NodeId(i));
        }

        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([NodeId::ROOT]);
        seen[0] = true;
        let mut by_depth: Vec<Vec<NodeId>> = vec![vec![NodeId::ROOT]];
        while let Some(id) = queue.pop_front() {
            let depth = nodes[id.0].depth;
            let children = nodes[id.0].children.clone();
            for c in children {
                if seen[c.0] {
                    return Err(TreeError::Unreachable(c));
                }
                seen[c.0] = true;
                nodes[c.0].depth = depth + 1;
                if by_depth.len() <= depth + 1 {
                    by_depth.push(Vec::new());
                }
                by_depth[depth + 1].push(c);
                queue.push_back(c);
            }
        }
        if let Some(i) = seen.iter().position(|s| !s) {
            return Err(TreeError::Unreachable(NodeId(i)));
        }
        by_depth.iter_mut().for_each(|level| level.sort());

        let actual = by_depth.len() - 1;
        if let Some(declared) = horizon {
            if declared != actual {
                return Err(TreeError::HorizonMismatch { declared, actual });
            }
        }
        for (i, node) in nodes.iter().enumerate() {
            if node.children.is_empty() && node.depth != actual {
                return Err(TreeError::LeafDepth {
                    node: NodeId(i),
                    depth: node.depth,
                    horizon: actual,
                });
            }
            if !node.children.is_empty() {
                let sum: Rational = node.children.iter().map(|c| nodes[c.0].prob.clone()).sum();
                if !sum.is_one() {
                    return Err(TreeError::ProbabilitiesDoNotSumToOne {
                        node: NodeId(i),
                        sum: rational::to_string(&sum),
                    });
                }
            }
        }

        let mut path_prob = vec![Rational::one(); n];
        for level in by_depth.iter().skip(1) {
            for &id in level {
                let parent = nodes[id.0].parent.expect("non-root");
                path_prob[id.0] = &path_prob[parent.0] * &nodes[id.0].prob;
            }
        }

        Ok(ScenarioTree {
            nodes,
            horizon: actual,
            by_depth,
            path_prob,
        })
    }

    /// The trivial tree: a single atom at time 0.
    pub fn single_node() -> Self {
        Self::new(None, vec![(None, Rational::one())]).expect("valid")
    }

    /// One-period tree whose leaves carry the given probabilities.
    pub fn one_period(probs: Vec<Rational>) -> Result<Self, TreeError> {
        let mut parents = vec![(None, Rational::one())];
        parents.extend(probs.into_iter().map(|p| (Some(NodeId::ROOT), p)));
        Self::new(Some(1), parents)
    }

    /// Tree where every node at depth `t` has `branching[t]` equally likely
    /// children. Node ids are assigned breadth-first.
    pub fn uniform(branching: &[usize]) -> Result<Self, TreeError> {
        let mut b = TreeBuilder::new();
        let mut frontier = vec![NodeId::ROOT];
        for &k in branching {
            let p = Rational::new(1.into(), (k as i64).into());
            let mut next = Vec::new();
            for &parent in &frontier {
                for _ in 0..k {
                    next.push(b.add_child(parent, p.clone()));
                }
            }
            frontier = next;
        }
        b.build()
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn root(&self) -> NodeId {
        NodeId::ROOT
    }

    pub fn node_ids(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.nodes.len()).map(NodeId)
    }

    /// Nodes in breadth-first (depth, then id) order.
    pub fn nodes_by_depth(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.by_depth.iter().flatten().copied()
    }

    pub fn contains(&self, id: NodeId) -> bool {
        id.0 < self.nodes.len()
    }

    pub fn parent(&self, id: NodeId) -> Option<NodeId> {
        self.nodes[id.0].parent
    }

    pub fn depth(&self, id: NodeId) -> usize {
        self.nodes[id.0].depth
    }

    pub fn children(&self, id: NodeId) -> &[NodeId] {
        &self.nodes[id.0].children
    }

    pub fn is_leaf(&self, id: NodeId) -> bool {
        self.nodes[id.0].children.is_empty()
    }

    /// Probability of moving from the parent to `id` (1 for the root).
    pub fn transition_prob(&self, id: NodeId) -> &Rational {
        &self.nodes[id.0].prob
    }

    /// Unconditional probability of the atom `id`.
    pub fn path_prob(&self, id: NodeId) -> &Rational {
        &self.path_prob[id.0]
    }

    pub fn nodes_at_depth(&self, depth: usize) -> &[NodeId] {
        self.by_depth.get(depth).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn leaves(&self) -> &[NodeId] {
        self.nodes_at_depth(self.horizon)
    }

    /// Nodes with children, i.e. the decision nodes at depths `0..T`.
    pub fn internal_nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.by_depth[..self.horizon].iter().flatten().copied()
    }

    pub fn ancestor_at_depth(&self, id: NodeId, depth: usize) -> NodeId {
        let mut cur = id;
        while self.depth(cur) > depth {
            cur = self.parent(cur).expect("depth > 0 has a parent");
        }
        cur
    }

    /// Root-to-node path, inclusive at both ends.
    pub fn path_to(&self, id: NodeId) -> Vec<NodeId> {
        let mut path = vec![id];
        let mut cur = id;
        while let Some(p) = self.parent(cur) {
            path.push(p);
            cur = p;
        }
        path.reverse();
        path
    }

    /// `E[f | F_n]` for a child-indexed function at a single decision node.
    pub fn one_step_expectation<F>(&self, node: NodeId, mut f: F) -> Rational
    where
        F: FnMut(NodeId) -> Rational,
    {
        self.children(node)
            .iter()
            .map(|&c| self.transition_prob(c) * f(c))
            .sum()
    }

    fn check_values(&self, depth: usize, f: &NodeValues) -> Result<(), TreeError> {
        if depth > self.horizon {
            return Err(TreeError::DepthOutOfRange {
                depth,
                horizon: self.horizon,
            });
        }
        for &node in f.keys() {
            if !self.contains(node) || self.depth(node) != depth {
                return Err(TreeError::ValueAtWrongDepth {
                    node,
                    depth: if self.contains(node) { self.depth(node) } else { usize::MAX },
                    expected: depth,
                });
            }
        }
        if let Some(&missing) = self.nodes_at_depth(depth).iter().find(|n| !f.contains_key(n)) {
            return Err(TreeError::MissingValue(missing));
        }
        Ok(())
    }

    /// `E[f]` for a function of the time-`depth` atoms.
    pub fn unconditional_expectation(&self, depth: usize, f: &NodeValues) -> Result<Rational, TreeError> {
        self.check_values(depth, f)?;
        Ok(self
            .nodes_at_depth(depth)
            .iter()
            .map(|n| self.path_prob(*n) * &f[n])
            .sum())
    }

    /// `E[f | F_to]` for a function of the time-`from` atoms, returned as a
    /// function of the time-`to` atoms. Computed by backward induction so the
    /// tower property holds by construction.
    pub fn conditional_expectation(&self, from: usize, to: usize, f: &NodeValues) -> Result<NodeValues, TreeError> {
        self.check_values(from, f)?;
        if to > from {
            return Err(TreeError::BadConditioning { from, to });
        }
        let mut dense: Vec<Option<Rational>> = vec![None; self.len()];
        for (n, v) in f {
            dense[n.0] = Some(v.clone());
        }
        let dense = self.backward_expectation(from, to, dense);
        Ok(self
            .nodes_at_depth(to)
            .iter()
            .map(|&n| (n, dense[n.0].clone().expect("filled by induction")))
            .collect())
    }

    /// Dense variant of [`Self::conditional_expectation`]: `values` is indexed
    /// by node id and must be populated at depth `from`; the result is
    /// populated at every depth in `to..=from`.
    pub fn backward_expectation(&self, from: usize, to: usize, mut values: Vec<Option<Rational>>) -> Vec<Option<Rational>> {
        for depth in (to..from).rev() {
            for &n in self.nodes_at_depth(depth) {
                let v = self.one_step_expectation(n, |c| {
                    values[c.0].clone().expect("value at deeper level")
                });
                values[n.0] = Some(v);
            }
        }
        values
    }
}

/// Incremental construction of a [`ScenarioTree`].
#[derive(Debug, Clone)]
pub struct TreeBuilder {
    parents: Vec<(Option<NodeId>, Rational)>,
}

impl Default for TreeBuilder {
    fn default() -> Self {
        Self::new()
    }
}

impl TreeBuilder {
    pub fn new() -> Self {
        TreeBuilder {
            parents: vec![(None, Rational::one())],
        }
    }

    pub fn add_child(&mut self, parent: NodeId, prob: Rational) -> NodeId {
        self.parents.push((Some(parent), prob));
        NodeId(self.parents.len() - 1)
    }

    pub fn build(self) -> Result<ScenarioTree, TreeError> {
        ScenarioTree::new(None, self.parents)
    }
}
