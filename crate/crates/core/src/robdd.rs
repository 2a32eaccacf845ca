//! Hash-consed node storage for reduced ordered BDDs.
//!
//! Levels are 1-based positions in the variable order. Both terminals sit at
//! the virtual level `n + 1`, so every edge has a well defined length.

use std::collections::HashMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::pb::{Literal, PbError, Valuation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BddError {
    #[error("selector level {level} outside 1..={levels}")]
    InvalidLevel { level: u32, levels: u32 },
    #[error("node id {0:?} does not belong to this store")]
    UnknownNode(NodeId),
    #[error("child at level {child} is not below its parent at level {parent}")]
    Unordered { parent: u32, child: u32 },
    #[error("node budget of {0} decision nodes exceeded")]
    BudgetExceeded(usize),
}

/// Index of a node inside its [`NodeStore`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(u32);

impl NodeId {
    pub const FALSE: NodeId = NodeId(0);
    pub const TRUE: NodeId = NodeId(1);

    pub fn terminal(value: bool) -> NodeId {
        if value {
            NodeId::TRUE
        } else {
            NodeId::FALSE
        }
    }

    pub fn is_terminal(self) -> bool {
        self.0 < 2
    }

    pub fn raw(self) -> u32 {
        self.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct DecisionNode {
    pub level: u32,
    pub low: NodeId,
    pub high: NodeId,
}

#[derive(Clone, Debug)]
pub struct NodeStore {
    levels: u32,
    nodes: Vec<DecisionNode>,
    unique: HashMap<DecisionNode, NodeId>,
    budget: Option<usize>,
}

impl NodeStore {
    /// A store for diagrams over `levels` selector levels.
    pub fn new(levels: usize) -> NodeStore {
        NodeStore {
            levels: levels as u32,
            nodes: Vec::new(),
            unique: HashMap::new(),
            budget: None,
        }
    }

    /// Caps the number of decision nodes; `mk_node` fails once it is reached.
    pub fn with_budget(mut self, budget: Option<usize>) -> NodeStore {
        self.budget = budget;
        self
    }

    pub fn levels(&self) -> u32 {
        self.levels
    }

    /// Level of the terminals, `n + 1`.
    pub fn terminal_level(&self) -> u32 {
        self.levels + 1
    }

    /// Number of decision nodes ever created in this store.
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, id: NodeId) -> Option<&DecisionNode> {
        if id.is_terminal() {
            None
        } else {
            self.nodes.get(id.0 as usize - 2)
        }
    }

    fn contains(&self, id: NodeId) -> bool {
        id.is_terminal() || (id.0 as usize - 2) < self.nodes.len()
    }

    pub fn level(&self, id: NodeId) -> u32 {
        self.node(id).map_or(self.terminal_level(), |n| n.level)
    }

    /// Returns the canonical node `(level, low, high)`, creating it at most
    /// once. Identical children collapse to the child itself.
    pub fn mk_node(&mut self, level: u32, low: NodeId, high: NodeId) -> Result<NodeId, BddError> {
        if level == 0 || level > self.levels {
            return Err(BddError::InvalidLevel {
                level,
                levels: self.levels,
            });
        }
        for child in [low, high] {
            if !self.contains(child) {
                return Err(BddError::UnknownNode(child));
            }
            let child_level = self.level(child);
            if child_level <= level {
                return Err(BddError::Unordered {
                    parent: level,
                    child: child_level,
                });
            }
        }
        if low == high {
            return Ok(low);
        }
        let key = DecisionNode { level, low, high };
        if let Some(&id) = self.unique.get(&key) {
            return Ok(id);
        }
        if let Some(budget) = self.budget {
            if self.nodes.len() >= budget {
                return Err(BddError::BudgetExceeded(budget));
            }
        }
        let id = NodeId(self.nodes.len() as u32 + 2);
        self.nodes.push(key);
        self.unique.insert(key, id);
        Ok(id)
    }

    /// Follows the path induced by `valuation`. `selectors[l - 1]` is the
    /// literal tested at level `l`; the high edge is taken when it is true.
    pub fn eval(
        &self,
        root: NodeId,
        selectors: &[Literal],
        valuation: &(impl Valuation + ?Sized),
    ) -> Result<bool, PbError> {
        let mut cur = root;
        while let Some(node) = self.node(cur) {
            let lit = selectors[node.level as usize - 1];
            let value = valuation
                .value(lit.var())
                .ok_or(PbError::MissingVariable(lit.var().id()))?;
            cur = if lit.value_under(value) { node.high } else { node.low };
        }
        Ok(cur == NodeId::TRUE)
    }

    /// Decision nodes reachable from `root`, children before parents.
    pub fn reachable(&self, root: NodeId) -> Vec<NodeId> {
        let mut seen = std::collections::HashSet::new();
        let mut order = Vec::new();
        let mut stack = vec![(root, false)];
        while let Some((id, expanded)) = stack.pop() {
            let Some(node) = self.node(id) else { continue };
            if expanded {
                order.push(id);
                continue;
            }
            if !seen.insert(id) {
                continue;
            }
            stack.push((id, true));
            stack.push((node.high, false));
            stack.push((node.low, false));
        }
        order
    }

    /// Number of distinct decision nodes reachable from `root`.
    pub fn count_nodes(&self, root: NodeId) -> usize {
        self.reachable(root).len()
    }

    /// Reachable nodes including the terminals that are reached.
    pub fn count_nodes_with_terminals(&self, root: NodeId) -> usize {
        let reach = self.reachable(root);
        let mut terminals = [false; 2];
        if root.is_terminal() {
            terminals[root.0 as usize] = true;
        }
        for id in &reach {
            let node = self.node(*id).unwrap();
            for child in [node.low, node.high] {
                if child.is_terminal() {
                    terminals[child.0 as usize] = true;
                }
            }
        }
        reach.len() + terminals.iter().filter(|t| **t).count()
    }

    /// Decision-node count per level; index 0 is level 1.
    pub fn level_widths(&self, root: NodeId) -> Vec<usize> {
        let mut widths = vec![0; self.levels as usize];
        for id in self.reachable(root) {
            widths[self.level(id) as usize - 1] += 1;
        }
        widths
    }

    /// Structural equality of the diagram at `root` with the one at `other_root`
    /// in `other`, level by level.
    pub fn isomorphic(&self, root: NodeId, other: &NodeStore, other_root: NodeId) -> bool {
        let mut pairs = HashMap::new();
        let mut stack = vec![(root, other_root)];
        while let Some((a, b)) = stack.pop() {
            match (self.node(a), other.node(b)) {
                (None, None) => {
                    if a != b {
                        return false;
                    }
                }
                (Some(na), Some(nb)) => {
                    if na.level != nb.level {
                        return false;
                    }
                    match pairs.insert(a, b) {
                        Some(prev) if prev != b => return false,
                        Some(_) => continue,
                        None => {}
                    }
                    stack.push((na.low, nb.low));
                    stack.push((na.high, nb.high));
                }
                _ => return false,
            }
        }
        // Distinct nodes on one side must stay distinct on the other.
        let mut image = std::collections::HashSet::new();
        pairs.values().all(|b| image.insert(*b))
    }

    /// Graphviz rendering, one node or edge per line. Dashed edges are low
    /// (literal false) edges.
    pub fn to_dot(&self, root: NodeId, selectors: &[Literal]) -> String {
        let mut out = String::from("digraph bdd {\n");
        out.push_str("  n0 [shape=box,label=\"0\"];\n  n1 [shape=box,label=\"1\"];\n");
        for id in self.reachable(root).iter().rev() {
            let node = self.node(*id).unwrap();
            let label = selectors
                .get(node.level as usize - 1)
                .map_or_else(|| format!("L{}", node.level), |l| l.to_string());
            let _ = writeln!(out, "  n{} [label=\"{}\"];", id.0, label);
            let _ = writeln!(out, "  n{} -> n{} [style=dashed];", id.0, node.low.0);
            let _ = writeln!(out, "  n{} -> n{};", id.0, node.high.0);
        }
        let _ = writeln!(out, "  root -> n{};", root.0);
        out.push_str("}\n");
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pb::Var;

    fn lits(n: u32) -> Vec<Literal> {
        (1..=n).map(|i| Var::new(i).unwrap().pos()).collect()
    }

    #[test]
    fn identical_children_collapse() {
        let mut s = NodeStore::new(3);
        let n = s.mk_node(3, NodeId::FALSE, NodeId::TRUE).unwrap();
        assert_eq!(s.mk_node(2, n, n).unwrap(), n);
        assert_eq!(s.len(), 1);
    }

    #[test]
    fn canonical_triples() {
        let mut s = NodeStore::new(3);
        let a = s.mk_node(3, NodeId::FALSE, NodeId::TRUE).unwrap();
        let b = s.mk_node(3, NodeId::FALSE, NodeId::TRUE).unwrap();
        assert_eq!(a, b);
        let mut t = NodeStore::new(3);
        let c = t.mk_node(3, NodeId::FALSE, NodeId::TRUE).unwrap();
        assert!(s.isomorphic(a, &t, c));
        assert!(!s.isomorphic(a, &t, NodeId::TRUE));
    }

    #[test]
    fn orderedness_is_enforced() {
        let mut s = NodeStore::new(3);
        let n = s.mk_node(2, NodeId::FALSE, NodeId::TRUE).unwrap();
        assert_eq!(
            s.mk_node(2, n, NodeId::TRUE),
            Err(BddError::Unordered { parent: 2, child: 2 })
        );
        assert_eq!(
            s.mk_node(3, n, NodeId::TRUE),
            Err(BddError::Unordered { parent: 3, child: 2 })
        );
        assert!(matches!(s.mk_node(4, NodeId::FALSE, NodeId::TRUE), Err(BddError::InvalidLevel { .. })));
        assert!(matches!(s.mk_node(1, NodeId(99), NodeId::TRUE), Err(BddError::UnknownNode(_))));
    }

    #[test]
    fn budget_aborts_creation() {
        let mut s = NodeStore::new(3).with_budget(Some(1));
        let n = s.mk_node(3, NodeId::FALSE, NodeId::TRUE).unwrap();
        // existing nodes are still returned
        assert_eq!(s.mk_node(3, NodeId::FALSE, NodeId::TRUE).unwrap(), n);
        assert_eq!(s.mk_node(2, n, NodeId::TRUE), Err(BddError::BudgetExceeded(1)));
    }

    #[test]
    fn terminals_evaluate_to_themselves() {
        let s = NodeStore::new(2);
        let a = vec![true, false];
        assert!(s.eval(NodeId::TRUE, &lits(2), &a).unwrap());
        assert!(!s.eval(NodeId::FALSE, &lits(2), &a).unwrap());
        assert_eq!(s.count_nodes(NodeId::TRUE), 0);
        assert_eq!(s.count_nodes_with_terminals(NodeId::TRUE), 1);
    }

    #[test]
    fn negative_selector_swaps_branches() {
        let mut s = NodeStore::new(1);
        let n = s.mk_node(1, NodeId::FALSE, NodeId::TRUE).unwrap();
        let x = Var::new(1).unwrap();
        assert!(s.eval(n, &[x.pos()], &vec![true]).unwrap());
        assert!(!s.eval(n, &[x.neg()], &vec![true]).unwrap());
        assert!(s.eval(n, &[x.neg()], &vec![false]).unwrap());
    }

    #[test]
    fn widths_and_dot() {
        let mut s = NodeStore::new(3);
        let c = s.mk_node(3, NodeId::TRUE, NodeId::FALSE).unwrap();
        let b = s.mk_node(2, NodeId::TRUE, c).unwrap();
        let a = s.mk_node(1, b, c).unwrap();
        assert_eq!(s.level_widths(a), vec![1, 1, 1]);
        assert_eq!(s.count_nodes_with_terminals(a), 5);
        assert_eq!(s.reachable(a), vec![c, b, a]);
        let dot = s.to_dot(a, &lits(3));
        assert!(dot.contains("label=\"x1\""));
        assert_eq!(dot.lines().filter(|l| l.contains("->")).count(), 7);
    }
}
