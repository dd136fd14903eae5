//! Self-avoiding-walk trees.
//!
//! A node of the tree is a self-avoiding walk starting at the root vertex;
//! its children extend the walk by one step. In [`Mode::Weitz`] a step that
//! would close a cycle is kept as a leaf copy of the revisited vertex, fixed
//! occupied or unoccupied by comparing, in the ordering at the revisited
//! vertex, the neighbor that started the cycle with the one that closed it.
//! The ordering at every vertex is ascending vertex id: the cycle-closing
//! copy is occupied exactly when the starting neighbor has the smaller id.
//!
//! User boundary conditions (hard-core only) are folded in as follows: a
//! vertex pinned unoccupied appears as a fixed-unoccupied leaf; a vertex
//! pinned occupied never appears, and instead every node whose vertex is
//! adjacent to it is fixed unoccupied (its ratio is 0) and not expanded.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::graph::Graph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Plain,
    Weitz,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Plain => "plain",
            Mode::Weitz => "weitz",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Fix {
    Free,
    Occupied,
    Unoccupied,
}

/// A vertex assignment inside a [`BoundaryCondition`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pin {
    Occupied,
    Unoccupied,
}

/// Partial independent set: a set of pinned vertices with their states.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundaryCondition {
    assignments: BTreeMap<usize, Pin>,
}

impl BoundaryCondition {
    /// Validates vertex ids and that the occupied vertices are independent.
    pub fn new(g: &Graph, assignments: BTreeMap<usize, Pin>) -> Result<Self> {
        for &v in assignments.keys() {
            g.check_vertex(v)?;
        }
        for (&u, &pin) in &assignments {
            if pin != Pin::Occupied {
                continue;
            }
            for &w in g.neighbors(u) {
                if w > u && assignments.get(&w) == Some(&Pin::Occupied) {
                    return Err(Error::BoundaryNotIndependent(u, w));
                }
            }
        }
        Ok(BoundaryCondition { assignments })
    }

    pub fn get(&self, v: usize) -> Option<Pin> {
        self.assignments.get(&v).copied()
    }

    pub fn is_empty(&self) -> bool {
        self.assignments.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, Pin)> + '_ {
        self.assignments.iter().map(|(&v, &p)| (v, p))
    }

    pub(crate) fn dense(&self, n: usize) -> Vec<Option<Pin>> {
        let mut out = vec![None; n];
        for (v, p) in self.iter() {
            if v < n {
                out[v] = Some(p);
            }
        }
        out
    }
}

pub type NodeId = u32;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SawNode {
    pub vertex: usize,
    pub depth: usize,
    pub fix: Fix,
    pub parent: Option<NodeId>,
    first_child: NodeId,
    child_count: u32,
}

/// A materialized, depth-bounded SAW tree stored as an arena.
///
/// Children of a node are contiguous and appear in ascending vertex order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SawTree {
    nodes: Vec<SawNode>,
    mode: Mode,
    max_depth: usize,
    level_counts: Vec<u64>,
    frontier: Vec<NodeId>,
}

impl SawTree {
    pub fn root(&self) -> NodeId {
        0
    }

    pub fn node(&self, id: NodeId) -> &SawNode {
        &self.nodes[id as usize]
    }

    pub fn children(&self, id: NodeId) -> std::ops::Range<NodeId> {
        let n = &self.nodes[id as usize];
        n.first_child..n.first_child + n.child_count
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn max_depth(&self) -> usize {
        self.max_depth
    }

    /// Node count at each depth `0..=max_depth`.
    pub fn level_counts(&self) -> &[u64] {
        &self.level_counts
    }

    /// Free nodes at `max_depth` that would have children in a deeper tree.
    pub fn truncated_frontier(&self) -> &[NodeId] {
        &self.frontier
    }

    pub fn is_frontier(&self, id: NodeId) -> bool {
        self.frontier.binary_search(&id).is_ok()
    }

    /// Walk of graph vertices from the root to `id`.
    pub fn path_to(&self, id: NodeId) -> Vec<usize> {
        let mut out = Vec::new();
        let mut cur = Some(id);
        while let Some(c) = cur {
            let node = self.node(c);
            out.push(node.vertex);
            cur = node.parent;
        }
        out.reverse();
        out
    }
}

/// What a candidate step from the current walk turns into.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Step {
    /// An ordinary extension of the walk.
    Walk(usize),
    /// Weitz cycle-closing copy, fixed as given.
    Closing(usize, Fix),
    /// Vertex pinned unoccupied by the user boundary.
    Pinned(usize),
}

/// Read-only view shared by the tree builder and the fused evaluators.
pub(crate) struct Walker<'a> {
    pub g: &'a Graph,
    pub mode: Mode,
    pins: Vec<Option<Pin>>,
    /// Vertices below this id are treated as deleted.
    pub first_alive: usize,
}

impl<'a> Walker<'a> {
    pub fn new(
        g: &'a Graph,
        mode: Mode,
        boundary: Option<&BoundaryCondition>,
        first_alive: usize,
    ) -> Result<Self> {
        let pins = match boundary {
            Some(b) if !b.is_empty() => {
                if mode == Mode::Plain {
                    return Err(invalid(
                        "boundary conditions are only supported on Weitz trees",
                    ));
                }
                b.dense(g.n())
            }
            _ => Vec::new(),
        };
        Ok(Walker {
            g,
            mode,
            pins,
            first_alive,
        })
    }

    #[inline]
    pub fn pin(&self, v: usize) -> Option<Pin> {
        self.pins.get(v).copied().flatten()
    }

    #[inline]
    pub fn alive(&self, v: usize) -> bool {
        v >= self.first_alive
    }

    pub fn check_root(&self, root: usize) -> Result<()> {
        self.g.check_vertex(root)?;
        if !self.alive(root) {
            return Err(invalid(format!("root {root} has been deleted")));
        }
        if self.pin(root).is_some() {
            return Err(Error::RootPinned(root));
        }
        Ok(())
    }

    /// A node for `v` is forced unoccupied by an occupied neighbor.
    #[inline]
    pub fn forced_unoccupied(&self, v: usize) -> bool {
        !self.pins.is_empty()
            && self
                .g
                .neighbors(v)
                .iter()
                .any(|&w| self.alive(w) && self.pin(w) == Some(Pin::Occupied))
    }

    /// Whether a free node for `v` would have at least one child.
    #[inline]
    pub fn has_children(&self, v: usize, parent: Option<usize>, on_path: &[bool]) -> bool {
        self.g.neighbors(v).iter().any(|&w| {
            self.alive(w)
                && Some(w) != parent
                && (self.mode == Mode::Weitz || !on_path[w])
        })
    }

    /// Classify the step from the walk ending at `v` to neighbor `w`.
    ///
    /// `path` is the current walk and `pos[x]` the index of `x` in it (valid
    /// only where `on_path[x]`). Returns `None` when the step is not a child.
    #[inline]
    pub fn classify(
        &self,
        v: usize,
        w: usize,
        parent: Option<usize>,
        path: &[usize],
        pos: &[usize],
        on_path: &[bool],
    ) -> Option<Step> {
        if !self.alive(w) || Some(w) == parent {
            return None;
        }
        if on_path[w] {
            return match self.mode {
                Mode::Plain => None,
                Mode::Weitz => {
                    let starter = path[pos[w] + 1];
                    let fix = if starter < v {
                        Fix::Occupied
                    } else {
                        Fix::Unoccupied
                    };
                    Some(Step::Closing(w, fix))
                }
            };
        }
        match self.pin(w) {
            Some(Pin::Unoccupied) => Some(Step::Pinned(w)),
            // an occupied neighbor forces `v` itself, which is never expanded
            Some(Pin::Occupied) => None,
            None => Some(Step::Walk(w)),
        }
    }
}

/// Expand the SAW tree of `g` rooted at `root` down to `max_depth`.
pub fn expand_saw_tree(
    g: &Graph,
    root: usize,
    max_depth: usize,
    mode: Mode,
    boundary: Option<&BoundaryCondition>,
    node_budget: u64,
) -> Result<SawTree> {
    if node_budget == 0 {
        return Err(invalid("node budget must be positive"));
    }
    let walker = Walker::new(g, mode, boundary, 0)?;
    walker.check_root(root)?;

    let n = g.n();
    let mut tree = SawTree {
        nodes: Vec::new(),
        mode,
        max_depth,
        level_counts: vec![0; max_depth + 1],
        frontier: Vec::new(),
    };
    let mut on_path = vec![false; n];
    let mut pos = vec![0usize; n];
    let mut path: Vec<usize> = Vec::new();

    let root_fix = if walker.forced_unoccupied(root) {
        Fix::Unoccupied
    } else {
        Fix::Free
    };
    push_node(&mut tree, root, 0, root_fix, None, node_budget)?;

    // (node, next child offset)
    let mut stack: Vec<(NodeId, u32)> = Vec::new();
    if root_fix == Fix::Free {
        if max_depth == 0 {
            if walker.has_children(root, None, &on_path) {
                tree.frontier.push(0);
            }
        } else {
            on_path[root] = true;
            pos[root] = 0;
            path.push(root);
            expand_children(&mut tree, &walker, 0, &path, &pos, &on_path, node_budget)?;
            stack.push((0, 0));
        }
    }

    while let Some(top) = stack.last_mut() {
        let (id, next) = *top;
        let node = &tree.nodes[id as usize];
        if next == node.child_count {
            on_path[node.vertex] = false;
            path.pop();
            stack.pop();
            continue;
        }
        top.1 += 1;
        let child = node.first_child + next;
        let c = &tree.nodes[child as usize];
        if c.fix != Fix::Free || c.depth >= max_depth {
            continue;
        }
        let (cv, parent_vertex) = (c.vertex, node.vertex);
        // only free walk nodes reach here; closing copies and pinned leaves
        // are never free
        on_path[cv] = true;
        pos[cv] = path.len();
        path.push(cv);
        debug_assert_eq!(path[path.len() - 2], parent_vertex);
        expand_children(&mut tree, &walker, child, &path, &pos, &on_path, node_budget)?;
        stack.push((child, 0));
    }
    tree.frontier.sort_unstable();
    Ok(tree)
}

fn push_node(
    tree: &mut SawTree,
    vertex: usize,
    depth: usize,
    fix: Fix,
    parent: Option<NodeId>,
    budget: u64,
) -> Result<NodeId> {
    let id = tree.nodes.len() as u64;
    if id + 1 > budget {
        return Err(Error::BudgetExceeded {
            budget,
            expanded: id + 1,
        });
    }
    tree.nodes.push(SawNode {
        vertex,
        depth,
        fix,
        parent,
        first_child: 0,
        child_count: 0,
    });
    tree.level_counts[depth] += 1;
    Ok(id as NodeId)
}

/// Append all children of `id` (whose vertex is the last entry of `path`).
fn expand_children(
    tree: &mut SawTree,
    walker: &Walker<'_>,
    id: NodeId,
    path: &[usize],
    pos: &[usize],
    on_path: &[bool],
    budget: u64,
) -> Result<()> {
    let v = *path.last().expect("non-empty path");
    let parent = if path.len() >= 2 {
        Some(path[path.len() - 2])
    } else {
        None
    };
    let depth = tree.nodes[id as usize].depth + 1;
    let first = tree.nodes.len() as NodeId;
    let mut count = 0u32;
    for &w in walker.g.neighbors(v) {
        let Some(step) = walker.classify(v, w, parent, path, pos, on_path) else {
            continue;
        };
        let (vertex, fix) = match step {
            Step::Closing(w, fix) => (w, fix),
            Step::Pinned(w) => (w, Fix::Unoccupied),
            Step::Walk(w) => {
                if walker.forced_unoccupied(w) {
                    (w, Fix::Unoccupied)
                } else {
                    (w, Fix::Free)
                }
            }
        };
        let child = push_node(tree, vertex, depth, fix, Some(id), budget)?;
        count += 1;
        if fix == Fix::Free && depth == tree.max_depth {
            if walker.has_children(vertex, Some(v), on_path) {
                tree.frontier.push(child);
            }
        }
    }
    let node = &mut tree.nodes[id as usize];
    node.first_child = first;
    node.child_count = count;
    Ok(())
}

/// Number of self-avoiding walks of each length `1..=max_len` from `v`.
///
/// Enumerates walks depth-first without building a tree. `budget` bounds
/// the total number of walks visited.
pub fn saw_counts(g: &Graph, v: usize, max_len: usize, budget: u64) -> Result<Vec<u64>> {
    g.check_vertex(v)?;
    let mut counts = vec![0u64; max_len];
    if max_len == 0 {
        return Ok(counts);
    }
    let mut on_path = vec![false; g.n()];
    on_path[v] = true;
    // (vertex, next neighbor index)
    let mut stack: Vec<(usize, usize)> = vec![(v, 0)];
    let mut visited = 0u64;
    while let Some(top) = stack.last_mut() {
        let (u, idx) = *top;
        let nbrs = g.neighbors(u);
        if idx == nbrs.len() {
            on_path[u] = false;
            stack.pop();
            continue;
        }
        top.1 += 1;
        let w = nbrs[idx];
        if on_path[w] {
            continue;
        }
        let len = stack.len();
        counts[len - 1] += 1;
        visited += 1;
        if visited > budget {
            return Err(Error::BudgetExceeded {
                budget,
                expanded: visited,
            });
        }
        if len < max_len {
            on_path[w] = true;
            stack.push((w, 0));
        }
    }
    Ok(counts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, GraphKind};

    fn c4() -> Graph {
        generate(GraphKind::Cycle { n: 4 }, 0).unwrap()
    }

    #[test]
    fn c4_plain_levels() {
        let t = expand_saw_tree(&c4(), 0, 4, Mode::Plain, None, 1000).unwrap();
        assert_eq!(t.level_counts(), &[1, 2, 2, 2, 0]);
        assert!(t.truncated_frontier().is_empty());
    }

    #[test]
    fn c4_weitz_levels_and_fixes() {
        let t = expand_saw_tree(&c4(), 0, 4, Mode::Weitz, None, 1000).unwrap();
        assert_eq!(t.level_counts(), &[1, 2, 2, 2, 2]);
        let deep: Vec<_> = (0..t.len() as NodeId)
            .filter(|&i| t.node(i).depth == 4)
            .collect();
        assert_eq!(deep.len(), 2);
        for &id in &deep {
            assert_eq!(t.node(id).vertex, 0);
            let path = t.path_to(id);
            // walk 0,1,2,3,0 starts with 1 < 3: occupied; 0,3,2,1,0: unoccupied
            let expected = if path[1] < path[3] {
                Fix::Occupied
            } else {
                Fix::Unoccupied
            };
            assert_eq!(t.node(id).fix, expected);
        }
        let fixes: Vec<_> = deep.iter().map(|&i| t.node(i).fix).collect();
        assert!(fixes.contains(&Fix::Occupied) && fixes.contains(&Fix::Unoccupied));
        assert!(t.truncated_frontier().is_empty());
    }

    #[test]
    fn single_vertex() {
        let g = Graph::empty(1);
        let t = expand_saw_tree(&g, 0, 5, Mode::Plain, None, 10).unwrap();
        assert_eq!(t.level_counts()[0], 1);
        assert!(t.level_counts()[1..].iter().all(|&c| c == 0));
        assert_eq!(t.len(), 1);
        assert!(t.truncated_frontier().is_empty());
    }

    #[test]
    fn frontier_is_recorded() {
        let t = expand_saw_tree(&c4(), 0, 2, Mode::Plain, None, 100).unwrap();
        assert_eq!(t.level_counts(), &[1, 2, 2]);
        assert_eq!(t.truncated_frontier().len(), 2);
        let t0 = expand_saw_tree(&c4(), 0, 0, Mode::Weitz, None, 100).unwrap();
        assert_eq!(t0.truncated_frontier(), &[0]);
    }

    #[test]
    fn budget_is_enforced() {
        let k5 = generate(GraphKind::Complete { n: 5 }, 0).unwrap();
        match expand_saw_tree(&k5, 0, 5, Mode::Plain, None, 10) {
            Err(Error::BudgetExceeded { budget, expanded }) => {
                assert_eq!(budget, 10);
                assert_eq!(expanded, 11);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(expand_saw_tree(&k5, 0, 5, Mode::Plain, None, 0).is_err());
    }

    #[test]
    fn saw_count_examples() {
        assert_eq!(saw_counts(&c4(), 0, 4, 1000).unwrap(), vec![2, 2, 2, 0]);
        let k4 = generate(GraphKind::Complete { n: 4 }, 0).unwrap();
        assert_eq!(saw_counts(&k4, 0, 3, 1000).unwrap(), vec![3, 6, 6]);
        let p3 = Graph::parse_edge_list("0 1\n1 2").unwrap();
        assert_eq!(saw_counts(&p3, 1, 2, 1000).unwrap(), vec![2, 0]);
        assert!(saw_counts(&k4, 0, 3, 5).is_err());
    }

    #[test]
    fn boundary_validation() {
        let g = c4();
        let mut a = BTreeMap::new();
        a.insert(0, Pin::Occupied);
        a.insert(1, Pin::Occupied);
        assert_eq!(
            BoundaryCondition::new(&g, a),
            Err(Error::BoundaryNotIndependent(0, 1))
        );
        let mut a = BTreeMap::new();
        a.insert(9, Pin::Unoccupied);
        assert!(BoundaryCondition::new(&g, a).is_err());
        let mut a = BTreeMap::new();
        a.insert(0, Pin::Occupied);
        a.insert(2, Pin::Occupied);
        let b = BoundaryCondition::new(&g, a).unwrap();
        assert_eq!(
            expand_saw_tree(&g, 0, 3, Mode::Weitz, Some(&b), 100),
            Err(Error::RootPinned(0))
        );
        assert!(expand_saw_tree(&g, 1, 3, Mode::Plain, Some(&b), 100).is_err());
    }

    #[test]
    fn occupied_pin_zeroes_neighbors() {
        // path 0-1-2-3 with 3 occupied: node for 2 becomes a fixed leaf
        let g = Graph::parse_edge_list("0 1\n1 2\n2 3").unwrap();
        let mut a = BTreeMap::new();
        a.insert(3, Pin::Occupied);
        let b = BoundaryCondition::new(&g, a).unwrap();
        let t = expand_saw_tree(&g, 0, 5, Mode::Weitz, Some(&b), 100).unwrap();
        assert_eq!(t.level_counts(), &[1, 1, 1, 0, 0, 0]);
        let leaf = (0..t.len() as NodeId).find(|&i| t.node(i).depth == 2).unwrap();
        assert_eq!(t.node(leaf).vertex, 2);
        assert_eq!(t.node(leaf).fix, Fix::Unoccupied);
    }
}
