//! Rank-labeled binary trees on the nodes `1..=n`.
//!
//! A tree is rank-labeled when its in-order traversal visits `1, 2, ..., n`,
//! i.e. the left subtree of `t` holds exactly `t - λ(t) ..= t - 1` and the
//! right subtree `t + 1 ..= t + ρ(t)`.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::error::{Error, Result};

/// Child-array sentinel for "no child".
const NONE: u32 = 0;

/// Largest `n` for which `enumerate_trees` agrees to run (`C_12 = 208012`).
pub const ENUMERATION_CAP: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeViolation {
    #[error("malformed tree: {0}")]
    Shape(String),
    #[error("node {node} has more than one parent")]
    MultipleParents { node: usize },
    #[error("root {root} appears as a child of node {parent}")]
    RootHasParent { root: usize, parent: usize },
    #[error("node {node} is not reachable from the root")]
    Unreachable { node: usize },
    #[error("node {node} sits at in-order position {position}")]
    RankMismatch { node: usize, position: usize },
}

/// Binary tree on `1..=n` stored as child arrays; index 0 is unused.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RankTree {
    root: u32,
    left: Vec<u32>,
    right: Vec<u32>,
}

impl RankTree {
    /// Assembles a tree from 1-based child lists (entry `t - 1` describes node `t`).
    /// Only shape is checked here; rank labeling is checked by [`RankTree::validate`].
    pub fn from_parts(
        root: usize,
        left: &[Option<usize>],
        right: &[Option<usize>],
    ) -> Result<Self, TreeViolation> {
        let n = left.len();
        if n == 0 {
            return Err(TreeViolation::Shape("a tree needs at least one node".into()));
        }
        if right.len() != n {
            return Err(TreeViolation::Shape(format!(
                "{n} left entries but {} right entries",
                right.len()
            )));
        }
        if n >= u32::MAX as usize {
            return Err(TreeViolation::Shape(format!("{n} nodes are too many")));
        }
        let check = |c: Option<usize>| -> Result<u32, TreeViolation> {
            match c {
                None => Ok(NONE),
                Some(c) if (1..=n).contains(&c) => Ok(c as u32),
                Some(c) => Err(TreeViolation::Shape(format!("child {c} outside 1..={n}"))),
            }
        };
        if !(1..=n).contains(&root) {
            return Err(TreeViolation::Shape(format!("root {root} outside 1..={n}")));
        }
        let mut l = vec![NONE; n + 1];
        let mut r = vec![NONE; n + 1];
        for t in 1..=n {
            l[t] = check(left[t - 1])?;
            r[t] = check(right[t - 1])?;
        }
        Ok(Self {
            root: root as u32,
            left: l,
            right: r,
        })
    }

    /// Builds a validated tree from `(parent, child)` pairs; a child smaller
    /// than its parent becomes the left child.
    pub fn from_edges(n: usize, root: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut left = vec![None; n];
        let mut right = vec![None; n];
        for &(p, c) in edges {
            if p == 0 || p > n || c == 0 || c > n || p == c {
                return Err(TreeViolation::Shape(format!("bad edge ({p}, {c})")).into());
            }
            let slot = if c < p { &mut left[p - 1] } else { &mut right[p - 1] };
            if slot.replace(c).is_some() {
                return Err(TreeViolation::Shape(format!("node {p} has two children on one side")).into());
            }
        }
        let tree = Self::from_parts(root, &left, &right)?;
        tree.validate()?;
        Ok(tree)
    }

    /// Root 1, every node `t < n` with right child `t + 1`.
    pub fn right_spine(n: usize) -> Self {
        let left = vec![None; n];
        let right: Vec<_> = (1..=n).map(|t| (t < n).then_some(t + 1)).collect();
        Self::from_parts(1, &left, &right).expect("spine is well formed")
    }

    /// Root `n`, every node `t > 1` with left child `t - 1`.
    pub fn left_spine(n: usize) -> Self {
        let left: Vec<_> = (1..=n).map(|t| (t > 1).then(|| t - 1)).collect();
        let right = vec![None; n];
        Self::from_parts(n, &left, &right).expect("spine is well formed")
    }

    pub fn len(&self) -> usize {
        self.left.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn root(&self) -> usize {
        self.root as usize
    }

    pub fn left_child(&self, t: usize) -> Option<usize> {
        Self::child(self.left[t])
    }

    pub fn right_child(&self, t: usize) -> Option<usize> {
        Self::child(self.right[t])
    }

    fn child(c: u32) -> Option<usize> {
        (c != NONE).then_some(c as usize)
    }

    /// Parent of each node at index `t` (`None` for the root and index 0).
    pub fn parents(&self) -> Vec<Option<usize>> {
        let mut parent = vec![None; self.len() + 1];
        for t in 1..=self.len() {
            for c in [self.left[t], self.right[t]] {
                if c != NONE {
                    parent[c as usize] = Some(t);
                }
            }
        }
        parent
    }

    /// Depth of each node at index `t`; the root has depth 0.
    pub fn depths(&self) -> Vec<usize> {
        let mut depth = vec![0; self.len() + 1];
        let mut stack = vec![self.root()];
        while let Some(t) = stack.pop() {
            for c in [self.left[t], self.right[t]] {
                if c != NONE {
                    depth[c as usize] = depth[t] + 1;
                    stack.push(c as usize);
                }
            }
        }
        depth
    }

    /// Checks that the child arrays form a single tree whose in-order
    /// traversal is `1..=n`, reporting the first offending node.
    pub fn validate(&self) -> Result<(), TreeViolation> {
        let n = self.len();
        let root = self.root();
        let mut parent = vec![NONE; n + 1];
        for t in 1..=n {
            for c in [self.left[t], self.right[t]] {
                if c == NONE {
                    continue;
                }
                let c = c as usize;
                if c == root {
                    return Err(TreeViolation::RootHasParent { root, parent: t });
                }
                if parent[c] != NONE {
                    return Err(TreeViolation::MultipleParents { node: c });
                }
                parent[c] = t as u32;
            }
        }
        let mut seen = vec![false; n + 1];
        let mut stack = vec![root];
        while let Some(t) = stack.pop() {
            seen[t] = true;
            stack.extend(
                [self.left[t], self.right[t]]
                    .into_iter()
                    .filter(|&c| c != NONE)
                    .map(|c| c as usize),
            );
        }
        if let Some(node) = (1..=n).find(|&t| !seen[t]) {
            return Err(TreeViolation::Unreachable { node });
        }
        for (position, node) in self.in_order().into_iter().enumerate() {
            if node != position + 1 {
                return Err(TreeViolation::RankMismatch {
                    node,
                    position: position + 1,
                });
            }
        }
        Ok(())
    }

    fn in_order(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.len());
        let mut stack = Vec::new();
        let mut cur = self.root;
        while cur != NONE || !stack.is_empty() {
            while cur != NONE {
                stack.push(cur);
                cur = self.left[cur as usize];
            }
            let t = stack.pop().expect("stack is nonempty");
            out.push(t as usize);
            cur = self.right[t as usize];
        }
        out
    }

    /// Subtree sizes `λ`, `ρ` and `s`, computed with one ascending and one
    /// descending sweep over the nodes.
    pub fn subtree_sizes(&self) -> SubtreeSizes {
        let n = self.len();
        let mut left = vec![0usize; n + 1];
        let mut right = vec![0usize; n + 1];
        for t in 1..=n {
            let l = self.left[t] as usize;
            if l != 0 {
                left[t] = left[l] + t - l;
            }
        }
        for t in (1..=n).rev() {
            let r = self.right[t] as usize;
            if r != 0 {
                right[t] = r - t + right[r];
            }
        }
        let total = (0..=n)
            .map(|t| if t == 0 { 0 } else { left[t] + 1 + right[t] })
            .collect();
        SubtreeSizes { left, right, total }
    }

    /// The chains of left and right children starting at the root.
    pub fn top_nodes(&self) -> (Vec<usize>, Vec<usize>) {
        let chain = |children: &[u32]| {
            let mut out = vec![self.root()];
            let mut cur = children[self.root()];
            while cur != NONE {
                out.push(cur as usize);
                cur = children[cur as usize];
            }
            out
        };
        (chain(&self.left), chain(&self.right))
    }

    /// Swaps left and right everywhere and relabels `t ↦ n + 1 - t`.
    pub fn mirror(&self) -> Self {
        let n = self.len() as u32;
        let flip = |c: u32| if c == NONE { NONE } else { n + 1 - c };
        let mut left = vec![NONE; n as usize + 1];
        let mut right = vec![NONE; n as usize + 1];
        for t in 1..=n {
            let m = (n + 1 - t) as usize;
            left[m] = flip(self.right[t as usize]);
            right[m] = flip(self.left[t as usize]);
        }
        Self {
            root: flip(self.root),
            left,
            right,
        }
    }

    /// True iff `u_t <= u_{p(t)}` for every non-root node.
    pub fn is_cartesian_for(&self, u: &[f64]) -> bool {
        if u.len() != self.len() {
            return false;
        }
        (1..=self.len()).all(|t| {
            [self.left[t], self.right[t]]
                .into_iter()
                .filter(|&c| c != NONE)
                .all(|c| u[c as usize - 1] <= u[t - 1])
        })
    }

    fn fmt_subtree(&self, t: usize, out: &mut String) {
        out.push('(');
        if let Some(l) = self.left_child(t) {
            self.fmt_subtree(l, out);
            out.push(' ');
        }
        out.push_str(&t.to_string());
        if let Some(r) = self.right_child(t) {
            out.push(' ');
            self.fmt_subtree(r, out);
        }
        out.push(')');
    }
}

impl fmt::Display for RankTree {
    /// Nested `(left root right)` form, e.g. `((1) 2 (3))`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        self.fmt_subtree(self.root(), &mut out);
        f.write_str(&out)
    }
}

impl fmt::Debug for RankTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RankTree{self}")
    }
}

impl FromStr for RankTree {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut parser = TreeParser {
            bytes: s.as_bytes(),
            pos: 0,
            left: Vec::new(),
            right: Vec::new(),
        };
        let root = parser.subtree()?;
        parser.skip_ws();
        if parser.pos != parser.bytes.len() {
            return Err(parser.error("trailing input"));
        }
        let n = parser.left.len();
        let mut left = vec![None; n];
        let mut right = vec![None; n];
        for (label, l) in parser.left {
            if label == 0 || label > n || left[label - 1].is_some() || right[label - 1].is_some() {
                return Err(Error::Parse {
                    line: 1,
                    msg: format!("labels must be exactly 1..={n}, found {label}"),
                });
            }
            left[label - 1] = Some(l);
        }
        for (label, r) in parser.right {
            right[label - 1] = Some(r);
        }
        let tree = Self::from_parts(root, &unwrap_sides(left), &unwrap_sides(right))?;
        tree.validate()?;
        Ok(tree)
    }
}

fn unwrap_sides(v: Vec<Option<Option<usize>>>) -> Vec<Option<usize>> {
    v.into_iter().map(Option::flatten).collect()
}

struct TreeParser<'a> {
    bytes: &'a [u8],
    pos: usize,
    left: Vec<(usize, Option<usize>)>,
    right: Vec<(usize, Option<usize>)>,
}

impl TreeParser<'_> {
    fn error(&self, msg: &str) -> Error {
        Error::Parse {
            line: 1,
            msg: format!("{msg} at column {}", self.pos + 1),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&format!("expected {:?}", c as char)))
        }
    }

    fn subtree(&mut self) -> Result<usize> {
        self.expect(b'(')?;
        let l = if self.peek() == Some(b'(') {
            Some(self.subtree()?)
        } else {
            None
        };
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let label: usize = std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|d| d.parse().ok())
            .ok_or_else(|| self.error("expected a node label"))?;
        let r = if self.peek() == Some(b'(') {
            Some(self.subtree()?)
        } else {
            None
        };
        self.expect(b')')?;
        self.left.push((label, l));
        self.right.push((label, r));
        Ok(label)
    }
}

/// Subtree sizes indexed by node (index 0 unused).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubtreeSizes {
    left: Vec<usize>,
    right: Vec<usize>,
    total: Vec<usize>,
}

impl SubtreeSizes {
    /// `λ(t)`, the size of the left subtree.
    pub fn left(&self, t: usize) -> usize {
        self.left[t]
    }

    /// `ρ(t)`, the size of the right subtree.
    pub fn right(&self, t: usize) -> usize {
        self.right[t]
    }

    /// `s(t) = λ(t) + 1 + ρ(t)`.
    pub fn total(&self, t: usize) -> usize {
        self.total[t]
    }
}

/// Operation counts of a Cartesian tree construction.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StackStats {
    pub pushes: usize,
    pub pops: usize,
}

impl StackStats {
    pub fn total(&self) -> usize {
        self.pushes + self.pops
    }
}

/// Cartesian tree of `u` (every node's value is at most its parent's).
///
/// Right-spine stack construction: nodes are appended in order, spine nodes
/// with strictly smaller values are popped, the last popped node becomes the
/// left child of the new node and the new node becomes the right child of
/// the remaining spine top. Ties keep the earlier index as the ancestor.
pub fn find_cartesian_tree(u: &[f64]) -> Result<RankTree> {
    cartesian_tree_counted(u).map(|(tree, _)| tree)
}

/// [`find_cartesian_tree`] that also reports its stack operations.
pub fn cartesian_tree_counted(u: &[f64]) -> Result<(RankTree, StackStats)> {
    let n = u.len();
    if n == 0 {
        return Err(Error::domain("cannot build a Cartesian tree for an empty vector"));
    }
    let mut left = vec![NONE; n + 1];
    let mut right = vec![NONE; n + 1];
    let mut spine: Vec<u32> = Vec::with_capacity(n);
    let mut stats = StackStats::default();
    for t in 1..=n as u32 {
        let value = u[t as usize - 1];
        let mut last = NONE;
        while let Some(&top) = spine.last() {
            if u[top as usize - 1] < value {
                last = top;
                spine.pop();
                stats.pops += 1;
            } else {
                break;
            }
        }
        left[t as usize] = last;
        if let Some(&top) = spine.last() {
            right[top as usize] = t;
        }
        spine.push(t);
        stats.pushes += 1;
    }
    let tree = RankTree {
        root: spine[0],
        left,
        right,
    };
    Ok((tree, stats))
}

/// Catalan number `C_n` (number of binary trees on `n` nodes).
pub fn catalan(n: usize) -> u64 {
    (0..n as u64).fold(1u64, |c, k| c * 2 * (2 * k + 1) / (k + 2))
}

/// Lazily yields every rank-labeled tree on `1..=n` exactly once.
pub fn enumerate_trees(n: usize) -> Result<TreeEnumerator> {
    if n == 0 {
        return Err(Error::domain("trees need at least one node"));
    }
    if n > ENUMERATION_CAP {
        return Err(Error::CapExceeded {
            what: "tree enumeration",
            size: n,
            cap: ENUMERATION_CAP,
        });
    }
    Ok(TreeEnumerator {
        n: n as u32,
        frames: Vec::with_capacity(n),
        started: false,
    })
}

/// Odometer over root choices: each frame fixes the root `k` of an interval
/// `[a, b]`, frames are laid out in preorder, and advancing increments the
/// last incrementable root and re-expands everything after it with the
/// smallest choices.
pub struct TreeEnumerator {
    n: u32,
    frames: Vec<(u32, u32, u32)>,
    started: bool,
}

impl TreeEnumerator {
    fn push_children(pending: &mut Vec<(u32, u32, u32, bool)>, a: u32, b: u32, k: u32) {
        if k < b {
            pending.push((k + 1, b, k, false));
        }
        if k > a {
            pending.push((a, k - 1, k, true));
        }
    }

    /// Replays the fixed frames, appends minimal frames for the remaining
    /// intervals and returns the resulting tree.
    fn expand(&mut self) -> RankTree {
        let n = self.n as usize;
        let mut left = vec![NONE; n + 1];
        let mut right = vec![NONE; n + 1];
        let mut pending = vec![(1, self.n, NONE, false)];
        let mut link = |parent: u32, is_left: bool, k: u32| {
            if parent != NONE {
                if is_left {
                    left[parent as usize] = k;
                } else {
                    right[parent as usize] = k;
                }
            }
        };
        for &(a, b, k) in &self.frames {
            let (pa, pb, parent, is_left) = pending.pop().expect("frames replay in preorder");
            debug_assert_eq!((pa, pb), (a, b));
            link(parent, is_left, k);
            Self::push_children(&mut pending, a, b, k);
        }
        while let Some((a, b, parent, is_left)) = pending.pop() {
            self.frames.push((a, b, a));
            link(parent, is_left, a);
            Self::push_children(&mut pending, a, b, a);
        }
        RankTree {
            root: self.frames[0].2,
            left,
            right,
        }
    }
}

impl Iterator for TreeEnumerator {
    type Item = RankTree;

    fn next(&mut self) -> Option<RankTree> {
        if !self.started {
            self.started = true;
            return Some(self.expand());
        }
        let i = self.frames.iter().rposition(|&(_, b, k)| k < b)?;
        self.frames[i].2 += 1;
        self.frames.truncate(i + 1);
        Some(self.expand())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    pub(crate) fn figure4() -> RankTree {
        RankTree::from_edges(
            12,
            6,
            &[
                (6, 5),
                (5, 3),
                (3, 1),
                (1, 2),
                (3, 4),
                (6, 11),
                (11, 10),
                (10, 8),
                (8, 7),
                (8, 9),
                (11, 12),
            ],
        )
        .unwrap()
    }

    #[test]
    fn validate_examples() {
        let single = RankTree::from_parts(1, &[None], &[None]).unwrap();
        assert_eq!(single.validate(), Ok(()));
        figure4().validate().unwrap();
        let bad = RankTree::from_parts(1, &[Some(2), None], &[None, None]).unwrap();
        assert!(matches!(
            bad.validate(),
            Err(TreeViolation::RankMismatch { node: 2, position: 1 })
        ));
    }

    #[test]
    fn validate_structural_violations() {
        let two_parents =
            RankTree::from_parts(2, &[None, Some(1), None], &[None, Some(3), None]).unwrap();
        assert_eq!(two_parents.validate(), Ok(()));
        let shared = RankTree::from_parts(2, &[None, Some(1), Some(1)], &[None, Some(3), None]).unwrap();
        assert!(matches!(shared.validate(), Err(TreeViolation::MultipleParents { node: 1 })));
        let orphan = RankTree::from_parts(1, &[None, None], &[None, None]).unwrap();
        assert!(matches!(orphan.validate(), Err(TreeViolation::Unreachable { node: 2 })));
        let loops = RankTree::from_parts(1, &[None, None], &[Some(2), Some(1)]).unwrap();
        assert!(matches!(loops.validate(), Err(TreeViolation::RootHasParent { .. })));
        assert!(RankTree::from_parts(3, &[None], &[None]).is_err());
        assert!(RankTree::from_parts(1, &[Some(5)], &[None]).is_err());
    }

    #[test]
    fn figure4_sizes() {
        let tree = figure4();
        let sizes = tree.subtree_sizes();
        assert_eq!((sizes.left(11), sizes.right(11), sizes.total(11)), (4, 1, 6));
        assert_eq!((sizes.left(2), sizes.right(2), sizes.total(2)), (0, 0, 1));
        assert_eq!(sizes.total(6), 12);
        assert_eq!(sizes.left(3), 2);
        assert_eq!(sizes.right(3), 1);
        // child-rank identity
        for t in 1..=12 {
            if let Some(l) = tree.left_child(t) {
                assert_eq!(l + sizes.right(l) + 1, t);
            }
            if let Some(r) = tree.right_child(t) {
                assert_eq!(r - sizes.left(r) - 1, t);
            }
        }
        assert_eq!(RankTree::right_spine(4).subtree_sizes().right(1), 3);
    }

    #[test]
    fn figure5_top_nodes() {
        // root 5; top-left chain 5-2-1, top-right chain 5-9-11
        let tree = RankTree::from_edges(
            11,
            5,
            &[(5, 2), (2, 1), (2, 4), (4, 3), (5, 9), (9, 7), (7, 6), (7, 8), (9, 11), (11, 10)],
        )
        .unwrap();
        let (tl, tr) = tree.top_nodes();
        assert_eq!(tl, vec![5, 2, 1]);
        assert_eq!(tr, vec![5, 9, 11]);
        let single = RankTree::right_spine(1);
        assert_eq!(single.top_nodes(), (vec![1], vec![1]));
    }

    #[test]
    fn cartesian_examples() {
        let tree = find_cartesian_tree(&[0.3, 0.9, 0.5]).unwrap();
        assert_eq!(tree.to_string(), "((1) 2 (3))");
        assert_eq!(find_cartesian_tree(&[0.9, 0.5, 0.1, 0.0]).unwrap(), RankTree::right_spine(4));
        assert_eq!(find_cartesian_tree(&[0.4; 5]).unwrap(), RankTree::right_spine(5));
        assert!(find_cartesian_tree(&[]).is_err());
        assert!(!RankTree::right_spine(2).is_cartesian_for(&[0.0, 1.0]));
        assert!(figure4().is_cartesian_for(&[0.7; 12]));
        assert!(!figure4().is_cartesian_for(&[0.7; 3]));
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(enumerate_trees(1).unwrap().count(), 1);
        assert_eq!(enumerate_trees(3).unwrap().count(), 5);
        assert_eq!(enumerate_trees(4).unwrap().count(), 14);
        assert_eq!(enumerate_trees(10).unwrap().count(), 16796);
        assert!(matches!(enumerate_trees(13), Err(Error::CapExceeded { .. })));
        assert!(enumerate_trees(0).is_err());
    }

    #[test]
    fn enumeration_is_valid_and_distinct() {
        for n in 1..=8 {
            let trees: Vec<_> = enumerate_trees(n).unwrap().collect();
            assert_eq!(trees.len() as u64, catalan(n));
            let distinct: HashSet<_> = trees.iter().cloned().collect();
            assert_eq!(distinct.len(), trees.len());
            for tree in &trees {
                tree.validate().unwrap();
            }
        }
    }

    #[test]
    fn catalan_values() {
        let expected = [1, 1, 2, 5, 14, 42, 132, 429, 1430, 4862, 16796, 58786, 208012];
        for (n, &c) in expected.iter().enumerate() {
            assert_eq!(catalan(n), c);
        }
    }

    #[test]
    fn top_node_rank_identities() {
        for n in 1..=8 {
            for tree in enumerate_trees(n).unwrap() {
                let sizes = tree.subtree_sizes();
                let (tl, tr) = tree.top_nodes();
                assert_eq!(*tl.last().unwrap(), 1);
                assert_eq!(*tr.last().unwrap(), n);
                let root = tree.root();
                assert_eq!(root, n - sizes.right(root));
                assert_eq!(root, sizes.left(root) + 1);
                for t in 1..=n {
                    assert_eq!(tr.contains(&t), t + sizes.right(t) == n);
                    assert_eq!(tl.contains(&t), t == sizes.left(t) + 1);
                    if t + sizes.right(t) < n {
                        // t is a top-right node of the left subtree of t' = t + ρ(t) + 1
                        let anchor = t + sizes.right(t) + 1;
                        let l = tree.left_child(anchor).expect("anchor has a left subtree");
                        let mut chain = vec![l];
                        while let Some(r) = tree.right_child(*chain.last().unwrap()) {
                            chain.push(r);
                        }
                        assert!(chain.contains(&t));
                    }
                }
            }
        }
    }

    #[test]
    fn mirror_examples() {
        assert_eq!(RankTree::right_spine(5).mirror(), RankTree::left_spine(5));
        for n in 1..=7 {
            for tree in enumerate_trees(n).unwrap() {
                let m = tree.mirror();
                m.validate().unwrap();
                assert_eq!(m.mirror(), tree);
                let (_, tr) = tree.top_nodes();
                let (tl_m, _) = m.top_nodes();
                let mapped: Vec<_> = tr.iter().map(|t| n + 1 - t).collect();
                assert_eq!(mapped, tl_m);
                let (s, sm) = (tree.subtree_sizes(), m.subtree_sizes());
                for t in 1..=n {
                    assert_eq!(s.left(t), sm.right(n + 1 - t));
                    assert_eq!(s.right(t), sm.left(n + 1 - t));
                }
            }
        }
    }

    #[test]
    fn text_form_round_trips() {
        for n in 1..=6 {
            for tree in enumerate_trees(n).unwrap() {
                let text = tree.to_string();
                assert_eq!(text.parse::<RankTree>().unwrap(), tree, "{text}");
            }
        }
        assert_eq!(figure4().to_string().parse::<RankTree>().unwrap(), figure4());
        assert!("((2) 1)".parse::<RankTree>().is_err());
        assert!("(1 (3))".parse::<RankTree>().is_err());
        assert!("((1) 2".parse::<RankTree>().is_err());
        assert!("(1) x".parse::<RankTree>().is_err());
    }
}
