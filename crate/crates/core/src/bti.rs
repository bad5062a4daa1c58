//! Binary tree inequalities `cΣ >= Σ_t a_t u_t`, the convex envelope of the
//! summed start-up costs, and linear-time separation through Cartesian trees.

use crate::cost_model::{StartupCostModel, TimeGrid};
use crate::error::{Error, Result};
use crate::ranktree::{cartesian_tree_counted, RankTree, SubtreeSizes};
use crate::schedule::{clamp_unit_interval, FracPoint};

/// Default absolute violation a point must exceed before a cut is reported.
pub const SEPARATION_TOL: f64 = 1e-9;

/// Offline lengths `Δ(L(t))`, `Δ(R(t))` and `Δ(S(t))` of the subtrees of every node.
#[derive(Debug, Clone, PartialEq)]
pub struct SubtreeOfflineLengths {
    left: Vec<f64>,
    right: Vec<f64>,
    principal: Vec<f64>,
}

impl SubtreeOfflineLengths {
    pub fn left(&self, t: usize) -> f64 {
        self.left[t]
    }

    pub fn right(&self, t: usize) -> f64 {
        self.right[t]
    }

    pub fn principal(&self, t: usize) -> f64 {
        self.principal[t]
    }
}

fn check_dimension(tree: &RankTree, grid: &TimeGrid) -> Result<()> {
    if tree.len() != grid.periods() {
        return Err(Error::Dimension(format!(
            "tree has {} nodes, grid has {} periods",
            tree.len(),
            grid.periods()
        )));
    }
    Ok(())
}

pub fn subtree_offline_lengths(tree: &RankTree, grid: &TimeGrid) -> Result<SubtreeOfflineLengths> {
    check_dimension(tree, grid)?;
    Ok(offline_lengths_with(&tree.subtree_sizes(), grid, &grid.offline_prefix()))
}

fn offline_lengths_with(sizes: &SubtreeSizes, grid: &TimeGrid, prefix: &[f64]) -> SubtreeOfflineLengths {
    let n = grid.periods();
    let mut left = vec![0.0; n + 1];
    let mut right = vec![0.0; n + 1];
    let mut principal = vec![0.0; n + 1];
    for t in 1..=n {
        let (lambda, rho) = (sizes.left(t), sizes.right(t));
        left[t] = if lambda < t - 1 {
            prefix[t] - prefix[t - lambda]
        } else {
            prefix[t]
        };
        right[t] = prefix[t + rho + 1] - prefix[t + 1];
        principal[t] = left[t] + right[t] + grid.period_length(t);
    }
    SubtreeOfflineLengths {
        left,
        right,
        principal,
    }
}

/// A binary tree inequality together with the tree that induces it.
#[derive(Debug, Clone, PartialEq)]
pub struct BtiCut {
    coefficients: Vec<f64>,
    tree: RankTree,
}

impl BtiCut {
    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn tree(&self) -> &RankTree {
        &self.tree
    }

    /// Right-hand side `Σ_t a_t u_t`.
    pub fn rhs(&self, u: &[f64]) -> f64 {
        self.coefficients.iter().zip(u).map(|(a, x)| a * x).sum()
    }

    pub fn into_parts(self) -> (Vec<f64>, RankTree) {
        (self.coefficients, self.tree)
    }
}

/// Coefficients `a_t = ΔΣ^t(λ(t), ρ(t))` of the inequality induced by `tree`.
pub fn coefficients(tree: &RankTree, cost: &StartupCostModel, grid: &TimeGrid) -> Result<BtiCut> {
    check_dimension(tree, grid)?;
    let mut work = 0;
    let coefficients = coefficients_with(tree, &tree.subtree_sizes(), cost, grid, &mut work);
    Ok(BtiCut {
        coefficients,
        tree: tree.clone(),
    })
}

fn coefficients_with(
    tree: &RankTree,
    sizes: &SubtreeSizes,
    cost: &StartupCostModel,
    grid: &TimeGrid,
    work: &mut usize,
) -> Vec<f64> {
    let n = tree.len();
    let prefix = grid.offline_prefix();
    let lengths = offline_lengths_with(sizes, grid, &prefix);
    *work += 2 * n;
    (1..=n)
        .map(|t| {
            let own = cost.value(lengths.left(t));
            if t + sizes.right(t) < n {
                own + cost.value(lengths.right(t)) - cost.value(lengths.principal(t))
            } else {
                own
            }
        })
        .collect()
}

/// Convex envelope value together with the Cartesian tree certifying it.
#[derive(Debug, Clone, PartialEq)]
pub struct Envelope {
    pub value: f64,
    pub cut: BtiCut,
}

/// `LCU^Σ(u)`, the value of the convex envelope of the summed start-up costs.
pub fn envelope(u: &[f64], cost: &StartupCostModel, grid: &TimeGrid) -> Result<f64> {
    envelope_certified(u, cost, grid).map(|e| e.value)
}

pub fn envelope_certified(u: &[f64], cost: &StartupCostModel, grid: &TimeGrid) -> Result<Envelope> {
    if u.len() != grid.periods() {
        return Err(Error::Dimension(format!(
            "point has {} periods, grid has {}",
            u.len(),
            grid.periods()
        )));
    }
    let u = clamp_unit_interval(u)?;
    let (cut, _) = cartesian_cut(&u, cost, grid)?;
    Ok(Envelope {
        value: cut.rhs(&u),
        cut,
    })
}

fn cartesian_cut(u: &[f64], cost: &StartupCostModel, grid: &TimeGrid) -> Result<(BtiCut, usize)> {
    let (tree, stack) = cartesian_tree_counted(u)?;
    let sizes = tree.subtree_sizes();
    let mut work = stack.total() + 2 * tree.len();
    let coefficients = coefficients_with(&tree, &sizes, cost, grid, &mut work);
    work += tree.len();
    Ok((BtiCut { coefficients, tree }, work))
}

/// How large a violation must be before a cut is reported.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Threshold {
    Absolute(f64),
    /// Violation relative to `max(1, |Σ a_t u_t|)`.
    Relative(f64),
}

impl Default for Threshold {
    fn default() -> Self {
        Threshold::Absolute(SEPARATION_TOL)
    }
}

impl Threshold {
    fn exceeded(self, violation: f64, rhs: f64) -> bool {
        match self {
            Threshold::Absolute(tol) => violation > tol,
            Threshold::Relative(tol) => violation > tol * rhs.abs().max(1.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ViolatedCut {
    pub cut: BtiCut,
    pub rhs_at_point: f64,
    pub violation: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Separation {
    InEpigraph,
    Violated(ViolatedCut),
}

impl Separation {
    pub fn is_violated(&self) -> bool {
        matches!(self, Separation::Violated(_))
    }
}

/// Exact separation with the default absolute threshold.
pub fn separate(point: &FracPoint, cost: &StartupCostModel, grid: &TimeGrid) -> Result<Separation> {
    separate_counted(point, cost, grid, Threshold::default()).map(|(s, _)| s)
}

pub fn separate_with(
    point: &FracPoint,
    cost: &StartupCostModel,
    grid: &TimeGrid,
    threshold: Threshold,
) -> Result<Separation> {
    separate_counted(point, cost, grid, threshold).map(|(s, _)| s)
}

/// Separation that also returns the number of elementary steps it took
/// (stack operations, sweep steps and coefficient evaluations).
pub fn separate_counted(
    point: &FracPoint,
    cost: &StartupCostModel,
    grid: &TimeGrid,
    threshold: Threshold,
) -> Result<(Separation, usize)> {
    if point.periods() != grid.periods() {
        return Err(Error::Dimension(format!(
            "point has {} periods, grid has {}",
            point.periods(),
            grid.periods()
        )));
    }
    let (cut, work) = cartesian_cut(point.u(), cost, grid)?;
    let rhs = cut.rhs(point.u());
    let violation = rhs - point.c_sigma();
    let verdict = if threshold.exceeded(violation, rhs) {
        Separation::Violated(ViolatedCut {
            cut,
            rhs_at_point: rhs,
            violation,
        })
    } else {
        Separation::InEpigraph
    };
    Ok((verdict, work))
}
