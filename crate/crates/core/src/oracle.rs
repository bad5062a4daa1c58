//! Brute-force ground truth at desk scale: vertex and tree enumeration,
//! facet census and exhaustive checks of the BTI theorems.
//!
//! Everything here recomputes from definitions (direct offline-length sums,
//! recursive subtree counts) and deliberately shares no code with the
//! linear-time paths in [`crate::bti`].


use rayon::prelude::*;
use serde::Serialize;

use crate::cost_model::{discrete_cost, StartupCostModel, TimeGrid};
use crate::error::{Error, Result};
use crate::lpsolve::{solve_lp, ColumnSpec, LinearProgram, RowSense, Status};
use crate::ranktree::{enumerate_trees, RankTree};
use crate::schedule::Schedule;

pub const VERTEX_CAP: usize = 20;
pub const TREE_CAP: usize = 12;
pub const CENSUS_CAP: usize = 9;
pub const EQUALITY_CAP: usize = 8;
pub const IRREDUNDANCY_CAP: usize = 7;
pub const HULL_CAP: usize = 10;

/// Absolute tolerance for tightness, duplicates and rank decisions.
pub const ORACLE_TOL: f64 = 1e-9;

/// Counterexample lists in reports are truncated to this many entries.
const REPORT_LIMIT: usize = 20;

fn check_cap(what: &'static str, size: usize, cap: usize) -> Result<()> {
    if size > cap {
        return Err(Error::CapExceeded { what, size, cap });
    }
    Ok(())
}

/// `CU^{t,l}` for all valid `(t, l)` from directly summed offline lengths.
struct CostTable {
    rows: Vec<Vec<f64>>,
}

impl CostTable {
    fn new(cost: &StartupCostModel, grid: &TimeGrid) -> Result<Self> {
        let rows = (1..=grid.periods())
            .map(|t| (0..t).map(|l| discrete_cost(cost, grid, t, l)).collect())
            .collect::<Result<_>>()?;
        Ok(Self { rows })
    }

    fn get(&self, t: usize, l: usize) -> f64 {
        self.rows[t - 1][l]
    }

    fn periods(&self) -> usize {
        self.rows.len()
    }

    fn delta(&self, t: usize, l: usize, r: usize) -> f64 {
        let own = self.get(t, l);
        if t + r < self.periods() {
            own + self.get(t + r + 1, r) - self.get(t + r + 1, l + r + 1)
        } else {
            own
        }
    }

    /// Summed start-up cost of a schedule given as a bitmask (bit `t-1` is period `t`).
    fn dcu(&self, mask: u64) -> f64 {
        let mut total = 0.0;
        let mut run = 0;
        for t in 1..=self.periods() {
            if mask >> (t - 1) & 1 == 1 {
                total += self.get(t, run);
                run = 0;
            } else {
                run += 1;
            }
        }
        total
    }
}

fn subtree_count(tree: &RankTree, node: Option<usize>) -> usize {
    node.map_or(0, |t| {
        1 + subtree_count(tree, tree.left_child(t)) + subtree_count(tree, tree.right_child(t))
    })
}

fn tree_coefficients(tree: &RankTree, costs: &CostTable) -> Vec<f64> {
    (1..=tree.len())
        .map(|t| {
            let l = subtree_count(tree, tree.left_child(t));
            let r = subtree_count(tree, tree.right_child(t));
            costs.delta(t, l, r)
        })
        .collect()
}

fn dot(a: &[f64], u: &[f64]) -> f64 {
    a.iter().zip(u).map(|(x, y)| x * y).sum()
}

fn mask_dot(a: &[f64], mask: u64) -> f64 {
    a.iter()
        .enumerate()
        .filter(|(k, _)| mask >> k & 1 == 1)
        .map(|(_, x)| x)
        .sum()
}

/// All points `(u, DCU^Σ(u))` for `u ∈ {0,1}^T`.
#[derive(Debug, Clone)]
pub struct VertexSet {
    vertices: Vec<(Schedule, f64)>,
}

impl VertexSet {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &(Schedule, f64)> {
        self.vertices.iter()
    }
}

pub fn enumerate_vertices(cost: &StartupCostModel, grid: &TimeGrid) -> Result<VertexSet> {
    let n = grid.periods();
    check_cap("vertex enumeration", n, VERTEX_CAP)?;
    let costs = CostTable::new(cost, grid)?;
    let vertices = (0..1u64 << n)
        .map(|mask| (Schedule::from_mask(n, mask), costs.dcu(mask)))
        .collect();
    Ok(VertexSet { vertices })
}

/// Coefficient vectors of every rank-labeled tree on the grid's periods.
pub struct TreeCoefficients {
    trees: Vec<RankTree>,
    coefficients: Vec<Vec<f64>>,
}

impl TreeCoefficients {
    pub fn new(cost: &StartupCostModel, grid: &TimeGrid) -> Result<Self> {
        let n = grid.periods();
        check_cap("tree enumeration", n, TREE_CAP)?;
        let costs = CostTable::new(cost, grid)?;
        let trees: Vec<RankTree> = enumerate_trees(n)?.collect();
        let coefficients = trees.par_iter().map(|tree| tree_coefficients(tree, &costs)).collect();
        Ok(Self { trees, coefficients })
    }

    pub fn len(&self) -> usize {
        self.trees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trees.is_empty()
    }

    pub fn trees(&self) -> &[RankTree] {
        &self.trees
    }

    pub fn coefficients(&self) -> &[Vec<f64>] {
        &self.coefficients
    }

    /// `max_B a_B · u` with the index of a maximizing tree.
    pub fn max_rhs(&self, u: &[f64]) -> (f64, usize) {
        self.coefficients
            .iter()
            .enumerate()
            .map(|(k, a)| (dot(a, u), k))
            .fold((f64::NEG_INFINITY, 0), |best, cur| if cur.0 > best.0 { cur } else { best })
    }
}

/// Maximum right-hand side over all binary tree inequalities at `u`.
pub fn max_rhs_over_trees(u: &[f64], cost: &StartupCostModel, grid: &TimeGrid) -> Result<f64> {
    if u.len() != grid.periods() {
        return Err(Error::Dimension(format!(
            "point has {} periods, grid has {}",
            u.len(),
            grid.periods()
        )));
    }
    Ok(TreeCoefficients::new(cost, grid)?.max_rhs(u).0)
}

/// Minimum of `Σ α_j DCU^Σ(v_j)` over convex combinations of binary
/// schedules `v_j` with `Σ α_j v_j = u`, solved as an LP.
pub fn hull_value(u: &[f64], cost: &StartupCostModel, grid: &TimeGrid) -> Result<f64> {
    let n = grid.periods();
    check_cap("convex hull oracle", n, HULL_CAP)?;
    if u.len() != n {
        return Err(Error::Dimension(format!("point has {} periods, grid has {n}", u.len())));
    }
    let costs = CostTable::new(cost, grid)?;
    let mut lp = LinearProgram::new();
    let cols: Vec<usize> = (0..1u64 << n)
        .map(|mask| lp.add_column(ColumnSpec::continuous(format!("a{mask}"), 0.0, f64::INFINITY, costs.dcu(mask))))
        .collect();
    for t in 0..n {
        let row: Vec<(usize, f64)> = cols
            .iter()
            .enumerate()
            .filter(|(mask, _)| mask >> t & 1 == 1)
            .map(|(_, &c)| (c, 1.0))
            .collect();
        lp.add_row(row, RowSense::Eq, u[t])?;
    }
    lp.add_row(cols.iter().map(|&c| (c, 1.0)).collect(), RowSense::Eq, 1.0)?;
    let result = solve_lp(&lp)?;
    match result.status {
        Status::Optimal => Ok(result.objective),
        other => Err(Error::Domain(format!("hull LP ended with status {other:?}"))),
    }
}

/// One tree/schedule pair that contradicts a checked statement.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Counterexample {
    pub tree: String,
    pub schedule: String,
    pub dcu: f64,
    pub rhs: f64,
}

impl Counterexample {
    fn new(tree: &RankTree, n: usize, mask: u64, dcu: f64, rhs: f64) -> Self {
        Self {
            tree: tree.to_string(),
            schedule: Schedule::from_mask(n, mask).to_string(),
            dcu,
            rhs,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidityReport {
    pub periods: usize,
    pub trees: usize,
    pub schedules: u64,
    pub violations: usize,
    pub examples: Vec<Counterexample>,
}

impl ValidityReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// Checks `DCU^Σ(u) >= a_B · u` for every tree and every binary schedule.
pub fn verify_validity(cost: &StartupCostModel, grid: &TimeGrid) -> Result<ValidityReport> {
    let n = grid.periods();
    check_cap("validity sweep", n, EQUALITY_CAP)?;
    let table = TreeCoefficients::new(cost, grid)?;
    let costs = CostTable::new(cost, grid)?;
    let dcu: Vec<f64> = (0..1u64 << n).map(|m| costs.dcu(m)).collect();
    let found: Vec<Counterexample> = table
        .trees
        .par_iter()
        .zip(&table.coefficients)
        .flat_map_iter(|(tree, a)| {
            let dcu = &dcu;
            (0..1u64 << n).filter_map(move |mask| {
                let rhs = mask_dot(a, mask);
                (dcu[mask as usize] < rhs - ORACLE_TOL)
                    .then(|| Counterexample::new(tree, n, mask, dcu[mask as usize], rhs))
            })
        })
        .collect();
    Ok(ValidityReport {
        periods: n,
        trees: table.len(),
        schedules: 1 << n,
        violations: found.len(),
        examples: found.into_iter().take(REPORT_LIMIT).collect(),
    })
}

/// True iff `u = 0` or the nodes switched on in `u` form a subtree of `tree`
/// that contains the root.
pub fn induces_rooted_subtree(tree: &RankTree, mask: u64) -> bool {
    if mask == 0 {
        return true;
    }
    let on = |t: usize| mask >> (t - 1) & 1 == 1;
    if !on(tree.root()) {
        return false;
    }
    let parents = tree.parents();
    (1..=tree.len()).all(|t| !on(t) || parents[t].is_none_or(on))
}

#[derive(Debug, Clone, Serialize)]
pub struct EqualityReport {
    pub periods: usize,
    pub strictly_concave: bool,
    pub pairs: u64,
    /// Rooted-subtree schedules that are not tight.
    pub if_failures: usize,
    /// Tight schedules that do not induce a rooted subtree.
    pub only_if_failures: usize,
    pub if_examples: Vec<Counterexample>,
    pub only_if_examples: Vec<Counterexample>,
}

impl EqualityReport {
    pub fn passed(&self) -> bool {
        self.if_failures == 0 && self.only_if_failures == 0
    }
}

/// Checks that a schedule is tight for a tree's inequality exactly when it
/// is zero or switches on a rooted subtree.
pub fn verify_equality_characterization(
    cost: &StartupCostModel,
    grid: &TimeGrid,
) -> Result<EqualityReport> {
    let n = grid.periods();
    check_cap("equality characterization", n, EQUALITY_CAP)?;
    let table = TreeCoefficients::new(cost, grid)?;
    let costs = CostTable::new(cost, grid)?;
    let dcu: Vec<f64> = (0..1u64 << n).map(|m| costs.dcu(m)).collect();
    let (if_found, only_if_found): (Vec<_>, Vec<_>) = table
        .trees
        .par_iter()
        .zip(&table.coefficients)
        .flat_map_iter(|(tree, a)| {
            let dcu = &dcu;
            (0..1u64 << n).filter_map(move |mask| {
                let rhs = mask_dot(a, mask);
                let tight = (dcu[mask as usize] - rhs).abs() <= ORACLE_TOL;
                let rooted = induces_rooted_subtree(tree, mask);
                (tight != rooted).then(|| (rooted, Counterexample::new(tree, n, mask, dcu[mask as usize], rhs)))
            })
        })
        .partition_map(|(rooted, ce)| {
            if rooted {
                rayon::iter::Either::Left(ce)
            } else {
                rayon::iter::Either::Right(ce)
            }
        });
    Ok(EqualityReport {
        periods: n,
        strictly_concave: cost.strictly_concave(),
        pairs: table.len() as u64 * (1u64 << n),
        if_failures: if_found.len(),
        only_if_failures: only_if_found.len(),
        if_examples: if_found.into_iter().take(REPORT_LIMIT).collect(),
        only_if_examples: only_if_found.into_iter().take(REPORT_LIMIT).collect(),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct IrredundancyReport {
    pub periods: usize,
    pub ordered_pairs: u64,
    pub by_construction: u64,
    pub by_search: u64,
    pub failures: usize,
    pub failing_pairs: Vec<(String, String)>,
}

impl IrredundancyReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

/// The vertex from the irredundancy argument: the unit vector at the root of
/// `b1` when the roots differ, otherwise the root path of `b1` down to the
/// shallowest node whose parent differs in `b2`.
fn distinguishing_mask(b1: &RankTree, b2: &RankTree, p1: &[Option<usize>], p2: &[Option<usize>], depth1: &[usize]) -> Option<u64> {
    if b1.root() != b2.root() {
        return Some(1 << (b1.root() - 1));
    }
    let t = (1..=b1.len())
        .filter(|&t| p1[t] != p2[t])
        .min_by_key(|&t| depth1[t])?;
    let mut mask = 1u64 << (t - 1);
    let mut cur = p1[t];
    while let Some(p) = cur {
        mask |= 1 << (p - 1);
        cur = p1[p];
    }
    Some(mask)
}

/// For every ordered pair of distinct trees, finds a vertex tight for the
/// first inequality and slack for the second.
pub fn verify_irredundancy(cost: &StartupCostModel, grid: &TimeGrid) -> Result<IrredundancyReport> {
    let n = grid.periods();
    check_cap("irredundancy check", n, IRREDUNDANCY_CAP)?;
    let table = TreeCoefficients::new(cost, grid)?;
    let costs = CostTable::new(cost, grid)?;
    let dcu: Vec<f64> = (0..1u64 << n).map(|m| costs.dcu(m)).collect();
    let parents: Vec<_> = table.trees.iter().map(RankTree::parents).collect();
    let depths: Vec<_> = table.trees.iter().map(RankTree::depths).collect();
    let tight = |k: usize, mask: u64| (dcu[mask as usize] - mask_dot(&table.coefficients[k], mask)).abs() <= ORACLE_TOL;
    let slack = |k: usize, mask: u64| dcu[mask as usize] - mask_dot(&table.coefficients[k], mask) > ORACLE_TOL;
    let m = table.len();
    let outcomes: Vec<(usize, usize, u8)> = (0..m)
        .into_par_iter()
        .flat_map_iter(|i| {
            let (parents, depths, trees) = (&parents, &depths, &table.trees);
            (0..m).filter(move |&j| j != i).map(move |j| {
                let constructed = distinguishing_mask(&trees[i], &trees[j], &parents[i], &parents[j], &depths[i]);
                if constructed.is_some_and(|mask| tight(i, mask) && slack(j, mask)) {
                    (i, j, 0)
                } else if (0..1u64 << n).any(|mask| tight(i, mask) && slack(j, mask)) {
                    (i, j, 1)
                } else {
                    (i, j, 2)
                }
            })
        })
        .collect();
    let count = |kind: u8| outcomes.iter().filter(|o| o.2 == kind).count();
    let failing_pairs = outcomes
        .iter()
        .filter(|o| o.2 == 2)
        .take(REPORT_LIMIT)
        .map(|&(i, j, _)| (table.trees[i].to_string(), table.trees[j].to_string()))
        .collect();
    Ok(IrredundancyReport {
        periods: n,
        ordered_pairs: outcomes.len() as u64,
        by_construction: count(0) as u64,
        by_search: count(1) as u64,
        failures: count(2),
        failing_pairs,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct FacetCensus {
    pub periods: usize,
    pub trees: usize,
    pub distinct_btis: usize,
    pub facet_confirmed: usize,
    /// Trees whose coefficient vector repeats that of an earlier tree.
    pub duplicates: Vec<(String, String)>,
    /// Bound facets `u_t >= 0` and `u_t <= 1`.
    pub trivial: usize,
    pub total: usize,
}

fn find(parent: &mut [usize], mut k: usize) -> usize {
    while parent[k] != k {
        parent[k] = parent[parent[k]];
        k = parent[k];
    }
    k
}

/// Groups coefficient vectors that agree componentwise within `ORACLE_TOL`;
/// returns the representative index of every vector.
fn group_duplicates(vectors: &[Vec<f64>]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..vectors.len()).collect();
    order.sort_by(|&a, &b| vectors[a][0].total_cmp(&vectors[b][0]).then(a.cmp(&b)));
    let mut parent: Vec<usize> = (0..vectors.len()).collect();
    for (pos, &i) in order.iter().enumerate() {
        for &j in &order[pos + 1..] {
            if vectors[j][0] - vectors[i][0] > ORACLE_TOL {
                break;
            }
            if vectors[i].iter().zip(&vectors[j]).all(|(x, y)| (x - y).abs() <= ORACLE_TOL) {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                let (lo, hi) = (ri.min(rj), ri.max(rj));
                parent[hi] = lo;
            }
        }
    }
    (0..vectors.len()).map(|k| find(&mut parent, k)).collect()
}

/// Rank of a row set by Gaussian elimination with partial pivoting.
pub fn matrix_rank(rows: &[Vec<f64>], tol: f64) -> usize {
    let mut m: Vec<Vec<f64>> = rows.to_vec();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        if rank == m.len() {
            break;
        }
        let (pivot, value) = (rank..m.len())
            .map(|r| (r, m[r][c].abs()))
            .fold((rank, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if value <= tol {
            continue;
        }
        m.swap(rank, pivot);
        for r in rank + 1..m.len() {
            let factor = m[r][c] / m[rank][c];
            if factor != 0.0 {
                for k in c..cols {
                    m[r][k] -= factor * m[rank][k];
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Counts distinct tree inequalities and confirms each is a facet by finding
/// `T + 1` affinely independent tight points among the vertices.
pub fn facet_census(cost: &StartupCostModel, grid: &TimeGrid) -> Result<FacetCensus> {
    let n = grid.periods();
    check_cap("facet census", n, CENSUS_CAP)?;
    let table = TreeCoefficients::new(cost, grid)?;
    let costs = CostTable::new(cost, grid)?;
    let dcu: Vec<f64> = (0..1u64 << n).map(|m| costs.dcu(m)).collect();
    let reps = group_duplicates(&table.coefficients);
    let mut duplicates = Vec::new();
    for (k, &rep) in reps.iter().enumerate() {
        if rep != k {
            duplicates.push((table.trees[rep].to_string(), table.trees[k].to_string()));
        }
    }
    let distinct: Vec<usize> = (0..table.len()).filter(|&k| reps[k] == k).collect();
    let confirmed = distinct
        .par_iter()
        .filter(|&&k| {
            let a = &table.coefficients[k];
            // the zero vertex is tight for every inequality; with it as the
            // affine base, T more points are needed with linearly independent offsets
            let offsets: Vec<Vec<f64>> = (1..1u64 << n)
                .filter(|&mask| (dcu[mask as usize] - mask_dot(a, mask)).abs() <= ORACLE_TOL)
                .map(|mask| {
                    let mut row: Vec<f64> = (0..n).map(|t| (mask >> t & 1) as f64).collect();
                    row.push(dcu[mask as usize]);
                    row
                })
                .collect();
            matrix_rank(&offsets, ORACLE_TOL) == n
        })
        .count();
    Ok(FacetCensus {
        periods: n,
        trees: table.len(),
        distinct_btis: distinct.len(),
        facet_confirmed: confirmed,
        duplicates,
        trivial: 2 * n,
        total: confirmed + 2 * n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bti;
    use approx::assert_abs_diff_eq;

    fn exp() -> StartupCostModel {
        StartupCostModel::exponential(25.0, 8.0, 0.3).unwrap()
    }

    fn linear() -> StartupCostModel {
        StartupCostModel::tabulated(vec![(0.0, 0.0), (100.0, 100.0)]).unwrap()
    }

    #[test]
    fn vertices() {
        let grid = TimeGrid::uniform(1, 2.0).unwrap();
        let v = enumerate_vertices(&exp(), &grid).unwrap();
        let pairs: Vec<_> = v.iter().map(|(s, c)| (s.to_string(), *c)).collect();
        assert_eq!(pairs, vec![("0".to_string(), 0.0), ("1".to_string(), exp().eval(2.0).unwrap())]);
        let grid = TimeGrid::uniform(5, 0.0).unwrap();
        assert_eq!(enumerate_vertices(&exp(), &grid).unwrap().len(), 32);
        let big = TimeGrid::uniform(21, 0.0).unwrap();
        assert!(matches!(enumerate_vertices(&exp(), &big), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn census_small() {
        let grid = TimeGrid::uniform(3, 1.0).unwrap();
        let census = facet_census(&exp(), &grid).unwrap();
        assert_eq!((census.distinct_btis, census.facet_confirmed, census.total), (5, 5, 11));
        let flat = facet_census(&linear(), &grid).unwrap();
        assert!(flat.distinct_btis < 5);
        assert!(!flat.duplicates.is_empty());
    }

    #[test]
    fn equality_and_irredundancy() {
        let grid = TimeGrid::uniform(4, 1.0).unwrap();
        assert!(verify_validity(&exp(), &grid).unwrap().passed());
        assert!(verify_equality_characterization(&exp(), &grid).unwrap().passed());
        let irr = verify_irredundancy(&exp(), &grid).unwrap();
        assert_eq!(irr.ordered_pairs, 14 * 13);
        assert!(irr.passed());
        let grid = TimeGrid::uniform(3, 1.0).unwrap();
        let lin = verify_equality_characterization(&linear(), &grid).unwrap();
        assert_eq!(lin.if_failures, 0);
        assert!(lin.only_if_failures > 0);
    }

    #[test]
    fn max_rhs_agrees_with_envelope() {
        let grid = TimeGrid::new(vec![1.0, 2.0, 0.5, 1.0, 1.5], 2.0).unwrap();
        let u = [0.3, 0.8, 0.0, 0.55, 1.0];
        let brute = max_rhs_over_trees(&u, &exp(), &grid).unwrap();
        assert_abs_diff_eq!(brute, bti::envelope(&u, &exp(), &grid).unwrap(), epsilon = 1e-9);
        assert_eq!(max_rhs_over_trees(&[0.0; 5], &exp(), &grid).unwrap(), 0.0);
    }

    #[test]
    fn hull_matches_envelope() {
        let grid = TimeGrid::uniform(4, 1.0).unwrap();
        let u = [0.25, 0.5, 1.0, 0.75];
        let hull = hull_value(&u, &exp(), &grid).unwrap();
        assert_abs_diff_eq!(hull, bti::envelope(&u, &exp(), &grid).unwrap(), epsilon = 1e-7);
    }

    #[test]
    fn rank() {
        let rows = vec![vec![1.0, 0.0, 1.0], vec![0.0, 1.0, 1.0], vec![1.0, 1.0, 2.0]];
        assert_eq!(matrix_rank(&rows, 1e-9), 2);
        assert_eq!(matrix_rank(&[], 1e-9), 0);
    }
}
