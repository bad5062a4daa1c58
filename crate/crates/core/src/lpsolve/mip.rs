use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::sync::Arc;

use super::simplex::{solve_from, SimplexOptions, WarmStart};
use super::{LinearProgram, SolveResult, Status};
use crate::error::Result;

#[derive(Debug, Clone, PartialEq)]
pub struct MipOptions {
    pub node_limit: usize,
    pub integrality_tol: f64,
    /// Relative gap below which a node cannot improve on the incumbent.
    pub prune_tol: f64,
    pub simplex: SimplexOptions,
    /// Branching priority per column (missing entries count as 0); among
    /// fractional columns the highest priority is branched on first.
    pub priority: Vec<u32>,
}

impl Default for MipOptions {
    fn default() -> Self {
        Self {
            node_limit: 100_000,
            integrality_tol: 1e-6,
            prune_tol: 1e-9,
            simplex: SimplexOptions::default(),
            priority: Vec::new(),
        }
    }
}

struct Node {
    bound: f64,
    seq: usize,
    bounds: Vec<(usize, f64, f64)>,
    warm: Option<Arc<WarmStart>>,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Node {}

impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Node {
    // BinaryHeap is a max-heap: the smallest bound, then the oldest node, pops first.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .bound
            .total_cmp(&self.bound)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

pub fn solve_mip(lp: &LinearProgram) -> Result<SolveResult> {
    solve_mip_with(lp, &MipOptions::default())
}

/// Best-first branch and bound on the most fractional integer column of
/// highest priority. Child nodes are warm-started from their parent's basis.
pub fn solve_mip_with(lp: &LinearProgram, options: &MipOptions) -> Result<SolveResult> {
    let integer: Vec<usize> = (0..lp.columns().len()).filter(|&j| lp.columns()[j].integer).collect();
    let mut heap = BinaryHeap::new();
    heap.push(Node {
        bound: f64::NEG_INFINITY,
        seq: 0,
        bounds: Vec::new(),
        warm: None,
    });
    let mut seq = 1;
    let mut incumbent: Option<(f64, Vec<f64>)> = None;
    let mut iterations = 0;
    let mut nodes = 0;
    let mut work = lp.clone();
    let priority = |j: usize| options.priority.get(j).copied().unwrap_or(0);
    let cutoff = |inc: &Option<(f64, Vec<f64>)>, value: f64| {
        inc.as_ref()
            .is_some_and(|(best, _)| value >= best - options.prune_tol * best.abs().max(1.0))
    };
    while let Some(node) = heap.pop() {
        if cutoff(&incumbent, node.bound) {
            continue;
        }
        if nodes >= options.node_limit {
            log::warn!("branch and bound stopped after {nodes} nodes");
            return Ok(finish(incumbent, Status::IterationLimit, iterations));
        }
        nodes += 1;
        for (j, c) in lp.columns().iter().enumerate() {
            work.set_bounds(j, c.lower, c.upper);
        }
        for &(j, lo, hi) in &node.bounds {
            work.set_bounds(j, lo, hi);
        }
        let (result, warm) = solve_from(&work, &options.simplex, node.warm.as_ref())?;
        iterations += result.iterations;
        match result.status {
            Status::Optimal => {}
            Status::Infeasible => continue,
            Status::Unbounded if nodes == 1 => return Ok(finish(None, Status::Unbounded, iterations)),
            Status::Unbounded => continue,
            Status::IterationLimit => {
                log::warn!("node LP hit the iteration limit; node dropped");
                continue;
            }
        }
        if cutoff(&incumbent, result.objective) {
            continue;
        }
        let branch = integer
            .iter()
            .map(|&j| {
                let v = result.x[j];
                (j, (v - v.floor()).min(v.ceil() - v))
            })
            .filter(|&(_, frac)| frac > options.integrality_tol)
            .max_by(|a, b| {
                priority(a.0)
                    .cmp(&priority(b.0))
                    .then(a.1.total_cmp(&b.1))
                    .then(b.0.cmp(&a.0))
            });
        match branch {
            None => {
                let mut x = result.x;
                for &j in &integer {
                    x[j] = x[j].round();
                }
                log::debug!("incumbent {} at node {nodes}", result.objective);
                incumbent = Some((result.objective, x));
            }
            Some((j, _)) => {
                let v = result.x[j];
                let (lo, hi) = current_bounds(lp, &node.bounds, j);
                for (clo, chi) in [(lo, v.floor()), (v.ceil(), hi)] {
                    let mut bounds = node.bounds.clone();
                    bounds.retain(|b| b.0 != j);
                    bounds.push((j, clo, chi));
                    heap.push(Node {
                        bound: result.objective,
                        seq,
                        bounds,
                        warm: warm.clone(),
                    });
                    seq += 1;
                }
            }
        }
    }
    log::debug!("branch and bound explored {nodes} nodes");
    let status = if incumbent.is_some() {
        Status::Optimal
    } else {
        Status::Infeasible
    };
    Ok(finish(incumbent, status, iterations))
}

fn current_bounds(lp: &LinearProgram, bounds: &[(usize, f64, f64)], j: usize) -> (f64, f64) {
    bounds
        .iter()
        .rev()
        .find(|b| b.0 == j)
        .map_or((lp.columns()[j].lower, lp.columns()[j].upper), |b| (b.1, b.2))
}

fn finish(incumbent: Option<(f64, Vec<f64>)>, status: Status, iterations: usize) -> SolveResult {
    match incumbent {
        Some((objective, x)) => SolveResult {
            status,
            objective,
            x,
            iterations,
        },
        None => SolveResult {
            status,
            objective: f64::NAN,
            x: Vec::new(),
            iterations,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lpsolve::{ColumnSpec, RowSense};
    use approx::assert_abs_diff_eq;

    #[test]
    fn knapsack() {
        // max 5a + 4b + 3c, 2a + 3b + c <= 5, 4a + b + 2c <= 11, 3a + 4b + 2c <= 8, binaries
        let mut lp = LinearProgram::new();
        let v: Vec<usize> = [5.0, 4.0, 3.0]
            .iter()
            .enumerate()
            .map(|(k, &c)| lp.add_column(ColumnSpec::binary(format!("x{k}"), -c)))
            .collect();
        lp.add_row(vec![(v[0], 2.0), (v[1], 3.0), (v[2], 1.0)], RowSense::Le, 5.0).unwrap();
        lp.add_row(vec![(v[0], 4.0), (v[1], 1.0), (v[2], 2.0)], RowSense::Le, 11.0).unwrap();
        lp.add_row(vec![(v[0], 3.0), (v[1], 4.0), (v[2], 2.0)], RowSense::Le, 8.0).unwrap();
        let r = solve_mip(&lp).unwrap();
        assert_eq!(r.status, Status::Optimal);
        // enumerate all 8 assignments
        let mut best = f64::INFINITY;
        for mask in 0..8u32 {
            let x: Vec<f64> = (0..3).map(|k| f64::from(mask >> k & 1)).collect();
            if lp.max_violation(&x) <= 1e-12 {
                best = best.min(lp.objective(&x));
            }
        }
        assert_abs_diff_eq!(r.objective, best, epsilon = 1e-9);
    }

    #[test]
    fn general_integer() {
        // min -x - y, 2x + 2y <= 7, x, y integer in [0, 10]
        let mut lp = LinearProgram::new();
        let mut col = |name: &str| {
            let mut c = ColumnSpec::continuous(name, 0.0, 10.0, -1.0);
            c.integer = true;
            lp.add_column(c)
        };
        let x = col("x");
        let y = col("y");
        lp.add_row(vec![(x, 2.0), (y, 2.0)], RowSense::Le, 7.0).unwrap();
        let relaxed = crate::lpsolve::solve_lp(&lp).unwrap();
        let r = solve_mip(&lp).unwrap();
        assert_abs_diff_eq!(r.objective, -3.0, epsilon = 1e-9);
        assert!(r.objective >= relaxed.objective - 1e-9);
    }

    #[test]
    fn integral_relaxation_is_returned() {
        let mut lp = LinearProgram::new();
        let x = lp.add_column(ColumnSpec::binary("x", 1.0));
        lp.add_row(vec![(x, 1.0)], RowSense::Ge, 1.0).unwrap();
        let r = solve_mip(&lp).unwrap();
        assert_eq!(r.x, vec![1.0]);
    }

    #[test]
    fn infeasible_integer() {
        let mut lp = LinearProgram::new();
        let x = lp.add_column(ColumnSpec::binary("x", 1.0));
        lp.add_row(vec![(x, 2.0)], RowSense::Eq, 1.0).unwrap();
        assert_eq!(solve_mip(&lp).unwrap().status, Status::Infeasible);
    }
}
