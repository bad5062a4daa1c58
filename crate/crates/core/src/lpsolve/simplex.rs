use std::sync::Arc;

use nalgebra::DMatrix;

use super::{LinearProgram, RowSense, SolveResult, Status, FEASIBILITY_RESIDUAL};
use crate::error::{Error, Result};

const PIVOT_TOL: f64 = 1e-9;
const OPTIMALITY_TOL: f64 = 1e-9;
const FEASIBILITY_TOL: f64 = 1e-9;
const DEGENERATE_STEP: f64 = 1e-12;
/// Reduced-cost slack tolerated when a warm start is accepted as dual feasible.
const WARM_DUAL_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimplexOptions {
    pub max_iterations: usize,
    /// Consecutive degenerate pivots before switching to Bland's rule.
    pub bland_after: usize,
    /// Pivots between refactorizations of the basis.
    pub refactor_every: usize,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self {
            max_iterations: 200_000,
            bland_after: 50,
            refactor_every: 100,
        }
    }
}

/// Optimal basis of a solved LP, used to warm-start a problem that differs
/// only in column bounds.
#[derive(Debug, Clone)]
pub(crate) struct WarmStart {
    basis: Vec<usize>,
    x: Vec<f64>,
    art_sign: Vec<f64>,
}

pub fn solve_lp(lp: &LinearProgram) -> Result<SolveResult> {
    solve_lp_with(lp, &SimplexOptions::default())
}

/// Solves the LP relaxation of `lp` (integrality markers are ignored).
pub fn solve_lp_with(lp: &LinearProgram, options: &SimplexOptions) -> Result<SolveResult> {
    solve_from(lp, options, None).map(|(r, _)| r)
}

/// Solves `lp`, starting from `warm` with the dual simplex when given. The
/// returned warm start is set for optimal solves.
pub(crate) fn solve_from(
    lp: &LinearProgram,
    options: &SimplexOptions,
    warm: Option<&Arc<WarmStart>>,
) -> Result<(SolveResult, Option<Arc<WarmStart>>)> {
    for c in lp.columns() {
        if c.lower == f64::INFINITY || c.upper == f64::NEG_INFINITY || c.lower.is_nan() || c.upper.is_nan() {
            return Err(Error::Config(format!(
                "column {} has unusable bounds [{}, {}]",
                c.name, c.lower, c.upper
            )));
        }
        if c.lower > c.upper {
            let result = SolveResult {
                status: Status::Infeasible,
                objective: f64::NAN,
                x: Vec::new(),
                iterations: 0,
            };
            return Ok((result, None));
        }
    }
    let warm_run = warm.and_then(|w| {
        let mut tableau = Tableau::warm(lp, w)?;
        let status = tableau.solve_dual(options)?;
        Some((tableau, status))
    });
    let (tableau, status) = match warm_run {
        // A dual ray found from a drifted basis is confirmed from scratch.
        Some((tableau, status)) if status != Status::Infeasible => (tableau, status),
        _ => {
            let mut tableau = Tableau::new(lp);
            let status = tableau.solve(options);
            (tableau, status)
        }
    };
    let x = tableau.x[..tableau.n].to_vec();
    let objective = if status == Status::Optimal {
        lp.objective(&x)
    } else {
        f64::NAN
    };
    let mut next = None;
    if status == Status::Optimal {
        let residual = lp.max_violation(&x);
        if residual > FEASIBILITY_RESIDUAL {
            log::warn!("simplex finished with residual {residual:.3e}");
        }
        next = Some(Arc::new(WarmStart {
            basis: tableau.basis.clone(),
            x: tableau.x.clone(),
            art_sign: tableau.art_sign.clone(),
        }));
    }
    let result = SolveResult {
        status,
        objective,
        x,
        iterations: tableau.iterations,
    };
    Ok((result, next))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Phase {
    One,
    Two,
}

/// Dense tableau `B^{-1} [A | I]` over structural and slack columns. Each
/// row `i` reads `a_i x + s_i (+ σ_i z_i) = b_i`; the artificial `z_i` only
/// exists for rows whose initial slack value is out of bounds, and its
/// column `σ_i e_i` is never stored since artificials never re-enter.
struct Tableau {
    m: usize,
    n: usize,
    cols: usize,
    /// Row-scaled structural columns, sparse.
    acol: Vec<Vec<(usize, f64)>>,
    b: Vec<f64>,
    t: Vec<f64>,
    lo: Vec<f64>,
    hi: Vec<f64>,
    x: Vec<f64>,
    cost: Vec<f64>,
    d: Vec<f64>,
    basis: Vec<usize>,
    is_basic: Vec<bool>,
    art_sign: Vec<f64>,
    objective: Vec<f64>,
    iterations: usize,
    since_refactor: usize,
}

impl Tableau {
    /// Scaled data and bounds with every structural column at a bound.
    fn skeleton(lp: &LinearProgram) -> Self {
        let m = lp.rows().len();
        let n = lp.columns().len();
        let cols = n + m;
        let total = cols + m;
        let mut acol = vec![Vec::new(); n];
        let mut b = vec![0.0; m];
        for (i, row) in lp.rows().iter().enumerate() {
            let scale = row.coeffs.iter().map(|c| c.1.abs()).fold(0.0, f64::max);
            let scale = if scale > 0.0 { 1.0 / scale } else { 1.0 };
            for &(j, v) in &row.coeffs {
                acol[j].push((i, v * scale));
            }
            b[i] = row.rhs * scale;
        }
        let mut lo = vec![0.0; total];
        let mut hi = vec![0.0; total];
        let mut x = vec![0.0; total];
        for (j, c) in lp.columns().iter().enumerate() {
            lo[j] = c.lower;
            hi[j] = c.upper;
            x[j] = if c.lower.is_finite() {
                c.lower
            } else if c.upper.is_finite() {
                c.upper
            } else {
                0.0
            };
        }
        for (i, row) in lp.rows().iter().enumerate() {
            (lo[n + i], hi[n + i]) = match row.sense {
                RowSense::Le => (0.0, f64::INFINITY),
                RowSense::Ge => (f64::NEG_INFINITY, 0.0),
                RowSense::Eq => (0.0, 0.0),
            };
        }
        Self {
            m,
            n,
            cols,
            acol,
            b,
            t: vec![0.0; m * cols],
            lo,
            hi,
            x,
            cost: vec![0.0; total],
            d: vec![0.0; cols],
            basis: Vec::with_capacity(m),
            is_basic: vec![false; total],
            art_sign: vec![0.0; m],
            objective: lp.columns().iter().map(|c| c.cost).collect(),
            iterations: 0,
            since_refactor: 0,
        }
    }

    /// Slack basis, with an artificial for each row whose slack would be
    /// out of bounds.
    fn new(lp: &LinearProgram) -> Self {
        let mut t = Self::skeleton(lp);
        let (m, n, cols) = (t.m, t.n, t.cols);
        let mut activity = vec![0.0; m];
        for j in 0..n {
            if t.x[j] != 0.0 {
                for &(i, v) in &t.acol[j] {
                    activity[i] += v * t.x[j];
                }
            }
        }
        for i in 0..m {
            let s = n + i;
            let residual = t.b[i] - activity[i];
            if residual >= t.lo[s] && residual <= t.hi[s] {
                t.x[s] = residual;
                t.basis.push(s);
                t.is_basic[s] = true;
            } else {
                let z = cols + i;
                t.x[s] = residual.clamp(t.lo[s], t.hi[s]);
                let gap = residual - t.x[s];
                t.art_sign[i] = gap.signum();
                t.x[z] = gap.abs();
                t.hi[z] = f64::INFINITY;
                t.basis.push(z);
                t.is_basic[z] = true;
            }
        }
        t
    }

    /// Phase-two tableau for `lp` in the basis of `warm`, or `None` when that
    /// basis is singular or far from dual feasible under the new bounds.
    fn warm(lp: &LinearProgram, warm: &WarmStart) -> Option<Self> {
        let mut t = Self::skeleton(lp);
        if warm.basis.len() != t.m || warm.x.len() != t.x.len() {
            return None;
        }
        t.basis.clone_from(&warm.basis);
        t.art_sign.clone_from(&warm.art_sign);
        for &k in &t.basis {
            t.is_basic[k] = true;
        }
        for k in 0..t.cols {
            if !t.is_basic[k] {
                let v = warm.x[k];
                t.x[k] = if v.is_finite() { v.clamp(t.lo[k], t.hi[k]) } else { t.x[k] };
                if !t.x[k].is_finite() {
                    t.x[k] = 0.0;
                }
            }
        }
        t.set_phase(Phase::Two);
        if !t.refactor() {
            return None;
        }
        let dual_feasible = (0..t.cols).filter(|&j| !t.is_basic[j]).all(|j| {
            let dj = t.d[j];
            !(dj < -WARM_DUAL_TOL && t.x[j] < t.hi[j] || dj > WARM_DUAL_TOL && t.x[j] > t.lo[j])
        });
        dual_feasible.then_some(t)
    }

    fn set_phase(&mut self, phase: Phase) {
        self.cost.iter_mut().for_each(|c| *c = 0.0);
        match phase {
            Phase::One => {
                for i in 0..self.m {
                    if self.art_sign[i] != 0.0 {
                        self.cost[self.cols + i] = 1.0;
                    }
                }
            }
            Phase::Two => {
                self.cost[..self.n].copy_from_slice(&self.objective);
                for i in 0..self.m {
                    self.hi[self.cols + i] = 0.0;
                }
            }
        }
    }

    /// Recomputes the tableau, basic values and reduced costs from the
    /// original data. Returns false when the basis is numerically singular.
    ///
    /// Basic slacks and artificials are unit columns, so only the block of
    /// structural basic columns on the rows they leave uncovered is inverted.
    fn refactor(&mut self) -> bool {
        self.since_refactor = 0;
        let (m, n, cols) = (self.m, self.n, self.cols);
        const NONE: usize = usize::MAX;
        let mut unit_pos = vec![NONE; m];
        let mut unit_coef = vec![1.0; m];
        let mut structural = Vec::new();
        for (r, &k) in self.basis.iter().enumerate() {
            if k < n {
                structural.push(r);
                continue;
            }
            let (i, coef) = if k < cols { (k - n, 1.0) } else { (k - cols, self.art_sign[k - cols]) };
            if unit_pos[i] != NONE || coef == 0.0 {
                return false;
            }
            unit_pos[i] = r;
            unit_coef[i] = coef;
        }
        let free_rows: Vec<usize> = (0..m).filter(|&i| unit_pos[i] == NONE).collect();
        let q = structural.len();
        if free_rows.len() != q {
            return false;
        }
        let mut free_pos = vec![NONE; m];
        for (p, &i) in free_rows.iter().enumerate() {
            free_pos[i] = p;
        }
        let mut block = DMatrix::<f64>::zeros(q, q);
        for (c, &r) in structural.iter().enumerate() {
            for &(i, v) in &self.acol[self.basis[r]] {
                if free_pos[i] != NONE {
                    block[(free_pos[i], c)] = v;
                }
            }
        }
        let inverse = if q == 0 {
            block
        } else {
            match block.try_inverse() {
                Some(inv) if inv.iter().all(|v| v.is_finite()) => inv,
                _ => {
                    log::warn!("basis matrix is singular; keeping the updated tableau");
                    return false;
                }
            }
        };
        let inv = inverse.as_slice();
        let mut ys = vec![0.0; q];
        let mut acc = vec![0.0; m];
        let mut out = vec![0.0; m];
        // B^{-1} c for a sparse c, written to `out` in basis order.
        let mut solve = |c: &mut dyn Iterator<Item = (usize, f64)>, out: &mut [f64]| {
            ys.iter_mut().for_each(|v| *v = 0.0);
            for (i, v) in c {
                if free_pos[i] != NONE {
                    let p = free_pos[i];
                    for (y, &w) in ys.iter_mut().zip(&inv[p * q..(p + 1) * q]) {
                        *y += v * w;
                    }
                } else {
                    acc[i] += v;
                }
            }
            for (c, &r) in structural.iter().enumerate() {
                let y = ys[c];
                out[r] = y;
                if y != 0.0 {
                    for &(i, a) in &self.acol[self.basis[r]] {
                        if unit_pos[i] != NONE {
                            acc[i] -= a * y;
                        }
                    }
                }
            }
            for i in 0..m {
                if unit_pos[i] != NONE {
                    out[unit_pos[i]] = acc[i] / unit_coef[i];
                    acc[i] = 0.0;
                }
            }
        };
        for j in 0..cols {
            if j < n {
                solve(&mut self.acol[j].iter().copied(), &mut out);
            } else {
                solve(&mut std::iter::once((j - n, 1.0)), &mut out);
            }
            for (r, &v) in out.iter().enumerate() {
                self.t[r * cols + j] = if v.abs() < 1e-14 { 0.0 } else { v };
            }
        }
        let mut rhs = self.b.clone();
        for k in 0..self.x.len() {
            let xk = self.x[k];
            if self.is_basic[k] || xk == 0.0 {
                continue;
            }
            if k < n {
                for &(i, v) in &self.acol[k] {
                    rhs[i] -= v * xk;
                }
            } else if k < cols {
                rhs[k - n] -= xk;
            } else {
                rhs[k - cols] -= self.art_sign[k - cols] * xk;
            }
        }
        solve(&mut rhs.iter().copied().enumerate().filter(|e| e.1 != 0.0), &mut out);
        for (r, &v) in out.iter().enumerate() {
            self.x[self.basis[r]] = v;
        }
        for j in 0..cols {
            self.d[j] = if self.is_basic[j] {
                0.0
            } else {
                self.cost[j] - (0..m).map(|i| self.cost[self.basis[i]] * self.t[i * cols + j]).sum::<f64>()
            };
        }
        true
    }

    /// Entering column and its direction of movement.
    fn price(&self, bland: bool) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64, f64)> = None;
        for j in 0..self.cols {
            if self.is_basic[j] {
                continue;
            }
            let dj = self.d[j];
            let dir = if dj < -OPTIMALITY_TOL && self.x[j] < self.hi[j] {
                1.0
            } else if dj > OPTIMALITY_TOL && self.x[j] > self.lo[j] {
                -1.0
            } else {
                continue;
            };
            if bland {
                return Some((j, dir));
            }
            if best.is_none_or(|b| dj.abs() > b.2) {
                best = Some((j, dir, dj.abs()));
            }
        }
        best.map(|(j, dir, _)| (j, dir))
    }

    /// Step length and leaving row (`None` for a bound flip).
    fn ratio_test(&self, j: usize, dir: f64, bland: bool) -> (f64, Option<usize>) {
        let mut step = self.hi[j] - self.lo[j];
        let mut leaving: Option<(usize, f64)> = None;
        for i in 0..self.m {
            let alpha = dir * self.t[i * self.cols + j];
            if alpha.abs() <= PIVOT_TOL {
                continue;
            }
            let k = self.basis[i];
            let ratio = if alpha > 0.0 {
                if self.lo[k] == f64::NEG_INFINITY {
                    continue;
                }
                (self.x[k] - self.lo[k]).max(0.0) / alpha
            } else {
                if self.hi[k] == f64::INFINITY {
                    continue;
                }
                (self.hi[k] - self.x[k]).max(0.0) / -alpha
            };
            let better = match leaving {
                None => ratio < step,
                Some(_) if ratio < step - 1e-12 => true,
                Some((r, best_alpha)) if ratio <= step + 1e-12 => {
                    if bland {
                        k < self.basis[r]
                    } else {
                        alpha.abs() > best_alpha
                    }
                }
                _ => false,
            };
            if better {
                step = step.min(ratio);
                leaving = Some((i, alpha.abs()));
            }
        }
        (step, leaving.map(|(i, _)| i))
    }

    fn pivot(&mut self, r: usize, j: usize) {
        let cols = self.cols;
        let piv = self.t[r * cols + j];
        for v in &mut self.t[r * cols..(r + 1) * cols] {
            *v /= piv;
        }
        let (before, rest) = self.t.split_at_mut(r * cols);
        let (row, after) = rest.split_at_mut(cols);
        let eliminate = |other: &mut [f64]| {
            let f = other[j];
            if f != 0.0 {
                for (o, &p) in other.iter_mut().zip(row.iter()) {
                    *o -= f * p;
                }
                other[j] = 0.0;
            }
        };
        before.chunks_mut(cols).for_each(eliminate);
        after.chunks_mut(cols).for_each(eliminate);
        let f = self.d[j];
        if f != 0.0 {
            for (o, &p) in self.d.iter_mut().zip(row.iter()) {
                *o -= f * p;
            }
        }
        self.d[j] = 0.0;
        let leaving = self.basis[r];
        self.is_basic[leaving] = false;
        self.is_basic[j] = true;
        self.basis[r] = j;
    }

    /// Primal simplex iterations for the current cost vector.
    fn run(&mut self, options: &SimplexOptions) -> Status {
        let mut degenerate = 0;
        loop {
            let bland = degenerate >= options.bland_after;
            let Some((j, dir)) = self.price(bland) else {
                return Status::Optimal;
            };
            if self.iterations >= options.max_iterations {
                return Status::IterationLimit;
            }
            let (step, leaving) = self.ratio_test(j, dir, bland);
            if step == f64::INFINITY {
                return Status::Unbounded;
            }
            self.iterations += 1;
            self.x[j] += dir * step;
            if step != 0.0 {
                for i in 0..self.m {
                    let k = self.basis[i];
                    self.x[k] -= dir * step * self.t[i * self.cols + j];
                }
            }
            match leaving {
                None => {
                    self.x[j] = if dir > 0.0 { self.hi[j] } else { self.lo[j] };
                }
                Some(r) => {
                    let k = self.basis[r];
                    let alpha = dir * self.t[r * self.cols + j];
                    self.x[k] = if alpha > 0.0 { self.lo[k] } else { self.hi[k] };
                    self.pivot(r, j);
                    self.since_refactor += 1;
                }
            }
            degenerate = if step <= DEGENERATE_STEP { degenerate + 1 } else { 0 };
            if self.since_refactor >= options.refactor_every {
                self.refactor();
            }
        }
    }

    /// Runs a phase to optimality, refactoring and resuming while the fresh
    /// factorization disagrees with the updated tableau.
    fn run_to_optimality(&mut self, options: &SimplexOptions) -> Status {
        for _ in 0..8 {
            let status = self.run(options);
            if status != Status::Optimal {
                return status;
            }
            self.refactor();
            if self.price(false).is_none() {
                return Status::Optimal;
            }
        }
        Status::Optimal
    }

    fn infeasibility(&self) -> f64 {
        (0..self.m)
            .filter(|&i| self.art_sign[i] != 0.0)
            .map(|i| self.x[self.cols + i].abs())
            .sum()
    }

    /// Pivots artificials that are still basic at zero out of the basis.
    fn drive_out_artificials(&mut self) {
        for r in 0..self.m {
            if self.basis[r] < self.cols {
                continue;
            }
            let best = (0..self.cols)
                .filter(|&j| !self.is_basic[j])
                .map(|j| (j, self.t[r * self.cols + j].abs()))
                .filter(|&(_, v)| v > 1e-7)
                .max_by(|a, b| a.1.total_cmp(&b.1));
            if let Some((j, _)) = best {
                let z = self.basis[r];
                self.pivot(r, j);
                self.x[z] = 0.0;
            }
        }
    }

    /// Basic row farthest outside its bounds, with the bound it should
    /// leave at.
    fn dual_leaving(&self) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64, f64)> = None;
        for r in 0..self.m {
            let k = self.basis[r];
            let (gap, target) = if self.x[k] < self.lo[k] - FEASIBILITY_TOL {
                (self.lo[k] - self.x[k], self.lo[k])
            } else if self.x[k] > self.hi[k] + FEASIBILITY_TOL {
                (self.x[k] - self.hi[k], self.hi[k])
            } else {
                continue;
            };
            if best.is_none_or(|b| gap > b.2) {
                best = Some((r, target, gap));
            }
        }
        best.map(|(r, target, _)| (r, target))
    }

    /// Dual simplex from a dual feasible basis, followed by a primal clean-up.
    /// `None` means the warm start should be abandoned.
    fn solve_dual(&mut self, options: &SimplexOptions) -> Option<Status> {
        let limit = 20 * (self.m + self.n) + 100;
        let mut steps = 0;
        while let Some((r, target)) = self.dual_leaving() {
            steps += 1;
            if steps > limit || self.iterations >= options.max_iterations {
                return None;
            }
            let k = self.basis[r];
            // The leaving value must rise (to a lower bound) or fall.
            let rise = target > self.x[k];
            let row = &self.t[r * self.cols..(r + 1) * self.cols];
            let mut entering: Option<(usize, f64, f64)> = None;
            for j in 0..self.cols {
                if self.is_basic[j] {
                    continue;
                }
                let a = row[j];
                if a.abs() <= PIVOT_TOL {
                    continue;
                }
                // x_k moves by -a per unit increase of x_j.
                let up = (a < 0.0) == rise;
                let movable = if up { self.x[j] < self.hi[j] } else { self.x[j] > self.lo[j] };
                if !movable {
                    continue;
                }
                let ratio = self.d[j].abs() / a.abs();
                let better = match entering {
                    None => true,
                    Some((_, best, best_a)) => {
                        ratio < best - 1e-12 || (ratio <= best + 1e-12 && a.abs() > best_a)
                    }
                };
                if better {
                    entering = Some((j, ratio, a.abs()));
                }
            }
            let Some((j, _, _)) = entering else {
                return Some(Status::Infeasible);
            };
            let a = self.t[r * self.cols + j];
            let delta = (self.x[k] - target) / a;
            self.iterations += 1;
            self.x[j] += delta;
            for i in 0..self.m {
                let b = self.basis[i];
                self.x[b] -= delta * self.t[i * self.cols + j];
            }
            self.pivot(r, j);
            self.x[k] = target;
            self.since_refactor += 1;
            if self.since_refactor >= options.refactor_every && !self.refactor() {
                return None;
            }
        }
        if !self.refactor() {
            return None;
        }
        if self.dual_leaving().is_some() {
            return self.solve_dual(options);
        }
        Some(self.run_to_optimality(options))
    }

    fn solve(&mut self, options: &SimplexOptions) -> Status {
        let needs_phase_one = self.art_sign.iter().any(|&s| s != 0.0);
        if needs_phase_one {
            self.set_phase(Phase::One);
            self.refactor();
            match self.run_to_optimality(options) {
                Status::Optimal => {}
                Status::IterationLimit => return Status::IterationLimit,
                _ => return Status::Infeasible,
            }
            let scale = self.b.iter().fold(1.0f64, |acc, v| acc.max(v.abs()));
            if self.infeasibility() > FEASIBILITY_TOL * scale * self.m.max(1) as f64 {
                return Status::Infeasible;
            }
            self.drive_out_artificials();
        }
        self.set_phase(Phase::Two);
        self.refactor();
        self.run_to_optimality(options)
    }
}
