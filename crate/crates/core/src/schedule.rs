//! Binary schedules, their discrete start-up costs and the cost change `ΔΣ^t`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::cost_model::{discrete_cost, DiscreteCosts, StartupCostModel, TimeGrid};
use crate::error::{Error, Result};

/// Bound tolerance for fractional on/off values.
pub const BOUND_TOL: f64 = 1e-9;

/// A binary operational schedule `u ∈ {0,1}^T`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Schedule {
    on: Vec<bool>,
}

impl Schedule {
    pub fn new(on: Vec<bool>) -> Self {
        Self { on }
    }

    pub fn off(periods: usize) -> Self {
        Self::new(vec![false; periods])
    }

    /// Schedule whose period `t` is on iff bit `t - 1` of `mask` is set.
    pub fn from_mask(periods: usize, mask: u64) -> Self {
        Self::new((0..periods).map(|k| mask >> k & 1 == 1).collect())
    }

    /// Unit vector `e_t`.
    pub fn unit(periods: usize, t: usize) -> Self {
        let mut s = Self::off(periods);
        s.on[t - 1] = true;
        s
    }

    pub fn periods(&self) -> usize {
        self.on.len()
    }

    /// `u_t` for `t` in `1..=T`.
    pub fn is_on(&self, t: usize) -> bool {
        self.on[t - 1]
    }

    pub fn set(&mut self, t: usize, on: bool) {
        self.on[t - 1] = on;
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.on
    }

    pub fn is_off(&self) -> bool {
        self.on.iter().all(|&b| !b)
    }

    pub fn to_reals(&self) -> Vec<f64> {
        self.on.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect()
    }
}

impl fmt::Display for Schedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.on {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for Schedule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let on = s
            .trim()
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::domain(format!("schedule character {other:?} is not 0 or 1"))),
            })
            .collect::<Result<Vec<_>>>()?;
        if on.is_empty() {
            return Err(Error::domain("empty schedule"));
        }
        Ok(Self::new(on))
    }
}

/// A point `(u, cΣ)` with `u ∈ [0,1]^T`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PointSpec", into = "PointSpec")]
pub struct FracPoint {
    u: Vec<f64>,
    c_sigma: f64,
}

impl FracPoint {
    /// Values within `BOUND_TOL` outside `[0, 1]` are clamped, anything further is rejected.
    pub fn new(u: Vec<f64>, c_sigma: f64) -> Result<Self> {
        if u.is_empty() {
            return Err(Error::domain("point has no periods"));
        }
        if !c_sigma.is_finite() {
            return Err(Error::domain(format!("cΣ must be finite, got {c_sigma}")));
        }
        Ok(Self {
            u: clamp_unit_interval(&u)?,
            c_sigma,
        })
    }

    pub fn u(&self) -> &[f64] {
        &self.u
    }

    pub fn c_sigma(&self) -> f64 {
        self.c_sigma
    }

    pub fn periods(&self) -> usize {
        self.u.len()
    }
}

pub(crate) fn clamp_unit_interval(u: &[f64]) -> Result<Vec<f64>> {
    u.iter()
        .enumerate()
        .map(|(k, &x)| {
            if !(-BOUND_TOL..=1.0 + BOUND_TOL).contains(&x) {
                Err(Error::domain(format!("u_{} = {x} lies outside [0, 1]", k + 1)))
            } else {
                Ok(x.clamp(0.0, 1.0))
            }
        })
        .collect()
}

#[derive(Serialize, Deserialize)]
struct PointSpec {
    u: Vec<f64>,
    c: f64,
}

impl TryFrom<PointSpec> for FracPoint {
    type Error = Error;

    fn try_from(p: PointSpec) -> Result<Self> {
        FracPoint::new(p.u, p.c)
    }
}

impl From<FracPoint> for PointSpec {
    fn from(p: FracPoint) -> Self {
        PointSpec {
            u: p.u,
            c: p.c_sigma,
        }
    }
}

/// Number of offline periods immediately before period `t`.
pub fn offline_before(u: &Schedule, t: usize) -> usize {
    (1..t).rev().take_while(|&j| !u.is_on(j)).count()
}

/// Number of offline periods immediately after period `t`.
pub fn offline_after(u: &Schedule, t: usize) -> usize {
    (t + 1..=u.periods()).take_while(|&j| !u.is_on(j)).count()
}

/// Offline run lengths before and after every period, computed in two sweeps.
#[derive(Debug, Clone)]
pub struct RunLengths {
    before: Vec<usize>,
    after: Vec<usize>,
}

impl RunLengths {
    pub fn new(u: &Schedule) -> Self {
        let n = u.periods();
        let mut before = vec![0; n + 2];
        let mut after = vec![0; n + 2];
        for t in 2..=n {
            before[t] = if u.is_on(t - 1) { 0 } else { before[t - 1] + 1 };
        }
        for t in (1..n).rev() {
            after[t] = if u.is_on(t + 1) { 0 } else { after[t + 1] + 1 };
        }
        Self { before, after }
    }

    pub fn before(&self, t: usize) -> usize {
        self.before[t]
    }

    pub fn after(&self, t: usize) -> usize {
        self.after[t]
    }
}

/// Start-up cost incurred in period `t` by schedule `u`.
pub fn dcu_t(cost: &StartupCostModel, grid: &TimeGrid, u: &Schedule, t: usize) -> Result<f64> {
    check_schedule(grid, u)?;
    if t == 0 || t > grid.periods() {
        return Err(Error::domain(format!("period {t} outside 1..={}", grid.periods())));
    }
    if u.is_on(t) {
        discrete_cost(cost, grid, t, offline_before(u, t))
    } else {
        Ok(0.0)
    }
}

/// Summed start-up costs `DCU^Σ(u)`.
pub fn dcu_sum(cost: &StartupCostModel, grid: &TimeGrid, u: &Schedule) -> Result<f64> {
    check_schedule(grid, u)?;
    let mut total = 0.0;
    let mut run = 0;
    for t in 1..=grid.periods() {
        if u.is_on(t) {
            total += discrete_cost(cost, grid, t, run)?;
            run = 0;
        } else {
            run += 1;
        }
    }
    Ok(total)
}

/// `DCU^Σ(u)` from a precomputed cost table; `u.periods()` must match the table.
pub fn dcu_sum_table(costs: &DiscreteCosts, u: &Schedule) -> f64 {
    let mut total = 0.0;
    let mut run = 0;
    for t in 1..=costs.periods() {
        if u.is_on(t) {
            total += costs.get(t, run);
            run = 0;
        } else {
            run += 1;
        }
    }
    total
}

/// Change of the summed start-up costs when period `t` is switched on with
/// `l` offline periods before it and `r` after it.
pub fn delta_sum(
    cost: &StartupCostModel,
    grid: &TimeGrid,
    t: usize,
    l: usize,
    r: usize,
) -> Result<f64> {
    let periods = grid.periods();
    if t == 0 || t > periods {
        return Err(Error::domain(format!("period {t} outside 1..={periods}")));
    }
    if r > periods - t {
        return Err(Error::domain(format!(
            "{r} offline periods after period {t} exceed {}",
            periods - t
        )));
    }
    let own = discrete_cost(cost, grid, t, l)?;
    if t + r < periods {
        let next = t + r + 1;
        Ok(own + discrete_cost(cost, grid, next, r)? - discrete_cost(cost, grid, next, l + r + 1)?)
    } else {
        Ok(own)
    }
}

/// `delta_sum` from a precomputed table, without range checks.
pub fn delta_sum_table(costs: &DiscreteCosts, t: usize, l: usize, r: usize) -> f64 {
    let own = costs.get(t, l);
    if t + r < costs.periods() {
        let next = t + r + 1;
        own + costs.get(next, r) - costs.get(next, l + r + 1)
    } else {
        own
    }
}

fn check_schedule(grid: &TimeGrid, u: &Schedule) -> Result<()> {
    if u.periods() != grid.periods() {
        return Err(Error::Dimension(format!(
            "schedule has {} periods, grid has {}",
            u.periods(),
            grid.periods()
        )));
    }
    Ok(())
}
