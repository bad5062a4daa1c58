//! Start-up cost functions, the time grid and their discretization.
//!
//! Periods are 1-based throughout the crate: period `t` ranges over `1..=T`
//! and sequences indexed by period (`δ`, `u`, coefficient vectors) store
//! period `t` at position `t - 1`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on slope decreases used by the strict concavity predicate.
pub const STRICT_SLOPE_TOL: f64 = 1e-12;

/// Exponential start-up costs `V (1 - exp(-λ L)) + f` for `L > 0`, and 0 at `L = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpStartupCost {
    heating_cost: f64,
    fixed_cost: f64,
    heat_loss: f64,
}

impl ExpStartupCost {
    pub fn new(heating_cost: f64, fixed_cost: f64, heat_loss: f64) -> Result<Self> {
        if !(heating_cost.is_finite() && heating_cost > 0.0) {
            return Err(Error::InvalidCost(format!(
                "heating cost V must be positive, got {heating_cost}"
            )));
        }
        if !(fixed_cost.is_finite() && fixed_cost >= 0.0) {
            return Err(Error::InvalidCost(format!(
                "fixed cost f must be nonnegative, got {fixed_cost}"
            )));
        }
        if !(heat_loss.is_finite() && heat_loss > 0.0) {
            return Err(Error::InvalidCost(format!(
                "heat loss λ must be positive, got {heat_loss}"
            )));
        }
        Ok(Self {
            heating_cost,
            fixed_cost,
            heat_loss,
        })
    }

    pub fn heating_cost(&self) -> f64 {
        self.heating_cost
    }

    pub fn fixed_cost(&self) -> f64 {
        self.fixed_cost
    }

    pub fn heat_loss(&self) -> f64 {
        self.heat_loss
    }

    fn value(&self, offline: f64) -> f64 {
        if offline > 0.0 {
            // -expm1(-x) = 1 - exp(-x) without cancellation for short offline times
            self.heating_cost * -(-self.heat_loss * offline).exp_m1() + self.fixed_cost
        } else {
            0.0
        }
    }
}

/// Piecewise-linear concave costs through `(offline time, cost)` breakpoints,
/// flat beyond the last breakpoint.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedConcaveCost {
    points: Vec<(f64, f64)>,
    strictly_concave: bool,
}

impl TabulatedConcaveCost {
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        let Some(&first) = points.first() else {
            return Err(Error::InvalidCost("cost table is empty".into()));
        };
        if first != (0.0, 0.0) {
            return Err(Error::InvalidCost(format!(
                "cost table must start at (0, 0), got {first:?}"
            )));
        }
        if points.iter().any(|(l, c)| !l.is_finite() || !c.is_finite()) {
            return Err(Error::InvalidCost("cost table holds non-finite values".into()));
        }
        let mut slopes = Vec::with_capacity(points.len().saturating_sub(1));
        for w in points.windows(2) {
            let ((l0, c0), (l1, c1)) = (w[0], w[1]);
            if l1 <= l0 {
                return Err(Error::InvalidCost(format!(
                    "offline times must be strictly increasing ({l0} then {l1})"
                )));
            }
            if c1 < c0 {
                return Err(Error::InvalidCost(format!(
                    "costs must be nondecreasing ({c0} then {c1})"
                )));
            }
            slopes.push((c1 - c0) / (l1 - l0));
        }
        for w in slopes.windows(2) {
            if w[1] > w[0] + STRICT_SLOPE_TOL {
                return Err(Error::InvalidCost(format!(
                    "cost table is not concave: slope {} follows slope {}",
                    w[1], w[0]
                )));
            }
        }
        // A single segment is linear on its support, hence never strict.
        let strictly_concave =
            slopes.len() >= 2 && slopes.windows(2).all(|w| w[0] - w[1] > STRICT_SLOPE_TOL);
        Ok(Self {
            points,
            strictly_concave,
        })
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    fn value(&self, offline: f64) -> f64 {
        let pts = &self.points;
        let k = pts.partition_point(|&(l, _)| l <= offline);
        if k == 0 {
            return 0.0;
        }
        if k == pts.len() {
            return pts[k - 1].1;
        }
        let ((l0, c0), (l1, c1)) = (pts[k - 1], pts[k]);
        c0 + (c1 - c0) * (offline - l0) / (l1 - l0)
    }
}

/// A nonnegative, nondecreasing, concave start-up cost function `CU(L)` with `CU(0) = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CostSpec", into = "CostSpec")]
pub enum StartupCostModel {
    Exp(ExpStartupCost),
    Table(TabulatedConcaveCost),
}

impl StartupCostModel {
    pub fn exponential(heating_cost: f64, fixed_cost: f64, heat_loss: f64) -> Result<Self> {
        ExpStartupCost::new(heating_cost, fixed_cost, heat_loss).map(Self::Exp)
    }

    pub fn tabulated(points: Vec<(f64, f64)>) -> Result<Self> {
        TabulatedConcaveCost::new(points).map(Self::Table)
    }

    /// Cost of a start-up after an offline time of length `offline`.
    pub fn eval(&self, offline: f64) -> Result<f64> {
        if offline.is_nan() || offline < 0.0 {
            return Err(Error::domain(format!(
                "offline time must be nonnegative, got {offline}"
            )));
        }
        Ok(self.value(offline))
    }

    /// Unchecked evaluation for hot loops; nonpositive lengths map to 0.
    #[inline]
    pub(crate) fn value(&self, offline: f64) -> f64 {
        match self {
            Self::Exp(e) => e.value(offline),
            Self::Table(t) => t.value(offline),
        }
    }

    /// Exponential models are always strictly concave; tables are when every
    /// pair of consecutive slopes strictly decreases.
    pub fn strictly_concave(&self) -> bool {
        match self {
            Self::Exp(_) => true,
            Self::Table(t) => t.strictly_concave,
        }
    }

    pub fn as_exponential(&self) -> Option<&ExpStartupCost> {
        match self {
            Self::Exp(e) => Some(e),
            Self::Table(_) => None,
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
enum CostSpec {
    Exp {
        #[serde(rename = "V")]
        heating_cost: f64,
        #[serde(rename = "f")]
        fixed_cost: f64,
        #[serde(rename = "lambda")]
        heat_loss: f64,
    },
    Table {
        points: Vec<(f64, f64)>,
    },
}

impl TryFrom<CostSpec> for StartupCostModel {
    type Error = Error;

    fn try_from(spec: CostSpec) -> Result<Self> {
        match spec {
            CostSpec::Exp {
                heating_cost,
                fixed_cost,
                heat_loss,
            } => Self::exponential(heating_cost, fixed_cost, heat_loss),
            CostSpec::Table { points } => Self::tabulated(points),
        }
    }
}

impl From<StartupCostModel> for CostSpec {
    fn from(cost: StartupCostModel) -> Self {
        match cost {
            StartupCostModel::Exp(e) => CostSpec::Exp {
                heating_cost: e.heating_cost,
                fixed_cost: e.fixed_cost,
                heat_loss: e.heat_loss,
            },
            StartupCostModel::Table(t) => CostSpec::Table { points: t.points },
        }
    }
}

/// `T` periods of lengths `δ(1..T)` and the offline time before period 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GridSpec", into = "GridSpec")]
pub struct TimeGrid {
    period_lengths: Vec<f64>,
    pre_offline: f64,
}

impl TimeGrid {
    pub fn new(period_lengths: Vec<f64>, pre_offline: f64) -> Result<Self> {
        if period_lengths.is_empty() {
            return Err(Error::InvalidGrid("a grid needs at least one period".into()));
        }
        if let Some(bad) = period_lengths.iter().find(|d| !(d.is_finite() && **d > 0.0)) {
            return Err(Error::InvalidGrid(format!(
                "period lengths must be positive, got {bad}"
            )));
        }
        if !(pre_offline.is_finite() && pre_offline >= 0.0) {
            return Err(Error::InvalidGrid(format!(
                "pre-model offline time must be nonnegative, got {pre_offline}"
            )));
        }
        Ok(Self {
            period_lengths,
            pre_offline,
        })
    }

    /// `periods` periods of unit length.
    pub fn uniform(periods: usize, pre_offline: f64) -> Result<Self> {
        Self::new(vec![1.0; periods], pre_offline)
    }

    pub fn periods(&self) -> usize {
        self.period_lengths.len()
    }

    pub fn period_lengths(&self) -> &[f64] {
        &self.period_lengths
    }

    /// `δ(t)` for `t` in `1..=T`.
    pub fn period_length(&self, t: usize) -> f64 {
        self.period_lengths[t - 1]
    }

    pub fn pre_offline(&self) -> f64 {
        self.pre_offline
    }

    pub fn with_pre_offline(&self, pre_offline: f64) -> Result<Self> {
        Self::new(self.period_lengths.clone(), pre_offline)
    }

    /// Offline time preceding a start-up in period `t` after `l` offline periods.
    pub fn offline_length(&self, t: usize, l: usize) -> Result<f64> {
        let periods = self.periods();
        if t == 0 || t > periods {
            return Err(Error::domain(format!("period {t} outside 1..={periods}")));
        }
        if l > t - 1 {
            return Err(Error::domain(format!(
                "{l} offline periods before period {t} exceed {}",
                t - 1
            )));
        }
        let within: f64 = self.period_lengths[t - 1 - l..t - 1].iter().sum();
        Ok(if l == t - 1 {
            within + self.pre_offline
        } else {
            within
        })
    }

    /// Offline lengths `Δ(t, t-1)` for `t = 1..=T+1`, stored at index `t`
    /// (index 0 is unused). `Δ(T+1, T)` extends the recurrence one period past
    /// the horizon.
    pub fn offline_prefix(&self) -> Vec<f64> {
        let mut prefix = Vec::with_capacity(self.periods() + 2);
        prefix.push(0.0);
        prefix.push(self.pre_offline);
        for &delta in &self.period_lengths {
            let last = prefix[prefix.len() - 1];
            prefix.push(last + delta);
        }
        prefix
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GridSpec {
    #[serde(rename = "T")]
    periods: usize,
    #[serde(rename = "delta", default, skip_serializing_if = "Option::is_none")]
    period_lengths: Option<Vec<f64>>,
    #[serde(default)]
    pre_offline: f64,
}

impl TryFrom<GridSpec> for TimeGrid {
    type Error = Error;

    fn try_from(spec: GridSpec) -> Result<Self> {
        let lengths = match spec.period_lengths {
            Some(d) if d.len() != spec.periods => {
                return Err(Error::InvalidGrid(format!(
                    "T = {} but {} period lengths given",
                    spec.periods,
                    d.len()
                )))
            }
            Some(d) => d,
            None => vec![1.0; spec.periods],
        };
        TimeGrid::new(lengths, spec.pre_offline)
    }
}

impl From<TimeGrid> for GridSpec {
    fn from(grid: TimeGrid) -> Self {
        GridSpec {
            periods: grid.periods(),
            period_lengths: Some(grid.period_lengths),
            pre_offline: grid.pre_offline,
        }
    }
}

/// `CU^{t,l}`: the cost of a start-up in period `t` after `l` offline periods.
pub fn discrete_cost(cost: &StartupCostModel, grid: &TimeGrid, t: usize, l: usize) -> Result<f64> {
    cost.eval(grid.offline_length(t, l)?)
}

/// Table of all `CU^{t,l}`, `1 <= t <= T`, `0 <= l <= t-1`.
#[derive(Debug, Clone)]
pub struct DiscreteCosts {
    rows: Vec<Vec<f64>>,
}

impl DiscreteCosts {
    pub fn new(cost: &StartupCostModel, grid: &TimeGrid) -> Self {
        let prefix = grid.offline_prefix();
        let rows = (1..=grid.periods())
            .map(|t| {
                (0..t)
                    .map(|l| {
                        let offline = if l == t - 1 {
                            prefix[t]
                        } else {
                            prefix[t] - prefix[t - l]
                        };
                        cost.value(offline)
                    })
                    .collect()
            })
            .collect();
        Self { rows }
    }

    pub fn periods(&self) -> usize {
        self.rows.len()
    }

    /// `CU^{t,l}`; panics when `(t, l)` is out of range.
    #[inline]
    pub fn get(&self, t: usize, l: usize) -> f64 {
        self.rows[t - 1][l]
    }
}
