//! Desk-scale unit commitment models: the base dispatch constraints plus one
//! of five start-up cost formulations, built as generic linear programs.

use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::cost_model::{DiscreteCosts, StartupCostModel, TimeGrid};
use crate::error::{Error, Result};
use crate::lpformat;
use crate::lpsolve::{ColumnSpec, LinearProgram, RowSense};
use crate::schedule::Schedule;

/// A thermal unit. Field names in JSON follow the usual symbols.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Unit {
    #[serde(rename = "A")]
    pub var_cost: f64,
    #[serde(rename = "B")]
    pub fixed_cost: f64,
    #[serde(rename = "P_min")]
    pub p_min: f64,
    #[serde(rename = "P_max")]
    pub p_max: f64,
    #[serde(rename = "RU")]
    pub ramp_up: f64,
    #[serde(rename = "SU")]
    pub startup_ramp: f64,
    #[serde(rename = "RD")]
    pub ramp_down: f64,
    #[serde(rename = "SD")]
    pub shutdown_ramp: f64,
    pub startup: StartupCostModel,
    /// Offline time before period 1; the grid's value when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pre_offline: Option<f64>,
}

impl Unit {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidInstance(msg));
        let values = [
            self.var_cost,
            self.fixed_cost,
            self.p_min,
            self.p_max,
            self.ramp_up,
            self.startup_ramp,
            self.ramp_down,
            self.shutdown_ramp,
        ];
        if values.iter().any(|v| !v.is_finite()) {
            return bad("unit parameters must be finite".into());
        }
        if !(0.0 <= self.p_min && self.p_min <= self.p_max) {
            return bad(format!("need 0 <= P_min <= P_max, got {} and {}", self.p_min, self.p_max));
        }
        if self.ramp_up <= 0.0 || self.ramp_down <= 0.0 {
            return bad("ramp rates must be positive".into());
        }
        if self.startup_ramp < self.p_min || self.shutdown_ramp < self.p_min {
            return bad("start-up and shutdown ramps must be at least P_min".into());
        }
        if let Some(pre) = self.pre_offline {
            if !(pre.is_finite() && pre >= 0.0) {
                return bad(format!("pre_offline must be nonnegative, got {pre}"));
            }
        }
        Ok(())
    }

    /// The instance grid with this unit's pre-model offline time.
    pub fn grid(&self, grid: &TimeGrid) -> Result<TimeGrid> {
        match self.pre_offline {
            Some(pre) => grid.with_pre_offline(pre),
            None => Ok(grid.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "InstanceSpec", into = "InstanceSpec")]
pub struct UcInstance {
    grid: TimeGrid,
    units: Vec<Unit>,
    demand: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceSpec {
    grid: TimeGrid,
    units: Vec<Unit>,
    demand: Vec<f64>,
}

impl TryFrom<InstanceSpec> for UcInstance {
    type Error = Error;

    fn try_from(spec: InstanceSpec) -> Result<Self> {
        UcInstance::new(spec.grid, spec.units, spec.demand)
    }
}

impl From<UcInstance> for InstanceSpec {
    fn from(i: UcInstance) -> Self {
        InstanceSpec {
            grid: i.grid,
            units: i.units,
            demand: i.demand,
        }
    }
}

impl UcInstance {
    pub fn new(grid: TimeGrid, units: Vec<Unit>, demand: Vec<f64>) -> Result<Self> {
        if units.is_empty() {
            return Err(Error::InvalidInstance("an instance needs at least one unit".into()));
        }
        for (k, unit) in units.iter().enumerate() {
            unit.validate()
                .map_err(|e| Error::InvalidInstance(format!("unit {}: {e}", k + 1)))?;
        }
        if demand.len() != grid.periods() {
            return Err(Error::Dimension(format!(
                "{} demand values for {} periods",
                demand.len(),
                grid.periods()
            )));
        }
        if let Some(d) = demand.iter().find(|d| !d.is_finite()) {
            return Err(Error::InvalidInstance(format!("demand value {d}")));
        }
        let capacity: f64 = units.iter().map(|u| u.p_max).sum();
        let peak = demand.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if peak > capacity {
            log::warn!("peak demand {peak} exceeds total capacity {capacity}");
        }
        Ok(Self { grid, units, demand })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn units(&self) -> &[Unit] {
        &self.units
    }

    pub fn demand(&self) -> &[f64] {
        &self.demand
    }

    pub fn periods(&self) -> usize {
        self.grid.periods()
    }

    pub fn with_demand(&self, demand: Vec<f64>) -> Result<Self> {
        Self::new(self.grid.clone(), self.units.clone(), demand)
    }

    /// The grid seen by unit `i` (its own pre-model offline time applied).
    pub fn unit_grid(&self, i: usize) -> Result<TimeGrid> {
        self.units[i].grid(&self.grid)
    }
}

/// Demand values from a one-column CSV (blank lines and `#` comments skipped;
/// a non-numeric first line is treated as a header).
pub fn parse_demand_csv(text: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let field = line.split(',').next().unwrap_or("").trim();
        if field.is_empty() || field.starts_with('#') {
            continue;
        }
        match field.parse::<f64>() {
            Ok(v) => out.push(v),
            Err(_) if k == 0 => continue,
            Err(_) => {
                return Err(Error::Parse {
                    line: k + 1,
                    msg: format!("not a number: {field:?}"),
                })
            }
        }
    }
    Ok(out)
}

/// Random instance with `units` units on `periods` unit-length periods.
/// Demand stays in `[1.05 Σ P_min, 0.9 Σ P_max]` and moves by at most
/// `0.5 Σ (P_max - P_min)` per period, so running every unit is feasible.
pub fn random_instance<R: Rng>(rng: &mut R, units: usize, periods: usize) -> Result<UcInstance> {
    let units: Vec<Unit> = (0..units)
        .map(|_| {
            let p_max = rng.gen_range(100.0..400.0);
            let p_min = p_max * rng.gen_range(0.2..0.5);
            let span = p_max - p_min;
            let heating = rng.gen_range(200.0..2000.0);
            let startup = StartupCostModel::exponential(heating, rng.gen_range(20.0..200.0), rng.gen_range(0.05..0.6))?;
            Ok(Unit {
                var_cost: rng.gen_range(10.0..40.0),
                fixed_cost: rng.gen_range(100.0..600.0),
                p_min,
                p_max,
                ramp_up: span * rng.gen_range(0.5..1.0),
                startup_ramp: p_min + (p_max - p_min) * rng.gen_range(0.2..1.0),
                ramp_down: span * rng.gen_range(0.5..1.0),
                shutdown_ramp: p_min + (p_max - p_min) * rng.gen_range(0.2..1.0),
                startup,
                pre_offline: Some(f64::from(rng.gen_range(0u8..5))),
            })
        })
        .collect::<Result<_>>()?;
    let low = 1.05 * units.iter().map(|u| u.p_min).sum::<f64>();
    let high = 0.9 * units.iter().map(|u| u.p_max).sum::<f64>();
    let step = 0.5 * units.iter().map(|u| u.p_max - u.p_min).sum::<f64>();
    let mut demand = Vec::with_capacity(periods);
    let mut d = rng.gen_range(low..high);
    for _ in 0..periods {
        demand.push(d);
        d = (d + rng.gen_range(-step..step)).clamp(low, high);
    }
    UcInstance::new(TimeGrid::uniform(periods, 0.0)?, units, demand)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Formulation {
    #[serde(rename = "1bin")]
    OneBin,
    #[serde(rename = "1bin-star")]
    OneBinStar,
    #[serde(rename = "3bin")]
    ThreeBin,
    #[serde(rename = "temp")]
    Temp,
    #[serde(rename = "bti")]
    Bti,
}

impl Formulation {
    pub const ALL: [Formulation; 5] = [
        Formulation::OneBin,
        Formulation::OneBinStar,
        Formulation::ThreeBin,
        Formulation::Temp,
        Formulation::Bti,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Formulation::OneBin => "1bin",
            Formulation::OneBinStar => "1bin-star",
            Formulation::ThreeBin => "3bin",
            Formulation::Temp => "temp",
            Formulation::Bti => "bti",
        }
    }
}

impl fmt::Display for Formulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Formulation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Formulation::ALL
            .into_iter()
            .find(|f| f.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown formulation {s:?} (expected 1bin, 1bin-star, 3bin, temp or bti)")))
    }
}

/// Column indices of the variables shared by every formulation.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitVars {
    pub u: Vec<usize>,
    pub p: Vec<usize>,
    pub cp: Vec<usize>,
    pub cs: usize,
}

/// A unit commitment model: the LP plus the bookkeeping needed to fix
/// schedules and to separate tree inequalities lazily.
#[derive(Debug, Clone)]
pub struct ModelHandle {
    lp: LinearProgram,
    units: Vec<UnitVars>,
    formulation: Option<Formulation>,
    lazy_units: Vec<usize>,
    cuts: usize,
}

impl ModelHandle {
    pub fn lp(&self) -> &LinearProgram {
        &self.lp
    }

    pub fn into_lp(self) -> LinearProgram {
        self.lp
    }

    pub fn units(&self) -> &[UnitVars] {
        &self.units
    }

    pub fn formulation(&self) -> Option<Formulation> {
        self.formulation
    }

    /// Units whose start-up costs are described only by lazily added cuts.
    pub fn lazy_units(&self) -> &[usize] {
        &self.lazy_units
    }

    /// Drops every integrality marker.
    pub fn relax(&mut self) {
        self.lp = self.lp.relaxed();
    }

    pub fn cut_count(&self) -> usize {
        self.cuts
    }

    /// Fixes unit `i` to the binary schedule `u` through column bounds.
    pub fn fix_schedule(&mut self, i: usize, u: &Schedule) -> Result<()> {
        if u.periods() != self.units[i].u.len() {
            return Err(Error::Dimension(format!(
                "schedule has {} periods, model has {}",
                u.periods(),
                self.units[i].u.len()
            )));
        }
        for t in 1..=u.periods() {
            let v = if u.is_on(t) { 1.0 } else { 0.0 };
            self.lp.set_bounds(self.units[i].u[t - 1], v, v);
        }
        Ok(())
    }

    /// Adds `cΣ_i >= Σ_t a_t u_{i,t}` and returns the row index.
    pub fn add_bti_cut(&mut self, i: usize, coefficients: &[f64]) -> Result<usize> {
        let vars = &self.units[i];
        if coefficients.len() != vars.u.len() {
            return Err(Error::Dimension(format!(
                "{} coefficients for {} periods",
                coefficients.len(),
                vars.u.len()
            )));
        }
        let mut row = vec![(vars.cs, 1.0)];
        row.extend(vars.u.iter().zip(coefficients).map(|(&c, &a)| (c, -a)));
        self.cuts += 1;
        let name = format!("bti_{}_{}", i + 1, self.cuts);
        self.lp.add_named_row(name, row, RowSense::Ge, 0.0)
    }

    pub fn write_lp<W: Write>(&self, out: W) -> Result<()> {
        lpformat::write_lp(&self.lp, out)
    }

    pub fn emit_lp(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path)?;
        self.write_lp(std::io::BufWriter::new(file))
    }
}

fn column(lp: &mut LinearProgram, name: String, lower: f64, upper: f64, cost: f64) -> usize {
    lp.add_column(ColumnSpec::continuous(name, lower, upper, cost))
}

fn declare_commitment(lp: &mut LinearProgram, i: usize, periods: usize) -> (Vec<usize>, usize) {
    let u = (1..=periods)
        .map(|t| lp.add_column(ColumnSpec::binary(format!("u_{i}_{t}"), 0.0)))
        .collect();
    let cs = column(lp, format!("cs_{i}"), 0.0, f64::INFINITY, 1.0);
    (u, cs)
}

/// Base model: objective, demand balance, production costs, production
/// limits and the ramping rows. Start-up costs enter through `cs_i`, which
/// a formulation must still define.
pub fn build_base(instance: &UcInstance) -> Result<ModelHandle> {
    let n = instance.periods();
    let mut lp = LinearProgram::new();
    let mut units = Vec::with_capacity(instance.units().len());
    for (k, _) in instance.units().iter().enumerate() {
        let i = k + 1;
        let (u, cs) = declare_commitment(&mut lp, i, n);
        let p = (1..=n).map(|t| column(&mut lp, format!("p_{i}_{t}"), 0.0, f64::INFINITY, 0.0)).collect();
        let cp = (1..=n).map(|t| column(&mut lp, format!("cp_{i}_{t}"), 0.0, f64::INFINITY, 1.0)).collect();
        units.push(UnitVars { u, p, cp, cs });
    }
    for t in 1..=n {
        let row = units.iter().map(|v| (v.p[t - 1], 1.0)).collect();
        lp.add_named_row(format!("demand_{t}"), row, RowSense::Eq, instance.demand()[t - 1])?;
    }
    for (k, (unit, v)) in instance.units().iter().zip(&units).enumerate() {
        let i = k + 1;
        let (u, p) = (&v.u, &v.p);
        for t in 0..n {
            let row = vec![(v.cp[t], 1.0), (p[t], -unit.var_cost), (u[t], -unit.fixed_cost)];
            lp.add_named_row(format!("cost_{i}_{}", t + 1), row, RowSense::Eq, 0.0)?;
        }
        for t in 0..n {
            lp.add_named_row(format!("pmin_{i}_{}", t + 1), vec![(p[t], 1.0), (u[t], -unit.p_min)], RowSense::Ge, 0.0)?;
            lp.add_named_row(format!("pmax_{i}_{}", t + 1), vec![(p[t], 1.0), (u[t], -unit.p_max)], RowSense::Le, 0.0)?;
        }
        for t in 1..n {
            // p_t - p_{t-1} - RU u_{t-1} - SU (u_t - u_{t-1}) + P̄ u_t <= P̄
            let row = vec![
                (p[t], 1.0),
                (p[t - 1], -1.0),
                (u[t - 1], -unit.ramp_up + unit.startup_ramp),
                (u[t], -unit.startup_ramp + unit.p_max),
            ];
            lp.add_named_row(format!("rampup_{i}_{}", t + 1), row, RowSense::Le, unit.p_max)?;
            // p_{t-1} - p_t - RD u_t - SD (u_{t-1} - u_t) + P̄ u_{t-1} <= P̄
            let row = vec![
                (p[t - 1], 1.0),
                (p[t], -1.0),
                (u[t], -unit.ramp_down + unit.shutdown_ramp),
                (u[t - 1], -unit.shutdown_ramp + unit.p_max),
            ];
            lp.add_named_row(format!("rampdown_{i}_{}", t + 1), row, RowSense::Le, unit.p_max)?;
        }
        for t in 0..n.saturating_sub(1) {
            // p_t - P̄ u_{t+1} - SD (u_t - u_{t+1}) <= 0
            let row = vec![
                (p[t], 1.0),
                (u[t + 1], -unit.p_max + unit.shutdown_ramp),
                (u[t], -unit.shutdown_ramp),
            ];
            lp.add_named_row(format!("shutdown_{i}_{}", t + 1), row, RowSense::Le, 0.0)?;
        }
    }
    Ok(ModelHandle {
        lp,
        units,
        formulation: None,
        lazy_units: Vec::new(),
        cuts: 0,
    })
}

/// Model with only the commitment variables and `cs_i`, minimizing `Σ cs_i`.
/// Used to read off a formulation's start-up cost at fixed schedules.
pub fn build_skeleton(instance: &UcInstance) -> ModelHandle {
    let n = instance.periods();
    let mut lp = LinearProgram::new();
    let units = (1..=instance.units().len())
        .map(|i| {
            let (u, cs) = declare_commitment(&mut lp, i, n);
            UnitVars {
                u,
                p: Vec::new(),
                cp: Vec::new(),
                cs,
            }
        })
        .collect();
    ModelHandle {
        lp,
        units,
        formulation: None,
        lazy_units: Vec::new(),
        cuts: 0,
    }
}

/// Base model with the chosen start-up cost formulation.
pub fn build(instance: &UcInstance, formulation: Formulation) -> Result<ModelHandle> {
    let mut model = build_base(instance)?;
    add_startup(&mut model, instance, formulation)?;
    Ok(model)
}

pub fn add_startup(model: &mut ModelHandle, instance: &UcInstance, formulation: Formulation) -> Result<()> {
    if model.formulation.is_some() {
        return Err(Error::Config("model already has a start-up cost formulation".into()));
    }
    if model.units.len() != instance.units().len() || model.units.first().is_some_and(|v| v.u.len() != instance.periods()) {
        return Err(Error::Dimension("model and instance do not match".into()));
    }
    match formulation {
        Formulation::OneBin => add_startup_1bin(model, instance)?,
        Formulation::OneBinStar => add_startup_1bin_star(model, instance)?,
        Formulation::ThreeBin => add_startup_3bin(model, instance)?,
        Formulation::Temp => add_startup_temp(model, instance)?,
        Formulation::Bti => add_startup_bti_mode(model, instance),
    }
    model.formulation = Some(formulation);
    Ok(())
}

fn unit_costs(instance: &UcInstance, k: usize) -> Result<DiscreteCosts> {
    Ok(DiscreteCosts::new(&instance.units()[k].startup, &instance.unit_grid(k)?))
}

/// Per-period start-up costs `cu_{i,t}` with `cs_i = Σ_t cu_{i,t}`; `row`
/// yields the coefficient on `u_{i,t-j}` (`j = 0` is `u_{i,t}`) of the row for `(t, l)`.
fn add_per_period(
    model: &mut ModelHandle,
    instance: &UcInstance,
    tag: &str,
    row: impl Fn(&DiscreteCosts, usize, usize, usize) -> f64,
) -> Result<()> {
    let n = instance.periods();
    for k in 0..model.units.len() {
        let i = k + 1;
        let costs = unit_costs(instance, k)?;
        let vars = model.units[k].clone();
        let cu: Vec<usize> = (1..=n)
            .map(|t| column(&mut model.lp, format!("cu_{i}_{t}"), 0.0, f64::INFINITY, 0.0))
            .collect();
        for t in 1..=n {
            for l in 0..t {
                let mut coeffs = vec![(cu[t - 1], 1.0)];
                coeffs.extend((0..=l).map(|j| (vars.u[t - 1 - j], -row(&costs, t, l, j))));
                model.lp.add_named_row(format!("{tag}_{i}_{t}_{l}"), coeffs, RowSense::Ge, 0.0)?;
            }
        }
        let mut sum = vec![(vars.cs, 1.0)];
        sum.extend(cu.iter().map(|&c| (c, -1.0)));
        model.lp.add_named_row(format!("sum_{i}"), sum, RowSense::Eq, 0.0)?;
    }
    Ok(())
}

/// `cu_{i,t} >= CU^{t,l} (u_{i,t} - Σ_{j=1..l} u_{i,t-j})` for all `l <= t-1`.
pub fn add_startup_1bin(model: &mut ModelHandle, instance: &UcInstance) -> Result<()> {
    add_per_period(model, instance, "onebin", |c, t, l, j| {
        if j == 0 {
            c.get(t, l)
        } else {
            -c.get(t, l)
        }
    })
}

/// `cu_{i,t} >= CU^{t,l} u_{i,t} - Σ_{j=1..l} (CU^{t,l} - CU^{t,j-1}) u_{i,t-j}`.
pub fn add_startup_1bin_star(model: &mut ModelHandle, instance: &UcInstance) -> Result<()> {
    add_per_period(model, instance, "onebinstar", |c, t, l, j| {
        if j == 0 {
            c.get(t, l)
        } else {
            -(c.get(t, l) - c.get(t, j - 1))
        }
    })
}

/// Start-up and shutdown indicators `v`, `w` with their linking rows.
fn add_indicators(model: &mut ModelHandle, instance: &UcInstance, k: usize) -> Result<(Vec<usize>, Vec<usize>)> {
    let n = instance.periods();
    let i = k + 1;
    let pre = instance.unit_grid(k)?.pre_offline();
    let u = model.units[k].u.clone();
    let v: Vec<usize> = (1..=n)
        .map(|t| model.lp.add_column(ColumnSpec::binary(format!("v_{i}_{t}"), 0.0)))
        .collect();
    let w: Vec<usize> = (1..=n)
        .map(|t| model.lp.add_column(ColumnSpec::binary(format!("w_{i}_{t}"), 0.0)))
        .collect();
    let first = if pre > 0.0 { 0.0 } else { -1.0 };
    model
        .lp
        .add_named_row(format!("ind_{i}_1"), vec![(v[0], 1.0), (w[0], -1.0), (u[0], -1.0)], RowSense::Eq, first)?;
    for t in 1..n {
        let row = vec![(v[t], 1.0), (w[t], -1.0), (u[t], -1.0), (u[t - 1], 1.0)];
        model.lp.add_named_row(format!("ind_{i}_{}", t + 1), row, RowSense::Eq, 0.0)?;
    }
    Ok((v, w))
}

/// Indicator-based formulation with start-up types `δ^{t,l}`. Period 1 gets
/// a single type `δ^{1,0}` when the unit starts the horizon offline.
pub fn add_startup_3bin(model: &mut ModelHandle, instance: &UcInstance) -> Result<()> {
    let n = instance.periods();
    for k in 0..model.units.len() {
        let i = k + 1;
        let costs = unit_costs(instance, k)?;
        let pre = instance.unit_grid(k)?.pre_offline();
        let (v, w) = add_indicators(model, instance, k)?;
        let mut objective = vec![(model.units[k].cs, 1.0)];
        for t in 1..=n {
            let types = match t {
                1 if pre > 0.0 => 0..1,
                _ => 1..t,
            };
            let mut typing = vec![(v[t - 1], 1.0)];
            for l in types {
                let d = column(&mut model.lp, format!("d_{i}_{t}_{l}"), 0.0, f64::INFINITY, 0.0);
                typing.push((d, -1.0));
                objective.push((d, -costs.get(t, l)));
                if (1..=t.saturating_sub(2)).contains(&l) {
                    model.lp.add_named_row(format!("link_{i}_{t}_{l}"), vec![(d, 1.0), (w[t - l - 1], -1.0)], RowSense::Le, 0.0)?;
                }
            }
            model.lp.add_named_row(format!("type_{i}_{t}"), typing, RowSense::Eq, 0.0)?;
        }
        model.lp.add_named_row(format!("sum_{i}"), objective, RowSense::Eq, 0.0)?;
    }
    Ok(())
}

/// Temperature-based formulation; needs exponential start-up costs.
pub fn add_startup_temp(model: &mut ModelHandle, instance: &UcInstance) -> Result<()> {
    let n = instance.periods();
    for k in 0..model.units.len() {
        let i = k + 1;
        let unit = &instance.units()[k];
        let Some(exp) = unit.startup.as_exponential() else {
            return Err(Error::Config(format!(
                "unit {i}: the temperature formulation needs an exponential start-up cost"
            )));
        };
        let (heating, fixed, loss) = (exp.heating_cost(), exp.fixed_cost(), exp.heat_loss());
        let grid = instance.unit_grid(k)?;
        let u = model.units[k].u.clone();
        let cs = model.units[k].cs;
        let (v, _) = add_indicators(model, instance, k)?;
        let tau: Vec<usize> = (1..=n)
            .map(|t| column(&mut model.lp, format!("tau_{i}_{t}"), 0.0, 1.0, 0.0))
            .collect();
        let gamma: Vec<usize> = (0..n)
            .map(|t| column(&mut model.lp, format!("g_{i}_{t}"), 0.0, f64::INFINITY, 0.0))
            .collect();
        let decay = |len: f64| (-loss * len).exp();
        model.lp.add_named_row(
            format!("temp_{i}_1"),
            vec![(tau[0], 1.0), (gamma[0], -1.0)],
            RowSense::Eq,
            decay(grid.pre_offline()),
        )?;
        for t in 1..n {
            let e = decay(grid.period_length(t));
            let row = vec![(tau[t], 1.0), (tau[t - 1], -e), (u[t - 1], -(1.0 - e)), (gamma[t], -1.0)];
            model.lp.add_named_row(format!("temp_{i}_{}", t + 1), row, RowSense::Eq, 0.0)?;
        }
        for t in 1..=n {
            model.lp.add_named_row(format!("warm_{i}_{t}"), vec![(tau[t - 1], 1.0), (u[t - 1], -1.0)], RowSense::Ge, 0.0)?;
            let e = decay(grid.offline_length(t, t - 1)?);
            model.lp.add_named_row(format!("rti0_{i}_{t}"), vec![(tau[t - 1], 1.0), (u[t - 1], -(1.0 - e))], RowSense::Ge, e)?;
            for l in 1..t.saturating_sub(1) {
                let e = decay(grid.offline_length(t, l)?);
                let row = vec![(tau[t - 1], 1.0), (u[t - 1], -(1.0 - e)), (tau[t - 1 - l], -e)];
                model.lp.add_named_row(format!("rti_{i}_{t}_{l}"), row, RowSense::Ge, 0.0)?;
            }
        }
        let mut sum = vec![(cs, 1.0)];
        sum.extend(v.iter().map(|&c| (c, -fixed)));
        sum.extend(gamma.iter().map(|&c| (c, -heating)));
        model.lp.add_named_row(format!("sum_{i}"), sum, RowSense::Eq, 0.0)?;
    }
    Ok(())
}

/// No static rows: `cs_i >= 0` only, with every unit marked for lazy separation.
pub fn add_startup_bti_mode(model: &mut ModelHandle, _instance: &UcInstance) {
    model.lazy_units = (0..model.units.len()).collect();
}
