//! Desk-scale linear and mixed-integer programming: a dense bounded-variable
//! primal simplex, best-first branch and bound, and the cutting-plane driver
//! for lazily separated tree inequalities.

mod cutting;
mod mip;
mod simplex;

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};

pub use cutting::{cutting_plane_solve, integrality_gap, mip_objective, relaxation_bound, CutLog, CuttingPlaneOptions, CuttingPlaneResult, GapReport};
pub use mip::{solve_mip, solve_mip_with, MipOptions};
pub use simplex::{solve_lp, solve_lp_with, SimplexOptions};

/// Residual allowed between `A x` and the row bounds of an optimal solution.
pub const FEASIBILITY_RESIDUAL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RowSense {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ColumnSpec {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
    pub cost: f64,
    pub integer: bool,
}

impl ColumnSpec {
    pub fn continuous(name: impl Into<String>, lower: f64, upper: f64, cost: f64) -> Self {
        Self {
            name: name.into(),
            lower,
            upper,
            cost,
            integer: false,
        }
    }

    pub fn binary(name: impl Into<String>, cost: f64) -> Self {
        Self {
            name: name.into(),
            lower: 0.0,
            upper: 1.0,
            cost,
            integer: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub name: String,
    pub coeffs: Vec<(usize, f64)>,
    pub sense: RowSense,
    pub rhs: f64,
}

impl Row {
    pub fn activity(&self, x: &[f64]) -> f64 {
        self.coeffs.iter().map(|&(j, a)| a * x[j]).sum()
    }

    /// Amount by which `x` violates this row (0 when satisfied).
    pub fn violation(&self, x: &[f64]) -> f64 {
        let act = self.activity(x);
        match self.sense {
            RowSense::Le => (act - self.rhs).max(0.0),
            RowSense::Ge => (self.rhs - act).max(0.0),
            RowSense::Eq => (act - self.rhs).abs(),
        }
    }
}

/// `min c·x` subject to row constraints and column bounds.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LinearProgram {
    columns: Vec<ColumnSpec>,
    rows: Vec<Row>,
    index: HashMap<String, usize>,
}

impl LinearProgram {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a column and returns its index. Column names must be unique;
    /// a repeated name panics.
    pub fn add_column(&mut self, column: ColumnSpec) -> usize {
        let k = self.columns.len();
        let previous = self.index.insert(column.name.clone(), k);
        assert!(previous.is_none(), "duplicate column name {}", column.name);
        self.columns.push(column);
        k
    }

    pub fn try_add_column(&mut self, column: ColumnSpec) -> Result<usize> {
        if self.index.contains_key(&column.name) {
            return Err(Error::Config(format!("duplicate column name {}", column.name)));
        }
        if column.lower.is_nan() || column.upper.is_nan() || column.lower > column.upper || !column.cost.is_finite() {
            return Err(Error::Config(format!(
                "column {} has bounds [{}, {}] and cost {}",
                column.name, column.lower, column.upper, column.cost
            )));
        }
        Ok(self.add_column(column))
    }

    pub fn add_row(&mut self, coeffs: Vec<(usize, f64)>, sense: RowSense, rhs: f64) -> Result<usize> {
        let name = format!("r{}", self.rows.len() + 1);
        self.add_named_row(name, coeffs, sense, rhs)
    }

    /// Adds a row; repeated column entries are summed and zeros dropped.
    pub fn add_named_row(
        &mut self,
        name: impl Into<String>,
        coeffs: Vec<(usize, f64)>,
        sense: RowSense,
        rhs: f64,
    ) -> Result<usize> {
        let name = name.into();
        if !rhs.is_finite() {
            return Err(Error::Config(format!("row {name} has right-hand side {rhs}")));
        }
        let mut merged: Vec<(usize, f64)> = Vec::with_capacity(coeffs.len());
        let mut sorted = coeffs;
        sorted.sort_by_key(|&(j, _)| j);
        for (j, a) in sorted {
            if j >= self.columns.len() {
                return Err(Error::Config(format!("row {name} references column {j}")));
            }
            if !a.is_finite() {
                return Err(Error::Config(format!("row {name} has coefficient {a}")));
            }
            match merged.last_mut() {
                Some(last) if last.0 == j => last.1 += a,
                _ => merged.push((j, a)),
            }
        }
        merged.retain(|&(_, a)| a != 0.0);
        self.rows.push(Row {
            name,
            coeffs: merged,
            sense,
            rhs,
        });
        Ok(self.rows.len() - 1)
    }

    pub fn columns(&self) -> &[ColumnSpec] {
        &self.columns
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn set_bounds(&mut self, column: usize, lower: f64, upper: f64) {
        self.columns[column].lower = lower;
        self.columns[column].upper = upper;
    }

    pub fn set_cost(&mut self, column: usize, cost: f64) {
        self.columns[column].cost = cost;
    }

    pub fn set_integer(&mut self, column: usize, integer: bool) {
        self.columns[column].integer = integer;
    }

    pub fn objective(&self, x: &[f64]) -> f64 {
        self.columns.iter().zip(x).map(|(c, v)| c.cost * v).sum()
    }

    /// Largest row or bound violation of `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let rows = self.rows.iter().map(|r| r.violation(x));
        let bounds = self
            .columns
            .iter()
            .zip(x)
            .map(|(c, &v)| (c.lower - v).max(v - c.upper).max(0.0));
        rows.chain(bounds).fold(0.0, f64::max)
    }

    /// Copy with every integrality marker removed.
    pub fn relaxed(&self) -> Self {
        let mut lp = self.clone();
        for c in &mut lp.columns {
            c.integer = false;
        }
        lp
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub status: Status,
    pub objective: f64,
    pub x: Vec<f64>,
    pub iterations: usize,
}

impl SolveResult {
    pub fn is_optimal(&self) -> bool {
        self.status == Status::Optimal
    }
}
