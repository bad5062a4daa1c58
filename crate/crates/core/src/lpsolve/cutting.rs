use std::collections::HashSet;

use rayon::prelude::*;
use serde::Serialize;

use super::mip::{solve_mip_with, MipOptions};
use super::simplex::solve_lp;
use super::{SolveResult, Status};
use crate::bti::{separate_with, Separation, Threshold};
use crate::error::{Error, Result};
use crate::schedule::FracPoint;
use crate::ucmodel::{build, Formulation, ModelHandle, UcInstance};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CuttingPlaneOptions {
    pub max_rounds: usize,
    /// Smallest violation for which a cut is added.
    pub violation: f64,
}

impl Default for CuttingPlaneOptions {
    fn default() -> Self {
        Self {
            max_rounds: 200,
            violation: 1e-7,
        }
    }
}

/// One cut added by the driver.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CutLog {
    pub round: usize,
    pub unit: usize,
    pub violation: f64,
    pub tree: String,
}

#[derive(Debug, Clone)]
pub struct CuttingPlaneResult {
    pub result: SolveResult,
    pub model: ModelHandle,
    pub rounds: usize,
    /// LP value after each round, starting with the one before any cut.
    pub bounds: Vec<f64>,
    pub log: Vec<CutLog>,
    /// False when the round limit stopped the loop with cuts still violated.
    pub converged: bool,
}

impl CuttingPlaneResult {
    pub fn cuts(&self) -> usize {
        self.log.len()
    }
}

fn cut_key(coefficients: &[f64]) -> Vec<i64> {
    coefficients.iter().map(|a| (a * 1e12).round() as i64).collect()
}

/// Solves the LP relaxation of `model`, separating tree inequalities for its
/// lazy units until none is violated.
pub fn cutting_plane_solve(
    model: &ModelHandle,
    instance: &UcInstance,
    options: &CuttingPlaneOptions,
) -> Result<CuttingPlaneResult> {
    let mut model = model.clone();
    model.relax();
    let lazy = model.lazy_units().to_vec();
    let grids = lazy
        .iter()
        .map(|&i| instance.unit_grid(i))
        .collect::<Result<Vec<_>>>()?;
    let mut seen: Vec<HashSet<Vec<i64>>> = vec![HashSet::new(); lazy.len()];
    let mut bounds = Vec::new();
    let mut log = Vec::new();
    let mut rounds = 0;
    loop {
        let result = solve_lp(model.lp())?;
        if result.status != Status::Optimal {
            return Ok(CuttingPlaneResult {
                result,
                model,
                rounds,
                bounds,
                log,
                converged: false,
            });
        }
        bounds.push(result.objective);
        let found = lazy
            .par_iter()
            .zip(&grids)
            .map(|(&i, grid)| {
                let vars = &model.units()[i];
                let u = vars.u.iter().map(|&j| result.x[j]).collect();
                let point = FracPoint::new(u, result.x[vars.cs])?;
                let cost = &instance.units()[i].startup;
                separate_with(&point, cost, grid, Threshold::Absolute(options.violation))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut added = 0;
        for ((k, &i), sep) in lazy.iter().enumerate().zip(found) {
            let Separation::Violated(v) = sep else { continue };
            if !seen[k].insert(cut_key(v.cut.coefficients())) {
                log::warn!("unit {} repeated a cut with violation {}", i + 1, v.violation);
                continue;
            }
            model.add_bti_cut(i, v.cut.coefficients())?;
            log.push(CutLog {
                round: rounds + 1,
                unit: i,
                violation: v.violation,
                tree: v.cut.tree().to_string(),
            });
            added += 1;
        }
        if added == 0 {
            return Ok(CuttingPlaneResult {
                result,
                model,
                rounds,
                bounds,
                log,
                converged: true,
            });
        }
        rounds += 1;
        log::debug!("round {rounds}: {added} cuts, bound {}", result.objective);
        if rounds >= options.max_rounds {
            log::warn!("cutting plane stopped after {rounds} rounds");
            let result = solve_lp(model.lp())?;
            if result.is_optimal() {
                bounds.push(result.objective);
            }
            return Ok(CuttingPlaneResult {
                result,
                model,
                rounds,
                bounds,
                log,
                converged: false,
            });
        }
    }
}

/// LP relaxation value of `formulation` and the number of cuts and rounds
/// it took (both zero unless tree inequalities are separated).
pub fn relaxation_bound(instance: &UcInstance, formulation: Formulation) -> Result<(f64, usize, usize)> {
    let model = build(instance, formulation)?;
    let run = cutting_plane_solve(&model, instance, &CuttingPlaneOptions::default())?;
    if !run.result.is_optimal() {
        return Err(Error::InvalidInstance(format!(
            "{formulation} relaxation ended with status {:?}",
            run.result.status
        )));
    }
    Ok((run.result.objective, run.cuts(), run.rounds))
}

/// Optimal cost of the instance, found by branch and bound on the 3-Bin model.
pub fn mip_objective(instance: &UcInstance) -> Result<f64> {
    let model = build(instance, Formulation::ThreeBin)?;
    let lp = model.lp();
    let mut priority = vec![0; lp.columns().len()];
    for vars in model.units() {
        for &j in &vars.u {
            priority[j] = 1;
        }
    }
    let options = MipOptions {
        priority,
        ..MipOptions::default()
    };
    let result = solve_mip_with(lp, &options)?;
    match result.status {
        Status::Optimal => Ok(result.objective),
        status => Err(Error::InvalidInstance(format!("branch and bound ended with status {status:?}"))),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapReport {
    pub formulation: Formulation,
    pub lp: f64,
    pub mip: f64,
    /// `(mip - lp) / mip`, or 0 when both are 0.
    pub gap: f64,
    pub cuts: usize,
    pub rounds: usize,
}

pub fn integrality_gap(instance: &UcInstance, formulation: Formulation) -> Result<GapReport> {
    let (lp, cuts, rounds) = relaxation_bound(instance, formulation)?;
    let mip = mip_objective(instance)?;
    Ok(GapReport {
        formulation,
        lp,
        mip,
        gap: if mip == 0.0 && lp == 0.0 { 0.0 } else { (mip - lp) / mip },
        cuts,
        rounds,
    })
}
