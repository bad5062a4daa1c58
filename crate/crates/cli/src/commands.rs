use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use btiepi_core::lpsolve::integrality_gap;
use btiepi_core::oracle::{
    facet_census, hull_value, verify_equality_characterization, verify_irredundancy, verify_validity,
    TreeCoefficients,
};
use btiepi_core::ucmodel::{build, parse_demand_csv};
use btiepi_core::{
    catalan, enumerate_trees, envelope, envelope_certified, find_cartesian_tree, separate, Error, FracPoint,
    Result, Separation, StartupCostModel, TimeGrid, UcInstance,
};

use crate::args::{Command, CostArgs, OracleCheck};

pub struct Outcome {
    pub payload: Value,
    /// Set when the command found a violated cut or a counterexample.
    pub found_violation: bool,
}

impl Outcome {
    fn clean(payload: Value) -> Self {
        Self {
            payload,
            found_violation: false,
        }
    }
}

fn bad(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

fn parse_list(text: &str, what: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<f64>().map_err(|_| bad(format!("{what}: {s:?} is not a number"))))
        .collect()
}

pub fn parse_cost(spec: &str) -> Result<StartupCostModel> {
    let (kind, rest) = spec
        .split_once(':')
        .ok_or_else(|| bad(format!("cost {spec:?}: expected exp:V,f,LAMBDA or table:L:C,...")))?;
    match kind {
        "exp" => match parse_list(rest, "cost")?.as_slice() {
            &[v, f, lambda] => StartupCostModel::exponential(v, f, lambda),
            _ => Err(bad("exp cost needs three values V,f,LAMBDA")),
        },
        "table" => {
            let mut points = vec![(0.0, 0.0)];
            for pair in rest.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                let (l, c) = pair
                    .split_once(':')
                    .ok_or_else(|| bad(format!("table entry {pair:?}: expected L:C")))?;
                let l: f64 = l.parse().map_err(|_| bad(format!("table entry {pair:?}")))?;
                let c: f64 = c.parse().map_err(|_| bad(format!("table entry {pair:?}")))?;
                if (l, c) != (0.0, 0.0) {
                    points.push((l, c));
                }
            }
            StartupCostModel::tabulated(points)
        }
        _ => Err(bad(format!("unknown cost kind {kind:?}"))),
    }
}

fn grid(args: &CostArgs, periods: usize) -> Result<TimeGrid> {
    match &args.delta {
        Some(text) => {
            let lengths = parse_list(text, "delta")?;
            if lengths.len() != periods {
                return Err(Error::Dimension(format!(
                    "{} period lengths for {periods} periods",
                    lengths.len()
                )));
            }
            TimeGrid::new(lengths, args.pre)
        }
        None => TimeGrid::uniform(periods, args.pre),
    }
}

fn load_instance(path: &Path, demand: Option<&Path>) -> Result<UcInstance> {
    let instance = UcInstance::load(path)?;
    match demand {
        Some(csv) => instance.with_demand(parse_demand_csv(&std::fs::read_to_string(csv)?)?),
        None => Ok(instance),
    }
}

pub fn run(command: &Command) -> Result<Outcome> {
    match command {
        Command::Separate { u, c, cost } => {
            let u = parse_list(u, "u")?;
            let model = parse_cost(&cost.cost)?;
            let grid = grid(cost, u.len())?;
            let point = FracPoint::new(u, *c)?;
            Ok(match separate(&point, &model, &grid)? {
                Separation::InEpigraph => Outcome::clean(json!({ "in_epigraph": true })),
                Separation::Violated(v) => Outcome {
                    payload: json!({
                        "cut": {
                            "a": v.cut.coefficients(),
                            "rhs_at_point": v.rhs_at_point,
                            "violation": v.violation,
                            "tree": v.cut.tree().to_string(),
                        }
                    }),
                    found_violation: true,
                },
            })
        }
        Command::Envelope { u, certify, cost } => {
            let u = parse_list(u, "u")?;
            let model = parse_cost(&cost.cost)?;
            let grid = grid(cost, u.len())?;
            if *certify {
                let env = envelope_certified(&u, &model, &grid)?;
                Ok(Outcome::clean(json!({
                    "value": env.value,
                    "tree": env.cut.tree().to_string(),
                    "a": env.cut.coefficients(),
                })))
            } else {
                Ok(Outcome::clean(json!({ "value": envelope(&u, &model, &grid)? })))
            }
        }
        Command::Tree { u } => {
            let u = parse_list(u, "u")?;
            let tree = find_cartesian_tree(&u)?;
            let (top_left, top_right) = tree.top_nodes();
            Ok(Outcome::clean(json!({
                "tree": tree.to_string(),
                "root": tree.root(),
                "top_left": top_left,
                "top_right": top_right,
            })))
        }
        Command::Trees { n, count, list } => {
            if *list {
                let trees: Vec<String> = enumerate_trees(*n)?.map(|t| t.to_string()).collect();
                Ok(Outcome::clean(json!(trees)))
            } else if *count {
                Ok(Outcome::clean(json!(catalan(*n))))
            } else {
                Err(bad("trees: pass --count or --list"))
            }
        }
        Command::Facets { periods, detail, cost } => {
            let model = parse_cost(&cost.cost)?;
            let census = facet_census(&model, &grid(cost, *periods)?)?;
            let payload = if *detail {
                serde_json::to_value(&census)?
            } else {
                json!({
                    "distinct_btis": census.distinct_btis,
                    "trivial": census.trivial,
                    "total": census.total,
                })
            };
            Ok(Outcome {
                payload,
                found_violation: census.facet_confirmed != census.distinct_btis,
            })
        }
        Command::Oracle {
            check,
            periods,
            seed,
            samples,
            cost,
        } => {
            let model = parse_cost(&cost.cost)?;
            let grid = grid(cost, *periods)?;
            oracle(*check, &model, &grid, *seed, *samples)
        }
        Command::Build {
            instance,
            formulation,
            demand,
            out,
        } => {
            let instance = load_instance(instance, demand.as_deref())?;
            let model = build(&instance, *formulation)?;
            model.emit_lp(out)?;
            let lp = model.lp();
            Ok(Outcome::clean(json!({
                "formulation": formulation,
                "columns": lp.columns().len(),
                "rows": lp.rows().len(),
                "integer_columns": lp.columns().iter().filter(|c| c.integer).count(),
                "lazy_units": model.lazy_units().len(),
                "out": out.display().to_string(),
            })))
        }
        Command::Gap {
            instance,
            formulation,
            demand,
        } => {
            let instance = load_instance(instance, demand.as_deref())?;
            let report = integrality_gap(&instance, *formulation)?;
            Ok(Outcome::clean(serde_json::to_value(report)?))
        }
    }
}

fn random_point(rng: &mut ChaCha8Rng, periods: usize) -> Vec<f64> {
    (0..periods)
        .map(|_| match rng.gen_range(0..10) {
            0 => 0.0,
            1 => 1.0,
            _ => rng.gen_range(0.0..1.0),
        })
        .collect()
}

fn oracle(
    check: OracleCheck,
    cost: &StartupCostModel,
    grid: &TimeGrid,
    seed: u64,
    samples: usize,
) -> Result<Outcome> {
    let (payload, passed) = match check {
        OracleCheck::Validity => {
            let r = verify_validity(cost, grid)?;
            (serde_json::to_value(&r)?, r.passed())
        }
        OracleCheck::Equality => {
            let r = verify_equality_characterization(cost, grid)?;
            (serde_json::to_value(&r)?, r.passed())
        }
        OracleCheck::Irredundancy => {
            let r = verify_irredundancy(cost, grid)?;
            (serde_json::to_value(&r)?, r.passed())
        }
        OracleCheck::Separation => {
            let n = grid.periods();
            let table = TreeCoefficients::new(cost, grid)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut worst = 0.0f64;
            let mut disagreements = 0;
            for _ in 0..samples {
                let u = random_point(&mut rng, n);
                let (best, _) = table.max_rhs(&u);
                let c = best * rng.gen_range(0.0..1.5);
                let verdict = separate(&FracPoint::new(u, c)?, cost, grid)?;
                let brute = best - c > btiepi_core::bti::SEPARATION_TOL;
                match verdict {
                    Separation::Violated(v) => {
                        worst = worst.max((v.rhs_at_point - best).abs());
                        disagreements += usize::from(!brute);
                    }
                    Separation::InEpigraph => disagreements += usize::from(brute),
                }
            }
            let passed = disagreements == 0 && worst <= 1e-9;
            let payload = json!({
                "periods": n,
                "samples": samples,
                "seed": seed,
                "disagreements": disagreements,
                "max_rhs_error": worst,
            });
            (payload, passed)
        }
        OracleCheck::Hull => {
            let n = grid.periods();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut worst = 0.0f64;
            for _ in 0..samples {
                let u = random_point(&mut rng, n);
                let gap = (envelope(&u, cost, grid)? - hull_value(&u, cost, grid)?).abs();
                worst = worst.max(gap);
            }
            let passed = worst <= 1e-6;
            (json!({ "periods": n, "samples": samples, "seed": seed, "max_difference": worst }), passed)
        }
    };
    Ok(Outcome {
        payload,
        found_violation: !passed,
    })
}
