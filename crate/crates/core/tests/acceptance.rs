//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use btiepi_core::lpsolve::{cutting_plane_solve, mip_objective, relaxation_bound, solve_mip, CuttingPlaneOptions};
use btiepi_core::oracle::{
    facet_census, verify_equality_characterization, verify_irredundancy, verify_validity, TreeCoefficients,
};
use btiepi_core::schedule::{dcu_sum, delta_sum};
use btiepi_core::ucmodel::{add_startup, build_skeleton, random_instance, Formulation, UcInstance, Unit};
use btiepi_core::{
    catalan, envelope, separate_counted, separate_with, FracPoint, Schedule, Separation, StartupCostModel,
    Threshold, TimeGrid,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn random_exp(rng: &mut impl Rng) -> StartupCostModel {
    StartupCostModel::exponential(
        rng.gen_range(10.0..2000.0),
        rng.gen_range(0.0..200.0),
        rng.gen_range(0.05..1.5),
    )
    .unwrap()
}

fn random_grid(rng: &mut impl Rng, periods: usize) -> TimeGrid {
    let lengths = (0..periods).map(|_| rng.gen_range(0.5..2.0)).collect();
    TimeGrid::new(lengths, rng.gen_range(0.0..4.0)).unwrap()
}

fn random_u(rng: &mut impl Rng, periods: usize) -> Vec<f64> {
    (0..periods)
        .map(|_| match rng.gen_range(0..10) {
            0 => 0.0,
            1 => 1.0,
            _ => rng.gen_range(0.0..1.0),
        })
        .collect()
}

fn within(start: Instant, limit: Duration, detail: String) -> Outcome {
    let took = start.elapsed();
    if took <= limit {
        Ok(format!("{detail}; {:.1} s", took.as_secs_f64()))
    } else {
        Err(format!("{detail}; took {:.1} s, limit {} s", took.as_secs_f64(), limit.as_secs()))
    }
}

fn separation_exactness() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    let mut violated = 0;
    for periods in 1..=9 {
        let cost = random_exp(&mut rng);
        let grid = random_grid(&mut rng, periods);
        let table = TreeCoefficients::new(&cost, &grid).map_err(|e| e.to_string())?;
        for _ in 0..200 {
            let u = random_u(&mut rng, periods);
            let (best, _) = table.max_rhs(&u);
            let c = best * rng.gen_range(0.0..1.5);
            let point = FracPoint::new(u.clone(), c).unwrap();
            let verdict = separate_with(&point, &cost, &grid, Threshold::Absolute(1e-9)).unwrap();
            let env = envelope(&u, &cost, &grid).unwrap();
            worst = worst.max((env - best).abs());
            let brute_violated = best - c > 1e-9;
            match verdict {
                Separation::Violated(v) => {
                    violated += 1;
                    worst = worst.max((v.rhs_at_point - best).abs());
                    if !brute_violated {
                        return Err(format!("T={periods} u={u:?} c={c}: cut reported, brute max {best}"));
                    }
                }
                Separation::InEpigraph if brute_violated => {
                    return Err(format!("T={periods} u={u:?} c={c}: no cut, brute max {best}"));
                }
                Separation::InEpigraph => {}
            }
        }
    }
    if worst > 1e-9 {
        return Err(format!("largest deviation from brute force {worst:e} > 1e-9"));
    }
    within(
        start,
        Duration::from_secs(60),
        format!("1800 points, {violated} violated, max deviation {worst:.1e}"),
    )
}

fn validity_sweep() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut checked = 0u64;
    for periods in 1..=8 {
        let cost = random_exp(&mut rng);
        let grid = random_grid(&mut rng, periods);
        let report = verify_validity(&cost, &grid).map_err(|e| e.to_string())?;
        if !report.passed() {
            return Err(format!("T={periods}: {} violations, e.g. {:?}", report.violations, report.examples));
        }
        checked += report.trees as u64 * report.schedules;
    }
    within(start, Duration::from_secs(120), format!("{checked} tree/schedule pairs, 0 violations"))
}

fn equality_characterization() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut pairs = 0;
    for periods in 1..=7 {
        let cost = random_exp(&mut rng);
        let grid = random_grid(&mut rng, periods);
        let report = verify_equality_characterization(&cost, &grid).map_err(|e| e.to_string())?;
        if !report.passed() {
            return Err(format!(
                "T={periods}: {} if / {} only-if counterexamples",
                report.if_failures, report.only_if_failures
            ));
        }
        pairs += report.pairs;
    }
    within(start, Duration::from_secs(600), format!("{pairs} pairs, 0 counterexamples"))
}

fn facet_count() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut found = Vec::new();
    for periods in 2..=7 {
        let cost = random_exp(&mut rng);
        let grid = random_grid(&mut rng, periods);
        let census = facet_census(&cost, &grid).map_err(|e| e.to_string())?;
        let c = catalan(periods) as usize;
        if census.distinct_btis != c || census.facet_confirmed != c || census.total != c + 2 * periods {
            return Err(format!(
                "T={periods}: distinct {}, confirmed {}, total {}; expected {c}, {c}, {}",
                census.distinct_btis,
                census.facet_confirmed,
                census.total,
                c + 2 * periods
            ));
        }
        found.push(census.distinct_btis);
    }
    within(start, Duration::from_secs(600), format!("distinct = confirmed = {found:?}, total = C_T + 2T"))
}

fn irredundancy() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut pairs = 0;
    for periods in 1..=6 {
        let cost = random_exp(&mut rng);
        let grid = random_grid(&mut rng, periods);
        let report = verify_irredundancy(&cost, &grid).map_err(|e| e.to_string())?;
        if !report.passed() {
            return Err(format!("T={periods}: {} pairs not separated", report.failures));
        }
        pairs += report.ordered_pairs;
    }
    let linear = StartupCostModel::tabulated(vec![(0.0, 0.0), (10.0, 40.0)]).unwrap();
    let census = facet_census(&linear, &TimeGrid::uniform(3, 1.0).unwrap()).map_err(|e| e.to_string())?;
    if census.duplicates.is_empty() {
        return Err("linear cost at T=3 produced no duplicate coefficient vectors".into());
    }
    within(
        start,
        Duration::from_secs(600),
        format!(
            "{pairs} ordered pairs separated; linear cost at T=3 has {} duplicates",
            census.duplicates.len()
        ),
    )
}

fn homogeneity() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let periods = rng.gen_range(1..=12);
        let cost = random_exp(&mut rng);
        let grid = random_grid(&mut rng, periods);
        let u = random_u(&mut rng, periods);
        let top = u.iter().copied().fold(0.0, f64::max);
        let alpha = if top > 0.0 { rng.gen_range(0.0..=1.0 / top) } else { rng.gen_range(0.0..1.0) };
        let scaled: Vec<f64> = u.iter().map(|v| (alpha * v).min(1.0)).collect();
        let lhs = envelope(&scaled, &cost, &grid).unwrap();
        let rhs = alpha * envelope(&u, &cost, &grid).unwrap();
        worst = worst.max((lhs - rhs).abs());
    }
    if worst > 1e-9 {
        return Err(format!("max |env(au) - a env(u)| = {worst:e} > 1e-9"));
    }
    within(start, Duration::from_secs(60), format!("1000 samples, max deviation {worst:.1e}"))
}

fn random_concave_table(rng: &mut impl Rng) -> StartupCostModel {
    let mut points = vec![(0.0, 0.0)];
    let mut slope = rng.gen_range(50.0..500.0);
    let (mut l, mut c) = (0.0, 0.0);
    for _ in 0..rng.gen_range(1..6) {
        let step = rng.gen_range(0.3..3.0);
        l += step;
        c += slope * step;
        points.push((l, c));
        slope *= rng.gen_range(0.0..1.0);
    }
    StartupCostModel::tabulated(points).unwrap()
}

/// Smallest increment of `delta_sum` along `l` and along `r`.
fn min_increment(cost: &StartupCostModel, grid: &TimeGrid) -> f64 {
    let n = grid.periods();
    let mut least = f64::INFINITY;
    for t in 1..=n {
        for l in 0..t {
            for r in 0..=n - t {
                let here = delta_sum(cost, grid, t, l, r).unwrap();
                if l + 1 < t {
                    least = least.min(delta_sum(cost, grid, t, l + 1, r).unwrap() - here);
                }
                if r < n - t {
                    least = least.min(delta_sum(cost, grid, t, l, r + 1).unwrap() - here);
                }
            }
        }
    }
    least
}

fn monotonicity() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut concave_min = f64::INFINITY;
    let mut exp_min = f64::INFINITY;
    for periods in 2..=12 {
        for _ in 0..5 {
            let grid = random_grid(&mut rng, periods);
            let table = random_concave_table(&mut rng);
            concave_min = concave_min.min(min_increment(&table, &grid));
            let exp = random_exp(&mut rng);
            exp_min = exp_min.min(min_increment(&exp, &grid));
        }
    }
    // Tabulated values are interpolated, so allow rounding noise only.
    if concave_min < -1e-9 {
        return Err(format!("concave table decreases by {:e}", -concave_min));
    }
    if exp_min <= 0.0 {
        return Err(format!("exponential cost not strictly increasing (min step {exp_min:e})"));
    }
    within(
        start,
        Duration::from_secs(60),
        format!("min step concave {concave_min:.2e}, exponential {exp_min:.2e} > 0"),
    )
}

fn desk_unit(rng: &mut impl Rng) -> Unit {
    Unit {
        var_cost: 20.0,
        fixed_cost: 100.0,
        p_min: 50.0,
        p_max: 200.0,
        ramp_up: 100.0,
        startup_ramp: 80.0,
        ramp_down: 100.0,
        shutdown_ramp: 80.0,
        startup: random_exp(rng),
        pre_offline: Some(f64::from(rng.gen_range(0u8..4))),
    }
}

fn fixed_cost(instance: &UcInstance, formulation: Formulation, schedules: &[Schedule]) -> Result<f64, String> {
    let mut model = build_skeleton(instance);
    add_startup(&mut model, instance, formulation).map_err(|e| e.to_string())?;
    for (i, s) in schedules.iter().enumerate() {
        model.fix_schedule(i, s).map_err(|e| e.to_string())?;
    }
    let result = if formulation == Formulation::Bti {
        cutting_plane_solve(&model, instance, &CuttingPlaneOptions::default())
            .map_err(|e| e.to_string())?
            .result
    } else {
        solve_mip(model.lp()).map_err(|e| e.to_string())?
    };
    if !result.is_optimal() {
        return Err(format!("{formulation}: status {:?}", result.status));
    }
    Ok(result.objective)
}

fn integer_exactness() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut cases = 0;
    let mut worst = 0.0f64;
    for (units, max_periods) in [(1usize, 6usize), (2, 3)] {
        for periods in 1..=max_periods {
            let grid = random_grid(&mut rng, periods);
            let inst = UcInstance::new(
                grid,
                (0..units).map(|_| desk_unit(&mut rng)).collect(),
                vec![100.0; periods],
            )
            .map_err(|e| e.to_string())?;
            let grids: Vec<TimeGrid> = (0..units).map(|i| inst.unit_grid(i).unwrap()).collect();
            for mask in 0..1u64 << (units * periods) {
                let schedules: Vec<Schedule> = (0..units)
                    .map(|i| Schedule::from_mask(periods, mask >> (i * periods)))
                    .collect();
                let expected: f64 = schedules
                    .iter()
                    .enumerate()
                    .map(|(i, s)| dcu_sum(&inst.units()[i].startup, &grids[i], s).unwrap())
                    .sum();
                for f in Formulation::ALL {
                    let got = fixed_cost(&inst, f, &schedules)?;
                    let err = (got - expected).abs();
                    worst = worst.max(err);
                    if err > 1e-7 {
                        return Err(format!("{f} on {schedules:?}: {got} vs {expected}"));
                    }
                    cases += 1;
                }
            }
        }
    }
    within(start, Duration::from_secs(600), format!("{cases} fixed schedules, max error {worst:.1e}"))
}

fn dominance() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut widest = 0.0f64;
    let mut failures = Vec::new();
    for k in 0..20 {
        let units = rng.gen_range(2..=3);
        let inst = random_instance(&mut rng, units, 12).map_err(|e| e.to_string())?;
        let mut z = Vec::new();
        let mut cuts = 0;
        for f in [
            Formulation::OneBin,
            Formulation::OneBinStar,
            Formulation::ThreeBin,
            Formulation::Bti,
            Formulation::Temp,
        ] {
            let (value, c, _) = relaxation_bound(&inst, f).map_err(|e| format!("instance {k}: {e}"))?;
            if f == Formulation::Bti {
                cuts = c;
            }
            z.push(value);
        }
        let (one, star, three, bti, temp) = (z[0], z[1], z[2], z[3], z[4]);
        let mip = mip_objective(&inst).map_err(|e| format!("instance {k}: {e}"))?;
        let gap = |lp: f64| (mip - lp) / mip;
        let mut broken = Vec::new();
        if one > star + 1e-6 {
            broken.push(format!("1-Bin {one} > 1-Bin* {star}"));
        }
        if star > three + 1e-6 {
            broken.push(format!("1-Bin* {star} > 3-Bin {three}"));
        }
        if three > bti + 1e-6 {
            broken.push(format!("3-Bin {three} > BTI {bti}"));
        }
        if (temp - bti).abs() > 1e-4 * bti.abs().max(1.0) {
            broken.push(format!("Temp {temp} != BTI {bti}"));
        }
        if !z.iter().all(|&v| gap(bti) <= gap(v) + 1e-6) || bti > mip + 1e-6 {
            broken.push(format!("BTI gap {} not smallest (MIP {mip})", gap(bti)));
        }
        if !broken.is_empty() {
            failures.push(format!("instance {k} ({cuts} cuts): {}", broken.join(", ")));
        }
        widest = widest.max(gap(one));
    }
    if !failures.is_empty() {
        return Err(format!("{} of 20 instances out of order: {}", failures.len(), failures.join("; ")));
    }
    within(
        start,
        Duration::from_secs(600),
        format!("20 instances ordered; largest 1-Bin gap {:.2}%", 100.0 * widest),
    )
}

fn linear_time() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let cost = random_exp(&mut rng);
    let mut ratios = Vec::new();
    for periods in [1_000usize, 10_000, 100_000] {
        let grid = random_grid(&mut rng, periods);
        let point = FracPoint::new(random_u(&mut rng, periods), 0.0).unwrap();
        let (_, work) = separate_counted(&point, &cost, &grid, Threshold::default()).unwrap();
        ratios.push(work as f64 / periods as f64);
    }
    let c = 8.0;
    if ratios.iter().any(|&r| r > c) {
        return Err(format!("work per period {ratios:?} exceeds {c}"));
    }
    let time = |periods: usize, rng: &mut ChaCha8Rng| {
        let grid = random_grid(rng, periods);
        let point = FracPoint::new(random_u(rng, periods), 0.0).unwrap();
        (0..7)
            .map(|_| {
                let start = Instant::now();
                let out = separate_counted(&point, &cost, &grid, Threshold::default()).unwrap();
                let took = start.elapsed();
                std::hint::black_box(out);
                took
            })
            .min()
            .unwrap()
    };
    let small = time(100_000, &mut rng);
    let large = time(200_000, &mut rng);
    let ratio = large.as_secs_f64() / small.as_secs_f64();
    let detail = format!("work/T {ratios:.2?} <= {c}, time ratio {ratio:.2}");
    if (1.5..=3.0).contains(&ratio) {
        Ok(detail)
    } else {
        Err(format!("{detail} outside [1.5, 3.0]"))
    }
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("separation exactness vs brute force, T <= 9, tol 1e-9, <= 60 s", separation_exactness),
        ("validity of every tree inequality at binary schedules, T <= 8, <= 120 s", validity_sweep),
        ("tightness characterization, T <= 7", equality_characterization),
        ("facet count C_T confirmed, total C_T + 2T, T = 2..7", facet_count),
        ("irredundancy T <= 6, duplicates for linear cost at T = 3", irredundancy),
        ("homogeneity of the envelope, tol 1e-9", homogeneity),
        ("monotonicity of delta_sum, T <= 12", monotonicity),
        ("integer-point cost exactness of all formulations, tol 1e-7", integer_exactness),
        ("relaxation dominance on 20 desk instances, tol 1e-6 / 1e-4, <= 10 min", dominance),
        ("linear-time separation", linear_time),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {:>2}: PASS  {name} ({detail})", k + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2}: FAIL  {name} ({detail})", k + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
