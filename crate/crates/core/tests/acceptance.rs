//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any hard check fails.

use std::time::{Duration, Instant};

use erpack::ccrelax::{check_bounds, check_cycle_inequalities, check_odd_wheels, compare_tightness, gamma_to_f};
use erpack::colgen::integerize;
use erpack::master::MasterProblem;
use erpack::metrics::{adjusted_rand, fowlkes_mallows, pairwise_prf, v_measure, LabeledPartition};
use erpack::pricing::{price_exact, Subproblem};
use erpack::synth::generate_synthetic;
use erpack::testing::golden_instance;
use erpack::{hypothesis_cost, run_cg, CgConfig, CgResult, Column, DoiConfig, DoiMode, Instance, PricingConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

const EPSILON: f64 = 1e-6;
const GOLDEN_TOL: f64 = 1e-6;
const INVARIANCE_TOL: f64 = 1e-6;
const XI_TOL: f64 = 1e-7;
const OPTIMALITY_TOL: f64 = 1e-6;
const TIGHTNESS_TOL: f64 = 1e-6;
const ITERATION_RATIO: f64 = 1.5;
const INTEGRAL_RATE: f64 = 0.9;
const NOISY_F1: f64 = 0.95;
const METRIC_TOL: f64 = 1e-12;
/// `fm * fm` against `precision * recall`, both rounded once after the
/// square root.
const FM_ULPS: f64 = 4.0;

const ORACLE: &str = include_str!("data/oracle_lp.json");

struct Outcome {
    name: &'static str,
    pass: bool,
    detail: String,
}

type Check = fn(&Value) -> (bool, String);

fn main() {
    let oracle: Value = serde_json::from_str(ORACLE).expect("oracle fixture parses");
    let criteria: Vec<(&'static str, Check, Duration)> = vec![
        ("golden_rmp_objectives", golden, Duration::from_secs(1)),
        ("doi_invariance", invariance, Duration::from_secs(120)),
        ("flexible_xi_vanish", xi_vanish, Duration::from_secs(120)),
        ("removal_bound_validity", removal_bounds, Duration::from_secs(120)),
        ("integer_optimality", integer_optimality, Duration::from_secs(120)),
        ("exact_pricing_oracle", exact_pricing, Duration::from_secs(120)),
        ("relaxation_properties", relaxation, Duration::from_secs(120)),
        ("iteration_counts", iteration_counts, Duration::from_secs(300)),
        ("planted_recovery", planted_recovery, Duration::from_secs(120)),
        ("metrics_cross_checks", metrics_checks, Duration::from_secs(60)),
    ];
    let mut outcomes = Vec::new();
    for (name, check, budget) in criteria {
        let started = Instant::now();
        let (mut pass, mut detail) = check(&oracle);
        let elapsed = started.elapsed();
        if elapsed > budget {
            pass = false;
            detail.push_str(&format!("; over time budget {budget:?}"));
        }
        let line = Outcome { name, pass, detail: format!("{detail} [{:.2}s]", elapsed.as_secs_f64()) };
        println!("{} {}: {}", if line.pass { "PASS" } else { "FAIL" }, line.name, line.detail);
        outcomes.push(line);
    }
    let failed: Vec<_> = outcomes.iter().filter(|o| !o.pass).map(|o| o.name).collect();
    if failed.is_empty() {
        println!("all {} criteria passed", outcomes.len());
    } else {
        println!("failed: {}", failed.join(", "));
        std::process::exit(1);
    }
}

fn instance_from(v: &Value) -> (Instance, f64) {
    let n = v["n"].as_u64().unwrap() as usize;
    let pairs = v["pairs"].as_array().unwrap().iter().map(|p| {
        let p = p.as_array().unwrap();
        (p[0].as_u64().unwrap() as usize, p[1].as_u64().unwrap() as usize, p[2].as_f64().unwrap())
    });
    (Instance::from_pairs(n, pairs).unwrap(), v["lp"].as_f64().unwrap())
}

fn oracle_instances(oracle: &Value) -> Vec<(Instance, f64)> {
    oracle["instances"].as_array().unwrap().iter().map(instance_from).collect()
}

fn config(mode: DoiMode, k: usize) -> CgConfig {
    CgConfig::new(DoiConfig::new(mode).with_k(k), PricingConfig::default())
}

fn mode_grid() -> Vec<(String, CgConfig)> {
    let mut grid = vec![
        ("none".to_string(), config(DoiMode::None, 5)),
        ("varying".to_string(), config(DoiMode::Varying, 5)),
    ];
    for k in [1, 3, 5] {
        grid.push((format!("flexible/K={k}"), config(DoiMode::Flexible, k)));
    }
    grid
}

fn golden(oracle: &Value) -> (bool, String) {
    let inst = golden_instance();
    let mut ok = true;
    let mut parts = Vec::new();
    for mode in [DoiMode::None, DoiMode::Varying, DoiMode::Flexible] {
        let mut master = MasterProblem::new(5, DoiConfig::new(mode));
        master.add_columns(&inst, [vec![0, 1, 2], vec![2, 3, 4]]).unwrap();
        let got = master.solve().unwrap().objective;
        let want = oracle["golden"][mode.to_string()].as_f64().unwrap();
        ok &= (got - want).abs() <= GOLDEN_TOL;
        if mode == DoiMode::Flexible {
            let c = (got + 800.0) / EPSILON;
            ok &= c.abs() <= 2.0 + 1e-3;
            parts.push(format!("{mode} {got:.6} (c = {c:.3})"));
        } else {
            parts.push(format!("{mode} {got:.6}"));
        }
    }
    (ok, parts.join(", "))
}

fn invariance(oracle: &Value) -> (bool, String) {
    let mut worst = 0.0f64;
    let mut failures = 0;
    let mut inexact = 0;
    let instances = oracle_instances(oracle);
    for (inst, lp) in &instances {
        for (_, cfg) in mode_grid() {
            let res = run_cg(inst, &cfg).unwrap();
            inexact += usize::from(!res.exact);
            let dev = (res.lp_objective - lp).abs();
            worst = worst.max(dev);
            failures += usize::from(dev > INVARIANCE_TOL);
        }
    }
    (
        failures == 0 && inexact == 0,
        format!(
            "{} instances x 5 configurations, max |CG - enumeration LP| = {worst:.2e}, {failures} over tolerance, {inexact} inexact",
            instances.len()
        ),
    )
}

fn synthetic_suite() -> Vec<Instance> {
    (1..=3).map(|seed| generate_synthetic(200, 20, 0.3, seed).unwrap().instance).collect()
}

fn xi_vanish(oracle: &Value) -> (bool, String) {
    let mut worst = 0.0f64;
    let mut runs = 0;
    let mut instances: Vec<Instance> = oracle_instances(oracle).into_iter().map(|(i, _)| i).collect();
    instances.extend(synthetic_suite());
    for inst in &instances {
        for k in [1, 3, 5] {
            let res = run_cg(inst, &config(DoiMode::Flexible, k)).unwrap();
            runs += 1;
            for x in &res.rmp.xi {
                worst = worst.max(x.value);
            }
        }
    }
    (worst <= XI_TOL, format!("{runs} terminal flexible RMPs, max xi = {worst:.2e}"))
}

fn removal_bounds(oracle: &Value) -> (bool, String) {
    let mut columns = 0;
    let mut subsets = 0u64;
    let mut violations = 0;
    for (inst, _) in oracle_instances(oracle) {
        for (_, cfg) in mode_grid() {
            let res = run_cg(&inst, &cfg).unwrap();
            for col in res.pool.columns().iter().filter(|c| c.len() <= 8) {
                columns += 1;
                let m = col.members();
                for mask in 1u32..(1 << m.len()) {
                    subsets += 1;
                    let lhs: f64 = (0..m.len()).filter(|i| mask >> i & 1 == 1).map(|i| col.xi_of(m[i])).sum();
                    let rest: Vec<usize> = (0..m.len()).filter(|i| mask >> i & 1 == 0).map(|i| m[i]).collect();
                    let rhs = EPSILON + hypothesis_cost(&inst, &rest).unwrap() - col.cost();
                    if lhs < rhs - 1e-9 * (1.0 + rhs.abs()) {
                        violations += 1;
                    }
                }
            }
        }
    }
    (violations == 0, format!("{columns} columns, {subsets} subsets, {violations} violations"))
}

fn random_instance(rng: &mut ChaCha8Rng, n: usize, density: f64) -> Instance {
    let mut inst = Instance::new(n);
    for a in 0..n {
        for b in a + 1..n {
            if rng.gen_bool(density) {
                inst.insert_pair(a, b, rng.gen_range(-8i32..=6) as f64 / 4.0).unwrap();
            }
        }
    }
    inst
}

/// Minimum total cost over all partitions whose blocks avoid blocked pairs.
fn best_partition(inst: &Instance) -> f64 {
    fn place(inst: &Instance, d: usize, blocks: &mut Vec<Vec<usize>>, cost: f64, best: &mut f64) {
        if d == inst.n_observations() {
            *best = best.min(cost);
            return;
        }
        for b in 0..blocks.len() {
            let Some(delta) = blocks[b].iter().map(|&e| inst.theta(d, e)).sum::<Option<f64>>() else {
                continue;
            };
            blocks[b].push(d);
            place(inst, d + 1, blocks, cost + 2.0 * delta, best);
            blocks[b].pop();
        }
        blocks.push(vec![d]);
        place(inst, d + 1, blocks, cost, best);
        blocks.pop();
    }
    let mut best = f64::INFINITY;
    place(inst, 0, &mut Vec::new(), 0.0, &mut best);
    best
}

fn integer_optimality(_: &Value) -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut integral, mut mismatches, mut fractional_gap) = (0, 0, 0);
    let total = 100;
    for _ in 0..total {
        let n = rng.gen_range(2..=8);
        let inst = random_instance(&mut rng, n, 0.6);
        let cfg = CgConfig::default();
        let res = run_cg(&inst, &cfg).unwrap();
        let int = integerize(&inst, &res.pool, &cfg.doi).unwrap();
        let oracle = best_partition(&inst);
        if int.lp_integral {
            integral += 1;
            mismatches += usize::from((int.clustering.total_cost - oracle).abs() > OPTIMALITY_TOL);
        } else {
            fractional_gap += usize::from((int.clustering.total_cost - oracle).abs() > OPTIMALITY_TOL);
        }
    }
    let rate = integral as f64 / total as f64;
    let mut detail = format!(
        "{integral}/{total} terminal LPs integral, {mismatches} mismatches against partition enumeration; \
         {fractional_gap} fractional instances where pool-restricted branch and bound missed the optimum"
    );
    if rate < INTEGRAL_RATE {
        detail.push_str(&format!("; integral rate {rate:.2} below {INTEGRAL_RATE} (reported, not enforced)"));
    }
    (mismatches == 0, detail)
}

fn exact_pricing(_: &Value) -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut mismatches = 0;
    let mut negative = 0;
    for _ in 0..200 {
        let k = rng.gen_range(1..=15);
        let mut inst = Instance::new(k);
        for a in 0..k {
            for b in a + 1..k {
                if rng.gen_bool(0.7) {
                    inst.insert_pair(a, b, rng.gen_range(-5i32..=5) as f64).unwrap();
                }
            }
        }
        let lambda: Vec<f64> = (0..k).map(|_| rng.gen_range(-6i32..=2) as f64).collect();
        let nodes: Vec<usize> = (0..k).collect();
        let sub = Subproblem::new(&inst, &nodes, &lambda);
        let mut best = f64::INFINITY;
        for mask in 1u32..(1 << k) {
            let members: Vec<usize> = (0..k).filter(|i| mask >> i & 1 == 1).collect();
            if let Ok(cost) = hypothesis_cost(&inst, &members) {
                best = best.min(cost - members.iter().map(|&d| lambda[d]).sum::<f64>());
            }
        }
        let got = price_exact(&sub, 64).unwrap();
        let agrees = match &got {
            None => best >= 0.0,
            Some(col) => {
                let cost = hypothesis_cost(&inst, &col.members).unwrap();
                let value = cost - col.members.iter().map(|&d| lambda[d]).sum::<f64>();
                col.reduced_cost == best && value == best
            }
        };
        negative += usize::from(best < 0.0);
        mismatches += usize::from(!agrees);
    }
    (mismatches == 0, format!("200 subproblems ({negative} with a negative optimum), {mismatches} mismatches"))
}

fn random_clique(rng: &mut ChaCha8Rng, inst: &Instance) -> Vec<usize> {
    let n = inst.n_observations();
    let mut members = vec![rng.gen_range(0..n)];
    for _ in 0..rng.gen_range(0..n) {
        let d = rng.gen_range(0..n);
        if !members.contains(&d) && members.iter().all(|&e| inst.is_compatible(d, e)) {
            members.push(d);
        }
    }
    members
}

fn relaxation(_: &Value) -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut violations = 0;
    let mut worst_gap = f64::INFINITY;
    for _ in 0..100 {
        let n = rng.gen_range(3..=8);
        let inst = random_instance(&mut rng, n, 0.7);
        let columns: Vec<Column> = (0..rng.gen_range(1..=8))
            .map(|_| Column::new(&inst, &random_clique(&mut rng, &inst)).unwrap())
            .collect();
        let mut gamma: Vec<f64> = columns.iter().map(|_| rng.gen_range(0.0..1.0)).collect();
        let mut load = vec![0.0; n];
        for (col, g) in columns.iter().zip(&gamma) {
            for &d in col.members() {
                load[d] += g;
            }
        }
        let scale = load.iter().fold(1.0f64, |a, &b| a.max(b));
        gamma.iter_mut().for_each(|g| *g /= scale);
        let f = gamma_to_f(n, &columns, &gamma);
        violations += check_bounds(&f).len() + check_cycle_inequalities(&f).len() + check_odd_wheels(&f, 7).len();
        worst_gap = worst_gap.min(compare_tightness(&inst).unwrap().gap);
    }
    (
        violations == 0 && worst_gap >= -TIGHTNESS_TOL,
        format!("100 packings: {violations} bound/cycle/wheel violations; min CG - CC LP gap {worst_gap:.2e}"),
    )
}

fn iteration_counts(_: &Value) -> (bool, String) {
    let mut grid = mode_grid();
    grid.push(("flexible/K=10".to_string(), config(DoiMode::Flexible, 10)));
    let suite = synthetic_suite();
    println!("  {:<14} {:>8} {:>8} {:>8}", "mode", "seed 1", "seed 2", "seed 3");
    let mut rows: Vec<(String, Vec<CgResult>)> = Vec::new();
    for (name, cfg) in &grid {
        let results: Vec<CgResult> = suite.iter().map(|inst| run_cg(inst, cfg).unwrap()).collect();
        let counts: Vec<String> = results.iter().map(|r| format!("{:>8}", r.iterations)).collect();
        println!("  {:<14} {}", name, counts.join(" "));
        rows.push((name.clone(), results));
    }
    let none = &rows[0].1;
    let mut worst_ratio = 0.0f64;
    let mut worst_dev = 0.0f64;
    let mut offenders = Vec::new();
    for (name, results) in &rows {
        for (seed, (r, base)) in results.iter().zip(none).enumerate() {
            worst_dev = worst_dev.max((r.lp_objective - base.lp_objective).abs());
            if name.starts_with("flexible") {
                let ratio = r.iterations as f64 / base.iterations as f64;
                worst_ratio = worst_ratio.max(ratio);
                if ratio > ITERATION_RATIO {
                    offenders.push(format!("{name} seed {} ({} vs {})", seed + 1, r.iterations, base.iterations));
                }
            }
        }
    }
    let mut detail = format!(
        "n = 200, 3 seeds: max objective deviation {worst_dev:.2e}, worst flexible/none iteration ratio {worst_ratio:.2}"
    );
    if !offenders.is_empty() {
        detail.push_str(&format!("; over {ITERATION_RATIO}x: {}", offenders.join(", ")));
    }
    (worst_dev <= INVARIANCE_TOL && offenders.is_empty(), detail)
}

fn planted_recovery(_: &Value) -> (bool, String) {
    let mut ok = true;
    let mut parts = Vec::new();
    for (noise, floor) in [(0.0, 1.0), (0.3, NOISY_F1)] {
        let started = Instant::now();
        let s = generate_synthetic(500, 50, noise, 1).unwrap();
        let cfg = CgConfig::default();
        let res = run_cg(&s.instance, &cfg).unwrap();
        let int = integerize(&s.instance, &res.pool, &cfg.doi).unwrap();
        let pred = LabeledPartition::from_labels(&int.clustering.labels());
        let truth = LabeledPartition::from_labels(&s.truth);
        let f1 = pairwise_prf(&pred, &truth).unwrap().f1;
        let secs = started.elapsed().as_secs_f64();
        ok &= f1 >= floor && secs < 60.0;
        parts.push(format!("noise {noise}: F1 {f1:.4} in {secs:.1}s"));
    }
    (ok, format!("n = 500, 50 clusters; {}", parts.join(", ")))
}

fn random_partition(rng: &mut ChaCha8Rng, n: usize) -> LabeledPartition {
    let k = rng.gen_range(1..=n);
    let labels: Vec<usize> = (0..n).map(|_| rng.gen_range(0..k)).collect();
    LabeledPartition::from_labels(&labels)
}

fn metrics_checks(_: &Value) -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut fm_failures = 0;
    let mut ari_failures = 0;
    for _ in 0..1000 {
        let n = rng.gen_range(1..=40);
        let a = random_partition(&mut rng, n);
        let b = random_partition(&mut rng, n);
        let s = pairwise_prf(&a, &b).unwrap();
        let fm = fowlkes_mallows(&a, &b).unwrap();
        let pr = s.precision * s.recall;
        let exact = fm == pr.sqrt();
        let close = (fm * fm - pr).abs() <= FM_ULPS * f64::EPSILON * pr.max(f64::MIN_POSITIVE);
        fm_failures += usize::from(!(exact && close));
        ari_failures += usize::from(adjusted_rand(&a, &a).unwrap() != 1.0);
    }

    let p = |l: &[usize]| LabeledPartition::from_labels(l);
    let truth = p(&[0, 0, 0, 1, 1, 2]);
    let pred = p(&[0, 0, 1, 1, 2, 2]);
    let v = v_measure(&pred, &truth).unwrap();
    let split = pairwise_prf(&p(&[0, 0, 1]), &p(&[0, 0, 0])).unwrap();
    let hand = [
        (v.homogeneity, 0.5431123473589423),
        (v.completeness, 0.5),
        (v.v_measure, 0.5206652463984817),
        (adjusted_rand(&pred, &truth).unwrap(), 2.0 / 27.0),
        (fowlkes_mallows(&pred, &truth).unwrap(), 1.0 / 12f64.sqrt()),
        (adjusted_rand(&p(&[0, 1, 0, 1]), &p(&[0, 0, 1, 1])).unwrap(), -0.5),
        (split.precision, 1.0),
        (split.recall, 1.0 / 3.0),
        (split.f1, 0.5),
    ];
    let hand_failures = hand.iter().filter(|(got, want)| (got - want).abs() > METRIC_TOL).count();
    (
        fm_failures + ari_failures + hand_failures == 0,
        format!(
            "1000 random pairs: {fm_failures} FM/PR failures, {ari_failures} self-ARI failures; {hand_failures}/{} hand examples off",
            hand.len()
        ),
    )
}
