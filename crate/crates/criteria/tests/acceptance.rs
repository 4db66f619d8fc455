//! Acceptance run: one PASS/FAIL line per criterion. Exits nonzero when any
//! criterion fails.

use std::f64::consts::PI;
use std::time::Instant;

use mmsketch::analysis::{admissibility_report, blowup_certificate, doubling_bound_check};
use mmsketch::clustering::{
    cost_maxdiam, gonzalez, opt_p_bruteforce, partition_within, shatter_bruteforce,
    shatter_cyclic_arcs, shatter_maxdiam_coloring, shatter_rad, Objective, RadMode,
    DEFAULT_COLORING_BUDGET, DEFAULT_MAX_PARTITIONS,
};
use mmsketch::correspondence::{gh_oracle, DEFAULT_GH_BUDGET};
use mmsketch::instances::{
    all_setcover_instances, gen_circle, gen_delta, gen_euclidean_counterexample, gen_interval_grid,
    gen_sphere_sample, gen_tree_counterexample, random_metric, random_mm_space,
    reduction_equivalence_check,
};
use mmsketch::metric::{diam_p, rad_p, Exponent, FiniteMetricSpace, MetricMeasureSpace};
use mmsketch::sketching::{
    fps_sketch_4approx, hausdorff_map, sketch_k_2approx, sketch_k_exact, sketch_sturm_fp_approx,
    sturm_pipeline_factor, sturm_upper_from_partition, weak_sketch_upper, ShatterSolver,
};
use mmsketch::transport::sturm_one_point;
use mmsketch::Status;

type Outcome = (bool, String);

fn brute(x: &MetricMeasureSpace, k: usize, obj: Objective) -> f64 {
    shatter_bruteforce(x, k, obj, DEFAULT_MAX_PARTITIONS)
        .unwrap()
        .cost
}

fn strict_duality() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut bad = 0;
    for i in 0..100u64 {
        let n = 5 + (i % 5) as usize;
        let k = 1 + ((i / 5) % 4) as usize;
        let x = random_metric(n, 1000 + i);
        let opt = shatter_bruteforce(
            &MetricMeasureSpace::uniform(x.clone()),
            k,
            Objective::MaxDiam,
            DEFAULT_MAX_PARTITIONS,
        )
        .unwrap();
        let model = hausdorff_map(&x, &opt.partition).unwrap();
        let g = gh_oracle(&x, &model, DEFAULT_GH_BUDGET).unwrap();
        let err = (g.value() - opt.cost / 2.0).abs();
        worst = worst.max(err);
        if g.status != Status::Exact || err > 1e-12 {
            bad += 1;
        }
    }
    (
        bad == 0,
        format!("100 spaces, {bad} mismatches, max |GH - Shatter/2| = {worst:.2e}"),
    )
}

fn circle() -> Outcome {
    let c = gen_circle(120).unwrap();
    let x = c.space();
    let step = 2.0 * PI / 120.0;
    let mut ok = true;
    let mut detail = Vec::new();
    for k in [2, 3, 4, 6] {
        let arcs = shatter_cyclic_arcs(x, k).unwrap().cost;
        let exact = shatter_maxdiam_coloring(x, k, DEFAULT_COLORING_BUDGET)
            .unwrap()
            .cost;
        let sketch = sketch_k_exact(x, k, ShatterSolver::CyclicArcs)
            .unwrap()
            .upper;
        let target = 2.0 * PI / k as f64;
        ok &= (arcs - target).abs() <= step + 1e-12
            && (exact - target).abs() <= step + 1e-12
            && (sketch - target / 2.0).abs() <= step / 2.0 + 1e-12;
        detail.push(format!(
            "k={k}: shatter {exact:.6} arcs {arcs:.6} sketch {sketch:.6}"
        ));
    }
    (ok, detail.join("; "))
}

fn sphere() -> Outcome {
    let x = gen_sphere_sample(3, 200, 7).unwrap();
    let floor = PI - 0.35;
    let mut ok = true;
    let mut detail = Vec::new();
    for k in 1..=3 {
        let (_, part) = gonzalez(&x, k).unwrap();
        let g = cost_maxdiam(&x, &part);
        ok &= g >= floor;
        let below = match partition_within(&x, k, floor, 2_000_000) {
            Some(Some(_)) => "partition below floor exists",
            Some(None) => "no partition below floor",
            None => "exact search over budget",
        };
        detail.push(format!("k={k}: gonzalez {g:.4} ({below})"));
    }
    (ok, format!("floor {floor:.4}; {}", detail.join("; ")))
}

fn delta_table() -> Outcome {
    let mut ok = true;
    let mut worst: f64 = 0.0;
    for m in [2usize, 4, 6, 8] {
        let d = gen_delta(m).unwrap();
        for p in [1.0, 2.0] {
            let pe = Exponent::Finite(p);
            for k in 1..m {
                let v = brute(&d, k, Objective::Phi { p: pe, q: pe });
                let err = (v - (1.0 - k as f64 / m as f64).powf(1.0 / p)).abs();
                worst = worst.max(err);
                ok &= err <= 1e-12;
            }
            let (s, _) = sturm_one_point(&d, pe).unwrap();
            ok &= (s - 0.5).abs() <= 1e-6;
            let shatter1 = brute(&d, 1, Objective::Phi { p: pe, q: pe });
            let ratio = s / shatter1;
            let expected = 1.0 / (2.0 * (1.0 - 1.0 / m as f64).powf(1.0 / p));
            ok &= (ratio - expected).abs() <= 1e-6;
            worst = worst.max((s - 0.5).abs()).max((ratio - expected).abs());
        }
    }
    (
        ok,
        format!("m in 2,4,6,8, p in 1,2: max deviation {worst:.2e}"),
    )
}

fn diam_closed_forms() -> Outcome {
    let grid = gen_interval_grid(2000).unwrap();
    let circle = gen_circle(2000).unwrap();
    let all: Vec<usize> = (0..2000).collect();
    let mut ok = true;
    let mut detail = Vec::new();
    for p in [1.0, 2.0] {
        let pe = Exponent::Finite(p);
        let g = diam_p(&grid, &all, pe);
        let gt = (2.0 / ((p + 1.0) * (p + 2.0))).powf(1.0 / p);
        let c = diam_p(&circle, &all, pe);
        let ct = PI / (p + 1.0).powf(1.0 / p);
        ok &= (g - gt).abs() <= 2e-3 && (c - ct).abs() <= 2e-3;
        detail.push(format!(
            "p={p}: grid err {:.2e}, circle err {:.2e}",
            (g - gt).abs(),
            (c - ct).abs()
        ));
    }
    (ok, detail.join("; "))
}

fn approximation_guarantees() -> Outcome {
    let mut violations = 0;
    for i in 0..100u64 {
        let n = 4 + (i % 7) as usize;
        let k = 1 + (i as usize / 7) % 4;
        let x = random_metric(n, 2000 + i);
        let opt = brute(
            &MetricMeasureSpace::uniform(x.clone()),
            k,
            Objective::MaxDiam,
        );
        let (_, part) = gonzalez(&x, k).unwrap();
        let exact = sketch_k_exact(
            &x,
            k,
            ShatterSolver::Brute {
                max_partitions: DEFAULT_MAX_PARTITIONS,
            },
        )
        .unwrap()
        .upper;
        let two = sketch_k_2approx(&x, k).unwrap().upper;
        let four = fps_sketch_4approx(&x, k, 0).unwrap().upper;
        let tol = 1e-12;
        violations += usize::from(cost_maxdiam(&x, &part) > 2.0 * opt + tol)
            + usize::from(two > 2.0 * exact + tol)
            + usize::from(four > 4.0 * exact + tol);
    }
    (
        violations == 0,
        format!("100 spaces, {violations} violations"),
    )
}

fn radius_sandwich() -> Outcome {
    let mut violations = 0;
    let mut checks = 0;
    for i in 0..50u64 {
        let n = 4 + (i % 7) as usize;
        let x = random_mm_space(n, 3000 + i);
        for p in [Exponent::ONE, Exponent::TWO, Exponent::Infinite] {
            for k in 1..=4.min(n) {
                let diam = brute(&x, k, Objective::Phi { p, q: p });
                let rad = shatter_rad(&x, k, p, p, RadMode::Brute, DEFAULT_MAX_PARTITIONS).unwrap();
                let via = shatter_rad(&x, k, p, p, RadMode::ViaOptP, DEFAULT_MAX_PARTITIONS)
                    .unwrap()
                    .cost;
                let (_, opt) = opt_p_bruteforce(&x, k, p).unwrap();
                let tol = 1e-12 * (1.0 + diam);
                let mut bad = rad.cost > diam + tol || diam > 2.0 * rad.cost + tol;
                bad |= (rad.cost - opt).abs() > tol || (via - opt).abs() > tol;
                for b in rad.partition.blocks() {
                    let r = rad_p(&x, b, p).0;
                    let d = diam_p(&x, b, p);
                    bad |= r > d + tol || d > 2.0 * r + tol;
                }
                checks += 1;
                violations += usize::from(bad);
            }
        }
    }
    (
        violations == 0,
        format!("{checks} cases, {violations} violations"),
    )
}

fn non_duality() -> Outcome {
    let d8 = gen_delta(8).unwrap();
    let s = brute(
        &d8,
        4,
        Objective::Phi {
            p: Exponent::ONE,
            q: Exponent::Infinite,
        },
    );
    let weak = weak_sketch_upper(&d8, 4, Exponent::ONE).unwrap().upper;
    let mut ok = (s - 0.5).abs() <= 1e-12 && weak <= 0.1875 + 1e-12;
    let mut rows = Vec::new();
    for j in 2..=4 {
        let r = blowup_certificate(j).unwrap();
        ok &= r.certified();
        rows.push(format!(
            "m={} ratio {:.3} >= {:.3}",
            r.m,
            r.ratio(),
            r.m as f64 / 6.0
        ));
    }
    (
        ok,
        format!("Shatter = {s}, weak upper = {weak}; {}", rows.join(", ")),
    )
}

fn set_cover_reduction() -> Outcome {
    let instances = all_setcover_instances(4, 4, 3);
    let mut disagree = Vec::new();
    for inst in &instances {
        let c = reduction_equivalence_check(inst).unwrap();
        if !c.agree() {
            disagree.push((inst.clone(), c));
        }
    }
    let example = disagree.first().map_or(String::new(), |(inst, c)| {
        format!(
            "; first: n={} subsets={:?} k={} cover={} partition={}",
            inst.universe(),
            inst.subsets(),
            inst.k(),
            c.has_cover,
            c.has_partition
        )
    });
    let spurious = disagree
        .iter()
        .filter(|(_, c)| c.has_partition && !c.has_cover)
        .count();
    (
        disagree.is_empty(),
        format!(
            "{} instances, {} disagreements ({spurious} partition without cover){example}",
            instances.len(),
            disagree.len()
        ),
    )
}

/// Expected subset value: `(1-based indices, value, exact?)`.
type Case = (&'static [usize], f64, bool);

fn check_cases(x: &FiniteMetricSpace, cases: &[Case], label: &str, fails: &mut Vec<String>) {
    for &(idx, value, exact) in cases {
        let k: Vec<usize> = idx.iter().map(|i| i - 1).collect();
        let g = gh_oracle(x, &x.subspace(&k), DEFAULT_GH_BUDGET)
            .unwrap()
            .value();
        let ok = if exact {
            (g - value).abs() <= 1e-9
        } else {
            g >= value - 1e-9
        };
        if !ok || g <= 0.5 {
            let rel = if exact { "=" } else { ">=" };
            fails.push(format!(
                "{label} {idx:?}: oracle {g:.9}, stated {rel} {value:.9}"
            ));
        }
    }
}

fn minimizer_not_subset() -> Outcome {
    let mut fails = Vec::new();
    let (tx, ty) = gen_tree_counterexample(1).unwrap();
    let (ex, ey) = gen_euclidean_counterexample(1).unwrap();
    let tree_gh = gh_oracle(&tx, &ty, DEFAULT_GH_BUDGET).unwrap().value();
    let euclid_gh = gh_oracle(&ex, &ey, DEFAULT_GH_BUDGET).unwrap().value();
    if tree_gh != 0.5 {
        fails.push(format!("tree GH {tree_gh}"));
    }
    if euclid_gh != 0.5 {
        fails.push(format!("euclidean GH {euclid_gh}"));
    }
    let (s3, s7) = (3f64.sqrt(), 7f64.sqrt());
    let tree: &[Case] = &[
        (&[1, 2, 3], 1.5, false),
        (&[1, 2, 4], 1.5, false),
        (&[1, 3, 5], 1.0, false),
        (&[2, 4, 6], 1.0, true),
        (&[1, 3, 6], 1.0, true),
        (&[2, 4, 5], 1.0, true),
        (&[1, 2], 1.5, false),
        (&[1, 3], 1.5, false),
        (&[1, 4], 1.5, false),
        (&[2, 4], 2.0, false),
        (&[1], 2.0, true),
    ];
    let euclid: &[Case] = &[
        (&[1, 2, 3], s7 / 2.0, false),
        (&[1, 2, 4], s7 / 2.0, false),
        (&[1, 3, 5], s3 / 2.0, false),
        (&[2, 4, 6], s3 / 2.0, true),
        (&[1, 3, 6], s3 / 2.0, true),
        (&[2, 4, 5], s3 / 2.0, true),
        (&[1, 2], s7 / 2.0, false),
        (&[1, 3], s7 / 2.0, false),
        (&[1, 4], s7 / 2.0, false),
        (&[2, 4], s3, false),
        (&[1], s3, true),
    ];
    check_cases(&tx, tree, "tree", &mut fails);
    check_cases(&ex, euclid, "euclidean", &mut fails);
    let detail = if fails.is_empty() {
        "both GH = 0.5, all 22 subset cases match".to_string()
    } else {
        format!("{} mismatches: {}", fails.len(), fails.join("; "))
    };
    (fails.is_empty(), detail)
}

fn sturm_sandwich() -> Outcome {
    let (t, eps) = (1, 0.1);
    let mut violations = 0;
    let mut cases = 0;
    for i in 0..50u64 {
        let n = 3 + (i % 7) as usize;
        let x = random_mm_space(n, 4000 + i);
        for p in [1.0, 2.0] {
            let pe = Exponent::Finite(p);
            for k in 1..=3.min(n) {
                let opt = shatter_bruteforce(
                    &x,
                    k,
                    Objective::Phi { p: pe, q: pe },
                    DEFAULT_MAX_PARTITIONS,
                )
                .unwrap();
                let (upper, _, _) = sturm_upper_from_partition(&x, &opt.partition, pe).unwrap();
                let pipe = sketch_sturm_fp_approx(&x, k, pe, t, eps).unwrap();
                let f = sturm_pipeline_factor(p, t, eps).unwrap();
                cases += 1;
                let bad = upper > opt.cost + 1e-12
                    || pipe.upper > f * 0.5 * opt.cost + 1e-12
                    || pipe.lower > pipe.upper;
                violations += usize::from(bad);
            }
        }
    }
    for m in [2usize, 4, 6, 8] {
        let d = gen_delta(m).unwrap();
        for p in [Exponent::ONE, Exponent::TWO] {
            let shatter = brute(&d, 1, Objective::Phi { p, q: p });
            let (s, _) = sturm_one_point(&d, p).unwrap();
            cases += 1;
            violations += usize::from(
                !(0.5 * shatter <= s + 1e-9 && s <= shatter + 1e-9 && (s - 0.5).abs() <= 1e-6),
            );
        }
    }
    (
        violations == 0,
        format!("{cases} cases, {violations} violations"),
    )
}

fn doubling_bound() -> Outcome {
    let mut ok = true;
    let mut detail = Vec::new();
    for n in [64usize, 128] {
        for p in [1.0, 2.0] {
            let r = doubling_bound_check(&gen_interval_grid(n).unwrap(), n / 2, p).unwrap();
            ok &= r.precondition_met && r.chain_holds();
            detail.push(format!(
                "grid {n} p={p}: {:.4} <= {:.4} < {:.1}",
                r.delta, r.sturm_upper, r.rhs
            ));
        }
    }
    for m in [4usize, 6, 8] {
        let r = doubling_bound_check(&gen_delta(m).unwrap(), m / 2, 1.0).unwrap();
        ok &= !r.precondition_met;
        detail.push(format!(
            "delta {m}: precondition unmet (delta {:.4})",
            r.delta
        ));
    }
    (ok, detail.join("; "))
}

fn impossibility_tables() -> Outcome {
    let mut ok = true;
    let mut rows = 0;
    for p in [2.0, 3.0] {
        for r in admissibility_report(&[4, 8, 16], &[1, 2], p).unwrap() {
            let n = r.n as f64;
            ok &= (r.phi_u - 1.0 / n).abs() <= 1e-12
                && r.phi_bar == 0.0
                && (r.phi_p - n.powf(-(1.0 - 1.0 / p))).abs() <= 1e-12
                && r.cov.exact
                && r.cov.value >= 0.5;
            rows += 1;
        }
    }
    (
        ok,
        format!("{rows} rows over n in 4,8,16, k in 1,2, p in 2,3"),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 13] = [
        ("strict duality on random spaces", strict_duality),
        ("circle clustering and sketching", circle),
        ("sphere sample clustering floor", sphere),
        ("unit-distance space table", delta_table),
        ("p-diameter closed forms", diam_closed_forms),
        ("approximation guarantees", approximation_guarantees),
        (
            "radius/diameter sandwich and center equivalence",
            radius_sandwich,
        ),
        ("non-duality witness and blow-up", non_duality),
        ("set-cover reduction equivalence", set_cover_reduction),
        ("GH minimizers that are not subsets", minimizer_not_subset),
        ("Sturm sandwich and pipeline factor", sturm_sandwich),
        ("doubling bound", doubling_bound),
        ("impossibility tables on Y_{n,k}", impossibility_tables),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (ok, detail) = f();
        failed += usize::from(!ok);
        println!(
            "criterion {:>2} {}: {} [{:.1}s] {detail}",
            i + 1,
            name,
            if ok { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64()
        );
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
