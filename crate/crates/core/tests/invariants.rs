//! Property tests against independent brute-force oracles.

use mmsketch::analysis::{covering_radius, doubling_constant, v_delta};
use mmsketch::clustering::cost_maxdiam;
use mmsketch::correspondence::DEFAULT_GH_BUDGET;
use mmsketch::instances::{euclidean, random_metric, random_mm_space};
use mmsketch::io::{
    parse_partition, parse_plan, parse_space, write_partition, write_plan, write_space,
};
use mmsketch::sketching::partition_correspondence;
use mmsketch::{
    canonical_coupling_dr, fps_sketch_4approx, gh_lower_bound, gh_oracle, hausdorff_map,
    sketch_k_2approx, sketch_k_exact, sketch_sturm_fp_approx, validate_metric, voronoi_map,
    wasserstein, Exponent, FiniteMetricSpace, MetricMeasureSpace, Partition, ShatterSolver,
};
use proptest::prelude::*;

const TOL: f64 = 1e-9;

/// Calls `f` on every restricted-growth assignment of `n` points into at most `k` labels.
fn each_assignment(n: usize, k: usize, f: &mut impl FnMut(&[usize])) {
    fn rec(a: &mut Vec<usize>, n: usize, k: usize, used: usize, f: &mut impl FnMut(&[usize])) {
        if a.len() == n {
            f(a);
            return;
        }
        for b in 0..(used + 1).min(k) {
            a.push(b);
            rec(a, n, k, used.max(b + 1), f);
            a.pop();
        }
    }
    rec(&mut Vec::new(), n, k, 0, f);
}

fn oracle_maxdiam(x: &FiniteMetricSpace, k: usize) -> f64 {
    let n = x.len();
    let mut best = f64::INFINITY;
    each_assignment(n, k, &mut |a| {
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                if a[i] == a[j] {
                    worst = worst.max(x.d(i, j));
                }
            }
        }
        best = best.min(worst);
    });
    best
}

/// `½ min dis(graph φ ∪ graph ψ⁻¹)` over all map pairs.
fn oracle_gh(x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> f64 {
    let (n, m) = (x.len(), y.len());
    let maps = |len: usize, base: usize| -> Vec<Vec<usize>> {
        let mut out = vec![vec![]];
        for _ in 0..len {
            out = out
                .into_iter()
                .flat_map(|v| (0..base).map(move |c| [v.clone(), vec![c]].concat()))
                .collect();
        }
        out
    };
    let mut best = f64::INFINITY;
    for phi in maps(n, m) {
        for psi in maps(m, n) {
            let pairs: Vec<(usize, usize)> = (0..n)
                .map(|a| (a, phi[a]))
                .chain((0..m).map(|b| (psi[b], b)))
                .collect();
            let mut dis: f64 = 0.0;
            for &(a, b) in &pairs {
                for &(c, d) in &pairs {
                    dis = dis.max((x.d(a, c) - y.d(b, d)).abs());
                }
            }
            best = best.min(dis);
        }
    }
    best / 2.0
}

/// `W_1` between two measures on sorted points of a line: `∫ |F_a − F_b|`.
fn oracle_w1_line(coords: &[f64], a: &[f64], b: &[f64]) -> f64 {
    let (mut fa, mut fb, mut total) = (0.0, 0.0, 0.0);
    for i in 0..coords.len() - 1 {
        fa += a[i];
        fb += b[i];
        total += (fa - fb).abs() * (coords[i + 1] - coords[i]);
    }
    total
}

fn probability(weights: &[f64]) -> Vec<f64> {
    let s: f64 = weights.iter().sum();
    weights.iter().map(|w| w / s).collect()
}

fn plane_points(max: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec(-5.0f64..5.0, 2), 2..=max).prop_filter(
        "distinct points",
        |pts| {
            pts.iter().enumerate().all(|(i, p)| {
                pts[..i]
                    .iter()
                    .all(|q| (p[0] - q[0]).abs() + (p[1] - q[1]).abs() > 1e-3)
            })
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn euclidean_points_validate_and_asymmetry_is_rejected(pts in plane_points(7)) {
        let x = euclidean(&pts).unwrap();
        let mut rows = x.rows();
        prop_assert!(validate_metric(&rows).is_ok());
        rows[0][1] += 0.5;
        prop_assert!(validate_metric(&rows).is_err());
    }

    #[test]
    fn space_file_round_trip_is_exact(n in 1usize..9, seed in any::<u64>()) {
        let x = random_mm_space(n, seed);
        let parsed = parse_space(&write_space(x.space(), Some(x.mass()))).unwrap();
        prop_assert_eq!(&parsed.space, x.space());
        prop_assert_eq!(parsed.measure.as_deref(), Some(x.mass()));
    }

    #[test]
    fn partition_file_round_trip(assign in prop::collection::vec(0usize..4, 1..12)) {
        let part = Partition::from_assignment(&assign);
        let back = parse_partition(&write_partition(&part), assign.len()).unwrap();
        prop_assert_eq!(back.canonical(), part.canonical());
    }

    #[test]
    fn plan_file_round_trip(n in 2usize..7, seed in any::<u64>()) {
        let x = random_mm_space(n, seed);
        let nu: Vec<f64> = x.mass().iter().rev().copied().collect();
        let (_, plan) = wasserstein(x.space(), x.mass(), &nu, Exponent::TWO).unwrap();
        let back = parse_plan(&write_plan(&plan), x.mass(), &nu).unwrap();
        for i in 0..n {
            for j in 0..n {
                prop_assert!((back.get(i, j) - plan.get(i, j)).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn exact_sketch_matches_partition_oracle_and_gh(n in 2usize..7, k in 1usize..4, seed in any::<u64>()) {
        let x = random_metric(n, seed);
        let s = sketch_k_exact(&x, k, ShatterSolver::Brute { max_partitions: 1_000_000 }).unwrap();
        let shatter = oracle_maxdiam(&x, k);
        prop_assert!((s.upper - shatter / 2.0).abs() <= TOL);
        let gh = gh_oracle(&x, s.model.space(), DEFAULT_GH_BUDGET).unwrap();
        prop_assert!(gh.is_exact());
        prop_assert!(gh.value() <= s.upper + TOL);
    }

    #[test]
    fn gh_oracle_matches_map_pairs(n in 1usize..5, m in 1usize..4, s1 in any::<u64>(), s2 in any::<u64>()) {
        let x = random_metric(n, s1);
        let y = random_metric(m, s2);
        let g = gh_oracle(&x, &y, DEFAULT_GH_BUDGET).unwrap();
        prop_assert!((g.value() - oracle_gh(&x, &y)).abs() <= TOL);
        let h = gh_oracle(&y, &x, DEFAULT_GH_BUDGET).unwrap();
        prop_assert!((g.value() - h.value()).abs() <= TOL);
        prop_assert!(g.value() >= gh_lower_bound(&x, &y) - TOL);
        prop_assert!(g.value() <= x.diam().max(y.diam()) / 2.0 + TOL);
    }

    #[test]
    fn approximate_sketches_bracket_the_optimum(n in 2usize..8, k in 1usize..4, seed in any::<u64>(), start in 0usize..8) {
        let x = random_metric(n, seed);
        let opt = oracle_maxdiam(&x, k) / 2.0;
        let g = sketch_k_2approx(&x, k).unwrap();
        prop_assert!(g.lower <= opt + TOL && opt <= g.upper + TOL && g.upper <= 2.0 * opt + TOL);
        let f = fps_sketch_4approx(&x, k, start % n).unwrap();
        prop_assert!(f.lower <= opt + TOL && opt <= f.upper + TOL && f.upper <= 4.0 * opt + TOL);
        let mm = MetricMeasureSpace::uniform(x.clone());
        for s in [&g, &f] {
            prop_assert!((s.relation_cost(&mm, Exponent::Infinite).unwrap() - s.upper).abs() <= TOL);
        }
    }

    #[test]
    fn voronoi_blocks_are_within_twice_the_coupling_radius(assign in prop::collection::vec(0usize..3, 2..8), seed in any::<u64>()) {
        let x = random_metric(assign.len(), seed);
        let part = Partition::from_assignment(&assign);
        let model = hausdorff_map(&x, &part).unwrap();
        let coupling = canonical_coupling_dr(&partition_correspondence(&part), &x, &model).unwrap();
        let v = voronoi_map(&x, &model, &coupling).unwrap();
        prop_assert!(cost_maxdiam(&x, &v) <= 2.0 * coupling.hausdorff() + TOL);
    }

    #[test]
    fn w1_on_a_line_matches_cdf_formula(
        gaps in prop::collection::vec(0.01f64..2.0, 1..8),
        wa in prop::collection::vec(0.0f64..1.0, 8),
        wb in prop::collection::vec(0.0f64..1.0, 8),
    ) {
        let coords: Vec<f64> = std::iter::once(0.0).chain(gaps.iter().scan(0.0, |s, g| { *s += g; Some(*s) })).collect();
        let n = coords.len();
        let a = probability(&wa[..n].iter().map(|w| w + 0.01).collect::<Vec<_>>());
        let b = probability(&wb[..n].iter().map(|w| w + 0.01).collect::<Vec<_>>());
        let x = FiniteMetricSpace::new((0..n).map(|i| (0..n).map(|j| (coords[i] - coords[j]).abs()).collect()).collect()).unwrap();
        let (w1, _) = wasserstein(&x, &a, &b, Exponent::ONE).unwrap();
        prop_assert!((w1 - oracle_w1_line(&coords, &a, &b)).abs() <= 1e-9);
    }

    #[test]
    fn wasserstein_is_a_metric_and_monotone_in_p(n in 2usize..7, seed in any::<u64>(), wb in prop::collection::vec(0.01f64..1.0, 7), wc in prop::collection::vec(0.01f64..1.0, 7)) {
        let x = random_mm_space(n, seed);
        let a = x.mass().to_vec();
        let b = probability(&wb[..n]);
        let c = probability(&wc[..n]);
        let w = |u: &[f64], v: &[f64], p| wasserstein(x.space(), u, v, p).unwrap().0;
        let mut last = 0.0;
        for p in [Exponent::ONE, Exponent::TWO, Exponent::Finite(3.0), Exponent::Infinite] {
            let ab = w(&a, &b, p);
            prop_assert!(ab >= last - 1e-9);
            last = ab;
            prop_assert!((ab - w(&b, &a, p)).abs() <= 1e-9);
            prop_assert!(ab <= w(&a, &c, p) + w(&c, &b, p) + 1e-9);
        }
    }

    #[test]
    fn v_delta_is_nondecreasing_in_delta(n in 1usize..9, seed in any::<u64>(), d1 in 0.01f64..0.99, d2 in 0.01f64..0.99) {
        let x = random_mm_space(n, seed);
        let (lo, hi) = if d1 <= d2 { (d1, d2) } else { (d2, d1) };
        prop_assert!(v_delta(&x, lo).unwrap() <= v_delta(&x, hi).unwrap() + 1e-12);
    }

    #[test]
    fn covering_radius_matches_brute_force_and_decreases(n in 1usize..8, seed in any::<u64>()) {
        let x = random_metric(n, seed);
        let mut last = f64::INFINITY;
        for k in 1..=n {
            let c = covering_radius(&x, k).unwrap();
            prop_assert!(c.exact);
            let mut brute = f64::INFINITY;
            for centers in mmsketch::sketching::subsets_of_size(n, k) {
                let r = (0..n).map(|i| centers.iter().map(|&z| x.d(i, z)).fold(f64::INFINITY, f64::min)).fold(0.0, f64::max);
                brute = brute.min(r);
            }
            prop_assert!((c.value - brute).abs() <= TOL);
            prop_assert!(c.value <= last + TOL);
            last = c.value;
        }
    }

    #[test]
    fn doubling_constant_bounds_every_ball_ratio(n in 1usize..9, seed in any::<u64>()) {
        let x = random_mm_space(n, seed);
        let rep = doubling_constant(&x);
        prop_assert!(rep.c >= 1.0);
        for w in &rep.per_radius {
            prop_assert!(w.ratio <= rep.c + TOL);
        }
    }

    #[test]
    fn sturm_pipeline_bounds_are_ordered(n in 3usize..8, k in 1usize..4, seed in any::<u64>()) {
        let x = random_mm_space(n, seed);
        for p in [Exponent::ONE, Exponent::TWO, Exponent::Infinite] {
            let s = sketch_sturm_fp_approx(&x, k, p, 1, 0.1).unwrap();
            prop_assert!(s.lower <= s.upper + TOL);
            prop_assert!((s.relation_cost(&x, p).unwrap() - s.upper).abs() <= 1e-7);
        }
    }
}
