//! Maps between partitions and k-point sketches, and the sketching
//! pipelines built on them.

use std::fmt;

use crate::clustering::{
    cost_maxdiam, cost_phi_pq, for_each_combination, gonzalez, local_search_tswap, opt_inf_exact,
    shatter_bruteforce, shatter_cyclic_arcs, shatter_maxdiam_coloring, ClusteringResult, Objective,
};
use crate::correspondence::{distortion, Correspondence, MetricCoupling};
use crate::error::{Error, Result, Status};
use crate::metric::{
    diam_p, dist_to_set, hausdorff_distance, voronoi_partition, Exponent, FiniteMetricSpace,
    MetricMeasureSpace, Partition,
};
use crate::transport::{dis_p, sturm_cost, wasserstein, MeasureCoupling, SturmPair};

/// The k-point space of a sketch.
#[derive(Clone, Debug)]
pub enum SketchModel {
    Metric(FiniteMetricSpace),
    Measure(MetricMeasureSpace),
}

impl SketchModel {
    pub fn space(&self) -> &FiniteMetricSpace {
        match self {
            SketchModel::Metric(s) => s,
            SketchModel::Measure(s) => s.space(),
        }
    }

    pub fn len(&self) -> usize {
        self.space().len()
    }

    pub fn is_empty(&self) -> bool {
        self.space().is_empty()
    }
}

/// The object relating the input space to its sketch; its cost is the
/// sketch's upper bound.
#[derive(Clone, Debug)]
pub enum SketchRelation {
    /// Cost `dis(R) / 2`.
    Correspondence(Correspondence),
    /// Cost: Hausdorff distance inside the coupling.
    Coupling(MetricCoupling),
    /// Cost `dis_p(γ) / 2`.
    Plan(MeasureCoupling),
    /// Cost: the Sturm cost of the pair.
    Sturm(SturmPair),
}

/// Which construction produced a sketch and which argument certifies its
/// lower bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SketchMethod {
    /// Hausdorff map of an exactly optimal max-diameter partition; lower bound
    /// by the duality `Sketch_k = ½ Shatter_k`.
    ExactDuality,
    /// As [`SketchMethod::ExactDuality`] with the optimum taken over
    /// contiguous arcs of a cyclically ordered sample.
    CyclicArcDuality,
    /// Hausdorff map of the Gonzalez partition; lower bound a quarter of the
    /// Gonzalez cost.
    GonzalezDuality,
    /// Farthest point subset; lower bound half the covering distance, since
    /// the first `k + 1` sampled points are pairwise that far apart.
    FarthestPoints,
    /// Wasserstein map of the local-search Voronoi partition with its Sturm
    /// coupling; lower bound half the local-search value over its
    /// approximation factor.
    SturmLocalSearch,
    /// Wasserstein map of the best candidate partition with the block
    /// coupling; exact lower bound only for `k = 1`.
    WeakPartitionCoupling,
}

impl fmt::Display for SketchMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SketchMethod::ExactDuality => "exact-duality",
            SketchMethod::CyclicArcDuality => "cyclic-arc-duality",
            SketchMethod::GonzalezDuality => "gonzalez-duality",
            SketchMethod::FarthestPoints => "farthest-points",
            SketchMethod::SturmLocalSearch => "sturm-local-search",
            SketchMethod::WeakPartitionCoupling => "weak-partition-coupling",
        })
    }
}

/// A k-point sketch with certified bounds on the optimal sketching cost.
#[derive(Clone, Debug)]
pub struct SketchResult {
    pub model: SketchModel,
    pub relation: SketchRelation,
    pub upper: f64,
    pub lower: f64,
    pub method: SketchMethod,
    pub status: Status,
}

impl SketchResult {
    /// Re-evaluates the relation's cost against the input space.
    pub fn relation_cost(&self, x: &MetricMeasureSpace, p: Exponent) -> Result<f64> {
        Ok(match &self.relation {
            SketchRelation::Correspondence(r) => {
                distortion(r, x.space(), self.model.space())? / 2.0
            }
            SketchRelation::Coupling(d) => d.hausdorff(),
            SketchRelation::Plan(plan) => {
                let SketchModel::Measure(m) = &self.model else {
                    return Err(Error::MeasureRequired(
                        "a plan relation needs a measured model".into(),
                    ));
                };
                0.5 * dis_p(plan, x, m, p)
            }
            SketchRelation::Sturm(sp) => sturm_cost(sp, p),
        })
    }
}

/// Hausdorff map: the k-point space of pairwise block Hausdorff distances.
pub fn hausdorff_map(x: &FiniteMetricSpace, part: &Partition) -> Result<FiniteMetricSpace> {
    let k = part.k();
    let b = part.blocks();
    let mut d = vec![0.0; k * k];
    for i in 0..k {
        for j in (i + 1)..k {
            let v = hausdorff_distance(x, &b[i], &b[j]);
            if v == 0.0 {
                return Err(Error::DegenerateOutput { i, j });
            }
            d[i * k + j] = v;
            d[j * k + i] = v;
        }
    }
    Ok(FiniteMetricSpace::from_trusted(k, d))
}

/// Voronoi map: assigns each point of `X` to its nearest model point in the
/// coupling (earliest model point on ties).
pub fn voronoi_map(
    x: &FiniteMetricSpace,
    model: &FiniteMetricSpace,
    d: &MetricCoupling,
) -> Result<Partition> {
    let (n, k) = d.sizes();
    if n != x.len() || k != model.len() {
        return Err(Error::InvalidCoupling(format!(
            "coupling is {n}x{k}, spaces have {} and {} points",
            x.len(),
            model.len()
        )));
    }
    let mut blocks = vec![Vec::new(); k];
    for a in 0..n {
        let mut best = 0;
        for i in 1..k {
            if d.d(a, i) < d.d(a, best) {
                best = i;
            }
        }
        blocks[best].push(a);
    }
    if let Some(i) = blocks.iter().position(Vec::is_empty) {
        return Err(Error::EmptyBlock(i));
    }
    Partition::new(blocks, n)
}

/// The graph correspondence `{(x, i) : x ∈ B_i}` of a partition.
pub fn partition_correspondence(part: &Partition) -> Correspondence {
    Correspondence::graph(&part.assignment(), part.k()).expect("every block is nonempty")
}

/// Sketch of `X` by the Hausdorff map of `part`; the upper bound is half the
/// distortion of the partition's graph correspondence, at most half the max
/// block diameter.
pub fn sketch_from_partition(
    x: &FiniteMetricSpace,
    part: &Partition,
) -> Result<(FiniteMetricSpace, Correspondence, f64)> {
    let model = hausdorff_map(x, part)?;
    let r = partition_correspondence(part);
    let upper = distortion(&r, x, &model)? / 2.0;
    Ok((model, r, upper))
}

/// Exact max-diameter Shatter solver used by [`sketch_k_exact`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ShatterSolver {
    /// Partition enumeration with a cap on visited partitions.
    Brute { max_partitions: u64 },
    /// Threshold search with exact coloring and a node budget.
    Coloring { budget: u64 },
    /// Contiguous arcs of a cyclically ordered sample.
    CyclicArcs,
}

impl ShatterSolver {
    pub fn solve(self, x: &FiniteMetricSpace, k: usize) -> Result<ClusteringResult> {
        match self {
            ShatterSolver::Brute { max_partitions } => shatter_bruteforce(
                &MetricMeasureSpace::uniform(x.clone()),
                k,
                Objective::MaxDiam,
                max_partitions,
            ),
            ShatterSolver::Coloring { budget } => shatter_maxdiam_coloring(x, k, budget),
            ShatterSolver::CyclicArcs => shatter_cyclic_arcs(x, k),
        }
    }
}

/// `Sketch_k(X)` through the duality with `Shatter_k`: the Hausdorff map of an
/// optimal partition, related by its graph correspondence.
pub fn sketch_k_exact(
    x: &FiniteMetricSpace,
    k: usize,
    solver: ShatterSolver,
) -> Result<SketchResult> {
    let opt = solver.solve(x, k)?;
    let (model, r, upper) = sketch_from_partition(x, &opt.partition)?;
    let method = match solver {
        ShatterSolver::CyclicArcs => SketchMethod::CyclicArcDuality,
        _ => SketchMethod::ExactDuality,
    };
    Ok(SketchResult {
        model: SketchModel::Metric(model),
        relation: SketchRelation::Correspondence(r),
        upper,
        lower: (opt.cost / 2.0).min(upper),
        method,
        status: Status::Exact,
    })
}

/// Sketch from the Gonzalez partition: within a factor 2 of `Sketch_k(X)`.
pub fn sketch_k_2approx(x: &FiniteMetricSpace, k: usize) -> Result<SketchResult> {
    let (_, part) = gonzalez(x, k)?;
    let cost = cost_maxdiam(x, &part);
    let (model, r, upper) = sketch_from_partition(x, &part)?;
    Ok(SketchResult {
        model: SketchModel::Metric(model),
        relation: SketchRelation::Correspondence(r),
        upper,
        lower: (cost / 4.0).min(upper),
        method: SketchMethod::GonzalezDuality,
        status: Status::Exact,
    })
}

/// Sketch by the farthest point subset `F` started at `seed`; the upper bound
/// is `d_H(X, F)`, within a factor 4 of `Sketch_k(X)`.
pub fn fps_sketch_4approx(x: &FiniteMetricSpace, k: usize, seed: usize) -> Result<SketchResult> {
    let k = k.min(x.len());
    let centers = crate::clustering::fps(x, k, seed)?;
    let f = centers.as_slice();
    let model = x.subspace(f);
    let n = x.len();
    let cross: Vec<f64> = (0..n)
        .flat_map(|a| f.iter().map(move |&c| x.d(a, c)))
        .collect();
    let coupling = MetricCoupling::from_trusted(n, k, cross);
    let upper = coupling.hausdorff();
    let covering = (0..n).map(|a| dist_to_set(x, a, f)).fold(0.0, f64::max);
    Ok(SketchResult {
        model: SketchModel::Metric(model),
        relation: SketchRelation::Coupling(coupling),
        upper,
        lower: covering / 2.0,
        method: SketchMethod::FarthestPoints,
        status: Status::Exact,
    })
}

/// Wasserstein map: block `i` becomes a point of mass `μ(B_i)` and blocks are
/// at distance `W_p(μ_{B_i}, μ_{B_j})` of their normalized restrictions.
pub fn wasserstein_map(
    x: &MetricMeasureSpace,
    part: &Partition,
    p: Exponent,
) -> Result<MetricMeasureSpace> {
    let k = part.k();
    let cond: Vec<Vec<f64>> = part.blocks().iter().map(|b| x.conditional(b)).collect();
    let mut d = vec![0.0; k * k];
    for i in 0..k {
        for j in (i + 1)..k {
            let (v, _) = wasserstein(x.space(), &cond[i], &cond[j], p)?;
            if v == 0.0 {
                return Err(Error::DegenerateOutput { i, j });
            }
            d[i * k + j] = v;
            d[j * k + i] = v;
        }
    }
    let mass = part.blocks().iter().map(|b| x.mass_of(b)).collect();
    MetricMeasureSpace::new(FiniteMetricSpace::from_trusted(k, d), mass)
}

/// `W_p(δ_x, μ_B)` for the normalized restriction of `μ` to `block`.
fn point_to_block(x: &MetricMeasureSpace, a: usize, block: &[usize], p: Exponent) -> f64 {
    match p {
        Exponent::Infinite => block.iter().map(|&y| x.d(a, y)).fold(0.0, f64::max),
        Exponent::Finite(p) => {
            let total = x.mass_of(block);
            let s: f64 = block.iter().map(|&y| x.d(a, y).powf(p) * x.mass()[y]).sum();
            (s / total).powf(1.0 / p)
        }
    }
}

/// The explicit Sturm pair of a partition: the Wasserstein map as model,
/// cross distances `d(x, i) = W_p(δ_x, μ_{B_i})` and the block plan. Returns
/// its Sturm cost (at most `Φ_{p,p}(X, P)`), the pair and the model.
pub fn sturm_upper_from_partition(
    x: &MetricMeasureSpace,
    part: &Partition,
    p: Exponent,
) -> Result<(f64, SturmPair, MetricMeasureSpace)> {
    let model = wasserstein_map(x, part, p)?;
    let (n, k) = (x.len(), part.k());
    let mut cross = vec![0.0; n * k];
    for a in 0..n {
        for (i, b) in part.blocks().iter().enumerate() {
            cross[a * k + i] = point_to_block(x, a, b, p);
        }
    }
    let sp = SturmPair::new(
        MetricCoupling::from_trusted(n, k, cross),
        MeasureCoupling::from_partition(x, part),
    )?;
    Ok((sturm_cost(&sp, p), sp, model))
}

/// Approximation factor of t-swap local search for `‖C‖_p`, or `None` where
/// no guarantee is available (`1 < p < 2`).
pub fn local_search_factor(p: f64, t: usize, epsilon: f64) -> Option<f64> {
    let t = t as f64;
    if p == 1.0 {
        Some(3.0 + 2.0 / t + epsilon)
    } else if p == 2.0 {
        Some(5.0 + 4.0 / t + epsilon)
    } else if p > 2.0 {
        Some((3.0 + 2.0 / t) * p + epsilon)
    } else {
        None
    }
}

/// Approximation factor of [`sketch_sturm_fp_approx`] for `p ∈ {1, 2}` and
/// `p > 2`.
pub fn sturm_pipeline_factor(p: f64, t: usize, epsilon: f64) -> Option<f64> {
    let t = t as f64;
    if p == 1.0 {
        Some(12.0 + 8.0 / t + epsilon)
    } else if p == 2.0 {
        Some(20.0 + 16.0 / t + epsilon)
    } else if p > 2.0 {
        Some((12.0 + 8.0 / t) * p + epsilon)
    } else {
        None
    }
}

/// Node budget for the exact k-center search in the `p = ∞` pipeline.
const K_CENTER_BUDGET: u64 = 5_000_000;

/// Sturm sketch pipeline: local search for centers, their Voronoi partition,
/// then the Wasserstein map with its explicit Sturm coupling.
///
/// The lower bound is `½ · opt_p / …`: half of a certified lower bound on
/// `opt_p ≤ Shatter_{k,p,p}`, derived from the local-search guarantee.
pub fn sketch_sturm_fp_approx(
    x: &MetricMeasureSpace,
    k: usize,
    p: Exponent,
    t: usize,
    epsilon: f64,
) -> Result<SketchResult> {
    let n = x.len();
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    if k >= n {
        let part = Partition::singletons(n);
        let (upper, sp, model) = sturm_upper_from_partition(x, &part, p)?;
        return Ok(SketchResult {
            model: SketchModel::Measure(model),
            relation: SketchRelation::Sturm(sp),
            upper,
            lower: 0.0,
            method: SketchMethod::SturmLocalSearch,
            status: Status::Exact,
        });
    }
    let (centers, opt_lower) = match p {
        Exponent::Finite(pv) => {
            let (c, value) = local_search_tswap(x, k, p, t, epsilon)?;
            let lower = local_search_factor(pv, t, epsilon).map_or(0.0, |f| value / f);
            (c.as_slice().to_vec(), lower)
        }
        Exponent::Infinite => match opt_inf_exact(x.space(), k, K_CENTER_BUDGET) {
            Some((c, r)) => (c.as_slice().to_vec(), r),
            None => {
                let (c, _) = gonzalez(x.space(), k)?;
                let r = crate::clustering::norm_p_of_centers(x, c.as_slice(), p);
                (c.as_slice().to_vec(), r / 2.0)
            }
        },
    };
    let part = voronoi_partition(x.space(), &centers)?;
    let (upper, sp, model) = sturm_upper_from_partition(x, &part, p)?;
    Ok(SketchResult {
        model: SketchModel::Measure(model),
        relation: SketchRelation::Sturm(sp),
        upper,
        lower: (opt_lower / 2.0).min(upper),
        method: SketchMethod::SturmLocalSearch,
        status: Status::Exact,
    })
}

/// Largest `n` for which [`weak_sketch_upper`] enumerates every partition.
pub const WEAK_BRUTE_LIMIT: usize = 10;

/// Certified upper bound on the weak (Gromov–Wasserstein) sketching cost:
/// the best `½ · dis_p` of the block coupling to the Wasserstein map, over all
/// partitions into at most `k` blocks when `n ≤ 10`, otherwise over the
/// Gonzalez and local-search Voronoi partitions.
pub fn weak_sketch_upper(x: &MetricMeasureSpace, k: usize, p: Exponent) -> Result<SketchResult> {
    let n = x.len();
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    let mut candidates: Vec<Partition> = Vec::new();
    if k >= n {
        candidates.push(Partition::singletons(n));
    } else if n <= WEAK_BRUTE_LIMIT {
        enumerate_partitions(n, k, |assign| {
            candidates.push(Partition::from_assignment(assign))
        });
    } else {
        candidates.push(gonzalez(x.space(), k)?.1);
        if let Exponent::Finite(_) = p {
            let (c, _) = local_search_tswap(x, k, p, 1, 0.5)?;
            candidates.push(voronoi_partition(x.space(), c.as_slice())?);
        }
    }
    let mut best: Option<(f64, MetricMeasureSpace, MeasureCoupling)> = None;
    for part in &candidates {
        let model = wasserstein_map(x, part, p)?;
        let plan = MeasureCoupling::from_partition(x, part);
        let v = 0.5 * dis_p(&plan, x, &model, p);
        if best.as_ref().is_none_or(|b| v < b.0) {
            best = Some((v, model, plan));
        }
    }
    let (upper, model, plan) = best.expect("at least one candidate partition");
    let lower = if k == 1 {
        0.5 * diam_p(x, &(0..n).collect::<Vec<_>>(), p)
    } else {
        0.0
    };
    Ok(SketchResult {
        model: SketchModel::Measure(model),
        relation: SketchRelation::Plan(plan),
        upper,
        lower: lower.min(upper),
        method: SketchMethod::WeakPartitionCoupling,
        status: Status::Exact,
    })
}

/// Calls `f` with the block assignment of every partition of `0..n` into at
/// most `k` blocks, as restricted growth strings.
pub fn enumerate_partitions(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    fn rec(i: usize, used: usize, k: usize, assign: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
        if i == assign.len() {
            f(assign);
            return;
        }
        for b in 0..(used + 1).min(k) {
            assign[i] = b;
            rec(i + 1, used.max(b + 1), k, assign, f);
        }
    }
    if n == 0 || k == 0 {
        return;
    }
    let mut assign = vec![0; n];
    rec(1, 1, k, &mut assign, &mut f);
}

/// Optimal `Φ_{p,p}` partition, used as the reference for Sturm bounds.
pub fn shatter_pp(
    x: &MetricMeasureSpace,
    k: usize,
    p: Exponent,
    max_partitions: u64,
) -> Result<ClusteringResult> {
    shatter_bruteforce(x, k, Objective::Phi { p, q: p }, max_partitions)
}

/// `Φ_{p,p}` of a partition (convenience re-export for sketch checks).
pub fn phi_pp(x: &MetricMeasureSpace, part: &Partition, p: Exponent) -> f64 {
    cost_phi_pq(x, part, p, p)
}

/// Every `k`-subset of `0..n`, in lexicographic order.
pub fn subsets_of_size(n: usize, k: usize) -> Vec<Vec<usize>> {
    let all: Vec<usize> = (0..n).collect();
    let mut out = Vec::new();
    for_each_combination(&all, k, |c| {
        out.push(c.to_vec());
        false
    });
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::correspondence::{canonical_coupling_dr, gh_oracle, DEFAULT_GH_BUDGET};
    use crate::instances::{gen_circle, gen_delta, gen_tree_counterexample};
    use std::f64::consts::PI;

    fn line(points: &[f64]) -> FiniteMetricSpace {
        FiniteMetricSpace::from_fn(points.len(), |i, j| (points[i] - points[j]).abs())
    }

    #[test]
    fn hausdorff_map_of_singletons_is_identity() {
        let x = line(&[0.0, 1.0, 3.0]);
        assert_eq!(hausdorff_map(&x, &Partition::singletons(3)).unwrap(), x);
    }

    #[test]
    fn circle_thirds() {
        let c = gen_circle(300).unwrap();
        let part = Partition::from_assignment(&(0..300).map(|i| i / 100).collect::<Vec<_>>());
        let m = hausdorff_map(c.space(), &part).unwrap();
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            assert!((m.d(i, j) - 2.0 * PI / 3.0).abs() < 2.0 * PI / 300.0 + 1e-12);
        }
    }

    #[test]
    fn tree_branch_pairs_round_trip() {
        let (x, _) = gen_tree_counterexample(1).unwrap();
        let part = Partition::new(vec![vec![0, 1], vec![2, 3], vec![4, 5]], 6).unwrap();
        let m = hausdorff_map(&x, &part).unwrap();
        let g = gh_oracle(&x, &m, DEFAULT_GH_BUDGET).unwrap();
        assert_eq!(g.value(), 0.5);
        let d = canonical_coupling_dr(&g.witness, &x, &m).unwrap();
        let back = voronoi_map(&x, &m, &d).unwrap();
        assert_eq!(back.canonical(), part);
    }

    #[test]
    fn voronoi_map_trivial_cases() {
        let x = line(&[0.0, 1.0, 3.0]);
        let one = FiniteMetricSpace::from_fn(1, |_, _| 0.0);
        let d = MetricCoupling::constant(3, 1, 5.0);
        assert_eq!(voronoi_map(&x, &one, &d).unwrap(), Partition::whole(3));
        let rows: Vec<Vec<f64>> = (0..3)
            .map(|a| (0..3).map(|b| x.d(a, b) + 0.1).collect())
            .collect();
        let d = MetricCoupling::new(rows, &x, &x).unwrap();
        assert_eq!(voronoi_map(&x, &x, &d).unwrap(), Partition::singletons(3));
    }

    #[test]
    fn exact_sketch_examples() {
        let x = line(&[0.0, 1.0, 3.0, 4.5]);
        let s = sketch_k_exact(
            &x,
            1,
            ShatterSolver::Brute {
                max_partitions: 1000,
            },
        )
        .unwrap();
        assert_eq!((s.upper, s.lower, s.model.len()), (2.25, 2.25, 1));
        let s = sketch_k_exact(
            &x,
            4,
            ShatterSolver::Brute {
                max_partitions: 1000,
            },
        )
        .unwrap();
        assert_eq!(s.upper, 0.0);
        let d = gen_delta(5).unwrap();
        let s = sketch_k_2approx(d.space(), 3).unwrap();
        assert!(s.upper <= 1.0);
        assert!(s.lower <= 0.5 && s.upper >= 0.5);
    }

    #[test]
    fn fps_sketch_on_grid() {
        let pts: Vec<f64> = (0..=10).map(|i| i as f64 / 10.0).collect();
        let x = line(&pts);
        let s = fps_sketch_4approx(&x, 2, 0).unwrap();
        assert_eq!(s.model.len(), 2);
        assert_eq!(s.upper, 0.5);
        assert!(s.upper <= 4.0 * 0.25);
        assert_eq!(fps_sketch_4approx(&x, 11, 0).unwrap().upper, 0.0);
    }

    #[test]
    fn wasserstein_map_examples() {
        let d4 = gen_delta(4).unwrap();
        let part = Partition::new(vec![vec![0, 1], vec![2, 3]], 4).unwrap();
        for p in [Exponent::ONE, Exponent::TWO, Exponent::Infinite] {
            let m = wasserstein_map(&d4, &part, p).unwrap();
            assert!((m.d(0, 1) - 1.0).abs() < 1e-12);
            assert_eq!(m.mass(), &[0.5, 0.5]);
        }
        let x = MetricMeasureSpace::uniform(line(&[0.0, 1.0, 3.0]));
        let m = wasserstein_map(&x, &Partition::singletons(3), Exponent::TWO).unwrap();
        assert!((m.d(0, 2) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn sturm_partition_bound() {
        let two = MetricMeasureSpace::uniform(line(&[0.0, 3.0]));
        let (v, _, _) =
            sturm_upper_from_partition(&two, &Partition::whole(2), Exponent::ONE).unwrap();
        assert!((v - 1.5).abs() < 1e-12);
        let d6 = gen_delta(6).unwrap();
        let part = Partition::new(vec![vec![0], vec![1, 2], vec![3, 4, 5]], 6).unwrap();
        for p in [Exponent::ONE, Exponent::TWO] {
            let (v, _, _) = sturm_upper_from_partition(&d6, &part, p).unwrap();
            assert!(v <= phi_pp(&d6, &part, p) + 1e-12);
        }
        let (v, _, _) =
            sturm_upper_from_partition(&d6, &Partition::singletons(6), Exponent::TWO).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn weak_sketch_on_delta() {
        let d8 = gen_delta(8).unwrap();
        let s = weak_sketch_upper(&d8, 4, Exponent::ONE).unwrap();
        assert!(s.upper <= 0.1875);
        assert!((s.relation_cost(&d8, Exponent::ONE).unwrap() - s.upper).abs() < 1e-12);
        let x = MetricMeasureSpace::uniform(line(&[0.0, 1.0, 3.0]));
        let s = weak_sketch_upper(&x, 1, Exponent::TWO).unwrap();
        let half = 0.5 * diam_p(&x, &[0, 1, 2], Exponent::TWO);
        assert!((s.upper - half).abs() < 1e-12);
    }

    #[test]
    fn partition_enumeration_counts() {
        let mut count = 0;
        enumerate_partitions(5, 5, |_| count += 1);
        assert_eq!(count, 52);
        count = 0;
        enumerate_partitions(5, 2, |_| count += 1);
        assert_eq!(count, 16);
    }
}
