//! Generators for the standard instance families and the set-cover
//! reduction.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::clustering::{shatter_bruteforce, Objective, DEFAULT_MAX_PARTITIONS};
use crate::error::{Error, Result};
use crate::metric::{FiniteMetricSpace, MetricMeasureSpace, Partition};

/// `Δ_m`: `m` points at mutual distance 1 with uniform mass.
pub fn gen_delta(m: usize) -> Result<MetricMeasureSpace> {
    if m == 0 {
        return Err(Error::InvalidParameter("Δ_m needs m >= 1".into()));
    }
    Ok(MetricMeasureSpace::uniform(FiniteMetricSpace::from_fn(
        m,
        |_, _| 1.0,
    )))
}

/// `n` evenly spaced points on the unit circle with the geodesic metric.
pub fn gen_circle(n: usize) -> Result<MetricMeasureSpace> {
    if n < 3 {
        return Err(Error::InvalidParameter(
            "a circle sample needs n >= 3".into(),
        ));
    }
    let step = 2.0 * PI / n as f64;
    Ok(MetricMeasureSpace::uniform(FiniteMetricSpace::from_fn(
        n,
        |i, j| {
            let k = i.abs_diff(j).min(n - i.abs_diff(j));
            k as f64 * step
        },
    )))
}

/// `n ≥ 2` evenly spaced points on `[0, 1]` with uniform mass.
pub fn gen_interval_grid(n: usize) -> Result<MetricMeasureSpace> {
    if n < 2 {
        return Err(Error::InvalidParameter(
            "an interval grid needs n >= 2".into(),
        ));
    }
    let h = 1.0 / (n - 1) as f64;
    Ok(MetricMeasureSpace::uniform(FiniteMetricSpace::from_fn(
        n,
        |i, j| i.abs_diff(j) as f64 * h,
    )))
}

/// `n` points drawn uniformly from the unit sphere in `R^dim` (so `dim = 3`
/// samples `S²`), with the geodesic metric `arccos⟨u, v⟩`.
///
/// Each point is a vector of `dim` standard normal deviates from a ChaCha8
/// stream seeded with `seed`, normalized to unit length.
pub fn gen_sphere_sample(dim: usize, n: usize, seed: u64) -> Result<FiniteMetricSpace> {
    if dim < 2 || n == 0 {
        return Err(Error::InvalidParameter(
            "sphere samples need dim >= 2 and n >= 1".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = Vec::with_capacity(n);
    while points.len() < n {
        let v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        let norm = v.iter().map(|c| c * c).sum::<f64>().sqrt();
        if norm > 1e-12 {
            points.push(v.into_iter().map(|c| c / norm).collect::<Vec<f64>>());
        }
    }
    Ok(FiniteMetricSpace::from_fn(n, |i, j| {
        let dot: f64 = points[i].iter().zip(&points[j]).map(|(a, b)| a * b).sum();
        dot.clamp(-1.0, 1.0).acos()
    }))
}

/// Euclidean distances between points given by coordinates.
pub fn euclidean(points: &[Vec<f64>]) -> Result<FiniteMetricSpace> {
    let n = points.len();
    let mut rows = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                rows[i][j] = points[i]
                    .iter()
                    .zip(&points[j])
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt();
            }
        }
    }
    FiniteMetricSpace::new(rows)
}

/// `Y_{n,k}`: `k` copies of the grid `{0, 1/n, …, 1}` placed at offsets
/// `0, 2, 4, …`, so adjacent copies are exactly 1 apart and the diameter is
/// `2k − 1`.
pub fn gen_ynk(n: usize, k: usize) -> Result<FiniteMetricSpace> {
    if n == 0 || k == 0 {
        return Err(Error::InvalidParameter("Y_{n,k} needs n, k >= 1".into()));
    }
    let coords: Vec<f64> = (0..k)
        .flat_map(|b| (0..=n).map(move |j| 2.0 * b as f64 + j as f64 / n as f64))
        .collect();
    Ok(FiniteMetricSpace::from_fn(coords.len(), |i, j| {
        (coords[i] - coords[j]).abs()
    }))
}

/// Tree pair whose GH-closest 3m-point space is not a subset.
///
/// `X` has `3m` branches hanging from a common root; branch `i` carries a
/// point at depth 1 (index `2i`) and one at depth 2 (index `2i + 1`). `Y` has
/// `3m` points at depth `3/2` on separate branches, so all its distances are 3.
pub fn gen_tree_counterexample(m: usize) -> Result<(FiniteMetricSpace, FiniteMetricSpace)> {
    if m == 0 {
        return Err(Error::InvalidParameter("need m >= 1".into()));
    }
    let branches = 3 * m;
    let depth = |i: usize| -> f64 {
        if i.is_multiple_of(2) {
            1.0
        } else {
            2.0
        }
    };
    let x = FiniteMetricSpace::from_fn(2 * branches, |i, j| {
        if i / 2 == j / 2 {
            (depth(i) - depth(j)).abs()
        } else {
            depth(i) + depth(j)
        }
    });
    let y = FiniteMetricSpace::from_fn(branches, |_, _| 3.0);
    Ok((x, y))
}

/// Planar pair whose GH-closest 3m-point space is not a subset.
///
/// For `m = 1`, `X` is `(0,1), (0,2)` and their rotations by ±120°, `Y` is
/// the three points at radius `3/2` on the same rays. Larger `m` places `m`
/// translated copies 100 units apart along the first axis.
pub fn gen_euclidean_counterexample(m: usize) -> Result<(FiniteMetricSpace, FiniteMetricSpace)> {
    if m == 0 {
        return Err(Error::InvalidParameter("need m >= 1".into()));
    }
    let s3 = 3f64.sqrt();
    let x_base = [
        [0.0, 1.0],
        [0.0, 2.0],
        [-s3 / 2.0, -0.5],
        [-s3, -1.0],
        [s3 / 2.0, -0.5],
        [s3, -1.0],
    ];
    let y_base = [
        [0.0, 1.5],
        [-3.0 * s3 / 4.0, -0.75],
        [3.0 * s3 / 4.0, -0.75],
    ];
    let place = |base: &[[f64; 2]]| -> Vec<Vec<f64>> {
        (0..m)
            .flat_map(|c| {
                base.iter()
                    .map(move |p| vec![p[0] + 100.0 * c as f64, p[1]])
            })
            .collect()
    };
    Ok((euclidean(&place(&x_base))?, euclidean(&place(&y_base))?))
}

/// A set-cover decision instance: can `k` of the subsets cover `0..n`?
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetCoverInstance {
    n: usize,
    subsets: Vec<Vec<usize>>,
    k: usize,
}

impl SetCoverInstance {
    pub fn new(n: usize, mut subsets: Vec<Vec<usize>>, k: usize) -> Result<Self> {
        let mut covered = vec![false; n];
        for (j, s) in subsets.iter_mut().enumerate() {
            if s.is_empty() {
                return Err(Error::InvalidParameter(format!("subset {j} is empty")));
            }
            s.sort_unstable();
            s.dedup();
            for &u in s.iter() {
                if u >= n {
                    return Err(Error::InvalidParameter(format!(
                        "subset {j} names element {u} >= {n}"
                    )));
                }
                covered[u] = true;
            }
        }
        if let Some(u) = covered.iter().position(|&c| !c) {
            return Err(Error::InvalidParameter(format!(
                "element {u} is in no subset"
            )));
        }
        if k == 0 {
            return Err(Error::InvalidParameter("k must be at least 1".into()));
        }
        Ok(Self { n, subsets, k })
    }

    pub fn universe(&self) -> usize {
        self.n
    }

    pub fn subsets(&self) -> &[Vec<usize>] {
        &self.subsets
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Whether at most `k` subsets cover the universe (exhaustive).
    pub fn has_cover(&self) -> bool {
        let m = self.subsets.len();
        let masks: Vec<u64> = self
            .subsets
            .iter()
            .map(|s| s.iter().fold(0u64, |a, &u| a | 1 << u))
            .collect();
        let full = if self.n == 64 {
            u64::MAX
        } else {
            (1u64 << self.n) - 1
        };
        (0u64..1 << m).any(|choice| {
            choice.count_ones() as usize <= self.k
                && (0..m)
                    .filter(|j| choice >> j & 1 == 1)
                    .fold(0, |a, j| a | masks[j])
                    == full
        })
    }
}

/// Indices of the vertices of the reduction graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ReductionLayout {
    /// Elements occupy `0..n`.
    pub elements: usize,
    /// Subsets occupy `n..n + m`.
    pub subsets: usize,
    /// The hub `r` adjacent to every subset vertex.
    pub r: usize,
    /// The pendant `r'` adjacent only to `r`.
    pub r_prime: usize,
}

/// Shortest-path metric of the reduction graph: element vertices, subset
/// vertices, a hub `r` and a pendant `r'`, with unit edges `r – r'`,
/// `r – S_j` and `u_i – S_j` whenever `u_i ∈ S_j`.
pub fn setcover_to_graph(inst: &SetCoverInstance) -> (FiniteMetricSpace, ReductionLayout) {
    let (n, m) = (inst.n, inst.subsets.len());
    let layout = ReductionLayout {
        elements: n,
        subsets: m,
        r: n + m,
        r_prime: n + m + 1,
    };
    let v = n + m + 2;
    let mut edges = vec![(layout.r, layout.r_prime)];
    for (j, s) in inst.subsets.iter().enumerate() {
        edges.push((layout.r, n + j));
        for &u in s {
            edges.push((u, n + j));
        }
    }
    (graph_metric(v, &edges), layout)
}

/// Unit-weight shortest-path metric of a connected graph (BFS from each vertex).
pub fn graph_metric(v: usize, edges: &[(usize, usize)]) -> FiniteMetricSpace {
    let mut adj = vec![Vec::new(); v];
    for &(a, b) in edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut dist = vec![f64::INFINITY; v * v];
    for s in 0..v {
        dist[s * v + s] = 0.0;
        let mut queue = std::collections::VecDeque::from([s]);
        while let Some(a) = queue.pop_front() {
            for &b in &adj[a] {
                if dist[s * v + b].is_infinite() {
                    dist[s * v + b] = dist[s * v + a] + 1.0;
                    queue.push_back(b);
                }
            }
        }
    }
    FiniteMetricSpace::from_trusted(v, dist)
}

/// Both sides of the set-cover / clustering equivalence for one instance.
#[derive(Clone, Debug)]
pub struct ReductionCheck {
    /// At most `k` subsets cover the universe.
    pub has_cover: bool,
    /// The reduction graph splits into at most `k + 1` blocks of diameter ≤ 2.
    pub has_partition: bool,
    /// An optimal partition into at most `k + 1` blocks.
    pub partition: Partition,
    pub shatter: f64,
}

impl ReductionCheck {
    pub fn agree(&self) -> bool {
        self.has_cover == self.has_partition
    }
}

/// Evaluates both sides of the equivalence by exhaustive search.
pub fn reduction_equivalence_check(inst: &SetCoverInstance) -> Result<ReductionCheck> {
    if inst.n + inst.subsets.len() > 10 {
        return Err(Error::BudgetExceeded(format!(
            "{} elements and {} subsets exceed the exhaustive limit of 10",
            inst.n,
            inst.subsets.len()
        )));
    }
    let (g, _) = setcover_to_graph(inst);
    let r = shatter_bruteforce(
        &MetricMeasureSpace::uniform(g),
        inst.k + 1,
        Objective::MaxDiam,
        DEFAULT_MAX_PARTITIONS,
    )?;
    Ok(ReductionCheck {
        has_cover: inst.has_cover(),
        has_partition: r.cost <= 2.0,
        partition: r.partition,
        shatter: r.cost,
    })
}

/// Every instance with universe size `1..=max_n`, a list of `1..=max_m`
/// distinct nonempty subsets covering the universe (in lexicographic order of
/// bitmasks) and `k` in `1..=max_k`.
pub fn all_setcover_instances(max_n: usize, max_m: usize, max_k: usize) -> Vec<SetCoverInstance> {
    let mut out = Vec::new();
    for n in 1..=max_n {
        let masks: Vec<usize> = (1..1usize << n).collect();
        for m in 1..=max_m {
            crate::clustering::for_each_combination(&masks, m, |choice| {
                let subsets: Vec<Vec<usize>> = choice
                    .iter()
                    .map(|&mask| (0..n).filter(|u| mask >> u & 1 == 1).collect())
                    .collect();
                for k in 1..=max_k {
                    if let Ok(inst) = SetCoverInstance::new(n, subsets.clone(), k) {
                        out.push(inst);
                    }
                }
                false
            });
        }
    }
    out
}

/// Random metric on `n` points, deterministic in `seed`. Alternates between
/// planar Euclidean samples, distances drawn from `[1, 2]` (always metric) and
/// shortest-path closures of random weights, by `seed % 3`.
pub fn random_metric(n: usize, seed: u64) -> FiniteMetricSpace {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match seed % 3 {
        0 => {
            let pts: Vec<(f64, f64)> = (0..n)
                .map(|_| (rng.gen::<f64>(), rng.gen::<f64>()))
                .collect();
            FiniteMetricSpace::from_fn(n, |i, j| {
                let (dx, dy) = (pts[i].0 - pts[j].0, pts[i].1 - pts[j].1);
                (dx * dx + dy * dy).sqrt().max(1e-6)
            })
        }
        1 => {
            let w: Vec<f64> = (0..n * n).map(|_| rng.gen_range(1.0..2.0)).collect();
            FiniteMetricSpace::from_fn(n, |i, j| w[i * n + j])
        }
        _ => {
            let mut d = vec![0.0; n * n];
            for i in 0..n {
                for j in (i + 1)..n {
                    let v = rng.gen_range(0.1..1.0);
                    d[i * n + j] = v;
                    d[j * n + i] = v;
                }
            }
            for k in 0..n {
                for i in 0..n {
                    for j in 0..n {
                        let via = d[i * n + k] + d[k * n + j];
                        if via < d[i * n + j] {
                            d[i * n + j] = via;
                        }
                    }
                }
            }
            FiniteMetricSpace::from_trusted(n, d)
        }
    }
}

/// [`random_metric`] with a random full-support probability vector.
pub fn random_mm_space(n: usize, seed: u64) -> MetricMeasureSpace {
    let x = random_metric(n, seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let raw: Vec<f64> = (0..n).map(|_| rng.gen_range(0.2..1.0)).collect();
    let total: f64 = raw.iter().sum();
    let mass = raw.iter().map(|v| v / total).collect();
    MetricMeasureSpace::new(x, mass).expect("normalized positive masses")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{diam, validate_metric};

    fn revalidate(x: &FiniteMetricSpace) {
        validate_metric(&x.rows()).unwrap();
    }

    #[test]
    fn delta_and_circle() {
        assert_eq!(gen_delta(1).unwrap().len(), 1);
        let d2 = gen_delta(2).unwrap();
        assert_eq!((d2.d(0, 1), d2.mass()[0]), (1.0, 0.5));
        let c4 = gen_circle(4).unwrap();
        assert_eq!(c4.d(0, 1), PI / 2.0);
        assert_eq!(c4.d(0, 2), PI);
        assert_eq!(c4.space().diam(), PI);
        revalidate(c4.space());
    }

    #[test]
    fn sphere_sample_is_deterministic() {
        let a = gen_sphere_sample(3, 30, 7).unwrap();
        let b = gen_sphere_sample(3, 30, 7).unwrap();
        assert_eq!(a, b);
        revalidate(&a);
        assert!(a.diam() <= PI);
    }

    #[test]
    fn ynk_shape() {
        let y1 = gen_ynk(4, 1).unwrap();
        assert_eq!(y1.len(), 5);
        assert_eq!(y1.diam(), 1.0);
        let y3 = gen_ynk(4, 3).unwrap();
        assert_eq!(y3.diam(), 5.0);
        assert_eq!(y3.d(4, 5), 1.0);
        revalidate(&y3);
    }

    #[test]
    fn tree_distances() {
        let (x, y) = gen_tree_counterexample(1).unwrap();
        assert_eq!((x.d(0, 1), x.d(0, 2), x.d(1, 3)), (1.0, 2.0, 4.0));
        assert_eq!(x.d(0, 3), 3.0);
        assert_eq!(diam(&x, &[1, 3]), 4.0);
        assert_eq!(y.d(0, 2), 3.0);
        revalidate(&x);
        let (x2, y2) = gen_tree_counterexample(2).unwrap();
        assert_eq!((x2.len(), y2.len()), (12, 6));
        revalidate(&x2);
    }

    #[test]
    fn euclidean_distances() {
        let (x, y) = gen_euclidean_counterexample(1).unwrap();
        let s3 = 3f64.sqrt();
        assert!((x.d(0, 2) - s3).abs() < 1e-12);
        assert!((x.d(1, 3) - 2.0 * s3).abs() < 1e-12);
        assert!((x.d(0, 3) - 7f64.sqrt()).abs() < 1e-12);
        assert!((x.d(0, 1) - 1.0).abs() < 1e-12);
        assert_eq!(y.len(), 3);
    }

    #[test]
    fn reduction_graph() {
        let inst = SetCoverInstance::new(1, vec![vec![0]], 1).unwrap();
        let (g, l) = setcover_to_graph(&inst);
        assert_eq!(g.len(), 4);
        assert_eq!(g.d(l.r, l.r_prime), 1.0);
        assert_eq!(g.d(0, l.r), 2.0);
        revalidate(&g);
    }

    #[test]
    fn reduction_small_cases() {
        let yes = SetCoverInstance::new(1, vec![vec![0]], 1).unwrap();
        let c = reduction_equivalence_check(&yes).unwrap();
        assert!(c.has_cover && c.has_partition);
        let no = SetCoverInstance::new(2, vec![vec![0], vec![1]], 1).unwrap();
        let c = reduction_equivalence_check(&no).unwrap();
        assert!(!c.has_cover && !c.has_partition);
    }

    #[test]
    fn instance_enumeration_counts() {
        // One element: the single subset {0}, for each k.
        assert_eq!(all_setcover_instances(1, 4, 3).len(), 3);
        for inst in all_setcover_instances(3, 2, 1) {
            assert!(inst.subsets().iter().all(|s| !s.is_empty()));
        }
    }

    #[test]
    fn random_generators_are_metrics() {
        for seed in 0..9 {
            revalidate(&random_metric(7, seed));
            let mm = random_mm_space(6, seed);
            assert!((mm.mass().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }
}
