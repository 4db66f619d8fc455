//! Clustering objectives and the Shatter functionals: exact partition
//! search, Gonzalez / farthest point sampling and t-swap local search.

use std::fmt;

use crate::error::{Error, Result};
use crate::metric::{
    diam, diam_p, rad_p, voronoi_partition, Exponent, FiniteMetricSpace, MetricMeasureSpace,
    Partition,
};

/// The clustering cost minimized by a Shatter functional.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Objective {
    /// Largest block diameter.
    MaxDiam,
    /// `(Σ_i diam_p(B_i)^q μ(B_i))^{1/q}`, or `max_i diam_p(B_i)` for `q = ∞`.
    Phi { p: Exponent, q: Exponent },
    /// As `Phi` with `rad_p` in place of `diam_p`.
    Rad { p: Exponent, q: Exponent },
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Objective::MaxDiam => f.write_str("maxdiam"),
            Objective::Phi { p, q } => write!(f, "phi({p},{q})"),
            Objective::Rad { p, q } => write!(f, "rad({p},{q})"),
        }
    }
}

/// How a clustering cost is certified.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Certificate {
    Exact,
    /// The cost is within this factor of the optimum.
    Approx(f64),
}

/// A partition together with its cost under an objective.
#[derive(Clone, Debug)]
pub struct ClusteringResult {
    pub partition: Partition,
    pub cost: f64,
    pub objective: Objective,
    pub certificate: Certificate,
}

/// An ordered list of distinct center indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CenterSet(Vec<usize>);

impl CenterSet {
    pub fn new(centers: Vec<usize>, n: usize) -> Result<Self> {
        if centers.is_empty() {
            return Err(Error::InvalidParameter("center set is empty".into()));
        }
        let mut sorted = centers.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidParameter("centers must be distinct".into()));
        }
        if sorted.last().is_some_and(|&c| c >= n) {
            return Err(Error::InvalidParameter("center index out of range".into()));
        }
        Ok(CenterSet(centers))
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// `max_i diam(B_i)`.
pub fn cost_maxdiam(x: &FiniteMetricSpace, p: &Partition) -> f64 {
    p.blocks().iter().map(|b| diam(x, b)).fold(0.0, f64::max)
}

fn aggregate(values: impl Iterator<Item = (f64, f64)>, q: Exponent) -> f64 {
    match q {
        Exponent::Infinite => values.map(|(v, _)| v).fold(0.0, f64::max),
        Exponent::Finite(q) => values
            .map(|(v, m)| v.powf(q) * m)
            .sum::<f64>()
            .powf(1.0 / q),
    }
}

/// `Φ_{p,q}(X, P)`.
pub fn cost_phi_pq(x: &MetricMeasureSpace, part: &Partition, p: Exponent, q: Exponent) -> f64 {
    aggregate(
        part.blocks()
            .iter()
            .map(|b| (diam_p(x, b, p), x.mass_of(b))),
        q,
    )
}

/// The radius analogue of [`cost_phi_pq`].
pub fn cost_rad_pq(x: &MetricMeasureSpace, part: &Partition, p: Exponent, q: Exponent) -> f64 {
    aggregate(
        part.blocks()
            .iter()
            .map(|b| (rad_p(x, b, p).0, x.mass_of(b))),
        q,
    )
}

/// Cost of a partition under an objective.
pub fn evaluate(x: &MetricMeasureSpace, part: &Partition, obj: Objective) -> f64 {
    match obj {
        Objective::MaxDiam => cost_maxdiam(x.space(), part),
        Objective::Phi { p, q } => cost_phi_pq(x, part, p, q),
        Objective::Rad { p, q } => cost_rad_pq(x, part, p, q),
    }
}

/// Default cap on the number of partitions visited by [`shatter_bruteforce`].
pub const DEFAULT_MAX_PARTITIONS: u64 = 20_000_000;

/// Exact Shatter value by enumerating every partition into at most `k`
/// blocks (restricted growth strings, so the first optimal partition in that
/// order is returned). The max-diameter objective prunes partial assignments
/// that cannot improve.
pub fn shatter_bruteforce(
    x: &MetricMeasureSpace,
    k: usize,
    obj: Objective,
    max_partitions: u64,
) -> Result<ClusteringResult> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    let n = x.len();
    if k >= n {
        let part = Partition::singletons(n);
        let cost = evaluate(x, &part, obj);
        return Ok(ClusteringResult {
            partition: part,
            cost,
            objective: obj,
            certificate: Certificate::Exact,
        });
    }
    let mut search = Enumerator {
        x,
        k,
        obj,
        powered: powered(x.space(), obj),
        assign: vec![0; n],
        block_diam: vec![0.0; k],
        best: f64::INFINITY,
        best_assign: Vec::new(),
        visited: 0,
        budget: max_partitions,
    };
    search.recurse(1, 1)?;
    let partition = Partition::from_assignment(&search.best_assign);
    let cost = evaluate(x, &partition, obj);
    Ok(ClusteringResult {
        partition,
        cost,
        objective: obj,
        certificate: Certificate::Exact,
    })
}

/// `d^p` for the finite exponent used by an objective (unused for max-diameter).
fn powered(x: &FiniteMetricSpace, obj: Objective) -> Vec<f64> {
    let p = match obj {
        Objective::Phi {
            p: Exponent::Finite(p),
            ..
        }
        | Objective::Rad {
            p: Exponent::Finite(p),
            ..
        } => p,
        _ => return Vec::new(),
    };
    x.flat().iter().map(|d| d.powf(p)).collect()
}

struct Enumerator<'a> {
    x: &'a MetricMeasureSpace,
    k: usize,
    obj: Objective,
    powered: Vec<f64>,
    assign: Vec<usize>,
    block_diam: Vec<f64>,
    best: f64,
    best_assign: Vec<usize>,
    visited: u64,
    budget: u64,
}

impl Enumerator<'_> {
    fn recurse(&mut self, i: usize, used: usize) -> Result<()> {
        let n = self.x.len();
        if i == n {
            self.visited += 1;
            if self.visited > self.budget {
                return Err(Error::BudgetExceeded(format!(
                    "partition enumeration passed {} partitions",
                    self.budget
                )));
            }
            let cost = match self.obj {
                Objective::MaxDiam => self.block_diam[..used].iter().copied().fold(0.0, f64::max),
                _ => self.leaf_cost(used),
            };
            if cost < self.best {
                self.best = cost;
                self.best_assign = self.assign.clone();
            }
            return Ok(());
        }
        let limit = (used + 1).min(self.k);
        for b in 0..limit {
            self.assign[i] = b;
            if self.obj == Objective::MaxDiam {
                let saved = self.block_diam[b];
                let mut nd = saved;
                for j in 0..i {
                    if self.assign[j] == b {
                        nd = nd.max(self.x.d(i, j));
                    }
                }
                if nd >= self.best {
                    continue;
                }
                self.block_diam[b] = nd;
                self.recurse(i + 1, used.max(b + 1))?;
                self.block_diam[b] = saved;
            } else {
                self.recurse(i + 1, used.max(b + 1))?;
            }
        }
        Ok(())
    }

    fn leaf_cost(&self, used: usize) -> f64 {
        let n = self.x.len();
        let mu = self.x.mass();
        let mut blocks: Vec<Vec<usize>> = vec![Vec::new(); used];
        for (i, &b) in self.assign.iter().enumerate() {
            blocks[b].push(i);
        }
        let (p, q, radius) = match self.obj {
            Objective::Phi { p, q } => (p, q, false),
            Objective::Rad { p, q } => (p, q, true),
            Objective::MaxDiam => unreachable!(),
        };
        let values = blocks.iter().map(|b| {
            let mass: f64 = b.iter().map(|&i| mu[i]).sum();
            let v = match (p, radius) {
                (Exponent::Infinite, false) => diam(self.x.space(), b),
                (Exponent::Infinite, true) => rad_p(self.x, b, p).0,
                (Exponent::Finite(p), false) => {
                    let mut s = 0.0;
                    for &i in b {
                        for &j in b {
                            s += self.powered[i * n + j] * mu[i] * mu[j];
                        }
                    }
                    (s / (mass * mass)).powf(1.0 / p)
                }
                (Exponent::Finite(p), true) => {
                    let mut best = f64::INFINITY;
                    for &a in b {
                        let s: f64 = b.iter().map(|&j| self.powered[a * n + j] * mu[j]).sum();
                        best = best.min(s);
                    }
                    (best / mass).powf(1.0 / p)
                }
            };
            (v, mass)
        });
        aggregate(values, q)
    }
}

/// Farthest point sampling: starts at `seed` and repeatedly adds the point
/// farthest from the chosen set (lowest index on ties).
pub fn fps(x: &FiniteMetricSpace, k: usize, seed: usize) -> Result<CenterSet> {
    let n = x.len();
    if k == 0 || k > n {
        return Err(Error::InvalidParameter(format!(
            "need 1 <= k <= {n}, got {k}"
        )));
    }
    if seed >= n {
        return Err(Error::InvalidParameter(format!(
            "seed point {seed} out of range"
        )));
    }
    let mut centers = vec![seed];
    let mut dist: Vec<f64> = x.row(seed).to_vec();
    while centers.len() < k {
        let mut far = 0;
        for i in 1..n {
            if dist[i] > dist[far] {
                far = i;
            }
        }
        centers.push(far);
        for (i, d) in dist.iter_mut().enumerate() {
            *d = d.min(x.d(i, far));
        }
    }
    CenterSet::new(centers, n)
}

/// Gonzalez' algorithm: FPS from point 0 followed by the Voronoi partition of
/// the centers. The max block diameter is at most twice the optimum.
pub fn gonzalez(x: &FiniteMetricSpace, k: usize) -> Result<(CenterSet, Partition)> {
    let k = k.min(x.len());
    let centers = fps(x, k, 0)?;
    let part = voronoi_partition(x, centers.as_slice())?;
    Ok((centers, part))
}

/// [`gonzalez`] packaged as a max-diameter clustering result.
pub fn gonzalez_clustering(x: &FiniteMetricSpace, k: usize) -> Result<ClusteringResult> {
    let (_, partition) = gonzalez(x, k)?;
    let cost = cost_maxdiam(x, &partition);
    let certificate = if k >= x.len() {
        Certificate::Exact
    } else {
        Certificate::Approx(2.0)
    };
    Ok(ClusteringResult {
        partition,
        cost,
        objective: Objective::MaxDiam,
        certificate,
    })
}

/// `‖C‖_p = (Σ_x d(x,C)^p μ(x))^{1/p}`, or `max_x d(x,C)` for `p = ∞`.
pub fn norm_p_of_centers(x: &MetricMeasureSpace, centers: &[usize], p: Exponent) -> f64 {
    let n = x.len();
    let d = (0..n).map(|i| {
        centers
            .iter()
            .map(|&c| x.d(i, c))
            .fold(f64::INFINITY, f64::min)
    });
    match p {
        Exponent::Infinite => d.fold(0.0, f64::max),
        Exponent::Finite(p) => d
            .zip(x.mass())
            .map(|(v, m)| v.powf(p) * m)
            .sum::<f64>()
            .powf(1.0 / p),
    }
}

fn power_cost(x: &MetricMeasureSpace, powered: &[f64], centers: &[usize]) -> f64 {
    let n = x.len();
    (0..n)
        .map(|i| {
            let nearest = centers
                .iter()
                .map(|&c| powered[i * n + c])
                .fold(f64::INFINITY, f64::min);
            nearest * x.mass()[i]
        })
        .sum()
}

/// Calls `f` on every `r`-subset of `items` in lexicographic order; stops
/// early when `f` returns `true`. Returns whether it stopped early.
pub(crate) fn for_each_combination(
    items: &[usize],
    r: usize,
    mut f: impl FnMut(&[usize]) -> bool,
) -> bool {
    let n = items.len();
    if r > n {
        return false;
    }
    let mut idx: Vec<usize> = (0..r).collect();
    let mut buf: Vec<usize> = idx.iter().map(|&i| items[i]).collect();
    loop {
        if f(&buf) {
            return true;
        }
        let mut i = r;
        while i > 0 && idx[i - 1] == i - 1 + n - r {
            i -= 1;
        }
        if i == 0 {
            return false;
        }
        i -= 1;
        idx[i] += 1;
        for j in i + 1..r {
            idx[j] = idx[j - 1] + 1;
        }
        for j in i..r {
            buf[j] = items[idx[j]];
        }
    }
}

/// t-swap local search for the k-median style cost `‖C‖_p` (finite `p`).
///
/// Starts from the Gonzalez centers and accepts the first swap (in
/// lexicographic order of removed set, then added set, sizes `1..=t`) that
/// lowers `Σ μ d(x,C)^p` by at least the factor `1 − ε/(10k)`.
pub fn local_search_tswap(
    x: &MetricMeasureSpace,
    k: usize,
    p: Exponent,
    t: usize,
    epsilon: f64,
) -> Result<(CenterSet, f64)> {
    let n = x.len();
    let p_val = match p {
        Exponent::Finite(p) => p,
        Exponent::Infinite => {
            return Err(Error::InvalidParameter(
                "local search needs a finite exponent".into(),
            ))
        }
    };
    if k == 0 || t == 0 || t > k {
        return Err(Error::InvalidParameter(format!(
            "need 1 <= t <= k, got t={t}, k={k}"
        )));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "epsilon must lie in (0,1), got {epsilon}"
        )));
    }
    if k >= n {
        let all = CenterSet::new((0..n).collect(), n)?;
        return Ok((all, 0.0));
    }
    let powered: Vec<f64> = x.space().flat().iter().map(|d| d.powf(p_val)).collect();
    let tau = epsilon / (10.0 * k as f64);
    let mut centers = fps(x.space(), k, 0)?.as_slice().to_vec();
    centers.sort_unstable();
    let mut cost = power_cost(x, &powered, &centers);
    loop {
        let outside: Vec<usize> = (0..n)
            .filter(|i| centers.binary_search(i).is_err())
            .collect();
        let mut improved = None;
        for s in 1..=t.min(outside.len()) {
            let found = for_each_combination(&centers, s, |out| {
                for_each_combination(&outside, s, |inn| {
                    let mut cand: Vec<usize> = centers
                        .iter()
                        .copied()
                        .filter(|c| !out.contains(c))
                        .chain(inn.iter().copied())
                        .collect();
                    cand.sort_unstable();
                    let c = power_cost(x, &powered, &cand);
                    if c <= (1.0 - tau) * cost && c < cost {
                        improved = Some((cand, c));
                        true
                    } else {
                        false
                    }
                })
            });
            if found {
                break;
            }
        }
        match improved {
            Some((cand, c)) => {
                centers = cand;
                cost = c;
            }
            None => break,
        }
    }
    let value = cost.powf(1.0 / p_val);
    Ok((CenterSet::new(centers, n)?, value))
}

/// Exact `opt_p = min_{|C| = k} ‖C‖_p` by enumerating all center sets.
pub fn opt_p_bruteforce(x: &MetricMeasureSpace, k: usize, p: Exponent) -> Result<(CenterSet, f64)> {
    let n = x.len();
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    let k = k.min(n);
    let all: Vec<usize> = (0..n).collect();
    let mut best = (Vec::new(), f64::INFINITY);
    for_each_combination(&all, k, |c| {
        let v = norm_p_of_centers(x, c, p);
        if v < best.1 {
            best = (c.to_vec(), v);
        }
        false
    });
    Ok((CenterSet::new(best.0, n)?, best.1))
}

/// Exact k-center radius `min_{|C| ≤ k} max_x d(x, C)` by threshold search
/// over distances with a backtracking cover test. `None` when the node budget
/// runs out.
pub fn opt_inf_exact(x: &FiniteMetricSpace, k: usize, budget: u64) -> Option<(CenterSet, f64)> {
    let n = x.len();
    let k = k.min(n);
    let mut cands = x.distinct_distances();
    cands.insert(0, 0.0);
    let mut nodes = 0u64;
    let cover = |r: f64, nodes: &mut u64| -> Option<Option<Vec<usize>>> {
        let mut chosen = Vec::new();
        let mut covered = vec![0u32; n];
        cover_search(x, k, r, &mut chosen, &mut covered, nodes, budget)
            .map(|ok| ok.then_some(chosen))
    };
    let (mut lo, mut hi) = (0, cands.len() - 1);
    let mut best = cover(cands[hi], &mut nodes)??;
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        match cover(cands[mid], &mut nodes)? {
            Some(c) => {
                hi = mid;
                best = c;
            }
            None => lo = mid + 1,
        }
    }
    let value = norm_p_of_centers(
        &MetricMeasureSpace::uniform(x.clone()),
        &best,
        Exponent::Infinite,
    );
    Some((CenterSet::new(best, n).ok()?, value))
}

fn cover_search(
    x: &FiniteMetricSpace,
    k: usize,
    r: f64,
    chosen: &mut Vec<usize>,
    covered: &mut [u32],
    nodes: &mut u64,
    budget: u64,
) -> Option<bool> {
    let Some(first) = covered.iter().position(|&c| c == 0) else {
        return Some(true);
    };
    if chosen.len() == k {
        return Some(false);
    }
    for c in 0..x.len() {
        if x.d(first, c) > r {
            continue;
        }
        *nodes += 1;
        if *nodes > budget {
            return None;
        }
        chosen.push(c);
        for (i, cv) in covered.iter_mut().enumerate() {
            if x.d(i, c) <= r {
                *cv += 1;
            }
        }
        if cover_search(x, k, r, chosen, covered, nodes, budget)? {
            return Some(true);
        }
        for (i, cv) in covered.iter_mut().enumerate() {
            if x.d(i, c) <= r {
                *cv -= 1;
            }
        }
        chosen.pop();
    }
    Some(false)
}

/// How [`shatter_rad`] computes its value.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RadMode {
    /// Enumerate partitions.
    Brute,
    /// Enumerate center sets and take the Voronoi partition of the best one
    /// (valid for `q = p`).
    ViaOptP,
}

/// Shatter for the radius objective `Rad { p, q }`.
pub fn shatter_rad(
    x: &MetricMeasureSpace,
    k: usize,
    p: Exponent,
    q: Exponent,
    mode: RadMode,
    max_partitions: u64,
) -> Result<ClusteringResult> {
    let obj = Objective::Rad { p, q };
    match mode {
        RadMode::Brute => shatter_bruteforce(x, k, obj, max_partitions),
        RadMode::ViaOptP => {
            if p != q {
                return Err(Error::InvalidParameter(
                    "the center-set route needs q = p".into(),
                ));
            }
            let (centers, _) = opt_p_bruteforce(x, k, p)?;
            let partition = voronoi_partition(x.space(), centers.as_slice())?;
            let cost = evaluate(x, &partition, obj);
            Ok(ClusteringResult {
                partition,
                cost,
                objective: obj,
                certificate: Certificate::Exact,
            })
        }
    }
}

/// Largest ultrametric below `d_X`: minimax path distances, computed from a
/// minimum spanning tree.
pub fn subdominant_ultrametric(x: &FiniteMetricSpace) -> FiniteMetricSpace {
    let n = x.len();
    let tree = minimum_spanning_tree(x);
    let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for &(a, b, w) in &tree {
        adj[a].push((b, w));
        adj[b].push((a, w));
    }
    let mut u = vec![0.0; n * n];
    for root in 0..n {
        let mut stack = vec![(root, usize::MAX, 0.0f64)];
        while let Some((v, parent, m)) = stack.pop() {
            u[root * n + v] = m;
            for &(w, len) in &adj[v] {
                if w != parent {
                    stack.push((w, v, m.max(len)));
                }
            }
        }
    }
    FiniteMetricSpace::from_trusted(n, u)
}

/// Prim's algorithm on the complete graph; edges as `(a, b, length)`.
pub fn minimum_spanning_tree(x: &FiniteMetricSpace) -> Vec<(usize, usize, f64)> {
    let n = x.len();
    let mut in_tree = vec![false; n];
    let mut best = vec![(f64::INFINITY, 0usize); n];
    let mut edges = Vec::with_capacity(n.saturating_sub(1));
    in_tree[0] = true;
    for j in 1..n {
        best[j] = (x.d(0, j), 0);
    }
    for _ in 1..n {
        let mut v = usize::MAX;
        for j in 0..n {
            if !in_tree[j] && (v == usize::MAX || best[j].0 < best[v].0) {
                v = j;
            }
        }
        in_tree[v] = true;
        edges.push((best[v].1, v, best[v].0));
        for j in 0..n {
            if !in_tree[j] && x.d(v, j) < best[j].0 {
                best[j] = (x.d(v, j), v);
            }
        }
    }
    edges
}

/// `m_p(x,x') = min over chains (Σ d(x_i,x_{i+1})^p)^{1/p}` (finite `p ≥ 1`).
pub fn metric_transform_mp(x: &FiniteMetricSpace, p: f64) -> Result<FiniteMetricSpace> {
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "metric transform needs finite p >= 1, got {p}"
        )));
    }
    let n = x.len();
    let mut w: Vec<f64> = x.flat().iter().map(|d| d.powf(p)).collect();
    for k in 0..n {
        for i in 0..n {
            let wik = w[i * n + k];
            for j in 0..n {
                let via = wik + w[k * n + j];
                if via < w[i * n + j] {
                    w[i * n + j] = via;
                }
            }
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let v = w[i * n + j].min(w[j * n + i]).powf(1.0 / p);
            w[i * n + j] = v;
            w[j * n + i] = v;
        }
        w[i * n + i] = 0.0;
    }
    Ok(FiniteMetricSpace::from_trusted(n, w))
}

/// Exact Shatter for the max-diameter objective measured in the subdominant
/// ultrametric: single linkage cut into at most `k` clusters.
pub fn shatter_ultrametric(x: &FiniteMetricSpace, k: usize) -> Result<ClusteringResult> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    let n = x.len();
    let mut tree = minimum_spanning_tree(x);
    tree.sort_by(|a, b| b.2.total_cmp(&a.2).then((a.0, a.1).cmp(&(b.0, b.1))));
    let cut = (k - 1).min(tree.len());
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut v: usize) -> usize {
        while parent[v] != v {
            parent[v] = parent[parent[v]];
            v = parent[v];
        }
        v
    }
    for &(a, b, _) in &tree[cut..] {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        parent[ra] = rb;
    }
    let assign: Vec<usize> = (0..n).map(|v| find(&mut parent, v)).collect();
    let partition = Partition::from_assignment(&assign);
    let u = subdominant_ultrametric(x);
    let cost = cost_maxdiam(&u, &partition);
    Ok(ClusteringResult {
        partition,
        cost,
        objective: Objective::MaxDiam,
        certificate: Certificate::Exact,
    })
}

/// Shatter for `Φ̄(X,P) = max_i (diam X − diam B_i)`. The one-block partition
/// costs 0 and the cost is never negative, so it is optimal for every `k`.
pub fn shatter_phi_bar(x: &FiniteMetricSpace, k: usize) -> Result<(Partition, f64)> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    let part = Partition::whole(x.len());
    Ok((part.clone(), cost_phi_bar(x, &part)))
}

/// `Φ̄(X,P) = max_i (diam X − diam B_i)`.
pub fn cost_phi_bar(x: &FiniteMetricSpace, part: &Partition) -> f64 {
    let d = x.diam();
    part.blocks()
        .iter()
        .map(|b| d - diam(x, b))
        .fold(0.0, f64::max)
}

/// Default node budget for coloring-based exact searches.
pub const DEFAULT_COLORING_BUDGET: u64 = 20_000_000;

/// Exact max-diameter Shatter via threshold search: `Shatter_k ≤ t` exactly
/// when the graph joining points at distance `> t` is `k`-colorable.
pub fn shatter_maxdiam_coloring(
    x: &FiniteMetricSpace,
    k: usize,
    budget: u64,
) -> Result<ClusteringResult> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    let n = x.len();
    if k >= n {
        return Ok(ClusteringResult {
            partition: Partition::singletons(n),
            cost: 0.0,
            objective: Objective::MaxDiam,
            certificate: Certificate::Exact,
        });
    }
    let mut cands = x.distinct_distances();
    cands.insert(0, 0.0);
    let mut nodes = 0u64;
    let (mut lo, mut hi) = (0, cands.len() - 1);
    let mut best = vec![0; n];
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        match k_coloring(x, cands[mid], k, &mut nodes, budget) {
            Some(Some(colors)) => {
                hi = mid;
                best = colors;
            }
            Some(None) => lo = mid + 1,
            None => {
                return Err(Error::BudgetExceeded(format!(
                    "coloring search passed {budget} nodes"
                )));
            }
        }
    }
    let partition = Partition::from_assignment(&best);
    let cost = cost_maxdiam(x, &partition);
    Ok(ClusteringResult {
        partition,
        cost,
        objective: Objective::MaxDiam,
        certificate: Certificate::Exact,
    })
}

/// Whether `Shatter_k(X) ≤ t`, decided exactly by coloring; `None` on budget.
pub fn partition_within(
    x: &FiniteMetricSpace,
    k: usize,
    t: f64,
    budget: u64,
) -> Option<Option<Partition>> {
    let mut nodes = 0;
    k_coloring(x, t, k, &mut nodes, budget).map(|c| c.map(|c| Partition::from_assignment(&c)))
}

/// `k`-coloring of `{(i,j) : d(i,j) > t}`, one connected component at a time
/// with DSatur ordering.
fn k_coloring(
    x: &FiniteMetricSpace,
    t: f64,
    k: usize,
    nodes: &mut u64,
    budget: u64,
) -> Option<Option<Vec<usize>>> {
    let n = x.len();
    let adj: Vec<Vec<usize>> = (0..n)
        .map(|i| (0..n).filter(|&j| j != i && x.d(i, j) > t).collect())
        .collect();
    let mut color = vec![usize::MAX; n];
    let mut comp = vec![usize::MAX; n];
    for s in 0..n {
        if comp[s] != usize::MAX {
            continue;
        }
        let mut members = vec![s];
        comp[s] = s;
        let mut head = 0;
        while head < members.len() {
            let v = members[head];
            head += 1;
            for &w in &adj[v] {
                if comp[w] == usize::MAX {
                    comp[w] = s;
                    members.push(w);
                }
            }
        }
        if !dsatur(&adj, &members, k, &mut color, 0, nodes, budget)? {
            return Some(None);
        }
    }
    Some(Some(color))
}

fn dsatur(
    adj: &[Vec<usize>],
    members: &[usize],
    k: usize,
    color: &mut [usize],
    max_used: usize,
    nodes: &mut u64,
    budget: u64,
) -> Option<bool> {
    let mut pick = usize::MAX;
    let mut key = (0usize, 0usize);
    for &v in members {
        if color[v] != usize::MAX {
            continue;
        }
        let mut seen = 0u128;
        let mut free_deg = 0;
        for &w in &adj[v] {
            if color[w] == usize::MAX {
                free_deg += 1;
            } else if color[w] < 128 {
                seen |= 1 << color[w];
            }
        }
        let cand = (seen.count_ones() as usize, free_deg);
        if pick == usize::MAX || cand > key {
            pick = v;
            key = cand;
        }
    }
    if pick == usize::MAX {
        return Some(true);
    }
    *nodes += 1;
    if *nodes > budget {
        return None;
    }
    // Colors above the largest one used so far are interchangeable.
    let limit = (max_used + 1).min(k);
    for c in 0..limit {
        if adj[pick].iter().any(|&w| color[w] == c) {
            continue;
        }
        color[pick] = c;
        if dsatur(adj, members, k, color, max_used.max(c + 1), nodes, budget)? {
            return Some(true);
        }
        color[pick] = usize::MAX;
    }
    Some(false)
}

/// Best partition of points listed in cyclic order into at most `k`
/// contiguous arcs under the max-diameter objective.
pub fn shatter_cyclic_arcs(x: &FiniteMetricSpace, k: usize) -> Result<ClusteringResult> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    let n = x.len();
    if k >= n {
        return Ok(ClusteringResult {
            partition: Partition::singletons(n),
            cost: 0.0,
            objective: Objective::MaxDiam,
            certificate: Certificate::Exact,
        });
    }
    let mut cands = x.distinct_distances();
    cands.insert(0, 0.0);
    let arcs_within = |t: f64| -> Option<Vec<usize>> {
        for start in 0..n {
            let mut assign = vec![0; n];
            let mut arcs = 0;
            let mut pos = 0;
            while pos < n && arcs < k {
                let mut members = vec![(start + pos) % n];
                assign[(start + pos) % n] = arcs;
                pos += 1;
                while pos < n {
                    let v = (start + pos) % n;
                    if members.iter().any(|&u| x.d(u, v) > t) {
                        break;
                    }
                    members.push(v);
                    assign[v] = arcs;
                    pos += 1;
                }
                arcs += 1;
            }
            if pos == n {
                return Some(assign);
            }
        }
        None
    };
    let (mut lo, mut hi) = (0, cands.len() - 1);
    let mut best = arcs_within(cands[hi]).expect("one arc always fits the diameter");
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        match arcs_within(cands[mid]) {
            Some(a) => {
                hi = mid;
                best = a;
            }
            None => lo = mid + 1,
        }
    }
    let partition = Partition::from_assignment(&best);
    let cost = cost_maxdiam(x, &partition);
    Ok(ClusteringResult {
        partition,
        cost,
        objective: Objective::MaxDiam,
        certificate: Certificate::Exact,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn delta(m: usize) -> MetricMeasureSpace {
        MetricMeasureSpace::uniform(FiniteMetricSpace::from_fn(m, |_, _| 1.0))
    }

    fn line(points: &[f64]) -> FiniteMetricSpace {
        FiniteMetricSpace::from_fn(points.len(), |i, j| (points[i] - points[j]).abs())
    }

    fn circle(n: usize) -> FiniteMetricSpace {
        FiniteMetricSpace::from_fn(n, |i, j| {
            let a = 2.0 * PI * (i.abs_diff(j) as f64) / n as f64;
            a.min(2.0 * PI - a)
        })
    }

    #[test]
    fn maxdiam_examples() {
        let c = circle(12);
        assert_eq!(cost_maxdiam(&c, &Partition::singletons(12)), 0.0);
        let arcs = Partition::new(
            vec![(0..4).collect(), (4..8).collect(), (8..12).collect()],
            12,
        )
        .unwrap();
        assert!((cost_maxdiam(&c, &arcs) - PI / 2.0).abs() < 1e-12);
    }

    #[test]
    fn phi_on_delta() {
        let d = delta(6);
        let p = Partition::new(vec![vec![0], vec![1, 2], vec![3, 4, 5]], 6).unwrap();
        for pe in [1.0, 2.0] {
            let e = Exponent::Finite(pe);
            let v = cost_phi_pq(&d, &p, e, e);
            assert!((v - (0.5f64).powf(1.0 / pe)).abs() < 1e-12);
        }
        let eq = Partition::new(vec![vec![0, 1, 2], vec![3, 4, 5]], 6).unwrap();
        let v = cost_phi_pq(&d, &eq, Exponent::TWO, Exponent::Infinite);
        assert!((v - (2.0f64 / 3.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn brute_force_on_delta() {
        for m in [4, 6] {
            let d = delta(m);
            for k in 1..m {
                let r =
                    shatter_bruteforce(&d, k, Objective::MaxDiam, DEFAULT_MAX_PARTITIONS).unwrap();
                assert_eq!(r.cost, 1.0);
                for p in [1.0, 2.0] {
                    let e = Exponent::Finite(p);
                    let r = shatter_bruteforce(
                        &d,
                        k,
                        Objective::Phi { p: e, q: e },
                        DEFAULT_MAX_PARTITIONS,
                    )
                    .unwrap();
                    let expected = (1.0 - k as f64 / m as f64).powf(1.0 / p);
                    assert!((r.cost - expected).abs() < 1e-12);
                }
            }
            let r = shatter_bruteforce(&d, m, Objective::MaxDiam, 10).unwrap();
            assert_eq!(r.cost, 0.0);
        }
    }

    #[test]
    fn brute_force_budget() {
        let d = delta(9);
        let err = shatter_bruteforce(
            &d,
            3,
            Objective::Phi {
                p: Exponent::ONE,
                q: Exponent::ONE,
            },
            10,
        )
        .unwrap_err();
        assert_eq!(err.name(), "BudgetExceeded");
    }

    #[test]
    fn fps_on_line() {
        let pts: Vec<f64> = (0..=10).map(f64::from).collect();
        let l = line(&pts);
        assert_eq!(fps(&l, 1, 4).unwrap().as_slice(), &[4]);
        assert_eq!(fps(&l, 2, 0).unwrap().as_slice(), &[0, 10]);
        assert_eq!(fps(&l, 3, 0).unwrap().as_slice(), &[0, 10, 5]);
    }

    #[test]
    fn gonzalez_on_delta() {
        let d = delta(5);
        assert_eq!(gonzalez_clustering(d.space(), 3).unwrap().cost, 1.0);
        assert_eq!(gonzalez_clustering(d.space(), 5).unwrap().cost, 0.0);
    }

    #[test]
    fn norm_of_centers() {
        let d = delta(5);
        assert_eq!(norm_p_of_centers(&d, &[0, 1, 2, 3, 4], Exponent::ONE), 0.0);
        let v = norm_p_of_centers(&d, &[1, 3], Exponent::TWO);
        assert!((v - (0.6f64).sqrt()).abs() < 1e-12);
        let two = MetricMeasureSpace::uniform(line(&[0.0, 1.0]));
        assert_eq!(norm_p_of_centers(&two, &[0], Exponent::ONE), 0.5);
    }

    #[test]
    fn local_search_on_delta() {
        let d = delta(6);
        for k in 1..6 {
            let (c, v) = local_search_tswap(&d, k, Exponent::ONE, 1, 0.5).unwrap();
            assert_eq!(c.len(), k);
            assert!((v - (1.0 - k as f64 / 6.0)).abs() < 1e-12);
        }
        assert_eq!(
            local_search_tswap(&d, 6, Exponent::TWO, 1, 0.5).unwrap().1,
            0.0
        );
    }

    #[test]
    fn combinations_are_lexicographic() {
        let mut seen = Vec::new();
        for_each_combination(&[1, 3, 5, 7], 2, |c| {
            seen.push(c.to_vec());
            false
        });
        assert_eq!(
            seen,
            vec![
                vec![1, 3],
                vec![1, 5],
                vec![1, 7],
                vec![3, 5],
                vec![3, 7],
                vec![5, 7]
            ]
        );
        let mut count = 0;
        for_each_combination(&[0, 1, 2], 3, |_| {
            count += 1;
            false
        });
        assert_eq!(count, 1);
    }

    #[test]
    fn radius_routes_on_delta() {
        let d = delta(6);
        for k in 1..=3 {
            for e in [Exponent::ONE, Exponent::TWO] {
                let a = shatter_rad(&d, k, e, e, RadMode::Brute, DEFAULT_MAX_PARTITIONS).unwrap();
                let b = shatter_rad(&d, k, e, e, RadMode::ViaOptP, DEFAULT_MAX_PARTITIONS).unwrap();
                let expected = (1.0 - k as f64 / 6.0).powf(1.0 / e.value());
                assert!((a.cost - expected).abs() < 1e-12);
                assert!((b.cost - expected).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn ultrametric_examples() {
        let u = subdominant_ultrametric(&line(&[0.0, 1.0, 3.0]));
        assert_eq!((u.d(0, 1), u.d(1, 2), u.d(0, 2)), (1.0, 2.0, 2.0));
        let two = line(&[0.0, 2.5]);
        assert_eq!(subdominant_ultrametric(&two), two);
    }

    #[test]
    fn metric_transform_examples() {
        let m = metric_transform_mp(&line(&[0.0, 1.0, 2.0]), 4.0).unwrap();
        assert!((m.d(0, 2) - 2f64.powf(0.25)).abs() < 1e-12);
        let two = line(&[0.0, 2.5]);
        assert_eq!(metric_transform_mp(&two, 3.0).unwrap().d(0, 1), 2.5);
    }

    #[test]
    fn exact_routes_agree() {
        let c = circle(12);
        let mm = MetricMeasureSpace::uniform(c.clone());
        for k in 1..=4 {
            let brute = shatter_bruteforce(&mm, k, Objective::MaxDiam, DEFAULT_MAX_PARTITIONS)
                .unwrap()
                .cost;
            let col = shatter_maxdiam_coloring(&c, k, DEFAULT_COLORING_BUDGET)
                .unwrap()
                .cost;
            let arcs = shatter_cyclic_arcs(&c, k).unwrap().cost;
            assert_eq!(brute, col);
            assert_eq!(brute, arcs);
        }
    }

    #[test]
    fn k_center_exact() {
        let pts: Vec<f64> = (0..=8).map(|i| i as f64 / 8.0).collect();
        let (_, r) = opt_inf_exact(&line(&pts), 1, 1_000_000).unwrap();
        assert_eq!(r, 0.5);
    }
}
