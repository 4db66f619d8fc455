//! Correspondences, distortion, metric couplings and an exact
//! Gromov–Hausdorff oracle for small spaces.

use crate::error::{Error, Result, Status};
use crate::metric::{FiniteMetricSpace, TRIANGLE_TOL};

/// A relation between the points of `X` (size `n`) and `Y` (size `m`) whose
/// projections are both surjective.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Correspondence {
    n: usize,
    m: usize,
    pairs: Vec<(usize, usize)>,
}

impl Correspondence {
    pub fn new(mut pairs: Vec<(usize, usize)>, n: usize, m: usize) -> Result<Self> {
        pairs.sort_unstable();
        pairs.dedup();
        let mut hit_x = vec![false; n];
        let mut hit_y = vec![false; m];
        for &(a, b) in &pairs {
            if a >= n || b >= m {
                return Err(Error::InvalidCorrespondence(format!(
                    "pair ({a},{b}) out of range for {n}x{m}"
                )));
            }
            hit_x[a] = true;
            hit_y[b] = true;
        }
        if let Some(a) = hit_x.iter().position(|&h| !h) {
            return Err(Error::InvalidCorrespondence(format!(
                "point {a} of X is unmatched"
            )));
        }
        if let Some(b) = hit_y.iter().position(|&h| !h) {
            return Err(Error::InvalidCorrespondence(format!(
                "point {b} of Y is unmatched"
            )));
        }
        Ok(Self { n, m, pairs })
    }

    /// `graph(φ) ∪ graph(ψ)ᵀ` for maps `φ: X → Y` and `ψ: Y → X`.
    pub fn from_maps(phi: &[usize], psi: &[usize]) -> Result<Self> {
        let pairs = phi
            .iter()
            .enumerate()
            .map(|(a, &b)| (a, b))
            .chain(psi.iter().enumerate().map(|(b, &a)| (a, b)))
            .collect();
        Self::new(pairs, phi.len(), psi.len())
    }

    /// The graph of a surjective map `φ: X → Y` with `m` target points.
    pub fn graph(phi: &[usize], m: usize) -> Result<Self> {
        Self::new(
            phi.iter().enumerate().map(|(a, &b)| (a, b)).collect(),
            phi.len(),
            m,
        )
    }

    pub fn identity(n: usize) -> Self {
        Self {
            n,
            m: n,
            pairs: (0..n).map(|i| (i, i)).collect(),
        }
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn sizes(&self) -> (usize, usize) {
        (self.n, self.m)
    }

    /// The same relation read from `Y` to `X`.
    pub fn transpose(&self) -> Self {
        let mut pairs: Vec<_> = self.pairs.iter().map(|&(a, b)| (b, a)).collect();
        pairs.sort_unstable();
        Self {
            n: self.m,
            m: self.n,
            pairs,
        }
    }

    fn check_sizes(&self, x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> Result<()> {
        if self.n != x.len() || self.m != y.len() {
            return Err(Error::InvalidCorrespondence(format!(
                "correspondence is {}x{}, spaces are {}x{}",
                self.n,
                self.m,
                x.len(),
                y.len()
            )));
        }
        Ok(())
    }
}

fn pairs_distortion(pairs: &[(usize, usize)], x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> f64 {
    let mut worst = 0.0f64;
    for (s, &(a, b)) in pairs.iter().enumerate() {
        for &(a2, b2) in &pairs[s + 1..] {
            worst = worst.max((x.d(a, a2) - y.d(b, b2)).abs());
        }
    }
    worst
}

/// `sup |d_X(x,x') − d_Y(y,y')|` over pairs of the correspondence.
pub fn distortion(r: &Correspondence, x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> Result<f64> {
    r.check_sizes(x, y)?;
    Ok(pairs_distortion(&r.pairs, x, y))
}

/// A (pseudo)metric on the disjoint union of `X` and `Y` extending both
/// metrics, stored through its `n × m` cross block.
///
/// Zero cross distances are allowed: gluing a point of `X` onto a point of
/// `Y` is how exact sketches and zero-distortion correspondences are encoded.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricCoupling {
    n: usize,
    m: usize,
    cross: Vec<f64>,
}

impl MetricCoupling {
    /// Validates that `[[d_X, cross], [crossᵀ, d_Y]]` is a pseudometric.
    pub fn new(cross: Vec<Vec<f64>>, x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> Result<Self> {
        let (n, m) = (x.len(), y.len());
        if cross.len() != n {
            return Err(Error::InvalidCoupling(format!(
                "{} rows, expected {n}",
                cross.len()
            )));
        }
        if let Some(r) = cross.iter().position(|r| r.len() != m) {
            return Err(Error::InvalidCoupling(format!(
                "row {r} does not have {m} entries"
            )));
        }
        let flat: Vec<f64> = cross.into_iter().flatten().collect();
        if let Some(v) = flat.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::InvalidCoupling(format!(
                "cross distance {v} is not a finite nonnegative number"
            )));
        }
        let c = Self { n, m, cross: flat };
        let g = c.glued(x, y);
        let size = n + m;
        let max = g.iter().copied().fold(0.0, f64::max);
        let tol = TRIANGLE_TOL * max;
        for i in 0..size {
            for j in (i + 1)..size {
                for k in 0..size {
                    if g[i * size + j] > g[i * size + k] + g[k * size + j] + tol {
                        return Err(Error::InvalidCoupling(format!(
                            "triangle inequality fails for glued points ({i},{j}) via {k}"
                        )));
                    }
                }
            }
        }
        Ok(c)
    }

    pub(crate) fn from_trusted(n: usize, m: usize, cross: Vec<f64>) -> Self {
        debug_assert_eq!(cross.len(), n * m);
        Self { n, m, cross }
    }

    /// The coupling obtained by putting `X` and `Y` at constant distance `c`
    /// from each other, valid once `c ≥ max(diam X, diam Y) / 2`.
    pub fn constant(n: usize, m: usize, c: f64) -> Self {
        Self {
            n,
            m,
            cross: vec![c; n * m],
        }
    }

    #[inline]
    pub fn d(&self, x: usize, y: usize) -> f64 {
        self.cross[x * self.m + y]
    }

    pub fn sizes(&self) -> (usize, usize) {
        (self.n, self.m)
    }

    pub fn cross_rows(&self) -> Vec<Vec<f64>> {
        self.cross
            .chunks(self.m.max(1))
            .map(<[f64]>::to_vec)
            .collect()
    }

    /// Full `(n+m) × (n+m)` glued distance matrix, `X` first.
    pub fn glued(&self, x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> Vec<f64> {
        let (n, m) = (self.n, self.m);
        let size = n + m;
        let mut g = vec![0.0; size * size];
        for i in 0..size {
            for j in 0..size {
                g[i * size + j] = match (i < n, j < n) {
                    (true, true) => x.d(i, j),
                    (true, false) => self.d(i, j - n),
                    (false, true) => self.d(j, i - n),
                    (false, false) => y.d(i - n, j - n),
                };
            }
        }
        g
    }

    /// Hausdorff distance between the copies of `X` and `Y` in the glued space.
    pub fn hausdorff(&self) -> f64 {
        let xy = (0..self.n)
            .map(|a| {
                (0..self.m)
                    .map(|b| self.d(a, b))
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max);
        let yx = (0..self.m)
            .map(|b| {
                (0..self.n)
                    .map(|a| self.d(a, b))
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max);
        xy.max(yx)
    }
}

/// Hausdorff distance between `X` and `Y` inside the coupling.
pub fn hausdorff_in_coupling(d: &MetricCoupling) -> f64 {
    d.hausdorff()
}

/// The coupling `d_R(x,y) = min_{(x',y')∈R} d_X(x,x') + d_Y(y',y) + dis(R)/2`.
pub fn canonical_coupling_dr(
    r: &Correspondence,
    x: &FiniteMetricSpace,
    y: &FiniteMetricSpace,
) -> Result<MetricCoupling> {
    let half = distortion(r, x, y)? / 2.0;
    let (n, m) = (x.len(), y.len());
    let mut cross = vec![f64::INFINITY; n * m];
    for &(a2, b2) in r.pairs() {
        for a in 0..n {
            let base = x.d(a, a2) + half;
            for b in 0..m {
                let v = base + y.d(b2, b);
                let c = &mut cross[a * m + b];
                if v < *c {
                    *c = v;
                }
            }
        }
    }
    Ok(MetricCoupling::from_trusted(n, m, cross))
}

/// `½ |diam X − diam Y|`, a lower bound on `d_GH(X, Y)`.
pub fn gh_lower_bound(x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> f64 {
    0.5 * (x.diam() - y.diam()).abs()
}

/// Outcome of a Gromov–Hausdorff computation.
#[derive(Clone, Debug)]
pub struct GhResult {
    /// Certified lower bound on `d_GH`.
    pub lower: f64,
    /// `dis(witness) / 2`, an upper bound on `d_GH`.
    pub upper: f64,
    pub witness: Correspondence,
    pub status: Status,
}

impl GhResult {
    /// The distance when the search finished (`lower == upper`), else the upper bound.
    pub fn value(&self) -> f64 {
        self.upper
    }

    pub fn is_exact(&self) -> bool {
        self.status == Status::Exact
    }
}

/// Default node budget of [`gh_oracle`].
pub const DEFAULT_GH_BUDGET: u64 = 50_000_000;

/// Exact `d_GH(X, Y)` by threshold search over the finitely many candidate
/// distortion values.
///
/// For each threshold `t` a constraint search looks for maps `φ: X → Y`,
/// `ψ: Y → X` with `dis(graph φ ∪ graph ψᵀ) ≤ t`; every correspondence contains
/// such a pair, so the smallest feasible `t` is `2·d_GH`. `budget` caps the
/// total number of search nodes; when exhausted the best certified interval is
/// returned with [`Status::BudgetExceeded`]. Both spaces must have at most 64
/// points.
pub fn gh_oracle(x: &FiniteMetricSpace, y: &FiniteMetricSpace, budget: u64) -> Result<GhResult> {
    let (n, m) = (x.len(), y.len());
    if n > 64 || m > 64 {
        return Err(Error::InvalidParameter(format!(
            "exact GH search supports at most 64 points per space, got {n} and {m}"
        )));
    }
    let mut cands = Vec::with_capacity(n * n * m * m / 2 + 1);
    for a in 0..n {
        for a2 in a..n {
            for b in 0..m {
                for b2 in 0..m {
                    cands.push((x.d(a, a2) - y.d(b, b2)).abs());
                }
            }
        }
    }
    cands.sort_by(f64::total_cmp);
    cands.dedup();

    let lb = 2.0 * gh_lower_bound(x, y);
    let mut lo = cands.partition_point(|&c| c < lb);
    let mut hi = cands.len() - 1;
    let mut search = MapPairSearch::new(x, y, budget);
    let mut best = search
        .feasible(cands[hi])
        .ok_or_else(|| Error::BudgetExceeded("no witness found within budget".into()))?
        .expect("the largest candidate threshold admits every correspondence");
    let mut lower = lb;
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        match search.feasible(cands[mid]) {
            Some(Some(w)) => {
                hi = mid;
                best = w;
            }
            Some(None) => {
                lo = mid + 1;
                lower = cands[lo];
            }
            None => {
                let witness = Correspondence::new(best, n, m)?;
                let upper = pairs_distortion(witness.pairs(), x, y) / 2.0;
                return Ok(GhResult {
                    lower: lower / 2.0,
                    upper,
                    witness,
                    status: Status::BudgetExceeded,
                });
            }
        }
    }
    let witness = Correspondence::new(best, n, m)?;
    let upper = pairs_distortion(witness.pairs(), x, y) / 2.0;
    Ok(GhResult {
        lower: upper,
        upper,
        witness,
        status: Status::Exact,
    })
}

/// Constraint search over map pairs with bitset domains and forward checking.
struct MapPairSearch<'a> {
    x: &'a FiniteMetricSpace,
    y: &'a FiniteMetricSpace,
    n: usize,
    m: usize,
    nodes: u64,
    budget: u64,
}

struct Threshold {
    /// For pair `p = a*m + b` and point `i` of `X`: allowed `b'` for `(i, b')`.
    row_mask: Vec<u64>,
    /// For pair `p` and point `j` of `Y`: allowed `a'` for `(a', j)`.
    col_mask: Vec<u64>,
}

impl<'a> MapPairSearch<'a> {
    fn new(x: &'a FiniteMetricSpace, y: &'a FiniteMetricSpace, budget: u64) -> Self {
        Self {
            x,
            y,
            n: x.len(),
            m: y.len(),
            nodes: 0,
            budget,
        }
    }

    fn masks(&self, t: f64) -> Threshold {
        let (n, m) = (self.n, self.m);
        let mut row_mask = vec![0u64; n * m * n];
        let mut col_mask = vec![0u64; n * m * m];
        for a in 0..n {
            for b in 0..m {
                let p = a * m + b;
                for a2 in 0..n {
                    let dx = self.x.d(a, a2);
                    for b2 in 0..m {
                        if (dx - self.y.d(b, b2)).abs() <= t {
                            row_mask[p * n + a2] |= 1 << b2;
                            col_mask[p * m + b2] |= 1 << a2;
                        }
                    }
                }
            }
        }
        Threshold { row_mask, col_mask }
    }

    /// `Some(Some(pairs))` if feasible, `Some(None)` if infeasible, `None` if
    /// the budget ran out.
    fn feasible(&mut self, t: f64) -> Option<Option<Vec<(usize, usize)>>> {
        let th = self.masks(t);
        let (n, m) = (self.n, self.m);
        let full_y = if m == 64 { u64::MAX } else { (1u64 << m) - 1 };
        let full_x = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        // Variables 0..n are points of X (domain over Y), n..n+m points of Y.
        let mut domains: Vec<u64> = (0..n)
            .map(|_| full_y)
            .chain((0..m).map(|_| full_x))
            .collect();
        // A pair must be compatible with itself, i.e. be a usable value at all.
        for a in 0..n {
            for b in 0..m {
                let p = a * m + b;
                if th.row_mask[p * n + a] & (1 << b) == 0 {
                    domains[a] &= !(1 << b);
                    domains[n + b] &= !(1 << a);
                }
            }
        }
        let mut chosen = vec![usize::MAX; n + m];
        match self.dfs(&th, &mut domains, &mut chosen) {
            Some(true) => {
                let pairs = (0..n)
                    .map(|a| (a, chosen[a]))
                    .chain((0..m).map(|b| (chosen[n + b], b)))
                    .collect();
                Some(Some(pairs))
            }
            Some(false) => Some(None),
            None => None,
        }
    }

    fn dfs(&mut self, th: &Threshold, domains: &mut [u64], chosen: &mut [usize]) -> Option<bool> {
        let (n, m) = (self.n, self.m);
        let mut var = usize::MAX;
        let mut best = u32::MAX;
        for v in 0..n + m {
            if chosen[v] == usize::MAX {
                let c = domains[v].count_ones();
                if c < best {
                    best = c;
                    var = v;
                }
            }
        }
        if var == usize::MAX {
            return Some(true);
        }
        if best == 0 {
            return Some(false);
        }
        let mut dom = domains[var];
        while dom != 0 {
            let val = dom.trailing_zeros() as usize;
            dom &= dom - 1;
            self.nodes += 1;
            if self.nodes > self.budget {
                return None;
            }
            let p = if var < n {
                var * m + val
            } else {
                val * m + (var - n)
            };
            let saved: Vec<u64> = domains.to_vec();
            let mut ok = true;
            for v in 0..n + m {
                if chosen[v] != usize::MAX || v == var {
                    continue;
                }
                let mask = if v < n {
                    th.row_mask[p * n + v]
                } else {
                    th.col_mask[p * m + (v - n)]
                };
                domains[v] &= mask;
                if domains[v] == 0 {
                    ok = false;
                    break;
                }
            }
            if ok {
                chosen[var] = val;
                match self.dfs(th, domains, chosen)? {
                    true => return Some(true),
                    false => chosen[var] = usize::MAX,
                }
            }
            domains.copy_from_slice(&saved);
        }
        Some(false)
    }
}

/// `d_GH` by plain enumeration of all map pairs `(φ, ψ)`.
///
/// Cross-check oracle: `|Y|^|X| · |X|^|Y|` candidates. Ties keep the
/// lexicographically first pair. Fails with `BudgetExceeded` when the number
/// of candidates exceeds `max_maps`.
pub fn gh_by_map_pairs(
    x: &FiniteMetricSpace,
    y: &FiniteMetricSpace,
    max_maps: u64,
) -> Result<(f64, Correspondence)> {
    let (n, m) = (x.len(), y.len());
    let total = (m as f64).powi(n as i32) * (n as f64).powi(m as i32);
    if total > max_maps as f64 {
        return Err(Error::BudgetExceeded(format!(
            "{total} map pairs exceed the limit {max_maps}"
        )));
    }
    let mut phi = vec![0usize; n];
    let mut best = (f64::INFINITY, Vec::new());
    loop {
        let phi_dis = pairs_distortion(&graph_pairs(&phi), x, y);
        if phi_dis < best.0 {
            let mut psi = vec![0usize; m];
            loop {
                let pairs: Vec<(usize, usize)> = graph_pairs(&phi)
                    .into_iter()
                    .chain(psi.iter().enumerate().map(|(b, &a)| (a, b)))
                    .collect();
                let dis = pairs_distortion(&pairs, x, y);
                if dis < best.0 {
                    best = (dis, pairs);
                }
                if !advance(&mut psi, n) {
                    break;
                }
            }
        }
        if !advance(&mut phi, m) {
            break;
        }
    }
    Ok((best.0 / 2.0, Correspondence::new(best.1, n, m)?))
}

/// `d_GH` by enumerating every subset of `X × Y` (requires `|X|·|Y| ≤ 20`).
pub fn gh_by_subsets(
    x: &FiniteMetricSpace,
    y: &FiniteMetricSpace,
) -> Result<(f64, Correspondence)> {
    let (n, m) = (x.len(), y.len());
    if n * m > 20 {
        return Err(Error::BudgetExceeded(format!(
            "{} pairs exceed the subset enumeration limit 20",
            n * m
        )));
    }
    let all: Vec<(usize, usize)> = (0..n).flat_map(|a| (0..m).map(move |b| (a, b))).collect();
    let mut best = (f64::INFINITY, Vec::new());
    for mask in 1u32..(1 << all.len()) {
        let pairs: Vec<(usize, usize)> = all
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, &p)| p)
            .collect();
        if Correspondence::new(pairs.clone(), n, m).is_err() {
            continue;
        }
        let dis = pairs_distortion(&pairs, x, y);
        if dis < best.0 {
            best = (dis, pairs);
        }
    }
    Ok((best.0 / 2.0, Correspondence::new(best.1, n, m)?))
}

fn graph_pairs(phi: &[usize]) -> Vec<(usize, usize)> {
    phi.iter().enumerate().map(|(a, &b)| (a, b)).collect()
}

/// Odometer increment of a base-`base` digit vector, most significant digit first.
pub(crate) fn advance(digits: &mut [usize], base: usize) -> bool {
    for d in digits.iter_mut().rev() {
        *d += 1;
        if *d < base {
            return true;
        }
        *d = 0;
    }
    false
}
