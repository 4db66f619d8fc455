//! Measure couplings, exact optimal transport on a finite space, distortion of
//! couplings and Sturm-type costs.

use minilp::{ComparisonOp, OptimizationDirection, Problem};
use nalgebra::{DMatrix, DVector};

use crate::correspondence::MetricCoupling;
use crate::error::{Error, Result};
use crate::metric::{Exponent, FiniteMetricSpace, MetricMeasureSpace, Partition, MASS_TOL};

/// Plan entries at or below this value are outside the support of a plan.
pub const SUPPORT_TOL: f64 = 1e-12;

/// A joint probability on `X × Y` with prescribed marginals.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasureCoupling {
    n: usize,
    m: usize,
    plan: Vec<f64>,
}

impl MeasureCoupling {
    /// Validates nonnegativity and both marginals against `mu` and `nu`.
    pub fn new(rows: Vec<Vec<f64>>, mu: &[f64], nu: &[f64]) -> Result<Self> {
        let (n, m) = (mu.len(), nu.len());
        if rows.len() != n || rows.iter().any(|r| r.len() != m) {
            return Err(Error::InvalidCoupling(format!("plan must be {n}x{m}")));
        }
        let plan: Vec<f64> = rows.into_iter().flatten().collect();
        let c = Self { n, m, plan };
        c.check(mu, nu)?;
        Ok(c)
    }

    pub(crate) fn from_trusted(n: usize, m: usize, plan: Vec<f64>) -> Self {
        Self { n, m, plan }
    }

    fn check(&self, mu: &[f64], nu: &[f64]) -> Result<()> {
        if let Some(v) = self.plan.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::InvalidCoupling(format!(
                "plan entry {v} is negative or not finite"
            )));
        }
        for (i, (&r, &target)) in self.row_sums().iter().zip(mu).enumerate() {
            if (r - target).abs() > MASS_TOL {
                return Err(Error::InvalidCoupling(format!(
                    "row {i} sums to {r}, expected {target}"
                )));
            }
        }
        for (j, (&c, &target)) in self.col_sums().iter().zip(nu).enumerate() {
            if (c - target).abs() > MASS_TOL {
                return Err(Error::InvalidCoupling(format!(
                    "column {j} sums to {c}, expected {target}"
                )));
            }
        }
        Ok(())
    }

    /// The independent coupling `μ ⊗ ν`.
    pub fn product(mu: &[f64], nu: &[f64]) -> Self {
        let plan = mu
            .iter()
            .flat_map(|&a| nu.iter().map(move |&b| a * b))
            .collect();
        Self {
            n: mu.len(),
            m: nu.len(),
            plan,
        }
    }

    /// The coupling `γ(A × {i}) = μ_X(A ∩ B_i)` between `X` and the block
    /// masses of a partition.
    pub fn from_partition(x: &MetricMeasureSpace, p: &Partition) -> Self {
        let (n, k) = (x.len(), p.k());
        let mut plan = vec![0.0; n * k];
        for (i, block) in p.blocks().iter().enumerate() {
            for &a in block {
                plan[a * k + i] = x.mass()[a];
            }
        }
        Self { n, m: k, plan }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.plan[i * self.m + j]
    }

    pub fn sizes(&self) -> (usize, usize) {
        (self.n, self.m)
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.plan
            .chunks(self.m.max(1))
            .map(<[f64]>::to_vec)
            .collect()
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.n)
            .map(|i| (0..self.m).map(|j| self.get(i, j)).sum())
            .collect()
    }

    pub fn col_sums(&self) -> Vec<f64> {
        (0..self.m)
            .map(|j| (0..self.n).map(|i| self.get(i, j)).sum())
            .collect()
    }

    /// Entries above [`SUPPORT_TOL`] as `(i, j, mass)`.
    pub fn support(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::new();
        for i in 0..self.n {
            for j in 0..self.m {
                let v = self.get(i, j);
                if v > SUPPORT_TOL {
                    out.push((i, j, v));
                }
            }
        }
        out
    }
}

fn check_measure(name: &str, v: &[f64], n: usize) -> Result<f64> {
    if v.len() != n {
        return Err(Error::InfeasibleMarginals(format!(
            "{name} has {} entries for {n} points",
            v.len()
        )));
    }
    if let Some(x) = v.iter().find(|x| !(x.is_finite() && **x >= 0.0)) {
        return Err(Error::InfeasibleMarginals(format!("{name} has entry {x}")));
    }
    Ok(v.iter().sum())
}

fn check_marginals(x: &FiniteMetricSpace, a: &[f64], b: &[f64]) -> Result<()> {
    let sa = check_measure("source measure", a, x.len())?;
    let sb = check_measure("target measure", b, x.len())?;
    if (sa - 1.0).abs() > MASS_TOL || (sb - 1.0).abs() > MASS_TOL {
        return Err(Error::InfeasibleMarginals(format!(
            "measures sum to {sa} and {sb}, expected 1"
        )));
    }
    Ok(())
}

/// Exact `W_p` between two probability vectors on the points of `X`
/// (`p` finite), with an optimal plan.
///
/// Solves the transport program as a minimum-cost flow by successive shortest
/// paths with Dijkstra potentials on the bipartite support graph.
pub fn wasserstein_p(
    x: &FiniteMetricSpace,
    a: &[f64],
    b: &[f64],
    p: f64,
) -> Result<(f64, MeasureCoupling)> {
    check_marginals(x, a, b)?;
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "wasserstein_p needs finite p >= 1, got {p}"
        )));
    }
    let src: Vec<usize> = (0..a.len()).filter(|&i| a[i] > 0.0).collect();
    let dst: Vec<usize> = (0..b.len()).filter(|&j| b[j] > 0.0).collect();
    let cost: Vec<Vec<f64>> = src
        .iter()
        .map(|&i| dst.iter().map(|&j| x.d(i, j).powf(p)).collect())
        .collect();
    let supply: Vec<f64> = src.iter().map(|&i| a[i]).collect();
    let demand: Vec<f64> = dst.iter().map(|&j| b[j]).collect();
    let flow = min_cost_transport(&cost, &supply, &demand);
    let n = x.len();
    let mut plan = vec![0.0; n * n];
    let mut total = 0.0;
    for (s, &i) in src.iter().enumerate() {
        for (t, &j) in dst.iter().enumerate() {
            plan[i * n + j] = flow[s][t];
            total += flow[s][t] * cost[s][t];
        }
    }
    Ok((
        total.max(0.0).powf(1.0 / p),
        MeasureCoupling::from_trusted(n, n, plan),
    ))
}

/// `W_p` for any exponent, dispatching to the bottleneck solver for `p = ∞`.
pub fn wasserstein(
    x: &FiniteMetricSpace,
    a: &[f64],
    b: &[f64],
    p: Exponent,
) -> Result<(f64, MeasureCoupling)> {
    match p {
        Exponent::Finite(p) => wasserstein_p(x, a, b, p),
        Exponent::Infinite => wasserstein_inf(x, a, b),
    }
}

const FLOW_EPS: f64 = 1e-15;

/// Successive shortest paths for a balanced transportation problem.
/// Returns the flow matrix `supply.len() × demand.len()`.
fn min_cost_transport(cost: &[Vec<f64>], supply: &[f64], demand: &[f64]) -> Vec<Vec<f64>> {
    let (ns, nt) = (supply.len(), demand.len());
    let mut flow = vec![vec![0.0; nt]; ns];
    let mut left_s = supply.to_vec();
    let mut left_t = demand.to_vec();
    // Node layout: sources 0..ns, sinks ns..ns+nt. The super source and sink
    // are implicit: every source with remaining supply starts at distance 0.
    let v = ns + nt;
    let mut pot = vec![0.0f64; v];
    let total: f64 = supply.iter().sum();
    let mut sent = 0.0;
    while total - sent > FLOW_EPS * (1.0 + total) * 10.0 {
        let mut dist = vec![f64::INFINITY; v];
        let mut prev = vec![usize::MAX; v];
        let mut done = vec![false; v];
        for s in 0..ns {
            if left_s[s] > FLOW_EPS {
                dist[s] = 0.0;
            }
        }
        loop {
            let mut u = usize::MAX;
            for w in 0..v {
                if !done[w] && dist[w].is_finite() && (u == usize::MAX || dist[w] < dist[u]) {
                    u = w;
                }
            }
            if u == usize::MAX {
                break;
            }
            done[u] = true;
            if u < ns {
                for t in 0..nt {
                    let w = ns + t;
                    let rc = (cost[u][t] + pot[u] - pot[w]).max(0.0);
                    if dist[u] + rc < dist[w] {
                        dist[w] = dist[u] + rc;
                        prev[w] = u;
                    }
                }
            } else {
                let t = u - ns;
                for s in 0..ns {
                    if flow[s][t] > FLOW_EPS {
                        let rc = (-cost[s][t] + pot[u] - pot[s]).max(0.0);
                        if dist[u] + rc < dist[s] {
                            dist[s] = dist[u] + rc;
                            prev[s] = u;
                        }
                    }
                }
            }
        }
        // Pick the open sink with the smallest reduced distance.
        let mut sink = usize::MAX;
        for t in 0..nt {
            let w = ns + t;
            if left_t[t] > FLOW_EPS
                && dist[w].is_finite()
                && (sink == usize::MAX || dist[w] < dist[sink])
            {
                sink = w;
            }
        }
        if sink == usize::MAX {
            break;
        }
        let reach = dist[sink];
        for w in 0..v {
            pot[w] += dist[w].min(reach);
        }
        // Trace the path back to its source and find the bottleneck.
        let mut path = vec![sink];
        let mut w = sink;
        while prev[w] != usize::MAX {
            w = prev[w];
            path.push(w);
        }
        path.reverse();
        let s0 = path[0];
        let mut delta = left_s[s0].min(left_t[sink - ns]);
        for e in path.windows(2) {
            if e[0] >= ns {
                delta = delta.min(flow[e[1]][e[0] - ns]);
            }
        }
        for e in path.windows(2) {
            if e[0] < ns {
                flow[e[0]][e[1] - ns] += delta;
            } else {
                flow[e[1]][e[0] - ns] -= delta;
            }
        }
        left_s[s0] -= delta;
        left_t[sink - ns] -= delta;
        sent += delta;
    }
    flow
}

/// Exact `W_∞`: the smallest threshold `t` among the cross distances for
/// which a plan supported on `{d ≤ t}` exists, with such a plan.
pub fn wasserstein_inf(
    x: &FiniteMetricSpace,
    a: &[f64],
    b: &[f64],
) -> Result<(f64, MeasureCoupling)> {
    check_marginals(x, a, b)?;
    let src: Vec<usize> = (0..a.len()).filter(|&i| a[i] > 0.0).collect();
    let dst: Vec<usize> = (0..b.len()).filter(|&j| b[j] > 0.0).collect();
    let mut cands: Vec<f64> = src
        .iter()
        .flat_map(|&i| dst.iter().map(move |&j| x.d(i, j)))
        .collect();
    cands.sort_by(f64::total_cmp);
    cands.dedup();
    let supply: Vec<f64> = src.iter().map(|&i| a[i]).collect();
    let demand: Vec<f64> = dst.iter().map(|&j| b[j]).collect();
    let total: f64 = supply.iter().sum::<f64>().min(demand.iter().sum());
    let solve = |t: f64| {
        let allowed: Vec<Vec<bool>> = src
            .iter()
            .map(|&i| dst.iter().map(|&j| x.d(i, j) <= t).collect())
            .collect();
        bipartite_max_flow(&allowed, &supply, &demand)
    };
    let feasible = |f: &(f64, Vec<Vec<f64>>)| f.0 >= total - 1e-12;
    let (mut lo, mut hi) = (0, cands.len() - 1);
    let mut best = solve(cands[hi]);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        let f = solve(cands[mid]);
        if feasible(&f) {
            hi = mid;
            best = f;
        } else {
            lo = mid + 1;
        }
    }
    let n = x.len();
    let mut plan = vec![0.0; n * n];
    for (s, &i) in src.iter().enumerate() {
        for (t, &j) in dst.iter().enumerate() {
            plan[i * n + j] = best.1[s][t];
        }
    }
    Ok((cands[lo], MeasureCoupling::from_trusted(n, n, plan)))
}

/// Max flow from sources to sinks through the allowed arcs (uncapacitated),
/// by shortest augmenting paths. Returns the flow value and the arc flows.
fn bipartite_max_flow(
    allowed: &[Vec<bool>],
    supply: &[f64],
    demand: &[f64],
) -> (f64, Vec<Vec<f64>>) {
    let (ns, nt) = (supply.len(), demand.len());
    let mut flow = vec![vec![0.0; nt]; ns];
    let mut left_s = supply.to_vec();
    let mut left_t = demand.to_vec();
    let mut value = 0.0;
    loop {
        // BFS over sources (0..ns) and sinks (ns..ns+nt) in the residual graph.
        let mut prev = vec![usize::MAX; ns + nt];
        let mut seen = vec![false; ns + nt];
        let mut queue = std::collections::VecDeque::new();
        for s in 0..ns {
            if left_s[s] > FLOW_EPS {
                seen[s] = true;
                queue.push_back(s);
            }
        }
        let mut sink = usize::MAX;
        while let Some(u) = queue.pop_front() {
            if u < ns {
                for t in 0..nt {
                    if allowed[u][t] && !seen[ns + t] {
                        seen[ns + t] = true;
                        prev[ns + t] = u;
                        if left_t[t] > FLOW_EPS {
                            sink = ns + t;
                            break;
                        }
                        queue.push_back(ns + t);
                    }
                }
                if sink != usize::MAX {
                    break;
                }
            } else {
                let t = u - ns;
                for s in 0..ns {
                    if flow[s][t] > FLOW_EPS && !seen[s] {
                        seen[s] = true;
                        prev[s] = u;
                        queue.push_back(s);
                    }
                }
            }
        }
        if sink == usize::MAX {
            break;
        }
        let mut path = vec![sink];
        let mut w = sink;
        while prev[w] != usize::MAX {
            w = prev[w];
            path.push(w);
        }
        path.reverse();
        let mut delta = left_s[path[0]].min(left_t[sink - ns]);
        for e in path.windows(2) {
            if e[0] >= ns {
                delta = delta.min(flow[e[1]][e[0] - ns]);
            }
        }
        for e in path.windows(2) {
            if e[0] < ns {
                flow[e[0]][e[1] - ns] += delta;
            } else {
                flow[e[1]][e[0] - ns] -= delta;
            }
        }
        left_s[path[0]] -= delta;
        left_t[sink - ns] -= delta;
        value += delta;
    }
    (value, flow)
}

/// `p`-distortion of a measure coupling between two mm-spaces.
pub fn dis_p(
    plan: &MeasureCoupling,
    x: &MetricMeasureSpace,
    y: &MetricMeasureSpace,
    p: Exponent,
) -> f64 {
    let supp = plan.support();
    match p {
        Exponent::Infinite => {
            let mut worst = 0.0f64;
            for &(a, b, _) in &supp {
                for &(a2, b2, _) in &supp {
                    worst = worst.max((x.d(a, a2) - y.d(b, b2)).abs());
                }
            }
            worst
        }
        Exponent::Finite(p) => {
            let mut s = 0.0;
            for &(a, b, w) in &supp {
                let mut inner = 0.0;
                for &(a2, b2, w2) in &supp {
                    inner += (x.d(a, a2) - y.d(b, b2)).abs().powf(p) * w2;
                }
                s += inner * w;
            }
            s.powf(1.0 / p)
        }
    }
}

/// Which coupling [`gw_upper_bound`] evaluates.
#[derive(Clone, Copy, Debug)]
pub enum CouplingFamily<'a> {
    /// The product of the two measures.
    Product,
    /// `γ(A × {i}) = μ_X(A ∩ B_i)`; block `i` is matched to point `i` of `Y`.
    Partition(&'a Partition),
    Custom(&'a MeasureCoupling),
}

/// `½ · dis_p(γ)` for a coupling `γ` of the chosen family: a certified upper
/// bound on the Gromov–Wasserstein distance.
pub fn gw_upper_bound(
    x: &MetricMeasureSpace,
    y: &MetricMeasureSpace,
    p: Exponent,
    family: CouplingFamily<'_>,
) -> Result<f64> {
    let plan = match family {
        CouplingFamily::Product => MeasureCoupling::product(x.mass(), y.mass()),
        CouplingFamily::Partition(part) => {
            if part.n() != x.len() || part.k() != y.len() {
                return Err(Error::InvalidCoupling(format!(
                    "partition with {} blocks of {} points does not match {}x{}",
                    part.k(),
                    part.n(),
                    x.len(),
                    y.len()
                )));
            }
            let c = MeasureCoupling::from_partition(x, part);
            c.check(x.mass(), y.mass())?;
            c
        }
        CouplingFamily::Custom(c) => {
            c.check(x.mass(), y.mass())?;
            c.clone()
        }
    };
    Ok(0.5 * dis_p(&plan, x, y, p))
}

/// A metric coupling together with a measure coupling of the same spaces.
#[derive(Clone, Debug)]
pub struct SturmPair {
    pub d: MetricCoupling,
    pub plan: MeasureCoupling,
}

impl SturmPair {
    pub fn new(d: MetricCoupling, plan: MeasureCoupling) -> Result<Self> {
        if d.sizes() != plan.sizes() {
            return Err(Error::InvalidCoupling(format!(
                "metric coupling is {:?} but plan is {:?}",
                d.sizes(),
                plan.sizes()
            )));
        }
        Ok(Self { d, plan })
    }
}

/// `(Σ plan(x,y)·d(x,y)^p)^{1/p}`, or the largest `d` on the plan's support.
pub fn sturm_cost(sp: &SturmPair, p: Exponent) -> f64 {
    let supp = sp.plan.support();
    match p {
        Exponent::Infinite => supp
            .iter()
            .map(|&(a, b, _)| sp.d.d(a, b))
            .fold(0.0, f64::max),
        Exponent::Finite(p) => supp
            .iter()
            .map(|&(a, b, w)| w * sp.d.d(a, b).powf(p))
            .sum::<f64>()
            .powf(1.0 / p),
    }
}

/// KKT residual above which [`sturm_one_point`] reports `SolverTolerance`.
pub const KKT_LIMIT: f64 = 1e-7;

/// Minimal Sturm cost of gluing one extra point `*` to `X`.
///
/// Minimizes `(Σ μ(x) e_x^p)^{1/p}` over extension vectors `e_x = d(x,*)`
/// subject to `|e_x − e_x'| ≤ d(x,x') ≤ e_x + e_x'`. `p = 1` and `p = ∞` are
/// linear programs; other finite `p` use a log-barrier Newton method.
/// Returns the optimal value and extension vector.
pub fn sturm_one_point(x: &MetricMeasureSpace, p: Exponent) -> Result<(f64, Vec<f64>)> {
    if x.len() == 1 {
        return Ok((0.0, vec![0.0]));
    }
    match p {
        Exponent::Finite(q) if q == 1.0 => sturm_one_point_lp(x, false),
        Exponent::Infinite => sturm_one_point_lp(x, true),
        Exponent::Finite(q) => sturm_one_point_barrier(x, q),
    }
}

fn extension_constraints(x: &MetricMeasureSpace) -> Vec<(usize, usize, f64, f64, f64)> {
    // (i, j, coefficient of e_i, coefficient of e_j, rhs) for  c_i e_i + c_j e_j <= rhs.
    let n = x.len();
    let mut cons = Vec::with_capacity(3 * n * (n - 1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            let d = x.d(i, j);
            cons.push((i, j, -1.0, -1.0, -d));
            cons.push((i, j, 1.0, -1.0, d));
            cons.push((i, j, -1.0, 1.0, d));
        }
    }
    cons
}

fn sturm_one_point_lp(x: &MetricMeasureSpace, minmax: bool) -> Result<(f64, Vec<f64>)> {
    let n = x.len();
    let mut lp = Problem::new(OptimizationDirection::Minimize);
    let obj = |i: usize| if minmax { 0.0 } else { x.mass()[i] };
    let e: Vec<_> = (0..n)
        .map(|i| lp.add_var(obj(i), (0.0, f64::INFINITY)))
        .collect();
    for (i, j, ci, cj, rhs) in extension_constraints(x) {
        lp.add_constraint([(e[i], ci), (e[j], cj)], ComparisonOp::Le, rhs);
    }
    if minmax {
        let s = lp.add_var(1.0, (0.0, f64::INFINITY));
        for &v in &e {
            lp.add_constraint([(v, 1.0), (s, -1.0)], ComparisonOp::Le, 0.0);
        }
    }
    let sol = lp
        .solve()
        .map_err(|err| Error::SolverFailure(err.to_string()))?;
    let ext: Vec<f64> = e.iter().map(|&v| sol[v].max(0.0)).collect();
    let value = if minmax {
        ext.iter().copied().fold(0.0, f64::max)
    } else {
        ext.iter().zip(x.mass()).map(|(v, m)| v * m).sum()
    };
    Ok((value, ext))
}

/// Log-barrier interior point method for `min Σ μ_i e_i^p` over the extension
/// polytope. Exposed for cross-checking the linear programs.
pub fn sturm_one_point_barrier(x: &MetricMeasureSpace, p: f64) -> Result<(f64, Vec<f64>)> {
    let n = x.len();
    if n == 1 {
        return Ok((0.0, vec![0.0]));
    }
    let cons = extension_constraints(x);
    let mu = x.mass();
    let slack = |e: &[f64], c: &(usize, usize, f64, f64, f64)| c.4 - c.2 * e[c.0] - c.3 * e[c.1];
    let objective = |e: &[f64]| -> f64 { e.iter().zip(mu).map(|(v, m)| m * v.powf(p)).sum() };
    let barrier = |e: &[f64], t: f64| -> f64 {
        let mut f = t * objective(e);
        for c in &cons {
            let s = slack(e, c);
            if s <= 0.0 {
                return f64::INFINITY;
            }
            f -= s.ln();
        }
        f
    };

    let mut e = vec![x.space().diam(); n];
    let mut t = 1.0 / x.space().diam().max(f64::MIN_POSITIVE);
    let mcons = cons.len() as f64;
    let mut decrement = f64::INFINITY;
    for _outer in 0..80 {
        for _inner in 0..200 {
            let mut g = DVector::<f64>::zeros(n);
            let mut h = DMatrix::<f64>::zeros(n, n);
            for i in 0..n {
                g[i] = t * mu[i] * p * e[i].powf(p - 1.0);
                h[(i, i)] = t * mu[i] * p * (p - 1.0) * e[i].powf(p - 2.0);
            }
            for c in &cons {
                let s = slack(&e, c);
                let (i, j, ci, cj) = (c.0, c.1, c.2, c.3);
                g[i] += ci / s;
                g[j] += cj / s;
                let s2 = s * s;
                h[(i, i)] += ci * ci / s2;
                h[(j, j)] += cj * cj / s2;
                h[(i, j)] += ci * cj / s2;
                h[(j, i)] += ci * cj / s2;
            }
            let step = newton_step(h, &g)?;
            decrement = -g.dot(&step);
            if decrement / 2.0 <= 1e-12 {
                break;
            }
            let f0 = barrier(&e, t);
            let mut alpha = 1.0;
            loop {
                let cand: Vec<f64> = (0..n).map(|i| e[i] + alpha * step[i]).collect();
                let f1 = barrier(&cand, t);
                if f1.is_finite() && f1 <= f0 - 0.25 * alpha * decrement {
                    e = cand;
                    break;
                }
                alpha *= 0.5;
                if alpha < 1e-20 {
                    break;
                }
            }
            if alpha < 1e-20 {
                break;
            }
        }
        if mcons / t < 1e-12 {
            break;
        }
        t *= 8.0;
    }
    // Suboptimality certificate: m/t from the central path plus the Newton
    // decrement bound on the distance to the exact center.
    let residual = (mcons + decrement) / t;
    if residual > KKT_LIMIT {
        return Err(Error::SolverTolerance {
            residual,
            limit: KKT_LIMIT,
        });
    }
    Ok((objective(&e).powf(1.0 / p), e))
}

/// Solves `H s = −g`, adding a small ridge when round-off breaks definiteness.
fn newton_step(h: DMatrix<f64>, g: &DVector<f64>) -> Result<DVector<f64>> {
    let n = h.nrows();
    let scale = h.diagonal().max().max(f64::MIN_POSITIVE);
    let mut ridge = 0.0;
    for _ in 0..8 {
        let mut hr = h.clone();
        for i in 0..n {
            hr[(i, i)] += ridge;
        }
        if let Some(chol) = hr.cholesky() {
            return Ok(chol.solve(&(-g)));
        }
        ridge = if ridge == 0.0 {
            scale * 1e-14
        } else {
            ridge * 100.0
        };
    }
    Err(Error::SolverFailure(
        "barrier Hessian is not positive definite".into(),
    ))
}
