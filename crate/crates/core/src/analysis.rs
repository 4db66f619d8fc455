//! Regularity functionals (doubling constant, `f_δ`, `v_δ`), the doubling
//! bound relating weak and Sturm sketches, covering radii and the
//! impossibility tables on `Y_{n,k}`.
//!
//! Balls are closed: `B(x, r) = {y : d(x, y) ≤ r}`.

use crate::clustering::{
    for_each_combination, gonzalez, metric_transform_mp, norm_p_of_centers, opt_inf_exact,
    shatter_maxdiam_coloring, shatter_phi_bar, shatter_ultrametric, DEFAULT_COLORING_BUDGET,
};
use crate::error::{Error, Result};
use crate::instances::{gen_delta, gen_ynk};
use crate::metric::{Exponent, FiniteMetricSpace, MetricMeasureSpace, Partition};
use crate::sketching::{sketch_sturm_fp_approx, weak_sketch_upper, SketchModel, SketchRelation};
use crate::transport::{dis_p, MeasureCoupling};

/// Mass of the closed ball `B(x, r)`.
pub fn ball_mass(x: &MetricMeasureSpace, center: usize, r: f64) -> f64 {
    x.space()
        .row(center)
        .iter()
        .zip(x.mass())
        .filter(|(d, _)| **d <= r)
        .map(|(_, m)| m)
        .sum()
}

/// One tested `(x, r)` pair and its ratio `μ(B(x,2r)) / μ(B(x,r))`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DoublingWitness {
    pub center: usize,
    pub radius: f64,
    pub ratio: f64,
}

/// Doubling constant with the tested radii.
#[derive(Clone, Debug)]
pub struct DoublingReport {
    /// Smallest `C ≥ 1` with `μ(B(x,2r)) ≤ C·μ(B(x,r))` for all `x` and `r > 0`.
    pub c: f64,
    /// Every tested pair; `c` is the largest ratio among them (or 1).
    pub per_radius: Vec<DoublingWitness>,
}

impl DoublingReport {
    pub fn argmax(&self) -> Option<&DoublingWitness> {
        self.per_radius
            .iter()
            .max_by(|a, b| a.ratio.total_cmp(&b.ratio))
    }
}

/// Exact doubling constant. Both balls change only at radii equal to a
/// distance or half a distance from the center, and closed balls are
/// right-continuous, so testing those radii covers every `r > 0`.
pub fn doubling_constant(x: &MetricMeasureSpace) -> DoublingReport {
    let n = x.len();
    let mut per_radius = Vec::new();
    let mut c: f64 = 1.0;
    for center in 0..n {
        let mut radii: Vec<f64> = x
            .space()
            .row(center)
            .iter()
            .filter(|d| **d > 0.0)
            .flat_map(|&d| [d, d / 2.0])
            .collect();
        radii.sort_by(f64::total_cmp);
        radii.dedup();
        for r in radii {
            let ratio = ball_mass(x, center, 2.0 * r) / ball_mass(x, center, r);
            c = c.max(ratio);
            per_radius.push(DoublingWitness {
                center,
                radius: r,
                ratio,
            });
        }
    }
    DoublingReport { c, per_radius }
}

fn check_delta(delta: f64) -> Result<()> {
    if delta > 0.0 && delta < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "delta must lie in (0, 1), got {delta}"
        )))
    }
}

/// `f_δ(ε) = μ{x : μ(B(x, ε)) ≤ δ}`.
pub fn f_delta(x: &MetricMeasureSpace, delta: f64, eps: f64) -> Result<f64> {
    check_delta(delta)?;
    Ok((0..x.len())
        .filter(|&a| ball_mass(x, a, eps) <= delta)
        .fold(0.0, |s, a| s + x.mass()[a]))
}

/// `v_δ = inf{ε > 0 : f_δ(ε) ≤ ε}`, exact: `f_δ` is a nonincreasing step
/// function constant on the intervals between consecutive distances.
/// Returns 0 when `f_δ ≡ 0`.
pub fn v_delta(x: &MetricMeasureSpace, delta: f64) -> Result<f64> {
    check_delta(delta)?;
    let mut breaks = x.space().distinct_distances();
    breaks.insert(0, 0.0);
    for (i, &b) in breaks.iter().enumerate() {
        let f = f_delta(x, delta, b)?;
        let v = b.max(f);
        match breaks.get(i + 1) {
            Some(&next) if v >= next => continue,
            _ => return Ok(v),
        }
    }
    unreachable!("the last interval is unbounded")
}

/// Both sides of the doubling bound for one `(X, k, p)`.
#[derive(Clone, Debug)]
pub struct DoublingBoundReport {
    /// Certified upper bound on the weak sketching cost.
    pub delta: f64,
    /// Upper bound on the Sturm sketching cost from the local-search pipeline.
    pub sturm_upper: f64,
    /// `(8·diam·δ^{1/(5 log₂ C)} + δ^{1/5})^{1/p} · (2·diam + 45)`.
    pub rhs: f64,
    pub doubling: f64,
    pub diam: f64,
    /// Whether `δ < 2⁻⁵`; the bound is only claimed when it holds.
    pub precondition_met: bool,
}

impl DoublingBoundReport {
    /// `δ ≤ sturm_upper < rhs`, or both zero in the degenerate case.
    pub fn chain_holds(&self) -> bool {
        if self.delta == 0.0 {
            return self.sturm_upper == 0.0;
        }
        self.delta <= self.sturm_upper && self.sturm_upper < self.rhs
    }
}

/// Right-hand side of the doubling bound.
pub fn doubling_rhs(delta: f64, diam: f64, c: f64, p: f64) -> f64 {
    let inner = 8.0 * diam * delta.powf(1.0 / (5.0 * c.log2())) + delta.powf(0.2);
    inner.powf(1.0 / p) * (2.0 * diam + 45.0)
}

const PIPELINE_SWAPS: usize = 1;
const PIPELINE_EPSILON: f64 = 0.1;

/// Evaluates the doubling bound. `δ` is the smaller of the best weak
/// partition coupling and the weak cost of the Sturm pipeline's own plan, so
/// `δ ≤ sturm_upper` holds by the triangle inequality in the coupling.
pub fn doubling_bound_check(
    x: &MetricMeasureSpace,
    k: usize,
    p: f64,
) -> Result<DoublingBoundReport> {
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "doubling bound needs finite p >= 1, got {p}"
        )));
    }
    let pe = Exponent::Finite(p);
    let sturm = sketch_sturm_fp_approx(x, k, pe, PIPELINE_SWAPS, PIPELINE_EPSILON)?;
    let weak = weak_sketch_upper(x, k, pe)?;
    let mut delta = weak.upper;
    if let (SketchRelation::Sturm(sp), SketchModel::Measure(model)) =
        (&sturm.relation, &sturm.model)
    {
        delta = delta.min(0.5 * dis_p(&sp.plan, x, model, pe));
    }
    let doubling = doubling_constant(x).c;
    let diam = x.space().diam();
    Ok(DoublingBoundReport {
        delta,
        sturm_upper: sturm.upper,
        rhs: doubling_rhs(delta, diam, doubling, p),
        doubling,
        diam,
        precondition_met: delta < 1.0 / 32.0,
    })
}

/// Node budget for the exact covering radius search.
pub const COVERING_BUDGET: u64 = 10_000_000;

/// Covering radius with an exactness flag.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoveringRadius {
    pub value: f64,
    /// Certified lower bound; equals `value` when exact.
    pub lower: f64,
    pub exact: bool,
}

/// `Cov_k(X)`: the smallest `r` such that `k` closed balls centered in `X`
/// cover it. Exact search within a node budget, otherwise the Gonzalez radius
/// with half of it as lower bound.
pub fn covering_radius(x: &FiniteMetricSpace, k: usize) -> Result<CoveringRadius> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    if let Some((_, r)) = opt_inf_exact(x, k, COVERING_BUDGET) {
        return Ok(CoveringRadius {
            value: r,
            lower: r,
            exact: true,
        });
    }
    let (c, _) = gonzalez(x, k)?;
    let r = norm_p_of_centers(
        &MetricMeasureSpace::uniform(x.clone()),
        c.as_slice(),
        Exponent::Infinite,
    );
    Ok(CoveringRadius {
        value: r,
        lower: r / 2.0,
        exact: false,
    })
}

/// Plain enumeration of center sets, used to cross-check [`covering_radius`].
pub fn covering_radius_bruteforce(x: &FiniteMetricSpace, k: usize) -> f64 {
    let n = x.len();
    let all: Vec<usize> = (0..n).collect();
    let mut best = f64::INFINITY;
    for_each_combination(&all, k.min(n), |c| {
        let r = (0..n)
            .map(|a| c.iter().map(|&j| x.d(a, j)).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max);
        best = best.min(r);
        false
    });
    best
}

/// One row of the impossibility table on `Y_{n,k}`.
#[derive(Clone, Debug, PartialEq)]
pub struct AdmissibilityRow {
    pub n: usize,
    pub k: usize,
    pub p: f64,
    /// Shatter under the subdominant-ultrametric diameter.
    pub phi_u: f64,
    /// Shatter under `Φ̄(X,P) = max_i (diam X − diam B_i)`.
    pub phi_bar: f64,
    /// Shatter under the diameter of the metric transform `m_p`.
    pub phi_p: f64,
    pub cov: CoveringRadius,
}

/// Shatter values under the three non-admissible objectives next to the
/// covering radius, for each `Y_{n,k}`: the Shatter values vanish as `n`
/// grows while `Cov_k` stays at least `1/2`.
pub fn admissibility_report(ns: &[usize], ks: &[usize], p: f64) -> Result<Vec<AdmissibilityRow>> {
    let mut rows = Vec::new();
    for &n in ns {
        for &k in ks {
            let y = gen_ynk(n, k)?;
            let phi_u = shatter_ultrametric(&y, k)?.cost;
            let (_, phi_bar) = shatter_phi_bar(&y, k)?;
            let phi_p =
                shatter_maxdiam_coloring(&metric_transform_mp(&y, p)?, k, DEFAULT_COLORING_BUDGET)?
                    .cost;
            let cov = covering_radius(&y, k)?;
            rows.push(AdmissibilityRow {
                n,
                k,
                p,
                phi_u,
                phi_bar,
                phi_p,
                cov,
            });
        }
    }
    Ok(rows)
}

/// Gap between the Sturm and weak sketching costs on `Δ_m`, `m = 2^{j+1}`,
/// `k = 2^j`, at `p = 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlowupRow {
    pub m: usize,
    pub k: usize,
    /// `½ · Shatter_{k,1,1}(Δ_m) = ½(1 − k/m)`, a lower bound on the Sturm cost.
    pub sturm_lower: f64,
    /// `½ dis_1` of the equipartition's block coupling, an upper bound on the
    /// weak cost.
    pub weak_upper: f64,
}

impl BlowupRow {
    pub fn ratio(&self) -> f64 {
        self.sturm_lower / self.weak_upper
    }

    /// Whether the ratio reaches `m / 6`.
    pub fn certified(&self) -> bool {
        self.ratio() >= self.m as f64 / 6.0
    }
}

pub fn blowup_certificate(j: u32) -> Result<BlowupRow> {
    let k = 1usize << j;
    let m = 2 * k;
    let x = gen_delta(m)?;
    let assign: Vec<usize> = (0..m).map(|i| i / (m / k)).collect();
    let part = Partition::from_assignment(&assign);
    let model = crate::sketching::wasserstein_map(&x, &part, Exponent::ONE)?;
    let plan = MeasureCoupling::from_partition(&x, &part);
    let weak_upper = 0.5 * dis_p(&plan, &x, &model, Exponent::ONE);
    let sturm_lower = 0.5 * (1.0 - k as f64 / m as f64);
    Ok(BlowupRow {
        m,
        k,
        sturm_lower,
        weak_upper,
    })
}
