//! Named instances, report rows and experiment manifests: the layer shared by
//! the command-line tool and the reference-value checks.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{covering_radius, doubling_constant};
use crate::clustering::{
    metric_transform_mp, shatter_bruteforce, shatter_maxdiam_coloring, shatter_phi_bar,
    shatter_rad, shatter_ultrametric, ClusteringResult, Objective, RadMode,
    DEFAULT_COLORING_BUDGET, DEFAULT_MAX_PARTITIONS,
};
use crate::correspondence::{gh_oracle, DEFAULT_GH_BUDGET};
use crate::error::{Error, Result, Status};
use crate::instances::{
    gen_circle, gen_delta, gen_euclidean_counterexample, gen_interval_grid, gen_sphere_sample,
    gen_tree_counterexample, gen_ynk, random_metric, random_mm_space, setcover_to_graph,
};
use crate::io::{parse_setcover, read_space_file, SpaceFile};
use crate::metric::{diam_p, Exponent, FiniteMetricSpace, MetricMeasureSpace};
use crate::sketching::{hausdorff_map, sketch_k_exact, weak_sketch_upper, ShatterSolver};
use crate::transport::sturm_one_point;

/// A named instance family with its parameters, written `family key=value …`,
/// e.g. `delta m=8` or `sphere dim=3 n=200 seed=7`.
#[derive(Clone, Debug, PartialEq)]
pub enum Generator {
    Delta { m: usize },
    Circle { n: usize },
    Grid { n: usize },
    Sphere { dim: usize, n: usize, seed: u64 },
    Ynk { n: usize, k: usize },
    TreeX { m: usize },
    TreeY { m: usize },
    EuclidX { m: usize },
    EuclidY { m: usize },
    Random { n: usize, seed: u64 },
    RandomMm { n: usize, seed: u64 },
    SetCover { path: PathBuf },
    File { path: PathBuf },
}

impl Generator {
    /// Builds the instance. Measured families carry their measure; the others
    /// are plain metric spaces.
    pub fn build(&self) -> Result<SpaceFile> {
        let mm = |x: MetricMeasureSpace| SpaceFile {
            measure: Some(x.mass().to_vec()),
            space: x.space().clone(),
        };
        let plain = |space: FiniteMetricSpace| SpaceFile {
            space,
            measure: None,
        };
        Ok(match self {
            Generator::Delta { m } => mm(gen_delta(*m)?),
            Generator::Circle { n } => mm(gen_circle(*n)?),
            Generator::Grid { n } => mm(gen_interval_grid(*n)?),
            Generator::Sphere { dim, n, seed } => plain(gen_sphere_sample(*dim, *n, *seed)?),
            Generator::Ynk { n, k } => plain(gen_ynk(*n, *k)?),
            Generator::TreeX { m } => plain(gen_tree_counterexample(*m)?.0),
            Generator::TreeY { m } => plain(gen_tree_counterexample(*m)?.1),
            Generator::EuclidX { m } => plain(gen_euclidean_counterexample(*m)?.0),
            Generator::EuclidY { m } => plain(gen_euclidean_counterexample(*m)?.1),
            Generator::Random { n, seed } => plain(random_metric(*n, *seed)),
            Generator::RandomMm { n, seed } => mm(random_mm_space(*n, *seed)),
            Generator::SetCover { path } => {
                plain(setcover_to_graph(&parse_setcover(&std::fs::read_to_string(path)?)?).0)
            }
            Generator::File { path } => read_space_file(path)?,
        })
    }

    /// Short label for report rows: the path for files, else the descriptor string.
    pub fn label(&self) -> String {
        match self {
            Generator::File { path } => path.display().to_string(),
            other => other.to_string(),
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::Delta { m } => write!(f, "delta m={m}"),
            Generator::Circle { n } => write!(f, "circle n={n}"),
            Generator::Grid { n } => write!(f, "grid n={n}"),
            Generator::Sphere { dim, n, seed } => write!(f, "sphere dim={dim} n={n} seed={seed}"),
            Generator::Ynk { n, k } => write!(f, "ynk n={n} k={k}"),
            Generator::TreeX { m } => write!(f, "tree-x m={m}"),
            Generator::TreeY { m } => write!(f, "tree-y m={m}"),
            Generator::EuclidX { m } => write!(f, "euclid-x m={m}"),
            Generator::EuclidY { m } => write!(f, "euclid-y m={m}"),
            Generator::Random { n, seed } => write!(f, "random n={n} seed={seed}"),
            Generator::RandomMm { n, seed } => write!(f, "random-mm n={n} seed={seed}"),
            Generator::SetCover { path } => write!(f, "setcover path={}", path.display()),
            Generator::File { path } => write!(f, "file path={}", path.display()),
        }
    }
}

impl FromStr for Generator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut toks = s.split_whitespace();
        let family = toks
            .next()
            .ok_or_else(|| Error::InvalidParameter("empty instance".into()))?;
        let mut params: Vec<(&str, &str)> = Vec::new();
        for t in toks {
            let (k, v) = t
                .split_once('=')
                .ok_or_else(|| Error::InvalidParameter(format!("expected key=value, got {t:?}")))?;
            params.push((k, v));
        }
        let get = |key: &str| -> Result<&str> {
            params
                .iter()
                .find(|(k, _)| *k == key)
                .map(|(_, v)| *v)
                .ok_or_else(|| Error::InvalidParameter(format!("{family} needs {key}=…")))
        };
        let num = |key: &str| -> Result<usize> {
            get(key)?.parse().map_err(|_| {
                Error::InvalidParameter(format!("{key} must be a nonnegative integer"))
            })
        };
        let seed = || -> Result<u64> {
            get("seed")?
                .parse()
                .map_err(|_| Error::InvalidParameter("seed must be a nonnegative integer".into()))
        };
        Ok(match family {
            "delta" => Generator::Delta { m: num("m")? },
            "circle" => Generator::Circle { n: num("n")? },
            "grid" => Generator::Grid { n: num("n")? },
            "sphere" => Generator::Sphere {
                dim: num("dim")?,
                n: num("n")?,
                seed: seed()?,
            },
            "ynk" => Generator::Ynk {
                n: num("n")?,
                k: num("k")?,
            },
            "tree-x" => Generator::TreeX { m: num("m")? },
            "tree-y" => Generator::TreeY { m: num("m")? },
            "euclid-x" => Generator::EuclidX { m: num("m")? },
            "euclid-y" => Generator::EuclidY { m: num("m")? },
            "random" => Generator::Random {
                n: num("n")?,
                seed: seed()?,
            },
            "random-mm" => Generator::RandomMm {
                n: num("n")?,
                seed: seed()?,
            },
            "setcover" => Generator::SetCover {
                path: get("path")?.into(),
            },
            "file" => Generator::File {
                path: get("path")?.into(),
            },
            other => {
                return Err(Error::InvalidParameter(format!(
                    "unknown instance family {other:?}"
                )))
            }
        })
    }
}

/// One line of a report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReportRow {
    pub instance: String,
    pub k: Option<usize>,
    pub p: Option<String>,
    pub q: Option<String>,
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
    pub method: String,
    pub seconds: f64,
    pub status: String,
}

pub const TSV_HEADER: &str = "instance\tk\tp\tq\tvalue\tlower\tupper\tmethod\tseconds\tstatus";

impl ReportRow {
    pub fn to_tsv(&self) -> String {
        let opt = |o: &Option<String>| o.clone().unwrap_or_else(|| "-".into());
        format!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{:.6}\t{}",
            self.instance,
            self.k.map_or("-".into(), |k| k.to_string()),
            opt(&self.p),
            opt(&self.q),
            crate::io::fmt_real(self.value),
            crate::io::fmt_real(self.lower),
            crate::io::fmt_real(self.upper),
            self.method,
            self.seconds,
            self.status
        )
    }

    pub fn is_ok(&self) -> bool {
        self.status == "OK"
    }
}

/// Renders rows as TSV with a header line.
pub fn rows_to_tsv(rows: &[ReportRow]) -> String {
    let mut out = String::from(TSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&r.to_tsv());
        out.push('\n');
    }
    out
}

/// Renders rows as a JSON array.
pub fn rows_to_json(rows: &[ReportRow]) -> String {
    serde_json::to_string_pretty(rows).expect("rows serialize")
}

/// Which Shatter objective a command or manifest row asks for.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ShatterObjective {
    /// Largest block diameter.
    MaxDiam,
    /// `Φ_{p,q}` with `p`-diameters.
    Phi { p: Exponent, q: Exponent },
    /// `Φ_{p,q}` with `p`-radii.
    Rad { p: Exponent, q: Exponent },
    /// Largest block diameter in the subdominant ultrametric.
    Ultrametric,
    /// `max_i (diam X − diam B_i)`.
    PhiBar,
    /// Largest block diameter in the metric transform `m_p`.
    Transform { p: f64 },
}

impl ShatterObjective {
    /// Builds the objective from a name and optional exponents; exponents
    /// the objective does not use are a [`Error::FlagConflict`].
    pub fn from_flags(
        name: Option<&str>,
        p: Option<Exponent>,
        q: Option<Exponent>,
    ) -> Result<Self> {
        let name = name.unwrap_or(if p.is_some() || q.is_some() {
            "phi"
        } else {
            "maxdiam"
        });
        let conflict =
            |what: &str| Error::FlagConflict(format!("objective {name} does not take {what}"));
        match name {
            "maxdiam" | "ultrametric" | "phibar" => {
                if p.is_some() {
                    return Err(conflict("--p"));
                }
                if q.is_some() {
                    return Err(conflict("--q"));
                }
                Ok(match name {
                    "maxdiam" => ShatterObjective::MaxDiam,
                    "ultrametric" => ShatterObjective::Ultrametric,
                    _ => ShatterObjective::PhiBar,
                })
            }
            "phi" | "rad" => {
                let p = p.unwrap_or(Exponent::ONE);
                let q = q.unwrap_or(p);
                Ok(if name == "phi" {
                    ShatterObjective::Phi { p, q }
                } else {
                    ShatterObjective::Rad { p, q }
                })
            }
            "transform" => {
                if q.is_some() {
                    return Err(conflict("--q"));
                }
                match p.unwrap_or(Exponent::ONE) {
                    Exponent::Finite(p) => Ok(ShatterObjective::Transform { p }),
                    Exponent::Infinite => Err(Error::FlagConflict(
                        "the metric transform needs finite --p".into(),
                    )),
                }
            }
            other => Err(Error::InvalidParameter(format!(
                "unknown objective {other:?}"
            ))),
        }
    }

    fn exponents(self) -> (Option<Exponent>, Option<Exponent>) {
        match self {
            ShatterObjective::Phi { p, q } | ShatterObjective::Rad { p, q } => (Some(p), Some(q)),
            ShatterObjective::Transform { p } => (Some(Exponent::Finite(p)), None),
            _ => (None, None),
        }
    }

    fn name(self) -> &'static str {
        match self {
            ShatterObjective::MaxDiam => "maxdiam",
            ShatterObjective::Phi { .. } => "phi",
            ShatterObjective::Rad { .. } => "rad",
            ShatterObjective::Ultrametric => "ultrametric",
            ShatterObjective::PhiBar => "phibar",
            ShatterObjective::Transform { .. } => "transform",
        }
    }
}

/// Work limits for exact searches.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budgets {
    pub max_partitions: u64,
    pub max_maps: u64,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets {
            max_partitions: DEFAULT_MAX_PARTITIONS,
            max_maps: DEFAULT_GH_BUDGET,
        }
    }
}

/// Largest space on which max-diameter Shatter enumerates partitions; above
/// it the coloring search is used.
pub const BRUTE_MAXDIAM_LIMIT: usize = 12;

fn uniform_or(f: &SpaceFile) -> MetricMeasureSpace {
    f.require_measure()
        .unwrap_or_else(|_| MetricMeasureSpace::uniform(f.space.clone()))
}

/// Exact Shatter value under `objective`, with the method used.
pub fn run_shatter(
    f: &SpaceFile,
    k: usize,
    objective: ShatterObjective,
    budgets: Budgets,
) -> Result<(ClusteringResult, &'static str)> {
    let x = &f.space;
    match objective {
        ShatterObjective::MaxDiam if x.len() <= BRUTE_MAXDIAM_LIMIT => Ok((
            shatter_bruteforce(
                &MetricMeasureSpace::uniform(x.clone()),
                k,
                Objective::MaxDiam,
                budgets.max_partitions,
            )?,
            "partition-enumeration",
        )),
        ShatterObjective::MaxDiam => Ok((
            shatter_maxdiam_coloring(x, k, budgets.max_partitions)?,
            "threshold-coloring",
        )),
        ShatterObjective::Phi { p, q } => {
            let mm = f.require_measure()?;
            Ok((
                shatter_bruteforce(&mm, k, Objective::Phi { p, q }, budgets.max_partitions)?,
                "partition-enumeration",
            ))
        }
        ShatterObjective::Rad { p, q } => {
            let mm = f.require_measure()?;
            Ok((
                shatter_rad(&mm, k, p, q, RadMode::Brute, budgets.max_partitions)?,
                "partition-enumeration",
            ))
        }
        ShatterObjective::Ultrametric => Ok((shatter_ultrametric(x, k)?, "single-linkage-cut")),
        ShatterObjective::PhiBar => {
            let (partition, cost) = shatter_phi_bar(x, k)?;
            Ok((
                ClusteringResult {
                    partition,
                    cost,
                    objective: Objective::MaxDiam,
                    certificate: crate::clustering::Certificate::Exact,
                },
                "one-block",
            ))
        }
        ShatterObjective::Transform { p } => Ok((
            shatter_maxdiam_coloring(&metric_transform_mp(x, p)?, k, DEFAULT_COLORING_BUDGET)?,
            "transform-coloring",
        )),
    }
}

/// Turns an operation outcome into a report row; a budget overrun becomes a
/// `BudgetExceeded` row and other errors stay errors.
fn finish(
    instance: String,
    k: Option<usize>,
    p: Option<Exponent>,
    q: Option<Exponent>,
    start: Instant,
    outcome: Result<(f64, f64, f64, String, Status)>,
) -> Result<ReportRow> {
    let seconds = start.elapsed().as_secs_f64();
    let (p, q) = (p.map(|e| e.to_string()), q.map(|e| e.to_string()));
    match outcome {
        Ok((value, lower, upper, method, status)) => Ok(ReportRow {
            instance,
            k,
            p,
            q,
            value,
            lower,
            upper,
            method,
            seconds,
            status: status.to_string(),
        }),
        Err(Error::BudgetExceeded(msg)) => Ok(ReportRow {
            instance,
            k,
            p,
            q,
            value: f64::NAN,
            lower: f64::NAN,
            upper: f64::NAN,
            method: msg,
            seconds,
            status: Status::BudgetExceeded.to_string(),
        }),
        Err(e) => Err(e),
    }
}

/// An operation on one instance, as run by manifests and the command line.
#[derive(Clone, Debug, PartialEq)]
pub enum Operation {
    Shatter {
        k: usize,
        objective: ShatterObjective,
    },
    /// Exact `Sketch_k` through the Hausdorff map of an optimal partition.
    Sketch {
        k: usize,
    },
    /// Gromov–Hausdorff distance to a second instance.
    Gh {
        other: Generator,
    },
    /// `diam_p` of the whole space.
    DiamP {
        p: Exponent,
    },
    /// Optimal Sturm cost to a one-point space.
    SturmOnePoint {
        p: Exponent,
    },
    /// Certified upper bound on the weak sketching cost.
    WeakSketch {
        k: usize,
        p: Exponent,
    },
    CoveringRadius {
        k: usize,
    },
    DoublingConstant,
}

/// Runs `op` on the instance built by `gen`.
pub fn run_operation(gen: &Generator, op: &Operation, budgets: Budgets) -> Result<ReportRow> {
    let start = Instant::now();
    let f = gen.build()?;
    let name = gen.label();
    let exact = |v: f64, method: &str| Ok((v, v, v, method.to_string(), Status::Exact));
    match op {
        Operation::Shatter { k, objective } => {
            let (p, q) = objective.exponents();
            let out = run_shatter(&f, *k, *objective, budgets).map(|(r, m)| {
                (
                    r.cost,
                    r.cost,
                    r.cost,
                    format!("{}:{m}", objective.name()),
                    Status::Exact,
                )
            });
            finish(name, Some(*k), p, q, start, out)
        }
        Operation::Sketch { k } => {
            let solver = if f.space.len() <= BRUTE_MAXDIAM_LIMIT {
                ShatterSolver::Brute {
                    max_partitions: budgets.max_partitions,
                }
            } else {
                ShatterSolver::Coloring {
                    budget: budgets.max_partitions,
                }
            };
            let out = sketch_k_exact(&f.space, *k, solver)
                .map(|s| (s.upper, s.lower, s.upper, s.method.to_string(), s.status));
            finish(name, Some(*k), None, None, start, out)
        }
        Operation::Gh { other } => {
            let y = other.build()?;
            let out = gh_oracle(&f.space, &y.space, budgets.max_maps).map(|g| {
                (
                    g.value(),
                    g.lower,
                    g.upper,
                    "map-pair-search".to_string(),
                    g.status,
                )
            });
            finish(
                format!("{name} | {}", other.label()),
                None,
                None,
                None,
                start,
                out,
            )
        }
        Operation::DiamP { p } => {
            let x = uniform_or(&f);
            let all: Vec<usize> = (0..x.len()).collect();
            finish(
                name,
                None,
                Some(*p),
                None,
                start,
                exact(diam_p(&x, &all, *p), "closed-sum"),
            )
        }
        Operation::SturmOnePoint { p } => {
            let x = uniform_or(&f);
            let method = match p {
                Exponent::Finite(v) if *v != 1.0 => "log-barrier",
                _ => "linear-program",
            };
            let out =
                sturm_one_point(&x, *p).map(|(v, _)| (v, v, v, method.to_string(), Status::Exact));
            finish(name, None, Some(*p), None, start, out)
        }
        Operation::WeakSketch { k, p } => {
            let x = uniform_or(&f);
            let out = weak_sketch_upper(&x, *k, *p)
                .map(|s| (s.upper, s.lower, s.upper, s.method.to_string(), s.status));
            finish(name, Some(*k), Some(*p), None, start, out)
        }
        Operation::CoveringRadius { k } => {
            let out = covering_radius(&f.space, *k).map(|c| {
                let method = if c.exact {
                    "exact-center-search"
                } else {
                    "gonzalez-bound"
                };
                (c.value, c.lower, c.value, method.to_string(), Status::Exact)
            });
            finish(name, Some(*k), None, None, start, out)
        }
        Operation::DoublingConstant => {
            let c = doubling_constant(&uniform_or(&f)).c;
            finish(name, None, None, None, start, exact(c, "radius-scan"))
        }
    }
}

/// Checks the duality on `trials` random spaces: the GH distance from `X` to
/// the Hausdorff map of an optimal partition equals half of `Shatter_k(X)`.
/// Row status is `OK`, `Mismatch` or `BudgetExceeded`.
pub fn verify_duality(
    n: usize,
    k: usize,
    trials: usize,
    seed: u64,
    budgets: Budgets,
) -> Result<Vec<ReportRow>> {
    (0..trials)
        .into_par_iter()
        .map(|t| {
            let start = Instant::now();
            let s = seed.wrapping_add(t as u64);
            let x = random_metric(n, s);
            let name = format!("random n={n} seed={s}");
            let out = (|| {
                let opt = shatter_bruteforce(
                    &MetricMeasureSpace::uniform(x.clone()),
                    k,
                    Objective::MaxDiam,
                    budgets.max_partitions,
                )?;
                let model = hausdorff_map(&x, &opt.partition)?;
                let g = gh_oracle(&x, &model, budgets.max_maps)?;
                Ok((g.value(), opt.cost / 2.0, g.status))
            })();
            let seconds = start.elapsed().as_secs_f64();
            let row = |value: f64, half: f64, status: String| ReportRow {
                instance: name.clone(),
                k: Some(k),
                p: None,
                q: None,
                value,
                lower: half,
                upper: half,
                method: "gh-vs-half-shatter".into(),
                seconds,
                status,
            };
            match out {
                Ok((g, half, Status::Exact)) => {
                    let status = if (g - half).abs() <= DUALITY_TOL {
                        "OK"
                    } else {
                        "Mismatch"
                    };
                    Ok(row(g, half, status.into()))
                }
                Ok((g, half, Status::BudgetExceeded)) => Ok(row(g, half, "BudgetExceeded".into())),
                Err(Error::BudgetExceeded(_)) => {
                    Ok(row(f64::NAN, f64::NAN, "BudgetExceeded".into()))
                }
                Err(e) => Err(e),
            }
        })
        .collect()
}

/// Tolerance for the duality check.
pub const DUALITY_TOL: f64 = 1e-12;

/// Times the main solvers on `family` at each size.
pub fn bench(family: &str, sizes: &[usize], k: usize, seed: u64) -> Result<Vec<ReportRow>> {
    let mut rows = Vec::new();
    for &n in sizes {
        let gen: Generator = match family {
            "sphere" => format!("sphere dim=3 n={n} seed={seed}"),
            "random" | "random-mm" => format!("{family} n={n} seed={seed}"),
            "delta" => format!("delta m={n}"),
            other => format!("{other} n={n}"),
        }
        .parse()?;
        let ops = [
            Operation::Shatter {
                k,
                objective: ShatterObjective::MaxDiam,
            },
            Operation::CoveringRadius { k },
            Operation::DoublingConstant,
        ];
        for op in &ops {
            rows.push(run_operation(&gen, op, Budgets::default())?);
        }
    }
    Ok(rows)
}

/// How a manifest row compares its value with the expectation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Comparison {
    /// `|value − expected| ≤ tolerance`.
    #[default]
    Eq,
    /// `value ≤ expected + tolerance`.
    Le,
    /// `value ≥ expected − tolerance`.
    Ge,
}

/// One expectation in a manifest.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestRow {
    pub name: String,
    /// Instance in `family key=value …` form.
    pub instance: String,
    /// One of `shatter`, `sketch`, `gh`, `diam_p`, `sturm_one_point`,
    /// `weak_sketch`, `covering_radius`, `doubling_constant`.
    pub operation: String,
    pub k: Option<usize>,
    pub p: Option<String>,
    pub q: Option<String>,
    pub objective: Option<String>,
    /// Second instance for `gh`.
    pub other: Option<String>,
    pub expected: f64,
    pub tolerance: f64,
    #[serde(default)]
    pub compare: Comparison,
    /// Where the expected value comes from.
    pub provenance: String,
}

/// A list of expectations to check.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentManifest {
    pub name: String,
    #[serde(default, rename = "row")]
    pub rows: Vec<ManifestRow>,
}

impl ExperimentManifest {
    pub fn parse(text: &str) -> Result<Self> {
        let m: ExperimentManifest = toml::from_str(text).map_err(|e| Error::Parse {
            line: e
                .span()
                .map_or(1, |s| text[..s.start].lines().count().max(1)),
            msg: e.message().to_string(),
        })?;
        for r in &m.rows {
            if r.tolerance.is_nan() || r.tolerance <= 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "row {}: tolerance must be positive",
                    r.name
                )));
            }
            if r.provenance.trim().is_empty() {
                return Err(Error::InvalidParameter(format!(
                    "row {}: provenance is empty",
                    r.name
                )));
            }
        }
        Ok(m)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }
}

impl ManifestRow {
    fn operation(&self) -> Result<Operation> {
        let exp = |s: &Option<String>| s.as_deref().map(str::parse::<Exponent>).transpose();
        let (p, q) = (exp(&self.p)?, exp(&self.q)?);
        let k = || {
            self.k
                .ok_or_else(|| Error::InvalidParameter(format!("row {}: needs k", self.name)))
        };
        let p_req =
            || p.ok_or_else(|| Error::InvalidParameter(format!("row {}: needs p", self.name)));
        Ok(match self.operation.as_str() {
            "shatter" => Operation::Shatter {
                k: k()?,
                objective: ShatterObjective::from_flags(self.objective.as_deref(), p, q)?,
            },
            "sketch" => Operation::Sketch { k: k()? },
            "gh" => Operation::Gh {
                other: self
                    .other
                    .as_deref()
                    .ok_or_else(|| {
                        Error::InvalidParameter(format!("row {}: gh needs other", self.name))
                    })?
                    .parse()?,
            },
            "diam_p" => Operation::DiamP { p: p_req()? },
            "sturm_one_point" => Operation::SturmOnePoint { p: p_req()? },
            "weak_sketch" => Operation::WeakSketch {
                k: k()?,
                p: p_req()?,
            },
            "covering_radius" => Operation::CoveringRadius { k: k()? },
            "doubling_constant" => Operation::DoublingConstant,
            other => {
                return Err(Error::InvalidParameter(format!(
                    "row {}: unknown operation {other:?}",
                    self.name
                )))
            }
        })
    }

    /// Whether `value` meets the expectation.
    pub fn accepts(&self, value: f64) -> bool {
        match self.compare {
            Comparison::Eq => (value - self.expected).abs() <= self.tolerance,
            Comparison::Le => value <= self.expected + self.tolerance,
            Comparison::Ge => value >= self.expected - self.tolerance,
        }
    }
}

/// Outcome of one manifest row.
#[derive(Clone, Debug)]
pub struct ManifestOutcome {
    pub name: String,
    pub row: ReportRow,
    pub expected: f64,
    pub passed: bool,
}

/// Runs every row (in parallel, reported in manifest order). A row whose
/// status is not `OK` fails; its report row carries the status.
pub fn run_manifest(
    manifest: &ExperimentManifest,
    budgets: Budgets,
) -> Result<Vec<ManifestOutcome>> {
    manifest
        .rows
        .par_iter()
        .map(|r| {
            let gen: Generator = r.instance.parse()?;
            let mut row = run_operation(&gen, &r.operation()?, budgets)?;
            row.instance = r.name.clone();
            let passed = row.is_ok() && r.accepts(row.value);
            Ok(ManifestOutcome {
                name: r.name.clone(),
                expected: r.expected,
                passed,
                row,
            })
        })
        .collect()
}

/// Thread pool capped by `MMSKETCH_THREADS` when set.
pub fn thread_pool() -> Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var("MMSKETCH_THREADS") {
        let n: usize = v.parse().map_err(|_| {
            Error::InvalidParameter(format!(
                "MMSKETCH_THREADS must be a positive integer, got {v:?}"
            ))
        })?;
        b = b.num_threads(n.max(1));
    }
    b.build().map_err(|e| Error::SolverFailure(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generator_strings_round_trip() {
        for s in [
            "delta m=8",
            "sphere dim=3 n=20 seed=4",
            "ynk n=4 k=2",
            "tree-y m=1",
            "random-mm n=6 seed=1",
        ] {
            let g: Generator = s.parse().unwrap();
            assert_eq!(g.to_string(), s);
        }
        assert!("sphere dim=3 n=20".parse::<Generator>().is_err());
        assert!("blob n=3".parse::<Generator>().is_err());
    }

    #[test]
    fn objective_flags() {
        assert_eq!(
            ShatterObjective::from_flags(None, None, None).unwrap(),
            ShatterObjective::MaxDiam
        );
        assert_eq!(
            ShatterObjective::from_flags(None, Some(Exponent::ONE), Some(Exponent::ONE)).unwrap(),
            ShatterObjective::Phi {
                p: Exponent::ONE,
                q: Exponent::ONE
            }
        );
        let e =
            ShatterObjective::from_flags(Some("maxdiam"), Some(Exponent::TWO), None).unwrap_err();
        assert_eq!(e.name(), "FlagConflict");
    }

    #[test]
    fn delta_shatter_row() {
        let op = Operation::Shatter {
            k: 4,
            objective: ShatterObjective::Phi {
                p: Exponent::ONE,
                q: Exponent::ONE,
            },
        };
        let row = run_operation(&"delta m=8".parse().unwrap(), &op, Budgets::default()).unwrap();
        assert!((row.value - 0.5).abs() < 1e-12);
        assert!(row.is_ok());
    }

    #[test]
    fn budget_overrun_becomes_a_row() {
        let op = Operation::Shatter {
            k: 3,
            objective: ShatterObjective::MaxDiam,
        };
        let tiny = Budgets {
            max_partitions: 5,
            max_maps: 5,
        };
        let row = run_operation(&"random n=9 seed=2".parse().unwrap(), &op, tiny).unwrap();
        assert_eq!(row.status, "BudgetExceeded");
    }

    #[test]
    fn manifest_checks() {
        let text = r#"
name = "t"
[[row]]
name = "pair"
instance = "delta m=2"
operation = "diam_p"
p = "1"
expected = 0.5
tolerance = 1e-12
provenance = "two points at distance 1"
"#;
        let m = ExperimentManifest::parse(text).unwrap();
        let out = run_manifest(&m, Budgets::default()).unwrap();
        assert!(out[0].passed);
        let empty = ExperimentManifest::parse("name = \"empty\"\n").unwrap();
        assert!(run_manifest(&empty, Budgets::default()).unwrap().is_empty());
        let bad = text.replace("1e-12", "-1.0");
        assert!(ExperimentManifest::parse(&bad).is_err());
    }

    #[test]
    fn duality_rows_are_ok() {
        let rows = verify_duality(6, 2, 4, 10, Budgets::default()).unwrap();
        assert!(rows.iter().all(ReportRow::is_ok));
    }
}
