//! Text formats for spaces, partitions, couplings, sketches and set-cover
//! instances. Reals are written with 17 significant digits so every value
//! reads back bit-identical.

use std::fmt::Write as _;
use std::path::Path;

use crate::correspondence::{Correspondence, MetricCoupling};
use crate::error::{Error, Result};
use crate::instances::SetCoverInstance;
use crate::metric::{FiniteMetricSpace, MetricMeasureSpace, Partition};
use crate::sketching::{SketchModel, SketchRelation, SketchResult};
use crate::transport::{MeasureCoupling, SUPPORT_TOL};

/// Formats a real with 17 significant digits.
pub fn fmt_real(v: f64) -> String {
    format!("{v:.16e}")
}

/// A parsed space file: the metric and, when present, its measure.
#[derive(Clone, Debug)]
pub struct SpaceFile {
    pub space: FiniteMetricSpace,
    pub measure: Option<Vec<f64>>,
}

impl SpaceFile {
    /// The metric measure space, or `MeasureRequired` without a measure line.
    pub fn require_measure(&self) -> Result<MetricMeasureSpace> {
        match &self.measure {
            Some(m) => MetricMeasureSpace::new(self.space.clone(), m.clone()),
            None => Err(Error::MeasureRequired(
                "the space file has no `measure:` line".into(),
            )),
        }
    }
}

/// Nonblank lines with their 1-based line numbers; `#` starts a comment.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty())
}

fn parse_num<T: std::str::FromStr>(tok: &str, line: usize) -> Result<T> {
    tok.parse().map_err(|_| Error::Parse {
        line,
        msg: format!("cannot parse `{tok}`"),
    })
}

fn parse_reals(l: &str, line: usize) -> Result<Vec<f64>> {
    l.split_whitespace().map(|t| parse_num(t, line)).collect()
}

/// Parses a space file: `n`, then `n` matrix rows, then optionally
/// `measure:` followed by `n` masses (on the same or following lines).
pub fn parse_space(text: &str) -> Result<SpaceFile> {
    let mut lines = content_lines(text);
    let (l0, first) = lines.next().ok_or(Error::Parse {
        line: 1,
        msg: "empty file".into(),
    })?;
    let n: usize = parse_num(first, l0)?;
    let mut rows = Vec::with_capacity(n);
    for r in 0..n {
        let (ln, l) = lines.next().ok_or(Error::Parse {
            line: l0 + r + 1,
            msg: format!("expected {n} rows, found {r}"),
        })?;
        if l.starts_with("measure:") {
            return Err(Error::Parse {
                line: ln,
                msg: format!("expected {n} rows, found {r}"),
            });
        }
        rows.push(parse_reals(l, ln)?);
    }
    let space = crate::metric::validate_metric(&rows)?;
    let mut measure = None;
    if let Some((ln, l)) = lines.next() {
        let rest = l.strip_prefix("measure:").ok_or(Error::Parse {
            line: ln,
            msg: "expected `measure:`".into(),
        })?;
        let mut masses = parse_reals(rest, ln)?;
        for (ln, l) in lines {
            masses.extend(parse_reals(l, ln)?);
        }
        if masses.len() != n {
            return Err(Error::Parse {
                line: ln,
                msg: format!("expected {n} masses, found {}", masses.len()),
            });
        }
        MetricMeasureSpace::new(space.clone(), masses.clone())?;
        measure = Some(masses);
    }
    Ok(SpaceFile { space, measure })
}

/// Writes a space file, with a measure line when `measure` is given.
pub fn write_space(space: &FiniteMetricSpace, measure: Option<&[f64]>) -> String {
    let mut out = format!("{}\n", space.len());
    for row in space.rows() {
        let cells: Vec<String> = row.iter().map(|&v| fmt_real(v)).collect();
        out.push_str(&cells.join(" "));
        out.push('\n');
    }
    if let Some(m) = measure {
        let cells: Vec<String> = m.iter().map(|&v| fmt_real(v)).collect();
        let _ = writeln!(out, "measure: {}", cells.join(" "));
    }
    out
}

pub fn write_mm_space(x: &MetricMeasureSpace) -> String {
    write_space(x.space(), Some(x.mass()))
}

pub fn read_space_file(path: &Path) -> Result<SpaceFile> {
    parse_space(&std::fs::read_to_string(path)?)
}

/// Parses a partition of `0..n`: one block per line.
pub fn parse_partition(text: &str, n: usize) -> Result<Partition> {
    let mut blocks = Vec::new();
    for (ln, l) in content_lines(text) {
        blocks.push(
            l.split_whitespace()
                .map(|t| parse_num(t, ln))
                .collect::<Result<Vec<usize>>>()?,
        );
    }
    Partition::new(blocks, n)
}

pub fn write_partition(part: &Partition) -> String {
    let mut out = String::new();
    for b in part.blocks() {
        let cells: Vec<String> = b.iter().map(usize::to_string).collect();
        out.push_str(&cells.join(" "));
        out.push('\n');
    }
    out
}

/// Parses a mass list: whitespace-separated reals over any number of lines.
pub fn parse_masses(text: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for (ln, l) in content_lines(text) {
        out.extend(parse_reals(l, ln)?);
    }
    Ok(out)
}

/// Parses `i j` pairs into a correspondence between `0..n` and `0..m`.
pub fn parse_correspondence(text: &str, n: usize, m: usize) -> Result<Correspondence> {
    let mut pairs = Vec::new();
    for (ln, l) in content_lines(text) {
        let t: Vec<&str> = l.split_whitespace().collect();
        if t.len() != 2 {
            return Err(Error::Parse {
                line: ln,
                msg: "expected `i j`".into(),
            });
        }
        pairs.push((parse_num(t[0], ln)?, parse_num(t[1], ln)?));
    }
    Correspondence::new(pairs, n, m)
}

pub fn write_correspondence(r: &Correspondence) -> String {
    r.pairs()
        .iter()
        .map(|(i, j)| format!("{i} {j}\n"))
        .collect()
}

/// Parses sparse `i j mass` triplets into an `n × m` plan with marginals
/// `mu` and `nu`.
pub fn parse_plan(text: &str, mu: &[f64], nu: &[f64]) -> Result<MeasureCoupling> {
    let (n, m) = (mu.len(), nu.len());
    let mut rows = vec![vec![0.0; m]; n];
    for (ln, l) in content_lines(text) {
        let t: Vec<&str> = l.split_whitespace().collect();
        if t.len() != 3 {
            return Err(Error::Parse {
                line: ln,
                msg: "expected `i j mass`".into(),
            });
        }
        let (i, j): (usize, usize) = (parse_num(t[0], ln)?, parse_num(t[1], ln)?);
        if i >= n || j >= m {
            return Err(Error::Parse {
                line: ln,
                msg: format!("index ({i}, {j}) outside {n}x{m}"),
            });
        }
        rows[i][j] += parse_num::<f64>(t[2], ln)?;
    }
    MeasureCoupling::new(rows, mu, nu)
}

/// Writes the support of a plan as `i j mass` triplets.
pub fn write_plan(plan: &MeasureCoupling) -> String {
    plan.support()
        .into_iter()
        .filter(|&(_, _, w)| w > SUPPORT_TOL)
        .map(|(i, j, w)| format!("{i} {j} {}\n", fmt_real(w)))
        .collect()
}

/// Writes the cross distances of a metric coupling as `i j distance` triplets.
pub fn write_metric_coupling(d: &MetricCoupling) -> String {
    let (n, m) = d.sizes();
    let mut out = String::new();
    for i in 0..n {
        for j in 0..m {
            let _ = writeln!(out, "{i} {j} {}", fmt_real(d.d(i, j)));
        }
    }
    out
}

/// Parses `i j distance` triplets (every pair listed) into a metric coupling.
pub fn parse_metric_coupling(
    text: &str,
    x: &FiniteMetricSpace,
    y: &FiniteMetricSpace,
) -> Result<MetricCoupling> {
    let (n, m) = (x.len(), y.len());
    let mut rows = vec![vec![f64::NAN; m]; n];
    for (ln, l) in content_lines(text) {
        let t: Vec<&str> = l.split_whitespace().collect();
        if t.len() != 3 {
            return Err(Error::Parse {
                line: ln,
                msg: "expected `i j distance`".into(),
            });
        }
        let (i, j): (usize, usize) = (parse_num(t[0], ln)?, parse_num(t[1], ln)?);
        if i >= n || j >= m {
            return Err(Error::Parse {
                line: ln,
                msg: format!("index ({i}, {j}) outside {n}x{m}"),
            });
        }
        rows[i][j] = parse_num(t[2], ln)?;
    }
    if rows.iter().flatten().any(|v| v.is_nan()) {
        return Err(Error::InvalidCoupling(
            "every cross distance must be listed".into(),
        ));
    }
    MetricCoupling::new(rows, x, y)
}

/// `bounds: lower upper method`.
pub fn write_bounds(lower: f64, upper: f64, method: &str) -> String {
    format!("bounds: {} {} {method}\n", fmt_real(lower), fmt_real(upper))
}

/// Parses a `bounds:` line into `(lower, upper, method)`.
pub fn parse_bounds(text: &str) -> Result<(f64, f64, String)> {
    for (ln, l) in content_lines(text) {
        if let Some(rest) = l.strip_prefix("bounds:") {
            let t: Vec<&str> = rest.split_whitespace().collect();
            if t.len() != 3 {
                return Err(Error::Parse {
                    line: ln,
                    msg: "expected `bounds: lower upper method`".into(),
                });
            }
            return Ok((parse_num(t[0], ln)?, parse_num(t[1], ln)?, t[2].to_string()));
        }
    }
    Err(Error::Parse {
        line: 1,
        msg: "no `bounds:` line".into(),
    })
}

/// Serialized sketch: the model space file, the relation file and the bounds
/// line. The relation file starts with its kind (`correspondence`,
/// `metric-coupling`, `plan` or `sturm`); a Sturm relation lists the cross
/// distances, then `plan`, then the plan triplets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SketchFiles {
    pub model: String,
    pub relation: String,
    pub bounds: String,
}

pub fn write_sketch(s: &SketchResult) -> SketchFiles {
    let model = match &s.model {
        SketchModel::Metric(m) => write_space(m, None),
        SketchModel::Measure(m) => write_mm_space(m),
    };
    let relation = match &s.relation {
        SketchRelation::Correspondence(r) => format!("correspondence\n{}", write_correspondence(r)),
        SketchRelation::Coupling(d) => format!("metric-coupling\n{}", write_metric_coupling(d)),
        SketchRelation::Plan(p) => format!("plan\n{}", write_plan(p)),
        SketchRelation::Sturm(sp) => format!(
            "sturm\n{}plan\n{}",
            write_metric_coupling(&sp.d),
            write_plan(&sp.plan)
        ),
    };
    SketchFiles {
        model,
        relation,
        bounds: write_bounds(s.lower, s.upper, &s.method.to_string()),
    }
}

/// Parses a set-cover instance: `n m k`, then `m` lines of element indices.
pub fn parse_setcover(text: &str) -> Result<SetCoverInstance> {
    let mut lines = content_lines(text);
    let (l0, head) = lines.next().ok_or(Error::Parse {
        line: 1,
        msg: "empty file".into(),
    })?;
    let h: Vec<usize> = head
        .split_whitespace()
        .map(|t| parse_num(t, l0))
        .collect::<Result<_>>()?;
    let [n, m, k] = h[..] else {
        return Err(Error::Parse {
            line: l0,
            msg: "expected `n m k`".into(),
        });
    };
    let mut subsets = Vec::with_capacity(m);
    for (ln, l) in lines {
        subsets.push(
            l.split_whitespace()
                .map(|t| parse_num(t, ln))
                .collect::<Result<Vec<usize>>>()?,
        );
    }
    if subsets.len() != m {
        return Err(Error::Parse {
            line: l0,
            msg: format!("expected {m} subsets, found {}", subsets.len()),
        });
    }
    SetCoverInstance::new(n, subsets, k)
}

pub fn write_setcover(inst: &SetCoverInstance) -> String {
    let mut out = format!(
        "{} {} {}\n",
        inst.universe(),
        inst.subsets().len(),
        inst.k()
    );
    for s in inst.subsets() {
        let cells: Vec<String> = s.iter().map(usize::to_string).collect();
        out.push_str(&cells.join(" "));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{gen_delta, random_mm_space};

    #[test]
    fn space_round_trip_is_exact() {
        let x = random_mm_space(7, 11);
        let f = parse_space(&write_mm_space(&x)).unwrap();
        assert_eq!(f.space, *x.space());
        assert_eq!(f.measure.as_deref(), Some(x.mass()));
    }

    #[test]
    fn space_errors_name_the_problem() {
        let bad = "3\n0 1 5\n1 0 1\n5 1 0\n";
        assert_eq!(parse_space(bad).unwrap_err().name(), "TriangleViolation");
        let short = "3\n0 1 1\n1 0 1\n";
        assert!(matches!(
            parse_space(short).unwrap_err(),
            Error::Parse { line: 4, .. }
        ));
        let junk = "2\n0 x\n1 0\n";
        assert!(matches!(
            parse_space(junk).unwrap_err(),
            Error::Parse { line: 2, .. }
        ));
        let f = parse_space("2\n0 1\n1 0\n").unwrap();
        assert_eq!(f.require_measure().unwrap_err().name(), "MeasureRequired");
        let mass = parse_space("2\n0 1\n1 0\nmeasure: 0.25\n0.75\n").unwrap();
        assert_eq!(mass.measure, Some(vec![0.25, 0.75]));
    }

    #[test]
    fn partition_and_plan_round_trip() {
        let p = Partition::new(vec![vec![3, 0], vec![1], vec![2, 4]], 5).unwrap();
        assert_eq!(parse_partition(&write_partition(&p), 5).unwrap(), p);
        let d = gen_delta(3).unwrap();
        let plan = MeasureCoupling::product(d.mass(), d.mass());
        let back = parse_plan(&write_plan(&plan), d.mass(), d.mass()).unwrap();
        assert_eq!(back.rows(), plan.rows());
    }

    #[test]
    fn setcover_round_trip() {
        let inst = SetCoverInstance::new(3, vec![vec![0, 1], vec![1, 2]], 2).unwrap();
        let back = parse_setcover(&write_setcover(&inst)).unwrap();
        assert_eq!(back.subsets(), inst.subsets());
        assert_eq!(
            parse_bounds(&write_bounds(0.25, 0.5, "exact-duality")).unwrap(),
            (0.25, 0.5, "exact-duality".into())
        );
    }
}
