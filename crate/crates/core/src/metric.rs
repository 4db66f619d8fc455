//! Finite metric spaces, metric measure spaces and the basic geometric
//! functionals on their subsets.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Relative tolerance for the triangle inequality (scaled by the largest entry).
pub const TRIANGLE_TOL: f64 = 1e-9;
/// Absolute tolerance on the total mass of a probability vector.
pub const MASS_TOL: f64 = 1e-9;

/// An exponent `p` in `[1, ∞]`. The infinite case is its own variant and is
/// never approximated by a large finite value.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Exponent {
    Finite(f64),
    Infinite,
}

impl Exponent {
    pub const ONE: Exponent = Exponent::Finite(1.0);
    pub const TWO: Exponent = Exponent::Finite(2.0);

    pub fn finite(p: f64) -> Result<Self> {
        if p.is_finite() && p >= 1.0 {
            Ok(Exponent::Finite(p))
        } else if p == f64::INFINITY {
            Ok(Exponent::Infinite)
        } else {
            Err(Error::InvalidParameter(format!(
                "exponent must lie in [1, inf], got {p}"
            )))
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Exponent::Infinite)
    }

    /// The exponent as a float (`f64::INFINITY` for the infinite variant).
    pub fn value(self) -> f64 {
        match self {
            Exponent::Finite(p) => p,
            Exponent::Infinite => f64::INFINITY,
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(p) => write!(f, "{p}"),
            Exponent::Infinite => f.write_str("inf"),
        }
    }
}

impl FromStr for Exponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "Inf" | "infinity" | "∞" => Ok(Exponent::Infinite),
            t => {
                let p: f64 = t
                    .parse()
                    .map_err(|_| Error::InvalidParameter(format!("not an exponent: {t:?}")))?;
                Exponent::finite(p)
            }
        }
    }
}

/// A finite metric space given by its full distance matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteMetricSpace {
    n: usize,
    dist: Vec<f64>,
    labels: Vec<String>,
}

/// Validate a square matrix as a metric and wrap it.
///
/// Checks run in a fixed order (shape, diagonal, sign, symmetry, positivity,
/// triangle inequality) so that the first violation reported is deterministic.
pub fn validate_metric(matrix: &[Vec<f64>]) -> Result<FiniteMetricSpace> {
    let n = matrix.len();
    if n == 0 {
        return Err(Error::EmptySpace);
    }
    for (row, r) in matrix.iter().enumerate() {
        if r.len() != n {
            return Err(Error::NotSquare {
                row,
                len: r.len(),
                n,
            });
        }
    }
    let dist: Vec<f64> = matrix.iter().flat_map(|r| r.iter().copied()).collect();
    check_metric(n, &dist)?;
    Ok(FiniteMetricSpace::from_trusted(n, dist))
}

fn check_metric(n: usize, dist: &[f64]) -> Result<()> {
    let at = |i: usize, j: usize| dist[i * n + j];
    for i in 0..n {
        for j in 0..n {
            let v = at(i, j);
            if !v.is_finite() {
                return Err(Error::NonFiniteDistance { i, j, value: v });
            }
        }
    }
    for i in 0..n {
        if at(i, i) != 0.0 {
            return Err(Error::NonzeroDiagonal { i, value: at(i, i) });
        }
    }
    for i in 0..n {
        for j in 0..n {
            if at(i, j) < 0.0 {
                return Err(Error::NegativeDistance {
                    i,
                    j,
                    value: at(i, j),
                });
            }
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if at(i, j) != at(j, i) {
                return Err(Error::AsymmetricMatrix {
                    i,
                    j,
                    a: at(i, j),
                    b: at(j, i),
                });
            }
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if at(i, j) == 0.0 {
                return Err(Error::ZeroOffDiagonal { i, j });
            }
        }
    }
    check_triangle(n, dist)
}

pub(crate) fn check_triangle(n: usize, dist: &[f64]) -> Result<()> {
    let max = dist.iter().copied().fold(0.0, f64::max);
    let tol = TRIANGLE_TOL * max;
    for i in 0..n {
        for j in (i + 1)..n {
            let dij = dist[i * n + j];
            for k in 0..n {
                if dij > dist[i * n + k] + dist[k * n + j] + tol {
                    return Err(Error::TriangleViolation { i, j, k });
                }
            }
        }
    }
    Ok(())
}

impl FiniteMetricSpace {
    /// Validating constructor from rows.
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        validate_metric(&rows)
    }

    /// Validating constructor from a row-major `n × n` buffer.
    pub fn from_flat(n: usize, dist: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptySpace);
        }
        if dist.len() != n * n {
            return Err(Error::NotSquare {
                row: 0,
                len: dist.len(),
                n: n * n,
            });
        }
        check_metric(n, &dist)?;
        Ok(Self::from_trusted(n, dist))
    }

    /// Builds a space whose metric axioms hold by construction (generators,
    /// restrictions, shortest-path closures). Skips the cubic triangle check.
    pub(crate) fn from_trusted(n: usize, dist: Vec<f64>) -> Self {
        debug_assert_eq!(dist.len(), n * n);
        let labels = (0..n).map(|i| i.to_string()).collect();
        Self { n, dist, labels }
    }

    /// Builds a space from a symmetric distance function.
    pub(crate) fn from_fn(n: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut dist = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let v = f(i, j);
                dist[i * n + j] = v;
                dist[j * n + i] = v;
            }
        }
        Self::from_trusted(n, dist)
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.n {
            return Err(Error::InvalidParameter(format!(
                "{} labels for {} points",
                labels.len(),
                self.n
            )));
        }
        self.labels = labels;
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn d(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.dist[i * self.n..(i + 1) * self.n]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|i| self.row(i).to_vec()).collect()
    }

    pub(crate) fn flat(&self) -> &[f64] {
        &self.dist
    }

    /// Diameter of the whole space.
    pub fn diam(&self) -> f64 {
        self.dist.iter().copied().fold(0.0, f64::max)
    }

    /// The metric restricted to `indices` (in the given order).
    pub fn subspace(&self, indices: &[usize]) -> FiniteMetricSpace {
        let k = indices.len();
        let mut out = Self::from_fn(k, |a, b| self.d(indices[a], indices[b]));
        out.labels = indices.iter().map(|&i| self.labels[i].clone()).collect();
        out
    }

    /// Multiply every distance by `lambda > 0`.
    pub fn scaled(&self, lambda: f64) -> FiniteMetricSpace {
        let mut out = self.clone();
        out.dist.iter_mut().for_each(|v| *v *= lambda);
        out
    }

    /// Sorted distinct off-diagonal distances.
    pub fn distinct_distances(&self) -> Vec<f64> {
        let mut v: Vec<f64> = (0..self.n)
            .flat_map(|i| ((i + 1)..self.n).map(move |j| (i, j)))
            .map(|(i, j)| self.d(i, j))
            .collect();
        v.sort_by(f64::total_cmp);
        v.dedup();
        v
    }
}

/// A finite metric space with a fully supported probability measure.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricMeasureSpace {
    space: FiniteMetricSpace,
    mass: Vec<f64>,
}

impl MetricMeasureSpace {
    pub fn new(space: FiniteMetricSpace, mass: Vec<f64>) -> Result<Self> {
        if mass.len() != space.len() {
            return Err(Error::InvalidMeasure(format!(
                "{} masses for {} points",
                mass.len(),
                space.len()
            )));
        }
        if let Some(i) = mass.iter().position(|&m| !(m > 0.0 && m.is_finite())) {
            return Err(Error::InvalidMeasure(format!(
                "mass of point {i} is {}, full support requires positive mass",
                mass[i]
            )));
        }
        let total: f64 = mass.iter().sum();
        if (total - 1.0).abs() > MASS_TOL {
            return Err(Error::InvalidMeasure(format!(
                "masses sum to {total}, not 1"
            )));
        }
        Ok(Self { space, mass })
    }

    pub fn uniform(space: FiniteMetricSpace) -> Self {
        let n = space.len();
        Self {
            mass: vec![1.0 / n as f64; n],
            space,
        }
    }

    pub fn space(&self) -> &FiniteMetricSpace {
        &self.space
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn len(&self) -> usize {
        self.space.len()
    }

    pub fn is_empty(&self) -> bool {
        self.space.is_empty()
    }

    #[inline]
    pub fn d(&self, i: usize, j: usize) -> f64 {
        self.space.d(i, j)
    }

    pub fn mass_of(&self, block: &[usize]) -> f64 {
        block.iter().map(|&i| self.mass[i]).sum()
    }

    /// Normalized restriction of the measure to `block`, as a full-length vector.
    pub fn conditional(&self, block: &[usize]) -> Vec<f64> {
        let total = self.mass_of(block);
        let mut v = vec![0.0; self.len()];
        for &i in block {
            v[i] = self.mass[i] / total;
        }
        v
    }
}

impl From<FiniteMetricSpace> for MetricMeasureSpace {
    fn from(space: FiniteMetricSpace) -> Self {
        MetricMeasureSpace::uniform(space)
    }
}

/// A nonempty set of point indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subset(Vec<usize>);

impl Subset {
    pub fn new(mut indices: Vec<usize>, n: usize) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::InvalidSubset("subset is empty".into()));
        }
        indices.sort_unstable();
        indices.dedup();
        if let Some(&bad) = indices.iter().find(|&&i| i >= n) {
            return Err(Error::InvalidSubset(format!(
                "index {bad} out of range for {n} points"
            )));
        }
        Ok(Subset(indices))
    }

    pub fn all(n: usize) -> Self {
        Subset((0..n).collect())
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }
}

impl std::ops::Deref for Subset {
    type Target = [usize];
    fn deref(&self) -> &[usize] {
        &self.0
    }
}

/// A partition of `0..n` into nonempty, pairwise disjoint blocks.
///
/// Block order is significant: Voronoi partitions keep block `i` aligned with
/// center `i`. Indices inside a block are kept sorted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    n: usize,
    blocks: Vec<Vec<usize>>,
}

impl Partition {
    pub fn new(mut blocks: Vec<Vec<usize>>, n: usize) -> Result<Self> {
        let mut seen = vec![false; n];
        for (b, block) in blocks.iter_mut().enumerate() {
            if block.is_empty() {
                return Err(Error::InvalidPartition(format!("block {b} is empty")));
            }
            block.sort_unstable();
            for &i in block.iter() {
                if i >= n {
                    return Err(Error::InvalidPartition(format!("index {i} out of range")));
                }
                if seen[i] {
                    return Err(Error::InvalidPartition(format!("point {i} appears twice")));
                }
                seen[i] = true;
            }
        }
        if let Some(i) = seen.iter().position(|&s| !s) {
            return Err(Error::InvalidPartition(format!("point {i} is not covered")));
        }
        Ok(Self { n, blocks })
    }

    /// Builds a partition from a block label per point; blocks are numbered by
    /// first appearance.
    pub fn from_assignment(assign: &[usize]) -> Self {
        let mut relabel = std::collections::HashMap::new();
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        for (i, &a) in assign.iter().enumerate() {
            let b = *relabel.entry(a).or_insert_with(|| {
                blocks.push(Vec::new());
                blocks.len() - 1
            });
            blocks[b].push(i);
        }
        Self {
            n: assign.len(),
            blocks,
        }
    }

    pub fn singletons(n: usize) -> Self {
        Self {
            n,
            blocks: (0..n).map(|i| vec![i]).collect(),
        }
    }

    pub fn whole(n: usize) -> Self {
        Self {
            n,
            blocks: vec![(0..n).collect()],
        }
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    /// Number of blocks.
    pub fn k(&self) -> usize {
        self.blocks.len()
    }

    /// Number of points of the underlying space.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Block index of every point.
    pub fn assignment(&self) -> Vec<usize> {
        let mut a = vec![0; self.n];
        for (b, block) in self.blocks.iter().enumerate() {
            for &i in block {
                a[i] = b;
            }
        }
        a
    }

    /// Same partition with blocks sorted by their smallest element.
    pub fn canonical(&self) -> Partition {
        let mut blocks = self.blocks.clone();
        blocks.sort_by_key(|b| b[0]);
        Partition { n: self.n, blocks }
    }
}

/// Maximum pairwise distance within `block` (0 for singletons).
pub fn diam(x: &FiniteMetricSpace, block: &[usize]) -> f64 {
    let mut best = 0.0f64;
    for (a, &i) in block.iter().enumerate() {
        for &j in &block[a + 1..] {
            best = best.max(x.d(i, j));
        }
    }
    best
}

/// `p`-diameter of `block`: the `L^p` mean of distances under the normalized
/// restricted measure; `p = ∞` is the plain diameter.
pub fn diam_p(x: &MetricMeasureSpace, block: &[usize], p: Exponent) -> f64 {
    match p {
        Exponent::Infinite => diam(x.space(), block),
        Exponent::Finite(p) => {
            let mut s = 0.0;
            for &i in block {
                let mut row = 0.0;
                for &j in block {
                    if i != j {
                        row += x.d(i, j).powf(p) * x.mass()[j];
                    }
                }
                s += row * x.mass()[i];
            }
            let m = x.mass_of(block);
            (s / (m * m)).powf(1.0 / p)
        }
    }
}

/// `p`-radius of `block` and the first center (in block order) attaining it.
pub fn rad_p(x: &MetricMeasureSpace, block: &[usize], p: Exponent) -> (f64, usize) {
    let mut best = (f64::INFINITY, block[0]);
    let total = x.mass_of(block);
    for &a in block {
        let v = match p {
            Exponent::Infinite => block.iter().map(|&y| x.d(a, y)).fold(0.0, f64::max),
            Exponent::Finite(p) => {
                let s: f64 = block.iter().map(|&y| x.d(a, y).powf(p) * x.mass()[y]).sum();
                (s / total).powf(1.0 / p)
            }
        };
        if v < best.0 {
            best = (v, a);
        }
    }
    best
}

/// Distance from point `i` to the nearest point of `set`.
pub fn dist_to_set(x: &FiniteMetricSpace, i: usize, set: &[usize]) -> f64 {
    set.iter().map(|&j| x.d(i, j)).fold(f64::INFINITY, f64::min)
}

/// Hausdorff distance between two nonempty subsets of the same space.
pub fn hausdorff_distance(x: &FiniteMetricSpace, a: &[usize], b: &[usize]) -> f64 {
    let ab = a.iter().map(|&i| dist_to_set(x, i, b)).fold(0.0, f64::max);
    let ba = b.iter().map(|&j| dist_to_set(x, j, a)).fold(0.0, f64::max);
    ab.max(ba)
}

/// Voronoi partition with respect to the ordered center list: each point goes
/// to its nearest center, ties resolved in favour of the earliest center.
pub fn voronoi_partition(z: &FiniteMetricSpace, centers: &[usize]) -> Result<Partition> {
    if centers.is_empty() {
        return Err(Error::InvalidParameter("center list is empty".into()));
    }
    let mut sorted = centers.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidParameter(
            "center indices must be distinct".into(),
        ));
    }
    if let Some(&c) = sorted.last().filter(|&&c| c >= z.len()) {
        return Err(Error::InvalidParameter(format!("center {c} out of range")));
    }
    let mut blocks = vec![Vec::new(); centers.len()];
    for x in 0..z.len() {
        blocks[nearest(z.row(x), centers)].push(x);
    }
    Partition::new(blocks, z.len())
}

/// Position in `centers` of the nearest center according to `row`, earliest wins ties.
pub(crate) fn nearest(row: &[f64], centers: &[usize]) -> usize {
    let mut best = 0;
    for (pos, &c) in centers.iter().enumerate().skip(1) {
        if row[c] < row[centers[best]] {
            best = pos;
        }
    }
    best
}
