//! Sketching and clustering of finite metric (measure) spaces.
//!
//! The crate provides validated metric and metric-measure spaces, exact
//! small-instance oracles (Gromov–Hausdorff distance, partition enumeration,
//! optimal transport), the maps that turn partitions into k-point sketches and
//! back, approximation pipelines (farthest point sampling, t-swap local
//! search) and generators for the standard test families.

pub mod analysis;
pub mod clustering;
pub mod correspondence;
pub mod error;
pub mod experiments;
pub mod instances;
pub mod io;
pub mod metric;
pub mod sketching;
pub mod transport;

pub use clustering::{
    cost_maxdiam, cost_phi_pq, cost_rad_pq, fps, gonzalez, local_search_tswap, metric_transform_mp,
    norm_p_of_centers, shatter_bruteforce, shatter_rad, subdominant_ultrametric, CenterSet,
    Certificate, ClusteringResult, Objective, RadMode,
};
pub use correspondence::{
    canonical_coupling_dr, distortion, gh_lower_bound, gh_oracle, hausdorff_in_coupling,
    Correspondence, GhResult, MetricCoupling,
};
pub use error::{Error, Result, Status};
pub use metric::{
    diam, diam_p, hausdorff_distance, rad_p, validate_metric, voronoi_partition, Exponent,
    FiniteMetricSpace, MetricMeasureSpace, Partition, Subset,
};
pub use sketching::{
    fps_sketch_4approx, hausdorff_map, sketch_from_partition, sketch_k_2approx, sketch_k_exact,
    sketch_sturm_fp_approx, sturm_upper_from_partition, voronoi_map, wasserstein_map,
    weak_sketch_upper, ShatterSolver, SketchMethod, SketchModel, SketchRelation, SketchResult,
};
pub use transport::{
    dis_p, gw_upper_bound, sturm_cost, sturm_one_point, wasserstein, wasserstein_inf,
    wasserstein_p, CouplingFamily, MeasureCoupling, SturmPair,
};
