use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use mmsketch::experiments::{
    bench, rows_to_json, rows_to_tsv, run_manifest, run_operation, run_shatter, thread_pool,
    verify_duality, Budgets, ExperimentManifest, Generator, Operation, ReportRow, ShatterObjective,
};
use mmsketch::io::{
    parse_masses, read_space_file, write_correspondence, write_partition, write_plan, write_sketch,
    write_space,
};
use mmsketch::sketching::{
    fps_sketch_4approx, sketch_k_2approx, sketch_k_exact, sketch_sturm_fp_approx,
    weak_sketch_upper, ShatterSolver,
};
use mmsketch::{wasserstein, Error, Exponent, Result};

#[derive(Parser)]
#[command(
    name = "mmsketch",
    version,
    about = "Sketch and cluster finite metric (measure) spaces"
)]
struct Cli {
    /// Print report rows as JSON instead of TSV.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct BudgetArgs {
    /// Cap on partitions (or search nodes) visited by exact clustering.
    #[arg(long, default_value_t = mmsketch::clustering::DEFAULT_MAX_PARTITIONS)]
    max_partitions: u64,
    /// Cap on search nodes visited by the Gromov–Hausdorff oracle.
    #[arg(long, default_value_t = mmsketch::correspondence::DEFAULT_GH_BUDGET)]
    max_maps: u64,
}

impl From<BudgetArgs> for Budgets {
    fn from(b: BudgetArgs) -> Self {
        Budgets {
            max_partitions: b.max_partitions,
            max_maps: b.max_maps,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Check a space file; prints the error name on failure.
    Validate {
        path: PathBuf,
        /// Also require a `measure:` line.
        #[arg(long)]
        require_measure: bool,
    },
    /// Optimal clustering value.
    Shatter {
        #[arg(long)]
        space: PathBuf,
        #[arg(long)]
        k: usize,
        /// maxdiam, phi, rad, ultrametric, phibar or transform.
        #[arg(long)]
        objective: Option<String>,
        #[arg(long)]
        p: Option<Exponent>,
        #[arg(long)]
        q: Option<Exponent>,
        /// Write the optimal partition here.
        #[arg(long)]
        partition_out: Option<PathBuf>,
        #[command(flatten)]
        budgets: BudgetArgs,
    },
    /// k-point sketch with certified bounds.
    Sketch {
        #[arg(long)]
        space: PathBuf,
        #[arg(long)]
        k: usize,
        /// exact, 2approx, fps, sturm or weak.
        #[arg(long, default_value = "exact")]
        method: String,
        #[arg(long)]
        p: Option<Exponent>,
        /// Swap size for local search.
        #[arg(long, default_value_t = 1)]
        t: usize,
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
        /// First point of farthest point sampling.
        #[arg(long, default_value_t = 0)]
        start: usize,
        /// Write model.txt, relation.txt and bounds.txt here.
        #[arg(long)]
        out_dir: Option<PathBuf>,
        #[command(flatten)]
        budgets: BudgetArgs,
    },
    /// Gromov–Hausdorff distance between two spaces.
    Gh {
        #[arg(long)]
        x: PathBuf,
        #[arg(long)]
        y: PathBuf,
        /// Write the optimal correspondence here.
        #[arg(long)]
        witness_out: Option<PathBuf>,
        #[command(flatten)]
        budgets: BudgetArgs,
    },
    /// p-Wasserstein distance between two measures on one space.
    Wasserstein {
        #[arg(long)]
        space: PathBuf,
        /// File of masses.
        #[arg(long)]
        mu: PathBuf,
        #[arg(long)]
        nu: PathBuf,
        #[arg(long, default_value = "1")]
        p: Exponent,
        /// Write the optimal plan here as `i j mass` triplets.
        #[arg(long)]
        plan_out: Option<PathBuf>,
    },
    /// Check GH(X, Hausdorff map of an optimal partition) = Shatter_k / 2 on random spaces.
    VerifyDuality {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long)]
        seed: u64,
        #[command(flatten)]
        budgets: BudgetArgs,
    },
    /// Write a generated instance as a space file.
    Gen {
        /// delta, circle, grid, sphere, ynk, tree-x, tree-y, euclid-x,
        /// euclid-y, random, random-mm or setcover.
        family: String,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Set-cover instance file for the setcover family.
        #[arg(long)]
        input: Option<PathBuf>,
        /// Output file (stdout when absent).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Time the exact solvers on a family at several sizes.
    Bench {
        #[arg(long, default_value = "random")]
        family: String,
        #[arg(long, value_delimiter = ',', default_value = "6,8,10")]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long)]
        seed: u64,
    },
    /// Run a manifest of expected values; fails if any row misses.
    RunManifest { path: PathBuf },
}

/// Exit codes: 0 ok, 1 check failure, 2 usage, 3 budget.
fn exit_for(e: &Error) -> u8 {
    match e {
        Error::FlagConflict(_) | Error::InvalidParameter(_) => 2,
        Error::BudgetExceeded(_) => 3,
        _ => 1,
    }
}

fn rows_exit(rows: &[ReportRow]) -> u8 {
    if rows.iter().any(|r| r.status == "BudgetExceeded") {
        3
    } else if rows.iter().all(ReportRow::is_ok) {
        0
    } else {
        1
    }
}

fn emit(rows: &[ReportRow], json: bool) {
    if json {
        println!("{}", rows_to_json(rows));
    } else {
        print!("{}", rows_to_tsv(rows));
    }
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text)?;
    Ok(())
}

fn file_instance(path: &Path) -> Generator {
    Generator::File {
        path: path.to_path_buf(),
    }
}

fn run(cli: Cli) -> Result<u8> {
    let json = cli.json;
    match cli.command {
        Command::Validate {
            path,
            require_measure,
        } => {
            let f = read_space_file(&path)?;
            if require_measure {
                f.require_measure()?;
            }
            println!(
                "ok: {} points{}",
                f.space.len(),
                if f.measure.is_some() {
                    " with measure"
                } else {
                    ""
                }
            );
            Ok(0)
        }
        Command::Shatter {
            space,
            k,
            objective,
            p,
            q,
            partition_out,
            budgets,
        } => {
            let objective = ShatterObjective::from_flags(objective.as_deref(), p, q)?;
            if let Some(out) = partition_out {
                let (res, _) =
                    run_shatter(&read_space_file(&space)?, k, objective, budgets.into())?;
                write_file(&out, &write_partition(&res.partition))?;
            }
            let row = run_operation(
                &file_instance(&space),
                &Operation::Shatter { k, objective },
                budgets.into(),
            )?;
            emit(std::slice::from_ref(&row), json);
            Ok(rows_exit(&[row]))
        }
        Command::Sketch {
            space,
            k,
            method,
            p,
            t,
            epsilon,
            start,
            out_dir,
            budgets,
        } => {
            let begin = Instant::now();
            let f = read_space_file(&space)?;
            let metric_only = |p: Option<Exponent>| match p {
                Some(_) => Err(Error::FlagConflict(format!(
                    "method {method} does not take --p"
                ))),
                None => Ok(()),
            };
            let s = match method.as_str() {
                "exact" => {
                    metric_only(p)?;
                    sketch_k_exact(
                        &f.space,
                        k,
                        ShatterSolver::Brute {
                            max_partitions: budgets.max_partitions,
                        },
                    )?
                }
                "2approx" => {
                    metric_only(p)?;
                    sketch_k_2approx(&f.space, k)?
                }
                "fps" => {
                    metric_only(p)?;
                    fps_sketch_4approx(&f.space, k, start)?
                }
                "sturm" => sketch_sturm_fp_approx(
                    &f.require_measure()?,
                    k,
                    p.unwrap_or(Exponent::ONE),
                    t,
                    epsilon,
                )?,
                "weak" => weak_sketch_upper(&f.require_measure()?, k, p.unwrap_or(Exponent::ONE))?,
                other => {
                    return Err(Error::InvalidParameter(format!(
                        "unknown sketch method {other:?}"
                    )))
                }
            };
            if let Some(dir) = out_dir {
                std::fs::create_dir_all(&dir)?;
                let files = write_sketch(&s);
                write_file(&dir.join("model.txt"), &files.model)?;
                write_file(&dir.join("relation.txt"), &files.relation)?;
                write_file(&dir.join("bounds.txt"), &files.bounds)?;
            }
            let row = ReportRow {
                instance: space.display().to_string(),
                k: Some(k),
                p: p.map(|e| e.to_string()),
                q: None,
                value: s.upper,
                lower: s.lower,
                upper: s.upper,
                method: s.method.to_string(),
                seconds: begin.elapsed().as_secs_f64(),
                status: s.status.to_string(),
            };
            emit(std::slice::from_ref(&row), json);
            Ok(rows_exit(&[row]))
        }
        Command::Gh {
            x,
            y,
            witness_out,
            budgets,
        } => {
            if let Some(out) = witness_out {
                let (fx, fy) = (read_space_file(&x)?, read_space_file(&y)?);
                let g = mmsketch::gh_oracle(&fx.space, &fy.space, budgets.max_maps)?;
                write_file(&out, &write_correspondence(&g.witness))?;
            }
            let op = Operation::Gh {
                other: file_instance(&y),
            };
            let row = run_operation(&file_instance(&x), &op, budgets.into())?;
            emit(std::slice::from_ref(&row), json);
            Ok(rows_exit(&[row]))
        }
        Command::Wasserstein {
            space,
            mu,
            nu,
            p,
            plan_out,
        } => {
            let begin = Instant::now();
            let f = read_space_file(&space)?;
            let a = parse_masses(&std::fs::read_to_string(&mu)?)?;
            let b = parse_masses(&std::fs::read_to_string(&nu)?)?;
            let (v, plan) = wasserstein(&f.space, &a, &b, p)?;
            if let Some(out) = plan_out {
                write_file(&out, &write_plan(&plan))?;
            }
            let method = if p.is_infinite() {
                "threshold-max-flow"
            } else {
                "min-cost-flow"
            };
            let row = ReportRow {
                instance: space.display().to_string(),
                k: None,
                p: Some(p.to_string()),
                q: None,
                value: v,
                lower: v,
                upper: v,
                method: method.into(),
                seconds: begin.elapsed().as_secs_f64(),
                status: "OK".into(),
            };
            emit(std::slice::from_ref(&row), json);
            Ok(0)
        }
        Command::VerifyDuality {
            n,
            k,
            trials,
            seed,
            budgets,
        } => {
            let rows =
                thread_pool()?.install(|| verify_duality(n, k, trials, seed, budgets.into()))?;
            emit(&rows, json);
            Ok(rows_exit(&rows))
        }
        Command::Gen {
            family,
            m,
            n,
            k,
            dim,
            seed,
            input,
            out,
        } => {
            let need = |v: Option<usize>, flag: &str| {
                v.ok_or_else(|| Error::InvalidParameter(format!("{family} needs --{flag}")))
            };
            let need_seed =
                || seed.ok_or_else(|| Error::InvalidParameter(format!("{family} needs --seed")));
            let gen = match family.as_str() {
                "delta" => Generator::Delta { m: need(m, "m")? },
                "circle" => Generator::Circle { n: need(n, "n")? },
                "grid" => Generator::Grid { n: need(n, "n")? },
                "sphere" => Generator::Sphere {
                    dim: need(dim, "dim")?,
                    n: need(n, "n")?,
                    seed: need_seed()?,
                },
                "ynk" => Generator::Ynk {
                    n: need(n, "n")?,
                    k: need(k, "k")?,
                },
                "tree-x" => Generator::TreeX { m: need(m, "m")? },
                "tree-y" => Generator::TreeY { m: need(m, "m")? },
                "euclid-x" => Generator::EuclidX { m: need(m, "m")? },
                "euclid-y" => Generator::EuclidY { m: need(m, "m")? },
                "random" => Generator::Random {
                    n: need(n, "n")?,
                    seed: need_seed()?,
                },
                "random-mm" => Generator::RandomMm {
                    n: need(n, "n")?,
                    seed: need_seed()?,
                },
                "setcover" => Generator::SetCover {
                    path: input
                        .ok_or_else(|| Error::InvalidParameter("setcover needs --input".into()))?,
                },
                other => return Err(Error::InvalidParameter(format!("unknown family {other:?}"))),
            };
            let f = gen.build()?;
            let text = write_space(&f.space, f.measure.as_deref());
            match out {
                Some(path) => write_file(&path, &text)?,
                None => print!("{text}"),
            }
            Ok(0)
        }
        Command::Bench {
            family,
            sizes,
            k,
            seed,
        } => {
            let rows = bench(&family, &sizes, k, seed)?;
            emit(&rows, json);
            Ok(rows_exit(&rows))
        }
        Command::RunManifest { path } => {
            let manifest = ExperimentManifest::load(&path)?;
            let outcomes =
                thread_pool()?.install(|| run_manifest(&manifest, Budgets::default()))?;
            let rows: Vec<ReportRow> = outcomes.iter().map(|o| o.row.clone()).collect();
            emit(&rows, json);
            let failed: Vec<&str> = outcomes
                .iter()
                .filter(|o| !o.passed)
                .map(|o| o.name.as_str())
                .collect();
            eprintln!(
                "{}: {} rows, {} failed",
                manifest.name,
                outcomes.len(),
                failed.len()
            );
            for name in &failed {
                eprintln!("FAIL {name}");
            }
            Ok(if failed.is_empty() {
                0
            } else if rows_exit(&rows) == 3 {
                3
            } else {
                1
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_for(&e))
        }
    }
}
