//! The `walsh` command line.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::counterexample::{
    build_theorem8_series, cantor_lebesgue_probe, verify_counterexample, GrowthSchedule, IndexSequence,
    VerifyConfig,
};
use crate::dyadic::{DyadicCube, DyadicPoint};
use crate::error::{Error, Result};
use crate::harness::{
    kernel_equivalence, lemma1_grid, lemma2_search, lemma4_grid, recursion_check, tk_grid, uset_falsify,
    vanishing_check, Constraints, IdentityReport, Lemma1Grid, TkGrid,
};
use crate::quasimeasure::{Parallelepiped, Quasimeasure, SupportMask};
use crate::rational::{format_rational, parse_rational};
use crate::series::{SeriesJson, SeriesSpec};
use crate::sets::{rasterize, Membership, SetSpec, Slice};
use crate::walsh::{dirichlet_closed, dirichlet_multi, walsh_eval, walsh_eval_multi, MultiIndex, WalshIndex};

#[derive(Parser, Debug)]
#[command(name = "walsh", version, about = "Exact Walsh analysis on the dyadic group")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Evaluate Walsh functions, Dirichlet kernels and partial sums
    #[command(subcommand)]
    Eval(EvalCmd),
    /// Rasterize a set description to a PGM image
    Render(RenderArgs),
    /// Build or inspect series files
    #[command(subcommand)]
    Series(SeriesCmd),
    /// Build quasimeasures from series and export or integrate them
    #[command(subcommand)]
    Qm(QmCmd),
    /// Run a verification suite and print its JSON report
    #[command(subcommand)]
    Verify(VerifyCmd),
}

#[derive(Subcommand, Debug)]
pub enum EvalCmd {
    /// W_n(g); comma-separated for several coordinates
    Walsh {
        #[arg(long)]
        n: String,
        #[arg(long)]
        g: String,
    },
    /// D_N(g); comma-separated for several coordinates
    Dirichlet {
        #[arg(long = "N")]
        n: String,
        #[arg(long)]
        g: String,
    },
    /// The cubic partial sum S_N(g) of a series file
    PartialSum {
        #[arg(long)]
        series: PathBuf,
        #[arg(long = "N")]
        n: u64,
        #[arg(long)]
        g: String,
        /// Print a floating-point value instead of p/q
        #[arg(long)]
        approx: bool,
    },
}

#[derive(Args, Debug)]
pub struct RenderArgs {
    /// Set description (JSON file, `-` for stdin)
    #[arg(long)]
    pub set: PathBuf,
    /// Rank of the cells
    #[arg(long, default_value_t = 6)]
    pub k: u32,
    /// Output PGM path
    #[arg(long)]
    pub out: PathBuf,
    /// Pixels per cell side
    #[arg(long, default_value_t = 1)]
    pub scale: usize,
    /// The two drawn coordinates
    #[arg(long, value_delimiter = ',', default_value = "0,1")]
    pub axes: Vec<usize>,
    /// Values of the remaining coordinates, as a point literal
    #[arg(long)]
    pub point: Option<String>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum SeriesKind {
    Zero,
    Constant,
    RandomSparse,
    RandomDense,
    Theorem8,
}

#[derive(Subcommand, Debug)]
pub enum SeriesCmd {
    /// Write a series file
    Build {
        #[arg(long, value_enum)]
        kind: SeriesKind,
        #[arg(long, default_value_t = 2)]
        d: usize,
        /// Coefficients are known for indices below 2^bound-rank
        #[arg(long, default_value_t = 4)]
        bound_rank: u32,
        /// Nonzero terms of a sparse series
        #[arg(long, default_value_t = 16)]
        nnz: usize,
        /// c_0 of a constant series, as p/q
        #[arg(long, default_value = "1/1")]
        value: String,
        /// Truncation depth of the counterexample series
        #[arg(long = "S", default_value_t = 4)]
        depth: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Summarize a series file
    Inspect {
        file: PathBuf,
        /// Also print the coefficient at this index
        #[arg(long, value_delimiter = ',')]
        coeff: Option<Vec<u64>>,
    },
}

#[derive(Subcommand, Debug)]
pub enum QmCmd {
    /// Export `rank,m1,...,md,value` for every cube up to a rank as CSV
    Export {
        #[arg(long)]
        series: PathBuf,
        #[arg(long)]
        rank: u32,
        /// Only this level
        #[arg(long)]
        level: Option<u32>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// ∫_Δ W_n dτ over a cube
    Integrate {
        /// Series file; needs --rank
        #[arg(long, conflicts_with = "from_csv", requires = "rank")]
        series: Option<PathBuf>,
        #[arg(long)]
        rank: Option<u32>,
        /// A quasimeasure CSV written by `qm export`
        #[arg(long, required_unless_present = "series")]
        from_csv: Option<PathBuf>,
        /// Walsh multi-index, comma-separated
        #[arg(long, value_delimiter = ',')]
        n: Vec<u64>,
        /// Cube literal `k:m1,...,md`
        #[arg(long)]
        cube: String,
    },
}

#[derive(Args, Debug, Clone)]
pub struct Output {
    /// Write the JSON report here instead of stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write per-cell CSV here
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum VerifyCmd {
    /// Closed vs naive kernels, the doubling recursion and the vanishing region
    Kernels {
        #[arg(long = "max-N", default_value_t = 256)]
        max_n: u64,
        #[arg(long, default_value_t = 8)]
        rank: u32,
        #[arg(long, default_value_t = 6)]
        max_k: u32,
        #[command(flatten)]
        output: Output,
    },
    /// The shifted-sum identity for cubic partial sums
    Lemma1 {
        /// Dimension; both 2 and 3 when omitted
        #[arg(long)]
        d: Option<usize>,
        /// Random series per grid cell
        #[arg(long, default_value_t = 50)]
        trials: usize,
        #[arg(long, default_value_t = 20)]
        points: usize,
        #[arg(long, default_value_t = 3)]
        max_l: u32,
        #[arg(long, default_value_t = 5)]
        max_k1: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: Output,
    },
    /// Orbit search in a cube with cells removed
    Lemma2 {
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long, default_value_t = 6)]
        rank: u32,
        /// Number of digit levels k_1 > ... > k_l, taken just below the rank
        #[arg(long, default_value_t = 1)]
        l: u32,
        /// Random cells removed from the whole group
        #[arg(long, default_value_t = 1)]
        remove: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: Output,
    },
    /// Walsh integrals over quasimeasures carried by Dirichlet sets
    Lemma4 {
        #[arg(long, default_value_t = 100)]
        instances: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: Output,
    },
    /// The T_k decomposition
    Tk {
        #[arg(long)]
        d: Option<usize>,
        #[arg(long, default_value_t = 4)]
        max_k: u32,
        #[arg(long, default_value_t = 2)]
        max_s: u32,
        #[arg(long, default_value_t = 20)]
        series: usize,
        #[arg(long, default_value_t = 4)]
        points: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: Output,
    },
    /// The counterexample series with growing coefficients
    Theorem8 {
        #[arg(long = "S", default_value_t = 4)]
        depth: usize,
        #[arg(long, default_value_t = 10)]
        rank: u32,
        #[arg(long = "N-max", default_value_t = 256)]
        n_max: u64,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 8)]
        origin_rank: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the growth table CSV here
        #[arg(long)]
        growth_csv: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Diagonal coefficients along probe indices
    Probes {
        /// Series file; the counterexample series when omitted
        #[arg(long)]
        series: Option<PathBuf>,
        #[arg(long = "S", default_value_t = 4)]
        depth: usize,
        /// Probe indices; powers of two below the coefficient bound when omitted
        #[arg(long, value_delimiter = ',')]
        probes: Option<Vec<u64>>,
        /// Largest number of binary ones allowed in a probe
        #[arg(long)]
        bound: Option<u32>,
        /// Fail unless every probed coefficient vanishes
        #[arg(long)]
        expect_zero: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solution space of the finite-rank uniqueness system
    Falsify {
        /// Set description (JSON file, `-` for stdin)
        #[arg(long)]
        set: PathBuf,
        #[arg(long)]
        rank: u32,
        /// Impose the Rademacher functionals for k up to this value
        #[arg(long)]
        rademacher_up_to: Option<u32>,
        /// Impose the Walsh functionals for these N
        #[arg(long, value_delimiter = ',')]
        walsh: Vec<u64>,
        #[arg(long, default_value_t = 0)]
        walsh_cube_rank: u32,
        /// Do not restrict the support to the cells of the set
        #[arg(long)]
        no_support: bool,
        #[arg(long, default_value_t = 4)]
        basis_limit: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// The command outcome: passed or a check failed.
type Verdict = bool;

fn read_input(path: &Path) -> Result<String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::Read::read_to_string(&mut std::io::stdin(), &mut s)?;
        Ok(s)
    } else {
        std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
    }
}

fn write_output(path: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, bytes).map_err(|e| Error::Io(format!("{}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)?;
            out.flush()?;
            Ok(())
        }
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn load_series(path: &Path) -> Result<SeriesSpec> {
    SeriesSpec::from_json_str(&read_input(path)?)
}

fn load_set(path: &Path) -> Result<SetSpec> {
    SetSpec::from_json_str(&read_input(path)?)
}

fn parse_list<T: std::str::FromStr<Err = Error>>(s: &str) -> Result<Vec<T>> {
    s.split(',').map(|p| p.trim().parse()).collect()
}

fn eval(cmd: &EvalCmd) -> Result<Verdict> {
    let line = match cmd {
        EvalCmd::Walsh { n, g } => {
            let ns: Vec<WalshIndex> = parse_list(n)?;
            let g: DyadicPoint = g.parse()?;
            if ns.len() == 1 && g.dim() == 1 {
                walsh_eval(&ns[0], &g.coords()[0]).to_string()
            } else {
                walsh_eval_multi(&MultiIndex(ns), &g)?.to_string()
            }
        }
        EvalCmd::Dirichlet { n, g } => {
            let ns: Vec<WalshIndex> = parse_list(n)?;
            let g: DyadicPoint = g.parse()?;
            if ns.len() == 1 && g.dim() == 1 {
                dirichlet_closed(&ns[0], &g.coords()[0])?.to_string()
            } else {
                dirichlet_multi(&MultiIndex(ns), &g)?.to_string()
            }
        }
        EvalCmd::PartialSum { series, n, g, approx } => {
            let s = load_series(series)?;
            let g: DyadicPoint = g.parse()?;
            if *approx {
                format!("{:e}", s.partial_sum_cube_approx(*n, &g)?)
            } else {
                format_rational(&s.partial_sum_cube(*n, &g)?)
            }
        }
    };
    write_output(None, format!("{line}\n").as_bytes())?;
    Ok(true)
}

fn render(a: &RenderArgs) -> Result<Verdict> {
    let set = load_set(&a.set)?;
    let d = set.dim();
    if a.axes.len() != 2 {
        return Err(Error::Parse(format!("--axes needs two coordinates, got {}", a.axes.len())));
    }
    let point = match &a.point {
        Some(p) => p.parse()?,
        None => DyadicPoint::zero(d, 1),
    };
    let slice = Slice {
        axes: [a.axes[0], a.axes[1]],
        point,
    };
    let bm = rasterize(&set, a.k, &slice)?;
    bm.write_pgm(&a.out, a.scale)?;
    let summary = json!({
        "set": set.describe(),
        "k": a.k,
        "size": bm.size(),
        "in": bm.count(Membership::In),
        "out": bm.count(Membership::Out),
        "undetermined": bm.count(Membership::Undetermined),
        "file": a.out.display().to_string(),
    });
    write_output(None, to_json(&summary).as_bytes())?;
    Ok(true)
}

fn series(cmd: &SeriesCmd) -> Result<Verdict> {
    match cmd {
        SeriesCmd::Build {
            kind,
            d,
            bound_rank,
            nnz,
            value,
            depth,
            seed,
            out,
        } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let (s, seeded) = match kind {
                SeriesKind::Zero => (SeriesSpec::zero(*d, *bound_rank), false),
                SeriesKind::Constant => (SeriesSpec::constant(*d, *bound_rank, parse_rational(value)?), false),
                SeriesKind::RandomSparse => (SeriesSpec::random_sparse(&mut rng, *d, *bound_rank, *nnz), true),
                SeriesKind::RandomDense => (SeriesSpec::random_dense(&mut rng, *d, *bound_rank), true),
                SeriesKind::Theorem8 => {
                    let idx = IndexSequence::default_instance(*depth)?;
                    (build_theorem8_series(&idx, &GrowthSchedule::default_schedule(*depth))?, false)
                }
            };
            let mut j: SeriesJson = s.to_json();
            j.seed = seeded.then_some(*seed);
            write_output(out.as_deref(), to_json(&j).as_bytes())?;
        }
        SeriesCmd::Inspect { file, coeff } => {
            let s = load_series(file)?;
            let mut v = json!({
                "d": s.dim(),
                "bound_rank": s.bound_rank(),
                "nonzero": s.nonzero_count(),
                "denominator": s.denominator().to_string(),
            });
            if let Some(n) = coeff {
                if n.len() != s.dim() {
                    return Err(Error::DimensionMismatch { expected: s.dim(), got: n.len() });
                }
                v["coefficient"] = json!(format_rational(&s.coefficient(n)));
            }
            write_output(None, to_json(&v).as_bytes())?;
        }
    }
    Ok(true)
}

fn qm(cmd: &QmCmd) -> Result<Verdict> {
    match cmd {
        QmCmd::Export { series, rank, level, out } => {
            let s = load_series(series)?;
            let tau = Quasimeasure::from_series(&s, *rank)?;
            let csv = match level {
                Some(l) if *l > *rank => return Err(Error::RankTooSmall { have: *rank, need: *l }),
                Some(l) => {
                    let prefix = format!("{l},");
                    tau.to_csv()
                        .lines()
                        .filter(|line| line.starts_with(&prefix))
                        .map(|line| format!("{line}\n"))
                        .collect()
                }
                None => tau.to_csv(),
            };
            write_output(out.as_deref(), csv.as_bytes())?;
        }
        QmCmd::Integrate {
            series,
            rank,
            from_csv,
            n,
            cube,
        } => {
            let tau = match (series, rank, from_csv) {
                (Some(s), Some(r), _) => Quasimeasure::from_series(&load_series(s)?, *r)?,
                (_, _, Some(p)) => Quasimeasure::from_csv(&read_input(p)?)?,
                _ => return Err(Error::Parse("give --series with --rank, or --from-csv".into())),
            };
            let cube: DyadicCube = cube.parse()?;
            let value = tau.integrate_walsh(&MultiIndex::from_u64s(n), &Parallelepiped::from_cube(&cube))?;
            write_output(None, format!("{}\n", format_rational(&value)).as_bytes())?;
        }
    }
    Ok(true)
}

fn emit_reports(suite: &str, seed: Option<u64>, reports: &[IdentityReport], output: &Output) -> Result<Verdict> {
    let passed = reports.iter().all(|r| r.passed);
    let envelope = json!({
        "suite": suite,
        "seed": seed,
        "passed": passed,
        "reports": reports,
    });
    write_output(output.out.as_deref(), to_json(&envelope).as_bytes())?;
    if let Some(path) = &output.csv {
        let mut csv = String::new();
        for r in reports {
            csv.push_str(&format!("# {}\n", r.identity));
            csv.push_str(&r.to_csv());
        }
        write_output(Some(path), csv.as_bytes())?;
    }
    if !passed {
        if let Some((cell, m)) = reports.iter().find_map(|r| r.first_mismatch()) {
            eprintln!("first failure in cell {cell}: {} ({} != {})", m.detail, m.lhs, m.rhs);
        }
    }
    Ok(passed)
}

fn emit_value(value: &Value, passed: bool, out: Option<&Path>) -> Result<Verdict> {
    write_output(out, to_json(value).as_bytes())?;
    Ok(passed)
}

fn verify(cmd: &VerifyCmd) -> Result<Verdict> {
    match cmd {
        VerifyCmd::Kernels {
            max_n,
            rank,
            max_k,
            output,
        } => {
            let reports = vec![
                kernel_equivalence(*max_n, *rank)?,
                recursion_check(*max_k, *rank)?,
                vanishing_check(*max_n, *rank)?,
            ];
            emit_reports("kernels", None, &reports, output)
        }
        VerifyCmd::Lemma1 {
            d,
            trials,
            points,
            max_l,
            max_k1,
            seed,
            output,
        } => {
            let grid = Lemma1Grid {
                dims: d.map_or(vec![2, 3], |d| vec![d]),
                max_l: *max_l,
                max_k1: *max_k1,
                series: *trials,
                points: *points,
                seed: *seed,
                ..Lemma1Grid::default()
            };
            emit_reports("lemma1", Some(*seed), &[lemma1_grid(&grid)?], output)
        }
        VerifyCmd::Lemma2 {
            d,
            rank,
            l,
            remove,
            seed,
            output,
        } => {
            let (d, rank) = (*d, *rank);
            if *l == 0 || *l > rank {
                return Err(Error::Malformed(format!("l = {l} must lie in 1..={rank}")));
            }
            let total = 1usize << (d as u32 * rank);
            if *remove > total {
                return Err(Error::Malformed(format!("cannot remove {remove} of {total} cells")));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let removed = rand::seq::index::sample(&mut rng, total, *remove);
            let mut cells = vec![true; total];
            for i in removed.iter() {
                cells[i] = false;
            }
            let e = SupportMask::new(d, rank, cells);
            let ks: Vec<u32> = (0..*l).map(|i| rank - 1 - i).collect();
            let outcome = lemma2_search(&e, &DyadicCube::whole(d), &ks)?;
            let passed = !outcome.hypothesis_holds || outcome.point.is_some();
            let v = json!({
                "suite": "lemma2",
                "seed": seed,
                "d": d,
                "rank": rank,
                "ks": ks,
                "removed": remove,
                "passed": passed,
                "outcome": outcome,
            });
            emit_value(&v, passed, output.out.as_deref())
        }
        VerifyCmd::Lemma4 { instances, seed, output } => {
            emit_reports("lemma4", Some(*seed), &[lemma4_grid(*instances, *seed)?], output)
        }
        VerifyCmd::Tk {
            d,
            max_k,
            max_s,
            series,
            points,
            seed,
            output,
        } => {
            let grid = TkGrid {
                dims: d.map_or(vec![2, 3], |d| vec![d]),
                max_k: *max_k,
                max_s: *max_s,
                series: *series,
                points: *points,
                seed: *seed,
            };
            emit_reports("tk", Some(*seed), &[tk_grid(&grid)?], output)
        }
        VerifyCmd::Theorem8 {
            depth,
            rank,
            n_max,
            samples,
            origin_rank,
            seed,
            growth_csv,
            out,
        } => {
            let idx = IndexSequence::default_instance(*depth)?;
            let sched = GrowthSchedule::default_schedule(*depth);
            let cfg = VerifyConfig {
                rank: *rank,
                n_max: *n_max,
                samples: *samples,
                seed: *seed,
                origin_rank: *origin_rank,
            };
            let report = verify_counterexample(&idx, &sched, &cfg)?;
            if let Some(p) = growth_csv {
                write_output(Some(p), report.growth_csv().as_bytes())?;
            }
            let v = json!({ "suite": "theorem8", "seed": seed, "passed": report.passed, "report": report });
            emit_value(&v, report.passed, out.as_deref())
        }
        VerifyCmd::Probes {
            series,
            depth,
            probes,
            bound,
            expect_zero,
            out,
        } => probes_suite(series.as_deref(), *depth, probes.as_deref(), *bound, *expect_zero, out.as_deref()),
        VerifyCmd::Falsify {
            set,
            rank,
            rademacher_up_to,
            walsh,
            walsh_cube_rank,
            no_support,
            basis_limit,
            out,
        } => {
            let set = load_set(set)?;
            let c = Constraints {
                support: !no_support,
                rademacher_up_to: *rademacher_up_to,
                walsh: walsh.clone(),
                walsh_cube_rank: *walsh_cube_rank,
                basis_limit: *basis_limit,
            };
            let problem = uset_falsify(&set, *rank, &c)?;
            let failures = problem.verify_basis()?;
            let passed = failures.is_empty();
            let v = json!({
                "suite": "falsify",
                "seed": Value::Null,
                "passed": passed,
                "basis_failures": failures,
                "problem": problem,
            });
            emit_value(&v, passed, out.as_deref())
        }
    }
}

fn probes_suite(
    series: Option<&Path>,
    depth: usize,
    probes: Option<&[u64]>,
    bound: Option<u32>,
    expect_zero: bool,
    out: Option<&Path>,
) -> Result<Verdict> {
    let (s, idx) = match series {
        Some(p) => (load_series(p)?, None),
        None => {
            let idx = IndexSequence::default_instance(depth)?;
            let s = build_theorem8_series(&idx, &GrowthSchedule::default_schedule(depth))?;
            (s, Some(idx))
        }
    };
    let powers: Vec<u64> = (0..s.bound_rank()).map(|j| 1u64 << j).collect();
    let probes = probes.unwrap_or(&powers);
    let report = cantor_lebesgue_probe(&s, probes, bound)?;
    let mut passed = !expect_zero || report.all_zero;
    let mut v = json!({
        "suite": "probes",
        "seed": Value::Null,
        "report": report,
    });
    if let Some(idx) = idx {
        // contrast: the indices n_s carry |c| = d_s, with unbounded binary weight
        let contrast = cantor_lebesgue_probe(&s, idx.n(), None)?;
        let sched = GrowthSchedule::default_schedule(depth);
        let matches = contrast
            .rows
            .iter()
            .zip(sched.d())
            .all(|(r, d)| &r.abs_coefficient == d);
        if series.is_none() && probes.iter().all(|n| n.count_ones() == 1) {
            passed &= report.all_zero;
        }
        passed &= matches;
        v["contrast"] = json!(contrast);
        v["contrast_matches_schedule"] = json!(matches);
    }
    v["passed"] = json!(passed);
    emit_value(&v, passed, out)
}

/// Runs one command; `Ok(false)` means a check failed.
pub fn run(cli: &Cli) -> Result<Verdict> {
    match &cli.command {
        Command::Eval(c) => eval(c),
        Command::Render(a) => render(a),
        Command::Series(c) => series(c),
        Command::Qm(c) => qm(c),
        Command::Verify(c) => verify(c),
    }
}

fn configure_threads() -> std::result::Result<(), String> {
    let Ok(v) = std::env::var("WALSH_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .map_err(|_| format!("WALSH_THREADS must be a positive integer, got `{v}`"))?;
    if n == 0 {
        return Err("WALSH_THREADS must be at least 1".into());
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

/// Entry point of the `walsh` binary: 0 ok, 1 check failure, 2 usage or input error.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Err(msg) = configure_threads() {
        eprintln!("error: {msg}");
        return ExitCode::from(2);
    }
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::DyadicElement;
    use clap::CommandFactory;

    #[test]
    fn command_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn unknown_flags_are_errors() {
        let e = Cli::try_parse_from(["walsh", "eval", "walsh", "--n", "5", "--g", "1|0", "--bogus"]).unwrap_err();
        assert!(e.use_stderr());
        assert!(Cli::try_parse_from(["walsh", "verify", "nothing"]).is_err());
    }

    #[test]
    fn every_subcommand_has_help() {
        fn walk(cmd: &clap::Command, path: &mut Vec<String>) {
            let mut args = vec!["walsh".to_string()];
            args.extend(path.iter().cloned());
            args.push("--help".into());
            let e = Cli::try_parse_from(&args).unwrap_err();
            assert_eq!(e.kind(), clap::error::ErrorKind::DisplayHelp, "{args:?}");
            for sub in cmd.get_subcommands() {
                path.push(sub.get_name().to_string());
                walk(sub, path);
                path.pop();
            }
        }
        walk(&Cli::command(), &mut Vec::new());
    }

    #[test]
    fn elements_parse_in_lists() {
        let p: DyadicPoint = "101|0,1|1".parse().unwrap();
        assert_eq!(p.coords()[1], "1|1".parse::<DyadicElement>().unwrap());
        assert!(parse_list::<WalshIndex>("5,x").is_err());
    }
}
