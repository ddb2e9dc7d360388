use std::fs;
use std::io::{self, Read};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hankel_pns::certificates::{cone_theta_min, CriticalCertificate};
use hankel_pns::scan::{apply_config, write_csv, Axis, GridSpec, RowStatus};
use hankel_pns::{
    assemble, check_necessary, classify_degenerate, cone_certificate, eta, m0_search, n0,
    point_a_critical_value, ray_critical_value, run_scan, segment_certificate, verify_certificate,
    BisectionOptions, FeasBackend, GeneratingVector, HankelError, Result, SlicePoint, Vec4,
};

#[derive(Parser)]
#[command(name = "hankel-pns", version, about = "PSD and SOS bounds for 4x4x4x4 Hankel tensors")]
struct Cli {
    /// key = value file with solver defaults
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate the Hankel form at a point
    Eval {
        #[command(flatten)]
        vector: VectorArgs,
        /// x1,x2,x3,x4
        #[arg(long, allow_hyphen_values = true)]
        x: String,
    },
    /// Threshold eta(beta, gamma) of the symmetric binary quartic
    Eta {
        #[arg(long, allow_hyphen_values = true)]
        beta: f64,
        #[arg(long, allow_hyphen_values = true)]
        gamma: f64,
    },
    /// Necessary PSD conditions and degeneracy class
    Check {
        #[command(flatten)]
        vector: VectorArgs,
    },
    /// Smallest v0 making the tensor PSD
    N0 {
        #[arg(long, allow_hyphen_values = true)]
        point: SlicePoint,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long)]
        json: bool,
    },
    /// Smallest v0 making the tensor SOS
    M0 {
        #[arg(long, allow_hyphen_values = true)]
        point: SlicePoint,
        #[command(flatten)]
        solver: SolverArgs,
        /// accept eta(v5, v6) = 1
        #[arg(long)]
        allow_boundary: bool,
        #[arg(long)]
        json: bool,
    },
    /// Grid scan of n0 and m0, written as CSV
    Scan {
        /// coord=min:max:steps
        #[arg(long, allow_hyphen_values = true)]
        grid: Vec<String>,
        /// coord=value
        #[arg(long, allow_hyphen_values = true)]
        fix: Vec<String>,
        /// the 11 x 8 reference grid, compared against the embedded table
        #[arg(long)]
        table1: bool,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        jobs: Option<usize>,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Verify a certificate JSON file ("-" reads stdin)
    VerifyCert {
        file: String,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Build a closed-form certificate or critical value
    Cert {
        #[command(subcommand)]
        kind: CertKind,
    },
}

#[derive(Subcommand)]
enum CertKind {
    Segment {
        #[arg(long, allow_hyphen_values = true)]
        t: f64,
    },
    Cone {
        #[arg(long)]
        b: f64,
        /// defaults to the smallest admissible theta
        #[arg(long, allow_hyphen_values = true)]
        theta: Option<f64>,
    },
    Ray {
        #[arg(long)]
        rho: f64,
    },
    PointA,
}

#[derive(Args)]
struct VectorArgs {
    /// v2,v6,v1,v3,v5
    #[arg(long, allow_hyphen_values = true, requires = "v0", conflicts_with = "vector")]
    point: Option<SlicePoint>,
    #[arg(long, allow_hyphen_values = true)]
    v0: Option<f64>,
    /// 13 comma separated entries, or a JSON array
    #[arg(long, allow_hyphen_values = true)]
    vector: Option<String>,
}

impl VectorArgs {
    fn resolve(&self) -> Result<GeneratingVector> {
        match (&self.point, self.v0, &self.vector) {
            (Some(p), Some(v0), None) => Ok(assemble(p, v0)),
            (None, _, Some(s)) => {
                let s = s.trim();
                if s.starts_with('[') {
                    Ok(serde_json::from_str(s)?)
                } else {
                    GeneratingVector::from_slice(&parse_list(s)?)
                }
            }
            _ => Err(HankelError::InvalidInput("give --point with --v0, or --vector".into())),
        }
    }
}

#[derive(Args)]
struct SolverArgs {
    #[arg(long)]
    seed: Option<u64>,
    /// relative bisection tolerance
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    starts: Option<usize>,
    /// ap or ipm
    #[arg(long)]
    backend: Option<FeasBackend>,
}

impl SolverArgs {
    fn apply(&self, o: &mut BisectionOptions) {
        if let Some(s) = self.seed {
            o.search.seed = s;
        }
        if let Some(t) = self.tol {
            o.rel_tol = t;
        }
        if let Some(n) = self.starts {
            o.search.n_starts = n;
        }
        if let Some(b) = self.backend {
            o.backend = b;
        }
    }
}

fn parse_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| HankelError::InvalidInput(format!("bad number {t:?}")))
        })
        .collect()
}

fn print_json<T: serde::Serialize>(v: &T) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(v)?);
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode> {
    let mut opts = BisectionOptions::default();
    let mut jobs_cfg = None;
    if let Some(path) = &cli.config {
        apply_config(&fs::read_to_string(path)?, &mut opts, &mut jobs_cfg)?;
    }
    match cli.cmd {
        Cmd::Eval { vector, x } => {
            let v = vector.resolve()?;
            let xs = parse_list(&x)?;
            let x: [f64; 4] = xs
                .try_into()
                .map_err(|_| HankelError::InvalidInput("--x needs 4 numbers".into()))?;
            println!("{}", v.evaluate(&Vec4(x)));
        }
        Cmd::Eta { beta, gamma } => println!("{}", eta(beta, gamma)),
        Cmd::Check { vector } => {
            let v = vector.resolve()?;
            let report = check_necessary(&v);
            let class = classify_degenerate(&v);
            print_json(&serde_json::json!({ "conditions": report, "degenerate": class }))?;
        }
        Cmd::N0 { point, solver, json } => {
            solver.apply(&mut opts);
            let r = n0(&point, &opts.search)?;
            if json {
                print_json(&r)?;
            } else {
                println!("{}", r.value);
            }
        }
        Cmd::M0 { point, solver, allow_boundary, json } => {
            solver.apply(&mut opts);
            opts.allow_boundary = allow_boundary;
            let s = m0_search(&point, &opts)?;
            if json {
                print_json(&s)?;
            } else {
                println!("{}", s.result.value);
            }
        }
        Cmd::Scan { grid, fix, table1, out, jobs, solver } => {
            solver.apply(&mut opts);
            let mut spec = if table1 { GridSpec::table1() } else { GridSpec::default() };
            for g in &grid {
                let (c, s) = g
                    .split_once('=')
                    .ok_or_else(|| HankelError::InvalidInput(format!("expected coord=min:max:steps, got {g:?}")))?;
                let axis: Axis = s.parse()?;
                if !axis.is_swept() {
                    return Err(HankelError::InvalidInput(format!("--grid {g:?} needs min:max:steps")));
                }
                spec.set_axis(c.trim(), axis)?;
            }
            for f in &fix {
                spec.set_from_arg(f)?;
            }
            if spec.axes.iter().filter(|a| a.is_swept()).count() > 5 {
                return Err(HankelError::InvalidInput("at most 5 swept coordinates".into()));
            }
            spec.options = opts;
            spec.jobs = jobs.or(jobs_cfg);
            let output = run_scan(&spec)?;
            match &out {
                Some(path) => write_csv(&output.rows, fs::File::create(path)?, spec.compare_table1)?,
                None => write_csv(&output.rows, io::stdout().lock(), spec.compare_table1)?,
            }
            let ok = output.rows.iter().filter(|r| r.status == RowStatus::Ok).count();
            eprintln!("rows: {} ok: {ok}", output.rows.len());
            if let Some(g) = output.max_gap {
                eprintln!("max gap: {g:e}");
            }
            if spec.compare_table1 {
                let close = output
                    .rows
                    .iter()
                    .filter(|r| r.rel_dev.is_some_and(|d| d.abs() <= 0.02))
                    .count();
                eprintln!("within 2% of reference: {close}/{}", output.rows.len());
            }
        }
        Cmd::VerifyCert { file, tol } => {
            let text = if file == "-" {
                let mut s = String::new();
                io::stdin().read_to_string(&mut s)?;
                s
            } else {
                fs::read_to_string(&file)?
            };
            let cert = CriticalCertificate::from_json(&text)?;
            let report = verify_certificate(&cert, tol)?;
            print_json(&report)?;
            println!("{}", if report.passed { "pass" } else { "fail" });
            if !report.passed {
                return Ok(ExitCode::from(1));
            }
        }
        Cmd::Cert { kind } => match kind {
            CertKind::Segment { t } => println!("{}", segment_certificate(t)?.to_json()),
            CertKind::Cone { b, theta } => {
                let theta = match theta {
                    Some(t) => t,
                    None => cone_theta_min(b)?,
                };
                println!("{}", cone_certificate(b, theta)?.to_json());
            }
            CertKind::Ray { rho } => println!("{}", ray_critical_value(rho)?),
            CertKind::PointA => println!("{}", point_a_critical_value()),
        },
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
