//! `bkn`: enumeration, Markov kernels, convolutions, quantum Littlewood–Richardson
//! tables, enumerative counts, heat-kernel tables and limit-theorem checks on
//! the graph `B_{k,n}`.

mod spec;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use bkn::configurations::{enumerate, Configuration, Partition};
use bkn::harmonic::{convolve_sequence, fourier, moments, parse_parts, HMeasure};
use bkn::heat::{heat_kernel_suk, heat_kernel_uk, HeatParams};
use bkn::limits::{
    berry_esseen_setup, corollary_check, fourier_decay_report, local_limit_check, pieri_sequence,
    wasserstein_upper_bound, GammaConvention,
};
use bkn::qcoh::{enumerative_count, qlr, CohomologyClass};
use bkn::spectral::{cache_dir, cache_path, sample_path, SpectralData, DEFAULT_CAP};

const AFTER_HELP: &str = "\
Measure specs (conv):
  dirac:<parts>              h-probability concentrated at the vertex <parts>, e.g. dirac:2,0
  pieri                      the single-step Pieri measure δ_{I_1}
  uniform-neighbors:<parts>  uniform over the Pieri neighbours of <parts>
  mix:w1*SPEC1+w2*SPEC2      weighted mixture, weights renormalised
  SPEC@COUNT                 COUNT consecutive copies of SPEC

Class specs (count):
  <parts>[@COUNT]            Schubert class σ_λ, optionally repeated, e.g. 1@576

CSV headers:
  enum     index,parts,partition,size,mu_h
  kernel   row,col,value
  conv     parts,probability,density
  qlr      lambda,mu,nu,d,coefficient
  count    count,balanced
  heat     v_1..v_k,value,truncation_radius,tail_bound
  validate check-specific rows (see --format json for the full report)

Exit codes: 0 success, 1 validation failure or numerical error, 2 usage error.
Environment: BKN_CACHE_DIR overrides the spectral cache directory.";

#[derive(Parser, Debug)]
#[command(name = "bkn", version, about = "Nonintersecting walks on the discrete circle and quantum cohomology of Grassmannians", after_help = AFTER_HELP)]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write output to a file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Load/store spectral data in the cache directory.
    #[arg(long, global = true)]
    use_cache: bool,
    /// Largest |B_{k,n}| accepted.
    #[arg(long, global = true, default_value_t = DEFAULT_CAP)]
    cap: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Check {
    Fourier,
    LocalLimit,
    Wasserstein,
    Corollary,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum GammaFlag {
    Standard,
    Doubled,
}

impl From<GammaFlag> for GammaConvention {
    fn from(g: GammaFlag) -> Self {
        match g {
            GammaFlag::Standard => GammaConvention::Standard,
            GammaFlag::Doubled => GammaConvention::Doubled,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List the vertices of B_{k,n} in canonical order.
    Enum {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: usize,
    },
    /// Emit the Markov kernel P^J, optionally sampling a walk from it.
    Kernel {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: usize,
        /// Label J as sites, e.g. "2,0" (default: the Pieri step).
        #[arg(long)]
        j: Option<String>,
        /// Emit the μ^h-reversal, whose rows step forward along edges.
        #[arg(long)]
        forward: bool,
        /// Sample a walk of this many steps from the ground state instead.
        #[arg(long)]
        walk: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Convolve measure specs and report the resulting law.
    Conv {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: usize,
        /// Measure spec; repeat for a sequence.
        #[arg(long = "measure", required = true)]
        measures: Vec<String>,
        /// Starting vertex (default: the ground state).
        #[arg(long)]
        start: Option<String>,
    },
    /// Quantum Littlewood–Richardson table of σ_λ σ_μ.
    Qlr {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: usize,
        /// λ as parts, e.g. "2,1"; empty string for ∅.
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
        #[arg(long, allow_hyphen_values = true)]
        mu: String,
    },
    /// Count degree-d rational curves through Schubert conditions.
    Count {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: u32,
        /// Class spec; repeat in order M_1, …, M_{p+1}.
        #[arg(long = "class", required = true)]
        classes: Vec<String>,
    },
    /// Tabulate heat kernels over a grid of target angles.
    Heat {
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 1.0)]
        gamma: f64,
        /// Use the U(k) kernel with this α (default: the SU(k) kernel).
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        t: f64,
        /// Source angles, comma separated (default: the ground angles of B_{k,2k}).
        #[arg(long, allow_hyphen_values = true)]
        u: Option<String>,
        /// Grid points per free angle on [0, 2π).
        #[arg(long, default_value_t = 32)]
        points: usize,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Run one limit-theorem check and write its report.
    Validate {
        #[arg(long, value_enum)]
        check: Check,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: usize,
        /// Sequence length (default: n²).
        #[arg(long)]
        m: Option<usize>,
        /// Recorded in the report; the checks themselves are deterministic.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = GammaFlag::Standard)]
        gamma: GammaFlag,
    },
    /// Build or inspect the spectral cache.
    Cache {
        #[command(subcommand)]
        action: CacheAction,
    },
}

#[derive(Subcommand, Debug)]
enum CacheAction {
    /// Build and store spectral data for (k, n).
    Build {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: usize,
    },
    /// Show the cache location and whether (k, n) is present and valid.
    Info {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: usize,
    },
}

/// A result that can be rendered as JSON or as a CSV table.
struct Output {
    json: Value,
    headers: Vec<String>,
    rows: Vec<Vec<String>>,
    /// Set when a validation criterion failed; exit code 1.
    failed: Option<String>,
}

impl Output {
    fn new(json: Value, headers: &[&str], rows: Vec<Vec<String>>) -> Self {
        Self { json, headers: headers.iter().map(|s| s.to_string()).collect(), rows, failed: None }
    }
}

fn spectral(cli: &Cli, k: usize, n: usize) -> Result<SpectralData> {
    if cli.use_cache {
        return Ok(SpectralData::load_or_build(k, n, &cache_dir())?);
    }
    Ok(SpectralData::build_with_cap(k, n, cli.cap)?)
}

fn vertex(s: &str, n: usize) -> Result<Configuration> {
    Ok(Configuration::from_sites(parse_parts(s)?, n)?)
}

fn partition(s: &str) -> Result<Partition> {
    Ok(Partition::new(parse_parts(s)?)?)
}

fn run(cli: &Cli) -> Result<Output> {
    match &cli.command {
        Command::Enum { k, n } => {
            let sd = spectral(cli, *k, *n)?;
            let rows: Vec<Vec<String>> = enumerate(*k, *n)?
                .iter()
                .enumerate()
                .map(|(i, v)| {
                    vec![
                        i.to_string(),
                        v.to_string(),
                        v.to_partition().to_string(),
                        v.size().to_string(),
                        format!("{:e}", sd.mu_h()[i]),
                    ]
                })
                .collect();
            let json = json!({ "k": k, "n": n, "count": rows.len(), "vertices": sd.vertices() });
            Ok(Output::new(json, &["index", "parts", "partition", "size", "mu_h"], rows))
        }
        Command::Kernel { k, n, j, forward, walk, seed } => {
            let sd = spectral(cli, *k, *n)?;
            let label = match j {
                Some(s) => sd.require_index(&vertex(s, *n)?)?,
                None => sd.first_step_index().context("B_{k,n} has no Pieri step")?,
            };
            let mut kernel = sd.markov_kernel(label)?;
            if *forward || walk.is_some() {
                kernel = kernel.reversed(sd.mu_h());
            }
            if let Some(steps) = walk {
                let ground = sd.vertex(sd.ground_index()).clone();
                let path = sample_path(&kernel, &sd, &ground, *steps, *seed)?;
                let rows = path.iter().enumerate().map(|(i, v)| vec![i.to_string(), v.to_string()]).collect();
                let json = json!({ "k": k, "n": n, "label": kernel.label, "seed": seed, "path": path });
                return Ok(Output::new(json, &["step", "parts"], rows));
            }
            let size = sd.len();
            let mut rows = Vec::new();
            let mut matrix = Vec::with_capacity(size);
            for r in 0..size {
                let row: Vec<f64> = (0..size).map(|c| kernel.matrix[(r, c)]).collect();
                for (c, v) in row.iter().enumerate() {
                    if *v != 0.0 {
                        rows.push(vec![sd.vertex(r).to_string(), sd.vertex(c).to_string(), format!("{v:e}")]);
                    }
                }
                matrix.push(row);
            }
            let json = json!({
                "k": k, "n": n, "label": kernel.label, "forward": *forward || walk.is_some(),
                "vertices": sd.vertices(), "matrix": matrix,
                "row_sum_deviation": kernel.row_sum_deviation(),
            });
            Ok(Output::new(json, &["row", "col", "value"], rows))
        }
        Command::Conv { k, n, measures, start } => {
            let sd = spectral(cli, *k, *n)?;
            let mut seq = Vec::new();
            for m in measures {
                let (mu, count) = spec::measure(m, &sd)?;
                seq.extend(std::iter::repeat(mu).take(count));
            }
            let base = match start {
                Some(s) => HMeasure::dirac(&vertex(s, *n)?, &sd)?,
                None => HMeasure::dirac_index(sd.ground_index(), &sd),
            };
            let out = convolve_sequence(&seq, &base, &sd)?;
            let density = out.density(&sd);
            let rows = out
                .weights()
                .iter()
                .enumerate()
                .filter(|(_, w)| **w > 1e-12)
                .map(|(i, w)| vec![sd.vertex(i).to_string(), format!("{w:e}"), format!("{:e}", density[i])])
                .collect();
            let phi = fourier(&out, &sd)?;
            let json = json!({
                "k": k, "n": n, "m": seq.len(),
                "law": out.to_map(&sd),
                "moments": moments(&out, &sd)?,
                "fourier_abs": phi.values.iter().map(|z| z.norm()).collect::<Vec<_>>(),
            });
            Ok(Output::new(json, &["parts", "probability", "density"], rows))
        }
        Command::Qlr { k, n, lambda, mu } => {
            let sd = spectral(cli, *k, *n)?;
            let (a, b) = (partition(lambda)?, partition(mu)?);
            let table = qlr(&a, &b, &sd)?;
            let rows: Vec<Vec<String>> = table
                .entries
                .iter()
                .map(|((nu, d), c)| vec![a.to_string(), b.to_string(), nu.to_string(), d.to_string(), c.to_string()])
                .collect();
            let entries: Vec<Value> = table
                .entries
                .iter()
                .map(|((nu, d), c)| json!({ "nu": nu, "d": d, "coefficient": c }))
                .collect();
            let json = json!({ "k": k, "n": n, "lambda": a, "mu": b, "entries": entries });
            Ok(Output::new(json, &["lambda", "mu", "nu", "d", "coefficient"], rows))
        }
        Command::Count { k, n, d, classes } => {
            let sd = spectral(cli, *k, *n)?;
            let mut list: Vec<CohomologyClass> = Vec::new();
            for c in classes {
                let (class, count) = spec::class(c, *k, *n)?;
                list.extend(std::iter::repeat(class).take(count));
            }
            let r = enumerative_count(&list, *d, &sd)?;
            let json = json!({ "k": k, "n": n, "d": d, "classes": list.len(), "count": r.count.to_string(), "balanced": r.balanced });
            Ok(Output::new(json, &["count", "balanced"], vec![vec![r.count.to_string(), r.balanced.to_string()]]))
        }
        Command::Heat { k, gamma, alpha, t, u, points, tol } => heat_table(*k, *gamma, *alpha, *t, u.as_deref(), *points, *tol),
        Command::Validate { check, k, n, m, seed, gamma } => {
            let sd = spectral(cli, *k, *n)?;
            validate(*check, &sd, m.unwrap_or(n * n), *seed, (*gamma).into())
        }
        Command::Cache { action } => {
            let dir = cache_dir();
            match action {
                CacheAction::Build { k, n } => {
                    let sd = SpectralData::build_with_cap(*k, *n, cli.cap)?;
                    let path = cache_path(&dir, *k, *n);
                    sd.save(&path)?;
                    let json = json!({ "path": path, "vertices": sd.len() });
                    Ok(Output::new(json, &["path", "vertices"], vec![vec![path.display().to_string(), sd.len().to_string()]]))
                }
                CacheAction::Info { k, n } => {
                    let path = cache_path(&dir, *k, *n);
                    let status = if !path.exists() {
                        "missing".to_string()
                    } else {
                        match SpectralData::load(&path) {
                            Ok(_) => "valid".to_string(),
                            Err(e) => format!("invalid: {e}"),
                        }
                    };
                    let json = json!({ "path": path, "status": status });
                    Ok(Output::new(json, &["path", "status"], vec![vec![path.display().to_string(), status]]))
                }
            }
        }
    }
}

fn heat_table(k: usize, gamma: f64, alpha: Option<f64>, t: f64, u: Option<&str>, points: usize, tol: f64) -> Result<Output> {
    if k == 0 || points == 0 {
        bail!(bkn::Error::InvalidParameters("need k ≥ 1 and at least one grid point".into()));
    }
    let u: Vec<f64> = match u {
        Some(s) => s
            .split(',')
            .map(|x| x.trim().parse::<f64>().with_context(|| format!("bad angle {x:?}")))
            .collect::<Result<_>>()?,
        None => Configuration::ground(k, 2 * k)?.raw_angles(),
    };
    if u.len() != k {
        bail!(bkn::Error::DimensionMismatch { expected: k, got: u.len() });
    }
    let tau = std::f64::consts::TAU;
    let h = tau / points as f64;
    // SU(k): free angles v_1..v_{k−1}, v_k closes the slice; U(k): all k angles free
    let free = if alpha.is_some() { k } else { k - 1 };
    let total: f64 = u.iter().sum();
    let params = alpha.map(|a| HeatParams::new(a, gamma, t)).transpose()?;
    let mut rows = Vec::new();
    let mut values = Vec::new();
    let mut idx = vec![0usize; free];
    loop {
        let mut v: Vec<f64> = idx.iter().map(|&i| (i as f64 + 0.5) * h).collect();
        if params.is_none() {
            v.push(total - v.iter().sum::<f64>());
        }
        let eval = match &params {
            Some(p) => heat_kernel_uk(&u, &v, p, tol),
            None => heat_kernel_suk(&u, &v, gamma, t, tol),
        };
        match eval {
            Ok(e) => {
                let mut row: Vec<String> = v.iter().map(|x| format!("{x}")).collect();
                row.extend([format!("{:e}", e.value), e.truncation_radius.to_string(), format!("{:e}", e.tail_bound)]);
                rows.push(row);
                values.push(json!({ "v": v, "value": e.value, "truncation_radius": e.truncation_radius, "tail_bound": e.tail_bound }));
            }
            Err(bkn::Error::Singular(_)) => {} // coinciding target angles: density weight is zero
            Err(e) => return Err(e.into()),
        }
        let mut d = 0;
        while d < free {
            idx[d] += 1;
            if idx[d] < points {
                break;
            }
            idx[d] = 0;
            d += 1;
        }
        if d == free || free == 0 {
            break;
        }
    }
    let mut headers: Vec<String> = (1..=k).map(|i| format!("v_{i}")).collect();
    headers.extend(["value", "truncation_radius", "tail_bound"].map(String::from));
    let json = json!({
        "k": k, "gamma": gamma, "alpha": alpha, "t": t, "u": u, "points": points,
        "kernel": if alpha.is_some() { "U(k)" } else { "SU(k)" }, "rows": values,
    });
    Ok(Output { json, headers, rows, failed: None })
}

fn validate(check: Check, sd: &SpectralData, m: usize, seed: u64, convention: GammaConvention) -> Result<Output> {
    let (k, n) = (sd.k(), sd.n());
    let ground = sd.vertex(sd.ground_index()).clone();
    let meta = json!({ "k": k, "n": n, "m": m, "seed": seed });
    match check {
        Check::Fourier => {
            let seq = pieri_sequence(sd, m)?;
            let r = fourier_decay_report(&seq, sd, 1.0)?;
            let rows = r
                .entries
                .iter()
                .map(|e| vec![format!("{:?}", e.j), format!("{:e}", e.error), e.in_window.to_string()])
                .collect();
            let failed = (!r.max_error.is_finite()).then(|| "non-finite Fourier error".to_string());
            let json = json!({ "meta": meta, "max_error": r.max_error, "report": r });
            let mut out = Output::new(json, &["j", "error", "in_window"], rows);
            out.failed = failed;
            Ok(out)
        }
        Check::LocalLimit => {
            let seq = pieri_sequence(sd, m)?;
            let r = local_limit_check(&seq, &ground, sd, convention, None)?;
            let rows = r
                .entries
                .iter()
                .map(|e| vec![e.target.to_string(), format!("{:e}", e.lhs), format!("{:e}", e.rhs), format!("{:e}", e.error)])
                .collect();
            let failed = (r.off_class_mass > 1e-12).then(|| format!("off-class mass {:e}", r.off_class_mass));
            let json = json!({ "meta": meta, "sup_error": r.sup_error, "report": r });
            let mut out = Output::new(json, &["target", "lhs", "rhs", "error"], rows);
            out.failed = failed;
            Ok(out)
        }
        Check::Wasserstein => {
            let seq = pieri_sequence(sd, m)?;
            let setup = berry_esseen_setup(&seq, &ground, sd, convention)?;
            let grid: Vec<f64> = (0..60).map(|i| 1e-3 * 500f64.powf(i as f64 / 59.0)).collect();
            let w = wasserstein_upper_bound(&setup.discrete, &setup.dyson, &grid, None)?;
            let rows = w.per_t.iter().map(|(t, b)| vec![format!("{t:e}"), format!("{b:e}")]).collect();
            let failed = (!w.bound.is_finite()).then(|| "bound is not finite".to_string());
            let json = json!({ "meta": meta, "params": setup.params, "theta": setup.theta, "report": w });
            let mut out = Output::new(json, &["t", "bound"], rows);
            out.failed = failed;
            Ok(out)
        }
        Check::Corollary => {
            let (first, last, d) = spec::balanced_ends(k, n, m)?;
            let mut classes = vec![first];
            classes.extend(std::iter::repeat(CohomologyClass::schubert(&Partition::single_box(), k, n)?).take(m));
            classes.push(last);
            let r = corollary_check(&classes, d, sd, convention)?;
            let ok = r.ratio.is_some_and(|x| (0.75..=1.25).contains(&x));
            let opt = |x: Option<f64>| x.map_or_else(String::new, |v| format!("{v:e}"));
            let rows = vec![vec![r.exact.clone(), opt(r.ln_asymptotic), opt(r.ratio)]];
            let mut out = Output::new(json!({ "meta": meta, "report": r }), &["exact", "ln_asymptotic", "ratio"], rows);
            if !ok {
                out.failed = Some("ratio outside [0.75, 1.25]".into());
            }
            Ok(out)
        }
    }
}

fn emit(cli: &Cli, out: &Output) -> Result<()> {
    let mut buf: Vec<u8> = Vec::new();
    match cli.format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut buf, &out.json)?;
            buf.push(b'\n');
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut buf);
            w.write_record(&out.headers)?;
            for r in &out.rows {
                w.write_record(r)?;
            }
            w.flush()?;
        }
    }
    match &cli.out {
        Some(path) => std::fs::write(path, &buf).with_context(|| format!("writing {}", path.display()))?,
        None => std::io::stdout().write_all(&buf)?,
    }
    Ok(())
}

/// Errors caused by bad input map to the usage exit code.
fn is_usage(e: &anyhow::Error) -> bool {
    use bkn::Error as E;
    match e.downcast_ref::<E>() {
        Some(E::InvalidParameters(_) | E::InvalidConfiguration { .. } | E::PartitionOutOfBox { .. })
        | Some(E::TooLarge { .. } | E::Domain(_) | E::DimensionMismatch { .. }) => true,
        Some(_) => false,
        None => e.downcast_ref::<spec::SpecError>().is_some(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let result = run(&cli).and_then(|out| emit(&cli, &out).map(|_| out.failed));
    match result {
        Ok(None) => ExitCode::SUCCESS,
        Ok(Some(reason)) => {
            eprintln!("validation failed: {reason}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(if is_usage(&e) { 2 } else { 1 })
        }
    }
}
