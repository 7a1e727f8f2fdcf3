use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::Ratio;
use serde_json::{json, Value};

use f3n_core::capset::{self, PointSet};
use f3n_core::energy::{self, Backend};
use f3n_core::fourier::{self, TRANSFORM_HARD_LIMIT, TRANSFORM_LIMIT};
use f3n_core::randomsel;
use f3n_core::spectrum::{self, AffineSubspace, SpectrumSet};
use f3n_core::structure;
use f3n_core::{pow3, Error, SpectrumTable, Subspace, TritVector};

use crate::error::{CliError, CliResult};
use crate::report::{self, big, float, rat, ratio_u64, Format, Meta, Report, Table};
use crate::{selftest, setfile, specdump};

#[derive(Debug, Parser)]
#[command(
    name = "f3n",
    version,
    about = "Exact cap-set, Fourier and additive-energy experiments over F_3^n"
)]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Cap on worker threads. Results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Lift the default transform guard (n ≤ 14) to its hard limit.
    #[arg(long, global = true)]
    force: bool,
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate, verify and search cap sets.
    #[command(subcommand)]
    Capset(CapsetCmd),
    /// Exact coefficient tables and their identities.
    #[command(subcommand)]
    Fourier(FourierCmd),
    /// Large spectrum and density increments.
    #[command(subcommand)]
    Spectrum(SpectrumCmd),
    /// Additive energies.
    #[command(subcommand)]
    Energy(EnergyCmd),
    /// Multiplicity levels, komity, doubling and fibers.
    #[command(subcommand)]
    Structure(StructureCmd),
    /// Nullity of random samples drawn without replacement.
    NullitySim(NullityArgs),
    /// Run the built-in acceptance checks.
    Selftest(SelftestArgs),
}

#[derive(Debug, Args)]
struct Input {
    /// A set file, or `spectrum-of:FILE` for the large spectrum of the set
    /// in FILE.
    #[arg(long, short)]
    input: String,
    /// Spectrum threshold `c` as `p/q`, used with `spectrum-of:`.
    #[arg(long, default_value = "1")]
    threshold: String,
}

#[derive(Debug, Subcommand)]
enum CapsetCmd {
    /// Generate a set and report whether it is a cap.
    Gen {
        #[arg(long)]
        n: u32,
        #[arg(long, value_enum, default_value_t = GenMethod::Greedy)]
        method: GenMethod,
        /// Size for `--method random`.
        #[arg(long)]
        size: Option<usize>,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Check a set for lines.
    Verify(Input),
    /// Exhaustive maximum cap size (n ≤ 4).
    Max {
        #[arg(long)]
        n: u32,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Cartesian product of two sets.
    Product {
        #[arg(long)]
        left: PathBuf,
        #[arg(long)]
        right: PathBuf,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum GenMethod {
    /// Maximal cap from a seeded greedy pass.
    Greedy,
    /// Uniform random set of `--size` points (not a cap in general).
    Random,
    /// The whole space.
    Full,
}

#[derive(Debug, Subcommand)]
enum FourierCmd {
    /// Exact coefficient table of a set.
    Transform {
        #[command(flatten)]
        input: Input,
        /// Write the table as a binary dump.
        #[arg(long)]
        dump: Option<PathBuf>,
        /// Include every coefficient in the report.
        #[arg(long)]
        full: bool,
    },
    /// Invert a binary table dump exactly and recover the set.
    Inverse {
        #[arg(long)]
        dump: PathBuf,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Check the Plancherel identity.
    Plancherel(Input),
    /// Check the cube-sum identity against the line count.
    Cubesum(Input),
}

#[derive(Debug, Subcommand)]
enum SpectrumCmd {
    /// Frequencies with large coefficients.
    Extract {
        #[command(flatten)]
        input: Input,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Search for strong density increments on affine subspaces.
    Increments {
        #[command(flatten)]
        input: Input,
        /// Random spot checks per codimension 2..=max-codim.
        #[arg(long, default_value_t = 0)]
        samples: u32,
        #[arg(long)]
        max_codim: Option<u32>,
    },
    /// Spectrum mass and density on a subspace.
    Subspace {
        #[command(flatten)]
        input: Input,
        /// Comma-separated spanning vectors of `W`.
        #[arg(long, default_value = "")]
        basis: String,
        #[arg(long, default_value_t = 0.0)]
        eps: f64,
    },
}

#[derive(Debug, Subcommand)]
enum EnergyCmd {
    /// Additive energy E4.
    E4 {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum, default_value_t = BackendArg::Auto)]
        backend: BackendArg,
    },
    /// Higher energies E_{2m}.
    E2m {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_delimiter = ',', default_value = "3")]
        m: Vec<u32>,
    },
    /// Energy lifting inequalities.
    Holder {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_delimiter = ',', default_value = "3,4,5")]
        m: Vec<u32>,
    },
    /// Energy exponents and dense subset estimates.
    Smoothing {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
    },
    /// Quadruples split between two sets.
    Cross {
        #[arg(long)]
        left: String,
        #[arg(long)]
        right: String,
        #[arg(long, default_value = "1")]
        threshold: String,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum BackendArg {
    Auto,
    Hash,
    Transform,
}

#[derive(Debug, Subcommand)]
enum StructureCmd {
    /// Difference multiplicities grouped into dyadic levels.
    Levels(Input),
    /// Komity of one level.
    Komity {
        #[command(flatten)]
        input: Input,
        /// Band index from `levels`; defaults to the dominant band.
        #[arg(long)]
        band: Option<usize>,
    },
    /// Pair overlaps of one level, by band.
    Comity {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        band: Option<usize>,
    },
    /// Sumset and span sizes.
    Doubling(Input),
    /// Fibers of the set over a subspace.
    Fibers {
        #[command(flatten)]
        input: Input,
        /// Comma-separated spanning vectors of `H`.
        #[arg(long, default_value = "")]
        h: String,
    },
    /// Fiber Plancherel identities for H ⊆ K.
    Martingale {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value = "")]
        h: String,
        /// Extra spanning vectors; `K` is the span of `H` and these.
        #[arg(long, default_value = "")]
        k: String,
    },
}

#[derive(Debug, Args)]
struct NullityArgs {
    #[command(flatten)]
    input: Input,
    /// Sample size; defaults to the dimension.
    #[arg(long)]
    d: Option<usize>,
    #[arg(long, default_value_t = 1000)]
    trials: u64,
    /// Shorthand for `--format json`.
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct SelftestArgs {
    /// Skip the exhaustive n = 4 search and shorten the simulations.
    #[arg(long)]
    skip_slow: bool,
}

struct Ctx {
    force: bool,
    seed: u64,
}

impl Ctx {
    fn transform_limit(&self) -> u32 {
        if self.force {
            TRANSFORM_HARD_LIMIT
        } else {
            TRANSFORM_LIMIT
        }
    }

    fn table(&self, a: &PointSet) -> CliResult<SpectrumTable> {
        Ok(SpectrumTable::of_set_with_limit(a, self.transform_limit())?)
    }

    fn load(&self, input: &Input) -> CliResult<PointSet> {
        self.load_spec(&input.input, &input.threshold)
    }

    fn load_spec(&self, spec: &str, threshold: &str) -> CliResult<PointSet> {
        match spec.strip_prefix("spectrum-of:") {
            Some(path) => {
                let base = read_set(Path::new(path))?;
                let t = self.table(&base)?;
                Ok(
                    SpectrumSet::from_table(&base, &t, parse_threshold(threshold)?)
                        .members()
                        .clone(),
                )
            }
            None => read_set(Path::new(spec)),
        }
    }
}

fn read_set(path: &Path) -> CliResult<PointSet> {
    setfile::read(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?
        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn write_set(path: &Path, set: &PointSet) -> CliResult<()> {
    setfile::write(path, set).map_err(CliError::from)
}

fn parse_threshold(s: &str) -> CliResult<Ratio<u64>> {
    let bad = || {
        CliError::Usage(format!(
            "threshold `{s}` is not a non-negative rational p/q"
        ))
    };
    let (p, q) = match s.split_once('/') {
        Some((p, q)) => (
            p.trim().parse().map_err(|_| bad())?,
            q.trim().parse().map_err(|_| bad())?,
        ),
        None => (s.trim().parse().map_err(|_| bad())?, 1u64),
    };
    if q == 0 {
        return Err(bad());
    }
    Ok(Ratio::new(p, q))
}

fn parse_vectors(s: &str, n: u32) -> CliResult<Vec<TritVector>> {
    s.split(',')
        .map(str::trim)
        .filter(|w| !w.is_empty())
        .map(|w| {
            let v: TritVector = w
                .parse()
                .map_err(|e: Error| CliError::Usage(format!("vector `{w}`: {e}")))?;
            if v.dim() != n {
                return Err(CliError::Usage(format!(
                    "vector `{w}` has length {}, expected {n}",
                    v.dim()
                )));
            }
            Ok(v)
        })
        .collect()
}

fn points(set: &PointSet) -> Value {
    Value::Array(set.iter().map(|p| Value::String(p.to_string())).collect())
}

fn eis(z: f3n_core::Eisenstein<i128>) -> Value {
    json!({ "p": z.p.to_string(), "q": z.q.to_string() })
}

/// Parses `argv` and runs the command, writing the report to `out` and
/// diagnostics to `err`. Returns the process exit code.
pub fn run(argv: &[String], out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let rendered = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = out.write_all(rendered.as_bytes());
                    0
                }
                _ => {
                    let _ = err.write_all(rendered.as_bytes());
                    1
                }
            };
        }
    };
    if let Some(t) = cli.threads {
        if t == 0 {
            let _ = writeln!(err, "error: --threads must be positive");
            return 1;
        }
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global();
    }
    let ctx = Ctx {
        force: cli.force,
        seed: cli.seed,
    };
    let mut format = cli.format;
    if let Command::NullitySim(NullityArgs { json: true, .. }) = cli.command {
        format = Format::Json;
    }
    match dispatch(&ctx, cli.command) {
        Ok(report) => {
            let text = report::render(
                &report,
                &Meta {
                    command: argv,
                    seed: ctx.seed,
                },
                format,
            );
            if let Err(e) = out.write_all(text.as_bytes()) {
                let _ = writeln!(err, "{}", CliError::Io(e));
                return 1;
            }
            match report.violation {
                Some(v) => {
                    let e = CliError::Identity(v);
                    let _ = writeln!(err, "{e}");
                    e.exit_code()
                }
                None => 0,
            }
        }
        Err(e) => {
            let _ = writeln!(err, "{e}");
            e.exit_code()
        }
    }
}

fn dispatch(ctx: &Ctx, command: Command) -> CliResult<Report> {
    match command {
        Command::Capset(c) => run_capset(ctx, c),
        Command::Fourier(c) => run_fourier(ctx, c),
        Command::Spectrum(c) => run_spectrum(ctx, c),
        Command::Energy(c) => run_energy(ctx, c),
        Command::Structure(c) => run_structure(ctx, c),
        Command::NullitySim(a) => run_nullity(ctx, a),
        Command::Selftest(a) => Ok(selftest::run(ctx.seed, a.skip_slow)),
    }
}

fn capset_body(set: &PointSet) -> Value {
    let lines = capset::count_line_solutions(set);
    json!({
        "n": set.n(),
        "size": set.len(),
        "is_capset": capset::is_capset(set),
        "line_solutions": lines.to_string(),
        "points": points(set),
    })
}

fn run_capset(ctx: &Ctx, cmd: CapsetCmd) -> CliResult<Report> {
    let (set, method, output) = match cmd {
        CapsetCmd::Gen {
            n,
            method,
            size,
            output,
        } => {
            let set = match method {
                GenMethod::Greedy => capset::greedy_random_capset(n, ctx.seed)?,
                GenMethod::Random => {
                    let size =
                        size.ok_or_else(|| CliError::Usage("--method random needs --size".into()))?;
                    capset::random_set(n, size, ctx.seed)?
                }
                GenMethod::Full => PointSet::full(n)?,
            };
            let name = format!("{method:?}").to_lowercase();
            (set, Some(name), output)
        }
        CapsetCmd::Verify(input) => (ctx.load(&input)?, None, None),
        CapsetCmd::Max { n, output } => {
            let (size, witness) = capset::exhaustive_max_capset(n)?;
            let mut body = capset_body(&witness);
            body["max_size"] = json!(size);
            if let Some(path) = output {
                write_set(&path, &witness)?;
            }
            let ok = capset::is_capset(&witness) && witness.len() == size;
            return Ok(Report::new(body).check(ok, || {
                "exhaustive witness is not a cap of the reported size".into()
            }));
        }
        CapsetCmd::Product {
            left,
            right,
            output,
        } => {
            let set = capset::product(&read_set(&left)?, &read_set(&right)?)?;
            (set, Some("product".into()), output)
        }
    };
    if let Some(path) = output {
        write_set(&path, &set)?;
    }
    let mut body = capset_body(&set);
    if let Some(m) = method {
        body["method"] = json!(m);
    }
    let consistent =
        capset::is_capset(&set) == (capset::count_line_solutions(&set) == set.len() as u128);
    Ok(Report::new(body).check(consistent, || {
        "cap test disagrees with the line-solution count".into()
    }))
}

fn run_fourier(ctx: &Ctx, cmd: FourierCmd) -> CliResult<Report> {
    match cmd {
        FourierCmd::Transform { input, dump, full } => {
            let a = ctx.load(&input)?;
            let t = ctx.table(&a)?;
            if let Some(path) = dump {
                let f = std::io::BufWriter::new(std::fs::File::create(&path)?);
                specdump::write_table(f, &t)?;
            }
            let round_trip = t.inverse()? == a.indicator();
            let norms = t.norms();
            let mut body = json!({
                "n": a.n(),
                "size": a.len(),
                "c0": { "p": t.coeffs()[0].p, "q": t.coeffs()[0].q },
                "nonzero_coefficients": norms.iter().filter(|&&v| v != 0).count(),
                "max_norm_nonzero_frequency": norms.iter().skip(1).max().copied().unwrap_or(0),
                "conjugate_symmetric": t.is_conjugate_symmetric(),
                "inverse_round_trip": round_trip,
            });
            let mut table = Table::new(&["index", "x", "p", "q", "norm"]);
            for (i, c) in t.coeffs().iter().enumerate() {
                let x = TritVector::from_index(a.n(), i as u64)?;
                table.push(vec![
                    i.to_string(),
                    x.to_string(),
                    c.p.to_string(),
                    c.q.to_string(),
                    norms[i].to_string(),
                ]);
            }
            if full {
                body["coefficients"] =
                    Value::Array(t.coeffs().iter().map(|c| json!([c.p, c.q])).collect());
            }
            Ok(Report::new(body)
                .with_table(table)
                .check(round_trip, || {
                    "inverse transform does not recover the indicator".into()
                })
                .check(t.is_conjugate_symmetric(), || {
                    "table of a real function is not conjugate symmetric".into()
                }))
        }
        FourierCmd::Inverse { dump, output } => {
            let f = std::fs::File::open(&dump)
                .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", dump.display())))?;
            let t = specdump::read_table(std::io::BufReader::new(f))
                .map_err(|e| CliError::Usage(format!("{}: {e}", dump.display())))?;
            fourier::check_guard(t.n(), ctx.transform_limit())?;
            let values = t.inverse()?;
            let is_indicator = values.iter().all(|&v| v == 0 || v == 1);
            let support: Vec<TritVector> = values
                .iter()
                .enumerate()
                .filter(|(_, &v)| v != 0)
                .map(|(i, _)| TritVector::from_index(t.n(), i as u64))
                .collect::<Result<_, _>>()?;
            let set = PointSet::new(t.n(), support)?;
            if let Some(path) = output {
                if !is_indicator {
                    return Err(CliError::Usage(
                        "table is not the transform of a set; nothing written".into(),
                    ));
                }
                write_set(&path, &set)?;
            }
            let body = json!({
                "n": t.n(),
                "support_size": set.len(),
                "is_indicator": is_indicator,
                "sum": values.iter().map(|&v| v as i128).sum::<i128>().to_string(),
            });
            Ok(Report::new(body))
        }
        FourierCmd::Plancherel(input) => {
            let a = ctx.load(&input)?;
            let t = ctx.table(&a)?;
            let (lhs, rhs) = fourier::plancherel_from_table(&t, a.len());
            let body = json!({
                "n": a.n(),
                "size": a.len(),
                "lhs": lhs.to_string(),
                "rhs": rhs.to_string(),
                "holds": lhs == rhs,
            });
            Ok(Report::new(body).check(lhs == rhs, || {
                format!("Σ|c(x)|² = {lhs} but 3^n|A| = {rhs}")
            }))
        }
        FourierCmd::Cubesum(input) => {
            let a = ctx.load(&input)?;
            let t = ctx.table(&a)?;
            let lhs = fourier::cube_sum_from_table(&t);
            let lines = capset::count_line_solutions(&a);
            let rhs = f3n_core::Eisenstein::new(pow3(a.n()) as i128 * lines as i128, 0);
            let body = json!({
                "n": a.n(),
                "size": a.len(),
                "is_capset": capset::is_capset(&a),
                "line_solutions": lines.to_string(),
                "cube_sum": eis(lhs),
                "expected": eis(rhs),
                "holds": lhs == rhs,
            });
            Ok(Report::new(body).check(lhs == rhs, || format!("Σc(x)³ = {lhs}, expected {rhs}")))
        }
    }
}

fn spectrum_header(a: &PointSet, s: &SpectrumSet) -> Value {
    json!({
        "n": a.n(),
        "set_size": a.len(),
        "rho": rat(&a.density().ratio()),
        "spectrum_size": s.len(),
        "threshold_c": ratio_u64(&s.threshold()),
    })
}

fn increment_json(r: &spectrum::IncrementReport) -> Value {
    json!({
        "codim": r.codim,
        "hits": r.hits,
        "density": rat(&r.density),
        "excess": rat(&r.excess),
        "basis": Value::Array(r.subspace.direction.basis().iter().map(|b| json!(b.to_string())).collect()),
        "shift": r.subspace.shift.to_string(),
    })
}

fn run_spectrum(ctx: &Ctx, cmd: SpectrumCmd) -> CliResult<Report> {
    match cmd {
        SpectrumCmd::Extract { input, output } => {
            let a = ctx.load(&input)?;
            let t = ctx.table(&a)?;
            let s = SpectrumSet::from_table(&a, &t, parse_threshold(&input.threshold)?);
            if let Some(path) = output {
                write_set(&path, s.members())?;
            }
            let mut body = spectrum_header(&a, &s);
            body["symmetric"] = json!(s.is_symmetric());
            body["members"] = points(s.members());
            let mut table = Table::new(&["x", "norm"]);
            for (x, norm) in s.iter() {
                table.push(vec![x.to_string(), norm.to_string()]);
            }
            let sym = s.is_symmetric();
            Ok(Report::new(body)
                .with_table(table)
                .check(sym, || "spectrum is not closed under negation".into()))
        }
        SpectrumCmd::Increments {
            input,
            samples,
            max_codim,
        } => {
            let a = ctx.load(&input)?;
            let t = ctx.table(&a)?;
            let s = SpectrumSet::from_table(&a, &t, parse_threshold(&input.threshold)?);
            let mut found = spectrum::scan_codim1_increments(&a, &t)?;
            let max_codim = max_codim.unwrap_or(a.n() / 2).min(a.n() / 2);
            let mut spot_checks = 0u64;
            if samples > 0 && s.len() >= 2 {
                let mut rng = randomsel::trial_rng(ctx.seed, 0);
                for d in 2..=max_codim {
                    if d as usize > s.len() {
                        break;
                    }
                    for _ in 0..samples {
                        let picks = randomsel::sample_without_replacement(
                            s.members(),
                            d as usize,
                            &mut rng,
                        )?;
                        spot_checks += 1;
                        found.extend(strong_cosets(&a, &picks)?);
                    }
                }
            }
            found.sort_by(|x, y| {
                (
                    x.codim,
                    x.subspace.direction.basis(),
                    x.subspace.shift.index(),
                )
                    .cmp(&(
                        y.codim,
                        y.subspace.direction.basis(),
                        y.subspace.shift.index(),
                    ))
            });
            found.dedup();
            let mut body = spectrum_header(&a, &s);
            body["codim1_hyperplanes_scanned"] = json!((pow3(a.n()) - 1) / 2 * 3);
            body["spot_checks"] = json!(spot_checks);
            body["increments"] = Value::Array(found.iter().map(increment_json).collect());
            let mut table = Table::new(&["codim", "hits", "density", "excess", "shift"]);
            for r in &found {
                table.push(vec![
                    r.codim.to_string(),
                    r.hits.to_string(),
                    report::rat_str(&r.density),
                    report::rat_str(&r.excess),
                    r.subspace.shift.to_string(),
                ]);
            }
            Ok(Report::new(body).with_table(table))
        }
        SpectrumCmd::Subspace { input, basis, eps } => {
            let a = ctx.load(&input)?;
            let t = ctx.table(&a)?;
            let s = SpectrumSet::from_table(&a, &t, parse_threshold(&input.threshold)?);
            let w = Subspace::span(a.n(), &parse_vectors(&basis, a.n())?)?;
            let st = spectrum::subspace_spectrum_stats(&s, &t, &w, eps)?;
            let mut body = spectrum_header(&a, &s);
            body["dim"] = json!(st.dim);
            body["count"] = json!(st.count);
            body["energy"] = json!(st.energy.to_string());
            body["normalized_energy"] = float(st.normalized_energy);
            body["count_scale"] = float(st.count_scale);
            body["energy_scale"] = float(st.energy_scale);
            Ok(Report::new(body))
        }
    }
}

/// Every coset of `ann(span(picks))` on which `a` has a strong increment,
/// found from one pass of coset counting.
fn strong_cosets(a: &PointSet, picks: &[TritVector]) -> CliResult<Vec<spectrum::IncrementReport>> {
    let n = a.n();
    let span = Subspace::span(n, picks)?;
    let w = span.annihilator();
    let key = |v: &TritVector| {
        span.basis()
            .iter()
            .fold(0usize, |acc, b| acc * 3 + b.dot(v) as usize)
    };
    let mut hits = vec![0u64; pow3(span.dim()) as usize];
    for p in a.iter() {
        hits[key(&p)] += 1;
    }
    let mut out = Vec::new();
    for v in w.transversal().enumerate()? {
        let k = hits[key(&v)];
        // cheap prefilter; the exact check below decides
        if k * pow3(span.dim()) <= a.len() as u64 {
            continue;
        }
        let r = spectrum::strong_increment_check(a, &AffineSubspace::new(w.clone(), v)?)?;
        if r.strong {
            out.push(r);
        }
    }
    Ok(out)
}

fn run_energy(ctx: &Ctx, cmd: EnergyCmd) -> CliResult<Report> {
    match cmd {
        EnergyCmd::E4 { input, backend } => {
            let s = ctx.load(&input)?;
            let backend = match backend {
                BackendArg::Auto => Backend::auto(&s),
                BackendArg::Hash => Backend::Hash,
                BackendArg::Transform => Backend::Transform,
            };
            let value = match backend {
                Backend::Hash => energy::e4_hash(&s),
                Backend::Transform => energy::e2m_from_table(&ctx.table(&s)?, 2)?,
            };
            let body = json!({
                "n": s.n(),
                "size": s.len(),
                "backend": format!("{backend:?}").to_lowercase(),
                "E4": big(&value),
            });
            Ok(Report::new(body))
        }
        EnergyCmd::E2m { input, m } => {
            let s = ctx.load(&input)?;
            if let Some(bad) = m.iter().find(|&&m| m == 0) {
                return Err(CliError::Usage(format!("--m must be positive, got {bad}")));
            }
            let r = energy::energy_report(&s, &m)?;
            let e2m: serde_json::Map<String, Value> =
                r.e2m.iter().map(|(k, v)| (k.to_string(), big(v))).collect();
            let body = json!({
                "n": s.n(),
                "size": r.size,
                "E4": big(&r.e4),
                "E8": big(&r.e8),
                "E2m": e2m,
                "sigma_eff": float(r.sigma_eff),
            });
            Ok(Report::new(body))
        }
        EnergyCmd::Holder { input, m } => {
            let s = ctx.load(&input)?;
            let mut checks = Vec::new();
            let mut table = Table::new(&["m", "inequality", "lhs", "rhs", "holds"]);
            let mut holds = true;
            for &m in &m {
                let c = energy::holder_check(&s, m)?;
                holds &= c.holds();
                let pair = |p: &Option<(num_bigint::BigUint, num_bigint::BigUint)>| {
                    p.as_ref().map_or(
                        Value::Null,
                        |(l, r)| json!({ "lhs": big(l), "rhs": big(r), "holds": l <= r }),
                    )
                };
                for (name, p) in [("first", &c.first), ("second", &c.second)] {
                    if let Some((l, r)) = p {
                        table.push(vec![
                            m.to_string(),
                            name.into(),
                            l.to_string(),
                            r.to_string(),
                            (l <= r).to_string(),
                        ]);
                    }
                }
                checks.push(json!({ "m": m, "first": pair(&c.first), "second": pair(&c.second), "tight": c.is_tight() }));
            }
            let body = json!({ "n": s.n(), "size": s.len(), "checks": checks, "holds": holds });
            Ok(Report::new(body)
                .with_table(table)
                .check(holds, || "a Hölder lifting inequality fails".into()))
        }
        EnergyCmd::Smoothing { input, eps } => {
            let s = ctx.load(&input)?;
            let r = energy::smoothing_report(&s, eps)?;
            let body = json!({
                "n": s.n(),
                "size": r.size,
                "E8": big(&r.e8),
                "sigma_eff": float(r.sigma_eff),
                "boundary": float(r.boundary),
                "smoothing_like": r.smoothing_like,
            });
            Ok(Report::new(body))
        }
        EnergyCmd::Cross {
            left,
            right,
            threshold,
        } => {
            let b = ctx.load_spec(&left, &threshold)?;
            let c = ctx.load_spec(&right, &threshold)?;
            let r = energy::cross_quadruples(&b, &c)?;
            let body = json!({
                "n": b.n(),
                "left_size": b.len(),
                "right_size": c.len(),
                "count": big(&r.count),
                "ratio": rat(&r.ratio),
            });
            Ok(Report::new(body))
        }
    }
}

fn pick_band(levels: &structure::Levels, band: Option<usize>) -> CliResult<usize> {
    let i = band.unwrap_or(levels.dominant);
    if i >= levels.structures.len() {
        return Err(CliError::Usage(format!(
            "band {i} out of range (0..{})",
            levels.structures.len()
        )));
    }
    Ok(i)
}

fn nonempty(s: &PointSet) -> CliResult<()> {
    if s.is_empty() {
        Err(CliError::Usage("input set is empty".into()))
    } else {
        Ok(())
    }
}

fn run_structure(ctx: &Ctx, cmd: StructureCmd) -> CliResult<Report> {
    match cmd {
        StructureCmd::Levels(input) => {
            let s = ctx.load(&input)?;
            nonempty(&s)?;
            let l = structure::build_levels(&s)?;
            let mut table = Table::new(&["band", "m_lo", "m_hi", "G_size", "D_size", "alpha_eff"]);
            let bands: Vec<Value> = l
                .structures
                .iter()
                .enumerate()
                .map(|(i, st)| {
                    let (lo, hi) = st.band();
                    table.push(vec![
                        i.to_string(),
                        lo.to_string(),
                        hi.to_string(),
                        st.g_len().to_string(),
                        st.differences().len().to_string(),
                        format!("{:.6}", st.alpha_eff()),
                    ]);
                    json!({
                        "m_lo": lo,
                        "m_hi": hi,
                        "G_size": st.g_len(),
                        "D_size": st.differences().len(),
                        "alpha_eff": float(st.alpha_eff()),
                    })
                })
                .collect();
            let total: usize = l.structures.iter().map(|x| x.g_len()).sum();
            let body = json!({
                "n": s.n(),
                "size": s.len(),
                "difference_set_size": l.multiplicity.support_len(),
                "bands": bands,
                "dominant": l.dominant,
            });
            Ok(Report::new(body)
                .with_table(table)
                .check(total == s.len() * s.len(), || {
                    "bands do not partition Δ × Δ".into()
                }))
        }
        StructureCmd::Komity { input, band } => {
            let s = ctx.load(&input)?;
            nonempty(&s)?;
            let l = structure::build_levels(&s)?;
            let i = pick_band(&l, band)?;
            let st = &l.structures[i];
            let fast = structure::komity(st);
            let slow = structure::komity_pairwise(st);
            let body = json!({
                "n": s.n(),
                "size": s.len(),
                "band": i,
                "m_lo": st.band().0,
                "m_hi": st.band().1,
                "G_size": st.g_len(),
                "D_size": st.differences().len(),
                "komity": big(&fast),
                "komity_pairwise": big(&slow),
                "agree": fast == slow,
            });
            Ok(Report::new(body)
                .check(fast == slow, || format!("komity {fast} vs pairwise {slow}")))
        }
        StructureCmd::Comity { input, band } => {
            let s = ctx.load(&input)?;
            nonempty(&s)?;
            let l = structure::build_levels(&s)?;
            let i = pick_band(&l, band)?;
            let st = &l.structures[i];
            let scan = structure::comity_scan(st);
            let komity = structure::komity(st);
            let mut table = Table::new(&["lo", "hi", "pairs", "mass"]);
            let bands: Vec<Value> = scan
                .bands
                .iter()
                .map(|b| {
                    table.push(vec![b.lo.to_string(), b.hi.to_string(), b.pairs.to_string(), b.mass.to_string()]);
                    json!({ "lo": b.lo, "hi": b.hi, "pairs": b.pairs.to_string(), "mass": big(&b.mass) })
                })
                .collect();
            let total = scan.total_mass();
            let body = json!({
                "n": s.n(),
                "size": s.len(),
                "band": i,
                "D_size": st.differences().len(),
                "histogram": bands,
                "dominant": scan.dominant,
                "beta_eff": float(scan.beta_eff),
                "komity": big(&komity),
            });
            Ok(Report::new(body)
                .with_table(table)
                .check(total == komity, || {
                    format!("histogram mass {total} differs from komity {komity}")
                }))
        }
        StructureCmd::Doubling(input) => {
            let s = ctx.load(&input)?;
            let d = structure::doubling(&s)?;
            let h = structure::span_hull(&s)?;
            let body = json!({
                "n": s.n(),
                "size": d.size,
                "difference_set_size": d.diff_size,
                "doubling": rat(&d.ratio),
                "span_dim": h.span.dim(),
                "span_ratio": rat(&h.ratio),
                "span_basis": Value::Array(h.span.basis().iter().map(|b| json!(b.to_string())).collect()),
            });
            Ok(Report::new(body))
        }
        StructureCmd::Fibers { input, h } => {
            let a = ctx.load(&input)?;
            let h = Subspace::span(a.n(), &parse_vectors(&h, a.n())?)?;
            let f = structure::decompose_fibers(&a, &h)?;
            let mut table = Table::new(&["v", "size"]);
            let fibers: Vec<Value> = f
                .fibers
                .iter()
                .map(|(v, set)| {
                    table.push(vec![v.to_string(), set.len().to_string()]);
                    json!({ "v": v.to_string(), "size": set.len() })
                })
                .collect();
            let total: usize = f.sizes().sum();
            let body = json!({ "n": a.n(), "size": a.len(), "h_dim": h.dim(), "fibers": fibers });
            Ok(Report::new(body)
                .with_table(table)
                .check(total == a.len(), || "fibers do not partition A".into()))
        }
        StructureCmd::Martingale { input, h, k } => {
            let a = ctx.load(&input)?;
            let hs = parse_vectors(&h, a.n())?;
            let mut ks = hs.clone();
            ks.extend(parse_vectors(&k, a.n())?);
            let h = Subspace::span(a.n(), &hs)?;
            let k = Subspace::span(a.n(), &ks)?;
            let fp = structure::fiber_plancherel_check(&a, &h, &k)?;
            let pair = |p: &(num_bigint::BigUint, num_bigint::BigUint)| json!({ "lhs": big(&p.0), "rhs": big(&p.1), "holds": p.0 == p.1 });
            let body = json!({
                "n": a.n(),
                "size": a.len(),
                "h_dim": h.dim(),
                "k_dim": k.dim(),
                "plancherel_full": pair(&fp.full),
                "plancherel_centered": pair(&fp.centered),
                "martingale": pair(&fp.martingale),
                "holds": fp.holds(),
            });
            Ok(Report::new(body).check(fp.holds(), || "fiber Plancherel identity fails".into()))
        }
    }
}

fn run_nullity(ctx: &Ctx, args: NullityArgs) -> CliResult<Report> {
    let s = ctx.load(&args.input)?;
    let d = args.d.unwrap_or(s.n() as usize);
    let ex = randomsel::nullity_distribution(&s, d, args.trials, ctx.seed)?;
    let tail = ex.tail();
    let reference = ex.reference_curve();
    let monotone = tail.windows(2).all(|w| w[1] <= w[0]);
    let mut table = Table::new(&["k", "count", "tail", "reference"]);
    for k in 0..=d {
        table.push(vec![
            k.to_string(),
            ex.histogram[k].to_string(),
            report::rat_str(&tail[k]),
            report::rat_str(&reference[k]),
        ]);
    }
    let body = json!({
        "source": args.input.input,
        "n": s.n(),
        "source_size": ex.source_len,
        "d": d,
        "trials": ex.trials,
        "histogram": ex.histogram,
        "tail": tail.iter().map(rat).collect::<Vec<_>>(),
        "reference": reference.iter().map(rat).collect::<Vec<_>>(),
        "tail_non_increasing": monotone,
    });
    let total: u64 = ex.histogram.iter().sum();
    Ok(Report::new(body)
        .with_table(table)
        .check(total == args.trials, || {
            "histogram mass differs from the trial count".into()
        }))
}
