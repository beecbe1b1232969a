//! Command-line front end: each subcommand runs one pipeline and writes CSV
//! or JSON to stdout or a file.

pub mod criteria;
mod state;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use serde_json::{json, Value};

use young_calculus::diagram::{coords_to_profile, diagram_from_rayleigh_with, partition_to_coords, ContinuousDiagram, Partition, DEFAULT_GRID};
use young_calculus::free_calculus::{free_poisson_cumulants, levy_khintchine_cumulants, CumulantSequence, LevyData, DEFAULT_ORDER};
use young_calculus::limit_shapes::{limit_pipeline, p_c_profile, tau_c_measure, ScalingParam};
use young_calculus::markov_krein::{coords_moments, transition_of_coords, InversionOptions};
use young_calculus::numeric::fmt_sig;
use young_calculus::numeric::rational::format_rational;
use young_calculus::symmetric_group::{
    character, dim_irrep, factorization_check, gamma_moments, normalized_character, CentralFunction, CycleType,
    GammaState, RepKind, Representation,
};
use young_calculus::young_measures::{
    concentration_experiment, decompose_central_function, mean_moments, sample_plancherel, sample_schur_weyl,
    schur_weyl_weights, ExperimentResult, Source, YoungMeasure,
};
use young_calculus::Error;

pub use state::{parse_graded, parse_state};

/// JSON schema version written into every JSON document.
pub const SCHEMA: &str = "1";
pub const DEFAULT_SEED: u64 = 42;
const SIG: usize = 12;

#[derive(Parser, Debug)]
#[command(name = "young-calculus", version, about = "Young diagrams, transition measures and Schur–Weyl limit shapes")]
pub struct Cli {
    /// Output format; each command has its own default.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Transition measure of a partition, exact.
    Transition {
        #[arg(long)]
        partition: Partition,
        /// Also list moments m_1..m_n.
        #[arg(long, default_value_t = 6)]
        moments: usize,
    },
    /// Profile of a partition, or the profile rebuilt from the Rayleigh measure of P_c.
    Profile {
        #[arg(long, conflicts_with = "c", required_unless_present = "c")]
        partition: Option<Partition>,
        #[arg(long)]
        c: Option<f64>,
        #[arg(long, default_value_t = DEFAULT_GRID)]
        grid: usize,
    },
    /// The limit shape P_c sampled on a uniform grid over [−c−3, c+3].
    LimitShape {
        #[arg(long)]
        c: f64,
        #[arg(long, default_value_t = DEFAULT_GRID)]
        grid: usize,
    },
    /// The Rayleigh measure τ_c of P_c.
    Tau {
        #[arg(long)]
        c: f64,
    },
    /// Irreducible character value χ_λ(ρ).
    Character {
        #[arg(long)]
        partition: Partition,
        #[arg(long)]
        cycle_type: CycleType,
    },
    /// Exact Schur–Weyl weights of (ℂ^N)^{⊗q}.
    Weights {
        #[arg(long)]
        q: usize,
        #[arg(long = "N")]
        n: u64,
    },
    /// Decomposition of a central function into normalized characters.
    Decompose {
        #[arg(long)]
        q: usize,
        /// trivial, sign, plancherel, tensor:N, character:λ, graded:EVEN|ODD or rep:KIND.
        #[arg(long)]
        state: String,
    },
    /// RSK samples of the Schur–Weyl measure, or of Plancherel without --N.
    Sample {
        #[arg(long)]
        q: usize,
        #[arg(long = "N")]
        n: Option<u64>,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Approximate-factorization constants of a central function.
    Factorization {
        #[arg(long)]
        q: usize,
        #[arg(long = "N", conflicts_with = "state", required_unless_present = "state")]
        n: Option<u64>,
        #[arg(long)]
        state: Option<String>,
        #[arg(long)]
        order: usize,
    },
    /// Mean and variance of m_l over sampled diagrams.
    Concentration {
        #[arg(long)]
        q: usize,
        /// Schur–Weyl source; with neither --N nor --graded, Plancherel.
        #[arg(long = "N", conflicts_with = "graded")]
        n: Option<u64>,
        /// Graded tensor state EVEN|ODD, sampled from its exact decomposition.
        #[arg(long)]
        graded: Option<String>,
        #[arg(long)]
        l: usize,
        #[arg(long, default_value_t = 10_000)]
        count: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Also record the sup-distance of the rescaled diagrams to P_c.
        #[arg(long)]
        profile: bool,
    },
    /// Limit diagram from free cumulants (0, 1, w_3, …) or a Lévy measure.
    FromCumulants {
        /// Comma-separated cumulants starting with w_1 = 0, w_2 = 1.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required_unless_present = "levy", conflicts_with = "levy")]
        w: Option<Vec<f64>>,
        /// Atoms t:mass of a Lévy measure with ∫|t| μ(dt) = 1.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        levy: Option<Vec<String>>,
        #[arg(long, default_value_t = DEFAULT_GRID)]
        grid: usize,
    },
    /// Checks the representation relations and the Γ-moment identity.
    GammaCheck {
        #[arg(long)]
        q: usize,
        /// trivial, sign, regular or tensor:N.
        #[arg(long)]
        rep: RepKind,
        #[arg(long, default_value_t = 6)]
        order: usize,
    },
    /// Runs acceptance criteria, all of them by default.
    Check {
        #[arg(long)]
        criterion: Option<usize>,
    },
}

/// Failure of a command, mapped to the process exit code.
#[derive(Debug)]
pub enum Failure {
    /// Bad input: exit code 2.
    Validation(String),
    /// A numerical stage failed: exit code 1.
    Numerical(String),
}

impl Failure {
    pub fn code(&self) -> i32 {
        match self {
            Failure::Validation(_) => 2,
            Failure::Numerical(_) => 1,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Validation(m) | Failure::Numerical(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_numerical() {
            Failure::Numerical(e.to_string())
        } else {
            Failure::Validation(e.to_string())
        }
    }
}

fn invalid(msg: impl Into<String>) -> Failure {
    Failure::Validation(msg.into())
}

enum Output {
    Csv(String),
    Json(Value),
}

impl Output {
    fn render(self) -> String {
        match self {
            Output::Csv(s) => s,
            Output::Json(v) => {
                let mut s = serde_json::to_string_pretty(&v).expect("JSON values serialize");
                s.push('\n');
                s
            }
        }
    }
}

fn f(x: f64) -> String {
    fmt_sig(x, SIG)
}

fn document(command: &str, mut body: Value) -> Value {
    let map = body.as_object_mut().expect("documents are objects");
    map.insert("schema".into(), json!(SCHEMA));
    map.insert("command".into(), json!(command));
    body
}

fn profile_csv(w: &ContinuousDiagram) -> String {
    let mut s = String::from("u,omega\n");
    for u in w.nodes() {
        s.push_str(&format!("{},{}\n", f(u), f(w.eval(u))));
    }
    s
}

fn measure_csv(m: &YoungMeasure) -> String {
    let mut s = String::from("partition,mass\n");
    for (l, p) in m.masses() {
        s.push_str(&format!("\"{l}\",{}\n", format_rational(p)));
    }
    s
}

fn scaling(c: f64) -> Result<ScalingParam, Failure> {
    Ok(ScalingParam::new(c)?)
}

/// Parses `args` (program name first), runs the command and writes its
/// output. Returns the process exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let out = cli.out.clone();
    let result = run(cli).and_then(|(text, failed)| {
        match &out {
            Some(path) => std::fs::write(path, &text).map_err(|e| invalid(format!("cannot write {}: {e}", path.display())))?,
            None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| Failure::Numerical(e.to_string()))?,
        }
        Ok(failed)
    });
    match result {
        Ok(false) => 0,
        Ok(true) => 1,
        Err(e) => {
            eprintln!("error: {}", e.message());
            e.code()
        }
    }
}

/// Runs a parsed command. The flag is set when a check ran but failed.
fn run(cli: Cli) -> Result<(String, bool), Failure> {
    let format = cli.format;
    let pick = |default: Format| format.unwrap_or(default);
    let mut failed = false;
    let output = match cli.command {
        Command::Transition { partition, moments } => {
            let coords = partition_to_coords(&partition);
            let mu = transition_of_coords(&coords);
            let atoms = mu.exact_atoms.clone().expect("partitions give exact atoms");
            match pick(Format::Json) {
                Format::Csv => {
                    let mut s = String::from("x,mass\n");
                    for (x, w) in &atoms {
                        s.push_str(&format!("{},{}\n", format_rational(x), format_rational(w)));
                    }
                    Output::Csv(s)
                }
                Format::Json => {
                    let m = coords_moments(&coords, moments);
                    Output::Json(document(
                        "transition",
                        json!({
                            "partition": partition.to_string(),
                            "minima": coords.minima(),
                            "maxima": coords.maxima(),
                            "atoms": atoms.iter().map(|(x, w)| [format_rational(x), format_rational(w)]).collect::<Vec<_>>(),
                            "moments": m.values.iter().map(format_rational).collect::<Vec<_>>(),
                        }),
                    ))
                }
            }
        }
        Command::Profile { partition, c, grid } => {
            let (w, label) = match (partition, c) {
                (Some(p), _) => (coords_to_profile(&partition_to_coords(&p)), json!({ "partition": p.to_string() })),
                (None, Some(c)) => {
                    let w = diagram_from_rayleigh_with(&tau_c_measure(scaling(c)?), grid)?;
                    (w, json!({ "c": c, "grid": grid }))
                }
                (None, None) => return Err(invalid("one of --partition or --c is required")),
            };
            match pick(Format::Csv) {
                Format::Csv => Output::Csv(profile_csv(&w)),
                Format::Json => {
                    let mut doc = label;
                    doc["diagram"] = serde_json::to_value(&w).expect("diagrams serialize");
                    Output::Json(document("profile", doc))
                }
            }
        }
        Command::LimitShape { c, grid } => {
            let sc = scaling(c)?;
            if grid < 2 {
                return Err(invalid("--grid must be at least 2"));
            }
            let b = c + 3.0;
            let w = ContinuousDiagram::sample(|u| p_c_profile(sc, u), -b, b, grid);
            match pick(Format::Csv) {
                Format::Csv => Output::Csv(profile_csv(&w)),
                Format::Json => {
                    let (lo, hi) = sc.support();
                    Output::Json(document(
                        "limit-shape",
                        json!({
                            "c": c,
                            "regime": sc.regime(),
                            "support": [lo, hi],
                            "diagram": w,
                        }),
                    ))
                }
            }
        }
        Command::Tau { c } => {
            let tau = tau_c_measure(scaling(c)?);
            match pick(Format::Json) {
                Format::Json => Output::Json(document("tau", json!({ "c": c, "measure": tau }))),
                Format::Csv => {
                    let mut s = String::from("kind,x,value\n");
                    for (x, w) in &tau.atoms {
                        s.push_str(&format!("atom,{},{}\n", f(*x), f(*w)));
                    }
                    if let Some(d) = &tau.density {
                        let g = d.to_grid(young_calculus::measure::SERIALIZED_CELLS);
                        for (k, v) in g.values.iter().enumerate() {
                            s.push_str(&format!("density,{},{}\n", f(g.u0 + g.du * k as f64), f(*v)));
                        }
                    }
                    Output::Csv(s)
                }
            }
        }
        Command::Character { partition, cycle_type } => {
            let chi = character(&partition, &cycle_type)?;
            let norm = normalized_character(&partition, &cycle_type)?;
            let dim = dim_irrep(&partition);
            match pick(Format::Json) {
                Format::Json => Output::Json(document(
                    "character",
                    json!({
                        "partition": partition.to_string(),
                        "cycle_type": cycle_type.to_string(),
                        "character": chi.to_string(),
                        "dimension": dim.to_string(),
                        "normalized": format_rational(&norm),
                    }),
                )),
                Format::Csv => Output::Csv(format!(
                    "partition,cycle_type,character,dimension,normalized\n\"{partition}\",\"{cycle_type}\",{chi},{dim},{}\n",
                    format_rational(&norm)
                )),
            }
        }
        Command::Weights { q, n } => {
            let m = schur_weyl_weights(q, n)?;
            measure_output("weights", &m, json!({ "q": q, "N": n }), pick(Format::Csv))
        }
        Command::Decompose { q, state } => {
            let psi = parse_state(&state, q)?;
            let m = decompose_central_function(&psi)?;
            measure_output("decompose", &m, json!({ "q": q, "state": psi.describe() }), pick(Format::Csv))
        }
        Command::Sample { q, n, count, seed } => {
            let samples = match n {
                Some(n) => sample_schur_weyl(q, n, count, seed)?,
                None => sample_plancherel(q, count, seed)?,
            };
            match pick(Format::Csv) {
                Format::Csv => {
                    let mut s = String::from("index,partition\n");
                    for (i, l) in samples.iter().enumerate() {
                        s.push_str(&format!("{i},\"{l}\"\n"));
                    }
                    Output::Csv(s)
                }
                Format::Json => Output::Json(document(
                    "sample",
                    json!({
                        "q": q,
                        "N": n,
                        "count": count,
                        "seed": seed,
                        "samples": samples.iter().map(ToString::to_string).collect::<Vec<_>>(),
                    }),
                )),
            }
        }
        Command::Factorization { q, n, state, order } => {
            let psi = match (n, state) {
                (Some(n), _) => CentralFunction::TensorTrace { q, n },
                (None, Some(s)) => parse_state(&s, q)?,
                (None, None) => return Err(invalid("one of --N or --state is required")),
            };
            let report = factorization_check(&psi, order)?;
            match pick(Format::Json) {
                Format::Json => {
                    let mut doc = serde_json::to_value(&report).expect("reports serialize");
                    doc["function"] = json!(psi.describe());
                    Output::Json(document("factorization", doc))
                }
                Format::Csv => {
                    let mut s = String::from("l,c_l,max_abs,max_defect\n");
                    for l in 0..report.order {
                        s.push_str(&format!("{},{},{},{}\n", l + 1, f(report.c[l]), report.max_abs[l], report.max_defect[l]));
                    }
                    s.push_str(&format!("delta,{},,\n", f(report.delta)));
                    Output::Csv(s)
                }
            }
        }
        Command::Concentration { q, n, graded, l, count, seed, profile } => {
            let source = match (n, graded) {
                (Some(n), _) => Source::SchurWeyl { q, n },
                (None, Some(g)) => Source::Graded { q, state: parse_graded(&g)? },
                (None, None) => Source::Plancherel { q },
            };
            let r = concentration_experiment(&source, l, count, seed, profile)?;
            match pick(Format::Json) {
                Format::Json => Output::Json(document("concentration", serde_json::to_value(&r).expect("results serialize"))),
                Format::Csv => Output::Csv(format!("{}\n{}\n", ExperimentResult::CSV_HEADER, r.csv_row())),
            }
        }
        Command::FromCumulants { w, levy, grid } => {
            let (cumulants, input) = match (w, levy) {
                (Some(w), _) => {
                    let input = json!({ "w": w });
                    (cumulants_from_list(w)?, input)
                }
                (None, Some(atoms)) => {
                    let atoms = atoms
                        .iter()
                        .map(|a| {
                            let (t, m) = a.split_once(':').ok_or_else(|| invalid(format!("Lévy atom {a:?} is not t:mass")))?;
                            let parse = |s: &str| s.trim().parse::<f64>().map_err(|_| invalid(format!("bad number {s:?}")));
                            Ok((parse(t)?, parse(m)?))
                        })
                        .collect::<Result<Vec<_>, Failure>>()?;
                    let input = json!({ "levy": atoms });
                    (levy_khintchine_cumulants(&LevyData::atomic(atoms)?, DEFAULT_ORDER)?, input)
                }
                (None, None) => return Err(invalid("one of --w or --levy is required")),
            };
            let result = limit_pipeline(&cumulants, &InversionOptions::default())?;
            let (lo, hi) = result.window;
            let diagram = ContinuousDiagram::sample(|u| result.diagram.eval(u), lo, hi, grid.max(2));
            match pick(Format::Csv) {
                Format::Csv => Output::Csv(profile_csv(&diagram)),
                Format::Json => {
                    let mut doc = input;
                    doc["cumulants"] = json!(cumulants.values);
                    doc["window"] = json!([lo, hi]);
                    doc["transition"] = serde_json::to_value(&result.transition).expect("measures serialize");
                    doc["diagram"] = serde_json::to_value(&diagram).expect("diagrams serialize");
                    Output::Json(document("from-cumulants", doc))
                }
            }
        }
        Command::GammaCheck { q, rep, order } => {
            let r = Representation::new(rep, q).map_err(|e| match e {
                Error::InvalidRepresentation(m) => Failure::Numerical(format!("representation check: {m}")),
                other => other.into(),
            })?;
            let gamma = gamma_moments(&r, &GammaState::NormalizedTrace, order)?;
            let psi = r.central_function()?;
            let measure = decompose_central_function(&psi)?;
            let mean = mean_moments(&measure, order)?;
            let agree = gamma == mean;
            failed = !agree;
            let show = |v: &[BigRational]| v.iter().map(format_rational).collect::<Vec<_>>();
            match pick(Format::Json) {
                Format::Json => Output::Json(document(
                    "gamma-check",
                    json!({
                        "q": q,
                        "rep": rep.to_string(),
                        "dimension": r.dim(),
                        "relations": "ok",
                        "gamma_moments": show(&gamma.values),
                        "mean_moments": show(&mean.values),
                        "agree": agree,
                    }),
                )),
                Format::Csv => {
                    let mut s = String::from("k,gamma,mean\n");
                    for k in 1..=order {
                        s.push_str(&format!("{k},{},{}\n", format_rational(&gamma.get(k)), format_rational(&mean.get(k))));
                    }
                    Output::Csv(s)
                }
            }
        }
        Command::Check { criterion } => {
            let which: Vec<usize> = match criterion {
                Some(k) if (1..=criteria::COUNT).contains(&k) => vec![k],
                Some(k) => return Err(invalid(format!("criteria are numbered 1..={}, got {k}", criteria::COUNT))),
                None => (1..=criteria::COUNT).collect(),
            };
            let reports: Vec<criteria::Report> = which.into_iter().map(criteria::run).collect();
            failed = reports.iter().any(|r| !r.passed);
            match pick(Format::Csv) {
                Format::Csv => Output::Csv(reports.iter().map(|r| r.line() + "\n").collect()),
                Format::Json => Output::Json(document("check", json!({ "reports": reports }))),
            }
        }
    };
    Ok((output.render(), failed))
}

fn measure_output(command: &str, m: &YoungMeasure, mut label: Value, format: Format) -> Output {
    match format {
        Format::Csv => Output::Csv(measure_csv(m)),
        Format::Json => {
            label["measure"] = serde_json::to_value(m).expect("measures serialize");
            Output::Json(document(command, label))
        }
    }
}

/// A cumulant list; `(0, 1, c, c², …)` is recognized as free Poisson so
/// the closed-form R-transform is used.
fn cumulants_from_list(w: Vec<f64>) -> Result<CumulantSequence<f64>, Failure> {
    if w.len() < 2 {
        return Err(invalid("--w needs at least w_1 and w_2"));
    }
    if w.len() >= 3 {
        let c = w[2];
        let geometric = w[0] == 0.0
            && w[1] == 1.0
            && w.iter().enumerate().skip(2).all(|(k, &v)| (v - c.powi(k as i32 - 1)).abs() <= 1e-12 * (1.0 + v.abs()));
        if geometric && c >= 0.0 {
            return Ok(free_poisson_cumulants(c, w.len().max(DEFAULT_ORDER))?);
        }
    }
    Ok(CumulantSequence::new(w))
}
