use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use lcaudit::audit::Condition;
use lcaudit::bounds::DEFAULT_STRATEGY_CAP;
use lcaudit::fisher::{self, Prior, StatFamily, Statistic};
use lcaudit::format::{parse_model, write_model, ModelFile};
use lcaudit::report::{
    self, parse_checks, resolve_tolerance, Check, Report, ToleranceInfo, TOL_ENV,
};
use lcaudit::scenario::{
    build_deterministic_local, build_pr_box, build_setting_dependent, build_singlet, Phenomenology,
    Scenario,
};
use lcaudit::{sample, ProbTable};

#[derive(Parser)]
#[command(
    name = "lcaudit",
    version,
    about = "Audit candidate theories of a Bell experiment"
)]
struct Cli {
    /// Comparison and normalization tolerance (overrides LCAUDIT_TOL)
    #[arg(long, global = true)]
    tol: Option<f64>,

    /// Report format
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Seed for randomly generated models
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Machine,
}

#[derive(Subcommand)]
enum Command {
    /// Run local-causality checks on a bell-model or phenomenology file
    Audit {
        file: PathBuf,
        /// Comma-separated check ids, or `all`
        #[arg(long)]
        checks: Option<String>,
        /// Largest number of deterministic strategies to enumerate
        #[arg(long, default_value_t = DEFAULT_STRATEGY_CAP)]
        cap: usize,
    },
    /// CHSH value of a model's predictions
    Chsh {
        file: PathBuf,
        /// Settings as a1,a2,b1,b2 (default: the first two of each wing)
        #[arg(long)]
        settings: Option<String>,
    },
    /// Membership in the local-hidden-variable polytope
    Lhv {
        file: PathBuf,
        #[arg(long, default_value_t = DEFAULT_STRATEGY_CAP)]
        cap: usize,
    },
    /// Sufficiency of a statistic and the minimal sufficient partition
    Suff {
        family: PathBuf,
        /// `sum`, `identity`, `constant` or a statistic file
        #[arg(long)]
        statistic: Option<String>,
        /// Prior weights over the parameters (default: uniform)
        #[arg(long, value_delimiter = ',')]
        prior: Option<Vec<f64>>,
    },
    /// Print a built-in model as a model file
    Gen {
        #[arg(value_enum)]
        model: Builtin,
        /// Alice's angles for `singlet` (radians, or with a `deg` suffix)
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        angles_a: Option<Vec<String>>,
        /// Bob's angles for `singlet`
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        angles_b: Option<Vec<String>>,
        /// Parameters for `bernoulli`
        #[arg(long, value_delimiter = ',')]
        params: Option<Vec<f64>>,
        /// Number of i.i.d. trials for `bernoulli`
        #[arg(long, default_value_t = 1)]
        trials: usize,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Builtin {
    Singlet,
    PrBox,
    DeterministicLocal,
    SettingDependent,
    WhiteNoise,
    Random,
    RandomLhv,
    Bernoulli,
}

/// A failure that maps to exit status 2.
struct Usage(String);

impl<E: std::fmt::Display> From<E> for Usage {
    fn from(e: E) -> Self {
        Usage(e.to_string())
    }
}

fn load(path: &Path, tol: &ToleranceInfo) -> Result<ModelFile, Usage> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Usage(format!("cannot read {}: {e}", path.display())))?;
    parse_model(&text, &tol.tolerance()).map_err(|e| Usage(format!("{}: {e}", path.display())))
}

fn phenomenology(m: ModelFile, path: &Path) -> Result<Phenomenology, Usage> {
    match m {
        ModelFile::BellModel(m) => Ok(m.predict()),
        ModelFile::Phenomenology(p) => Ok(p),
        other => Err(Usage(format!(
            "{}: expected a bell-model or phenomenology, found {}",
            path.display(),
            other.kind()
        ))),
    }
}

fn parse_angle(s: &str) -> Result<f64, Usage> {
    let t = s.trim();
    let (digits, deg) = match t.strip_suffix("deg").or_else(|| t.strip_suffix('°')) {
        Some(d) => (d, true),
        None => (t.strip_suffix("rad").unwrap_or(t), false),
    };
    let x: f64 = digits
        .trim()
        .parse()
        .map_err(|_| Usage(format!("cannot read '{s}' as an angle")))?;
    Ok(if deg { x.to_radians() } else { x })
}

fn generate(
    model: Builtin,
    angles: (Option<Vec<String>>, Option<Vec<String>>),
    params: Option<Vec<f64>>,
    trials: usize,
    seed: Option<u64>,
) -> Result<ModelFile, Usage> {
    let seeded = || {
        let seed = seed.unwrap_or(sample::DEFAULT_SEED);
        eprintln!("seed: {seed}");
        sample::rng(seed)
    };
    Ok(match model {
        Builtin::Singlet => {
            let read = |v: Option<Vec<String>>, default: [&str; 2]| -> Result<Vec<f64>, Usage> {
                match v {
                    Some(v) => v.iter().map(|s| parse_angle(s)).collect(),
                    None => default.iter().map(|s| parse_angle(s)).collect(),
                }
            };
            let a = read(angles.0, ["0deg", "90deg"])?;
            let b = read(angles.1, ["45deg", "135deg"])?;
            ModelFile::BellModel(build_singlet(&a, &b)?)
        }
        Builtin::PrBox => ModelFile::BellModel(build_pr_box()),
        Builtin::DeterministicLocal => {
            let r = |x: &str, y: &str| -> BTreeMap<String, String> {
                [
                    ("0".to_string(), x.to_string()),
                    ("1".to_string(), y.to_string()),
                ]
                .into()
            };
            ModelFile::BellModel(build_deterministic_local(
                &Scenario::chsh(),
                &r("+1", "-1"),
                &r("+1", "+1"),
            )?)
        }
        Builtin::SettingDependent => ModelFile::BellModel(build_setting_dependent()),
        Builtin::WhiteNoise => {
            let s = Scenario::chsh();
            let t = ProbTable::uniform(s.outcome_axes())?;
            ModelFile::Phenomenology(Phenomenology::new(s.clone(), vec![t; s.n_pairs()])?)
        }
        Builtin::Random => ModelFile::BellModel(sample::bell_model(&mut seeded())),
        Builtin::RandomLhv => ModelFile::BellModel(sample::lhv_mixture(&mut seeded())),
        Builtin::Bernoulli => {
            let p = params.unwrap_or_else(|| vec![0.25, 0.5, 0.75]);
            let f = StatFamily::bernoulli(&p)?;
            ModelFile::StatFamily(fisher::iid_product(&f, trials, fisher::DEFAULT_SIZE_CAP)?)
        }
    })
}

fn statistic(choice: &str, f: &StatFamily, tol: &ToleranceInfo) -> Result<Statistic, Usage> {
    let domain = f.outcomes();
    Ok(match choice {
        "sum" => Statistic::sum(domain)?,
        "identity" => Statistic::identity(domain)?,
        "constant" => Statistic::constant(domain)?,
        path => match load(Path::new(path), tol)? {
            ModelFile::Statistic(t) => t,
            other => {
                return Err(Usage(format!(
                    "{path}: expected a statistic, found {}",
                    other.kind()
                )))
            }
        },
    })
}

fn run(cli: Cli) -> Result<Option<Report>, Usage> {
    let env = std::env::var(TOL_ENV).ok();
    let tol = resolve_tolerance(cli.tol, env.as_deref())?;
    let subject = |p: &Path| p.display().to_string();
    let report = match cli.command {
        Command::Audit { file, checks, cap } => {
            let selected = checks.as_deref().map(parse_checks).transpose()?;
            match load(&file, &tol)? {
                ModelFile::BellModel(m) => {
                    let selected = selected.unwrap_or_else(Check::defaults);
                    report::run_audit(&m, &selected, tol, &subject(&file), cap)?
                }
                ModelFile::Phenomenology(ph) => {
                    let selected = selected.unwrap_or_else(|| {
                        vec![Check::Condition(Condition::NoSignalling), Check::Lhv]
                    });
                    report::run_phenomenology_audit(&ph, &selected, tol, &subject(&file), cap)?
                }
                other => {
                    return Err(Usage(format!(
                        "{}: cannot audit a {}; use `suff`",
                        file.display(),
                        other.kind()
                    )))
                }
            }
        }
        Command::Chsh { file, settings } => {
            let ph = phenomenology(load(&file, &tol)?, &file)?;
            let labels = match settings {
                Some(s) => {
                    let parts: Vec<String> = s.split(',').map(|x| x.trim().to_string()).collect();
                    let arr: [String; 4] = parts
                        .try_into()
                        .map_err(|_| Usage("--settings takes exactly a1,a2,b1,b2".into()))?;
                    Some(arr)
                }
                None => None,
            };
            report::run_chsh(&ph, labels, tol, &subject(&file))?
        }
        Command::Lhv { file, cap } => {
            let ph = phenomenology(load(&file, &tol)?, &file)?;
            report::run_lhv(&ph, tol, &subject(&file), cap)?
        }
        Command::Suff {
            family,
            statistic: stat,
            prior,
        } => {
            let f = match load(&family, &tol)? {
                ModelFile::StatFamily(f) => f,
                other => {
                    return Err(Usage(format!(
                        "{}: expected a stat-family, found {}",
                        family.display(),
                        other.kind()
                    )))
                }
            };
            let t = stat
                .as_deref()
                .map(|s| statistic(s, &f, &tol))
                .transpose()?;
            let prior = match prior {
                Some(w) => Prior::new(&f, w, &tol.tolerance())?,
                None => Prior::uniform(&f),
            };
            report::run_sufficiency(&f, t.as_ref(), &prior, tol, &subject(&family))?
        }
        Command::Gen {
            model,
            angles_a,
            angles_b,
            params,
            trials,
        } => {
            let m = generate(model, (angles_a, angles_b), params, trials, cli.seed)?;
            print!("{}", write_model(&m));
            return Ok(None);
        }
    };
    Ok(Some(report))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let format = cli.format;
    match run(cli) {
        Ok(None) => ExitCode::SUCCESS,
        Ok(Some(r)) => {
            match format {
                Format::Text => print!("{}", report::render_text(&r)),
                Format::Machine => print!("{}", report::render_machine(&r)),
            }
            ExitCode::from(r.exit_code() as u8)
        }
        Err(Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
