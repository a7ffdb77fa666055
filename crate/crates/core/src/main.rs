use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use holder_metrics::catalog::{parse_domain, standard_catalog, KnownValue};
use holder_metrics::config::{parse_count, Format, Params};
use holder_metrics::error::{Error, Result};
use holder_metrics::report::{analyze, hardy, reduce, AnalysisReport};
use holder_metrics::verify::{run_all, verify_report, Scope};

#[derive(Parser)]
#[command(name = "holder-metrics", version, about = "Hölder exponents, Hardy numbers and bounded reductions of unbounded domains")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List catalog domains with their known exponents and Hardy numbers.
    Catalog {
        /// Substring filter on domain names.
        filter: Option<String>,
        #[command(flatten)]
        flags: Flags,
    },
    /// Hölder exponent by derivative scan and hyperbolic growth, with the pair and geodesic checks.
    Analyze {
        domain: String,
        #[command(flatten)]
        flags: Flags,
    },
    /// Hardy number, the bound against 1/α, and H^p membership.
    Hardy {
        domain: String,
        #[command(flatten)]
        flags: Flags,
    },
    /// Bounded reduction and its distance, density and quasi-hyperbolic checks.
    Reduce {
        domain: String,
        #[command(flatten)]
        flags: Flags,
    },
    /// Run the acceptance criteria on one domain or on `all`.
    Verify {
        domain: String,
        #[command(flatten)]
        flags: Flags,
    },
}

#[derive(Args)]
struct Flags {
    /// Annulus depth [default: 12]
    #[arg(long)]
    depth: Option<u32>,
    /// Sample count, scientific notation allowed [default: 1e5]
    #[arg(long)]
    samples: Option<String>,
    /// RNG seed [default: 0]
    #[arg(long)]
    seed: Option<u64>,
    /// Chordal mesh of boundary nets [default: 1e-3]
    #[arg(long)]
    mesh: Option<f64>,
    /// Tolerance of the headline comparison [default: per check]
    #[arg(long)]
    tol: Option<f64>,
    /// Output format: json or csv [default: json]
    #[arg(long)]
    format: Option<String>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// File of key=value lines overriding defaults; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
}

impl Flags {
    fn params(&self) -> Result<Params> {
        let mut p = Params::default();
        if let Some(path) = &self.config {
            p.apply_config_file(path)?;
        }
        if let Some(v) = self.depth {
            p.depth = v;
        }
        if let Some(v) = &self.samples {
            p.samples = parse_count("samples", v)?;
        }
        if let Some(v) = self.seed {
            p.seed = v;
        }
        if let Some(v) = self.mesh {
            p.mesh = v;
        }
        if let Some(v) = self.tol {
            p.tol = Some(v);
        }
        if let Some(v) = &self.format {
            p.format = v.parse()?;
        }
        p.validate()?;
        Ok(p)
    }
}

fn emit(text: &str, out: &Option<PathBuf>) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Error::BadFlag(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct CatalogRow {
    name: String,
    known_alpha: KnownValue,
    known_hardy: KnownValue,
}

fn catalog(filter: Option<&str>, params: &Params) -> String {
    let rows: Vec<CatalogRow> = standard_catalog()
        .into_iter()
        .filter(|d| filter.is_none_or(|f| d.name().contains(f)))
        .map(|d| CatalogRow {
            name: d.name().to_string(),
            known_alpha: d.known_alpha().clone(),
            known_hardy: d.known_hardy().clone(),
        })
        .collect();
    match params.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&rows).expect("catalog serializes");
            s.push('\n');
            s
        }
        Format::Csv => {
            let mut w = csv::WriterBuilder::new()
                .terminator(csv::Terminator::Any(b'\n'))
                .from_writer(Vec::new());
            w.write_record(["name", "known_alpha", "alpha_provenance", "known_hardy", "hardy_provenance"])
                .expect("in-memory writes");
            for r in &rows {
                w.write_record([
                    r.name.clone(),
                    r.known_alpha.to_string(),
                    r.known_alpha.provenance().to_string(),
                    r.known_hardy.to_string(),
                    r.known_hardy.provenance().to_string(),
                ])
                .expect("in-memory writes");
            }
            String::from_utf8(w.into_inner().expect("in-memory writes")).expect("utf-8")
        }
    }
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Catalog { filter, flags } => {
            let params = flags.params()?;
            emit(&catalog(filter.as_deref(), &params), &flags.out)?;
            Ok(true)
        }
        Command::Analyze { domain, flags } => single(&domain, &flags, analyze),
        Command::Hardy { domain, flags } => single(&domain, &flags, hardy),
        Command::Reduce { domain, flags } => single(&domain, &flags, reduce),
        Command::Verify { domain, flags } => {
            let params = flags.params()?;
            let scope = if domain == "all" {
                Scope::All
            } else {
                Scope::Domain(parse_domain(&domain)?)
            };
            let results = run_all(&scope, &params, |r| {
                eprintln!(
                    "[{}] {:02} {} ({:.1} s) {}",
                    if r.pass { "PASS" } else { "FAIL" },
                    r.id,
                    r.name,
                    r.seconds,
                    r.detail
                );
            })?;
            let report = verify_report(&domain, &params, &results);
            emit(&report.render(), &flags.out)?;
            Ok(report.all_pass())
        }
    }
}

fn single(
    domain: &str,
    flags: &Flags,
    command: fn(&holder_metrics::catalog::DomainSpec, &Params) -> Result<AnalysisReport>,
) -> Result<bool> {
    let params = flags.params()?;
    let d = parse_domain(domain)?;
    emit(&command(&d, &params)?.render(), &flags.out)?;
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e @ (Error::UnknownDomain(_) | Error::BadFlag(_) | Error::BadParameter(_))) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}
