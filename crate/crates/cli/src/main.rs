use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gramstab::doc::SystemDocument;
use gramstab::matcrit::{char_poly, theorem1_verdicts};
use gramstab::mech::{circulatory_verdicts, gyroscopic_verdict_thm4, normal_form};
use gramstab::oracle::{check_sufficiency, classify_spectrum, find_roots, verify_instability, Context};
use gramstab::polycrit::{
    complex_root_certificate, least_gram, newton_power_sums, prop1_verdicts, prop2_verdicts,
    DEFAULT_GRAM_SIZE,
};
use gramstab::sweep::{emit_csv, emit_svg, run_sweep, Family, SweepConfig};
use gramstab::{CriterionVerdict, Error, MonicPolynomial, RealSquareMatrix, SpectralReport};

#[derive(Parser)]
#[command(name = "gramstab", version, about = "Gramian instability criteria for polynomials, matrices and mechanical systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Criteria on a monic polynomial α^n + a1 α^(n-1) + ... + an.
    CheckPoly {
        /// Coefficients a1,...,an.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        coeffs: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_values = ["prop1", "prop2", "gram"])]
        criteria: Vec<PolyCriterion>,
        /// Largest Gram subset searched (default 3, capped at the degree).
        #[arg(long)]
        max_gram_size: Option<usize>,
        #[arg(long)]
        oracle: bool,
    },
    /// Complex-eigenvalue criteria on the matrix `M` of a document.
    CheckMatrix(CheckArgs),
    /// Instability criteria for q'' + (K + C) q = 0.
    CheckCirculatory(CheckArgs),
    /// Instability criterion for q'' + G q' + K q = 0.
    CheckGyroscopic(CheckArgs),
    /// Normal form of M q'' + A2 q' + A3 q = 0.
    NormalForm {
        #[arg(long)]
        input: PathBuf,
    },
    /// Evaluate criteria over a (k, c) grid of an example family.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    oracle: bool,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    family: String,
    #[arg(long, allow_hyphen_values = true)]
    kmin: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    kmax: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    cmin: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    cmax: Option<f64>,
    #[arg(long)]
    nk: Option<usize>,
    #[arg(long)]
    nc: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    criteria: Vec<String>,
    #[arg(long)]
    oracle: bool,
    #[arg(long)]
    out_csv: PathBuf,
    #[arg(long)]
    out_svg: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum PolyCriterion {
    Prop1,
    Prop2,
    Gram,
}

/// Why a run failed, mapped to the exit code.
enum Failure {
    Lib(Error),
    Refuted,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type Outcome = Result<(), Failure>;

fn print_verdict(v: &CriterionVerdict) {
    println!(
        "{} fired={} lhs={:e} rhs={:e} margin={:e}",
        v.id,
        u8::from(v.fired),
        v.lhs,
        v.rhs,
        v.margin
    );
}

fn print_verdicts(verdicts: &[CriterionVerdict]) {
    verdicts.iter().for_each(print_verdict);
}

/// Prints the oracle line and fails if any fired verdict is refuted.
fn report_oracle(verdicts: &[CriterionVerdict], report: &SpectralReport, context: Context) -> Outcome {
    let consistency = check_sufficiency(verdicts, report, context);
    println!(
        "oracle nonreal={} pos_real={} consistency={}",
        u8::from(report.has_nonreal),
        u8::from(report.has_positive_real),
        if consistency.passed() { "PASS" } else { "FAIL" }
    );
    for v in &consistency.violations {
        eprintln!("{v}");
    }
    if consistency.passed() {
        Ok(())
    } else {
        Err(Failure::Refuted)
    }
}

fn load(path: &Path) -> Result<SystemDocument, Error> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
    SystemDocument::parse(&text)
}

fn check_poly(coeffs: Vec<f64>, criteria: &[PolyCriterion], max_gram_size: Option<usize>, oracle: bool) -> Outcome {
    let poly = MonicPolynomial::new(coeffs)?;
    let max_gram_size = max_gram_size.unwrap_or(DEFAULT_GRAM_SIZE.min(poly.degree()));
    let mut verdicts = Vec::new();
    if criteria.contains(&PolyCriterion::Prop1) {
        verdicts.extend(prop1_verdicts(&newton_power_sums(&poly, 4)?)?);
    }
    if criteria.contains(&PolyCriterion::Prop2) {
        verdicts.extend(prop2_verdicts(&poly)?);
    }
    if criteria.contains(&PolyCriterion::Gram) {
        let cert = match complex_root_certificate(&poly, max_gram_size)? {
            Some(c) => c,
            None => least_gram(&poly, max_gram_size)?,
        };
        verdicts.push(cert.to_verdict());
    }
    print_verdicts(&verdicts);
    if oracle {
        let report = classify_spectrum(&find_roots(&poly)?);
        report_oracle(&verdicts, &report, Context::Poly)?;
    }
    Ok(())
}

fn check_matrix(args: &CheckArgs) -> Outcome {
    let m: RealSquareMatrix = load(&args.input)?.matrix("M")?;
    let verdicts = theorem1_verdicts(&m);
    print_verdicts(&verdicts);
    if args.oracle {
        let report = classify_spectrum(&find_roots(&char_poly(&m)?)?);
        report_oracle(&verdicts, &report, Context::Matrix)?;
    }
    Ok(())
}

fn check_circulatory(args: &CheckArgs) -> Outcome {
    let sys = load(&args.input)?.circulatory()?;
    let verdicts = circulatory_verdicts(&sys);
    print_verdicts(&verdicts);
    if args.oracle {
        let spectrum = verify_instability(&sys)?;
        report_oracle(&verdicts, &spectrum.lambda, Context::Circulatory)?;
    }
    Ok(())
}

fn check_gyroscopic(args: &CheckArgs) -> Outcome {
    let sys = load(&args.input)?.gyroscopic()?;
    let verdicts = [gyroscopic_verdict_thm4(&sys)];
    print_verdicts(&verdicts);
    if args.oracle {
        let spectrum = verify_instability(&sys)?;
        report_oracle(&verdicts, &spectrum.lambda, Context::Gyroscopic)?;
    }
    Ok(())
}

fn print_matrix(name: &str, m: &RealSquareMatrix) {
    println!("{name}");
    for row in m.rows() {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:e}")).collect();
        println!("  {}", cells.join(" "));
    }
}

fn normal_form_cmd(input: &Path) -> Outcome {
    let (mass, a2, a3) = load(input)?.lumped()?;
    let nf = normal_form(&mass, &a2, &a3)?;
    print_matrix("D", &nf.d);
    print_matrix("G", &nf.g);
    print_matrix("K", &nf.k);
    print_matrix("C", &nf.c);
    println!("classification {}", nf.classification);
    Ok(())
}

fn create(path: &Path) -> Result<BufWriter<File>, Error> {
    Ok(BufWriter::new(File::create(path)?))
}

fn sweep(args: SweepArgs) -> Outcome {
    let family: Family = args.family.parse()?;
    let base = SweepConfig::new(family);
    let cfg = SweepConfig {
        k_min: args.kmin.unwrap_or(base.k_min),
        k_max: args.kmax.unwrap_or(base.k_max),
        c_min: args.cmin.unwrap_or(base.c_min),
        c_max: args.cmax.unwrap_or(base.c_max),
        nk: args.nk.unwrap_or(base.nk),
        nc: args.nc.unwrap_or(base.nc),
        criteria: if args.criteria.is_empty() { base.criteria.clone() } else { args.criteria },
        oracle: args.oracle,
        family,
    };
    let result = run_sweep(&cfg)?;

    let mut csv = create(&args.out_csv)?;
    emit_csv(&result, &mut csv)?;
    csv.flush().map_err(Error::from)?;
    if let Some(path) = &args.out_svg {
        let mut svg = create(path)?;
        emit_svg(&result, &mut svg)?;
        svg.flush().map_err(Error::from)?;
    }

    for id in &cfg.criteria {
        println!("{id} fired_cells={}", result.fired_count(id));
    }
    let errors = result.cells.iter().filter(|c| c.error.is_some()).count();
    if errors > 0 {
        eprintln!("{errors} cells failed to evaluate");
    }
    if cfg.oracle {
        let unstable = result.cells.iter().filter(|c| c.oracle_unstable == Some(true)).count();
        let refuted = result
            .cells
            .iter()
            .filter(|c| !c.excluded && c.oracle_unstable == Some(false) && c.fired.iter().any(|&f| f))
            .count();
        println!(
            "oracle unstable_cells={unstable} refuted_cells={refuted} consistency={}",
            if refuted == 0 { "PASS" } else { "FAIL" }
        );
        if refuted > 0 {
            return Err(Failure::Refuted);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let outcome = match Cli::parse().command {
        Command::CheckPoly { coeffs, criteria, max_gram_size, oracle } => {
            check_poly(coeffs, &criteria, max_gram_size, oracle)
        }
        Command::CheckMatrix(args) => check_matrix(&args),
        Command::CheckCirculatory(args) => check_circulatory(&args),
        Command::CheckGyroscopic(args) => check_gyroscopic(&args),
        Command::NormalForm { input } => normal_form_cmd(&input),
        Command::Sweep(args) => sweep(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Refuted) => ExitCode::from(3),
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            match e {
                Error::InvalidInput(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}
