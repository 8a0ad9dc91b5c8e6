//! Command-line front end. Subcommands generate instances, normalize
//! sets, build encodings, run the witness test, and build or verify
//! ladder certificates.
//!
//! Exit codes: 0 on success, 2 on validation or precondition failure,
//! 3 when a verification verdict is negative, 64 on usage errors.
//! Output is byte-identical across identical invocations; `--timestamp`
//! opts into a header line that breaks that on purpose.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use zextract_core::encode::encode;
use zextract_core::extraction::{
    arithmetic_set, gap_family, index_windows, perturbed_arithmetic_set, w_test,
};
use zextract_core::formula::{eval_formula, read_formula_file};
use zextract_core::integers::{
    pick_level, verify_certificate, window_check, windows_csv, ExtractionCertificate,
    extract_integers,
};
use zextract_core::io::{read_fn, read_json, read_set, to_json_string, write_fn, write_set};
use zextract_core::ladder::{build_ladder, plant_compact_ladder, plant_ladder, verify_ladder, Ladder};
use zextract_core::normalize::{closedize, default_schedule, isolate, shift_positive, space_out};
use zextract_core::subgroups::two_subgroups;
use zextract_core::tupling::tuple_encode;
use zextract_core::{DiscreteSet, Error, Rational, Result};

#[derive(Parser)]
#[command(name = "zextract", version, about = "Exact rational toolkit for discrete-set certificates")]
struct Cli {
    /// Prefix stdout with a generation-time header (breaks determinism).
    #[arg(long, global = true)]
    timestamp: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate instance files.
    #[command(subcommand)]
    Gen(GenCommand),
    /// Order-preserving set normalizations.
    #[command(subcommand)]
    Normalize(NormalizeCommand),
    /// Encode a positive set with anchored payload windows.
    Encode(EncodeArgs),
    /// Decode values of an encoding.
    Decode(DecodeArgs),
    /// Build the tuple coding of a set.
    Tuple(TupleArgs),
    /// Run the witness test over a sliding-window family.
    ExtractW(ExtractWArgs),
    /// Build, verify, or plant ladders.
    #[command(subcommand)]
    Ladder(LadderCommand),
    /// Print the level picked for a ladder.
    Level(LevelArgs),
    /// Check the index-map windows of a leveled ladder.
    Windows(WindowsArgs),
    /// Run the full integer-extraction pipeline to a certificate.
    ExtractInt(ExtractIntArgs),
    /// Evaluate a formula file.
    Eval(EvalArgs),
}

#[derive(Subcommand)]
enum GenCommand {
    /// Union of two cyclic groups of rationals up to an exponent bound.
    TwoSubgroups(TwoSubgroupsArgs),
    /// A planted ladder instance: set, function, and ladder files.
    PlantedLadder(PlantArgs),
    /// An arithmetic progression, optionally perturbed.
    Arithmetic(ArithmeticArgs),
}

#[derive(Args)]
struct TwoSubgroupsArgs {
    /// First generator, as p or p/q.
    #[arg(long)]
    alpha: String,
    /// Second generator, as p or p/q.
    #[arg(long)]
    beta: String,
    /// Largest exponent magnitude to include.
    #[arg(long)]
    exp: usize,
    /// Set file to write; stdout when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct PlantArgs {
    /// Ladder depth.
    #[arg(long)]
    depth: usize,
    /// Use the compact planting with small numerators.
    #[arg(long)]
    compact: bool,
    /// Directory for planted.set, planted.fn, and ladder.json.
    #[arg(long)]
    output: PathBuf,
}

#[derive(Args)]
struct ArithmeticArgs {
    /// Common difference, as p or p/q.
    #[arg(long)]
    unit: String,
    /// Number of elements.
    #[arg(long)]
    count: usize,
    /// Apply the bounded deterministic perturbation.
    #[arg(long)]
    perturb: bool,
    /// Seed for the perturbation stream.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Set file to write; stdout when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum NormalizeCommand {
    /// Move the set into the positive rationals, preserving order.
    Shift(MappedArgs),
    /// Spread the set so adjacent gaps are at least one.
    Space(MappedArgs),
    /// Keep the elements isolated at a given radius.
    Isolate(IsolateArgs),
    /// Sample the closedness profile along a shrinking schedule.
    Closedize(ClosedizeArgs),
}

#[derive(Args)]
struct MappedArgs {
    /// Input set file.
    #[arg(long)]
    input: PathBuf,
    /// Set file for the image; stdout when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Optional JSON file for the recorded point map.
    #[arg(long)]
    map_output: Option<PathBuf>,
}

#[derive(Args)]
struct IsolateArgs {
    /// Input set file.
    #[arg(long)]
    input: PathBuf,
    /// Isolation radius, as p or p/q.
    #[arg(long)]
    eps: String,
    /// Set file to write; stdout when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ClosedizeArgs {
    /// Input set file.
    #[arg(long)]
    input: PathBuf,
    /// Tolerance bounding the schedule from above.
    #[arg(long)]
    eps: String,
    /// Comma-separated decreasing radii; a default schedule when omitted.
    #[arg(long)]
    schedule: Option<String>,
    /// CSV file to write; stdout when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct EncodeArgs {
    /// Input set file.
    #[arg(long)]
    input: PathBuf,
    /// Encoding JSON to write; stdout when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct DecodeArgs {
    /// Encoding JSON produced by `encode`.
    #[arg(long)]
    input: PathBuf,
    /// Single coded value to decode; the whole image when omitted.
    #[arg(long)]
    value: Option<String>,
    /// Output file; stdout when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct TupleArgs {
    /// Input set file.
    #[arg(long)]
    input: PathBuf,
    /// Tuple length.
    #[arg(long)]
    n: usize,
    /// Tuple-code JSON to write; stdout when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ExtractWArgs {
    /// Input set file.
    #[arg(long)]
    input: PathBuf,
    /// Window span in element indices.
    #[arg(long)]
    span: usize,
    /// Scaling unit for the fibers.
    #[arg(long)]
    unit: String,
    /// Negate the set before building the family.
    #[arg(long)]
    negate: bool,
    /// Target value for the witness test.
    #[arg(long)]
    c: String,
    /// Comma-separated tolerance schedule.
    #[arg(long, default_value = "1/4,1/8,1/16")]
    schedule: String,
    /// Report style.
    #[arg(long, default_value = "text")]
    format: Format,
    /// Output file; stdout when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum LadderCommand {
    /// Search the set for a ladder of the requested depth.
    Build(LadderBuildArgs),
    /// Verify a ladder file against its set and function.
    Verify(LadderVerifyArgs),
    /// Write a planted instance (same outputs as `gen planted-ladder`).
    Plant(PlantArgs),
}

#[derive(Args)]
struct LadderBuildArgs {
    /// Domain set file.
    #[arg(long)]
    set: PathBuf,
    /// Tagged-function file.
    #[arg(long = "fn")]
    func: PathBuf,
    /// Requested depth.
    #[arg(long)]
    depth: usize,
    /// Ladder JSON to write; stdout when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct LadderVerifyArgs {
    /// Domain set file.
    #[arg(long)]
    set: PathBuf,
    /// Tagged-function file.
    #[arg(long = "fn")]
    func: PathBuf,
    /// Ladder or certificate JSON.
    #[arg(long)]
    ladder: PathBuf,
    /// Report style.
    #[arg(long, default_value = "text")]
    format: Format,
}

#[derive(Args)]
struct LevelArgs {
    /// Ladder or certificate JSON.
    #[arg(long)]
    ladder: PathBuf,
    /// Nesting index to split at; the full depth when omitted.
    #[arg(long)]
    n: Option<usize>,
}

#[derive(Args)]
struct WindowsArgs {
    /// Domain set file.
    #[arg(long)]
    set: PathBuf,
    /// Tagged-function file.
    #[arg(long = "fn")]
    func: PathBuf,
    /// Ladder or certificate JSON.
    #[arg(long)]
    ladder: PathBuf,
    /// Level to index at; read from the certificate when omitted.
    #[arg(long)]
    level: Option<String>,
    /// Window depth; the ladder depth when omitted.
    #[arg(long)]
    n: Option<usize>,
    /// Report style (text prints the CSV rows).
    #[arg(long, default_value = "text")]
    format: Format,
    /// CSV file to write in addition to the report.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ExtractIntArgs {
    /// Domain set file.
    #[arg(long)]
    set: PathBuf,
    /// Tagged-function file.
    #[arg(long = "fn")]
    func: PathBuf,
    /// How many integers past the start index to certify.
    #[arg(long)]
    n: usize,
    /// Tolerance, strictly between 0 and 1/2.
    #[arg(long)]
    eps: String,
    /// Certificate JSON to write; stdout when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    /// Formula file with optional set/fn header declarations.
    #[arg(long)]
    input: PathBuf,
    /// Free-variable bindings, NAME=p/q; repeatable.
    #[arg(long = "bind")]
    bindings: Vec<String>,
}

#[derive(Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum Format {
    Text,
    Json,
}

/// A subcommand either succeeds or reports a failed verification; hard
/// errors travel through `Error` and exit 2.
enum Outcome {
    Done,
    VerificationFailed,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{e}");
                    ExitCode::SUCCESS
                }
                _ => {
                    eprint!("{e}");
                    ExitCode::from(64)
                }
            };
        }
    };
    if cli.timestamp {
        let now = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        println!("# generated at unix second {now}");
    }
    match run(cli.command) {
        Ok(Outcome::Done) => ExitCode::SUCCESS,
        Ok(Outcome::VerificationFailed) => ExitCode::from(3),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Result<Outcome> {
    match command {
        Command::Gen(GenCommand::TwoSubgroups(args)) => gen_two_subgroups(args),
        Command::Gen(GenCommand::PlantedLadder(args)) | Command::Ladder(LadderCommand::Plant(args)) => {
            plant(args)
        }
        Command::Gen(GenCommand::Arithmetic(args)) => gen_arithmetic(args),
        Command::Normalize(NormalizeCommand::Shift(args)) => normalize_mapped(args, true),
        Command::Normalize(NormalizeCommand::Space(args)) => normalize_mapped(args, false),
        Command::Normalize(NormalizeCommand::Isolate(args)) => normalize_isolate(args),
        Command::Normalize(NormalizeCommand::Closedize(args)) => normalize_closedize(args),
        Command::Encode(args) => encode_cmd(args),
        Command::Decode(args) => decode_cmd(args),
        Command::Tuple(args) => tuple_cmd(args),
        Command::ExtractW(args) => extract_w_cmd(args),
        Command::Ladder(LadderCommand::Build(args)) => ladder_build(args),
        Command::Ladder(LadderCommand::Verify(args)) => ladder_verify(args),
        Command::Level(args) => level_cmd(args),
        Command::Windows(args) => windows_cmd(args),
        Command::ExtractInt(args) => extract_int_cmd(args),
        Command::Eval(args) => eval_cmd(args),
    }
}

fn rat(text: &str) -> Result<Rational> {
    text.parse()
}

fn parse_schedule(text: &str) -> Result<Vec<Rational>> {
    text.split(',').map(|piece| rat(piece.trim())).collect()
}

fn emit_set(output: &Option<PathBuf>, set: &DiscreteSet) -> Result<()> {
    match output {
        Some(path) => write_set(path, set),
        None => {
            print!("{}", set.to_lines());
            Ok(())
        }
    }
}

fn emit_text(output: &Option<PathBuf>, text: &str) -> Result<()> {
    match output {
        Some(path) => Ok(std::fs::write(path, text)?),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_json<T: serde::Serialize>(output: &Option<PathBuf>, value: &T) -> Result<()> {
    emit_text(output, &to_json_string(value)?)
}

fn gen_two_subgroups(args: TwoSubgroupsArgs) -> Result<Outcome> {
    let group = two_subgroups(&rat(&args.alpha)?, &rat(&args.beta)?, args.exp)?;
    emit_set(&args.output, &group)?;
    Ok(Outcome::Done)
}

fn plant(args: PlantArgs) -> Result<Outcome> {
    let planted = if args.compact {
        plant_compact_ladder(args.depth)?
    } else {
        plant_ladder(args.depth)?
    };
    std::fs::create_dir_all(&args.output)?;
    let set_path = args.output.join("planted.set");
    let fn_path = args.output.join("planted.fn");
    let ladder_path = args.output.join("ladder.json");
    write_set(&set_path, &planted.set)?;
    write_fn(&fn_path, &planted.func)?;
    emit_json(&Some(ladder_path.clone()), &planted.ladder)?;
    println!("{}", set_path.display());
    println!("{}", fn_path.display());
    println!("{}", ladder_path.display());
    Ok(Outcome::Done)
}

fn gen_arithmetic(args: ArithmeticArgs) -> Result<Outcome> {
    let unit = rat(&args.unit)?;
    let set = if args.perturb {
        perturbed_arithmetic_set(&unit, args.count, args.seed)?
    } else {
        arithmetic_set(&unit, args.count)?
    };
    emit_set(&args.output, &set)?;
    Ok(Outcome::Done)
}

fn normalize_mapped(args: MappedArgs, shift: bool) -> Result<Outcome> {
    let input = read_set(&args.input)?;
    let mapped = if shift {
        shift_positive(&input)?
    } else {
        space_out(&input)?
    };
    emit_set(&args.output, &mapped.set)?;
    if let Some(map_path) = &args.map_output {
        emit_json(&Some(map_path.clone()), &mapped.map)?;
    }
    Ok(Outcome::Done)
}

fn normalize_isolate(args: IsolateArgs) -> Result<Outcome> {
    let input = read_set(&args.input)?;
    let kept = isolate(&input, &rat(&args.eps)?)?;
    emit_set(&args.output, &kept)?;
    Ok(Outcome::Done)
}

fn normalize_closedize(args: ClosedizeArgs) -> Result<Outcome> {
    let input = read_set(&args.input)?;
    let eps = rat(&args.eps)?;
    let schedule = match &args.schedule {
        Some(text) => parse_schedule(text)?,
        None => default_schedule(&eps),
    };
    let samples = closedize(&input, &eps, &schedule)?;
    let mut csv = String::from("delta,profile\n");
    for (delta, profile) in &samples {
        csv.push_str(&format!("{delta},{profile}\n"));
    }
    emit_text(&args.output, &csv)?;
    Ok(Outcome::Done)
}

fn encode_cmd(args: EncodeArgs) -> Result<Outcome> {
    let input = read_set(&args.input)?;
    let encoding = encode(&input)?;
    emit_json(&args.output, &encoding)?;
    Ok(Outcome::Done)
}

fn decode_cmd(args: DecodeArgs) -> Result<Outcome> {
    let encoding: zextract_core::encode::Encoding = read_json(&args.input)?;
    match &args.value {
        Some(text) => {
            let decoded = encoding.decode(&rat(text)?)?;
            emit_text(&args.output, &format!("{decoded}\n"))?;
        }
        None => {
            let image = encoding.decoded_image()?;
            emit_set(&args.output, &image)?;
        }
    }
    Ok(Outcome::Done)
}

fn tuple_cmd(args: TupleArgs) -> Result<Outcome> {
    let input = read_set(&args.input)?;
    let code = tuple_encode(&input, args.n)?;
    emit_json(&args.output, &code)?;
    Ok(Outcome::Done)
}

fn extract_w_cmd(args: ExtractWArgs) -> Result<Outcome> {
    let input = read_set(&args.input)?;
    let unit = rat(&args.unit)?;
    let windows = index_windows(&input, args.span)?;
    let family = gap_family(&input, &windows, &unit, args.negate)?;
    for (lo, hi) in family.dropped() {
        eprintln!("note: window ({lo}, {hi}) caught no elements and was dropped");
    }
    let c = rat(&args.c)?;
    let report = w_test(&family, &c, &parse_schedule(&args.schedule)?)?;
    match args.format {
        Format::Json => emit_json(&args.output, &report)?,
        Format::Text => {
            let mut text = String::new();
            if report.holds {
                text.push_str(&format!("witness test holds at {c}\n"));
            } else {
                text.push_str(&format!("witness test fails at {c}\n"));
            }
            for witness in &report.witnesses {
                match (&witness.parameter, &witness.element) {
                    (Some((lo, hi, unit)), Some(element)) => text.push_str(&format!(
                        "eps {}: window ({lo}, {hi}) unit {unit} meets the band at {element}\n",
                        witness.eps
                    )),
                    _ => text.push_str(&format!("eps {}: no fiber qualifies\n", witness.eps)),
                }
            }
            emit_text(&args.output, &text)?;
        }
    }
    Ok(Outcome::Done)
}

fn ladder_build(args: LadderBuildArgs) -> Result<Outcome> {
    let set = read_set(&args.set)?;
    let func = read_fn(&args.func)?;
    let ladder = build_ladder(&set, &func, args.depth)?;
    emit_json(&args.output, &ladder)?;
    Ok(Outcome::Done)
}

fn ladder_verify(args: LadderVerifyArgs) -> Result<Outcome> {
    let set = read_set(&args.set)?;
    let func = read_fn(&args.func)?;
    let ladder: Ladder = read_json(&args.ladder)?;
    let report = verify_ladder(&set, &func, &ladder)?;
    match args.format {
        Format::Json => {
            let shown = serde_json::json!({
                "valid": report.valid(),
                "violations": report
                    .violations
                    .iter()
                    .map(|v| v.to_string())
                    .collect::<Vec<_>>(),
            });
            emit_json(&None, &shown)?;
        }
        Format::Text => {
            if report.valid() {
                println!("ladder valid: depth {}", ladder.depth());
            } else {
                println!("ladder invalid:");
                for violation in &report.violations {
                    println!("  {violation}");
                }
            }
        }
    }
    if report.valid() {
        Ok(Outcome::Done)
    } else {
        Ok(Outcome::VerificationFailed)
    }
}

fn level_cmd(args: LevelArgs) -> Result<Outcome> {
    let ladder: Ladder = read_json(&args.ladder)?;
    let n = args.n.unwrap_or_else(|| ladder.depth());
    let level = pick_level(&ladder, n)?;
    println!("{level}");
    Ok(Outcome::Done)
}

/// Reads the file as a full certificate when possible so the level and
/// depth can default to the recorded ones; otherwise it is a plain
/// ladder and the level must be given.
fn load_leveled_ladder(
    path: &Path,
    level: Option<String>,
    n: Option<usize>,
) -> Result<(Ladder, Rational, usize)> {
    let text = std::fs::read_to_string(path)?;
    if let Ok(cert) = serde_json::from_str::<ExtractionCertificate>(&text) {
        let ladder = cert.ladder.clone();
        let level = match level {
            Some(text) => rat(&text)?,
            None => cert.level.clone(),
        };
        let n = n.unwrap_or_else(|| ladder.depth());
        return Ok((ladder, level, n));
    }
    let ladder: Ladder = serde_json::from_str(&text)?;
    let level = match level {
        Some(text) => rat(&text)?,
        None => {
            return Err(Error::Precondition(
                "no --level given and the ladder file is not a certificate".into(),
            ))
        }
    };
    let n = n.unwrap_or_else(|| ladder.depth());
    Ok((ladder, level, n))
}

fn windows_cmd(args: WindowsArgs) -> Result<Outcome> {
    let set = read_set(&args.set)?;
    let func = read_fn(&args.func)?;
    let (ladder, level, n) = load_leveled_ladder(&args.ladder, args.level, args.n)?;
    let report = window_check(&set, &func, &level, &ladder, n)?;
    let csv = windows_csv(&report.entries);
    if let Some(path) = &args.output {
        emit_text(&Some(path.clone()), &csv)?;
    }
    match args.format {
        Format::Json => {
            let shown = serde_json::json!({
                "valid": report.valid(),
                "entries": report.entries,
                "image": report.image,
                "problems": report
                    .problems
                    .iter()
                    .map(|p| p.to_string())
                    .collect::<Vec<_>>(),
            });
            emit_json(&None, &shown)?;
        }
        Format::Text => {
            print!("{csv}");
            if report.valid() {
                println!("windows valid at level {level}");
            } else {
                println!("windows invalid at level {level}:");
                for problem in &report.problems {
                    println!("  {problem}");
                }
            }
        }
    }
    if report.valid() {
        Ok(Outcome::Done)
    } else {
        Ok(Outcome::VerificationFailed)
    }
}

fn extract_int_cmd(args: ExtractIntArgs) -> Result<Outcome> {
    let set = read_set(&args.set)?;
    let func = read_fn(&args.func)?;
    let certificate = extract_integers(&set, &func, args.n, &rat(&args.eps)?)?;
    let report = verify_certificate(&certificate)?;
    emit_json(&args.output, &certificate)?;
    if args.output.is_some() {
        println!(
            "certificate: depth {}, fiber size {}",
            certificate.ladder.depth(),
            certificate.fiber.len()
        );
    }
    if report.valid() {
        Ok(Outcome::Done)
    } else {
        for problem in &report.problems {
            eprintln!("problem: {problem}");
        }
        Ok(Outcome::VerificationFailed)
    }
}

fn eval_cmd(args: EvalArgs) -> Result<Outcome> {
    let (formula, structure) = read_formula_file(&args.input)?;
    let mut bindings = Vec::new();
    for piece in &args.bindings {
        let Some((name, value)) = piece.split_once('=') else {
            return Err(Error::Parse(format!(
                "binding '{piece}' is not of the form NAME=VALUE"
            )));
        };
        bindings.push((name.trim().to_string(), rat(value.trim())?));
    }
    let verdict = eval_formula(&formula, &bindings, &structure)?;
    println!("{verdict}");
    Ok(Outcome::Done)
}
