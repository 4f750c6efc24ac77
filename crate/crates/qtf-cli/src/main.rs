//! `qtf`: construct, verify, and explore quasi-tight framelet filter banks
//! with exact rational arithmetic.
//!
//! Every subcommand reads and writes JSON documents (CSV for `sample`).
//! Wherever a file path is accepted, `fixture:<name>` substitutes one of the
//! bundled reference banks. Exit codes: 0 success, 1 domain error, 2 usage
//! error. All behavior is deterministic.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write as _};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use qtf::json::{
    bank_to_value, decomposition_to_value, factorization_to_value, laurent_to_value,
    parse_bank_value, parse_decomposition_value, parse_laurent_value, parse_lowpass_value,
    parse_matrix_value,
};
use qtf::{
    analyze, analyze_filter, construct_differencing, construct_directional, construct_vm_linear,
    construct_vm_sos, factor_hermitian, fixture, fixture_names, format_rational, make_context,
    phi_csv, psi_csv, sample_framelet, sample_refinable, smoothness_l2, spot_check_frequency,
    synthesize, verify_bank, BankMeta, DilationContext, DirectionalOpts, QtfBank, RationalLaurent,
    SmoothnessOpts, VmLinearOpts,
};

#[derive(Parser)]
#[command(name = "qtf", version, about = "Exact quasi-tight framelet filter banks")]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct GlobalOpts {
    /// Write the primary output to this file instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Suppress the human-readable summary lines on stderr.
    #[arg(long, global = true)]
    quiet: bool,
    /// Emit JSON even for listing-style output.
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print the coset representatives and dual cosets of a dilation matrix.
    Cosets {
        /// Dilation matrix as inline JSON, e.g. '[[1,1],[1,-1]]'.
        #[arg(long, conflicts_with = "input")]
        matrix: Option<String>,
        /// Filter or bank document (or fixture:<name>) supplying the matrix.
        #[arg(long)]
        input: Option<String>,
    },
    /// Structural report for a refinable low-pass filter.
    Analyze {
        /// Filter or bank document, or fixture:<name>.
        #[arg(long)]
        input: String,
    },
    /// Build a quasi-tight bank from a low-pass filter and verify it.
    Construct {
        #[command(subcommand)]
        mode: ConstructCmd,
    },
    /// Factor a Hermitian Laurent matrix into signed rank-one terms.
    Specfact {
        /// Laurent matrix document.
        #[arg(long)]
        input: String,
    },
    /// Check the defining identity of a bank with zero tolerance.
    Verify {
        /// Bank document, or fixture:<name>.
        #[arg(long)]
        input: String,
        /// Also spot-check the frequency-domain identity on a sample grid.
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Estimate the L2 smoothness exponent of the refinable function.
    Smoothness {
        /// Filter or bank document, or fixture:<name>.
        #[arg(long)]
        input: String,
        /// Convergence tolerance for the cross-check ratio sequence.
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        /// Iteration cap for the cross-check ratio sequence.
        #[arg(long, default_value_t = 120)]
        nmax: usize,
    },
    /// Multilevel framelet transform of exact rational data.
    Transform {
        /// Coefficient array document (forward) or decomposition (inverse).
        #[arg(long)]
        input: String,
        /// Bank document, or fixture:<name>.
        #[arg(long)]
        bank: String,
        /// Number of decomposition levels (ignored with --inverse).
        #[arg(long, default_value_t = 1)]
        levels: usize,
        /// Reconstruct from a decomposition instead of analyzing data.
        #[arg(long)]
        inverse: bool,
    },
    /// Sample the refinable or a framelet function on a refined lattice.
    Sample {
        /// Bank document, or fixture:<name>.
        #[arg(long)]
        input: String,
        /// Refinement depth: values are taken on the M^-depth lattice.
        #[arg(long)]
        depth: usize,
        /// Which function: `phi`, or `psi:L` for the L-th high-pass (1-based).
        #[arg(long)]
        which: String,
        /// CSV destination; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Bundled reference banks.
    Fixtures {
        #[command(subcommand)]
        action: FixturesCmd,
    },
}

#[derive(Subcommand)]
enum ConstructCmd {
    /// Two-tap directional elimination of the coset cross-correlations.
    Directional {
        /// Low-pass filter or bank document, or fixture:<name>.
        #[arg(long)]
        input: String,
        /// Merge proportional high-pass filters into one.
        #[arg(long)]
        merge: bool,
    },
    /// Signed sum-of-squares completion with m vanishing moments.
    VmSos {
        /// Low-pass filter or bank document, or fixture:<name>.
        #[arg(long)]
        input: String,
        /// Vanishing-moment order for every high-pass filter.
        #[arg(long)]
        m: usize,
    },
    /// Linear-system construction with m vanishing moments.
    VmLinear {
        /// Low-pass filter or bank document, or fixture:<name>.
        #[arg(long)]
        input: String,
        /// Vanishing-moment order for every high-pass filter.
        #[arg(long)]
        m: usize,
        /// How often the ansatz support may grow before giving up.
        #[arg(long, default_value_t = 4)]
        max_expand: usize,
    },
    /// Differencing-only construction with m vanishing moments.
    Differencing {
        /// Low-pass filter or bank document, or fixture:<name>.
        #[arg(long)]
        input: String,
        /// Vanishing-moment order for every high-pass filter.
        #[arg(long)]
        m: usize,
    },
}

#[derive(Subcommand)]
enum FixturesCmd {
    /// Print the available fixture names.
    List,
    /// Print one fixture bank as JSON.
    Show {
        /// Fixture name, as printed by `fixtures list`.
        name: String,
    },
    /// Exactly verify every bundled bank.
    VerifyAll,
}

/// Failure with the exit code it maps to: 1 domain, 2 usage.
struct Failure {
    code: u8,
    msg: String,
}

impl Failure {
    fn usage(msg: impl Into<String>) -> Self {
        Failure {
            code: 2,
            msg: msg.into(),
        }
    }
}

impl From<qtf::Error> for Failure {
    fn from(e: qtf::Error) -> Self {
        Failure {
            code: 1,
            msg: e.to_string(),
        }
    }
}

type CliResult<T = ()> = Result<T, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli.global, cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}

/// Loads `fixture:<name>` or a file path into a JSON value.
fn load_value(input: &str) -> CliResult<Value> {
    if let Some(name) = input.strip_prefix("fixture:") {
        return Ok(bank_to_value(&fixture(name)?));
    }
    let text = fs::read_to_string(input).map_err(|e| Failure {
        code: 1,
        msg: format!("cannot read {input}: {e}"),
    })?;
    serde_json::from_str(&text).map_err(|e| Failure {
        code: 1,
        msg: format!("{input} is not valid JSON: {e}"),
    })
}

fn load_lowpass(input: &str) -> CliResult<(DilationContext, RationalLaurent, BankMeta)> {
    Ok(parse_lowpass_value(&load_value(input)?)?)
}

fn load_bank(input: &str) -> CliResult<QtfBank> {
    Ok(parse_bank_value(&load_value(input)?)?)
}

fn emit(global: &GlobalOpts, text: &str) -> CliResult {
    match &global.output {
        Some(path) => fs::write(path, text).map_err(|e| Failure {
            code: 1,
            msg: format!("cannot write {}: {e}", path.display()),
        }),
        None => {
            let mut out = io::stdout().lock();
            match writeln!(out, "{}", text.trim_end_matches('\n')) {
                // A reader that stops early (e.g. `head`) is not an error.
                Err(e) if e.kind() != io::ErrorKind::BrokenPipe => Err(Failure {
                    code: 1,
                    msg: format!("cannot write to stdout: {e}"),
                }),
                _ => Ok(()),
            }
        }
    }
}

fn emit_json(global: &GlobalOpts, v: &Value) -> CliResult {
    emit(global, &format!("{}\n", serde_json::to_string_pretty(v).expect("serializable")))
}

fn note(global: &GlobalOpts, msg: &str) {
    if !global.quiet {
        eprintln!("{msg}");
    }
}

fn run(global: &GlobalOpts, cmd: Cmd) -> CliResult {
    match cmd {
        Cmd::Cosets { matrix, input } => cosets(global, matrix, input),
        Cmd::Analyze { input } => {
            let (ctx, a, _) = load_lowpass(&input)?;
            emit_json(global, &analyze_filter(&ctx, &a).to_value())
        }
        Cmd::Construct { mode } => construct(global, mode),
        Cmd::Specfact { input } => {
            let m = parse_matrix_value(&load_value(&input)?)?;
            let fact = factor_hermitian(&m)?;
            note(
                global,
                &format!("factored into {} signed rank-one terms", fact.terms.len()),
            );
            emit_json(global, &factorization_to_value(&fact))
        }
        Cmd::Verify { input, samples } => verify(global, &input, samples),
        Cmd::Smoothness { input, tol, nmax } => smoothness(global, &input, tol, nmax),
        Cmd::Transform {
            input,
            bank,
            levels,
            inverse,
        } => transform(global, &input, &bank, levels, inverse),
        Cmd::Sample {
            input,
            depth,
            which,
            out,
        } => sample(global, &input, depth, &which, out),
        Cmd::Fixtures { action } => fixtures(global, action),
    }
}

fn cosets(global: &GlobalOpts, matrix: Option<String>, input: Option<String>) -> CliResult {
    let ctx = match (matrix, input) {
        (Some(text), None) => {
            let rows: Vec<Vec<i64>> = serde_json::from_str(&text)
                .map_err(|e| Failure::usage(format!("--matrix is not an integer matrix: {e}")))?;
            make_context(&rows)?
        }
        (None, Some(input)) => load_lowpass(&input)?.0,
        _ => return Err(Failure::usage("pass exactly one of --matrix or --input")),
    };
    let omega: Vec<Vec<String>> = ctx
        .omega()
        .iter()
        .map(|w| w.iter().map(format_rational).collect())
        .collect();
    emit_json(
        global,
        &json!({
            "matrix": ctx.matrix(),
            "dim": ctx.dim(),
            "det_abs": ctx.dm(),
            "gamma": ctx.gamma(),
            "omega": omega,
            "spectral_radius": ctx.spectral_radius(),
        }),
    )
}

fn construct(global: &GlobalOpts, mode: ConstructCmd) -> CliResult {
    let (label, input, in_meta, bank) = match mode {
        ConstructCmd::Directional { input, merge } => {
            let (ctx, a, meta) = load_lowpass(&input)?;
            let bank = construct_directional(&ctx, &a, &DirectionalOpts { merge })?;
            ("directional", input, meta, bank)
        }
        ConstructCmd::VmSos { input, m } => {
            let (ctx, a, meta) = load_lowpass(&input)?;
            ("vm-sos", input, meta, construct_vm_sos(&ctx, &a, m)?)
        }
        ConstructCmd::VmLinear {
            input,
            m,
            max_expand,
        } => {
            let (ctx, a, meta) = load_lowpass(&input)?;
            let opts = VmLinearOpts {
                max_expand,
                ..VmLinearOpts::default()
            };
            ("vm-linear", input, meta, construct_vm_linear(&ctx, &a, m, &opts)?)
        }
        ConstructCmd::Differencing { input, m } => {
            let (ctx, a, meta) = load_lowpass(&input)?;
            ("differencing", input, meta, construct_differencing(&ctx, &a, m)?)
        }
    };
    // Refuse to emit anything that does not survive exact verification.
    let report = verify_bank(&bank)?;
    if !report.passes {
        return Err(Failure {
            code: 1,
            msg: format!("constructed bank failed exact verification (input {input})"),
        });
    }
    let mut meta = bank.meta().clone();
    meta.source = Some(format!("qtf construct {label}"));
    if meta.name.is_none() {
        meta.name = in_meta.name;
    }
    let bank = bank.with_meta(meta);
    note(
        global,
        &format!(
            "{label}: {} high-pass filters, {}; verified exactly",
            bank.highpass().len(),
            if bank.is_tight() { "tight" } else { "quasi-tight" },
        ),
    );
    emit_json(global, &bank_to_value(&bank))
}

fn verify(global: &GlobalOpts, input: &str, samples: Option<usize>) -> CliResult {
    let bank = load_bank(input)?;
    let report = verify_bank(&bank)?;
    let mut doc = report.to_value();
    if let Some(n) = samples {
        let deviation = spot_check_frequency(&bank, n);
        doc.as_object_mut()
            .expect("report is an object")
            .insert("frequency_spot_max".into(), json!(deviation));
    }
    emit_json(global, &doc)?;
    if report.passes {
        note(global, "bank verifies exactly");
        Ok(())
    } else {
        Err(Failure {
            code: 1,
            msg: "bank does not satisfy the defining identity".into(),
        })
    }
}

fn smoothness(global: &GlobalOpts, input: &str, tol: f64, nmax: usize) -> CliResult {
    let (ctx, a, _) = load_lowpass(input)?;
    let opts = SmoothnessOpts { tol, n_max: nmax };
    let est = smoothness_l2(&ctx, &a, &opts)?;
    emit_json(global, &est.to_value())?;
    if est.sm2 > 0.0 {
        note(global, "phi in L2 (sufficient condition met)");
    }
    Ok(())
}

fn transform(global: &GlobalOpts, input: &str, bank: &str, levels: usize, inverse: bool) -> CliResult {
    let bank = load_bank(bank)?;
    if inverse {
        let dec = parse_decomposition_value(&load_value(input)?)?;
        let data = synthesize(&bank, &dec)?;
        emit_json(global, &laurent_to_value(&data))
    } else {
        let data = parse_laurent_value(&load_value(input)?, "")?;
        let dec = analyze(&bank, &data, levels)?;
        emit_json(global, &decomposition_to_value(&dec))
    }
}

fn sample(
    global: &GlobalOpts,
    input: &str,
    depth: usize,
    which: &str,
    out: Option<PathBuf>,
) -> CliResult {
    let (ctx, a, _) = load_lowpass(input)?;
    let csv = if which == "phi" {
        phi_csv(&sample_refinable(&ctx, &a, depth)?)?
    } else if let Some(idx) = which.strip_prefix("psi:") {
        let l: usize = idx
            .parse()
            .map_err(|_| Failure::usage(format!("bad --which {which:?}: expected phi or psi:L")))?;
        let bank = load_bank(input)?;
        let filters = bank.highpass();
        if l == 0 || l > filters.len() {
            return Err(Failure::usage(format!(
                "psi index {l} out of range 1..={}",
                filters.len()
            )));
        }
        let phi = sample_refinable(&ctx, &a, depth)?;
        psi_csv(&sample_framelet(&ctx, &filters[l - 1].0, &phi)?)?
    } else {
        return Err(Failure::usage(format!(
            "bad --which {which:?}: expected phi or psi:L"
        )));
    };
    match out {
        Some(path) => fs::write(&path, &csv).map_err(|e| Failure {
            code: 1,
            msg: format!("cannot write {}: {e}", path.display()),
        }),
        None => emit(global, &csv),
    }
}

fn fixtures(global: &GlobalOpts, action: FixturesCmd) -> CliResult {
    match action {
        FixturesCmd::List => {
            if global.json {
                emit_json(global, &json!(fixture_names()))
            } else {
                emit(global, &(fixture_names().join("\n") + "\n"))
            }
        }
        FixturesCmd::Show { name } => emit_json(global, &bank_to_value(&fixture(&name)?)),
        FixturesCmd::VerifyAll => {
            let mut lines = String::new();
            let mut docs = Vec::new();
            let mut all_pass = true;
            for name in fixture_names() {
                let bank = fixture(name)?;
                let report = verify_bank(&bank)?;
                all_pass &= report.passes;
                writeln!(
                    lines,
                    "{name}: {} (s={}, residual {})",
                    if report.passes { "PASS" } else { "FAIL" },
                    bank.highpass().len(),
                    if report.residual.is_zero() { "0" } else { "nonzero" },
                )
                .expect("string write");
                docs.push(json!({
                    "name": name,
                    "passes": report.passes,
                    "filters": bank.highpass().len(),
                    "residual_zero": report.residual.is_zero(),
                }));
            }
            if global.json {
                emit_json(global, &Value::Array(docs))?;
            } else {
                emit(global, &lines)?;
            }
            if all_pass {
                Ok(())
            } else {
                Err(Failure {
                    code: 1,
                    msg: "at least one bundled bank failed verification".into(),
                })
            }
        }
    }
}
