//! `qes`: deterministic CSV/JSON tables for QES spectra, exceptional-point
//! scans, the coupling-scaling table, and the Mathieu-limit comparison.
//!
//! Exit codes: 0 success, 2 usage error, 3 numerical failure.

use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use qes_core::{
    all_critical_points, locate_gc, problem_spectrum, qes_vs_mathieu, scaling_table,
    CriticalConfig, QesError, QesProblem,
};

#[derive(Parser)]
#[command(
    name = "qes",
    version,
    about = "Spectra, exceptional points, and Mathieu-limit tables for the complex periodic potential -(i xi sin 2x + N)^2"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Write the table to a file instead of standard output
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Eigenvalues at one coupling or over a coupling range
    Spectrum {
        /// Potential depth index N
        #[arg(long = "N")]
        big_n: u32,
        /// Single coupling value (exclusive with the range flags)
        #[arg(long)]
        xi: Option<f64>,
        #[arg(long)]
        xi_lo: Option<f64>,
        #[arg(long)]
        xi_hi: Option<f64>,
        #[arg(long)]
        xi_step: Option<f64>,
        /// Relative tolerance classifying eigenvalues as real
        #[arg(long, default_value_t = 1e-9)]
        tol_reality: f64,
    },
    /// Certified eigenvalue coalescences with 0 < xi <= xi-max (odd N)
    Ep {
        #[arg(long = "N")]
        big_n: u32,
        #[arg(long)]
        xi_max: f64,
        /// Bisection tolerance on the critical coupling
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        /// Pre-scan step in xi
        #[arg(long, default_value_t = 1e-3)]
        scan_step: f64,
    },
    /// First critical couplings and N*xi_c for odd N = 3, 5, ..
    Scaling {
        /// Largest odd N in the table
        #[arg(long)]
        odd_up_to: u32,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Coupling where the two lowest Mathieu levels merge and turn complex
    MathieuGc {
        #[arg(long, default_value_t = 1.0)]
        g_lo: f64,
        #[arg(long, default_value_t = 2.0)]
        g_hi: f64,
        #[arg(long, default_value_t = 1e-5)]
        tol: f64,
        /// Fourier truncation order
        #[arg(long, default_value_t = 32)]
        n_max: usize,
    },
    /// Shifted QES levels next to Mathieu levels at fixed g = N xi
    Compare {
        /// Depth index; repeat the flag to compare several N
        #[arg(long = "N", required = true)]
        big_n: Vec<u32>,
        #[arg(long)]
        g: f64,
        /// Number of lowest levels to compare
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 32)]
        n_max: usize,
        #[arg(long, default_value_t = 1e-9)]
        tol_reality: f64,
    },
}

/// One table cell; floats are serialized with 12 significant digits.
enum Cell {
    Int(i64),
    Float(f64),
    Bool(bool),
    Str(String),
}

struct Table {
    config: Vec<(&'static str, Cell)>,
    headers: Vec<&'static str>,
    rows: Vec<Vec<Cell>>,
}

fn fmt_float(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x }; // normalize -0
    format!("{x:.11e}")
}

impl Cell {
    fn csv_text(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => fmt_float(*v),
            Cell::Bool(v) => v.to_string(),
            Cell::Str(v) => v.clone(),
        }
    }

    fn json_text(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => fmt_float(*v),
            Cell::Bool(v) => v.to_string(),
            Cell::Str(v) => {
                let escaped: String = v
                    .chars()
                    .flat_map(|c| match c {
                        '"' => "\\\"".chars().collect::<Vec<_>>(),
                        '\\' => "\\\\".chars().collect(),
                        c if (c as u32) < 0x20 => {
                            format!("\\u{:04x}", c as u32).chars().collect()
                        }
                        c => vec![c],
                    })
                    .collect();
                format!("\"{escaped}\"")
            }
        }
    }
}

fn write_csv(table: &Table, sink: &mut dyn Write) -> io::Result<()> {
    let mut writer = csv::Writer::from_writer(sink);
    writer.write_record(&table.headers)?;
    for row in &table.rows {
        writer.write_record(row.iter().map(|c| c.csv_text()))?;
    }
    writer.flush()
}

fn write_json(table: &Table, sink: &mut dyn Write) -> io::Result<()> {
    let mut out = String::from("{\"config\":{");
    for (i, (key, value)) in table.config.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str(&format!("\"{key}\":{}", value.json_text()));
    }
    out.push_str("},\"rows\":[");
    for (r, row) in table.rows.iter().enumerate() {
        if r > 0 {
            out.push(',');
        }
        out.push('{');
        for (i, (header, cell)) in table.headers.iter().zip(row).enumerate() {
            if i > 0 {
                out.push(',');
            }
            out.push_str(&format!("\"{header}\":{}", cell.json_text()));
        }
        out.push('}');
    }
    out.push_str("]}\n");
    sink.write_all(out.as_bytes())
}

enum CliError {
    Usage(String),
    Numerical(QesError),
    Io(io::Error),
}

impl From<QesError> for CliError {
    fn from(e: QesError) -> Self {
        // Bad arguments surface as usage errors even when the library
        // rejects them first.
        match e {
            QesError::InvalidBigN
            | QesError::NonFiniteCoupling(_)
            | QesError::EvenNNoSplit(_)
            | QesError::TruncationTooSmall(_)
            | QesError::InvalidInput(_) => CliError::Usage(e.to_string()),
            other => CliError::Numerical(other),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

fn usage(message: impl Into<String>) -> CliError {
    CliError::Usage(message.into())
}

fn require_positive(name: &str, value: f64) -> Result<(), CliError> {
    if !(value.is_finite() && value > 0.0) {
        return Err(usage(format!(
            "{name} must be positive and finite, got {value}"
        )));
    }
    Ok(())
}

fn coupling_grid(
    xi: Option<f64>,
    lo: Option<f64>,
    hi: Option<f64>,
    step: Option<f64>,
) -> Result<Vec<f64>, CliError> {
    match (xi, lo, hi, step) {
        (Some(value), None, None, None) => {
            if !value.is_finite() {
                return Err(usage("--xi must be finite"));
            }
            Ok(vec![value])
        }
        (None, Some(lo), Some(hi), Some(step)) => {
            require_positive("--xi-step", step)?;
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                return Err(usage(format!(
                    "coupling range must be finite with lo <= hi, got [{lo}, {hi}]"
                )));
            }
            let mut grid = Vec::new();
            let mut k = 0u64;
            loop {
                let x = lo + step * k as f64;
                if x > hi + 1e-12 * step {
                    break;
                }
                grid.push(x);
                k += 1;
            }
            Ok(grid)
        }
        _ => Err(usage(
            "pass either --xi or all of --xi-lo/--xi-hi/--xi-step",
        )),
    }
}

fn run(cli: &Cli) -> Result<Table, CliError> {
    match &cli.command {
        Command::Spectrum {
            big_n,
            xi,
            xi_lo,
            xi_hi,
            xi_step,
            tol_reality,
        } => {
            require_positive("--tol-reality", *tol_reality)?;
            let grid = coupling_grid(*xi, *xi_lo, *xi_hi, *xi_step)?;
            let mut rows = Vec::new();
            for &x in &grid {
                let spectrum = problem_spectrum(QesProblem::new(*big_n, x)?, *tol_reality)?;
                for i in 0..spectrum.len() {
                    let value = spectrum.eigenvalues()[i];
                    rows.push(vec![
                        Cell::Float(x),
                        Cell::Float(value.re),
                        Cell::Float(value.im),
                        Cell::Bool(spectrum.reality_flags()[i]),
                        Cell::Str(
                            spectrum.sectors()[i]
                                .map(|s| s.label().to_string())
                                .unwrap_or_default(),
                        ),
                    ]);
                }
            }
            let mut config = vec![
                ("command", Cell::Str("spectrum".into())),
                ("N", Cell::Int(*big_n as i64)),
            ];
            if let Some(value) = xi {
                config.push(("xi", Cell::Float(*value)));
            } else {
                config.push(("xi_lo", Cell::Float(xi_lo.unwrap())));
                config.push(("xi_hi", Cell::Float(xi_hi.unwrap())));
                config.push(("xi_step", Cell::Float(xi_step.unwrap())));
            }
            config.push(("xi_count", Cell::Int(grid.len() as i64)));
            config.push(("tol_reality", Cell::Float(*tol_reality)));
            Ok(Table {
                config,
                headers: vec!["xi", "eigenvalue_re", "eigenvalue_im", "is_real", "sector"],
                rows,
            })
        }
        Command::Ep {
            big_n,
            xi_max,
            tol,
            scan_step,
        } => {
            require_positive("--xi-max", *xi_max)?;
            require_positive("--tol", *tol)?;
            require_positive("--scan-step", *scan_step)?;
            if *big_n % 2 == 0 {
                return Err(usage(format!(
                    "coalescence scans need odd N, got N = {big_n}"
                )));
            }
            let config = CriticalConfig {
                scan_step: *scan_step,
                bisection_tol: *tol,
                ..CriticalConfig::default()
            };
            let points = all_critical_points(*big_n, *xi_max, &config)?;
            let rows = points
                .iter()
                .map(|p| {
                    vec![
                        Cell::Int(p.big_n as i64),
                        Cell::Float(p.xi_c),
                        Cell::Float(p.coalesced_energy.re),
                        Cell::Float(p.coalesced_energy.im),
                        Cell::Float(p.gap_at_xic),
                        Cell::Str(p.method.label().into()),
                    ]
                })
                .collect();
            Ok(Table {
                config: vec![
                    ("command", Cell::Str("ep".into())),
                    ("N", Cell::Int(*big_n as i64)),
                    ("xi_max", Cell::Float(*xi_max)),
                    ("tol", Cell::Float(*tol)),
                    ("scan_step", Cell::Float(*scan_step)),
                ],
                headers: vec!["N", "xi_c", "E_re", "E_im", "gap", "method"],
                rows,
            })
        }
        Command::Scaling { odd_up_to, tol } => {
            require_positive("--tol", *tol)?;
            if *odd_up_to < 3 || *odd_up_to % 2 == 0 {
                return Err(usage(format!(
                    "--odd-up-to must be an odd integer >= 3, got {odd_up_to}"
                )));
            }
            let list: Vec<u32> = (3..=*odd_up_to).step_by(2).collect();
            let config = CriticalConfig {
                bisection_tol: *tol,
                ..CriticalConfig::default()
            };
            let table = scaling_table(&list, &config)?;
            let rows = table
                .rows
                .iter()
                .map(|r| {
                    vec![
                        Cell::Int(r.big_n as i64),
                        Cell::Float(r.xi_c_first),
                        Cell::Float(r.n_times_xi),
                    ]
                })
                .collect();
            Ok(Table {
                config: vec![
                    ("command", Cell::Str("scaling".into())),
                    ("odd_up_to", Cell::Int(*odd_up_to as i64)),
                    ("tol", Cell::Float(*tol)),
                    (
                        "monotone_decreasing",
                        Cell::Bool(table.monotone_decreasing),
                    ),
                ],
                headers: vec!["N", "xi_c", "N_xi_c"],
                rows,
            })
        }
        Command::MathieuGc {
            g_lo,
            g_hi,
            tol,
            n_max,
        } => {
            require_positive("--tol", *tol)?;
            if !(g_lo.is_finite() && g_hi.is_finite() && g_lo < g_hi) {
                return Err(usage(format!(
                    "bracket must satisfy g-lo < g-hi, got [{g_lo}, {g_hi}]"
                )));
            }
            if *n_max < 4 {
                return Err(usage(format!("--n-max must be at least 4, got {n_max}")));
            }
            let gc = locate_gc((*g_lo, *g_hi), *tol, *n_max, 1e-9)?;
            Ok(Table {
                config: vec![
                    ("command", Cell::Str("mathieu-gc".into())),
                    ("g_lo", Cell::Float(*g_lo)),
                    ("g_hi", Cell::Float(*g_hi)),
                    ("tol", Cell::Float(*tol)),
                    ("n_max", Cell::Int(*n_max as i64)),
                ],
                headers: vec!["g_c", "n_max", "certified"],
                rows: vec![vec![
                    Cell::Float(gc),
                    Cell::Int(*n_max as i64),
                    Cell::Bool(true),
                ]],
            })
        }
        Command::Compare {
            big_n,
            g,
            k,
            n_max,
            tol_reality,
        } => {
            require_positive("--tol-reality", *tol_reality)?;
            if !g.is_finite() {
                return Err(usage("--g must be finite"));
            }
            if *k == 0 {
                return Err(usage("--k must be at least 1"));
            }
            if *n_max < 4 {
                return Err(usage(format!("--n-max must be at least 4, got {n_max}")));
            }
            let mut rows = Vec::new();
            for &n in big_n {
                let report = qes_vs_mathieu(n, *g, *k, *n_max, *tol_reality)?;
                for level in &report.rows {
                    rows.push(vec![
                        Cell::Int(n as i64),
                        Cell::Int(level.level as i64),
                        Cell::Float(level.qes_shifted.re),
                        Cell::Float(level.qes_shifted.im),
                        Cell::Float(level.mathieu.re),
                        Cell::Float(level.mathieu.im),
                        Cell::Float(level.abs_dev),
                    ]);
                }
            }
            let mut config = vec![("command", Cell::Str("compare".into()))];
            config.push((
                "N_list",
                Cell::Str(
                    big_n
                        .iter()
                        .map(|n| n.to_string())
                        .collect::<Vec<_>>()
                        .join(" "),
                ),
            ));
            config.push(("g", Cell::Float(*g)));
            config.push(("k", Cell::Int(*k as i64)));
            config.push(("n_max", Cell::Int(*n_max as i64)));
            config.push(("tol_reality", Cell::Float(*tol_reality)));
            Ok(Table {
                config,
                headers: vec![
                    "N",
                    "level",
                    "E_qes_shifted_re",
                    "E_qes_shifted_im",
                    "E_mathieu_re",
                    "E_mathieu_im",
                    "abs_dev",
                ],
                rows,
            })
        }
    }
}

fn emit(cli: &Cli, table: &Table) -> Result<(), CliError> {
    let mut sink: Box<dyn Write> = match &cli.out {
        Some(path) => Box::new(File::create(path)?),
        None => Box::new(io::stdout().lock()),
    };
    match cli.format {
        Format::Csv => write_csv(table, &mut sink)?,
        Format::Json => write_json(table, &mut sink)?,
    }
    sink.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli).and_then(|table| emit(&cli, &table)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
        Err(CliError::Numerical(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
        Err(CliError::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}
