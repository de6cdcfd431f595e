use std::fmt::Write as _;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qkd_resonance::infodist::evaluate;
use qkd_resonance::measurement::MeasurementKind;
use qkd_resonance::par::Execution;
use qkd_resonance::probes::{OneQubitProbeParams, ProbeParams, TwoQubitProbeParams};
use qkd_resonance::sweep::{
    attenuation, find_peaks_in, format_sig12, run_sweep_with, write_csv, Column, Family, Param,
    SweepRow, SweepSpec, Tie, DEFAULT_STEPS,
};
use qkd_resonance::Error;

const EXIT_INVALID: u8 = 2;
const EXIT_DEGENERATE: u8 = 3;

#[derive(Parser)]
#[command(
    name = "qkd-resonance",
    version,
    about = "Eavesdropping gain, disturbance and resonance sweeps for BB84 probes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep one strategy parameter and write a CSV table.
    Sweep(SweepCmd),
    /// List the peaks of one column of a sweep CSV.
    Peaks(PeaksCmd),
    /// Report gain, mutual information and disturbance at one strategy.
    Gain(GainCmd),
    /// Largest D-peak prominence of a sweep for each of several delta values.
    Attenuation(AttenuationCmd),
}

/// Strategy parameters shared by every command.
#[derive(Args, Debug, Clone)]
struct StrategyArgs {
    /// Probe family: one-qubit or two-qubit.
    #[arg(long)]
    family: Family,
    /// One-qubit probe: amplitude a in [0, 1].
    #[arg(long)]
    a: Option<f64>,
    /// One-qubit probe: amplitude c in [0, 1].
    #[arg(long)]
    c: Option<f64>,
    /// delta in [0, 1], shared by both families; 0 is the unperturbed probe.
    #[arg(long)]
    delta: Option<f64>,
    /// Two-qubit probe: alpha in [0, 1].
    #[arg(long)]
    alpha2: Option<f64>,
    /// Two-qubit probe: beta in [0, 1].
    #[arg(long)]
    beta2: Option<f64>,
    /// Two-qubit probe: s in [0, 1].
    #[arg(long)]
    s: Option<f64>,
    /// closed-form (one-qubit only), helstrom or principal-axis.
    /// Defaults to closed-form for one-qubit and principal-axis for two-qubit.
    #[arg(long)]
    measurement: Option<MeasurementKind>,
}

impl StrategyArgs {
    fn given(&self) -> Vec<(Param, f64)> {
        [
            (Param::A, self.a),
            (Param::C, self.c),
            (Param::Delta, self.delta),
            (Param::Alpha2, self.alpha2),
            (Param::Beta2, self.beta2),
            (Param::S, self.s),
        ]
        .into_iter()
        .filter_map(|(p, v)| v.map(|v| (p, v)))
        .collect()
    }
}

#[derive(Args, Debug, Clone)]
struct TemplateArgs {
    #[command(flatten)]
    strategy: StrategyArgs,
    /// Swept parameter: a, c, delta, alpha2, beta2 or s.
    #[arg(long)]
    param: Param,
    /// First grid value.
    #[arg(long)]
    from: f64,
    /// Last grid value.
    #[arg(long)]
    to: f64,
    /// Number of grid points, endpoints included.
    #[arg(long, default_value_t = DEFAULT_STEPS)]
    steps: usize,
    /// Linear tie such as `beta2=1.8-alpha2`.
    #[arg(long)]
    tie: Option<Tie>,
    /// Worker threads; 1 runs sequentially. Defaults to all cores.
    #[arg(long)]
    threads: Option<usize>,
}

impl TemplateArgs {
    fn spec(&self, skip: Option<Param>) -> SweepSpec {
        let mut spec = SweepSpec::new(
            self.strategy.family,
            self.param,
            self.from,
            self.to,
            self.steps,
        );
        for (p, v) in self.strategy.given() {
            if Some(p) != skip {
                spec = spec.with(p, v);
            }
        }
        spec.tie = self.tie;
        spec.measurement = self.strategy.measurement;
        spec
    }

    fn execution(&self) -> Result<Execution, Failure> {
        if self.threads == Some(0) {
            return Err(Failure::invalid("--threads must be at least 1"));
        }
        Ok(Execution::from_threads(self.threads))
    }
}

#[derive(Args)]
struct SweepCmd {
    #[command(flatten)]
    template: TemplateArgs,
    /// Output CSV; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write a gnuplot script that plots D, Du and Dv from the CSV.
    #[arg(long)]
    gnuplot: Option<PathBuf>,
}

#[derive(Args)]
struct PeaksCmd {
    /// CSV written by `sweep`.
    #[arg(long)]
    input: PathBuf,
    /// D, Du, Dv, q0, q1, G, IAE or bound.
    #[arg(long, default_value = "D")]
    column: Column,
    #[arg(long, default_value_t = 0.0)]
    min_prominence: f64,
}

#[derive(Args)]
struct GainCmd {
    #[command(flatten)]
    strategy: StrategyArgs,
}

#[derive(Args)]
struct AttenuationCmd {
    #[command(flatten)]
    template: TemplateArgs,
    /// Comma-separated delta values.
    #[arg(long, value_delimiter = ',', required = true)]
    deltas: Vec<f64>,
    /// Output CSV; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn invalid(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_INVALID,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidParams(_) | Error::InvalidDimension(_) | Error::NoFeasiblePoint(_) => {
                EXIT_INVALID
            }
            _ => 1,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn io_failure(path: &Path, e: io::Error) -> Failure {
    Failure::invalid(format!("{}: {e}", path.display()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Sweep(cmd) => cmd_sweep(cmd),
        Command::Peaks(cmd) => cmd_peaks(cmd),
        Command::Gain(cmd) => cmd_gain(cmd),
        Command::Attenuation(cmd) => cmd_attenuation(cmd),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

/// Writes to `path`, or standard output when `None`.
fn emit(
    path: Option<&Path>,
    write: impl FnOnce(&mut dyn Write) -> io::Result<()>,
) -> Result<(), Failure> {
    match path {
        Some(p) => {
            let file = File::create(p).map_err(|e| io_failure(p, e))?;
            let mut w = BufWriter::new(file);
            write(&mut w)
                .and_then(|_| w.flush())
                .map_err(|e| io_failure(p, e))
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            write(&mut w)
                .and_then(|_| w.flush())
                .map_err(|e| Failure::invalid(format!("stdout: {e}")))
        }
    }
}

fn describe_measurements(rows: &[SweepRow], requested: MeasurementKind) -> String {
    let fallbacks = rows.iter().filter(|r| r.measurement != requested).count();
    let degenerate = rows.iter().filter(|r| r.degenerate).count();
    let mut s = format!("measurement: {requested}");
    if fallbacks > 0 {
        let _ = write!(s, " (helstrom fallback at {fallbacks} points)");
    }
    if degenerate > 0 {
        let _ = write!(s, "; {degenerate} of {} points degenerate", rows.len());
    }
    s
}

fn cmd_sweep(cmd: SweepCmd) -> Result<ExitCode, Failure> {
    let spec = cmd.template.spec(None);
    let exec = cmd.template.execution()?;
    let rows = run_sweep_with(&spec, exec)?;
    eprintln!("{}", describe_measurements(&rows, spec.measurement_kind()));
    emit(cmd.out.as_deref(), |w| write_csv(w, spec.param, &rows))?;
    if let Some(script) = &cmd.gnuplot {
        let data = cmd
            .out
            .as_deref()
            .map_or_else(|| "sweep.csv".to_string(), |p| p.display().to_string());
        let text = gnuplot_script(&data, spec.param);
        std::fs::write(script, text).map_err(|e| io_failure(script, e))?;
    }
    if rows.iter().all(|r| r.degenerate) {
        eprintln!("every grid point is degenerate");
        return Ok(ExitCode::from(EXIT_DEGENERATE));
    }
    Ok(ExitCode::SUCCESS)
}

fn gnuplot_script(data: &str, param: Param) -> String {
    format!(
        "set datafile separator ','\n\
         set key autotitle columnhead\n\
         set xlabel '{param}'\n\
         set ylabel 'error rate'\n\
         plot '{data}' using 2:3 with lines title 'D', \\\n     \
         '' using 2:4 with lines title 'Du', \\\n     \
         '' using 2:5 with lines title 'Dv'\n"
    )
}

fn read_column(path: &Path, column: Column) -> Result<(Vec<f64>, Vec<f64>), Failure> {
    let mut reader = csv::Reader::from_path(path)
        .map_err(|e| Failure::invalid(format!("{}: {e}", path.display())))?;
    let headers = reader
        .headers()
        .map_err(|e| Failure::invalid(format!("{}: {e}", path.display())))?
        .clone();
    let find = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Failure::invalid(format!("{}: no '{name}' column", path.display())))
    };
    let (xi, yi) = (find("value")?, find(column.name())?);
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for (n, record) in reader.records().enumerate() {
        let line = n + 2;
        let record = record.map_err(|e| Failure::invalid(format!("{}: {e}", path.display())))?;
        let field = |i: usize| -> Result<f64, Failure> {
            record
                .get(i)
                .and_then(|s| s.trim().parse::<f64>().ok())
                .ok_or_else(|| Failure::invalid(format!("{}:{line}: not a number", path.display())))
        };
        xs.push(field(xi)?);
        ys.push(field(yi)?);
    }
    Ok((xs, ys))
}

fn cmd_peaks(cmd: PeaksCmd) -> Result<ExitCode, Failure> {
    if cmd.min_prominence.is_nan() || cmd.min_prominence < 0.0 {
        return Err(Failure::invalid("--min-prominence must be nonnegative"));
    }
    let (xs, ys) = read_column(&cmd.input, cmd.column)?;
    let peaks = find_peaks_in(&xs, &ys, cmd.min_prominence)?;
    emit(None, |w| {
        for p in &peaks {
            writeln!(
                w,
                "{},{},{},{}",
                format_sig12(p.location),
                format_sig12(p.height),
                format_sig12(p.prominence),
                format_sig12(p.width)
            )?;
        }
        Ok(())
    })?;
    Ok(ExitCode::SUCCESS)
}

fn point_params(s: &StrategyArgs) -> Result<ProbeParams, Failure> {
    let need = |v: Option<f64>, name: &str| {
        v.ok_or_else(|| {
            Failure::invalid(format!("--{name} is required for the {} family", s.family))
        })
    };
    let extra: Vec<String> = s
        .given()
        .into_iter()
        .filter(|(p, _)| !s.family.params().contains(p))
        .map(|(p, _)| format!("--{p}"))
        .collect();
    if !extra.is_empty() {
        return Err(Failure::invalid(format!(
            "{} not used by the {} family",
            extra.join(", "),
            s.family
        )));
    }
    Ok(match s.family {
        Family::OneQubit => ProbeParams::OneQubit(OneQubitProbeParams::new(
            need(s.a, "a")?,
            need(s.c, "c")?,
            need(s.delta, "delta")?,
        )?),
        Family::TwoQubit => ProbeParams::TwoQubit(TwoQubitProbeParams::new(
            need(s.alpha2, "alpha2")?,
            need(s.beta2, "beta2")?,
            need(s.s, "s")?,
            need(s.delta, "delta")?,
        )?),
    })
}

fn cmd_gain(cmd: GainCmd) -> Result<ExitCode, Failure> {
    let params = point_params(&cmd.strategy)?;
    let kind = cmd
        .strategy
        .measurement
        .unwrap_or_else(|| MeasurementKind::default_for(&params));
    let r = evaluate(&params, kind)?;
    eprintln!("measurement: {}", r.measurement);
    let g = &r.gain;
    let d = &r.disturbance;
    let fields = [
        ("q0", g.q[0]),
        ("q1", g.q[1]),
        ("G0", g.g[0]),
        ("G1", g.g[1]),
        ("G", g.gain),
        ("IAE", g.iae),
        ("Du", d.big_du),
        ("Dv", d.big_dv),
        ("D", d.d),
        ("bound", r.bound),
    ];
    let mut line: Vec<String> = fields
        .iter()
        .map(|(k, v)| format!("{k}={}", format_sig12(*v)))
        .collect();
    line.push(format!("measurement={}", r.measurement));
    if r.degenerate {
        line.push("degenerate".into());
    }
    println!("{}", line.join(" "));
    Ok(ExitCode::SUCCESS)
}

fn cmd_attenuation(cmd: AttenuationCmd) -> Result<ExitCode, Failure> {
    // the delta grid replaces any --delta
    let template = cmd.template.spec(Some(Param::Delta));
    let exec = cmd.template.execution()?;
    eprintln!("measurement: {}", template.measurement_kind());
    let table = attenuation(&template, &cmd.deltas, exec)?;
    emit(cmd.out.as_deref(), |w| {
        writeln!(w, "delta,maxProminence")?;
        for row in &table {
            writeln!(
                w,
                "{},{}",
                format_sig12(row.delta),
                format_sig12(row.max_prominence)
            )?;
        }
        Ok(())
    })?;
    Ok(ExitCode::SUCCESS)
}
