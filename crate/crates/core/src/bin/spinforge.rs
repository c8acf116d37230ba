use std::f64::consts::PI;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use spinforge::analysis::{
    apply_locals, cphase_angle, find_local_corrections, CorrectionOptions, TargetGate,
};
use spinforge::cphase::{design_cphase, gate_time_amplitude_sweep, EDGE_FACTOR};
use spinforge::designs::{invariant_scan, DesignTag, GateDesign, SCAN_DT};
use spinforge::model::{adiabatic_energies, mhz, ns, to_mhz, to_ns, DeviceParams, TWO_PI};
use spinforge::noise::{default_grid, sweep, sweep_csv, sweep_metadata, NoiseRun, DEFAULT_SAMPLES};
use spinforge::propagator::{simulate_drive, step_halving_difference, DEFAULT_STEP};
use spinforge::Error;

#[derive(Parser, Debug)]
#[command(
    name = "spinforge",
    version,
    about = "Two-spin exchange gate design and simulation"
)]
struct Cli {
    /// Device parameters (JSON, cyclic MHz); built-in defaults when omitted
    #[arg(long, global = true)]
    params: Option<PathBuf>,
    /// Output directory, or `-` for stdout
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    #[arg(long, global = true, default_value_t = 2019)]
    seed: u64,
    /// Propagator substep in picoseconds
    #[arg(long, global = true, default_value_t = DEFAULT_STEP * 1e12)]
    step_ps: f64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Eigenenergies with the exchange off and on
    Spectrum {
        /// Exchange in cyclic MHz (defaults to the device value)
        #[arg(long)]
        j: Option<f64>,
    },
    /// Simulate a named gate design and score it
    Gate(GateArgs),
    /// Local invariants along a square-pulse evolution
    InvariantScan {
        #[arg(long, default_value_t = 30.0)]
        t_max_ns: f64,
        #[arg(long, default_value_t = SCAN_DT * 1e9)]
        dt_ns: f64,
        #[arg(long, default_value_t = spinforge::envelopes::SQUARE_AMPLITUDE_MHZ)]
        amplitude_mhz: f64,
    },
    /// Mean infidelity under quasistatic charge noise
    NoiseSweep {
        /// Comma-separated design tags
        #[arg(long, value_delimiter = ',', default_value = "a,b,c")]
        tags: Vec<String>,
        #[arg(long, default_value_t = DEFAULT_SAMPLES)]
        samples: usize,
        /// Comma-separated σ_δ/2π values in kHz (default: 12 log points, 10 kHz to 1 MHz)
        #[arg(long, value_delimiter = ',')]
        grid_khz: Option<Vec<f64>>,
    },
    /// Design, simulate and score θ-CPHASE gates
    DesignCphase {
        /// Comma-separated angles; accepts `pi/4`, `3pi/4`, or plain radians
        #[arg(
            long,
            value_delimiter = ',',
            default_value = "pi/16,pi/8,pi/4,pi/2,3pi/4,pi"
        )]
        theta: Vec<String>,
    },
    /// Gate time versus peak amplitude for the sech CZ across windows
    SweepCzTime {
        #[arg(long, default_value = "pi")]
        theta: String,
        #[arg(long, value_delimiter = ',', default_value = "1,2,3,4")]
        windows: Vec<u32>,
    },
}

#[derive(Args, Debug)]
struct GateArgs {
    /// a, b, c, sq_cnot, sq_two_piece, cz_alpha or cz_two_piece
    tag: String,
    /// Re-derive the single-qubit corrections numerically
    #[arg(long)]
    optimize_locals: bool,
    /// Also report the step-halving difference
    #[arg(long)]
    convergence: bool,
}

#[derive(Debug)]
enum CliError {
    Config(String),
    Tag(String),
    Domain(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Tag(_) => 3,
            CliError::Domain(_) => 4,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::UnknownTag(_) => CliError::Tag(e.to_string()),
            Error::Parse(_) => CliError::Config(e.to_string()),
            _ => CliError::Domain(e.to_string()),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Config(e.to_string())
    }
}

type CliResult<T> = Result<T, CliError>;

struct Ctx {
    params: DeviceParams,
    out: PathBuf,
    seed: u64,
    step: f64,
    format: Format,
}

impl Ctx {
    fn to_stdout(&self) -> bool {
        self.out.as_os_str() == "-"
    }

    /// Writes `name` atomically into the output directory, or to stdout.
    fn emit(&self, name: &str, contents: &str) -> CliResult<()> {
        if self.to_stdout() {
            io::stdout().write_all(contents.as_bytes())?;
            return Ok(());
        }
        let path = self.out.join(name);
        let tmp = self.out.join(format!(".{name}.tmp{}", std::process::id()));
        fs::write(&tmp, contents)?;
        fs::rename(&tmp, &path)?;
        eprintln!("wrote {}", path.display());
        Ok(())
    }

    fn emit_json<T: Serialize>(&self, name: &str, value: &T) -> CliResult<()> {
        let mut text =
            serde_json::to_string_pretty(value).map_err(|e| CliError::Domain(e.to_string()))?;
        text.push('\n');
        self.emit(name, &text)
    }

    /// Emits a table as `<stem>.csv` or `<stem>.json` per `--format`.
    fn emit_table<T: Serialize>(
        &self,
        stem: &str,
        header: &str,
        rows: &[T],
        csv_row: impl Fn(&T) -> String,
    ) -> CliResult<()> {
        match self.format {
            Format::Json => self.emit_json(&format!("{stem}.json"), &rows),
            Format::Csv => {
                let mut text = format!("{header}\n");
                for r in rows {
                    text.push_str(&csv_row(r));
                    text.push('\n');
                }
                self.emit(&format!("{stem}.csv"), &text)
            }
        }
    }
}

fn load_params(path: Option<&Path>) -> CliResult<DeviceParams> {
    let params = match path {
        None => DeviceParams::default(),
        Some(p) => {
            let text = fs::read_to_string(p)
                .map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?;
            DeviceParams::from_json(&text)
                .map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?
        }
    };
    for w in params.warnings() {
        eprintln!("warning: {w}");
    }
    Ok(params)
}

fn parse_angle(s: &str) -> CliResult<f64> {
    let t = s.trim().to_ascii_lowercase().replace('π', "pi");
    let bad = || CliError::Config(format!("cannot parse angle `{s}`"));
    if let Some(idx) = t.find("pi") {
        let coef = match t[..idx].trim_end_matches('*') {
            "" => 1.0,
            c => c.parse::<f64>().map_err(|_| bad())?,
        };
        let rest = &t[idx + 2..];
        let div = match rest {
            "" => 1.0,
            r if r.starts_with('/') => r[1..].parse::<f64>().map_err(|_| bad())?,
            _ => return Err(bad()),
        };
        Ok(coef * PI / div)
    } else {
        t.parse::<f64>().map_err(|_| bad())
    }
}

fn configure_threads() {
    if let Some(n) = std::env::var("SPINFORGE_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
    {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global();
        }
    }
}

#[derive(Serialize)]
struct SpectrumRow {
    level: &'static str,
    energy_j0_mhz: f64,
    energy_j_mhz: f64,
    shift_mhz: f64,
    /// shift from the exchange alone, Zeeman corrections held at their J-on values
    exchange_shift_mhz: f64,
}

fn cmd_spectrum(ctx: &Ctx, j_mhz: Option<f64>) -> CliResult<()> {
    let j = j_mhz.map(mhz).unwrap_or(ctx.params.j);
    let off = adiabatic_energies(&ctx.params, 0.0)?;
    let on = adiabatic_energies(&ctx.params, j)?;
    let labels = ["up,up", "down~,up", "up~,down", "down,down"];
    let half_split = if j > 0.0 {
        0.5 * ctx.params.splitting()
    } else {
        0.5 * ctx.params.delta_ez
    };
    let no_exchange = [on[0], half_split, -half_split, on[3]];
    let rows: Vec<SpectrumRow> = (0..4)
        .map(|k| SpectrumRow {
            level: labels[k],
            energy_j0_mhz: to_mhz(off[k]),
            energy_j_mhz: to_mhz(on[k]),
            shift_mhz: to_mhz(on[k] - off[k]),
            exchange_shift_mhz: to_mhz(on[k] - no_exchange[k]),
        })
        .collect();
    ctx.emit_table(
        "spectrum",
        "level,energy_J0_MHz,energy_J_MHz,shift_MHz,exchange_shift_MHz",
        &rows,
        |r| {
            format!(
                "\"{}\",{:.9},{:.9},{:.9},{:.9}",
                r.level, r.energy_j0_mhz, r.energy_j_mhz, r.shift_mhz, r.exchange_shift_mhz
            )
        },
    )
}

#[derive(Serialize)]
struct Convergence {
    step_ps: f64,
    step_halving_difference: f64,
}

fn cmd_gate(ctx: &Ctx, args: &GateArgs) -> CliResult<()> {
    let tag: DesignTag = args.tag.parse()?;
    let design = GateDesign::new(tag, &ctx.params)?;
    let (report, _) = design.report(&ctx.params, ctx.step, args.optimize_locals)?;
    ctx.emit_json(&format!("gate_{tag}.json"), &report)?;
    if !ctx.to_stdout() {
        ctx.emit(
            &format!("envelope_{tag}.csv"),
            &design.drive.envelope.to_csv(tag.as_str(), 2001),
        )?;
    }
    if args.convergence {
        let diff = step_halving_difference(&ctx.params, &design.drive, ctx.step)?;
        eprintln!(
            "step-halving difference at {} ps: {diff:e}",
            ctx.step * 1e12
        );
        if !ctx.to_stdout() {
            ctx.emit_json(
                &format!("gate_{tag}_convergence.json"),
                &Convergence {
                    step_ps: ctx.step * 1e12,
                    step_halving_difference: diff,
                },
            )?;
        }
    }
    Ok(())
}

fn cmd_invariant_scan(ctx: &Ctx, t_max_ns: f64, dt_ns: f64, amplitude_mhz: f64) -> CliResult<()> {
    if !(dt_ns > 0.0) || !(t_max_ns >= dt_ns) {
        return Err(CliError::Config(
            "invariant scan needs dt-ns > 0 and t-max-ns >= dt-ns".into(),
        ));
    }
    let scan = invariant_scan(
        &ctx.params,
        mhz(amplitude_mhz),
        ns(t_max_ns),
        ns(dt_ns),
        ctx.step,
    )?;
    for c in &scan.crossings {
        eprintln!(
            "{} crossing at {:.4} ns (distance {:.2e})",
            c.target,
            to_ns(c.t),
            c.distance
        );
    }
    ctx.emit_table("invariant_scan", "t_ns,G1,G2,G3", &scan.rows, |r| {
        format!(
            "{:.4},{:.12},{:.12},{:.12}",
            to_ns(r.t),
            r.invariants.g1,
            r.invariants.g2,
            r.invariants.g3
        )
    })?;
    if !ctx.to_stdout() {
        ctx.emit_json("invariant_scan_crossings.json", &scan.crossings)?;
    }
    Ok(())
}

fn cmd_noise_sweep(
    ctx: &Ctx,
    tags: &[String],
    samples: usize,
    grid_khz: Option<&[f64]>,
) -> CliResult<()> {
    let tags: Vec<DesignTag> = tags.iter().map(|t| t.parse()).collect::<Result<_, _>>()?;
    if samples == 0 {
        return Err(CliError::Config("samples must be positive".into()));
    }
    let grid: Vec<f64> = match grid_khz {
        Some(g) => {
            if g.iter().any(|v| !(*v >= 0.0)) {
                return Err(CliError::Config("grid values must be nonnegative".into()));
            }
            g.iter().map(|k| TWO_PI * k * 1e3).collect()
        }
        None => default_grid(),
    };
    let run = NoiseRun {
        n_samples: samples,
        seed: ctx.seed,
        step: ctx.step,
    };
    for tag in tags {
        let design = GateDesign::new(tag, &ctx.params)?;
        let results = sweep(&design, &ctx.params, &grid, &run)?;
        match ctx.format {
            Format::Csv => ctx.emit(&format!("noise_{tag}.csv"), &sweep_csv(&results))?,
            Format::Json => ctx.emit_json(&format!("noise_{tag}.json"), &results)?,
        }
        if !ctx.to_stdout() {
            ctx.emit_json(
                &format!("noise_{tag}.meta.json"),
                &sweep_metadata(&design, &run),
            )?;
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct CphaseRow {
    theta: f64,
    tau_ns: f64,
    #[serde(rename = "peak_MHz")]
    peak_mhz: f64,
    infidelity: f64,
    alpha: f64,
    m: f64,
    measured_angle: f64,
}

fn cmd_design_cphase(ctx: &Ctx, thetas: &[String]) -> CliResult<()> {
    let thetas: Vec<f64> = thetas
        .iter()
        .map(|s| parse_angle(s))
        .collect::<CliResult<_>>()?;
    let mut rows = Vec::new();
    for theta in thetas {
        let d = design_cphase(theta, &ctx.params)?;
        let u = simulate_drive(&ctx.params, &d.drive, ctx.step)?;
        let target = TargetGate::Cphase(theta).matrix();
        let corr = find_local_corrections(&u, &target, &CorrectionOptions::default())?;
        let angle = cphase_angle(&apply_locals(&corr.k1, &u, &corr.k2))?;
        rows.push(CphaseRow {
            theta,
            tau_ns: to_ns(d.tau),
            peak_mhz: to_mhz(d.drive.envelope.peak_amplitude()),
            infidelity: 1.0 - corr.fidelity,
            alpha: d.alpha,
            m: d.m,
            measured_angle: angle.angle,
        });
    }
    ctx.emit_table(
        "cphase_table",
        "theta,tau_ns,peak_MHz,infidelity",
        &rows,
        |r| {
            format!(
                "{:.9},{:.6},{:.6},{:e}",
                r.theta, r.tau_ns, r.peak_mhz, r.infidelity
            )
        },
    )?;
    if !ctx.to_stdout() && ctx.format == Format::Csv {
        ctx.emit_json("cphase_designs.json", &rows)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct TradeoffRow {
    window: u32,
    tau_ns: f64,
    #[serde(rename = "peak_MHz")]
    peak_mhz: f64,
    infidelity: f64,
}

fn cmd_sweep_cz_time(ctx: &Ctx, theta: &str, windows: &[u32]) -> CliResult<()> {
    let theta = parse_angle(theta)?;
    let points = gate_time_amplitude_sweep(theta, &ctx.params, windows, EDGE_FACTOR, ctx.step)?;
    let rows: Vec<TradeoffRow> = points
        .iter()
        .map(|p| TradeoffRow {
            window: p.r,
            tau_ns: to_ns(p.tau),
            peak_mhz: to_mhz(p.peak_amplitude),
            infidelity: 1.0 - p.fidelity,
        })
        .collect();
    ctx.emit_table(
        "cz_tradeoff",
        "window,tau_ns,peak_MHz,infidelity",
        &rows,
        |r| {
            format!(
                "{},{:.6},{:.6},{:e}",
                r.window, r.tau_ns, r.peak_mhz, r.infidelity
            )
        },
    )
}

fn run(cli: Cli) -> CliResult<()> {
    if !(cli.step_ps > 0.0) || !cli.step_ps.is_finite() {
        return Err(CliError::Config(format!(
            "--step-ps must be positive, got {}",
            cli.step_ps
        )));
    }
    let ctx = Ctx {
        params: load_params(cli.params.as_deref())?,
        out: cli.out,
        seed: cli.seed,
        step: cli.step_ps * 1e-12,
        format: cli.format,
    };
    if !ctx.to_stdout() && !ctx.out.is_dir() {
        fs::create_dir_all(&ctx.out)
            .map_err(|e| CliError::Config(format!("{}: {e}", ctx.out.display())))?;
    }
    match &cli.cmd {
        Cmd::Spectrum { j } => cmd_spectrum(&ctx, *j),
        Cmd::Gate(args) => cmd_gate(&ctx, args),
        Cmd::InvariantScan {
            t_max_ns,
            dt_ns,
            amplitude_mhz,
        } => cmd_invariant_scan(&ctx, *t_max_ns, *dt_ns, *amplitude_mhz),
        Cmd::NoiseSweep {
            tags,
            samples,
            grid_khz,
        } => cmd_noise_sweep(&ctx, tags, *samples, grid_khz.as_deref()),
        Cmd::DesignCphase { theta } => cmd_design_cphase(&ctx, theta),
        Cmd::SweepCzTime { theta, windows } => cmd_sweep_cz_time(&ctx, theta, windows),
    }
}

fn main() -> ExitCode {
    configure_threads();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let (CliError::Config(m) | CliError::Tag(m) | CliError::Domain(m)) = &e;
            eprintln!("error: {m}");
            ExitCode::from(e.code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn angles() {
        assert_eq!(parse_angle("pi").unwrap(), PI);
        assert_eq!(parse_angle("pi/4").unwrap(), PI / 4.0);
        assert_eq!(parse_angle("3pi/4").unwrap(), 3.0 * PI / 4.0);
        assert_eq!(parse_angle("0.5").unwrap(), 0.5);
        assert!(parse_angle("pie").is_err());
    }
}
