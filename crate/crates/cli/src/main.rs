//! `sram-pad`: command-line front end for the SRAM PAD toolkit.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use sram_pad::cell::{characterize_presets, preset_cell, SizingMethod};
use sram_pad::noise::{
    default_drv, hold_snm, min_operating_voltage, retention_voltage, sizing_sweep, write_sweep_csv, Operation,
    SweepGrid, SweepMetric, SweptDevice,
};
use sram_pad::optimize::{
    optimize, pad_curve, variation_analysis, write_curve_csv, write_table_csv, write_trace, ConstraintMode,
    OptimizerConfig, PowerMode, XGrid,
};
use sram_pad::presets::{self, CONFIG_DIR_ENV};
use sram_pad::report::{fmt_num, write_atomic};
use sram_pad::tech::{Technology, VthClass};
use sram_pad::workload::{evaluate_scenario, sweep_idle_fraction, write_scenario_csv, MemoryConfig};
use sram_pad::Error;

const EXIT_HELP: &str = "\
Exit status:
  0  success
  1  unexpected internal error
  2  bad command line
  3  missing or malformed config file, or an I/O failure
  4  infeasible design or inoperable supply voltage
  5  parameter out of range
  6  numerical failure in a circuit solve

Config files are looked up as: a path given to --tech, then <name>.toml in
--config-dir or $SRAM_PAD_CONFIG_DIR, then the built-in presets.";

#[derive(Debug, Parser)]
#[command(name = "sram-pad", version)]
#[command(about = "Power-area-delay exploration of hybrid SRAM rows")]
#[command(arg_required_else_help = true, after_help = EXIT_HELP)]
struct Cli {
    /// Directory holding technology and workload override files.
    #[arg(long, global = true, env = CONFIG_DIR_ENV)]
    config_dir: Option<PathBuf>,

    /// Worker threads for sweeps (0 = one per core).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    /// Write the result here (atomically) instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Delay, leakage and wordline load of every preset cell
    Characterize {
        #[command(flatten)]
        tech: TechArgs,
        /// Supply voltage (default: the technology's active supply).
        #[arg(long)]
        vdd: Option<f64>,
    },
    /// Noise margin over a W x L grid of one transistor pair
    SnmSweep {
        #[command(flatten)]
        tech: TechArgs,
        #[arg(long, default_value = "drv-based")]
        method: SizingMethod,
        #[arg(long, value_enum, default_value_t = MetricArg::Hold)]
        metric: MetricArg,
        #[arg(long, value_enum, default_value_t = DeviceArg::PullDown)]
        device: DeviceArg,
        /// Supply voltage (default: the technology's pinned sweep supply).
        #[arg(long)]
        vdd: Option<f64>,
    },
    /// Retention voltage, DRV and minimum read/write supplies per method
    Drv {
        #[command(flatten)]
        tech: TechArgs,
        /// Only this method (default: all four).
        #[arg(long)]
        method: Option<SizingMethod>,
        /// Noise margin the read and write minimum supplies must reach, V.
        #[arg(long, default_value_t = 0.04)]
        margin: f64,
    },
    /// Hybrid cell assignment for one row
    Optimize {
        #[command(flatten)]
        tech: TechArgs,
        #[command(flatten)]
        row: RowArgs,
        /// Also write the search trace to this file.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Monte-Carlo trials of the best plan (0 = skip).
        #[arg(long, default_value_t = 0)]
        variation: usize,
        /// Relative spread of V_th and widths for --variation, percent.
        #[arg(long, default_value_t = 10.0)]
        sigma: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Rank the sizing methods under a cache workload
    Compare {
        #[command(flatten)]
        tech: TechArgs,
        /// Workload profile name.
        #[arg(long, default_value = "hot")]
        profile: String,
        /// Sweep the idle fraction instead, as start:step:end or a comma list.
        #[arg(long)]
        idle: Option<String>,
        /// Cells per row.
        #[arg(long, default_value_t = 256)]
        n: usize,
        /// Memory size in bits.
        #[arg(long, default_value_t = 32 * 1024)]
        capacity: usize,
        /// Standby supply (default: each design's own DRV).
        #[arg(long)]
        vdd_standby: Option<f64>,
    },
    /// Closed-form PAD(n) curves for a family of up-sizing amounts
    PadCurve {
        #[command(flatten)]
        tech: TechArgs,
        #[arg(long, default_value_t = 256)]
        n: usize,
        /// Up-sizing as fractions of W: start:step:end or a comma list.
        #[arg(long, default_value = "0.05:0.05:0.5")]
        x: String,
        #[arg(long)]
        vdd: Option<f64>,
        #[arg(long, default_value = "drv-based")]
        method: SizingMethod,
    },
}

#[derive(Debug, Args)]
struct TechArgs {
    /// Preset name (ptm32, ptm90) or path to a technology file.
    #[arg(long, default_value = "ptm32")]
    tech: String,
}

#[derive(Debug, Args)]
struct RowArgs {
    /// Cells per row.
    #[arg(long, default_value_t = 256)]
    n: usize,
    /// Size versions including the nominal one (1-3).
    #[arg(long, default_value_t = 3)]
    sizes: usize,
    #[arg(long, value_enum, default_value_t = VthArg::Dual)]
    vth: VthArg,
    /// Supply voltage (default: the technology's active supply).
    #[arg(long)]
    vdd: Option<f64>,
    /// Drive the wordline from both ends.
    #[arg(long)]
    mirrored: bool,
    #[arg(long, value_enum, default_value_t = ConstraintArg::Ddiff)]
    constraint: ConstraintArg,
    #[arg(long, value_enum, default_value_t = PowerArg::PerPlan)]
    power: PowerArg,
    /// Base cell sizing.
    #[arg(long, default_value = "drv-based")]
    method: SizingMethod,
    /// Up-sizing grid step as a fraction of W.
    #[arg(long, default_value_t = 0.05)]
    x_step: f64,
    /// Workload profile name.
    #[arg(long, default_value = "active")]
    profile: String,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum VthArg {
    Single,
    Dual,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ConstraintArg {
    Ddiff,
    None,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PowerArg {
    PerPlan,
    Frozen,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MetricArg {
    Hold,
    Read,
    Write,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum DeviceArg {
    PullDown,
    PullUp,
    Access,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &anyhow::Error) -> u8 {
    for cause in e.chain() {
        if let Some(err) = cause.downcast_ref::<Error>() {
            return match err {
                Error::Config(_) | Error::Parse(_) | Error::Io(_) | Error::UnsupportedTechnology(_) => 3,
                Error::InfeasibleDesign(_) | Error::InoperableVoltage { .. } => 4,
                Error::InvalidParameter { .. }
                | Error::IndexOutOfRange { .. }
                | Error::SearchSpaceTooLarge { .. }
                | Error::UndefinedMetric(_) => 5,
                Error::NumericalFailure { .. } => 6,
            };
        }
        if cause.downcast_ref::<std::io::Error>().is_some() {
            return 3;
        }
    }
    1
}

fn run(cli: &Cli) -> Result<()> {
    if cli.threads > 0 {
        rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global().context("starting the worker pool")?;
    }
    let dir = cli.config_dir.as_deref();
    let body = match &cli.command {
        Command::Characterize { tech, vdd } => characterize(&load_tech(tech, dir)?, *vdd)?,
        Command::SnmSweep { tech, method, metric, device, vdd } => {
            snm_sweep(&load_tech(tech, dir)?, *method, *metric, *device, *vdd)?
        }
        Command::Drv { tech, method, margin } => drv_table(&load_tech(tech, dir)?, *method, *margin)?,
        Command::Optimize { tech, row, trace, variation, sigma, seed } => {
            let t = load_tech(tech, dir)?;
            let config = row_config(&t, row, dir)?;
            let result = optimize(&config, &t)?;
            if result.infeasible {
                eprintln!("warning: no plan besides the baseline meets the constraint");
            }
            eprintln!(
                "best {} reduction {}% (delay {} ps, critical cell {})",
                result.plan,
                fmt_num(result.reduction_pct),
                fmt_num(result.breakdown.delay),
                result.breakdown.critical_cell_index
            );
            if let Some(path) = trace {
                let mut buf = Vec::new();
                write_trace(&result, &mut buf)?;
                write_atomic(path, &buf).with_context(|| format!("writing {}", path.display()))?;
            }
            let mut buf = Vec::new();
            write_table_csv(&result, &mut buf)?;
            if *variation > 0 {
                let v = variation_analysis(&result, &t, *sigma, *variation, *seed)?;
                eprintln!(
                    "variation sigma={}% trials={} seed={}: nominal {}% mean {}% min {}% max {}%",
                    fmt_num(v.sigma_pct),
                    v.trials,
                    v.seed,
                    fmt_num(v.nominal_pct),
                    fmt_num(v.mean_pct),
                    fmt_num(v.min_pct),
                    fmt_num(v.max_pct)
                );
            }
            String::from_utf8(buf)?
        }
        Command::Compare { tech, profile, idle, n, capacity, vdd_standby } => {
            let t = load_tech(tech, dir)?;
            let workloads = presets::resolve_workloads(dir)?;
            let mut workload = workloads.get(profile)?;
            let mem = MemoryConfig {
                capacity: *capacity,
                cells_per_row: *n,
                vdd_standby: *vdd_standby,
                ..MemoryConfig::new(&t)
            };
            workload.vdd = mem.vdd_active;
            match idle {
                None => {
                    let r = evaluate_scenario(&mem, &t, &workload, &SizingMethod::ALL)?;
                    eprintln!("winner at idle fraction {}: {}", fmt_num(r.idle_fraction), r.winner);
                    let mut buf = Vec::new();
                    write_scenario_csv(&r, &mut buf)?;
                    String::from_utf8(buf)?
                }
                Some(spec) => {
                    let grid = parse_values(spec, "--idle")?;
                    let report = sweep_idle_fraction(&mem, &t, &workload, &SizingMethod::ALL, &grid)?;
                    match report.crossover() {
                        Some((a, b)) => {
                            eprintln!("winner changes between idle fractions {} and {}", fmt_num(a), fmt_num(b))
                        }
                        None => eprintln!("winner is the same across the grid"),
                    }
                    let mut s = String::from("idle_fraction,winner");
                    for m in SizingMethod::ALL {
                        write!(s, ",{m}")?;
                    }
                    s.push('\n');
                    for p in &report.points {
                        write!(s, "{},{}", fmt_num(p.idle_fraction), p.winner)?;
                        for (_, b) in &p.entries {
                            write!(s, ",{}", fmt_num(b.pad))?;
                        }
                        s.push('\n');
                    }
                    s
                }
            }
        }
        Command::PadCurve { tech, n, x, vdd, method } => {
            let t = load_tech(tech, dir)?;
            let mut config = OptimizerConfig::new(&t, *n);
            config.base_method = *method;
            if let Some(v) = vdd {
                config.vdd = *v;
                config.workload.vdd = *v;
            }
            let points = pad_curve(&config, &t, &parse_values(x, "--x")?)?;
            let mut buf = Vec::new();
            write_curve_csv(&points, &mut buf)?;
            String::from_utf8(buf)?
        }
    };
    emit(cli.out.as_deref(), &body)
}

fn emit(out: Option<&Path>, body: &str) -> Result<()> {
    match out {
        Some(path) => write_atomic(path, body.as_bytes()).with_context(|| format!("writing {}", path.display())),
        None => {
            use std::io::Write;
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(body.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}

fn load_tech(args: &TechArgs, dir: Option<&Path>) -> Result<Technology> {
    Ok(presets::resolve_technology(&args.tech, dir)?)
}

fn row_config(tech: &Technology, row: &RowArgs, dir: Option<&Path>) -> Result<OptimizerConfig> {
    let mut config = OptimizerConfig::new(tech, row.n);
    config.max_sizes = row.sizes;
    config.vth_set = match row.vth {
        VthArg::Single => vec![VthClass::High],
        VthArg::Dual => vec![VthClass::High, VthClass::Low],
    };
    config.mirrored = row.mirrored;
    config.constraint_mode = match row.constraint {
        ConstraintArg::Ddiff => ConstraintMode::RequireDdiffNonpositive,
        ConstraintArg::None => ConstraintMode::Unconstrained,
    };
    config.power_mode = match row.power {
        PowerArg::PerPlan => PowerMode::PerPlan,
        PowerArg::Frozen => PowerMode::FrozenPower,
    };
    config.base_method = row.method;
    config.x_grid = XGrid { step: row.x_step, ..XGrid::default() };
    config.workload = presets::resolve_workloads(dir)?.get(&row.profile)?;
    config.vdd = row.vdd.unwrap_or(tech.vdd_active);
    config.workload.vdd = config.vdd;
    Ok(config)
}

fn characterize(tech: &Technology, vdd: Option<f64>) -> Result<String> {
    let vdd = vdd.unwrap_or(tech.vdd_active);
    let mut s = String::from("method,vth,vdd,delay_ps,leakage_uw,wordline_load_ff\n");
    for c in characterize_presets(tech, vdd)? {
        writeln!(
            s,
            "{},{},{},{},{},{}",
            c.cell.method,
            c.cell.vth_class.letter(),
            fmt_num(c.vdd),
            fmt_num(c.delay_ps),
            fmt_num(c.leakage_uw),
            fmt_num(c.wordline_load_ff)
        )?;
    }
    Ok(s)
}

fn snm_sweep(
    tech: &Technology,
    method: SizingMethod,
    metric: MetricArg,
    device: DeviceArg,
    vdd: Option<f64>,
) -> Result<String> {
    let vdd = vdd.unwrap_or(tech.noise_margin.sweep_supply);
    let grid = SweepGrid {
        w_values: tech.noise_margin.sweep_w.clone(),
        l_values: tech.noise_margin.sweep_l.clone(),
        target_metric: match metric {
            MetricArg::Hold => SweepMetric::HoldSnm,
            MetricArg::Read => SweepMetric::ReadSnm,
            MetricArg::Write => SweepMetric::WriteMargin,
        },
        device: match device {
            DeviceArg::PullDown => SweptDevice::PullDown,
            DeviceArg::PullUp => SweptDevice::PullUp,
            DeviceArg::Access => SweptDevice::Access,
        },
        base: preset_cell(method, tech, VthClass::High)?,
    };
    let result = sizing_sweep(&grid, tech, vdd)?;
    match result.argmax {
        Some((p, v)) => eprintln!(
            "best at w={} l={}: {} mV (vdd {} V)",
            fmt_num(p.w),
            fmt_num(p.l),
            fmt_num(v * 1000.0),
            fmt_num(vdd)
        ),
        None => bail!(Error::UndefinedMetric("no grid point could be evaluated".into())),
    }
    let mut buf = Vec::new();
    write_sweep_csv(&result, &mut buf)?;
    Ok(String::from_utf8(buf)?)
}

fn drv_table(tech: &Technology, method: Option<SizingMethod>, margin: f64) -> Result<String> {
    let methods: Vec<SizingMethod> = method.map_or_else(|| SizingMethod::ALL.to_vec(), |m| vec![m]);
    let vsweep = tech.noise_margin.sweep_supply;
    let mut s = String::from("method,retention_v,drv_v,hold_snm_mv,min_read_v,min_write_v\n");
    for m in methods {
        let cell = preset_cell(m, tech, VthClass::High)?;
        let ret = retention_voltage(&cell, tech, tech.noise_margin.retention_snm)?;
        let drv = default_drv(&cell, tech)?;
        let snm = hold_snm(&cell, tech, vsweep)?;
        // a method that never reaches the margin gets a blank cell, not an abort
        let read = min_operating_voltage(&cell, tech, Operation::Read, margin).ok();
        let write = min_operating_voltage(&cell, tech, Operation::Write, margin).ok();
        let opt = |v: Option<f64>| v.map(fmt_num).unwrap_or_default();
        writeln!(s, "{m},{},{},{},{},{}", fmt_num(ret), fmt_num(drv), fmt_num(snm * 1000.0), opt(read), opt(write))?;
    }
    Ok(s)
}

/// `start:step:end` (inclusive) or `a,b,c`.
#[allow(clippy::neg_cmp_op_on_partial_ord)] // NaN must fail
fn parse_values(spec: &str, flag: &str) -> Result<Vec<f64>> {
    let num = |t: &str| -> Result<f64> {
        t.trim().parse::<f64>().map_err(|_| Error::Parse(format!("{flag}: `{t}` is not a number")).into())
    };
    let parts: Vec<&str> = spec.split(':').collect();
    let values = match parts.as_slice() {
        [start, step, end] => {
            let (a, d, b) = (num(start)?, num(step)?, num(end)?);
            if !(d > 0.0) || !(b >= a) || !a.is_finite() || !b.is_finite() {
                bail!(Error::Parse(format!("{flag}: `{spec}` is not an increasing range")));
            }
            let steps = ((b - a) / d + 1e-9).floor() as usize;
            if steps > 100_000 {
                bail!(Error::Parse(format!("{flag}: `{spec}` has too many points")));
            }
            // integer stepping keeps 0.05:0.05:0.5 free of accumulated error
            (0..=steps).map(|k| ((a + k as f64 * d) * 1e12).round() / 1e12).collect()
        }
        [_] => spec.split(',').map(num).collect::<Result<Vec<_>>>()?,
        _ => bail!(Error::Parse(format!("{flag}: expected start:step:end or a comma list"))),
    };
    if values.is_empty() {
        bail!(Error::Parse(format!("{flag}: no values")));
    }
    Ok(values)
}
