//! `auction`: compute, calibrate, and certify optimal selling mechanisms
//! under restricted allocation sets.

mod config;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use auction_core::certify::Verdict;
use auction_core::presets::{self, Preset};
use auction_core::{transport, Error, Menu};

#[derive(Parser)]
#[command(
    name = "auction",
    about = "Optimal selling mechanisms under restricted allocations: menu calibration and transport-duality certificates",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output directory for reports, CSV and SVG artifacts.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Override the finest grid resolution.
    #[arg(long, global = true)]
    resolution: Option<usize>,
    /// Override the relative certification tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Seed for Monte Carlo cross-checks.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Calibrate menu prices by the integrate-to-zero condition.
    Calibrate { target: String },
    /// Calibrate, then certify optimality via the transport dual ladder.
    Certify { target: String },
    /// Solve the grid transport dual and export the plan and the recovered
    /// mechanism.
    Solve { target: String },
    /// Sweep the bundle factor alpha and report the duality gap curve.
    Sweep {
        #[arg(long, default_value_t = 1.0)]
        from: f64,
        #[arg(long, default_value_t = 1.5)]
        to: f64,
        #[arg(long, default_value_t = 0.02)]
        step: f64,
        /// Relative gap below which a point counts as certified.
        #[arg(long, default_value_t = 0.01)]
        gap_tol: f64,
    },
    /// Preset management.
    Preset {
        #[command(subcommand)]
        action: PresetAction,
    },
}

#[derive(Subcommand)]
enum PresetAction {
    /// List the built-in presets.
    List,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Input(_) | Error::Unsupported(_) => ExitCode::from(2),
                Error::Convergence { .. } => ExitCode::from(3),
                Error::Internal(_) => ExitCode::from(1),
            }
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match &cli.command {
        Command::Preset { action: PresetAction::List } => {
            for name in presets::PRESET_NAMES {
                let p = presets::by_name(name)?;
                println!("{name:<20} {}", p.description);
            }
            return Ok(ExitCode::SUCCESS);
        }
        Command::Sweep {
            from,
            to,
            step,
            gap_tol,
        } => return sweep(&cli, *from, *to, *step, *gap_tol),
        _ => {}
    }

    let target = match &cli.command {
        Command::Calibrate { target } | Command::Certify { target } | Command::Solve { target } => {
            target.clone()
        }
        _ => unreachable!(),
    };
    let mut loaded = config::load_target(&target)?;
    if let Some(seed) = cli.seed {
        loaded.seed = seed;
    }
    if let Some(res) = cli.resolution {
        let coarse = (res / 2).max(8);
        loaded.preset.calibration_resolutions = (coarse, res);
        loaded.preset.certify_resolutions = vec![(res / 4).max(8), coarse, res];
    }
    if let Some(tol) = cli.tol {
        loaded.preset.certify_tol_rel = tol;
    }
    fs::create_dir_all(&cli.out)
        .map_err(|e| Error::Input(format!("cannot create output dir: {e}")))?;

    match &cli.command {
        Command::Calibrate { .. } => calibrate(&cli, &loaded),
        Command::Certify { .. } => certify(&cli, &loaded),
        Command::Solve { .. } => solve(&cli, &loaded),
        _ => unreachable!(),
    }
}

fn open_report(out: &Path) -> Result<fs::File, Error> {
    fs::File::create(out.join("report.txt"))
        .map_err(|e| Error::Input(format!("cannot write report: {e}")))
}

fn calibrate_menu(preset: &Preset, report: &mut impl Write, seed: u64) -> Result<Menu, Error> {
    let cal = preset.calibrate()?;
    let _ = writeln!(report, "instance: {}", preset.name);
    let _ = writeln!(
        report,
        "calibrated prices (resolutions {:?}):",
        preset.calibration_resolutions
    );
    for (k, price) in cal.prices.iter().enumerate() {
        let _ = writeln!(
            report,
            "  option {:?} @ {:.9}   (coarse {:.9}, fine {:.9})",
            preset.menu_shape[k], price, cal.prices_coarse[k], cal.prices_fine[k]
        );
    }
    let mu = preset.transform(preset.calibration_resolutions.1)?;
    let revenue = cal.menu.revenue_via_measure(&mu);
    let (mc, se) = cal.menu.revenue_direct(&preset.density, 200_000, seed)?;
    let _ = writeln!(
        report,
        "revenue: {revenue:.9} via measure, {mc:.6} +- {se:.6} by Monte Carlo (seed {seed})"
    );
    if let Some(benchmark) = preset.randomized_benchmark_price {
        let bundle = cal
            .prices
            .last()
            .copied()
            .unwrap_or(f64::NAN);
        let _ = writeln!(
            report,
            "randomized benchmark: optimal randomized mechanism sells the bundle at {benchmark:.4}; \
             the deterministic bundle price {bundle:.4} differs by {:+.4}",
            bundle - benchmark
        );
    }
    let _ = writeln!(report, "cell measures (midpoint, finest calibration grid):");
    let cells = cal.menu.cell_measures(&mu);
    for (k, m) in cells.measures.iter().enumerate() {
        let _ = writeln!(report, "  cell {k}: {m:+.3e} (tie fraction {:.4})", cells.boundary_tie_fraction[k]);
    }
    Ok(cal.menu)
}

fn calibrate(cli: &Cli, loaded: &config::LoadedInstance) -> Result<ExitCode, Error> {
    let mut report = open_report(&cli.out)?;
    let menu = calibrate_menu(&loaded.preset, &mut report, loaded.seed)?;
    write_cells_artifacts(cli, &loaded.preset, &menu)?;
    println!("calibrated; report in {}", cli.out.join("report.txt").display());
    Ok(ExitCode::SUCCESS)
}

fn write_cells_artifacts(cli: &Cli, preset: &Preset, menu: &Menu) -> Result<(), Error> {
    let res = preset.calibration_resolutions.1;
    let mu = preset.transform(res)?;
    let cells = menu.cell_measures(&mu);
    let f = fs::File::create(cli.out.join("cells.csv"))
        .map_err(|e| Error::Input(format!("cannot write cells.csv: {e}")))?;
    cells
        .write_csv(&mu, std::io::BufWriter::new(f))
        .map_err(|e| Error::Input(format!("cells.csv: {e}")))?;
    if preset.density.dimension() == 2 {
        let svg = auction_core::viz::cells_svg(menu, &preset.density.domain(), res.min(256))?;
        fs::write(cli.out.join("cells.svg"), svg)
            .map_err(|e| Error::Input(format!("cells.svg: {e}")))?;
    }
    Ok(())
}

fn certify(cli: &Cli, loaded: &config::LoadedInstance) -> Result<ExitCode, Error> {
    let preset = &loaded.preset;
    let mut report = open_report(&cli.out)?;
    let menu = calibrate_menu(preset, &mut report, loaded.seed)?;
    let cert = preset.certify(&menu)?;
    cert.write_text(&mut report)
        .map_err(|e| Error::Input(format!("report: {e}")))?;
    let json = toml::to_string_pretty(&cert)
        .map_err(|e| Error::Internal(format!("serialize certificate: {e}")))?;
    fs::write(cli.out.join("certificate.toml"), json)
        .map_err(|e| Error::Input(format!("certificate.toml: {e}")))?;
    write_cells_artifacts(cli, preset, &menu)?;
    match cert.verdict {
        Verdict::CertifiedAtGrid => {
            println!(
                "certified-at-grid: gap {:.3e} ({:.4}% of revenue {:.6})",
                cert.gap,
                100.0 * cert.gap / cert.primal_value.abs().max(1e-300),
                cert.primal_value
            );
            Ok(ExitCode::SUCCESS)
        }
        Verdict::Inconclusive => {
            println!(
                "inconclusive: gap {:.3e} above tolerance but still shrinking",
                cert.gap
            );
            Ok(ExitCode::SUCCESS)
        }
        Verdict::Refuted => {
            println!(
                "refuted: gap {:.3e} ({:.4}% of revenue) stays above tolerance",
                cert.gap,
                100.0 * cert.gap / cert.primal_value.abs().max(1e-300)
            );
            Ok(ExitCode::from(4))
        }
    }
}

fn solve(cli: &Cli, loaded: &config::LoadedInstance) -> Result<ExitCode, Error> {
    let preset = &loaded.preset;
    let mut report = open_report(&cli.out)?;
    let res = preset.calibration_resolutions.1;
    let mu = preset.transform(res)?;
    let f = fs::File::create(cli.out.join("measure.csv"))
        .map_err(|e| Error::Input(format!("measure.csv: {e}")))?;
    mu.write_csv(std::io::BufWriter::new(f))
        .map_err(|e| Error::Input(format!("measure.csv: {e}")))?;
    let instance = transport::TransportInstance::from_measure(&mu, &preset.alloc)?;
    // The calibrated menu is only a warm start here; fall back to a cold
    // solve when calibration fails.
    let plan = match preset.calibrate() {
        Ok(cal) => {
            let hint = |x: &[f64]| cal.menu.utility(x).0;
            transport::solve_with_hint(&instance, Some(&hint))?
        }
        Err(_) => transport::solve(&instance)?,
    };
    let _ = writeln!(report, "instance: {}", preset.name);
    let _ = writeln!(
        report,
        "transport dual at resolution {res}: cost {:.9} over {} flows ({} sources, {} sinks)",
        plan.cost,
        plan.flows.len(),
        instance.sources.len(),
        instance.sinks.len()
    );
    let _ = writeln!(
        report,
        "certificate residual {:.3e}, marginal residual {:.3e}",
        plan.certificate_residual(&instance),
        plan.marginal_residual(&instance)
    );
    let f = fs::File::create(cli.out.join("plan.csv"))
        .map_err(|e| Error::Input(format!("plan.csv: {e}")))?;
    plan.write_csv(&instance, std::io::BufWriter::new(f))
        .map_err(|e| Error::Input(format!("plan.csv: {e}")))?;
    let mech = transport::recovered_mechanism(&plan, &instance);
    let f = fs::File::create(cli.out.join("mechanism.csv"))
        .map_err(|e| Error::Input(format!("mechanism.csv: {e}")))?;
    mech.write_csv(std::io::BufWriter::new(f))
        .map_err(|e| Error::Input(format!("mechanism.csv: {e}")))?;
    if preset.density.dimension() == 2 {
        let svg = auction_core::viz::plan_svg(&instance, &plan, &preset.density.domain())?;
        fs::write(cli.out.join("plan.svg"), svg)
            .map_err(|e| Error::Input(format!("plan.svg: {e}")))?;
    }
    println!("solved; dual cost {:.9}; artifacts in {}", plan.cost, cli.out.display());
    Ok(ExitCode::SUCCESS)
}

fn sweep(cli: &Cli, from: f64, to: f64, step: f64, gap_tol: f64) -> Result<ExitCode, Error> {
    if !(step > 0.0) || !(to >= from) {
        return Err(Error::Input("sweep needs step > 0 and to >= from".into()));
    }
    fs::create_dir_all(&cli.out)
        .map_err(|e| Error::Input(format!("cannot create output dir: {e}")))?;
    let resolution = cli.resolution.unwrap_or(64);
    let mut alphas = Vec::new();
    let mut a = from;
    while a <= to + 1e-12 {
        alphas.push(a);
        a += step;
    }
    let points = presets::bundle_sweep(&alphas, resolution, gap_tol)?;
    let mut csv = String::from("alpha,price,revenue,dual,gap_rel,certified\n");
    for p in &points {
        csv.push_str(&format!(
            "{:.6},{:.12e},{:.12e},{:.12e},{:.12e},{}\n",
            p.alpha, p.price, p.revenue, p.dual_value, p.gap_rel, p.certified
        ));
    }
    fs::write(cli.out.join("sweep.csv"), csv)
        .map_err(|e| Error::Input(format!("sweep.csv: {e}")))?;
    let mut report = open_report(&cli.out)?;
    let _ = writeln!(
        report,
        "bundle sweep: alpha in [{from}, {to}] step {step}, resolution {resolution}, gap tolerance {:.2}%",
        100.0 * gap_tol
    );
    for p in &points {
        let _ = writeln!(
            report,
            "  alpha {:.3}: price {:.6} revenue {:.6} dual {:.6} gap {:.4}% {}",
            p.alpha,
            p.price,
            p.revenue,
            p.dual_value,
            100.0 * p.gap_rel,
            if p.certified { "certified" } else { "-" }
        );
    }
    match points.iter().find(|p| p.certified) {
        Some(first) => {
            let _ = writeln!(report, "smallest certifying alpha: {:.3}", first.alpha);
            println!("smallest certifying alpha: {:.3}", first.alpha);
        }
        None => {
            let _ = writeln!(report, "no alpha certified at this tolerance");
            println!("no alpha certified at this tolerance");
        }
    }
    println!("sweep written to {}", cli.out.join("sweep.csv").display());
    Ok(ExitCode::SUCCESS)
}
