//! Command-line front end: experiment presets, sweeps, and CSV/JSON output.

mod config;
mod output;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::json;

use pt_fano::dimer::{asymmetric_modes, mode_census, symmetric_modes, SymmetricRegime};
use pt_fano::lattice::{probe_stability, run_scattering_sim, LatticeConfig, StabilityClass};
use pt_fano::pinned::{
    pinned_asymmetric_opts, pinned_symmetric_opts, PinnedDimer, PinnedMode, PinnedOpts,
};
use pt_fano::scattering::{
    linear_spectrum, power_sweep, solve_scattering, ultimate_asymmetric, Branch,
    ScatteringSolution, SolverOpts, SOLUTION_RESIDUAL_TOL,
};
use pt_fano::{DimerParams, Error};

use config::{resolve_seed, FileConfig, ParamSpec};
use output::{emit, num, Format, Table};

#[derive(Parser)]
#[command(
    name = "pt-fano",
    version,
    about = "Nonlinear PT dimer on a chain: eigenstates, multistable scattering, stability"
)]
struct Cli {
    /// Flat JSON config file; command-line flags override its values.
    #[arg(long, global = true)]
    config: Option<String>,

    /// Output file (stdout when omitted).
    #[arg(long, global = true)]
    output: Option<String>,

    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,

    #[command(flatten)]
    params: ParamFlags,

    /// Multistart seed (precedence: this flag, config file, PT_FANO_SEED, 0).
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Random Newton starts per solve.
    #[arg(long, global = true)]
    n_starts: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Args, Debug, Clone)]
struct ParamFlags {
    /// Frequency shift E of the dimer elements.
    #[arg(long = "e-shift", global = true, allow_hyphen_values = true)]
    e: Option<f64>,
    /// Linear gain/loss rate gamma0.
    #[arg(long, global = true)]
    gamma0: Option<f64>,
    /// Nonlinear loss/gain rate gamma2.
    #[arg(long, global = true, allow_hyphen_values = true)]
    gamma2: Option<f64>,
    /// Kerr coefficient chi.
    #[arg(long, global = true, allow_hyphen_values = true)]
    chi: Option<f64>,
    /// Dimer-chain coupling V.
    #[arg(long = "coupling", global = true)]
    v: Option<f64>,
    /// Chain hopping C.
    #[arg(long = "hopping", global = true)]
    c: Option<f64>,
}

#[derive(Args, Debug, Clone)]
struct LatticeFlags {
    #[arg(long)]
    n_sites: Option<usize>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    horizon: Option<f64>,
    #[arg(long)]
    ramp_time: Option<f64>,
    #[arg(long)]
    sample_stride: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Eigenstate census of the isolated dimer.
    DimerModes {
        /// Frequency for the symmetric family (default: the asymmetric-mode
        /// frequency when it exists, else E).
        #[arg(long, allow_hyphen_values = true)]
        omega: Option<f64>,
    },
    /// Linear transmissivity over a frequency grid (requires gamma2 = chi = 0).
    Spectrum {
        /// fig2: E=0.1, V=0.2, C=1, gamma2=0, gamma0 in {0, 0.001, 0.005, 0.01}.
        #[arg(long)]
        preset: Option<Preset>,
        #[arg(long, default_value_t = -1.95, allow_hyphen_values = true)]
        omega_min: f64,
        #[arg(long, default_value_t = 1.95, allow_hyphen_values = true)]
        omega_max: f64,
        #[arg(long, default_value_t = 391)]
        points: usize,
        /// Comma-separated gamma0 values (one spectrum per value).
        #[arg(long)]
        gamma0_list: Option<String>,
    },
    /// Branch diagram over incident power at fixed frequency.
    PowerSweep {
        /// fig3: E=omega=0.1, gamma0=0.01, gamma2=1e-4, V=0.2, C=1.
        #[arg(long)]
        preset: Option<Preset>,
        #[arg(long, allow_hyphen_values = true)]
        omega: Option<f64>,
        /// Single power: equivalent to scatter-solve at that point.
        #[arg(long)]
        pin: Option<f64>,
        #[arg(long, default_value_t = 0.001)]
        pin_min: f64,
        #[arg(long, default_value_t = 5.0)]
        pin_max: f64,
        #[arg(long, default_value_t = 200)]
        points: usize,
    },
    /// All stationary solutions at one (omega, Pin).
    ScatterSolve {
        #[arg(long, allow_hyphen_values = true)]
        omega: Option<f64>,
        #[arg(long)]
        pin: f64,
    },
    /// Perturb a stationary solution and classify the outcome.
    Stability {
        /// fig4: the two one-element-dark states at their power, and a
        /// transmission-zero symmetric state at Pin=4.
        #[arg(long)]
        preset: Option<Preset>,
        /// Branch tag to probe (e.g. ultimate-asymmetric-loss).
        #[arg(long)]
        branch: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        omega: Option<f64>,
        #[arg(long)]
        pin: Option<f64>,
        /// Index among solutions with the same tag, ordered by transmissivity.
        #[arg(long, default_value_t = 0)]
        index: usize,
        /// Multiplicative perturbation size (default 1e-4).
        #[arg(long)]
        eps: Option<f64>,
        #[command(flatten)]
        lattice: LatticeFlags,
    },
    /// Time-domain transmission measurement.
    Simulate {
        #[arg(long, allow_hyphen_values = true)]
        omega: Option<f64>,
        #[arg(long)]
        pin: f64,
        #[command(flatten)]
        lattice: LatticeFlags,
    },
    /// Evanescent modes pinned to the dimer outside the band.
    Pinned {
        /// Frequency above the band (symmetric family).
        #[arg(long, allow_hyphen_values = true)]
        omega: Option<f64>,
        /// Solve the self-consistent asymmetric family instead.
        #[arg(long, default_value_t = false)]
        asymmetric: bool,
        /// Also search the staggered family below the band.
        #[arg(long, default_value_t = false)]
        below_band: bool,
        /// Profile half-width in sites.
        #[arg(long, default_value_t = 100)]
        half_width: i64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Preset {
    Fig2,
    Fig3,
    Fig4,
}

fn main() {
    let cli = Cli::parse();
    std::process::exit(run(cli));
}

const EXIT_OK: i32 = 0;
const EXIT_CONFIG: i32 = 2;
const EXIT_NUMERICAL: i32 = 3;

fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::InvalidConfig(_) | Error::NotLinear { .. } | Error::DegenerateEquation { .. } => {
            EXIT_CONFIG
        }
        Error::OutsideBand { .. } | Error::InsideBand { .. } => EXIT_CONFIG,
        Error::NoConvergence { .. } | Error::Blowup { .. } => EXIT_NUMERICAL,
    }
}

fn run(cli: Cli) -> i32 {
    let file = match cli.config.as_deref().map(FileConfig::load).transpose() {
        Ok(f) => f.unwrap_or_default(),
        Err(msg) => {
            eprintln!("error: {msg}");
            return EXIT_CONFIG;
        }
    };

    let mut spec = ParamSpec::default();
    spec.apply_file(&file);
    // Presets pin the reference parameter sets before explicit flags apply.
    match preset_of(&cli.command) {
        Some(Preset::Fig2) => {
            spec = ParamSpec {
                e: 0.1,
                gamma0: 0.01,
                gamma2: 0.0,
                chi: 0.0,
                v: 0.2,
                c: 1.0,
            };
        }
        Some(Preset::Fig3) | Some(Preset::Fig4) => {
            spec = ParamSpec::default();
        }
        None => {}
    }
    apply_flags(&mut spec, &cli.params);

    let p = match spec.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };

    let opts = SolverOpts {
        seed: resolve_seed(cli.seed, file.seed),
        n_starts: cli.n_starts.or(file.n_starts).unwrap_or(64),
        ..Default::default()
    };

    let format = match cli.format {
        FormatArg::Csv => Format::Csv,
        FormatArg::Json => Format::Json,
    };

    let result = dispatch(&cli.command, &p, &file, &opts);
    match result {
        Ok(mut table) => {
            stamp_metadata(&mut table, &p, &opts);
            match emit(&table, format, cli.output.as_deref()) {
                Ok(()) => EXIT_OK,
                Err(e) => {
                    eprintln!("error: cannot write output: {e}");
                    EXIT_CONFIG
                }
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}

fn preset_of(cmd: &Command) -> Option<Preset> {
    match cmd {
        Command::Spectrum { preset, .. }
        | Command::PowerSweep { preset, .. }
        | Command::Stability { preset, .. } => *preset,
        _ => None,
    }
}

fn apply_flags(spec: &mut ParamSpec, flags: &ParamFlags) {
    if let Some(x) = flags.e {
        spec.e = x;
    }
    if let Some(x) = flags.gamma0 {
        spec.gamma0 = x;
    }
    if let Some(x) = flags.gamma2 {
        spec.gamma2 = x;
    }
    if let Some(x) = flags.chi {
        spec.chi = x;
    }
    if let Some(x) = flags.v {
        spec.v = x;
    }
    if let Some(x) = flags.c {
        spec.c = x;
    }
}

fn stamp_metadata(table: &mut Table, p: &DimerParams, opts: &SolverOpts) {
    table.meta("version", env!("CARGO_PKG_VERSION"));
    table.meta_f("E", p.freq_shift);
    table.meta_f("gamma0", p.linear_gain);
    table.meta_f("gamma2", p.nonlinear_loss);
    table.meta_f("chi", p.kerr);
    table.meta_f("V", p.coupling);
    table.meta_f("C", p.hopping);
    table.meta("seed", opts.seed);
    table.meta("n_starts", opts.n_starts as u64);
    table.meta_f("residual_tol", SOLUTION_RESIDUAL_TOL);
}

fn lattice_config(flags: &LatticeFlags, file: &FileConfig) -> LatticeConfig {
    let n_sites = flags.n_sites.or(file.n_sites).unwrap_or(401);
    let mut cfg = LatticeConfig::with_sites(n_sites);
    if let Some(x) = flags.dt.or(file.dt) {
        cfg.dt = x;
    }
    if let Some(x) = flags.horizon.or(file.horizon) {
        cfg.horizon = x;
    }
    if let Some(x) = flags.ramp_time.or(file.ramp_time) {
        cfg.ramp_time = x;
    }
    if let Some(x) = flags.sample_stride.or(file.sample_stride) {
        cfg.sample_stride = x;
    }
    if let Some(x) = file.absorber_width {
        cfg.absorber_width = x;
    }
    if let Some(x) = file.absorber_max {
        cfg.absorber_max = x;
    }
    cfg
}

fn dispatch(
    cmd: &Command,
    p: &DimerParams,
    file: &FileConfig,
    opts: &SolverOpts,
) -> Result<Table, Error> {
    match cmd {
        Command::DimerModes { omega } => dimer_modes_table(p, omega.or(file.omega)),
        Command::Spectrum {
            preset,
            omega_min,
            omega_max,
            points,
            gamma0_list,
        } => spectrum_table(p, *preset, *omega_min, *omega_max, *points, gamma0_list),
        Command::PowerSweep {
            preset,
            omega,
            pin,
            pin_min,
            pin_max,
            points,
        } => {
            let omega = omega.or(file.omega).unwrap_or(p.freq_shift);
            let grid = match (preset, pin.or(file.pin)) {
                (_, Some(single)) => vec![single],
                (Some(Preset::Fig3), None) => log_grid(0.001, 5.0, 200),
                (None, None) => log_grid(*pin_min, *pin_max, *points),
                (Some(other), None) => {
                    return Err(Error::InvalidConfig(format!(
                        "preset {other:?} is not a power-sweep preset"
                    )))
                }
            };
            power_sweep_table(p, omega, &grid, opts)
        }
        Command::ScatterSolve { omega, pin } => {
            let omega = omega.or(file.omega).unwrap_or(p.freq_shift);
            scatter_solve_table(p, omega, *pin, opts)
        }
        Command::Stability {
            preset,
            branch,
            omega,
            pin,
            index,
            eps,
            lattice,
        } => {
            let cfg = lattice_config(lattice, file);
            let eps = eps.or(file.eps).unwrap_or(1e-4);
            match preset {
                Some(Preset::Fig4) => stability_preset_table(p, &cfg, eps),
                Some(other) => Err(Error::InvalidConfig(format!(
                    "preset {other:?} is not a stability preset"
                ))),
                None => {
                    let branch = branch.clone().ok_or_else(|| {
                        Error::InvalidConfig("stability needs --branch or --preset fig4".into())
                    })?;
                    let omega = omega.or(file.omega).unwrap_or(p.freq_shift);
                    stability_table(p, &cfg, opts, &branch, omega, pin.or(file.pin), *index, eps)
                }
            }
        }
        Command::Simulate { omega, pin, lattice } => {
            let omega = omega.or(file.omega).unwrap_or(p.freq_shift);
            let cfg = lattice_config(lattice, file);
            simulate_table(p, &cfg, omega, *pin)
        }
        Command::Pinned {
            omega,
            asymmetric,
            below_band,
            half_width,
        } => pinned_table(
            p,
            omega.or(file.omega),
            *asymmetric,
            *below_band,
            *half_width,
        ),
    }
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n <= 1 {
        return vec![lo];
    }
    (0..n)
        .map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64))
        .collect()
}

fn regime_label(r: SymmetricRegime) -> &'static str {
    match r {
        SymmetricRegime::None => "none",
        SymmetricRegime::Mono => "mono",
        SymmetricRegime::Bi => "bi",
    }
}

fn dimer_modes_table(p: &DimerParams, omega: Option<f64>) -> Result<Table, Error> {
    let census = mode_census(p);
    let asym = asymmetric_modes(p);
    let omega_census = if p.nonlinear_loss != 0.0 {
        p.freq_shift + (p.linear_gain / p.nonlinear_loss) * p.kerr
    } else {
        p.freq_shift
    };
    let omega_sym = omega.unwrap_or(omega_census);

    let mut table = Table::new(vec![
        "kind",
        "omega",
        "intensity_a",
        "intensity_b",
        "delta",
        "re_a",
        "im_a",
        "re_b",
        "im_b",
        "residual",
    ]);
    table.meta("symmetric_regime", regime_label(census.symmetric_regime));
    table.meta("asymmetric_count", census.asymmetric_count as u64);
    table.meta("multistable", census.multistable);
    table.meta_f("omega_census", omega_census);
    table.meta_f("omega_symmetric", omega_sym);

    let mut push = |kind: &str,
                    omega: f64,
                    ia: f64,
                    ib: f64,
                    delta: f64,
                    a: Complex64,
                    b: Complex64| {
        let res = pt_fano::model::stationary_dimer_residual(
            p,
            omega,
            &pt_fano::DimerState::new(a, b),
        )
        .max_abs;
        table.push_row(vec![
            json!(kind),
            num(omega),
            num(ia),
            num(ib),
            num(delta),
            num(a.re),
            num(a.im),
            num(b.re),
            num(b.im),
            num(res),
        ]);
    };

    match symmetric_modes(p, omega_sym) {
        Ok(modes) => {
            for m in modes {
                push(
                    if m.amplitude_free {
                        "symmetric-amplitude-free"
                    } else {
                        "symmetric"
                    },
                    m.omega,
                    m.intensity,
                    m.intensity,
                    m.delta,
                    m.psi_a,
                    m.psi_b,
                );
            }
        }
        Err(Error::DegenerateEquation { .. }) => {}
        Err(e) => return Err(e),
    }
    for m in asym {
        push(
            "asymmetric",
            m.omega,
            m.intensity_a,
            m.intensity_b,
            m.delta,
            m.psi_a,
            m.psi_b,
        );
    }
    Ok(table)
}

fn spectrum_table(
    p: &DimerParams,
    preset: Option<Preset>,
    omega_min: f64,
    omega_max: f64,
    points: usize,
    gamma0_list: &Option<String>,
) -> Result<Table, Error> {
    let gamma0s: Vec<f64> = if preset == Some(Preset::Fig2) {
        vec![0.0, 0.001, 0.005, 0.01]
    } else if let Some(list) = gamma0_list {
        list.split(',')
            .map(|s| {
                s.trim()
                    .parse()
                    .map_err(|_| Error::InvalidConfig(format!("bad gamma0 value: {s}")))
            })
            .collect::<Result<_, _>>()?
    } else {
        vec![p.linear_gain]
    };
    let omegas: Vec<f64> = (0..points.max(2))
        .map(|i| omega_min + (omega_max - omega_min) * i as f64 / (points.max(2) - 1) as f64)
        .collect();

    let mut table = Table::new(vec!["gamma0", "omega", "transmissivity"]);
    if preset == Some(Preset::Fig2) {
        table.meta("preset", "fig2");
        table.meta("gamma0_list_note", "gamma0 set is an artifact choice");
    }
    for &g0 in &gamma0s {
        let pg = DimerParams::new(
            p.freq_shift,
            g0,
            p.nonlinear_loss,
            p.kerr,
            p.coupling,
            p.hopping,
        )?;
        for (omega, t, _r) in linear_spectrum(&pg, &omegas)? {
            table.push_row(vec![num(g0), num(omega), num(t)]);
        }
    }
    Ok(table)
}

fn solution_row(s: &ScatteringSolution, branch_id: i64) -> Vec<serde_json::Value> {
    vec![
        num(s.pin),
        json!(branch_id),
        json!(s.branch.label()),
        num(s.omega),
        num(s.wavenumber),
        num(s.incident),
        num(s.psi_a.re),
        num(s.psi_a.im),
        num(s.psi_b.re),
        num(s.psi_b.im),
        num(s.psi0.re),
        num(s.psi0.im),
        num(s.reflected.re),
        num(s.reflected.im),
        num(s.transmitted.re),
        num(s.transmitted.im),
        num(s.psi_a.norm_sqr()),
        num(s.psi_b.norm_sqr()),
        num(s.transmissivity),
        num(s.reflectivity),
    ]
}

const SOLUTION_COLUMNS: [&str; 20] = [
    "pin",
    "branch_id",
    "branch",
    "omega",
    "wavenumber",
    "incident",
    "re_a",
    "im_a",
    "re_b",
    "im_b",
    "re_psi0",
    "im_psi0",
    "re_r",
    "im_r",
    "re_t",
    "im_t",
    "intensity_a",
    "intensity_b",
    "transmissivity",
    "reflectivity",
];

fn scatter_solve_table(
    p: &DimerParams,
    omega: f64,
    pin: f64,
    opts: &SolverOpts,
) -> Result<Table, Error> {
    if pin < 0.0 {
        return Err(Error::InvalidConfig(format!("pin must be >= 0, got {pin}")));
    }
    let sols = solve_scattering(p, omega, pin.sqrt(), opts)?;
    let mut table = Table::new(SOLUTION_COLUMNS.to_vec());
    table.meta_f("omega", omega);
    table.meta_f("pin", pin);
    table.meta("solutions", sols.len() as u64);
    for (i, s) in sols.iter().enumerate() {
        table.push_row(solution_row(s, i as i64));
    }
    Ok(table)
}

fn power_sweep_table(
    p: &DimerParams,
    omega: f64,
    grid: &[f64],
    opts: &SolverOpts,
) -> Result<Table, Error> {
    let diagram = power_sweep(p, omega, grid, opts);
    let mut table = Table::new(SOLUTION_COLUMNS.to_vec());
    table.meta_f("omega", omega);
    table.meta("grid_points", grid.len() as u64);
    table.meta("branches", diagram.branches.len() as u64);
    for (pin, err) in &diagram.failures {
        table.meta(&format!("gap_at_{pin}"), err.clone());
    }
    for (id, branch) in diagram.branches.iter().enumerate() {
        for (_, s) in &branch.points {
            table.push_row(solution_row(s, id as i64));
        }
    }
    Ok(table)
}

#[allow(clippy::too_many_arguments)]
fn stability_table(
    p: &DimerParams,
    cfg: &LatticeConfig,
    opts: &SolverOpts,
    branch: &str,
    omega: f64,
    pin: Option<f64>,
    index: usize,
    eps: f64,
) -> Result<Table, Error> {
    let matches_ultimate = branch == Branch::UltimateAsymmetricGain.label()
        || branch == Branch::UltimateAsymmetricLoss.label();
    let sols: Vec<ScatteringSolution> = if matches_ultimate && pin.is_none() {
        let (_, ultimates) = ultimate_asymmetric(p);
        ultimates
    } else {
        let pin = pin.ok_or_else(|| {
            Error::InvalidConfig("stability --branch needs --pin (except ultimate states)".into())
        })?;
        solve_scattering(p, omega, pin.sqrt(), opts)?
    };
    let chosen: Vec<&ScatteringSolution> = sols
        .iter()
        .filter(|s| s.branch.label() == branch)
        .collect();
    let sol = chosen.get(index).copied().ok_or_else(|| {
        Error::InvalidConfig(format!(
            "no solution with branch {branch} and index {index} (found {})",
            chosen.len()
        ))
    })?;
    let mut table = stability_rows(vec![("probe", p, cfg, sol, eps)])?;
    table.meta_f("eps", eps);
    Ok(table)
}

fn stability_preset_table(
    p: &DimerParams,
    cfg: &LatticeConfig,
    eps: f64,
) -> Result<Table, Error> {
    let (_, ultimates) = ultimate_asymmetric(p);
    let fano = pt_fano::scattering::fano_family(p, 4.0);
    let mut cases: Vec<(&str, &DimerParams, &LatticeConfig, &ScatteringSolution, f64)> =
        Vec::new();
    for u in &ultimates {
        cases.push((u.branch.label(), p, cfg, u, eps));
    }
    if let Some(f) = fano.first() {
        cases.push(("fano-symmetric-pin4", p, cfg, f, eps));
    }
    let mut table = stability_rows(cases)?;
    table.meta("preset", "fig4");
    table.meta_f("eps", eps);
    Ok(table)
}

fn stability_rows(
    cases: Vec<(&str, &DimerParams, &LatticeConfig, &ScatteringSolution, f64)>,
) -> Result<Table, Error> {
    let mut table = Table::new(vec![
        "case",
        "branch",
        "pin",
        "class",
        "final_distance",
        "band_lo",
        "band_hi",
        "mean_transmissivity",
        "asymmetry",
    ]);
    for (name, p, cfg, sol, eps) in cases {
        let v = probe_stability(p, cfg, sol, eps)?;
        let class = match v.class {
            StabilityClass::FixedPoint => "fixed-point",
            StabilityClass::LimitCycle => "limit-cycle",
            StabilityClass::Divergent => "divergent",
        };
        table.push_row(vec![
            json!(name),
            json!(sol.branch.label()),
            num(sol.pin),
            json!(class),
            num(v.final_distance),
            num(v.oscillation_band.0),
            num(v.oscillation_band.1),
            num(v.mean_transmissivity),
            num(v.asymmetry),
        ]);
    }
    Ok(table)
}

fn simulate_table(
    p: &DimerParams,
    cfg: &LatticeConfig,
    omega: f64,
    pin: f64,
) -> Result<Table, Error> {
    if pin < 0.0 {
        return Err(Error::InvalidConfig(format!("pin must be >= 0, got {pin}")));
    }
    let result = run_scattering_sim(p, cfg, omega, pin.sqrt())?;
    let mut table = Table::new(vec![
        "t",
        "intensity_a",
        "intensity_b",
        "re_a",
        "im_a",
        "re_b",
        "im_b",
        "t_est_running",
    ]);
    table.meta_f("omega", omega);
    table.meta_f("pin", pin);
    table.meta_f("t_est", result.t_est);
    table.meta("steady", result.steady);
    table.meta("n_sites", cfg.n_sites as u64);
    table.meta_f("dt", cfg.dt);
    table.meta_f("horizon", cfg.horizon);
    for s in &result.series {
        table.push_row(vec![
            num(s.t),
            num(s.intensity_a),
            num(s.intensity_b),
            num(s.psi_a.re),
            num(s.psi_a.im),
            num(s.psi_b.re),
            num(s.psi_b.im),
            num(s.t_est_running),
        ]);
    }
    Ok(table)
}

fn pinned_table(
    p: &DimerParams,
    omega: Option<f64>,
    asymmetric: bool,
    below_band: bool,
    half_width: i64,
) -> Result<Table, Error> {
    let opts = PinnedOpts {
        include_below_band: below_band,
        ..Default::default()
    };
    let modes: Vec<PinnedMode> = if asymmetric {
        pinned_asymmetric_opts(p, &opts)
    } else {
        let omega = omega.ok_or_else(|| {
            Error::InvalidConfig("pinned needs --omega (or --asymmetric)".into())
        })?;
        pinned_symmetric_opts(p, omega, &opts)?
    };

    let mut table = Table::new(vec![
        "mode",
        "kind",
        "omega",
        "lambda",
        "coupling_eff",
        "freq_shift_eff",
        "intensity_a",
        "intensity_b",
        "n",
        "re_psi",
        "im_psi",
    ]);
    table.meta("modes", modes.len() as u64);
    for (i, m) in modes.iter().enumerate() {
        let (kind, ia, ib) = match m.dimer {
            PinnedDimer::Symmetric(sm) => ("symmetric", sm.intensity, sm.intensity),
            PinnedDimer::Asymmetric(am) => ("asymmetric", am.intensity_a, am.intensity_b),
        };
        table.meta_f(
            &format!("mode_{i}_residual"),
            pt_fano::pinned::lattice_residual(p, m),
        );
        for (n, psi) in m.profile(half_width) {
            table.push_row(vec![
                json!(i as u64),
                json!(kind),
                num(m.omega),
                num(m.lambda),
                num(m.coupling_eff),
                num(m.freq_shift_eff),
                num(ia),
                num(ib),
                json!(n),
                num(psi.re),
                num(psi.im),
            ]);
        }
    }
    Ok(table)
}
