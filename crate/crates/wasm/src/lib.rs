//! Browser bindings: three interactive views of the PT dimer physics.
//!
//! Each export takes plain numbers, runs the core solvers, and returns a
//! JSON string (`{"error": "..."}` on bad input) for the static demo page
//! to plot. Build with `wasm-pack build crates/wasm --target web`.

use wasm_bindgen::prelude::*;

use pt_fano::lattice::{load_stationary, LatticeConfig};
use pt_fano::scattering::{
    fano_family, linear_spectrum, power_sweep, solve_scattering, ultimate_asymmetric,
    ScatteringSolution, SolverOpts,
};
use pt_fano::DimerParams;

fn err_json(msg: impl std::fmt::Display) -> String {
    serde_json::json!({ "error": msg.to_string() }).to_string()
}

/// Linear transmission curves t(omega) for several gain/loss rates.
#[wasm_bindgen]
pub fn linear_spectrum_json(
    e: f64,
    v: f64,
    c: f64,
    gamma0_csv: &str,
    omega_min: f64,
    omega_max: f64,
    points: usize,
) -> String {
    linear_spectrum_impl(e, v, c, gamma0_csv, omega_min, omega_max, points)
        .unwrap_or_else(err_json)
}

fn linear_spectrum_impl(
    e: f64,
    v: f64,
    c: f64,
    gamma0_csv: &str,
    omega_min: f64,
    omega_max: f64,
    points: usize,
) -> Result<String, String> {
    let n = points.clamp(2, 4096);
    let band = 2.0 * c;
    let lo = omega_min.max(-band + 1e-6);
    let hi = omega_max.min(band - 1e-6);
    let omegas: Vec<f64> = (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect();
    let mut curves = Vec::new();
    for part in gamma0_csv.split(',') {
        let g0: f64 = part.trim().parse().map_err(|_| format!("bad gamma0: {part}"))?;
        let p = DimerParams::new(e, g0, 0.0, 0.0, v, c).map_err(|e| e.to_string())?;
        let rows = linear_spectrum(&p, &omegas).map_err(|e| e.to_string())?;
        let pts: Vec<serde_json::Value> = rows
            .iter()
            .map(|(w, t, r)| serde_json::json!({ "omega": w, "t": t, "r": r }))
            .collect();
        curves.push(serde_json::json!({ "gamma0": g0, "points": pts }));
    }
    Ok(serde_json::json!({ "curves": curves }).to_string())
}

/// Branch diagram of stationary scattering states over incident power.
#[wasm_bindgen]
pub fn power_sweep_json(
    e: f64,
    gamma0: f64,
    gamma2: f64,
    v: f64,
    c: f64,
    omega: f64,
    pin_min: f64,
    pin_max: f64,
    points: usize,
    seed: u64,
) -> String {
    power_sweep_impl(e, gamma0, gamma2, v, c, omega, pin_min, pin_max, points, seed)
        .unwrap_or_else(err_json)
}

#[allow(clippy::too_many_arguments)]
fn power_sweep_impl(
    e: f64,
    gamma0: f64,
    gamma2: f64,
    v: f64,
    c: f64,
    omega: f64,
    pin_min: f64,
    pin_max: f64,
    points: usize,
    seed: u64,
) -> Result<String, String> {
    let p = DimerParams::new(e, gamma0, gamma2, 0.0, v, c).map_err(|e| e.to_string())?;
    let n = points.clamp(2, 400);
    let lo = pin_min.max(1e-6);
    let hi = pin_max.max(lo * (1.0 + 1e-9));
    let grid: Vec<f64> = (0..n)
        .map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64))
        .collect();
    let opts = SolverOpts {
        seed,
        n_starts: 32,
        ..Default::default()
    };
    let diagram = power_sweep(&p, omega, &grid, &opts);
    let branches: Vec<serde_json::Value> = diagram
        .branches
        .iter()
        .map(|b| {
            let pts: Vec<serde_json::Value> = b
                .points
                .iter()
                .map(|(pin, s)| {
                    serde_json::json!({
                        "pin": pin,
                        "t": s.transmissivity,
                        "ia": s.psi_a.norm_sqr(),
                        "ib": s.psi_b.norm_sqr(),
                    })
                })
                .collect();
            serde_json::json!({ "tag": b.tag.label(), "points": pts })
        })
        .collect();
    Ok(serde_json::json!({
        "branches": branches,
        "special_intensity": if gamma2 > 0.0 { gamma0 / gamma2 } else { f64::NAN },
    })
    .to_string())
}

/// Perturbed time evolution of a chosen stationary state on the full lattice.
#[wasm_bindgen]
pub fn stability_trajectory_json(
    e: f64,
    gamma0: f64,
    gamma2: f64,
    v: f64,
    c: f64,
    branch: &str,
    pin: f64,
    eps: f64,
    horizon: f64,
    n_sites: usize,
) -> String {
    stability_trajectory_impl(e, gamma0, gamma2, v, c, branch, pin, eps, horizon, n_sites)
        .unwrap_or_else(err_json)
}

#[allow(clippy::too_many_arguments)]
fn stability_trajectory_impl(
    e: f64,
    gamma0: f64,
    gamma2: f64,
    v: f64,
    c: f64,
    branch: &str,
    pin: f64,
    eps: f64,
    horizon: f64,
    n_sites: usize,
) -> Result<String, String> {
    let p = DimerParams::new(e, gamma0, gamma2, 0.0, v, c).map_err(|e| e.to_string())?;
    let sol = pick_solution(&p, branch, pin)?;

    let mut cfg = LatticeConfig::with_sites(n_sites.clamp(101, 801) | 1);
    cfg.horizon = horizon.clamp(50.0, 4000.0);
    cfg.sample_stride = 20;
    let mut sim = load_stationary(&p, &cfg, &sol).map_err(|e| e.to_string())?;
    sim.state.psi_a *= 1.0 + eps;
    sim.state.psi_b *= 1.0 + eps;
    let mut series = Vec::new();
    let outcome = match sim.run_recording(cfg.horizon, &mut series) {
        Ok(()) => "bounded",
        Err(pt_fano::Error::Blowup { .. }) => "blowup",
        Err(e) => return Err(e.to_string()),
    };

    // Decimate for the plot.
    let stride = (series.len() / 1500).max(1);
    let pts: Vec<serde_json::Value> = series
        .iter()
        .step_by(stride)
        .map(|s| {
            serde_json::json!({
                "t": s.t,
                "ia": s.intensity_a,
                "ib": s.intensity_b,
                "te": s.t_est_running,
            })
        })
        .collect();
    Ok(serde_json::json!({
        "outcome": outcome,
        "branch": sol.branch.label(),
        "pin": sol.pin,
        "target_ia": sol.psi_b.norm_sqr(),
        "target_ib": sol.psi_a.norm_sqr(),
        "points": pts,
    })
    .to_string())
}

fn pick_solution(p: &DimerParams, branch: &str, pin: f64) -> Result<ScatteringSolution, String> {
    match branch {
        "ultimate-asymmetric-loss" | "ultimate-asymmetric-gain" => {
            let (_, ultimates) = ultimate_asymmetric(p);
            ultimates
                .into_iter()
                .find(|s| s.branch.label() == branch)
                .ok_or_else(|| "ultimate state not available".to_string())
        }
        "fano-symmetric" => fano_family(p, pin)
            .into_iter()
            .next()
            .ok_or_else(|| format!("no transmission-zero state at pin = {pin}")),
        other => {
            let opts = SolverOpts {
                n_starts: 32,
                ..Default::default()
            };
            let sols =
                solve_scattering(p, p.freq_shift, pin.max(0.0).sqrt(), &opts)
                    .map_err(|e| e.to_string())?;
            let tag: Vec<&ScatteringSolution> = sols
                .iter()
                .filter(|s| s.branch.label() == other)
                .collect();
            tag.first()
                .copied()
                .copied()
                .ok_or_else(|| format!("no solution tagged {other} at pin = {pin}"))
        }
    }
}
