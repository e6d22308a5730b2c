//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line
//! (run with `cargo test --test acceptance -- --nocapture` to see them all).

use num_complex::Complex64;

use pt_fano::dimer::asymmetric_modes;
use pt_fano::lattice::{probe_stability, run_scattering_sim, LatticeConfig, StabilityClass};
use pt_fano::model::{stationary_dimer_residual, DimerState};
use pt_fano::pinned::{
    decay_factor, lattice_residual, lattice_residual_of, pinned_asymmetric, pinned_symmetric,
    plus_radical_profile,
};
use pt_fano::scattering::{
    eit_branch, fano_family, fano_window_max, linear_solve_direct, linear_spectrum, power_sweep,
    scattering_residual, solve_scattering, tristability_threshold, ultimate_asymmetric, Branch,
    SolverOpts,
};
use pt_fano::DimerParams;

fn fig3_params() -> DimerParams {
    DimerParams::new(0.1, 0.01, 1e-4, 0.0, 0.2, 1.0).unwrap()
}

fn linear_params(gamma0: f64) -> DimerParams {
    DimerParams::new(0.1, gamma0, 0.0, 0.0, 0.2, 1.0).unwrap()
}

fn pass(n: &str, what: &str, details: String) {
    println!("criterion {n} ({what}): PASS {details}");
}

#[test]
fn criterion_01_linear_fano_zero() {
    let p = linear_params(0.0);
    let t_closed = linear_spectrum(&p, &[0.1]).unwrap()[0].1;
    assert!(t_closed.abs() < 1e-12, "closed-form t = {t_closed:e}");

    let cfg = LatticeConfig::default();
    let sim = run_scattering_sim(&p, &cfg, 0.1, 1.0).unwrap();
    assert!(sim.t_est < 0.01, "time-domain t_est = {}", sim.t_est);
    pass(
        "1",
        "linear resonant reflection",
        format!("t_closed = {t_closed:.2e}, t_est = {:.2e}", sim.t_est),
    );
}

#[test]
fn criterion_02_linear_eit_transmission() {
    let p = linear_params(0.01);
    let t_closed = linear_spectrum(&p, &[0.1]).unwrap()[0].1;
    assert!((t_closed - 1.0).abs() < 1e-12, "closed-form t = {t_closed}");
    println!("criterion 2a (closed-form full transmission at omega = E): PASS [t = {t_closed}]");

    let cfg = LatticeConfig::default();
    let sim = run_scattering_sim(&p, &cfg, 0.1, 1.0).unwrap();
    let td_ok = (sim.t_est - 1.0).abs() < 0.01;
    println!(
        "criterion 2b (time-domain t_est = 1 +- 0.01): {} [t_est = {:.4}, steady = {}]",
        if td_ok { "PASS" } else { "FAIL" },
        sim.t_est,
        sim.steady
    );
    assert!(
        td_ok,
        "time-domain t_est = {:.4}: with gamma2 = 0 and gamma0 = 0.01 the homogeneous \
         lattice carries an exponentially growing localized mode (measured field rate \
         2.36e-3, matching sqrt(Lambda^2 + gamma0^2) - Lambda with Lambda = V^2/(2 C sin k)), \
         so the stationary perfect-transmission state is a saddle and no averaging window \
         measures it; the estimate inflates with the horizon. Stable operation needs the \
         nonlinear loss (gamma2 > 0). See README, section 'Dynamic realizability'.",
        sim.t_est
    );
}

#[test]
fn criterion_03_linear_spectrum_cross_validation() {
    // Twenty in-band frequencies covering the resonance region, chosen off
    // the gamma0 = 0 resonant singularity of the direct 2x2 solve and inside
    // the wavenumber range the absorbing edges are tuned for.
    let omegas: Vec<f64> = (0..20).map(|i| -1.4 + 2.83 * i as f64 / 19.0).collect();
    let mut worst_algebraic: f64 = 0.0;
    let mut cfg = LatticeConfig::default();
    cfg.horizon = 1500.0;
    let mut failures: Vec<String> = Vec::new();
    for gamma0 in [0.0, 0.005, 0.01] {
        let p = linear_params(gamma0);
        let mut worst_td: f64 = 0.0;
        for &omega in &omegas {
            let t_closed = linear_spectrum(&p, &[omega]).unwrap()[0].1;
            let t_direct = linear_solve_direct(&p, omega, 1.0).unwrap().transmissivity;
            let d1 = (t_closed - t_direct).abs();
            worst_algebraic = worst_algebraic.max(d1);
            assert!(
                d1 < 0.01,
                "closed form vs direct solve disagree at gamma0 = {gamma0}, omega = {omega}"
            );
            let sim = run_scattering_sim(&p, &cfg, omega, 1.0).unwrap();
            worst_td = worst_td.max((t_closed - sim.t_est).abs());
        }
        let ok = worst_td < 0.01;
        println!(
            "criterion 3 sub (gamma0 = {gamma0}): closed vs direct PASS; time domain {} \
             [worst |t_closed - t_est| = {worst_td:.3e}]",
            if ok { "PASS" } else { "FAIL" }
        );
        if !ok {
            failures.push(format!("gamma0 = {gamma0} (worst {worst_td:.2e})"));
        }
    }
    assert!(
        failures.is_empty(),
        "time-domain estimates cannot match the stationary spectra for {}: for any \
         gamma0 large enough (threshold sits between 0.001 and 0.005 here) the linear \
         lattice has an exponentially growing localized mode at the resonance frequency \
         (measured rates 6.1e-4 at gamma0 = 0.005 and 2.36e-3 at gamma0 = 0.01, matching \
         sqrt(Lambda^2 + gamma0^2) - Lambda), so the drive transient inevitably seeds \
         divergence and the window average never settles to the stationary value. \
         The two stationary routes agree to {worst_algebraic:.1e} everywhere. \
         See README, section 'Dynamic realizability'.",
        failures.join(", ")
    );
    pass(
        "3",
        "three-route spectra",
        format!("60 points, worst algebraic disagreement {worst_algebraic:.2e}"),
    );
}

#[test]
fn criterion_04_tristability_threshold() {
    let p = fig3_params();
    assert_eq!(eit_branch(&p, f64::sqrt(0.03)).len(), 3);
    assert_eq!(eit_branch(&p, f64::sqrt(0.05)).len(), 1);

    // Bisect the count change and compare with the closed-form threshold.
    let mut lo = 0.03f64;
    let mut hi = 0.05f64;
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if eit_branch(&p, mid.sqrt()).len() >= 3 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let boundary = 0.5 * (lo + hi);
    let expected = tristability_threshold(&p);
    assert!((expected - 1.0 / 27.0).abs() < 1e-15);
    assert!(
        (boundary - expected).abs() < 1e-9,
        "bisected {boundary}, formula {expected}"
    );
    pass(
        "4",
        "tristability threshold",
        format!("bisected boundary {boundary:.12} vs 1/27 = {expected:.12}"),
    );
}

#[test]
fn criterion_05_fano_window_and_ultimate_power() {
    let p = fig3_params();
    let pmax = fano_window_max(&p);
    assert!((pmax - 16.0 / 3.99).abs() < 1e-12);

    // Nonempty exactly inside the window.
    for pin in [1e-6, 0.5, 1.0, 4.0, pmax - 1e-6] {
        let family = fano_family(&p, pin);
        assert!(!family.is_empty(), "empty inside the window at pin = {pin}");
        for s in &family {
            let resid = scattering_residual(&p, s.omega, s.incident, &s.state())
                .unwrap()
                .max_abs;
            assert!(resid < 1e-10, "residual {resid:e} at pin = {pin}");
            assert!(
                s.transmitted.norm() / s.incident < 1e-10,
                "|T|/I = {:e}",
                s.transmitted.norm() / s.incident
            );
        }
    }
    assert!(fano_family(&p, pmax + 1e-6).is_empty());
    assert!(fano_family(&p, 5.0).is_empty());

    let (pin_star, ultimates) = ultimate_asymmetric(&p);
    assert!((pin_star - 1.00251).abs() < 1e-3);
    assert!(pin_star < pmax, "intrinsic bistability: {pin_star} < {pmax}");
    for s in &ultimates {
        let resid = scattering_residual(&p, s.omega, s.incident, &s.state())
            .unwrap()
            .max_abs;
        assert!(resid < 1e-12, "ultimate residual {resid:e}");
    }
    pass(
        "5",
        "transmission-zero window",
        format!("pmax = {pmax:.6}, pin* = {pin_star:.6}"),
    );
}

#[test]
fn criterion_06_multistart_completeness() {
    // The tristability threshold (criterion 4) caps the perfectly transmitting
    // family at one root above Pin = 1/27, so the stated five-solution
    // closed-form census (three such roots plus the zero-transmission pair)
    // exists below it; the check runs at Pin = 0.03 with the originally
    // stated Pin = 0.5 verified against its own closed-form census.
    let p = fig3_params();

    let recovered = |pin: f64, opts: &SolverOpts| {
        let sols = solve_scattering(&p, 0.1, pin.sqrt(), opts).unwrap();
        let closed: Vec<DimerState> = eit_branch(&p, pin.sqrt())
            .iter()
            .chain(fano_family(&p, pin).iter())
            .map(|s| s.state())
            .collect();
        for c in &closed {
            let hit = sols
                .iter()
                .any(|s| ((s.psi_a - c.psi_a).norm_sqr() + (s.psi_b - c.psi_b).norm_sqr()).sqrt() < 1e-8);
            assert!(hit, "closed-form solution not recovered at pin = {pin}");
        }
        for i in 0..sols.len() {
            for j in (i + 1)..sols.len() {
                assert!(
                    sols[i].state_distance(&sols[j]) > opts.dedup_tol,
                    "duplicates at pin = {pin}"
                );
            }
        }
        (sols, closed.len())
    };

    let opts = SolverOpts::default();
    let (sols_low, n_closed_low) = recovered(0.03, &opts);
    assert_eq!(n_closed_low, 5, "3 EIT + 2 Fano closed forms at Pin = 0.03");
    let eit = sols_low.iter().filter(|s| s.branch == Branch::EitSymmetric).count();
    let fano = sols_low.iter().filter(|s| s.branch == Branch::FanoSymmetric).count();
    assert_eq!((eit, fano), (3, 2));

    let (sols_half, n_closed_half) = recovered(0.5, &opts);
    assert_eq!(n_closed_half, 3, "1 EIT + 2 Fano closed forms at Pin = 0.5");

    // Seed stability: identical solution sets for five different seeds.
    for pin in [0.03, 0.5] {
        let reference = solve_scattering(&p, 0.1, f64::sqrt(pin), &opts).unwrap();
        for seed in 1..=4u64 {
            let opts_seeded = SolverOpts { seed, ..Default::default() };
            let again = solve_scattering(&p, 0.1, f64::sqrt(pin), &opts_seeded).unwrap();
            assert_eq!(reference.len(), again.len(), "seed {seed}, pin {pin}");
            for (a, b) in reference.iter().zip(&again) {
                assert!(a.state_distance(b) < 1e-9, "seed {seed}, pin {pin}");
            }
        }
    }
    pass(
        "6",
        "multistart completeness",
        format!(
            "Pin=0.03: {} solutions (3 EIT + 2 Fano recovered); Pin=0.5: {} solutions; \
             5 seeds identical",
            sols_low.len(),
            sols_half.len()
        ),
    );
}

#[test]
fn criterion_07_dimer_census() {
    let p = DimerParams::new(0.1, 0.5, 0.1, 0.0, 0.2, 1.0).unwrap();
    let modes = asymmetric_modes(&p);
    assert_eq!(modes.len(), 2);
    let mut pairs: Vec<(f64, f64)> = modes
        .iter()
        .map(|m| (m.intensity_a, m.intensity_b))
        .collect();
    pairs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    assert!((pairs[0].0 - 1.0).abs() < 1e-12 && (pairs[0].1 - 4.0).abs() < 1e-12);
    assert!((pairs[1].0 - 4.0).abs() < 1e-12 && (pairs[1].1 - 1.0).abs() < 1e-12);
    for m in &modes {
        assert!((m.omega - 0.1).abs() < 1e-15);
        let r = stationary_dimer_residual(&p, m.omega, &DimerState::new(m.psi_a, m.psi_b));
        assert!(r.max_abs < 1e-12, "residual {:e}", r.max_abs);
    }
    let flipped = DimerParams::new(0.1, 0.5, -0.1, 0.0, 0.2, 1.0).unwrap();
    assert!(asymmetric_modes(&flipped).is_empty());
    pass(
        "7",
        "asymmetric dimer census",
        "intensities {(1,4),(4,1)} at omega = 0.1; empty for gamma2 < 0".into(),
    );
}

#[test]
fn criterion_08_stability_verdicts() {
    let p = fig3_params();
    let cfg = LatticeConfig::default();
    let (_, ultimates) = ultimate_asymmetric(&p);
    let gain = &ultimates[0];
    let loss = &ultimates[1];
    assert_eq!(gain.branch, Branch::UltimateAsymmetricGain);
    assert_eq!(loss.branch, Branch::UltimateAsymmetricLoss);

    let v_loss = probe_stability(&p, &cfg, loss, 1e-4).unwrap();
    let loss_ok = v_loss.class == StabilityClass::FixedPoint && v_loss.final_distance < 0.1;
    println!(
        "criterion 8a (loss-side ultimate state -> FixedPoint): {} [observed {:?}, final_distance {:.2e}]",
        if loss_ok { "PASS" } else { "FAIL" },
        v_loss.class,
        v_loss.final_distance
    );

    let v_gain = probe_stability(&p, &cfg, gain, 1e-4).unwrap();
    let gain_ok = v_gain.class == StabilityClass::LimitCycle;
    println!(
        "criterion 8b (gain-side ultimate state -> LimitCycle): {} [observed {:?}, band ({:.1}, {:.1})]",
        if gain_ok { "PASS" } else { "FAIL" },
        v_gain.class,
        v_gain.oscillation_band.0,
        v_gain.oscillation_band.1
    );

    let fano = fano_family(&p, 4.0);
    let v_fano = probe_stability(&p, &cfg, &fano[0], 1e-4).unwrap();
    let fano_metrics_ok = v_fano.asymmetry > 1.0 && v_fano.mean_transmissivity < 0.1;
    let fano_ok = v_fano.class == StabilityClass::LimitCycle && fano_metrics_ok;
    println!(
        "criterion 8c (symmetric zero-transmission state at Pin=4 -> LimitCycle, asymmetry > 1, \
         mean t < 0.1): {} [observed {:?}, asymmetry {:.1}, mean t {:.4}]",
        if fano_ok { "PASS" } else { "FAIL" },
        v_fano.class,
        v_fano.asymmetry,
        v_fano.mean_transmissivity
    );

    assert!(loss_ok, "loss-side ultimate state must be a fixed point");
    assert!(
        gain_ok,
        "expected LimitCycle for the gain-side ultimate state, observed {:?}: the \
         anti-saturable element (linear loss, cubic gain) has no bounding mechanism in \
         these equations; an upward intensity perturbation grows without limit \
         (blowup time dt-converged at t ~ 574) and downward/phase perturbations \
         migrate to the coexisting stable partner state instead of orbiting. \
         See README, section 'Stability findings'.",
        v_gain.class
    );
    assert!(
        fano_ok,
        "expected LimitCycle for the symmetric zero-transmission state, observed {:?} \
         (asymmetry {:.2}, mean transmissivity {:.4}): the symmetry-breaking \
         perturbation either runs away on the anti-saturable element (blowup at \
         t ~ 1024) or settles onto the coexisting stable asymmetric solution with \
         low transmissivity; the intermediate evolution matches the broken-symmetry, \
         low-transmission description but no bounded oscillation persists. \
         See README, section 'Stability findings'.",
        v_fano.class,
        v_fano.asymmetry,
        v_fano.mean_transmissivity
    );
}

#[test]
fn criterion_09_pinned_modes() {
    let p = fig3_params();
    let lambda = decay_factor(&p, 2.5).unwrap();
    assert_eq!(lambda, 0.5, "decay factor at omega = 2.5 is exactly 1/2");

    // Asymmetric pinned modes (Kerr-shifted above the band).
    let pk = DimerParams::new(0.1, 0.5, 0.1, 0.5, 0.2, 1.0).unwrap();
    let modes = pinned_asymmetric(&pk);
    assert_eq!(modes.len(), 2);
    let mut checked = 0;
    for m in &modes {
        let res = lattice_residual(&pk, m);
        assert!(res < 1e-10, "asymmetric pinned residual {res:e}");
        checked += 1;
    }

    // Symmetric pinned modes just below the self-consistent tangency.
    let omega_star = {
        let f = |w: f64| {
            let (e_eff, v_eff) = pt_fano::pinned::effective_params(&p, w).unwrap();
            w - e_eff - v_eff
        };
        // f runs negative near the band edge and positive far above it.
        let mut lo = 2.0 + 1e-9;
        let mut hi = 2.2;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    };
    let sym = pinned_symmetric(&p, omega_star - 1e-12).unwrap();
    assert!(!sym.is_empty());
    for m in &sym {
        let res = lattice_residual(&p, m);
        assert!(res < 1e-10, "symmetric pinned residual {res:e}");
        checked += 1;
    }

    // The wrong-sign closed form (radicals in omega^2 + 4C^2) does not
    // satisfy the lattice equations; the discrepancy stays documented.
    let m = &sym[0];
    let wrong = plus_radical_profile(&p, m.omega, &m.dimer_state());
    let res_printed = lattice_residual_of(&p, m.omega, &m.dimer_state(), &wrong, 201);
    assert!(
        res_printed > 1e-2,
        "wrong-sign profile unexpectedly satisfies the lattice: {res_printed:e}"
    );
    pass(
        "9",
        "pinned modes",
        format!(
            "lambda(2.5) = 0.5 exact; {checked} modes verified on 201 sites; \
             wrong-sign-radical residual {res_printed:.2e} (fails as documented)"
        ),
    );
}

#[test]
fn criterion_10_property_suites() {
    // Gauge invariance of the stationary dimer residual.
    let p = DimerParams::new(0.1, 0.5, 0.1, 0.2, 0.2, 1.0).unwrap();
    let s = DimerState::new(Complex64::new(0.4, -0.9), Complex64::new(1.1, 0.3));
    let base = stationary_dimer_residual(&p, 0.35, &s).max_abs;
    for i in 0..12 {
        let theta = i as f64 * 0.524;
        let phase = Complex64::from_polar(1.0, theta);
        let rotated = DimerState::new(phase * s.psi_a, phase * s.psi_b);
        let r = stationary_dimer_residual(&p, 0.35, &rotated).max_abs;
        assert!((r - base).abs() < 1e-13, "gauge broken at theta = {theta}");
    }

    // PT-conjugation closure on solver output.
    for m in asymmetric_modes(&p) {
        let image = pt_fano::model::pt_conjugate(&DimerState::new(m.psi_a, m.psi_b));
        let r = stationary_dimer_residual(&p, m.omega, &image).max_abs;
        assert!(r < 1e-10, "PT image residual {r:e}");
    }

    // Hermitian flux conservation, t + r = 1.
    let ph = DimerParams::new(0.1, 0.0, 0.0, 0.0, 0.2, 1.0).unwrap();
    for i in 0..40 {
        let omega = -1.9 + 3.8 * i as f64 / 39.0;
        let (_, t, r) = linear_spectrum(&ph, &[omega]).unwrap()[0];
        assert!((t + r - 1.0).abs() < 1e-12, "flux violated at omega = {omega}");
    }

    // Runge-Kutta order: dt halving shrinks the error ~16x.
    let ratio = rk4_order_ratio();
    assert!(
        (13.0..=19.0).contains(&ratio),
        "dt-halving error ratio {ratio} outside 16 +- 3"
    );

    // Determinism: bit-identical solver output for a fixed seed.
    let pf = fig3_params();
    let opts = SolverOpts::default();
    let a = solve_scattering(&pf, 0.1, f64::sqrt(0.5), &opts).unwrap();
    let b = solve_scattering(&pf, 0.1, f64::sqrt(0.5), &opts).unwrap();
    assert_eq!(a.len(), b.len());
    for (x, y) in a.iter().zip(&b) {
        assert_eq!(x.psi_a.re.to_bits(), y.psi_a.re.to_bits());
        assert_eq!(x.psi_a.im.to_bits(), y.psi_a.im.to_bits());
        assert_eq!(x.psi_b.re.to_bits(), y.psi_b.re.to_bits());
        assert_eq!(x.psi_b.im.to_bits(), y.psi_b.im.to_bits());
    }

    // Power sweep branches stay within the continuation bound.
    let grid: Vec<f64> = (0..40)
        .map(|i| 0.01 * (450.0f64).powf(i as f64 / 39.0))
        .collect();
    let diagram = power_sweep(&pf, 0.1, &grid, &opts);
    for branch in &diagram.branches {
        for w in branch.points.windows(2) {
            assert!(w[0].1.state_distance(&w[1].1) <= opts.match_radius);
        }
    }

    pass(
        "10",
        "property suites",
        format!("gauge, PT closure, flux, order ratio {ratio:.1}, determinism, continuation"),
    );
}

fn rk4_order_ratio() -> f64 {
    use pt_fano::lattice::LatticeSim;
    let p = DimerParams::new(0.1, 0.0, 0.0, 0.0, 0.2, 1.0).unwrap();
    let mut cfg = LatticeConfig::with_sites(101);
    cfg.absorber_max = 0.0;
    cfg.absorber_width = 10;
    cfg.source_site = -35;
    cfg.probe_site = 35;
    let init = |sim: &mut LatticeSim| {
        let half = 50i64;
        for site in -half..=half {
            let x = site as f64 / 10.0;
            sim.state.psi[(site + half) as usize] =
                Complex64::new((-x * x).exp(), 0.3 * (-x * x).exp() * x);
        }
        sim.state.psi_a = Complex64::new(0.4, -0.1);
        sim.state.psi_b = Complex64::new(-0.2, 0.5);
    };
    let run = |dt: f64| {
        let mut c = cfg.clone();
        c.dt = dt;
        let mut sim = LatticeSim::new(&p, &c).unwrap();
        init(&mut sim);
        let steps = (2.0 / dt).round() as usize;
        for _ in 0..steps {
            sim.step().unwrap();
        }
        sim.state
    };
    let reference = run(0.0025);
    let err = |state: &pt_fano::lattice::LatticeState| {
        let mut acc = 0.0;
        for (a, b) in state.psi.iter().zip(&reference.psi) {
            acc += (a - b).norm_sqr();
        }
        acc += (state.psi_a - reference.psi_a).norm_sqr();
        acc += (state.psi_b - reference.psi_b).norm_sqr();
        acc.sqrt()
    };
    err(&run(0.04)) / err(&run(0.02))
}
