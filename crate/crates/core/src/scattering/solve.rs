//! Damped-Newton multistart solver for the stationary scattering system.
//!
//! Four real unknowns (the dimer amplitudes), analytic Jacobian, step
//! halving on residual growth. Starts come from the closed-form branches
//! when they apply, a linearized proxy, a seeded random ball, and symmetry
//! images of roots already found; converged roots are deduplicated in the
//! real-incident gauge so the output is a canonical, seed-stable list.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{DimerParams, DimerState};
use crate::rng::SplitMix64;

use super::{
    classify_branch, eit_branch, fano_family, ultimate_asymmetric,
    wavenumber, Branch, ScatteringSolution,
};

#[derive(Debug, Clone)]
pub struct SolverOpts {
    /// Seed of the multistart sampler (`PT_FANO_SEED` overrides in the CLI).
    pub seed: u64,
    /// Number of random starts on top of the structured seeds.
    pub n_starts: usize,
    pub max_iter: usize,
    /// Convergence bound on the residual relative to max(1, |state|).
    pub residual_tol: f64,
    /// Distance below which two converged roots count as the same solution.
    pub dedup_tol: f64,
    /// Largest state-space step allowed between consecutive sweep points of
    /// one branch (continuation matching bound).
    pub match_radius: f64,
}

impl Default for SolverOpts {
    fn default() -> Self {
        Self {
            seed: 0,
            n_starts: 64,
            max_iter: 100,
            residual_tol: 1e-12,
            dedup_tol: 1e-6,
            match_radius: 1.0,
        }
    }
}

const MAX_HALVINGS: usize = 40;
const MIN_STEP: f64 = 1e-14;

struct System {
    detuning: f64, // E - omega
    lambda: f64,   // V^2 / (2 C sin k)
    gain: f64,
    loss2: f64,
    kerr: f64,
    drive: f64, // V I
}

impl System {
    fn new(p: &DimerParams, omega: f64, incident: f64) -> Result<Self> {
        let k = wavenumber(p, omega)?;
        Ok(Self {
            detuning: p.freq_shift - omega,
            lambda: p.coupling * p.coupling / (2.0 * p.hopping * k.sin()),
            gain: p.linear_gain,
            loss2: p.nonlinear_loss,
            kerr: p.kerr,
            drive: p.coupling * incident,
        })
    }

    fn residual(&self, s: &DimerState) -> (Complex64, Complex64) {
        let i = Complex64::new(0.0, 1.0);
        let shared = i * self.lambda * (s.psi_a + s.psi_b) + self.drive;
        let ia = s.psi_a.norm_sqr();
        let ib = s.psi_b.norm_sqr();
        let fa = (Complex64::new(self.detuning + self.kerr * ia, 0.0)
            + i * (self.gain - self.loss2 * ia))
            * s.psi_a
            + shared;
        let fb = (Complex64::new(self.detuning + self.kerr * ib, 0.0)
            - i * (self.gain - self.loss2 * ib))
            * s.psi_b
            + shared;
        (fa, fb)
    }

    fn residual_norm(&self, s: &DimerState) -> f64 {
        let (fa, fb) = self.residual(s);
        (fa.norm_sqr() + fb.norm_sqr()).sqrt()
    }

    /// Real 4x4 Jacobian in the unknowns (Re A, Im A, Re B, Im B), built from
    /// the Wirtinger derivatives of the two complex residual components.
    fn jacobian(&self, s: &DimerState) -> [[f64; 4]; 4] {
        let i = Complex64::new(0.0, 1.0);
        let il = i * self.lambda;
        let ia = s.psi_a.norm_sqr();
        let ib = s.psi_b.norm_sqr();
        let ca = Complex64::new(self.kerr, -self.loss2);
        let cb = Complex64::new(self.kerr, self.loss2);

        // dF_A/dA, dF_A/dconj(A); the cross terms are the shared i Lambda.
        let fa_a = Complex64::new(self.detuning, self.gain) + il + 2.0 * ca * ia;
        let fa_abar = ca * s.psi_a * s.psi_a;
        let fb_b = Complex64::new(self.detuning, -self.gain) + il + 2.0 * cb * ib;
        let fb_bbar = cb * s.psi_b * s.psi_b;

        let col = |dz: Complex64, dzbar: Complex64, re_dir: bool| -> Complex64 {
            if re_dir {
                dz + dzbar
            } else {
                i * (dz - dzbar)
            }
        };

        let mut j = [[0.0; 4]; 4];
        for (c, (dz, dzbar, re_dir)) in [
            (fa_a, fa_abar, true),
            (fa_a, fa_abar, false),
            (il, Complex64::new(0.0, 0.0), true),
            (il, Complex64::new(0.0, 0.0), false),
        ]
        .into_iter()
        .enumerate()
        {
            let d = col(dz, dzbar, re_dir);
            j[0][c] = d.re;
            j[1][c] = d.im;
        }
        for (c, (dz, dzbar, re_dir)) in [
            (il, Complex64::new(0.0, 0.0), true),
            (il, Complex64::new(0.0, 0.0), false),
            (fb_b, fb_bbar, true),
            (fb_b, fb_bbar, false),
        ]
        .into_iter()
        .enumerate()
        {
            let d = col(dz, dzbar, re_dir);
            j[2][c] = d.re;
            j[3][c] = d.im;
        }
        j
    }
}

/// Gaussian elimination with partial pivoting; None on a singular matrix.
fn solve4(mut a: [[f64; 4]; 4], mut b: [f64; 4]) -> Option<[f64; 4]> {
    for col in 0..4 {
        let pivot = (col..4).max_by(|&i, &j| {
            a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap()
        })?;
        if a[pivot][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in (col + 1)..4 {
            let f = a[row][col] / a[col][col];
            for c in col..4 {
                a[row][c] -= f * a[col][c];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; 4];
    for row in (0..4).rev() {
        let mut acc = b[row];
        for c in (row + 1)..4 {
            acc -= a[row][c] * x[c];
        }
        x[row] = acc / a[row][row];
    }
    Some(x)
}

/// Damped Newton from one start. Returns the converged state, or None.
fn newton(sys: &System, start: DimerState, opts: &SolverOpts) -> Option<DimerState> {
    let mut s = start;
    if !s.is_finite() {
        return None;
    }
    for _ in 0..opts.max_iter {
        let (fa, fb) = sys.residual(&s);
        let norm = (fa.norm_sqr() + fb.norm_sqr()).sqrt();
        let scale = s.norm().max(1.0);
        if norm <= opts.residual_tol * scale {
            return polish(sys, s, opts);
        }
        let j = sys.jacobian(&s);
        let step = solve4(j, [-fa.re, -fa.im, -fb.re, -fb.im])?;
        let full = DimerState::new(
            Complex64::new(step[0], step[1]),
            Complex64::new(step[2], step[3]),
        );
        let mut factor = 1.0;
        let mut accepted = false;
        for _ in 0..=MAX_HALVINGS {
            let trial = DimerState::new(
                s.psi_a + factor * full.psi_a,
                s.psi_b + factor * full.psi_b,
            );
            if trial.is_finite() && sys.residual_norm(&trial) < norm {
                s = trial;
                accepted = true;
                break;
            }
            factor *= 0.5;
            if factor * full.norm() < MIN_STEP {
                break;
            }
        }
        if !accepted {
            // Stagnated: accept only if already at the root.
            return if norm <= opts.residual_tol * scale {
                polish(sys, s, opts)
            } else {
                None
            };
        }
    }
    let scale = s.norm().max(1.0);
    if sys.residual_norm(&s) <= opts.residual_tol * scale {
        polish(sys, s, opts)
    } else {
        None
    }
}

/// Two undamped Newton steps push accepted roots to machine accuracy, which
/// keeps deduplication stable across different discovery paths.
fn polish(sys: &System, mut s: DimerState, _opts: &SolverOpts) -> Option<DimerState> {
    for _ in 0..2 {
        let (fa, fb) = sys.residual(&s);
        let Some(step) = solve4(sys.jacobian(&s), [-fa.re, -fa.im, -fb.re, -fb.im]) else {
            break;
        };
        let trial = DimerState::new(
            s.psi_a + Complex64::new(step[0], step[1]),
            s.psi_b + Complex64::new(step[2], step[3]),
        );
        if trial.is_finite() && sys.residual_norm(&trial) <= sys.residual_norm(&s) {
            s = trial;
        } else {
            break;
        }
    }
    Some(s)
}

fn closed_form_seeds(p: &DimerParams, omega: f64, incident: f64) -> Vec<DimerState> {
    let mut seeds = vec![DimerState::zero()];
    let at_resonance = (omega - p.freq_shift).abs() <= 1e-9;
    if p.kerr == 0.0 && p.nonlinear_loss > 0.0 && at_resonance {
        for s in eit_branch(p, incident) {
            seeds.push(s.state());
        }
        if p.linear_gain > 0.0 {
            for s in fano_family(p, incident * incident) {
                seeds.push(s.state());
            }
            // Ultimate states exist at one power only, but seeding them pulls
            // Newton onto the neighboring asymmetric branches at other powers.
            let (_, ultimates) = ultimate_asymmetric(p);
            for s in ultimates {
                seeds.push(s.state());
            }
        }
    }
    // Linearized proxy (nonlinear terms dropped).
    if let Ok(k) = wavenumber(p, omega) {
        let i = Complex64::new(0.0, 1.0);
        let lambda = p.coupling * p.coupling / (2.0 * p.hopping * k.sin());
        let d = Complex64::new(p.freq_shift - omega, 0.0);
        let a11 = d + i * lambda + i * p.linear_gain;
        let a22 = d + i * lambda - i * p.linear_gain;
        let a12 = i * lambda;
        let det = a11 * a22 - a12 * a12;
        if det.norm() > 1e-12 {
            let rhs = Complex64::new(-p.coupling * incident, 0.0);
            seeds.push(DimerState::new(
                (rhs * a22 - a12 * rhs) / det,
                (a11 * rhs - rhs * a12) / det,
            ));
        }
    }
    seeds
}

fn random_seeds(p: &DimerParams, opts: &SolverOpts) -> Vec<DimerState> {
    let special = if p.nonlinear_loss > 0.0 {
        p.linear_gain / p.nonlinear_loss
    } else {
        1.0
    };
    let radius = 2.0 * special.max(1.0).sqrt();
    let mut rng = SplitMix64::new(opts.seed);
    let draw = |rng: &mut SplitMix64| {
        let r = radius * rng.next_f64().sqrt();
        let theta = 2.0 * std::f64::consts::PI * rng.next_f64();
        Complex64::from_polar(r, theta)
    };
    (0..opts.n_starts)
        .map(|_| {
            let a = draw(&mut rng);
            let b = draw(&mut rng);
            DimerState::new(a, b)
        })
        .collect()
}

fn symmetry_images(s: &DimerState) -> [DimerState; 3] {
    [
        DimerState::new(s.psi_b, s.psi_a),
        DimerState::new(-s.psi_a, -s.psi_b),
        DimerState::new(-s.psi_b, -s.psi_a),
    ]
}

fn push_root(roots: &mut Vec<DimerState>, candidate: DimerState, tol: f64) -> bool {
    let dup = roots.iter().any(|r| {
        ((r.psi_a - candidate.psi_a).norm_sqr() + (r.psi_b - candidate.psi_b).norm_sqr()).sqrt()
            < tol
    });
    if !dup {
        roots.push(candidate);
    }
    !dup
}

/// All stationary scattering solutions at (omega, incident) the multistart
/// finds, deduplicated and sorted by transmissivity. The incident amplitude
/// must be nonnegative (real-incident gauge).
pub fn solve_scattering(
    p: &DimerParams,
    omega: f64,
    incident: f64,
    opts: &SolverOpts,
) -> Result<Vec<ScatteringSolution>> {
    solve_scattering_seeded(p, omega, incident, opts, &[])
}

/// Same as [`solve_scattering`] with extra starting states (used by the
/// power sweep to continue branches from the previous grid point).
pub(crate) fn solve_scattering_seeded(
    p: &DimerParams,
    omega: f64,
    incident: f64,
    opts: &SolverOpts,
    extra_seeds: &[DimerState],
) -> Result<Vec<ScatteringSolution>> {
    assert!(incident >= 0.0, "incident amplitude must be nonnegative");
    let sys = System::new(p, omega, incident)?;

    let mut starts = closed_form_seeds(p, omega, incident);
    starts.extend_from_slice(extra_seeds);
    starts.extend(random_seeds(p, opts));

    let mut roots: Vec<DimerState> = Vec::new();
    let mut attempts = 0usize;
    let mut best_residual = f64::INFINITY;
    for start in &starts {
        attempts += 1;
        match newton(&sys, *start, opts) {
            Some(root) => {
                if push_root(&mut roots, root, opts.dedup_tol) {
                    // Symmetry images of a fresh root often sit on other
                    // branches; chase them immediately.
                    for image in symmetry_images(&root) {
                        if let Some(extra) = newton(&sys, image, opts) {
                            push_root(&mut roots, extra, opts.dedup_tol);
                        }
                    }
                }
            }
            None => {
                best_residual = best_residual.min(sys.residual_norm(start));
            }
        }
    }
    if roots.is_empty() {
        return Err(Error::NoConvergence {
            attempts,
            best_residual,
        });
    }

    // Canonical order before dedup so near-threshold pairs resolve the same
    // way no matter which start found them first.
    roots.sort_by(|a, b| {
        (a.psi_a.re, a.psi_a.im, a.psi_b.re, a.psi_b.im)
            .partial_cmp(&(b.psi_a.re, b.psi_a.im, b.psi_b.re, b.psi_b.im))
            .unwrap()
    });
    let mut unique: Vec<DimerState> = Vec::new();
    for r in roots {
        push_root(&mut unique, r, opts.dedup_tol);
    }

    let mut solutions: Vec<ScatteringSolution> = unique
        .into_iter()
        .filter_map(|s| {
            ScatteringSolution::from_state(p, omega, incident, &s, Branch::NumericOther)
                .ok()
                .map(|mut sol| {
                    sol.branch = classify_branch(p, &sol);
                    sol
                })
        })
        .collect();
    solutions.sort_by(|a, b| {
        (a.transmissivity, a.psi_a.re, a.psi_a.im, a.psi_b.re)
            .partial_cmp(&(b.transmissivity, b.psi_a.re, b.psi_a.im, b.psi_b.re))
            .unwrap()
    });
    Ok(solutions)
}
