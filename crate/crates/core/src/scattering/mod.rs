//! Stationary scattering of chain waves on the side-coupled dimer.
//!
//! For an incident amplitude `I` (real, nonnegative, the phase gauge used
//! throughout) at an in-band frequency, the junction field obeys
//! psi0 = I + i V (2 C sin k)^-1 (psi_A + psi_B), the reflected and
//! transmitted amplitudes are R = psi0 - I and T = psi0, and the dimer
//! amplitudes solve a pair of complex cubic equations. This module holds the
//! solution type, the dispersion helpers and every closed-form branch; the
//! general Newton engine lives in [`solve`], parameter sweeps in [`sweep`].

mod solve;
mod sweep;

pub use solve::{solve_scattering, SolverOpts};
pub use sweep::{power_sweep, BranchDiagram, BranchTrace};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{DimerParams, DimerState};
use crate::poly::cubic_real_roots;

/// Residual bound enforced on every emitted solution.
pub const SOLUTION_RESIDUAL_TOL: f64 = 1e-11;

/// Which solution family a stationary scattering state belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    /// Symmetric family with perfect transmission (T = I).
    EitSymmetric,
    /// Symmetric family with exact transmission zero at the special intensity.
    FanoSymmetric,
    /// Transmission zero with all excitation on the loss element B.
    UltimateAsymmetricLoss,
    /// Transmission zero with all excitation on the gain element A.
    UltimateAsymmetricGain,
    /// Asymmetric root found numerically (no closed form).
    NumericAsymmetric,
    /// Anything else found numerically.
    NumericOther,
}

impl Branch {
    pub fn label(&self) -> &'static str {
        match self {
            Branch::EitSymmetric => "eit-symmetric",
            Branch::FanoSymmetric => "fano-symmetric",
            Branch::UltimateAsymmetricLoss => "ultimate-asymmetric-loss",
            Branch::UltimateAsymmetricGain => "ultimate-asymmetric-gain",
            Branch::NumericAsymmetric => "numeric-asymmetric",
            Branch::NumericOther => "numeric-other",
        }
    }
}

/// A stationary solution of the driven chain-dimer system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScatteringSolution {
    pub omega: f64,
    /// Wavenumber in (0, pi) solving omega = 2 C cos k.
    pub wavenumber: f64,
    /// Incident amplitude, real and nonnegative by gauge choice.
    pub incident: f64,
    /// Incident power I^2.
    pub pin: f64,
    pub psi_a: Complex64,
    pub psi_b: Complex64,
    /// Chain field at the coupling site (equals the transmitted amplitude).
    pub psi0: Complex64,
    pub reflected: Complex64,
    pub transmitted: Complex64,
    /// |T/I|^2; exceeds 1 in amplified regimes.
    pub transmissivity: f64,
    /// |R/I|^2.
    pub reflectivity: f64,
    pub branch: Branch,
}

impl ScatteringSolution {
    /// Assemble a solution from dimer amplitudes, closing the chain fields.
    /// Fails if the residual of the stationary system exceeds
    /// [`SOLUTION_RESIDUAL_TOL`] (relative to the state size).
    pub fn from_state(
        p: &DimerParams,
        omega: f64,
        incident: f64,
        state: &DimerState,
        branch: Branch,
    ) -> Result<Self> {
        let residual = scattering_residual(p, omega, incident, state)?;
        let scale = state.norm().max(1.0);
        if !(residual.max_abs / scale < SOLUTION_RESIDUAL_TOL) {
            return Err(Error::NoConvergence {
                attempts: 1,
                best_residual: residual.max_abs,
            });
        }
        let k = wavenumber(p, omega)?;
        let (psi0, reflected, transmitted) = close_field(p, omega, incident, state)?;
        let (transmissivity, reflectivity) = if incident > 0.0 {
            (
                transmitted.norm_sqr() / (incident * incident),
                reflected.norm_sqr() / (incident * incident),
            )
        } else {
            // Zero drive: the EIT family limit has T = I identically, every
            // other family limits to a dark state.
            (if branch == Branch::EitSymmetric { 1.0 } else { 0.0 }, 0.0)
        };
        Ok(Self {
            omega,
            wavenumber: k,
            incident,
            pin: incident * incident,
            psi_a: state.psi_a,
            psi_b: state.psi_b,
            psi0,
            reflected,
            transmitted,
            transmissivity,
            reflectivity,
            branch,
        })
    }

    pub fn state(&self) -> DimerState {
        DimerState::new(self.psi_a, self.psi_b)
    }

    /// Euclidean distance between the dimer states of two solutions.
    pub fn state_distance(&self, other: &Self) -> f64 {
        ((self.psi_a - other.psi_a).norm_sqr() + (self.psi_b - other.psi_b).norm_sqr()).sqrt()
    }
}

/// Wavenumber k in (0, pi) with omega = 2 C cos k.
pub fn wavenumber(p: &DimerParams, omega: f64) -> Result<f64> {
    let edge = p.band_edge();
    if omega.abs() >= edge {
        return Err(Error::OutsideBand {
            omega,
            band_edge: edge,
        });
    }
    Ok((omega / edge).acos())
}

/// Radiative coupling Lambda = V^2 / (2 C sin k).
fn radiative_coupling(p: &DimerParams, k: f64) -> f64 {
    p.coupling * p.coupling / (2.0 * p.hopping * k.sin())
}

/// Close the chain fields for given dimer amplitudes:
/// psi0 = I + i V (2 C sin k)^-1 (psi_A + psi_B), R = psi0 - I, T = psi0.
pub fn close_field(
    p: &DimerParams,
    omega: f64,
    incident: f64,
    state: &DimerState,
) -> Result<(Complex64, Complex64, Complex64)> {
    let k = wavenumber(p, omega)?;
    let i = Complex64::new(0.0, 1.0);
    let psi0 = incident
        + i * p.coupling / (2.0 * p.hopping * k.sin()) * (state.psi_a + state.psi_b);
    Ok((psi0, psi0 - incident, psi0))
}

/// Residual of the stationary scattering system in the dimer amplitudes:
///
/// res_A = (E - omega) psi_A + i Lambda (psi_A + psi_B)
///         + i (gamma0 - gamma2 |psi_A|^2) psi_A + chi |psi_A|^2 psi_A + V I
///
/// and res_B with the conjugate sign on the gain/loss term. The Kerr term
/// generalizes the chi = 0 system the closed-form branches assume.
pub fn scattering_residual(
    p: &DimerParams,
    omega: f64,
    incident: f64,
    state: &DimerState,
) -> Result<crate::model::Residual2> {
    let k = wavenumber(p, omega)?;
    let i = Complex64::new(0.0, 1.0);
    let lambda = radiative_coupling(p, k);
    let shared = i * lambda * (state.psi_a + state.psi_b) + p.coupling * incident;
    let ia = state.psi_a.norm_sqr();
    let ib = state.psi_b.norm_sqr();
    let res_a = (Complex64::new(p.freq_shift - omega + p.kerr * ia, 0.0)
        + i * (p.linear_gain - p.nonlinear_loss * ia))
        * state.psi_a
        + shared;
    let res_b = (Complex64::new(p.freq_shift - omega + p.kerr * ib, 0.0)
        - i * (p.linear_gain - p.nonlinear_loss * ib))
        * state.psi_b
        + shared;
    Ok(crate::model::Residual2::new(res_a, res_b))
}

/// Exact linear transmissivity/reflectivity over a frequency grid
/// (requires gamma2 = chi = 0).
///
/// Closed form: t = (d^2 + g0^2)^2 / [(d^2 + g0^2)^2 + 4 Lambda^2 d^2] with
/// d = E - omega, reduced to t = d^2 / (d^2 + 4 Lambda^2) when g0 = 0 so the
/// resonant point stays well-defined. Derived by splitting the 2x2 system
/// into sum/difference amplitudes; cross-checked against a direct numeric
/// solve in the tests.
pub fn linear_spectrum(
    p: &DimerParams,
    omegas: &[f64],
) -> Result<Vec<(f64, f64, f64)>> {
    if p.nonlinear_loss != 0.0 || p.kerr != 0.0 {
        return Err(Error::NotLinear {
            gamma2: p.nonlinear_loss,
            chi: p.kerr,
        });
    }
    omegas
        .iter()
        .map(|&omega| {
            let k = wavenumber(p, omega)?;
            let lambda = radiative_coupling(p, k);
            let d = p.freq_shift - omega;
            let g0 = p.linear_gain;
            let t = if g0 == 0.0 {
                d * d / (d * d + 4.0 * lambda * lambda)
            } else {
                let lorentz = d * d + g0 * g0;
                lorentz * lorentz / (lorentz * lorentz + 4.0 * lambda * lambda * d * d)
            };
            // T/I = (d^2 + g0^2) / (d^2 + g0^2 + 2 i Lambda d), R = T - I.
            let denom = Complex64::new(d * d + g0 * g0, 2.0 * lambda * d);
            let t_over_i = Complex64::new(d * d + g0 * g0, 0.0) / denom;
            let r = (t_over_i - 1.0).norm_sqr();
            Ok((omega, t, r))
        })
        .collect()
}

/// Direct numeric solve of the linear 2x2 system, the cross-check route for
/// [`linear_spectrum`]. Fails near the resonant singular point of the
/// gamma0 = 0 system where the matrix loses rank.
pub fn linear_solve_direct(
    p: &DimerParams,
    omega: f64,
    incident: f64,
) -> Result<ScatteringSolution> {
    if p.nonlinear_loss != 0.0 || p.kerr != 0.0 {
        return Err(Error::NotLinear {
            gamma2: p.nonlinear_loss,
            chi: p.kerr,
        });
    }
    let k = wavenumber(p, omega)?;
    let i = Complex64::new(0.0, 1.0);
    let lambda = radiative_coupling(p, k);
    let d = Complex64::new(p.freq_shift - omega, 0.0);
    // [d + iL + ig0, iL; iL, d + iL - ig0] psi = -V I (1, 1)
    let a11 = d + i * lambda + i * p.linear_gain;
    let a12 = i * lambda;
    let a21 = i * lambda;
    let a22 = d + i * lambda - i * p.linear_gain;
    let det = a11 * a22 - a12 * a21;
    if det.norm() < 1e-14 {
        return Err(Error::NoConvergence {
            attempts: 1,
            best_residual: f64::INFINITY,
        });
    }
    let rhs = Complex64::new(-p.coupling * incident, 0.0);
    let psi_a = (rhs * a22 - a12 * rhs) / det;
    let psi_b = (a11 * rhs - rhs * a21) / det;
    ScatteringSolution::from_state(
        p,
        omega,
        incident,
        &DimerState::new(psi_a, psi_b),
        Branch::EitSymmetric,
    )
    .map(|mut s| {
        s.branch = classify_branch(p, &s);
        s
    })
}

/// Intensity of the special symmetric family, gamma0/gamma2.
fn special_intensity(p: &DimerParams) -> f64 {
    p.linear_gain / p.nonlinear_loss
}

/// The perfectly transmitting symmetric branch at omega = E.
///
/// States psi_A = i phi, psi_B = -i phi where phi runs over the real roots of
/// gamma2 phi^3 - gamma0 phi + V I = 0; each has T = I exactly. Roots with
/// phi^2 = gamma0/gamma2 belong to the Fano family and are excluded.
/// Panics if called with chi != 0 or gamma2 <= 0 or E outside the band.
pub fn eit_branch(p: &DimerParams, incident: f64) -> Vec<ScatteringSolution> {
    assert!(p.kerr == 0.0, "EIT branch requires chi = 0");
    assert!(p.nonlinear_loss > 0.0, "EIT branch requires gamma2 > 0");
    let omega = p.freq_shift;
    let i = Complex64::new(0.0, 1.0);
    let special = special_intensity(p);
    cubic_real_roots(
        p.nonlinear_loss,
        0.0,
        -p.linear_gain,
        p.coupling * incident,
    )
    .into_iter()
    .filter(|phi| (phi * phi - special).abs() > 1e-9 * special.max(1.0))
    .map(|phi| {
        let state = DimerState::new(i * phi, -i * phi);
        ScatteringSolution::from_state(p, omega, incident, &state, Branch::EitSymmetric)
            .expect("EIT cubic root must satisfy the stationary system")
    })
    .collect()
}

/// Incident power above which the EIT cubic keeps a single real root
/// (tristability below): (4/27) gamma0^3 / (V^2 gamma2).
pub fn tristability_threshold(p: &DimerParams) -> f64 {
    (4.0 / 27.0) * p.linear_gain.powi(3) / (p.coupling * p.coupling * p.nonlinear_loss)
}

/// Largest incident power carrying the symmetric transmission-zero family:
/// 4 V^2 (gamma0/gamma2) / (4C^2 - E^2).
pub fn fano_window_max(p: &DimerParams) -> f64 {
    4.0 * p.coupling * p.coupling * special_intensity(p)
        / (p.band_edge().powi(2) - p.freq_shift * p.freq_shift)
}

/// The symmetric transmission-zero family at omega = E and incident power
/// `pin`: psi_{A,B} = i sqrt(gamma0/gamma2) e^{+-i delta} with
/// cos delta = (2V)^-1 sqrt((4C^2 - E^2)(gamma2/gamma0) pin).
///
/// Returns the +delta and -delta members (a single doubled member at the
/// window edge where delta = 0), or nothing outside the window.
pub fn fano_family(p: &DimerParams, pin: f64) -> Vec<ScatteringSolution> {
    assert!(p.kerr == 0.0, "Fano family requires chi = 0");
    assert!(
        p.linear_gain > 0.0 && p.nonlinear_loss > 0.0,
        "Fano family requires gamma0 > 0 and gamma2 > 0"
    );
    let omega = p.freq_shift;
    let amp = special_intensity(p).sqrt();
    let cos_delta = (p.band_edge().powi(2) - p.freq_shift * p.freq_shift)
        .sqrt()
        * (p.nonlinear_loss / p.linear_gain * pin).sqrt()
        / (2.0 * p.coupling);
    if cos_delta > 1.0 + 1e-12 {
        return Vec::new();
    }
    let delta = cos_delta.min(1.0).acos();
    let incident = pin.sqrt();
    let i = Complex64::new(0.0, 1.0);
    let deltas: Vec<f64> = if delta == 0.0 { vec![0.0] } else { vec![delta, -delta] };
    deltas
        .into_iter()
        .map(|d| {
            let state = DimerState::new(
                i * Complex64::from_polar(amp, d),
                i * Complex64::from_polar(amp, -d),
            );
            ScatteringSolution::from_state(p, omega, incident, &state, Branch::FanoSymmetric)
                .expect("Fano-family member must satisfy the stationary system")
        })
        .collect()
}

/// The two transmission-zero states with one element exactly dark, and the
/// single incident power V^2 (gamma0/gamma2) / (4C^2 - E^2) at which they exist.
///
/// In the real-incident gauge the excited element carries i sqrt(gamma0/gamma2).
pub fn ultimate_asymmetric(p: &DimerParams) -> (f64, Vec<ScatteringSolution>) {
    assert!(p.kerr == 0.0, "ultimate states require chi = 0");
    assert!(
        p.linear_gain > 0.0 && p.nonlinear_loss > 0.0,
        "ultimate states require gamma0 > 0 and gamma2 > 0"
    );
    let pin_star = fano_window_max(p) / 4.0;
    let incident = pin_star.sqrt();
    let omega = p.freq_shift;
    let excited = Complex64::new(0.0, special_intensity(p).sqrt());
    let zero = Complex64::new(0.0, 0.0);
    let solutions = vec![
        ScatteringSolution::from_state(
            p,
            omega,
            incident,
            &DimerState::new(excited, zero),
            Branch::UltimateAsymmetricGain,
        )
        .expect("gain-side ultimate state must satisfy the stationary system"),
        ScatteringSolution::from_state(
            p,
            omega,
            incident,
            &DimerState::new(zero, excited),
            Branch::UltimateAsymmetricLoss,
        )
        .expect("loss-side ultimate state must satisfy the stationary system"),
    ];
    (pin_star, solutions)
}

/// Heuristic branch tag for a numerically found solution, matching the
/// closed-form families where they apply.
pub fn classify_branch(p: &DimerParams, sol: &ScatteringSolution) -> Branch {
    let norm_a = sol.psi_a.norm();
    let norm_b = sol.psi_b.norm();
    let scale = norm_a.max(norm_b).max(1e-12);
    let symmetric = (norm_a - norm_b).abs() <= 1e-6 * scale;
    let at_resonance = (sol.omega - p.freq_shift).abs() <= 1e-9;
    let closed_forms_apply = p.kerr == 0.0 && p.nonlinear_loss > 0.0 && at_resonance;

    if closed_forms_apply {
        let special = special_intensity(p);
        if symmetric {
            if (sol.psi_a + sol.psi_b).norm() <= 1e-6 * scale {
                return Branch::EitSymmetric;
            }
            if special > 0.0
                && (sol.psi_a.norm_sqr() - special).abs() <= 1e-6 * special
                && sol.transmitted.norm() <= 1e-6 * sol.incident.max(1e-12)
            {
                return Branch::FanoSymmetric;
            }
        } else if special > 0.0 {
            let spec_amp = special.sqrt();
            if norm_b <= 1e-6 * spec_amp && (norm_a - spec_amp).abs() <= 1e-6 * spec_amp {
                return Branch::UltimateAsymmetricGain;
            }
            if norm_a <= 1e-6 * spec_amp && (norm_b - spec_amp).abs() <= 1e-6 * spec_amp {
                return Branch::UltimateAsymmetricLoss;
            }
        }
    }
    if symmetric {
        Branch::NumericOther
    } else {
        Branch::NumericAsymmetric
    }
}
