//! Incident-power sweeps with natural continuation and branch bookkeeping.

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::model::{DimerParams, DimerState};

use super::solve::{solve_scattering_seeded, SolverOpts};
use super::{Branch, ScatteringSolution};

/// One connected solution family across the sweep axis.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BranchTrace {
    pub tag: Branch,
    /// (incident power, solution) pairs in grid order; a branch may cover
    /// only part of the axis.
    pub points: Vec<(f64, ScatteringSolution)>,
}

/// Solutions organized by branch over an incident-power grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BranchDiagram {
    pub axis: Vec<f64>,
    pub branches: Vec<BranchTrace>,
    /// Grid points where the solver failed, left as gaps.
    pub failures: Vec<(f64, String)>,
}

impl BranchDiagram {
    /// All solutions at one grid point, across branches.
    pub fn at(&self, pin: f64) -> Vec<&ScatteringSolution> {
        self.branches
            .iter()
            .flat_map(|b| b.points.iter())
            .filter(|(p, _)| *p == pin)
            .map(|(_, s)| s)
            .collect()
    }
}

/// Sweep the incident power over `pin_grid` (ascending) at fixed frequency.
///
/// Each point reruns the multistart solver seeded additionally with the
/// previous point's solutions, then matches the new solutions to branch tips
/// by nearest state-space distance within `opts.match_radius`. Unmatched
/// solutions open new branches; solver failures are recorded as gaps and the
/// sweep continues.
pub fn power_sweep(
    p: &DimerParams,
    omega: f64,
    pin_grid: &[f64],
    opts: &SolverOpts,
) -> BranchDiagram {
    assert!(
        pin_grid.windows(2).all(|w| w[0] <= w[1]),
        "pin grid must be sorted ascending"
    );
    let mut diagram = BranchDiagram {
        axis: pin_grid.to_vec(),
        branches: Vec::new(),
        failures: Vec::new(),
    };
    // Index into diagram.branches of every branch alive at the previous point.
    let mut live: Vec<usize> = Vec::new();
    let mut prev_states: Vec<DimerState> = Vec::new();

    for &pin in pin_grid {
        let incident = pin.max(0.0).sqrt();
        let sols = match solve_scattering_seeded(p, omega, incident, opts, &prev_states) {
            Ok(s) => s,
            Err(e) => {
                if matches!(e, Error::OutsideBand { .. }) {
                    // Global misconfiguration: every point would fail.
                    diagram.failures.push((pin, e.to_string()));
                    return diagram;
                }
                diagram.failures.push((pin, e.to_string()));
                continue;
            }
        };

        // Nearest-neighbor matching between live branch tips and new solutions.
        let mut pairs: Vec<(f64, usize, usize)> = Vec::new(); // (dist, live idx, sol idx)
        for (bi, &branch_idx) in live.iter().enumerate() {
            let tip = &diagram.branches[branch_idx].points.last().unwrap().1;
            for (si, sol) in sols.iter().enumerate() {
                let d = tip.state_distance(sol);
                if d <= opts.match_radius {
                    pairs.push((d, bi, si));
                }
            }
        }
        pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let mut branch_taken = vec![false; live.len()];
        let mut sol_taken = vec![false; sols.len()];
        let mut next_live: Vec<usize> = Vec::new();
        for (_, bi, si) in pairs {
            if branch_taken[bi] || sol_taken[si] {
                continue;
            }
            branch_taken[bi] = true;
            sol_taken[si] = true;
            let branch_idx = live[bi];
            diagram.branches[branch_idx].points.push((pin, sols[si]));
            next_live.push(branch_idx);
        }
        for (si, sol) in sols.iter().enumerate() {
            if !sol_taken[si] {
                diagram.branches.push(BranchTrace {
                    tag: sol.branch,
                    points: vec![(pin, *sol)],
                });
                next_live.push(diagram.branches.len() - 1);
            }
        }
        next_live.sort_unstable();
        live = next_live;
        prev_states = sols.iter().map(|s| s.state()).collect();
    }
    diagram
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scattering::{fano_window_max, solve_scattering};

    fn fig3_params() -> DimerParams {
        DimerParams::new(0.1, 0.01, 1e-4, 0.0, 0.2, 1.0).unwrap()
    }

    fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        (0..n)
            .map(|i| {
                let f = i as f64 / (n - 1) as f64;
                lo * (hi / lo).powf(f)
            })
            .collect()
    }

    #[test]
    fn single_point_grid_matches_solve() {
        let p = fig3_params();
        let opts = SolverOpts::default();
        let pin = 0.3;
        let diagram = power_sweep(&p, 0.1, &[pin], &opts);
        let direct = solve_scattering(&p, 0.1, pin.sqrt(), &opts).unwrap();
        let swept = diagram.at(pin);
        assert_eq!(swept.len(), direct.len());
        for (a, b) in swept.iter().zip(&direct) {
            assert_eq!(a.psi_a, b.psi_a);
        }
    }

    #[test]
    fn eit_everywhere_fano_terminates_at_window_edge() {
        let p = fig3_params();
        let opts = SolverOpts::default();
        let grid = log_grid(0.001, 5.0, 60);
        let diagram = power_sweep(&p, 0.1, &grid, &opts);
        assert!(diagram.failures.is_empty());
        let pmax = fano_window_max(&p);

        for &pin in &grid {
            let here = diagram.at(pin);
            assert!(
                here.iter()
                    .any(|s| s.branch == Branch::EitSymmetric
                        && (s.transmissivity - 1.0).abs() < 1e-9),
                "no EIT solution at pin = {pin}"
            );
            let fano_here = here
                .iter()
                .filter(|s| s.branch == Branch::FanoSymmetric)
                .count();
            if pin <= pmax {
                assert_eq!(fano_here, 2, "pin = {pin}");
                // Fig. 3b: the Fano family pins both intensities at gamma0/gamma2.
                for s in here.iter().filter(|s| s.branch == Branch::FanoSymmetric) {
                    assert!((s.psi_a.norm_sqr() - 100.0).abs() < 1e-8);
                }
            } else {
                assert_eq!(fano_here, 0, "pin = {pin}");
            }
        }
    }

    #[test]
    fn branches_do_not_jump() {
        let p = fig3_params();
        let opts = SolverOpts::default();
        let grid = log_grid(0.01, 4.5, 80);
        let diagram = power_sweep(&p, 0.1, &grid, &opts);
        for branch in &diagram.branches {
            for w in branch.points.windows(2) {
                let d = w[0].1.state_distance(&w[1].1);
                assert!(
                    d <= opts.match_radius,
                    "branch {:?} jumped by {d}",
                    branch.tag
                );
            }
        }
    }
}
