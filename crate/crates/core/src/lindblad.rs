//! Deterministic master-equation integrator used as the ground-truth oracle
//! for QSD ensemble means and analytic decay checks.
//!
//! The right-hand side is
//!
//! ```text
//! drho/dt = -(i/hbar)[H, rho] + sum_j (Lj rho Lj† - 1/2 Lj†Lj rho - 1/2 rho Lj†Lj)
//! ```
//!
//! integrated with fixed-step classical RK4. The Lindblad operators carry an
//! implicit unit rate, so oracle time is measured in inverse-rate units.

use crate::algebra::{DensityMatrix, Operator};
use crate::constants::HBAR;
use crate::error::{Error, Result};

/// Trace drift beyond this aborts the integration as unstable.
pub const TRACE_DRIFT_LIMIT: f64 = 1e-6;

/// A fixed-grid master-equation integration task.
#[derive(Clone, Debug)]
pub struct MasterEquationProblem {
    pub h: Operator,
    pub lindblads: Vec<Operator>,
    pub rho0: DensityMatrix,
    pub duration: f64,
    pub steps: usize,
}

impl MasterEquationProblem {
    pub fn new(
        h: Operator,
        lindblads: Vec<Operator>,
        rho0: DensityMatrix,
        duration: f64,
        steps: usize,
    ) -> Result<Self> {
        if !(duration > 0.0 && duration.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "duration",
                message: format!("must be positive and finite, got {duration}"),
            });
        }
        if steps < 1 {
            return Err(Error::InvalidParameter {
                name: "steps",
                message: "must be at least 1".into(),
            });
        }
        let trace = rho0.trace();
        if (trace.re - 1.0).abs() > 1e-9 || trace.im.abs() > 1e-9 {
            return Err(Error::InvalidParameter {
                name: "rho0",
                message: format!("initial state must have unit trace, got {trace}"),
            });
        }
        Ok(Self {
            h,
            lindblads,
            rho0,
            duration,
            steps,
        })
    }

    pub fn dt(&self) -> f64 {
        self.duration / self.steps as f64
    }
}

fn rhs_operator(rho: &Operator, h: &Operator, lindblads: &[Operator]) -> Operator {
    let commutator = *h * *rho - *rho * *h;
    let mut out = commutator.scale_complex(crate::algebra::Complex::new(0.0, -1.0 / HBAR));
    for l in lindblads {
        let ldag = l.dagger();
        let ldl = ldag * *l;
        out = out + *l * *rho * ldag - (ldl * *rho + *rho * ldl).scale(0.5);
    }
    out
}

/// Time derivative of `rho` under Hamiltonian `h` and a single Lindblad
/// operator `l`. The result is Hermitian and traceless.
pub fn lindblad_rhs(rho: &DensityMatrix, h: &Operator, l: &Operator) -> Operator {
    rhs_operator(&rho.as_operator(), h, std::slice::from_ref(l))
}

/// Fixed-step RK4 integration of the master equation, returning the state at
/// every grid point (`steps + 1` entries).
///
/// Round-off is folded back into the Hermitian part after each step; a trace
/// drift beyond [`TRACE_DRIFT_LIMIT`] aborts with an error, signalling that
/// the step size is too large for the problem.
pub fn integrate_master(problem: &MasterEquationProblem) -> Result<Vec<DensityMatrix>> {
    let dt = problem.dt();
    let trace0 = problem.rho0.trace().re;

    let mut rho = problem.rho0.as_operator();
    let mut out = Vec::with_capacity(problem.steps + 1);
    out.push(problem.rho0);

    for _ in 0..problem.steps {
        let k1 = rhs_operator(&rho, &problem.h, &problem.lindblads);
        let k2 = rhs_operator(&(rho + k1.scale(0.5 * dt)), &problem.h, &problem.lindblads);
        let k3 = rhs_operator(&(rho + k2.scale(0.5 * dt)), &problem.h, &problem.lindblads);
        let k4 = rhs_operator(&(rho + k3.scale(dt)), &problem.h, &problem.lindblads);
        rho = rho + (k1 + k2.scale(2.0) + k3.scale(2.0) + k4).scale(dt / 6.0);
        rho = rho.hermitian_part();

        let drift = (rho.trace().re - trace0).abs();
        if !drift.is_finite() || drift > TRACE_DRIFT_LIMIT {
            return Err(Error::TraceDrift {
                drift,
                limit: TRACE_DRIFT_LIMIT,
            });
        }
        out.push(
            DensityMatrix::new(rho.entries()).expect("hermitian part is Hermitian by construction"),
        );
    }
    Ok(out)
}
