//! Simulation core for quantum measurement in a liquid-NMR spin-1/2 qubit.
//!
//! The crate has four layers:
//!
//! - [`algebra`]: exact 2x2 complex linear algebra (operators, pure states,
//!   density matrices, closed-form SU(2) exponentials),
//! - [`nmr`]: the physical model (free and rotating-frame Hamiltonians,
//!   pulse-derived gates, thermal states, magnetization observables),
//! - [`qsd`]: the stochastic engine (complex Wiener increments, the weighted
//!   nonlinear quantum-state-diffusion step, basis-pair trajectory evolution
//!   and density-matrix reconstruction),
//! - [`lindblad`]: a deterministic fixed-step RK4 master-equation integrator
//!   used as the ground-truth oracle for ensemble means.
//!
//! Everything is hard-coded to dimension 2: the system is a single spin-1/2,
//! so the SU(2) exponentials are exact and no external linear-algebra backend
//! is needed.

pub mod algebra;
pub mod constants;
pub mod error;
pub mod lindblad;
pub mod nmr;
pub mod qsd;

pub use algebra::{commutator, matrix_exponential_su2, Complex, DensityMatrix, Operator, PureState};
pub use error::{Error, Result};
pub use lindblad::{integrate_master, lindblad_rhs, MasterEquationProblem};
pub use nmr::{
    apply_gate, free_hamiltonian, gate_from_pulse, magnetization, named_gate,
    rotating_frame_hamiltonian, thermal_state, thermal_state_exact, to_lab_frame, Axis, Frame,
    NamedGate, NmrParameters, PhysicalConstants,
};
pub use qsd::{
    derive_stream_seed, evolve_basis_trajectories, evolve_state_trajectory, qsd_drift, qsd_step,
    reconstruct_density, wiener_increment, ExpectationSource, NoiseConvention, NoiseSharing,
    QsdWeights, TrajectoryRecord, WienerIncrement,
};
