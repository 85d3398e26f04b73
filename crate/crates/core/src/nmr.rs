//! Physical model of the liquid-NMR qubit: constants, Hamiltonians, frames,
//! pulse-derived gates, thermal and post-gate states, magnetization.
//!
//! Sign convention: the free Hamiltonian is `H0 = -hbar*omega0*Iz`, so the
//! basis state `|0> = (1,0)^T` sits at energy `-hbar*omega0/2`. The paper's
//! prose prints the opposite sign for `H0` but its stated ground-state energy
//! and its numerical setup both use this one.

use crate::algebra::{matrix_exponential_su2, Complex, DensityMatrix, Operator};
use crate::constants::{HBAR, K_BOLTZMANN};
use crate::error::{Error, Result};

/// Largest allowed `hbar*omega0 / (kB*T)` for the first-order thermal-state
/// expansion to be valid.
pub const HIGH_TEMPERATURE_LIMIT: f64 = 1e-2;

/// Tolerance for unitarity of gates fed into `apply_gate`.
const GATE_UNITARITY_TOL: f64 = 1e-9;

/// CODATA values of the constants entering the thermal state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhysicalConstants {
    /// Reduced Planck constant, J·s.
    pub hbar: f64,
    /// Boltzmann constant, J/K.
    pub k_boltzmann: f64,
}

impl PhysicalConstants {
    pub fn codata() -> Self {
        Self {
            hbar: HBAR,
            k_boltzmann: K_BOLTZMANN,
        }
    }
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::codata()
    }
}

/// Validated physical parameters of the spin system.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NmrParameters {
    omega0: f64,
    temperature: f64,
    omega1: f64,
    phi: f64,
}

impl NmrParameters {
    /// `omega0`: Larmor angular frequency (rad/s), `temperature` (K),
    /// `omega1`: rf Rabi frequency for gate synthesis (rad/s), `phi`: rf
    /// phase (rad).
    ///
    /// Enforces positivity and the high-temperature condition
    /// `hbar*omega0 << kB*T` required by the thermal-state expansion.
    pub fn new(omega0: f64, temperature: f64, omega1: f64, phi: f64) -> Result<Self> {
        if !(omega0 > 0.0 && omega0.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "omega0",
                message: format!("must be positive and finite, got {omega0}"),
            });
        }
        if !(temperature > 0.0 && temperature.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "temperature",
                message: format!("must be positive and finite, got {temperature}"),
            });
        }
        if !(omega1.is_finite() && phi.is_finite()) {
            return Err(Error::NonFinite {
                context: "rf pulse parameters",
            });
        }
        let ratio = HBAR * omega0 / (K_BOLTZMANN * temperature);
        if ratio >= HIGH_TEMPERATURE_LIMIT {
            return Err(Error::HighTemperature {
                ratio,
                limit: HIGH_TEMPERATURE_LIMIT,
            });
        }
        Ok(Self {
            omega0,
            temperature,
            omega1,
            phi,
        })
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    pub fn temperature(&self) -> f64 {
        self.temperature
    }

    pub fn omega1(&self) -> f64 {
        self.omega1
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    /// `hbar*omega0 / (kB*T)`, the small expansion parameter of the thermal
    /// state.
    pub fn thermal_polarization(&self) -> f64 {
        HBAR * self.omega0 / (K_BOLTZMANN * self.temperature)
    }
}

/// Reference frame for the evolution Hamiltonian.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Frame {
    Laboratory,
    Rotating,
}

/// Measurement axis for the magnetization observable.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub fn spin_operator(&self) -> Operator {
        match self {
            Axis::X => Operator::spin_x(),
            Axis::Y => Operator::spin_y(),
            Axis::Z => Operator::spin_z(),
        }
    }
}

/// The three single-qubit gates used by the experiments.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NamedGate {
    X,
    Y,
    Z,
}

/// Free Hamiltonian `H0 = -hbar*omega0*Iz` (joules).
pub fn free_hamiltonian(p: &NmrParameters) -> Operator {
    Operator::spin_z().scale(-HBAR * p.omega0)
}

/// Resonant rotating-frame Hamiltonian
/// `hbar*omega1*(cos(phi) Ix + sin(phi) Iy)` (joules). Traceless.
pub fn rotating_frame_hamiltonian(p: &NmrParameters) -> Operator {
    let ax = Operator::spin_x().scale(p.phi.cos()) + Operator::spin_y().scale(p.phi.sin());
    ax.scale(HBAR * p.omega1)
}

/// Unitary generated by a rectangular rf pulse of Rabi frequency `omega1`,
/// duration `tau` and phase `phi`:
/// `U = exp(-i omega1 tau (cos(phi) Ix + sin(phi) Iy))`.
pub fn gate_from_pulse(omega1: f64, tau: f64, phi: f64) -> Operator {
    let axis = Operator::spin_x().scale(phi.cos()) + Operator::spin_y().scale(phi.sin());
    matrix_exponential_su2(&axis, omega1 * tau)
        .expect("pulse axis is Hermitian and traceless by construction")
}

/// The X, Y and Z gates in closed form.
///
/// X and Z are the standard pi/2 matrices; Y is `exp(-i (pi/4) sigma_y) =
/// (1/sqrt2) [[1, -1], [1, 1]]` (the corresponding unitary; some printed
/// versions of this matrix are singular and cannot be a gate).
pub fn named_gate(which: NamedGate) -> Operator {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let entries = match which {
        NamedGate::X => [
            [Complex::new(s, 0.0), Complex::new(0.0, -s)],
            [Complex::new(0.0, -s), Complex::new(s, 0.0)],
        ],
        NamedGate::Y => [
            [Complex::new(s, 0.0), Complex::new(-s, 0.0)],
            [Complex::new(s, 0.0), Complex::new(s, 0.0)],
        ],
        NamedGate::Z => [
            [Complex::new(s, -s), Complex::new(0.0, 0.0)],
            [Complex::new(0.0, 0.0), Complex::new(s, s)],
        ],
    };
    Operator::from_entries_unchecked(entries)
}

/// Thermal equilibrium state in the first-order high-temperature expansion,
/// `(1/2)(I + (hbar*omega0/kB*T) Iz)`. Diagonal, trace exactly 1.
pub fn thermal_state(p: &NmrParameters) -> DensityMatrix {
    let x = p.thermal_polarization();
    DensityMatrix::new([
        [Complex::new(0.5 + 0.25 * x, 0.0), Complex::new(0.0, 0.0)],
        [Complex::new(0.0, 0.0), Complex::new(0.5 - 0.25 * x, 0.0)],
    ])
    .expect("diagonal real matrix is Hermitian")
}

/// Exact Gibbs state `exp(-H0/kB*T)/Z`, for validating the expansion.
pub fn thermal_state_exact(p: &NmrParameters) -> DensityMatrix {
    let x = p.thermal_polarization();
    let up = (0.5 * x).exp();
    let down = (-0.5 * x).exp();
    let z = up + down;
    DensityMatrix::new([
        [Complex::new(up / z, 0.0), Complex::new(0.0, 0.0)],
        [Complex::new(0.0, 0.0), Complex::new(down / z, 0.0)],
    ])
    .expect("diagonal real matrix is Hermitian")
}

/// Conjugates a state by a unitary: `U rho U†`. Rejects non-unitary `U`.
pub fn apply_gate(u: &Operator, rho: &DensityMatrix) -> Result<DensityMatrix> {
    let dev = (*u * u.dagger()).max_abs_diff(&Operator::identity());
    if dev > GATE_UNITARITY_TOL {
        return Err(Error::NotUnitary { max_dev: dev });
    }
    let out = *u * rho.as_operator() * u.dagger();
    // Conjugation by a unitary preserves Hermiticity up to round-off; fold
    // the round-off back so the result satisfies the density-matrix invariant.
    DensityMatrix::new(out.hermitian_part().entries())
}

/// Transforms a rotating-frame state to the laboratory frame at time `t`:
/// conjugation by `exp(i omega0 t Iz)`.
///
/// With this orientation the post-X state yields
/// `Mx_lab(t) = -(hbar*omega0/4kB*T) sin(omega0 t)`.
pub fn to_lab_frame(rho_rot: &DensityMatrix, t: f64, p: &NmrParameters) -> DensityMatrix {
    let u = matrix_exponential_su2(&Operator::spin_z(), -p.omega0 * t)
        .expect("Iz is Hermitian and traceless");
    let out = u * rho_rot.as_operator() * u.dagger();
    DensityMatrix::new(out.hermitian_part().entries())
        .expect("hermitian part is Hermitian by construction")
}

/// Magnetization along an axis, `M_axis = <I_axis> = tr(I_axis * rho)`.
///
/// The proportionality constant between the measured moment and `<I>` is
/// fixed to 1. The value is signed; the plotted experimental quantity is its
/// absolute real part.
pub fn magnetization(rho: &DensityMatrix, axis: Axis) -> f64 {
    rho.trace_expectation(&axis.spin_operator()).re
}
