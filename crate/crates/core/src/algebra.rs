//! Exact 2x2 complex linear algebra for a single spin-1/2.
//!
//! Dimension is fixed at 2 throughout, which keeps every operation in closed
//! form (in particular the SU(2) exponential) and avoids any external
//! linear-algebra dependency.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Complex scalar used everywhere in the crate.
pub type Complex = Complex64;

/// Entrywise tolerance for pure algebra identities (Hermiticity, unitarity).
pub const ALGEBRA_TOL: f64 = 1e-12;

/// Allowed norm deviation for states fed into expectation-style operations.
pub const STATE_NORM_TOL: f64 = 1e-9;

fn finite(z: Complex) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

/// A 2x2 complex matrix. Units are context-dependent: Hamiltonians are in
/// joules, gates and Lindblad operators are dimensionless.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Operator {
    entries: [[Complex; 2]; 2],
}

impl Operator {
    /// Builds an operator from row-major entries, rejecting NaN/Inf.
    pub fn new(entries: [[Complex; 2]; 2]) -> Result<Self> {
        for row in &entries {
            for &z in row {
                if !finite(z) {
                    return Err(Error::NonFinite {
                        context: "operator entry",
                    });
                }
            }
        }
        Ok(Self { entries })
    }

    pub(crate) fn from_entries_unchecked(entries: [[Complex; 2]; 2]) -> Self {
        Self { entries }
    }

    pub fn zero() -> Self {
        let z = Complex::new(0.0, 0.0);
        Self {
            entries: [[z, z], [z, z]],
        }
    }

    pub fn identity() -> Self {
        let z = Complex::new(0.0, 0.0);
        let o = Complex::new(1.0, 0.0);
        Self {
            entries: [[o, z], [z, o]],
        }
    }

    pub fn pauli_x() -> Self {
        let z = Complex::new(0.0, 0.0);
        let o = Complex::new(1.0, 0.0);
        Self {
            entries: [[z, o], [o, z]],
        }
    }

    pub fn pauli_y() -> Self {
        let z = Complex::new(0.0, 0.0);
        Self {
            entries: [[z, Complex::new(0.0, -1.0)], [Complex::new(0.0, 1.0), z]],
        }
    }

    pub fn pauli_z() -> Self {
        let z = Complex::new(0.0, 0.0);
        Self {
            entries: [
                [Complex::new(1.0, 0.0), z],
                [z, Complex::new(-1.0, 0.0)],
            ],
        }
    }

    /// Spin operator `I_x = sigma_x / 2` (dimensionless).
    pub fn spin_x() -> Self {
        Self::pauli_x().scale(0.5)
    }

    /// Spin operator `I_y = sigma_y / 2`.
    pub fn spin_y() -> Self {
        Self::pauli_y().scale(0.5)
    }

    /// Spin operator `I_z = sigma_z / 2`.
    pub fn spin_z() -> Self {
        Self::pauli_z().scale(0.5)
    }

    /// The spin lowering operator `[[0,1],[0,0]]`, used as the Lindblad
    /// operator modeling energy absorption during measurement.
    pub fn lowering() -> Self {
        let z = Complex::new(0.0, 0.0);
        Self {
            entries: [[z, Complex::new(1.0, 0.0)], [z, z]],
        }
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex {
        self.entries[row][col]
    }

    pub fn entries(&self) -> [[Complex; 2]; 2] {
        self.entries
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        Self {
            entries: [
                [self.entries[0][0].conj(), self.entries[1][0].conj()],
                [self.entries[0][1].conj(), self.entries[1][1].conj()],
            ],
        }
    }

    pub fn trace(&self) -> Complex {
        self.entries[0][0] + self.entries[1][1]
    }

    pub fn scale(&self, factor: f64) -> Self {
        self.scale_complex(Complex::new(factor, 0.0))
    }

    pub fn scale_complex(&self, factor: Complex) -> Self {
        let mut out = self.entries;
        for row in &mut out {
            for z in row {
                *z *= factor;
            }
        }
        Self { entries: out }
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[Complex; 2]) -> [Complex; 2] {
        [
            self.entries[0][0] * v[0] + self.entries[0][1] * v[1],
            self.entries[1][0] * v[0] + self.entries[1][1] * v[1],
        ]
    }

    /// Largest entrywise absolute difference to `other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut max = 0.0f64;
        for i in 0..2 {
            for j in 0..2 {
                max = max.max((self.entries[i][j] - other.entries[i][j]).norm());
            }
        }
        max
    }

    pub fn hermiticity_deviation(&self) -> f64 {
        self.max_abs_diff(&self.dagger())
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_deviation() <= tol
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        (*self * self.dagger()).max_abs_diff(&Self::identity()) <= tol
    }

    pub fn is_traceless(&self, tol: f64) -> bool {
        self.trace().norm() <= tol
    }

    /// Exact Hermitian part `(A + A†)/2`.
    pub fn hermitian_part(&self) -> Self {
        (*self + self.dagger()).scale(0.5)
    }
}

impl Add for Operator {
    type Output = Operator;
    fn add(self, rhs: Operator) -> Operator {
        let mut out = self.entries;
        for i in 0..2 {
            for j in 0..2 {
                out[i][j] += rhs.entries[i][j];
            }
        }
        Operator { entries: out }
    }
}

impl Sub for Operator {
    type Output = Operator;
    fn sub(self, rhs: Operator) -> Operator {
        let mut out = self.entries;
        for i in 0..2 {
            for j in 0..2 {
                out[i][j] -= rhs.entries[i][j];
            }
        }
        Operator { entries: out }
    }
}

impl Mul for Operator {
    type Output = Operator;
    fn mul(self, rhs: Operator) -> Operator {
        let a = &self.entries;
        let b = &rhs.entries;
        let mut out = [[Complex::new(0.0, 0.0); 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Operator { entries: out }
    }
}

impl Neg for Operator {
    type Output = Operator;
    fn neg(self) -> Operator {
        self.scale(-1.0)
    }
}

/// Commutator `[A, B] = AB - BA`.
pub fn commutator(a: &Operator, b: &Operator) -> Operator {
    *a * *b - *b * *a
}

/// Closed-form `exp(-i * angle * axis)` for a Hermitian, traceless 2x2
/// generator.
///
/// Any such generator decomposes as `axis = a*sx + b*sy + c*sz`; with
/// `m = sqrt(a^2 + b^2 + c^2)` the exponential is
/// `cos(angle*m) I - i sin(angle*m)/m * axis`, which is exactly unitary.
pub fn matrix_exponential_su2(axis: &Operator, angle: f64) -> Result<Operator> {
    let herm_dev = axis.hermiticity_deviation();
    if herm_dev > ALGEBRA_TOL {
        return Err(Error::NotHermitian { max_dev: herm_dev });
    }
    let trace_abs = axis.trace().norm();
    if trace_abs > ALGEBRA_TOL {
        return Err(Error::NotTraceless { trace_abs });
    }
    // Pauli coordinates: axis = [[c, a - ib], [a + ib, -c]].
    let c = axis.entry(0, 0).re;
    let a = axis.entry(1, 0).re;
    let b = axis.entry(1, 0).im;
    let m = (a * a + b * b + c * c).sqrt();
    let theta = angle * m;
    if m == 0.0 || theta == 0.0 {
        return Ok(Operator::identity());
    }
    let cos = Complex::new(theta.cos(), 0.0);
    let factor = Complex::new(0.0, -theta.sin() / m);
    let unit = Operator::identity().scale_complex(cos);
    Ok(unit + axis.scale_complex(factor))
}

/// A normalized two-component complex state vector; one QSD trajectory's
/// instantaneous state.
///
/// Component 0 is `|0> = (1, 0)^T`, component 1 is `|1> = (0, 1)^T`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PureState {
    amplitudes: [Complex; 2],
}

impl PureState {
    /// Builds a state from amplitudes that must already be normalized
    /// (within [`STATE_NORM_TOL`]).
    pub fn new(a0: Complex, a1: Complex) -> Result<Self> {
        if !finite(a0) || !finite(a1) {
            return Err(Error::NonFinite {
                context: "state amplitude",
            });
        }
        let norm = (a0.norm_sqr() + a1.norm_sqr()).sqrt();
        if (norm - 1.0).abs() > STATE_NORM_TOL {
            return Err(Error::NotNormalized {
                norm,
                tol: STATE_NORM_TOL,
            });
        }
        Ok(Self {
            amplitudes: [a0, a1],
        })
    }

    /// Normalizes raw amplitudes into a state. Fails on numerically zero or
    /// non-finite input.
    pub fn from_unnormalized(a0: Complex, a1: Complex) -> Result<Self> {
        if !finite(a0) || !finite(a1) {
            return Err(Error::NonFinite {
                context: "state amplitude",
            });
        }
        let norm = (a0.norm_sqr() + a1.norm_sqr()).sqrt();
        if norm < 1e-300 {
            return Err(Error::DegenerateState { step: 0, norm });
        }
        let inv = 1.0 / norm;
        Ok(Self {
            amplitudes: [a0 * inv, a1 * inv],
        })
    }

    pub(crate) fn from_amplitudes_unchecked(amplitudes: [Complex; 2]) -> Self {
        Self { amplitudes }
    }

    /// `|0> = (1, 0)^T`, the lower-energy state for `H0 = -hbar*omega0*Iz`.
    pub fn ground() -> Self {
        Self {
            amplitudes: [Complex::new(1.0, 0.0), Complex::new(0.0, 0.0)],
        }
    }

    /// `|1> = (0, 1)^T`.
    pub fn excited() -> Self {
        Self {
            amplitudes: [Complex::new(0.0, 0.0), Complex::new(1.0, 0.0)],
        }
    }

    pub fn amplitude(&self, index: usize) -> Complex {
        self.amplitudes[index]
    }

    pub fn amplitudes(&self) -> [Complex; 2] {
        self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        (self.amplitudes[0].norm_sqr() + self.amplitudes[1].norm_sqr()).sqrt()
    }

    /// Inner product `<self|other>`.
    pub fn inner(&self, other: &Self) -> Complex {
        self.amplitudes[0].conj() * other.amplitudes[0]
            + self.amplitudes[1].conj() * other.amplitudes[1]
    }

    /// Expectation value `<psi|A|psi>`. Rejects states whose norm has
    /// drifted beyond [`STATE_NORM_TOL`].
    pub fn expectation(&self, a: &Operator) -> Result<Complex> {
        let norm = self.norm();
        if (norm - 1.0).abs() > STATE_NORM_TOL {
            return Err(Error::NotNormalized {
                norm,
                tol: STATE_NORM_TOL,
            });
        }
        let av = a.apply(&self.amplitudes);
        Ok(self.amplitudes[0].conj() * av[0] + self.amplitudes[1].conj() * av[1])
    }

    /// Outer product `|self><other|`.
    pub fn outer(&self, other: &Self) -> Operator {
        let a = &self.amplitudes;
        let b = &other.amplitudes;
        Operator {
            entries: [
                [a[0] * b[0].conj(), a[0] * b[1].conj()],
                [a[1] * b[0].conj(), a[1] * b[1].conj()],
            ],
        }
    }
}

/// A 2x2 complex Hermitian matrix describing a (possibly reconstructed)
/// mixed state.
///
/// Hermiticity is enforced at construction; trace = 1 is deliberately not,
/// because QSD-reconstructed matrices may drift away from unit trace and the
/// drift itself is a recorded diagnostic.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DensityMatrix {
    entries: [[Complex; 2]; 2],
}

impl DensityMatrix {
    pub fn new(entries: [[Complex; 2]; 2]) -> Result<Self> {
        let op = Operator::new(entries)?;
        let dev = op.hermiticity_deviation();
        if dev > ALGEBRA_TOL {
            return Err(Error::NotHermitian { max_dev: dev });
        }
        Ok(Self { entries })
    }

    /// Projector `|psi><psi|` of a pure state.
    pub fn from_pure(psi: &PureState) -> Self {
        Self {
            entries: psi.outer(psi).entries,
        }
    }

    pub fn maximally_mixed() -> Self {
        Self {
            entries: Operator::identity().scale(0.5).entries,
        }
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex {
        self.entries[row][col]
    }

    pub fn entries(&self) -> [[Complex; 2]; 2] {
        self.entries
    }

    pub fn trace(&self) -> Complex {
        self.entries[0][0] + self.entries[1][1]
    }

    /// `tr(A * rho)`.
    pub fn trace_expectation(&self, a: &Operator) -> Complex {
        let mut sum = Complex::new(0.0, 0.0);
        for i in 0..2 {
            for k in 0..2 {
                sum += a.entry(i, k) * self.entries[k][i];
            }
        }
        sum
    }

    pub fn as_operator(&self) -> Operator {
        Operator {
            entries: self.entries,
        }
    }

    /// Eigenvalues of the Hermitian matrix, ascending.
    pub fn eigenvalues(&self) -> [f64; 2] {
        let a = self.entries[0][0].re;
        let d = self.entries[1][1].re;
        let off = self.entries[0][1].norm_sqr();
        let mean = 0.5 * (a + d);
        let disc = (0.25 * (a - d) * (a - d) + off).sqrt();
        [mean - disc, mean + disc]
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.as_operator().max_abs_diff(&other.as_operator())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    /// Independent series oracle for the SU(2) exponential: scaling and
    /// squaring with a 20-term Taylor core.
    fn exp_taylor_oracle(axis: &Operator, angle: f64) -> Operator {
        let a = axis.scale_complex(c(0.0, -angle));
        // Subdivide until the argument norm is small, then square back up.
        let norm_bound: f64 = a
            .entries()
            .iter()
            .flatten()
            .map(|z| z.norm())
            .sum();
        let squarings = if norm_bound > 0.5 {
            (norm_bound / 0.5).log2().ceil() as u32
        } else {
            0
        };
        let scaled = a.scale(1.0 / f64::powi(2.0, squarings as i32));
        let mut term = Operator::identity();
        let mut sum = Operator::identity();
        for n in 1..20 {
            term = (term * scaled).scale(1.0 / n as f64);
            sum = sum + term;
        }
        let mut result = sum;
        for _ in 0..squarings {
            result = result * result;
        }
        result
    }

    #[test]
    fn dagger_of_identity_is_identity() {
        let i = Operator::identity();
        assert_eq!(i.dagger(), i);
    }

    #[test]
    fn dagger_of_lowering_is_raising() {
        let l = Operator::lowering();
        let ld = l.dagger();
        assert_eq!(ld.entry(0, 1), c(0.0, 0.0));
        assert_eq!(ld.entry(1, 0), c(1.0, 0.0));
        assert_eq!(l.dagger().dagger(), l);
    }

    #[test]
    fn dagger_times_x_gate_is_identity() {
        // X from the closed-form exponential; X† X = I to algebra tolerance.
        let x = matrix_exponential_su2(&Operator::spin_x(), std::f64::consts::FRAC_PI_2).unwrap();
        let prod = x.dagger() * x;
        assert!(prod.max_abs_diff(&Operator::identity()) < ALGEBRA_TOL);
    }

    #[test]
    fn expectation_on_eigenstates() {
        let up = PureState::ground();
        assert!((up.expectation(&Operator::pauli_z()).unwrap() - c(1.0, 0.0)).norm() < 1e-15);

        let l = Operator::lowering();
        assert_eq!(up.expectation(&l).unwrap(), c(0.0, 0.0));

        let s = std::f64::consts::FRAC_1_SQRT_2;
        let plus = PureState::new(c(s, 0.0), c(s, 0.0)).unwrap();
        assert!((plus.expectation(&Operator::pauli_x()).unwrap() - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn expectation_rejects_unnormalized_state() {
        let bad = PureState::from_amplitudes_unchecked([c(1.0, 0.0), c(0.5, 0.0)]);
        assert!(matches!(
            bad.expectation(&Operator::pauli_z()),
            Err(Error::NotNormalized { .. })
        ));
    }

    #[test]
    fn trace_expectation_of_maximally_mixed_spin_z_is_zero() {
        let rho = DensityMatrix::maximally_mixed();
        assert!(rho.trace_expectation(&Operator::spin_z()).norm() < 1e-15);
    }

    #[test]
    fn pauli_commutator_algebra() {
        // [sx, sy] = 2i sz, checked by direct multiplication.
        let lhs = commutator(&Operator::pauli_x(), &Operator::pauli_y());
        let rhs = Operator::pauli_z().scale_complex(c(0.0, 2.0));
        assert!(lhs.max_abs_diff(&rhs) < ALGEBRA_TOL);

        let zero = commutator(&Operator::pauli_x(), &Operator::pauli_x());
        assert!(zero.max_abs_diff(&Operator::zero()) < 1e-15);

        let any = Operator::new([[c(0.3, 0.1), c(-0.4, 0.9)], [c(1.5, 0.0), c(0.2, -2.0)]]).unwrap();
        assert!(commutator(&Operator::identity(), &any).max_abs_diff(&Operator::zero()) < 1e-15);
    }

    #[test]
    fn outer_products() {
        let g = PureState::ground();
        let e = PureState::excited();
        let gg = g.outer(&g);
        assert_eq!(gg.entry(0, 0), c(1.0, 0.0));
        assert_eq!(gg.entry(1, 1), c(0.0, 0.0));

        let eg = e.outer(&g);
        assert_eq!(eg.entry(1, 0), c(1.0, 0.0));
        assert_eq!(eg.entry(0, 1), c(0.0, 0.0));

        let s = std::f64::consts::FRAC_1_SQRT_2;
        let psi = PureState::new(c(s, 0.0), c(0.0, -s)).unwrap();
        assert!((psi.outer(&psi).trace() - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn su2_exponential_matches_eq12_gates() {
        let s = std::f64::consts::FRAC_1_SQRT_2;

        // angle = 0 gives the identity exactly.
        let i = matrix_exponential_su2(&Operator::spin_x(), 0.0).unwrap();
        assert_eq!(i, Operator::identity());

        // X = exp(-i (pi/2) sx/2) = (1/sqrt2) [[1, -i], [-i, 1]].
        let x = matrix_exponential_su2(&Operator::spin_x(), std::f64::consts::FRAC_PI_2).unwrap();
        let expected =
            Operator::new([[c(s, 0.0), c(0.0, -s)], [c(0.0, -s), c(s, 0.0)]]).unwrap();
        assert!(x.max_abs_diff(&expected) < ALGEBRA_TOL);

        // Z = exp(-i (pi/2) sz/2) = (1/sqrt2) diag(1-i, 1+i).
        let z = matrix_exponential_su2(&Operator::spin_z(), std::f64::consts::FRAC_PI_2).unwrap();
        let expected =
            Operator::new([[c(s, -s), c(0.0, 0.0)], [c(0.0, 0.0), c(s, s)]]).unwrap();
        assert!(z.max_abs_diff(&expected) < ALGEBRA_TOL);
    }

    #[test]
    fn su2_exponential_rejects_bad_generators() {
        assert!(matches!(
            matrix_exponential_su2(&Operator::lowering(), 1.0),
            Err(Error::NotHermitian { .. })
        ));
        assert!(matches!(
            matrix_exponential_su2(&Operator::identity(), 1.0),
            Err(Error::NotTraceless { .. })
        ));
    }

    #[test]
    fn su2_exponential_matches_taylor_oracle() {
        // Mixed-axis generator, angles across [0, 4*pi].
        let axis = (Operator::spin_x().scale(0.3)
            + Operator::spin_y().scale(-1.1)
            + Operator::spin_z().scale(0.7))
        .hermitian_part();
        for k in 0..=40 {
            let angle = 4.0 * std::f64::consts::PI * k as f64 / 40.0;
            let closed = matrix_exponential_su2(&axis, angle).unwrap();
            let oracle = exp_taylor_oracle(&axis, angle);
            assert!(
                closed.max_abs_diff(&oracle) < 1e-10,
                "angle {angle}: deviation {}",
                closed.max_abs_diff(&oracle)
            );
        }
    }

    #[test]
    fn density_matrix_requires_hermiticity() {
        assert!(matches!(
            DensityMatrix::new([[c(0.5, 0.0), c(0.1, 0.0)], [c(0.3, 0.0), c(0.5, 0.0)]]),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn operators_reject_non_finite_entries() {
        assert!(Operator::new([[c(f64::NAN, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(0.0, 0.0)]])
            .is_err());
        assert!(PureState::new(c(f64::INFINITY, 0.0), c(0.0, 0.0)).is_err());
    }

    #[test]
    fn eigenvalues_of_mixed_state() {
        let rho = DensityMatrix::maximally_mixed();
        let ev = rho.eigenvalues();
        assert!((ev[0] - 0.5).abs() < 1e-15 && (ev[1] - 0.5).abs() < 1e-15);

        let pure = DensityMatrix::from_pure(&PureState::excited());
        let ev = pure.eigenvalues();
        assert!(ev[0].abs() < 1e-15 && (ev[1] - 1.0).abs() < 1e-15);
    }
}
