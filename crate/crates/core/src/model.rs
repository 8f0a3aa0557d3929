//! Physical parameters, quantum-number bookkeeping, selection-rule dipole
//! elements, drive envelopes, and configuration validation.
//!
//! Everything is expressed in Hartree atomic units with ħ = 1; energies and
//! angular frequencies share the same unit. [`au_to_mhz`] converts for
//! display only.

use crate::{real, Cplx, Real, TfcError};
use std::fmt;

/// One atomic unit of angular frequency, in rad/s. Display helper only.
pub const AU_ANGULAR_FREQUENCY_RAD_PER_S: f64 = 4.134_137e16;

/// Converts an atomic-unit angular frequency to an ordinary frequency in MHz.
pub fn au_to_mhz<R: Real>(omega_au: R) -> R {
    omega_au * real::<R>(AU_ANGULAR_FREQUENCY_RAD_PER_S / (2.0 * std::f64::consts::PI) / 1e6)
}

/// Handedness label of a chiral species.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Enantiomer {
    R,
    S,
}

impl Enantiomer {
    /// Mirror image; an involution.
    pub fn mirror(self) -> Self {
        match self {
            Enantiomer::R => Enantiomer::S,
            Enantiomer::S => Enantiomer::R,
        }
    }
}

impl fmt::Display for Enantiomer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Enantiomer::R => write!(f, "R"),
            Enantiomer::S => write!(f, "S"),
        }
    }
}

/// Which enantiomers a run should simulate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EnantiomerSelection {
    Single(Enantiomer),
    Both,
}

impl EnantiomerSelection {
    pub fn list(self) -> Vec<Enantiomer> {
        match self {
            EnantiomerSelection::Single(e) => vec![e],
            EnantiomerSelection::Both => vec![Enantiomer::R, Enantiomer::S],
        }
    }
}

/// Rotational constants of an asymmetric top, A > B > C > 0 (a.u.).
#[derive(Clone, Copy, Debug)]
pub struct RotationalConstants<R> {
    pub a: R,
    pub b: R,
    pub c: R,
}

/// Rotational state label |J, tau, M>.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct StateLabel {
    pub j: u32,
    pub tau: i32,
    pub m: i32,
}

impl StateLabel {
    pub fn new(j: u32, tau: i32, m: i32) -> Self {
        assert!(m.unsigned_abs() <= j, "|M| must not exceed J");
        Self { j, tau, m }
    }
}

/// The four working levels of the driven cycle, in the basis order used by
/// every 4x4 matrix in this crate.
pub fn working_basis() -> [StateLabel; 4] {
    [
        StateLabel::new(0, 1, 0),  // |1,0>
        StateLabel::new(1, 2, 1),  // |2,+1>
        StateLabel::new(1, 2, -1), // |2,-1>
        StateLabel::new(1, 3, 0),  // |3,0>
    ]
}

/// Signed principal-axis dipole components and the two transition energies of
/// one chiral species (the R-labelled one; `dipoles_for` mirrors to S).
#[derive(Clone, Copy, Debug)]
pub struct MolecularParams<R> {
    pub mu_a: R,
    pub mu_b: R,
    pub mu_c: R,
    /// eps_2 - eps_1 (a.u. angular frequency).
    pub eps21: R,
    /// eps_3 - eps_1 (a.u. angular frequency).
    pub eps31: R,
}

impl<R: Real> MolecularParams<R> {
    /// Dipole components for the requested enantiomer. The mirror image
    /// carries the KS-product sign flip on mu_c, matching the bundled
    /// propanediol dataset where mu_a and mu_b are common to both species.
    pub fn dipoles_for(&self, e: Enantiomer) -> (R, R, R) {
        match e {
            Enantiomer::R => (self.mu_a, self.mu_b, self.mu_c),
            Enantiomer::S => (self.mu_a, self.mu_b, -self.mu_c),
        }
    }
}

/// Drive amplitudes, offset, detuning, modulation frequencies, and ramp rate.
/// Amplitudes follow the symmetric convention E_ij = E_ji.
#[derive(Clone, Copy, Debug)]
pub struct DriveParams<R> {
    pub e21: R,
    pub e32: R,
    pub e31: R,
    /// Dimensionless non-modulated component of the 3<->1 envelope.
    pub m: R,
    /// Common detuning delta (a.u.).
    pub delta: R,
    pub omega1: R,
    pub omega2: R,
    /// Ramp rate of the adiabatic preparation protocol (a.u.).
    pub omega_r: R,
}

/// Point on the two-torus of drive phases. Construction reduces both
/// coordinates into [0, 2pi), so quasiperiodicity is exact by representation:
/// shifting either input by 2pi yields the identical point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TorusPoint<R> {
    theta1: R,
    theta2: R,
}

impl<R: Real> TorusPoint<R> {
    pub fn new(theta1: R, theta2: R) -> Self {
        let tau = R::TAU();
        let mut t1 = theta1 % tau;
        if t1 < R::zero() {
            t1 += tau;
        }
        let mut t2 = theta2 % tau;
        if t2 < R::zero() {
            t2 += tau;
        }
        Self {
            theta1: t1,
            theta2: t2,
        }
    }

    pub fn theta1(&self) -> R {
        self.theta1
    }

    pub fn theta2(&self) -> R {
        self.theta2
    }
}

/// Simulation controls beyond the physics parameters.
#[derive(Clone, Copy, Debug)]
pub struct SimulationParams<R> {
    pub enantiomer: EnantiomerSelection,
    /// Integrator step (a.u.).
    pub dt: R,
    /// Propagation horizon after t = 0, in omega_2 periods.
    pub tstar_periods: R,
    /// Torus grid size for topology scans.
    pub grid_n: usize,
    /// Trajectory sample stride in integrator steps; 0 selects one
    /// automatically (~1e5 stored samples).
    pub sample_stride: usize,
    /// Whether the adiabatic preparation ramp precedes t = 0.
    pub ramp: bool,
}

/// Full configuration of one simulation run.
#[derive(Clone, Copy, Debug)]
pub struct SimConfig<R> {
    pub molecule: MolecularParams<R>,
    pub drive: DriveParams<R>,
    pub sim: SimulationParams<R>,
}

/// Golden-ratio factor (sqrt(5)-1)/2 relating the two modulation frequencies
/// in the bundled dataset.
pub const GOLDEN_RATIO: f64 = 0.618_033_988_749_894_9;

impl<R: Real> SimConfig<R> {
    /// Bundled 1,2-propanediol dataset: dipole components and transition
    /// energies from the microwave three-wave-mixing literature, drive
    /// amplitudes in units of E0 = 4.0e-9 a.u., golden-ratio modulation
    /// frequencies, and the standard ramp rate.
    pub fn propanediol() -> Self {
        let e0 = real::<R>(4.0e-9);
        let sqrt3 = real::<R>(3.0).sqrt();
        let omega1 = real::<R>(1.0e-11);
        SimConfig {
            molecule: MolecularParams {
                mu_a: real(0.47),
                mu_b: real(0.75),
                mu_c: real(0.14),
                eps21: real(4.4e-8),
                eps31: real(4.7e-8),
            },
            drive: DriveParams {
                e21: real::<R>(5.0) * sqrt3 * e0,
                e32: real::<R>(6.0) * e0,
                e31: sqrt3 * e0,
                m: real(1.4),
                delta: real(1.0e-11),
                omega1,
                omega2: real::<R>(GOLDEN_RATIO) * omega1,
                omega_r: real(2.0e-13),
            },
            sim: SimulationParams {
                enantiomer: EnantiomerSelection::Both,
                dt: real(1.0e7),
                tstar_periods: real(2000.0),
                grid_n: 40,
                sample_stride: 0,
                ramp: true,
            },
        }
    }

    /// Period of the omega_2 modulation (a.u.).
    pub fn omega2_period(&self) -> R {
        R::TAU() / self.drive.omega2
    }
}

/// Energies of the J = 0 and J = 1 asymmetric-top levels.
#[derive(Clone, Copy, Debug)]
pub struct AsymmetricTopLevels<R> {
    /// Ground level |0, tau=1, 0>.
    pub j0: R,
    /// The three J = 1 levels, ascending. For A > B > C these are
    /// B+C < A+C < A+B, each (2J+1)-fold degenerate in M.
    pub j1: [R; 3],
}

/// J = 0 and J = 1 level energies of H = A Ja^2 + B Jb^2 + C Jc^2.
///
/// Degenerate constants (spherical or symmetric tops) are accepted; only a
/// strict misordering A < B or B < C, or a non-positive constant, is an
/// error.
pub fn asymmetric_top_levels<R: Real>(
    rc: &RotationalConstants<R>,
) -> Result<AsymmetricTopLevels<R>, TfcError> {
    let RotationalConstants { a, b, c } = *rc;
    if !(a >= b && b >= c) || c <= R::zero() {
        return Err(TfcError::InvalidParameters(format!(
            "rotational constants must satisfy A >= B >= C > 0, got A={a}, B={b}, C={c}"
        )));
    }
    // J=1 block in the symmetric-top basis diagonalizes to {B+C, A+C, A+B};
    // already ascending for the required ordering.
    Ok(AsymmetricTopLevels {
        j0: R::zero(),
        j1: [b + c, a + c, a + b],
    })
}

/// The three selection-rule dipole matrix elements of the driven cycle,
/// projected on the respective drive polarizations. None depends on M.
#[derive(Clone, Copy, Debug)]
pub struct DipoleElements<R: Real> {
    /// mu_{2,+-1;1,0} = -i mu_b / sqrt(6)
    pub mu21: Cplx<R>,
    /// mu_{3,0;2,+-1} = mu_a / (2 sqrt(2))
    pub mu32: Cplx<R>,
    /// mu_{3,0;1,0} = -i mu_c / sqrt(3)
    pub mu31: Cplx<R>,
}

pub fn dipole_matrix_elements<R: Real>(
    mol: &MolecularParams<R>,
    e: Enantiomer,
) -> DipoleElements<R> {
    let (mu_a, mu_b, mu_c) = mol.dipoles_for(e);
    let zero = R::zero();
    DipoleElements {
        mu21: Cplx::new(zero, -mu_b / real::<R>(6.0).sqrt()),
        mu32: Cplx::new(mu_a / (real::<R>(2.0) * real::<R>(2.0).sqrt()), zero),
        mu31: Cplx::new(zero, -mu_c / real::<R>(3.0).sqrt()),
    }
}

/// Sign of the Kral-Shapiro product (mu_b E21)(mu_a E32)(mu_c E31) for the
/// requested enantiomer. Errors if any factor vanishes, since the cycle and
/// its topology are then undefined.
pub fn ks_product_sign<R: Real>(
    mol: &MolecularParams<R>,
    drive: &DriveParams<R>,
    e: Enantiomer,
) -> Result<i8, TfcError> {
    let (mu_a, mu_b, mu_c) = mol.dipoles_for(e);
    let factors = [
        ("mu_b * E21", mu_b * drive.e21),
        ("mu_a * E32", mu_a * drive.e32),
        ("mu_c * E31", mu_c * drive.e31),
    ];
    let mut product = R::one();
    for (name, f) in factors {
        if f == R::zero() {
            return Err(TfcError::DegenerateCycle(format!("{name} vanishes")));
        }
        product = product * f;
    }
    Ok(if product > R::zero() { 1 } else { -1 })
}

/// Slowly modulated field amplitudes at a point of the drive torus.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Envelopes<R> {
    pub e21: R,
    pub e32: R,
    pub e31: R,
}

/// E21 sin(theta1), E32 sin(theta2), E31 (m - cos(theta1) - cos(theta2)).
pub fn envelopes<R: Real>(p: TorusPoint<R>, drive: &DriveParams<R>) -> Envelopes<R> {
    let (s1, c1) = p.theta1().sin_cos();
    let (s2, c2) = p.theta2().sin_cos();
    Envelopes {
        e21: drive.e21 * s1,
        e32: drive.e32 * s2,
        e31: drive.e31 * (drive.m - c1 - c2),
    }
}

/// One failed configuration check, with the dimensionless ratio that failed.
#[derive(Clone, Debug)]
pub struct ConfigViolation {
    pub kind: ViolationKind,
    pub ratio: f64,
    pub message: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ViolationKind {
    /// Positivity / ordering of raw parameters.
    Parameters,
    /// Rotating-wave approximation margin.
    RwaValidity,
    /// Adiabatic / perturbative ordering of delta, omega_1, omega_2 below the
    /// coupling scale.
    PerturbativeOrdering,
    /// Ramp rate versus modulation frequency.
    RampRate,
    /// Commensurability of omega_1 / omega_2.
    Commensurability,
    /// Integrator step versus Hamiltonian scale.
    StepSize,
}

impl fmt::Display for ConfigViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}: {} (ratio {:.3e})", self.kind, self.message, self.ratio)
    }
}

/// Checks the timescale hierarchy the scheme relies on. Returns all
/// violations rather than failing on the first; an empty list means the
/// configuration is usable.
///
/// The checks, with the bundled dataset comfortably inside each margin:
/// (i) RWA: per transition, the peak coupling |mu E|/2 must stay below 3/4 of
/// its carrier frequency. (ii) Perturbative ordering: delta, omega_1, omega_2
/// at most 0.2 of half the weakest amplitude-level coupling. (iii) Ramp rate
/// omega_r <= omega_1 / 10. (iv) omega_1/omega_2 farther than 1e-6 from every
/// rational p/q with q <= 10. (v) ||H|| dt <= 0.5 for the integrator.
pub fn validate_config<R: Real>(cfg: &SimConfig<R>) -> Vec<ConfigViolation> {
    let mut out = Vec::new();
    let d = &cfg.drive;
    let mol = &cfg.molecule;

    let mut param = |ok: bool, msg: &str| {
        if !ok {
            out.push(ConfigViolation {
                kind: ViolationKind::Parameters,
                ratio: f64::NAN,
                message: msg.to_string(),
            });
        }
    };
    param(
        mol.eps31 > mol.eps21 && mol.eps21 > R::zero(),
        "transition energies must satisfy eps31 > eps21 > 0",
    );
    param(
        d.e21 >= R::zero() && d.e32 >= R::zero() && d.e31 >= R::zero(),
        "field amplitudes must be non-negative",
    );
    param(
        d.omega1 > R::zero() && d.omega2 > R::zero() && d.omega_r > R::zero(),
        "omega_1, omega_2, omega_r must be positive",
    );
    param(cfg.sim.dt > R::zero(), "dt must be positive");
    param(cfg.sim.grid_n >= 8, "torus grid N must be at least 8");
    if !out.is_empty() {
        // Ratio checks below would divide by the offending values.
        return out;
    }

    let (mu_a, mu_b, mu_c) = mol.dipoles_for(Enantiomer::R);
    let sqrt6 = real::<R>(6.0).sqrt();
    let sqrt3 = real::<R>(3.0).sqrt();
    let two_sqrt2 = real::<R>(2.0) * real::<R>(2.0).sqrt();

    // Amplitude-level couplings |mu_{i,M';j,M}| E_ij and their torus-peak
    // envelope versions (the 31 envelope reaches |m| + 2).
    let c21 = (mu_b / sqrt6).abs() * d.e21;
    let c32 = (mu_a / two_sqrt2).abs() * d.e32;
    let c31 = (mu_c / sqrt3).abs() * d.e31;
    let env31_peak = d.m.abs() + real::<R>(2.0);

    let omega21 = mol.eps21 - d.delta;
    let omega32 = mol.eps31 - mol.eps21 - d.delta;
    let omega31 = mol.eps31 - real::<R>(2.0) * d.delta;

    // (i) RWA margin per transition.
    let rwa_limit = 0.75;
    for (name, coupling, carrier) in [
        ("21", c21, omega21),
        ("32", c32, omega32),
        ("31", c31 * env31_peak, omega31),
    ] {
        let ratio = (coupling / (real::<R>(2.0) * carrier)).as_f64();
        if !(0.0..=rwa_limit).contains(&ratio) {
            out.push(ConfigViolation {
                kind: ViolationKind::RwaValidity,
                ratio,
                message: format!(
                    "transition {name}: peak coupling/2 vs carrier ratio {ratio:.3} exceeds {rwa_limit}"
                ),
            });
        }
    }

    // (ii) delta, omega_1, omega_2 well below half the weakest engaged
    // coupling. Zero-amplitude drives (free evolution) are exempt.
    let engaged: Vec<R> = [c21, c32, c31].into_iter().filter(|&c| c > R::zero()).collect();
    if let Some(min_coupling) = engaged.into_iter().reduce(|a, b| a.min(b)) {
        let fast = d.delta.abs().max(d.omega1).max(d.omega2);
        let ratio = (fast / (min_coupling / real::<R>(2.0))).as_f64();
        if ratio > 0.2 {
            out.push(ConfigViolation {
                kind: ViolationKind::PerturbativeOrdering,
                ratio,
                message: format!(
                    "max(|delta|, omega_1, omega_2) is {ratio:.3} of half the weakest coupling (limit 0.2)"
                ),
            });
        }
    }

    // (iii) ramp slow against the modulation.
    let ramp_ratio = (d.omega_r / d.omega1).as_f64();
    if ramp_ratio > 0.1 {
        out.push(ConfigViolation {
            kind: ViolationKind::RampRate,
            ratio: ramp_ratio,
            message: format!("omega_r / omega_1 = {ramp_ratio:.3} exceeds 0.1"),
        });
    }

    // (iv) omega_1/omega_2 must avoid low-order rationals.
    let r = (d.omega1 / d.omega2).as_f64();
    for q in 1..=10u32 {
        let p = (r * q as f64).round();
        let dist = (r - p / q as f64).abs();
        if dist <= 1e-6 {
            out.push(ConfigViolation {
                kind: ViolationKind::Commensurability,
                ratio: dist,
                message: format!(
                    "omega_1/omega_2 = {r:.9} is within 1e-6 of {p}/{q}; drive phases would not cover the torus"
                ),
            });
            break;
        }
    }

    // (v) exponential-midpoint step must resolve the Hamiltonian scale.
    let h_scale = c21 + c32 + c31 * env31_peak + d.delta.abs();
    let step_ratio = (h_scale * cfg.sim.dt).as_f64();
    if step_ratio > 0.5 {
        out.push(ConfigViolation {
            kind: ViolationKind::StepSize,
            ratio: step_ratio,
            message: format!("||H|| dt = {step_ratio:.3} exceeds 0.5; reduce dt"),
        });
    }

    out
}

/// `validate_config` as a hard gate.
pub fn ensure_valid<R: Real>(cfg: &SimConfig<R>) -> Result<(), TfcError> {
    let violations = validate_config(cfg);
    if violations.is_empty() {
        Ok(())
    } else {
        Err(TfcError::ConfigRejected(violations))
    }
}
