//! Hamiltonians of the laser-dressed cycle in three equivalent pictures.
//!
//! * [`lab_hamiltonian`] — lab-frame RWA form on the four working levels,
//!   carrier phases included.
//! * [`rotating_h4`] — rotating-frame 4×4 form; carriers removed, diagonal
//!   reduced to ∓δ. This is what the dynamics integrate.
//! * [`effective_h3`] — spin-1 form used for band topology. Its spectrum
//!   matches the bright sector of the 4×4 form at every torus point (the
//!   basis change itself is not constructed; the spectral equivalence is
//!   enforced by tests).
//!
//! The antisymmetric combination of the two M = ±1 sublevels decouples from
//! all three drives at every torus point: [`DARK_STATE`] is an exact null
//! vector of [`rotating_h4`]. [`bright_h3`] is the complementary 3×3 block;
//! propagating it plus the frozen dark amplitude reproduces the full 4×4
//! evolution exactly and at a third of the eigensolver cost.

use crate::linalg::Matrix;
use crate::model::{Enantiomer, Envelopes, SimConfig, TorusPoint};
use crate::{real, Cplx, Real};

/// Per-enantiomer coupling coefficients as they enter the 4×4 matrix:
/// entry (0,1) is -b4 E21(θ), entry (1,3) is -a4 E32(θ), entry (3,0) is
/// +i c4 E31(θ).
#[derive(Clone, Copy, Debug)]
pub struct CycleCouplings<R> {
    /// mu_b / (2 sqrt 6)
    pub b4: R,
    /// mu_a / (4 sqrt 2)
    pub a4: R,
    /// mu_c / (2 sqrt 3)
    pub c4: R,
}

impl<R: Real> CycleCouplings<R> {
    pub fn new(cfg: &SimConfig<R>, e: Enantiomer) -> Self {
        let (mu_a, mu_b, mu_c) = cfg.molecule.dipoles_for(e);
        CycleCouplings {
            b4: mu_b / (real::<R>(2.0) * real::<R>(6.0).sqrt()),
            a4: mu_a / (real::<R>(4.0) * real::<R>(2.0).sqrt()),
            c4: mu_c / (real::<R>(2.0) * real::<R>(3.0).sqrt()),
        }
    }
}

/// Diagonal rotating-frame transformation U(t) and the three carrier
/// frequencies. `omega31` is stored as the exact sum `omega21 + omega32`.
#[derive(Clone, Copy, Debug)]
pub struct FrameTransform<R: Real> {
    pub phases: [Cplx<R>; 4],
    pub omega21: R,
    pub omega32: R,
    pub omega31: R,
}

/// Carrier frequencies (Ω21, Ω32, Ω31) with Ω31 = Ω21 + Ω32 exactly.
pub fn carrier_frequencies<R: Real>(cfg: &SimConfig<R>) -> (R, R, R) {
    let omega21 = cfg.molecule.eps21 - cfg.drive.delta;
    let omega32 = cfg.molecule.eps31 - cfg.molecule.eps21 - cfg.drive.delta;
    (omega21, omega32, omega21 + omega32)
}

/// Rotating-frame transformation of the four working levels at time `t`.
pub fn frame_transform<R: Real>(t: R, cfg: &SimConfig<R>) -> FrameTransform<R> {
    let (omega21, omega32, omega31) = carrier_frequencies(cfg);
    let eps2 = cfg.molecule.eps21;
    let phase = |w: R| {
        let arg = -w * t;
        Cplx::new(arg.cos(), arg.sin())
    };
    FrameTransform {
        phases: [
            phase(eps2 - omega21),
            phase(eps2),
            phase(eps2),
            phase(eps2 + omega32),
        ],
        omega21,
        omega32,
        omega31,
    }
}

impl<R: Real> FrameTransform<R> {
    /// ψ_lab = U(t) ψ_rot.
    pub fn to_lab(&self, psi_rot: &[Cplx<R>; 4]) -> [Cplx<R>; 4] {
        let mut out = *psi_rot;
        for i in 0..4 {
            out[i] = self.phases[i] * psi_rot[i];
        }
        out
    }
}

/// Lab-frame RWA Hamiltonian at time `t` under steady drive (t >= 0, full
/// amplitudes), on the basis {|1,0>, |2,+1>, |2,-1>, |3,0>} with eps_1 = 0.
pub fn lab_hamiltonian<R: Real>(t: R, cfg: &SimConfig<R>, e: Enantiomer) -> Matrix<R, 4> {
    let k = CycleCouplings::new(cfg, e);
    let env = crate::model::envelopes(
        TorusPoint::new(cfg.drive.omega1 * t, cfg.drive.omega2 * t),
        &cfg.drive,
    );
    let (omega21, omega32, omega31) = carrier_frequencies(cfg);
    let carrier = |w: R| {
        let arg = -w * t;
        Cplx::new(arg.cos(), arg.sin())
    };

    let mut h = Matrix::<R, 4>::zeros();
    let zero = R::zero();
    h.m[1][1] = Cplx::new(cfg.molecule.eps21, zero);
    h.m[2][2] = Cplx::new(cfg.molecule.eps21, zero);
    h.m[3][3] = Cplx::new(cfg.molecule.eps31, zero);

    let t21 = carrier(omega21) * -(k.b4 * env.e21);
    let t32 = carrier(omega32) * -(k.a4 * env.e32);
    let t31 = carrier(omega31) * Cplx::new(zero, k.c4 * env.e31);
    h.m[1][0] = t21;
    h.m[2][0] = t21;
    h.m[0][1] = t21.conj();
    h.m[0][2] = t21.conj();
    h.m[3][1] = t32;
    h.m[3][2] = t32;
    h.m[1][3] = t32.conj();
    h.m[2][3] = t32.conj();
    h.m[3][0] = t31;
    h.m[0][3] = t31.conj();
    h
}

/// Rotating-frame 4×4 Hamiltonian at a torus point, with envelope amplitudes
/// scaled by `alpha` (1 under steady drive; the preparation ramp passes
/// alpha(t) < 1).
pub fn rotating_h4_scaled<R: Real>(
    p: TorusPoint<R>,
    cfg: &SimConfig<R>,
    e: Enantiomer,
    alpha: R,
) -> Matrix<R, 4> {
    let k = CycleCouplings::new(cfg, e);
    let env = crate::model::envelopes(p, &cfg.drive);
    build_h4(&k, &env, cfg.drive.delta, alpha)
}

/// Rotating-frame 4×4 Hamiltonian at full drive amplitude.
pub fn rotating_h4<R: Real>(p: TorusPoint<R>, cfg: &SimConfig<R>, e: Enantiomer) -> Matrix<R, 4> {
    rotating_h4_scaled(p, cfg, e, R::one())
}

fn build_h4<R: Real>(
    k: &CycleCouplings<R>,
    env: &Envelopes<R>,
    delta: R,
    alpha: R,
) -> Matrix<R, 4> {
    let zero = R::zero();
    let g21 = Cplx::new(-k.b4 * env.e21 * alpha, zero);
    let g32 = Cplx::new(-k.a4 * env.e32 * alpha, zero);
    let g31 = Cplx::new(zero, k.c4 * env.e31 * alpha);

    let mut h = Matrix::<R, 4>::zeros();
    h.m[0][0] = Cplx::new(-delta, zero);
    h.m[3][3] = Cplx::new(delta, zero);
    h.m[0][1] = g21;
    h.m[0][2] = g21;
    h.m[1][0] = g21;
    h.m[2][0] = g21;
    h.m[1][3] = g32;
    h.m[2][3] = g32;
    h.m[3][1] = g32;
    h.m[3][2] = g32;
    h.m[3][0] = g31;
    h.m[0][3] = g31.conj();
    h
}

/// The drive-decoupled antisymmetric combination (|2,+1> - |2,-1>)/sqrt(2).
pub fn dark_state<R: Real>() -> [Cplx<R>; 4] {
    let inv = R::one() / real::<R>(2.0).sqrt();
    [
        Cplx::new(R::zero(), R::zero()),
        Cplx::new(inv, R::zero()),
        Cplx::new(-inv, R::zero()),
        Cplx::new(R::zero(), R::zero()),
    ]
}

/// Splits a 4-component rotating-frame state into the bright sector
/// {|1,0>, (|2,+1>+|2,-1>)/sqrt2, |3,0>} and the dark amplitude.
pub fn to_bright<R: Real>(psi: &[Cplx<R>; 4]) -> ([Cplx<R>; 3], Cplx<R>) {
    let inv = R::one() / real::<R>(2.0).sqrt();
    (
        [psi[0], (psi[1] + psi[2]) * inv, psi[3]],
        (psi[1] - psi[2]) * inv,
    )
}

/// Inverse of [`to_bright`].
pub fn from_bright<R: Real>(bright: &[Cplx<R>; 3], dark: Cplx<R>) -> [Cplx<R>; 4] {
    let inv = R::one() / real::<R>(2.0).sqrt();
    [
        bright[0],
        (bright[1] + dark) * inv,
        (bright[1] - dark) * inv,
        bright[2],
    ]
}

/// Bright-sector block of [`rotating_h4_scaled`]: the exact 3×3 Hamiltonian
/// governing everything the drives couple to. The dark amplitude is frozen.
pub fn bright_h3_scaled<R: Real>(
    p: TorusPoint<R>,
    cfg: &SimConfig<R>,
    e: Enantiomer,
    alpha: R,
) -> Matrix<R, 3> {
    let k = CycleCouplings::new(cfg, e);
    let env = crate::model::envelopes(p, &cfg.drive);
    build_bright_h3(&k, &env, cfg.drive.delta, alpha)
}

pub(crate) fn build_bright_h3<R: Real>(
    k: &CycleCouplings<R>,
    env: &Envelopes<R>,
    delta: R,
    alpha: R,
) -> Matrix<R, 3> {
    let zero = R::zero();
    let sqrt2 = real::<R>(2.0).sqrt();
    let g21 = Cplx::new(-k.b4 * sqrt2 * env.e21 * alpha, zero);
    let g32 = Cplx::new(-k.a4 * sqrt2 * env.e32 * alpha, zero);
    let g31 = Cplx::new(zero, k.c4 * env.e31 * alpha);

    let mut h = Matrix::<R, 3>::zeros();
    h.m[0][0] = Cplx::new(-delta, zero);
    h.m[2][2] = Cplx::new(delta, zero);
    h.m[0][1] = g21;
    h.m[1][0] = g21;
    h.m[1][2] = g32;
    h.m[2][1] = g32;
    h.m[2][0] = g31;
    h.m[0][2] = g31.conj();
    h
}

/// Effective spin-1 Hamiltonian over the drive torus:
/// -(mu_b E21 / 2 sqrt3) Lx - (mu_a E32 / 4) Ly + (mu_c E31 / 2 sqrt3) Lz
/// - (delta/2)(L+^2 + L-^2), with the canonical spin-1 matrices and hbar = 1.
/// This is the form the band topology is computed from.
pub fn effective_h3<R: Real>(p: TorusPoint<R>, cfg: &SimConfig<R>, e: Enantiomer) -> Matrix<R, 3> {
    let (mu_a, mu_b, mu_c) = cfg.molecule.dipoles_for(e);
    let env = crate::model::envelopes(p, &cfg.drive);
    let two_sqrt3 = real::<R>(2.0) * real::<R>(3.0).sqrt();

    let hx = -(mu_b * env.e21) / two_sqrt3;
    let hy = -(mu_a * env.e32) / real::<R>(4.0);
    let hz = (mu_c * env.e31) / two_sqrt3;
    let delta = cfg.drive.delta;

    let inv_sqrt2 = R::one() / real::<R>(2.0).sqrt();
    let upper = Cplx::new(hx * inv_sqrt2, -hy * inv_sqrt2);
    let zero = R::zero();

    let mut h = Matrix::<R, 3>::zeros();
    h.m[0][0] = Cplx::new(hz, zero);
    h.m[2][2] = Cplx::new(-hz, zero);
    h.m[0][1] = upper;
    h.m[1][2] = upper;
    h.m[1][0] = upper.conj();
    h.m[2][1] = upper.conj();
    h.m[0][2] = Cplx::new(-delta, zero);
    h.m[2][0] = Cplx::new(-delta, zero);
    h
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::norm;
    use crate::model::{envelopes, SimConfig};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn cfg() -> SimConfig<f64> {
        SimConfig::propanediol()
    }

    fn random_point(rng: &mut ChaCha8Rng) -> TorusPoint<f64> {
        TorusPoint::new(
            rng.gen_range(0.0..std::f64::consts::TAU),
            rng.gen_range(0.0..std::f64::consts::TAU),
        )
    }

    #[test]
    fn lab_hamiltonian_reduces_to_diagonal_without_fields() {
        let mut c = cfg();
        c.drive.e21 = 0.0;
        c.drive.e32 = 0.0;
        c.drive.e31 = 0.0;
        let h = lab_hamiltonian(3.0e9, &c, Enantiomer::R);
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    assert_eq!(h.m[i][j].norm(), 0.0);
                }
            }
        }
        assert_eq!(h.m[0][0].re, 0.0);
        assert_eq!(h.m[1][1].re, c.molecule.eps21);
        assert_eq!(h.m[2][2].re, c.molecule.eps21);
        assert_eq!(h.m[3][3].re, c.molecule.eps31);
    }

    #[test]
    fn lab_couplings_are_m_independent() {
        let c = cfg();
        let h = lab_hamiltonian(7.7e10, &c, Enantiomer::S);
        assert_eq!(h.m[1][0], h.m[2][0]);
        assert_eq!(h.m[3][1], h.m[3][2]);
        assert!(h.hermiticity_defect() < 1e-14 * h.max_abs());
    }

    #[test]
    fn lab_spectral_radius_tracks_top_level() {
        let c = cfg();
        let h = lab_hamiltonian(2.0e11, &c, Enantiomer::R);
        let eig = h.eigh();
        let coupling_scale = 2e-8;
        assert!((eig.values[3] - c.molecule.eps31).abs() < coupling_scale);
    }

    #[test]
    fn rotating_h4_structure_at_origin() {
        let c = cfg();
        let h = rotating_h4(TorusPoint::new(0.0, 0.0), &c, Enantiomer::R);
        // sin(0) = 0 kills the 21 and 32 couplings; only the 31 coupling and
        // the +-delta diagonal survive.
        assert_eq!(h.m[0][1].norm(), 0.0);
        assert_eq!(h.m[1][3].norm(), 0.0);
        assert!(h.m[0][3].norm() > 0.0);
        assert_eq!(h.m[0][0].re, -c.drive.delta);
        assert_eq!(h.m[3][3].re, c.drive.delta);
        let expected = c.molecule.mu_c / (2.0 * 3.0_f64.sqrt()) * c.drive.e31 * (c.drive.m - 2.0);
        assert!((h.m[3][0].im - expected).abs() < 1e-24);
    }

    #[test]
    fn dark_state_is_exact_null_vector() {
        let c = cfg();
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let d = dark_state::<f64>();
        for _ in 0..100 {
            let mut cc = c;
            cc.drive.m = rng.gen_range(-3.0..3.0);
            cc.drive.delta = rng.gen_range(-1e-10..1e-10);
            let p = random_point(&mut rng);
            for e in [Enantiomer::R, Enantiomer::S] {
                let h = rotating_h4(p, &cc, e);
                let hv = h.mul_vec(&d);
                assert!(
                    norm(&hv) <= 1e-14 * h.max_abs().max(1e-300),
                    "dark state not annihilated at {p:?}"
                );
            }
        }
    }

    #[test]
    fn rotating_h4_has_zero_eigenvalue_from_dark_state() {
        let c = cfg();
        let p = TorusPoint::new(std::f64::consts::FRAC_PI_2, std::f64::consts::FRAC_PI_2);
        let eig = rotating_h4(p, &c, Enantiomer::R).eigh();
        let min_abs = eig.values.iter().map(|v| v.abs()).fold(f64::MAX, f64::min);
        assert!(min_abs <= 1e-14 * 1e-8, "no near-zero eigenvalue: {eig:?}");
    }

    #[test]
    fn effective_h3_diagonal_at_origin_with_zero_detuning() {
        let mut c = cfg();
        c.drive.delta = 0.0;
        let h = effective_h3(TorusPoint::new(0.0, 0.0), &c, Enantiomer::R);
        let expected = c.molecule.mu_c * c.drive.e31 * (c.drive.m - 2.0) / (2.0 * 3.0_f64.sqrt());
        assert!(expected < 0.0);
        assert!((h.m[0][0].re - expected).abs() < 1e-24);
        assert_eq!(h.m[1][1].norm(), 0.0);
        assert!((h.m[2][2].re + expected).abs() < 1e-24);
        for (i, j) in [(0, 1), (1, 2), (0, 2)] {
            assert_eq!(h.m[i][j].norm(), 0.0);
        }
        let eig = h.eigh();
        assert!((eig.values[0] - expected).abs() < 1e-24);
        assert!(eig.values[1].abs() < 1e-24);
        assert!((eig.values[2] + expected).abs() < 1e-24);
    }

    /// Numerical check of the basis-change claim: the spin-1 form and the
    /// bright sector of the 4×4 form have identical spectra everywhere, so
    /// rotating_h4 carries those three eigenvalues plus the dark zero.
    #[test]
    fn spectral_equivalence_h3_vs_h4() {
        let c = cfg();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let p = random_point(&mut rng);
            for e in [Enantiomer::R, Enantiomer::S] {
                let e3 = effective_h3(p, &c, e).eigh().values;
                let e4 = rotating_h4(p, &c, e).eigh().values;
                // Remove the dark-state zero from the 4x4 spectrum.
                let mut rest: Vec<f64> = e4.to_vec();
                let (zero_idx, _) = rest
                    .iter()
                    .enumerate()
                    .min_by(|(_, a), (_, b)| a.abs().partial_cmp(&b.abs()).unwrap())
                    .unwrap();
                rest.remove(zero_idx);
                let scale = e3.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
                for (a, b) in e3.iter().zip(rest.iter()) {
                    assert!(
                        (a - b).abs() <= 1e-12 * scale,
                        "spectra differ at {p:?}: {e3:?} vs {e4:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn bright_block_matches_h4_spectrum() {
        let c = cfg();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..50 {
            let p = random_point(&mut rng);
            let hb = bright_h3_scaled(p, &c, Enantiomer::R, 0.7).eigh().values;
            let h4 = rotating_h4_scaled(p, &c, Enantiomer::R, 0.7).eigh().values;
            let mut rest: Vec<f64> = h4.to_vec();
            let (zero_idx, _) = rest
                .iter()
                .enumerate()
                .min_by(|(_, a), (_, b)| a.abs().partial_cmp(&b.abs()).unwrap())
                .unwrap();
            rest.remove(zero_idx);
            for (a, b) in hb.iter().zip(rest.iter()) {
                assert!((a - b).abs() <= 1e-12 * 1e-8);
            }
        }
    }

    #[test]
    fn enantiomer_flip_negates_mu_c_term_only() {
        let c = cfg();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..20 {
            let p = random_point(&mut rng);
            let hs = effective_h3(p, &c, Enantiomer::S);
            let mut flipped = c;
            flipped.molecule.mu_c = -flipped.molecule.mu_c;
            let hr_flm = effective_h3(p, &flipped, Enantiomer::R);
            for i in 0..3 {
                for j in 0..3 {
                    assert_eq!(hs.m[i][j], hr_flm.m[i][j]);
                }
            }
        }
    }

    #[test]
    fn frame_transform_identity_and_unitarity() {
        let c = cfg();
        let u0 = frame_transform(0.0, &c);
        for k in 0..4 {
            assert_eq!(u0.phases[k], Cplx::new(1.0, 0.0));
        }
        let u = frame_transform(1.0e12, &c);
        for k in 0..4 {
            assert!((u.phases[k].norm() - 1.0).abs() < 1e-14);
        }
        // Exact by construction.
        assert_eq!(u.omega31, u.omega21 + u.omega32);
    }

    /// rotating_h4 must equal U^dag H_lab U - i U^dag dU/dt, with the second
    /// term the analytic diagonal of frame frequencies.
    #[test]
    fn rotating_frame_consistency() {
        let c = cfg();
        for &t in &[0.0, 3.33e9, 7.1e10, 2.0e11] {
            let hl = lab_hamiltonian(t, &c, Enantiomer::R);
            let u = frame_transform(t, &c);
            let eps2 = c.molecule.eps21;
            let freqs = [eps2 - u.omega21, eps2, eps2, eps2 + u.omega32];
            let p = TorusPoint::new(c.drive.omega1 * t, c.drive.omega2 * t);
            let hr = rotating_h4(p, &c, Enantiomer::R);
            for i in 0..4 {
                for j in 0..4 {
                    let mut v = u.phases[i].conj() * hl.m[i][j] * u.phases[j];
                    if i == j {
                        v -= Cplx::new(freqs[i], 0.0);
                    }
                    // Residual is dominated by rounding of the carrier
                    // arguments Omega * t (~1e4 rad at the largest t here),
                    // which enters as |coupling| * Omega t * eps.
                    assert!(
                        (v - hr.m[i][j]).norm() < 1e-11 * 1e-8,
                        "mismatch at t={t}, ({i},{j}): {v:?} vs {:?}",
                        hr.m[i][j]
                    );
                }
            }
        }
    }

    #[test]
    fn lab_expectations_transform_to_rotating_frame() {
        let c = cfg();
        let t = 4.2e10;
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let mut psi_rot = [Cplx::new(0.0, 0.0); 4];
        for a in psi_rot.iter_mut() {
            *a = Cplx::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        }
        let n = norm(&psi_rot);
        for a in psi_rot.iter_mut() {
            *a /= n;
        }
        let u = frame_transform(t, &c);
        let psi_lab = u.to_lab(&psi_rot);
        // The lab-frame dipole-interaction expectation computed directly ...
        let hl = lab_hamiltonian(t, &c, Enantiomer::R);
        let mut coupling = hl;
        for i in 0..4 {
            coupling.m[i][i] = Cplx::new(0.0, 0.0);
        }
        let direct = crate::linalg::inner(&psi_lab, &coupling.mul_vec(&psi_lab)).re;
        // ... equals the rotated-operator expectation in the rotating frame.
        let mut rotated = Matrix::<f64, 4>::zeros();
        for i in 0..4 {
            for j in 0..4 {
                rotated.m[i][j] = u.phases[i].conj() * coupling.m[i][j] * u.phases[j];
            }
        }
        let via_rot = crate::linalg::inner(&psi_rot, &rotated.mul_vec(&psi_rot)).re;
        assert!((direct - via_rot).abs() < 1e-22);
    }

    #[test]
    fn quasiperiodicity_to_machine_precision() {
        let c = cfg();
        let tau = std::f64::consts::TAU;
        let p = TorusPoint::new(1.234, 4.321);
        let shifted = TorusPoint::new(1.234 + tau, 4.321 - tau);
        let a = rotating_h4(p, &c, Enantiomer::R);
        let b = rotating_h4(shifted, &c, Enantiomer::R);
        for i in 0..4 {
            for j in 0..4 {
                assert!((a.m[i][j] - b.m[i][j]).norm() <= 8.0 * f64::EPSILON * 1e-7);
            }
        }
        let ea = effective_h3(p, &c, Enantiomer::S);
        let eb = effective_h3(shifted, &c, Enantiomer::S);
        for i in 0..3 {
            for j in 0..3 {
                assert!((ea.m[i][j] - eb.m[i][j]).norm() <= 8.0 * f64::EPSILON * 1e-7);
            }
        }
    }

    #[test]
    fn envelope_consistency_between_forms() {
        // The bright block and the spin-1 form share coefficient magnitudes.
        let c = cfg();
        let p = TorusPoint::new(0.9, 2.2);
        let env = envelopes(p, &c.drive);
        let hb = bright_h3_scaled(p, &c, Enantiomer::R, 1.0);
        let k21 = c.molecule.mu_b / (2.0 * 3.0_f64.sqrt());
        assert!((hb.m[0][1].re + k21 * env.e21).abs() < 1e-24);
        let h3 = effective_h3(p, &c, Enantiomer::R);
        // |(0,1)| of the spin-1 form = |hx - i hy| / sqrt2
        let hx = -c.molecule.mu_b * env.e21 / (2.0 * 3.0_f64.sqrt());
        let hy = -c.molecule.mu_a * env.e32 / 4.0;
        let mag = ((hx * hx + hy * hy) / 2.0).sqrt();
        assert!((h3.m[0][1].norm() - mag).abs() < 1e-24);
    }
}
