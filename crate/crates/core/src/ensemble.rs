//! Ensemble enantiomeric-excess observable and the shot-noise detection
//! limit.
//!
//! The pumping rate of a mixed ensemble is the single-molecule quantized
//! rate times (N_R - N_S): every chemistry-specific scale drops out and only
//! the excess and the handedness survive. The shot-noise estimator is an
//! order-of-magnitude reconstruction from textbook photon counting; its
//! outputs are labelled estimates, not calibrated predictions.

use crate::model::DriveParams;
use crate::spectrum::SidebandSet;
use crate::{real, Real, TfcError};

/// Speed of light in atomic units (1/alpha).
const C_AU: f64 = 137.035_999_084;
/// Bohr radius in meters.
const BOHR_M: f64 = 5.291_772_109_03e-11;
/// Molecule count of 1 mL of a 1 uM solution.
const MOLECULES_1ML_1UM: f64 = 6.022_140_76e14;

/// An ensemble of N_R and N_S molecules probed by one beam for t_star.
#[derive(Clone, Copy, Debug)]
pub struct EnsembleSpec<R> {
    pub n_r: R,
    pub n_s: R,
    /// Beam cross-section (m^2).
    pub beam_area_m2: R,
    /// Averaging interval (a.u. time).
    pub t_star: R,
}

/// Ensemble pumping rate and the excess it reveals.
#[derive(Clone, Copy, Debug)]
pub struct EnsembleReport<R> {
    /// P_2to1 = hbar w1 w2 C_L^R (N_R - N_S) / 2 pi (a.u. power).
    pub power: R,
    /// Enantiomeric excess |N_R - N_S|.
    pub ee: R,
    /// sgn(N_R - N_S): +1 R-rich, -1 S-rich, 0 racemic.
    pub chirality: i8,
}

/// Expected ensemble pumping rate for a lower-band-prepared ensemble, given
/// the R-species lower-band Chern number.
pub fn ensemble_pumping<R: Real>(
    spec: &EnsembleSpec<R>,
    c_l_r: i32,
    drive: &DriveParams<R>,
) -> EnsembleReport<R> {
    let excess = spec.n_r - spec.n_s;
    let power = drive.omega1 * drive.omega2 * real::<R>(c_l_r as f64) * excess / R::TAU();
    EnsembleReport {
        power,
        ee: excess.abs(),
        chirality: if excess > R::zero() {
            1
        } else if excess < R::zero() {
            -1
        } else {
            0
        },
    }
}

/// Shot-noise detectability estimate.
#[derive(Clone, Copy, Debug)]
pub struct ShotNoiseReport<R> {
    /// Photons delivered by the strongest carrier over t_star.
    pub photon_count: R,
    /// sqrt(N), the photon-counting noise.
    pub shot_noise: R,
    /// Smallest per-molecule sideband photon change over t_star
    /// (min over the eight lines of |P t_star / Omega_line|).
    pub per_molecule_photons: R,
    /// Minimal detectable |N_R - N_S| = sqrt(N) / per-molecule change.
    pub min_detectable_ee: R,
    /// The threshold as a percentage of 1 mL of a 1 uM solution.
    pub ee_percent_of_1ml_1um: R,
}

/// Estimates the shot-noise detection limit from the single-molecule
/// sideband powers.
///
/// The photon budget uses the strongest carrier amplitude (the 21 branch)
/// with intensity eps0 c E^2 / 2 and the 21 carrier frequency; `carrier_ref`
/// is that frequency in a.u.
pub fn shot_noise_limit<R: Real>(
    spec: &EnsembleSpec<R>,
    drive: &DriveParams<R>,
    carrier_ref: R,
    lines: &SidebandSet<R>,
) -> Result<ShotNoiseReport<R>, TfcError> {
    if drive.e21 <= R::zero() {
        return Err(TfcError::InvalidParameters(
            "shot noise undefined for a vanishing field".into(),
        ));
    }
    if spec.beam_area_m2 <= R::zero() || spec.t_star <= R::zero() {
        return Err(TfcError::InvalidParameters(
            "beam area and t_star must be positive".into(),
        ));
    }
    // I = eps0 c E^2 / 2 in atomic units (eps0 = 1/4pi): c E^2 / 8 pi.
    let intensity =
        real::<R>(C_AU) * drive.e21 * drive.e21 / (real::<R>(8.0) * R::PI());
    let area_au = spec.beam_area_m2 / real::<R>(BOHR_M * BOHR_M);
    let photon_count = intensity * area_au * spec.t_star / carrier_ref;
    let shot_noise = photon_count.sqrt();

    let per_molecule = lines
        .lines
        .iter()
        .map(|l| (l.p_av * spec.t_star / l.frequency).abs())
        .fold(R::max_value(), |a, b| a.min(b));
    if per_molecule == R::zero() {
        return Err(TfcError::InvalidParameters(
            "per-molecule sideband photon change vanishes; no detectable signal".into(),
        ));
    }

    let min_detectable_ee = shot_noise / per_molecule;
    Ok(ShotNoiseReport {
        photon_count,
        shot_noise,
        per_molecule_photons: per_molecule,
        min_detectable_ee,
        ee_percent_of_1ml_1um: min_detectable_ee / real::<R>(MOLECULES_1ML_1UM)
            * real::<R>(100.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::SimConfig;

    fn spec(n_r: f64, n_s: f64) -> EnsembleSpec<f64> {
        let cfg = SimConfig::<f64>::propanediol();
        EnsembleSpec {
            n_r,
            n_s,
            beam_area_m2: 1e-4,
            t_star: 2000.0 * cfg.omega2_period(),
        }
    }

    #[test]
    fn racemic_mixture_gives_exact_zero() {
        let cfg = SimConfig::<f64>::propanediol();
        let r = ensemble_pumping(&spec(1e8, 1e8), -2, &cfg.drive);
        assert_eq!(r.power, 0.0);
        assert_eq!(r.ee, 0.0);
        assert_eq!(r.chirality, 0);
    }

    #[test]
    fn unit_excess_matches_closed_form() {
        let cfg = SimConfig::<f64>::propanediol();
        let r = ensemble_pumping(&spec(1.0, 0.0), -2, &cfg.drive);
        let expect = -cfg.drive.omega1 * cfg.drive.omega2 / std::f64::consts::PI;
        assert!((r.power - expect).abs() <= 1e-18 * expect.abs());
        assert_eq!(r.chirality, 1);
    }

    #[test]
    fn pumping_is_linear_and_odd() {
        let cfg = SimConfig::<f64>::propanediol();
        let single = ensemble_pumping(&spec(2.0e7, 1.0e7), -2, &cfg.drive);
        let double = ensemble_pumping(&spec(3.0e7, 1.0e7), -2, &cfg.drive);
        assert!((double.power - 2.0 * single.power).abs() <= 1e-12 * single.power.abs());
        let swapped = ensemble_pumping(&spec(1.0e7, 2.0e7), -2, &cfg.drive);
        assert_eq!(swapped.power, -single.power);
        assert_eq!(swapped.ee, single.ee);
        assert_eq!(swapped.chirality, -single.chirality);
    }

    #[test]
    fn threshold_scales_as_inverse_sqrt_time() {
        // With fixed line powers the photon change grows linearly in t_star
        // and the noise as sqrt(t_star), so the threshold falls as
        // 1/sqrt(t_star).
        use crate::dynamics::{evolve_from_band, Trajectory};
        use crate::model::Enantiomer;
        use crate::spectrum::sideband_powers;

        let mut cfg = SimConfig::<f64>::propanediol();
        cfg.drive.e21 = 0.0;
        cfg.drive.e32 = 0.0;
        cfg.drive.e31 = 0.0;
        let traj: Trajectory<f64> =
            evolve_from_band(&cfg, Enantiomer::R, 0, 145.0 * cfg.omega2_period()).unwrap();
        let mut set = sideband_powers(&traj, &cfg, Some(144.0)).unwrap();
        for l in set.lines.iter_mut() {
            l.p_av = 1e-22; // synthetic uniform line power
        }
        let drive = SimConfig::<f64>::propanediol().drive;
        let s1 = spec(0.0, 0.0);
        let mut s4 = s1;
        s4.t_star *= 4.0;
        let r1 = shot_noise_limit(&s1, &drive, 4.4e-8, &set).unwrap();
        let r4 = shot_noise_limit(&s4, &drive, 4.4e-8, &set).unwrap();
        let ratio = r1.min_detectable_ee / r4.min_detectable_ee;
        assert!((ratio - 2.0).abs() < 1e-9, "ratio {ratio}");
    }
}
