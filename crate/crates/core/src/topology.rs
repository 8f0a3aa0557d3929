//! Adiabatic band structure over the drive torus: energies, gauge-fixed
//! eigenvectors, plaquette Berry curvature, Chern numbers, and the (m, delta)
//! phase diagram.
//!
//! Chern numbers use the lattice link-variable construction: normalized
//! overlaps between neighbouring eigenvectors define U(1) link variables, the
//! argument of the oriented plaquette product is a curvature sample in
//! (-pi, pi], and the sum over the grid is 2 pi times an exact integer. The
//! construction is gauge invariant, so the result does not depend on the
//! eigensolver's phase choices; it equals the true Chern number whenever no
//! plaquette swallows half a flux quantum, which the boundary detector flags.
//!
//! The grid starts at theta = 0, which for even N places the four
//! high-symmetry points (where the sine envelopes vanish and the curvature
//! concentrates for strongly anisotropic couplings) on plaquette corners,
//! splitting their flux four ways and keeping coarse grids admissible.

use crate::hamiltonian::effective_h3;
use crate::linalg::inner;
use crate::model::{Enantiomer, SimConfig, TorusPoint};
use crate::{real, Cplx, Real, TfcError};
use rayon::prelude::*;
use std::io::Write;

/// Instantaneous eigen-decomposition at one torus point, bands ascending.
#[derive(Clone, Debug)]
pub struct BandDecomposition<R: Real> {
    /// Energies of bands L, M, U in ascending order (a.u.).
    pub energies: [R; 3],
    /// Gauge-fixed eigenvectors; `vectors[l]` belongs to `energies[l]`.
    /// The largest-magnitude component is made real and positive.
    pub vectors: [[Cplx<R>; 3]; 3],
    /// Set when an adjacent gap is below 1e-6 of the matrix scale.
    pub near_degenerate: bool,
}

/// Bands, curvature samples, and Chern numbers over an N×N torus grid.
#[derive(Clone, Debug)]
pub struct BandData<R: Real> {
    pub n: usize,
    /// Row-major (i * n + j) energy triples at theta = 2 pi (i, j) / n.
    pub energies: Vec<[R; 3]>,
    /// Gauge-fixed eigenvectors per grid point.
    pub vectors: Vec<[[Cplx<R>; 3]; 3]>,
    /// Plaquette Berry curvature per band, dimensionless per plaquette.
    pub curvature: Vec<[R; 3]>,
    /// Chern numbers (C_L, C_M, C_U); always sums to zero.
    pub chern: [i32; 3],
    /// Minimal adjacent-band gap over the grid (a.u.).
    pub min_gap: R,
}

/// Compact result of a Chern evaluation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChernReport<R> {
    pub c_l: i32,
    pub c_m: i32,
    pub c_u: i32,
    pub min_gap: R,
    pub n: usize,
}

/// Eigen-decomposition of the effective spin-1 Hamiltonian with the band
/// gauge fixed by making the largest-magnitude component real positive.
pub fn band_decomposition<R: Real>(
    p: TorusPoint<R>,
    cfg: &SimConfig<R>,
    e: Enantiomer,
) -> BandDecomposition<R> {
    let h = effective_h3(p, cfg, e);
    let scale = h.max_abs();
    let eig = h.eigh();
    let mut vectors = eig.vectors;
    for v in vectors.iter_mut() {
        gauge_fix(v);
    }
    let gap = (eig.values[1] - eig.values[0]).min(eig.values[2] - eig.values[1]);
    BandDecomposition {
        energies: eig.values,
        vectors,
        near_degenerate: gap < real::<R>(1e-6) * scale,
    }
}

fn gauge_fix<R: Real>(v: &mut [Cplx<R>; 3]) {
    let mut idx = 0;
    let mut best = R::zero();
    for (i, c) in v.iter().enumerate() {
        let a = c.norm_sqr();
        if a > best {
            best = a;
            idx = i;
        }
    }
    let pivot = v[idx];
    let r = pivot.norm();
    if r > R::zero() {
        let phase = pivot.conj() / r;
        for c in v.iter_mut() {
            *c *= phase;
        }
    }
}

/// Full band data over the N×N grid; the Chern numbers are exact integers
/// unless a plaquette is flagged as a phase boundary.
pub fn band_data<R: Real>(
    cfg: &SimConfig<R>,
    e: Enantiomer,
    n: usize,
) -> Result<BandData<R>, TfcError> {
    if n < 8 {
        return Err(TfcError::InvalidParameters(format!(
            "torus grid N = {n} is below the minimum of 8"
        )));
    }
    let tau = R::TAU();
    let nr = real::<R>(n as f64);

    let mut energies = Vec::with_capacity(n * n);
    let mut vectors = Vec::with_capacity(n * n);
    let mut min_gap = R::max_value();
    let mut worst = (R::zero(), R::zero());
    let mut scale = R::zero();
    for i in 0..n {
        for j in 0..n {
            let p = TorusPoint::new(
                tau * real::<R>(i as f64) / nr,
                tau * real::<R>(j as f64) / nr,
            );
            let bd = band_decomposition(p, cfg, e);
            let gap =
                (bd.energies[1] - bd.energies[0]).min(bd.energies[2] - bd.energies[1]);
            if gap < min_gap {
                min_gap = gap;
                worst = (p.theta1(), p.theta2());
            }
            scale = scale.max(bd.energies[0].abs()).max(bd.energies[2].abs());
            energies.push(bd.energies);
            vectors.push(bd.vectors);
        }
    }
    // Degeneracy is judged against the grid-wide energy scale so that a
    // closing at a point where the whole matrix vanishes is still caught.
    if min_gap < real::<R>(1e-6) * scale {
        return Err(TfcError::GapClosing {
            theta1: worst.0.as_f64(),
            theta2: worst.1.as_f64(),
            detail: format!(
                "adjacent bands degenerate to {:.3e} against scale {:.3e}",
                min_gap.as_f64(),
                scale.as_f64()
            ),
        });
    }

    let idx = |i: usize, j: usize| (i % n) * n + (j % n);
    let mut curvature = vec![[R::zero(); 3]; n * n];
    let mut sums = [R::zero(); 3];
    let pi = R::PI();
    let boundary_tol = real::<R>(1e-9);

    for band in 0..3 {
        for i in 0..n {
            for j in 0..n {
                let u00 = &vectors[idx(i, j)][band];
                let u10 = &vectors[idx(i + 1, j)][band];
                let u01 = &vectors[idx(i, j + 1)][band];
                let u11 = &vectors[idx(i + 1, j + 1)][band];
                let l1 = inner(u00, u10);
                let l2 = inner(u10, u11);
                let l3 = inner(u01, u11);
                let l4 = inner(u00, u01);
                let product = l1 * l2 * l3.conj() * l4.conj();
                if product.norm() < real::<R>(1e-12) {
                    let theta = (
                        (tau * real::<R>(i as f64) / nr).as_f64(),
                        (tau * real::<R>(j as f64) / nr).as_f64(),
                    );
                    return Err(TfcError::GapClosing {
                        theta1: theta.0,
                        theta2: theta.1,
                        detail: format!("vanishing link product on band {band}"),
                    });
                }
                // Sign convention: matches F = i<d1 u|d2 u> + h.c. so that the
                // adiabatic response relations hold with these samples.
                let f = -product.im.atan2(product.re);
                if f.abs() >= pi - boundary_tol {
                    let theta = (
                        (tau * real::<R>(i as f64) / nr).as_f64(),
                        (tau * real::<R>(j as f64) / nr).as_f64(),
                    );
                    return Err(TfcError::GapClosing {
                        theta1: theta.0,
                        theta2: theta.1,
                        detail: format!(
                            "plaquette flux {:.6} within 1e-9 of pi on band {band} (phase boundary)",
                            f.as_f64()
                        ),
                    });
                }
                curvature[idx(i, j)][band] = f;
                sums[band] += f;
            }
        }
    }

    let mut chern = [0i32; 3];
    for band in 0..3 {
        let c = (sums[band] / tau).as_f64();
        let rounded = c.round();
        if (c - rounded).abs() > 1e-6 {
            return Err(TfcError::IntegratorFailure(format!(
                "lattice Chern number {c} of band {band} is not integral"
            )));
        }
        chern[band] = rounded as i32;
    }

    Ok(BandData {
        n,
        energies,
        vectors,
        curvature,
        chern,
        min_gap,
    })
}

/// Chern numbers of the three bands plus the minimal spectral gap.
pub fn chern_numbers<R: Real>(
    cfg: &SimConfig<R>,
    e: Enantiomer,
    n: usize,
) -> Result<ChernReport<R>, TfcError> {
    let data = band_data(cfg, e, n)?;
    Ok(ChernReport {
        c_l: data.chern[0],
        c_m: data.chern[1],
        c_u: data.chern[2],
        min_gap: data.min_gap,
        n,
    })
}

/// Closed-form lower-band Chern number at zero detuning:
/// C_L = -2 sgn(m) sgn(KS) for |m| < 2, zero outside. Errors within 1e-9 of
/// the phase boundaries |m| in {0, 2}.
pub fn expected_chern<R: Real>(m: R, ks_sign: i8) -> Result<i32, TfcError> {
    let am = m.abs().as_f64();
    if am <= 1e-9 || (am - 2.0).abs() <= 1e-9 {
        return Err(TfcError::PhaseBoundary(format!(
            "|m| = {am} sits on a gap-closing boundary"
        )));
    }
    if am > 2.0 {
        return Ok(0);
    }
    let sgn_m = if m > R::zero() { 1 } else { -1 };
    Ok(-2 * sgn_m * ks_sign as i32)
}

/// One cell of the (m, delta) phase diagram.
#[derive(Clone, Debug)]
pub struct PhaseCell<R> {
    pub m: R,
    pub delta: R,
    /// Chern numbers, absent on boundary cells.
    pub chern: Option<[i32; 3]>,
    /// Minimal gap when the evaluation succeeded.
    pub min_gap: Option<R>,
    pub boundary: bool,
}

/// Evaluates Chern numbers on the (m, delta) grid. Gap-closing cells become
/// boundary markers, never errors. Cells fan out over rayon workers; the
/// output is ordered row-major in (m, delta) regardless of worker count.
pub fn phase_diagram<R: Real>(
    cfg: &SimConfig<R>,
    e: Enantiomer,
    m_values: &[R],
    delta_values: &[R],
    n: usize,
) -> Vec<PhaseCell<R>> {
    let cells: Vec<(R, R)> = m_values
        .iter()
        .flat_map(|&m| delta_values.iter().map(move |&d| (m, d)))
        .collect();
    cells
        .into_par_iter()
        .map(|(m, delta)| {
            let mut c = *cfg;
            c.drive.m = m;
            c.drive.delta = delta;
            match chern_numbers(&c, e, n) {
                Ok(report) => PhaseCell {
                    m,
                    delta,
                    chern: Some([report.c_l, report.c_m, report.c_u]),
                    min_gap: Some(report.min_gap),
                    boundary: false,
                },
                Err(_) => PhaseCell {
                    m,
                    delta,
                    chern: None,
                    min_gap: None,
                    boundary: true,
                },
            }
        })
        .collect()
}

/// Default m sweep of the phase diagram: 61 points spanning [-3, 3].
pub fn default_m_sweep<R: Real>() -> Vec<R> {
    (0..61)
        .map(|i| real::<R>(-3.0) + real::<R>(0.1) * real::<R>(i as f64))
        .collect()
}

/// Default delta sweep: 21 points spanning [-g, g] with g the weakest of the
/// three amplitude-level couplings, bracketing the gap-closing ridge.
pub fn default_delta_sweep<R: Real>(cfg: &SimConfig<R>) -> Vec<R> {
    let mol = &cfg.molecule;
    let d = &cfg.drive;
    let c21 = (mol.mu_b / real::<R>(6.0).sqrt()).abs() * d.e21;
    let c32 = (mol.mu_a / (real::<R>(2.0) * real::<R>(2.0).sqrt())).abs() * d.e32;
    let c31 = (mol.mu_c / real::<R>(3.0).sqrt()).abs() * d.e31;
    let g = c21.min(c32).min(c31);
    (0..21)
        .map(|i| g * (real::<R>(i as f64) / real::<R>(10.0) - R::one()))
        .collect()
}

/// Mean of grid samples: the discrete counterpart of the normalized torus
/// integral (1/4 pi^2) d theta.
pub fn torus_average<R: Real>(samples: &[R]) -> R {
    if samples.is_empty() {
        return R::zero();
    }
    samples.iter().copied().sum::<R>() / real::<R>(samples.len() as f64)
}

/// Writes the phase-diagram CSV: `m,delta,C_L,C_M,C_U,min_gap,boundary_flag`,
/// one row per cell, boundary cells with empty Chern and gap fields.
pub fn write_phase_diagram_csv<R: Real, W: Write>(
    cells: &[PhaseCell<R>],
    mut out: W,
) -> std::io::Result<()> {
    writeln!(out, "m,delta,C_L,C_M,C_U,min_gap,boundary_flag")?;
    for cell in cells {
        match (&cell.chern, &cell.min_gap) {
            (Some(c), Some(g)) => writeln!(
                out,
                "{:e},{:e},{},{},{},{:e},0",
                cell.m.as_f64(),
                cell.delta.as_f64(),
                c[0],
                c[1],
                c[2],
                g.as_f64()
            )?,
            _ => writeln!(
                out,
                "{:e},{:e},,,,,1",
                cell.m.as_f64(),
                cell.delta.as_f64()
            )?,
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ks_product_sign;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn cfg() -> SimConfig<f64> {
        SimConfig::propanediol()
    }

    #[test]
    fn band_decomposition_sorted_orthonormal_gauge_fixed() {
        let c = cfg();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..50 {
            let p = TorusPoint::new(
                rng.gen_range(0.0..std::f64::consts::TAU),
                rng.gen_range(0.0..std::f64::consts::TAU),
            );
            let bd = band_decomposition(p, &c, Enantiomer::R);
            assert!(bd.energies[0] <= bd.energies[1] && bd.energies[1] <= bd.energies[2]);
            for a in 0..3 {
                for b in 0..3 {
                    let want = if a == b { 1.0 } else { 0.0 };
                    assert!(
                        (inner(&bd.vectors[a], &bd.vectors[b]).norm() - want).abs() < 1e-13
                    );
                }
                // Gauge: largest component real positive.
                let v = bd.vectors[a];
                let (mut best, mut idx) = (0.0, 0);
                for (i, cpt) in v.iter().enumerate() {
                    if cpt.norm_sqr() > best {
                        best = cpt.norm_sqr();
                        idx = i;
                    }
                }
                assert!(v[idx].im.abs() < 1e-15 * v[idx].re.abs().max(1e-300));
                assert!(v[idx].re > 0.0);
            }
        }
    }

    #[test]
    fn middle_band_pinned_at_zero_for_zero_detuning() {
        let mut c = cfg();
        c.drive.delta = 0.0;
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..50 {
            let p = TorusPoint::new(
                rng.gen_range(0.0..std::f64::consts::TAU),
                rng.gen_range(0.0..std::f64::consts::TAU),
            );
            let bd = band_decomposition(p, &c, Enantiomer::R);
            assert!(bd.energies[1].abs() < 1e-13 * 1e-8);
        }
    }

    #[test]
    fn chern_numbers_bundled_parameters() {
        let c = cfg();
        let r = chern_numbers(&c, Enantiomer::R, 40).unwrap();
        assert_eq!((r.c_l, r.c_m, r.c_u), (-2, 0, 2));
        let s = chern_numbers(&c, Enantiomer::S, 40).unwrap();
        assert_eq!((s.c_l, s.c_m, s.c_u), (2, 0, -2));
        assert!(r.min_gap > 0.0);
    }

    #[test]
    fn chern_numbers_stable_under_grid_refinement() {
        let c = cfg();
        let coarse = chern_numbers(&c, Enantiomer::R, 8).unwrap();
        let fine = chern_numbers(&c, Enantiomer::R, 40).unwrap();
        assert_eq!((coarse.c_l, coarse.c_m, coarse.c_u), (fine.c_l, fine.c_m, fine.c_u));
    }

    #[test]
    fn trivial_outside_critical_m() {
        let mut c = cfg();
        c.drive.m = 3.0;
        c.drive.delta = 0.0;
        let r = chern_numbers(&c, Enantiomer::R, 24).unwrap();
        assert_eq!((r.c_l, r.c_m, r.c_u), (0, 0, 0));
    }

    #[test]
    fn chern_sum_rule() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..6 {
            let mut c = cfg();
            c.drive.m = rng.gen_range(-2.8..2.8);
            if c.drive.m.abs() < 0.2 || (c.drive.m.abs() - 2.0).abs() < 0.2 {
                continue;
            }
            if let Ok(r) = chern_numbers(&c, Enantiomer::R, 16) {
                assert_eq!(r.c_l + r.c_m + r.c_u, 0);
            }
        }
    }

    #[test]
    fn expected_chern_formula() {
        assert_eq!(expected_chern(1.4, 1).unwrap(), -2);
        assert_eq!(expected_chern(-1.4, 1).unwrap(), 2);
        assert_eq!(expected_chern(1.4, -1).unwrap(), 2);
        assert_eq!(expected_chern(2.5, 1).unwrap(), 0);
        assert!(expected_chern(2.0, 1).is_err());
        assert!(expected_chern(1e-12, 1).is_err());
    }

    #[test]
    fn lattice_matches_expected_chern_at_zero_detuning() {
        for &m in &[-1.4, -0.6, 0.6, 1.4, 2.5, -2.5] {
            let mut c = cfg();
            c.drive.m = m;
            c.drive.delta = 0.0;
            for e in [Enantiomer::R, Enantiomer::S] {
                let ks = ks_product_sign(&c.molecule, &c.drive, e).unwrap();
                let want = expected_chern(m, ks).unwrap();
                let got = chern_numbers(&c, e, 24).unwrap();
                assert_eq!(got.c_l, want, "m={m}, {e}");
                assert_eq!(got.c_u, -want);
                assert_eq!(got.c_m, 0);
            }
        }
    }

    #[test]
    fn exact_boundary_is_flagged() {
        let mut c = cfg();
        c.drive.m = 2.0;
        c.drive.delta = 0.0;
        // Gap closes exactly at a grid point for even N.
        assert!(matches!(
            chern_numbers(&c, Enantiomer::R, 16),
            Err(TfcError::GapClosing { .. })
        ));
    }

    #[test]
    fn phase_diagram_small_sweep() {
        let c = cfg();
        let m_values = [-2.5, -1.0, 1.0, 2.5];
        let deltas = [0.0];
        let cells = phase_diagram(&c, Enantiomer::R, &m_values, &deltas, 16);
        let c_l: Vec<Option<i32>> = cells.iter().map(|c| c.chern.map(|x| x[0])).collect();
        assert_eq!(c_l, vec![Some(0), Some(2), Some(-2), Some(0)]);
        let cells_s = phase_diagram(&c, Enantiomer::S, &m_values, &deltas, 16);
        for (a, b) in cells.iter().zip(cells_s.iter()) {
            if let (Some(x), Some(y)) = (a.chern, b.chern) {
                assert_eq!(x[0], -y[0]);
                assert_eq!(x[2], -y[2]);
            }
        }
    }

    #[test]
    fn torus_average_basics() {
        let samples = vec![2.5f64; 100];
        assert_eq!(torus_average(&samples), 2.5);

        // Central-difference d(eps_L)/d(theta1) averages to ~0 over the torus.
        let c = cfg();
        let data = band_data(&c, Enantiomer::R, 24).unwrap();
        let n = 24;
        let idx = |i: usize, j: usize| (i % n) * n + (j % n);
        let h = std::f64::consts::TAU / n as f64;
        let mut derivs = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let up = data.energies[idx(i + 1, j)][0];
                let dn = data.energies[idx((i + n) - 1, j)][0];
                derivs.push((up - dn) / (2.0 * h));
            }
        }
        assert!(torus_average(&derivs).abs() < 1e-10);
    }

    #[test]
    fn curvature_sums_reproduce_chern() {
        let c = cfg();
        let data = band_data(&c, Enantiomer::R, 20).unwrap();
        for band in 0..3 {
            let f: Vec<f64> = data.curvature.iter().map(|row| row[band]).collect();
            let n2 = (data.n * data.n) as f64;
            let avg = torus_average(&f);
            let c_from_avg = avg * n2 / std::f64::consts::TAU;
            assert!((c_from_avg - data.chern[band] as f64).abs() < 1e-9);
        }
    }

    #[test]
    fn phase_diagram_csv_format() {
        let cells = vec![
            PhaseCell {
                m: 1.0,
                delta: 0.0,
                chern: Some([-2, 0, 2]),
                min_gap: Some(1.5e-10),
                boundary: false,
            },
            PhaseCell {
                m: 2.0,
                delta: 0.0,
                chern: None,
                min_gap: None,
                boundary: true,
            },
        ];
        let mut buf = Vec::new();
        write_phase_diagram_csv(&cells, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "m,delta,C_L,C_M,C_U,min_gap,boundary_flag");
        assert_eq!(lines.next().unwrap(), "1e0,0e0,-2,0,2,1.5e-10,0");
        assert_eq!(lines.next().unwrap(), "2e0,0e0,,,,,1");
    }
}
