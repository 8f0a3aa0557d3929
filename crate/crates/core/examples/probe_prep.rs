//! Development probe: preparation fidelity and pumping quantization at the
//! bundled parameters.

use enantio_tfc::dynamics::{band_populations, evolve, evolve_from_band, pumping_rate};
use enantio_tfc::model::{Enantiomer, SimConfig};

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let periods: f64 = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(144.0);
    let dt: f64 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(1.0e7);
    let ramp: bool = args.get(3).map(|s| s == "ramp").unwrap_or(true);

    let mut cfg = SimConfig::<f64>::propanediol();
    cfg.sim.dt = dt;
    if args.get(4).map(|s| s == "equal").unwrap_or(false) {
        // Equalize the strongest and weakest spin-1 coefficients:
        // mu_b E21 / (2 sqrt3) == mu_c E31 / (2 sqrt3).
        cfg.drive.e31 *= cfg.molecule.mu_b * cfg.drive.e21 / (cfg.molecule.mu_c * cfg.drive.e31);
        println!("equalized couplings: e31 = {:.4e}", cfg.drive.e31);
    }
    let t_end = periods * cfg.omega2_period();

    for e in [Enantiomer::R, Enantiomer::S] {
        let t0 = std::time::Instant::now();
        let traj = if ramp {
            evolve(&cfg, e, -std::f64::consts::TAU / cfg.drive.omega_r, t_end).unwrap()
        } else {
            evolve_from_band(&cfg, e, 0, t_end).unwrap()
        };
        let pops = band_populations(&traj, &cfg);
        let at_zero = pops
            .iter()
            .min_by(|a, b| a.t.abs().partial_cmp(&b.t.abs()).unwrap())
            .unwrap();
        let last = pops.last().unwrap();
        let max_dark = pops.iter().map(|p| p.pop_dark).fold(0.0f64, f64::max);
        println!(
            "[{e}] prep: pop_L(0)={:.6} pop_M(0)={:.3e} pop_U(0)={:.3e} dark_max={:.3e}",
            at_zero.pop_l, at_zero.pop_m, at_zero.pop_u, max_dark
        );
        println!(
            "[{e}] end:  pop_L({:.0}p)={:.6} pop_M={:.3e} pop_U={:.3e} norm_err={:.3e}",
            periods, last.pop_l, last.pop_m, last.pop_u, traj.max_norm_err
        );
        for w in [21.0, 55.0, 89.0, 144.0, 233.0, 377.0, 610.0, 987.0, 1597.0] {
            if w <= periods {
                let rep = pumping_rate(&traj, &cfg, w).unwrap();
                print!("  q({w:.0})={:.4}", rep.q);
            }
        }
        println!("\n[{e}] wall: {:.1?}s steps={}", t0.elapsed().as_secs_f64(), traj.steps);
    }
}
// equalized-coupling variant selected with 4th arg "equal"
