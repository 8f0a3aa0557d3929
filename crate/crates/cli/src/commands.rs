//! Subcommand implementations: orchestration, file emission, manifests.

use crate::{output, CommonArgs};
use enantio_tfc::dynamics::{
    band_populations, evolve, evolve_from_band, pumping_rate, write_trajectory_csv, Trajectory,
};
use enantio_tfc::ensemble::{ensemble_pumping, shot_noise_limit, EnsembleSpec};
use enantio_tfc::hamiltonian::carrier_frequencies;
use enantio_tfc::model::{ensure_valid, Enantiomer, SimConfig};
use enantio_tfc::spectrum::{
    chern_from_spectrum, difference_spectrum, fibonacci_window, sideband_powers, spectrum_svg,
    write_spectrum_csv, SidebandSet,
};
use enantio_tfc::topology::{
    chern_numbers, default_delta_sweep, default_m_sweep, phase_diagram, write_phase_diagram_csv,
};
use enantio_tfc::TfcError;
use std::fs;
use std::path::Path;
use std::time::Instant;

fn write_file(dir: &Path, name: &str, contents: &[u8]) -> Result<(), TfcError> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join(name), contents)?;
    Ok(())
}

pub fn cmd_chern(
    common: &CommonArgs,
    m: Option<f64>,
    delta: Option<f64>,
) -> Result<(), TfcError> {
    let start = Instant::now();
    let mut cfg = crate::load_config(common)?;
    if let Some(m) = m {
        cfg.drive.m = m;
    }
    if let Some(d) = delta {
        cfg.drive.delta = d;
    }
    ensure_valid(&cfg)?;

    let mut csv = String::from("enantiomer,N,C_L,C_M,C_U,min_gap\n");
    let mut notes = Vec::new();
    for e in cfg.sim.enantiomer.list() {
        let report = chern_numbers(&cfg, e, cfg.sim.grid_n)?;
        csv.push_str(&format!(
            "{e},{},{},{},{},{:e}\n",
            report.n, report.c_l, report.c_m, report.c_u, report.min_gap
        ));
        notes.push((format!("c_l_{e}"), report.c_l.to_string()));
    }
    write_file(&common.out, "chern.csv", csv.as_bytes())?;
    output::write_manifest(
        &common.out,
        "chern",
        &cfg,
        &["chern.csv"],
        &notes,
        start.elapsed().as_secs_f64(),
        0,
    )
}

fn parse_range(spec: &str) -> Result<Vec<f64>, TfcError> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(TfcError::ConfigParse(format!(
            "range must be MIN:MAX:COUNT, got '{spec}'"
        )));
    }
    let min: f64 = parts[0]
        .parse()
        .map_err(|_| TfcError::ConfigParse(format!("bad range min '{}'", parts[0])))?;
    let max: f64 = parts[1]
        .parse()
        .map_err(|_| TfcError::ConfigParse(format!("bad range max '{}'", parts[1])))?;
    let count: usize = parts[2]
        .parse()
        .map_err(|_| TfcError::ConfigParse(format!("bad range count '{}'", parts[2])))?;
    if count < 1 {
        return Err(TfcError::ConfigParse("range count must be >= 1".into()));
    }
    if count == 1 {
        return Ok(vec![min]);
    }
    Ok((0..count)
        .map(|i| min + (max - min) * i as f64 / (count - 1) as f64)
        .collect())
}

pub fn cmd_phase_diagram(
    common: &CommonArgs,
    m_range: Option<&str>,
    delta_range: Option<&str>,
) -> Result<(), TfcError> {
    let start = Instant::now();
    let cfg = crate::load_config(common)?;
    ensure_valid(&cfg)?;
    let m_values = match m_range {
        Some(spec) => parse_range(spec)?,
        None => default_m_sweep(),
    };
    let delta_values = match delta_range {
        Some(spec) => parse_range(spec)?,
        None => default_delta_sweep(&cfg),
    };

    let mut outputs: Vec<String> = Vec::new();
    let mut notes = Vec::new();
    for e in cfg.sim.enantiomer.list() {
        let cells = phase_diagram(&cfg, e, &m_values, &delta_values, cfg.sim.grid_n);
        let mut buf = Vec::new();
        write_phase_diagram_csv(&cells, &mut buf)?;
        let name = format!("phase_diagram_{e}.csv");
        write_file(&common.out, &name, &buf)?;
        if common.plot {
            let svg = output::phase_diagram_svg(&cells, &m_values, &delta_values);
            let svg_name = format!("phase_diagram_{e}.svg");
            write_file(&common.out, &svg_name, svg.as_bytes())?;
            outputs.push(svg_name);
        }
        let boundaries = cells.iter().filter(|c| c.boundary).count();
        notes.push((format!("boundary_cells_{e}"), boundaries.to_string()));
        outputs.push(name);
    }
    let refs: Vec<&str> = outputs.iter().map(|s| s.as_str()).collect();
    output::write_manifest(
        &common.out,
        "phase-diagram",
        &cfg,
        &refs,
        &notes,
        start.elapsed().as_secs_f64(),
        0,
    )
}

fn run_trajectory(
    cfg: &SimConfig<f64>,
    e: Enantiomer,
    ramp: bool,
) -> Result<Trajectory<f64>, TfcError> {
    let t_end = cfg.sim.tstar_periods * cfg.omega2_period();
    if ramp {
        evolve(cfg, e, -std::f64::consts::TAU / cfg.drive.omega_r, t_end)
    } else {
        evolve_from_band(cfg, e, 0, t_end)
    }
}

/// Runs the requested enantiomers' trajectories, in parallel when both.
fn run_trajectories(
    cfg: &SimConfig<f64>,
    ramp: bool,
) -> Result<Vec<Trajectory<f64>>, TfcError> {
    let list = cfg.sim.enantiomer.list();
    if list.len() == 2 {
        let (a, b) = rayon::join(
            || run_trajectory(cfg, list[0], ramp),
            || run_trajectory(cfg, list[1], ramp),
        );
        Ok(vec![a?, b?])
    } else {
        Ok(vec![run_trajectory(cfg, list[0], ramp)?])
    }
}

pub fn cmd_dynamics(
    common: &CommonArgs,
    ramp: &str,
    csv_stride: usize,
) -> Result<(), TfcError> {
    let start = Instant::now();
    let mut cfg = crate::load_config(common)?;
    let ramp_on = match ramp {
        "on" => true,
        "off" => false,
        other => {
            return Err(TfcError::ConfigParse(format!(
                "--ramp must be on or off, got '{other}'"
            )))
        }
    };
    cfg.sim.ramp = ramp_on;
    ensure_valid(&cfg)?;

    let trajectories = run_trajectories(&cfg, ramp_on)?;
    let mut outputs = Vec::new();
    let mut notes = Vec::new();
    let mut pumping_csv =
        String::from("enantiomer,window_periods,window_time_au,P_w1_au,P_w2_au,P_2to1_au,q\n");
    let mut steps = 0;
    for traj in &trajectories {
        let e = traj.enantiomer;
        steps += traj.steps;
        let mut buf = Vec::new();
        write_trajectory_csv(traj, &cfg, csv_stride, &mut buf)?;
        let name = format!("trajectory_{e}.csv");
        write_file(&common.out, &name, &buf)?;
        outputs.push(name);

        let mut windows = vec![cfg.sim.tstar_periods];
        if let Some(fib) = fibonacci_window(cfg.sim.tstar_periods) {
            if (fib as f64) < cfg.sim.tstar_periods {
                windows.push(fib as f64);
            }
        }
        for w in windows {
            let report = pumping_rate(traj, &cfg, w)?;
            pumping_csv.push_str(&format!(
                "{e},{:e},{:e},{:e},{:e},{:e},{:e}\n",
                report.window_periods,
                report.window_time,
                report.p_omega1,
                report.p_omega2,
                report.p_2to1,
                report.q
            ));
            notes.push((format!("q_{e}_{}", w as u64), format!("{:.6}", report.q)));
        }
        let pops = band_populations(traj, &cfg);
        if let Some(at_zero) = pops
            .iter()
            .min_by(|a, b| a.t.abs().partial_cmp(&b.t.abs()).unwrap())
        {
            notes.push((format!("pop_L_at_zero_{e}"), format!("{:.6}", at_zero.pop_l)));
        }
        notes.push((format!("max_norm_err_{e}"), format!("{:.3e}", traj.max_norm_err)));
    }
    write_file(&common.out, "pumping.csv", pumping_csv.as_bytes())?;
    outputs.push("pumping.csv".into());
    let refs: Vec<&str> = outputs.iter().map(|s| s.as_str()).collect();
    output::write_manifest(
        &common.out,
        "dynamics",
        &cfg,
        &refs,
        &notes,
        start.elapsed().as_secs_f64(),
        steps,
    )
}

pub fn cmd_spectrum(common: &CommonArgs, window: Option<f64>) -> Result<(), TfcError> {
    let start = Instant::now();
    let cfg = crate::load_config(common)?;
    ensure_valid(&cfg)?;

    let trajectories = run_trajectories(&cfg, cfg.sim.ramp)?;
    let steps = trajectories.iter().map(|t| t.steps).sum();
    let mut sets: Vec<SidebandSet<f64>> = Vec::new();
    for traj in &trajectories {
        sets.push(sideband_powers(traj, &cfg, window)?);
    }

    let mut notes = Vec::new();
    for set in &sets {
        let (q1, q2) = chern_from_spectrum(set, &cfg)?;
        notes.push((format!("q1_{}", set.enantiomer), format!("{:.6}", q1)));
        notes.push((format!("q2_{}", set.enantiomer), format!("{:.6}", q2)));
        if set.fibonacci_warning {
            notes.push((
                format!("window_warning_{}", set.enantiomer),
                format!(
                    "window of {} periods is not a Fibonacci number",
                    set.window_periods
                ),
            ));
        }
    }

    let mut outputs = Vec::new();
    let mut buf = Vec::new();
    match sets.len() {
        2 => {
            let (r, s) = if sets[0].enantiomer == Enantiomer::R {
                (&sets[0], &sets[1])
            } else {
                (&sets[1], &sets[0])
            };
            write_spectrum_csv(r, Some(s), &mut buf)?;
            if common.plot {
                let rows = difference_spectrum(r, s)?;
                let svg = spectrum_svg(&rows);
                write_file(&common.out, "spectrum.svg", svg.as_bytes())?;
                outputs.push("spectrum.svg".to_string());
            }
        }
        _ => write_spectrum_csv(&sets[0], None, &mut buf)?,
    }
    write_file(&common.out, "spectrum.csv", &buf)?;
    outputs.push("spectrum.csv".to_string());

    let refs: Vec<&str> = outputs.iter().map(|s| s.as_str()).collect();
    output::write_manifest(
        &common.out,
        "spectrum",
        &cfg,
        &refs,
        &notes,
        start.elapsed().as_secs_f64(),
        steps,
    )
}

pub fn cmd_ensemble(
    common: &CommonArgs,
    nr: f64,
    ns: f64,
    beam_area_cm2: f64,
) -> Result<(), TfcError> {
    let start = Instant::now();
    let cfg = crate::load_config(common)?;
    ensure_valid(&cfg)?;
    if nr < 0.0 || ns < 0.0 || nr + ns == 0.0 {
        return Err(TfcError::InvalidParameters(
            "molecule counts must be non-negative and not both zero".into(),
        ));
    }

    let c_l_r = chern_numbers(&cfg, Enantiomer::R, cfg.sim.grid_n)?.c_l;
    let spec = EnsembleSpec {
        n_r: nr,
        n_s: ns,
        beam_area_m2: beam_area_cm2 * 1e-4,
        t_star: cfg.sim.tstar_periods * cfg.omega2_period(),
    };
    let pumping = ensemble_pumping(&spec, c_l_r, &cfg.drive);

    // Per-line powers for the shot-noise estimate come from a single-molecule
    // R run. The simulated window is capped at 233 periods unless the user
    // asks for more; line powers are averages, so the photon budget below
    // still uses the full t_star.
    let mut sim_cfg = cfg;
    if common.tstar_periods.is_none() {
        sim_cfg.sim.tstar_periods = sim_cfg.sim.tstar_periods.min(233.0);
    }
    let traj = run_trajectory(&sim_cfg, Enantiomer::R, sim_cfg.sim.ramp)?;
    let lines = sideband_powers(&traj, &sim_cfg, None)?;
    let (omega21, _, _) = carrier_frequencies(&cfg);
    let noise = shot_noise_limit(&spec, &cfg.drive, omega21, &lines)?;

    let verdict = if pumping.ee > noise.min_detectable_ee {
        "above-threshold"
    } else {
        "below-threshold"
    };

    let text = format!(
        "ensemble pumping report (estimate)\n\
         ==================================\n\
         N_R                      = {nr:e}\n\
         N_S                      = {ns:e}\n\
         beam area                = {beam_area_cm2} cm^2\n\
         t*                       = {:e} a.u. ({} omega_2 periods)\n\
         C_L^R                    = {c_l_r}\n\
         P_2to1                   = {:e} a.u.\n\
         enantiomeric excess      = {:e}\n\
         chirality sign           = {}\n\
         carrier photon count N   = {:e}\n\
         shot noise sqrt(N)       = {:e}\n\
         min photons per molecule = {:e}\n\
         min detectable |N_R-N_S| = {:e}\n\
         as %% of 1 mL at 1 uM    = {:e}\n\
         verdict                  = {verdict}\n",
        spec.t_star,
        cfg.sim.tstar_periods,
        pumping.power,
        pumping.ee,
        pumping.chirality,
        noise.photon_count,
        noise.shot_noise,
        noise.per_molecule_photons,
        noise.min_detectable_ee,
        noise.ee_percent_of_1ml_1um,
    );
    let csv = format!(
        "n_r,n_s,beam_area_cm2,t_star_au,c_l_r,p_2to1_au,ee,chirality,photon_count,shot_noise,per_molecule_photons,min_detectable_ee,ee_percent_1ml_1um,verdict\n\
         {nr:e},{ns:e},{beam_area_cm2:e},{:e},{c_l_r},{:e},{:e},{},{:e},{:e},{:e},{:e},{:e},{verdict}\n",
        spec.t_star,
        pumping.power,
        pumping.ee,
        pumping.chirality,
        noise.photon_count,
        noise.shot_noise,
        noise.per_molecule_photons,
        noise.min_detectable_ee,
        noise.ee_percent_of_1ml_1um,
    );
    write_file(&common.out, "ensemble.txt", text.as_bytes())?;
    write_file(&common.out, "ensemble.csv", csv.as_bytes())?;
    print!("{text}");

    output::write_manifest(
        &common.out,
        "ensemble",
        &cfg,
        &["ensemble.txt", "ensemble.csv"],
        &[
            ("verdict".into(), verdict.into()),
            ("c_l_r".into(), c_l_r.to_string()),
        ],
        start.elapsed().as_secs_f64(),
        traj.steps,
    )
}
