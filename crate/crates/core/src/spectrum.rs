//! Lab-frame sideband power spectrum and the Chern number extracted from it.
//!
//! The modulated drives carry their envelope structure into the lab frame:
//! the sine-modulated 21 and 32 fields split into sidebands at the carrier
//! plus/minus the respective modulation tone, and the 31 field (modulated by
//! both cosines) contributes sidebands at both tones, eight physical lines
//! in total. The average power flowing at each line is obtained by lock-in
//! demodulation of the slow rotating-frame coherences against e^{+-i w_k t};
//! the microwave carriers never need to be sampled because the frame
//! transform supplies their phases analytically, and the carrier factors
//! cancel inside every line's power formula.

use crate::dynamics::{Carrier, Tone, Trajectory, LINE_ORDER};
use crate::hamiltonian::carrier_frequencies;
use crate::model::{Enantiomer, SimConfig};
use crate::{real, Cplx, Real, TfcError};
use std::io::Write;

/// One sideband line of the driving-field power spectrum.
#[derive(Clone, Copy, Debug)]
pub struct SidebandLine<R> {
    pub carrier: Carrier,
    pub tone: Tone,
    /// +1 for the upper sideband (carrier + tone), -1 for the lower.
    pub sign: i8,
    /// Absolute frequency Omega_ij +- omega_k (a.u.).
    pub frequency: R,
    /// Time-averaged power absorbed by the molecule at this line (a.u.).
    pub p_av: R,
}

impl<R: Real> SidebandLine<R> {
    pub fn tag(&self) -> String {
        let k = match self.tone {
            Tone::W1 => "w1",
            Tone::W2 => "w2",
        };
        format!("{}{}", if self.sign > 0 { "+" } else { "-" }, k)
    }
}

/// The eight lines of one run plus averaging metadata.
#[derive(Clone, Debug)]
pub struct SidebandSet<R: Real> {
    pub lines: Vec<SidebandLine<R>>,
    pub enantiomer: Enantiomer,
    pub window_periods: R,
    pub window_time: R,
    /// Set when the averaging window is not an integer Fibonacci number of
    /// omega_2 periods, which degrades quasiperiodic averaging.
    pub fibonacci_warning: bool,
}

const FIBONACCI: [u64; 17] = [
    1, 2, 3, 5, 8, 13, 21, 34, 55, 89, 144, 233, 377, 610, 987, 1597, 2584,
];

/// Largest Fibonacci number at or below `periods`, if any.
pub fn fibonacci_window(periods: f64) -> Option<u64> {
    FIBONACCI.iter().rev().find(|&&f| (f as f64) <= periods).copied()
}

fn is_fibonacci(periods: f64) -> bool {
    FIBONACCI.iter().any(|&f| (periods - f as f64).abs() < 1e-9)
}

/// Time-averaged power at the eight sideband lines over `window_periods`
/// omega_2 periods (defaulting to the largest Fibonacci window that fits the
/// trajectory). Requires at least 144 periods of steady drive.
pub fn sideband_powers<R: Real>(
    traj: &Trajectory<R>,
    cfg: &SimConfig<R>,
    window_periods: Option<R>,
) -> Result<SidebandSet<R>, TfcError> {
    let period = cfg.omega2_period();
    let available = traj.t_end / period;
    let requested = match window_periods {
        Some(w) => w.as_f64(),
        None => fibonacci_window(available.as_f64()).unwrap_or(0) as f64,
    };
    if requested < 144.0 {
        return Err(TfcError::WindowTooShort(format!(
            "sideband demodulation needs at least 144 omega_2 periods, got {requested}"
        )));
    }
    if requested > available.as_f64() + 1e-9 {
        return Err(TfcError::WindowTooShort(format!(
            "trajectory covers {available} periods, window wants {requested}"
        )));
    }
    let fibonacci_warning = !is_fibonacci(requested);

    let t_w = real::<R>(requested) * period;
    let s = traj.sample_at(t_w);
    let t = s.t;

    let (mu_a, mu_b, mu_c) = cfg.molecule.dipoles_for(traj.enantiomer);
    let (omega21, omega32, omega31) = carrier_frequencies(cfg);
    let d = &cfg.drive;

    // Line amplitudes A such that P = Omega_line * 2 Im(A * D), D the
    // normalized demodulation integral. The sine-modulated envelopes flip
    // the amplitude sign between their two sidebands; the cosine-modulated
    // 31 envelope does not.
    let sqrt6 = real::<R>(6.0).sqrt();
    let sqrt3 = real::<R>(3.0).sqrt();
    let sqrt2 = real::<R>(2.0).sqrt();
    let a21 = d.e21 * mu_b / (real::<R>(4.0) * sqrt6);
    let a32 = d.e32 * mu_a / (real::<R>(8.0) * sqrt2);
    let a31 = d.e31 * mu_c / (real::<R>(4.0) * sqrt3);
    let zero = R::zero();
    let amplitudes: [Cplx<R>; 8] = [
        Cplx::new(zero, -a21),
        Cplx::new(zero, a21),
        Cplx::new(zero, -a32),
        Cplx::new(zero, a32),
        Cplx::new(zero, -a31),
        Cplx::new(zero, -a31),
        Cplx::new(zero, -a31),
        Cplx::new(zero, -a31),
    ];

    let carrier_freq = |c: Carrier| match c {
        Carrier::C21 => omega21,
        Carrier::C32 => omega32,
        Carrier::C31 => omega31,
    };
    let tone_freq = |k: Tone| match k {
        Tone::W1 => d.omega1,
        Tone::W2 => d.omega2,
    };

    let two = real::<R>(2.0);
    let lines = LINE_ORDER
        .iter()
        .zip(amplitudes.iter())
        .enumerate()
        .map(|(idx, (&(carrier, tone, sign), &a))| {
            let freq =
                carrier_freq(carrier) + real::<R>(sign as f64) * tone_freq(tone);
            let d_avg = s.demod[idx] / t;
            let p_av = freq * two * (a * d_avg).im;
            SidebandLine {
                carrier,
                tone,
                sign,
                frequency: freq,
                p_av,
            }
        })
        .collect();

    Ok(SidebandSet {
        lines,
        enantiomer: traj.enantiomer,
        window_periods: real(requested),
        window_time: t,
        fibonacci_warning,
    })
}

fn find_line<R: Real>(
    set: &SidebandSet<R>,
    carrier: Carrier,
    tone: Tone,
    sign: i8,
) -> Result<&SidebandLine<R>, TfcError> {
    set.lines
        .iter()
        .find(|l| l.carrier == carrier && l.tone == tone && l.sign == sign)
        .ok_or_else(|| {
            TfcError::MissingLine(format!(
                "carrier {carrier} sideband {}{}",
                if sign > 0 { "+" } else { "-" },
                match tone {
                    Tone::W1 => "w1",
                    Tone::W2 => "w2",
                }
            ))
        })
}

/// Chern-number quantizations (q1, q2) extracted from the photon-rate
/// combinations of the sideband lines:
/// P(omega_1)/omega_1 from the 21 and 31 lines at +-omega_1, and
/// P(omega_2)/omega_2 from the 32 and 31 lines at +-omega_2; each scaled by
/// 2 pi / omega_j. For a lower-band state q1 = -C_L and q2 = +C_L.
pub fn chern_from_spectrum<R: Real>(
    set: &SidebandSet<R>,
    cfg: &SimConfig<R>,
) -> Result<(R, R), TfcError> {
    let rate = |l: &SidebandLine<R>| l.p_av / l.frequency;
    let sum1 = rate(find_line(set, Carrier::C21, Tone::W1, 1)?)
        - rate(find_line(set, Carrier::C21, Tone::W1, -1)?)
        + rate(find_line(set, Carrier::C31, Tone::W1, 1)?)
        - rate(find_line(set, Carrier::C31, Tone::W1, -1)?);
    let sum2 = rate(find_line(set, Carrier::C32, Tone::W2, 1)?)
        - rate(find_line(set, Carrier::C32, Tone::W2, -1)?)
        + rate(find_line(set, Carrier::C31, Tone::W2, 1)?)
        - rate(find_line(set, Carrier::C31, Tone::W2, -1)?);
    let tau = R::TAU();
    Ok((
        tau * sum1 / cfg.drive.omega2,
        tau * sum2 / cfg.drive.omega1,
    ))
}

/// One row of the R vs S difference spectrum.
#[derive(Clone, Copy, Debug)]
pub struct DiffLine<R> {
    pub carrier: Carrier,
    pub tone: Tone,
    pub sign: i8,
    pub frequency: R,
    pub p_r: R,
    pub p_s: R,
    pub diff: R,
}

/// Frequency-aligned merge of an R and an S line set; the `diff` column is
/// the enantioselective observable. Errors when the sets do not come from
/// identical drive configurations (mismatched line frequencies).
pub fn difference_spectrum<R: Real>(
    lines_r: &SidebandSet<R>,
    lines_s: &SidebandSet<R>,
) -> Result<Vec<DiffLine<R>>, TfcError> {
    let mut out = Vec::with_capacity(8);
    for &(carrier, tone, sign) in LINE_ORDER.iter() {
        let lr = find_line(lines_r, carrier, tone, sign)?;
        let ls = find_line(lines_s, carrier, tone, sign)?;
        let scale = lr.frequency.abs().max(ls.frequency.abs());
        if (lr.frequency - ls.frequency).abs() > real::<R>(1e-12) * scale {
            return Err(TfcError::MismatchedRuns(format!(
                "line {carrier}{} at {:.6e} vs {:.6e} a.u.",
                lr.tag(),
                lr.frequency.as_f64(),
                ls.frequency.as_f64()
            )));
        }
        out.push(DiffLine {
            carrier,
            tone,
            sign,
            frequency: lr.frequency,
            p_r: lr.p_av,
            p_s: ls.p_av,
            diff: lr.p_av - ls.p_av,
        });
    }
    Ok(out)
}

/// Writes the sideband CSV. With both enantiomers:
/// `carrier,sideband,frequency_au,P_av_R_au,P_av_S_au,diff_au`; with a single
/// run the S and difference columns are omitted.
pub fn write_spectrum_csv<R: Real, W: Write>(
    lines_r: &SidebandSet<R>,
    lines_s: Option<&SidebandSet<R>>,
    mut out: W,
) -> Result<(), TfcError> {
    match lines_s {
        Some(s) => {
            let rows = difference_spectrum(lines_r, s)?;
            writeln!(out, "carrier,sideband,frequency_au,P_av_R_au,P_av_S_au,diff_au")?;
            for row in rows {
                writeln!(
                    out,
                    "{},{}{},{:e},{:e},{:e},{:e}",
                    row.carrier,
                    if row.sign > 0 { "+" } else { "-" },
                    match row.tone {
                        Tone::W1 => "w1",
                        Tone::W2 => "w2",
                    },
                    row.frequency.as_f64(),
                    row.p_r.as_f64(),
                    row.p_s.as_f64(),
                    row.diff.as_f64()
                )?;
            }
        }
        None => {
            writeln!(out, "carrier,sideband,frequency_au,P_av_au")?;
            for l in &lines_r.lines {
                writeln!(
                    out,
                    "{},{},{:e},{:e}",
                    l.carrier,
                    l.tag(),
                    l.frequency.as_f64(),
                    l.p_av.as_f64()
                )?;
            }
        }
    }
    Ok(())
}

/// Minimal stem plot of the eight lines (R and S overlaid) as an SVG string.
pub fn spectrum_svg<R: Real>(rows: &[DiffLine<R>]) -> String {
    let width = 640.0;
    let height = 360.0;
    let margin = 50.0;
    let fmax = rows
        .iter()
        .map(|r| r.frequency.as_f64())
        .fold(f64::MIN, f64::max);
    let fmin = rows
        .iter()
        .map(|r| r.frequency.as_f64())
        .fold(f64::MAX, f64::min);
    let pmax = rows
        .iter()
        .flat_map(|r| [r.p_r.as_f64().abs(), r.p_s.as_f64().abs()])
        .fold(1e-300, f64::max);
    let x = |f: f64| margin + (f - fmin) / (fmax - fmin).max(1e-300) * (width - 2.0 * margin);
    let y = |p: f64| height / 2.0 - p / pmax * (height / 2.0 - margin);

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" viewBox=\"0 0 {width} {height}\">\n"
    ));
    svg.push_str(&format!(
        "<line x1=\"{margin}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n",
        height / 2.0,
        width - margin,
        height / 2.0
    ));
    for r in rows {
        let xf = x(r.frequency.as_f64());
        svg.push_str(&format!(
            "<line x1=\"{xf}\" y1=\"{}\" x2=\"{xf}\" y2=\"{}\" stroke=\"red\" stroke-width=\"2\"/>\n",
            height / 2.0,
            y(r.p_r.as_f64())
        ));
        let xs = xf + 3.0;
        svg.push_str(&format!(
            "<line x1=\"{xs}\" y1=\"{}\" x2=\"{xs}\" y2=\"{}\" stroke=\"teal\" stroke-width=\"2\"/>\n",
            height / 2.0,
            y(r.p_s.as_f64())
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-size=\"10\">{}{}</text>\n",
            xf - 10.0,
            height - 18.0,
            r.carrier,
            if r.sign > 0 { "+" } else { "-" }
        ));
    }
    svg.push_str(&format!(
        "<text x=\"{margin}\" y=\"20\" font-size=\"12\">sideband powers: R (red), S (teal), peak |P| = {pmax:.3e} a.u.</text>\n"
    ));
    svg.push_str("</svg>\n");
    svg
}
