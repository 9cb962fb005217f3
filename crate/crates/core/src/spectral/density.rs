use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::exec;
use crate::{Error, Result};

/// Window functions on `[0, t_f]`, scaled to unit mean so a pure tone peaks at 1.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Window {
    Rectangular,
    #[default]
    Hann,
    Blackman,
}

impl Window {
    pub fn value(self, t: f64, t_f: f64) -> f64 {
        let x = 2.0 * PI * t / t_f;
        match self {
            Window::Rectangular => 1.0,
            Window::Hann => 1.0 - x.cos(),
            Window::Blackman => (0.42 - 0.5 * x.cos() + 0.08 * (2.0 * x).cos()) / 0.42,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Window::Rectangular => "rect",
            Window::Hann => "hann",
            Window::Blackman => "blackman",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "rect" | "rectangular" => Ok(Window::Rectangular),
            "hann" => Ok(Window::Hann),
            "blackman" => Ok(Window::Blackman),
            other => Err(Error::Unsupported(format!("unknown window '{other}'"))),
        }
    }
}

/// Trapezoidal weights `a_0 = a_N = 1/2`, interior 1, for `n + 1` samples.
pub(crate) fn trapezoid(n: usize) -> impl Iterator<Item = f64> {
    (0..=n).map(move |k| if k == 0 || k == n { 0.5 } else { 1.0 })
}

#[derive(Clone, Debug)]
pub struct SpectralDensity {
    pub energies: Vec<f64>,
    pub values: Vec<C64>,
    pub window: Window,
    pub t_f: f64,
}

impl SpectralDensity {
    /// `Delta E = pi / t_f`.
    pub fn resolution(&self) -> f64 {
        PI / self.t_f
    }

    pub fn magnitudes(&self) -> Vec<f64> {
        self.values.iter().map(|z| z.norm()).collect()
    }

    pub fn peaks(&self, relative_threshold: f64) -> Vec<Peak> {
        find_peaks(&self.energies, &self.magnitudes(), relative_threshold)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Peak {
    pub energy: f64,
    pub magnitude: f64,
}

/// `C(E) = (1/t_f) sum_k a_k dt w(t_k) e^{i E t_k} C(t_k)` on `points` energies spanning
/// `[-pi/dt, pi/dt]`; `series[k]` is sampled at `t_k = k dt`.
pub fn spectral_density(
    series: &[C64],
    dt: f64,
    window: Window,
    points: usize,
) -> Result<SpectralDensity> {
    if series.len() < 2 {
        return Err(Error::EmptySeries);
    }
    if points < 2 {
        return Err(Error::Unsupported(
            "spectral density needs at least two energies".into(),
        ));
    }
    let n = series.len() - 1;
    let t_f = n as f64 * dt;
    let weighted: Vec<C64> = trapezoid(n)
        .zip(series)
        .enumerate()
        .map(|(k, (a, c))| c * (a * dt * window.value(k as f64 * dt, t_f) / t_f))
        .collect();
    let e_max = PI / dt;
    let energies: Vec<f64> = (0..points)
        .map(|j| -e_max + 2.0 * e_max * j as f64 / (points - 1) as f64)
        .collect();
    let values = exec::map_collect(points, |j| {
        let step = C64::from_polar(1.0, energies[j] * dt);
        let mut phase = C64::new(1.0, 0.0);
        let mut acc = C64::new(0.0, 0.0);
        for w in &weighted {
            acc += w * phase;
            phase *= step;
        }
        acc
    });
    Ok(SpectralDensity {
        energies,
        values,
        window,
        t_f,
    })
}

/// Local maxima of `magnitudes` at or above `relative_threshold * max`, refined by a
/// parabola through the three samples around each maximum.
pub fn find_peaks(energies: &[f64], magnitudes: &[f64], relative_threshold: f64) -> Vec<Peak> {
    let top = magnitudes.iter().copied().fold(0.0, f64::max);
    if top == 0.0 || magnitudes.len() < 3 {
        return Vec::new();
    }
    let floor = relative_threshold * top;
    let mut peaks: Vec<Peak> = (1..magnitudes.len() - 1)
        .filter(|&j| {
            magnitudes[j] >= floor
                && magnitudes[j] > magnitudes[j - 1]
                && magnitudes[j] >= magnitudes[j + 1]
        })
        .map(|j| {
            let (l, c, r) = (magnitudes[j - 1], magnitudes[j], magnitudes[j + 1]);
            let h = energies[j + 1] - energies[j];
            let denom = l - 2.0 * c + r;
            let shift = if denom < 0.0 {
                0.5 * (l - r) / denom
            } else {
                0.0
            };
            Peak {
                energy: energies[j] + shift * h,
                magnitude: c - 0.25 * (l - r) * shift,
            }
        })
        .collect();
    peaks.sort_by(|a, b| b.magnitude.total_cmp(&a.magnitude));
    peaks
}
