//! Amplitude spectra of uniformly sampled traces.

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Window {
    #[default]
    Rectangular,
    Hann,
}

impl std::str::FromStr for Window {
    type Err = SimError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rectangular" => Ok(Window::Rectangular),
            "hann" => Ok(Window::Hann),
            _ => Err(SimError::config(format!("unknown window '{s}'"))),
        }
    }
}

/// One-sided spectrum; a cosine of amplitude a away from DC shows a peak of height a.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub freq: Vec<f64>,
    pub magnitude: Vec<f64>,
    pub window: Window,
    /// Number of trace samples before zero padding.
    pub n_samples: usize,
    pub n_fft: usize,
    /// Raw DFT bins 0..=n_fft/2 of the windowed, padded signal.
    #[serde(skip)]
    pub bins: Vec<Complex64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Peak {
    /// Parabolically interpolated frequency, Hz.
    pub freq: f64,
    pub magnitude: f64,
    pub bin: usize,
}

fn window_weights(window: Window, n: usize) -> Vec<f64> {
    match window {
        Window::Rectangular => vec![1.0; n],
        Window::Hann => (0..n)
            .map(|i| 0.5 * (1.0 - (2.0 * std::f64::consts::PI * i as f64 / n as f64).cos()))
            .collect(),
    }
}

/// Spectrum of `values` sampled at the uniform times `t`, zero padded by `pad` (>= 1).
pub fn spectrum(t: &[f64], values: &[f64], window: Window, pad: usize) -> Result<Spectrum> {
    let n = t.len();
    if n < 4 || values.len() != n || pad == 0 {
        return Err(SimError::domain("spectrum needs >= 4 matching samples and pad >= 1"));
    }
    let dt = (t[n - 1] - t[0]) / (n - 1) as f64;
    let uniform = t.windows(2).all(|w| ((w[1] - w[0]) / dt - 1.0).abs() < 1e-6);
    if !(dt > 0.0) || !uniform {
        return Err(SimError::domain("spectrum needs a uniform, increasing time grid"));
    }
    let w = window_weights(window, n);
    let gain: f64 = w.iter().sum();
    let n_fft = n * pad;
    let mut buf: Vec<Complex64> = values.iter().zip(&w).map(|(v, w)| Complex64::new(v * w, 0.0)).collect();
    buf.resize(n_fft, Complex64::new(0.0, 0.0));
    FftPlanner::<f64>::new().plan_fft_forward(n_fft).process(&mut buf);
    let half = n_fft / 2;
    buf.truncate(half + 1);
    let freq = (0..=half).map(|k| k as f64 / (n_fft as f64 * dt)).collect();
    let magnitude = buf
        .iter()
        .enumerate()
        .map(|(k, x)| {
            let one_sided = if k == 0 || (k == half && n_fft % 2 == 0) { 1.0 } else { 2.0 };
            one_sided * x.norm() / gain
        })
        .collect();
    Ok(Spectrum { freq, magnitude, window, n_samples: n, n_fft, bins: buf })
}

impl Spectrum {
    pub fn bin_width(&self) -> f64 {
        self.freq[1] - self.freq[0]
    }

    /// Local maxima above `rel_threshold` times the largest magnitude, strongest first.
    ///
    /// The DC bin counts as a peak when it exceeds its right neighbour.
    pub fn peaks(&self, rel_threshold: f64) -> Vec<Peak> {
        let m = &self.magnitude;
        let max = m.iter().cloned().fold(0.0, f64::max);
        let mut out = Vec::new();
        for k in 0..m.len() {
            let left = if k == 0 { f64::MIN } else { m[k - 1] };
            let right = if k + 1 == m.len() { f64::MIN } else { m[k + 1] };
            if m[k] >= left && m[k] > right && m[k] >= rel_threshold * max {
                let freq = if k > 0 && k + 1 < m.len() {
                    let d = m[k - 1] - 2.0 * m[k] + m[k + 1];
                    let shift = if d != 0.0 { 0.5 * (m[k - 1] - m[k + 1]) / d } else { 0.0 };
                    self.freq[k] + shift * self.bin_width()
                } else {
                    self.freq[k]
                };
                out.push(Peak { freq, magnitude: m[k], bin: k });
            }
        }
        out.sort_by(|a, b| b.magnitude.partial_cmp(&a.magnitude).unwrap());
        out
    }

    /// Magnitudes scaled so the largest peak is 1.
    pub fn normalized(&self) -> Vec<f64> {
        let max = self.magnitude.iter().cloned().fold(0.0, f64::max);
        if max == 0.0 {
            return self.magnitude.clone();
        }
        self.magnitude.iter().map(|m| m / max).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::rng::block_rng;
    use rand::Rng;

    fn grid(n: usize, dt: f64) -> Vec<f64> {
        (0..n).map(|i| i as f64 * dt).collect()
    }

    #[test]
    fn pure_cosine() {
        let f0 = 50.0;
        let t = grid(1000, 1e-3);
        let x: Vec<f64> = t.iter().map(|t| (2.0 * std::f64::consts::PI * f0 * t).cos()).collect();
        let s = spectrum(&t, &x, Window::Rectangular, 1).unwrap();
        let p = s.peaks(0.05);
        assert_eq!(p.len(), 1);
        assert!((p[0].freq - f0).abs() < 1e-9);
        assert!((p[0].magnitude - 1.0).abs() < 1e-12);
        let h = spectrum(&t, &x, Window::Hann, 8).unwrap();
        assert!((h.peaks(0.5)[0].freq - f0).abs() < 0.1 * h.bin_width());
        assert!(spectrum(&[0.0, 1.0, 3.0, 4.0], &[0.0; 4], Window::Rectangular, 1).is_err());
    }

    #[test]
    fn parseval() {
        let mut rng = block_rng(3, 0);
        for n in [64, 101] {
            let t = grid(n, 0.5);
            let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let s = spectrum(&t, &x, Window::Rectangular, 1).unwrap();
            let half = n / 2;
            let mut p = 0.0;
            for (k, a) in s.magnitude.iter().enumerate() {
                let edge = k == 0 || (k == half && n % 2 == 0);
                p += if edge { a * a } else { 0.5 * a * a };
            }
            let direct: f64 = x.iter().map(|v| v * v).sum::<f64>() / n as f64;
            assert!((p / direct - 1.0).abs() < 1e-8, "{n} {p} {direct}");
        }
    }

    #[test]
    fn linearity() {
        let mut rng = block_rng(4, 0);
        let t = grid(256, 1e-2);
        let x1: Vec<f64> = (0..256).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let x2: Vec<f64> = (0..256).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let (a, b) = (0.7, -1.3);
        let mix: Vec<f64> = x1.iter().zip(&x2).map(|(u, v)| a * u + b * v).collect();
        let s1 = spectrum(&t, &x1, Window::Rectangular, 2).unwrap();
        let s2 = spectrum(&t, &x2, Window::Rectangular, 2).unwrap();
        let sm = spectrum(&t, &mix, Window::Rectangular, 2).unwrap();
        for k in 0..sm.bins.len() {
            let want = s1.bins[k] * a + s2.bins[k] * b;
            assert!((sm.bins[k] - want).norm() < 1e-10 * (1.0 + want.norm()));
            let scale = sm.magnitude[k] / sm.bins[k].norm().max(1e-300);
            assert!((sm.magnitude[k] - scale * want.norm()).abs() < 1e-10);
        }
    }
}
