use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use crate::fit::{levenberg_marquardt, LmOptions};
use crate::scalar::Real;
use crate::{Error, Result};

/// Dominant frequency (cycles per unit s) of the tail `fraction` of a sampled
/// signal. The zero-padded FFT peak of the uniformly resampled tail seeds a
/// least-squares fit of c0 + c1·t + a·sin ωt + b·cos ωt, which resolves the
/// frequency even when the window holds only a cycle or two.
pub fn dominant_frequency<T: Real>(series: &[(T, T)], fraction: f64) -> Result<f64> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::InvalidParameter("tail fraction must lie in (0, 1]".into()));
    }
    let pts: Vec<(f64, f64)> = series.iter().map(|&(s, y)| (s.as_f64(), y.as_f64())).collect();
    let (Some(first), Some(last)) = (pts.first(), pts.last()) else {
        return Err(Error::InvalidParameter("empty series".into()));
    };
    let start = last.0 - fraction * (last.0 - first.0);
    let tail: Vec<(f64, f64)> = pts.iter().copied().filter(|p| p.0 >= start).collect();
    let m = tail.len();
    if m < 16 {
        return Err(Error::InvalidParameter(format!("only {m} samples in the analysis window")));
    }
    let guess = fft_peak(&tail);
    let tm = 0.5 * (tail[0].0 + tail[m - 1].0);
    let xs: Vec<f64> = tail.iter().map(|p| p.0 - tm).collect();
    let ys: Vec<f64> = tail.iter().map(|p| p.1).collect();

    // linear coefficients at the guessed frequency
    let w0 = 2.0 * PI * guess;
    let basis = DMatrix::from_fn(m, 4, |i, k| match k {
        0 => 1.0,
        1 => xs[i],
        2 => (w0 * xs[i]).sin(),
        _ => (w0 * xs[i]).cos(),
    });
    let lin = basis
        .clone()
        .svd(true, true)
        .solve(&DVector::from_column_slice(&ys), 1e-14)
        .map_err(|e| Error::InvalidParameter(e.into()))?;
    let p0 = [lin[0], lin[1], lin[2], lin[3], w0];
    let fit = levenberg_marquardt(
        |p: &[f64], r: &mut DVector<f64>, j: &mut DMatrix<f64>| {
            for i in 0..m {
                let (sn, cs) = (p[4] * xs[i]).sin_cos();
                r[i] = p[0] + p[1] * xs[i] + p[2] * sn + p[3] * cs - ys[i];
                j[(i, 0)] = 1.0;
                j[(i, 1)] = xs[i];
                j[(i, 2)] = sn;
                j[(i, 3)] = cs;
                j[(i, 4)] = xs[i] * (p[2] * cs - p[3] * sn);
            }
        },
        &p0,
        m,
        LmOptions { max_iterations: 500, xtol: 1e-10, ftol: 1e-12 },
    );
    let Ok(fit) = fit else {
        return Ok(guess);
    };
    let f = fit.params[4].abs() / (2.0 * PI);
    // a fit that wandered off the spectral peak is not trusted
    if f.is_finite() && (f - guess).abs() <= 0.5 * guess.max(1.0 / (tail[m - 1].0 - tail[0].0)) {
        Ok(f)
    } else {
        Ok(guess)
    }
}

fn fft_peak(tail: &[(f64, f64)]) -> f64 {
    let m = tail.len();
    let (t0, t1) = (tail[0].0, tail[m - 1].0);
    let dt = (t1 - t0) / (m - 1) as f64;
    let mut j = 0;
    let mut y: Vec<f64> = (0..m)
        .map(|k| {
            let t = t0 + dt * k as f64;
            while j + 2 < m && tail[j + 1].0 < t {
                j += 1;
            }
            let (a, b) = (tail[j], tail[j + 1]);
            let w = if b.0 > a.0 { ((t - a.0) / (b.0 - a.0)).clamp(0.0, 1.0) } else { 0.0 };
            a.1 + w * (b.1 - a.1)
        })
        .collect();
    let mean = y.iter().sum::<f64>() / m as f64;
    y.iter_mut().for_each(|v| *v -= mean);
    let len = (64 * m).next_power_of_two();
    let mut buf: Vec<Complex<f64>> = y.iter().map(|&v| Complex::new(v, 0.0)).collect();
    buf.resize(len, Complex::new(0.0, 0.0));
    FftPlanner::new().plan_fft_forward(len).process(&mut buf);
    let mag: Vec<f64> = buf[..len / 2].iter().map(|c| c.norm()).collect();
    // skip the leakage lobe around zero frequency
    let first = (len as f64 * dt / (t1 - t0)).ceil() as usize;
    let (peak, _) = mag.iter().enumerate().skip(first.max(1)).fold((first.max(1), 0.0), |best, (k, &v)| {
        if v > best.1 { (k, v) } else { best }
    });
    peak as f64 / (len as f64 * dt)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_sine_frequency() {
        let series: Vec<(f64, f64)> =
            (0..=2000).map(|k| k as f64 / 2000.0).map(|s| (s, 0.3 * (2.0 * std::f64::consts::PI * 8.0 * s + 0.4).sin() + 0.1 * s)).collect();
        let f = dominant_frequency(&series, 0.2).unwrap();
        assert!((f - 8.0).abs() < 0.05, "{f}");
    }

    #[test]
    fn rejects_short_windows() {
        let series: Vec<(f64, f64)> = (0..10).map(|k| (k as f64, 0.0)).collect();
        assert!(dominant_frequency(&series, 0.2).is_err());
    }
}
