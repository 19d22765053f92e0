use serde::Serialize;

use crate::schedule::{Schedule, ScheduleKind};
use crate::scalar::Real;
use crate::{Error, Result};

fn momentum<T: Real>(n: usize, k: usize) -> T {
    T::PI() * T::of(k as f64) / T::of((n + 1) as f64)
}

/// Mode energies ε_k = √(B² sin² q_k + (A − B cos q_k)²), q_k = kπ/(N+1), k = 1..N.
pub fn wire_spectrum<T: Real>(n: usize, a: T, b: T) -> Vec<T> {
    (1..=n)
        .map(|k| {
            let q: T = momentum(n, k);
            let (sn, cs) = (q.sin(), q.cos());
            (b * b * sn * sn + (a - b * cs) * (a - b * cs)).sqrt()
        })
        .collect()
}

/// All 2^N many-body levels ½Σ_k ±ε_k, ascending.
pub fn wire_spectrum_levels<T: Real>(n: usize, a: T, b: T) -> Result<Vec<T>> {
    if n > 20 {
        return Err(Error::TooLarge { n, max: 20 });
    }
    let eps = wire_spectrum(n, a, b);
    let half = T::of(0.5);
    let mut levels: Vec<T> = (0..1usize << n)
        .map(|m| eps.iter().enumerate().fold(T::zero(), |acc, (k, &e)| if m >> k & 1 == 0 { acc - half * e } else { acc + half * e }))
        .collect();
    levels.sort_by(|x, y| x.partial_cmp(y).unwrap());
    Ok(levels)
}

/// The s in (0, 1) where A(s) = B(s) on the unsmoothed profile.
pub fn crossing_point<T: Real>(sched: &Schedule<T>) -> Result<T> {
    let f = |s: T| {
        let (a, b) = sched.profile(s);
        a - b
    };
    let (mut lo, mut hi) = (T::zero(), T::one());
    let (flo, fhi) = (f(lo), f(hi));
    if !(flo > T::zero() && fhi < T::zero()) {
        return Err(Error::InvalidParameter("schedule has no A = B crossing in (0, 1)".into()));
    }
    while hi - lo > T::tol(1e-12) {
        let mid = (lo + hi) * T::of(0.5);
        if f(mid) > T::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo + hi) * T::of(0.5))
}

/// Landau–Zener parameters of the low wire modes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WireLzParams<T> {
    pub n: usize,
    pub s_star: T,
    pub b_star: T,
    /// |A'(s*) − B'(s*)|.
    pub delta_m: T,
    /// Per-mode minimum gap Δ0_k and width W_k, k = 1..N.
    pub delta0: Vec<T>,
    pub width: Vec<T>,
    /// (N+1)² Δ0_1 W_1.
    pub nu1: T,
    /// Gaps located at the true per-mode minimum rather than at A = B.
    pub exact_min: bool,
}

fn golden_min<T: Real>(f: impl Fn(T) -> T, mut lo: T, mut hi: T) -> T {
    let r = T::of(0.618_033_988_749_894_8);
    let mut x1 = hi - r * (hi - lo);
    let mut x2 = lo + r * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > T::tol(1e-12) {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - r * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + r * (hi - lo);
            f2 = f(x2);
        }
    }
    (lo + hi) * T::of(0.5)
}

/// Mode gaps at the crossing, Δ0_k ≈ B(s*) q_k and W_k = Δ0_k/Δm; with
/// `exact_min` each mode's gap and slope are taken where ε_k is smallest.
pub fn wire_lz_params<T: Real>(n: usize, sched: &Schedule<T>, exact_min: bool) -> Result<WireLzParams<T>> {
    if n == 0 {
        return Err(Error::InvalidParameter("wire needs at least one cell".into()));
    }
    let s_star = crossing_point(sched)?;
    let (_, b_star) = sched.profile(s_star);
    let (da, db) = sched.profile_derivative(s_star);
    let delta_m = (da - db).abs();
    let mut delta0 = Vec::with_capacity(n);
    let mut width = Vec::with_capacity(n);
    for k in 1..=n {
        let q: T = momentum(n, k);
        if exact_min {
            let eps = |s: T| {
                let (a, b) = sched.profile(s);
                wire_spectrum(n, a, b)[k - 1]
            };
            let sk = golden_min(eps, T::zero(), T::one());
            let (da, db) = sched.profile_derivative(sk);
            let d0 = eps(sk);
            delta0.push(d0);
            width.push(d0 / (da - db * q.cos()).abs());
        } else {
            let d0 = b_star * q;
            delta0.push(d0);
            width.push(d0 / delta_m);
        }
    }
    let np1 = T::of((n + 1) as f64);
    let nu1 = np1 * np1 * delta0[0] * width[0];
    Ok(WireLzParams { n, s_star, b_star, delta_m, delta0, width, nu1, exact_min })
}

/// Large-N limit π²B(s*)²/Δm of (N+1)²Δ0W for the lowest mode.
pub fn nu1_analytic<T: Real>(kind: ScheduleKind, alpha0: T, alpha1: T) -> Result<T> {
    let sched = Schedule::new(kind, alpha0, alpha1)?;
    let s = crossing_point(&sched)?;
    let (_, b) = sched.profile(s);
    let (da, db) = sched.profile_derivative(s);
    Ok(T::PI() * T::PI() * b * b / (da - db).abs())
}

/// Q1 of Wire-N, 1 − α1²(N+3)/16.
pub fn wire_q1<T: Real>(n: usize, alpha1: T) -> T {
    T::one() - alpha1 * alpha1 * T::of((n + 3) as f64 / 16.0)
}

/// Predicted maximum run rate −πν / (2 ln(1 − target/Q1)(N+1)²) for
/// classical performance `target`.
pub fn wire_fmax_model<T: Real>(n: usize, nu: T, q1: T, target: T) -> Result<T> {
    if !(q1 > target) {
        return Err(Error::InvalidParameter(format!(
            "Q1 = {} does not exceed the target {}; wire too long at this α1",
            q1.as_f64(),
            target.as_f64()
        )));
    }
    let np1 = T::of((n + 1) as f64);
    Ok(-T::PI() * nu / (T::of(2.0) * (T::one() - target / q1).ln() * np1 * np1))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NuFit<T> {
    pub nu: T,
    pub std_error: T,
    /// (N, Γ_max) pairs used.
    pub points: Vec<(usize, T)>,
}

/// Least-squares ν from simulated (N, Γ_max) pairs with N ≥ `min_n`.
pub fn fit_nu<T: Real>(points: &[(usize, T)], alpha1: T, target: T, min_n: usize) -> Result<NuFit<T>> {
    let used: Vec<(usize, T)> = points.iter().copied().filter(|p| p.0 >= min_n).collect();
    if used.is_empty() {
        return Err(Error::InvalidParameter(format!("no wires with N ≥ {min_n}")));
    }
    let mut g = Vec::with_capacity(used.len());
    for &(n, _) in &used {
        g.push(wire_fmax_model(n, T::one(), wire_q1(n, alpha1), target)?);
    }
    let sgg = g.iter().fold(T::zero(), |a, &x| a + x * x);
    let sgy = g.iter().zip(&used).fold(T::zero(), |a, (&x, p)| a + x * p.1);
    let nu = sgy / sgg;
    let std_error = if used.len() > 1 {
        let ss = g.iter().zip(&used).fold(T::zero(), |a, (&x, p)| a + (p.1 - nu * x) * (p.1 - nu * x));
        (ss / T::of((used.len() - 1) as f64) / sgg).sqrt()
    } else {
        T::zero()
    };
    Ok(NuFit { nu, std_error, points: used })
}
