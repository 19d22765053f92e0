use crate::scalar::Real;
use crate::{Error, Result};

pub trait OdeSystem<T> {
    fn rhs(&mut self, t: T, y: &[T], dy: &mut [T]) -> Result<()>;
}

#[derive(Debug, Clone, Copy)]
pub struct DopriOptions<T> {
    pub rtol: T,
    pub atol: T,
    pub h_init: Option<T>,
    pub h_max: T,
    pub max_steps: usize,
}

impl<T: Real> Default for DopriOptions<T> {
    fn default() -> Self {
        Self { rtol: T::tol(1e-8), atol: T::tol(1e-10), h_init: None, h_max: T::one(), max_steps: 10_000_000 }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DopriStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

/// Continuous extension over one accepted step.
pub struct DenseStep<'a, T> {
    pub t_old: T,
    pub h: T,
    cont: &'a [Vec<T>; 5],
}

impl<T: Real> DenseStep<'_, T> {
    pub fn t_new(&self) -> T {
        self.t_old + self.h
    }

    pub fn eval(&self, t: T, out: &mut [T]) {
        let th = (t - self.t_old) / self.h;
        let th1 = T::one() - th;
        let [c0, c1, c2, c3, c4] = self.cont;
        for i in 0..out.len() {
            out[i] = c0[i] + th * (c1[i] + th1 * (c2[i] + th * (c3[i] + th1 * c4[i])));
        }
    }
}

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A2: [f64; 1] = [0.2];
const A3: [f64; 2] = [3.0 / 40.0, 9.0 / 40.0];
const A4: [f64; 3] = [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0];
const A5: [f64; 4] = [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0];
const A6: [f64; 5] = [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0];
const B: [f64; 6] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];
const D: [f64; 7] = [
    -12715105075.0 / 11282082432.0,
    0.0,
    87487479700.0 / 32700410799.0,
    -10690763975.0 / 1880347072.0,
    701980252875.0 / 199316789632.0,
    -1453857185.0 / 822651844.0,
    69997945.0 / 29380423.0,
];

fn combo<T: Real>(out: &mut [T], y: &[T], h: T, coeffs: &[f64], ks: &[Vec<T>]) {
    let cs: Vec<T> = coeffs.iter().map(|&c| T::of(c) * h).collect();
    for i in 0..out.len() {
        let mut acc = y[i];
        for (c, k) in cs.iter().zip(ks) {
            acc += *c * k[i];
        }
        out[i] = acc;
    }
}

/// Integrates from `t0` to `t1` (> t0). `observer` sees every accepted step
/// with its dense output before `project` is applied to the new state.
pub fn integrate_dopri5<T, S, O, P>(
    sys: &mut S,
    t0: T,
    t1: T,
    y0: Vec<T>,
    opts: &DopriOptions<T>,
    mut observer: O,
    mut project: P,
) -> Result<(Vec<T>, DopriStats)>
where
    T: Real,
    S: OdeSystem<T>,
    O: FnMut(&DenseStep<'_, T>) -> Result<()>,
    P: FnMut(&mut [T]),
{
    let n = y0.len();
    let mut stats = DopriStats::default();
    let mut y = y0;
    let mut t = t0;
    let mut k: Vec<Vec<T>> = (0..7).map(|_| vec![T::zero(); n]).collect();
    let mut ytmp = vec![T::zero(); n];
    let mut ynew = vec![T::zero(); n];
    let mut cont: [Vec<T>; 5] = std::array::from_fn(|_| vec![T::zero(); n]);
    sys.rhs(t, &y, &mut k[0])?;
    stats.evaluations += 1;

    let sc = |a: T, b: T| opts.atol + opts.rtol * a.abs().max(b.abs());
    let span = t1 - t0;
    let mut h = match opts.h_init {
        Some(h) => h,
        None => initial_step(sys, t, &y, &k[0], opts, span, &mut stats)?,
    }
    .min(opts.h_max)
    .min(span);
    let mut facold = T::of(1e-4);
    let h_floor = T::of(1e-14) * span.abs().max(T::one());

    while t < t1 {
        if stats.accepted + stats.rejected >= opts.max_steps {
            return Err(Error::Convergence { what: "Dormand-Prince step budget", residual: t.as_f64() });
        }
        if h < h_floor {
            return Err(Error::StepUnderflow { s: t.as_f64() });
        }
        let last = t + h >= t1 || t1 - (t + h) < h_floor;
        if last {
            h = t1 - t;
        }
        let stage_t = |c: f64| if c == 1.0 { t + h } else { (t + T::of(c) * h).min(t1) };
        for (s, a) in [(1usize, &A2[..]), (2, &A3[..]), (3, &A4[..]), (4, &A5[..]), (5, &A6[..])] {
            combo(&mut ytmp, &y, h, a, &k[..s]);
            let (_, rest) = k.split_at_mut(s);
            sys.rhs(stage_t(C[s]), &ytmp, &mut rest[0])?;
        }
        combo(&mut ynew, &y, h, &B, &k[..6]);
        let t_new = if last { t1 } else { t + h };
        {
            let (_, rest) = k.split_at_mut(6);
            sys.rhs(t_new, &ynew, &mut rest[0])?;
        }
        stats.evaluations += 6;

        let mut err = T::zero();
        for i in 0..n {
            let mut e = T::zero();
            for (j, &ej) in E.iter().enumerate() {
                if ej != 0.0 {
                    e += T::of(ej) * k[j][i];
                }
            }
            let r = h * e / sc(y[i], ynew[i]);
            err += r * r;
        }
        err = (err / T::of(n.max(1) as f64)).sqrt();

        let fac11 = err.powf(T::of(0.17));
        if err <= T::one() {
            let fac = (fac11 / facold.powf(T::of(0.04)) / T::of(0.9)).max(T::of(0.1)).min(T::of(5.0));
            for i in 0..n {
                let ydiff = ynew[i] - y[i];
                let bspl = h * k[0][i] - ydiff;
                cont[0][i] = y[i];
                cont[1][i] = ydiff;
                cont[2][i] = bspl;
                cont[3][i] = ydiff - h * k[6][i] - bspl;
                let mut acc = T::zero();
                for (j, &dj) in D.iter().enumerate() {
                    if dj != 0.0 {
                        acc += T::of(dj) * k[j][i];
                    }
                }
                cont[4][i] = h * acc;
            }
            observer(&DenseStep { t_old: t, h, cont: &cont })?;
            facold = err.max(T::of(1e-4));
            stats.accepted += 1;
            std::mem::swap(&mut y, &mut ynew);
            project(&mut y);
            k.swap(0, 6);
            t = t_new;
            h = (h / fac).min(opts.h_max);
        } else {
            stats.rejected += 1;
            let shrink = if err.is_finite() { (fac11 / T::of(0.9)).min(T::of(5.0)) } else { T::of(10.0) };
            h /= shrink;
        }
    }
    Ok((y, stats))
}

fn initial_step<T: Real, S: OdeSystem<T>>(
    sys: &mut S,
    t: T,
    y: &[T],
    f0: &[T],
    opts: &DopriOptions<T>,
    span: T,
    stats: &mut DopriStats,
) -> Result<T> {
    let n = y.len();
    let sc: Vec<T> = y.iter().map(|v| opts.atol + opts.rtol * v.abs()).collect();
    let norm = |v: &[T]| {
        let s = v.iter().zip(&sc).fold(T::zero(), |a, (x, s)| a + (*x / *s) * (*x / *s));
        (s / T::of(n.max(1) as f64)).sqrt()
    };
    let (d0, d1) = (norm(y), norm(f0));
    let mut h0 = if d0 < T::of(1e-10) || d1 < T::of(1e-10) { T::of(1e-6) } else { T::of(0.01) * d0 / d1 };
    h0 = h0.min(span);
    let y1: Vec<T> = y.iter().zip(f0).map(|(a, b)| *a + h0 * *b).collect();
    let mut f1 = vec![T::zero(); n];
    sys.rhs(t + h0, &y1, &mut f1)?;
    stats.evaluations += 1;
    let diff: Vec<T> = f1.iter().zip(f0).map(|(a, b)| *a - *b).collect();
    let d2 = norm(&diff) / h0;
    let m = d1.max(d2);
    let h1 = if m <= T::of(1e-15) {
        (h0 * T::of(1e-3)).max(T::of(1e-6))
    } else {
        (T::of(0.01) / m).powf(T::of(0.2))
    };
    Ok((T::of(100.0) * h0).min(h1).min(span))
}
