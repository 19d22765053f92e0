use nalgebra::{DMatrix, DVector};

use crate::scalar::Real;
use crate::{Error, Result};

pub trait ImplicitSystem<T> {
    fn rhs(&mut self, t: T, y: &[T], dy: &mut [T]) -> Result<()>;
    /// ∂f/∂y at (t, y).
    fn jacobian(&mut self, t: T, y: &[T], jac: &mut DMatrix<T>) -> Result<()>;
}

#[derive(Debug, Clone, Copy)]
pub struct Bdf1Options<T> {
    pub h: T,
    pub newton_tol: T,
    pub max_newton: usize,
    pub max_halvings: usize,
}

impl<T: Real> Bdf1Options<T> {
    pub fn with_step(h: T) -> Self {
        Self { h, newton_tol: T::tol(1e-10), max_newton: 25, max_halvings: 10 }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Bdf1Stats {
    pub steps: usize,
    pub newton_iterations: usize,
    pub halvings: usize,
}

struct Work<T> {
    f: Vec<T>,
    jac: DMatrix<T>,
    trial: Vec<T>,
}

/// One implicit Euler step y' = y + h f(t + h, y'); None if Newton fails.
fn try_step<T: Real, S: ImplicitSystem<T>>(
    sys: &mut S,
    t: T,
    y: &[T],
    h: T,
    opts: &Bdf1Options<T>,
    w: &mut Work<T>,
    stats: &mut Bdf1Stats,
) -> Result<Option<Vec<T>>> {
    let n = y.len();
    // explicit Euler predictor
    sys.rhs(t, y, &mut w.f)?;
    for i in 0..n {
        w.trial[i] = y[i] + h * w.f[i];
    }
    let tn = t + h;
    for _ in 0..opts.max_newton {
        stats.newton_iterations += 1;
        sys.rhs(tn, &w.trial, &mut w.f)?;
        sys.jacobian(tn, &w.trial, &mut w.jac)?;
        let g = DVector::from_fn(n, |i, _| w.trial[i] - y[i] - h * w.f[i]);
        let mut m = -&w.jac * h;
        for i in 0..n {
            m[(i, i)] += T::one();
        }
        let Some(delta) = m.lu().solve(&(-g)) else {
            return Ok(None);
        };
        let mut size = T::zero();
        for i in 0..n {
            w.trial[i] += delta[i];
            size = size.max(delta[i].abs());
        }
        if !size.is_finite() {
            return Ok(None);
        }
        if size <= opts.newton_tol {
            return Ok(Some(w.trial.clone()));
        }
    }
    Ok(None)
}

fn advance<T: Real, S: ImplicitSystem<T>>(
    sys: &mut S,
    t: T,
    y: &[T],
    h: T,
    depth: usize,
    opts: &Bdf1Options<T>,
    w: &mut Work<T>,
    stats: &mut Bdf1Stats,
    observer: &mut dyn FnMut(T, &[T]) -> Result<()>,
) -> Result<Vec<T>> {
    if let Some(next) = try_step(sys, t, y, h, opts, w, stats)? {
        stats.steps += 1;
        observer(t + h, &next)?;
        return Ok(next);
    }
    if depth >= opts.max_halvings {
        return Err(Error::Convergence { what: "implicit Euler Newton iteration", residual: t.as_f64() });
    }
    stats.halvings += 1;
    let half = h * T::of(0.5);
    let mid = advance(sys, t, y, half, depth + 1, opts, w, stats, observer)?;
    advance(sys, t + half, &mid, half, depth + 1, opts, w, stats, observer)
}

/// Fixed-step implicit Euler from `t0` to `t1`; a step whose Newton iteration
/// fails is retried as two half steps, at most `max_halvings` levels deep.
pub fn integrate_bdf1<T, S, O>(
    sys: &mut S,
    t0: T,
    t1: T,
    y0: Vec<T>,
    opts: &Bdf1Options<T>,
    mut observer: O,
) -> Result<(Vec<T>, Bdf1Stats)>
where
    T: Real,
    S: ImplicitSystem<T>,
    O: FnMut(T, &[T]) -> Result<()>,
{
    if !(opts.h > T::zero()) {
        return Err(Error::InvalidParameter("step size must be positive".into()));
    }
    let n = y0.len();
    let mut w = Work { f: vec![T::zero(); n], jac: DMatrix::zeros(n, n), trial: vec![T::zero(); n] };
    let mut stats = Bdf1Stats::default();
    let steps = ((t1 - t0) / opts.h).ceil().to_usize().unwrap_or(0).max(1);
    let h = (t1 - t0) / T::of(steps as f64);
    let mut y = y0;
    for k in 0..steps {
        let t = t0 + h * T::of(k as f64);
        y = advance(sys, t, &y, h, 0, opts, &mut w, &mut stats, &mut observer)?;
    }
    Ok((y, stats))
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Stiff(f64);
    impl ImplicitSystem<f64> for Stiff {
        fn rhs(&mut self, _t: f64, y: &[f64], dy: &mut [f64]) -> Result<()> {
            dy[0] = -self.0 * (y[0] - 1.0);
            Ok(())
        }
        fn jacobian(&mut self, _t: f64, _y: &[f64], jac: &mut DMatrix<f64>) -> Result<()> {
            jac[(0, 0)] = -self.0;
            Ok(())
        }
    }

    #[test]
    fn stiff_relaxation_is_stable() {
        let (y, stats) =
            integrate_bdf1(&mut Stiff(1e6), 0.0, 1.0, vec![0.0], &Bdf1Options::with_step(1e-2), |_, _| Ok(())).unwrap();
        assert!((y[0] - 1.0).abs() < 1e-10);
        assert_eq!(stats.steps, 100);
    }

    #[test]
    fn first_order_accuracy() {
        let mut errs = Vec::new();
        for h in [1e-2, 5e-3] {
            let (y, _) =
                integrate_bdf1(&mut Stiff(1.0), 0.0, 1.0, vec![0.0], &Bdf1Options::with_step(h), |_, _| Ok(())).unwrap();
            errs.push((y[0] - (1.0 - (-1f64).exp())).abs());
        }
        let order = (errs[0] / errs[1]).log2();
        assert!((order - 1.0).abs() < 0.1, "order {order}");
    }

    // y' = y² is smooth up to t = 1; a large base step forces halvings.
    struct Riccati;
    impl ImplicitSystem<f64> for Riccati {
        fn rhs(&mut self, _t: f64, y: &[f64], dy: &mut [f64]) -> Result<()> {
            dy[0] = y[0] * y[0];
            Ok(())
        }
        fn jacobian(&mut self, _t: f64, y: &[f64], jac: &mut DMatrix<f64>) -> Result<()> {
            jac[(0, 0)] = 2.0 * y[0];
            Ok(())
        }
    }

    #[test]
    fn halving_recovers_failed_steps() {
        let (y, stats) =
            integrate_bdf1(&mut Riccati, 0.0, 0.5, vec![1.0], &Bdf1Options::with_step(0.5), |_, _| Ok(())).unwrap();
        assert!(stats.halvings > 0);
        // implicit Euler overshoots a convex blow-up
        assert!(y[0].is_finite() && y[0] > 2.0, "{} {stats:?}", y[0]);
    }
}
