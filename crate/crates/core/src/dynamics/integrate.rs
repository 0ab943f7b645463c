use super::ode::{OdeSystem, Order};
use super::params::PhysicalParams;
use super::DynamicsError;
use crate::optimizers::DiscreteTrajectory;
use crate::Vector;

pub const RK4: &str = "rk4";

/// Sampled solution of an [`OdeSystem`].
#[derive(Clone, Debug)]
pub struct ContinuousTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vector>,
    /// `Ẋ(t)`; zero vectors for first-order flows.
    pub velocities: Vec<Vector>,
    pub dt: f64,
    pub method: &'static str,
    pub order: Order,
    pub label: String,
    pub params: Option<PhysicalParams>,
    /// Stopped early on a non-finite state.
    pub diverged: bool,
    /// Stopped early on a field evaluation error.
    pub failure: Option<String>,
}

impl ContinuousTrajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn t0(&self) -> f64 {
        self.times[0]
    }

    pub fn t_end(&self) -> f64 {
        *self.times.last().unwrap()
    }

    /// Linear interpolation of `X` at `t` inside the sampled range.
    pub fn state_at(&self, t: f64) -> Option<Vector> {
        let (t0, t1) = (self.t0(), self.t_end());
        let slack = 1e-12 * t1.abs().max(1.0);
        if t < t0 - slack || t > t1 + slack {
            return None;
        }
        let i = self.times.partition_point(|&s| s <= t);
        if i == 0 {
            return Some(self.states[0].clone());
        }
        if i >= self.len() {
            return Some(self.states[self.len() - 1].clone());
        }
        let (ta, tb) = (self.times[i - 1], self.times[i]);
        let w = (t - ta) / (tb - ta);
        Some(&self.states[i - 1] * (1.0 - w) + &self.states[i] * w)
    }
}

fn finite(v: &Vector) -> bool {
    v.iter().all(|a| a.is_finite())
}

/// Step count `⌈(t_end - t0)/dt⌉`; a quotient within `1e-9` relative of an
/// integer is not rounded up, so `1/1e-3` gives 1000 steps.
fn step_count(span: f64, dt: f64) -> usize {
    let q = span / dt;
    let r = q.round();
    if (q - r).abs() <= 1e-9 * r.max(1.0) {
        r.max(1.0) as usize
    } else {
        q.ceil() as usize
    }
}

/// Classical fixed-step RK4 from `sys.t0` to `t_end`.
///
/// Second-order systems are integrated in phase space `(X, Ẋ)`; `v0` is
/// ignored for first-order ones. The last step is shortened to land on
/// `t_end`. A non-finite state or a field error stops the run, keeping the
/// samples computed so far.
pub fn integrate(
    sys: &OdeSystem,
    x0: &Vector,
    v0: &Vector,
    t_end: f64,
    dt: f64,
) -> Result<ContinuousTrajectory, DynamicsError> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(DynamicsError::BadStep(dt));
    }
    if !(t_end > sys.t0) {
        return Err(DynamicsError::BadSpan { t0: sys.t0, t_end });
    }
    if x0.len() != sys.dim || (sys.order == Order::Second && v0.len() != sys.dim) {
        return Err(DynamicsError::Dimension {
            expected: sys.dim,
            got: if x0.len() != sys.dim { x0.len() } else { v0.len() },
        });
    }
    let n = step_count(t_end - sys.t0, dt);
    let zero = Vector::zeros(sys.dim);
    let mut times = Vec::with_capacity(n + 1);
    let mut states = Vec::with_capacity(n + 1);
    let mut velocities = Vec::with_capacity(n + 1);
    let mut x = x0.clone();
    let mut v = match sys.order {
        Order::First => zero.clone(),
        Order::Second => v0.clone(),
    };
    times.push(sys.t0);
    states.push(x.clone());
    velocities.push(v.clone());
    let mut diverged = !(finite(&x) && finite(&v));
    let mut failure = None;

    let mut t = sys.t0;
    for k in 1..=n {
        if diverged {
            break;
        }
        let t_next = if k == n { t_end } else { sys.t0 + k as f64 * dt };
        let step = t_next - t;
        let result = match sys.order {
            Order::First => rk4_first(sys, t, &x, step).map(|nx| (nx, zero.clone())),
            Order::Second => rk4_second(sys, t, &x, &v, step),
        };
        match result {
            Ok((nx, nv)) => {
                if !(finite(&nx) && finite(&nv)) {
                    diverged = true;
                    break;
                }
                x = nx;
                v = nv;
            }
            Err(e) => {
                failure = Some(format!("t = {t}: {e}"));
                break;
            }
        }
        t = t_next;
        times.push(t);
        states.push(x.clone());
        velocities.push(v.clone());
    }

    Ok(ContinuousTrajectory {
        times,
        states,
        velocities,
        dt,
        method: RK4,
        order: sys.order,
        label: sys.label.clone(),
        params: sys.params.clone(),
        diverged,
        failure,
    })
}

fn rk4_first(sys: &OdeSystem, t: f64, x: &Vector, h: f64) -> Result<Vector, String> {
    let z = Vector::zeros(0);
    let k1 = sys.eval(t, x, &z)?;
    let k2 = sys.eval(t + h / 2.0, &(x + &k1 * (h / 2.0)), &z)?;
    let k3 = sys.eval(t + h / 2.0, &(x + &k2 * (h / 2.0)), &z)?;
    let k4 = sys.eval(t + h, &(x + &k3 * h), &z)?;
    Ok(x + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0))
}

fn rk4_second(sys: &OdeSystem, t: f64, x: &Vector, v: &Vector, h: f64) -> Result<(Vector, Vector), String> {
    let a1 = sys.eval(t, x, v)?;
    let (x2, v2) = (x + v * (h / 2.0), v + &a1 * (h / 2.0));
    let a2 = sys.eval(t + h / 2.0, &x2, &v2)?;
    let (x3, v3) = (x + &v2 * (h / 2.0), v + &a2 * (h / 2.0));
    let a3 = sys.eval(t + h / 2.0, &x3, &v3)?;
    let (x4, v4) = (x + &v3 * h, v + &a3 * h);
    let a4 = sys.eval(t + h, &x4, &v4)?;
    let nx = x + (v + &v2 * 2.0 + &v3 * 2.0 + &v4) * (h / 6.0);
    let nv = v + (a1 + a2 * 2.0 + a3 * 2.0 + a4) * (h / 6.0);
    Ok((nx, nv))
}

/// `max_k ‖x(k) - X(kh)‖` over iterates whose time `kh` falls inside the
/// continuous trajectory, interpolating linearly between samples.
pub fn discrete_continuous_deviation(
    discrete: &DiscreteTrajectory,
    ct: &ContinuousTrajectory,
    h: f64,
) -> Result<f64, DynamicsError> {
    if !(h.is_finite() && h > 0.0) {
        return Err(DynamicsError::BadTimeScale(h));
    }
    let mut worst: Option<f64> = None;
    for (k, x) in discrete.iterates.iter().enumerate() {
        if let Some(xt) = ct.state_at(k as f64 * h) {
            let dev = (x - xt).norm();
            worst = Some(worst.map_or(dev, |w: f64| w.max(dev)));
        }
    }
    worst.ok_or(DynamicsError::DisjointTimes {
        discrete_end: (discrete.len().saturating_sub(1)) as f64 * h,
        t0: ct.t0(),
        t_end: ct.t_end(),
    })
}
