//! Gradient flows `dx/dt = grad h` of meridional potentials and stability
//! classification by the eigenvalues of the Jacobian.

use std::fmt;

use crate::error::{Error, Result};
use crate::fields::{MeridionalField, RHO_MIN};
use crate::quaternion::Quaternion;
use crate::spectral::{eigen_closed, jacobian};

/// `|V|` at or below which a flow counts as converged.
pub const CONVERGED_SPEED: f64 = 1e-10;
const AXIS_DRIFT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub x: Quaternion,
    pub h: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    Horizon,
    Converged,
    /// The next step would have crossed `rho = RHO_MIN`.
    LeftDomain,
}

impl fmt::Display for Termination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Termination::Horizon => "horizon",
            Termination::Converged => "converged",
            Termination::LeftDomain => "left_domain",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    pub step_dt: f64,
    pub terminated: Termination,
}

impl Trajectory {
    pub fn last(&self) -> &Sample {
        self.samples.last().expect("a trajectory has its initial sample")
    }
}

fn velocity(f: &MeridionalField, x: Quaternion) -> Result<Quaternion> {
    f.lift_to_r4(x).map(Quaternion::from_array)
}

fn axis_of(x: Quaternion) -> Quaternion {
    x.imag() * (1.0 / x.rho())
}

/// Classical fourth-order Runge-Kutta with fixed step `dt` up to `horizon`.
///
/// The axis direction of `x` is invariant under a meridional flow; a drift
/// beyond `1e-10` is reported as [`Error::AxisDrift`].
pub fn flow(f: &MeridionalField, x_init: Quaternion, dt: f64, horizon: f64) -> Result<Trajectory> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidStep(dt));
    }
    let rho = x_init.rho();
    if rho <= RHO_MIN {
        return Err(Error::OnAxis { rho });
    }
    let axis = axis_of(x_init);
    let mut x = x_init;
    let mut t = 0.0;
    let mut samples = vec![Sample { t, x, h: f.potential(x)? }];
    let steps = (horizon / dt).round().max(0.0) as usize;
    let mut terminated = Termination::Horizon;
    for _ in 0..steps {
        let k1 = velocity(f, x)?;
        if k1.norm() <= CONVERGED_SPEED {
            terminated = Termination::Converged;
            break;
        }
        let stage = |p: Quaternion| -> Option<Result<Quaternion>> {
            if !p.is_finite() || p.rho() <= RHO_MIN {
                return None;
            }
            Some(velocity(f, p))
        };
        let Some(k2) = stage(x + k1 * (dt / 2.0)).transpose()? else {
            terminated = Termination::LeftDomain;
            break;
        };
        let Some(k3) = stage(x + k2 * (dt / 2.0)).transpose()? else {
            terminated = Termination::LeftDomain;
            break;
        };
        let Some(k4) = stage(x + k3 * dt).transpose()? else {
            terminated = Termination::LeftDomain;
            break;
        };
        let next = x + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0);
        if !next.is_finite() || next.rho() <= RHO_MIN {
            terminated = Termination::LeftDomain;
            break;
        }
        let drift = axis_of(next).max_abs_diff(axis);
        if drift > AXIS_DRIFT_TOL {
            return Err(Error::AxisDrift { drift });
        }
        x = next;
        t += dt;
        samples.push(Sample { t, x, h: f.potential(x)? });
    }
    if terminated == Termination::Horizon && velocity(f, x)?.norm() <= CONVERGED_SPEED {
        terminated = Termination::Converged;
    }
    Ok(Trajectory {
        samples,
        step_dt: dt,
        terminated,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StabilityClass {
    Source,
    Sink,
    Saddle,
    Degenerate,
}

impl fmt::Display for StabilityClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StabilityClass::Source => "source",
            StabilityClass::Sink => "sink",
            StabilityClass::Saddle => "saddle",
            StabilityClass::Degenerate => "degenerate",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityVerdict {
    /// Poincaré coefficients, ascending.
    pub lambdas: [f64; 4],
    pub class: StabilityClass,
}

/// Sign class of four eigenvalues with zero tolerance `tol`.
pub fn classify_lambdas(lambdas: [f64; 4], tol: f64) -> StabilityClass {
    let pos = lambdas.iter().filter(|l| **l > tol).count();
    let neg = lambdas.iter().filter(|l| **l < -tol).count();
    match (pos, neg) {
        (4, 0) => StabilityClass::Source,
        (0, 4) => StabilityClass::Sink,
        (p, n) if p + n == 4 => StabilityClass::Saddle,
        _ => StabilityClass::Degenerate,
    }
}

/// Stability class at `x` from the closed-form eigenvalues, with tolerance
/// `1e-9 * max(1, |J|)`.
pub fn classify(f: &MeridionalField, x: Quaternion) -> Result<StabilityVerdict> {
    let report = eigen_closed(f, x)?;
    let tol = 1e-9 * jacobian(f, x)?.norm().max(1.0);
    Ok(StabilityVerdict {
        lambdas: report.lambdas,
        class: classify_lambdas(report.lambdas, tol),
    })
}

/// Largest decrease `h_k - h_{k+1}` of the potential along a trajectory;
/// zero or negative for a faithful gradient ascent.
pub fn monotonicity_audit(tr: &Trajectory) -> f64 {
    tr.samples
        .windows(2)
        .map(|w| w[0].h - w[1].h)
        .fold(0.0, f64::max)
}
