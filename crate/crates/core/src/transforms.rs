//! Laplace-Fueter and Fourier-Fueter transforms of real originals.
//!
//! Every transform is computed on the complex lift `z = x0 + i rho` with the
//! kernel `e^{-z tau}`, `cos(z tau)` or `sin(z tau)` and re-embedded along the
//! axis of `x`. Quadrature is panel Gauss-Legendre with panel doubling; an
//! inverse-square-root endpoint weight is removed by `tau = t* sin u`.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::sync::{Arc, OnceLock};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fields::{Jet, MeridionalField};
use crate::holomorphic::fueter_lift;
use crate::quaternion::Quaternion;

/// Default quadrature tolerance.
pub const DEFAULT_TOL: f64 = 1e-10;
const NODES: usize = 20;
const MIN_PANELS: usize = 2;
const MAX_PANELS: usize = 1 << 14;

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Support {
    /// `[0, T]`
    Compact(f64),
    SemiInfinite,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Singularity {
    None,
    /// Weight `1 / sqrt(t*^2 - tau^2)` on `[0, t*]`.
    InvSqrtAt(f64),
}

/// A real original `eta(tau)`, `tau >= 0`, with caller-asserted growth metadata.
///
/// `|eta(tau)| <= M e^{s0 tau}` is asserted, not verified; likewise the Hölder
/// condition (exponent `gamma` on intervals of length `delta0`) recorded by
/// `holder_asserted`. Originals with an inverse-square-root singularity store
/// the regular factor `eta(tau) sqrt(t*^2 - tau^2)` instead of `eta`.
#[derive(Clone)]
pub struct OriginalFunction {
    name: String,
    regular: RealFn,
    support: Support,
    growth_rate: f64,
    bound: f64,
    decay_rate: Option<f64>,
    singularity: Singularity,
    holder_asserted: bool,
}

impl fmt::Debug for OriginalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OriginalFunction")
            .field("name", &self.name)
            .field("support", &self.support)
            .field("growth_rate", &self.growth_rate)
            .field("bound", &self.bound)
            .field("decay_rate", &self.decay_rate)
            .field("singularity", &self.singularity)
            .finish()
    }
}

impl OriginalFunction {
    /// Original supported on `[0, t_max]`.
    pub fn compact(
        name: impl Into<String>,
        t_max: f64,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            regular: Arc::new(f),
            support: Support::Compact(t_max),
            growth_rate: 0.0,
            bound: 1.0,
            decay_rate: None,
            singularity: Singularity::None,
            holder_asserted: true,
        }
    }

    /// Original on `[0, inf)` with `|eta| <= bound * e^{growth_rate tau}`.
    pub fn semi_infinite(
        name: impl Into<String>,
        growth_rate: f64,
        bound: f64,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            regular: Arc::new(f),
            support: Support::SemiInfinite,
            growth_rate: growth_rate.max(0.0),
            bound,
            decay_rate: None,
            singularity: Singularity::None,
            holder_asserted: true,
        }
    }

    /// `eta(tau) = regular(tau) / sqrt(t^2 - tau^2)` on `[0, t]`.
    pub fn inv_sqrt_weighted(
        name: impl Into<String>,
        t: f64,
        regular: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            singularity: Singularity::InvSqrtAt(t),
            ..Self::compact(name, t, regular)
        }
    }

    /// Assert `|eta(tau)| <= bound * e^{-rate tau}`, which admits Fourier-Fueter
    /// transforms at `rho < rate` on semi-infinite support.
    pub fn with_decay(mut self, rate: f64) -> Self {
        self.decay_rate = Some(rate);
        self
    }

    pub fn with_holder_asserted(mut self, asserted: bool) -> Self {
        self.holder_asserted = asserted;
        self
    }

    pub fn zero() -> Self {
        Self::compact("0", 1.0, |_| 0.0)
    }

    pub fn constant(c: f64, t_max: f64) -> Self {
        Self::compact(format!("{c}"), t_max, move |_| c)
    }

    /// `e^{-a tau}` on `[0, inf)`.
    pub fn exp_decay(a: f64) -> Self {
        Self::semi_infinite(format!("exp(-{a} tau)"), 0.0, 1.0, move |t| (-a * t).exp())
            .with_decay(a)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn support(&self) -> Support {
        self.support
    }

    pub fn singularity(&self) -> Singularity {
        self.singularity
    }

    pub fn growth_rate(&self) -> f64 {
        self.growth_rate
    }

    pub fn decay_rate(&self) -> Option<f64> {
        self.decay_rate
    }

    pub fn holder_asserted(&self) -> bool {
        self.holder_asserted
    }

    /// `eta(tau)`; zero outside the support, `inf` at a marked singularity.
    pub fn eval(&self, tau: f64) -> f64 {
        if tau < 0.0 {
            return 0.0;
        }
        if let Support::Compact(t) = self.support {
            if tau > t {
                return 0.0;
            }
        }
        match self.singularity {
            Singularity::None => (self.regular)(tau),
            Singularity::InvSqrtAt(t) => {
                let w = t * t - tau * tau;
                if w <= 0.0 {
                    f64::INFINITY
                } else {
                    (self.regular)(tau) / w.sqrt()
                }
            }
        }
    }

    pub fn is_singular_at(&self, tau: f64) -> bool {
        matches!(self.singularity, Singularity::InvSqrtAt(t) if tau >= t)
    }
}

/// `cos(k arccos tau) / sqrt(1 - tau^2)` on `[0, 1]`.
pub fn chebyshev_original(k: u32) -> OriginalFunction {
    OriginalFunction::inv_sqrt_weighted(format!("T{k}/sqrt(1-t^2)"), 1.0, move |t: f64| {
        (k as f64 * t.clamp(-1.0, 1.0).acos()).cos()
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    GaussLegendrePanels,
    SinSubstitution,
}

/// How an integral was computed and how far it is trusted.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub scheme: Scheme,
    pub panels: usize,
    pub nodes_per_panel: usize,
    pub truncation_t: Option<f64>,
    pub tail_bound: f64,
}

fn gauss_legendre() -> &'static ([f64; NODES], [f64; NODES]) {
    static RULE: OnceLock<([f64; NODES], [f64; NODES])> = OnceLock::new();
    RULE.get_or_init(|| {
        let n = NODES;
        let mut x = [0.0; NODES];
        let mut w = [0.0; NODES];
        for i in 0..n {
            let mut t = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, t);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * t * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (t * p1 - p0) / (t * t - 1.0);
                let dt = p1 / dp;
                t -= dt;
                if dt.abs() < 1e-16 {
                    break;
                }
            }
            x[i] = t;
            w[i] = 2.0 / ((1.0 - t * t) * dp * dp);
        }
        (x, w)
    })
}

fn panel_sum<const K: usize>(f: &dyn Fn(f64) -> [f64; K], a: f64, b: f64, panels: usize) -> [f64; K] {
    let (xs, ws) = gauss_legendre();
    let h = (b - a) / panels as f64;
    let mut acc = [0.0; K];
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * h;
        let mut part = [0.0; K];
        for (x, w) in xs.iter().zip(ws) {
            let v = f(mid + 0.5 * h * x);
            for k in 0..K {
                part[k] += w * v[k];
            }
        }
        for k in 0..K {
            acc[k] += 0.5 * h * part[k];
        }
    }
    acc
}

/// Panel Gauss-Legendre on `[a, b]`, doubling panels until two successive
/// results differ by at most `tol * max(1, |I|)` in every component.
pub fn integrate<const K: usize>(
    f: &dyn Fn(f64) -> [f64; K],
    a: f64,
    b: f64,
    tol: f64,
) -> Result<([f64; K], usize, f64)> {
    let mut panels = MIN_PANELS;
    let mut prev = panel_sum(f, a, b, panels);
    let mut change = f64::INFINITY;
    while panels < MAX_PANELS {
        panels *= 2;
        let next = panel_sum(f, a, b, panels);
        let scale = next.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        change = next
            .iter()
            .zip(&prev)
            .fold(0.0f64, |m, (u, v)| m.max((u - v).abs()));
        if !change.is_finite() {
            break;
        }
        if change <= tol * scale {
            return Ok((next, panels, change));
        }
        prev = next;
    }
    Err(Error::QuadratureFailure { tol, change })
}

/// `int eta(tau) k(tau) dtau` for a vector-valued kernel `k`, dispatching on
/// support and singularity. `truncation_rate` is the exponential decay rate of
/// `|eta k|` used to truncate semi-infinite support.
fn integrate_original<const K: usize>(
    eta: &OriginalFunction,
    kernel: &dyn Fn(f64) -> [f64; K],
    truncation_rate: Option<f64>,
    tol: f64,
) -> Result<([f64; K], QuadratureSpec)> {
    let regular = eta.regular.clone();
    match (eta.support, eta.singularity) {
        (_, Singularity::InvSqrtAt(t)) => {
            let f = |u: f64| {
                let tau = t * u.sin();
                let r = regular(tau);
                let mut v = kernel(tau);
                for c in v.iter_mut() {
                    *c *= r;
                }
                v
            };
            let (v, panels, change) = integrate(&f, 0.0, FRAC_PI_2, tol)?;
            Ok((
                v,
                QuadratureSpec {
                    scheme: Scheme::SinSubstitution,
                    panels,
                    nodes_per_panel: NODES,
                    truncation_t: None,
                    tail_bound: change,
                },
            ))
        }
        (support, Singularity::None) => {
            let (t_max, trunc_err) = match support {
                Support::Compact(t) => (t, 0.0),
                Support::SemiInfinite => {
                    let r = truncation_rate.ok_or(Error::ConvergenceFailure {
                        what: "semi-infinite transform without decay",
                        terms: 0,
                        tail: f64::INFINITY,
                    })?;
                    let t = ((2.0 * eta.bound.max(f64::MIN_POSITIVE)) / (r * tol)).ln().max(1.0) / r;
                    (t, eta.bound * (-r * t).exp() / r)
                }
            };
            let f = |tau: f64| {
                let r = regular(tau);
                let mut v = kernel(tau);
                for c in v.iter_mut() {
                    *c *= r;
                }
                v
            };
            let (v, panels, change) = integrate(&f, 0.0, t_max, tol / 2.0)?;
            Ok((
                v,
                QuadratureSpec {
                    scheme: Scheme::GaussLegendrePanels,
                    panels,
                    nodes_per_panel: NODES,
                    truncation_t: matches!(support, Support::SemiInfinite).then_some(t_max),
                    tail_bound: change + trunc_err,
                },
            ))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kernel {
    Laplace,
    Cos,
    Sin,
}

fn fourier_rate(eta: &OriginalFunction, rho: f64) -> Result<Option<f64>> {
    match eta.support {
        Support::Compact(_) => Ok(None),
        Support::SemiInfinite => match eta.decay_rate {
            Some(d) if d > rho => Ok(Some(d - rho)),
            decay => Err(Error::KernelGrowth { rho, decay }),
        },
    }
}

fn transform_complex(
    kind: Kernel,
    eta: &OriginalFunction,
    z: Complex64,
    tol: f64,
) -> Result<(Complex64, QuadratureSpec)> {
    let rate = match kind {
        Kernel::Laplace => match eta.support {
            Support::Compact(_) => None,
            Support::SemiInfinite => {
                if z.re <= eta.growth_rate {
                    return Err(Error::AbscissaViolation {
                        x0: z.re,
                        s0: eta.growth_rate,
                    });
                }
                Some(match eta.decay_rate {
                    Some(d) => z.re + d,
                    None => z.re - eta.growth_rate,
                })
            }
        },
        Kernel::Cos | Kernel::Sin => fourier_rate(eta, z.im.abs())?,
    };
    let kernel = move |tau: f64| {
        let w = match kind {
            Kernel::Laplace => (-z * tau).exp(),
            Kernel::Cos => (z * tau).cos(),
            Kernel::Sin => (z * tau).sin(),
        };
        [w.re, w.im]
    };
    let ([re, im], spec) = integrate_original(eta, &kernel, rate, tol)?;
    Ok((Complex64::new(re, im), spec))
}

fn lifted(kind: Kernel, eta: &OriginalFunction, x: Quaternion, tol: f64) -> Result<(Quaternion, QuadratureSpec)> {
    let mut spec = None;
    let q = fueter_lift(x, |z| {
        let (v, s) = transform_complex(kind, eta, z, tol)?;
        spec = Some(s);
        Ok(v)
    })?;
    Ok((q, spec.expect("lift evaluates its closure")))
}

/// One-sided Laplace-Fueter transform `int_0^inf eta(tau) e^{-x tau} dtau`.
///
/// Compactly supported originals skip the abscissa check.
pub fn laplace_fueter(eta: &OriginalFunction, x: Quaternion, tol: f64) -> Result<Quaternion> {
    laplace_fueter_with_spec(eta, x, tol).map(|(q, _)| q)
}

pub fn laplace_fueter_with_spec(
    eta: &OriginalFunction,
    x: Quaternion,
    tol: f64,
) -> Result<(Quaternion, QuadratureSpec)> {
    lifted(Kernel::Laplace, eta, x, tol)
}

/// Fourier-Fueter cosine transform `int eta(tau) cos(x tau) dtau`.
pub fn ff_cos(eta: &OriginalFunction, x: Quaternion, tol: f64) -> Result<Quaternion> {
    ff_cos_with_spec(eta, x, tol).map(|(q, _)| q)
}

pub fn ff_cos_with_spec(
    eta: &OriginalFunction,
    x: Quaternion,
    tol: f64,
) -> Result<(Quaternion, QuadratureSpec)> {
    lifted(Kernel::Cos, eta, x, tol)
}

/// Fourier-Fueter sine transform `int eta(tau) sin(x tau) dtau`.
pub fn ff_sin(eta: &OriginalFunction, x: Quaternion, tol: f64) -> Result<Quaternion> {
    ff_sin_with_spec(eta, x, tol).map(|(q, _)| q)
}

pub fn ff_sin_with_spec(
    eta: &OriginalFunction,
    x: Quaternion,
    tol: f64,
) -> Result<(Quaternion, QuadratureSpec)> {
    lifted(Kernel::Sin, eta, x, tol)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

impl std::str::FromStr for Parity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "even" => Ok(Parity::Even),
            "odd" => Ok(Parity::Odd),
            other => Err(Error::InvalidParams(format!("unknown parity {other:?}"))),
        }
    }
}

/// `J_2n(x)` or `J_{2n+1}(x)` from its Chebyshev integral representation.
pub fn bessel_integral_rep(n: u32, parity: Parity, x: Quaternion, tol: f64) -> Result<Quaternion> {
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    let v = match parity {
        Parity::Even => ff_cos(&chebyshev_original(2 * n), x, tol)?,
        Parity::Odd => ff_sin(&chebyshev_original(2 * n + 1), x, tol)?,
    };
    Ok(v * (sign / FRAC_PI_2))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransformKind {
    Ffc,
    Ffs,
}

impl std::str::FromStr for TransformKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ffc" | "cos" => Ok(TransformKind::Ffc),
            "ffs" | "sin" => Ok(TransformKind::Ffs),
            other => Err(Error::InvalidParams(format!("unknown transform kind {other:?}"))),
        }
    }
}

/// `f(tau) / tau` with the removable singularity at 0 filled by `limit`.
fn over_tau(v: f64, tau: f64, limit: f64) -> f64 {
    if tau == 0.0 {
        limit
    } else {
        v / tau
    }
}

/// Value, partials and stream function of a transform profile at one point.
pub fn transform_jet(
    kind: TransformKind,
    eta: &OriginalFunction,
    x0: f64,
    rho: f64,
    tol: f64,
) -> Result<(Jet, f64)> {
    let rate = fourier_rate(eta, rho)?;
    let kernel = move |tau: f64| {
        let (s, c) = (x0 * tau).sin_cos();
        let (sh, ch) = ((rho * tau).sinh(), (rho * tau).cosh());
        match kind {
            TransformKind::Ffc => [
                over_tau(s * ch, tau, x0),
                c * ch,
                s * sh,
                -tau * s * ch,
                tau * c * sh,
                over_tau(c * sh, tau, rho),
            ],
            TransformKind::Ffs => [
                over_tau(1.0 - c * ch, tau, 0.0),
                s * ch,
                -c * sh,
                tau * c * ch,
                tau * s * sh,
                over_tau(s * sh, tau, 0.0),
            ],
        }
    };
    let ([g, v0, vrho, gxx, gxr, stream], _) = integrate_original(eta, &kernel, rate, tol)?;
    Ok((
        Jet {
            g,
            g_x0: v0,
            g_rho: vrho,
            g_x0x0: gxx,
            g_x0rho: gxr,
            g_rhorho: -gxx,
        },
        stream,
    ))
}

/// The `alpha = 2` meridional field generated by a Fourier-Fueter transform.
pub fn transform_field(kind: TransformKind, eta: OriginalFunction) -> Result<MeridionalField> {
    transform_field_with_tol(kind, eta, DEFAULT_TOL)
}

pub fn transform_field_with_tol(
    kind: TransformKind,
    eta: OriginalFunction,
    tol: f64,
) -> Result<MeridionalField> {
    fourier_rate(&eta, 0.0)?;
    let name = match kind {
        TransformKind::Ffc => format!("ffc[{}]", eta.name()),
        TransformKind::Ffs => format!("ffs[{}]", eta.name()),
    };
    let eta = Arc::new(eta);
    let eta2 = eta.clone();
    Ok(MeridionalField::from_parts(
        name,
        2.0,
        move |x0, rho| transform_jet(kind, &eta, x0, rho, tol).map(|(j, _)| j),
        Some(Arc::new(move |x0, rho| {
            transform_jet(kind, &eta2, x0, rho, tol).map(|(_, s)| s)
        })),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::{bessel_j, bessel_j_quat};
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    const TOL: f64 = 1e-12;

    fn unit() -> OriginalFunction {
        OriginalFunction::constant(1.0, 1.0)
    }

    #[test]
    fn gauss_legendre_is_exact_for_polynomials() {
        let f = |t: f64| [t.powi(39), t.powi(10)];
        let v = panel_sum(&f, 0.0, 1.0, 1);
        assert_relative_eq!(v[0], 1.0 / 40.0, max_relative = 1e-14);
        assert_relative_eq!(v[1], 1.0 / 11.0, max_relative = 1e-14);
        let (_, ws) = gauss_legendre();
        assert_relative_eq!(ws.iter().sum::<f64>(), 2.0, max_relative = 1e-14);
    }

    #[test]
    fn laplace_examples() {
        let v = laplace_fueter(&OriginalFunction::exp_decay(1.0), Quaternion::real(1.0), TOL).unwrap();
        assert!((v.x0 - 0.5).abs() < 1e-11);

        let one = OriginalFunction::semi_infinite("1", 0.0, 1.0, |_| 1.0);
        let v = laplace_fueter(&one, Quaternion::new(2.0, 0.0, 1.0, 0.0), 1e-11).unwrap();
        assert!(v.max_abs_diff(Quaternion::new(0.4, 0.0, -0.2, 0.0)) < 1e-10);

        let v = laplace_fueter(&OriginalFunction::zero(), Quaternion::new(1.0, 1.0, 0.0, 0.0), TOL).unwrap();
        assert_eq!(v, Quaternion::ZERO);

        assert!(matches!(
            laplace_fueter(&one, Quaternion::new(-0.5, 1.0, 0.0, 0.0), TOL),
            Err(Error::AbscissaViolation { .. })
        ));
    }

    #[test]
    fn ff_cos_examples() {
        let v = ff_cos(&unit(), Quaternion::real(1.0), TOL).unwrap();
        assert_relative_eq!(v.x0, 1f64.sin(), max_relative = 1e-12);
        let v = ff_cos(&unit(), Quaternion::ZERO, TOL).unwrap();
        assert_relative_eq!(v.x0, 1.0, max_relative = 1e-14);
        let v = ff_cos(&chebyshev_original(0), Quaternion::real(1.0), TOL).unwrap();
        assert_relative_eq!(v.x0, FRAC_PI_2 * 0.765_197_686_557_966_6, max_relative = 1e-12);
        assert_relative_eq!(v.x0, 1.201_969_715_317_206_5, max_relative = 1e-12);
    }

    #[test]
    fn ff_sin_examples() {
        let v = ff_sin(&unit(), Quaternion::real(PI), TOL).unwrap();
        assert_relative_eq!(v.x0, 2.0 / PI, max_relative = 1e-12);
        let v = ff_sin(&chebyshev_original(3), Quaternion::ZERO, TOL).unwrap();
        assert_eq!(v, Quaternion::ZERO);
        let v = ff_sin(&chebyshev_original(1), Quaternion::real(1.0), TOL).unwrap();
        assert_relative_eq!(v.x0, FRAC_PI_2 * 0.440_050_585_744_933_5, max_relative = 1e-12);
    }

    #[test]
    fn kernel_growth_guard() {
        let eta = OriginalFunction::exp_decay(2.0);
        assert!(ff_cos(&eta, Quaternion::new(1.0, 1.0, 0.0, 0.0), TOL).is_ok());
        assert!(matches!(
            ff_cos(&eta, Quaternion::new(1.0, 3.0, 0.0, 0.0), TOL),
            Err(Error::KernelGrowth { .. })
        ));
        let flat = OriginalFunction::semi_infinite("1", 0.0, 1.0, |_| 1.0);
        assert!(matches!(
            ff_sin(&flat, Quaternion::real(1.0), TOL),
            Err(Error::KernelGrowth { decay: None, .. })
        ));
        assert!(transform_field(TransformKind::Ffc, flat).is_err());
    }

    #[test]
    fn decaying_original_matches_closed_form() {
        // int_0^inf e^{-a t} cos(z t) dt = a / (a^2 + z^2)
        let a = 2.0;
        let eta = OriginalFunction::exp_decay(a);
        let x = Quaternion::new(0.7, 0.0, 0.6, 0.8);
        let v = ff_cos(&eta, x, TOL).unwrap();
        let z = Complex64::new(0.7, 1.0);
        let exact = a / (a * a + z * z);
        assert!((v.x0 - exact.re).abs() < 1e-10);
        assert!((v.x2 - exact.im * 0.6).abs() < 1e-10);
    }

    #[test]
    fn bessel_rep_examples() {
        let v = bessel_integral_rep(0, Parity::Even, Quaternion::ZERO, TOL).unwrap();
        assert!((v.x0 - 1.0).abs() < 1e-14);
        let x = Quaternion::new(1.0, 0.6, 0.0, 0.8);
        let v = bessel_integral_rep(0, Parity::Even, x, TOL).unwrap();
        assert!(v.max_abs_diff(bessel_j_quat(0, x).unwrap()) < 1e-10);
        let v = bessel_integral_rep(1, Parity::Even, Quaternion::real(2.0), TOL).unwrap();
        assert_relative_eq!(v.x0, bessel_j(2.0, 2.0).unwrap(), max_relative = 1e-11);
        assert_relative_eq!(v.x0, 0.352_834_028_615_637_7, max_relative = 1e-11);
    }

    #[test]
    fn bessel_rep_agrees_with_series_up_to_order_four() {
        let points = [
            Quaternion::new(0.3, 0.2, -0.5, 0.1),
            Quaternion::new(-1.5, 0.0, 1.0, 1.0),
            Quaternion::new(2.0, 0.5, 0.5, -0.5),
        ];
        for x in points {
            for order in 0..=4u32 {
                let (n, parity) = (order / 2, if order % 2 == 0 { Parity::Even } else { Parity::Odd });
                let v = bessel_integral_rep(n, parity, x, 1e-11).unwrap();
                let s = bessel_j_quat(order, x).unwrap();
                assert!(v.max_abs_diff(s) < 1e-8, "order {order} at {x}");
            }
        }
    }

    #[test]
    fn laplace_relations_on_compact_support() {
        let originals = [unit(), OriginalFunction::compact("t^2", 1.5, |t| t * t)];
        for eta in &originals {
            for x in [Quaternion::new(0.4, 0.3, 0.0, -0.2), Quaternion::new(-1.0, 0.0, 0.7, 0.0)] {
                let axis = x.axial_split().axis().unwrap();
                let y = axis * x;
                let lp = laplace_fueter(eta, y, TOL).unwrap();
                let lm = laplace_fueter(eta, -y, TOL).unwrap();
                let c = ff_cos(eta, x, TOL).unwrap();
                assert!(c.max_abs_diff((lp + lm) * 0.5) < 1e-10);
                let s = ff_sin(eta, x, TOL).unwrap();
                assert!(s.max_abs_diff(axis * (lp - lm) * 0.5) < 1e-10);
            }
        }
    }

    #[test]
    fn halving_panels_stays_within_reported_tail() {
        let eta = chebyshev_original(4);
        let z = Complex64::new(1.3, 0.9);
        let (v, spec) = transform_complex(Kernel::Cos, &eta, z, 1e-9).unwrap();
        let regular = eta.regular.clone();
        let f = move |u: f64| {
            let w = (z * u.sin()).cos() * regular(u.sin());
            [w.re, w.im]
        };
        let coarse = panel_sum(&f, 0.0, FRAC_PI_2, spec.panels / 2);
        let d = (coarse[0] - v.re).abs().max((coarse[1] - v.im).abs());
        assert!(d <= spec.tail_bound);
        assert_eq!(spec.scheme, Scheme::SinSubstitution);
    }

    #[test]
    fn transform_field_examples() {
        let f = transform_field(TransformKind::Ffc, chebyshev_original(0)).unwrap();
        assert!(f.vrho(0.5, 1e-6).unwrap().abs() < 1e-5);

        // brute-force midpoint rule on the substituted integral
        let n = 5000;
        let h = FRAC_PI_2 / n as f64;
        let brute: f64 = (0..n)
            .map(|k| {
                let t = ((k as f64 + 0.5) * h).sin();
                t.cosh() * t.cos() * h
            })
            .sum();
        assert!((f.v0(1.0, 1.0).unwrap() - brute).abs() < 1e-9);

        let f = transform_field(TransformKind::Ffs, unit()).unwrap();
        assert_relative_eq!(f.v0(PI, 1e-6).unwrap(), 2.0 / PI, max_relative = 1e-9);
    }

    #[test]
    fn transform_partials_match_finite_differences() {
        for kind in [TransformKind::Ffc, TransformKind::Ffs] {
            let f = transform_field(kind, chebyshev_original(2)).unwrap();
            let (x0, rho, h) = (0.4, 0.8, 1e-5);
            let j = f.jet(x0, rho).unwrap();
            let g = |a, b| f.jet(a, b).unwrap().g;
            assert!(((g(x0 + h, rho) - g(x0 - h, rho)) / (2.0 * h) - j.g_x0).abs() < 1e-8);
            assert!(((g(x0, rho + h) - g(x0, rho - h)) / (2.0 * h) - j.g_rho).abs() < 1e-8);
            let vr = |a, b| f.jet(a, b).unwrap().g_rho;
            assert!(((vr(x0 + h, rho) - vr(x0 - h, rho)) / (2.0 * h) - j.g_x0rho).abs() < 1e-7);
            assert!(((vr(x0, rho + h) - vr(x0, rho - h)) / (2.0 * h) - j.g_rhorho).abs() < 1e-7);
        }
    }
}
