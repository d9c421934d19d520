//! Potential meridional fields `V = grad h` with `h(x) = g(x0, rho)`, and
//! residual checks for the first- and second-order systems they solve.
//!
//! Sign convention: `V0 = g_x0`, `Vrho = g_rho`; the Vekua pair is
//! `(u0, urho) = (V0, -Vrho)`.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::holomorphic::{default_fd_step, RadialFunction};
use crate::quaternion::Quaternion;
use crate::specfun::{bessel_j, bessel_y};

/// Smallest `rho` at which meridian quantities are evaluated.
pub const RHO_MIN: f64 = 1e-6;

/// `g` and its partials up to second order at one meridian point.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Jet {
    pub g: f64,
    pub g_x0: f64,
    pub g_rho: f64,
    pub g_x0x0: f64,
    pub g_x0rho: f64,
    pub g_rhorho: f64,
}

impl Jet {
    pub fn v0(&self) -> f64 {
        self.g_x0
    }

    pub fn vrho(&self) -> f64 {
        self.g_rho
    }

    pub fn dvrho_dx0(&self) -> f64 {
        self.g_x0rho
    }

    pub fn dvrho_drho(&self) -> f64 {
        self.g_rhorho
    }

    /// The Vekua pair `(u0, urho)`.
    pub fn vekua(&self) -> (f64, f64) {
        (self.g_x0, -self.g_rho)
    }
}

pub type JetFn = Arc<dyn Fn(f64, f64) -> Result<Jet> + Send + Sync>;
pub type StreamFn = Arc<dyn Fn(f64, f64) -> Result<f64> + Send + Sync>;

/// A meridional profile `g(x0, rho)` with analytic partials, its parameter
/// `alpha`, and optionally the Stokes stream function.
#[derive(Clone)]
pub struct MeridionalField {
    name: String,
    alpha: f64,
    jet: JetFn,
    stream: Option<StreamFn>,
}

impl fmt::Debug for MeridionalField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MeridionalField")
            .field("name", &self.name)
            .field("alpha", &self.alpha)
            .field("stream", &self.stream.is_some())
            .finish()
    }
}

/// `(Vrho, dVrho/dx0, dVrho/drho)` at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialData {
    pub vrho: f64,
    pub dvrho_dx0: f64,
    pub dvrho_drho: f64,
}

impl MeridionalField {
    pub fn from_parts(
        name: impl Into<String>,
        alpha: f64,
        jet: impl Fn(f64, f64) -> Result<Jet> + Send + Sync + 'static,
        stream: Option<StreamFn>,
    ) -> Self {
        Self {
            name: name.into(),
            alpha,
            jet: Arc::new(jet),
            stream,
        }
    }

    /// A field from a caller-supplied jet; no equation is assumed to hold.
    pub fn custom(
        name: impl Into<String>,
        alpha: f64,
        jet: impl Fn(f64, f64) -> Result<Jet> + Send + Sync + 'static,
    ) -> Self {
        Self::from_parts(name, alpha, jet, None)
    }

    pub fn with_stream(mut self, stream: impl Fn(f64, f64) -> Result<f64> + Send + Sync + 'static) -> Self {
        self.stream = Some(Arc::new(stream));
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn has_stream(&self) -> bool {
        self.stream.is_some()
    }

    pub fn jet(&self, x0: f64, rho: f64) -> Result<Jet> {
        if !(rho >= RHO_MIN) {
            return Err(Error::OnAxis { rho });
        }
        (self.jet)(x0, rho)
    }

    pub fn g(&self, x0: f64, rho: f64) -> Result<f64> {
        self.jet(x0, rho).map(|j| j.g)
    }

    pub fn v0(&self, x0: f64, rho: f64) -> Result<f64> {
        self.jet(x0, rho).map(|j| j.g_x0)
    }

    pub fn vrho(&self, x0: f64, rho: f64) -> Result<f64> {
        self.jet(x0, rho).map(|j| j.g_rho)
    }

    pub fn radial_data(&self, x0: f64, rho: f64) -> Result<RadialData> {
        let j = self.jet(x0, rho)?;
        Ok(RadialData {
            vrho: j.g_rho,
            dvrho_dx0: j.g_x0rho,
            dvrho_drho: j.g_rhorho,
        })
    }

    pub fn stream(&self, x0: f64, rho: f64) -> Result<f64> {
        let s = self.stream.as_ref().ok_or(Error::NoStream)?;
        if !(rho >= RHO_MIN) {
            return Err(Error::OnAxis { rho });
        }
        s(x0, rho)
    }

    /// `h(x) = g(x0, rho)`.
    pub fn potential(&self, x: Quaternion) -> Result<f64> {
        self.g(x.x0, x.rho())
    }

    /// `(V0, V1, V2, V3)` with `Vm = Vrho * xm / rho`.
    pub fn lift_to_r4(&self, x: Quaternion) -> Result<[f64; 4]> {
        let rho = x.rho();
        if rho < RHO_MIN {
            return Err(Error::OnAxis { rho });
        }
        let j = self.jet(x.x0, rho)?;
        let s = j.g_rho / rho;
        Ok([j.g_x0, s * x.x1, s * x.x2, s * x.x3])
    }
}

/// Probe points for the holomorphy check, in `(x0, rho)`.
const HOLOMORPHY_PROBES: [(f64, f64); 4] = [(0.3, 0.7), (-0.6, 1.3), (1.1, 0.4), (-1.7, 2.2)];

/// The `alpha = 2` field with potential `g = Re G` and stream `Im G`.
///
/// `G' = V0 - i Vrho` and `G'' = g_x0x0 - i g_x0rho` on the lift.
pub fn from_holomorphic_potential(g: &RadialFunction) -> Result<MeridionalField> {
    for (x0, rho) in HOLOMORPHY_PROBES {
        let h = default_fd_step(x0, rho);
        let Ok(r) = g.antiholomorphy_residual(x0, rho, h) else {
            continue;
        };
        let Ok(w) = g.eval_complex(Complex64::new(x0, rho)) else {
            continue;
        };
        let scale = 1f64.max(w.norm());
        if r > 1e-6 * scale {
            return Err(Error::NotHolomorphic {
                name: g.name().to_string(),
                residual: r,
            });
        }
    }
    let d1 = g.derivative()?;
    let d2 = d1.derivative()?;
    let g_jet = g.clone();
    let g_stream = g.clone();
    Ok(MeridionalField::from_parts(
        format!("holo[{}]", g.name()),
        2.0,
        move |x0, rho| {
            let z = Complex64::new(x0, rho);
            let v = g_jet.eval_complex(z)?;
            let p = d1.eval_complex(z)?;
            let q = d2.eval_complex(z)?;
            Ok(Jet {
                g: v.re,
                g_x0: p.re,
                g_rho: -p.im,
                g_x0x0: q.re,
                g_x0rho: -q.im,
                g_rhorho: -q.re,
            })
        },
        Some(Arc::new(move |x0, rho| {
            g_stream.eval_complex(Complex64::new(x0, rho)).map(|w| w.im)
        })),
    ))
}

/// Parameters of `g = Xi(x0) Upsilon(rho)` with
/// `Xi = b1 cosh(beta x0) + b2 sinh(beta x0)` and
/// `Upsilon = rho^nu [a1 J_nu(beta rho) + a2 Y_nu(beta rho)]`, `nu = (alpha - 1)/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeparableParams {
    pub alpha: f64,
    pub beta: f64,
    pub b1: f64,
    pub b2: f64,
    pub a1: f64,
    pub a2: f64,
}

impl SeparableParams {
    pub fn new(alpha: f64, beta: f64, b: (f64, f64), a: (f64, f64)) -> Self {
        Self {
            alpha,
            beta,
            b1: b.0,
            b2: b.1,
            a1: a.0,
            a2: a.1,
        }
    }

    pub fn nu(&self) -> f64 {
        (self.alpha - 1.0) / 2.0
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return Err(Error::InvalidParams(format!("beta must be positive, got {}", self.beta)));
        }
        for (k, v) in [("alpha", self.alpha), ("b1", self.b1), ("b2", self.b2), ("a1", self.a1), ("a2", self.a2)] {
            if !v.is_finite() {
                return Err(Error::InvalidParams(format!("{k} must be finite")));
            }
        }
        let nu = self.nu();
        if self.a2 != 0.0 && (nu - nu.round()).abs() <= 1e-8 {
            return Err(Error::IntegerOrderUnsupported { nu });
        }
        Ok(())
    }

    /// `a1 J_mu(x) + a2 Y_mu(x)`.
    fn cylinder(&self, mu: f64, x: f64) -> Result<f64> {
        let mut v = self.a1 * bessel_j(mu, x)?;
        if self.a2 != 0.0 {
            v += self.a2 * bessel_y(mu, x)?;
        }
        Ok(v)
    }

    /// `(Xi, Xi')`.
    fn longitudinal(&self, x0: f64) -> (f64, f64) {
        let (s, c) = ((self.beta * x0).sinh(), (self.beta * x0).cosh());
        (self.b1 * c + self.b2 * s, self.beta * (self.b1 * s + self.b2 * c))
    }

    /// `(Upsilon, Upsilon', Upsilon'')` via
    /// `(rho^nu Z_nu)' = beta rho^nu Z_{nu-1}` and
    /// `Upsilon'' = beta rho^nu [Z_{nu-1}/rho + beta Z_{nu-2}]`.
    fn radial(&self, rho: f64) -> Result<(f64, f64, f64)> {
        let nu = self.nu();
        let x = self.beta * rho;
        let p = rho.powf(nu);
        let z0 = self.cylinder(nu, x)?;
        let z1 = self.cylinder(nu - 1.0, x)?;
        let z2 = self.cylinder(nu - 2.0, x)?;
        Ok((p * z0, self.beta * p * z1, self.beta * p * (z1 / rho + self.beta * z2)))
    }
}

/// Separable solution of the Euler-Poisson-Darboux equation; its stream
/// function is `-rho^(2-alpha) Upsilon' Xi' / beta^2`.
pub fn from_separable(p: SeparableParams) -> Result<MeridionalField> {
    p.validate()?;
    let name = format!(
        "separable[alpha={}, beta={}, b=({}, {}), a=({}, {})]",
        p.alpha, p.beta, p.b1, p.b2, p.a1, p.a2
    );
    Ok(MeridionalField::from_parts(
        name,
        p.alpha,
        move |x0, rho| {
            let (xi, dxi) = p.longitudinal(x0);
            let (u, du, ddu) = p.radial(rho)?;
            Ok(Jet {
                g: xi * u,
                g_x0: dxi * u,
                g_rho: xi * du,
                g_x0x0: p.beta * p.beta * xi * u,
                g_x0rho: dxi * du,
                g_rhorho: xi * ddu,
            })
        },
        Some(Arc::new(move |x0, rho| {
            let (_, dxi) = p.longitudinal(x0);
            let (_, du, _) = p.radial(rho)?;
            Ok(-rho.powf(2.0 - p.alpha) * du * dxi / (p.beta * p.beta))
        })),
    ))
}

pub type ScalarField<'a> = &'a dyn Fn(Quaternion) -> f64;
pub type VectorField<'a> = &'a dyn Fn(Quaternion) -> [f64; 4];

fn check_step(step: f64, scale: f64) -> Result<()> {
    if !(step > 0.0 && step.is_finite()) || step >= scale {
        return Err(Error::StepTooLarge { step, scale });
    }
    Ok(())
}

fn shifted(x: Quaternion, k: usize, d: f64) -> Quaternion {
    let mut a = x.to_array();
    a[k] += d;
    Quaternion::from_array(a)
}

fn fd_partial(h: ScalarField, x: Quaternion, k: usize, step: f64) -> f64 {
    (h(shifted(x, k, step)) - h(shifted(x, k, -step))) / (2.0 * step)
}

fn fd_gradient(h: ScalarField, x: Quaternion, step: f64) -> [f64; 4] {
    std::array::from_fn(|k| fd_partial(h, x, k, step))
}

fn fd_laplacian(h: ScalarField, x: Quaternion, step: f64) -> f64 {
    let c = h(x);
    (0..4)
        .map(|k| (h(shifted(x, k, step)) - 2.0 * c + h(shifted(x, k, -step))) / (step * step))
        .sum()
}

/// `|x3 Delta h - alpha h_x3|` by central differences.
pub fn verify_weinstein(h: ScalarField, alpha: f64, x: Quaternion, fd_step: f64) -> Result<f64> {
    check_step(fd_step, x.x3)?;
    let lap = fd_laplacian(h, x, fd_step);
    Ok((x.x3 * lap - alpha * fd_partial(h, x, 3, fd_step)).abs())
}

/// `|rho^2 Delta h - alpha (x1 h_x1 + x2 h_x2 + x3 h_x3)|` by central differences.
pub fn verify_axial_hyperbolic(h: ScalarField, alpha: f64, x: Quaternion, fd_step: f64) -> Result<f64> {
    let rho = x.rho();
    check_step(fd_step, rho)?;
    let lap = fd_laplacian(h, x, fd_step);
    let grad = fd_gradient(h, x, fd_step);
    let radial = x.x1 * grad[1] + x.x2 * grad[2] + x.x3 * grad[3];
    Ok((rho * rho * lap - alpha * radial).abs())
}

/// `|rho (g_x0x0 + g_rhorho) - (alpha - 2) g_rho|` from analytic partials.
pub fn verify_epd(f: &MeridionalField, x0: f64, rho: f64) -> Result<f64> {
    let j = f.jet(x0, rho)?;
    Ok((rho * (j.g_x0x0 + j.g_rhorho) - (f.alpha - 2.0) * j.g_rho).abs())
}

/// The EPD residual divided by `rho |g_x0x0| + rho |g_rhorho| + |alpha - 2| |g_rho|`,
/// meaningful where the terms themselves are large.
pub fn verify_epd_relative(f: &MeridionalField, x0: f64, rho: f64) -> Result<f64> {
    let j = f.jet(x0, rho)?;
    let scale = rho * (j.g_x0x0.abs() + j.g_rhorho.abs()) + (f.alpha - 2.0).abs() * j.g_rho.abs();
    let r = verify_epd(f, x0, rho)?;
    Ok(if scale > 0.0 { r / scale } else { r })
}

fn meridian_step(x0: f64, rho: f64) -> f64 {
    default_fd_step(x0, rho).min(rho / 2.0)
}

/// `|rho (s_x0x0 + s_rhorho) + (alpha - 2) s_rho|` for the stream function,
/// by central differences with step `fd_step`.
pub fn verify_stream(f: &MeridionalField, x0: f64, rho: f64, fd_step: f64) -> Result<f64> {
    if !f.has_stream() {
        return Err(Error::NoStream);
    }
    check_step(fd_step, rho - RHO_MIN)?;
    let s = |a: f64, b: f64| f.stream(a, b);
    let c = s(x0, rho)?;
    let h = fd_step;
    let sxx = (s(x0 + h, rho)? - 2.0 * c + s(x0 - h, rho)?) / (h * h);
    let (sp, sm) = (s(x0, rho + h)?, s(x0, rho - h)?);
    let srr = (sp - 2.0 * c + sm) / (h * h);
    let sr = (sp - sm) / (2.0 * h);
    Ok((rho * (sxx + srr) + (f.alpha - 2.0) * sr).abs())
}

/// `(|rho^(2-alpha) g_x0 - s_rho|, |rho^(2-alpha) g_rho + s_x0|)`, with the
/// stream partials by central differences.
pub fn verify_stokes_beltrami(f: &MeridionalField, x0: f64, rho: f64) -> Result<(f64, f64)> {
    if !f.has_stream() {
        return Err(Error::NoStream);
    }
    let j = f.jet(x0, rho)?;
    let h = meridian_step(x0, rho);
    let s_x0 = (f.stream(x0 + h, rho)? - f.stream(x0 - h, rho)?) / (2.0 * h);
    let s_rho = (f.stream(x0, rho + h)? - f.stream(x0, rho - h)?) / (2.0 * h);
    let w = rho.powf(2.0 - f.alpha);
    Ok(((w * j.g_x0 - s_rho).abs(), (w * j.g_rho + s_x0).abs()))
}

/// Residuals of the meridian system
/// `rho (dV0/dx0 + dVrho/drho) - (alpha - 2) Vrho = 0`, `dV0/drho = dVrho/dx0`
/// from analytic partials.
pub fn verify_meridian_system(f: &MeridionalField, x0: f64, rho: f64) -> Result<(f64, f64)> {
    let j = f.jet(x0, rho)?;
    let r1 = (rho * (j.g_x0x0 + j.g_rhorho) - (f.alpha - 2.0) * j.g_rho).abs();
    Ok((r1, 0.0))
}

/// The meridian system with `V0`, `Vrho` differentiated by central differences.
pub fn verify_meridian_system_fd(f: &MeridionalField, x0: f64, rho: f64, fd_step: f64) -> Result<(f64, f64)> {
    check_step(fd_step, rho - RHO_MIN)?;
    let h = fd_step;
    let (jxp, jxm) = (f.jet(x0 + h, rho)?, f.jet(x0 - h, rho)?);
    let (jrp, jrm) = (f.jet(x0, rho + h)?, f.jet(x0, rho - h)?);
    let j = f.jet(x0, rho)?;
    let dv0_dx0 = (jxp.g_x0 - jxm.g_x0) / (2.0 * h);
    let dv0_drho = (jrp.g_x0 - jrm.g_x0) / (2.0 * h);
    let dvr_dx0 = (jxp.g_rho - jxm.g_rho) / (2.0 * h);
    let dvr_drho = (jrp.g_rho - jrm.g_rho) / (2.0 * h);
    let r1 = (rho * (dv0_dx0 + dvr_drho) - (f.alpha - 2.0) * j.g_rho).abs();
    Ok((r1, (dv0_drho - dvr_dx0).abs()))
}

/// `|d(g_x0)/drho - g_x0rho|` by central differences.
pub fn cross_partial_residual(f: &MeridionalField, x0: f64, rho: f64, fd_step: f64) -> Result<f64> {
    check_step(fd_step, rho - RHO_MIN)?;
    let d = (f.v0(x0, rho + fd_step)? - f.v0(x0, rho - fd_step)?) / (2.0 * fd_step);
    Ok((d - f.jet(x0, rho)?.g_x0rho).abs())
}

/// The seven residuals of the first-order system in `u` with coefficient `phi`:
/// the divergence row, then `du0/dxm + dum/dx0` for `m = 1..3`, then
/// `du1/dx2 - du2/dx1`, `du1/dx3 - du3/dx1`, `du2/dx3 - du3/dx2`.
pub fn verify_general_system(u: VectorField, phi: ScalarField, x: Quaternion, fd_step: f64) -> Result<[f64; 7]> {
    check_step(fd_step, f64::INFINITY)?;
    let p = phi(x);
    if !(p > 0.0) {
        return Err(Error::InvalidParams(format!("phi must be positive, got {p}")));
    }
    let d: [[f64; 4]; 4] = std::array::from_fn(|k| {
        let (a, b) = (u(shifted(x, k, fd_step)), u(shifted(x, k, -fd_step)));
        std::array::from_fn(|c| (a[c] - b[c]) / (2.0 * fd_step))
    });
    // d[k][c] = du_c / dx_k
    let dphi = fd_gradient(phi, x, fd_step);
    let ux = u(x);
    let div = p * (d[0][0] - d[1][1] - d[2][2] - d[3][3])
        + (dphi[0] * ux[0] - dphi[1] * ux[1] - dphi[2] * ux[2] - dphi[3] * ux[3]);
    Ok([
        div.abs(),
        (d[1][0] + d[0][1]).abs(),
        (d[2][0] + d[0][2]).abs(),
        (d[3][0] + d[0][3]).abs(),
        (d[2][1] - d[1][2]).abs(),
        (d[3][1] - d[1][3]).abs(),
        (d[3][2] - d[2][3]).abs(),
    ])
}

/// Cartesian and angular meridionality conditions at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriterionReport {
    /// `|x2 h_x1 - x1 h_x2|`, `|x3 h_x1 - x1 h_x3|`, `|x3 h_x2 - x2 h_x3|`.
    pub cartesian: [f64; 3],
    /// `|dh/dtheta|`, `|dh/dpsi|`; present when `x3 > 0`.
    pub angular: Option<[f64; 2]>,
}

impl CriterionReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.cartesian.iter().chain(self.angular.iter().flatten()).all(|r| *r <= tol)
    }
}

pub fn criterion_check(h: ScalarField, x: Quaternion, fd_step: f64) -> Result<CriterionReport> {
    let rho = x.rho();
    if rho <= 0.0 {
        return Err(Error::OnAxis { rho });
    }
    check_step(fd_step, f64::INFINITY)?;
    let g = fd_gradient(h, x, fd_step);
    let cartesian = [
        (x.x2 * g[1] - x.x1 * g[2]).abs(),
        (x.x3 * g[1] - x.x1 * g[3]).abs(),
        (x.x3 * g[2] - x.x2 * g[3]).abs(),
    ];
    let angular = (x.x3 > 0.0).then(|| {
        let s = x.x2.hypot(x.x3);
        let d_theta = -s * g[1] + x.x1 * (x.x2 * g[2] + x.x3 * g[3]) / s;
        let d_psi = -x.x3 * g[2] + x.x2 * g[3];
        [d_theta.abs(), d_psi.abs()]
    });
    Ok(CriterionReport { cartesian, angular })
}

/// `|u1 x2 - u2 x1|`, `|u1 x3 - u3 x1|`, `|u2 x3 - u3 x2|`.
pub fn axial_symmetry_check(u: VectorField, x: Quaternion) -> [f64; 3] {
    let v = u(x);
    [
        (v[1] * x.x2 - v[2] * x.x1).abs(),
        (v[1] * x.x3 - v[3] * x.x1).abs(),
        (v[2] * x.x3 - v[3] * x.x2).abs(),
    ]
}

/// `|<grad h, W>|` with the gradient by central differences.
pub fn orthogonality_check(h: ScalarField, w: VectorField, x: Quaternion, fd_step: f64) -> Result<f64> {
    check_step(fd_step, f64::INFINITY)?;
    let g = fd_gradient(h, x, fd_step);
    let wv = w(x);
    Ok(g.iter().zip(wv).map(|(a, b)| a * b).sum::<f64>().abs())
}
