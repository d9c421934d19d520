//! Radially holomorphic functions in R^4.
//!
//! Every function here is a Fueter-type function `G = g(x0, rho) + I gh(x0, rho)`
//! obtained from a complex-analytic function with real coefficients. It is
//! stored once, as its complex lift on the meridian plane `z = x0 + i rho`,
//! and quaternion values are produced by re-embedding `Re + Im * I` along
//! the axial direction of the argument.
//!
//! The radial operators `d_rad = (d/dx0 - I d/drho) / 2` and
//! `dbar_rad = (d/dx0 + I d/drho) / 2` become the Wirtinger derivatives
//! `d/dz` and `d/dzbar` on the lift.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quaternion::Quaternion;

/// A meridian-plane pair `(a, b)`, read as `a + I b`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MeridianValue {
    pub a: f64,
    pub b: f64,
}

impl MeridianValue {
    pub fn new(a: f64, b: f64) -> Self {
        Self { a, b }
    }

    pub fn norm(self) -> f64 {
        self.a.hypot(self.b)
    }

    pub fn embed(self, axis: Quaternion) -> Quaternion {
        Quaternion::real(self.a) + axis * self.b
    }
}

impl From<Complex64> for MeridianValue {
    fn from(z: Complex64) -> Self {
        Self::new(z.re, z.im)
    }
}

impl From<MeridianValue> for Complex64 {
    fn from(v: MeridianValue) -> Self {
        Complex64::new(v.a, v.b)
    }
}

/// Relative size below which the imaginary part of a real-axis value is
/// treated as the vanishing limit of `sin(n varphi)`-type terms.
const ON_AXIS_IMAG_TOL: f64 = 1e-14;

/// Evaluates a complex lift at a quaternion argument.
///
/// Off the axis this is `Re f(z) + Im f(z) * I` with `z = x0 + i rho`. On the
/// axis the value is accepted only when its imaginary part vanishes there.
pub fn fueter_lift<F>(x: Quaternion, f: F) -> Result<Quaternion>
where
    F: FnOnce(Complex64) -> Result<Complex64>,
{
    let ax = x.axial_split();
    let w = f(Complex64::new(ax.x0, ax.rho))?;
    match ax.axis {
        Some(axis) => Ok(MeridianValue::from(w).embed(axis)),
        None if w.im.abs() <= ON_AXIS_IMAG_TOL * w.re.abs().max(1.0) => Ok(Quaternion::real(w.re)),
        None => Err(Error::OnAxis { rho: ax.rho }),
    }
}

/// Default central-difference step, `1e-4 * max(1, |x0|, rho)`.
pub fn default_fd_step(x0: f64, rho: f64) -> f64 {
    1e-4 * 1f64.max(x0.abs()).max(rho)
}

/// Real-coefficient Moebius map `(a x + b)(c x + d)^-1` with `ad - bc = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MoebiusRealCoeffs {
    a: f64,
    b: f64,
    c: f64,
    d: f64,
}

impl MoebiusRealCoeffs {
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        let det = a * d - b * c;
        if !det.is_finite() || (det - 1.0).abs() > 1e-12 {
            return Err(Error::NotUnimodular { det });
        }
        Ok(Self { a, b, c, d })
    }

    /// The `c = 1` family: `F = a - (x + d)^-1`, with `b = ad - 1`.
    pub fn unit_c(a: f64, d: f64) -> Self {
        Self {
            a,
            b: a * d - 1.0,
            c: 1.0,
            d,
        }
    }

    pub fn coeffs(&self) -> [f64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    /// Map of the matrix product `self * other`, i.e. `self(other(x))`.
    pub fn compose(&self, other: &Self) -> Self {
        Self {
            a: self.a * other.a + self.b * other.c,
            b: self.a * other.b + self.b * other.d,
            c: self.c * other.a + self.d * other.c,
            d: self.c * other.b + self.d * other.d,
        }
    }

    fn eval(&self, z: Complex64) -> Result<Complex64> {
        let den = z * self.c + self.d;
        if den.norm_sqr() == 0.0 {
            return Err(Error::Pole { x0: z.re });
        }
        Ok((z * self.a + self.b) / den)
    }
}

type LiftFn = Arc<dyn Fn(Complex64) -> Complex64 + Send + Sync>;

#[derive(Clone)]
enum Expr {
    Const(f64),
    /// `(z + shift)^n`
    PowShift { n: i32, shift: f64 },
    Exp,
    Cos,
    Sin,
    /// Principal `ln(z + shift)`.
    LnShift(f64),
    Moebius(MoebiusRealCoeffs),
    Scale(f64, Box<Expr>),
    Sum(Vec<Expr>),
    /// Quaternion conjugate of a radially holomorphic function.
    Conj(Box<Expr>),
    /// User-supplied lift followed by its successive derivatives.
    Custom(Vec<LiftFn>),
}

impl Expr {
    fn eval(&self, z: Complex64) -> Result<Complex64> {
        Ok(match self {
            Expr::Const(c) => Complex64::new(*c, 0.0),
            Expr::PowShift { n, shift } => {
                let w = z + shift;
                if *n < 0 && w.norm_sqr() == 0.0 {
                    return Err(Error::Pole { x0: z.re });
                }
                w.powi(*n)
            }
            Expr::Exp => z.exp(),
            Expr::Cos => z.cos(),
            Expr::Sin => z.sin(),
            Expr::LnShift(shift) => {
                let w = z + shift;
                if w.im == 0.0 && w.re <= 0.0 {
                    return Err(if w.re == 0.0 {
                        Error::Pole { x0: z.re }
                    } else {
                        Error::BranchCut { x0: z.re }
                    });
                }
                w.ln()
            }
            Expr::Moebius(m) => m.eval(z)?,
            Expr::Scale(k, e) => e.eval(z)? * *k,
            Expr::Sum(terms) => {
                let mut acc = Complex64::new(0.0, 0.0);
                for t in terms {
                    acc += t.eval(z)?;
                }
                acc
            }
            Expr::Conj(e) => e.eval(z)?.conj(),
            Expr::Custom(fs) => fs[0](z),
        })
    }

    /// Wirtinger derivative `d/dz`.
    fn derivative(&self) -> Result<Expr> {
        Ok(match self {
            Expr::Const(_) | Expr::Conj(_) => Expr::Const(0.0),
            Expr::PowShift { n: 0, .. } => Expr::Const(0.0),
            Expr::PowShift { n, shift } => Expr::Scale(
                *n as f64,
                Box::new(Expr::PowShift {
                    n: n - 1,
                    shift: *shift,
                }),
            ),
            Expr::Exp => Expr::Exp,
            Expr::Cos => Expr::Scale(-1.0, Box::new(Expr::Sin)),
            Expr::Sin => Expr::Cos,
            Expr::LnShift(shift) => Expr::PowShift {
                n: -1,
                shift: *shift,
            },
            Expr::Moebius(m) if m.c == 0.0 => Expr::Const(m.a / m.d),
            Expr::Moebius(m) => Expr::Scale(
                1.0 / (m.c * m.c),
                Box::new(Expr::PowShift {
                    n: -2,
                    shift: m.d / m.c,
                }),
            ),
            Expr::Scale(k, e) => Expr::Scale(*k, Box::new(e.derivative()?)),
            Expr::Sum(terms) => Expr::Sum(
                terms
                    .iter()
                    .map(Expr::derivative)
                    .collect::<Result<Vec<_>>>()?,
            ),
            Expr::Custom(fs) if fs.len() > 1 => Expr::Custom(fs[1..].to_vec()),
            Expr::Custom(_) => {
                return Err(Error::Unsupported(
                    "custom function without a derivative".into(),
                ))
            }
        })
    }

    fn primitive(&self) -> Result<Expr> {
        Ok(match self {
            Expr::Const(k) => Expr::Scale(*k, Box::new(Expr::PowShift { n: 1, shift: 0.0 })),
            Expr::PowShift { n: -1, shift } => Expr::LnShift(*shift),
            Expr::PowShift { n, shift } => Expr::Scale(
                1.0 / (*n as f64 + 1.0),
                Box::new(Expr::PowShift {
                    n: n + 1,
                    shift: *shift,
                }),
            ),
            Expr::Exp => Expr::Exp,
            Expr::Cos => Expr::Sin,
            Expr::Sin => Expr::Scale(-1.0, Box::new(Expr::Cos)),
            Expr::Moebius(m) if m.c == 0.0 => Expr::Sum(vec![
                Expr::Scale(m.a / (2.0 * m.d), Box::new(Expr::PowShift { n: 2, shift: 0.0 })),
                Expr::Scale(m.b / m.d, Box::new(Expr::PowShift { n: 1, shift: 0.0 })),
            ]),
            // a/c - 1/(c (c z + d)) integrates to (a/c) z - ln(z + d/c) / c^2
            Expr::Moebius(m) => Expr::Sum(vec![
                Expr::Scale(m.a / m.c, Box::new(Expr::PowShift { n: 1, shift: 0.0 })),
                Expr::Scale(-1.0 / (m.c * m.c), Box::new(Expr::LnShift(m.d / m.c))),
            ]),
            Expr::Scale(k, e) => Expr::Scale(*k, Box::new(e.primitive()?)),
            Expr::Sum(terms) => Expr::Sum(
                terms
                    .iter()
                    .map(Expr::primitive)
                    .collect::<Result<Vec<_>>>()?,
            ),
            Expr::LnShift(_) => return Err(Error::Unsupported("logarithm".into())),
            Expr::Conj(_) => {
                return Err(Error::Unsupported(
                    "radially anti-holomorphic function".into(),
                ))
            }
            Expr::Custom(_) => return Err(Error::Unsupported("custom function".into())),
        })
    }
}

/// The elementary radially holomorphic functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Elementary {
    Pow(i32),
    Exp,
    Cos,
    Sin,
    Ln,
}

impl FromStr for Elementary {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Ok(match s {
            "exp" | "qexp" => Elementary::Exp,
            "cos" | "qcos" => Elementary::Cos,
            "sin" | "qsin" => Elementary::Sin,
            "ln" | "qln" => Elementary::Ln,
            _ => {
                let n = s
                    .strip_prefix("qpow")
                    .or_else(|| s.strip_prefix("pow"))
                    .ok_or_else(|| format!("unknown elementary function `{s}`"))?;
                Elementary::Pow(n.parse().map_err(|_| format!("bad power in `{s}`"))?)
            }
        })
    }
}

/// A radially holomorphic (or, via [`RadialFunction::conj`], anti-holomorphic)
/// function stored as its meridian-plane lift.
#[derive(Clone)]
pub struct RadialFunction {
    name: String,
    expr: Expr,
}

impl fmt::Debug for RadialFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RadialFunction")
            .field("name", &self.name)
            .finish()
    }
}

impl RadialFunction {
    fn new(name: impl Into<String>, expr: Expr) -> Self {
        Self {
            name: name.into(),
            expr,
        }
    }

    pub fn elementary(e: Elementary) -> Self {
        match e {
            Elementary::Pow(n) => Self::new(format!("qpow({n})"), Expr::PowShift { n, shift: 0.0 }),
            Elementary::Exp => Self::new("qexp", Expr::Exp),
            Elementary::Cos => Self::new("qcos", Expr::Cos),
            Elementary::Sin => Self::new("qsin", Expr::Sin),
            Elementary::Ln => Self::new("qln", Expr::LnShift(0.0)),
        }
    }

    pub fn qpow(n: i32) -> Self {
        Self::elementary(Elementary::Pow(n))
    }

    pub fn qexp() -> Self {
        Self::elementary(Elementary::Exp)
    }

    pub fn qcos() -> Self {
        Self::elementary(Elementary::Cos)
    }

    pub fn qsin() -> Self {
        Self::elementary(Elementary::Sin)
    }

    pub fn qln() -> Self {
        Self::elementary(Elementary::Ln)
    }

    pub fn constant(c: f64) -> Self {
        Self::new(format!("{c}"), Expr::Const(c))
    }

    /// `ln(x + shift)`, principal branch.
    pub fn ln_shifted(shift: f64) -> Self {
        Self::new(format!("ln(x{shift:+})"), Expr::LnShift(shift))
    }

    pub fn moebius(m: MoebiusRealCoeffs) -> Self {
        let [a, b, c, d] = m.coeffs();
        Self::new(format!("moebius({a},{b},{c},{d})"), Expr::Moebius(m))
    }

    /// A holomorphic function given by its complex lift and as many
    /// successive derivatives as are known.
    pub fn custom(name: impl Into<String>, lift_and_derivatives: Vec<LiftFn>) -> Self {
        assert!(
            !lift_and_derivatives.is_empty(),
            "custom radial function needs at least its value"
        );
        Self::new(name, Expr::Custom(lift_and_derivatives))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn scaled(&self, k: f64) -> Self {
        Self::new(format!("{k}*{}", self.name), Expr::Scale(k, Box::new(self.expr.clone())))
    }

    pub fn plus(&self, other: &Self) -> Self {
        Self::new(
            format!("{}+{}", self.name, other.name),
            Expr::Sum(vec![self.expr.clone(), other.expr.clone()]),
        )
    }

    /// The radially anti-holomorphic conjugate `g - I gh`.
    pub fn conj(&self) -> Self {
        Self::new(format!("conj({})", self.name), Expr::Conj(Box::new(self.expr.clone())))
    }

    /// Value of the complex lift at `z = x0 + i rho`.
    pub fn eval_complex(&self, z: Complex64) -> Result<Complex64> {
        self.expr.eval(z)
    }

    pub fn eval_meridian(&self, x0: f64, rho: f64) -> Result<MeridianValue> {
        self.eval_complex(Complex64::new(x0, rho)).map(Into::into)
    }

    /// Quaternion value `a + b * I` at `x`.
    pub fn eval_lift(&self, x: Quaternion) -> Result<Quaternion> {
        fueter_lift(x, |z| self.eval_complex(z))
    }

    /// `G' = d_rad G` as a function in its own right.
    pub fn derivative(&self) -> Result<Self> {
        Ok(Self::new(format!("({})'", self.name), self.expr.derivative()?))
    }

    /// `d_rad G` at a meridian point, from the registered derivative table.
    pub fn radial_derivative(&self, x0: f64, rho: f64) -> Result<MeridianValue> {
        if rho <= 0.0 {
            return Err(Error::OnAxis { rho });
        }
        self.expr.derivative()?.eval(Complex64::new(x0, rho)).map(Into::into)
    }

    /// Radially holomorphic primitive with zero integration constant.
    pub fn primitive(&self) -> Result<Self> {
        Ok(Self::new(format!("prim({})", self.name), self.expr.primitive()?))
    }

    /// Central-difference estimate of `|dbar_rad G|` with step `h`.
    pub fn antiholomorphy_residual(&self, x0: f64, rho: f64, h: f64) -> Result<f64> {
        if !(h > 0.0) || h >= rho {
            return Err(Error::StepTooLarge { step: h, scale: rho });
        }
        let z = Complex64::new(x0, rho);
        let dx = Complex64::new(h, 0.0);
        let dy = Complex64::new(0.0, h);
        let gx = (self.eval_complex(z + dx)? - self.eval_complex(z - dx)?) / (2.0 * h);
        let gy = (self.eval_complex(z + dy)? - self.eval_complex(z - dy)?) / (2.0 * h);
        Ok(((gx + Complex64::i() * gy) * 0.5).norm())
    }

    /// Central-difference estimate of `d_rad G`, the cross-check for the
    /// analytic derivative table.
    pub fn radial_derivative_fd(&self, x0: f64, rho: f64, h: f64) -> Result<MeridianValue> {
        if !(h > 0.0) || h >= rho {
            return Err(Error::StepTooLarge { step: h, scale: rho });
        }
        let z = Complex64::new(x0, rho);
        let dx = Complex64::new(h, 0.0);
        let dy = Complex64::new(0.0, h);
        let gx = (self.eval_complex(z + dx)? - self.eval_complex(z - dx)?) / (2.0 * h);
        let gy = (self.eval_complex(z + dy)? - self.eval_complex(z - dy)?) / (2.0 * h);
        Ok(((gx - Complex64::i() * gy) * 0.5).into())
    }
}

/// The anti-holomorphic companion `conj(F)` of a Moebius map; for `c = 1`
/// this is `-(conj(x) + d)^-1 + a`.
pub fn moebius_companion(m: MoebiusRealCoeffs) -> RadialFunction {
    RadialFunction::moebius(m).conj()
}

/// Radially holomorphic potential of a Moebius map: for `c = 1` this is
/// `G = -ln(x + d) + a x`.
pub fn moebius_potential(m: MoebiusRealCoeffs) -> Result<RadialFunction> {
    RadialFunction::moebius(m).primitive()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{E, FRAC_PI_2, PI};

    fn registered() -> Vec<RadialFunction> {
        vec![
            RadialFunction::qpow(0),
            RadialFunction::qpow(1),
            RadialFunction::qpow(2),
            RadialFunction::qpow(3),
            RadialFunction::qpow(5),
            RadialFunction::qpow(-1),
            RadialFunction::qexp(),
            RadialFunction::qcos(),
            RadialFunction::qsin(),
            RadialFunction::qln(),
            RadialFunction::moebius(MoebiusRealCoeffs::unit_c(0.5, 0.3)),
        ]
    }

    #[test]
    fn eval_lift_examples() {
        let x = Quaternion::I * PI;
        let v = RadialFunction::qexp().eval_lift(x).unwrap();
        assert!(v.max_abs_diff(-Quaternion::ONE) < 1e-15);

        let x = Quaternion::new(0.0, 1.0, 1.0, 0.0);
        let v = RadialFunction::qpow(2).eval_lift(x).unwrap();
        assert!(v.max_abs_diff(Quaternion::real(-2.0)) < 1e-14);
        assert!((v.max_abs_diff(x * x)) < 1e-14);

        let v = RadialFunction::qln().eval_lift(Quaternion::real(E)).unwrap();
        assert_eq!(v, Quaternion::real(1.0));

        // qpow(3) agrees with the Hamilton product off the axis
        let x = Quaternion::new(0.4, -0.3, 1.1, 0.2);
        let v = RadialFunction::qpow(3).eval_lift(x).unwrap();
        assert!(v.max_abs_diff(x * x * x) < 1e-14);
    }

    #[test]
    fn on_axis_behaviour() {
        assert_eq!(
            RadialFunction::qln().eval_lift(Quaternion::real(-1.0)),
            Err(Error::BranchCut { x0: -1.0 })
        );
        assert_eq!(
            RadialFunction::qcos().eval_lift(Quaternion::real(0.0)).unwrap(),
            Quaternion::ONE
        );
        // the lift of conj(exp) keeps a nonzero imaginary part on the axis only
        // when its meridian value does; exp(x0) is real so it is accepted
        assert!(RadialFunction::qexp().conj().eval_lift(Quaternion::real(1.0)).is_ok());
        let twisted = RadialFunction::custom(
            "i*z",
            vec![Arc::new(|z: Complex64| z * Complex64::i() + Complex64::i())],
        );
        assert!(matches!(
            twisted.eval_lift(Quaternion::real(1.0)),
            Err(Error::OnAxis { .. })
        ));
    }

    #[test]
    fn radial_derivative_examples() {
        let d = RadialFunction::qpow(3).radial_derivative(1.0, 1e-6).unwrap();
        assert!((d.a - 3.0).abs() < 1e-10);
        assert!(d.b.abs() < 1e-5);

        let d = RadialFunction::qexp().radial_derivative(0.0, FRAC_PI_2).unwrap();
        assert!(d.a.abs() < 1e-15);
        assert!((d.b - 1.0).abs() < 1e-15);

        let d = RadialFunction::qcos().radial_derivative(0.0, 1e-12).unwrap();
        assert!(d.a.abs() < 1e-11 && d.b.abs() < 1e-11);

        assert!(matches!(
            RadialFunction::qexp().radial_derivative(0.0, 0.0),
            Err(Error::OnAxis { .. })
        ));
    }

    #[test]
    fn antiholomorphy_examples() {
        let r = RadialFunction::qexp().antiholomorphy_residual(1.0, 1.0, 1e-4).unwrap();
        assert!(r <= 1e-7, "{r}");
        let r = RadialFunction::qexp().conj().antiholomorphy_residual(1.0, 1.0, 1e-4).unwrap();
        assert_relative_eq!(r, E, max_relative = 1e-7);
        let r = RadialFunction::constant(5.0).antiholomorphy_residual(0.3, 0.8, 1e-4).unwrap();
        assert!(r <= 1e-12);
        assert!(matches!(
            RadialFunction::qexp().antiholomorphy_residual(0.0, 1e-5, 1e-4),
            Err(Error::StepTooLarge { .. })
        ));
    }

    #[test]
    fn elementary_examples() {
        let x = Quaternion::new(0.7, -0.2, 0.4, 1.5);
        assert!(RadialFunction::qpow(1).eval_lift(x).unwrap().max_abs_diff(x) < 1e-15);
        let v = RadialFunction::qcos().eval_meridian(0.0, 1.0).unwrap();
        assert_relative_eq!(v.a, 1.0f64.cosh(), max_relative = 1e-15);
        assert!(v.b.abs() < 1e-15);
        let v = RadialFunction::qsin().eval_meridian(FRAC_PI_2, 1e-12).unwrap();
        assert_relative_eq!(v.a, 1.0, max_relative = 1e-15);

        assert_eq!("qpow3".parse::<Elementary>(), Ok(Elementary::Pow(3)));
        assert_eq!("qln".parse::<Elementary>(), Ok(Elementary::Ln));
        assert!("qtan".parse::<Elementary>().is_err());
    }

    #[test]
    fn moebius_examples() {
        let id = RadialFunction::moebius(MoebiusRealCoeffs::new(1.0, 0.0, 0.0, 1.0).unwrap());
        let x = Quaternion::new(0.2, 0.5, -0.1, 0.9);
        assert!(id.eval_lift(x).unwrap().max_abs_diff(x) < 1e-15);

        let neg_inv = RadialFunction::moebius(MoebiusRealCoeffs::new(0.0, -1.0, 1.0, 0.0).unwrap());
        assert!(neg_inv.eval_lift(Quaternion::I).unwrap().max_abs_diff(Quaternion::I) < 1e-15);

        let shift = RadialFunction::moebius(MoebiusRealCoeffs::new(1.0, 1.0, 0.0, 1.0).unwrap());
        let v = shift.eval_lift(Quaternion::new(1.0, 1.0, 1.0, 1.0)).unwrap();
        assert!(v.max_abs_diff(Quaternion::new(2.0, 1.0, 1.0, 1.0)) < 1e-15);

        assert!(matches!(
            MoebiusRealCoeffs::new(1.0, 1.0, 1.0, 1.0),
            Err(Error::NotUnimodular { .. })
        ));
        assert_eq!(
            neg_inv.eval_lift(Quaternion::ZERO),
            Err(Error::Pole { x0: 0.0 })
        );

        // quaternionic evaluation (ax+b)(cx+d)^-1 with Hamilton products
        let m = MoebiusRealCoeffs::new(2.0, 1.0, 3.0, 2.0).unwrap();
        let x = Quaternion::new(0.3, 0.4, -0.7, 0.2);
        let direct = (x * 2.0 + Quaternion::ONE) * (x * 3.0 + Quaternion::real(2.0)).inverse().unwrap();
        let v = RadialFunction::moebius(m).eval_lift(x).unwrap();
        assert!(v.max_abs_diff(direct) < 1e-14);
    }

    #[test]
    fn moebius_potential_and_companion() {
        let (a, d) = (0.7, 0.4);
        let m = MoebiusRealCoeffs::unit_c(a, d);
        let g = moebius_potential(m).unwrap();
        let expected = RadialFunction::ln_shifted(d).scaled(-1.0).plus(&RadialFunction::qpow(1).scaled(a));
        for (x0, rho) in [(0.3, 0.5), (-1.0, 2.0), (2.0, 0.1)] {
            let lhs = g.eval_meridian(x0, rho).unwrap();
            let rhs = expected.eval_meridian(x0, rho).unwrap();
            assert!((lhs.a - rhs.a).abs() < 1e-14 && (lhs.b - rhs.b).abs() < 1e-14);
            let gp = g.radial_derivative(x0, rho).unwrap();
            let f = RadialFunction::moebius(m).eval_meridian(x0, rho).unwrap();
            assert!((gp.a - f.a).abs() < 1e-13 && (gp.b - f.b).abs() < 1e-13);
        }
        let x = Quaternion::new(0.5, 0.3, -0.2, 0.6);
        let fbar = moebius_companion(m).eval_lift(x).unwrap();
        let by_formula = Quaternion::real(a) - (x.conj() + Quaternion::real(d)).inverse().unwrap();
        assert!(fbar.max_abs_diff(by_formula) < 1e-14);
    }

    #[test]
    fn primitive_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let cases = [
            (RadialFunction::qexp(), RadialFunction::qexp()),
            (RadialFunction::qpow(1), RadialFunction::qpow(2).scaled(0.5)),
            (RadialFunction::qcos(), RadialFunction::qsin()),
        ];
        for (f, expected) in cases {
            let g = f.primitive().unwrap();
            for _ in 0..20 {
                let (x0, rho) = (rng.gen_range(-2.0..2.0), rng.gen_range(0.1..2.0));
                let a = g.eval_meridian(x0, rho).unwrap();
                let b = expected.eval_meridian(x0, rho).unwrap();
                assert!((a.a - b.a).abs() < 1e-12 && (a.b - b.b).abs() < 1e-12);
                let gp = g.radial_derivative(x0, rho).unwrap();
                let fv = f.eval_meridian(x0, rho).unwrap();
                assert!((gp.a - fv.a).abs() < 1e-10 && (gp.b - fv.b).abs() < 1e-10);
            }
        }
        assert!(matches!(RadialFunction::qln().primitive(), Err(Error::Unsupported(_))));
        assert!(matches!(RadialFunction::qexp().conj().primitive(), Err(Error::Unsupported(_))));
    }

    #[test]
    fn registered_functions_are_radially_holomorphic() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for f in registered() {
            let mut checked = 0;
            for _ in 0..100 {
                let (x0, rho) = (rng.gen_range(-2.0..2.0), rng.gen_range(0.1..2.0));
                let r1 = f.antiholomorphy_residual(x0, rho, 1e-4).unwrap();
                let scale = f.radial_derivative(x0, rho).unwrap().norm().max(1.0);
                assert!(r1 <= 1e-6 * scale, "{} at ({x0},{rho}): {r1}", f.name());

                let fd = f.radial_derivative_fd(x0, rho, 1e-4).unwrap();
                let an = f.radial_derivative(x0, rho).unwrap();
                assert!(
                    (fd.a - an.a).abs().max((fd.b - an.b).abs()) <= 1e-8 * scale,
                    "{} derivative mismatch",
                    f.name()
                );

                // O(h^2): the leading term is |G'''| h^2 / 6
                let third = f.derivative().unwrap().derivative().unwrap().derivative().unwrap();
                let g3 = third.eval_meridian(x0, rho).unwrap().norm();
                if g3 > 1e-2 {
                    let r2 = f.antiholomorphy_residual(x0, rho, 0.5e-4).unwrap();
                    let ratio = r1 / r2;
                    assert!((3.5..=4.5).contains(&ratio), "{} ratio {ratio}", f.name());
                    checked += 1;
                }
            }
            if !matches!(f.name(), "qpow(0)" | "qpow(1)" | "qpow(2)") {
                assert!(checked > 50, "{} ratio checks: {checked}", f.name());
            }
        }
    }

    #[test]
    fn lift_commutes_with_conjugation() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for f in registered() {
            for _ in 0..20 {
                let x = Quaternion::new(
                    rng.gen_range(-2.0..2.0),
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                );
                let lhs = f.eval_lift(x.conj()).unwrap();
                let rhs = f.eval_lift(x).unwrap().conj();
                assert!(lhs.max_abs_diff(rhs) <= 1e-12 * rhs.norm().max(1.0));
            }
        }
    }

    #[test]
    fn moebius_composition_matches_matrix_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let p = MoebiusRealCoeffs::new(2.0, 1.0, 3.0, 2.0).unwrap();
        let q = MoebiusRealCoeffs::unit_c(0.5, -0.25);
        let pq = RadialFunction::moebius(p.compose(&q));
        let (fp, fq) = (RadialFunction::moebius(p), RadialFunction::moebius(q));
        for _ in 0..50 {
            let x = Quaternion::new(
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(0.1..1.0),
            );
            let nested = fp.eval_lift(fq.eval_lift(x).unwrap()).unwrap();
            let direct = pq.eval_lift(x).unwrap();
            assert!(nested.max_abs_diff(direct) <= 1e-10 * direct.norm().max(1.0));
        }
    }
}
