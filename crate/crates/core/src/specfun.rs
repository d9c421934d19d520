//! Bessel functions by ascending series.
//!
//! Real order, real argument: `J_nu` summed in double-double arithmetic so
//! the alternating series keeps ~1e-12 relative accuracy up to `z = 30`
//! despite its large intermediate terms. `Y_nu` for non-integer order comes
//! from the reflection quotient. Integer order, quaternionic argument:
//! `J_n(x)` through the complex lift of its real-coefficient power series.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::holomorphic::fueter_lift;
use crate::quaternion::Quaternion;
use crate::transforms::{chebyshev_original, OriginalFunction};

const MAX_TERMS: usize = 300;
const INTEGER_TOL: f64 = 1e-12;
const Y_INTEGER_TOL: f64 = 1e-8;
/// Largest `N` accepted by [`power_to_bessel_partial`].
pub const POWER_SERIES_MAX_N: usize = 30;

/// Terms used and a remainder bound for a truncated series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesTail {
    pub terms_used: usize,
    pub tail_bound: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselOrder {
    pub nu: f64,
}

impl BesselOrder {
    pub fn new(nu: f64) -> Self {
        Self { nu }
    }

    /// The nearest integer when `nu` is within `1e-12` of it.
    pub fn as_integer(&self) -> Option<i64> {
        let r = self.nu.round();
        ((self.nu - r).abs() <= INTEGER_TOL).then_some(r as i64)
    }

    pub fn is_integer(&self) -> bool {
        self.as_integer().is_some()
    }
}

fn factorial_table() -> &'static [f64; 171] {
    static TABLE: OnceLock<[f64; 171]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = [1.0; 171];
        for n in 1..171 {
            t[n] = t[n - 1] * n as f64;
        }
        t
    })
}

/// `n!` for `n <= 170`, `inf` beyond.
pub fn factorial(n: usize) -> f64 {
    factorial_table().get(n).copied().unwrap_or(f64::INFINITY)
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Gamma function of a real argument (Lanczos, `g = 7`, with reflection below 1/2).
pub fn gamma(x: f64) -> f64 {
    if x <= 0.0 && x == x.floor() {
        return f64::NAN;
    }
    if x < 0.5 {
        PI / ((PI * x).sin() * gamma(1.0 - x))
    } else {
        let x = x - 1.0;
        let mut a = LANCZOS[0];
        let t = x + LANCZOS_G + 0.5;
        for (i, c) in LANCZOS.iter().enumerate().skip(1) {
            a += c / (x + i as f64);
        }
        (2.0 * PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * a
    }
}

/// Double-double number `hi + lo` with `|lo| <= ulp(hi) / 2`.
#[derive(Debug, Clone, Copy)]
struct Dd {
    hi: f64,
    lo: f64,
}

impl Dd {
    const fn from(x: f64) -> Self {
        Self { hi: x, lo: 0.0 }
    }

    fn two_sum(a: f64, b: f64) -> Self {
        let s = a + b;
        let bb = s - a;
        let err = (a - (s - bb)) + (b - bb);
        Self { hi: s, lo: err }
    }

    fn quick_two_sum(a: f64, b: f64) -> Self {
        let s = a + b;
        Self { hi: s, lo: b - (s - a) }
    }

    fn two_prod(a: f64, b: f64) -> Self {
        let p = a * b;
        Self {
            hi: p,
            lo: a.mul_add(b, -p),
        }
    }

    fn add(self, o: Self) -> Self {
        let s = Self::two_sum(self.hi, o.hi);
        let t = Self::two_sum(self.lo, o.lo);
        let s = Self::quick_two_sum(s.hi, s.lo + t.hi);
        Self::quick_two_sum(s.hi, s.lo + t.lo)
    }

    fn mul(self, o: Self) -> Self {
        let p = Self::two_prod(self.hi, o.hi);
        Self::quick_two_sum(p.hi, p.lo + (self.hi * o.lo + self.lo * o.hi))
    }

    fn div(self, o: Self) -> Self {
        let q1 = self.hi / o.hi;
        let r = self.add(o.mul(Self::from(-q1)));
        let q2 = r.hi / o.hi;
        let r = r.add(o.mul(Self::from(-q2)));
        let q3 = r.hi / o.hi;
        Self::quick_two_sum(q1, q2).add(Self::from(q3))
    }

    fn neg(self) -> Self {
        Self {
            hi: -self.hi,
            lo: -self.lo,
        }
    }

    fn value(self) -> f64 {
        self.hi + self.lo
    }
}

/// `sum_m (-w)^m / (m! (nu+1)_m)` in double-double, with a ratio tail bound.
fn normalized_series(nu: f64, half_z: f64) -> Result<(f64, SeriesTail)> {
    let w = Dd::two_prod(half_z, half_z);
    let wmag = w.value();
    let mut term = Dd::from(1.0);
    let mut sum = Dd::from(1.0);
    let mut largest = 1.0f64;
    for m in 0..MAX_TERMS {
        let k = (m + 1) as f64;
        let den = Dd::two_sum(nu, k).mul(Dd::from(k));
        term = term.mul(w.neg()).div(den);
        sum = sum.add(term);
        largest = largest.max(term.hi.abs());

        let k2 = k + 1.0;
        let q = wmag / (k2 * (nu + k2).abs());
        if q < 1.0 && (nu + k2) > 0.0 {
            let next = term.hi.abs() * q;
            let tail = next / (1.0 - q);
            if tail <= (1e-15 * sum.hi.abs()).max(1e-31 * largest) {
                return Ok((
                    sum.value(),
                    SeriesTail {
                        terms_used: m + 2,
                        tail_bound: tail,
                    },
                ));
            }
        }
    }
    Err(Error::ConvergenceFailure {
        what: "J_nu",
        terms: MAX_TERMS,
        tail: f64::NAN,
    })
}

/// Bessel function of the first kind, real order and argument, with its
/// series remainder bound.
pub fn bessel_j_with_tail(nu: f64, z: f64) -> Result<(f64, SeriesTail)> {
    if !(z >= 0.0) {
        return Err(Error::DomainError { what: "J_nu", z });
    }
    if let Some(n) = BesselOrder::new(nu).as_integer() {
        if n < 0 {
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            let (v, tail) = bessel_j_with_tail(-n as f64, z)?;
            return Ok((sign * v, tail));
        }
        let n = n as f64;
        if z == 0.0 {
            let v = if n == 0.0 { 1.0 } else { 0.0 };
            return Ok((v, SeriesTail { terms_used: 1, tail_bound: 0.0 }));
        }
        let (s, tail) = normalized_series(n, z / 2.0)?;
        let lead = (z / 2.0).powf(n) / gamma(n + 1.0);
        return Ok((lead * s, SeriesTail { tail_bound: tail.tail_bound * lead.abs(), ..tail }));
    }
    if z == 0.0 {
        if nu > 0.0 {
            return Ok((0.0, SeriesTail { terms_used: 1, tail_bound: 0.0 }));
        }
        return Err(Error::DomainError { what: "J_nu (negative order at 0)", z });
    }
    let (s, tail) = normalized_series(nu, z / 2.0)?;
    let lead = (z / 2.0).powf(nu) / gamma(nu + 1.0);
    Ok((lead * s, SeriesTail { tail_bound: tail.tail_bound * lead.abs(), ..tail }))
}

pub fn bessel_j(nu: f64, z: f64) -> Result<f64> {
    bessel_j_with_tail(nu, z).map(|(v, _)| v)
}

/// Bessel function of the second kind for non-integer order,
/// `Y_nu = (J_nu cos(nu pi) - J_-nu) / sin(nu pi)`.
pub fn bessel_y(nu: f64, z: f64) -> Result<f64> {
    if (nu - nu.round()).abs() <= Y_INTEGER_TOL {
        return Err(Error::IntegerOrderUnsupported { nu });
    }
    if !(z > 0.0) {
        return Err(Error::DomainError { what: "Y_nu", z });
    }
    let (s, c) = (nu * PI).sin_cos();
    Ok((bessel_j(nu, z)? * c - bessel_j(-nu, z)?) / s)
}

/// `J'_nu(z) = J_{nu-1}(z) - (nu / z) J_nu(z)`.
pub fn bessel_j_prime(nu: f64, z: f64) -> Result<f64> {
    if !(z > 0.0) {
        return Err(Error::DomainError { what: "J'_nu", z });
    }
    Ok(bessel_j(nu - 1.0, z)? - nu / z * bessel_j(nu, z)?)
}

/// Integer-order `J_n` of a complex argument by its ascending series.
pub fn bessel_j_complex(n: u32, z: Complex64) -> Result<(Complex64, SeriesTail)> {
    let half = z * 0.5;
    let w = half * half;
    let wmag = w.norm();
    let lead = half.powu(n) / factorial(n as usize);
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    let mut largest = 1.0f64;
    let nf = n as f64;
    for m in 0..MAX_TERMS {
        let k = (m + 1) as f64;
        term = -term * w / (k * (nf + k));
        sum += term;
        largest = largest.max(term.norm());
        let k2 = k + 1.0;
        let q = wmag / (k2 * (nf + k2));
        if q < 1.0 {
            let tail = term.norm() * q / (1.0 - q);
            if tail <= (1e-16 * sum.norm()).max(1e-18 * largest) {
                return Ok((
                    sum * lead,
                    SeriesTail {
                        terms_used: m + 2,
                        tail_bound: tail * lead.norm(),
                    },
                ));
            }
        }
    }
    Err(Error::ConvergenceFailure {
        what: "J_n(x)",
        terms: MAX_TERMS,
        tail: f64::NAN,
    })
}

/// `J_n(x) = sum_m (-1)^m / (m! (n+m)!) (x/2)^(n+2m)` for quaternionic `x`.
pub fn bessel_j_quat(n: u32, x: Quaternion) -> Result<Quaternion> {
    fueter_lift(x, |z| bessel_j_complex(n, z).map(|(v, _)| v))
}

/// Partial sum `sum_{k=0}^{N} (m+2k)(m+k-1)!/k! J_{m+2k}(x)` of the expansion
/// of `(x/2)^m` in Bessel functions.
pub fn power_to_bessel_partial(m: u32, n_terms: usize, x: Quaternion) -> Result<Quaternion> {
    if m == 0 {
        return Err(Error::DomainError {
            what: "power-to-Bessel expansion (m >= 1)",
            z: 0.0,
        });
    }
    if n_terms > POWER_SERIES_MAX_N {
        return Err(Error::Overflow {
            n: n_terms,
            max: POWER_SERIES_MAX_N,
        });
    }
    fueter_lift(x, |z| {
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 0..=n_terms {
            let order = m + 2 * k as u32;
            let coeff =
                order as f64 * factorial((m as usize) + k - 1) / factorial(k);
            acc += bessel_j_complex(order, z)?.0 * coeff;
        }
        Ok(acc)
    })
}

/// `cos(2n arccos t) / sqrt(1 - t^2)` on `[0, 1]`, the original whose cosine
/// transform yields `(pi/2)(-1)^n J_2n`.
pub fn cheb_original(n: u32) -> OriginalFunction {
    chebyshev_original(2 * n)
}
