//! Laplace-Fueter and Fourier-Fueter transforms, and the Bessel integral representations.
use std::f64::consts::PI;

use meridian4::specfun::{bessel_j_quat, cheb_original};
use meridian4::transforms::{
    bessel_integral_rep, ff_cos, laplace_fueter, transform_field, OriginalFunction, Parity, TransformKind, DEFAULT_TOL,
};
use meridian4::Quaternion;

fn main() -> meridian4::Result<()> {
    let x = Quaternion::new(1.0, 0.6, 0.0, 0.8);
    let lf = laplace_fueter(&OriginalFunction::exp_decay(1.0), x, DEFAULT_TOL)?;
    println!("L[e^-t](x)            = {:?}", lf);
    println!("1/(1+x)               = {:?}", (Quaternion::ONE + x).inverse()?);

    let c = ff_cos(&cheb_original(0), x, DEFAULT_TOL)? * (2.0 / PI);
    println!("(2/pi) F_c[T0](x)      = {:?}", c);
    println!("J_0(x)                = {:?}", bessel_j_quat(0, x)?);
    for (n, parity) in [(1, Parity::Even), (1, Parity::Odd)] {
        let rep = bessel_integral_rep(n, parity, x, DEFAULT_TOL)?;
        println!("{parity:?} representation n={n}: {rep:?}");
    }

    let field = transform_field(TransformKind::Ffc, cheb_original(0))?;
    let jet = field.jet(0.5, 1.0)?;
    println!("ffc field at (0.5, 1): V0 = {}, Vrho = {}", jet.v0(), jet.vrho());
    Ok(())
}
