//! Real-order Bessel functions and their quaternionic counterparts.
use meridian4::specfun::{bessel_j, bessel_j_quat, bessel_y, gamma, power_to_bessel_partial};
use meridian4::Quaternion;

fn main() -> meridian4::Result<()> {
    println!("Gamma(0.5)^2     = {}", gamma(0.5).powi(2));
    println!("J_0(2.4048...)   = {:e}", bessel_j(0.0, 2.404825557695773)?);
    println!("J_-3/2(1.3)      = {}", bessel_j(-1.5, 1.3)?);
    println!("Y_1/2(1.3)       = {}", bessel_y(0.5, 1.3)?);
    match bessel_y(1.0, 1.3) {
        Ok(v) => println!("Y_1(1.3) = {v}"),
        Err(e) => println!("Y_1(1.3): {e}"),
    }

    let x = Quaternion::new(0.4, 0.0, 1.1, -0.3);
    println!("J_0(I)           = {:?}", bessel_j_quat(0, Quaternion::I)?);
    println!("J_2(x)           = {:?}", bessel_j_quat(2, x)?);
    let half = x * 0.5;
    println!("(x/2)^2          = {:?}", half * half);
    println!("Bessel expansion = {:?}", power_to_bessel_partial(2, 15, x)?);
    Ok(())
}
