//! Separable Bessel fields checked against the meridian equations.
use meridian4::fields::{
    criterion_check, from_separable, verify_axial_hyperbolic, verify_epd, verify_stokes_beltrami, SeparableParams,
};
use meridian4::Quaternion;

fn main() -> meridian4::Result<()> {
    for alpha in [-2.0, 0.0, 2.0, 3.0] {
        let f = from_separable(SeparableParams::new(alpha, 1.3, (1.0, 1.0), (1.0, 0.0)))?;
        let x = Quaternion::new(0.2, 0.5, -0.3, 0.9);
        let h = |q: Quaternion| f.potential(q).unwrap();
        let (sb1, sb2) = verify_stokes_beltrami(&f, 0.2, 1.1)?;
        println!(
            "alpha {alpha:>4}: EPD {:.1e}  axial {:.1e}  Stokes-Beltrami {:.1e} {:.1e}  criterion ok {}",
            verify_epd(&f, 0.2, 1.1)?,
            verify_axial_hyperbolic(&h, alpha, x, 1e-4)?,
            sb1,
            sb2,
            criterion_check(&h, x, 1e-5)?.passes(1e-7),
        );
    }

    let counter = |q: Quaternion| q.x0 * q.x0 - q.x3 * q.x3;
    let rep = criterion_check(&counter, Quaternion::new(1.0, 1.0, 1.0, 1.0), 1e-5)?;
    println!("x0^2 - x3^2: {:?}", rep);
    Ok(())
}
