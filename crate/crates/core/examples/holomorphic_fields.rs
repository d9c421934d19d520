//! Radially holomorphic functions and the alpha = 2 meridional fields they generate.
use meridian4::fields::from_holomorphic_potential;
use meridian4::holomorphic::{moebius_potential, MoebiusRealCoeffs, RadialFunction};
use meridian4::Quaternion;

fn main() -> meridian4::Result<()> {
    let x = Quaternion::new(0.3, 0.6, 0.0, 0.8);
    for g in [RadialFunction::qexp(), RadialFunction::qsin(), RadialFunction::qpow(3), RadialFunction::qln()] {
        let value = g.eval_lift(x)?;
        let residual = g.antiholomorphy_residual(0.3, 1.0, 1e-4)?;
        println!("{:8} G(x) = {:?}  dbar_rad residual {:.2e}", g.name(), value, residual);
    }

    let field = from_holomorphic_potential(&RadialFunction::qexp().primitive()?)?;
    let jet = field.jet(0.3, 1.0)?;
    println!("V0 = {}, Vrho = {}", jet.v0(), jet.vrho());
    println!("lifted to R^4: {:?}", field.lift_to_r4(x)?);

    let m = moebius_potential(MoebiusRealCoeffs::unit_c(0.0, 0.0))?;
    let moebius = from_holomorphic_potential(&m)?;
    println!("Moebius field at (1, 1): Vrho = {}", moebius.vrho(1.0, 1.0)?);
    Ok(())
}
