//! Gradient flow along a meridional field and Poincare stability classes.
use meridian4::dynsys::{classify, flow, monotonicity_audit};
use meridian4::fields::{from_holomorphic_potential, Jet, MeridionalField};
use meridian4::holomorphic::RadialFunction;
use meridian4::Quaternion;

fn main() -> meridian4::Result<()> {
    let saddle = MeridionalField::custom("x0^2 - rho^2/3", 0.0, |x0, rho| {
        Ok(Jet {
            g: x0 * x0 - rho * rho / 3.0,
            g_x0: 2.0 * x0,
            g_rho: -2.0 * rho / 3.0,
            g_x0x0: 2.0,
            g_x0rho: 0.0,
            g_rhorho: -2.0 / 3.0,
        })
    });
    let tr = flow(&saddle, Quaternion::new(0.5, 0.1, 0.0, 0.0), 1e-3, 1.0)?;
    let end = tr.last();
    println!("saddle: {} steps, end {:?}, {}", tr.samples.len() - 1, end.x, tr.terminated);
    println!("exact end x0 = {}, rho = {}", 0.5 * 2f64.exp(), 0.1 * (-2.0f64 / 3.0).exp());
    println!("monotonicity defect {:e}", monotonicity_audit(&tr));
    let v = classify(&saddle, Quaternion::new(0.2, 0.0, 0.7, 0.0))?;
    println!("classified {} with lambdas {:?}", v.class, v.lambdas);

    let exp = from_holomorphic_potential(&RadialFunction::qexp())?;
    let tr = flow(&exp, Quaternion::new(0.0, 0.5, 0.5, 0.0), 0.01, 3.0)?;
    println!("exp field: {} samples, terminated {}", tr.samples.len(), tr.terminated);
    Ok(())
}
