//! Eigenvalues, invariants and degenerate sets of the Jacobian.
use meridian4::fields::{from_holomorphic_potential, from_separable, SeparableParams};
use meridian4::holomorphic::{moebius_potential, MoebiusRealCoeffs};
use meridian4::spectral::{
    critical_points, degenerate_set, eigen_closed, eigen_numeric, jacobian, zero_divergence_scan, Window,
};
use meridian4::Quaternion;

fn main() -> meridian4::Result<()> {
    let moebius = from_holomorphic_potential(&moebius_potential(MoebiusRealCoeffs::unit_c(0.0, 0.0))?)?;
    let x = Quaternion::new(1.0, 0.0, 1.0, 0.0);
    let closed = eigen_closed(&moebius, x)?;
    let j = jacobian(&moebius, x)?;
    println!("{j}");
    println!("closed form {:?}", closed.lambdas);
    println!("Jacobi      {:?}", eigen_numeric(&j)?.lambdas);
    println!("invariants  {:?}", closed.invariants);

    let window = Window::new((-2.0, 2.0), (0.1, 3.0));
    println!("Moebius degenerate chains: {}", degenerate_set(&moebius, window, (100, 100))?.len());

    let ex = from_separable(SeparableParams::new(-2.0, 1.3, (1.0, 1.0), (1.0, 0.0)))?;
    for chain in degenerate_set(&ex, Window::new((-1.0, 1.0), (0.2, 6.0)), (60, 120))? {
        println!("{:?} chain with {} points", chain.equation, chain.points.len());
    }

    let sep = from_separable(SeparableParams::new(2.0, 1.0, (1.0, 0.0), (1.0, 0.0)))?;
    for z in zero_divergence_scan(&sep, Window::new((-1.0, 1.0), (0.5, 3.0)), (8, 20))?.iter().take(3) {
        println!("Vrho = 0 at ({:.4}, {:.6}), det J = {:.1e}", z.x0, z.rho, z.det);
    }
    let scan = critical_points(&sep, Window::new((-1.0, 1.0), (0.5, 3.0)), (10, 10))?;
    for p in &scan.points {
        println!("critical point ({:.6}, {:.6}), lambdas {:?}", p.x0, p.rho, p.report.lambdas);
    }
    Ok(())
}
