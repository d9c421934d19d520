//! Quaternion arithmetic and the axial split `x = x0 + rho * axis`.
use meridian4::quaternion::AxialForm;
use meridian4::Quaternion;

fn main() -> meridian4::Result<()> {
    let x = Quaternion::new(0.5, 0.3, -0.4, 1.2);
    let y = Quaternion::new(-1.0, 0.0, 2.0, 0.5);
    println!("x * y   = {:?}", x * y);
    println!("y * x   = {:?}", y * x);
    println!("|x|     = {}", x.norm());
    println!("x^-1 x  = {:?}", x.inverse()? * x);

    let split = x.axial_split();
    println!("x0 = {}, rho = {}, axis = {:?}", split.x0, split.rho, split.axis);
    let back = AxialForm::reconstruct(&split);
    println!("reconstruction error {:e}", back.max_abs_diff(x));
    Ok(())
}
