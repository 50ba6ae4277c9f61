//! Count the points of height at most X in the 2-unit group of (Q*)^2 and
//! compare the growth against the polytope constant.

use height_census::census::count_height_ball;
use height_census::heights::parse_rational;
use height_census::logspace::volume_c_gamma;
use height_census::multgroup::unit_group_descriptor;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let group = unit_group_descriptor(&[2], 2)?;

    let x = parse_rational("4")?;
    let count = count_height_ball(&group, &x)?;
    println!("points of height <= {x}: {count}");

    let (_, c) = volume_c_gamma(&group)?;
    println!("leading constant c = {:.6}", c.value);
    if let Some(exact) = &c.exact {
        println!("               exactly {exact}");
    }
    Ok(())
}
