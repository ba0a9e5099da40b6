//! The standard Gaussian and the Wigner semicircle law are partners under
//! the classical-to-free bijection: the free transform of the semicircle is
//! 1/(it), reachable from the Gaussian triplet alone through the Laplace
//! route, or from the semicircle density through functional inversion.

use freebridge::measures::{char_exponent, LevyTriplet};
use freebridge::numerics::QuadraturePolicy;
use freebridge::transforms::{laplace_bijection, voiculescu_from_measure, DistPiece, DistributionSpec};

fn main() -> freebridge::error::Result<()> {
    let policy = QuadraturePolicy::default();
    let gaussian = LevyTriplet::gaussian(0.0, 1.0);
    let semicircle = DistributionSpec::piece(DistPiece::Semicircle {
        center: 0.0,
        radius: 2.0,
    });

    println!("log-characteristic function of N(0,1): -t^2/2");
    for t in [0.5, 1.0, 2.0] {
        let psi = char_exponent(&gaussian, t, &policy)?.value;
        println!("  t = {t:<4} psi = {:+.9} {:+.9}i", psi.re, psi.im);
    }

    println!("\nfree transform at it, three ways:");
    println!("{:>6} {:>28} {:>28} {:>14}", "t", "laplace route", "measure route", "closed 1/(it)");
    for t in [0.5, 1.0, 2.0, 5.0] {
        let bridged = laplace_bijection(&gaussian, t, &policy)?.value;
        let inverted = voiculescu_from_measure(&semicircle, t, &policy)?;
        println!(
            "{t:>6} {:>13.9} {:+.9}i {:>13.9} {:+.9}i {:>14}",
            bridged.re,
            bridged.im,
            inverted.re,
            inverted.im,
            format!("-{:.9}i", 1.0 / t),
        );
    }
    Ok(())
}
