//! The standard Cauchy law is a fixed point of the classical-to-free
//! bijection, and its free transform is the constant -i. A third route runs
//! backwards: sampling the restricted kernel and inverting it recovers the
//! pair representation, whose Laplace transform is 1/(w+1).

use freebridge::measures::{FiniteMeasure, FinitePiece, ParametricLaw};
use freebridge::nevanlinna::{invert_restricted, kernel_eval, NevanlinnaPair};
use freebridge::numerics::QuadraturePolicy;
use freebridge::transforms::{laplace_bijection, voiculescu_from_measure, DistPiece, DistributionSpec};

fn main() -> freebridge::error::Result<()> {
    let policy = QuadraturePolicy::default();
    let triplet = ParametricLaw::StandardCauchy.to_triplet(&policy)?;
    let density = DistributionSpec::piece(DistPiece::CauchyDensity {
        loc: 0.0,
        scale: 1.0,
    });

    println!("the transform should be -i at every t:");
    for t in [0.5, 1.0, 2.0, 5.0] {
        let bridged = laplace_bijection(&triplet, t, &policy)?.value;
        let inverted = voiculescu_from_measure(&density, t, &policy)?;
        println!(
            "  t = {t:<4} laplace {:+.9}{:+.9}i   measure {:+.9}{:+.9}i",
            bridged.re, bridged.im, inverted.re, inverted.im
        );
    }

    // the pair behind the constant transform: b = 0, rho = Cauchy density
    let pair = NevanlinnaPair::new(
        0.0,
        FiniteMeasure::from_pieces(vec![FinitePiece::CauchyDensity {
            loc: 0.0,
            scale: 1.0,
            mass: 1.0,
        }]),
    );
    let inv = invert_restricted(
        |t| kernel_eval(&pair, t, &policy).map(|q| q.value),
        &[0.5, 1.0, 2.0, 3.0],
    )?;
    println!("\ninversion of the sampled kernel:");
    println!("  b = {:+.9}  mass = {:+.9}", inv.b(), inv.total_mass());
    println!("  Laplace transform of the pair measure vs 1/(w+1):");
    for w in [0.5, 2.0, 3.0] {
        let v = inv.laplace_phi_rho(w)?;
        println!(
            "    w = {w:<4} {:+.9}{:+.9}i   vs {:+.9}",
            v.re,
            v.im,
            1.0 / (w + 1.0)
        );
    }
    Ok(())
}
