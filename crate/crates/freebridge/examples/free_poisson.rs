//! Poisson(1) maps to the Marchenko-Pastur law. Its free transform
//! it/(it-1) comes out of the Laplace route over the Poisson triplet, out of
//! functional inversion of the Marchenko-Pastur density, and out of the
//! rational pair form (b = 1/2, an atom of mass 1/2 at 1).

use freebridge::measures::{FiniteMeasure, ParametricLaw};
use freebridge::nevanlinna::{kernel_eval, pair_to_triplet, NevanlinnaPair};
use freebridge::numerics::QuadraturePolicy;
use freebridge::transforms::{laplace_bijection, voiculescu_from_measure, DistPiece, DistributionSpec};
use num_complex::Complex64;

fn main() -> freebridge::error::Result<()> {
    let policy = QuadraturePolicy::default();
    let poisson = ParametricLaw::Poisson {
        rate: 1.0,
        jump: 1.0,
    }
    .to_triplet(&policy)?;
    let mp = DistributionSpec::piece(DistPiece::MarchenkoPastur);
    let pair = NevanlinnaPair::new(0.5, FiniteMeasure::atom(1.0, 0.5));

    println!("{:>5} {:>26} {:>26} {:>26}", "t", "laplace", "measure", "pair kernel");
    for t in [0.5, 1.0, 2.0, 5.0] {
        let it = Complex64::new(0.0, t);
        let bridged = laplace_bijection(&poisson, t, &policy)?.value;
        let inverted = voiculescu_from_measure(&mp, t, &policy)?;
        let kernel = kernel_eval(&pair, t, &policy)?.value;
        let closed = it / (it - 1.0);
        println!(
            "{t:>5} {:>12.9}{:+.9}i {:>12.9}{:+.9}i {:>12.9}{:+.9}i   [{:.9}{:+.9}i]",
            bridged.re, bridged.im, inverted.re, inverted.im, kernel.re, kernel.im,
            closed.re, closed.im
        );
    }

    // unfolding the pair recovers the Poisson triplet
    let back = pair_to_triplet(&pair, &policy)?;
    println!("\npair unfolds to shift = {}, variance = {}", back.shift, back.gauss_var);
    Ok(())
}
