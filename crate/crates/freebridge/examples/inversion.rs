//! Round trips through the rational representation. A pair (b, rho) is
//! sampled through its kernel on the upper imaginary axis, then inverted
//! back: the value at t = 1 splits into shift and mass, and the Laplace
//! transform of rho's characteristic function falls out of a ratio. The same
//! pair also converts losslessly to a generating triplet and back.

use freebridge::measures::{total_mass, FiniteMeasure, FinitePiece};
use freebridge::nevanlinna::{invert_restricted, kernel_eval, pair_to_triplet, triplet_to_pair, NevanlinnaPair};
use freebridge::numerics::QuadraturePolicy;
use num_complex::Complex64;

fn main() -> freebridge::error::Result<()> {
    let policy = QuadraturePolicy::default();
    let rho = FiniteMeasure {
        atoms: vec![freebridge::measures::Atom { at: 1.0, mass: 0.5 }],
        pieces: vec![FinitePiece::Uniform {
            lo: 0.0,
            hi: 2.0,
            mass: 0.5,
        }],
    };
    let pair = NevanlinnaPair::new(0.25, rho);

    let k = |t: f64| Ok(kernel_eval(&pair, t, &policy)?.value);
    let inv = invert_restricted(k, &[0.5, 1.0, 2.0, 4.0])?;
    println!("recovered b = {:.12}  (true 0.25)", inv.b());
    println!("recovered mass = {:.12}  (true 1)", inv.total_mass());

    // Laplace transform of the characteristic function of rho, against the
    // closed form 0.5/(w - i) + 0.25 i (log(w - 2i) - log w)
    println!("\n{:>5} {:>30} {:>30}", "w", "from inversion", "closed form");
    for w in [0.5, 1.0, 2.0, 4.0] {
        let got = inv.laplace_phi_rho(w)?;
        let cw = Complex64::new(w, 0.0);
        let expected = 0.5 / (cw - Complex64::i())
            + 0.25 * Complex64::i() * ((cw - 2.0 * Complex64::i()).ln() - cw.ln());
        println!(
            "{w:>5} {:>14.10}{:+.10}i {:>14.10}{:+.10}i",
            got.re, got.im, expected.re, expected.im
        );
    }

    let triplet = pair_to_triplet(&pair, &policy)?;
    let back = triplet_to_pair(&triplet, &policy)?;
    println!(
        "\npair -> triplet -> pair: b = {:.12}, mass = {:.12}",
        back.b,
        total_mass(&back.rho, &policy)?
    );
    Ok(())
}
