//! The free transform of a compound Poisson law is a one-line resolvent
//! integral over the jump law: it int x/(it - x) m(dx). It agrees with the
//! Laplace bridge for any jump law, and the unit-atom case recovers the
//! Marchenko-Pastur transform it/(it - 1).

use freebridge::classes::free_compound_poisson_v;
use freebridge::measures::{FiniteMeasure, FinitePiece, ParametricLaw};
use freebridge::numerics::QuadraturePolicy;
use freebridge::transforms::laplace_bijection;
use num_complex::Complex64;

fn main() -> freebridge::error::Result<()> {
    let policy = QuadraturePolicy::default();

    let jump_laws: Vec<(&str, FiniteMeasure)> = vec![
        ("atom at 1", FiniteMeasure::atom(1.0, 1.0)),
        ("atoms at -1 and 2", {
            let mut m = FiniteMeasure::atom(-1.0, 0.5);
            m.atoms.push(freebridge::measures::Atom { at: 2.0, mass: 0.5 });
            m
        }),
        (
            "uniform on [0, 2]",
            FiniteMeasure {
                atoms: vec![],
                pieces: vec![FinitePiece::Uniform {
                    lo: 0.0,
                    hi: 2.0,
                    mass: 1.0,
                }],
            },
        ),
    ];

    for (label, m) in &jump_laws {
        println!("jump law: {label}");
        println!("{:>5} {:>28} {:>28}", "t", "resolvent integral", "laplace bridge");
        let triplet = ParametricLaw::CompoundPoisson { jumps: m.clone() }.to_triplet(&policy)?;
        for t in [0.5, 1.0, 2.0] {
            let direct = free_compound_poisson_v(m, t, &policy)?.value;
            let routed = laplace_bijection(&triplet, t, &policy)?.value;
            println!(
                "{t:>5} {:>13.9}{:+.9}i {:>13.9}{:+.9}i",
                direct.re, direct.im, routed.re, routed.im
            );
        }
        println!();
    }

    println!("unit-atom case against it/(it - 1):");
    for t in [0.5, 1.0, 2.0, 5.0] {
        let it = Complex64::new(0.0, t);
        let direct = free_compound_poisson_v(&FiniteMeasure::atom(1.0, 1.0), t, &policy)?.value;
        let closed = it / (it - 1.0);
        println!(
            "  t = {t:<4} {:+.12}{:+.12}i   [{:.12}{:+.12}i]",
            direct.re, direct.im, closed.re, closed.im
        );
    }
    Ok(())
}
