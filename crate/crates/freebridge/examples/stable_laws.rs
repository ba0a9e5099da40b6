//! Strictly stable laws have closed forms on both sides of the bijection,
//! including the delicate index-one branch with its logarithmic skew term.
//! The Laplace bridge applied to the classical closed form must land on the
//! free closed form.

use freebridge::classes::{classical_stable_log_char, free_stable_v, laplace_route, StableParams};
use freebridge::numerics::QuadraturePolicy;

fn main() -> freebridge::error::Result<()> {
    let policy = QuadraturePolicy::default();

    println!("classical log-characteristic functions:");
    for (p, beta) in [(0.5, 0.0), (0.5, 1.0), (1.5, -0.5), (1.0, 1.0)] {
        let params = StableParams::new(p, 1.0, beta, 0.0)?;
        let v = classical_stable_log_char(&params, 2.0)?;
        println!("  p = {p:<4} beta = {beta:>4}   psi(2) = {:+.9}{:+.9}i", v.re, v.im);
    }
    // p = 1, beta = 1, t = 2 collapses to -pi - 2 ln 2 i
    let cauchy_skew = StableParams::new(1.0, 1.0, 1.0, 0.0)?;
    let v = classical_stable_log_char(&cauchy_skew, 2.0)?;
    println!(
        "  index-one check: psi(2) = {:+.9}{:+.9}i vs -pi {:+.9}i",
        v.re,
        v.im,
        -2.0 * std::f64::consts::LN_2
    );

    println!("\nfree transforms, closed form vs Laplace bridge:");
    println!("{:>4} {:>5} {:>5} {:>28} {:>28}", "p", "beta", "t", "closed", "bridge");
    for (p, beta, t) in [
        (0.5, 0.0, 1.0),
        (0.5, 1.0, 2.0),
        (1.5, -0.5, 1.0),
        (1.0, 0.5, 1.0),
    ] {
        let params = StableParams::new(p, 1.0, beta, 0.0)?;
        let closed = free_stable_v(&params, t)?;
        let routed = laplace_route(|s| classical_stable_log_char(&params, s), t, &policy)?.value;
        println!(
            "{p:>4} {beta:>5} {t:>5} {:>13.9}{:+.9}i {:>13.9}{:+.9}i",
            closed.re, closed.im, routed.re, routed.im
        );
    }

    // the index range is open at 2: the Gaussian is its own family
    match StableParams::new(2.0, 1.0, 0.0, 0.0) {
        Err(e) => println!("\np = 2 rejected: {e}"),
        Ok(_) => println!("\np = 2 unexpectedly accepted"),
    }
    Ok(())
}
