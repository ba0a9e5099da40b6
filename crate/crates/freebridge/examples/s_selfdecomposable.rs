//! The shrink limit: integrating a law against the deterministic time change
//! u(v) = e^{-v} - v Gamma(0, v) produces a new infinitely divisible law.
//! Its log-characteristic function has a closed kernel, and its free
//! transform comes out either of that kernel's resolvent-log partner or of
//! the Laplace bridge applied to the log-characteristic function.

use freebridge::classes::{free_sselfdec_kernel, laplace_route, sselfdec_log_char, time_change_u};
use freebridge::measures::{FiniteMeasure, LevyPiece, LevyTriplet};
use freebridge::numerics::QuadraturePolicy;

fn main() -> freebridge::error::Result<()> {
    let policy = QuadraturePolicy::default();
    let mut loose = policy.clone();
    loose.target_rel_tol = 1e-8;

    println!("time change u(v), decreasing from 1 to 0:");
    for v in [1e-6, 0.1, 0.5, 1.0, 2.0, 5.0] {
        println!("  u({v:>5}) = {:.9}", time_change_u(v)?);
    }

    // Gaussian base: the image is again Gaussian, with a third the variance
    let gauss = LevyTriplet {
        shift: 0.0,
        gauss_var: 1.0,
        jumps: vec![],
    };
    println!("\nN(0,1) base, image log-char should be -w^2/6:");
    for w in [1.0, 2.0] {
        let v = sselfdec_log_char(&gauss, w, &policy)?.value;
        println!("  w = {w}  {:+.9}{:+.9}i   [-w^2/6 = {:.9}]", v.re, v.im, -w * w / 6.0);
    }

    // compound Poisson base with a single unit jump
    let atom = LevyTriplet {
        shift: 0.0,
        gauss_var: 0.0,
        jumps: vec![LevyPiece::Finite(FiniteMeasure::atom(1.0, 1.0))],
    };
    println!("\nunit-atom base, free transform of the image two ways:");
    println!("{:>5} {:>28} {:>28}", "t", "matched kernel", "laplace bridge");
    for t in [0.5, 1.0, 2.0] {
        let direct = free_sselfdec_kernel(&atom, t, &loose)?.value;
        let routed = laplace_route(|s| Ok(sselfdec_log_char(&atom, s, &loose)?.value), t, &loose)?.value;
        println!(
            "{t:>5} {:>13.9}{:+.9}i {:>13.9}{:+.9}i",
            direct.re, direct.im, routed.re, routed.im
        );
    }
    Ok(())
}
