//! The background-driving construction: integrating against e^{-v} maps a
//! law with finite log moment to a selfdecomposable one. Both the classical
//! kernel and its free partner are closed forms; laws whose jump measure has
//! an infinite logarithmic tail are rejected up front.

use freebridge::classes::{free_selfdec_kernel, laplace_route, selfdec_log_char};
use freebridge::measures::{FiniteMeasure, LevyPiece, LevyTriplet};
use freebridge::numerics::QuadraturePolicy;

fn main() -> freebridge::error::Result<()> {
    let policy = QuadraturePolicy::default();
    let mut loose = policy.clone();
    loose.target_rel_tol = 1e-8;

    // Gaussian base: the image is Gaussian with half the variance
    let gauss = LevyTriplet {
        shift: 0.0,
        gauss_var: 1.0,
        jumps: vec![],
    };
    println!("N(0,1) base, image log-char should be -w^2/4:");
    for w in [1.0, 2.0] {
        let v = selfdec_log_char(&gauss, w, &policy)?.value;
        println!("  w = {w}  {:+.9}{:+.9}i   [-w^2/4 = {:.9}]", v.re, v.im, -w * w / 4.0);
    }

    let atom = LevyTriplet {
        shift: 0.0,
        gauss_var: 0.0,
        jumps: vec![LevyPiece::Finite(FiniteMeasure::atom(1.0, 1.0))],
    };
    println!("\nunit-atom base, free transform of the image two ways:");
    println!("{:>5} {:>28} {:>28}", "t", "matched kernel", "laplace bridge");
    for t in [0.5, 1.0, 2.0] {
        let direct = free_selfdec_kernel(&atom, t, &loose)?.value;
        let routed = laplace_route(|s| Ok(selfdec_log_char(&atom, s, &loose)?.value), t, &loose)?.value;
        println!(
            "{t:>5} {:>13.9}{:+.9}i {:>13.9}{:+.9}i",
            direct.re, direct.im, routed.re, routed.im
        );
    }

    // a power tail of index 1e-9 has log moment ~ 1/p: the gate refuses it
    let heavy = LevyTriplet {
        shift: 0.0,
        gauss_var: 0.0,
        jumps: vec![LevyPiece::StableTails {
            p: 1e-9,
            c: 1.0,
            theta_plus: 1.0,
            theta_minus: 0.0,
        }],
    };
    println!("\nnear-flat power tail, log moment beyond the cap:");
    match selfdec_log_char(&heavy, 1.0, &policy) {
        Err(e) => println!("  rejected: {e}"),
        Ok(q) => println!("  unexpectedly accepted: {:?}", q.value),
    }
    Ok(())
}
