//! Product-law factorizations and composed mappings. The product of a
//! uniform and an exponential factor has density Gamma(0, w); the shrinking
//! exponential product has density e^{-w}/w, which only integrates test
//! functions vanishing at zero. Composing the exponential mixer with a class
//! mapping collapses to a single time-changed random integral.

use freebridge::classes::{
    composition_identity_check, pushforward_check, IdClass, ProbeFn, PushforwardMap,
};
use freebridge::measures::LevyTriplet;
use freebridge::numerics::QuadraturePolicy;

fn main() -> freebridge::error::Result<()> {
    let policy = QuadraturePolicy::default();
    let mut loose = policy.clone();
    loose.target_rel_tol = 1e-8;

    println!("uniform x exponential product, density Gamma(0, w):");
    for f in [ProbeFn::One, ProbeFn::Linear, ProbeFn::ExpNeg, ProbeFn::Sine] {
        let (lhs, rhs) = pushforward_check(PushforwardMap::Gamma0, f, &policy)?;
        println!("  f = {:<8} {lhs:+.12} vs {rhs:+.12}", f.label());
    }

    println!("\nshrinking exponential product, density e^(-w)/w:");
    for f in [ProbeFn::One, ProbeFn::Linear, ProbeFn::ExpNeg, ProbeFn::Sine] {
        match pushforward_check(PushforwardMap::ExpOverX, f, &policy) {
            Ok((lhs, rhs)) => println!("  f = {:<8} {lhs:+.12} vs {rhs:+.12}", f.label()),
            Err(e) => println!("  f = {:<8} rejected: {e}", f.label()),
        }
    }

    let gauss = LevyTriplet {
        shift: 0.0,
        gauss_var: 1.0,
        jumps: vec![],
    };
    println!("\ncomposed mappings on N(0,1) at t = 1:");
    let (lhs, rhs) = composition_identity_check(IdClass::SSelfdec, &gauss, 1.0, &loose)?;
    println!("  shrink class:  {:+.10}{:+.10}i vs {:+.10}{:+.10}i  [-1/3]", lhs.re, lhs.im, rhs.re, rhs.im);
    let (lhs, rhs) = composition_identity_check(IdClass::Selfdec, &gauss, 1.0, &loose)?;
    println!("  selfdec class: {:+.10}{:+.10}i vs {:+.10}{:+.10}i  [-1/2]", lhs.re, lhs.im, rhs.re, rhs.im);
    Ok(())
}
