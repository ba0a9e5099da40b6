//! Random integration of the unit Poisson law against e^{-w}/w on (0, inf)
//! produces the standard exponential law: both sides of that identity are
//! computed independently and should agree to quadrature accuracy.

use freebridge::classes::exp_poisson_identity;
use freebridge::numerics::QuadraturePolicy;

fn main() -> freebridge::error::Result<()> {
    let policy = QuadraturePolicy::default();
    println!(
        "{:>6} {:>30} {:>30} {:>10}",
        "t", "random integral", "-log(1 - it)", "gap"
    );
    let mut worst = 0.0f64;
    for t in [-2.0, -0.5, 0.5, 1.0, 2.0, 5.0] {
        let (lhs, rhs) = exp_poisson_identity(t, &policy)?;
        let gap = (lhs - rhs).norm();
        worst = worst.max(gap);
        println!(
            "{t:>6} {:>14.10}{:+.10}i {:>14.10}{:+.10}i {gap:>10.2e}",
            lhs.re, lhs.im, rhs.re, rhs.im
        );
    }
    println!("\nlargest gap: {worst:.2e}");
    Ok(())
}
