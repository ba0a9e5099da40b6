//! The batch front end is plain library code: build a RunConfig, run an
//! evaluation over a grid, and serialize the result as CSV or JSON. The same
//! entry points back the `freebridge` binary.

use freebridge::cli::{cmd_check, cmd_eval, eval_to_csv, RunConfig};

fn main() -> freebridge::error::Result<()> {
    let config = RunConfig {
        law: Some("wigner".into()),
        transform: Some("voiculescu-laplace".into()),
        t_start: Some(0.5),
        t_stop: Some(4.0),
        t_count: Some(8),
        t_spacing: Some("log".into()),
        workers: Some(2),
        ..Default::default()
    };
    let report = cmd_eval(&config)?;
    println!("{}", eval_to_csv(&report));

    println!("same report as JSON:");
    println!("{}", serde_json::to_string_pretty(&report).unwrap());

    let check = RunConfig {
        identity: Some("eq27".into()),
        t_count: Some(3),
        ..Default::default()
    };
    let summary = cmd_check(&check)?;
    println!(
        "\nidentity run '{}': {}/{} checks passed",
        summary.identity, summary.passed, summary.total
    );
    Ok(())
}
