//! Numerical minimization over separable ensembles, compared with the closed form.
//!
//! cargo run --release --example minimize -- [n] [restarts]

use er_maxcorr::minimizer::{lower_bound_check, minimize, MinimizeConfig};
use er_maxcorr::{build_sigma, er_closed_form, random_coefficient_matrix};

fn main() -> er_maxcorr::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().map_or(2, |s| s.parse().expect("n"));
    let restarts: usize = args.next().map_or(20, |s| s.parse().expect("restarts"));

    let a = random_coefficient_matrix(n, 3);
    let sigma = build_sigma(&a, n, n, None, None)?;
    let cfg = MinimizeConfig {
        restarts,
        seed: 11,
        ..Default::default()
    };
    let result = minimize(&sigma, &cfg)?;
    let claim = er_closed_form(&a).er;

    for (i, r) in result.restarts.iter().enumerate() {
        println!(
            "restart {i:>2}: {:.12} after {:>4} iterations{}",
            r.value,
            r.iterations,
            if r.converged { "" } else { " (not converged)" }
        );
    }
    println!("closed form {claim:.12}");
    println!(
        "numerical   {:.12} (restart {})",
        result.value, result.best_restart_index
    );
    let report = lower_bound_check(&sigma, &result, claim)?;
    println!("gap {:.3e}", report.gap);
    Ok(())
}
