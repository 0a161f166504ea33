//! f(x) = S(sigma || (1-x) rho* + x rho) along a segment towards a random separable state.

use er_maxcorr::certifier::convexity_probe;
use er_maxcorr::state::{ensemble_to_density, random_product_state, SeparableEnsemble};
use er_maxcorr::{build_sigma, closest_separable, random_coefficient_matrix};

fn main() -> er_maxcorr::Result<()> {
    let n = 3;
    let a = random_coefficient_matrix(n, 5);
    let sigma = build_sigma(&a, n, n, None, None)?;
    let rho_star = closest_separable(&a, n, n, None, None)?;

    let k = 12;
    let states = (0..k)
        .map(|i| random_product_state(n, n, 100 + i))
        .collect();
    let rho = ensemble_to_density(&SeparableEnsemble::new(
        vec![1.0 / k as f64; k as usize],
        states,
    )?)?;

    let grid: Vec<f64> = (0..=10).map(|i| i as f64 / 10.0).collect();
    let probe = convexity_probe(&sigma, &rho_star, &rho, &grid)?;
    for (x, f) in &probe.points {
        println!(
            "{x:.1}  {f:.12}  {}",
            "#".repeat(((f - probe.f0) * 40.0) as usize)
        );
    }
    println!(
        "max chord excess {:.2e}, max descent {:.2e}",
        probe.max_chord_excess, probe.max_descent
    );
    Ok(())
}
