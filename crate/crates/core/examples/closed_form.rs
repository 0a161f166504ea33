//! Closed-form Er of a random coefficient matrix, with the optimal separable state.
//!
//! cargo run --example closed_form -- [n] [seed]

use er_maxcorr::{
    closest_separable, er_closed_form, g_kernel, random_coefficient_matrix, relative_entropy,
};

fn main() -> er_maxcorr::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().map_or(3, |s| s.parse().expect("n"));
    let seed: u64 = args.next().map_or(1, |s| s.parse().expect("seed"));

    let a = random_coefficient_matrix(n, seed);
    let r = er_closed_form(&a);
    println!("coefficients:{}", a.matrix());
    println!("Er          = {:.15}", r.er);
    println!("H(diag A)   = {:.15}", r.diagonal_entropy);
    println!("S(sigma)    = {:.15}", r.sigma_entropy);

    println!("kernel g(n, n'):");
    for i in 0..a.n() {
        let row: Vec<String> = (0..a.n())
            .map(|j| format!("{:>24.6}", g_kernel(&a, i, j).unwrap()))
            .collect();
        println!("  {}", row.join(""));
    }

    let sigma = er_maxcorr::build_sigma(&a, n, n, None, None)?;
    let rho_star = closest_separable(&a, n, n, None, None)?;
    println!(
        "S(sigma || rho*) by diagonalization = {:.15}",
        relative_entropy(&sigma, &rho_star)?
    );
    println!("rho* is PPT: {}", rho_star.is_ppt());
    Ok(())
}
