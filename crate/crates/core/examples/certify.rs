//! Samples product states and checks that no direction decreases the relative entropy
//! away from the closed-form optimum.
//!
//! cargo run --release --example certify -- [n] [samples]

use er_maxcorr::certifier::{certify, derivative_kernel_form};
use er_maxcorr::random_coefficient_matrix;
use er_maxcorr::state::ProductPureState;

fn main() -> er_maxcorr::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().map_or(3, |s| s.parse().expect("n"));
    let samples: usize = args.next().map_or(20_000, |s| s.parse().expect("samples"));

    let a = random_coefficient_matrix(n, 7);
    let report = certify(&a, samples, 0, 1e-9)?;
    println!("{}", serde_json::to_string_pretty(&report).unwrap());

    // directions inside the optimal ensemble are flat
    for k in 0..n {
        let d = derivative_kernel_form(&a, &ProductPureState::basis(n, n, k, k))?;
        println!("f'(0) along |{k}{k}> = {d:.3e}");
    }
    println!(
        "certificate {}",
        if report.passed() { "holds" } else { "VIOLATED" }
    );
    Ok(())
}
