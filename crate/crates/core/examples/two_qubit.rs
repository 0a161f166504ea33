//! Two-qubit family a00 = x, a01 = alpha: scan |alpha| at fixed x.
//!
//! cargo run --example two_qubit -- [x]

use er_maxcorr::two_qubit_er;
use num_complex::Complex64;

fn main() -> er_maxcorr::Result<()> {
    let x: f64 = std::env::args()
        .nth(1)
        .map_or(0.5, |s| s.parse().expect("x"));
    let amax = (x * (1.0 - x)).sqrt();
    println!("{:>10} {:>18} {:>18}", "|alpha|", "Er (nats)", "lambda");
    for k in 0..=10 {
        let alpha = Complex64::new(amax * k as f64 / 10.0, 0.0);
        let r = two_qubit_er(x, alpha)?;
        println!(
            "{:>10.5} {:>18.15} {:>18.15}",
            alpha.re,
            r.er,
            r.lambda.unwrap_or(f64::NAN)
        );
    }
    Ok(())
}
