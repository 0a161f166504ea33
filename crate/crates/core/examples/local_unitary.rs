//! The same coefficient matrix embedded with random local bases on unequal local dimensions.
//!
//! cargo run --release --example local_unitary

use er_maxcorr::minimizer::{minimize, MinimizeConfig};
use er_maxcorr::state::{
    closest_separable_in, random_orthonormal_basis, sigma_in, CorrelatedBasis,
};
use er_maxcorr::{er_closed_form, random_coefficient_matrix, relative_entropy};

fn main() -> er_maxcorr::Result<()> {
    let a = random_coefficient_matrix(2, 9);
    let er = er_closed_form(&a).er;
    println!("closed form: {er:.12}");

    for (da, db) in [(2, 2), (3, 2), (2, 3)] {
        let ua = random_orthonormal_basis(da, 1);
        let ub = random_orthonormal_basis(db, 2);
        let basis = CorrelatedBasis::new(2, da, db, Some(&ua), Some(&ub))?;
        let sigma = sigma_in(&a, &basis);
        let direct = relative_entropy(&sigma, &closest_separable_in(&a, &basis))?;
        let numerical = minimize(
            &sigma,
            &MinimizeConfig {
                restarts: 8,
                ..Default::default()
            },
        )?
        .value;
        println!("{da}x{db}: S(sigma||rho*) = {direct:.12}, minimized = {numerical:.12}");
    }
    Ok(())
}
