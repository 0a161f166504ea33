//! Writing and reading JSON state files.

use er_maxcorr::io::StateFile;
use er_maxcorr::{build_sigma, er_closed_form, random_coefficient_matrix, validate_coefficients};

fn main() -> er_maxcorr::Result<()> {
    let dir = std::env::temp_dir();
    let a = random_coefficient_matrix(3, 21);

    let coeff_path = dir.join("er_maxcorr_coefficients.json");
    StateFile::coefficients(a.matrix()).write(&coeff_path)?;
    let back = validate_coefficients(&StateFile::read(&coeff_path)?.matrix()?)?;
    assert_eq!(back.matrix(), a.matrix());
    println!(
        "{}: Er = {:.15}",
        coeff_path.display(),
        er_closed_form(&back).er
    );

    let sigma = build_sigma(&a, 3, 3, None, None)?;
    let density_path = dir.join("er_maxcorr_density.json");
    StateFile::density(sigma.matrix(), 3, 3).write(&density_path)?;
    match StateFile::read(&density_path)? {
        StateFile::Density { d_a, d_b, .. } => {
            println!("{}: {d_a}x{d_b} density matrix", density_path.display())
        }
        other => unreachable!("{other:?}"),
    }
    Ok(())
}
