//! Prints the Legendre-family fit over λ ∈ [1e−8, 1e−3].

use bcov_core::periods::{fit_asymptotics, legendre_samples};

fn main() {
    let samples = legendre_samples(1e-8, 1e-3, 64).expect("samples");
    let fit = fit_asymptotics(&samples).expect("fit");
    println!("{fit:?}");
}
