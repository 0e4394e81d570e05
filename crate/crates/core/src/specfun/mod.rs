//! Special functions: spherical Bessel functions and the `m = n = 0` prolate spheroidal
//! eigensystem.

pub mod bessel;
pub mod spheroidal;

pub use bessel::spherical_jn_all;
pub use spheroidal::{
    radial_s1_at_one, spheroidal_eigensystem, spheroidal_eigensystem_with_terms, SpheroidalSolution,
};

use std::fmt::Write as _;

/// CSV table `c,eigenvalue,r00_at_1` for the given spheroidicities.
pub fn spheroidal_table(cs: &[f64]) -> crate::Result<String> {
    let mut out = String::from("c,eigenvalue,r00_at_1\n");
    for &c in cs {
        let s = spheroidal_eigensystem(c)?;
        let _ = writeln!(out, "{:.17e},{:.17e},{:.17e}", c, s.eigenvalue, s.radial_at_one());
    }
    Ok(out)
}
