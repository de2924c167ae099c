use serde::Serialize;

use crate::error::{Error, Result};

/// Largest dimension accepted by the bound table.
pub const MAX_TABLE_DIMENSION: u64 = 1_000_000_000;

fn check_dimension(d: u64) -> Result<()> {
    if d < 2 {
        return Err(Error::Domain(format!(
            "dimension must be at least 2, got {d}"
        )));
    }
    Ok(())
}

/// `(d-2)^2 / (d^2 + (d-2)^2)`: the floor on `I_ont / I_Q` for reciprocal models
/// with a basis-independent degree of epistemicity.
///
/// Numerator and denominator are exact integers; only the final division rounds.
pub fn bound_constant(d: u64) -> Result<f64> {
    check_dimension(d)?;
    let d = u128::from(d);
    let num = (d - 2) * (d - 2);
    let den = d * d + num;
    Ok(ratio(num, den))
}

/// Upper bound `d^2 / (2d^2 - 4d + 4)` on the basis-independent degree of epistemicity.
pub fn maroney_omega_bound(d: u64) -> Result<f64> {
    check_dimension(d)?;
    let d = u128::from(d);
    let num = d * d;
    let den = 2 * d * d + 4 - 4 * d;
    Ok(ratio(num, den))
}

fn ratio(num: u128, den: u128) -> f64 {
    let g = gcd(num, den);
    (num / g) as f64 / (den / g) as f64
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundRow {
    pub d: u64,
    pub omega_d_bound: f64,
    pub bound_constant: f64,
}

/// One row per dimension in `d_min..=d_max`.
pub fn bounds_table(d_min: u64, d_max: u64) -> Result<Vec<BoundRow>> {
    check_dimension(d_min)?;
    if d_max < d_min || d_max > MAX_TABLE_DIMENSION {
        return Err(Error::Domain(format!(
            "dimension range [{d_min}, {d_max}] must be ordered and within [2, {MAX_TABLE_DIMENSION}]"
        )));
    }
    (d_min..=d_max)
        .map(|d| {
            Ok(BoundRow {
                d,
                omega_d_bound: maroney_omega_bound(d)?,
                bound_constant: bound_constant(d)?,
            })
        })
        .collect()
}
