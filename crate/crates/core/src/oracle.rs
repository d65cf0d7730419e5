//! Brute-force Born-rule evaluation of the n-local inequality for small
//! networks, enumerating every measurement outcome on the full filtered state.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{c, qubit, ComplexMatrix, C64};
use crate::network::{MeasurementSettings, NetworkSpec};

/// Largest number of sources the oracle accepts (a 64-dimensional state).
pub const MAX_ORACLE_SOURCES: usize = 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub i: f64,
    pub j: f64,
    pub lhs: f64,
    /// Total outcome probability for each input pair, indexed `2·y_first + y_last`.
    pub probability_sums: [f64; 4],
}

/// Bell-basis projectors with their `(o1, o2)` output bits, where
/// `(-1)^o1` is the `σz⊗σz` eigenvalue and `(-1)^o2` the `σx⊗σx` eigenvalue.
fn bell_projectors() -> [(ComplexMatrix, u8, u8); 4] {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let ket = |amps: [f64; 4]| -> [C64; 4] { amps.map(|a| c(a * h, 0.0)) };
    [
        (ComplexMatrix::outer(&ket([1.0, 0.0, 0.0, 1.0])), 0, 0),
        (ComplexMatrix::outer(&ket([1.0, 0.0, 0.0, -1.0])), 0, 1),
        (ComplexMatrix::outer(&ket([0.0, 1.0, 1.0, 0.0])), 1, 0),
        (ComplexMatrix::outer(&ket([0.0, 1.0, -1.0, 0.0])), 1, 1),
    ]
}

/// `(I + a r⃗·σ⃗) / 2` for outcome `a = ±1`.
fn spin_projector(direction: &[f64; 3], outcome: f64) -> ComplexMatrix {
    qubit::identity()
        .add(&qubit::dot_sigma(direction).scale_real(outcome))
        .scale_real(0.5)
}

/// `Tr[ρ Π]` without forming the product.
fn born_probability(rho: &ComplexMatrix, projector: &ComplexMatrix) -> f64 {
    rho.trace_product(projector).re
}

/// Computes `I`, `J` and `√|I| + √|J|` from the full outcome distribution of
/// the filtered network.
pub fn born_oracle(spec: &NetworkSpec, ms: &MeasurementSettings) -> Result<OracleResult> {
    let n = spec.n();
    if n > MAX_ORACLE_SOURCES {
        return Err(Error::DimensionTooLarge(n));
    }
    let filtered = spec.filtered()?;
    let full = filtered
        .states()
        .skip(1)
        .fold(filtered.links[0].state.matrix().clone(), |acc, rho| {
            acc.kron(rho.matrix())
        });

    let bells = bell_projectors();
    // Every joint Bell outcome of the middle parties, with the products of
    // their zz and xx signs.
    let mut middle: Vec<(ComplexMatrix, f64, f64)> = vec![(ComplexMatrix::identity(1), 1.0, 1.0)];
    for _ in 1..n {
        middle = middle
            .iter()
            .flat_map(|(m, zz, xx)| {
                bells.iter().map(move |(b, o1, o2)| {
                    (
                        m.kron(b),
                        zz * if *o1 == 0 { 1.0 } else { -1.0 },
                        xx * if *o2 == 0 { 1.0 } else { -1.0 },
                    )
                })
            })
            .collect();
    }

    let first_dirs = [ms.m0, ms.m1];
    let last_dirs = [ms.n0, ms.n1];
    let mut i_sum = 0.0;
    let mut j_sum = 0.0;
    let mut probability_sums = [0.0; 4];
    for (y_first, m) in first_dirs.iter().enumerate() {
        for (y_last, d) in last_dirs.iter().enumerate() {
            let mut corr_z = 0.0;
            let mut corr_x = 0.0;
            let mut total = 0.0;
            for a in [1.0, -1.0] {
                let pa = spin_projector(m, a);
                for b in [1.0, -1.0] {
                    let pb = spin_projector(d, b);
                    for (mid, zz, xx) in &middle {
                        let projector = pa.kron(mid).kron(&pb);
                        let p = born_probability(&full, &projector);
                        total += p;
                        corr_z += p * a * b * zz;
                        corr_x += p * a * b * xx;
                    }
                }
            }
            probability_sums[2 * y_first + y_last] = total;
            i_sum += corr_z;
            let sign = if (y_first + y_last) % 2 == 0 {
                1.0
            } else {
                -1.0
            };
            j_sum += sign * corr_x;
        }
    }
    let i = 0.25 * i_sum;
    let j = 0.25 * j_sum;
    Ok(OracleResult {
        i,
        j,
        lhs: i.abs().sqrt() + j.abs().sqrt(),
        probability_sums,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filtering::NetworkFilterSpec;
    use crate::network::lhs_at_settings;
    use crate::states::{grud_state, singlet, werner_state, GrudParams, WernerParam};
    use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

    fn bell_settings() -> MeasurementSettings {
        let h = FRAC_1_SQRT_2;
        MeasurementSettings::new([h, 0.0, h], [-h, 0.0, h], [h, 0.0, h], [-h, 0.0, h]).unwrap()
    }

    #[test]
    fn two_singlets() {
        let spec = NetworkSpec::unfiltered(vec![singlet(), singlet()]).unwrap();
        let r = born_oracle(&spec, &bell_settings()).unwrap();
        assert!(
            (r.i - 0.5).abs() < 1e-12 && (r.j - 0.5).abs() < 1e-12,
            "{r:?}"
        );
        assert!((r.lhs - SQRT_2).abs() < 1e-12);
        assert!(r.probability_sums.iter().all(|p| (p - 1.0).abs() < 1e-12));
    }

    #[test]
    fn matches_factorized_form_on_filtered_trilocal() {
        let spec = NetworkSpec::new(
            vec![
                grud_state(&GrudParams::new(0.1, 0.35).unwrap()),
                werner_state(&WernerParam::new(0.7).unwrap()),
                grud_state(&GrudParams::new(0.3, 0.6).unwrap()),
            ],
            NetworkFilterSpec::new(0.9, 0.5, vec![(0.6, 0.8), (0.3, 1.0)]).unwrap(),
        )
        .unwrap();
        let ms = MeasurementSettings::from_angles(&[0.3, 1.1, 2.0, -0.4, 0.7, 0.2, 1.5, 2.5]);
        let r = born_oracle(&spec, &ms).unwrap();
        let lhs = lhs_at_settings(&spec, &ms).unwrap();
        assert!((r.lhs - lhs).abs() < 1e-10, "{} vs {lhs}", r.lhs);
    }

    #[test]
    fn rejects_large_networks() {
        let spec = NetworkSpec::unfiltered(vec![singlet(); 4]).unwrap();
        assert_eq!(
            born_oracle(&spec, &bell_settings()),
            Err(Error::DimensionTooLarge(4))
        );
    }
}
