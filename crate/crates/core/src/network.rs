//! Linear n-local networks: closed-form bounds, the operator-form inequality
//! at explicit settings, and its numerical maximization.
//!
//! Party `A1` measures `m⃗_y·σ⃗`, party `A(n+1)` measures `n⃗_y·σ⃗`, and every
//! middle party performs a Bell-state measurement whose two output bits are
//! the `σz⊗σz` and `σx⊗σx` parities. The inequality reads
//! `½ Σ_h √|⟨f_h⟩| ≤ 1`, where `⟨f_h⟩` factorizes over links.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bloch::{bloch_decompose, canonical_frame, CorrelationSpectrum};
use crate::density::DensityMatrix4;
use crate::error::{Error, Result};
use crate::filtering::{filter_network, FilteredNetwork, NetworkFilterSpec};
use crate::linalg::{add, norm, sub, vec_mat, Mat3, Vec3};
use crate::optim::{nelder_mead, NelderMeadOptions};

/// Tolerance on the unit norm of measurement directions.
pub const UNIT_TOLERANCE: f64 = 1e-10;

/// `n` link states `ρ_{j,j+1}` and the parties' filters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkSpec {
    links: Vec<DensityMatrix4>,
    filters: NetworkFilterSpec,
}

impl NetworkSpec {
    pub fn new(links: Vec<DensityMatrix4>, filters: NetworkFilterSpec) -> Result<Self> {
        if links.len() < 2 {
            return Err(Error::LengthMismatch {
                what: "links (at least)",
                expected: 2,
                actual: links.len(),
            });
        }
        if filters.middle.len() != links.len() - 1 {
            return Err(Error::LengthMismatch {
                what: "middle filter pairs",
                expected: links.len() - 1,
                actual: filters.middle.len(),
            });
        }
        Ok(Self { links, filters })
    }

    /// The network without any filtering.
    pub fn unfiltered(links: Vec<DensityMatrix4>) -> Result<Self> {
        let filters = NetworkFilterSpec::identity(links.len());
        Self::new(links, filters)
    }

    pub fn n(&self) -> usize {
        self.links.len()
    }

    pub fn links(&self) -> &[DensityMatrix4] {
        &self.links
    }

    pub fn filters(&self) -> &NetworkFilterSpec {
        &self.filters
    }

    pub fn with_filters(&self, filters: NetworkFilterSpec) -> Result<Self> {
        Self::new(self.links.clone(), filters)
    }

    pub fn filtered(&self) -> Result<FilteredNetwork> {
        filter_network(&self.links, &self.filters)
    }
}

/// Measurement directions of the two extreme parties.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasurementSettings {
    pub m0: Vec3,
    pub m1: Vec3,
    pub n0: Vec3,
    pub n1: Vec3,
}

impl MeasurementSettings {
    pub fn new(m0: Vec3, m1: Vec3, n0: Vec3, n1: Vec3) -> Result<Self> {
        for (name, v) in [("m0", m0), ("m1", m1), ("n0", n0), ("n1", n1)] {
            let len = norm(&v);
            if !((len - 1.0).abs() <= UNIT_TOLERANCE) {
                return Err(Error::param(
                    name,
                    len,
                    "measurement direction must be a unit vector",
                ));
            }
        }
        Ok(Self { m0, m1, n0, n1 })
    }

    /// Directions from `(polar, azimuth)` pairs in the order `m0, m1, n0, n1`.
    pub fn from_angles(angles: &[f64; 8]) -> Self {
        let dir = |k: usize| unit_from_angles(angles[2 * k], angles[2 * k + 1]);
        Self {
            m0: dir(0),
            m1: dir(1),
            n0: dir(2),
            n1: dir(3),
        }
    }

    /// Uniformly random directions on the sphere.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let mut dir = || {
            let z: f64 = rng.gen_range(-1.0..=1.0);
            let phi: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            let r = (1.0 - z * z).max(0.0).sqrt();
            let v = [r * phi.cos(), r * phi.sin(), z];
            let len = norm(&v);
            v.map(|x| x / len)
        };
        Self {
            m0: dir(),
            m1: dir(),
            n0: dir(),
            n1: dir(),
        }
    }

    /// `m0 ± m1` (`+` for `h = 0`).
    fn first_combination(&self, h: usize) -> Vec3 {
        if h == 0 {
            add(&self.m0, &self.m1)
        } else {
            sub(&self.m0, &self.m1)
        }
    }

    fn last_combination(&self, h: usize) -> Vec3 {
        if h == 0 {
            add(&self.n0, &self.n1)
        } else {
            sub(&self.n0, &self.n1)
        }
    }
}

fn unit_from_angles(polar: f64, azimuth: f64) -> Vec3 {
    let (sp, cp) = polar.sin_cos();
    let (sa, ca) = azimuth.sin_cos();
    [sp * ca, sp * sa, cp]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalResult {
    pub b_lin: f64,
    pub b_seq: f64,
    pub success_prob: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lhs_at_settings: Option<f64>,
    pub violation: bool,
}

/// `√(Π t₁ + Π t₂)` over the per-link spectra.
pub fn bound_from_spectra<'a, I>(spectra: I) -> f64
where
    I: IntoIterator<Item = &'a CorrelationSpectrum>,
{
    let (p1, p2) = spectra.into_iter().fold((1.0, 1.0), |(p1, p2), s| {
        (p1 * s.largest(), p2 * s.second())
    });
    (p1 + p2).sqrt()
}

fn spectra_of<'a, I>(states: I) -> Vec<CorrelationSpectrum>
where
    I: IntoIterator<Item = &'a DensityMatrix4>,
{
    states
        .into_iter()
        .map(|rho| CorrelationSpectrum::of(&bloch_decompose(rho).correlation))
        .collect()
}

/// Maximal inequality value without filtering.
pub fn b_lin(links: &[DensityMatrix4]) -> f64 {
    bound_from_spectra(&spectra_of(links))
}

/// Maximal inequality value after filtering, with the overall success
/// probability of the post-selection.
pub fn b_seq(spec: &NetworkSpec) -> Result<(f64, f64)> {
    let filtered = spec.filtered()?;
    Ok((
        bound_from_spectra(&spectra_of(filtered.states())),
        filtered.success_prob,
    ))
}

pub fn evaluate(spec: &NetworkSpec, settings: Option<&MeasurementSettings>) -> Result<EvalResult> {
    let filtered = spec.filtered()?;
    let b_seq = bound_from_spectra(&spectra_of(filtered.states()));
    let lhs_at_settings = settings.map(|ms| lhs_from_correlations(&correlations(&filtered), ms));
    Ok(EvalResult {
        b_lin: b_lin(spec.links()),
        b_seq,
        success_prob: filtered.success_prob,
        lhs_at_settings,
        violation: b_seq > 1.0,
    })
}

fn correlations(filtered: &FilteredNetwork) -> Vec<Mat3> {
    filtered
        .states()
        .map(|rho| bloch_decompose(rho).correlation)
        .collect()
}

/// The two factorized correlators `⟨f_0⟩, ⟨f_1⟩` for per-link correlation
/// tensors `ws` (at least two links).
pub fn factorized_correlators(ws: &[Mat3], ms: &MeasurementSettings) -> [f64; 2] {
    let n = ws.len();
    std::array::from_fn(|h| {
        let axis = if h == 0 { 2 } else { 0 };
        let first = vec_mat(&ms.first_combination(h), &ws[0])[axis];
        let last: f64 = (0..3)
            .map(|k| ws[n - 1][axis][k] * ms.last_combination(h)[k])
            .sum();
        let middle: f64 = ws[1..n - 1].iter().map(|w| w[axis][axis]).product();
        first * middle * last
    })
}

/// `½ Σ_h √|⟨f_h⟩|`
pub fn lhs_from_correlations(ws: &[Mat3], ms: &MeasurementSettings) -> f64 {
    let [f0, f1] = factorized_correlators(ws, ms);
    0.5 * (f0.abs().sqrt() + f1.abs().sqrt())
}

/// Inequality value on the filtered network at explicit settings.
pub fn lhs_at_settings(spec: &NetworkSpec, ms: &MeasurementSettings) -> Result<f64> {
    Ok(lhs_from_correlations(&correlations(&spec.filtered()?), ms))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaximizeOptions {
    pub restarts: usize,
    pub seed: u64,
}

impl Default for MaximizeOptions {
    fn default() -> Self {
        Self {
            restarts: 16,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LhsMaximum {
    pub value: f64,
    /// Maximizing directions, expressed in the canonical local frame of
    /// each filtered link.
    pub settings: MeasurementSettings,
    pub restart: usize,
}

/// Maximizes the inequality over the extreme parties' directions after
/// moving every filtered link to its canonical frame.
pub fn maximize_lhs(spec: &NetworkSpec, opts: &MaximizeOptions) -> Result<LhsMaximum> {
    let filtered = spec.filtered()?;
    let ws = filtered
        .states()
        .map(|rho| canonical_frame(rho).map(|(_, bf)| bf.correlation))
        .collect::<Result<Vec<_>>>()?;
    Ok(maximize_over_settings(&ws, opts))
}

/// Multi-start simplex search of `lhs_from_correlations` over the eight
/// direction angles. Restarts run in parallel; the best value wins, ties
/// going to the lowest restart index.
pub fn maximize_over_settings(ws: &[Mat3], opts: &MaximizeOptions) -> LhsMaximum {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let starts: Vec<[f64; 8]> = (0..opts.restarts.max(1))
        .map(|_| {
            std::array::from_fn(|k| {
                if k % 2 == 0 {
                    rng.gen_range(0.0..std::f64::consts::PI)
                } else {
                    rng.gen_range(0.0..std::f64::consts::TAU)
                }
            })
        })
        .collect();
    let nm = NelderMeadOptions::default();
    let results: Vec<(f64, [f64; 8])> = starts
        .par_iter()
        .map(|x0| {
            let objective = |x: &[f64]| {
                let angles: [f64; 8] = x.try_into().expect("eight angles");
                -lhs_from_correlations(ws, &MeasurementSettings::from_angles(&angles))
            };
            let m = nelder_mead(objective, x0, &nm);
            (-m.value, m.x.try_into().expect("eight angles"))
        })
        .collect();
    let (restart, (value, angles)) = results
        .into_iter()
        .enumerate()
        .reduce(|best, cand| if cand.1 .0 > best.1 .0 { cand } else { best })
        .expect("at least one restart");
    LhsMaximum {
        value,
        settings: MeasurementSettings::from_angles(&angles),
        restart,
    }
}
