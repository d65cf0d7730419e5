//! Seeded random link states, filters and networks for property sweeps.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::density::DensityMatrix4;
use crate::error::Result;
use crate::filtering::NetworkFilterSpec;
use crate::linalg::Vec3;
use crate::matrix::{c, ComplexMatrix};
use crate::network::{b_seq, NetworkSpec};
use crate::states::{product_state, ProductParams};

/// Smallest filter strength drawn, so post-selection never annihilates.
pub const MIN_RANDOM_EPS: f64 = 1e-3;

/// Mixed state `G G† / Tr` from a complex Ginibre matrix.
pub fn random_state<R: Rng + ?Sized>(rng: &mut R) -> DensityMatrix4 {
    let entries = (0..16)
        .map(|_| c(StandardNormal.sample(rng), StandardNormal.sample(rng)))
        .collect();
    let g = ComplexMatrix::new(4, entries).expect("16 entries");
    let m = g.matmul(&g.adjoint());
    let t = m.trace().re;
    DensityMatrix4::from_trusted(m.scale_real(1.0 / t))
}

/// Uniform point in the unit ball.
pub fn random_bloch_vector<R: Rng + ?Sized>(rng: &mut R) -> Vec3 {
    let g: Vec3 = std::array::from_fn(|_| StandardNormal.sample(rng));
    let len = crate::linalg::norm(&g);
    let r = rng.gen_range(0.0..=1.0_f64).cbrt();
    g.map(|x| x * r / len)
}

pub fn random_product_state<R: Rng + ?Sized>(rng: &mut R) -> DensityMatrix4 {
    let params = ProductParams::new(random_bloch_vector(rng), random_bloch_vector(rng))
        .expect("vectors lie in the unit ball");
    product_state(&params)
}

/// Independent filter strengths in `[MIN_RANDOM_EPS, 1]` for `n` sources.
pub fn random_filters<R: Rng + ?Sized>(n: usize, rng: &mut R) -> NetworkFilterSpec {
    let mut eps = || rng.gen_range(MIN_RANDOM_EPS..=1.0);
    let first = eps();
    let last = eps();
    let middle = (1..n).map(|_| (eps(), eps())).collect();
    NetworkFilterSpec::new(first, last, middle).expect("strengths are in range")
}

/// `n` random mixed links under random filters.
pub fn random_network<R: Rng + ?Sized>(n: usize, rng: &mut R) -> NetworkSpec {
    let links = (0..n).map(|_| random_state(rng)).collect();
    NetworkSpec::new(links, random_filters(n, rng)).expect("consistent shapes")
}

/// Like [`random_network`], with one link (at a random position) replaced by
/// a product state.
pub fn random_network_with_product_link<R: Rng + ?Sized>(n: usize, rng: &mut R) -> NetworkSpec {
    let product_at = rng.gen_range(0..n);
    let links = (0..n)
        .map(|j| {
            if j == product_at {
                random_product_state(rng)
            } else {
                random_state(rng)
            }
        })
        .collect();
    NetworkSpec::new(links, random_filters(n, rng)).expect("consistent shapes")
}

/// Largest `b_seq` over `count` random networks (2 to 5 sources) that each
/// contain a product link.
pub fn product_link_sweep<R: Rng + ?Sized>(count: usize, rng: &mut R) -> Result<f64> {
    let mut max = 0.0_f64;
    for _ in 0..count {
        let n = rng.gen_range(2..=5);
        let spec = random_network_with_product_link(n, rng);
        max = max.max(b_seq(&spec)?.0);
    }
    Ok(max)
}
