use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::stiefel::orthonormalize;

/// Parameters of the synthetic PCA instance `A = UΣVᵀ`, `Σ_ii = ξ^{i/2}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticSpec {
    pub n: usize,
    pub m: usize,
    pub p: usize,
    pub xi: f64,
    pub seed: u64,
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.p >= 1 && self.p <= self.n && self.n <= self.m) {
            return Err(Error::InvalidParameter {
                name: "n/m/p",
                detail: format!("need 1 <= p <= n <= m, got n={} m={} p={}", self.n, self.m, self.p),
            });
        }
        if !(self.xi > 0.0 && self.xi < 1.0) {
            return Err(Error::InvalidParameter {
                name: "xi",
                detail: format!("must lie in (0, 1), got {}", self.xi),
            });
        }
        Ok(())
    }
}

/// Standard-normal matrix drawn column-major from `rng`.
pub fn gaussian_matrix<T: Real, R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> DMatrix<T> {
    DMatrix::from_fn(rows, cols, |_, _| {
        let v: f64 = StandardNormal.sample(rng);
        T::lit(v)
    })
}

/// `A = UΣVᵀ` with `U` (n×n) and `V` (m×n) orthonormalized from seeded
/// Gaussian matrices and `Σ_ii = ξ^{i/2}` for `i = 1..n`.
pub fn generate_synthetic_pca<T: Real>(spec: &SyntheticSpec) -> Result<DMatrix<T>> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let u = orthonormalize::<T>(&gaussian_matrix(spec.n, spec.n, &mut rng))?.into_matrix();
    let v = orthonormalize::<T>(&gaussian_matrix(spec.m, spec.n, &mut rng))?.into_matrix();
    let sigma = DVector::from_fn(spec.n, |i, _| T::lit(spec.xi.powf((i + 1) as f64 / 2.0)));
    let mut us = u;
    for (j, s) in sigma.iter().enumerate() {
        us.column_mut(j).scale_mut(*s);
    }
    Ok(us * v.transpose())
}

/// Synthetic OLSR data: `C` (n×m) with entries `N(0, 1/m)` and a one-hot
/// class indicator `D` (p×m) with a uniformly drawn class per sample.
pub fn generate_synthetic_olsr<T: Real>(
    n: usize,
    m: usize,
    p: usize,
    seed: u64,
) -> Result<(DMatrix<T>, DMatrix<T>)> {
    if !(p >= 1 && p <= n && m >= 1) {
        return Err(Error::InvalidParameter {
            name: "n/m/p",
            detail: format!("need 1 <= p <= n and m >= 1, got n={n} m={m} p={p}"),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = T::lit(1.0 / (m as f64).sqrt());
    let c = gaussian_matrix::<T, _>(n, m, &mut rng) * scale;
    let mut d = DMatrix::zeros(p, m);
    for j in 0..m {
        d[(rng.random_range(0..p), j)] = T::one();
    }
    Ok((c, d))
}

/// Synthetic SDL data: `B` (n×m) with entries `N(0, 1/(2n))`.
pub fn generate_synthetic_sdl<T: Real>(n: usize, m: usize, seed: u64) -> Result<DMatrix<T>> {
    if n == 0 || m == 0 {
        return Err(Error::InvalidParameter {
            name: "n/m",
            detail: format!("need n, m >= 1, got n={n} m={m}"),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = T::lit(1.0 / (2.0 * n as f64).sqrt());
    Ok(gaussian_matrix::<T, _>(n, m, &mut rng) * scale)
}

/// Splits columns into `d` contiguous blocks whose sizes differ by at most
/// one; the first `m mod d` blocks get the extra column.
pub fn partition_columns<T: Real>(a: &DMatrix<T>, d: usize) -> Result<Vec<DMatrix<T>>> {
    let m = a.ncols();
    if d == 0 || d > m {
        return Err(Error::InvalidParameter {
            name: "d",
            detail: format!("cannot split {m} columns across {d} agents"),
        });
    }
    let (base, extra) = (m / d, m % d);
    let mut start = 0;
    let blocks = (0..d)
        .map(|i| {
            let width = base + usize::from(i < extra);
            let block = a.columns(start, width).clone_owned();
            start += width;
            block
        })
        .collect();
    Ok(blocks)
}
