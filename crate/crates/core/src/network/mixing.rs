use nalgebra::DMatrix;

use super::Graph;
use crate::error::{shape, Error, Result};
use crate::scalar::Real;

/// Tolerance used when checking a mixing matrix against its invariants.
pub const ASSUMPTION2_TOL: f64 = 1e-12;

/// Symmetric doubly stochastic matrix conforming to a graph, with its
/// spectral gap parameter `λ = ‖W − 𝟏𝟏ᵀ/d‖₂`.
#[derive(Debug, Clone, PartialEq)]
pub struct MixingMatrix<T: Real> {
    w: DMatrix<T>,
    lambda: T,
}

impl<T: Real> MixingMatrix<T> {
    /// Accepts `w` only if it passes [`verify_assumption2`] against `graph`
    /// and `λ < 1`.
    pub fn from_weights(w: DMatrix<T>, graph: &Graph) -> Result<Self> {
        let report = verify_assumption2(&w, graph);
        if !report.all_passed() {
            return Err(Error::InvalidParameter {
                name: "mixing matrix",
                detail: report.to_string(),
            });
        }
        let lambda = report.spectral_gap.expect("symmetric matrices have a gap");
        if !(lambda < T::one()) {
            return Err(Error::InvalidParameter {
                name: "mixing matrix",
                detail: format!("spectral gap parameter {lambda} is not below 1"),
            });
        }
        Ok(Self { w, lambda })
    }

    /// Skips every invariant check; `λ` is NaN when `w` is not symmetric.
    /// Meant for fault-injection experiments.
    pub fn from_weights_unchecked(w: DMatrix<T>) -> Self {
        let lambda = spectral_gap(&w).unwrap_or_else(|_| T::lit(f64::NAN));
        Self { w, lambda }
    }

    pub fn weights(&self) -> &DMatrix<T> {
        &self.w
    }

    pub fn lambda(&self) -> T {
        self.lambda
    }

    pub fn d(&self) -> usize {
        self.w.nrows()
    }

    /// Applies `W ⊗ I_n` to the stacked blocks, see [`mix_stack`].
    pub fn mix(&self, blocks: &[DMatrix<T>]) -> Result<Vec<DMatrix<T>>> {
        mix_stack(&self.w, blocks)
    }
}

/// Metropolis weights: `W(i,j) = 1/(1 + max(deg_i, deg_j))` on edges, the
/// diagonal absorbs the rest of each row.
pub fn metropolis_weights<T: Real>(graph: &Graph) -> Result<MixingMatrix<T>> {
    if !graph.is_connected() {
        return Err(Error::Disconnected("Metropolis weights need a connected graph".into()));
    }
    let d = graph.d();
    let deg = graph.degrees();
    let mut w = DMatrix::zeros(d, d);
    for (i, j) in graph.edges() {
        let v = T::one() / T::lit((1 + deg[i].max(deg[j])) as f64);
        w[(i, j)] = v;
        w[(j, i)] = v;
    }
    for i in 0..d {
        let mut off = T::zero();
        for j in 0..d {
            if j != i {
                off += w[(i, j)];
            }
        }
        w[(i, i)] = T::one() - off;
    }
    MixingMatrix::from_weights(w, graph)
}

fn asymmetry<T: Real>(w: &DMatrix<T>) -> T {
    let mut worst = T::zero();
    for i in 0..w.nrows() {
        for j in (i + 1)..w.ncols() {
            worst = worst.max((w[(i, j)] - w[(j, i)]).abs());
        }
    }
    worst
}

/// `λ = ‖W − 𝟏𝟏ᵀ/d‖₂` via a symmetric eigendecomposition.
pub fn spectral_gap<T: Real>(w: &DMatrix<T>) -> Result<T> {
    if !w.is_square() || w.nrows() == 0 {
        return Err(shape("spectral_gap", format!("non-square {:?}", w.shape())));
    }
    let skew = asymmetry(w);
    if skew > T::lit(ASSUMPTION2_TOL) * (T::one() + w.amax()) {
        return Err(Error::InvalidParameter {
            name: "W",
            detail: format!("not symmetric (max |W_ij − W_ji| = {skew})"),
        });
    }
    let d = w.nrows();
    let avg = T::one() / T::lit(d as f64);
    let centered = w.map(|v| v - avg);
    let eig = centered.symmetric_eigen();
    Ok(eig.eigenvalues.iter().fold(T::zero(), |acc, v| acc.max(v.abs())))
}

/// Outcome of one invariant check: pass flag and worst violation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Check<T> {
    pub passed: bool,
    pub worst: T,
}

impl<T: Real> Check<T> {
    fn at_most(worst: T, tol: T) -> Self {
        Self {
            passed: worst <= tol,
            worst,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Assumption2Report<T> {
    /// `W` is `d×d` for the graph's `d`.
    pub dimension_ok: bool,
    pub symmetry: Check<T>,
    /// Row and column sums equal to one.
    pub stochasticity: Check<T>,
    pub nonnegativity: Check<T>,
    /// Zero weight on every non-edge off the diagonal.
    pub sparsity: Check<T>,
    /// `‖W − 𝟏𝟏ᵀ/d‖₂`, when `W` is symmetric.
    pub spectral_gap: Option<T>,
}

impl<T: Real> Assumption2Report<T> {
    /// Symmetry, double stochasticity, nonnegativity and sparsity all hold.
    /// The spectral gap is reported separately.
    pub fn all_passed(&self) -> bool {
        self.dimension_ok
            && self.symmetry.passed
            && self.stochasticity.passed
            && self.nonnegativity.passed
            && self.sparsity.passed
    }

    pub fn worst_violation(&self) -> T {
        [self.symmetry, self.stochasticity, self.nonnegativity, self.sparsity]
            .iter()
            .fold(T::zero(), |acc, c| acc.max(c.worst))
    }
}

impl<T: Real> std::fmt::Display for Assumption2Report<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if !self.dimension_ok {
            return write!(f, "dimension mismatch between W and graph");
        }
        let show = |c: &Check<T>| if c.passed { "pass" } else { "FAIL" };
        write!(
            f,
            "symmetry {} ({:e}), stochasticity {} ({:e}), nonnegativity {} ({:e}), sparsity {} ({:e})",
            show(&self.symmetry),
            self.symmetry.worst.to_f64_lossy(),
            show(&self.stochasticity),
            self.stochasticity.worst.to_f64_lossy(),
            show(&self.nonnegativity),
            self.nonnegativity.worst.to_f64_lossy(),
            show(&self.sparsity),
            self.sparsity.worst.to_f64_lossy(),
        )?;
        match self.spectral_gap {
            Some(l) => write!(f, ", lambda {:e}", l.to_f64_lossy()),
            None => write!(f, ", lambda n/a"),
        }
    }
}

/// Checks `W` against `graph` at [`ASSUMPTION2_TOL`]. Never fails; violations
/// are reported.
pub fn verify_assumption2<T: Real>(w: &DMatrix<T>, graph: &Graph) -> Assumption2Report<T> {
    let d = graph.d();
    let tol = T::lit(ASSUMPTION2_TOL);
    if w.shape() != (d, d) {
        let fail = Check {
            passed: false,
            worst: T::max_value().unwrap(),
        };
        return Assumption2Report {
            dimension_ok: false,
            symmetry: fail,
            stochasticity: fail,
            nonnegativity: fail,
            sparsity: fail,
            spectral_gap: None,
        };
    }

    let symmetry = Check::at_most(asymmetry(w), tol);

    let mut stoch = T::zero();
    for i in 0..d {
        let (mut row, mut col) = (T::zero(), T::zero());
        for j in 0..d {
            row += w[(i, j)];
            col += w[(j, i)];
        }
        stoch = stoch.max((row - T::one()).abs()).max((col - T::one()).abs());
    }

    let mut neg = T::zero();
    let mut pattern = T::zero();
    for i in 0..d {
        for j in 0..d {
            let v = w[(i, j)];
            if -v > neg {
                neg = -v;
            }
            if i != j && !graph.has_edge(i, j) {
                pattern = pattern.max(v.abs());
            }
        }
    }

    Assumption2Report {
        dimension_ok: true,
        symmetry,
        stochasticity: Check::at_most(stoch, tol),
        nonnegativity: Check::at_most(neg, tol),
        sparsity: Check::at_most(pattern, tol),
        spectral_gap: spectral_gap(w).ok(),
    }
}

/// Blockwise `(W ⊗ I_n)·[B₁; …; B_d]`: output `i` is `Σ_j W(i,j)·B_j`,
/// accumulated in ascending `j` so the result is bitwise reproducible.
pub fn mix_stack<T: Real>(w: &DMatrix<T>, blocks: &[DMatrix<T>]) -> Result<Vec<DMatrix<T>>> {
    let d = blocks.len();
    if w.shape() != (d, d) || d == 0 {
        return Err(shape(
            "mix_stack",
            format!("W is {:?} but {d} blocks were given", w.shape()),
        ));
    }
    let block_shape = blocks[0].shape();
    if let Some(bad) = blocks.iter().find(|b| b.shape() != block_shape) {
        return Err(shape(
            "mix_stack",
            format!("blocks must share a shape, found {:?} and {:?}", block_shape, bad.shape()),
        ));
    }
    Ok((0..d)
        .map(|i| {
            let mut acc = DMatrix::zeros(block_shape.0, block_shape.1);
            for (j, b) in blocks.iter().enumerate() {
                let wij = w[(i, j)];
                if wij != T::zero() {
                    acc.zip_apply(b, |a, v| *a += wij * v);
                }
            }
            acc
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::erdos_renyi;
    use crate::problems::gaussian_matrix;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn complete_graph_gives_uniform_average() {
        let w = metropolis_weights::<f64>(&Graph::complete(4).unwrap()).unwrap();
        assert_eq!(w.weights(), &DMatrix::from_element(4, 4, 0.25));
        assert!(w.lambda() <= 1e-15);
    }

    #[test]
    fn two_agent_path() {
        let w = metropolis_weights::<f64>(&Graph::path(2).unwrap()).unwrap();
        assert_eq!(w.weights(), &DMatrix::from_element(2, 2, 0.5));
    }

    #[test]
    fn ring_of_four() {
        let w = metropolis_weights::<f64>(&Graph::ring(4).unwrap()).unwrap();
        let third = 1.0 / 3.0;
        for i in 0..4 {
            for j in 0..4 {
                let expect = if (i + 4 - j) % 4 == 2 { 0.0 } else { third };
                assert!((w.weights()[(i, j)] - expect).abs() <= 1e-15);
            }
        }
        assert!((w.lambda() - third).abs() <= 1e-12);
    }

    #[test]
    fn spectral_gap_extremes() {
        assert!(spectral_gap(&DMatrix::<f64>::from_element(5, 5, 0.2)).unwrap() <= 1e-15);
        assert!((spectral_gap(&DMatrix::<f64>::identity(3, 3)).unwrap() - 1.0).abs() <= 1e-14);
        let asym = DMatrix::from_row_slice(2, 2, &[0.5, 0.6, 0.4, 0.5]);
        assert!(spectral_gap::<f64>(&asym).is_err());
    }

    #[test]
    fn metropolis_passes_on_random_graphs() {
        for seed in 0..10 {
            let g = erdos_renyi(3 + seed as usize, 0.4, seed).unwrap();
            let w = metropolis_weights::<f64>(&g).unwrap();
            let report = verify_assumption2(w.weights(), &g);
            assert!(report.all_passed(), "{report}");
            assert!(w.lambda() < 1.0);
        }
    }

    #[test]
    fn negative_entry_detected() {
        let g = Graph::complete(3).unwrap();
        let third = 1.0 / 3.0;
        let mut w = DMatrix::from_element(3, 3, third);
        w[(0, 2)] = -1e-3;
        w[(2, 0)] = -1e-3;
        w[(0, 0)] = 1.0 - third + 1e-3;
        w[(2, 2)] = 1.0 - third + 1e-3;
        let report = verify_assumption2(&w, &g);
        assert!(!report.nonnegativity.passed);
        assert_eq!(report.nonnegativity.worst, 1e-3);
        assert!(report.symmetry.passed && report.sparsity.passed);
    }

    #[test]
    fn identity_on_triangle() {
        let g = Graph::complete(3).unwrap();
        let report = verify_assumption2(&DMatrix::<f64>::identity(3, 3), &g);
        assert!(report.sparsity.passed && report.stochasticity.passed);
        assert!((report.spectral_gap.unwrap() - 1.0).abs() <= 1e-14);
        assert!(MixingMatrix::from_weights(DMatrix::<f64>::identity(3, 3), &g).is_err());
    }

    #[test]
    fn sparsity_violation_detected() {
        let g = Graph::path(3).unwrap();
        let w = DMatrix::from_element(3, 3, 1.0 / 3.0);
        let report = verify_assumption2::<f64>(&w, &g);
        assert!(!report.sparsity.passed);
        assert!(report.stochasticity.passed);
        assert!(!verify_assumption2::<f64>(&DMatrix::identity(2, 2), &g).dimension_ok);
    }

    #[test]
    fn mix_stack_identity_and_average() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let blocks: Vec<DMatrix<f64>> = (0..3).map(|_| gaussian_matrix(4, 2, &mut rng)).collect();
        assert_eq!(mix_stack(&DMatrix::identity(3, 3), &blocks).unwrap(), blocks);

        let mean = (&blocks[0] + &blocks[1] + &blocks[2]) / 3.0;
        for out in mix_stack(&DMatrix::from_element(3, 3, 1.0 / 3.0), &blocks).unwrap() {
            assert!((out - &mean).amax() <= 1e-15);
        }
    }

    #[test]
    fn mix_stack_matches_kronecker_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let w: DMatrix<f64> = gaussian_matrix(3, 3, &mut rng);
        let blocks: Vec<DMatrix<f64>> = (0..3).map(|_| gaussian_matrix(4, 2, &mut rng)).collect();
        let stacked = DMatrix::from_fn(12, 2, |r, c| blocks[r / 4][(r % 4, c)]);
        let kron = w.kronecker(&DMatrix::<f64>::identity(4, 4));
        let expect = kron * stacked;
        let got = mix_stack(&w, &blocks).unwrap();
        for (i, g) in got.iter().enumerate() {
            assert!((g - expect.rows(4 * i, 4)).amax() <= 1e-13);
        }
    }

    #[test]
    fn mix_stack_shape_errors() {
        let blocks = vec![DMatrix::<f64>::zeros(2, 1), DMatrix::zeros(3, 1)];
        assert!(mix_stack(&DMatrix::identity(2, 2), &blocks).is_err());
        assert!(mix_stack(&DMatrix::identity(3, 3), &blocks[..1]).is_err());
    }
}
