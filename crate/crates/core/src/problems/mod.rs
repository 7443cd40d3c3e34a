//! Benchmark objectives and their data.
//!
//! Each agent holds a [`LocalObjective`] `f_i`; the global objective is the
//! average `f = (1/d)·Σ f_i`, see [`Averaged`].

mod csv_io;
mod fd;
mod olsr;
mod pca;
mod sdl;
mod synthetic;

pub use csv_io::{load_matrix_csv, write_matrix_csv};
pub use fd::{fd_gradient, FnObjective};
pub use olsr::OlsrLocal;
pub use pca::PcaLocal;
pub use sdl::SdlLocal;
pub use synthetic::{
    gaussian_matrix, generate_synthetic_olsr, generate_synthetic_pca, generate_synthetic_sdl,
    partition_columns, SyntheticSpec,
};

use nalgebra::DMatrix;

use crate::error::{shape, Result};
use crate::scalar::Real;

/// A smooth function of `X ∈ ℝ^{n×p}` with its Euclidean gradient.
pub trait LocalObjective<T: Real> {
    /// `(n, p)`, the shape of admissible `X`.
    fn dims(&self) -> (usize, usize);
    fn value(&self, x: &DMatrix<T>) -> Result<T>;
    fn euclidean_grad(&self, x: &DMatrix<T>) -> Result<DMatrix<T>>;
}

impl<T: Real, O: LocalObjective<T> + ?Sized> LocalObjective<T> for &O {
    fn dims(&self) -> (usize, usize) {
        (**self).dims()
    }
    fn value(&self, x: &DMatrix<T>) -> Result<T> {
        (**self).value(x)
    }
    fn euclidean_grad(&self, x: &DMatrix<T>) -> Result<DMatrix<T>> {
        (**self).euclidean_grad(x)
    }
}

pub(crate) fn check_dims<T: Real>(op: &'static str, dims: (usize, usize), x: &DMatrix<T>) -> Result<()> {
    if x.shape() != dims {
        return Err(shape(op, format!("expected X of shape {:?}, got {:?}", dims, x.shape())));
    }
    Ok(())
}

/// Which benchmark family a problem belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Pca,
    Olsr,
    Sdl,
}

impl Family {
    pub fn as_str(self) -> &'static str {
        match self {
            Family::Pca => "pca",
            Family::Olsr => "olsr",
            Family::Sdl => "sdl",
        }
    }
}

impl std::str::FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "pca" => Ok(Family::Pca),
            "olsr" => Ok(Family::Olsr),
            "sdl" => Ok(Family::Sdl),
            other => Err(format!("unknown problem `{other}` (expected pca, olsr or sdl)")),
        }
    }
}

/// Any of the benchmark local objectives.
#[derive(Debug, Clone)]
pub enum LocalProblem<T: Real> {
    Pca(PcaLocal<T>),
    Olsr(OlsrLocal<T>),
    Sdl(SdlLocal<T>),
}

impl<T: Real> LocalProblem<T> {
    pub fn family(&self) -> Family {
        match self {
            LocalProblem::Pca(_) => Family::Pca,
            LocalProblem::Olsr(_) => Family::Olsr,
            LocalProblem::Sdl(_) => Family::Sdl,
        }
    }
}

impl<T: Real> LocalObjective<T> for LocalProblem<T> {
    fn dims(&self) -> (usize, usize) {
        match self {
            LocalProblem::Pca(o) => o.dims(),
            LocalProblem::Olsr(o) => o.dims(),
            LocalProblem::Sdl(o) => o.dims(),
        }
    }

    fn value(&self, x: &DMatrix<T>) -> Result<T> {
        match self {
            LocalProblem::Pca(o) => o.value(x),
            LocalProblem::Olsr(o) => o.value(x),
            LocalProblem::Sdl(o) => o.value(x),
        }
    }

    fn euclidean_grad(&self, x: &DMatrix<T>) -> Result<DMatrix<T>> {
        match self {
            LocalProblem::Pca(o) => o.euclidean_grad(x),
            LocalProblem::Olsr(o) => o.euclidean_grad(x),
            LocalProblem::Sdl(o) => o.euclidean_grad(x),
        }
    }
}

/// The pooled objective `(1/d)·Σ f_i`, summed in ascending agent order.
#[derive(Debug, Clone, Copy)]
pub struct Averaged<'a, O> {
    parts: &'a [O],
}

impl<'a, O> Averaged<'a, O> {
    pub fn new(parts: &'a [O]) -> Self {
        assert!(!parts.is_empty(), "averaging over zero objectives");
        Self { parts }
    }
}

impl<T: Real, O: LocalObjective<T>> LocalObjective<T> for Averaged<'_, O> {
    fn dims(&self) -> (usize, usize) {
        self.parts[0].dims()
    }

    fn value(&self, x: &DMatrix<T>) -> Result<T> {
        let mut acc = T::zero();
        for part in self.parts {
            acc += part.value(x)?;
        }
        Ok(acc / T::lit(self.parts.len() as f64))
    }

    fn euclidean_grad(&self, x: &DMatrix<T>) -> Result<DMatrix<T>> {
        let mut acc = self.parts[0].euclidean_grad(x)?;
        for part in &self.parts[1..] {
            acc += part.euclidean_grad(x)?;
        }
        Ok(acc / T::lit(self.parts.len() as f64))
    }
}
