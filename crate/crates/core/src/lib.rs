//! Outgoing solutions of the Helmholtz equation `Δu + k²n²u = f` on a disk,
//! computed by minimizing a weighted radiation-defect functional subject to
//! the PDE collocated on a Fourier × Chebyshev polar grid.
//!
//! Everything numerical is generic over [`scalar::Real`]; the aliases below
//! fix the scalar to `f64`.

mod dd;
pub mod analysis;
pub mod assembly;
pub mod fourier;
pub mod grid;
pub mod linalg;
pub mod modal;
pub mod problems;
pub mod quadrature;
pub mod scalar;
pub mod solve;
pub mod specfun;

pub use num_complex::Complex;

pub type C64 = Complex<f64>;
pub type Grid = grid::DiskGrid<f64>;
pub type Problem = problems::ProblemSpec<f64>;
pub type Refraction = problems::RefractionKind<f64>;
pub type Source = problems::SourceKind<f64>;
pub type System = assembly::DiscreteSystem<f64>;
pub type Solver<'a> = solve::KktSolver<'a, f64>;
pub type Solution = solve::SolutionField<f64>;
pub type Options = solve::SolveOptions<f64>;
pub type Spectral = analysis::SpectralCoefficients<f64>;
pub type Exact = analysis::ExactSolution<f64>;
pub type Errors = analysis::ErrorReport<f64>;
pub type Rate = analysis::RateFit<f64>;
