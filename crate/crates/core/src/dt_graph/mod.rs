//! The distance-transitive graphs `Gamma(a, b)`: their polynomial hypergroup
//! on `N_0`, orthogonality measure, finite balls with the graph metric, and
//! the deformation by a boundary point.

mod ball;
mod poly;
mod quadrature;

pub use ball::{
    ball_cap, boundary_distance, boundary_distance_strict, build_ball, build_ball_with_cap, deform_ball_kernels,
    psd_onset, psd_sweep, pushforward_vs_haar, Ball, BallKernels, BoundaryRay, KernelDiagnostics, PushforwardReport,
    BALL_CAP_ENV, DEFAULT_BALL_CAP,
};
pub use poly::{g_coeffs, g_coeffs_f64, DeformedPoly, DtParams, PolyHypergroup};
pub use quadrature::{gauss_legendre, integrate, ortho_atom, ortho_density, ortho_measure_integrate};
