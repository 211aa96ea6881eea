//! Thresholds and default budgets shared by the runners, the checkers, the CLI
//! and the test suites.

/// Largest number of cells a single grid may hold.
pub const DEFAULT_CELL_BUDGET: usize = 1 << 26;

/// Hutchinson iteration stops once successive iterates are this many cell
/// sides apart (in Hausdorff distance) or closer.
pub const CONVERGENCE_TOL_CELLS: f64 = 2.0;

/// Orbit points discarded before coverage is measured.
pub const DEFAULT_BURN_IN: u64 = 100;

/// Coverage a chaos-game orbit must reach on planar attractors.
pub const COVERAGE_THRESHOLD: f64 = 0.99;

/// Coverage a chaos-game orbit must reach on the circle.
pub const CIRCLE_COVERAGE_THRESHOLD: f64 = 0.999;

/// Allowed Hausdorff distance between an orbit grid and its reference, in
/// cell diagonals.
pub const ORBIT_HAUSDORFF_DIAGONALS: f64 = 3.0;

/// Slack of the grid triangle inequality, in cell sides.
pub const TRIANGLE_SLACK_CELLS: f64 = 2.0;

/// Round-trip accuracy of inverses.
pub const INVERSE_ROUNDTRIP_TOL: f64 = 1e-9;

/// Standard deviations of slack granted to empirical conditional frequencies.
pub const AUDIT_SIGMAS: f64 = 3.0;

/// Default beam width of the contractibility search.
pub const DEFAULT_BEAM: usize = 64;

/// Target diameter for the contractibility diagnostic.
pub const CONTRACTION_TARGET: f64 = 0.01;

/// Number of points the coverage curve is sampled at.
pub const CURVE_POINTS: usize = 40;
