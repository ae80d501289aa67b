//! Star discrepancy `d*_∞(U) = max{max_{Γ̄} D, max_{Γ} D̄}` through two box-corner
//! selection problems.

mod exact;
mod grid;
mod objective;
mod points;
mod solve;

pub use exact::{
    eval_d, eval_dbar, exact_star_discrepancy, max_d_over_grid, max_dbar_over_grid, GridMaximum,
    ENUMERATION_LIMIT,
};
pub use grid::{preprocess, GridIndex};
pub use objective::{delta_objective, deltabar_objective, BoxKind, DiscrepancyObjective};
pub use points::{parse_points, PointSet};
pub use solve::{default_theta, solve_stardisc, StarDiscReport, StarDiscTrial};
