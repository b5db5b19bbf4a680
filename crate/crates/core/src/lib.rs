//! Profit-maximizing product design against a saturated market.
//!
//! Customers are points `(price, qualities)`. A new product is bought by
//! every customer whose requirements it meets at or under their price, and
//! earns its margin `price - sum(qualities)` per buyer.
//!
//! * [`solve_exact_1d`]: exact `O(n log n)` sweep for one quality axis.
//! * [`solve_approx`]: `(1 - eps)`-approximation for any dimension, through
//!   depth problems over simplex homothets ([`simplex`]).
//! * [`brute_force_optimum`]: exhaustive search used as a reference.

pub mod approx;
pub mod error;
pub mod format;
pub mod generate;
pub mod market;
pub mod oracle;
pub mod simplex;
pub mod sweep;

pub use approx::{
    level_schedule, lift_point, max_ppu, project_customers, solve_approx, split_epsilon,
    ApproxOutcome, DepthMode, LevelReport, LevelSchedule,
};
pub use error::{Error, Result};
pub use generate::{
    chained_homothets, clustered_homothets, element_uniqueness_instance, random_pareto_market,
};
pub use market::{
    evaluate, ppu, prune_dominated, validate_pareto, Customer, Market, ParetoViolation, Product,
    ProfitReport, Solution,
};
pub use oracle::{brute_force_optimum, BRUTE_FORCE_GUARD};
pub use simplex::{
    arrangement_stats, contains, deepest_point_approx, deepest_point_exact, deepest_point_sparse,
    intersects, ArrangementStats, DepthResult, SimplexHomothet,
};
pub use sweep::{solve_exact_1d, solve_exact_1d_with_stats, SweepOutcome, SweepStats};
