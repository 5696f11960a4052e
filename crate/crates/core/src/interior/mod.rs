//! Interior estimates: weighted Hölder norms, finite differences,
//! commutators with the cutoff, Riesz-transform bounds and trajectory
//! monitors.

pub mod commutator;
pub mod difference;
pub mod holder;
pub mod monitor;
pub mod riesz;

pub use commutator::{
    commutator_grad, commutator_grad_report, commutator_h, commutator_h_report, odd_periodic_extension,
    torus_commutator_grad, torus_commutator_h, CommutatorReport,
};
pub use difference::{delta_h, step_length, PartialField};
pub use holder::{
    pair_term, restricted_holder_seminorm, uniform_holder_seminorm, weighted_gradient_sup, weighted_holder_seminorm,
    HolderReport,
};
pub use monitor::{gradient_evolution_monitor, holder_evolution_monitor, monitor_hmax, monitor_report, MonitorSeries};
pub use riesz::{riesz_diff_bound_check, riesz_diff_fit, riesz_grad_bound_check, riesz_grad_fit, RhoPolicy, RieszFit};
