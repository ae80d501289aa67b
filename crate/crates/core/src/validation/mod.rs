//! Theory checks for small instances: the exact jump chain behind the ODE, local
//! optimality by enumeration, equilibrium certificates and finite-difference gradients.

mod certificate;
mod ctmc;
mod fd;
mod local;

pub use certificate::{certify_equilibrium, gap_and_lipschitz, Certificate, GAP_REL_TOL};
pub use ctmc::{
    boltzmann_distribution, boltzmann_mean, build_ctmc, check_detailed_balance, enumerate_states,
    integrate_forward_equation, mean_field_gap, stationary_distribution, CtmcInstance,
    ForwardTrajectory, DENSE_BUDGET, STATE_BUDGET,
};
pub use fd::finite_difference_gradient;
pub use local::{check_local_optimality, LocalVerdict, MoveSet, LOCAL_BUDGET, LOCAL_TOL};
