//! Value processes, finite-horizon growth indices and their liminf
//! estimates, and the risk sensitive criterion.

mod iid;
mod index;
mod value;

pub use iid::{iid_horizon_value, iid_rsc_closed_form, iid_tree, Quantization, StepDistribution, StepPoint};
pub use index::{
    check_enough1, dlgi, dlgi_unnormalized, horizon_seq, index_at, liminf_estimate, rsc, rsc_at, rsc_horizon_seq,
    rsc_plus, Enough1Report, EstimatorConfig, HorizonSequence, LiminfEstimate, RscPlus,
};
pub use value::{ValueProcess, ValueTail};
