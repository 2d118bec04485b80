//! Value distributions: balanced index variables, the equal-revenue family
//! and finite truncations of the hard instances.

mod balanced;
mod family;
mod instance;
mod joint;

pub use balanced::{balanced_pmf, truncated_balanced, value_of_index, BalancedSpec, TruncatedBalanced};
pub use family::{equal_revenue_family, h_marginal, EqualRevenueFamily};
pub use instance::{build_hard_instance, build_hard_instance_capped, HardInstance, InstanceFile, DEFAULT_SIZE_CAP};
pub use joint::{JointDistribution, ProductGrid};
