//! Dense complex tensors, tensor networks and exact contraction.

mod contract;
mod format;
mod identities;
pub(crate) mod kernel;
mod network;

pub use contract::{
    contract_network, contract_network_with, contract_pair, contraction_value, contraction_value_with,
    ContractOptions, EliminationOrder, DEFAULT_MAX_ENTRIES,
};
pub use format::{network_from_json, network_to_json};
pub use identities::{
    append_scalar, conjugate_network, direct_sum_same_graph, loop_network, network_direct_sum,
    network_tensor_product, norm_oracle, recover_complex_contraction, rotate_tensor, scalar_network,
};
pub use network::{Bond, LegRef, Tensor, TensorId, TensorNetwork};
