//! Topology-hiding connectivity assurance for multi-provider networks.
//!
//! Auditors sign committed multigraphs; providers prove in zero knowledge
//! that a path of a fixed public length exists between a source and a hidden
//! committed boundary node; customers verify that two such proofs bind to
//! the same hidden node, all without learning topology, real path lengths,
//! or the boundary identity.
//!
//! Module map:
//! - [`pairing`]: curve backend, hashing to the scalar field, serialization.
//! - [`multigraph`]: graph model, shortest paths, loop padding.
//! - [`monipoly`]: monic-polynomial set encoding and trusted setup.
//! - [`commitments`]: endpoint and graph commitments.
//! - [`clsdh`]: signatures on message sets and committed multigraphs.
//! - [`connected`]: the non-interactive path-existence proof.
//! - [`protocol`]: two-provider certification and proof sessions.
//! - [`wire`]: framed canonical binary encodings.

pub mod clsdh;
pub mod commitments;
pub mod connected;
pub mod monipoly;
pub mod multigraph;
pub mod pairing;
pub mod protocol;
pub mod wire;

pub use clsdh::{GraphSignature, HolderKey};
pub use commitments::{CommittedEndpoint, EndpointCommitment, EndpointOpening, GraphCommitment};
pub use connected::{ConnectionProof, EndpointRef, PathStatement};
pub use monipoly::{IssuerSecret, PublicParameters};
pub use multigraph::{Multigraph, Path, VertexId};
