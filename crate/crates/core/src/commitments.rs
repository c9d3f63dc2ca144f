//! Endpoint and multigraph commitments.
//!
//! Endpoint commitments hide a vertex identifier behind two blinded G2
//! values, one on the power-1 base and one on the power-0 base, so the
//! identifier can enter the path proof linearly at both positions. The graph
//! commitment is the product of every per-element encoding raised to a
//! secret opening; openings stay in the provider's private store.

use std::collections::BTreeMap;

use rand::RngCore;

use crate::monipoly::{graph_elements, ElementKey, EncodingError, PublicParameters};
use crate::multigraph::Multigraph;
use crate::pairing::{random_nonzero, Scalar, G1, G2};
use crate::wire::{Reader, WireError, Writer, MAGIC_ENDPOINT};

/// Pedersen-style pair hiding one vertex identifier.
///
/// `c_hi = X_{0_1}^id * f^alpha`, `c_lo = X_{0_0}^id * f^beta`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EndpointCommitment {
    pub c_hi: G2,
    pub c_lo: G2,
}

/// Secret opening of an [`EndpointCommitment`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EndpointOpening {
    pub id: Scalar,
    pub alpha: Scalar,
    pub beta: Scalar,
}

/// Commitment together with its opening, as held by the committer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CommittedEndpoint {
    pub commitment: EndpointCommitment,
    pub opening: EndpointOpening,
}

/// Which commitment equation failed during opening verification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum OpeningError {
    #[error("high (power-1) commitment equation failed")]
    HighEquation,
    #[error("low (power-0) commitment equation failed")]
    LowEquation,
}

/// Commits to a vertex identifier with fresh uniform openings.
pub fn commit_endpoint<R: RngCore>(
    pp: &PublicParameters,
    id: Scalar,
    rng: &mut R,
) -> CommittedEndpoint {
    let opening = EndpointOpening {
        id,
        alpha: random_nonzero(rng),
        beta: random_nonzero(rng),
    };
    CommittedEndpoint {
        commitment: commitment_for(pp, &opening),
        opening,
    }
}

/// Recomputes the commitment pair an opening should produce.
pub fn commitment_for(pp: &PublicParameters, opening: &EndpointOpening) -> EndpointCommitment {
    EndpointCommitment {
        c_hi: pp.g2_bases[0][1] * opening.id + pp.f * opening.alpha,
        c_lo: pp.g2_bases[0][0] * opening.id + pp.f * opening.beta,
    }
}

/// Accepts iff both commitment equations hold for the claimed opening.
pub fn verify_opening(
    pp: &PublicParameters,
    commitment: &EndpointCommitment,
    opening: &EndpointOpening,
) -> Result<(), OpeningError> {
    let expect = commitment_for(pp, opening);
    if commitment.c_hi != expect.c_hi {
        return Err(OpeningError::HighEquation);
    }
    if commitment.c_lo != expect.c_lo {
        return Err(OpeningError::LowEquation);
    }
    Ok(())
}

impl EndpointCommitment {
    /// Raw 192-byte pair encoding, used for statements and bind checks.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::new();
        w.put_g2(&self.c_hi);
        w.put_g2(&self.c_lo);
        w.into_bytes()
    }

    pub(crate) fn write(&self, w: &mut Writer) {
        w.put_g2(&self.c_hi);
        w.put_g2(&self.c_lo);
    }

    pub(crate) fn read(r: &mut Reader<'_>) -> Result<Self, WireError> {
        Ok(Self {
            c_hi: r.get_g2()?,
            c_lo: r.get_g2()?,
        })
    }
}

impl CommittedEndpoint {
    /// Private transfer file: commitment plus opening. Sent only over the
    /// secure channel or kept on disk by the committing provider.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::with_header(MAGIC_ENDPOINT);
        self.commitment.write(&mut w);
        w.put_scalar(&self.opening.id);
        w.put_scalar(&self.opening.alpha);
        w.put_scalar(&self.opening.beta);
        w.into_bytes()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, WireError> {
        let mut r = Reader::expect_header(bytes, MAGIC_ENDPOINT)?;
        let commitment = EndpointCommitment::read(&mut r)?;
        let opening = EndpointOpening {
            id: r.get_scalar()?,
            alpha: r.get_scalar()?,
            beta: r.get_scalar()?,
        };
        r.finish()?;
        Ok(Self { commitment, opening })
    }
}

/// Product commitment over a whole multigraph with per-element openings.
///
/// The aggregate is public once signed; the openings never leave the
/// committer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphCommitment {
    pub aggregate: G1,
    pub openings: BTreeMap<ElementKey, Scalar>,
}

/// Commits every vertex and edge instance of the graph with fresh openings.
pub fn commit_graph<R: RngCore>(
    pp: &PublicParameters,
    g: &Multigraph,
    rng: &mut R,
) -> Result<GraphCommitment, CommitError> {
    let mut openings = BTreeMap::new();
    for el in graph_elements(pp, g)? {
        openings.insert(el.key.clone(), random_nonzero(rng));
    }
    let aggregate = aggregate_commitment(pp, g, &openings)?;
    Ok(GraphCommitment { aggregate, openings })
}

/// Graph commitment errors.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CommitError {
    #[error(transparent)]
    Encoding(#[from] EncodingError),
    #[error("no opening stored for {0}")]
    MissingOpening(String),
}

/// Recomputes the aggregate from a graph and an opening map.
///
/// Fails if any element lacks an opening. Extra openings are ignored, which
/// keeps the product multiplicative under graph extension.
pub fn aggregate_commitment(
    pp: &PublicParameters,
    g: &Multigraph,
    openings: &BTreeMap<ElementKey, Scalar>,
) -> Result<G1, CommitError> {
    let mut acc = G1::default();
    for el in graph_elements(pp, g)? {
        let o = openings
            .get(&el.key)
            .ok_or_else(|| CommitError::MissingOpening(el.key.to_string()))?;
        acc += el.encode(pp)? * o;
    }
    Ok(acc)
}
