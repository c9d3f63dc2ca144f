//! CL-SDH signatures on message sets and on committed multigraphs.
//!
//! A signature is a triple `(t, s, v)` with
//! `v = (base-product * b^s * c)^(1/(x+t))`; verification checks
//! `e(v, X) = e(base-product * b^s * c * v^(-t), g2)`. For graphs the signed
//! base product is the holder-key component times the graph commitment, and
//! issuance is a two-message exchange: the holder discloses the graph and
//! proves knowledge of the commitment openings and its key, the auditor
//! checks and signs.

use ark_ff::Field;
use rand::RngCore;

use crate::commitments::{aggregate_commitment, CommitError, GraphCommitment};
use crate::monipoly::{encode_set, graph_elements, EncodingError, IssuerSecret, PublicParameters};
use crate::multigraph::Multigraph;
use crate::pairing::{
    g1_to_bytes, g2_generator, hash_to_scalar, pairing, random_nonzero, Scalar, G1,
};
use crate::wire::{Reader, WireError, Writer, MAGIC_SIGNATURE};

/// Signature on a message set or committed graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SetSignature {
    pub t: Scalar,
    pub s: Scalar,
    pub v: G1,
}

/// Graph holder keypair: secret exponent and `h^sk` public component.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HolderKey {
    pub sk: Scalar,
    pub public: G1,
}

impl HolderKey {
    pub fn generate<R: RngCore>(pp: &PublicParameters, rng: &mut R) -> Self {
        let sk = random_nonzero(rng);
        HolderKey {
            sk,
            public: pp.h * sk,
        }
    }
}

/// Signature binding a committed multigraph to an auditor and holder.
///
/// The graph itself travels separately; only its digest rides along.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphSignature {
    pub t: Scalar,
    pub s: Scalar,
    pub v: G1,
    pub graph_digest: [u8; 32],
    pub auditor_key_id: [u8; 32],
}

/// Signature and issuance failures.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SignatureError {
    #[error(transparent)]
    Encoding(#[from] EncodingError),
    #[error(transparent)]
    Commitment(#[from] CommitError),
    #[error("opening proof rejected: {0}")]
    BadOpeningProof(&'static str),
    #[error("commitment does not open to the disclosed graph")]
    CommitmentMismatch,
    #[error("signature digest does not match the graph")]
    DigestMismatch,
    #[error("signature equation failed")]
    Equation,
}

/// Signs a message multiset under the issuer key.
///
/// The encoded base comes from the public families, so any keyed auditor
/// can sign without the base-ceremony trapdoor.
pub fn sign_set<R: RngCore>(
    pp: &PublicParameters,
    sk: &IssuerSecret,
    messages: &[Scalar],
    rng: &mut R,
) -> Result<SetSignature, SignatureError> {
    let base = encode_set(pp, 0, messages)?;
    Ok(finish_signature(pp, sk, base, rng))
}

/// Completes `(t, s, v)` over an aggregate already in the exponent group.
fn finish_signature<R: RngCore>(
    pp: &PublicParameters,
    sk: &IssuerSecret,
    aggregate: G1,
    rng: &mut R,
) -> SetSignature {
    let s = random_nonzero(rng);
    let (t, inv) = loop {
        let t = random_nonzero(rng);
        // x + t must be invertible; resample on the negligible collision.
        if let Some(inv) = (sk.x + t).inverse() {
            break (t, inv);
        }
    };
    let v = (aggregate + pp.b * s + pp.c) * inv;
    SetSignature { t, s, v }
}

/// Verifies a set signature against the issuer public key.
pub fn verify_set(pp: &PublicParameters, sig: &SetSignature, messages: &[Scalar]) -> bool {
    let Ok(base) = encode_set(pp, 0, messages) else {
        return false;
    };
    let rhs_g1 = base + pp.b * sig.s + pp.c - sig.v * sig.t;
    pairing(&sig.v, &pp.issuer_pub) == pairing(&rhs_g1, &g2_generator())
}

/// Proof of knowledge of the graph-commitment openings and the holder key,
/// sent with an issuance request.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OpeningProof {
    commit_announce: G1,
    holder_announce: G1,
    challenge: Scalar,
    opening_responses: Vec<Scalar>,
    holder_response: Scalar,
}

/// First message of the issuance exchange: the disclosed graph, the
/// commitment to be signed, the holder public component, and the proof tying
/// them together.
#[derive(Debug, Clone)]
pub struct IssuanceRequest {
    pub graph: Multigraph,
    pub commitment: G1,
    pub holder_public: G1,
    pub proof: OpeningProof,
}

fn issuance_challenge(
    pp: &PublicParameters,
    graph_digest: &[u8; 32],
    commitment: &G1,
    holder_public: &G1,
    commit_announce: &G1,
    holder_announce: &G1,
) -> Scalar {
    let mut w = Writer::new();
    w.put_bytes(&pp.digest());
    w.put_bytes(graph_digest);
    w.put_g1(commitment);
    w.put_g1(holder_public);
    w.put_g1(commit_announce);
    w.put_g1(holder_announce);
    hash_to_scalar(b"issuance-pok", w.as_slice())
}

/// Holder side: builds the issuance request for a committed graph.
pub fn request_issuance<R: RngCore>(
    pp: &PublicParameters,
    holder: &HolderKey,
    g: &Multigraph,
    gc: &GraphCommitment,
    rng: &mut R,
) -> Result<IssuanceRequest, SignatureError> {
    let elements = graph_elements(pp, g)?;
    let mut bases = Vec::with_capacity(elements.len());
    let mut secrets = Vec::with_capacity(elements.len());
    for el in &elements {
        let o = gc
            .openings
            .get(&el.key)
            .ok_or_else(|| CommitError::MissingOpening(el.key.to_string()))?;
        bases.push(el.encode(pp)?);
        secrets.push(*o);
    }
    let tildes: Vec<Scalar> = secrets.iter().map(|_| random_nonzero(rng)).collect();
    let commit_announce = bases
        .iter()
        .zip(&tildes)
        .fold(G1::default(), |acc, (b, t)| acc + *b * t);
    let holder_tilde = random_nonzero(rng);
    let holder_announce = pp.h * holder_tilde;
    let challenge = issuance_challenge(
        pp,
        &g.digest(),
        &gc.aggregate,
        &holder.public,
        &commit_announce,
        &holder_announce,
    );
    let opening_responses = secrets
        .iter()
        .zip(&tildes)
        .map(|(o, t)| *t + challenge * o)
        .collect();
    Ok(IssuanceRequest {
        graph: g.clone(),
        commitment: gc.aggregate,
        holder_public: holder.public,
        proof: OpeningProof {
            commit_announce,
            holder_announce,
            challenge,
            opening_responses,
            holder_response: holder_tilde + challenge * holder.sk,
        },
    })
}

/// Auditor side: checks the request and issues the graph signature.
///
/// Certification implies inspection: the auditor sees the topology it signs
/// and records its digest in the issuance log.
pub fn issue<R: RngCore>(
    pp: &PublicParameters,
    sk: &IssuerSecret,
    request: &IssuanceRequest,
    rng: &mut R,
) -> Result<GraphSignature, SignatureError> {
    let elements = graph_elements(pp, &request.graph)?;
    if request.proof.opening_responses.len() != elements.len() {
        return Err(SignatureError::BadOpeningProof("response count"));
    }
    let digest = request.graph.digest();
    let challenge = issuance_challenge(
        pp,
        &digest,
        &request.commitment,
        &request.holder_public,
        &request.proof.commit_announce,
        &request.proof.holder_announce,
    );
    if challenge != request.proof.challenge {
        return Err(SignatureError::BadOpeningProof("challenge"));
    }
    let mut lhs = G1::default();
    for (el, resp) in elements.iter().zip(&request.proof.opening_responses) {
        lhs += el.encode(pp)? * resp;
    }
    if lhs != request.proof.commit_announce + request.commitment * challenge {
        return Err(SignatureError::CommitmentMismatch);
    }
    if pp.h * request.proof.holder_response
        != request.proof.holder_announce + request.holder_public * challenge
    {
        return Err(SignatureError::BadOpeningProof("holder key"));
    }
    let sig = finish_signature(pp, sk, request.holder_public + request.commitment, rng);
    Ok(GraphSignature {
        t: sig.t,
        s: sig.s,
        v: sig.v,
        graph_digest: digest,
        auditor_key_id: pp.auditor_key_id(),
    })
}

/// One-shot issuance: request, issue, and holder-side verification.
pub fn issue_graph_signature<R: RngCore>(
    pp: &PublicParameters,
    sk: &IssuerSecret,
    holder: &HolderKey,
    gc: &GraphCommitment,
    g: &Multigraph,
    rng: &mut R,
) -> Result<GraphSignature, SignatureError> {
    let request = request_issuance(pp, holder, g, gc, rng)?;
    let sig = issue(pp, sk, &request, rng)?;
    verify_graph_signature(pp, &sig, &holder.public, g, gc)?;
    Ok(sig)
}

/// Holder-side verification: the commitment opens to the graph and the
/// signature equation holds over `holder_public * aggregate`.
pub fn verify_graph_signature(
    pp: &PublicParameters,
    sig: &GraphSignature,
    holder_public: &G1,
    g: &Multigraph,
    gc: &GraphCommitment,
) -> Result<(), SignatureError> {
    if sig.graph_digest != g.digest() {
        return Err(SignatureError::DigestMismatch);
    }
    if aggregate_commitment(pp, g, &gc.openings)? != gc.aggregate {
        return Err(SignatureError::CommitmentMismatch);
    }
    let rhs_g1 = *holder_public + gc.aggregate + pp.b * sig.s + pp.c - sig.v * sig.t;
    if pairing(&sig.v, &pp.issuer_pub) != pairing(&rhs_g1, &g2_generator()) {
        return Err(SignatureError::Equation);
    }
    Ok(())
}

/// Per-presentation randomization of a graph signature.
///
/// `v_prime = v^(r/y)` is published; the scalars are the secrets proven in
/// the signature line of the connection proof: `zeta = sk * r`,
/// `rho = s * r`, `omega = r`, `tau = t * y`, `gamma = y`. `r` also scales
/// every witness exponent so one presentation cannot be linked to another.
#[derive(Debug, Clone, Copy)]
pub struct RandomizedSignature {
    pub v_prime: G1,
    pub zeta: Scalar,
    pub rho: Scalar,
    pub omega: Scalar,
    pub tau: Scalar,
    pub gamma: Scalar,
    /// Common witness randomizer; secret, never serialized.
    pub r: Scalar,
}

pub fn randomize_signature<R: RngCore>(
    sig: &GraphSignature,
    holder: &HolderKey,
    rng: &mut R,
) -> RandomizedSignature {
    let r = random_nonzero(rng);
    let y = random_nonzero(rng);
    let y_inv = y.inverse().expect("nonzero");
    RandomizedSignature {
        v_prime: sig.v * (r * y_inv),
        zeta: holder.sk * r,
        rho: sig.s * r,
        omega: r,
        tau: sig.t * y,
        gamma: y,
        r,
    }
}

impl IssuanceRequest {
    /// Channel encoding for the certification request. The graph rides
    /// along in clear inside this message; it must only ever travel over
    /// the provider-to-auditor secure channel.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::new();
        w.put_bytes(&self.graph.canonical_bytes());
        w.put_g1(&self.commitment);
        w.put_g1(&self.holder_public);
        w.put_g1(&self.proof.commit_announce);
        w.put_g1(&self.proof.holder_announce);
        w.put_scalar(&self.proof.challenge);
        w.put_u32(self.proof.opening_responses.len() as u32);
        for s in &self.proof.opening_responses {
            w.put_scalar(s);
        }
        w.put_scalar(&self.proof.holder_response);
        w.into_bytes()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, WireError> {
        let mut r = Reader::new(bytes);
        let graph_text = r.get_bytes()?;
        let graph = Multigraph::from_json(
            std::str::from_utf8(graph_text)
                .map_err(|_| WireError::Invalid("graph not utf8".into()))?,
        )
        .map_err(|e| WireError::Invalid(e.to_string()))?;
        let commitment = r.get_g1()?;
        let holder_public = r.get_g1()?;
        let commit_announce = r.get_g1()?;
        let holder_announce = r.get_g1()?;
        let challenge = r.get_scalar()?;
        let n = r.get_u32()? as usize;
        let mut opening_responses = Vec::with_capacity(n);
        for _ in 0..n {
            opening_responses.push(r.get_scalar()?);
        }
        let holder_response = r.get_scalar()?;
        r.finish()?;
        Ok(IssuanceRequest {
            graph,
            commitment,
            holder_public,
            proof: OpeningProof {
                commit_announce,
                holder_announce,
                challenge,
                opening_responses,
                holder_response,
            },
        })
    }
}

impl GraphSignature {
    /// Signature file: `(t, s, v, graph-digest, auditor-key-id)`.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::with_header(MAGIC_SIGNATURE);
        w.put_scalar(&self.t);
        w.put_scalar(&self.s);
        w.put_g1(&self.v);
        w.put_bytes(&self.graph_digest);
        w.put_bytes(&self.auditor_key_id);
        w.into_bytes()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, WireError> {
        let mut r = Reader::expect_header(bytes, MAGIC_SIGNATURE)?;
        let t = r.get_scalar()?;
        let s = r.get_scalar()?;
        let v = r.get_g1()?;
        let graph_digest: [u8; 32] = r
            .get_bytes()?
            .try_into()
            .map_err(|_| WireError::Invalid("bad digest length".into()))?;
        let auditor_key_id: [u8; 32] = r
            .get_bytes()?
            .try_into()
            .map_err(|_| WireError::Invalid("bad key id length".into()))?;
        r.finish()?;
        Ok(GraphSignature {
            t,
            s,
            v,
            graph_digest,
            auditor_key_id,
        })
    }

    /// Stable fingerprint of a signature value, for logs.
    pub fn fingerprint(&self) -> [u8; 32] {
        use sha2::{Digest, Sha256};
        Sha256::digest(g1_to_bytes(&self.v)).into()
    }
}
