//! Two-phase orchestration across auditors, providers, and a customer.
//!
//! Phase 1 certifies each provider: the provider computes its padding
//! target, inflates every boundary node with that many loops, commits to the
//! augmented multigraph, and obtains the auditor's signature. Phase 2 runs
//! per request: the providers pick the cheapest shared boundary node,
//! provider A commits to it and passes the opening to provider B over the
//! secure channel, and each provider sends the customer a connection proof:
//! A from the public source to the hidden boundary node, B from the same
//! hidden commitment to the public destination. The customer accepts only
//! when both proofs verify and bind to identical commitment bytes.
//!
//! Messages travel over an in-process fabric with per-link confidentiality:
//! the session log records only message types and public-payload digests, so
//! a log reader learns nothing the customer would not.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use rand::RngCore;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::clsdh::{
    issue, request_issuance, verify_graph_signature, GraphSignature, HolderKey, IssuanceRequest,
    SignatureError,
};
use crate::commitments::{
    commit_endpoint, commit_graph, verify_opening, CommittedEndpoint, EndpointCommitment,
    EndpointOpening, GraphCommitment,
};
use crate::connected::{
    bind_shared_commitment, prove_connected, prove_unchecked, BindError, ConnectionProof,
    EndpointRef, PathStatement, ProverContext,
};
use crate::monipoly::{ElementKey, IssuerSecret, PublicParameters};
use crate::multigraph::{padded_route, GraphError, Multigraph, Path, VertexId};
use crate::pairing::Scalar;
use crate::wire::{Reader, WireError, Writer, MAGIC_PROVIDER_STORE};

/// Participant name on the fabric.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct RoleId(pub String);

impl RoleId {
    pub fn new(s: impl Into<String>) -> Self {
        Self(s.into())
    }
}

impl std::fmt::Display for RoleId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

/// One message: the public part is logged by digest, the secret part is
/// visible to the recipient only.
#[derive(Debug, Clone)]
pub struct Envelope {
    pub msg_type: &'static str,
    pub public_payload: Vec<u8>,
    pub secret_payload: Vec<u8>,
}

impl Envelope {
    pub fn public(msg_type: &'static str, payload: Vec<u8>) -> Self {
        Envelope {
            msg_type,
            public_payload: payload,
            secret_payload: Vec::new(),
        }
    }

    pub fn secret(msg_type: &'static str, payload: Vec<u8>) -> Self {
        Envelope {
            msg_type,
            public_payload: Vec::new(),
            secret_payload: payload,
        }
    }
}

/// Observable record of one delivery: logical timestamp, endpoints, type,
/// and a digest of the public payload. Secret payloads never reach the log.
#[derive(Debug, Clone, Serialize)]
pub struct LogEntry {
    pub seq: u64,
    pub from: RoleId,
    pub to: RoleId,
    pub msg_type: String,
    pub public_len: u64,
    pub public_digest: String,
}

/// Delivery receipt.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Receipt {
    pub seq: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ProtocolError {
    #[error("unknown recipient `{0}`")]
    UnknownRecipient(String),
    #[error("expected `{expected}` message from {from}")]
    MissingMessage { from: String, expected: String },
    #[error("malformed `{msg}` payload: {err}")]
    BadPayload { msg: String, err: String },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("certification failed: {0}")]
    Certification(#[from] SignatureError),
    #[error("proving failed: {0}")]
    Proving(String),
}

/// In-process message fabric with per-pair FIFO ordering and exactly-once
/// delivery. No deduplication: a duplicate send is two deliveries.
#[derive(Default)]
pub struct Fabric {
    registered: BTreeSet<RoleId>,
    queues: BTreeMap<(RoleId, RoleId), VecDeque<Envelope>>,
    log: Vec<LogEntry>,
    seq: u64,
}

impl Fabric {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn register(&mut self, id: &RoleId) {
        self.registered.insert(id.clone());
    }

    pub fn send(
        &mut self,
        from: &RoleId,
        to: &RoleId,
        envelope: Envelope,
    ) -> Result<Receipt, ProtocolError> {
        if !self.registered.contains(to) {
            return Err(ProtocolError::UnknownRecipient(to.0.clone()));
        }
        self.seq += 1;
        self.log.push(LogEntry {
            seq: self.seq,
            from: from.clone(),
            to: to.clone(),
            msg_type: envelope.msg_type.to_string(),
            public_len: envelope.public_payload.len() as u64,
            public_digest: hex_digest(&envelope.public_payload),
        });
        self.queues
            .entry((from.clone(), to.clone()))
            .or_default()
            .push_back(envelope);
        Ok(Receipt { seq: self.seq })
    }

    pub fn recv(&mut self, from: &RoleId, to: &RoleId) -> Option<Envelope> {
        self.queues
            .get_mut(&(from.clone(), to.clone()))
            .and_then(VecDeque::pop_front)
    }

    fn expect(
        &mut self,
        from: &RoleId,
        to: &RoleId,
        msg_type: &str,
    ) -> Result<Envelope, ProtocolError> {
        match self.recv(from, to) {
            Some(env) if env.msg_type == msg_type => Ok(env),
            _ => Err(ProtocolError::MissingMessage {
                from: from.0.clone(),
                expected: msg_type.to_string(),
            }),
        }
    }

    pub fn log(&self) -> &[LogEntry] {
        &self.log
    }

    pub fn log_json(&self) -> String {
        serde_json::to_string_pretty(&self.log).expect("log serializes")
    }
}

fn hex_digest(bytes: &[u8]) -> String {
    let d: [u8; 32] = Sha256::digest(bytes).into();
    d.iter().map(|b| format!("{b:02x}")).collect()
}

/// Auditor role: issues graph signatures and logs what it certified.
pub struct Auditor {
    pub id: RoleId,
    pub pp: PublicParameters,
    secret: IssuerSecret,
    /// Digests of certified graphs with the holder key each was bound to.
    pub issuance_log: Vec<([u8; 32], Vec<u8>)>,
}

impl Auditor {
    pub fn new(id: impl Into<String>, pp: PublicParameters, secret: IssuerSecret) -> Self {
        Auditor {
            id: RoleId::new(id),
            pp,
            secret,
            issuance_log: Vec::new(),
        }
    }

    fn certify<R: RngCore>(
        &mut self,
        request: &IssuanceRequest,
        rng: &mut R,
    ) -> Result<GraphSignature, SignatureError> {
        let sig = issue(&self.pp, &self.secret, request, rng)?;
        self.issuance_log.push((
            sig.graph_digest,
            crate::pairing::g1_to_bytes(&request.holder_public),
        ));
        Ok(sig)
    }
}

/// Provider-held private material: holder key and commitment openings.
///
/// This is the on-disk private store; it never crosses the fabric.
pub struct ProviderStore {
    pub holder: HolderKey,
    pub openings: BTreeMap<ElementKey, Scalar>,
    pub graph_digest: [u8; 32],
}

impl ProviderStore {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::with_header(MAGIC_PROVIDER_STORE);
        w.put_scalar(&self.holder.sk);
        w.put_g1(&self.holder.public);
        w.put_bytes(&self.graph_digest);
        w.put_u32(self.openings.len() as u32);
        for (key, opening) in &self.openings {
            key.write(&mut w);
            w.put_scalar(opening);
        }
        w.into_bytes()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, WireError> {
        let mut r = Reader::expect_header(bytes, MAGIC_PROVIDER_STORE)?;
        let sk = r.get_scalar()?;
        let public = r.get_g1()?;
        let graph_digest: [u8; 32] = r
            .get_bytes()?
            .try_into()
            .map_err(|_| WireError::Invalid("bad digest length".into()))?;
        let n = r.get_u32()? as usize;
        let mut openings = BTreeMap::new();
        for _ in 0..n {
            let key = ElementKey::read(&mut r)?;
            let opening = r.get_scalar()?;
            openings.insert(key, opening);
        }
        r.finish()?;
        Ok(ProviderStore {
            holder: HolderKey { sk, public },
            openings,
            graph_digest,
        })
    }
}

/// Provider role: secret topology plus certification artifacts.
pub struct Provider {
    pub id: RoleId,
    pub pp: PublicParameters,
    graph: Multigraph,
    holder: HolderKey,
    certified: Option<Certified>,
}

struct Certified {
    augmented: Multigraph,
    commitment: GraphCommitment,
    signature: GraphSignature,
    padding: usize,
}

impl Provider {
    pub fn new<R: RngCore>(
        id: impl Into<String>,
        pp: PublicParameters,
        graph: Multigraph,
        rng: &mut R,
    ) -> Self {
        let holder = HolderKey::generate(&pp, rng);
        Provider {
            id: RoleId::new(id),
            pp,
            graph,
            holder,
            certified: None,
        }
    }

    pub fn graph(&self) -> &Multigraph {
        &self.graph
    }

    /// Certified padding target, once phase 1 ran.
    pub fn padding_target(&self) -> Option<usize> {
        self.certified.as_ref().map(|c| c.padding)
    }

    pub fn augmented(&self) -> Option<&Multigraph> {
        self.certified.as_ref().map(|c| &c.augmented)
    }

    pub fn signature(&self) -> Option<&GraphSignature> {
        self.certified.as_ref().map(|c| &c.signature)
    }

    pub fn store(&self) -> Option<ProviderStore> {
        self.certified.as_ref().map(|c| ProviderStore {
            holder: self.holder,
            openings: c.commitment.openings.clone(),
            graph_digest: c.augmented.digest(),
        })
    }

    fn state(&self) -> Result<&Certified, ProtocolError> {
        self.certified
            .as_ref()
            .ok_or_else(|| ProtocolError::Proving("provider not certified".into()))
    }

    /// Hop costs from `from` to every reachable boundary node.
    fn boundary_costs(&self, from: &VertexId) -> Result<BTreeMap<VertexId, u64>, ProtocolError> {
        let c = self.state()?;
        let dist = c.augmented.distances(from)?;
        Ok(c.augmented
            .boundary()
            .iter()
            .filter_map(|b| dist.get(b).map(|d| (b.clone(), *d as u64)))
            .collect())
    }

    /// Padded route between two vertices of the certified graph.
    fn route(&self, from: &VertexId, to: &VertexId) -> Result<Path, ProtocolError> {
        let c = self.state()?;
        Ok(padded_route(&c.augmented, from, to, c.padding)?)
    }

    fn prover_context(&self) -> Result<ProverContext<'_>, ProtocolError> {
        let c = self.state()?;
        Ok(ProverContext {
            pp: &self.pp,
            signature: &c.signature,
            holder: &self.holder,
            graph: &c.augmented,
            commitment: &c.commitment,
        })
    }
}

/// Customer role: holds only public parameters, keyed by auditor.
pub struct Customer {
    pub id: RoleId,
    params: BTreeMap<[u8; 32], PublicParameters>,
    /// Every public payload delivered to this customer, for leakage audits.
    pub received: Vec<(String, Vec<u8>)>,
}

impl Customer {
    pub fn new(id: impl Into<String>, params: impl IntoIterator<Item = PublicParameters>) -> Self {
        Customer {
            id: RoleId::new(id),
            params: params
                .into_iter()
                .map(|pp| (pp.auditor_key_id(), pp))
                .collect(),
            received: Vec::new(),
        }
    }

    fn params_for(&self, proof: &ConnectionProof) -> Option<&PublicParameters> {
        self.params.get(&proof.statement.auditor_key_id)
    }
}

/// Runs network certification for one provider against one auditor.
///
/// Returns the padding target the provider was certified with.
pub fn run_phase1<R: RngCore>(
    fabric: &mut Fabric,
    provider: &mut Provider,
    auditor: &mut Auditor,
    rng: &mut R,
) -> Result<usize, ProtocolError> {
    fabric.register(&provider.id);
    fabric.register(&auditor.id);

    let padding = provider.graph.padding_target()?.max(1);
    let augmented = provider.graph.augment(padding)?;
    let commitment = commit_graph(&provider.pp, &augmented, rng)
        .map_err(|e| ProtocolError::Proving(e.to_string()))?;
    let request = request_issuance(&provider.pp, &provider.holder, &augmented, &commitment, rng)?;

    // The topology travels only on the provider-auditor secure link.
    fabric.send(
        &provider.id,
        &auditor.id,
        Envelope::secret("sig-request", request.to_bytes()),
    )?;

    let env = fabric.expect(&provider.id, &auditor.id, "sig-request")?;
    let request =
        IssuanceRequest::from_bytes(&env.secret_payload).map_err(|e| ProtocolError::BadPayload {
            msg: "sig-request".into(),
            err: e.to_string(),
        })?;
    let signature = auditor.certify(&request, rng)?;
    fabric.send(
        &auditor.id,
        &provider.id,
        Envelope::secret("sig-issued", signature.to_bytes()),
    )?;

    let env = fabric.expect(&auditor.id, &provider.id, "sig-issued")?;
    let signature =
        GraphSignature::from_bytes(&env.secret_payload).map_err(|e| ProtocolError::BadPayload {
            msg: "sig-issued".into(),
            err: e.to_string(),
        })?;
    verify_graph_signature(
        &provider.pp,
        &signature,
        &provider.holder.public,
        &augmented,
        &commitment,
    )?;

    provider.certified = Some(Certified {
        augmented,
        commitment,
        signature,
        padding,
    });
    Ok(padding)
}

/// Selects the boundary node minimizing the summed hop costs; ties break
/// toward the lexicographically smaller name.
pub fn agree_boundary(
    costs_a: &BTreeMap<VertexId, u64>,
    costs_b: &BTreeMap<VertexId, u64>,
) -> Option<VertexId> {
    costs_a
        .iter()
        .filter_map(|(b, ca)| costs_b.get(b).map(|cb| (ca + cb, b.clone())))
        .min()
        .map(|(_, b)| b)
}

/// Session outcome codes. Exactly one is produced per run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Accept,
    /// An endpoint is missing from its provider's graph.
    UnknownEndpoint,
    /// No shared boundary node reachable from both endpoints.
    NoPath,
    /// Provider B rejected the commitment opening it received.
    OpeningRejected,
    /// A proof failed verification.
    ProofInvalid { provider: String, reason: String },
    /// The two proofs do not share the boundary commitment.
    CommitmentMismatch,
    /// Fabric-level failure.
    ChannelFailure(String),
}

/// Record of one proof-of-path session.
#[derive(Debug, Serialize)]
pub struct SessionRecord {
    pub session_id: String,
    /// The transmitted boundary commitment pair, when the session got far
    /// enough to create one.
    pub boundary_commitment: Option<Vec<u8>>,
    /// Serialized proofs the customer received.
    pub proofs: Vec<Vec<u8>>,
    pub verdict: Verdict,
}

/// Modeled misbehavior for the adversarial suites and the simulator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Deviation {
    #[default]
    Honest,
    /// B routes from a different boundary node while claiming the shared
    /// commitment.
    WrongBoundary,
    /// A's topology changed after certification; it proves on the new graph
    /// with the stale signature.
    StaleSignature,
    /// B re-commits the boundary node itself instead of reusing A's bytes.
    MismatchedCommitments,
}

/// Runs one proof-of-path session between certified providers.
#[allow(clippy::too_many_arguments)]
pub fn run_phase2<R: RngCore>(
    fabric: &mut Fabric,
    provider_a: &Provider,
    provider_b: &Provider,
    customer: &mut Customer,
    source: &VertexId,
    dest: &VertexId,
    deviation: Deviation,
    rng: &mut R,
) -> Result<SessionRecord, ProtocolError> {
    fabric.register(&provider_a.id);
    fabric.register(&provider_b.id);
    fabric.register(&customer.id);
    let session_id = format!("session-{}", fabric.seq + 1);
    let record = |verdict: Verdict, commitment: Option<Vec<u8>>, proofs: Vec<Vec<u8>>| {
        SessionRecord {
            session_id: session_id.clone(),
            boundary_commitment: commitment,
            proofs,
            verdict,
        }
    };

    // Step 1: local cheapest paths toward the boundary.
    if !provider_a.graph.has_vertex(source) || !provider_b.graph.has_vertex(dest) {
        return Ok(record(Verdict::UnknownEndpoint, None, Vec::new()));
    }
    let costs_a = provider_a.boundary_costs(source)?;
    let costs_b = provider_b.boundary_costs(dest)?;

    // Step 2: boundary agreement. Costs stay between the providers; a real
    // multi-party minimum protocol can replace this exchange wholesale.
    fabric.send(
        &provider_a.id,
        &provider_b.id,
        Envelope::secret("boundary-costs", costs_bytes(&costs_a)),
    )?;
    fabric.send(
        &provider_b.id,
        &provider_a.id,
        Envelope::secret("boundary-costs", costs_bytes(&costs_b)),
    )?;
    fabric.expect(&provider_a.id, &provider_b.id, "boundary-costs")?;
    fabric.expect(&provider_b.id, &provider_a.id, "boundary-costs")?;

    let Some(boundary) = agree_boundary(&costs_a, &costs_b) else {
        fabric.send(
            &provider_a.id,
            &customer.id,
            Envelope::public("no-path", b"no shared boundary node".to_vec()),
        )?;
        deliver(fabric, &provider_a.id, customer, "no-path")?;
        return Ok(record(Verdict::NoPath, None, Vec::new()));
    };

    // Step 3: commitment agreement. A commits to the boundary node; the
    // opening crosses only the secure half of the link.
    let shared = commit_endpoint(&provider_a.pp, boundary.to_scalar(), rng);
    fabric.send(
        &provider_a.id,
        &provider_b.id,
        Envelope {
            msg_type: "boundary-commitment",
            public_payload: shared.commitment.to_bytes(),
            secret_payload: opening_bytes(&shared.opening),
        },
    )?;
    let env = fabric.expect(&provider_a.id, &provider_b.id, "boundary-commitment")?;
    let received_commitment = {
        let mut r = Reader::new(&env.public_payload);
        let c = EndpointCommitment::read(&mut r).map_err(|e| ProtocolError::BadPayload {
            msg: "boundary-commitment".into(),
            err: e.to_string(),
        })?;
        r.finish().map_err(|e| ProtocolError::BadPayload {
            msg: "boundary-commitment".into(),
            err: e.to_string(),
        })?;
        c
    };
    let received_opening =
        opening_from_bytes(&env.secret_payload).map_err(|e| ProtocolError::BadPayload {
            msg: "boundary-commitment".into(),
            err: e.to_string(),
        })?;
    if verify_opening(&provider_b.pp, &received_commitment, &received_opening).is_err()
        || received_opening.id != boundary.to_scalar()
    {
        return Ok(record(
            Verdict::OpeningRejected,
            Some(shared.commitment.to_bytes()),
            Vec::new(),
        ));
    }
    let received = CommittedEndpoint {
        commitment: received_commitment,
        opening: received_opening,
    };

    // Steps 4-5: each provider proves its half toward the customer.
    let proof_a = prove_source_half(
        provider_a,
        source,
        &boundary,
        &shared,
        matches!(deviation, Deviation::StaleSignature),
        rng,
    )?;
    let proof_b = match deviation {
        Deviation::WrongBoundary => {
            let other = provider_b
                .state()?
                .augmented
                .boundary()
                .iter()
                .find(|b| **b != boundary)
                .cloned()
                .ok_or_else(|| ProtocolError::Proving("no alternate boundary".into()))?;
            forge_from_other_boundary(provider_b, &other, dest, &received, rng)?
        }
        Deviation::MismatchedCommitments => {
            let own = commit_endpoint(&provider_b.pp, boundary.to_scalar(), rng);
            prove_dest_half(provider_b, dest, &boundary, &own, rng)?
        }
        _ => prove_dest_half(provider_b, dest, &boundary, &received, rng)?,
    };

    let proof_a_bytes = proof_a.to_bytes();
    let proof_b_bytes = proof_b.to_bytes();
    fabric.send(
        &provider_a.id,
        &customer.id,
        Envelope::public("connection-proof", proof_a_bytes.clone()),
    )?;
    deliver(fabric, &provider_a.id, customer, "connection-proof")?;
    fabric.send(
        &provider_b.id,
        &customer.id,
        Envelope::public("connection-proof", proof_b_bytes.clone()),
    )?;
    deliver(fabric, &provider_b.id, customer, "connection-proof")?;

    let verdict = customer_verdict(customer, provider_a, provider_b, source, dest);
    Ok(record(
        verdict,
        Some(shared.commitment.to_bytes()),
        vec![proof_a_bytes, proof_b_bytes],
    ))
}

fn costs_bytes(costs: &BTreeMap<VertexId, u64>) -> Vec<u8> {
    let mut w = Writer::new();
    for (b, c) in costs {
        w.put_str(b.as_str());
        w.put_u64(*c);
    }
    w.into_bytes()
}

fn deliver(
    fabric: &mut Fabric,
    from: &RoleId,
    customer: &mut Customer,
    msg_type: &str,
) -> Result<(), ProtocolError> {
    let env = fabric.expect(from, &customer.id, msg_type)?;
    customer
        .received
        .push((env.msg_type.to_string(), env.public_payload));
    Ok(())
}

/// A's half: public source to hidden boundary commitment.
fn prove_source_half<R: RngCore>(
    provider: &Provider,
    source: &VertexId,
    boundary: &VertexId,
    shared: &CommittedEndpoint,
    stale_signature: bool,
    rng: &mut R,
) -> Result<ConnectionProof, ProtocolError> {
    let path = provider.route(source, boundary)?;
    let source_ref = EndpointRef::Public(source.to_scalar());
    let terminal_ref = EndpointRef::Hidden(shared.commitment);

    if stale_signature {
        // Topology drifted after certification: one extra padding loop and a
        // fresh commitment, but the old signature.
        let c = provider.state()?;
        let drifted = c.augmented.augment(1)?;
        let fresh = commit_graph(&provider.pp, &drifted, rng)
            .map_err(|e| ProtocolError::Proving(e.to_string()))?;
        let stmt = PathStatement::new(
            &provider.pp,
            path.padded_length(),
            source_ref,
            terminal_ref,
            &drifted,
        );
        let ctx = ProverContext {
            pp: &provider.pp,
            signature: &c.signature,
            holder: &provider.holder,
            graph: &drifted,
            commitment: &fresh,
        };
        return prove_unchecked(ctx, &path, &stmt, None, Some(&shared.opening), rng)
            .map_err(|e| ProtocolError::Proving(e.to_string()));
    }

    let stmt = PathStatement::new(
        &provider.pp,
        path.padded_length(),
        source_ref,
        terminal_ref,
        &provider.state()?.augmented,
    );
    prove_connected(
        provider.prover_context()?,
        &path,
        &stmt,
        None,
        Some(&shared.opening),
        rng,
    )
    .map_err(|e| ProtocolError::Proving(e.to_string()))
}

/// B's half: hidden boundary commitment to public destination. The padding
/// loops live at the boundary, which is B's path source, so they lead the
/// walk.
fn prove_dest_half<R: RngCore>(
    provider: &Provider,
    dest: &VertexId,
    boundary: &VertexId,
    shared: &CommittedEndpoint,
    rng: &mut R,
) -> Result<ConnectionProof, ProtocolError> {
    let c = provider.state()?;
    let path = provider.route(boundary, dest)?;
    let stmt = PathStatement::new(
        &provider.pp,
        path.padded_length(),
        EndpointRef::Hidden(shared.commitment),
        EndpointRef::Public(dest.to_scalar()),
        &c.augmented,
    );
    prove_connected(
        provider.prover_context()?,
        &path,
        &stmt,
        Some(&shared.opening),
        None,
        rng,
    )
    .map_err(|e| ProtocolError::Proving(e.to_string()))
}

fn forge_from_other_boundary<R: RngCore>(
    provider: &Provider,
    walked_from: &VertexId,
    dest: &VertexId,
    claimed: &CommittedEndpoint,
    rng: &mut R,
) -> Result<ConnectionProof, ProtocolError> {
    let c = provider.state()?;
    let path = provider.route(walked_from, dest)?;
    let stmt = PathStatement::new(
        &provider.pp,
        path.padded_length(),
        EndpointRef::Hidden(claimed.commitment),
        EndpointRef::Public(dest.to_scalar()),
        &c.augmented,
    );
    prove_unchecked(
        provider.prover_context()?,
        &path,
        &stmt,
        Some(&claimed.opening),
        None,
        rng,
    )
    .map_err(|e| ProtocolError::Proving(e.to_string()))
}

fn customer_verdict(
    customer: &Customer,
    provider_a: &Provider,
    provider_b: &Provider,
    source: &VertexId,
    dest: &VertexId,
) -> Verdict {
    let mut proofs: Vec<ConnectionProof> = customer
        .received
        .iter()
        .rev()
        .filter(|(t, _)| t == "connection-proof")
        .take(2)
        .filter_map(|(_, bytes)| ConnectionProof::from_bytes(bytes).ok())
        .collect();
    if proofs.len() != 2 {
        return Verdict::ChannelFailure("expected two well-formed proofs".into());
    }
    let proof_b = proofs.remove(0);
    let proof_a = proofs.remove(0);

    // Statement sanity: A proves source -> hidden, B proves hidden -> dest.
    if proof_a.statement.source != EndpointRef::Public(source.to_scalar())
        || !proof_a.statement.terminal.is_hidden()
        || proof_b.statement.terminal != EndpointRef::Public(dest.to_scalar())
        || !proof_b.statement.source.is_hidden()
    {
        return Verdict::ChannelFailure("statements do not match the request".into());
    }

    let (Some(pp_a), Some(pp_b)) = (customer.params_for(&proof_a), customer.params_for(&proof_b))
    else {
        return Verdict::ChannelFailure("unknown auditor".into());
    };
    match bind_shared_commitment(pp_a, pp_b, &proof_a, &proof_b) {
        Ok(()) => Verdict::Accept,
        Err(BindError::CommitmentMismatch) | Err(BindError::NotHidden) => {
            Verdict::CommitmentMismatch
        }
        Err(BindError::ProofFailure { side, reason }) => Verdict::ProofInvalid {
            provider: if side == "first" {
                provider_a.id.0.clone()
            } else {
                provider_b.id.0.clone()
            },
            reason: reason.to_string(),
        },
    }
}

fn opening_bytes(opening: &EndpointOpening) -> Vec<u8> {
    let mut w = Writer::new();
    w.put_scalar(&opening.id);
    w.put_scalar(&opening.alpha);
    w.put_scalar(&opening.beta);
    w.into_bytes()
}

fn opening_from_bytes(bytes: &[u8]) -> Result<EndpointOpening, WireError> {
    let mut r = Reader::new(bytes);
    let opening = EndpointOpening {
        id: r.get_scalar()?,
        alpha: r.get_scalar()?,
        beta: r.get_scalar()?,
    };
    r.finish()?;
    Ok(opening)
}

/// Session transcript document: verdict plus the observable log.
pub fn session_transcript_json(record: &SessionRecord, fabric: &Fabric) -> String {
    #[derive(Serialize)]
    struct Transcript<'a> {
        session_id: &'a str,
        verdict: &'a Verdict,
        log: &'a [LogEntry],
    }
    serde_json::to_string_pretty(&Transcript {
        session_id: &record.session_id,
        verdict: &record.verdict,
        log: fabric.log(),
    })
    .expect("transcript serializes")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::monipoly::{derive_auditor, setup};
    use crate::multigraph::Label;
    use crate::pairing::seeded_rng;

    fn path_graph(names: &[&str], boundary: &[&str]) -> Multigraph {
        let mut b = Multigraph::builder();
        for n in names {
            b = b.vertex(*n, [Label::from("qkd")]);
        }
        for w in names.windows(2) {
            b = b.link(w[0], w[1], []);
        }
        b.boundary(boundary.iter().copied()).build().unwrap()
    }

    struct World {
        fabric: Fabric,
        auditor_a: Auditor,
        auditor_b: Auditor,
        provider_a: Provider,
        provider_b: Provider,
        customer: Customer,
    }

    /// Two chains meeting at boundary nodes "bn1"/"bn2":
    ///   A: s - a1 - a2 - bn1, plus bn2 hanging off a1
    ///   B: bn1 - b1 - d, plus bn2 - b1
    fn two_provider_world(seed: u64) -> World {
        let mut rng = seeded_rng(seed);
        let (pp_a, sk_a) = setup(8, 32, &mut rng).unwrap();
        let (pp_b, sk_b) = derive_auditor(&pp_a, &mut rng);
        let graph_a = Multigraph::builder()
            .vertex("s", [])
            .vertex("a1", [])
            .vertex("a2", [])
            .vertex("bn1", [])
            .vertex("bn2", [])
            .link("s", "a1", [])
            .link("a1", "a2", [])
            .link("a2", "bn1", [])
            .link("a1", "bn2", [])
            .boundary(["bn1", "bn2"])
            .build()
            .unwrap();
        let graph_b = Multigraph::builder()
            .vertex("bn1", [])
            .vertex("bn2", [])
            .vertex("b1", [])
            .vertex("d", [])
            .link("bn1", "b1", [])
            .link("bn2", "b1", [])
            .link("b1", "d", [])
            .boundary(["bn1", "bn2"])
            .build()
            .unwrap();
        let provider_a = Provider::new("provider-a", pp_a.clone(), graph_a, &mut rng);
        let provider_b = Provider::new("provider-b", pp_b.clone(), graph_b, &mut rng);
        World {
            fabric: Fabric::new(),
            auditor_a: Auditor::new("auditor-a", pp_a.clone(), sk_a),
            auditor_b: Auditor::new("auditor-b", pp_b.clone(), sk_b),
            provider_a,
            provider_b,
            customer: Customer::new("customer", [pp_a, pp_b]),
        }
    }

    fn certified_world(seed: u64) -> (World, rand_chacha::ChaCha20Rng) {
        let mut world = two_provider_world(seed);
        let mut rng = seeded_rng(seed.wrapping_mul(7).wrapping_add(3));
        run_phase1(&mut world.fabric, &mut world.provider_a, &mut world.auditor_a, &mut rng)
            .unwrap();
        run_phase1(&mut world.fabric, &mut world.provider_b, &mut world.auditor_b, &mut rng)
            .unwrap();
        (world, rng)
    }

    #[test]
    fn phase1_padding_matches_bfs_oracle() {
        let mut rng = seeded_rng(200);
        let (pp, sk) = setup(8, 32, &mut rng).unwrap();
        let graph = path_graph(&["v0", "v1", "v2", "v3", "v4"], &["v4"]);
        let mut provider = Provider::new("p", pp.clone(), graph.clone(), &mut rng);
        let mut auditor = Auditor::new("ca", pp, sk);
        let mut fabric = Fabric::new();
        let padding = run_phase1(&mut fabric, &mut provider, &mut auditor, &mut rng).unwrap();
        // BFS oracle: eccentricity of the single boundary node.
        let oracle = graph
            .distances(&"v4".into())
            .unwrap()
            .into_values()
            .max()
            .unwrap();
        assert_eq!(padding, oracle);
        assert_eq!(padding, 4);
        assert_eq!(provider.augmented().unwrap().loops_at(&"v4".into()).len(), 4);
        assert_eq!(auditor.issuance_log.len(), 1);
    }

    #[test]
    fn phase1_rejects_boundaryless_graphs() {
        let mut rng = seeded_rng(201);
        let (pp, sk) = setup(8, 16, &mut rng).unwrap();
        let graph = Multigraph::builder().vertex("x", []).build().unwrap();
        let mut provider = Provider::new("p", pp.clone(), graph, &mut rng);
        let mut auditor = Auditor::new("ca", pp, sk);
        let mut fabric = Fabric::new();
        assert!(matches!(
            run_phase1(&mut fabric, &mut provider, &mut auditor, &mut rng),
            Err(ProtocolError::Graph(GraphError::EmptyBoundary))
        ));
    }

    #[test]
    fn phase1_signatures_verify_under_own_auditors_only() {
        let (world, _) = certified_world(202);
        let sig_a = world.provider_a.signature().unwrap();
        let sig_b = world.provider_b.signature().unwrap();
        assert_eq!(sig_a.auditor_key_id, world.auditor_a.pp.auditor_key_id());
        assert_eq!(sig_b.auditor_key_id, world.auditor_b.pp.auditor_key_id());
        assert_ne!(sig_a.auditor_key_id, sig_b.auditor_key_id);
    }

    #[test]
    fn stale_signature_rejects_after_topology_change() {
        let (world, mut rng) = certified_world(203);
        let provider = &world.provider_a;
        let changed = provider.graph().augment(1).unwrap();
        let gc = commit_graph(&provider.pp, &changed, &mut rng).unwrap();
        assert!(verify_graph_signature(
            &provider.pp,
            provider.signature().unwrap(),
            &provider.store().unwrap().holder.public,
            &changed,
            &gc,
        )
        .is_err());
    }

    #[test]
    fn agree_boundary_minimizes_total_cost() {
        let costs = |pairs: &[(&str, u64)]| -> BTreeMap<VertexId, u64> {
            pairs.iter().map(|(n, c)| (VertexId::from(*n), *c)).collect()
        };
        // Strict minimum: b2 totals 6 against b1's 7.
        assert_eq!(
            agree_boundary(&costs(&[("b1", 3), ("b2", 5)]), &costs(&[("b1", 4), ("b2", 1)])),
            Some("b2".into())
        );
        // Tie -> lexicographically smaller.
        assert_eq!(
            agree_boundary(&costs(&[("b1", 3), ("b2", 2)]), &costs(&[("b1", 1), ("b2", 2)])),
            Some("b1".into())
        );
        // Single shared node.
        assert_eq!(
            agree_boundary(&costs(&[("b1", 9), ("zz", 1)]), &costs(&[("b1", 9), ("yy", 0)])),
            Some("b1".into())
        );
        // Empty intersection.
        assert_eq!(agree_boundary(&costs(&[("b1", 1)]), &costs(&[("b2", 1)])), None);

        // Exhaustive minimum oracle over random cost maps.
        use rand::Rng;
        let mut rng = seeded_rng(204);
        for _ in 0..50 {
            let names = ["n0", "n1", "n2", "n3"];
            let sample = |rng: &mut rand_chacha::ChaCha20Rng| {
                let mut m = BTreeMap::new();
                for n in names {
                    if rng.gen_bool(0.7) {
                        m.insert(VertexId::from(n), rng.gen_range(0..10));
                    }
                }
                m
            };
            let a = sample(&mut rng);
            let b = sample(&mut rng);
            let got = agree_boundary(&a, &b);
            let oracle = a
                .iter()
                .filter_map(|(n, ca)| b.get(n).map(|cb| (ca + cb, n.clone())))
                .min()
                .map(|(_, n)| n);
            assert_eq!(got, oracle);
        }
    }

    #[test]
    fn phase2_honest_run_accepts() {
        let (mut world, mut rng) = certified_world(205);
        let record = run_phase2(
            &mut world.fabric,
            &world.provider_a,
            &world.provider_b,
            &mut world.customer,
            &"s".into(),
            &"d".into(),
            Deviation::Honest,
            &mut rng,
        )
        .unwrap();
        assert_eq!(record.verdict, Verdict::Accept);
        assert_eq!(record.proofs.len(), 2);
        assert!(record.boundary_commitment.is_some());
    }

    #[test]
    fn phase2_boundary_source_and_dest_accept() {
        // Source and destination sitting on the boundary node itself.
        let (mut world, mut rng) = certified_world(206);
        let record = run_phase2(
            &mut world.fabric,
            &world.provider_a,
            &world.provider_b,
            &mut world.customer,
            &"bn1".into(),
            &"bn1".into(),
            Deviation::Honest,
            &mut rng,
        )
        .unwrap();
        assert_eq!(record.verdict, Verdict::Accept);
    }

    #[test]
    fn phase2_adversarial_variants_reject_with_correct_codes() {
        let (mut world, mut rng) = certified_world(207);
        let record = run_phase2(
            &mut world.fabric,
            &world.provider_a,
            &world.provider_b,
            &mut world.customer,
            &"s".into(),
            &"d".into(),
            Deviation::WrongBoundary,
            &mut rng,
        )
        .unwrap();
        assert!(
            matches!(&record.verdict, Verdict::ProofInvalid { provider, .. } if provider == "provider-b"),
            "wrong boundary: {:?}",
            record.verdict
        );

        let (mut world, mut rng) = certified_world(208);
        let record = run_phase2(
            &mut world.fabric,
            &world.provider_a,
            &world.provider_b,
            &mut world.customer,
            &"s".into(),
            &"d".into(),
            Deviation::StaleSignature,
            &mut rng,
        )
        .unwrap();
        assert!(
            matches!(&record.verdict, Verdict::ProofInvalid { provider, .. } if provider == "provider-a"),
            "stale signature: {:?}",
            record.verdict
        );

        let (mut world, mut rng) = certified_world(209);
        let record = run_phase2(
            &mut world.fabric,
            &world.provider_a,
            &world.provider_b,
            &mut world.customer,
            &"s".into(),
            &"d".into(),
            Deviation::MismatchedCommitments,
            &mut rng,
        )
        .unwrap();
        assert_eq!(record.verdict, Verdict::CommitmentMismatch);
    }

    #[test]
    fn phase2_no_shared_boundary_is_no_path_before_any_proof() {
        let mut rng = seeded_rng(210);
        let (pp, sk) = setup(8, 32, &mut rng).unwrap();
        let (pp_b, sk_b) = derive_auditor(&pp, &mut rng);
        // Disjoint boundary naming: no shared node.
        let ga = path_graph(&["s", "x", "east"], &["east"]);
        let gb = path_graph(&["west", "y", "d"], &["west"]);
        let mut provider_a = Provider::new("provider-a", pp.clone(), ga, &mut rng);
        let mut provider_b = Provider::new("provider-b", pp_b.clone(), gb, &mut rng);
        let mut auditor_a = Auditor::new("auditor-a", pp.clone(), sk);
        let mut auditor_b = Auditor::new("auditor-b", pp_b.clone(), sk_b);
        let mut fabric = Fabric::new();
        run_phase1(&mut fabric, &mut provider_a, &mut auditor_a, &mut rng).unwrap();
        run_phase1(&mut fabric, &mut provider_b, &mut auditor_b, &mut rng).unwrap();
        let mut customer = Customer::new("customer", [pp, pp_b]);
        let record = run_phase2(
            &mut fabric,
            &provider_a,
            &provider_b,
            &mut customer,
            &"s".into(),
            &"d".into(),
            Deviation::Honest,
            &mut rng,
        )
        .unwrap();
        assert_eq!(record.verdict, Verdict::NoPath);
        assert!(record.proofs.is_empty());
        assert!(!world_has_proof_message(&fabric));
    }

    fn world_has_proof_message(fabric: &Fabric) -> bool {
        fabric.log().iter().any(|e| e.msg_type == "connection-proof")
    }

    #[test]
    fn phase2_unknown_endpoint() {
        let (mut world, mut rng) = certified_world(211);
        let record = run_phase2(
            &mut world.fabric,
            &world.provider_a,
            &world.provider_b,
            &mut world.customer,
            &"nope".into(),
            &"d".into(),
            Deviation::Honest,
            &mut rng,
        )
        .unwrap();
        assert_eq!(record.verdict, Verdict::UnknownEndpoint);
    }

    #[test]
    fn fabric_contracts() {
        let mut fabric = Fabric::new();
        let a = RoleId::new("a");
        let b = RoleId::new("b");
        fabric.register(&a);
        fabric.register(&b);

        // Unknown recipient -> routing error.
        assert!(matches!(
            fabric.send(&a, &RoleId::new("ghost"), Envelope::public("x", vec![])),
            Err(ProtocolError::UnknownRecipient(_))
        ));

        // Duplicate send: two receipts, two deliveries, order preserved.
        let r1 = fabric.send(&a, &b, Envelope::public("m", vec![1])).unwrap();
        let r2 = fabric.send(&a, &b, Envelope::public("m", vec![2])).unwrap();
        assert_ne!(r1.seq, r2.seq);
        assert_eq!(fabric.recv(&a, &b).unwrap().public_payload, vec![1]);
        assert_eq!(fabric.recv(&a, &b).unwrap().public_payload, vec![2]);
        assert!(fabric.recv(&a, &b).is_none());

        // Secret payloads are not logged, even as digests.
        fabric
            .send(&a, &b, Envelope::secret("s", b"opening-material".to_vec()))
            .unwrap();
        let log = fabric.log_json();
        assert!(!log.contains("opening-material"));
        let empty_digest = hex_digest(b"");
        assert!(log.contains(&empty_digest), "secret messages log the empty digest");
    }

    #[test]
    fn session_log_and_customer_bytes_hide_topology() {
        let (mut world, mut rng) = certified_world(212);
        let record = run_phase2(
            &mut world.fabric,
            &world.provider_a,
            &world.provider_b,
            &mut world.customer,
            &"s".into(),
            &"d".into(),
            Deviation::Honest,
            &mut rng,
        )
        .unwrap();
        assert_eq!(record.verdict, Verdict::Accept);

        // Forbidden material: internal vertex names, the boundary node
        // identity, identifier scalars, and every commitment opening.
        let mut visible = Vec::new();
        for (_, payload) in &world.customer.received {
            visible.extend_from_slice(payload);
        }
        visible.extend_from_slice(world.fabric.log_json().as_bytes());
        visible.extend_from_slice(session_transcript_json(&record, &world.fabric).as_bytes());

        for name in ["a1", "a2", "b1", "bn1", "bn2"] {
            let id_bytes = crate::pairing::scalar_to_bytes(&VertexId::from(name).to_scalar());
            assert!(
                !contains(&visible, &id_bytes),
                "{name} identifier scalar leaked"
            );
        }
        // Vertex names must not appear either (excluding role names, which
        // share no names with vertices here).
        for name in ["\"a1\"", "\"a2\"", "\"b1\"", "\"bn1\"", "\"bn2\""] {
            assert!(
                !contains(&visible, name.as_bytes()),
                "{name} vertex name leaked"
            );
        }
        // The opening scalars A sent to B must be absent.
        let opening = world
            .fabric
            .log()
            .iter()
            .find(|e| e.msg_type == "boundary-commitment")
            .expect("commitment exchanged");
        assert_eq!(opening.public_len as usize, 192, "only the pair is public");
    }

    fn contains(haystack: &[u8], needle: &[u8]) -> bool {
        haystack.windows(needle.len()).any(|w| w == needle)
    }

    #[test]
    fn provider_store_round_trip() {
        let (world, _) = certified_world(213);
        let store = world.provider_a.store().unwrap();
        let back = ProviderStore::from_bytes(&store.to_bytes()).unwrap();
        assert_eq!(back.holder, store.holder);
        assert_eq!(back.openings, store.openings);
        assert_eq!(back.graph_digest, store.graph_digest);
    }

    #[test]
    fn randomized_end_to_end_sessions_accept() {
        use rand::Rng;
        let mut rng = seeded_rng(214);
        let (pp_a, sk_a) = setup(8, 48, &mut rng).unwrap();
        for trial in 0..8 {
            let (pp_b, sk_b) = derive_auditor(&pp_a, &mut rng);
            // Random provider graphs sharing two boundary names.
            let build = |rng: &mut rand_chacha::ChaCha20Rng, prefix: &str| {
                let n = rng.gen_range(4..=8);
                let names: Vec<String> = (0..n)
                    .map(|i| format!("{prefix}{i}"))
                    .chain(["bnx".to_string(), "bny".to_string()])
                    .collect();
                let mut b = Multigraph::builder();
                for name in &names {
                    b = b.vertex(name.as_str(), []);
                }
                for i in 1..names.len() {
                    let j = rng.gen_range(0..i);
                    b = b.link(names[i].as_str(), names[j].as_str(), []);
                }
                b.boundary(["bnx", "bny"]).build().unwrap()
            };
            let ga = build(&mut rng, "a");
            let gb = build(&mut rng, "b");
            let mut provider_a = Provider::new("provider-a", pp_a.clone(), ga, &mut rng);
            let mut provider_b = Provider::new("provider-b", pp_b.clone(), gb, &mut rng);
            let mut auditor_a = Auditor::new("auditor-a", pp_a.clone(), sk_a.clone());
            let mut auditor_b = Auditor::new("auditor-b", pp_b.clone(), sk_b);
            let mut fabric = Fabric::new();
            run_phase1(&mut fabric, &mut provider_a, &mut auditor_a, &mut rng).unwrap();
            run_phase1(&mut fabric, &mut provider_b, &mut auditor_b, &mut rng).unwrap();
            let mut customer = Customer::new("customer", [pp_a.clone(), pp_b]);
            let record = run_phase2(
                &mut fabric,
                &provider_a,
                &provider_b,
                &mut customer,
                &"a0".into(),
                &"b0".into(),
                Deviation::Honest,
                &mut rng,
            )
            .unwrap();
            assert_eq!(record.verdict, Verdict::Accept, "trial {trial}");
        }
    }
}
