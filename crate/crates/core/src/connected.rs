//! Non-interactive proof that a signed multigraph contains a path of a fixed
//! public length between two endpoints, each either public or hidden inside
//! an endpoint commitment.
//!
//! The prover publishes one rerandomized witness per vertex, per off-path
//! edge instance, and per path position, plus a rerandomized signature
//! element. The statement is a single pairing-product equation whose secret
//! exponents are proven with a sigma protocol made non-interactive by
//! hashing the canonical transcript. Per-position chaining exponents force
//! consecutive path edges to share a vertex, a common path randomizer ties
//! all positions together, and the endpoint commitments enter the first and
//! last positions as pairing bases so the proven path endpoints are exactly
//! the committed identifiers.
//!
//! Transcript shape depends only on the public statement (vertex count,
//! edge-instance count, length, endpoint modes), never on the real path
//! length, which is padded away with loops.

use ark_ff::Field;
use rand::RngCore;
use sha2::{Digest, Sha256};

use crate::clsdh::{randomize_signature, verify_graph_signature, GraphSignature, HolderKey};
use crate::commitments::{verify_opening, EndpointCommitment, EndpointOpening, GraphCommitment};
use crate::monipoly::{encode_poly, graph_elements, poly_coeffs, ElementKey, PublicParameters};
use crate::multigraph::{Multigraph, Path};
use crate::pairing::{
    g1_to_bytes, hash_to_scalar, pairing_product, random_nonzero, random_scalar, Scalar, G1, G2,
    Gt,
};
use crate::wire::{Reader, WireError, Writer, MAGIC_PROOF};

/// One end of a path statement: disclosed identifier or commitment pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EndpointRef {
    Public(Scalar),
    Hidden(EndpointCommitment),
}

impl EndpointRef {
    pub fn is_hidden(&self) -> bool {
        matches!(self, EndpointRef::Hidden(_))
    }

    pub fn commitment(&self) -> Option<&EndpointCommitment> {
        match self {
            EndpointRef::Hidden(c) => Some(c),
            EndpointRef::Public(_) => None,
        }
    }
}

/// Public statement of one connection proof.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathStatement {
    /// Public (padded) path length.
    pub length: usize,
    pub source: EndpointRef,
    pub terminal: EndpointRef,
    /// Vertex count of the signed multigraph; shapes the transcript.
    pub vertex_count: usize,
    /// Edge-instance count of the signed multigraph, loops included.
    pub edge_count: usize,
    /// Binds the proof to one parameter set.
    pub pp_digest: [u8; 32],
    /// Binds the proof to one auditor key.
    pub auditor_key_id: [u8; 32],
}

impl PathStatement {
    pub fn new(
        pp: &PublicParameters,
        length: usize,
        source: EndpointRef,
        terminal: EndpointRef,
        graph: &Multigraph,
    ) -> Self {
        PathStatement {
            length,
            source,
            terminal,
            vertex_count: graph.vertex_count(),
            edge_count: graph.edge_count(),
            pp_digest: pp.digest(),
            auditor_key_id: pp.auditor_key_id(),
        }
    }

    fn write(&self, w: &mut Writer) {
        w.put_u32(self.length as u32);
        w.put_u32(self.vertex_count as u32);
        w.put_u32(self.edge_count as u32);
        w.put_bytes(&self.pp_digest);
        w.put_bytes(&self.auditor_key_id);
        for end in [&self.source, &self.terminal] {
            match end {
                EndpointRef::Public(id) => {
                    w.put_u8(0);
                    w.put_scalar(id);
                }
                EndpointRef::Hidden(c) => {
                    w.put_u8(1);
                    c.write(w);
                }
            }
        }
    }

    fn read(r: &mut Reader<'_>) -> Result<Self, WireError> {
        let length = r.get_u32()? as usize;
        let vertex_count = r.get_u32()? as usize;
        let edge_count = r.get_u32()? as usize;
        let pp_digest: [u8; 32] = r
            .get_bytes()?
            .try_into()
            .map_err(|_| WireError::Invalid("bad digest length".into()))?;
        let auditor_key_id: [u8; 32] = r
            .get_bytes()?
            .try_into()
            .map_err(|_| WireError::Invalid("bad key id length".into()))?;
        let mut ends = Vec::with_capacity(2);
        for _ in 0..2 {
            ends.push(match r.get_u8()? {
                0 => EndpointRef::Public(r.get_scalar()?),
                1 => EndpointRef::Hidden(EndpointCommitment::read(r)?),
                tag => return Err(WireError::Invalid(format!("bad endpoint tag {tag}"))),
            });
        }
        let terminal = ends.pop().unwrap();
        let source = ends.pop().unwrap();
        Ok(PathStatement {
            length,
            source,
            terminal,
            vertex_count,
            edge_count,
            pp_digest,
            auditor_key_id,
        })
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::new();
        self.write(&mut w);
        w.into_bytes()
    }

    pub fn hash(&self) -> [u8; 32] {
        Sha256::digest(self.to_bytes()).into()
    }
}

/// Per-position randomizer schedule along a padded path.
///
/// `path_randomizer` is shared by every position; `chain[l-1]` aligns the
/// second vertex of edge `l` with the first vertex of edge `l+1`;
/// `cross[l-2]` carries the product of edge `l`'s endpoint identifiers. The
/// per-vertex and per-off-path-edge pairs are `(r, r * pivot)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EpsilonSchedule {
    pub path_randomizer: Scalar,
    pub chain: Vec<Scalar>,
    pub cross: Vec<Scalar>,
    pub vertex: Vec<(Scalar, Scalar)>,
    pub off_path: Vec<(Scalar, Scalar)>,
}

/// Builds the schedule from the path's vertex-identifier chain
/// (`ids[0] = source .. ids[len] = terminal`), the shared path randomizer,
/// and the per-element randomizer/pivot pairs.
pub fn build_epsilon_schedule(
    path_vertex_ids: &[Scalar],
    path_randomizer: Scalar,
    vertex_randomizers: &[(Scalar, Scalar)],
    off_path_randomizers: &[(Scalar, Scalar)],
) -> EpsilonSchedule {
    let len = path_vertex_ids.len() - 1;
    let chain = (1..len)
        .map(|l| path_randomizer * path_vertex_ids[l])
        .collect();
    let cross = (2..len)
        .map(|l| path_randomizer * path_vertex_ids[l - 1] * path_vertex_ids[l])
        .collect();
    EpsilonSchedule {
        path_randomizer,
        chain,
        cross,
        vertex: vertex_randomizers
            .iter()
            .map(|(r, pivot)| (*r, *r * pivot))
            .collect(),
        off_path: off_path_randomizers
            .iter()
            .map(|(r, pivot)| (*r, *r * pivot))
            .collect(),
    }
}

/// Prover-published witness elements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofWitnesses {
    /// One per vertex, ordered by serialized bytes.
    pub vertex: Vec<G1>,
    /// One per edge instance off the path, ordered by serialized bytes.
    pub off_path: Vec<G1>,
    /// One per path position, in path order.
    pub path: Vec<G1>,
    /// Rerandomized signature element.
    pub v_prime: G1,
}

/// Sigma-protocol announcements: one target-group value for the pairing
/// relation, one G2 pair per hidden endpoint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Announcements {
    pub pairing: Gt,
    pub source: Option<(G2, G2)>,
    pub terminal: Option<(G2, G2)>,
}

/// Exponent assignment mirroring every quantified secret of the statement.
///
/// The same shape serves three roles: the real secrets, the random masking
/// values, and the published responses (`mask + challenge * secret`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignment {
    pub vertex: Vec<(Scalar, Scalar)>,
    pub off_path: Vec<(Scalar, Scalar)>,
    pub path_common: Scalar,
    pub chain: Vec<Scalar>,
    pub cross: Vec<Scalar>,
    pub source_blind: Option<Scalar>,
    pub terminal_blind: Option<Scalar>,
    pub bridge: Option<Scalar>,
    /// Signature-line secrets: holder-key, randomizer, unit, `t`, and `y`
    /// components.
    pub sig: [Scalar; 5],
    pub source_open: Option<(Scalar, Scalar, Scalar)>,
    pub terminal_open: Option<(Scalar, Scalar, Scalar)>,
}

impl Assignment {
    fn sample_like<R: RngCore>(other: &Assignment, rng: &mut R) -> Assignment {
        let pair = |rng: &mut R| (random_scalar(rng), random_scalar(rng));
        Assignment {
            vertex: other.vertex.iter().map(|_| pair(rng)).collect(),
            off_path: other.off_path.iter().map(|_| pair(rng)).collect(),
            path_common: random_scalar(rng),
            chain: other.chain.iter().map(|_| random_scalar(rng)).collect(),
            cross: other.cross.iter().map(|_| random_scalar(rng)).collect(),
            source_blind: other.source_blind.map(|_| random_scalar(rng)),
            terminal_blind: other.terminal_blind.map(|_| random_scalar(rng)),
            bridge: other.bridge.map(|_| random_scalar(rng)),
            sig: [(); 5].map(|_| random_scalar(rng)),
            source_open: other
                .source_open
                .map(|_| (random_scalar(rng), random_scalar(rng), random_scalar(rng))),
            terminal_open: other
                .terminal_open
                .map(|_| (random_scalar(rng), random_scalar(rng), random_scalar(rng))),
        }
    }

    /// `mask + challenge * secret`, field by field.
    fn respond(mask: &Assignment, challenge: Scalar, secret: &Assignment) -> Assignment {
        let comb = |m: &Scalar, s: &Scalar| *m + challenge * s;
        let comb2 =
            |m: &(Scalar, Scalar), s: &(Scalar, Scalar)| (comb(&m.0, &s.0), comb(&m.1, &s.1));
        let comb3 = |m: &(Scalar, Scalar, Scalar), s: &(Scalar, Scalar, Scalar)| {
            (comb(&m.0, &s.0), comb(&m.1, &s.1), comb(&m.2, &s.2))
        };
        Assignment {
            vertex: mask
                .vertex
                .iter()
                .zip(&secret.vertex)
                .map(|(m, s)| comb2(m, s))
                .collect(),
            off_path: mask
                .off_path
                .iter()
                .zip(&secret.off_path)
                .map(|(m, s)| comb2(m, s))
                .collect(),
            path_common: comb(&mask.path_common, &secret.path_common),
            chain: mask
                .chain
                .iter()
                .zip(&secret.chain)
                .map(|(m, s)| comb(m, s))
                .collect(),
            cross: mask
                .cross
                .iter()
                .zip(&secret.cross)
                .map(|(m, s)| comb(m, s))
                .collect(),
            source_blind: zip_opt(mask.source_blind, secret.source_blind, comb),
            terminal_blind: zip_opt(mask.terminal_blind, secret.terminal_blind, comb),
            bridge: zip_opt(mask.bridge, secret.bridge, comb),
            sig: [0, 1, 2, 3, 4].map(|i| comb(&mask.sig[i], &secret.sig[i])),
            source_open: zip_opt(mask.source_open, secret.source_open, |m, s| comb3(m, s)),
            terminal_open: zip_opt(mask.terminal_open, secret.terminal_open, |m, s| comb3(m, s)),
        }
    }
}

fn zip_opt<T: Copy>(a: Option<T>, b: Option<T>, f: impl Fn(&T, &T) -> T) -> Option<T> {
    match (a, b) {
        (Some(x), Some(y)) => Some(f(&x, &y)),
        _ => None,
    }
}

/// Complete non-interactive connection proof.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConnectionProof {
    pub statement: PathStatement,
    pub witnesses: ProofWitnesses,
    pub announcements: Announcements,
    pub challenge: Scalar,
    pub responses: Assignment,
}

/// Prover-side refusals raised before any transcript bytes are produced.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ProveError {
    #[error("statement length {statement} does not match path length {path}")]
    LengthMismatch { statement: usize, path: usize },
    #[error("statement graph shape does not match the signed graph")]
    ShapeMismatch,
    #[error("path endpoint does not match the statement {0}")]
    EndpointMismatch(&'static str),
    #[error("missing opening for the hidden {0}")]
    MissingOpening(&'static str),
    #[error("endpoint opening invalid: {0}")]
    Opening(#[from] crate::commitments::OpeningError),
    #[error("graph is not validly signed: {0}")]
    UnsignedGraph(#[from] crate::clsdh::SignatureError),
    #[error("invalid path: {0}")]
    Path(#[from] crate::multigraph::GraphError),
    #[error("encoding failure: {0}")]
    Encoding(#[from] crate::monipoly::EncodingError),
    #[error("parameters do not match the statement")]
    ParamsMismatch,
}

/// Verifier rejections; the code names the first failed equation group and
/// only ever exposes public structure.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RejectReason {
    #[error("malformed proof: {0}")]
    Malformed(String),
    #[error("proof bound to different parameters or auditor")]
    ParamsMismatch,
    #[error("endpoint commitment equation failed ({0})")]
    EndpointCommitment(&'static str),
    #[error("pairing relation failed (path chain or signature line)")]
    PairingRelation,
    #[error("challenge does not recompute from the transcript")]
    ChallengeMismatch,
}

/// Everything the prover holds about one signed graph.
#[derive(Clone, Copy)]
pub struct ProverContext<'a> {
    pub pp: &'a PublicParameters,
    pub signature: &'a GraphSignature,
    pub holder: &'a HolderKey,
    pub graph: &'a Multigraph,
    pub commitment: &'a GraphCommitment,
}

/// Proves `Connected(source, terminal, length)` for the given padded path.
///
/// Refuses (before emitting anything) when the path does not match the
/// statement, an opening is missing or wrong, or the graph signature does
/// not verify.
pub fn prove_connected<R: RngCore>(
    ctx: ProverContext<'_>,
    path: &Path,
    statement: &PathStatement,
    source_opening: Option<&EndpointOpening>,
    terminal_opening: Option<&EndpointOpening>,
    rng: &mut R,
) -> Result<ConnectionProof, ProveError> {
    if statement.length != path.padded_length() || statement.length == 0 {
        return Err(ProveError::LengthMismatch {
            statement: statement.length,
            path: path.padded_length(),
        });
    }
    if statement.vertex_count != ctx.graph.vertex_count()
        || statement.edge_count != ctx.graph.edge_count()
    {
        return Err(ProveError::ShapeMismatch);
    }
    if statement.pp_digest != ctx.pp.digest()
        || statement.auditor_key_id != ctx.pp.auditor_key_id()
        || ctx.signature.auditor_key_id != ctx.pp.auditor_key_id()
    {
        return Err(ProveError::ParamsMismatch);
    }
    path.validate(ctx.graph)?;
    check_endpoint(
        ctx.pp,
        "source",
        &statement.source,
        path.source().to_scalar(),
        source_opening,
    )?;
    check_endpoint(
        ctx.pp,
        "terminal",
        &statement.terminal,
        path.terminal().to_scalar(),
        terminal_opening,
    )?;
    verify_graph_signature(
        ctx.pp,
        ctx.signature,
        &ctx.holder.public,
        ctx.graph,
        ctx.commitment,
    )?;
    prove_unchecked(ctx, path, statement, source_opening, terminal_opening, rng)
}

fn check_endpoint(
    pp: &PublicParameters,
    side: &'static str,
    end: &EndpointRef,
    path_id: Scalar,
    opening: Option<&EndpointOpening>,
) -> Result<(), ProveError> {
    match end {
        EndpointRef::Public(id) => {
            if *id != path_id {
                return Err(ProveError::EndpointMismatch(side));
            }
        }
        EndpointRef::Hidden(c) => {
            let opening = opening.ok_or(ProveError::MissingOpening(side))?;
            if opening.id != path_id {
                return Err(ProveError::EndpointMismatch(side));
            }
            verify_opening(pp, c, opening)?;
        }
    }
    Ok(())
}

/// Transcript assembly without the semantic refusal checks.
///
/// Exists so test suites can model malicious provers; library callers want
/// [`prove_connected`].
#[doc(hidden)]
pub fn prove_unchecked<R: RngCore>(
    ctx: ProverContext<'_>,
    path: &Path,
    statement: &PathStatement,
    source_opening: Option<&EndpointOpening>,
    terminal_opening: Option<&EndpointOpening>,
    rng: &mut R,
) -> Result<ConnectionProof, ProveError> {
    let pp = ctx.pp;
    let length = statement.length;
    let elements = graph_elements(pp, ctx.graph)?;
    let by_key: std::collections::BTreeMap<&ElementKey, usize> = elements
        .iter()
        .enumerate()
        .map(|(i, el)| (&el.key, i))
        .collect();

    // Partition edge instances into path positions and the rest.
    let mut path_indices = Vec::with_capacity(length);
    let mut on_path = vec![false; elements.len()];
    for step in path.steps() {
        let key = ElementKey::Edge(step.edge.clone());
        let idx = *by_key
            .get(&key)
            .ok_or(ProveError::EndpointMismatch("path edge"))?;
        path_indices.push(idx);
        on_path[idx] = true;
    }

    // Identifier chain along the path.
    let mut ids = Vec::with_capacity(length + 1);
    ids.push(path.steps()[0].from.to_scalar());
    for step in path.steps() {
        ids.push(step.to.to_scalar());
    }

    let rnd = randomize_signature(ctx.signature, ctx.holder, rng);
    let path_randomizer = random_nonzero(rng);

    // Per-element randomizers and witnesses. Vertex and off-path witnesses
    // are sorted by their serialized bytes so transcript order carries no
    // information about element identity.
    struct Term {
        witness: G1,
        randomizer: Scalar,
        pivot: Scalar,
    }
    let mut vertex_terms = Vec::with_capacity(statement.vertex_count);
    let mut off_path_terms = Vec::with_capacity(statement.edge_count.saturating_sub(length));
    for (i, el) in elements.iter().enumerate() {
        let is_vertex = matches!(el.key, ElementKey::Vertex(_));
        if !is_vertex && on_path[i] {
            continue;
        }
        let opening = ctx.commitment.openings[&el.key];
        let r_el = random_nonzero(rng);
        let exp = opening * r_el.inverse().expect("nonzero") * rnd.r;
        let witness = encode_poly(pp, el.slot, &poly_coeffs(&el.kept_off_path))? * exp;
        let term = Term {
            witness,
            randomizer: r_el,
            pivot: el.pivot,
        };
        if is_vertex {
            vertex_terms.push(term);
        } else {
            off_path_terms.push(term);
        }
    }
    vertex_terms.sort_by_key(|t| g1_to_bytes(&t.witness));
    off_path_terms.sort_by_key(|t| g1_to_bytes(&t.witness));

    let path_inv = path_randomizer.inverse().expect("nonzero");
    let mut path_witnesses = Vec::with_capacity(length);
    for &idx in &path_indices {
        let el = &elements[idx];
        let kept = el.kept_on_path.as_ref().expect("path elements are edges");
        let opening = ctx.commitment.openings[&el.key];
        path_witnesses
            .push(encode_poly(pp, el.slot, &poly_coeffs(kept))? * (opening * path_inv * rnd.r));
    }

    let witnesses = ProofWitnesses {
        vertex: vertex_terms.iter().map(|t| t.witness).collect(),
        off_path: off_path_terms.iter().map(|t| t.witness).collect(),
        path: path_witnesses,
        v_prime: rnd.v_prime,
    };

    let schedule = build_epsilon_schedule(
        &ids,
        path_randomizer,
        &vertex_terms
            .iter()
            .map(|t| (t.randomizer, t.pivot))
            .collect::<Vec<_>>(),
        &off_path_terms
            .iter()
            .map(|t| (t.randomizer, t.pivot))
            .collect::<Vec<_>>(),
    );
    let source_hidden = statement.source.is_hidden();
    let terminal_hidden = statement.terminal.is_hidden();
    let open_or_zero = |o: Option<&EndpointOpening>| {
        o.copied().unwrap_or(EndpointOpening {
            id: Scalar::from(0u64),
            alpha: Scalar::from(0u64),
            beta: Scalar::from(0u64),
        })
    };
    let src = open_or_zero(source_opening);
    let dst = open_or_zero(terminal_opening);

    // Blinding exponents cancel the commitment blinders that leak into each
    // endpoint position.
    let single = length == 1;
    let source_blind = source_hidden.then(|| {
        if single && terminal_hidden {
            -(path_randomizer * (src.alpha + dst.alpha) + path_randomizer * ids[1] * src.beta)
        } else {
            -(path_randomizer * (src.alpha + ids[1] * src.beta))
        }
    });
    let terminal_blind = if terminal_hidden && !single {
        Some(-(path_randomizer * (dst.alpha + ids[length - 1] * dst.beta)))
    } else if terminal_hidden && single && !source_hidden {
        Some(-(path_randomizer * (dst.alpha + ids[0] * dst.beta)))
    } else {
        None
    };
    let bridge = (single && source_hidden && terminal_hidden).then(|| path_randomizer * ids[1]);

    let secrets = Assignment {
        vertex: schedule.vertex.clone(),
        off_path: schedule.off_path.clone(),
        path_common: schedule.path_randomizer,
        chain: schedule.chain.clone(),
        cross: schedule.cross.clone(),
        source_blind,
        terminal_blind,
        bridge,
        sig: [rnd.zeta, rnd.rho, rnd.omega, rnd.tau, rnd.gamma],
        source_open: source_hidden.then(|| (src.id, src.alpha, src.beta)),
        terminal_open: terminal_hidden.then(|| (dst.id, dst.alpha, dst.beta)),
    };

    let masks = Assignment::sample_like(&secrets, rng);
    let announcements = Announcements {
        pairing: pairing_relation(pp, statement, &witnesses, &masks)
            .map_err(|_| ProveError::ShapeMismatch)?,
        source: masks.source_open.map(|(x, a, b)| {
            (
                pp.g2_bases[0][1] * x + pp.f * a,
                pp.g2_bases[0][0] * x + pp.f * b,
            )
        }),
        terminal: masks.terminal_open.map(|(x, a, b)| {
            (
                pp.g2_bases[0][1] * x + pp.f * a,
                pp.g2_bases[0][0] * x + pp.f * b,
            )
        }),
    };
    let challenge = transcript_challenge(statement, &witnesses, &announcements);
    let responses = Assignment::respond(&masks, challenge, &secrets);
    Ok(ConnectionProof {
        statement: statement.clone(),
        witnesses,
        announcements,
        challenge,
        responses,
    })
}

/// Evaluates the pairing side of the relation under an exponent assignment.
///
/// Linear in the assignment and zero on the true secrets: the vertex,
/// off-path, and path terms multiply to the commitment aggregate raised to
/// the presentation randomizer, which the signature line consumes.
fn pairing_relation(
    pp: &PublicParameters,
    statement: &PathStatement,
    witnesses: &ProofWitnesses,
    a: &Assignment,
) -> Result<Gt, RejectReason> {
    let length = statement.length;
    let x00 = pp.g2_bases[0][0];
    let x01 = pp.g2_bases[0][1];
    let x02 = pp.g2_bases[0][2];
    let mut pairs: Vec<(G1, G2)> =
        Vec::with_capacity(witnesses.vertex.len() + witnesses.off_path.len() + length + 2);

    for (w, (e1, e0)) in witnesses.vertex.iter().zip(&a.vertex) {
        pairs.push((*w, x01 * e1 + x00 * e0));
    }
    for (w, (e1, e0)) in witnesses.off_path.iter().zip(&a.off_path) {
        pairs.push((*w, x01 * e1 + x00 * e0));
    }

    fn need(o: &Option<Scalar>, what: &'static str) -> Result<Scalar, RejectReason> {
        o.ok_or_else(|| RejectReason::Malformed(format!("missing {what} response")))
    }
    if length == 1 {
        let combo = match (&statement.source, &statement.terminal) {
            (EndpointRef::Public(xi), EndpointRef::Public(xj)) => {
                (x02 + x01 * (*xi + *xj) + x00 * (*xi * *xj)) * a.path_common
            }
            (EndpointRef::Hidden(cs), EndpointRef::Public(xj)) => {
                (x02 + cs.c_hi + x01 * xj + cs.c_lo * xj) * a.path_common
                    + pp.f * need(&a.source_blind, "source blind")?
            }
            (EndpointRef::Public(xi), EndpointRef::Hidden(ct)) => {
                (x02 + x01 * xi + ct.c_hi + ct.c_lo * xi) * a.path_common
                    + pp.f * need(&a.terminal_blind, "terminal blind")?
            }
            (EndpointRef::Hidden(cs), EndpointRef::Hidden(ct)) => {
                (x02 + cs.c_hi + ct.c_hi) * a.path_common
                    + cs.c_lo * need(&a.bridge, "bridge")?
                    + pp.f * need(&a.source_blind, "source blind")?
            }
        };
        pairs.push((witnesses.path[0], combo));
    } else {
        let first = match &statement.source {
            EndpointRef::Hidden(cs) => {
                (x02 + cs.c_hi) * a.path_common
                    + (x01 + cs.c_lo) * a.chain[0]
                    + pp.f * need(&a.source_blind, "source blind")?
            }
            EndpointRef::Public(xi) => {
                (x02 + x01 * xi) * a.path_common + (x01 + x00 * xi) * a.chain[0]
            }
        };
        pairs.push((witnesses.path[0], first));

        for k in 2..length {
            let combo = x02 * a.path_common
                + x01 * (a.chain[k - 2] + a.chain[k - 1])
                + x00 * a.cross[k - 2];
            pairs.push((witnesses.path[k - 1], combo));
        }

        let last = match &statement.terminal {
            EndpointRef::Hidden(ct) => {
                (x02 + ct.c_hi) * a.path_common
                    + (x01 + ct.c_lo) * a.chain[length - 2]
                    + pp.f * need(&a.terminal_blind, "terminal blind")?
            }
            EndpointRef::Public(xj) => {
                (x02 + x01 * xj) * a.path_common + (x01 + x00 * xj) * a.chain[length - 2]
            }
        };
        pairs.push((witnesses.path[length - 1], last));
    }

    let sig_g1 =
        pp.h * a.sig[0] + pp.b * a.sig[1] + pp.c * a.sig[2] - witnesses.v_prime * a.sig[3];
    pairs.push((sig_g1, x00));
    pairs.push((-(witnesses.v_prime * a.sig[4]), pp.issuer_pub));

    Ok(pairing_product(&pairs))
}

fn write_witnesses(w: &mut Writer, witnesses: &ProofWitnesses) {
    for p in &witnesses.vertex {
        w.put_g1(p);
    }
    for p in &witnesses.off_path {
        w.put_g1(p);
    }
    for p in &witnesses.path {
        w.put_g1(p);
    }
    w.put_g1(&witnesses.v_prime);
}

fn write_announcements(w: &mut Writer, ann: &Announcements) {
    w.put_gt(&ann.pairing);
    for pair in [&ann.source, &ann.terminal].into_iter().flatten() {
        w.put_g2(&pair.0);
        w.put_g2(&pair.1);
    }
}

/// Canonical Fiat-Shamir transcript: statement, witnesses in canonical
/// order, then announcements in declaration order.
fn transcript_challenge(
    statement: &PathStatement,
    witnesses: &ProofWitnesses,
    announcements: &Announcements,
) -> Scalar {
    let mut w = Writer::new();
    statement.write(&mut w);
    write_witnesses(&mut w, witnesses);
    write_announcements(&mut w, announcements);
    hash_to_scalar(b"connected-challenge", w.as_slice())
}

/// Verifies a connection proof against one auditor's parameters.
///
/// All inputs are untrusted. Checks run in fixed order: structure, parameter
/// binding, endpoint-commitment equations, the pairing relation, and finally
/// challenge recomputation; the first failure names its group.
pub fn verify_connected(
    pp: &PublicParameters,
    proof: &ConnectionProof,
) -> Result<(), RejectReason> {
    let st = &proof.statement;
    let length = st.length;
    if length < 1 {
        return Err(RejectReason::Malformed("zero length".into()));
    }
    if st.edge_count < length {
        return Err(RejectReason::Malformed(
            "length exceeds edge instances".into(),
        ));
    }
    if st.pp_digest != pp.digest() || st.auditor_key_id != pp.auditor_key_id() {
        return Err(RejectReason::ParamsMismatch);
    }
    check_shape(st, &proof.witnesses, &proof.responses, &proof.announcements)?;

    let c = proof.challenge;
    for (side, end, ann, open) in [
        (
            "source",
            &st.source,
            &proof.announcements.source,
            &proof.responses.source_open,
        ),
        (
            "terminal",
            &st.terminal,
            &proof.announcements.terminal,
            &proof.responses.terminal_open,
        ),
    ] {
        if let EndpointRef::Hidden(com) = end {
            let (a_hi, a_lo) = ann.as_ref().expect("presence checked");
            let (x, alpha, beta) = open.expect("presence checked");
            if pp.g2_bases[0][1] * x + pp.f * alpha != *a_hi + com.c_hi * c {
                return Err(RejectReason::EndpointCommitment(side));
            }
            if pp.g2_bases[0][0] * x + pp.f * beta != *a_lo + com.c_lo * c {
                return Err(RejectReason::EndpointCommitment(side));
            }
        }
    }

    // The relation target is the identity, so the response evaluation must
    // reproduce the announcement exactly.
    let eval = pairing_relation(pp, st, &proof.witnesses, &proof.responses)?;
    if eval != proof.announcements.pairing {
        return Err(RejectReason::PairingRelation);
    }

    if transcript_challenge(st, &proof.witnesses, &proof.announcements) != proof.challenge {
        return Err(RejectReason::ChallengeMismatch);
    }
    Ok(())
}

fn check_shape(
    st: &PathStatement,
    wit: &ProofWitnesses,
    resp: &Assignment,
    ann: &Announcements,
) -> Result<(), RejectReason> {
    let length = st.length;
    let bad = |what: &str| Err(RejectReason::Malformed(format!("{what} count mismatch")));
    if wit.vertex.len() != st.vertex_count || resp.vertex.len() != st.vertex_count {
        return bad("vertex");
    }
    let off = st.edge_count - length;
    if wit.off_path.len() != off || resp.off_path.len() != off {
        return bad("off-path");
    }
    if wit.path.len() != length {
        return bad("path witness");
    }
    if resp.chain.len() != length - 1 || resp.cross.len() != length.saturating_sub(2) {
        return bad("path response");
    }
    let source_hidden = st.source.is_hidden();
    let terminal_hidden = st.terminal.is_hidden();
    let single = length == 1;
    let want_source_blind = source_hidden;
    let want_terminal_blind = terminal_hidden && !(single && source_hidden);
    let want_bridge = single && source_hidden && terminal_hidden;
    if resp.source_blind.is_some() != want_source_blind
        || resp.terminal_blind.is_some() != want_terminal_blind
        || resp.bridge.is_some() != want_bridge
    {
        return bad("blind response");
    }
    if resp.source_open.is_some() != source_hidden
        || ann.source.is_some() != source_hidden
        || resp.terminal_open.is_some() != terminal_hidden
        || ann.terminal.is_some() != terminal_hidden
    {
        return bad("endpoint section");
    }
    Ok(())
}

/// Why a cross-proof bind check failed.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BindError {
    #[error("expected hidden terminal/source pair")]
    NotHidden,
    #[error("shared commitment mismatch")]
    CommitmentMismatch,
    #[error("{side} proof failed: {reason}")]
    ProofFailure {
        side: &'static str,
        reason: RejectReason,
    },
}

/// Accepts iff the first proof's hidden terminal commitments are
/// bit-identical to the second proof's hidden source commitments and both
/// proofs verify under their respective parameters.
pub fn bind_shared_commitment(
    pp_first: &PublicParameters,
    pp_second: &PublicParameters,
    first: &ConnectionProof,
    second: &ConnectionProof,
) -> Result<(), BindError> {
    let (EndpointRef::Hidden(t), EndpointRef::Hidden(s)) =
        (&first.statement.terminal, &second.statement.source)
    else {
        return Err(BindError::NotHidden);
    };
    if t.to_bytes() != s.to_bytes() {
        return Err(BindError::CommitmentMismatch);
    }
    verify_connected(pp_first, first).map_err(|reason| BindError::ProofFailure {
        side: "first",
        reason,
    })?;
    verify_connected(pp_second, second).map_err(|reason| BindError::ProofFailure {
        side: "second",
        reason,
    })?;
    Ok(())
}

impl ConnectionProof {
    /// Versioned binary proof: header (version, statement hash, length,
    /// counts), then length-prefixed statement, witness, announcement,
    /// challenge, and response sections. Canonical byte-for-byte.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::with_header(MAGIC_PROOF);
        w.put_bytes(&self.statement.hash());
        w.put_u32(self.statement.length as u32);
        w.put_u32(self.statement.vertex_count as u32);
        w.put_u32(self.statement.edge_count as u32);

        w.put_bytes(&self.statement.to_bytes());

        let mut ws = Writer::new();
        write_witnesses(&mut ws, &self.witnesses);
        w.put_bytes(ws.as_slice());

        let mut an = Writer::new();
        write_announcements(&mut an, &self.announcements);
        w.put_bytes(an.as_slice());

        w.put_scalar(&self.challenge);

        let mut rs = Writer::new();
        self.write_responses(&mut rs);
        w.put_bytes(rs.as_slice());
        w.into_bytes()
    }

    fn write_responses(&self, w: &mut Writer) {
        let r = &self.responses;
        for (a, b) in r.vertex.iter().chain(&r.off_path) {
            w.put_scalar(a);
            w.put_scalar(b);
        }
        w.put_scalar(&r.path_common);
        for s in r.chain.iter().chain(&r.cross) {
            w.put_scalar(s);
        }
        for s in [&r.source_blind, &r.terminal_blind, &r.bridge]
            .into_iter()
            .flatten()
        {
            w.put_scalar(s);
        }
        for s in &r.sig {
            w.put_scalar(s);
        }
        for (x, a, b) in [&r.source_open, &r.terminal_open].into_iter().flatten() {
            w.put_scalar(x);
            w.put_scalar(a);
            w.put_scalar(b);
        }
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, WireError> {
        let mut r = Reader::expect_header(bytes, MAGIC_PROOF)?;
        let stated_hash: Vec<u8> = r.get_bytes()?.to_vec();
        let length = r.get_u32()? as usize;
        let vertex_count = r.get_u32()? as usize;
        let edge_count = r.get_u32()? as usize;
        if length < 1 || edge_count < length {
            return Err(WireError::Invalid("inconsistent header counts".into()));
        }
        if vertex_count > 1 << 20 || edge_count > 1 << 20 {
            return Err(WireError::Invalid("header counts out of range".into()));
        }

        let statement_bytes = r.get_bytes()?;
        let mut sr = Reader::new(statement_bytes);
        let statement = PathStatement::read(&mut sr)?;
        sr.finish()?;
        if statement.length != length
            || statement.vertex_count != vertex_count
            || statement.edge_count != edge_count
            || stated_hash != statement.hash()
        {
            return Err(WireError::Invalid("header does not match statement".into()));
        }

        let witness_bytes = r.get_bytes()?;
        let mut wr = Reader::new(witness_bytes);
        let mut vertex = Vec::with_capacity(vertex_count);
        for _ in 0..vertex_count {
            vertex.push(wr.get_g1()?);
        }
        let mut off_path = Vec::with_capacity(edge_count - length);
        for _ in 0..edge_count - length {
            off_path.push(wr.get_g1()?);
        }
        let mut path = Vec::with_capacity(length);
        for _ in 0..length {
            path.push(wr.get_g1()?);
        }
        let v_prime = wr.get_g1()?;
        wr.finish()?;
        let witnesses = ProofWitnesses {
            vertex,
            off_path,
            path,
            v_prime,
        };

        let source_hidden = statement.source.is_hidden();
        let terminal_hidden = statement.terminal.is_hidden();
        let ann_bytes = r.get_bytes()?;
        let mut ar = Reader::new(ann_bytes);
        let pairing = ar.get_gt()?;
        let source_ann = if source_hidden {
            Some((ar.get_g2()?, ar.get_g2()?))
        } else {
            None
        };
        let terminal_ann = if terminal_hidden {
            Some((ar.get_g2()?, ar.get_g2()?))
        } else {
            None
        };
        ar.finish()?;
        let announcements = Announcements {
            pairing,
            source: source_ann,
            terminal: terminal_ann,
        };

        let challenge = r.get_scalar()?;

        let resp_bytes = r.get_bytes()?;
        let mut rr = Reader::new(resp_bytes);
        let mut vertex_resp = Vec::with_capacity(vertex_count);
        for _ in 0..vertex_count {
            vertex_resp.push((rr.get_scalar()?, rr.get_scalar()?));
        }
        let mut off_resp = Vec::with_capacity(edge_count - length);
        for _ in 0..edge_count - length {
            off_resp.push((rr.get_scalar()?, rr.get_scalar()?));
        }
        let path_common = rr.get_scalar()?;
        let chain = (0..length - 1)
            .map(|_| rr.get_scalar())
            .collect::<Result<Vec<_>, _>>()?;
        let cross = (0..length.saturating_sub(2))
            .map(|_| rr.get_scalar())
            .collect::<Result<Vec<_>, _>>()?;
        let single = length == 1;
        let want_source_blind = source_hidden;
        let want_terminal_blind = terminal_hidden && !(single && source_hidden);
        let want_bridge = single && source_hidden && terminal_hidden;
        let source_blind = if want_source_blind {
            Some(rr.get_scalar()?)
        } else {
            None
        };
        let terminal_blind = if want_terminal_blind {
            Some(rr.get_scalar()?)
        } else {
            None
        };
        let bridge = if want_bridge {
            Some(rr.get_scalar()?)
        } else {
            None
        };
        let mut sig = [Scalar::from(0u64); 5];
        for s in sig.iter_mut() {
            *s = rr.get_scalar()?;
        }
        let source_open = if source_hidden {
            Some((rr.get_scalar()?, rr.get_scalar()?, rr.get_scalar()?))
        } else {
            None
        };
        let terminal_open = if terminal_hidden {
            Some((rr.get_scalar()?, rr.get_scalar()?, rr.get_scalar()?))
        } else {
            None
        };
        rr.finish()?;
        r.finish()?;

        Ok(ConnectionProof {
            statement,
            witnesses,
            announcements,
            challenge,
            responses: Assignment {
                vertex: vertex_resp,
                off_path: off_resp,
                path_common,
                chain,
                cross,
                source_blind,
                terminal_blind,
                bridge,
                sig,
                source_open,
                terminal_open,
            },
        })
    }
}
