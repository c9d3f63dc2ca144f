//! `topocert`: operator tooling for topology-hiding connectivity assurance.
//!
//! Subcommands cover the full lifecycle: parameter setup, network
//! certification, endpoint commitments, path proving, verification, and a
//! full two-provider simulation. Human-readable summaries go to stdout;
//! machine artifacts go to files only. Exit codes are stable and documented
//! on [`codes`].

use std::fs;
use std::path::{Path as FsPath, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand::RngCore;

use topocert::clsdh::GraphSignature;
use topocert::commitments::{
    aggregate_commitment, commit_endpoint, CommittedEndpoint, GraphCommitment,
};
use topocert::connected::{
    bind_shared_commitment, prove_connected, verify_connected, BindError, ConnectionProof,
    EndpointRef, PathStatement, ProverContext, RejectReason,
};
use topocert::monipoly::{derive_auditor, setup, IssuerSecret, PublicParameters};
use topocert::multigraph::{padded_route, GraphError, Multigraph, VertexId};
use topocert::protocol::{
    run_phase1, run_phase2, session_transcript_json, Auditor, Customer, Deviation, Fabric,
    Provider, ProviderStore, Verdict,
};

/// Stable exit codes.
pub mod codes {
    pub const OK: u8 = 0;
    pub const OTHER: u8 = 1;
    pub const USAGE: u8 = 2;
    pub const MALFORMED: u8 = 3;
    pub const REJECTED: u8 = 4;
    pub const NO_PATH: u8 = 5;
    pub const BIND_MISMATCH: u8 = 6;
    pub const PROOF_INVALID: u8 = 7;
    pub const OPENING_REJECTED: u8 = 8;
    pub const CHANNEL_FAILURE: u8 = 9;
    pub const UNKNOWN_ENDPOINT: u8 = 10;
}

#[derive(Parser)]
#[command(
    name = "topocert",
    about = "Topology-hiding connectivity assurance for multi-provider networks",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct SeedArgs {
    /// Deterministic randomness seed. Refused without --insecure-test-mode:
    /// seeded runs make commitments and proofs reproducible and linkable.
    #[arg(long)]
    seed: Option<u64>,
    /// Acknowledge that deterministic randomness is for tests only.
    #[arg(long)]
    insecure_test_mode: bool,
}

impl SeedArgs {
    fn rng(&self) -> Result<impl RngCore, Failure> {
        if self.seed.is_some() && !self.insecure_test_mode {
            return Err(Failure::new(
                codes::USAGE,
                "--seed requires --insecure-test-mode",
            ));
        }
        Ok(match self.seed {
            Some(s) => topocert::pairing::seeded_rng(s),
            None => topocert::pairing::os_rng(),
        })
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate public parameters and an auditor keypair.
    Setup {
        /// Maximum message-set size (vertex id + labels + counter).
        #[arg(long, default_value_t = 8)]
        n_max: usize,
        /// Base-family capacity; a graph needs n <= l-max/2 vertices and
        /// m <= l-max/2 edge instances.
        #[arg(long, default_value_t = 256)]
        l_max: usize,
        /// Parameter file to write.
        #[arg(long)]
        out: PathBuf,
        /// Auditor secret-key file to write.
        #[arg(long)]
        auditor_keys: PathBuf,
        /// Key a new auditor onto an existing parameter file instead of
        /// running a fresh base ceremony; required when two auditors must
        /// interoperate on shared boundary commitments.
        #[arg(long)]
        base_params: Option<PathBuf>,
        #[command(flatten)]
        seed: SeedArgs,
    },
    /// Certify a topology: pad boundary nodes, commit, and sign.
    Certify {
        /// Topology document (JSON).
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        params: PathBuf,
        /// Auditor secret-key file.
        #[arg(long)]
        auditor_keys: PathBuf,
        /// Provider private store to write (holder key + openings).
        #[arg(long)]
        holder_key: PathBuf,
        /// Signature file to write.
        #[arg(long)]
        out: PathBuf,
        /// Augmented-topology file to write (defaults to <graph>.augmented.json).
        #[arg(long)]
        augmented_out: Option<PathBuf>,
        #[command(flatten)]
        seed: SeedArgs,
    },
    /// Commit to a vertex identifier, producing a commitment+opening file.
    Commit {
        #[arg(long)]
        params: PathBuf,
        /// Vertex name to commit to.
        #[arg(long)]
        vertex: String,
        /// Commitment+opening file to write. Secret: share only over a
        /// secure channel.
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        seed: SeedArgs,
    },
    /// Prove a fixed-length path between endpoints of a certified topology.
    Prove {
        /// Signature file from `certify`.
        #[arg(long)]
        sig: PathBuf,
        /// Augmented topology written by `certify`.
        #[arg(long)]
        graph_augmented: PathBuf,
        #[arg(long)]
        params: PathBuf,
        /// Provider private store written by `certify`.
        #[arg(long)]
        holder_key: PathBuf,
        /// Public source vertex name.
        #[arg(long, conflicts_with = "source_commitment")]
        source: Option<String>,
        /// Hidden source: commitment+opening file.
        #[arg(long)]
        source_commitment: Option<PathBuf>,
        /// Public destination vertex name.
        #[arg(long, conflicts_with = "dest_commitment")]
        dest: Option<String>,
        /// Hidden destination: commitment+opening file.
        #[arg(long)]
        dest_commitment: Option<PathBuf>,
        /// Public path length to prove.
        #[arg(long)]
        length: usize,
        /// Proof file to write.
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        seed: SeedArgs,
    },
    /// Verify a proof file; optionally bind-check it against a peer proof.
    Verify {
        #[arg(long)]
        proof: PathBuf,
        /// Parameters of the proof's auditor (embeds the auditor public key).
        #[arg(long)]
        params: PathBuf,
        /// Peer proof whose hidden source must equal this proof's hidden
        /// terminal.
        #[arg(long)]
        peer_proof: Option<PathBuf>,
        /// Parameters for the peer proof's auditor (defaults to --params).
        #[arg(long)]
        peer_params: Option<PathBuf>,
    },
    /// Run the full two-provider protocol in process.
    Simulate {
        #[arg(long)]
        topology_a: PathBuf,
        #[arg(long)]
        topology_b: PathBuf,
        /// Source vertex in topology A.
        #[arg(long)]
        source: String,
        /// Destination vertex in topology B.
        #[arg(long)]
        dest: String,
        /// Session transcript file to write.
        #[arg(long)]
        transcript: Option<PathBuf>,
        /// Inject a misbehavior and observe the verdict.
        #[arg(long, value_parser = parse_adversary)]
        adversary: Option<Deviation>,
        #[arg(long, default_value_t = 8)]
        n_max: usize,
        #[arg(long, default_value_t = 64)]
        l_max: usize,
        #[command(flatten)]
        seed: SeedArgs,
    },
}

fn parse_adversary(s: &str) -> Result<Deviation, String> {
    match s {
        "wrong-boundary" => Ok(Deviation::WrongBoundary),
        "stale-signature" => Ok(Deviation::StaleSignature),
        "mismatched-commitments" => Ok(Deviation::MismatchedCommitments),
        other => Err(format!(
            "unknown adversary `{other}` (expected wrong-boundary, stale-signature, or mismatched-commitments)"
        )),
    }
}

/// Failure with a stable exit code; message goes to stderr.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::new(codes::OTHER, e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::from(codes::OK),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn read(path: &FsPath, what: &str) -> Result<Vec<u8>, Failure> {
    fs::read(path).map_err(|e| Failure::new(codes::OTHER, format!("reading {what} {path:?}: {e}")))
}

fn write(path: &FsPath, bytes: &[u8], what: &str) -> Result<(), Failure> {
    fs::write(path, bytes)
        .map_err(|e| Failure::new(codes::OTHER, format!("writing {what} {path:?}: {e}")))
}

fn load_params(path: &FsPath) -> Result<PublicParameters, Failure> {
    PublicParameters::from_bytes(&read(path, "parameter file")?)
        .map_err(|e| Failure::new(codes::MALFORMED, format!("parameter file {path:?}: {e}")))
}

fn load_graph(path: &FsPath) -> Result<Multigraph, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::new(codes::OTHER, format!("reading topology {path:?}: {e}")))?;
    Multigraph::from_json(&text)
        .map_err(|e| Failure::new(codes::MALFORMED, format!("topology {path:?}: {e}")))
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Setup {
            n_max,
            l_max,
            out,
            auditor_keys,
            base_params,
            seed,
        } => {
            let mut rng = seed.rng()?;
            let (pp, sk) = match base_params {
                Some(base) => {
                    let base = load_params(&base)?;
                    derive_auditor(&base, &mut rng)
                }
                None => setup(n_max, l_max, &mut rng)
                    .map_err(|e| Failure::new(codes::USAGE, e.to_string()))?,
            };
            if !pp.spot_check(8) {
                return Err(Failure::new(
                    codes::OTHER,
                    "generated parameters failed the pairing-consistency self-check",
                ));
            }
            write(&out, &pp.to_bytes(), "parameter file")?;
            write(&auditor_keys, &sk.to_bytes(), "auditor key file")?;
            println!(
                "parameters written: n_max={} l_max={} auditor={} (self-check ok)",
                pp.n_max,
                pp.l_max,
                hex::encode(pp.auditor_key_id())
            );
            Ok(())
        }
        Command::Certify {
            graph,
            params,
            auditor_keys,
            holder_key,
            out,
            augmented_out,
            seed,
        } => {
            let mut rng = seed.rng()?;
            let pp = load_params(&params)?;
            let sk = IssuerSecret::from_bytes(&read(&auditor_keys, "auditor key file")?)
                .map_err(|e| Failure::new(codes::MALFORMED, e.to_string()))?;
            let topology = load_graph(&graph)?;

            let mut provider = Provider::new("provider", pp.clone(), topology, &mut rng);
            let mut auditor = Auditor::new("auditor", pp, sk);
            let mut fabric = Fabric::new();
            let padding = run_phase1(&mut fabric, &mut provider, &mut auditor, &mut rng)
                .map_err(|e| Failure::new(codes::USAGE, e.to_string()))?;

            let augmented_path = augmented_out.unwrap_or_else(|| {
                let mut p = graph.clone();
                p.set_extension("augmented.json");
                p
            });
            let augmented = provider.augmented().expect("phase 1 ran");
            write(&augmented_path, augmented.to_json().as_bytes(), "augmented topology")?;
            write(
                &out,
                &provider.signature().expect("phase 1 ran").to_bytes(),
                "signature file",
            )?;
            write(
                &holder_key,
                &provider.store().expect("phase 1 ran").to_bytes(),
                "provider store",
            )?;
            println!("padding target = {padding}");
            Ok(())
        }
        Command::Commit {
            params,
            vertex,
            out,
            seed,
        } => {
            let mut rng = seed.rng()?;
            let pp = load_params(&params)?;
            let committed = commit_endpoint(&pp, VertexId::new(vertex).to_scalar(), &mut rng);
            write(&out, &committed.to_bytes(), "commitment file")?;
            println!("commitment written (file holds the opening: transfer securely)");
            Ok(())
        }
        Command::Prove {
            sig,
            graph_augmented,
            params,
            holder_key,
            source,
            source_commitment,
            dest,
            dest_commitment,
            length,
            out,
            seed,
        } => {
            let mut rng = seed.rng()?;
            let pp = load_params(&params)?;
            let signature = GraphSignature::from_bytes(&read(&sig, "signature file")?)
                .map_err(|e| Failure::new(codes::MALFORMED, e.to_string()))?;
            let graph = load_graph(&graph_augmented)?;
            let store = ProviderStore::from_bytes(&read(&holder_key, "provider store")?)
                .map_err(|e| Failure::new(codes::MALFORMED, e.to_string()))?;
            if store.graph_digest != graph.digest() {
                return Err(Failure::new(
                    codes::USAGE,
                    "provider store does not match the augmented topology",
                ));
            }
            let commitment = GraphCommitment {
                aggregate: aggregate_commitment(&pp, &graph, &store.openings)
                    .map_err(|e| Failure::new(codes::USAGE, e.to_string()))?,
                openings: store.openings.clone(),
            };

            let (source_ref, source_vertex, source_open) =
                endpoint(&graph, source.as_deref(), source_commitment.as_deref(), "source")?;
            let (dest_ref, dest_vertex, dest_open) =
                endpoint(&graph, dest.as_deref(), dest_commitment.as_deref(), "dest")?;

            let path = padded_route(&graph, &source_vertex, &dest_vertex, length).map_err(
                |e| match e {
                    GraphError::PathTooLong { .. } | GraphError::UnreachableBoundary(..) => {
                        Failure::new(codes::NO_PATH, "no path within length bound")
                    }
                    GraphError::InsufficientLoops(..) => Failure::new(
                        codes::USAGE,
                        format!("{e} (certification padding too small for this length)"),
                    ),
                    other => Failure::new(codes::USAGE, other.to_string()),
                },
            )?;

            let statement = PathStatement::new(&pp, length, source_ref, dest_ref, &graph);
            let ctx = ProverContext {
                pp: &pp,
                signature: &signature,
                holder: &store.holder,
                graph: &graph,
                commitment: &commitment,
            };
            let proof = prove_connected(
                ctx,
                &path,
                &statement,
                source_open.as_ref().map(|c| &c.opening),
                dest_open.as_ref().map(|c| &c.opening),
                &mut rng,
            )
            .map_err(|e| Failure::new(codes::USAGE, e.to_string()))?;
            write(&out, &proof.to_bytes(), "proof file")?;
            println!("proof written: length={length}");
            Ok(())
        }
        Command::Verify {
            proof,
            params,
            peer_proof,
            peer_params,
        } => {
            let pp = load_params(&params)?;
            let proof_bytes = read(&proof, "proof file")?;
            let proof = ConnectionProof::from_bytes(&proof_bytes)
                .map_err(|e| Failure::new(codes::MALFORMED, format!("malformed proof: {e}")))?;
            match peer_proof {
                None => {
                    verify_connected(&pp, &proof).map_err(reject_failure)?;
                    println!("accept");
                }
                Some(peer_path) => {
                    let peer_pp = match peer_params {
                        Some(p) => load_params(&p)?,
                        None => pp.clone(),
                    };
                    let peer = ConnectionProof::from_bytes(&read(&peer_path, "peer proof")?)
                        .map_err(|e| {
                            Failure::new(codes::MALFORMED, format!("malformed peer proof: {e}"))
                        })?;
                    bind_shared_commitment(&pp, &peer_pp, &proof, &peer).map_err(|e| match e {
                        BindError::CommitmentMismatch | BindError::NotHidden => {
                            Failure::new(codes::BIND_MISMATCH, format!("bind: {e}"))
                        }
                        BindError::ProofFailure { reason, .. } => reject_failure(reason),
                    })?;
                    println!("accept (bound)");
                }
            }
            Ok(())
        }
        Command::Simulate {
            topology_a,
            topology_b,
            source,
            dest,
            transcript,
            adversary,
            n_max,
            l_max,
            seed,
        } => {
            let mut rng = seed.rng()?;
            let graph_a = load_graph(&topology_a)?;
            let graph_b = load_graph(&topology_b)?;
            let (pp_a, sk_a) =
                setup(n_max, l_max, &mut rng).map_err(|e| Failure::new(codes::USAGE, e.to_string()))?;
            let (pp_b, sk_b) = derive_auditor(&pp_a, &mut rng);

            let mut provider_a = Provider::new("provider-a", pp_a.clone(), graph_a, &mut rng);
            let mut provider_b = Provider::new("provider-b", pp_b.clone(), graph_b, &mut rng);
            let mut auditor_a = Auditor::new("auditor-a", pp_a.clone(), sk_a);
            let mut auditor_b = Auditor::new("auditor-b", pp_b.clone(), sk_b);
            let mut customer = Customer::new("customer", [pp_a, pp_b]);
            let mut fabric = Fabric::new();

            run_phase1(&mut fabric, &mut provider_a, &mut auditor_a, &mut rng)
                .map_err(|e| Failure::new(codes::USAGE, format!("provider A: {e}")))?;
            run_phase1(&mut fabric, &mut provider_b, &mut auditor_b, &mut rng)
                .map_err(|e| Failure::new(codes::USAGE, format!("provider B: {e}")))?;
            println!(
                "certified: l_a={} l_b={}",
                provider_a.padding_target().expect("certified"),
                provider_b.padding_target().expect("certified")
            );

            let record = run_phase2(
                &mut fabric,
                &provider_a,
                &provider_b,
                &mut customer,
                &VertexId::new(source),
                &VertexId::new(dest),
                adversary.unwrap_or_default(),
                &mut rng,
            )
            .map_err(|e| Failure::new(codes::CHANNEL_FAILURE, e.to_string()))?;

            if let Some(path) = transcript {
                write(
                    &path,
                    session_transcript_json(&record, &fabric).as_bytes(),
                    "session transcript",
                )?;
            }
            match &record.verdict {
                Verdict::Accept => {
                    println!("verdict: accept");
                    Ok(())
                }
                v => {
                    println!("verdict: {v:?}");
                    Err(Failure::new(verdict_code(v), format!("{v:?}")))
                }
            }
        }
    }
}

fn reject_failure(reason: RejectReason) -> Failure {
    match reason {
        RejectReason::Malformed(m) => Failure::new(codes::MALFORMED, format!("malformed: {m}")),
        other => Failure::new(codes::REJECTED, format!("reject: {other}")),
    }
}

fn verdict_code(v: &Verdict) -> u8 {
    match v {
        Verdict::Accept => codes::OK,
        Verdict::NoPath => codes::NO_PATH,
        Verdict::UnknownEndpoint => codes::UNKNOWN_ENDPOINT,
        Verdict::OpeningRejected => codes::OPENING_REJECTED,
        Verdict::ProofInvalid { .. } => codes::PROOF_INVALID,
        Verdict::CommitmentMismatch => codes::BIND_MISMATCH,
        Verdict::ChannelFailure(_) => codes::CHANNEL_FAILURE,
    }
}

/// Resolves one endpoint: a public name, or a hidden commitment whose
/// opening identifies the vertex.
fn endpoint(
    graph: &Multigraph,
    name: Option<&str>,
    commitment: Option<&FsPath>,
    side: &str,
) -> Result<(EndpointRef, VertexId, Option<CommittedEndpoint>), Failure> {
    match (name, commitment) {
        (Some(name), None) => {
            let v = VertexId::new(name);
            if !graph.has_vertex(&v) {
                return Err(Failure::new(
                    codes::USAGE,
                    format!("{side} vertex `{name}` not in the topology"),
                ));
            }
            Ok((EndpointRef::Public(v.to_scalar()), v, None))
        }
        (None, Some(path)) => {
            let committed = CommittedEndpoint::from_bytes(&read(path, "commitment file")?)
                .map_err(|e| Failure::new(codes::MALFORMED, e.to_string()))?;
            let vertex = graph
                .vertices()
                .map(|(v, _)| v)
                .find(|v| v.to_scalar() == committed.opening.id)
                .cloned()
                .ok_or_else(|| {
                    Failure::new(
                        codes::USAGE,
                        format!("{side} commitment does not open to any vertex of the topology"),
                    )
                })?;
            Ok((
                EndpointRef::Hidden(committed.commitment),
                vertex,
                Some(committed),
            ))
        }
        _ => Err(Failure::new(
            codes::USAGE,
            format!("exactly one of --{side} or --{side}-commitment is required"),
        )),
    }
}
