//! Shared fixtures for the benchmark targets.

use rand_chacha::ChaCha20Rng;

use topocert::clsdh::{issue_graph_signature, GraphSignature, HolderKey};
use topocert::commitments::{commit_graph, GraphCommitment};
use topocert::monipoly::{setup, IssuerSecret, PublicParameters};
use topocert::multigraph::{Multigraph, VertexId};
use topocert::pairing::seeded_rng;

pub struct Fixture {
    pub pp: PublicParameters,
    pub sk: IssuerSecret,
    pub graph: Multigraph,
    pub holder: HolderKey,
    pub commitment: GraphCommitment,
    pub signature: GraphSignature,
    pub padding: usize,
    pub source: VertexId,
    pub boundary: VertexId,
    pub rng: ChaCha20Rng,
}

/// Certified chain network of `n` vertices with the boundary at one end.
pub fn chain_fixture(n: usize, l_max: usize, seed: u64) -> Fixture {
    let mut rng = seeded_rng(seed);
    let (pp, sk) = setup(8, l_max, &mut rng).unwrap();
    let names: Vec<String> = (0..n).map(|i| format!("n{i:03}")).collect();
    let mut b = Multigraph::builder();
    for name in &names {
        b = b.vertex(name.as_str(), []);
    }
    for w in names.windows(2) {
        b = b.link(w[0].as_str(), w[1].as_str(), []);
    }
    let base = b.boundary([names[n - 1].as_str()]).build().unwrap();
    let padding = base.padding_target().unwrap();
    let graph = base.augment(padding).unwrap();
    let holder = HolderKey::generate(&pp, &mut rng);
    let commitment = commit_graph(&pp, &graph, &mut rng).unwrap();
    let signature = issue_graph_signature(&pp, &sk, &holder, &commitment, &graph, &mut rng).unwrap();
    Fixture {
        pp,
        sk,
        graph,
        holder,
        commitment,
        signature,
        padding,
        source: VertexId::new(&names[0]),
        boundary: VertexId::new(&names[n - 1]),
        rng,
    }
}
