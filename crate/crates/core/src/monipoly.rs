//! Monic-polynomial set encoding, trusted-setup parameters, and the
//! per-element multigraph encodings built on them.
//!
//! A message multiset `{m_1..m_k}` becomes the coefficient vector of the
//! monic polynomial `prod (Z + m_i)`; those coefficients are placed in the
//! exponents of a structured base family, so the encoding of a set equals a
//! single base raised to the polynomial evaluated at the setup trapdoor.
//! Each graph element (vertex or edge instance) gets its own base family to
//! keep the aggregate encoding well-formed.

use std::collections::BTreeSet;

use ark_ff::{AdditiveGroup, Field};
use rand::RngCore;
use sha2::{Digest, Sha256};

use crate::multigraph::{counter_scalar, EdgeRef, Label, Multigraph, VertexId};
use crate::pairing::{
    g1_generator, g2_generator, hash_to_scalar, pairing, random_nonzero, scalar_to_bytes, Scalar,
    G1, G2,
};
use crate::wire::{Reader, WireError, Writer, MAGIC_ISSUER_SECRET, MAGIC_PARAMS};

/// Signing secret, held by one auditor only.
///
/// Never serialized outside the auditor keystore; test builds may use the
/// trapdoor for exponent-side oracles.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IssuerSecret {
    /// Signature secret: the issuer public key is `g2^x`.
    pub x: Scalar,
    /// Encoding trapdoor behind the base families. Held only by the party
    /// that ran the base ceremony; auditors derived onto an existing
    /// parameter set sign without it.
    pub x_prime: Option<Scalar>,
}

/// Public parameters of one auditor: structured base families in both source
/// groups plus the signature bases and the issuer public key.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PublicParameters {
    /// Maximum message-set size; coefficient vectors have `n_max + 1` entries.
    pub n_max: usize,
    /// Maximum graph dimension `n + m`; base families are indexed `0..=l_max`.
    pub l_max: usize,
    /// `g1_bases[slot][k]`: G1 base of family `slot`, trapdoor power `k`.
    pub g1_bases: Vec<Vec<G1>>,
    /// Mirrored G2 families.
    pub g2_bases: Vec<Vec<G2>>,
    /// Signature randomizer base.
    pub b: G1,
    /// Signature offset base.
    pub c: G1,
    /// Holder-key base.
    pub h: G1,
    /// Blinding base for endpoint commitments (G2, paired against the
    /// structured families).
    pub f: G2,
    /// Issuer public key `g2^x`.
    pub issuer_pub: G2,
    digest: [u8; 32],
}

/// Errors from encoding and setup input validation.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EncodingError {
    #[error("message set must be non-empty")]
    EmptySet,
    #[error("message set of size {size} exceeds n_max {max}")]
    SetTooLarge { size: usize, max: usize },
    #[error("base family {slot} out of range (l_max {max})")]
    SlotOutOfRange { slot: usize, max: usize },
    #[error("graph has {count} vertices, capacity {max}")]
    TooManyVertices { count: usize, max: usize },
    #[error("graph has {count} edge instances, capacity {max}")]
    TooManyEdges { count: usize, max: usize },
    #[error("n_max must be at least 4, got {0}")]
    NMaxTooSmall(usize),
    #[error("l_max must be at least 1, got {0}")]
    LMaxTooSmall(usize),
    #[error("counter is only valid on a loop edge")]
    CounterOnLink,
    #[error("loop edge requires a counter")]
    MissingCounter,
}

/// Coefficients of `prod (Z + m)` over the multiset; `[1]` for the empty set.
pub(crate) fn poly_coeffs(messages: &[Scalar]) -> Vec<Scalar> {
    let mut coeffs = vec![Scalar::ONE];
    for m in messages {
        // Multiply by (Z + m) in place.
        coeffs.push(Scalar::ZERO);
        for k in (0..coeffs.len() - 1).rev() {
            let c = coeffs[k];
            coeffs[k + 1] += c;
            coeffs[k] = c * m;
        }
    }
    coeffs
}

/// Encodes a non-empty message multiset as monic polynomial coefficients,
/// constant term first. The output has `|messages| + 1` entries and a leading
/// coefficient of one.
pub fn mp_encode(messages: &[Scalar]) -> Result<Vec<Scalar>, EncodingError> {
    if messages.is_empty() {
        return Err(EncodingError::EmptySet);
    }
    Ok(poly_coeffs(messages))
}

/// Runs the base ceremony and keys the first auditor.
///
/// Family 0 is the plain generator family (`g1`, `g2` at power 0); families
/// `1..=l_max` are derived from the trapdoor and the family index so that a
/// fixed secret reproduces the same parameters.
///
/// Further auditors in the same deployment must share these bases, since a
/// commitment to a boundary node only carries across two providers' proofs
/// when both parameter sets agree on the commitment bases; they are keyed
/// with [`derive_auditor`].
pub fn setup<R: RngCore>(
    n_max: usize,
    l_max: usize,
    rng: &mut R,
) -> Result<(PublicParameters, IssuerSecret), EncodingError> {
    if n_max < 4 {
        return Err(EncodingError::NMaxTooSmall(n_max));
    }
    if l_max < 1 {
        return Err(EncodingError::LMaxTooSmall(l_max));
    }
    let x_prime = random_nonzero(rng);
    let secret = IssuerSecret {
        x: random_nonzero(rng),
        x_prime: Some(x_prime),
    };
    let g1 = g1_generator();
    let g2 = g2_generator();

    let mut g1_bases = Vec::with_capacity(l_max + 1);
    let mut g2_bases = Vec::with_capacity(l_max + 1);
    for slot in 0..=l_max {
        let y = family_exponent(&x_prime, slot);
        let mut row1 = Vec::with_capacity(n_max + 1);
        let mut row2 = Vec::with_capacity(n_max + 1);
        let mut e = y;
        for _ in 0..=n_max {
            row1.push(g1 * e);
            row2.push(g2 * e);
            e *= x_prime;
        }
        g1_bases.push(row1);
        g2_bases.push(row2);
    }

    let pp = PublicParameters::assemble(
        n_max,
        l_max,
        g1_bases,
        g2_bases,
        g1 * random_nonzero(rng),
        g1 * random_nonzero(rng),
        g1 * random_nonzero(rng),
        g2 * random_nonzero(rng),
        g2 * secret.x,
    );
    Ok((pp, secret))
}

/// Keys a new auditor onto an existing parameter set.
///
/// The returned parameters share every base with `base` and differ only in
/// the issuer public key, so endpoint commitments interoperate across the
/// two auditors' proofs. The new secret carries no encoding trapdoor.
pub fn derive_auditor<R: RngCore>(
    base: &PublicParameters,
    rng: &mut R,
) -> (PublicParameters, IssuerSecret) {
    let secret = IssuerSecret {
        x: random_nonzero(rng),
        x_prime: None,
    };
    let pp = PublicParameters::assemble(
        base.n_max,
        base.l_max,
        base.g1_bases.clone(),
        base.g2_bases.clone(),
        base.b,
        base.c,
        base.h,
        base.f,
        g2_generator() * secret.x,
    );
    (pp, secret)
}

/// Per-family scalar: 1 for family 0, otherwise derived from the trapdoor
/// and the index.
fn family_exponent(x_prime: &Scalar, slot: usize) -> Scalar {
    if slot == 0 {
        return Scalar::ONE;
    }
    let mut payload = scalar_to_bytes(x_prime);
    payload.extend_from_slice(&(slot as u64).to_le_bytes());
    let y = hash_to_scalar(b"base-family", &payload);
    if y == Scalar::ZERO {
        Scalar::ONE
    } else {
        y
    }
}

impl PublicParameters {
    #[allow(clippy::too_many_arguments)]
    fn assemble(
        n_max: usize,
        l_max: usize,
        g1_bases: Vec<Vec<G1>>,
        g2_bases: Vec<Vec<G2>>,
        b: G1,
        c: G1,
        h: G1,
        f: G2,
        issuer_pub: G2,
    ) -> Self {
        let mut pp = PublicParameters {
            n_max,
            l_max,
            g1_bases,
            g2_bases,
            b,
            c,
            h,
            f,
            issuer_pub,
            digest: [0; 32],
        };
        pp.digest = Sha256::digest(pp.to_bytes()).into();
        pp
    }

    /// Digest of the canonical parameter file; proofs and statements bind to
    /// this value.
    pub fn digest(&self) -> [u8; 32] {
        self.digest
    }

    /// Base families reserved for vertices; edge families start right after.
    ///
    /// Splitting the family space keeps an element's family independent of
    /// how many elements of the other kind exist, so extending a graph never
    /// reassigns existing factors.
    pub fn vertex_slot_capacity(&self) -> usize {
        self.l_max / 2
    }

    /// Capacity left for edge instances.
    pub fn edge_slot_capacity(&self) -> usize {
        self.l_max - self.l_max / 2
    }

    /// Identifier of the auditor behind these parameters.
    pub fn auditor_key_id(&self) -> [u8; 32] {
        Sha256::digest(crate::pairing::g2_to_bytes(&self.issuer_pub)).into()
    }

    /// Full pairing-consistency check of the family-0 chain plus the
    /// mirrored structure of every family: `e(a_{i_k}, X_{0_0}) =
    /// e(a_{i_0}, X_{0_k})` and the chained `e(a_{0_{k+1}}, X_{0_0}) =
    /// e(a_{0_k}, X_{0_1})`.
    ///
    /// Cost grows with `l_max * n_max`; see [`Self::spot_check`] for the
    /// cheaper load-time variant.
    pub fn consistency_check(&self) -> bool {
        for k in 0..self.n_max {
            if pairing(&self.g1_bases[0][k + 1], &self.g2_bases[0][0])
                != pairing(&self.g1_bases[0][k], &self.g2_bases[0][1])
            {
                return false;
            }
        }
        for slot in 0..=self.l_max {
            if !self.check_family(slot) {
                return false;
            }
        }
        true
    }

    /// Family-0 chain plus a bounded sample of other families.
    pub fn spot_check(&self, samples: usize) -> bool {
        for k in 0..self.n_max {
            if pairing(&self.g1_bases[0][k + 1], &self.g2_bases[0][0])
                != pairing(&self.g1_bases[0][k], &self.g2_bases[0][1])
            {
                return false;
            }
        }
        let step = (self.l_max / samples.max(1)).max(1);
        (1..=self.l_max).step_by(step).all(|slot| self.check_family(slot))
    }

    fn check_family(&self, slot: usize) -> bool {
        let x00 = &self.g2_bases[0][0];
        for k in 0..=self.n_max {
            if pairing(&self.g1_bases[slot][k], x00)
                != pairing(&self.g1_bases[slot][0], &self.g2_bases[0][k])
            {
                return false;
            }
            if pairing(&g1_generator(), &self.g2_bases[slot][k])
                != pairing(&self.g1_bases[slot][k], &g2_generator())
            {
                return false;
            }
        }
        true
    }

    /// Versioned binary parameter file.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::with_header(MAGIC_PARAMS);
        w.put_u8(1); // curve id: BLS12-381
        w.put_u32(self.n_max as u32);
        w.put_u32(self.l_max as u32);
        w.put_g1(&self.b);
        w.put_g1(&self.c);
        w.put_g1(&self.h);
        w.put_g2(&self.f);
        w.put_g2(&self.issuer_pub);
        for row in &self.g1_bases {
            for p in row {
                w.put_g1(p);
            }
        }
        for row in &self.g2_bases {
            for p in row {
                w.put_g2(p);
            }
        }
        w.into_bytes()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, WireError> {
        let mut r = Reader::expect_header(bytes, MAGIC_PARAMS)?;
        let curve = r.get_u8()?;
        if curve != 1 {
            return Err(WireError::Invalid(format!("unknown curve id {curve}")));
        }
        let n_max = r.get_u32()? as usize;
        let l_max = r.get_u32()? as usize;
        if n_max < 4 || l_max < 1 || n_max > 64 || l_max > 1 << 20 {
            return Err(WireError::Invalid("parameter bounds out of range".into()));
        }
        let b = r.get_g1()?;
        let c = r.get_g1()?;
        let h = r.get_g1()?;
        let f = r.get_g2()?;
        let issuer_pub = r.get_g2()?;
        let mut g1_bases = Vec::with_capacity(l_max + 1);
        for _ in 0..=l_max {
            let mut row = Vec::with_capacity(n_max + 1);
            for _ in 0..=n_max {
                row.push(r.get_g1()?);
            }
            g1_bases.push(row);
        }
        let mut g2_bases = Vec::with_capacity(l_max + 1);
        for _ in 0..=l_max {
            let mut row = Vec::with_capacity(n_max + 1);
            for _ in 0..=n_max {
                row.push(r.get_g2()?);
            }
            g2_bases.push(row);
        }
        r.finish()?;
        Ok(Self::assemble(n_max, l_max, g1_bases, g2_bases, b, c, h, f, issuer_pub))
    }
}

impl IssuerSecret {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::with_header(MAGIC_ISSUER_SECRET);
        w.put_scalar(&self.x);
        match &self.x_prime {
            Some(xp) => {
                w.put_u8(1);
                w.put_scalar(xp);
            }
            None => w.put_u8(0),
        }
        w.into_bytes()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, WireError> {
        let mut r = Reader::expect_header(bytes, MAGIC_ISSUER_SECRET)?;
        let x = r.get_scalar()?;
        let x_prime = match r.get_u8()? {
            0 => None,
            1 => Some(r.get_scalar()?),
            tag => return Err(WireError::Invalid(format!("bad trapdoor tag {tag}"))),
        };
        r.finish()?;
        Ok(IssuerSecret { x, x_prime })
    }
}

/// Raises family `slot` to a prepared coefficient vector.
pub(crate) fn encode_poly(
    pp: &PublicParameters,
    slot: usize,
    coeffs: &[Scalar],
) -> Result<G1, EncodingError> {
    if slot > pp.l_max {
        return Err(EncodingError::SlotOutOfRange {
            slot,
            max: pp.l_max,
        });
    }
    if coeffs.len() > pp.n_max + 1 {
        return Err(EncodingError::SetTooLarge {
            size: coeffs.len() - 1,
            max: pp.n_max,
        });
    }
    let mut acc = G1::default();
    for (k, m) in coeffs.iter().enumerate() {
        acc += pp.g1_bases[slot][k] * m;
    }
    Ok(acc)
}

/// Encodes a message multiset on base family `slot`.
pub fn encode_set(
    pp: &PublicParameters,
    slot: usize,
    messages: &[Scalar],
) -> Result<G1, EncodingError> {
    if messages.len() > pp.n_max {
        return Err(EncodingError::SetTooLarge {
            size: messages.len(),
            max: pp.n_max,
        });
    }
    encode_poly(pp, slot, &mp_encode(messages)?)
}

/// Vertex encoding: the message set is the vertex identifier plus its labels.
pub fn encode_vertex(
    pp: &PublicParameters,
    slot: usize,
    id: &VertexId,
    labels: &BTreeSet<Label>,
) -> Result<G1, EncodingError> {
    encode_set(pp, slot, &vertex_messages(id, labels))
}

/// Edge encoding: both endpoint identifiers, the labels, and for loops the
/// distinguishing counter.
pub fn encode_edge(
    pp: &PublicParameters,
    slot: usize,
    u: &VertexId,
    v: &VertexId,
    labels: &BTreeSet<Label>,
    counter: Option<u32>,
) -> Result<G1, EncodingError> {
    match counter {
        Some(_) if u != v => return Err(EncodingError::CounterOnLink),
        None if u == v => return Err(EncodingError::MissingCounter),
        _ => {}
    }
    encode_set(pp, slot, &edge_messages(u, v, labels, counter))
}

pub(crate) fn vertex_messages(id: &VertexId, labels: &BTreeSet<Label>) -> Vec<Scalar> {
    let mut msgs = vec![id.to_scalar()];
    msgs.extend(labels.iter().map(Label::to_scalar));
    msgs
}

pub(crate) fn edge_messages(
    u: &VertexId,
    v: &VertexId,
    labels: &BTreeSet<Label>,
    counter: Option<u32>,
) -> Vec<Scalar> {
    let mut msgs = vec![u.to_scalar(), v.to_scalar()];
    msgs.extend(labels.iter().map(Label::to_scalar));
    if let Some(c) = counter {
        msgs.push(counter_scalar(c));
    }
    msgs
}

/// A vertex or edge instance, as enumerated for encoding.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum ElementKey {
    Vertex(VertexId),
    Edge(EdgeRef),
}

impl std::fmt::Display for ElementKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ElementKey::Vertex(v) => write!(f, "vertex {v}"),
            ElementKey::Edge(e) => write!(f, "edge {e}"),
        }
    }
}

impl ElementKey {
    pub(crate) fn write(&self, w: &mut Writer) {
        match self {
            ElementKey::Vertex(v) => {
                w.put_u8(0);
                w.put_str(v.as_str());
            }
            ElementKey::Edge(EdgeRef::Link(u, v)) => {
                w.put_u8(1);
                w.put_str(u.as_str());
                w.put_str(v.as_str());
            }
            ElementKey::Edge(EdgeRef::Loop(v, c)) => {
                w.put_u8(2);
                w.put_str(v.as_str());
                w.put_u32(*c);
            }
        }
    }

    pub(crate) fn read(r: &mut Reader<'_>) -> Result<Self, WireError> {
        Ok(match r.get_u8()? {
            0 => ElementKey::Vertex(VertexId::new(r.get_str()?)),
            1 => ElementKey::Edge(EdgeRef::Link(
                VertexId::new(r.get_str()?),
                VertexId::new(r.get_str()?),
            )),
            2 => ElementKey::Edge(EdgeRef::Loop(VertexId::new(r.get_str()?), r.get_u32()?)),
            tag => return Err(WireError::Invalid(format!("unknown element tag {tag}"))),
        })
    }
}

/// One graph element bound to its base family and message multiset.
#[derive(Debug, Clone)]
pub struct GraphElement {
    pub key: ElementKey,
    /// Base family index (1-based; family 0 is reserved for set signatures).
    pub slot: usize,
    /// Full message multiset of the element.
    pub messages: Vec<Scalar>,
    /// Identifier factor supplied through the proof randomizers when this
    /// element appears outside the path.
    pub pivot: Scalar,
    /// Messages kept inside the prover witness when the element appears
    /// outside the path: everything except one `pivot` factor.
    pub kept_off_path: Vec<Scalar>,
    /// Messages kept when an edge appears as a path step: everything except
    /// both endpoint identifier factors. `None` for vertices.
    pub kept_on_path: Option<Vec<Scalar>>,
}

/// Enumerates the graph canonically (vertices, then links, then loops) and
/// assigns base families: vertices from slot 1, edge instances from slot
/// `vertex_slot_capacity + 1`.
pub fn graph_elements(
    pp: &PublicParameters,
    g: &Multigraph,
) -> Result<Vec<GraphElement>, EncodingError> {
    if g.vertex_count() > pp.vertex_slot_capacity() {
        return Err(EncodingError::TooManyVertices {
            count: g.vertex_count(),
            max: pp.vertex_slot_capacity(),
        });
    }
    if g.edge_count() > pp.edge_slot_capacity() {
        return Err(EncodingError::TooManyEdges {
            count: g.edge_count(),
            max: pp.edge_slot_capacity(),
        });
    }
    let mut out = Vec::with_capacity(g.dimension());
    let mut slot = 0usize;
    for (v, labels) in g.vertices() {
        slot += 1;
        let id = v.to_scalar();
        let kept: Vec<Scalar> = labels.iter().map(Label::to_scalar).collect();
        out.push(GraphElement {
            key: ElementKey::Vertex(v.clone()),
            slot,
            messages: vertex_messages(v, labels),
            pivot: id,
            kept_off_path: kept,
            kept_on_path: None,
        });
    }
    slot = pp.vertex_slot_capacity();
    for ((u, v), labels) in g.links() {
        slot += 1;
        let label_scalars: Vec<Scalar> = labels.iter().map(Label::to_scalar).collect();
        let mut kept_off = vec![v.to_scalar()];
        kept_off.extend(label_scalars.iter().copied());
        out.push(GraphElement {
            key: ElementKey::Edge(EdgeRef::Link(u.clone(), v.clone())),
            slot,
            messages: edge_messages(u, v, labels, None),
            pivot: u.to_scalar(),
            kept_off_path: kept_off,
            kept_on_path: Some(label_scalars),
        });
    }
    for (v, l) in g.loops() {
        slot += 1;
        let mut kept_on: Vec<Scalar> = l.labels.iter().map(Label::to_scalar).collect();
        kept_on.push(counter_scalar(l.counter));
        let mut kept_off = vec![v.to_scalar()];
        kept_off.extend(kept_on.iter().copied());
        out.push(GraphElement {
            key: ElementKey::Edge(EdgeRef::Loop(v.clone(), l.counter)),
            slot,
            messages: edge_messages(v, v, &l.labels, Some(l.counter)),
            pivot: v.to_scalar(),
            kept_off_path: kept_off,
            kept_on_path: Some(kept_on),
        });
    }
    for el in &out {
        if el.messages.len() > pp.n_max {
            return Err(EncodingError::SetTooLarge {
                size: el.messages.len(),
                max: pp.n_max,
            });
        }
    }
    Ok(out)
}

impl GraphElement {
    /// Full encoding of the element on its own family.
    pub fn encode(&self, pp: &PublicParameters) -> Result<G1, EncodingError> {
        encode_set(pp, self.slot, &self.messages)
    }
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::pairing::seeded_rng;
    use ark_ff::UniformRand;
    use rand::Rng;

    fn small_setup(seed: u64) -> (PublicParameters, IssuerSecret) {
        let mut rng = seeded_rng(seed);
        setup(8, 6, &mut rng).unwrap()
    }

    #[test]
    fn mp_encode_examples() {
        let m = Scalar::from(7u64);
        assert_eq!(mp_encode(&[m]).unwrap(), vec![m, Scalar::ONE]);
        // {2, 3} -> 6 + 5Z + Z^2
        assert_eq!(
            mp_encode(&[Scalar::from(2u64), Scalar::from(3u64)]).unwrap(),
            vec![Scalar::from(6u64), Scalar::from(5u64), Scalar::ONE]
        );
        assert_eq!(mp_encode(&[]), Err(EncodingError::EmptySet));
    }

    #[test]
    fn mp_encode_matches_evaluation_oracle() {
        let mut rng = seeded_rng(11);
        for _ in 0..50 {
            let set: Vec<Scalar> = (0..6).map(|_| Scalar::rand(&mut rng)).collect();
            let coeffs = mp_encode(&set).unwrap();
            assert_eq!(coeffs.len(), set.len() + 1);
            assert_eq!(*coeffs.last().unwrap(), Scalar::ONE, "monic");
            for _ in 0..20 {
                let z = Scalar::rand(&mut rng);
                let direct: Scalar = set.iter().map(|m| z + m).product();
                let horner = coeffs.iter().rev().fold(Scalar::ZERO, |acc, c| acc * z + c);
                assert_eq!(direct, horner);
            }
        }
    }

    #[test]
    fn mp_encode_handles_repeated_messages() {
        // (Z + m)^2 = m^2 + 2mZ + Z^2
        let m = Scalar::from(5u64);
        assert_eq!(
            mp_encode(&[m, m]).unwrap(),
            vec![m * m, m + m, Scalar::ONE]
        );
    }

    #[test]
    fn setup_pairing_consistency() {
        let (pp, _) = small_setup(21);
        assert!(pp.consistency_check());
        assert!(pp.spot_check(3));
        // e(a_{0_1}, X_{0_0}) = e(a_{0_0}, X_{0_1}) and power 2 variant.
        assert_eq!(
            pairing(&pp.g1_bases[0][1], &pp.g2_bases[0][0]),
            pairing(&pp.g1_bases[0][0], &pp.g2_bases[0][1])
        );
        assert_eq!(
            pairing(&pp.g1_bases[0][2], &pp.g2_bases[0][0]),
            pairing(&pp.g1_bases[0][0], &pp.g2_bases[0][2])
        );
    }

    #[test]
    fn setup_is_reproducible_and_validates_bounds() {
        let a = setup(8, 4, &mut seeded_rng(5)).unwrap();
        let b = setup(8, 4, &mut seeded_rng(5)).unwrap();
        assert_eq!(a.0.to_bytes(), b.0.to_bytes());
        assert_eq!(a.1, b.1);
        assert!(matches!(
            setup(2, 4, &mut seeded_rng(5)),
            Err(EncodingError::NMaxTooSmall(2))
        ));
        assert!(matches!(
            setup(4, 0, &mut seeded_rng(5)),
            Err(EncodingError::LMaxTooSmall(0))
        ));
    }

    #[test]
    fn params_serialization_round_trip() {
        let (pp, _) = small_setup(31);
        let bytes = pp.to_bytes();
        let back = PublicParameters::from_bytes(&bytes).unwrap();
        assert_eq!(pp, back);
        assert_eq!(pp.digest(), back.digest());
        let truncated = &bytes[..bytes.len() - 5];
        assert!(PublicParameters::from_bytes(truncated).is_err());
    }

    #[test]
    fn issuer_secret_round_trip() {
        let (_, sk) = small_setup(32);
        assert_eq!(IssuerSecret::from_bytes(&sk.to_bytes()).unwrap(), sk);
    }

    #[test]
    fn encodings_match_trapdoor_oracle() {
        let (pp, sk) = small_setup(41);
        let mut rng = seeded_rng(42);
        for slot in [0usize, 1, 3, 6] {
            let size = rng.gen_range(1..=5usize);
            let set: Vec<Scalar> = (0..size).map(|_| Scalar::rand(&mut rng)).collect();
            assert_eq!(
                encode_set(&pp, slot, &set).unwrap(),
                test_support::encode_via_trapdoor(&pp, &sk, slot, &set)
            );
        }
    }

    #[test]
    fn unlabeled_vertex_encoding_shape() {
        let (pp, _) = small_setup(43);
        let v = VertexId::from("A");
        let enc = encode_vertex(&pp, 1, &v, &BTreeSet::new()).unwrap();
        // {id} -> a_{1_0}^id * a_{1_1}
        assert_eq!(enc, pp.g1_bases[1][0] * v.to_scalar() + pp.g1_bases[1][1]);
    }

    #[test]
    fn encodings_distinguish_ids_labels_and_counters() {
        let (pp, _) = small_setup(44);
        let labels: BTreeSet<Label> = [Label::from("qkd")].into();
        let a = encode_vertex(&pp, 1, &"A".into(), &labels).unwrap();
        let b = encode_vertex(&pp, 1, &"B".into(), &labels).unwrap();
        assert_ne!(a, b);

        // Loops with identical labels but different counters stay distinct.
        let v: VertexId = "N".into();
        let l1 = encode_edge(&pp, 2, &v, &v, &labels, Some(1)).unwrap();
        let l2 = encode_edge(&pp, 2, &v, &v, &labels, Some(2)).unwrap();
        assert_ne!(l1, l2);

        // Unordered endpoints encode identically.
        let (u, w): (VertexId, VertexId) = ("U".into(), "W".into());
        assert_eq!(
            encode_edge(&pp, 2, &u, &w, &labels, None).unwrap(),
            encode_edge(&pp, 2, &w, &u, &labels, None).unwrap()
        );

        assert!(matches!(
            encode_edge(&pp, 2, &u, &w, &labels, Some(1)),
            Err(EncodingError::CounterOnLink)
        ));
        assert!(matches!(
            encode_edge(&pp, 2, &v, &v, &labels, None),
            Err(EncodingError::MissingCounter)
        ));
    }

    #[test]
    fn encoding_collision_scan_over_random_graphs() {
        use std::collections::HashSet;
        let (pp, _) = small_setup(45);
        let mut rng = seeded_rng(46);
        let mut seen = HashSet::new();
        // Distinct well-formed message sets on a fixed slot must encode
        // distinctly (injectivity smoke test).
        for _ in 0..1000 {
            let size = rng.gen_range(1..=4usize);
            let set: Vec<Scalar> = (0..size).map(|_| Scalar::rand(&mut rng)).collect();
            let enc = encode_set(&pp, 1, &set).unwrap();
            assert!(seen.insert(crate::pairing::g1_to_bytes(&enc)));
        }
    }

    #[test]
    fn graph_elements_enumeration_and_bounds() {
        let (pp, _) = small_setup(47);
        let g = Multigraph::builder()
            .vertex("A", [Label::from("x")])
            .vertex("B", [])
            .link("A", "B", [Label::from("e")])
            .loop_at("B", [])
            .loop_at("B", [])
            .boundary(["B"])
            .build()
            .unwrap();
        let els = graph_elements(&pp, &g).unwrap();
        assert_eq!(els.len(), g.dimension());
        // Vertices fill slots from 1; edges start after the vertex capacity.
        let vcap = pp.vertex_slot_capacity();
        assert_eq!(
            els.iter().map(|e| e.slot).collect::<Vec<_>>(),
            vec![1, 2, vcap + 1, vcap + 2, vcap + 3]
        );
        // Vertex kept set drops the id; link kept set keeps the second
        // endpoint; loop path-kept set keeps labels + counter.
        assert_eq!(els[0].kept_off_path.len(), 1);
        assert!(els[0].kept_on_path.is_none());
        let link = &els[2];
        assert_eq!(link.messages.len(), 3);
        assert_eq!(link.kept_off_path.len(), 2);
        assert_eq!(link.kept_on_path.as_ref().unwrap().len(), 1);
        let lp = &els[3];
        assert_eq!(lp.messages.len(), 3);
        assert_eq!(lp.kept_on_path.as_ref().unwrap().len(), 1);

        let tiny = setup(4, 2, &mut seeded_rng(48)).unwrap().0;
        assert!(matches!(
            graph_elements(&tiny, &g),
            Err(EncodingError::TooManyVertices { .. })
        ));
    }
}
