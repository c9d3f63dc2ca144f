//! Bilinear pairing backend and scalar-field utilities.
//!
//! Everything curve-specific lives behind this module: the rest of the crate
//! works with the `G1`/`G2`/`Gt`/`Scalar` aliases and the helpers below, so
//! swapping the curve means editing this file only. The current backend is
//! BLS12-381 (type-3 pairing, ~128-bit security).
//!
//! Byte encodings are the backend's canonical compressed forms: 48 bytes for
//! G1, 96 for G2, 576 for Gt, and 32 little-endian bytes for scalars. File
//! formats embed these behind versioned headers (see [`crate::wire`]).

use ark_bls12_381::{Bls12_381, Fr, G1Projective, G2Projective};
use ark_ec::pairing::{Pairing as ArkPairing, PairingOutput};
use ark_ec::PrimeGroup;
use ark_ff::{AdditiveGroup, PrimeField};
use ark_serialize::{CanonicalDeserialize, CanonicalSerialize};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use sha2::{Digest, Sha512};

/// Scalar field element, canonically represented in `[0, p)`.
pub type Scalar = Fr;
/// First source group of the pairing.
pub type G1 = G1Projective;
/// Second source group of the pairing.
pub type G2 = G2Projective;
/// Target group of the pairing.
pub type Gt = PairingOutput<Bls12_381>;

/// Generator of G1.
pub fn g1_generator() -> G1 {
    G1Projective::generator()
}

/// Generator of G2.
pub fn g2_generator() -> G2 {
    G2Projective::generator()
}

/// The pairing map e: G1 x G2 -> Gt.
pub fn pairing(a: &G1, b: &G2) -> Gt {
    Bls12_381::pairing(*a, *b)
}

/// Product of pairings over the given pairs, using a shared Miller loop.
///
/// Identity elements are permitted and contribute the identity factor.
/// Returns the Gt identity for an empty list.
pub fn pairing_product(pairs: &[(G1, G2)]) -> Gt {
    let lhs: Vec<G1> = pairs.iter().map(|(a, _)| *a).collect();
    let rhs: Vec<G2> = pairs.iter().map(|(_, b)| *b).collect();
    Bls12_381::multi_pairing(lhs, rhs)
}

/// Hashes a domain-separated payload into the scalar field.
///
/// Deterministic; distinct tags yield independent functions. The tag must be
/// non-empty so that tag/payload boundaries cannot be confused.
pub fn hash_to_scalar(domain_tag: &[u8], payload: &[u8]) -> Scalar {
    assert!(!domain_tag.is_empty(), "domain tag must be non-empty");
    let mut hasher = Sha512::new();
    hasher.update((domain_tag.len() as u64).to_le_bytes());
    hasher.update(domain_tag);
    hasher.update(payload);
    Scalar::from_le_bytes_mod_order(&hasher.finalize())
}

/// Samples a uniform nonzero scalar.
pub fn random_nonzero<R: RngCore>(rng: &mut R) -> Scalar {
    loop {
        let s = random_scalar(rng);
        if s != Scalar::ZERO {
            return s;
        }
    }
}

/// Samples a uniform scalar.
pub fn random_scalar<R: RngCore>(rng: &mut R) -> Scalar {
    let mut wide = [0u8; 64];
    rng.fill_bytes(&mut wide);
    Scalar::from_le_bytes_mod_order(&wide)
}

/// Deterministic RNG for tests and `--insecure-test-mode` runs.
///
/// Production paths must use an OS CSPRNG; seeded randomness makes every
/// commitment and proof reproducible and therefore linkable.
pub fn seeded_rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

/// OS-backed CSPRNG for production use.
pub fn os_rng() -> ChaCha20Rng {
    ChaCha20Rng::from_entropy()
}

macro_rules! encode_fns {
    ($to:ident, $from:ident, $ty:ty, $len:expr) => {
        #[doc = concat!("Canonical compressed encoding (", stringify!($len), " bytes).")]
        pub fn $to(v: &$ty) -> Vec<u8> {
            let mut buf = Vec::with_capacity($len);
            v.serialize_compressed(&mut buf)
                .expect("serialization into Vec cannot fail");
            buf
        }

        /// Decodes the canonical compressed encoding, validating the element.
        pub fn $from(bytes: &[u8]) -> Result<$ty, PointDecodeError> {
            <$ty>::deserialize_compressed(bytes).map_err(|_| PointDecodeError {
                group: stringify!($ty),
            })
        }
    };
}

encode_fns!(g1_to_bytes, g1_from_bytes, G1, 48);
encode_fns!(g2_to_bytes, g2_from_bytes, G2, 96);
encode_fns!(gt_to_bytes, gt_from_bytes, Gt, 576);
encode_fns!(scalar_to_bytes, scalar_from_bytes, Scalar, 32);

/// A point or scalar failed to decode as a canonical group element.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid {group} encoding")]
pub struct PointDecodeError {
    group: &'static str,
}
