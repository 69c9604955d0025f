//! Exact computations in universal tree-graded spaces.
//!
//! The crate builds the universal tree-graded space over a finite family of
//! exact piece models ([`pieces`]), with its metric and explicit geodesics
//! ([`universal`]), its pieces and closest-point projections ([`structure`]),
//! and the bilipschitz replacement of pieces ([`stretch`]). Separately,
//! [`verifier`] decides tree-gradedness of finite weighted graphs with a
//! candidate piece cover. All arithmetic is over exact rationals.

pub mod checks;
pub mod error;
pub mod pgeodesic;
pub mod pieces;
pub mod report;
pub mod sample;
pub mod scalar;
pub mod scene;
pub mod stretch;
pub mod structure;
pub mod universal;
pub mod verifier;

pub use error::{Error, Result};
pub use pgeodesic::{PGeodesic, PStep};
pub use pieces::{
    BilipschitzMap, Family, MapKind, Piece, PieceId, PieceKind, PiecePoint, TreeWord,
};
pub use scalar::Scalar;
pub use universal::{
    dist, dist_rewritten, realize_class, separation, Capacity, ExplicitGeodesic, Label, SepCase,
    SeparationData, UPoint, USegment,
};

/// Serializes with object keys sorted, so equal values give equal bytes.
pub fn to_canonical_json<T: serde::Serialize>(value: &T) -> String {
    let v = serde_json::to_value(value).expect("domain types serialize to JSON");
    serde_json::to_string(&v).expect("JSON values serialize")
}
