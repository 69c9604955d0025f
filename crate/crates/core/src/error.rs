use thiserror::Error;

use crate::pieces::PieceId;
use crate::scalar::Scalar;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("piece {0} is not part of the piece family")]
    UnknownPiece(PieceId),

    #[error("point shape does not match piece {piece}: {reason}")]
    ShapeMismatch { piece: PieceId, reason: String },

    #[error("parameter {value} outside [0, {max}]")]
    OutOfRange {
        value: Box<Scalar>,
        max: Box<Scalar>,
    },

    #[error("cut point {0} lies in the interior of a step")]
    InteriorCut(Scalar),

    #[error("a segment valued at the piece basepoint has zero length")]
    BasepointSegment,

    #[error("invalid element: condition ({condition}) violated at segment {segment}: {reason}")]
    InvalidElement {
        condition: u8,
        segment: usize,
        reason: String,
    },

    #[error("P-geodesic is empty")]
    EmptyGeodesic,

    #[error("P-geodesic is not admissible: steps {0} and {1} are both in tree pieces")]
    Inadmissible(usize, usize),

    #[error("labels must be pairwise distinct, {0} repeats")]
    DuplicateLabel(u64),

    #[error("point is not a member of the piece")]
    NotMember,

    #[error("invalid piece family: {0}")]
    BadFamily(String),

    #[error("invalid stretch context: {0}")]
    BadStretch(String),

    #[error("invalid graph: {0}")]
    BadGraph(String),

    #[error("invalid piece cover: {0}")]
    BadCover(String),

    #[error("more than {cap} geodesics between {from} and {to}")]
    CapExceeded { cap: usize, from: usize, to: usize },

    #[error("{0}")]
    Precondition(String),
}

impl Error {
    pub fn out_of_range(value: Scalar, max: Scalar) -> Self {
        Error::OutOfRange {
            value: Box::new(value),
            max: Box::new(max),
        }
    }
}
