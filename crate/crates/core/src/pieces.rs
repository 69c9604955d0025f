//! Piece spaces: the pointed homogeneous geodesic spaces a universal
//! tree-graded space is glued from.
//!
//! Three exact models are provided:
//!
//! * `Line`, the real line with basepoint `0`;
//! * `L1 { dim }`, rational coordinates with the taxicab metric;
//! * `Tree`, the homogeneous real tree with countable branching, modeled as
//!   reduced words over signed branch ids with positive rational lengths.
//!
//! Each piece carries a fixed chosen geodesic between any two points and a
//! fixed recentering isometry taking any point to the basepoint.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub type PieceId = u32;

/// One letter of a tree word: travel `len` along branch `branch`. The
/// inverse direction of branch `b` is `-b`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub branch: i64,
    pub len: Scalar,
}

impl Letter {
    pub fn new(branch: i64, len: Scalar) -> Self {
        Letter { branch, len }
    }

    fn inverse(&self) -> Letter {
        Letter::new(-self.branch, self.len.clone())
    }
}

impl fmt::Debug for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.branch, self.len)
    }
}

impl Serialize for Letter {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        (self.branch, &self.len).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Letter {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let (branch, len) = <(i64, Scalar)>::deserialize(deserializer)?;
        Ok(Letter { branch, len })
    }
}

/// A reduced word: no zero branch ids, positive lengths, no two adjacent
/// letters on the same or on opposite branches.
#[derive(Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct TreeWord(Vec<Letter>);

impl fmt::Debug for TreeWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.0).finish()
    }
}

impl TreeWord {
    pub fn root() -> Self {
        TreeWord(Vec::new())
    }

    /// Reduces an arbitrary letter sequence. Zero-length letters vanish.
    pub fn reduce<I: IntoIterator<Item = Letter>>(letters: I) -> Result<Self> {
        let mut out = TreeWord::root();
        for letter in letters {
            if letter.branch == 0 {
                return Err(Error::Precondition("tree branch id 0 is reserved".into()));
            }
            if letter.len.is_negative() {
                return Err(Error::Precondition(format!(
                    "negative letter length {}",
                    letter.len
                )));
            }
            out.push(letter);
        }
        Ok(out)
    }

    fn push(&mut self, mut letter: Letter) {
        if letter.len.is_zero() {
            return;
        }
        loop {
            match self.0.last_mut() {
                Some(top) if top.branch == letter.branch => {
                    top.len += &letter.len;
                    return;
                }
                Some(top) if top.branch == -letter.branch => {
                    if top.len > letter.len {
                        top.len -= &letter.len;
                        return;
                    }
                    if top.len == letter.len {
                        self.0.pop();
                        return;
                    }
                    letter.len -= &top.len;
                    self.0.pop();
                }
                _ => {
                    self.0.push(letter);
                    return;
                }
            }
        }
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_reduced(&self) -> bool {
        self.0.iter().all(|l| l.branch != 0 && l.len.is_positive())
            && self
                .0
                .windows(2)
                .all(|w| w[0].branch != w[1].branch && w[0].branch != -w[1].branch)
    }

    pub fn length(&self) -> Scalar {
        self.0.iter().map(|l| &l.len).sum()
    }

    pub fn inverse(&self) -> TreeWord {
        TreeWord(self.0.iter().rev().map(Letter::inverse).collect())
    }

    /// `reduce(self · other)`.
    pub fn mul(&self, other: &TreeWord) -> TreeWord {
        let mut out = self.clone();
        for l in &other.0 {
            out.push(l.clone());
        }
        out
    }

    /// The initial subword of length `t`, cutting a letter if needed.
    fn prefix(&self, t: &Scalar) -> TreeWord {
        let mut rest = t.clone();
        let mut out = Vec::new();
        for l in &self.0 {
            if !rest.is_positive() {
                break;
            }
            if l.len <= rest {
                rest -= &l.len;
                out.push(l.clone());
            } else {
                out.push(Letter::new(l.branch, rest.clone()));
                break;
            }
        }
        TreeWord(out)
    }
}

impl Serialize for TreeWord {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.serialize(serializer)
    }
}

/// A point of some piece. Which variant is valid depends on the piece kind.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PiecePoint {
    Coords(Vec<Scalar>),
    Word(TreeWord),
}

impl PiecePoint {
    pub fn line(x: Scalar) -> Self {
        PiecePoint::Coords(vec![x])
    }

    pub fn coords<I: IntoIterator<Item = Scalar>>(xs: I) -> Self {
        PiecePoint::Coords(xs.into_iter().collect())
    }

    /// Builds a tree point from `(branch, length)` pairs, reducing them.
    pub fn word<I: IntoIterator<Item = (i64, Scalar)>>(letters: I) -> Result<Self> {
        TreeWord::reduce(letters.into_iter().map(|(b, l)| Letter::new(b, l))).map(PiecePoint::Word)
    }
}

impl fmt::Debug for PiecePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PiecePoint::Coords(c) => f.debug_list().entries(c).finish(),
            PiecePoint::Word(w) => write!(f, "w{w:?}"),
        }
    }
}

impl Serialize for PiecePoint {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            PiecePoint::Coords(c) => c.serialize(serializer),
            PiecePoint::Word(w) => w.serialize(serializer),
        }
    }
}

impl<'de> Deserialize<'de> for PiecePoint {
    /// Coordinate arrays are lists of rational strings; words are lists of
    /// `[branch, "len"]` pairs. The empty list is the tree root, since
    /// coordinate pieces have dimension at least one.
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Coords(Vec<Scalar>),
            Word(Vec<Letter>),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Coords(c) if c.is_empty() => Ok(PiecePoint::Word(TreeWord::root())),
            Raw::Coords(c) => Ok(PiecePoint::Coords(c)),
            Raw::Word(letters) => {
                let word = TreeWord(letters);
                if !word.is_reduced() {
                    return Err(serde::de::Error::custom(format!(
                        "tree word {word:?} is not reduced"
                    )));
                }
                Ok(PiecePoint::Word(word))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum PieceKind {
    Line,
    L1 { dim: usize },
    Tree,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Piece {
    pub id: PieceId,
    #[serde(flatten)]
    pub kind: PieceKind,
}

impl Piece {
    pub fn new(id: PieceId, kind: PieceKind) -> Self {
        Piece { id, kind }
    }

    pub fn line(id: PieceId) -> Self {
        Piece::new(id, PieceKind::Line)
    }

    pub fn l1(id: PieceId, dim: usize) -> Self {
        Piece::new(id, PieceKind::L1 { dim })
    }

    pub fn tree(id: PieceId) -> Self {
        Piece::new(id, PieceKind::Tree)
    }

    pub fn is_tree(&self) -> bool {
        self.kind == PieceKind::Tree
    }

    fn dim(&self) -> Option<usize> {
        match self.kind {
            PieceKind::Line => Some(1),
            PieceKind::L1 { dim } => Some(dim),
            PieceKind::Tree => None,
        }
    }

    /// The distinguished point `r`: the origin or the empty word.
    pub fn basepoint(&self) -> PiecePoint {
        match self.dim() {
            Some(n) => PiecePoint::Coords(vec![Scalar::zero(); n]),
            None => PiecePoint::Word(TreeWord::root()),
        }
    }

    pub fn is_basepoint(&self, x: &PiecePoint) -> bool {
        match x {
            PiecePoint::Coords(c) => c.iter().all(Scalar::is_zero),
            PiecePoint::Word(w) => w.is_root(),
        }
    }

    /// Checks that `x` has the shape of a point of this piece.
    pub fn check(&self, x: &PiecePoint) -> Result<()> {
        let mismatch = |reason: String| Error::ShapeMismatch {
            piece: self.id,
            reason,
        };
        match (self.dim(), x) {
            (Some(n), PiecePoint::Coords(c)) if c.len() == n => Ok(()),
            (Some(n), PiecePoint::Coords(c)) => Err(mismatch(format!(
                "expected {n} coordinates, got {}",
                c.len()
            ))),
            (Some(_), PiecePoint::Word(_)) => {
                Err(mismatch("expected coordinates, got a tree word".into()))
            }
            (None, PiecePoint::Word(w)) if w.is_reduced() => Ok(()),
            (None, PiecePoint::Word(_)) => Err(mismatch("tree word is not reduced".into())),
            (None, PiecePoint::Coords(_)) => {
                Err(mismatch("expected a tree word, got coordinates".into()))
            }
        }
    }

    fn pair<'a>(&self, a: &'a PiecePoint, b: &'a PiecePoint) -> Result<Pair<'a>> {
        self.check(a)?;
        self.check(b)?;
        Ok(match (a, b) {
            (PiecePoint::Coords(x), PiecePoint::Coords(y)) => Pair::Coords(x, y),
            (PiecePoint::Word(x), PiecePoint::Word(y)) => Pair::Words(x, y),
            _ => unreachable!("checked against the same piece"),
        })
    }

    pub fn distance(&self, a: &PiecePoint, b: &PiecePoint) -> Result<Scalar> {
        Ok(match self.pair(a, b)? {
            Pair::Coords(x, y) => x.iter().zip(y).map(|(p, q)| (p - q).abs()).sum(),
            Pair::Words(x, y) => x.inverse().mul(y).length(),
        })
    }

    /// Distance from the basepoint.
    pub fn norm(&self, x: &PiecePoint) -> Result<Scalar> {
        self.distance(&self.basepoint(), x)
    }

    /// The point at distance `t` from `a` on the fixed geodesic from `a` to `b`.
    pub fn chosen_geodesic(
        &self,
        a: &PiecePoint,
        b: &PiecePoint,
        t: &Scalar,
    ) -> Result<PiecePoint> {
        let d = self.distance(a, b)?;
        if t.is_negative() || *t > d {
            return Err(Error::out_of_range(t.clone(), d));
        }
        if t.is_zero() {
            return Ok(a.clone());
        }
        if *t == d {
            return Ok(b.clone());
        }
        Ok(match self.pair(a, b)? {
            Pair::Coords(x, y) => {
                let frac = t / &d;
                PiecePoint::Coords(x.iter().zip(y).map(|(p, q)| p + &frac * (q - p)).collect())
            }
            Pair::Words(x, y) => PiecePoint::Word(x.mul(&x.inverse().mul(y).prefix(t))),
        })
    }

    /// `φ_x(y)`: the fixed isometry sending `x` to the basepoint, applied to `y`.
    pub fn recenter(&self, x: &PiecePoint, y: &PiecePoint) -> Result<PiecePoint> {
        Ok(match self.pair(x, y)? {
            Pair::Coords(p, q) => PiecePoint::Coords(p.iter().zip(q).map(|(a, b)| b - a).collect()),
            Pair::Words(p, q) => PiecePoint::Word(p.inverse().mul(q)),
        })
    }
}

enum Pair<'a> {
    Coords(&'a [Scalar], &'a [Scalar]),
    Words(&'a TreeWord, &'a TreeWord),
}

/// A finite family of pieces indexed by id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Family {
    pieces: BTreeMap<PieceId, Piece>,
}

impl Family {
    pub fn new<I: IntoIterator<Item = Piece>>(pieces: I) -> Result<Self> {
        let mut map = BTreeMap::new();
        for p in pieces {
            if let PieceKind::L1 { dim: 0 } = p.kind {
                return Err(Error::BadFamily(format!("piece {} has dimension 0", p.id)));
            }
            if map.insert(p.id, p.clone()).is_some() {
                return Err(Error::BadFamily(format!("duplicate piece id {}", p.id)));
            }
        }
        if map.is_empty() {
            return Err(Error::BadFamily("no pieces".into()));
        }
        Ok(Family { pieces: map })
    }

    pub fn piece(&self, id: PieceId) -> Result<&Piece> {
        self.pieces.get(&id).ok_or(Error::UnknownPiece(id))
    }

    pub fn pieces(&self) -> impl Iterator<Item = &Piece> {
        self.pieces.values()
    }

    pub fn ids(&self) -> impl Iterator<Item = PieceId> + '_ {
        self.pieces.keys().copied()
    }

    pub fn tree_ids(&self) -> BTreeSet<PieceId> {
        self.pieces
            .values()
            .filter(|p| p.is_tree())
            .map(|p| p.id)
            .collect()
    }

    pub fn all_trees(&self) -> bool {
        self.pieces.values().all(Piece::is_tree)
    }
}

#[derive(Serialize, Deserialize)]
struct FamilyRepr {
    pieces: Vec<Piece>,
}

impl Serialize for Family {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        FamilyRepr {
            pieces: self.pieces.values().cloned().collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Family {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = FamilyRepr::deserialize(deserializer)?;
        Family::new(repr.pieces).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MapKind {
    Identity,
    Scale { lambda: Scalar },
    CoordinateScale { lambdas: Vec<Scalar> },
}

/// A basepoint-preserving bilipschitz map from a source piece to a target
/// piece of the same kind.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BilipschitzMap {
    pub src: PieceId,
    pub dst: PieceId,
    #[serde(flatten)]
    pub kind: MapKind,
}

impl BilipschitzMap {
    pub fn identity(src: PieceId, dst: PieceId) -> Self {
        BilipschitzMap {
            src,
            dst,
            kind: MapKind::Identity,
        }
    }

    pub fn scale(src: PieceId, dst: PieceId, lambda: Scalar) -> Self {
        BilipschitzMap {
            src,
            dst,
            kind: MapKind::Scale { lambda },
        }
    }

    fn factors(&self) -> Vec<Scalar> {
        match &self.kind {
            MapKind::Identity => vec![Scalar::one()],
            MapKind::Scale { lambda } => vec![lambda.clone()],
            MapKind::CoordinateScale { lambdas } => lambdas.clone(),
        }
    }

    /// The bilipschitz constant: the largest of every factor and its inverse.
    pub fn constant(&self) -> Scalar {
        self.factors()
            .into_iter()
            .filter_map(|l| l.recip().map(|r| Scalar::max_of(l, r)))
            .fold(Scalar::one(), Scalar::max_of)
    }

    /// Checks that the map makes sense between the two pieces.
    pub fn check(&self, src: &Piece, dst: &Piece) -> Result<()> {
        let bad = |msg: String| Err(Error::BadStretch(msg));
        if src.kind != dst.kind {
            return bad(format!(
                "map {} -> {} joins pieces of different kinds",
                src.id, dst.id
            ));
        }
        if self.factors().iter().any(|l| !l.is_positive()) {
            return bad(format!(
                "map {} -> {} has a non-positive factor",
                src.id, dst.id
            ));
        }
        if let MapKind::CoordinateScale { lambdas } = &self.kind {
            match src.dim() {
                Some(n) if n == lambdas.len() => {}
                Some(n) => {
                    return bad(format!(
                        "map {} -> {} has {} factors for dimension {n}",
                        src.id,
                        dst.id,
                        lambdas.len()
                    ))
                }
                None => {
                    return bad(format!(
                        "map {} -> {}: coordinate scaling on a tree",
                        src.id, dst.id
                    ))
                }
            }
        }
        Ok(())
    }

    pub fn apply(&self, x: &PiecePoint) -> PiecePoint {
        match (&self.kind, x) {
            (MapKind::Identity, _) => x.clone(),
            (MapKind::Scale { lambda }, PiecePoint::Coords(c)) => {
                PiecePoint::Coords(c.iter().map(|v| v * lambda).collect())
            }
            (MapKind::Scale { lambda }, PiecePoint::Word(w)) => PiecePoint::Word(TreeWord(
                w.0.iter()
                    .map(|l| Letter::new(l.branch, &l.len * lambda))
                    .collect(),
            )),
            (MapKind::CoordinateScale { lambdas }, PiecePoint::Coords(c)) => {
                PiecePoint::Coords(c.iter().zip(lambdas).map(|(v, l)| v * l).collect())
            }
            // rejected by `check`
            (MapKind::CoordinateScale { .. }, PiecePoint::Word(_)) => x.clone(),
        }
    }
}
