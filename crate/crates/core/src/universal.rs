//! The universal tree-graded space.
//!
//! A point is a finite list of segments. Reading left to right, each segment
//! says: travel `len` inside a fresh copy of piece `piece`, labelled `label`,
//! and leave that copy at `value`. Two points agree up to their separation
//! moment `s` (the total length of their longest common segment prefix);
//! after that they either continue in the same copy of a piece (case a) or
//! split at a gluing point (case b).

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::pgeodesic::{truncate_steps, PGeodesic, PStep, StepLike};
use crate::pieces::{Family, Piece, PieceId, PiecePoint};
use crate::scalar::Scalar;

pub type Label = u64;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct USegment {
    pub len: Scalar,
    pub piece: PieceId,
    pub value: PiecePoint,
    pub label: Label,
}

impl USegment {
    pub fn new(len: Scalar, piece: PieceId, value: PiecePoint, label: Label) -> Self {
        USegment {
            len,
            piece,
            value,
            label,
        }
    }

    pub fn step(&self) -> PStep {
        PStep::new(self.len.clone(), self.piece, self.value.clone())
    }
}

impl StepLike for USegment {
    fn len(&self) -> &Scalar {
        &self.len
    }

    fn piece(&self) -> PieceId {
        self.piece
    }

    fn value(&self) -> &PiecePoint {
        &self.value
    }

    fn truncated(&self, len: Scalar, value: PiecePoint) -> Self {
        USegment::new(len, self.piece, value, self.label)
    }
}

/// Upper bound on labels. `Infinite` is the default and serializes as `null`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Capacity {
    Finite(u64),
    #[default]
    Infinite,
}

impl Capacity {
    pub fn admits(&self, label: Label) -> bool {
        match self {
            Capacity::Finite(c) => label < *c,
            Capacity::Infinite => true,
        }
    }
}

impl Serialize for Capacity {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Capacity::Finite(c) => serializer.serialize_some(c),
            Capacity::Infinite => serializer.serialize_none(),
        }
    }
}

impl<'de> Deserialize<'de> for Capacity {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        Ok(match Option::<u64>::deserialize(deserializer)? {
            Some(c) => Capacity::Finite(c),
            None => Capacity::Infinite,
        })
    }
}

/// A point of the universal space.
#[derive(Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct UPoint {
    segments: Vec<USegment>,
}

impl fmt::Debug for UPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<")?;
        for (i, s) in self.segments.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{}@{}:{:?}#{}", s.len, s.piece, s.value, s.label)?;
        }
        write!(f, ">")
    }
}

impl UPoint {
    /// The basepoint: no segments, `ρ = 0`.
    pub fn basepoint() -> Self {
        UPoint::default()
    }

    pub fn from_segments(segments: Vec<USegment>) -> Self {
        UPoint { segments }
    }

    /// `f^{x,μ}`: one segment from the basepoint of piece `piece` to `x`.
    pub fn single(family: &Family, piece: PieceId, x: PiecePoint, label: Label) -> Result<Self> {
        let len = family.piece(piece)?.norm(&x)?;
        if len.is_zero() {
            return Err(Error::BasepointSegment);
        }
        Ok(UPoint {
            segments: vec![USegment::new(len, piece, x, label)],
        })
    }

    /// The point with the steps of `w`, every one carrying `label`.
    pub fn with_label(w: &PGeodesic, label: Label) -> Self {
        UPoint {
            segments: w
                .steps()
                .iter()
                .map(|s| USegment::new(s.len.clone(), s.piece, s.value.clone(), label))
                .collect(),
        }
    }

    pub fn segments(&self) -> &[USegment] {
        &self.segments
    }

    pub fn is_basepoint(&self) -> bool {
        self.segments.is_empty()
    }

    /// Distance from the basepoint.
    pub fn rho(&self) -> Scalar {
        self.segments.iter().map(|s| &s.len).sum()
    }

    /// Segment boundaries `0 = b_0 < b_1 < ... < b_n = ρ`.
    pub fn boundaries(&self) -> Vec<Scalar> {
        let mut out = vec![Scalar::zero()];
        let mut at = Scalar::zero();
        for s in &self.segments {
            at += &s.len;
            out.push(at.clone());
        }
        out
    }

    /// The underlying P-geodesic, labels dropped.
    pub fn pgeodesic(&self) -> PGeodesic {
        PGeodesic::from_steps(self.segments.iter().map(USegment::step).collect())
    }

    pub fn labels(&self) -> impl Iterator<Item = Label> + '_ {
        self.segments.iter().map(|s| s.label)
    }

    /// Checks conditions (1)-(6). Labels are piecewise constant by
    /// construction, one per segment, so (4) and (5) always hold.
    pub fn validate(&self, family: &Family, capacity: Capacity) -> Result<()> {
        for (i, s) in self.segments.iter().enumerate() {
            if !s.len.is_positive() {
                return Err(Error::InvalidElement {
                    condition: 2,
                    segment: i,
                    reason: format!("non-positive length {}", s.len),
                });
            }
            let norm = family.piece(s.piece)?.norm(&s.value)?;
            if norm != s.len {
                return Err(Error::InvalidElement {
                    condition: 3,
                    segment: i,
                    reason: format!("length {} but value at distance {norm}", s.len),
                });
            }
            if !capacity.admits(s.label) {
                return Err(Error::InvalidElement {
                    condition: 6,
                    segment: i,
                    reason: format!("label {} not below capacity {capacity:?}", s.label),
                });
            }
        }
        Ok(())
    }

    /// Shape check only: every segment names a family piece and has a value
    /// of that piece's shape.
    fn check_family(&self, family: &Family) -> Result<()> {
        self.segments
            .iter()
            .try_for_each(|s| family.piece(s.piece)?.check(&s.value))
    }

    /// `f * g`.
    pub fn concat(&self, other: &UPoint) -> UPoint {
        let mut segments = self.segments.clone();
        segments.extend(other.segments.iter().cloned());
        UPoint { segments }
    }

    /// `f ≤ g` iff the separation moment of the pair is `ρ_f`, that is, `f`'s
    /// segments are a prefix of `g`'s.
    pub fn leq(&self, other: &UPoint) -> bool {
        other.segments.starts_with(&self.segments)
    }

    /// `f‖_{[0,x)}`. A segment straddling `x` is cut along the chosen
    /// geodesic from the basepoint and keeps its label.
    pub fn restrict(&self, family: &Family, x: &Scalar) -> Result<UPoint> {
        Ok(UPoint {
            segments: truncate_steps(family, &self.segments, x)?,
        })
    }

    /// The first `k` segments.
    pub fn prefix(&self, k: usize) -> UPoint {
        UPoint {
            segments: self.segments[..k.min(self.segments.len())].to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "case", rename_all = "snake_case")]
pub enum SepCase {
    /// Both points continue at `s` through the same piece type with the
    /// same label: case (a).
    SamePiece {
        piece: PieceId,
        label: Label,
        f_value: PiecePoint,
        g_value: PiecePoint,
    },
    /// Case (b).
    Split,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SeparationData {
    pub s: Scalar,
    pub u: Scalar,
    pub v: Scalar,
    #[serde(flatten)]
    pub case: SepCase,
    /// Number of shared leading segments.
    #[serde(skip)]
    pub common: usize,
}

impl SeparationData {
    pub fn is_same_piece(&self) -> bool {
        matches!(self.case, SepCase::SamePiece { .. })
    }
}

/// Separation moment of `f` and `g` together with `u`, `v` and the case.
pub fn separation(f: &UPoint, g: &UPoint) -> SeparationData {
    let common = f
        .segments
        .iter()
        .zip(&g.segments)
        .take_while(|(a, b)| a == b)
        .count();
    let s: Scalar = f.segments[..common].iter().map(|x| &x.len).sum();
    match (f.segments.get(common), g.segments.get(common)) {
        (Some(a), Some(b)) if a.piece == b.piece && a.label == b.label => SeparationData {
            u: &s + &a.len,
            v: &s + &b.len,
            s,
            case: SepCase::SamePiece {
                piece: a.piece,
                label: a.label,
                f_value: a.value.clone(),
                g_value: b.value.clone(),
            },
            common,
        },
        _ => SeparationData {
            u: s.clone(),
            v: s.clone(),
            s,
            case: SepCase::Split,
            common,
        },
    }
}

/// `d_P(Γ_f(s), Γ_g(s))` in case (a).
fn same_piece_gap(family: &Family, case: &SepCase) -> Result<Option<Scalar>> {
    match case {
        SepCase::SamePiece {
            piece,
            f_value,
            g_value,
            ..
        } => Ok(Some(family.piece(*piece)?.distance(f_value, g_value)?)),
        SepCase::Split => Ok(None),
    }
}

/// The distance, by cases on the separation:
///
/// * (a) `(ρ_f - s) + (ρ_g - s) + d_P(Γ_f(s), Γ_g(s)) - l(J_f) - l(J_g)`
/// * (b) `(ρ_f - s) + (ρ_g - s)`
pub fn dist(family: &Family, f: &UPoint, g: &UPoint) -> Result<Scalar> {
    f.check_family(family)?;
    g.check_family(family)?;
    let sep = separation(f, g);
    let base = (f.rho() - &sep.s) + (g.rho() - &sep.s);
    Ok(match same_piece_gap(family, &sep.case)? {
        Some(d) => base + d - (&sep.u - &sep.s) - (&sep.v - &sep.s),
        None => base,
    })
}

/// The same distance written as `(ρ_f - u) + (ρ_g - v) + d_P(Γ_f(s), Γ_g(s))`
/// in case (a). Agrees with [`dist`] everywhere.
pub fn dist_rewritten(family: &Family, f: &UPoint, g: &UPoint) -> Result<Scalar> {
    f.check_family(family)?;
    g.check_family(family)?;
    let sep = separation(f, g);
    let base = (f.rho() - &sep.u) + (g.rho() - &sep.v);
    Ok(match same_piece_gap(family, &sep.case)? {
        Some(d) => base + d,
        None => base,
    })
}

/// The canonical geodesic from `f` to `g`: descend along `f` to `u`, cross
/// the shared piece along its chosen geodesic, then climb along `g` from `v`.
#[derive(Debug, Clone)]
pub struct ExplicitGeodesic<'a> {
    family: &'a Family,
    f: UPoint,
    g: UPoint,
    sep: SeparationData,
    descend: Scalar,
    traverse: Scalar,
    length: Scalar,
}

impl<'a> ExplicitGeodesic<'a> {
    pub fn new(family: &'a Family, f: &UPoint, g: &UPoint) -> Result<Self> {
        let length = dist(family, f, g)?;
        let sep = separation(f, g);
        let traverse = match same_piece_gap(family, &sep.case)? {
            Some(d) => d,
            None => Scalar::zero(),
        };
        Ok(ExplicitGeodesic {
            family,
            descend: f.rho() - &sep.u,
            traverse,
            f: f.clone(),
            g: g.clone(),
            sep,
            length,
        })
    }

    pub fn start(&self) -> &UPoint {
        &self.f
    }

    pub fn end(&self) -> &UPoint {
        &self.g
    }

    pub fn separation(&self) -> &SeparationData {
        &self.sep
    }

    pub fn length(&self) -> &Scalar {
        &self.length
    }

    /// Parameter where the descent along `f` ends.
    pub fn descend_end(&self) -> &Scalar {
        &self.descend
    }

    /// Parameter where the in-piece traverse ends and the climb along `g` begins.
    pub fn traverse_end(&self) -> Scalar {
        &self.descend + &self.traverse
    }

    pub fn eval(&self, t: &Scalar) -> Result<UPoint> {
        if t.is_negative() || *t > self.length {
            return Err(Error::out_of_range(t.clone(), self.length.clone()));
        }
        if t.is_zero() {
            return Ok(self.f.clone());
        }
        if *t == self.length {
            return Ok(self.g.clone());
        }
        if *t <= self.descend {
            return self.f.restrict(self.family, &(self.f.rho() - t));
        }
        let climb_from = self.traverse_end();
        if *t < climb_from {
            let SepCase::SamePiece {
                piece,
                label,
                f_value,
                g_value,
            } = &self.sep.case
            else {
                unreachable!("split separations have an empty traverse");
            };
            let p: &Piece = self.family.piece(*piece)?;
            let x = p.chosen_geodesic(f_value, g_value, &(t - &self.descend))?;
            let stem = self.f.prefix(self.sep.common);
            if p.is_basepoint(&x) {
                return Ok(stem);
            }
            return Ok(stem.concat(&UPoint::single(self.family, *piece, x, *label)?));
        }
        self.g
            .restrict(self.family, &(&self.sep.v + (t - &climb_from)))
    }
}

/// `g(κ)` for every label: copies of the class `w` that differ only in their
/// constant label. Any two of them are at distance `2·l(w)`.
pub fn realize_class(
    family: &Family,
    capacity: Capacity,
    w: &PGeodesic,
    labels: &[Label],
) -> Result<Vec<UPoint>> {
    if w.is_empty() {
        return Err(Error::EmptyGeodesic);
    }
    w.validate(family)?;
    if let Some((a, b)) = w.first_inadmissible(&family.tree_ids()) {
        return Err(Error::Inadmissible(a, b));
    }
    let mut seen = BTreeSet::new();
    labels
        .iter()
        .map(|&k| {
            if !seen.insert(k) {
                return Err(Error::DuplicateLabel(k));
            }
            let p = UPoint::with_label(w, k);
            p.validate(family, capacity)?;
            Ok(p)
        })
        .collect()
}
