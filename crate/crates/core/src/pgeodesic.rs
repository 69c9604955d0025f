//! P-geodesics over finite tilings.
//!
//! A [`PGeodesic`] of length `l` is a finite list of steps. Step `a` covers
//! the half-open interval `[p_a, q_a)` of `[0, l)`, names the piece it runs
//! through, and records the exit point in that piece's coordinates. The
//! exit point sits at distance exactly `q_a - p_a` from the basepoint.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pieces::{Family, PieceId, PiecePoint};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PStep {
    pub len: Scalar,
    pub piece: PieceId,
    pub value: PiecePoint,
}

impl PStep {
    pub fn new(len: Scalar, piece: PieceId, value: PiecePoint) -> Self {
        PStep { len, piece, value }
    }

    /// A step whose length is read off the value.
    pub fn at(family: &Family, piece: PieceId, value: PiecePoint) -> Result<Self> {
        let len = family.piece(piece)?.norm(&value)?;
        if len.is_zero() {
            return Err(Error::BasepointSegment);
        }
        Ok(PStep { len, piece, value })
    }

    pub fn validate(&self, family: &Family) -> Result<()> {
        if !self.len.is_positive() {
            return Err(Error::BasepointSegment);
        }
        let norm = family.piece(self.piece)?.norm(&self.value)?;
        if norm != self.len {
            return Err(Error::Precondition(format!(
                "step of length {} has value at distance {norm} from the basepoint",
                self.len
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct PGeodesic {
    steps: Vec<PStep>,
}

impl PGeodesic {
    pub fn empty() -> Self {
        PGeodesic::default()
    }

    /// Builds and validates a P-geodesic against `family`.
    pub fn new(family: &Family, steps: Vec<PStep>) -> Result<Self> {
        let g = PGeodesic { steps };
        g.validate(family)?;
        Ok(g)
    }

    /// No validation; callers guarantee the step identity.
    pub(crate) fn from_steps(steps: Vec<PStep>) -> Self {
        PGeodesic { steps }
    }

    pub fn validate(&self, family: &Family) -> Result<()> {
        self.steps.iter().try_for_each(|s| s.validate(family))
    }

    pub fn steps(&self) -> &[PStep] {
        &self.steps
    }

    pub fn into_steps(self) -> Vec<PStep> {
        self.steps
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn length(&self) -> Scalar {
        self.steps.iter().map(|s| &s.len).sum()
    }

    /// The intervals `[p_a, q_a)` of the tiling.
    pub fn bounds(&self) -> Vec<(Scalar, Scalar)> {
        step_bounds(self.steps.iter().map(|s| &s.len))
    }

    /// The index selector as a sequence of piece ids.
    pub fn index_selector(&self) -> Vec<PieceId> {
        self.steps.iter().map(|s| s.piece).collect()
    }

    /// Runs the steps backwards. Each value `x` becomes `φ_x(r)`, the
    /// basepoint seen from `x`.
    pub fn reverse(&self, family: &Family) -> Result<PGeodesic> {
        let steps = self
            .steps
            .iter()
            .rev()
            .map(|s| {
                let piece = family.piece(s.piece)?;
                Ok(PStep::new(
                    s.len.clone(),
                    s.piece,
                    piece.recenter(&s.value, &piece.basepoint())?,
                ))
            })
            .collect::<Result<_>>()?;
        Ok(PGeodesic { steps })
    }

    /// `Γ^{x,y}`: the steps lying inside `[x, y)`, shifted to start at 0.
    /// Neither cut may fall strictly inside a step.
    pub fn restrict_open(&self, x: &Scalar, y: &Scalar) -> Result<PGeodesic> {
        let l = self.length();
        for v in [x, y] {
            if v.is_negative() || *v > l {
                return Err(Error::out_of_range(v.clone(), l));
            }
        }
        if x > y {
            return Err(Error::Precondition(format!("restriction bounds {x} > {y}")));
        }
        let bounds = self.bounds();
        for v in [x, y] {
            if bounds.iter().any(|(p, q)| p < v && v < q) {
                return Err(Error::InteriorCut(v.clone()));
            }
        }
        let steps = self
            .steps
            .iter()
            .zip(&bounds)
            .filter(|(_, (p, q))| p >= x && q <= y)
            .map(|(s, _)| s.clone())
            .collect();
        Ok(PGeodesic { steps })
    }

    /// `Γ|_{[0,x]}`: everything before `x`; a step straddling `x` is cut
    /// short and its value moved along the chosen geodesic from the basepoint.
    pub fn restrict_closed(&self, family: &Family, x: &Scalar) -> Result<PGeodesic> {
        Ok(PGeodesic {
            steps: truncate_steps(family, &self.steps, x)?,
        })
    }

    /// Whether `self` and `other` have the same pattern until `x`: the same
    /// steps end at or before `x`, and either both or neither have a step
    /// strictly straddling `x`, on the same piece when they do.
    pub fn same_pattern_until(&self, other: &PGeodesic, x: &Scalar) -> bool {
        let head = |g: &PGeodesic| -> (Vec<PStep>, Option<PieceId>) {
            let mut done = Vec::new();
            let mut straddle = None;
            for (s, (p, q)) in g.steps.iter().zip(g.bounds()) {
                if q <= *x {
                    done.push(s.clone());
                } else {
                    if p < *x {
                        straddle = Some(s.piece);
                    }
                    break;
                }
            }
            (done, straddle)
        };
        head(self) == head(other)
    }

    /// Whether some `x > 0` witnesses the same pattern until `x`. Below the
    /// shorter first step the relation is constant, so one witness suffices.
    pub fn same_initial_pattern(&self, other: &PGeodesic) -> bool {
        let firsts = [self.steps.first(), other.steps.first()];
        let eps = match firsts.iter().flatten().map(|s| &s.len).min() {
            Some(l) => l / Scalar::from_int(2),
            None => return true,
        };
        self.same_pattern_until(other, &eps)
    }

    /// The first pair of consecutive steps that both run through a tree piece.
    pub fn first_inadmissible(&self, tree_ids: &BTreeSet<PieceId>) -> Option<(usize, usize)> {
        self.steps
            .windows(2)
            .position(|w| tree_ids.contains(&w[0].piece) && tree_ids.contains(&w[1].piece))
            .map(|i| (i, i + 1))
    }

    pub fn is_admissible(&self, tree_ids: &BTreeSet<PieceId>) -> bool {
        self.first_inadmissible(tree_ids).is_none()
    }

    /// The class `w_t`: one unit step into the tree piece `tree` along `branch`.
    pub fn unit_tree_step(family: &Family, tree: PieceId, branch: i64) -> Result<PGeodesic> {
        let value = PiecePoint::word([(branch, Scalar::one())])?;
        PGeodesic::new(family, vec![PStep::new(Scalar::one(), tree, value)])
    }
}

pub(crate) fn step_bounds<'a, I: IntoIterator<Item = &'a Scalar>>(
    lens: I,
) -> Vec<(Scalar, Scalar)> {
    let mut at = Scalar::zero();
    lens.into_iter()
        .map(|l| {
            let p = at.clone();
            at += l;
            (p, at.clone())
        })
        .collect()
}

/// Truncation shared by P-geodesics and elements of the universal space.
pub(crate) fn truncate_steps<T: StepLike + Clone>(
    family: &Family,
    items: &[T],
    x: &Scalar,
) -> Result<Vec<T>> {
    let total: Scalar = items.iter().map(StepLike::len).sum();
    if x.is_negative() || *x > total {
        return Err(Error::out_of_range(x.clone(), total));
    }
    let mut out = Vec::new();
    let mut at = Scalar::zero();
    for it in items {
        if at >= *x {
            break;
        }
        let q = &at + it.len();
        if q <= *x {
            out.push(it.clone());
        } else {
            let keep = x - &at;
            let piece = family.piece(it.piece())?;
            let value = piece.chosen_geodesic(&piece.basepoint(), it.value(), &keep)?;
            out.push(it.truncated(keep, value));
        }
        at = q;
    }
    Ok(out)
}

pub(crate) trait StepLike {
    fn len(&self) -> &Scalar;
    fn piece(&self) -> PieceId;
    fn value(&self) -> &PiecePoint;
    /// The same item with a shorter length and the matching value.
    fn truncated(&self, len: Scalar, value: PiecePoint) -> Self;
}

impl StepLike for PStep {
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
        PStep::new(len, self.piece, value)
    }
}
