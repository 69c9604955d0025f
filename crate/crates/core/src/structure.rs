//! Pieces of the universal space and closest-point projections onto them.
//!
//! The piece `P(f, i, β)` consists of `f` together with every `f * f^{x,β}`
//! for `x` in piece `i`. It is an isometric copy of piece `i` hung at `f`.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::pieces::{Family, PieceId, PiecePoint};
use crate::report::AxiomReport;
use crate::sample::Sampler;
use crate::scalar::Scalar;
use crate::to_canonical_json;
use crate::universal::{dist, ExplicitGeodesic, Label, UPoint};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PieceRef {
    pub base: UPoint,
    pub piece: PieceId,
    pub label: Label,
}

impl PieceRef {
    pub fn new(base: UPoint, piece: PieceId, label: Label) -> Self {
        PieceRef { base, piece, label }
    }

    /// The segment that takes `g` one step past the base, if `g` extends the base.
    fn next_segment<'g>(&self, g: &'g UPoint) -> Option<&'g crate::universal::USegment> {
        if !self.base.leq(g) {
            return None;
        }
        g.segments().get(self.base.segments().len())
    }

    pub fn member(&self, g: &UPoint) -> bool {
        if *g == self.base {
            return true;
        }
        let k = self.base.segments().len();
        g.segments().len() == k + 1
            && self
                .next_segment(g)
                .is_some_and(|s| s.piece == self.piece && s.label == self.label)
    }

    /// The chart `x ↦ f * f^{x,β}`; the basepoint goes to the base.
    pub fn embed(&self, family: &Family, x: &PiecePoint) -> Result<UPoint> {
        let piece = family.piece(self.piece)?;
        piece.check(x)?;
        if piece.is_basepoint(x) {
            return Ok(self.base.clone());
        }
        Ok(self
            .base
            .concat(&UPoint::single(family, self.piece, x.clone(), self.label)?))
    }

    /// Inverse of [`PieceRef::embed`].
    pub fn coords(&self, family: &Family, g: &UPoint) -> Result<PiecePoint> {
        if *g == self.base {
            return Ok(family.piece(self.piece)?.basepoint());
        }
        if !self.member(g) {
            return Err(Error::NotMember);
        }
        Ok(g.segments()
            .last()
            .expect("members past the base have a segment")
            .value
            .clone())
    }

    /// `π_P(r)`, the first point of the explicit geodesic from `r` to the
    /// base that lies on `P`, in closed form.
    pub fn project(&self, family: &Family, r: &UPoint) -> Result<UPoint> {
        for s in r.segments() {
            family.piece(s.piece)?.check(&s.value)?;
        }
        if self.member(r) {
            return Ok(r.clone());
        }
        match self.next_segment(r) {
            Some(s) if s.piece == self.piece && s.label == self.label => {
                Ok(self.base.concat(&UPoint::from_segments(vec![s.clone()])))
            }
            _ => Ok(self.base.clone()),
        }
    }
}

fn wit<T: Serialize>(x: &T) -> serde_json::Value {
    serde_json::from_str(&to_canonical_json(x)).expect("round trip")
}

/// Samples configurations and checks (P'1), (P'2), (P3), (T1) and the
/// concatenation claim behind (P'2).
///
/// * `P'1`: `π_P(m) = m` for members, and `π_P(r)` is always a member.
/// * `P'2`: `d(r1,r2) = d(r1,π1) + d(π1,π2) + d(π2,r2)` when `π1 ≠ π2`.
/// * `claim`: the explicit geodesic from `r1` to `r2` passes through `π1`
///   and then `π2` at the corresponding arc lengths.
/// * `P3`: for distinct pieces `P`, `Q`, `π_P(Q)` is one point.
/// * `T1`: distinct pieces share at most one point.
pub fn check_axioms(sampler: &mut Sampler<'_>, n_samples: usize) -> Result<Vec<AxiomReport>> {
    let family = sampler.family();
    let mut p1 = AxiomReport::new("P'1");
    let mut p2 = AxiomReport::new("P'2");
    let mut claim = AxiomReport::new("claim");
    let mut p3 = AxiomReport::new("P3");
    let mut t1 = AxiomReport::new("T1");

    for _ in 0..n_samples {
        let r = sampler.point();
        let p = sampler.piece_ref_near(&r);
        let m = sampler.member_of(&p);
        let pm = p.project(family, &m)?;
        let pr = p.project(family, &r)?;
        p1.record(pm == m && p.member(&pr), || {
            json!({"piece": wit(&p), "member": wit(&m), "projection": wit(&pm), "point": wit(&r), "point_projection": wit(&pr)})
        });
    }

    let mut attempts = 0;
    while p2.samples < n_samples && attempts < 50 * n_samples.max(1) {
        attempts += 1;
        let anchor = sampler.point();
        let p = sampler.piece_ref_near(&anchor);
        let r1 = sampler.point_near_piece(&p);
        let r2 = sampler.point_near_piece(&p);
        let q1 = p.project(family, &r1)?;
        let q2 = p.project(family, &r2)?;
        if q1 == q2 {
            continue;
        }
        let a = dist(family, &r1, &q1)?;
        let b = dist(family, &q1, &q2)?;
        let c = dist(family, &q2, &r2)?;
        let whole = dist(family, &r1, &r2)?;
        let legs = &a + &b + &c;
        p2.record(whole == legs, || {
            json!({"piece": wit(&p), "r1": wit(&r1), "r2": wit(&r2), "d": whole.to_string(), "legs": legs.to_string()})
        });
        let geo = ExplicitGeodesic::new(family, &r1, &r2)?;
        let through = whole == legs && geo.eval(&a)? == q1 && geo.eval(&(&a + &b))? == q2;
        claim.record(
            through,
            || json!({"piece": wit(&p), "r1": wit(&r1), "r2": wit(&r2)}),
        );
    }

    let pairs = (n_samples / 5).max(1);
    let mut attempts = 0;
    while t1.samples < pairs && attempts < 50 * pairs {
        attempts += 1;
        let anchor = sampler.point();
        let p = sampler.piece_ref_near(&anchor);
        let q = related_piece(sampler, &p);
        if p == q {
            continue;
        }
        let members: Vec<UPoint> = std::iter::once(q.base.clone())
            .chain((0..8).map(|_| sampler.member_of(&q)))
            .collect();
        let images: BTreeSet<String> = members
            .iter()
            .map(|m| p.project(family, m).map(|x| to_canonical_json(&x)))
            .collect::<Result<_>>()?;
        p3.record(
            images.len() == 1,
            || json!({"onto": wit(&p), "from": wit(&q), "images": images.len()}),
        );

        let mut shared: BTreeSet<String> = BTreeSet::new();
        let mut candidates = vec![p.base.clone(), q.base.clone()];
        candidates.extend((0..8).map(|_| sampler.member_of(&p)));
        candidates.extend(members);
        for c in &candidates {
            if p.member(c) && q.member(c) {
                shared.insert(to_canonical_json(c));
            }
        }
        t1.record(
            shared.len() <= 1,
            || json!({"p": wit(&p), "q": wit(&q), "shared": shared.len()}),
        );
    }

    Ok(vec![p1, p2, claim, p3, t1])
}

/// A piece likely to touch `p`: hung at a member of `p`, at `p`'s base with
/// another type or label, or at a prefix of `p`'s base.
fn related_piece(sampler: &mut Sampler<'_>, p: &PieceRef) -> PieceRef {
    use rand::Rng;
    let choice = sampler.rng().gen_range(0..4);
    match choice {
        0 => {
            let m = sampler.member_of(p);
            let piece = sampler.piece_id();
            let label = sampler.label();
            PieceRef::new(m, piece, label)
        }
        1 => {
            let piece = sampler.piece_id();
            let label = sampler.label();
            PieceRef::new(p.base.clone(), piece, label)
        }
        2 => sampler.piece_ref_near(&p.base),
        _ => {
            let r = sampler.point();
            sampler.piece_ref_near(&r)
        }
    }
}

/// Distance from `r` to the piece, realized at the projection.
pub fn distance_to_piece(family: &Family, r: &UPoint, p: &PieceRef) -> Result<Scalar> {
    dist(family, r, &p.project(family, r)?)
}
