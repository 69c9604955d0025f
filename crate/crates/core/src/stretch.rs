//! Replacing pieces by bilipschitz-equivalent ones.
//!
//! A [`StretchContext`] fixes one basepoint-preserving bilipschitz map per
//! source piece. Each step of a P-geodesic is pushed through its map, and
//! its interval is stretched to the new exit distance. The stretching
//! function `s_Γ` is the resulting piecewise-linear reparametrization.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pgeodesic::{PGeodesic, PStep};
use crate::pieces::{BilipschitzMap, Family, PieceId};
use crate::scalar::Scalar;
use crate::universal::{UPoint, USegment};

#[derive(Debug, Clone)]
pub struct StretchContext {
    source: Family,
    target: Family,
    maps: BTreeMap<PieceId, BilipschitzMap>,
    k: Scalar,
}

/// Wire form: `{"maps":[...], "target": {"pieces":[...]}}`. Without a
/// `target`, maps land in the source family.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StretchSpec {
    pub maps: Vec<BilipschitzMap>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<Family>,
}

impl StretchSpec {
    pub fn build(&self, source: &Family) -> Result<StretchContext> {
        let target = self.target.clone().unwrap_or_else(|| source.clone());
        StretchContext::new(source.clone(), target, self.maps.clone())
    }
}

impl StretchContext {
    /// Every source piece needs exactly one map, every target piece must be
    /// hit, and no two source pieces may share a target.
    pub fn new(source: Family, target: Family, maps: Vec<BilipschitzMap>) -> Result<Self> {
        let mut by_src = BTreeMap::new();
        let mut hit = BTreeSet::new();
        for m in maps {
            let src = source.piece(m.src).map_err(|_| {
                Error::BadStretch(format!("map source {} is not a source piece", m.src))
            })?;
            let dst = target.piece(m.dst).map_err(|_| {
                Error::BadStretch(format!("map target {} is not a target piece", m.dst))
            })?;
            m.check(src, dst)?;
            if !hit.insert(m.dst) {
                return Err(Error::BadStretch(format!(
                    "target piece {} is hit twice",
                    m.dst
                )));
            }
            if by_src.insert(m.src, m.clone()).is_some() {
                return Err(Error::BadStretch(format!(
                    "source piece {} has two maps",
                    m.src
                )));
            }
        }
        if let Some(id) = source.ids().find(|id| !by_src.contains_key(id)) {
            return Err(Error::BadStretch(format!("source piece {id} has no map")));
        }
        if let Some(id) = target.ids().find(|id| !hit.contains(id)) {
            return Err(Error::BadStretch(format!("target piece {id} is not hit")));
        }
        let k = by_src
            .values()
            .map(BilipschitzMap::constant)
            .fold(Scalar::one(), Scalar::max_of);
        Ok(StretchContext {
            source,
            target,
            maps: by_src,
            k,
        })
    }

    /// Identity maps from a family onto itself.
    pub fn identity(family: &Family) -> Self {
        let maps = family
            .ids()
            .map(|id| BilipschitzMap::identity(id, id))
            .collect();
        StretchContext::new(family.clone(), family.clone(), maps).expect("identity is well formed")
    }

    /// The same scale factor on every piece of a family, onto itself.
    pub fn uniform_scale(family: &Family, lambda: Scalar) -> Result<Self> {
        let maps = family
            .ids()
            .map(|id| BilipschitzMap::scale(id, id, lambda.clone()))
            .collect();
        StretchContext::new(family.clone(), family.clone(), maps)
    }

    pub fn k(&self) -> &Scalar {
        &self.k
    }

    pub fn source(&self) -> &Family {
        &self.source
    }

    pub fn target(&self) -> &Family {
        &self.target
    }

    fn push(&self, step: &PStep) -> Result<PStep> {
        let map = self
            .maps
            .get(&step.piece)
            .ok_or(Error::UnknownPiece(step.piece))?;
        self.source.piece(step.piece)?.check(&step.value)?;
        let value = map.apply(&step.value);
        let len = self.target.piece(map.dst)?.norm(&value)?;
        Ok(PStep::new(len, map.dst, value))
    }

    /// `s_Γ(t)`. With finitely many steps there are no gaps, so the value is
    /// the stretched length of the steps before `t` plus the proportional
    /// part of the step containing `t`.
    pub fn stretch_function(&self, g: &PGeodesic, t: &Scalar) -> Result<Scalar> {
        let l = g.length();
        if t.is_negative() || *t > l {
            return Err(Error::out_of_range(t.clone(), l));
        }
        let mut acc = Scalar::zero();
        for (step, (p, q)) in g.steps().iter().zip(g.bounds()) {
            let stretched = self.push(step)?.len;
            if *t < q {
                return Ok(acc + (t - &p) / (&q - &p) * stretched);
            }
            acc += stretched;
        }
        Ok(acc)
    }

    /// `ψ'(Γ)`: every step pushed through its map.
    pub fn psi(&self, g: &PGeodesic) -> Result<PGeodesic> {
        let steps = g
            .steps()
            .iter()
            .map(|s| self.push(s))
            .collect::<Result<_>>()?;
        Ok(PGeodesic::from_steps(steps))
    }

    /// The segmentwise map on points of the universal space; labels are kept.
    pub fn psi_point(&self, f: &UPoint) -> Result<UPoint> {
        let segments = f
            .segments()
            .iter()
            .map(|s| {
                let p = self.push(&s.step())?;
                Ok(USegment::new(p.len, p.piece, p.value, s.label))
            })
            .collect::<Result<_>>()?;
        Ok(UPoint::from_segments(segments))
    }
}
