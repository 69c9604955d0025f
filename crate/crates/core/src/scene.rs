//! Scene files: a piece family, a label capacity, an optional stretch
//! context and named points and classes, all validated on load.
//!
//! ```json
//! {
//!   "pieces": [{"id": 0, "kind": "tree"}, {"id": 1, "kind": "line"}],
//!   "capacity": null,
//!   "stretch": {"maps": [{"src": 1, "dst": 1, "kind": "scale", "lambda": "3/2"},
//!                        {"src": 0, "dst": 0, "kind": "identity"}]},
//!   "points": {"f": {"segments": [{"len": "2/1", "piece": 1, "value": ["2/1"], "label": 0}]}},
//!   "classes": {"w": {"steps": [{"len": "1/1", "piece": 1, "value": ["1/1"]}]}}
//! }
//! ```

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pgeodesic::PGeodesic;
use crate::pieces::{Family, Piece};
use crate::stretch::{StretchContext, StretchSpec};
use crate::universal::{Capacity, UPoint};

#[derive(Debug, Clone, Serialize, Deserialize)]
struct SceneRepr {
    pieces: Vec<Piece>,
    #[serde(default)]
    capacity: Capacity,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    stretch: Option<StretchSpec>,
    #[serde(default)]
    points: BTreeMap<String, UPoint>,
    #[serde(default)]
    classes: BTreeMap<String, PGeodesic>,
}

#[derive(Debug, Clone)]
pub struct Scene {
    pub family: Family,
    pub capacity: Capacity,
    pub stretch: Option<StretchSpec>,
    pub points: BTreeMap<String, UPoint>,
    pub classes: BTreeMap<String, PGeodesic>,
}

impl Scene {
    pub fn new(family: Family, capacity: Capacity) -> Self {
        Scene {
            family,
            capacity,
            stretch: None,
            points: BTreeMap::new(),
            classes: BTreeMap::new(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let repr: SceneRepr =
            serde_json::from_str(text).map_err(|e| Error::Precondition(format!("scene: {e}")))?;
        let scene = Scene {
            family: Family::new(repr.pieces)?,
            capacity: repr.capacity,
            stretch: repr.stretch,
            points: repr.points,
            classes: repr.classes,
        };
        scene.validate()?;
        Ok(scene)
    }

    pub fn to_json(&self) -> String {
        crate::to_canonical_json(&SceneRepr {
            pieces: self.family.pieces().cloned().collect(),
            capacity: self.capacity,
            stretch: self.stretch.clone(),
            points: self.points.clone(),
            classes: self.classes.clone(),
        })
    }

    pub fn validate(&self) -> Result<()> {
        for (name, p) in &self.points {
            p.validate(&self.family, self.capacity)
                .map_err(|e| Error::Precondition(format!("point {name:?}: {e}")))?;
        }
        for (name, w) in &self.classes {
            w.validate(&self.family)
                .map_err(|e| Error::Precondition(format!("class {name:?}: {e}")))?;
        }
        if let Some(spec) = &self.stretch {
            spec.build(&self.family)?;
        }
        Ok(())
    }

    pub fn point(&self, name: &str) -> Result<&UPoint> {
        self.points
            .get(name)
            .ok_or_else(|| Error::Precondition(format!("no point named {name:?} in the scene")))
    }

    pub fn class(&self, name: &str) -> Result<&PGeodesic> {
        self.classes
            .get(name)
            .ok_or_else(|| Error::Precondition(format!("no class named {name:?} in the scene")))
    }

    /// The scene's stretch context, if it has one.
    pub fn stretch_context(&self) -> Result<Option<StretchContext>> {
        self.stretch
            .as_ref()
            .map(|s| s.build(&self.family))
            .transpose()
    }
}
