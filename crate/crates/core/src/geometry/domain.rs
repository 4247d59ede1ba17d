use serde::{Deserialize, Serialize};
use std::path::Path;

use super::complement::{ComplementKind, ComplementRep};
use super::shapes::{Cube, Point};
use crate::error::{Error, Result};

/// A proper open set `Omega`, described inside a bounding box through its closed complement.
#[derive(Clone, Debug)]
pub struct DomainModel {
    bounding_box: Cube,
    complement: ComplementRep,
}

impl DomainModel {
    pub fn new(bounding_box: Cube, complement: ComplementRep) -> Result<Self> {
        let n = bounding_box.dim();
        if complement.dim() != n {
            return Err(Error::DimensionMismatch { expected: n, got: complement.dim() });
        }
        if complement.is_empty() {
            return Err(Error::ImproperDomain);
        }
        if complement.distance_to_cube(&bounding_box) > 0.0 {
            return Err(Error::invalid("complement does not meet the bounding box"));
        }
        Ok(DomainModel { bounding_box, complement })
    }

    pub fn dim(&self) -> usize {
        self.bounding_box.dim()
    }

    pub fn bounding_box(&self) -> &Cube {
        &self.bounding_box
    }

    pub fn complement(&self) -> &ComplementRep {
        &self.complement
    }

    /// `d(x) = dist(x, Omega^c)`; `x` must lie in the bounding box.
    pub fn distance_to_complement(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: x.len() });
        }
        let tol = 1e-12 * self.bounding_box.side.max(1.0);
        if self.bounding_box.distance_to(x) > tol {
            return Err(Error::invalid("point outside the bounding box"));
        }
        Ok(self.complement.distance(x))
    }

    /// Membership in `Omega`: positive distance to the complement.
    pub fn is_interior(&self, x: &[f64]) -> bool {
        self.complement.distance(x) > 0.0
    }

    /// Image under `x -> center + factor (x - center)`.
    pub fn dilate(&self, center: &[f64], factor: f64) -> Result<Self> {
        let bb = Cube::new(
            self.bounding_box.min_corner.scale_about(center, factor),
            self.bounding_box.side * factor,
        )?;
        DomainModel::new(bb, self.complement.dilate(center, factor)?)
    }

    pub fn to_spec(&self) -> DomainSpec {
        DomainSpec {
            ambient_dim: self.dim(),
            bounding_box: BoxSpec {
                min: self.bounding_box.min_corner.coords().to_vec(),
                side: self.bounding_box.side,
            },
            complement: ComplementSpec {
                kind: self.complement.kind().clone(),
                resolution: self.complement.resolution(),
            },
        }
    }

    pub fn from_spec(spec: &DomainSpec) -> Result<Self> {
        let schema = |field: &str, message: String| Error::Schema {
            field: field.to_string(),
            message,
        };
        if !(1..=3).contains(&spec.ambient_dim) {
            return Err(schema("ambient_dim", format!("must be 1..=3, got {}", spec.ambient_dim)));
        }
        if spec.bounding_box.min.len() != spec.ambient_dim {
            return Err(schema(
                "bounding_box.min",
                format!("expected {} coordinates", spec.ambient_dim),
            ));
        }
        let bb = Cube::new(Point::new(spec.bounding_box.min.clone())?, spec.bounding_box.side)
            .map_err(|e| schema("bounding_box.side", e.to_string()))?;
        let comp = ComplementRep::new(spec.complement.kind.clone(), spec.complement.resolution)
            .map_err(|e| match e {
                Error::ImproperDomain => Error::ImproperDomain,
                other => schema("complement", other.to_string()),
            })?;
        DomainModel::new(bb, comp)
    }

    pub fn read_json(path: &Path) -> Result<Self> {
        let text = Error::read_file(path)?;
        let spec: DomainSpec = serde_json::from_str(&text).map_err(|e| Error::Schema {
            field: format!("{} (line {}, column {})", path.display(), e.line(), e.column()),
            message: e.to_string(),
        })?;
        Self::from_spec(&spec)
    }
}

/// On-disk domain description.
///
/// ```json
/// {"ambient_dim": 2,
///  "bounding_box": {"min": [0, 0], "side": 1},
///  "complement": {"type": "cloud", "data": [[0.5, 0.5]], "resolution": 0.01}}
/// ```
/// With `"type": "cells"` the data are `{"min_corner": [...], "side": s}` records.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSpec {
    pub ambient_dim: usize,
    pub bounding_box: BoxSpec,
    pub complement: ComplementSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxSpec {
    pub min: Vec<f64>,
    pub side: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplementSpec {
    #[serde(flatten)]
    pub kind: ComplementKind,
    pub resolution: f64,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_json_round_trip() {
        let text = r#"{"ambient_dim":2,"bounding_box":{"min":[-1,-1],"side":2},
            "complement":{"type":"cloud","data":[[0,0],[0.5,0]],"resolution":0.01}}"#;
        let spec: DomainSpec = serde_json::from_str(text).unwrap();
        let d = DomainModel::from_spec(&spec).unwrap();
        assert_eq!(d.complement().len(), 2);
        assert_eq!(d.to_spec(), spec);
        let cells = r#"{"ambient_dim":1,"bounding_box":{"min":[-1],"side":2},
            "complement":{"type":"cells","data":[{"min_corner":[-1],"side":0.5}],"resolution":0.1}}"#;
        let spec: DomainSpec = serde_json::from_str(cells).unwrap();
        let d = DomainModel::from_spec(&spec).unwrap();
        assert!((d.distance_to_complement(&[0.0]).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn schema_errors_name_the_field() {
        let bad = r#"{"ambient_dim":4,"bounding_box":{"min":[0],"side":1},
            "complement":{"type":"cloud","data":[[0]],"resolution":0.1}}"#;
        let spec: DomainSpec = serde_json::from_str(bad).unwrap();
        match DomainModel::from_spec(&spec) {
            Err(Error::Schema { field, .. }) => assert_eq!(field, "ambient_dim"),
            other => panic!("unexpected {other:?}"),
        }
    }
}
