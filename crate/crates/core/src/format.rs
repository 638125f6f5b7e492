//! The single on-disk format: a JSON object whose `"kind"` field selects the
//! payload, with an optional provenance header.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::curvature::{ConnectionCurve, ConnectionDoc};
use crate::error::{Error, Result};
use crate::euclidean::{FormalMap, PolyMapDoc};
use crate::invariant::{StructureMapCurve, StructureMapDoc};
use crate::symplecto::{SymplectoCurve, SymplectoDoc};

pub const FORMAT_VERSION: u32 = 1;

/// How a generated file came to be.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub generator: String,
    pub version: String,
    pub params: BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Payload {
    ConnectionCurve(ConnectionDoc),
    StructureMapCurve(StructureMapDoc),
    SymplectoCurve(SymplectoDoc),
    PolyMap(PolyMapDoc),
}

impl Payload {
    pub fn kind(&self) -> &'static str {
        match self {
            Payload::ConnectionCurve(_) => "connection_curve",
            Payload::StructureMapCurve(_) => "structure_map_curve",
            Payload::SymplectoCurve(_) => "symplecto_curve",
            Payload::PolyMap(_) => "poly_map",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Provenance>,
    #[serde(flatten)]
    pub payload: Payload,
}

const KINDS: [&str; 4] = ["connection_curve", "structure_map_curve", "symplecto_curve", "poly_map"];

fn typed<T: for<'de> Deserialize<'de>>(value: Value, kind: &str) -> Result<T> {
    serde_path_to_error::deserialize(value)
        .map_err(|e| Error::parse(format!("{kind}: field `{}`: {}", e.path(), e.inner())))
}

impl Document {
    pub fn new(payload: Payload) -> Self {
        Document { provenance: None, payload }
    }

    pub fn with_provenance(mut self, p: Provenance) -> Self {
        self.provenance = Some(p);
        self
    }

    /// Parses in two stages so that syntax errors carry line and column and
    /// schema errors carry the field path.
    pub fn parse(text: &str) -> Result<Self> {
        let mut value: Value = serde_json::from_str(text)
            .map_err(|e| Error::parse(format!("line {}, column {}: {e}", e.line(), e.column())))?;
        let obj = value.as_object_mut().ok_or_else(|| Error::parse("top level must be a JSON object"))?;
        let kind = match obj.remove("kind") {
            Some(Value::String(k)) => k,
            Some(_) => return Err(Error::parse("field `kind` must be a string")),
            None => return Err(Error::parse(format!("missing field `kind` (one of {})", KINDS.join(", ")))),
        };
        let provenance = match obj.remove("provenance") {
            Some(v) => Some(typed::<Provenance>(v, "provenance")?),
            None => None,
        };
        let payload = match kind.as_str() {
            "connection_curve" => Payload::ConnectionCurve(typed(value, &kind)?),
            "structure_map_curve" => Payload::StructureMapCurve(typed(value, &kind)?),
            "symplecto_curve" => Payload::SymplectoCurve(typed(value, &kind)?),
            "poly_map" => Payload::PolyMap(typed(value, &kind)?),
            other => return Err(Error::parse(format!("unknown kind `{other}` (one of {})", KINDS.join(", ")))),
        };
        Ok(Document { provenance, payload })
    }

    /// Pretty JSON with a trailing newline; field order is fixed by the types
    /// and map keys are sorted, so equal documents give equal bytes.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("documents always serialize");
        s.push('\n');
        s
    }

    pub fn connection(&self) -> Result<ConnectionCurve> {
        match &self.payload {
            Payload::ConnectionCurve(d) => ConnectionCurve::from_doc(d),
            other => Err(wrong_kind("connection_curve", other)),
        }
    }

    pub fn structure_map(&self) -> Result<StructureMapCurve> {
        match &self.payload {
            Payload::StructureMapCurve(d) => StructureMapCurve::from_doc(d),
            other => Err(wrong_kind("structure_map_curve", other)),
        }
    }

    pub fn symplecto(&self) -> Result<SymplectoCurve> {
        match &self.payload {
            Payload::SymplectoCurve(d) => SymplectoCurve::from_doc(d),
            other => Err(wrong_kind("symplecto_curve", other)),
        }
    }

    pub fn poly_map(&self) -> Result<FormalMap> {
        match &self.payload {
            Payload::PolyMap(d) => FormalMap::from_doc(d),
            other => Err(wrong_kind("poly_map", other)),
        }
    }
}

fn wrong_kind(want: &str, got: &Payload) -> Error {
    Error::parse(format!("expected kind `{want}`, found `{}`", got.kind()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvature::third_derivative;
    use crate::fourier::{FourierScalar, SymplecticData, TensorField};

    fn sample() -> ConnectionCurve {
        let sd = SymplecticData::standard(4).unwrap();
        ConnectionCurve::new(sd, vec![third_derivative(&FourierScalar::cos(&[1, 0, 0, 0])), TensorField::zeros(4, 3)]).unwrap()
    }

    #[test]
    fn round_trip_with_provenance() {
        let c = sample();
        let doc = Document::new(Payload::ConnectionCurve(c.to_doc())).with_provenance(Provenance {
            generator: "gradient".into(),
            version: "test".into(),
            params: [("f".to_string(), "cos(1,0,0,0)".to_string())].into_iter().collect(),
        });
        let text = doc.to_json();
        assert!(text.contains("\"kind\": \"connection_curve\""));
        let back = Document::parse(&text).unwrap();
        assert_eq!(back, doc);
        assert_eq!(back.connection().unwrap(), c);
        assert_eq!(Document::parse(&back.to_json()).unwrap().to_json(), text);
    }

    #[test]
    fn errors_carry_context() {
        let err = Document::parse("{\"kind\": \"connection_curve\",\n \"dim\": 4,").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
        let err = Document::parse("{\"kind\": \"connection_curve\", \"dim\": \"four\"}").unwrap_err();
        assert!(err.to_string().contains("dim"), "{err}");
        let err = Document::parse("{\"dim\": 4}").unwrap_err();
        assert!(err.to_string().contains("kind"), "{err}");
        let doc = Document::new(Payload::ConnectionCurve(sample().to_doc()));
        assert!(doc.structure_map().is_err());
    }
}
