use serde::{Deserialize, Serialize};

use super::*;

/// Pairing of one unit with the data entry and relation it draws from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct UnitBinding {
    pub unit: usize,
    pub data: usize,
    #[serde(with = "relation_serde")]
    pub relation: RelationSpec,
}

/// Pair unit `i` with data entry `min(i, data.len() - 1)`.
pub fn bind_units(spec: &VisualizationSpec) -> Result<Vec<UnitBinding>, Vec<Diagnostic>> {
    let mut errors = Vec::new();
    let last = spec.data.len().saturating_sub(1);
    let bindings = spec
        .units
        .iter()
        .enumerate()
        .map(|(i, unit)| {
            let data = i.min(last);
            let thematic = spec.data.get(data).and_then(|d| d.thematic.as_ref());
            if thematic.is_none() {
                if unit.uses_fields() {
                    errors.push(Diagnostic::error(
                        format!("unit[{i}]"),
                        format!("unit binds data fields but its data entry data[{data}] has no thematic layer"),
                    ));
                } else if unit.unit_type == UnitType::Point {
                    errors.push(Diagnostic::error(
                        format!("unit[{i}]"),
                        format!("point units need a thematic layer, but data[{data}] has none"),
                    ));
                }
            }
            UnitBinding { unit: i, data, relation: spec.relation_for(unit) }
        })
        .collect();
    if errors.is_empty() {
        Ok(bindings)
    } else {
        Err(errors)
    }
}

mod relation_serde {
    use serde::{de::Error, Deserialize, Deserializer, Serialize, Serializer};

    use crate::spec::{Aggregation, RelationSpec, SpatialRelation};

    #[derive(Serialize, Deserialize)]
    struct Repr {
        spatial: String,
        value: f64,
        aggregation: String,
    }

    pub fn serialize<S: Serializer>(r: &RelationSpec, s: S) -> Result<S::Ok, S::Error> {
        Repr {
            spatial: r.spatial.as_str().to_string(),
            value: r.value,
            aggregation: r.aggregation.as_str().to_string(),
        }
        .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<RelationSpec, D::Error> {
        let r = Repr::deserialize(d)?;
        Ok(RelationSpec {
            spatial: SpatialRelation::from_token(&r.spatial)
                .ok_or_else(|| D::Error::custom("bad spatial relation"))?,
            value: r.value,
            aggregation: Aggregation::from_token(&r.aggregation)
                .ok_or_else(|| D::Error::custom("bad aggregation"))?,
        })
    }
}
