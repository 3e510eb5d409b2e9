use std::collections::BTreeMap;

use serde::de::Error as _;
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::Value;
use thiserror::Error;

use super::{validate_and_normalize, Assignment, Instance, ModelError, ProblemKind, RawInstance};
use crate::rational::{format_rational, parse_rational, Rational};

#[derive(Debug, Error)]
pub enum JsonError {
    #[error("malformed JSON: {0}")]
    Syntax(#[from] serde_json::Error),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("assignment key `{0}` is not a set id")]
    BadKey(String),
}

/// A rational written as a JSON integer, decimal, or `"a/b"` string.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Num(Rational);

impl<'de> Deserialize<'de> for Num {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = match Value::deserialize(d)? {
            // arbitrary_precision keeps the literal text, so decimals stay exact
            Value::Number(n) => n.to_string(),
            Value::String(s) => s,
            other => return Err(D::Error::custom(format!("expected a number, got {other}"))),
        };
        parse_rational(&text).map(Num).map_err(D::Error::custom)
    }
}

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(&self.0))
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    kind: Option<ProblemKind>,
    items: Vec<ItemDoc>,
    sets: Vec<SetDoc>,
    knapsacks: Vec<KnapsackDoc>,
    clusters: Vec<ClusterDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ItemDoc {
    id: usize,
    profit: Num,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SetDoc {
    id: usize,
    cost: Num,
    items: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct KnapsackDoc {
    id: usize,
    capacity: Num,
    cluster: usize,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ClusterDoc {
    id: usize,
    capacity: Num,
}

/// Parses and normalizes an instance document.
pub fn parse_instance(text: &[u8]) -> Result<Instance, JsonError> {
    let doc: InstanceDoc = serde_json::from_slice(text)?;
    let raw = RawInstance {
        kind: doc.kind,
        items: doc.items.into_iter().map(|i| (i.id, i.profit.0)).collect(),
        sets: doc.sets.into_iter().map(|s| (s.id, s.cost.0, s.items)).collect(),
        knapsacks: doc.knapsacks.into_iter().map(|k| (k.id, k.capacity.0, k.cluster)).collect(),
        clusters: doc.clusters.into_iter().map(|c| (c.id, c.capacity.0)).collect(),
    };
    Ok(validate_and_normalize(raw)?)
}

pub fn serialize_instance(inst: &Instance) -> Vec<u8> {
    let doc = InstanceDoc {
        kind: Some(inst.kind()),
        items: inst.items().iter().map(|i| ItemDoc { id: i.id, profit: Num(i.profit.clone()) }).collect(),
        sets: inst
            .sets()
            .iter()
            .map(|s| SetDoc { id: s.id, cost: Num(s.cost.clone()), items: s.items.clone() })
            .collect(),
        knapsacks: inst
            .knapsacks()
            .iter()
            .map(|k| KnapsackDoc { id: k.id, capacity: Num(k.capacity.clone()), cluster: k.cluster })
            .collect(),
        clusters: inst
            .clusters()
            .iter()
            .map(|c| ClusterDoc { id: c.id, capacity: Num(c.capacity.clone()) })
            .collect(),
    };
    let mut out = serde_json::to_vec_pretty(&doc).expect("instance documents always serialize");
    out.push(b'\n');
    out
}

/// `{"0": 1, "1": null, ...}` keyed by set id in numeric order.
struct SlotMap<'a>(&'a Assignment);

impl Serialize for SlotMap<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (j, k) in self.0.slots().iter().enumerate() {
            map.serialize_entry(&j.to_string(), k)?;
        }
        map.end()
    }
}

/// The assignment document: `{"assignment": {...}, "value": "9"}`.
pub fn assignment_to_json(a: &Assignment, value: &Rational) -> Value {
    let mut obj = serde_json::Map::new();
    obj.insert("assignment".into(), serde_json::to_value(SlotMap(a)).expect("plain map"));
    obj.insert("value".into(), Value::String(format_rational(value)));
    Value::Object(obj)
}

#[derive(Deserialize)]
struct AssignmentDoc {
    assignment: BTreeMap<String, Option<usize>>,
    #[serde(default)]
    value: Option<Num>,
}

/// Reads an assignment document for an instance with `num_sets` sets.
/// Sets not mentioned stay unassigned. Returns the claimed value if present.
/// Extra top-level fields (certificates) are ignored.
pub fn assignment_from_json(
    text: &[u8],
    num_sets: usize,
) -> Result<(Assignment, Option<Rational>), JsonError> {
    let doc: AssignmentDoc = serde_json::from_slice(text)?;
    let mut a = Assignment::unassigned(num_sets);
    for (key, slot) in doc.assignment {
        let set: usize = key.parse().map_err(|_| JsonError::BadKey(key.clone()))?;
        if set >= num_sets {
            return Err(JsonError::BadKey(key));
        }
        if let Some(k) = slot {
            a.assign(set, k);
        }
    }
    Ok((a, doc.value.map(|n| n.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    const MINIMAL: &str = r#"{"kind": "mkp", "items":[{"id":0,"profit":"5"}],
        "sets":[{"id":0,"cost":"2","items":[0]}],
        "knapsacks":[{"id":0,"capacity":"4","cluster":0}],
        "clusters":[{"id":0,"capacity":"7"}]}"#;

    #[test]
    fn parses_minimal_document() {
        let inst = parse_instance(MINIMAL.as_bytes()).unwrap();
        assert_eq!(inst.num_items(), 1);
        assert_eq!(inst.cost(0), &int(2));
        assert_eq!(inst.capacity(0), &int(4));
        assert_eq!(inst.kind(), ProblemKind::Mkp);
    }

    #[test]
    fn accepts_every_number_form() {
        let doc = r#"{"items":[{"id":0,"profit":2.5}],
            "sets":[{"id":0,"cost":"1/3","items":[0]}],
            "knapsacks":[{"id":0,"capacity":4,"cluster":0}],
            "clusters":[{"id":0,"capacity":"0.1e2"}]}"#;
        let inst = parse_instance(doc.as_bytes()).unwrap();
        assert_eq!(inst.items()[0].profit, ratio(5, 2));
        assert_eq!(inst.cost(0), &ratio(1, 3));
        assert_eq!(inst.clusters()[0].capacity, int(10));
    }

    #[test]
    fn decimal_literals_are_exact() {
        let doc = MINIMAL.replace(r#""profit":"5""#, r#""profit":0.1"#);
        let inst = parse_instance(doc.as_bytes()).unwrap();
        assert_eq!(inst.items()[0].profit, ratio(1, 10));
    }

    #[test]
    fn rejects_unknown_fields_and_bad_numbers() {
        let doc = MINIMAL.replace(r#""kind": "mkp","#, r#""kind": "mkp", "extra": 1,"#);
        assert!(matches!(parse_instance(doc.as_bytes()), Err(JsonError::Syntax(_))));
        let doc = MINIMAL.replace(r#""cost":"2""#, r#""cost":"inf""#);
        assert!(parse_instance(doc.as_bytes()).is_err());
        let doc = MINIMAL.replace(r#""cost":"2""#, r#""cost":true"#);
        assert!(parse_instance(doc.as_bytes()).is_err());
        assert!(parse_instance(b"{not json").is_err());
    }

    #[test]
    fn validation_errors_surface() {
        let doc = MINIMAL.replace(r#""items":[0]"#, r#""items":[4]"#);
        assert!(matches!(
            parse_instance(doc.as_bytes()),
            Err(JsonError::Model(ModelError::UnknownItem { set: 0, item: 4 }))
        ));
    }

    #[test]
    fn serialization_round_trips() {
        let inst = parse_instance(MINIMAL.as_bytes()).unwrap();
        let bytes = serialize_instance(&inst);
        assert_eq!(parse_instance(&bytes).unwrap(), inst);
    }

    #[test]
    fn assignment_document_shape() {
        let a = Assignment::from_slots(vec![Some(1), None, Some(0)]);
        let v = assignment_to_json(&a, &int(9));
        assert_eq!(
            serde_json::to_string(&v).unwrap(),
            r#"{"assignment":{"0":1,"1":null,"2":0},"value":"9"}"#
        );
        let (back, value) = assignment_from_json(v.to_string().as_bytes(), 3).unwrap();
        assert_eq!(back, a);
        assert_eq!(value, Some(int(9)));
        assert!(assignment_from_json(br#"{"assignment":{"5":0}}"#, 3).is_err());
        let (partial, none) = assignment_from_json(br#"{"assignment":{"2":1}}"#, 3).unwrap();
        assert_eq!(partial.slots(), &[None, None, Some(1)]);
        assert!(none.is_none());
    }
}
