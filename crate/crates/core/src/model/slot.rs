//! Slots, operators and constraint values.
//!
//! The slot set is closed: every attribute a user can state a preference on
//! is one of the [`SlotName`] variants, and each carries a fixed value kind.

use std::fmt;
use std::str::FromStr;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::ModelError;

/// Item attribute over which preferences are stated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SlotName {
    Genres,
    Keywords,
    Actors,
    Directors,
    Title,
    ReleaseYear,
    Duration,
    Rating,
    Plot,
}

/// Value kind declared for a slot by the domain ontology.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlotKind {
    CategoricalMulti,
    PersonMulti,
    FreeText,
    Numeric,
}

impl SlotName {
    pub const ALL: [SlotName; 9] = [
        SlotName::Genres,
        SlotName::Keywords,
        SlotName::Actors,
        SlotName::Directors,
        SlotName::Title,
        SlotName::ReleaseYear,
        SlotName::Duration,
        SlotName::Rating,
        SlotName::Plot,
    ];

    /// Slots backed by a value lexicon built from the catalog.
    pub const LEXICON: [SlotName; 5] = [
        SlotName::Genres,
        SlotName::Keywords,
        SlotName::Actors,
        SlotName::Directors,
        SlotName::Title,
    ];

    pub fn kind(self) -> SlotKind {
        match self {
            SlotName::Genres | SlotName::Keywords => SlotKind::CategoricalMulti,
            SlotName::Actors | SlotName::Directors => SlotKind::PersonMulti,
            SlotName::Title | SlotName::Plot => SlotKind::FreeText,
            SlotName::ReleaseYear | SlotName::Duration | SlotName::Rating => SlotKind::Numeric,
        }
    }

    pub fn is_multi_valued(self) -> bool {
        matches!(
            self.kind(),
            SlotKind::CategoricalMulti | SlotKind::PersonMulti
        )
    }

    pub fn is_numeric(self) -> bool {
        self.kind() == SlotKind::Numeric
    }

    pub fn has_lexicon(self) -> bool {
        Self::LEXICON.contains(&self)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SlotName::Genres => "genres",
            SlotName::Keywords => "keywords",
            SlotName::Actors => "actors",
            SlotName::Directors => "directors",
            SlotName::Title => "title",
            SlotName::ReleaseYear => "release_year",
            SlotName::Duration => "duration",
            SlotName::Rating => "rating",
            SlotName::Plot => "plot",
        }
    }

    /// Human-readable label, e.g. `release year`.
    pub fn label(self) -> &'static str {
        match self {
            SlotName::ReleaseYear => "release year",
            other => other.as_str(),
        }
    }
}

impl fmt::Display for SlotName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SlotName {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SlotName::ALL
            .into_iter()
            .find(|slot| slot.as_str() == s)
            .ok_or_else(|| ModelError::UnknownSlot(s.to_string()))
    }
}

/// Relationship between a slot and its value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Operator {
    Eq,
    Neq,
    Lt,
    Gt,
    Leq,
    Geq,
}

impl Operator {
    pub const ALL: [Operator; 6] = [
        Operator::Eq,
        Operator::Neq,
        Operator::Lt,
        Operator::Gt,
        Operator::Leq,
        Operator::Geq,
    ];

    /// Ordering operators are only meaningful on numeric slots.
    pub fn is_ordering(self) -> bool {
        matches!(
            self,
            Operator::Lt | Operator::Gt | Operator::Leq | Operator::Geq
        )
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Operator::Eq => "=",
            Operator::Neq => "!=",
            Operator::Lt => "<",
            Operator::Gt => ">",
            Operator::Leq => "<=",
            Operator::Geq => ">=",
        }
    }
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// Scalar constraint value.
///
/// Wire form: `null` is [`Value::Empty`] (a slot asked about but not yet
/// filled), the string `"*"` is [`Value::DontCare`], integers and floats map
/// to the numeric variants and every other string is [`Value::Text`].
#[derive(Debug, Clone)]
pub enum Value {
    Empty,
    DontCare,
    Int(i64),
    Decimal(f64),
    Text(String),
}

pub const DONT_CARE_MARKER: &str = "*";

impl Value {
    pub fn text(s: &str) -> Value {
        Value::Text(canonical_text(s))
    }

    pub fn is_filled(&self) -> bool {
        !matches!(self, Value::Empty)
    }

    pub fn as_text(&self) -> Option<&str> {
        match self {
            Value::Text(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Value::Int(i) => Some(*i as f64),
            Value::Decimal(d) => Some(*d),
            _ => None,
        }
    }

    pub fn as_int(&self) -> Option<i64> {
        match self {
            Value::Int(i) => Some(*i),
            _ => None,
        }
    }
}

impl PartialEq for Value {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Value::Empty, Value::Empty) | (Value::DontCare, Value::DontCare) => true,
            (Value::Int(a), Value::Int(b)) => a == b,
            (Value::Decimal(a), Value::Decimal(b)) => a.to_bits() == b.to_bits(),
            (Value::Text(a), Value::Text(b)) => a == b,
            _ => false,
        }
    }
}

impl Eq for Value {}

impl std::hash::Hash for Value {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        std::mem::discriminant(self).hash(state);
        match self {
            Value::Int(i) => i.hash(state),
            Value::Decimal(d) => d.to_bits().hash(state),
            Value::Text(s) => s.hash(state),
            Value::Empty | Value::DontCare => {}
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Empty => f.write_str("?"),
            Value::DontCare => f.write_str("don't care"),
            Value::Int(i) => write!(f, "{i}"),
            Value::Decimal(d) => write!(f, "{d}"),
            Value::Text(s) => f.write_str(s),
        }
    }
}

impl Serialize for Value {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Value::Empty => serializer.serialize_none(),
            Value::DontCare => serializer.serialize_str(DONT_CARE_MARKER),
            Value::Int(i) => serializer.serialize_i64(*i),
            Value::Decimal(d) => serializer.serialize_f64(*d),
            Value::Text(s) => serializer.serialize_str(s),
        }
    }
}

impl<'de> Deserialize<'de> for Value {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct ValueVisitor;

        impl<'de> Visitor<'de> for ValueVisitor {
            type Value = Value;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("null, a number or a string")
            }

            fn visit_unit<E: de::Error>(self) -> Result<Value, E> {
                Ok(Value::Empty)
            }

            fn visit_none<E: de::Error>(self) -> Result<Value, E> {
                Ok(Value::Empty)
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Value, E> {
                Ok(Value::Int(v))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Value, E> {
                i64::try_from(v)
                    .map(Value::Int)
                    .map_err(|_| E::custom("integer out of range"))
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Value, E> {
                if v.is_finite() {
                    Ok(Value::Decimal(v))
                } else {
                    Err(E::custom("non-finite number"))
                }
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Value, E> {
                if v == DONT_CARE_MARKER {
                    Ok(Value::DontCare)
                } else {
                    Ok(Value::Text(v.to_string()))
                }
            }
        }

        deserializer.deserialize_any(ValueVisitor)
    }
}

/// Case-fold and collapse internal whitespace.
pub fn canonical_text(s: &str) -> String {
    s.split_whitespace()
        .map(|w| w.to_lowercase())
        .collect::<Vec<_>>()
        .join(" ")
}

/// One `(slot, op, value)` triple of a dialogue act.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawConstraint")]
pub struct Constraint {
    pub slot: SlotName,
    pub op: Operator,
    pub value: Value,
}

#[derive(Deserialize)]
struct RawConstraint {
    slot: SlotName,
    op: Operator,
    value: Value,
}

impl TryFrom<RawConstraint> for Constraint {
    type Error = ModelError;

    fn try_from(raw: RawConstraint) -> Result<Self, Self::Error> {
        Constraint::new(raw.slot, raw.op, raw.value)
    }
}

impl Constraint {
    /// Validates the value kind against the slot and canonicalizes it.
    pub fn new(slot: SlotName, op: Operator, value: Value) -> Result<Self, ModelError> {
        if op.is_ordering() && !slot.is_numeric() {
            return Err(ModelError::OperatorNotAllowed { slot, op });
        }
        let value = match value {
            Value::Empty => Value::Empty,
            Value::DontCare => {
                if op != Operator::Eq {
                    return Err(ModelError::OperatorNotAllowed { slot, op });
                }
                Value::DontCare
            }
            Value::Text(s) if !slot.is_numeric() => {
                let canonical = canonical_text(&s);
                if canonical.is_empty() || canonical == DONT_CARE_MARKER {
                    return Err(ModelError::InvalidValue {
                        slot,
                        reason: format!("{s:?} is not a valid text value"),
                    });
                }
                Value::Text(canonical)
            }
            Value::Int(i) if slot == SlotName::Rating => Value::Decimal(i as f64),
            Value::Int(i) if slot.is_numeric() => Value::Int(i),
            Value::Decimal(d) if slot == SlotName::Rating && d.is_finite() => {
                Value::Decimal(if d == 0.0 { 0.0 } else { d })
            }
            other => {
                return Err(ModelError::KindMismatch {
                    slot,
                    value: other.to_string(),
                })
            }
        };
        Ok(Constraint { slot, op, value })
    }

    pub fn eq(slot: SlotName, value: impl Into<String>) -> Result<Self, ModelError> {
        Constraint::new(slot, Operator::Eq, Value::Text(value.into()))
    }

    /// A constraint with an unfilled value, used by Elicit and Inquire.
    pub fn asking(slot: SlotName) -> Self {
        Constraint {
            slot,
            op: Operator::Eq,
            value: Value::Empty,
        }
    }

    pub fn dont_care(slot: SlotName) -> Self {
        Constraint {
            slot,
            op: Operator::Eq,
            value: Value::DontCare,
        }
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.slot, self.op, self.value)
    }
}
