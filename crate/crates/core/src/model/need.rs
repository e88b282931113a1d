//! The user's information need: accumulated preference constraints.

use std::collections::BTreeSet;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use super::{Author, Constraint, DialogueAct, Intent, ModelError, Operator, SlotName, Value};

/// One `(op, value)` pair held for a slot.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SlotConstraint {
    pub op: Operator,
    pub value: Value,
}

/// Per-slot constraint sets plus the slots the user does not care about.
///
/// Slots keep the order in which they were first constrained so that
/// recaps read in utterance order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct InformationNeed {
    #[serde(default)]
    pub constraints: IndexMap<SlotName, Vec<SlotConstraint>>,
    #[serde(default)]
    pub dont_care: BTreeSet<SlotName>,
}

impl InformationNeed {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.constraints.is_empty()
    }

    /// Number of slots holding at least one constraint.
    pub fn preference_count(&self) -> usize {
        self.constraints.values().filter(|v| !v.is_empty()).count()
    }

    pub fn slot(&self, slot: SlotName) -> &[SlotConstraint] {
        self.constraints.get(&slot).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn is_constrained(&self, slot: SlotName) -> bool {
        !self.slot(slot).is_empty()
    }

    pub fn contains(&self, c: &Constraint) -> bool {
        if c.value == Value::DontCare {
            return self.dont_care.contains(&c.slot);
        }
        self.slot(c.slot)
            .iter()
            .any(|sc| sc.op == c.op && sc.value == c.value)
    }

    /// True if the slot holds the value under any operator.
    pub fn mentions(&self, slot: SlotName, value: &Value) -> bool {
        self.slot(slot).iter().any(|sc| &sc.value == value)
    }

    /// All constraints flattened in slot-arrival order.
    pub fn iter(&self) -> impl Iterator<Item = Constraint> + '_ {
        self.constraints.iter().flat_map(|(slot, list)| {
            list.iter().map(|sc| Constraint {
                slot: *slot,
                op: sc.op,
                value: sc.value.clone(),
            })
        })
    }

    /// Adds a constraint, ignoring exact duplicates. A don't-care marker moves
    /// the slot to `dont_care` and clears it.
    pub fn insert(&mut self, c: Constraint) -> Result<(), ModelError> {
        let c = Constraint::new(c.slot, c.op, c.value)?;
        match c.value {
            Value::Empty => Err(ModelError::InvalidValue {
                slot: c.slot,
                reason: "a preference needs a value".into(),
            }),
            Value::DontCare => {
                self.constraints.shift_remove(&c.slot);
                self.dont_care.insert(c.slot);
                Ok(())
            }
            value => {
                self.dont_care.remove(&c.slot);
                let list = self.constraints.entry(c.slot).or_default();
                let sc = SlotConstraint { op: c.op, value };
                if !list.contains(&sc) {
                    list.push(sc);
                }
                Ok(())
            }
        }
    }

    /// Removes an exactly matching constraint if present, otherwise every
    /// constraint on the slot with that value regardless of operator. Removing
    /// a value that is not held is a no-op; the return value tells which.
    pub fn remove(&mut self, c: &Constraint) -> bool {
        if c.value == Value::DontCare {
            return self.dont_care.remove(&c.slot);
        }
        let Some(list) = self.constraints.get_mut(&c.slot) else {
            return false;
        };
        let before = list.len();
        if let Some(pos) = list
            .iter()
            .position(|sc| sc.op == c.op && sc.value == c.value)
        {
            list.remove(pos);
        } else {
            list.retain(|sc| sc.value != c.value);
        }
        let removed = list.len() != before;
        if list.is_empty() {
            self.constraints.shift_remove(&c.slot);
        }
        removed
    }
}

/// Applies a user `Reveal` or `RemovePreference` act, returning the updated
/// need. The input is left untouched.
pub fn apply_user_act(need: &InformationNeed, act: &DialogueAct) -> Result<InformationNeed, ModelError> {
    if act.author != Author::User {
        return Err(ModelError::IntentNotAllowed {
            intent: act.intent,
            author: act.author,
        });
    }
    let mut next = need.clone();
    match act.intent {
        Intent::Reveal => {
            for c in &act.constraints {
                next.insert(c.clone())?;
            }
        }
        Intent::RemovePreference => {
            for c in &act.constraints {
                let c = Constraint::new(c.slot, c.op, c.value.clone())?;
                if !next.remove(&c) {
                    tracing::debug!(constraint = %c, "remove_preference on absent value ignored");
                }
            }
        }
        other => {
            return Err(ModelError::InvalidAct {
                intent: other,
                reason: "only reveal and remove_preference update the information need".into(),
            })
        }
    }
    Ok(next)
}
