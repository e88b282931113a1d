use crate::model::{InformationNeed, Operator, SlotConstraint, SlotName, Value};

use super::item::{Indexed, Item};

/// How several `=` values on one multi-valued slot combine.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MatchMode {
    /// Every stated value must be present (romance *and* comedy).
    #[default]
    Conjunctive,
    /// Any stated value suffices.
    Disjunctive,
}

fn compare(lhs: f64, op: Operator, rhs: f64) -> bool {
    match op {
        Operator::Eq => lhs == rhs,
        Operator::Neq => lhs != rhs,
        Operator::Lt => lhs < rhs,
        Operator::Gt => lhs > rhs,
        Operator::Leq => lhs <= rhs,
        Operator::Geq => lhs >= rhs,
    }
}

fn numeric_attr(ix: &Indexed, slot: SlotName) -> Option<f64> {
    match slot {
        SlotName::ReleaseYear => Some(ix.item.release_year as f64),
        SlotName::Duration => ix.item.duration.map(f64::from),
        SlotName::Rating => Some(ix.item.rating),
        _ => None,
    }
}

fn text_holds(ix: &Indexed, slot: SlotName, value: &str) -> bool {
    match slot {
        SlotName::Title => ix.title == value,
        SlotName::Plot => ix.plot.contains(value),
        _ => ix.set(slot).is_some_and(|set| set.contains(value)),
    }
}

fn slot_satisfied(ix: &Indexed, slot: SlotName, list: &[SlotConstraint], mode: MatchMode) -> bool {
    if slot.is_numeric() {
        return list.iter().all(|sc| match (numeric_attr(ix, slot), sc.value.as_f64()) {
            (Some(attr), Some(rhs)) => compare(attr, sc.op, rhs),
            _ => false,
        });
    }
    let mut any_eq = false;
    let mut eq_hit = false;
    for sc in list {
        let Value::Text(v) = &sc.value else { continue };
        let holds = text_holds(ix, slot, v);
        match sc.op {
            Operator::Eq => {
                any_eq = true;
                eq_hit |= holds;
                if mode == MatchMode::Conjunctive && !holds {
                    return false;
                }
            }
            Operator::Neq if holds => return false,
            _ => {}
        }
    }
    mode == MatchMode::Conjunctive || !any_eq || eq_hit
}

pub(crate) fn indexed_satisfies(ix: &Indexed, need: &InformationNeed, mode: MatchMode) -> bool {
    need.constraints
        .iter()
        .filter(|(slot, _)| !need.dont_care.contains(slot))
        .all(|(slot, list)| slot_satisfied(ix, *slot, list, mode))
}

/// Whether a single item satisfies every constraint of the need.
pub fn item_satisfies(item: &Item, need: &InformationNeed, mode: MatchMode) -> bool {
    indexed_satisfies(&Indexed::new(item.clone()), need, mode)
}
