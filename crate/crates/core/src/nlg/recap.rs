use super::{display_value, join_list};
use crate::catalog::Catalog;
use crate::model::{InformationNeed, Operator, SlotConstraint, SlotName, Value};

/// Recap of an information need without constraints.
pub const EMPTY_RECAP: &str = "You have not told me any preferences yet.";

/// Inclusive bound of an ordering constraint, when it has one.
fn lower(sc: &SlotConstraint) -> Option<Value> {
    match (sc.op, &sc.value) {
        (Operator::Geq, v) => Some(v.clone()),
        (Operator::Gt, Value::Int(i)) => Some(Value::Int(i + 1)),
        _ => None,
    }
}

fn upper(sc: &SlotConstraint) -> Option<Value> {
    match (sc.op, &sc.value) {
        (Operator::Leq, v) => Some(v.clone()),
        (Operator::Lt, Value::Int(i)) => Some(Value::Int(i - 1)),
        _ => None,
    }
}

fn phrase(catalog: &Catalog, slot: SlotName, sc: &SlotConstraint) -> String {
    let v = display_value(catalog, slot, &sc.value);
    match sc.op {
        Operator::Eq => v,
        Operator::Neq => format!("not {v}"),
        Operator::Lt => format!("before {v}"),
        Operator::Gt => format!("after {v}"),
        Operator::Leq => format!("up to {v}"),
        Operator::Geq => format!("from {v} on"),
    }
}

fn slot_phrase(catalog: &Catalog, slot: SlotName, list: &[SlotConstraint]) -> String {
    if let [a, b] = list {
        let bounds = lower(a).zip(upper(b)).or_else(|| lower(b).zip(upper(a)));
        if let Some((lo, hi)) = bounds {
            return format!(
                "from {} to {}",
                display_value(catalog, slot, &lo),
                display_value(catalog, slot, &hi)
            );
        }
    }
    let parts: Vec<String> = list.iter().map(|sc| phrase(catalog, slot, sc)).collect();
    join_list(&parts)
}

/// One-line recap of the stated preferences, slots in the order they were
/// first mentioned. Slots marked as "don't care" are left out.
pub fn summarize_in(need: &InformationNeed, catalog: &Catalog) -> String {
    let parts: Vec<String> = need
        .constraints
        .iter()
        .filter(|(_, list)| !list.is_empty())
        .map(|(slot, list)| format!("{} {}", slot.label(), slot_phrase(catalog, *slot, list)))
        .collect();
    if parts.is_empty() {
        return EMPTY_RECAP.to_string();
    }
    format!("Your preferences so far: {}.", parts.join("; "))
}
