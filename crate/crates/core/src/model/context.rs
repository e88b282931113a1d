use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use super::ItemId;

/// Feedback a user gave on a recommended item.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeedbackLabel {
    Accepted,
    Rejected,
    DontLike,
    Watched,
    Inquired,
}

impl FeedbackLabel {
    pub const ALL: [FeedbackLabel; 5] = [
        FeedbackLabel::Accepted,
        FeedbackLabel::Rejected,
        FeedbackLabel::DontLike,
        FeedbackLabel::Watched,
        FeedbackLabel::Inquired,
    ];
}

/// Per-item feedback history. Any item present here is never recommended
/// again within the conversation.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DialogueContext {
    entries: IndexMap<ItemId, Vec<FeedbackLabel>>,
}

impl DialogueContext {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn contains(&self, item: &str) -> bool {
        self.entries.contains_key(item)
    }

    pub fn labels(&self, item: &str) -> &[FeedbackLabel] {
        self.entries.get(item).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn items(&self) -> impl Iterator<Item = &ItemId> {
        self.entries.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&ItemId, &[FeedbackLabel])> {
        self.entries.iter().map(|(k, v)| (k, v.as_slice()))
    }

    pub fn record(&mut self, item: &str, label: FeedbackLabel) {
        self.entries.entry(item.to_string()).or_default().push(label);
    }
}

/// Appends `label` to the item's history, returning the updated context.
pub fn record_feedback(dc: &DialogueContext, item: &str, label: FeedbackLabel) -> DialogueContext {
    let mut next = dc.clone();
    next.record(item, label);
    next
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_feedback_creates_entry() {
        let dc = record_feedback(&DialogueContext::new(), "tt1375666", FeedbackLabel::Watched);
        assert_eq!(dc.labels("tt1375666"), &[FeedbackLabel::Watched]);
        assert_eq!(dc.len(), 1);
        assert_eq!(serde_json::to_string(&dc).unwrap(), r#"{"tt1375666":["watched"]}"#);
    }

    #[test]
    fn feedback_appends_in_order() {
        let dc = record_feedback(&DialogueContext::new(), "a", FeedbackLabel::Inquired);
        let dc = record_feedback(&dc, "a", FeedbackLabel::Accepted);
        assert_eq!(dc.labels("a"), &[FeedbackLabel::Inquired, FeedbackLabel::Accepted]);
    }

    #[test]
    fn duplicate_labels_kept() {
        let dc = record_feedback(&DialogueContext::new(), "a", FeedbackLabel::Rejected);
        let dc2 = record_feedback(&dc, "a", FeedbackLabel::Rejected);
        assert_eq!(dc2.labels("a"), &[FeedbackLabel::Rejected, FeedbackLabel::Rejected]);
        // input untouched
        assert_eq!(dc.labels("a").len(), 1);
    }

    #[test]
    fn other_entries_untouched() {
        let dc = record_feedback(&DialogueContext::new(), "a", FeedbackLabel::Watched);
        let dc = record_feedback(&dc, "b", FeedbackLabel::DontLike);
        assert_eq!(dc.labels("a"), &[FeedbackLabel::Watched]);
        assert_eq!(dc.items().collect::<Vec<_>>(), ["a", "b"]);
    }
}
