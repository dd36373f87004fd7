use std::collections::HashSet;
use std::sync::{Arc, OnceLock};

const BUILTIN: &str = include_str!("../../data/audio_event_labels.txt");

/// The 521-entry audio event class table.
#[derive(Debug, Clone)]
pub struct LabelTable {
    labels: Arc<Vec<String>>,
    index: Arc<HashSet<String>>,
}

impl LabelTable {
    pub fn builtin() -> Self {
        static TABLE: OnceLock<LabelTable> = OnceLock::new();
        TABLE.get_or_init(|| LabelTable::from_lines(BUILTIN)).clone()
    }

    pub fn from_lines(text: &str) -> Self {
        let labels: Vec<String> = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .map(str::to_string)
            .collect();
        let index = labels.iter().cloned().collect();
        LabelTable {
            labels: Arc::new(labels),
            index: Arc::new(index),
        }
    }

    pub fn contains(&self, label: &str) -> bool {
        self.index.contains(label)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }
}
