use std::io::Write;

use serde::{Deserialize, Serialize};

use super::SubtitleDoc;

/// One row of the per-cue table written during pre-processing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CueTableRow {
    pub id: u32,
    pub start_ms: u64,
    pub end_ms: u64,
    /// Lines joined with a literal backslash-n escape.
    pub text: String,
    pub cpl_max: usize,
    pub cps: f64,
}

pub fn to_table(doc: &SubtitleDoc) -> Vec<CueTableRow> {
    doc.cues
        .iter()
        .map(|cue| {
            let seconds = cue.duration_ms() as f64 / 1000.0;
            CueTableRow {
                id: cue.id,
                start_ms: cue.start.ms(),
                end_ms: cue.end.ms(),
                text: cue.lines.join("\\n"),
                cpl_max: cue.max_line_chars(),
                cps: cue.char_count() as f64 / seconds,
            }
        })
        .collect()
}

/// Writes rows as RFC 4180 CSV with the header
/// `id,start_ms,end_ms,text,cpl_max,cps`.
pub fn write_csv<W: Write>(rows: &[CueTableRow], out: W) -> csv::Result<()> {
    let mut writer = csv::WriterBuilder::new().has_headers(true).from_writer(out);
    if rows.is_empty() {
        writer.write_record(["id", "start_ms", "end_ms", "text", "cpl_max", "cps"])?;
    }
    for row in rows {
        writer.serialize(row)?;
    }
    writer.flush()?;
    Ok(())
}
