use super::{normalized_lines, Cue, SubtitleDoc, SubtitleError, SubtitleFormat, Timecode};
use crate::region::{snap, Region, REGION_GRID};

const DEFAULT_HEIGHT: f64 = 0.1;
const DEFAULT_WIDTH: f64 = 0.6;

pub fn parse_vtt(text: &str) -> Result<SubtitleDoc, SubtitleError> {
    let lines = normalized_lines(text);
    let first = lines.first().copied().unwrap_or("");
    let magic_ok = first
        .strip_prefix("WEBVTT")
        .is_some_and(|rest| rest.is_empty() || rest.starts_with([' ', '\t']));
    if !magic_ok {
        return Err(SubtitleError::MissingMagic);
    }

    // Split into blocks of consecutive non-blank lines, remembering where
    // each block starts for error reporting.
    let mut blocks: Vec<(usize, Vec<&str>)> = Vec::new();
    let mut current: Option<(usize, Vec<&str>)> = None;
    for (idx, line) in lines.iter().enumerate() {
        if line.trim().is_empty() {
            if let Some(block) = current.take() {
                blocks.push(block);
            }
        } else {
            current.get_or_insert_with(|| (idx + 1, Vec::new())).1.push(line);
        }
    }
    if let Some(block) = current.take() {
        blocks.push(block);
    }

    let mut header_blocks = Vec::new();
    let mut cues = Vec::new();
    for (n, (start_line, block)) in blocks.into_iter().enumerate() {
        if n == 0 {
            header_blocks.push(block.join("\n"));
            continue;
        }
        let head = block[0];
        if ["NOTE", "STYLE", "REGION"].iter().any(|kw| {
            head.strip_prefix(kw)
                .is_some_and(|rest| rest.is_empty() || rest.starts_with([' ', '\t']))
        }) {
            header_blocks.push(block.join("\n"));
            continue;
        }
        let ordinal = cues.len() + 1;
        // An optional identifier line precedes the timing line.
        let timing_idx = if head.contains("-->") { 0 } else { 1 };
        let timing_line_no = start_line + timing_idx;
        let Some(timing) = block.get(timing_idx) else {
            return Err(SubtitleError::MissingTiming {
                line: start_line,
                text: head.to_string(),
            });
        };
        let (start, end, settings) = parse_timing(timing, timing_line_no)?;
        if start >= end {
            return Err(SubtitleError::InvertedInterval {
                line: timing_line_no,
                cue: ordinal,
            });
        }
        let text_lines: Vec<String> =
            block[timing_idx + 1..].iter().map(|l| l.to_string()).collect();
        if text_lines.is_empty() {
            return Err(SubtitleError::EmptyCue {
                line: timing_line_no,
                cue: ordinal,
            });
        }
        let mut cue = Cue::new(0, start.0, end.0, text_lines);
        cue.position = region_from_settings(&settings);
        cue.settings = settings;
        cues.push(cue);
    }

    let header = header_blocks.join("\n\n");
    let mut doc = SubtitleDoc::new(SubtitleFormat::Vtt, cues);
    doc.header = (header.trim_end() != "WEBVTT").then(|| header.trim_end().to_string());
    doc.renumber();
    Ok(doc)
}

fn parse_timing(line: &str, line_no: usize) -> Result<(Timecode, Timecode, String), SubtitleError> {
    let Some((left, right)) = line.split_once("-->") else {
        return Err(SubtitleError::MissingTiming {
            line: line_no,
            text: line.to_string(),
        });
    };
    let bad = || SubtitleError::Timecode {
        line: line_no,
        text: line.to_string(),
    };
    let mut right = right.split_whitespace();
    let start = Timecode::parse_vtt(left.trim()).ok_or_else(bad)?;
    let end = Timecode::parse_vtt(right.next().ok_or_else(bad)?).ok_or_else(bad)?;
    let settings = right.collect::<Vec<_>>().join(" ");
    Ok((start, end, settings))
}

pub fn serialize_vtt(doc: &SubtitleDoc) -> String {
    let mut out = String::new();
    out.push_str(doc.header.as_deref().map(str::trim_end).unwrap_or("WEBVTT"));
    out.push('\n');
    for cue in &doc.cues {
        out.push('\n');
        out.push_str(&format!("{} --> {}", cue.start.to_vtt(), cue.end.to_vtt()));
        let settings = match &cue.position {
            Some(region) if region_from_settings(&cue.settings).is_none() => {
                settings_with_region(&cue.settings, region)
            }
            _ => cue.settings.clone(),
        };
        if !settings.is_empty() {
            out.push(' ');
            out.push_str(&settings);
        }
        out.push('\n');
        for line in &cue.lines {
            out.push_str(line);
            out.push('\n');
        }
    }
    out
}

/// Percentage setting value in hundredths of a percent, e.g. `"45.5%"` → 4550.
fn percent_hundredths(value: &str) -> Option<i64> {
    let value = value.split(',').next()?;
    let number: f64 = value.strip_suffix('%')?.parse().ok()?;
    (0.0..=100.0)
        .contains(&number)
        .then(|| (number * 100.0).round() as i64)
}

fn format_percent(fraction: f64) -> String {
    let hundredths = (fraction * REGION_GRID).round() as i64;
    if hundredths % 100 == 0 {
        format!("{}%", hundredths / 100)
    } else {
        let s = format!("{}.{:02}", hundredths / 100, hundredths % 100);
        format!("{}%", s.trim_end_matches('0'))
    }
}

/// Maps `line:`, `position:`, `size:` and `align:` percentages onto a
/// normalized region. `line` gives the top edge; `position` is the box
/// anchor (centre unless aligned left/start or right/end); `size` the width.
pub fn region_from_settings(settings: &str) -> Option<Region> {
    let mut line = None;
    let mut position = None;
    let mut size = None;
    let mut align = "center";
    for token in settings.split_whitespace() {
        let Some((key, value)) = token.split_once(':') else {
            continue;
        };
        match key {
            "line" => line = percent_hundredths(value),
            "position" => position = percent_hundredths(value),
            "size" => size = percent_hundredths(value),
            "align" => align = value,
            _ => {}
        }
    }
    let y = line? as f64 / REGION_GRID;
    let h = DEFAULT_HEIGHT.min(1.0 - y);
    let w = size.map_or(DEFAULT_WIDTH, |s| s as f64 / REGION_GRID);
    if h <= 0.0 || w <= 0.0 {
        return None;
    }
    let x = match position {
        None => (1.0 - w) / 2.0,
        Some(p) => {
            let anchor = p as f64 / REGION_GRID;
            match align {
                "left" | "start" => anchor,
                "right" | "end" => anchor - w,
                _ => anchor - w / 2.0,
            }
        }
    };
    let x = snap(x).clamp(0.0, snap(1.0 - w));
    Region::new(x, y, w, snap(h))
}

/// Rewrites placement-related settings so they describe `region`, keeping
/// any other settings in their original order.
pub(crate) fn settings_with_region(settings: &str, region: &Region) -> String {
    let mut kept: Vec<String> = settings
        .split_whitespace()
        .filter(|t| {
            !["line:", "position:", "size:", "align:"]
                .iter()
                .any(|p| t.starts_with(p))
        })
        .map(str::to_string)
        .collect();
    kept.push(format!("line:{}", format_percent(region.y)));
    kept.push(format!("position:{}", format_percent(region.x + region.w / 2.0)));
    kept.push(format!("size:{}", format_percent(region.w)));
    kept.push("align:center".to_string());
    kept.join(" ")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal() {
        let doc = parse_vtt("WEBVTT\n\n00:00:01.000 --> 00:00:02.000\nHi\n").unwrap();
        assert_eq!(doc.cues.len(), 1);
        assert_eq!(doc.header, None);
        assert_eq!(serialize_vtt(&doc), "WEBVTT\n\n00:00:01.000 --> 00:00:02.000\nHi\n");
    }

    #[test]
    fn missing_magic() {
        assert_eq!(parse_vtt("00:00:01.000 --> 00:00:02.000\nHi\n"), Err(SubtitleError::MissingMagic));
        assert_eq!(parse_vtt("WEBVTTX\n"), Err(SubtitleError::MissingMagic));
    }

    #[test]
    fn comma_timecode_is_an_error() {
        let err = parse_vtt("WEBVTT\n\n00:00:01,000 --> 00:00:02,000\nHi\n").unwrap_err();
        assert!(matches!(err, SubtitleError::Timecode { line: 3, .. }), "{err:?}");
    }

    /// Expected regions transcribed from the WebVTT cue-setting semantics:
    /// `line` percentage is the box top, `position` anchors the box
    /// according to `align`, `size` is the box width.
    #[test]
    fn settings_mapping_table() {
        let table: &[(&str, Option<(f64, f64, f64, f64)>)] = &[
            ("line:10%", Some((0.2, 0.1, 0.6, 0.1))),
            ("line:90% align:center", Some((0.2, 0.9, 0.6, 0.1))),
            ("line:0% position:50% size:40%", Some((0.3, 0.0, 0.4, 0.1))),
            ("line:50% position:10% align:left size:30%", Some((0.1, 0.5, 0.3, 0.1))),
            ("line:50% position:90% align:end size:30%", Some((0.6, 0.5, 0.3, 0.1))),
            ("line:95%", Some((0.2, 0.95, 0.6, 0.05))),
            ("line:100%", None),
            ("line:-1", None),
            ("align:center", None),
            ("", None),
        ];
        for (settings, expected) in table {
            let got = region_from_settings(settings).map(|r| (r.x, r.y, r.w, r.h));
            assert_eq!(got, *expected, "{settings}");
        }
    }

    #[test]
    fn header_blocks_and_identifiers() {
        let text = "WEBVTT - demo\nKind: captions\n\nNOTE a comment\nspanning lines\n\nintro\n00:01.000 --> 00:02.000 line:10% align:center\n<i>Hi</i>\nthere\n\nSTYLE\n::cue { color: red }\n\n00:00:03.000 --> 00:00:04.000\nBye\n";
        let doc = parse_vtt(text).unwrap();
        assert_eq!(doc.cues.len(), 2);
        assert_eq!(doc.cues[0].settings, "line:10% align:center");
        assert_eq!(doc.cues[0].position.unwrap().y, 0.1);
        assert_eq!(doc.cues[0].lines, vec!["<i>Hi</i>", "there"]);
        let header = doc.header.as_deref().unwrap();
        assert!(header.starts_with("WEBVTT - demo\nKind: captions\n\nNOTE a comment"));
        assert!(header.ends_with("STYLE\n::cue { color: red }"));
        assert_eq!(parse_vtt(&serialize_vtt(&doc)).unwrap(), doc);
    }

    #[test]
    fn position_hint_emits_line_setting() {
        let mut doc = parse_vtt("WEBVTT\n\n00:00:01.000 --> 00:00:02.000\nHi\n").unwrap();
        doc.cues[0].position = Region::new(0.2, 0.45, 0.6, 0.1);
        let out = serialize_vtt(&doc);
        assert!(out.contains("line:45%"), "{out}");
        let back = parse_vtt(&out).unwrap();
        assert_eq!(back.cues[0].position, doc.cues[0].position);
    }

    #[test]
    fn empty_doc_is_header_only() {
        let doc = SubtitleDoc::new(SubtitleFormat::Vtt, vec![]);
        assert_eq!(serialize_vtt(&doc), "WEBVTT\n");
        assert_eq!(parse_vtt("WEBVTT\n").unwrap(), doc);
    }
}
