use super::{normalized_lines, Cue, SubtitleDoc, SubtitleError, SubtitleFormat, Timecode};

pub fn parse_srt(text: &str) -> Result<SubtitleDoc, SubtitleError> {
    let lines = normalized_lines(text);
    let mut cues = Vec::new();
    let mut i = 0;
    while i < lines.len() {
        if lines[i].trim().is_empty() {
            i += 1;
            continue;
        }
        let ordinal = cues.len() + 1;
        // The numeric index line is optional and its value is ignored.
        let is_index = lines[i].trim().bytes().all(|b| b.is_ascii_digit())
            && lines.get(i + 1).is_some_and(|l| l.contains("-->"));
        if is_index {
            i += 1;
        }
        let timing_line = i + 1;
        let (start, end) = parse_timing(lines[i], timing_line)?;
        if start >= end {
            return Err(SubtitleError::InvertedInterval {
                line: timing_line,
                cue: ordinal,
            });
        }
        i += 1;
        let mut text_lines = Vec::new();
        while i < lines.len() && !lines[i].trim().is_empty() {
            text_lines.push(lines[i].to_string());
            i += 1;
        }
        if text_lines.is_empty() {
            return Err(SubtitleError::EmptyCue {
                line: timing_line,
                cue: ordinal,
            });
        }
        cues.push(Cue::new(0, start.0, end.0, text_lines));
    }
    let mut doc = SubtitleDoc::new(SubtitleFormat::Srt, cues);
    doc.renumber();
    Ok(doc)
}

fn parse_timing(line: &str, line_no: usize) -> Result<(Timecode, Timecode), SubtitleError> {
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
    // Some writers append display coordinates after the end time.
    let end_token = right.split_whitespace().next().ok_or_else(bad)?;
    let start = Timecode::parse_srt(left.trim()).ok_or_else(bad)?;
    let end = Timecode::parse_srt(end_token).ok_or_else(bad)?;
    Ok((start, end))
}

pub fn serialize_srt(doc: &SubtitleDoc) -> String {
    let mut out = String::new();
    for (i, cue) in doc.cues.iter().enumerate() {
        out.push_str(&format!(
            "{}\n{} --> {}\n",
            i + 1,
            cue.start.to_srt(),
            cue.end.to_srt()
        ));
        for line in &cue.lines {
            out.push_str(line);
            out.push('\n');
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_block() {
        let doc = parse_srt("1\n00:00:01,000 --> 00:00:02,500\nHello\n\n").unwrap();
        assert_eq!(doc.cues.len(), 1);
        let cue = &doc.cues[0];
        assert_eq!((cue.start.ms(), cue.end.ms()), (1000, 2500));
        assert_eq!(cue.lines, vec!["Hello"]);
        assert_eq!(serialize_srt(&doc), "1\n00:00:01,000 --> 00:00:02,500\nHello\n\n");
    }

    #[test]
    fn inverted_interval() {
        let err = parse_srt("1\n00:00:02,000 --> 00:00:01,000\nX\n\n").unwrap_err();
        assert_eq!(err, SubtitleError::InvertedInterval { line: 2, cue: 1 });
    }

    #[test]
    fn multi_line_crlf_bom_and_bad_indices() {
        let text = "\u{feff}7\r\n00:00:01,000 --> 00:00:02,000\r\nfirst\r\n\r\n7\r\n00:00:03,000 --> 00:00:04,000\r\nline a\r\nline b\r\n";
        let doc = parse_srt(text).unwrap();
        assert_eq!(doc.cues.len(), 2);
        assert_eq!(doc.cues[1].lines, vec!["line a", "line b"]);
        assert_eq!(doc.cues.iter().map(|c| c.id).collect::<Vec<_>>(), vec![1, 2]);
    }

    #[test]
    fn malformed_timecode_reports_line() {
        let err = parse_srt("1\n00:00:01,000 --> 00:00:02,500\nok\n\n2\n00:00:0x,000 --> 00:00:04,000\nbad\n").unwrap_err();
        assert!(matches!(err, SubtitleError::Timecode { line: 6, .. }), "{err:?}");
        let err = parse_srt("hello there\n").unwrap_err();
        assert!(matches!(err, SubtitleError::MissingTiming { line: 1, .. }));
    }

    #[test]
    fn unsorted_blocks_are_sorted() {
        let doc = parse_srt("1\n00:00:05,000 --> 00:00:06,000\nB\n\n2\n00:00:01,000 --> 00:00:02,000\nA\n").unwrap();
        assert_eq!(doc.cues[0].lines, vec!["A"]);
        assert_eq!(doc.cues[0].id, 1);
    }

    #[test]
    fn empty_doc() {
        let doc = parse_srt("").unwrap();
        assert!(doc.cues.is_empty());
        assert_eq!(serialize_srt(&doc), "");
    }

    #[test]
    fn empty_cue_rejected() {
        let err = parse_srt("1\n00:00:01,000 --> 00:00:02,000\n\n").unwrap_err();
        assert!(matches!(err, SubtitleError::EmptyCue { cue: 1, .. }));
    }
}
