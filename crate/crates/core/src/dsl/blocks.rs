//! Fenced code extraction.

use super::{Diagnostic, DiagnosticKind};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodeBlock {
    pub text: String,
    /// Byte offset of `text` in the transcript.
    pub offset: usize,
}

/// Contents of fenced regions in order, or the whole transcript when there are none.
pub fn extract_code_blocks(transcript: &str) -> Vec<String> {
    extract_blocks(transcript).0.into_iter().map(|b| b.text).collect()
}

fn fence_tag(line: &str) -> Option<&str> {
    line.trim_start().strip_prefix("```").map(|rest| rest.trim_start_matches('`').trim())
}

/// Same as [`extract_code_blocks`] with offsets and fence diagnostics.
pub fn extract_blocks(transcript: &str) -> (Vec<CodeBlock>, Vec<Diagnostic>) {
    let mut blocks = Vec::new();
    let mut diags = Vec::new();
    // byte offset where the current block's content starts, and the opening fence span
    let mut open: Option<(usize, std::ops::Range<usize>)> = None;
    let mut saw_fence = false;
    let mut pos = 0;

    let push = |blocks: &mut Vec<CodeBlock>, start: usize, end: usize| {
        let text = &transcript[start..end];
        if !text.trim().is_empty() {
            blocks.push(CodeBlock { text: text.to_string(), offset: start });
        }
    };

    for line in transcript.split_inclusive('\n') {
        let line_start = pos;
        pos += line.len();
        let Some(tag) = fence_tag(line) else { continue };
        saw_fence = true;
        let fence_span = line_start..line_start + line.trim_end().len();
        match &open {
            None => open = Some((pos, fence_span)),
            Some((start, _)) if !tag.is_empty() => {
                diags.push(Diagnostic::warning(
                    DiagnosticKind::NestedFence,
                    fence_span.clone(),
                    "fence with a language tag inside an open block; treated as a new block",
                ));
                push(&mut blocks, *start, line_start);
                open = Some((pos, fence_span));
            }
            Some((start, _)) => {
                push(&mut blocks, *start, line_start);
                open = None;
            }
        }
    }
    if let Some((start, fence)) = open {
        diags.push(Diagnostic::warning(DiagnosticKind::UnclosedFence, fence, "code fence is never closed"));
        push(&mut blocks, start, transcript.len());
    }
    if !saw_fence {
        blocks.push(CodeBlock { text: transcript.to_string(), offset: 0 });
    }
    (blocks, diags)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_blocks() {
        let t = "Here:\n```python\na = 1\n```\ntext\n```\nb = 2\n```\n";
        assert_eq!(extract_code_blocks(t), vec!["a = 1\n", "b = 2\n"]);
        let (blocks, diags) = extract_blocks(t);
        assert!(diags.is_empty());
        assert_eq!(&t[blocks[1].offset..blocks[1].offset + 5], "b = 2");
    }

    #[test]
    fn no_fences_returns_transcript() {
        let t = "action = BasicAction(...)";
        assert_eq!(extract_code_blocks(t), vec![t]);
        assert_eq!(extract_code_blocks(""), vec![""]);
    }

    #[test]
    fn unclosed_fence_returns_tail() {
        let t = "```python\nx = 1\n```\nmore\n```python\ny = 2\n";
        let (blocks, diags) = extract_blocks(t);
        assert_eq!(blocks.iter().map(|b| b.text.as_str()).collect::<Vec<_>>(), vec!["x = 1\n", "y = 2\n"]);
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].kind, DiagnosticKind::UnclosedFence);
    }

    #[test]
    fn nested_fence_starts_new_block() {
        let t = "```\n```python\nz = 3\n```\n```\n";
        let (blocks, diags) = extract_blocks(t);
        assert_eq!(blocks.len(), 1);
        assert_eq!(blocks[0].text, "z = 3\n");
        let kinds: Vec<_> = diags.iter().map(|d| d.kind).collect();
        assert_eq!(kinds, vec![DiagnosticKind::NestedFence, DiagnosticKind::UnclosedFence]);
    }
}
