//! Minimal XML well-formedness check used to validate emitted SVG files:
//! tags must nest properly, attributes must be quoted, and exactly one root
//! element must span the document.

pub fn well_formed(text: &str) -> bool {
    let bytes = text.as_bytes();
    let mut stack: Vec<String> = Vec::new();
    let mut i = 0usize;
    let mut seen_root = false;
    while i < bytes.len() {
        if bytes[i] != b'<' {
            if stack.is_empty() && !bytes[i].is_ascii_whitespace() && seen_root {
                return false; // content after the root element
            }
            i += 1;
            continue;
        }
        let close = match text[i..].find('>') {
            Some(off) => i + off,
            None => return false,
        };
        let inner = &text[i + 1..close];
        if let Some(rest) = inner.strip_prefix('/') {
            let name = rest.trim();
            match stack.pop() {
                Some(open) if open == name => {}
                _ => return false,
            }
        } else if inner.starts_with('?') || inner.starts_with('!') {
            // declaration or comment; skip
        } else {
            let self_closing = inner.ends_with('/');
            let body = if self_closing {
                &inner[..inner.len() - 1]
            } else {
                inner
            };
            let name = body.split_whitespace().next().unwrap_or("");
            if name.is_empty() {
                return false;
            }
            // Attribute values must be double-quoted and balanced.
            if body.matches('"').count() % 2 != 0 {
                return false;
            }
            if stack.is_empty() {
                if seen_root {
                    return false;
                }
                seen_root = true;
            }
            if !self_closing {
                stack.push(name.to_string());
            }
        }
        i = close + 1;
    }
    stack.is_empty() && seen_root
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accepts_nested_and_self_closing() {
        assert!(well_formed("<svg><g><rect x=\"1\"/></g></svg>"));
    }

    #[test]
    fn rejects_mismatched_tags() {
        assert!(!well_formed("<svg><g></svg></g>"));
        assert!(!well_formed("<svg><g>"));
        assert!(!well_formed("<svg attr=\"unterminated></svg>"));
    }
}
