//! Shared helpers for the line-based and structured text formats.

/// Drops leading `#` comment lines (used for scale headers) from a document.
pub(crate) fn strip_comment_header(s: &str) -> &str {
    let mut rest = s;
    loop {
        let trimmed = rest.trim_start();
        if let Some(stripped) = trimmed.strip_prefix('#') {
            match stripped.find('\n') {
                Some(i) => rest = &stripped[i + 1..],
                None => return "",
            }
        } else {
            return trimmed;
        }
    }
}

/// Reads the rest of a `# key value...` header line, if present.
pub(crate) fn header_value<'a>(s: &'a str, key: &str) -> Option<&'a str> {
    for line in s.lines() {
        let t = line.trim();
        if let Some(body) = t.strip_prefix('#') {
            let body = body.trim_start();
            if let Some(rest) = body.strip_prefix(key) {
                if rest.is_empty() || rest.starts_with(char::is_whitespace) {
                    return Some(rest.trim());
                }
            }
        } else if !t.is_empty() {
            break;
        }
    }
    None
}

pub(crate) fn parse_f64(tok: &str) -> crate::Result<f64> {
    let v: f64 = tok
        .parse()
        .map_err(|_| crate::Error::parse(format!("bad number `{tok}`")))?;
    if !v.is_finite() {
        return Err(crate::Error::parse(format!("non-finite number `{tok}`")));
    }
    Ok(v)
}

pub(crate) fn parse_usize(tok: &str) -> crate::Result<usize> {
    tok.parse()
        .map_err(|_| crate::Error::parse(format!("bad integer `{tok}`")))
}
