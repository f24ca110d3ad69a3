//! Raw message bytes to the handful of fields the indicators read.
//!
//! Only a pragmatic slice of the message format is supported: `From`,
//! `Subject` and `Date` headers, and MIME trees of `text/plain`, `text/html`
//! and attachment parts. Header and transfer decoding is delegated to
//! `mailparse`; undecodable sequences are replaced rather than rejected.

mod links;

use std::path::{Path, PathBuf};

use chrono::{DateTime, Utc};
use mailparse::{DispositionType, MailHeaderMap, ParsedMail};
use serde::{Deserialize, Serialize};
use thiserror::Error;
use unicode_normalization::UnicodeNormalization;

pub use links::{
    canonicalize_url, extract_html_links, extract_links, extract_plain_links, html_to_text, Link, Scheme,
};
use links::{looks_like_html, LinkSet};

#[derive(Debug, Error)]
pub enum EmailError {
    #[error("malformed email: {0}")]
    MalformedEmail(String),
    #[error("malformed mbox: {0}")]
    MalformedMbox(String),
    #[error("reading {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// One message as read from disk.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawEmail {
    pub source_path: String,
    pub bytes: Vec<u8>,
}

impl RawEmail {
    pub fn new(source_path: impl Into<String>, bytes: Vec<u8>) -> Self {
        RawEmail { source_path: source_path.into(), bytes }
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self, EmailError> {
        let path = path.as_ref();
        let bytes = std::fs::read(path).map_err(|source| EmailError::Io { path: path.to_path_buf(), source })?;
        Ok(RawEmail::new(path.display().to_string(), bytes))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Attachment {
    pub filename: String,
    /// Lowercased text after the final `.`, empty when there is none.
    pub extension: String,
}

impl Attachment {
    pub fn new(filename: &str) -> Self {
        let base = filename.rsplit(['/', '\\']).next().unwrap_or(filename);
        let extension = match base.rfind('.') {
            Some(i) if i + 1 < base.len() => base[i + 1..].to_lowercase(),
            _ => String::new(),
        };
        Attachment { filename: filename.to_string(), extension }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParsedEmail {
    /// Lowercased addr-spec of the first `From` mailbox.
    pub sender_address: String,
    pub sender_domain: String,
    pub subject: String,
    pub date: Option<DateTime<Utc>>,
    /// Plain-text parts plus the visible text of HTML parts, NFC-normalized.
    pub body_text: String,
    pub links: Vec<Link>,
    pub attachments: Vec<Attachment>,
    /// `X-Label` header, used only to carry hand labels through extraction.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label_hint: Option<String>,
}

/// RFC 2822 dates, then the looser forms mail clients emit. Text with no
/// year-like number is rejected rather than mapped to the epoch.
fn parse_date(value: &str) -> Option<DateTime<Utc>> {
    if let Ok(d) = DateTime::parse_from_rfc2822(value.trim()) {
        return Some(d.with_timezone(&Utc));
    }
    let has_year = value.split(|c: char| !c.is_ascii_digit()).any(|t| t.len() == 4);
    if !has_year {
        return None;
    }
    mailparse::dateparse(value).ok().and_then(|ts| DateTime::<Utc>::from_timestamp(ts, 0))
}

fn nfc(s: &str) -> String {
    s.nfc().collect()
}

/// Offset of the first byte after the header block, if a blank line ends it.
fn header_end(bytes: &[u8]) -> Option<usize> {
    let mut i = 0;
    while i < bytes.len() {
        let line_end = bytes[i..].iter().position(|&b| b == b'\n').map(|p| i + p);
        let line = match line_end {
            Some(e) => &bytes[i..e],
            None => &bytes[i..],
        };
        if line.is_empty() || line == b"\r" {
            return Some(line_end.map_or(bytes.len(), |e| e + 1));
        }
        i = line_end? + 1;
    }
    None
}

pub fn parse_email(raw: &RawEmail) -> Result<ParsedEmail, EmailError> {
    if raw.bytes.is_empty() {
        return Err(EmailError::MalformedEmail("empty message".into()));
    }
    if header_end(&raw.bytes).is_none() {
        return Err(EmailError::MalformedEmail("no blank line between header and body".into()));
    }
    let mail = mailparse::parse_mail(&raw.bytes).map_err(|e| EmailError::MalformedEmail(e.to_string()))?;

    let from = mail
        .headers
        .get_first_header("From")
        .ok_or_else(|| EmailError::MalformedEmail("missing From header".into()))?;
    let sender_address = mailparse::addrparse_header(from)
        .ok()
        .and_then(|list| list.extract_single_info())
        .map(|info| info.addr)
        .or_else(|| bare_address(&from.get_value()))
        .map(|a| nfc(&a.trim().to_lowercase()))
        .ok_or_else(|| EmailError::MalformedEmail("From header holds no address".into()))?;
    let sender_domain = sender_address
        .rsplit_once('@')
        .map(|(_, d)| d.to_string())
        .filter(|d| !d.is_empty())
        .ok_or_else(|| EmailError::MalformedEmail(format!("sender {sender_address:?} has no domain")))?;

    let subject = nfc(mail.headers.get_first_value("Subject").unwrap_or_default().trim());
    let date = mail
        .headers
        .get_first_value("Date")
        .and_then(|d| parse_date(&d));
    let label_hint = mail.headers.get_first_value("X-Label").map(|v| v.trim().to_lowercase());

    let mut body = BodyCollector::default();
    body.walk(&mail);

    Ok(ParsedEmail {
        sender_address,
        sender_domain,
        subject,
        date,
        body_text: body.text.trim_end().to_string(),
        links: body.links.into_vec(),
        attachments: body.attachments,
        label_hint,
    })
}

fn bare_address(value: &str) -> Option<String> {
    value
        .split(|c: char| c.is_whitespace() || c == '<' || c == '>' || c == ',')
        .find(|tok| tok.contains('@'))
        .map(str::to_string)
}

#[derive(Default)]
struct BodyCollector {
    text: String,
    links: LinkSet,
    attachments: Vec<Attachment>,
}

impl BodyCollector {
    fn walk(&mut self, part: &ParsedMail<'_>) {
        let mimetype = part.ctype.mimetype.to_ascii_lowercase();
        if mimetype.starts_with("multipart/") {
            for sub in &part.subparts {
                self.walk(sub);
            }
            return;
        }
        let disposition = part.get_content_disposition();
        let filename = disposition
            .params
            .get("filename")
            .or_else(|| part.ctype.params.get("name"))
            .cloned();
        let is_attachment = disposition.disposition == DispositionType::Attachment || filename.is_some();
        if is_attachment {
            self.attachments.push(Attachment::new(&nfc(filename.as_deref().unwrap_or(""))));
            return;
        }
        let decoded = match part.get_body() {
            Ok(s) => s,
            Err(_) => part
                .get_body_raw()
                .map(|b| String::from_utf8_lossy(&b).into_owned())
                .unwrap_or_default(),
        };
        let decoded = nfc(&decoded);
        match mimetype.as_str() {
            "text/html" => self.push_html(&decoded),
            "text/plain" if looks_like_html(&decoded) => self.push_html(&decoded),
            m if m.starts_with("text/") => {
                self.links.extend(extract_plain_links(&decoded));
                self.push_text(&decoded);
            }
            _ => {}
        }
    }

    fn push_html(&mut self, html: &str) {
        self.links.extend(extract_html_links(html));
        self.push_text(&html_to_text(html));
    }

    fn push_text(&mut self, s: &str) {
        if !self.text.is_empty() && !self.text.ends_with('\n') {
            self.text.push('\n');
        }
        self.text.push_str(s);
    }
}

/// Splits an mbox stream on `From ` separator lines.
///
/// Message bytes are everything between separator lines, minus the single
/// blank line that terminates each message; `>From ` quoting (mboxrd) is
/// undone. Input consisting only of whitespace holds zero messages.
pub fn parse_mbox(raw: &[u8]) -> Result<Vec<RawEmail>, EmailError> {
    if raw.iter().all(u8::is_ascii_whitespace) {
        return Ok(Vec::new());
    }
    if !raw.starts_with(b"From ") {
        return Err(EmailError::MalformedMbox("input does not start with a \"From \" separator line".into()));
    }

    let mut separators = Vec::new();
    let mut i = 0;
    while i < raw.len() {
        if raw[i..].starts_with(b"From ") {
            separators.push(i);
        }
        match raw[i..].iter().position(|&b| b == b'\n') {
            Some(p) => i += p + 1,
            None => break,
        }
    }

    let mut out = Vec::with_capacity(separators.len());
    for (n, &start) in separators.iter().enumerate() {
        let end = separators.get(n + 1).copied().unwrap_or(raw.len());
        let body_start = raw[start..end]
            .iter()
            .position(|&b| b == b'\n')
            .map_or(end, |p| start + p + 1);
        let mut msg = &raw[body_start..end];
        if msg.ends_with(b"\r\n\r\n") {
            msg = &msg[..msg.len() - 2];
        } else if msg.ends_with(b"\n\n") {
            msg = &msg[..msg.len() - 1];
        }
        out.push(RawEmail::new(format!("mbox#{}", n + 1), unquote_from_lines(msg)));
    }
    Ok(out)
}

fn unquote_from_lines(msg: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(msg.len());
    for line in msg.split_inclusive(|&b| b == b'\n') {
        let gts = line.iter().take_while(|&&b| b == b'>').count();
        if gts > 0 && line[gts..].starts_with(b"From ") {
            out.extend_from_slice(&line[1..]);
        } else {
            out.extend_from_slice(line);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn raw(s: &str) -> RawEmail {
        RawEmail::new("test", s.as_bytes().to_vec())
    }

    #[test]
    fn minimal_email() {
        let p = parse_email(&raw("From: a@b.com\n\nhello")).unwrap();
        assert_eq!(p.sender_address, "a@b.com");
        assert_eq!(p.sender_domain, "b.com");
        assert_eq!(p.subject, "");
        assert!(p.links.is_empty());
        assert!(p.attachments.is_empty());
        assert_eq!(p.body_text, "hello");
    }

    #[test]
    fn missing_separator_is_malformed() {
        let err = parse_email(&raw("From: a@b.com\nSubject: x")).unwrap_err();
        assert!(matches!(err, EmailError::MalformedEmail(_)));
    }

    #[test]
    fn missing_sender_is_malformed() {
        let err = parse_email(&raw("Subject: hi\n\nbody")).unwrap_err();
        assert!(matches!(err, EmailError::MalformedEmail(_)));
    }

    #[test]
    fn display_name_and_case() {
        let p = parse_email(&raw("From: \"Big Co\" <Alerts@Example.COM>\nSubject: Hi\n\nx")).unwrap();
        assert_eq!(p.sender_address, "alerts@example.com");
        assert_eq!(p.sender_domain, "example.com");
    }

    #[test]
    fn ip_link_in_body() {
        let p = parse_email(&raw("From: a@b.com\n\nsee https://50.10.125.26/index.php")).unwrap();
        assert_eq!(p.links.len(), 1);
        assert!(p.links[0].host_is_ip_literal);
    }

    #[test]
    fn encoded_word_subject() {
        let p = parse_email(&raw("From: a@b.com\nSubject: =?UTF-8?Q?Verify_Now_=E2=9C=93?=\n\nx")).unwrap();
        assert_eq!(p.subject, "Verify Now \u{2713}");
    }

    #[test]
    fn undecodable_bytes_are_replaced() {
        let mut bytes = b"From: a@b.com\nSubject: x\nContent-Type: text/plain; charset=utf-8\n\nbad ".to_vec();
        bytes.extend_from_slice(&[0xff, 0xfe, b'\n']);
        let p = parse_email(&RawEmail::new("t", bytes)).unwrap();
        assert!(p.body_text.starts_with("bad"));
    }

    #[test]
    fn text_is_nfc() {
        // "e" + combining acute accent becomes the precomposed form.
        let p = parse_email(&raw("From: a@b.com\nContent-Type: text/plain; charset=utf-8\n\nCafe\u{301}")).unwrap();
        assert_eq!(p.body_text, "Caf\u{e9}");
    }

    #[test]
    fn attachment_extension() {
        assert_eq!(Attachment::new("Invoice.EXE").extension, "exe");
        assert_eq!(Attachment::new("archive.tar.gz").extension, "gz");
        assert_eq!(Attachment::new("README").extension, "");
        assert_eq!(Attachment::new("trailing.").extension, "");
    }

    #[test]
    fn date_is_parsed() {
        let p = parse_email(&raw("From: a@b.com\nDate: Mon, 10 Sep 2018 09:00:00 -0500\n\nx")).unwrap();
        assert_eq!(p.date.unwrap().to_rfc3339(), "2018-09-10T14:00:00+00:00");
        let p = parse_email(&raw("From: a@b.com\nDate: not a date at all\n\nx")).unwrap();
        assert!(p.date.is_none());
    }

    #[test]
    fn mbox_empty_and_two() {
        assert!(parse_mbox(b"").unwrap().is_empty());
        assert!(parse_mbox(b"\n\n").unwrap().is_empty());
        let two = b"From x Mon Sep 10 09:00:00 2018\nFrom: a@b.com\n\none\n\nFrom y Mon Sep 10 09:00:00 2018\nFrom: c@d.com\n\ntwo\n\n";
        let msgs = parse_mbox(two).unwrap();
        assert_eq!(msgs.len(), 2);
        assert_eq!(msgs[0].bytes, b"From: a@b.com\n\none\n");
        assert_eq!(msgs[1].bytes, b"From: c@d.com\n\ntwo\n");
    }

    #[test]
    fn mbox_without_separator() {
        assert!(matches!(parse_mbox(b"From: a@b.com\n\nx"), Err(EmailError::MalformedMbox(_))));
    }

    #[test]
    fn mbox_unquotes_from_lines() {
        let m = b"From x\nFrom: a@b.com\n\n>From the start\n>>From deeper\n\n";
        let msgs = parse_mbox(m).unwrap();
        assert_eq!(msgs[0].bytes, b"From: a@b.com\n\nFrom the start\n>From deeper\n");
    }
}
