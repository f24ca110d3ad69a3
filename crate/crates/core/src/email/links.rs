use serde::{Deserialize, Serialize};
use url::{Host, Url};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Http,
    Https,
    Other,
}

/// A hyperlink found in a message body.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Link {
    /// The URL exactly as it appeared in the body (or `href` attribute).
    pub raw_url: String,
    pub scheme: Scheme,
    /// Lowercased host; IPv6 literals keep their brackets.
    pub host: String,
    pub host_is_ip_literal: bool,
    /// Visible anchor text for HTML links, tags stripped.
    pub display_text: Option<String>,
    /// The anchor shows an image, or text that does not name the target host.
    pub wrapped_in_image_or_text: bool,
}

impl Link {
    /// Parses an absolute URL into a plain (non-anchor) link.
    pub fn parse(raw: &str) -> Option<Link> {
        let url = Url::parse(raw.trim()).ok()?;
        let scheme = match url.scheme() {
            "http" => Scheme::Http,
            "https" => Scheme::Https,
            _ => Scheme::Other,
        };
        let (host, host_is_ip_literal) = match url.host() {
            Some(Host::Domain(d)) => (d.to_ascii_lowercase(), false),
            Some(Host::Ipv4(ip)) => (ip.to_string(), true),
            Some(Host::Ipv6(ip)) => (format!("[{ip}]"), true),
            None => (String::new(), false),
        };
        if scheme != Scheme::Other && host.is_empty() {
            return None;
        }
        Some(Link {
            raw_url: raw.trim().to_string(),
            scheme,
            host,
            host_is_ip_literal,
            display_text: None,
            wrapped_in_image_or_text: false,
        })
    }

    /// Canonical serialization of the link target.
    pub fn canonical_url(&self) -> String {
        canonicalize_url(&self.raw_url).unwrap_or_else(|| self.raw_url.clone())
    }

    fn is_web(&self) -> bool {
        matches!(self.scheme, Scheme::Http | Scheme::Https)
    }
}

/// WHATWG serialization of `raw`, or `None` when it does not parse.
pub fn canonicalize_url(raw: &str) -> Option<String> {
    Url::parse(raw.trim()).ok().map(String::from)
}

/// Extracts every absolute http/https URL from a body, in document order,
/// each at most once.
///
/// Bodies containing HTML markup are scanned for anchors as well as bare
/// URLs in their text; anything else is scanned as plain text.
pub fn extract_links(body: &str) -> Vec<Link> {
    if looks_like_html(body) {
        extract_html_links(body)
    } else {
        extract_plain_links(body)
    }
}

pub fn extract_plain_links(text: &str) -> Vec<Link> {
    let mut out = LinkSet::default();
    for raw in scan_urls(text) {
        if let Some(link) = Link::parse(raw) {
            out.push(link);
        }
    }
    out.into_vec()
}

pub fn extract_html_links(html: &str) -> Vec<Link> {
    let mut out = LinkSet::default();
    let lower = html.to_ascii_lowercase();
    let mut pos = 0;
    let mut text_start = 0;

    while let Some(off) = html[pos..].find('<') {
        let tag_start = pos + off;
        let Some(tag_len) = html[tag_start..].find('>') else {
            break;
        };
        let tag_end = tag_start + tag_len + 1;

        if is_tag(&lower[tag_start..], "a") {
            for raw in scan_urls(&decode_entities(&html[text_start..tag_start])) {
                if let Some(link) = Link::parse(raw) {
                    out.push(link);
                }
            }
            let close = lower[tag_end..]
                .find("</a")
                .map(|i| tag_end + i)
                .unwrap_or(html.len());
            let inner = &html[tag_end..close];
            let href = attribute(&html[tag_start..tag_end], "href");
            if let Some(link) = href.and_then(|h| anchor_link(&h, inner)) {
                out.push(link);
            }
            pos = match html[close..].find('>') {
                Some(i) => close + i + 1,
                None => html.len(),
            };
            text_start = pos;
        } else if is_tag(&lower[tag_start..], "script") || is_tag(&lower[tag_start..], "style") {
            for raw in scan_urls(&decode_entities(&html[text_start..tag_start])) {
                if let Some(link) = Link::parse(raw) {
                    out.push(link);
                }
            }
            let name = if is_tag(&lower[tag_start..], "script") { "</script" } else { "</style" };
            pos = match lower[tag_end..].find(name) {
                Some(i) => {
                    let c = tag_end + i;
                    html[c..].find('>').map(|j| c + j + 1).unwrap_or(html.len())
                }
                None => html.len(),
            };
            text_start = pos;
        } else {
            // Bare URLs in text are split at tag boundaries.
            for raw in scan_urls(&decode_entities(&html[text_start..tag_start])) {
                if let Some(link) = Link::parse(raw) {
                    out.push(link);
                }
            }
            pos = tag_end;
            text_start = pos;
        }
    }
    for raw in scan_urls(&decode_entities(&html[text_start..])) {
        if let Some(link) = Link::parse(raw) {
            out.push(link);
        }
    }
    out.into_vec()
}

/// Visible text of an HTML fragment: tags dropped, entities decoded,
/// whitespace collapsed. Script and style content is skipped.
pub fn html_to_text(html: &str) -> String {
    let lower = html.to_ascii_lowercase();
    let mut text = String::with_capacity(html.len());
    let mut pos = 0;
    while let Some(off) = html[pos..].find('<') {
        let start = pos + off;
        text.push_str(&html[pos..start]);
        let Some(len) = html[start..].find('>') else {
            pos = html.len();
            break;
        };
        let mut end = start + len + 1;
        for skip in ["script", "style"] {
            if is_tag(&lower[start..], skip) {
                let closing = format!("</{skip}");
                end = lower[end..]
                    .find(&closing)
                    .and_then(|i| html[end + i..].find('>').map(|j| end + i + j + 1))
                    .unwrap_or(html.len());
            }
        }
        text.push(' ');
        pos = end;
    }
    text.push_str(&html[pos..]);
    collapse_whitespace(&decode_entities(&text))
}

fn anchor_link(href: &str, inner_html: &str) -> Option<Link> {
    let mut link = Link::parse(href)?;
    if !link.is_web() {
        return None;
    }
    let has_image = inner_html.to_ascii_lowercase().contains("<img");
    let visible = html_to_text(inner_html);
    link.wrapped_in_image_or_text = has_image || visible_host(&visible).as_deref() != Some(&link.host);
    link.display_text = (!visible.is_empty()).then_some(visible);
    Some(link)
}

/// Host named by an anchor's visible text, if the text reads as a URL
/// (with or without scheme).
fn visible_host(text: &str) -> Option<String> {
    let t = text.trim();
    if t.is_empty() || t.contains(char::is_whitespace) {
        return None;
    }
    let candidate = if t.contains("://") { t.to_string() } else { format!("http://{t}") };
    Link::parse(&candidate).map(|l| l.host).filter(|h| h.contains('.') || h.starts_with('['))
}

pub(crate) fn looks_like_html(body: &str) -> bool {
    let lower = body.to_ascii_lowercase();
    lower.contains("<a ") || lower.contains("<a\n") || lower.contains("<html") || lower.contains("<body")
}

fn is_tag(lower_from_lt: &str, name: &str) -> bool {
    let rest = &lower_from_lt[1..];
    rest.starts_with(name)
        && rest[name.len()..]
            .chars()
            .next()
            .is_some_and(|c| c.is_whitespace() || c == '>' || c == '/')
}

/// Value of `name=...` inside a start tag, quotes stripped and entities decoded.
fn attribute(tag: &str, name: &str) -> Option<String> {
    let lower = tag.to_ascii_lowercase();
    let bytes = lower.as_bytes();
    let mut search = 0;
    while let Some(off) = lower[search..].find(name) {
        let at = search + off;
        search = at + name.len();
        let preceded = at > 0 && (bytes[at - 1].is_ascii_whitespace() || bytes[at - 1] == b'<');
        let rest = lower[at + name.len()..].trim_start();
        if !preceded || !rest.starts_with('=') {
            continue;
        }
        let value_start = tag.len() - rest.len() + 1;
        let value = tag[value_start..].trim_start();
        let v = match value.chars().next()? {
            q @ ('"' | '\'') => value[1..].split(q).next().unwrap_or(""),
            _ => value
                .split(|c: char| c.is_whitespace() || c == '>')
                .next()
                .unwrap_or(""),
        };
        return Some(decode_entities(v.trim()));
    }
    None
}

fn decode_entities(s: &str) -> String {
    if !s.contains('&') {
        return s.to_string();
    }
    let mut out = String::with_capacity(s.len());
    let mut rest = s;
    while let Some(i) = rest.find('&') {
        out.push_str(&rest[..i]);
        rest = &rest[i..];
        let end = rest[1..].find(';').map(|j| j + 1).filter(|&j| j <= 10);
        let decoded = end.and_then(|j| {
            let ent = &rest[1..j];
            let ch = match ent {
                "amp" => Some('&'),
                "lt" => Some('<'),
                "gt" => Some('>'),
                "quot" => Some('"'),
                "apos" => Some('\''),
                "nbsp" => Some(' '),
                _ if ent.starts_with("#x") || ent.starts_with("#X") => {
                    u32::from_str_radix(&ent[2..], 16).ok().and_then(char::from_u32)
                }
                _ if ent.starts_with('#') => ent[1..].parse().ok().and_then(char::from_u32),
                _ => None,
            };
            ch.map(|c| (c, j))
        });
        match decoded {
            Some((c, j)) => {
                out.push(c);
                rest = &rest[j + 1..];
            }
            None => {
                out.push('&');
                rest = &rest[1..];
            }
        }
    }
    out.push_str(rest);
    out
}

fn collapse_whitespace(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Yields candidate `http://` / `https://` substrings in order.
fn scan_urls(text: &str) -> Vec<&str> {
    let lower = text.to_ascii_lowercase();
    let mut found = Vec::new();
    let mut pos = 0;
    while pos < text.len() {
        let next = ["http://", "https://"]
            .iter()
            .filter_map(|p| lower[pos..].find(p).map(|i| pos + i))
            .min();
        let Some(start) = next else { break };
        let boundary_ok = start == 0
            || !text[..start]
                .chars()
                .next_back()
                .is_some_and(|c| c.is_ascii_alphanumeric());
        let len = text[start..]
            .find(|c: char| c.is_whitespace() || c.is_control() || "<>\"'`".contains(c))
            .unwrap_or(text.len() - start);
        let candidate = trim_trailing_punctuation(&text[start..start + len]);
        if boundary_ok && candidate.len() > "https://".len() {
            found.push(candidate);
        }
        pos = start + len.max(1);
    }
    found
}

fn trim_trailing_punctuation(url: &str) -> &str {
    let mut s = url;
    loop {
        let Some(last) = s.chars().next_back() else { return s };
        let strip = match last {
            '.' | ',' | ';' | ':' | '!' | '?' => true,
            ')' => s.matches('(').count() < s.matches(')').count(),
            ']' => s.matches('[').count() < s.matches(']').count(),
            _ => false,
        };
        if !strip {
            return s;
        }
        s = &s[..s.len() - last.len_utf8()];
    }
}

/// Insertion-ordered link collection keyed on the raw URL. A repeated URL
/// merges anchor information into the first occurrence.
#[derive(Default)]
pub(crate) struct LinkSet {
    links: Vec<Link>,
}

impl LinkSet {
    pub(crate) fn push(&mut self, link: Link) {
        if !link.is_web() {
            return;
        }
        match self.links.iter_mut().find(|l| l.raw_url == link.raw_url) {
            Some(existing) => {
                existing.wrapped_in_image_or_text |= link.wrapped_in_image_or_text;
                if existing.display_text.is_none() {
                    existing.display_text = link.display_text;
                }
            }
            None => self.links.push(link),
        }
    }

    pub(crate) fn extend(&mut self, links: impl IntoIterator<Item = Link>) {
        for l in links {
            self.push(l);
        }
    }

    pub(crate) fn into_vec(self) -> Vec<Link> {
        self.links
    }
}
