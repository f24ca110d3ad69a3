//! The ten indicator rules.
//!
//! Each rule reads a [`ParsedEmail`], the [`FeatureConfig`] word lists and,
//! for the link rules, a [`Resolver`]. An indicator is `1` when its
//! suspicious condition fires and `0` otherwise. Components are ordered
//! f1..f10:
//!
//! | idx | name            | fires when                                              |
//! |-----|-----------------|---------------------------------------------------------|
//! | f1  | no https        | some link uses plain http                               |
//! | f2  | untrusted CA    | some https host has no, a self-signed or an untrusted cert |
//! | f3  | blacklist       | subject or body contains a blacklisted phrase           |
//! | f4  | redirect        | some link lands elsewhere (or cannot be resolved)       |
//! | f5  | hidden link     | shortener host, or anchor showing an image / other text |
//! | f6  | IP literal      | some link host is a numeric address                     |
//! | f7  | low traffic     | no linked host ranks within the threshold               |
//! | f8  | young domain    | no linked domain is at least `min_age_days` old         |
//! | f9  | sender domain   | sender domain is not on the credible list               |
//! | f10 | attachment      | an attachment has a suspicious extension                |
//!
//! Rules with nothing to inspect (no links, no attachments) yield `0`.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::email::{Link, ParsedEmail, Scheme};
use crate::resolver::{Resolver, DEFAULT_MAX_HOPS};

pub const FEATURE_COUNT: usize = 10;

pub const FEATURE_NAMES: [&str; FEATURE_COUNT] = [
    "f1_no_https",
    "f2_untrusted_ca",
    "f3_blacklist",
    "f4_redirect",
    "f5_hidden_link",
    "f6_ip_literal",
    "f7_low_traffic",
    "f8_young_domain",
    "f9_sender_domain",
    "f10_bad_attachment",
];

const DEFAULT_CONFIG_JSON: &str = include_str!("../data/default_feature_config.json");

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("reading feature config {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid feature config: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeatureConfig {
    pub blacklist_keywords: Vec<String>,
    pub trusted_cas: Vec<String>,
    pub credible_domains: Vec<String>,
    pub shortener_hosts: Vec<String>,
    pub suspicious_extensions: Vec<String>,
    pub rank_threshold: u64,
    /// Whether a rank equal to `rank_threshold` still counts as popular.
    #[serde(default = "default_true")]
    pub rank_inclusive: bool,
    pub min_age_days: u64,
}

fn default_true() -> bool {
    true
}

impl Default for FeatureConfig {
    fn default() -> Self {
        FeatureConfig::from_json(DEFAULT_CONFIG_JSON).expect("shipped feature config is valid")
    }
}

impl FeatureConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let mut cfg: FeatureConfig = serde_json::from_str(text).map_err(|e| ConfigError::Invalid(e.to_string()))?;
        if cfg.rank_threshold == 0 || cfg.min_age_days == 0 {
            return Err(ConfigError::Invalid("rank_threshold and min_age_days must be positive".into()));
        }
        cfg.normalize();
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ConfigError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.to_path_buf(), source })?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    fn normalize(&mut self) {
        for list in [
            &mut self.blacklist_keywords,
            &mut self.trusted_cas,
            &mut self.credible_domains,
            &mut self.shortener_hosts,
        ] {
            for item in list.iter_mut() {
                *item = item.trim().to_lowercase();
            }
        }
        for ext in &mut self.suspicious_extensions {
            *ext = ext.trim().trim_start_matches('.').to_lowercase();
        }
    }

    fn rank_is_popular(&self, rank: u64) -> bool {
        if self.rank_inclusive {
            rank <= self.rank_threshold
        } else {
            rank < self.rank_threshold
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Legitimate,
    Phishing,
}

impl Label {
    pub fn as_u8(self) -> u8 {
        match self {
            Label::Legitimate => 0,
            Label::Phishing => 1,
        }
    }

    pub fn from_u8(v: u8) -> Option<Label> {
        match v {
            0 => Some(Label::Legitimate),
            1 => Some(Label::Phishing),
            _ => None,
        }
    }

    pub fn parse(s: &str) -> Option<Label> {
        match s.trim().to_ascii_lowercase().as_str() {
            "phishing" | "phish" | "1" | "spam" => Some(Label::Phishing),
            "legitimate" | "legit" | "ham" | "0" => Some(Label::Legitimate),
            _ => None,
        }
    }
}

impl std::fmt::Display for Label {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Label::Legitimate => "legitimate",
            Label::Phishing => "phishing",
        })
    }
}

/// Ten 0/1 indicators in f1..f10 order, plus an optional label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FeatureVector {
    pub indicators: [u8; FEATURE_COUNT],
    pub label: Option<Label>,
}

impl FeatureVector {
    pub fn new(indicators: [u8; FEATURE_COUNT]) -> Self {
        debug_assert!(indicators.iter().all(|&v| v <= 1));
        FeatureVector { indicators, label: None }
    }

    pub fn with_label(mut self, label: Label) -> Self {
        self.label = Some(label);
        self
    }

    pub fn as_f64(&self) -> [f64; FEATURE_COUNT] {
        self.indicators.map(f64::from)
    }

    /// Names of the indicators that fired.
    pub fn fired(&self) -> Vec<&'static str> {
        self.indicators
            .iter()
            .zip(FEATURE_NAMES)
            .filter(|(&v, _)| v == 1)
            .map(|(_, n)| n)
            .collect()
    }

    pub fn f1_no_https(&self) -> u8 {
        self.indicators[0]
    }
    pub fn f2_untrusted_ca(&self) -> u8 {
        self.indicators[1]
    }
    pub fn f3_blacklist(&self) -> u8 {
        self.indicators[2]
    }
    pub fn f4_redirect(&self) -> u8 {
        self.indicators[3]
    }
    pub fn f5_hidden(&self) -> u8 {
        self.indicators[4]
    }
    pub fn f6_clear_ip(&self) -> u8 {
        self.indicators[5]
    }
    pub fn f7_traffic(&self) -> u8 {
        self.indicators[6]
    }
    pub fn f8_age(&self) -> u8 {
        self.indicators[7]
    }
    pub fn f9_sender(&self) -> u8 {
        self.indicators[8]
    }
    pub fn f10_bad_attachment(&self) -> u8 {
        self.indicators[9]
    }
}

fn flag(b: bool) -> u8 {
    u8::from(b)
}

fn web_links(email: &ParsedEmail) -> impl Iterator<Item = &Link> {
    email
        .links
        .iter()
        .filter(|l| matches!(l.scheme, Scheme::Http | Scheme::Https) && !l.host.is_empty())
}

/// The host itself, then each parent domain with at least two labels.
/// IP literals have no parents.
fn domain_candidates(link: &Link) -> Vec<&str> {
    let mut out = vec![link.host.as_str()];
    if link.host_is_ip_literal {
        return out;
    }
    let mut rest = link.host.as_str();
    while let Some((_, parent)) = rest.split_once('.') {
        if !parent.contains('.') {
            break;
        }
        out.push(parent);
        rest = parent;
    }
    out
}

pub fn f1_ssl(email: &ParsedEmail, _config: &FeatureConfig, _resolver: &dyn Resolver) -> u8 {
    flag(web_links(email).any(|l| l.scheme == Scheme::Http))
}

pub fn f2_ca(email: &ParsedEmail, config: &FeatureConfig, resolver: &dyn Resolver) -> u8 {
    flag(web_links(email).filter(|l| l.scheme == Scheme::Https).any(|l| {
        let cert = resolver.fetch_certificate(&l.host).unwrap_or_default();
        let trusted = cert.issuer_name.as_deref().is_some_and(|issuer| {
            let issuer = issuer.to_lowercase();
            config.trusted_cas.iter().any(|ca| issuer.contains(ca.as_str()))
        });
        !cert.present || cert.self_signed || !trusted
    }))
}

pub fn f3_blacklist(email: &ParsedEmail, config: &FeatureConfig, _resolver: &dyn Resolver) -> u8 {
    let subject = email.subject.to_lowercase();
    let body = email.body_text.to_lowercase();
    flag(
        config
            .blacklist_keywords
            .iter()
            .any(|k| !k.is_empty() && (subject.contains(k.as_str()) || body.contains(k.as_str()))),
    )
}

pub fn f4_redirect(email: &ParsedEmail, _config: &FeatureConfig, resolver: &dyn Resolver) -> u8 {
    flag(web_links(email).any(|l| match resolver.resolve_redirects(&l.raw_url, DEFAULT_MAX_HOPS) {
        Ok(r) => crate::email::canonicalize_url(&r.final_url).unwrap_or(r.final_url) != l.canonical_url(),
        Err(_) => true,
    }))
}

pub fn f5_hidden(email: &ParsedEmail, config: &FeatureConfig, _resolver: &dyn Resolver) -> u8 {
    flag(web_links(email).any(|l| l.wrapped_in_image_or_text || config.shortener_hosts.contains(&l.host)))
}

pub fn f6_clear_ip(email: &ParsedEmail, _config: &FeatureConfig, _resolver: &dyn Resolver) -> u8 {
    flag(web_links(email).any(|l| l.host_is_ip_literal))
}

pub fn f7_traffic(email: &ParsedEmail, config: &FeatureConfig, resolver: &dyn Resolver) -> u8 {
    let mut links = web_links(email).peekable();
    if links.peek().is_none() {
        return 0;
    }
    let any_popular = links.any(|l| {
        domain_candidates(l)
            .into_iter()
            .find_map(|d| resolver.lookup_traffic_rank(d).0)
            .is_some_and(|rank| config.rank_is_popular(rank))
    });
    flag(!any_popular)
}

pub fn f8_age(email: &ParsedEmail, config: &FeatureConfig, resolver: &dyn Resolver) -> u8 {
    let mut links = web_links(email).peekable();
    if links.peek().is_none() {
        return 0;
    }
    let any_established = links.any(|l| {
        domain_candidates(l)
            .into_iter()
            .find_map(|d| resolver.lookup_domain_age(d).age_days)
            .is_some_and(|days| days >= config.min_age_days)
    });
    flag(!any_established)
}

pub fn f9_sender(email: &ParsedEmail, config: &FeatureConfig, _resolver: &dyn Resolver) -> u8 {
    let domain = email.sender_domain.to_lowercase();
    flag(!config.credible_domains.contains(&domain))
}

pub fn f10_attachment(email: &ParsedEmail, config: &FeatureConfig, _resolver: &dyn Resolver) -> u8 {
    flag(
        email
            .attachments
            .iter()
            .any(|a| !a.extension.is_empty() && config.suspicious_extensions.contains(&a.extension)),
    )
}

type Rule = fn(&ParsedEmail, &FeatureConfig, &dyn Resolver) -> u8;

/// The rules in component order.
pub const RULES: [Rule; FEATURE_COUNT] = [
    f1_ssl,
    f2_ca,
    f3_blacklist,
    f4_redirect,
    f5_hidden,
    f6_clear_ip,
    f7_traffic,
    f8_age,
    f9_sender,
    f10_attachment,
];

pub fn extract_vector(email: &ParsedEmail, config: &FeatureConfig, resolver: &dyn Resolver) -> FeatureVector {
    FeatureVector::new(RULES.map(|rule| rule(email, config, resolver)))
}
