//! Network-dependent answers for the link indicators.
//!
//! Four questions are asked about each link: where it finally lands, who
//! issued its host's certificate, how popular the host is and how old its
//! domain is. [`Resolver`] exposes them behind one interface with a
//! deterministic [`FixtureResolver`] and, with the `live` feature, a
//! best-effort [`LiveResolver`].
//!
//! An unknown answer is a value, not an error: ranks and ages come back
//! empty, and redirect/certificate failures are reported as
//! [`ResolveError`] for the feature layer to map.

mod fixture;
#[cfg(feature = "live")]
mod live;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use fixture::{FixtureError, FixtureResolver, ResolverFixture};
#[cfg(feature = "live")]
pub use live::{LiveConfig, LiveResolver};

pub const DEFAULT_MAX_HOPS: usize = 10;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ResolveError {
    #[error("resolution failed: {0}")]
    ResolutionFailed(String),
    #[error("redirect chain from {url} exceeds {max_hops} hops")]
    TooManyHops { url: String, max_hops: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RedirectResult {
    pub requested_url: String,
    pub final_url: String,
    /// Zero exactly when `final_url` equals `requested_url` after
    /// canonicalization.
    pub hop_count: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateInfo {
    pub present: bool,
    #[serde(default)]
    pub issuer_name: Option<String>,
    #[serde(default)]
    pub self_signed: bool,
}

impl CertificateInfo {
    pub fn absent() -> Self {
        CertificateInfo::default()
    }

    pub fn issued_by(issuer: impl Into<String>) -> Self {
        CertificateInfo { present: true, issuer_name: Some(issuer.into()), self_signed: false }
    }

    pub fn is_consistent(&self) -> bool {
        self.present || (self.issuer_name.is_none() && !self.self_signed)
    }
}

/// Popularity ordinal; `None` means unranked or unknown.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TrafficRank(pub Option<u64>);

impl TrafficRank {
    pub fn unknown() -> Self {
        TrafficRank(None)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DomainAge {
    pub creation_date: Option<NaiveDate>,
    pub age_days: Option<u64>,
}

impl DomainAge {
    pub fn unknown() -> Self {
        DomainAge::default()
    }

    /// Age of a domain created on `created`, measured at `now`. Creation
    /// dates after `now` count as age zero.
    pub fn at(created: NaiveDate, now: NaiveDate) -> Self {
        let days = (now - created).num_days().max(0) as u64;
        DomainAge { creation_date: Some(created), age_days: Some(days) }
    }
}

pub trait Resolver: Send + Sync {
    /// Follows redirects from `url` for at most `max_hops` hops.
    fn resolve_redirects(&self, url: &str, max_hops: usize) -> Result<RedirectResult, ResolveError>;

    fn fetch_certificate(&self, host: &str) -> Result<CertificateInfo, ResolveError>;

    fn lookup_traffic_rank(&self, host: &str) -> TrafficRank;

    fn lookup_domain_age(&self, domain: &str) -> DomainAge;
}

impl<R: Resolver + ?Sized> Resolver for &R {
    fn resolve_redirects(&self, url: &str, max_hops: usize) -> Result<RedirectResult, ResolveError> {
        (**self).resolve_redirects(url, max_hops)
    }
    fn fetch_certificate(&self, host: &str) -> Result<CertificateInfo, ResolveError> {
        (**self).fetch_certificate(host)
    }
    fn lookup_traffic_rank(&self, host: &str) -> TrafficRank {
        (**self).lookup_traffic_rank(host)
    }
    fn lookup_domain_age(&self, domain: &str) -> DomainAge {
        (**self).lookup_domain_age(domain)
    }
}

impl<R: Resolver + ?Sized> Resolver for Box<R> {
    fn resolve_redirects(&self, url: &str, max_hops: usize) -> Result<RedirectResult, ResolveError> {
        (**self).resolve_redirects(url, max_hops)
    }
    fn fetch_certificate(&self, host: &str) -> Result<CertificateInfo, ResolveError> {
        (**self).fetch_certificate(host)
    }
    fn lookup_traffic_rank(&self, host: &str) -> TrafficRank {
        (**self).lookup_traffic_rank(host)
    }
    fn lookup_domain_age(&self, domain: &str) -> DomainAge {
        (**self).lookup_domain_age(domain)
    }
}
