use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{CertificateInfo, DomainAge, RedirectResult, ResolveError, Resolver, TrafficRank};
use crate::email::canonicalize_url;

#[derive(Debug, Error)]
pub enum FixtureError {
    #[error("reading resolver fixture {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid resolver fixture: {0}")]
    Invalid(String),
}

/// On-disk form of the offline resolver answers.
///
/// ```json
/// {
///   "reference_now": "2019-01-01",
///   "redirects":    { "https://goo.gl/abc": "http://landing.example/x" },
///   "certificates": { "good.com": { "present": true, "issuer_name": "Comodo", "self_signed": false } },
///   "ranks":        { "popular.com": 512, "unranked.com": null },
///   "ages":         { "popular.com": "2000-06-15" }
/// }
/// ```
///
/// `redirects` maps a URL to the next URL in its chain; a URL mapped to
/// itself does not redirect. Unknown keys anywhere in the document are
/// rejected.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResolverFixture {
    pub reference_now: NaiveDate,
    #[serde(default)]
    pub redirects: BTreeMap<String, String>,
    #[serde(default)]
    pub certificates: BTreeMap<String, CertificateInfo>,
    #[serde(default)]
    pub ranks: BTreeMap<String, Option<u64>>,
    #[serde(default)]
    pub ages: BTreeMap<String, Option<NaiveDate>>,
}

impl ResolverFixture {
    pub fn empty(reference_now: NaiveDate) -> Self {
        ResolverFixture {
            reference_now,
            redirects: BTreeMap::new(),
            certificates: BTreeMap::new(),
            ranks: BTreeMap::new(),
            ages: BTreeMap::new(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self, FixtureError> {
        let fixture: ResolverFixture = serde_json::from_str(text).map_err(|e| FixtureError::Invalid(e.to_string()))?;
        fixture.validate()?;
        Ok(fixture)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, FixtureError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| FixtureError::Io { path: path.to_path_buf(), source })?;
        Self::from_json(&text)
    }

    fn validate(&self) -> Result<(), FixtureError> {
        for (host, rank) in &self.ranks {
            if *rank == Some(0) {
                return Err(FixtureError::Invalid(format!("rank for {host} must be >= 1")));
            }
        }
        for (host, cert) in &self.certificates {
            if !cert.is_consistent() {
                return Err(FixtureError::Invalid(format!(
                    "certificate for {host} has issuer or self_signed set while present is false"
                )));
            }
        }
        for (from, to) in &self.redirects {
            for url in [from, to] {
                if canonicalize_url(url).is_none() {
                    return Err(FixtureError::Invalid(format!("redirect entry {url:?} is not an absolute URL")));
                }
            }
        }
        Ok(())
    }
}

/// Answers every query from a [`ResolverFixture`]. Pure and shareable.
#[derive(Debug, Clone)]
pub struct FixtureResolver {
    reference_now: NaiveDate,
    redirects: BTreeMap<String, String>,
    certificates: BTreeMap<String, CertificateInfo>,
    ranks: BTreeMap<String, Option<u64>>,
    ages: BTreeMap<String, Option<NaiveDate>>,
}

fn lower_keys<V>(m: BTreeMap<String, V>) -> BTreeMap<String, V> {
    m.into_iter().map(|(k, v)| (k.to_ascii_lowercase(), v)).collect()
}

impl FixtureResolver {
    pub fn new(fixture: ResolverFixture) -> Self {
        let canon = |u: &String| canonicalize_url(u).unwrap_or_else(|| u.clone());
        FixtureResolver {
            reference_now: fixture.reference_now,
            redirects: fixture.redirects.iter().map(|(k, v)| (canon(k), canon(v))).collect(),
            certificates: lower_keys(fixture.certificates),
            ranks: lower_keys(fixture.ranks),
            ages: lower_keys(fixture.ages),
        }
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, FixtureError> {
        ResolverFixture::load(path).map(Self::new)
    }

    pub fn reference_now(&self) -> NaiveDate {
        self.reference_now
    }
}

impl Resolver for FixtureResolver {
    fn resolve_redirects(&self, url: &str, max_hops: usize) -> Result<RedirectResult, ResolveError> {
        let start = canonicalize_url(url).ok_or_else(|| ResolveError::ResolutionFailed(format!("{url:?} is not a URL")))?;
        if !self.redirects.contains_key(&start) {
            return Err(ResolveError::ResolutionFailed(format!("no redirect record for {start}")));
        }
        let mut current = start;
        let mut hops = 0;
        // A URL absent from the map after the first hop is a landing page.
        while let Some(next) = self.redirects.get(&current) {
            if *next == current {
                break;
            }
            hops += 1;
            if hops > max_hops {
                return Err(ResolveError::TooManyHops { url: url.to_string(), max_hops });
            }
            current = next.clone();
        }
        Ok(RedirectResult { requested_url: url.to_string(), final_url: current, hop_count: hops })
    }

    fn fetch_certificate(&self, host: &str) -> Result<CertificateInfo, ResolveError> {
        Ok(self.certificates.get(&host.to_ascii_lowercase()).cloned().unwrap_or_default())
    }

    fn lookup_traffic_rank(&self, host: &str) -> TrafficRank {
        TrafficRank(self.ranks.get(&host.to_ascii_lowercase()).copied().flatten())
    }

    fn lookup_domain_age(&self, domain: &str) -> DomainAge {
        match self.ages.get(&domain.to_ascii_lowercase()).copied().flatten() {
            Some(created) => DomainAge::at(created, self.reference_now),
            None => DomainAge::unknown(),
        }
    }
}
