use std::collections::HashMap;
use std::hash::Hash;
use std::sync::{Arc, Mutex, OnceLock};
use std::time::Duration;

use chrono::NaiveDate;
use reqwest::blocking::Client;
use reqwest::redirect::Policy;
use reqwest::tls::TlsInfo;
use url::Url;
use x509_parser::prelude::{FromDer, X509Certificate};

use super::{CertificateInfo, DomainAge, RedirectResult, ResolveError, Resolver, TrafficRank};
use crate::email::canonicalize_url;

#[derive(Debug, Clone)]
pub struct LiveConfig {
    pub timeout: Duration,
    /// Ranking endpoint with a `{host}` placeholder. It must answer with a
    /// JSON integer or an object holding an integer `rank`. `None` leaves
    /// every host unranked.
    pub rank_endpoint: Option<String>,
    /// Registration-data endpoint with a `{domain}` placeholder, answering
    /// RDAP JSON.
    pub age_endpoint: Option<String>,
    /// Date ages are measured against; injected, never read from the clock here.
    pub reference_now: NaiveDate,
}

impl LiveConfig {
    pub fn new(reference_now: NaiveDate) -> Self {
        LiveConfig {
            timeout: Duration::from_secs(5),
            rank_endpoint: None,
            age_endpoint: Some("https://rdap.org/domain/{domain}".to_string()),
            reference_now,
        }
    }
}

/// Per-key memo: concurrent callers asking for the same key share one
/// computation.
pub(crate) struct Memo<K, V> {
    cells: Mutex<HashMap<K, Arc<OnceLock<V>>>>,
}

impl<K: Eq + Hash + Clone, V: Clone> Memo<K, V> {
    pub(crate) fn new() -> Self {
        Memo { cells: Mutex::new(HashMap::new()) }
    }

    pub(crate) fn get_or_compute(&self, key: &K, compute: impl FnOnce() -> V) -> V {
        let cell = {
            let mut cells = self.cells.lock().unwrap_or_else(|p| p.into_inner());
            cells.entry(key.clone()).or_default().clone()
        };
        cell.get_or_init(compute).clone()
    }
}

/// Best-effort network resolver with a per-run cache.
pub struct LiveResolver {
    config: LiveConfig,
    client: Client,
    cert_client: Client,
    hops: Memo<String, Result<Option<String>, ResolveError>>,
    certs: Memo<String, Result<CertificateInfo, ResolveError>>,
    ranks: Memo<String, TrafficRank>,
    ages: Memo<String, DomainAge>,
}

impl LiveResolver {
    pub fn new(config: LiveConfig) -> Result<Self, ResolveError> {
        let fail = |e: reqwest::Error| ResolveError::ResolutionFailed(e.to_string());
        let client = Client::builder()
            .timeout(config.timeout)
            .redirect(Policy::none())
            .build()
            .map_err(fail)?;
        // Certificates are inspected, not trusted, so self-signed chains
        // must still complete the handshake.
        let cert_client = Client::builder()
            .timeout(config.timeout)
            .redirect(Policy::none())
            .danger_accept_invalid_certs(true)
            .tls_info(true)
            .build()
            .map_err(fail)?;
        Ok(LiveResolver {
            config,
            client,
            cert_client,
            hops: Memo::new(),
            certs: Memo::new(),
            ranks: Memo::new(),
            ages: Memo::new(),
        })
    }

    /// Next URL in the chain, or `None` when `url` does not redirect.
    fn next_hop(&self, url: &str) -> Result<Option<String>, ResolveError> {
        self.hops.get_or_compute(&url.to_string(), || {
            let resp = self
                .client
                .get(url)
                .send()
                .map_err(|e| ResolveError::ResolutionFailed(e.to_string()))?;
            if !resp.status().is_redirection() {
                return Ok(None);
            }
            let location = resp
                .headers()
                .get(reqwest::header::LOCATION)
                .and_then(|v| v.to_str().ok())
                .ok_or_else(|| ResolveError::ResolutionFailed(format!("{url}: redirect without Location")))?;
            let next = Url::parse(url)
                .and_then(|base| base.join(location))
                .map_err(|e| ResolveError::ResolutionFailed(e.to_string()))?;
            Ok(Some(next.to_string()))
        })
    }

    fn get_json(&self, url: &str) -> Option<serde_json::Value> {
        self.client.get(url).send().ok()?.error_for_status().ok()?.json().ok()
    }
}

impl Resolver for LiveResolver {
    fn resolve_redirects(&self, url: &str, max_hops: usize) -> Result<RedirectResult, ResolveError> {
        let mut current = canonicalize_url(url).ok_or_else(|| ResolveError::ResolutionFailed(format!("{url:?} is not a URL")))?;
        let mut hops = 0;
        while let Some(next) = self.next_hop(&current)? {
            if next == current {
                break;
            }
            hops += 1;
            if hops > max_hops {
                return Err(ResolveError::TooManyHops { url: url.to_string(), max_hops });
            }
            current = next;
        }
        Ok(RedirectResult { requested_url: url.to_string(), final_url: current, hop_count: hops })
    }

    fn fetch_certificate(&self, host: &str) -> Result<CertificateInfo, ResolveError> {
        let host = host.to_ascii_lowercase();
        self.certs.get_or_compute(&host, || {
            let resp = self
                .cert_client
                .head(format!("https://{host}/"))
                .send()
                .map_err(|e| ResolveError::ResolutionFailed(e.to_string()))?;
            let der = resp
                .extensions()
                .get::<TlsInfo>()
                .and_then(|info| info.peer_certificate())
                .ok_or_else(|| ResolveError::ResolutionFailed(format!("{host}: no peer certificate")))?;
            let (_, cert) = X509Certificate::from_der(der).map_err(|e| ResolveError::ResolutionFailed(e.to_string()))?;
            let issuer = cert.issuer();
            let issuer_name = issuer
                .iter_organization()
                .chain(issuer.iter_common_name())
                .filter_map(|a| a.as_str().ok())
                .map(str::to_string)
                .next()
                .unwrap_or_else(|| issuer.to_string());
            Ok(CertificateInfo {
                present: true,
                issuer_name: Some(issuer_name),
                self_signed: issuer.as_raw() == cert.subject().as_raw(),
            })
        })
    }

    fn lookup_traffic_rank(&self, host: &str) -> TrafficRank {
        let Some(template) = &self.config.rank_endpoint else {
            return TrafficRank::unknown();
        };
        let host = host.to_ascii_lowercase();
        self.ranks.get_or_compute(&host, || {
            let rank = self.get_json(&template.replace("{host}", &host)).and_then(|v| {
                v.as_u64().or_else(|| v.get("rank").and_then(serde_json::Value::as_u64))
            });
            TrafficRank(rank.filter(|&r| r >= 1))
        })
    }

    fn lookup_domain_age(&self, domain: &str) -> DomainAge {
        let Some(template) = &self.config.age_endpoint else {
            return DomainAge::unknown();
        };
        let domain = domain.to_ascii_lowercase();
        self.ages.get_or_compute(&domain, || {
            let created = self
                .get_json(&template.replace("{domain}", &domain))
                .and_then(|v| registration_date(&v));
            match created {
                Some(d) => DomainAge::at(d, self.config.reference_now),
                None => DomainAge::unknown(),
            }
        })
    }
}

/// `registration` event date from an RDAP domain object.
fn registration_date(rdap: &serde_json::Value) -> Option<NaiveDate> {
    rdap.get("events")?
        .as_array()?
        .iter()
        .find(|e| e.get("eventAction").and_then(|a| a.as_str()) == Some("registration"))?
        .get("eventDate")?
        .as_str()?
        .get(..10)?
        .parse()
        .ok()
}
