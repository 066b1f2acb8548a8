//! Typed async client for the splitaudit HTTP API.
//!
//! ```no_run
//! # async fn demo() -> Result<(), splitaudit_client::ClientError> {
//! use splitaudit_client::{Client, DatasetRequest};
//! use splitaudit_core::split::{EvalSide, SplitSpec};
//!
//! let client = Client::new("http://127.0.0.1:8750")?;
//! let ds = client.register_dataset(&DatasetRequest::path("ratings.csv")).await?;
//! let bundle = client.create_split(&ds.id, &SplitSpec::leave_one_out(), None).await?;
//! let leak = client.leakage(&bundle.id, EvalSide::Test).await?;
//! println!("{:.2}% leaked", leak.leaked_target_pct());
//! # Ok(()) }
//! ```

use std::path::PathBuf;

use reqwest::StatusCode;
use serde::{Deserialize, Serialize};
use splitaudit_core::diagnostics::{ColdStartReport, LeakageReport, ShiftReport, SplitComparisonMatrix};
use splitaudit_core::preprocess::PreprocessSpec;
use splitaudit_core::report::{from_json, AuditReports, Document, SummaryReport, ThresholdConfig};
use splitaudit_core::split::{EvalSide, SplitDescription, SplitSpec};
use splitaudit_core::time::Granularity;
use splitaudit_core::ColumnMapping;
use url::Url;

#[derive(Debug, thiserror::Error)]
pub enum ClientError {
    #[error("invalid server URL: {0}")]
    Url(#[from] url::ParseError),
    #[error("request failed: {0}")]
    Http(#[from] reqwest::Error),
    #[error("server answered {status}: {code}: {message}")]
    Api { status: u16, code: String, message: String },
    #[error("bad response document: {0}")]
    Document(#[from] splitaudit_core::Error),
    #[error("expected a `{expected}` document, got `{found}`")]
    UnexpectedKind {
        expected: &'static str,
        found: &'static str,
    },
}

pub type Result<T, E = ClientError> = std::result::Result<T, E>;

#[derive(Debug, Clone, Default, Serialize)]
pub struct DatasetRequest {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub csv: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mapping: Option<ColumnMapping>,
    pub preprocess: PreprocessSpec,
    pub skip_malformed: bool,
}

impl DatasetRequest {
    /// A file readable by the server process.
    pub fn path(path: impl Into<PathBuf>) -> Self {
        DatasetRequest {
            path: Some(path.into()),
            ..Default::default()
        }
    }

    pub fn inline(csv: impl Into<String>) -> Self {
        DatasetRequest {
            csv: Some(csv.into()),
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
pub struct DatasetInfo {
    pub id: String,
    pub name: String,
    pub n_interactions: usize,
    pub n_users: usize,
    pub n_items: usize,
    pub skipped_rows: usize,
    pub preprocessed_interactions: Option<usize>,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct BundleRequest {
    pub path: PathBuf,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prefix: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mapping: Option<ColumnMapping>,
    /// Dataset id used as the statistics reference.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dataset: Option<String>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct BundleCreated {
    pub id: String,
    pub description: SplitDescription,
}

#[derive(Debug, Clone, Deserialize)]
pub struct Health {
    pub status: String,
    pub version: String,
    pub schema_version: u32,
}

/// How `summary` picks its thresholds.
#[derive(Debug, Clone, Default)]
pub enum Thresholds {
    #[default]
    Default,
    Stored(String),
    Inline(ThresholdConfig),
}

#[derive(Debug, Deserialize)]
struct ErrorBody {
    error: ErrorDetail,
}

#[derive(Debug, Deserialize)]
struct ErrorDetail {
    code: String,
    message: String,
}

#[derive(Debug, Clone)]
pub struct Client {
    http: reqwest::Client,
    base: Url,
}

macro_rules! expect_kind {
    ($doc:expr, $variant:ident, $kind:literal) => {
        match $doc {
            Document::$variant(r) => Ok(r),
            other => Err(ClientError::UnexpectedKind {
                expected: $kind,
                found: other.kind(),
            }),
        }
    };
}

impl Client {
    pub fn new(base: &str) -> Result<Self> {
        Self::with_http(base, reqwest::Client::new())
    }

    pub fn with_http(base: &str, http: reqwest::Client) -> Result<Self> {
        let mut base = Url::parse(base)?;
        if !base.path().ends_with('/') {
            base.set_path(&format!("{}/", base.path()));
        }
        Ok(Client { http, base })
    }

    fn url(&self, path: &str) -> Result<Url> {
        Ok(self.base.join(&format!("api/v1/{path}"))?)
    }

    async fn check(resp: reqwest::Response) -> Result<reqwest::Response> {
        let status = resp.status();
        if status.is_success() {
            return Ok(resp);
        }
        let bytes = resp.bytes().await?;
        let (code, message) = match serde_json::from_slice::<ErrorBody>(&bytes) {
            Ok(b) => (b.error.code, b.error.message),
            Err(_) => (
                status
                    .canonical_reason()
                    .unwrap_or("error")
                    .to_lowercase()
                    .replace(' ', "_"),
                String::from_utf8_lossy(&bytes).into_owned(),
            ),
        };
        Err(ClientError::Api {
            status: status.as_u16(),
            code,
            message,
        })
    }

    async fn post<B: Serialize, R: for<'de> Deserialize<'de>>(&self, path: &str, body: &B) -> Result<R> {
        let resp = self.http.post(self.url(path)?).json(body).send().await?;
        Ok(Self::check(resp).await?.json().await?)
    }

    pub async fn health(&self) -> Result<Health> {
        let resp = self.http.get(self.url("health")?).send().await?;
        Ok(Self::check(resp).await?.json().await?)
    }

    pub async fn register_dataset(&self, req: &DatasetRequest) -> Result<DatasetInfo> {
        self.post("datasets", req).await
    }

    pub async fn create_split(
        &self,
        dataset: &str,
        spec: &SplitSpec,
        preprocess: Option<&PreprocessSpec>,
    ) -> Result<BundleCreated> {
        #[derive(Serialize)]
        struct Req<'a> {
            dataset: &'a str,
            split: &'a SplitSpec,
            #[serde(skip_serializing_if = "Option::is_none")]
            preprocess: Option<&'a PreprocessSpec>,
        }
        self.post(
            "splits",
            &Req {
                dataset,
                split: spec,
                preprocess,
            },
        )
        .await
    }

    pub async fn register_bundle(&self, req: &BundleRequest) -> Result<BundleCreated> {
        self.post("bundles", req).await
    }

    pub async fn register_thresholds(&self, config: &ThresholdConfig) -> Result<String> {
        #[derive(Deserialize)]
        struct Created {
            id: String,
        }
        let created: Created = self.post("thresholds", config).await?;
        Ok(created.id)
    }

    /// Raw GET of `/api/v1/{id}/{diagnostic}` as a decoded document.
    pub async fn document(&self, id: &str, diagnostic: &str, query: &[(&str, String)]) -> Result<Document> {
        Ok(from_json(&self.document_bytes(id, diagnostic, query).await?)?)
    }

    /// Raw GET returning the undecoded body.
    pub async fn document_bytes(&self, id: &str, diagnostic: &str, query: &[(&str, String)]) -> Result<Vec<u8>> {
        let mut url = self.url(&format!("{id}/{diagnostic}"))?;
        if !query.is_empty() {
            url.query_pairs_mut()
                .extend_pairs(query.iter().map(|(k, v)| (*k, v.as_str())));
        }
        let resp = self.http.get(url).send().await?;
        Ok(Self::check(resp).await?.bytes().await?.to_vec())
    }

    pub async fn leakage(&self, bundle: &str, side: EvalSide) -> Result<LeakageReport> {
        let doc = self
            .document(bundle, "leakage", &[("eval", side.as_str().to_owned())])
            .await?;
        expect_kind!(doc, Leakage, "leakage")
    }

    pub async fn cold_start(&self, bundle: &str, side: EvalSide) -> Result<ColdStartReport> {
        let doc = self
            .document(bundle, "coldstart", &[("eval", side.as_str().to_owned())])
            .await?;
        expect_kind!(doc, ColdStart, "cold_start")
    }

    pub async fn shift(&self, bundle: &str, side: EvalSide) -> Result<ShiftReport> {
        let doc = self
            .document(bundle, "shift", &[("eval", side.as_str().to_owned())])
            .await?;
        expect_kind!(doc, Shift, "shift")
    }

    pub async fn split_description(&self, bundle: &str) -> Result<SplitDescription> {
        expect_kind!(
            self.document(bundle, "split", &[]).await?,
            SplitDescription,
            "split_description"
        )
    }

    pub async fn audit(&self, bundle: &str, granularity: Granularity) -> Result<AuditReports> {
        let doc = self
            .document(bundle, "audit", &[("granularity", granularity.as_str().to_owned())])
            .await?;
        expect_kind!(doc, Audit, "audit")
    }

    pub async fn summary(
        &self,
        bundle: &str,
        thresholds: &Thresholds,
        granularity: Granularity,
    ) -> Result<SummaryReport> {
        let mut query = vec![("granularity", granularity.as_str().to_owned())];
        match thresholds {
            Thresholds::Default => {}
            Thresholds::Stored(id) => query.push(("thresholds", id.clone())),
            Thresholds::Inline(t) => {
                query.push(("thresholds", serde_json::to_string(t).expect("thresholds serialize")))
            }
        }
        expect_kind!(self.document(bundle, "summary", &query).await?, Summary, "summary")
    }

    pub async fn compare(&self, bundles: &[&str], allow_provenance_mismatch: bool) -> Result<SplitComparisonMatrix> {
        let body = serde_json::json!({ "bundles": bundles, "allow_provenance_mismatch": allow_provenance_mismatch });
        let resp = self.http.post(self.url("compare")?).json(&body).send().await?;
        let bytes = Self::check(resp).await?.bytes().await?;
        expect_kind!(from_json(&bytes)?, SplitComparison, "split_comparison")
    }
}

impl ClientError {
    /// HTTP status of an API error.
    pub fn status(&self) -> Option<StatusCode> {
        match self {
            ClientError::Api { status, .. } => StatusCode::from_u16(*status).ok(),
            ClientError::Http(e) => e.status(),
            _ => None,
        }
    }
}
