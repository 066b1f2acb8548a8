use std::collections::{BTreeMap, HashMap};
use std::path::PathBuf;
use std::sync::Arc;

use axum::extract::rejection::JsonRejection;
use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::Json;
use serde::Deserialize;
use serde_json::json;
use splitaudit_core::diagnostics::{cold_start, compare_splits, distribution_shift, leakage, CompareOptions};
use splitaudit_core::ingest::{parse_bytes, parse_log_with, parse_timestamp};
use splitaudit_core::preprocess::PreprocessSpec;
use splitaudit_core::report::{
    run_audit, summarize, to_json, Document, StatsComparison, ThresholdConfig, SCHEMA_VERSION, TOOLKIT_VERSION,
};
use splitaudit_core::split::{describe_split, load_bundle_dir, split, EvalSide, Provenance, SplitBundle, SplitSpec};
use splitaudit_core::stats::{compare_stats, core_stats, repeat_stats, temporal_stats, timeline, StatsReport};
use splitaudit_core::time::{Granularity, TimeRange};
use splitaudit_core::{ColumnMapping, InteractionLog, ParseOptions, SubsetRole, TimestampFormat};

use crate::error::{ApiError, ApiResult};
use crate::state::{AppState, Bundle, Dataset};

type Body<T> = Result<Json<T>, JsonRejection>;

fn json_bytes(bytes: Arc<Vec<u8>>) -> Response {
    ([(header::CONTENT_TYPE, "application/json")], bytes.as_ref().clone()).into_response()
}

async fn blocking<T, F>(f: F) -> ApiResult<T>
where
    F: FnOnce() -> ApiResult<T> + Send + 'static,
    T: Send + 'static,
{
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError::internal(format!("worker failed: {e}")))?
}

pub async fn health() -> Json<serde_json::Value> {
    Json(json!({ "status": "ok", "version": TOOLKIT_VERSION, "schema_version": SCHEMA_VERSION }))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegisterDataset {
    pub name: Option<String>,
    /// Server-side file to read.
    pub path: Option<PathBuf>,
    /// Inline delimited text.
    pub csv: Option<String>,
    pub mapping: Option<ColumnMapping>,
    #[serde(default)]
    pub preprocess: PreprocessSpec,
    #[serde(default)]
    pub skip_malformed: bool,
}

pub async fn register_dataset(State(state): State<AppState>, body: Body<RegisterDataset>) -> ApiResult<Response> {
    let Json(req) = body?;
    let mapping = req.mapping.clone().unwrap_or_else(ColumnMapping::canonical);
    mapping.validate()?;
    req.preprocess.validate()?;
    let options = ParseOptions {
        skip_malformed: req.skip_malformed,
        ordinal_column: None,
    };
    let parsed = match (&req.path, &req.csv) {
        (Some(path), None) => {
            let (path, mapping) = (path.clone(), mapping.clone());
            blocking(move || Ok(parse_log_with(&path, &mapping, SubsetRole::Raw, &options)?)).await?
        }
        (None, Some(_)) => {
            let mapping = mapping.clone();
            let text = req.csv.clone().unwrap_or_default();
            blocking(move || {
                Ok(parse_bytes(
                    text.as_bytes(),
                    std::path::Path::new("<inline>"),
                    &mapping,
                    SubsetRole::Raw,
                    &options,
                )?)
            })
            .await?
        }
        _ => {
            return Err(ApiError::bad_request(
                "invalid_params",
                "exactly one of `path` and `csv` is required",
            ))
        }
    };
    let name = req
        .name
        .clone()
        .or_else(|| req.path.as_ref().map(|p| p.display().to_string()))
        .unwrap_or_else(|| "inline".to_owned());
    let spec = req.preprocess.clone();
    let raw = parsed.log;
    let (raw, preprocessed) = blocking(move || {
        let pre = if spec.is_identity() {
            None
        } else {
            Some(spec.apply(&raw)?)
        };
        Ok((raw, pre))
    })
    .await?;
    let body = json!({
        "name": name,
        "n_interactions": raw.len(),
        "n_users": raw.n_users(),
        "n_items": raw.n_items(),
        "skipped_rows": parsed.skipped_rows,
        "preprocessed_interactions": preprocessed.as_ref().map(InteractionLog::len),
    });
    let id = state.add_dataset(Dataset {
        name,
        raw,
        preprocessing: req.preprocess,
        preprocessed,
        skipped_rows: parsed.skipped_rows,
    });
    let mut body = body;
    body["id"] = json!(id);
    Ok((StatusCode::CREATED, Json(body)).into_response())
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CreateSplit {
    pub dataset: String,
    pub split: SplitSpec,
    /// Replaces the dataset's own preprocessing for this split.
    pub preprocess: Option<PreprocessSpec>,
}

pub async fn create_split(State(state): State<AppState>, body: Body<CreateSplit>) -> ApiResult<Response> {
    let Json(req) = body?;
    let ds = state
        .dataset(&req.dataset)
        .ok_or_else(|| ApiError::not_found("dataset", &req.dataset))?;
    req.split.validate()?;
    let (bundle, working) = blocking(move || {
        let (spec, working) = match &req.preprocess {
            Some(p) => (p.clone(), p.apply(&ds.raw)?),
            None => (ds.preprocessing.clone(), ds.working().clone()),
        };
        let provenance = Provenance::new(ds.name.clone(), spec, ds.raw.len());
        Ok((split(&working, &req.split, provenance)?, working))
    })
    .await?;
    let description = describe_split(&bundle);
    let name = bundle.provenance.source.clone();
    let id = state
        .add_bundle(Bundle {
            name,
            bundle,
            dataset: Some(working),
        })
        .map_err(|e| ApiError::internal(format!("persisting bundle: {e}")))?;
    Ok((
        StatusCode::CREATED,
        Json(json!({ "id": id, "description": description })),
    )
        .into_response())
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegisterBundle {
    pub path: PathBuf,
    pub prefix: Option<String>,
    pub name: Option<String>,
    pub mapping: Option<ColumnMapping>,
    /// Dataset the bundle was cut from, used as the statistics reference.
    pub dataset: Option<String>,
}

pub async fn register_bundle(State(state): State<AppState>, body: Body<RegisterBundle>) -> ApiResult<Response> {
    let Json(req) = body?;
    let reference = match &req.dataset {
        Some(id) => Some(state.dataset(id).ok_or_else(|| ApiError::not_found("dataset", id))?),
        None => None,
    };
    let mapping = req.mapping.clone().unwrap_or_else(ColumnMapping::canonical);
    mapping.validate()?;
    let (path, prefix) = (req.path.clone(), req.prefix.clone());
    let bundle: SplitBundle = blocking(move || Ok(load_bundle_dir(&path, prefix.as_deref(), &mapping)?)).await?;
    let description = describe_split(&bundle);
    let name = req.name.clone().unwrap_or_else(|| req.path.display().to_string());
    let id = state
        .add_bundle(Bundle {
            name,
            bundle,
            dataset: reference.map(|d| d.working().clone()),
        })
        .map_err(|e| ApiError::internal(format!("persisting bundle: {e}")))?;
    Ok((
        StatusCode::CREATED,
        Json(json!({ "id": id, "description": description })),
    )
        .into_response())
}

pub async fn list_bundles(State(state): State<AppState>) -> Json<serde_json::Value> {
    Json(json!({ "bundles": state.bundles() }))
}

pub async fn register_thresholds(State(state): State<AppState>, body: Body<serde_json::Value>) -> ApiResult<Response> {
    let Json(value) = body?;
    let config = ThresholdConfig::from_json_str(&value.to_string())?;
    let id = state.add_thresholds(config);
    Ok((StatusCode::CREATED, Json(json!({ "id": id }))).into_response())
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompareRequest {
    pub bundles: Vec<String>,
    #[serde(default)]
    pub allow_provenance_mismatch: bool,
}

pub async fn compare(State(state): State<AppState>, body: Body<CompareRequest>) -> ApiResult<Response> {
    let Json(req) = body?;
    let bundles = req
        .bundles
        .iter()
        .map(|id| state.bundle(id).ok_or_else(|| ApiError::not_found("bundle", id)))
        .collect::<ApiResult<Vec<_>>>()?;
    let key = format!("compare?{}&{}", req.bundles.join(","), req.allow_provenance_mismatch);
    if let Some(hit) = state.cached(&key) {
        return Ok(json_bytes(hit));
    }
    let body = blocking(move || {
        let refs: Vec<&SplitBundle> = bundles.iter().map(|b| &b.bundle).collect();
        let options = CompareOptions {
            reference: bundles.first().and_then(|b| b.dataset.as_ref()),
            allow_provenance_mismatch: req.allow_provenance_mismatch,
        };
        Ok(to_json(&Document::SplitComparison(compare_splits(&refs, &options)?)))
    })
    .await?;
    Ok(json_bytes(state.publish(key, body)))
}

/// Query parameters accepted per diagnostic.
fn allowed_params(diagnostic: &str) -> Option<&'static [&'static str]> {
    Some(match diagnostic {
        "stats" | "temporal" | "repeats" => &["role", "reference"],
        "timeline" => &["roles", "granularity", "start", "end"],
        "leakage" | "coldstart" => &["eval", "granularity"],
        "shift" => &["eval"],
        "summary" => &["thresholds", "granularity"],
        "audit" => &["granularity"],
        "split" => &[],
        _ => return None,
    })
}

enum Target {
    Dataset(Arc<Dataset>),
    Bundle(Arc<Bundle>),
}

impl Target {
    fn log(&self, role: SubsetRole) -> Option<&InteractionLog> {
        match self {
            Target::Dataset(d) => d.log(role),
            Target::Bundle(b) => b.log(role),
        }
    }

    fn default_role(&self) -> SubsetRole {
        match self {
            Target::Dataset(d) => d.working().role(),
            Target::Bundle(_) => SubsetRole::Train,
        }
    }

    fn roles(&self) -> Vec<SubsetRole> {
        SubsetRole::ALL.into_iter().filter(|&r| self.log(r).is_some()).collect()
    }

    fn bundle(&self, diagnostic: &str) -> ApiResult<&Bundle> {
        match self {
            Target::Bundle(b) => Ok(b),
            Target::Dataset(_) => Err(ApiError::bad_request(
                "invalid_params",
                format!("`{diagnostic}` needs a bundle id, not a dataset id"),
            )),
        }
    }
}

fn bad(code: &'static str, message: String) -> ApiError {
    ApiError::bad_request(code, message)
}

fn parse_role(raw: &str) -> ApiResult<SubsetRole> {
    raw.parse().map_err(|e: String| bad("invalid_params", e))
}

fn parse_time(raw: &str) -> ApiResult<i64> {
    if raw.bytes().all(|b| b.is_ascii_digit()) {
        return raw
            .parse()
            .map_err(|_| bad("invalid_params", format!("bad timestamp `{raw}`")));
    }
    parse_timestamp(raw, TimestampFormat::Iso8601).map_err(|e| bad("invalid_params", e))
}

fn granularity(params: &BTreeMap<String, String>) -> ApiResult<Granularity> {
    params.get("granularity").map_or(Ok(Granularity::Day), |g| {
        g.parse().map_err(|e: String| bad("invalid_params", e))
    })
}

fn eval_side(params: &BTreeMap<String, String>) -> ApiResult<EvalSide> {
    params.get("eval").map_or(Ok(EvalSide::Test), |s| {
        s.parse().map_err(|e: String| bad("invalid_params", e))
    })
}

pub async fn diagnostic(
    State(state): State<AppState>,
    Path((id, name)): Path<(String, String)>,
    Query(query): Query<HashMap<String, String>>,
) -> ApiResult<Response> {
    let allowed = allowed_params(&name).ok_or_else(|| {
        ApiError::new(
            StatusCode::NOT_FOUND,
            "unknown_endpoint",
            format!("no diagnostic `{name}`"),
        )
    })?;
    let params: BTreeMap<String, String> = query.into_iter().collect();
    if let Some(k) = params.keys().find(|k| !allowed.contains(&k.as_str())) {
        return Err(bad(
            "invalid_params",
            format!("unknown query parameter `{k}` for `{name}`"),
        ));
    }
    let target = if let Some(b) = state.bundle(&id) {
        Target::Bundle(b)
    } else if let Some(d) = state.dataset(&id) {
        Target::Dataset(d)
    } else {
        return Err(ApiError::not_found("dataset or bundle", &id));
    };

    // inline thresholds are part of the key verbatim; stored ids are
    // immutable, so their id is a sound key too
    let thresholds = match params.get("thresholds") {
        None => ThresholdConfig::default(),
        Some(raw) if raw.trim_start().starts_with('{') => ThresholdConfig::from_json_str(raw)?,
        Some(tid) => state
            .thresholds(tid)
            .map(|t| (*t).clone())
            .ok_or_else(|| ApiError::not_found("thresholds", tid))?,
    };

    let key = format!(
        "{id}/{name}?{}",
        params
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join("&")
    );
    if let Some(hit) = state.cached(&key) {
        return Ok(json_bytes(hit));
    }
    let body = blocking(move || compute(&target, &name, &params, thresholds)).await?;
    Ok(json_bytes(state.publish(key, to_json(&body))))
}

fn compute(
    target: &Target,
    name: &str,
    params: &BTreeMap<String, String>,
    thresholds: ThresholdConfig,
) -> ApiResult<Document> {
    let lookup = |role: SubsetRole| {
        target
            .log(role)
            .ok_or_else(|| bad("invalid_params", format!("no `{role}` subset here")))
    };
    match name {
        "stats" | "temporal" | "repeats" => {
            let role = params
                .get("role")
                .map_or(Ok(target.default_role()), |r| parse_role(r))?;
            let report = |log: &InteractionLog| -> ApiResult<StatsReport> {
                Ok(match name {
                    "stats" => StatsReport::Core(core_stats(log)?),
                    "temporal" => StatsReport::Temporal(temporal_stats(log)?),
                    _ => StatsReport::Repeats(repeat_stats(log)?),
                })
            };
            let analysed = report(lookup(role)?)?;
            match params.get("reference") {
                None => Ok(match analysed {
                    StatsReport::Core(r) => Document::CoreStats(r),
                    StatsReport::Temporal(r) => Document::TemporalStats(r),
                    StatsReport::Repeats(r) => Document::RepeatStats(r),
                }),
                Some(r) => {
                    let reference = report(lookup(parse_role(r)?)?)?;
                    let comparison = compare_stats(&analysed, &reference)?;
                    Ok(Document::StatsComparison(StatsComparison {
                        analysed,
                        reference,
                        comparison,
                    }))
                }
            }
        }
        "timeline" => {
            let roles = match params.get("roles") {
                Some(list) => list.split(',').map(parse_role).collect::<ApiResult<Vec<_>>>()?,
                None => target.roles(),
            };
            let logs = roles
                .iter()
                .map(|&r| Ok((r, lookup(r)?)))
                .collect::<ApiResult<Vec<_>>>()?;
            let range = match (params.get("start"), params.get("end")) {
                (None, None) => None,
                (start, end) => {
                    let bounds = logs
                        .iter()
                        .filter_map(|(_, l)| l.time_range())
                        .reduce(|a, b| (a.0.min(b.0), a.1.max(b.1)))
                        .unwrap_or((0, 0));
                    Some(TimeRange {
                        start: start.map_or(Ok(bounds.0), |s| parse_time(s))?,
                        end: end.map_or(Ok(bounds.1), |s| parse_time(s))?,
                    })
                }
            };
            Ok(Document::Timeline(timeline(&logs, granularity(params)?, range)?))
        }
        "leakage" => {
            let b = target.bundle(name)?;
            Ok(Document::Leakage(leakage(
                &b.bundle,
                eval_side(params)?,
                granularity(params)?,
            )))
        }
        "coldstart" => {
            let b = target.bundle(name)?;
            Ok(Document::ColdStart(cold_start(
                &b.bundle,
                eval_side(params)?,
                granularity(params)?,
            )))
        }
        "shift" => {
            let b = target.bundle(name)?;
            let reference = b.dataset.as_ref().unwrap_or(&b.bundle.train);
            Ok(Document::Shift(distribution_shift(
                &b.bundle,
                reference,
                eval_side(params)?,
            )?))
        }
        "split" => Ok(Document::SplitDescription(describe_split(&target.bundle(name)?.bundle))),
        "audit" | "summary" => {
            let b = target.bundle(name)?;
            let audit = run_audit(&b.bundle, b.dataset.as_ref(), Some(&b.name), granularity(params)?)?;
            if name == "audit" {
                Ok(Document::Audit(audit))
            } else {
                Ok(Document::Summary(summarize(&audit, &thresholds)))
            }
        }
        other => unreachable!("unrouted diagnostic {other}"),
    }
}
