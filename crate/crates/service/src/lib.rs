//! Stateless HTTP/JSON facade over the occupancy planner.
//!
//! Routes:
//! - `POST /api/pareto`: frontier for an organization
//! - `POST /api/trajectory`: day series for one occupancy
//! - `GET /api/health`: liveness and engine version
//!
//! Request and response shapes are documented in `API.md` next to this crate.

use axum::extract::rejection::JsonRejection;
use axum::http::{HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use occupancy::scenario::{frontier_report, FrontierReport};
use occupancy::{epidemic, Error, InfectionTrajectory, OrganizationParams, ENGINE_VERSION};
use serde::{Deserialize, Serialize};
use tower_http::cors::{AllowOrigin, Any, CorsLayer};

/// Longest trajectory the service will compute.
pub const MAX_HORIZON: usize = 365;

#[derive(Debug, Clone, Default)]
pub struct ServiceConfig {
    /// Allowed browser origin; `None` or `*` allows any.
    pub cors_origin: Option<String>,
}

impl ServiceConfig {
    pub fn from_env() -> Self {
        ServiceConfig {
            cors_origin: std::env::var("OCCUPANCY_CORS_ORIGIN").ok(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ApiRequest {
    #[serde(flatten)]
    pub params: OrganizationParams,
    #[serde(default)]
    pub occup: Option<f64>,
    #[serde(default)]
    pub horizon: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryResponse {
    pub engine_version: String,
    pub params: OrganizationParams,
    pub occup: f64,
    pub background_risk: f64,
    pub trajectory: InfectionTrajectory,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Health {
    pub status: String,
    pub version: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldError {
    pub field: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub error: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub fields: Vec<FieldError>,
}

pub struct ApiError {
    status: StatusCode,
    body: ErrorBody,
}

impl ApiError {
    fn bad_request(error: impl Into<String>, fields: Vec<FieldError>) -> Self {
        ApiError {
            status: StatusCode::BAD_REQUEST,
            body: ErrorBody {
                error: error.into(),
                fields,
            },
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}

impl From<JsonRejection> for ApiError {
    fn from(r: JsonRejection) -> Self {
        ApiError::bad_request(r.body_text(), Vec::new())
    }
}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::TrivialOptimum { .. } => StatusCode::UNPROCESSABLE_ENTITY,
            Error::NonFinite { .. } | Error::Io(_) => StatusCode::INTERNAL_SERVER_ERROR,
            _ => StatusCode::BAD_REQUEST,
        };
        let fields = e
            .field()
            .map(|f| {
                vec![FieldError {
                    field: f.into(),
                    message: e.to_string(),
                }]
            })
            .unwrap_or_default();
        ApiError {
            status,
            body: ErrorBody {
                error: e.to_string(),
                fields,
            },
        }
    }
}

/// All field violations as one 400, or 422 when home productivity is the only problem.
fn check(params: &OrganizationParams) -> Result<(), ApiError> {
    let violations = params.violations();
    let fields: Vec<FieldError> = violations
        .iter()
        .filter(|e| !matches!(e, Error::TrivialOptimum { .. }))
        .map(|e| FieldError {
            field: e.field().unwrap_or("params").into(),
            message: e.to_string(),
        })
        .collect();
    if !fields.is_empty() {
        return Err(ApiError::bad_request("invalid parameters", fields));
    }
    match violations.into_iter().next() {
        Some(e) => Err(e.into()),
        None => Ok(()),
    }
}

async fn compute<T: Send + 'static>(f: impl FnOnce() -> Result<T, Error> + Send + 'static) -> Result<T, ApiError> {
    match tokio::task::spawn_blocking(f).await {
        Ok(r) => r.map_err(ApiError::from),
        Err(e) => Err(ApiError {
            status: StatusCode::INTERNAL_SERVER_ERROR,
            body: ErrorBody {
                error: e.to_string(),
                fields: Vec::new(),
            },
        }),
    }
}

async fn pareto(body: Result<Json<ApiRequest>, JsonRejection>) -> Result<Json<FrontierReport>, ApiError> {
    let Json(req) = body?;
    check(&req.params)?;
    Ok(Json(compute(move || frontier_report(&req.params)).await?))
}

async fn trajectory(body: Result<Json<ApiRequest>, JsonRejection>) -> Result<Json<TrajectoryResponse>, ApiError> {
    let Json(req) = body?;
    check(&req.params)?;
    let occup = req.occup.unwrap_or(1.0);
    let horizon = req.horizon.unwrap_or(req.params.tau as usize);
    let mut fields = Vec::new();
    if !occup.is_finite() || !(0.0..=1.0).contains(&occup) {
        fields.push(FieldError {
            field: "occup".into(),
            message: format!("must lie in [0, 1], got {occup}"),
        });
    }
    if horizon > MAX_HORIZON {
        fields.push(FieldError {
            field: "horizon".into(),
            message: format!("must be at most {MAX_HORIZON}, got {horizon}"),
        });
    }
    if !fields.is_empty() {
        return Err(ApiError::bad_request("invalid parameters", fields));
    }
    let response = compute(move || {
        let trajectory = epidemic::trajectory_two_group(&req.params, occup, horizon)?;
        Ok(TrajectoryResponse {
            engine_version: ENGINE_VERSION.into(),
            background_risk: epidemic::arrival_probability(&req.params)?,
            params: req.params,
            occup,
            trajectory,
        })
    })
    .await?;
    Ok(Json(response))
}

async fn health() -> Json<Health> {
    Json(Health {
        status: "ok".into(),
        version: ENGINE_VERSION.into(),
    })
}

fn cors(config: &ServiceConfig) -> CorsLayer {
    let origin = match config.cors_origin.as_deref() {
        None | Some("*") => AllowOrigin::from(Any),
        Some(o) => match HeaderValue::from_str(o) {
            Ok(v) => AllowOrigin::exact(v),
            Err(_) => AllowOrigin::list(Vec::<HeaderValue>::new()),
        },
    };
    CorsLayer::new()
        .allow_origin(origin)
        .allow_methods(Any)
        .allow_headers(Any)
}

pub fn app(config: &ServiceConfig) -> Router {
    Router::new()
        .route("/api/pareto", post(pareto))
        .route("/api/trajectory", post(trajectory))
        .route("/api/health", get(health))
        .layer(cors(config))
}
