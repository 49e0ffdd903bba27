//! Every endpoint's body equals the JSON encoding of the library call on
//! the same inputs.

use std::sync::Arc;

use axum::body::Body;
use axum::http::{Method, Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use serde::Serialize;
use serde_json::{json, Value};
use touchscope_core::clustering::{region_metrics, Side};
use touchscope_core::layout::RingRadii;
use touchscope_core::report::SessionSummary;
use touchscope_core::synth::{novice_session, skill_regions, JOYSTICK_CENTER};
use touchscope_core::{
    build_layout_with_regions, confidence_region, event_points, heatmap, load_session,
    serialize_log, spatial_query, Area, EventFilter, LayoutConfig, Point, QueryMode,
};
use touchscope_service::api::{
    run_cluster, ClusterRequest, ConfidenceResponse, ErrorBody, RegionsBody,
};
use touchscope_service::{router, AppState, ServiceConfig, SessionStore};
use tower::ServiceExt;

struct Harness {
    app: Router,
    _dir: tempfile::TempDir,
}

impl Harness {
    fn new() -> Self {
        Self::with_config(ServiceConfig::default())
    }

    fn with_config(config: ServiceConfig) -> Self {
        let dir = tempfile::tempdir().unwrap();
        let store = SessionStore::open(dir.path()).unwrap();
        let app = router(AppState {
            store: Arc::new(store),
            config,
        });
        Self { app, _dir: dir }
    }

    async fn send(&self, method: Method, uri: &str, body: Body) -> (StatusCode, Vec<u8>) {
        let req = Request::builder()
            .method(method)
            .uri(uri)
            .header("content-type", "application/json")
            .body(body)
            .unwrap();
        let resp = self.app.clone().oneshot(req).await.unwrap();
        let status = resp.status();
        let bytes = resp
            .into_body()
            .collect()
            .await
            .unwrap()
            .to_bytes()
            .to_vec();
        (status, bytes)
    }

    async fn get(&self, uri: &str) -> (StatusCode, Vec<u8>) {
        self.send(Method::GET, uri, Body::empty()).await
    }

    async fn post(&self, uri: &str, body: Value) -> (StatusCode, Vec<u8>) {
        self.send(Method::POST, uri, Body::from(body.to_string()))
            .await
    }

    async fn upload(&self, id: &str, log: &str) -> (StatusCode, Vec<u8>) {
        self.send(
            Method::POST,
            &format!("/sessions?id={id}"),
            Body::from(log.to_string()),
        )
        .await
    }
}

fn json_of<T: Serialize>(v: &T) -> Vec<u8> {
    serde_json::to_vec(v).unwrap()
}

fn error_code(bytes: &[u8]) -> String {
    serde_json::from_slice::<ErrorBody>(bytes).unwrap().error
}

fn novice_log() -> String {
    serialize_log(&novice_session(1).session)
}

/// 1228 taps scattered around the joystick.
fn joystick_log() -> String {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
    let pts = touchscope_core::synth::gaussian_blob(&mut rng, JOYSTICK_CENTER, 35.0, 1228);
    let mut log = String::from("#device,1920,1080,110.7,62.3\n");
    for (i, p) in pts.iter().enumerate() {
        let t = i as f64 * 200.0;
        log.push_str(&format!(
            "{t},0,D,{},{}\n{},0,U,{},{}\n",
            p.x,
            p.y,
            t + 50.0,
            p.x,
            p.y
        ));
    }
    log
}

#[tokio::test]
async fn upload_list_describe() {
    let h = Harness::new();
    let log = novice_log();
    let (status, body) = h.upload("novice", &log).await;
    assert_eq!(status, StatusCode::CREATED);
    let session = load_session("novice", log.as_bytes()).unwrap();
    let info: Value = serde_json::from_slice(&body).unwrap();
    assert_eq!(info["session_id"], "novice");
    assert_eq!(
        info["summary"],
        serde_json::to_value(SessionSummary::of(&session)).unwrap()
    );

    // re-upload of the same id replaces the log
    let (status, _) = h.upload("novice", &log).await;
    assert_eq!(status, StatusCode::OK);
    h.upload("alpha", &log).await;

    let (status, body) = h.get("/sessions").await;
    assert_eq!(status, StatusCode::OK);
    let list: Value = serde_json::from_slice(&body).unwrap();
    let ids: Vec<&str> = list["sessions"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s["session_id"].as_str().unwrap())
        .collect();
    assert_eq!(ids, ["alpha", "novice"]);

    let (status, body) = h.get("/sessions/novice").await;
    assert_eq!(status, StatusCode::OK);
    let detail: Value = serde_json::from_slice(&body).unwrap();
    assert_eq!(
        detail["device"],
        serde_json::to_value(session.device).unwrap()
    );
    assert_eq!(detail["regions"], json!([]));
}

#[tokio::test]
async fn upload_without_id_uses_content_hash() {
    let h = Harness::new();
    let (status, body) = h
        .send(Method::POST, "/sessions", Body::from(novice_log()))
        .await;
    assert_eq!(status, StatusCode::CREATED);
    let info: Value = serde_json::from_slice(&body).unwrap();
    let hash = info["hash"].as_str().unwrap();
    assert_eq!(info["session_id"], format!("s-{}", &hash[..12]));
}

#[tokio::test]
async fn layout_matches_library() {
    let h = Harness::new();
    let log = novice_log();
    h.upload("novice", &log).await;
    let session = load_session("novice", log.as_bytes()).unwrap();

    let (status, body) = h.get("/sessions/novice/layout").await;
    assert_eq!(status, StatusCode::OK);
    let expected = build_layout_with_regions(&session, &[], &LayoutConfig::default()).unwrap();
    assert_eq!(body, json_of(&expected));
    assert_eq!(expected.dots.len(), session.events.len());

    let regions = skill_regions();
    let (status, body) = h
        .send(
            Method::PUT,
            "/sessions/novice/regions",
            Body::from(json!({ "regions": regions }).to_string()),
        )
        .await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(
        body,
        json_of(&RegionsBody {
            regions: regions.clone()
        })
    );
    let (_, body) = h.get("/sessions/novice/regions").await;
    assert_eq!(
        body,
        json_of(&RegionsBody {
            regions: regions.clone()
        })
    );

    let (status, body) = h
        .get("/sessions/novice/layout?touch=0.2&move=0.3&lift=0.4&max_arc_height=0.1&membership=all_events")
        .await;
    assert_eq!(status, StatusCode::OK);
    let config = LayoutConfig {
        ring_radii: RingRadii {
            touch: 0.2,
            moving: 0.3,
            lift: 0.4,
        },
        max_arc_height: 0.1,
        semantic_membership: touchscope_core::layout::SemanticMembership::AllEvents,
        ..LayoutConfig::default()
    };
    let expected = build_layout_with_regions(&session, &regions, &config).unwrap();
    assert_eq!(body, json_of(&expected));
    assert_eq!(expected.semantic_rings.len(), 5);

    // regions changed, so the cached default layout must not be reused
    let (_, body) = h.get("/sessions/novice/layout").await;
    let expected = build_layout_with_regions(&session, &regions, &LayoutConfig::default()).unwrap();
    assert_eq!(body, json_of(&expected));
}

#[tokio::test]
async fn service_default_rings_apply() {
    let radii = RingRadii {
        touch: 0.25,
        moving: 0.35,
        lift: 0.45,
    };
    let h = Harness::with_config(ServiceConfig {
        default_samples: 16,
        ring_radii: radii,
    });
    let log = novice_log();
    h.upload("novice", &log).await;
    let session = load_session("novice", log.as_bytes()).unwrap();
    let (_, body) = h.get("/sessions/novice/layout").await;
    let config = LayoutConfig {
        ring_radii: radii,
        ..LayoutConfig::default()
    };
    assert_eq!(
        body,
        json_of(&build_layout_with_regions(&session, &[], &config).unwrap())
    );

    let (_, body) = h
        .post("/sessions/novice/cluster", json!({ "k": 2, "seed": 3 }))
        .await;
    let req: ClusterRequest = serde_json::from_value(json!({ "k": 2, "seed": 3 })).unwrap();
    let expected = run_cluster(
        &session,
        &req,
        &ServiceConfig {
            default_samples: 16,
            ring_radii: radii,
        },
    )
    .unwrap();
    assert_eq!(body, json_of(&expected));
    assert_eq!(expected.result.centroids[0].len(), 16);
}

#[tokio::test]
async fn query_matches_library() {
    let h = Harness::new();
    let log = novice_log();
    h.upload("novice", &log).await;
    let session = load_session("novice", log.as_bytes()).unwrap();
    for (area, mode) in [
        (
            Area::Circle {
                center: JOYSTICK_CENTER,
                radius: 220.0,
            },
            QueryMode::StartIn,
        ),
        (
            Area::Circle {
                center: JOYSTICK_CENTER,
                radius: 220.0,
            },
            QueryMode::AnyIn,
        ),
        (
            Area::Rect {
                min: Point::new(1300.0, 500.0),
                max: Point::new(1920.0, 1080.0),
            },
            QueryMode::StartIn,
        ),
        (
            Area::Circle {
                center: Point::new(960.0, 100.0),
                radius: 10.0,
            },
            QueryMode::AnyIn,
        ),
    ] {
        let (status, body) = h
            .post(
                "/sessions/novice/query",
                json!({ "area": area, "mode": mode }),
            )
            .await;
        assert_eq!(status, StatusCode::OK);
        assert_eq!(body, json_of(&spatial_query(&session, &area, mode)));
    }
}

#[tokio::test]
async fn confidence_region_count_law() {
    let h = Harness::new();
    let log = joystick_log();
    h.upload("joystick", &log).await;
    let session = load_session("joystick", log.as_bytes()).unwrap();
    for (c, want) in [(0.95, 1166), (0.99, 1215)] {
        let (status, body) = h
            .post(
                "/sessions/joystick/confidence-region",
                json!({ "center": JOYSTICK_CENTER, "radius": 400.0, "confidence": c }),
            )
            .await;
        assert_eq!(status, StatusCode::OK);
        let points = event_points(&session, EventFilter::Down);
        assert_eq!(points.len(), 1228);
        let region = confidence_region(&points, JOYSTICK_CENTER, 400.0, c).unwrap();
        let metrics = region_metrics(&region, &session.device, Side::Left).unwrap();
        assert_eq!(body, json_of(&ConfidenceResponse { region, metrics }));
        let parsed: ConfidenceResponse = serde_json::from_slice(&body).unwrap();
        assert_eq!(parsed.region.original_count, 1228);
        assert_eq!(parsed.region.new_count, want);
    }

    // all events doubles the selection
    let (_, body) = h
        .post(
            "/sessions/joystick/confidence-region",
            json!({ "center": JOYSTICK_CENTER, "radius": 400.0, "confidence": 0.95, "filter": "all", "side": "Right" }),
        )
        .await;
    let points = event_points(&session, EventFilter::All);
    let region = confidence_region(&points, JOYSTICK_CENTER, 400.0, 0.95).unwrap();
    let metrics = region_metrics(&region, &session.device, Side::Right).unwrap();
    assert_eq!(body, json_of(&ConfidenceResponse { region, metrics }));
}

#[tokio::test]
async fn confidence_sweep_radii_non_decreasing() {
    let h = Harness::new();
    h.upload("joystick", &joystick_log()).await;
    let mut last = 0.0;
    for c in [0.90, 0.95, 0.99] {
        let (_, body) = h
            .post(
                "/sessions/joystick/confidence-region",
                json!({ "center": JOYSTICK_CENTER, "radius": 400.0, "confidence": c }),
            )
            .await;
        let parsed: ConfidenceResponse = serde_json::from_slice(&body).unwrap();
        assert!(parsed.region.new_radius >= last);
        last = parsed.region.new_radius;
    }
}

#[tokio::test]
async fn cluster_is_deterministic_and_matches_library() {
    let h = Harness::new();
    let log = novice_log();
    h.upload("novice", &log).await;
    let session = load_session("novice", log.as_bytes()).unwrap();
    let request =
        json!({ "k": 3, "seed": 42, "n_samples": 32, "weight_euclid": 0.7, "min_length_px": 0.0 });
    let (status, first) = h.post("/sessions/novice/cluster", request.clone()).await;
    assert_eq!(status, StatusCode::OK);
    let (_, second) = h.post("/sessions/novice/cluster", request.clone()).await;
    assert_eq!(first, second);

    // a fresh service (cold cache) gives the same bytes
    let cold = Harness::new();
    cold.upload("novice", &log).await;
    let (_, third) = cold.post("/sessions/novice/cluster", request.clone()).await;
    assert_eq!(first, third);

    let req: ClusterRequest = serde_json::from_value(request).unwrap();
    let expected = run_cluster(&session, &req, &ServiceConfig::default()).unwrap();
    assert_eq!(first, json_of(&expected));
    assert_eq!(expected.gesture_ids.len(), session.gestures.len());
}

#[tokio::test]
async fn heatmap_matches_library() {
    let h = Harness::new();
    let log = novice_log();
    h.upload("novice", &log).await;
    let session = load_session("novice", log.as_bytes()).unwrap();
    for (uri, cols, rows, filter) in [
        (
            "/sessions/novice/heatmap?cols=16&rows=9",
            16,
            9,
            EventFilter::All,
        ),
        (
            "/sessions/novice/heatmap?cols=4&rows=3&filter=down",
            4,
            3,
            EventFilter::Down,
        ),
        (
            "/sessions/novice/heatmap?cols=1&rows=1&filter=up",
            1,
            1,
            EventFilter::Up,
        ),
        (
            "/sessions/novice/heatmap?cols=2&rows=2&filter=touch",
            2,
            2,
            EventFilter::Down,
        ),
        (
            "/sessions/novice/heatmap?cols=2&rows=2&filter=lift",
            2,
            2,
            EventFilter::Up,
        ),
    ] {
        let (status, body) = h.get(uri).await;
        assert_eq!(status, StatusCode::OK);
        assert_eq!(
            body,
            json_of(&heatmap(&session, cols, rows, filter).unwrap())
        );
        // idempotent GET
        assert_eq!(h.get(uri).await.1, body);
    }
}

#[tokio::test]
async fn errors_carry_module_codes() {
    let h = Harness::new();
    h.upload("novice", &novice_log()).await;

    let (status, body) = h.get("/sessions/missing/layout").await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert_eq!(error_code(&body), "SessionNotFound");

    let (status, body) = h.upload("bad", "0,0,D,1,1\n").await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(error_code(&body), "MissingDeviceHeader");

    let (status, body) = h
        .upload("bad%2Fid", "#device,1920,1080,110.7,62.3\n0,0,D,1,1\n")
        .await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(error_code(&body), "InvalidSessionId");

    let (status, body) = h.get("/sessions/novice/heatmap?cols=0&rows=9").await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(error_code(&body), "InvalidGrid");

    let (status, body) = h.get("/sessions/novice/heatmap?rows=9").await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(error_code(&body), "InvalidRequest");

    let (status, body) = h.get("/sessions/novice/layout?touch=0.9").await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(error_code(&body), "InvalidLayoutConfig");

    let (status, body) = h
        .post(
            "/sessions/novice/confidence-region",
            json!({ "center": "middle", "radius": 1.0, "confidence": 0.9 }),
        )
        .await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(error_code(&body), "InvalidRequest");

    let (status, body) = h
        .post(
            "/sessions/novice/confidence-region",
            json!({ "center": { "x": 960.0, "y": 20.0 }, "radius": 5.0, "confidence": 0.9 }),
        )
        .await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(error_code(&body), "EmptySelection");

    let (status, body) = h
        .post(
            "/sessions/novice/confidence-region",
            json!({ "center": { "x": 300.0, "y": 800.0 }, "radius": 200.0, "confidence": 1.5 }),
        )
        .await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(error_code(&body), "InvalidConfidence");

    let (status, body) = h
        .post("/sessions/novice/cluster", json!({ "k": 10000 }))
        .await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(error_code(&body), "TooFewPoints");

    let mut overlapping = skill_regions();
    overlapping[1].center = overlapping[0].center;
    let (status, body) = h
        .post(
            "/sessions/novice/regions",
            json!({ "regions": overlapping }),
        )
        .await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(error_code(&body), "AmbiguousRegions");
    // the rejected definition was not persisted
    let (_, body) = h.get("/sessions/novice/regions").await;
    assert_eq!(body, json_of(&RegionsBody { regions: vec![] }));
}

#[tokio::test]
async fn store_survives_restart() {
    let dir = tempfile::tempdir().unwrap();
    let log = novice_log();
    let layout_before = {
        let store = SessionStore::open(dir.path()).unwrap();
        let app = router(AppState {
            store: Arc::new(store),
            config: ServiceConfig::default(),
        });
        let h = Harness {
            app,
            _dir: tempfile::tempdir().unwrap(),
        };
        h.upload("novice", &log).await;
        h.post(
            "/sessions/novice/regions",
            json!({ "regions": skill_regions() }),
        )
        .await;
        h.get("/sessions/novice/layout").await.1
    };
    let store = SessionStore::open(dir.path()).unwrap();
    let app = router(AppState {
        store: Arc::new(store),
        config: ServiceConfig::default(),
    });
    let h = Harness {
        app,
        _dir: tempfile::tempdir().unwrap(),
    };
    assert_eq!(h.get("/sessions/novice/layout").await.1, layout_before);
}
