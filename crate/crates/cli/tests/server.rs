use std::sync::Arc;

use axum::body::{to_bytes, Body};
use axum::http::{Request, StatusCode};
use axum::Router;
use base64::Engine as _;
use serde_json::{json, Value};
use tower::ServiceExt;

use c2l::interaction::Policy;
use c2l::predictor::wire::{WireRequest, WireResponse};
use c2l::predictor::{GeodesicParams, HttpPredictor, PredictRequest, Predictor};
use c2l::{rle, Annotation, GeodesicPredictor, Image, Label, LabelMask, Point, Sign};
use clicks2line_cli::serve::{app_state, asset_path, router};

const W: usize = 96;
const H: usize = 48;

fn bar_image() -> Image {
    Image::from_fn_gray(W, H, |x, y| {
        if (4..92).contains(&x) && (22..25).contains(&y) {
            200
        } else {
            40
        }
    })
}

fn bar_gt() -> LabelMask {
    LabelMask::from_fn(W, H, |x, y| {
        if (4..92).contains(&x) && (22..25).contains(&y) {
            Label::Foreground
        } else {
            Label::Background
        }
    })
}

fn b64(bytes: &[u8]) -> String {
    base64::engine::general_purpose::STANDARD.encode(bytes)
}

fn gt_png(gt: &LabelMask) -> Vec<u8> {
    Image::from_fn_gray(gt.width(), gt.height(), |x, y| gt.get(x, y).to_gray())
        .to_png_bytes()
        .unwrap()
}

fn app(assets: Option<std::path::PathBuf>) -> Router {
    let predictor: Arc<dyn Predictor> = Arc::new(GeodesicPredictor::new(GeodesicParams::default()));
    router(app_state(predictor, Policy::default(), assets).unwrap())
}

async fn call(app: &Router, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let req = Request::builder().method(method).uri(uri);
    let req = match body {
        Some(b) => req
            .header("content-type", "application/json")
            .body(Body::from(b.to_string()))
            .unwrap(),
        None => req.body(Body::empty()).unwrap(),
    };
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = to_bytes(resp.into_body(), usize::MAX).await.unwrap();
    let value = serde_json::from_slice(&bytes).unwrap_or_else(|_| Value::String(String::from_utf8_lossy(&bytes).into()));
    (status, value)
}

async fn create(app: &Router, with_gt: bool) -> String {
    let mut body = json!({ "image_b64": b64(&bar_image().to_png_bytes().unwrap()) });
    if with_gt {
        body["gt_b64"] = json!(b64(&gt_png(&bar_gt())));
    }
    let (status, v) = call(app, "POST", "/sessions", Some(body)).await;
    assert_eq!(status, StatusCode::OK, "{v}");
    assert_eq!((v["width"].as_u64(), v["height"].as_u64()), (Some(W as u64), Some(H as u64)));
    v["id"].as_str().unwrap().to_string()
}

fn click(x: usize, y: usize) -> Value {
    serde_json::to_value(Annotation::click(Sign::Positive, Point::new(x, y))).unwrap()
}

#[tokio::test]
async fn session_lifecycle() {
    let app = app(None);
    let id = create(&app, true).await;
    let (_, empty) = call(&app, "GET", &format!("/sessions/{id}/mask"), None).await;
    assert_eq!(empty["annotations"], 0);
    assert_eq!(empty["mask_rle"], json!([W * H]));

    let (status, first) = call(&app, "POST", &format!("/sessions/{id}/annotations"), Some(click(5, 23))).await;
    assert_eq!(status, StatusCode::OK, "{first}");
    assert_eq!(first["cumulative_cost"], 1);
    assert!(first["iou"].as_f64().unwrap() > 0.0);

    let (status, sug) = call(&app, "GET", &format!("/sessions/{id}/suggest"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert!(["next", "converged"].contains(&sug["status"].as_str().unwrap()), "{sug}");

    let (_, second) = call(&app, "POST", &format!("/sessions/{id}/annotations"), Some(click(60, 23))).await;
    assert_eq!(second["annotations"], 2);
    let (status, undone) = call(&app, "POST", &format!("/sessions/{id}/undo"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(undone, first);

    let (status, _) = call(&app, "DELETE", &format!("/sessions/{id}"), None).await;
    assert_eq!(status, StatusCode::NO_CONTENT);
    let (status, _) = call(&app, "GET", &format!("/sessions/{id}/mask"), None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn error_statuses() {
    let app = app(None);
    let id = create(&app, false).await;
    let ann = format!("/sessions/{id}/annotations");
    let (status, v) = call(&app, "POST", &ann, Some(click(W, 0))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST, "{v}");
    assert!(v["error"].is_string());
    let (status, _) = call(&app, "POST", &format!("/sessions/{id}/undo"), None).await;
    assert_eq!(status, StatusCode::CONFLICT);
    let (status, _) = call(&app, "GET", &format!("/sessions/{id}/suggest"), None).await;
    assert_eq!(status, StatusCode::CONFLICT);
    let (status, _) = call(&app, "POST", "/sessions/nope/annotations", Some(click(1, 1))).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    let (status, _) = call(&app, "POST", "/sessions", Some(json!({ "image_b64": "!!" }))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    let (status, _) = call(&app, "POST", "/sessions", Some(json!({ "image_b64": b64(b"not an image") }))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    let (status, v) = call(&app, "GET", "/healthz", None).await;
    assert_eq!((status, v), (StatusCode::OK, json!("ok")));
}

#[tokio::test]
async fn predict_endpoint_matches_direct_call() {
    let app = app(None);
    let img = bar_image();
    let anns = [Annotation::click(Sign::Positive, Point::new(40, 23))];
    let req = PredictRequest {
        image: &img,
        annotations: &anns,
        prev_mask: None,
    };
    let wire = WireRequest::from_request(&req).unwrap();
    let (status, v) = call(&app, "POST", "/predict", Some(serde_json::to_value(&wire).unwrap())).await;
    assert_eq!(status, StatusCode::OK);
    let resp: WireResponse = serde_json::from_value(v).unwrap();
    let direct = GeodesicPredictor::new(GeodesicParams::default()).predict(&req).unwrap();
    assert_eq!(rle::decode(&resp.mask_rle, W, H).unwrap(), direct);

    let mut wrong = wire.clone();
    wrong.width += 1;
    let (status, _) = call(&app, "POST", "/predict", Some(serde_json::to_value(&wrong).unwrap())).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
}

#[test]
fn http_predictor_against_live_server() {
    let rt = tokio::runtime::Runtime::new().unwrap();
    let listener = rt.block_on(tokio::net::TcpListener::bind("127.0.0.1:0")).unwrap();
    let addr = listener.local_addr().unwrap();
    rt.spawn(async move { axum::serve(listener, app(None)).await.unwrap() });

    let remote = HttpPredictor::new(&format!("http://{addr}"));
    let local = GeodesicPredictor::new(GeodesicParams::default());
    let img = bar_image();
    let anns = vec![
        Annotation::click(Sign::Positive, Point::new(10, 23)),
        Annotation::line(Sign::Negative, Point::new(10, 5), Point::new(80, 5)),
    ];
    for n in 1..=anns.len() {
        let req = PredictRequest {
            image: &img,
            annotations: &anns[..n],
            prev_mask: None,
        };
        assert_eq!(remote.predict(&req).unwrap(), local.predict(&req).unwrap());
    }
}

#[tokio::test]
async fn static_assets() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("index.html"), "<h1>hi</h1>").unwrap();
    let app = app(Some(dir.path().to_path_buf()));
    let resp = app
        .clone()
        .oneshot(Request::get("/").body(Body::empty()).unwrap())
        .await
        .unwrap();
    assert_eq!(resp.status(), StatusCode::OK);
    assert!(resp.headers()["content-type"].to_str().unwrap().starts_with("text/html"));
    let (status, _) = call(&app, "GET", "/missing.js", None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert!(asset_path(dir.path(), "/../etc/passwd").is_none());
    assert!(asset_path(dir.path(), "/a/./b").is_some());
}
