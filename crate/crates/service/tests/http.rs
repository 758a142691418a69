use std::sync::Arc;

use bicrec::api::{ErrorBody, FacultyBody, HealthBody, RecommendationBody, SessionBody};
use bicrec::fixtures::{k3, u0_usage, u0_visits};
use bicrec::store::{Dataset, USAGE_FILE};
use bicrec::{EngineConfig, EngineState};
use bicrec_service::{serve_on, Engine};
use reqwest::StatusCode;
use serde_json::json;
use tokio::net::TcpListener;

async fn spawn(engine: Arc<Engine>) -> String {
    let listener = TcpListener::bind("127.0.0.1:0").await.unwrap();
    let base = format!("http://{}", listener.local_addr().unwrap());
    tokio::spawn(serve_on(listener, engine));
    base
}

fn k3_state() -> EngineState {
    EngineState::new(k3(), EngineConfig::default())
}

fn u0_state() -> EngineState {
    let catalog = k3();
    let data = Dataset {
        usage: u0_usage(&catalog),
        visits: u0_visits(),
        log: None,
        catalog,
    };
    EngineState { data, config: EngineConfig::default() }
}

async fn session(client: &reqwest::Client, base: &str) -> String {
    let resp = client.post(format!("{base}/api/sessions")).send().await.unwrap();
    assert_eq!(resp.status(), StatusCode::CREATED);
    resp.json::<SessionBody>().await.unwrap().user_id
}

async fn visit(client: &reqwest::Client, base: &str, user: &str, faculty: &str) -> reqwest::Response {
    client
        .post(format!("{base}/api/users/{user}/visits"))
        .json(&json!({ "faculty_id": faculty }))
        .send()
        .await
        .unwrap()
}

async fn error_of(resp: reqwest::Response) -> (StatusCode, String) {
    let status = resp.status();
    let body: ErrorBody = resp.json().await.unwrap();
    (status, body.error)
}

#[tokio::test]
async fn catalog_and_health() {
    let base = spawn(Engine::new(k3_state(), false)).await;
    let client = reqwest::Client::new();
    let cat: Vec<FacultyBody> = client.get(format!("{base}/api/faculties")).send().await.unwrap().json().await.unwrap();
    assert_eq!(cat.len(), 3);
    assert_eq!(cat[1], FacultyBody { id: "f2".into(), attributes: vec!["a2".into(), "a3".into()] });
    let health: HealthBody = client.get(format!("{base}/api/health")).send().await.unwrap().json().await.unwrap();
    assert_eq!(health, HealthBody { status: "ok".into(), faculties: 3, users: 0 });
    session(&client, &base).await;
    let health: HealthBody = client.get(format!("{base}/api/health")).send().await.unwrap().json().await.unwrap();
    assert_eq!(health.users, 1);
}

#[tokio::test]
async fn recbi1_hand_run_over_http() {
    let base = spawn(Engine::new(u0_state(), false)).await;
    let text = reqwest::get(format!("{base}/api/users/u0/recommendations?seed=f1&n=5&mode=recbi1"))
        .await
        .unwrap()
        .text()
        .await
        .unwrap();
    assert_eq!(
        text,
        r#"{"mode":"recbi1","seed_faculty":"f1","items":[{"faculty_id":"f2","score_num":1,"score_den":3}]}"#
    );
}

#[tokio::test]
async fn session_flow_switches_modes() {
    let base = spawn(Engine::new(k3_state(), false)).await;
    let client = reqwest::Client::new();
    let user = session(&client, &base).await;
    let url = format!("{base}/api/users/{user}/recommendations?seed=f1&n=3&l_min=1");
    let rec: RecommendationBody = client.get(&url).send().await.unwrap().json().await.unwrap();
    assert_eq!(rec.mode.as_str(), "recbi2_cold");
    assert!(rec.items.is_empty());

    assert_eq!(visit(&client, &base, &user, "f1").await.status(), StatusCode::NO_CONTENT);
    let rec: RecommendationBody = client.get(&url).send().await.unwrap().json().await.unwrap();
    assert_eq!(rec.mode.as_str(), "recbi2_feedback");
    // the user now reaches f1 (2) and f2 (1): f2 is the one co-visited faculty
    assert_eq!(rec.items.len(), 1);
    assert_eq!(rec.items[0].faculty_id, "f2");
    // covisitation 1 · (1 + (1 + 0) / (1 · 2)) = 3/2
    assert_eq!((rec.items[0].score_num, rec.items[0].score_den), (3, 2));
}

#[tokio::test]
async fn error_statuses() {
    let base = spawn(Engine::new(k3_state(), false)).await;
    let client = reqwest::Client::new();
    let user = session(&client, &base).await;

    let (status, kind) = error_of(visit(&client, &base, &user, "f9").await).await;
    assert_eq!((status, kind.as_str()), (StatusCode::NOT_FOUND, "UnknownFaculty"));

    let get = |q: String| client.get(format!("{base}/api/users/{q}")).send();
    let (status, kind) = error_of(get(format!("{user}/recommendations?seed=f1&mode=recbi1")).await.unwrap()).await;
    assert_eq!((status, kind.as_str()), (StatusCode::CONFLICT, "ZeroVisits"));
    let (status, kind) = error_of(get("ghost/recommendations?seed=f1&mode=recbi2_feedback".into()).await.unwrap()).await;
    assert_eq!((status, kind.as_str()), (StatusCode::NOT_FOUND, "UnknownUser"));
    let (status, kind) = error_of(get(format!("{user}/recommendations?seed=f9")).await.unwrap()).await;
    assert_eq!((status, kind.as_str()), (StatusCode::NOT_FOUND, "UnknownFaculty"));
    let (status, _) = error_of(get(format!("{user}/recommendations?seed=f1&n=0")).await.unwrap()).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    let (status, _) = error_of(get(format!("{user}/recommendations?seed=f1&n=abc")).await.unwrap()).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    let (status, _) = error_of(get(format!("{user}/recommendations?seed=f1&mode=best")).await.unwrap()).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    let (status, _) = error_of(get(format!("{user}/recommendations")).await.unwrap()).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);

    let resp = client
        .post(format!("{base}/api/users/{user}/visits"))
        .header("content-type", "application/json")
        .body("{not json")
        .send()
        .await
        .unwrap();
    let (status, kind) = error_of(resp).await;
    assert_eq!((status, kind.as_str()), (StatusCode::BAD_REQUEST, "ParseError"));
}

#[tokio::test]
async fn visits_are_on_disk_before_the_ack() {
    let dir = tempfile::tempdir().unwrap();
    let mut state = k3_state();
    state.config.data_dir = dir.path().to_path_buf();
    state.save().unwrap();
    let base = spawn(Engine::new(state, true)).await;
    let client = reqwest::Client::new();
    assert_eq!(visit(&client, &base, "s1", "f2").await.status(), StatusCode::NO_CONTENT);
    let usage = std::fs::read_to_string(dir.path().join(USAGE_FILE)).unwrap();
    assert_eq!(usage, "user_id,attribute_id,weight\ns1,a2,1\ns1,a3,1\n");
    let reloaded = EngineState::load(dir.path()).unwrap();
    assert_eq!(reloaded.data.visits.get("s1"), 1);
    assert_eq!(reloaded.data.log.unwrap().count("s1", "f2"), 1);
}

#[tokio::test]
async fn failed_visit_leaves_state_alone() {
    let engine = Engine::new(k3_state(), false);
    let base = spawn(engine.clone()).await;
    let client = reqwest::Client::new();
    visit(&client, &base, "s1", "f1").await;
    let before = engine.snapshot();
    assert_eq!(visit(&client, &base, "s1", "nope").await.status(), StatusCode::NOT_FOUND);
    assert_eq!(visit(&client, &base, "bad id", "f1").await.status(), StatusCode::BAD_REQUEST);
    assert_eq!(*engine.snapshot(), *before);
}
