use splitaudit_client::{BundleRequest, Client, ClientError, DatasetRequest, Thresholds};
use splitaudit_core::report::{CardStatus, Threshold, ThresholdConfig};
use splitaudit_core::split::{EvalSide, SplitSpec, TargetMode};
use splitaudit_core::time::Granularity;
use splitaudit_server::{router, AppState, ServerConfig};

async fn spawn(config: ServerConfig) -> String {
    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
    let addr = listener.local_addr().unwrap();
    let app = router(AppState::new(config));
    tokio::spawn(async move { axum_serve(listener, app).await });
    format!("http://{addr}")
}

async fn axum_serve(listener: tokio::net::TcpListener, app: axum::Router) {
    axum::serve(listener, app).await.unwrap();
}

fn csv() -> String {
    let mut out = String::from("user_id,item_id,timestamp\n");
    for u in 0..10 {
        for k in 0..8 {
            out.push_str(&format!(
                "u{u},i{},{}\n",
                (u * 3 + k) % 6,
                1_000_000 + u * 100_000 + k * 1000
            ));
        }
    }
    out
}

#[tokio::test(flavor = "multi_thread")]
async fn full_flow_over_http() {
    let base = spawn(ServerConfig::default()).await;
    let client = Client::new(&base).unwrap();
    assert_eq!(client.health().await.unwrap().schema_version, 1);

    let ds = client.register_dataset(&DatasetRequest::inline(csv())).await.unwrap();
    assert_eq!((ds.n_interactions, ds.n_users), (80, 10));

    let loo = client
        .create_split(&ds.id, &SplitSpec::leave_one_out(), None)
        .await
        .unwrap();
    assert_eq!(loo.description.label, "loo");
    let gts = client
        .create_split(
            &ds.id,
            &SplitSpec::global_temporal(0.8, 0.9, TargetMode::AllItems),
            None,
        )
        .await
        .unwrap();

    assert_eq!(
        client
            .leakage(&gts.id, EvalSide::Test)
            .await
            .unwrap()
            .leaked_target_pct(),
        0.0
    );
    assert_eq!(
        client
            .cold_start(&loo.id, EvalSide::Test)
            .await
            .unwrap()
            .cold_users
            .count,
        0
    );
    assert!(client
        .shift(&loo.id, EvalSide::Test)
        .await
        .unwrap()
        .position_ks
        .is_some());
    assert_eq!(client.split_description(&gts.id).await.unwrap(), gts.description);

    let audit = client.audit(&loo.id, Granularity::Day).await.unwrap();
    assert_eq!(audit.leakage.len(), 2);

    let strict = ThresholdConfig {
        leaked_target_pct: Threshold::new(0.0, 0.0),
        ..Default::default()
    };
    let inline = client
        .summary(&gts.id, &Thresholds::Inline(strict.clone()), Granularity::Day)
        .await
        .unwrap();
    assert_eq!(inline.card("leaked_target_pct").unwrap().status, CardStatus::Alert);
    let tid = client.register_thresholds(&strict).await.unwrap();
    let stored = client
        .summary(&gts.id, &Thresholds::Stored(tid), Granularity::Day)
        .await
        .unwrap();
    assert_eq!(stored, inline);

    let m = client.compare(&[&loo.id, &gts.id], false).await.unwrap();
    assert_eq!(m.rows.len(), 2);
}

#[tokio::test(flavor = "multi_thread")]
async fn api_errors_are_typed() {
    let base = spawn(ServerConfig::default()).await;
    let client = Client::new(&base).unwrap();
    match client.leakage("b404", EvalSide::Test).await {
        Err(ClientError::Api { status: 404, code, .. }) => assert_eq!(code, "unknown_id"),
        other => panic!("{other:?}"),
    }
    let err = client
        .register_bundle(&BundleRequest {
            path: "/definitely/not/here".into(),
            ..Default::default()
        })
        .await
        .unwrap_err();
    assert_eq!(err.status().map(|s| s.as_u16()), Some(400));
}
