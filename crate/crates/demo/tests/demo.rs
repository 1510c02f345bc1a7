use lowrank_demo::{compare_svt, compare_svt_json, inertial_sweep, inertial_sweep_json, rank_traces};

#[test]
fn svt_comparison_error_shrinks() {
    let out = compare_svt(15, 1.0, 200, 3).unwrap();
    assert_eq!(out.history.len(), 200);
    assert!(out.final_error < out.history[0].error);
    assert!(out.final_error < 1e-6);
    assert_eq!(out.singular_values.len(), 15);
    assert_eq!(out.svt_rank, out.singular_values.iter().filter(|&&s| s > 1.0).count());
}

#[test]
fn rank_traces_settle_on_planted_rank() {
    let out = rank_traces(40, 3, 0.6, 5).unwrap();
    assert_eq!(out.runs.len(), 2);
    for run in &out.runs {
        assert!(run.converged, "{}", run.algorithm);
        assert_eq!(*run.rank_x.last().unwrap(), 3, "{}", run.algorithm);
        assert_eq!(run.rank_x.len(), run.iterations);
    }
    let rc = &out.runs[0].factor_rank;
    assert!(rc.windows(2).all(|w| w[1] <= w[0]));
}

#[test]
fn sweep_has_five_rules() {
    let rows = inertial_sweep(30, 2, 1).unwrap();
    assert_eq!(rows.len(), 5);
    assert_eq!(rows[4].rule, "a_k = (k-1)/(k+20)");
    assert!(rows.iter().all(|r| r.converged));
}

#[test]
fn json_exports_report_errors() {
    let v: serde_json::Value = serde_json::from_str(&compare_svt_json(0, 1.0, 10, 1)).unwrap();
    assert!(v["error"].as_str().unwrap().contains("size"));
    let v: serde_json::Value = serde_json::from_str(&compare_svt_json(10, -1.0, 10, 1)).unwrap();
    assert!(v["error"].is_string());
    let v: serde_json::Value = serde_json::from_str(&inertial_sweep_json(20, 2, 4)).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 5);
}
