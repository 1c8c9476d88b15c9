//! Signed-rank test against values produced by a reference implementation
//! (see data/gen_wilcoxon_reference.py).

use serde::Deserialize;
use sli_core::evaluation::{bonferroni, wilcoxon_signed_rank, Alternative, ComparisonRecord};

#[derive(Deserialize)]
struct Case {
    name: String,
    x: Vec<f64>,
    y: Vec<f64>,
    alternative: String,
    statistic: f64,
    p: f64,
}

#[derive(Deserialize)]
struct Reference {
    cases: Vec<Case>,
}

fn cases() -> Vec<Case> {
    let r: Reference = serde_json::from_str(include_str!("data/wilcoxon_reference.json")).unwrap();
    r.cases
}

#[test]
fn agrees_with_reference() {
    let cases = cases();
    assert_eq!(cases.len(), 20);
    let mut sizes: Vec<usize> = Vec::new();
    for c in &cases {
        let alt = match c.alternative.as_str() {
            "two-sided" => Alternative::TwoSided,
            "less" => Alternative::Less,
            "greater" => Alternative::Greater,
            other => panic!("unknown alternative {other}"),
        };
        let r = wilcoxon_signed_rank(&c.x, &c.y, alt).unwrap();
        // the reference reports W+ for one-sided tests, min(W+, W-) otherwise
        let stat = if alt == Alternative::TwoSided { r.statistic } else { r.w_plus };
        assert_eq!(stat, c.statistic, "{}", c.name);
        assert!((r.p_value - c.p).abs() <= 1e-6, "{}: p {} vs {}", c.name, r.p_value, c.p);
        sizes.push(c.x.len());
    }
    sizes.sort_unstable();
    sizes.dedup();
    assert_eq!(sizes, vec![8, 30, 5100]);
}

#[test]
fn bonferroni_levels() {
    assert_eq!(format!("{:.5}", bonferroni(0.05, 7)), "0.00714");
    assert!((bonferroni(0.05, 7) - 0.05 / 7.0).abs() < 1e-15);
    assert_eq!(bonferroni(0.05, 5), 0.01);
    assert_eq!(bonferroni(0.05, 2), 0.025);
}

#[test]
fn record_uses_corrected_level() {
    let x = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8];
    let y = [0.2, 0.4, 0.5, 0.7, 0.9, 1.0, 1.2, 1.4];
    let r = wilcoxon_signed_rank(&x, &y, Alternative::Less).unwrap();
    // all differences negative: P(W+ = 0) = 2^-8
    assert_eq!(r.p_value, 1.0 / 256.0);
    assert!(ComparisonRecord::new("x < y", "reward", &r, 0.05, 2).significant);
    assert!(ComparisonRecord::new("x < y", "reward", &r, 0.05, 7).significant);
    assert!(!ComparisonRecord::new("x < y", "reward", &r, 0.05, 13).significant);
}
