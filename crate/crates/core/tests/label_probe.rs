//! Diagnostic: prints the oracle-label distribution of the default
//! synthetic corpus per metric. Run with
//! `cargo test -p websched --test label_probe -- --ignored --nocapture`
//! when re-tuning cost-model defaults.

use std::collections::BTreeMap;

use websched::corpus::{synth_page, GenProfile};
use websched::device::{evaluate, hmp_baseline, oracle_best, CostModelParams, Metric};
use websched::features::extract_vector;
use websched::learn::{
    default_c_grid, default_gamma_grid, generate_training_data, grid_search, loocv, DEFAULT_TOL,
};
use websched::webparse::{parse_css_str, parse_html_bytes};

#[test]
#[ignore]
fn probe_loocv_accuracy() {
    let profile = GenProfile::default();
    let params = CostModelParams::default();
    let pages: Vec<(String, _)> = (0..400)
        .map(|i| {
            let page = synth_page(7, i, &profile);
            let tree = parse_html_bytes(page.html.as_bytes());
            let styles = parse_css_str(&page.css);
            (
                format!("page_{i:04}"),
                extract_vector(&tree, &styles, page.total_bytes() as f64 / 1024.0),
            )
        })
        .collect();

    for metric in Metric::ALL {
        let start = std::time::Instant::now();
        let data = generate_training_data(&pages, metric, &params).unwrap();
        let (c, gamma) = grid_search(
            &data.examples,
            &data.label_set,
            &data.normalization,
            &default_c_grid(),
            &default_gamma_grid(),
            5,
        )
        .unwrap();
        let outcome = loocv(&pages, metric, &params, c, gamma, DEFAULT_TOL).unwrap();

        let mut pred_log = 0.0;
        let mut oracle_log = 0.0;
        for p in &outcome.predictions {
            let v = &pages.iter().find(|(id, _)| *id == p.page_id).unwrap().1;
            let pred_cost = evaluate(v, &p.predicted, &params).unwrap().metric(metric);
            let oracle_cost = evaluate(v, &p.oracle, &params).unwrap().metric(metric);
            let hmp_cost = evaluate(v, &hmp_baseline(), &params).unwrap().metric(metric);
            pred_log += (pred_cost / hmp_cost).ln();
            oracle_log += (oracle_cost / hmp_cost).ln();
        }
        let n = outcome.predictions.len() as f64;
        let pred_ratio = (pred_log / n).exp();
        let oracle_ratio = (oracle_log / n).exp();
        println!(
            "== {metric}: C={c} gamma={gamma:.5} accuracy={:.4} pred/hmp={pred_ratio:.4} oracle/hmp={oracle_ratio:.4} oracle_fraction={:.4} elapsed={:?}",
            outcome.accuracy,
            oracle_ratio / pred_ratio,
            start.elapsed()
        );

        let vectors: Vec<_> = pages.iter().map(|(_, v)| v.clone()).collect();
        let sweep =
            websched::device::fixed_config_sweep(&vectors, &data.label_set.configs, metric, &params)
                .unwrap();
        for (config, ratio) in sweep {
            let beats = pred_ratio < ratio;
            println!(
                "   fixed {config}: {ratio:.4} {}",
                if beats { "beaten" } else { "NOT BEATEN" }
            );
        }
    }
}

#[test]
#[ignore]
fn print_label_distribution() {
    let profile = GenProfile::default();
    let params = CostModelParams::default();
    let n = 400;

    let vectors: Vec<_> = (0..n)
        .map(|i| {
            let page = synth_page(7, i, &profile);
            let tree = parse_html_bytes(page.html.as_bytes());
            let styles = parse_css_str(&page.css);
            extract_vector(&tree, &styles, page.total_bytes() as f64 / 1024.0)
        })
        .collect();

    for metric in Metric::ALL {
        let mut histogram: BTreeMap<String, usize> = BTreeMap::new();
        let mut ratio_log_sum = 0.0;
        for v in &vectors {
            let (best, cost) = oracle_best(v, metric, &params).unwrap();
            *histogram.entry(best.to_string()).or_insert(0) += 1;
            let base = evaluate(v, &hmp_baseline(), &params).unwrap();
            ratio_log_sum += (cost.metric(metric) / base.metric(metric)).ln();
        }
        let geomean_ratio = (ratio_log_sum / vectors.len() as f64).exp();
        println!("== {metric}: {} labels, oracle/hmp geomean {geomean_ratio:.4}", histogram.len());
        let mut entries: Vec<_> = histogram.into_iter().collect();
        entries.sort_by(|a, b| b.1.cmp(&a.1));
        for (config, count) in entries {
            println!("   {config}: {count}");
        }
    }
}
