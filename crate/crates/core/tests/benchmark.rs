mod support;

use proptest::prelude::*;
use scene_director::benchmark::{
    markdown_report, mean_sd, records_csv, reference_table, run_benchmark, summarize,
    BenchmarkRecord, ScenarioClass, ScenarioLabel, ValiditySummary, CSV_HEADER,
};
use scene_director::gateway::{Gateway, ProviderConfig, ProviderKind};
use support::oracles::sample_sd;

fn record(
    provider: ProviderKind,
    scenario: ScenarioLabel,
    trial: usize,
    latency: f64,
    retained: bool,
) -> BenchmarkRecord {
    BenchmarkRecord {
        provider,
        scenario,
        trial,
        latency,
        retained,
        validity: ValiditySummary {
            parse_ok: retained,
            is_structurally_valid: retained,
            errors: usize::from(!retained),
            warnings: 0,
            failure: None,
        },
    }
}

fn latencies() -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(0.001f64..60.0, 2..30)
}

proptest! {
    #[test]
    fn sd_matches_two_pass_oracle(xs in latencies()) {
        let (mean, sd) = mean_sd(&xs);
        let oracle_mean = xs.iter().sum::<f64>() / xs.len() as f64;
        prop_assert!((mean - oracle_mean).abs() <= 1e-9 * oracle_mean.max(1.0));
        prop_assert!((sd - sample_sd(&xs)).abs() <= 1e-9 * sd.max(1.0));
    }

    #[test]
    fn constant_latency_is_exact(x in 0.001f64..60.0, n in 1usize..40) {
        prop_assert_eq!(mean_sd(&vec![x; n]), (x, 0.0));
    }

    #[test]
    fn summary_ignores_record_order(xs in latencies(), seed in any::<u64>()) {
        let records: Vec<_> = xs
            .iter()
            .enumerate()
            .map(|(i, x)| record(ProviderKind::ALL[i % 2], ScenarioLabel::ALL[i % 5], i, *x, i % 7 != 3))
            .collect();
        let mut shuffled = records.clone();
        let mut s = seed;
        for i in (1..shuffled.len()).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            shuffled.swap(i, (s >> 33) as usize % (i + 1));
        }
        prop_assert_eq!(summarize(&records), summarize(&shuffled));
    }
}

#[test]
fn excluded_trials_do_not_count() {
    let records = vec![
        record(ProviderKind::Claude, ScenarioLabel::O5A2, 0, 1.0, true),
        record(ProviderKind::Claude, ScenarioLabel::O5A2, 1, 100.0, false),
        record(ProviderKind::Claude, ScenarioLabel::O5A2, 2, 3.0, true),
    ];
    let stats = summarize(&records);
    assert_eq!(stats.len(), 1);
    assert_eq!(
        (stats[0].mean, stats[0].trial_count, stats[0].total),
        (2.0, 2, 3)
    );
    assert!((stats[0].sd - 2f64.sqrt()).abs() < 1e-15);
    assert!((stats[0].validity_rate - 2.0 / 3.0).abs() < 1e-15);
}

#[test]
fn mock_run_covers_every_cell() {
    let gateway = Gateway::new().unwrap();
    let providers = [ProviderConfig::mock(0.0, 7)];
    let classes = ScenarioClass::all(3);
    let records = run_benchmark(&gateway, &providers, &classes, 4).unwrap();
    assert_eq!(records.len(), 20);
    assert!(records.iter().all(|r| r.retained && r.validity.errors == 0));
    let stats = summarize(&records);
    assert_eq!(stats.len(), 5);
    assert!(stats
        .iter()
        .all(|s| s.validity_rate == 1.0 && s.trial_count == 4));

    let csv = records_csv(&records);
    assert_eq!(csv.lines().next(), Some(CSV_HEADER));
    assert_eq!(csv.lines().count(), 21);
}

#[test]
fn zero_trials_rejected() {
    let gateway = Gateway::new().unwrap();
    assert!(run_benchmark(
        &gateway,
        &[ProviderConfig::mock(0.0, 0)],
        &ScenarioClass::all(0),
        0
    )
    .is_err());
    assert!(run_benchmark(&gateway, &[], &ScenarioClass::all(0), 1).is_err());
}

#[test]
fn reference_values_present() {
    let cells = reference_table();
    assert_eq!(cells.len(), 20);
    let first = &cells[0];
    assert_eq!((first.mean, first.sd), (0.79, 0.13));
}

#[test]
fn report_has_one_row_per_class() {
    let records: Vec<_> = ScenarioLabel::ALL
        .iter()
        .flat_map(|s| {
            (0..3).map(move |t| record(ProviderKind::Gemini, *s, t, 1.5 + t as f64, true))
        })
        .collect();
    let md = markdown_report(&summarize(&records));
    for label in ScenarioLabel::ALL {
        assert_eq!(md.matches(&format!("| **{label}** |")).count(), 1, "{md}");
    }
    assert!(md.contains("| 2.50 | 1.00 |"), "{md}");
}
