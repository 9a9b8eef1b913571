use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use paramcsp::campaign::{run_campaign_scheduled, CampaignConfig, Schedule};

// Same trials, same report, two schedules. Without the `parallel` feature
// both rows run sequentially.
fn schedules(c: &mut Criterion) {
    let mut group = c.benchmark_group("campaign");
    group.sample_size(10);
    for (rule, trials) in [("w3hard", 64), ("solvers", 128), ("td-machine", 16)] {
        let cfg = CampaignConfig::new(rule, trials, 7).unwrap();
        for (name, schedule) in [("sequential", Schedule::Sequential), ("parallel", Schedule::Parallel)] {
            group.bench_with_input(BenchmarkId::new(name, rule), &cfg, |b, cfg| {
                b.iter(|| {
                    let rep = run_campaign_scheduled(cfg, schedule).unwrap();
                    assert!(rep.ok());
                    rep.passed
                })
            });
        }
    }
    group.finish();
}

criterion_group!(benches, schedules);
criterion_main!(benches);
