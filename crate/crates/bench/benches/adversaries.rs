use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use hopcut_core::adversary::{run_adversary, AttackTarget};
use hopcut_core::hopset::{build_hopset_instance, hop_profile, HopsetParams};
use hopcut_core::{AdversaryConfig, AdversaryKind, ProposalKind};

fn attack(c: &mut Criterion) {
    let inst = build_hopset_instance(&HopsetParams::new(1 << 12, 1 << 12, 1)).unwrap();
    let target = AttackTarget { graph: &inst.graph, paths: &inst.paths, kind: ProposalKind::Hopset };
    let p = inst.dims.effective_p;
    let mut g = c.benchmark_group("adversary_2^12_budget_p");
    g.sample_size(10);
    for kind in AdversaryKind::ALL {
        g.bench_with_input(BenchmarkId::from_parameter(kind), &kind, |b, &kind| {
            b.iter(|| run_adversary(target, &AdversaryConfig { kind, budget: p, seed: 1 }).unwrap())
        });
    }
    let h = run_adversary(target, &AdversaryConfig { kind: AdversaryKind::Folklore, budget: p, seed: 1 }).unwrap();
    g.bench_function("hop_profile_folklore", |b| b.iter(|| hop_profile(&inst, &h).unwrap()));
    g.finish();
}

criterion_group!(benches, attack);
criterion_main!(benches);
