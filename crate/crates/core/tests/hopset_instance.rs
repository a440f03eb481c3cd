use hopcut_core::adversary::{run_adversary, AttackTarget};
use hopcut_core::hopset::{
    build_hopset_instance, extend_small_p, hop_profile, overlap_report, pair_bounds_report, potential,
    potential_by_chords, resolve, single_edge_damages, verify_unique_shortest, HopsetParams,
};
use hopcut_core::{AdversaryConfig, AdversaryKind, ProposalKind};

#[test]
fn frozen_dimensions() {
    for (n, l, x, q, d, paths) in [(1u64 << 12, 16, 4, 3, 10, 1280), (1 << 14, 32, 4, 6, 19, 4864)] {
        let dims = resolve(&HopsetParams::new(n, n, 0)).unwrap();
        assert_eq!(
            (dims.layers, dims.edge_span, dims.q, dims.directions, dims.path_count),
            (l, x, q, d, paths),
            "n = {n}"
        );
        assert_eq!(dims.effective_p, paths / 2);
    }
}

#[test]
fn small_instance_is_sound() {
    let inst = build_hopset_instance(&HopsetParams::new(1 << 12, 1 << 12, 5)).unwrap();
    assert_eq!(inst.paths.len(), 1280);
    assert!(inst.paths.iter().all(|p| p.nodes.len() == 16));
    let unique = verify_unique_shortest(&inst).unwrap();
    assert!(unique.pass, "{:?}", &unique.failures[..unique.failures.len().min(3)]);
    let overlap = overlap_report(&inst, None, 0);
    assert!(overlap.exhaustive);
    assert_eq!(overlap.pairs_checked, 1280 * 1279 / 2);
    assert!(overlap.pass, "{:?}", overlap.examples);
    assert!(pair_bounds_report(&inst).pass);
}

#[test]
fn potential_routes_agree() {
    // the chord DP must agree with Dijkstra over G ∪ H
    let inst = build_hopset_instance(&HopsetParams::new(1 << 10, 1 << 10, 3)).unwrap();
    let target = AttackTarget { graph: &inst.graph, paths: &inst.paths, kind: ProposalKind::Hopset };
    let p = inst.dims.effective_p;
    for kind in [AdversaryKind::Folklore, AdversaryKind::Random, AdversaryKind::Greedy, AdversaryKind::DirectPairs] {
        for budget in [p / 4, p] {
            let h = run_adversary(target, &AdversaryConfig { kind, budget, seed: 11 }).unwrap();
            assert!(h.len() as u64 <= budget);
            assert_eq!(potential(&inst, &h).unwrap(), potential_by_chords(&inst, &h), "{kind} at {budget}");
            let prof = hop_profile(&inst, &h).unwrap();
            assert!(prof.max as f64 >= inst.hopset_floor(), "{kind} at {budget}: {prof:?}");
        }
    }
}

#[test]
fn greedy_dominates_folklore() {
    let inst = build_hopset_instance(&HopsetParams::new(1 << 10, 1 << 10, 4)).unwrap();
    let target = AttackTarget { graph: &inst.graph, paths: &inst.paths, kind: ProposalKind::Hopset };
    for budget in [8, 32, inst.dims.effective_p] {
        let phi = |kind| {
            let h = run_adversary(target, &AdversaryConfig { kind, budget, seed: 2 }).unwrap();
            potential_by_chords(&inst, &h)
        };
        assert!(phi(AdversaryKind::Greedy) <= phi(AdversaryKind::Folklore), "budget {budget}");
    }
}

#[test]
fn single_edge_damage_is_at_most_ell() {
    let inst = build_hopset_instance(&HopsetParams::new(128, 128, 1)).unwrap();
    let ell = inst.path_len() as u64;
    let damages = single_edge_damages(&inst);
    assert!(!damages.is_empty());
    for (x, y, damage, _, _) in damages {
        assert!(damage <= ell, "{x} -> {y} damages {damage}");
    }
}

#[test]
fn expanded_instance_keeps_unique_paths() {
    let base = build_hopset_instance(&HopsetParams::new(256, 256, 2)).unwrap();
    let big = extend_small_p(&base, 1024).unwrap();
    assert_eq!(big.graph.node_count(), 1024);
    assert_eq!(big.path_len(), base.path_len() * 4);
    assert!(verify_unique_shortest(&big).unwrap().pass);
    assert!(overlap_report(&big, None, 0).pass);
    assert!(pair_bounds_report(&big).pass);
}

#[test]
fn undirected_image_keeps_unique_paths() {
    let inst = build_hopset_instance(&HopsetParams::new(1 << 10, 1 << 10, 6)).unwrap();
    let und = inst.undirected().unwrap();
    assert!(verify_unique_shortest(&und).unwrap().pass);
}
