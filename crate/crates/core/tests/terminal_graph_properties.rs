use std::collections::BTreeSet;

use ist_core::oracle::{kruskal, CostMatrix};
use ist_core::{Config, ProbabilityTable, TerminalGraph, TerminalPair};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn pairs(n: usize) -> Vec<TerminalPair> {
    (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| TerminalPair::new(a, b)))
        .collect()
}

fn random_points(n: usize, rng: &mut ChaCha8Rng) -> Vec<Config> {
    (0..n)
        .map(|_| Config::new(vec![rng.random(), rng.random()]).unwrap())
        .collect()
}

// Costs of active and tree pairs only, as the oracle sees them.
fn visible_costs(tg: &TerminalGraph) -> CostMatrix {
    let n = tg.num_terminals();
    let mut m = CostMatrix::new(n);
    for p in tg.active().union(tg.tree()) {
        m.set(p.a, p.b, tg.cost(*p));
    }
    m
}

fn lower_some(tg: &mut TerminalGraph, rng: &mut ChaCha8Rng, fraction: f64) {
    for p in pairs(tg.num_terminals()) {
        if rng.random::<f64>() < fraction {
            let h = tg.lower_bound(p);
            let c = tg.cost(p);
            let target = if c.is_finite() {
                h + (c - h) * rng.random::<f64>()
            } else {
                h * (1.0 + rng.random::<f64>())
            };
            tg.offer_cost(p, target, None);
        }
    }
}

// Unique simple path in a tree, found by enumerating every simple path
// out of `from`.
fn brute_force_path(
    n: usize,
    tree: &BTreeSet<TerminalPair>,
    from: usize,
    to: usize,
) -> BTreeSet<TerminalPair> {
    fn walk(
        n: usize,
        tree: &BTreeSet<TerminalPair>,
        u: usize,
        to: usize,
        seen: &mut Vec<bool>,
        stack: &mut Vec<TerminalPair>,
        found: &mut Vec<BTreeSet<TerminalPair>>,
    ) {
        if u == to {
            found.push(stack.iter().copied().collect());
            return;
        }
        for v in 0..n {
            if v == u || seen[v] {
                continue;
            }
            let e = TerminalPair::new(u.min(v), u.max(v));
            if tree.contains(&e) {
                seen[v] = true;
                stack.push(e);
                walk(n, tree, v, to, seen, stack, found);
                stack.pop();
                seen[v] = false;
            }
        }
    }
    let mut seen = vec![false; n];
    seen[from] = true;
    let mut found = Vec::new();
    walk(n, tree, from, to, &mut seen, &mut Vec::new(), &mut found);
    assert_eq!(found.len(), 1);
    found.pop().unwrap()
}

#[test]
fn tree_paths_match_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..100 {
        let n = 8;
        // random labelled tree: attach each vertex to an earlier one
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut rng);
        let mut tree = BTreeSet::new();
        for i in 1..n {
            let j = order[rng.random_range(0..i)];
            let (a, b) = (order[i].min(j), order[i].max(j));
            tree.insert(TerminalPair::new(a, b));
        }
        let mut tg = TerminalGraph::with_lower_bounds(n, vec![0.0; n * n]);
        for p in &tree {
            tg.set_cost(*p, 1.0);
        }
        tg.install_tree(tree.clone());
        assert!(tg.is_spanning());
        for u in 0..n {
            for v in 0..n {
                if u != v {
                    let got: BTreeSet<_> = tg.tree_path(u, v).unwrap().into_iter().collect();
                    assert_eq!(got, brute_force_path(n, &tree, u, v));
                }
            }
        }
    }
}

#[test]
fn non_tree_edge_lowered_to_tree_path_cost() {
    let mut tg = TerminalGraph::with_lower_bounds(3, vec![0.0; 9]);
    let (ab, bc, ac) = (
        TerminalPair::new(0, 1),
        TerminalPair::new(1, 2),
        TerminalPair::new(0, 2),
    );
    tg.set_cost(ab, 1.0);
    tg.set_cost(bc, 1.0);
    tg.set_cost(ac, 5.0);
    tg.update_tree();
    assert_eq!(tg.tree(), &[ab, bc].into_iter().collect());
    tg.update_tree();
    assert_eq!(tg.cost(ac), 2.0);
    assert_eq!(tg.tree(), &[ab, bc].into_iter().collect());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn update_tree_keeps_minimum_spanning_tree(seed in any::<u64>(), n in 3usize..9) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut tg = TerminalGraph::new(&random_points(n, &mut rng));
        let mut last = f64::INFINITY;
        for _ in 0..8 {
            lower_some(&mut tg, &mut rng, 0.4);
            tg.update_tree();
            let weight = tg.tree_weight();
            match kruskal(&visible_costs(&tg)) {
                Some((_, w)) => {
                    prop_assert!(tg.is_spanning());
                    prop_assert!((weight - w).abs() <= 1e-9, "{} vs {}", weight, w);
                }
                None => prop_assert!(tg.tree().is_empty()),
            }
            prop_assert!(weight <= last);
            last = weight;
            for p in pairs(n) {
                let c = tg.cost(p);
                prop_assert!(!c.is_finite() || c >= tg.lower_bound(p) - 1e-12);
            }
        }
    }

    #[test]
    fn pruned_pairs_never_return(seed in any::<u64>(), n in 3usize..9) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut tg = TerminalGraph::new(&random_points(n, &mut rng));
        for p in pairs(n) {
            let h = tg.lower_bound(p);
            tg.set_cost(p, h * (1.0 + 0.6 * rng.random::<f64>()));
        }
        tg.update_tree();
        let pruned = tg.prune_edges();
        // any later costs between the bound and today's value
        let mut fin = CostMatrix::new(n);
        for p in pairs(n) {
            let h = tg.lower_bound(p);
            fin.set(p.a, p.b, h + (tg.cost(p) - h) * rng.random::<f64>());
        }
        let (mst, _) = kruskal(&fin).unwrap();
        for e in pruned {
            prop_assert!(!mst.contains(&(e.a, e.b)));
            prop_assert!(!tg.active().contains(&e));
        }
    }

    #[test]
    fn probabilities_match_gap_formula(seed in any::<u64>(), n in 3usize..8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut tg = TerminalGraph::new(&random_points(n, &mut rng));
        let mut prob = tg.lower_bound_probability();
        for _ in 0..6 {
            lower_some(&mut tg, &mut rng, 0.5);
            tg.update_tree();
            tg.prune_edges();
            prob = tg.update_probability(&prob);
            if !tg.is_spanning() {
                continue;
            }
            prop_assert!((prob.total() - 1.0).abs() <= 1e-9);
            for e in tg.pruned() {
                prop_assert_eq!(prob.get(*e), 0.0);
            }
            let expected = reference_probability(&tg);
            for p in pairs(n) {
                prop_assert!((prob.get(p) - expected.get(p)).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn scan_order_does_not_change_weight(seed in any::<u64>(), n in 3usize..10) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut base = TerminalGraph::new(&random_points(n, &mut rng));
        for p in pairs(n) {
            let h = base.lower_bound(p);
            base.set_cost(p, h * (1.0 + rng.random::<f64>()));
        }
        base.update_tree();
        lower_some(&mut base, &mut rng, 0.5);
        let mut order = pairs(n);
        let mut weights = Vec::new();
        for _ in 0..10 {
            order.shuffle(&mut rng);
            let mut tg = base.clone();
            tg.update_tree_in_order(&order);
            weights.push(tg.tree_weight());
        }
        for w in &weights {
            prop_assert!((w - weights[0]).abs() <= 1e-9);
        }
    }
}

// Gap-based distribution evaluated directly from the definitions.
fn reference_probability(tg: &TerminalGraph) -> ProbabilityTable {
    let mut mst = Vec::new();
    let mut non_mst = Vec::new();
    for &e in tg.active().union(tg.tree()) {
        if tg.tree().contains(&e) {
            let gap = tg.cost(e) - tg.lower_bound(e);
            if gap > 0.0 {
                mst.push((e, gap));
            }
        } else {
            let heaviest = tg
                .tree_path(e.a, e.b)
                .unwrap()
                .iter()
                .map(|p| tg.cost(*p))
                .fold(f64::NEG_INFINITY, f64::max);
            let gap = tg.cost(e) - heaviest;
            if gap > 0.0 {
                non_mst.push((e, gap));
            }
        }
    }
    let (n1, n2) = (mst.len() as f64, non_mst.len() as f64);
    if n1 + n2 == 0.0 {
        return ProbabilityTable::from_weights(tg.active().iter().map(|&e| (e, 1.0)));
    }
    let s1: f64 = mst.iter().map(|x| x.1).sum();
    let s2: f64 = non_mst.iter().map(|x| x.1).sum();
    ProbabilityTable::from_weights(
        mst.iter()
            .map(|&(e, g)| (e, n1 / (n1 + n2) * g / s1))
            .chain(non_mst.iter().map(|&(e, g)| (e, n2 / (n1 + n2) * g / s2))),
    )
}
