use std::cmp::Ordering;

use pgroup_core::bounds::{
    bound_all_k, bound_freiman_ruzsa, bound_green_ruzsa, bound_main, compare_bounds, f_func,
    gen_dependence_example, gen_tightness_example,
};
use pgroup_core::compression::{
    check_lemma_pseudo_layers, check_lemma_struc_with, direction_compressor, distinct_directions,
    is_ee_compressed, layer_decomposition, PseudoLayerViolation, StrucReading,
};
use pgroup_core::span::affine_span;
use pgroup_core::sumset::report;
use pgroup_core::verify::{frontier, sweep, Filter, Mode, SweepConfig, SweepSpec, Verdict};
use pgroup_core::{Group, GroupSubset, OrderKind, Rational};

/// Order key built from coordinates alone: last coordinate most significant,
/// each coordinate compared by its reversed base-p digits (or by value for
/// the last coordinate under the pseudo-sum order).
fn naive_key(g: &Group, x: usize, kind: OrderKind) -> Vec<u64> {
    let p = g.prime();
    let coords = g.decode(x).unwrap().coords().to_vec();
    let n = coords.len();
    let mut key = Vec::new();
    for i in (0..n).rev() {
        let m = g.exponents()[i];
        if kind == OrderKind::PseudoSumOrder && i == n - 1 {
            key.push(coords[i]);
        } else {
            let mut c = coords[i];
            let mut digits = Vec::new();
            for _ in 0..m {
                digits.push(c % p);
                c /= p;
            }
            // units digit most significant
            let mut r = 0;
            for d in digits {
                r = r * p + d;
            }
            key.push(r);
        }
    }
    key
}

/// Compression along `⟨v⟩` computed by walking each coset explicitly.
fn naive_compress(g: &Group, a: &GroupSubset, v: usize, kind: OrderKind) -> GroupSubset {
    let mut seen = vec![false; g.order()];
    let mut out = GroupSubset::empty(g);
    for start in 0..g.order() {
        if seen[start] {
            continue;
        }
        let mut coset = vec![start];
        let mut y = g.add_index(start, v);
        while y != start {
            coset.push(y);
            y = g.add_index(y, v);
        }
        for &c in &coset {
            seen[c] = true;
        }
        let count = coset.iter().filter(|&&c| a.contains(c)).count();
        coset.sort_by_key(|&c| naive_key(g, c, kind));
        for &c in &coset[..count] {
            out.insert(c);
        }
    }
    out
}

fn all_subsets(g: &Group) -> impl Iterator<Item = GroupSubset> + '_ {
    (0..1u64 << g.order()).map(move |m| GroupSubset::from_mask(g, m))
}

#[test]
fn compressor_matches_coset_walk() {
    for spec in ["3^2", "3^1 x 3^1", "2^3", "2^1 x 2^2", "2^2 x 2^1"] {
        let g: Group = spec.parse().unwrap();
        for kind in OrderKind::ALL {
            for v in 1..g.order() {
                let comp = direction_compressor(&g, v, kind).unwrap();
                for a in all_subsets(&g) {
                    assert_eq!(comp.apply(&a), naive_compress(&g, &a, v, kind), "{spec} v={v} {kind:?} {a:?}");
                }
            }
        }
    }
}

#[test]
fn sum_order_compression_can_grow_the_sumset() {
    let g: Group = "3^2".parse().unwrap();
    let a = GroupSubset::from_indices(&g, [1, 2, 3, 4]).unwrap();
    let c = naive_compress(&g, &a, 3, OrderKind::SumOrder);
    assert_eq!(c, GroupSubset::from_indices(&g, [0, 1, 2, 4]).unwrap());
    assert_eq!(report(&g, &a).unwrap().sumset_size, 7);
    assert_eq!(report(&g, &c).unwrap().sumset_size, 8);
}

#[test]
fn layer_collapse_fails_on_a_non_coset_with_stabiliser() {
    let g: Group = "3^1 x 3^1 x 3^1".parse().unwrap();
    let a = GroupSubset::from_indices(&g, [0, 1, 2, 3, 4, 5, 9, 10]).unwrap();
    let en = g.basis_index(2);
    let layers = layer_decomposition(&g, &a).unwrap().layers;
    for v in layers[0].iter() {
        let dir = g.sub_index(en, v);
        assert_eq!(naive_compress(&g, &a, dir, OrderKind::PseudoSumOrder), a);
    }
    assert_ne!(affine_span(&g, &layers[0]).unwrap().len(), layers[0].len());
    assert_eq!(layers[1].len(), 2);
    assert_eq!(
        check_lemma_pseudo_layers(&g, &a).unwrap(),
        Some(PseudoLayerViolation::HigherLayersTooLarge { sizes: vec![6, 2, 0] })
    );
}

#[test]
fn structure_needs_the_same_block() {
    let g: Group = "3^1 x 3^2".parse().unwrap();
    let a = GroupSubset::from_indices(&g, [0, 1, 3, 6]).unwrap();
    assert!(is_ee_compressed(&g, &a).unwrap());
    assert_eq!(check_lemma_struc_with(&g, &a, StrucReading::SameBlock).unwrap(), None);
    assert!(check_lemma_struc_with(&g, &a, StrucReading::Unbounded).unwrap().is_some());
}

#[test]
fn dependence_example_true_sizes() {
    for (m, alpha) in [(1u32, 2usize), (2, 2), (1, 4), (1, 6)] {
        let (g, a) = gen_dependence_example(m, alpha).unwrap();
        let rep = report(&g, &a).unwrap();
        let al = alpha as u64;
        assert_eq!(rep.sumset_size as u64, 3 + 4 * al + al * (al - 1) / 2);
        assert_eq!(rep.span_size, g.order());
        assert_eq!(rep.spanning, Rational::new(3u64.pow(m * alpha as u32 + 1), 3 + al));
    }
    let (_, a) = gen_dependence_example(1, 2).unwrap();
    assert_eq!(a.len(), 5);
}

#[test]
fn tightness_examples() {
    let (g, a) = gen_tightness_example(3, &Rational::new(5, 2)).unwrap();
    assert_eq!(g.to_string(), "3^1 x 3^1 x 3^1");
    let rep = report(&g, &a).unwrap();
    assert_eq!((rep.set_size, rep.sumset_size), (4, 10));
    assert_eq!(rep.spanning, Rational::new(27, 4));
    let (g, a) = gen_tightness_example(5, &Rational::from_integer(3)).unwrap();
    let rep = report(&g, &a).unwrap();
    assert_eq!(rep.doubling, Rational::from_integer(3));
    assert_eq!(rep.spanning, Rational::from_integer(125));
}

#[test]
fn main_bound_fails_below_its_threshold() {
    let g: Group = "3^1 x 3^1".parse().unwrap();
    let a = GroupSubset::from_indices(&g, [0, 1, 2, 3]).unwrap();
    let rep = report(&g, &a).unwrap();
    assert_eq!(rep.doubling, Rational::new(7, 4));
    assert_eq!(rep.spanning, Rational::new(9, 4));
    assert!(!bound_main(3, &rep.doubling).unwrap().admits(&rep.spanning).unwrap());
}

#[test]
fn bound_ordering_on_a_grid() {
    let grid: Vec<Rational> = [(2, 1), (5, 2), (3, 1), (7, 2), (4, 1), (6, 1), (13, 2), (7, 1)]
        .iter()
        .map(|&(a, b)| Rational::new(a, b))
        .collect();
    for (q, p) in [(5u64, 5u64), (25, 5), (7, 7), (3, 3), (9, 3)] {
        for k in &grid {
            if p == 3 && *k < Rational::from_integer(6) {
                continue;
            }
            let main = bound_main(q, k).unwrap();
            let all = bound_all_k(q, p, k).unwrap();
            let green = bound_green_ruzsa(q, k).unwrap();
            let freiman = bound_freiman_ruzsa(q, k).unwrap();
            assert_eq!(compare_bounds(&main, &all).unwrap(), Ordering::Less, "q={q} K={k}");
            assert_ne!(compare_bounds(&all, &green).unwrap(), Ordering::Greater, "q={q} K={k}");
            assert_ne!(compare_bounds(&green, &freiman).unwrap(), Ordering::Greater, "q={q} K={k}");
        }
    }
    // the p = 3 all-K bound sits above Green-Ruzsa for small K
    let k = Rational::from_integer(2);
    assert_eq!(
        compare_bounds(&bound_all_k(3, 3, &k).unwrap(), &bound_green_ruzsa(3, &k).unwrap()).unwrap(),
        Ordering::Greater
    );
}

#[test]
fn torsion_two_frontier_is_dominated() {
    let g: Group = "2^1 x 2^1 x 2^1 x 2^1".parse().unwrap();
    let f = frontier(&g, Filter::ZERO, &SweepConfig::default()).unwrap();
    for e in &f {
        assert!(e.max_spanning <= f_func(&e.doubling).unwrap());
        let rep = report(&g, &e.witness).unwrap();
        assert_eq!((rep.doubling, rep.spanning), (e.doubling, e.max_spanning));
        if e.doubling == Rational::from_integer(1) {
            assert_eq!(e.max_spanning, Rational::from_integer(1));
        }
    }
}

#[test]
fn frontier_witnesses_re_evaluate() {
    let g: Group = "2^1 x 2^3".parse().unwrap();
    let f = frontier(&g, Filter::BASIS, &SweepConfig::default()).unwrap();
    assert!(!f.is_empty());
    for e in &f {
        let rep = report(&g, &e.witness).unwrap();
        assert_eq!((rep.doubling, rep.spanning), (e.doubling, e.max_spanning));
    }
}

fn sweep_with(workers: usize, property: &str, group: &str, mode: Mode) -> Verdict {
    let spec = SweepSpec {
        group: group.parse().unwrap(),
        mode,
        filter: None,
        property: property.into(),
    };
    let config = SweepConfig {
        workers: Some(workers),
        ..SweepConfig::default()
    };
    sweep(&spec, &config).unwrap()
}

#[test]
fn sweeps_are_deterministic_across_worker_counts() {
    let cases = [
        ("compression-doubling", "2^2 x 2^2", Mode::Exhaustive),
        ("compression-doubling", "2^2 x 2^2", Mode::Sampled { count: 3000, seed: 5 }),
        ("structure-unbounded", "3^1 x 3^2", Mode::Exhaustive),
        ("downset", "3^1 x 3^1 x 3^1", Mode::Sampled { count: 2000, seed: 1 }),
        ("ee-driver", "3^1 x 3^2", Mode::Sampled { count: 500, seed: 9 }),
    ];
    for (prop, group, mode) in cases {
        let reference = sweep_with(1, prop, group, mode);
        for w in [2, 4] {
            assert_eq!(sweep_with(w, prop, group, mode), reference, "{prop} {group} {mode}");
        }
    }
}

#[test]
fn lemma_sweeps_on_small_groups() {
    let config = SweepConfig::default();
    for (prop, group) in [
        ("downset", "2^1 x 2^3"),
        ("structure", "3^1 x 3^1"),
        ("structure", "2^1 x 2^3"),
        ("pseudo-span", "2^2 x 2^2"),
        ("is-sumset-formula", "3^3"),
        ("kneser-bound", "3^2"),
        ("sumset-oracle", "2^2 x 2^2"),
        ("compression-doubling", "3^1 x 3^1"),
        ("compression-doubling", "2^1 x 2^1 x 2^1 x 2^1"),
    ] {
        let spec = SweepSpec {
            group: group.parse().unwrap(),
            mode: Mode::Exhaustive,
            filter: None,
            property: prop.into(),
        };
        let v = sweep(&spec, &config).unwrap();
        assert!(v.passed(), "{prop} on {group}: {v:?}");
    }
}

#[test]
fn every_direction_class_is_covered() {
    let g: Group = "2^2 x 2^1".parse().unwrap();
    let dirs = distinct_directions(&g);
    for v in 1..g.order() {
        let c = direction_compressor(&g, v, OrderKind::SumOrder).unwrap();
        assert!(dirs.iter().any(|&d| {
            let h = direction_compressor(&g, d, OrderKind::SumOrder).unwrap();
            h.subgroup() == c.subgroup()
        }));
    }
}
