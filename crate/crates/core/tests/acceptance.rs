//! One test per acceptance criterion. Each prints a PASS/FAIL line with the
//! measured values; run with `--nocapture` to see them.

use std::time::Instant;

use pgroup_core::bounds::{bound_main, f_func, g_func, gen_dependence_example, gen_tightness_example};
use pgroup_core::order::is_sumset_size_formula;
use pgroup_core::sumset::{report, sumset};
use pgroup_core::verify::{
    frontier, kneser_sweep, oracle_is_sumset, oracle_natural_is_sumset, oracle_sumset_naive, sweep,
    Filter, Mode, SweepConfig, SweepSpec, Verdict,
};
use pgroup_core::{Group, GroupSubset, Rational};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn verdict_line(v: &Verdict) -> String {
    match v {
        Verdict::Pass { checked } => format!("pass ({checked} checked)"),
        Verdict::Counterexample(c) => format!(
            "counterexample #{}: {}{}",
            c.index,
            c.set.as_ref().map(|s| format!("{s:?} ")).unwrap_or_default(),
            c.details
        ),
    }
}

fn finish(id: u32, name: &str, start: Instant, ok: bool, notes: &[String]) {
    for n in notes {
        println!("  criterion {id}: {n}");
    }
    println!(
        "criterion {id} [{name}]: {} in {:.2?}",
        if ok { "PASS" } else { "FAIL" },
        start.elapsed()
    );
    assert!(ok, "criterion {id} failed");
}

fn run(property: &str, group: &str, mode: Mode, filter: Option<Filter>, config: &SweepConfig) -> Verdict {
    let spec = SweepSpec {
        group: group.parse().unwrap(),
        mode,
        filter,
        property: property.into(),
    };
    sweep(&spec, config).unwrap()
}

#[test]
fn criterion_01_initial_segment_sumset_formula() {
    let start = Instant::now();
    let mut notes = Vec::new();
    let mut ok = true;
    for q in [4u64, 8, 16, 9, 27, 25] {
        let group = pgroup_core::GroupSpec::homogeneous(q, 1).unwrap().to_string();
        let v = run("is-sumset-formula", &group, Mode::Exhaustive, None, &SweepConfig::default());
        let mut oracle_ok = true;
        for c in 1..q {
            for d in 1..q {
                oracle_ok &= oracle_is_sumset(c, d, q) == is_sumset_size_formula(c, d, q).unwrap();
            }
        }
        ok &= v.passed() && oracle_ok;
        notes.push(format!("q={q}: kernel {}, brute force agrees: {oracle_ok}", verdict_line(&v)));
    }
    finish(1, "initial segment sumset formula", start, ok, &notes);
}

#[test]
fn criterion_02_kneser_bound() {
    let start = Instant::now();
    let mut notes = Vec::new();
    let mut ok = true;
    for r in [4u32, 6, 8, 9, 12] {
        let v = kneser_sweep(r, &SweepConfig::default()).unwrap();
        ok &= v.passed();
        notes.push(format!("r={r}: {}", verdict_line(&v)));
    }
    finish(2, "Kneser-type lower bound", start, ok, &notes);
}

#[test]
fn criterion_03_sum_order_compression_doubling() {
    let start = Instant::now();
    let mut notes = Vec::new();
    let mut ok = true;
    for g in ["3^2", "3^1 x 3^1", "2^3", "2^1 x 2^2", "2^2 x 2^2"] {
        let v = run("compression-doubling", g, Mode::Exhaustive, Some(Filter::ALL), &SweepConfig::default());
        ok &= v.passed();
        notes.push(format!("{g}: {}", verdict_line(&v)));
    }
    finish(3, "sum-order compression does not increase |A+A|", start, ok, &notes);
}

#[test]
fn criterion_04_pseudo_order_compression_doubling() {
    let start = Instant::now();
    let mut notes = Vec::new();
    let mut ok = true;
    // 3^2 x 3^1 is the group as written, Z/9 first: its last coordinate has
    // modulus 3, so every subset is layer-restricted. 3^1 x 3^2 puts Z/9 last.
    let wide = SweepConfig {
        budget: 1 << 27,
        ..SweepConfig::default()
    };
    for g in ["3^2 x 3^1", "3^1 x 3^2", "3^1 x 3^1"] {
        let v = run("pseudo-compression-doubling", g, Mode::Exhaustive, Some(Filter::LAYER), &wide);
        ok &= v.passed();
        notes.push(format!("{g}, layer-restricted: {}", verdict_line(&v)));
    }
    finish(4, "pseudo-sum compression does not increase |A+A|", start, ok, &notes);
}

#[test]
fn criterion_05_compression_drivers() {
    let start = Instant::now();
    let mut notes = Vec::new();
    let mut ok = true;
    let sampled = Mode::Sampled {
        count: 100_000,
        seed: 2024,
    };
    let config = SweepConfig::default();
    for (property, group, mode) in [
        ("ee-driver", "3^1 x 3^2", sampled),
        ("pseudo-driver", "3^1 x 3^2", sampled),
        ("pseudo-layers", "3^1 x 3^2", sampled),
        ("ee-driver", "3^1 x 3^1 x 3^1", Mode::Exhaustive),
        ("pseudo-driver", "3^1 x 3^1 x 3^1", Mode::Exhaustive),
        ("pseudo-layers", "3^1 x 3^1 x 3^1", Mode::Exhaustive),
    ] {
        let v = run(property, group, mode, Some(Filter::BASIS), &config);
        ok &= v.passed();
        notes.push(format!("{property} on {group} ({mode}): {}", verdict_line(&v)));
    }
    finish(5, "compression drivers and structural predicates", start, ok, &notes);
}

#[test]
fn criterion_06_tightness_construction() {
    let start = Instant::now();
    let mut notes = Vec::new();
    let mut ok = true;
    for r in [3u64, 4, 5] {
        for dim in 1..=8u32 {
            if r.pow(dim) > 1 << 20 {
                continue;
            }
            let k = Rational::new(dim as u64 + 2, 2);
            let (g, a) = gen_tightness_example(r, &k).unwrap();
            let rep = report(&g, &a).unwrap();
            let want = Rational::new(r.pow(dim), dim as u64 + 1);
            let good = rep.doubling == k && rep.spanning == want;
            ok &= good;
            if !good || dim == 1 {
                notes.push(format!(
                    "r={r} 2K-2={dim}: doubling {} (want {k}), spanning {} (want {want})",
                    rep.doubling, rep.spanning
                ));
            }
        }
    }
    finish(6, "tightness construction", start, ok, &notes);
}

#[test]
fn criterion_07_dependence_construction() {
    let start = Instant::now();
    let mut notes = Vec::new();
    let mut ok = true;
    for (m, alpha) in [(1u32, 2usize), (2, 2), (1, 4)] {
        let (g, a) = gen_dependence_example(m, alpha).unwrap();
        let rep = report(&g, &a).unwrap();
        let k_claim = Rational::new(alpha as u64 + 2, 2);
        let s_claim = Rational::new(3u64.pow(m * alpha as u32 + 1), 3 + alpha as u64);
        let q = 3u64.pow(m);
        let bound = bound_main(q, &rep.doubling).unwrap();
        let exceeds = !bound.admits(&rep.spanning).unwrap();
        let at_claim = !bound_main(q, &k_claim).unwrap().admits(&s_claim).unwrap();
        let good = rep.doubling == k_claim && rep.spanning == s_claim && exceeds;
        ok &= good;
        notes.push(format!(
            "m={m} alpha={alpha}: |A+A|={} doubling {} (claimed {k_claim}), spanning {} (claimed {s_claim}), \
             main bound at the measured doubling {:.4}, strictly exceeded: {exceeds} \
             (at the claimed doubling: {at_claim})",
            rep.sumset_size,
            rep.doubling,
            rep.spanning,
            bound.approx()
        ));
    }
    finish(7, "dependence construction beats the main bound", start, ok, &notes);
}

#[test]
fn criterion_08_torsion_two_instance() {
    let start = Instant::now();
    let mut notes = Vec::new();
    let mut ok = true;
    let groups = ["2^1", "2^1 x 2^1", "2^1 x 2^1 x 2^1", "2^1 x 2^1 x 2^1 x 2^1"];
    for g in groups {
        let v = run("torsion-two-bound", g, Mode::Exhaustive, None, &SweepConfig::default());
        ok &= v.passed();
        notes.push(format!("{g}: {}", verdict_line(&v)));
    }
    let g: Group = groups[3].parse().unwrap();
    let f = frontier(&g, Filter::ZERO, &SweepConfig::default()).unwrap();
    let tight: Vec<String> = f
        .iter()
        .filter(|e| e.max_spanning == f_func(&e.doubling).unwrap())
        .map(|e| format!("{}->{}", e.doubling, e.max_spanning))
        .collect();
    notes.push(format!("(Z/2)^4 frontier points with equality: {}", tight.join(" ")));
    for t in 1..=4u64 {
        let k = g_func(t).unwrap();
        let hit = f.iter().any(|e| e.doubling == k && e.max_spanning == f_func(&k).unwrap());
        ok &= hit;
        notes.push(format!("equality at K=G({t})={k}: {hit}"));
    }
    finish(8, "torsion-2 extremal function", start, ok, &notes);
}

#[test]
fn criterion_09_all_k_bound_p5() {
    let start = Instant::now();
    let mut notes = Vec::new();
    let mut ok = true;
    for g in ["5^1", "5^2"] {
        let v = run("all-k-bound", g, Mode::Exhaustive, None, &SweepConfig::default());
        ok &= v.passed();
        notes.push(format!("{g}: {}", verdict_line(&v)));
    }
    finish(9, "all-K bound for p >= 5", start, ok, &notes);
}

#[test]
fn criterion_10_kernel_matches_oracle() {
    let start = Instant::now();
    let mut notes = Vec::new();
    let mut ok = true;
    for spec in ["3^2", "3^1 x 3^1", "2^3", "2^1 x 2^2", "2^2 x 2^2"] {
        let g: Group = spec.parse().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let full = (1u64 << g.order()) - 1;
        let mut agree = 0;
        for _ in 0..1000 {
            let a = GroupSubset::from_mask(&g, rng.gen::<u64>() & full);
            let b = GroupSubset::from_mask(&g, rng.gen::<u64>() & full);
            if sumset(&g, &a, &b).unwrap() == oracle_sumset_naive(&g, &a, &b) {
                agree += 1;
            }
        }
        ok &= agree == 1000;
        notes.push(format!("{spec}: {agree}/1000 pairs agree"));
    }
    finish(10, "sumset kernel equals brute force", start, ok, &notes);
}

#[test]
fn criterion_11_pseudo_order_breaks_formula() {
    let start = Instant::now();
    let v = run("pseudo-is-sumset-formula", "3^2", Mode::Exhaustive, None, &SweepConfig::default());
    let witness = (1..9u64)
        .flat_map(|c| (1..9u64).map(move |d| (c, d)))
        .find(|&(c, d)| oracle_natural_is_sumset(c, d, 9) != is_sumset_size_formula(c, d, 9).unwrap());
    let ok = !v.passed() && witness.is_some();
    let notes = vec![
        format!("sweep: {}", verdict_line(&v)),
        format!("brute-force witness (c, d, q=9): {witness:?}"),
    ];
    finish(11, "pseudo-sum initial segments violate the formula", start, ok, &notes);
}
