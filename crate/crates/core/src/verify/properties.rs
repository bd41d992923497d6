//! Registry of sweepable properties.
//!
//! A per-subset check returns `Ok(None)` when the set satisfies the property
//! (including when the property's hypotheses do not apply to it) and a
//! description of the failure otherwise.

use std::cell::RefCell;
use std::collections::HashMap;

use crate::bounds::{bound_by_name, f_func, BoundName};
use crate::compression::{
    bottom_layer_members, check_lemma_downset, check_lemma_pseudo_layers, check_lemma_struc_with,
    direction_compressor_unchecked, distinct_directions, ee_compress_fixpoint, is_ee_compressed,
    pseudo_compress_all, pseudo_compress_all_traced, StrucReading,
};
use crate::error::{Error, Result};
use crate::group::Group;
use crate::order::{initial_segment, is_sumset_size_formula, OrderKind};
use crate::span::affine_span;
use crate::subset::GroupSubset;
use crate::sumset::{sumset_unchecked, Rational};

use super::{kneser_sweep, oracle_sumset_naive, Counterexample, Filter, SweepConfig, SweepContext, Verdict};

pub type SubsetCheck = fn(&SweepContext, &GroupSubset) -> Result<Option<String>>;

#[derive(Clone, Copy)]
pub enum PropertyKind {
    Subsets {
        check: SubsetCheck,
        default_filter: Filter,
    },
    /// Runs over a family that is not a family of subsets of the group.
    Whole(fn(&Group, &SweepConfig) -> Result<Verdict>),
}

#[derive(Clone, Copy)]
pub struct Property {
    pub id: &'static str,
    pub summary: &'static str,
    pub kind: PropertyKind,
}

const fn subsets(id: &'static str, summary: &'static str, check: SubsetCheck, default_filter: Filter) -> Property {
    Property {
        id,
        summary,
        kind: PropertyKind::Subsets { check, default_filter },
    }
}

static PROPERTIES: &[Property] = &[
    Property {
        id: "is-sumset-formula",
        summary: "|IS(c)+IS(d)| matches the closed form in a cyclic group (sum order)",
        kind: PropertyKind::Whole(is_formula_sum),
    },
    Property {
        id: "pseudo-is-sumset-formula",
        summary: "same closed form for pseudo-sum initial segments (expected to fail)",
        kind: PropertyKind::Whole(is_formula_pseudo),
    },
    Property {
        id: "kneser-bound",
        summary: "|R+S| >= min over divisors d of (ceil(|R|/d)+ceil(|S|/d)-1)d in Z/qZ",
        kind: PropertyKind::Whole(kneser_whole),
    },
    subsets(
        "compression-doubling",
        "|C_v(A)+C_v(A)| <= |A+A| for every direction v (sum order)",
        compression_doubling,
        Filter::ALL,
    ),
    subsets(
        "compression-containment",
        "C_v(A)+C_v(A) is contained in C_v(A+A) (sum order)",
        compression_containment,
        Filter::ALL,
    ),
    subsets(
        "pseudo-compression-doubling",
        "|C_v(A)+C_v(A)| <= |A+A| under the pseudo-sum order for layer-restricted A",
        pseudo_compression_doubling,
        Filter::LAYER,
    ),
    subsets(
        "pseudo-span",
        "C_{e_n-v} (pseudo-sum) keeps the affine span for v in the bottom layer",
        pseudo_span,
        Filter::BASIS,
    ),
    subsets(
        "downset",
        "<<E>>-compressed sets are (t e_i - v)-compressed",
        downset,
        Filter::BASIS,
    ),
    subsets(
        "structure",
        "block structure of <<E>>-compressed sets above the basis prefix",
        structure,
        Filter::BASIS,
    ),
    subsets(
        "structure-unbounded",
        "block structure with the rank i allowed to leave its block",
        structure_unbounded,
        Filter::BASIS,
    ),
    subsets(
        "pseudo-layers",
        "layers of C(A), A cut to last coordinates below p, are nested and collapse off cosets",
        pseudo_layers,
        Filter::BASIS,
    ),
    subsets(
        "ee-driver",
        "<<E>>-compression fixpoint keeps size, basis and span, and lowers |A+A|",
        ee_driver,
        Filter::BASIS,
    ),
    subsets(
        "pseudo-driver",
        "pseudo-sum fixpoint on A cut to last coordinates below p keeps size and span, lowers |A+A|",
        pseudo_driver,
        Filter::BASIS,
    ),
    subsets(
        "torsion-two-bound",
        "spanning <= F(doubling) in torsion-2 groups",
        torsion_two_bound,
        Filter::ZERO,
    ),
    subsets(
        "all-k-bound",
        "spanning <= q^{2K}/K (p >= 5) or q^{10K}/K (p = 3)",
        all_k_bound,
        Filter::ZERO,
    ),
    subsets(
        "main-bound",
        "spanning <= q^{2K-2}/(2K-1) whenever K > k0",
        main_bound,
        Filter::ZERO,
    ),
    subsets(
        "sumset-oracle",
        "sumset kernel agrees with coordinatewise pair addition",
        sumset_oracle,
        Filter::ALL,
    ),
];

pub fn properties() -> &'static [Property] {
    PROPERTIES
}

pub fn find_property(id: &str) -> Result<&'static Property> {
    PROPERTIES
        .iter()
        .find(|p| p.id == id)
        .ok_or_else(|| Error::UnknownProperty(id.to_string()))
}

fn require_cyclic(group: &Group) -> Result<u64> {
    if group.rank() != 1 {
        return Err(Error::OutOfRange(format!("{group} is not cyclic")));
    }
    Ok(group.moduli()[0])
}

fn is_formula(group: &Group, config: &SweepConfig, kind: OrderKind) -> Result<Verdict> {
    let q = require_cyclic(group)?;
    let needed = (q as u128) * (q as u128);
    if needed > config.budget as u128 {
        return Err(Error::BudgetExceeded {
            needed,
            budget: config.budget,
        });
    }
    let segments: Vec<GroupSubset> = (0..q as usize)
        .map(|t| initial_segment(group, t, kind))
        .collect::<Result<_>>()?;
    let mut checked = 0;
    for c in 1..q {
        for d in 1..q {
            let got = sumset_unchecked(group, &segments[c as usize], &segments[d as usize]).len() as u64;
            let want = is_sumset_size_formula(c, d, q)?;
            if got != want {
                return Ok(Verdict::Counterexample(Counterexample {
                    index: (c - 1) * (q - 1) + (d - 1),
                    set: None,
                    details: format!("c={c} d={d} q={q}: |IS(c)+IS(d)|={got}, formula {want}"),
                }));
            }
            checked += 1;
        }
    }
    Ok(Verdict::Pass { checked })
}

fn is_formula_sum(group: &Group, config: &SweepConfig) -> Result<Verdict> {
    is_formula(group, config, OrderKind::SumOrder)
}

fn is_formula_pseudo(group: &Group, config: &SweepConfig) -> Result<Verdict> {
    is_formula(group, config, OrderKind::PseudoSumOrder)
}

fn kneser_whole(group: &Group, config: &SweepConfig) -> Result<Verdict> {
    let q = require_cyclic(group)?;
    kneser_sweep(q as u32, config)
}

fn coords(group: &Group, x: usize) -> String {
    group.format_index(x)
}

fn doubling_under(ctx: &SweepContext, a: &GroupSubset, kind: OrderKind) -> Option<String> {
    let g = &ctx.group;
    let before = sumset_unchecked(g, a, a).len();
    distinct_directions(g).iter().find_map(|&v| {
        let c = direction_compressor_unchecked(g, v, kind).apply(a);
        let after = sumset_unchecked(g, &c, &c).len();
        (after > before).then(|| {
            format!("v=({}): |C_v(A)+C_v(A)|={after} > |A+A|={before}", coords(g, v))
        })
    })
}

fn compression_doubling(ctx: &SweepContext, a: &GroupSubset) -> Result<Option<String>> {
    Ok(doubling_under(ctx, a, OrderKind::SumOrder))
}

fn compression_containment(ctx: &SweepContext, a: &GroupSubset) -> Result<Option<String>> {
    let g = &ctx.group;
    let aa = sumset_unchecked(g, a, a);
    Ok(distinct_directions(g).iter().find_map(|&v| {
        let comp = direction_compressor_unchecked(g, v, OrderKind::SumOrder);
        let c = comp.apply(a);
        (!sumset_unchecked(g, &c, &c).is_subset(&comp.apply(&aa)))
            .then(|| format!("v=({}): C_v(A)+C_v(A) not inside C_v(A+A)", coords(g, v)))
    }))
}

fn layer_restricted(g: &Group, a: &GroupSubset) -> bool {
    let limit = g.prime() as usize * g.weight(g.rank() - 1);
    a.iter().all(|x| x < limit)
}

fn pseudo_compression_doubling(ctx: &SweepContext, a: &GroupSubset) -> Result<Option<String>> {
    if ctx.group.rank() < 2 || !layer_restricted(&ctx.group, a) {
        return Ok(None);
    }
    Ok(doubling_under(ctx, a, OrderKind::PseudoSumOrder))
}

fn pseudo_span(ctx: &SweepContext, a: &GroupSubset) -> Result<Option<String>> {
    let g = &ctx.group;
    if g.rank() < 2 || !ctx.basis.is_subset(a) {
        return Ok(None);
    }
    let en = g.basis_index(g.rank() - 1);
    let span = affine_span(g, a)?;
    for v in bottom_layer_members(g, a) {
        let dir = g.sub_index(en, v);
        let c = direction_compressor_unchecked(g, dir, OrderKind::PseudoSumOrder).apply(a);
        if affine_span(g, &c)? != span {
            return Ok(Some(format!("v=({}): affine span changed", coords(g, v))));
        }
    }
    Ok(None)
}

fn ee_compressed(ctx: &SweepContext, a: &GroupSubset) -> Result<bool> {
    Ok(ctx.basis.is_subset(a) && is_ee_compressed(&ctx.group, a)?)
}

fn downset(ctx: &SweepContext, a: &GroupSubset) -> Result<Option<String>> {
    if !ee_compressed(ctx, a)? {
        return Ok(None);
    }
    Ok(check_lemma_downset(&ctx.group, a)?.map(|v| format!("{v:?}")))
}

fn structure(ctx: &SweepContext, a: &GroupSubset) -> Result<Option<String>> {
    if !ee_compressed(ctx, a)? {
        return Ok(None);
    }
    Ok(check_lemma_struc_with(&ctx.group, a, StrucReading::SameBlock)?.map(|v| format!("{v:?}")))
}

fn structure_unbounded(ctx: &SweepContext, a: &GroupSubset) -> Result<Option<String>> {
    if !ee_compressed(ctx, a)? {
        return Ok(None);
    }
    Ok(check_lemma_struc_with(&ctx.group, a, StrucReading::Unbounded)?.map(|v| format!("{v:?}")))
}

/// `A ∩ {x : x_n < p}`, which still contains `E`.
fn restrict_layers(g: &Group, a: &GroupSubset) -> GroupSubset {
    let limit = g.prime() as usize * g.weight(g.rank() - 1);
    let mut out = a.clone();
    for x in a.iter().filter(|&x| x >= limit) {
        out.remove(x);
    }
    out
}

fn pseudo_layers(ctx: &SweepContext, a: &GroupSubset) -> Result<Option<String>> {
    let g = &ctx.group;
    if g.rank() < 2 || !ctx.basis.is_subset(a) {
        return Ok(None);
    }
    let c = pseudo_compress_all(g, &restrict_layers(g, a))?;
    Ok(check_lemma_pseudo_layers(g, &c)?.map(|v| format!("C(A)={c:?}: {v:?}")))
}

fn ee_driver(ctx: &SweepContext, a: &GroupSubset) -> Result<Option<String>> {
    let g = &ctx.group;
    if !ctx.basis.is_subset(a) {
        return Ok(None);
    }
    let (out, steps) = ee_compress_fixpoint(g, a)?;
    let fail = |msg: &str| Ok(Some(format!("output {out:?}: {msg}")));
    if out.len() != a.len() {
        return fail("size changed");
    }
    if !ctx.basis.is_subset(&out) {
        return fail("basis lost");
    }
    if affine_span(g, &out)? != affine_span(g, a)? {
        return fail("affine span changed");
    }
    if sumset_unchecked(g, &out, &out).len() > sumset_unchecked(g, a, a).len() {
        return fail("|A+A| increased");
    }
    if steps.iter().any(|s| s.height_after >= s.height_before) {
        return fail("a step did not lower the height");
    }
    if !is_ee_compressed(g, &out)? {
        return fail("not <<E>>-compressed");
    }
    if let Some(v) = check_lemma_downset(g, &out)? {
        return fail(&format!("{v:?}"));
    }
    if let Some(v) = check_lemma_struc_with(g, &out, StrucReading::SameBlock)? {
        return fail(&format!("{v:?}"));
    }
    Ok(None)
}

fn pseudo_driver(ctx: &SweepContext, a: &GroupSubset) -> Result<Option<String>> {
    let g = &ctx.group;
    if g.rank() < 2 || !ctx.basis.is_subset(a) {
        return Ok(None);
    }
    let a = &restrict_layers(g, a);
    let (out, _) = pseudo_compress_all_traced(g, a)?;
    let fail = |msg: &str| Ok(Some(format!("output {out:?}: {msg}")));
    if out.len() != a.len() {
        return fail("size changed");
    }
    if affine_span(g, &out)? != affine_span(g, a)? {
        return fail("affine span changed");
    }
    if sumset_unchecked(g, &out, &out).len() > sumset_unchecked(g, a, a).len() {
        return fail("|A+A| increased");
    }
    if let Some(v) = check_lemma_pseudo_layers(g, &out)? {
        return fail(&format!("{v:?}"));
    }
    Ok(None)
}

fn constants(g: &Group, a: &GroupSubset) -> Result<(Rational, Rational)> {
    let n = a.len() as u64;
    let sum = sumset_unchecked(g, a, a).len() as u64;
    let span = match a.mask() {
        Some(m) if g.order() <= 64 => crate::span::span_size_mask(g, m),
        _ => affine_span(g, a)?.len(),
    } as u64;
    Ok((Rational::new(sum, n), Rational::new(span, n)))
}

fn torsion_two_bound(ctx: &SweepContext, a: &GroupSubset) -> Result<Option<String>> {
    let g = &ctx.group;
    if g.torsion() != 2 {
        return Err(Error::OutOfRange(format!("{g} does not have torsion 2")));
    }
    let (k, s) = constants(g, a)?;
    let f = f_func(&k)?;
    Ok((s > f).then(|| format!("K={k}: spanning {s} > F(K) = {f}")))
}

type BoundKey = (BoundName, u64, u64, Rational, Rational);

thread_local! {
    // sweeps revisit few distinct (K, spanning) pairs
    static ADMITS: RefCell<HashMap<BoundKey, bool>> = RefCell::new(HashMap::new());
}

fn bound_violation(name: BoundName, g: &Group, k: Rational, s: Rational) -> Result<Option<String>> {
    let key = (name, g.torsion(), g.prime(), k, s);
    if let Some(true) = ADMITS.with(|m| m.borrow().get(&key).copied()) {
        return Ok(None);
    }
    let b = bound_by_name(name, g.torsion(), g.prime(), &k)?;
    let ok = b.admits(&s)?;
    ADMITS.with(|m| m.borrow_mut().insert(key, ok));
    Ok((!ok).then(|| format!("K={k}: spanning {s} > {name} bound {:.6}", b.approx())))
}

fn all_k_bound(ctx: &SweepContext, a: &GroupSubset) -> Result<Option<String>> {
    let (k, s) = constants(&ctx.group, a)?;
    bound_violation(BoundName::AllK, &ctx.group, k, s)
}

fn main_bound(ctx: &SweepContext, a: &GroupSubset) -> Result<Option<String>> {
    let (k, s) = constants(&ctx.group, a)?;
    if k <= ctx.k0 {
        return Ok(None);
    }
    bound_violation(BoundName::Main, &ctx.group, k, s)
}

fn sumset_oracle(ctx: &SweepContext, a: &GroupSubset) -> Result<Option<String>> {
    let g = &ctx.group;
    let fast = sumset_unchecked(g, a, a);
    let slow = oracle_sumset_naive(g, a, a);
    Ok((fast != slow).then(|| format!("kernel {fast:?} != oracle {slow:?}")))
}
