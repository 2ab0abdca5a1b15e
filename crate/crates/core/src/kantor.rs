//! The Kantor family of E, the automorphisms τ_λ and the twisted subgroups
//! A_t^λ.
//!
//! ```text
//! A_∞  = {(0, 0, a)}              A*_∞ = {(0, γ, a)}
//! A_t  = {(a, a^{q+1} t, a t)}    A*_t = {(a, γ, a t)}          t ∈ GF(q)
//! A_t^λ = {(a, a^{q+1} t + T_λ(a), a t + λ a^q)}
//! T_λ(a) = trace(λ a + κ λ a^q + ½ λ^q a²)
//! ```
//!
//! Subgroups are materialised as sorted lists of canonical element indices.

use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::finite_field::{FieldCtx, FieldElem};
use crate::heisenberg::{GroupCtx, GroupElement};

/// Index of a family member: t ∈ GF(q) or ∞.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Finite(FieldElem),
    Infinity,
}

impl Label {
    pub fn format(&self, field: &FieldCtx) -> String {
        match self {
            Label::Finite(t) => field.format_elem(*t),
            Label::Infinity => "inf".to_string(),
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Finite(t) => write!(f, "{}", t.index()),
            Label::Infinity => write!(f, "inf"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subgroup {
    pub label: Label,
    /// Sorted canonical indices.
    pub elements: Vec<u32>,
}

impl Subgroup {
    pub fn from_elements(ctx: &GroupCtx, label: Label, elements: impl IntoIterator<Item = GroupElement>) -> Self {
        let mut elements: Vec<u32> = elements.into_iter().map(|g| ctx.index(&g)).collect();
        elements.sort_unstable();
        elements.dedup();
        Subgroup { label, elements }
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, index: u32) -> bool {
        self.elements.binary_search(&index).is_ok()
    }

    pub fn is_subset_of(&self, other: &Subgroup) -> bool {
        self.elements.iter().all(|&x| other.contains(x))
    }

    /// Sorted intersection.
    pub fn intersection(&self, other: &Subgroup) -> Vec<u32> {
        self.elements.iter().copied().filter(|&x| other.contains(x)).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KantorFamily {
    pub members: Vec<Subgroup>,
    /// A*_i in the same label order as `members`; empty when only the A_i are
    /// of interest (as for the twisted families).
    pub star_members: Vec<Subgroup>,
}

/// A_∞ = {(0, 0, a)}.
pub fn a_infinity(ctx: &GroupCtx) -> Subgroup {
    let f = ctx.field();
    let z = FieldElem::ZERO;
    Subgroup::from_elements(ctx, Label::Infinity, f.elements().map(|a| GroupElement::new(z, z, a)))
}

/// A_t = {(a, a^{q+1} t, a t)}.
pub fn a_t(ctx: &GroupCtx, t: FieldElem) -> Subgroup {
    let f = ctx.field();
    Subgroup::from_elements(
        ctx,
        Label::Finite(t),
        f.elements().map(|a| GroupElement::new(a, f.mul(f.norm(a), t), f.mul(a, t))),
    )
}

/// A*_∞ = {(0, γ, a)}.
pub fn a_star_infinity(ctx: &GroupCtx) -> Subgroup {
    let f = ctx.field();
    let elems =
        f.subfield().iter().flat_map(|&gamma| f.elements().map(move |a| GroupElement::new(FieldElem::ZERO, gamma, a)));
    Subgroup::from_elements(ctx, Label::Infinity, elems)
}

/// A*_t = {(a, γ, a t)}.
pub fn a_star_t(ctx: &GroupCtx, t: FieldElem) -> Subgroup {
    let f = ctx.field();
    let elems =
        f.subfield().iter().flat_map(|&gamma| f.elements().map(move |a| GroupElement::new(a, gamma, f.mul(a, t))));
    Subgroup::from_elements(ctx, Label::Finite(t), elems)
}

/// The q + 1 subgroups A_t (t ∈ GF(q), in canonical order) followed by A_∞,
/// with their A* partners.
pub fn base_family(ctx: &GroupCtx) -> KantorFamily {
    let ts = ctx.field().subfield().to_vec();
    let mut members: Vec<Subgroup> = ts.iter().map(|&t| a_t(ctx, t)).collect();
    members.push(a_infinity(ctx));
    let mut star_members: Vec<Subgroup> = ts.iter().map(|&t| a_star_t(ctx, t)).collect();
    star_members.push(a_star_infinity(ctx));
    KantorFamily { members, star_members }
}

/// Whether the set contains the identity and is closed under composition.
pub fn is_closed(ctx: &GroupCtx, sub: &Subgroup) -> bool {
    sub.contains(0)
        && sub.elements.par_iter().all(|&x| sub.elements.iter().all(|&y| sub.contains(ctx.compose_idx(x, y))))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Axiom {
    /// |A_i| = s, |A*_i| = st.
    Orders,
    /// Every member contains the identity and is closed.
    Closure,
    K0,
    K1,
    K2,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    /// Labels of the members involved, in the order the axiom names them.
    pub labels: Vec<String>,
    /// Offending element index, when there is one.
    pub element: Option<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AxiomCheck {
    pub axiom: Axiom,
    pub passed: bool,
    /// Number of member tuples examined.
    pub checked: usize,
    pub counterexample: Option<Counterexample>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KantorReport {
    pub checks: Vec<AxiomCheck>,
}

impl KantorReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, axiom: Axiom) -> Option<&AxiomCheck> {
        self.checks.iter().find(|c| c.axiom == axiom)
    }
}

fn labels(ctx: &GroupCtx, ls: &[Label]) -> Vec<String> {
    ls.iter().map(|l| l.format(ctx.field())).collect()
}

/// Checks member orders, closure and (K0)–(K2). (K0) and (K1) are skipped
/// when the family carries no A* members.
pub fn verify_kantor_axioms(ctx: &GroupCtx, fam: &KantorFamily) -> KantorReport {
    let q = ctx.q() as usize;
    let (s, st) = (q * q, q * q * q);
    let has_star = !fam.star_members.is_empty();
    let mut checks = Vec::new();

    let mut orders = AxiomCheck { axiom: Axiom::Orders, passed: true, checked: 0, counterexample: None };
    for (sub, want) in fam.members.iter().map(|m| (m, s)).chain(fam.star_members.iter().map(|m| (m, st))) {
        orders.checked += 1;
        if orders.passed && sub.len() != want {
            orders.passed = false;
            orders.counterexample = Some(Counterexample { labels: labels(ctx, &[sub.label]), element: None });
        }
    }
    checks.push(orders);

    let mut closure = AxiomCheck { axiom: Axiom::Closure, passed: true, checked: 0, counterexample: None };
    for sub in fam.members.iter().chain(&fam.star_members) {
        closure.checked += 1;
        if closure.passed && !is_closed(ctx, sub) {
            closure.passed = false;
            closure.counterexample = Some(Counterexample { labels: labels(ctx, &[sub.label]), element: None });
        }
    }
    checks.push(closure);

    if has_star {
        let mut k0 = AxiomCheck { axiom: Axiom::K0, passed: true, checked: 0, counterexample: None };
        for (a, a_star) in fam.members.iter().zip(&fam.star_members) {
            k0.checked += 1;
            if k0.passed {
                if let Some(&x) = a.elements.iter().find(|&&x| !a_star.contains(x)) {
                    k0.passed = false;
                    k0.counterexample =
                        Some(Counterexample { labels: labels(ctx, &[a.label, a_star.label]), element: Some(x) });
                }
            }
        }
        checks.push(k0);
        checks.push(verify_k1(ctx, &fam.members, &fam.star_members));
    }
    checks.push(verify_k2(ctx, &fam.members));
    KantorReport { checks }
}

/// (K1): A_i ∩ A*_j = {1} for i ≠ j.
pub fn verify_k1(ctx: &GroupCtx, members: &[Subgroup], stars: &[Subgroup]) -> AxiomCheck {
    let mut check = AxiomCheck { axiom: Axiom::K1, passed: true, checked: 0, counterexample: None };
    for (i, a) in members.iter().enumerate() {
        for (j, a_star) in stars.iter().enumerate() {
            if i == j {
                continue;
            }
            check.checked += 1;
            if !check.passed {
                continue;
            }
            if let Some(&x) = a.elements.iter().find(|&&x| x != 0 && a_star.contains(x)) {
                check.passed = false;
                check.counterexample =
                    Some(Counterexample { labels: labels(ctx, &[a.label, a_star.label]), element: Some(x) });
            }
        }
    }
    check
}

/// (K2): A_i A_j ∩ A_k = {1} for pairwise distinct i, j, k (all orders).
pub fn verify_k2(ctx: &GroupCtx, members: &[Subgroup]) -> AxiomCheck {
    let n = members.len();
    let pairs: Vec<(usize, usize)> =
        (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).collect();
    let failures: Vec<Option<(usize, usize, usize, u32)>> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let mut product = vec![false; ctx.order()];
            for &x in &members[i].elements {
                for &y in &members[j].elements {
                    product[ctx.compose_idx(x, y) as usize] = true;
                }
            }
            (0..n).filter(|&k| k != i && k != j).find_map(|k| {
                members[k].elements.iter().find(|&&z| z != 0 && product[z as usize]).map(|&z| (i, j, k, z))
            })
        })
        .collect();
    let first = failures.into_iter().flatten().next();
    AxiomCheck {
        axiom: Axiom::K2,
        passed: first.is_none(),
        checked: pairs.len() * n.saturating_sub(2),
        counterexample: first.map(|(i, j, k, z)| Counterexample {
            labels: labels(ctx, &[members[i].label, members[j].label, members[k].label]),
            element: Some(z),
        }),
    }
}

/// A nonzero a with trace(κa + a^{2q−1}) = 0, if one exists.
pub fn kappa_counterexample(field: &FieldCtx, kappa: FieldElem) -> Option<FieldElem> {
    let exponent = 2 * field.q() as u64 - 1;
    field.elements().skip(1).find(|&a| field.trace(field.add(field.mul(kappa, a), field.pow(a, exponent))).is_zero())
}

/// trace(κa + a^{2q−1}) ≠ 0 for every nonzero a.
pub fn kappa_is_valid(field: &FieldCtx, kappa: FieldElem) -> bool {
    kappa_counterexample(field, kappa).is_none()
}

/// First κ in canonical order passing the trace test.
pub fn find_kappa(field: &FieldCtx) -> Result<FieldElem> {
    (0..field.order())
        .into_par_iter()
        .map(|i| field.elem(i))
        .find_first(|&k| kappa_is_valid(field, k))
        .ok_or(Error::NoKappaFound(field.q()))
}

/// Coefficients (c2, c1, c0) of y³ − κ^q y² + κ y − 1.
pub fn kappa_cubic(field: &FieldCtx, kappa: FieldElem) -> (FieldElem, FieldElem, FieldElem) {
    (field.neg(field.frobenius(kappa)), kappa, field.from_int(-1))
}

pub fn cubic_is_irreducible(field: &FieldCtx, kappa: FieldElem) -> bool {
    let (c2, c1, c0) = kappa_cubic(field, kappa);
    field.is_irreducible_cubic(c2, c1, c0)
}

/// First κ in canonical order for which y³ − κ^q y² + κ y − 1 is irreducible
/// over GF(q²). Any such κ passes the trace test.
pub fn kappa_via_cubic(field: &FieldCtx) -> Result<FieldElem> {
    (0..field.order())
        .into_par_iter()
        .map(|i| field.elem(i))
        .find_first(|&k| cubic_is_irreducible(field, k))
        .ok_or(Error::NoKappaFound(field.q()))
}

/// λ and a verified κ.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TwistParams {
    lambda: FieldElem,
    kappa: FieldElem,
}

impl TwistParams {
    pub fn new(field: &FieldCtx, lambda: FieldElem, kappa: FieldElem) -> Result<Self> {
        if let Some(a) = kappa_counterexample(field, kappa) {
            return Err(Error::InvalidKappa { kappa: field.format_elem(kappa), witness: field.format_elem(a) });
        }
        Ok(TwistParams { lambda, kappa })
    }

    pub fn lambda(&self) -> FieldElem {
        self.lambda
    }

    pub fn kappa(&self) -> FieldElem {
        self.kappa
    }
}

/// trace(λa + κλa^q + ½λ^q a²).
pub fn twist_term(field: &FieldCtx, lambda: FieldElem, kappa: FieldElem, a: FieldElem) -> FieldElem {
    let f = field;
    let aq = f.frobenius(a);
    let inner = f
        .add(f.add(f.mul(lambda, a), f.mul(f.mul(kappa, lambda), aq)), f.half(f.mul(f.frobenius(lambda), f.mul(a, a))));
    f.trace(inner)
}

/// τ_λ(a, γ, b) = (a, γ + T_λ(a), b + λa^q).
///
/// This is τ_λ(a,0,0) ∘ (0,γ,b), using g = (a,0,0) ∘ (0,γ,b) and the fact
/// that τ_λ fixes A*_∞ pointwise.
pub fn tau_apply(ctx: &GroupCtx, params: &TwistParams, g: &GroupElement) -> GroupElement {
    let f = ctx.field();
    GroupElement {
        a: g.a,
        gamma: f.add(g.gamma, twist_term(f, params.lambda, params.kappa, g.a)),
        b: f.add(g.b, f.mul(params.lambda, f.frobenius(g.a))),
    }
}

/// A_t^λ, labelled by t.
pub fn twisted_subgroup(ctx: &GroupCtx, t: FieldElem, params: &TwistParams) -> Subgroup {
    let f = ctx.field();
    let (lambda, kappa) = (params.lambda, params.kappa);
    let elems = f.elements().map(|a| {
        GroupElement::new(
            a,
            f.add(f.mul(f.norm(a), t), twist_term(f, lambda, kappa, a)),
            f.add(f.mul(a, t), f.mul(lambda, f.frobenius(a))),
        )
    });
    Subgroup::from_elements(ctx, Label::Finite(t), elems)
}

/// {A_t^λ : t ∈ GF(q)} in canonical t order.
pub fn twisted_family(ctx: &GroupCtx, params: &TwistParams) -> Vec<Subgroup> {
    ctx.field().subfield().iter().map(|&t| twisted_subgroup(ctx, t, params)).collect()
}

/// "label=t lambda=λ kappa=κ", then one element per line as "a|gamma|b".
pub fn format_subgroup_dump(ctx: &GroupCtx, sub: &Subgroup, lambda: FieldElem, kappa: FieldElem) -> String {
    let f = ctx.field();
    let mut out =
        format!("label={} lambda={} kappa={}\n", sub.label.format(f), f.format_elem(lambda), f.format_elem(kappa));
    for &x in &sub.elements {
        out.push_str(&ctx.format_elem(&ctx.element(x)));
        out.push('\n');
    }
    out
}
