//! The `verify` pipeline: Kantor axioms, per-λ line-set checks, trivial
//! intersections of twisted subgroups, and the union PLS check.

use gqpack::finite_field::FieldElem;
use gqpack::geometry::{self, PlsReport, RegularityReport, TriangleReport, UnionReport};
use gqpack::heisenberg::GroupCtx;
use gqpack::kantor::{self, AxiomCheck, KantorReport, TwistParams};
use gqpack::Result;
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Depth {
    Exhaustive,
    Sampled { samples: u64, seed: u64 },
}

#[derive(Debug, Serialize)]
pub struct LambdaReport {
    pub lambda: String,
    /// (K2) for {A_t^λ} ∪ {A_∞}.
    pub kantor_k2: AxiomCheck,
    pub regularity: RegularityReport,
    pub pls: PlsReport,
    pub triangle_free: TriangleReport,
    /// AB ∩ C = {1} over distinct A_t^λ.
    pub triangle_free_algebraic: AxiomCheck,
    /// Combinatorial and algebraic triangle verdicts coincide.
    pub verdicts_agree: bool,
    pub double_counting: bool,
}

impl LambdaReport {
    pub fn passed(&self) -> bool {
        self.kantor_k2.passed
            && self.regularity.passed
            && self.pls.passed
            && self.triangle_free.passed
            && self.triangle_free_algebraic.passed
            && self.verdicts_agree
            && self.double_counting
    }
}

#[derive(Debug, Serialize)]
pub struct IntersectionReport {
    pub passed: bool,
    pub checked: usize,
    /// (λ1, t1, λ2, t2) of the first pair meeting outside the identity.
    pub counterexample: Option<[String; 4]>,
}

#[derive(Debug, Serialize)]
pub struct VerifyReport {
    pub q: u32,
    pub r: usize,
    pub depth: String,
    pub kappa: String,
    pub lambdas: Vec<String>,
    pub base_family: KantorReport,
    pub per_lambda: Vec<LambdaReport>,
    pub subgroup_intersections: IntersectionReport,
    pub union: UnionReport,
    pub passed: bool,
}

pub fn run(ctx: &GroupCtx, lambdas: &[FieldElem], depth: Depth) -> Result<VerifyReport> {
    let f = ctx.field();
    let kappa = kantor::find_kappa(f)?;
    let base_family = kantor::verify_kantor_axioms(ctx, &kantor::base_family(ctx));
    let union = geometry::build_union(ctx, kappa, lambdas)?;

    let mut per_lambda = Vec::with_capacity(lambdas.len());
    let mut families = Vec::with_capacity(lambdas.len());
    for (&lambda, lines) in lambdas.iter().zip(&union.parts) {
        let params = TwistParams::new(f, lambda, kappa)?;
        let mut family = kantor::twisted_family(ctx, &params);
        let with_infinity: Vec<_> = family.iter().cloned().chain([kantor::a_infinity(ctx)]).collect();
        let kantor_k2 = kantor::verify_k2(ctx, &with_infinity);
        let triangle_free = match depth {
            Depth::Exhaustive => geometry::verify_triangle_free(lines),
            Depth::Sampled { samples, seed } => geometry::verify_triangle_free_sampled(lines, samples, seed),
        };
        let triangle_free_algebraic = kantor::verify_k2(ctx, &family);
        let verdicts_agree = match depth {
            Depth::Exhaustive => triangle_free.passed == triangle_free_algebraic.passed,
            // a sample can only confirm a triangle, never rule one out
            Depth::Sampled { .. } => triangle_free.passed || !triangle_free_algebraic.passed,
        };
        per_lambda.push(LambdaReport {
            lambda: f.format_elem(lambda),
            kantor_k2,
            regularity: geometry::verify_regularity(lines),
            pls: geometry::verify_pls(lines),
            triangle_free,
            triangle_free_algebraic,
            verdicts_agree,
            double_counting: geometry::double_counting_holds(lines),
        });
        families.push(std::mem::take(&mut family));
    }

    let mut intersections = IntersectionReport { passed: true, checked: 0, counterexample: None };
    for i in 0..families.len() {
        for j in i + 1..families.len() {
            for a in &families[i] {
                for b in &families[j] {
                    intersections.checked += 1;
                    if intersections.passed && a.intersection(b) != [0] {
                        intersections.passed = false;
                        intersections.counterexample = Some([
                            f.format_elem(lambdas[i]),
                            a.label.format(f),
                            f.format_elem(lambdas[j]),
                            b.label.format(f),
                        ]);
                    }
                }
            }
        }
    }

    let passed = base_family.passed()
        && per_lambda.iter().all(LambdaReport::passed)
        && intersections.passed
        && union.report.passed();
    Ok(VerifyReport {
        q: ctx.q(),
        r: lambdas.len(),
        depth: match depth {
            Depth::Exhaustive => "exhaustive".to_string(),
            Depth::Sampled { samples, .. } => format!("sampled:{samples}"),
        },
        kappa: f.format_elem(kappa),
        lambdas: lambdas.iter().map(|&l| f.format_elem(l)).collect(),
        base_family,
        per_lambda,
        subgroup_intersections: intersections,
        union: union.report,
        passed,
    })
}

/// Human-readable lines for stdout.
pub fn summary(report: &VerifyReport) -> Vec<String> {
    let mark = |b: bool| if b { "PASS" } else { "FAIL" };
    let mut out =
        vec![format!("q = {}, r = {}, kappa = {}, depth = {}", report.q, report.r, report.kappa, report.depth)];
    for c in &report.base_family.checks {
        out.push(format!("base family {:?}: {}", c.axiom, mark(c.passed)));
    }
    for l in &report.per_lambda {
        out.push(format!(
            "lambda {}: K2 {} | regular {} | PLS {} | triangle-free {} ({} probes) | algebraic {} | double counting {}",
            l.lambda,
            mark(l.kantor_k2.passed),
            mark(l.regularity.passed),
            mark(l.pls.passed),
            mark(l.triangle_free.passed),
            l.triangle_free.probes,
            mark(l.triangle_free_algebraic.passed),
            mark(l.double_counting),
        ));
    }
    out.push(format!(
        "twisted subgroup intersections ({} pairs): {}",
        report.subgroup_intersections.checked,
        mark(report.subgroup_intersections.passed)
    ));
    out.push(format!(
        "union: disjoint line sets {} | PLS {}",
        mark(report.union.line_sets_disjoint),
        mark(report.union.union_pls.passed)
    ));
    out.push(format!("overall: {}", mark(report.passed)));
    out
}
