//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Oracles here are written against the definitions directly and share no
//! search code with the library beyond field and group arithmetic.

use std::collections::BTreeSet;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use gqpack::bounds;
use gqpack::clique;
use gqpack::finite_field::{FieldCtx, FieldElem};
use gqpack::geometry::{self, IncidenceStructure};
use gqpack::heisenberg::{GroupCtx, GroupElement};
use gqpack::kantor::{self, Subgroup, TwistParams};
use gqpack::packing::{self, Strategy};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Relative tolerance for every floating-point comparison.
const REL_TOL: f64 = 1e-9;
const KANTOR_BUDGET: Duration = Duration::from_secs(60);
const BOUNDS_BUDGET: Duration = Duration::from_secs(10);
/// Line-pair probes per line set for the sampled triangle scan at q = 5.
const SAMPLED_PROBES: u64 = 1_000_000;
const COSET_SAMPLES: usize = 1000;
const COLOURING_TRIALS: usize = 150;
const SEED: u64 = 20_240_917;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn group(q: u64) -> GroupCtx {
    GroupCtx::new(FieldCtx::for_q(q).expect("odd prime power"))
}

fn all_params(ctx: &GroupCtx) -> Vec<TwistParams> {
    let f = ctx.field();
    let kappa = kantor::find_kappa(f).expect("kappa exists");
    f.elements().map(|l| TwistParams::new(f, l, kappa).expect("valid kappa")).collect()
}

/// τ_λ(g) = τ_λ(g₀) ∘ g_∞* with g = g₀ ∘ g_∞*, g₀ = (a, 0, 0) ∈ A_0 and
/// g_∞* ∈ A*_∞ fixed by τ_λ.
fn tau_oracle(ctx: &GroupCtx, p: &TwistParams, g: &GroupElement) -> GroupElement {
    let f = ctx.field();
    let z = FieldElem::ZERO;
    let g0 = GroupElement::new(g.a, z, z);
    let g_inf = ctx.compose(&ctx.inverse(&g0), g);
    assert!(g_inf.a == z, "decomposition left A*_∞");
    let (l, k, a) = (p.lambda(), p.kappa(), g.a);
    let aq = f.frobenius(a);
    let inner = f.add(f.add(f.mul(l, a), f.mul(f.mul(k, l), aq)), f.half(f.mul(f.frobenius(l), f.mul(a, a))));
    let image0 = GroupElement::new(a, f.add(inner, f.frobenius(inner)), f.mul(l, aq));
    ctx.compose(&image0, &g_inf)
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    for q in [3, 5] {
        let ctx = group(q);
        let report = kantor::verify_kantor_axioms(&ctx, &kantor::base_family(&ctx));
        ensure(report.checks.len() == 5, || format!("q={q}: expected 5 checks, got {}", report.checks.len()))?;
        ensure(report.passed(), || format!("q={q}: base family failed: {:?}", report.checks))?;
    }
    let ctx = group(3);
    for p in all_params(&ctx) {
        let mut members = kantor::twisted_family(&ctx, &p);
        members.push(kantor::a_infinity(&ctx));
        let check = kantor::verify_k2(&ctx, &members);
        ensure(check.passed, || format!("lambda {}: {:?}", ctx.field().format_elem(p.lambda()), check.counterexample))?;
    }
    let elapsed = start.elapsed();
    ensure(elapsed < KANTOR_BUDGET, || format!("took {elapsed:?}"))?;
    Ok("base families at q=3,5 and 9 twisted families at q=3".into())
}

fn criterion_2() -> Outcome {
    let ctx = group(3);
    let f = ctx.field();
    let elems: Vec<GroupElement> = ctx.elements().collect();
    for p in all_params(&ctx) {
        let image: Vec<GroupElement> = elems.iter().map(|g| kantor::tau_apply(&ctx, &p, g)).collect();
        for (g, img) in elems.iter().zip(&image) {
            ensure(*img == tau_oracle(&ctx, &p, g), || format!("closed form differs at {}", ctx.format_elem(g)))?;
        }
        let distinct: BTreeSet<u32> = image.iter().map(|g| ctx.index(g)).collect();
        ensure(distinct.len() == elems.len(), || "tau is not a bijection".into())?;
        for (i, g) in elems.iter().enumerate() {
            for (j, h) in elems.iter().enumerate() {
                let lhs = image[ctx.index(&ctx.compose(g, h)) as usize];
                let rhs = ctx.compose(&image[i], &image[j]);
                ensure(lhs == rhs, || format!("tau not a homomorphism at ({i}, {j})"))?;
            }
        }
        for &t in f.subfield() {
            let mapped = Subgroup::from_elements(
                &ctx,
                kantor::Label::Finite(t),
                kantor::a_t(&ctx, t).elements.iter().map(|&x| image[x as usize]),
            );
            ensure(mapped == kantor::twisted_subgroup(&ctx, t, &p), || {
                format!("A_t^lambda differs at t={}", f.format_elem(t))
            })?;
        }
    }
    Ok("9 automorphisms on 59049 pairs each; 27 twisted subgroups".into())
}

fn trace_valid_oracle(f: &FieldCtx, kappa: FieldElem) -> bool {
    let exp = 2 * u64::from(f.q()) - 1;
    f.elements().filter(|a| !a.is_zero()).all(|a| {
        let x = f.add(f.mul(kappa, a), f.pow(a, exp));
        !f.add(x, f.frobenius(x)).is_zero()
    })
}

fn cubic_rootless_oracle(f: &FieldCtx, kappa: FieldElem) -> bool {
    let kq = f.frobenius(kappa);
    f.elements().all(|y| {
        let y2 = f.mul(y, y);
        let v = f.sub(f.add(f.sub(f.mul(y2, y), f.mul(kq, y2)), f.mul(kappa, y)), FieldElem::ONE);
        !v.is_zero()
    })
}

fn criterion_3() -> Outcome {
    for q in [3u64, 5, 7, 9, 11, 13] {
        let f = FieldCtx::for_q(q).map_err(|e| e.to_string())?;
        let k = kantor::find_kappa(&f).map_err(|e| format!("q={q}: {e}"))?;
        ensure(trace_valid_oracle(&f, k), || format!("q={q}: find_kappa returned an invalid kappa"))?;
        let c = kantor::kappa_via_cubic(&f).map_err(|e| format!("q={q}: {e}"))?;
        ensure(cubic_rootless_oracle(&f, c), || format!("q={q}: cubic witness has a root"))?;
        ensure(trace_valid_oracle(&f, c), || format!("q={q}: cubic witness fails the trace test"))?;
    }
    let mut summary = Vec::new();
    for q in [3u64, 5] {
        let f = FieldCtx::for_q(q).unwrap();
        let mut cubic = 0;
        let mut trace = 0;
        for k in f.elements() {
            let (c, t) = (cubic_rootless_oracle(&f, k), trace_valid_oracle(&f, k));
            ensure(c == kantor::cubic_is_irreducible(&f, k), || format!("q={q}: cubic test disagrees"))?;
            ensure(t == kantor::kappa_is_valid(&f, k), || format!("q={q}: trace test disagrees"))?;
            ensure(!c || t, || format!("q={q}: {} cubic-irreducible but not trace-valid", f.format_elem(k)))?;
            cubic += usize::from(c);
            trace += usize::from(t);
        }
        summary.push(format!("q={q}: {cubic} cubic ⊆ {trace} trace"));
    }
    Ok(summary.join(", "))
}

fn criterion_4() -> Outcome {
    let ctx = group(3);
    let params = all_params(&ctx);
    let families: Vec<Vec<Subgroup>> = params.iter().map(|p| kantor::twisted_family(&ctx, p)).collect();
    let mut pairs = 0;
    for (i, fi) in families.iter().enumerate() {
        for (j, fj) in families.iter().enumerate() {
            if i == j {
                continue;
            }
            for a in fi {
                for b in fj {
                    pairs += 1;
                    let common: Vec<u32> = a.elements.iter().copied().filter(|x| b.elements.contains(x)).collect();
                    ensure(common == [0], || format!("lambda #{i} and #{j} share {common:?}"))?;
                }
            }
        }
    }
    ensure(pairs == 9 * 8 * 3 * 3, || format!("{pairs} pairs"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let n = ctx.order() as u32;
    for _ in 0..COSET_SAMPLES {
        let i = rng.gen_range(0..9);
        let j = (i + rng.gen_range(1..9)) % 9;
        let a = &families[i][rng.gen_range(0..3)];
        let b = &families[j][rng.gen_range(0..3)];
        let (g, h) = (rng.gen_range(0..n), rng.gen_range(0..n));
        let ca: BTreeSet<u32> = a.elements.iter().map(|&x| ctx.compose_idx(x, g)).collect();
        let cb: BTreeSet<u32> = b.elements.iter().map(|&x| ctx.compose_idx(x, h)).collect();
        let meet = ca.intersection(&cb).count();
        ensure(meet <= 1, || format!("cosets meet in {meet} points"))?;
    }
    Ok(format!("{pairs} subgroup pairs, {COSET_SAMPLES} coset pairs"))
}

/// Three lines pairwise meeting in three distinct points, by brute force.
fn has_triangle_oracle(s: &IncidenceStructure) -> bool {
    let n = s.num_lines();
    let meet = |i: usize, j: usize| -> Option<u32> {
        let li = s.line(i);
        s.line(j).iter().copied().find(|x| li.contains(x))
    };
    for i in 0..n {
        for j in i + 1..n {
            let Some(p) = meet(i, j) else { continue };
            for k in j + 1..n {
                if let (Some(x), Some(y)) = (meet(j, k), meet(k, i)) {
                    if p != x && x != y && y != p {
                        return true;
                    }
                }
            }
        }
    }
    false
}

fn check_line_set(ctx: &GroupCtx, p: &TwistParams, exhaustive: bool) -> Result<u64, String> {
    let q = ctx.q() as usize;
    let lines = geometry::build_line_set(ctx, p);
    let lam = ctx.field().format_elem(p.lambda());
    ensure(lines.num_lines() == q.pow(4) && lines.num_points() == q.pow(5), || format!("lambda {lam}: wrong sizes"))?;
    ensure((lines.order_s(), lines.order_t()) == (q * q - 1, q - 1), || format!("lambda {lam}: order"))?;
    let reg = geometry::verify_regularity(&lines);
    ensure(reg.passed && reg.line_size == Some(q * q) && reg.point_degree == Some(q), || {
        format!("lambda {lam}: regularity {reg:?}")
    })?;
    ensure(geometry::verify_pls(&lines).passed, || format!("lambda {lam}: not a PLS"))?;
    let algebraic = geometry::triangle_free_algebraic(ctx, p);
    ensure(algebraic.passed, || format!("lambda {lam}: AB ∩ C ≠ 1"))?;
    let scan = if exhaustive {
        let scan = geometry::verify_triangle_free(&lines);
        ensure(!has_triangle_oracle(&lines) == scan.passed, || format!("lambda {lam}: scan disagrees with oracle"))?;
        scan
    } else {
        geometry::verify_triangle_free_sampled(&lines, SAMPLED_PROBES, SEED)
    };
    ensure(scan.passed == algebraic.passed, || format!("lambda {lam}: verdicts differ, triangle {:?}", scan.triangle))?;
    Ok(scan.probes)
}

fn criterion_5() -> Outcome {
    let ctx = group(3);
    for p in all_params(&ctx) {
        check_line_set(&ctx, &p, true)?;
    }
    let ctx = group(5);
    let mut probes = 0;
    for p in all_params(&ctx) {
        let n = check_line_set(&ctx, &p, false)?;
        ensure(n == SAMPLED_PROBES, || format!("only {n} probes ran"))?;
        probes += n;
    }
    Ok(format!("9 line sets at q=3 exhaustive; 25 at q=5 with {probes} sampled probes"))
}

fn criterion_6() -> Outcome {
    let ctx = group(3);
    let f = ctx.field();
    let kappa = kantor::find_kappa(f).unwrap();
    let lambdas: Vec<FieldElem> = f.elements().collect();
    let u = geometry::build_union(&ctx, kappa, &lambdas).map_err(|e| e.to_string())?;
    ensure(u.union.num_lines() == 729, || format!("{} lines", u.union.num_lines()))?;
    let n = u.union.num_points() as u32;
    let mut pairs = 0u64;
    for x in 0..n {
        for y in x + 1..n {
            pairs += 1;
            let (a, b) = (u.union.lines_through(x), u.union.lines_through(y));
            let shared = a.iter().filter(|l| b.contains(l)).count();
            ensure(shared <= 1, || format!("points {x}, {y} share {shared} lines"))?;
        }
    }
    ensure(pairs == 29_403, || format!("{pairs} pairs"))?;
    ensure(u.report.passed(), || format!("library report {:?}", u.report))?;
    Ok(format!("{pairs} point pairs on ≤ 1 of 729 lines"))
}

fn criterion_7() -> Outcome {
    let mut count = 0;
    for q in [3u64, 5] {
        let ctx = group(q);
        let lambdas: Vec<FieldElem> = ctx.field().elements().take(3).collect();
        let u = geometry::build_union(&ctx, kantor::find_kappa(ctx.field()).unwrap(), &lambdas)
            .map_err(|e| e.to_string())?;
        let fam = kantor::base_family(&ctx);
        let gq = geometry::elation_gq(&ctx, &fam);
        for s in u.parts.iter().chain([&u.union, &gq]) {
            let lhs = s.num_lines() * (s.order_s() + 1);
            let rhs = s.num_points() * (s.order_t() + 1);
            ensure(lhs == rhs && geometry::double_counting_holds(s), || format!("q={q}: {lhs} ≠ {rhs}"))?;
            count += 1;
        }
    }
    Ok(format!("{count} structures"))
}

fn criterion_8() -> Outcome {
    let (_, u, packed) = packing::build_standard_packing(3, 3, 3, 42).map_err(|e| e.to_string())?;
    let mut seen: BTreeSet<(u32, u32)> = BTreeSet::new();
    for (i, g) in packed.graphs.iter().enumerate() {
        ensure(g.num_edges() == 2187, || format!("G_{} has {} edges", i + 1, g.num_edges()))?;
        for e in g.edges() {
            ensure(seen.insert(e), || format!("edge {e:?} repeated"))?;
        }
        let report = clique::verify_clique_free(g, 4);
        ensure(report.passed, || format!("G_{} has K4 {:?}", i + 1, report.clique))?;
        let triangles = clique::enumerate_cliques(g, 3);
        let lines = &u.parts[i];
        for t in &triangles {
            let on_line = lines.lines_through(t[0]).iter().any(|&l| {
                let line = lines.line(l as usize);
                t.iter().all(|v| line.contains(v))
            });
            ensure(on_line, || format!("triangle {t:?} of G_{} spans lines", i + 1))?;
        }
        ensure(triangles.len() == 81 * 27, || format!("G_{} has {} triangles", i + 1, triangles.len()))?;
    }
    ensure(seen.len() == 3 * 2187, || "edge sets overlap".into())?;
    Ok("3 × 2187 disjoint edges, K4-free, triangles within lines".into())
}

/// Whether the vertices coloured `c` span a K_k in `g`, by brute force.
fn mono_clique_oracle(g: &clique::Graph, colouring: &[u32], c: u32, k: usize) -> bool {
    let vs: Vec<u32> = (0..colouring.len() as u32).filter(|&v| colouring[v as usize] == c).collect();
    fn grow(g: &clique::Graph, vs: &[u32], chosen: &mut Vec<u32>, from: usize, k: usize) -> bool {
        if chosen.len() == k {
            return true;
        }
        for i in from..vs.len() {
            if chosen.iter().all(|&u| g.has_edge(u, vs[i])) {
                chosen.push(vs[i]);
                if grow(g, vs, chosen, i + 1, k) {
                    return true;
                }
                chosen.pop();
            }
        }
        false
    }
    grow(g, &vs, &mut Vec::new(), 0, k)
}

fn criterion_9() -> Outcome {
    let (_, _, packed) = packing::build_standard_packing(3, 3, 3, 42).map_err(|e| e.to_string())?;
    let n = packed.num_vertices;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let (mut hits, mut misses) = (0, 0);
    for trial in 0..COLOURING_TRIALS {
        let colouring: Vec<u32> = match trial % 3 {
            // skewed weights so that both outcomes occur per colour
            0 => {
                let w: Vec<f64> = (0..3).map(|_| rng.gen::<f64>().powi(4) + 1e-3).collect();
                let total: f64 = w.iter().sum();
                (0..n)
                    .map(|_| {
                        let mut x = rng.gen::<f64>() * total;
                        let mut c = 0;
                        while c < 2 && x >= w[c] {
                            x -= w[c];
                            c += 1;
                        }
                        c as u32 + 1
                    })
                    .collect()
            }
            1 => packing::random_colouring(&packed, Strategy::UniformRandom, &mut rng),
            _ => packing::random_colouring(&packed, Strategy::GreedyAdversarial, &mut rng),
        };
        let per_colour = packing::witnesses_per_colour(&packed, &colouring).map_err(|e| e.to_string())?;
        let oracle: Vec<bool> =
            (1..=3).map(|c| mono_clique_oracle(&packed.graphs[c as usize - 1], &colouring, c, 3)).collect();
        ensure(per_colour == oracle, || format!("trial {trial}: {per_colour:?} vs oracle {oracle:?}"))?;
        let witness = packing::check_colouring(&packed, &colouring).map_err(|e| e.to_string())?;
        ensure(witness.is_some() == oracle.iter().any(|&b| b), || format!("trial {trial}: check_colouring disagrees"))?;
        if let Some(w) = witness {
            let g = &packed.graphs[w.colour as usize - 1];
            let valid = w.vertices.len() == 3
                && w.vertices.iter().all(|&v| colouring[v as usize] == w.colour)
                && (0..3).all(|i| (i + 1..3).all(|j| g.has_edge(w.vertices[i], w.vertices[j])));
            ensure(valid, || format!("trial {trial}: witness {w:?} is not a monochromatic triangle"))?;
        }
        for &b in &oracle {
            if b {
                hits += 1
            } else {
                misses += 1
            }
        }
    }
    ensure(hits > 0 && misses > 0, || format!("degenerate sample: {hits} hits, {misses} misses"))?;
    Ok(format!("{COLOURING_TRIALS} colourings, {hits} colour hits / {misses} misses, all agree"))
}

fn at_least(lhs: f64, rhs: f64) -> bool {
    lhs >= rhs - REL_TOL * rhs.abs().max(1.0)
}

fn criterion_10() -> Outcome {
    let start = Instant::now();
    ensure(bounds::constant_C() == 4028, || format!("C = {}", bounds::constant_C()))?;
    let c = (7.0 + 6.0 * 2f64.ln()) / (3.0 * 2f64.sqrt());
    ensure(((bounds::constant_c() - c) / c).abs() < REL_TOL, || "c mismatch".into())?;
    let choice = bounds::choose_q(2, 3).map_err(|e| e.to_string())?;
    ensure(choice.q == 13 && 13u64.pow(5) == 371_293, || format!("choose_q(2,3) = {}", choice.q))?;
    let mut cells = 0;
    for r in 2u64..=100 {
        for k in 3u64..=50 {
            let choice = bounds::choose_q(r, k).map_err(|e| format!("r={r} k={k}: {e}"))?;
            let q = choice.q;
            let (qf, rf, kf) = (q as f64, r as f64, k as f64);
            ensure(bounds::is_prime_power(q).is_some(), || format!("r={r} k={k}: q={q} not a prime power"))?;
            ensure(at_least(qf * qf - 1.0, 2.0 * rf * kf * kf.ln()), || format!("r={r} k={k}: s condition"))?;
            ensure(at_least(qf - 1.0, 2.0 * kf * (1.0 + rf.ln())), || format!("r={r} k={k}: t condition"))?;
            ensure(at_least(2.0 * c * kf * rf.sqrt(), qf), || format!("r={r} k={k}: q above 2ck√r"))?;
            let bound = bounds::estimate_failure_bound(q * q - 1, q - 1, r, k, q.pow(5));
            ensure(bound < 1.0, || format!("r={r} k={k}: failure bound {bound}"))?;
            let q0 = kf * (1.0 + rf.ln()) + (rf * kf * kf.ln()).sqrt();
            let value = q0 * q0 / (rf * kf) - q0 * (1.0 + rf.ln()) / rf - kf.ln();
            ensure(value > 0.0, || format!("r={r} k={k}: quadratic {value} at q0"))?;
            let lib = bounds::quadratic_in_q(q0, r, k);
            ensure((lib - value).abs() <= REL_TOL * value.abs().max(1.0), || {
                format!("r={r} k={k}: quadratic mismatch")
            })?;
            cells += 1;
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed < BOUNDS_BUDGET, || format!("took {elapsed:?}"))?;
    Ok(format!("{cells} grid cells"))
}

fn run_cli(dir: &Path, args: &[&str]) -> Result<(), String> {
    let status = Command::new(env!("CARGO_BIN_EXE_gqpack"))
        .args(args)
        .current_dir(dir)
        .env("GQPACK_THREADS", "1")
        .output()
        .map_err(|e| e.to_string())?;
    ensure(status.status.success(), || format!("{args:?} failed: {}", String::from_utf8_lossy(&status.stderr)))
}

fn criterion_11() -> Outcome {
    let runs: Vec<tempfile::TempDir> = (0..2).map(|_| tempfile::tempdir().expect("temp dir")).collect();
    for dir in &runs {
        run_cli(dir.path(), &["pack", "--q", "3", "--r", "3", "--k", "3", "--seed", "42", "--out", "g{i}.dimacs"])?;
        run_cli(
            dir.path(),
            &[
                "experiment",
                "--q",
                "3",
                "--r",
                "2",
                "--k",
                "2",
                "--trials",
                "200",
                "--strategy",
                "greedy-adversarial",
                "--seed",
                "7",
                "--out",
                "exp.json",
            ],
        )?;
    }
    let files = ["g1.dimacs", "g2.dimacs", "g3.dimacs", "exp.json"];
    for name in files {
        let a = std::fs::read(runs[0].path().join(name)).map_err(|e| e.to_string())?;
        let b = std::fs::read(runs[1].path().join(name)).map_err(|e| e.to_string())?;
        ensure(a == b, || format!("{name} differs between runs"))?;
    }
    Ok(format!("{} files byte-identical across two runs", files.len()))
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("Kantor axioms", criterion_1),
        ("tau automorphisms", criterion_2),
        ("kappa witnesses", criterion_3),
        ("trivial subgroup intersections", criterion_4),
        ("line sets: PLS, regular, triangle-free", criterion_5),
        ("union PLS", criterion_6),
        ("double counting", criterion_7),
        ("packing graphs", criterion_8),
        ("colouring oracle equivalence", criterion_9),
        ("bounds grid", criterion_10),
        ("determinism", criterion_11),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail} ({secs:.2}s)", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why} ({secs:.2}s)", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
