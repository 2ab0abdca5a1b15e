//! Point-line geometries on the q⁵ elements of E.
//!
//! For each λ the line set is ℒ_λ = {A_t^λ g : g ∈ E, t ∈ GF(q)} (right
//! cosets). Each ℒ_λ is a triangle-free partial linear space of order
//! (q² − 1, q − 1): the order here counts points-per-line − 1 and
//! lines-per-point − 1. The elation quadrangle the cosets come from has
//! order (q², q); [`elation_gq`] builds that reference geometry.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::finite_field::FieldElem;
use crate::heisenberg::GroupCtx;
use crate::kantor::{self, AxiomCheck, KantorFamily, Subgroup, TwistParams};

/// Points `0..num_points`, lines as sorted point lists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IncidenceStructure {
    num_points: usize,
    lines: Vec<Vec<u32>>,
    point_to_lines: Vec<Vec<u32>>,
    order_s: usize,
    order_t: usize,
}

impl IncidenceStructure {
    /// Sorts each line and builds the point → lines index. `order_s` and
    /// `order_t` are the claimed parameters, checked by [`verify_regularity`].
    pub fn new(num_points: usize, mut lines: Vec<Vec<u32>>, order_s: usize, order_t: usize) -> Self {
        let mut point_to_lines = vec![Vec::new(); num_points];
        for (i, line) in lines.iter_mut().enumerate() {
            line.sort_unstable();
            for &p in line.iter() {
                point_to_lines[p as usize].push(i as u32);
            }
        }
        IncidenceStructure { num_points, lines, point_to_lines, order_s, order_t }
    }

    pub fn num_points(&self) -> usize {
        self.num_points
    }

    pub fn num_lines(&self) -> usize {
        self.lines.len()
    }

    pub fn lines(&self) -> &[Vec<u32>] {
        &self.lines
    }

    pub fn line(&self, i: usize) -> &[u32] {
        &self.lines[i]
    }

    pub fn lines_through(&self, p: u32) -> &[u32] {
        &self.point_to_lines[p as usize]
    }

    pub fn order_s(&self) -> usize {
        self.order_s
    }

    pub fn order_t(&self) -> usize {
        self.order_t
    }

    /// Lines with one removed, keeping the claimed order.
    pub fn without_line(&self, i: usize) -> Self {
        let mut lines = self.lines.clone();
        lines.remove(i);
        IncidenceStructure::new(self.num_points, lines, self.order_s, self.order_t)
    }
}

/// Right cosets of `sub`, deduplicated by their smallest element and emitted
/// in increasing order of it.
pub fn right_cosets(ctx: &GroupCtx, sub: &Subgroup) -> Vec<Vec<u32>> {
    let n = ctx.order();
    let mut covered = vec![false; n];
    let mut cosets = Vec::with_capacity(n / sub.len().max(1));
    for g in 0..n as u32 {
        if covered[g as usize] {
            continue;
        }
        let mut coset: Vec<u32> = sub.elements.iter().map(|&x| ctx.compose_idx(x, g)).collect();
        coset.sort_unstable();
        for &y in &coset {
            covered[y as usize] = true;
        }
        cosets.push(coset);
    }
    cosets
}

/// ℒ_λ: the cosets of A_t^λ for each t in canonical order.
pub fn build_line_set(ctx: &GroupCtx, params: &TwistParams) -> IncidenceStructure {
    let q = ctx.q() as usize;
    let family = kantor::twisted_family(ctx, params);
    let lines: Vec<Vec<u32>> = family.par_iter().flat_map_iter(|sub| right_cosets(ctx, sub)).collect();
    IncidenceStructure::new(ctx.order(), lines, q * q - 1, q - 1)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PlsViolation {
    pub points: (u32, u32),
    pub lines: (u32, u32),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PlsReport {
    pub passed: bool,
    pub violation: Option<PlsViolation>,
}

/// Any two distinct points lie on at most one common line.
pub fn verify_pls(structure: &IncidenceStructure) -> PlsReport {
    let n = structure.num_points;
    let violation = (0..n as u32)
        .into_par_iter()
        .map_init(
            || (vec![u32::MAX; n], vec![0u32; n]),
            |(stamp, owner), p| {
                for &l in structure.lines_through(p) {
                    for &x in &structure.lines[l as usize] {
                        if x == p {
                            continue;
                        }
                        if stamp[x as usize] == p {
                            return Some(PlsViolation { points: (p, x), lines: (owner[x as usize], l) });
                        }
                        stamp[x as usize] = p;
                        owner[x as usize] = l;
                    }
                }
                None
            },
        )
        .find_first(Option::is_some)
        .flatten();
    PlsReport { passed: violation.is_none(), violation }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Triangle {
    pub lines: [u32; 3],
    /// points[0] = lines[0] ∩ lines[1], points[1] = lines[1] ∩ lines[2],
    /// points[2] = lines[2] ∩ lines[0].
    pub points: [u32; 3],
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TriangleReport {
    pub passed: bool,
    /// Intersecting line pairs examined.
    pub probes: u64,
    pub triangle: Option<Triangle>,
}

struct MeetTable {
    stamp: Vec<u32>,
    point: Vec<u32>,
}

impl MeetTable {
    fn new(num_lines: usize) -> Self {
        MeetTable { stamp: vec![u32::MAX; num_lines], point: vec![0; num_lines] }
    }

    /// Records, for every line n ≠ m meeting m, the meeting point.
    fn load(&mut self, s: &IncidenceStructure, m: u32) {
        for &y in &s.lines[m as usize] {
            for &n in s.lines_through(y) {
                if n != m {
                    self.stamp[n as usize] = m;
                    self.point[n as usize] = y;
                }
            }
        }
    }

    fn meets(&self, m: u32, n: u32) -> Option<u32> {
        (self.stamp[n as usize] == m).then(|| self.point[n as usize])
    }
}

/// Given lines m and ℓ meeting at p, finds n through some x ∈ ℓ∖{p} meeting
/// m away from p. `meet` must be loaded for m.
fn close_triangle(s: &IncidenceStructure, meet: &MeetTable, m: u32, l: u32, p: u32) -> Option<Triangle> {
    for &x in &s.lines[l as usize] {
        if x == p {
            continue;
        }
        for &n in s.lines_through(x) {
            if n == l || n == m {
                continue;
            }
            if let Some(y) = meet.meets(m, n) {
                if y != p && y != x {
                    return Some(Triangle { lines: [m, l, n], points: [p, x, y] });
                }
            }
        }
    }
    None
}

/// Exhaustive search for three lines pairwise meeting in three distinct
/// points. Assumes a partial linear space.
pub fn verify_triangle_free(structure: &IncidenceStructure) -> TriangleReport {
    let s = structure;
    let results: Vec<(u64, Option<Triangle>)> = (0..s.num_lines() as u32)
        .into_par_iter()
        .map_init(
            || MeetTable::new(s.num_lines()),
            |meet, m| {
                meet.load(s, m);
                let mut probes = 0;
                for &p in &s.lines[m as usize] {
                    for &l in s.lines_through(p) {
                        if l == m {
                            continue;
                        }
                        probes += 1;
                        if let Some(tri) = close_triangle(s, meet, m, l, p) {
                            return (probes, Some(tri));
                        }
                    }
                }
                (probes, None)
            },
        )
        .collect();
    let probes = results.iter().map(|r| r.0).sum();
    let triangle = results.into_iter().find_map(|r| r.1);
    TriangleReport { passed: triangle.is_none(), probes, triangle }
}

/// Triangle search over `probes` random intersecting line pairs. Probes are
/// split into 64 chunks, chunk `c` drawing from ChaCha8 stream `c` of `seed`.
pub fn verify_triangle_free_sampled(structure: &IncidenceStructure, probes: u64, seed: u64) -> TriangleReport {
    let s = structure;
    const CHUNKS: u64 = 64;
    if s.num_lines() == 0 {
        return TriangleReport { passed: true, probes: 0, triangle: None };
    }
    let results: Vec<(u64, Option<Triangle>)> = (0..CHUNKS)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c);
            let mut meet = MeetTable::new(s.num_lines());
            let count = probes / CHUNKS + u64::from(c < probes % CHUNKS);
            let mut done = 0;
            for _ in 0..count {
                let m = rng.gen_range(0..s.num_lines() as u32);
                let line = &s.lines[m as usize];
                if line.is_empty() {
                    continue;
                }
                let p = line[rng.gen_range(0..line.len())];
                let others: Vec<u32> = s.lines_through(p).iter().copied().filter(|&l| l != m).collect();
                if others.is_empty() {
                    continue;
                }
                let l = others[rng.gen_range(0..others.len())];
                meet.load(s, m);
                done += 1;
                if let Some(tri) = close_triangle(s, &meet, m, l, p) {
                    return (done, Some(tri));
                }
            }
            (done, None)
        })
        .collect();
    let probes = results.iter().map(|r| r.0).sum();
    let triangle = results.into_iter().find_map(|r| r.1);
    TriangleReport { passed: triangle.is_none(), probes, triangle }
}

/// Triangle-freeness of ℒ_λ via AB ∩ C = {1} over distinct members of
/// {A_t^λ}.
pub fn triangle_free_algebraic(ctx: &GroupCtx, params: &TwistParams) -> AxiomCheck {
    kantor::verify_k2(ctx, &kantor::twisted_family(ctx, params))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RegularityReport {
    pub passed: bool,
    /// Common line size, if all lines agree.
    pub line_size: Option<usize>,
    /// Common point degree, if all points agree.
    pub point_degree: Option<usize>,
    pub bad_line: Option<u32>,
    pub bad_point: Option<u32>,
}

/// Every line has s + 1 points and every point lies on t + 1 lines.
pub fn verify_regularity(structure: &IncidenceStructure) -> RegularityReport {
    let s = structure;
    let bad_line = s.lines.iter().position(|l| l.len() != s.order_s + 1).map(|i| i as u32);
    let bad_point = s.point_to_lines.iter().position(|l| l.len() != s.order_t + 1).map(|i| i as u32);
    RegularityReport {
        passed: bad_line.is_none() && bad_point.is_none(),
        line_size: uniform_len(&s.lines),
        point_degree: uniform_len(&s.point_to_lines),
        bad_line,
        bad_point,
    }
}

fn uniform_len(lists: &[Vec<u32>]) -> Option<usize> {
    let first = lists.first()?.len();
    lists.iter().all(|l| l.len() == first).then_some(first)
}

/// |ℒ|(s + 1) = |𝒫|(t + 1).
pub fn double_counting_holds(structure: &IncidenceStructure) -> bool {
    structure.num_lines() * (structure.order_s + 1) == structure.num_points * (structure.order_t + 1)
}

/// Whether right multiplication by `h` permutes the lines.
pub fn invariant_under_translation(ctx: &GroupCtx, structure: &IncidenceStructure, h: u32) -> bool {
    let mut original: Vec<&Vec<u32>> = structure.lines.iter().collect();
    original.sort();
    let mut moved: Vec<Vec<u32>> = structure
        .lines
        .iter()
        .map(|l| {
            let mut img: Vec<u32> = l.iter().map(|&x| ctx.compose_idx(x, h)).collect();
            img.sort_unstable();
            img
        })
        .collect();
    moved.sort();
    original.into_iter().eq(moved.iter())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UnionReport {
    /// No line occurs in two colours.
    pub line_sets_disjoint: bool,
    pub union_pls: PlsReport,
}

impl UnionReport {
    pub fn passed(&self) -> bool {
        self.line_sets_disjoint && self.union_pls.passed
    }
}

/// r line sets on the same points and their union.
#[derive(Clone, Debug)]
pub struct UnionGeometry {
    pub kappa: FieldElem,
    pub lambdas: Vec<FieldElem>,
    pub parts: Vec<IncidenceStructure>,
    pub union: IncidenceStructure,
    /// Colour in 1..=r of each union line.
    pub line_colours: Vec<u32>,
    pub report: UnionReport,
}

/// Builds ℒ_λ for each λ, their union, and checks disjointness and the
/// union PLS property.
pub fn build_union(ctx: &GroupCtx, kappa: FieldElem, lambdas: &[FieldElem]) -> Result<UnionGeometry> {
    let f = ctx.field();
    let max = f.order() as usize;
    if lambdas.len() > max {
        return Err(Error::TooManyColours { r: lambdas.len(), max });
    }
    if lambdas.is_empty() {
        return Err(Error::InvalidArgument("at least one lambda is required".into()));
    }
    let mut seen = std::collections::HashSet::new();
    for &l in lambdas {
        if !seen.insert(l) {
            return Err(Error::DuplicateLambda(f.format_elem(l)));
        }
    }
    let params: Vec<TwistParams> = lambdas.iter().map(|&l| TwistParams::new(f, l, kappa)).collect::<Result<_>>()?;
    let parts: Vec<IncidenceStructure> = params.iter().map(|p| build_line_set(ctx, p)).collect();

    let mut lines = Vec::new();
    let mut line_colours = Vec::new();
    for (i, part) in parts.iter().enumerate() {
        lines.extend(part.lines.iter().cloned());
        line_colours.extend(std::iter::repeat_n((i + 1) as u32, part.num_lines()));
    }
    let q = ctx.q() as usize;
    let r = lambdas.len();
    let union = IncidenceStructure::new(ctx.order(), lines, q * q - 1, r * q - 1);

    let mut distinct: Vec<&Vec<u32>> = union.lines.iter().collect();
    distinct.sort();
    distinct.dedup();
    let report = UnionReport { line_sets_disjoint: distinct.len() == union.num_lines(), union_pls: verify_pls(&union) };

    Ok(UnionGeometry { kappa, lambdas: lambdas.to_vec(), parts, union, line_colours, report })
}

/// The first r elements of GF(q²) in canonical order.
pub fn default_lambdas(ctx: &GroupCtx, r: usize) -> Result<Vec<FieldElem>> {
    let max = ctx.field().order() as usize;
    if r > max {
        return Err(Error::TooManyColours { r, max });
    }
    Ok(ctx.field().elements().take(r).collect())
}

/// Header "q kappa lambda num_points num_lines", then one line per geometric
/// line as space-separated point indices.
pub fn format_geometry_dump(ctx: &GroupCtx, kappa: FieldElem, lambda: FieldElem, s: &IncidenceStructure) -> String {
    let f = ctx.field();
    let mut out = format!(
        "{} {} {} {} {}\n",
        ctx.q(),
        f.format_elem(kappa),
        f.format_elem(lambda),
        s.num_points(),
        s.num_lines()
    );
    for line in &s.lines {
        push_joined(&mut out, line);
    }
    out
}

/// As [`format_geometry_dump`], with λ's joined by ';' in the header and each
/// line prefixed by its colour in 1..=r.
pub fn format_union_dump(ctx: &GroupCtx, u: &UnionGeometry) -> String {
    let f = ctx.field();
    let lambdas: Vec<String> = u.lambdas.iter().map(|&l| f.format_elem(l)).collect();
    let mut out = format!(
        "{} {} {} {} {}\n",
        ctx.q(),
        f.format_elem(u.kappa),
        lambdas.join(";"),
        u.union.num_points(),
        u.union.num_lines()
    );
    for (line, colour) in u.union.lines.iter().zip(&u.line_colours) {
        out.push_str(&colour.to_string());
        out.push(' ');
        push_joined(&mut out, line);
    }
    out
}

fn push_joined(out: &mut String, line: &[u32]) {
    let parts: Vec<String> = line.iter().map(u32::to_string).collect();
    out.push_str(&parts.join(" "));
    out.push('\n');
}

/// The elation generalised quadrangle of a Kantor family, for cross-checks.
///
/// Points: elements of E (indices `0..|E|`), then the cosets A*_i g, then ∞.
/// Lines: the cosets A_i g, then the symbols [A_i]. Order (s, t) = (q², q)
/// as a quadrangle; `order_s`/`order_t` hold s and t in the same
/// points-per-line − 1 convention as the rest of this module.
pub fn elation_gq(ctx: &GroupCtx, fam: &KantorFamily) -> IncidenceStructure {
    let n = ctx.order();
    let q = ctx.q() as usize;
    let mut next_point = n as u32;
    let mut lines: Vec<Vec<u32>> = Vec::new();
    let mut symbol_lines: Vec<Vec<u32>> = Vec::new();
    for (a, a_star) in fam.members.iter().zip(&fam.star_members) {
        let star_cosets = right_cosets(ctx, a_star);
        let mut coset_point = vec![0u32; n];
        let mut symbol = Vec::new();
        for coset in &star_cosets {
            for &x in coset {
                coset_point[x as usize] = next_point;
            }
            symbol.push(next_point);
            next_point += 1;
        }
        for coset in right_cosets(ctx, a) {
            // A_i g ⊆ A*_i g since A_i ≤ A*_i
            let star = coset_point[coset[0] as usize];
            let mut line = coset;
            line.push(star);
            lines.push(line);
        }
        symbol_lines.push(symbol);
    }
    let infinity = next_point;
    for mut symbol in symbol_lines {
        symbol.push(infinity);
        lines.push(symbol);
    }
    IncidenceStructure::new(infinity as usize + 1, lines, q * q, q)
}

/// GQ axiom (iii): for every point P and line ℓ not through P there is
/// exactly one point on ℓ collinear with P. Returns the first failing
/// (point, line) pair.
pub fn gq_axiom_three_violation(s: &IncidenceStructure) -> Option<(u32, u32)> {
    let n = s.num_points();
    (0..n as u32)
        .into_par_iter()
        .map_init(
            || vec![u32::MAX; n],
            |stamp, p| {
                for &l in s.lines_through(p) {
                    for &x in &s.lines[l as usize] {
                        stamp[x as usize] = p;
                    }
                }
                (0..s.num_lines() as u32)
                    .find(|&l| {
                        let line = &s.lines[l as usize];
                        if line.binary_search(&p).is_ok() {
                            return false;
                        }
                        line.iter().filter(|&&x| stamp[x as usize] == p).count() != 1
                    })
                    .map(|l| (p, l))
            },
        )
        .find_first(Option::is_some)
        .flatten()
}
