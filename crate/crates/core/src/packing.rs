//! Random equitable partitions of the lines and the Turán-graph packing
//! G_1, …, G_r built from them.
//!
//! Each line of ℒ_i is cut into k blocks of sizes ⌊(s+1)/k⌋ and ⌈(s+1)/k⌉
//! after a uniform shuffle; G_i joins every two points of a line lying in
//! different blocks. With ℒ_i a triangle-free PLS, every K_k of G_i is a
//! block transversal of one line and G_i is K_{k+1}-free.
//!
//! Randomness is ChaCha8. The partition of line `l` in colour `i` (1-based)
//! draws from `ChaCha8Rng::seed_from_u64(seed)` on stream `(i << 32) | l`, so
//! lines can be partitioned independently. Experiments use streams with the
//! top bit set.
//!
//! Whether every r-colouring has a monochromatic witness is not certified:
//! that quantifier is exponential. [`estimate_failure_bound`] and sampled
//! colourings stand in for it.
//!
//! [`estimate_failure_bound`]: crate::bounds::estimate_failure_bound

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::bounds::estimate_failure_bound;
use crate::clique::Graph;
use crate::error::{Error, Result};
use crate::finite_field::FieldCtx;
use crate::geometry::{self, IncidenceStructure};
use crate::heisenberg::GroupCtx;
use crate::kantor;

/// An ordered equitable partition of one line into k blocks, the ⌊(s+1)/k⌋
/// blocks first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinePartition {
    pub blocks: Vec<Vec<u32>>,
}

impl LinePartition {
    pub fn k(&self) -> usize {
        self.blocks.len()
    }

    /// Block sizes (ℓ1, ℓ2) and the number k′ of ℓ1-blocks for n points.
    pub fn shape(n: usize, k: usize) -> (usize, usize, usize) {
        let small = n / k;
        let large = n.div_ceil(k);
        let k_small = if small == large { k } else { k * large - n };
        (small, large, k_small)
    }

    /// Exactly k blocks with sizes ℓ1 then ℓ2 as in [`LinePartition::shape`],
    /// covering `line` without overlap.
    pub fn is_equitable_partition_of(&self, line: &[u32]) -> bool {
        let k = self.k();
        if k == 0 {
            return false;
        }
        let (small, large, k_small) = Self::shape(line.len(), k);
        let sizes_ok = self.blocks.iter().enumerate().all(|(j, b)| b.len() == if j < k_small { small } else { large });
        let mut all: Vec<u32> = self.blocks.concat();
        all.sort_unstable();
        let mut want = line.to_vec();
        want.sort_unstable();
        sizes_ok && all == want
    }

    /// Index of the block holding `v`.
    pub fn block_of(&self, v: u32) -> Option<usize> {
        self.blocks.iter().position(|b| b.contains(&v))
    }
}

/// Uniform shuffle of the line, cut into k′ blocks of ℓ1 then k − k′ of ℓ2.
pub fn random_partition<R: Rng + ?Sized>(line: &[u32], k: usize, rng: &mut R) -> Result<LinePartition> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be positive".into()));
    }
    if k > line.len() {
        return Err(Error::KTooLarge { k, line_size: line.len() });
    }
    let mut points = line.to_vec();
    points.shuffle(rng);
    let (small, large, k_small) = LinePartition::shape(points.len(), k);
    let mut blocks = Vec::with_capacity(k);
    let mut start = 0;
    for j in 0..k {
        let len = if j < k_small { small } else { large };
        let mut block = points[start..start + len].to_vec();
        block.sort_unstable();
        blocks.push(block);
        start += len;
    }
    Ok(LinePartition { blocks })
}

fn line_rng(seed: u64, colour: usize, line: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((colour as u64) << 32) | line as u64);
    rng
}

/// The r graphs with their provenance.
#[derive(Clone, Debug)]
pub struct PackedGraphs {
    pub num_vertices: usize,
    pub k: usize,
    pub seed: u64,
    /// G_1, …, G_r.
    pub graphs: Vec<Graph>,
    /// ℒ_i per colour, in the order the partitions refer to.
    pub lines: Vec<Vec<Vec<u32>>>,
    /// Partition of each line of ℒ_i.
    pub partitions: Vec<Vec<LinePartition>>,
    /// Edge (u, v), u < v → (colour in 1..=r, line index within ℒ_colour).
    pub provenance: BTreeMap<(u32, u32), (u32, u32)>,
}

impl PackedGraphs {
    pub fn r(&self) -> usize {
        self.graphs.len()
    }
}

/// G_i = ⋃_{ℓ ∈ ℒ_i} Turán graph on the blocks of ℓ.
///
/// The structures must share the point set and form a partial linear space
/// together; an edge produced twice is reported as a precondition failure.
pub fn build_packing(structures: &[IncidenceStructure], k: usize, seed: u64) -> Result<PackedGraphs> {
    let Some(first) = structures.first() else {
        return Err(Error::InvalidArgument("at least one line set is required".into()));
    };
    let n = first.num_points();
    if structures.iter().any(|s| s.num_points() != n) {
        return Err(Error::Precondition("line sets must share the point set".into()));
    }

    let partitions: Vec<Vec<LinePartition>> = structures
        .iter()
        .enumerate()
        .map(|(i, s)| {
            s.lines()
                .par_iter()
                .enumerate()
                .map(|(l, line)| random_partition(line, k, &mut line_rng(seed, i + 1, l)))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;

    let mut provenance = BTreeMap::new();
    let mut graphs = Vec::with_capacity(structures.len());
    for (i, parts) in partitions.iter().enumerate() {
        let mut g = Graph::new(n);
        for (l, part) in parts.iter().enumerate() {
            for (bi, block) in part.blocks.iter().enumerate() {
                for other in &part.blocks[bi + 1..] {
                    for &u in block {
                        for &v in other {
                            let key = (u.min(v), u.max(v));
                            if let Some((c, l0)) = provenance.insert(key, ((i + 1) as u32, l as u32)) {
                                return Err(Error::Precondition(format!(
                                    "edge {key:?} arises from colour {c} line {l0} and colour {} line {l}",
                                    i + 1
                                )));
                            }
                            g.push_edge_unchecked(u, v);
                        }
                    }
                }
            }
        }
        g.normalize();
        graphs.push(g);
    }

    Ok(PackedGraphs {
        num_vertices: n,
        k,
        seed,
        graphs,
        lines: structures.iter().map(|s| s.lines().to_vec()).collect(),
        partitions,
        provenance,
    })
}

/// A monochromatic K_k: colour i, a line of ℒ_i, one i-coloured vertex per block.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ColouringWitness {
    pub colour: u32,
    pub line: u32,
    pub vertices: Vec<u32>,
}

fn validate_colouring(packed: &PackedGraphs, colouring: &[u32]) -> Result<()> {
    if colouring.len() != packed.num_vertices {
        return Err(Error::InvalidArgument(format!(
            "colouring covers {} vertices, expected {}",
            colouring.len(),
            packed.num_vertices
        )));
    }
    let r = packed.r();
    if let Some((vertex, &colour)) = colouring.iter().enumerate().find(|(_, &c)| c == 0 || c as usize > r) {
        return Err(Error::BadColour { vertex, colour, r });
    }
    Ok(())
}

fn witness_in_colour(packed: &PackedGraphs, colouring: &[u32], colour: u32) -> Option<ColouringWitness> {
    let parts = &packed.partitions[colour as usize - 1];
    parts.iter().enumerate().find_map(|(l, part)| {
        let picks: Option<Vec<u32>> =
            part.blocks.iter().map(|b| b.iter().copied().find(|&v| colouring[v as usize] == colour)).collect();
        picks.map(|vertices| ColouringWitness { colour, line: l as u32, vertices })
    })
}

/// First (colour, line) in scan order where every block holds a vertex of
/// that colour. Colours are 1-based.
pub fn check_colouring(packed: &PackedGraphs, colouring: &[u32]) -> Result<Option<ColouringWitness>> {
    validate_colouring(packed, colouring)?;
    Ok((1..=packed.r() as u32).find_map(|i| witness_in_colour(packed, colouring, i)))
}

/// For each colour i, whether G_i has a K_k coloured i.
pub fn witnesses_per_colour(packed: &PackedGraphs, colouring: &[u32]) -> Result<Vec<bool>> {
    validate_colouring(packed, colouring)?;
    Ok((1..=packed.r() as u32).map(|i| witness_in_colour(packed, colouring, i).is_some()).collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Strategy {
    /// Independent uniform colour per vertex.
    UniformRandom,
    /// Random vertex order, colours dealt round-robin.
    BalancedRandom,
    /// Random vertex order, each vertex greedily avoiding completed witnesses.
    GreedyAdversarial,
}

impl Strategy {
    pub const ALL: [Strategy; 3] = [Strategy::UniformRandom, Strategy::BalancedRandom, Strategy::GreedyAdversarial];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::UniformRandom => "uniform-random",
            Strategy::BalancedRandom => "balanced-random",
            Strategy::GreedyAdversarial => "greedy-adversarial",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Strategy::ALL
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown strategy {s:?}")))
    }
}

impl Serialize for Strategy {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

/// Colours every vertex in a random order, picking for each the colour that
/// completes the fewest monochromatic block transversals, then the fewest
/// newly covered blocks, then the least used colour, then the lowest index.
pub fn greedy_adversarial_colouring<R: Rng + ?Sized>(packed: &PackedGraphs, rng: &mut R) -> Vec<u32> {
    let n = packed.num_vertices;
    let r = packed.r();
    // per colour: vertex → (line, block) memberships
    let memberships: Vec<Vec<Vec<(u32, u32)>>> = packed
        .partitions
        .iter()
        .map(|parts| {
            let mut m = vec![Vec::new(); n];
            for (l, part) in parts.iter().enumerate() {
                for (b, block) in part.blocks.iter().enumerate() {
                    for &v in block {
                        m[v as usize].push((l as u32, b as u32));
                    }
                }
            }
            m
        })
        .collect();
    let mut covered: Vec<Vec<Vec<bool>>> =
        packed.partitions.iter().map(|parts| parts.iter().map(|p| vec![false; p.k()]).collect()).collect();
    let mut covered_count: Vec<Vec<usize>> = packed.partitions.iter().map(|parts| vec![0; parts.len()]).collect();
    let mut used = vec![0usize; r];

    let mut order: Vec<u32> = (0..n as u32).collect();
    order.shuffle(rng);
    let mut colouring = vec![0u32; n];
    for v in order {
        let best = (0..r)
            .min_by_key(|&i| {
                let (mut completes, mut fresh) = (0usize, 0usize);
                for &(l, b) in &memberships[i][v as usize] {
                    if !covered[i][l as usize][b as usize] {
                        fresh += 1;
                        if covered_count[i][l as usize] + 1 == covered[i][l as usize].len() {
                            completes += 1;
                        }
                    }
                }
                (completes, fresh, used[i], i)
            })
            .expect("r ≥ 1");
        colouring[v as usize] = best as u32 + 1;
        used[best] += 1;
        for &(l, b) in &memberships[best][v as usize] {
            let slot = &mut covered[best][l as usize][b as usize];
            if !*slot {
                *slot = true;
                covered_count[best][l as usize] += 1;
            }
        }
    }
    colouring
}

/// One colouring of the given kind, colours in 1..=r.
pub fn random_colouring<R: Rng + ?Sized>(packed: &PackedGraphs, strategy: Strategy, rng: &mut R) -> Vec<u32> {
    let (n, r) = (packed.num_vertices, packed.r() as u32);
    match strategy {
        Strategy::UniformRandom => (0..n).map(|_| rng.gen_range(1..=r)).collect(),
        Strategy::BalancedRandom => {
            let mut order: Vec<usize> = (0..n).collect();
            order.shuffle(rng);
            let mut colouring = vec![0; n];
            for (pos, v) in order.into_iter().enumerate() {
                colouring[v] = pos as u32 % r + 1;
            }
            colouring
        }
        Strategy::GreedyAdversarial => greedy_adversarial_colouring(packed, rng),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExperimentConfig {
    pub q: u64,
    pub r: usize,
    pub k: usize,
    pub trials: usize,
    pub strategy: Strategy,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub q: u64,
    pub r: usize,
    pub k: usize,
    pub seed: u64,
    pub strategy: Strategy,
    pub trials: usize,
    /// Fraction of trials with at least one witness; null without trials.
    pub witness_rate: Option<f64>,
    /// The failure-probability bound at (q² − 1, q − 1, r, k, q⁵), saturated
    /// at the largest finite double.
    pub bound: f64,
    /// Trials in which colour i had a witness, i = 1..=r.
    pub per_colour_counts: Vec<u64>,
}

/// The packing for q, r, k: first κ, first r values of λ, partitions from `seed`.
pub fn build_standard_packing(
    q: u64,
    r: usize,
    k: usize,
    seed: u64,
) -> Result<(GroupCtx, geometry::UnionGeometry, PackedGraphs)> {
    let field = FieldCtx::for_q(q)?;
    let ctx = GroupCtx::new(field);
    let kappa = kantor::find_kappa(ctx.field())?;
    let lambdas = geometry::default_lambdas(&ctx, r)?;
    let union = geometry::build_union(&ctx, kappa, &lambdas)?;
    let packed = build_packing(&union.parts, k, seed)?;
    Ok((ctx, union, packed))
}

/// Builds the packing once and runs `trials` colourings of the chosen kind.
/// Trial `j` draws from stream `(1 << 63) | j` of `seed`.
pub fn packing_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    let ExperimentConfig { q, r, k, trials, strategy, seed } = *config;
    let (_, _, packed) = build_standard_packing(q, r, k, seed)?;
    let bound = estimate_failure_bound(q * q - 1, q - 1, r as u64, k as u64, q.pow(5)).min(f64::MAX);

    let outcomes: Vec<Vec<bool>> = (0..trials)
        .into_par_iter()
        .map(|j| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream((1 << 63) | j as u64);
            let colouring = random_colouring(&packed, strategy, &mut rng);
            witnesses_per_colour(&packed, &colouring)
        })
        .collect::<Result<_>>()?;

    let mut per_colour_counts = vec![0u64; r];
    let mut hits = 0u64;
    for outcome in &outcomes {
        if outcome.iter().any(|&w| w) {
            hits += 1;
        }
        for (count, &w) in per_colour_counts.iter_mut().zip(outcome) {
            *count += u64::from(w);
        }
    }
    Ok(ExperimentReport {
        q,
        r,
        k,
        seed,
        strategy,
        trials,
        witness_rate: (trials > 0).then(|| hits as f64 / trials as f64),
        bound,
        per_colour_counts,
    })
}
