//! Borda scoring after conflicts are resolved: preference profiles, the
//! welfare function, available-color lists, network reduction and the
//! alternating local-optimum driver.

use std::fmt::Write as _;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{first_conflict, parse_usize, Coloring, Graph};
use crate::rng::{derive_seed, stream};
use crate::samplers::{AcceptanceMode, MhSampler};

/// Strict preference lists, best color first. Color at index `k` is worth
/// `q - 1 - k` points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PreferenceProfile {
    rows: Vec<Vec<usize>>,
    ranks: Vec<Vec<usize>>,
    q: usize,
}

impl PreferenceProfile {
    /// Every row must be a permutation of `0..q`.
    pub fn new(rows: Vec<Vec<usize>>, q: usize) -> Result<Self> {
        let mut ranks = Vec::with_capacity(rows.len());
        for (row_idx, row) in rows.iter().enumerate() {
            let mut rank = vec![usize::MAX; q];
            if row.len() != q {
                return Err(Error::NotPermutation { row: row_idx, q });
            }
            for (k, &c) in row.iter().enumerate() {
                if c >= q || rank[c] != usize::MAX {
                    return Err(Error::NotPermutation { row: row_idx, q });
                }
                rank[c] = k;
            }
            ranks.push(rank);
        }
        Ok(Self { rows, ranks, q })
    }

    /// Independent uniform permutations, one per vertex.
    pub fn random<R: Rng + ?Sized>(n: usize, q: usize, rng: &mut R) -> Self {
        let rows = (0..n)
            .map(|_| {
                let mut row: Vec<usize> = (0..q).collect();
                row.shuffle(rng);
                row
            })
            .collect();
        Self::new(rows, q).expect("shuffles are permutations")
    }

    /// The same list for every vertex.
    pub fn uniform(n: usize, order: &[usize]) -> Result<Self> {
        Self::new(vec![order.to_vec(); n], order.len())
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn row(&self, v: usize) -> &[usize] {
        &self.rows[v]
    }

    pub fn rank(&self, v: usize, color: usize) -> usize {
        self.ranks[v][color]
    }

    pub fn points(&self, v: usize, color: usize) -> u64 {
        (self.q - 1 - self.ranks[v][color]) as u64
    }

    pub fn restrict(&self, keep: &[usize]) -> Self {
        Self {
            rows: keep.iter().map(|&v| self.rows[v].clone()).collect(),
            ranks: keep.iter().map(|&v| self.ranks[v].clone()).collect(),
            q: self.q,
        }
    }

    /// CSV, one row per vertex, preceded by `# ` header lines.
    pub fn write_to<W: Write>(&self, mut w: W, header: &[String]) -> Result<()> {
        let mut out = String::new();
        for line in header {
            let _ = writeln!(out, "# {line}");
        }
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(usize::to_string).collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        w.write_all(out.as_bytes())?;
        Ok(())
    }

    pub fn read_from<R: Read>(r: R) -> Result<Self> {
        let mut rows = Vec::new();
        for (idx, line) in BufReader::new(r).lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let row = line.split(',').map(|cell| parse_usize(cell.trim(), idx + 1)).collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        let q = rows.first().map_or(0, Vec::len);
        Self::new(rows, q)
    }
}

pub fn load_prefs(path: impl AsRef<Path>) -> Result<PreferenceProfile> {
    PreferenceProfile::read_from(std::fs::File::open(path)?)
}

fn check_shapes(prefs: &PreferenceProfile, coloring: &Coloring) -> Result<()> {
    if prefs.len() != coloring.len() {
        return Err(Error::LengthMismatch { expected: prefs.len(), found: coloring.len() });
    }
    if prefs.q() != coloring.q() {
        return Err(Error::DimensionMismatch(format!(
            "preferences rank {} colors but the coloring uses a palette of {}",
            prefs.q(),
            coloring.q()
        )));
    }
    Ok(())
}

/// `h(L) = (q - 1) n - sum of held-color ranks`.
pub fn borda_welfare(prefs: &PreferenceProfile, coloring: &Coloring) -> Result<u64> {
    check_shapes(prefs, coloring)?;
    Ok(coloring.colors().iter().enumerate().map(|(v, &c)| prefs.points(v, c)).sum())
}

/// Per-vertex color lists over a palette `0..q`. Lists are non-empty and
/// duplicate-free; the order carries preference where it matters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AvailableColorLists {
    lists: Vec<Vec<usize>>,
    q: usize,
}

impl AvailableColorLists {
    pub fn new(lists: Vec<Vec<usize>>, q: usize) -> Result<Self> {
        for (vertex, list) in lists.iter().enumerate() {
            if list.is_empty() {
                return Err(Error::EmptyAvailableList { vertex });
            }
            let mut seen = vec![false; q];
            for &color in list {
                if color >= q {
                    return Err(Error::ColorOutOfRange { vertex, color, q });
                }
                if std::mem::replace(&mut seen[color], true) {
                    return Err(Error::InvalidSize(format!("vertex {vertex} lists color {color} twice")));
                }
            }
        }
        Ok(Self { lists, q })
    }

    /// Every vertex may take any color.
    pub fn full(n: usize, q: usize) -> Self {
        Self { lists: vec![(0..q).collect(); n], q }
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn len(&self) -> usize {
        self.lists.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lists.is_empty()
    }

    pub fn list(&self, v: usize) -> &[usize] {
        &self.lists[v]
    }

    pub fn lists(&self) -> &[Vec<usize>] {
        &self.lists
    }

    pub fn contains(&self, v: usize, color: usize) -> bool {
        self.lists[v].contains(&color)
    }

    /// Product of list sizes, as a float to survive overflow.
    pub fn product_size(&self) -> f64 {
        self.lists.iter().map(|l| l.len() as f64).product()
    }

    pub fn restrict(&self, keep: &[usize]) -> Self {
        Self { lists: keep.iter().map(|&v| self.lists[v].clone()).collect(), q: self.q }
    }

    /// Drop everything after the vertex's current color.
    fn truncate_at(&mut self, v: usize, color: usize) -> Result<()> {
        let pos = self.lists[v].iter().position(|&c| c == color).ok_or(Error::ColorNotInList { vertex: v, color })?;
        self.lists[v].truncate(pos + 1);
        Ok(())
    }
}

/// Vertex `i` gets the prefix of its preference list down to its current color.
pub fn available_colors(prefs: &PreferenceProfile, coloring: &Coloring) -> Result<AvailableColorLists> {
    check_shapes(prefs, coloring)?;
    let lists = (0..prefs.len())
        .map(|v| {
            let color = coloring.color(v);
            let k = prefs.row(v).iter().position(|&c| c == color).ok_or(Error::ColorNotInList { vertex: v, color })?;
            Ok(prefs.row(v)[..=k].to_vec())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(AvailableColorLists { lists, q: prefs.q() })
}

/// The remaining game: network, preferences, assignment and lists, indexed
/// compactly, with the original id of every remaining vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BordaNetwork {
    graph: Graph,
    prefs: PreferenceProfile,
    coloring: Coloring,
    avail: AvailableColorLists,
    original_ids: Vec<usize>,
}

impl BordaNetwork {
    /// Start of the post-resolution game. Lists are the preference prefixes.
    pub fn new(graph: Graph, prefs: PreferenceProfile, coloring: Coloring) -> Result<Self> {
        let avail = available_colors(&prefs, &coloring)?;
        let ids = (0..graph.n()).collect();
        Self::from_parts(graph, prefs, coloring, avail, ids)
    }

    pub fn from_parts(
        graph: Graph,
        prefs: PreferenceProfile,
        coloring: Coloring,
        avail: AvailableColorLists,
        original_ids: Vec<usize>,
    ) -> Result<Self> {
        coloring.check_len(&graph)?;
        check_shapes(&prefs, &coloring)?;
        for found in [avail.len(), original_ids.len()] {
            if found != graph.n() {
                return Err(Error::LengthMismatch { expected: graph.n(), found });
            }
        }
        if let Some((u, v)) = first_conflict(&graph, coloring.colors()) {
            return Err(Error::ImproperColoring(u, v));
        }
        for v in 0..graph.n() {
            let color = coloring.color(v);
            if avail.list(v).last() != Some(&color) {
                return Err(Error::ColorNotInList { vertex: v, color });
            }
        }
        Ok(Self { graph, prefs, coloring, avail, original_ids })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn prefs(&self) -> &PreferenceProfile {
        &self.prefs
    }

    pub fn coloring(&self) -> &Coloring {
        &self.coloring
    }

    pub fn avail(&self) -> &AvailableColorLists {
        &self.avail
    }

    pub fn original_ids(&self) -> &[usize] {
        &self.original_ids
    }

    pub fn len(&self) -> usize {
        self.graph.n()
    }

    pub fn is_empty(&self) -> bool {
        self.graph.n() == 0
    }

    /// Borda points currently held by the remaining vertices.
    pub fn held_points(&self) -> u64 {
        (0..self.len()).map(|v| self.prefs.points(v, self.coloring.color(v))).sum()
    }

    /// True when no remaining vertex can move to a better listed color
    /// without colliding with a neighbor.
    pub fn is_stalled(&self) -> bool {
        (0..self.len()).all(|v| {
            let current = self.coloring.color(v);
            self.avail
                .list(v)
                .iter()
                .filter(|&&c| c != current)
                .all(|&c| self.graph.neighbors(v).iter().any(|&w| self.coloring.color(w) == c))
        })
    }

    fn compact(&self, keep: &[usize]) -> Self {
        Self {
            graph: self.graph.induced(keep),
            prefs: self.prefs.restrict(keep),
            coloring: self.coloring.restrict(keep),
            avail: self.avail.restrict(keep),
            original_ids: keep.iter().map(|&v| self.original_ids[v]).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionOutcome {
    pub network: BordaNetwork,
    pub payoff_gained: u64,
    /// Original ids in departure order.
    pub quitters: Vec<usize>,
}

/// Remove every vertex whose best remaining color is the one it holds,
/// cascading until nobody qualifies. Passes run in ascending index order and
/// see removals made earlier in the same pass. A quitter's color is struck
/// from its remaining neighbors' lists.
pub fn reduce_network(net: &BordaNetwork) -> Result<ReductionOutcome> {
    let n = net.len();
    let colors = net.coloring.colors();
    let mut lists = net.avail.lists.clone();
    let mut alive = vec![true; n];
    let mut quitters = Vec::new();
    let mut payoff_gained = 0;
    loop {
        let mut any = false;
        for v in 0..n {
            if !alive[v] || lists[v].first() != Some(&colors[v]) {
                continue;
            }
            alive[v] = false;
            any = true;
            quitters.push(net.original_ids[v]);
            payoff_gained += net.prefs.points(v, colors[v]);
            for &w in net.graph.neighbors(v) {
                if alive[w] {
                    lists[w].retain(|&c| c != colors[v]);
                    if lists[w].is_empty() {
                        return Err(Error::InvariantViolation(format!("vertex {w} lost every available color")));
                    }
                }
            }
        }
        if !any {
            break;
        }
    }
    let keep: Vec<usize> = (0..n).filter(|&v| alive[v]).collect();
    let mut network = net.compact(&keep);
    network.avail.lists = keep.iter().map(|&v| std::mem::take(&mut lists[v])).collect();
    Ok(ReductionOutcome { network, payoff_gained, quitters })
}

/// What to do when the remaining vertices block each other for good.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StallPolicy {
    /// Everyone left keeps its color and leaves.
    #[default]
    Freeze,
    /// Keep alternating until the phase cap fails the run.
    Fail,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LocalRunOptions {
    pub mh_steps: u64,
    pub mode: AcceptanceMode,
    /// `None` means `10 n` phases.
    pub phase_cap: Option<usize>,
    pub stall: StallPolicy,
}

impl Default for LocalRunOptions {
    fn default() -> Self {
        Self { mh_steps: 1_000, mode: AcceptanceMode::Standard, phase_cap: None, stall: StallPolicy::Freeze }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PhaseRecord {
    pub phase: usize,
    /// Points banked by departed vertices.
    pub welfare: u64,
    /// Banked points plus points held by the remaining vertices.
    pub welfare_so_far: u64,
    pub vertices_remaining: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalRun {
    pub total_welfare: u64,
    pub trace: Vec<PhaseRecord>,
    /// Final color of every original vertex.
    pub final_colors: Vec<usize>,
    /// Vertices that left through a stall freeze, in original ids.
    pub frozen: Vec<usize>,
}

/// Alternate reduction and Metropolis-Hastings resampling until the network
/// is empty. Phase `k` resamples on stream `[k]` under `seed`.
pub fn local_optimal_run(
    graph: &Graph,
    prefs: &PreferenceProfile,
    initial: &Coloring,
    seed: u64,
    opts: LocalRunOptions,
) -> Result<LocalRun> {
    let mut net = BordaNetwork::new(graph.clone(), prefs.clone(), initial.clone())?;
    let cap = opts.phase_cap.unwrap_or(10 * graph.n()).max(1);
    let mut final_colors = initial.colors().to_vec();
    let mut banked = 0u64;
    let mut trace = Vec::new();
    let mut frozen = Vec::new();
    for phase in 1.. {
        let out = reduce_network(&net)?;
        banked += out.payoff_gained;
        net = out.network;
        if !net.is_empty() && opts.stall == StallPolicy::Freeze && net.is_stalled() {
            banked += net.held_points();
            frozen.extend_from_slice(&net.original_ids);
            net = net.compact(&[]);
        }
        let record = PhaseRecord {
            phase,
            welfare: banked,
            welfare_so_far: banked + net.held_points(),
            vertices_remaining: net.len(),
        };
        if let Some(prev) = trace.last().map(|r: &PhaseRecord| r.welfare_so_far) {
            if record.welfare_so_far < prev {
                return Err(Error::InvariantViolation(format!("welfare fell from {prev} to {} in phase {phase}", record.welfare_so_far)));
            }
        }
        trace.push(record);
        if net.is_empty() {
            break;
        }
        if phase >= cap {
            return Err(Error::PhaseCapExceeded { cap, remaining: net.len() });
        }
        resample_phase(&mut net, opts, seed, phase, &mut final_colors)?;
    }
    Ok(LocalRun { total_welfare: banked, trace, final_colors, frozen })
}

fn resample_phase(
    net: &mut BordaNetwork,
    opts: LocalRunOptions,
    seed: u64,
    phase: usize,
    final_colors: &mut [usize],
) -> Result<()> {
    let mut rng = stream(seed, &[phase as u64]);
    let mut sampler = MhSampler::new(&net.graph, &net.coloring, &net.avail, opts.mode)?;
    for _ in 0..opts.mh_steps {
        sampler.step(&mut rng)?;
    }
    let colors = sampler.state().to_vec();
    net.coloring = Coloring::new(colors, net.coloring.q())?;
    for v in 0..net.len() {
        let c = net.coloring.color(v);
        net.avail.truncate_at(v, c)?;
        final_colors[net.original_ids[v]] = c;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimumEstimate {
    pub mean: f64,
    pub max: u64,
    pub samples: Vec<u64>,
}

/// `k` independent local runs; repetition `r` uses seed `derive_seed(seed, [r])`.
pub fn estimate_expected_optimum(
    graph: &Graph,
    prefs: &PreferenceProfile,
    initial: &Coloring,
    k: usize,
    seed: u64,
    opts: LocalRunOptions,
) -> Result<(OptimumEstimate, Vec<LocalRun>)> {
    if k == 0 {
        return Err(Error::InvalidSize("need at least one repetition".into()));
    }
    let runs = (0..k)
        .into_par_iter()
        .map(|r| local_optimal_run(graph, prefs, initial, derive_seed(seed, &[r as u64]), opts))
        .collect::<Result<Vec<_>>>()?;
    let samples: Vec<u64> = runs.iter().map(|r| r.total_welfare).collect();
    let mean = samples.iter().sum::<u64>() as f64 / k as f64;
    let max = *samples.iter().max().expect("k >= 1");
    Ok((OptimumEstimate { mean, max, samples }, runs))
}

pub fn write_phase_trace_csv<W: Write>(mut w: W, header: &[String], trace: &[PhaseRecord]) -> Result<()> {
    let mut out = String::new();
    for line in header {
        let _ = writeln!(out, "# {line}");
    }
    out.push_str("phase,welfare,vertices_remaining,welfare_so_far\n");
    for r in trace {
        let _ = writeln!(out, "{},{},{},{}", r.phase, r.welfare, r.vertices_remaining, r.welfare_so_far);
    }
    w.write_all(out.as_bytes())?;
    Ok(())
}
