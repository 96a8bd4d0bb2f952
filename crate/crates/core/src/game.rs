//! Greedy/selfish round engine of the network coloring game.
//!
//! Every round, each unsatisfied vertex redraws uniformly from the colors its
//! neighbors did not hold in the previous round; satisfied vertices keep
//! their color. All redraws read the same prior snapshot.

use std::fmt::Write as _;
use std::io::Write;

use num_traits::Float;
use rand::Rng;

use crate::error::{Error, Result, RoundStats};
use crate::graph::{conflict_edges, Coloring, Graph};
use crate::rng;

/// Entry `i` is true iff no neighbor of `i` shares its color. Isolated
/// vertices are always satisfied.
pub fn payoff_vector(g: &Graph, coloring: &Coloring) -> Result<Vec<bool>> {
    coloring.check_len(g)?;
    Ok(payoffs_of(g, coloring.colors()))
}

fn payoffs_of(g: &Graph, colors: &[usize]) -> Vec<bool> {
    (0..g.n()).map(|v| g.neighbors(v).iter().all(|&w| colors[w] != colors[v])).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameState {
    assignment: Coloring,
    payoffs: Vec<bool>,
    round: usize,
}

impl GameState {
    pub fn new(g: &Graph, assignment: Coloring) -> Result<Self> {
        let payoffs = payoff_vector(g, &assignment)?;
        Ok(Self { assignment, payoffs, round: 0 })
    }

    /// State with caller-supplied payoffs, used to probe the engine with
    /// configurations greedy play cannot reach on its own.
    pub fn with_payoffs(assignment: Coloring, payoffs: Vec<bool>) -> Result<Self> {
        if payoffs.len() != assignment.len() {
            return Err(Error::LengthMismatch { expected: assignment.len(), found: payoffs.len() });
        }
        Ok(Self { assignment, payoffs, round: 0 })
    }

    pub fn assignment(&self) -> &Coloring {
        &self.assignment
    }

    pub fn payoffs(&self) -> &[bool] {
        &self.payoffs
    }

    pub fn round(&self) -> usize {
        self.round
    }

    pub fn satisfied_count(&self) -> usize {
        self.payoffs.iter().filter(|&&p| p).count()
    }

    pub fn is_absorbed(&self) -> bool {
        self.payoffs.iter().all(|&p| p)
    }

    fn stats(&self, g: &Graph) -> RoundStats {
        RoundStats {
            round: self.round,
            satisfied: self.satisfied_count(),
            conflict_edges: conflict_edges(g, self.assignment.colors()),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct PlayOptions {
    pub max_rounds: usize,
    pub record_trajectory: bool,
}

impl Default for PlayOptions {
    fn default() -> Self {
        Self { max_rounds: 1_000_000, record_trajectory: false }
    }
}

#[derive(Debug, Clone)]
pub struct ConvergenceResult {
    /// Update rounds after the initial draw.
    pub rounds: usize,
    pub final_state: GameState,
    /// Round 0 (the initial draw) through the absorbing round, when recorded.
    pub trajectory: Option<Vec<RoundStats>>,
}

/// The round engine bound to one graph and palette.
#[derive(Debug, Clone, Copy)]
pub struct Dynamics<'g> {
    graph: &'g Graph,
    q: usize,
}

impl<'g> Dynamics<'g> {
    /// Refuses palettes with `q < max_degree + 2`.
    pub fn new(graph: &'g Graph, q: usize) -> Result<Self> {
        let max_degree = graph.max_degree();
        if q < max_degree + 2 {
            return Err(Error::PaletteTooSmall { q, max_degree });
        }
        Ok(Self { graph, q })
    }

    /// Any non-empty palette. With `q <= max_degree + 1` play may never end,
    /// and a vertex whose neighbors exhaust the palette keeps its color.
    pub fn with_any_palette(graph: &'g Graph, q: usize) -> Result<Self> {
        if q == 0 {
            return Err(Error::InvalidSize("palette must have at least one color".into()));
        }
        Ok(Self { graph, q })
    }

    pub fn graph(&self) -> &'g Graph {
        self.graph
    }

    pub fn q(&self) -> usize {
        self.q
    }

    /// Each vertex draws independently and uniformly from all `q` colors.
    pub fn initial_assignment<R: Rng + ?Sized>(&self, rng: &mut R) -> Coloring {
        let colors = (0..self.graph.n()).map(|_| rng.random_range(0..self.q)).collect();
        Coloring::new(colors, self.q).expect("draws are in range")
    }

    /// One simultaneous round. Checks that no satisfied vertex loses its
    /// payoff and that every redraw avoids the prior neighbor colors.
    pub fn round_update<R: Rng + ?Sized>(&self, state: &GameState, rng: &mut R) -> Result<GameState> {
        let g = self.graph;
        let prior = state.assignment.colors();
        if prior.len() != g.n() || state.assignment.q() != self.q {
            return Err(Error::DimensionMismatch("state does not match the engine's graph or palette".into()));
        }
        let mut next = state.assignment.clone();
        // stamp[c] == v + 1 marks color c as held by a neighbor of v
        let mut stamp = vec![0usize; self.q];
        let mut redrawn = vec![false; g.n()];
        for v in 0..g.n() {
            if state.payoffs[v] {
                continue;
            }
            let mut blocked = 0;
            for &w in g.neighbors(v) {
                let c = prior[w];
                if stamp[c] != v + 1 {
                    stamp[c] = v + 1;
                    blocked += 1;
                }
            }
            let open = self.q - blocked;
            if open == 0 {
                continue;
            }
            let pick = rng.random_range(0..open);
            let color = (0..self.q).filter(|&c| stamp[c] != v + 1).nth(pick).expect("pick < open");
            next.set(v, color);
            redrawn[v] = true;
        }

        let payoffs = payoffs_of(g, next.colors());
        for v in 0..g.n() {
            if state.payoffs[v] && !payoffs[v] {
                return Err(Error::InvariantViolation(format!(
                    "vertex {v} lost its payoff in round {}",
                    state.round + 1
                )));
            }
            if redrawn[v] && g.neighbors(v).iter().any(|&w| prior[w] == next.color(v)) {
                return Err(Error::InvariantViolation(format!(
                    "vertex {v} redrew a color held by a neighbor in round {}",
                    state.round
                )));
            }
        }
        Ok(GameState { assignment: next, payoffs, round: state.round + 1 })
    }

    pub fn run_from<R: Rng + ?Sized>(
        &self,
        initial: Coloring,
        rng: &mut R,
        opts: PlayOptions,
    ) -> Result<ConvergenceResult> {
        let mut state = GameState::new(self.graph, initial)?;
        let mut trajectory = opts.record_trajectory.then(|| vec![state.stats(self.graph)]);
        while !state.is_absorbed() {
            if state.round >= opts.max_rounds {
                return Err(Error::Timeout { rounds: state.round, trajectory: trajectory.unwrap_or_default() });
            }
            state = self.round_update(&state, rng)?;
            if let Some(t) = trajectory.as_mut() {
                t.push(state.stats(self.graph));
            }
        }
        Ok(ConvergenceResult { rounds: state.round, final_state: state, trajectory })
    }

    /// Uniform initial draw followed by rounds until absorption, all from
    /// one ChaCha8 stream seeded with `seed`.
    pub fn play(&self, seed: u64, opts: PlayOptions) -> Result<ConvergenceResult> {
        let mut rng = rng::seeded(seed);
        let initial = self.initial_assignment(&mut rng);
        self.run_from(initial, &mut rng, opts)
    }
}

pub fn round_update<R: Rng + ?Sized>(g: &Graph, state: &GameState, q: usize, rng: &mut R) -> Result<GameState> {
    Dynamics::new(g, q)?.round_update(state, rng)
}

pub fn play_to_convergence(g: &Graph, q: usize, seed: u64, max_rounds: usize) -> Result<ConvergenceResult> {
    Dynamics::new(g, q)?.play(seed, PlayOptions { max_rounds, record_trajectory: true })
}

/// Worst-case one-round resolution probability `(1 - 1/(q - Δ))^Δ`.
pub fn satisfaction_lower_bound<F: Float>(q: usize, max_degree: usize) -> Result<F> {
    if q < max_degree + 2 {
        return Err(Error::PaletteTooSmall { q, max_degree });
    }
    let free = F::from(q - max_degree).expect("palette fits the float type");
    let base = F::one() - F::one() / free;
    Ok(base.powi(max_degree as i32))
}

/// Observed `(unsatisfied at t) -> (satisfied at t+1)` transitions of one vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ResolutionTally {
    pub unsatisfied_rounds: u64,
    pub resolved: u64,
}

impl ResolutionTally {
    pub fn frequency(&self) -> f64 {
        self.resolved as f64 / self.unsatisfied_rounds as f64
    }

    /// Binomial standard error of [`Self::frequency`].
    pub fn std_error(&self) -> f64 {
        let p = self.frequency();
        (p * (1.0 - p) / self.unsatisfied_rounds as f64).sqrt()
    }
}

/// Play independent games (trial `t` uses stream `[t]` under `seed`) until
/// every non-isolated vertex has been unsatisfied in at least
/// `min_observations` rounds.
pub fn resolution_tally(g: &Graph, q: usize, min_observations: u64, seed: u64) -> Result<Vec<ResolutionTally>> {
    let dynamics = Dynamics::new(g, q)?;
    let mut tally = vec![ResolutionTally::default(); g.n()];
    let needs_more =
        |tally: &[ResolutionTally]| (0..g.n()).any(|v| g.degree(v) > 0 && tally[v].unsatisfied_rounds < min_observations);
    let mut trial = 0u64;
    while needs_more(&tally) {
        let mut rng = rng::stream(seed, &[trial]);
        let mut state = GameState::new(g, dynamics.initial_assignment(&mut rng))?;
        while !state.is_absorbed() {
            let next = dynamics.round_update(&state, &mut rng)?;
            for (v, t) in tally.iter_mut().enumerate() {
                if !state.payoffs[v] {
                    t.unsatisfied_rounds += 1;
                    t.resolved += u64::from(next.payoffs[v]);
                }
            }
            state = next;
        }
        trial += 1;
    }
    Ok(tally)
}

pub fn write_trajectory_csv<W: Write>(mut w: W, header: &[String], trajectory: &[RoundStats]) -> Result<()> {
    let mut out = String::new();
    for line in header {
        let _ = writeln!(out, "# {line}");
    }
    out.push_str("round,satisfied_count,conflict_edge_count\n");
    for r in trajectory {
        let _ = writeln!(out, "{},{},{}", r.round, r.satisfied, r.conflict_edges);
    }
    w.write_all(out.as_bytes())?;
    Ok(())
}
