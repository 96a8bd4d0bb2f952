//! Metropolis-Hastings over proper in-list colorings and simulated annealing
//! over Borda welfare.
//!
//! Both kernels propose a uniform vertex and then a uniform color from that
//! vertex's list, so forward and reverse proposals of a single-vertex change
//! have equal probability. `Standard` accepts with the usual MH ratio;
//! `Literal` multiplies it by `1 / (n * list size)`, a lazier chain with the
//! same stationary law.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::io::Write;
use std::str::FromStr;

use num_traits::Float;
use rand::Rng;
use serde::Serialize;

use crate::borda::{available_colors, borda_welfare, AvailableColorLists, PreferenceProfile};
use crate::error::{Error, Result};
use crate::graph::{first_conflict, Coloring, Graph};
use crate::rng::seeded;

pub const DEFAULT_ENUMERATION_CAP: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AcceptanceMode {
    #[default]
    Standard,
    Literal,
}

impl FromStr for AcceptanceMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "standard" => Ok(Self::Standard),
            "literal" => Ok(Self::Literal),
            other => Err(Error::InvalidSize(format!("unknown acceptance mode `{other}`"))),
        }
    }
}

/// Shared single-site state: graph, lists, current colors.
#[derive(Debug, Clone)]
struct Site<'g> {
    graph: &'g Graph,
    avail: &'g AvailableColorLists,
    colors: Vec<usize>,
}

impl<'g> Site<'g> {
    fn new(graph: &'g Graph, start: &Coloring, avail: &'g AvailableColorLists) -> Result<Self> {
        start.check_len(graph)?;
        if avail.len() != graph.n() {
            return Err(Error::LengthMismatch { expected: graph.n(), found: avail.len() });
        }
        if let Some((u, v)) = first_conflict(graph, start.colors()) {
            return Err(Error::ImproperColoring(u, v));
        }
        for v in 0..graph.n() {
            if avail.list(v).is_empty() {
                return Err(Error::EmptyAvailableList { vertex: v });
            }
            if !avail.contains(v, start.color(v)) {
                return Err(Error::ColorNotInList { vertex: v, color: start.color(v) });
            }
        }
        Ok(Self { graph, avail, colors: start.colors().to_vec() })
    }

    /// Uniform vertex, then uniform color from its list.
    fn propose<R: Rng + ?Sized>(&self, rng: &mut R) -> (usize, usize, usize) {
        let v = rng.random_range(0..self.graph.n());
        let list = self.avail.list(v);
        (v, list[rng.random_range(0..list.len())], list.len())
    }

    fn fits(&self, v: usize, color: usize) -> bool {
        self.graph.neighbors(v).iter().all(|&w| self.colors[w] != color)
    }

    fn commit(&mut self, v: usize, color: usize) -> Result<()> {
        if !self.fits(v, color) || !self.avail.contains(v, color) {
            return Err(Error::InvariantViolation(format!("accepted infeasible color {color} at vertex {v}")));
        }
        self.colors[v] = color;
        Ok(())
    }

    fn laziness(&self, mode: AcceptanceMode, list_len: usize) -> f64 {
        match mode {
            AcceptanceMode::Standard => 1.0,
            AcceptanceMode::Literal => 1.0 / (self.graph.n() * list_len) as f64,
        }
    }
}

/// Metropolis-Hastings chain whose target is uniform over proper colorings
/// with every vertex in its list.
#[derive(Debug, Clone)]
pub struct MhSampler<'g> {
    site: Site<'g>,
    mode: AcceptanceMode,
}

impl<'g> MhSampler<'g> {
    pub fn new(graph: &'g Graph, start: &Coloring, avail: &'g AvailableColorLists, mode: AcceptanceMode) -> Result<Self> {
        Ok(Self { site: Site::new(graph, start, avail)?, mode })
    }

    /// One proposal. Returns whether the state changed.
    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<bool> {
        if self.site.graph.n() == 0 {
            return Ok(false);
        }
        let (v, color, len) = self.site.propose(rng);
        if color == self.site.colors[v] || !self.site.fits(v, color) {
            return Ok(false);
        }
        if self.mode == AcceptanceMode::Literal && rng.random::<f64>() >= self.site.laziness(self.mode, len) {
            return Ok(false);
        }
        self.site.commit(v, color)?;
        Ok(true)
    }

    pub fn state(&self) -> &[usize] {
        &self.site.colors
    }

    pub fn coloring(&self) -> Coloring {
        Coloring::new(self.site.colors.clone(), self.site.avail.q()).expect("lists are within the palette")
    }
}

/// `steps` proposals from `start` on a ChaCha8 stream seeded with `seed`.
pub fn mh_run(
    graph: &Graph,
    start: &Coloring,
    avail: &AvailableColorLists,
    steps: u64,
    mode: AcceptanceMode,
    seed: u64,
) -> Result<Coloring> {
    let mut sampler = MhSampler::new(graph, start, avail, mode)?;
    let mut rng = seeded(seed);
    for _ in 0..steps {
        sampler.step(&mut rng)?;
    }
    Ok(sampler.coloring())
}

/// Every proper coloring with each vertex in its list, in lexicographic order.
pub fn enumerate_target(graph: &Graph, avail: &AvailableColorLists, cap: usize) -> Result<Vec<Coloring>> {
    if avail.len() != graph.n() {
        return Err(Error::LengthMismatch { expected: graph.n(), found: avail.len() });
    }
    let needed = avail.product_size();
    if needed > cap as f64 {
        return Err(Error::EnumerationTooLarge { needed, cap });
    }
    let n = graph.n();
    let mut idx = vec![0usize; n];
    let mut out = Vec::new();
    loop {
        let colors: Vec<usize> = (0..n).map(|v| avail.list(v)[idx[v]]).collect();
        if first_conflict(graph, &colors).is_none() {
            out.push(Coloring::new(colors, avail.q())?);
        }
        // odometer, last vertex fastest
        let mut v = n;
        loop {
            if v == 0 {
                return Ok(sort_lex(out));
            }
            v -= 1;
            idx[v] += 1;
            if idx[v] < avail.list(v).len() {
                break;
            }
            idx[v] = 0;
        }
    }
}

fn sort_lex(mut states: Vec<Coloring>) -> Vec<Coloring> {
    states.sort_by(|a, b| a.colors().cmp(b.colors()));
    states
}

/// Visit counts over an enumerated target.
#[derive(Debug, Clone)]
pub struct Occupancy {
    index: HashMap<Vec<usize>, usize>,
    counts: Vec<u64>,
}

impl Occupancy {
    pub fn new(target: &[Coloring]) -> Self {
        let index = target.iter().enumerate().map(|(i, c)| (c.colors().to_vec(), i)).collect();
        Self { index, counts: vec![0; target.len()] }
    }

    /// A state outside the target is an invariant violation.
    pub fn record(&mut self, state: &[usize]) -> Result<()> {
        let i = self
            .index
            .get(state)
            .ok_or_else(|| Error::InvariantViolation(format!("chain visited {state:?}, outside the target")))?;
        self.counts[*i] += 1;
        Ok(())
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }
}

/// Temperature `lambda_t`. The first three are non-decreasing in `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TemperatureSchedule<F = f64> {
    /// `ln(1 + t)`
    Log1p,
    /// `t`
    Linear,
    /// `t^2`
    Quadratic,
    Constant { lambda0: F },
    /// `lambda0 * gamma^floor(t / step)`
    Geometric { lambda0: F, gamma: F, step: u64 },
}

impl<F: Float + std::fmt::Debug> TemperatureSchedule<F> {
    /// Log, linear and quadratic growth: the `anneal` defaults.
    pub const BASIC: [TemperatureSchedule<F>; 3] =
        [TemperatureSchedule::Log1p, TemperatureSchedule::Linear, TemperatureSchedule::Quadratic];

    pub fn constant() -> Self {
        Self::Constant { lambda0: F::one() }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            Self::Log1p | Self::Linear | Self::Quadratic => true,
            Self::Constant { lambda0 } => lambda0.is_finite() && lambda0 >= F::zero(),
            Self::Geometric { lambda0, gamma, step } => {
                lambda0.is_finite() && lambda0 >= F::zero() && gamma.is_finite() && gamma > F::zero() && step > 0
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidSchedule(format!("{self:?}")))
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Log1p => "log1p",
            Self::Linear => "linear",
            Self::Quadratic => "quadratic",
            Self::Constant { .. } => "constant",
            Self::Geometric { .. } => "geometric",
        }
    }

    pub fn value(&self, t: u64) -> F {
        let tf = F::from(t).expect("u64 fits a float");
        match *self {
            Self::Log1p => tf.ln_1p(),
            Self::Linear => tf,
            Self::Quadratic => tf * tf,
            Self::Constant { lambda0 } => lambda0,
            Self::Geometric { lambda0, gamma, step } => {
                lambda0 * gamma.powf(F::from(t / step).expect("u64 fits a float"))
            }
        }
    }
}

pub fn schedule_value<F: Float + std::fmt::Debug>(schedule: &TemperatureSchedule<F>, t: u64) -> F {
    schedule.value(t)
}

/// `log1p`, `linear`, `quadratic`, `constant[:lambda0]` or
/// `geometric:lambda0:gamma:step`.
impl FromStr for TemperatureSchedule<f64> {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let num = |x: &str| x.parse::<f64>().map_err(|_| Error::InvalidSchedule(format!("bad number `{x}` in `{s}`")));
        let schedule = match parts.as_slice() {
            ["log1p"] => Self::Log1p,
            ["linear"] => Self::Linear,
            ["quadratic"] => Self::Quadratic,
            ["constant"] => Self::constant(),
            ["constant", l] => Self::Constant { lambda0: num(l)? },
            ["geometric", l, g, k] => Self::Geometric {
                lambda0: num(l)?,
                gamma: num(g)?,
                step: k.parse().map_err(|_| Error::InvalidSchedule(format!("bad step `{k}` in `{s}`")))?,
            },
            _ => return Err(Error::InvalidSchedule(format!("unknown schedule `{s}`"))),
        };
        schedule.validate()?;
        Ok(schedule)
    }
}

/// Annealing kernel on frozen lists, targeting `exp(lambda * h)`.
#[derive(Debug, Clone)]
pub struct SaSampler<'g> {
    site: Site<'g>,
    prefs: &'g PreferenceProfile,
    mode: AcceptanceMode,
    welfare: u64,
}

impl<'g> SaSampler<'g> {
    pub fn new(
        graph: &'g Graph,
        prefs: &'g PreferenceProfile,
        start: &Coloring,
        avail: &'g AvailableColorLists,
        mode: AcceptanceMode,
    ) -> Result<Self> {
        let welfare = borda_welfare(prefs, start)?;
        Ok(Self { site: Site::new(graph, start, avail)?, prefs, mode, welfare })
    }

    /// One proposal at inverse temperature `lambda`.
    pub fn step<F: Float, R: Rng + ?Sized>(&mut self, lambda: F, rng: &mut R) -> Result<bool> {
        if self.site.graph.n() == 0 {
            return Ok(false);
        }
        let (v, color, len) = self.site.propose(rng);
        let old = self.site.colors[v];
        if color == old || !self.site.fits(v, color) {
            return Ok(false);
        }
        let gain = self.prefs.points(v, color) as i64 - self.prefs.points(v, old) as i64;
        let exponent = lambda * F::from(gain).expect("small integer");
        let r = if exponent >= F::zero() { F::one() } else { exponent.exp() };
        let p = r * F::from(self.site.laziness(self.mode, len)).expect("probability");
        if p < F::one() && F::from(rng.random::<f64>()).expect("probability") >= p {
            return Ok(false);
        }
        self.site.commit(v, color)?;
        self.welfare = (self.welfare as i64 + gain) as u64;
        Ok(true)
    }

    pub fn state(&self) -> &[usize] {
        &self.site.colors
    }

    pub fn welfare(&self) -> u64 {
        self.welfare
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SaRecord<F = f64> {
    pub iteration: u64,
    pub lambda: F,
    pub welfare: u64,
    pub accepted: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SaTrace<F = f64> {
    /// Iteration 0 is the starting state; iteration `t >= 1` follows the
    /// proposal made at temperature `lambda_{t-1}`.
    pub records: Vec<SaRecord<F>>,
    pub best_welfare: u64,
    pub best_assignment: Coloring,
    /// First iteration at which `best_welfare` was reached.
    pub reaching_time: u64,
}

/// Annealing for `steps` iterations. Lists are frozen at the start as the
/// preference prefixes down to each starting color; nobody leaves.
pub fn sa_run<F: Float + std::fmt::Debug>(
    graph: &Graph,
    prefs: &PreferenceProfile,
    start: &Coloring,
    steps: u64,
    schedule: TemperatureSchedule<F>,
    mode: AcceptanceMode,
    seed: u64,
) -> Result<SaTrace<F>> {
    schedule.validate()?;
    let avail = available_colors(prefs, start)?;
    let mut sampler = SaSampler::new(graph, prefs, start, &avail, mode)?;
    let mut rng = seeded(seed);
    let mut records = Vec::with_capacity(steps as usize + 1);
    records.push(SaRecord { iteration: 0, lambda: schedule.value(0), welfare: sampler.welfare(), accepted: false });
    let mut best = (sampler.welfare(), 0, start.clone());
    for t in 0..steps {
        let lambda = schedule.value(t);
        let accepted = sampler.step(lambda, &mut rng)?;
        let welfare = sampler.welfare();
        records.push(SaRecord { iteration: t + 1, lambda, welfare, accepted });
        if welfare > best.0 {
            best = (welfare, t + 1, Coloring::new(sampler.state().to_vec(), start.q())?);
        }
    }
    Ok(SaTrace { records, best_welfare: best.0, best_assignment: best.2, reaching_time: best.1 })
}

/// Target probabilities proportional to `exp(lambda * h(x))`.
pub fn annealing_weights(prefs: &PreferenceProfile, target: &[Coloring], lambda: f64) -> Result<Vec<f64>> {
    let h = target.iter().map(|x| borda_welfare(prefs, x)).collect::<Result<Vec<_>>>()?;
    let top = h.iter().copied().max().unwrap_or(0) as f64;
    let w: Vec<f64> = h.iter().map(|&v| (lambda * (v as f64 - top)).exp()).collect();
    let total: f64 = w.iter().sum();
    Ok(w.into_iter().map(|x| x / total).collect())
}

pub fn write_sa_trace_csv<F: Float + std::fmt::Display, W: Write>(
    mut w: W,
    header: &[String],
    trace: &SaTrace<F>,
) -> Result<()> {
    let mut out = String::new();
    for line in header {
        let _ = writeln!(out, "# {line}");
    }
    out.push_str("iteration,lambda,welfare,accepted\n");
    for r in &trace.records {
        let _ = writeln!(out, "{},{},{},{}", r.iteration, r.lambda, r.welfare, u8::from(r.accepted));
    }
    w.write_all(out.as_bytes())?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;
    use crate::stats::{chi_square_gof, chi_square_uniform};
    use proptest::prelude::*;

    fn k2_full() -> (Graph, AvailableColorLists, Coloring) {
        (Graph::complete(2), AvailableColorLists::full(2, 3), Coloring::new(vec![0, 1], 3).unwrap())
    }

    #[test]
    fn schedule_examples() {
        assert_eq!(schedule_value(&TemperatureSchedule::<f64>::Log1p, 0), 0.0);
        assert_eq!(schedule_value(&TemperatureSchedule::<f64>::Linear, 7), 7.0);
        assert_eq!(schedule_value(&TemperatureSchedule::<f64>::Quadratic, 3), 9.0);
        assert_eq!(schedule_value(&TemperatureSchedule::<f32>::Quadratic, 3), 9.0f32);
        let g = TemperatureSchedule::Geometric { lambda0: 2.0, gamma: 1.5, step: 10 };
        assert_eq!((g.value(9), g.value(10), g.value(25)), (2.0, 3.0, 4.5));
        assert_eq!(TemperatureSchedule::<f64>::constant().value(1000), 1.0);
        assert!(TemperatureSchedule::Constant { lambda0: -1.0 }.validate().is_err());
        assert!(TemperatureSchedule::Geometric { lambda0: 1.0, gamma: 1.1, step: 0 }.validate().is_err());
    }

    #[test]
    fn schedule_parsing() {
        assert_eq!("linear".parse::<TemperatureSchedule>().unwrap(), TemperatureSchedule::Linear);
        assert_eq!(
            "constant:0.5".parse::<TemperatureSchedule>().unwrap(),
            TemperatureSchedule::Constant { lambda0: 0.5 }
        );
        assert!("geometric:1:0:3".parse::<TemperatureSchedule>().is_err());
        assert!("cubic".parse::<TemperatureSchedule>().is_err());
    }

    #[test]
    fn enumeration_counts() {
        let (g, avail, start) = k2_full();
        let target = enumerate_target(&g, &avail, DEFAULT_ENUMERATION_CAP).unwrap();
        assert_eq!(target.len(), 6);
        assert!(target.contains(&start));
        let k3 = enumerate_target(&Graph::complete(3), &AvailableColorLists::full(3, 3), 1000).unwrap();
        assert_eq!(k3.len(), 6);
        assert!(matches!(
            enumerate_target(&Graph::empty(7), &AvailableColorLists::full(7, 10), DEFAULT_ENUMERATION_CAP),
            Err(Error::EnumerationTooLarge { .. })
        ));
    }

    #[test]
    fn singleton_lists_and_zero_steps_keep_start() {
        let g = Graph::path(3);
        let avail = AvailableColorLists::new(vec![vec![2], vec![0], vec![1]], 3).unwrap();
        let start = Coloring::new(vec![2, 0, 1], 3).unwrap();
        assert_eq!(mh_run(&g, &start, &avail, 10_000, AcceptanceMode::Standard, 1).unwrap(), start);
        let (g, avail, start) = k2_full();
        assert_eq!(mh_run(&g, &start, &avail, 0, AcceptanceMode::Literal, 1).unwrap(), start);
    }

    #[test]
    fn refusals() {
        let (g, avail, _) = k2_full();
        let bad = Coloring::new(vec![1, 1], 3).unwrap();
        assert!(matches!(mh_run(&g, &bad, &avail, 1, AcceptanceMode::Standard, 0), Err(Error::ImproperColoring(0, 1))));
        let narrow = AvailableColorLists::new(vec![vec![0], vec![2]], 3).unwrap();
        let start = Coloring::new(vec![0, 1], 3).unwrap();
        assert!(matches!(
            mh_run(&g, &start, &narrow, 1, AcceptanceMode::Standard, 0),
            Err(Error::ColorNotInList { vertex: 1, color: 1 })
        ));
        assert!(matches!(AvailableColorLists::new(vec![vec![]], 3), Err(Error::EmptyAvailableList { vertex: 0 })));
    }

    #[test]
    fn k2_occupancy_is_uniform() {
        let (g, avail, start) = k2_full();
        let target = enumerate_target(&g, &avail, 100).unwrap();
        for mode in [AcceptanceMode::Standard, AcceptanceMode::Literal] {
            let mut occ = Occupancy::new(&target);
            let mut mh = MhSampler::new(&g, &start, &avail, mode).unwrap();
            let mut rng = stream(17, &[mode as u64]);
            let thin = if mode == AcceptanceMode::Standard { 8 } else { 48 };
            for _ in 0..20_000 {
                for _ in 0..thin {
                    mh.step(&mut rng).unwrap();
                }
                occ.record(mh.state()).unwrap();
            }
            assert!(chi_square_uniform(occ.counts()).p_value > 0.01, "{mode:?}: {:?}", occ.counts());
        }
    }

    #[test]
    fn annealing_at_fixed_lambda_matches_weights() {
        let g = Graph::path(3);
        let prefs = PreferenceProfile::new(vec![vec![0, 1, 2, 3], vec![1, 0, 3, 2], vec![3, 2, 1, 0]], 4).unwrap();
        let start = Coloring::new(vec![3, 2, 0], 4).unwrap();
        let avail = available_colors(&prefs, &start).unwrap();
        let target = enumerate_target(&g, &avail, 1000).unwrap();
        let probs = annealing_weights(&prefs, &target, 0.5).unwrap();
        let mut sa = SaSampler::new(&g, &prefs, &start, &avail, AcceptanceMode::Standard).unwrap();
        let mut occ = Occupancy::new(&target);
        let mut rng = seeded(5);
        for _ in 0..20_000 {
            for _ in 0..20 {
                sa.step(0.5, &mut rng).unwrap();
            }
            occ.record(sa.state()).unwrap();
        }
        assert!(chi_square_gof(occ.counts(), &probs).p_value > 0.01);
    }

    #[test]
    fn sa_trace_bookkeeping() {
        let g = Graph::path(4);
        let prefs = PreferenceProfile::random(4, 5, &mut seeded(3));
        let start = Coloring::new(vec![prefs.row(0)[4], prefs.row(1)[3], prefs.row(2)[4], prefs.row(3)[3]], 5).unwrap();
        let start = if crate::graph::is_proper(&g, &start).unwrap() { start } else { Coloring::new(vec![0, 1, 0, 1], 5).unwrap() };
        let trace = sa_run(&g, &prefs, &start, 2_000, TemperatureSchedule::<f64>::Log1p, AcceptanceMode::Standard, 8).unwrap();
        assert_eq!(trace.records.len(), 2_001);
        let max = trace.records.iter().map(|r| r.welfare).max().unwrap();
        assert_eq!(trace.best_welfare, max);
        let first = trace.records.iter().find(|r| r.welfare == max).unwrap().iteration;
        assert_eq!(trace.reaching_time, first);
        assert_eq!(borda_welfare(&prefs, &trace.best_assignment).unwrap(), max);
        assert!(max <= 4 * 4);
    }

    #[test]
    fn sa_trace_csv_layout() {
        let start = Coloring::new(vec![0], 2).unwrap();
        let prefs = PreferenceProfile::new(vec![vec![0, 1]], 2).unwrap();
        let trace = sa_run(&Graph::empty(1), &prefs, &start, 1, TemperatureSchedule::<f64>::Linear, AcceptanceMode::Standard, 0).unwrap();
        let mut buf = Vec::new();
        write_sa_trace_csv(&mut buf, &[], &trace).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "iteration,lambda,welfare,accepted\n0,0,1,0\n1,0,1,0\n");
    }

    fn random_instance(seed: u64) -> (Graph, PreferenceProfile, Coloring) {
        let g = crate::graph::generate_er(6, 0.4, seed).unwrap();
        let q = g.max_degree() + 2;
        let l = crate::game::play_to_convergence(&g, q, seed, 10_000).unwrap().final_state.assignment().clone();
        (g, PreferenceProfile::random(6, q, &mut seeded(!seed)), l)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn mh_output_is_feasible_and_never_worse_on_prefix_lists(seed in any::<u64>(), literal in any::<bool>()) {
            let (g, prefs, l) = random_instance(seed);
            let avail = available_colors(&prefs, &l).unwrap();
            let mode = if literal { AcceptanceMode::Literal } else { AcceptanceMode::Standard };
            let out = mh_run(&g, &l, &avail, 500, mode, seed).unwrap();
            prop_assert!(crate::graph::is_proper(&g, &out).unwrap());
            prop_assert!((0..g.n()).all(|v| avail.contains(v, out.color(v))));
            prop_assert!(borda_welfare(&prefs, &out).unwrap() >= borda_welfare(&prefs, &l).unwrap());
        }

        #[test]
        fn sa_visits_only_feasible_states(seed in any::<u64>(), pick in 0usize..3) {
            let (g, prefs, l) = random_instance(seed);
            let schedule = TemperatureSchedule::<f64>::BASIC[pick];
            let trace = sa_run(&g, &prefs, &l, 300, schedule, AcceptanceMode::Standard, seed).unwrap();
            let ceiling = ((prefs.q() - 1) * g.n()) as u64;
            prop_assert!(trace.records.iter().all(|r| r.welfare <= ceiling));
            prop_assert!(crate::graph::is_proper(&g, &trace.best_assignment).unwrap());
        }

        #[test]
        fn proposal_is_symmetric(seed in any::<u64>()) {
            // a single-vertex move and its reverse share the vertex and its list
            let (g, prefs, l) = random_instance(seed);
            let avail = available_colors(&prefs, &l).unwrap();
            for v in 0..g.n() {
                let forward = 1.0 / (g.n() * avail.list(v).len()) as f64;
                for &c in avail.list(v) {
                    prop_assert!(avail.contains(v, c));
                    let reverse = 1.0 / (g.n() * avail.list(v).len()) as f64;
                    prop_assert_eq!(forward, reverse);
                }
            }
        }

        #[test]
        fn schedules_are_nonnegative_and_nondecreasing(t in 0u64..1_000_000) {
            for s in TemperatureSchedule::<f64>::BASIC {
                prop_assert!(s.value(t) >= 0.0);
                prop_assert!(s.value(t + 1) >= s.value(t));
            }
        }
    }
}
