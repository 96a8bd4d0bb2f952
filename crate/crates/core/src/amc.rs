//! Exact absorbing-chain analysis of greedy play on small instances.
//!
//! The chain lives on all `q^n` color configurations. Proper configurations
//! are absorbing; from any other configuration each unsatisfied vertex moves
//! independently and uniformly to a color none of its neighbors holds, so
//! every reachable successor of a row carries the same probability.
//! Configuration `s` encodes vertex `v`'s color as the `v`-th base-`q` digit.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::linalg::Matrix;
use crate::scalar::Scalar;

pub const DEFAULT_STATE_CAP: usize = 200_000;
pub const DEFAULT_DENSE_CAP: usize = 2_048;
/// Pivot magnitude treated as zero when inverting `I - Q`.
pub const SINGULAR_TOL: f64 = 1e-13;
/// Negative variances down to this are rounding noise and clamp to zero.
pub const VARIANCE_CLAMP_TOL: f64 = 1e-9;
pub const DECAY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy)]
pub struct ChainOptions {
    pub state_cap: usize,
    pub allow_small_palette: bool,
}

impl Default for ChainOptions {
    fn default() -> Self {
        Self { state_cap: DEFAULT_STATE_CAP, allow_small_palette: false }
    }
}

/// All `q^n` configurations with their absorbing flags.
#[derive(Debug, Clone)]
pub struct StateSpace {
    n: usize,
    q: usize,
    absorbing_mask: Vec<bool>,
}

impl StateSpace {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn len(&self) -> usize {
        self.absorbing_mask.len()
    }

    pub fn is_empty(&self) -> bool {
        self.absorbing_mask.is_empty()
    }

    pub fn absorbing_mask(&self) -> &[bool] {
        &self.absorbing_mask
    }

    pub fn decode(&self, mut state: usize) -> Vec<usize> {
        (0..self.n)
            .map(|_| {
                let c = state % self.q;
                state /= self.q;
                c
            })
            .collect()
    }

    pub fn encode(&self, colors: &[usize]) -> usize {
        colors.iter().rev().fold(0, |acc, &c| acc * self.q + c)
    }
}

/// Where a configuration sits in the canonical ordering.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Position {
    Transient(usize),
    Absorbing(usize),
}

/// Transition matrix in canonical form: `Q` (transient to transient) and
/// `R` (transient to absorbing), both stored row-sparse.
#[derive(Debug, Clone)]
pub struct CanonicalChain<T> {
    transient: Vec<usize>,
    absorbing: Vec<usize>,
    positions: Vec<Position>,
    q_rows: Vec<Vec<(usize, T)>>,
    r_rows: Vec<Vec<(usize, T)>>,
}

impl<T: Scalar> CanonicalChain<T> {
    pub fn transient_count(&self) -> usize {
        self.transient.len()
    }

    pub fn absorbing_count(&self) -> usize {
        self.absorbing.len()
    }

    /// State id of the `i`-th transient state.
    pub fn transient_state(&self, i: usize) -> usize {
        self.transient[i]
    }

    pub fn absorbing_state(&self, j: usize) -> usize {
        self.absorbing[j]
    }

    pub fn position(&self, state: usize) -> Position {
        self.positions[state]
    }

    pub fn q_row(&self, i: usize) -> &[(usize, T)] {
        &self.q_rows[i]
    }

    pub fn r_row(&self, i: usize) -> &[(usize, T)] {
        &self.r_rows[i]
    }

    pub fn q_block(&self) -> Matrix<T> {
        let t = self.transient_count();
        let mut m = Matrix::zeros(t, t);
        for (i, row) in self.q_rows.iter().enumerate() {
            for (j, p) in row {
                m[(i, *j)] = p.clone();
            }
        }
        m
    }

    pub fn r_block(&self) -> Matrix<T> {
        let mut m = Matrix::zeros(self.transient_count(), self.absorbing_count());
        for (i, row) in self.r_rows.iter().enumerate() {
            for (j, p) in row {
                m[(i, *j)] = p.clone();
            }
        }
        m
    }

    /// Largest `|1 - sum_j [Q | R]_ij|` over transient rows.
    pub fn max_row_defect(&self) -> T {
        self.q_rows
            .iter()
            .zip(&self.r_rows)
            .map(|(q, r)| {
                let sum = q.iter().chain(r).fold(T::zero(), |acc, (_, p)| acc + p.clone());
                (T::one() - sum).abs()
            })
            .fold(T::zero(), |m, x| if x > m { x } else { m })
    }

    /// Successors of a state as `(state id, probability)`; absorbing states
    /// return themselves with probability one.
    pub fn successors(&self, state: usize) -> Vec<(usize, T)> {
        match self.positions[state] {
            Position::Absorbing(_) => vec![(state, T::one())],
            Position::Transient(i) => self.q_rows[i]
                .iter()
                .map(|(j, p)| (self.transient[*j], p.clone()))
                .chain(self.r_rows[i].iter().map(|(j, p)| (self.absorbing[*j], p.clone())))
                .collect(),
        }
    }
}

fn unsatisfied(g: &Graph, colors: &[usize]) -> Vec<usize> {
    (0..g.n()).filter(|&v| g.neighbors(v).iter().any(|&w| colors[w] == colors[v])).collect()
}

/// Successor configurations of `colors` under one greedy round, each
/// reached with probability `1 / outcomes`.
fn successor_states(g: &Graph, space: &StateSpace, colors: &[usize]) -> (Vec<usize>, usize) {
    let movers = unsatisfied(g, colors);
    let options: Vec<Vec<usize>> = movers
        .iter()
        .map(|&v| {
            let open: Vec<usize> =
                (0..space.q).filter(|&c| g.neighbors(v).iter().all(|&w| colors[w] != c)).collect();
            // an exhausted palette leaves the vertex where it is
            if open.is_empty() {
                vec![colors[v]]
            } else {
                open
            }
        })
        .collect();
    let outcomes: usize = options.iter().map(Vec::len).product();
    let mut digits = vec![0usize; movers.len()];
    let mut next = colors.to_vec();
    let mut targets = Vec::with_capacity(outcomes);
    for _ in 0..outcomes {
        for (k, &v) in movers.iter().enumerate() {
            next[v] = options[k][digits[k]];
        }
        targets.push(space.encode(&next));
        for k in 0..digits.len() {
            digits[k] += 1;
            if digits[k] < options[k].len() {
                break;
            }
            digits[k] = 0;
        }
    }
    (targets, outcomes)
}

/// Enumerate the configuration chain of greedy play on `g` with `q` colors.
pub fn build_chain<T: Scalar>(g: &Graph, q: usize, opts: ChainOptions) -> Result<(StateSpace, CanonicalChain<T>)> {
    let n = g.n();
    if q == 0 {
        return Err(Error::InvalidSize("palette must have at least one color".into()));
    }
    let max_degree = g.max_degree();
    if !opts.allow_small_palette && q < max_degree + 2 {
        return Err(Error::PaletteTooSmall { q, max_degree });
    }
    let states = (q as f64).powi(n as i32);
    let count = u32::try_from(n)
        .ok()
        .and_then(|e| q.checked_pow(e))
        .filter(|&c| c <= opts.state_cap)
        .ok_or(Error::StateSpaceTooLarge { q, n, states, cap: opts.state_cap })?;

    let probe = StateSpace { n, q, absorbing_mask: Vec::new() };
    let absorbing_mask: Vec<bool> = (0..count).map(|s| unsatisfied(g, &probe.decode(s)).is_empty()).collect();
    let space = StateSpace { n, q, absorbing_mask };

    let mut transient = Vec::new();
    let mut absorbing = Vec::new();
    let positions: Vec<Position> = space
        .absorbing_mask
        .iter()
        .enumerate()
        .map(|(s, &abs)| {
            if abs {
                absorbing.push(s);
                Position::Absorbing(absorbing.len() - 1)
            } else {
                transient.push(s);
                Position::Transient(transient.len() - 1)
            }
        })
        .collect();

    let mut q_rows = Vec::with_capacity(transient.len());
    let mut r_rows = Vec::with_capacity(transient.len());
    for &s in &transient {
        let (targets, outcomes) = successor_states(g, &space, &space.decode(s));
        let p = T::ratio(1, outcomes);
        let mut q_row: BTreeMap<usize, usize> = BTreeMap::new();
        let mut r_row: BTreeMap<usize, usize> = BTreeMap::new();
        for t in targets {
            match positions[t] {
                Position::Transient(j) => *q_row.entry(j).or_default() += 1,
                Position::Absorbing(j) => *r_row.entry(j).or_default() += 1,
            }
        }
        let weigh = |row: BTreeMap<usize, usize>| -> Vec<(usize, T)> {
            row.into_iter().map(|(j, hits)| (j, T::from_usize(hits).expect("count fits") * p.clone())).collect()
        };
        q_rows.push(weigh(q_row));
        r_rows.push(weigh(r_row));
    }
    Ok((space, CanonicalChain { transient, absorbing, positions, q_rows, r_rows }))
}

/// `N = (I - Q)^{-1}`, verified against `N (I - Q) = I`.
pub fn fundamental_matrix<T: Scalar>(chain: &CanonicalChain<T>) -> Result<Matrix<T>> {
    fundamental_matrix_capped(chain, DEFAULT_DENSE_CAP)
}

pub fn fundamental_matrix_capped<T: Scalar>(chain: &CanonicalChain<T>, dense_cap: usize) -> Result<Matrix<T>> {
    let t = chain.transient_count();
    if t > dense_cap {
        return Err(Error::DenseSolveTooLarge { transient: t, cap: dense_cap });
    }
    let i_minus_q = Matrix::identity(t).sub(&chain.q_block())?;
    let n = i_minus_q.inverse(SINGULAR_TOL)?;
    let residual = n.mul(&i_minus_q)?.sub(&Matrix::identity(t))?.max_abs();
    if !residual.within(T::residual_tol()) {
        return Err(Error::Numerical(format!("N(I - Q) - I has max residual {residual:?}")));
    }
    Ok(n)
}

/// Expected steps to absorption from each transient state: row sums of `N`.
pub fn expected_absorption<T: Scalar>(n: &Matrix<T>) -> Vec<T> {
    n.row_sums()
}

#[derive(Debug, Clone, PartialEq)]
pub struct AbsorptionSummary<T> {
    pub expected_steps: Vec<T>,
    pub second_moment: Vec<T>,
    pub variance: Vec<T>,
}

/// `E[X^2] = (2N - I) n` and `Var = E[X^2] - n^2` from first-step analysis.
pub fn absorption_variance<T: Scalar>(n_matrix: &Matrix<T>, expected: &[T]) -> Result<AbsorptionSummary<T>> {
    let t = n_matrix.rows();
    if n_matrix.cols() != t || expected.len() != t {
        return Err(Error::DimensionMismatch(format!(
            "N is {}x{}, expected-steps vector has {} entries",
            t,
            n_matrix.cols(),
            expected.len()
        )));
    }
    let two_n = n_matrix.add(n_matrix)?;
    let second_moment = two_n.sub(&Matrix::identity(t))?.mul_vec(expected)?;
    let variance = second_moment
        .iter()
        .zip(expected)
        .enumerate()
        .map(|(i, (m2, m1))| {
            let v = m2.clone() - m1.clone() * m1.clone();
            if v >= T::zero() {
                Ok(v)
            } else if v.within(VARIANCE_CLAMP_TOL) {
                Ok(T::zero())
            } else {
                Err(Error::Numerical(format!("variance of transient state {i} is {v:?}")))
            }
        })
        .collect::<Result<Vec<T>>>()?;
    Ok(AbsorptionSummary { expected_steps: expected.to_vec(), second_moment, variance })
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct DecayCheckpoint {
    pub t: u64,
    /// Largest entry of `Q^t`.
    pub max_entry: f64,
    /// Smallest probability, over transient starts, of absorption within `t` steps.
    pub min_absorbed_mass: f64,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct LimitReport {
    pub checkpoints: Vec<DecayCheckpoint>,
    pub passed: bool,
}

/// Track `Q^t` at doubling `t` (and at `t_max` itself) and check that it
/// vanishes while the absorbed mass of every row approaches one.
pub fn limit_distribution_check<T: Scalar>(chain: &CanonicalChain<T>, t_max: u64) -> Result<LimitReport> {
    let q = chain.q_block();
    let mut ts: Vec<u64> = std::iter::successors(Some(1u64), |t| t.checked_mul(2)).take_while(|&t| t <= t_max).collect();
    if t_max > 0 && ts.last() != Some(&t_max) {
        ts.push(t_max);
    }
    let mut checkpoints = Vec::with_capacity(ts.len());
    let mut power = Matrix::identity(q.rows());
    let mut at = 0;
    for t in ts {
        power = power.mul(&q.pow(t - at)?)?;
        at = t;
        let max_row = power.row_sums().into_iter().fold(T::zero(), |m, x| if x > m { x } else { m });
        checkpoints.push(DecayCheckpoint {
            t,
            max_entry: power.max_abs().to_f64().unwrap_or(f64::NAN),
            min_absorbed_mass: (T::one() - max_row).to_f64().unwrap_or(f64::NAN),
        });
    }
    let passed = chain.transient_count() == 0
        || checkpoints
            .last()
            .is_some_and(|c| c.max_entry < DECAY_TOL && c.min_absorbed_mass >= 1.0 - DECAY_TOL);
    Ok(LimitReport { checkpoints, passed })
}

fn satisfied_mask(g: &Graph, colors: &[usize]) -> u64 {
    (0..g.n())
        .filter(|&v| g.neighbors(v).iter().all(|&w| colors[w] != colors[v]))
        .fold(0u64, |m, v| m | (1 << v))
}

/// Every positive transition keeps or enlarges the satisfied-vertex set.
/// Returns the first offending `(from, to)` pair, if any.
pub fn payoff_monotonicity_violation<T: Scalar>(
    g: &Graph,
    space: &StateSpace,
    chain: &CanonicalChain<T>,
) -> Option<(usize, usize)> {
    assert!(g.n() <= 64, "payoff masks hold at most 64 vertices");
    (0..space.len()).find_map(|s| {
        let before = satisfied_mask(g, &space.decode(s));
        chain
            .successors(s)
            .into_iter()
            .find(|(t, p)| !p.is_zero() && satisfied_mask(g, &space.decode(*t)) & before != before)
            .map(|(t, _)| (s, t))
    })
}

/// Relabel colors by order of first appearance, so configurations that
/// differ by a color permutation share a pattern.
pub fn color_pattern(colors: &[usize]) -> Vec<usize> {
    let mut seen: Vec<usize> = Vec::new();
    colors
        .iter()
        .map(|c| match seen.iter().position(|s| s == c) {
            Some(i) => i,
            None => {
                seen.push(*c);
                seen.len() - 1
            }
        })
        .collect()
}

/// A color-permutation class of transient configurations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigClass {
    pub pattern: Vec<usize>,
    /// Index into the transient ordering of the first member.
    pub representative: usize,
    pub members: usize,
}

pub fn transient_classes<T: Scalar>(space: &StateSpace, chain: &CanonicalChain<T>) -> Vec<ConfigClass> {
    let mut classes: BTreeMap<Vec<usize>, ConfigClass> = BTreeMap::new();
    for i in 0..chain.transient_count() {
        let pattern = color_pattern(&space.decode(chain.transient_state(i)));
        classes
            .entry(pattern.clone())
            .or_insert(ConfigClass { pattern, representative: i, members: 0 })
            .members += 1;
    }
    classes.into_values().collect()
}

/// CSV of every positive transition, absorbing self-loops included.
pub fn write_chain_csv<T: Scalar, W: Write>(
    mut w: W,
    header: &[String],
    space: &StateSpace,
    chain: &CanonicalChain<T>,
) -> Result<()> {
    let mut out = String::new();
    for line in header {
        let _ = writeln!(out, "# {line}");
    }
    let _ = writeln!(out, "# state id = sum over v of color[v] * {}^v", space.q());
    out.push_str("from_state,to_state,probability\n");
    for s in 0..space.len() {
        for (t, p) in chain.successors(s) {
            let _ = writeln!(out, "{s},{t},{}", p.to_f64().unwrap_or(f64::NAN));
        }
    }
    w.write_all(out.as_bytes())?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;
    use num_traits::{ToPrimitive, Zero};

    fn r(a: usize, b: usize) -> Rational {
        Rational::ratio(a, b)
    }

    fn k2_exact() -> (StateSpace, CanonicalChain<Rational>) {
        build_chain(&Graph::complete(2), 3, ChainOptions::default()).unwrap()
    }

    #[test]
    fn k2_state_counts() {
        let (space, chain) = k2_exact();
        assert_eq!(space.len(), 9);
        assert_eq!(chain.absorbing_count(), 6);
        assert_eq!(chain.transient_count(), 3);
        for i in 0..3 {
            let colors = space.decode(chain.transient_state(i));
            assert_eq!(colors[0], colors[1]);
            // half the mass stays among monochromatic states, none on itself
            let stay: Rational = chain.q_row(i).iter().map(|(_, p)| p.clone()).sum();
            assert_eq!(stay, r(1, 2));
            assert!(chain.q_row(i).iter().all(|(j, p)| *j != i && *p == r(1, 4)));
        }
        assert!(chain.max_row_defect().is_zero());
    }

    #[test]
    fn k2_fundamental_matrix_matches_hand_inversion() {
        // Q = (J - I)/4 on the three monochromatic states, so
        // N = (4/5) I + (2/5) J.
        let (_, chain) = k2_exact();
        let n = fundamental_matrix(&chain).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { r(6, 5) } else { r(2, 5) };
                assert_eq!(n[(i, j)], want);
            }
        }
        let expected = expected_absorption(&n);
        assert_eq!(expected, vec![r(2, 1); 3]);
        let summary = absorption_variance(&n, &expected).unwrap();
        // geometric(1/2): E[X^2] = (2 - p)/p^2 = 6, Var = (1 - p)/p^2 = 2
        assert_eq!(summary.second_moment, vec![r(6, 1); 3]);
        assert_eq!(summary.variance, vec![r(2, 1); 3]);
    }

    #[test]
    fn edgeless_chain_has_no_transient_states() {
        let (space, chain) = build_chain::<f64>(&Graph::empty(2), 2, ChainOptions::default()).unwrap();
        assert_eq!(space.len(), 4);
        assert_eq!(chain.transient_count(), 0);
        let n = fundamental_matrix(&chain).unwrap();
        assert!(n.is_empty());
        assert!(expected_absorption(&n).is_empty());
        assert!(limit_distribution_check(&chain, 200).unwrap().passed);
    }

    #[test]
    fn one_step_exit_has_unit_mean_and_zero_variance() {
        // a lone transient state with Q = [0]
        let n = Matrix::<Rational>::identity(1);
        let expected = expected_absorption(&n);
        assert_eq!(expected, vec![r(1, 1)]);
        let s = absorption_variance(&n, &expected).unwrap();
        assert_eq!(s.variance, vec![r(0, 1)]);
    }

    #[test]
    fn variance_rejects_dimension_mismatch() {
        let n = Matrix::<f64>::identity(2);
        assert!(matches!(absorption_variance(&n, &[1.0]), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn cap_and_palette_refusals() {
        let g = Graph::complete(3);
        assert!(matches!(build_chain::<f64>(&g, 3, ChainOptions::default()), Err(Error::PaletteTooSmall { .. })));
        let lax = ChainOptions { allow_small_palette: true, ..Default::default() };
        assert_eq!(build_chain::<f64>(&g, 3, lax).unwrap().0.len(), 27);
        let opts = ChainOptions { state_cap: 100, ..Default::default() };
        match build_chain::<f64>(&g, 5, opts) {
            Err(Error::StateSpaceTooLarge { states, .. }) => assert_eq!(states, 125.0),
            other => panic!("unexpected {other:?}"),
        }
        let err = build_chain::<f64>(&Graph::complete(2), 3, ChainOptions::default())
            .map(|(_, c)| fundamental_matrix_capped(&c, 2));
        assert!(matches!(err, Ok(Err(Error::DenseSolveTooLarge { transient: 3, cap: 2 }))));
    }

    #[test]
    fn float_and_exact_chains_agree() {
        for (g, q) in [(Graph::path(3), 4), (Graph::complete(3), 5), (Graph::star(3), 5)] {
            let (_, exact) = build_chain::<Rational>(&g, q, ChainOptions::default()).unwrap();
            let (_, float) = build_chain::<f64>(&g, q, ChainOptions::default()).unwrap();
            let n_exact = fundamental_matrix(&exact).unwrap();
            let n_float = fundamental_matrix(&float).unwrap();
            let e_exact = expected_absorption(&n_exact);
            let e_float = expected_absorption(&n_float);
            let v_exact = absorption_variance(&n_exact, &e_exact).unwrap().variance;
            let v_float = absorption_variance(&n_float, &e_float).unwrap().variance;
            for i in 0..e_exact.len() {
                assert!((e_exact[i].to_f64().unwrap() - e_float[i]).abs() < 1e-12);
                assert!((v_exact[i].to_f64().unwrap() - v_float[i]).abs() < 1e-10);
            }
            let (_, single) = build_chain::<f32>(&g, q, ChainOptions::default()).unwrap();
            let e_single = expected_absorption(&fundamental_matrix(&single).unwrap());
            for i in 0..e_exact.len() {
                assert!((e_single[i] as f64 - e_float[i]).abs() < 1e-4);
            }
        }
    }

    #[test]
    fn structural_identities_on_small_chains() {
        for (g, q) in [(Graph::complete(2), 3), (Graph::path(3), 4), (Graph::complete(3), 5), (Graph::star(2), 4)] {
            let (space, chain) = build_chain::<f64>(&g, q, ChainOptions::default()).unwrap();
            assert!(chain.max_row_defect() <= 1e-12);
            for i in 0..space.len() {
                assert_eq!(space.encode(&space.decode(i)), i);
                assert_eq!(
                    space.absorbing_mask()[i],
                    crate::graph::is_proper(&g, &crate::Coloring::new(space.decode(i), q).unwrap()).unwrap()
                );
            }
            assert!(chain.q_block().entries().chain(chain.r_block().entries()).all(|p| (0.0..=1.0).contains(p)));
            let n = fundamental_matrix(&chain).unwrap();
            assert!(n.entries().all(|&x| x >= 0.0));
            let residual = n.mul(&Matrix::identity(n.rows()).sub(&chain.q_block()).unwrap()).unwrap();
            assert!(residual.sub(&Matrix::identity(n.rows())).unwrap().max_abs() <= 1e-10);
            assert!(payoff_monotonicity_violation(&g, &space, &chain).is_none());

            // N is the limit of the power series sum_t Q^t
            let qb = chain.q_block();
            let mut term = Matrix::identity(qb.rows());
            let mut sum = term.clone();
            for _ in 0..400 {
                term = term.mul(&qb).unwrap();
                sum = sum.add(&term).unwrap();
            }
            assert!(sum.sub(&n).unwrap().max_abs() < 1e-8);

            assert!(limit_distribution_check(&chain, 200).unwrap().passed);
        }
    }

    #[test]
    fn k2_decay_is_exact() {
        // Q^t = (1/2)^t J/3 + (-1/4)^t (I - J/3): rows sum to (1/2)^t.
        let (_, chain) = k2_exact();
        let report = limit_distribution_check(&chain, 40).unwrap();
        assert!(report.passed);
        for c in &report.checkpoints {
            let t = c.t as i32;
            let diag = 0.5f64.powi(t) / 3.0 + (-0.25f64).powi(t) * 2.0 / 3.0;
            let off = 0.5f64.powi(t) / 3.0 - (-0.25f64).powi(t) / 3.0;
            let want = diag.max(off);
            assert!((c.max_entry - want).abs() <= 1e-14 * want, "t = {t}");
            assert!((1.0 - c.min_absorbed_mass - 0.5f64.powi(t)).abs() < 1e-15);
        }
        assert_eq!(report.checkpoints.last().unwrap().t, 40);
    }

    #[test]
    fn k3_absorbs_by_sixty_rounds() {
        let (_, chain) = build_chain::<f64>(&Graph::complete(3), 5, ChainOptions::default()).unwrap();
        let report = limit_distribution_check(&chain, 60).unwrap();
        let last = report.checkpoints.last().unwrap();
        assert_eq!(last.t, 60);
        assert!(last.min_absorbed_mass >= 1.0 - 1e-8);
        // 1 - mass equals the largest row of Q^t, which bounds each entry
        // and is bounded by the row length times the largest entry
        let rows = chain.transient_count() as f64;
        assert!(1.0 - last.min_absorbed_mass <= rows * last.max_entry + 1e-18);
        assert!(last.max_entry <= 1.0 - last.min_absorbed_mass + 1e-18);
    }

    #[test]
    fn patterns_and_classes() {
        assert_eq!(color_pattern(&[3, 3, 1, 0, 1]), vec![0, 0, 1, 2, 1]);
        let (space, chain) = build_chain::<f64>(&Graph::path(3), 4, ChainOptions::default()).unwrap();
        let classes = transient_classes(&space, &chain);
        let patterns: Vec<_> = classes.iter().map(|c| c.pattern.clone()).collect();
        assert_eq!(patterns, vec![vec![0, 0, 0], vec![0, 0, 1], vec![0, 1, 1]]);
        assert_eq!(classes.iter().map(|c| c.members).sum::<usize>(), chain.transient_count());
    }

    #[test]
    fn chain_dump_lists_every_transition() {
        let (space, chain) = build_chain::<f64>(&Graph::complete(2), 3, ChainOptions::default()).unwrap();
        let mut buf = Vec::new();
        write_chain_csv(&mut buf, &[], &space, &chain).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).skip(1).collect();
        // 6 absorbing self-loops + 3 transient rows with 2 + 2 successors
        assert_eq!(rows.len(), 6 + 3 * 4);
        for row in ["0,4,0.25", "0,5,0.25", "0,7,0.25", "0,8,0.25", "1,1,1"] {
            assert!(rows.contains(&row), "missing {row}");
        }
    }
}
