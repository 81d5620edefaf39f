//! Exact reference simulator for one-dimensional partitioned quantum
//! cellular automata with rational amplitudes on a cyclic lattice.
//!
//! A cell state `q` factors as `(l, m, r)` with `q = (l * n_m + m) * n_r + r`.
//! One step first permutes sub-states between neighbours (cell `i` takes its
//! `l` from cell `i + 1` and its `r` from cell `i - 1`) and then applies the
//! local matrix to every cell. Row `s` of the matrix holds the amplitudes of
//! moving from state `s` to each target state.

mod format;
mod matrix;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Zero};

pub use format::{parse_pqca, parse_rational, write_pqca, FormatError, PqcaFile};
pub use matrix::RationalMatrix;

/// Largest configuration space `global_matrix` builds by default.
pub const DEFAULT_GLOBAL_BOUND: usize = 4096;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PqcaError {
    #[error("configuration space of size {size} exceeds the bound {bound}")]
    TooLarge { size: usize, bound: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Sublattices {
    pub left: usize,
    pub middle: usize,
    pub right: usize,
}

impl Sublattices {
    pub fn new(left: usize, middle: usize, right: usize) -> Self {
        Sublattices {
            left,
            middle,
            right,
        }
    }

    pub fn states(&self) -> usize {
        self.left * self.middle * self.right
    }

    pub fn split(&self, q: usize) -> (usize, usize, usize) {
        let r = q % self.right;
        let m = (q / self.right) % self.middle;
        let l = q / (self.right * self.middle);
        (l, m, r)
    }

    pub fn join(&self, l: usize, m: usize, r: usize) -> usize {
        (l * self.middle + m) * self.right + r
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PqcaSpec {
    pub sublattices: Sublattices,
    pub lambda: RationalMatrix,
    pub accept_states: BTreeSet<usize>,
    pub accept_cell: usize,
    pub width: usize,
}

impl PqcaSpec {
    pub fn new(sublattices: Sublattices, lambda: RationalMatrix, width: usize) -> Self {
        PqcaSpec {
            sublattices,
            lambda,
            accept_states: BTreeSet::new(),
            accept_cell: 0,
            width,
        }
    }

    pub fn states(&self) -> usize {
        self.sublattices.states()
    }

    /// `N^w`, saturating.
    pub fn configuration_count(&self) -> usize {
        (0..self.width).fold(1usize, |acc, _| acc.saturating_mul(self.states()))
    }

    pub fn configurations(&self) -> impl Iterator<Item = Configuration> + '_ {
        (0..self.configuration_count()).map(move |i| self.configuration_at(i))
    }

    /// The configuration with lexicographic rank `index`.
    pub fn configuration_at(&self, mut index: usize) -> Configuration {
        let n = self.states();
        let mut cells = vec![0; self.width];
        for cell in cells.iter_mut().rev() {
            *cell = index % n;
            index /= n;
        }
        Configuration(cells)
    }

    pub fn index_of(&self, config: &Configuration) -> usize {
        let n = self.states();
        config.0.iter().fold(0, |acc, &q| acc * n + q)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Configuration(pub Vec<usize>);

impl Configuration {
    pub fn cells(&self) -> &[usize] {
        &self.0
    }

    pub fn width(&self) -> usize {
        self.0.len()
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, q) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{q}")?;
        }
        f.write_str("]")
    }
}

impl From<Vec<usize>> for Configuration {
    fn from(v: Vec<usize>) -> Self {
        Configuration(v)
    }
}

/// Sparse map from configurations to nonzero rational amplitudes.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SuperposedState {
    amplitudes: BTreeMap<Configuration, BigRational>,
}

impl SuperposedState {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn basis(config: Configuration) -> Self {
        let mut s = Self::new();
        s.add(config, BigRational::one());
        s
    }

    /// Adds `amplitude` to a configuration, removing it if the sum is zero.
    pub fn add(&mut self, config: Configuration, amplitude: BigRational) {
        if amplitude.is_zero() {
            return;
        }
        match self.amplitudes.entry(config) {
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += amplitude;
                if e.get().is_zero() {
                    e.remove();
                }
            }
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(amplitude);
            }
        }
    }

    pub fn amplitude(&self, config: &Configuration) -> BigRational {
        self.amplitudes.get(config).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Configuration, &BigRational)> {
        self.amplitudes.iter()
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    /// Sum of squared amplitudes.
    pub fn norm_squared(&self) -> BigRational {
        self.amplitudes
            .values()
            .fold(BigRational::zero(), |acc, a| acc + a * a)
    }

    pub fn scaled(&self, factor: &BigRational) -> SuperposedState {
        let mut out = SuperposedState::new();
        for (c, a) in &self.amplitudes {
            out.add(c.clone(), a * factor);
        }
        out
    }

    pub fn plus(&self, other: &SuperposedState) -> SuperposedState {
        let mut out = self.clone();
        for (c, a) in &other.amplitudes {
            out.add(c.clone(), a.clone());
        }
        out
    }

    /// Dense amplitude vector in lexicographic configuration order.
    pub fn to_dense(&self, spec: &PqcaSpec) -> Vec<BigRational> {
        let mut v = vec![BigRational::zero(); spec.configuration_count()];
        for (c, a) in &self.amplitudes {
            v[spec.index_of(c)] = a.clone();
        }
        v
    }

    pub fn from_dense(spec: &PqcaSpec, v: &[BigRational]) -> SuperposedState {
        let mut out = SuperposedState::new();
        for (i, a) in v.iter().enumerate() {
            out.add(spec.configuration_at(i), a.clone());
        }
        out
    }
}

impl FromIterator<(Configuration, BigRational)> for SuperposedState {
    fn from_iter<I: IntoIterator<Item = (Configuration, BigRational)>>(iter: I) -> Self {
        let mut out = SuperposedState::new();
        for (c, a) in iter {
            out.add(c, a);
        }
        out
    }
}

impl fmt::Display for SuperposedState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (c, a) in &self.amplitudes {
            writeln!(f, "{a} {c}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub errors: Vec<String>,
    pub warnings: Vec<String>,
    pub unitary: bool,
}

impl ValidationReport {
    /// Whether the automaton may be simulated. In strict mode a non-unitary
    /// matrix is fatal too.
    pub fn passes(&self, strict: bool) -> bool {
        self.errors.is_empty() && (!strict || self.unitary)
    }
}

pub fn validate(spec: &PqcaSpec) -> ValidationReport {
    let mut report = ValidationReport::default();
    let s = spec.sublattices;
    if s.left == 0 || s.middle == 0 || s.right == 0 {
        report.errors.push("sublattice sizes must be positive".into());
    }
    if spec.width == 0 {
        report.errors.push("width must be positive".into());
    }
    let n = spec.states();
    if spec.lambda.rows() != n || spec.lambda.cols() != n {
        report.errors.push(format!(
            "matrix is {}x{} but there are {n} states",
            spec.lambda.rows(),
            spec.lambda.cols()
        ));
    }
    for (i, v) in spec.lambda.entries().enumerate() {
        let reduced = BigRational::new(v.numer().clone(), v.denom().clone());
        if reduced.numer() != v.numer() || *v.denom() <= num_bigint::BigInt::zero() {
            report.errors.push(format!(
                "entry ({}, {}) is not in lowest terms",
                i / spec.lambda.cols().max(1),
                i % spec.lambda.cols().max(1)
            ));
        }
    }
    if spec.accept_cell >= spec.width {
        report.errors.push(format!(
            "accept cell {} outside lattice of width {}",
            spec.accept_cell, spec.width
        ));
    }
    for &q in &spec.accept_states {
        if q >= n {
            report
                .errors
                .push(format!("accept state {q} outside [0, {n})"));
        }
    }
    report.unitary = spec.lambda.is_square() && spec.lambda.is_orthogonal();
    if !report.unitary {
        report
            .warnings
            .push("local matrix is not unitary (M^T M != I)".into());
    }
    report
}

/// Checks that every configuration of `state` fits the lattice.
pub fn validate_state(state: &SuperposedState, spec: &PqcaSpec) -> Vec<String> {
    let n = spec.states();
    let mut errors = Vec::new();
    for (c, _) in state.iter() {
        if c.width() != spec.width {
            errors.push(format!(
                "configuration {c} has {} cells, expected {}",
                c.width(),
                spec.width
            ));
        } else if let Some(q) = c.cells().iter().find(|&&q| q >= n) {
            errors.push(format!("configuration {c} uses state {q} outside [0, {n})"));
        }
    }
    errors
}

/// The sub-state permutation: cell `i` receives `l` from cell `i + 1`,
/// keeps its own `m` and receives `r` from cell `i - 1` (cyclically).
pub fn sigma(config: &Configuration, spec: &PqcaSpec) -> Configuration {
    let w = config.width();
    let s = spec.sublattices;
    let parts: Vec<(usize, usize, usize)> = config.cells().iter().map(|&q| s.split(q)).collect();
    Configuration(
        (0..w)
            .map(|i| {
                let l = parts[(i + 1) % w].0;
                let m = parts[i].1;
                let r = parts[(i + w - 1) % w].2;
                s.join(l, m, r)
            })
            .collect(),
    )
}

/// Every target configuration reachable from `config` by the local matrix,
/// with the product of per-cell amplitudes.
fn local_targets(
    config: &Configuration,
    rows: &[Vec<(usize, BigRational)>],
) -> Vec<(Vec<usize>, BigRational)> {
    let mut partial = vec![(Vec::with_capacity(config.width()), BigRational::one())];
    for &q in config.cells() {
        let mut next = Vec::with_capacity(partial.len() * rows[q].len());
        for (prefix, amp) in &partial {
            for (target, lam) in &rows[q] {
                let mut cells = prefix.clone();
                cells.push(*target);
                next.push((cells, amp * lam));
            }
        }
        partial = next;
    }
    partial
}

pub fn step(state: &SuperposedState, spec: &PqcaSpec) -> SuperposedState {
    let rows = spec.lambda.sparse_rows();
    let mut out = SuperposedState::new();
    for (c, amp) in state.iter() {
        let permuted = sigma(c, spec);
        for (cells, product) in local_targets(&permuted, &rows) {
            out.add(Configuration(cells), amp * product);
        }
    }
    out
}

pub fn run(spec: &PqcaSpec, initial: &SuperposedState, k: usize) -> SuperposedState {
    (0..k).fold(initial.clone(), |s, _| step(&s, spec))
}

pub fn is_accepting(config: &Configuration, spec: &PqcaSpec) -> bool {
    config
        .cells()
        .get(spec.accept_cell)
        .is_some_and(|q| spec.accept_states.contains(q))
}

/// Squared-amplitude mass on configurations whose acceptance cell holds an
/// accepting state.
pub fn acceptance_probability(state: &SuperposedState, spec: &PqcaSpec) -> BigRational {
    state
        .iter()
        .filter(|(c, _)| is_accepting(c, spec))
        .fold(BigRational::zero(), |acc, (_, a)| acc + a * a)
}

/// Dense one-step matrix `G` over lexicographically ordered configurations,
/// acting on row vectors like the local matrix does: `step` equals `v G`,
/// and row `c` holds `prod_i M[sigma(c)_i, e_i]` in column `e`.
pub fn global_matrix(spec: &PqcaSpec, bound: usize) -> Result<RationalMatrix, PqcaError> {
    let size = spec.configuration_count();
    if size > bound {
        return Err(PqcaError::TooLarge { size, bound });
    }
    let rows = spec.lambda.sparse_rows();
    let mut g = RationalMatrix::zeros(size, size);
    for row in 0..size {
        let c = spec.configuration_at(row);
        for (cells, product) in local_targets(&sigma(&c, spec), &rows) {
            let col = spec.index_of(&Configuration(cells));
            g.set(row, col, product);
        }
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn cfg(cells: &[usize]) -> Configuration {
        Configuration(cells.to_vec())
    }

    fn stochastic_spec() -> PqcaSpec {
        PqcaSpec::new(
            Sublattices::new(1, 2, 1),
            RationalMatrix::from_ratios(&[&[(2, 3), (1, 3)], &[(0, 1), (1, 1)]]),
            1,
        )
    }

    fn reflection(width: usize) -> PqcaSpec {
        PqcaSpec::new(
            Sublattices::new(1, 2, 1),
            RationalMatrix::from_ratios(&[&[(3, 5), (4, 5)], &[(4, 5), (-3, 5)]]),
            width,
        )
    }

    #[test]
    fn validate_examples() {
        let id = PqcaSpec::new(Sublattices::new(1, 3, 1), RationalMatrix::identity(3), 2);
        let rep = validate(&id);
        assert!(rep.errors.is_empty() && rep.unitary);

        let rep = validate(&stochastic_spec());
        assert!(rep.errors.is_empty());
        assert!(!rep.unitary);
        assert!(rep.passes(false) && !rep.passes(true));

        let rot = PqcaSpec::new(
            Sublattices::new(1, 2, 1),
            RationalMatrix::from_ratios(&[&[(3, 5), (4, 5)], &[(-4, 5), (3, 5)]]),
            1,
        );
        assert!(validate(&rot).unitary);
    }

    #[test]
    fn validate_catches_bad_indices() {
        let mut spec = reflection(2);
        spec.accept_cell = 2;
        spec.accept_states.insert(5);
        assert_eq!(validate(&spec).errors.len(), 2);
        let mut wrong_dim = reflection(1);
        wrong_dim.lambda = RationalMatrix::identity(3);
        assert!(!validate(&wrong_dim).errors.is_empty());
    }

    #[test]
    fn sigma_examples() {
        let spec = PqcaSpec::new(Sublattices::new(2, 2, 2), RationalMatrix::identity(8), 1);
        for q in 0..8 {
            assert_eq!(sigma(&cfg(&[q]), &spec), cfg(&[q]));
        }
        let rot = PqcaSpec::new(Sublattices::new(3, 1, 1), RationalMatrix::identity(3), 3);
        assert_eq!(sigma(&cfg(&[0, 1, 2]), &rot), cfg(&[1, 2, 0]));
    }

    #[test]
    fn sigma_moves_right_components_right() {
        let spec = PqcaSpec::new(Sublattices::new(1, 1, 2), RationalMatrix::identity(2), 3);
        assert_eq!(sigma(&cfg(&[1, 0, 0]), &spec), cfg(&[0, 1, 0]));
    }

    #[test]
    fn stochastic_matrix_step() {
        let out = step(&SuperposedState::basis(cfg(&[0])), &stochastic_spec());
        assert_eq!(out.amplitude(&cfg(&[0])), r(2, 3));
        assert_eq!(out.amplitude(&cfg(&[1])), r(1, 3));
        assert_eq!(out.len(), 2);
    }

    #[test]
    fn reflection_is_an_involution() {
        let spec = reflection(1);
        let init = SuperposedState::basis(cfg(&[0]));
        let once = step(&init, &spec);
        assert_eq!(once.amplitude(&cfg(&[0])), r(3, 5));
        assert_eq!(once.amplitude(&cfg(&[1])), r(4, 5));
        assert_eq!(run(&spec, &init, 2), init);
        assert_eq!(run(&spec, &init, 0), init);
    }

    #[test]
    fn identity_step_is_sigma() {
        let spec = PqcaSpec::new(Sublattices::new(2, 1, 2), RationalMatrix::identity(4), 2);
        for c in spec.configurations() {
            let out = run(&spec, &SuperposedState::basis(c.clone()), 1);
            assert_eq!(out, SuperposedState::basis(sigma(&c, &spec)));
        }
    }

    #[test]
    fn acceptance_examples() {
        let mut spec = reflection(1);
        spec.accept_states.insert(0);
        assert_eq!(
            acceptance_probability(&SuperposedState::basis(cfg(&[0])), &spec),
            r(1, 1)
        );
        assert_eq!(
            acceptance_probability(&SuperposedState::basis(cfg(&[1])), &spec),
            r(0, 1)
        );
        let mixed: SuperposedState = [(cfg(&[0]), r(3, 5)), (cfg(&[1]), r(4, 5))]
            .into_iter()
            .collect();
        assert_eq!(acceptance_probability(&mixed, &spec), r(9, 25));
    }

    #[test]
    fn global_matrix_small_cases() {
        let spec = stochastic_spec();
        assert_eq!(global_matrix(&spec, 16).unwrap(), spec.lambda);
        let perm = PqcaSpec::new(Sublattices::new(2, 1, 1), RationalMatrix::identity(2), 3);
        let g = global_matrix(&perm, 64).unwrap();
        for c in perm.configurations() {
            let row = perm.index_of(&c);
            let col = perm.index_of(&sigma(&c, &perm));
            assert!(g.get(row, col).is_one());
        }
        assert!(matches!(
            global_matrix(&perm, 4),
            Err(PqcaError::TooLarge { size: 8, bound: 4 })
        ));
    }

    #[test]
    fn configuration_indexing_round_trips() {
        let spec = reflection(3);
        for (i, c) in spec.configurations().enumerate() {
            assert_eq!(spec.index_of(&c), i);
        }
    }
}
