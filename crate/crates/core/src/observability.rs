//! Global and local observability of the top-1 feedback game.
//!
//! Span membership `v ∈ span(columns)` is decided on floats by an orthogonal
//! projection residual with two thresholds: residuals at or below `accept`
//! mean "in span", at or above `reject` mean "not in span", and anything in
//! between is reported as inconclusive rather than guessed.

use std::collections::{BTreeSet, HashSet};
use std::fmt::Write as _;
use std::io::Write;

use num_traits::Float;
use rand::Rng;

use crate::error::{RankError, Result};
use crate::game::GameMatrices;
use crate::measures::{Measure, Polarity};
use crate::permutation::Permutation;
use crate::scalar::Scalar;

/// Relative norm below which a candidate basis vector is treated as dependent.
const RANK_TOL: f64 = 1e-10;

/// Orthonormal basis of the span of a set of vectors (modified Gram-Schmidt,
/// applied twice per vector).
#[derive(Clone, Debug)]
pub struct SpanBasis<F> {
    dim: usize,
    q: Vec<Vec<F>>,
}

fn dot<F: Float>(a: &[F], b: &[F]) -> F {
    a.iter().zip(b).fold(F::zero(), |acc, (&x, &y)| acc + x * y)
}

fn norm<F: Float>(a: &[F]) -> F {
    dot(a, a).sqrt()
}

impl<F: Float> SpanBasis<F> {
    pub fn new<I>(dim: usize, vectors: I) -> Result<Self>
    where
        I: IntoIterator,
        I::Item: AsRef<[F]>,
    {
        let mut basis = Self { dim, q: Vec::new() };
        let tol = F::from(RANK_TOL).unwrap();
        for v in vectors {
            let v = v.as_ref();
            if v.len() != dim {
                return Err(RankError::DimensionMismatch {
                    expected: dim,
                    found: v.len(),
                });
            }
            let scale = norm(v);
            let w = basis.project_out(v);
            let n = norm(&w);
            if n > tol * scale.max(F::one()) {
                basis.q.push(w.into_iter().map(|x| x / n).collect());
            }
        }
        Ok(basis)
    }

    fn project_out(&self, v: &[F]) -> Vec<F> {
        let mut w = v.to_vec();
        for _ in 0..2 {
            for q in &self.q {
                let c = dot(&w, q);
                for (wi, &qi) in w.iter_mut().zip(q) {
                    *wi = *wi - c * qi;
                }
            }
        }
        w
    }

    pub fn rank(&self) -> usize {
        self.q.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Euclidean norm of the component of `v` orthogonal to the span.
    pub fn residual(&self, v: &[F]) -> Result<F> {
        if v.len() != self.dim {
            return Err(RankError::DimensionMismatch {
                expected: self.dim,
                found: v.len(),
            });
        }
        Ok(norm(&self.project_out(v)))
    }
}

/// Distance from `v` to `span(basis)`; `‖v‖` for an empty basis.
pub fn span_residual<F: Float>(v: &[F], basis: &[Vec<F>]) -> Result<F> {
    SpanBasis::new(v.len(), basis)?.residual(v)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Thresholds {
    pub accept: f64,
    pub reject: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            accept: 1e-9,
            reject: 1e-6,
        }
    }
}

impl Thresholds {
    /// `Ok(true)` = in span, `Ok(false)` = not in span.
    pub fn classify(&self, residual: f64, i: usize, j: usize) -> Result<bool> {
        if residual <= self.accept {
            Ok(true)
        } else if residual >= self.reject {
            Ok(false)
        } else {
            Err(RankError::Inconclusive { i, j, residual })
        }
    }
}

/// Distinct signal-matrix columns (of `S_kᵀ`) over the given actions.
fn signal_columns<F: Scalar + Float>(
    game: &GameMatrices<F>,
    actions: impl IntoIterator<Item = usize>,
) -> Result<Vec<Vec<F>>> {
    let mut seen = HashSet::new();
    let mut cols = Vec::new();
    for a in actions {
        let s = game.signal_matrix(a)?;
        for row in &s.rows {
            if seen.insert(row.clone()) {
                cols.push(row.iter().map(|&x| F::from_count(u64::from(x))).collect());
            }
        }
    }
    Ok(cols)
}

fn signal_basis<F: Scalar + Float>(
    game: &GameMatrices<F>,
    actions: impl IntoIterator<Item = usize>,
) -> Result<SpanBasis<F>> {
    SpanBasis::new(game.n_outcomes(), signal_columns(game, actions)?)
}

/// Residual of `ℓ_i - ℓ_j` against the signal columns of `actions`.
pub fn pair_residual<F: Scalar + Float>(
    game: &GameMatrices<F>,
    i: usize,
    j: usize,
    actions: impl IntoIterator<Item = usize>,
) -> Result<F> {
    check_action(game, i)?;
    check_action(game, j)?;
    signal_basis(game, actions)?.residual(&game.loss_difference(i, j))
}

fn check_action<F: Scalar>(game: &GameMatrices<F>, a: usize) -> Result<()> {
    if a >= game.n_actions() {
        return Err(RankError::IndexOutOfRange {
            index: a,
            len: game.n_actions(),
        });
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairResidual {
    pub i: usize,
    pub j: usize,
    pub residual: f64,
}

#[derive(Clone, Debug)]
pub struct GlobalCheck {
    pub holds: bool,
    pub worst_residual: f64,
    /// Pair with the largest residual (lowest index pair among numerical ties).
    pub witness: Option<(usize, usize)>,
    pub residuals: Vec<PairResidual>,
}

/// Tests every `ℓ_i - ℓ_j` against the span of all signal-matrix columns.
pub fn check_global<F: Scalar + Float>(
    game: &GameMatrices<F>,
    thresholds: &Thresholds,
) -> Result<GlobalCheck> {
    let basis = signal_basis(game, 0..game.n_actions())?;
    let n = game.n_actions();
    let mut residuals = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            let residual = basis.residual(&game.loss_difference(i, j))?.as_f64();
            thresholds.classify(residual, i, j)?;
            residuals.push(PairResidual { i, j, residual });
        }
    }
    let worst_residual = residuals.iter().map(|p| p.residual).fold(0.0, f64::max);
    let tie = 1e-9 * worst_residual.max(1.0);
    let witness = residuals
        .iter()
        .find(|p| p.residual >= worst_residual - tie)
        .map(|p| (p.i, p.j));
    Ok(GlobalCheck {
        holds: worst_residual <= thresholds.accept,
        worst_residual,
        witness,
        residuals,
    })
}

/// `ℓ_a` rebuilt from feedback rows alone: `Σ_j f(j) · H[action with σ_a⁻¹(j) on top]`.
///
/// Exists for measures of the form `f(σ)·r`; the row lies in the span of
/// `m` signal columns by construction.
pub fn top_signal_decomposition<F: Scalar + Float>(
    game: &GameMatrices<F>,
    a: usize,
) -> Result<Vec<F>> {
    check_action(game, a)?;
    let measure = game.measure();
    if !matches!(
        measure,
        Measure::SumLoss | Measure::Dcg | Measure::PrecAtK(_)
    ) {
        return Err(RankError::NotDecomposable { measure });
    }
    let m = game.m();
    let mut row = vec![F::zero(); game.n_outcomes()];
    for (pos, obj) in game.actions()[a].inverse().into_iter().enumerate() {
        let weight = measure.f_component::<F>(pos + 1)?;
        let probe = game
            .action_index(&Permutation::with_on_top(m, obj)?)
            .expect("every ranking is an action");
        for (x, &h) in row.iter_mut().zip(game.feedback_row(probe)) {
            *x = *x + weight * F::from_count(u64::from(h));
        }
    }
    Ok(row)
}

/// Product-Bernoulli distribution over outcomes with the given marginals.
fn product_distribution<F: Scalar + Float>(game: &GameMatrices<F>, marginals: &[F]) -> Vec<F> {
    game.outcomes()
        .iter()
        .map(|r| {
            r.levels()
                .iter()
                .zip(marginals)
                .fold(F::one(), |acc, (&l, &mu)| {
                    acc * if l == 1 { mu } else { F::one() - mu }
                })
        })
        .collect()
}

fn expected_values<F: Scalar + Float>(game: &GameMatrices<F>, p: &[F]) -> Vec<F> {
    (0..game.n_actions())
        .map(|k| dot(game.loss_row(k), p))
        .collect()
}

/// A distribution under which action `i` is strictly optimal.
///
/// Objects are relevant independently, the object at rank `j` of `σ_i` with
/// probability `(m - j + 1)/(m + 1)`. Strict optimality is verified against
/// every other action; a tie (e.g. Prec@k, whose `f` is flat inside the top
/// `k`) is an error.
pub fn pareto_witness<F: Scalar + Float>(game: &GameMatrices<F>, i: usize) -> Result<Vec<F>> {
    check_action(game, i)?;
    let m = game.m();
    let sigma = &game.actions()[i];
    let marginals: Vec<F> = (0..m)
        .map(|obj| F::ratio((m - sigma.rank_of(obj) + 1) as u64, (m + 1) as u64))
        .collect();
    let p = product_distribution(game, &marginals);
    let values = expected_values(game, &p);
    let own = values[i];
    let tol = F::from(1e-12).unwrap() * own.abs().max(F::one());
    for (k, &v) in values.iter().enumerate() {
        if k == i {
            continue;
        }
        let strictly_better = match game.polarity() {
            Polarity::Loss => own < v - tol,
            Polarity::Gain => own > v + tol,
        };
        if !strictly_better {
            return Err(RankError::NotStrictlyOptimal {
                action: i,
                rival: k,
            });
        }
    }
    Ok(p)
}

/// Neighboring actions differ by swapping two objects at consecutive ranks.
pub fn is_neighbor_pair(a: &Permutation, b: &Permutation) -> bool {
    a.is_adjacent_swap_of(b)
}

/// Randomized inner approximation of `N⁺_{i,j}`.
///
/// Each sample is a product distribution whose expected relevance strictly
/// decreases along `σ_i` except for a tie on the swapped pair, i.e. a generic
/// point of `C_i ∩ C_j`. Actions optimal at every sample are kept.
pub fn neighborhood_set<F: Scalar + Float, R: Rng + ?Sized>(
    game: &GameMatrices<F>,
    i: usize,
    j: usize,
    samples: usize,
    rng: &mut R,
) -> Result<BTreeSet<usize>> {
    check_action(game, i)?;
    check_action(game, j)?;
    let measure = game.measure();
    if matches!(measure, Measure::PrecAtK(_)) {
        return Err(RankError::NeighborsUnknown { measure });
    }
    let (si, sj) = (&game.actions()[i], &game.actions()[j]);
    if !is_neighbor_pair(si, sj) {
        return Err(RankError::NotNeighbors(i, j));
    }
    let m = game.m();
    let order = si.inverse();
    // first rank (0-based) of the swapped pair in σ_i
    let swap_at = (0..m)
        .find(|&pos| sj.rank_of(order[pos]) != pos + 1)
        .expect("pair differs");

    let mut set: BTreeSet<usize> = (0..game.n_actions()).collect();
    for _ in 0..samples.max(1) {
        let mut levels: Vec<f64> = (0..m - 1).map(|_| rng.random::<f64>()).collect();
        levels.sort_by(|a, b| b.total_cmp(a));
        let mut marginals = vec![F::zero(); m];
        let mut slot = 0;
        for (pos, &obj) in order.iter().enumerate() {
            if pos == swap_at + 1 {
                slot -= 1;
            }
            marginals[obj] = F::from(levels[slot]).unwrap();
            slot += 1;
        }
        let values = expected_values(game, &product_distribution(game, &marginals));
        let best = match game.polarity() {
            Polarity::Loss => values.iter().copied().fold(F::infinity(), F::min),
            Polarity::Gain => values.iter().copied().fold(F::neg_infinity(), F::max),
        };
        let tol = F::from(1e-9).unwrap() * best.abs().max(F::one());
        set.retain(|&k| (values[k] - best).abs() <= tol);
    }
    Ok(set)
}

#[derive(Clone, Debug)]
pub struct LocalCheck {
    pub i: usize,
    pub j: usize,
    pub neighborhood: BTreeSet<usize>,
    pub residual: f64,
    pub observable: bool,
}

/// Tests `ℓ_i - ℓ_j` against the signal columns of the neighborhood actions only.
pub fn check_local<F: Scalar + Float>(
    game: &GameMatrices<F>,
    i: usize,
    j: usize,
    neighborhood: &BTreeSet<usize>,
    thresholds: &Thresholds,
) -> Result<LocalCheck> {
    if !is_neighbor_pair(&game.actions()[i], &game.actions()[j]) {
        return Err(RankError::NotNeighbors(i, j));
    }
    let residual = pair_residual(game, i, j, neighborhood.iter().copied())?.as_f64();
    let observable = thresholds.classify(residual, i, j)?;
    Ok(LocalCheck {
        i,
        j,
        neighborhood: neighborhood.clone(),
        residual,
        observable,
    })
}

/// All unordered neighbor pairs `(i, j)`, `i < j`.
pub fn neighbor_pairs<F: Scalar>(game: &GameMatrices<F>) -> Vec<(usize, usize)> {
    let actions = game.actions();
    let mut pairs = Vec::new();
    for i in 0..actions.len() {
        for j in i + 1..actions.len() {
            if is_neighbor_pair(&actions[i], &actions[j]) {
                pairs.push((i, j));
            }
        }
    }
    pairs
}

/// Local observability over every neighbor pair.
pub fn check_all_local<F: Scalar + Float, R: Rng + ?Sized>(
    game: &GameMatrices<F>,
    samples: usize,
    thresholds: &Thresholds,
    rng: &mut R,
) -> Result<Vec<LocalCheck>> {
    neighbor_pairs(game)
        .into_iter()
        .map(|(i, j)| {
            let hood = neighborhood_set(game, i, j, samples, rng)?;
            check_local(game, i, j, &hood, thresholds)
        })
        .collect()
}

/// Summary of an observability analysis. Action numbers in the text and CSV
/// renderings are 1-based (`σ_1` is action 0).
#[derive(Clone, Debug)]
pub struct ObservabilityReport {
    pub measure: Measure,
    pub m: usize,
    pub thresholds: Thresholds,
    pub global: Option<GlobalCheck>,
    pub local: Vec<LocalCheck>,
    /// Set when the report came from neighborhood sampling.
    pub randomized: bool,
}

impl ObservabilityReport {
    pub fn new(measure: Measure, m: usize, thresholds: Thresholds) -> Self {
        Self {
            measure,
            m,
            thresholds,
            global: None,
            local: Vec::new(),
            randomized: false,
        }
    }

    pub fn global_holds(&self) -> Option<bool> {
        self.global.as_ref().map(|g| g.holds)
    }

    /// Witness pair and its residual when global observability fails.
    pub fn failing_pair(&self) -> Option<(usize, usize, f64)> {
        let g = self.global.as_ref().filter(|g| !g.holds)?;
        g.witness.map(|(i, j)| (i, j, g.worst_residual))
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "measure: {}  m: {}", self.measure, self.m);
        let _ = writeln!(
            s,
            "thresholds: accept <= {:e}, reject >= {:e}",
            self.thresholds.accept, self.thresholds.reject
        );
        if let Some(g) = &self.global {
            let _ = writeln!(
                s,
                "global observability: {} (worst residual {:.6e}, {} pairs)",
                if g.holds { "holds" } else { "FAILS" },
                g.worst_residual,
                g.residuals.len()
            );
            if let Some((i, j)) = g.witness {
                let _ = writeln!(s, "  worst pair: σ_{} vs σ_{}", i + 1, j + 1);
            }
        }
        if !self.local.is_empty() {
            let failing = self.local.iter().filter(|l| !l.observable).count();
            let _ = writeln!(
                s,
                "local observability: {} ({} of {} neighbor pairs fail{})",
                if failing == 0 { "holds" } else { "FAILS" },
                failing,
                self.local.len(),
                if self.randomized {
                    ", neighborhoods sampled"
                } else {
                    ""
                }
            );
            for l in &self.local {
                let hood: Vec<String> = l
                    .neighborhood
                    .iter()
                    .map(|k| format!("σ_{}", k + 1))
                    .collect();
                let _ = writeln!(
                    s,
                    "  σ_{} vs σ_{}: N+ = {{{}}} residual {:.6e} {}",
                    l.i + 1,
                    l.j + 1,
                    hood.join(", "),
                    l.residual,
                    if l.observable {
                        "observable"
                    } else {
                        "not observable"
                    }
                );
            }
        }
        s
    }

    /// CSV with columns `scope,i,j,residual,verdict`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["scope", "i", "j", "residual", "verdict"])?;
        if let Some(g) = &self.global {
            for p in &g.residuals {
                let verdict = if p.residual <= self.thresholds.accept {
                    "in_span"
                } else {
                    "not_in_span"
                };
                w.write_record([
                    "global".to_string(),
                    (p.i + 1).to_string(),
                    (p.j + 1).to_string(),
                    format!("{:e}", p.residual),
                    verdict.to_string(),
                ])?;
            }
        }
        for l in &self.local {
            w.write_record([
                "local".to_string(),
                (l.i + 1).to_string(),
                (l.j + 1).to_string(),
                format!("{:e}", l.residual),
                if l.observable {
                    "in_span"
                } else {
                    "not_in_span"
                }
                .to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}
