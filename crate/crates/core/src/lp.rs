//! The gap-variable linear system behind a feasible vertex ordering, and an
//! exact phase-1 simplex that either solves it or returns a Farkas
//! certificate.
//!
//! Variables are the gaps `Δ_j = x_{j+1} - x_j` between consecutive vertices
//! of the ordering. Each vertex contributes up to two rows with bound `-1`:
//! the *left* row keeps its window's first vertex strictly closer than the
//! first vertex past the window's right end, and the *right* row keeps the
//! window's last vertex strictly closer than the vertex just before the
//! window's left end.

use std::cmp::Ordering;
use std::fmt::{self, Write as _};
use std::ops::Range;

use num::bigint::BigInt;
use num::rational::{BigRational, Ratio};
use num::traits::{CheckedAdd, CheckedDiv, CheckedMul, CheckedSub};
use num::{One, Signed, Zero};
use thiserror::Error;

use crate::line::VertexOrdering;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LpError {
    #[error("window starts are not a valid condition-1 witness: {0}")]
    WindowsInvalid(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstraintSide {
    Left,
    Right,
}

/// One row `Σ_{j∈plus} Δ_j − Σ_{j∈minus} Δ_j ≤ bound`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpRow {
    pub plus: Range<usize>,
    pub minus: Range<usize>,
    pub bound: i64,
    /// Ordering position and side of the vertex that produced the row.
    pub origin: Option<(usize, ConstraintSide)>,
}

impl LpRow {
    pub fn coefficient(&self, j: usize) -> i64 {
        i64::from(self.plus.contains(&j)) - i64::from(self.minus.contains(&j))
    }
}

/// `A Δ ≤ b`, `Δ ≥ 0`, with `A` in `{-1, 0, 1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpSystem {
    pub vars: usize,
    pub rows: Vec<LpRow>,
}

impl LpSystem {
    pub fn coefficient(&self, row: usize, j: usize) -> i64 {
        self.rows[row].coefficient(j)
    }

    /// Exact re-substitution, including nonnegativity.
    pub fn is_satisfied_by(&self, delta: &[BigRational]) -> bool {
        if delta.len() != self.vars || delta.iter().any(|d| d.is_negative()) {
            return false;
        }
        self.rows.iter().all(|row| {
            let plus: BigRational = row.plus.clone().map(|j| &delta[j]).sum();
            let minus: BigRational = row.minus.clone().map(|j| &delta[j]).sum();
            plus - minus <= BigRational::from_integer(row.bound.into())
        })
    }

    /// Checks `y ≥ 0`, `Aᵀy ≥ 0` and `bᵀy < 0` exactly.
    pub fn is_farkas_certificate(&self, y: &[BigRational]) -> bool {
        if y.len() != self.rows.len() || y.iter().any(|v| v.is_negative()) {
            return false;
        }
        let mut aty = vec![BigRational::zero(); self.vars];
        let mut bty = BigRational::zero();
        for (row, yi) in self.rows.iter().zip(y) {
            for j in row.plus.clone() {
                aty[j] += yi;
            }
            for j in row.minus.clone() {
                aty[j] -= yi;
            }
            bty += yi * BigRational::from_integer(row.bound.into());
        }
        aty.iter().all(|v| !v.is_negative()) && bty.is_negative()
    }

    /// Plain-text dump: a `vars m` header, then one row per line as signed
    /// 1-based variable indices followed by `<= bound`.
    pub fn to_text(&self) -> String {
        let mut out = format!("vars {}\n", self.vars);
        for row in &self.rows {
            let mut terms: Vec<String> = row.plus.clone().map(|j| format!("+{}", j + 1)).collect();
            terms.extend(row.minus.clone().map(|j| format!("-{}", j + 1)));
            if !terms.is_empty() {
                out.push_str(&terms.join(" "));
                out.push(' ');
            }
            let _ = writeln!(out, "<= {}", row.bound);
        }
        out
    }

    pub fn parse_text(text: &str) -> Result<Self, LpError> {
        let mut vars = None;
        let mut rows = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let err = |message: &str| LpError::Parse {
                line,
                message: message.to_string(),
            };
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some(m) = vars else {
                let count = content
                    .strip_prefix("vars")
                    .and_then(|s| s.trim().parse::<usize>().ok())
                    .ok_or_else(|| err("expected `vars <count>` header"))?;
                vars = Some(count);
                continue;
            };
            let (lhs, rhs) = content.split_once("<=").ok_or_else(|| err("missing `<=`"))?;
            let bound: i64 = rhs.trim().parse().map_err(|_| err("bad bound"))?;
            let (mut plus, mut minus) = (Vec::new(), Vec::new());
            for tok in lhs.split_whitespace() {
                let (sign, digits) = tok.split_at(1);
                let j: usize = digits.parse().map_err(|_| err("bad variable index"))?;
                if j == 0 || j > m {
                    return Err(err("variable index out of range"));
                }
                match sign {
                    "+" => plus.push(j - 1),
                    "-" => minus.push(j - 1),
                    _ => return Err(err("terms must start with + or -")),
                }
            }
            rows.push(LpRow {
                plus: as_range(&plus).ok_or_else(|| err("positive terms must be contiguous"))?,
                minus: as_range(&minus).ok_or_else(|| err("negative terms must be contiguous"))?,
                bound,
                origin: None,
            });
        }
        Ok(Self {
            vars: vars.ok_or(LpError::Parse {
                line: 0,
                message: "empty input".into(),
            })?,
            rows,
        })
    }
}

fn as_range(idx: &[usize]) -> Option<Range<usize>> {
    let Some(&first) = idx.first() else {
        return Some(0..0);
    };
    idx.iter()
        .enumerate()
        .all(|(i, &j)| j == first + i)
        .then(|| first..first + idx.len())
}

fn nonempty(r: Range<usize>) -> Range<usize> {
    if r.is_empty() {
        0..0
    } else {
        r
    }
}

impl fmt::Display for LpSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Emits the left/right rows for an ordering of `n` vertices with 0-based
/// window starts. Rows whose outside vertex would fall off either end of the
/// ordering are omitted.
pub fn build_lp(n: usize, k: usize, window_start: &[usize]) -> Result<LpSystem, LpError> {
    if window_start.len() != n {
        return Err(LpError::WindowsInvalid(format!(
            "{} window starts for {n} vertices",
            window_start.len()
        )));
    }
    let mut rows = Vec::with_capacity(2 * n);
    for (i, &s) in window_start.iter().enumerate() {
        if s + k >= n || s > i || i > s + k {
            return Err(LpError::WindowsInvalid(format!("position {i}: window start {s}")));
        }
        if i > 0 && s < window_start[i - 1] {
            return Err(LpError::WindowsInvalid(format!("position {i}: window start decreases")));
        }
        if s + k + 1 < n {
            rows.push(LpRow {
                plus: nonempty(s..i),
                minus: i..s + k + 1,
                bound: -1,
                origin: Some((i, ConstraintSide::Left)),
            });
        }
        if s >= 1 {
            rows.push(LpRow {
                plus: nonempty(i..s + k),
                minus: s - 1..i,
                bound: -1,
                origin: Some((i, ConstraintSide::Right)),
            });
        }
    }
    Ok(LpSystem {
        vars: n.saturating_sub(1),
        rows,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Solution(Vec<BigRational>),
    /// `y ≥ 0` with `Aᵀy ≥ 0` and `bᵀy < 0`.
    Infeasible(Vec<BigRational>),
}

/// Tableau arithmetic. `None` signals overflow.
trait Field: Clone + fmt::Debug {
    fn from_int(v: i64) -> Self;
    fn is_zero(&self) -> bool;
    fn is_pos(&self) -> bool;
    fn is_neg(&self) -> bool;
    fn add(&self, o: &Self) -> Option<Self>;
    fn sub(&self, o: &Self) -> Option<Self>;
    fn mul(&self, o: &Self) -> Option<Self>;
    fn div(&self, o: &Self) -> Option<Self>;
    fn compare(&self, o: &Self) -> Ordering;
}

/// Exact fields can hand their values out as rationals.
trait Exact: Field {
    fn to_big(&self) -> BigRational;
}

type Small = Ratio<i128>;

impl Field for Small {
    fn from_int(v: i64) -> Self {
        Ratio::from_integer(v.into())
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_pos(&self) -> bool {
        Signed::is_positive(self)
    }
    fn is_neg(&self) -> bool {
        Signed::is_negative(self)
    }
    // integer fast paths skip the gcd work of the general ratio ops
    fn add(&self, o: &Self) -> Option<Self> {
        if self.is_integer() && o.is_integer() {
            return self.numer().checked_add(o.numer()).map(Ratio::from_integer);
        }
        self.checked_add(o)
    }
    fn sub(&self, o: &Self) -> Option<Self> {
        if self.is_integer() && o.is_integer() {
            return self.numer().checked_sub(o.numer()).map(Ratio::from_integer);
        }
        self.checked_sub(o)
    }
    fn mul(&self, o: &Self) -> Option<Self> {
        if self.is_integer() && o.is_integer() {
            return self.numer().checked_mul(o.numer()).map(Ratio::from_integer);
        }
        self.checked_mul(o)
    }
    fn div(&self, o: &Self) -> Option<Self> {
        if o.is_integer() && o.numer().abs() == 1 {
            return Some(if o.numer().is_negative() { -*self } else { *self });
        }
        self.checked_div(o)
    }
    fn compare(&self, o: &Self) -> Ordering {
        self.cmp(o)
    }
}

impl Exact for Small {
    fn to_big(&self) -> BigRational {
        BigRational::new(BigInt::from(*self.numer()), BigInt::from(*self.denom()))
    }
}

impl Field for BigRational {
    fn from_int(v: i64) -> Self {
        BigRational::from_integer(v.into())
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_pos(&self) -> bool {
        Signed::is_positive(self)
    }
    fn is_neg(&self) -> bool {
        Signed::is_negative(self)
    }
    fn add(&self, o: &Self) -> Option<Self> {
        Some(self + o)
    }
    fn sub(&self, o: &Self) -> Option<Self> {
        Some(self - o)
    }
    fn mul(&self, o: &Self) -> Option<Self> {
        Some(self * o)
    }
    fn div(&self, o: &Self) -> Option<Self> {
        Some(self / o)
    }
    fn compare(&self, o: &Self) -> Ordering {
        self.cmp(o)
    }
}

impl Exact for BigRational {
    fn to_big(&self) -> BigRational {
        self.clone()
    }
}

/// Values within this of zero count as zero in the floating tableau.
const FLOAT_TOLERANCE: f64 = 1e-9;

impl Field for f64 {
    fn from_int(v: i64) -> Self {
        v as f64
    }
    fn is_zero(&self) -> bool {
        self.abs() <= FLOAT_TOLERANCE
    }
    fn is_pos(&self) -> bool {
        *self > FLOAT_TOLERANCE
    }
    fn is_neg(&self) -> bool {
        *self < -FLOAT_TOLERANCE
    }
    fn add(&self, o: &Self) -> Option<Self> {
        Some(self + o)
    }
    fn sub(&self, o: &Self) -> Option<Self> {
        Some(self - o)
    }
    fn mul(&self, o: &Self) -> Option<Self> {
        Some(self * o)
    }
    fn div(&self, o: &Self) -> Option<Self> {
        Some(self / o)
    }
    fn compare(&self, o: &Self) -> Ordering {
        self.total_cmp(o)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Basic {
    /// Structural variable or slack, by column index.
    Column(usize),
    /// Artificial variable of the given row; never re-enters once it leaves.
    Artificial(usize),
}

/// Entering-column choice.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Pricing {
    /// Lowest-index improving column; never cycles.
    Bland,
    /// Most negative reduced cost, falling back to Bland after a run of
    /// degenerate pivots.
    Dantzig,
}

/// Pivots without objective progress before Dantzig pricing hands over to
/// Bland's rule.
const DEGENERATE_RUN: usize = 64;

#[derive(Debug)]
enum Stop {
    Overflow,
    PivotLimit,
}

/// Dense phase-1 tableau. Columns are the structural variables followed by
/// one slack per row; artificial columns are implicit.
struct Tableau<F: Field> {
    vars: usize,
    cols: usize,
    rows: Vec<Vec<F>>,
    rhs: Vec<F>,
    basis: Vec<Basic>,
    cost: Vec<F>,
    objective: F,
    pivots: usize,
}

impl<F: Field> Tableau<F> {
    fn new(sys: &LpSystem, bounds: &[F]) -> Result<Self, Stop> {
        let m = sys.rows.len();
        let cols = sys.vars + m;
        let mut rows = Vec::with_capacity(m);
        let mut rhs = Vec::with_capacity(m);
        let mut basis = Vec::with_capacity(m);
        let mut cost = vec![F::from_int(0); cols];
        let mut objective = F::from_int(0);
        for (i, (row, bound)) in sys.rows.iter().zip(bounds).enumerate() {
            // rows with a negative bound are negated so the artificial starts feasible
            let sign = if bound.is_neg() { -1 } else { 1 };
            let mut dense = vec![F::from_int(0); cols];
            for (j, cell) in dense.iter_mut().enumerate().take(sys.vars) {
                *cell = F::from_int(sign * row.coefficient(j));
            }
            dense[sys.vars + i] = F::from_int(sign);
            let b = bound.mul(&F::from_int(sign)).ok_or(Stop::Overflow)?;
            if sign < 0 {
                for (c, cell) in cost.iter_mut().zip(&dense) {
                    *c = c.sub(cell).ok_or(Stop::Overflow)?;
                }
                objective = objective.add(&b).ok_or(Stop::Overflow)?;
                basis.push(Basic::Artificial(i));
            } else {
                basis.push(Basic::Column(sys.vars + i));
            }
            rows.push(dense);
            rhs.push(b);
        }
        Ok(Self {
            vars: sys.vars,
            cols,
            rows,
            rhs,
            basis,
            cost,
            objective,
            pivots: 0,
        })
    }

    fn order_key(&self, b: Basic) -> usize {
        match b {
            Basic::Column(j) => j,
            Basic::Artificial(i) => self.cols + i,
        }
    }

    fn entering(&self, pricing: Pricing) -> Option<usize> {
        match pricing {
            Pricing::Bland => (0..self.cols).find(|&j| self.cost[j].is_neg()),
            Pricing::Dantzig => {
                let mut best: Option<usize> = None;
                for j in 0..self.cols {
                    if self.cost[j].is_neg()
                        && best.is_none_or(|b| self.cost[j].compare(&self.cost[b]) == Ordering::Less)
                    {
                        best = Some(j);
                    }
                }
                best
            }
        }
    }

    /// Minimum-ratio row, lowest-index basic variable among ties.
    fn leaving(&self, enter: usize) -> Result<Option<usize>, Stop> {
        let mut leave: Option<(usize, F)> = None;
        for i in 0..self.rows.len() {
            let a = &self.rows[i][enter];
            if !a.is_pos() {
                continue;
            }
            let ratio = self.rhs[i].div(a).ok_or(Stop::Overflow)?;
            let better = match &leave {
                None => true,
                Some((best_i, best)) => match ratio.compare(best) {
                    Ordering::Less => true,
                    Ordering::Equal => self.order_key(self.basis[i]) < self.order_key(self.basis[*best_i]),
                    Ordering::Greater => false,
                },
            };
            if better {
                leave = Some((i, ratio));
            }
        }
        Ok(leave.map(|(i, _)| i))
    }

    fn run(&mut self, pricing: Pricing, pivot_limit: usize) -> Result<(), Stop> {
        let mut stalled = 0;
        loop {
            // the objective never goes negative; in floating point it may drift below zero
            if !self.objective.is_pos() {
                return Ok(());
            }
            let rule = if stalled >= DEGENERATE_RUN {
                Pricing::Bland
            } else {
                pricing
            };
            let Some(enter) = self.entering(rule) else {
                return Ok(());
            };
            // the phase-1 objective is bounded below by zero, so some row qualifies
            let Some(row) = self.leaving(enter)? else {
                return Err(Stop::PivotLimit);
            };
            if self.pivots >= pivot_limit {
                return Err(Stop::PivotLimit);
            }
            let before = self.objective.clone();
            self.pivot(row, enter)?;
            if before.sub(&self.objective).is_some_and(|d| d.is_pos()) {
                stalled = 0;
            } else {
                stalled += 1;
            }
        }
    }

    fn pivot(&mut self, row: usize, col: usize) -> Result<(), Stop> {
        self.pivots += 1;
        let p = self.rows[row][col].clone();
        let nz: Vec<usize> = (0..self.cols).filter(|&c| !self.rows[row][c].is_zero()).collect();
        for &c in &nz {
            self.rows[row][c] = self.rows[row][c].div(&p).ok_or(Stop::Overflow)?;
        }
        self.rhs[row] = self.rhs[row].div(&p).ok_or(Stop::Overflow)?;
        let pivot_row = std::mem::take(&mut self.rows[row]);
        let pivot_rhs = self.rhs[row].clone();
        for r in 0..self.rows.len() {
            if r == row {
                continue;
            }
            let other = &mut self.rows[r];
            let f = other[col].clone();
            if f.is_zero() {
                continue;
            }
            for &c in &nz {
                let delta = f.mul(&pivot_row[c]).ok_or(Stop::Overflow)?;
                other[c] = other[c].sub(&delta).ok_or(Stop::Overflow)?;
            }
            // the entering column is exactly a unit vector after the pivot
            other[col] = F::from_int(0);
            let delta = f.mul(&pivot_rhs).ok_or(Stop::Overflow)?;
            self.rhs[r] = self.rhs[r].sub(&delta).ok_or(Stop::Overflow)?;
        }
        let f = self.cost[col].clone();
        if !f.is_zero() {
            for &c in &nz {
                let delta = f.mul(&pivot_row[c]).ok_or(Stop::Overflow)?;
                self.cost[c] = self.cost[c].sub(&delta).ok_or(Stop::Overflow)?;
            }
            self.cost[col] = F::from_int(0);
            let delta = f.mul(&pivot_rhs).ok_or(Stop::Overflow)?;
            self.objective = self.objective.add(&delta).ok_or(Stop::Overflow)?;
        }
        self.rows[row] = pivot_row;
        self.basis[row] = Basic::Column(col);
        Ok(())
    }

    /// Values of the structural variables at the current basis.
    fn primal(&self) -> Vec<F> {
        let mut x = vec![F::from_int(0); self.vars];
        for (i, b) in self.basis.iter().enumerate() {
            if let Basic::Column(j) = *b {
                if j < self.vars {
                    x[j] = self.rhs[i].clone();
                }
            }
        }
        x
    }
}

impl<F: Exact> Tableau<F> {
    fn outcome(&self) -> LpOutcome {
        if !self.objective.is_pos() {
            LpOutcome::Solution(self.primal().iter().map(F::to_big).collect())
        } else {
            // reduced costs of the slack columns are the phase-1 duals
            LpOutcome::Infeasible(self.cost[self.vars..].iter().map(F::to_big).collect())
        }
    }
}

/// How the last solve went.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SimplexStats {
    pub pivots: usize,
    /// The answer came from a rounded floating-point solution that passed
    /// exact re-substitution; the exact simplex did not run.
    pub float_guided: bool,
    /// Whether the `i128` attempt overflowed and the exact solve was redone
    /// with arbitrary-precision rationals.
    pub promoted: bool,
}

/// Decides `A Δ ≤ b, Δ ≥ 0` exactly.
///
/// A floating-point phase-1 run on the system with every bound tightened by
/// half the row's support plus one half is tried first; rounding its
/// solution to integers cannot then violate any original row, and the
/// rounded vector is re-checked in exact arithmetic anyway. If that attempt
/// fails for any reason, the exact simplex ([`solve_feasibility_exact`])
/// decides, so the answer (and every infeasibility certificate) is always
/// exact.
pub fn solve_feasibility(sys: &LpSystem) -> LpOutcome {
    solve_feasibility_with_stats(sys).0
}

pub fn solve_feasibility_with_stats(sys: &LpSystem) -> (LpOutcome, SimplexStats) {
    if let Some((delta, pivots)) = float_guided(sys) {
        let stats = SimplexStats {
            pivots,
            float_guided: true,
            promoted: false,
        };
        return (LpOutcome::Solution(delta), stats);
    }
    solve_feasibility_exact_with_stats(sys)
}

fn float_guided(sys: &LpSystem) -> Option<(Vec<BigRational>, usize)> {
    let bounds: Vec<f64> = sys
        .rows
        .iter()
        .map(|r| r.bound as f64 - (r.plus.len() + r.minus.len()) as f64 / 2.0 - 0.5)
        .collect();
    let mut t = Tableau::<f64>::new(sys, &bounds).ok()?;
    let limit = 50 * (t.cols + t.rows.len()) + 1000;
    // a small leftover objective is rounding noise that the tightened bounds absorb;
    // the exact check below is the judge
    t.run(Pricing::Dantzig, limit).ok()?;
    let delta: Vec<BigRational> = t
        .primal()
        .iter()
        .map(|&v| {
            let r = v.max(0.0).round();
            // beyond 2^53 integer rounding is meaningless
            (r < 9.0e15).then(|| BigRational::from_integer(BigInt::from(r as i64)))
        })
        .collect::<Option<_>>()?;
    sys.is_satisfied_by(&delta).then_some((delta, t.pivots))
}

/// Phase-1 simplex in exact rational arithmetic with Bland's rule. Runs in
/// `i128` rationals and restarts with arbitrary precision on overflow.
pub fn solve_feasibility_exact(sys: &LpSystem) -> LpOutcome {
    solve_feasibility_exact_with_stats(sys).0
}

pub fn solve_feasibility_exact_with_stats(sys: &LpSystem) -> (LpOutcome, SimplexStats) {
    if let Some(result) = solve_exact_in::<Small>(sys) {
        return result;
    }
    let (outcome, mut stats) = solve_exact_in::<BigRational>(sys).expect("arbitrary precision cannot overflow");
    stats.promoted = true;
    (outcome, stats)
}

fn solve_exact_in<F: Exact>(sys: &LpSystem) -> Option<(LpOutcome, SimplexStats)> {
    let bounds: Vec<F> = sys.rows.iter().map(|r| F::from_int(r.bound)).collect();
    let mut t = Tableau::<F>::new(sys, &bounds).ok()?;
    match t.run(Pricing::Bland, usize::MAX) {
        Ok(()) => {}
        Err(Stop::Overflow) => return None,
        Err(Stop::PivotLimit) => unreachable!("Bland's rule terminates and phase 1 is bounded"),
    }
    let stats = SimplexStats {
        pivots: t.pivots,
        float_guided: false,
        promoted: false,
    };
    Some((t.outcome(), stats))
}

/// Coordinates along the line, in ordering order.
#[derive(Debug, Clone, PartialEq)]
pub struct LineRealization {
    pub ordering: VertexOrdering,
    pub coordinates: Vec<BigRational>,
}

/// Bumps every gap by `1/n` (turning the slack `-1` rows into strict
/// inequalities with positive gaps) and takes prefix sums from zero.
pub fn extract_coordinates(delta: &[BigRational], ordering: VertexOrdering) -> LineRealization {
    let n = ordering.len();
    assert_eq!(delta.len(), n.saturating_sub(1), "one gap per consecutive pair");
    let bump = BigRational::new(BigInt::one(), BigInt::from(n.max(1)));
    let mut coordinates = Vec::with_capacity(n);
    let mut x = BigRational::zero();
    for i in 0..n {
        coordinates.push(x.clone());
        if i < delta.len() {
            x += &delta[i] + &bump;
        }
    }
    LineRealization { ordering, coordinates }
}
