//! Generic linear programs and a dense two-phase simplex solver.
//!
//! Problems are stated in either sense over nonnegative (or explicitly free)
//! variables subject to `<=`, `>=`, and `=` rows. The solver reports primal
//! values, row duals, and a status; it never panics on infeasible, unbounded,
//! or stalled instances.
//!
//! Dual sign convention: duals are shadow prices in the problem's own sense,
//! `y_r = d(optimal objective) / d(rhs_r)`. Minimizing, `>=` rows carry
//! nonnegative duals and `<=` rows nonpositive ones; maximizing, the signs
//! swap. `=` rows are unrestricted either way.

use std::fmt::Write as _;

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

impl Relation {
    fn symbol(self) -> &'static str {
        match self {
            Relation::Le => "<=",
            Relation::Ge => ">=",
            Relation::Eq => "=",
        }
    }

    fn flip(self) -> Relation {
        match self {
            Relation::Le => Relation::Ge,
            Relation::Ge => Relation::Le,
            Relation::Eq => Relation::Eq,
        }
    }
}

/// One row `coeffs . v  (relation)  rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Min,
    Max,
}

/// Optimize `objective . v` in the given sense subject to `constraints`;
/// variables are nonnegative unless flagged free.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    pub sense: Sense,
    pub objective: Vec<f64>,
    pub constraints: Vec<Constraint>,
    pub free_vars: Vec<bool>,
    /// Optional variable names for the text dump; defaults to `v1, v2, ...`.
    pub names: Option<Vec<String>>,
}

impl LinearProgram {
    pub fn new(objective: Vec<f64>) -> Self {
        Self::with_sense(Sense::Min, objective)
    }

    pub fn maximize(objective: Vec<f64>) -> Self {
        Self::with_sense(Sense::Max, objective)
    }

    fn with_sense(sense: Sense, objective: Vec<f64>) -> Self {
        let n = objective.len();
        LinearProgram {
            sense,
            objective,
            constraints: Vec::new(),
            free_vars: vec![false; n],
            names: None,
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn push(&mut self, coeffs: Vec<f64>, relation: Relation, rhs: f64) {
        self.constraints.push(Constraint {
            coeffs,
            relation,
            rhs,
        });
    }

    pub fn mark_free(&mut self, var: usize) {
        self.free_vars[var] = true;
    }

    fn validate(&self) -> Result<()> {
        let n = self.num_vars();
        if n == 0 {
            return Err(Error::InvalidArgument(
                "linear program has no variables".into(),
            ));
        }
        if self.free_vars.len() != n {
            return Err(Error::InvalidArgument(format!(
                "free-variable flags cover {} of {} variables",
                self.free_vars.len(),
                n
            )));
        }
        if let Some(names) = &self.names {
            if names.len() != n {
                return Err(Error::InvalidArgument(format!(
                    "{} names for {} variables",
                    names.len(),
                    n
                )));
            }
        }
        if self.objective.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidArgument(
                "objective has a non-finite coefficient".into(),
            ));
        }
        for (r, row) in self.constraints.iter().enumerate() {
            if row.coeffs.len() != n {
                return Err(Error::InvalidArgument(format!(
                    "row {} has {} coefficients for {} variables",
                    r + 1,
                    row.coeffs.len(),
                    n
                )));
            }
            if row.coeffs.iter().any(|c| !c.is_finite()) || !row.rhs.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "row {} has a non-finite entry",
                    r + 1
                )));
            }
        }
        Ok(())
    }

    fn var_name(&self, j: usize) -> String {
        match &self.names {
            Some(names) => names[j].clone(),
            None => format!("v{}", j + 1),
        }
    }

    /// Human-readable dump in the common LP text layout, for debugging.
    pub fn to_lp_text(&self) -> String {
        let mut out = String::new();
        out.push_str(match self.sense {
            Sense::Min => "Minimize",
            Sense::Max => "Maximize",
        });
        out.push_str("\n obj:");
        let mut first = true;
        for (j, &c) in self.objective.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            write_term(&mut out, c, &self.var_name(j), first);
            first = false;
        }
        if first {
            out.push_str(" 0");
        }
        out.push_str("\nSubject To\n");
        for (r, row) in self.constraints.iter().enumerate() {
            let _ = write!(out, " r{}:", r + 1);
            let mut first = true;
            for (j, &c) in row.coeffs.iter().enumerate() {
                if c == 0.0 {
                    continue;
                }
                write_term(&mut out, c, &self.var_name(j), first);
                first = false;
            }
            if first {
                out.push_str(" 0");
            }
            let _ = writeln!(out, " {} {}", row.relation.symbol(), row.rhs);
        }
        let free: Vec<_> = (0..self.num_vars())
            .filter(|&j| self.free_vars[j])
            .collect();
        if !free.is_empty() {
            out.push_str("Bounds\n");
            for j in free {
                let _ = writeln!(out, " {} free", self.var_name(j));
            }
        }
        out.push_str("End\n");
        out
    }
}

fn write_term(out: &mut String, c: f64, name: &str, first: bool) {
    if first {
        if c < 0.0 {
            let _ = write!(out, " - {} {}", -c, name);
        } else {
            let _ = write!(out, " {} {}", c, name);
        }
    } else if c < 0.0 {
        let _ = write!(out, " - {} {}", -c, name);
    } else {
        let _ = write!(out, " + {} {}", c, name);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    /// The pivot budget ran out before optimality was proved.
    Stalled,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub status: LpStatus,
    /// `objective . variables` when optimal, NaN otherwise.
    pub objective: f64,
    pub variables: Vec<f64>,
    /// One dual per input row, in the convention documented at module level.
    pub duals: Vec<f64>,
    /// True when the returned point is a basic feasible solution (a vertex);
    /// the simplex method always ends on one.
    pub basic: bool,
    pub pivots: usize,
}

impl LpSolution {
    fn failed(status: LpStatus, pivots: usize) -> Self {
        LpSolution {
            status,
            objective: f64::NAN,
            variables: Vec::new(),
            duals: Vec::new(),
            basic: false,
            pivots,
        }
    }
}

pub trait LpSolver {
    fn solve(&self, lp: &LinearProgram) -> Result<LpSolution>;
}

#[derive(Debug, Clone, Copy)]
pub struct SimplexOptions {
    /// Total pivot budget across both phases; exceeding it yields `Stalled`.
    pub max_pivots: usize,
    /// Row activity within this of the rhs counts as feasible.
    pub feas_tol: f64,
    /// Reduced costs above `-opt_tol` count as optimal.
    pub opt_tol: f64,
    /// Consecutive degenerate pivots before switching to Bland's rule.
    pub degeneracy_threshold: usize,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        SimplexOptions {
            max_pivots: 10_000,
            feas_tol: 1e-9,
            opt_tol: 1e-9,
            degeneracy_threshold: 50,
        }
    }
}

/// Tableau simplex over dense rows. Dantzig pricing with an automatic switch
/// to Bland's rule after a run of degenerate pivots, so cycling terminates.
#[derive(Debug, Clone, Copy, Default)]
pub struct DenseSimplex {
    pub options: SimplexOptions,
}

impl LpSolver for DenseSimplex {
    fn solve(&self, lp: &LinearProgram) -> Result<LpSolution> {
        lp.validate()?;
        Ok(Tableau::build(lp, self.options).run(lp))
    }
}

enum PivotOutcome {
    Optimal,
    Unbounded,
    Stalled,
}

struct Tableau {
    /// `m` constraint rows, each `ncols + 1` wide with the rhs last.
    rows: Vec<Vec<f64>>,
    /// Reduced costs of the real objective, entry `ncols` is minus its value.
    cost: Vec<f64>,
    /// Same layout for the phase-1 objective while artificials remain.
    phase1: Option<Vec<f64>>,
    basis: Vec<usize>,
    is_artificial: Vec<bool>,
    /// Original row index for each tableau row; redundant rows get dropped.
    row_origin: Vec<usize>,
    /// Per original row: the column that held its slot of the initial
    /// identity basis, where the dual is read off at the end.
    init_col: Vec<usize>,
    /// Per original row: whether preprocessing negated it (rhs was negative).
    negated: Vec<bool>,
    /// Per original variable: plus column, and minus column if free.
    var_cols: Vec<(usize, Option<usize>)>,
    pivots: usize,
    degen_streak: usize,
    opts: SimplexOptions,
}

impl Tableau {
    fn build(lp: &LinearProgram, opts: SimplexOptions) -> Tableau {
        let n = lp.num_vars();
        let m = lp.constraints.len();

        let mut var_cols = Vec::with_capacity(n);
        let mut ncols = 0;
        for j in 0..n {
            let plus = ncols;
            ncols += 1;
            let minus = if lp.free_vars[j] {
                ncols += 1;
                Some(ncols - 1)
            } else {
                None
            };
            var_cols.push((plus, minus));
        }
        let slack_base = ncols;
        let num_slack = lp
            .constraints
            .iter()
            .filter(|c| c.relation != Relation::Eq)
            .count();
        ncols += num_slack;
        let art_base = ncols;

        let mut rows = Vec::with_capacity(m);
        let mut basis = Vec::with_capacity(m);
        let mut init_col = Vec::with_capacity(m);
        let mut negated = Vec::with_capacity(m);
        let mut num_art = 0;
        let mut slack_used = 0;

        // first pass to count artificials so every row can be full width
        for c in &lp.constraints {
            let rel = if c.rhs < 0.0 {
                c.relation.flip()
            } else {
                c.relation
            };
            if rel != Relation::Le {
                num_art += 1;
            }
        }
        let width = art_base + num_art + 1;
        let mut art_used = 0;

        for c in &lp.constraints {
            let flip = c.rhs < 0.0;
            let sign = if flip { -1.0 } else { 1.0 };
            let rel = if flip { c.relation.flip() } else { c.relation };
            let mut row = vec![0.0; width];
            for (j, &(plus, minus)) in var_cols.iter().enumerate() {
                let a = sign * c.coeffs[j];
                row[plus] = a;
                if let Some(mcol) = minus {
                    row[mcol] = -a;
                }
            }
            row[width - 1] = sign * c.rhs;
            match rel {
                Relation::Le => {
                    let s = slack_base + slack_used;
                    slack_used += 1;
                    row[s] = 1.0;
                    basis.push(s);
                    init_col.push(s);
                }
                Relation::Ge => {
                    let s = slack_base + slack_used;
                    slack_used += 1;
                    row[s] = -1.0;
                    let a = art_base + art_used;
                    art_used += 1;
                    row[a] = 1.0;
                    basis.push(a);
                    init_col.push(a);
                }
                Relation::Eq => {
                    let a = art_base + art_used;
                    art_used += 1;
                    row[a] = 1.0;
                    basis.push(a);
                    init_col.push(a);
                }
            }
            negated.push(flip);
            rows.push(row);
        }

        let ncols = art_base + num_art;
        let mut is_artificial = vec![false; ncols];
        is_artificial[art_base..ncols].fill(true);

        // real objective (negated for Max: the tableau always minimizes) as
        // reduced costs; initial basic columns all cost 0, so no reduction
        // is needed yet
        let dir = match lp.sense {
            Sense::Min => 1.0,
            Sense::Max => -1.0,
        };
        let mut cost = vec![0.0; width];
        for (j, &(plus, minus)) in var_cols.iter().enumerate() {
            cost[plus] = dir * lp.objective[j];
            if let Some(mcol) = minus {
                cost[mcol] = -dir * lp.objective[j];
            }
        }

        // phase-1 objective: sum of artificials, reduced over the basis
        let phase1 = if num_art > 0 {
            let mut p1 = vec![0.0; width];
            p1[art_base..ncols].fill(1.0);
            for (r, &b) in basis.iter().enumerate() {
                if is_artificial[b] {
                    for j in 0..width {
                        p1[j] -= rows[r][j];
                    }
                }
            }
            Some(p1)
        } else {
            None
        };

        Tableau {
            rows,
            cost,
            phase1,
            basis,
            is_artificial,
            row_origin: (0..m).collect(),
            init_col,
            negated,
            var_cols,
            pivots: 0,
            degen_streak: 0,
            opts,
        }
    }

    fn width(&self) -> usize {
        self.cost.len()
    }

    fn ncols(&self) -> usize {
        self.width() - 1
    }

    fn run(mut self, lp: &LinearProgram) -> LpSolution {
        if self.phase1.is_some() {
            match self.iterate(true) {
                PivotOutcome::Optimal => {}
                PivotOutcome::Stalled => return LpSolution::failed(LpStatus::Stalled, self.pivots),
                PivotOutcome::Unbounded => {
                    // phase-1 objective is bounded below by zero
                    unreachable!("phase 1 cannot be unbounded")
                }
            }
            let infeas = -self.phase1.as_ref().expect("phase 1 active")[self.width() - 1];
            if infeas > self.opts.feas_tol {
                return LpSolution::failed(LpStatus::Infeasible, self.pivots);
            }
            self.evict_artificials();
            self.phase1 = None;
        }

        match self.iterate(false) {
            PivotOutcome::Optimal => self.extract(lp),
            PivotOutcome::Unbounded => LpSolution::failed(LpStatus::Unbounded, self.pivots),
            PivotOutcome::Stalled => LpSolution::failed(LpStatus::Stalled, self.pivots),
        }
    }

    fn iterate(&mut self, phase_one: bool) -> PivotOutcome {
        loop {
            if self.pivots >= self.opts.max_pivots {
                return PivotOutcome::Stalled;
            }
            let bland = self.degen_streak >= self.opts.degeneracy_threshold;
            let Some(col) = self.entering(phase_one, bland) else {
                return PivotOutcome::Optimal;
            };
            let Some(row) = self.leaving(col) else {
                return PivotOutcome::Unbounded;
            };
            let degenerate = self.rows[row][self.width() - 1].abs() <= 1e-12;
            self.pivot(row, col);
            if degenerate {
                self.degen_streak += 1;
            } else {
                self.degen_streak = 0;
            }
        }
    }

    /// Entering column, or None at optimality. Artificials never re-enter.
    fn entering(&self, phase_one: bool, bland: bool) -> Option<usize> {
        let obj: &[f64] = if phase_one {
            self.phase1.as_ref().expect("phase 1 active")
        } else {
            &self.cost
        };
        let tol = self.opts.opt_tol;
        let mut best: Option<usize> = None;
        for j in 0..self.ncols() {
            if self.is_artificial[j] || obj[j] >= -tol {
                continue;
            }
            if bland {
                return Some(j);
            }
            match best {
                Some(b) if obj[b] <= obj[j] => {}
                _ => best = Some(j),
            }
        }
        best
    }

    /// Ratio test; ties break toward the smallest basis index so Bland's
    /// rule is honored whenever it is in force.
    fn leaving(&self, col: usize) -> Option<usize> {
        let width = self.width();
        let mut best: Option<(usize, f64)> = None;
        for r in 0..self.rows.len() {
            let a = self.rows[r][col];
            if a <= 1e-11 {
                continue;
            }
            let ratio = self.rows[r][width - 1] / a;
            match best {
                None => best = Some((r, ratio)),
                Some((br, bratio)) => {
                    if ratio < bratio - 1e-12
                        || (ratio <= bratio + 1e-12 && self.basis[r] < self.basis[br])
                    {
                        best = Some((r, ratio));
                    }
                }
            }
        }
        best.map(|(r, _)| r)
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let width = self.width();
        let piv = self.rows[row][col];
        for j in 0..width {
            self.rows[row][j] /= piv;
        }
        self.rows[row][col] = 1.0; // exact after division
        for r in 0..self.rows.len() {
            if r == row {
                continue;
            }
            let factor = self.rows[r][col];
            if factor != 0.0 {
                for j in 0..width {
                    self.rows[r][j] -= factor * self.rows[row][j];
                }
                self.rows[r][col] = 0.0;
            }
        }
        let factor = self.cost[col];
        if factor != 0.0 {
            for j in 0..width {
                self.cost[j] -= factor * self.rows[row][j];
            }
            self.cost[col] = 0.0;
        }
        if let Some(p1) = &mut self.phase1 {
            let factor = p1[col];
            if factor != 0.0 {
                for (pj, &rj) in p1.iter_mut().zip(self.rows[row].iter()) {
                    *pj -= factor * rj;
                }
                p1[col] = 0.0;
            }
        }
        self.basis[row] = col;
        self.pivots += 1;
    }

    /// After phase 1: pivot zero-level artificials out of the basis; rows
    /// that offer no real pivot are redundant and are dropped.
    fn evict_artificials(&mut self) {
        let mut r = 0;
        while r < self.rows.len() {
            if !self.is_artificial[self.basis[r]] {
                r += 1;
                continue;
            }
            let col =
                (0..self.ncols()).find(|&j| !self.is_artificial[j] && self.rows[r][j].abs() > 1e-9);
            match col {
                Some(col) => {
                    // rhs is zero here, so this degenerate pivot keeps the
                    // other rows' values intact whatever the entry's sign
                    self.pivot(r, col);
                    r += 1;
                }
                None => {
                    self.rows.remove(r);
                    self.basis.remove(r);
                    self.row_origin.remove(r);
                }
            }
        }
    }

    fn extract(&self, lp: &LinearProgram) -> LpSolution {
        let width = self.width();
        let mut w = vec![0.0; self.ncols()];
        for (r, &b) in self.basis.iter().enumerate() {
            w[b] = self.rows[r][width - 1];
        }
        let variables: Vec<f64> = self
            .var_cols
            .iter()
            .map(|&(plus, minus)| w[plus] - minus.map_or(0.0, |m| w[m]))
            .collect();
        let objective = lp
            .objective
            .iter()
            .zip(&variables)
            .map(|(c, v)| c * v)
            .sum();

        // the reduced cost under original row r's identity column is -y_r;
        // for Max the tableau minimized the negated objective, so flip back
        let dir = match lp.sense {
            Sense::Min => 1.0,
            Sense::Max => -1.0,
        };
        let mut duals = vec![0.0; lp.constraints.len()];
        let live: std::collections::HashSet<usize> = self.row_origin.iter().copied().collect();
        for (orig, dual) in duals.iter_mut().enumerate() {
            if !live.contains(&orig) {
                continue; // redundant row, shadow price zero
            }
            let y = -self.cost[self.init_col[orig]];
            *dual = dir * if self.negated[orig] { -y } else { y };
        }

        LpSolution {
            status: LpStatus::Optimal,
            objective,
            variables,
            duals,
            basic: true,
            pivots: self.pivots,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn solve(lp: &LinearProgram) -> LpSolution {
        DenseSimplex::default().solve(lp).unwrap()
    }

    #[test]
    fn bounded_two_var_optimum_and_duals() {
        let mut lp = LinearProgram::new(vec![-1.0, -2.0]);
        lp.push(vec![1.0, 1.0], Relation::Le, 4.0);
        lp.push(vec![0.0, 1.0], Relation::Le, 2.0);
        let sol = solve(&lp);
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.objective + 6.0).abs() < 1e-9);
        assert!((sol.variables[0] - 2.0).abs() < 1e-9);
        assert!((sol.variables[1] - 2.0).abs() < 1e-9);
        // relaxing either rhs by one lowers the optimum by one
        assert!((sol.duals[0] + 1.0).abs() < 1e-9);
        assert!((sol.duals[1] + 1.0).abs() < 1e-9);
    }

    #[test]
    fn ge_rows_and_equalities() {
        // min v subject to v >= 3, v >= 5
        let mut lp = LinearProgram::new(vec![1.0]);
        lp.push(vec![1.0], Relation::Ge, 3.0);
        lp.push(vec![1.0], Relation::Ge, 5.0);
        let sol = solve(&lp);
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.objective - 5.0).abs() < 1e-9);
        assert!((sol.duals[0]).abs() < 1e-9);
        assert!((sol.duals[1] - 1.0).abs() < 1e-9);

        // equality pins a free variable
        let mut lp = LinearProgram::new(vec![1.0]);
        lp.mark_free(0);
        lp.push(vec![1.0], Relation::Eq, -7.0);
        let sol = solve(&lp);
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.variables[0] + 7.0).abs() < 1e-9);
        assert!((sol.duals[0] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn maximization_flips_conventions() {
        let mut lp = LinearProgram::maximize(vec![3.0, 5.0]);
        lp.push(vec![1.0, 0.0], Relation::Le, 4.0);
        lp.push(vec![0.0, 2.0], Relation::Le, 12.0);
        lp.push(vec![3.0, 2.0], Relation::Le, 18.0);
        let sol = solve(&lp);
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!(sol.basic);
        assert!((sol.objective - 36.0).abs() < 1e-9);
        assert!((sol.variables[0] - 2.0).abs() < 1e-9);
        assert!((sol.variables[1] - 6.0).abs() < 1e-9);
        // shadow prices of a maximum: slack row 0, binding rows positive
        assert!(sol.duals[0].abs() < 1e-9);
        assert!((sol.duals[1] - 1.5).abs() < 1e-9);
        assert!((sol.duals[2] - 1.0).abs() < 1e-9);
        assert!(lp.to_lp_text().starts_with("Maximize\n"));
    }

    #[test]
    fn infeasible_is_reported() {
        let mut lp = LinearProgram::new(vec![1.0, 1.0]);
        lp.push(vec![1.0, 1.0], Relation::Le, 1.0);
        lp.push(vec![1.0, 1.0], Relation::Ge, 2.0);
        let sol = solve(&lp);
        assert_eq!(sol.status, LpStatus::Infeasible);
        assert!(sol.objective.is_nan());
        assert!(sol.variables.is_empty());
    }

    #[test]
    fn unbounded_is_reported() {
        let mut lp = LinearProgram::new(vec![-1.0, 0.0]);
        lp.push(vec![0.0, 1.0], Relation::Le, 1.0);
        let sol = solve(&lp);
        assert_eq!(sol.status, LpStatus::Unbounded);
    }

    #[test]
    fn pivot_budget_yields_stalled() {
        let solver = DenseSimplex {
            options: SimplexOptions {
                max_pivots: 1,
                ..SimplexOptions::default()
            },
        };
        let mut lp = LinearProgram::new(vec![-1.0, -2.0]);
        lp.push(vec![1.0, 1.0], Relation::Le, 4.0);
        lp.push(vec![0.0, 1.0], Relation::Le, 2.0);
        let sol = solver.solve(&lp).unwrap();
        assert_eq!(sol.status, LpStatus::Stalled);
    }

    #[test]
    fn degenerate_cycling_instance_terminates() {
        // Beale's example: Dantzig pricing alone can cycle here
        let mut lp = LinearProgram::new(vec![-0.75, 150.0, -0.02, 6.0]);
        lp.push(vec![0.25, -60.0, -0.04, 9.0], Relation::Le, 0.0);
        lp.push(vec![0.5, -90.0, -0.02, 3.0], Relation::Le, 0.0);
        lp.push(vec![0.0, 0.0, 1.0, 0.0], Relation::Le, 1.0);
        let sol = solve(&lp);
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.objective + 0.05).abs() < 1e-9, "got {}", sol.objective);
    }

    #[test]
    fn redundant_equality_rows_are_dropped() {
        let mut lp = LinearProgram::new(vec![1.0, 1.0]);
        lp.push(vec![1.0, 1.0], Relation::Eq, 1.0);
        lp.push(vec![2.0, 2.0], Relation::Eq, 2.0);
        let sol = solve(&lp);
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.objective - 1.0).abs() < 1e-9);
        assert_eq!(sol.duals.len(), 2);
    }

    #[test]
    fn rejects_malformed_input() {
        let lp = LinearProgram::new(vec![]);
        assert!(solve_checked(&lp).is_err());
        let mut lp = LinearProgram::new(vec![1.0]);
        lp.push(vec![1.0, 2.0], Relation::Le, 1.0);
        assert!(solve_checked(&lp).is_err());
        let mut lp = LinearProgram::new(vec![f64::NAN]);
        lp.push(vec![1.0], Relation::Le, 1.0);
        assert!(solve_checked(&lp).is_err());
    }

    fn solve_checked(lp: &LinearProgram) -> crate::Result<LpSolution> {
        DenseSimplex::default().solve(lp)
    }

    #[test]
    fn lp_text_dump_layout() {
        let mut lp = LinearProgram::new(vec![1.0, -2.0, 0.0]);
        lp.mark_free(2);
        lp.push(vec![1.0, 1.0, -1.0], Relation::Le, 4.0);
        lp.names = Some(vec!["x".into(), "y".into(), "d".into()]);
        let text = lp.to_lp_text();
        assert!(text.starts_with("Minimize\n obj: 1 x - 2 y\n"));
        assert!(text.contains(" r1: 1 x + 1 y - 1 d <= 4\n"));
        assert!(text.contains("Bounds\n d free\n"));
        assert!(text.ends_with("End\n"));
    }

    fn activity(row: &Constraint, v: &[f64]) -> f64 {
        row.coeffs.iter().zip(v).map(|(a, x)| a * x).sum()
    }

    /// Optimality certificates for a solved LP: primal and dual feasibility,
    /// matching objectives, and complementary slackness.
    fn assert_certificates(lp: &LinearProgram, sol: &LpSolution) {
        let v = &sol.variables;
        let y = &sol.duals;
        for (j, &x) in v.iter().enumerate() {
            if !lp.free_vars[j] {
                assert!(x >= -1e-7, "variable {} negative: {}", j + 1, x);
            }
        }
        for (r, row) in lp.constraints.iter().enumerate() {
            let act = activity(row, v);
            match row.relation {
                Relation::Le => {
                    assert!(act <= row.rhs + 1e-6, "row {} violated", r + 1);
                    assert!(y[r] <= 1e-7, "row {} dual sign", r + 1);
                }
                Relation::Ge => {
                    assert!(act >= row.rhs - 1e-6, "row {} violated", r + 1);
                    assert!(y[r] >= -1e-7, "row {} dual sign", r + 1);
                }
                Relation::Eq => {
                    assert!((act - row.rhs).abs() <= 1e-6, "row {} violated", r + 1);
                }
            }
            if y[r].abs() > 1e-6 && row.relation != Relation::Eq {
                assert!(
                    (act - row.rhs).abs() <= 1e-5,
                    "row {} slack with nonzero dual {}",
                    r + 1,
                    y[r]
                );
            }
        }
        for (j, &vj) in v.iter().enumerate() {
            let reduced: f64 = lp.objective[j]
                - (0..y.len())
                    .map(|r| y[r] * lp.constraints[r].coeffs[j])
                    .sum::<f64>();
            if lp.free_vars[j] {
                assert!(
                    reduced.abs() <= 1e-6,
                    "free var {} reduced cost {}",
                    j + 1,
                    reduced
                );
            } else {
                assert!(reduced >= -1e-6, "var {} reduced cost {}", j + 1, reduced);
                if vj > 1e-6 {
                    assert!(reduced.abs() <= 1e-5, "var {} slack in dual", j + 1);
                }
            }
        }
        let dual_obj: f64 = (0..y.len()).map(|r| y[r] * lp.constraints[r].rhs).sum();
        assert!(
            (sol.objective - dual_obj).abs() <= 1e-6 * sol.objective.abs().max(1.0),
            "duality gap: {} vs {}",
            sol.objective,
            dual_obj
        );
    }

    #[test]
    fn certificates_on_mixed_relation_instance() {
        let mut lp = LinearProgram::new(vec![2.0, 3.0, -1.0]);
        lp.mark_free(2);
        lp.push(vec![1.0, 1.0, 1.0], Relation::Eq, 10.0);
        lp.push(vec![1.0, 0.0, -1.0], Relation::Ge, 2.0);
        lp.push(vec![0.0, 1.0, 2.0], Relation::Le, 8.0);
        let sol = solve(&lp);
        assert_eq!(sol.status, LpStatus::Optimal);
        assert_certificates(&lp, &sol);
    }

    fn arb_lp() -> impl Strategy<Value = LinearProgram> {
        let dims = (1usize..4, 1usize..5);
        dims.prop_flat_map(|(n, m)| {
            let coeff = -3i32..4;
            let objective = prop::collection::vec(coeff.clone().prop_map(f64::from), n);
            let rows = prop::collection::vec(
                (
                    prop::collection::vec(coeff.clone().prop_map(f64::from), n),
                    prop_oneof![Just(Relation::Le), Just(Relation::Ge), Just(Relation::Eq)],
                    (-3i32..4).prop_map(f64::from),
                ),
                m,
            );
            let free = prop::collection::vec(any::<bool>(), n);
            (objective, rows, free).prop_map(|(objective, rows, free)| {
                let mut lp = LinearProgram::new(objective);
                lp.free_vars = free;
                for (coeffs, rel, rhs) in rows {
                    lp.push(coeffs, rel, rhs);
                }
                lp
            })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(256))]
        #[test]
        fn random_instances_certify(lp in arb_lp()) {
            let sol = solve(&lp);
            if sol.status == LpStatus::Optimal {
                assert_certificates(&lp, &sol);
            }
        }
    }
}
