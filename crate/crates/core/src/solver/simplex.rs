//! Dense two-phase tableau simplex over exact rationals, Bland's rule throughout.

use crate::formulate::Sense;
use crate::rational::Rational;

/// One row `Σ coeffs (sense) rhs` of a [`LinearProgram`].
#[derive(Debug, Clone)]
pub struct LpRow {
    pub coeffs: Vec<(usize, Rational)>,
    pub sense: Sense,
    pub rhs: Rational,
}

/// `min cost·x + offset` subject to rows and `lower <= x <= upper`.
#[derive(Debug, Clone)]
pub struct LinearProgram {
    pub ncols: usize,
    pub rows: Vec<LpRow>,
    pub cost: Vec<Rational>,
    pub lower: Vec<Rational>,
    pub upper: Vec<Option<Rational>>,
    pub offset: Rational,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone)]
pub struct LpOutcome {
    pub status: LpStatus,
    /// Column values (valid when optimal).
    pub values: Vec<Rational>,
    pub objective: Rational,
    /// One multiplier per row of the program, then one per finite upper bound
    /// in column order (valid when optimal).
    pub duals: Vec<Rational>,
    pub pivots: usize,
}

impl LinearProgram {
    pub fn new(ncols: usize) -> Self {
        LinearProgram {
            ncols,
            rows: Vec::new(),
            cost: vec![Rational::zero(); ncols],
            lower: vec![Rational::zero(); ncols],
            upper: vec![None; ncols],
            offset: Rational::zero(),
        }
    }

    pub fn add_row(&mut self, coeffs: Vec<(usize, Rational)>, sense: Sense, rhs: Rational) {
        self.rows.push(LpRow { coeffs, sense, rhs });
    }

    /// Rows plus one `x_j <= u_j` row per finite upper bound, in the order the
    /// duals of [`LpOutcome`] are reported.
    pub fn expanded_rows(&self) -> Vec<LpRow> {
        let mut rows = self.rows.clone();
        for (j, u) in self.upper.iter().enumerate() {
            if let Some(u) = u {
                rows.push(LpRow { coeffs: vec![(j, Rational::one())], sense: Sense::Le, rhs: u.clone() });
            }
        }
        rows
    }

    pub fn solve(&self) -> LpOutcome {
        self.run(false)
    }

    /// Phase one only: decides feasibility without optimising.
    pub fn is_feasible(&self) -> bool {
        self.run(true).status != LpStatus::Infeasible
    }

    fn run(&self, feasibility_only: bool) -> LpOutcome {
        let infeasible = |pivots| LpOutcome {
            status: LpStatus::Infeasible,
            values: Vec::new(),
            objective: Rational::zero(),
            duals: Vec::new(),
            pivots,
        };
        if self.upper.iter().zip(&self.lower).any(|(u, l)| u.as_ref().is_some_and(|u| u < l)) {
            return infeasible(0);
        }
        // Shift x = lower + x' so every column is bounded below by zero.
        let rows: Vec<LpRow> = self
            .expanded_rows()
            .into_iter()
            .map(|r| {
                let shift: Rational = r.coeffs.iter().map(|(j, a)| a * &self.lower[*j]).sum();
                LpRow { rhs: &r.rhs - &shift, ..r }
            })
            .collect();
        let mut tableau = Tableau::new(self.ncols, &rows);
        if !tableau.phase_one() {
            return infeasible(tableau.pivots);
        }
        let mut x = tableau.primal();
        if feasibility_only {
            for (v, l) in x.iter_mut().zip(&self.lower) {
                *v += l;
            }
            return LpOutcome {
                status: LpStatus::Optimal,
                values: x,
                objective: Rational::zero(),
                duals: Vec::new(),
                pivots: tableau.pivots,
            };
        }
        if !tableau.phase_two(&self.cost) {
            return LpOutcome {
                status: LpStatus::Unbounded,
                values: Vec::new(),
                objective: Rational::zero(),
                duals: Vec::new(),
                pivots: tableau.pivots,
            };
        }
        x = tableau.primal();
        for (v, l) in x.iter_mut().zip(&self.lower) {
            *v += l;
        }
        let objective: Rational = &self.offset + &x.iter().zip(&self.cost).map(|(v, c)| v * c).sum::<Rational>();
        let duals = tableau.duals();
        LpOutcome { status: LpStatus::Optimal, values: x, objective, duals, pivots: tableau.pivots }
    }
}

struct Tableau {
    /// Structural columns.
    n: usize,
    /// Total columns: structural, slack, artificial.
    width: usize,
    first_artificial: usize,
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
    /// Reduced costs of the current phase.
    reduced: Vec<Rational>,
    /// Initial identity column of each row and whether the row was negated.
    unit_col: Vec<usize>,
    negated: Vec<bool>,
    pivots: usize,
}

impl Tableau {
    fn new(n: usize, rows: &[LpRow]) -> Self {
        let m = rows.len();
        let slack_count = rows.iter().filter(|r| r.sense != Sense::Eq).count();
        let mut negated = Vec::with_capacity(m);
        let mut slack_sign = Vec::with_capacity(m);
        let mut needs_artificial = Vec::with_capacity(m);
        for r in rows {
            let neg = r.rhs.is_negative();
            negated.push(neg);
            let sign = match r.sense {
                Sense::Le => Some(if neg { -1 } else { 1 }),
                Sense::Ge => Some(if neg { 1 } else { -1 }),
                Sense::Eq => None,
            };
            needs_artificial.push(sign != Some(1));
            slack_sign.push(sign);
        }
        let artificial_count = needs_artificial.iter().filter(|&&b| b).count();
        let first_artificial = n + slack_count;
        let width = first_artificial + artificial_count;

        let mut table = vec![vec![Rational::zero(); width]; m];
        let mut rhs = Vec::with_capacity(m);
        let mut basis = Vec::with_capacity(m);
        let mut unit_col = Vec::with_capacity(m);
        let (mut next_slack, mut next_art) = (n, first_artificial);
        for (i, r) in rows.iter().enumerate() {
            let flip = |v: &Rational| if negated[i] { -v } else { v.clone() };
            for (j, a) in &r.coeffs {
                table[i][*j] += flip(a);
            }
            rhs.push(flip(&r.rhs));
            if let Some(sign) = slack_sign[i] {
                table[i][next_slack] = Rational::from_integer(sign);
                if sign == 1 {
                    basis.push(next_slack);
                    unit_col.push(next_slack);
                }
                next_slack += 1;
            }
            if needs_artificial[i] {
                table[i][next_art] = Rational::one();
                basis.push(next_art);
                unit_col.push(next_art);
                next_art += 1;
            }
        }
        Tableau {
            n,
            width,
            first_artificial,
            rows: table,
            rhs,
            basis,
            reduced: vec![Rational::zero(); width],
            unit_col,
            negated,
            pivots: 0,
        }
    }

    fn set_costs(&mut self, cost: impl Fn(usize) -> Rational) {
        let mut reduced: Vec<Rational> = (0..self.width).map(&cost).collect();
        for (i, &b) in self.basis.iter().enumerate() {
            let cb = cost(b);
            if cb.is_zero() {
                continue;
            }
            for (j, a) in self.rows[i].iter().enumerate() {
                if !a.is_zero() {
                    reduced[j] -= &cb * a;
                }
            }
        }
        self.reduced = reduced;
    }

    fn objective_value(&self, cost: impl Fn(usize) -> Rational) -> Rational {
        self.basis.iter().zip(&self.rhs).map(|(&b, v)| cost(b) * v).sum()
    }

    fn pivot(&mut self, row: usize, col: usize) {
        self.pivots += 1;
        let inv = self.rows[row][col].recip();
        let nonzero: Vec<usize> = (0..self.width).filter(|&j| !self.rows[row][j].is_zero()).collect();
        for &j in &nonzero {
            self.rows[row][j] *= &inv;
        }
        self.rhs[row] *= &inv;
        let pivot_row = self.rows[row].clone();
        let pivot_rhs = self.rhs[row].clone();
        for i in 0..self.rows.len() {
            if i == row || self.rows[i][col].is_zero() {
                continue;
            }
            let factor = self.rows[i][col].clone();
            for &j in &nonzero {
                let delta = &factor * &pivot_row[j];
                self.rows[i][j] -= delta;
            }
            let delta = &factor * &pivot_rhs;
            self.rhs[i] -= delta;
        }
        if !self.reduced[col].is_zero() {
            let factor = self.reduced[col].clone();
            for &j in &nonzero {
                let delta = &factor * &pivot_row[j];
                self.reduced[j] -= delta;
            }
        }
        self.basis[row] = col;
    }

    /// Bland's rule iterations; artificial columns never enter.
    /// Returns false when the objective is unbounded below.
    fn iterate(&mut self) -> bool {
        loop {
            let entering = (0..self.first_artificial).find(|&j| self.reduced[j].is_negative());
            let Some(col) = entering else { return true };
            let mut best: Option<(usize, Rational)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][col];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.rhs[i] / a;
                let better = match &best {
                    None => true,
                    Some((bi, br)) => ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi]),
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            match best {
                Some((row, _)) => self.pivot(row, col),
                None => return false,
            }
        }
    }

    fn phase_one(&mut self) -> bool {
        let first_art = self.first_artificial;
        let cost = |j: usize| if j >= first_art { Rational::one() } else { Rational::zero() };
        self.set_costs(cost);
        self.iterate();
        if self.objective_value(cost).is_positive() {
            return false;
        }
        // Drive zero-valued artificials out of the basis where possible; rows
        // with no structural or slack entry left are redundant and stay inert.
        for i in 0..self.rows.len() {
            if self.basis[i] >= first_art {
                if let Some(col) = (0..first_art).find(|&j| !self.rows[i][j].is_zero()) {
                    self.pivot(i, col);
                }
            }
        }
        true
    }

    fn phase_two(&mut self, cost: &[Rational]) -> bool {
        let n = self.n;
        self.set_costs(|j| if j < n { cost[j].clone() } else { Rational::zero() });
        self.iterate()
    }

    fn primal(&self) -> Vec<Rational> {
        let mut x = vec![Rational::zero(); self.n];
        for (i, &b) in self.basis.iter().enumerate() {
            if b < self.n {
                x[b] = self.rhs[i].clone();
            }
        }
        x
    }

    /// `π_i = -d_{unit(i)}`, mapped back through row negation.
    fn duals(&self) -> Vec<Rational> {
        self.unit_col
            .iter()
            .zip(&self.negated)
            .map(|(&col, &neg)| if neg { self.reduced[col].clone() } else { -&self.reduced[col] })
            .collect()
    }
}
