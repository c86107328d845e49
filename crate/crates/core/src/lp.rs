//! Exact feasibility of `A x = b, x ≥ 0` over the rationals.
//!
//! Phase-1 simplex on a dense tableau with Bland's rule. An infeasible
//! system yields a Farkas certificate `y` with `Aᵀy ≥ 0` and `bᵀy < 0`,
//! which can be re-checked without trusting the solver.

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::semiring::Rational;

/// An equality system `A x = b` with nonnegative unknowns.
#[derive(Debug, Clone, PartialEq)]
pub struct EqualitySystem {
    columns: usize,
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
}

impl EqualitySystem {
    pub fn new(columns: usize) -> Self {
        EqualitySystem { columns, rows: Vec::new(), rhs: Vec::new() }
    }

    pub fn push_row(&mut self, coefficients: Vec<Rational>, rhs: Rational) -> Result<()> {
        if coefficients.len() != self.columns {
            return Err(Error::Argument(format!(
                "row has {} coefficients, system has {} unknowns",
                coefficients.len(),
                self.columns
            )));
        }
        self.rows.push(coefficients);
        self.rhs.push(rhs);
        Ok(())
    }

    pub fn columns(&self) -> usize {
        self.columns
    }

    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<Rational>] {
        &self.rows
    }

    pub fn rhs(&self) -> &[Rational] {
        &self.rhs
    }

    /// Whether `x ≥ 0` and `A x = b`.
    pub fn is_solution(&self, x: &[Rational]) -> bool {
        x.len() == self.columns
            && x.iter().all(|v| !v.is_negative())
            && self.rows.iter().zip(&self.rhs).all(|(row, b)| {
                let lhs: Rational = row.iter().zip(x).map(|(a, v)| a * v).sum();
                lhs == *b
            })
    }
}

/// `y` with `Aᵀy ≥ 0` and `bᵀy < 0`: no nonnegative `x` can satisfy `A x = b`.
#[derive(Debug, Clone, PartialEq)]
pub struct FarkasCertificate {
    pub multipliers: Vec<Rational>,
}

impl FarkasCertificate {
    /// Re-checks the certificate against `system`.
    pub fn verify(&self, system: &EqualitySystem) -> bool {
        if self.multipliers.len() != system.row_count() {
            return false;
        }
        let combined_rhs: Rational = self.multipliers.iter().zip(&system.rhs).map(|(y, b)| y * b).sum();
        if !combined_rhs.is_negative() {
            return false;
        }
        (0..system.columns).all(|j| {
            let c: Rational = self.multipliers.iter().zip(&system.rows).map(|(y, row)| y * &row[j]).sum();
            !c.is_negative()
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Feasibility {
    Feasible(Vec<Rational>),
    Infeasible(FarkasCertificate),
}

impl Feasibility {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Feasibility::Feasible(_))
    }
}

/// Decides `∃x ≥ 0: A x = b` exactly.
pub fn solve_feasibility(system: &EqualitySystem) -> Feasibility {
    let m = system.row_count();
    let n = system.columns;
    let width = n + m;

    // rows with negative rhs are negated so the artificial basis starts feasible
    let mut sign = vec![Rational::one(); m];
    let mut tableau: Vec<Vec<Rational>> = Vec::with_capacity(m);
    let mut values: Vec<Rational> = Vec::with_capacity(m);
    for (i, s) in sign.iter_mut().enumerate() {
        let flip = system.rhs[i].is_negative();
        if flip {
            *s = -Rational::one();
        }
        let mut row = Vec::with_capacity(width);
        for a in &system.rows[i] {
            row.push(if flip { -a.clone() } else { a.clone() });
        }
        for k in 0..m {
            row.push(if k == i { Rational::one() } else { Rational::zero() });
        }
        tableau.push(row);
        values.push(system.rhs[i].abs());
    }
    let mut basis: Vec<usize> = (n..width).collect();

    // phase-1 costs: 1 on artificials; reduced costs r_j = c_j - Σ_i c_B(i) T_ij
    let cost = |j: usize| if j >= n { Rational::one() } else { Rational::zero() };
    let mut reduced: Vec<Rational> = (0..width)
        .map(|j| {
            let s: Rational = tableau.iter().map(|row| row[j].clone()).sum();
            cost(j) - s
        })
        .collect();

    while let Some(entering) = (0..width).find(|&j| reduced[j].is_negative()) {
        let mut leaving: Option<(usize, Rational)> = None;
        for i in 0..m {
            if tableau[i][entering].is_positive() {
                let ratio = &values[i] / &tableau[i][entering];
                let better = match &leaving {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && basis[i] < basis[*li]),
                };
                if better {
                    leaving = Some((i, ratio));
                }
            }
        }
        // phase 1 is bounded below by zero, so an improving column always has a pivot row
        let (pivot_row, _) = leaving.expect("phase-1 objective is bounded");
        pivot(&mut tableau, &mut values, &mut reduced, pivot_row, entering);
        basis[pivot_row] = entering;
    }

    let objective: Rational = basis
        .iter()
        .zip(&values)
        .filter(|(&j, _)| j >= n)
        .map(|(_, v)| v.clone())
        .sum();

    if objective.is_zero() {
        let mut x = vec![Rational::zero(); n];
        for (i, &j) in basis.iter().enumerate() {
            if j < n {
                x[j] = values[i].clone();
            }
        }
        Feasibility::Feasible(x)
    } else {
        // dual of the (sign-adjusted) row i is u_i = c_a - r_a for its artificial column;
        // y = -u, mapped back through the row sign flips
        let multipliers = (0..m)
            .map(|i| {
                let u = Rational::one() - &reduced[n + i];
                -(u * &sign[i])
            })
            .collect();
        Feasibility::Infeasible(FarkasCertificate { multipliers })
    }
}

fn pivot(
    tableau: &mut [Vec<Rational>],
    values: &mut [Rational],
    reduced: &mut [Rational],
    row: usize,
    col: usize,
) {
    let p = tableau[row][col].clone();
    for a in tableau[row].iter_mut() {
        *a /= &p;
    }
    values[row] /= &p;
    let pivot_row = tableau[row].clone();
    let pivot_value = values[row].clone();
    for (i, r) in tableau.iter_mut().enumerate() {
        if i == row || r[col].is_zero() {
            continue;
        }
        let factor = r[col].clone();
        for (a, b) in r.iter_mut().zip(&pivot_row) {
            if !b.is_zero() {
                *a -= &factor * b;
            }
        }
        values[i] -= &factor * &pivot_value;
    }
    let factor = reduced[col].clone();
    if !factor.is_zero() {
        for (a, b) in reduced.iter_mut().zip(&pivot_row) {
            if !b.is_zero() {
                *a -= &factor * b;
            }
        }
    }
}
