//! Exact bipartite assignment, used by every metric and by detection-to-track
//! association.
//!
//! [`solve`] finds, among all matchings of maximum cardinality over the
//! non-forbidden pairs, one with optimal total value for the requested sense.
//! Maximum cardinality first is the semantic every call site needs: a metric
//! must not trade two acceptable matches for one slightly better one, and a
//! plain "minimize the sum" would match nothing at all. Rectangular matrices
//! are padded internally so surplus rows/columns simply stay unmatched.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum AssignmentError {
    #[error("cost matrix entries must be finite")]
    NonFinite,
    #[error("matrix shape {0}x{1} does not match {2} values")]
    ShapeMismatch(usize, usize, usize),
    #[error("brute force limited to max dimension 8, got {0}x{1}")]
    TooLarge(usize, usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Maximize,
    Minimize,
}

/// Dense rows x cols cost matrix with an optimization sense.
#[derive(Debug, Clone)]
pub struct CostMatrix {
    rows: usize,
    cols: usize,
    values: Vec<f64>,
    sense: Sense,
}

impl CostMatrix {
    pub fn new(
        rows: usize,
        cols: usize,
        values: Vec<f64>,
        sense: Sense,
    ) -> Result<Self, AssignmentError> {
        if values.len() != rows * cols {
            return Err(AssignmentError::ShapeMismatch(rows, cols, values.len()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(AssignmentError::NonFinite);
        }
        Ok(Self {
            rows,
            cols,
            values,
            sense,
        })
    }

    pub fn from_rows(rows: Vec<Vec<f64>>, sense: Sense) -> Result<Self, AssignmentError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(AssignmentError::ShapeMismatch(
                r,
                c,
                rows.iter().map(Vec::len).sum(),
            ));
        }
        Self::new(r, c, rows.into_iter().flatten().collect(), sense)
    }

    pub fn from_fn(
        rows: usize,
        cols: usize,
        sense: Sense,
        mut f: impl FnMut(usize, usize) -> f64,
    ) -> Result<Self, AssignmentError> {
        let mut values = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                values.push(f(r, c));
            }
        }
        Self::new(rows, cols, values, sense)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn sense(&self) -> Sense {
        self.sense
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.cols + col]
    }
}

/// A one-to-one matching: each row and each column appears at most once.
/// `objective` is the sum of the selected original entries.
#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    pub pairs: Vec<(usize, usize)>,
    pub objective: f64,
}

impl Assignment {
    fn empty() -> Self {
        Self {
            pairs: Vec::new(),
            objective: 0.0,
        }
    }
}

/// Solve the assignment problem, skipping pairs where `forbidden(row, col)`
/// holds. Deterministic: equal inputs always produce the same matching.
pub fn solve(matrix: &CostMatrix, forbidden: impl Fn(usize, usize) -> bool) -> Assignment {
    let (r, c) = (matrix.rows, matrix.cols);
    if r == 0 || c == 0 {
        return Assignment::empty();
    }

    // Normalize allowed entries to non-negative minimization costs.
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..r {
        for j in 0..c {
            if !forbidden(i, j) {
                let v = matrix.get(i, j);
                lo = lo.min(v);
                hi = hi.max(v);
            }
        }
    }
    if lo > hi {
        // Every pair forbidden.
        return Assignment::empty();
    }
    let normalize = |v: f64| match matrix.sense {
        Sense::Minimize => v - lo,
        Sense::Maximize => hi - v,
    };
    let spread = hi - lo;
    // Any single forbidden pick must cost more than every allowed matching.
    let n = r.max(c);
    let barrier = spread * n as f64 + 1.0;

    let mut cost = vec![0.0; n * n];
    for i in 0..r {
        for j in 0..c {
            cost[i * n + j] = if forbidden(i, j) {
                barrier
            } else {
                normalize(matrix.get(i, j))
            };
        }
    }

    let row_to_col = solve_square_min(&cost, n);
    let mut pairs = Vec::new();
    let mut objective = 0.0;
    for (i, &j) in row_to_col.iter().enumerate().take(r) {
        if j < c && !forbidden(i, j) {
            pairs.push((i, j));
            objective += matrix.get(i, j);
        }
    }
    Assignment { pairs, objective }
}

/// Classic O(n^3) shortest-augmenting-path Hungarian method with potentials,
/// minimizing over perfect matchings of a square matrix. Returns the matched
/// column for each row.
fn solve_square_min(cost: &[f64], n: usize) -> Vec<usize> {
    if n == 0 {
        return Vec::new();
    }
    // 1-indexed over columns; index 0 is the virtual start column.
    let mut u = vec![0.0f64; n + 1];
    let mut v = vec![0.0f64; n + 1];
    let mut matched_row = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];

    for i in 1..=n {
        matched_row[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = matched_row[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost[(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[matched_row[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if matched_row[j0] == 0 {
                break;
            }
        }
        // Walk the augmenting path back to the start column.
        loop {
            let j1 = way[j0];
            matched_row[j0] = matched_row[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut row_to_col = vec![usize::MAX; n];
    for j in 1..=n {
        let row = matched_row[j];
        if row > 0 {
            row_to_col[row - 1] = j - 1;
        }
    }
    row_to_col
}

/// Exhaustive assignment oracle: enumerates every complete injection of the
/// smaller side into the larger. Ties on the objective are broken by the
/// lexicographically smallest (row, col) pair list. Guarded to max dimension 8.
pub fn brute_force_solve(matrix: &CostMatrix) -> Result<Assignment, AssignmentError> {
    let (r, c) = (matrix.rows, matrix.cols);
    if r.max(c) > 8 {
        return Err(AssignmentError::TooLarge(r, c));
    }
    if r == 0 || c == 0 {
        return Ok(Assignment::empty());
    }

    let rows_are_small = r <= c;
    let (small, large) = if rows_are_small { (r, c) } else { (c, r) };
    let value = |s: usize, l: usize| {
        if rows_are_small {
            matrix.get(s, l)
        } else {
            matrix.get(l, s)
        }
    };

    let mut best: Option<Assignment> = None;
    let mut chosen = vec![usize::MAX; small];
    let mut used = vec![false; large];

    fn recurse(
        depth: usize,
        small: usize,
        large: usize,
        chosen: &mut [usize],
        used: &mut [bool],
        value: &impl Fn(usize, usize) -> f64,
        rows_are_small: bool,
        sense: Sense,
        best: &mut Option<Assignment>,
    ) {
        if depth == small {
            let mut pairs: Vec<(usize, usize)> = chosen
                .iter()
                .enumerate()
                .map(|(s, &l)| if rows_are_small { (s, l) } else { (l, s) })
                .collect();
            pairs.sort_unstable();
            let objective: f64 = chosen
                .iter()
                .enumerate()
                .map(|(s, &l)| value(s, l))
                .sum();
            let better = match best {
                None => true,
                Some(b) => {
                    let improves = match sense {
                        Sense::Maximize => objective > b.objective,
                        Sense::Minimize => objective < b.objective,
                    };
                    improves || (objective == b.objective && pairs < b.pairs)
                }
            };
            if better {
                *best = Some(Assignment { pairs, objective });
            }
            return;
        }
        for l in 0..large {
            if !used[l] {
                used[l] = true;
                chosen[depth] = l;
                recurse(
                    depth + 1,
                    small,
                    large,
                    chosen,
                    used,
                    value,
                    rows_are_small,
                    sense,
                    best,
                );
                used[l] = false;
            }
        }
    }

    recurse(
        0,
        small,
        large,
        &mut chosen,
        &mut used,
        &value,
        rows_are_small,
        matrix.sense,
        &mut best,
    );
    Ok(best.unwrap_or_else(Assignment::empty))
}
