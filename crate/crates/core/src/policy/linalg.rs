//! Linear algebra over `Z_p` for reconstruction.

use crate::group::ScalarField;

use super::{AccessMatrix, AttributeSet};

/// Rows `I` (0-based) and coefficients `omega` with
/// `sum_i omega_i * M_i = (1, 0, ..., 0)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reconstruction<S> {
    pub rows: Vec<usize>,
    pub coefficients: Vec<S>,
}

impl<S: Copy> Reconstruction<S> {
    pub fn iter(&self) -> impl Iterator<Item = (usize, S)> + '_ {
        self.rows.iter().copied().zip(self.coefficients.iter().copied())
    }
}

fn candidate_rows(matrix: &AccessMatrix, attrs: &AttributeSet) -> Vec<usize> {
    (0..matrix.row_count())
        .filter(|&i| attrs.contains(matrix.label(i)))
        .collect()
}

/// Solves `M_I^T omega = e_1` over the rows whose label is in `attrs`.
///
/// Pivots on the first nonzero entry; free variables are set to 0 and
/// rows with a zero coefficient are dropped from `I`. Returns `None` when
/// `e_1` is not in the span of the candidate rows.
pub fn satisfying_rows<F: ScalarField + ?Sized>(
    field: &F,
    matrix: &AccessMatrix,
    attrs: &AttributeSet,
) -> Option<Reconstruction<F::Scalar>> {
    let candidates = candidate_rows(matrix, attrs);
    if candidates.is_empty() {
        return None;
    }
    let vars = candidates.len();
    let eqs = matrix.column_count();

    // Augmented system: one equation per column of M, one unknown per row.
    let mut sys: Vec<Vec<F::Scalar>> = (0..eqs)
        .map(|c| {
            let mut eq: Vec<F::Scalar> = candidates
                .iter()
                .map(|&r| field.scalar_from_i64(matrix.row(r)[c]))
                .collect();
            eq.push(if c == 0 { field.one() } else { field.zero() });
            eq
        })
        .collect();

    let mut pivots = Vec::new();
    let mut pivot_row = 0;
    for col in 0..vars {
        if pivot_row == eqs {
            break;
        }
        let Some(found) = (pivot_row..eqs).find(|&r| !field.is_zero(&sys[r][col])) else {
            continue;
        };
        sys.swap(pivot_row, found);
        let inv = field.inverse(&sys[pivot_row][col]).expect("pivot is nonzero");
        for x in sys[pivot_row].iter_mut() {
            *x = *x * inv;
        }
        let pivot = sys[pivot_row].clone();
        for (r, eq) in sys.iter_mut().enumerate() {
            if r == pivot_row || field.is_zero(&eq[col]) {
                continue;
            }
            let factor = eq[col];
            for (x, &p) in eq.iter_mut().zip(&pivot) {
                *x = *x - factor * p;
            }
        }
        pivots.push(col);
        pivot_row += 1;
    }

    // 0 = nonzero means inconsistent.
    if sys[pivot_row..].iter().any(|eq| !field.is_zero(&eq[vars])) {
        return None;
    }

    let mut omega = vec![field.zero(); vars];
    for (r, &col) in pivots.iter().enumerate() {
        omega[col] = sys[r][vars];
    }

    let (rows, coefficients) = candidates
        .into_iter()
        .zip(omega)
        .filter(|(_, w)| !field.is_zero(w))
        .unzip();
    Some(Reconstruction { rows, coefficients })
}

/// Rank of a matrix over `Z_p`.
pub fn rank<F: ScalarField + ?Sized>(field: &F, rows: &[Vec<F::Scalar>]) -> usize {
    let mut m: Vec<Vec<F::Scalar>> = rows.to_vec();
    let width = m.first().map_or(0, Vec::len);
    let mut r = 0;
    for col in 0..width {
        let Some(found) = (r..m.len()).find(|&i| !field.is_zero(&m[i][col])) else {
            continue;
        };
        m.swap(r, found);
        let inv = field.inverse(&m[r][col]).expect("pivot is nonzero");
        let pivot: Vec<F::Scalar> = m[r].iter().map(|&x| x * inv).collect();
        for row in m.iter_mut().skip(r + 1) {
            let factor = row[col];
            if field.is_zero(&factor) {
                continue;
            }
            for (x, &p) in row.iter_mut().zip(&pivot) {
                *x = *x - factor * p;
            }
        }
        m[r] = pivot;
        r += 1;
        if r == m.len() {
            break;
        }
    }
    r
}

/// Rank test for `e_1` in the span of the rows labeled by `attrs`:
/// appending `e_1` leaves the rank unchanged iff it is already spanned.
pub fn target_in_span<F: ScalarField + ?Sized>(
    field: &F,
    matrix: &AccessMatrix,
    attrs: &AttributeSet,
) -> bool {
    let mut selected: Vec<Vec<F::Scalar>> = candidate_rows(matrix, attrs)
        .into_iter()
        .map(|r| matrix.row(r).iter().map(|&v| field.scalar_from_i64(v)).collect())
        .collect();
    let base = rank(field, &selected);
    let mut target = vec![field.zero(); matrix.column_count()];
    target[0] = field.one();
    selected.push(target);
    rank(field, &selected) == base
}
