//! Formula to LSSS compilation and share generation.

use crate::group::{RandomSource, RandomnessError, ScalarField};

use super::{AccessMatrix, PolicyAst};

/// Labeled-vector construction.
///
/// The root is labeled `(1)` and a counter `c` starts at 1. An OR node hands
/// its vector to both children. An AND node with vector `v`, padded to length
/// `c`, labels its left child `v || 1` and its right child `(0,...,0,-1)` of
/// length `c + 1`, then increments `c`. Leaves become rows in left-to-right
/// order, zero-padded to the final `c` columns.
pub fn compile_lsss(ast: &PolicyAst) -> AccessMatrix {
    let mut leaves = Vec::with_capacity(ast.leaf_count());
    let mut width = 1;
    label(ast, vec![1], &mut width, &mut leaves);

    let (rows, rho) = leaves
        .into_iter()
        .map(|(mut v, attr)| {
            v.resize(width, 0);
            (v, attr)
        })
        .unzip();
    AccessMatrix::new(rows, rho).expect("compiler emits well-formed matrices")
}

fn label(node: &PolicyAst, vector: Vec<i64>, width: &mut usize, out: &mut Vec<(Vec<i64>, String)>) {
    match node {
        PolicyAst::Leaf(attr) => out.push((vector, attr.clone())),
        PolicyAst::Or(l, r) => {
            label(l, vector.clone(), width, out);
            label(r, vector, width, out);
        }
        PolicyAst::And(l, r) => {
            let mut left = vector;
            left.resize(*width, 0);
            left.push(1);
            let mut right = vec![0; *width];
            right.push(-1);
            *width += 1;
            label(l, left, width, out);
            label(r, right, width, out);
        }
    }
}

/// `lambda_i = <v, M_i>` for a fully specified vector `v`.
pub fn shares_from_vector<F: ScalarField + ?Sized>(
    field: &F,
    matrix: &AccessMatrix,
    v: &[F::Scalar],
) -> Vec<F::Scalar> {
    assert_eq!(v.len(), matrix.column_count(), "share vector width");
    matrix
        .rows()
        .iter()
        .map(|row| {
            row.iter()
                .zip(v)
                .fold(field.zero(), |acc, (&m, &x)| acc + field.scalar_from_i64(m) * x)
        })
        .collect()
}

/// Shares `secret` with `v = (secret, y_2, ..., y_n)`, drawing the `y` in
/// order from `rng`.
pub fn make_shares<F, R>(
    field: &F,
    matrix: &AccessMatrix,
    secret: F::Scalar,
    rng: &mut R,
) -> Result<Vec<F::Scalar>, RandomnessError>
where
    F: ScalarField + ?Sized,
    R: RandomSource + ?Sized,
{
    let mut v = Vec::with_capacity(matrix.column_count());
    v.push(secret);
    for _ in 1..matrix.column_count() {
        v.push(rng.next_scalar(field)?);
    }
    Ok(shares_from_vector(field, matrix, &v))
}
