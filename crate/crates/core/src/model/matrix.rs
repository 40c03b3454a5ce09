use std::sync::Arc;

use super::eval::{Family, Model, ModelError};
use super::semiring::Semiring;

/// Generator names the builtin matrix algebra interprets.
pub const MULTIPLICATION: &str = "m";
pub const UNIT: &str = "u";
pub const SPIDER: &str = "s";
pub const ANTI: &str = "a";

/// Index of the matrix unit `E_ij` in the basis of `k x k` matrices.
fn unit(i: usize, j: usize, k: usize) -> usize {
    i * k + j
}

/// The algebra of `k x k` matrices in the basis of matrix units, so `d = k²`.
/// `m` is multiplication, `u` the identity matrix, `a` the transpose, and
/// `s` at `n` inputs the left-associated product of its inputs, with the
/// identity at zero inputs.
pub fn matrix_algebra<S: Semiring>(k: usize) -> Result<Model<S>, ModelError> {
    let d = k * k;
    let mut model = Model::new(d)?;
    model.assign(MULTIPLICATION, "^vv", spider_array(k, 2))?;
    model.assign(UNIT, "^", spider_array(k, 0))?;
    let mut transpose = vec![S::zero(); d * d];
    for i in 0..k {
        for j in 0..k {
            transpose[unit(j, i, k) * d + unit(i, j, k)] = S::one();
        }
    }
    model.assign(ANTI, "^v", transpose)?;
    let spider: Family<S> = Arc::new(move |word: &str| {
        let inputs = word.strip_prefix('^')?;
        inputs
            .chars()
            .all(|c| c == 'v')
            .then(|| spider_array(k, inputs.len()))
    });
    model.assign_family(SPIDER, spider);
    Ok(model)
}

/// Structure constants of the product of `n` matrix units: the entry at
/// `(o; x1..xn)` is one exactly when `x1 ⋯ xn = o`.
fn spider_array<S: Semiring>(k: usize, n: usize) -> Vec<S> {
    let d = k * k;
    let mut data = vec![S::zero(); d.pow(n as u32 + 1)];
    // Walk chains E_{i0 i1} E_{i1 i2} ... E_{i(n-1) in}; each chain hits one
    // entry, and every other entry is zero.
    let mut chain = vec![0usize; n + 1];
    loop {
        let (first, last) = (chain[0], chain[n]);
        let output = if n == 0 {
            unit(first, first, k)
        } else {
            unit(first, last, k)
        };
        let pos = chain
            .windows(2)
            .fold(output, |acc, w| acc * d + unit(w[0], w[1], k));
        data[pos] = S::one();
        let mut i = n;
        loop {
            chain[i] += 1;
            if chain[i] < k {
                break;
            }
            chain[i] = 0;
            if i == 0 {
                return data;
            }
            i -= 1;
        }
    }
}

/// Replace the multiplication by its symmetrization `xy + yx`.
pub fn symmetrized<S: Semiring>(model: &Model<S>) -> Result<Model<S>, ModelError> {
    let d = model.dim();
    let m = model.array(MULTIPLICATION, "^vv")?;
    let mut sym = vec![S::zero(); d * d * d];
    for o in 0..d {
        for l in 0..d {
            for r in 0..d {
                sym[(o * d + l) * d + r] =
                    m[(o * d + l) * d + r].clone() + m[(o * d + r) * d + l].clone();
            }
        }
    }
    let mut out = model.clone();
    out.assign(MULTIPLICATION, "^vv", sym)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::evaluate;
    use crate::syntax::parse_tensor;

    #[test]
    fn unit_and_multiplication_entries() {
        let m = matrix_algebra::<i64>(2).unwrap();
        assert_eq!(&*m.array(UNIT, "^").unwrap(), &[1, 0, 0, 1]);
        let mult = m.array(MULTIPLICATION, "^vv").unwrap();
        // E01 E10 = E00
        assert_eq!(
            mult[(unit(0, 0, 2) * 4 + unit(0, 1, 2)) * 4 + unit(1, 0, 2)],
            1
        );
        assert_eq!(
            mult[(unit(1, 1, 2) * 4 + unit(0, 1, 2)) * 4 + unit(1, 0, 2)],
            0
        );
        assert_eq!(mult.iter().filter(|&&v| v == 1).count(), 8);
    }

    #[test]
    fn brute_force_matrix_unit_products() {
        let k = 2;
        let m = matrix_algebra::<i64>(k).unwrap();
        let mult = m.array(MULTIPLICATION, "^vv").unwrap();
        for (a, b, c, e) in itertools(k) {
            for o in 0..k * k {
                let expect = i64::from(b == c && o == unit(a, e, k));
                assert_eq!(mult[(o * 4 + unit(a, b, k)) * 4 + unit(c, e, k)], expect);
            }
        }
    }

    fn itertools(k: usize) -> Vec<(usize, usize, usize, usize)> {
        let r = 0..k;
        r.clone()
            .flat_map(|a| {
                r.clone()
                    .flat_map(move |b| (0..k).flat_map(move |c| (0..k).map(move |e| (a, b, c, e))))
            })
            .collect()
    }

    #[test]
    fn transpose_swaps_indices() {
        let m = matrix_algebra::<i64>(2).unwrap();
        let t = m.array(ANTI, "^v").unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(t[unit(j, i, 2) * 4 + unit(i, j, 2)], 1);
            }
        }
        assert_eq!(t.iter().sum::<i64>(), 4);
    }

    #[test]
    fn spiders_are_left_associated_products() {
        let m = matrix_algebra::<i64>(2).unwrap();
        assert_eq!(
            &*m.array(SPIDER, "^").unwrap(),
            &*m.array(UNIT, "^").unwrap()
        );
        assert_eq!(
            &*m.array(SPIDER, "^vv").unwrap(),
            &*m.array(MULTIPLICATION, "^vv").unwrap()
        );
        let s3 = evaluate(&parse_tensor("s{+o -x -y -z}").unwrap(), &m).unwrap();
        let tree = evaluate(&parse_tensor("m{+o -p -z} m{+p -x -y}").unwrap(), &m).unwrap();
        assert_eq!(s3, tree);
        let s1 = evaluate(&parse_tensor("s{+o -x}").unwrap(), &m).unwrap();
        assert_eq!(
            s1,
            evaluate(&parse_tensor("id{+o -x}").unwrap(), &m).unwrap()
        );
        assert!(m.array(SPIDER, "v^").is_err());
    }

    #[test]
    fn multiplication_is_not_commutative() {
        let m = matrix_algebra::<i64>(2).unwrap();
        let xy = evaluate(&parse_tensor("m{+o -x -y}").unwrap(), &m).unwrap();
        let yx = evaluate(&parse_tensor("m{+o -y -x}").unwrap(), &m).unwrap();
        assert_ne!(xy, yx);
        let s = symmetrized(&m).unwrap();
        let sxy = evaluate(&parse_tensor("m{+o -x -y}").unwrap(), &s).unwrap();
        let syx = evaluate(&parse_tensor("m{+o -y -x}").unwrap(), &s).unwrap();
        assert_eq!(sxy, syx);
    }
}
