//! Newton divided-difference interpolation over F_p.

use super::field::FieldElement;
use super::poly::Poly;
use crate::error::{Error, Result};

/// The unique polynomial of degree below `nodes.len()` through every
/// `(abscissa, ordinate)` pair.
pub fn interpolate(nodes: &[(FieldElement, FieldElement)]) -> Result<Poly> {
    let (x0, _) = *nodes.first().ok_or(Error::EmptyTable)?;
    let field = x0.field();
    for &(x, y) in nodes {
        for m in [x.modulus(), y.modulus()] {
            if m != field.modulus() {
                return Err(Error::ModulusMismatch(field.modulus(), m));
            }
        }
    }
    if nodes.len() > field.size() {
        return Err(Error::TooManyNodes {
            nodes: nodes.len(),
            p: field.modulus(),
        });
    }
    let xs: Vec<FieldElement> = nodes.iter().map(|&(x, _)| x).collect();
    for (i, a) in xs.iter().enumerate() {
        if xs[..i].contains(a) {
            return Err(Error::DuplicateNode(a.value()));
        }
    }

    // In-place divided differences: after pass k, dd[i] = f[x_{i-k}, ..., x_i]
    // for i >= k, so dd ends up holding the Newton coefficients.
    let mut dd: Vec<FieldElement> = nodes.iter().map(|&(_, y)| y).collect();
    for k in 1..dd.len() {
        for i in (k..dd.len()).rev() {
            let denom = (xs[i] - xs[i - k]).inverse()?;
            dd[i] = (dd[i] - dd[i - 1]) * denom;
        }
    }

    // Expand the Newton form from the innermost factor outwards.
    let mut acc = Poly::constant(*dd.last().expect("non-empty"));
    for k in (0..dd.len() - 1).rev() {
        let linear = Poly::new(field, [-(xs[k].value() as i64), 1]);
        acc = &(&acc * &linear) + &Poly::constant(dd[k]);
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::field::PrimeField;
    use proptest::prelude::*;

    fn fp(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    fn table(f: PrimeField, pts: &[(i64, i64)]) -> Vec<(FieldElement, FieldElement)> {
        pts.iter().map(|&(x, y)| (f.elem(x), f.elem(y))).collect()
    }

    #[test]
    fn examples() {
        let f5 = fp(5);
        assert_eq!(
            interpolate(&table(f5, &[(3, 4)])).unwrap(),
            Poly::new(f5, [4])
        );
        assert_eq!(
            interpolate(&table(f5, &[(0, 1), (1, 2)])).unwrap(),
            Poly::new(f5, [1, 1])
        );
    }

    #[test]
    fn errors() {
        let f5 = fp(5);
        assert_eq!(interpolate(&[]), Err(Error::EmptyTable));
        assert_eq!(
            interpolate(&table(f5, &[(1, 2), (3, 0), (1, 4)])),
            Err(Error::DuplicateNode(1))
        );
        let f2 = fp(2);
        // three nodes over F_2 necessarily repeat, but the size check wins
        assert!(matches!(
            interpolate(&table(f2, &[(0, 0), (1, 1), (0, 1)])),
            Err(Error::TooManyNodes { nodes: 3, p: 2 })
        ));
    }

    /// Every table on at most three distinct nodes over F_3.
    #[test]
    fn exhaustive_small_tables_f3() {
        let f3 = fp(3);
        let xsets: Vec<Vec<i64>> = vec![
            vec![0],
            vec![1],
            vec![2],
            vec![0, 1],
            vec![1, 0],
            vec![0, 2],
            vec![1, 2],
            vec![2, 1],
            vec![0, 1, 2],
            vec![2, 0, 1],
        ];
        for xs in xsets {
            let count = 3usize.pow(xs.len() as u32);
            for code in 0..count {
                let mut c = code;
                let pts: Vec<(i64, i64)> = xs
                    .iter()
                    .map(|&x| {
                        let y = (c % 3) as i64;
                        c /= 3;
                        (x, y)
                    })
                    .collect();
                let nodes = table(f3, &pts);
                let poly = interpolate(&nodes).unwrap();
                assert!(poly.degree().is_none_or(|d| d < xs.len()));
                for (x, y) in nodes {
                    assert_eq!(poly.eval(x), y);
                }
            }
        }
    }

    #[test]
    fn full_table_f7_evaluates_back() {
        let f7 = fp(7);
        let ys = [3, 0, 6, 6, 1, 2, 5];
        let nodes: Vec<_> = (0..7)
            .map(|x| (f7.elem(x), f7.elem(ys[x as usize])))
            .collect();
        let poly = interpolate(&nodes).unwrap();
        assert!(poly.degree().unwrap() <= 6);
        for (x, y) in nodes {
            assert_eq!(poly.eval(x), y);
        }
    }

    fn arb_table(p: u64) -> impl Strategy<Value = Vec<(FieldElement, FieldElement)>> {
        let f = fp(p);
        (
            Just((0..p as i64).collect::<Vec<_>>()).prop_shuffle(),
            1..=p as usize,
        )
            .prop_flat_map(move |(xs, k)| {
                let xs: Vec<i64> = xs[..k].to_vec();
                prop::collection::vec(0..p as i64, k).prop_map(move |ys| {
                    xs.iter()
                        .zip(ys)
                        .map(|(&x, y)| (f.elem(x), f.elem(y)))
                        .collect()
                })
            })
    }

    proptest! {
        #[test]
        fn evaluates_back(nodes in arb_table(13)) {
            let poly = interpolate(&nodes).unwrap();
            prop_assert!(poly.degree().is_none_or(|d| d < nodes.len()));
            for (x, y) in nodes {
                prop_assert_eq!(poly.eval(x), y);
            }
        }

        #[test]
        fn order_independent((nodes, perm) in arb_table(11).prop_flat_map(|t| {
            let shuffled = Just(t.clone()).prop_shuffle();
            (Just(t), shuffled)
        })) {
            prop_assert_eq!(interpolate(&nodes).unwrap(), interpolate(&perm).unwrap());
        }
    }
}
