//! Partial Bell polynomials and derivative jets of products and compositions.
//!
//! A *jet* of order `n` is the vector `[g(a), g'(a), ..., g^(n)(a)]`.

use num_traits::{FromPrimitive, Num};

/// Binomial coefficient `C(n, k)` as a scalar.
pub fn binomial<T: Num + FromPrimitive>(n: usize, k: usize) -> T {
    if k > n {
        return T::zero();
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    T::from_u128(acc).expect("binomial coefficient not representable")
}

/// Table of partial Bell polynomials `B[j][k] = B_{j,k}(x_1, ..., x_{j-k+1})`
/// for `0 <= k <= j <= n`, where `x[i]` holds `x_{i+1}`.
///
/// Uses the recurrence
/// `B_{j,k} = Σ_{i=1}^{j-k+1} C(j-1, i-1) x_i B_{j-i,k-1}`.
pub fn bell_table<T: Num + Clone + FromPrimitive>(x: &[T], n: usize) -> Vec<Vec<T>> {
    assert!(x.len() >= n, "need {n} derivative values, got {}", x.len());
    let mut table: Vec<Vec<T>> = (0..=n).map(|j| vec![T::zero(); j + 1]).collect();
    table[0][0] = T::one();
    for j in 1..=n {
        for k in 1..=j {
            let mut acc = T::zero();
            for i in 1..=(j - k + 1) {
                let prev = &table[j - i];
                if k - 1 < prev.len() {
                    acc = acc + binomial::<T>(j - 1, i - 1) * x[i - 1].clone() * prev[k - 1].clone();
                }
            }
            table[j][k] = acc;
        }
    }
    table
}

/// Leibniz rule: jet of `u·v` from the jets of `u` and `v`.
pub fn product_jets<T: Num + Clone + FromPrimitive>(u: &[T], v: &[T]) -> Vec<T> {
    let n = u.len().min(v.len());
    (0..n)
        .map(|m| {
            (0..=m).fold(T::zero(), |acc, j| {
                acc + binomial::<T>(m, j) * u[j].clone() * v[m - j].clone()
            })
        })
        .collect()
}

/// Faà di Bruno: jet of `h ∘ f` at `a` from the jet of `h` at `f(a)` and the
/// jet of `f` at `a`. Both inputs must have the same length.
pub fn compose_jets<T: Num + Clone + FromPrimitive>(outer: &[T], inner: &[T]) -> Vec<T> {
    let n = outer.len().min(inner.len());
    if n == 0 {
        return Vec::new();
    }
    let order = n - 1;
    let bell = bell_table(&inner[1..], order);
    (0..=order)
        .map(|j| {
            if j == 0 {
                outer[0].clone()
            } else {
                (1..=j).fold(T::zero(), |acc, k| acc + outer[k].clone() * bell[j][k].clone())
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Ratio;

    type Q = Ratio<i64>;

    fn q(n: i64) -> Q {
        Ratio::from_integer(n)
    }

    #[test]
    fn bell_numbers_from_unit_arguments() {
        // Σ_k B_{n,k}(1,1,...) is the Bell number.
        let ones = vec![q(1); 8];
        let table = bell_table(&ones, 8);
        let bell: Vec<Q> = table.iter().map(|row| row.iter().cloned().sum()).collect();
        let expected = [1, 1, 2, 5, 15, 52, 203, 877, 4140];
        for (b, e) in bell.iter().zip(expected) {
            assert_eq!(*b, q(e));
        }
    }

    #[test]
    fn stirling_numbers_appear_for_factorial_arguments() {
        // B_{n,k}(0!, 1!, 2!, ...) = unsigned Stirling numbers of the first kind.
        let x: Vec<Q> = [1, 1, 2, 6, 24, 120].iter().map(|&v| q(v)).collect();
        let table = bell_table(&x, 5);
        assert_eq!(table[5][2], q(50));
        assert_eq!(table[5][3], q(35));
        assert_eq!(table[4][2], q(11));
    }

    #[test]
    fn composition_of_polynomials_exact() {
        // f(z) = z + z^2 at 0: jet [0,1,2,0,0]; h(w) = w^3: jet at 0 [0,0,0,6,0].
        // (h∘f)(z) = (z+z^2)^3 = z^3 + 3z^4 + 3z^5 + z^6 -> derivatives 6, 72 at orders 3,4.
        let f = [q(0), q(1), q(2), q(0), q(0)];
        let h = [q(0), q(0), q(0), q(6), q(0)];
        let jet = compose_jets(&h, &f);
        assert_eq!(jet, vec![q(0), q(0), q(0), q(6), q(72)]);
    }

    #[test]
    fn product_rule_matches_expanded_polynomial() {
        // (1+z)(1+2z+z^2) = 1 + 3z + 3z^2 + z^3
        let u = [q(1), q(1), q(0), q(0)];
        let v = [q(1), q(2), q(2), q(0)];
        assert_eq!(product_jets(&u, &v), vec![q(1), q(3), q(6), q(6)]);
    }

    #[test]
    fn composition_with_exponential_in_f64() {
        // h = exp, f(z) = 2z at 0: (h∘f)^(k)(0) = 2^k.
        let h = [1.0f64; 6];
        let f = [0.0, 2.0, 0.0, 0.0, 0.0, 0.0];
        let jet = compose_jets(&h, &f);
        for (k, v) in jet.iter().enumerate() {
            assert!((v - 2f64.powi(k as i32)).abs() < 1e-12);
        }
    }
}
