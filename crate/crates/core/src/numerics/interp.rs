use num_traits::Num;

/// Polynomial interpolant in Newton divided-difference form.
#[derive(Debug, Clone)]
pub struct NewtonInterpolant<T> {
    nodes: Vec<T>,
    coeffs: Vec<T>,
}

impl<T: Num + Clone + PartialEq> NewtonInterpolant<T> {
    /// Minimal-degree interpolant through `(nodes[i], values[i])`.
    ///
    /// Returns `None` if two nodes coincide.
    pub fn new(nodes: &[T], values: &[T]) -> Option<Self> {
        assert_eq!(nodes.len(), values.len());
        let n = nodes.len();
        let mut coeffs = values.to_vec();
        for level in 1..n {
            for i in (level..n).rev() {
                let denom = nodes[i].clone() - nodes[i - level].clone();
                if denom == T::zero() {
                    return None;
                }
                coeffs[i] = (coeffs[i].clone() - coeffs[i - 1].clone()) / denom;
            }
        }
        Some(Self {
            nodes: nodes.to_vec(),
            coeffs,
        })
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, x: T) -> T {
        let n = self.coeffs.len();
        if n == 0 {
            return T::zero();
        }
        let mut acc = self.coeffs[n - 1].clone();
        for i in (0..n - 1).rev() {
            acc = acc * (x.clone() - self.nodes[i].clone()) + self.coeffs[i].clone();
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Ratio;

    #[test]
    fn reproduces_quadratic_exactly() {
        let r = |n: i64| Ratio::from_integer(n);
        let nodes = [r(0), r(1), r(3)];
        let vals: Vec<_> = nodes.iter().map(|x| x * x - r(2) * x + r(5)).collect();
        let p = NewtonInterpolant::new(&nodes, &vals).unwrap();
        assert_eq!(p.eval(r(7)), r(49 - 14 + 5));
        assert_eq!(p.degree(), Some(2));
    }

    #[test]
    fn coincident_nodes_rejected() {
        assert!(NewtonInterpolant::new(&[1.0, 1.0], &[2.0, 3.0]).is_none());
    }

    #[test]
    fn empty_interpolant_is_zero() {
        let p = NewtonInterpolant::<f64>::new(&[], &[]).unwrap();
        assert_eq!(p.eval(3.0), 0.0);
    }
}
