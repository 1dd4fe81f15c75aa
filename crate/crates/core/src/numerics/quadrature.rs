use num_traits::{Float, FloatConst, FromPrimitive};

/// Gauss–Legendre nodes and weights on `[-1, 1]`, nodes ascending.
///
/// Newton iteration on the three-term Legendre recurrence, started from the
/// Tricomi-type estimate `cos(π(i - 1/4)/(n + 1/2))`.
pub fn gauss_legendre<T: Float + FloatConst + FromPrimitive>(n: usize) -> (Vec<T>, Vec<T>) {
    assert!(n > 0, "Gauss–Legendre rule needs at least one node");
    let f = |v: f64| T::from_f64(v).unwrap();
    let two = f(2.0);
    let nt = f(n as f64);
    let mut nodes = vec![T::zero(); n];
    let mut weights = vec![T::zero(); n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (T::PI() * (f(i as f64) + f(0.75)) / (nt + f(0.5))).cos();
        let mut dp = T::one();
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x = x - dx;
            if dx.abs() <= T::epsilon() * f(4.0) {
                let (_, d) = legendre_with_derivative(n, x);
                dp = d;
                break;
            }
        }
        let w = two / ((T::one() - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = T::zero();
    }
    (nodes, weights)
}

fn legendre_with_derivative<T: Float + FromPrimitive>(n: usize, x: T) -> (T, T) {
    let mut p0 = T::one();
    let mut p1 = x;
    for k in 2..=n {
        let kf = T::from_usize(k).unwrap();
        let p2 = ((kf + kf - T::one()) * x * p1 - (kf - T::one()) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let nf = T::from_usize(n).unwrap();
    let dp = nf * (x * p1 - p0) / (x * x - T::one());
    (p1, dp)
}

/// Composite Gauss–Legendre rule on `[0, 1]` with equal panels.
#[derive(Debug, Clone)]
pub struct GaussLegendre<T> {
    pub nodes: Vec<T>,
    pub weights: Vec<T>,
}

impl<T: Float + FloatConst + FromPrimitive> GaussLegendre<T> {
    pub fn composite_unit(panels: usize, per_panel: usize) -> Self {
        assert!(panels > 0);
        let (x, w) = gauss_legendre::<T>(per_panel);
        let half = T::from_f64(0.5).unwrap();
        let width = T::one() / T::from_usize(panels).unwrap();
        let mut nodes = Vec::with_capacity(panels * per_panel);
        let mut weights = Vec::with_capacity(panels * per_panel);
        for p in 0..panels {
            let left = width * T::from_usize(p).unwrap();
            for (xi, wi) in x.iter().zip(&w) {
                nodes.push(left + width * half * (*xi + T::one()));
                weights.push(width * half * *wi);
            }
        }
        Self { nodes, weights }
    }

    pub fn integrate<F: Fn(T) -> T>(&self, f: F) -> T {
        self.nodes
            .iter()
            .zip(&self.weights)
            .fold(T::zero(), |acc, (x, w)| acc + *w * f(*x))
    }
}
