//! Monotone piecewise-cubic Hermite interpolation (Fritsch–Carlson).

#[derive(Debug, Clone)]
pub struct MonotoneCubic {
    x: Vec<f64>,
    y: Vec<f64>,
    m: Vec<f64>,
}

impl MonotoneCubic {
    /// `x` strictly increasing, `y` nondecreasing.
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Self {
        let n = x.len();
        assert!(n >= 2 && y.len() == n, "need at least two matching points");
        let delta: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / (x[i + 1] - x[i])).collect();
        let mut m = vec![0.0; n];
        m[0] = delta[0];
        m[n - 1] = delta[n - 2];
        for i in 1..n - 1 {
            m[i] = if delta[i - 1] * delta[i] <= 0.0 {
                0.0
            } else {
                // weighted harmonic mean keeps the interpolant monotone
                let h0 = x[i] - x[i - 1];
                let h1 = x[i + 1] - x[i];
                let w1 = 2.0 * h1 + h0;
                let w2 = h1 + 2.0 * h0;
                (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i])
            };
        }
        for i in 0..n - 1 {
            if delta[i] == 0.0 {
                m[i] = 0.0;
                m[i + 1] = 0.0;
            }
        }
        Self { x, y, m }
    }

    fn segment(&self, t: f64) -> usize {
        match self.x.partition_point(|&v| v <= t) {
            0 => 0,
            k => (k - 1).min(self.x.len() - 2),
        }
    }

    fn eval_in(&self, i: usize, t: f64) -> f64 {
        let h = self.x[i + 1] - self.x[i];
        let s = (t - self.x[i]) / h;
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        h00 * self.y[i] + h10 * h * self.m[i] + h01 * self.y[i + 1] + h11 * h * self.m[i + 1]
    }

    pub fn eval(&self, t: f64) -> f64 {
        if t <= self.x[0] {
            return self.y[0];
        }
        if t >= *self.x.last().unwrap() {
            return *self.y.last().unwrap();
        }
        self.eval_in(self.segment(t), t)
    }

    /// Smallest `t` with `eval(t) = target`, for `target` in the range of `y`.
    pub fn invert(&self, target: f64) -> f64 {
        let n = self.x.len();
        if target <= self.y[0] {
            return self.x[0];
        }
        if target >= self.y[n - 1] {
            let first = self.y.partition_point(|&v| v < self.y[n - 1]);
            return self.x[first.min(n - 1)];
        }
        // first node with y >= target; the root lies in the segment before it
        let k = self.y.partition_point(|&v| v < target);
        let i = k - 1;
        let (mut lo, mut hi) = (self.x[i], self.x[i + 1]);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.eval_in(i, mid) < target {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 4.0 * f64::EPSILON * hi.abs().max(f64::MIN_POSITIVE) {
                break;
            }
        }
        0.5 * (lo + hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn reproduces_nodes_and_lines() {
        let x = vec![0.0, 1.0, 2.0, 4.0];
        let y = vec![0.0, 0.5, 1.0, 2.0];
        let c = MonotoneCubic::new(x.clone(), y.clone());
        for (a, b) in x.iter().zip(&y) {
            assert!((c.eval(*a) - b).abs() < 1e-15);
        }
        assert!((c.eval(3.0) - 1.5).abs() < 1e-14);
        assert!((c.invert(1.5) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn flat_plateau_inverts_to_its_start() {
        let c = MonotoneCubic::new(vec![0.0, 1.0, 2.0, 3.0], vec![0.0, 1.0, 1.0, 1.0]);
        assert_eq!(c.invert(1.0), 1.0);
        assert!(c.eval(1.5) <= 1.0);
    }

    proptest! {
        #[test]
        fn monotone_and_inverse(steps in prop::collection::vec(0.0f64..1.0, 3..30), q in 0.0f64..1.0) {
            let mut y = vec![0.0];
            for s in &steps { y.push(y.last().unwrap() + s * s); }
            let top = *y.last().unwrap();
            prop_assume!(top > 0.0);
            let x: Vec<f64> = (0..y.len()).map(|i| i as f64).collect();
            let c = MonotoneCubic::new(x.clone(), y.clone());
            let mut prev = f64::NEG_INFINITY;
            for k in 0..=400 {
                let t = k as f64 * (x.len() - 1) as f64 / 400.0;
                let v = c.eval(t);
                prop_assert!(v >= prev - 1e-12);
                prev = v;
            }
            let target = q * top;
            let t = c.invert(target);
            prop_assert!((c.eval(t) - target).abs() <= 1e-9 * top.max(1.0));
        }
    }
}
