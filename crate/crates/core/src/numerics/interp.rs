//! Piecewise cubic Hermite interpolation with the Fritsch–Carlson monotonicity limiter.

#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneCubic {
    xs: Vec<f64>,
    ys: Vec<f64>,
    slopes: Vec<f64>,
}

impl MonotoneCubic {
    /// Builds an interpolant through `(xs, ys)`.
    ///
    /// `slopes` are the knot derivatives to honour where they do not break
    /// monotonicity on an interval; when `None` the three-point PCHIP estimate is
    /// used. Within every interval the result is monotone, so it never leaves the
    /// range spanned by the two endpoint values.
    ///
    /// Panics if the inputs differ in length, have fewer than two knots, or `xs`
    /// is not strictly increasing; callers validate before building.
    pub fn new(xs: Vec<f64>, ys: Vec<f64>, slopes: Option<Vec<f64>>) -> Self {
        assert!(xs.len() >= 2 && xs.len() == ys.len());
        assert!(xs.windows(2).all(|w| w[0] < w[1]));
        let n = xs.len();
        let secant: Vec<f64> = (0..n - 1)
            .map(|k| (ys[k + 1] - ys[k]) / (xs[k + 1] - xs[k]))
            .collect();

        let mut m = match slopes {
            Some(s) => {
                assert_eq!(s.len(), n);
                s
            }
            None => {
                let mut m = vec![0.0; n];
                m[0] = secant[0];
                m[n - 1] = secant[n - 2];
                for k in 1..n - 1 {
                    m[k] = if secant[k - 1] * secant[k] <= 0.0 {
                        0.0
                    } else {
                        0.5 * (secant[k - 1] + secant[k])
                    };
                }
                m
            }
        };

        for k in 0..n - 1 {
            let d = secant[k];
            if d == 0.0 {
                m[k] = 0.0;
                m[k + 1] = 0.0;
                continue;
            }
            let mut alpha = m[k] / d;
            let mut beta = m[k + 1] / d;
            if alpha < 0.0 {
                m[k] = 0.0;
                alpha = 0.0;
            }
            if beta < 0.0 {
                m[k + 1] = 0.0;
                beta = 0.0;
            }
            let r2 = alpha * alpha + beta * beta;
            if r2 > 9.0 {
                let tau = 3.0 / r2.sqrt();
                m[k] = tau * alpha * d;
                m[k + 1] = tau * beta * d;
            }
        }

        Self { xs, ys, slopes: m }
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.xs[0], self.xs[self.xs.len() - 1])
    }

    fn locate(&self, x: f64) -> usize {
        let idx = self.xs.partition_point(|&k| k <= x);
        idx.saturating_sub(1).min(self.xs.len() - 2)
    }

    /// Interpolated value; `x` must lie in [`Self::domain`].
    pub fn value(&self, x: f64) -> f64 {
        let k = self.locate(x);
        let h = self.xs[k + 1] - self.xs[k];
        let t = (x - self.xs[k]) / h;
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * self.ys[k] + h10 * h * self.slopes[k] + h01 * self.ys[k + 1] + h11 * h * self.slopes[k + 1]
    }

    /// Derivative of the interpolant.
    pub fn derivative(&self, x: f64) -> f64 {
        let k = self.locate(x);
        let h = self.xs[k + 1] - self.xs[k];
        let t = (x - self.xs[k]) / h;
        let t2 = t * t;
        let d00 = 6.0 * t2 - 6.0 * t;
        let d10 = 3.0 * t2 - 4.0 * t + 1.0;
        let d01 = -6.0 * t2 + 6.0 * t;
        let d11 = 3.0 * t2 - 2.0 * t;
        (d00 * self.ys[k] + d01 * self.ys[k + 1]) / h + d10 * self.slopes[k] + d11 * self.slopes[k + 1]
    }
}
