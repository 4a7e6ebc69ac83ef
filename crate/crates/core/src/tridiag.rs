//! Symmetric tridiagonal eigenproblems: Sturm counts, bisection and inverse
//! iteration.

/// Symmetric tridiagonal matrix with diagonal `d` and off-diagonal `e`
/// (`e[i]` couples rows `i` and `i + 1`).
#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiag {
    pub d: Vec<f64>,
    pub e: Vec<f64>,
    e2: Vec<f64>,
}

impl SymTridiag {
    pub fn new(d: Vec<f64>, e: Vec<f64>) -> Self {
        assert!(!d.is_empty(), "empty matrix");
        assert_eq!(e.len() + 1, d.len(), "off-diagonal length mismatch");
        let e2 = e.iter().map(|v| v * v).collect();
        Self { d, e, e2 }
    }

    pub fn len(&self) -> usize {
        self.d.len()
    }

    pub fn is_empty(&self) -> bool {
        self.d.is_empty()
    }

    /// Number of eigenvalues strictly below `x` (inertia of `T − x`).
    pub fn count_below(&self, x: f64) -> usize {
        let tiny = f64::MIN_POSITIVE.sqrt();
        let mut count = 0;
        let mut q = self.d[0] - x;
        if q < 0.0 {
            count += 1;
        }
        for i in 1..self.d.len() {
            if q == 0.0 {
                q = tiny;
            }
            q = self.d[i] - x - self.e2[i - 1] / q;
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// Gershgorin interval containing the whole spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.d.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let r = if i > 0 { self.e[i - 1].abs() } else { 0.0 }
                + if i + 1 < n { self.e[i].abs() } else { 0.0 };
            lo = lo.min(self.d[i] - r);
            hi = hi.max(self.d[i] + r);
        }
        (lo, hi)
    }

    /// Eigenvalues with indices `first..last` (ascending order), located by
    /// bisection to relative width `rel_tol`.
    pub fn eigenvalues_by_index(&self, first: usize, last: usize, rel_tol: f64) -> Vec<f64> {
        let last = last.min(self.len());
        if first >= last {
            return Vec::new();
        }
        let (lo, hi) = self.gershgorin();
        let pad = 1e-12 * (hi - lo) + 4.0 * f64::EPSILON * lo.abs().max(hi.abs()) + f64::MIN_POSITIVE;
        let (lo, hi) = (lo - pad, hi + pad);
        let mut out = vec![f64::NAN; last - first];
        self.isolate(lo, self.count_below(lo), hi, self.count_below(hi), first, last, rel_tol, &mut out);
        out
    }

    /// All eigenvalues `≤ limit`, ascending.
    pub fn eigenvalues_below(&self, limit: f64, rel_tol: f64) -> Vec<f64> {
        self.eigenvalues_by_index(0, self.count_below(next_up(limit)), rel_tol)
    }

    /// Recursive multisection: splits `[lo, hi)` until each sub-interval
    /// holds one wanted eigenvalue, then refines it.
    #[allow(clippy::too_many_arguments)]
    fn isolate(
        &self,
        lo: f64,
        c_lo: usize,
        hi: f64,
        c_hi: usize,
        first: usize,
        last: usize,
        rel_tol: f64,
        out: &mut [f64],
    ) {
        // Eigenvalues with index in [c_lo, c_hi) lie in [lo, hi).
        let a = c_lo.max(first);
        let b = c_hi.min(last);
        if a >= b {
            return;
        }
        let width = hi - lo;
        let scale = lo.abs().max(hi.abs());
        if width <= rel_tol * scale || width <= f64::MIN_POSITIVE * 4.0 {
            let mid = 0.5 * (lo + hi);
            for idx in a..b {
                out[idx - first] = mid;
            }
            return;
        }
        if c_hi - c_lo == 1 {
            out[a - first] = self.refine(lo, hi, c_lo, rel_tol);
            return;
        }
        let mid = 0.5 * (lo + hi);
        let c_mid = self.count_below(mid);
        self.isolate(lo, c_lo, mid, c_mid, first, last, rel_tol, out);
        self.isolate(mid, c_mid, hi, c_hi, first, last, rel_tol, out);
    }

    /// Bisection for the single eigenvalue of index `idx` in `[lo, hi)`.
    fn refine(&self, mut lo: f64, mut hi: f64, idx: usize, rel_tol: f64) -> f64 {
        loop {
            let mid = 0.5 * (lo + hi);
            let scale = lo.abs().max(hi.abs());
            if hi - lo <= rel_tol * scale || mid <= lo || mid >= hi {
                return mid;
            }
            if self.count_below(mid) > idx {
                hi = mid;
            } else {
                lo = mid;
            }
        }
    }

    /// Eigenvector for the eigenvalue `lambda` by inverse iteration with a
    /// pivoted LU factorization of `T − σ`. Unit Euclidean norm; the first
    /// non-negligible entry is positive.
    pub fn eigenvector(&self, lambda: f64) -> Vec<f64> {
        let n = self.len();
        let (lo, hi) = self.gershgorin();
        let scale = lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE);
        let sigma = lambda + 4.0 * f64::EPSILON * scale;
        let lu = PivotedLu::factor(&self.d, &self.e, sigma);
        // Deterministic, non-special start vector.
        let mut v: Vec<f64> = (0..n).map(|i| 1.0 + 0.1 * ((i * 7919) % 97) as f64 / 97.0).collect();
        normalize(&mut v);
        for _ in 0..4 {
            lu.solve(&mut v);
            normalize(&mut v);
        }
        let peak = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        if let Some(first) = v.iter().find(|x| x.abs() > 1e-3 * peak) {
            if *first < 0.0 {
                v.iter_mut().for_each(|x| *x = -*x);
            }
        }
        v
    }
}

fn next_up(x: f64) -> f64 {
    if x.is_nan() || x == f64::INFINITY {
        return x;
    }
    if x == 0.0 {
        return f64::from_bits(1);
    }
    let bits = x.to_bits();
    f64::from_bits(if x > 0.0 { bits + 1 } else { bits - 1 })
}

fn normalize(v: &mut [f64]) {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    }
}

/// LU factorization with partial pivoting of a tridiagonal `T − σ`; `U` has
/// two super-diagonals.
struct PivotedLu {
    u0: Vec<f64>,
    u1: Vec<f64>,
    u2: Vec<f64>,
    l: Vec<f64>,
    swapped: Vec<bool>,
}

impl PivotedLu {
    fn factor(d: &[f64], e: &[f64], sigma: f64) -> Self {
        let n = d.len();
        let tiny = f64::EPSILON * d.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(1e-300);
        let mut u0 = vec![0.0; n];
        let mut u1 = vec![0.0; n];
        let mut u2 = vec![0.0; n];
        let mut l = vec![0.0; n];
        let mut swapped = vec![false; n];
        // Current row i: (a, b, c) at columns (i, i+1, i+2).
        let mut a = d[0] - sigma;
        let mut b = if n > 1 { e[0] } else { 0.0 };
        let mut c = 0.0;
        for i in 0..n {
            if i + 1 == n {
                u0[i] = if a.abs() < tiny { tiny } else { a };
                break;
            }
            // Row i+1 at columns (i, i+1, i+2).
            let na = e[i];
            let nb = d[i + 1] - sigma;
            let nc = if i + 2 < n { e[i + 1] } else { 0.0 };
            if na.abs() > a.abs() {
                swapped[i] = true;
                u0[i] = na;
                u1[i] = nb;
                u2[i] = nc;
                let m = a / na;
                l[i] = m;
                a = b - m * nb;
                b = c - m * nc;
            } else {
                let piv = if a.abs() < tiny { tiny } else { a };
                u0[i] = piv;
                u1[i] = b;
                u2[i] = c;
                let m = na / piv;
                l[i] = m;
                a = nb - m * b;
                b = nc - m * c;
            }
            c = 0.0;
        }
        Self { u0, u1, u2, l, swapped }
    }

    fn solve(&self, x: &mut [f64]) {
        let n = x.len();
        for i in 0..n.saturating_sub(1) {
            if self.swapped[i] {
                x.swap(i, i + 1);
            }
            x[i + 1] -= self.l[i] * x[i];
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            if i + 1 < n {
                s -= self.u1[i] * x[i + 1];
            }
            if i + 2 < n {
                s -= self.u2[i] * x[i + 2];
            }
            x[i] = s / self.u0[i];
        }
    }
}
