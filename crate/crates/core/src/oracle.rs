//! Reference values independent of the finite-difference solvers: Bessel
//! function zeros and closed-form spectra.

/// Unevaluated sum `hi + lo` carrying about 32 significant digits.
#[derive(Debug, Clone, Copy)]
struct DoubleDouble {
    hi: f64,
    lo: f64,
}

impl DoubleDouble {
    fn from(x: f64) -> Self {
        Self { hi: x, lo: 0.0 }
    }

    fn two_sum(a: f64, b: f64) -> (f64, f64) {
        let s = a + b;
        let bb = s - a;
        (s, (a - (s - bb)) + (b - bb))
    }

    fn add(self, o: Self) -> Self {
        let (s, e) = Self::two_sum(self.hi, o.hi);
        let e = e + self.lo + o.lo;
        let (hi, lo) = Self::two_sum(s, e);
        Self { hi, lo }
    }

    fn mul(self, o: Self) -> Self {
        let p = self.hi * o.hi;
        let e = self.hi.mul_add(o.hi, -p);
        let e = e + self.hi * o.lo + self.lo * o.hi;
        let (hi, lo) = Self::two_sum(p, e);
        Self { hi, lo }
    }

    fn div(self, o: Self) -> Self {
        let q1 = self.hi / o.hi;
        let r = self.add(o.mul(Self::from(-q1)));
        let q2 = r.hi / o.hi;
        let (hi, lo) = Self::two_sum(q1, q2);
        Self { hi, lo }
    }
}

/// `J_ν(x) / ((x/2)^ν / Γ(ν+1))`, i.e. the ascending series
/// `Σ (−x²/4)^m / (m! (ν+1)_m)`, summed in double-double arithmetic so the
/// cancellation between large alternating terms does not destroy the sign
/// near zeros. Positive prefactors do not move zeros, so they are dropped.
pub fn bessel_j_reduced(nu: f64, x: f64) -> f64 {
    let q = DoubleDouble::from(x).mul(DoubleDouble::from(x)).mul(DoubleDouble::from(-0.25));
    let mut term = DoubleDouble::from(1.0);
    let mut sum = term;
    let mut peak = 1.0f64;
    let mut m = 0u32;
    loop {
        m += 1;
        let denom = DoubleDouble::from(m as f64).mul(DoubleDouble::from(m as f64 + nu));
        term = term.mul(q).div(denom);
        sum = sum.add(term);
        peak = peak.max(term.hi.abs());
        if (term.hi.abs() < 1e-33 * peak && m as f64 > x) || m > 2000 {
            break;
        }
    }
    sum.hi + sum.lo
}

/// First `count` positive zeros of `J_ν` (ν > −1), found by scanning for
/// sign changes of the reduced series and bisecting to full precision.
/// Reliable for zeros below about 40.
pub fn bessel_zeros(nu: f64, count: usize) -> Vec<f64> {
    assert!(nu > -1.0, "order must exceed -1");
    let step = 0.05;
    let mut zeros = Vec::with_capacity(count);
    let mut a = 1e-6;
    let mut fa = bessel_j_reduced(nu, a);
    while zeros.len() < count {
        let b = a + step;
        let fb = bessel_j_reduced(nu, b);
        if fa == 0.0 {
            zeros.push(a);
        } else if fa.signum() != fb.signum() {
            let (mut lo, mut hi, mut flo) = (a, b, fa);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                let fm = bessel_j_reduced(nu, mid);
                if fm.signum() == flo.signum() {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            zeros.push(0.5 * (lo + hi));
        }
        a = b;
        fa = fb;
    }
    zeros.truncate(count);
    zeros
}

/// Dirichlet eigenvalues of `−∂² + C/x²` on `(0, L]`: `(j_{ν,k}/L)²` with
/// `ν = √(1/4 + C)`.
pub fn bessel_dirichlet_eigenvalues(c: f64, length: f64, count: usize) -> Vec<f64> {
    let nu = (0.25 + c).sqrt();
    bessel_zeros(nu, count).into_iter().map(|z| (z / length).powi(2)).collect()
}

/// Half-line oscillator `−∂² + x²` with a Dirichlet condition at 0: `4j − 1`.
pub fn half_oscillator_eigenvalues(count: usize) -> Vec<f64> {
    (1..=count).map(|j| 4.0 * j as f64 - 1.0).collect()
}

/// `Σ_j e^{−τ(4j−1)} = e^{−3τ} / (1 − e^{−4τ})`.
pub fn half_oscillator_heat_trace(tau: f64) -> f64 {
    (-3.0 * tau).exp() / -(-4.0 * tau).exp_m1()
}

#[cfg(test)]
mod tests {
    use super::*;

    // High-precision reference zeros (50-digit arithmetic, rounded).
    const J1: [f64; 7] = [
        3.831_705_970_207_512_3,
        7.015_586_669_815_618_8,
        10.173_468_135_062_722,
        13.323_691_936_314_223,
        16.470_630_050_877_633,
        19.615_858_510_468_242,
        22.760_084_380_592_772,
    ];
    const J34: [f64; 7] = [
        3.491_008_374_108_422,
        6.652_635_523_121_828_7,
        9.801_612_359_139_852,
        12.947_034_889_138_837,
        16.090_969_528_199_361,
        19.234_141_760_482_74,
        22.376_871_574_815_685,
    ];

    #[test]
    fn j1_zeros() {
        for (z, r) in bessel_zeros(1.0, 7).iter().zip(J1) {
            assert!((z - r).abs() < 1e-13 * r, "{z} vs {r}");
        }
    }

    #[test]
    fn j_three_quarter_zeros() {
        for (z, r) in bessel_zeros(0.75, 7).iter().zip(J34) {
            assert!((z - r).abs() < 1e-13 * r, "{z} vs {r}");
        }
    }

    #[test]
    fn half_integer_order_is_elementary() {
        // J_{1/2}(x) ∝ sin(x)/√x: zeros at kπ.
        for (k, z) in bessel_zeros(0.5, 8).iter().enumerate() {
            let r = (k + 1) as f64 * std::f64::consts::PI;
            assert!((z - r).abs() < 1e-13 * r);
        }
        // J_{3/2} zeros solve tan x = x.
        for z in bessel_zeros(1.5, 7) {
            assert!((z.tan() - z).abs() < 1e-9 * z * z);
        }
    }

    #[test]
    fn grushin_ground_state() {
        let ev = bessel_dirichlet_eigenvalues(0.75, 1.0, 1)[0];
        assert!((ev - 14.681_970_642_123_893).abs() < 1e-12);
    }

    #[test]
    fn oscillator_trace() {
        let direct: f64 = half_oscillator_eigenvalues(200).iter().map(|m| (-m).exp()).sum();
        assert!((half_oscillator_heat_trace(1.0) - direct).abs() < 1e-16);
        assert!((half_oscillator_heat_trace(1.0) - 0.050_715_963_643_859_04).abs() < 1e-15);
    }
}
