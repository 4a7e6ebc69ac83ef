//! Closed-form spectra of the base manifold `(M, G)`.
//!
//! Eigenvalues come out as aggregated levels `(ω, multiplicity)` in strictly
//! increasing order, generated lazily so the assembler can keep pulling
//! levels until its cutoff is certified.

use std::collections::{BTreeMap, VecDeque};
use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};
use crate::model::weyl_gamma;
use crate::weyl_analysis::fit::{fit_power, CountSample};

/// One eigenvalue of the base together with its multiplicity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BaseLevel {
    pub omega: f64,
    pub multiplicity: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum BaseManifold {
    Circle { circumference: f64 },
    FlatTorus { sides: Vec<f64> },
    Sphere { dim: usize, radius: f64 },
    /// A user-supplied spectrum. `volume` is needed only for Weyl constants.
    Explicit { dim: usize, volume: Option<f64>, levels: Vec<BaseLevel> },
}

impl BaseManifold {
    pub fn circle(circumference: f64) -> Self {
        BaseManifold::Circle { circumference }
    }

    pub fn dim(&self) -> usize {
        match self {
            BaseManifold::Circle { .. } => 1,
            BaseManifold::FlatTorus { sides } => sides.len(),
            BaseManifold::Sphere { dim, .. } | BaseManifold::Explicit { dim, .. } => *dim,
        }
    }

    /// Riemannian volume `v_G(M)`.
    pub fn volume(&self) -> Option<f64> {
        match self {
            BaseManifold::Circle { circumference } => Some(*circumference),
            BaseManifold::FlatTorus { sides } => Some(sides.iter().product()),
            BaseManifold::Sphere { dim, radius } => {
                let m = *dim as f64 + 1.0;
                Some(2.0 * PI.powf(m / 2.0) / gamma(m / 2.0) * radius.powi(*dim as i32))
            }
            BaseManifold::Explicit { volume, .. } => *volume,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64, what: &str| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::domain(format!("{what} must be positive, got {v}")))
            }
        };
        match self {
            BaseManifold::Circle { circumference } => positive(*circumference, "circumference"),
            BaseManifold::FlatTorus { sides } => {
                if sides.is_empty() {
                    return Err(Error::domain("torus needs at least one side length"));
                }
                sides.iter().try_for_each(|&l| positive(l, "torus side"))
            }
            BaseManifold::Sphere { dim, radius } => {
                if *dim == 0 {
                    return Err(Error::domain("sphere dimension must be at least 1"));
                }
                positive(*radius, "sphere radius")
            }
            BaseManifold::Explicit { dim, volume, levels } => {
                if *dim == 0 {
                    return Err(Error::domain("explicit base dimension must be at least 1"));
                }
                if let Some(v) = volume {
                    positive(*v, "explicit base volume")?;
                }
                let first = levels
                    .first()
                    .ok_or_else(|| Error::domain("explicit spectrum is empty"))?;
                if !(first.omega >= 0.0) {
                    return Err(Error::domain("explicit spectrum must start at ω ≥ 0"));
                }
                for w in levels.windows(2) {
                    if !(w[1].omega > w[0].omega) {
                        return Err(Error::domain("explicit spectrum must be strictly increasing"));
                    }
                }
                if levels.iter().any(|l| l.multiplicity == 0 || !l.omega.is_finite()) {
                    return Err(Error::domain("explicit multiplicities must be ≥ 1"));
                }
                Ok(())
            }
        }
    }

    /// Parses `circle:L`, `sphere:n:r`, `torus:L1,L2,...` or `file:PATH`.
    pub fn parse(descriptor: &str) -> Result<Self> {
        let num = |s: &str| -> Result<f64> {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("invalid number `{s}` in base descriptor")))
        };
        let (kind, rest) = descriptor
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("base descriptor `{descriptor}` lacks a kind")))?;
        let base = match kind {
            "circle" => BaseManifold::Circle { circumference: num(rest)? },
            "sphere" => {
                let (n, r) = rest
                    .split_once(':')
                    .ok_or_else(|| Error::Parse("sphere descriptor is sphere:n:r".into()))?;
                let dim = n
                    .trim()
                    .parse::<usize>()
                    .map_err(|_| Error::Parse(format!("invalid sphere dimension `{n}`")))?;
                BaseManifold::Sphere { dim, radius: num(r)? }
            }
            "torus" => BaseManifold::FlatTorus {
                sides: rest.split(',').map(num).collect::<Result<_>>()?,
            },
            "file" => Self::from_file(Path::new(rest))?,
            other => return Err(Error::Parse(format!("unknown base kind `{other}`"))),
        };
        base.validate()?;
        Ok(base)
    }

    /// Reads a two-column `eigenvalue multiplicity` table. Lines starting with
    /// `#` are comments, except `# dim: n` and `# volume: v`.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut dim = 1;
        let mut volume = None;
        let mut levels = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if let Some(comment) = line.strip_prefix('#') {
                if let Some((key, value)) = comment.split_once(':') {
                    let value = value.trim();
                    match key.trim() {
                        "dim" => {
                            dim = value.parse().map_err(|_| {
                                Error::Parse(format!("line {}: bad dim `{value}`", lineno + 1))
                            })?
                        }
                        "volume" => {
                            volume = Some(value.parse().map_err(|_| {
                                Error::Parse(format!("line {}: bad volume `{value}`", lineno + 1))
                            })?)
                        }
                        _ => {}
                    }
                }
                continue;
            }
            if line.is_empty() {
                continue;
            }
            let mut cols = line.split(|c: char| c.is_whitespace() || c == ',').filter(|s| !s.is_empty());
            let bad = || Error::Parse(format!("line {}: expected `eigenvalue multiplicity`", lineno + 1));
            let omega: f64 = cols.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
            let multiplicity: u64 = cols.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
            if cols.next().is_some() {
                return Err(bad());
            }
            levels.push(BaseLevel { omega, multiplicity });
        }
        let base = BaseManifold::Explicit { dim, volume, levels };
        base.validate()?;
        Ok(base)
    }
}

impl std::fmt::Display for BaseManifold {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BaseManifold::Circle { circumference } => write!(f, "circle:{circumference}"),
            BaseManifold::FlatTorus { sides } => {
                let s: Vec<String> = sides.iter().map(|l| l.to_string()).collect();
                write!(f, "torus:{}", s.join(","))
            }
            BaseManifold::Sphere { dim, radius } => write!(f, "sphere:{dim}:{radius}"),
            BaseManifold::Explicit { dim, levels, .. } => {
                write!(f, "explicit(dim={dim}, {} levels)", levels.len())
            }
        }
    }
}

impl std::str::FromStr for BaseManifold {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

/// Sides whose squared inverses are rational multiples of one another share
/// an integer key, so equal eigenvalues collide exactly.
#[derive(Debug, Clone)]
struct TorusClass {
    /// Indices into the side list.
    members: Vec<usize>,
    /// Integer coefficient of `m_i²` for each member.
    coeffs: Vec<u64>,
    /// `ω` contributed per unit of key.
    scale: f64,
}

#[derive(Debug, Clone)]
struct TorusLattice {
    sides: Vec<f64>,
    classes: Vec<TorusClass>,
}

/// Best rational approximation `p/q` of `x > 0` with `q ≤ max_den`, if one
/// matches to `rel_tol`.
fn rationalize(x: f64, max_den: u64, rel_tol: f64) -> Option<(u64, u64)> {
    let (mut p0, mut q0, mut p1, mut q1) = (0u64, 1u64, 1u64, 0u64);
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        if a > 1e15 {
            break;
        }
        let a = a as u64;
        let p2 = a.checked_mul(p1)?.checked_add(p0)?;
        let q2 = a.checked_mul(q1)?.checked_add(q0)?;
        if q2 > max_den {
            break;
        }
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        if ((p1 as f64 / q1 as f64) - x).abs() <= rel_tol * x {
            return Some((p1, q1));
        }
        let frac = r - a as f64;
        if frac <= 0.0 {
            break;
        }
        r = 1.0 / frac;
    }
    None
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl TorusLattice {
    fn new(sides: &[f64]) -> Self {
        let weights: Vec<f64> = sides.iter().map(|l| 1.0 / (l * l)).collect();
        let mut assigned = vec![false; sides.len()];
        let mut classes = Vec::new();
        for i in 0..sides.len() {
            if assigned[i] {
                continue;
            }
            assigned[i] = true;
            let mut members = vec![i];
            let mut ratios = vec![(1u64, 1u64)];
            for j in i + 1..sides.len() {
                if assigned[j] {
                    continue;
                }
                if let Some(pq) = rationalize(weights[j] / weights[i], 1_000_000, 1e-12) {
                    assigned[j] = true;
                    members.push(j);
                    ratios.push(pq);
                }
            }
            let lcm = ratios.iter().fold(1u64, |acc, &(_, q)| acc / gcd(acc, q) * q);
            let coeffs = ratios.iter().map(|&(p, q)| p * (lcm / q)).collect();
            classes.push(TorusClass {
                members,
                coeffs,
                scale: 4.0 * PI * PI * weights[i] / lcm as f64,
            });
        }
        Self { sides: sides.to_vec(), classes }
    }

    fn omega(&self, keys: &[u128]) -> f64 {
        self.classes.iter().zip(keys).map(|(c, &k)| c.scale * k as f64).sum()
    }

    /// Aggregated levels with `lo < ω ≤ hi`, ascending.
    fn shell(&self, lo: f64, hi: f64) -> Vec<BaseLevel> {
        let n = self.sides.len();
        let bounds: Vec<i64> = self
            .sides
            .iter()
            .map(|l| (l * hi.max(0.0).sqrt() / (2.0 * PI)).floor() as i64 + 1)
            .collect();
        let mut counts: BTreeMap<Vec<u128>, u64> = BTreeMap::new();
        let mut m = vec![0i64; n];
        let mut keys = vec![0u128; self.classes.len()];
        let mut slot = vec![(0usize, 0usize); n];
        for (ci, class) in self.classes.iter().enumerate() {
            for (mi, &side) in class.members.iter().enumerate() {
                slot[side] = (ci, mi);
            }
        }
        self.scan(0, &bounds, &slot, &mut m, &mut keys, lo, hi, &mut counts);
        let mut levels: Vec<BaseLevel> = counts
            .into_iter()
            .map(|(k, c)| BaseLevel { omega: self.omega(&k), multiplicity: c })
            .collect();
        levels.sort_by(|a, b| a.omega.total_cmp(&b.omega));
        let mut merged: Vec<BaseLevel> = Vec::with_capacity(levels.len());
        for l in levels {
            match merged.last_mut() {
                Some(prev) if prev.omega == l.omega => prev.multiplicity += l.multiplicity,
                _ => merged.push(l),
            }
        }
        merged
    }

    #[allow(clippy::too_many_arguments)]
    fn scan(
        &self,
        axis: usize,
        bounds: &[i64],
        slot: &[(usize, usize)],
        m: &mut Vec<i64>,
        keys: &mut Vec<u128>,
        lo: f64,
        hi: f64,
        counts: &mut BTreeMap<Vec<u128>, u64>,
    ) {
        if axis == m.len() {
            let w = self.omega(keys);
            if w > lo && w <= hi {
                *counts.entry(keys.clone()).or_insert(0) += 1;
            }
            return;
        }
        let (ci, mi) = slot[axis];
        let coeff = self.classes[ci].coeffs[mi] as u128;
        for v in -bounds[axis]..=bounds[axis] {
            let add = coeff * (v * v) as u128;
            keys[ci] += add;
            if self.omega(keys) <= hi {
                m[axis] = v;
                self.scan(axis + 1, bounds, slot, m, keys, lo, hi, counts);
            }
            keys[ci] -= add;
        }
    }
}

fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as u64
}

/// Multiplicity of the degree-`l` spherical harmonics on `S^n`.
pub fn sphere_multiplicity(n: usize, l: u64) -> u64 {
    let n = n as u64;
    if l < 2 {
        return binomial(l + n, n);
    }
    binomial(l + n, n) - binomial(l + n - 2, n)
}

#[derive(Debug, Clone)]
enum Cursor {
    Circle { next_k: u64 },
    Sphere { next_l: u64 },
    Torus { lattice: TorusLattice, scanned_to: f64 },
    Explicit { next: usize },
}

/// Lazy, resumable generator of base levels in increasing order.
///
/// The optional limit can be raised with [`EigenvalueStream::extend_to`] to
/// resume from where iteration stopped.
#[derive(Debug, Clone)]
pub struct EigenvalueStream {
    base: BaseManifold,
    limit: f64,
    cursor: Cursor,
    buffer: VecDeque<BaseLevel>,
}

impl EigenvalueStream {
    pub fn new(base: &BaseManifold) -> Self {
        Self::with_limit(base, f64::INFINITY)
    }

    pub fn with_limit(base: &BaseManifold, limit: f64) -> Self {
        let cursor = match base {
            BaseManifold::Circle { .. } => Cursor::Circle { next_k: 0 },
            BaseManifold::Sphere { .. } => Cursor::Sphere { next_l: 0 },
            BaseManifold::FlatTorus { sides } => Cursor::Torus {
                lattice: TorusLattice::new(sides),
                scanned_to: -1.0,
            },
            BaseManifold::Explicit { .. } => Cursor::Explicit { next: 0 },
        };
        Self { base: base.clone(), limit, cursor, buffer: VecDeque::new() }
    }

    pub fn limit(&self) -> f64 {
        self.limit
    }

    pub fn extend_to(&mut self, limit: f64) {
        self.limit = self.limit.max(limit);
    }

    fn produce(&mut self) -> Option<BaseLevel> {
        if let Some(l) = self.buffer.pop_front() {
            return Some(l);
        }
        match (&mut self.cursor, &self.base) {
            (Cursor::Circle { next_k }, BaseManifold::Circle { circumference }) => {
                let k = *next_k;
                *next_k += 1;
                let w = 2.0 * PI * k as f64 / circumference;
                Some(BaseLevel { omega: w * w, multiplicity: if k == 0 { 1 } else { 2 } })
            }
            (Cursor::Sphere { next_l }, BaseManifold::Sphere { dim, radius }) => {
                let l = *next_l;
                *next_l += 1;
                let lf = l as f64;
                Some(BaseLevel {
                    omega: lf * (lf + *dim as f64 - 1.0) / (radius * radius),
                    multiplicity: sphere_multiplicity(*dim, l),
                })
            }
            (Cursor::Torus { lattice, scanned_to }, _) => {
                // Shells double in ω; each rescan costs about as much as
                // all previous ones combined.
                while self.buffer.is_empty() {
                    let lo = *scanned_to;
                    let hi = if lo <= 0.0 {
                        let w_min = lattice
                            .sides
                            .iter()
                            .map(|l| (2.0 * PI / l).powi(2))
                            .fold(f64::INFINITY, f64::min);
                        4.0 * w_min
                    } else {
                        2.0 * lo
                    };
                    self.buffer.extend(lattice.shell(lo, hi));
                    *scanned_to = hi;
                }
                self.buffer.pop_front()
            }
            (Cursor::Explicit { next }, BaseManifold::Explicit { levels, .. }) => {
                let l = levels.get(*next).copied();
                *next += 1;
                l
            }
            _ => unreachable!("cursor always matches its base"),
        }
    }
}

impl Iterator for EigenvalueStream {
    type Item = BaseLevel;

    fn next(&mut self) -> Option<BaseLevel> {
        let level = self.produce()?;
        if level.omega > self.limit {
            self.buffer.push_front(level);
            return None;
        }
        Some(level)
    }
}

/// Levels with `ω ≤ omega_max`.
pub fn eigenvalues_below(base: &BaseManifold, omega_max: f64) -> EigenvalueStream {
    EigenvalueStream::with_limit(base, omega_max)
}

/// `N_M(ω)`, counted with multiplicity.
pub fn counting_n_m(base: &BaseManifold, omega: f64) -> u64 {
    if omega < 0.0 {
        return 0;
    }
    eigenvalues_below(base, omega).map(|l| l.multiplicity).sum()
}

/// Fitted base Weyl law against `(n/2, γ_n·Vol)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BaseWeylCheck {
    pub exponent: f64,
    pub constant: f64,
    pub target_exponent: f64,
    pub target_constant: f64,
    /// Relative deviation of the constant fitted at the exact exponent.
    pub pinned_constant_deviation: f64,
    pub exponent_deviation: f64,
    pub constant_deviation: f64,
    pub eigenvalue_count: u64,
    pub window: (f64, f64),
}

/// Fits `N_M` over the dyadic window `[ω_max/16, ω_max]`.
pub fn base_weyl_check(base: &BaseManifold, omega_max: f64) -> Result<BaseWeylCheck> {
    let levels: Vec<BaseLevel> = eigenvalues_below(base, omega_max).collect();
    let total: u64 = levels.iter().map(|l| l.multiplicity).sum();
    if total < 1000 {
        return Err(Error::Insufficient(format!(
            "base Weyl check needs at least 1000 eigenvalues below {omega_max}, found {total}"
        )));
    }
    let volume = base
        .volume()
        .ok_or_else(|| Error::MissingDependency("base volume".into()))?;
    let mut cumulative = Vec::with_capacity(levels.len());
    let mut acc = 0u64;
    for l in &levels {
        acc += l.multiplicity;
        cumulative.push((l.omega, acc));
    }
    let count_at = |w: f64| -> u64 {
        let idx = cumulative.partition_point(|&(o, _)| o <= w);
        if idx == 0 {
            0
        } else {
            cumulative[idx - 1].1
        }
    };
    let window = (omega_max / 16.0, omega_max);
    let samples: Vec<CountSample> = (0..64)
        .map(|i| {
            let lambda = window.0 * 16f64.powf(i as f64 / 63.0);
            CountSample { lambda, count: count_at(lambda) as f64 }
        })
        .collect();
    let fit = fit_power(&samples, window)?;
    let n = base.dim();
    let target_exponent = n as f64 / 2.0;
    let target_constant = weyl_gamma(n) * volume;
    let pinned = crate::weyl_analysis::fit::fit_constant(&samples, target_exponent, window)?;
    Ok(BaseWeylCheck {
        exponent: fit.exponent,
        constant: fit.constant,
        target_exponent,
        target_constant,
        pinned_constant_deviation: pinned / target_constant - 1.0,
        exponent_deviation: fit.exponent / target_exponent - 1.0,
        constant_deviation: fit.constant / target_constant - 1.0,
        eigenvalue_count: total,
        window,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn levels(base: &BaseManifold, w: f64) -> Vec<(f64, u64)> {
        eigenvalues_below(base, w).map(|l| (l.omega, l.multiplicity)).collect()
    }

    #[test]
    fn circle_levels() {
        let c = BaseManifold::circle(2.0 * PI);
        let l = levels(&c, 5.0);
        assert_eq!(l.len(), 3);
        assert_eq!(l[0], (0.0, 1));
        assert!((l[1].0 - 1.0).abs() < 1e-14 && l[1].1 == 2);
        assert!((l[2].0 - 4.0).abs() < 1e-13 && l[2].1 == 2);
        assert_eq!(counting_n_m(&c, 100.0 + 1e-9), 21);
        assert_eq!(counting_n_m(&c, -1.0), 0);
    }

    #[test]
    fn sphere_levels() {
        let s = BaseManifold::Sphere { dim: 2, radius: 1.0 };
        assert_eq!(levels(&s, 7.0), vec![(0.0, 1), (2.0, 3), (6.0, 5)]);
        assert_eq!(counting_n_m(&s, 6.0), 9);
        for l in 0..20u64 {
            assert_eq!(sphere_multiplicity(2, l), 2 * l + 1);
            // S³: (l+1)²
            assert_eq!(sphere_multiplicity(3, l), (l + 1) * (l + 1));
        }
        // Brute-force dimension of harmonic polynomials on S⁴: homogeneous
        // degree-l polynomials in 5 variables minus degree l−2.
        for l in 0..12u64 {
            let homogeneous = |d: u64| binomial(d + 4, 4);
            let expected = homogeneous(l) - if l >= 2 { homogeneous(l - 2) } else { 0 };
            assert_eq!(sphere_multiplicity(4, l), expected);
        }
    }

    #[test]
    fn explicit_passthrough() {
        let lv = vec![
            BaseLevel { omega: 0.0, multiplicity: 1 },
            BaseLevel { omega: 3.5, multiplicity: 4 },
        ];
        let base = BaseManifold::Explicit { dim: 1, volume: None, levels: lv.clone() };
        let got: Vec<BaseLevel> = EigenvalueStream::new(&base).collect();
        assert_eq!(got, lv);
    }

    #[test]
    fn square_torus_matches_gauss_circle_count() {
        let t = BaseManifold::FlatTorus { sides: vec![2.0 * PI, 2.0 * PI] };
        for r2 in [0i64, 1, 2, 5, 25, 50, 65, 100, 325] {
            let brute = (-20i64..=20)
                .flat_map(|a| (-20i64..=20).map(move |b| a * a + b * b))
                .filter(|&s| s <= r2)
                .count() as u64;
            assert_eq!(counting_n_m(&t, r2 as f64 + 1e-9), brute, "r² = {r2}");
        }
        // 25 = 0²+5² = 3²+4²: twelve lattice points share one level.
        let l = levels(&t, 25.5);
        let at25 = l.iter().find(|x| (x.0 - 25.0).abs() < 1e-9).unwrap();
        assert_eq!(at25.1, 12);
    }

    #[test]
    fn rationally_related_torus_merges_levels() {
        // Sides 1 and 2: ω = 4π²(a² + b²/4); a=1,b=0 collides with a=0,b=2.
        let t = BaseManifold::FlatTorus { sides: vec![1.0, 2.0] };
        let l = levels(&t, 4.0 * PI * PI * 1.01);
        let top = l.last().unwrap();
        assert!((top.0 / (4.0 * PI * PI) - 1.0).abs() < 1e-12);
        assert_eq!(top.1, 4);
    }

    #[test]
    fn stream_resumes_after_extension() {
        let t = BaseManifold::FlatTorus { sides: vec![2.0 * PI, 3.0] };
        let mut s = eigenvalues_below(&t, 10.0);
        let mut first: Vec<BaseLevel> = s.by_ref().collect();
        s.extend_to(40.0);
        first.extend(s.by_ref());
        let direct: Vec<BaseLevel> = eigenvalues_below(&t, 40.0).collect();
        assert_eq!(first, direct);
    }

    #[test]
    fn weyl_checks() {
        let c = base_weyl_check(&BaseManifold::circle(2.0 * PI), 2.6e7).unwrap();
        assert!(c.eigenvalue_count >= 10_000);
        assert!(c.exponent_deviation.abs() < 0.02, "{c:?}");
        assert!(c.constant_deviation.abs() < 0.02, "{c:?}");
        assert!((c.target_constant - 2.0).abs() < 1e-14);

        let t = base_weyl_check(&BaseManifold::FlatTorus { sides: vec![2.0 * PI; 2] }, 3300.0).unwrap();
        assert!(t.eigenvalue_count >= 10_000);
        assert!((t.target_constant - PI).abs() < 1e-12);
        assert!(t.exponent_deviation.abs() < 0.02, "{t:?}");
        assert!(t.constant_deviation.abs() < 0.02, "{t:?}");

        let s = base_weyl_check(&BaseManifold::Sphere { dim: 2, radius: 1.0 }, 1e4).unwrap();
        assert!((s.target_constant - 1.0).abs() < 1e-14);
        assert!(s.exponent_deviation.abs() < 0.02, "{s:?}");

        assert!(matches!(
            base_weyl_check(&BaseManifold::circle(2.0 * PI), 100.0),
            Err(Error::Insufficient(_))
        ));
    }

    #[test]
    fn descriptors() {
        assert_eq!(BaseManifold::parse("circle:6.5").unwrap(), BaseManifold::circle(6.5));
        assert_eq!(
            BaseManifold::parse("sphere:2:1.5").unwrap(),
            BaseManifold::Sphere { dim: 2, radius: 1.5 }
        );
        assert_eq!(
            BaseManifold::parse("torus:1,2").unwrap(),
            BaseManifold::FlatTorus { sides: vec![1.0, 2.0] }
        );
        assert!(BaseManifold::parse("circle:-1").is_err());
        assert!(BaseManifold::parse("cube:1").is_err());
        assert!(BaseManifold::parse("circle").is_err());
        let s2 = BaseManifold::Sphere { dim: 2, radius: 1.0 }.volume().unwrap();
        assert!((s2 - 4.0 * PI).abs() < 1e-13);
    }

    proptest! {
        #[test]
        fn stream_and_count_agree(w in 0.0f64..400.0, a in 0.5f64..8.0, b in 0.5f64..8.0) {
            let bases = [
                BaseManifold::circle(a),
                BaseManifold::FlatTorus { sides: vec![a, b] },
                BaseManifold::Sphere { dim: 3, radius: a },
            ];
            for base in &bases {
                let lv: Vec<BaseLevel> = eigenvalues_below(base, w).collect();
                let total: u64 = lv.iter().map(|l| l.multiplicity).sum();
                prop_assert_eq!(total, counting_n_m(base, w));
                prop_assert!(lv.iter().all(|l| l.multiplicity >= 1 && l.omega <= w));
                prop_assert!(lv.windows(2).all(|p| p[1].omega > p[0].omega));
            }
        }
    }
}
