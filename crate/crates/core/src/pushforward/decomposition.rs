use super::{Interval, Map};
use crate::error::{invalid, Error, Result};

pub const DEFAULT_SCAN_RESOLUTION: usize = 4096;

/// Below this magnitude a scanned derivative counts as zero.
const ZERO_SLOPE: f64 = 1e-10;
const PROBES_PER_BRANCH: usize = 64;
const REFINE_FACTOR: usize = 8;

/// Interior point where the derivative vanishes or changes sign.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalPoint {
    pub location: f64,
    pub value: f64,
    /// `false` for a kink, where the one-sided slopes stay away from zero and
    /// the density remains bounded.
    pub singular: bool,
}

/// Maximal interval on which the map is strictly monotone.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Branch {
    pub lo: f64,
    pub hi: f64,
    pub increasing: bool,
    pub f_lo: f64,
    pub f_hi: f64,
}

impl Branch {
    pub fn range(&self) -> Interval {
        Interval::new(self.f_lo, self.f_hi)
    }

    /// Solves `f(x) = y` for `y` in the branch range by safeguarded Newton
    /// iteration inside the bracket `[lo, hi]`.
    pub fn invert(&self, map: &Map, y: f64) -> f64 {
        if y == self.f_lo {
            return self.lo;
        }
        if y == self.f_hi {
            return self.hi;
        }
        let sign = if self.increasing { 1.0 } else { -1.0 };
        let (mut a, mut b) = (self.lo, self.hi);
        let span = self.f_hi - self.f_lo;
        let mut x = if span != 0.0 {
            (self.lo + (y - self.f_lo) / span * (self.hi - self.lo)).clamp(a, b)
        } else {
            0.5 * (a + b)
        };
        let mut last_step = b - a;
        for _ in 0..100 {
            let (v, d) = map.value_and_slope(x);
            let g = sign * (v - y);
            if g == 0.0 {
                return x;
            }
            if g < 0.0 {
                a = x;
            } else {
                b = x;
            }
            let newton = x - (v - y) / d;
            let step =
                if d != 0.0 && newton > a && newton < b && (newton - x).abs() < 0.5 * last_step {
                    newton - x
                } else {
                    0.5 * (a + b) - x
                };
            last_step = step.abs();
            x += step;
            if last_step <= 4.0 * f64::EPSILON * x.abs().max(1e-300)
                || b - a <= f64::EPSILON * 2.0 * x.abs().max(1.0)
            {
                break;
            }
        }
        x
    }
}

/// A map together with its monotone pieces.
#[derive(Debug, Clone)]
pub struct PiecewiseMonotoneMap {
    map: Map,
    critical: Vec<CriticalPoint>,
    branches: Vec<Branch>,
    kappa: f64,
    support: Interval,
    singular_values: Vec<f64>,
}

impl PiecewiseMonotoneMap {
    pub fn map(&self) -> &Map {
        &self.map
    }

    pub fn critical(&self) -> &[CriticalPoint] {
        &self.critical
    }

    pub fn critical_points(&self) -> Vec<f64> {
        self.critical.iter().map(|c| c.location).collect()
    }

    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    /// Smallest |f'| seen on the branches away from critical neighbourhoods.
    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn support(&self) -> Interval {
        self.support
    }

    /// Images where the pushforward density is unbounded, ascending.
    pub fn singular_values(&self) -> &[f64] {
        &self.singular_values
    }

    /// Branch-range endpoints, ascending and deduplicated. The density may
    /// jump or blow up only at these values.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self
            .branches
            .iter()
            .flat_map(|b| [b.f_lo, b.f_hi])
            .chain(self.singular_values.iter().copied())
            .collect();
        sort_dedup(&mut v, 0.0);
        v
    }

    pub(crate) fn is_near_singular(&self, y: f64) -> bool {
        self.singular_values
            .iter()
            .any(|&s| (y - s).abs() <= 1e-12 * s.abs().max(1.0))
    }
}

pub(crate) fn sort_dedup(v: &mut Vec<f64>, tol: f64) {
    v.sort_by(f64::total_cmp);
    v.dedup_by(|b, a| (*b - *a).abs() <= tol * a.abs().max(1.0));
}

fn linspace(a: f64, b: f64, cells: usize) -> impl Iterator<Item = f64> {
    (0..=cells).map(move |i| {
        if i == cells {
            b
        } else {
            a + (b - a) * i as f64 / cells as f64
        }
    })
}

fn sign_of(d: f64) -> i8 {
    if d.abs() < ZERO_SLOPE {
        0
    } else if d > 0.0 {
        1
    } else {
        -1
    }
}

/// Sign-change brackets `(a, b)` and near-zero points over a uniform scan.
struct Scan {
    brackets: Vec<(f64, f64)>,
    even_zeros: Vec<f64>,
}

fn scan_slopes(map: &Map, a: f64, b: f64, cells: usize) -> Result<Scan> {
    let xs: Vec<f64> = linspace(a, b, cells).collect();
    let ds: Vec<f64> = xs.iter().map(|&x| map.slope(x)).collect();
    if let Some(i) = ds.iter().position(|d| !d.is_finite()) {
        return Err(Error::Evaluation {
            id: map.id(),
            at: xs[i],
        });
    }
    let signs: Vec<i8> = ds.iter().map(|&d| sign_of(d)).collect();
    let nonzero: Vec<usize> = (0..signs.len()).filter(|&i| signs[i] != 0).collect();
    let Some(&first) = nonzero.first() else {
        return Err(Error::FlatSegment {
            near: 0.5 * (a + b),
        });
    };
    let mut out = Scan {
        brackets: Vec::new(),
        even_zeros: Vec::new(),
    };
    let check_run = |lo: usize, hi: usize| -> Result<()> {
        // zeros strictly between scan indices lo and hi
        if hi > lo + 3 {
            return Err(Error::FlatSegment { near: xs[lo + 1] });
        }
        Ok(())
    };
    if first > 0 {
        check_run(0, first)?;
    }
    if let Some(&last) = nonzero.last() {
        if last + 1 < xs.len() {
            check_run(last, xs.len() - 1)?;
        }
    }
    for w in nonzero.windows(2) {
        let (i, j) = (w[0], w[1]);
        if j > i + 1 {
            check_run(i, j)?;
        }
        if signs[i] != signs[j] {
            out.brackets.push((xs[i], xs[j]));
        } else if j > i + 1 {
            let k = (i + 1..j)
                .min_by(|&p, &q| ds[p].abs().total_cmp(&ds[q].abs()))
                .unwrap();
            out.even_zeros.push(xs[k]);
        }
    }
    Ok(out)
}

/// Bisection on the derivative sign, keeping whichever of the final bracket
/// ends and a secant estimate gives the more extreme value.
fn locate_sign_change(map: &Map, mut a: f64, mut b: f64) -> f64 {
    let mut da = map.slope(a);
    let mut db = map.slope(b);
    let rising = db > da;
    // bisect down to adjacent floats so kinks land on the extremum exactly
    loop {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let dm = map.slope(m);
        if dm == 0.0 {
            return m;
        }
        if (dm > 0.0) == (da > 0.0) {
            a = m;
            da = dm;
        } else {
            b = m;
            db = dm;
        }
    }
    let mut best = a;
    let mut candidates = vec![b];
    if db != da {
        let x = a - da * (b - a) / (db - da);
        if x.is_finite() && x >= a && x <= b {
            candidates.push(x);
        }
    }
    for x in candidates {
        let (fx, fb) = (map.value(x), map.value(best));
        if (rising && fx < fb) || (!rising && fx > fb) {
            best = x;
        }
    }
    best
}

/// Groups brackets that share an endpoint.
fn adjacent_groups(brackets: &[(f64, f64)]) -> Vec<Vec<(f64, f64)>> {
    let mut groups: Vec<Vec<(f64, f64)>> = Vec::new();
    for &br in brackets {
        match groups.last_mut() {
            Some(g) if g.last().unwrap().1 == br.0 => g.push(br),
            _ => groups.push(vec![br]),
        }
    }
    groups
}

fn is_singular(map: &Map, c: f64) -> bool {
    let probe = |h: f64| {
        let l = map.slope((c - h).max(-1.0)).abs();
        let r = map.slope((c + h).min(1.0)).abs();
        l.min(r)
    };
    let near = probe(1e-10);
    let far = probe(1e-8);
    // slopes that do not shrink toward c mark a kink
    !(near > ZERO_SLOPE && near >= 0.5 * far)
}

/// Splits `map` into monotone branches at the zeros of its derivative.
pub fn monotone_decomposition(
    map: impl Into<Map>,
    scan_resolution: usize,
) -> Result<PiecewiseMonotoneMap> {
    let map = map.into();
    if !map.has_derivative() {
        return Err(Error::MissingDerivative(map.id()));
    }
    if scan_resolution < 256 {
        return Err(invalid(format!(
            "scan resolution must be at least 256, got {scan_resolution}"
        )));
    }
    let scan = scan_slopes(&map, -1.0, 1.0, scan_resolution)?;

    let mut locations = scan.even_zeros.clone();
    let mut even = scan.even_zeros;
    for group in adjacent_groups(&scan.brackets) {
        if group.len() == 1 {
            let (a, b) = group[0];
            locations.push(locate_sign_change(&map, a, b));
            continue;
        }
        let (a, b) = (group[0].0, group.last().unwrap().1);
        let fine = scan_slopes(&map, a, b, REFINE_FACTOR * group.len())?;
        for w in fine.brackets.windows(2) {
            if w[0].1 == w[1].0 {
                return Err(Error::UnresolvedOscillation { near: w[0].1 });
            }
        }
        for &(fa, fb) in &fine.brackets {
            locations.push(locate_sign_change(&map, fa, fb));
        }
        locations.extend(&fine.even_zeros);
        even.extend(fine.even_zeros);
    }
    locations.retain(|&x| x > -1.0 && x < 1.0);
    sort_dedup(&mut locations, 1e-12);

    let critical: Vec<CriticalPoint> = locations
        .iter()
        .map(|&x| CriticalPoint {
            location: x,
            value: map.value(x),
            singular: even.contains(&x) || is_singular(&map, x),
        })
        .collect();

    let mut bounds = vec![-1.0];
    bounds.extend(&locations);
    bounds.push(1.0);

    let mut branches = Vec::with_capacity(bounds.len() - 1);
    let mut kappa = f64::INFINITY;
    let scan_step = 2.0 / scan_resolution as f64;
    for (k, w) in bounds.windows(2).enumerate() {
        let (lo, hi) = (w[0], w[1]);
        let (f_lo, f_hi) = (map.value(lo), map.value(hi));
        if f_lo == f_hi {
            return Err(Error::FlatSegment {
                near: 0.5 * (lo + hi),
            });
        }
        let increasing = f_hi > f_lo;
        for i in 1..=PROBES_PER_BRANCH {
            let x = lo + (hi - lo) * i as f64 / (PROBES_PER_BRANCH + 1) as f64;
            let s = sign_of(map.slope(x));
            if s != 0 && (s > 0) != increasing {
                return Err(Error::BranchNotMonotone { lo, hi });
            }
        }
        // κ: scan points away from critical ends of the branch
        let margin = 0.05 * (hi - lo);
        let from = if k == 0 { lo } else { lo + margin };
        let to = if k + 2 == bounds.len() {
            hi
        } else {
            hi - margin
        };
        let first = ((from + 1.0) / scan_step).ceil() as usize;
        let last = ((to + 1.0) / scan_step).floor() as usize;
        for i in first..=last.min(scan_resolution) {
            let x = -1.0 + i as f64 * scan_step;
            if x >= from && x <= to {
                kappa = kappa.min(map.slope(x).abs());
            }
        }
        branches.push(Branch {
            lo,
            hi,
            increasing,
            f_lo,
            f_hi,
        });
    }
    if !kappa.is_finite() {
        kappa = 0.0;
    }

    let support = branches
        .iter()
        .map(Branch::range)
        .reduce(|a, b| a.hull(&b))
        .expect("at least one branch");

    let mut singular_values: Vec<f64> = critical
        .iter()
        .filter(|c| c.singular)
        .map(|c| c.value)
        .collect();
    for x in [-1.0, 1.0] {
        if map.slope(x).abs() < ZERO_SLOPE {
            singular_values.push(map.value(x));
        }
    }
    sort_dedup(&mut singular_values, 1e-14);

    Ok(PiecewiseMonotoneMap {
        map,
        critical,
        branches,
        kappa,
        support,
        singular_values,
    })
}
