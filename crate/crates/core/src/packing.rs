//! Point sets on the unit sphere with large minimum separation (the Tammes
//! problem): closed-form optima, a seeded maximin optimizer, and a reader
//! for plain-text coordinate tables.

use std::f64::consts::PI;
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::manifold::{BlochPoint, NORM_TOLERANCE};
use crate::rng::{real_normal, substream};

/// Entries in a packing file may deviate this much from unit norm before
/// being rejected.
pub const FILE_NORM_TOLERANCE: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PackingSource {
    Exact,
    Optimized,
    File,
}

/// Distinct unit vectors with their cached minimum pairwise distance.
#[derive(Clone, Debug, PartialEq)]
pub struct PackingSet {
    points: Vec<BlochPoint>,
    source: PackingSource,
    min_distance: f64,
}

impl PackingSet {
    pub fn new(points: Vec<BlochPoint>, source: PackingSource) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::invalid("a packing needs at least two points"));
        }
        for (i, p) in points.iter().enumerate() {
            let n = p.dist_sqr(&BlochPoint { x: 0.0, y: 0.0, z: 0.0 }).sqrt();
            if (n - 1.0).abs() > NORM_TOLERANCE {
                return Err(Error::invalid(format!("point {i} has norm {n}")));
            }
        }
        let (min_distance, (i, j)) = min_pair(&points);
        if min_distance == 0.0 {
            return Err(Error::invalid(format!("points {i} and {j} coincide")));
        }
        Ok(Self {
            points,
            source,
            min_distance,
        })
    }

    pub fn points(&self) -> &[BlochPoint] {
        &self.points
    }

    pub fn source(&self) -> PackingSource {
        self.source
    }

    pub fn min_distance(&self) -> f64 {
        self.min_distance
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

fn min_pair(points: &[BlochPoint]) -> (f64, (usize, usize)) {
    let mut best = (f64::INFINITY, (0, 0));
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            let d = points[i].dist_sqr(&points[j]);
            if d < best.0 {
                best = (d, (i, j));
            }
        }
    }
    (best.0.sqrt(), best.1)
}

/// Closed-form optimal configurations for `C ∈ {2, 3, 4, 6, 8, 12}`.
pub fn exact_packing(count: usize) -> Result<PackingSet> {
    let pts: Vec<[f64; 3]> = match count {
        2 => vec![[0.0, 0.0, 1.0], [0.0, 0.0, -1.0]],
        3 => (0..3)
            .map(|k| {
                let a = 2.0 * PI * k as f64 / 3.0;
                [a.cos(), a.sin(), 0.0]
            })
            .collect(),
        4 => {
            let s = 1.0 / 3f64.sqrt();
            vec![[s, s, s], [s, -s, -s], [-s, s, -s], [-s, -s, s]]
        }
        6 => vec![
            [0.0, 0.0, 1.0],
            [1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [-1.0, 0.0, 0.0],
            [0.0, -1.0, 0.0],
            [0.0, 0.0, -1.0],
        ],
        8 => {
            // Square antiprism: two squares rotated by π/4 at polar angles
            // θ₁ and π − θ₁ with tan θ₁ = √(2√2).
            let t1 = (2.0 * 2f64.sqrt()).sqrt().atan();
            let mut v = Vec::with_capacity(8);
            for (layer, theta) in [t1, PI - t1].into_iter().enumerate() {
                for k in 0..4 {
                    let phi = PI / 2.0 * k as f64 + PI / 4.0 * layer as f64;
                    v.push([theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()]);
                }
            }
            v
        }
        12 => {
            let g = (1.0 + 5f64.sqrt()) / 2.0;
            let mut v = Vec::with_capacity(12);
            for &a in &[1.0, -1.0] {
                for &b in &[g, -g] {
                    v.push([0.0, a, b]);
                    v.push([a, b, 0.0]);
                    v.push([b, 0.0, a]);
                }
            }
            v
        }
        _ => {
            return Err(Error::UnsupportedCount {
                count,
                hint: "closed forms exist for 2, 3, 4, 6, 8 and 12 points; use optimize_packing or load_packing",
            })
        }
    };
    let points = pts
        .into_iter()
        .map(|[x, y, z]| BlochPoint::normalized(x, y, z))
        .collect();
    PackingSet::new(points, PackingSource::Exact)
}

/// Settings for [`optimize_packing`]. Temperatures and step sizes are
/// expressed relative to the hexagonal-lattice spacing estimate
/// `sqrt(8π / (√3 C))`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PackingOptimizerConfig {
    /// Independent seeded starts; the best result is kept.
    pub restarts: usize,
    /// Gaussian jitter applied to the Fibonacci start.
    pub init_noise: f64,
    pub temp_start: f64,
    pub temp_end: f64,
    /// Multiplicative temperature decrease per stage.
    pub temp_decay: f64,
    pub iters_per_temp: usize,
    /// Iteration cap for the direct maximin polish.
    pub polish_iters: usize,
    /// Known best minimum distance, if any; sets `target_met` in the report.
    pub target: Option<f64>,
    /// Relative shortfall from `target` still counted as met.
    pub target_tolerance: f64,
}

impl Default for PackingOptimizerConfig {
    fn default() -> Self {
        Self {
            restarts: 2,
            init_noise: 0.1,
            temp_start: 0.1,
            temp_end: 1e-5,
            temp_decay: 0.7,
            iters_per_temp: 40,
            polish_iters: 4000,
            target: None,
            target_tolerance: 1e-3,
        }
    }
}

impl PackingOptimizerConfig {
    fn validate(&self) -> Result<()> {
        let ok = self.restarts >= 1
            && self.temp_start > 0.0
            && self.temp_end > 0.0
            && self.temp_end <= self.temp_start
            && self.temp_decay > 0.0
            && self.temp_decay < 1.0
            && self.init_noise >= 0.0
            && self.target_tolerance >= 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!("packing optimizer settings {self:?}")))
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PackingReport {
    pub min_distance: f64,
    /// Restart that produced the kept configuration.
    pub best_restart: usize,
    /// Whether the polish stopped on its step-size floor rather than the
    /// iteration cap.
    pub converged: bool,
    pub target_met: Option<bool>,
}

/// Seeded two-phase maximin optimization of `count` points on the sphere.
///
/// Phase one ascends the soft minimum `-T log Σ exp(-d_ij / T)` of the
/// pairwise distances while `T` decreases geometrically; phase two pushes
/// the points of the currently closest pairs directly apart. Identical
/// `(count, seed, config)` give bit-identical output.
pub fn optimize_packing(
    count: usize,
    seed: u64,
    config: &PackingOptimizerConfig,
) -> Result<PackingSet> {
    optimize_packing_with_report(count, seed, config).map(|(p, _)| p)
}

pub fn optimize_packing_with_report(
    count: usize,
    seed: u64,
    config: &PackingOptimizerConfig,
) -> Result<(PackingSet, PackingReport)> {
    if count < 2 {
        return Err(Error::invalid(format!("cannot pack {count} points")));
    }
    config.validate()?;
    let mut best: Option<(Vec<[f64; 3]>, f64, usize, bool)> = None;
    for restart in 0..config.restarts {
        let mut rng = substream(seed, restart as u64);
        let mut pts = fibonacci_start(count, config.init_noise, &mut rng);
        let mut opt = Optimizer::new(count);
        opt.anneal(&mut pts, config);
        let converged = opt.polish(&mut pts, config.polish_iters);
        let d = exact_min_distance(&pts);
        if best.as_ref().is_none_or(|b| d > b.1) {
            best = Some((pts, d, restart, converged));
        }
    }
    let (pts, _, best_restart, converged) = best.expect("at least one restart");
    let points = pts
        .into_iter()
        .map(|[x, y, z]| BlochPoint::normalized(x, y, z))
        .collect();
    let set = PackingSet::new(points, PackingSource::Optimized)?;
    let target_met = config
        .target
        .map(|t| set.min_distance >= t * (1.0 - config.target_tolerance));
    let report = PackingReport {
        min_distance: set.min_distance,
        best_restart,
        converged,
        target_met,
    };
    Ok((set, report))
}

fn spacing_estimate(count: usize) -> f64 {
    (8.0 * PI / (3f64.sqrt() * count as f64)).sqrt().min(2.0)
}

fn fibonacci_start<R: Rng>(count: usize, noise: f64, rng: &mut R) -> Vec<[f64; 3]> {
    let golden = PI * (3.0 - 5f64.sqrt());
    let sigma = noise * spacing_estimate(count);
    (0..count)
        .map(|i| {
            let z = 1.0 - (2.0 * i as f64 + 1.0) / count as f64;
            let r = (1.0 - z * z).sqrt();
            let a = golden * i as f64;
            let p = [
                r * a.cos() + sigma * real_normal(rng),
                r * a.sin() + sigma * real_normal(rng),
                z + sigma * real_normal(rng),
            ];
            normalize3(p)
        })
        .collect()
}

fn normalize3(p: [f64; 3]) -> [f64; 3] {
    let n = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
    [p[0] / n, p[1] / n, p[2] / n]
}

fn dist(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    let d = [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
    (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt()
}

fn exact_min_distance(pts: &[[f64; 3]]) -> f64 {
    let mut m = f64::INFINITY;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            m = m.min(dist(&pts[i], &pts[j]));
        }
    }
    m
}

/// Verlet pair list: all pairs closer than `radius` at the time of the last
/// rebuild. Valid while no point has moved more than `skin / 2`.
struct PairList {
    pairs: Vec<(u32, u32)>,
    anchor: Vec<[f64; 3]>,
    radius: f64,
    skin: f64,
}

impl PairList {
    fn empty() -> Self {
        Self {
            pairs: Vec::new(),
            anchor: Vec::new(),
            radius: -1.0,
            skin: 0.0,
        }
    }

    /// Rebuilds if needed so that every pair within `cutoff` is listed.
    fn ensure(&mut self, pts: &[[f64; 3]], cutoff: f64) {
        if self.radius - self.skin >= cutoff && self.max_drift(pts) < self.skin / 2.0 {
            return;
        }
        let skin = (0.5 * cutoff).max(1e-3);
        let radius = cutoff + skin;
        // Sweep over points ordered by z; only pairs within the z-band can
        // be closer than `radius`.
        let mut order: Vec<u32> = (0..pts.len() as u32).collect();
        order.sort_by(|&a, &b| pts[a as usize][2].total_cmp(&pts[b as usize][2]));
        let mut pairs = Vec::new();
        for (k, &a) in order.iter().enumerate() {
            let pa = &pts[a as usize];
            for &b in &order[k + 1..] {
                let pb = &pts[b as usize];
                if pb[2] - pa[2] > radius {
                    break;
                }
                if dist(pa, pb) < radius {
                    pairs.push((a.min(b), a.max(b)));
                }
            }
        }
        pairs.sort_unstable();
        *self = Self {
            pairs,
            anchor: pts.to_vec(),
            radius,
            skin,
        };
    }

    fn max_drift(&self, pts: &[[f64; 3]]) -> f64 {
        self.anchor
            .iter()
            .zip(pts)
            .map(|(a, p)| dist(a, p))
            .fold(0.0, f64::max)
    }
}

struct Optimizer {
    list: PairList,
    grad: Vec<[f64; 3]>,
    trial: Vec<[f64; 3]>,
    spacing: f64,
}

/// Weights below `exp(-SOFTMIN_CUTOFF)` are dropped from the soft minimum.
const SOFTMIN_CUTOFF: f64 = 24.0;

impl Optimizer {
    fn new(count: usize) -> Self {
        Self {
            list: PairList::empty(),
            grad: vec![[0.0; 3]; count],
            trial: vec![[0.0; 3]; count],
            spacing: spacing_estimate(count),
        }
    }

    fn list_min(&self, pts: &[[f64; 3]]) -> f64 {
        self.list
            .pairs
            .iter()
            .map(|&(i, j)| dist(&pts[i as usize], &pts[j as usize]))
            .fold(f64::INFINITY, f64::min)
    }

    /// Soft minimum at temperature `t`, relative to the listed pairs.
    fn softmin(&self, pts: &[[f64; 3]], t: f64) -> f64 {
        let dmin = self.list_min(pts);
        let z: f64 = self
            .list
            .pairs
            .iter()
            .map(|&(i, j)| {
                let e = (dist(&pts[i as usize], &pts[j as usize]) - dmin) / t;
                if e < SOFTMIN_CUTOFF {
                    (-e).exp()
                } else {
                    0.0
                }
            })
            .sum();
        dmin - t * z.ln()
    }

    /// Fills `self.grad` with the tangential gradient of the soft minimum and
    /// returns `(value, max gradient norm)`.
    fn softmin_grad(&mut self, pts: &[[f64; 3]], t: f64) -> (f64, f64) {
        let dmin = self.list_min(pts);
        self.grad.iter_mut().for_each(|g| *g = [0.0; 3]);
        let mut z = 0.0;
        for &(i, j) in &self.list.pairs {
            let (pi, pj) = (&pts[i as usize], &pts[j as usize]);
            let d = dist(pi, pj);
            let e = (d - dmin) / t;
            if e >= SOFTMIN_CUTOFF {
                continue;
            }
            let w = (-e).exp();
            z += w;
            let s = w / d;
            for k in 0..3 {
                let u = s * (pi[k] - pj[k]);
                self.grad[i as usize][k] += u;
                self.grad[j as usize][k] -= u;
            }
        }
        let mut gmax = 0.0f64;
        for (g, p) in self.grad.iter_mut().zip(pts) {
            let radial = g[0] * p[0] + g[1] * p[1] + g[2] * p[2];
            for k in 0..3 {
                g[k] = (g[k] - radial * p[k]) / z;
            }
            gmax = gmax.max((g[0] * g[0] + g[1] * g[1] + g[2] * g[2]).sqrt());
        }
        (dmin - t * z.ln(), gmax)
    }

    fn step_trial(&mut self, pts: &[[f64; 3]], scale: f64) {
        for ((q, p), g) in self.trial.iter_mut().zip(pts).zip(&self.grad) {
            *q = normalize3([p[0] + scale * g[0], p[1] + scale * g[1], p[2] + scale * g[2]]);
        }
    }

    fn anneal(&mut self, pts: &mut Vec<[f64; 3]>, cfg: &PackingOptimizerConfig) {
        let h = self.spacing;
        let mut t = cfg.temp_start * h;
        let t_end = cfg.temp_end * h;
        let mut step = 0.1 * h;
        while t >= t_end {
            for _ in 0..cfg.iters_per_temp {
                let dmin_hint = self.current_min(pts);
                self.list.ensure(pts, dmin_hint + SOFTMIN_CUTOFF * t);
                let (f0, gmax) = self.softmin_grad(pts, t);
                if gmax == 0.0 {
                    break;
                }
                let mut accepted = false;
                while step > 1e-14 * h {
                    self.step_trial(pts, step / gmax);
                    // The trial moved each point by at most `step`; make sure the
                    // list still covers it before evaluating.
                    self.list.ensure(&self.trial, dmin_hint + SOFTMIN_CUTOFF * t);
                    if self.softmin(&self.trial, t) > f0 {
                        std::mem::swap(pts, &mut self.trial);
                        step = (step * 1.25).min(0.5 * h);
                        accepted = true;
                        break;
                    }
                    step *= 0.5;
                }
                if !accepted {
                    step = t.min(0.1 * h);
                    break;
                }
            }
            t *= cfg.temp_decay;
        }
    }

    fn current_min(&mut self, pts: &[[f64; 3]]) -> f64 {
        if self.list.pairs.is_empty() {
            self.list.ensure(pts, 2.0 * self.spacing);
        }
        self.list_min(pts)
    }

    /// Direct maximin ascent. Returns true when the step size collapsed
    /// (a local maximin point within floating-point resolution).
    fn polish(&mut self, pts: &mut Vec<[f64; 3]>, max_iters: usize) -> bool {
        let h = self.spacing;
        let mut alpha = 1e-3 * h;
        let floor = 1e-15;
        let mut dmin = {
            self.list.ensure(pts, 1.5 * h);
            self.list_min(pts)
        };
        for _ in 0..max_iters {
            if alpha < floor {
                return true;
            }
            let band = dmin + 4.0 * alpha;
            self.list.ensure(pts, band + alpha);
            self.grad.iter_mut().for_each(|g| *g = [0.0; 3]);
            for &(i, j) in &self.list.pairs {
                let (pi, pj) = (&pts[i as usize], &pts[j as usize]);
                let d = dist(pi, pj);
                if d > band {
                    continue;
                }
                for k in 0..3 {
                    let u = (pi[k] - pj[k]) / d;
                    self.grad[i as usize][k] += u;
                    self.grad[j as usize][k] -= u;
                }
            }
            let mut gmax = 0.0f64;
            for (g, p) in self.grad.iter_mut().zip(pts.iter()) {
                let radial = g[0] * p[0] + g[1] * p[1] + g[2] * p[2];
                for k in 0..3 {
                    g[k] -= radial * p[k];
                }
                gmax = gmax.max((g[0] * g[0] + g[1] * g[1] + g[2] * g[2]).sqrt());
            }
            if gmax == 0.0 {
                return true;
            }
            self.step_trial(pts, alpha / gmax);
            self.list.ensure(&self.trial, band + alpha);
            let d_new = self.list_min(&self.trial);
            if d_new > dmin {
                std::mem::swap(pts, &mut self.trial);
                dmin = d_new;
                alpha = (alpha * 1.5).min(0.05 * h);
            } else {
                alpha *= 0.5;
            }
        }
        false
    }
}

/// Reads a packing table: one `x y z` triple per line, `#` comments, and an
/// optional leading line holding only the point count. A comment of the
/// form `# format: packing <major>.<minor>` pins the format version.
pub fn load_packing(path: impl AsRef<Path>) -> Result<PackingSet> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        context: format!("reading packing file {}", path.display()),
        source,
    })?;
    parse_packing(&text)
}

pub const PACKING_FORMAT_MAJOR: u32 = 1;

pub fn parse_packing(text: &str) -> Result<PackingSet> {
    let mut header: Option<(usize, usize)> = None;
    let mut points: Vec<(usize, BlochPoint)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let (body, comment) = match raw.find('#') {
            Some(k) => (&raw[..k], Some(&raw[k + 1..])),
            None => (raw, None),
        };
        if let Some(c) = comment {
            check_format_comment(c.trim(), line_no)?;
        }
        let fields: Vec<&str> = body.split_whitespace().collect();
        match fields.len() {
            0 => {}
            1 if header.is_none() && points.is_empty() => {
                let n = fields[0]
                    .parse::<usize>()
                    .map_err(|_| Error::format(line_no, format!("bad point count '{}'", fields[0])))?;
                header = Some((n, line_no));
            }
            3 => {
                let mut v = [0.0; 3];
                for (slot, f) in v.iter_mut().zip(&fields) {
                    *slot = parse_coord(f, line_no)?;
                }
                let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
                if !n.is_finite() || (n - 1.0).abs() > FILE_NORM_TOLERANCE {
                    return Err(Error::format(
                        line_no,
                        format!("point norm {n} deviates from 1 by more than {FILE_NORM_TOLERANCE}"),
                    ));
                }
                points.push((line_no, BlochPoint::normalized(v[0], v[1], v[2])));
            }
            k => {
                return Err(Error::format(line_no, format!("expected 3 coordinates, found {k} fields")));
            }
        }
    }
    if let Some((n, line)) = header {
        if n != points.len() {
            return Err(Error::format(
                line,
                format!("header declares {n} points but the file holds {}", points.len()),
            ));
        }
    }
    if points.len() < 2 {
        return Err(Error::format(
            text.lines().count().max(1),
            "a packing needs at least two points",
        ));
    }
    let pts: Vec<BlochPoint> = points.iter().map(|(_, p)| *p).collect();
    let (d, (i, j)) = min_pair(&pts);
    if d == 0.0 {
        return Err(Error::format(
            points[j].0,
            format!("duplicate of the point on line {}", points[i].0),
        ));
    }
    PackingSet::new(pts, PackingSource::File)
}

fn parse_coord(s: &str, line: usize) -> Result<f64> {
    // Tables sometimes use the Unicode minus sign.
    let normalized = s.replace('\u{2212}', "-");
    normalized
        .parse::<f64>()
        .map_err(|_| Error::format(line, format!("bad coordinate '{s}'")))
}

fn check_format_comment(comment: &str, line: usize) -> Result<()> {
    let Some(rest) = comment.strip_prefix("format:") else {
        return Ok(());
    };
    let mut it = rest.split_whitespace();
    if it.next() != Some("packing") {
        return Err(Error::format(line, format!("not a packing file: '{comment}'")));
    }
    let version = it.next().unwrap_or("1.0");
    let major: u32 = version
        .split('.')
        .next()
        .and_then(|m| m.parse().ok())
        .ok_or_else(|| Error::format(line, format!("bad version '{version}'")))?;
    if major > PACKING_FORMAT_MAJOR {
        return Err(Error::format(
            line,
            format!("packing format version {version} is newer than supported {PACKING_FORMAT_MAJOR}.x"),
        ));
    }
    Ok(())
}

/// Writes points in the packing table format.
pub fn format_packing(set: &PackingSet) -> String {
    let mut s = format!("# format: packing {PACKING_FORMAT_MAJOR}.0\n{}\n", set.len());
    for p in set.points() {
        s.push_str(&format!("{:.17e} {:.17e} {:.17e}\n", p.x, p.y, p.z));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::fejes_toth_bound;

    #[test]
    fn exact_values() {
        assert_eq!(exact_packing(2).unwrap().min_distance(), 2.0);
        assert!((exact_packing(4).unwrap().min_distance() - 1.6329932).abs() < 1e-7);
        assert!((exact_packing(8).unwrap().min_distance() - 2.0 * ((4.0 - 2f64.sqrt()) / 7.0).sqrt()).abs() < 1e-12);
        for c in [3, 4, 6, 12] {
            let d = exact_packing(c).unwrap().min_distance();
            assert!((d - 2.0 * fejes_toth_bound(c).unwrap()).abs() < 1e-9, "C={c}");
        }
        assert!(exact_packing(8).unwrap().min_distance() < 2.0 * fejes_toth_bound(8).unwrap());
    }

    #[test]
    fn exact_rejects_other_counts() {
        for c in [0, 1, 5, 7, 16] {
            assert!(matches!(exact_packing(c), Err(Error::UnsupportedCount { .. })));
        }
    }

    #[test]
    fn parse_simple_and_errors() {
        let p = parse_packing("0 0 1\n0 0 -1\n").unwrap();
        assert_eq!(p.len(), 2);
        assert_eq!(p.min_distance(), 2.0);
        assert_eq!(p.source(), PackingSource::File);

        let e = parse_packing("0 0 1\n# dup\n0 0 1\n").unwrap_err();
        assert!(matches!(e, Error::Format { line: 3, .. }), "{e}");

        let e = parse_packing("3\n0 0 1\n0 0 -1\n").unwrap_err();
        assert!(matches!(e, Error::Format { line: 1, .. }), "{e}");

        let e = parse_packing("0 0 1\n0 0 -1.01\n").unwrap_err();
        assert!(matches!(e, Error::Format { line: 2, .. }), "{e}");

        let e = parse_packing("0 0 1\n0 x -1\n").unwrap_err();
        assert!(matches!(e, Error::Format { line: 2, .. }), "{e}");

        let e = parse_packing("# format: packing 2.0\n0 0 1\n0 0 -1\n").unwrap_err();
        assert!(matches!(e, Error::Format { line: 1, .. }), "{e}");
    }

    #[test]
    fn parse_renormalizes_small_deviation() {
        let p = parse_packing("2\n0 0 1.0000005\n0 0 \u{2212}1\n").unwrap();
        assert_eq!(p.points()[0].z, 1.0);
        assert_eq!(p.points()[1].z, -1.0);
    }

    #[test]
    fn format_round_trip() {
        let e = exact_packing(12).unwrap();
        let back = parse_packing(&format_packing(&e)).unwrap();
        assert_eq!(back.points(), e.points());
    }

    #[test]
    fn optimizer_rediscovers_tetrahedron() {
        let p = optimize_packing(4, 3, &PackingOptimizerConfig::default()).unwrap();
        assert!(p.min_distance() >= 1.63299 - 1e-6, "{}", p.min_distance());
    }

    #[test]
    fn optimizer_is_reproducible() {
        let cfg = PackingOptimizerConfig::default();
        let a = optimize_packing(20, 9, &cfg).unwrap();
        let b = optimize_packing(20, 9, &cfg).unwrap();
        assert_eq!(a, b);
    }
}
