//! Poisson sprinklings of causal diamonds in d-dimensional Minkowski space
//! and the induced causal order.
//!
//! Coordinates are (t, x_1, .., x_(d-1)) with signature (-,+,..,+). The
//! diamond has its tips at t = ±τ/2 on the spatial origin.

use std::io::{Read, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coefficients::volume_constant;
use crate::error::{Error, Result};

/// Below this fraction of accepted box samples, sampling refuses to run.
pub const DEFAULT_MIN_ACCEPTANCE: f64 = 1e-3;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiamondSpec {
    pub dim: u32,
    pub tau: f64,
    pub rho: f64,
    pub include_top: bool,
    pub min_acceptance: f64,
}

impl DiamondSpec {
    pub fn new(dim: u32, tau: f64, rho: f64) -> Result<Self> {
        let spec = DiamondSpec { dim, tau, rho, include_top: true, min_acceptance: DEFAULT_MIN_ACCEPTANCE };
        spec.validate()?;
        Ok(spec)
    }

    /// Density chosen so that ρV equals `count`.
    pub fn with_expected_count(dim: u32, tau: f64, count: f64) -> Result<Self> {
        let v = diamond_volume(dim, tau)?;
        if count.is_nan() || count <= 0.0 {
            return Err(Error::Invalid(format!("expected count must be positive, got {count}")));
        }
        DiamondSpec::new(dim, tau, count / v)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return Err(Error::Invalid(format!("tau must be positive, got {}", self.tau)));
        }
        if !(self.rho > 0.0 && self.rho.is_finite()) {
            return Err(Error::Invalid(format!("rho must be positive, got {}", self.rho)));
        }
        diamond_volume(self.dim, self.tau).map(|_| ())
    }

    pub fn volume(&self) -> f64 {
        diamond_volume(self.dim, self.tau).unwrap_or(f64::NAN)
    }

    /// Discreteness scale l = ρ^(-1/d).
    pub fn discreteness(&self) -> f64 {
        self.rho.powf(-1.0 / self.dim as f64)
    }

    pub fn expected_count(&self) -> f64 {
        self.rho * self.volume()
    }

    /// Fraction of the bounding box [-τ/2, τ/2]^d inside the diamond.
    pub fn acceptance(&self) -> f64 {
        self.volume() / self.tau.powi(self.dim as i32)
    }
}

/// c_d (τ²/2)^(d/2).
pub fn diamond_volume(d: u32, tau: f64) -> Result<f64> {
    let c = volume_constant(d)?.to_f64();
    Ok(c * (tau * tau / 2.0).powf(d as f64 / 2.0))
}

pub fn poisson_count<R: Rng + ?Sized>(lambda: f64, rng: &mut R) -> Result<u64> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::Invalid(format!("Poisson mean must be positive and finite, got {lambda}")));
    }
    let p = Poisson::new(lambda).map_err(|e| Error::Invalid(e.to_string()))?;
    Ok(p.sample(rng) as u64)
}

/// Generator for run `run` under `seed`: one ChaCha stream per run.
pub fn run_rng(seed: u64, run: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(run);
    rng
}

/// t_y - t_x > |x_y - x_x|.
pub fn causally_precedes(x: &[f64], y: &[f64]) -> bool {
    debug_assert_eq!(x.len(), y.len());
    let dt = y[0] - x[0];
    if dt <= 0.0 {
        return false;
    }
    let r2: f64 = x[1..].iter().zip(&y[1..]).map(|(a, b)| (b - a) * (b - a)).sum();
    dt * dt > r2
}

#[derive(Clone, Debug, PartialEq)]
pub struct Sprinkle {
    pub dim: u32,
    pub tau: f64,
    pub rho: f64,
    pub seed: u64,
    /// Row-major, `dim` coordinates per event, sorted by t.
    coords: Vec<f64>,
    pub top_index: Option<usize>,
}

impl Sprinkle {
    /// Builds a sprinkle from arbitrary-order points. `top` indexes into
    /// `points` and follows its point through the sort.
    pub fn from_points(
        dim: u32,
        tau: f64,
        rho: f64,
        seed: u64,
        points: &[Vec<f64>],
        top: Option<usize>,
    ) -> Result<Self> {
        let d = dim as usize;
        if dim < 2 {
            return Err(Error::Dimension(dim as i64));
        }
        if let Some(p) = points.iter().find(|p| p.len() != d || p.iter().any(|x| !x.is_finite())) {
            return Err(Error::Format(format!("point {p:?} is not a finite {d}-vector")));
        }
        if top.is_some_and(|t| t >= points.len()) {
            return Err(Error::Format("top index out of range".into()));
        }
        let mut order: Vec<usize> = (0..points.len()).collect();
        order.sort_by(|&a, &b| points[a][0].total_cmp(&points[b][0]).then(a.cmp(&b)));
        let top_index = top.map(|t| order.iter().position(|&i| i == t).unwrap());
        let coords = order.iter().flat_map(|&i| points[i].iter().copied()).collect();
        Ok(Sprinkle { dim, tau, rho, seed, coords, top_index })
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim as usize
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        let d = self.dim as usize;
        &self.coords[i * d..(i + 1) * d]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.dim as usize)
    }

    /// Strictly between the tips of the diamond it claims to come from.
    pub fn inside(&self, p: &[f64]) -> bool {
        let h = self.tau / 2.0;
        let mut past = vec![0.0; p.len()];
        past[0] = -h;
        let mut fut = vec![0.0; p.len()];
        fut[0] = h;
        causally_precedes(&past, p) && causally_precedes(p, &fut)
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        let f = std::fs::File::create(path)?;
        serde_json::to_writer(std::io::BufWriter::new(f), &SprinkleFile::from(self))?;
        Ok(())
    }

    pub fn read_json(path: &Path) -> Result<Self> {
        let f = std::fs::File::open(path)?;
        let raw: SprinkleFile = serde_json::from_reader(std::io::BufReader::new(f))?;
        raw.try_into()
    }

    /// Little-endian: "CSET1", u32 dim, f64 tau, f64 rho, u64 seed, u64 count,
    /// i64 top index (-1 for none), then count·dim f64 coordinates.
    pub fn write_bin(&self, path: &Path) -> Result<()> {
        let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
        w.write_all(BIN_MAGIC)?;
        w.write_all(&self.dim.to_le_bytes())?;
        w.write_all(&self.tau.to_le_bytes())?;
        w.write_all(&self.rho.to_le_bytes())?;
        w.write_all(&self.seed.to_le_bytes())?;
        w.write_all(&(self.len() as u64).to_le_bytes())?;
        w.write_all(&self.top_index.map_or(-1i64, |t| t as i64).to_le_bytes())?;
        for x in &self.coords {
            w.write_all(&x.to_le_bytes())?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_bin(path: &Path) -> Result<Self> {
        let mut buf = Vec::new();
        std::fs::File::open(path)?.read_to_end(&mut buf)?;
        let mut r = ByteReader { buf: &buf, pos: 0 };
        if r.take(5)? != BIN_MAGIC {
            return Err(Error::Format("missing CSET1 header".into()));
        }
        let dim = u32::from_le_bytes(r.array()?);
        let tau = f64::from_le_bytes(r.array()?);
        let rho = f64::from_le_bytes(r.array()?);
        let seed = u64::from_le_bytes(r.array()?);
        let n = u64::from_le_bytes(r.array()?) as usize;
        let top = i64::from_le_bytes(r.array()?);
        let d = dim as usize;
        let need = n.checked_mul(d).and_then(|k| k.checked_mul(8)).ok_or_else(|| Error::Format("size overflow".into()))?;
        if buf.len() - r.pos != need {
            return Err(Error::Format(format!("expected {need} coordinate bytes, found {}", buf.len() - r.pos)));
        }
        let coords: Vec<f64> = (0..n * d).map(|_| f64::from_le_bytes(r.array().unwrap())).collect();
        let points: Vec<Vec<f64>> = coords.chunks_exact(d.max(1)).map(|c| c.to_vec()).collect();
        let top = if top < 0 { None } else { Some(top as usize) };
        Sprinkle::from_points(dim, tau, rho, seed, &points, top)
    }

    /// Reads either format, by magic bytes.
    pub fn read(path: &Path) -> Result<Self> {
        let mut head = [0u8; 5];
        let n = std::fs::File::open(path)?.read(&mut head)?;
        if n == 5 && &head == BIN_MAGIC {
            Sprinkle::read_bin(path)
        } else {
            Sprinkle::read_json(path)
        }
    }
}

const BIN_MAGIC: &[u8; 5] = b"CSET1";

struct ByteReader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl ByteReader<'_> {
    fn take(&mut self, n: usize) -> Result<&[u8]> {
        let s = self.buf.get(self.pos..self.pos + n).ok_or_else(|| Error::Format("truncated file".into()))?;
        self.pos += n;
        Ok(s)
    }

    fn array<const N: usize>(&mut self) -> Result<[u8; N]> {
        Ok(self.take(N)?.try_into().unwrap())
    }
}

#[derive(Serialize, Deserialize)]
struct SprinkleFile {
    dim: u32,
    tau: f64,
    rho: f64,
    seed: u64,
    points: Vec<Vec<f64>>,
    top_index: Option<usize>,
}

impl From<&Sprinkle> for SprinkleFile {
    fn from(s: &Sprinkle) -> Self {
        SprinkleFile {
            dim: s.dim,
            tau: s.tau,
            rho: s.rho,
            seed: s.seed,
            points: s.points().map(|p| p.to_vec()).collect(),
            top_index: s.top_index,
        }
    }
}

impl TryFrom<SprinkleFile> for Sprinkle {
    type Error = Error;

    fn try_from(f: SprinkleFile) -> Result<Self> {
        Sprinkle::from_points(f.dim, f.tau, f.rho, f.seed, &f.points, f.top_index)
    }
}

/// N ~ Poisson(ρV) uniform points in the diamond by rejection from its
/// bounding box, plus the future tip when requested. `seed` is only recorded.
pub fn sample_diamond<R: Rng + ?Sized>(spec: &DiamondSpec, seed: u64, rng: &mut R) -> Result<Sprinkle> {
    spec.validate()?;
    let acc = spec.acceptance();
    if acc < spec.min_acceptance {
        return Err(Error::Invalid(format!(
            "rejection acceptance {acc:.2e} in d={} is below the floor {:.2e}",
            spec.dim, spec.min_acceptance
        )));
    }
    let n = poisson_count(spec.expected_count(), rng)? as usize;
    let d = spec.dim as usize;
    let h = spec.tau / 2.0;
    let mut points = Vec::with_capacity(n + 1);
    let mut p = vec![0.0; d];
    while points.len() < n {
        for x in p.iter_mut() {
            *x = rng.gen_range(-h..h);
        }
        let r2: f64 = p[1..].iter().map(|x| x * x).sum();
        let gap = h - p[0].abs();
        if gap > 0.0 && gap * gap > r2 {
            points.push(p.clone());
        }
    }
    let top = spec.include_top.then(|| {
        let mut tip = vec![0.0; d];
        tip[0] = h;
        points.push(tip);
        points.len() - 1
    });
    Sprinkle::from_points(spec.dim, spec.tau, spec.rho, seed, &points, top)
}

/// Sprinkle for run `run` of master seed `seed`.
pub fn sprinkle(spec: &DiamondSpec, seed: u64, run: u64) -> Result<Sprinkle> {
    sample_diamond(spec, seed, &mut run_rng(seed, run))
}

/// Strict causal order on a t-sorted sprinkle as packed bit rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CausalMatrix {
    n: usize,
    words: usize,
    future: Vec<u64>,
    past: Vec<u64>,
}

impl CausalMatrix {
    pub fn new(s: &Sprinkle) -> Self {
        let n = s.len();
        let words = n.div_ceil(64);
        let mut future = vec![0u64; n * words];
        future.par_chunks_mut(words.max(1)).enumerate().for_each(|(i, row)| {
            if i >= n {
                return;
            }
            let x = s.point(i);
            for j in i + 1..n {
                if causally_precedes(x, s.point(j)) {
                    row[j / 64] |= 1 << (j % 64);
                }
            }
        });
        let mut past = vec![0u64; n * words];
        for i in 0..n {
            for j in bits(&future[i * words..(i + 1) * words]) {
                past[j * words + i / 64] |= 1 << (i % 64);
            }
        }
        CausalMatrix { n, words, future, past }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn future_row(&self, i: usize) -> &[u64] {
        &self.future[i * self.words..(i + 1) * self.words]
    }

    pub fn past_row(&self, j: usize) -> &[u64] {
        &self.past[j * self.words..(j + 1) * self.words]
    }

    /// i ≺ j
    pub fn precedes(&self, i: usize, j: usize) -> bool {
        self.future_row(i)[j / 64] >> (j % 64) & 1 == 1
    }

    pub fn future_of(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        bits(self.future_row(i))
    }

    pub fn past_of(&self, j: usize) -> impl Iterator<Item = usize> + '_ {
        bits(self.past_row(j))
    }

    pub fn relation_count(&self) -> usize {
        self.future.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Size of the open interval between i and j: |future(i) ∩ past(j)|.
    pub fn interval_cardinality(&self, i: usize, j: usize) -> Result<usize> {
        if i >= self.n || j >= self.n {
            return Err(Error::Invalid(format!("element index out of range ({i}, {j})")));
        }
        if !self.precedes(i, j) {
            return Err(Error::Invalid(format!("elements {i} and {j} are not related")));
        }
        Ok(self.between(i, j))
    }

    pub(crate) fn between(&self, i: usize, j: usize) -> usize {
        self.future_row(i)
            .iter()
            .zip(self.past_row(j))
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    /// Irreflexive, transitive, and past rows are the transpose.
    pub fn is_consistent(&self) -> bool {
        (0..self.n).all(|i| {
            let row = self.future_row(i);
            !self.precedes(i, i)
                && self.future_of(i).all(|j| {
                    self.past_row(j)[i / 64] >> (i % 64) & 1 == 1
                        && self.future_row(j).iter().zip(row).all(|(fj, fi)| fj & !fi == 0)
                })
                && (0..self.n).all(|j| self.precedes(i, j) == (self.past_row(j)[i / 64] >> (i % 64) & 1 == 1))
        })
    }
}

fn bits(row: &[u64]) -> impl Iterator<Item = usize> + '_ {
    row.iter().enumerate().flat_map(|(w, &word)| {
        let mut x = word;
        std::iter::from_fn(move || {
            if x == 0 {
                return None;
            }
            let b = x.trailing_zeros() as usize;
            x &= x - 1;
            Some(w * 64 + b)
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn chain(n: usize) -> Sprinkle {
        let pts: Vec<Vec<f64>> = (0..n).map(|i| vec![i as f64, 0.0]).collect();
        Sprinkle::from_points(2, n as f64, 1.0, 0, &pts, Some(n - 1)).unwrap()
    }

    #[test]
    fn volumes() {
        assert!((diamond_volume(2, 2.0).unwrap() - 2.0).abs() < 1e-15);
        let v = diamond_volume(4, 2f64.sqrt()).unwrap();
        assert!((v - std::f64::consts::PI / 6.0).abs() < 1e-15);
        assert_eq!(diamond_volume(2, 0.0).unwrap(), 0.0);
        assert!(DiamondSpec::new(2, 0.0, 1.0).is_err());
        assert!(DiamondSpec::new(1, 1.0, 1.0).is_err());
    }

    #[test]
    fn precedence_basics() {
        assert!(causally_precedes(&[0.0, 0.0], &[1.0, 0.0]));
        assert!(!causally_precedes(&[0.0, 0.0], &[1.0, 1.0]));
        assert!(!causally_precedes(&[1.0, 0.0], &[0.0, 0.0]));
    }

    #[test]
    fn poisson_tiny_and_moments() {
        let mut rng = run_rng(1, 0);
        assert_eq!(poisson_count(1e-9, &mut rng).unwrap(), 0);
        assert!(poisson_count(0.0, &mut rng).is_err());
        let xs: Vec<f64> = (0..100_000).map(|_| poisson_count(5.0, &mut rng).unwrap() as f64).collect();
        let m = xs.iter().sum::<f64>() / xs.len() as f64;
        let v = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64;
        assert!((m - 5.0).abs() < 0.05, "{m}");
        assert!((v - 5.0).abs() < 0.15, "{v}");
        let a: Vec<u64> = (0..20).map(|_| poisson_count(5.0, &mut run_rng(9, 3)).unwrap()).collect();
        assert!(a.windows(2).all(|w| w[0] == w[1]));
    }

    #[test]
    fn sprinkle_is_inside_sorted_and_deterministic() {
        let spec = DiamondSpec::new(3, 2.0, 50.0).unwrap();
        let s = sprinkle(&spec, 7, 0).unwrap();
        let top = s.top_index.unwrap();
        assert_eq!(top, s.len() - 1);
        assert!(s.points().enumerate().all(|(i, p)| i == top || s.inside(p)));
        assert!(s.points().collect::<Vec<_>>().windows(2).all(|w| w[0][0] <= w[1][0]));
        assert_eq!(s, sprinkle(&spec, 7, 0).unwrap());
        assert_ne!(s, sprinkle(&spec, 7, 1).unwrap());
    }

    #[test]
    fn refuses_hopeless_rejection() {
        let mut spec = DiamondSpec::new(8, 1.0, 1.0).unwrap();
        spec.min_acceptance = 0.01;
        assert!(sprinkle(&spec, 0, 0).is_err());
    }

    #[test]
    fn small_orders() {
        let m = CausalMatrix::new(&chain(2));
        assert_eq!(m.relation_count(), 1);
        assert_eq!(m.interval_cardinality(0, 1).unwrap(), 0);
        let m = CausalMatrix::new(&chain(3));
        assert_eq!(m.interval_cardinality(0, 2).unwrap(), 1);
        let anti = Sprinkle::from_points(2, 1.0, 1.0, 0, &[vec![0.0, 0.0], vec![0.0, 1.0]], None).unwrap();
        let m = CausalMatrix::new(&anti);
        assert_eq!(m.relation_count(), 0);
        assert!(m.interval_cardinality(0, 1).is_err());
    }

    #[test]
    fn matrix_matches_brute_force() {
        for run in 0..10 {
            let spec = DiamondSpec::with_expected_count(2 + run as u32 % 3, 1.0, 30.0).unwrap();
            let s = sprinkle(&spec, 11, run).unwrap();
            let m = CausalMatrix::new(&s);
            assert!(m.is_consistent());
            let n = s.len();
            for i in 0..n {
                for j in 0..n {
                    let rel = causally_precedes(s.point(i), s.point(j));
                    assert_eq!(m.precedes(i, j), rel);
                    if rel {
                        let c = (0..n)
                            .filter(|&k| causally_precedes(s.point(i), s.point(k)) && causally_precedes(s.point(k), s.point(j)))
                            .count();
                        assert_eq!(m.interval_cardinality(i, j).unwrap(), c);
                    }
                }
            }
        }
    }

    #[test]
    fn file_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let s = sprinkle(&DiamondSpec::new(4, 1.5, 20.0).unwrap(), 3, 2).unwrap();
        let j = dir.path().join("s.json");
        s.write_json(&j).unwrap();
        assert_eq!(Sprinkle::read(&j).unwrap(), s);
        let b = dir.path().join("s.bin");
        s.write_bin(&b).unwrap();
        assert_eq!(Sprinkle::read(&b).unwrap(), s);
        std::fs::write(&b, b"CSET1\x02").unwrap();
        assert!(Sprinkle::read_bin(&b).is_err());
    }
}
