//! Symmetric rooted metric trees.
//!
//! A tree is described by its vertex radii `0 = r_0 < r_1 < ...` and the
//! branching numbers `b_0 = 1, b_1, ...` of the vertices at those radii. Every
//! vertex at distance `r_l` from the root has `b_l` forward edges, all of which
//! reach the next generation at `r_{l+1}`. The branching function `g_0(r)`
//! counts the points at distance `r` from the root.

use alloc::format;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

/// Continuation of `g_0` beyond the represented radii.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Tail {
    /// `g_0` stays constant; `∫ ds / g_0` diverges.
    Constant,
    /// `g_0(r) ∝ (1 + r)^(dimension - 1)`.
    Polynomial { dimension: f64 },
    /// `g_0(r) ∝ base^r`.
    Exponential { base: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct TreeSpec {
    radii: Vec<f64>,
    branchings: Vec<u32>,
    /// Largest radius at which `g_0` is given by the vertex lists.
    extent: f64,
    tail: Tail,
    /// `g_0` on `(r_l, r_{l+1}]`, i.e. `b_0 ... b_l`.
    levels: Vec<f64>,
    /// `∫_0^{r_l} g_0`.
    mass_prefix: Vec<f64>,
    /// `∫_0^{r_l} 1/g_0`.
    inverse_prefix: Vec<f64>,
}

impl TreeSpec {
    /// Tree from explicit vertex radii and branching numbers. The last
    /// generation's edges are infinite and the tail is constant.
    pub fn explicit(radii: Vec<f64>, branchings: Vec<u32>) -> Result<Self> {
        Self::build(radii, branchings, f64::INFINITY, Tail::Constant)
    }

    /// The half-line `[0, ∞)`: a single root edge, `g_0 ≡ 1`.
    pub fn half_line() -> Self {
        Self::build(alloc::vec![0.0], alloc::vec![1], f64::INFINITY, Tail::Constant)
            .expect("half-line is a valid tree")
    }

    /// Homogeneous tree with branching `b` and constant edge length, represented
    /// up to (but excluding) generation `generations + 1`.
    pub fn homogeneous(b: u32, edge: f64, generations: usize) -> Result<Self> {
        if b < 2 {
            return Err(Error::InvalidTree(format!("homogeneous branching must be >= 2, got {b}")));
        }
        if !(edge > 0.0) || !edge.is_finite() {
            return Err(Error::InvalidTree(format!("edge length must be positive, got {edge}")));
        }
        if generations == 0 {
            return Err(Error::InvalidTree("at least one generation is required".into()));
        }
        let radii: Vec<f64> = (0..=generations).map(|l| l as f64 * edge).collect();
        let mut branchings = alloc::vec![b; generations + 1];
        branchings[0] = 1;
        let extent = (generations + 1) as f64 * edge;
        let base = (b as f64).powf(1.0 / edge);
        Self::build(radii, branchings, extent, Tail::Exponential { base })
    }

    /// Binary tree whose branching function grows like `(1 + r)^(d - 1)`.
    ///
    /// Vertex radii are `2^(l/(d-1)) - 1` rounded to the nearest multiple of
    /// `1/8`; a radius that would not exceed its predecessor is bumped to the
    /// predecessor plus `1/8`. Every radius is therefore a node of any uniform
    /// grid whose density is a multiple of 8.
    pub fn dyadic(dimension: f64, generations: usize) -> Result<Self> {
        if !(dimension > 1.0) || !dimension.is_finite() {
            return Err(Error::InvalidTree(format!("dyadic dimension must exceed 1, got {dimension}")));
        }
        if generations == 0 {
            return Err(Error::InvalidTree("at least one generation is required".into()));
        }
        let mut radii = Vec::with_capacity(generations + 2);
        radii.push(0.0);
        for l in 1..=generations + 1 {
            let raw = 2f64.powf(l as f64 / (dimension - 1.0)) - 1.0;
            let mut r = (raw * 8.0).round() / 8.0;
            let prev = radii[l - 1];
            if r <= prev {
                r = prev + 0.125;
            }
            radii.push(r);
        }
        let extent = radii.pop().expect("nonempty");
        let mut branchings = alloc::vec![2; generations + 1];
        branchings[0] = 1;
        Self::build(radii, branchings, extent, Tail::Polynomial { dimension })
    }

    /// Keeps generations `0..=max_generation`; the last kept generation's
    /// edges become infinite and the tail constant.
    pub fn truncated(&self, max_generation: usize) -> Result<Self> {
        if max_generation > self.horizon() {
            return Err(Error::GenerationOutOfRange {
                generation: max_generation,
                horizon: self.horizon(),
            });
        }
        Self::build(
            self.radii[..=max_generation].to_vec(),
            self.branchings[..=max_generation].to_vec(),
            f64::INFINITY,
            Tail::Constant,
        )
    }

    /// Replaces the declared tail model.
    pub fn with_tail(mut self, tail: Tail) -> Self {
        self.tail = tail;
        self
    }

    fn build(radii: Vec<f64>, branchings: Vec<u32>, extent: f64, tail: Tail) -> Result<Self> {
        if radii.is_empty() {
            return Err(Error::InvalidTree("no vertex radii".into()));
        }
        if radii.len() != branchings.len() {
            return Err(Error::InvalidTree(format!(
                "{} radii but {} branching numbers",
                radii.len(),
                branchings.len()
            )));
        }
        if radii[0] != 0.0 {
            return Err(Error::InvalidTree(format!("root radius must be 0, got {}", radii[0])));
        }
        if branchings[0] != 1 {
            return Err(Error::InvalidTree(format!("root branching must be 1, got {}", branchings[0])));
        }
        for w in radii.windows(2) {
            if !(w[1] > w[0]) || !w[1].is_finite() {
                return Err(Error::InvalidTree(format!(
                    "radii must be finite and strictly increasing ({} then {})",
                    w[0], w[1]
                )));
            }
        }
        if let Some(pos) = branchings.iter().skip(1).position(|&b| b < 2) {
            return Err(Error::InvalidTree(format!(
                "branching at generation {} is {}, must be >= 2",
                pos + 1,
                branchings[pos + 1]
            )));
        }
        let last = *radii.last().expect("nonempty");
        if !(extent > last) {
            return Err(Error::InvalidTree(format!("extent {extent} must exceed the last radius {last}")));
        }
        let mut levels = Vec::with_capacity(radii.len());
        let mut acc = 1.0;
        for &b in &branchings {
            acc *= b as f64;
            levels.push(acc);
        }
        let mut mass_prefix = alloc::vec![0.0];
        let mut inverse_prefix = alloc::vec![0.0];
        for l in 1..radii.len() {
            let len = radii[l] - radii[l - 1];
            mass_prefix.push(mass_prefix[l - 1] + levels[l - 1] * len);
            inverse_prefix.push(inverse_prefix[l - 1] + len / levels[l - 1]);
        }
        Ok(Self {
            radii,
            branchings,
            extent,
            tail,
            levels,
            mass_prefix,
            inverse_prefix,
        })
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn branchings(&self) -> &[u32] {
        &self.branchings
    }

    /// Deepest represented generation.
    pub fn horizon(&self) -> usize {
        self.radii.len() - 1
    }

    /// Largest radius covered by the vertex lists (may be infinite).
    pub fn extent(&self) -> f64 {
        self.extent
    }

    pub fn tail(&self) -> Tail {
        self.tail
    }

    pub fn radius(&self, l: usize) -> Result<f64> {
        self.radii.get(l).copied().ok_or(Error::GenerationOutOfRange {
            generation: l,
            horizon: self.horizon(),
        })
    }

    pub fn branching(&self, l: usize) -> Result<u32> {
        self.branchings.get(l).copied().ok_or(Error::GenerationOutOfRange {
            generation: l,
            horizon: self.horizon(),
        })
    }

    /// True when every vertex has the same branching and all edges share one length.
    pub fn is_homogeneous(&self) -> Option<u32> {
        if self.horizon() < 1 {
            return None;
        }
        let b = self.branchings[1];
        let edge = self.radii[1];
        let uniform = self.branchings[1..].iter().all(|&x| x == b)
            && self.radii.windows(2).all(|w| ((w[1] - w[0]) - edge).abs() <= 1e-12 * edge);
        (uniform && (edge - 1.0).abs() <= 1e-12).then_some(b)
    }

    fn check_radius(&self, r: f64) -> Result<()> {
        if !(r >= 0.0) {
            return Err(Error::Domain(format!("radius must be nonnegative, got {r}")));
        }
        if r > self.extent {
            return Err(Error::HorizonExceeded {
                radius: r,
                horizon: self.extent,
            });
        }
        Ok(())
    }

    /// Generation of the edge containing radius `r > 0` under the half-open
    /// convention `r_l < r <= r_{l+1}`; 0 for `r = 0`.
    pub fn generation_at(&self, r: f64) -> usize {
        if r <= 0.0 {
            return 0;
        }
        self.radii.partition_point(|&x| x < r) - 1
    }

    /// `g_0(r)` under the half-open convention with `g_0(0) = 1`.
    pub fn g0(&self, r: f64) -> Result<f64> {
        self.check_radius(r)?;
        Ok(self.levels[self.generation_at(r)])
    }

    /// Right limit `g_0(r+)`.
    pub fn g0_right(&self, r: f64) -> Result<f64> {
        self.check_radius(r)?;
        if r >= self.extent {
            return Ok(self.g0_extended(r));
        }
        Ok(self.levels[self.radii.partition_point(|&x| x <= r) - 1])
    }

    /// `g_0` continued beyond the extent by the tail model.
    pub fn g0_extended(&self, r: f64) -> f64 {
        if r <= self.extent {
            return self.levels[self.generation_at(r)];
        }
        let edge = *self.levels.last().expect("nonempty");
        match self.tail {
            Tail::Constant => edge,
            Tail::Polynomial { dimension } => {
                edge * ((1.0 + r) / (1.0 + self.extent)).powf(dimension - 1.0)
            }
            Tail::Exponential { base } => edge * base.powf(r - self.extent),
        }
    }

    /// Branching function `g_l(r)`.
    ///
    /// For `l = 0` this is [`TreeSpec::g0`]. For `l >= 1` it vanishes below
    /// `r_l`, equals 1 on `[r_l, r_{l+1})` and `b_{l+1} ... b_n` on `[r_n, r_{n+1})`.
    pub fn branching_function(&self, l: usize, r: f64) -> Result<f64> {
        if l > self.horizon() {
            return Err(Error::GenerationOutOfRange {
                generation: l,
                horizon: self.horizon(),
            });
        }
        if l == 0 {
            return self.g0(r);
        }
        self.check_radius(r)?;
        if r < self.radii[l] {
            return Ok(0.0);
        }
        let n = self.radii.partition_point(|&x| x <= r) - 1;
        Ok(self.levels[n] / self.levels[l])
    }

    /// Number of channels at generation `l`: 1 for `l = 0`, otherwise
    /// `b_0 ... b_{l-1} (b_l - 1)`.
    pub fn generation_multiplicity(&self, l: usize) -> Result<u64> {
        if l > self.horizon() {
            return Err(Error::GenerationOutOfRange {
                generation: l,
                horizon: self.horizon(),
            });
        }
        if l == 0 {
            return Ok(1);
        }
        let mut acc: u64 = 1;
        for &b in &self.branchings[..l] {
            acc = acc.checked_mul(b as u64).ok_or(Error::Overflow("generation multiplicity"))?;
        }
        acc.checked_mul(self.branchings[l] as u64 - 1)
            .ok_or(Error::Overflow("generation multiplicity"))
    }

    /// Number of edges of generation `l`, i.e. `b_0 ... b_l`.
    pub fn edges_in_generation(&self, l: usize) -> Result<u64> {
        if l > self.horizon() {
            return Err(Error::GenerationOutOfRange {
                generation: l,
                horizon: self.horizon(),
            });
        }
        let mut acc: u64 = 1;
        for &b in &self.branchings[..=l] {
            acc = acc.checked_mul(b as u64).ok_or(Error::Overflow("edge count"))?;
        }
        Ok(acc)
    }

    /// `∫_0^r g_0(s) ds`, exact on the represented range and continued by the
    /// tail model beyond it.
    pub fn cumulative_mass(&self, r: f64) -> f64 {
        if r <= 0.0 {
            return 0.0;
        }
        let capped = r.min(self.extent);
        let l = self.generation_at(capped);
        let mut m = self.mass_prefix[l] + self.levels[l] * (capped - self.radii[l]);
        if r > self.extent {
            m += self.tail_mass(r);
        }
        m
    }

    /// `∫_0^r ds / g_0(s)`, continued by the tail model; infinite `r` allowed.
    pub fn cumulative_inverse(&self, r: f64) -> f64 {
        if r <= 0.0 {
            return 0.0;
        }
        let capped = r.min(self.extent);
        if capped.is_infinite() {
            return f64::INFINITY;
        }
        let l = self.generation_at(capped);
        let mut m = self.inverse_prefix[l] + (capped - self.radii[l]) / self.levels[l];
        if r > self.extent {
            m += self.tail_inverse(r);
        }
        m
    }

    /// `∫_r^∞ ds / g_0(s)` summed directly (no cancellation against the total).
    pub fn inverse_tail(&self, r: f64) -> f64 {
        let r = r.max(0.0);
        if r >= self.extent {
            return self.tail_inverse_from(r);
        }
        let l = self.generation_at(r);
        let end = self.radii.get(l + 1).copied().unwrap_or(self.extent);
        if end.is_infinite() {
            return f64::INFINITY;
        }
        let mut acc = (end - r) / self.levels[l];
        for j in l + 1..self.radii.len() {
            let next = self.radii.get(j + 1).copied().unwrap_or(self.extent);
            if next.is_infinite() {
                return f64::INFINITY;
            }
            acc += (next - self.radii[j]) / self.levels[j];
        }
        acc + self.tail_inverse_from(self.extent)
    }

    fn tail_inverse_from(&self, r: f64) -> f64 {
        if r.is_infinite() {
            return 0.0;
        }
        let e = self.extent;
        let g = *self.levels.last().expect("nonempty");
        match self.tail {
            Tail::Constant => f64::INFINITY,
            Tail::Polynomial { dimension } => {
                let k = dimension - 1.0;
                if k <= 1.0 {
                    f64::INFINITY
                } else {
                    (1.0 + e).powf(k) * (1.0 + r).powf(1.0 - k) / (g * (k - 1.0))
                }
            }
            Tail::Exponential { base } => base.powf(-(r - e)) / (g * base.ln()),
        }
    }

    fn tail_mass(&self, r: f64) -> f64 {
        let e = self.extent;
        let g = *self.levels.last().expect("nonempty");
        match self.tail {
            Tail::Constant => g * (r - e),
            Tail::Polynomial { dimension } => {
                let k = dimension - 1.0;
                if k.abs() < 1e-14 {
                    g * (r - e)
                } else {
                    g * (1.0 + e) / dimension * (((1.0 + r) / (1.0 + e)).powf(dimension) - 1.0)
                }
            }
            Tail::Exponential { base } => g * (base.powf(r - e) - 1.0) / base.ln(),
        }
    }

    fn tail_inverse(&self, r: f64) -> f64 {
        let e = self.extent;
        let g = *self.levels.last().expect("nonempty");
        match self.tail {
            Tail::Constant => (r - e) / g,
            Tail::Polynomial { dimension } => {
                let k = dimension - 1.0;
                let x = (1.0 + r) / (1.0 + e);
                if (k - 1.0).abs() < 1e-14 {
                    (1.0 + e) / g * x.ln()
                } else if r.is_infinite() {
                    if k > 1.0 {
                        (1.0 + e) / (g * (k - 1.0))
                    } else {
                        f64::INFINITY
                    }
                } else {
                    (1.0 + e) / (g * (1.0 - k)) * (x.powf(1.0 - k) - 1.0)
                }
            }
            Tail::Exponential { base } => {
                let lb = base.ln();
                if r.is_infinite() {
                    1.0 / (g * lb)
                } else {
                    (1.0 - base.powf(-(r - e))) / (g * lb)
                }
            }
        }
    }

    /// Volume of the ball `B(z, r)` in `([0, ∞), g_0 ds)`.
    pub fn ball_volume(&self, z: f64, r: f64) -> Result<f64> {
        if !(z >= 0.0) {
            return Err(Error::Domain(format!("ball center must be nonnegative, got {z}")));
        }
        if !(r > 0.0) {
            return Err(Error::Domain(format!("ball radius must be positive, got {r}")));
        }
        self.check_radius(z + r)?;
        Ok(self.cumulative_mass(z + r) - self.cumulative_mass((z - r).max(0.0)))
    }

    /// Dense ids of the edges of generation `generation`, ordered by the path
    /// `m_1, ..., m_generation` read as a mixed-radix number. Ids of lower
    /// generations come first.
    pub fn edge_id(&self, path: &[u32]) -> Result<usize> {
        let j = path.len();
        if j > self.horizon() {
            return Err(Error::InvalidAddress(format!("path of length {j} exceeds horizon")));
        }
        let mut offset = 0usize;
        for l in 0..j {
            offset += self.edges_in_generation(l)? as usize;
        }
        let mut index = 0usize;
        for (i, &m) in path.iter().enumerate() {
            let b = self.branchings[i + 1];
            if m < 1 || m > b {
                return Err(Error::InvalidAddress(format!(
                    "choice {m} at generation {} outside 1..={b}",
                    i + 1
                )));
            }
            index = index * b as usize + (m - 1) as usize;
        }
        Ok(offset + index)
    }

    /// Inverse of [`TreeSpec::edge_id`].
    pub fn edge_path(&self, id: usize) -> Result<Vec<u32>> {
        let mut rest = id;
        for j in 0..=self.horizon() {
            let count = self.edges_in_generation(j)? as usize;
            if rest < count {
                let mut path = alloc::vec![0u32; j];
                for i in (0..j).rev() {
                    let b = self.branchings[i + 1] as usize;
                    path[i] = (rest % b) as u32 + 1;
                    rest /= b;
                }
                return Ok(path);
            }
            rest -= count;
        }
        Err(Error::InvalidAddress(format!("edge id {id} out of range")))
    }

    /// Radial span `(start, end]` of a generation-`j` edge.
    pub fn edge_span(&self, j: usize) -> Result<(f64, f64)> {
        let start = self.radius(j)?;
        let end = self.radii.get(j + 1).copied().unwrap_or(self.extent);
        Ok((start, end))
    }
}

/// A point of the tree: the branch choices `m_1, ..., m_j` made at the
/// vertices passed on the way from the root and the distance to the root.
#[derive(Debug, Clone, PartialEq)]
pub struct PointAddress {
    path: Vec<u32>,
    radial: f64,
}

impl PointAddress {
    /// Validates that `radial` lies on the edge selected by `path`
    /// (`r_j < radial <= r_{j+1}` for a path of length `j`).
    pub fn new(spec: &TreeSpec, path: Vec<u32>, radial: f64) -> Result<Self> {
        if !(radial >= 0.0) || radial.is_infinite() {
            return Err(Error::InvalidAddress(format!("radial coordinate {radial} is not a finite nonnegative number")));
        }
        let j = path.len();
        if j > spec.horizon() {
            return Err(Error::InvalidAddress(format!(
                "path of length {j} exceeds horizon {}",
                spec.horizon()
            )));
        }
        for (i, &m) in path.iter().enumerate() {
            let b = spec.branchings[i + 1];
            if m < 1 || m > b {
                return Err(Error::InvalidAddress(format!(
                    "choice {m} at generation {} outside 1..={b}",
                    i + 1
                )));
            }
        }
        let (lo, hi) = spec.edge_span(j)?;
        let inside = if j == 0 { radial <= hi } else { radial > lo && radial <= hi };
        if !inside {
            return Err(Error::InvalidAddress(format!(
                "radius {radial} not on a generation-{j} edge ({lo}, {hi}]"
            )));
        }
        Ok(Self { path, radial })
    }

    /// The point at distance `radial` reached by always taking branch `m`.
    pub fn along_branch(spec: &TreeSpec, radial: f64, m: u32) -> Result<Self> {
        spec.check_radius(radial)?;
        let j = spec.generation_at(radial);
        Self::new(spec, alloc::vec![m; j], radial)
    }

    pub fn on_first_branch(spec: &TreeSpec, radial: f64) -> Result<Self> {
        Self::along_branch(spec, radial, 1)
    }

    pub fn path(&self) -> &[u32] {
        &self.path
    }

    pub fn radial(&self) -> f64 {
        self.radial
    }

    /// Generation of the edge carrying the point.
    pub fn generation(&self) -> usize {
        self.path.len()
    }

    /// Length of the longest common prefix of two branch paths.
    pub fn common_prefix(&self, other: &Self) -> usize {
        self.path
            .iter()
            .zip(&other.path)
            .take_while(|(a, b)| a == b)
            .count()
    }

    /// Whether the point lies in the forward subtree of the generation-`l`
    /// vertex addressed by `vertex` (its choices at generations `1..l`).
    pub fn in_subtree(&self, vertex: &[u32]) -> bool {
        self.path.len() > vertex.len() && self.path[..vertex.len()] == *vertex
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use proptest::prelude::*;

    fn small() -> TreeSpec {
        TreeSpec::explicit(vec![0.0, 1.0, 2.5], vec![1, 2, 3]).unwrap()
    }

    #[test]
    fn g0_piecewise_values() {
        let s = small();
        assert_eq!(s.branching_function(0, 0.5).unwrap(), 1.0);
        assert_eq!(s.branching_function(0, 1.5).unwrap(), 2.0);
        assert_eq!(s.branching_function(0, 3.0).unwrap(), 6.0);
        assert_eq!(s.branching_function(0, 0.0).unwrap(), 1.0);
        // half-open: the breakpoint belongs to the interval ending there
        assert_eq!(s.branching_function(0, 1.0).unwrap(), 1.0);
        assert_eq!(s.g0_right(1.0).unwrap(), 2.0);
    }

    #[test]
    fn gl_piecewise_values() {
        let s = small();
        assert_eq!(s.branching_function(1, 0.5).unwrap(), 0.0);
        assert_eq!(s.branching_function(1, 1.5).unwrap(), 1.0);
        assert_eq!(s.branching_function(1, 3.0).unwrap(), 3.0);
        assert_eq!(s.branching_function(1, 1.0).unwrap(), 1.0);
        assert_eq!(s.branching_function(2, 2.5).unwrap(), 1.0);
        assert_eq!(s.branching_function(2, 2.4).unwrap(), 0.0);
    }

    #[test]
    fn homogeneous_g0() {
        let h = TreeSpec::homogeneous(2, 1.0, 10).unwrap();
        assert_eq!(h.g0(3.2).unwrap(), 8.0);
        assert_eq!(h.is_homogeneous(), Some(2));
        assert!(matches!(h.g0(11.5), Err(Error::HorizonExceeded { .. })));
        assert!((h.g0_extended(11.5) - 2f64.powi(10) * 2f64.powf(0.5)).abs() < 1e-9);
    }

    #[test]
    fn radius_errors() {
        let s = small();
        assert!(matches!(s.g0(-0.1), Err(Error::Domain(_))));
        assert!(matches!(s.branching_function(3, 1.0), Err(Error::GenerationOutOfRange { .. })));
    }

    #[test]
    fn invalid_trees_rejected() {
        assert!(TreeSpec::explicit(vec![0.0, 1.0], vec![1, 1]).is_err());
        assert!(TreeSpec::explicit(vec![0.0, 1.0, 1.0], vec![1, 2, 2]).is_err());
        assert!(TreeSpec::explicit(vec![0.5, 1.0], vec![1, 2]).is_err());
        assert!(TreeSpec::explicit(vec![0.0, 1.0], vec![2, 2]).is_err());
        assert!(TreeSpec::homogeneous(1, 1.0, 3).is_err());
    }

    #[test]
    fn multiplicity_counts_channels() {
        let s = small();
        assert_eq!(s.generation_multiplicity(0).unwrap(), 1);
        assert_eq!(s.generation_multiplicity(1).unwrap(), 1);
        assert_eq!(s.generation_multiplicity(2).unwrap(), 4);
        assert!(s.generation_multiplicity(3).is_err());
    }

    #[test]
    fn ball_volume_examples() {
        let line = TreeSpec::half_line();
        assert!((line.ball_volume(1.0, 0.5).unwrap() - 1.0).abs() < 1e-15);
        assert!((line.ball_volume(0.2, 0.5).unwrap() - 0.7).abs() < 1e-15);
        let two = TreeSpec::explicit(vec![0.0, 1.0], vec![1, 2]).unwrap();
        assert!((two.ball_volume(1.0, 1.0).unwrap() - 3.0).abs() < 1e-15);
        assert!(line.ball_volume(1.0, 0.0).is_err());
    }

    #[test]
    fn inverse_tail_matches_cumulative() {
        let d3 = TreeSpec::dyadic(3.0, 12).unwrap();
        let total = d3.cumulative_inverse(f64::INFINITY);
        for &r in &[0.0, 0.5, 3.0, 10.0, 40.0, 80.0] {
            let a = d3.inverse_tail(r);
            let b = total - d3.cumulative_inverse(r);
            assert!((a - b).abs() < 1e-12 * total, "{r}: {a} vs {b}");
        }
        assert!(TreeSpec::half_line().inverse_tail(3.0).is_infinite());
        assert!(TreeSpec::dyadic(2.0, 5).unwrap().inverse_tail(1.0).is_infinite());
        let h = TreeSpec::homogeneous(2, 1.0, 30).unwrap();
        assert!((h.inverse_tail(0.0) - 2.0).abs() < 1e-8);
    }

    #[test]
    fn dyadic_radii_on_eighths() {
        for &d in &[1.5, 2.0, 3.0, 4.0] {
            let t = TreeSpec::dyadic(d, 20).unwrap();
            for &r in t.radii() {
                assert_eq!((r * 8.0).fract(), 0.0);
            }
        }
        let d2 = TreeSpec::dyadic(2.0, 5).unwrap();
        assert_eq!(d2.radii(), &[0.0, 1.0, 3.0, 7.0, 15.0, 31.0]);
        assert_eq!(d2.extent(), 63.0);
    }

    #[test]
    fn edge_ids_roundtrip() {
        let s = TreeSpec::explicit(vec![0.0, 1.0, 2.0, 3.0], vec![1, 2, 3, 2]).unwrap();
        let total: u64 = (0..=3).map(|l| s.edges_in_generation(l).unwrap()).sum();
        for id in 0..total as usize {
            let p = s.edge_path(id).unwrap();
            assert_eq!(s.edge_id(&p).unwrap(), id);
        }
        assert_eq!(s.edge_id(&[]).unwrap(), 0);
        assert_eq!(s.edge_id(&[2]).unwrap(), 2);
        assert_eq!(s.edge_id(&[1, 1]).unwrap(), 3);
    }

    #[test]
    fn addresses_validate_their_edge() {
        let s = small();
        assert!(PointAddress::new(&s, vec![], 1.0).is_ok());
        assert!(PointAddress::new(&s, vec![], 1.2).is_err());
        assert!(PointAddress::new(&s, vec![2], 2.5).is_ok());
        assert!(PointAddress::new(&s, vec![3], 2.0).is_err());
        assert!(PointAddress::new(&s, vec![1, 3], 7.0).is_ok());
        let x = PointAddress::on_first_branch(&s, 3.0).unwrap();
        assert_eq!(x.path(), &[1, 1]);
    }

    proptest! {
        #[test]
        fn gl_scales_to_g0(r in 0.0f64..6.0, l in 0usize..3) {
            let s = small();
            let rl = s.radius(l).unwrap();
            prop_assume!(r >= rl && !s.radii().contains(&r));
            let prod: f64 = s.branchings()[..=l].iter().map(|&b| b as f64).product();
            prop_assert_eq!(s.branching_function(l, r).unwrap() * prod, s.g0(r).unwrap());
        }

        #[test]
        fn gl_nondecreasing(a in 0.0f64..6.0, b in 0.0f64..6.0, l in 0usize..3) {
            let s = small();
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            prop_assert!(s.branching_function(l, lo).unwrap() <= s.branching_function(l, hi).unwrap());
        }

        #[test]
        fn multiplicities_sum_to_g0(gens in 1usize..6, b in 2u32..5, r in 0.01f64..6.0) {
            let s = TreeSpec::homogeneous(b, 1.0, gens).unwrap();
            prop_assume!(r <= s.extent());
            let l = s.generation_at(r);
            let sum: u64 = (0..=l).map(|k| s.generation_multiplicity(k).unwrap()).sum();
            prop_assert_eq!(sum as f64, s.g0(r).unwrap());
        }

        #[test]
        fn ball_volume_doubling_consistent(z in 0.0f64..20.0, r in 0.01f64..10.0) {
            let s = TreeSpec::dyadic(2.0, 8).unwrap();
            let v1 = s.ball_volume(z, r).unwrap();
            let v2 = s.ball_volume(z, 2.0 * r).unwrap();
            prop_assert!(v1 <= v2 + 1e-12);
        }
    }
}
