//! The generative color model: a Gaussian-mixture-like density over images
//! given a labeling, with latent per-pixel color numbers and a smoothness
//! coupling between same-label neighbors. The required `p(x|y)` is its
//! marginal over the color numbers, realized by sampling only.

use crate::error::{Error, Result};
use crate::prob::{kahan_sum, normalize, sample_discrete};
use crate::rng::RngStream;
use crate::seg::grid::GridGraph;
use crate::seg::image::{LabelMap, RgbImage};

/// Curvature margin keeping every pixel conditional a proper Gaussian.
pub const MIN_NEG_C: f64 = 1e-3;

/// Parameters of the color model: the (label, color-number) affinity table
/// `h`, the shared quadratic coefficient `c`, per-color-number linear
/// vectors `d`, and the same-label smoothness weight `e`. Stored flat as
/// `[h | c | d | e]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GenColorParams {
    num_labels: usize,
    palette_size: usize,
    params: Vec<f64>,
}

/// Deterministic spread of initial per-color-number channel means: the
/// corners of the RGB cube first, then golden-ratio fill.
fn palette_mean(g: usize) -> [f64; 3] {
    if g < 8 {
        let bit = |k: usize| if (g >> k) & 1 == 1 { 0.8 } else { 0.2 };
        [bit(0), bit(1), bit(2)]
    } else {
        let phi = 0.618_033_988_749_894_9_f64;
        let t = g as f64 * phi;
        [
            0.1 + 0.8 * (t - t.floor()),
            0.1 + 0.8 * ((t * 2.0) - (t * 2.0).floor()),
            0.1 + 0.8 * ((t * 3.0) - (t * 3.0).floor()),
        ]
    }
}

impl GenColorParams {
    /// A proper starting point: flat affinities, moderate per-channel
    /// variance, color-number means spread over the RGB cube, no smoothing.
    pub fn standard(num_labels: usize, palette_size: usize) -> Self {
        let dim = num_labels * palette_size + 1 + 3 * palette_size + 1;
        let mut model = Self {
            num_labels,
            palette_size,
            params: vec![0.0; dim],
        };
        let c = -8.0; // per-channel sigma 0.25
        let ic = model.idx_c();
        model.params[ic] = c;
        for g in 0..palette_size {
            let mean = palette_mean(g);
            for ch in 0..3 {
                let id = model.idx_d(g, ch);
                model.params[id] = -2.0 * c * mean[ch];
            }
        }
        model
    }

    pub fn from_params(num_labels: usize, palette_size: usize, params: Vec<f64>) -> Result<Self> {
        let dim = num_labels * palette_size + 1 + 3 * palette_size + 1;
        if params.len() != dim {
            return Err(Error::DimensionMismatch(format!(
                "expected {dim} parameters, got {}",
                params.len()
            )));
        }
        let model = Self {
            num_labels,
            palette_size,
            params,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn num_labels(&self) -> usize {
        self.num_labels
    }

    pub fn palette_size(&self) -> usize {
        self.palette_size
    }

    pub fn feature_dim(&self) -> usize {
        self.params.len()
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    fn idx_h(&self, label: usize, g: usize) -> usize {
        label * self.palette_size + g
    }

    fn idx_c(&self) -> usize {
        self.num_labels * self.palette_size
    }

    fn idx_d(&self, g: usize, ch: usize) -> usize {
        self.idx_c() + 1 + 3 * g + ch
    }

    fn idx_e(&self) -> usize {
        self.params.len() - 1
    }

    pub fn h(&self, label: usize, g: usize) -> f64 {
        self.params[self.idx_h(label, g)]
    }

    pub fn c(&self) -> f64 {
        self.params[self.idx_c()]
    }

    pub fn d(&self, g: usize) -> [f64; 3] {
        [
            self.params[self.idx_d(g, 0)],
            self.params[self.idx_d(g, 1)],
            self.params[self.idx_d(g, 2)],
        ]
    }

    pub fn e(&self) -> f64 {
        self.params[self.idx_e()]
    }

    pub fn set_h(&mut self, label: usize, g: usize, value: f64) {
        let i = self.idx_h(label, g);
        self.params[i] = value;
    }

    pub fn set_c(&mut self, value: f64) {
        let i = self.idx_c();
        self.params[i] = value;
    }

    pub fn set_d(&mut self, g: usize, value: [f64; 3]) {
        for ch in 0..3 {
            let i = self.idx_d(g, ch);
            self.params[i] = value[ch];
        }
    }

    pub fn set_e(&mut self, value: f64) {
        let i = self.idx_e();
        self.params[i] = value;
    }

    /// Propriety of every pixel conditional: `c < 0`, `e ≤ 0`, and, for any
    /// same-label neighbor count `k`, `c + e·k < 0`.
    pub fn validate(&self) -> Result<()> {
        if !(self.c() < 0.0) {
            return Err(Error::ImproperDistribution(format!(
                "c = {} must be negative",
                self.c()
            )));
        }
        if !(self.e() <= 0.0) {
            return Err(Error::ImproperDistribution(format!(
                "e = {} must be nonpositive",
                self.e()
            )));
        }
        for k in 0..=8 {
            if !(self.c() + self.e() * (k as f64) < 0.0) {
                return Err(Error::ImproperDistribution(format!(
                    "pixel conditional improper at {k} same-label neighbors"
                )));
            }
        }
        Ok(())
    }

    /// Clamps `c` and `e` back into the proper region. Returns the number of
    /// corrected coordinates.
    pub fn project(&mut self) -> usize {
        let mut corrections = 0;
        let ic = self.idx_c();
        if self.params[ic] > -MIN_NEG_C {
            self.params[ic] = -MIN_NEG_C;
            corrections += 1;
        }
        let ie = self.idx_e();
        if self.params[ie] > 0.0 {
            self.params[ie] = 0.0;
            corrections += 1;
        }
        corrections
    }

    /// Sufficient statistics of a full state `(x, g)` under labeling `y`:
    /// (label, color-number) counts, `Σ‖x_i‖²`, per-color-number channel
    /// sums, and the same-label squared-difference sum.
    pub fn features(
        &self,
        x: &RgbImage,
        g: &LabelMap,
        y: &LabelMap,
        graph: &GridGraph,
    ) -> Vec<f64> {
        debug_assert_eq!(x.num_pixels(), y.len());
        debug_assert_eq!(g.len(), y.len());
        let mut f = vec![0.0; self.feature_dim()];
        for i in 0..y.len() {
            let gi = g.get(i) as usize;
            f[self.idx_h(y.get(i) as usize, gi)] += 1.0;
            let px = x.pixel(i);
            f[self.idx_c()] += px[0] * px[0] + px[1] * px[1] + px[2] * px[2];
            for ch in 0..3 {
                f[self.idx_d(gi, ch)] += px[ch];
            }
        }
        for e in graph.edges() {
            if y.get(e.i as usize) == y.get(e.j as usize) {
                f[self.idx_e()] += x.sq_diff(e.i as usize, e.j as usize);
            }
        }
        f
    }

    /// Log unnormalized density of `(x, g)` given `y`, via the statistics.
    pub fn energy(&self, x: &RgbImage, g: &LabelMap, y: &LabelMap, graph: &GridGraph) -> f64 {
        kahan_sum(
            self.features(x, g, y, graph)
                .iter()
                .zip(&self.params)
                .map(|(f, p)| f * p),
        )
    }

    fn g_scores(&self, label: usize, px: [f64; 3]) -> Vec<f64> {
        (0..self.palette_size)
            .map(|g| {
                let d = self.d(g);
                self.h(label, g) + d[0] * px[0] + d[1] * px[1] + d[2] * px[2]
            })
            .collect()
    }

    /// Exact draw of the color numbers given a fixed image and labeling:
    /// their conditional factorizes over pixels.
    pub fn sample_g(&self, x: &RgbImage, y: &LabelMap, rng: &mut RngStream) -> Result<LabelMap> {
        let mut g = LabelMap::filled(y.width(), y.height(), 0);
        for i in 0..y.len() {
            let scores = self.g_scores(y.get(i) as usize, x.pixel(i));
            let p = normalize(&scores)?;
            g.set(i, sample_discrete(&p, rng) as u8);
        }
        Ok(g)
    }

    /// Raster-order sweeps alternating per-pixel draws of the color number
    /// (discrete conditional) and the pixel color (Gaussian conditional,
    /// clamped to the unit box).
    pub fn gibbs_sweep(
        &self,
        y: &LabelMap,
        x: &mut RgbImage,
        g: &mut LabelMap,
        graph: &GridGraph,
        rng: &mut RngStream,
        sweeps: usize,
    ) -> Result<()> {
        self.validate()?;
        let (c, e) = (self.c(), self.e());
        for _ in 0..sweeps {
            for i in 0..y.len() {
                let scores = self.g_scores(y.get(i) as usize, x.pixel(i));
                let p = normalize(&scores)?;
                let gi = sample_discrete(&p, rng);
                g.set(i, gi as u8);

                // Gaussian conditional per channel:
                //   alpha·x² + beta_ch·x with alpha = c + e·k,
                //   beta_ch = d_ch − 2e·Σ_j x_j[ch] over same-label neighbors.
                let d = self.d(gi);
                let mut k = 0.0;
                let mut nbr_sum = [0.0f64; 3];
                for &(j, _) in graph.neighbors(i) {
                    if y.get(j as usize) == y.get(i) {
                        k += 1.0;
                        let pj = x.pixel(j as usize);
                        for ch in 0..3 {
                            nbr_sum[ch] += pj[ch];
                        }
                    }
                }
                let alpha = c + e * k;
                let var = -1.0 / (2.0 * alpha);
                let std_dev = var.sqrt();
                let mut px = [0.0f64; 3];
                for ch in 0..3 {
                    let beta = d[ch] - 2.0 * e * nbr_sum[ch];
                    let mean = -beta / (2.0 * alpha);
                    px[ch] = rng.normal_with(mean, std_dev).clamp(0.0, 1.0);
                }
                x.set_pixel(i, px);
            }
        }
        Ok(())
    }
}
