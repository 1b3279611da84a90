//! The grid-CRF posterior over labelings: unary reliability table on top of a
//! black-box pixel classifier, plus per-edge-type pairwise terms that are
//! linear in squared color differences. Sampling and decoding go through
//! single-site Gibbs sweeps.

use crate::error::{Error, Result};
use crate::prob::{kahan_sum, normalize, sample_discrete};
use crate::rng::RngStream;
use crate::seg::grid::{EdgeType, GridGraph, EDGE_TYPES};
use crate::seg::image::{LabelMap, RgbImage};

/// Parameters of the labeling posterior: a reliability table `q` over
/// (label, predicted-label) and, per edge type, tables `a` (contrast-free)
/// and `b` (weighting squared color differences). Stored flat as
/// `[q | a_0..a_3 | b_0..b_3]`, `9·L²` parameters in total.
#[derive(Debug, Clone, PartialEq)]
pub struct SegCrfParams {
    num_labels: usize,
    params: Vec<f64>,
}

impl SegCrfParams {
    pub fn zeros(num_labels: usize) -> Self {
        Self {
            num_labels,
            params: vec![0.0; 9 * num_labels * num_labels],
        }
    }

    pub fn from_params(num_labels: usize, params: Vec<f64>) -> Result<Self> {
        if params.len() != 9 * num_labels * num_labels {
            return Err(Error::DimensionMismatch(format!(
                "expected {} parameters, got {}",
                9 * num_labels * num_labels,
                params.len()
            )));
        }
        Ok(Self { num_labels, params })
    }

    pub fn num_labels(&self) -> usize {
        self.num_labels
    }

    pub fn feature_dim(&self) -> usize {
        9 * self.num_labels * self.num_labels
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    fn idx_q(&self, label: usize, unary: usize) -> usize {
        label * self.num_labels + unary
    }

    fn idx_a(&self, ty: usize, l: usize, m: usize) -> usize {
        let ll = self.num_labels * self.num_labels;
        ll + ty * ll + l * self.num_labels + m
    }

    fn idx_b(&self, ty: usize, l: usize, m: usize) -> usize {
        let ll = self.num_labels * self.num_labels;
        ll + (EDGE_TYPES + ty) * ll + l * self.num_labels + m
    }

    pub fn q(&self, label: usize, unary: usize) -> f64 {
        self.params[self.idx_q(label, unary)]
    }

    pub fn set_q(&mut self, label: usize, unary: usize, value: f64) {
        let i = self.idx_q(label, unary);
        self.params[i] = value;
    }

    /// Symmetrized pairwise read: undirected edges never depend on
    /// orientation, whatever the raw table holds.
    pub fn a_sym(&self, ty: EdgeType, l: usize, m: usize) -> f64 {
        let t = ty.index();
        0.5 * (self.params[self.idx_a(t, l, m)] + self.params[self.idx_a(t, m, l)])
    }

    pub fn b_sym(&self, ty: EdgeType, l: usize, m: usize) -> f64 {
        let t = ty.index();
        0.5 * (self.params[self.idx_b(t, l, m)] + self.params[self.idx_b(t, m, l)])
    }

    /// Sufficient statistics of a labeling: per-(label, unary) counts for `q`
    /// and per-(type, label-pair) counts and squared-difference sums for
    /// `a`/`b`, placed half-and-half on the two mirror cells so the inner
    /// product with any parameter vector reproduces the energy.
    pub fn features(&self, x: &RgbImage, unary: &LabelMap, y: &LabelMap) -> Vec<f64> {
        self.features_on(x, unary, y, &GridGraph::new(x.width(), x.height()))
    }

    pub fn features_on(
        &self,
        x: &RgbImage,
        unary: &LabelMap,
        y: &LabelMap,
        graph: &GridGraph,
    ) -> Vec<f64> {
        debug_assert_eq!(x.num_pixels(), y.len());
        debug_assert_eq!(unary.len(), y.len());
        let mut f = vec![0.0; self.feature_dim()];
        for i in 0..y.len() {
            f[self.idx_q(y.get(i) as usize, unary.get(i) as usize)] += 1.0;
        }
        for e in graph.edges() {
            let (l, m) = (y.get(e.i as usize) as usize, y.get(e.j as usize) as usize);
            let t = e.ty.index();
            let d = x.sq_diff(e.i as usize, e.j as usize);
            if l == m {
                f[self.idx_a(t, l, m)] += 1.0;
                f[self.idx_b(t, l, m)] += d;
            } else {
                f[self.idx_a(t, l, m)] += 0.5;
                f[self.idx_a(t, m, l)] += 0.5;
                f[self.idx_b(t, l, m)] += 0.5 * d;
                f[self.idx_b(t, m, l)] += 0.5 * d;
            }
        }
        f
    }

    /// Log unnormalized density of a labeling, via the statistics.
    pub fn energy(&self, x: &RgbImage, unary: &LabelMap, y: &LabelMap, graph: &GridGraph) -> f64 {
        kahan_sum(
            self.features_on(x, unary, y, graph)
                .iter()
                .zip(&self.params)
                .map(|(f, p)| f * p),
        )
    }

    /// The exact single-site conditional at `pixel` given the rest of `y`.
    pub fn site_conditional(
        &self,
        ctx: &CrfContext<'_>,
        y: &LabelMap,
        pixel: usize,
    ) -> Result<Vec<f64>> {
        let scores = self.site_scores(ctx, y, pixel);
        Ok(normalize(&scores)?.values().to_vec())
    }

    fn site_scores(&self, ctx: &CrfContext<'_>, y: &LabelMap, pixel: usize) -> Vec<f64> {
        let z = ctx.unary.get(pixel) as usize;
        let mut scores = vec![0.0; self.num_labels];
        for (l, s) in scores.iter_mut().enumerate() {
            *s = self.q(l, z);
        }
        let nbrs = ctx.graph.neighbors(pixel);
        for (k, &(j, ty)) in nbrs.iter().enumerate() {
            let yj = y.get(j as usize) as usize;
            let d = ctx.nbr_sq_diffs[ctx.nbr_offsets[pixel] + k];
            for (l, s) in scores.iter_mut().enumerate() {
                *s += self.a_sym(ty, l, yj) + self.b_sym(ty, l, yj) * d;
            }
        }
        scores
    }

    /// Raster-order single-site Gibbs sweeps, resampling every pixel from its
    /// local conditional.
    pub fn gibbs_sweep(
        &self,
        ctx: &CrfContext<'_>,
        y: &mut LabelMap,
        rng: &mut RngStream,
        sweeps: usize,
    ) -> Result<()> {
        for _ in 0..sweeps {
            for pixel in 0..y.len() {
                let scores = self.site_scores(ctx, y, pixel);
                let p = normalize(&scores)?;
                y.set(pixel, sample_discrete(&p, rng) as u8);
            }
        }
        Ok(())
    }

    /// Per-pixel argmax of the unary reliability given the predicted labels;
    /// used as the deterministic sweep/decode starting point.
    pub fn unary_argmax(&self, unary: &LabelMap) -> LabelMap {
        let mut out = LabelMap::filled(unary.width(), unary.height(), 0);
        for i in 0..unary.len() {
            let z = unary.get(i) as usize;
            let mut best = 0;
            for l in 1..self.num_labels {
                if self.q(l, z) > self.q(best, z) {
                    best = l;
                }
            }
            out.set(i, best as u8);
        }
        out
    }

    /// Runs `burn_in` sweeps, accumulates per-pixel label frequencies over
    /// `samples` further sweeps, and returns the per-pixel argmax (ties to
    /// the smallest label).
    pub fn max_marginal_decode(
        &self,
        ctx: &CrfContext<'_>,
        rng: &mut RngStream,
        burn_in: usize,
        samples: usize,
    ) -> Result<LabelMap> {
        assert!(samples >= 1);
        let mut y = self.unary_argmax(ctx.unary);
        self.gibbs_sweep(ctx, &mut y, rng, burn_in)?;
        let mut counts = vec![0u32; y.len() * self.num_labels];
        for _ in 0..samples {
            self.gibbs_sweep(ctx, &mut y, rng, 1)?;
            for i in 0..y.len() {
                counts[i * self.num_labels + y.get(i) as usize] += 1;
            }
        }
        let mut decoded = LabelMap::filled(y.width(), y.height(), 0);
        for i in 0..y.len() {
            let row = &counts[i * self.num_labels..(i + 1) * self.num_labels];
            let mut best = 0;
            for l in 1..self.num_labels {
                if row[l] > row[best] {
                    best = l;
                }
            }
            decoded.set(i, best as u8);
        }
        Ok(decoded)
    }
}

/// Precomputed per-image context for sweeps: the graph, the unary prediction,
/// and squared color differences aligned with each pixel's neighbor list.
#[derive(Debug)]
pub struct CrfContext<'a> {
    pub graph: &'a GridGraph,
    pub unary: &'a LabelMap,
    nbr_sq_diffs: Vec<f64>,
    nbr_offsets: Vec<usize>,
}

impl<'a> CrfContext<'a> {
    pub fn new(graph: &'a GridGraph, x: &RgbImage, unary: &'a LabelMap) -> Self {
        let n = graph.num_pixels();
        let mut nbr_offsets = Vec::with_capacity(n);
        let mut nbr_sq_diffs = Vec::new();
        for i in 0..n {
            nbr_offsets.push(nbr_sq_diffs.len());
            for &(j, _) in graph.neighbors(i) {
                nbr_sq_diffs.push(x.sq_diff(i, j as usize));
            }
        }
        Self {
            graph,
            unary,
            nbr_sq_diffs,
            nbr_offsets,
        }
    }
}
