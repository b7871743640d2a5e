use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{immerse_with, Region, SurfaceError, SurfaceSample};
use crate::frame::{integrate_frame, FrameState, IntegrationStats, IntegratorOptions};
use crate::holo::PathSpec;
use crate::lorentz::{lorentz_inner, MinkowskiPoint};
use crate::weierstrass::WeierstrassData;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeFailure {
    pub node: [usize; 2],
    pub message: String,
}

/// Samples on an `nu × nv` lattice; node `(i, j)` is stored at `i * nv + j`.
#[derive(Debug, Clone)]
pub struct SampleGrid {
    pub region: Region,
    pub nu: usize,
    pub nv: usize,
    pub samples: Vec<Option<SurfaceSample>>,
    pub frames: Vec<Option<FrameState>>,
    pub failures: Vec<NodeFailure>,
    /// Cells `(i, j)` with a missing corner.
    pub failed_cells: Vec<[usize; 2]>,
    pub stats: IntegrationStats,
}

impl SampleGrid {
    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.nv + j
    }

    pub fn sample(&self, i: usize, j: usize) -> Option<&SurfaceSample> {
        if i < self.nu && j < self.nv {
            self.samples[self.index(i, j)].as_ref()
        } else {
            None
        }
    }

    pub fn frame(&self, i: usize, j: usize) -> Option<&FrameState> {
        if i < self.nu && j < self.nv {
            self.frames[self.index(i, j)].as_ref()
        } else {
            None
        }
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn cell_ok(&self, i: usize, j: usize) -> bool {
        i + 1 < self.nu
            && j + 1 < self.nv
            && [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1)].iter().all(|&(a, b)| self.sample(a, b).is_some())
    }
}

/// Carries a state from `z0` to every node: `z0` to `(0, 0)`, up the spine
/// `(i, 0)`, then along each row `(i, ·)` with rows in parallel.
pub(crate) fn spanning_tree<S, E>(
    region: &Region,
    nu: usize,
    nv: usize,
    z0: Complex64,
    root: Result<S, E>,
    step: impl Fn(&S, &PathSpec) -> Result<S, E> + Sync,
) -> Vec<Result<S, E>>
where
    S: Clone + Send + Sync,
    E: Clone + Send + Sync,
{
    if nu == 0 || nv == 0 {
        return Vec::new();
    }
    let node = |i, j| region.node(i, j, nu, nv);
    let first = root.and_then(|r| step(&r, &region.path_from(z0, node(0, 0))));
    let mut spine = Vec::with_capacity(nu);
    spine.push(first);
    for i in 1..nu {
        let next = match &spine[i - 1] {
            Ok(s) => step(s, &region.edge(node(i - 1, 0), node(i, 0))),
            Err(e) => Err(e.clone()),
        };
        spine.push(next);
    }
    let rows: Vec<Vec<Result<S, E>>> = spine
        .into_par_iter()
        .enumerate()
        .map(|(i, head)| {
            let mut row = Vec::with_capacity(nv);
            row.push(head);
            for j in 1..nv {
                let next = match &row[j - 1] {
                    Ok(s) => step(s, &region.edge(node(i, j - 1), node(i, j))),
                    Err(e) => Err(e.clone()),
                };
                row.push(next);
            }
            row
        })
        .collect();
    rows.into_iter().flatten().collect()
}

/// Integrates `F` over the lattice and immerses every node. Failures are
/// recorded per node and never abort the grid.
pub fn sample_grid(
    d: &WeierstrassData,
    region: &Region,
    nu: usize,
    nv: usize,
    opts: &IntegratorOptions,
) -> SampleGrid {
    let empty = region.is_empty() || !region.is_valid() || nu == 0 || nv == 0;
    let (nu, nv) = if empty { (0, 0) } else { (nu, nv) };
    let root = FrameState::at_basepoint(d)
        .map(|s| (s, IntegrationStats::default()))
        .map_err(|e| e.to_string());
    let states = spanning_tree(region, nu, nv, d.basepoint, root, |(s, _), path| {
        integrate_frame(d, path, s, opts).map_err(|e| e.to_string())
    });
    let immersed: Vec<Result<(SurfaceSample, FrameState, IntegrationStats), String>> = states
        .into_par_iter()
        .map(|r| {
            r.and_then(|(s, st)| {
                let sample = immerse_with(&s, d, opts.singular_tol).map_err(|e| e.to_string())?;
                Ok((sample, s, st))
            })
        })
        .collect();
    let mut grid = SampleGrid {
        region: *region,
        nu,
        nv,
        samples: Vec::with_capacity(nu * nv),
        frames: Vec::with_capacity(nu * nv),
        failures: Vec::new(),
        failed_cells: Vec::new(),
        stats: IntegrationStats::default(),
    };
    for (k, r) in immersed.into_iter().enumerate() {
        match r {
            Ok((sample, frame, st)) => {
                grid.stats.merge(&st);
                grid.samples.push(Some(sample));
                grid.frames.push(Some(frame));
            }
            Err(message) => {
                grid.failures.push(NodeFailure { node: [k / nv, k % nv], message });
                grid.samples.push(None);
                grid.frames.push(None);
            }
        }
    }
    for i in 0..nu.saturating_sub(1) {
        for j in 0..nv.saturating_sub(1) {
            if !grid.cell_ok(i, j) {
                grid.failed_cells.push([i, j]);
            }
        }
    }
    grid
}

/// Mean curvature at node `(i, j)` from the 3×3 stencil:
/// `H = (⟨f_uu, N⟩ + ⟨f_vv, N⟩) / 2λ` with `ds² = λ (du² + dv²)`.
pub fn mean_curvature_probe(grid: &SampleGrid, cell: [usize; 2]) -> Result<f64, SurfaceError> {
    let [i, j] = cell;
    let bad = |m: String| Err(SurfaceError::InsufficientStencil(m));
    if i == 0 || j == 0 || i + 1 >= grid.nu || j + 1 >= grid.nv {
        return bad(format!("node ({i}, {j}) is on the boundary of a {}×{} grid", grid.nu, grid.nv));
    }
    let mut side = None;
    for a in i - 1..=i + 1 {
        for b in j - 1..=j + 1 {
            let Some(s) = grid.sample(a, b) else {
                return bad(format!("node ({a}, {b}) failed"));
            };
            if s.near_singular || s.metric.singular {
                return bad(format!("node ({a}, {b}) is near the singular set"));
            }
            let outside = s.g_abs > 1.0;
            if *side.get_or_insert(outside) != outside {
                return bad("stencil crosses the singular set".into());
            }
        }
    }
    let c = grid.sample(i, j).unwrap();
    let n = c.normal()?;
    let f = |a: usize, b: usize| grid.sample(a, b).unwrap().f;
    let [hu, hv] = grid.region.spacing(grid.nu, grid.nv);
    let second = |p: MinkowskiPoint, q: MinkowskiPoint, h: f64| (p + q - c.f * 2.0) * (1.0 / (h * h));
    let fuu = second(f(i + 1, j), f(i - 1, j), hu);
    let fvv = second(f(i, j + 1), f(i, j - 1), hv);
    let chart = grid.region.node(i, j, grid.nu, grid.nv);
    let lambda = c.metric.ds2 * grid.region.dz_du(chart).norm_sqr();
    Ok((lorentz_inner(fuu, n) + lorentz_inner(fvv, n)) / (2.0 * lambda))
}
