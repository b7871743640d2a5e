use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::grid::spanning_tree;
use super::{hollow_ball_project, Region};
use crate::frame::{integrate_frame, FrameState, IntegratorOptions};
use crate::holo::{eval_continued, BranchState, PathSpec};
use crate::lorentz::{congruence, hermitian_part_to_vec, E3};
use crate::weierstrass::WeierstrassData;

/// Bound on `||g| - 1|` at every curve vertex.
pub const CURVE_TOL: f64 = 1e-10;
/// Chords are split until the level set is this close to their midpoints.
const CHORD_DEVIATION: f64 = 1e-7;
const MAX_SPLIT_DEPTH: u32 = 24;

/// A component of `|g| = 1` as a polyline, with its hollow-ball image.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingularCurve {
    pub closed: bool,
    pub domain: Vec<Complex64>,
    /// Cover coordinates of `domain`.
    pub chart: Vec<[f64; 2]>,
    /// Empty when `image_error` is set.
    pub image: Vec<[f64; 3]>,
    pub image_error: Option<String>,
}

/// Edge of the lattice: `(0, i, j)` joins `(i, j)`–`(i+1, j)`, `(1, i, j)`
/// joins `(i, j)`–`(i, j+1)`.
type EdgeId = (u8, usize, usize);

#[derive(Clone, Copy)]
struct Vertex {
    chart: [f64; 2],
    /// Node whose branch evaluates `g` near this vertex.
    node: usize,
}

struct Field<'a> {
    d: &'a WeierstrassData,
    region: Region,
    states: Vec<Option<BranchState>>,
}

impl Field<'_> {
    fn dev(&self, node: usize, c: [f64; 2]) -> Option<f64> {
        let st = self.states[node].as_ref()?;
        let g = st.eval(&self.d.g, self.region.to_z(c)).ok()?;
        let v = g.norm() - 1.0;
        v.is_finite().then_some(v)
    }

    /// Root of `|g| - 1` on the chart segment `a`–`b` by bisection; the
    /// endpoint values must differ in sign.
    fn bisect(&self, node: usize, a: [f64; 2], b: [f64; 2]) -> Option<[f64; 2]> {
        let at = |t: f64| [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])];
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        let s_lo = self.dev(node, a)? > 0.0;
        if (self.dev(node, b)? > 0.0) == s_lo {
            return None;
        }
        let mut best = at(0.5);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            best = at(mid);
            let v = self.dev(node, best)?;
            if v.abs() <= 0.1 * CURVE_TOL || hi - lo < 1e-17 {
                break;
            }
            if (v > 0.0) == s_lo {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Some(best)
    }

    /// Inserts level-set points between `a` and `b` until every chord
    /// midpoint deviates from the curve by at most [`CHORD_DEVIATION`].
    fn refine(&self, a: Vertex, b: Vertex, depth: u32, out: &mut Vec<Vertex>) {
        let (za, zb) = (self.region.to_z(a.chart), self.region.to_z(b.chart));
        let len = [b.chart[0] - a.chart[0], b.chart[1] - a.chart[1]];
        let l = len[0].hypot(len[1]);
        if depth >= MAX_SPLIT_DEPTH || !(l > 0.0) || (zb - za).norm() < 1e-9 {
            return;
        }
        let m = [0.5 * (a.chart[0] + b.chart[0]), 0.5 * (a.chart[1] + b.chart[1])];
        let n = [-len[1], len[0]];
        let p = [m[0] - n[0], m[1] - n[1]];
        let q = [m[0] + n[0], m[1] + n[1]];
        let Some(hit) = self.bisect(a.node, p, q) else { return };
        let dev = (self.region.to_z(hit) - 0.5 * (za + zb)).norm();
        if dev <= CHORD_DEVIATION {
            return;
        }
        let v = Vertex { chart: hit, node: a.node };
        self.refine(a, v, depth + 1, out);
        out.push(v);
        self.refine(v, b, depth + 1, out);
    }
}

/// Components of `|g| = 1` over `region` by marching squares on `log|g|` at
/// `n × n` nodes. Saddle cells are split by the sign at the cell center.
pub fn singular_curves(
    d: &WeierstrassData,
    region: &Region,
    n: usize,
    opts: &IntegratorOptions,
) -> Vec<SingularCurve> {
    if n < 2 || region.is_empty() || !region.is_valid() {
        return Vec::new();
    }
    let root = d.branch_at(d.basepoint).map_err(|e| e.to_string());
    let states = spanning_tree(region, n, n, d.basepoint, root, |s, path| {
        eval_continued(&d.g, path, s).map(|(_, st)| st).map_err(|e| e.to_string())
    });
    let field = Field { d, region: *region, states: states.into_iter().map(Result::ok).collect() };
    let idx = |i: usize, j: usize| i * n + j;
    let node = |i, j| region.node(i, j, n, n);
    let h: Vec<Option<f64>> = (0..n * n).map(|k| field.dev(k, node(k / n, k % n))).collect();

    let mut crossings: BTreeMap<EdgeId, Vertex> = BTreeMap::new();
    let mut crossing = |e: EdgeId| -> Option<Vertex> {
        if let Some(v) = crossings.get(&e) {
            return Some(*v);
        }
        let (k, i, j) = e;
        let (a, b) = if k == 0 { ((i, j), (i + 1, j)) } else { ((i, j), (i, j + 1)) };
        let c = field.bisect(idx(a.0, a.1), node(a.0, a.1), node(b.0, b.1))?;
        let v = Vertex { chart: c, node: idx(a.0, a.1) };
        crossings.insert(e, v);
        Some(v)
    };

    let mut segments: Vec<(EdgeId, EdgeId)> = Vec::new();
    for i in 0..n - 1 {
        for j in 0..n - 1 {
            let corners = [idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1)];
            let Some(vals) = corners.iter().map(|&k| h[k]).collect::<Option<Vec<f64>>>() else { continue };
            let pos: Vec<bool> = vals.iter().map(|v| *v > 0.0).collect();
            // bottom, right, top, left; edge k joins corner k and k+1
            let edges: [EdgeId; 4] = [(0, i, j), (1, i + 1, j), (0, i, j + 1), (1, i, j)];
            let cut: Vec<usize> = (0..4).filter(|&k| pos[k] != pos[(k + 1) % 4]).collect();
            let pairs: Vec<(usize, usize)> = match cut.len() {
                2 => vec![(cut[0], cut[1])],
                4 => {
                    let a = node(i, j);
                    let center = [a[0] + 0.5 * (node(i + 1, j)[0] - a[0]), a[1] + 0.5 * (node(i, j + 1)[1] - a[1])];
                    let Some(hc) = field.dev(idx(i, j), center) else { continue };
                    if (hc > 0.0) == pos[0] {
                        // corner 0 joins corner 2 through the center
                        vec![(0, 1), (2, 3)]
                    } else {
                        vec![(3, 0), (1, 2)]
                    }
                }
                _ => Vec::new(),
            };
            for (p, q) in pairs {
                if crossing(edges[p]).is_some() && crossing(edges[q]).is_some() {
                    segments.push((edges[p], edges[q]));
                }
            }
        }
    }

    let chains = chain(&segments);
    chains
        .into_iter()
        .map(|(edges, closed)| {
            let verts: Vec<Vertex> = edges.iter().map(|e| crossings[e]).collect();
            let mut fine = Vec::with_capacity(verts.len());
            for w in verts.windows(2) {
                fine.push(w[0]);
                field.refine(w[0], w[1], 0, &mut fine);
            }
            if let Some(last) = verts.last() {
                fine.push(*last);
            }
            if closed && verts.len() > 1 {
                field.refine(*verts.last().unwrap(), verts[0], 0, &mut fine);
            }
            let chart: Vec<[f64; 2]> = fine.iter().map(|v| v.chart).collect();
            let domain: Vec<Complex64> = chart.iter().map(|c| region.to_z(*c)).collect();
            let (image, image_error) = match curve_image(d, region, &chart, &domain, opts) {
                Ok(im) => (im, None),
                Err(e) => (Vec::new(), Some(e)),
            };
            SingularCurve { closed, domain, chart, image, image_error }
        })
        .collect()
}

/// Orders segments into chains of edge ids, open chains first.
fn chain(segments: &[(EdgeId, EdgeId)]) -> Vec<(Vec<EdgeId>, bool)> {
    let mut adj: BTreeMap<EdgeId, Vec<usize>> = BTreeMap::new();
    for (k, (a, b)) in segments.iter().enumerate() {
        adj.entry(*a).or_default().push(k);
        adj.entry(*b).or_default().push(k);
    }
    let mut used = vec![false; segments.len()];
    let mut out = Vec::new();
    let walk = |start: EdgeId, used: &mut Vec<bool>| -> (Vec<EdgeId>, bool) {
        let mut path = vec![start];
        let mut at = start;
        loop {
            let next = adj[&at].iter().copied().find(|k| !used[*k]);
            let Some(k) = next else { break };
            used[k] = true;
            let (a, b) = segments[k];
            at = if a == at { b } else { a };
            if at == start {
                return (path, true);
            }
            path.push(at);
        }
        (path, false)
    };
    let ends: Vec<EdgeId> = adj.iter().filter(|(_, v)| v.len() == 1).map(|(e, _)| *e).collect();
    for e in ends {
        if adj[&e].iter().all(|k| used[*k]) {
            continue;
        }
        out.push(walk(e, &mut used));
    }
    for k in 0..segments.len() {
        if !used[k] {
            out.push(walk(segments[k].0, &mut used));
        }
    }
    out
}

fn curve_image(
    d: &WeierstrassData,
    region: &Region,
    chart: &[[f64; 2]],
    domain: &[Complex64],
    opts: &IntegratorOptions,
) -> Result<Vec<[f64; 3]>, String> {
    let Some(first) = chart.first() else { return Ok(Vec::new()) };
    let start = FrameState::at_basepoint(d).map_err(|e| e.to_string())?;
    let (mut s, _) = integrate_frame(d, &region.path_from(d.basepoint, *first), &start, opts).map_err(|e| e.to_string())?;
    let mut out = Vec::with_capacity(domain.len());
    for (k, z) in domain.iter().enumerate() {
        if k > 0 {
            let path = PathSpec::new().line(s.z, *z);
            s = integrate_frame(d, &path, &s, opts).map_err(|e| e.to_string())?.0;
        }
        let f = hermitian_part_to_vec(&congruence(&s.f, &E3));
        out.push(hollow_ball_project(f).map_err(|e| e.to_string())?);
    }
    Ok(out)
}
