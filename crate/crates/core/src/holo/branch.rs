//! Analytic continuation of multivalued expressions along paths.
//!
//! A [`BranchState`] keeps, for every distinct base `b` of a non-integer
//! power or logarithm, an unwound argument of `b` at the current point.
//! Bases are shared by structure, so `z^μ`, its derivative `μ z^(μ-1)` and
//! `z^(-μ-1)` all read the same argument of `z` and stay mutually consistent
//! on the universal cover.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use num_complex::Complex64;

use super::{HoloError, HoloExpr, Node};

#[derive(Debug, Clone, PartialEq)]
struct Track {
    base: HoloExpr,
    arg: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BranchState {
    z: Complex64,
    tracks: Vec<Track>,
}

fn wrap(a: f64) -> f64 {
    let w = (a + PI).rem_euclid(TAU) - PI;
    if w <= -PI {
        w + TAU
    } else {
        w
    }
}

/// Largest accepted argument change of any tracked base per step.
const MAX_ARG_JUMP: f64 = FRAC_PI_2;
/// Largest accepted relative change of any tracked base per step.
const MAX_REL_CHANGE: f64 = 0.5;

impl BranchState {
    /// Registers every multivalued base of `exprs` with its principal argument at `z`.
    pub fn new(z: Complex64, exprs: &[&HoloExpr]) -> Result<Self, HoloError> {
        let mut state = BranchState { z, tracks: Vec::new() };
        for e in exprs {
            state.register(e)?;
        }
        Ok(state)
    }

    /// A state with no tracked bases (single-valued expressions only).
    pub fn single_valued(z: Complex64) -> Self {
        BranchState { z, tracks: Vec::new() }
    }

    pub fn z(&self) -> Complex64 {
        self.z
    }

    pub fn tracked_count(&self) -> usize {
        self.tracks.len()
    }

    /// Adds the bases of `e` not yet tracked, on their principal branch at the current point.
    pub fn register(&mut self, e: &HoloExpr) -> Result<(), HoloError> {
        for base in e.multivalued_bases() {
            if self.find(&base).is_some() {
                continue;
            }
            let v = self.eval(&base, self.z)?;
            if !(v.norm() > 0.0) || !v.norm().is_finite() {
                return Err(HoloError::SingularityOnPath(self.z));
            }
            self.tracks.push(Track { base, arg: v.arg() });
        }
        Ok(())
    }

    fn find(&self, base: &HoloExpr) -> Option<usize> {
        let h = base.structural_hash();
        self.tracks.iter().position(|t| t.base.structural_hash() == h && t.base == *base)
    }

    /// Tracked argument for `base` at `z`: the representative nearest to the stored one.
    fn nearest_arg(&self, base: &HoloExpr, value: Complex64) -> Result<f64, HoloError> {
        let idx = self.find(base).ok_or_else(|| HoloError::UntrackedBranch(base.to_string()))?;
        let stored = self.tracks[idx].arg;
        Ok(stored + wrap(value.arg() - stored))
    }

    /// Evaluates `e` at `z` on the branch continued from the current point.
    /// `z` must be close enough that no base winds between the two points.
    pub fn eval(&self, e: &HoloExpr, z: Complex64) -> Result<Complex64, HoloError> {
        Ok(match e.node() {
            Node::Const(c) => *c,
            Node::Var => z,
            Node::Add(a, b) => self.eval(a, z)? + self.eval(b, z)?,
            Node::Sub(a, b) => self.eval(a, z)? - self.eval(b, z)?,
            Node::Mul(a, b) => self.eval(a, z)? * self.eval(b, z)?,
            Node::Div(a, b) => self.eval(a, z)? / self.eval(b, z)?,
            Node::Neg(a) => -self.eval(a, z)?,
            Node::IntPow(a, n) => self.eval(a, z)?.powi(*n),
            Node::Exp(a) => self.eval(a, z)?.exp(),
            Node::Pow(a, r) => {
                let b = self.eval(a, z)?;
                let arg = self.nearest_arg(a, b)?;
                Complex64::from_polar(b.norm().powf(*r), r * arg)
            }
            Node::Log(a) => {
                let b = self.eval(a, z)?;
                let arg = self.nearest_arg(a, b)?;
                Complex64::new(b.norm().ln(), arg)
            }
        })
    }

    /// Evaluates at the current point.
    pub fn value(&self, e: &HoloExpr) -> Result<Complex64, HoloError> {
        self.eval(e, self.z)
    }

    /// Moves the state to `z`, updating every tracked argument by continuity.
    /// Fails without mutating when a base changes too much for the step to be
    /// trusted; callers shorten the step and retry.
    pub fn advance(&mut self, z: Complex64) -> Result<(), HoloError> {
        let mut next = self.clone();
        next.z = z;
        let mut worst = 0.0f64;
        for i in 0..self.tracks.len() {
            let base = self.tracks[i].base.clone();
            let old = self.eval(&base, self.z)?;
            // inner bases precede outer ones, so `next` already holds their updated args
            let new = next.eval(&base, z)?;
            if !(new.norm() > 0.0) || !new.norm().is_finite() {
                return Err(HoloError::SingularityOnPath(z));
            }
            let jump = wrap(new.arg() - self.tracks[i].arg);
            worst = worst.max(jump.abs());
            if jump.abs() > MAX_ARG_JUMP || (new - old).norm() > MAX_REL_CHANGE * old.norm() {
                return Err(HoloError::StepTooLarge(jump.abs()));
            }
            next.tracks[i].arg = self.tracks[i].arg + jump;
        }
        *self = next;
        Ok(())
    }
}

/// A line segment or circular arc in the z-plane, parametrized on `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Segment {
    Line { from: Complex64, to: Complex64 },
    /// Angles are unwound; `end_angle < start_angle` runs clockwise.
    Arc { center: Complex64, radius: f64, start_angle: f64, end_angle: f64 },
}

impl Segment {
    pub fn point(&self, t: f64) -> Complex64 {
        match *self {
            Segment::Line { from, to } => from + (to - from) * t,
            Segment::Arc { center, radius, start_angle, end_angle } => {
                center + Complex64::from_polar(radius, start_angle + t * (end_angle - start_angle))
            }
        }
    }

    /// `dz/dt`.
    pub fn velocity(&self, t: f64) -> Complex64 {
        match *self {
            Segment::Line { from, to } => to - from,
            Segment::Arc { center, start_angle, end_angle, .. } => {
                Complex64::new(0.0, end_angle - start_angle) * (self.point(t) - center)
            }
        }
    }

    pub fn start(&self) -> Complex64 {
        self.point(0.0)
    }

    pub fn end(&self) -> Complex64 {
        self.point(1.0)
    }

    pub fn length(&self) -> f64 {
        match *self {
            Segment::Line { from, to } => (to - from).norm(),
            Segment::Arc { radius, start_angle, end_angle, .. } => {
                radius * (end_angle - start_angle).abs()
            }
        }
    }

    /// Euclidean distance from `p` to the segment.
    pub fn distance_to(&self, p: Complex64) -> f64 {
        match *self {
            Segment::Line { from, to } => {
                let d = to - from;
                let len2 = d.norm_sqr();
                if len2 == 0.0 {
                    return (p - from).norm();
                }
                let t = (((p - from) * d.conj()).re / len2).clamp(0.0, 1.0);
                (p - self.point(t)).norm()
            }
            Segment::Arc { center, radius, start_angle, end_angle } => {
                let rel = p - center;
                let (lo, hi) = if start_angle <= end_angle {
                    (start_angle, end_angle)
                } else {
                    (end_angle, start_angle)
                };
                let inside = hi - lo >= TAU || {
                    let a = lo + (rel.arg() - lo).rem_euclid(TAU);
                    a <= hi
                };
                if inside {
                    (rel.norm() - radius).abs()
                } else {
                    (p - self.start()).norm().min((p - self.end()).norm())
                }
            }
        }
    }
}

/// A piecewise path of segments.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PathSpec {
    pub segments: Vec<Segment>,
}

impl PathSpec {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_segments(segments: Vec<Segment>) -> Self {
        PathSpec { segments }
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    pub fn start(&self) -> Option<Complex64> {
        self.segments.first().map(Segment::start)
    }

    pub fn end(&self) -> Option<Complex64> {
        self.segments.last().map(Segment::end)
    }

    pub fn is_closed(&self) -> bool {
        match (self.start(), self.end()) {
            (Some(a), Some(b)) => (a - b).norm() <= 1e-12 * a.norm().max(1.0),
            _ => false,
        }
    }

    pub fn line(mut self, from: Complex64, to: Complex64) -> Self {
        self.segments.push(Segment::Line { from, to });
        self
    }

    /// Appends a straight line from the current end to `to`.
    pub fn line_to(self, to: Complex64) -> Self {
        let from = self.end().expect("line_to on an empty path");
        self.line(from, to)
    }

    /// Appends an arc about `center` from the current end, sweeping `sweep` radians.
    pub fn arc_about(mut self, center: Complex64, sweep: f64) -> Self {
        let from = self.end().expect("arc_about on an empty path");
        let rel = from - center;
        let a0 = rel.arg();
        self.segments.push(Segment::Arc { center, radius: rel.norm(), start_angle: a0, end_angle: a0 + sweep });
        self
    }

    /// Full circle of radius `radius` about `center` starting on the positive
    /// real side, as four quarter arcs; `ccw = false` runs clockwise.
    pub fn circle(center: Complex64, radius: f64, ccw: bool) -> Self {
        let s = if ccw { 1.0 } else { -1.0 };
        let segments = (0..4)
            .map(|k| {
                let a0 = s * f64::from(k) * PI / 2.0;
                Segment::Arc { center, radius, start_angle: a0, end_angle: a0 + s * PI / 2.0 }
            })
            .collect();
        PathSpec { segments }
    }

    pub fn concat(mut self, other: &PathSpec) -> Self {
        self.segments.extend(other.segments.iter().copied());
        self
    }

    pub fn reversed(&self) -> Self {
        let segments = self
            .segments
            .iter()
            .rev()
            .map(|s| match *s {
                Segment::Line { from, to } => Segment::Line { from: to, to: from },
                Segment::Arc { center, radius, start_angle, end_angle } => {
                    Segment::Arc { center, radius, start_angle: end_angle, end_angle: start_angle }
                }
            })
            .collect();
        PathSpec { segments }
    }

    pub fn length(&self) -> f64 {
        self.segments.iter().map(Segment::length).sum()
    }

    /// Checks continuity and clearance from the given points.
    pub fn validate(&self, avoid: &[Complex64], clearance: f64) -> Result<(), HoloError> {
        for (i, pair) in self.segments.windows(2).enumerate() {
            let gap = (pair[0].end() - pair[1].start()).norm();
            if gap > 1e-9 * pair[0].end().norm().max(1.0) {
                return Err(HoloError::DiscontinuousPath(i + 1));
            }
        }
        for seg in &self.segments {
            for p in avoid {
                if seg.distance_to(*p) < clearance {
                    return Err(HoloError::SingularityOnPath(*p));
                }
            }
        }
        Ok(())
    }
}

/// Walks `state` along one segment with adaptive subdivision.
pub(crate) fn walk_segment(
    state: &mut BranchState,
    seg: &Segment,
    mut guard: impl FnMut(&BranchState) -> Result<(), HoloError>,
) -> Result<(), HoloError> {
    let mut t = 0.0;
    let mut dt = 0.125f64;
    while t < 1.0 {
        let step = dt.min(1.0 - t);
        let target = if t + step >= 1.0 { seg.end() } else { seg.point(t + step) };
        match state.advance(target) {
            Ok(()) => {
                t += step;
                guard(state)?;
                dt = (dt * 1.5).min(0.125);
            }
            Err(HoloError::StepTooLarge(_)) => {
                dt *= 0.5;
                if dt < 1e-12 {
                    return Err(HoloError::SingularityOnPath(target));
                }
            }
            Err(e) => return Err(e),
        }
    }
    Ok(())
}

/// Continues `e` along `path` from `state`, returning the value at the end of
/// the path and the updated state.
pub fn eval_continued(
    e: &HoloExpr,
    path: &PathSpec,
    state: &BranchState,
) -> Result<(Complex64, BranchState), HoloError> {
    let mut st = state.clone();
    st.register(e)?;
    if let Some(start) = path.start() {
        if (start - st.z()).norm() > 1e-9 * start.norm().max(1.0) {
            return Err(HoloError::DiscontinuousPath(0));
        }
    }
    path.validate(&[], 0.0)?;
    let watch = e.singular_subexprs();
    let scale = watch
        .iter()
        .map(|s| st.value(s).map(|v| v.norm()))
        .collect::<Result<Vec<_>, _>>()?;
    for seg in &path.segments {
        walk_segment(&mut st, seg, |s| {
            for (w, s0) in watch.iter().zip(&scale) {
                let v = s.value(w)?;
                if !(v.norm() > 1e-10 * s0.max(1.0)) || !v.norm().is_finite() {
                    return Err(HoloError::SingularityOnPath(s.z()));
                }
            }
            Ok(())
        })?;
    }
    let v = st.value(e)?;
    if !v.re.is_finite() || !v.im.is_finite() {
        return Err(HoloError::SingularityOnPath(st.z()));
    }
    Ok((v, st))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::holo::parse_expr;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn unit_loop() -> PathSpec {
        PathSpec::circle(c(0.0, 0.0), 1.0, true)
    }

    #[test]
    fn power_picks_up_monodromy_phase() {
        let e = parse_expr("z^0.8").unwrap();
        let st = BranchState::new(c(1.0, 0.0), &[&e]).unwrap();
        let (v, _) = eval_continued(&e, &unit_loop(), &st).unwrap();
        let expect = Complex64::from_polar(1.0, 1.6 * PI);
        assert!((v - expect).norm() < 1e-12, "{v}");
    }

    #[test]
    fn single_valued_returns_to_start() {
        let e = parse_expr("z^2").unwrap();
        let st = BranchState::new(c(1.0, 0.0), &[&e]).unwrap();
        let (v, _) = eval_continued(&e, &unit_loop(), &st).unwrap();
        assert!((v - c(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn log_gains_two_pi_i() {
        let e = parse_expr("log(z)").unwrap();
        let st = BranchState::new(c(1.0, 0.0), &[&e]).unwrap();
        let (v, _) = eval_continued(&e, &unit_loop(), &st).unwrap();
        assert!((v - c(0.0, TAU)).norm() < 1e-12);
    }

    #[test]
    fn shared_bases_stay_consistent() {
        // z^0.8 * z^(-1.8) = 1/z on every sheet
        let g = parse_expr("z^0.8").unwrap();
        let w = parse_expr("z^(-1.8)").unwrap();
        let prod = g.mul(&w);
        let mut st = BranchState::new(c(1.0, 0.0), &[&g, &w]).unwrap();
        for _ in 0..3 {
            let (_, next) = eval_continued(&prod, &unit_loop(), &st).unwrap();
            st = next;
            assert!((st.value(&prod).unwrap() - c(1.0, 0.0)).norm() < 1e-12);
        }
        // the derivative reads the same track
        let dg = g.differentiate();
        let expect = Complex64::from_polar(0.8, -0.2 * 3.0 * TAU);
        assert!((st.value(&dg).unwrap() - expect).norm() < 1e-12);
    }

    #[test]
    fn null_homotopic_loop_returns_start_value() {
        let e = parse_expr("z^0.3 * log(z) * (z - 2)^(-0.5)").unwrap();
        let start = c(1.0, 0.5);
        let st = BranchState::new(start, &[&e]).unwrap();
        let v0 = st.value(&e).unwrap();
        // loop around 0.5+0.5i, enclosing no branch point
        let path = PathSpec::new().line(start, c(1.2, 0.5)).arc_about(c(1.0, 0.5), TAU);
        let path = path.line_to(start);
        let (v, _) = eval_continued(&e, &path, &st).unwrap();
        assert!((v - v0).norm() < 1e-10);
    }

    #[test]
    fn singular_path_is_rejected() {
        let e = parse_expr("1/(z - 0.5)").unwrap();
        let st = BranchState::new(c(0.0, 0.0), &[&e]).unwrap();
        let path = PathSpec::new().line(c(0.0, 0.0), c(1.0, 0.0));
        assert!(matches!(eval_continued(&e, &path, &st), Err(HoloError::SingularityOnPath(_))));
        let bp = parse_expr("z^0.5").unwrap();
        let st = BranchState::new(c(-1.0, 0.0), &[&bp]).unwrap();
        let path = PathSpec::new().line(c(-1.0, 0.0), c(1.0, 0.0));
        assert!(matches!(eval_continued(&bp, &path, &st), Err(HoloError::SingularityOnPath(_))));
    }

    #[test]
    fn clearance_validation() {
        let p = PathSpec::circle(c(0.0, 0.0), 1.0, true);
        assert!(p.validate(&[c(0.0, 0.0)], 0.5).is_ok());
        assert!(p.validate(&[c(1.1, 0.0)], 0.5).is_err());
        assert!(p.is_closed());
        assert!(PathSpec::new().line(c(0.0, 0.0), c(1.0, 0.0)).validate(&[c(0.5, 0.1)], 0.2).is_err());
    }
}
