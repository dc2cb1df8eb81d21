//! Concentric disc-in-disc domain with a partitioned interface circle and
//! electrode arcs on the outer boundary.
//!
//! The interface circle `Γ` (radius `inner_radius`) is split into `n` equal
//! half-open arcs `[start, start + 2π/n)`; the Robin coefficient is one value
//! per arc. The outer boundary carries `m` closed electrode arcs of equal
//! width, uniformly spaced, covering `electrode_coverage` of the perimeter in
//! total. Half-open partition arcs give every interface edge exactly one tag;
//! closed electrode arcs make endpoint nodes part of the electrode.

use crate::{Error, Result};

const TAU: f64 = std::f64::consts::TAU;

/// Geometry parameters. Angles are radians; radii share one length unit.
#[derive(Debug, Clone, PartialEq)]
pub struct GeometryConfig {
    pub outer_radius: f64,
    pub inner_radius: f64,
    /// Number of interface partition arcs (resolution dimension).
    pub n: usize,
    /// Number of electrodes.
    pub m: usize,
    /// Fraction of the outer perimeter covered by electrodes in total.
    pub electrode_coverage: f64,
    /// Angle at which the first partition arc starts.
    pub partition_phase: f64,
    /// Angle of the first electrode's center.
    pub electrode_phase: f64,
}

impl Default for GeometryConfig {
    fn default() -> Self {
        GeometryConfig {
            outer_radius: 1.0,
            inner_radius: 0.5,
            n: 2,
            m: 4,
            electrode_coverage: 0.5,
            partition_phase: 0.0,
            electrode_phase: 0.0,
        }
    }
}

impl GeometryConfig {
    /// Convenience constructor for the common "defaults except n, m" case.
    pub fn with_counts(n: usize, m: usize) -> Self {
        GeometryConfig {
            n,
            m,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.outer_radius.is_finite() && self.outer_radius > 0.0) {
            return Err(Error::Config(format!(
                "outer_radius must be positive, got {}",
                self.outer_radius
            )));
        }
        if !(self.inner_radius > 0.0 && self.inner_radius < self.outer_radius) {
            return Err(Error::Config(format!(
                "inner_radius must satisfy 0 < inner_radius < outer_radius, got {} vs {}",
                self.inner_radius, self.outer_radius
            )));
        }
        if self.n < 2 {
            return Err(Error::Config(format!("n must be at least 2, got {}", self.n)));
        }
        if self.m < 2 {
            return Err(Error::Config(format!("m must be at least 2, got {}", self.m)));
        }
        if !(self.electrode_coverage > 0.0 && self.electrode_coverage < 1.0) {
            return Err(Error::Config(format!(
                "electrode_coverage must lie strictly between 0 and 1, got {}",
                self.electrode_coverage
            )));
        }
        if !self.partition_phase.is_finite() || !self.electrode_phase.is_finite() {
            return Err(Error::Config("phases must be finite".into()));
        }
        Ok(())
    }
}

/// Wraps an angle into `[0, 2π)`.
pub fn wrap_angle(theta: f64) -> f64 {
    let mut t = theta % TAU;
    if t < 0.0 {
        t += TAU;
    }
    // rem_euclid-style wrap can land exactly on 2π after rounding
    if t >= TAU {
        t = 0.0;
    }
    t
}

/// Circular arc given by its start angle (wrapped) and positive width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArcSpan {
    pub start: f64,
    pub width: f64,
}

impl ArcSpan {
    /// Angular offset of `theta` from the arc start, in `[0, 2π)`.
    fn offset(&self, theta: f64) -> f64 {
        wrap_angle(theta - self.start)
    }

    /// Membership for a half-open arc `[start, start + width)`.
    pub fn contains_half_open(&self, theta: f64) -> bool {
        self.offset(theta) < self.width
    }

    /// Membership for a closed arc `[start, start + width]`, with a small
    /// angular tolerance so that endpoint nodes stay inside.
    pub fn contains_closed(&self, theta: f64, tol: f64) -> bool {
        let off = self.offset(theta);
        off <= self.width + tol || off >= TAU - tol
    }

    pub fn end(&self) -> f64 {
        wrap_angle(self.start + self.width)
    }

    pub fn midpoint(&self) -> f64 {
        wrap_angle(self.start + 0.5 * self.width)
    }
}

/// Validated domain description: partition arcs on `Γ` and electrode arcs on
/// the outer boundary.
#[derive(Debug, Clone)]
pub struct Geometry {
    pub config: GeometryConfig,
    /// Half-open arcs `Γ_1..Γ_n` in index order.
    pub partition_arcs: Vec<ArcSpan>,
    /// Closed electrode arcs `E_1..E_m` in index order.
    pub electrode_arcs: Vec<ArcSpan>,
}

impl Geometry {
    /// Index of the partition arc containing angle `theta` (half-open test).
    pub fn partition_index(&self, theta: f64) -> usize {
        let n = self.config.n;
        let rel = wrap_angle(theta - self.config.partition_phase);
        let idx = (rel / (TAU / n as f64)).floor() as usize;
        idx.min(n - 1)
    }

    /// Electrode arc containing `theta` under the closed-arc test, if any.
    pub fn electrode_index(&self, theta: f64, tol: f64) -> Option<usize> {
        self.electrode_arcs
            .iter()
            .position(|arc| arc.contains_closed(theta, tol))
    }
}

/// Builds and validates the arc layout for a configuration.
pub fn build_geometry(config: &GeometryConfig) -> Result<Geometry> {
    config.validate()?;
    let n = config.n;
    let m = config.m;

    let partition_width = TAU / n as f64;
    let partition_arcs: Vec<ArcSpan> = (0..n)
        .map(|j| ArcSpan {
            start: wrap_angle(config.partition_phase + j as f64 * partition_width),
            width: partition_width,
        })
        .collect();

    let electrode_width = config.electrode_coverage * TAU / m as f64;
    let spacing = TAU / m as f64;
    let electrode_arcs: Vec<ArcSpan> = (0..m)
        .map(|k| ArcSpan {
            start: wrap_angle(config.electrode_phase + k as f64 * spacing - 0.5 * electrode_width),
            width: electrode_width,
        })
        .collect();

    // Closed arcs of width `coverage * spacing` leave a gap of
    // `(1 - coverage) * spacing` between neighbors; coverage < 1 already
    // guarantees disjointness, but verify explicitly against the arcs built.
    let gap = spacing - electrode_width;
    if gap <= 1e-12 * TAU {
        return Err(Error::Config(format!(
            "electrode arcs overlap or touch: gap {gap:.3e} rad"
        )));
    }

    Ok(Geometry {
        config: config.clone(),
        partition_arcs,
        electrode_arcs,
    })
}
