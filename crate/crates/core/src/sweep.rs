//! Grid sweeps over `(family, α, r, P)` and their CSV form.
//!
//! Points are independent, so with the `parallel` feature they are evaluated
//! on the rayon pool. Rows are always returned in canonical order (family,
//! then α, r, P ascending), so the emitted bytes do not depend on the thread
//! count.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, PI};
use std::io::{Read, Write};
use std::str::FromStr;

use serde::Deserialize;

use crate::channel::{apply_local_channel, check_probability};
use crate::entanglement::{closed_form, concurrence_eigen, concurrence_xstate};
use crate::error::{Error, Result};
use crate::states::{reduced_state, Acceleration, Family, StateSpec};

pub const CSV_HEADER: [&str; 9] = [
    "family",
    "alpha",
    "r",
    "p",
    "c_eigen",
    "c_xstate",
    "c_closed",
    "raw",
    "deviation",
];

/// Sweeps pass when every row's cross-method deviation is at most this.
pub const DEVIATION_THRESHOLD: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MethodSet {
    pub eigen: bool,
    pub xstate: bool,
    pub closed: bool,
}

impl MethodSet {
    pub const ALL: MethodSet = MethodSet {
        eigen: true,
        xstate: true,
        closed: true,
    };

    pub fn is_empty(&self) -> bool {
        !(self.eigen || self.xstate || self.closed)
    }

    fn needs_state(&self) -> bool {
        self.eigen || self.xstate
    }
}

impl Default for MethodSet {
    fn default() -> Self {
        MethodSet::ALL
    }
}

impl FromStr for MethodSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut set = MethodSet {
            eigen: false,
            xstate: false,
            closed: false,
        };
        for tok in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            match tok.to_ascii_lowercase().as_str() {
                "eigen" => set.eigen = true,
                "xstate" => set.xstate = true,
                "closed" => set.closed = true,
                "all" => set = MethodSet::ALL,
                other => return Err(Error::InvalidSweep(format!("unknown method {other:?}"))),
            }
        }
        if set.is_empty() {
            return Err(Error::InvalidSweep("no methods selected".into()));
        }
        Ok(set)
    }
}

/// `count` evenly spaced values from `min` to `max`, both endpoints exact.
pub fn linspace(min: f64, max: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![min],
        n => (0..n)
            .map(|i| {
                if i == n - 1 {
                    max
                } else {
                    min + (max - min) * i as f64 / (n - 1) as f64
                }
            })
            .collect(),
    }
}

/// Parses one scalar: a float, `pi`, `pi/<d>`, `<k>*pi/<d>`, `sqrt(<x>)` or
/// `1/sqrt(<x>)`.
pub fn parse_scalar(s: &str) -> Result<f64> {
    let t: String = s
        .trim()
        .to_ascii_lowercase()
        .chars()
        .filter(|c| !c.is_whitespace())
        .collect();
    let bad = || Error::InvalidSweep(format!("cannot parse number {s:?}"));
    let num = |x: &str| x.parse::<f64>().map_err(|_| bad());

    if let Some(rest) = t.strip_prefix("1/sqrt(").and_then(|r| r.strip_suffix(')')) {
        return Ok(1.0 / num(rest)?.sqrt());
    }
    if let Some(rest) = t.strip_prefix("sqrt(").and_then(|r| r.strip_suffix(')')) {
        return Ok(num(rest)?.sqrt());
    }
    if let Some(pos) = t.find("pi") {
        let (head, tail) = (&t[..pos], &t[pos + 2..]);
        let k = match head {
            "" => 1.0,
            "-" => -1.0,
            h => num(h.strip_suffix('*').ok_or_else(bad)?)?,
        };
        let d = match tail {
            "" => 1.0,
            tl => num(tl.strip_prefix('/').ok_or_else(bad)?)?,
        };
        return Ok(k * PI / d);
    }
    num(&t)
}

/// An axis is either a comma-separated list of scalars or a `min:max:count`
/// grid.
pub fn parse_axis(s: &str) -> Result<Vec<f64>> {
    let s = s.trim();
    if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::InvalidSweep(format!(
                "grid {s:?} must have the form min:max:count"
            )));
        }
        let count: usize = parts[2]
            .trim()
            .parse()
            .map_err(|_| Error::InvalidSweep(format!("bad grid count in {s:?}")))?;
        return Ok(linspace(
            parse_scalar(parts[0])?,
            parse_scalar(parts[1])?,
            count,
        ));
    }
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(parse_scalar)
        .collect()
}

pub fn parse_families(s: &str) -> Result<Vec<Family>> {
    match s.trim().to_ascii_lowercase().as_str() {
        "both" | "all" => Ok(Family::ALL.to_vec()),
        other => other.split(',').map(Family::from_str).collect(),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepSpec {
    pub families: Vec<Family>,
    pub alphas: Vec<f64>,
    pub rs: Vec<f64>,
    pub ps: Vec<f64>,
    pub methods: MethodSet,
    /// Admit `α ∈ {0, ±1}`.
    pub allow_degenerate: bool,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridPoint {
    pub state: StateSpec,
    pub r: Acceleration,
    pub p: f64,
}

impl SweepSpec {
    /// Validates every axis value and returns the grid points in canonical
    /// order. Axes are sorted and de-duplicated.
    pub fn points(&self) -> Result<Vec<GridPoint>> {
        if self.families.is_empty()
            || self.alphas.is_empty()
            || self.rs.is_empty()
            || self.ps.is_empty()
        {
            return Err(Error::InvalidSweep(
                "every axis needs at least one value".into(),
            ));
        }
        if self.methods.is_empty() {
            return Err(Error::InvalidSweep("no methods selected".into()));
        }
        let families = sorted_unique(self.families.clone());
        let alphas = sorted_unique_f64(&self.alphas)?;
        let rs = sorted_unique_f64(&self.rs)?
            .into_iter()
            .map(Acceleration::new)
            .collect::<Result<Vec<_>>>()?;
        let ps = sorted_unique_f64(&self.ps)?
            .into_iter()
            .map(check_probability)
            .collect::<Result<Vec<_>>>()?;

        let mut out = Vec::with_capacity(families.len() * alphas.len() * rs.len() * ps.len());
        for &family in &families {
            for &alpha in &alphas {
                let state = if self.allow_degenerate {
                    StateSpec::degenerate(family, alpha)?
                } else {
                    StateSpec::new(family, alpha)?
                };
                for &r in &rs {
                    for &p in &ps {
                        out.push(GridPoint { state, r, p });
                    }
                }
            }
        }
        Ok(out)
    }
}

fn sorted_unique<T: Ord>(mut v: Vec<T>) -> Vec<T> {
    v.sort();
    v.dedup();
    v
}

fn sorted_unique_f64(v: &[f64]) -> Result<Vec<f64>> {
    if let Some(&bad) = v.iter().find(|x| !x.is_finite()) {
        return Err(Error::InvalidSweep(format!("non-finite axis value {bad}")));
    }
    let mut v = v.to_vec();
    v.sort_by(f64::total_cmp);
    v.dedup();
    Ok(v)
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
pub struct SweepRow {
    pub family: Family,
    pub alpha: f64,
    pub r: f64,
    pub p: f64,
    pub c_eigen: Option<f64>,
    pub c_xstate: Option<f64>,
    pub c_closed: Option<f64>,
    /// Unclamped closed-form value.
    pub raw: f64,
    /// Largest pairwise difference among the requested methods.
    pub deviation: f64,
}

pub fn evaluate_point(point: &GridPoint, methods: MethodSet) -> Result<SweepRow> {
    let GridPoint { state, r, p } = *point;
    let closed = closed_form(state.family(), state.alpha(), r, p);

    let (mut c_eigen, mut c_xstate) = (None, None);
    if methods.needs_state() {
        let rho = apply_local_channel(&reduced_state(&state, r)?, p, p)?;
        if methods.eigen {
            c_eigen = Some(concurrence_eigen(&rho)?.value);
        }
        if methods.xstate {
            c_xstate = Some(concurrence_xstate(&rho)?.value);
        }
    }
    let c_closed = methods.closed.then_some(closed.value);

    let present: Vec<f64> = [c_eigen, c_xstate, c_closed]
        .into_iter()
        .flatten()
        .collect();
    let mut deviation = 0.0_f64;
    for (i, a) in present.iter().enumerate() {
        for b in &present[i + 1..] {
            deviation = deviation.max((a - b).abs());
        }
    }

    Ok(SweepRow {
        family: state.family(),
        alpha: state.alpha(),
        r: r.r(),
        p,
        c_eigen,
        c_xstate,
        c_closed,
        raw: closed.raw,
        deviation,
    })
}

pub fn evaluate_sequential(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    let methods = spec.methods;
    spec.points()?
        .iter()
        .map(|pt| evaluate_point(pt, methods))
        .collect()
}

/// Evaluates the sweep on the current rayon pool.
#[cfg(feature = "parallel")]
pub fn evaluate(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    use rayon::prelude::*;

    let methods = spec.methods;
    spec.points()?
        .par_iter()
        .map(|pt| evaluate_point(pt, methods))
        .collect()
}

#[cfg(not(feature = "parallel"))]
pub fn evaluate(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    evaluate_sequential(spec)
}

/// Runs `f` on a dedicated pool with `jobs` threads; `None` uses the global
/// pool. Without the `parallel` feature `jobs` is ignored.
#[cfg(feature = "parallel")]
pub fn with_jobs<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    match jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .expect("failed to build thread pool")
            .install(f),
        None => f(),
    }
}

#[cfg(not(feature = "parallel"))]
pub fn with_jobs<T: Send>(_jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    f()
}

pub fn max_deviation(rows: &[SweepRow]) -> f64 {
    rows.iter().map(|r| r.deviation).fold(0.0, f64::max)
}

/// Seventeen significant digits, enough to round-trip any `f64`.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_float).unwrap_or_default()
}

pub fn write_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for row in rows {
        w.write_record([
            row.family.as_str().to_string(),
            fmt_float(row.alpha),
            fmt_float(row.r),
            fmt_float(row.p),
            fmt_opt(row.c_eigen),
            fmt_opt(row.c_xstate),
            fmt_opt(row.c_closed),
            fmt_float(row.raw),
            fmt_float(row.deviation),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<SweepRow>> {
    let mut rdr = csv::Reader::from_reader(input);
    let header = rdr.headers()?.clone();
    if header.iter().ne(CSV_HEADER) {
        return Err(Error::InvalidSweep(format!(
            "unexpected CSV header {header:?}"
        )));
    }
    rdr.deserialize().map(|r| r.map_err(Error::from)).collect()
}

pub fn to_csv_string(rows: &[SweepRow]) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(rows, &mut buf)?;
    Ok(String::from_utf8(buf).expect("CSV output is ASCII"))
}

/// Default α values for figure panels. An implementation choice covering both
/// the dying and the surviving regimes.
pub const FIGURE_ALPHAS: [f64; 4] = [0.3, FRAC_1_SQRT_2, 0.8, 0.9];
pub const FIGURE_P_SAMPLES: usize = 201;
pub const FIGURE_R_VALUES: [(&str, f64); 3] =
    [("r0", 0.0), ("r_pi6", PI / 6.0), ("r_pi4", FRAC_PI_4)];

/// Concurrence-versus-P panels: one sweep per (family, r).
pub fn fig1_panels() -> Vec<(String, SweepSpec)> {
    let mut out = Vec::new();
    for family in Family::ALL {
        for (tag, r) in FIGURE_R_VALUES {
            let spec = SweepSpec {
                families: vec![family],
                alphas: FIGURE_ALPHAS.to_vec(),
                rs: vec![r],
                ps: linspace(0.0, 1.0, FIGURE_P_SAMPLES),
                methods: MethodSet::ALL,
                allow_degenerate: false,
            };
            out.push((format!("fig1_{family}_{tag}.csv"), spec));
        }
    }
    out
}

pub const BOUNDARY_CSV_HEADER: [&str; 3] = ["r", "p", "alpha_boundary"];
pub const SURFACE_GRID: usize = 50;

#[derive(Clone, Copy, Debug, PartialEq, Deserialize)]
pub struct BoundarySample {
    pub r: f64,
    pub p: f64,
    pub alpha_boundary: f64,
}

/// Zero-concurrence boundary `|α|(r, P)` on an `n × n` grid with
/// `r ∈ [0, π/4]` and `P ∈ (0, 1]` (`P = k/n`). Where no interior root
/// exists (Θ₂ at `r = 0`) the boundary sits at `|α| = 1`.
pub fn boundary_surface(family: Family, n: usize) -> Result<Vec<BoundarySample>> {
    use crate::sudden_death::boundary_alpha;

    let rs = linspace(0.0, FRAC_PI_4, n);
    let ps: Vec<f64> = (1..=n)
        .map(|k| if k == n { 1.0 } else { k as f64 / n as f64 })
        .collect();
    let mut out = Vec::with_capacity(n * n);
    for &r in &rs {
        let acc = Acceleration::new(r)?;
        for &p in &ps {
            let alpha_boundary = match boundary_alpha(family, acc, p) {
                Ok(a) => a,
                Err(Error::NoRoot(_)) => 1.0,
                Err(e) => return Err(e),
            };
            out.push(BoundarySample {
                r,
                p,
                alpha_boundary,
            });
        }
    }
    Ok(out)
}

pub fn write_boundary_csv<W: Write>(samples: &[BoundarySample], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(BOUNDARY_CSV_HEADER)?;
    for s in samples {
        w.write_record([fmt_float(s.r), fmt_float(s.p), fmt_float(s.alpha_boundary)])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_boundary_csv<R: Read>(input: R) -> Result<Vec<BoundarySample>> {
    let mut rdr = csv::Reader::from_reader(input);
    rdr.deserialize().map(|r| r.map_err(Error::from)).collect()
}
