//! The subset universal relation: Alice holds a set S, Bob holds a proper
//! subset T, and from one message Bob must name an element of S \ T.
//!
//! The hard distribution draws S uniformly among m-subsets of the universe
//! and T at one of a geometric ladder of sizes
//! `r_i = floor(m (1 - (1 - alpha)^i))`. The ladder constants degenerate at
//! desk scale (often to a single stage), so both appear here as overridable
//! knobs with the asymptotic defaults; a schedule that stalls (a gap below
//! one) is rejected rather than repaired.

use rand::seq::index::sample as index_sample;
use rand::Rng;

use crate::error::{Error, Result};
use crate::prf::Seed256;
use crate::support_find::{new_support_find, SupportFindSketch, SupportResult};

/// Asymptotic default for the constant in `alpha = c_size / log2(1/delta)`.
pub const DEFAULT_C_SIZE: f64 = 20.0;
/// Asymptotic default for the constant in the stage count
/// `R = floor(log2(alpha m) / (c_r * alpha))`.
pub const DEFAULT_C_R: f64 = 20.0;

/// Parameters of the hard distribution over (S, T) pairs.
#[derive(Clone, Debug, PartialEq)]
pub struct UrParams {
    pub universe: u64,
    pub delta: f64,
    /// |S| = floor(sqrt(universe * log2(1/delta))).
    pub m: u64,
    /// alpha = c_size / log2(1/delta); must stay below 1.
    pub alpha: f64,
    /// The |T| ladder `r_0 = 0 < r_1 < ... < r_{R-1} < m`.
    pub schedule: Vec<u64>,
    pub c_size: f64,
    pub c_r: f64,
}

impl UrParams {
    pub fn stages(&self) -> usize {
        self.schedule.len()
    }

    /// A single-stage ladder still samples, but exercises nothing of the
    /// geometric structure; callers may want to warn.
    pub fn is_degenerate(&self) -> bool {
        self.schedule.len() < 2
    }
}

/// Builds the size schedule and validates it.
pub fn ur_params(universe: u64, delta: f64, c_size: f64, c_r: f64) -> Result<UrParams> {
    if universe < 4 {
        return Err(Error::InvalidParameter(format!(
            "universe must have at least 4 elements, got {universe}"
        )));
    }
    if !delta.is_finite() || delta <= 0.0 || delta >= 1.0 {
        return Err(Error::InvalidParameter(format!(
            "delta must lie strictly inside (0, 1), got {delta}"
        )));
    }
    if c_size <= 0.0 || c_r <= 0.0 {
        return Err(Error::InvalidParameter("schedule constants must be positive".into()));
    }
    let log_inv_delta = (1.0 / delta).log2();
    let alpha = c_size / log_inv_delta;
    if alpha >= 1.0 {
        return Err(Error::Regime(format!(
            "alpha = {c_size}/log2(1/delta) = {alpha:.4} is not below 1; \
             shrink delta or override the size constant"
        )));
    }
    let m = ((universe as f64) * log_inv_delta).sqrt().floor() as u64;
    if m == 0 {
        return Err(Error::Regime("set size m floors to zero".into()));
    }
    if m > universe {
        return Err(Error::Regime(format!(
            "set size m = {m} exceeds the universe {universe}"
        )));
    }
    let stage_count = ((1.0 / (c_r * alpha)) * (alpha * m as f64).log2()).floor();
    if stage_count.is_nan() || stage_count < 1.0 {
        return Err(Error::Schedule(format!(
            "stage count floors to {stage_count}; no valid |T| sizes exist"
        )));
    }
    let stages = stage_count as usize;
    let mut schedule = Vec::with_capacity(stages);
    for i in 0..stages {
        let r = (m as f64 * (1.0 - (1.0 - alpha).powi(i as i32))).floor() as u64;
        schedule.push(r);
    }
    for w in schedule.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::Schedule(format!(
                "size ladder stalls at {} (consecutive sizes {} and {}); \
                 adjust the constants",
                w[0], w[0], w[1]
            )));
        }
    }
    let last = *schedule.last().expect("at least one stage");
    if schedule[0] != 0 || last >= m {
        return Err(Error::Schedule(format!(
            "ladder must run 0 = r_0 < ... < r_last < m, got first {} last {last} m {m}",
            schedule[0]
        )));
    }
    Ok(UrParams { universe, delta, m, alpha, schedule, c_size, c_r })
}

/// One relation instance: T is a proper subset of S.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UrInstance {
    pub s: Vec<u64>,
    pub t: Vec<u64>,
    /// Which ladder stage |T| was drawn from.
    pub stage: usize,
}

impl UrInstance {
    pub fn new(mut s: Vec<u64>, mut t: Vec<u64>, stage: usize) -> Result<Self> {
        s.sort_unstable();
        s.dedup();
        t.sort_unstable();
        t.dedup();
        if t.len() >= s.len() || !t.iter().all(|x| s.binary_search(x).is_ok()) {
            return Err(Error::InvalidParameter(
                "T must be a proper subset of S".into(),
            ));
        }
        Ok(UrInstance { s, t, stage })
    }

    pub fn s_minus_t(&self) -> Vec<u64> {
        self.s
            .iter()
            .copied()
            .filter(|x| self.t.binary_search(x).is_err())
            .collect()
    }

    /// Instance file format: a `u <universe>` header, then `s ...` and
    /// `t ...` element lists.
    pub fn to_text(&self, universe: u64) -> String {
        let join = |xs: &[u64]| {
            xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
        };
        format!("u {universe}\ns {}\nt {}\n", join(&self.s), join(&self.t))
    }

    /// Parses the instance file format; `#` starts a comment.
    pub fn from_text(text: &str) -> Result<(UrInstance, u64)> {
        let mut universe = None;
        let mut s: Option<Vec<u64>> = None;
        let mut t: Option<Vec<u64>> = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| Error::Parse { line: lineno + 1, msg };
            let mut fields = line.split_whitespace();
            let head = fields.next().expect("nonempty line");
            let rest: std::result::Result<Vec<u64>, _> =
                fields.map(|f| f.parse::<u64>()).collect();
            let rest = rest.map_err(|e| err(format!("bad element: {e}")))?;
            match head {
                "u" if rest.len() == 1 => universe = Some(rest[0]),
                "s" => s = Some(rest),
                "t" => t = Some(rest),
                other => return Err(err(format!("unknown field `{other}`"))),
            }
        }
        let universe = universe.ok_or_else(|| Error::Parse {
            line: 0,
            msg: "missing `u <universe>` header".into(),
        })?;
        let s = s.ok_or_else(|| Error::Parse { line: 0, msg: "missing `s` list".into() })?;
        let t = t.unwrap_or_default();
        if s.iter().chain(t.iter()).any(|&x| x >= universe) {
            return Err(Error::Parse { line: 0, msg: "element outside the universe".into() });
        }
        Ok((UrInstance::new(s, t, 0)?, universe))
    }
}

/// Draws (S, T): S uniform among m-subsets, a uniform stage i, then T
/// uniform among r_i-subsets of S.
pub fn sample_d_ur<R: Rng>(p: &UrParams, rng: &mut R) -> UrInstance {
    let mut s: Vec<u64> = index_sample(rng, p.universe as usize, p.m as usize)
        .into_iter()
        .map(|x| x as u64)
        .collect();
    s.sort_unstable();
    let stage = rng.gen_range(0..p.stages());
    let t_size = p.schedule[stage] as usize;
    let mut t: Vec<u64> = index_sample(rng, s.len(), t_size)
        .into_iter()
        .map(|i| s[i])
        .collect();
    t.sort_unstable();
    UrInstance { s, t, stage }
}

/// A one-way protocol: a message computed from S, and a deterministic
/// output function of (message, T). Concrete instances double as the
/// adversarial behaviors the encoder must survive.
pub trait UrProtocol {
    /// Alice's message. `t0` is visible for generality; the protocols here
    /// ignore it (the message is a function of S alone).
    fn message(&self, s: &[u64], t0: &[u64]) -> Vec<u8>;
    /// Bob's answer on (message, T); `None` is a Fail.
    fn answer(&self, message: &[u8], t: &[u64]) -> Option<u64>;
}

/// The honest protocol: Alice sketches the indicator of S; Bob subtracts
/// the indicator of T and queries, leaving the sketch of `1_{S \ T}`.
#[derive(Clone, Debug)]
pub struct SketchUrProtocol {
    pub universe: u64,
    pub delta1: f64,
    pub delta2: f64,
    pub seed: Seed256,
}

impl SketchUrProtocol {
    pub fn new(universe: u64, delta1: f64, delta2: f64, seed: Seed256) -> Self {
        SketchUrProtocol { universe, delta1, delta2, seed }
    }
}

impl UrProtocol for SketchUrProtocol {
    fn message(&self, s: &[u64], _t0: &[u64]) -> Vec<u8> {
        let mut sk = new_support_find(self.universe, 1, self.delta1, self.delta2, self.seed)
            .expect("valid protocol parameters");
        for &x in s {
            sk.update(x, 1).expect("set elements lie in the universe");
        }
        sk.to_bytes()
    }

    fn answer(&self, message: &[u8], t: &[u64]) -> Option<u64> {
        let (mut sk, _) = SupportFindSketch::from_bytes(message).ok()?;
        for &x in t {
            sk.update(x, -1).ok()?;
        }
        match sk.query() {
            SupportResult::Found(v) => v.first().copied(),
            SupportResult::Fail => None,
        }
    }
}

/// Outputs Fail on every query.
#[derive(Clone, Copy, Debug, Default)]
pub struct AlwaysFailProtocol;

impl UrProtocol for AlwaysFailProtocol {
    fn message(&self, _s: &[u64], _t0: &[u64]) -> Vec<u8> {
        Vec::new()
    }

    fn answer(&self, _message: &[u8], _t: &[u64]) -> Option<u64> {
        None
    }
}

/// Outputs an element guaranteed outside S \ T: the smallest element of T
/// when T is nonempty, otherwise an out-of-universe sentinel.
#[derive(Clone, Copy, Debug)]
pub struct AlwaysWrongProtocol {
    pub universe: u64,
}

impl UrProtocol for AlwaysWrongProtocol {
    fn message(&self, _s: &[u64], _t0: &[u64]) -> Vec<u8> {
        Vec::new()
    }

    fn answer(&self, _message: &[u8], t: &[u64]) -> Option<u64> {
        Some(t.first().copied().unwrap_or(self.universe))
    }
}

/// Alice's side of the sketch protocol as a standalone call.
pub fn ur_alice(s: &[u64], universe: u64, delta1: f64, delta2: f64, seed: Seed256) -> Vec<u8> {
    SketchUrProtocol::new(universe, delta1, delta2, seed).message(s, &[])
}

/// Bob's side: subtract T and query. The message is self-describing.
pub fn ur_bob(message: &[u8], t: &[u64]) -> Result<Option<u64>> {
    let (mut sk, _) = SupportFindSketch::from_bytes(message)?;
    for &x in t {
        sk.update(x, -1)?;
    }
    Ok(match sk.query() {
        SupportResult::Found(v) => v.first().copied(),
        SupportResult::Fail => None,
    })
}
