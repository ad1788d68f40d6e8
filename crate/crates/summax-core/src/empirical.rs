//! Monte Carlo estimation of C-L transforms and rescaled tail measures, and
//! the domain-of-attraction convergence diagnostics packaged as a report.
//!
//! Replicates are distributed across split substreams in fixed blocks of
//! 2^16 draws and partial results are merged by a pairwise tree reduction in
//! index order, so every estimate is bitwise identical regardless of how
//! many worker threads run the blocks.

use rayon::prelude::*;
use thiserror::Error;

use crate::exponent::{cl_transform, EvalError, EvalPoint};
use crate::measures::{eta_upper_mass, MeasureError, SumMaxStableParams};
use crate::sampler::{PairSample, PairSampler, RandomStream, SumMaxSampler};

/// Replicates per substream block.
pub const BLOCK_SIZE: u64 = 1 << 16;

#[derive(Debug, Error)]
pub enum EmpiricalError {
    #[error("empty sample set")]
    EmptyInput,
    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
}

/// Running (count, sum, sum of squares) for values bounded in a fixed range;
/// the merge is exact enough at these scales and associativity-controlled by
/// the tree reduction.
#[derive(Debug, Clone, Copy, Default)]
struct MeanAcc {
    count: u64,
    sum: f64,
    sumsq: f64,
}

impl MeanAcc {
    #[inline]
    fn push(&mut self, v: f64) {
        self.count += 1;
        self.sum += v;
        self.sumsq += v * v;
    }

    fn merge(a: Self, b: Self) -> Self {
        Self {
            count: a.count + b.count,
            sum: a.sum + b.sum,
            sumsq: a.sumsq + b.sumsq,
        }
    }

    fn mean(&self) -> f64 {
        self.sum / self.count as f64
    }

    /// Population-variance standard error; bounded by 0.5/√count for values
    /// in [0, 1].
    fn stderr(&self) -> f64 {
        let m = self.count as f64;
        let mean = self.sum / m;
        let var = (self.sumsq / m - mean * mean).max(0.0);
        (var / m).sqrt()
    }
}

fn tree_reduce_rows(mut rows: Vec<Vec<MeanAcc>>) -> Vec<MeanAcc> {
    while rows.len() > 1 {
        let mut next = Vec::with_capacity(rows.len().div_ceil(2));
        let mut iter = rows.into_iter();
        while let Some(a) = iter.next() {
            match iter.next() {
                Some(b) => next.push(
                    a.iter()
                        .zip(b.iter())
                        .map(|(x, y)| MeanAcc::merge(*x, *y))
                        .collect(),
                ),
                None => next.push(a),
            }
        }
        rows = next;
    }
    rows.pop().expect("at least one block")
}

fn block_lengths(m: u64) -> Vec<(u64, u64)> {
    let mut blocks = Vec::with_capacity(m.div_ceil(BLOCK_SIZE) as usize);
    let mut start = 0;
    let mut idx = 0;
    while start < m {
        let len = BLOCK_SIZE.min(m - start);
        blocks.push((idx, len));
        start += len;
        idx += 1;
    }
    blocks
}

#[inline]
fn cl_kernel(p: &PairSample, s: f64, y: f64) -> f64 {
    if p.j <= y {
        if s == 0.0 {
            1.0
        } else {
            (-s * p.w).exp()
        }
    } else {
        0.0
    }
}

/// Monte Carlo estimate of the C-L transform on a grid, with standard errors.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalCL {
    pub grid: Vec<EvalPoint>,
    /// (mean, stderr) per grid point, mean ∈ [0, 1], stderr ≤ 0.5/√count.
    pub estimates: Vec<(f64, f64)>,
    pub sample_count: u64,
}

fn validate_grid(grid: &[EvalPoint]) -> Result<(), EmpiricalError> {
    if grid.is_empty() {
        return Err(EmpiricalError::InvalidArgument("empty grid"));
    }
    if grid.iter().any(|p| !(p.s >= 0.0)) {
        return Err(EmpiricalError::InvalidArgument("grid needs s >= 0"));
    }
    Ok(())
}

/// Plug-in C-L transform of a fixed sample set: the mean over samples of
/// e^{−s w} 1{j ≤ y} per grid point.
pub fn empirical_cl(
    samples: &[PairSample],
    grid: &[EvalPoint],
) -> Result<EmpiricalCL, EmpiricalError> {
    if samples.is_empty() {
        return Err(EmpiricalError::EmptyInput);
    }
    validate_grid(grid)?;
    let mut accs = vec![MeanAcc::default(); grid.len()];
    for p in samples {
        for (acc, pt) in accs.iter_mut().zip(grid.iter()) {
            acc.push(cl_kernel(p, pt.s, pt.y));
        }
    }
    Ok(EmpiricalCL {
        grid: grid.to_vec(),
        estimates: accs.iter().map(|a| (a.mean(), a.stderr())).collect(),
        sample_count: samples.len() as u64,
    })
}

/// Parallel Monte Carlo C-L transform of the n-fold rescaled sum/max law:
/// m replicates of (n^{−1/β} S(n), n^{−1/α} M(n)), evaluated on `grid`.
pub fn empirical_cl_sum_max(
    params: &SumMaxStableParams,
    n: u64,
    m: u64,
    grid: &[EvalPoint],
    stream: &RandomStream,
) -> Result<EmpiricalCL, EmpiricalError> {
    if m == 0 {
        return Err(EmpiricalError::EmptyInput);
    }
    if n == 0 {
        return Err(EmpiricalError::InvalidArgument("n must be at least 1"));
    }
    validate_grid(grid)?;
    let blocks = block_lengths(m);
    let rows: Vec<Vec<MeanAcc>> = blocks
        .par_iter()
        .map(|(idx, len)| {
            let mut rng = stream.substream(*idx);
            let sampler = SumMaxSampler::new(params, n);
            let mut accs = vec![MeanAcc::default(); grid.len()];
            for _ in 0..*len {
                let p = sampler.sample(&mut rng);
                for (acc, pt) in accs.iter_mut().zip(grid.iter()) {
                    acc.push(cl_kernel(&p, pt.s, pt.y));
                }
            }
            accs
        })
        .collect();
    let accs = tree_reduce_rows(rows);
    Ok(EmpiricalCL {
        grid: grid.to_vec(),
        estimates: accs.iter().map(|a| (a.mean(), a.stderr())).collect(),
        sample_count: m,
    })
}

/// n · P̂((a_n W, b_n J) ∈ (r,∞)×(x,∞)) over m raw pair draws, with its
/// standard error: the Monte Carlo side of the vague convergence
/// n·P_{(a_n W, b_n J)} → η.
pub fn rescaled_tail_estimate(
    params: &SumMaxStableParams,
    n: u64,
    m: u64,
    r: f64,
    x: f64,
    stream: &RandomStream,
) -> Result<(f64, f64), EmpiricalError> {
    if n == 0 || m == 0 {
        return Err(EmpiricalError::InvalidArgument("n and m must be positive"));
    }
    if !(r >= 0.0) || !(x >= 0.0) || r.max(x) <= 0.0 {
        return Err(EmpiricalError::InvalidArgument(
            "rectangle must be bounded away from the origin",
        ));
    }
    let a_n = (n as f64).powf(-1.0 / params.beta());
    let b_n = (n as f64).powf(-1.0 / params.alpha());
    let blocks = block_lengths(m);
    let rows: Vec<Vec<MeanAcc>> = blocks
        .par_iter()
        .map(|(idx, len)| {
            let mut rng = stream.substream(*idx);
            let sampler = PairSampler::new(params);
            let mut acc = MeanAcc::default();
            for _ in 0..*len {
                let p = sampler.sample(&mut rng);
                let hit = a_n * p.w > r && b_n * p.j > x;
                acc.push(hit as u64 as f64);
            }
            vec![acc]
        })
        .collect();
    let acc = tree_reduce_rows(rows)[0];
    Ok((n as f64 * acc.mean(), n as f64 * acc.stderr()))
}

/// One row of the truncated-mean diagnostic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncatedMean {
    pub epsilon: f64,
    pub value: f64,
    pub stderr: f64,
}

/// Monte Carlo estimates of n · E[a_n W · 1{a_n W < ε}] for each ε, the
/// small-jump criterion of the triangular-array convergence theorem. For the
/// exact-stable W used here the limit is K β/(1−β) · ε^{1−β}, independent of
/// n.
pub fn truncated_mean_diagnostic(
    params: &SumMaxStableParams,
    n: u64,
    m: u64,
    epsilons: &[f64],
    stream: &RandomStream,
) -> Result<Vec<TruncatedMean>, EmpiricalError> {
    if n == 0 || m == 0 {
        return Err(EmpiricalError::InvalidArgument("n and m must be positive"));
    }
    if epsilons.is_empty() || epsilons.iter().any(|e| !(*e > 0.0)) {
        return Err(EmpiricalError::InvalidArgument("epsilons must be positive"));
    }
    if epsilons.windows(2).any(|w| w[0] <= w[1]) {
        return Err(EmpiricalError::InvalidArgument(
            "epsilons must be strictly descending",
        ));
    }
    let a_n = (n as f64).powf(-1.0 / params.beta());
    let blocks = block_lengths(m);
    let rows: Vec<Vec<MeanAcc>> = blocks
        .par_iter()
        .map(|(idx, len)| {
            let mut rng = stream.substream(*idx);
            let sampler = PairSampler::new(params);
            let mut accs = vec![MeanAcc::default(); epsilons.len()];
            for _ in 0..*len {
                let w = a_n * sampler.sample(&mut rng).w;
                for (acc, eps) in accs.iter_mut().zip(epsilons.iter()) {
                    acc.push(if w < *eps { w } else { 0.0 });
                }
            }
            accs
        })
        .collect();
    let accs = tree_reduce_rows(rows);
    Ok(epsilons
        .iter()
        .zip(accs.iter())
        .map(|(eps, acc)| TruncatedMean {
            epsilon: *eps,
            value: n as f64 * acc.mean(),
            stderr: n as f64 * acc.stderr(),
        })
        .collect())
}

/// Closed-form limit of the truncated-mean diagnostic for exact stable W.
pub fn truncated_mean_closed_form(params: &SumMaxStableParams, epsilon: f64) -> f64 {
    let beta = params.beta();
    params.k() * beta / (1.0 - beta) * epsilon.powf(1.0 - beta)
}

/// What to run in a convergence report.
#[derive(Debug, Clone)]
pub struct ConvergencePlan {
    pub n_values: Vec<u64>,
    pub m: u64,
    pub grid: Vec<EvalPoint>,
    pub rectangles: Vec<(f64, f64)>,
    pub epsilons: Vec<f64>,
}

/// Gate constants applied by [`convergence_report`]. All are engineering
/// choices recorded in the report so a reader can re-derive every verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct Tolerances {
    /// C-L gate: |empirical − theoretical| ≤ mult·stderr + bias allowance.
    pub cl_stderr_multiplier: f64,
    /// Absolute allowance for the finite-n bias of the max coordinate.
    pub cl_bias_allowance: f64,
    /// Rectangle gate: |estimate − analytic| ≤ mult·stderr + abs allowance.
    pub rect_stderr_multiplier: f64,
    pub rect_abs_allowance: f64,
    /// Truncated-mean gate: |value − closed| ≤ mult·stderr + rel·closed.
    pub trunc_stderr_multiplier: f64,
    pub trunc_rel_allowance: f64,
    /// Trend gate: sup errors may rise between consecutive n by at most
    /// mult·stderr.
    pub trend_stderr_multiplier: f64,
    /// Certification requires every grid stderr at the final n below this.
    pub max_point_stderr: f64,
    /// Certification requires at least this many replicates.
    pub min_replicates: u64,
    pub notes: String,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            cl_stderr_multiplier: 3.0,
            cl_bias_allowance: 0.005,
            rect_stderr_multiplier: 4.0,
            rect_abs_allowance: 0.005,
            trunc_stderr_multiplier: 4.0,
            trunc_rel_allowance: 0.01,
            trend_stderr_multiplier: 2.0,
            max_point_stderr: 0.005,
            min_replicates: 1000,
            notes: "cl_bias_allowance is an engineering constant: the convergence rate of the \
                    max coordinate is not quantified by the theory, so the C-L gate adds a flat \
                    0.005 to the statistical band at the final n."
                .to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClRow {
    pub n: u64,
    pub s: f64,
    pub y: f64,
    pub empirical: f64,
    pub stderr: f64,
    pub theoretical: f64,
    pub abs_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RectRow {
    pub n: u64,
    pub r: f64,
    pub x: f64,
    pub estimate: f64,
    pub stderr: f64,
    pub analytic: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TruncRow {
    pub n: u64,
    pub epsilon: f64,
    pub value: f64,
    pub stderr: f64,
    pub closed_form: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GateResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Full diagnostic report: per-n C-L tables against exp(−Ψ), rectangle
/// masses against the analytic Lévy measure, truncated means against the
/// closed form, and the pass/fail gates.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub params: SumMaxStableParams,
    /// Theoretical target; differs from `params` only in negative-control runs.
    pub target_params: SumMaxStableParams,
    pub seed: u64,
    pub n_values: Vec<u64>,
    pub grid: Vec<EvalPoint>,
    pub cl_table: Vec<ClRow>,
    /// Per-n supremum over the grid of |empirical − theoretical|.
    pub sup_errors: Vec<f64>,
    pub rect_table: Vec<RectRow>,
    pub truncated_means: Vec<TruncRow>,
    pub tolerances: Tolerances,
    pub gates: Vec<GateResult>,
    pub passed: bool,
}

/// Convergence report sampling from and comparing against `params`.
pub fn convergence_report(
    params: &SumMaxStableParams,
    plan: &ConvergencePlan,
    seed: u64,
) -> Result<ConvergenceReport, EmpiricalError> {
    convergence_report_with_target(params, params, plan, seed)
}

/// Convergence report sampling from `params` but comparing against
/// `target_params`; a mismatched target is the negative control and must
/// fail the gates.
pub fn convergence_report_with_target(
    params: &SumMaxStableParams,
    target_params: &SumMaxStableParams,
    plan: &ConvergencePlan,
    seed: u64,
) -> Result<ConvergenceReport, EmpiricalError> {
    if plan.n_values.is_empty() || plan.n_values.contains(&0) {
        return Err(EmpiricalError::InvalidArgument("n_values must be positive"));
    }
    if plan.m == 0 {
        return Err(EmpiricalError::InvalidArgument("m must be positive"));
    }
    if plan
        .rectangles
        .iter()
        .any(|(r, x)| !(*r >= 0.0) || !(*x >= 0.0) || r.max(*x) <= 0.0)
    {
        return Err(EmpiricalError::InvalidArgument(
            "rectangles must be bounded away from the origin",
        ));
    }
    validate_grid(&plan.grid)?;
    let root = RandomStream::new(seed, 0);

    let theoretical: Vec<f64> = plan
        .grid
        .iter()
        .map(|p| cl_transform(target_params, p))
        .collect::<Result<_, _>>()?;

    let mut cl_table = Vec::new();
    let mut sup_errors = Vec::new();
    let mut rect_table = Vec::new();
    let mut truncated_means = Vec::new();
    for (i, &n) in plan.n_values.iter().enumerate() {
        let job = 3 * i as u64;
        let cl = empirical_cl_sum_max(params, n, plan.m, &plan.grid, &root.substream(job))?;
        let mut sup = 0.0f64;
        for (pt, (est, theo)) in plan
            .grid
            .iter()
            .zip(cl.estimates.iter().zip(theoretical.iter()))
        {
            let abs_error = (est.0 - theo).abs();
            sup = sup.max(abs_error);
            cl_table.push(ClRow {
                n,
                s: pt.s,
                y: pt.y,
                empirical: est.0,
                stderr: est.1,
                theoretical: *theo,
                abs_error,
            });
        }
        sup_errors.push(sup);

        let rect_stream = root.substream(job + 1);
        for (ri, &(r, x)) in plan.rectangles.iter().enumerate() {
            let (estimate, stderr) =
                rescaled_tail_estimate(params, n, plan.m, r, x, &rect_stream.substream(ri as u64))?;
            rect_table.push(RectRow {
                n,
                r,
                x,
                estimate,
                stderr,
                analytic: eta_upper_mass(target_params, r, x)?,
            });
        }

        if !plan.epsilons.is_empty() {
            let rows =
                truncated_mean_diagnostic(params, n, plan.m, &plan.epsilons, &root.substream(job + 2))?;
            for row in rows {
                truncated_means.push(TruncRow {
                    n,
                    epsilon: row.epsilon,
                    value: row.value,
                    stderr: row.stderr,
                    closed_form: truncated_mean_closed_form(target_params, row.epsilon),
                });
            }
        }
    }

    let tolerances = Tolerances::default();
    let gates = evaluate_gates(
        plan,
        &cl_table,
        &sup_errors,
        &rect_table,
        &truncated_means,
        &tolerances,
    );
    let passed = gates.iter().all(|g| g.passed);
    Ok(ConvergenceReport {
        params: params.clone(),
        target_params: target_params.clone(),
        seed,
        n_values: plan.n_values.clone(),
        grid: plan.grid.clone(),
        cl_table,
        sup_errors,
        rect_table,
        truncated_means,
        tolerances,
        gates,
        passed,
    })
}

fn evaluate_gates(
    plan: &ConvergencePlan,
    cl_table: &[ClRow],
    sup_errors: &[f64],
    rect_table: &[RectRow],
    truncated_means: &[TruncRow],
    tol: &Tolerances,
) -> Vec<GateResult> {
    let mut gates = Vec::new();
    let n_final = *plan.n_values.last().expect("nonempty n_values");

    let replicates_ok = plan.m >= tol.min_replicates;
    gates.push(GateResult {
        name: "replicates".into(),
        passed: replicates_ok,
        detail: if replicates_ok {
            format!("m = {}", plan.m)
        } else {
            format!(
                "m = {} below min_replicates = {}; standard errors unreliable",
                plan.m, tol.min_replicates
            )
        },
    });

    let final_rows: Vec<&ClRow> = cl_table.iter().filter(|r| r.n == n_final).collect();
    let max_se = final_rows.iter().map(|r| r.stderr).fold(0.0, f64::max);
    gates.push(GateResult {
        name: "stderr_cap".into(),
        passed: max_se <= tol.max_point_stderr,
        detail: format!(
            "max stderr at n = {n_final}: {} (cap {})",
            crate::format_float17(max_se),
            crate::format_float17(tol.max_point_stderr)
        ),
    });

    let mut cl_ok = true;
    let mut worst = String::new();
    let mut worst_excess = f64::NEG_INFINITY;
    for r in &final_rows {
        let bound = tol.cl_stderr_multiplier * r.stderr + tol.cl_bias_allowance;
        let excess = r.abs_error - bound;
        if excess > worst_excess {
            worst_excess = excess;
            worst = format!(
                "(s = {}, y = {}): |{} - {}| vs bound {}",
                crate::format_float17(r.s),
                crate::format_float17(r.y),
                crate::format_float17(r.empirical),
                crate::format_float17(r.theoretical),
                crate::format_float17(bound)
            );
        }
        if excess > 0.0 {
            cl_ok = false;
        }
    }
    gates.push(GateResult {
        name: "cl".into(),
        passed: cl_ok,
        detail: format!("worst grid point at n = {n_final}: {worst}"),
    });

    let mut trend_ok = true;
    let mut trend_detail = String::from("single n value; trivially satisfied");
    if sup_errors.len() >= 2 {
        trend_detail = String::new();
        for i in 0..sup_errors.len() - 1 {
            let n_hi = plan.n_values[i + 1];
            let slack_se = cl_table
                .iter()
                .filter(|r| r.n == n_hi || r.n == plan.n_values[i])
                .map(|r| r.stderr)
                .fold(0.0, f64::max);
            if sup_errors[i + 1] > sup_errors[i] + tol.trend_stderr_multiplier * slack_se {
                trend_ok = false;
            }
        }
        trend_detail.push_str(&format!(
            "sup errors: [{}]",
            sup_errors
                .iter()
                .map(|e| crate::format_float17(*e))
                .collect::<Vec<_>>()
                .join(", ")
        ));
    }
    gates.push(GateResult {
        name: "cl_trend".into(),
        passed: trend_ok,
        detail: trend_detail,
    });

    if !rect_table.is_empty() {
        let mut rect_ok = true;
        let mut detail = String::new();
        for r in rect_table.iter().filter(|r| r.n == n_final) {
            let bound = tol.rect_stderr_multiplier * r.stderr + tol.rect_abs_allowance;
            if (r.estimate - r.analytic).abs() > bound {
                rect_ok = false;
                detail = format!(
                    "(r = {}, x = {}): {} vs analytic {}",
                    crate::format_float17(r.r),
                    crate::format_float17(r.x),
                    crate::format_float17(r.estimate),
                    crate::format_float17(r.analytic)
                );
            }
        }
        if rect_ok {
            detail = format!("all rectangles within band at n = {n_final}");
        }
        gates.push(GateResult {
            name: "rect".into(),
            passed: rect_ok,
            detail,
        });
    }

    if !truncated_means.is_empty() {
        let mut trunc_ok = true;
        let mut detail = String::new();
        for r in truncated_means.iter().filter(|r| r.n == n_final) {
            let bound =
                tol.trunc_stderr_multiplier * r.stderr + tol.trunc_rel_allowance * r.closed_form;
            if (r.value - r.closed_form).abs() > bound {
                trunc_ok = false;
                detail = format!(
                    "epsilon = {}: {} vs closed form {}",
                    crate::format_float17(r.epsilon),
                    crate::format_float17(r.value),
                    crate::format_float17(r.closed_form)
                );
            }
        }
        if trunc_ok {
            detail = format!("all epsilons within band at n = {n_final}");
        }
        gates.push(GateResult {
            name: "truncated_mean".into(),
            passed: trunc_ok,
            detail,
        });
    }

    gates
}

fn json_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out
}

fn f(x: f64) -> String {
    crate::format_float17(x)
}

// Grid y values may be the +inf sentinel, which JSON numbers cannot carry;
// those are emitted as the string "inf", matching the CLI token.
fn json_grid_value(x: f64) -> String {
    if x.is_finite() {
        f(x)
    } else {
        format!("\"{}\"", crate::format_float17(x))
    }
}

fn params_json(p: &SumMaxStableParams) -> String {
    use crate::measures::MixingView;
    let omega = match p.omega().view() {
        MixingView::PointMass(u) => format!("{{\"kind\":\"point_mass\",\"u\":{}}}", f(u)),
        MixingView::Discrete(atoms) => {
            let items: Vec<String> = atoms
                .iter()
                .map(|a| format!("{{\"u\":{},\"w\":{}}}", f(a.u), f(a.w)))
                .collect();
            format!("{{\"kind\":\"discrete\",\"atoms\":[{}]}}", items.join(","))
        }
        MixingView::Frechet { gamma, scale } => format!(
            "{{\"kind\":\"frechet\",\"gamma\":{},\"scale\":{}}}",
            f(gamma),
            f(scale)
        ),
        MixingView::StdNormal => "{\"kind\":\"std_normal\"}".to_string(),
    };
    format!(
        "{{\"beta\":{},\"alpha\":{},\"C\":{},\"K\":{},\"omega\":{}}}",
        f(p.beta()),
        f(p.alpha()),
        f(p.c()),
        f(p.k()),
        omega
    )
}

impl ConvergenceReport {
    /// Deterministic JSON rendering; floats carry 17 significant digits and
    /// field order is fixed, so byte equality certifies reproducibility.
    pub fn to_json(&self) -> String {
        let mut out = String::with_capacity(4096);
        out.push_str("{\"params\":");
        out.push_str(&params_json(&self.params));
        out.push_str(",\"target_params\":");
        out.push_str(&params_json(&self.target_params));
        out.push_str(&format!(",\"seed\":{}", self.seed));
        out.push_str(",\"n_values\":[");
        out.push_str(
            &self
                .n_values
                .iter()
                .map(|n| n.to_string())
                .collect::<Vec<_>>()
                .join(","),
        );
        out.push_str("],\"grid\":[");
        out.push_str(
            &self
                .grid
                .iter()
                .map(|p| format!("{{\"s\":{},\"y\":{}}}", f(p.s), json_grid_value(p.y)))
                .collect::<Vec<_>>()
                .join(","),
        );
        out.push_str("],\"cl_table\":[");
        out.push_str(
            &self
                .cl_table
                .iter()
                .map(|r| {
                    format!(
                        "{{\"n\":{},\"s\":{},\"y\":{},\"empirical\":{},\"stderr\":{},\"theoretical\":{},\"abs_error\":{}}}",
                        r.n,
                        f(r.s),
                        json_grid_value(r.y),
                        f(r.empirical),
                        f(r.stderr),
                        f(r.theoretical),
                        f(r.abs_error)
                    )
                })
                .collect::<Vec<_>>()
                .join(","),
        );
        out.push_str("],\"sup_errors\":[");
        out.push_str(
            &self
                .sup_errors
                .iter()
                .map(|e| f(*e))
                .collect::<Vec<_>>()
                .join(","),
        );
        out.push_str("],\"rect_table\":[");
        out.push_str(
            &self
                .rect_table
                .iter()
                .map(|r| {
                    format!(
                        "{{\"n\":{},\"r\":{},\"x\":{},\"estimate\":{},\"stderr\":{},\"analytic\":{}}}",
                        r.n,
                        f(r.r),
                        f(r.x),
                        f(r.estimate),
                        f(r.stderr),
                        f(r.analytic)
                    )
                })
                .collect::<Vec<_>>()
                .join(","),
        );
        out.push_str("],\"truncated_means\":[");
        out.push_str(
            &self
                .truncated_means
                .iter()
                .map(|r| {
                    format!(
                        "{{\"n\":{},\"epsilon\":{},\"value\":{},\"stderr\":{},\"closed_form\":{}}}",
                        r.n,
                        f(r.epsilon),
                        f(r.value),
                        f(r.stderr),
                        f(r.closed_form)
                    )
                })
                .collect::<Vec<_>>()
                .join(","),
        );
        out.push_str("],\"tolerances\":{");
        let t = &self.tolerances;
        out.push_str(&format!(
            "\"cl_stderr_multiplier\":{},\"cl_bias_allowance\":{},\"rect_stderr_multiplier\":{},\"rect_abs_allowance\":{},\"trunc_stderr_multiplier\":{},\"trunc_rel_allowance\":{},\"trend_stderr_multiplier\":{},\"max_point_stderr\":{},\"min_replicates\":{},\"notes\":\"{}\"",
            f(t.cl_stderr_multiplier),
            f(t.cl_bias_allowance),
            f(t.rect_stderr_multiplier),
            f(t.rect_abs_allowance),
            f(t.trunc_stderr_multiplier),
            f(t.trunc_rel_allowance),
            f(t.trend_stderr_multiplier),
            f(t.max_point_stderr),
            t.min_replicates,
            json_escape(&t.notes)
        ));
        out.push_str("},\"gates\":[");
        out.push_str(
            &self
                .gates
                .iter()
                .map(|g| {
                    format!(
                        "{{\"name\":\"{}\",\"passed\":{},\"detail\":\"{}\"}}",
                        json_escape(&g.name),
                        g.passed,
                        json_escape(&g.detail)
                    )
                })
                .collect::<Vec<_>>()
                .join(","),
        );
        out.push_str(&format!("],\"passed\":{}}}", self.passed));
        out.push('\n');
        out
    }

    /// CSV of the C-L table: `n,s,y,empirical,stderr,theoretical,abs_error`.
    pub fn cl_table_csv(&self) -> String {
        let mut out = String::from("n,s,y,empirical,stderr,theoretical,abs_error\n");
        for r in &self.cl_table {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                r.n,
                f(r.s),
                f(r.y),
                f(r.empirical),
                f(r.stderr),
                f(r.theoretical),
                f(r.abs_error)
            ));
        }
        out
    }

    /// CSV of the rectangle table: `n,r,x,estimate,stderr,analytic`.
    pub fn rect_table_csv(&self) -> String {
        let mut out = String::from("n,r,x,estimate,stderr,analytic\n");
        for r in &self.rect_table {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.n,
                f(r.r),
                f(r.x),
                f(r.estimate),
                f(r.stderr),
                f(r.analytic)
            ));
        }
        out
    }

    /// CSV of the truncated means: `n,epsilon,value,stderr,closed_form`.
    pub fn truncated_means_csv(&self) -> String {
        let mut out = String::from("n,epsilon,value,stderr,closed_form\n");
        for r in &self.truncated_means {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                r.n,
                f(r.epsilon),
                f(r.value),
                f(r.stderr),
                f(r.closed_form)
            ));
        }
        out
    }
}
