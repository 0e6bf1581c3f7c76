//! Command dispatch.

use std::process::ExitCode;
use std::str::FromStr;

use serde_json::{json, Value};

use qt_core::bigqjacobi::{self, Quadruple};
use qt_core::degenerations::{self, SParams, ZwParams};
use qt_core::ensembles::{self, MeasureSpec, ParameterSet, ProbeStatistic, Side};
use qt_core::polyfamilies;
use qt_core::scalar::Tolerance;
use qt_core::{Partition, QtError, Result, Scalar};

use crate::report::{emit, sequence_csv, Report, ReportBuilder};
use crate::{
    Cli, CoeffArgs, CoeffKind, Command, DegenerateCmd, EnsembleArgs, EnsembleCmd, OrthArgs,
    PolyArgs, PolyFamily, ProbeArgs, ProbeStat, SampleArgs, StabilityArgs, VerifyCmd, Z1Args,
};

pub fn exit_code_for(e: &QtError) -> u8 {
    match e {
        QtError::Truncation { .. } => 3,
        _ => 4,
    }
}

fn precision_bits() -> usize {
    std::env::var("QT_PRECISION_BITS")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(qt_core::hp::DEFAULT_PRECISION_BITS)
}

fn parse_scalar(s: &str) -> Result<Scalar> {
    let v = Scalar::from_str(s)?;
    Ok(match v {
        Scalar::Float(h) => Scalar::Float(qt_core::hp::HpComplex::from_f64(
            h.to_c64().re,
            h.to_c64().im,
            precision_bits(),
        )),
        exact => exact,
    })
}

fn parse_partition(s: &str) -> Result<Partition> {
    if s.trim().is_empty() {
        return Ok(Partition::empty());
    }
    let parts: Vec<u32> = s
        .split(',')
        .map(|p| p.trim().parse().map_err(|_| QtError::Config(format!("bad partition {s:?}"))))
        .collect::<Result<Vec<_>>>()?;
    Partition::new(parts)
}

fn parse_i64_list(s: &str) -> Result<Vec<i64>> {
    s.split(',')
        .map(|p| p.trim().parse().map_err(|_| QtError::Config(format!("bad integer list {s:?}"))))
        .collect()
}

fn parse_f64_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|p| p.trim().parse().map_err(|_| QtError::Config(format!("bad number list {s:?}"))))
        .collect()
}

fn load_json<T: serde::de::DeserializeOwned>(path: &std::path::Path) -> Result<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| QtError::Config(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| QtError::Config(format!("{}: {e}", path.display())))
}

fn load_quad(path: &std::path::Path) -> Result<Quadruple> {
    let q: Quadruple = load_json(path)?;
    q.validate()?;
    Ok(q)
}

fn tolerance(cli: &Cli, default_tail: f64, default_match: f64) -> Result<Tolerance> {
    Tolerance::new(
        cli.tail_bound.unwrap_or(default_tail),
        cli.match_tol.unwrap_or(default_match),
    )
}

pub fn dispatch(cli: Cli) -> Result<ExitCode> {
    match &cli.command {
        Command::Poly(a) => poly(&cli, a),
        Command::Coeff(a) => coeff(&cli, a),
        Command::Ensemble(cmd) => match cmd {
            EnsembleCmd::Weights(a) => ensemble_weights(&cli, a),
            EnsembleCmd::Partition(a) => ensemble_partition(&cli, a),
            EnsembleCmd::Orthogonality(a) => orthogonality(&cli, a, "ensemble orthogonality"),
            EnsembleCmd::Sample(a) => sample(&cli, a),
            EnsembleCmd::Probe(a) => probe(&cli, a),
        },
        Command::Verify(cmd) => match cmd {
            VerifyCmd::Stability(a) => verify_stability(&cli, a),
            VerifyCmd::Orthogonality(a) => orthogonality(&cli, a, "verify orthogonality"),
            VerifyCmd::Z1(a) => verify_z1(&cli, a),
            VerifyCmd::Symmetry(a) => verify_symmetry(&cli, a),
        },
        Command::Degenerate(cmd) => match cmd {
            DegenerateCmd::DiscreteCoherency(a) => discrete_coherency(&cli, a),
            DegenerateCmd::LinkRows(a) => link_rows(&cli, a),
            DegenerateCmd::DaKernel(a) => da_kernel(&cli, a),
            DegenerateCmd::LimitDiscrete(a) => limit_discrete(&cli, a),
            DegenerateCmd::LimitContinuous(a) => limit_continuous(&cli, a),
        },
        Command::Sample(a) => sample(&cli, a),
        Command::Probe(a) => probe(&cli, a),
    }
}

fn pass_code(pass: bool) -> ExitCode {
    if pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    }
}

fn poly(cli: &Cli, a: &PolyArgs) -> Result<ExitCode> {
    let nu = parse_partition(&a.nu)?;
    let q = parse_scalar(&a.q)?;
    let t = parse_scalar(&a.t)?;
    let b = ReportBuilder::new(
        "poly",
        json!({"nu": nu.parts(), "N": a.n, "q": a.q, "t": a.t, "oracle": a.oracle}),
    );
    let (poly, oracle_agrees) = match a.family {
        PolyFamily::Macdonald => {
            let p = polyfamilies::macdonald(&nu, a.n, &q, &t)?;
            let agrees = if a.oracle {
                Some(p == polyfamilies::macdonald_gram_schmidt_oracle(&nu, a.n, &q, &t)?)
            } else {
                None
            };
            (p, agrees)
        }
        PolyFamily::Interpolation => (polyfamilies::interpolation(&nu, a.n, &q, &t)?, None),
        PolyFamily::Schur => (polyfamilies::schur_jacobi_trudi(&nu, a.n)?, None),
        PolyFamily::Bigqjacobi => {
            let quad_path = a
                .quad
                .as_ref()
                .ok_or_else(|| QtError::Config("bigqjacobi needs --quad".into()))?;
            let quad = load_quad(quad_path)?;
            let p = bigqjacobi::big_q_jacobi(&nu, a.n, &q, &t, &quad)?;
            let agrees = if a.oracle {
                Some(p == bigqjacobi::big_q_jacobi_interpolation_route(&nu, a.n, &q, &t, &quad)?)
            } else {
                None
            };
            (p, agrees)
        }
    };
    let pass = oracle_agrees.unwrap_or(true);
    let report = b.finish(
        json!({"polynomial": poly, "oracle_agrees": oracle_agrees}),
        pass,
    );
    emit(cli, &report, None)?;
    Ok(pass_code(pass))
}

fn coeff(cli: &Cli, a: &CoeffArgs) -> Result<ExitCode> {
    let lam = parse_partition(&a.lambda)?;
    let q = parse_scalar(&a.q)?;
    let t = parse_scalar(&a.t)?;
    let inner: Vec<Partition> = match &a.nu {
        Some(s) => vec![parse_partition(s)?],
        None => lam.subpartitions(),
    };
    let b = ReportBuilder::new("coeff", json!({"lambda": lam.parts(), "q": a.q, "t": a.t}));
    let mut rows = Vec::new();
    for nu in &inner {
        let value = match a.kind {
            CoeffKind::Sigma => bigqjacobi::sigma(&lam, nu, &q, &t)?,
            CoeffKind::Binomial => {
                let s = parse_scalar(a.s.as_deref().unwrap_or("3/5"))?;
                bigqjacobi::binomial_qts(&lam, nu, &q, &t, &s)?
            }
            CoeffKind::Rho | CoeffKind::Pi => {
                let quad_path = a
                    .quad
                    .as_ref()
                    .ok_or_else(|| QtError::Config("rho/pi need --quad".into()))?;
                let quad = load_quad(quad_path)?;
                match a.kind {
                    CoeffKind::Rho => bigqjacobi::rho(&lam, nu, &q, &t, &quad)?,
                    _ => bigqjacobi::pi(&lam, nu, &q, &t, &quad)?,
                }
            }
        };
        rows.push(json!({"lambda": lam.parts(), "nu": nu.parts(), "pi": value}));
    }
    let report = b.finish(json!({"rows": rows}), true);
    emit(cli, &report, None)?;
    Ok(ExitCode::SUCCESS)
}

fn measure_spec(cli: &Cli, a: &EnsembleArgs) -> Result<(MeasureSpec, Quadruple)> {
    let qv = parse_scalar(&a.q)?.to_f64();
    let params = ParameterSet::new(qv, a.tau, a.zeta_plus, a.zeta_minus)?;
    let quad = load_quad(&a.quad)?;
    let tol = tolerance(cli, 1e-10, 1e-8)?;
    let mut spec = MeasureSpec::new(params, &quad, a.n, tol)?;
    spec.window_margin = a.window;
    Ok((spec, quad))
}

fn ensemble_weights(cli: &Cli, a: &EnsembleArgs) -> Result<ExitCode> {
    let (spec, _) = measure_spec(cli, a)?;
    let e = ensembles::enumerate_configurations(&spec)?;
    let (aa, bb, cc, dd) = spec.abcd();
    let mut rows = Vec::new();
    let mut csv_rows = Vec::new();
    for n in e.lattice.n_min..=e.lattice.n_max {
        for side in [Side::Plus, Side::Minus] {
            let x = e.lattice.point(side, n);
            let w = ensembles::weight_w(x, spec.params.q, aa, bb, cc, dd)?;
            rows.push(json!({"side": side, "n": n, "x": x, "w": w}));
            csv_rows.push(vec![if side == Side::Plus { 1.0 } else { -1.0 }, n as f64, x, w]);
        }
    }
    let b = ReportBuilder::new("ensemble weights", json!({"N": a.n, "q": a.q, "tau": a.tau}));
    let report = b.finish(
        json!({"lattice": e.lattice, "weights": rows, "partition_function": e.partition_function}),
        true,
    );
    emit(cli, &report, Some(sequence_csv(&["side", "n", "x", "w"], &csv_rows)))?;
    Ok(ExitCode::SUCCESS)
}

fn ensemble_partition(cli: &Cli, a: &EnsembleArgs) -> Result<ExitCode> {
    let (spec, _) = measure_spec(cli, a)?;
    let b = ReportBuilder::new(
        "ensemble partition",
        json!({"N": a.n, "q": a.q, "tau": a.tau, "zeta_plus": a.zeta_plus, "zeta_minus": a.zeta_minus}),
    );
    let z = ensembles::partition_function(&spec)?;
    let pass = z.tail_rel <= spec.tol.tail_bound;
    let report = b.finish(json!(z), pass);
    emit(cli, &report, None)?;
    Ok(pass_code(pass))
}

fn orthogonality(cli: &Cli, a: &OrthArgs, name: &str) -> Result<ExitCode> {
    let (spec, quad) = measure_spec(cli, &a.ensemble)?;
    let q = parse_scalar(&a.ensemble.q)?;
    let t = parse_scalar(&a.t)?;
    if !q.is_exact() || !t.is_exact() {
        return Err(QtError::Config("orthogonality needs exact q and t (fractions)".into()));
    }
    let b = ReportBuilder::new(name, json!({"N": a.ensemble.n, "degree_cap": a.degree_cap}));
    let r = ensembles::verify_orthogonality(&spec, &quad, &q, &t, a.degree_cap)?;
    let pass = r.max_normalized_offdiag < spec.tol.match_tol
        && r.diagonals.iter().all(|(_, v)| *v > 0.0);
    let report = b.finish(json!(r), pass);
    emit(cli, &report, None)?;
    Ok(pass_code(pass))
}

fn sample(cli: &Cli, a: &SampleArgs) -> Result<ExitCode> {
    let (spec, _) = measure_spec(cli, &a.ensemble)?;
    let b = ReportBuilder::new("sample", json!({"N": a.ensemble.n, "seed": a.seed, "count": a.count}));
    let samples = ensembles::sample(&spec, a.seed, a.count)?;
    let csv_rows: Vec<Vec<f64>> = samples.iter().map(|c| c.values(&spec.params)).collect();
    let header: Vec<String> = (1..=a.ensemble.n).map(|i| format!("x{i}")).collect();
    let header_refs: Vec<&str> = header.iter().map(|s| s.as_str()).collect();
    let report = b.finish(json!({"samples": samples}), true);
    emit(cli, &report, Some(sequence_csv(&header_refs, &csv_rows)))?;
    Ok(ExitCode::SUCCESS)
}

fn probe(cli: &Cli, a: &ProbeArgs) -> Result<ExitCode> {
    let (spec, _) = measure_spec(cli, &a.ensemble)?;
    let (lo, hi) = a
        .n_range
        .split_once("..")
        .ok_or_else(|| QtError::Config("n-range must look like 2..8".into()))?;
    let lo: usize = lo.parse().map_err(|_| QtError::Config("bad n-range".into()))?;
    let hi: usize = hi.parse().map_err(|_| QtError::Config("bad n-range".into()))?;
    if lo >= hi {
        return Err(QtError::Config("n-range must be increasing".into()));
    }
    let ns: Vec<usize> = (lo..=hi).collect();
    let stat = match a.statistic {
        ProbeStat::Largest => ProbeStatistic::LargestParticle,
        ProbeStat::Outside => ProbeStatistic::OutsideEpsilon(a.epsilon),
    };
    let b = ReportBuilder::new("probe", json!({"n_range": a.n_range, "statistic": stat}));
    let r = ensembles::convergence_probe(&spec, &ns, stat)?;
    // the last TV distance should be the minimum of the sweep
    let pass = r
        .tv
        .last()
        .map(|last| r.tv.iter().all(|v| v >= last))
        .unwrap_or(false);
    let csv_rows: Vec<Vec<f64>> = r
        .ns
        .windows(2)
        .zip(&r.tv)
        .map(|(w, tv)| vec![w[1] as f64, *tv])
        .collect();
    let report = b.finish(json!(r), pass);
    emit(cli, &report, Some(sequence_csv(&["N", "tv_distance"], &csv_rows)))?;
    Ok(pass_code(pass))
}

fn verify_stability(cli: &Cli, a: &StabilityArgs) -> Result<ExitCode> {
    let q = parse_scalar(&a.q)?;
    let t = parse_scalar(&a.t)?;
    let quad = load_quad(&a.quad)?;
    let b = ReportBuilder::new("verify stability", json!({"max_size": a.max_size, "q": a.q, "t": a.t}));
    let mut cases = Vec::new();
    let mut pass = true;
    for lam in Partition::all_up_to(a.max_size, None) {
        let n = lam.length().max(1);
        let ok = bigqjacobi::stability_check(&lam, n, &q, &t, &quad)?;
        pass &= ok;
        cases.push(json!({"lambda": lam.parts(), "N": [n, n + 1], "exact_match": ok}));
    }
    let report = b.finish(json!({"cases": cases}), pass);
    emit(cli, &report, None)?;
    Ok(pass_code(pass))
}

fn verify_symmetry(cli: &Cli, a: &StabilityArgs) -> Result<ExitCode> {
    let q = parse_scalar(&a.q)?;
    let t = parse_scalar(&a.t)?;
    let quad = load_quad(&a.quad)?;
    let ab = quad.swapped_alpha_beta();
    let gd = quad.swapped_gamma_delta();
    let tol = tolerance(cli, 1e-18, 1e-10)?;
    let b = ReportBuilder::new("verify symmetry", json!({"max_size": a.max_size}));
    let mut worst = 0.0f64;
    let mut cases = Vec::new();
    for lam in Partition::all_up_to(a.max_size, None) {
        for nu in lam.subpartitions() {
            let base = bigqjacobi::pi(&lam, &nu, &q, &t, &quad)?;
            let d_ab = (&base - &bigqjacobi::pi(&lam, &nu, &q, &t, &ab)?).abs_f64();
            let d_gd = (&base - &bigqjacobi::pi(&lam, &nu, &q, &t, &gd)?).abs_f64();
            worst = worst.max(d_ab).max(d_gd);
            cases.push(json!({
                "lambda": lam.parts(), "nu": nu.parts(),
                "alpha_beta_swap_diff": d_ab, "gamma_delta_swap_diff": d_gd,
            }));
        }
    }
    let pass = worst <= tol.match_tol;
    let report = b.finish(json!({"max_abs_difference": worst, "cases": cases}), pass);
    emit(cli, &report, None)?;
    Ok(pass_code(pass))
}

#[derive(serde::Deserialize)]
struct Z1Params {
    q: Scalar,
    a: Scalar,
    b: Scalar,
    c: Scalar,
    d: Scalar,
    zeta_plus: Scalar,
    zeta_minus: Scalar,
    tau: f64,
    series: bigqjacobi::Series,
}

fn verify_z1(cli: &Cli, a: &Z1Args) -> Result<ExitCode> {
    let p: Z1Params = load_json(&a.params)?;
    let tol = tolerance(cli, 1e-18, 1e-10)?;
    let b = ReportBuilder::new("verify z1", json!({"params": a.params.display().to_string()}));
    let closed = qt_core::qspecial::z1_closed_form(
        &p.q, &p.a, &p.b, &p.c, &p.d, &p.zeta_plus, &p.zeta_minus, &tol,
    )?;
    // direct summation through the N = 1 measure layer
    let params = ParameterSet::new(p.q.to_f64(), p.tau, p.zeta_plus.to_f64(), p.zeta_minus.to_f64())?;
    let quad = Quadruple::new(p.a.clone(), p.b.clone(), p.c.clone(), p.d.clone(), p.series)?;
    let spec = MeasureSpec::new(params, &quad, 1, Tolerance::new(tol.tail_bound.max(1e-12), tol.match_tol)?)?;
    let direct = ensembles::partition_function(&spec)?;
    let closed_val = closed.value.to_c64();
    let diff = (closed_val.re - direct.value).abs();
    let pass = diff <= tol.match_tol * closed_val.re.abs().max(1.0) && closed_val.im.abs() < 1e-9;
    let report = b.finish(
        json!({
            "closed_form": closed_val.re,
            "direct_sum": direct.value,
            "abs_difference": diff,
            "closed_form_tail": closed.tail,
            "summation": direct,
        }),
        pass,
    );
    emit(cli, &report, None)?;
    Ok(pass_code(pass))
}

fn discrete_coherency(cli: &Cli, a: &crate::DiscreteCoherencyArgs) -> Result<ExitCode> {
    let p: ZwParams = load_json(&a.params)?;
    let p = ZwParams::new(p.tau, p.z, p.w)?;
    let b = ReportBuilder::new(
        "degenerate discrete-coherency",
        json!({"N": a.n, "window": a.window, "tau": p.tau}),
    );
    let r = degenerations::verify_discrete_coherency(&p, a.n, a.window)?;
    let pass = r.max_residual < a.threshold && r.negative_control_residual > 1e-2;
    let report = b.finish(json!(r), pass);
    emit(cli, &report, None)?;
    Ok(pass_code(pass))
}

fn link_rows(cli: &Cli, a: &crate::LinkRowsArgs) -> Result<ExitCode> {
    let nu = parse_i64_list(&a.nu)?;
    let b = ReportBuilder::new("degenerate link-rows", json!({"nu": nu, "tau": a.tau}));
    let mus = degenerations::interlacing_signatures(&nu);
    let mut rows = Vec::new();
    let mut total = 0.0;
    for mu in &mus {
        let l = degenerations::discrete_link(&nu, mu, a.tau)?;
        total += l;
        rows.push(json!({"mu": mu, "link": l}));
    }
    let pass = (total - 1.0).abs() < 1e-12;
    let report = b.finish(json!({"row_sum": total, "rows": rows}), pass);
    emit(cli, &report, None)?;
    Ok(pass_code(pass))
}

fn da_kernel(cli: &Cli, a: &crate::DaKernelArgs) -> Result<ExitCode> {
    let u = parse_f64_list(&a.u)?;
    let b = ReportBuilder::new("degenerate da-kernel", json!({"u": u, "tau": a.tau, "nodes": a.nodes}));
    let v = degenerations::da_kernel_total_integral(&u, a.tau, a.nodes)?;
    let pass = (v - 1.0).abs() < 1e-6;
    let report = b.finish(json!({"total_integral": v, "deviation": (v - 1.0).abs()}), pass);
    emit(cli, &report, None)?;
    Ok(pass_code(pass))
}

fn limit_discrete(cli: &Cli, a: &crate::LimitDiscreteArgs) -> Result<ExitCode> {
    let p: ZwParams = load_json(&a.params)?;
    let p = ZwParams::new(p.tau, p.z, p.w)?;
    let nu = parse_i64_list(&a.nu)?;
    let qs = parse_f64_list(&a.qs)?;
    let b = ReportBuilder::new(
        "degenerate limit-discrete",
        json!({"nu": nu, "N": a.n, "qs": qs, "tau": p.tau}),
    );
    let r = degenerations::check_degeneration_discrete(&qs, &p, &nu, a.n, a.window)?;
    let pass = r.errors.windows(2).all(|w| w[1] < w[0]);
    let csv_rows: Vec<Vec<f64>> = r.qs.iter().zip(&r.errors).map(|(q, e)| vec![*q, *e]).collect();
    let report = b.finish(json!(r), pass);
    emit(cli, &report, Some(sequence_csv(&["q", "abs_error"], &csv_rows)))?;
    Ok(pass_code(pass))
}

fn limit_continuous(cli: &Cli, a: &crate::LimitContinuousArgs) -> Result<ExitCode> {
    let p: SParams = load_json(&a.params)?;
    let p = SParams::new(p.s, p.tau)?;
    let qs = parse_f64_list(&a.qs)?;
    let grid = parse_f64_list(&a.grid)?;
    let b = ReportBuilder::new(
        "degenerate limit-continuous",
        json!({"s": [p.s.re, p.s.im], "tau": p.tau, "qs": qs}),
    );
    let r = degenerations::check_degeneration_continuous(&qs, &p, &grid, a.nodes)?;
    // the scalar limit hook: (v q^2;q)_∞/(v;q)_∞ -> 9/4 at v = 1/3
    let scalar: Vec<Value> = [0.9, 0.99, 0.999]
        .iter()
        .map(|&q| {
            let v = degenerations::scalar_limit_ratio(1.0 / 3.0, 2.0, 0.0, q);
            json!({"q": q, "ratio": v, "abs_error": (v - 2.25).abs()})
        })
        .collect();
    let pass = r.errors.windows(2).all(|w| w[1] < w[0]);
    let csv_rows: Vec<Vec<f64>> = r.qs.iter().zip(&r.errors).map(|(q, e)| vec![*q, *e]).collect();
    let report = b.finish(json!({"cdf_sup_distance": r, "scalar_limit": scalar}), pass);
    emit(cli, &report, Some(sequence_csv(&["q", "abs_error"], &csv_rows)))?;
    Ok(pass_code(pass))
}

