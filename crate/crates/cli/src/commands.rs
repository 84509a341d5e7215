use std::path::PathBuf;

use circle_rearrange_core::bohr::{chunk_family, stability_certificate, BohrSet, StabilityCertificate};
use circle_rearrange_core::flow::{flow_trace, geometric_grid, terminal_scale, FlowTrace};
use circle_rearrange_core::functionals::{
    admissibility, defect_d, defect_dprime, kneser_defect, pairing, rs_star_value, tau_c, triple_functional,
    AdmissibilityReport,
};
use circle_rearrange_core::oracle::{agreement_check, search, Objective, SearchResult};
use circle_rearrange_core::rational::{min_r, one, pow2_inv, to_decimal};
use circle_rearrange_core::rearrange::{polarization_step, polarize, symmetrize_by_polarization, PolarizationAxis};
use circle_rearrange_core::{IntervalSet, Rational};
use clap::{Args, ValueEnum};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::format::{parse_list, parse_r, r, read_set, trace_csv, write_output, SetDto, DECIMAL_DIGITS};
use crate::CliError;

/// Seed for randomized searches when `--seed` is absent.
pub const DEFAULT_SEED: u64 = 0x5eed_c1c1e;

/// What a command produced. `failure` is set when the output is still worth
/// printing but the exit status must report a problem.
#[derive(Debug)]
pub struct Report {
    pub text: String,
    pub failure: Option<CliError>,
}

impl Report {
    fn ok(text: String) -> Self {
        Report { text, failure: None }
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

fn required(p: &Option<PathBuf>, flag: &str) -> Result<IntervalSet, CliError> {
    match p {
        Some(p) => read_set(p),
        None => Err(CliError::Usage(format!("missing --{flag}"))),
    }
}

fn optional(p: &Option<PathBuf>) -> Result<Option<IntervalSet>, CliError> {
    p.as_ref().map(|p| read_set(p)).transpose()
}

fn admissibility_json(rep: &AdmissibilityReport) -> Value {
    json!({
        "measures": rep.measures.iter().map(r).collect::<Vec<_>>(),
        "admissible": rep.admissible,
        "strictly_admissible": rep.strictly_admissible,
        "eta_strict": r(&rep.eta_strict),
        "sum": r(&rep.sum),
        "violation": rep.violation(),
    })
}

#[derive(Args, Debug, Default)]
pub struct EvalArgs {
    #[arg(long)]
    pub a: Option<PathBuf>,
    #[arg(long)]
    pub b: Option<PathBuf>,
    #[arg(long)]
    pub c: Option<PathBuf>,
    /// Closed-form star value for measures `a,b,c`.
    #[arg(long, value_name = "A,B,C")]
    pub star: Option<String>,
    /// Level for the truncated defect; defaults to `tau_C` when `--c` is given.
    #[arg(long)]
    pub tau: Option<String>,
    /// Require the triple to be eta-strictly admissible.
    #[arg(long)]
    pub eta: Option<String>,
}

pub fn eval(args: &EvalArgs) -> Result<Report, CliError> {
    if let Some(star) = &args.star {
        let m = parse_list(star)?;
        let [a, b, c] = <[Rational; 3]>::try_from(m)
            .map_err(|_| CliError::Parse(format!("--star needs three measures, got {star:?}")))?;
        return Ok(Report::ok(format!("{}\n", r(&rs_star_value(&a, &b, &c)?))));
    }
    let a = required(&args.a, "a")?;
    let b = required(&args.b, "b")?;
    let c = optional(&args.c)?;
    let tau = args.tau.as_deref().map(parse_r).transpose()?;
    let eta = args.eta.as_deref().map(parse_r).transpose()?;
    let (ma, mb) = (a.measure(), b.measure());

    let mut out = serde_json::Map::new();
    out.insert("measure_a".into(), json!(r(&ma)));
    out.insert("measure_b".into(), json!(r(&mb)));
    out.insert("kneser_defect".into(), json!(r(&kneser_defect(&a, &b)?)));
    let mut level = tau.clone();
    if let Some(c) = &c {
        let mc = c.measure();
        let rep = admissibility(&ma, &mb, &mc);
        out.insert("measure_c".into(), json!(r(&mc)));
        out.insert("T".into(), json!(r(&triple_functional(&a, &b, c))));
        out.insert("pairing".into(), json!(r(&pairing(&a, &b, c))));
        out.insert("D".into(), json!(r(&defect_d(&a, &b, c))));
        let tc = tau_c(&ma, &mb, &mc).ok();
        out.insert("tau_C".into(), json!(tc.as_ref().map(r)));
        if let Some(eta) = &eta {
            if !rep.eta_strictly_admissible(eta) {
                return Err(CliError::Hypothesis(format!(
                    "eta-strict admissibility fails: eta = {} exceeds {}",
                    r(eta),
                    r(&rep.eta_strict)
                )));
            }
            out.insert("eta".into(), json!(r(eta)));
            out.insert("eta_bounded".into(), json!(rep.eta_bounded(eta)));
        }
        out.insert("admissibility".into(), admissibility_json(&rep));
        if level.is_none() {
            level = tc.filter(|t| *t <= min_r(&ma, &mb));
        }
    } else if eta.is_some() {
        return Err(CliError::Usage("--eta needs --c".into()));
    }
    if let Some(t) = &level {
        out.insert("tau".into(), json!(r(t)));
        out.insert("Dprime".into(), json!(r(&defect_dprime(&a, &b, t)?)));
    }
    Ok(Report::ok(pretty(&Value::Object(out))))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Check {
    /// T_norm nondecreasing on the window, sum_norm nonincreasing.
    Monotone,
}

#[derive(Args, Debug)]
pub struct FlowArgs {
    #[arg(long)]
    pub a: PathBuf,
    #[arg(long)]
    pub b: PathBuf,
    #[arg(long)]
    pub c: PathBuf,
    /// `geometric:LO:HI:N` or `linear:LO:HI:N`; `HI` may be `terminal`.
    #[arg(long, default_value = "geometric:1:terminal:50")]
    pub grid: String,
    #[arg(long, value_enum)]
    pub check: Option<Check>,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Scales for a grid spec, given the smallest terminal scale of the inputs.
pub fn parse_grid(spec: &str, terminal: &Rational) -> Result<Vec<Rational>, CliError> {
    let bad = || CliError::Parse(format!("grid spec {spec:?} is not KIND:LO:HI:N"));
    let parts: Vec<&str> = spec.split(':').collect();
    let [kind, lo, hi, n] = parts[..] else { return Err(bad()) };
    let lo = parse_r(lo)?;
    let hi = if hi == "terminal" { terminal.clone() } else { parse_r(hi)? };
    let n: usize = n.parse().map_err(|_| bad())?;
    if n == 0 {
        return Err(bad());
    }
    if lo < one() || hi > *terminal || hi < lo {
        return Err(CliError::Hypothesis(format!(
            "grid [{}, {}] not inside [1, terminal = {}]",
            r(&lo),
            r(&hi),
            r(terminal)
        )));
    }
    let grid = match kind {
        "geometric" => geometric_grid(&(&hi / &lo), n).into_iter().map(|x| x * &lo).collect(),
        "linear" if n == 1 => vec![lo],
        "linear" => {
            let step = (&hi - &lo) / Rational::from_integer((n as i64 - 1).into());
            let mut g: Vec<Rational> = (0..n).map(|i| &lo + &step * Rational::from_integer((i as i64).into())).collect();
            g.dedup();
            g
        }
        _ => return Err(bad()),
    };
    Ok(grid)
}

/// First adjacent row pair where a monotone column goes the wrong way.
pub fn monotone_violation(trace: &FlowTrace) -> Option<String> {
    let rows = &trace.rows;
    for i in 1..rows.len() {
        let (p, q) = (&rows[i - 1], &rows[i]);
        if i < trace.window && q.t_norm < p.t_norm {
            return Some(format!(
                "T_norm decreases between rows {} and {} (s = {} -> {}): {} -> {}",
                i,
                i + 1,
                r(&p.s),
                r(&q.s),
                r(&p.t_norm),
                r(&q.t_norm)
            ));
        }
        if q.sum_norm > p.sum_norm {
            return Some(format!(
                "sum_norm increases between rows {} and {} (s = {} -> {}): {} -> {}",
                i,
                i + 1,
                r(&p.s),
                r(&q.s),
                r(&p.sum_norm),
                r(&q.sum_norm)
            ));
        }
    }
    None
}

pub fn flow(args: &FlowArgs) -> Result<Report, CliError> {
    let sets = [read_set(&args.a)?, read_set(&args.b)?, read_set(&args.c)?];
    let mut terminal = terminal_scale(&sets[0])?;
    for e in &sets[1..] {
        terminal = min_r(&terminal, &terminal_scale(e)?);
    }
    let grid = parse_grid(&args.grid, &terminal)?;
    let trace = flow_trace(&sets[0], &sets[1], &sets[2], &grid)?;
    let csv = trace_csv(&trace)?;
    let failure = match args.check {
        Some(Check::Monotone) => monotone_violation(&trace).map(CliError::Nonmonotone),
        None => None,
    };
    let text = match write_output(args.out.as_deref(), &csv)? {
        Some(p) => format!("wrote {} rows to {}\n", trace.rows.len(), p.display()),
        None => csv,
    };
    Ok(Report { text, failure })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Sweep {
    /// The displaced-chunk family around a degree-2 Bohr triple.
    Delta,
}

#[derive(Args, Debug)]
pub struct CertifyArgs {
    #[arg(long)]
    pub a: Option<PathBuf>,
    #[arg(long)]
    pub b: Option<PathBuf>,
    #[arg(long)]
    pub c: Option<PathBuf>,
    /// Defaults to the largest level the triple allows.
    #[arg(long)]
    pub eta: Option<String>,
    #[arg(long, default_value_t = 4)]
    pub n_max: u64,
    /// Emit JSON lines over a perturbation family instead of one certificate.
    #[arg(long, value_enum)]
    pub sweep: Option<Sweep>,
    /// Sweep over `delta = 2^-k` for `k` from `--from` to `--to`.
    #[arg(long, default_value_t = 4)]
    pub from: u32,
    #[arg(long, default_value_t = 10)]
    pub to: u32,
    /// Worker threads for sweeps; rows keep their order.
    #[arg(long)]
    pub jobs: Option<usize>,
}

fn bohr_json(b: &BohrSet) -> Value {
    json!({ "degree": b.degree, "center": r(b.center.value()), "radius": r(&b.radius) })
}

pub fn certificate_json(cert: &StabilityCertificate) -> Value {
    json!({
        "triple": cert.recovery.triple.sets.iter().map(bohr_json).collect::<Vec<_>>(),
        "distances": cert.recovery.distances.iter().map(r).collect::<Vec<_>>(),
        "defect": r(&cert.defect),
        "ratio_sq": cert.ratio_sq.as_ref().map(r),
        "eta_used": r(&cert.eta_used),
        "eta_bounded": cert.eta_bounded,
        "n_max": cert.n_max,
        "exact_extremizer": cert.is_exact_extremizer(),
    })
}

fn certify_sets(a: &IntervalSet, b: &IntervalSet, c: &IntervalSet, eta: Option<&Rational>, n_max: u64) -> Result<StabilityCertificate, CliError> {
    let eta = match eta {
        Some(e) => e.clone(),
        None => admissibility(&a.measure(), &b.measure(), &c.measure()).eta_strict,
    };
    Ok(stability_certificate(a, b, c, &eta, n_max)?)
}

fn sweep_row(k: u32, eta: Option<&Rational>, n_max: u64) -> Result<String, CliError> {
    let delta = pow2_inv(k);
    let [a, b, c] = chunk_family(&delta)?;
    let cert = certify_sets(&a, &b, &c, eta, n_max)?;
    let row = json!({
        "delta": r(&delta),
        "D": r(&cert.defect),
        "D_dec": to_decimal(&cert.defect, DECIMAL_DIGITS),
        "max_symdiff": r(&cert.recovery.max_distance()),
        "ratio_sq": cert.ratio_sq.as_ref().map(r),
        "degree": cert.recovery.triple.sets[0].degree,
    });
    Ok(serde_json::to_string(&row).expect("json values serialize"))
}

pub fn certify(args: &CertifyArgs) -> Result<Report, CliError> {
    let eta = args.eta.as_deref().map(parse_r).transpose()?;
    if args.sweep.is_some() {
        if args.from > args.to {
            return Err(CliError::Usage(format!("--from {} is past --to {}", args.from, args.to)));
        }
        let ks: Vec<u32> = (args.from..=args.to).collect();
        let run = || ks.par_iter().map(|&k| sweep_row(k, eta.as_ref(), args.n_max)).collect::<Result<Vec<_>, _>>();
        let rows = match args.jobs {
            Some(j) => rayon::ThreadPoolBuilder::new()
                .num_threads(j.max(1))
                .build()
                .map_err(|e| CliError::Io(e.to_string()))?
                .install(run)?,
            None => ks.iter().map(|&k| sweep_row(k, eta.as_ref(), args.n_max)).collect::<Result<Vec<_>, _>>()?,
        };
        return Ok(Report::ok(rows.iter().map(|l| format!("{l}\n")).collect()));
    }
    let a = required(&args.a, "a")?;
    let b = required(&args.b, "b")?;
    let c = required(&args.c, "c")?;
    let cert = certify_sets(&a, &b, &c, eta.as_ref(), args.n_max)?;
    Ok(Report::ok(pretty(&certificate_json(&cert))))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ObjectiveArg {
    Defect,
    Kneser,
}

#[derive(Args, Debug)]
pub struct OracleArgs {
    /// Compare the continuum defect with its sampling on Z/N.
    #[arg(long, value_name = "N")]
    pub agree: Option<usize>,
    /// Minimize over subsets of Z/N with the given sizes.
    #[arg(long, num_args = 2, value_names = ["N", "K1,K2,K3"])]
    pub search: Option<Vec<String>>,
    #[arg(long, value_enum, default_value_t = ObjectiveArg::Defect)]
    pub objective: ObjectiveArg,
    /// Random restarts when the exhaustive search is too large.
    #[arg(long, default_value_t = 32)]
    pub restarts: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub a: Option<PathBuf>,
    #[arg(long)]
    pub b: Option<PathBuf>,
    #[arg(long)]
    pub c: Option<PathBuf>,
}

pub fn search_json(res: &SearchResult) -> Value {
    json!({
        "N": res.n,
        "sizes": [res.sizes.0, res.sizes.1, res.sizes.2],
        "objective": match res.objective { Objective::MinDefect => "defect", Objective::MinKneser => "kneser" },
        "value": r(&res.value),
        "exhaustive": res.exhaustive,
        "evaluated": res.evaluated,
        "minimizers": res.minimizers.iter().map(|t| t.iter().map(|s| s.residues()).collect::<Vec<_>>()).collect::<Vec<_>>(),
    })
}

pub fn oracle(args: &OracleArgs) -> Result<Report, CliError> {
    match (&args.agree, &args.search) {
        (Some(n), None) => {
            if *n == 0 {
                return Err(CliError::Hypothesis("N must be positive".into()));
            }
            let a = required(&args.a, "a")?;
            let b = required(&args.b, "b")?;
            let c = required(&args.c, "c")?;
            let g = agreement_check(&a, &b, &c, *n);
            Ok(Report::ok(pretty(&json!({
                "N": n,
                "continuum": r(&g.continuum),
                "discrete": r(&g.discrete),
                "gap": r(&g.gap),
                "bound": r(&g.bound),
                "within_bound": g.within_bound(),
            }))))
        }
        (None, Some(v)) => {
            let n: usize = v[0].parse().map_err(|_| CliError::Parse(format!("modulus {:?}", v[0])))?;
            let k: Vec<usize> = v[1]
                .split(',')
                .map(|x| x.trim().parse().map_err(|_| CliError::Parse(format!("sizes {:?}", v[1]))))
                .collect::<Result<_, _>>()?;
            let [k1, k2, k3] = k[..] else {
                return Err(CliError::Parse(format!("sizes {:?} must be three integers", v[1])));
            };
            let objective = match args.objective {
                ObjectiveArg::Defect => Objective::MinDefect,
                ObjectiveArg::Kneser => Objective::MinKneser,
            };
            let mut rng = ChaCha8Rng::seed_from_u64(args.seed.unwrap_or(DEFAULT_SEED));
            let res = search(n, (k1, k2, k3), objective, args.restarts, &mut rng)?;
            Ok(Report::ok(pretty(&search_json(&res))))
        }
        _ => Err(CliError::Usage("give exactly one of --agree and --search".into())),
    }
}

#[derive(Args, Debug)]
pub struct PolarizeArgs {
    #[arg(long)]
    pub set: PathBuf,
    #[arg(long)]
    pub axis: Option<String>,
    /// Polarize `--set` and `--partner` together and report the gain of the
    /// pairing against `--kernel`, a single arc centered at 0.
    #[arg(long, requires = "kernel")]
    pub partner: Option<PathBuf>,
    #[arg(long, requires = "partner")]
    pub kernel: Option<PathBuf>,
    /// Iterate polarizations until within `--tol` of a translated arc.
    #[arg(long, conflicts_with = "axis")]
    pub symmetrize: bool,
    #[arg(long, default_value = "0")]
    pub tol: String,
    #[arg(long, default_value_t = 64)]
    pub max_steps: usize,
}

pub fn polarize_cmd(args: &PolarizeArgs) -> Result<Report, CliError> {
    let e = read_set(&args.set)?;
    if args.symmetrize {
        let run = symmetrize_by_polarization(&e, &parse_r(&args.tol)?, args.max_steps)?;
        return Ok(Report::ok(pretty(&json!({
            "final": SetDto::from_set(&run.final_set),
            "axes": run.axes.iter().map(|a| r(a.a.value())).collect::<Vec<_>>(),
            "distances": run.distances.iter().map(r).collect::<Vec<_>>(),
            "translate": r(&run.translate),
        }))));
    }
    let axis = PolarizationAxis::new(parse_r(
        args.axis.as_deref().ok_or_else(|| CliError::Usage("missing --axis or --symmetrize".into()))?,
    )?);
    let mut out = json!({
        "axis": r(axis.a.value()),
        "set": SetDto::from_set(&polarize(&e, &axis)),
        "measure": r(&e.measure()),
    });
    if let (Some(p), Some(k)) = (&args.partner, &args.kernel) {
        let (b, c) = (read_set(p)?, read_set(k)?);
        let (_, b2, gain) = polarization_step(&e, &b, &c, &axis)?;
        out["partner"] = json!(SetDto::from_set(&b2));
        out["gain"] = json!(r(&gain));
    }
    Ok(Report::ok(pretty(&out)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use circle_rearrange_core::flow::FlowTraceRow;
    use circle_rearrange_core::rational::{int, rat};

    fn row(s: i64, t: Rational, sum: Rational) -> FlowTraceRow {
        FlowTraceRow { s: int(s), m: [rat(1, 4), rat(1, 4), rat(1, 4)], t_norm: t, sum_norm: sum, d_norm: int(0) }
    }

    #[test]
    fn nonmonotone_rows_are_pinpointed() {
        let good = FlowTrace { rows: vec![row(1, rat(1, 8), int(1)), row(2, rat(1, 6), rat(1, 2))], window: 2 };
        assert_eq!(monotone_violation(&good), None);
        let t_down = FlowTrace { rows: vec![row(1, rat(1, 6), int(1)), row(2, rat(1, 8), int(1))], window: 2 };
        assert!(monotone_violation(&t_down).unwrap().contains("rows 1 and 2"));
        // outside the window T_norm may fall
        let outside = FlowTrace { rows: t_down.rows.clone(), window: 1 };
        assert_eq!(monotone_violation(&outside), None);
        let sum_up = FlowTrace { rows: vec![row(1, rat(1, 8), rat(1, 2)), row(2, rat(1, 8), int(1))], window: 2 };
        assert!(monotone_violation(&sum_up).unwrap().starts_with("sum_norm"));
    }

    #[test]
    fn grids() {
        let t = int(4);
        let g = parse_grid("linear:1:terminal:4", &t).unwrap();
        assert_eq!(g, vec![int(1), int(2), int(3), int(4)]);
        let g = parse_grid("geometric:2:4:3", &t).unwrap();
        assert_eq!((g[0].clone(), g[2].clone()), (int(2), int(4)));
        assert!(matches!(parse_grid("geometric:1:5:3", &t), Err(CliError::Hypothesis(_))));
        assert!(matches!(parse_grid("geometric:1:2", &t), Err(CliError::Parse(_))));
    }
}
