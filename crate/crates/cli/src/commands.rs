use serde::Serialize;

use cubecover::anticoncentration::{
    antichain_mass_experiment, lo_check, lo_sweep, marginal_sweep, scales_decay_experiment, AntichainMassReport,
    LoCheck, LoSweepReport, ProductMeasure, ScalesReport, SweepReport,
};
use cubecover::bang::{objective, solve_bang, verify_bang, BangInstance};
use cubecover::constructors::{
    lr_lower_bound, minimum_essential_cover_size_with_budget, upper_bound, yy_lower_bound, AsymptoticBound,
};
use cubecover::decomposition::{check_four_way, decompose_four_way, FourWayDecomposition, FourWayReport};
use cubecover::finder::{find_uncovered, Status};
use cubecover::rat::{self, int, Rat};
use cubecover::verifier::check_essential_guarded;
use cubecover::{Cover, Error, ParamSet, Result};

use crate::{Command, Experiment, Global};

pub struct Output {
    pub json: String,
    pub code: u8,
    pub summary: String,
}

fn output<T: Serialize>(value: &T, code: u8, summary: String) -> Result<Output> {
    let mut json = serde_json::to_string_pretty(value)?;
    json.push('\n');
    Ok(Output { json, code, summary })
}

pub fn error_code(e: &Error) -> u8 {
    match e {
        Error::BudgetExceeded { .. } => 3,
        _ => 2,
    }
}

fn params(g: &Global) -> Result<ParamSet> {
    let mut p = match &g.params {
        Some(path) => ParamSet::from_json_str(&std::fs::read_to_string(path)?)?,
        None => ParamSet::default(),
    };
    if let Some(seed) = g.seed {
        p.seed = seed;
    }
    p.validate()?;
    Ok(p)
}

#[derive(Serialize)]
struct Bounds {
    n: usize,
    lr_lower: f64,
    yy_lower: AsymptoticBound,
    upper: AsymptoticBound,
}

#[derive(Serialize)]
struct Decomposed<'a> {
    decomposition: &'a FourWayDecomposition,
    report: &'a FourWayReport,
}

#[derive(Serialize)]
struct BangReport {
    k: usize,
    #[serde(with = "rat::serde_rat")]
    theta: Rat,
    epsilon: Vec<i8>,
    flips: usize,
    #[serde(with = "rat::serde_rat")]
    objective: Rat,
    verified: bool,
}

#[derive(Serialize)]
struct LoReport {
    sweeps: Vec<LoSweepReport>,
    violations: u64,
}

#[derive(Serialize)]
struct AntichainReport {
    mass: AntichainMassReport,
    sweep: SweepReport,
}

#[derive(Serialize)]
#[serde(untagged)]
enum LoOutput {
    Single(LoCheck),
    Sweep(LoReport),
}

pub fn run(g: &Global, command: &Command) -> Result<Output> {
    match command {
        Command::Verify { input, guard } => {
            let c = Cover::read_json(input)?;
            let r = check_essential_guarded(&c, *guard)?;
            let summary = format!(
                "n={} k={} essential={} e1={} e2={} e3={} sparsity={}",
                r.n,
                r.k,
                r.essential,
                r.e1_holds(),
                r.e2_holds(),
                r.e3_holds(),
                r.sparsity_ok()
            );
            output(&r, if r.essential { 0 } else { 1 }, summary)
        }
        Command::Bounds { n } => {
            if *n == 0 {
                return Err(Error::InvalidInput("n must be positive".into()));
            }
            let p = params(g)?;
            let b = Bounds {
                n: *n,
                lr_lower: lr_lower_bound(*n),
                yy_lower: yy_lower_bound(*n, &p),
                upper: upper_bound(*n),
            };
            let summary = format!("n={n} lr_lower={}", b.lr_lower);
            output(&b, 0, summary)
        }
        Command::Oracle { n, budget } => {
            let r = minimum_essential_cover_size_with_budget(*n, *budget)?;
            let summary = format!("e({n}) = {} after {} nodes", r.e, r.nodes);
            output(&r, 0, summary)
        }
        Command::Decompose { input } => {
            let p = params(g)?;
            let c = Cover::read_json(input)?;
            let v = c.normals();
            let d = decompose_four_way(&v, &p)?;
            let report = check_four_way(&v, &d, &p);
            let summary = format!(
                "K = {}/{}/{}/{} N = {}/{}/{} passed={}",
                d.k1.len(),
                d.k2.len(),
                d.k3.len(),
                d.k4.len(),
                d.n1.len(),
                d.n2.len(),
                d.n3.len(),
                report.passed
            );
            let code = if report.passed { 0 } else { 1 };
            output(
                &Decomposed {
                    decomposition: &d,
                    report: &report,
                },
                code,
                summary,
            )
        }
        Command::Bang { input } => {
            let inst = BangInstance::from_json_str(&std::fs::read_to_string(input)?)?;
            let sol = solve_bang(&inst);
            let verified = verify_bang(&inst, &sol.epsilon);
            let r = BangReport {
                k: inst.k(),
                theta: inst.theta.clone(),
                objective: objective(&inst.m, &inst.gamma, &inst.theta, &sol.epsilon),
                epsilon: sol.epsilon,
                flips: sol.flips,
                verified,
            };
            let summary = format!("k={} flips={} verified={verified}", r.k, r.flips);
            output(&r, if verified { 0 } else { 1 }, summary)
        }
        Command::FindUncovered {
            input,
            fallback_exhaustive,
        } => {
            let p = params(g)?;
            let c = Cover::read_json(input)?;
            let out = find_uncovered(&c, &p, *fallback_exhaustive)?;
            let code = match out.status {
                Status::Found => 0,
                Status::PhaseFailure => 3,
                Status::PremiseFailure => 2,
            };
            let summary = format!(
                "status={:?} fallback={} reason={}",
                out.status,
                out.diagnostics.fallback_used,
                out.diagnostics.reason.as_deref().unwrap_or("-")
            );
            output(&out, code, summary)
        }
        Command::Experiment { kind } => experiment(g, kind),
    }
}

fn experiment(g: &Global, kind: &Experiment) -> Result<Output> {
    match kind {
        Experiment::Lo {
            n,
            reduced,
            vector,
            target,
        } => {
            if let Some(v) = vector {
                let c = lo_check(v, target)?;
                let summary = format!("p={} bound={} holds={}", c.probability_f64, c.bound, c.holds);
                let code = if c.holds { 0 } else { 1 };
                return output(&LoOutput::Single(c), code, summary);
            }
            if !(1..=16).contains(n) {
                return Err(Error::InvalidInput("sweep length must be in 1..=16".into()));
            }
            let sweeps: Vec<LoSweepReport> = (1..=*n).map(|m| lo_sweep(m, !reduced)).collect();
            let violations = sweeps.iter().map(|s| s.violations).sum();
            let summary = format!("lengths 1..={n}: {violations} violations");
            output(
                &LoOutput::Sweep(LoReport { sweeps, violations }),
                if violations == 0 { 0 } else { 1 },
                summary,
            )
        }
        Experiment::Antichain {
            n,
            trials,
            max_entry,
            marginal,
            sweep,
        } => {
            let p = params(g)?;
            if *max_entry < 1 {
                return Err(Error::InvalidInput("max_entry must be positive".into()));
            }
            let measure = ProductMeasure::new(vec![marginal.clone(); *n])?;
            let mass = antichain_mass_experiment(&measure, *trials, *max_entry, p.seed)?;
            let sweep = marginal_sweep(&vec![int(1); *n], sweep)?;
            let summary = format!("max C (random) = {:.4}, max C (sweep) = {:.4}", mass.max_c, sweep.max_c);
            output(&AntichainReport { mass, sweep }, 0, summary)
        }
        Experiment::Scales {
            scales,
            delta,
            b,
            trials,
        } => {
            let p = params(g)?;
            let mut scales = scales.clone();
            scales.sort_unstable();
            scales.dedup();
            if scales.is_empty() || scales[0] == 0 || *scales.last().unwrap() > 4 {
                return Err(Error::InvalidInput("scale counts must lie in 1..=4".into()));
            }
            let r: ScalesReport = scales_decay_experiment(&scales, &p.c0_rat(), delta, b, *trials, p.seed)?;
            let summary = format!("monotone={}", r.monotone);
            output(&r, if r.monotone { 0 } else { 1 }, summary)
        }
    }
}
