use std::fmt::Write as _;

use normwalk_core::census::{asymptotic_constant, census, check_a4, oracle_mismatch, BRUTEFORCE_BUDGET};
use normwalk_core::functions::FunctionSpec;
use normwalk_core::green::{default_box_radius, green_asymptotic, green_dp, green_mc, GreenEstimate};
use normwalk_core::jeulin::{
    bernoulli_non_unifiable, limit_jeulin_harness, shiga3_run, shiga5_run, HarnessBudget, Scenario, Shiga3Config,
    Shiga5Config,
};
use normwalk_core::measure::{invariance_report, scaled_samples};
use normwalk_core::summability::{zero_one_experiment, ZeroOneConfig};
use normwalk_core::walk::{level_certificate, make_simple_walk, simulate, SiteTracking, WalkRun};
use normwalk_core::{Error, McBudget, NormFamily, NormSpec, UnimodularMatrix};
use rayon::prelude::*;
use serde_json::json;

use crate::args::*;
use crate::emit::Report;

pub enum Failure {
    Usage(String),
    Verify(String),
    Resource(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_resource() {
            Failure::Resource(e.to_string())
        } else {
            Failure::Usage(e.to_string())
        }
    }
}

type Outcome = Result<Report, Failure>;

fn norm_spec(a: &NormArgs) -> Result<NormSpec, Error> {
    let family: NormFamily = a.norm.parse()?;
    let spec = NormSpec::new(family, a.dim)?;
    match &a.transform {
        None => Ok(spec),
        Some(entries) => spec.with_transform(UnimodularMatrix::new(a.dim, entries.clone())?),
    }
}

fn refuse_recurrent(d: usize) -> Result<(), Error> {
    match make_simple_walk(d).recurrence_note() {
        Some(msg) => Err(Error::usage(msg)),
        None => Ok(()),
    }
}

pub fn census_cmd(a: &CensusArgs) -> Outcome {
    let spec = norm_spec(&a.norm)?;
    let c = census(&spec, a.kmax, a.common.allow_degenerate)?;
    let mut verify = None;
    if a.verify {
        // the oracle is brute force; cap it at what the budget allows
        let mut k = a.kmax;
        while k > 0 && (2 * spec.enclosing_box_radius(k) as u128 + 1).saturating_pow(spec.dim() as u32) > BRUTEFORCE_BUDGET {
            k -= 1;
        }
        let mismatch = oracle_mismatch(&spec, k)?;
        if let Some((k, fast, brute)) = mismatch {
            return Err(Failure::Verify(format!("census mismatch at k={k}: {fast} vs brute force {brute}")));
        }
        verify = Some(json!({ "checked_up_to": k, "ok": true }));
    }
    let constant = asymptotic_constant(&spec).ok().map(|c| c.c.to_string());
    let body = json!({
        "spec": spec,
        "label": spec.to_string(),
        "method": c.method.tag(),
        "counts": c.counts,
        "a4_monotone_from_1": check_a4(&c, 1),
        "asymptotic_constant": constant,
        "verify": verify,
    });
    Ok(Report::new(&body, c.to_csv()))
}

pub fn simulate_cmd(a: &SimulateArgs) -> Outcome {
    let spec = norm_spec(&a.norm)?;
    let step = make_simple_walk(a.norm.dim);
    if a.replicas == 0 {
        return Err(Failure::Usage("need at least one replica".into()));
    }
    let seed = a.common.seed;
    let recs = (0..a.replicas)
        .into_par_iter()
        .map(|r| {
            let mut run = WalkRun::new(&step, &spec, seed, r, a.horizon).purpose("simulate");
            if let Some(k) = a.stop_radius {
                run = run.stop_at(k);
            }
            simulate(&run, SiteTracking::Off, &mut [])
        })
        .collect::<Result<Vec<_>, Error>>()?;
    let mut csv = String::from("replica,k,count\n");
    for (r, rec) in recs.iter().enumerate() {
        for (k, &c) in rec.level_counts.iter().enumerate() {
            if c > 0 {
                writeln!(csv, "{r},{k},{c}").unwrap();
            }
        }
    }
    // bias of L(k) when exit at the stop radius is treated as escape
    let bias: Vec<_> = match a.stop_radius {
        Some(kc) if spec.dim() >= 3 => (1..=kc / 2).map(|k| json!([k, level_certificate(&spec, k, kc).relative_bias])).collect(),
        _ => Vec::new(),
    };
    let body = json!({
        "spec": spec.to_string(),
        "replicas": a.replicas,
        "horizon": a.horizon,
        "stop_radius": a.stop_radius,
        "n_effective": recs.iter().map(|r| r.n_effective).collect::<Vec<_>>(),
        "truncated": recs.iter().filter(|r| r.truncated).count(),
        "bias_bound": bias,
    });
    Ok(Report::new(&body, csv))
}

pub fn green_cmd(a: &GreenArgs) -> Outcome {
    let d = a.x.len();
    refuse_recurrent(d)?;
    let step = make_simple_walk(d);
    let est: GreenEstimate = match a.method {
        GreenMethodArg::Dp => {
            let b = a.box_radius.unwrap_or_else(|| default_box_radius(std::slice::from_ref(&a.x), a.nmax));
            green_dp(&step, &a.x, a.nmax, b)?
        }
        GreenMethodArg::Mc => {
            let norm_x = NormSpec::max(d).norm_value(&a.x)?;
            if a.kcut <= norm_x {
                return Err(Failure::Usage(format!("kcut must exceed the max norm of x ({norm_x})")));
            }
            green_mc(&step, &NormSpec::max(d), &a.x, a.kcut, McBudget::new(a.replicas, a.common.seed))?
        }
        GreenMethodArg::Asymptotic => green_asymptotic(&step, &a.x)?,
    };
    let x = est.x.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" ");
    let csv = format!("x,value,error_bound,method\n{x},{},{},{}\n", est.value, est.error_bound, est.method.tag());
    Ok(Report::new(&est, csv))
}

fn zero_one_functions(a: &ZeroOneArgs) -> Result<Vec<FunctionSpec>, Error> {
    let mut fs: Vec<FunctionSpec> = a
        .beta
        .iter()
        .map(|&b| match a.gamma {
            Some(g) => FunctionSpec::power_log(b, g),
            None => FunctionSpec::power_law(b),
        })
        .collect();
    for s in &a.functions {
        fs.push(s.parse()?);
    }
    if fs.is_empty() {
        fs = vec![FunctionSpec::power_law(3.0), FunctionSpec::power_law(1.5)];
    }
    for f in &fs {
        f.validate()?;
    }
    Ok(fs)
}

pub fn zero_one_cmd(a: &ZeroOneArgs) -> Outcome {
    refuse_recurrent(a.norm.dim)?;
    let spec = norm_spec(&a.norm)?;
    let step = make_simple_walk(a.norm.dim);
    let fs = zero_one_functions(a)?;
    let c = census(&spec, 400, a.common.allow_degenerate)?;
    let mut cfg = ZeroOneConfig { horizons: a.horizons.clone(), replicas: a.replicas, master_seed: a.common.seed, ..Default::default() };
    if let Some(e) = a.eps_abs {
        cfg.eps_abs = e;
    }
    if let Some(e) = a.eps_rel {
        cfg.eps_rel = e;
    }
    let rep = zero_one_experiment(&step, &spec, &fs, &c, &cfg)?;
    let mut csv = String::from("function,replica,horizon,sum\n");
    for row in &rep.rows {
        for (r, sums) in row.sums.iter().enumerate() {
            for (h, s) in cfg.horizons.iter().zip(sums) {
                writeln!(csv, "\"{}\",{r},{h},{s}", row.function).unwrap();
            }
        }
    }
    Ok(Report::new(&rep, csv))
}

pub fn invariance_cmd(a: &InvarianceArgs) -> Outcome {
    refuse_recurrent(a.norm.dim)?;
    let spec = norm_spec(&a.norm)?;
    let step = make_simple_walk(a.norm.dim);
    let samples = a
        .k_ladder
        .iter()
        .enumerate()
        .map(|(i, &k)| {
            let budget = McBudget::new(a.replicas, a.common.seed.wrapping_add(i as u64));
            scaled_samples(&step, &spec, k, a.kcut_factor * k, budget)
        })
        .collect::<Result<Vec<_>, Error>>()?;
    let rep = invariance_report(&samples, a.permutations, a.common.seed)?;
    let mut csv = String::from("k,replica,scaled_value\n");
    for s in &samples {
        for (r, v) in s.samples.iter().enumerate() {
            writeln!(csv, "{},{r},{v}", s.k).unwrap();
        }
    }
    let certs: Vec<_> = samples.iter().map(|s| json!({ "k": s.k, "n_k": s.n_k, "certificate": s.certificate })).collect();
    let mut body = serde_json::to_value(&rep).expect("report");
    body["levels"] = json!(certs);
    Ok(Report::new(&body, csv))
}

pub fn jeulin_cmd(a: &JeulinArgs) -> Outcome {
    let seed = a.common.seed;
    match a.scenario {
        ScenarioArg::Shiga3 => {
            let mut cfg = Shiga3Config { master_seed: seed, ..Default::default() };
            if let Some(al) = a.alpha {
                cfg.alpha = al;
            }
            if !a.k.is_empty() {
                cfg.ladder = a.k.clone();
            }
            if let Some(r) = a.replicas {
                cfg.ladder_replicas = r;
            }
            if let Some(r) = a.laplace_replicas {
                cfg.laplace_replicas = r;
            }
            let r = shiga3_run(&cfg)?;
            let mut csv = String::from("replica,K,partial_sum\n");
            for (i, p) in r.partials.iter().enumerate() {
                for (k, v) in cfg.ladder.iter().zip(p) {
                    writeln!(csv, "{i},{k},{v}").unwrap();
                }
            }
            let body = json!({
                "scenario": "shiga3",
                "laplace_targets": [r.laplace_target],
                "laplace_empirical": [r.laplace_empirical],
                "z_scores": [r.laplace_z],
                "detail": r,
            });
            Ok(Report::new(&body, csv))
        }
        ScenarioArg::Shiga5 => {
            let mut cfg = Shiga5Config { master_seed: seed, ..Default::default() };
            if let Some(al) = a.alpha {
                cfg.alpha = al;
            }
            if !a.k.is_empty() {
                cfg.eps_ladder = a.k.iter().map(|&l| u32::try_from(l).unwrap_or(u32::MAX)).collect();
                cfg.levels = cfg.levels.max(*cfg.eps_ladder.iter().max().unwrap());
            }
            if let Some(r) = a.replicas {
                cfg.replicas = r;
            }
            let r = shiga5_run(&cfg)?;
            let mut csv = String::from("level,median_integral,laplace_empirical,laplace_target,z\n");
            for (i, l) in cfg.eps_ladder.iter().enumerate() {
                writeln!(csv, "{l},{},{},{},{}", r.median_integrals[i], r.laplace_empirical[i], r.laplace_target[i], r.laplace_z[i]).unwrap();
            }
            let body = json!({
                "scenario": "shiga5",
                "laplace_targets": r.laplace_target,
                "laplace_empirical": r.laplace_empirical,
                "z_scores": r.laplace_z,
                "detail": r,
            });
            Ok(Report::new(&body, csv))
        }
        ScenarioArg::Bernoulli => {
            let r = bernoulli_non_unifiable();
            let mut csv = String::from("case,prob_finite,sum_f_phi\n");
            for c in std::iter::once(&r.main).chain(&r.controls) {
                writeln!(csv, "{},{}/{},{:?}", c.label, c.prob_finite.numer(), c.prob_finite.denom(), c.sum_f_phi).unwrap();
            }
            Ok(Report::new(&json!({ "scenario": "bernoulli", "detail": r }), csv))
        }
        ScenarioArg::Harness => {
            let alpha = a.alpha.unwrap_or(0.4);
            let mut budget = HarnessBudget { master_seed: seed, ..Default::default() };
            if !a.k.is_empty() {
                budget.ladder = a.k.clone();
            }
            if let Some(r) = a.replicas {
                budget.replicas = r;
            }
            let powers = |bs: &[f64]| bs.iter().map(|&b| FunctionSpec::power_law(b)).collect::<Vec<_>>();
            let runs = [
                (Scenario::NoisyPower { phi_exponent: 2.0 }, powers(&[4.0, 3.5, 2.5, 2.0])),
                (Scenario::StableScaled { phi_exponent: 2.0, alpha: 0.7 }, powers(&[4.0, 3.5, 2.5, 2.0])),
                (Scenario::Shiga3 { alpha }, powers(&[4.0, 1.0 / alpha, 2.0])),
                (Scenario::Bernoulli, powers(&[0.0, 2.0])),
            ];
            let mut reports = Vec::new();
            let mut csv = String::from("scenario,function,sum_f_phi,exact_prob_finite,stabilized_fraction,evidence,implication_holds,converse_fails\n");
            for (s, fs) in runs {
                let r = limit_jeulin_harness(s, &fs, &budget)?;
                for row in &r.rows {
                    writeln!(
                        csv,
                        "{},\"{}\",{:?},{},{},{:?},{},{}",
                        r.scenario, row.function, row.sum_f_phi, row.exact_prob_finite, row.stabilized_fraction, row.evidence,
                        row.implication_holds, row.converse_fails
                    )
                    .unwrap();
                }
                reports.push(r);
            }
            Ok(Report::new(&json!({ "scenario": "harness", "detail": reports }), csv))
        }
    }
}
