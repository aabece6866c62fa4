use std::sync::Arc;

use serde_json::{json, Value};

use cmdiv::approx::{lower_bound_witness, psi_table};
use cmdiv::cm::{extend_cm, poisson_accompany, CmVerdict};
use cmdiv::io;
use cmdiv::lattice::catalog;
use cmdiv::moments::{
    hankel_psd_check, laplace_counterexample_bridge_capped, tj_counterexample_capped, two_atom,
    TjCertificate,
};
use cmdiv::multi_interval::construct_multi_interval;
use cmdiv::randset::{from_void, poisson_union, PowerVerdict};
use cmdiv::scan::{scan_s, schur_condition_check};
use cmdiv::{Error, FiniteLattice, LatticeFunction, RandomSubset, Rational, Scalar};

use crate::input;
use crate::output::{mask, scalar, scalars, write_text, CliError, CliResult, Report};
use crate::{ApproxCmd, CmCmd, CmseqCmd, LatticeCmd, RandsetCmd, RunConfig, ScanCmd};

fn lattice_summary(l: &FiniteLattice) -> Value {
    let degrees: Vec<usize> = (0..l.len()).map(|x| l.cover_degree(x)).collect();
    json!({
        "elements": l.len(),
        "bottom": l.bottom(),
        "top": l.top(),
        "d_max": l.d_max(),
        "cover_degrees": degrees,
        "cover_pairs": l.cover_pairs(),
        "distributive": l.is_distributive(),
        "chain": l.is_chain(),
        "boolean_bits": l.boolean_bits(),
        "square": l.find_square(),
    })
}

pub fn lattice(cmd: &LatticeCmd, _config: &RunConfig) -> CliResult<Report> {
    match cmd {
        LatticeCmd::Check { lattice } => {
            let l = input::lattice(lattice)?;
            let collisions: Vec<Value> = (0..l.len())
                .filter_map(|x| match l.verify_distinct_joins(x) {
                    Ok(cmdiv::lattice::DistinctJoins::Collision { first, second, join }) => Some(json!({
                        "element": x, "first": first, "second": second, "join": join
                    })),
                    _ => None,
                })
                .collect();
            let mut summary = lattice_summary(&l);
            summary["join_collisions"] = Value::Array(collisions);
            Ok(Report::new(true, summary))
        }
        LatticeCmd::Make { name, write } => {
            let l = catalog::by_name(name)?;
            let text = io::write_lattice(&l);
            if let Some(p) = write {
                write_text(p, &text)?;
            }
            let mut summary = lattice_summary(&l);
            summary["text"] = json!(text);
            Ok(Report::new(true, summary))
        }
    }
}

fn verdict_json<S: Scalar>(v: &CmVerdict<S>, f: &LatticeFunction<S>) -> Value {
    json!({
        "is_cm": v.is_cm,
        "min_weight": scalar(&v.min_weight),
        "tolerance": v.tolerance,
        "indeterminate": v.indeterminate,
        "certificate": v.certificate.as_ref().map(|c| json!({
            "element": c.element,
            "covers": c.covers,
            "weight": scalar(&c.weight),
        })),
        "values": scalars(f.values()),
    })
}

fn cm_check<S: Scalar>(
    lattice: Option<&str>,
    function: &str,
    bruteforce: bool,
    config: &RunConfig,
) -> CliResult<Report> {
    let f: LatticeFunction<S> = input::function(lattice, function, config)?;
    let v = f.is_cm_with(config.rel_tol);
    let mut out = verdict_json(&v, &f);
    out["weights"] = scalars(f.mobius_weights().weights());
    if bruteforce {
        let b = f.is_cm_bruteforce(f.lattice().len())?;
        out["bruteforce"] = json!({
            "is_cm": b.is_cm,
            "evaluations": b.evaluations,
            "witness": b.witness.as_ref().map(|(args, base, value)| json!({
                "args": args, "base": base, "value": scalar(value),
            })),
            "agrees": b.is_cm == v.is_cm,
        });
    }
    Ok(Report::new(v.is_cm, out))
}

fn cm_power<S: Scalar>(lattice: Option<&str>, function: &str, alpha: f64, config: &RunConfig) -> CliResult<Report> {
    let f: LatticeFunction<S> = input::function(lattice, function, config)?;
    let input_cm = f.is_cm_with(config.rel_tol).is_cm;
    let g = f.power(alpha)?;
    let v = g.is_cm_with(config.rel_tol);
    let d = f.lattice().d_max();
    let mut out = verdict_json(&v, &g);
    out["alpha"] = json!(alpha);
    out["input_is_cm"] = json!(input_cm);
    out["d_max"] = json!(d);
    out["guaranteed"] = json!(input_cm && (alpha.fract() == 0.0 || alpha >= d as f64 - 1.0));
    Ok(Report::new(v.is_cm, out))
}

fn cm_extend<S: Scalar>(
    lattice: &str,
    elements: &[usize],
    function: &str,
    write: Option<&std::path::Path>,
    config: &RunConfig,
) -> CliResult<Report> {
    let host = input::lattice(lattice)?;
    let sub = host.sublattice(elements)?;
    let entries: Vec<(usize, S)> = input::function_entries(function)?;
    let mut local: Vec<Option<S>> = vec![None; sub.embedding.len()];
    for (x, v) in entries {
        let i = sub
            .local_index(x)
            .ok_or_else(|| CliError::Usage(format!("element {x} is not in --elements")))?;
        local[i] = Some(v);
    }
    let values = local
        .into_iter()
        .zip(&sub.embedding)
        .map(|(v, x)| v.ok_or_else(|| CliError::Usage(format!("no value for element {x}"))))
        .collect::<CliResult<Vec<S>>>()?;
    let f = LatticeFunction::new(Arc::clone(&sub.lattice), values)?;
    let v = f.is_cm_with(config.rel_tol);
    if !v.is_cm {
        let mut out = verdict_json(&v, &f);
        out["embedding"] = json!(sub.embedding);
        return Ok(Report::new(false, out));
    }
    let ext = extend_cm(&f, &sub)?;
    if let Some(p) = write {
        write_text(p, &io::write_function(Some(lattice), ext.values()))?;
    }
    Ok(Report::new(
        true,
        json!({
            "embedding": sub.embedding,
            "values": scalars(ext.values()),
            "is_cm": ext.is_cm_with(config.rel_tol).is_cm,
            "restriction_matches": ext.restrict(&sub)? == f,
        }),
    ))
}

fn cm_accompany<S: Scalar>(lattice: Option<&str>, function: &str, m: u32, config: &RunConfig) -> CliResult<Report> {
    let f: LatticeFunction<S> = input::function(lattice, function, config)?;
    let g = poisson_accompany(&f, m)?;
    Ok(Report::new(
        true,
        json!({
            "m": m,
            "values": scalars(g.values()),
            "is_cm": g.is_cm_with(config.rel_tol).is_cm,
            "sup_distance": f.sup_distance(&g)?,
        }),
    ))
}

pub fn cm(cmd: &CmCmd, config: &RunConfig) -> CliResult<Report> {
    match (cmd, config.float) {
        (CmCmd::Check { lattice, function, bruteforce }, false) => {
            cm_check::<Rational>(lattice.as_deref(), function, *bruteforce, config)
        }
        (CmCmd::Check { lattice, function, bruteforce }, true) => {
            cm_check::<f64>(lattice.as_deref(), function, *bruteforce, config)
        }
        (CmCmd::Power { lattice, function, alpha }, false) => {
            cm_power::<Rational>(lattice.as_deref(), function, *alpha, config)
        }
        (CmCmd::Power { lattice, function, alpha }, true) => {
            cm_power::<f64>(lattice.as_deref(), function, *alpha, config)
        }
        (CmCmd::Extend { lattice, elements, function, write }, false) => {
            cm_extend::<Rational>(lattice, elements, function, write.as_deref(), config)
        }
        (CmCmd::Extend { lattice, elements, function, write }, true) => {
            cm_extend::<f64>(lattice, elements, function, write.as_deref(), config)
        }
        (CmCmd::Accompany { lattice, function, m }, false) => {
            cm_accompany::<Rational>(lattice.as_deref(), function, *m, config)
        }
        (CmCmd::Accompany { lattice, function, m }, true) => {
            cm_accompany::<f64>(lattice.as_deref(), function, *m, config)
        }
    }
}

fn distribution_json<S: Scalar>(x: &RandomSubset<S>) -> Value {
    let support: Vec<Value> = x
        .support()
        .into_iter()
        .map(|(a, p)| {
            let mut m = mask(a);
            m["probability"] = scalar(&p);
            m
        })
        .collect();
    json!({
        "n": x.n(),
        "support": support,
        "text": io::write_distribution(x),
    })
}

fn with_write<S: Scalar>(x: &RandomSubset<S>, write: &Option<std::path::PathBuf>) -> CliResult<Value> {
    if let Some(p) = write {
        write_text(p, &io::write_distribution(x))?;
    }
    Ok(distribution_json(x))
}

fn power_json(v: &PowerVerdict) -> Value {
    let mut argmin = mask(v.argmin);
    argmin["q"] = json!(v.q_values[v.argmin as usize]);
    json!({
        "alpha": v.alpha,
        "exists": v.exists,
        "boundary": v.boundary,
        "min_q": v.min_q,
        "argmin": argmin,
        "witness": v.witness.map(|w| {
            let mut m = mask(w);
            m["q"] = json!(v.q_values[w as usize]);
            m
        }),
        "q": v.q_values.iter().enumerate().map(|(a, q)| {
            let mut m = mask(a as u32);
            m["q"] = json!(q);
            m
        }).collect::<Vec<_>>(),
    })
}

fn void_json<S: Scalar>(values: &[S]) -> Value {
    Value::Array(
        values
            .iter()
            .enumerate()
            .map(|(k, v)| {
                let mut m = mask(k as u32);
                m["value"] = scalar(v);
                m
            })
            .collect(),
    )
}

fn invert<S: Scalar>(path: &std::path::Path, write: &Option<std::path::PathBuf>) -> CliResult<Report> {
    let text = input::read(path)?;
    let v = io::parse_void::<S>(&text).map_err(|e| match e {
        Error::Parse { .. } => CliError::Usage(format!("{}: {e}", path.display())),
        other => CliError::Core(other),
    })?;
    match from_void(&v) {
        Ok(x) => Ok(Report::new(true, with_write(&x, write)?)),
        Err(Error::NotAVoidFunctional { witness, mass }) => {
            let mut w = mask(witness);
            w["mass"] = json!(mass);
            Ok(Report::new(false, json!({ "is_void_functional": false, "witness": w })))
        }
        Err(e) => Err(e.into()),
    }
}

pub fn randset(cmd: &RandsetCmd, config: &RunConfig) -> CliResult<Report> {
    match cmd {
        RandsetCmd::Void { dist, write } => {
            let x = input::distribution(dist, config)?;
            let v = x.void_functional();
            if let Some(p) = write {
                write_text(p, &io::write_void(&v))?;
            }
            Ok(Report::new(true, json!({ "n": x.n(), "void": void_json(v.values()) })))
        }
        RandsetCmd::Invert { void, write } => {
            if config.float {
                invert::<f64>(void, write)
            } else {
                invert::<Rational>(void, write)
            }
        }
        RandsetCmd::PowerExists { dist, alpha } => {
            let x = input::distribution(dist, config)?;
            let v = x.power_exists(*alpha)?;
            let mut out = power_json(&v);
            if v.exists {
                out["distribution"] = distribution_json(&v.distribution(x.n())?);
            }
            Ok(Report::new(v.exists, out))
        }
        RandsetCmd::Union { dist, m, write } => {
            let x = input::distribution(dist, config)?;
            Ok(Report::new(true, with_write(&x.union_iid(*m)?, write)?))
        }
        RandsetCmd::Poisson { dist, lambda, write } => {
            let x = input::distribution(dist, config)?;
            Ok(Report::new(true, with_write(&poisson_union(&x, *lambda)?, write)?))
        }
        RandsetCmd::Dist { dist, write } => {
            let x = input::distribution(dist, config)?;
            Ok(Report::new(true, with_write(&x, write)?))
        }
    }
}

pub fn scan(cmd: &ScanCmd, config: &RunConfig) -> CliResult<Report> {
    match cmd {
        ScanCmd::SSet { dist } => {
            let x = input::distribution(dist, config)?;
            let t = config.t_max.unwrap_or(x.n() as f64 + 1.0);
            let s = scan_s(&x, t, config.step)?;
            let mut out = serde_json::to_value(&s).expect("serializable");
            out["boundaries"] = Value::Array(
                s.boundaries
                    .iter()
                    .map(|b| {
                        json!({
                            "alpha": b.alpha,
                            "bracket": [b.bracket.0, b.bracket.1],
                            "subset": mask(b.subset),
                            "sign_change_bound": b.sign_change_bound,
                        })
                    })
                    .collect(),
            );
            let mut rows = vec!["alpha,min_q,argmin,inside,forced".to_string()];
            rows.extend(s.grid.iter().map(|g| {
                format!("{},{},{},{},{}", g.alpha, g.min_q, g.argmin, g.inside as u8, g.forced as u8)
            }));
            Ok(Report::new(true, out).with_csv(rows))
        }
        ScanCmd::MultiInterval { n, k } => match construct_multi_interval(*n, *k) {
            Ok(cert) => {
                let last = cert.final_level();
                Ok(Report::new(
                    last.certified,
                    json!({
                        "n": cert.n,
                        "k": cert.k,
                        "epsilon": cert.epsilon,
                        "delta": cert.delta,
                        "distribution": distribution_json(&cert.x),
                        "levels": cert.levels,
                    }),
                ))
            }
            Err(Error::SearchFailed(reason)) => Ok(Report::new(
                false,
                json!({ "n": n, "k": k, "certified": false, "reason": reason }),
            )),
            Err(e) => Err(e.into()),
        },
        ScanCmd::Schur { n, alpha, x, h } => {
            let s: f64 = x.iter().sum();
            let room = x.iter().take(2).fold(1.0 - s, |a, &v| a.min(v));
            let step = h.unwrap_or_else(|| 1e-5f64.min(0.5 * room));
            let product = schur_condition_check(*n, *alpha, x, step)?;
            Ok(Report::new(
                product > 0.0,
                json!({ "n": n, "alpha": alpha, "x": x, "h": step, "product": product }),
            ))
        }
    }
}

pub fn approx(cmd: &ApproxCmd, _config: &RunConfig) -> CliResult<Report> {
    let ApproxCmd::Psi { m, m_list } = cmd;
    let ms: Vec<u32> = match m {
        Some(m) => vec![*m],
        None if !m_list.is_empty() => m_list.clone(),
        None => return Err(CliError::Usage("approx psi needs --m or --m-list".into())),
    };
    let rows = psi_table(&ms)?;
    let mut csv = vec!["m,t_m,sup_gap,m_gap,d_low,m_d_low,separation".to_string()];
    csv.extend(rows.iter().map(|r| {
        format!(
            "{},{},{},{},{},{},{}",
            r.m,
            r.t_m.map(|t| t.to_string()).unwrap_or_default(),
            r.sup_gap,
            r.m_gap,
            r.d_low,
            r.m_d_low,
            r.separation
        )
    }));
    let mut out = json!({ "rows": rows, "limit": cmdiv::approx::two_over_e_squared() });
    if let Some(m) = m {
        out["lower_bound"] = serde_json::to_value(lower_bound_witness(*m)?).expect("serializable");
    }
    Ok(Report::new(true, out).with_csv(csv))
}

fn tj_json(c: &TjCertificate) -> Value {
    serde_json::to_value(c).expect("serializable")
}

pub fn cmseq(cmd: &CmseqCmd, _config: &RunConfig) -> CliResult<Report> {
    let CmseqCmd::Hankel { x, y, alpha, order, cap } = cmd;
    let x_value = match (x, y) {
        (Some(x), _) => *x,
        (None, Some(y)) => (-y).exp(),
        (None, None) => return Err(CliError::Usage("cmseq hankel needs --x or --y".into())),
    };
    if let Some(n) = order {
        let seq = two_atom(x_value, 2 * n.max(&1) - 1)?.pow(*alpha);
        let v = hankel_psd_check(&seq, *n)?;
        let out = json!({ "x": x_value, "alpha": alpha, "verdict": v });
        return Ok(Report::new(v.is_psd(), out));
    }
    let found = match y {
        Some(y) => laplace_counterexample_bridge_capped(*y, *alpha, *cap),
        None => tj_counterexample_capped(x_value, *alpha, *cap),
    };
    match found {
        Ok(c) => {
            let mut csv = vec!["order,ratio".to_string()];
            csv.extend(c.scanned.iter().map(|(n, r)| format!("{n},{r}")));
            Ok(Report::new(false, tj_json(&c)).with_csv(csv))
        }
        Err(Error::SearchBudgetExceeded { cap }) => Ok(Report::new(
            true,
            json!({ "x": x_value, "alpha": alpha, "psd_through_order": cap }),
        )),
        Err(e) => Err(e.into()),
    }
}
