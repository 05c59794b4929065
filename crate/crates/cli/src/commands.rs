use std::path::Path;

use anyhow::{bail, Context, Result};
use num::complex::Complex64;
use serde_json::{json, Value};

use hyperscheme::constructions::{direct_product, direct_product_scheme, join, join_scheme};
use hyperscheme::dt_graph::{
    build_ball, deform_ball_kernels, ortho_atom, ortho_measure_integrate, pushforward_vs_haar, BoundaryRay,
    DeformedPoly, DtParams, PolyHypergroup,
};
use hyperscheme::hypergroup::{
    characters, haar, semicharacter_deform, verify_hypergroup, CharacterTable, ExactCharacterTable, FiniteHypergroup,
};
use hyperscheme::io::{HypergroupFile, LoadedHypergroup, LoadedScheme, Num, SchemeFile};
use hyperscheme::random_walk::{
    projection_check, simulate_walk, Convolution, StepDistribution, WalkKernels, WalkResult,
};
use hyperscheme::scalar::{EQ_TOL, PSD_FLOOR};
use hyperscheme::scheme::{
    finite_rigidity_check, from_double_cosets, translation_properties, verify_generalized, verify_scheme,
    AssociationScheme, GeneralizedScheme,
};
use hyperscheme::{AxiomViolation, Rational, Scalar, Tensor3};

use crate::args::{Command, DtReport, DtgraphArgs, Global, WalkArgs};
use crate::load::{self, Data};
use crate::report::{Report, Status};

/// Tolerance for dual convolution and Fourier checks.
const DUAL_TOL: f64 = 1e-9;
const ORTHO_TOL: f64 = 1e-6;
const ROW_TOL: f64 = 1e-12;
const COMPOSITION_TOL: f64 = 1e-10;
const PROPAGATION_TOL: f64 = 1e-10;

pub fn run(command: &Command, global: &Global) -> Result<Report> {
    match command {
        Command::Verify { file } => verify(file),
        Command::Cosets { group, subgroup, output } => cosets(group, subgroup, output.as_deref()),
        Command::Characters { file } => character_table(file, global.seed),
        Command::Dual { file, i, j } => dual(file, *i, *j, global.seed),
        Command::Deform { file, alpha, output } => deform(file, alpha, output.as_deref()),
        Command::Dtgraph(args) => dtgraph(args),
        Command::Product { first, second, output } => construct(first, second, output.as_deref(), false),
        Command::Join { first, second, output } => construct(first, second, output.as_deref(), true),
        Command::Walk(args) => walk(args, global.seed),
    }
}

fn num<T: Scalar>(v: &T) -> Value {
    serde_json::to_value(Num::from_scalar(v)).expect("serializable")
}

fn nums<T: Scalar>(v: &[T]) -> Value {
    Value::Array(v.iter().map(num).collect())
}

fn tensor<T: Scalar>(t: &Tensor3<T>) -> Value {
    let n = t.dim();
    Value::Array((0..n).map(|i| Value::Array((0..n).map(|j| nums(t.fiber(i, j))).collect())).collect())
}

fn complex(z: &Complex64) -> Value {
    if z.im.abs() <= 1e-12 {
        json!(z.re)
    } else {
        json!([z.re, z.im])
    }
}

fn complexes(v: &[Complex64]) -> Value {
    Value::Array(v.iter().map(complex).collect())
}

pub fn violation(v: &AxiomViolation) -> Value {
    json!({
        "axiom": v.axiom.id(),
        "witness": v.witness,
        "detail": v.detail,
    })
}

fn scheme_summary(s: &AssociationScheme) -> Value {
    json!({
        "n_points": s.n_points(),
        "n_relations": s.n_relations(),
        "valencies": s.valencies(),
        "involution": s.involution(),
        "p": tensor(&s.intersection_numbers().map(|&v| Rational::from_int(v as i64))),
        "commutative": s.is_commutative(),
        "symmetric": s.is_symmetric(),
        "unimodular": s.is_unimodular(),
    })
}

fn verify(file: &Path) -> Result<Report> {
    match load::scheme_file(file)?.load()? {
        LoadedScheme::Partition(p) => match verify_scheme(&p) {
            Ok(s) => {
                let mut results = scheme_summary(&s);
                results["kind"] = json!("association");
                if s.is_unimodular() {
                    let (t1, t2) = s.translation_property_check()?;
                    results["t1"] = json!(t1);
                    results["t2"] = json!(t2);
                }
                Ok(Report::new(Status::Pass, results))
            }
            Err(v) => Ok(Report::new(Status::Fail, json!({ "kind": "association", "violation": violation(&v) }))),
        },
        LoadedScheme::Exact(gs) => verify_generalized_report(&gs),
        LoadedScheme::Float(gs) => Ok(verify_generalized_report(&gs)?.tolerance("eq", EQ_TOL)),
    }
}

fn verify_generalized_report<T: Scalar>(gs: &GeneralizedScheme<T>) -> Result<Report> {
    match verify_generalized(gs) {
        Ok(v) => {
            let (t1, t2) = translation_properties(gs, &v);
            let mut results = scheme_summary(&v.scheme);
            results["kind"] = json!("generalized");
            results["p_tilde"] = tensor(&v.p_tilde);
            results["rigid"] = json!(finite_rigidity_check(gs, &v));
            results["t1"] = json!(t1);
            results["t2"] = json!(t2);
            Ok(Report::new(Status::Pass, results))
        }
        Err(v) => Ok(Report::new(
            Status::Fail,
            json!({ "kind": "generalized", "axiom_number": v.generalized_number(), "violation": violation(&v) }),
        )),
    }
}

fn cosets(group: &Path, subgroup: &str, output: Option<&Path>) -> Result<Report> {
    let g = load::group(group)?;
    let (labels, scheme) = from_double_cosets(&g, &load::index_list(subgroup)?)?;
    let file = SchemeFile::from_partition(scheme.partition());
    if let Some(path) = output {
        load::write(path, &file.to_json())?;
    }
    let mut results = scheme_summary(&scheme);
    results["cosets"] = json!(labels.cosets);
    results["double_cosets"] = json!(labels.double_cosets);
    results["scheme"] = serde_json::to_value(&file)?;
    Ok(Report::new(Status::Pass, results))
}

fn hypergroup_violation<T: Scalar>(h: &FiniteHypergroup<T>) -> Option<Report> {
    verify_hypergroup(h).err().map(|v| Report::new(Status::Fail, json!({ "violation": violation(&v) })))
}

fn table_json(t: &CharacterTable) -> Value {
    json!({
        "chars": t.chars.iter().map(|a| complexes(a)).collect::<Vec<_>>(),
        "haar": t.haar,
        "plancherel": t.plancherel,
        "attempts": t.attempts,
        "max_residual": t.max_residual,
        "parseval_residual": t.parseval_residual,
    })
}

fn exact_json(t: &ExactCharacterTable) -> Value {
    json!({
        "chars": t.chars.iter().map(|a| nums(a)).collect::<Vec<_>>(),
        "haar": nums(&t.haar),
        "plancherel": nums(&t.plancherel),
    })
}

/// Character table plus, for exact input, its rational reconstruction.
fn tables(
    h: &LoadedHypergroup,
    seed: u64,
) -> Result<std::result::Result<(CharacterTable, Option<ExactCharacterTable>), Report>> {
    Ok(match h {
        LoadedHypergroup::Exact(h) => match hypergroup_violation(h) {
            Some(r) => Err(r),
            None => {
                let t = characters(h, seed)?;
                let exact = ExactCharacterTable::reconstruct(h, &t);
                Ok((t, exact))
            }
        },
        LoadedHypergroup::Float(h) => match hypergroup_violation(h) {
            Some(r) => Err(r),
            None => Ok((characters(h, seed)?, None)),
        },
    })
}

fn character_table(file: &Path, seed: u64) -> Result<Report> {
    let h = load::hypergroup(file)?;
    let (table, exact) = match tables(&h, seed)? {
        Ok(t) => t,
        Err(r) => return Ok(r.seed(seed)),
    };
    let mut results = table_json(&table);
    if let Some(e) = &exact {
        results["exact"] = exact_json(e);
    }
    let ok = table.max_residual <= EQ_TOL && table.parseval_residual <= EQ_TOL;
    Ok(Report::pass_if(ok, results).tolerance("eq", EQ_TOL).seed(seed))
}

fn dual(file: &Path, i: usize, j: usize, seed: u64) -> Result<Report> {
    let h = load::hypergroup(file)?;
    let (table, exact) = match tables(&h, seed)? {
        Ok(t) => t,
        Err(r) => return Ok(r.seed(seed)),
    };
    if i >= table.n_chars() || j >= table.n_chars() {
        bail!("character index out of range: the table has {} characters", table.n_chars());
    }
    let coeffs = table.dual_convolution(i, j)?;
    let mut ok = coeffs.iter().all(|z| z.re >= -DUAL_TOL && z.im.abs() <= DUAL_TOL);
    let mut results = json!({ "i": i, "j": j, "coefficients": complexes(&coeffs) });
    if let Some(e) = &exact {
        let c = e.dual_convolution(i, j);
        ok = c.iter().all(|v| *v >= Rational::from_int(0));
        results["exact"] = nums(&c);
    }
    results["nonnegative"] = json!(ok);
    Ok(Report::pass_if(ok, results).tolerance("dual", DUAL_TOL).seed(seed))
}

fn deformed_report<T: Scalar>(h: &FiniteHypergroup<T>, alpha: &[T], output: Option<&Path>) -> Result<Report> {
    if let Some(r) = hypergroup_violation(h) {
        return Ok(r);
    }
    let d = semicharacter_deform(h, alpha)?;
    let file = HypergroupFile::from_hypergroup(&d);
    if let Some(path) = output {
        load::write(path, &file.to_json())?;
    }
    let w = haar(&d);
    Ok(Report::new(Status::Pass, json!({ "hypergroup": file, "haar": nums(&w.left), "unimodular": w.unimodular })))
}

fn deform(file: &Path, alpha: &str, output: Option<&Path>) -> Result<Report> {
    let alpha = load::number_list(alpha)?;
    match (load::hypergroup(file)?, load::rationals(&alpha)) {
        (LoadedHypergroup::Exact(h), Some(a)) => deformed_report(&h, &a, output),
        (LoadedHypergroup::Exact(h), None) => deformed_report(&h.to_f64(), &load::floats(&alpha)?, output),
        (LoadedHypergroup::Float(h), _) => {
            Ok(deformed_report(&h, &load::floats(&alpha)?, output)?.tolerance("eq", EQ_TOL))
        }
    }
}

fn grid_points(args: &DtgraphArgs, s0: f64, s1: f64) -> Result<Vec<f64>> {
    if let Some(x) = args.x {
        return Ok(vec![x]);
    }
    let (lo, hi, n) = match &args.grid {
        Some(g) => {
            let parts: Vec<&str> = g.split(':').collect();
            let [lo, hi, n] = parts.as_slice() else { bail!("grid must be lo:hi:n, got {g:?}") };
            (lo.parse::<f64>()?, hi.parse::<f64>()?, n.parse::<usize>()?)
        }
        None => (s0, s1, 9),
    };
    Ok(match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
    })
}

fn dtgraph(args: &DtgraphArgs) -> Result<Report> {
    let p = DtParams::new(args.a, args.b)?;
    let (s0, s1) = p.special_points();
    let mut results = json!({ "params": { "a": args.a, "b": args.b }, "s0": s0, "s1": s1 });
    let report = match args.report {
        DtReport::Summary => {
            let r = args.radius.unwrap_or(4);
            results["q"] = json!(p.q());
            results["sphere_sizes"] = json!((0..=r).map(|h| p.sphere_size(h).to_string()).collect::<Vec<_>>());
            results["haar_weights"] = nums(&(0..=r).map(|h| p.haar_weight(h)).collect::<Vec<_>>());
            results["atom"] = json!(ortho_atom(p));
            if let Some(x) = args.x {
                results["poly_values"] = json!(p.poly_values(r, x));
            }
            Report::new(Status::Pass, results)
        }
        DtReport::Psd => {
            let r = args.radius.unwrap_or(4);
            let ball = build_ball(p, r)?;
            let points = grid_points(args, s0, s1)?;
            let eigs: Vec<f64> = points.iter().map(|&x| ball.gram_min_eig(x)).collect();
            let ok = eigs.iter().all(|&e| e >= PSD_FLOOR);
            results["radius"] = json!(r);
            results["vertices"] = json!(ball.len());
            results["x"] = json!(points);
            results["min_eig"] = json!(eigs);
            Report::pass_if(ok, results).tolerance("psd_floor", PSD_FLOOR)
        }
        DtReport::Ortho => {
            let d = args.degree;
            let mut worst = 0.0f64;
            for m in 0..=d {
                for n in m..=d {
                    let v = ortho_measure_integrate(p, |x| {
                        let vals = p.poly_values(n, x);
                        vals[m] * vals[n]
                    })?;
                    let want = if m == n { 1.0 / p.haar_weight(n).to_f64() } else { 0.0 };
                    worst = worst.max((v - want).abs());
                }
            }
            results["degree"] = json!(d);
            results["atom"] = json!(ortho_atom(p));
            results["max_residual"] = json!(worst);
            Report::pass_if(worst <= ORTHO_TOL, results).tolerance("ortho", ORTHO_TOL)
        }
        DtReport::Deform => {
            let r = args.radius.unwrap_or(6);
            let ball = build_ball(p, r)?;
            let k = deform_ball_kernels(&ball, &BoundaryRay::new(&ball), args.deform_c);
            let diag = k.diagnostics();
            let comp = k.composition_residual()?;
            results["radius"] = json!(r);
            results["c"] = json!(args.deform_c);
            results["x_c"] = json!(k.x_c());
            results["alpha"] = json!(k.alpha());
            results["diagnostics"] = serde_json::to_value(diag)?;
            results["composition_residual"] = json!(comp);
            Report::pass_if(diag.max_row_residual <= ROW_TOL && comp <= COMPOSITION_TOL, results)
                .tolerance("row_sum", ROW_TOL)
                .tolerance("composition", COMPOSITION_TOL)
        }
        DtReport::Pushforward => {
            let rep = pushforward_vs_haar(p, args.deform_c)?;
            let consistent = (rep.pf1_ball - rep.pf1).abs() <= COMPOSITION_TOL
                && (rep.haar1_deformed - rep.haar1).abs() <= COMPOSITION_TOL
                && (rep.haar1_semicharacter - rep.haar1).abs() <= COMPOSITION_TOL;
            results["c"] = json!(args.deform_c);
            results["pushforward"] = serde_json::to_value(rep)?;
            results["consistent"] = json!(consistent);
            results["pushforward_equals_haar"] = json!((rep.pf1 - rep.haar1).abs() <= COMPOSITION_TOL);
            Report::pass_if(consistent, results).tolerance("closed_form", COMPOSITION_TOL)
        }
    };
    Ok(report)
}

fn as_generalized_exact(
    s: LoadedScheme,
) -> Result<std::result::Result<GeneralizedScheme<Rational>, GeneralizedScheme<f64>>> {
    Ok(match s {
        LoadedScheme::Partition(p) => {
            let s = verify_scheme(&p).map_err(hyperscheme::Error::from)?;
            Ok(s.canonical_generalized()?)
        }
        LoadedScheme::Exact(gs) => Ok(gs),
        LoadedScheme::Float(gs) => Err(gs),
    })
}

fn scheme_result<T: Scalar>(gs: &GeneralizedScheme<T>, output: Option<&Path>, extra: Value) -> Result<Report> {
    let file = SchemeFile::from_generalized(gs);
    if let Some(path) = output {
        load::write(path, &file.to_json())?;
    }
    let mut report = verify_generalized_report(gs)?;
    report.results["scheme"] = serde_json::to_value(&file)?;
    report.results["construction"] = extra;
    Ok(report)
}

fn hypergroup_result<T: Scalar>(h: &FiniteHypergroup<T>, output: Option<&Path>, extra: Value) -> Result<Report> {
    let file = HypergroupFile::from_hypergroup(h);
    if let Some(path) = output {
        load::write(path, &file.to_json())?;
    }
    let report = match verify_hypergroup(h) {
        Ok(rep) => {
            let w = haar(h);
            Report::new(
                Status::Pass,
                json!({
                    "commutative": rep.commutative,
                    "symmetric": rep.symmetric,
                    "haar": nums(&w.left),
                    "unimodular": w.unimodular,
                }),
            )
        }
        Err(v) => Report::new(Status::Fail, json!({ "violation": violation(&v) })),
    };
    let mut report = report;
    report.results["hypergroup"] = serde_json::to_value(&file)?;
    report.results["construction"] = extra;
    Ok(report)
}

fn product_or_join_schemes<T: Scalar>(
    a: &GeneralizedScheme<T>,
    b: &GeneralizedScheme<T>,
    output: Option<&Path>,
    is_join: bool,
) -> Result<Report> {
    if is_join {
        let j = join_scheme(a, b)?;
        let extra = json!({ "kind": "join", "layout": j.index, "scale": num(&j.scale) });
        scheme_result(&j.result, output, extra)
    } else {
        scheme_result(&direct_product_scheme(a, b)?, output, json!({ "kind": "product" }))
    }
}

fn product_or_join_hypergroups<T: Scalar>(
    a: &FiniteHypergroup<T>,
    b: &FiniteHypergroup<T>,
    output: Option<&Path>,
    is_join: bool,
) -> Result<Report> {
    if is_join {
        let j = join(a, b)?;
        let extra = json!({ "kind": "join", "layout": j.index, "scale": num(&j.scale) });
        hypergroup_result(&j.result, output, extra)
    } else {
        hypergroup_result(&direct_product(a, b), output, json!({ "kind": "product" }))
    }
}

fn construct(first: &Path, second: &Path, output: Option<&Path>, is_join: bool) -> Result<Report> {
    match (load::data(first)?, load::data(second)?) {
        (Data::Scheme(a), Data::Scheme(b)) => match (as_generalized_exact(a)?, as_generalized_exact(b)?) {
            (Ok(a), Ok(b)) => product_or_join_schemes(&a, &b, output, is_join),
            (a, b) => {
                let f = |s: std::result::Result<GeneralizedScheme<Rational>, GeneralizedScheme<f64>>| {
                    s.map_or_else(|f| f, |e| e.to_f64())
                };
                Ok(product_or_join_schemes(&f(a), &f(b), output, is_join)?.tolerance("eq", EQ_TOL))
            }
        },
        _ => match (load::hypergroup(first)?, load::hypergroup(second)?) {
            (LoadedHypergroup::Exact(a), LoadedHypergroup::Exact(b)) => {
                product_or_join_hypergroups(&a, &b, output, is_join)
            }
            (a, b) => {
                let f = |h: LoadedHypergroup| match h {
                    LoadedHypergroup::Exact(h) => h.to_f64(),
                    LoadedHypergroup::Float(h) => h,
                };
                Ok(product_or_join_hypergroups(&f(a), &f(b), output, is_join)?.tolerance("eq", EQ_TOL))
            }
        },
    }
}

fn walk_report<H: Convolution>(
    kern: &WalkKernels,
    h: &H,
    mu: &StepDistribution<H::Value>,
    args: &WalkArgs,
    seed: u64,
    params: Value,
) -> Result<Report> {
    let mu_f = mu.to_f64();
    let walk: WalkResult = simulate_walk(kern, args.start, &mu_f, args.steps, args.trials, seed)?;
    let check = projection_check(&walk, kern, h, mu, args.steps)?;
    let mut ok = check.tv <= args.tv_tol;
    let mut results = json!({
        "params": params,
        "start": args.start,
        "steps": args.steps,
        "trials": args.trials,
        "mu": mu_f.weights(),
        "empirical": check.empirical,
        "convolution_power": check.convolution_power,
        "tv": check.tv,
    });
    let mut report_tols = vec![("tv", args.tv_tol)];
    if args.exact {
        ok &= check.propagation_residual <= PROPAGATION_TOL;
        results["exact_projection"] = json!(check.exact_projection);
        results["propagation_residual"] = json!(check.propagation_residual);
        report_tols.push(("propagation", PROPAGATION_TOL));
    }
    let mut report = Report::pass_if(ok, results).seed(seed);
    for (k, v) in report_tols {
        report = report.tolerance(k, v);
    }
    Ok(report)
}

fn walk(args: &WalkArgs, seed: u64) -> Result<Report> {
    let mu_nums = load::number_list(&args.mu)?;
    let mu_exact = load::rationals(&mu_nums).map(StepDistribution::new).transpose()?;
    let mu_f = StepDistribution::new(load::floats(&mu_nums)?)?;
    if let Some(spec) = &args.dtgraph {
        let parts: Vec<&str> = spec.split(',').map(str::trim).collect();
        let (a, b, r, c) = match parts.as_slice() {
            [a, b, r] => (a.parse()?, b.parse()?, r.parse()?, 0.0),
            [a, b, r, c] => (a.parse()?, b.parse()?, r.parse()?, c.parse()?),
            _ => bail!("--dtgraph takes a,b,R[,c], got {spec:?}"),
        };
        let p = DtParams::new(a, b)?;
        let ball = build_ball(p, r)?;
        let k = deform_ball_kernels(&ball, &BoundaryRay::new(&ball), c);
        let kern = WalkKernels::from_ball(&k);
        let params = json!({ "a": a, "b": b, "radius": r, "c": c, "x_c": k.x_c() });
        return match (&mu_exact, c == 0.0) {
            (Some(mu), true) => walk_report(&kern, &PolyHypergroup::new(p), mu, args, seed, params),
            _ => {
                let degree = (args.steps * mu_f.max_support()).max(1);
                walk_report(&kern, &DeformedPoly::new(p, k.x_c(), degree)?, &mu_f, args, seed, params)
            }
        };
    }
    let path = args.scheme.as_deref().context("a scheme file or --dtgraph is required")?;
    let params = json!({ "scheme": path.display().to_string() });
    match as_generalized_exact(load::scheme_file(path)?.load()?)? {
        Ok(gs) => {
            let v = verify_generalized(&gs)?;
            let h = FiniteHypergroup::from_generalized(&gs, &v);
            let kern = WalkKernels::from_scheme(&gs.to_f64());
            match &mu_exact {
                Some(mu) => walk_report(&kern, &h, mu, args, seed, params),
                None => walk_report(&kern, &h.to_f64(), &mu_f, args, seed, params),
            }
        }
        Err(gs) => {
            let v = verify_generalized(&gs)?;
            let h = FiniteHypergroup::from_generalized(&gs, &v);
            walk_report(&WalkKernels::from_scheme(&gs), &h, &mu_f, args, seed, params)
        }
    }
}
