use std::fs;
use std::path::Path;

use fkglab::degree::{self, DegreeSetDistribution};
use fkglab::lattice::{Point, PointSet};
use fkglab::measure::{self, Measure};
use fkglab::percolation::{self, EdgeGraph, CLASS_NAMES};
use fkglab::rational::{self, Rational};
use fkglab::realization::{self, Realization, RealizationCheck};
use fkglab::strong::{self, InequalityReport, Partition};
use fkglab::Result;
use serde_json::{json, Value};

use crate::report::{Outcome, RunVerdict};

fn read(path: &Path) -> Result<String> {
    Ok(fs::read_to_string(path)?)
}

pub fn load_measure(path: &Path) -> Result<Measure> {
    Measure::from_json(&read(path)?)
}

pub fn load_partition(path: &Path) -> Result<Partition> {
    Partition::from_json(&read(path)?)
}

pub fn load_realization(path: &Path) -> Result<Realization> {
    Realization::from_json(&read(path)?)
}

pub fn load_graph(path: &Path) -> Result<EdgeGraph> {
    EdgeGraph::parse(&read(path)?)
}

/// Set notation for a point, coordinates 1-based: `{1,3}` or `{}`.
pub fn coords(p: Point) -> String {
    let items: Vec<String> = (0..p.dim())
        .filter(|&i| p.coord(i))
        .map(|i| (i + 1).to_string())
        .collect();
    format!("{{{}}}", items.join(","))
}

fn fmt(r: &Rational) -> String {
    rational::format(r)
}

fn comparison(r: &InequalityReport) -> String {
    let op = if r.lhs > r.rhs {
        ">"
    } else if r.lhs == r.rhs {
        "="
    } else {
        "<"
    };
    format!("{} {op} {}", fmt(&r.lhs), fmt(&r.rhs))
}

fn inequality_lines(r: &InequalityReport) -> Vec<String> {
    vec![
        format!("lhs     {}", fmt(&r.lhs)),
        format!("rhs     {}", fmt(&r.rhs)),
        format!("margin  {}", fmt(&r.margin)),
        comparison(r),
    ]
}

fn set_json(s: &PointSet) -> Value {
    json!(s.to_strings())
}

pub fn check_fkg(path: &Path) -> Result<Outcome> {
    let mu = load_measure(path)?;
    Ok(match measure::check_fkg_property(&mu) {
        None => Outcome::new(
            "check-fkg",
            RunVerdict::Holds,
            Value::Null,
            vec!["lattice condition holds for every pair".into()],
        ),
        Some(v) => {
            let lines = vec![
                format!("a = {} {}", v.a, coords(v.a)),
                format!("b = {} {}", v.b, coords(v.b)),
                format!("mu(a v b) mu(a ^ b) = {}", fmt(&v.lhs)),
                format!("mu(a) mu(b)         = {}", fmt(&v.rhs)),
                format!("{} < {}", fmt(&v.lhs), fmt(&v.rhs)),
            ];
            Outcome::new(
                "check-fkg",
                RunVerdict::Violated,
                serde_json::to_value(&v)?,
                lines,
            )
        }
    })
}

pub fn check_pa(path: &Path) -> Result<Outcome> {
    let mu = load_measure(path)?;
    Ok(match measure::check_positive_association(&mu)? {
        None => Outcome::new(
            "check-pa",
            RunVerdict::Holds,
            Value::Null,
            vec!["positive association holds for every pair of up-sets".into()],
        ),
        Some(v) => {
            let lines = vec![
                format!("E1 = {:?}", v.first.to_strings()),
                format!("E2 = {:?}", v.second.to_strings()),
                format!("mu(E1 n E2) - mu(E1) mu(E2) = {}", fmt(&v.gap)),
            ];
            let w = json!({
                "first": set_json(&v.first),
                "second": set_json(&v.second),
                "gap": fmt(&v.gap),
            });
            Outcome::new("check-pa", RunVerdict::Violated, w, lines)
        }
    })
}

fn check_dims(mu: &Measure, p: &Partition) -> Result<()> {
    if mu.dim() != p.dim() {
        return Err(fkglab::Error::DimensionMismatch {
            left: mu.dim(),
            right: p.dim(),
        });
    }
    Ok(())
}

pub fn strong(measure_path: &Path, partition_path: &Path) -> Result<Outcome> {
    let mu = load_measure(measure_path)?;
    let p = load_partition(partition_path)?;
    check_dims(&mu, &p)?;
    let (a, b, c) = p.masses(&mu)?;
    let r = strong::check_strong_inequality(&mu, &p)?;
    let mut lines = vec![
        format!("mu(A)   {}", fmt(&a)),
        format!("mu(B)   {}", fmt(&b)),
    ];
    for (i, ci) in c.iter().enumerate() {
        lines.push(format!("mu(C{})  {}", i + 1, fmt(ci)));
    }
    lines.extend(inequality_lines(&r));
    let w = json!({
        "lhs": fmt(&r.lhs),
        "rhs": fmt(&r.rhs),
        "margin": fmt(&r.margin),
        "masses": {
            "A": fmt(&a),
            "B": fmt(&b),
            "C": c.iter().map(fmt).collect::<Vec<_>>(),
        },
    });
    Ok(Outcome::new(
        "strong",
        RunVerdict::from_holds(r.holds()),
        w,
        lines,
    ))
}

pub fn trace(measure_path: &Path, partition_path: &Path) -> Result<Outcome> {
    let mu = load_measure(measure_path)?;
    let p = load_partition(partition_path)?;
    check_dims(&mu, &p)?;
    let t = strong::induction_trace(&mu, &p)?;
    let check = strong::verify_induction_step(&t);
    let join = |v: &[Rational]| v.iter().map(fmt).collect::<Vec<_>>().join(" ");
    let mut lines = vec![
        format!("q        {}", fmt(&t.q)),
        format!("a0       {}", fmt(&t.a0)),
        format!("b0       {}", fmt(&t.b0)),
        format!("d        {}", fmt(&t.d)),
        format!("c+       {}", join(&t.c_plus)),
        format!("c°       {}", join(&t.c_circ)),
        format!("c-       {}", join(&t.c_minus)),
    ];
    match (check.failed, check.orientation) {
        (None, Some(o)) => lines.push(format!("orientation  {}", orientation_name(o))),
        (Some(ob), _) => lines.push(format!(
            "failed obligation  {}",
            serde_json::to_value(ob)?.as_str().unwrap_or("")
        )),
        (None, None) => {}
    }
    let w = json!({ "trace": t, "check": check });
    Ok(Outcome::new(
        "trace",
        RunVerdict::from_holds(check.holds()),
        w,
        lines,
    ))
}

fn orientation_name(o: strong::FaceOrientation) -> &'static str {
    match o {
        strong::FaceOrientation::UpperFace => "upper-face",
        strong::FaceOrientation::LowerFace => "lower-face",
        strong::FaceOrientation::Either => "either",
    }
}

fn measure_lines(mu: &Measure) -> Vec<String> {
    (0..mu.weights().len())
        .map(|i| {
            let p = Point::new(i as u32, mu.dim()).expect("index in range");
            format!("{p}  {}", fmt(mu.weight_at(i)))
        })
        .collect()
}

pub fn mu_fixed(n: usize, out: Option<&Path>) -> Result<Outcome> {
    let mu = measure::fixed_point_measure(n)?;
    if let Some(path) = out {
        fs::write(path, mu.to_json())?;
    }
    let w = json!({ "measure": mu.to_file() });
    Ok(Outcome::new(
        "mu-fixed",
        RunVerdict::Holds,
        w,
        measure_lines(&mu),
    ))
}

fn realization_lines(r: &Realization) -> Vec<String> {
    r.sources()
        .iter()
        .enumerate()
        .map(|(j, p)| match r.names().get(j) {
            Some(name) => format!("W{}  {}  {name}", j + 1, fmt(p)),
            None => format!("W{}  {}", j + 1, fmt(p)),
        })
        .collect()
}

pub fn realize(measure_path: &Path, out: &Path) -> Result<Outcome> {
    let mu = load_measure(measure_path)?;
    let r = realization::realize(&mu)?;
    let check = realization::verify_realization(&r, &mu)?;
    fs::write(out, r.to_json())?;
    let mut lines = vec![format!("sources {}", r.sources().len())];
    lines.extend(realization_lines(&r));
    lines.push(format!("written {}", out.display()));
    let w = json!({ "realization": r.to_file() });
    Ok(Outcome::new(
        "realize",
        RunVerdict::from_holds(check.holds()),
        w,
        lines,
    ))
}

pub fn verify_realization(realization_path: &Path, measure_path: &Path) -> Result<Outcome> {
    let r = load_realization(realization_path)?;
    let mu = load_measure(measure_path)?;
    let check = realization::verify_realization(&r, &mu)?;
    let (lines, w) = match &check {
        RealizationCheck::Holds => (vec!["pushforward equals the measure".to_string()], Value::Null),
        RealizationCheck::NotMonotone {
            output,
            assignment,
            bit,
        } => (
            vec![format!(
                "output {} is not monotone: raising source {} at assignment {assignment:#b} drops it",
                output + 1,
                bit + 1
            )],
            json!({ "output": output + 1, "assignment": assignment, "bit": bit + 1 }),
        ),
        RealizationCheck::LawMismatch {
            point,
            expected,
            actual,
        } => (
            vec![format!(
                "law mismatch at {point}: expected {}, pushforward {}",
                fmt(expected),
                fmt(actual)
            )],
            json!({ "point": point.to_string(), "expected": fmt(expected), "actual": fmt(actual) }),
        ),
    };
    Ok(Outcome::new(
        "verify-realization",
        RunVerdict::from_holds(check.holds()),
        w,
        lines,
    ))
}

pub fn percolation(
    graph_path: &Path,
    t: (usize, usize, usize),
    mc: Option<(u64, u64)>,
    workers: usize,
) -> Result<Outcome> {
    let g = load_graph(graph_path)?;
    let probs = percolation::exact_triple_probs_with_workers(&g, t, workers)?;
    let r = percolation::check_percolation_inequality(&probs);
    let mut lines: Vec<String> = CLASS_NAMES
        .iter()
        .zip(probs.as_array())
        .map(|(name, p)| format!("{name:<6} {}", fmt(p)))
        .collect();
    lines.extend(inequality_lines(&r));
    let mut w = json!({ "probabilities": probs, "inequality": r });
    if let Some((samples, seed)) = mc {
        let est = percolation::mc_triple_probs(&g, t, samples, seed, workers)?;
        lines.push(format!(
            "monte carlo  samples {samples}  seed {seed}  half-width {:.6}",
            est.half_width
        ));
        for (name, f) in CLASS_NAMES.iter().zip(est.freqs) {
            lines.push(format!("{name:<6} {f:.6}"));
        }
        lines.push(format!(
            "exact values inside interval: {}",
            est.covers(&probs)
        ));
        w["monteCarlo"] = json!({
            "estimate": est,
            "covers": est.covers(&probs),
        });
    }
    Ok(Outcome::new(
        "percolation",
        RunVerdict::from_holds(r.holds()),
        w,
        lines,
    ))
}

fn sig6(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    let digits = 5 - x.abs().log10().floor() as i32;
    format!("{:.*}", digits.max(0) as usize, x)
}

pub fn degree_distribution_lines(dist: &DegreeSetDistribution) -> Vec<String> {
    dist.probs
        .iter()
        .enumerate()
        .map(|(k, p)| format!("{k}  {}  {}", fmt(p), sig6(rational::to_f64(p))))
        .collect()
}

pub fn degree(n: usize, mc: Option<(u64, u64)>, force: bool, workers: usize) -> Result<Outcome> {
    let dist = degree::exact_degree_distribution_with(n, workers, force)?;
    let mut lines = degree_distribution_lines(&dist);
    let mut holds = true;
    let mut corollary = Vec::new();
    for k in 0..=2 * n {
        let r = degree::check_degree_corollary(&dist, k)?;
        holds &= r.holds();
        lines.push(format!("k = {k}  {}  {}", comparison(&r), r.verdict));
        corollary.push(json!({ "k": k, "report": r }));
    }
    let central = degree::check_central_bound(&dist);
    holds &= central.verdict.holds();
    lines.push(format!(
        "central  {} <= {}  {}  cap {}  limit {}",
        fmt(&central.lhs),
        fmt(&central.rhs),
        central.verdict,
        sig6(central.cap),
        sig6(central.limit)
    ));
    let mut w = json!({
        "distribution": dist,
        "corollary": corollary,
        "central": central,
    });
    if let Some((samples, seed)) = mc {
        let est = degree::mc_degree_distribution(n, samples, seed, workers)?;
        lines.push(format!(
            "monte carlo  samples {samples}  seed {seed}  half-width {:.6}",
            est.half_width
        ));
        for (k, f) in est.freqs.iter().enumerate() {
            lines.push(format!("{k}  {f:.6}"));
        }
        lines.push(format!(
            "exact values inside interval: {}",
            est.covers(&dist)
        ));
        w["monteCarlo"] = json!({ "estimate": est, "covers": est.covers(&dist) });
    }
    Ok(Outcome::new(
        "degree",
        RunVerdict::from_holds(holds),
        w,
        lines,
    ))
}
