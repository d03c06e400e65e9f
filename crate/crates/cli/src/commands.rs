use std::fs;
use std::path::Path;
use std::sync::Arc;

use curvcut_core::io::{self, fmt_f64};
use curvcut_core::verify::{check_gradient_estimate, exhaustion_experiment, Instance, Theorem, VerifyError};
use curvcut_core::{
    check_distance_bound, check_semigroup_suite, curvature_profile, exception_set, heat_trace, trace, ExceptionSet,
    ScalarField, Verdict, VerificationReport, WeightedGraph,
};

use crate::inputs::{self, GraphInput};
use crate::{Command, Failure, Opts};

const DEFAULT_GRID: [f64; 4] = [0.1, 0.5, 1.0, 2.0];
const DEFAULT_EXHAUST_TIME: f64 = 2.0;

pub fn run(command: Command, opts: &Opts) -> Result<(), Failure> {
    match command {
        Command::Curvature => curvature(opts),
        Command::Evolve => evolve(opts),
        Command::Verify => verify(opts),
        Command::Bound => bound(opts),
        Command::Exhaust => exhaust(opts),
        Command::Gen => gen(opts),
    }
}

fn write(dir: &Path, name: &str, text: &str) -> Result<(), Failure> {
    fs::create_dir_all(dir).map_err(|e| Failure::Usage(format!("--out {}: {e}", dir.display())))?;
    io::write_text(&dir.join(name), text)?;
    Ok(())
}

fn labels(g: &WeightedGraph, ids: &[usize]) -> String {
    ids.iter().map(|&x| g.label(x)).collect::<Vec<_>>().join(",")
}

fn curvature(opts: &Opts) -> Result<(), Failure> {
    let GraphInput { graph: g, name } = inputs::load_graph(opts)?;
    let dim = inputs::dimension(opts)?;
    let profile = curvature_profile(&g, dim);
    write(&opts.out, "profile.csv", &io::profile_csv(&g, &profile))?;
    write(&opts.out, "profile.json", &io::profile_json(&g, &profile)?)?;
    println!("{name}: {} vertices, dimension {dim}", g.vertex_count());
    let worst = profile.argmin().index();
    println!("minimum curvature {} at vertex {}", profile.get(worst), g.label(worst));
    if let Some(th) = opts.threshold {
        let sel = exception_set(&g, &profile, th)?;
        let bound = sel.bound.map_or("none".into(), |k| k.to_string());
        println!("W = {{{}}}, curvature outside W >= {bound}", labels(&g, sel.set.members()));
    }
    Ok(())
}

fn evolve(opts: &Opts) -> Result<(), Failure> {
    let GraphInput { graph: g, name } = inputs::load_graph(opts)?;
    let w = inputs::exception(&g, opts)?;
    let (f, field_name) = inputs::class_field(&g, opts, &w)?;
    let grid = inputs::grid(opts, &[1.0])?;
    let config = inputs::config(&g, opts)?;
    let heat = heat_trace(&g, f.field(), &grid, &config)?;
    let cut = trace(&g, &f, &grid, &config)?;
    write(&opts.out, "trace_heat.csv", &io::heat_trace_csv(&g, &heat))?;
    write(&opts.out, "trace_cutoff.csv", &io::evolution_trace_csv(&g, &cut))?;
    println!("{name}: W = {{{}}}, field {field_name}", labels(&g, w.members()));
    for (i, t) in cut.times.iter().enumerate() {
        println!(
            "t = {t}: cutoff range [{}, {}] with {} steps, heat range [{}, {}]",
            fmt_f64(cut.fields[i].field().min()),
            fmt_f64(cut.fields[i].field().max()),
            cut.step_counts[i],
            fmt_f64(heat.fields[i].min()),
            fmt_f64(heat.fields[i].max()),
        );
    }
    Ok(())
}

fn distance_report(g: &WeightedGraph, w: &ExceptionSet, instance: Instance) -> Result<VerificationReport, Failure> {
    match check_distance_bound(g, w) {
        Ok(r) => Ok(r.with_instance(instance)),
        Err(VerifyError::NonpositiveCurvature(k)) => {
            Ok(VerificationReport::not_applicable(Theorem::DistanceBound, instance, "nonpositive_curvature_bound", k))
        }
        Err(VerifyError::InfiniteNegativeCurvature(x)) => Ok(VerificationReport::not_applicable(
            Theorem::DistanceBound,
            instance,
            "infinite_negative_curvature_at",
            x as f64,
        )),
        Err(e) => Err(e.into()),
    }
}

fn emit(opts: &Opts, reports: &[VerificationReport]) -> Result<(), Failure> {
    for r in reports {
        write(&opts.out, &format!("{}.json", r.theorem), &io::report_json(r)?)?;
        let worst = r.worst_slack().map_or_else(|| "-".into(), fmt_f64);
        println!("{:<22} {:<15} worst slack {worst}", r.theorem.to_string(), r.verdict.to_string());
        for c in r.failures() {
            println!("  failed: {} measured {} bound {}", c.name, fmt_f64(c.measured), fmt_f64(c.bound));
        }
    }
    write(&opts.out, "summary.csv", &io::summary_csv(reports))?;
    let failed = reports.iter().filter(|r| r.verdict == Verdict::Fail).count();
    if failed > 0 {
        return Err(Failure::Check(format!("{failed} report(s) failed")));
    }
    Ok(())
}

fn verify(opts: &Opts) -> Result<(), Failure> {
    let GraphInput { graph: g, name } = inputs::load_graph(opts)?;
    let w = inputs::exception(&g, opts)?;
    let (f, field_name) = inputs::class_field(&g, opts, &w)?;
    let grid = inputs::grid(opts, &DEFAULT_GRID)?;
    let config = inputs::config(&g, opts)?;
    let instance = Instance::describe(&g, &w).named(name.clone(), name, field_name);

    let suite = check_semigroup_suite(&g, &f, &config)?.with_instance(instance.clone());
    let gradient = match check_gradient_estimate(&g, &f, &grid, &config) {
        Ok(r) => r.with_instance(instance.clone()),
        Err(VerifyError::InfiniteNegativeCurvature(x)) => VerificationReport::not_applicable(
            Theorem::GradientEstimate,
            instance.clone(),
            "infinite_negative_curvature_at",
            x as f64,
        ),
        Err(e) => return Err(e.into()),
    };
    let distance = distance_report(&g, &w, instance)?;
    emit(opts, &[suite, gradient, distance])
}

fn bound(opts: &Opts) -> Result<(), Failure> {
    let GraphInput { graph: g, name } = inputs::load_graph(opts)?;
    let w = inputs::exception(&g, opts)?;
    let instance = Instance::describe(&g, &w).named(name.clone(), name, "");
    let report = distance_report(&g, &w, instance)?;
    if report.verdict == Verdict::NotApplicable {
        println!("distance bound not applicable: curvature outside W is not positive");
    } else {
        println!(
            "max distance to W {} <= bound {}",
            report.measurements["max_distance"],
            fmt_f64(report.measurements["bound"])
        );
    }
    emit(opts, &[report])
}

/// Balls around the first vertex with shrinking radii.
fn default_sets(g: &WeightedGraph) -> Vec<Vec<usize>> {
    let dist = g.distances_to_set(&[0]).expect("vertex 0 exists");
    let ecc = dist.iter().copied().max().unwrap_or(0);
    let step = (ecc / 10).max(1);
    let mut radii: Vec<usize> = (0..ecc).rev().step_by(step).collect();
    if radii.last() != Some(&0) {
        radii.push(0);
    }
    radii.into_iter().map(|r| (0..g.vertex_count()).filter(|&x| dist[x] <= r).collect()).collect()
}

fn exhaust(opts: &Opts) -> Result<(), Failure> {
    let GraphInput { graph: g, name } = inputs::load_graph(opts)?;
    let sets = if opts.w.is_empty() {
        default_sets(&g)
    } else {
        opts.w.iter().map(|spec| inputs::vertex_set(&g, spec)).collect::<Result<_, _>>()?
    };
    let last = Arc::new(ExceptionSet::new(&g, sets.last().expect("at least one set").iter().copied())?);
    let (f, field_name) = inputs::raw_field(&g, opts, &last, || {
        let d = g.distances_to_set(last.members()).expect("nonempty set");
        ScalarField::new(d.into_iter().map(|v| v as f64).collect()).expect("finite distances")
    })?;
    let t = opts.t.unwrap_or(DEFAULT_EXHAUST_TIME);
    let config = inputs::config(&g, opts)?;
    let (report, rows) = exhaustion_experiment(&g, &f, &sets, t, &config)?;
    let first = ExceptionSet::new(&g, sets[0].iter().copied())?;
    let report = report.with_instance(Instance::describe(&g, &first).named(name.clone(), name, field_name));

    let mut csv = String::from("k,set_size,gap,clipped_gap\n");
    for r in &rows {
        csv.push_str(&format!("{},{},{},{}\n", r.index, r.set_size, fmt_f64(r.gap), fmt_f64(r.clipped_gap)));
        println!("k = {:>3}  |W| = {:>4}  gap {}  clipped gap {}", r.index, r.set_size, fmt_f64(r.gap), fmt_f64(r.clipped_gap));
    }
    write(&opts.out, "exhaustion.csv", &csv)?;
    emit(opts, &[report])
}

fn gen(opts: &Opts) -> Result<(), Failure> {
    if opts.generate.is_none() {
        return Err(Failure::Usage("gen requires --gen FAMILY:PARAMS".into()));
    }
    if opts.graph.is_some() {
        return Err(Failure::Usage("gen does not read --graph".into()));
    }
    let GraphInput { graph: g, name } = inputs::load_graph(opts)?;
    write(&opts.out, "graph.edges", &io::write_edge_list(&g))?;
    println!("{name}: {} vertices, {} edges, max degree {}", g.vertex_count(), g.edge_count(), g.max_degree());
    Ok(())
}
