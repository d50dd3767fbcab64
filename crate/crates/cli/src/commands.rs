use ndhermite::harness::{lattice, multilinear_baseline, rmse_of, sample_plane, PlaneSpec};
use ndhermite::ideal::{groebner_basis_json, ideal_member};
use ndhermite::{
    cascaded_divide, continuity_report, derive_data, interpolate, shared_nodes, Axis, DataSource, FunctionSource,
    GridSpec, HermiteData, HermiteInterpolant, MultiIndex, MultiPoly, Rational, Scalar, SplineInterpolant,
    TestFunction, WindowRule,
};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::io::{csv_bytes, emit, emit_json, parse_range, read_json, read_points, CliError};
use crate::{BuildArgs, CompareArgs, DivideArgs, EvalArgs, ResampleArgs, SourceOpts, VerifyArgs, WindowOpts};

type Source<S> = Box<dyn DataSource<S>>;

/// A global interpolant or a spline over the same data.
enum Model<S: Scalar> {
    Global(HermiteInterpolant<S>),
    Spline(SplineInterpolant<S, Source<S>>),
}

impl<S: Scalar> Model<S> {
    fn new(source: Source<S>, opts: &WindowOpts) -> Result<Self, CliError> {
        match &opts.window {
            Some(w) => Ok(Model::Spline(
                SplineInterpolant::new(source, w.clone())?.with_anchor(opts.odd_anchor).with_boundary(opts.boundary),
            )),
            None => {
                let grid = source.grid().clone();
                let rows = grid.points().map(|idx| source.values(&idx)).collect::<Result<Vec<_>, _>>()?;
                Ok(Model::Global(interpolate(&HermiteData::from_point_values(grid, rows)?)))
            }
        }
    }

    fn grid(&self) -> &GridSpec<S> {
        match self {
            Model::Global(h) => h.grid(),
            Model::Spline(s) => s.grid(),
        }
    }

    fn eval(&self, x: &[S], k: &MultiIndex) -> ndhermite::Result<S> {
        match self {
            Model::Global(h) => h.eval(x, k),
            Model::Spline(s) => s.eval(x, k),
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            Model::Global(_) => "global",
            Model::Spline(_) => "spline",
        }
    }
}

fn rule_json(opts: &WindowOpts) -> Value {
    let rule = WindowRule { anchor: opts.odd_anchor, boundary: opts.boundary };
    json!({"window": opts.window, "rule": rule})
}

fn mode(exact: bool) -> &'static str {
    if exact {
        "exact"
    } else {
        "float"
    }
}

/// Residual tolerance for float data: relative to the largest prescribed value.
fn float_tolerance<S: Scalar>(data: &HermiteData<S>) -> f64 {
    let scale = data.grid().points().flat_map(|idx| data.point_values(&idx).to_vec()).map(|v| v.magnitude()).fold(1.0, f64::max);
    1e-9 * scale
}

pub fn build(a: BuildArgs) -> Result<(), CliError> {
    if a.exact {
        build_as::<Rational>(&a)
    } else {
        build_as::<f64>(&a)
    }
}

fn build_as<S: Scalar>(a: &BuildArgs) -> Result<(), CliError> {
    let data = HermiteData::<S>::from_hgrid_json(&read_json(&a.grid)?)?;
    let h = interpolate(&data);
    let residual = h.max_residual(&data)?;
    let tol = if S::EXACT { 0.0 } else { float_tolerance(&data) };
    let pass = residual <= tol;
    if let Some(path) = &a.output {
        let mut v = h.to_factored_json();
        if a.expanded {
            v["expanded"] = h.expanded().to_json();
        }
        emit_json(Some(path), &v)?;
    }
    let grid = data.grid();
    let mut report = json!({
        "mode": mode(S::EXACT),
        "dims": grid.n(),
        "shape": grid.shape(),
        "conditions": grid.condition_count(),
        "degree_bound": grid.axes().iter().map(|ax| ax.total_mult() - 1).collect::<Vec<_>>(),
        "max_residual": residual,
        "tolerance": tol,
        "pass": pass,
    });
    if a.expanded {
        report["degree"] = json!((0..grid.n()).map(|i| h.expanded().deg(i)).collect::<Vec<_>>());
    }
    emit_json(None, &report)?;
    if pass {
        Ok(())
    } else {
        Err(CliError::validation(format!("interpolation residual {residual:e} exceeds {tol:e}")))
    }
}

fn parse_deriv(s: &str, n: usize) -> Result<MultiIndex, CliError> {
    let k = s
        .split(',')
        .map(|t| t.trim().parse::<u32>().map_err(|_| CliError::input(format!("bad derivative order {t:?} in {s:?}"))))
        .collect::<Result<Vec<_>, _>>()?;
    if k.len() != n {
        return Err(CliError::input(format!("derivative {s:?} has {} entries, grid has {n} axes", k.len())));
    }
    Ok(MultiIndex::new(k))
}

pub fn eval(a: EvalArgs) -> Result<(), CliError> {
    if a.exact {
        eval_as::<Rational>(&a)
    } else {
        eval_as::<f64>(&a)
    }
}

fn eval_as<S: Scalar>(a: &EvalArgs) -> Result<(), CliError> {
    let data = HermiteData::<S>::from_hgrid_json(&read_json(&a.grid)?)?;
    let n = data.n();
    let derivs = a.deriv.iter().map(|d| parse_deriv(d, n)).collect::<Result<Vec<_>, _>>()?;
    let points = read_points::<S>(&a.points, n)?;
    let model = Model::new(Box::new(data), &a.window)?;
    let mut orders = vec![MultiIndex::zeros(n)];
    orders.extend(derivs.iter().cloned());
    let rows: Vec<Option<Vec<String>>> = points
        .par_iter()
        .map(|x| {
            let xf: Vec<f64> = x.iter().map(Scalar::to_f64).collect();
            if model.grid().check_inside(&xf).is_err() {
                return Ok(None);
            }
            let mut row: Vec<String> = x.iter().map(ToString::to_string).collect();
            for k in &orders {
                row.push(model.eval(x, k)?.to_string());
            }
            Ok(Some(row))
        })
        .collect::<ndhermite::Result<_>>()?;
    let outside = rows.iter().filter(|r| r.is_none()).count();
    let mut header: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
    header.push("value".into());
    header.extend(derivs.iter().map(|k| format!("d_{}", k.as_slice().iter().map(u32::to_string).collect::<Vec<_>>().join("_"))));
    let body: Vec<Vec<String>> = rows
        .into_iter()
        .zip(&points)
        .filter_map(|(r, x)| match r {
            Some(r) => Some(r),
            None if a.skip_outside => None,
            None => {
                let mut row: Vec<String> = x.iter().map(ToString::to_string).collect();
                row.extend(orders.iter().map(|_| "outside".to_string()));
                Some(row)
            }
        })
        .collect();
    emit(a.output.as_deref(), &csv_bytes(&header, &body)?)?;
    if outside > 0 {
        if a.skip_outside {
            eprintln!("skipped {outside} point(s) outside the grid");
        } else {
            return Err(CliError::domain(format!("{outside} point(s) lie outside the grid hull")));
        }
    }
    Ok(())
}

fn axes_from_ranges(ranges: &[(f64, f64)], step: f64, mult: &[u32]) -> Result<GridSpec<f64>, CliError> {
    if !(step > 0.0) {
        return Err(CliError::input("grid step must be positive"));
    }
    if mult.len() != ranges.len() {
        return Err(CliError::input(format!("{} multiplicities for {} axes", mult.len(), ranges.len())));
    }
    let axes = ranges
        .iter()
        .zip(mult)
        .map(|(&(lo, hi), &nu)| {
            let count = ((hi - lo) / step).round() as usize;
            if ((lo + count as f64 * step) - hi).abs() > 1e-9 * step.max(hi.abs()) {
                return Err(CliError::input(format!("step {step} does not divide the range {lo}:{hi}")));
            }
            let coords = (0..=count).map(|i| if i == count { hi } else { lo + i as f64 * step }).collect();
            Ok(Axis::uniform(coords, nu)?)
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    Ok(GridSpec::new(axes)?)
}

/// Grid ranges, sample lattice and default multiplicity for the named test functions.
struct Preset {
    axes: Vec<(f64, f64)>,
    lattice: Vec<usize>,
    mult: u32,
}

fn preset(name: &str, plane: bool) -> Option<Preset> {
    let p = |axes: &[(f64, f64)], lattice: &[usize], mult| Preset { axes: axes.to_vec(), lattice: lattice.to_vec(), mult };
    match (name, plane) {
        ("exp2d", _) => Some(p(&[(0.0, 1.0); 2], &[11, 11], 2)),
        ("gauss2d", _) => Some(p(&[(0.0, 5.0); 2], &[51, 51], 2)),
        ("gauss3d", _) => Some(p(&[(0.0, 3.0), (0.0, 4.0), (0.0, 2.0)], &[13, 17, 9], 2)),
        ("sinmix3d", false) => Some(p(&[(-7.0, 7.0); 3], &[57, 57, 57], 2)),
        ("sinmix3d", true) => Some(p(&[(0.0, 21.0); 3], &[], 2)),
        _ => None,
    }
}

struct FunctionSetup {
    f: TestFunction,
    grid: GridSpec<f64>,
    lattice: Vec<usize>,
}

fn function_setup(src: &SourceOpts, lattice_override: Option<&Vec<usize>>, plane: bool) -> Result<FunctionSetup, CliError> {
    let spec = src.function.as_deref().ok_or_else(|| CliError::input("either --grid or --function is required"))?;
    let pre = preset(spec, plane);
    let ranges: Vec<(f64, f64)> = match (&src.axes, &pre) {
        (Some(a), _) => a.iter().map(|s| parse_range(s)).collect::<Result<_, _>>()?,
        (None, Some(p)) => p.axes.clone(),
        (None, None) => return Err(CliError::input("--axes is required for expressions")),
    };
    let f = TestFunction::from_spec(spec, Some(ranges.len()))?;
    if f.n() != ranges.len() {
        return Err(CliError::input(format!("{} is a function of {} variables but {} axes were given", f.name(), f.n(), ranges.len())));
    }
    let mult = match &src.mult {
        Some(m) => m.clone(),
        None => vec![pre.as_ref().map_or(2, |p| p.mult); ranges.len()],
    };
    let grid = axes_from_ranges(&ranges, src.grid_step.unwrap_or(1.0), &mult)?;
    let lattice = match (lattice_override, &pre) {
        (Some(l), _) => l.clone(),
        (None, Some(p)) => p.lattice.clone(),
        (None, None) => vec![51; ranges.len()],
    };
    Ok(FunctionSetup { f, grid, lattice })
}

fn plane_points(
    point: &[f64],
    normal: &[f64],
    x1: (f64, f64),
    x2: (f64, f64),
    step: f64,
    grid: &GridSpec<f64>,
) -> Result<(PlaneSpec, Vec<Vec<f64>>, usize), CliError> {
    if grid.n() != 3 {
        return Err(CliError::input("plane sampling needs a 3D grid"));
    }
    let arr = |v: &[f64], what: &str| -> Result<[f64; 3], CliError> {
        v.try_into().map_err(|_| CliError::input(format!("{what} needs three components")))
    };
    let spec = PlaneSpec::with_step(arr(point, "--point")?, arr(normal, "--normal")?, x1, x2, step)?;
    let sample = sample_plane(&spec, &grid.hull());
    if sample.excluded > 0 {
        eprintln!("excluded {} plane point(s) outside the grid hull", sample.excluded);
    }
    Ok((spec, sample.points, sample.excluded))
}

pub fn resample(a: ResampleArgs) -> Result<(), CliError> {
    let (source, reference): (Source<f64>, Option<TestFunction>) = match &a.source.grid {
        Some(path) => (Box::new(HermiteData::<f64>::from_hgrid_json(&read_json(path)?)?), None),
        None => {
            let setup = function_setup(&a.source, None, true)?;
            (Box::new(FunctionSource::new(setup.f.clone(), setup.grid)?), Some(setup.f))
        }
    };
    let model = Model::new(source, &a.window)?;
    let (_, points, _) = plane_points(&a.point, &a.normal, parse_range(&a.x1)?, parse_range(&a.x2)?, a.step, model.grid())?;
    let k = MultiIndex::zeros(3);
    let values = points.par_iter().map(|x| model.eval(x, &k)).collect::<ndhermite::Result<Vec<f64>>>()?;
    let mut header: Vec<String> = vec!["x1".into(), "x2".into(), "x3".into(), "value".into()];
    let mut rows: Vec<Vec<String>> =
        points.iter().zip(&values).map(|(x, v)| x.iter().chain([v]).map(f64::to_string).collect()).collect();
    if let Some(f) = &reference {
        header.push("reference".into());
        let mut diffs = Vec::with_capacity(points.len());
        for ((x, v), row) in points.iter().zip(&values).zip(rows.iter_mut()) {
            let r = f.eval(x)?;
            diffs.push(v - r);
            row.push(r.to_string());
        }
        eprintln!("rmse {:e} over {} points", rmse_of(&diffs), points.len());
    }
    emit(a.output.as_deref(), &csv_bytes(&header, &rows)?)
}

pub fn divide(a: DivideArgs) -> Result<(), CliError> {
    if a.exact {
        divide_as::<Rational>(&a)
    } else {
        divide_as::<f64>(&a)
    }
}

fn divide_as<S: Scalar>(a: &DivideArgs) -> Result<(), CliError> {
    let grid = GridSpec::<S>::from_json(&read_json(&a.grid)?)?;
    if a.groebner {
        return emit_json(a.output.as_deref(), &groebner_basis_json(&grid));
    }
    let g = MultiPoly::<S>::from_json(&read_json(&a.poly)?)?;
    let order: Option<Vec<usize>> = match &a.order {
        Some(o) => Some(
            o.iter()
                .map(|&i| i.checked_sub(1).ok_or_else(|| CliError::input("division order is 1-based")))
                .collect::<Result<_, _>>()?,
        ),
        None => None,
    };
    let d = cascaded_divide(&g, &grid, order.as_deref())?;
    let m = ideal_member(&g, &grid)?;
    let mut v = d.to_json();
    v["mode"] = json!(mode(S::EXACT));
    v["member"] = json!(m.member);
    v["residual"] = json!(m.residual);
    emit_json(a.output.as_deref(), &v)
}

pub fn verify(a: VerifyArgs) -> Result<(), CliError> {
    if a.exact {
        verify_as::<Rational>(&a)
    } else {
        verify_as::<f64>(&a)
    }
}

fn verify_as<S: Scalar>(a: &VerifyArgs) -> Result<(), CliError> {
    let data = HermiteData::<S>::from_hgrid_json(&read_json(&a.grid)?)?;
    let tol = if S::EXACT { 0.0 } else { float_tolerance(&data) };
    if !a.continuity {
        let h = interpolate(&data);
        let residual = h.max_residual(&data)?;
        let pass = residual <= tol;
        emit_json(a.output.as_deref(), &json!({"mode": mode(S::EXACT), "check": "conditions", "max_residual": residual, "tolerance": tol, "pass": pass}))?;
        return if pass { Ok(()) } else { Err(CliError::validation(format!("residual {residual:e} exceeds {tol:e}"))) };
    }
    let grid = data.grid().clone();
    let s = SplineInterpolant::new(data, a.window.window.clone().unwrap_or_default())?
        .with_anchor(a.window.odd_anchor)
        .with_boundary(a.window.boundary);
    let mut nodes = Vec::new();
    let mut pass = true;
    let mut smooth: Option<usize> = None;
    for axis in 0..grid.n() {
        for node in shared_nodes(&s, axis) {
            let r = continuity_report(&s, axis, node, a.probes, a.orders, a.seed)?;
            let guaranteed = grid.axis(axis).mult()[node] as usize;
            let ok = r.max_mismatch.iter().take(guaranteed).all(|&m| m <= tol);
            pass &= ok;
            let through = r.max_mismatch.iter().take_while(|&&m| m <= tol).count();
            smooth = Some(smooth.map_or(through, |s: usize| s.min(through)));
            nodes.push(json!({
                "axis": axis + 1,
                "node": node,
                "coordinate": grid.axis(axis).coord(node).to_json(),
                "max_mismatch": r.max_mismatch,
                "continuous_orders": through,
                "pass": ok,
            }));
        }
    }
    if nodes.is_empty() {
        eprintln!("no window boundary lies on a grid node; nothing to compare");
    }
    let report = json!({
        "mode": mode(S::EXACT),
        "check": "continuity",
        "window": rule_json(&a.window),
        "probes": a.probes,
        "seed": a.seed,
        "tolerance": tol,
        "nodes": nodes,
        "smoothness": smooth.map(|c| format!("C{}", c.saturating_sub(1))),
        "pass": pass,
    });
    emit_json(a.output.as_deref(), &report)?;
    if pass {
        Ok(())
    } else {
        Err(CliError::validation("patches disagree on a shared hyperplane"))
    }
}

pub fn compare(a: CompareArgs) -> Result<(), CliError> {
    let setup = function_setup(&a.source, a.lattice.as_ref(), a.plane)?;
    let FunctionSetup { f, grid, lattice: counts } = setup;
    let model = Model::new(Box::new(FunctionSource::new(f.clone(), grid.clone())?), &a.window)?;
    let (points, excluded, sampling) = if a.plane {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let (spec, pts, excluded) = plane_points(&[10.5; 3], &[s, 0.0, s], (1.0, 18.0), (1.0, 18.0), 0.1, &grid)?;
        (pts, excluded, json!({"plane": spec}))
    } else {
        if counts.len() != grid.n() {
            return Err(CliError::input(format!("--lattice needs {} counts", grid.n())));
        }
        let ranges: Vec<(f64, f64, usize)> = grid.hull().iter().zip(&counts).map(|(&(lo, hi), &c)| (lo, hi, c)).collect();
        (lattice(&ranges), 0, json!({"lattice": counts}))
    };
    let k = MultiIndex::zeros(grid.n());
    let diffs = points
        .par_iter()
        .map(|x| Ok(model.eval(x, &k)? - f.eval(x)?))
        .collect::<ndhermite::Result<Vec<f64>>>()?;
    let mut report = json!({
        "function": f.name(),
        "model": model.kind(),
        "grid": {
            "axes": grid.hull(),
            "step": a.source.grid_step.unwrap_or(1.0),
            "mult": grid.axes().iter().map(|ax| ax.mult()[0]).collect::<Vec<_>>(),
        },
        "window": rule_json(&a.window),
        "sampling": sampling,
        "samples": points.len(),
        "excluded": excluded,
        "rmse": rmse_of(&diffs),
    });
    if a.baseline {
        let values = derive_data(&f, &grid.with_uniform_mult(&vec![1; grid.n()])?)?;
        let base = points
            .par_iter()
            .map(|x| Ok(multilinear_baseline(&values, x)? - f.eval(x)?))
            .collect::<ndhermite::Result<Vec<f64>>>()?;
        report["baseline_rmse"] = json!(rmse_of(&base));
    }
    emit_json(a.output.as_deref(), &report)
}
