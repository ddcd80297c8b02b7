//! Command implementations. Every report line goes to stdout with floats
//! printed at 17 significant digits so identical invocations are
//! byte-identical.

use std::io::Write;

use nalgebra::Matrix2;

use spk2d::analysis::{
    asymptotic_fit, classify_from_beta, classify_holonomy, closed_form_holonomy,
    is_integral_trace, kodaira_compatible, SingularityKind,
};
use spk2d::connection::{connection_form, curvature_residual_with, lc_deviation, pde_residual};
use spk2d::fields::PointPolar;
use spk2d::transport::{
    holonomy_circle_with, parallel_transport_with, Frame, Path, TransportError,
};

use crate::util::{fmt_f, fmt_matrix, integrator_options, load_model, model_echo, parse_grid};
use crate::{CliError, QuantityArg};

fn transport_error(e: TransportError) -> CliError {
    match e {
        TransportError::NoConvergence { .. } => CliError::numeric(e.to_string()),
        _ => CliError::domain(e.to_string()),
    }
}

pub fn verify(model_arg: &str, grid_arg: &str, tol: f64, side: f64) -> Result<bool, CliError> {
    let spec = load_model(model_arg)?;
    let grid = parse_grid(grid_arg)?;
    let opts = integrator_options()?;
    let data = spec.build().map_err(|e| CliError::domain(e.to_string()))?;
    let form = connection_form(&data);

    let mut max_lap_h = 0.0f64;
    let mut max_res = 0.0f64;
    for p in grid.points() {
        let (r1, r2) = pde_residual(&data, &p);
        max_lap_h = max_lap_h.max(r1.abs());
        max_res = max_res.max(r2.abs());
    }

    // flatness probe wherever the square loop stays inside the domain
    let mut max_curv = 0.0f64;
    let mut curv_points = 0usize;
    let margin = side * std::f64::consts::SQRT_2 / 2.0;
    for p in grid.points() {
        if p.r() <= side || p.r() + margin >= 1.0 {
            continue;
        }
        let res = curvature_residual_with(&form, &p, side, &opts).map_err(transport_error)?;
        max_curv = max_curv.max(res);
        curv_points += 1;
    }

    println!("command: verify");
    println!("model: {}", model_echo(&spec));
    println!(
        "grid: nr={} ntheta={} rmin={} rmax={}",
        grid.n_r,
        grid.n_theta,
        fmt_f(grid.r_min),
        fmt_f(grid.r_max)
    );
    println!("max_abs_lap_h: {}", fmt_f(max_lap_h));
    println!("max_pde_residual: {}", fmt_f(max_res));
    println!("curvature_points: {curv_points}");
    println!("max_curvature_residual: {}", fmt_f(max_curv));
    println!("tol: {}", fmt_f(tol));
    let pass = max_lap_h <= tol && max_res <= tol && max_curv <= tol;
    println!("pass: {pass}");
    Ok(pass)
}

pub fn holonomy(model_arg: &str, r: f64, tol: f64, frame: Frame) -> Result<bool, CliError> {
    let spec = load_model(model_arg)?;
    let opts = integrator_options()?;
    let data = spec.build().map_err(|e| CliError::domain(e.to_string()))?;
    if !(r > 0.0 && r < 1.0) {
        return Err(CliError::domain(format!("radius {r} outside (0, 1)")));
    }
    let form = connection_form(&data);
    let result = holonomy_circle_with(&form, r, tol, frame, &opts).map_err(transport_error)?;
    let m = result.matrix;

    println!("command: holonomy");
    println!("model: {}", model_echo(&spec));
    println!("r: {}", fmt_f(r));
    println!("frame: {frame:?}");
    println!("matrix: {}", fmt_matrix(&m));
    println!("trace: {}", fmt_f(m.trace()));
    println!("error_estimate: {}", fmt_f(result.error_estimate));
    println!("steps_used: {}", result.steps_used);
    match classify_holonomy(&m, 1e-7) {
        Ok(class) => println!(
            "classification: {}",
            serde_json::to_string(&class).expect("class serializes")
        ),
        Err(e) => println!("classification: unavailable ({e})"),
    }
    println!("integral: {}", is_integral_trace(m.trace(), 1e-7));
    if let Some((reference, note)) = closed_form_holonomy(&spec, r) {
        println!("reference: {}", fmt_matrix(&reference));
        println!("reference_note: {note}");
        println!("reference_deviation: {}", fmt_f((m - reference).abs().max()));
    }
    let pass = result.error_estimate <= tol;
    println!("pass: {pass}");
    Ok(pass)
}

pub fn transport(
    model_arg: &str,
    path_file: &str,
    tol: f64,
    frame: Frame,
) -> Result<bool, CliError> {
    let spec = load_model(model_arg)?;
    let opts = integrator_options()?;
    let data = spec.build().map_err(|e| CliError::domain(e.to_string()))?;
    let text = std::fs::read_to_string(path_file)
        .map_err(|e| CliError::io(format!("cannot read path file {path_file}: {e}")))?;
    let raw: Path =
        serde_json::from_str(&text).map_err(|e| CliError::parse(format!("bad path JSON: {e}")))?;
    let path = Path::new(raw.segments).map_err(|e| CliError::domain(e.to_string()))?;

    let form = connection_form(&data);
    let result = parallel_transport_with(&form, &path, tol, frame, &opts).map_err(transport_error)?;

    println!("command: transport");
    println!("model: {}", model_echo(&spec));
    println!("segments: {}", path.segments.len());
    println!("frame: {frame:?}");
    println!("matrix: {}", fmt_matrix(&result.matrix));
    println!("error_estimate: {}", fmt_f(result.error_estimate));
    println!("steps_used: {}", result.steps_used);
    let pass = result.error_estimate <= tol;
    println!("pass: {pass}");
    Ok(pass)
}

pub fn classify(
    beta: Option<f64>,
    matrix_path: Option<&str>,
    conical: bool,
    logarithmic: bool,
    kodaira: bool,
    tol: f64,
) -> Result<bool, CliError> {
    println!("command: classify");
    if let Some(beta) = beta {
        println!("beta: {}", fmt_f(beta));
        let classes = classify_from_beta(beta, conical, tol);
        println!(
            "admissible_classes: {}",
            serde_json::to_string(&classes).expect("classes serialize")
        );
        println!(
            "integral: {}",
            spk2d::analysis::is_integral_beta(beta, tol)
        );
        if kodaira {
            let kind = if conical {
                SingularityKind::Conical
            } else if logarithmic {
                SingularityKind::Logarithmic
            } else {
                return Err(CliError::parse(
                    "--kodaira needs --conical or --logarithmic to fix the singularity kind",
                ));
            };
            let rows = kodaira_compatible(kind, beta, None);
            println!(
                "kodaira_compatible: {}",
                serde_json::to_string(&rows).expect("rows serialize")
            );
        }
    } else {
        let path = matrix_path.expect("clap guarantees one input");
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::io(format!("cannot read matrix file {path}: {e}")))?;
        let entries: [[f64; 2]; 2] = serde_json::from_str(&text)
            .map_err(|e| CliError::parse(format!("bad matrix JSON: {e}")))?;
        let m = Matrix2::new(entries[0][0], entries[0][1], entries[1][0], entries[1][1]);
        println!("matrix: {}", fmt_matrix(&m));
        let class = classify_holonomy(&m, tol).map_err(|e| CliError::domain(e.to_string()))?;
        println!(
            "classification: {}",
            serde_json::to_string(&class).expect("class serializes")
        );
        println!("integral: {}", is_integral_trace(m.trace(), tol));
    }
    println!("pass: true");
    Ok(true)
}

pub fn fit(csv_path: &str, n_hint: Option<i32>) -> Result<bool, CliError> {
    let text = std::fs::read_to_string(csv_path)
        .map_err(|e| CliError::io(format!("cannot read {csv_path}: {e}")))?;
    let mut lines = text.lines();
    match lines.next() {
        Some("r,u") => {}
        other => {
            return Err(CliError::parse(format!(
                "fit input must start with header 'r,u', got {other:?}"
            )))
        }
    }
    let mut samples: Vec<(f64, f64)> = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let mut cols = line.split(',');
        let parse = |s: Option<&str>| -> Result<f64, CliError> {
            s.and_then(|v| v.trim().parse::<f64>().ok())
                .ok_or_else(|| CliError::parse(format!("line {}: bad row {line:?}", i + 2)))
        };
        let r = parse(cols.next())?;
        let u = parse(cols.next())?;
        if cols.next().is_some() {
            return Err(CliError::parse(format!(
                "line {}: expected two columns",
                i + 2
            )));
        }
        if let Some(&(prev, _)) = samples.last() {
            if r >= prev {
                return Err(CliError::parse(format!(
                    "line {}: radii must be strictly decreasing ({r} after {prev})",
                    i + 2
                )));
            }
        }
        samples.push((r, u));
    }
    let fit = asymptotic_fit(&samples, n_hint).map_err(|e| CliError::domain(e.to_string()))?;
    println!("command: fit");
    println!("samples: {}", samples.len());
    println!("fit: {}", serde_json::to_string(&fit).expect("fit serializes"));
    println!("pass: true");
    Ok(true)
}

pub fn sample(
    model_arg: &str,
    quantity: QuantityArg,
    grid_arg: &str,
    out: &str,
    tol: f64,
) -> Result<bool, CliError> {
    let spec = load_model(model_arg)?;
    let grid = parse_grid(grid_arg)?;
    let opts = integrator_options()?;
    let data = spec.build().map_err(|e| CliError::domain(e.to_string()))?;
    let form = connection_form(&data);

    let mut rows: Vec<String> = Vec::new();
    let value_name = match quantity {
        QuantityArg::Metric => "metric",
        QuantityArg::U => "u",
        QuantityArg::ConnectionNorm => "connection_norm",
        QuantityArg::LcDeviation => "lc_deviation",
        QuantityArg::HolonomyTraceVsR => "trace",
    };

    if matches!(quantity, QuantityArg::HolonomyTraceVsR) {
        rows.push("r,trace".into());
        for r in grid.radii() {
            let res =
                holonomy_circle_with(&form, r, tol, Frame::Covector, &opts).map_err(transport_error)?;
            rows.push(format!("{},{}", fmt_f(r), fmt_f(res.matrix.trace())));
        }
    } else {
        let value = |p: &PointPolar| -> f64 {
            match quantity {
                QuantityArg::Metric => data.metric_coefficient(p),
                QuantityArg::U => data.u.eval(p),
                QuantityArg::ConnectionNorm => {
                    let (ax, ay) = form.eval(p);
                    ax.norm().max(ay.norm())
                }
                QuantityArg::LcDeviation => lc_deviation(&data, p),
                QuantityArg::HolonomyTraceVsR => unreachable!(),
            }
        };
        if grid.n_theta == 1 {
            rows.push(format!("r,{value_name}"));
            for r in grid.radii() {
                let p = PointPolar::new(r, grid.thetas()[0]).expect("grid point");
                rows.push(format!("{},{}", fmt_f(r), fmt_f(value(&p))));
            }
        } else {
            rows.push(format!("r,theta,{value_name}"));
            for r in grid.radii() {
                for t in grid.thetas() {
                    let p = PointPolar::new(r, t).expect("grid point");
                    rows.push(format!("{},{},{}", fmt_f(r), fmt_f(t), fmt_f(value(&p))));
                }
            }
        }
    }

    let mut file = std::fs::File::create(out)
        .map_err(|e| CliError::io(format!("cannot write {out}: {e}")))?;
    for row in &rows {
        writeln!(file, "{row}").map_err(|e| CliError::io(format!("write failed: {e}")))?;
    }

    println!("command: sample");
    println!("model: {}", model_echo(&spec));
    println!("quantity: {value_name}");
    println!("rows: {}", rows.len() - 1);
    println!("out: {out}");
    println!("pass: true");
    Ok(true)
}

pub fn models() -> Result<bool, CliError> {
    println!("command: models");
    println!("flat_cone      g = C r^beta |dz|^2, connection = Levi-Civita");
    println!("               {{\"kind\":\"flat_cone\",\"beta\":-2.0,\"C\":1.0}}");
    println!("log_model      g = -C r^k log r |dz|^2, k integer, |b| = 1");
    println!("               {{\"kind\":\"log_model\",\"k\":1,\"C\":1.0,\"b\":[1.0,0.0]}}");
    println!("fundamental    the k = -1 logarithmic model, cubic form -(i/4) z^-2 dz^3");
    println!("               {{\"kind\":\"fundamental\"}}");
    println!("custom         inline triple (h, u, a)");
    println!("               {{\"kind\":\"custom\",\"data\":{{\"h\":{{\"log_coeff\":0.0,\"laurent\":[[1,1.0,0.0]]}},\"u\":{{\"terms\":[[\"log_r\",-1.0],[\"log_neg_log_r\",-1.0]]}},\"a\":0.0,\"label\":\"example\"}}}}");
    println!("pass: true");
    Ok(true)
}
