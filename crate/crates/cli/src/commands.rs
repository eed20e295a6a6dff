//! Subcommand implementations.

use std::collections::HashSet;
use std::path::Path;

use anyhow::Context;
use hudsal::{
    color_sweep, composite, evaluate, load_png, save_gray_png, save_rgb_png, CompositeSpec,
    InterferenceResult, IttiBackend, IttiParams, Region, RgbImage, SaliencyBackend,
};
use rayon::prelude::*;

use crate::args::{
    hex_color, BatchArgs, Cli, Command, CompositeArgs, EvaluateArgs, Format, SaliencyArgs,
    SweepArgs,
};
use crate::error::{CliError, CliResult};
use crate::manifest::{self, Plan};
use crate::report::{
    fingerprint, print_table, relative_to, CaseReport, MapPaths, Report, MAP_FILES,
};

/// Runs a parsed command line on a pool sized by `--jobs`.
pub fn run(cli: Cli) -> CliResult<()> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.jobs.unwrap_or(0))
        .build()
        .context("starting worker threads")?;
    pool.install(|| match cli.command {
        Command::Evaluate(a) => cmd_evaluate(&a),
        Command::Batch(a) => cmd_batch(&a),
        Command::Saliency(a) => cmd_saliency(&a),
        Command::Composite(a) => cmd_composite(&a),
        Command::Sweep(a) => cmd_sweep(&a),
    })
}

/// Default parameters, overridden by the JSON file at `path` if given.
pub fn load_params(path: Option<&Path>) -> CliResult<IttiParams> {
    let params = match path {
        None => IttiParams::default(),
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| {
                CliError::validation(format!("--params: cannot read {}: {e}", p.display()))
            })?;
            serde_json::from_str(&text)
                .map_err(|e| CliError::validation(format!("--params: {}: {e}", p.display())))?
        }
    };
    params
        .validate()
        .map_err(|e| CliError::validation(format!("--params: {e}")))?;
    Ok(params)
}

fn load_input(flag: &str, path: &Path) -> CliResult<RgbImage> {
    if !path.is_file() {
        return Err(CliError::validation(format!(
            "{flag}: file {} does not exist",
            path.display()
        )));
    }
    load_png(path).map_err(|e| CliError::core(flag, e))
}

fn check_region(region: Region, flag: &str, img: &RgbImage) -> CliResult<()> {
    region
        .validate_within(img.width(), img.height())
        .map_err(|e| CliError::validation(format!("--region: {e} ({flag} image)")))
}

fn check_size(flag: &str, img: &RgbImage, params: &IttiParams) -> CliResult<()> {
    let min = params.min_input_size();
    if img.width() < min || img.height() < min {
        return Err(CliError::validation(format!(
            "{flag}: image is {}x{}, minimum input size is {min}x{min}",
            img.width(),
            img.height()
        )));
    }
    Ok(())
}

fn create_dir(dir: &Path) -> CliResult<()> {
    std::fs::create_dir_all(dir)
        .with_context(|| format!("creating directory {}", dir.display()))
        .map_err(CliError::from)
}

fn create_parent(file: &Path) -> CliResult<()> {
    match file.parent() {
        Some(p) if !p.as_os_str().is_empty() => create_dir(p),
        _ => Ok(()),
    }
}

/// Writes the five intermediate maps of `result` into `dir`.
pub fn dump_maps(result: &InterferenceResult, dir: &Path) -> CliResult<()> {
    create_dir(dir)?;
    let s = &result.saliency;
    let maps = [
        &s.measured,
        &s.measured_hud,
        &s.hud,
        &result.e_plus,
        &result.e_minus,
    ];
    for (name, map) in MAP_FILES.iter().zip(maps) {
        save_gray_png(map, dir.join(name)).map_err(|e| CliError::core(name, e))?;
    }
    Ok(())
}

fn cmd_evaluate(a: &EvaluateArgs) -> CliResult<()> {
    manifest::validate_id(&a.id).map_err(|e| CliError::validation(format!("--id: {e}")))?;
    let params = load_params(a.params.as_deref())?;
    let measured = load_input("--measured", &a.measured)?;
    let hud = load_input("--hud", &a.hud)?;
    check_region(a.region, "--measured", &measured)?;
    check_size("--measured", &measured, &params)?;
    check_size("--hud", &hud, &params)?;
    let backend = IttiBackend::new(params.clone()).map_err(|e| CliError::core("--params", e))?;

    let result =
        evaluate(&measured, &hud, a.region, &backend).map_err(|e| CliError::core("evaluate", e))?;
    create_dir(&a.out)?;
    let mut case = CaseReport::new(
        &a.id,
        result.p,
        result.m,
        a.region,
        &a.content_group,
        &fingerprint(&params),
    );
    if a.dump_maps {
        dump_maps(&result, &a.out)?;
        case.maps = Some(MapPaths::under(""));
    }
    let report = Report::new(backend.name(), &params, vec![case]);
    match a.format {
        Format::Json => report.write_json(&a.out.join("report.json"))?,
        Format::Csv => report.write_csv(&a.out.join("report.csv"))?,
    }
    println!(
        "p = {} m = {}",
        report.cases[0].p_display, report.cases[0].m_display
    );
    Ok(())
}

fn cmd_batch(a: &BatchArgs) -> CliResult<()> {
    let plan = manifest::prepare(&a.manifest, a.out.as_deref())?;
    if plan.cases.is_empty() {
        eprintln!("warning: manifest {} lists no cases", a.manifest.display());
    }
    let backend =
        IttiBackend::new(plan.params.clone()).map_err(|e| CliError::core("manifest params", e))?;
    let report = run_plan(&plan, &backend)?;
    print_table(&report);
    Ok(())
}

/// Evaluates every case of a validated plan concurrently, then writes
/// `report.json`, `report.csv`, `rankings.csv` and, when requested, the maps
/// of each case under `maps/<id>/`. Output order follows the manifest.
pub fn run_plan<B: SaliencyBackend + ?Sized>(plan: &Plan, backend: &B) -> CliResult<Report> {
    let results = plan
        .cases
        .par_iter()
        .map(|c| {
            evaluate(&c.measured, &c.hud, c.region, backend)
                .map_err(|e| CliError::core(format!("case {:?}", c.id), e))
        })
        .collect::<CliResult<Vec<_>>>()?;

    create_dir(&plan.output_dir)?;
    let fp = fingerprint(&plan.params);
    let mut cases = Vec::with_capacity(results.len());
    for (c, r) in plan.cases.iter().zip(&results) {
        let mut case = CaseReport::new(&c.id, r.p, r.m, c.region, &c.content_group, &fp);
        if plan.dump_maps {
            let dir = plan.output_dir.join("maps").join(&c.id);
            dump_maps(r, &dir)?;
            case.maps = Some(MapPaths::under(&relative_to(&dir, &plan.output_dir)));
        }
        cases.push(case);
    }
    let report = Report::new(backend.name(), &plan.params, cases);
    report.write_json(&plan.output_dir.join("report.json"))?;
    report.write_csv(&plan.output_dir.join("report.csv"))?;
    report.write_rankings_csv(&plan.output_dir.join("rankings.csv"))?;
    Ok(report)
}

fn cmd_saliency(a: &SaliencyArgs) -> CliResult<()> {
    let params = load_params(a.params.as_deref())?;
    let img = load_input("--input", &a.input)?;
    check_size("--input", &img, &params)?;
    let map = hudsal::compute_saliency(&img, &params).map_err(|e| CliError::core("saliency", e))?;
    create_parent(&a.out)?;
    save_gray_png(&map, &a.out).map_err(|e| CliError::core("--out", e))
}

fn cmd_composite(a: &CompositeArgs) -> CliResult<()> {
    let background = load_input("--background", &a.background)?;
    let hud = load_input("--hud", &a.hud)?;
    check_region(a.region, "--background", &background)?;
    let spec = CompositeSpec::new(background, hud, a.region).with_gain(a.gain);
    let out = composite(&spec).map_err(|e| CliError::core("composite", e))?;
    create_parent(&a.out)?;
    save_rgb_png(&out, &a.out).map_err(|e| CliError::core("--out", e))
}

fn cmd_sweep(a: &SweepArgs) -> CliResult<()> {
    let mut seen = HashSet::new();
    if let Some(dup) = a.colors.iter().find(|c| !seen.insert(**c)) {
        return Err(CliError::validation(format!(
            "--colors: {} listed twice",
            hex_color(*dup)
        )));
    }
    let params = load_params(a.params.as_deref())?;
    let background = load_input("--background", &a.background)?;
    let mask = load_input("--hud", &a.hud)?;
    check_region(a.region, "--background", &background)?;
    check_size("--background", &background, &params)?;
    check_size("--hud", &mask, &params)?;
    let backend = IttiBackend::new(params.clone()).map_err(|e| CliError::core("--params", e))?;

    let sweep = color_sweep(&background, &mask, a.region, &a.colors, a.gain, &backend)
        .map_err(|e| CliError::core("sweep", e))?;
    create_dir(&a.out)?;
    let fp = fingerprint(&params);
    let mut cases = Vec::with_capacity(sweep.cases.len());
    for case in &sweep.cases {
        let hex = hex_color(case.color);
        save_rgb_png(&case.measured, a.out.join(format!("composite_{hex}.png")))
            .map_err(|e| CliError::core(&hex, e))?;
        let r = &case.result;
        let mut report_case = CaseReport::new(&hex, r.p, r.m, a.region, &sweep.content_group, &fp);
        if a.dump_maps {
            let dir = a.out.join("maps").join(&hex);
            dump_maps(r, &dir)?;
            report_case.maps = Some(MapPaths::under(&relative_to(&dir, &a.out)));
        }
        let mut single = Report::new(backend.name(), &params, vec![report_case.clone()]);
        single.gain = Some(sweep.gain);
        single.write_json(&a.out.join(format!("report_{hex}.json")))?;
        cases.push(report_case);
    }
    let mut summary = Report::new(backend.name(), &params, cases);
    summary.gain = Some(sweep.gain);
    summary.write_json(&a.out.join("ranking.json"))?;
    summary.write_rankings_csv(&a.out.join("rankings.csv"))?;
    print_table(&summary);
    Ok(())
}
