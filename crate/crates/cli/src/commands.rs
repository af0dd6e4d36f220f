//! The four subcommands as library functions returning a [`RunRecord`].

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use zstab_core::banded::SolveStats;
use zstab_core::fem1d::{assemble_1d, assemble_1d_nodal, sign_alternations, solve_1d};
use zstab_core::fem2d::{
    assemble_2d, axis_profile, centreline_overshoot, oscillation_metric, reference_factor,
    refined_reference_2d, solve_2d, Solution2D,
};
use zstab_core::oracle::peak_error;
use zstab_core::ztan::polys_2d;
use zstab_core::ztan::proof::verify_all_with;
use zstab_core::ztan::ProofReport;
use zstab_core::{Mesh2D, Scheme};

use crate::config::{ScenarioConfig, SchemeChoice};
use crate::error::{CliError, CliResult};
use crate::output::{create_dir, fmt_f64, write_csv, write_text, Provenance, VERSION};
use crate::svg::{Chart, Scale, Series};

/// One linear solve and the scalar diagnostics derived from it.
#[derive(Debug, Clone, Serialize)]
pub struct SolveRecord {
    pub scheme: String,
    pub pe: f64,
    pub unknowns: usize,
    pub residual: f64,
    pub relative_residual: f64,
    pub condition_estimate: f64,
    pub metrics: BTreeMap<String, f64>,
}

impl SolveRecord {
    fn new(scheme: Scheme, pe: f64, unknowns: usize, stats: &SolveStats) -> Self {
        SolveRecord {
            scheme: scheme.name().to_string(),
            pe,
            unknowns,
            residual: stats.residual,
            relative_residual: stats.relative_residual,
            condition_estimate: stats.condition_estimate,
            metrics: BTreeMap::new(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunRecord {
    pub version: String,
    pub command: String,
    pub scenario: String,
    pub config_sha256: String,
    pub wall_time_s: f64,
    pub solves: Vec<SolveRecord>,
    pub artifacts: Vec<PathBuf>,
}

impl RunRecord {
    fn new(command: &str, config: &ScenarioConfig) -> Self {
        RunRecord {
            version: VERSION.to_string(),
            command: command.to_string(),
            scenario: config.name.clone(),
            config_sha256: config.sha256(),
            wall_time_s: 0.0,
            solves: Vec::new(),
            artifacts: Vec::new(),
        }
    }

    /// Writes `run_record.json` next to the artifacts.
    fn finish(mut self, out: &Path, started: Instant) -> CliResult<Self> {
        self.wall_time_s = started.elapsed().as_secs_f64();
        let path = out.join(format!("{}_run_record.json", self.scenario));
        self.artifacts.push(path.clone());
        let json = serde_json::to_string_pretty(&self).expect("record serializes");
        write_text(&path, &json)?;
        Ok(self)
    }

    pub fn summary(&self) -> String {
        let mut s = format!(
            "[{}] {}: {} solve(s) in {:.2} s, config {}\n",
            self.command,
            self.scenario,
            self.solves.len(),
            self.wall_time_s,
            &self.config_sha256[..12]
        );
        for r in &self.solves {
            let metrics: Vec<String> = r.metrics.iter().map(|(k, v)| format!("{k}={v:.6}")).collect();
            s.push_str(&format!(
                "  {:<9} Pe={:<10} n={:<7} rel.residual={:.1e} {}\n",
                r.scheme,
                fmt_f64(r.pe),
                r.unknowns,
                r.relative_residual,
                metrics.join(" ")
            ));
        }
        for a in &self.artifacts {
            s.push_str(&format!("  wrote {}\n", a.display()));
        }
        s
    }
}

fn tag(scheme: Scheme, pe: f64) -> String {
    format!("{}_pe{}", scheme.name(), fmt_f64(pe))
}

fn runs(schemes: &[Scheme], pes: &[f64]) -> Vec<(Scheme, f64)> {
    schemes
        .iter()
        .flat_map(|&s| pes.iter().map(move |&p| (s, p)))
        .collect()
}

/// Nodal `a_y` and element `b_x` for every scheme and Peclet number.
pub fn run_1d(config: &ScenarioConfig, scheme: Option<SchemeChoice>, out: &Path) -> CliResult<RunRecord> {
    let started = Instant::now();
    if config.dimension != 1 {
        return Err(CliError::config("dimension", "run-1d needs a 1D scenario"));
    }
    let mesh = config.line()?;
    let profile = config.profile.profile();
    let amplitude = profile.amplitude();
    let pes = config.peclet_list()?;
    let jobs = runs(&config.schemes(scheme), &pes);
    let materials = pes
        .iter()
        .map(|&pe| config.material_for(pe))
        .collect::<CliResult<Vec<_>>>()?;

    let solved = jobs
        .par_iter()
        .map(|&(s, pe)| {
            let k = pes.iter().position(|&p| p == pe).expect("listed");
            let sys = assemble_1d(&mesh, &materials[k], &profile, s)?;
            Ok((s, pe, solve_1d(&sys)?))
        })
        .collect::<Result<Vec<_>, zstab_core::Error>>()?;

    create_dir(out)?;
    let prov = Provenance::new("run-1d", config);
    let mut record = RunRecord::new("run-1d", config);
    let mut traces = Vec::new();
    for (s, pe, sol) in &solved {
        let mut rec = SolveRecord::new(*s, *pe, sol.a_y.len(), &sol.stats);
        if amplitude != 0.0 {
            let peak = sol.b_x.iter().fold(0.0f64, |m, b| m.max(b.abs()));
            rec.metrics
                .insert("peak_overshoot".into(), peak / amplitude.abs() - 1.0);
            rec.metrics.insert(
                "sign_alternations".into(),
                sign_alternations(&sol.b_x, 1e-3 * amplitude.abs()) as f64,
            );
        }
        record.solves.push(rec);
        let rows = (0..mesh.node_count()).map(|n| {
            vec![
                fmt_f64(mesh.node_z(n)),
                fmt_f64(sol.a_y[n]),
                sol.b_x.get(n).map(|b| fmt_f64(*b)).unwrap_or_default(),
            ]
        });
        let path = out.join(format!("{}_{}.csv", config.name, tag(*s, *pe)));
        let notes = [
            format!("scheme: {s}, Pe: {}", fmt_f64(*pe)),
            "b_x on row n belongs to the element [z_n, z_n+1]; blank on the last node".into(),
        ];
        record.artifacts.push(write_csv(
            &path,
            &prov,
            &notes,
            &cols(&["z", "a_y", "b_x"]),
            rows,
        )?);
        let mid: Vec<(f64, f64)> = sol
            .b_x
            .iter()
            .enumerate()
            .map(|(e, b)| (mesh.node_z(e) + 0.5 * mesh.dz(), *b))
            .collect();
        traces.push((format!("{s}, Pe={pe}"), mid));
    }
    if config.output.svg {
        let chart = Chart {
            title: &format!("{}: reaction field b_x", config.name),
            x_label: "z",
            y_label: "b_x / B",
            x_scale: Scale::Linear,
            series: traces
                .iter()
                .map(|(l, p)| Series {
                    label: l.clone(),
                    points: p,
                })
                .collect(),
        };
        let path = out.join(format!("{}_b_x.svg", config.name));
        record.artifacts.push(write_text(&path, &chart.render())?);
    }
    record.finish(out, started)
}

/// One row of the peak-error sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub pe: f64,
    pub measured: BTreeMap<Scheme, f64>,
    pub formula: BTreeMap<Scheme, f64>,
    pub in_validity: bool,
    pub relative_residual: f64,
}

/// Peak error at the last plateau element, `b_x + B`, against the closed
/// form, for every sweep point. Rows with `Pe <= 1` are kept and flagged.
pub fn sweep_rows(config: &ScenarioConfig, schemes: &[Scheme]) -> CliResult<Vec<SweepRow>> {
    let sweep = config
        .sweep
        .as_ref()
        .ok_or_else(|| CliError::config("sweep", "missing: sweep-error needs a sweep block"))?;
    if config.dimension != 1 {
        return Err(CliError::config("dimension", "sweep-error needs a 1D scenario"));
    }
    let layout = sweep.layout()?;
    let dz = config.mesh.dz();
    let amplitude = config.profile.profile().amplitude();
    let mesh = layout.mesh(dz)?;
    let nodal = layout.nodal_field(amplitude);
    let grid = sweep.grid();
    let rows = grid
        .par_iter()
        .map(|&pe| {
            let material = config.material_for(pe)?;
            let mut row = SweepRow {
                pe,
                measured: BTreeMap::new(),
                formula: BTreeMap::new(),
                in_validity: pe > 1.0,
                relative_residual: 0.0,
            };
            for &s in schemes {
                let sol = solve_1d(&assemble_1d_nodal(&mesh, &material, &nodal, s)?)?;
                row.relative_residual = row.relative_residual.max(sol.stats.relative_residual);
                row.measured.insert(s, sol.b_x[layout.peak_element()] + amplitude);
                if row.in_validity {
                    row.formula.insert(s, peak_error(s, pe, amplitude)?);
                }
            }
            Ok(row)
        })
        .collect::<CliResult<Vec<_>>>()?;
    Ok(rows)
}

pub fn sweep_error(
    config: &ScenarioConfig,
    scheme: Option<SchemeChoice>,
    out: &Path,
) -> CliResult<RunRecord> {
    let started = Instant::now();
    let schemes = config.schemes(scheme);
    let rows = sweep_rows(config, &schemes)?;
    create_dir(out)?;
    let prov = Provenance::new("sweep-error", config);
    let mut record = RunRecord::new("sweep-error", config);
    let cell = |m: &BTreeMap<Scheme, f64>, s: Scheme| m.get(&s).map(|v| fmt_f64(*v)).unwrap_or_default();
    let csv_rows = rows.iter().map(|r| {
        vec![
            fmt_f64(r.pe),
            cell(&r.measured, Scheme::Galerkin),
            cell(&r.formula, Scheme::Galerkin),
            cell(&r.measured, Scheme::ElementAveraged),
            cell(&r.formula, Scheme::ElementAveraged),
            if r.in_validity { "ok" } else { "out_of_validity" }.to_string(),
        ]
    });
    let columns = cols(&[
        "Pe",
        "measured_error_galerkin",
        "formula_error_galerkin",
        "measured_error_proposed",
        "formula_error_proposed",
        "status",
    ]);
    let notes = [
        "measured: b_x at the last plateau element plus B (deviation from full expulsion)".to_string(),
        "formula: closed-form peak error, defined for Pe > 1".to_string(),
    ];
    let path = out.join(format!("{}_sweep.csv", config.name));
    record
        .artifacts
        .push(write_csv(&path, &prov, &notes, &columns, csv_rows)?);

    for &s in &schemes {
        let valid: Vec<&SweepRow> = rows.iter().filter(|r| r.in_validity).collect();
        let mut rec = SolveRecord::new(
            s,
            f64::NAN,
            config.sweep.as_ref().expect("checked").layout()?.node_count(),
            &SolveStats {
                residual: 0.0,
                relative_residual: rows.iter().map(|r| r.relative_residual).fold(0.0, f64::max),
                condition_estimate: 0.0,
            },
        );
        let worst = valid
            .iter()
            .map(|r| (r.measured[&s] - r.formula[&s]).abs())
            .fold(0.0, f64::max);
        rec.metrics.insert("max_measured_minus_formula".into(), worst);
        if let Some(top) = valid
            .iter()
            .max_by(|a, b| a.measured[&s].abs().total_cmp(&b.measured[&s].abs()))
        {
            rec.metrics.insert("argmax_pe".into(), top.pe);
            rec.metrics.insert("max_abs_error".into(), top.measured[&s].abs());
        }
        record.solves.push(rec);
    }
    if config.output.svg {
        let series_data: Vec<(String, Vec<(f64, f64)>)> = schemes
            .iter()
            .flat_map(|&s| {
                let measured = rows.iter().map(|r| (r.pe, r.measured[&s].abs())).collect();
                let formula = rows
                    .iter()
                    .filter_map(|r| r.formula.get(&s).map(|f| (r.pe, f.abs())))
                    .collect();
                [
                    (format!("{s} measured"), measured),
                    (format!("{s} formula"), formula),
                ]
            })
            .collect();
        let chart = Chart {
            title: &format!("{}: peak error", config.name),
            x_label: "Pe",
            y_label: "|error| / B",
            x_scale: Scale::Log,
            series: series_data
                .iter()
                .map(|(l, p)| Series {
                    label: l.clone(),
                    points: p,
                })
                .collect(),
        };
        let path = out.join(format!("{}_sweep.svg", config.name));
        record.artifacts.push(write_text(&path, &chart.render())?);
    }
    record.finish(out, started)
}

/// Element values averaged onto nodes.
fn nodal_b_x(sol: &Solution2D, mesh: &Mesh2D) -> Vec<f64> {
    let mut sum = vec![0.0; mesh.node_count()];
    let mut count = vec![0u8; mesh.node_count()];
    for i in 0..mesh.nz() - 1 {
        for j in 0..mesh.ny() - 1 {
            let b = sol.b_x[mesh.element(i, j)];
            for (di, dj) in [(0, 0), (1, 0), (0, 1), (1, 1)] {
                let n = mesh.node(i + di, j + dj);
                sum[n] += b;
                count[n] += 1;
            }
        }
    }
    sum.iter().zip(&count).map(|(s, c)| s / f64::from(*c)).collect()
}

/// Result of one 2D solve reduced to what the outputs need.
#[derive(Debug, Clone)]
pub struct Run2D {
    pub scheme: Scheme,
    pub pe: f64,
    pub solution: Solution2D,
    pub centreline: Vec<(f64, f64)>,
    pub unknowns: usize,
}

/// Solves every (scheme, Pe) combination of a 2D scenario.
pub fn solve_runs_2d(config: &ScenarioConfig, schemes: &[Scheme]) -> CliResult<Vec<Run2D>> {
    if config.dimension != 2 {
        return Err(CliError::config("dimension", "run-2d needs a 2D scenario"));
    }
    let (mesh, regions) = config.sheet()?;
    let profile = config.profile.profile();
    let pes = config.peclet_list()?;
    for &pe in &pes {
        config.material_for(pe)?;
    }
    runs(schemes, &pes)
        .into_par_iter()
        .map(|(s, pe)| {
            let material = config.material_for(pe)?;
            let sys = assemble_2d(&mesh, &material, &regions, &profile, s)?;
            let solution = solve_2d(&sys)?;
            let centreline = axis_profile(&solution, &mesh)?;
            Ok(Run2D {
                scheme: s,
                pe,
                solution,
                centreline,
                unknowns: sys.len(),
            })
        })
        .collect()
}

pub fn run_2d(config: &ScenarioConfig, scheme: Option<SchemeChoice>, out: &Path) -> CliResult<RunRecord> {
    let started = Instant::now();
    let solved = solve_runs_2d(config, &config.schemes(scheme))?;
    let (mesh, regions) = config.sheet()?;
    let profile = config.profile.profile();
    let amplitude = profile.amplitude();

    // Galerkin references on a z-refined mesh, one per Peclet number that
    // stays within the configured refinement budget.
    let mut ref_pes: Vec<f64> = solved.iter().map(|r| r.pe).collect();
    ref_pes.sort_by(f64::total_cmp);
    ref_pes.dedup();
    let references: Vec<(f64, Vec<(f64, f64)>)> = if amplitude == 0.0 {
        Vec::new()
    } else {
        ref_pes
            .into_par_iter()
            .filter(|&pe| reference_factor(pe) <= config.output.max_reference_factor)
            .map(|pe| {
                let material = config.material_for(pe)?;
                let r = refined_reference_2d(&mesh, &material, &regions, &profile, reference_factor(pe))?;
                Ok((pe, r))
            })
            .collect::<CliResult<Vec<_>>>()?
    };

    create_dir(out)?;
    let prov = Provenance::new("run-2d", config);
    let mut record = RunRecord::new("run-2d", config);
    for run in &solved {
        let mut rec = SolveRecord::new(run.scheme, run.pe, run.unknowns, &run.solution.stats);
        if amplitude != 0.0 {
            rec.metrics.insert(
                "oscillation_metric".into(),
                oscillation_metric(&run.centreline, amplitude)?,
            );
            if let Some((_, r)) = references.iter().find(|(p, _)| *p == run.pe) {
                rec.metrics.insert(
                    "reference_deviation".into(),
                    centreline_overshoot(&run.centreline, r, amplitude)?,
                );
            }
        }
        record.solves.push(rec);
    }

    let mut columns = cols(&["z", "b_applied"]);
    columns.extend(solved.iter().map(|r| format!("b_x_{}", tag(r.scheme, r.pe))));
    let base = &solved[0].centreline;
    let rows = (0..base.len()).map(|i| {
        let z = base[i].0;
        let mut row = vec![fmt_f64(z), fmt_f64(profile.sample(z, 0.0))];
        row.extend(solved.iter().map(|r| fmt_f64(r.centreline[i].1)));
        row
    });
    let notes = [
        "centreline: element centroids along the sheet axis, mean of the two rows meeting at y = 0"
            .to_string(),
    ];
    let path = out.join(format!("{}_centreline.csv", config.name));
    record
        .artifacts
        .push(write_csv(&path, &prov, &notes, &columns, rows)?);

    if config.output.field_csv {
        for run in &solved {
            let b = nodal_b_x(&run.solution, &mesh);
            let sol = &run.solution;
            let mesh = &mesh;
            let rows = (0..mesh.nz()).flat_map(|n| {
                let b = &b;
                (0..mesh.ny()).map(move |m| {
                    let k = mesh.node(n, m);
                    vec![
                        fmt_f64(mesh.y(m)),
                        fmt_f64(mesh.z(n)),
                        fmt_f64(b[k]),
                        fmt_f64(sol.a_y[k]),
                        fmt_f64(sol.a_z[k]),
                        fmt_f64(sol.phi[k]),
                    ]
                })
            });
            let notes = [
                format!("scheme: {}, Pe: {}", run.scheme, fmt_f64(run.pe)),
                "b_x: element values averaged onto nodes".to_string(),
            ];
            let path = out.join(format!("{}_field_{}.csv", config.name, tag(run.scheme, run.pe)));
            record.artifacts.push(write_csv(
                &path,
                &prov,
                &notes,
                &cols(&["y", "z", "b_x", "a_y", "a_z", "phi"]),
                rows,
            )?);
        }
    }
    if config.output.svg {
        let chart = Chart {
            title: &format!("{}: centreline b_x", config.name),
            x_label: "z",
            y_label: "b_x / B",
            x_scale: Scale::Linear,
            series: solved
                .iter()
                .map(|r| Series {
                    label: format!("{}, Pe={}", r.scheme, r.pe),
                    points: &r.centreline,
                })
                .collect(),
        };
        let path = out.join(format!("{}_centreline.svg", config.name));
        record.artifacts.push(write_text(&path, &chart.render())?);
    }
    record.finish(out, started)
}

/// Proof reports for the stencil polynomials, optionally with one of them
/// perturbed (negative control).
pub fn verify_reports(perturb: Option<&str>) -> CliResult<Vec<ProofReport>> {
    let polys = match perturb {
        None => polys_2d(),
        Some(name) => polys_2d()
            .perturbed(name)
            .map_err(|e| CliError::config("--perturb", e.to_string()))?,
    };
    Ok(verify_all_with(&polys))
}

/// Writes the reports to `report` (and `verify_report.txt` under `out`);
/// any failed check is an identity error naming the checks and their
/// difference polynomials.
pub fn verify(perturb: Option<&str>, out: Option<&Path>, report: &mut dyn Write) -> CliResult<()> {
    let reports = verify_reports(perturb)?;
    let mut text = format!("{VERSION}\n\nstencil polynomials:\n{}\n", polys_2d().listing());
    if let Some(name) = perturb {
        text.push_str(&format!("NOTE: {name} perturbed by + Zn Zm\n\n"));
    }
    for r in &reports {
        text.push_str(&r.to_string());
        text.push('\n');
    }
    let failures: Vec<String> = reports
        .iter()
        .flat_map(|r| r.failures())
        .map(|c| {
            let diff = c
                .detail
                .iter()
                .find(|d| d.contains(" = ") && (d.contains(" - ") || d.contains("remainder")))
                .or(c.detail.last())
                .cloned()
                .unwrap_or_default();
            format!("{} ({diff})", c.name)
        })
        .collect();
    text.push_str(&format!(
        "verdict: {} of {} checks passed\n",
        reports.iter().map(|r| r.checks.len()).sum::<usize>() - failures.len(),
        reports.iter().map(|r| r.checks.len()).sum::<usize>()
    ));
    report
        .write_all(text.as_bytes())
        .map_err(|e| CliError::io(Path::new("<stdout>"), e))?;
    if let Some(dir) = out {
        create_dir(dir)?;
        write_text(&dir.join("verify_report.txt"), &text)?;
    }
    if failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::Identity(failures.join("; ")))
    }
}

fn cols(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}
