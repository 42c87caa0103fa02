use std::fs;
use std::path::{Path, PathBuf};

use ssbjt_core::coverage::Scheme;
use ssbjt_core::selection::GreedyOutcome;
use ssbjt_core::snr::best_beam;
use ssbjt_core::{
    coverage_probability, delta_field, enhanced_plan, greedy_select, los_channel, make_phase_book,
    parse_scenario, snr_field, snr_joint, snr_joint_combined, threshold_sweep, EnhancedPlan,
    JointBeamPlan, JointConfig, Point, Scenario, Sim,
};

use crate::format::{csv_line, g6};
use crate::manifest::RunManifest;
use crate::{CliError, Result};

/// Fringe samples per scaled wavelength along the BS–BS line.
pub const FRINGE_SAMPLES_PER_WAVELENGTH: usize = 200;

/// Execution settings that do not affect results.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunContext {
    /// Worker cap; `None` uses all cores.
    pub threads: Option<usize>,
    /// Unix seconds recorded in manifests.
    pub timestamp: u64,
}

impl RunContext {
    /// Timestamp from `SOURCE_DATE_EPOCH` when set, otherwise the current time.
    pub fn from_env(threads: Option<usize>) -> Self {
        let timestamp = std::env::var("SOURCE_DATE_EPOCH")
            .ok()
            .and_then(|s| s.parse().ok())
            .unwrap_or_else(|| {
                std::time::SystemTime::now()
                    .duration_since(std::time::UNIX_EPOCH)
                    .map(|d| d.as_secs())
                    .unwrap_or(0)
            });
        Self { threads, timestamp }
    }

    fn install<R: Send>(&self, f: impl FnOnce() -> Result<R> + Send) -> Result<R> {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(n) = self.threads {
            if n == 0 {
                return Err(CliError::Usage("--threads must be >= 1".into()));
            }
            builder = builder.num_threads(n);
        }
        let pool = builder
            .build()
            .map_err(|e| CliError::Usage(format!("cannot start worker pool: {e}")))?;
        pool.install(f)
    }
}

struct Outputs {
    dir: PathBuf,
    written: Vec<PathBuf>,
    manifest: RunManifest,
}

impl Outputs {
    fn new(dir: &Path, manifest: RunManifest) -> Result<Self> {
        fs::create_dir_all(dir).map_err(|source| CliError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
        Ok(Self {
            dir: dir.to_path_buf(),
            written: Vec::new(),
            manifest,
        })
    }

    fn write(&mut self, name: &str, contents: &str) -> Result<()> {
        let path = self.dir.join(name);
        fs::write(&path, contents).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        })?;
        self.manifest.outputs.push(name.to_string());
        self.written.push(path);
        Ok(())
    }

    fn finish(mut self) -> Result<Vec<PathBuf>> {
        let name = format!("manifest_{}.json", self.manifest.command);
        self.manifest.outputs.push(name.clone());
        let json = self.manifest.to_json();
        let path = self.dir.join(&name);
        fs::write(&path, json).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        })?;
        self.written.push(path);
        Ok(self.written)
    }
}

fn load_scenario(path: &Path) -> Result<Scenario> {
    let text = fs::read_to_string(path).map_err(|source| CliError::ConfigIo {
        path: path.to_path_buf(),
        source,
    })?;
    parse_scenario(&text).map_err(|source| CliError::Config {
        path: path.to_path_buf(),
        source,
    })
}

fn check_alpha(alpha: Option<f64>) -> Result<()> {
    match alpha {
        Some(a) if !(a > 0.0 && a <= 1.0) => Err(CliError::Usage(format!(
            "--alpha must lie in (0, 1], got {a}"
        ))),
        _ => Ok(()),
    }
}

fn check_gamma(gamma_ref_db: f64) -> Result<()> {
    if gamma_ref_db.is_finite() {
        Ok(())
    } else {
        Err(CliError::Usage("--gamma-ref must be finite".into()))
    }
}

fn select(sim: &Sim, gamma_ref_db: f64) -> Result<GreedyOutcome> {
    Ok(greedy_select(
        &sim.gains,
        sim.noise_mw,
        gamma_ref_db,
        sim.n_ind(),
    )?)
}

/// Parses `start:step:stop` (inclusive) or a comma-separated list. The result must
/// be strictly increasing.
pub fn parse_thresholds(text: &str) -> Result<Vec<f64>> {
    let bad = |msg: String| CliError::Usage(format!("invalid thresholds `{text}`: {msg}"));
    let values: Vec<f64> = if text.contains(':') {
        let parts: Vec<&str> = text.split(':').collect();
        if parts.len() != 3 {
            return Err(bad("expected start:step:stop".into()));
        }
        let nums: Vec<f64> = parts
            .iter()
            .map(|p| p.trim().parse::<f64>().map_err(|e| bad(e.to_string())))
            .collect::<Result<_>>()?;
        let (start, step, stop) = (nums[0], nums[1], nums[2]);
        if step.is_nan() || step <= 0.0 || !start.is_finite() || !stop.is_finite() || stop < start {
            return Err(bad("need finite start <= stop and step > 0".into()));
        }
        let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
        (0..count).map(|i| start + i as f64 * step).collect()
    } else {
        text.split(',')
            .map(|p| p.trim().parse::<f64>().map_err(|e| bad(e.to_string())))
            .collect::<Result<_>>()?
    };
    if values.is_empty() || values.iter().any(|v| !v.is_finite()) {
        return Err(bad("thresholds must be finite".into()));
    }
    if values.windows(2).any(|w| w[1] <= w[0]) {
        return Err(bad("thresholds must be strictly increasing".into()));
    }
    Ok(values)
}

fn cell_csv(sim: &Sim, header: &str, values: &[f64]) -> String {
    let mut out = String::with_capacity(values.len() * 24);
    out.push_str(header);
    out.push('\n');
    for (cell, &v) in sim.grid.cells.iter().zip(values) {
        out.push_str(&csv_line([g6(cell.x), g6(cell.y), g6(v)]));
    }
    out
}

/// Text table of a plan: one row per tuple, one beam column per BS (1-based DFT
/// indices, `-` for a silent BS), then the repetition count and phase rows.
pub fn plan_table(plan: &JointBeamPlan, title: &str) -> Result<String> {
    let b = plan.tuples.first().map_or(0, Vec::len);
    let mut out = String::new();
    out.push_str(&format!("# {title}\n"));
    out.push_str(
        "# rows: selected joint beams; columns: DFT beam index per BS (1-based, '-' = BS silent)\n",
    );
    out.push_str(&format!(
        "# total_transmissions = {}\n",
        plan.total_transmissions()
    ));
    let mut header = vec!["tuple".to_string()];
    header.extend((1..=b).map(|i| format!("bs{i}")));
    header.push("reps".into());
    header.push("phases_rad".into());
    out.push_str(&header.join("\t"));
    out.push('\n');
    for (i, tuple) in plan.tuples.iter().enumerate() {
        let mut row = vec![(i + 1).to_string()];
        for (bs, &m) in tuple.iter().enumerate() {
            row.push(if plan.active_bs[i].contains(&bs) {
                (m + 1).to_string()
            } else {
                "-".into()
            });
        }
        row.push(plan.reps_per_tuple[i].to_string());
        let phases = plan
            .phase_rows::<f64>(i)?
            .iter()
            .map(|r| {
                let cells: Vec<String> = r
                    .iter()
                    .map(|p| p.map_or_else(|| "-".to_string(), g6))
                    .collect();
                format!("[{}]", cells.join(" "))
            })
            .collect::<Vec<_>>()
            .join(" ");
        row.push(phases);
        out.push_str(&row.join("\t"));
        out.push('\n');
    }
    Ok(out)
}

fn enhanced(sim: &Sim, base: &JointBeamPlan, alpha: f64) -> Result<EnhancedPlan<f64>> {
    Ok(enhanced_plan(&sim.gains, base, alpha)?)
}

/// Writes `snr_<scheme>.csv` (`x_m,y_m,snr_db`).
pub fn cmd_field(
    config_path: &Path,
    scheme: Scheme,
    out_dir: &Path,
    gamma_ref_db: f64,
    alpha: f64,
    ctx: &RunContext,
) -> Result<Vec<PathBuf>> {
    check_gamma(gamma_ref_db)?;
    check_alpha(Some(alpha))?;
    let scenario = load_scenario(config_path)?;
    ctx.install(|| {
        let mut manifest = RunManifest::new("field", &scenario, ctx.timestamp);
        manifest
            .param("scheme", scheme)
            .param("gamma_ref_db", gamma_ref_db);
        let sim = Sim::new(scenario.clone())?;
        let greedy = select(&sim, gamma_ref_db)?;
        let enh = if scheme == Scheme::JointEnhanced {
            manifest.param("alpha", alpha);
            Some(enhanced(&sim, &greedy.plan, alpha)?)
        } else {
            None
        };
        let field = snr_field(&sim, &greedy.plan, enh.as_ref(), scheme)?;
        let mut out = Outputs::new(out_dir, manifest)?;
        out.write(
            &format!("snr_{}.csv", scheme.name()),
            &cell_csv(&sim, "x_m,y_m,snr_db", &field.values_db),
        )?;
        out.finish()
    })
}

fn summarize(values: &[f64]) -> (f64, f64, f64) {
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    (min, max, mean)
}

/// Greedy selection, fixed (and optionally enhanced) joint fields against matched
/// independent baselines. Writes `delta_fixed.csv`, `delta_enhanced.csv` when
/// `alpha` is given, `plan.txt` and `summary.txt`.
pub fn cmd_compare(
    config_path: &Path,
    out_dir: &Path,
    alpha: Option<f64>,
    gamma_ref_db: f64,
    ctx: &RunContext,
) -> Result<Vec<PathBuf>> {
    check_gamma(gamma_ref_db)?;
    check_alpha(alpha)?;
    let scenario = load_scenario(config_path)?;
    ctx.install(|| {
        let mut manifest = RunManifest::new("compare", &scenario, ctx.timestamp);
        manifest.param("gamma_ref_db", gamma_ref_db);
        if let Some(a) = alpha {
            manifest.param("alpha", a);
        }
        let sim = Sim::new(scenario.clone())?;
        let greedy = select(&sim, gamma_ref_db)?;
        let plan = &greedy.plan;
        let joint = snr_field(&sim, plan, None, Scheme::JointFixed)?;
        let ind = snr_field(&sim, plan, None, Scheme::Independent)?;
        let delta = delta_field(&joint, &ind)?;
        let budget = joint.budget;

        let mut summary = String::new();
        let mut kv = |k: &str, v: String| summary.push_str(&format!("{k} = {v}\n"));
        kv("num_bs", sim.num_bs().to_string());
        kv("num_cells", sim.grid.len().to_string());
        kv("n_ind", budget.n_ind.to_string());
        kv("n_joint", budget.n_joint.to_string());
        kv("gamma_ref_db", g6(gamma_ref_db));
        kv(
            "greedy_marginal_gains",
            greedy
                .marginal_gains
                .iter()
                .map(usize::to_string)
                .collect::<Vec<_>>()
                .join(","),
        );
        kv(
            "transmissions_independent",
            g6(budget.n_ind as f64 * budget.repetitions_ind::<f64>()),
        );
        kv(
            "transmissions_joint_fixed",
            plan.total_transmissions().to_string(),
        );
        kv(
            "cov_independent",
            g6(coverage_probability(&ind, gamma_ref_db)),
        );
        kv(
            "cov_joint_fixed",
            g6(coverage_probability(&joint, gamma_ref_db)),
        );
        let (dmin, dmax, dmean) = summarize(&delta);
        kv("delta_fixed_min_db", g6(dmin));
        kv("delta_fixed_max_db", g6(dmax));
        kv("delta_fixed_mean_db", g6(dmean));

        let mut plan_text = plan_table(plan, "joint beam plan, fixed cooperation")?;
        let mut enhanced_delta = None;
        if let Some(a) = alpha {
            let e = enhanced(&sim, plan, a)?;
            let je = snr_field(&sim, plan, Some(&e), Scheme::JointEnhanced)?;
            let ie = snr_field(&sim, plan, Some(&e), Scheme::Independent)?;
            let de = delta_field(&je, &ie)?;
            let (emin, emax, emean) = summarize(&de);
            kv("alpha", g6(a));
            kv(
                "transmissions_joint_enhanced",
                e.plan.total_transmissions().to_string(),
            );
            let empty = if e.empty_regions.is_empty() {
                "none".to_string()
            } else {
                e.empty_regions
                    .iter()
                    .map(|i| (i + 1).to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            };
            kv("empty_regions", empty);
            kv("delta_enhanced_min_db", g6(emin));
            kv("delta_enhanced_max_db", g6(emax));
            kv("delta_enhanced_mean_db", g6(emean));
            plan_text.push('\n');
            plan_text.push_str(&plan_table(
                &e.plan,
                &format!("joint beam plan, dominant BSs only (alpha = {})", g6(a)),
            )?);
            enhanced_delta = Some(de);
        }

        let mut out = Outputs::new(out_dir, manifest)?;
        out.write(
            "delta_fixed.csv",
            &cell_csv(&sim, "x_m,y_m,delta_db", &delta),
        )?;
        if let Some(de) = &enhanced_delta {
            out.write(
                "delta_enhanced.csv",
                &cell_csv(&sim, "x_m,y_m,delta_db", de),
            )?;
        }
        out.write("plan.txt", &plan_text)?;
        out.write("summary.txt", &summary)?;
        out.finish()
    })
}

/// Coverage curves: `threshold_db,cov_independent,cov_joint[,cov_enhanced]`.
pub fn cmd_coverage(
    config_path: &Path,
    thresholds: &[f64],
    out_dir: &Path,
    alpha: Option<f64>,
    gamma_ref_db: f64,
    ctx: &RunContext,
) -> Result<Vec<PathBuf>> {
    check_gamma(gamma_ref_db)?;
    check_alpha(alpha)?;
    if thresholds.is_empty() {
        return Err(CliError::Usage("at least one threshold is required".into()));
    }
    if thresholds.windows(2).any(|w| w[1] <= w[0]) || thresholds.iter().any(|t| !t.is_finite()) {
        return Err(CliError::Usage(
            "thresholds must be finite and strictly increasing".into(),
        ));
    }
    let scenario = load_scenario(config_path)?;
    ctx.install(|| {
        let mut manifest = RunManifest::new("coverage", &scenario, ctx.timestamp);
        manifest.param("gamma_ref_db", gamma_ref_db).param(
            "thresholds",
            thresholds
                .iter()
                .map(|t| g6(*t))
                .collect::<Vec<_>>()
                .join(","),
        );
        if let Some(a) = alpha {
            manifest.param("alpha", a);
        }
        let sim = Sim::new(scenario.clone())?;
        let greedy = select(&sim, gamma_ref_db)?;
        let ind = snr_field(&sim, &greedy.plan, None, Scheme::Independent)?;
        let joint = snr_field(&sim, &greedy.plan, None, Scheme::JointFixed)?;
        let enh_field = match alpha {
            Some(a) => {
                let e = enhanced(&sim, &greedy.plan, a)?;
                Some(snr_field(
                    &sim,
                    &greedy.plan,
                    Some(&e),
                    Scheme::JointEnhanced,
                )?)
            }
            None => None,
        };
        let mut fields = vec![&ind, &joint];
        if let Some(f) = &enh_field {
            fields.push(f);
        }
        let report = threshold_sweep(&fields, thresholds)?;

        let mut header = vec!["threshold_db", "cov_independent", "cov_joint"];
        if enh_field.is_some() {
            header.push("cov_enhanced");
        }
        let mut text = csv_line(header);
        for (k, &t) in report.thresholds_db.iter().enumerate() {
            let mut row = vec![g6(t)];
            row.extend(report.curves.iter().map(|(_, c)| g6(c[k])));
            text.push_str(&csv_line(row));
        }
        let mut out = Outputs::new(out_dir, manifest)?;
        out.write("coverage.csv", &text)?;
        out.finish()
    })
}

/// Sample points along the line between the two BSs, or along BS 1's boresight
/// when they are colocated. Returns `(offset_m, point)` pairs.
fn fringe_line(scenario: &Scenario) -> Vec<(f64, Point<f64>)> {
    let a = scenario.bs_positions[0];
    let b = scenario.bs_positions[1];
    let step = scenario.wavelength() / FRINGE_SAMPLES_PER_WAVELENGTH as f64;
    let d = a.distance(&b);
    let (dir, length) = if d >= scenario.min_distance_m {
        (((b.x - a.x) / d, (b.y - a.y) / d), d)
    } else {
        let t = scenario.bs_boresight[0];
        let dir = (t.cos(), t.sin());
        // distance to the area boundary along the ray
        let area = &scenario.area;
        let reach = |p: f64, v: f64, lo: f64, hi: f64| {
            if v > 1e-12 {
                (hi - p) / v
            } else if v < -1e-12 {
                (lo - p) / v
            } else {
                f64::INFINITY
            }
        };
        let len = reach(a.x, dir.0, area.x_min, area.x_max)
            .min(reach(a.y, dir.1, area.y_min, area.y_max));
        (dir, len.max(0.0))
    };
    let count = (length / step + 1e-9).floor() as usize + 1;
    (0..count)
        .map(|i| {
            let s = (i as f64 * step).min(length);
            (s, Point::new(a.x + s * dir.0, a.y + s * dir.1))
        })
        .collect()
}

/// Two-BS interference pattern: `position_m,snr_phase0_db,snr_phase1_db,snr_combined_db`.
pub fn cmd_fringe(config_path: &Path, out_dir: &Path, ctx: &RunContext) -> Result<Vec<PathBuf>> {
    let scenario = load_scenario(config_path)?;
    if scenario.num_bs() != 2 {
        return Err(CliError::Config {
            path: config_path.to_path_buf(),
            source: ssbjt_core::Error::InvalidValue {
                name: "bs_positions".into(),
                reason: format!("fringe needs exactly 2 BSs, found {}", scenario.num_bs()),
            },
        });
    }
    ctx.install(|| {
        let mut manifest = RunManifest::new("fringe", &scenario, ctx.timestamp);
        manifest.param("samples_per_wavelength", FRINGE_SAMPLES_PER_WAVELENGTH);
        let codebook = ssbjt_core::dft_codebook::<f64>(scenario.num_antennas)?;
        let book = make_phase_book::<f64>(2)?;
        let powers = scenario.powers_mw();
        let noise = scenario.effective_noise_mw();
        let line = fringe_line(&scenario);

        // each BS keeps the beam that is strongest at the middle of the line
        let mid = line[line.len() / 2].1;
        let beams: Vec<usize> = (0..2)
            .map(|bs| los_channel(&scenario, bs, mid).map(|h| best_beam(&h, &codebook).0))
            .collect::<Result<_, _>>()?;

        let mut text = csv_line([
            "position_m",
            "snr_phase0_db",
            "snr_phase1_db",
            "snr_combined_db",
        ]);
        for (s, p) in &line {
            let hs = vec![
                los_channel(&scenario, 0, *p)?,
                los_channel(&scenario, 1, *p)?,
            ];
            let mut row = vec![g6(*s)];
            for phases in &book.rows {
                let cfg = JointConfig {
                    beam_indices: beams.clone(),
                    phase_row: phases.clone(),
                };
                row.push(g6(
                    10.0 * snr_joint(&hs, &powers, &codebook, &cfg, noise)?.log10()
                ));
            }
            let comb = snr_joint_combined(&hs, &powers, &codebook, &beams, &book, noise)?;
            row.push(g6(10.0 * comb.log10()));
            text.push_str(&csv_line(row));
        }
        let mut out = Outputs::new(out_dir, manifest)?;
        out.write("fringe.csv", &text)?;
        out.finish()
    })
}

/// Greedy selection only; writes `plan.txt`.
pub fn cmd_select(
    config_path: &Path,
    out_dir: &Path,
    gamma_ref_db: f64,
    alpha: Option<f64>,
    ctx: &RunContext,
) -> Result<Vec<PathBuf>> {
    check_gamma(gamma_ref_db)?;
    check_alpha(alpha)?;
    let scenario = load_scenario(config_path)?;
    ctx.install(|| {
        let mut manifest = RunManifest::new("select", &scenario, ctx.timestamp);
        manifest.param("gamma_ref_db", gamma_ref_db);
        let sim = Sim::new(scenario.clone())?;
        let greedy = select(&sim, gamma_ref_db)?;
        let mut text = plan_table(&greedy.plan, "joint beam plan, fixed cooperation")?;
        text.push_str(&format!(
            "# marginal_gains = {}\n",
            greedy
                .marginal_gains
                .iter()
                .map(usize::to_string)
                .collect::<Vec<_>>()
                .join(",")
        ));
        if let Some(a) = alpha {
            manifest.param("alpha", a);
            let e = enhanced(&sim, &greedy.plan, a)?;
            text.push('\n');
            text.push_str(&plan_table(
                &e.plan,
                &format!("joint beam plan, dominant BSs only (alpha = {})", g6(a)),
            )?);
        }
        let mut out = Outputs::new(out_dir, manifest)?;
        out.write("plan.txt", &text)?;
        out.finish()
    })
}
