//! One runner per subcommand. Each returns a JSON result value, a human
//! summary line, and optionally plot-ready CSV rows.

use crate::config::*;
use gaugekit::chern;
use gaugekit::cs;
use gaugekit::degree;
use gaugekit::dirac;
use gaugekit::field::{field_from_representation, GaugeTransform, LinkField};
use gaugekit::flow;
use gaugekit::group::{GaugeGroup, Su2, Su2Alg, U1};
use gaugekit::holonomy::{self, PresentedGroup};
use gaugekit::lattice::TorusLattice;
use gaugekit::sw;
use num_complex::Complex64;
use serde_json::{json, Value};
use std::sync::Arc;

/// Every module operation is reachable from exactly one of these.
pub const SUBCOMMANDS: [&str; 17] = [
    "chern-c1",
    "chern-c2",
    "hopf",
    "cs-value",
    "cs-shift",
    "map-degree",
    "repvar-solve",
    "repvar-dim",
    "holonomy",
    "flow",
    "dirac-spectrum",
    "dirac-index",
    "weitzenboeck",
    "sw-check",
    "sw-descent",
    "sw-dim",
    "degree",
];

#[derive(Debug)]
pub enum RunError {
    Config(String),
    Numerical(String),
}

impl RunError {
    fn num(e: impl std::fmt::Display) -> Self {
        RunError::Numerical(e.to_string())
    }
}

pub struct Output {
    pub summary: String,
    pub result: Value,
    pub csv: Option<String>,
}

impl Output {
    pub fn write(&self, cfg: &RunConfig) -> std::io::Result<()> {
        let format = preferred_format(cfg);
        let default_name = format!(
            "{}.{}",
            cfg.name(),
            match format {
                OutputFormat::Json => "json",
                OutputFormat::Csv => "csv",
            }
        );
        let path = cfg.out().map(str::to_string).unwrap_or(default_name);
        let payload = match format {
            OutputFormat::Csv => self
                .csv
                .clone()
                .unwrap_or_else(|| json_to_csv(&self.result)),
            OutputFormat::Json => format!("{:#}\n", self.result),
        };
        std::fs::write(path, payload)
    }
}

fn preferred_format(cfg: &RunConfig) -> OutputFormat {
    match cfg {
        RunConfig::ChernC1(c) => c.format,
        RunConfig::ChernC2(c) => c.format,
        RunConfig::Hopf(c) => c.format,
        RunConfig::CsValue(c) => c.format,
        RunConfig::CsShift(c) => c.format,
        RunConfig::MapDegree(c) => c.format,
        RunConfig::RepvarSolve(c) => c.format,
        RunConfig::RepvarDim(c) => c.format,
        RunConfig::Holonomy(c) => c.format,
        RunConfig::Flow(c) => c.format,
        RunConfig::DiracSpectrum(c) => c.format,
        RunConfig::DiracIndex(c) => c.format,
        RunConfig::Weitzenboeck(c) => c.format,
        RunConfig::SwCheck(c) => c.format,
        RunConfig::SwDescent(c) => c.format,
        RunConfig::SwDim(c) => c.format,
        RunConfig::Degree(c) => c.format,
    }
}

/// Fallback CSV for flat JSON objects: one key,value row per entry.
fn json_to_csv(v: &Value) -> String {
    let mut out = String::from("key,value\n");
    if let Value::Object(map) = v {
        for (k, val) in map {
            out.push_str(&format!("{k},{val}\n"));
        }
    }
    out
}

/// Two-column plot series with a header.
pub fn emit_plot_data(header: (&str, &str), series: &[(f64, f64)]) -> String {
    let mut out = format!("{},{}\n", header.0, header.1);
    for (x, y) in series {
        out.push_str(&format!("{x:e},{y:e}\n"));
    }
    out
}

pub fn run(cfg: &RunConfig) -> Result<Output, RunError> {
    match cfg {
        RunConfig::ChernC1(c) => chern_c1(c),
        RunConfig::ChernC2(c) => chern_c2(c),
        RunConfig::Hopf(c) => hopf(c),
        RunConfig::CsValue(c) => cs_value(c),
        RunConfig::CsShift(c) => cs_shift(c),
        RunConfig::MapDegree(c) => map_degree(c),
        RunConfig::RepvarSolve(c) => repvar_solve(c),
        RunConfig::RepvarDim(c) => repvar_dim(c),
        RunConfig::Holonomy(c) => holonomy_run(c),
        RunConfig::Flow(c) => flow_run(c),
        RunConfig::DiracSpectrum(c) => dirac_spectrum(c),
        RunConfig::DiracIndex(c) => dirac_index_run(c),
        RunConfig::Weitzenboeck(c) => weitzenboeck(c),
        RunConfig::SwCheck(c) => sw_check(c),
        RunConfig::SwDescent(c) => sw_descent(c),
        RunConfig::SwDim(c) => sw_dim(c),
        RunConfig::Degree(c) => degree_run(c),
    }
}

fn chern_report_json(r: &chern::ChernReport) -> Value {
    json!({"raw": r.raw, "rounded": r.rounded, "residual": r.residual})
}

fn chern_c1(c: &ChernC1Config) -> Result<Output, RunError> {
    let field = match (c.flux, c.roughness) {
        (Some(m), None) => LinkField::constant_flux_t2(c.n, m)
            .map_err(|e| RunError::Config(e.to_string()))?,
        (None, Some(r)) => {
            if r < 0.0 {
                return Err(RunError::Config("roughness must be >= 0".into()));
            }
            chern::random_u1_t2(c.n, c.seed, r)
        }
        _ => {
            return Err(RunError::Config(
                "chern-c1 needs exactly one of `flux` or `roughness`".into(),
            ))
        }
    };
    let report = chern::c1_lattice(&field).map_err(RunError::num)?;
    Ok(Output {
        summary: format!(
            "c1 = {} (raw {:.12}, residual {:.3e})",
            report.rounded, report.raw, report.residual
        ),
        result: chern_report_json(&report),
        csv: None,
    })
}

fn chern_c2(c: &ChernC2Config) -> Result<Output, RunError> {
    let mut m = [[0i64; 4]; 4];
    for (mu, nu, v) in [
        (0, 1, c.m01),
        (0, 2, c.m02),
        (0, 3, c.m03),
        (1, 2, c.m12),
        (1, 3, c.m13),
        (2, 3, c.m23),
    ] {
        m[mu][nu] = v;
        m[nu][mu] = -v;
    }
    let report = chern::c2_abelian_t4(&m, c.n).map_err(RunError::num)?;
    Ok(Output {
        summary: format!(
            "c2 = {} (raw {:.12}, residual {:.3e})",
            report.rounded, report.raw, report.residual
        ),
        result: chern_report_json(&report),
        csv: None,
    })
}

fn hopf(c: &HopfConfig) -> Result<Output, RunError> {
    if c.n < 8 {
        return Err(RunError::Config("hopf grid needs n >= 8".into()));
    }
    let r = chern::hopf_curvature_integral(c.n).map_err(RunError::num)?;
    Ok(Output {
        summary: format!(
            "integral = {:.8} + {:.8}i (expect 2πi), c1 = {}",
            r.integral.re, r.integral.im, r.c1.rounded
        ),
        result: json!({
            "integral_re": r.integral.re,
            "integral_im": r.integral.im,
            "chart_inner_im": r.charts[0].im,
            "chart_outer_im": r.charts[1].im,
            "c1": chern_report_json(&r.c1),
        }),
        csv: None,
    })
}

fn make_grid(resolution: usize) -> Result<Arc<cs::S3Grid>, RunError> {
    cs::S3Grid::new(resolution, resolution, 2 * resolution)
        .map_err(|e| RunError::Config(e.to_string()))
}

fn build_form(
    preset: FormPreset,
    lambda: Option<f64>,
    amplitude: Option<f64>,
    seed: u64,
    grid: &Arc<cs::S3Grid>,
) -> Result<cs::InvariantFrameForm, RunError> {
    Ok(match preset {
        FormPreset::Zero => cs::InvariantFrameForm::zero(grid.clone()),
        FormPreset::LambdaTheta => {
            let l = lambda.ok_or_else(|| {
                RunError::Config("preset lambda-theta needs `lambda`".into())
            })?;
            cs::InvariantFrameForm::maurer_cartan_multiple(grid.clone(), l)
        }
        FormPreset::Random => {
            cs::InvariantFrameForm::random_smooth(grid.clone(), seed, amplitude.unwrap_or(0.05))
        }
    })
}

fn build_map(preset: MapPreset, grid: &Arc<cs::S3Grid>) -> cs::GroupMap {
    match preset {
        MapPreset::Const => cs::GroupMap::constant(grid.clone(), Su2::exp(&Su2Alg::new(0.4, -0.2, 0.7))),
        MapPreset::IdMap => cs::GroupMap::identity_map(grid.clone()),
        MapPreset::IdSquared => {
            let id = cs::GroupMap::identity_map(grid.clone());
            id.pointwise_product(&id).expect("same grid")
        }
    }
}

fn cs_value(c: &CsValueConfig) -> Result<Output, RunError> {
    let grid = make_grid(c.resolution)?;
    let a = build_form(c.preset, c.lambda, c.amplitude, c.seed, &grid)?;
    let v = cs::cs_value(&a).map_err(RunError::num)?;
    Ok(Output {
        summary: format!("cs value = {v:.8}"),
        result: json!({"value": v}),
        csv: None,
    })
}

fn cs_shift(c: &CsShiftConfig) -> Result<Output, RunError> {
    let grid = make_grid(c.resolution)?;
    let a = cs::InvariantFrameForm::random_smooth(grid.clone(), c.seed, c.amplitude.unwrap_or(0.05));
    let g = build_map(c.gauge, &grid);
    let before = cs::cs_value(&a).map_err(RunError::num)?;
    let after = cs::cs_value(&cs::gauge_act(&a, &g).map_err(RunError::num)?)
        .map_err(RunError::num)?;
    let shift = after - before;
    let nearest = shift.round();
    Ok(Output {
        summary: format!(
            "cs shift = {shift:.6} (nearest integer {nearest}, deviation {:.3e})",
            (shift - nearest).abs()
        ),
        result: json!({
            "before": before,
            "after": after,
            "shift": shift,
            "nearest_integer": nearest as i64,
            "deviation": (shift - nearest).abs(),
        }),
        csv: None,
    })
}

fn map_degree(c: &MapDegreeConfig) -> Result<Output, RunError> {
    let grid = make_grid(c.resolution)?;
    let g = build_map(c.map, &grid);
    let report = cs::map_degree(&g).map_err(RunError::num)?;
    Ok(Output {
        summary: format!(
            "degree = {} (raw {:.6}, residual {:.3e})",
            report.rounded, report.raw, report.residual
        ),
        result: chern_report_json(&report),
        csv: None,
    })
}

fn resolve_presentation(
    presentation: &Option<PresentationConfig>,
    preset: &Option<String>,
) -> Result<PresentedGroup, RunError> {
    match (presentation, preset) {
        (Some(p), None) => PresentedGroup::new(p.generators, p.relators.clone())
            .map_err(|e| RunError::Config(e.to_string())),
        (None, Some(name)) => match name.as_str() {
            "torus" => Ok(PresentedGroup::torus()),
            "genus2" => Ok(PresentedGroup::surface(2)),
            other => {
                if let Some(n) = other.strip_prefix("free-") {
                    let n: usize = n
                        .parse()
                        .map_err(|_| RunError::Config(format!("bad preset {other}")))?;
                    Ok(PresentedGroup::free(n))
                } else {
                    Err(RunError::Config(format!("unknown preset {other}")))
                }
            }
        },
        _ => Err(RunError::Config(
            "need exactly one of `presentation` or `preset`".into(),
        )),
    }
}

fn solve_generic<G: GaugeGroup>(
    group: &PresentedGroup,
    seed: u64,
    tol: f64,
) -> Result<(Vec<Vec<f64>>, f64), RunError> {
    let rho = holonomy::solve_representation::<G>(group, seed, tol, 500).map_err(RunError::num)?;
    let residual = holonomy::relator_residual(group, &rho);
    Ok((rho.images.iter().map(|g| g.to_raw()).collect(), residual))
}

fn repvar_solve(c: &RepvarSolveConfig) -> Result<Output, RunError> {
    let group = resolve_presentation(&c.presentation, &c.preset)?;
    let (images, residual) = match c.group {
        GroupName::U1 => solve_generic::<U1>(&group, c.seed, c.tol)?,
        GroupName::Su2 => solve_generic::<Su2>(&group, c.seed, c.tol)?,
    };
    Ok(Output {
        summary: format!("solved: residual {residual:.3e}"),
        result: json!({"images": images, "residual": residual}),
        csv: None,
    })
}

fn repvar_dim(c: &RepvarDimConfig) -> Result<Output, RunError> {
    let group = resolve_presentation(&c.presentation, &c.preset)?;
    let dim = match c.group {
        GroupName::U1 => {
            let rho = holonomy::solve_representation::<U1>(&group, c.seed, c.tol, 500)
                .map_err(RunError::num)?;
            holonomy::local_dimension(&group, &rho, 1e-6).map_err(RunError::num)?
        }
        GroupName::Su2 => {
            let rho = holonomy::solve_representation::<Su2>(&group, c.seed, c.tol, 500)
                .map_err(RunError::num)?;
            holonomy::local_dimension(&group, &rho, 1e-6).map_err(RunError::num)?
        }
    };
    Ok(Output {
        summary: format!("local dimension = {dim}"),
        result: json!({"dim": dim}),
        csv: None,
    })
}

fn holonomy_run(c: &HolonomyConfig) -> Result<Output, RunError> {
    let lat = Arc::new(
        TorusLattice::new(c.dim, &vec![c.n; c.dim])
            .map_err(|e| RunError::Config(e.to_string()))?,
    );
    if c.holonomies.len() != c.dim {
        return Err(RunError::Config(format!(
            "need {} holonomies, got {}",
            c.dim,
            c.holonomies.len()
        )));
    }
    let result = match c.group {
        GroupName::U1 => {
            let hs: Vec<U1> = c
                .holonomies
                .iter()
                .map(|v| {
                    if v.len() == 1 {
                        Ok(U1::new(v[0]))
                    } else {
                        Err(RunError::Config("U(1) holonomy = [angle]".into()))
                    }
                })
                .collect::<Result<_, _>>()?;
            let field = field_from_representation(lat, &hs);
            monodromy_json(&field)?
        }
        GroupName::Su2 => {
            let hs: Vec<Su2> = c
                .holonomies
                .iter()
                .map(|v| {
                    if v.len() == 3 {
                        Ok(Su2::exp(&Su2Alg::new(v[0], v[1], v[2])))
                    } else {
                        Err(RunError::Config("SU(2) holonomy = [v1,v2,v3]".into()))
                    }
                })
                .collect::<Result<_, _>>()?;
            let field = field_from_representation(lat, &hs);
            monodromy_json(&field)?
        }
    };
    Ok(Output {
        summary: format!(
            "monodromy traces {:?}",
            result["generator_traces"]
        ),
        result,
        csv: None,
    })
}

fn monodromy_json<G: GaugeGroup>(field: &LinkField<G>) -> Result<Value, RunError> {
    let rep = holonomy::monodromy_torus(field, 0, 1e-8).map_err(RunError::num)?;
    Ok(json!({
        "generator_traces": rep.generator_traces,
        "pair_traces": rep.pair_traces,
        "commutator_residuals": rep.commutator_residuals,
        "holonomies": rep.holonomies.iter().map(|h| h.to_raw()).collect::<Vec<_>>(),
    }))
}

fn flow_json<G: GaugeGroup>(
    field: &LinkField<G>,
    max_steps: usize,
    step: f64,
    tol: f64,
) -> (Value, String, bool) {
    let (history, energy, converged) = match flow::flow_to_flat(field, max_steps, step, tol) {
        Ok(r) => {
            let e = *r.history.last().unwrap();
            (r.history, e, true)
        }
        Err(flow::FlowError::NotConverged {
            history, energy, ..
        }) => (history, energy, false),
    };
    let series: Vec<(f64, f64)> = history
        .iter()
        .enumerate()
        .map(|(i, &e)| (i as f64, e))
        .collect();
    let csv = emit_plot_data(("step", "energy"), &series);
    (
        json!({
            "converged": converged,
            "final_energy": energy,
            "steps": history.len() - 1,
            "history": history,
        }),
        csv,
        converged,
    )
}

fn flow_run(c: &FlowConfig) -> Result<Output, RunError> {
    let lat = Arc::new(
        TorusLattice::new(c.dim, &vec![c.n; c.dim])
            .map_err(|e| RunError::Config(e.to_string()))?,
    );
    if c.roughness < 0.0 || c.step <= 0.0 {
        return Err(RunError::Config("need roughness >= 0 and step > 0".into()));
    }
    let (result, csv, converged) = match c.group {
        GroupName::U1 => {
            let field = LinkField::<U1>::random(lat, c.seed, c.roughness);
            flow_json(&field, c.max_steps, c.step, c.tol)
        }
        GroupName::Su2 => {
            let field = LinkField::<Su2>::random(lat, c.seed, c.roughness);
            flow_json(&field, c.max_steps, c.step, c.tol)
        }
    };
    let summary = format!(
        "flow {}: final energy {:.3e} after {} steps",
        if converged { "converged" } else { "did not converge" },
        result["final_energy"].as_f64().unwrap(),
        result["steps"]
    );
    if converged {
        Ok(Output {
            summary,
            result,
            csv: Some(csv),
        })
    } else {
        Err(RunError::Numerical(summary))
    }
}

fn dirac_spectrum(c: &DiracSpectrumConfig) -> Result<Output, RunError> {
    let op = dirac::MagneticDiracOp::new(c.n, c.flux, c.r).map_err(RunError::num)?;
    let rep = dirac::spectrum(&op, c.k).map_err(RunError::num)?;
    let mut csv = String::from("eigenvalue,chirality\n");
    for (e, chi) in rep.eigenvalues.iter().zip(&rep.chirality) {
        csv.push_str(&format!("{e:e},{chi:e}\n"));
    }
    Ok(Output {
        summary: format!(
            "index = {}, cluster size {}, gap ratio {:.1}",
            rep.index, rep.cluster_size, rep.gap_ratio
        ),
        result: json!({
            "eigenvalues": rep.eigenvalues,
            "chirality": rep.chirality,
            "cluster_size": rep.cluster_size,
            "gap_ratio": rep.gap_ratio,
            "index": rep.index,
        }),
        csv: Some(csv),
    })
}

fn dirac_index_run(c: &DiracIndexConfig) -> Result<Output, RunError> {
    let index = dirac::dirac_index(c.n, c.flux, c.r).map_err(RunError::num)?;
    Ok(Output {
        summary: format!("index = {index}"),
        result: json!({"index": index}),
        csv: None,
    })
}

fn weitzenboeck(c: &WeitzenboeckConfig) -> Result<Output, RunError> {
    let residual = dirac::weitzenboeck_residual(c.n, c.flux, c.seed).map_err(RunError::num)?;
    Ok(Output {
        summary: format!("weitzenboeck residual = {residual:.6e}"),
        result: json!({"residual": residual}),
        csv: None,
    })
}

fn sw_check(c: &SwCheckConfig) -> Result<Output, RunError> {
    let geom = sw::SwGeometry::new(c.n);
    let eta = c.eta.unwrap_or([0.0; 3]);
    let mut worst_equivariance = 0.0f64;
    let mut worst_quartic = 0.0f64;
    let mut worst_adjoint = 0.0f64;
    for k in 0..c.pairs {
        let seed = c.seed.wrapping_add(k as u64);
        let config = sw::SwConfig::random(geom.clone(), seed, 0.8, 1.1).with_eta(eta);
        let g = GaugeTransform::<U1>::random(geom.lat.clone(), seed ^ 0x5eed);
        let before = sw::sw_map(&config).map_err(RunError::num)?;
        let after = sw::sw_map(&sw::gauge_act_sw(&config, &g)).map_err(RunError::num)?;
        for x in 0..geom.n_sites() {
            let phase = Complex64::from_polar(1.0, -g.value(x).angle());
            for comp in 0..2 {
                worst_equivariance = worst_equivariance
                    .max((after.neg[x][comp] - phase * before.neg[x][comp]).norm());
            }
            for a in 0..3 {
                worst_equivariance =
                    worst_equivariance.max((after.form[x][a] - before.form[x][a]).abs());
            }
            // quartic identity at this site
            let psi = &config.psi[x];
            let m = sw::mu_matrix(psi);
            let mp = [
                m[0][0] * psi[0] + m[0][1] * psi[1],
                m[1][0] * psi[0] + m[1][1] * psi[1],
            ];
            let lhs = (psi[0].conj() * mp[0] + psi[1].conj() * mp[1]).re;
            let n2 = psi[0].norm_sqr() + psi[1].norm_sqr();
            worst_quartic = worst_quartic.max((lhs - 0.5 * n2 * n2).abs());
        }
        // slice adjointness with a seeded random direction
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed ^ 0xad01);
        let u: Vec<f64> = (0..geom.n_sites()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let (rp, ra) = sw::gauge_tangent(&config, &u);
        let rstar_ru = sw::slice_r_star(&config, &rp, &ra);
        let pairing: f64 = u.iter().zip(&rstar_ru).map(|(a, b)| a * b).sum();
        let mut norm = 0.0;
        for x in 0..geom.n_sites() {
            norm += rp[x][0].norm_sqr() + rp[x][1].norm_sqr();
        }
        norm += ra.iter().map(|v| v * v).sum::<f64>();
        worst_adjoint = worst_adjoint.max((pairing - norm).abs() / norm.max(1.0));
    }
    let pass = worst_equivariance <= 1e-12 && worst_quartic <= 1e-12 && worst_adjoint <= 1e-12;
    let result = json!({
        "pairs": c.pairs,
        "max_equivariance_deviation": worst_equivariance,
        "max_quartic_deviation": worst_quartic,
        "max_slice_adjointness_deviation": worst_adjoint,
        "pass": pass,
    });
    let summary = format!(
        "sw checks over {} configs: equivariance {:.2e}, quartic {:.2e}, adjointness {:.2e}",
        c.pairs, worst_equivariance, worst_quartic, worst_adjoint
    );
    if pass {
        Ok(Output {
            summary,
            result,
            csv: None,
        })
    } else {
        Err(RunError::Numerical(summary))
    }
}

fn sw_descent(c: &SwDescentConfig) -> Result<Output, RunError> {
    let geom = sw::SwGeometry::new(c.n);
    let start = sw::SwConfig::random(geom, c.seed, c.psi_amplitude, c.alpha_amplitude)
        .with_eta(c.eta.unwrap_or([0.0; 3]));
    let r = sw::sw_energy_descent(&start, c.max_steps, c.tol).map_err(RunError::num)?;
    let final_energy = *r.history.last().unwrap();
    let bound = sw::bound_check(&r.config).map_err(RunError::num)?;
    let series: Vec<(f64, f64)> = r
        .history
        .iter()
        .enumerate()
        .map(|(i, &e)| (i as f64, e))
        .collect();
    let csv = emit_plot_data(("step", "energy"), &series);
    let deformation = sw::deformation_residual(&r.config, c.seed ^ 0xdef0, 1e-4)
        .map_err(RunError::num)?;
    Ok(Output {
        summary: format!(
            "descent reached E = {final_energy:.3e} in {} steps; max|psi|^2 = {:.3e}",
            r.history.len() - 1,
            bound.max_psi_sq
        ),
        result: json!({
            "final_energy": final_energy,
            "steps": r.history.len() - 1,
            "max_psi_sq": bound.max_psi_sq,
            "f_plus_norm_sq": bound.f_plus_norm_sq,
            "f_minus_norm_sq": bound.f_minus_norm_sq,
            "bound_ratio": bound.ratio,
            "bound_violated": bound.violated,
            "deformation_residual": deformation,
        }),
        csv: Some(csv),
    })
}

fn sw_dim(c: &SwDimConfig) -> Result<Output, RunError> {
    let dim = sw::moduli_dimension(&sw::TopologicalData {
        c1_squared: c.c1sq,
        euler: c.chi,
        signature: c.sigma,
    })
    .map_err(RunError::num)?;
    Ok(Output {
        summary: format!("d = {}, ind_dirac = {:?}", dim.dim, dim.dirac_index),
        result: json!({"d": dim.dim, "ind_dirac": dim.dirac_index}),
        csv: None,
    })
}

fn degree_run(c: &DegreeConfig) -> Result<Output, RunError> {
    let map = match (&c.map, &c.polynomial) {
        (Some(name), None) => match name.as_str() {
            "cubic" => degree::MapSpec::cubic(),
            "identity-1" => degree::MapSpec::identity(1, 3.0),
            "identity-2" => degree::MapSpec::identity(2, 3.0),
            "square" => degree::MapSpec::complex_square(),
            other => return Err(RunError::Config(format!("unknown map {other}"))),
        },
        (None, Some(p)) => {
            if p.components.is_empty() {
                return Err(RunError::Config("empty polynomial table".into()));
            }
            degree::MapSpec::from_polynomial("polynomial", p.box_radius, p.components.clone())
        }
        _ => {
            return Err(RunError::Config(
                "need exactly one of `map` or `polynomial`".into(),
            ))
        }
    };
    if c.y.len() != map.dim {
        return Err(RunError::Config(format!(
            "y has {} entries but the map has dimension {}",
            c.y.len(),
            map.dim
        )));
    }
    let roots = degree::regular_preimages(&map, &c.y, c.grid_density, 1e-8)
        .map_err(RunError::num)?;
    let dz: i64 = roots.iter().map(|r| r.sign as i64).sum();
    let d2 = (roots.len() % 2) as u8;
    Ok(Output {
        summary: format!(
            "degree_z = {dz}, degree_mod2 = {d2} ({} preimages)",
            roots.len()
        ),
        result: json!({
            "degree_z": dz,
            "degree_mod2": d2,
            "roots": roots.iter().map(|r| json!({"x": r.x, "sign": r.sign})).collect::<Vec<_>>(),
        }),
        csv: None,
    })
}
