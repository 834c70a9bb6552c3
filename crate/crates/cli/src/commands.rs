use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use cmv_scattering::circle::{winding_index, GridFunction};
use cmv_scattering::classes::{classify, gi_functional, ClassInput, ClassifyOptions};
use cmv_scattering::cmv::generalized_eigenrows;
use cmv_scattering::generators::{bernstein, geometric, jacobi, polyweight};
use cmv_scattering::io::{grid_from_csv, grid_to_csv};
use cmv_scattering::operators::{
    glm_residual, gram_defect, model_gram, transform_product_residual, widom_check, Basis,
};
use cmv_scattering::scattering::{
    canonical_test_escalating, inverse_scattering, noncanonical_family, scattering_function,
    CanonicalReport, DEFAULT_SIZES, MAX_ESCALATED_SIZE,
};
use cmv_scattering::schur::{schur_forward, schur_inverse, VerblunskyData};
use cmv_scattering::transfer::determinant_residual;
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use crate::failure::Failure;
use crate::output::{pair, pairs, Artifacts};

/// Named tolerances; `--tol NAME=VALUE` overrides entries.
pub type Tolerances = BTreeMap<String, f64>;

pub fn default_tolerances() -> Tolerances {
    [
        ("deter", 1e-10),
        ("glm", 1e-6),
        ("gram", 1e-6),
        ("llinv", 1e-8),
        ("roundtrip", 1e-8),
        ("tau_hi", 1e-3),
        ("tau_lo", 1e-6),
        ("th1_asymptotics", 1e-3),
        ("trim", 1e-10),
        ("widom", 1e-6),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v))
    .collect()
}

pub fn parse_tolerances(overrides: &[String]) -> Result<Tolerances, Failure> {
    let mut tol = default_tolerances();
    for raw in overrides {
        let (name, value) = raw
            .split_once('=')
            .ok_or_else(|| Failure::Invalid(format!("--tol expects NAME=VALUE, got `{raw}`")))?;
        let slot = tol
            .get_mut(name)
            .ok_or_else(|| Failure::Invalid(format!("unknown tolerance `{name}`")))?;
        *slot = value
            .parse::<f64>()
            .ok()
            .filter(|v| *v > 0.0 && v.is_finite())
            .ok_or_else(|| {
                Failure::Invalid(format!("tolerance `{name}` must be a positive number"))
            })?;
    }
    Ok(tol)
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

pub fn read_alphas(path: &Path) -> Result<VerblunskyData, Failure> {
    VerblunskyData::from_json(&read(path)?)
        .map_err(|e| Failure::Invalid(format!("{}: {e}", path.display())))
}

pub fn read_grid(path: &Path) -> Result<GridFunction, Failure> {
    grid_from_csv(&read(path)?).map_err(|e| Failure::Invalid(format!("{}: {e}", path.display())))
}

pub fn check_grid(m: usize) -> Result<usize, Failure> {
    cmv_scattering::circle::check_grid_size(m)?;
    Ok(m)
}

fn provenance(command: &str, config: &Value, tol: &Tolerances) -> Value {
    json!({
        "tool": "cmvscat",
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "config": config,
        "tolerances": tol,
    })
}

fn with_provenance(
    arts: &mut Artifacts,
    mut summary: Value,
    prov: Value,
    name: &str,
) -> Result<(), Failure> {
    summary["provenance"] = prov.clone();
    arts.json(name, &summary)?;
    arts.json("provenance.json", &prov)
}

fn canonical_report(s: &GridFunction, tol: &Tolerances) -> Result<CanonicalReport, Failure> {
    let max_size = (s.len() / 4).min(MAX_ESCALATED_SIZE);
    Ok(canonical_test_escalating(
        s,
        &DEFAULT_SIZES,
        tol["tau_lo"],
        tol["tau_hi"],
        max_size,
    )?)
}

pub fn forward(alphas: &Path, grid: usize, tol: &Tolerances) -> Result<Artifacts, Failure> {
    let v = read_alphas(alphas)?;
    let sd = scattering_function(&v, grid)?;
    let report = canonical_report(&sd.s, tol)?;
    let taylor: Vec<Complex64> = (0..=v.n_supp().max(8) as i64)
        .map(|n| sd.spectral.d.coeff(n))
        .collect();
    let config = json!({ "alphas": alphas.display().to_string(), "grid": grid });
    let summary = json!({
        "alpha_minus_one": pair(v.alpha_minus_one()),
        "n_supp": v.n_supp(),
        "grid": grid,
        "index": sd.index,
        "canonical_verdict": report.verdict,
        "shat_minus1": pair(sd.shat.coeff(-1)),
        "d_at_origin": sd.spectral.d.coeff(0).re,
        "rho_product": (0..v.n_supp()).map(|k| v.rho(k)).product::<f64>(),
        "d_taylor": pairs(&taylor),
        "canonical_evidence": report,
    });
    let mut arts = Artifacts::default();
    arts.text("weight.csv", grid_to_csv(&sd.spectral.w));
    arts.text("scattering.csv", grid_to_csv(&sd.s));
    arts.text("alphas.json", v.to_json() + "\n");
    with_provenance(
        &mut arts,
        summary,
        provenance("forward", &config, tol),
        "summary.json",
    )?;
    Ok(arts)
}

#[derive(Serialize)]
struct FamilyRecord {
    tau: [f64; 2],
    alpha_minus_one: [f64; 2],
    d_taylor: Vec<[f64; 2]>,
    match_error: f64,
    weight_file: String,
    alphas: Vec<[f64; 2]>,
}

pub fn inverse(
    scattering: &Path,
    grid: Option<usize>,
    depth: usize,
    family: Option<&[Complex64]>,
    tol: &Tolerances,
) -> Result<Artifacts, Failure> {
    let s = read_grid(scattering)?;
    if let Some(m) = grid {
        if m != s.len() {
            return Err(Failure::Invalid(format!(
                "--grid {m} does not match the {} samples in {}",
                s.len(),
                scattering.display()
            )));
        }
    }
    let config = json!({
        "scattering": scattering.display().to_string(),
        "grid": s.len(),
        "depth": depth,
        "family": family.map(pairs),
    });
    let prov = provenance("inverse", &config, tol);
    let mut arts = Artifacts::default();
    if let Some(taus) = family {
        let members = noncanonical_family(&s, taus)?;
        let mut records = Vec::with_capacity(members.len());
        for (k, m) in members.iter().enumerate() {
            let file = format!("weight_{k}.csv");
            arts.text(&file, grid_to_csv(&m.w));
            records.push(FamilyRecord {
                tau: pair(m.tau),
                alpha_minus_one: pair(m.alpha_minus_one),
                d_taylor: pairs(&m.d_taylor),
                match_error: m.match_error,
                weight_file: file,
                alphas: pairs(m.verblunsky(depth)?.trimmed(tol["trim"]).alphas()),
            });
        }
        let summary = json!({
            "index": winding_index(&s)?.index,
            "solutions": records,
            "max_match_error": members.iter().map(|m| m.match_error).fold(0.0, f64::max),
        });
        with_provenance(&mut arts, summary, prov, "family.json")?;
        return Ok(arts);
    }
    let result = inverse_scattering(&s, depth).map_err(|e| match e {
        cmv_scattering::Error::NonCanonical(m) | cmv_scattering::Error::Undecided(m) => Failure::Guard(format!(
            "the symbol is not certified canonical ({m}); non-canonical symbols admit a family of solutions, list them with --family tau1,tau2,..."
        )),
        other => other.into(),
    })?;
    let data = result.data.trimmed(tol["trim"]);
    let summary = json!({
        "max_abs_error": result.match_error,
        "alpha_minus_one": pair(data.alpha_minus_one()),
        "n_recovered": data.n_supp(),
        "depth": depth,
        "degeneracy": result.degeneracy,
        "canonical_evidence": result.report,
    });
    arts.text("alphas.json", data.to_json() + "\n");
    arts.text("weight.csv", grid_to_csv(&result.spectral.w));
    with_provenance(&mut arts, summary, prov, "match.json")?;
    Ok(arts)
}

#[derive(Serialize)]
struct Check {
    value: f64,
    tolerance: f64,
    pass: bool,
}

fn check(value: f64, tolerance: f64) -> Check {
    Check {
        value,
        tolerance,
        pass: value.is_finite() && value < tolerance,
    }
}

/// Block used for the model-space Gram check.
const GRAM_BLOCK: usize = 16;
/// Row index of the asymptotics check.
const ASYMPTOTIC_ROW: usize = 20;
/// Largest chain length in the determinant-identity sweep.
const DETER_MAX: usize = 12;

/// Returns the report and whether every check passed.
pub fn verify(
    alphas: &Path,
    grid: usize,
    block: usize,
    tol: &Tolerances,
) -> Result<(Artifacts, bool), Failure> {
    if block < 4 {
        return Err(Failure::Invalid(format!(
            "--block must be at least 4, got {block}"
        )));
    }
    let v = read_alphas(alphas)?;
    let glm = glm_residual(&v, block, grid)?;
    let widom = widom_check(&v, block, grid)?;
    let llinv = transform_product_residual(&v, block, grid)?;
    let n_deter = v.n_supp().min(DETER_MAX);
    let mut deter = 0.0f64;
    for n in 0..=n_deter {
        for j in 0..=n {
            deter = deter.max(determinant_residual(&v, j, n)?);
        }
    }
    let gram = gram_defect(&model_gram(&v, GRAM_BLOCK, Basis::F, grid)?)
        .max(gram_defect(&model_gram(&v, GRAM_BLOCK, Basis::E, grid)?));
    let rows = generalized_eigenrows(&v, ASYMPTOTIC_ROW, grid)?;
    let last = rows.last().expect("rows up to the asymptotic index");
    let th1 = last.r_even.max(last.r_odd);
    let back = schur_forward(&schur_inverse(&v, grid)?, v.n_supp(), v.alpha_minus_one())?;
    let roundtrip = if back.degeneracy.is_some() {
        f64::INFINITY
    } else {
        back.data
            .alphas()
            .iter()
            .zip(v.alphas())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    };
    let checks: BTreeMap<&str, Check> = [
        ("deter", check(deter, tol["deter"])),
        ("glm", check(glm.residual, tol["glm"])),
        ("gram", check(gram, tol["gram"])),
        ("llinv", check(llinv, tol["llinv"])),
        ("roundtrip", check(roundtrip, tol["roundtrip"])),
        ("th1_asymptotics", check(th1, tol["th1_asymptotics"])),
        ("widom", check(widom.gap, tol["widom"])),
    ]
    .into_iter()
    .collect();
    let all_pass = checks.values().all(|c| c.pass);
    let gi = gi_functional(&v);
    let config = json!({
        "alphas": alphas.display().to_string(),
        "grid": grid,
        "block": block,
        "gram_block": GRAM_BLOCK,
        "asymptotic_row": ASYMPTOTIC_ROW,
        "deter_max": n_deter,
    });
    let report = json!({
        "all_pass": all_pass,
        "checks": checks,
        "glm_tail_bound": glm.tail_bound,
        "widom": { "det": widom.det, "product": widom.product, "trace": widom.trace, "trace_series": widom.trace_series },
        "gi_partial_sums": gi.partial_sums,
        "widom_partial_products": gi.partial_products,
    });
    let mut arts = Artifacts::default();
    with_provenance(
        &mut arts,
        report,
        provenance("verify", &config, tol),
        "report.json",
    )?;
    Ok((arts, all_pass))
}

pub enum ClassSource<'a> {
    Alphas(&'a Path),
    Weight(&'a Path),
    Scattering(&'a Path),
}

pub fn classify_cmd(
    source: ClassSource,
    grid: usize,
    depth: usize,
    tol: &Tolerances,
) -> Result<Artifacts, Failure> {
    let (input, path, kind) = match source {
        ClassSource::Alphas(p) => (ClassInput::Verblunsky(read_alphas(p)?), p, "alphas"),
        ClassSource::Weight(p) => (ClassInput::Weight(read_grid(p)?), p, "weight"),
        ClassSource::Scattering(p) => (ClassInput::Scattering(read_grid(p)?), p, "scattering"),
    };
    let grid = match &input {
        ClassInput::Verblunsky(_) => grid,
        ClassInput::Weight(w) | ClassInput::Scattering(w) => w.len(),
    };
    let opts = ClassifyOptions {
        grid,
        depth,
        ..Default::default()
    };
    let report = classify(&input, &opts)?;
    let config = json!({ kind: path.display().to_string(), "grid": grid, "depth": depth });
    let mut value = serde_json::to_value(&report).map_err(|e| Failure::Invalid(e.to_string()))?;
    value["provenance"] = provenance("classify", &config, tol);
    let mut arts = Artifacts::default();
    arts.json("report.json", &value)?;
    arts.json("provenance.json", &value["provenance"])?;
    Ok(arts)
}

pub enum Generator {
    Jacobi {
        gamma1: f64,
        gamma2: f64,
        n: usize,
    },
    Polyweight {
        roots: Vec<Complex64>,
        alpha_minus_one: Complex64,
    },
    Bernstein {
        a: Complex64,
    },
    Geometric {
        ratio: f64,
        n: usize,
    },
}

fn data_artifacts(arts: &mut Artifacts, v: &VerblunskyData, grid: usize) -> Result<Value, Failure> {
    let sd = scattering_function(v, grid)?;
    arts.text("alphas.json", v.to_json() + "\n");
    arts.text("weight.csv", grid_to_csv(&sd.spectral.w));
    arts.text("scattering.csv", grid_to_csv(&sd.s));
    Ok(json!({
        "alpha_minus_one": pair(v.alpha_minus_one()),
        "alphas": pairs(v.alphas()),
        "index": sd.index,
        "w_at_one": sd.spectral.w.samples()[0].re,
    }))
}

pub fn example(gen: &Generator, grid: usize, tol: &Tolerances) -> Result<Artifacts, Failure> {
    let mut arts = Artifacts::default();
    let (name, config, summary) = match gen {
        Generator::Jacobi { gamma1, gamma2, n } => {
            let v = jacobi(*gamma1, *gamma2, *n)?;
            arts.text("alphas.json", v.to_json() + "\n");
            let mut summary = json!({
                "alpha_minus_one": pair(v.alpha_minus_one()),
                "alphas": pairs(v.alphas()),
            });
            if *gamma1 >= 0.0 && *gamma2 >= 0.0 {
                let raw = GridFunction::from_fn(grid, |t| {
                    let x =
                        (1.0 - t).norm().powf(2.0 * gamma1) * (1.0 + t).norm().powf(2.0 * gamma2);
                    Complex64::new(x, 0.0)
                })?;
                let mean = raw.mean().re;
                arts.text("weight.csv", grid_to_csv(&raw.map(|x| x / mean)));
                summary["weight_scale"] = json!(1.0 / mean);
            }
            let config = json!({ "generator": "jacobi", "gamma1": gamma1, "gamma2": gamma2, "n": n, "grid": grid });
            ("jacobi", config, summary)
        }
        Generator::Polyweight {
            roots,
            alpha_minus_one,
        } => {
            let p = polyweight(roots, *alpha_minus_one, grid)?;
            arts.text("weight.csv", grid_to_csv(&p.w));
            arts.text("scattering.csv", grid_to_csv(&p.s));
            let summary = json!({
                "alpha_minus_one": pair(p.alpha_minus_one),
                "poly": pairs(&p.poly),
                "scale": p.scale,
                "d_taylor": pairs(&p.d_taylor),
                "s_coefficient": pair(-p.alpha_minus_one.conj() * p.poly[0].conj()),
                "index": p.index,
            });
            let config = json!({ "generator": "polyweight", "roots": pairs(roots), "alpha_minus_one": pair(*alpha_minus_one), "grid": grid });
            ("polyweight", config, summary)
        }
        Generator::Bernstein { a } => {
            let summary = data_artifacts(&mut arts, &bernstein(*a)?, grid)?;
            (
                "bernstein",
                json!({ "generator": "bernstein", "a": pair(*a), "grid": grid }),
                summary,
            )
        }
        Generator::Geometric { ratio, n } => {
            let summary = data_artifacts(&mut arts, &geometric(*ratio, *n)?, grid)?;
            (
                "geometric",
                json!({ "generator": "geometric", "ratio": ratio, "n": n, "grid": grid }),
                summary,
            )
        }
    };
    let prov = provenance(&format!("example {name}"), &config, tol);
    with_provenance(&mut arts, summary, prov, "summary.json")?;
    Ok(arts)
}
