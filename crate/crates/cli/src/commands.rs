//! Command implementations. Each runner returns an optional JSON payload
//! plus the check reports; the front end assembles the versioned document
//! and decides the exit code.

use std::str::FromStr;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use frobenius_forge::catalog::{self, LieType};
use frobenius_forge::esk;
use frobenius_forge::poly::rat_to_f64;
use frobenius_forge::report::{fmt_f64, CheckReport, Verdict};
use frobenius_forge::saito::FrobeniusData;
use frobenius_forge::toda::{self, TodaModel};
use frobenius_forge::{Error, PrepotentialProvider, Result};

use crate::config::RunConfig;

/// Owned rescaling-vector field passed into the derivative-based checks;
/// it may borrow the provider it evaluates.
type BoxedVField<'a> = Box<dyn Fn(&[Complex64]) -> Vec<Complex64> + 'a>;

pub struct CommandOutput {
    pub payload: Option<Value>,
    pub reports: Vec<CheckReport>,
}

impl CommandOutput {
    pub fn all_pass(&self) -> bool {
        self.reports
            .iter()
            .all(|r| matches!(r.verdict, Verdict::Pass | Verdict::Info))
    }
}

/// `catalog`: print every stored unfolding row and validate each one
/// structurally (restriction at the origin, quasihomogeneity, gradings).
pub fn run_catalog(cfg: &RunConfig) -> Result<CommandOutput> {
    let entries = catalog::catalog_entries();
    let mut rows = Vec::with_capacity(entries.len());
    let mut failures: Vec<String> = Vec::new();
    for e in &entries {
        rows.push(e.describe());
        if let Err(err) = e.validate() {
            failures.push(format!("{}{}: {err}", e.lie_type, e.rank));
        }
    }
    let mut report = if failures.is_empty() {
        CheckReport::from_residual("catalog-validates", 0.0, 0.0, entries.len())
    } else {
        CheckReport::from_residual("catalog-validates", f64::INFINITY, 0.0, entries.len())
            .with_note("failures", failures.join("; "))
    };
    report = report.with_seed(cfg.seed);
    Ok(CommandOutput {
        payload: Some(json!({ "entries": rows })),
        reports: vec![report],
    })
}

/// `build --type A --rank n`: construct the polynomial Frobenius structure
/// in flat coordinates and verify it (exact associativity, exact scaling,
/// pencil flatness).
pub fn run_build(cfg: &RunConfig, lie_type: &str, rank: usize) -> Result<CommandOutput> {
    let lie = LieType::from_str(lie_type)?;
    let spec = catalog::get_unfolding(lie, rank)?;
    let frob = FrobeniusData::build(&spec)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let mut reports = vec![frob.wdvv_check(cfg.samples, &mut rng)?, frob.euler_check()?];
    let lambdas = [
        Complex64::new(0.0, 0.0),
        Complex64::new(1.0, 0.0),
        Complex64::new(2.0, 1.0),
    ];
    // The pencil check nests finite differences, so cap its sample count.
    reports.push(frob.flat_pencil_check(
        &lambdas,
        cfg.samples.min(5),
        cfg.tol("flat-pencil")?,
        &mut rng,
    )?);
    let reports = reports.into_iter().map(|r| r.with_seed(cfg.seed)).collect();

    let n = frob.rank();
    let rational_matrix = |m: &frobenius_forge::ratmat::RatMat| -> Value {
        Value::Array(
            (0..n)
                .map(|i| {
                    Value::Array(
                        (0..n)
                            .map(|j| Value::String(m[(i, j)].to_string()))
                            .collect(),
                    )
                })
                .collect(),
        )
    };
    let poly_matrix = |rows: &Vec<Vec<frobenius_forge::MultiPoly>>| -> Value {
        Value::Array(
            rows.iter()
                .map(|row| {
                    Value::Array(
                        row.iter()
                            .map(|p| Value::String(p.canonical_string()))
                            .collect(),
                    )
                })
                .collect(),
        )
    };
    let payload = json!({
        "family": spec.lie_type.to_string(),
        "rank": n,
        "coxeter": spec.coxeter,
        "unfolding": spec.unfolding.canonical_string(),
        "flat_coordinates": frob.flat.t_of_b.iter().enumerate()
            .map(|(k, p)| format!("t{} = {}", k + 1, p.canonical_string()))
            .collect::<Vec<_>>(),
        "inverse_map": frob.flat.b_of_t.iter().enumerate()
            .map(|(k, p)| format!("b{} = {}", k + 1, p.canonical_string()))
            .collect::<Vec<_>>(),
        "eta": rational_matrix(&frob.eta),
        "eta_inverse": rational_matrix(&frob.eta_inv),
        "prepotential": frob.prepotential.canonical_string(),
        "euler_weights": frob.euler.iter().map(|w| w.to_string()).collect::<Vec<_>>(),
        "scaling_exponent": frob.lambda.to_string(),
        "intersection_form": poly_matrix(&frob.intersection),
    });
    Ok(CommandOutput {
        payload: Some(payload),
        reports,
    })
}

/// `toda --rank n`: the chain model suite — generalized associativity,
/// constancy of the Euler contraction, the staged finite-difference oracle,
/// scaling covariance, and the positivity diagnostic.
pub fn run_toda(cfg: &RunConfig, rank: usize) -> Result<CommandOutput> {
    let model = TodaModel::new(rank)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let samples = cfg.samples;
    let mut reports = vec![
        model.gen_wdvv_check(samples, cfg.tol("gen-wdvv")?, &mut rng)?,
        model.euler_metric_check(samples, cfg.tol("euler-metric-constancy")?, &mut rng)?,
        model.fd_oracle_check(samples, 1e-5, cfg.tol("third-derivative-fd")?, &mut rng)?,
        model.homogeneity_check(samples, cfg.tol("scaling-covariance")?, &mut rng)?,
    ];
    let points: Vec<Vec<Complex64>> = (0..samples).map(|_| model.sample_point(&mut rng)).collect();
    reports.push(esk::kahler_positivity_report(&model, &points)?);
    let reports = reports.into_iter().map(|r| r.with_seed(cfg.seed)).collect();
    Ok(CommandOutput {
        payload: Some(json!({ "rank": rank })),
        reports,
    })
}

/// `duality --rank n`: sample base points off the discriminant, compare the
/// pulled-back intersection form with the chain metric through the best-fit
/// constant, and check the spectral residue tensor (symmetry + generalized
/// associativity).
pub fn run_duality(cfg: &RunConfig, lie_type: &str, rank: usize) -> Result<CommandOutput> {
    let lie = LieType::from_str(lie_type)?;
    let spec = catalog::get_unfolding(lie, rank)?;
    let frob = FrobeniusData::build(&spec)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let mut reports = Vec::new();
    let mut constants: Vec<Complex64> = Vec::new();
    let mut asym_worst: f64 = 0.0;
    let mut genwdvv_worst: f64 = 0.0;
    for index in 0..cfg.samples {
        let (b, curve) = toda::sample_base_point(rank, &mut rng)?;
        let rep = toda::duality_check(&frob, &b, 0.0)?
            .with_seed(cfg.seed)
            .with_note("point-index", index.to_string());
        let re: f64 = rep.metadata["constant-re"].parse().unwrap_or(f64::NAN);
        let im: f64 = rep.metadata["constant-im"].parse().unwrap_or(f64::NAN);
        constants.push(Complex64::new(re, im));
        reports.push(rep);
        let t = toda::residue_tensor(&curve)?;
        asym_worst = asym_worst.max(toda::tensor_asymmetry(&t));
        genwdvv_worst = genwdvv_worst.max(toda::residue_gen_wdvv_residual(&curve)?);
    }
    let c0 = constants[0];
    let spread = constants
        .iter()
        .map(|c| (c - c0).norm())
        .fold(0.0, f64::max)
        / c0.norm().max(1e-300);
    reports.push(
        CheckReport::from_residual(
            "duality-constancy",
            spread,
            cfg.tol("duality-constancy")?,
            cfg.samples,
        )
        .with_seed(cfg.seed)
        .with_note("constant-re", fmt_f64(c0.re))
        .with_note("constant-im", fmt_f64(c0.im)),
    );
    reports.push(
        CheckReport::from_residual(
            "residue-symmetry",
            asym_worst,
            cfg.tol("residue-symmetry")?,
            cfg.samples,
        )
        .with_seed(cfg.seed),
    );
    reports.push(
        CheckReport::from_residual(
            "residue-gen-wdvv",
            genwdvv_worst,
            cfg.tol("residue-gen-wdvv")?,
            cfg.samples,
        )
        .with_seed(cfg.seed),
    );
    Ok(CommandOutput {
        payload: Some(json!({ "family": lie.to_string(), "rank": rank })),
        reports,
    })
}

enum Provider {
    Toda(TodaModel),
    Saito(Box<FrobeniusData>),
}

impl Provider {
    fn as_dyn(&self) -> &dyn PrepotentialProvider {
        match self {
            Provider::Toda(m) => m,
            Provider::Saito(f) => f.as_ref(),
        }
    }

    fn sample_point(&self, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
        match self {
            Provider::Toda(m) => m.sample_point(rng),
            Provider::Saito(f) => (0..f.rank())
                .map(|_| {
                    let sign = if rand::Rng::gen_bool(rng, 0.5) {
                        1.0
                    } else {
                        -1.0
                    };
                    Complex64::new(
                        sign * rand::Rng::gen_range(rng, 0.6..1.4),
                        rand::Rng::gen_range(rng, -0.5..0.5),
                    )
                })
                .collect(),
        }
    }

    /// The two canonical rescaling vectors at a point: the scaling field
    /// ("euler") and the distinguished constant vector ("unit").
    fn canonical_v(&self, choice: &str, z: &[Complex64]) -> Vec<Complex64> {
        match (self, choice) {
            (Provider::Toda(_), "euler") => z.to_vec(),
            (Provider::Toda(_), "unit") => vec![Complex64::new(1.0, 0.0); z.len()],
            (Provider::Saito(f), "euler") => f
                .euler
                .iter()
                .zip(z)
                .map(|(w, t)| Complex64::new(rat_to_f64(w), 0.0) * t)
                .collect(),
            (Provider::Saito(_), "unit") => {
                let mut v = vec![Complex64::new(0.0, 0.0); z.len()];
                v[0] = Complex64::new(1.0, 0.0);
                v
            }
            _ => unreachable!("validated earlier"),
        }
    }
}

fn parse_custom_v(raw: &str, rank: usize) -> Result<Vec<Complex64>> {
    let body = raw.trim_start_matches("custom:");
    let mut out = Vec::new();
    for part in body.split(';') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let (re, im) = match part.split_once(',') {
            Some((r, i)) => (r.trim(), i.trim()),
            None => (part, "0"),
        };
        let re: f64 = re
            .parse()
            .map_err(|_| Error::Config(format!("bad component `{part}` in custom vector")))?;
        let im: f64 = im
            .parse()
            .map_err(|_| Error::Config(format!("bad component `{part}` in custom vector")))?;
        out.push(Complex64::new(re, im));
    }
    if out.len() != rank {
        return Err(Error::Config(format!(
            "custom vector has {} components, expected {rank}",
            out.len()
        )));
    }
    Ok(out)
}

/// Fold single-point reports of one named check into a combined report:
/// worst residual, summed samples, most severe verdict.
fn merge_reports(reports: Vec<CheckReport>) -> CheckReport {
    fn severity(v: Verdict) -> u8 {
        match v {
            Verdict::Info => 0,
            Verdict::Pass => 1,
            Verdict::Degenerate => 2,
            Verdict::Fail => 3,
        }
    }
    let mut it = reports.into_iter();
    let mut acc = it.next().expect("merge of at least one report");
    for r in it {
        acc.samples += r.samples;
        // Adopt the metadata of the worst report: highest severity, then
        // largest residual, so the notes describe the point that drove the
        // merged verdict and residual.
        let worse_verdict = severity(r.verdict) > severity(acc.verdict);
        let same_verdict_bigger_residual = severity(r.verdict) == severity(acc.verdict)
            && match (acc.max_residual, r.max_residual) {
                (Some(a), Some(b)) => b > a,
                (None, Some(_)) => true,
                _ => false,
            };
        acc.max_residual = match (acc.max_residual, r.max_residual) {
            (Some(a), Some(b)) => Some(a.max(b)),
            (a, None) => a,
            (None, b) => b,
        };
        if worse_verdict || same_verdict_bigger_residual {
            acc.verdict = r.verdict;
            for (k, v) in r.metadata {
                acc.metadata.insert(k, v);
            }
        }
    }
    acc
}

/// Convert a degenerate-input error into a degenerate verdict so a single
/// bad sample point is reported rather than aborting the whole run.
fn degenerate_as_report(name: &str, res: Result<CheckReport>) -> Result<CheckReport> {
    match res {
        Err(Error::Degenerate(why)) => Ok(CheckReport::degenerate(name, &why)),
        other => other,
    }
}

/// `esk-check --provider {toda|saito} --rank n --V {euler|unit|custom:..}`:
/// the generic engine — unit law, associativity, tensor reconstruction,
/// the F-manifold identity, metric flatness, the rescaling law, and the
/// positivity diagnostic, folded over seeded sample points.
pub fn run_esk_check(
    cfg: &RunConfig,
    provider: &str,
    rank: usize,
    v_choice: &str,
) -> Result<CommandOutput> {
    let provider = match provider {
        "toda" => Provider::Toda(TodaModel::new(rank)?),
        "saito" => {
            let spec = catalog::get_unfolding(LieType::A, rank)?;
            Provider::Saito(Box::new(FrobeniusData::build(&spec)?))
        }
        other => {
            return Err(Error::Config(format!(
                "unknown provider `{other}` (expected toda or saito)"
            )))
        }
    };
    let custom = if v_choice.starts_with("custom:") {
        Some(parse_custom_v(v_choice, rank)?)
    } else if v_choice == "euler" || v_choice == "unit" {
        None
    } else {
        return Err(Error::Config(format!(
            "unknown rescaling vector `{v_choice}` (expected euler, unit, or custom:..)"
        )));
    };

    let p = provider.as_dyn();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let points: Vec<Vec<Complex64>> = (0..cfg.samples)
        .map(|_| provider.sample_point(&mut rng))
        .collect();

    // A family that stays degenerate for every rescaling vector has no
    // usable metric: report that instead of a vacuous pass.
    if esk::find_nondegenerate_v(p, &points[0], &mut rng, 10)?.is_none() {
        let report = CheckReport::degenerate(
            "degenerate-family",
            "no rescaling vector yields an invertible metric at the probe point",
        )
        .with_seed(cfg.seed);
        return Ok(CommandOutput {
            payload: Some(json!({ "provider": provider_name(&provider), "rank": rank })),
            reports: vec![report],
        });
    }

    let vs: Vec<Vec<Complex64>> = points
        .iter()
        .map(|z| match &custom {
            Some(v) => v.clone(),
            None => provider.canonical_v(v_choice, z),
        })
        .collect();
    // The alternate canonical vector feeds the rescaling-law check.
    let ws: Vec<Vec<Complex64>> = points
        .iter()
        .map(|z| {
            let alt = if v_choice == "unit" { "euler" } else { "unit" };
            provider.canonical_v(alt, z)
        })
        .collect();

    let step = 1e-4;
    let mut unit = Vec::new();
    let mut assoc = Vec::new();
    let mut defmul = Vec::new();
    let mut fman = Vec::new();
    let mut flat = Vec::new();
    let mut resc = Vec::new();
    for ((z, v), w) in points.iter().zip(&vs).zip(&ws) {
        let zs = std::slice::from_ref(z);
        unit.push(degenerate_as_report(
            "unit-law",
            esk::unit_law_check(p, zs, v, cfg.tol("unit-law")?),
        )?);
        assoc.push(degenerate_as_report(
            "associativity",
            esk::associativity_check(p, zs, v, cfg.tol("associativity")?),
        )?);
        defmul.push(degenerate_as_report(
            "defmul-consistency",
            esk::defmul_check(p, zs, v, &mut rng, cfg.tol("defmul-consistency")?),
        )?);
        // For the euler choice the rescaling vector is a genuine field, so
        // the derivative-based checks must re-evaluate it inside their
        // stencils; unit and custom vectors are constant.
        let v_field: BoxedVField<'_> = if custom.is_none() && v_choice == "euler" {
            let prov = &provider;
            Box::new(move |y: &[Complex64]| prov.canonical_v("euler", y))
        } else {
            let fixed = v.clone();
            Box::new(move |_: &[Complex64]| fixed.clone())
        };
        fman.push(degenerate_as_report(
            "fmanifold-identity",
            esk::fmanifold_identity_field_check(
                p,
                zs,
                &*v_field,
                step,
                cfg.tol("fmanifold-identity")?,
            ),
        )?);
        flat.push(degenerate_as_report(
            "metric-flatness",
            esk::flatness_field_check(p, zs, &*v_field, step, cfg.tol("metric-flatness")?),
        )?);
        resc.push(degenerate_as_report(
            "rescaling-law",
            esk::rescaling_check(p, zs, v, w, &mut rng, cfg.tol("rescaling-law")?),
        )?);
    }
    let mut reports = vec![
        merge_reports(unit),
        merge_reports(assoc),
        merge_reports(defmul),
        merge_reports(fman),
        merge_reports(flat),
        merge_reports(resc),
        esk::kahler_positivity_report(p, &points)?,
    ];
    for r in &mut reports {
        r.seed = Some(cfg.seed);
    }
    Ok(CommandOutput {
        payload: Some(json!({
            "provider": provider_name(&provider),
            "rank": rank,
            "rescaling_vector": v_choice,
        })),
        reports,
    })
}

fn provider_name(p: &Provider) -> &'static str {
    match p {
        Provider::Toda(_) => "toda",
        Provider::Saito(_) => "saito",
    }
}
