//! One function per subcommand. Each returns a table plus any failed numerical checks.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use orthoavg::asym::{cue_fh_asym, cue_gap_asym, orth_fh_asym, orth_fh_envelope, orth_gap_asym, AsymPrediction};
use orthoavg::ensembles::{
    cbe_generating, check_identities, default_tol, exact_average_opuc, exact_average_th, gap_generating,
    occupancy_distribution,
};
use orthoavg::linalg::{toeplitz_det, LogValue};
use orthoavg::mc::sample_summaries;
use orthoavg::moments::{compute_moments, MomentSequence};
use orthoavg::mp::{self, Float};
use orthoavg::opuc::{szego_recursion, toeplitz_logdet_szego};
use orthoavg::special::{constants, log_abs2_barnes_g_mp, log_barnes_g_mp};
use orthoavg::symbols::{AnySymbol, EnsembleLabel, LaurentPotential};

use crate::config::RunConfig;
use crate::table::{Cell, Table};
use crate::CliError;

/// Relative disagreement between the two exact routes that counts as a numerical failure.
const ROUTE_TOL: f64 = 1e-9;
/// Identity residual above which `identities` fails.
const IDENTITY_TOL: f64 = 1e-9;
/// Allowed growth of |ratio − 1| between consecutive n in `compare`.
const MONOTONE_SLACK: f64 = 1.2;
/// Errors below this are treated as exact agreement in the monotonicity check.
const EXACT_FLOOR: f64 = 1e-12;

pub struct Outcome {
    pub table: Table,
    pub failures: Vec<String>,
}

impl Outcome {
    fn ok(table: Table) -> Self {
        Outcome { table, failures: Vec::new() }
    }
}

fn load_symbol(cfg: &RunConfig) -> Result<AnySymbol, CliError> {
    let path = cfg.symbol_path.as_ref().ok_or_else(|| CliError::Usage("--symbol is required".into()))?;
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read symbol {}: {e}", path.display())))?;
    Ok(AnySymbol::from_json(&text)?)
}

fn tol(cfg: &RunConfig) -> f64 {
    cfg.tol.unwrap_or_else(|| default_tol(cfg.precision_bits))
}

fn moments_for(cfg: &RunConfig, sym: &AnySymbol, m_max: usize) -> Result<MomentSequence, CliError> {
    Ok(compute_moments(sym, m_max, tol(cfg), cfg.precision_bits)?)
}

fn positive_n(cfg: &RunConfig) -> Result<Vec<usize>, CliError> {
    let ns = cfg.require_n_list()?;
    if ns.contains(&0) {
        return Err(CliError::Usage("values in --n must be positive".into()));
    }
    Ok(ns.to_vec())
}

fn log_cells(lv: &LogValue) -> (Cell, f64) {
    (Cell::from(mp::to_decimal(&lv.log_abs)), lv.log_f64())
}

pub fn moments(cfg: &RunConfig) -> Result<(MomentSequence, usize), CliError> {
    let sym = load_symbol(cfg)?;
    let n_max = *cfg.require_n_list()?.iter().max().unwrap_or(&0);
    let ms = moments_for(cfg, &sym, 2 * n_max)?;
    Ok((ms, 2 * n_max))
}

pub fn moments_table(ms: &MomentSequence) -> Table {
    let mut t = Table::new(&["m", "g_m", "err"]);
    for m in 0..=ms.max_index() {
        t.push(vec![m.into(), mp::to_decimal(ms.get(m as i64)).into(), ms.err_bound.into()]);
    }
    t
}

fn prediction(cfg: &RunConfig, sym: &AnySymbol, n: usize, label: EnsembleLabel) -> Result<AsymPrediction, CliError> {
    Ok(match sym {
        AnySymbol::FisherHartwig(f) => orth_fh_asym(f, n, label, cfg.e_const_variant)?,
        AnySymbol::Gap(g) => orth_gap_asym(g, n, label)?,
    })
}

fn toeplitz_prediction(cfg: &RunConfig, sym: &AnySymbol, n: usize) -> Result<AsymPrediction, CliError> {
    Ok(match sym {
        AnySymbol::FisherHartwig(f) => cue_fh_asym(f, n, cfg.e_const_variant)?,
        AnySymbol::Gap(g) => cue_gap_asym(g, n)?,
    })
}

pub fn compare(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let sym = load_symbol(cfg)?;
    let ns = positive_n(cfg)?;
    let n_max = *ns.iter().max().unwrap();
    let prec = cfg.precision_bits;
    let ms = moments_for(cfg, &sym, 2 * n_max + 1)?;
    let state = szego_recursion(&ms, 2 * n_max, prec)?;
    let with_envelope = match &sym {
        AnySymbol::FisherHartwig(f) => f.alpha0 == 0.0 && f.alpha_end == 0.0 && !f.singularities.is_empty(),
        AnySymbol::Gap(_) => false,
    };
    let mut t = Table::new(&[
        "quantity",
        "label",
        "n",
        "log_exact_th",
        "log_exact_opuc",
        "log_pred",
        "ratio",
        "envelope",
        "error_order",
        "log_exact_display",
    ]);
    let mut failures = Vec::new();
    let mut series: BTreeMap<(String, String), Vec<(usize, f64)>> = BTreeMap::new();
    let mut emit = |t: &mut Table, quantity: &str, label: &str, n: usize, a: &LogValue, b: &LogValue, p: &AsymPrediction| {
        let (a_cell, a_f) = log_cells(a);
        let (b_cell, _) = log_cells(b);
        let ratio = (a_f - p.log_value).exp();
        if a.rel_diff(b) > ROUTE_TOL {
            failures.push(format!("{quantity} {label} n={n}: exact routes disagree (relative {:e})", a.rel_diff(b)));
        }
        if !p.envelope {
            series.entry((quantity.to_string(), label.to_string())).or_default().push((n, (ratio - 1.0).abs()));
        }
        t.push(vec![
            quantity.into(),
            label.into(),
            n.into(),
            a_cell,
            b_cell,
            p.log_value.into(),
            ratio.into(),
            p.envelope.into(),
            p.error_order.clone().into(),
            format!("{a_f:.12e}").into(),
        ]);
    };
    for &n in &ns {
        let d_lu = toeplitz_det(&ms, 2 * n, prec)?;
        let d_sz = toeplitz_logdet_szego(&state, 2 * n)?;
        emit(&mut t, "toeplitz_2n", "-", n, &d_lu, &d_sz, &toeplitz_prediction(cfg, &sym, n)?);
        for label in cfg.labels() {
            let th = exact_average_th(&ms, n, label, prec)?;
            let op = exact_average_opuc(&ms, n, label, &state, prec)?;
            emit(&mut t, "average", label.code(), n, &th.log_value, &op.log_value, &prediction(cfg, &sym, n, label)?);
            if with_envelope {
                if let AnySymbol::FisherHartwig(f) = &sym {
                    let env = orth_fh_envelope(f, n, label)?;
                    emit(&mut t, "average", label.code(), n, &th.log_value, &op.log_value, &env);
                }
            }
        }
    }
    for ((quantity, label), errs) in &series {
        for w in errs.windows(2) {
            let ((n0, e0), (n1, e1)) = (w[0], w[1]);
            if e1 > EXACT_FLOOR && e1 > MONOTONE_SLACK * e0 {
                failures.push(format!(
                    "{quantity} {label}: |ratio-1| grew from {e0:e} (n={n0}) to {e1:e} (n={n1})"
                ));
            }
        }
    }
    Ok(Outcome { table: t, failures })
}

pub fn identities(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let sym = load_symbol(cfg)?;
    let ns = positive_n(cfg)?;
    let n_max = *ns.iter().max().unwrap();
    let ms = moments_for(cfg, &sym, 2 * n_max + 2)?;
    let mut t = Table::new(&["n", "identity", "residual"]);
    let mut failures = Vec::new();
    for &n in &ns {
        let rep = check_identities(&ms, n, cfg.precision_bits)?;
        for r in &rep.residuals {
            t.push(vec![n.into(), r.name.clone().into(), r.residual.into()]);
        }
        t.push(vec![n.into(), "max".into(), rep.max_residual.into()]);
        if !(rep.max_residual < IDENTITY_TOL) {
            failures.push(format!("n={n}: max identity residual {:e} exceeds {IDENTITY_TOL:e}", rep.max_residual));
        }
    }
    Ok(Outcome { table: t, failures })
}

/// Arc parameters from flags, falling back to a gap symbol file.
fn gap_parameters(cfg: &RunConfig) -> Result<(f64, f64, LaurentPotential), CliError> {
    let from_file = match &cfg.symbol_path {
        Some(_) => match load_symbol(cfg)? {
            AnySymbol::Gap(g) => Some(g),
            AnySymbol::FisherHartwig(_) => {
                return Err(CliError::Usage("the gap command needs a gap symbol (or --t0/--s)".into()))
            }
        },
        None => None,
    };
    let t0 = cfg.t0.or(from_file.as_ref().map(|g| g.t0)).ok_or_else(|| CliError::Usage("--t0 is required".into()))?;
    let s = cfg.s.or(from_file.as_ref().map(|g| g.s)).ok_or_else(|| CliError::Usage("--s is required".into()))?;
    let v = from_file.map(|g| g.potential).unwrap_or_else(LaurentPotential::zero);
    Ok((t0, s, v))
}

pub fn gap(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let (t0, s, v) = gap_parameters(cfg)?;
    let ns = cfg.require_n_list()?;
    let prec = cfg.precision_bits;
    if let Some(beta) = cfg.beta {
        if !v.is_zero() {
            return Err(CliError::Usage("--beta evaluates circular ensembles and takes V = 0".into()));
        }
        let mut t = Table::new(&["beta", "N", "t0", "s", "log_exact", "route", "log_exact_display"]);
        for &big_n in ns {
            let val: Float = cbe_generating(beta, big_n, t0, s, prec)?;
            let lg = val.ln();
            let display = format!("{:.12e}", lg.to_f64());
            t.push(vec![beta.into(), big_n.into(), t0.into(), s.into(), mp::to_decimal(&lg).into(), "TH".into(), display.into()]);
        }
        return Ok(Outcome::ok(t));
    }
    let mut t = Table::new(&["label", "n", "t0", "s", "log_exact", "route", "log_exact_display"]);
    for label in cfg.labels() {
        for &n in ns {
            let e = gap_generating(label, n, t0, s, &v, prec)?;
            let (cell, f) = log_cells(&e.log_value);
            t.push(vec![
                label.code().into(),
                n.into(),
                t0.into(),
                s.into(),
                cell,
                e.route.to_string().into(),
                format!("{f:.12e}").into(),
            ]);
        }
    }
    Ok(Outcome::ok(t))
}

pub fn occupancy(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let t0 = cfg.t0.ok_or_else(|| CliError::Usage("--t0 is required".into()))?;
    let mut t = Table::new(&["label", "n", "t0", "m", "probability"]);
    for label in cfg.labels() {
        for &n in cfg.require_n_list()? {
            let probs = occupancy_distribution(label, n, t0, cfg.precision_bits)?;
            for (m, p) in probs.into_iter().enumerate() {
                t.push(vec![label.code().into(), n.into(), t0.into(), m.into(), p.into()]);
            }
        }
    }
    Ok(Outcome::ok(t))
}

pub fn mc(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let t0 = cfg.t0.unwrap_or(PI / 2.0);
    let mut t = Table::new(&["label", "n", "seed", "max_angle_dev", "sup_count_dev", "gap_indicator"]);
    for label in cfg.labels() {
        for &n in cfg.require_n_list()? {
            for row in sample_summaries(label, n, t0, cfg.samples, cfg.seed)? {
                t.push(vec![
                    label.code().into(),
                    n.into(),
                    cfg.seed.into(),
                    row.max_angle_dev.into(),
                    row.sup_count_dev.into(),
                    u32::from(row.gap_indicator).into(),
                ]);
            }
        }
    }
    Ok(Outcome::ok(t))
}

pub fn constants_table(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let prec = cfg.precision_bits;
    let c = constants(prec);
    let mut t = Table::new(&["name", "value", "display", "note"]);
    let mut add = |name: &str, x: Float, note: &str| {
        let display = format!("{:.15e}", x.to_f64());
        t.push(vec![name.into(), mp::to_decimal(&x).into(), display.into(), note.into()]);
    };
    add("zeta_prime_minus_1", c.zeta_prime_m1.clone(), "zeta'(-1) = 1/12 - log A; Euler-Maclaurin evaluation of zeta'(2)");
    add("log_glaisher", c.log_glaisher.clone(), "log A = (gamma + log 2pi)/12 - zeta'(2)/(2 pi^2)");
    add("glaisher", c.log_glaisher.clone().exp(), "Glaisher-Kinkelin constant A");
    let g = |x: f64| -> Result<Float, CliError> { Ok(log_barnes_g_mp(&mp::fl(prec, x))?.exp()) };
    add("barnes_g(1/2)", g(0.5)?, "G(1/2) = 2^(1/24) e^(3 zeta'(-1)/2) pi^(-1/4)");
    add("barnes_g(3/2)", g(1.5)?, "G(3/2) = Gamma(1/2) G(1/2)");
    add("barnes_g(4)", g(4.0)?, "G(n+1) = 0! 1! ... (n-1)!; G(4) = 2");
    add("barnes_g(5)", g(5.0)?, "G(5) = 12");
    let abs2 = log_abs2_barnes_g_mp(&mp::fl(prec, 0.0), &mp::fl(prec, 0.5))?.exp();
    add("abs2_barnes_g(1+i/2)", abs2, "|G(1+iy)|^2 at y = 1/2; enters the thinned-gap constants");
    Ok(Outcome::ok(t))
}
