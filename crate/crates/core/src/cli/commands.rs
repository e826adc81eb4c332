use std::collections::HashMap;
use std::fs;
use std::path::Path;

use super::{
    CliError, Command, DecodeArgs, DiagnoseArgs, EncodeArgs, Outcome, QuantitiesArgs, Quantity, RunConfig,
    SweepArgs, Theorem, VerifyArgs, SCHEMA_VERSION,
};
use crate::budget::Budget;
use crate::codes::{
    build_sw_code, certify, decode_stream, encode_stream, seed_averaged_error, sw_exact_error, Bitstring,
    CodeError, CodecDescription, DecodeOutcome, EpsilonProfile, SWBinCode,
};
use crate::dist::io::{load_pmf, load_source};
use crate::dist::{JointPmf, MixtureSpec};
use crate::entropy::{he_bruteforce, hhe, ohs_eps, the_bruteforce, the_fractional};
use crate::oracle::{theorem1_report, theorem2_report};
use crate::sources::{
    encoder_sideinfo_diagnostic, mixture_sweep, ohs_sweep, rcom_report, rcom_sweep, spectrum_quantiles,
    spectrum_sweep, McConfig, SweepResult,
};

pub(super) fn dispatch(config: &RunConfig) -> Result<Outcome, CliError> {
    let budget = Budget::from_env();
    match &config.command {
        Command::Quantities(a) => quantities(a, &budget),
        Command::Encode(a) => encode(a, config.seed),
        Command::Decode(a) => decode(a),
        Command::Verify(a) => verify(a, config.seed, &budget),
        Command::Sweep(a) => sweep(a, config.seed, &budget),
        Command::Diagnose(a) => diagnose(a, &budget),
    }
}

struct Table {
    writer: csv::Writer<Vec<u8>>,
}

impl Table {
    fn new(header: &[&str]) -> Result<Self, CliError> {
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer.write_record(std::iter::once("schema_version").chain(header.iter().copied()))?;
        Ok(Table { writer })
    }

    fn row(&mut self, fields: Vec<String>) -> Result<(), CliError> {
        self.writer
            .write_record(std::iter::once(SCHEMA_VERSION.to_string()).chain(fields))?;
        Ok(())
    }

    fn finish(self, passed: bool) -> Result<Outcome, CliError> {
        let bytes = self.writer.into_inner().map_err(|e| CliError::input(e.to_string()))?;
        Ok(Outcome {
            csv: String::from_utf8(bytes).expect("CSV of UTF-8 fields"),
            passed,
        })
    }
}

fn f(v: f64) -> String {
    // `+ 0.0` turns -0 into 0
    format!("{}", v + 0.0)
}

fn check_eps_list(eps: &[f64]) -> Result<(), CliError> {
    match eps.iter().find(|e| !(0.0..=1.0).contains(*e)) {
        Some(e) => Err(CliError::input(format!("epsilon {e} is outside [0, 1]"))),
        None => Ok(()),
    }
}

fn read_lines(path: &Path) -> Result<Vec<String>, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    Ok(text.lines().map(str::trim).filter(|l| !l.is_empty()).map(String::from).collect())
}

fn single(spec: MixtureSpec, what: &str) -> Result<JointPmf, CliError> {
    match spec.components() {
        [(_, pmf)] => Ok(pmf.clone()),
        _ => Err(CliError::input(format!("{what} needs a single pmf, not a mixture"))),
    }
}

fn quantities(a: &QuantitiesArgs, budget: &Budget) -> Result<Outcome, CliError> {
    check_eps_list(&a.eps)?;
    let pmf = load_pmf(&a.input)?;
    let mut t = Table::new(&["quantity", "epsilon", "value", "witness"])?;
    for &eps in &a.eps {
        let (he, he_set) = he_bruteforce(&pmf, eps, budget)?;
        let (the, the_set) = the_bruteforce(&pmf, eps, budget)?;
        let (hh, ranking) = hhe(&pmf, eps);
        let rows = [
            ("he", he, he_set.describe(&pmf)),
            ("the", the, the_set.describe(&pmf)),
            ("the_fractional", the_fractional(&pmf, eps), String::new()),
            ("hhe", hh, format!("i*={}", ranking.i_star)),
            ("ohs", ohs_eps(&pmf, eps), String::new()),
            ("conditional_entropy", pmf.conditional_entropy(), String::new()),
        ];
        for (name, value, witness) in rows {
            t.row(vec![name.into(), f(eps), f(value), witness])?;
        }
    }
    t.finish(true)
}

fn parse_budget(pmf: &JointPmf, spec: &str) -> Result<EpsilonProfile, CliError> {
    if let Some(v) = spec.strip_prefix("uniform:") {
        let eps: f64 = v
            .parse()
            .map_err(|_| CliError::input(format!("cannot parse ε in {spec:?}")))?;
        return Ok(EpsilonProfile::uniform(pmf, eps)?);
    }
    let text = fs::read_to_string(spec).map_err(|e| CliError::input(format!("{spec}: {e}")))?;
    let map: HashMap<String, f64> =
        serde_json::from_str(&text).map_err(|e| CliError::input(format!("{spec}: {e}")))?;
    let per_symbol = pmf
        .x_labels()
        .iter()
        .map(|l| {
            map.get(l)
                .copied()
                .ok_or_else(|| CliError::input(format!("budget file has no entry for x = {l:?}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(EpsilonProfile::new(pmf, per_symbol)?)
}

/// Result of pushing a symbol stream through the codec and back.
#[derive(Clone, Debug, PartialEq)]
pub struct RoundTripReport {
    pub symbols: usize,
    pub total_bits: usize,
    /// Per-symbol decoder outcome and bits consumed.
    pub outcomes: Vec<(DecodeOutcome, usize)>,
    pub decoded_correctly: usize,
}

/// Encodes `xs`, concatenates the codewords, and decodes the stream with
/// `ys`. The two streams must have equal length.
pub fn encode_decode_roundtrip(
    pmf: &JointPmf,
    code: &SWBinCode,
    xs: &[String],
    ys: &[String],
) -> Result<(Bitstring, RoundTripReport), CliError> {
    if xs.len() != ys.len() {
        return Err(CodeError::StreamLengthMismatch { x: xs.len(), y: ys.len() }.into());
    }
    let xi = xs.iter().map(|s| pmf.x_index(s)).collect::<Result<Vec<_>, _>>()?;
    let yi = ys.iter().map(|s| pmf.y_index(s)).collect::<Result<Vec<_>, _>>()?;
    let bits = encode_stream(code, &xi);
    let outcomes = decode_stream(code, pmf, &bits, &yi)?;
    let decoded_correctly = outcomes
        .iter()
        .zip(&xi)
        .filter(|(o, &x)| o.0 == DecodeOutcome::Decoded(x))
        .count();
    let report = RoundTripReport {
        symbols: xs.len(),
        total_bits: bits.len(),
        outcomes,
        decoded_correctly,
    };
    Ok((bits, report))
}

fn encode(a: &EncodeArgs, seed: u64) -> Result<Outcome, CliError> {
    let pmf = load_pmf(&a.input)?;
    let profile = parse_budget(&pmf, &a.eps_budget)?;
    let code = build_sw_code(&pmf, &profile, a.delta, seed)?;
    let xs = read_lines(&a.symbols)?;
    let (bits, decoded) = match &a.side_info {
        Some(path) => {
            let ys = read_lines(path)?;
            let (bits, report) = encode_decode_roundtrip(&pmf, &code, &xs, &ys)?;
            (bits, Some(report.decoded_correctly))
        }
        None => {
            let xi = xs.iter().map(|s| pmf.x_index(s)).collect::<Result<Vec<_>, _>>()?;
            (encode_stream(&code, &xi), None)
        }
    };
    fs::write(&a.bits, bits.to_framed_bytes())?;
    let desc = serde_json::to_string_pretty(&code.description(&pmf)).expect("serialisable");
    fs::write(&a.codec, desc + "\n")?;
    let mut t = Table::new(&["seed", "delta", "symbols", "total_bits", "decoded", "failures"])?;
    t.row(vec![
        seed.to_string(),
        f(a.delta),
        xs.len().to_string(),
        bits.len().to_string(),
        decoded.map_or_else(String::new, |d| d.to_string()),
        decoded.map_or_else(String::new, |d| (xs.len() - d).to_string()),
    ])?;
    t.finish(true)
}

fn decode(a: &DecodeArgs) -> Result<Outcome, CliError> {
    let pmf = load_pmf(&a.input)?;
    let text = fs::read_to_string(&a.codec).map_err(|e| CliError::input(format!("{}: {e}", a.codec.display())))?;
    let desc: CodecDescription =
        serde_json::from_str(&text).map_err(|e| CliError::input(format!("{}: {e}", a.codec.display())))?;
    let code = SWBinCode::from_description(&pmf, &desc)?;
    let bytes = fs::read(&a.bits).map_err(|e| CliError::input(format!("{}: {e}", a.bits.display())))?;
    let bits = Bitstring::from_framed_bytes(&bytes)?;
    let ys = read_lines(&a.side_info)?;
    let yi = ys.iter().map(|s| pmf.y_index(s)).collect::<Result<Vec<_>, _>>()?;
    let outcomes = decode_stream(&code, &pmf, &bits, &yi)?;
    let mut t = Table::new(&["index", "side_info", "decoded", "outcome", "bits"])?;
    for (i, ((outcome, used), y)) in outcomes.iter().zip(&ys).enumerate() {
        let (decoded, label) = match outcome {
            DecodeOutcome::Decoded(x) => (pmf.x_labels()[*x].clone(), "decoded"),
            DecodeOutcome::NoCandidate => (String::new(), "no_candidate"),
            DecodeOutcome::Ambiguous(_) => (String::new(), "ambiguous"),
        };
        t.row(vec![i.to_string(), y.clone(), decoded, label.into(), used.to_string()])?;
    }
    t.finish(true)
}

fn verify(a: &VerifyArgs, seed: u64, budget: &Budget) -> Result<Outcome, CliError> {
    check_eps_list(&a.eps)?;
    let pmf = load_pmf(&a.input)?;
    let mut all = true;
    match a.theorem {
        Theorem::One | Theorem::Two => {
            let name = if a.theorem == Theorem::One { "1" } else { "2" };
            let mut t = Table::new(&[
                "theorem",
                "epsilon",
                "he",
                "the",
                "the_fractional",
                "hhe",
                "optimum",
                "flag_avg_len",
                "flag_error",
                "pass",
            ])?;
            for &eps in &a.eps {
                let r2 = theorem2_report(&pmf, eps, budget)?;
                let (opt, flag_len, flag_err, pass) = if a.theorem == Theorem::One {
                    let r1 = theorem1_report(&pmf, eps, budget)?;
                    let pass = r1.check().is_ok();
                    (f(r1.optimum), f(r1.flag_eval.avg_len), f(r1.flag_eval.error), pass)
                } else {
                    (String::new(), String::new(), String::new(), r2.check().is_ok())
                };
                all &= pass;
                t.row(vec![
                    name.into(),
                    f(eps),
                    f(r2.he),
                    f(r2.the),
                    f(r2.the_fractional),
                    f(r2.hhe),
                    opt,
                    flag_len,
                    flag_err,
                    pass.to_string(),
                ])?;
            }
            t.finish(all)
        }
        Theorem::Three => {
            let mut t = Table::new(&[
                "theorem",
                "epsilon",
                "delta",
                "seed",
                "seeds",
                "max_length_excess",
                "avg_error",
                "stderr",
                "error_bound",
                "pass",
            ])?;
            for &eps in &a.eps {
                let profile = EpsilonProfile::uniform(&pmf, eps)?;
                let code = build_sw_code(&pmf, &profile, a.delta, seed)?;
                let excess = (0..pmf.nx())
                    .map(|x| code.codeword_len(x) as f64 - code.length_bound(x))
                    .fold(f64::NEG_INFINITY, f64::max);
                let avg = seed_averaged_error(&code, &pmf, a.seeds.max(2), seed);
                let bound = profile.aggregate() + 2f64.powf(-a.delta / 2.0);
                let pass = excess <= 0.0 && avg.mean <= bound + 3.0 * avg.stderr;
                all &= pass;
                t.row(vec![
                    "3".into(),
                    f(eps),
                    f(a.delta),
                    seed.to_string(),
                    avg.seeds.to_string(),
                    f(excess),
                    f(avg.mean),
                    f(avg.stderr),
                    f(bound),
                    pass.to_string(),
                ])?;
            }
            t.finish(all)
        }
        Theorem::Four | Theorem::Lemma5 => {
            let name = if a.theorem == Theorem::Four { "4" } else { "lemma5" };
            let mut t = Table::new(&[
                "theorem",
                "epsilon",
                "delta",
                "seed",
                "aggregate",
                "error",
                "tail",
                "min_length_margin",
                "pass",
            ])?;
            for &eps in &a.eps {
                let profile = EpsilonProfile::uniform(&pmf, eps)?;
                let code = build_sw_code(&pmf, &profile, a.delta, seed)?;
                let lengths: Vec<f64> = (0..pmf.nx()).map(|x| code.codeword_len(x) as f64).collect();
                let error = sw_exact_error(&pmf, &code);
                let cert = certify(&pmf, &lengths, a.delta, error)?;
                let margin = (0..pmf.nx())
                    .map(|x| cert.lengths[x] - (cert.ohe[x] - a.delta))
                    .fold(f64::INFINITY, f64::min);
                let pass = if a.theorem == Theorem::Four {
                    cert.check().is_ok()
                } else {
                    error + crate::TOL >= cert.tail - 2f64.powf(-a.delta)
                };
                all &= pass;
                t.row(vec![
                    name.into(),
                    f(eps),
                    f(a.delta),
                    seed.to_string(),
                    f(cert.profile.aggregate()),
                    f(error),
                    f(cert.tail),
                    f(margin),
                    pass.to_string(),
                ])?;
            }
            t.finish(all)
        }
        Theorem::Rcom => {
            let spec = MixtureSpec::single(pmf);
            let mut t = Table::new(&[
                "theorem",
                "epsilon",
                "n",
                "value",
                "q_lo",
                "q_hi",
                "lower",
                "slack",
                "slack_form_holds",
                "pass",
            ])?;
            for &eps in &a.eps {
                let r = rcom_report(&spec, eps, a.n, budget)?;
                all &= r.holds();
                t.row(vec![
                    "rcom".into(),
                    f(eps),
                    a.n.to_string(),
                    f(r.value),
                    f(r.q_lo),
                    f(r.q_hi),
                    f(r.lower()),
                    f(r.slack),
                    r.slack_form_holds().to_string(),
                    r.holds().to_string(),
                ])?;
            }
            t.finish(all)
        }
    }
}

fn sweep_row(t: &mut Table, r: &SweepResult, stderr: String, seed: u64) -> Result<(), CliError> {
    t.row(vec![
        r.quantity.clone(),
        r.n.to_string(),
        f(r.value),
        f(r.prediction),
        f(r.gap),
        stderr,
        r.method.as_str().into(),
        seed.to_string(),
    ])
}

fn sweep(a: &SweepArgs, seed: u64, budget: &Budget) -> Result<Outcome, CliError> {
    if !(0.0..=1.0).contains(&a.eps) {
        return Err(CliError::input(format!("epsilon {} is outside [0, 1]", a.eps)));
    }
    let spec = load_source(&a.input)?;
    let mc = McConfig {
        samples: a.samples.unwrap_or(McConfig::default().samples),
        seed,
    };
    let mut t = Table::new(&[
        "quantity",
        "n",
        "value",
        "prediction",
        "gap",
        "stderr",
        "method",
        "seed",
    ])?;
    let rows = match a.quantity {
        Quantity::Rcom => rcom_sweep(&single(spec, "rcom sweep")?, a.eps, a.n_max, budget)?,
        Quantity::Ohs => ohs_sweep(&single(spec, "ohs sweep")?, a.eps, a.n_max, budget, &mc)?,
        Quantity::Mixture => mixture_sweep(&spec, a.eps, a.n_max, budget, &mc)?,
        Quantity::Spectrum => match a.samples {
            None => spectrum_sweep(&spec, a.eps, a.n_max, budget)?,
            Some(samples) => {
                let exact = spectrum_sweep(&spec, a.eps, 1, &Budget::default())?;
                let (lo_pred, hi_pred) = (exact[0].prediction, exact[1].prediction);
                for n in 1..=a.n_max {
                    let e = spectrum_quantiles(&spec, n, a.eps, samples, seed)?;
                    for (name, v, p) in [("spectrum_lo", e.quantile_lo, lo_pred), ("spectrum_hi", e.quantile_hi, hi_pred)] {
                        let r = SweepResult {
                            quantity: name.into(),
                            n,
                            value: v,
                            prediction: p,
                            gap: v - p,
                            stderr: 0.0,
                            method: crate::sources::Method::MonteCarlo,
                        };
                        sweep_row(&mut t, &r, String::new(), seed)?;
                    }
                }
                return t.finish(true);
            }
        },
    };
    for r in &rows {
        sweep_row(&mut t, r, f(r.stderr), seed)?;
    }
    t.finish(true)
}

fn diagnose(a: &DiagnoseArgs, budget: &Budget) -> Result<Outcome, CliError> {
    let spec = load_source(&a.input)?;
    let seq = match &a.eps_seq {
        Some(path) => Some(
            read_lines(path)?
                .iter()
                .map(|l| l.parse::<f64>().map_err(|_| CliError::input(format!("bad ε value {l:?}"))))
                .collect::<Result<Vec<_>, _>>()?,
        ),
        None => None,
    };
    let report = encoder_sideinfo_diagnostic(&spec, seq.as_deref(), a.n_max, a.gamma, budget)?;
    let mut t = Table::new(&[
        "n",
        "eps_n",
        "entropy_rate",
        "ohs_rate",
        "d_n",
        "gamma",
        "tail_rate",
        "bracket_holds",
        "trend_ok",
    ])?;
    let mut all = true;
    for r in &report.rows {
        all &= r.bracket.holds();
        t.row(vec![
            r.n.to_string(),
            f(r.eps_n),
            f(r.bracket.entropy_rate),
            f(r.bracket.ohs_rate),
            f(r.d_n),
            f(a.gamma),
            f(r.bracket.tail_rate),
            r.bracket.holds().to_string(),
            (r.d_n >= -a.gamma).to_string(),
        ])?;
    }
    t.finish(all)
}
