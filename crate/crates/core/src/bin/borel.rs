//! Command-line front end: evaluate the Borel cocycle on flag 4-tuples,
//! estimate Borel invariants of cocycle documents, recover trivializations,
//! and run the property self-test suite.

use std::f64::consts::PI;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use borel_core::cocycle::{BoundaryMap, Cocycle, TwistMap};
use borel_core::doc::{
    estimator_report_json, parse_eval_input, parse_experiment, trivialization_json,
    LoadedExperiment,
};
use borel_core::error::{Error, Result};
use borel_core::invariant::{
    empirical_borel_ratio, normalized_integrands, parabolic_bound, representation_borel_ratio,
    EstimatorParams, Partition,
};
use borel_core::projflag::{
    block_flag, sym_power, veronese, CompleteFlag, GroupElement, ProjPoint,
};
use borel_core::rigidity::{maximality_certificate, trivialize, Branch, TrivializeParams};
use borel_core::{bloch_wigner, borel_bound, borel_from_complete, ideal_volume, is_maximal, nu3};

const BUNDLED: &[(&str, &str)] = &[
    ("fig8_pi2", include_str!("../../data/fig8_pi2.json")),
    ("fig8_pi3", include_str!("../../data/fig8_pi3.json")),
    ("fig8_pi4", include_str!("../../data/fig8_pi4.json")),
    (
        "fig8_twisted_pi3",
        include_str!("../../data/fig8_twisted_pi3.json"),
    ),
    ("fig8_diag", include_str!("../../data/fig8_diag.json")),
    ("fig8_block21", include_str!("../../data/fig8_block21.json")),
    (
        "fig8_corrupted_table",
        include_str!("../../data/fig8_corrupted_table.json"),
    ),
];

#[derive(Parser)]
#[command(
    name = "borel",
    version,
    about = "Borel invariants of measurable PSL(n,C)-cocycles"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate B_n on four complete flags (or four boundary points)
    EvalBorel {
        /// Input JSON: {"n": …, "flags": [4 matrices]} or {"n": …, "points": [4 points]};
        /// a file path, a bundled document name, or '-' for stdin
        #[arg(long)]
        input: String,
        /// Expected dimension (validated against the input)
        #[arg(long)]
        n: Option<usize>,
        /// Maximality tolerance
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// Estimate the Borel invariant of an experiment document
    Invariant {
        /// Experiment document: file path, bundled name, or '-' for stdin
        #[arg(long)]
        input: String,
        /// Expected dimension (validated against the document)
        #[arg(long)]
        n: Option<usize>,
        /// Sample count (overrides the document's estimator block)
        #[arg(long)]
        samples: Option<usize>,
        /// RNG seed (overrides the document's estimator block)
        #[arg(long)]
        seed: Option<u64>,
        /// Maximality tolerance
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        /// Worker threads
        #[arg(long, default_value_t = 1)]
        workers: usize,
        /// Write the report as JSON to this path
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Recover the measurable trivialization of a maximal cocycle document
    Trivialize {
        /// Experiment document: file path, bundled name, or '-' for stdin
        #[arg(long)]
        input: String,
        /// Expected dimension (validated against the document)
        #[arg(long)]
        n: Option<usize>,
        /// Alignment samples per slice
        #[arg(long)]
        samples: Option<usize>,
        /// RNG seed
        #[arg(long)]
        seed: Option<u64>,
        /// Verification tolerance (alignment runs at tol/10, certificate at 10·tol)
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        /// Worker threads for slice alignment
        #[arg(long, default_value_t = 1)]
        workers: usize,
        /// Write the recovered f table as JSON to this path
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run the property suite and print a pass/fail table
    Selftest {
        /// Largest dimension exercised by the dimension-indexed rows
        #[arg(long, default_value_t = 3)]
        n: usize,
        /// Trials per property row
        #[arg(long, default_value_t = 50)]
        samples: usize,
        /// RNG seed
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    if let Err(e) = run(cli.cmd) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}

fn run(cmd: Cmd) -> Result<()> {
    match cmd {
        Cmd::EvalBorel { input, n, tol } => cmd_eval_borel(&input, n, tol),
        Cmd::Invariant {
            input,
            n,
            samples,
            seed,
            tol,
            workers,
            output,
        } => cmd_invariant(&input, n, samples, seed, tol, workers, output.as_deref()),
        Cmd::Trivialize {
            input,
            n,
            samples,
            seed,
            tol,
            workers,
            output,
        } => cmd_trivialize(&input, n, samples, seed, tol, workers, output.as_deref()),
        Cmd::Selftest { n, samples, seed } => cmd_selftest(n, samples, seed),
    }
}

/// Resolve --input: bundled name, '-' for stdin, else a file path.
fn read_input(input: &str) -> Result<String> {
    if let Some((_, text)) = BUNDLED.iter().find(|(name, _)| *name == input) {
        return Ok((*text).to_string());
    }
    if input == "-" {
        let mut buf = String::new();
        std::io::Read::read_to_string(&mut std::io::stdin(), &mut buf)
            .map_err(|e| Error::InvalidInput(format!("cannot read stdin: {e}")))?;
        return Ok(buf);
    }
    std::fs::read_to_string(input).map_err(|e| {
        let names: Vec<&str> = BUNDLED.iter().map(|(n, _)| *n).collect();
        Error::InvalidInput(format!(
            "cannot read {input:?}: {e} (bundled documents: {})",
            names.join(", ")
        ))
    })
}

/// Format with 12 significant digits.
fn sig12(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return format!("{v}");
    }
    let mag = v.abs().log10().floor() as i64;
    if !(-5..=15).contains(&mag) {
        return format!("{v:.11e}");
    }
    let prec = (11 - mag).clamp(0, 17) as usize;
    format!("{v:.prec$}")
}

fn comb3(n: usize) -> f64 {
    ((n + 1) * n * (n.saturating_sub(1))) as f64 / 6.0
}

fn cmd_eval_borel(input: &str, n_flag: Option<usize>, tol: f64) -> Result<()> {
    let text = read_input(input)?;
    let (n, flags) = parse_eval_input(&text)?;
    if let Some(nf) = n_flag {
        if nf != n {
            return Err(Error::InvalidInput(format!(
                "--n {nf} conflicts with input dimension n = {n}"
            )));
        }
    }
    let value = borel_from_complete(&flags)?;
    let bound = borel_bound(n);
    let sign = is_maximal(&flags, tol)?;
    println!("n          = {n}");
    println!("B_n        = {}", sig12(value));
    println!("B_n / nu3  = {}", sig12(value / nu3()));
    println!(
        "bound      = {}  (C(n+1,3)·nu3, C = {})",
        sig12(bound),
        sig12(comb3(n))
    );
    let verdict = match sign {
        1 => "MAXIMAL(+)",
        -1 => "MAXIMAL(-)",
        _ => "NOT MAXIMAL",
    };
    println!("verdict    = {verdict}");
    Ok(())
}

fn load_for_run(input: &str, n_flag: Option<usize>) -> Result<(LoadedExperiment, BoundaryMap)> {
    let exp = parse_experiment(&read_input(input)?)?;
    if let Some(nf) = n_flag {
        if nf != exp.n {
            return Err(Error::InvalidInput(format!(
                "--n {nf} conflicts with document n = {} (bundled documents exist per n)",
                exp.n
            )));
        }
    }
    let boundary = exp.boundary.clone().ok_or_else(|| {
        Error::InvalidInput("document has no boundary_map; this command needs one".into())
    })?;
    Ok((exp, boundary))
}

#[allow(clippy::too_many_arguments)]
fn cmd_invariant(
    input: &str,
    n_flag: Option<usize>,
    samples: Option<usize>,
    seed: Option<u64>,
    tol: f64,
    workers: usize,
    output: Option<&std::path::Path>,
) -> Result<()> {
    let (exp, boundary) = load_for_run(input, n_flag)?;
    let mut params = EstimatorParams::default();
    params.samples = samples.or(exp.samples).unwrap_or(params.samples);
    params.seed = seed.or(exp.seed).unwrap_or(params.seed);
    params.workers = workers;
    params.tol = tol;
    let report = empirical_borel_ratio(&exp.cocycle, &boundary, &params)?;

    println!("n             = {}", report.n);
    println!("|X|           = {}", exp.space.len());
    println!(
        "samples       = {}   seed = {}   workers = {}",
        report.samples, report.seed, report.workers
    );
    println!(
        "equivariance  = {}  (refusal threshold 1e-6)",
        sig12(report.equivariance_residual)
    );
    println!("lambda_hat    = {}", sig12(report.lambda_hat));
    println!("std_error     = {}", sig12(report.std_error));
    println!(
        "integrand     in [{}, {}]  (max deviation {})",
        sig12(report.integrand_min),
        sig12(report.integrand_max),
        sig12(report.max_deviation)
    );
    println!("bound C(n+1,3)= {}", sig12(report.bound));
    println!(
        "verdict       = {}",
        if report.maximal_verdict {
            "MAXIMAL"
        } else {
            "NOT MAXIMAL"
        }
    );
    if report.heuristic {
        println!(
            "note          : boundary map is not closed-form; lambda_hat is a heuristic estimate"
        );
    }
    match exp.vol_m {
        Some(v) => {
            println!(
                "Vol(M)        = {}  (recomputed, nu3 = {})",
                sig12(v),
                sig12(nu3())
            );
            println!(
                "beta_hat      = {}  (= lambda_hat · Vol(M))",
                sig12(report.lambda_hat * v)
            );
        }
        None => println!("Vol(M)        : not provided; beta_hat omitted"),
    }
    if let Some(path) = output {
        let json = serde_json::to_string_pretty(&estimator_report_json(&report, exp.vol_m))
            .expect("report serializes");
        std::fs::write(path, json + "\n")
            .map_err(|e| Error::InvalidInput(format!("cannot write {}: {e}", path.display())))?;
        println!("report written to {}", path.display());
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_trivialize(
    input: &str,
    n_flag: Option<usize>,
    samples: Option<usize>,
    seed: Option<u64>,
    tol: f64,
    workers: usize,
    output: Option<&std::path::Path>,
) -> Result<()> {
    let (exp, boundary) = load_for_run(input, n_flag)?;
    let mut params = TrivializeParams::default();
    params.samples_per_slice = samples.unwrap_or(params.samples_per_slice.max(2 * exp.n * exp.n));
    params.seed = seed.or(exp.seed).unwrap_or(params.seed);
    params.tol = tol;
    params.workers = workers;
    let t = trivialize(&exp.cocycle, &boundary, &params)?;

    println!(
        "branch        = {}",
        match t.branch {
            Branch::Plain => "plain",
            Branch::Conjugated => "conjugated",
        }
    );
    println!("slices:");
    for s in &t.slices {
        println!(
            "  {:<6} alignment residual = {}   sv gap = {}",
            exp.space.point_name(s.x),
            sig12(s.residual),
            sig12(s.sv_gap)
        );
    }
    println!(
        "closing identity residual = {}  (tolerance {})",
        sig12(t.residual),
        sig12(tol)
    );
    let gens = exp.presentation.generator_names().to_vec();
    if let Some(path) = output {
        let json = serde_json::to_string_pretty(&trivialization_json(&t, &exp.space, &gens))
            .expect("trivialization serializes");
        std::fs::write(path, json + "\n")
            .map_err(|e| Error::InvalidInput(format!("cannot write {}: {e}", path.display())))?;
        println!("f table written to {}", path.display());
    } else {
        println!("recovered f:");
        for x in 0..t.f.len() {
            println!("  {}:", exp.space.point_name(x));
            let m = t.f.get(x).matrix();
            for i in 0..m.nrows() {
                let row: Vec<String> = (0..m.ncols())
                    .map(|j| format!("{:+.12}{:+.12}i", m[(i, j)].re, m[(i, j)].im))
                    .collect();
                println!("    [{}]", row.join(", "));
            }
        }
    }
    Ok(())
}

struct Row {
    label: &'static str,
    tag: &'static str,
    outcome: std::result::Result<String, String>,
}

fn all_permutations4() -> Vec<([usize; 4], f64)> {
    let mut out = Vec::with_capacity(24);
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let p = [a, b, c, d];
                    if a != b && a != c && a != d && b != c && b != d && c != d {
                        let mut inv = 0;
                        for i in 0..4 {
                            for j in (i + 1)..4 {
                                if p[i] > p[j] {
                                    inv += 1;
                                }
                            }
                        }
                        out.push((p, if inv % 2 == 0 { 1.0 } else { -1.0 }));
                    }
                }
            }
        }
    }
    out
}

fn random_tuple<R: rand::Rng>(rng: &mut R) -> [ProjPoint; 4] {
    loop {
        let pts = [
            ProjPoint::random_fubini_study(rng),
            ProjPoint::random_fubini_study(rng),
            ProjPoint::random_fubini_study(rng),
            ProjPoint::random_fubini_study(rng),
        ];
        let mut ok = true;
        for i in 0..4 {
            for j in (i + 1)..4 {
                ok &= pts[i].chordal_distance(&pts[j]) > 1e-6;
            }
        }
        if ok {
            return pts;
        }
    }
}

fn bundled_doc(name: &str) -> LoadedExperiment {
    let text = BUNDLED
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, t)| *t)
        .expect("bundled name");
    parse_experiment(text).expect("bundled documents are valid")
}

fn cmd_selftest(n_max: usize, trials: usize, seed: u64) -> Result<()> {
    if n_max < 2 || trials == 0 {
        return Err(Error::InvalidInput(
            "selftest needs --n >= 2 and --samples >= 1".into(),
        ));
    }
    let mut rows: Vec<Row> = Vec::new();

    // Row 1: dilogarithm constants and conventions.
    rows.push(Row {
        label: "bloch_wigner constants and conventions",
        tag: "acceptance 1",
        outcome: (|| {
            // Independently computed (50-digit series oracle): D(e^{i pi/3}).
            let frozen = 1.014_941_606_409_653_6_f64;
            let d =
                bloch_wigner(Complex64::from_polar(1.0, PI / 3.0)).map_err(|e| e.to_string())?;
            if (d - frozen).abs() > 1e-12 {
                return Err(format!(
                    "D(e^(i pi/3)) = {} vs oracle {}",
                    sig12(d),
                    sig12(frozen)
                ));
            }
            let base = ProjPoint::regular_tetrahedron();
            let vol = ideal_volume(&base[0], &base[1], &base[2], &base[3]);
            if (vol - d).abs() > 1e-13 {
                return Err(format!(
                    "ideal_volume convention: {} vs {}",
                    sig12(vol),
                    sig12(d)
                ));
            }
            let mut worst = 0.0f64;
            for t in [0.37, 2.0, -1.5, 0.99] {
                let v = bloch_wigner(Complex64::new(t, 0.0)).map_err(|e| e.to_string())?;
                worst = worst.max(v.abs());
            }
            for z in [Complex64::new(0.3, 0.8), Complex64::new(-2.0, 1.0)] {
                let a = bloch_wigner(z.conj()).map_err(|e| e.to_string())?;
                let b = bloch_wigner(z).map_err(|e| e.to_string())?;
                worst = worst.max((a + b).abs());
            }
            if worst > 1e-13 {
                return Err(format!("real-line/antisymmetry residual {worst:.3e}"));
            }
            Ok(format!("nu3 = {}, conventions hold", sig12(nu3())))
        })(),
    });

    // Row 2: pullback identity B_n(V_n(xi)) = C(n+1,3) vol(xi).
    rows.push(Row {
        label: "pullback identity over random tuples",
        tag: "acceptance 2",
        outcome: (|| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut worst = 0.0f64;
            for n in 2..=n_max {
                for _ in 0..trials {
                    let pts = random_tuple(&mut rng);
                    let flags = [
                        veronese(&pts[0], n),
                        veronese(&pts[1], n),
                        veronese(&pts[2], n),
                        veronese(&pts[3], n),
                    ];
                    let b = borel_from_complete(&flags).map_err(|e| e.to_string())?;
                    let vol = ideal_volume(&pts[0], &pts[1], &pts[2], &pts[3]);
                    worst = worst.max((b - comb3(n) * vol).abs());
                }
            }
            if worst > 1e-6 {
                return Err(format!("max |B_n - C vol| = {worst:.3e} > 1e-6"));
            }
            Ok(format!("max |B_n - C·vol| = {worst:.3e} (n = 2..{n_max})"))
        })(),
    });

    // Row 3: cocycle property suite.
    rows.push(Row {
        label: "alternation, invariance, decoration independence, bound",
        tag: "acceptance 3",
        outcome: (|| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xa5a5);
            let perms = all_permutations4();
            let (mut alt, mut inv, mut dec, mut over) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
            for n in 2..=n_max {
                let flags: Vec<CompleteFlag> =
                    (0..4).map(|_| CompleteFlag::random_gaussian(&mut rng, n, 20.0)).collect();
                let flags: [CompleteFlag; 4] = flags.try_into().unwrap();
                let b = borel_from_complete(&flags).map_err(|e| e.to_string())?;
                for (p, sign) in &perms {
                    let permuted = [
                        flags[p[0]].clone(),
                        flags[p[1]].clone(),
                        flags[p[2]].clone(),
                        flags[p[3]].clone(),
                    ];
                    let bp = borel_from_complete(&permuted).map_err(|e| e.to_string())?;
                    alt = alt.max((bp - sign * b).abs());
                }
                let g = GroupElement::random_gaussian(&mut rng, n, 20.0);
                let moved = [
                    flags[0].apply(&g).map_err(|e| e.to_string())?,
                    flags[1].apply(&g).map_err(|e| e.to_string())?,
                    flags[2].apply(&g).map_err(|e| e.to_string())?,
                    flags[3].apply(&g).map_err(|e| e.to_string())?,
                ];
                inv = inv.max((borel_from_complete(&moved).map_err(|e| e.to_string())? - b).abs());
                // Rescale every decoration column by a random nonzero factor.
                let rescaled: Vec<CompleteFlag> = flags
                    .iter()
                    .map(|f| {
                        let mut m = f.basis().clone();
                        for j in 0..m.ncols() {
                            let s = Complex64::from_polar(
                                rand::Rng::gen_range(&mut rng, 0.5..2.0),
                                rand::Rng::gen_range(&mut rng, 0.0..2.0 * PI),
                            );
                            for i in 0..m.nrows() {
                                m[(i, j)] *= s;
                            }
                        }
                        CompleteFlag::new(m).map_err(|e| e.to_string())
                    })
                    .collect::<std::result::Result<_, _>>()?;
                let rescaled: [CompleteFlag; 4] = rescaled.try_into().unwrap();
                dec = dec.max((borel_from_complete(&rescaled).map_err(|e| e.to_string())? - b).abs());
                for _ in 0..trials {
                    let tuple: Vec<CompleteFlag> =
                        (0..4).map(|_| CompleteFlag::random_gaussian(&mut rng, n, 100.0)).collect();
                    let tuple: [CompleteFlag; 4] = tuple.try_into().unwrap();
                    let b = borel_from_complete(&tuple).map_err(|e| e.to_string())?;
                    over = over.max(b.abs() - borel_bound(n));
                }
            }
            if alt > 1e-8 || inv > 1e-7 || dec > 1e-8 || over > 1e-6 {
                return Err(format!(
                    "alternation {alt:.3e}, invariance {inv:.3e}, decoration {dec:.3e}, bound excess {over:.3e}"
                ));
            }
            Ok(format!(
                "alternation {alt:.1e}, invariance {inv:.1e}, decoration {dec:.1e}, bound excess {}",
                if over <= 0.0 { "none".to_string() } else { format!("{over:.1e}") }
            ))
        })(),
    });

    // Row 4: bundled maximal documents.
    rows.push(Row {
        label: "figure-eight documents reach lambda_hat = C(n+1,3)",
        tag: "acceptance 4",
        outcome: (|| {
            let mut detail = Vec::new();
            for name in ["fig8_pi2", "fig8_pi3"] {
                let exp = bundled_doc(name);
                let boundary = exp
                    .boundary
                    .clone()
                    .expect("bundled docs have boundary maps");
                let mut params = EstimatorParams::default();
                params.samples = exp.samples.unwrap_or(params.samples);
                params.seed = exp.seed.unwrap_or(params.seed);
                let r = empirical_borel_ratio(&exp.cocycle, &boundary, &params)
                    .map_err(|e| e.to_string())?;
                let c = comb3(exp.n);
                if (r.lambda_hat - c).abs() > 1e-9 || r.max_deviation > 1e-7 {
                    return Err(format!(
                        "{name}: lambda_hat = {}, max deviation {:.3e}",
                        sig12(r.lambda_hat),
                        r.max_deviation
                    ));
                }
                let vol = exp.vol_m.expect("bundled docs carry vol_m");
                let beta = r.lambda_hat * vol;
                if (beta - c * 2.0 * nu3()).abs() > 1e-9 {
                    return Err(format!("{name}: beta_hat = {} vs C·2nu3", sig12(beta)));
                }
                detail.push(format!("{name}: beta_hat = {}", sig12(beta)));
            }
            Ok(detail.join("; "))
        })(),
    });

    // Row 5: twist neutrality and the representation path.
    rows.push(Row {
        label: "twist invariance pointwise; representation path bitwise",
        tag: "acceptance 5",
        outcome: (|| {
            let exp = bundled_doc("fig8_pi2");
            let boundary = exp.boundary.clone().unwrap();
            let params = EstimatorParams {
                samples: trials.max(20),
                seed,
                ..EstimatorParams::default()
            };
            let base_vals = normalized_integrands(&exp.cocycle, &boundary, &params)
                .map_err(|e| e.to_string())?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x7777);
            let mut worst = 0.0f64;
            for _ in 0..3 {
                let f = TwistMap::random(&mut rng, exp.space.len(), exp.n, 20.0);
                let twisted = exp.cocycle.twist(&f).map_err(|e| e.to_string())?;
                let phi = BoundaryMap::TwistedVeronese {
                    twist: f,
                    conjugate: false,
                };
                let vals =
                    normalized_integrands(&twisted, &phi, &params).map_err(|e| e.to_string())?;
                for (a, b) in base_vals.iter().zip(&vals) {
                    worst = worst.max((a - b).abs());
                }
            }
            if worst > 1e-9 {
                return Err(format!("pointwise twist deviation {worst:.3e} > 1e-9"));
            }
            let rho: Vec<GroupElement> = exp
                .presentation
                .generator_names()
                .iter()
                .map(|g| sym_power(exp.presentation.generator(g).unwrap(), exp.n).unwrap())
                .collect();
            let direct = representation_borel_ratio(exp.presentation.clone(), rho.clone(), &params)
                .map_err(|e| e.to_string())?;
            let via_space =
                Cocycle::from_representation(exp.presentation.clone(), exp.space.clone(), rho)
                    .map_err(|e| e.to_string())?;
            let through =
                empirical_borel_ratio(&via_space, &boundary, &params).map_err(|e| e.to_string())?;
            if direct.lambda_hat.to_bits() != through.lambda_hat.to_bits() {
                return Err(format!(
                    "representation path differs: {} vs {}",
                    sig12(direct.lambda_hat),
                    sig12(through.lambda_hat)
                ));
            }
            Ok(format!(
                "max pointwise twist deviation {worst:.1e}; representation path bitwise equal"
            ))
        })(),
    });

    // Row 6: rigidity round trip.
    rows.push(Row {
        label: "trivialize round trip on a twisted maximal cocycle",
        tag: "acceptance 6",
        outcome: (|| {
            let exp = bundled_doc("fig8_pi2");
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x1234);
            let f0 = TwistMap::random(&mut rng, exp.space.len(), exp.n, 20.0);
            let sigma = exp.cocycle.twist(&f0).map_err(|e| e.to_string())?;
            let phi = BoundaryMap::TwistedVeronese {
                twist: f0,
                conjugate: false,
            };
            let params = TrivializeParams {
                seed,
                ..TrivializeParams::default()
            };
            let t = trivialize(&sigma, &phi, &params).map_err(|e| e.to_string())?;
            if t.branch != Branch::Plain || t.residual > 1e-6 {
                return Err(format!(
                    "branch {:?}, residual {:.3e}",
                    t.branch, t.residual
                ));
            }
            let conj = sigma.conjugated();
            let phi_c = match phi {
                BoundaryMap::TwistedVeronese { twist, .. } => BoundaryMap::TwistedVeronese {
                    twist: twist.conjugated(),
                    conjugate: true,
                },
                _ => unreachable!(),
            };
            let t2 = trivialize(&conj, &phi_c, &params).map_err(|e| e.to_string())?;
            if t2.branch != Branch::Conjugated || t2.residual > 1e-6 {
                return Err(format!(
                    "conjugated branch: {:?}, residual {:.3e}",
                    t2.branch, t2.residual
                ));
            }
            Ok(format!(
                "plain residual {:.1e}; conjugated residual {:.1e}",
                t.residual, t2.residual
            ))
        })(),
    });

    // Row 7: parabolic non-maximality of the (2,1) block cocycle.
    rows.push(Row {
        label: "(2,1) block cocycle stays below the parabolic bound",
        tag: "acceptance 7",
        outcome: (|| {
            let exp = bundled_doc("fig8_block21");
            let boundary = exp.boundary.clone().unwrap();
            let cert = maximality_certificate(&exp.cocycle, &boundary, trials.min(30), 1e-5, seed)
                .map_err(|e| e.to_string())?;
            if cert.slices.iter().any(|s| s.fraction >= 1.0) {
                return Err("a block slice certified as maximal".into());
            }
            let partition = Partition::new(vec![2, 1]).unwrap();
            let pb = parabolic_bound(&partition) * nu3();
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x2121);
            let mut worst = 0.0f64;
            for _ in 0..trials {
                let pts = random_tuple(&mut rng);
                let flags: Vec<CompleteFlag> = pts
                    .iter()
                    .map(|p| {
                        block_flag(&[veronese(p, 2), veronese(p, 1)]).map_err(|e| e.to_string())
                    })
                    .collect::<std::result::Result<_, _>>()?;
                let flags: [CompleteFlag; 4] = flags.try_into().unwrap();
                let b = borel_from_complete(&flags).map_err(|e| e.to_string())?;
                worst = worst.max(b.abs());
            }
            if worst > pb + 1e-6 {
                return Err(format!(
                    "|B_3| reached {worst:.6} > parabolic bound {pb:.6}"
                ));
            }
            Ok(format!(
                "certificate fractions < 1 on all slices; max |B_3| = {} <= {}",
                sig12(worst),
                sig12(pb)
            ))
        })(),
    });

    // Row 8: negative controls.
    rows.push(Row {
        label: "corrupted table refused; random flags non-maximal",
        tag: "acceptance 8",
        outcome: (|| {
            let exp = bundled_doc("fig8_corrupted_table");
            let boundary = exp.boundary.clone().unwrap();
            match empirical_borel_ratio(&exp.cocycle, &boundary, &EstimatorParams::default()) {
                Err(e @ Error::Refused(_)) => {
                    if e.exit_code() != 2 {
                        return Err(format!("refusal carries exit code {}", e.exit_code()));
                    }
                }
                Err(e) => return Err(format!("expected refusal, got: {e}")),
                Ok(_) => return Err("corrupted table was accepted".into()),
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x8e8e);
            let mut hits = 0usize;
            for _ in 0..trials {
                let flags: Vec<CompleteFlag> = (0..4)
                    .map(|_| CompleteFlag::random_gaussian(&mut rng, 3, 50.0))
                    .collect();
                let flags: [CompleteFlag; 4] = flags.try_into().unwrap();
                if is_maximal(&flags, 1e-5).map_err(|e| e.to_string())? != 0 {
                    hits += 1;
                }
            }
            if hits > 0 {
                return Err(format!("{hits}/{trials} random tuples looked maximal"));
            }
            Ok(format!(
                "refusal exit code 2; 0/{trials} random tuples maximal"
            ))
        })(),
    });

    let mut failed = 0usize;
    for row in &rows {
        match &row.outcome {
            Ok(detail) => println!("[PASS] {} ({}): {detail}", row.label, row.tag),
            Err(detail) => {
                failed += 1;
                println!("[FAIL] {} ({}): {detail}", row.label, row.tag);
            }
        }
    }
    println!("selftest: {} passed, {failed} failed", rows.len() - failed);
    if failed > 0 {
        return Err(Error::Numerical(format!("{failed} selftest rows failed")));
    }
    Ok(())
}
