//! `twistlab`: command-line driver for the twisted-Laplacian phase-space
//! toolkit. Subcommands generate reference fields, apply spectral flows
//! with per-route residual reports, evaluate mixed phase-space norms,
//! sweep decay exponents, and run the identity verification suites.
//!
//! Exit codes: 0 success, 2 parameter/format error, 3 band-limit/grid
//! error, 4 verification failure.

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use twistlab_core::error::{Error, Result};
use twistlab_core::grid::{Field, GridSpec};
use twistlab_core::io::{format_g17, read_field, write_field, write_sidecar};
use twistlab_core::phasespace::{gabor_mixed_norm, MixedNormSpec, NormFlavor};
use twistlab_core::specfun::{
    gaussian_dilated, hermite_nd, laguerre_kernel, log_log_slope, special_hermite, BasisCatalog,
    MultiIndex,
};
use twistlab_core::spectral::{
    bessel_potential, expand_landau_with_catalog, fractional_half_kernel_center,
    fractional_heat_flow, heat_flow, heat_kernel, heat_kernel_amalgam_norm, metaplectic_aj,
    multiplier_apply, negative_power, oscillating_multiplier, schrodinger_flow,
    transferred_multiplier, wave_flow, FractionalRoute, HeatRoute, MultiplierSpec, OperatorKind,
    PowerRoute, SchrodingerRoute,
};
use twistlab_core::twisted::twisted_convolution;
use twistlab_core::C64;

#[derive(Parser)]
#[command(name = "twistlab", version, about = "twisted-Laplacian phase-space toolkit")]
struct Cli {
    /// JSON config file; flags override config values, config overrides
    /// defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(flatten)]
    common: CommonArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// Degrees of freedom d (fields live on R^d or R^{2d}).
    #[arg(long, global = true)]
    d: Option<usize>,
    /// Lattice points per axis.
    #[arg(long, global = true)]
    n: Option<usize>,
    /// Half-width R of the sampling box (default: the self-dual choice).
    #[arg(long, global = true)]
    r: Option<f64>,
    /// Output directory for generated artifacts.
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
}

#[derive(Deserialize, Default)]
struct FileConfig {
    d: Option<usize>,
    n: Option<usize>,
    r: Option<f64>,
    out_dir: Option<PathBuf>,
}

/// Effective run configuration after precedence resolution.
struct RunConfig {
    d: usize,
    n: usize,
    r: Option<f64>,
    out_dir: PathBuf,
}

impl RunConfig {
    fn resolve(cli: &CommonArgs, config: Option<&Path>) -> Result<RunConfig> {
        let file: FileConfig = match config {
            Some(path) => {
                let text = std::fs::read_to_string(path)?;
                serde_json::from_str(&text)
                    .map_err(|e| Error::Format(format!("config {}: {e}", path.display())))?
            }
            None => FileConfig::default(),
        };
        let rc = RunConfig {
            d: cli.d.or(file.d).unwrap_or(1),
            n: cli.n.or(file.n).unwrap_or(64),
            r: cli.r.or(file.r),
            out_dir: cli.out_dir.clone().or(file.out_dir).unwrap_or_else(|| PathBuf::from(".")),
        };
        if rc.d == 0 {
            return Err(Error::Parameter("d must be positive".into()));
        }
        if rc.n < 4 || rc.n % 2 != 0 {
            return Err(Error::Parameter(format!("n must be even and >= 4; got {}", rc.n)));
        }
        Ok(rc)
    }

    /// Grid on `R^d` (configuration space).
    fn grid_d(&self) -> Result<GridSpec> {
        match self.r {
            Some(r) => GridSpec::new(self.d, self.n, r),
            None => GridSpec::self_dual_axes(self.d, self.n),
        }
    }

    /// Grid on `R^{2d}` (phase space; Landau-compatible by default).
    fn grid_2d(&self) -> Result<GridSpec> {
        match self.r {
            Some(r) => GridSpec::new(2 * self.d, self.n, r),
            None => GridSpec::landau(2 * self.d, self.n),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate a reference field as a TWF1 file with a JSON sidecar.
    Gen {
        #[arg(value_enum)]
        kind: GenKind,
        /// Hermite multi-index (comma-separated, one entry per axis).
        #[arg(long, value_delimiter = ',')]
        alpha: Option<Vec<usize>>,
        /// Second multi-index for special Hermite functions.
        #[arg(long, value_delimiter = ',')]
        beta: Option<Vec<usize>>,
        /// Laguerre kernel order.
        #[arg(long)]
        k: Option<usize>,
        /// Gaussian dilation parameter.
        #[arg(long)]
        lambda: Option<f64>,
        /// Heat propagator time.
        #[arg(long)]
        t: Option<f64>,
        /// Output path (default: derived from the label in --out-dir).
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Apply a spectral flow to a TWF1 field.
    Flow {
        #[arg(value_enum)]
        flow: FlowKind,
        #[arg(long)]
        input: PathBuf,
        /// Initial velocity for the wave flow.
        #[arg(long)]
        input2: Option<PathBuf>,
        #[arg(long)]
        t: Option<f64>,
        #[arg(long)]
        nu: Option<f64>,
        #[arg(long)]
        gamma: Option<f64>,
        #[arg(long)]
        delta: Option<f64>,
        /// spectral | kernel | weyl | subordination | gamma | both
        #[arg(long, default_value = "spectral")]
        route: String,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Mixed phase-space norm of a TWF1 field (CSV row on stdout).
    Norm {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        #[arg(long, default_value_t = 2.0)]
        q: f64,
        #[arg(long, default_value_t = 0.0)]
        s: f64,
        #[arg(long, value_enum, default_value_t = FlavorArg::Modulation)]
        flavor: FlavorArg,
        #[arg(long)]
        symplectic: bool,
    },
    /// Sweep a flow over t and fit the decay exponent (CSV on stdout).
    Decay {
        #[arg(value_enum)]
        mode: DecayMode,
        #[arg(long, default_value_t = 1e-3)]
        t_min: f64,
        #[arg(long, default_value_t = 1e-1)]
        t_max: f64,
        #[arg(long, default_value_t = 9)]
        steps: usize,
        #[arg(long, default_value_t = 1.0)]
        p: f64,
        #[arg(long, default_value_t = 1.0)]
        q: f64,
    },
    /// Run a registered identity suite; exit 0 iff every check passes.
    Verify {
        #[arg(value_enum)]
        suite: SuiteArg,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum GenKind {
    Hermite,
    SpecialHermite,
    LaguerreKernel,
    Gaussian,
    HeatKernel,
}

#[derive(Clone, Copy, ValueEnum)]
enum FlowKind {
    Heat,
    Fracheat,
    Schrodinger,
    Wave,
    Oscmult,
    Negpow,
    Bessel,
}

#[derive(Clone, Copy, ValueEnum, PartialEq)]
enum FlavorArg {
    Modulation,
    Amalgam,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    TwistedAlgebra,
    Intertwine,
    HeatRoutes,
    All,
}

fn main() {
    if let Ok(threads) = std::env::var("TWISTLAB_THREADS") {
        if let Ok(k) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(k.max(1)).build_global();
        }
    }
    let cli = Cli::parse();
    if let Err(e) = run(&cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}

fn run(cli: &Cli) -> Result<()> {
    let rc = RunConfig::resolve(&cli.common, cli.config.as_deref())?;
    match &cli.command {
        Command::Gen { kind, alpha, beta, k, lambda, t, output } => {
            cmd_gen(&rc, *kind, alpha.as_deref(), beta.as_deref(), *k, *lambda, *t, output.as_deref())
        }
        Command::Flow { flow, input, input2, t, nu, gamma, delta, route, output } => cmd_flow(
            &rc,
            *flow,
            input,
            input2.as_deref(),
            *t,
            *nu,
            *gamma,
            *delta,
            route,
            output.as_deref(),
        ),
        Command::Norm { input, p, q, s, flavor, symplectic } => {
            cmd_norm(input, *p, *q, *s, *flavor, *symplectic)
        }
        Command::Decay { mode, t_min, t_max, steps, p, q } => {
            cmd_decay(&rc, *mode, *t_min, *t_max, *steps, *p, *q)
        }
        Command::Verify { suite } => cmd_verify(&rc, *suite),
    }
}

fn require<T: Copy>(v: Option<T>, what: &str) -> Result<T> {
    v.ok_or_else(|| Error::Parameter(format!("missing required parameter --{what}")))
}

fn index_arg(v: Option<&[usize]>, d: usize, what: &str) -> Result<MultiIndex> {
    let idx = v.map(|s| s.to_vec()).unwrap_or_else(|| vec![0; d]);
    if idx.len() != d {
        return Err(Error::Parameter(format!(
            "--{what} needs {d} entries, got {}",
            idx.len()
        )));
    }
    Ok(MultiIndex(idx))
}

#[allow(clippy::too_many_arguments)]
fn cmd_gen(
    rc: &RunConfig,
    kind: GenKind,
    alpha: Option<&[usize]>,
    beta: Option<&[usize]>,
    k: Option<usize>,
    lambda: Option<f64>,
    t: Option<f64>,
    output: Option<&Path>,
) -> Result<()> {
    let mut params = BTreeMap::new();
    let (field, stem) = match kind {
        GenKind::Hermite => {
            let a = index_arg(alpha, rc.d, "alpha")?;
            params.insert("alpha".into(), format!("{:?}", a.0));
            let f = hermite_nd(&a, rc.grid_d()?)?;
            (f, format!("hermite_{}", join(&a.0)))
        }
        GenKind::SpecialHermite => {
            let a = index_arg(alpha, rc.d, "alpha")?;
            let b = index_arg(beta, rc.d, "beta")?;
            params.insert("alpha".into(), format!("{:?}", a.0));
            params.insert("beta".into(), format!("{:?}", b.0));
            let f = special_hermite(&a, &b, rc.grid_2d()?)?;
            (f, format!("special_hermite_{}_{}", join(&a.0), join(&b.0)))
        }
        GenKind::LaguerreKernel => {
            let k = require(k, "k")?;
            params.insert("k".into(), k.to_string());
            (laguerre_kernel(k, rc.grid_2d()?)?, format!("laguerre_kernel_{k}"))
        }
        GenKind::Gaussian => {
            let lambda = require(lambda, "lambda")?;
            params.insert("lambda".into(), format_g17(lambda));
            (gaussian_dilated(lambda, rc.grid_2d()?)?, "gaussian".into())
        }
        GenKind::HeatKernel => {
            let t = require(t, "t")?;
            params.insert("t".into(), format_g17(t));
            (heat_kernel(t, rc.grid_2d()?)?, "heat_kernel".into())
        }
    };
    let path = match output {
        Some(p) => p.to_path_buf(),
        None => rc.out_dir.join(format!("{stem}.twf1")),
    };
    write_field(&path, &field)?;
    write_sidecar(&path, &field, params)?;
    println!("wrote {} ({} samples)", path.display(), field.values.len());
    Ok(())
}

fn join(idx: &[usize]) -> String {
    idx.iter().map(|i| i.to_string()).collect::<Vec<_>>().join("-")
}

fn report_agreement(primary: &Field, secondary: &Field, names: (&str, &str)) {
    let rel = primary.rel_l2_distance(secondary);
    println!("route_agreement {} vs {}: {}", names.0, names.1, format_g17(rel));
}

#[allow(clippy::too_many_arguments)]
fn cmd_flow(
    rc: &RunConfig,
    flow: FlowKind,
    input: &Path,
    input2: Option<&Path>,
    t: Option<f64>,
    nu: Option<f64>,
    gamma: Option<f64>,
    delta: Option<f64>,
    route: &str,
    output: Option<&Path>,
) -> Result<()> {
    let f = read_field(input)?;
    let bad_route =
        |r: &str| Error::Parameter(format!("route '{r}' is not available for this flow"));
    let out = match flow {
        FlowKind::Heat => {
            let t = require(t, "t")?;
            match route {
                "spectral" => heat_flow(&f, t, HeatRoute::Spectral)?,
                "kernel" => heat_flow(&f, t, HeatRoute::Kernel)?,
                "weyl" => heat_flow(&f, t, HeatRoute::WeylSymbol)?,
                "both" => {
                    let a = heat_flow(&f, t, HeatRoute::Spectral)?;
                    let b = heat_flow(&f, t, HeatRoute::Kernel)?;
                    report_agreement(&a, &b, ("spectral", "kernel"));
                    a
                }
                r => return Err(bad_route(r)),
            }
        }
        FlowKind::Fracheat => {
            let t = require(t, "t")?;
            let nu = require(nu, "nu")?;
            match route {
                "spectral" => fractional_heat_flow(&f, t, nu, FractionalRoute::Spectral)?,
                "subordination" => {
                    fractional_heat_flow(&f, t, nu, FractionalRoute::Subordination)?
                }
                "both" => {
                    let a = fractional_heat_flow(&f, t, nu, FractionalRoute::Spectral)?;
                    let b = fractional_heat_flow(&f, t, nu, FractionalRoute::Subordination)?;
                    report_agreement(&a, &b, ("spectral", "subordination"));
                    a
                }
                r => return Err(bad_route(r)),
            }
        }
        FlowKind::Schrodinger => {
            let t = require(t, "t")?;
            match route {
                "spectral" => schrodinger_flow(&f, t, SchrodingerRoute::Spectral)?,
                "kernel" => schrodinger_flow(&f, t, SchrodingerRoute::Kernel)?,
                "both" => {
                    let a = schrodinger_flow(&f, t, SchrodingerRoute::Spectral)?;
                    let b = schrodinger_flow(&f, t, SchrodingerRoute::Kernel)?;
                    report_agreement(&a, &b, ("spectral", "kernel"));
                    a
                }
                r => return Err(bad_route(r)),
            }
        }
        FlowKind::Wave => {
            let t = require(t, "t")?;
            let g = match input2 {
                Some(p) => read_field(p)?,
                None => Field::zeros(f.grid),
            };
            wave_flow(&f, &g, t)?
        }
        FlowKind::Oscmult => {
            let t = require(t, "t")?;
            let gamma = require(gamma, "gamma")?;
            let delta = require(delta, "delta")?;
            oscillating_multiplier(&f, t, gamma, delta, OperatorKind::Landau)?
        }
        FlowKind::Negpow => {
            let nu = require(nu, "nu")?;
            match route {
                "spectral" => negative_power(&f, nu, PowerRoute::Spectral)?,
                "gamma" => negative_power(&f, nu, PowerRoute::GammaIntegral)?,
                "both" => {
                    let a = negative_power(&f, nu, PowerRoute::Spectral)?;
                    let b = negative_power(&f, nu, PowerRoute::GammaIntegral)?;
                    report_agreement(&a, &b, ("spectral", "gamma"));
                    a
                }
                r => return Err(bad_route(r)),
            }
        }
        FlowKind::Bessel => bessel_potential(&f, require(nu, "nu")?)?,
    };
    let path = match output {
        Some(p) => p.to_path_buf(),
        None => rc.out_dir.join("flow_output.twf1"),
    };
    write_field(&path, &out)?;
    println!("wrote {} (norm {})", path.display(), format_g17(out.l2_norm()));
    Ok(())
}

fn cmd_norm(input: &Path, p: f64, q: f64, s: f64, flavor: FlavorArg, symplectic: bool) -> Result<()> {
    let f = read_field(input)?;
    let flavor_code = match flavor {
        FlavorArg::Modulation => NormFlavor::Modulation,
        FlavorArg::Amalgam => NormFlavor::Amalgam,
    };
    let spec = MixedNormSpec::new(p, q, s, flavor_code, symplectic)?;
    let window = hermite_nd(&MultiIndex(vec![0; f.grid.dim]), f.grid)?;
    let value = gabor_mixed_norm(&f, &window, &spec)?;
    println!("label,p,q,s,flavor,symplectic,value");
    println!(
        "{},{},{},{},{},{},{}",
        f.label,
        format_g17(p),
        format_g17(q),
        format_g17(s),
        if flavor == FlavorArg::Modulation { "modulation" } else { "amalgam" },
        symplectic,
        format_g17(value)
    );
    Ok(())
}

#[derive(Clone, Copy, ValueEnum)]
enum DecayMode {
    /// Ground-state heat decay: value = |e^{-tL} Phi_00| / |Phi_00| and an
    /// exponential-rate fit (exact rate d).
    Ground,
    /// Amalgam norm |p_t|_{W^{p,q}} with a log-log slope fit (expected
    /// slope -d/p as t -> 0).
    KernelNorm,
    /// Fractional-kernel central value at nu = 1/2 with a log-log slope
    /// fit (expected slope -2d as t -> 0).
    FracRatio,
}

fn cmd_decay(
    rc: &RunConfig,
    mode: DecayMode,
    t_min: f64,
    t_max: f64,
    steps: usize,
    p: f64,
    q: f64,
) -> Result<()> {
    if !(t_min > 0.0) || !(t_max > t_min) || steps < 2 {
        return Err(Error::Parameter(format!(
            "need 0 < t_min < t_max and steps >= 2; got [{t_min}, {t_max}] x {steps}"
        )));
    }
    let ts: Vec<f64> = (0..steps)
        .map(|i| {
            let frac = i as f64 / (steps - 1) as f64;
            (t_min.ln() + frac * (t_max.ln() - t_min.ln())).exp()
        })
        .collect();
    let mut values = Vec::with_capacity(ts.len());
    println!("t,value");
    match mode {
        DecayMode::Ground => {
            let grid = rc.grid_2d()?;
            let zero = MultiIndex(vec![0; rc.d]);
            let f = special_hermite(&zero, &zero, grid)?;
            let base = f.l2_norm();
            for &t in &ts {
                let v = heat_flow(&f, t, HeatRoute::Spectral)?.l2_norm() / base;
                println!("{},{}", format_g17(t), format_g17(v));
                values.push(v);
            }
            // Exponential rate: least-squares slope of ln(value) on t.
            let rate = -linear_slope(&ts, &values.iter().map(|v| v.ln()).collect::<Vec<_>>());
            println!("# exp_rate {}", format_g17(rate));
        }
        DecayMode::KernelNorm => {
            for &t in &ts {
                let v = heat_kernel_amalgam_norm(t, rc.d, p, q)?;
                println!("{},{}", format_g17(t), format_g17(v));
                values.push(v);
            }
            println!("# loglog_slope {}", format_g17(log_log_slope(&ts, &values)));
        }
        DecayMode::FracRatio => {
            for &t in &ts {
                let v = fractional_half_kernel_center(t, rc.d)?;
                println!("{},{}", format_g17(t), format_g17(v));
                values.push(v);
            }
            println!("# loglog_slope {}", format_g17(log_log_slope(&ts, &values)));
        }
    }
    Ok(())
}

/// Ordinary least-squares slope of `y` on `x`.
fn linear_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let cov: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let var: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    cov / var
}

struct Check {
    name: String,
    residual: f64,
    tol: f64,
}

fn run_checks(checks: Vec<Check>) -> Result<()> {
    let mut failed = 0;
    for c in &checks {
        let ok = c.residual < c.tol;
        println!(
            "{} {} residual={} tol={}",
            if ok { "PASS" } else { "FAIL" },
            c.name,
            format_g17(c.residual),
            format_g17(c.tol)
        );
        if !ok {
            failed += 1;
        }
    }
    if failed > 0 {
        return Err(Error::Verification(format!("{failed}/{} checks failed", checks.len())));
    }
    Ok(())
}

fn suite_twisted_algebra(rc: &RunConfig) -> Result<Vec<Check>> {
    let grid = GridSpec::landau(2 * rc.d, rc.n)?;
    let indices: Vec<MultiIndex> = twistlab_core::specfun::multi_indices(rc.d, 2);
    let four_d = 4f64.powi(rc.d as i32);
    let mut checks = Vec::new();
    for a in &indices {
        for b in &indices {
            let pab = special_hermite(a, b, grid)?;
            for m in &indices {
                for v in &indices {
                    let pmv = special_hermite(m, v, grid)?;
                    let prod = twisted_convolution(&pab, &pmv)?;
                    let expected = if b == m {
                        special_hermite(a, v, grid)?.scaled(C64::new(four_d, 0.0))
                    } else {
                        Field::zeros(grid)
                    };
                    let res = prod.sub(&expected).l2_norm() / four_d;
                    checks.push(Check {
                        name: format!(
                            "twisted({:?},{:?})x({:?},{:?})",
                            a.0, b.0, m.0, v.0
                        ),
                        residual: res,
                        tol: 1e-6,
                    });
                }
            }
        }
    }
    Ok(checks)
}

fn suite_intertwine(rc: &RunConfig) -> Result<Vec<Check>> {
    let grid = GridSpec::self_dual_axes(2 * rc.d, rc.n)?;
    let fgrid = GridSpec::new(rc.d, rc.n, grid.half_width)?;
    let block = fgrid.len();
    let mut checks = Vec::new();
    for (a, b) in [(0usize, 0usize), (1, 0), (0, 2), (2, 1)] {
        let ha = hermite_nd(&MultiIndex(vec![a; rc.d]), fgrid)?;
        let hb = hermite_nd(&MultiIndex(vec![b; rc.d]), fgrid)?;
        let mut tensor = Field::zeros(grid);
        for i in 0..block {
            for j in 0..block {
                tensor.values[i * block + j] = ha.values[i] * hb.values[j];
            }
        }
        let out = metaplectic_aj(&tensor, false)?;
        let expected =
            special_hermite(&MultiIndex(vec![a; rc.d]), &MultiIndex(vec![b; rc.d]), grid)?;
        checks.push(Check {
            name: format!("AJ(h{a} x h{b}) = Phi_{a}{b}"),
            residual: out.rel_l2_distance(&expected),
            tol: 1e-6,
        });
    }
    // Transference vs. the catalog-spectral multiplier at m = e^{-tx}.
    let t = 0.4;
    let catalog = BasisCatalog::build(rc.d, 4, grid)?;
    let mut f = special_hermite(&MultiIndex(vec![0; rc.d]), &MultiIndex(vec![0; rc.d]), grid)?;
    f.axpy(
        C64::new(0.4, -0.2),
        &special_hermite(&MultiIndex(vec![1; rc.d]), &MultiIndex(vec![1; rc.d]), grid)?,
    );
    let spec = MultiplierSpec::from_fn(rc.d, 8, "heat", |x| C64::new((-t * x).exp(), 0.0))?;
    let transferred = transferred_multiplier(&f, &spec)?.field;
    let exp = expand_landau_with_catalog(&f, &catalog)?;
    let direct = exp.synthesize("", |_, lam| C64::new((-t * lam).exp(), 0.0));
    checks.push(Check {
        name: "transference m=e^{-tx}".into(),
        residual: transferred.rel_l2_distance(&direct),
        tol: 1e-5,
    });
    Ok(checks)
}

fn suite_heat_routes(rc: &RunConfig) -> Result<Vec<Check>> {
    let grid = GridSpec::landau(2 * rc.d, rc.n)?;
    let zero = MultiIndex(vec![0; rc.d]);
    let one = MultiIndex(vec![1; rc.d]);
    let mut f = special_hermite(&zero, &zero, grid)?;
    f.axpy(C64::new(0.5, 0.3), &special_hermite(&one, &zero, grid)?);
    f.axpy(C64::new(-0.2, 0.1), &special_hermite(&zero, &one, grid)?);
    let t = 0.5;
    let spectral = heat_flow(&f, t, HeatRoute::Spectral)?;
    let kernel = heat_flow(&f, t, HeatRoute::Kernel)?;
    let weyl = heat_flow(&f, t, HeatRoute::WeylSymbol)?;
    let mut checks = vec![
        Check {
            name: "heat spectral vs kernel".into(),
            residual: spectral.rel_l2_distance(&kernel),
            tol: 1e-5,
        },
        Check {
            name: "heat spectral vs weyl".into(),
            residual: spectral.rel_l2_distance(&weyl),
            tol: 1e-5,
        },
    ];
    // Semigroup property on the kernel route.
    let two_step = heat_flow(&heat_flow(&f, 0.3, HeatRoute::Kernel)?, 0.45, HeatRoute::Kernel)?;
    let one_step = heat_flow(&f, 0.75, HeatRoute::Kernel)?;
    checks.push(Check {
        name: "heat semigroup".into(),
        residual: two_step.rel_l2_distance(&one_step),
        tol: 1e-6,
    });
    // Identity multiplier sanity check through the generic engine.
    let ident = MultiplierSpec::from_fn(rc.d, 8, "1", |_| C64::new(1.0, 0.0))?;
    let out = multiplier_apply(&f, &ident, OperatorKind::Landau, 1e-5)?;
    checks.push(Check {
        name: "identity multiplier".into(),
        residual: out.field.rel_l2_distance(&f),
        tol: 1e-6,
    });
    Ok(checks)
}

fn cmd_verify(rc: &RunConfig, suite: SuiteArg) -> Result<()> {
    let checks = match suite {
        SuiteArg::TwistedAlgebra => suite_twisted_algebra(rc)?,
        SuiteArg::Intertwine => suite_intertwine(rc)?,
        SuiteArg::HeatRoutes => suite_heat_routes(rc)?,
        SuiteArg::All => {
            let mut all = suite_twisted_algebra(rc)?;
            all.extend(suite_intertwine(rc)?);
            all.extend(suite_heat_routes(rc)?);
            all
        }
    };
    run_checks(checks)
}
