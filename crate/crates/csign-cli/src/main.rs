//! `csign`: CSV reproductions of the DV and CV CSIGN resource curves.

mod grid;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use csign_core::cv::{average_fidelity, optimize_dual_rail_gain, success_probability, InputState};
use csign_core::dv::{
    dv_quality, expected_cost_res_state, grice_cost_estimate, simulate_grice_cost, simulate_res_state_curve,
    ResourceCurve, Route,
};
use csign_core::fock::{heralded_gate_coefficients, klm_nss_coefficient, klm_nss_setup};
use csign_core::gate::{cv_cost, display_count, optimize_csign, GateSuccessModel, TABLE_ORDERS, TABLE_TARGETS};
use csign_core::nssd::{alpha_coefficients, max_success_probability, XScan};
use csign_core::special::{db_to_q, q_to_db, self_kerr_sign, Radius};
use csign_core::Error;
use num_complex::Complex64;

use grid::Grid;

const DEFAULT_SEED: &str = "20240611";

#[derive(Debug, Parser)]
#[command(
    name = "csign",
    version,
    about = "Resource and fidelity curves for teleported CSIGN gates"
)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Output file (default: standard output).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Master seed for Monte-Carlo subcommands.
    #[arg(long, global = true, env = "CSIGN_SEED", default_value = DEFAULT_SEED)]
    seed: u64,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Relative tolerance for bisections and golden-section searches.
    #[arg(long, global = true, default_value_t = 1e-6)]
    tol: f64,
    /// Nodes of the logarithmic x scan in NSS_d synthesis.
    #[arg(long, global = true, default_value_t = 200)]
    quad_nodes: usize,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// NSS coefficients from permanents against the closed form.
    NssVerify {
        #[arg(long, default_value_t = 6)]
        n_max: u32,
    },
    /// Synthesize the NSS_d gate with the largest success probability.
    NssdSynth {
        #[arg(long, value_parser = clap::value_parser!(u32).range(2..=7))]
        d: u32,
    },
    /// Resource-state success probability against photon sources.
    DvResCurve {
        #[arg(long, value_enum, default_value_t = RouteArg::All)]
        route: RouteArg,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[arg(long, default_value = "0:3000:25")]
        grid: Grid,
    },
    /// Mean boosted Bell-measurement success against ancilla photon sources.
    GriceCurve {
        #[arg(long = "N", value_parser = clap::value_parser!(u32).range(1..=8))]
        n: u32,
        #[arg(long, default_value_t = 1_000)]
        trials: u64,
        #[arg(long, default_value = "0:400000:1000")]
        grid: Grid,
    },
    /// Success probability, fidelity and quality against the conditioning radius.
    CvTradeoff {
        #[arg(long, default_value_t = 0.9)]
        q: f64,
        /// Gain (default: q).
        #[arg(long)]
        g: Option<f64>,
        #[arg(long, default_value = "0.05:5:0.05")]
        bgrid: Grid,
    },
    /// Unconditioned Fock-state fidelities against the gain.
    CvGainScan {
        #[arg(long, default_value_t = 0.9)]
        q: f64,
        #[arg(long, default_value = "0.5:1.2:0.005")]
        ggrid: Grid,
    },
    /// Optimal CSIGN gain against squeezing for several NSS_d orders.
    CvGopt {
        #[arg(long, value_delimiter = ',', default_value = "2,5,10,20,50")]
        d: Vec<u32>,
        #[arg(long, default_value_t = 2)]
        t: u32,
        #[arg(long, default_value = "0.5:0.995:0.005")]
        qgrid: Grid,
    },
    /// Worst-case CSIGN fidelity with optimized gain against squeezing.
    CvCsign {
        #[arg(long, value_delimiter = ',', default_value = "2,5,10,20,50,100")]
        d: Vec<u32>,
        #[arg(long, default_value_t = 2)]
        t: u32,
        #[arg(long, default_value = "0.5:0.999:0.001")]
        qgrid: Grid,
        /// Read the grid as squeezing in dB.
        #[arg(long)]
        db_axis: bool,
    },
    /// Photon sources for a target CSIGN success probability.
    CvCostTable {
        #[arg(long, default_value = "inverse-square")]
        pd_model: PdModel,
        #[arg(long, default_value_t = 2)]
        t: u32,
        /// Squeezing grid for the F_max column.
        #[arg(long, default_value = "0.5:0.999:0.00125")]
        qgrid: Grid,
    },
    /// Quality of the DV gate for given resource and Bell-measurement success.
    DvQuality {
        #[arg(long, default_value_t = 1.0)]
        p_res: f64,
        #[arg(long, value_delimiter = ',', default_value = "0.5,0.75")]
        p_bm: Vec<f64>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum RouteArg {
    Knill,
    #[value(name = "cluster_std")]
    ClusterStd,
    #[value(name = "cluster_adv")]
    ClusterAdv,
    All,
}

impl RouteArg {
    fn routes(self) -> Vec<Route> {
        match self {
            RouteArg::Knill => vec![Route::Knill],
            RouteArg::ClusterStd => vec![Route::ClusterStd],
            RouteArg::ClusterAdv => vec![Route::ClusterAdv],
            RouteArg::All => Route::ALL.to_vec(),
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct PdModel(GateSuccessModel);

impl std::str::FromStr for PdModel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "inverse-square" {
            return Ok(PdModel(GateSuccessModel::InverseSquare));
        }
        let p = s
            .strip_prefix("fixed:")
            .and_then(|v| v.parse::<f64>().ok())
            .ok_or_else(|| format!("'{s}' is neither inverse-square nor fixed:<p>"))?;
        if p > 0.0 && p <= 1.0 {
            Ok(PdModel(GateSuccessModel::Fixed(p)))
        } else {
            Err(format!("fixed success probability {p} outside (0, 1]"))
        }
    }
}

enum Failure {
    Usage(String),
    Numerical(String),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter(m) => Failure::Usage(m),
            other => Failure::Numerical(other.to_string()),
        }
    }
}

/// CSV body plus free-form notes for the manifest.
struct Table {
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
    notes: Vec<String>,
}

impl Table {
    fn new(header: &[&'static str]) -> Self {
        Self {
            header: header.to_vec(),
            rows: Vec::new(),
            notes: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    fn body(&self) -> Result<Vec<u8>, Failure> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Failure::Io(e.to_string());
        w.write_record(&self.header).map_err(io)?;
        for r in &self.rows {
            w.write_record(r).map_err(io)?;
        }
        w.into_inner().map_err(|e| Failure::Io(e.to_string()))
    }
}

/// Cell text: shortest round-trip decimals, exponent form at extreme magnitudes.
trait Cell {
    fn cell(&self) -> String;
}

impl Cell for f64 {
    fn cell(&self) -> String {
        let a = self.abs();
        if a != 0.0 && a.is_finite() && !(1e-4..1e15).contains(&a) {
            format!("{self:e}")
        } else {
            self.to_string()
        }
    }
}

macro_rules! display_cell {
    ($($t:ty),*) => {$(impl Cell for $t {
        fn cell(&self) -> String {
            self.to_string()
        }
    })*};
}

display_cell!(u32, u64, usize);

impl<T: Cell + ?Sized> Cell for &T {
    fn cell(&self) -> String {
        (**self).cell()
    }
}

fn s<T: Cell>(x: T) -> String {
    x.cell()
}

fn curve_rows(t: &mut Table, label: &str, c: &ResourceCurve) {
    for p in &c.samples {
        t.push(vec![
            label.to_string(),
            s(p.n_sources),
            s(p.success_prob),
            s(p.stderr),
            s(c.trials),
            s(c.master_seed),
        ]);
    }
}

const CURVE_HEADER: [&str; 6] = [
    "route_or_N",
    "n_sources",
    "success_prob",
    "stderr",
    "trials",
    "master_seed",
];

fn run(common: &Common, command: &Command) -> Result<Table, Failure> {
    match command {
        Command::NssVerify { n_max } => {
            let sim = heralded_gate_coefficients(&klm_nss_setup(), *n_max)?;
            let mut t = Table::new(&["n", "alpha_re", "alpha_im", "closed_form", "abs_error"]);
            for (n, a) in sim.iter().enumerate() {
                let want = klm_nss_coefficient(n as u32);
                t.push(vec![
                    s(n),
                    s(a.re),
                    s(a.im),
                    s(want),
                    s((a - Complex64::new(want, 0.0)).norm()),
                ]);
            }
            Ok(t)
        }
        Command::NssdSynth { d } => {
            let scan = XScan {
                points: common.quad_nodes,
                ..XScan::default()
            };
            let (p, spec) = max_success_probability(*d, scan, common.tol)?;
            spec.validate()?;
            let n_max = d + 2;
            let alphas = alpha_coefficients(&spec, n_max);
            let simulated = if *d <= 4 {
                Some(heralded_gate_coefficients(&spec.heralded_setup()?, n_max)?)
            } else {
                None
            };
            let mut t = Table::new(&[
                "d",
                "p_d",
                "x",
                "spectral_norm",
                "n",
                "alpha_re",
                "alpha_im",
                "target_re",
                "permanent_re",
                "permanent_im",
            ]);
            for (n, a) in alphas.iter().enumerate() {
                let target = if n as u32 <= *d {
                    s(spec.alpha0.re * self_kerr_sign(n as u64))
                } else {
                    String::new()
                };
                let (pr, pi) = simulated.as_ref().map(|v| (s(v[n].re), s(v[n].im))).unwrap_or_default();
                t.push(vec![
                    s(d),
                    s(p),
                    s(spec.x),
                    s(spec.spectral_norm()),
                    s(n),
                    s(a.re),
                    s(a.im),
                    target,
                    pr,
                    pi,
                ]);
            }
            Ok(t)
        }
        Command::DvResCurve { route, trials, grid } => {
            let grid = grid.counts().map_err(Failure::Usage)?;
            let mut t = Table::new(&CURVE_HEADER);
            for r in route.routes() {
                let c = simulate_res_state_curve(r, &grid, *trials, common.seed)?;
                curve_rows(&mut t, r.name(), &c);
                t.notes
                    .push(format!("expected_cost {} = {}", r.name(), expected_cost_res_state(r)));
            }
            Ok(t)
        }
        Command::GriceCurve { n, trials, grid } => {
            let grid = grid.counts().map_err(Failure::Usage)?;
            let c = simulate_grice_cost(*n, &grid, *trials, common.seed)?;
            let mut t = Table::new(&CURVE_HEADER);
            curve_rows(&mut t, &n.to_string(), &c);
            if let Ok(e) = grice_cost_estimate(*n) {
                t.notes.push(format!("cost_estimate = {e}"));
            }
            Ok(t)
        }
        Command::CvTradeoff { q, g, bgrid } => {
            let g = g.unwrap_or(*q);
            let mut t = Table::new(&["n", "B", "P", "F", "Q"]);
            for n in 0..3 {
                let state = InputState::fock(n);
                for &b in &bgrid.0 {
                    let r = Radius::finite(b)?;
                    let p = success_probability(&state, *q, r)?;
                    let f = average_fidelity(&state, *q, g, r)?;
                    t.push(vec![s(n), s(b), s(p), s(f.conditional), s(f.raw)]);
                }
            }
            Ok(t)
        }
        Command::CvGainScan { q, ggrid } => {
            let mut t = Table::new(&["n", "q", "g", "F"]);
            for n in 0..3 {
                let state = InputState::fock(n);
                for &g in &ggrid.0 {
                    let f = average_fidelity(&state, *q, g, Radius::Infinite)?;
                    t.push(vec![s(n), s(q), s(g), s(f.conditional)]);
                }
            }
            let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
            let (g_dr, f_dr) = optimize_dual_rail_gain(h, h, *q)?;
            t.notes.push(format!("dual_rail g_opt = {g_dr}, F = {f_dr}"));
            Ok(t)
        }
        Command::CvGopt { d, t: trunc, qgrid } => {
            let mut t = Table::new(&["d", "t", "q", "g_opt", "F_worst"]);
            for &dd in d {
                let c = optimize_csign(dd, *trunc, &qgrid.0)?;
                for p in &c.points {
                    t.push(vec![s(dd), s(trunc), s(p.q), s(p.g_opt), s(p.fidelity)]);
                }
                let (slope, intercept) = linear_fit(c.points.iter().map(|p| (p.q, p.g_opt)));
                t.notes
                    .push(format!("fit d={dd}: g_opt = {slope:.4} q + {intercept:.4}"));
            }
            Ok(t)
        }
        Command::CvCsign {
            d,
            t: trunc,
            qgrid,
            db_axis,
        } => {
            let qs: Vec<f64> = if *db_axis {
                qgrid.0.iter().map(|&db| db_to_q(db)).collect::<Result<_, _>>()?
            } else {
                qgrid.0.clone()
            };
            let mut t = Table::new(&["d", "t", "q", "q_db", "g_opt", "F_worst"]);
            for &dd in d {
                let c = optimize_csign(dd, *trunc, &qs)?;
                for p in &c.points {
                    t.push(vec![
                        s(dd),
                        s(trunc),
                        s(p.q),
                        s(q_to_db(p.q)?),
                        s(p.g_opt),
                        s(p.fidelity),
                    ]);
                }
                let b = c.best;
                t.notes.push(format!(
                    "best d={dd}: F = {:.4} at q = {:.5} ({:.2} dB), g = {:.4}",
                    b.fidelity,
                    b.q,
                    q_to_db(b.q)?,
                    b.g_opt
                ));
            }
            Ok(t)
        }
        Command::CvCostTable {
            pd_model,
            t: trunc,
            qgrid,
        } => {
            let mut t = Table::new(&["d", "F_max", "p_CV", "n_CV", "n_CV_display"]);
            for d in TABLE_ORDERS {
                let f = optimize_csign(d, *trunc, &qgrid.0)?.best.fidelity;
                let p_d = pd_model.0.probability(d);
                for p in TABLE_TARGETS {
                    let n = cv_cost(d, p, p_d)?;
                    t.push(vec![s(d), format!("{f:.2}"), s(p), s(n), display_count(n)]);
                }
            }
            Ok(t)
        }
        Command::DvQuality { p_res, p_bm } => {
            let mut t = Table::new(&["p_resource", "p_bm", "quality"]);
            for &p in p_bm {
                t.push(vec![s(p_res), s(p), s(dv_quality(*p_res, p)?)]);
            }
            Ok(t)
        }
    }
}

/// Least-squares line through (x, y) pairs.
fn linear_fit(points: impl Iterator<Item = (f64, f64)>) -> (f64, f64) {
    let pts: Vec<(f64, f64)> = points.collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

fn manifest(name: &str, flags: &[String], seed: u64, seconds: f64, notes: &[String]) -> String {
    let mut out = String::new();
    out.push_str(&format!("# subcommand: {name}\n"));
    out.push_str(&format!("# flags: {}\n", flags.join(" ")));
    out.push_str(&format!("# master_seed: {seed}\n"));
    out.push_str(&format!("# version: csign {}\n", env!("CARGO_PKG_VERSION")));
    out.push_str(&format!("# duration_s: {seconds:.3}\n"));
    for n in notes {
        out.push_str(&format!("# {n}\n"));
    }
    out
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(n) = cli.common.threads {
        if n == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(3);
        }
    }
    let name = argv
        .iter()
        .skip(1)
        .find(|a| !a.starts_with('-') && COMMANDS.contains(&a.as_str()))
        .cloned()
        .unwrap_or_default();
    let start = Instant::now();
    let result = run(&cli.common, &cli.command).and_then(|t| Ok((t.body()?, t.notes)));
    match result {
        Ok((body, notes)) => {
            let head = manifest(
                &name,
                &argv[1..],
                cli.common.seed,
                start.elapsed().as_secs_f64(),
                &notes,
            );
            let written = match &cli.common.out {
                Some(path) => std::fs::File::create(path).and_then(|mut f| {
                    f.write_all(head.as_bytes())?;
                    f.write_all(&body)
                }),
                None => {
                    let mut o = std::io::stdout().lock();
                    o.write_all(head.as_bytes()).and_then(|_| o.write_all(&body))
                }
            };
            match written {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(3)
                }
            }
        }
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Numerical(m)) | Err(Failure::Io(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(3)
        }
    }
}

const COMMANDS: [&str; 10] = [
    "nss-verify",
    "nssd-synth",
    "dv-res-curve",
    "grice-curve",
    "cv-tradeoff",
    "cv-gain-scan",
    "cv-gopt",
    "cv-csign",
    "cv-cost-table",
    "dv-quality",
];
