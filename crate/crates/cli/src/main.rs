mod instance;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::{Parser, Subcommand};
use polychow::building::DEFAULT_MAX_CELLS;
use polychow::chow::{degree_functional, dp_ring, fy_ring, phi_iso_check};
use polychow::fan::{bergman_fan_capped, Fan};
use polychow::kahler::{ambient_fan, kahler_report, nestohedron_class};
use polychow::polytope::{default_c, polypermutohedron, normal_fan_equals};
use polychow::verify::{pairings_unimodular, verify_all, VerifyOptions, MAX_FAN_GROUND};
use polychow::MultisymMatroid;
use serde_json::{json, Value};

use instance::Instance;

#[derive(Parser)]
#[command(name = "polychow", version, about = "Chow rings, Bergman fans and Kähler checks for polymatroids")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Instance file (JSON with a `rank` table)
    #[arg(long, global = true)]
    instance: Option<PathBuf>,
    /// Building set: a JSON file with a list of masks, or `maximal`
    #[arg(long, global = true)]
    building_set: Option<String>,
    /// Seed for randomized checks; overrides the instance seed
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Random samples per randomized check
    #[arg(long, global = true, default_value_t = 1000)]
    trials: usize,
    /// Spaces of indentation; 0 prints compact JSON
    #[arg(long, global = true, default_value_t = 2)]
    json_indent: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Check the polymatroid axioms
    Validate,
    /// List the flats with their ranks
    Flats,
    /// Rank table of the multisymmetric lift
    LiftRank,
    /// Geometric flats of the lift and the comparison with the flats
    GeometricFlats,
    /// Building-set certificate and nested sets
    NestedComplex,
    /// Bergman fan of the building set
    Fan {
        #[arg(long)]
        check: bool,
    },
    /// Polypermutohedron vertices
    Polyperm {
        #[arg(long)]
        verify_fan: bool,
    },
    /// Chow ring: Hilbert function, basis and pairings
    Chow {
        #[arg(long)]
        iso_check: bool,
    },
    /// Strict convexity, Hard Lefschetz and Hodge-Riemann
    Kahler {
        #[arg(long)]
        all: bool,
    },
    /// Every check on the instance
    VerifyAll,
}

fn max_cells() -> Result<usize> {
    match std::env::var("POLYCHOW_MAX_CELLS") {
        Ok(v) => Ok(v.trim().parse().map_err(|_| anyhow::anyhow!("POLYCHOW_MAX_CELLS: `{v}` is not a count"))?),
        Err(_) => Ok(DEFAULT_MAX_CELLS),
    }
}

fn fan_guard(inst: &Instance) -> Result<()> {
    let n = inst.polymatroid.n();
    if n > MAX_FAN_GROUND {
        bail!("size guard exceeded: n = {n}, limit {MAX_FAN_GROUND} for fan, chow and kahler commands");
    }
    if inst.polymatroid.total_rank() == 0 {
        bail!("the polymatroid has rank zero");
    }
    Ok(())
}

fn fan_json(fan: &Fan) -> Value {
    json!(fan.to_json())
}

fn run(cli: &Cli) -> Result<(bool, Value)> {
    let Some(path) = &cli.instance else { bail!("--instance <path> is required") };
    let inst = match (Instance::load(path), &cli.command) {
        (Ok(inst), _) => inst,
        (Err(e), Command::Validate) => return Ok((false, json!({ "valid": false, "error": format!("{e:#}") }))),
        (Err(e), _) => return Err(e),
    };
    let seed = cli.seed.or(inst.seed).unwrap_or(0);
    let cells = max_cells()?;
    let p = &inst.polymatroid;
    Ok(match &cli.command {
        Command::Validate => (true, json!({ "valid": true, "n": p.n(), "rank": p.total_rank(), "matroid": p.is_matroid() })),
        Command::Flats => {
            let flats: Vec<Value> =
                p.flat_lattice().flats().iter().map(|&f| json!({ "flat": f, "rank": p.rank(f) })).collect();
            (true, json!({ "count": flats.len(), "flats": flats }))
        }
        Command::LiftRank => {
            let lift = MultisymMatroid::lift(p)?;
            let table: Vec<u32> = (0..=lift.ground()).map(|s| lift.rank(s)).collect();
            (true, json!({ "fibers": lift.projection().fiber_sizes(), "m": lift.m(), "rank_table": table }))
        }
        Command::GeometricFlats => {
            let geo = MultisymMatroid::lift(p)?.geometric_flat_lattice()?;
            let ok = geo.isomorphic && geo.sublattice;
            (ok, json!({ "geometric_flats": geo.lattice.flats(), "isomorphic": geo.isomorphic, "sublattice": geo.sublattice }))
        }
        Command::NestedComplex => {
            fan_guard(&inst)?;
            let g = inst.building_set(cli.building_set.as_deref())?;
            let cert = g.is_geometric_building_set();
            let nested = g.nested_complex(cells)?;
            (cert.is_ok(), json!({
                "building_set": g.members(),
                "geometric": cert.is_ok(),
                "certificate": cert.to_string(),
                "count": nested.len(),
                "nested_sets": nested,
            }))
        }
        Command::Fan { check } => {
            fan_guard(&inst)?;
            let g = inst.building_set(cli.building_set.as_deref())?;
            let fan = bergman_fan_capped(&g, cells)?;
            let mut out = fan_json(&fan);
            let mut ok = true;
            if *check {
                let report = fan.report();
                let balanced = fan.balancing_check()?;
                let dim_ok = fan.dimension() + 1 == p.total_rank() as usize;
                ok = report.ok() && balanced && dim_ok;
                out["check"] = json!({ "report": report, "balanced": balanced, "dimension": fan.dimension() });
            }
            (ok, out)
        }
        Command::Polyperm { verify_fan } => {
            let proj = p.projection()?;
            let c = inst.c.clone().unwrap_or_else(|| default_c(proj.n()));
            let q = polypermutohedron(&proj, &c)?;
            let mut out = json!({ "c": q.c(), "fibers": proj.fiber_sizes(), "vertices": q.vertices() });
            let mut ok = true;
            if *verify_fan {
                fan_guard(&inst)?;
                let fan = polychow::fan::boolean_bergman_fan(&proj)?;
                ok = normal_fan_equals(&q, &fan, cli.trials, seed)?;
                out["normal_fan_equals"] = json!(ok);
            }
            (ok, out)
        }
        Command::Chow { iso_check } => {
            fan_guard(&inst)?;
            let g = inst.building_set(cli.building_set.as_deref())?;
            let dp = dp_ring(&g)?;
            let fy = fy_ring(&g)?;
            let fan = bergman_fan_capped(&g, cells)?;
            let (unimodular, pairing) = pairings_unimodular(&g, &fan)?;
            let basis: Vec<Vec<String>> =
                dp.basis().iter().map(|level| level.iter().map(|m| dp.render_monomial(m)).collect()).collect();
            let mut out = json!({
                "hilbert": dp.hilbert_function(),
                "basis": basis,
                "pairing_unimodular": unimodular,
                "pairing": pairing,
            });
            let mut ok = unimodular && dp.hilbert_function() == fy.hilbert_function();
            if *iso_check {
                let report = phi_iso_check(&dp, &fy)?;
                ok &= report.ok();
                out["iso_check"] = json!(report);
            }
            (ok, out)
        }
        Command::Kahler { all } => {
            fan_guard(&inst)?;
            let g = inst.building_set(cli.building_set.as_deref())?;
            let fy = fy_ring(&g)?;
            let fan = bergman_fan_capped(&g, cells)?;
            let ell = nestohedron_class(&g)?;
            let (ambient, _) = ambient_fan(&g)?;
            let subfan = fan.cone_set().is_subset(&ambient.cone_set());
            let class = ell.class(&fy)?;
            let mut out = json!({ "class": fy.render(&class), "strictly_convex": ell.is_validated(), "subfan": subfan });
            let mut ok = ell.is_validated() && subfan;
            if *all {
                let deg = degree_functional(&fy, &fan)?;
                let evaluate = |f: &polychow::chow::IntPoly| deg.degree(&fy, f);
                let report = kahler_report(&fy, &evaluate, &class, ell.is_validated())?;
                ok &= report.ok();
                out["report"] = json!(report);
            }
            (ok, out)
        }
        Command::VerifyAll => {
            let g = inst.building_set(cli.building_set.as_deref())?;
            let opts = VerifyOptions { seed, trials: cli.trials, max_cells: cells };
            let report = verify_all(p, &g, &opts)?;
            (report.ok(), json!(report))
        }
    })
}

fn render(value: &Value, indent: usize) -> String {
    if indent == 0 {
        return value.to_string();
    }
    let pad = vec![b' '; indent];
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, serde_json::ser::PrettyFormatter::with_indent(&pad));
    serde::Serialize::serialize(value, &mut ser).expect("JSON values serialize");
    String::from_utf8(buf).expect("JSON is UTF-8")
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((ok, value)) => {
            // a closed pipe is not an error of the computation
            let _ = writeln!(std::io::stdout(), "{}", render(&value, cli.json_indent));
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            let value = json!({ "error": format!("{e:#}") });
            eprintln!("{}", render(&value, cli.json_indent));
            ExitCode::from(2)
        }
    }
}
