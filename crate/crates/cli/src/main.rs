//! Command-line front end: loads graph/ray/cover/map specs, runs the
//! library operations, and emits JSON/CSV/DOT reports.
//!
//! Reports are deterministic: identical arguments (including --seed)
//! produce byte-identical output. Wall-clock timing goes to stderr only.
//! Exit codes: 0 success, 1 operation error, 2 config/schema error.

mod run;
mod specs;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};
use specs::{parse_u64_list, read_json, CliError};
use std::process::ExitCode;
use std::time::Instant;

#[derive(Parser)]
#[command(name = "coarsegeom", version, about = "Desk-scale computational coarse geometry")]
struct Cli {
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    output: Option<String>,
    /// Echoed in the report. Sampling is deterministic; the seed is
    /// reserved metadata for reproducibility.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// End trees: per-level complement components with refinement maps.
    Ends {
        /// Carrier spec (path or inline JSON).
        #[arg(long)]
        graph: String,
        /// Comma-separated increasing radii.
        #[arg(long)]
        levels: String,
        /// Horizon policy: double | offset:K | fixed:H.
        #[arg(long, default_value = "double")]
        horizon: String,
        /// Also write a Graphviz rendering here.
        #[arg(long)]
        dot: Option<String>,
    },
    /// Four-point hyperbolicity of a truncation.
    Delta {
        /// Carrier spec (path or inline JSON).
        #[arg(long)]
        space: String,
        /// Truncation radius (required for infinite graphs).
        #[arg(long)]
        radius: Option<u64>,
        /// BFS margin (default: the radius).
        #[arg(long)]
        margin: Option<u64>,
        /// Fix the base point by index instead of scanning all bases.
        #[arg(long)]
        base_index: Option<usize>,
    },
    /// Decide end equivalence of two rays under a relation.
    Equiv {
        #[arg(long)]
        graph: String,
        /// metric | c0 | boundary | group | gromov | freudenthal | fields.
        #[arg(long)]
        rel: String,
        /// Ray spec (path or inline JSON).
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
        /// Prefix length for builtin rays.
        #[arg(long, default_value_t = 64)]
        len: usize,
        /// Semicolon-separated field specs (for --rel fields).
        #[arg(long)]
        fields: Option<String>,
        #[arg(long)]
        max_scale: Option<f64>,
        /// Comma-separated decreasing tolerances.
        #[arg(long)]
        tolerances: Option<String>,
    },
    /// Oscillation defect profile of a scalar field.
    SoProfile {
        #[arg(long)]
        graph: String,
        /// Field spec: expression in x, const:<c>, or collar:cos|sin|depth.
        #[arg(long)]
        field: String,
        #[arg(long)]
        radii: String,
        #[arg(long, default_value = "5")]
        meshes: String,
        #[arg(long)]
        horizon: u64,
        /// Also write the profile as CSV here.
        #[arg(long)]
        csv: Option<String>,
    },
    /// Partition a ray sample by pairwise verdicts.
    Corona {
        #[arg(long)]
        graph: String,
        /// Ray list (path or inline JSON array).
        #[arg(long)]
        rays: String,
        #[arg(long)]
        rel: String,
        #[arg(long, default_value_t = 64)]
        len: usize,
        #[arg(long)]
        fields: Option<String>,
        #[arg(long)]
        max_scale: Option<f64>,
        #[arg(long)]
        tolerances: Option<String>,
    },
    /// Close controlled sets under the relation axioms and report.
    Axioms {
        /// Generators: array of pair lists (path or inline JSON).
        #[arg(long)]
        generators: String,
        /// Carrier size (points 0..N).
        #[arg(long, default_value_t = 8)]
        points: usize,
        /// Composition depth.
        #[arg(long, default_value_t = 3)]
        depth: usize,
    },
    /// Run the band construction over a collar and report multiplicity.
    CollarCover {
        /// point | cycle:N[:scale].
        #[arg(long)]
        boundary: String,
        /// Depth levels of the discretization.
        #[arg(long, default_value_t = 64)]
        levels: usize,
        /// Boundary cover multiplicity parameter.
        #[arg(long, default_value_t = 1)]
        k: usize,
        /// Stop after this many construction steps (default: exhaust the grid).
        #[arg(long)]
        max_steps: Option<usize>,
    },
    /// Tabulate the diagonal escape function with certificates.
    Diag {
        /// zero | const:<c> | rowindex | <file of tables>.
        #[arg(long)]
        family: String,
        #[arg(long, default_value_t = 1)]
        size: usize,
        #[arg(long)]
        rmax: usize,
    },
    /// Sampled coarse-map checks.
    Maps {
        #[arg(long)]
        graph: String,
        /// identity | scale:<k> | floordiv:<k> | constant:<point> | wordhom:<imgs>.
        #[arg(long)]
        map: String,
        /// Second map for the close check.
        #[arg(long)]
        map2: Option<String>,
        /// bornologous | coarse | close.
        #[arg(long)]
        check: String,
        #[arg(long)]
        rel: String,
        #[arg(long)]
        rays: String,
        #[arg(long, default_value_t = 64)]
        len: usize,
        #[arg(long)]
        max_scale: Option<f64>,
        #[arg(long)]
        tolerances: Option<String>,
    },
}

fn execute(cli: &Cli) -> Result<(String, Value, Value), CliError> {
    match &cli.command {
        Command::Ends {
            graph,
            levels,
            horizon,
            dot,
        } => {
            let spec = read_json(graph, "--graph")?;
            let level_list = parse_u64_list(levels, "--levels")?;
            let result = run::run_ends(&spec, &level_list, horizon, dot.as_deref())?;
            let params = json!({
                "graph": spec, "levels": level_list, "horizon": horizon, "dot": dot,
            });
            Ok(("ends".into(), params, result))
        }
        Command::Delta {
            space,
            radius,
            margin,
            base_index,
        } => {
            let spec = read_json(space, "--space")?;
            let result = run::run_delta(&spec, *radius, *margin, *base_index)?;
            let params = json!({
                "space": spec, "radius": radius, "margin": margin, "base_index": base_index,
            });
            Ok(("delta".into(), params, result))
        }
        Command::Equiv {
            graph,
            rel,
            x,
            y,
            len,
            fields,
            max_scale,
            tolerances,
        } => {
            let spec = read_json(graph, "--graph")?;
            let x_spec = read_json(x, "--x")?;
            let y_spec = read_json(y, "--y")?;
            let result = run::run_equiv(
                &spec, rel, &x_spec, &y_spec, *len, fields, *max_scale, tolerances,
            )?;
            let params = json!({
                "graph": spec, "rel": rel, "x": x_spec, "y": y_spec, "len": len,
                "fields": fields, "max_scale": max_scale, "tolerances": tolerances,
            });
            Ok(("equiv".into(), params, result))
        }
        Command::SoProfile {
            graph,
            field,
            radii,
            meshes,
            horizon,
            csv,
        } => {
            let spec = read_json(graph, "--graph")?;
            let radii_list = parse_u64_list(radii, "--radii")?;
            let mesh_list = parse_u64_list(meshes, "--meshes")?;
            let result = run::run_so_profile(
                &spec,
                field,
                &radii_list,
                &mesh_list,
                *horizon,
                csv.as_deref(),
            )?;
            let params = json!({
                "graph": spec, "field": field, "radii": radii_list,
                "meshes": mesh_list, "horizon": horizon, "csv": csv,
            });
            Ok(("so-profile".into(), params, result))
        }
        Command::Corona {
            graph,
            rays,
            rel,
            len,
            fields,
            max_scale,
            tolerances,
        } => {
            let spec = read_json(graph, "--graph")?;
            let rays_spec = read_json(rays, "--rays")?;
            let result =
                run::run_corona(&spec, &rays_spec, rel, *len, fields, *max_scale, tolerances)?;
            let params = json!({
                "graph": spec, "rays": rays_spec, "rel": rel, "len": len,
                "fields": fields, "max_scale": max_scale, "tolerances": tolerances,
            });
            Ok(("corona".into(), params, result))
        }
        Command::Axioms {
            generators,
            points,
            depth,
        } => {
            let spec = read_json(generators, "--generators")?;
            let result = run::run_axioms(&spec, *points, *depth)?;
            let params = json!({ "generators": spec, "points": points, "depth": depth });
            Ok(("axioms".into(), params, result))
        }
        Command::CollarCover {
            boundary,
            levels,
            k,
            max_steps,
        } => {
            let result = run::run_collar_cover(boundary, *levels, *k, *max_steps)?;
            let params = json!({
                "boundary": boundary, "levels": levels, "k": k, "max_steps": max_steps,
            });
            Ok(("collar-cover".into(), params, result))
        }
        Command::Diag { family, size, rmax } => {
            let result = run::run_diag(family, *size, *rmax)?;
            let params = json!({ "family": family, "size": size, "rmax": rmax });
            Ok(("diag".into(), params, result))
        }
        Command::Maps {
            graph,
            map,
            map2,
            check,
            rel,
            rays,
            len,
            max_scale,
            tolerances,
        } => {
            let spec = read_json(graph, "--graph")?;
            let rays_spec = read_json(rays, "--rays")?;
            let result = run::run_maps(
                &spec, map, map2, check, rel, &rays_spec, *len, *max_scale, tolerances,
            )?;
            let params = json!({
                "graph": spec, "map": map, "map2": map2, "check": check, "rel": rel,
                "rays": rays_spec, "len": len, "max_scale": max_scale, "tolerances": tolerances,
            });
            Ok(("maps".into(), params, result))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    match execute(&cli) {
        Ok((command, params, result)) => {
            let report = json!({
                "command": command,
                "params": params,
                "seed": cli.seed,
                "sampling": "deterministic",
                "result": result,
            });
            let text = serde_json::to_string_pretty(&report).expect("report serializes");
            match &cli.output {
                Some(path) => {
                    if let Err(e) = std::fs::write(path, format!("{text}\n")) {
                        eprintln!("cannot write {path}: {e}");
                        return ExitCode::from(2);
                    }
                }
                None => println!("{text}"),
            }
            eprintln!("completed in {} ms", start.elapsed().as_millis());
            ExitCode::SUCCESS
        }
        Err(CliError::Schema { field, message }) => {
            eprintln!("config error at `{field}`: {message}");
            ExitCode::from(2)
        }
        Err(CliError::Op(e)) => {
            eprintln!("{e}");
            ExitCode::from(1)
        }
    }
}
