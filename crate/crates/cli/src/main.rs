use std::fs;
use std::io::Read;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use mosaic_core::analysis::analyze;
use mosaic_core::exec::Execution;
use mosaic_core::identify::{Catalog, FingerprintIndex};
use mosaic_core::pipeline::{best_per_knot, compare_layouts, read_hits, report_table, run_pipeline, verify, RunConfig};
use mosaic_core::tile::parse_matrix;
use mosaic_service::ServiceConfig;

#[derive(Parser)]
#[command(name = "mosaic", version, about = "Enumerate, identify and tabulate knot mosaics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct CatalogArgs {
    /// Knot catalog file (`name;crossing_number;PD[...]`); built-in if omitted.
    #[arg(long)]
    catalog: Option<PathBuf>,
    /// Directory for fingerprint caches.
    #[arg(long, env = "MOSAIC_CACHE_DIR")]
    cache_dir: Option<PathBuf>,
    /// Run on one thread.
    #[arg(long)]
    sequential: bool,
}

impl CatalogArgs {
    fn execution(&self) -> Execution {
        if self.sequential {
            Execution::Sequential
        } else {
            Execution::Parallel
        }
    }

    fn index(&self) -> Result<FingerprintIndex> {
        let catalog = match &self.catalog {
            Some(p) => Catalog::load(p).with_context(|| format!("loading catalog {}", p.display()))?,
            None => Catalog::builtin().clone(),
        };
        Ok(match &self.cache_dir {
            Some(dir) => FingerprintIndex::load_or_build(&catalog, dir, self.execution())?,
            None => FingerprintIndex::build(&catalog, self.execution())?,
        })
    }
}

#[derive(Subcommand)]
enum Command {
    /// Search every filling of a layout and append prime hits to a store.
    Run {
        #[arg(long)]
        layout: PathBuf,
        /// Minimum number of crossing tiles among the wildcards.
        #[arg(long, default_value_t = 0)]
        min_crossings: usize,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1)]
        shards: u64,
        #[arg(long, default_value_t = 0)]
        shard_index: u64,
        /// Continue from this shard's checkpoint.
        #[arg(long)]
        resume: bool,
        /// Prefixes searched between checkpoints.
        #[arg(long, default_value_t = 4096)]
        checkpoint_every: u64,
        #[command(flatten)]
        catalog: CatalogArgs,
    },
    /// Print the table of knots by mosaic size and tile count.
    Report {
        #[arg(long)]
        store: PathBuf,
        /// Print the per-knot summaries as JSON instead.
        #[arg(long)]
        json: bool,
    },
    /// Compare the knots found in two stores.
    Compare {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
    },
    /// Re-trace and re-identify every stored hit.
    Verify {
        #[arg(long)]
        store: PathBuf,
        #[command(flatten)]
        catalog: CatalogArgs,
    },
    /// Identify the knot drawn by a mosaic matrix (`-` reads stdin).
    Identify {
        #[arg(long)]
        matrix: PathBuf,
        #[command(flatten)]
        catalog: CatalogArgs,
    },
    /// Serve the HTTP API.
    Serve {
        #[arg(long, env = "MOSAIC_BIND", default_value = "127.0.0.1:8080")]
        bind: SocketAddr,
        #[arg(long, env = "MOSAIC_STORE")]
        store: Option<PathBuf>,
        #[arg(long, env = "MOSAIC_CATALOG")]
        catalog: Option<PathBuf>,
        #[arg(long, env = "MOSAIC_CACHE_DIR")]
        cache_dir: Option<PathBuf>,
        #[arg(long, env = "MOSAIC_MAX_N", default_value_t = mosaic_service::DEFAULT_MAX_N)]
        max_n: usize,
        /// Directory of static files (the editor bundle).
        #[arg(long, env = "MOSAIC_STATIC_DIR")]
        static_dir: Option<PathBuf>,
    },
}

fn read_input(path: &Path) -> Result<String> {
    if path == Path::new("-") {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        return Ok(s);
    }
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Run { layout, min_crossings, out, shards, shard_index, resume, checkpoint_every, catalog } => {
            if shard_index >= shards {
                bail!("--shard-index must be below --shards");
            }
            let config = RunConfig {
                min_crossings,
                shard_index,
                shard_total: shards,
                catalog: catalog.catalog.clone(),
                cache_dir: catalog.cache_dir.clone(),
                execution: catalog.execution(),
                resume,
                checkpoint_every,
                ..RunConfig::new(layout, out)
            };
            let stats = run_pipeline(&config)?;
            println!("{}", serde_json::to_string_pretty(&stats)?);
        }
        Command::Report { store, json } => {
            let summaries = best_per_knot(&read_hits(&store)?);
            if json {
                println!("{}", serde_json::to_string_pretty(&summaries)?);
            } else {
                print!("{}", report_table(&summaries)?);
            }
        }
        Command::Compare { a, b } => {
            let cmp = compare_layouts(&read_hits(&a)?, &read_hits(&b)?);
            println!("{}", serde_json::to_string_pretty(&cmp)?);
        }
        Command::Verify { store, catalog } => {
            let hits = read_hits(&store)?;
            let report = verify(&hits, &catalog.index()?, catalog.execution());
            println!("{}", serde_json::to_string_pretty(&report)?);
            if !report.is_clean() {
                bail!("{} of {} hits did not re-identify", report.mismatches.len(), report.checked);
            }
        }
        Command::Identify { matrix, catalog } => {
            let grid = parse_matrix(&read_input(&matrix)?)?;
            let analysis = analyze(&grid, &catalog.index()?);
            println!("{}", serde_json::to_string_pretty(&analysis)?);
        }
        Command::Serve { bind, store, catalog, cache_dir, max_n, static_dir } => {
            tracing_subscriber::fmt().with_env_filter(
                tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "info".into()),
            ).init();
            mosaic_service::serve_blocking(ServiceConfig { bind, store, catalog, cache_dir, max_n, static_dir })?;
        }
    }
    Ok(())
}
