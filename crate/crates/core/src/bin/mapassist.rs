use std::fs;
use std::io::Write;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand};
use serde_json::json;

use mapassist::field::{
    extract_peaks, rasterize_gt_field, read_field, write_field, FieldGrid, DEFAULT_BUCKETS,
    DEFAULT_CELL_SIZE, DEFAULT_LABEL_DISTANCE, DEFAULT_MATCH_THRESH,
};
use mapassist::io::{read_any, write_geojson, write_graph};
use mapassist::metrics::{rge, topo_compare, TopoParams, DEFAULT_RGE_SPACING};
use mapassist::prune::{grid_cluster, prune_major, PruneParams};
use mapassist::search::{SearchParams, SearchState};
use mapassist::server::{self, SessionStore};
use mapassist::teleport::{score_components, DEFAULT_LAMBDA};
use mapassist::RoadGraph;

#[derive(Parser)]
#[command(version, about = "Machine-assisted road map editing")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Rasterize a ground-truth road graph into a direction field.
    GenField {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = DEFAULT_CELL_SIZE)]
        cell_size: f64,
        #[arg(long, default_value_t = DEFAULT_BUCKETS)]
        buckets: usize,
        /// Look-ahead distance along the road, meters.
        #[arg(long, default_value_t = DEFAULT_LABEL_DISTANCE)]
        distance: f64,
        #[arg(long, default_value_t = DEFAULT_MATCH_THRESH)]
        match_thresh: f64,
        /// Extra field margin around the graph, meters.
        #[arg(long, default_value_t = 40.0)]
        margin: f64,
    },
    /// Trace roads through a direction field.
    Infer {
        #[arg(long)]
        field: PathBuf,
        /// Existing map to extend; without it the search starts from field peaks.
        #[arg(long)]
        base: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        /// Step length D, meters.
        #[arg(long, default_value_t = DEFAULT_LABEL_DISTANCE)]
        step: f64,
        /// Extension threshold T.
        #[arg(long, default_value_t = 0.4)]
        threshold: f32,
        /// Write the base map together with the inferred roads.
        #[arg(long)]
        full: bool,
    },
    /// Keep major roads via shortest paths between far-apart clusters.
    Prune {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Cluster cell size, meters.
        #[arg(long = "r", default_value_t = 1000.0)]
        cell_size: f64,
        #[arg(long = "min-cell", default_value_t = 10)]
        min_cell: usize,
        /// Minimum distance between paired cluster centers, meters.
        #[arg(long = "R", default_value_t = 5000.0)]
        min_separation: f64,
        #[arg(long, default_value_t = 500.0)]
        trim: f64,
    },
    /// Rank inferred components for teleport validation.
    Rank {
        #[arg(long)]
        inferred: PathBuf,
        #[arg(long)]
        base: PathBuf,
        #[arg(long, default_value_t = DEFAULT_LAMBDA)]
        lambda: f64,
    },
    /// TOPO precision and recall of an inferred map against ground truth.
    EvalTopo {
        #[arg(long)]
        inferred: PathBuf,
        #[arg(long)]
        truth: PathBuf,
        /// Per-origin CSV table.
        #[arg(long)]
        table: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Road geometry error of added roads against ground truth.
    EvalRge {
        #[arg(long)]
        inferred: PathBuf,
        #[arg(long)]
        truth: PathBuf,
        #[arg(long, default_value_t = DEFAULT_RGE_SPACING)]
        spacing: f64,
    },
    /// Run the validation session server.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "sessions")]
        data_dir: PathBuf,
    },
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Field(#[from] mapassist::field::FieldError),
    #[error("{path}: {source}")]
    Graph {
        path: PathBuf,
        source: mapassist::io::IoError,
    },
    #[error("{0}")]
    Other(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Field(e) => e.code() as u8,
            _ => 1,
        }
    }
}

fn other(e: impl std::fmt::Display) -> CliError {
    CliError::Other(e.to_string())
}

fn load(path: &Path) -> Result<RoadGraph, CliError> {
    read_any(path).map_err(|source| CliError::Graph {
        path: path.to_path_buf(),
        source,
    })
}

fn save(g: &RoadGraph, path: &Path) -> Result<(), CliError> {
    let written = match path.extension().and_then(|e| e.to_str()) {
        Some("geojson") => write_geojson(g, path),
        _ => write_graph(g, path),
    };
    written.map_err(|source| CliError::Graph {
        path: path.to_path_buf(),
        source,
    })
}

fn run(cmd: Command) -> Result<(), CliError> {
    match cmd {
        Command::GenField {
            graph,
            out,
            cell_size,
            buckets,
            distance,
            match_thresh,
            margin,
        } => {
            let g = load(&graph)?;
            let bbox = g.bbox().ok_or_else(|| other("graph has no vertices"))?;
            let grid = FieldGrid::covering(bbox, cell_size, buckets, margin)?;
            let field = rasterize_gt_field(&g, grid, distance, match_thresh);
            write_field(&field, &out)?;
            println!(
                "{}",
                json!({"width": grid.width, "height": grid.height, "buckets": grid.buckets,
                       "labelled_cells": field.nonzero_cells()})
            );
        }
        Command::Infer {
            field,
            base,
            out,
            step,
            threshold,
            full,
        } => {
            let field = read_field(&field)?;
            let params = SearchParams::new(step, threshold);
            let outcome = match base {
                Some(path) => {
                    let base = load(&path)?;
                    SearchState::from_basemap(&field, &base, params).map_err(other)?.run()
                }
                None => {
                    let seeds: Vec<_> = extract_peaks(&field, threshold, 2.0 * step)
                        .into_iter()
                        .map(|p| p.point)
                        .collect();
                    SearchState::from_seeds(&field, &seeds, Default::default(), params)
                        .map_err(other)?
                        .run()
                }
            };
            let inferred = outcome.inferred();
            save(if full { &outcome.graph } else { &inferred }, &out)?;
            println!(
                "{}",
                json!({"inferred_edges": inferred.num_edges(), "length_m": inferred.total_length(),
                       "stats": outcome.stats})
            );
        }
        Command::Prune {
            input,
            out,
            cell_size,
            min_cell,
            min_separation,
            trim,
        } => {
            let g = load(&input)?;
            let params = PruneParams {
                cell_size,
                min_cell_vertices: min_cell,
                min_separation,
                trim,
            };
            let centers = grid_cluster(&g, &params);
            let pruned = prune_major(&g, &centers, &params).map_err(other)?;
            save(&pruned.graph, &out)?;
            println!(
                "{}",
                json!({"centers": centers.len(), "paths": pruned.paths, "kept_edges": pruned.major.len(),
                       "input_edges": g.num_edges(), "warning": pruned.warning})
            );
        }
        Command::Rank {
            inferred,
            base,
            lambda,
        } => {
            let ranked = score_components(&load(&inferred)?, &load(&base)?, lambda);
            for (k, r) in ranked.iter().enumerate() {
                println!(
                    "{}",
                    json!({"rank": k, "score": r.score, "area": r.area, "conn": r.conn,
                           "vertices": r.component.num_vertices(), "bbox": r.bbox})
                );
            }
        }
        Command::EvalTopo {
            inferred,
            truth,
            table,
            seed,
        } => {
            let params = TopoParams {
                seed,
                ..TopoParams::default()
            };
            let r = topo_compare(&load(&inferred)?, &load(&truth)?, &params).map_err(other)?;
            if let Some(path) = table {
                write_origin_table(&path, &r.origins).map_err(other)?;
            }
            println!(
                "{}",
                json!({"precision": r.precision, "recall": r.recall, "f1": r.f1(),
                       "origins": r.origins.len()})
            );
        }
        Command::EvalRge {
            inferred,
            truth,
            spacing,
        } => {
            let r = rge(&load(&inferred)?, &load(&truth)?, spacing).map_err(other)?;
            println!("{}", json!(r));
        }
        Command::Serve { port, data_dir } => {
            let store = Arc::new(SessionStore::open(&data_dir).map_err(other)?);
            let addr = SocketAddr::from(([0, 0, 0, 0], port));
            let rt = tokio::runtime::Runtime::new().map_err(other)?;
            rt.block_on(server::serve(addr, store)).map_err(other)?;
        }
    }
    Ok(())
}

fn write_origin_table(path: &Path, origins: &[mapassist::metrics::OriginResult]) -> std::io::Result<()> {
    let mut f = std::io::BufWriter::new(fs::File::create(path)?);
    writeln!(f, "source,x,y,matched,truth_marbles,inferred_marbles,matched_marbles")?;
    for o in origins {
        let source = serde_json::to_value(o.source).expect("origin source serializes");
        writeln!(
            f,
            "{},{:.3},{:.3},{},{},{},{}",
            source.as_str().unwrap_or_default(),
            o.x,
            o.y,
            o.matched,
            o.truth_marbles,
            o.inferred_marbles,
            o.matched_marbles
        )?;
    }
    f.flush()
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse().command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            log::error!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}
