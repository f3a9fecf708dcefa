use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use strikebench::eval::{
    group_by_strikingness, group_significance, n_model_hits, neighborhood_overlap, read_rank_table,
    write_bins_csv, RankTable, SignificanceResult,
};
use strikebench::tkg::{Direction, Split, TemporalIndex};
use strikebench::{Error, Result};

use crate::args::ReportArgs;
use crate::config::{self, parse_window, FileDefaults};
use crate::manifest::RunManifest;

#[derive(Debug, Serialize)]
struct SignificanceReport {
    model: String,
    low_threshold: f64,
    high_threshold: f64,
    low_count: usize,
    high_count: usize,
    hits1: SignificanceResult,
    hits3: SignificanceResult,
    reciprocal_rank: SignificanceResult,
}

fn significance_for(table: &RankTable, low: f64, high: f64) -> Result<SignificanceReport> {
    let mut low_rows = Vec::new();
    let mut high_rows = Vec::new();
    for row in &table.rows {
        let sk = row.sk.ok_or_else(|| {
            Error::Validation("significance analysis needs strikingness values".to_owned())
        })?;
        if sk < low {
            low_rows.push(row);
        } else if sk > high {
            high_rows.push(row);
        }
    }
    if low_rows.is_empty() || high_rows.is_empty() {
        return Err(Error::Validation(format!(
            "empty strikingness group (sk < {low}: {}, sk > {high}: {})",
            low_rows.len(),
            high_rows.len()
        )));
    }
    let values = |rows: &[&strikebench::eval::RankRow], f: &dyn Fn(u64) -> f64| -> Vec<f64> {
        rows.iter().map(|r| f(r.rank)).collect()
    };
    let hits = |k: u64| {
        let f = move |rank: u64| if rank <= k { 1.0 } else { 0.0 };
        group_significance(&values(&low_rows, &f), &values(&high_rows, &f))
    };
    let rr = |rank: u64| 1.0 / rank as f64;
    Ok(SignificanceReport {
        model: table.model_name.clone(),
        low_threshold: low,
        high_threshold: high,
        low_count: low_rows.len(),
        high_count: high_rows.len(),
        hits1: hits(1)?,
        hits3: hits(3)?,
        reciprocal_rank: group_significance(&values(&low_rows, &rr), &values(&high_rows, &rr))?,
    })
}

fn sanitized(name: &str) -> String {
    name.chars()
        .map(|c| {
            if c.is_alphanumeric() || c == '-' || c == '_' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

fn write_nmodel_csv(path: &Path, tables: &[&RankTable], k: u64) -> Result<()> {
    let mut w = BufWriter::new(std::fs::File::create(path)?);
    writeln!(w, "n,k,fraction")?;
    for n in 1..=tables.len() {
        let fraction = n_model_hits(tables, n, k)?;
        writeln!(w, "{n},{k},{fraction:.6}")?;
    }
    w.flush()?;
    Ok(())
}

pub fn run(args: ReportArgs) -> Result<()> {
    let mut manifest = RunManifest::new("report");
    let file = FileDefaults::load(args.common.config.as_deref())?;
    let group_width = args.group_width.or(file.group_width).unwrap_or(0.1);
    let nmodel_k = args.nmodel_k.unwrap_or(3);
    std::fs::create_dir_all(&args.out_dir)?;

    manifest
        .arg("out_dir", args.out_dir.display().to_string())
        .arg("group_width", group_width)
        .arg("nmodel_k", nmodel_k);
    for path in &args.ranks {
        manifest.input(path)?;
    }

    let tables: Vec<RankTable> = args
        .ranks
        .iter()
        .map(|p| read_rank_table(p))
        .collect::<Result<_>>()?;

    // Per-model strikingness-bin CSVs.
    for table in &tables {
        if table.rows.iter().all(|r| r.sk.is_some()) {
            let bins = group_by_strikingness(table, group_width)?;
            let path = args
                .out_dir
                .join(format!("{}_bins.csv", sanitized(&table.model_name)));
            write_bins_csv(&path, &bins)?;
            println!("{} → {}", table.model_name, path.display());
        } else {
            println!(
                "{}: no strikingness values, skipping bin grouping",
                table.model_name
            );
        }
    }

    // Multi-model intersection.
    if tables.len() >= 2 {
        let refs: Vec<&RankTable> = tables.iter().collect();
        let path = args.out_dir.join("nmodel_hits.csv");
        write_nmodel_csv(&path, &refs, nmodel_k)?;
        println!("n-model intersection → {}", path.display());
    }

    // Significance between low- and high-strikingness groups.
    if let Some(spec) = &args.significance {
        let parts = config::parse_float_list(spec)?;
        if parts.len() != 2 || parts[0] >= parts[1] {
            return Err(Error::Config(format!(
                "--significance needs \"low,high\" with low < high, got {spec:?}"
            )));
        }
        manifest.arg("significance", [parts[0], parts[1]]);
        let reports: Vec<SignificanceReport> = tables
            .iter()
            .map(|t| significance_for(t, parts[0], parts[1]))
            .collect::<Result<_>>()?;
        let path = args.out_dir.join("significance.json");
        std::fs::write(&path, serde_json::to_string_pretty(&reports)?)?;
        println!("significance tests → {}", path.display());
    }

    // Per-query neighborhood overlap.
    if args.nof {
        let dir = config::data_dir(&args.common)?;
        let spec = config::format_spec(&args.common, &file);
        let split = super::parse_split(args.split.as_deref())?;
        let window = match args.window.as_deref() {
            Some(s) => parse_window(s)?,
            None => file.window()?.unwrap_or(None),
        };
        manifest.arg("data_dir", dir.display().to_string());
        manifest.arg("window", window);
        manifest.dataset_inputs(&dir)?;
        let dataset = super::load_augmented(&dir, &spec)?;
        let scope: Vec<Split> = Split::ALL.iter().copied().filter(|&s| s <= split).collect();
        let history = TemporalIndex::build(&dataset, &scope)?;
        let path = args.out_dir.join("nof.tsv");
        let mut w = BufWriter::new(std::fs::File::create(&path)?);
        for (i, q) in dataset.raw_split(split).iter().enumerate() {
            let no = neighborhood_overlap(q, &history, window);
            for direction in Direction::BOTH {
                writeln!(w, "{i}\t{direction}\t{no:.10}")?;
            }
        }
        w.flush()?;
        println!("neighborhood overlap → {}", path.display());
    }

    manifest.write_for(&args.out_dir)
}
