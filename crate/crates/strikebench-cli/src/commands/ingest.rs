use strikebench::tkg::{load_dataset, save_dataset, Split};
use strikebench::Result;

use crate::args::IngestArgs;
use crate::config::{self, FileDefaults};
use crate::manifest::RunManifest;

pub fn run(args: IngestArgs) -> Result<()> {
    let mut manifest = RunManifest::new("ingest");
    let file = FileDefaults::load(args.common.config.as_deref())?;
    let dir = config::data_dir(&args.common)?;
    let spec = config::format_spec(&args.common, &file);
    manifest
        .arg("data_dir", dir.display().to_string())
        .arg("out", args.out.display().to_string())
        .arg("time_divisor", spec.time_divisor)
        .arg("granularity", &spec.granularity);
    manifest.dataset_inputs(&dir)?;

    let dataset = load_dataset(&dir, &spec)?;
    println!(
        "loaded {}: {} entities, {} relations, granularity {}",
        dir.display(),
        dataset.entity_count,
        dataset.relation_count,
        dataset.granularity
    );
    for split in Split::ALL {
        let facts = dataset.split(split);
        let t_lo = facts.iter().map(|q| q.timestamp).min().unwrap();
        let t_hi = facts.iter().map(|q| q.timestamp).max().unwrap();
        println!("  {split}: {} facts, t ∈ [{t_lo}, {t_hi}]", facts.len());
    }
    save_dataset(&dataset, &args.out)?;
    println!("normalized dataset written to {}", args.out.display());
    manifest.write_for(&args.out)
}
