use strikebench::rules::{mine_rules, write_rules, MiningConfig};
use strikebench::tkg::{Split, TemporalIndex};
use strikebench::Result;

use crate::args::MineArgs;
use crate::config::{self, FileDefaults};
use crate::manifest::RunManifest;

pub fn run(args: MineArgs) -> Result<()> {
    let mut manifest = RunManifest::new("mine-rules");
    let file = FileDefaults::load(args.common.config.as_deref())?;
    let dir = config::data_dir(&args.common)?;
    let spec = config::format_spec(&args.common, &file);

    let builtin = MiningConfig::default();
    let mining = MiningConfig {
        tau: args.tau.or(file.tau).unwrap_or(builtin.tau),
        min_body_support: args
            .min_body_support
            .or(file.min_body_support)
            .unwrap_or(builtin.min_body_support),
        sample_cap: args.sample_cap.or(file.sample_cap),
        seed: args.seed.or(file.seed).unwrap_or(builtin.seed),
    };
    manifest
        .arg("data_dir", dir.display().to_string())
        .arg("out", args.out.display().to_string())
        .arg("tau", mining.tau)
        .arg("min_body_support", mining.min_body_support)
        .arg("sample_cap", mining.sample_cap)
        .arg("seed", mining.seed)
        .arg("time_divisor", spec.time_divisor);
    manifest.dataset_inputs(&dir)?;

    let dataset = super::load_augmented(&dir, &spec)?;
    let train = TemporalIndex::build(&dataset, &[Split::Train])?;
    let rules = mine_rules(&train, &mining)?;
    write_rules(&args.out, &rules)?;
    println!(
        "mined {} rules (tau {}, min body support {}) → {}",
        rules.len(),
        mining.tau,
        mining.min_body_support,
        args.out.display()
    );
    manifest.write_for(&args.out)
}
