use strikebench::eval::write_predictions;
use strikebench::recurrency::{predict_split, tune_recurrency, RecurrencyConfig, RecurrencyGrid};
use strikebench::tkg::{Split, TemporalIndex};
use strikebench::{Error, Result};

use crate::args::RecurrencyArgs;
use crate::config::{self, parse_float_list, FileDefaults};
use crate::manifest::RunManifest;

pub fn run(args: RecurrencyArgs) -> Result<()> {
    let mut manifest = RunManifest::new("predict-recurrency");
    let file = FileDefaults::load(args.common.config.as_deref())?;
    let dir = config::data_dir(&args.common)?;
    let spec = config::format_spec(&args.common, &file);
    let split = super::parse_split(args.split.as_deref())?;

    let default_grid = RecurrencyGrid::default();
    let grid = RecurrencyGrid {
        xi: match &args.grid_xi {
            Some(s) => parse_float_list(s)?,
            None => default_grid.xi,
        },
        kappa: match &args.grid_kappa {
            Some(s) => parse_float_list(s)?,
            None => default_grid.kappa,
        },
    };

    manifest
        .arg("data_dir", dir.display().to_string())
        .arg("out", args.out.display().to_string())
        .arg("split", split.as_str())
        .arg("time_divisor", spec.time_divisor);
    manifest.dataset_inputs(&dir)?;

    let dataset = super::load_augmented(&dir, &spec)?;
    let truth = TemporalIndex::build(&dataset, &Split::ALL)?;

    let (best, scan) = match (args.xi, args.kappa) {
        (Some(xi), Some(kappa)) => {
            let cfg = RecurrencyConfig {
                decay_xi: xi,
                mix_kappa: kappa,
            };
            cfg.validate()?;
            (cfg, Vec::new())
        }
        (None, None) => {
            let tuning_history = TemporalIndex::build(&dataset, &[Split::Train, Split::Valid])?;
            tune_recurrency(
                dataset.raw_split(Split::Valid),
                &tuning_history,
                &truth,
                &grid,
            )?
        }
        _ => {
            return Err(Error::Config(
                "pass both --xi and --kappa to skip tuning, or neither".to_owned(),
            ))
        }
    };
    manifest
        .arg("xi", best.decay_xi)
        .arg("kappa", best.mix_kappa);

    // Head-direction queries on the valid split must not see test facts;
    // the strictly-before-t window makes the full index safe for test
    // queries, but valid queries get the narrower one.
    let history = match split {
        Split::Valid => TemporalIndex::build(&dataset, &[Split::Train, Split::Valid])?,
        _ => truth,
    };
    let predictions = predict_split(dataset.raw_split(split), &history, &best, "recurrency")?;
    write_predictions(&args.out, &predictions)?;
    println!(
        "recurrency (xi {}, kappa {}) predicted {} query-directions of the {split} split → {}",
        best.decay_xi,
        best.mix_kappa,
        predictions.len(),
        args.out.display()
    );
    if let Some(scan_out) = &args.scan_out {
        std::fs::write(scan_out, serde_json::to_string_pretty(&scan)?)?;
    }
    manifest.write_for(&args.out)
}
