use strikebench::baselines::{
    baseline_header, batch_baseline, BaselineMeasure, PairFrequencyTable,
};
use strikebench::rsmf::{batch_strikingness, write_table, SkTableHeader, StrikingnessTable};
use strikebench::rules::read_rules;
use strikebench::tkg::{Split, TemporalIndex};
use strikebench::{Error, Result};

use crate::args::StrikingnessArgs;
use crate::config::{self, FileDefaults, HistoryScope};
use crate::manifest::RunManifest;

pub fn run(args: StrikingnessArgs) -> Result<()> {
    let mut manifest = RunManifest::new("strikingness");
    let file = FileDefaults::load(args.common.config.as_deref())?;
    let dir = config::data_dir(&args.common)?;
    let spec = config::format_spec(&args.common, &file);
    let split = super::parse_split(args.split.as_deref())?;
    let cfg = config::rsmf_config(
        args.window.as_deref(),
        args.lambda,
        args.alpha.as_deref(),
        &file,
    )?;
    let scope: HistoryScope = args
        .history_scope
        .as_deref()
        .or(file.history_scope.as_deref())
        .unwrap_or("all-before-t")
        .parse()?;
    let measure = args.measure.as_deref().unwrap_or("rsmf");
    let lambda_temp = args.lambda_temp.or(file.lambda_temp).unwrap_or(0.005);
    let jobs = args.jobs.or(file.jobs).unwrap_or(0);

    manifest
        .arg("data_dir", dir.display().to_string())
        .arg("out", args.out.display().to_string())
        .arg("split", split.as_str())
        .arg("measure", measure)
        .arg("window", cfg.window)
        .arg("lambda", cfg.lambda)
        .arg(
            "alpha",
            [cfg.alpha.subject, cfg.alpha.object, cfg.alpha.relation],
        )
        .arg("history_scope", scope.as_str())
        .arg("lambda_temp", lambda_temp)
        .arg("jobs", jobs)
        .arg("time_divisor", spec.time_divisor);
    manifest.dataset_inputs(&dir)?;

    let dataset = super::load_augmented(&dir, &spec)?;
    // Restrict the visible splits to the query split's past.
    let scope_splits: Vec<Split> = scope
        .splits()
        .iter()
        .copied()
        .filter(|&s| scope == HistoryScope::TrainOnly || s <= split)
        .collect();
    let history = TemporalIndex::build(&dataset, &scope_splits)?;
    let queries = dataset.raw_split(split);

    let table = match measure {
        "rsmf" => {
            let rules_path = args
                .rules
                .as_ref()
                .ok_or_else(|| Error::Config("the rsmf measure needs --rules".to_owned()))?;
            manifest.input(rules_path)?;
            let rules = read_rules(rules_path)?;
            let records = batch_strikingness(queries, &rules, &history, &cfg, jobs);
            StrikingnessTable {
                header: SkTableHeader::rsmf(&cfg, Some(rules.min_confidence), scope.as_str()),
                records,
            }
        }
        "freq_inv" => {
            let freq = PairFrequencyTable::build(dataset.split(Split::Train));
            let records = batch_baseline(
                queries,
                BaselineMeasure::FreqInv,
                Some(&freq),
                &history,
                lambda_temp,
            )?;
            StrikingnessTable {
                header: baseline_header(
                    BaselineMeasure::FreqInv,
                    lambda_temp,
                    cfg.window,
                    scope.as_str(),
                ),
                records,
            }
        }
        "temp_inv" => {
            let records = batch_baseline(
                queries,
                BaselineMeasure::TempInv,
                None,
                &history,
                lambda_temp,
            )?;
            StrikingnessTable {
                header: baseline_header(
                    BaselineMeasure::TempInv,
                    lambda_temp,
                    cfg.window,
                    scope.as_str(),
                ),
                records,
            }
        }
        other => {
            return Err(Error::Config(format!(
                "unknown measure {other:?} (expected rsmf, freq_inv, or temp_inv)"
            )))
        }
    };

    write_table(&args.out, &table)?;
    println!(
        "scored {} query-directions of the {split} split with {measure} → {}",
        table.records.len(),
        args.out.display()
    );
    manifest.write_for(&args.out)
}
