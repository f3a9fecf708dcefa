use strikebench::eval::{
    aggregate, group_by_strikingness, read_predictions, write_bins_csv, write_rank_table,
    EvalReport, MetricBundle, RankingContext, TiePolicy,
};
use strikebench::rsmf::read_table;
use strikebench::tkg::{Split, TemporalIndex};
use strikebench::Result;

use crate::args::EvaluateArgs;
use crate::config::{self, FileDefaults};
use crate::manifest::RunManifest;

fn print_bundle(label: &str, m: &MetricBundle) {
    let cell = |v: Option<f64>| match v {
        Some(v) => format!("{:6.2}", v * 100.0),
        None => "    --".to_owned(),
    };
    println!(
        "  {label:<4} MRR {}  H@1 {}  H@3 {}  H@10 {}",
        cell(m.mrr),
        cell(Some(m.hits1)),
        cell(Some(m.hits3)),
        cell(Some(m.hits10))
    );
}

pub fn run(args: EvaluateArgs) -> Result<()> {
    let mut manifest = RunManifest::new("evaluate");
    let file = FileDefaults::load(args.common.config.as_deref())?;
    let dir = config::data_dir(&args.common)?;
    let spec = config::format_spec(&args.common, &file);
    let split = super::parse_split(args.split.as_deref())?;
    let b = args.b.or(file.b).unwrap_or(0.1);
    let tie_policy: TiePolicy = args
        .tie_policy
        .as_deref()
        .or(file.tie_policy.as_deref())
        .unwrap_or("realistic")
        .parse()?;
    let group_width = args.group_width.or(file.group_width).unwrap_or(0.1);

    manifest
        .arg("data_dir", dir.display().to_string())
        .arg("preds", args.preds.display().to_string())
        .arg("out", args.out.display().to_string())
        .arg("split", split.as_str())
        .arg("b", b)
        .arg("tie_policy", tie_policy.as_str())
        .arg("group_width", group_width)
        .arg("time_divisor", spec.time_divisor);
    manifest.dataset_inputs(&dir)?;
    manifest.input(&args.preds)?;

    let dataset = super::load_augmented(&dir, &spec)?;
    let truth = TemporalIndex::build(&dataset, &Split::ALL)?;
    let predictions = read_predictions(&args.preds)?;
    let sk_table = match &args.sk {
        Some(path) => {
            manifest.input(path)?;
            Some(read_table(path)?)
        }
        None => None,
    };

    let context = RankingContext {
        queries: dataset.raw_split(split),
        truth: &truth,
        entity_count: dataset.entity_count,
        tie_policy,
    };
    let jobs = args.jobs.or(file.jobs).unwrap_or(0);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs) // 0 = all cores
        .build()
        .map_err(|e| strikebench::Error::Config(e.to_string()))?;
    let table = pool.install(|| context.rank_predictions(&predictions, sk_table.as_ref()))?;
    let mut report: EvalReport = aggregate(&table, b)?;

    println!(
        "model {} on the {split} split ({} query-directions, {} ties, b = {b}):",
        report.model_name, report.query_directions, tie_policy
    );
    print_bundle("ORG", &report.org);
    if let Some(sk) = &report.sk {
        print_bundle("SK", sk);
        if let Some(delta) = &report.delta {
            let cell = |v: Option<f64>| match v {
                Some(v) => format!("{:5.1}%", v * 100.0),
                None => "   --".to_owned(),
            };
            println!(
                "  Δ    MRR {}  H@1 {}  H@3 {}  H@10 {}",
                cell(delta.mrr),
                cell(delta.hits1),
                cell(delta.hits3),
                cell(delta.hits10)
            );
        }
    } else {
        println!("  SK   metrics unavailable (no strikingness table given)");
    }

    if sk_table.is_some() {
        let bins = group_by_strikingness(&table, group_width)?;
        if let Some(bins_out) = &args.bins_out {
            write_bins_csv(bins_out, &bins)?;
            println!("per-bin metrics → {}", bins_out.display());
        }
        report.bins = Some(bins);
    }
    if let Some(ranks_out) = &args.ranks_out {
        write_rank_table(ranks_out, &table)?;
        println!("rank table → {}", ranks_out.display());
    }

    std::fs::write(&args.out, serde_json::to_string_pretty(&report)?)?;
    println!("report → {}", args.out.display());
    manifest.write_for(&args.out)
}
