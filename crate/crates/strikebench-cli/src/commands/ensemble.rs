use strikebench::ensemble::{
    combine_prediction_sets, search_eta, EnsembleConfig, ScoreNormalization, SearchMetric,
};
use strikebench::eval::{read_predictions, write_predictions, RankingContext, TiePolicy};
use strikebench::rsmf::read_table;
use strikebench::tkg::{Split, TemporalIndex};
use strikebench::Result;

use crate::args::EnsembleArgs;
use crate::config::{self, FileDefaults};
use crate::manifest::RunManifest;

pub fn run(args: EnsembleArgs) -> Result<()> {
    let mut manifest = RunManifest::new("ensemble");
    let file = FileDefaults::load(args.common.config.as_deref())?;
    let dir = config::data_dir(&args.common)?;
    let spec = config::format_spec(&args.common, &file);
    let metric: SearchMetric = args.metric.as_deref().unwrap_or("mrr").parse()?;
    let normalization: ScoreNormalization = args
        .norm
        .as_deref()
        .or(file.norm.as_deref())
        .unwrap_or("minmax")
        .parse()?;
    let grid_step = args.grid_step.or(file.grid_step).unwrap_or(0.1);
    let bias_b = args.bias_b.or(file.b).unwrap_or(0.1);
    let tie_policy: TiePolicy = args
        .tie_policy
        .as_deref()
        .or(file.tie_policy.as_deref())
        .unwrap_or("realistic")
        .parse()?;

    manifest
        .arg("data_dir", dir.display().to_string())
        .arg("a", args.a.display().to_string())
        .arg("b", args.b.display().to_string())
        .arg("valid_a", args.valid_a.display().to_string())
        .arg("valid_b", args.valid_b.display().to_string())
        .arg("out", args.out.display().to_string())
        .arg("metric", format!("{metric:?}").to_lowercase())
        .arg("grid_step", grid_step)
        .arg("normalization", format!("{normalization:?}").to_lowercase())
        .arg("bias_b", bias_b)
        .arg("tie_policy", tie_policy.as_str());
    manifest.dataset_inputs(&dir)?;
    for path in [&args.a, &args.b, &args.valid_a, &args.valid_b] {
        manifest.input(path)?;
    }

    let dataset = super::load_augmented(&dir, &spec)?;
    let truth = TemporalIndex::build(&dataset, &Split::ALL)?;
    let valid_a = read_predictions(&args.valid_a)?;
    let valid_b = read_predictions(&args.valid_b)?;
    let sk_valid = match &args.sk_valid {
        Some(path) => {
            manifest.input(path)?;
            Some(read_table(path)?)
        }
        None => None,
    };

    let context = RankingContext {
        queries: dataset.raw_split(Split::Valid),
        truth: &truth,
        entity_count: dataset.entity_count,
        tie_policy,
    };
    let cfg = EnsembleConfig {
        eta: 0.5,
        grid_step,
        normalization,
    };
    let scan = search_eta(
        &valid_a,
        &valid_b,
        &context,
        sk_valid.as_ref(),
        bias_b,
        metric,
        &cfg,
    )?;
    manifest.arg("eta", scan.best_eta);
    println!("validation grid:");
    for point in &scan.grid {
        println!("  eta {:.2} → {:.4}", point.eta, point.score);
    }
    println!("selected eta = {}", scan.best_eta);

    let test_a = read_predictions(&args.a)?;
    let test_b = read_predictions(&args.b)?;
    let fused_cfg = EnsembleConfig {
        eta: scan.best_eta,
        ..cfg
    };
    let fused = combine_prediction_sets(
        &test_a,
        &test_b,
        dataset.entity_count,
        &fused_cfg,
        &format!("ensemble({},{})", test_a.model_name, test_b.model_name),
    )?;
    write_predictions(&args.out, &fused)?;
    println!("fused predictions → {}", args.out.display());
    if let Some(scan_out) = &args.scan_out {
        std::fs::write(scan_out, serde_json::to_string_pretty(&scan)?)?;
        println!("grid scan → {}", scan_out.display());
    }
    manifest.write_for(&args.out)
}
