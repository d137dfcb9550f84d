//! Runs the four model variants and ItemPop on synthetic confounded data.
//!
//! `cargo run --release -p popsi --example ablation -- [seeds] [confound] [target_density] [rank] [spread]`

use popsi::baselines::{run_variant, BaselineSpec, EvalSplit, VariantParams};
use popsi::data::{split_holdout, SplitSpec};
use popsi::model::FitConfig;
use popsi::synth::{generate, SyntheticConfig};

fn main() -> popsi::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let arg = |i: usize, default: f64| args.get(i).and_then(|s| s.parse().ok()).unwrap_or(default);
    let seeds = arg(0, 5.0) as u64;
    let confound = arg(1, 0.3);
    let target_density = arg(2, 0.05);
    let rank = arg(3, 5.0) as usize;
    let spread = arg(4, 2.0);
    println!("seed\tvariant\tndcg@50\trecall@50\tpri");
    for seed in 0..seeds {
        let cfg = SyntheticConfig {
            confound,
            densities: vec![target_density, 0.15, 0.1],
            factor_spread: spread,
            seed,
            ..Default::default()
        };
        let data = split_holdout(&generate(&cfg)?.tensor, &SplitSpec { seed, ..Default::default() })?;
        let params = VariantParams {
            fit: FitConfig { rank, seed, ..Default::default() },
            ks: vec![20, 50],
            split: EvalSplit::Test,
            exclude_train: true,
        };
        for name in ["itempop", "popsi_matrix", "popsi_matrix_pop", "popsi_tensor", "popsi_full"] {
            let spec: BaselineSpec = name.parse()?;
            let r = run_variant(&spec, &data, &params)?;
            println!(
                "{seed}\t{name}\t{:.4}\t{:.4}\t{:.4}",
                r.metrics.ndcg[&50],
                r.metrics.recall[&50],
                r.metrics.pri.unwrap_or(f64::NAN)
            );
        }
    }
    Ok(())
}
