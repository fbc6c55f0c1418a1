//! Grayscale deblurring under salt-and-pepper noise with the TV/L1 model.
//!
//! ```bash
//! cargo run --release --example grayscale_salt_pepper -- [size] [noise] [out.pgm]
//! ```

use std::env;

use tv_gmks::experiments::config::{Example, ExperimentConfig};
use tv_gmks::experiments::runner::run_experiment;
use tv_gmks::TvFlavor;

fn main() -> tv_gmks::Result<()> {
    let args: Vec<String> = env::args().skip(1).collect();
    let mut config = ExperimentConfig::preset(Example::Grayscale);
    config.size = args.first().map_or(128, |s| s.parse().expect("size"));
    config.noise.level = args.get(1).map_or(0.3, |s| s.parse().expect("noise level"));
    config.output = args.get(2).map(Into::into);
    config.solver.max_iter = 200;

    for tv in [TvFlavor::Anisotropic, TvFlavor::Isotropic] {
        config.solver.tv = tv;
        let report = run_experiment(&config)?;
        let first = report.traces[0].first().expect("at least one iteration");
        let last = report.traces[0].last().expect("at least one iteration");
        println!(
            "{tv:>5}: {:3} iterations  snr {:6.2} dB  (clamped {:6.2})  |DX-Y| {:.2e} -> {:.2e}",
            report.iterations(),
            report.metric(),
            report.snr_clamped.unwrap_or(f64::NAN),
            first.primal_d,
            last.primal_d,
        );
    }
    Ok(())
}
