//! Stationarity and distribution diagnostics of room temperature.
//!
//! cargo run --example diagnostics

use roomcast::dataio::{synthesize, SynthConfig};
use roomcast::stats::testing::random_walk;
use roomcast::stats::{acf, adf_test, histogram, pacf, qq_normal};

fn main() -> roomcast::Result<()> {
    let table = synthesize(&SynthConfig::default())?;
    let rt = table.target();

    let a = acf(rt, 30)?;
    let p = pacf(rt, 30)?;
    println!("lag   acf     pacf");
    for k in [0, 1, 2, 6, 12, 30] {
        println!("{k:>3}  {:>6.3}  {:>6.3}", a[k], p[k]);
    }

    let diff: Vec<f64> = rt.windows(2).map(|w| w[1] - w[0]).collect();
    // The default lag search tries up to 12·(n/100)^¼ lags, which is slow on
    // a full dataset; four hours of 10-minute steps is plenty here.
    for (name, series) in [("RT", rt), ("diff(RT)", diff.as_slice())] {
        let r = adf_test(series, Some(24))?;
        println!(
            "ADF {name:>8}: statistic {:>8.3}, lags {:>2}, 5% critical {:.3}, rejects at 5%: {}",
            r.statistic,
            r.used_lags,
            r.critical_values["5%"],
            r.rejects("5%")
        );
    }
    let walk = random_walk(42, 2000);
    println!("ADF on a random walk rejects at 5%: {}", adf_test(&walk, None)?.rejects("5%"));

    for (start, count) in histogram(rt, 1.0)? {
        println!("[{start:>4}, {:>4}) {}", start + 1.0, "#".repeat(count / 1000));
    }
    let qq = qq_normal(&diff)?;
    println!("Q-Q extremes of diff(RT): {:?} .. {:?}", qq[0], qq[qq.len() - 1]);
    Ok(())
}
