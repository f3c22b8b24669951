//! Search behaviour of the rate optimiser and the cutoff locator.
#![allow(clippy::excessive_precision)] // frozen oracle digits

use approx::assert_relative_eq;
use keyrate::{
    bb84_breakdown, cutoff_distance, optimize_rate, Bb84Config, Bb84Source, Bbm92Source,
    ChannelParams, DetectorOperatingPoint, DetectorSource, DpskConfig, Protocol, ProtocolConfig,
};

#[test]
fn poisson_bb84_never_loses_to_a_dense_grid() {
    // Dense-grid oracle: probe mu over (0, 0.02] at 1e-4 steps and demand
    // the search does at least as well.
    let det = DetectorOperatingPoint::preset("upconv-min-nep").unwrap();
    let chan = ChannelParams::new(0.2, 50.0, 1.0, 0.01).unwrap();
    let mut grid_best = 0.0f64;
    for k in 1..=200 {
        let mu = 1e-4 * k as f64;
        let cfg = Bb84Config {
            source: Bb84Source::Poisson { mu },
            eve_has_memory: true,
        };
        grid_best = grid_best.max(bb84_breakdown(&cfg, &det, &chan, 1e9).unwrap().rate_bps);
    }

    let cfg = ProtocolConfig {
        protocol: Protocol::Bb84(Bb84Config {
            source: Bb84Source::Poisson { mu: 0.005 },
            eve_has_memory: true,
        }),
        nu_hz: 1e9,
    };
    let found = optimize_rate(&cfg, &chan, &DetectorSource::Fixed(det)).unwrap();
    assert!(
        found.best_rate_bps >= grid_best,
        "search {} below grid oracle {grid_best}",
        found.best_rate_bps
    );
    // The mu = 0.005 probe value, frozen pre-build.
    assert!(found.best_rate_bps >= 5_142.338_812_626_856_2);
}

#[test]
fn search_is_deterministic() {
    let cfg = ProtocolConfig {
        protocol: Protocol::Dpsk(DpskConfig {
            mu: 0.5,
            delay_n: 1,
            eve_has_memory: false,
        }),
        nu_hz: 1e9,
    };
    let chan = ChannelParams::new(0.2, 150.0, 1.0, 0.01).unwrap();
    let source = DetectorSource::measured_upconversion();
    let a = optimize_rate(&cfg, &chan, &source).unwrap();
    let b = optimize_rate(&cfg, &chan, &source).unwrap();
    assert_eq!(a, b);
}

#[test]
fn pump_optimization_beats_the_published_operating_point() {
    // The joint pump/mu search must do at least as well as the fixed
    // minimum-NEP point with the same source search.
    let cfg = ProtocolConfig {
        protocol: Protocol::Dpsk(DpskConfig {
            mu: 0.5,
            delay_n: 100,
            eve_has_memory: false,
        }),
        nu_hz: 1e9,
    };
    let chan = ChannelParams::new(0.2, 200.0, 1.0, 0.01).unwrap();
    let fixed = optimize_rate(
        &cfg,
        &chan,
        &DetectorSource::preset("upconv-min-nep").unwrap(),
    )
    .unwrap();
    let pumped = optimize_rate(&cfg, &chan, &DetectorSource::measured_upconversion()).unwrap();
    assert!(pumped.best_rate_bps >= fixed.best_rate_bps);
    let pump = pumped.params.pump_mw.unwrap();
    assert!(pump > 0.0 && pump <= 100.0);
}

#[test]
fn cutoff_brackets_the_floor_crossing() {
    // Deterministic BBM92 on the ideal up-conversion point: the cutoff
    // obeys R(L) >= floor and R(L + 0.2) < floor.
    let cfg = ProtocolConfig {
        protocol: Protocol::Bbm92(Bbm92Source::Deterministic),
        nu_hz: 1e9,
    };
    let chan = ChannelParams::new(0.2, 0.0, 1.0, 0.01).unwrap();
    let source = DetectorSource::preset("upconv-ideal").unwrap();
    let floor = 1.0;
    let cutoff = cutoff_distance(&cfg, &chan, &source, floor).unwrap();
    let rate = |l: f64| {
        optimize_rate(&cfg, &chan.with_length(l), &source)
            .unwrap()
            .best_rate_bps
    };
    assert!(rate(cutoff) >= floor);
    assert!(rate(cutoff + 0.2) < floor);
}

#[test]
fn dpsk_memory_cutoff_sits_near_250_km() {
    // DPSK, N = 1, Eve with memory, ideal up-conversion point: the secure
    // distance at a 1 bit/s floor comes out near 250 km (within 10%).
    let cfg = ProtocolConfig {
        protocol: Protocol::Dpsk(DpskConfig {
            mu: 0.5,
            delay_n: 1,
            eve_has_memory: true,
        }),
        nu_hz: 1e9,
    };
    let chan = ChannelParams::new(0.2, 0.0, 1.0, 0.01).unwrap();
    let source = DetectorSource::preset("upconv-ideal").unwrap();
    let cutoff = cutoff_distance(&cfg, &chan, &source, 1.0).unwrap();
    assert_relative_eq!(cutoff, 250.0, max_relative = 0.10);
}
