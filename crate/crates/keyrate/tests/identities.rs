//! Cross-protocol identities, scaling laws and monotonicity of the rate
//! equations.

use approx::assert_relative_eq;
use keyrate::{
    bb84_breakdown, bbm92_breakdown_deterministic, bbm92_breakdown_pdc, dpsk_breakdown,
    optimize_rate, rate_breakdown, tau_bb84_memory, tau_bb84_no_memory, tau_bbm92, Bb84Config,
    Bb84Source, Bbm92Source, ChannelParams, DetectorOperatingPoint, DetectorSource, DpskConfig,
    Protocol, ProtocolConfig,
};

#[test]
fn bbm92_tau_is_bb84_tau_at_unit_beta() {
    for i in 0..50 {
        let e = 0.01 * i as f64;
        let reference = tau_bbm92(e);
        assert!(
            (tau_bb84_memory(e, 1.0) - reference).abs() <= 1e-12,
            "memory branch deviates at e = {e}"
        );
        assert!(
            (tau_bb84_no_memory(e, 1.0) - reference).abs() <= 1e-12,
            "no-memory branch deviates at e = {e}"
        );
    }
}

fn dark_free_detector(eta: f64) -> DetectorOperatingPoint {
    DetectorOperatingPoint::new(eta, 0.0, 0.0, 1e9, 0.0, "dark-free".into()).unwrap()
}

#[test]
fn ideal_bb84_rate_scales_linearly_with_transmission() {
    // d = 0, t_dead = 0: +15 km multiplies the rate by 10^-0.3 exactly.
    let det = dark_free_detector(0.3);
    let cfg = Bb84Config {
        source: Bb84Source::Ideal,
        eve_has_memory: true,
    };
    let expected = 10f64.powf(-0.3);
    for l in [10.0, 50.0, 120.0, 200.0] {
        let near = ChannelParams::new(0.2, l, 1.0, 0.01).unwrap();
        let far = near.with_length(l + 15.0);
        let ratio = bb84_breakdown(&cfg, &det, &far, 1e9).unwrap().rate_bps
            / bb84_breakdown(&cfg, &det, &near, 1e9).unwrap().rate_bps;
        assert_relative_eq!(ratio, expected, max_relative = 1e-6);
    }
}

#[test]
fn fixed_mu_dpsk_rate_scales_linearly_with_transmission() {
    let det = dark_free_detector(0.3);
    let cfg = DpskConfig {
        mu: 0.4,
        delay_n: 100,
        eve_has_memory: false,
    };
    let near = ChannelParams::new(0.2, 200.0, 1.0, 0.01).unwrap();
    let far = near.with_length(215.0);
    let ratio = dpsk_breakdown(&cfg, &det, &far, 1e9).unwrap().rate_bps
        / dpsk_breakdown(&cfg, &det, &near, 1e9).unwrap().rate_bps;
    assert_relative_eq!(ratio, 10f64.powf(-0.3), max_relative = 1e-6);
}

#[test]
fn optimized_poisson_bb84_scales_quadratically_with_transmission() {
    // The PNS attack forces mu ~ transmission, so the optimized rate falls
    // as T^2: 50 -> 100 km is a factor 100 within 10%.
    let source = DetectorSource::Fixed(dark_free_detector(0.1));
    let cfg = ProtocolConfig {
        protocol: Protocol::Bb84(Bb84Config {
            source: Bb84Source::Poisson { mu: 0.01 },
            eve_has_memory: true,
        }),
        nu_hz: 1e9,
    };
    let chan = ChannelParams::new(0.2, 0.0, 1.0, 0.01).unwrap();
    let near = optimize_rate(&cfg, &chan.with_length(50.0), &source).unwrap();
    let far = optimize_rate(&cfg, &chan.with_length(100.0), &source).unwrap();
    let ratio = near.best_rate_bps / far.best_rate_bps;
    assert!(
        (ratio / 100.0 - 1.0).abs() <= 0.10,
        "T^2 scaling violated: R(50)/R(100) = {ratio}"
    );
}

#[test]
fn rates_are_non_increasing_in_distance_without_dead_time() {
    let det =
        DetectorOperatingPoint::new(0.075, 6.4e3, 1.28e-7, 1e9, 0.0, "gateless".into()).unwrap();
    let configs = vec![
        (
            Protocol::Bb84(Bb84Config {
                source: Bb84Source::Ideal,
                eve_has_memory: true,
            }),
            350.0,
        ),
        (
            Protocol::Bb84(Bb84Config {
                source: Bb84Source::Poisson { mu: 0.005 },
                eve_has_memory: true,
            }),
            150.0,
        ),
        (
            Protocol::Bb84(Bb84Config {
                source: Bb84Source::Poisson { mu: 0.005 },
                eve_has_memory: false,
            }),
            150.0,
        ),
        (Protocol::Bbm92(Bbm92Source::Deterministic), 350.0),
        (Protocol::Bbm92(Bbm92Source::Pdc { chi: 0.1 }), 250.0),
        (
            Protocol::Dpsk(DpskConfig {
                mu: 0.5,
                delay_n: 100,
                eve_has_memory: false,
            }),
            250.0,
        ),
        (
            Protocol::Dpsk(DpskConfig {
                mu: 0.2,
                delay_n: 1,
                eve_has_memory: true,
            }),
            200.0,
        ),
    ];
    let chan = ChannelParams::new(0.2, 0.0, 1.0, 0.01).unwrap();
    for (protocol, l_max) in configs {
        let cfg = ProtocolConfig {
            protocol,
            nu_hz: 1e9,
        };
        let mut prev = f64::INFINITY;
        let mut l = 0.0;
        while l <= l_max {
            let rate = rate_breakdown(&cfg, &det, &chan.with_length(l))
                .unwrap()
                .rate_bps;
            assert!(
                rate <= prev * (1.0 + 1e-12) + 1e-30,
                "{} rate increased at {l} km",
                cfg.label()
            );
            prev = rate;
            l += 1.0;
        }
    }
}

#[test]
fn insecure_regimes_clamp_to_exactly_zero() {
    let chan = ChannelParams::new(0.2, 50.0, 1.0, 0.01).unwrap();
    let det = DetectorOperatingPoint::preset("upconv-min-nep").unwrap();

    // beta <= 0 (multi-photon dominated).
    let b = bb84_breakdown(
        &Bb84Config {
            source: Bb84Source::Poisson { mu: 0.5 },
            eve_has_memory: true,
        },
        &det,
        &chan,
        1e9,
    )
    .unwrap();
    assert!(b.beta.unwrap() <= 0.0);
    assert_eq!(b.rate_bps, 0.0);

    // gamma <= 0 (bright pulses against a quantum memory).
    let b = dpsk_breakdown(
        &DpskConfig {
            mu: 0.9,
            delay_n: 1,
            eve_has_memory: true,
        },
        &det,
        &chan,
        1e9,
    )
    .unwrap();
    assert!(b.gamma.unwrap() <= 0.0);
    assert_eq!(b.rate_bps, 0.0);

    // tau + leak <= 0 (error rate too high far beyond cutoff).
    let far = chan.with_length(450.0);
    let b = bbm92_breakdown_deterministic(&det, &far, 1e9).unwrap();
    assert!(b.tau + b.leak <= 0.0);
    assert_eq!(b.rate_bps, 0.0);

    // chi = 0: no pairs, no key.
    let b = bbm92_breakdown_pdc(0.0, &det, &chan, 1e9).unwrap();
    assert_eq!(b.rate_bps, 0.0);
}

#[test]
fn breakdown_probabilities_stay_physical() {
    let det = DetectorOperatingPoint::preset("upconv-min-nep").unwrap();
    let chan = ChannelParams::new(0.2, 0.0, 1.0, 0.01).unwrap();
    let configs = [
        Protocol::Bb84(Bb84Config {
            source: Bb84Source::Poisson { mu: 0.05 },
            eve_has_memory: false,
        }),
        Protocol::Bbm92(Bbm92Source::Pdc { chi: 0.3 }),
        Protocol::Dpsk(DpskConfig {
            mu: 0.5,
            delay_n: 10,
            eve_has_memory: false,
        }),
    ];
    for protocol in configs {
        let cfg = ProtocolConfig {
            protocol,
            nu_hz: 1e9,
        };
        for l in [0.0, 25.0, 100.0, 300.0, 500.0] {
            let b = rate_breakdown(&cfg, &det, &chan.with_length(l)).unwrap();
            for (name, p) in [
                ("p_signal", b.p_signal),
                ("p_dark", b.p_dark),
                ("p_click", b.p_click),
                ("qber", b.qber),
                ("sat", b.sat),
            ] {
                assert!(
                    (0.0..=1.0).contains(&p),
                    "{name} = {p} out of range at {l} km"
                );
            }
            assert!(b.qber <= 0.5);
            assert!(b.sat > 0.0);
            assert!(b.tau >= 0.0);
            assert!(b.rate_bps >= 0.0);
        }
    }
}
