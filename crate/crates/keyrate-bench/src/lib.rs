//! Shared fixtures for the benchmarks.

use keyrate::{
    Bb84Config, Bb84Source, Bbm92Source, ChannelParams, DetectorOperatingPoint, DpskConfig,
    Protocol, ProtocolConfig,
};

pub fn min_nep() -> DetectorOperatingPoint {
    DetectorOperatingPoint::preset("upconv-min-nep").expect("preset exists")
}

pub fn channel(l_km: f64) -> ChannelParams {
    ChannelParams::new(0.2, l_km, 1.0, 0.01).expect("valid channel")
}

pub fn bb84_poisson(mu: f64) -> Bb84Config {
    Bb84Config {
        source: Bb84Source::Poisson { mu },
        eve_has_memory: true,
    }
}

pub fn dpsk_n100() -> ProtocolConfig {
    ProtocolConfig {
        protocol: Protocol::Dpsk(DpskConfig {
            mu: 0.5,
            delay_n: 100,
            eve_has_memory: false,
        }),
        nu_hz: 1e9,
    }
}

pub fn bbm92_pdc() -> ProtocolConfig {
    ProtocolConfig {
        protocol: Protocol::Bbm92(Bbm92Source::Pdc { chi: 0.1 }),
        nu_hz: 1e9,
    }
}
