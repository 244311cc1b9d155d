//! Seeded synthetic year of hourly weather and load.
//!
//! Irradiance is a clear-sky envelope scaled by a daily clearness index with
//! seasonal bias and hourly noise; the diffuse share grows as the sky
//! clouds over. Load is a day/night profile with a summer cooling bump and
//! lighter weekends. The same seed always yields the same series.

use chrono::{DateTime, Datelike, Duration, TimeZone, Utc};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::solar::{declination, hour_angle, WeatherRecord};

pub const DEFAULT_SEED: u64 = 42;
pub const YEAR: i32 = 2021;
pub const HOURS_PER_YEAR: usize = 8760;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthParams {
    pub latitude: f64,
    pub longitude: f64,
    /// Night-time base load, kW.
    pub base_load_kw: f64,
    /// Additional working-hours load, kW.
    pub day_load_kw: f64,
    /// Floor applied after noise, kW.
    pub min_load_kw: f64,
    pub hours: usize,
}

impl Default for SynthParams {
    fn default() -> Self {
        Self {
            latitude: 31.5,
            longitude: 34.45,
            base_load_kw: 200.0,
            day_load_kw: 150.0,
            min_load_kw: 160.0,
            hours: HOURS_PER_YEAR,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticYear {
    pub weather: Vec<WeatherRecord>,
    pub load_kw: Vec<f64>,
}

impl SyntheticYear {
    pub fn timestamps(&self) -> impl Iterator<Item = DateTime<Utc>> + '_ {
        self.weather.iter().map(|w| w.timestamp)
    }
}

/// Seasonal phase: +1 in mid-July, -1 in mid-January.
fn season(day_of_year: u32) -> f64 {
    (2.0 * std::f64::consts::PI * (day_of_year as f64 - 196.0) / 365.0).cos()
}

fn clear_sky_ghi(cos_zenith: f64) -> f64 {
    if cos_zenith <= 0.01 {
        0.0
    } else {
        1098.0 * cos_zenith * (-0.057 / cos_zenith).exp()
    }
}

pub fn synthesize(seed: u64, params: &SynthParams) -> SyntheticYear {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start = Utc.with_ymd_and_hms(YEAR, 1, 1, 0, 0, 0).unwrap();
    let lat = params.latitude.to_radians();
    let lon = params.longitude.to_radians();

    let mut weather = Vec::with_capacity(params.hours);
    let mut load_kw = Vec::with_capacity(params.hours);
    let mut day_clearness = 1.0;
    let mut current_day = 0;

    for h in 0..params.hours {
        let ts = start + Duration::hours(h as i64);
        let doy = ts.ordinal();
        let s = season(doy);
        if doy != current_day {
            current_day = doy;
            let bias = 0.72 + 0.18 * s;
            day_clearness = (bias + rng.gen_range(-0.35..0.2)).clamp(0.15, 1.0);
        }

        let decl = declination(doy);
        let omega = hour_angle(&ts, lon);
        let cos_z = lat.cos() * decl.cos() * omega.cos() + lat.sin() * decl.sin();
        let clearness = (day_clearness + rng.gen_range(-0.1..0.1)).clamp(0.1, 1.0);
        let ghi = clear_sky_ghi(cos_z) * clearness;
        let diffuse_share = (1.0 - 0.85 * clearness).clamp(0.1, 1.0);
        let diffuse = ghi * diffuse_share;
        let beam = ghi - diffuse;

        let solar_hour = omega.to_degrees() / 15.0 + 12.0;
        let diurnal = (2.0 * std::f64::consts::PI * (solar_hour - 9.0) / 24.0).sin();
        let ambient = 20.0 + 8.0 * s + 5.0 * diurnal + rng.gen_range(-1.5..1.5);

        let local = solar_hour.rem_euclid(24.0);
        // smooth ramp into and out of the 07:00-18:00 working day
        let working = ((local - 6.0).clamp(0.0, 1.0)) * ((19.0 - local).clamp(0.0, 1.0));
        let weekend = matches!(ts.weekday(), chrono::Weekday::Fri | chrono::Weekday::Sat);
        let mut load = params.base_load_kw + params.day_load_kw * working;
        load *= 1.0 + 0.12 * s;
        if weekend {
            load *= 0.85;
        }
        load *= rng.gen_range(0.95..1.05);
        load = load.max(params.min_load_kw);

        weather.push(WeatherRecord::new(
            ts,
            round6(ghi),
            round6(beam),
            round6(diffuse),
            round6(ambient),
        ));
        load_kw.push(round6(load));
    }
    SyntheticYear { weather, load_kw }
}

/// Values are kept at the precision they are written to CSV with, so a
/// run from memory and a run from the written files agree exactly.
fn round6(x: f64) -> f64 {
    (x * 1e6).round() / 1e6
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_valid() {
        let p = SynthParams {
            hours: 24 * 30,
            ..Default::default()
        };
        let a = synthesize(7, &p);
        let b = synthesize(7, &p);
        assert_eq!(a, b);
        let c = synthesize(8, &p);
        assert_ne!(a.load_kw, c.load_kw);
        for w in &a.weather {
            w.validate().unwrap();
        }
        assert!(a.load_kw.iter().all(|&l| (160.0..500.0).contains(&l)));
    }

    #[test]
    fn full_year_shape() {
        let y = synthesize(DEFAULT_SEED, &SynthParams::default());
        assert_eq!(y.weather.len(), 8760);
        let night = y.weather.iter().filter(|w| w.global == 0.0).count();
        assert!(night > 3000 && night < 5500, "{night}");
        let peak = y.weather.iter().map(|w| w.global).fold(0.0, f64::max);
        assert!(peak > 800.0 && peak < 1100.0, "{peak}");
    }
}
