//! Tilted-plane irradiance and available power of the PV array.
//!
//! Horizontal measurements (global, beam, diffuse) are transposed onto the
//! module plane with the three-component model (beam, sky diffuse, ground
//! reflected). The array output follows a single-diode cell with series
//! resistance, using an empirical fill factor.

use chrono::{DateTime, Datelike, Timelike, Utc};
use serde::{Deserialize, Serialize};

use crate::error::{check_range, DomainError};

/// Relative slack allowed on `beam + diffuse <= global` at ingestion.
pub const SPLIT_SLACK: f64 = 0.05;
/// Upper clamp of the beam factor near sunrise and sunset.
pub const BEAM_FACTOR_CAP: f64 = 10.0;
/// Irradiance at standard test conditions, W/m².
pub const STC_IRRADIANCE: f64 = 1000.0;
/// Cell temperature at standard test conditions, °C.
pub const STC_TEMPERATURE: f64 = 25.0;

const BOLTZMANN: f64 = 1.380_649e-23;
const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
const KELVIN_OFFSET: f64 = 273.15;

/// One sample of horizontal-surface weather.
#[derive(Debug, Clone, PartialEq)]
pub struct WeatherRecord {
    pub timestamp: DateTime<Utc>,
    /// Global horizontal irradiance, W/m².
    pub global: f64,
    /// Direct-beam horizontal irradiance, W/m².
    pub beam: f64,
    /// Diffuse horizontal irradiance, W/m².
    pub diffuse: f64,
    /// Ambient temperature, °C.
    pub ambient: f64,
    /// Precomputed plane-of-array irradiance; bypasses the beam factor.
    pub tilted: Option<f64>,
    /// Per-step grid status replacing the periodic schedule.
    pub grid_on: Option<bool>,
}

impl WeatherRecord {
    pub fn new(
        timestamp: DateTime<Utc>,
        global: f64,
        beam: f64,
        diffuse: f64,
        ambient: f64,
    ) -> Self {
        Self {
            timestamp,
            global,
            beam,
            diffuse,
            ambient,
            tilted: None,
            grid_on: None,
        }
    }

    pub fn validate(&self) -> Result<(), DomainError> {
        check_range("G", self.global, 0.0, f64::MAX, "finite and >= 0")?;
        check_range("Gb", self.beam, 0.0, f64::MAX, "finite and >= 0")?;
        check_range("Gd", self.diffuse, 0.0, f64::MAX, "finite and >= 0")?;
        if !self.ambient.is_finite() {
            return Err(DomainError::OutOfRange {
                what: "Ta",
                rule: "finite",
                value: self.ambient,
            });
        }
        if let Some(gt) = self.tilted {
            check_range("Gt", gt, 0.0, f64::MAX, "finite and >= 0")?;
        }
        if self.beam + self.diffuse > self.global * (1.0 + SPLIT_SLACK) {
            return Err(DomainError::Invalid(format!(
                "beam+diffuse exceeds global ({} + {} > {})",
                self.beam, self.diffuse, self.global
            )));
        }
        Ok(())
    }
}

/// Site and plane orientation. Angles are held in radians; construct from
/// degrees with [`SiteGeometry::from_degrees`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SiteGeometry {
    latitude: f64,
    longitude: f64,
    tilt: f64,
    surface_azimuth: f64,
    albedo: f64,
}

impl SiteGeometry {
    /// `surface_azimuth` is measured from south, east negative.
    /// `longitude` (east positive) maps UTC timestamps to solar time.
    pub fn from_degrees(
        latitude: f64,
        longitude: f64,
        tilt: f64,
        surface_azimuth: f64,
        albedo: f64,
    ) -> Result<Self, DomainError> {
        check_range("latitude", latitude, -90.0, 90.0, "in [-90, 90] degrees")?;
        check_range(
            "longitude",
            longitude,
            -180.0,
            180.0,
            "in [-180, 180] degrees",
        )?;
        check_range("tilt", tilt, 0.0, 90.0, "in [0, 90] degrees")?;
        check_range(
            "surface_azimuth",
            surface_azimuth,
            -180.0,
            180.0,
            "in [-180, 180] degrees",
        )?;
        check_range("albedo", albedo, 0.0, 1.0, "in [0, 1]")?;
        Ok(Self {
            latitude: latitude.to_radians(),
            longitude: longitude.to_radians(),
            tilt: tilt.to_radians(),
            surface_azimuth: surface_azimuth.to_radians(),
            albedo,
        })
    }

    pub fn latitude_deg(&self) -> f64 {
        self.latitude.to_degrees()
    }
    pub fn longitude_deg(&self) -> f64 {
        self.longitude.to_degrees()
    }
    pub fn tilt_deg(&self) -> f64 {
        self.tilt.to_degrees()
    }
    pub fn surface_azimuth_deg(&self) -> f64 {
        self.surface_azimuth.to_degrees()
    }
    pub fn albedo(&self) -> f64 {
        self.albedo
    }
}

/// Cooper's relation for solar declination, radians.
pub fn declination(day_of_year: u32) -> f64 {
    let arg = 2.0 * std::f64::consts::PI * (284.0 + day_of_year as f64) / 365.0;
    23.45_f64.to_radians() * arg.sin()
}

/// Hour angle in radians (negative before solar noon). Solar time is the
/// UTC clock shifted by longitude; the equation of time is ignored.
pub fn hour_angle(timestamp: &DateTime<Utc>, longitude_rad: f64) -> f64 {
    let clock = timestamp.hour() as f64
        + timestamp.minute() as f64 / 60.0
        + timestamp.second() as f64 / 3600.0;
    let solar = clock + longitude_rad.to_degrees() / 15.0;
    (15.0 * (solar - 12.0)).to_radians()
}

/// Ratio of beam irradiance on the tilted plane to beam irradiance on the
/// horizontal. Zero with the sun at or below the horizon, capped at
/// [`BEAM_FACTOR_CAP`].
pub fn beam_factor(timestamp: &DateTime<Utc>, geometry: &SiteGeometry) -> f64 {
    let decl = declination(timestamp.ordinal());
    let omega = hour_angle(timestamp, geometry.longitude);
    let (sin_d, cos_d) = decl.sin_cos();
    let (sin_p, cos_p) = geometry.latitude.sin_cos();
    let (sin_b, cos_b) = geometry.tilt.sin_cos();
    let (sin_g, cos_g) = geometry.surface_azimuth.sin_cos();
    let (sin_w, cos_w) = omega.sin_cos();

    let cos_zenith = cos_p * cos_d * cos_w + sin_p * sin_d;
    if cos_zenith <= 0.0 {
        return 0.0;
    }
    let cos_incidence = sin_d * sin_p * cos_b - sin_d * cos_p * sin_b * cos_g
        + cos_d * cos_p * cos_b * cos_w
        + cos_d * sin_p * sin_b * cos_g * cos_w
        + cos_d * sin_b * sin_g * sin_w;
    (cos_incidence.max(0.0) / cos_zenith).min(BEAM_FACTOR_CAP)
}

/// Plane-of-array irradiance and its components, W/m².
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TiltedIrradiance {
    pub total: f64,
    pub beam: f64,
    pub diffuse: f64,
    pub reflected: f64,
}

pub fn tilted_irradiance(
    record: &WeatherRecord,
    geometry: &SiteGeometry,
    beam_factor: f64,
) -> TiltedIrradiance {
    let cos_tilt = geometry.tilt.cos();
    let beam = (beam_factor * record.beam).max(0.0);
    let diffuse = ((1.0 + cos_tilt) / 2.0 * record.diffuse).max(0.0);
    let reflected = ((1.0 - cos_tilt) / 2.0 * geometry.albedo * record.global).max(0.0);
    TiltedIrradiance {
        total: beam + diffuse + reflected,
        beam,
        diffuse,
        reflected,
    }
}

/// NOCT cell temperature model, °C.
pub fn cell_temperature(ambient: f64, tilted: f64, noct: f64) -> f64 {
    ambient + tilted * (noct - 20.0) / 800.0
}

/// Single-diode cell parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PvCellSpec {
    /// Open-circuit voltage at STC, V.
    pub voc_stc: f64,
    /// Short-circuit current at STC, A.
    pub isc_stc: f64,
    /// Open-circuit voltage temperature coefficient, V/°C.
    pub kv: f64,
    /// Short-circuit current temperature coefficient, A/°C.
    pub ki: f64,
    /// Series resistance, Ω.
    pub rs: f64,
    pub ideality: f64,
    /// Nominal operating cell temperature, °C.
    pub noct: f64,
}

impl Default for PvCellSpec {
    /// A generic 156 mm monocrystalline cell.
    fn default() -> Self {
        Self {
            voc_stc: 0.64,
            isc_stc: 9.2,
            kv: -0.0021,
            ki: 0.0046,
            rs: 0.005,
            ideality: 1.0,
            noct: 45.0,
        }
    }
}

impl PvCellSpec {
    pub fn validate(&self) -> Result<(), DomainError> {
        check_range("voc_stc", self.voc_stc, f64::MIN_POSITIVE, f64::MAX, "> 0")?;
        check_range("isc_stc", self.isc_stc, f64::MIN_POSITIVE, f64::MAX, "> 0")?;
        check_range("rs", self.rs, 0.0, f64::MAX, ">= 0")?;
        check_range(
            "ideality",
            self.ideality,
            f64::MIN_POSITIVE,
            f64::MAX,
            "> 0",
        )?;
        if !(self.kv.is_finite() && self.ki.is_finite() && self.noct.is_finite()) {
            return Err(DomainError::Invalid(
                "kv, ki and noct must be finite".to_string(),
            ));
        }
        if self.rs * self.isc_stc >= self.voc_stc {
            return Err(DomainError::Invalid(format!(
                "series loss rs*isc_stc = {} must stay below voc_stc = {}",
                self.rs * self.isc_stc,
                self.voc_stc
            )));
        }
        Ok(())
    }
}

/// kT/q in volts.
pub fn thermal_voltage(cell_temp_c: f64) -> f64 {
    BOLTZMANN * (cell_temp_c + KELVIN_OFFSET) / ELEMENTARY_CHARGE
}

/// Ideal fill factor from the normalised open-circuit voltage
/// `v = Voc / (n kT/q)`.
pub fn ideal_fill_factor(normalized_voc: f64) -> f64 {
    (normalized_voc - (normalized_voc + 0.72).ln()) / (normalized_voc + 1.0)
}

/// Empirical fill factor with a linear series-resistance correction,
/// clamped to the open interval (0, 1).
pub fn fill_factor(
    voc: f64,
    isc: f64,
    cell_temp_c: f64,
    spec: &PvCellSpec,
) -> Result<f64, DomainError> {
    check_range("Voc", voc, f64::MIN_POSITIVE, f64::MAX, "> 0")?;
    check_range("Isc", isc, f64::MIN_POSITIVE, f64::MAX, "> 0")?;
    let normalized = voc / (spec.ideality * thermal_voltage(cell_temp_c));
    let ff0 = ideal_fill_factor(normalized);
    let rs_norm = spec.rs * isc / voc;
    let ff = ff0 * (1.0 - rs_norm);
    Ok(ff.clamp(f64::EPSILON, 1.0 - f64::EPSILON))
}

/// Open-circuit voltage and short-circuit current at the given conditions.
pub fn cell_operating_point(tilted: f64, cell_temp_c: f64, spec: &PvCellSpec) -> (f64, f64) {
    let dt = cell_temp_c - STC_TEMPERATURE;
    let voc = spec.voc_stc + spec.kv * dt;
    let isc = (spec.isc_stc + spec.ki * dt) * tilted / STC_IRRADIANCE;
    (voc, isc)
}

/// Maximum cell power, W.
///
/// The series-resistance term of the fill factor is evaluated with the
/// short-circuit current at 1000 W/m² and the actual cell temperature, so
/// the fill factor depends on temperature only and the output is
/// proportional to irradiance.
pub fn cell_max_power(tilted: f64, cell_temp_c: f64, spec: &PvCellSpec) -> f64 {
    if tilted <= 0.0 {
        return 0.0;
    }
    let (voc, isc) = cell_operating_point(tilted, cell_temp_c, spec);
    let (_, isc_ref) = cell_operating_point(STC_IRRADIANCE, cell_temp_c, spec);
    if voc <= 0.0 || isc_ref <= 0.0 {
        return 0.0;
    }
    match fill_factor(voc, isc_ref, cell_temp_c, spec) {
        Ok(ff) => voc * isc * ff,
        Err(_) => 0.0,
    }
}

/// Module counts of the array.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PvArraySpec {
    pub series_modules: u32,
    pub parallel_modules: u32,
    pub cells_per_module: u32,
}

impl PvArraySpec {
    pub fn validate(&self) -> Result<(), DomainError> {
        if self.series_modules == 0 || self.parallel_modules == 0 || self.cells_per_module == 0 {
            return Err(DomainError::Invalid(
                "PV array module and cell counts must be >= 1".to_string(),
            ));
        }
        Ok(())
    }

    pub fn cell_count(&self) -> u64 {
        self.series_modules as u64 * self.parallel_modules as u64 * self.cells_per_module as u64
    }
}

/// Array power in kW from a single cell's power in W.
pub fn array_available_power(cell_power_w: f64, array: &PvArraySpec) -> f64 {
    array.cell_count() as f64 * cell_power_w / 1000.0
}

/// Array rating at standard test conditions, kWp.
pub fn rated_kwp(array: &PvArraySpec, cell: &PvCellSpec) -> f64 {
    array_available_power(cell_max_power(STC_IRRADIANCE, STC_TEMPERATURE, cell), array)
}

/// Chooses string length and string count whose STC rating is closest to
/// `target_kwp`. String lengths between 10 and 30 modules are searched.
pub fn size_array(
    target_kwp: f64,
    cell: &PvCellSpec,
    cells_per_module: u32,
) -> Result<PvArraySpec, DomainError> {
    check_range("target_kwp", target_kwp, f64::MIN_POSITIVE, f64::MAX, "> 0")?;
    cell.validate()?;
    if cells_per_module == 0 {
        return Err(DomainError::Invalid(
            "cells_per_module must be >= 1".to_string(),
        ));
    }
    let module_kw =
        cells_per_module as f64 * cell_max_power(STC_IRRADIANCE, STC_TEMPERATURE, cell) / 1000.0;
    if module_kw <= 0.0 {
        return Err(DomainError::Invalid(
            "cell produces no power at STC".to_string(),
        ));
    }
    let modules = target_kwp / module_kw;
    let mut best: Option<(f64, PvArraySpec)> = None;
    for series in 10..=30u32 {
        let parallel = ((modules / series as f64).round() as u32).max(1);
        let spec = PvArraySpec {
            series_modules: series,
            parallel_modules: parallel,
            cells_per_module,
        };
        let err = (rated_kwp(&spec, cell) - target_kwp).abs();
        if best.as_ref().is_none_or(|(e, _)| err < *e) {
            best = Some((err, spec));
        }
    }
    Ok(best.expect("non-empty search").1)
}

/// A complete PV installation: array, cell model and site.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PvSystem {
    pub array: PvArraySpec,
    pub cell: PvCellSpec,
    pub geometry: SiteGeometry,
}

impl PvSystem {
    /// Plane-of-array irradiance for a record, honouring a precomputed
    /// `tilted` value when the record carries one.
    pub fn plane_irradiance(&self, record: &WeatherRecord) -> f64 {
        match record.tilted {
            Some(gt) => gt.max(0.0),
            None => {
                let rb = beam_factor(&record.timestamp, &self.geometry);
                tilted_irradiance(record, &self.geometry, rb).total
            }
        }
    }

    /// Available array power, kW.
    pub fn available_power(&self, record: &WeatherRecord) -> f64 {
        let gt = self.plane_irradiance(record);
        let tc = cell_temperature(record.ambient, gt, self.cell.noct);
        array_available_power(cell_max_power(gt, tc, &self.cell), &self.array)
    }

    pub fn rated_kwp(&self) -> f64 {
        rated_kwp(&self.array, &self.cell)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::TimeZone;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    fn flat(albedo: f64) -> SiteGeometry {
        SiteGeometry::from_degrees(30.0, 0.0, 0.0, 0.0, albedo).unwrap()
    }

    #[test]
    fn beam_factor_zero_at_midnight() {
        let ts = Utc.with_ymd_and_hms(2021, 6, 21, 0, 0, 0).unwrap();
        let g = SiteGeometry::from_degrees(45.0, 0.0, 30.0, 0.0, 0.2).unwrap();
        assert_eq!(beam_factor(&ts, &g), 0.0);
    }

    #[test]
    fn beam_factor_is_one_for_horizontal_plane() {
        // Day 81 gives zero declination; latitude 0 puts the sun at zenith.
        let ts = Utc.with_ymd_and_hms(2021, 3, 22, 12, 0, 0).unwrap();
        assert_eq!(ts.ordinal(), 81);
        let g = SiteGeometry::from_degrees(0.0, 0.0, 0.0, 0.0, 0.2).unwrap();
        assert!(close(beam_factor(&ts, &g), 1.0, 1e-12));
        // horizontal plane at any sun position
        let ts = Utc.with_ymd_and_hms(2021, 7, 3, 9, 30, 0).unwrap();
        assert!(close(beam_factor(&ts, &flat(0.2)), 1.0, 1e-12));
    }

    #[test]
    fn beam_factor_equinox_noon_equator_facing() {
        let ts = Utc.with_ymd_and_hms(2021, 3, 22, 12, 0, 0).unwrap();
        let g = SiteGeometry::from_degrees(45.0, 0.0, 45.0, 0.0, 0.2).unwrap();
        assert!(close(beam_factor(&ts, &g), std::f64::consts::SQRT_2, 1e-9));
    }

    #[test]
    fn beam_factor_clamped_near_sunset() {
        let g = SiteGeometry::from_degrees(50.0, 0.0, 90.0, 90.0, 0.2).unwrap();
        for minute in 0..(24 * 60) {
            let ts = Utc.with_ymd_and_hms(2021, 6, 21, 0, 0, 0).unwrap()
                + chrono::Duration::minutes(minute);
            let rb = beam_factor(&ts, &g);
            assert!((0.0..=BEAM_FACTOR_CAP).contains(&rb), "{rb} at {ts}");
        }
    }

    #[test]
    fn tilted_components() {
        let ts = Utc.with_ymd_and_hms(2021, 3, 22, 12, 0, 0).unwrap();
        let rec = WeatherRecord::new(ts, 800.0, 600.0, 200.0, 20.0);
        let g = SiteGeometry::from_degrees(40.0, 0.0, 30.0, 0.0, 0.2).unwrap();
        let t = tilted_irradiance(&rec, &g, 1.2);
        assert!(close(t.beam, 720.0, 1e-9));
        assert!(close(t.diffuse, 186.602_540_378, 1e-6));
        assert!(close(t.reflected, 10.717_967_697, 1e-6));
        assert!(close(t.total, 917.320_508_075, 1e-6));

        let rec = WeatherRecord::new(ts, 800.0, 0.0, 0.0, 20.0);
        let g = SiteGeometry::from_degrees(40.0, 0.0, 90.0, 0.0, 0.2).unwrap();
        let t = tilted_irradiance(&rec, &g, 0.0);
        assert!(close(t.reflected, 80.0, 1e-9));
    }

    #[test]
    fn flat_plane_drops_reflection() {
        let ts = Utc.with_ymd_and_hms(2021, 5, 1, 10, 0, 0).unwrap();
        let rec = WeatherRecord::new(ts, 700.0, 450.0, 230.0, 20.0);
        let t = tilted_irradiance(&rec, &flat(0.9), 1.3);
        assert_eq!(t.reflected, 0.0);
        assert_eq!(t.total, 1.3 * 450.0 + 230.0);
    }

    #[test]
    fn noct_relation() {
        assert_eq!(cell_temperature(17.0, 0.0, 45.0), 17.0);
        assert_eq!(cell_temperature(20.0, 800.0, 45.0), 45.0);
        assert!(close(cell_temperature(30.0, 1000.0, 45.0), 61.25, 1e-12));
    }

    #[test]
    fn ideal_fill_factor_reference_value() {
        let expected = (20.53 - 21.25_f64.ln()) / 21.53;
        assert!(close(ideal_fill_factor(20.53), expected, 1e-15));
        assert!(close(ideal_fill_factor(20.53), 0.8116, 1e-4));
        // kT/q at 25 °C
        assert!(close(thermal_voltage(25.0), 0.025_693, 1e-6));
    }

    #[test]
    fn fill_factor_series_correction_is_linear() {
        let mut spec = PvCellSpec {
            rs: 0.0,
            ..PvCellSpec::default()
        };
        let ff0 = fill_factor(0.6, 8.0, 25.0, &spec).unwrap();
        let v = 0.6 / thermal_voltage(25.0);
        assert!(close(ff0, ideal_fill_factor(v), 1e-15));
        spec.rs = 0.002;
        let r = 0.002 * 8.0 / 0.6;
        assert!(close(
            fill_factor(0.6, 8.0, 25.0, &spec).unwrap() / ff0,
            1.0 - r,
            1e-12
        ));
        spec.rs = 0.004;
        assert!(close(
            fill_factor(0.6, 8.0, 25.0, &spec).unwrap() / ff0,
            1.0 - 2.0 * r,
            1e-12
        ));
    }

    #[test]
    fn fill_factor_domain() {
        let spec = PvCellSpec::default();
        assert!(fill_factor(0.0, 8.0, 25.0, &spec).is_err());
        assert!(fill_factor(0.6, -1.0, 25.0, &spec).is_err());
    }

    #[test]
    fn cell_power_at_stc_and_dark() {
        let spec = PvCellSpec {
            voc_stc: 0.6,
            isc_stc: 8.0,
            kv: -0.002,
            ki: 0.003,
            rs: 0.005,
            ideality: 1.0,
            noct: 45.0,
        };
        assert_eq!(cell_max_power(0.0, 25.0, &spec), 0.0);
        let (voc, isc) = cell_operating_point(1000.0, 25.0, &spec);
        assert_eq!(voc, 0.6);
        assert_eq!(isc, 8.0);
        // FF evaluated independently from the closed form
        let v: f64 = 0.6 / (1.380_649e-23 * 298.15 / 1.602_176_634e-19);
        let ff = (v - (v + 0.72).ln()) / (v + 1.0) * (1.0 - 0.005 * 8.0 / 0.6);
        assert!(close(
            cell_max_power(1000.0, 25.0, &spec),
            0.6 * 8.0 * ff,
            1e-12
        ));
    }

    #[test]
    fn array_scaling() {
        let a = PvArraySpec {
            series_modules: 10,
            parallel_modules: 20,
            cells_per_module: 60,
        };
        assert!(close(array_available_power(2.5, &a), 30.0, 1e-12));
        let one = PvArraySpec {
            series_modules: 1,
            parallel_modules: 1,
            cells_per_module: 1,
        };
        assert_eq!(array_available_power(0.0, &a), 0.0);
        assert_eq!(array_available_power(3.7, &one), 0.0037);
    }

    #[test]
    fn sizing_hits_target() {
        let cell = PvCellSpec::default();
        let a = size_array(700.0, &cell, 60).unwrap();
        let kwp = rated_kwp(&a, &cell);
        assert!((kwp - 700.0).abs() / 700.0 < 0.01, "{kwp}");
    }

    #[test]
    fn record_validation() {
        let ts = Utc.with_ymd_and_hms(2021, 1, 1, 0, 0, 0).unwrap();
        assert!(WeatherRecord::new(ts, 100.0, 60.0, 44.0, 10.0)
            .validate()
            .is_ok());
        let err = WeatherRecord::new(ts, 100.0, 80.0, 40.0, 10.0)
            .validate()
            .unwrap_err();
        assert!(err.to_string().contains("beam+diffuse exceeds global"));
        assert!(WeatherRecord::new(ts, -1.0, 0.0, 0.0, 10.0)
            .validate()
            .is_err());
    }

    #[test]
    fn geometry_ranges() {
        assert!(SiteGeometry::from_degrees(91.0, 0.0, 0.0, 0.0, 0.2).is_err());
        assert!(SiteGeometry::from_degrees(0.0, 0.0, 95.0, 0.0, 0.2).is_err());
        assert!(SiteGeometry::from_degrees(0.0, 0.0, 10.0, 0.0, 1.5).is_err());
        let g = SiteGeometry::from_degrees(31.5, 34.4, 30.0, -10.0, 0.2).unwrap();
        assert!(close(g.tilt_deg(), 30.0, 1e-12));
    }

    #[test]
    fn cell_spec_series_limit() {
        let spec = PvCellSpec {
            rs: 0.1,
            ..PvCellSpec::default()
        };
        assert!(spec.validate().is_err());
        assert!(PvCellSpec::default().validate().is_ok());
    }
}
