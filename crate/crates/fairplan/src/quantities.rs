//! Unit-carrying scalar quantities.
//!
//! Every quantity wraps a non-negative, finite `f64` and is validated at
//! construction, so downstream arithmetic never has to re-check inputs.
//! Data volumes and data rates additionally carry the byte convention
//! ([`Convention::Decimal`] or [`Convention::Binary`]) that was used when the
//! value was written down, so a figure quoted as "16.5 kByte" by a group that
//! counts in powers of two keeps meaning 16.5 KiB all the way to the report.
//!
//! Arithmetic between quantities is typed: an event rate times an event size
//! is a data rate, a data rate times a duration is a volume. Mixing
//! incompatible dimensions is a compile error rather than a runtime check.

use serde::{Deserialize, Serialize};

use crate::{finite_nonneg, finite_positive, Result};

/// How metric prefixes on byte figures are interpreted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Convention {
    /// 1 kB = 1000 B, 1 TB = 10^12 B.
    Decimal,
    /// 1 kB = 1024 B, 1 TB = 2^40 B.
    Binary,
}

impl Convention {
    /// The multiplier between adjacent prefixes.
    pub fn step(self) -> f64 {
        match self {
            Convention::Decimal => 1000.0,
            Convention::Binary => 1024.0,
        }
    }
}

/// Metric prefix for byte quantities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Prefix {
    Kilo,
    Mega,
    Giga,
    Tera,
    Peta,
}

impl Prefix {
    fn exponent(self) -> i32 {
        match self {
            Prefix::Kilo => 1,
            Prefix::Mega => 2,
            Prefix::Giga => 3,
            Prefix::Tera => 4,
            Prefix::Peta => 5,
        }
    }

    /// Bytes per unit under the given convention, e.g. `Tera` under
    /// `Binary` is 2^40.
    pub fn factor(self, convention: Convention) -> f64 {
        convention.step().powi(self.exponent())
    }
}

/// An amount of data in bytes, tagged with the convention its prefixed
/// figures are quoted in.
///
/// The tag is presentation metadata: sums across volumes always operate on
/// raw bytes and keep the left-hand operand's tag.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct DataVolume {
    bytes: f64,
    convention: Convention,
}

impl DataVolume {
    pub fn from_bytes(bytes: f64, convention: Convention) -> Result<Self> {
        Ok(Self {
            bytes: finite_nonneg("data volume", bytes)?,
            convention,
        })
    }

    /// A volume quoted as `value` units of `prefix`, e.g.
    /// `DataVolume::new(48.7, Prefix::Kilo, Convention::Decimal)` is 48,700 B.
    pub fn new(value: f64, prefix: Prefix, convention: Convention) -> Result<Self> {
        let value = finite_nonneg("data volume", value)?;
        Ok(Self {
            bytes: value * prefix.factor(convention),
            convention,
        })
    }

    pub fn zero(convention: Convention) -> Self {
        Self {
            bytes: 0.0,
            convention,
        }
    }

    pub fn bytes(self) -> f64 {
        self.bytes
    }

    pub fn convention(self) -> Convention {
        self.convention
    }

    /// The value in `prefix` units under the volume's own convention.
    pub fn value_in(self, prefix: Prefix) -> f64 {
        self.bytes / prefix.factor(self.convention)
    }

    /// The value in `prefix` units under an explicit convention, for
    /// cross-convention display (facility totals are printed decimal even
    /// when some inflows were quoted binary).
    pub fn value_as(self, prefix: Prefix, convention: Convention) -> f64 {
        self.bytes / prefix.factor(convention)
    }

    pub fn with_convention(mut self, convention: Convention) -> Self {
        self.convention = convention;
        self
    }

    /// Scales by a non-negative factor (reduction, contingency, share).
    pub fn scale(self, factor: f64) -> Result<Self> {
        let factor = finite_nonneg("scale factor", factor)?;
        Ok(Self {
            bytes: self.bytes * factor,
            convention: self.convention,
        })
    }
}

impl std::ops::Add for DataVolume {
    type Output = DataVolume;

    fn add(self, rhs: DataVolume) -> DataVolume {
        DataVolume {
            bytes: self.bytes + rhs.bytes,
            convention: self.convention,
        }
    }
}

impl std::iter::Sum for DataVolume {
    fn sum<I: Iterator<Item = DataVolume>>(iter: I) -> DataVolume {
        iter.fold(DataVolume::zero(Convention::Decimal), |acc, v| {
            DataVolume {
                bytes: acc.bytes + v.bytes,
                convention: acc.convention,
            }
        })
    }
}

/// Events per second.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct EventRate(f64);

impl EventRate {
    pub fn per_second(value: f64) -> Result<Self> {
        Ok(Self(finite_nonneg("event rate", value)?))
    }

    pub fn get(self) -> f64 {
        self.0
    }

    pub fn scale(self, factor: f64) -> Result<Self> {
        let factor = finite_nonneg("scale factor", factor)?;
        Ok(Self(self.0 * factor))
    }

    pub fn min(self, other: EventRate) -> EventRate {
        EventRate(self.0.min(other.0))
    }
}

/// Bytes per second, carrying the convention of the volume it came from.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct DataRate {
    bytes_per_second: f64,
    convention: Convention,
}

impl DataRate {
    pub fn from_bytes_per_second(value: f64, convention: Convention) -> Result<Self> {
        Ok(Self {
            bytes_per_second: finite_nonneg("data rate", value)?,
            convention,
        })
    }

    pub fn bytes_per_second(self) -> f64 {
        self.bytes_per_second
    }

    pub fn convention(self) -> Convention {
        self.convention
    }

    /// The rate in `prefix` bytes per second under its own convention.
    pub fn value_in(self, prefix: Prefix) -> f64 {
        self.bytes_per_second / prefix.factor(self.convention)
    }

    pub fn value_as(self, prefix: Prefix, convention: Convention) -> f64 {
        self.bytes_per_second / prefix.factor(convention)
    }

    pub fn scale(self, factor: f64) -> Result<Self> {
        let factor = finite_nonneg("scale factor", factor)?;
        Ok(Self {
            bytes_per_second: self.bytes_per_second * factor,
            convention: self.convention,
        })
    }
}

impl std::ops::Add for DataRate {
    type Output = DataRate;

    fn add(self, rhs: DataRate) -> DataRate {
        DataRate {
            bytes_per_second: self.bytes_per_second + rhs.bytes_per_second,
            convention: self.convention,
        }
    }
}

/// rate [1/s] x size [B] = data rate [B/s]; the result keeps the size's
/// convention.
impl std::ops::Mul<DataVolume> for EventRate {
    type Output = DataRate;

    fn mul(self, size: DataVolume) -> DataRate {
        DataRate {
            bytes_per_second: self.0 * size.bytes(),
            convention: size.convention(),
        }
    }
}

/// rate [B/s] x time [s] = volume [B].
impl std::ops::Mul<Duration> for DataRate {
    type Output = DataVolume;

    fn mul(self, time: Duration) -> DataVolume {
        DataVolume {
            bytes: self.bytes_per_second * time.seconds(),
            convention: self.convention,
        }
    }
}

/// A span of time in seconds.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Duration(f64);

impl Duration {
    pub fn from_seconds(value: f64) -> Result<Self> {
        Ok(Self(finite_nonneg("duration", value)?))
    }

    pub fn from_days(days: f64) -> Result<Self> {
        Ok(Self(finite_nonneg("duration", days)? * 86_400.0))
    }

    pub fn seconds(self) -> f64 {
        self.0
    }

    pub fn days(self) -> f64 {
        self.0 / 86_400.0
    }
}

/// Processing capacity in HEPSpec06 benchmark units.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct ComputePower(f64);

impl ComputePower {
    pub fn hs06(value: f64) -> Result<Self> {
        Ok(Self(finite_nonneg("compute power", value)?))
    }

    pub fn zero() -> Self {
        Self(0.0)
    }

    pub fn get(self) -> f64 {
        self.0
    }

    pub fn kilo(self) -> f64 {
        self.0 / 1000.0
    }

    pub fn scale(self, factor: f64) -> Result<Self> {
        let factor = finite_nonneg("scale factor", factor)?;
        Ok(Self(self.0 * factor))
    }
}

impl std::ops::Add for ComputePower {
    type Output = ComputePower;

    fn add(self, rhs: ComputePower) -> ComputePower {
        ComputePower(self.0 + rhs.0)
    }
}

impl std::iter::Sum for ComputePower {
    fn sum<I: Iterator<Item = ComputePower>>(iter: I) -> ComputePower {
        iter.fold(ComputePower(0.0), |acc, v| ComputePower(acc.0 + v.0))
    }
}

/// Scales a benchmark figure linearly with core clock, for transferring a
/// measured machine rating to the same machine at a different frequency.
///
/// Clock scaling is an approximation that holds between close siblings of
/// the same microarchitecture; both clocks must be positive.
pub fn hs06_scale_by_clock(
    reference: ComputePower,
    reference_mhz: f64,
    target_mhz: f64,
) -> Result<ComputePower> {
    let reference_mhz = finite_positive("reference clock", reference_mhz)?;
    let target_mhz = finite_positive("target clock", target_mhz)?;
    Ok(ComputePower(reference.get() * target_mhz / reference_mhz))
}

/// Convenience constructor mirroring how scenario files quote volumes.
pub fn convert_volume(value: f64, prefix: Prefix, convention: Convention) -> Result<DataVolume> {
    DataVolume::new(value, prefix, convention)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prefix_factors_follow_convention() {
        assert_eq!(Prefix::Kilo.factor(Convention::Decimal), 1000.0);
        assert_eq!(Prefix::Kilo.factor(Convention::Binary), 1024.0);
        assert_eq!(Prefix::Tera.factor(Convention::Decimal), 1e12);
        assert_eq!(Prefix::Tera.factor(Convention::Binary), 1024f64.powi(4));
        assert_eq!(Prefix::Peta.factor(Convention::Decimal), 1e15);
    }

    #[test]
    fn volume_round_trips_through_prefixes() {
        let v = DataVolume::new(48.7, Prefix::Kilo, Convention::Decimal).unwrap();
        assert_eq!(v.bytes(), 48_700.0);
        assert_eq!(v.value_in(Prefix::Kilo), 48.7);

        let w = DataVolume::new(16.5, Prefix::Kilo, Convention::Binary).unwrap();
        assert_eq!(w.bytes(), 16.5 * 1024.0);
        assert_eq!(w.value_in(Prefix::Kilo), 16.5);
        // the same bytes viewed decimal are a larger count
        assert!(w.value_as(Prefix::Kilo, Convention::Decimal) > 16.5);
    }

    #[test]
    fn mixed_convention_addition_preserves_bytes() {
        let a = DataVolume::new(1.0, Prefix::Tera, Convention::Decimal).unwrap();
        let b = DataVolume::new(1.0, Prefix::Tera, Convention::Binary).unwrap();
        let sum = a + b;
        assert_eq!(sum.bytes(), 1e12 + 1024f64.powi(4));
        assert_eq!(sum.convention(), Convention::Decimal);
    }

    #[test]
    fn invalid_values_are_rejected() {
        assert!(DataVolume::from_bytes(-1.0, Convention::Decimal).is_err());
        assert!(DataVolume::from_bytes(f64::NAN, Convention::Decimal).is_err());
        assert!(EventRate::per_second(f64::INFINITY).is_err());
        assert!(Duration::from_seconds(-0.5).is_err());
        assert!(ComputePower::hs06(-1.0).is_err());
    }

    #[test]
    fn typed_products_chain_rates_and_volumes() {
        let rate = EventRate::per_second(5.0e6).unwrap();
        let size = DataVolume::from_bytes(48_660.0, Convention::Decimal).unwrap();
        let data = rate * size;
        assert_eq!(data.bytes_per_second(), 2.433e11);

        let run = Duration::from_seconds(2.75e6).unwrap();
        let volume = data * run;
        assert!((volume.value_in(Prefix::Peta) - 669.075).abs() < 1e-3);
    }

    #[test]
    fn clock_scaling_is_linear() {
        // a 40-core machine rated 654 at 2400 MHz lands near 616 at 2260 MHz
        let reference = ComputePower::hs06(654.0).unwrap();
        let scaled = hs06_scale_by_clock(reference, 2400.0, 2260.0).unwrap();
        assert!((scaled.get() - 615.85).abs() < 0.01);

        let same = hs06_scale_by_clock(reference, 2400.0, 2400.0).unwrap();
        assert_eq!(same.get(), 654.0);

        assert!(hs06_scale_by_clock(reference, 0.0, 2400.0).is_err());
        assert!(hs06_scale_by_clock(reference, 2400.0, -1.0).is_err());
    }

    #[test]
    fn duration_day_conversions() {
        let week = Duration::from_days(7.0).unwrap();
        assert_eq!(week.seconds(), 604_800.0);
        assert_eq!(week.days(), 7.0);
    }
}
