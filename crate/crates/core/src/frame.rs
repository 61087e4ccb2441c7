//! Ten-byte tire-pressure sensor frame.
//!
//! ```text
//! offset  size  field
//!      0     4  sensor id, big-endian
//!      4     2  pressure, big-endian, units of 0.25 kPa (0..=5600)
//!      6     1  temperature + 40 °C (0..=165)
//!      7     1  flags: bit 7 alert, bits 3..0 status, bits 6..4 zero
//!      8     1  battery percent (0..=100)
//!      9     1  checksum, sum of bytes 0..9 mod 256
//! ```
//!
//! The field set follows common TPMS payloads; the widths and scalings are
//! this crate's own fixed choice.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const FRAME_LEN: usize = 10;

pub const PRESSURE_MAX_KPA: f64 = 1400.0;
pub const TEMPERATURE_MIN_C: i16 = -40;
pub const TEMPERATURE_MAX_C: i16 = 125;

const PRESSURE_MAX_RAW: u16 = 5600;
const ALERT_BIT: u8 = 0x80;
const STATUS_MASK: u8 = 0x0F;
const RESERVED_MASK: u8 = 0x70;

/// Tire pressure in quarter-kPa steps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pressure(u16);

impl Pressure {
    pub fn from_kpa(kpa: f64) -> Result<Self> {
        let quarters = kpa * 4.0;
        if !(0.0..=PRESSURE_MAX_KPA).contains(&kpa) || quarters.fract() != 0.0 {
            return Err(out_of_range("pressure", kpa));
        }
        Ok(Pressure(quarters as u16))
    }

    pub fn from_quarters(raw: u16) -> Result<Self> {
        if raw > PRESSURE_MAX_RAW {
            return Err(out_of_range("pressure", raw));
        }
        Ok(Pressure(raw))
    }

    pub fn quarters(self) -> u16 {
        self.0
    }

    pub fn kpa(self) -> f64 {
        f64::from(self.0) / 4.0
    }
}

impl Serialize for Pressure {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_f64(self.kpa())
    }
}

impl<'de> Deserialize<'de> for Pressure {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let kpa = f64::deserialize(deserializer)?;
        Pressure::from_kpa(kpa).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SensorFrame {
    pub sensor_id: u32,
    pub pressure: Pressure,
    /// Degrees Celsius.
    pub temperature: i16,
    pub alert: bool,
    /// Percent.
    pub battery: u8,
    /// 4-bit operational state code.
    pub status: u8,
}

fn out_of_range(field: &'static str, value: impl ToString) -> Error {
    Error::FieldOutOfRange { field, value: value.to_string() }
}

impl SensorFrame {
    pub fn validate(&self) -> Result<()> {
        if !(TEMPERATURE_MIN_C..=TEMPERATURE_MAX_C).contains(&self.temperature) {
            return Err(out_of_range("temperature", self.temperature));
        }
        if self.battery > 100 {
            return Err(out_of_range("battery", self.battery));
        }
        if self.status > STATUS_MASK {
            return Err(out_of_range("status", self.status));
        }
        Pressure::from_quarters(self.pressure.0)?;
        Ok(())
    }
}

pub fn checksum(bytes: &[u8]) -> u8 {
    bytes.iter().fold(0u8, |acc, b| acc.wrapping_add(*b))
}

pub fn encode(frame: &SensorFrame) -> Result<[u8; FRAME_LEN]> {
    frame.validate()?;
    let mut out = [0u8; FRAME_LEN];
    out[0..4].copy_from_slice(&frame.sensor_id.to_be_bytes());
    out[4..6].copy_from_slice(&frame.pressure.0.to_be_bytes());
    out[6] = (frame.temperature - TEMPERATURE_MIN_C) as u8;
    out[7] = if frame.alert { ALERT_BIT } else { 0 } | frame.status;
    out[8] = frame.battery;
    out[9] = checksum(&out[..9]);
    Ok(out)
}

pub fn decode(bytes: &[u8]) -> Result<SensorFrame> {
    if bytes.len() != FRAME_LEN {
        return Err(Error::BadLength { expected: FRAME_LEN, got: bytes.len() });
    }
    let computed = checksum(&bytes[..9]);
    if computed != bytes[9] {
        return Err(Error::ChecksumMismatch { stored: bytes[9], computed });
    }
    let flags = bytes[7];
    if flags & RESERVED_MASK != 0 {
        return Err(out_of_range("flags", format!("{flags:#04x}")));
    }
    let frame = SensorFrame {
        sensor_id: u32::from_be_bytes([bytes[0], bytes[1], bytes[2], bytes[3]]),
        pressure: Pressure::from_quarters(u16::from_be_bytes([bytes[4], bytes[5]]))?,
        temperature: i16::from(bytes[6]) + TEMPERATURE_MIN_C,
        alert: flags & ALERT_BIT != 0,
        battery: bytes[8],
        status: flags & STATUS_MASK,
    };
    frame.validate()?;
    Ok(frame)
}

pub fn to_hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect::<Vec<_>>().join(" ")
}

/// Parses hex with optional whitespace, `:` or `-` separators and `0x` prefix.
pub fn from_hex(text: &str) -> Result<Vec<u8>> {
    let digits: String = text
        .trim()
        .trim_start_matches("0x")
        .chars()
        .filter(|c| !c.is_whitespace() && *c != ':' && *c != '-')
        .collect();
    if !digits.len().is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!("odd number of hex digits in `{text}`")));
    }
    (0..digits.len())
        .step_by(2)
        .map(|i| {
            u8::from_str_radix(&digits[i..i + 2], 16)
                .map_err(|_| Error::InvalidArgument(format!("invalid hex `{}`", &digits[i..i + 2])))
        })
        .collect()
}
