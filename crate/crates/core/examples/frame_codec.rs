//! Encode, decode and corrupt a sensor frame.
//!
//! ```text
//! cargo run --example frame_codec
//! ```

use tpms_delay::frame::{self, Pressure, SensorFrame};

fn main() -> tpms_delay::Result<()> {
    let reading = SensorFrame {
        sensor_id: 0x00A1_B2C3,
        pressure: Pressure::from_kpa(232.5)?,
        temperature: 31,
        alert: false,
        battery: 87,
        status: 1,
    };
    let bytes = frame::encode(&reading)?;
    println!("frame: {}", frame::to_hex(&bytes));
    println!("json:  {}", serde_json::to_string(&reading).expect("frame serializes"));

    let back = frame::decode(&bytes)?;
    println!("decoded {:.2} kPa, {} °C", back.pressure.kpa(), back.temperature);

    let mut noisy = bytes;
    noisy[5] ^= 0x04;
    match frame::decode(&noisy) {
        Ok(_) => println!("corruption went unnoticed"),
        Err(e) => println!("corrupted frame rejected: {e}"),
    }
    Ok(())
}
