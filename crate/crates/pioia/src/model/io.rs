//! Instance file loading and writing (JSON).

use super::{validate_instance, ModelError, UcInstance};
use std::fs;
use std::path::Path;

/// Loads and validates an instance file. Quantities in the file are already
/// per-unit on `base_mva`; costs are per per-unit-hour.
pub fn load_instance(path: impl AsRef<Path>) -> Result<UcInstance, ModelError> {
    let text = fs::read_to_string(path)?;
    let inst: UcInstance = serde_json::from_str(&text)?;
    let violations = validate_instance(&inst);
    if !violations.is_empty() {
        return Err(ModelError::Validation(violations));
    }
    Ok(inst)
}

/// Writes an instance as pretty-printed JSON.
pub fn write_instance(inst: &UcInstance, path: impl AsRef<Path>) -> Result<(), ModelError> {
    let text = serde_json::to_string_pretty(inst)?;
    fs::write(path, text)?;
    Ok(())
}
