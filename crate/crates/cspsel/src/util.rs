//! Small shared helpers.

/// FNV-1a 64-bit hash; stable across platforms and releases, used for
/// deriving per-item seeds and for file checksums.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x100000001b3);
    }
    hash
}

/// Extends an FNV-1a hash with more bytes.
pub fn fnv1a64_extend(mut hash: u64, bytes: &[u8]) -> u64 {
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x100000001b3);
    }
    hash
}

/// Serialises a float with shortest round-trip precision: the printed text
/// parses back to exactly the same value.
pub fn format_float(x: f64) -> String {
    format!("{x}")
}

/// Rounds to 4 significant digits for display tables.
pub fn sig4(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let magnitude = x.abs().log10().floor() as i32;
    let scale = 10f64.powi(magnitude - 3);
    let rounded = (x / scale).round() * scale;
    if magnitude >= 3 {
        format!("{rounded:.0}")
    } else if magnitude >= -4 {
        format!("{:.*}", (3 - magnitude).max(0) as usize, rounded)
    } else {
        format!("{rounded:e}")
    }
}
