/// Two 4-byte floats per complex entry.
pub const DEFAULT_BYTES_PER_ENTRY: u64 = 8;
pub const BYTES_PER_MIB: f64 = 1_048_576.0;

/// Bytes gathered at the central unit per coherence block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MessageVolume {
    /// Gram matrices (once per subcarrier) plus MRC vectors (every symbol).
    pub pd_bytes: u64,
    /// Local estimates only.
    pub fd_bytes: u64,
    /// Consensus sharing, per iteration: gather plus broadcast.
    pub cs_bytes_per_iteration: u64,
}

impl MessageVolume {
    pub fn pd_mib(&self) -> f64 {
        self.pd_bytes as f64 / BYTES_PER_MIB
    }

    pub fn fd_mib(&self) -> f64 {
        self.fd_bytes as f64 / BYTES_PER_MIB
    }

    pub fn cs_mib(&self) -> f64 {
        self.cs_bytes_per_iteration as f64 / BYTES_PER_MIB
    }
}

pub fn message_volume(
    users: u64,
    subcarriers: u64,
    symbols: u64,
    clusters: u64,
    bytes_per_entry: u64,
) -> MessageVolume {
    let fd_entries = users * subcarriers * symbols * clusters;
    let pd_entries = users * users * subcarriers * clusters + fd_entries;
    MessageVolume {
        pd_bytes: pd_entries * bytes_per_entry,
        fd_bytes: fd_entries * bytes_per_entry,
        cs_bytes_per_iteration: 2 * fd_entries * bytes_per_entry,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lte_like_preset() {
        let v = message_volume(16, 1200, 14, 4, DEFAULT_BYTES_PER_ENTRY);
        assert_eq!(v.pd_bytes, 18_432_000);
        assert_eq!(v.fd_bytes, 8_601_600);
        assert_eq!(v.cs_bytes_per_iteration, 2 * v.fd_bytes);
        assert_eq!(format!("{:.2}", v.pd_mib()), "17.58");
        assert_eq!(format!("{:.2}", v.fd_mib()), "8.20");
        // exactly 16.40625 MiB
        assert_eq!(v.cs_mib(), 16.40625);
    }

    #[test]
    fn single_cluster_and_linearity() {
        let one = message_volume(16, 1200, 14, 1, 1);
        assert_eq!(one.pd_bytes, 16 * 16 * 1200 + 16 * 1200 * 14);
        let two = message_volume(16, 1200, 14, 2, 1);
        assert_eq!(two.pd_bytes, 2 * one.pd_bytes);
        assert_eq!(two.fd_bytes, 2 * one.fd_bytes);
        assert_eq!(two.cs_bytes_per_iteration, 2 * one.cs_bytes_per_iteration);
    }
}
