//! System model: constellations, channels, antenna partitions, message volumes.

mod constellation;
mod system;
mod volume;

pub use constellation::{Constellation, ConstellationKind};
pub use system::{
    sample_rayleigh_channel, sample_symbols, sample_unit_noise, transmit, ChannelRealization,
    ClusterPartition, SystemConfig,
};
pub use volume::{message_volume, MessageVolume, BYTES_PER_MIB, DEFAULT_BYTES_PER_ENTRY};
