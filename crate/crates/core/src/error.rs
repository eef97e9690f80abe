use thiserror::Error;

use crate::space::{DoorId, IndoorPoint, PartitionId};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpaceError {
    #[error("no partitions")]
    NoPartitions,
    #[error("partition ids must be dense 0..n with 0 outdoors; found {found} at position {position}")]
    NonContiguousPartitionId { position: usize, found: u32 },
    #[error("door ids must be dense 0..m; found {found} at position {position}")]
    NonContiguousDoorId { position: usize, found: u32 },
    #[error("partition {0}: degenerate polygon")]
    DegeneratePolygon(PartitionId),
    #[error("partition {0}: boundary is not simple")]
    NotSimple(PartitionId),
    #[error("partitions {0} and {1} overlap")]
    Overlap(PartitionId, PartitionId),
    #[error("door {door}: door off boundary of partition {partition}")]
    DoorOffBoundary { door: DoorId, partition: PartitionId },
    #[error("door {door}: dangling partition id {partition}")]
    DanglingPartition { door: DoorId, partition: u32 },
    #[error("door {0}: no transitions")]
    NoTransitions(DoorId),
    #[error("door {0}: transition from a partition to itself")]
    SelfTransition(DoorId),
    #[error("staircase {partition}: {reason}")]
    Staircase { partition: PartitionId, reason: String },
    #[error("partition {0}: outdoor partition must have id 0 and an empty boundary")]
    Outdoor(PartitionId),
    #[error("unknown partition {0}")]
    UnknownPartition(u32),
    #[error("unknown door {0}")]
    UnknownDoor(u32),
    #[error("point {0} is outside partition {1}")]
    PointOutside(IndoorPoint, PartitionId),
    #[error("non-finite coordinate in {0}")]
    NonFinite(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("space is disconnected: {0}")]
    Disconnected(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QueryError {
    #[error("point {0} is not inside any indoor partition")]
    Unlocatable(IndoorPoint),
    #[error("k must be at least 1")]
    ZeroK,
    #[error("radius must be a non-negative finite number, got {0}")]
    BadRadius(f64),
}
