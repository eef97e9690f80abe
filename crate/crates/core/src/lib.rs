//! Indoor spatial queries over a shared floorplan model.
//!
//! Five interchangeable structures answer range, k-nearest-neighbor and
//! shortest path/distance queries: [`idmodel::IdModel`], [`idindex::IdIndex`],
//! [`cindex::CIndex`], and the IP/VIP trees in [`iptree`]. [`oracle`] is a
//! plain Dijkstra reference used to check all of them. [`benchgen`] builds the
//! synthetic building family and workloads, and [`bench`] runs and reports the
//! benchmark tasks.

pub mod bench;
pub mod benchgen;
pub mod cindex;
pub mod decompose;
pub mod error;
pub mod fixtures;
pub mod format;
pub mod geom;
pub mod idindex;
pub mod idmodel;
pub mod iptree;
pub mod metrics;
pub mod oracle;
pub mod query;
pub mod space;
mod traverse;

pub use error::{QueryError, SpaceError};
pub use query::{build_index, IndexKind, IndoorIndex, KnnResult, SpdqResult};
pub use space::{Door, DoorId, IndoorObject, IndoorPath, IndoorPoint, IndoorSpace, ObjectId, Partition, PartitionId, PartitionKind};
