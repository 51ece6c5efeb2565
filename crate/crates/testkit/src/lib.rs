//! Test support: stub SPARQL and fact-service servers, a mock encoder
//! sidecar, and seeded generators.

pub mod facts;
pub mod gen;
pub mod server;
pub mod sidecar;
pub mod sparql;

pub use server::{failing_first, fixed, RecordedRequest, StubResponse, StubServer};
pub use sidecar::{MockSidecar, SidecarFault};
