//! Surrogate production per mode and splicing.

mod backend;
mod fake;
mod propose;
mod splice;

pub use backend::{
    BackendConfig, BackendError, BackendHealth, CommandBackend, MockEchoDemo, MockPool, SlmBackend,
    DEFAULT_SLM_COMMAND, MOCK_ECHO_DEMO, MOCK_POOL,
};
pub use fake::{fake_value, FakeGenState, FakeStream};
pub use propose::{redact_placeholder, routes_to_slm, Proposer, FAKE_FAMILY, REDACT_FAMILY};
pub use splice::{splice, splice_with_offsets};
