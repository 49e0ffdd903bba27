//! HTTP service over an on-disk store of touch sessions.

pub mod api;
pub mod store;

pub use api::{router, AppState, ServiceConfig};
pub use store::{SessionStore, StoreError};
