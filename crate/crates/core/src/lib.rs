//! Long-run analysis of finite normal-form games under the replicator dynamic.
//!
//! * [`game`]: games, pure/mixed profiles, subgames, generators.
//! * [`response`]: response graphs, sink components, contents, isomorphism,
//!   and a catalog of named games.
//! * [`replicator`]: the replicator vector field, a fixed-step RK4 flow, and
//!   trapping-region certificates for attracting subgames.
//! * [`chain`]: box covers of the strategy space, flow-induced box graphs and
//!   their Morse sets, used as outer approximations of chain components.

pub mod chain;
pub mod error;
pub mod game;
pub mod graph;
pub mod replicator;
pub mod response;

pub use error::{Error, Result};
pub use game::{Game, MixedProfile, PureProfile, SubgameSpec};

/// Library version, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
