//! Two-armed mode-selection bandits.

pub mod env;
pub mod episode;
pub mod kl;
pub mod policy;
pub mod state;

pub use env::{ArmSchedule, Environment};
pub use episode::{average_regret, run_episode, RegretBaseline, RegretTrace};
pub use kl::{kl_divergence_bernoulli, kl_ucb_index};
pub use policy::{Policy, Selector};
pub use state::PolicyState;
