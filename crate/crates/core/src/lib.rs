//! Exact arbitrage analysis on finite scenario-tree markets, with a Monte
//! Carlo companion for the Bessel(3) market.
//!
//! * [`scenario_tree`], [`market`]: trees, prices, strategies, portfolio values.
//! * [`arbitrage`]: exact detection with certificates, the one-period
//!   arbitrage cone, and sequence classifiers.
//! * [`deflator`]: supermartingale deflators, numéraire changes, bubbles.
//! * [`continuous`]: simulation of Bessel-type markets and the explicit
//!   short-selling arbitrage in the Bessel(3) market.

pub mod arbitrage;
pub mod cli;
pub mod continuous;
pub mod deflator;
pub mod io;
pub mod linalg;
pub mod lp;
pub mod market;
pub mod random;
pub mod rational;
pub mod scenario_tree;
mod tree_lp;

pub use arbitrage::{arbitrage_cone, detect_arbitrage, ArbitrageCertificate, NoArbitrageCertificate, Verdict};
pub use market::{Market, PortfolioValues, Strategy};
pub use rational::Rational;
pub use scenario_tree::{NodeId, ScenarioTree};
