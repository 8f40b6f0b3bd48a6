//! Deflators, numéraire changes and bubbles on finite trees.
//!
//! A deflator is a strictly positive node process `Z`. It is a
//! supermartingale deflator for the market when every deflated price
//! `Z·S^i` is a supermartingale under the tree probabilities, and a
//! martingale deflator when each is a martingale. On a finite tree local
//! martingales are martingales, so the local-martingale kind is checked with
//! equalities as well.

mod bubble;
mod esmd;
mod numeraire;

pub use bubble::{
    bubble_sufficient_construction, bubble_to_arbitrage, cheapest_superreplication, detect_bubble, BubbleError, BubbleWitness, SufficientOutcome,
};
pub use esmd::find_esmd;
pub use numeraire::{
    from_wealth_plan, numeraire_identity_check, to_discounted, to_wealth_plan, wealth_process, DiscountedMarket,
    WealthPlan,
};

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::market::{is_self_financing, portfolio_values, short_positions, values_are_arbitrage, Market, MarketError, Strategy};
use crate::rational::Rational;
use crate::scenario_tree::NodeId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeflatorKind {
    Supermartingale,
    Martingale,
    LocalMartingale,
}

impl DeflatorKind {
    fn requires_equality(self) -> bool {
        !matches!(self, DeflatorKind::Supermartingale)
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DeflatorError {
    #[error(transparent)]
    Market(#[from] MarketError),
    #[error("deflator has {found} values for {expected} nodes")]
    Length { expected: usize, found: usize },
    #[error("deflator value at {node} must be strictly positive, got {value}")]
    NonPositive { node: NodeId, value: String },
    #[error("asset {0} is not a savings account: its price is not a function of time alone")]
    NotDepthMeasurable(usize),
    /// Would contradict the finite existence result; never expected.
    #[error("no positive one-step density at {0}")]
    Infeasible(NodeId),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Deflator {
    pub kind: DeflatorKind,
    #[serde(serialize_with = "crate::io::serialize_node_values")]
    z: Vec<Rational>,
}

impl Deflator {
    /// Wraps dense node values without validation; see [`Deflator::try_new`].
    pub fn new(z: Vec<Rational>, kind: DeflatorKind) -> Self {
        Deflator { kind, z }
    }

    pub fn try_new(market: &Market, z: Vec<Rational>, kind: DeflatorKind) -> Result<Self, DeflatorError> {
        let d = Deflator::new(z, kind);
        d.check_positive(market)?;
        Ok(d)
    }

    /// `Z ≡ 1`.
    pub fn unit(market: &Market, kind: DeflatorKind) -> Self {
        Deflator::new(vec![Rational::from_integer(1.into()); market.tree().len()], kind)
    }

    pub fn value(&self, node: NodeId) -> &Rational {
        &self.z[node.0]
    }

    pub fn values(&self) -> &[Rational] {
        &self.z
    }

    pub fn check_positive(&self, market: &Market) -> Result<(), DeflatorError> {
        let n = market.tree().len();
        if self.z.len() != n {
            return Err(DeflatorError::Length {
                expected: n,
                found: self.z.len(),
            });
        }
        match self.z.iter().position(|v| !v.is_positive()) {
            Some(k) => Err(DeflatorError::NonPositive {
                node: NodeId(k),
                value: crate::rational::to_string(&self.z[k]),
            }),
            None => Ok(()),
        }
    }

    /// `Z = Y / S^k` for a deflator `Y` of the market discounted by asset `k`.
    pub fn from_discounted(market: &Market, numeraire: usize, y: &Deflator) -> Result<Self, DeflatorError> {
        market.check_asset(numeraire)?;
        y.check_positive(market)?;
        let z = market
            .tree()
            .node_ids()
            .map(|n| y.value(n) / &market.price(n)[numeraire])
            .collect();
        Ok(Deflator::new(z, y.kind))
    }

    /// `Z = D / B` for a savings account `B` (an asset whose price depends on
    /// time only) and a positive process `D`.
    pub fn from_savings_account(market: &Market, savings: usize, d: &Deflator) -> Result<Self, DeflatorError> {
        market.check_asset(savings)?;
        if !market.is_depth_measurable(savings) {
            return Err(DeflatorError::NotDepthMeasurable(savings));
        }
        Self::from_discounted(market, savings, d)
    }

    /// `E[Z(c) X(c) | n]` and `Z(n) X(n)` at an internal node.
    fn step(&self, market: &Market, node: NodeId, x: impl Fn(NodeId) -> Rational) -> (Rational, Rational) {
        let tree = market.tree();
        let ahead = tree.one_step_expectation(node, |c| &self.z[c.0] * x(c));
        (ahead, &self.z[node.0] * x(node))
    }

    /// Every node and asset where the deflated price breaks the condition
    /// required by `kind`.
    pub fn asset_violations(&self, market: &Market) -> Vec<AssetViolation> {
        let tree = market.tree();
        let mut out = Vec::new();
        for node in tree.internal_nodes() {
            for asset in 0..market.assets() {
                let (ahead, now) = self.step(market, node, |n| market.price(n)[asset].clone());
                let bad = if self.kind.requires_equality() { ahead != now } else { ahead > now };
                if bad {
                    out.push(AssetViolation {
                        node,
                        asset,
                        expected_next: ahead,
                        current: now,
                    });
                }
            }
        }
        out
    }

    pub fn is_supermartingale_for(&self, market: &Market) -> bool {
        self.check_positive(market).is_ok()
            && Deflator::new(self.z.clone(), DeflatorKind::Supermartingale)
                .asset_violations(market)
                .is_empty()
    }

    pub fn is_martingale_for(&self, market: &Market) -> bool {
        self.check_positive(market).is_ok()
            && Deflator::new(self.z.clone(), DeflatorKind::Martingale)
                .asset_violations(market)
                .is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AssetViolation {
    pub node: NodeId,
    pub asset: usize,
    /// `E[Z S^i (child) | node]`.
    #[serde(serialize_with = "crate::io::serialize_rational")]
    pub expected_next: Rational,
    /// `Z S^i (node)`.
    #[serde(serialize_with = "crate::io::serialize_rational")]
    pub current: Rational,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PortfolioCheck {
    /// Not part of the long-only self-financing family; not checked.
    Skipped { reason: String },
    Checked {
        /// Nodes where `Z·S^δ` increases in conditional expectation.
        supermartingale_violations: Vec<NodeId>,
        is_arbitrage: bool,
    },
}

impl PortfolioCheck {
    pub fn passed(&self) -> bool {
        match self {
            PortfolioCheck::Skipped { .. } => true,
            PortfolioCheck::Checked {
                supermartingale_violations,
                is_arbitrage,
            } => supermartingale_violations.is_empty() && !is_arbitrage,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeflatorReport {
    pub positive: bool,
    pub asset_violations: Vec<AssetViolation>,
    pub portfolios: Vec<PortfolioCheck>,
}

impl DeflatorReport {
    pub fn passed(&self) -> bool {
        self.positive && self.asset_violations.is_empty() && self.portfolios.iter().all(PortfolioCheck::passed)
    }

    pub fn checked_portfolios(&self) -> usize {
        self.portfolios
            .iter()
            .filter(|p| matches!(p, PortfolioCheck::Checked { .. }))
            .count()
    }
}

/// Checks the asset-wise deflator condition and, for every supplied long-only
/// self-financing portfolio, that `Z·S^δ` is a supermartingale and that the
/// portfolio is not an arbitrage.
pub fn verify_deflator(market: &Market, z: &Deflator, portfolios: &[Strategy]) -> DeflatorReport {
    if z.check_positive(market).is_err() {
        return DeflatorReport {
            positive: false,
            asset_violations: Vec::new(),
            portfolios: Vec::new(),
        };
    }
    let tree = market.tree();
    let checks = portfolios
        .iter()
        .map(|s| {
            match is_self_financing(market, s) {
                Err(e) => return PortfolioCheck::Skipped { reason: e.to_string() },
                Ok(sf) if !sf.holds() => {
                    return PortfolioCheck::Skipped {
                        reason: "not self-financing".into(),
                    }
                }
                Ok(_) => {}
            }
            if !short_positions(tree, s).is_long_only() {
                return PortfolioCheck::Skipped {
                    reason: "not long-only".into(),
                };
            }
            let values = portfolio_values(market, s).expect("checked self-financing");
            let supermartingale_violations = tree
                .internal_nodes()
                .filter(|&n| {
                    let (ahead, now) = z.step(market, n, |m| values.at(m).clone());
                    ahead > now
                })
                .collect();
            PortfolioCheck::Checked {
                supermartingale_violations,
                is_arbitrage: values_are_arbitrage(tree, &values),
            }
        })
        .collect();
    DeflatorReport {
        positive: true,
        asset_violations: z.asset_violations(market),
        portfolios: checks,
    }
}

/// Terminal expectation `E[X_T Z_T]` of a node process.
pub fn deflated_terminal_value(market: &Market, z: &Deflator, x: impl Fn(NodeId) -> Rational) -> Rational {
    let tree = market.tree();
    tree.leaves()
        .iter()
        .map(|&n| tree.path_prob(n) * z.value(n) * x(n))
        .fold(Rational::zero(), |acc, v| acc + v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn ints(xs: &[i64]) -> Vec<Rational> {
        xs.iter().map(|&x| int(x)).collect()
    }

    fn example_one() -> Market {
        let e = ratio(2718, 1000);
        Market::one_period(
            vec![ratio(1, 2), ratio(1, 2)],
            ints(&[1, 1]),
            vec![vec![e.clone(), int(1)], vec![e, int(1)]],
        )
        .unwrap()
    }

    #[test]
    fn unit_deflator_on_martingale_market() {
        let m = Market::one_period(
            vec![ratio(1, 2), ratio(1, 2)],
            ints(&[1, 2]),
            vec![ints(&[1, 3]), ints(&[1, 1])],
        )
        .unwrap();
        let z = Deflator::unit(&m, DeflatorKind::Supermartingale);
        assert!(verify_deflator(&m, &z, &[]).passed());
        assert!(z.is_martingale_for(&m));
    }

    #[test]
    fn unit_deflator_flags_growing_asset() {
        let m = example_one();
        let z = Deflator::unit(&m, DeflatorKind::Supermartingale);
        let report = verify_deflator(&m, &z, &[]);
        assert!(!report.passed());
        assert_eq!(report.asset_violations.len(), 1);
        assert_eq!(report.asset_violations[0].asset, 0);
    }

    #[test]
    fn non_positive_values_rejected() {
        let m = example_one();
        let err = Deflator::try_new(&m, ints(&[1, 0, 1]), DeflatorKind::Supermartingale).unwrap_err();
        assert!(matches!(err, DeflatorError::NonPositive { node: NodeId(1), .. }));
        assert!(matches!(
            Deflator::try_new(&m, ints(&[1]), DeflatorKind::Supermartingale),
            Err(DeflatorError::Length { .. })
        ));
    }

    #[test]
    fn savings_account_constructor_checks_predictability() {
        let m = example_one();
        let d = Deflator::unit(&m, DeflatorKind::Martingale);
        let z = Deflator::from_savings_account(&m, 1, &d).unwrap();
        assert_eq!(z.values(), d.values());
        let random_first = Market::one_period(
            vec![ratio(1, 2), ratio(1, 2)],
            ints(&[1, 2]),
            vec![ints(&[1, 3]), ints(&[1, 1])],
        )
        .unwrap();
        assert_eq!(
            Deflator::from_savings_account(&random_first, 1, &d).unwrap_err(),
            DeflatorError::NotDepthMeasurable(1)
        );
    }

    #[test]
    fn skipped_portfolios_are_reported() {
        let m = example_one();
        let z = Deflator::new(vec![int(1), ratio(1, 3), ratio(1, 3)], DeflatorKind::Supermartingale);
        let short = Strategy::buy_and_hold(m.tree(), &ints(&[1, -1]));
        let long = Strategy::buy_and_hold(m.tree(), &ints(&[1, 1]));
        let report = verify_deflator(&m, &z, &[short, long]);
        assert!(matches!(report.portfolios[0], PortfolioCheck::Skipped { .. }));
        assert_eq!(report.checked_portfolios(), 1);
        assert!(report.passed());
    }
}
