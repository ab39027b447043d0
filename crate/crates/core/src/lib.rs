//! Contingency-table transformations for counterfactual analysis.
//!
//! Two ways to move a table onto new row and column totals:
//!
//! * [`ipf`]: iterative proportional fitting, which keeps every odds-ratio of
//!   the seed and so minimizes the KL directed divergence to it;
//! * [`nm`]: the NM method, which keeps the (generalized) Liu–Lu sorting
//!   indicator, an ordinal measure based on the natural ranking of tables.
//!
//! Around them sit the indicators themselves ([`indicators`]), a two-factor
//! decomposition with interaction term ([`decompose`]), Agresti–Coull share
//! estimates ([`survey`]), and a seeded sampling simulator ([`sim`]).
//!
//! ```
//! use contab::tables::{margins, ContingencyTable};
//! use contab::{ipf, nm};
//!
//! let seed = ContingencyTable::from_rows(&[[500.0, 500.0], [100.0, 900.0]]).unwrap();
//! let later = ContingencyTable::from_rows(&[[500.0, 700.0], [100.0, 700.0]]).unwrap();
//! let targets = margins(&later);
//!
//! let by_nm = nm::nm_fit(&seed, &targets).unwrap();
//! assert_eq!(by_nm.table.to_rows(), vec![vec![520.0, 680.0], vec![80.0, 720.0]]);
//!
//! let by_ipf = ipf::ipf_fit(&seed, &targets, &ipf::IpfConfig::default()).unwrap();
//! assert!(by_ipf.converged);
//! assert!((by_ipf.table.get(0, 0) - 534.4646).abs() < 1e-3);
//! ```

pub mod cli;
pub mod decompose;
pub mod error;
pub mod indicators;
pub mod ipf;
pub mod nm;
pub mod sim;
pub mod survey;
pub mod tables;

pub use error::{Error, Result};
pub use tables::{ContingencyTable, MarginTargets};
