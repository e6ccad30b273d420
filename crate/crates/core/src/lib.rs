//! Time-dependent harmonic oscillators through the Ermakov–Pinney equation.
//!
//! A [`models::ModelDescriptor`] supplies `m(t)`, `ω(t)` and derivatives. The
//! auxiliary amplitude `σ` solving `σ̈ + Ω²σ = K/σ³` ([`ermakov`]) then
//! determines the phase `θ = ∫dt/σ²`, the quadrature variances, the
//! uncertainty product and the Bogolubov coefficients ([`quantum`]).
//! [`minimum`] handles models with `m ω` constant, where `σ = c sqrt(m)`
//! keeps the product at `ħ/2`, and [`series`] builds the mass profile of the
//! Bessel-type oscillator as an odd power series.
//!
//! ```
//! use std::collections::BTreeMap;
//! use tdo_core::ermakov::{integrate_ep, output_grid, EpOptions};
//! use tdo_core::models::ModelDescriptor;
//!
//! let model = ModelDescriptor::from_catalog("harmonic", &BTreeMap::new()).unwrap();
//! let grid = output_grid(0.0, 5.0, 0.5).unwrap();
//! let states = integrate_ep(&model, (0.5f64.sqrt(), 0.0), &grid, &EpOptions::default()).unwrap();
//! assert!((states.last().unwrap().theta - 10.0).abs() < 1e-8);
//! ```

pub mod ermakov;
pub mod error;
pub mod io;
pub mod minimum;
pub mod models;
pub mod ode;
pub mod quantum;
pub mod series;
pub mod verify;

pub use error::{Result, TdoError};
