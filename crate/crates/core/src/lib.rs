//! Cellular-automaton toolkit for the ternary heptagrid, the tessellation of
//! the hyperbolic plane by regular heptagons meeting three per vertex.
//!
//! The crate has three layers:
//!
//! * grid structure: [`fib`] provides the Fibonacci numeration that indexes
//!   sector trees, [`grid`] materializes a finite region of the tessellation
//!   (a central cell plus seven sector trees) and answers 7-neighbor queries;
//! * dynamics: [`ca`] steps a four-state, rotation-invariant cellular
//!   automaton over sparse configurations, and [`toolkit`] audits, closes,
//!   diffs, and interactively elicits rule tables;
//! * modelling: [`railway`] holds the railway-circuit model the automaton
//!   simulates (switch semantics, circuit graphs, track builders, the tile
//!   coloring with its yellow rays), and [`render`] draws configurations as
//!   SVG snapshots in the Poincaré disc.
//!
//! With the `parallel` feature (on by default) the stepper evaluates cells
//! through rayon; [`ca::step_sequential`] is always available and
//! bit-identical to the parallel path.

pub mod ca;
pub mod fib;
pub mod grid;
pub mod railway;
pub mod render;
pub mod toolkit;
