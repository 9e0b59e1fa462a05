//! Vector fields, differential forms and their spans on a coordinate chart.

pub mod chart;
pub mod diffeo;
pub mod distribution;
pub mod fields;

pub use chart::{Chart, ChartRef, JetSpec};
pub use diffeo::{pushforward, pushforward_system, DiffeoPair};
pub use distribution::{annihilator, Annihilator, Distribution, PfaffianSystem};
pub use fields::{
    exterior_derivative, interior_product, lie_bracket, pairing, wedge_two_forms, FourForm, FourFormResidue, OneForm,
    TwoForm, VectorField,
};
