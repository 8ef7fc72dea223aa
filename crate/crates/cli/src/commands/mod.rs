pub mod boost_position;
pub mod causality;
pub mod dirac;
pub mod nw_check;
pub mod transform;
