//! Brute-force reference implementations. Everything here works from the
//! raw adjacency structure only and shares no code path with the library
//! routines it is used to check.

pub mod brute;
pub mod enumerate;
pub mod gradcheck;
pub mod sir_chain;
pub mod suite;
