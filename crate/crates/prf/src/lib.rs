//! Permutation rational functions (PRFs) over finite fields.
//!
//! A PRF is a reduced rational function V(x)/U(x) over GF(q) that
//! permutes the projective line P^1(F_q) = F_q ∪ {∞}. This crate
//! provides:
//!
//! - [`field`]: GF(p^m) arithmetic in generator-label form;
//! - [`poly`], [`ratfunc`]: polynomial and rational-function machinery,
//!   permutation extraction, Hamming distance, and contraction;
//! - [`normalize`]: the c-/m-/b-normalization transforms and their
//!   equivalence classes of size q²(q−1);
//! - [`maps`]: the F-map (coefficient scaling by generator powers) and
//!   G-map (coefficientwise Frobenius) with orbit enumeration;
//! - [`census`]: counting engines for N_{v,u}(q), the number of PRFs with
//!   exact numerator/denominator degrees (v,u), with brute-force,
//!   normalized, and equal-degree strategies plus sharding and
//!   checkpointing;
//! - [`bounds`]: the derived lower bounds S_d(q) ≤ M(q, q−d) and
//!   T_d(q) ≤ M(q+1, q−d) for permutation arrays, permutation-array
//!   materialization, and distance certification.

pub mod bounds;
pub mod census;
pub mod field;
pub mod maps;
pub mod normalize;
pub mod poly;
pub mod ratfunc;
