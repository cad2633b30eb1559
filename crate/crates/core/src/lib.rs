//! Exact asymptotic groupoids, cocycles and orbit-equivalence verification
//! for two-sided shifts of finite type.

pub mod acoe;
pub mod asymptotics;
pub mod cli;
pub mod cocycles;
pub mod relations;
pub mod report;
pub mod sft;

pub(crate) fn serialize_display<T: std::fmt::Display, S: serde::Serializer>(
    value: &T,
    s: S,
) -> Result<S::Ok, S::Error> {
    s.collect_str(value)
}
