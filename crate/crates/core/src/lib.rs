//! Graphs of groups, Bass-Serre tree windows, parabolic forests and fine
//! graphs, with exact checks on free, abelian and finite vertex groups.

pub mod abelian;
pub mod bass_serre;
pub mod fine;
pub mod gog;
pub mod graph;
pub mod group;
pub mod input;
pub mod peripheral;
pub mod quasiconvex;
pub mod stallings;
pub mod subgroup;

pub use gog::{End, GogError, GraphOfGroups, Item, NormalForm};
pub use group::{GroupDesc, GroupElement, GroupError, GroupKind, Letter, Word};
pub use stallings::{CoreGraph, PullbackComponent, StallingsError, Verdict};
pub use subgroup::{Hom, HomDefect, Subgroup};
