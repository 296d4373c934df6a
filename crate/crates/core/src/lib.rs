//! Simulation and analysis toolkit for IEEE 802.15.6 wireless body area
//! networks.
//!
//! * [`phy`]: rate engine, band registry and bit-exact NB/UWB/HBC frame codecs
//! * [`superframe`]: phase layouts, admission, polls and scheduled allocations
//! * [`csma`]: the per-node CSMA/CA backoff engine and trace format
//! * [`efficiency`]: closed-form bandwidth efficiency
//! * [`security`]: security levels and the MK/PTK/GTK lifecycle
//! * [`sim`]: discrete-event simulation tying the above together

pub mod csma;
pub mod efficiency;
pub mod mac;
pub mod phy;
pub mod security;
pub mod sim;
pub mod superframe;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/phy.md")]
    mod phy {}
    #[doc = include_str!("../../../book/src/frames.md")]
    mod frames {}
    #[doc = include_str!("../../../book/src/superframe.md")]
    mod superframe {}
    #[doc = include_str!("../../../book/src/csma.md")]
    mod csma {}
    #[doc = include_str!("../../../book/src/simulation.md")]
    mod simulation {}
    #[doc = include_str!("../../../book/src/efficiency.md")]
    mod efficiency {}
    #[doc = include_str!("../../../book/src/security.md")]
    mod security {}
}
