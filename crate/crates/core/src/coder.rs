//! Transmission encoding.
//!
//! Each slot the sender picks a mode `m` (every receiver `m..R` should be
//! served) and builds one coded packet that is innovative for all of them.
//! Receivers with equal next-needed packets are grouped; groups are visited
//! from the newest packet down, and a group's packet is mixed in only when at
//! least one member would otherwise receive nothing new. The coefficient is
//! chosen to dodge every member's cancelling value, which is always possible
//! because the field order is at least the receiver count.

use rand::Rng;
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

use crate::buffer::{CancelResult, CodedPacket, ReceiverBuffer};
use crate::galois::{FieldElement, FieldSpec};

#[derive(Debug, Error, PartialEq)]
pub enum CoderError {
    /// Mode probabilities must be nonnegative and sum to 1.
    #[error("mode probabilities must be nonnegative, finite, and sum to 1 (sum = {sum})")]
    InvalidModeVector { sum: f64 },
    /// The simplified encoder requires strictly decreasing next-needed
    /// packets across the participating receivers.
    #[error("next-needed packets not strictly decreasing at receiver {receiver}")]
    OrderingViolated { receiver: usize },
}

/// Per-slot mode probabilities β, one entry per receiver.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeVector {
    beta: Vec<f64>,
}

impl ModeVector {
    /// Strict constructor: entries nonnegative and summing to 1 within 1e-12.
    pub fn new(beta: Vec<f64>) -> Result<ModeVector, CoderError> {
        let sum: f64 = beta.iter().sum();
        let ok = !beta.is_empty()
            && beta.iter().all(|&b| b.is_finite() && b >= 0.0)
            && (sum - 1.0).abs() <= 1e-12;
        if ok {
            Ok(ModeVector { beta })
        } else {
            Err(CoderError::InvalidModeVector { sum })
        }
    }

    /// Mode 1 only: all probability mass on the fastest receiver.
    pub fn degenerate(len: usize) -> ModeVector {
        assert!(len >= 1);
        let mut beta = vec![0.0; len];
        beta[0] = 1.0;
        ModeVector { beta }
    }

    pub fn len(&self) -> usize {
        self.beta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.beta.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.beta
    }
}

/// Which receivers' next-needed packets ended up coded into a transmission.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coding {
    bits: Vec<bool>,
}

impl Coding {
    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }
}

/// True when receiver `r`'s next-needed packet is part of the transmission,
/// i.e. the slot carries a knowledge differential for `r`.
pub fn is_knowledge_differential(coding: &Coding, r: usize) -> bool {
    coding.bits[r]
}

/// Draws the slot's mode from β. The tiny probability sliver lost to
/// floating-point accumulation goes to the last mode with positive mass.
pub fn select_mode<R: Rng + ?Sized>(beta: &ModeVector, rng: &mut R) -> usize {
    let x: f64 = rng.gen();
    let mut acc = 0.0;
    let mut last_live = 0;
    for (m, &b) in beta.as_slice().iter().enumerate() {
        if b > 0.0 {
            acc += b;
            last_live = m;
            if x < acc {
                return m;
            }
        }
    }
    last_live
}

/// Builds the slot's transmission for `mode` over the full coding scheme.
///
/// Receivers `mode..R` are grouped by their next-needed packet. Groups are
/// processed from the newest packet down; each member's residual of the
/// running combination contributes to a veto list (`0` when it cancels, the
/// scalar when it reduces to a multiple of the group's packet, nothing when
/// it reduces to a wider combination). If some member vetoed 0, the group's
/// packet is added with the smallest non-vetoed coefficient.
pub fn encode_full(
    buffers: &[ReceiverBuffer],
    mode: usize,
    field: &FieldSpec,
) -> (CodedPacket, Coding) {
    assert!(mode < buffers.len(), "mode must address a receiver");
    debug_assert!(
        buffers.len() <= field.order() as usize,
        "field too small for receiver count"
    );

    let mut groups: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
    for (i, buf) in buffers.iter().enumerate().skip(mode) {
        groups.entry(buf.next_needed()).or_default().push(i);
    }

    let mut s = CodedPacket::zero();
    for (&pkt, members) in groups.iter().rev() {
        let mut veto: BTreeSet<u8> = BTreeSet::new();
        for &i in members {
            match buffers[i].can_cancel(&s) {
                CancelResult::Zero => {
                    veto.insert(0);
                }
                CancelResult::Multiple { pivot, coeff } if pivot == pkt => {
                    veto.insert(coeff.value());
                }
                _ => {}
            }
        }
        if veto.contains(&0) {
            // A coefficient always survives the veto: each member vetoes at
            // most one value, so a full veto would need a group of all R
            // receivers — but then it is the only (hence first) group, where
            // every residual of the empty combination is 0 and the veto is
            // just {0}.
            let coeff = (0..field.order())
                .map(|v| v as u8)
                .find(|v| !veto.contains(v))
                .expect("veto list smaller than field");
            s.add_term(pkt, FieldElement(coeff), field);
        }
    }

    let bits = buffers
        .iter()
        .enumerate()
        .map(|(i, buf)| i >= mode && !s.coeff(buf.next_needed()).is_zero())
        .collect();
    (s, Coding { bits })
}

/// Simplified encoder for the common steady state where next-needed packets
/// are distinct and ordered (fastest receiver furthest ahead). Walks the
/// participants in receiver order and XORs in each one's next-needed packet
/// exactly when the running combination already cancels for it; binary
/// coefficients suffice here.
pub fn encode_simplified(
    buffers: &[ReceiverBuffer],
    mode: usize,
) -> Result<(CodedPacket, Coding), CoderError> {
    assert!(mode < buffers.len(), "mode must address a receiver");
    for i in mode..buffers.len() - 1 {
        if buffers[i].next_needed() <= buffers[i + 1].next_needed() {
            return Err(CoderError::OrderingViolated { receiver: i + 1 });
        }
    }

    let field = buffers[mode].field().clone();
    let mut s = CodedPacket::zero();
    let mut bits = vec![false; buffers.len()];
    for (i, buf) in buffers.iter().enumerate().skip(mode) {
        if buf.residual(&s).is_zero() {
            s.add_term(buf.next_needed(), FieldElement::ONE, &field);
            bits[i] = true;
        }
    }
    Ok((s, Coding { bits }))
}
