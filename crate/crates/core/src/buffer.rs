//! Per-receiver decoding buffers.
//!
//! A receiver accumulates coded packets in a column-echelon matrix keyed by
//! packet index: the combination stored at position `n` has its highest
//! (pivot) index exactly `n`, with the pivot coefficient normalized to 1.
//! Decoding is in-order: once positions `1..=d` are all filled they are fully
//! reduced to singletons, so the prefix is kept implicitly as just the count
//! `d` ("delivered") and dropped from the column map. The receiver's next
//! needed packet is therefore always `d + 1`.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use crate::galois::{FieldElement, FieldSpec};

/// A sparse linear combination of original packets over GF(2^w).
///
/// Terms are `(packet index, coefficient)`, sorted by index, never zero.
/// Packet indices are 1-based sequence numbers.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct CodedPacket {
    terms: Vec<(u64, FieldElement)>,
}

impl CodedPacket {
    pub fn zero() -> CodedPacket {
        CodedPacket { terms: Vec::new() }
    }

    /// A bare (uncoded) packet with the given coefficient.
    pub fn singleton(index: u64, coeff: FieldElement) -> CodedPacket {
        assert!(index > 0, "packet indices are 1-based");
        assert!(!coeff.is_zero());
        CodedPacket {
            terms: vec![(index, coeff)],
        }
    }

    /// Builds a combination from `(index, coefficient)` pairs. Pairs must be
    /// strictly increasing in index with nonzero coefficients.
    pub fn from_terms(terms: Vec<(u64, FieldElement)>) -> CodedPacket {
        for pair in terms.windows(2) {
            assert!(pair[0].0 < pair[1].0, "terms must be strictly increasing");
        }
        assert!(
            terms.iter().all(|&(i, c)| i > 0 && !c.is_zero()),
            "terms must be 1-based with nonzero coefficients"
        );
        CodedPacket { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Number of packets in the combination.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[(u64, FieldElement)] {
        &self.terms
    }

    /// Highest-index term, if any. The pivot determines the buffer position a
    /// stored combination occupies.
    pub fn pivot(&self) -> Option<(u64, FieldElement)> {
        self.terms.last().copied()
    }

    /// Coefficient of `index`, zero when absent.
    pub fn coeff(&self, index: u64) -> FieldElement {
        match self.terms.binary_search_by_key(&index, |&(i, _)| i) {
            Ok(k) => self.terms[k].1,
            Err(_) => FieldElement::ZERO,
        }
    }

    fn remove_pivot(&mut self) {
        self.terms.pop();
    }

    /// `self += factor * other` (XOR-style field addition per coefficient).
    pub fn add_scaled(&mut self, other: &CodedPacket, factor: FieldElement, field: &FieldSpec) {
        if factor.is_zero() || other.is_zero() {
            return;
        }
        let mut merged = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut a, mut b) = (0, 0);
        while a < self.terms.len() || b < other.terms.len() {
            let take_a = match (self.terms.get(a), other.terms.get(b)) {
                (Some(&(ia, _)), Some(&(ib, _))) if ia == ib => {
                    let c = field.add(self.terms[a].1, field.mul(factor, other.terms[b].1));
                    if !c.is_zero() {
                        merged.push((ia, c));
                    }
                    a += 1;
                    b += 1;
                    continue;
                }
                (Some(&(ia, _)), Some(&(ib, _))) => ia < ib,
                (Some(_), None) => true,
                (None, Some(_)) => false,
                (None, None) => break,
            };
            if take_a {
                merged.push(self.terms[a]);
                a += 1;
            } else {
                let (i, c) = other.terms[b];
                merged.push((i, field.mul(factor, c)));
                b += 1;
            }
        }
        self.terms = merged;
    }

    /// XOR a single term into the combination (used by the binary encoder).
    pub fn add_term(&mut self, index: u64, coeff: FieldElement, field: &FieldSpec) {
        match self.terms.binary_search_by_key(&index, |&(i, _)| i) {
            Ok(k) => {
                let c = field.add(self.terms[k].1, coeff);
                if c.is_zero() {
                    self.terms.remove(k);
                } else {
                    self.terms[k].1 = c;
                }
            }
            Err(k) => {
                if !coeff.is_zero() {
                    self.terms.insert(k, (index, coeff));
                }
            }
        }
    }

    /// Multiplies every coefficient by a nonzero factor.
    pub fn scale(&mut self, factor: FieldElement, field: &FieldSpec) {
        assert!(!factor.is_zero(), "scaling by zero would erase the packet");
        for (_, c) in &mut self.terms {
            *c = field.mul(*c, factor);
        }
    }
}

impl fmt::Debug for CodedPacket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, &(i, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            if c == FieldElement::ONE {
                write!(f, "p{i}")?;
            } else {
                write!(f, "{c}*p{i}")?;
            }
        }
        Ok(())
    }
}

/// Result of feeding a received combination into a buffer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StoreOutcome {
    /// Reduced to zero against the buffer: nothing new.
    Discarded,
    /// Stored at `position`; `delivered_delta` in-order packets became
    /// decodable as a result (0 when the fill is non-contiguous).
    Stored { position: u64, delivered_delta: u64 },
}

/// How a combination reduces against a buffer without storing it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CancelResult {
    /// Fully cancelled: the receiver already knows this combination.
    Zero,
    /// Reduces to a nonzero multiple of the single packet `pivot`.
    Multiple { pivot: u64, coeff: FieldElement },
    /// Reduces to a combination of two or more unseen packets.
    Other,
}

/// One receiver's decoding state.
#[derive(Clone)]
pub struct ReceiverBuffer {
    field: Arc<FieldSpec>,
    /// Count of the decoded in-order prefix; positions `1..=delivered` are
    /// implicit singletons.
    delivered: u64,
    /// Stored combinations beyond the prefix, keyed by pivot position.
    columns: BTreeMap<u64, CodedPacket>,
    /// Reverse index: unseen packet index -> positions of columns whose
    /// support contains it. Drives back-substitution when the index fills.
    referenced_by: HashMap<u64, BTreeSet<u64>>,
}

impl ReceiverBuffer {
    pub fn new(field: Arc<FieldSpec>) -> ReceiverBuffer {
        ReceiverBuffer {
            field,
            delivered: 0,
            columns: BTreeMap::new(),
            referenced_by: HashMap::new(),
        }
    }

    pub fn field(&self) -> &Arc<FieldSpec> {
        &self.field
    }

    /// Length of the decoded in-order prefix.
    pub fn delivered(&self) -> u64 {
        self.delivered
    }

    /// Index of the next packet this receiver must decode: `delivered + 1`.
    pub fn next_needed(&self) -> u64 {
        self.delivered + 1
    }

    /// Whether position `n` is filled (decoded prefix or stored column).
    pub fn is_seen(&self, n: u64) -> bool {
        n > 0 && (n <= self.delivered || self.columns.contains_key(&n))
    }

    /// Total filled positions: decoded prefix plus stored columns.
    pub fn filled_count(&self) -> u64 {
        self.delivered + self.columns.len() as u64
    }

    /// Stored (not yet delivered) columns.
    pub fn stored_count(&self) -> usize {
        self.columns.len()
    }

    /// Stored columns still holding a multi-packet combination.
    pub fn coded_count(&self) -> usize {
        self.columns.values().filter(|c| c.len() > 1).count()
    }

    /// Fraction of filled positions whose stored combination has more than
    /// one term. The decoded prefix counts as singletons.
    pub fn undecoded_fraction(&self) -> f64 {
        let filled = self.filled_count();
        if filled == 0 {
            0.0
        } else {
            self.coded_count() as f64 / filled as f64
        }
    }

    /// Read-only view of the stored columns beyond the decoded prefix.
    pub fn stored_columns(&self) -> impl Iterator<Item = (u64, &CodedPacket)> {
        self.columns.iter().map(|(&p, c)| (p, c))
    }

    /// Forward-eliminates `s` against the buffer without mutating it,
    /// returning what would remain. Every index in the result is unseen.
    pub fn residual(&self, s: &CodedPacket) -> CodedPacket {
        let mut work = s.clone();
        let mut kept: Vec<(u64, FieldElement)> = Vec::new();
        while let Some((idx, c)) = work.pivot() {
            if idx <= self.delivered {
                // Cancelled exactly by the implicit singleton at `idx`.
                work.remove_pivot();
            } else if let Some(col) = self.columns.get(&idx) {
                // Pivot coefficient of a stored column is 1, so adding
                // c * col removes the idx term and mixes in lower indices.
                work.add_scaled(col, c, &self.field);
            } else {
                work.remove_pivot();
                kept.push((idx, c));
            }
        }
        kept.reverse();
        CodedPacket { terms: kept }
    }

    /// Classifies how `s` reduces against the buffer: fully cancelled, a
    /// multiple of one unseen packet, or a wider combination.
    pub fn can_cancel(&self, s: &CodedPacket) -> CancelResult {
        let r = self.residual(s);
        match r.terms.len() {
            0 => CancelResult::Zero,
            1 => CancelResult::Multiple {
                pivot: r.terms[0].0,
                coeff: r.terms[0].1,
            },
            _ => CancelResult::Other,
        }
    }

    /// Feeds a received combination into the buffer: Gaussian-eliminate, and
    /// if anything survives, normalize it, store it at its pivot position,
    /// back-substitute it into columns that reference the pivot, and advance
    /// the delivered frontier across any newly contiguous prefix.
    pub fn store(&mut self, s: &CodedPacket) -> StoreOutcome {
        let mut resid = self.residual(s);
        if resid.is_zero() {
            return StoreOutcome::Discarded;
        }
        let (pos, pivot_coeff) = resid.pivot().expect("nonzero residual has a pivot");
        if pivot_coeff != FieldElement::ONE {
            let f = self
                .field
                .inv(pivot_coeff)
                .expect("pivot coefficient is nonzero");
            resid.scale(f, &self.field);
        }

        // Position `pos` just became seen: reduce every column that carried
        // it so the matrix stays fully reduced.
        if let Some(referrers) = self.referenced_by.remove(&pos) {
            for rpos in referrers {
                let mut col = self.columns.remove(&rpos).expect("referenced column");
                let c = col.coeff(pos);
                debug_assert!(!c.is_zero(), "stale reverse index entry");
                self.unregister_refs(rpos, &col);
                col.add_scaled(&resid, c, &self.field);
                debug_assert!(col.coeff(pos).is_zero());
                self.register_refs(rpos, &col);
                self.columns.insert(rpos, col);
            }
        }

        self.register_refs(pos, &resid);
        self.columns.insert(pos, resid);

        let mut delta = 0;
        while let Some(col) = self.columns.get(&(self.delivered + 1)) {
            // A column landing directly past the prefix can only reference
            // unseen indices below its pivot, and there are none.
            debug_assert_eq!(col.len(), 1, "prefix column must be a singleton");
            self.columns.remove(&(self.delivered + 1));
            self.delivered += 1;
            delta += 1;
        }
        StoreOutcome::Stored {
            position: pos,
            delivered_delta: delta,
        }
    }

    /// Drops any stored column at or below `threshold`. With the decoded
    /// prefix already implicit this is a defensive bound on memory: callers
    /// pass the minimum delivered count across all receivers, below which no
    /// position can ever be referenced again.
    pub fn compact(&mut self, threshold: u64) {
        let drop: Vec<u64> = self
            .columns
            .range(..=threshold)
            .map(|(&p, _)| p)
            .collect();
        for pos in drop {
            let col = self.columns.remove(&pos).expect("column to drop");
            self.unregister_refs(pos, &col);
        }
    }

    fn register_refs(&mut self, pos: u64, col: &CodedPacket) {
        for &(i, _) in col.terms() {
            if i != pos {
                self.referenced_by.entry(i).or_default().insert(pos);
            }
        }
    }

    fn unregister_refs(&mut self, pos: u64, col: &CodedPacket) {
        for &(i, _) in col.terms() {
            if i == pos {
                continue;
            }
            if let Some(set) = self.referenced_by.get_mut(&i) {
                set.remove(&pos);
                if set.is_empty() {
                    self.referenced_by.remove(&i);
                }
            }
        }
    }

    /// Exhaustive structural check of the echelon and reverse-index
    /// invariants. Cheap enough for tests and periodic instrumented runs.
    pub fn check_invariants(&self) -> Result<(), String> {
        if self.columns.contains_key(&(self.delivered + 1)) {
            return Err(format!(
                "position {} filled but frontier not advanced",
                self.delivered + 1
            ));
        }
        for (&pos, col) in &self.columns {
            if pos <= self.delivered {
                return Err(format!("column {pos} at or below delivered prefix"));
            }
            let (pivot, coeff) = col.pivot().ok_or(format!("empty column at {pos}"))?;
            if pivot != pos {
                return Err(format!("column at {pos} has pivot {pivot}"));
            }
            if coeff != FieldElement::ONE {
                return Err(format!("column {pos} pivot coefficient {coeff} != 1"));
            }
            for &(i, _) in col.terms() {
                if i == pos {
                    continue;
                }
                if i <= self.delivered || self.columns.contains_key(&i) {
                    return Err(format!("column {pos} references seen index {i}"));
                }
                if !self
                    .referenced_by
                    .get(&i)
                    .is_some_and(|set| set.contains(&pos))
                {
                    return Err(format!("missing reverse index entry {i} -> {pos}"));
                }
            }
        }
        for (&i, set) in &self.referenced_by {
            for &pos in set {
                let col = self
                    .columns
                    .get(&pos)
                    .ok_or(format!("reverse index {i} -> missing column {pos}"))?;
                if col.coeff(i).is_zero() {
                    return Err(format!("stale reverse index entry {i} -> {pos}"));
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for ReceiverBuffer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ReceiverBuffer(delivered={}", self.delivered)?;
        for (pos, col) in &self.columns {
            write!(f, ", {pos}: [{col:?}]")?;
        }
        write!(f, ")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::galois::field_for_receivers;

    fn f1() -> FieldElement {
        FieldElement::ONE
    }

    fn buf() -> ReceiverBuffer {
        ReceiverBuffer::new(field_for_receivers(3).unwrap())
    }

    /// Stores bare packets `1..=n` so the prefix is decoded.
    fn deliver_prefix(b: &mut ReceiverBuffer, n: u64) {
        for i in 1..=n {
            b.store(&CodedPacket::singleton(i, f1()));
        }
        assert_eq!(b.delivered(), n);
    }

    // ─── CodedPacket basics ──────────────────────────────────────────────

    #[test]
    fn add_scaled_merges_and_cancels() {
        let field = FieldSpec::new(2).unwrap();
        let mut a = CodedPacket::from_terms(vec![(3, FieldElement(1)), (7, FieldElement(2))]);
        let b = CodedPacket::from_terms(vec![(3, FieldElement(3)), (5, FieldElement(1))]);
        // a += 2*b over GF(4): 2*3 = 1 cancels the index-3 term (1 + 1 = 0),
        // and index 5 picks up coefficient 2*1 = 2.
        a.add_scaled(&b, FieldElement(2), &field);
        assert_eq!(
            a.terms(),
            &[(5, FieldElement(2)), (7, FieldElement(2))],
            "{a:?}"
        );
    }

    #[test]
    fn add_term_toggles_in_binary() {
        let field = FieldSpec::new(1).unwrap();
        let mut s = CodedPacket::zero();
        s.add_term(4, f1(), &field);
        s.add_term(2, f1(), &field);
        assert_eq!(s.terms(), &[(2, f1()), (4, f1())]);
        s.add_term(4, f1(), &field);
        assert_eq!(s.terms(), &[(2, f1())]);
    }

    // ─── storing and the delivered frontier ─────────────────────────────

    #[test]
    fn in_order_singletons_advance_frontier() {
        let mut b = buf();
        for i in 1..=5 {
            let out = b.store(&CodedPacket::singleton(i, f1()));
            assert_eq!(
                out,
                StoreOutcome::Stored {
                    position: i,
                    delivered_delta: 1
                }
            );
        }
        assert_eq!(b.delivered(), 5);
        assert_eq!(b.next_needed(), 6);
        assert_eq!(b.stored_count(), 0);
    }

    #[test]
    fn gap_fill_advances_frontier_across_run() {
        let mut b = buf();
        b.store(&CodedPacket::singleton(2, f1()));
        b.store(&CodedPacket::singleton(3, f1()));
        assert_eq!(b.delivered(), 0);
        assert_eq!(b.next_needed(), 1);
        let out = b.store(&CodedPacket::singleton(1, f1()));
        assert_eq!(
            out,
            StoreOutcome::Stored {
                position: 1,
                delivered_delta: 3
            }
        );
        assert_eq!(b.next_needed(), 4);
    }

    #[test]
    fn next_needed_skips_nothing() {
        // delivered = 3 plus a filled position 5: next needed stays 4, and
        // storing p4 advances straight to 5 delivered.
        let mut b = buf();
        deliver_prefix(&mut b, 3);
        b.store(&CodedPacket::singleton(5, f1()));
        assert_eq!(b.next_needed(), 4);
        let out = b.store(&CodedPacket::singleton(4, f1()));
        assert_eq!(
            out,
            StoreOutcome::Stored {
                position: 4,
                delivered_delta: 2
            }
        );
        assert_eq!(b.delivered(), 5);
        assert_eq!(b.next_needed(), 6);
    }

    #[test]
    fn known_combination_is_discarded() {
        let mut b = buf();
        deliver_prefix(&mut b, 4);
        let known = CodedPacket::from_terms(vec![(2, FieldElement(3)), (4, f1())]);
        assert_eq!(b.store(&known), StoreOutcome::Discarded);
        assert_eq!(b.store(&CodedPacket::zero()), StoreOutcome::Discarded);
    }

    #[test]
    fn coded_reception_is_stored_at_its_pivot() {
        // Receiver holds p1, p2 and p7; p11 + p5 cannot reduce, so it is
        // stored at position 11.
        let mut b = buf();
        deliver_prefix(&mut b, 2);
        b.store(&CodedPacket::singleton(7, f1()));
        let s = CodedPacket::from_terms(vec![(5, f1()), (11, f1())]);
        let out = b.store(&s);
        assert_eq!(
            out,
            StoreOutcome::Stored {
                position: 11,
                delivered_delta: 0
            }
        );
        assert!(b.is_seen(11));
        assert!(!b.is_seen(5));
        assert_eq!(b.coded_count(), 1);
        b.check_invariants().unwrap();
    }

    #[test]
    fn back_substitution_strips_filled_index_from_older_columns() {
        // Continuing the scenario above: receiving p11 + p7 reduces (p7 is
        // seen) to p5, which lands at position 5 and rewrites the stored
        // p11 + p5 column down to a bare p11.
        let mut b = buf();
        deliver_prefix(&mut b, 2);
        b.store(&CodedPacket::singleton(7, f1()));
        b.store(&CodedPacket::from_terms(vec![(5, f1()), (11, f1())]));

        let s = CodedPacket::from_terms(vec![(7, f1()), (11, f1())]);
        let out = b.store(&s);
        assert_eq!(
            out,
            StoreOutcome::Stored {
                position: 5,
                delivered_delta: 0
            }
        );
        let col11: Vec<_> = b
            .stored_columns()
            .find(|&(p, _)| p == 11)
            .map(|(_, c)| c.terms().to_vec())
            .unwrap();
        assert_eq!(col11, vec![(11, f1())]);
        assert_eq!(b.coded_count(), 0);
        b.check_invariants().unwrap();
    }

    #[test]
    fn delivery_after_back_substitution() {
        // Same receiver once more: p11 + p7 + p3 reduces to p3, completing
        // the prefix through position 3.
        let mut b = buf();
        deliver_prefix(&mut b, 2);
        b.store(&CodedPacket::singleton(7, f1()));
        b.store(&CodedPacket::from_terms(vec![(5, f1()), (11, f1())]));
        b.store(&CodedPacket::from_terms(vec![(7, f1()), (11, f1())]));

        let s = CodedPacket::from_terms(vec![(3, f1()), (7, f1()), (11, f1())]);
        let out = b.store(&s);
        assert_eq!(
            out,
            StoreOutcome::Stored {
                position: 3,
                delivered_delta: 1
            }
        );
        assert_eq!(b.delivered(), 3);
        assert_eq!(b.next_needed(), 4);
        let positions: Vec<u64> = b.stored_columns().map(|(p, _)| p).collect();
        assert_eq!(positions, vec![5, 7, 11]);
        b.check_invariants().unwrap();
    }

    // ─── residual classification ─────────────────────────────────────────

    #[test]
    fn can_cancel_classifies_residuals() {
        let mut b = buf();
        deliver_prefix(&mut b, 2);
        b.store(&CodedPacket::singleton(7, f1()));
        b.store(&CodedPacket::from_terms(vec![(5, f1()), (11, f1())]));

        // Fully known.
        assert_eq!(
            b.can_cancel(&CodedPacket::singleton(2, FieldElement(2))),
            CancelResult::Zero
        );
        // p11 + p7 reduces to 1 * p5.
        assert_eq!(
            b.can_cancel(&CodedPacket::from_terms(vec![(7, f1()), (11, f1())])),
            CancelResult::Multiple {
                pivot: 5,
                coeff: f1()
            }
        );
        // p11 alone reduces to p5 as well (column 11 holds p11 + p5).
        assert_eq!(
            b.can_cancel(&CodedPacket::singleton(11, f1())),
            CancelResult::Multiple {
                pivot: 5,
                coeff: f1()
            }
        );
        // Two unseen packets stay a wider combination.
        assert_eq!(
            b.can_cancel(&CodedPacket::from_terms(vec![(4, f1()), (6, f1())])),
            CancelResult::Other
        );
    }

    #[test]
    fn residual_reports_scaled_multiples() {
        let field = field_for_receivers(4).unwrap();
        let mut b = ReceiverBuffer::new(field);
        deliver_prefix(&mut b, 3);
        let s = CodedPacket::from_terms(vec![(2, f1()), (6, FieldElement(3))]);
        match b.can_cancel(&s) {
            CancelResult::Multiple { pivot, coeff } => {
                assert_eq!(pivot, 6);
                assert_eq!(coeff, FieldElement(3));
            }
            other => panic!("expected multiple, got {other:?}"),
        }
    }

    // ─── coefficient normalization over wider fields ─────────────────────

    #[test]
    fn pivot_coefficients_are_normalized() {
        let field = field_for_receivers(4).unwrap(); // GF(4)
        let mut b = ReceiverBuffer::new(field);
        b.store(&CodedPacket::singleton(5, f1()));
        // 2*p7 + 3*p5: the p5 term cancels against the stored singleton,
        // leaving 2*p7, which must be stored as 1*p7.
        let s = CodedPacket::from_terms(vec![(5, FieldElement(3)), (7, FieldElement(2))]);
        b.store(&s);
        let col7: Vec<_> = b
            .stored_columns()
            .find(|&(p, _)| p == 7)
            .map(|(_, c)| c.terms().to_vec())
            .unwrap();
        assert_eq!(col7, vec![(7, f1())]);
        b.check_invariants().unwrap();
    }

    // ─── statistics ──────────────────────────────────────────────────────

    #[test]
    fn undecoded_fraction_counts_multi_term_columns() {
        let mut b = buf();
        assert_eq!(b.undecoded_fraction(), 0.0);
        deliver_prefix(&mut b, 2);
        b.store(&CodedPacket::singleton(5, f1()));
        // One coded column among four filled positions.
        b.store(&CodedPacket::from_terms(vec![(4, f1()), (6, f1())]));
        assert_eq!(b.filled_count(), 4);
        assert_eq!(b.coded_count(), 1);
        assert!((b.undecoded_fraction() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn all_singletons_is_fully_decoded() {
        let mut b = buf();
        deliver_prefix(&mut b, 3);
        b.store(&CodedPacket::singleton(6, f1()));
        assert_eq!(b.undecoded_fraction(), 0.0);
    }

    #[test]
    fn compact_is_safe_and_keeps_live_columns() {
        let mut b = buf();
        deliver_prefix(&mut b, 4);
        b.store(&CodedPacket::from_terms(vec![(6, f1()), (8, f1())]));
        b.compact(4); // min delivered across receivers can never exceed ours
        assert!(b.is_seen(8));
        assert_eq!(b.stored_count(), 1);
        b.check_invariants().unwrap();
    }
}
