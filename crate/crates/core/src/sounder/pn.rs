//! Maximal-length PN sequence generation.
//!
//! A Fibonacci LFSR driven by a primitive feedback polynomial produces the
//! probing waveform: a ±1 sequence of length `2^order - 1` whose periodic
//! autocorrelation is two-valued, `L` at zero lag and `-1` everywhere else.
//! Maximality is verified at generation time by measuring the register
//! period, so a non-primitive polynomial is rejected instead of silently
//! producing a short sequence.

use crate::error::{Error, Result};

/// Supported register lengths.
pub const MIN_ORDER: u32 = 2;
pub const MAX_ORDER: u32 = 20;

/// Default primitive feedback polynomials, exponent form with the constant
/// term implied: `[11, 2]` is `x^11 + x^2 + 1`.
const DEFAULT_TAPS: [&[u32]; (MAX_ORDER - MIN_ORDER + 1) as usize] = [
    &[2, 1],
    &[3, 1],
    &[4, 1],
    &[5, 2],
    &[6, 1],
    &[7, 1],
    &[8, 4, 3, 2],
    &[9, 4],
    &[10, 3],
    &[11, 2],
    &[12, 6, 4, 1],
    &[13, 4, 3, 1],
    &[14, 10, 6, 1],
    &[15, 1],
    &[16, 12, 3, 1],
    &[17, 3],
    &[18, 7],
    &[19, 5, 2, 1],
    &[20, 3],
];

/// Default feedback taps for the given register order.
pub fn default_taps(order: u32) -> Result<&'static [u32]> {
    if !(MIN_ORDER..=MAX_ORDER).contains(&order) {
        return Err(Error::Config(format!(
            "PN order must be in {MIN_ORDER}..={MAX_ORDER}, got {order}"
        )));
    }
    Ok(DEFAULT_TAPS[(order - MIN_ORDER) as usize])
}

/// One period of a maximal-length ±1 sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PnSequence {
    order: u32,
    taps: Vec<u32>,
    chips: Vec<i8>,
}

impl PnSequence {
    /// Register order in bits.
    pub fn order(&self) -> u32 {
        self.order
    }

    /// Feedback polynomial exponents.
    pub fn taps(&self) -> &[u32] {
        &self.taps
    }

    /// One period of ±1 chips, length `2^order - 1`.
    pub fn chips(&self) -> &[i8] {
        &self.chips
    }

    pub fn len(&self) -> usize {
        self.chips.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chips.is_empty()
    }

    /// Periodic autocorrelation at the given chip lag (unnormalized).
    pub fn circular_autocorrelation(&self, lag: usize) -> i64 {
        let l = self.chips.len();
        (0..l)
            .map(|i| self.chips[i] as i64 * self.chips[(i + lag) % l] as i64)
            .sum()
    }
}

/// Generate a maximal-length sequence from an explicit feedback polynomial.
///
/// `taps` lists the polynomial exponents (constant term implied); the
/// register starts from the all-but-one-zero state and must return to it for
/// the first time after exactly `2^order - 1` steps.
pub fn generate_msequence(order: u32, taps: &[u32]) -> Result<PnSequence> {
    if !(MIN_ORDER..=MAX_ORDER).contains(&order) {
        return Err(Error::Config(format!(
            "PN order must be in {MIN_ORDER}..={MAX_ORDER}, got {order}"
        )));
    }
    if taps.is_empty() || !taps.contains(&order) {
        return Err(Error::Config(format!(
            "feedback taps must include the leading exponent {order}"
        )));
    }
    let mut seen = Vec::new();
    for &t in taps {
        if t == 0 || t > order {
            return Err(Error::Config(format!(
                "feedback exponent {t} outside 1..={order}"
            )));
        }
        if seen.contains(&t) {
            return Err(Error::Config(format!("duplicate feedback exponent {t}")));
        }
        seen.push(t);
    }

    let expected_period = (1usize << order) - 1;
    let initial_state: u32 = 1;
    let mut state = initial_state;
    let mut chips = Vec::with_capacity(expected_period);
    for step in 0..=expected_period {
        // Output the bit about to be shifted out.
        let out = (state >> (order - 1)) & 1;
        let feedback = taps
            .iter()
            .fold(0u32, |acc, &t| acc ^ ((state >> (t - 1)) & 1));
        state = ((state << 1) | feedback) & ((1u32 << order) - 1);
        if step < expected_period {
            chips.push(if out == 1 { 1i8 } else { -1i8 });
        }
        if state == initial_state {
            let period = step + 1;
            if period != expected_period {
                return Err(Error::Config(format!(
                    "feedback polynomial is not primitive: register period {period} \
                     instead of {expected_period}"
                )));
            }
            return Ok(PnSequence {
                order,
                taps: taps.to_vec(),
                chips,
            });
        }
        if state == 0 {
            return Err(Error::Config(
                "feedback polynomial drove the register to the all-zero state".into(),
            ));
        }
    }
    Err(Error::Config(format!(
        "register did not return to its initial state within {expected_period} steps"
    )))
}

/// Generate with the built-in default polynomial for the order.
pub fn generate_default_msequence(order: u32) -> Result<PnSequence> {
    generate_msequence(order, default_taps(order)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_11_default_is_2047_chips() {
        let pn = generate_default_msequence(11).unwrap();
        assert_eq!(pn.len(), 2047);
        assert_eq!(pn.taps(), &[11, 2]);
    }

    #[test]
    fn order_2_smallest_maximal_sequence() {
        let pn = generate_msequence(2, &[2, 1]).unwrap();
        assert_eq!(pn.len(), 3);
        assert_eq!(pn.circular_autocorrelation(0), 3);
        assert_eq!(pn.circular_autocorrelation(1), -1);
        assert_eq!(pn.circular_autocorrelation(2), -1);
    }

    #[test]
    fn order_11_off_peak_autocorrelation_is_minus_one_everywhere() {
        let pn = generate_default_msequence(11).unwrap();
        assert_eq!(pn.circular_autocorrelation(0), 2047);
        for lag in 1..pn.len() {
            assert_eq!(pn.circular_autocorrelation(lag), -1, "lag {lag}");
        }
    }

    #[test]
    fn balance_and_two_valued_autocorrelation_all_supported_orders() {
        for order in MIN_ORDER..=11 {
            let pn = generate_default_msequence(order).unwrap();
            let l = pn.len() as i64;
            let plus = pn.chips().iter().filter(|&&c| c == 1).count() as i64;
            let minus = l - plus;
            assert_eq!(plus - minus, 1, "order {order} imbalance");
            for lag in 1..pn.len() {
                assert_eq!(pn.circular_autocorrelation(lag), -1, "order {order} lag {lag}");
            }
        }
    }

    #[test]
    fn every_default_polynomial_is_maximal() {
        for order in MIN_ORDER..=MAX_ORDER {
            let pn = generate_default_msequence(order).unwrap();
            assert_eq!(pn.len(), (1usize << order) - 1, "order {order}");
        }
    }

    #[test]
    fn non_primitive_polynomial_rejected() {
        // x^4 + x^2 + 1 = (x^2 + x + 1)^2 is reducible.
        match generate_msequence(4, &[4, 2]) {
            Err(Error::Config(msg)) => assert!(msg.contains("not primitive"), "{msg}"),
            other => panic!("expected configuration error, got {other:?}"),
        }
    }

    #[test]
    fn order_bounds_enforced() {
        assert!(generate_msequence(1, &[1]).is_err());
        assert!(generate_msequence(21, &[21, 2]).is_err());
        assert!(default_taps(0).is_err());
    }

    #[test]
    fn tap_validation() {
        assert!(generate_msequence(5, &[]).is_err());
        assert!(generate_msequence(5, &[5, 7]).is_err());
        assert!(generate_msequence(5, &[5, 2, 2]).is_err());
        assert!(generate_msequence(5, &[2, 1]).is_err()); // missing leading exponent
    }
}
