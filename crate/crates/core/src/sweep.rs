//! Exact `O(n log n)` solver for one quality axis.
//!
//! Customers are swept by decreasing price. The sweep keeps a list `L` of
//! candidate qualities, strictly decreasing in quality and in profit at the
//! current price, so its head is the best quality for the current price.
//! Adjacent pairs carry a certificate: the first future event at which the
//! lower-quality neighbour catches up. At that event the higher-quality
//! candidate is dominated for the rest of the sweep and is unlinked.
//!
//! Expiry times are found by binary search over the remaining events. For a
//! pair born at `b1 < b2` with qualities `q1 > q2`, the profit gap at event `t`
//! is `(b2 - b1) * (p_t - q1) - (t - b2 + 1) * (q1 - q2)`, which strictly
//! decreases in `t`, so the flip predicate is monotone.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::market::{evaluate, Market, Product, Solution};

/// One customer in sweep order: `index` is 1-based, prices are nonincreasing
/// in `index`, and equal prices are ordered by decreasing quality.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Event {
    pub index: usize,
    pub price: f64,
    pub quality: f64,
}

/// A quality in `L`, with the event index at which it entered.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Candidate {
    pub quality: f64,
    pub birth: usize,
}

/// Ordering guarantee for adjacent candidates `left` (higher quality) and
/// `right`. Valid while `generation` matches the left node's generation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Certificate {
    pub left: usize,
    pub right: usize,
    pub expiry: usize,
    pub generation: u32,
}

/// Counters gathered during one sweep.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct SweepStats {
    pub events: usize,
    pub candidates_inserted: usize,
    pub deletions: usize,
    pub certificates_pushed: usize,
    pub certificates_popped: usize,
    pub stale_pops: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutcome {
    pub solution: Solution,
    pub stats: SweepStats,
}

/// Sorts the customers of a 1-D market into sweep order.
pub fn events(market: &Market) -> Result<Vec<Event>> {
    if market.dim() != 1 {
        return Err(Error::NotOneDimensional(market.dim()));
    }
    let mut rows: Vec<(f64, f64)> = market
        .customers()
        .iter()
        .map(|c| (c.price, c.qualities[0]))
        .collect();
    rows.sort_unstable_by(|a, b| b.0.total_cmp(&a.0).then(b.1.total_cmp(&a.1)));
    Ok(rows
        .into_iter()
        .enumerate()
        .map(|(i, (price, quality))| Event {
            index: i + 1,
            price,
            quality,
        })
        .collect())
}

#[inline]
fn profit_at(price: f64, quality: f64, birth: usize, t: usize) -> f64 {
    (price - quality) * (t - birth + 1) as f64
}

/// Profit of offering `candidate.quality` at the event's price. Customers at
/// events `birth..=index` are exactly the ones considering it (events before
/// `birth` ask for more quality), so the buyer count is `index - birth + 1`.
pub fn profit_at_event(candidate: &Candidate, event: &Event) -> Result<f64> {
    if event.index < candidate.birth {
        return Err(Error::EventBeforeBirth {
            event: event.index,
            birth: candidate.birth,
        });
    }
    Ok(profit_at(
        event.price,
        candidate.quality,
        candidate.birth,
        event.index,
    ))
}

#[inline]
fn flipped<P: Fn(usize) -> f64>(
    price_at: &P,
    left: &Candidate,
    right: &Candidate,
    t: usize,
) -> bool {
    let price = price_at(t);
    profit_at(price, left.quality, left.birth, t) <= profit_at(price, right.quality, right.birth, t)
}

/// First event in `from..=n` at which `left` is no longer strictly more
/// profitable than `right`, or `n + 1` if that never happens.
///
/// Gallops forward from `from` before bisecting: most flips come soon after
/// the certificate is issued, and nearby events are still in cache.
fn first_flip<P: Fn(usize) -> f64>(
    price_at: &P,
    n: usize,
    left: &Candidate,
    right: &Candidate,
    from: usize,
) -> usize {
    let end = n + 1;
    let (mut lo, mut step) = (from, 1usize);
    let mut hi = loop {
        let probe = lo.saturating_add(step - 1);
        if probe >= end {
            break end;
        }
        if flipped(price_at, left, right, probe) {
            break probe;
        }
        lo = probe + 1;
        step = step.saturating_mul(2);
    };
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if flipped(price_at, left, right, mid) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    lo
}

/// Smallest event index after `current` at which `left` stops beating
/// `right` (ties count as flipped), or `events.len() + 1` if it never does.
///
/// Panics if `left` does not have the higher quality or is not strictly more
/// profitable at `current`.
pub fn expiry_index(
    left: &Candidate,
    right: &Candidate,
    events: &[Event],
    current: usize,
) -> usize {
    let price_at = |t: usize| events[t - 1].price;
    assert!(
        left.quality > right.quality,
        "left candidate must have the higher quality"
    );
    assert!(
        current >= left.birth.max(right.birth) && current <= events.len(),
        "current event out of range"
    );
    assert!(
        !flipped(&price_at, left, right, current),
        "certificate already expired at event {current}"
    );
    first_flip(&price_at, events.len(), left, right, current + 1)
}

const NIL: usize = usize::MAX;

struct Node {
    candidate: Candidate,
    prev: usize,
    next: usize,
    alive: bool,
    generation: u32,
}

struct Sweep<'a> {
    events: &'a [Event],
    // Prices alone, so expiry searches touch a third of the memory.
    prices: Vec<f64>,
    nodes: Vec<Node>,
    head: usize,
    tail: usize,
    queue: BinaryHeap<Reverse<(usize, usize, u32)>>,
    stats: SweepStats,
}

impl<'a> Sweep<'a> {
    fn new(events: &'a [Event]) -> Self {
        Self {
            events,
            prices: events.iter().map(|e| e.price).collect(),
            nodes: Vec::with_capacity(events.len()),
            head: NIL,
            tail: NIL,
            queue: BinaryHeap::with_capacity(events.len()),
            stats: SweepStats::default(),
        }
    }

    /// Issues a fresh certificate for `left` and its current successor.
    fn certify(&mut self, left: usize, now: usize) -> Certificate {
        let right = self.nodes[left].next;
        let prices = &self.prices;
        let expiry = first_flip(
            &|t: usize| prices[t - 1],
            prices.len(),
            &self.nodes[left].candidate,
            &self.nodes[right].candidate,
            now,
        );
        let node = &mut self.nodes[left];
        node.generation = node.generation.wrapping_add(1);
        // A pair that never flips needs no queue entry; bumping the
        // generation still invalidates the old one.
        if expiry <= self.events.len() {
            self.queue.push(Reverse((expiry, left, node.generation)));
            self.stats.certificates_pushed += 1;
        }
        Certificate {
            left,
            right,
            expiry,
            generation: node.generation,
        }
    }

    fn append(&mut self, event: &Event) {
        if self.tail != NIL {
            let tail = &self.nodes[self.tail].candidate;
            // Qualities are nonincreasing along the sweep. A repeat of the
            // tail quality is already counted by the tail, born earlier.
            if tail.quality == event.quality {
                return;
            }
            debug_assert!(tail.quality > event.quality);
        }
        let id = self.nodes.len();
        self.nodes.push(Node {
            candidate: Candidate {
                quality: event.quality,
                birth: event.index,
            },
            prev: self.tail,
            next: NIL,
            alive: true,
            generation: 0,
        });
        self.stats.candidates_inserted += 1;
        if self.tail == NIL {
            self.head = id;
        } else {
            let prev = self.tail;
            self.nodes[prev].next = id;
            self.certify(prev, event.index);
        }
        self.tail = id;
    }

    fn expire(&mut self, now: usize) {
        while let Some(&Reverse((expiry, left, generation))) = self.queue.peek() {
            if expiry > now {
                break;
            }
            self.queue.pop();
            self.stats.certificates_popped += 1;
            let node = &self.nodes[left];
            if !node.alive || node.generation != generation {
                self.stats.stale_pops += 1;
                continue;
            }
            let (prev, right) = (node.prev, node.next);
            self.nodes[left].alive = false;
            self.nodes[right].prev = prev;
            self.stats.deletions += 1;
            if prev == NIL {
                self.head = right;
            } else {
                self.nodes[prev].next = right;
                self.certify(prev, now);
            }
        }
    }

    fn head_profit(&self, t: usize) -> f64 {
        let c = &self.nodes[self.head].candidate;
        profit_at(self.events[t - 1].price, c.quality, c.birth, t)
    }

    /// Checks list order and head optimality at event `t` by full scan.
    fn audit(&self, t: usize) {
        let price = self.events[t - 1].price;
        let mut id = self.head;
        let mut last = f64::INFINITY;
        while id != NIL {
            let c = &self.nodes[id].candidate;
            let v = profit_at(price, c.quality, c.birth, t);
            assert!(v < last, "list order broken at event {t}");
            last = v;
            id = self.nodes[id].next;
        }
        let best = self
            .nodes
            .iter()
            .map(|n| profit_at(price, n.candidate.quality, n.candidate.birth, t))
            .fold(f64::NEG_INFINITY, f64::max);
        assert_eq!(self.head_profit(t), best, "head not optimal at event {t}");
    }
}

/// Exact optimum for a one-dimensional market.
pub fn solve_exact_1d(market: &Market) -> Result<Solution> {
    solve_exact_1d_with_stats(market, false).map(|o| o.solution)
}

/// Exact optimum plus sweep counters. With `audit` set, every event is
/// followed by an `O(n)` scan asserting the list invariants.
pub fn solve_exact_1d_with_stats(market: &Market, audit: bool) -> Result<SweepOutcome> {
    let events = events(market)?;
    let mut sweep = Sweep::new(&events);
    let mut best: Option<(f64, usize, f64)> = None;
    for event in &events {
        sweep.append(event);
        sweep.expire(event.index);
        if audit {
            sweep.audit(event.index);
        }
        let profit = sweep.head_profit(event.index);
        if profit > 0.0 && best.is_none_or(|(b, _, _)| profit > b) {
            best = Some((
                profit,
                event.index,
                sweep.nodes[sweep.head].candidate.quality,
            ));
        }
    }
    sweep.stats.events = events.len();

    let solution = match best {
        None => Solution::NoProfitableProduct,
        Some((_, t, quality)) => {
            let product = Product {
                price: events[t - 1].price,
                qualities: vec![quality],
            };
            Solution::from_report(evaluate(market, &product)?)
        }
    };
    Ok(SweepOutcome {
        solution,
        stats: sweep.stats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{element_uniqueness_instance, random_pareto_market};
    use crate::market::Customer;
    use crate::oracle::brute_force_optimum;

    fn ev(prices: &[f64], qualities: &[f64]) -> Vec<Event> {
        prices
            .iter()
            .zip(qualities)
            .enumerate()
            .map(|(i, (&price, &quality))| Event {
                index: i + 1,
                price,
                quality,
            })
            .collect()
    }

    fn market(rows: &[(f64, f64)]) -> Market {
        Market::new(
            rows.iter()
                .map(|&(p, q)| Customer::new(p, vec![q]).unwrap())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn profit_at_event_examples() {
        let e = ev(&[10.0, 8.0, 6.0], &[5.0, 4.0, 3.0]);
        let c = Candidate {
            quality: 5.0,
            birth: 1,
        };
        assert_eq!(profit_at_event(&c, &e[2]).unwrap(), 3.0);

        let c = Candidate {
            quality: 8.0,
            birth: 2,
        };
        assert_eq!(
            profit_at_event(&c, &ev(&[9.0, 8.0], &[9.0, 8.0])[1]).unwrap(),
            0.0
        );

        let e = ev(&[9.0, 7.0, 5.0], &[2.0, 1.0, 0.0]);
        let c = Candidate {
            quality: 1.0,
            birth: 2,
        };
        assert_eq!(profit_at_event(&c, &e[1]).unwrap(), 6.0);

        let c = Candidate {
            quality: 1.0,
            birth: 3,
        };
        assert_eq!(
            profit_at_event(&c, &e[1]),
            Err(Error::EventBeforeBirth { event: 2, birth: 3 })
        );
    }

    #[test]
    fn closed_form_count_matches_direct_count() {
        let m = random_pareto_market(60, 1, 5, 0..=12).unwrap();
        let evs = events(&m).unwrap();
        for (b, born) in evs.iter().enumerate() {
            // A quality's first occurrence is where its count starts.
            if b > 0 && evs[b - 1].quality == born.quality {
                continue;
            }
            let c = Candidate {
                quality: born.quality,
                birth: born.index,
            };
            for e in &evs[b..] {
                // Customers swept so far whose requirement the quality meets.
                let by_scan = evs[..e.index]
                    .iter()
                    .filter(|x| x.quality <= c.quality)
                    .count();
                assert_eq!(by_scan, e.index - c.birth + 1);
            }
        }
    }

    /// Direct evaluation of both closed forms at every later event.
    fn oracle_expiry(events: &[Event], l: &Candidate, r: &Candidate, current: usize) -> usize {
        for t in current + 1..=events.len() {
            let p = events[t - 1].price;
            let lv = (p - l.quality) * (t + 1 - l.birth) as f64;
            let rv = (p - r.quality) * (t + 1 - r.birth) as f64;
            if lv <= rv {
                return t;
            }
        }
        events.len() + 1
    }

    #[test]
    fn expiry_strictly_inside() {
        let e = ev(&[10.0, 9.0, 4.0], &[5.0, 3.0, 1.0]);
        let l = Candidate {
            quality: 5.0,
            birth: 1,
        };
        let r = Candidate {
            quality: 3.0,
            birth: 2,
        };
        // t=2: 4*2=8 > 6*1=6; t=3: -1*3=-3 <= 1*2=2.
        assert_eq!(expiry_index(&l, &r, &e, 2), 3);
        assert_eq!(oracle_expiry(&e, &l, &r, 2), 3);
    }

    #[test]
    fn expiry_sentinel() {
        let e = ev(&[10.0, 9.9, 9.8], &[1.0, 0.5, 0.2]);
        let l = Candidate {
            quality: 1.0,
            birth: 1,
        };
        let r = Candidate {
            quality: 0.5,
            birth: 2,
        };
        assert_eq!(expiry_index(&l, &r, &e, 2), 4);
        assert_eq!(oracle_expiry(&e, &l, &r, 2), 4);
    }

    #[test]
    fn expiry_equality_counts_as_flipped() {
        // t=3: left (6-4)*3 = 6, right (6-3)*2 = 6.
        let e = ev(&[8.0, 7.0, 6.0, 1.0], &[4.0, 3.0, 2.0, 1.0]);
        let l = Candidate {
            quality: 4.0,
            birth: 1,
        };
        let r = Candidate {
            quality: 3.0,
            birth: 2,
        };
        assert_eq!(expiry_index(&l, &r, &e, 2), 3);
    }

    #[test]
    #[should_panic(expected = "already expired")]
    fn expiry_rejects_flipped_pair() {
        let e = ev(&[10.0, 9.0, 1.0], &[8.0, 0.0, 0.0]);
        let l = Candidate {
            quality: 8.0,
            birth: 1,
        };
        let r = Candidate {
            quality: 0.0,
            birth: 2,
        };
        expiry_index(&l, &r, &e, 2);
    }

    #[test]
    fn expiry_matches_oracle_on_random_pairs() {
        for seed in 0..40 {
            let m = random_pareto_market(30, 1, seed, 0..=15).unwrap();
            let evs = events(&m).unwrap();
            for i in 0..evs.len() {
                for j in i + 1..evs.len() {
                    let l = Candidate {
                        quality: evs[i].quality,
                        birth: i + 1,
                    };
                    let r = Candidate {
                        quality: evs[j].quality,
                        birth: j + 1,
                    };
                    if l.quality <= r.quality
                        || flipped(&|t: usize| evs[t - 1].price, &l, &r, j + 1)
                    {
                        continue;
                    }
                    assert_eq!(
                        expiry_index(&l, &r, &evs, j + 1),
                        oracle_expiry(&evs, &l, &r, j + 1)
                    );
                }
            }
        }
    }

    #[test]
    fn solve_examples() {
        let s = solve_exact_1d(&market(&[(2.0, 1.0)])).unwrap();
        let r = s.report().unwrap();
        assert_eq!(r.profit, 1.0);
        assert_eq!(r.product.price, 2.0);
        assert_eq!(r.product.qualities, vec![1.0]);

        assert_eq!(
            solve_exact_1d(&market(&[(3.0, 1.0), (2.0, 0.0)]))
                .unwrap()
                .profit(),
            2.0
        );

        let m = element_uniqueness_instance(&[1, 2, 3]).unwrap();
        assert_eq!(solve_exact_1d(&m).unwrap().profit(), 0.5);
    }

    #[test]
    fn rejects_multidimensional() {
        let m = Market::new(vec![Customer::new(3.0, vec![1.0, 1.0]).unwrap()]).unwrap();
        assert_eq!(solve_exact_1d(&m), Err(Error::NotOneDimensional(2)));
    }

    #[test]
    fn unprofitable_market() {
        let m = market(&[(1.0, 2.0), (0.5, 1.0), (0.5, 0.5)]);
        assert_eq!(solve_exact_1d(&m).unwrap(), Solution::NoProfitableProduct);
    }

    #[test]
    fn duplicates_and_ties() {
        let m = market(&[
            (4.0, 3.0),
            (4.0, 1.0),
            (4.0, 1.0),
            (5.0, 3.0),
            (6.0, 3.0),
            (2.0, 0.0),
        ]);
        let got = solve_exact_1d_with_stats(&m, true).unwrap();
        assert_eq!(
            got.solution.profit(),
            brute_force_optimum(&m).unwrap().profit()
        );
    }

    #[test]
    fn audited_sweeps_match_oracle() {
        for seed in 0..150 {
            let n = 1 + (seed as usize * 7) % 90;
            let m = random_pareto_market(n, 1, seed, 0..=(seed as i64 % 20 + 1)).unwrap();
            let got = solve_exact_1d_with_stats(&m, true).unwrap();
            let want = brute_force_optimum(&m).unwrap();
            assert_eq!(got.solution.profit(), want.profit(), "seed {seed}");
            let s = &got.stats;
            assert!(s.deletions <= s.candidates_inserted);
            assert!(s.candidates_inserted <= n);
            assert!(s.certificates_pushed <= 2 * n);
            assert!(s.certificates_popped <= s.certificates_pushed);
        }
    }
}
