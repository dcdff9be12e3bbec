#include "dynmem/dcfl_engine.hpp"

#include <algorithm>

namespace dynmem {

namespace {

std::string fmt_hat(const HatDelta& h) {
  return "{dead=" + std::to_string(h.dead ? 1 : 0) + ",end=" + std::to_string(h.end) +
         ",h=" + std::to_string(h.height) + ",top=" + std::to_string(h.top) +
         ",e=" + std::to_string(h.empty_pos) + ",es=" + std::to_string(h.empty_state) +
         ",len=" + std::to_string(h.dlen) + "}";
}

std::string fmt_pop(const PopResult& r) {
  return "(" + std::to_string(r.offset) + "," + std::to_string(r.state) + ")";
}

}  // namespace

DcflEngine::DcflEngine(const Rdpda& m, std::vector<i32> word, Theta theta, i64 size_bound)
    : pda_(m), theta_(theta), word_(std::move(word)) {
  theta_.validate();
  pda_.validate();
  DM_REQUIRE(pda_.states <= 127, "dcfl engine: at most 127 states supported");
  DM_REQUIRE(pda_.gamma.size() <= 256, "dcfl engine: at most 256 stack symbols supported");
  DM_REQUIRE(pda_.sigma.find("<gap>") == -1, "dcfl engine: the symbol name <gap> is reserved");
  // The update machinery identifies the levels below a revisited height with
  // a frozen prefix stack, which a push that rewrites the symbol underneath
  // the new top would invalidate.
  for (i32 q = 0; q < pda_.states; ++q)
    for (i32 a = 0; a < pda_.sigma.size(); ++a)
      for (i32 g = 0; g < pda_.gamma.size(); ++g) {
        const Rdpda::Move* mv = pda_.move(q, a, g);
        DM_REQUIRE(mv == nullptr || mv->push.size() != 2 || mv->push[1] == g,
                   "dcfl engine: a two-symbol push must keep the popped symbol below the new top");
      }
  for (i32 c : word_)
    DM_REQUIRE(c >= 0 && c < pda_.sigma.size(), "dcfl engine: word symbol out of range");

  const i64 len = static_cast<i64>(word_.size());
  if (size_bound == 0) size_bound = std::max<i64>(4 * len, ipow(2, theta_.h));
  DM_REQUIRE(size_bound > 2 * len && size_bound >= ipow(2, theta_.h),
             "dcfl engine: size bound below max(2|w|+1, 2^h)");
  DM_REQUIRE(size_bound <= 65535, "dcfl engine: size bound exceeds table index width");
  bound_ = size_bound;
  grid_ = SpecialK(bound_, theta_.h);

  nq_ = pda_.states;
  ng_ = pda_.gamma.size();
  sk_ = grid_.size();

  // Neutral gap symbol: pops the top and pushes it back in every state.
  {
    const i32 ns = pda_.sigma.size();
    std::vector<std::optional<Rdpda::Move>> d2(static_cast<size_t>(pda_.states) * (ns + 1) * ng_);
    for (i32 q = 0; q < pda_.states; ++q)
      for (i32 a = 0; a < ns; ++a)
        for (i32 g = 0; g < ng_; ++g)
          d2[(static_cast<size_t>(q) * (ns + 1) + a) * ng_ + g] =
              pda_.delta[(static_cast<size_t>(q) * ns + a) * ng_ + g];
    for (i32 q = 0; q < pda_.states; ++q)
      for (i32 g = 0; g < ng_; ++g)
        d2[(static_cast<size_t>(q) * (ns + 1) + ns) * ng_ + g] = Rdpda::Move{q, {g}};
    pda_.delta = std::move(d2);
    nu_ = pda_.sigma.intern("<gap>");
    DM_CHECK(nu_ == ns, "gap symbol id mismatch");
    pda_.validate();
  }

  fill_from_oracle();
}

// ---------------------------------------------------------------------------
// Index layout

i64 DcflEngine::hat_index(i64 i, i64 j, i32 p, i32 tau) const {
  return (tri(i, j) * nq_ + p) * ng_ + tau;
}

i64 DcflEngine::push_index(i64 i, i64 j, i32 p, i32 tau, i32 kidx) const {
  return ((tri(i, j) * nq_ + p) * ng_ + tau) * sk_ + kidx;
}

i64 DcflEngine::pop_index(i64 i, i64 j, i32 p, i32 tau, i32 q, i64 m, i32 kidx) const {
  const i64 slot = pop_base_[static_cast<size_t>(tri(i, j))] + (m - j - 1);
  return (((slot * nq_ + p) * ng_ + tau) * nq_ + q) * sk_ + kidx;
}

void DcflEngine::rebuild_pop_base() {
  const i64 len = size();
  pop_base_.assign(static_cast<size_t>(len * (len + 1) / 2 + 1), 0);
  i64 acc = 0;
  for (i64 j = 1; j <= len; ++j)
    for (i64 i = 1; i <= j; ++i) {
      pop_base_[static_cast<size_t>(tri(i, j))] = acc;
      acc += len - j;
    }
  pop_base_.back() = acc;
}

// ---------------------------------------------------------------------------
// Stored-entry access

const HatDelta& DcflEngine::hat_at(i64 i, i64 j, i32 p, i32 tau) {
  ledger_.touch(1);
  return hat_[static_cast<size_t>(hat_index(i, j, p, tau))];
}

i64 DcflEngine::push_at(i64 i, i64 j, i32 p, i32 tau, i64 k) {
  const i32 kx = grid_.index_of(k);
  DM_CHECK(kx >= 0, "push_at: off-grid height");
  ledger_.touch(1);
  return push_[static_cast<size_t>(push_index(i, j, p, tau, kx))];
}

PopResult DcflEngine::pop_at(i64 i, i64 j, i32 p, i32 tau, i32 q, i64 m, i64 k) {
  const i32 kx = grid_.index_of(k);
  DM_CHECK(kx >= 0, "pop_at: off-grid depth");
  ledger_.touch(1);
  const size_t x = static_cast<size_t>(pop_index(i, j, p, tau, q, m, kx));
  return {static_cast<i64>(pop_off_[x]), static_cast<i32>(pop_st_[x])};
}

HatDelta DcflEngine::synth_hat(i32 state, i32 tau) const {
  return HatDelta{false, state, 1, tau, 0, -1, 0};
}

PopResult DcflEngine::single_pop(i32 q, i64 m, i32 tau) {
  if (m > size()) return {};
  const HatDelta& h = hat_at(m, size(), q, tau);
  if (h.empty_pos == 0) return {};
  return {h.empty_pos, h.empty_state};
}

// ---------------------------------------------------------------------------
// Composed reads for arbitrary heights

std::optional<DcflEngine::Anchor> DcflEngine::anchor_at(i64 i, i64 x, i32 p, i32 tau, i64 level) {
  const u64 b2 = static_cast<u64>(bound_ + 2);
  const u64 key =
      (((static_cast<u64>(i) * b2 + static_cast<u64>(x + 1)) * b2 + static_cast<u64>(level)) *
           static_cast<u64>(nq_) +
       static_cast<u64>(p)) *
          static_cast<u64>(ng_) +
      static_cast<u64>(tau);
  auto it = anchor_memo_.find(key);
  if (it != anchor_memo_.end()) {
    ledger_.touch(1);
    return it->second;
  }
  std::optional<Anchor> out;
  if (x < i) {
    if (level == 1) out = Anchor{i - 1, p, tau};
  } else {
    auto pp = push_any_impl(i, x, p, tau, level);
    if (pp.has_value()) {
      if (*pp == 0) {
        out = Anchor{i - 1, p, tau};
      } else {
        const HatDelta& hp = hat_at(i, i - 1 + *pp, p, tau);
        out = Anchor{i - 1 + *pp, hp.end, hp.top};
      }
    }
  }
  anchor_memo_.emplace(key, out);
  return out;
}

std::optional<i64> DcflEngine::push_any_impl(i64 i, i64 j, i32 p, i32 tau, i64 k) {
  if (k < 1) return std::nullopt;
  if (j < i) return k == 1 ? std::optional<i64>(0) : std::nullopt;
  const HatDelta h = hat_at(i, j, p, tau);
  if (h.dead || h.empty_pos != 0 || k > h.height) return std::nullopt;
  const std::vector<i64> digits = grid_.digits(k);
  const i64 bb = grid_.base();
  i64 reached = 0;  // partial height already anchored
  i64 pp = 0;       // its last visit (prefix length in [i, j])
  for (int b = grid_.levels() - 1; b >= 0; --b) {
    const i64 c = digits[static_cast<size_t>(b)] * ipow(bb, b);
    if (c == 0) continue;
    if (reached == 0) {
      const i64 v = push_at(i, j, p, tau, c);
      DM_CHECK(v >= 0, "push composition: first chunk undefined");
      pp = v;
      reached = c;
      continue;
    }
    // After the last visit to `reached` the height stays above it, so the
    // next step climbs; its pushed top starts a sub-run whose relative level
    // c is the absolute level reached + c.
    i32 sp, tp;
    if (pp == 0) {
      sp = p;
      tp = tau;
    } else {
      const HatDelta& hp = hat_at(i, i - 1 + pp, p, tau);
      DM_CHECK(hp.height == reached, "push composition: anchor height mismatch");
      sp = hp.end;
      tp = hp.top;
    }
    const i64 mvpos = i + pp;  // position of the climbing step
    const Rdpda::Move* mv = pda_.move(sp, word_[static_cast<size_t>(mvpos - 1)], tp);
    DM_CHECK(mv != nullptr && mv->push.size() == 2, "push composition: climbing step missing");
    i64 trel;
    if (mvpos + 1 > j) {
      DM_CHECK(c == 1, "push composition: empty tail for a deep chunk");
      trel = 0;
    } else {
      trel = push_at(mvpos + 1, j, mv->state, mv->push[0], c);
      DM_CHECK(trel >= 0, "push composition: tail chunk undefined");
    }
    pp = pp + 1 + trel;
    reached += c;
  }
  return pp;
}

PopResult DcflEngine::pop_any_impl(i64 i, i64 x, i32 p, i32 tau, i32 q, i64 m, i64 k) {
  if (k < 1) return {};
  i64 height;
  if (x < i) {
    height = 1;
  } else {
    const HatDelta& h = hat_at(i, x, p, tau);
    if (h.dead || h.empty_pos != 0) return {};
    height = h.height;
  }
  if (k > height) return {};
  const std::vector<i64> digits = grid_.digits(k);
  const i64 bb = grid_.base();
  i64 done = 0, mcur = m;
  i32 r = q;
  for (int b = grid_.levels() - 1; b >= 0; --b) {
    const i64 c = digits[static_cast<size_t>(b)] * ipow(bb, b);
    if (c == 0) continue;
    if (mcur > size()) return {};
    auto an = anchor_at(i, x, p, tau, height - done);
    DM_CHECK(an.has_value(), "pop composition: anchor missing");
    PopResult pr;
    if (an->end < i) {
      if (c > 1) return {};
      pr = single_pop(r, mcur, an->top);
    } else {
      pr = pop_at(i, an->end, p, tau, r, mcur, c);
    }
    if (pr.offset == 0) return {};
    mcur += pr.offset;
    r = pr.state;
    done += c;
  }
  return {mcur - m, r};
}

std::optional<i64> DcflEngine::push_pos_any(i64 i, i64 j, i32 p, i32 tau, i64 k) {
  DM_REQUIRE(i >= 1 && i - 1 <= j && j <= size(), "push_pos_any: bad window");
  DM_REQUIRE(p >= 0 && p < nq_ && tau >= 0 && tau < ng_, "push_pos_any: bad configuration");
  DM_REQUIRE(k >= 1 && k <= bound_, "push_pos_any: bad height");
  return push_any_impl(i, j, p, tau, k);
}

PopResult DcflEngine::pop_pos_any(i64 i, i64 j, i32 p, i32 tau, i32 q, i64 m, i64 k) {
  DM_REQUIRE(i >= 1 && i - 1 <= j && j <= size(), "pop_pos_any: bad window");
  DM_REQUIRE(p >= 0 && p < nq_ && tau >= 0 && tau < ng_ && q >= 0 && q < nq_,
             "pop_pos_any: bad configuration");
  DM_REQUIRE(m > j && m <= size() + 1, "pop_pos_any: bad suffix start");
  DM_REQUIRE(k >= 1 && k <= bound_, "pop_pos_any: bad depth");
  return pop_any_impl(i, j, p, tau, q, m, k);
}

// ---------------------------------------------------------------------------
// Run recomposition across a changed position

DcflEngine::Decomp DcflEngine::flow(i64 i, i64 j, i32 p, i32 tau, i64 l, i32 sym) {
  const i64 plen = l - i;
  const HatDelta h1 = plen > 0 ? hat_at(i, l - 1, p, tau) : synth_hat(p, tau);
  Decomp d;
  if (h1.dead) {
    d.hat = h1;
    return d;
  }
  if (h1.empty_pos != 0) {
    // The prefix emptied at its very end (a realtime run cannot outlive an
    // earlier empty), so the changed step finds no stack and dies.
    DM_CHECK(h1.empty_pos == plen && h1.height == 0, "flow: live prefix emptied mid-window");
    d.hat = HatDelta{true, h1.end, 0, -1, h1.empty_pos, h1.empty_state, plen};
    return d;
  }
  const Rdpda::Move* mv = pda_.move(h1.end, sym, h1.top);
  if (mv == nullptr) {
    d.hat = HatDelta{true, h1.end, h1.height, h1.top, 0, -1, plen};
    return d;
  }
  if (mv->push.empty()) return batch(i, j, p, tau, l - 1, l, mv->state, h1.height - 1);

  // The changed step pushed; follow the chain of sub-runs that live on a
  // single pushed symbol until one survives to j or the original prefix
  // levels are exposed.
  i64 lvl = h1.height + static_cast<i64>(mv->push.size()) - 1;
  i32 qs = mv->state;
  i32 alpha = mv->push[0];
  i64 pos = l;
  while (true) {
    const HatDelta seg = pos < j ? hat_at(pos + 1, j, qs, alpha) : synth_hat(qs, alpha);
    if (seg.empty_pos != 0) {
      if (lvl == h1.height + 1) {
        // the fresh top popped; underneath sits the old top (pushes never
        // rewrite the symbol below)
        pos += seg.empty_pos;
        qs = seg.empty_state;
        alpha = h1.top;
        lvl = h1.height;
        continue;
      }
      return batch(i, j, p, tau, l - 1, pos + seg.empty_pos, seg.empty_state, lvl - 1);
    }
    Decomp out;
    if (seg.dead) {
      out.hat = HatDelta{true, seg.end, (lvl - 1) + seg.height, seg.top, 0, -1,
                         (pos - i + 1) + seg.dlen};
      return out;
    }
    out.hat = HatDelta{false, seg.end, (lvl - 1) + seg.height, seg.top, 0, -1, j - i + 1};
    out.kf = lvl;
    out.pos_f = pos;
    out.q_f = qs;
    out.tau_e = alpha;
    out.tail = seg;
    return out;
  }
}

DcflEngine::Decomp DcflEngine::batch(i64 i, i64 j, i32 p, i32 tau, i64 xpre, i64 pos, i32 r,
                                     i64 k0) {
  Decomp d;
  i64 done = 0;
  if (k0 > 0 && pos < j) {
    const i64 bb = grid_.base();
    for (int b = grid_.levels() - 1; b >= 0; --b) {
      const i64 step = ipow(bb, b);
      i64 hi = std::min<i64>(bb, (k0 - done) / step);
      if (hi <= 0) continue;
      auto probe = [&](i64 a) -> PopResult {
        const i64 c = a * step;
        auto an = anchor_at(i, xpre, p, tau, k0 - done);
        DM_CHECK(an.has_value(), "batch: prefix anchor missing");
        PopResult pr;
        if (an->end < i) {
          if (c > 1) return {};
          pr = single_pop(r, pos + 1, an->top);
        } else {
          pr = pop_at(i, an->end, p, tau, r, pos + 1, c);
        }
        if (pr.offset == 0 || pos + pr.offset > j) return {};
        return pr;
      };
      i64 lo = 0;
      while (lo < hi) {
        const i64 mid = (lo + hi + 1) / 2;
        if (probe(mid).offset != 0)
          lo = mid;
        else
          hi = mid - 1;
      }
      if (lo > 0) {
        const PopResult pr = probe(lo);
        DM_CHECK(pr.offset != 0, "batch: committed probe vanished");
        done += lo * step;
        pos += pr.offset;
        r = pr.state;
        if (pos >= j) break;
      }
    }
  }
  const i64 kf = k0 - done;
  if (kf == 0) {
    const i64 e = pos - i + 1;
    d.hat = HatDelta{pos != j, r, 0, -1, e, r, e};
    return d;
  }
  auto an = anchor_at(i, xpre, p, tau, kf);
  DM_CHECK(an.has_value(), "batch: exposed-level anchor missing");
  const i32 tau_e = an->top;
  const HatDelta tail = pos < j ? hat_at(pos + 1, j, r, tau_e) : synth_hat(r, tau_e);
  DM_CHECK(tail.empty_pos == 0, "batch: maximal pop run left a tail that re-empties");
  if (tail.dead) {
    d.hat =
        HatDelta{true, tail.end, (kf - 1) + tail.height, tail.top, 0, -1, (pos - i + 1) + tail.dlen};
    return d;
  }
  d.hat = HatDelta{false, tail.end, (kf - 1) + tail.height, tail.top, 0, -1, j - i + 1};
  d.kf = kf;
  d.pos_f = pos;
  d.q_f = r;
  d.tau_e = tau_e;
  d.tail = tail;
  return d;
}

// ---------------------------------------------------------------------------
// Relabel

void DcflEngine::relabel(i64 pos, i32 sym) {
  DM_REQUIRE(pos >= 1 && pos <= size(), "relabel: position out of range");
  DM_REQUIRE(sym >= 0 && sym < pda_.sigma.size() && sym != nu_, "relabel: symbol out of range");
  ledger_.begin("relabel");
  if (word_[static_cast<size_t>(pos - 1)] != sym) relabel_impl(pos, sym);
  ledger_.end();
}

void DcflEngine::relabel_impl(i64 l, i32 sym) {
  const i64 len = size();
  word_[static_cast<size_t>(l - 1)] = sym;
  anchor_memo_.clear();

  const i64 spanJ = len - l + 1;
  std::vector<Decomp> dec(static_cast<size_t>(l * spanJ * nq_ * ng_));
  auto dec_at = [&](i64 i, i64 j, i32 p, i32 t) -> Decomp& {
    return dec[static_cast<size_t>(((((i - 1) * spanJ + (j - l)) * nq_) + p) * ng_ + t)];
  };

  // Window summaries across the change. Every read below touches only
  // windows and suffixes that avoid position l, so rewriting in place is
  // safe in any order.
  i64 hatEntries = 0;
  for (i64 i = 1; i <= l; ++i)
    for (i64 j = l; j <= len; ++j)
      for (i32 p = 0; p < nq_; ++p)
        for (i32 t = 0; t < ng_; ++t) {
          Decomp d = flow(i, j, p, t, l, sym);
          hat_[static_cast<size_t>(hat_index(i, j, p, t))] = d.hat;
          ledger_.touch(1);
          ledger_.step(1);
          ++hatEntries;
          dec_at(i, j, p, t) = std::move(d);
        }

  // Last-visit rows of the same windows: levels at or below the surviving
  // prefix stack keep their old position, levels above are tail visits.
  i64 pushEntries = 0;
  for (i64 i = 1; i <= l; ++i)
    for (i64 j = l; j <= len; ++j)
      for (i32 p = 0; p < nq_; ++p)
        for (i32 t = 0; t < ng_; ++t) {
          const Decomp& d = dec_at(i, j, p, t);
          const bool live = d.live();
          for (i32 kx = 0; kx < sk_; ++kx) {
            const i64 k = grid_.values()[static_cast<size_t>(kx)];
            i64 v = -1;
            if (live && k <= d.hat.height) {
              if (k <= d.kf - 1) {
                auto pp = push_any_impl(i, l - 1, p, t, k);
                DM_CHECK(pp.has_value(), "relabel: prefix last-visit undefined");
                v = *pp;
              } else {
                const i64 rel = k - d.kf + 1;
                i64 tp = 0;
                if (d.pos_f == j) {
                  DM_CHECK(rel == 1, "relabel: empty tail for a deep level");
                } else {
                  auto pp = push_any_impl(d.pos_f + 1, j, d.q_f, d.tau_e, rel);
                  DM_CHECK(pp.has_value(), "relabel: tail last-visit undefined");
                  tp = *pp;
                }
                v = (d.pos_f - i + 1) + tp;
              }
            }
            push_[static_cast<size_t>(push_index(i, j, p, t, kx))] = static_cast<i32>(v);
            ledger_.touch(1);
            ledger_.step(1);
            ++pushEntries;
          }
        }

  // Pop rows whose window spans the change: the top of the new stack is the
  // tail segment's (its entries are directly stored), deeper levels continue
  // through the frozen prefix anchors.
  i64 popUEntries = 0;
  for (i64 i = 1; i <= l; ++i)
    for (i64 j = l; j <= len; ++j)
      for (i32 p = 0; p < nq_; ++p)
        for (i32 t = 0; t < ng_; ++t) {
          const Decomp& d = dec_at(i, j, p, t);
          const bool live = d.live();
          const i64 th = live ? d.tail.height : 0;
          const i64 h2 = live ? (d.kf - 1) + th : 0;
          for (i32 q = 0; q < nq_; ++q)
            for (i64 m = j + 1; m <= len; ++m) {
              bool chainReady = false;
              PopResult o1;
              for (i32 kx = 0; kx < sk_; ++kx) {
                const i64 k = grid_.values()[static_cast<size_t>(kx)];
                PopResult val;
                if (live && k <= h2) {
                  if (k <= th) {
                    val = d.pos_f == j ? single_pop(q, m, d.tau_e)
                                       : pop_at(d.pos_f + 1, j, d.q_f, d.tau_e, q, m, k);
                  } else {
                    if (!chainReady) {
                      o1 = d.pos_f == j ? single_pop(q, m, d.tau_e)
                                        : pop_any_impl(d.pos_f + 1, j, d.q_f, d.tau_e, q, m, th);
                      chainReady = true;
                    }
                    if (o1.offset != 0) {
                      auto an = anchor_at(i, l - 1, p, t, d.kf - 1);
                      DM_CHECK(an.has_value(), "relabel: pop anchor missing");
                      PopResult below;
                      if (an->end < i) {
                        below = k - th == 1 ? single_pop(o1.state, m + o1.offset, an->top)
                                            : PopResult{};
                      } else {
                        below = pop_any_impl(i, an->end, p, t, o1.state, m + o1.offset, k - th);
                      }
                      if (below.offset != 0) val = {o1.offset + below.offset, below.state};
                    }
                  }
                }
                const size_t px = static_cast<size_t>(pop_index(i, j, p, t, q, m, kx));
                pop_off_[px] = static_cast<u16>(val.offset);
                pop_st_[px] = static_cast<i8>(val.state);
                ledger_.touch(1);
                ledger_.step(1);
                ++popUEntries;
              }
            }
        }

  // Pop rows whose suffix spans the change: pops strictly before the change
  // keep their entries; the first crossing pop stitches through the already
  // rewritten whole-suffix summary, deeper ones continue on old entries
  // beyond the change.
  i64 popVEntries = 0;
  const i64 bb = grid_.base();
  for (i64 j = 1; j < l; ++j)
    for (i64 i = 1; i <= j; ++i)
      for (i32 p = 0; p < nq_; ++p)
        for (i32 t = 0; t < ng_; ++t) {
          const HatDelta& hc = hat_[static_cast<size_t>(hat_index(i, j, p, t))];
          ledger_.touch(1);
          if (hc.dead || hc.empty_pos != 0) continue;
          const i64 hh = hc.height;
          for (i32 q = 0; q < nq_; ++q)
            for (i64 m = j + 1; m <= l; ++m) {
              const i64 cut = l - m;  // suffix offsets <= cut precede the change
              i64 done = 0, mcur = m;
              i32 r = q;
              if (cut >= 1) {
                for (int b = grid_.levels() - 1; b >= 0; --b) {
                  const i64 step = ipow(bb, b);
                  i64 hi = std::min<i64>(bb, (hh - done) / step);
                  if (hi <= 0) continue;
                  auto probe = [&](i64 a) -> PopResult {
                    const i64 c = a * step;
                    auto an = anchor_at(i, j, p, t, hh - done);
                    DM_CHECK(an.has_value(), "relabel: row anchor missing");
                    PopResult pr;
                    if (an->end < i) {
                      if (c > 1) return {};
                      pr = single_pop(r, mcur, an->top);
                    } else {
                      pr = pop_at(i, an->end, p, t, r, mcur, c);
                    }
                    if (pr.offset == 0 || (mcur - m) + pr.offset > cut) return {};
                    return pr;
                  };
                  i64 lo = 0;
                  while (lo < hi) {
                    const i64 mid = (lo + hi + 1) / 2;
                    if (probe(mid).offset != 0)
                      lo = mid;
                    else
                      hi = mid - 1;
                  }
                  if (lo > 0) {
                    const PopResult pr = probe(lo);
                    done += lo * step;
                    mcur += pr.offset;
                    r = pr.state;
                  }
                }
              }
              if (done >= hh) continue;  // every pop precedes the change: row unchanged
              auto an = anchor_at(i, j, p, t, hh - done);
              DM_CHECK(an.has_value(), "relabel: crossing anchor missing");
              PopResult next = single_pop(r, mcur, an->top);
              if (next.offset != 0) next.offset += mcur - m;
              for (i32 kx = 0; kx < sk_; ++kx) {
                const i64 k = grid_.values()[static_cast<size_t>(kx)];
                if (k <= done || k > hh) continue;
                PopResult val;
                if (next.offset != 0) {
                  if (k == done + 1) {
                    val = next;
                  } else {
                    auto an2 = anchor_at(i, j, p, t, hh - done - 1);
                    DM_CHECK(an2.has_value(), "relabel: post-crossing anchor missing");
                    PopResult below;
                    if (an2->end < i) {
                      below = k - done - 1 == 1 ? single_pop(next.state, m + next.offset, an2->top)
                                                : PopResult{};
                    } else {
                      below =
                          pop_any_impl(i, an2->end, p, t, next.state, m + next.offset, k - done - 1);
                    }
                    if (below.offset != 0) val = {next.offset + below.offset, below.state};
                  }
                }
                const size_t px = static_cast<size_t>(pop_index(i, j, p, t, q, m, kx));
                pop_off_[px] = static_cast<u16>(val.offset);
                pop_st_[px] = static_cast<i8>(val.state);
                ledger_.touch(1);
                ledger_.step(1);
                ++popVEntries;
              }
            }
        }

  ledger_.round(4);
  ledger_.set_threads_live(std::max({hatEntries, pushEntries, popUEntries, popVEntries, i64{1}}));
}

// ---------------------------------------------------------------------------
// Insert

void DcflEngine::insert(i64 pos, InsertSide side, i32 sym) {
  const i64 l = side == InsertSide::kBefore ? pos : pos + 1;
  DM_REQUIRE(l >= 1 && l <= size() + 1, "insert: position out of range");
  DM_REQUIRE(sym >= 0 && sym < pda_.sigma.size() && sym != nu_, "insert: symbol out of range");
  ledger_.begin("insert");
  insert_shift(l);
  relabel_impl(l, sym);
  while (2 * size() >= bound_) grow_bound();
  ledger_.end();
}

void DcflEngine::insert_shift(i64 l) {
  anchor_memo_.clear();
  const i64 lo = size();
  const i64 ln = lo + 1;
  const i64 triN = ln * (ln + 1) / 2;

  std::vector<HatDelta> nhat(static_cast<size_t>(triN * nq_ * ng_));
  std::vector<i32> npush(static_cast<size_t>(triN * nq_ * ng_ * sk_), -1);
  std::vector<i64> nbase(static_cast<size_t>(triN + 1), 0);
  {
    i64 acc = 0;
    for (i64 j = 1; j <= ln; ++j)
      for (i64 i = 1; i <= j; ++i) {
        nbase[static_cast<size_t>(tri(i, j))] = acc;
        acc += ln - j;
      }
    nbase.back() = acc;
  }
  const i64 inner = static_cast<i64>(nq_) * ng_ * nq_ * sk_;
  std::vector<u16> noff(static_cast<size_t>(nbase.back() * inner), 0);
  std::vector<i8> nst(static_cast<size_t>(nbase.back() * inner), -1);

  auto nhx = [&](i64 i, i64 j, i32 p, i32 t) {
    return static_cast<size_t>((tri(i, j) * nq_ + p) * ng_ + t);
  };
  auto npx = [&](i64 i, i64 j, i32 p, i32 t, i32 kx) {
    return static_cast<size_t>(((tri(i, j) * nq_ + p) * ng_ + t) * sk_ + kx);
  };
  auto nox = [&](i64 i, i64 j, i32 p, i32 t, i32 q, i64 m, i32 kx) {
    const i64 slot = nbase[static_cast<size_t>(tri(i, j))] + (m - j - 1);
    return static_cast<size_t>((((slot * nq_ + p) * ng_ + t) * nq_ + q) * sk_ + kx);
  };

  i64 entries = 0;
  for (i64 jn = 1; jn <= ln; ++jn)
    for (i64 in = 1; in <= jn; ++in) {
      const bool spans = in <= l && l <= jn;
      const i64 io = in;  // window ends in old coordinates
      const i64 jo = jn < l ? jn : jn - 1;
      for (i32 p = 0; p < nq_; ++p)
        for (i32 t = 0; t < ng_; ++t) {
          HatDelta h;
          if (!spans) {
            const i64 ioo = in < l ? in : in - 1;
            h = hat_[static_cast<size_t>(hat_index(ioo, jo, p, t))];
          } else {
            const HatDelta o =
                jo >= io ? hat_[static_cast<size_t>(hat_index(io, jo, p, t))] : synth_hat(p, t);
            const i64 c = l - in;  // old symbols consumed before the gap
            if (o.dead) {
              if (io + o.dlen < l || (o.empty_pos != 0 && o.empty_pos == c)) {
                h = o;  // died before the gap, or found it with an empty stack
              } else {
                h = o;
                h.dlen = o.dlen + 1;
                if (o.empty_pos != 0 && o.empty_pos > c) h.empty_pos = o.empty_pos + 1;
              }
            } else if (o.empty_pos != 0 && c == jo - io + 1) {
              // alive but emptied exactly at the gap: the neutral symbol dies
              h = HatDelta{true, o.end, 0, -1, o.empty_pos, o.empty_state, o.dlen};
            } else {
              h = o;
              h.dlen = o.dlen + 1;
              if (o.empty_pos != 0 && o.empty_pos > c) h.empty_pos = o.empty_pos + 1;
            }
          }
          nhat[nhx(in, jn, p, t)] = h;
          ++entries;

          const bool liveNew = !h.dead && h.empty_pos == 0;
          for (i32 kx = 0; kx < sk_; ++kx) {
            i32 v;
            if (!spans) {
              const i64 ioo = in < l ? in : in - 1;
              v = push_[static_cast<size_t>(push_index(ioo, jo, p, t, kx))];
            } else {
              i32 e;
              if (jo >= io) {
                e = push_[static_cast<size_t>(push_index(io, jo, p, t, kx))];
              } else {
                e = grid_.values()[static_cast<size_t>(kx)] == 1 ? 0 : -1;
              }
              const i64 c = l - in;
              v = (!liveNew || e < 0) ? -1 : static_cast<i32>(e >= c ? e + 1 : e);
            }
            npush[npx(in, jn, p, t, kx)] = v;
            ++entries;
          }

          for (i32 q = 0; q < nq_; ++q)
            for (i64 m = jn + 1; m <= ln; ++m) {
              if (spans) {
                // the window absorbs the gap; the suffix sits beyond it
                if (liveNew && jo >= io) {
                  for (i32 kx = 0; kx < sk_; ++kx) {
                    const size_t ox =
                        static_cast<size_t>(pop_index(io, jo, p, t, q, m - 1, kx));
                    const size_t nx = nox(in, jn, p, t, q, m, kx);
                    noff[nx] = pop_off_[ox];
                    nst[nx] = pop_st_[ox];
                  }
                } else if (liveNew) {
                  // one-position window holding just the gap: a unit stack
                  if (m - 1 <= lo) {
                    const HatDelta& sufh =
                        hat_[static_cast<size_t>(hat_index(m - 1, lo, q, t))];
                    if (sufh.empty_pos != 0) {
                      const i32 kx1 = grid_.index_of(1);
                      const size_t nx = nox(in, jn, p, t, q, m, kx1);
                      noff[nx] = static_cast<u16>(sufh.empty_pos);
                      nst[nx] = static_cast<i8>(sufh.empty_state);
                    }
                  }
                }
              } else if (m <= l) {
                // suffix spans the gap: events before it keep their offsets
                if (m > lo) continue;  // gap-only suffix: no events
                for (i32 kx = 0; kx < sk_; ++kx) {
                  const i64 ioo = in < l ? in : in - 1;
                  const size_t ox = static_cast<size_t>(pop_index(ioo, jo, p, t, q, m, kx));
                  const size_t nx = nox(in, jn, p, t, q, m, kx);
                  const i64 o = static_cast<i64>(pop_off_[ox]);
                  noff[nx] = static_cast<u16>(o == 0 ? 0 : o + (m + o - 1 >= l ? 1 : 0));
                  nst[nx] = pop_st_[ox];
                }
              } else {
                for (i32 kx = 0; kx < sk_; ++kx) {
                  const i64 ioo = in < l ? in : in - 1;
                  const size_t ox = static_cast<size_t>(pop_index(ioo, jo, p, t, q, m - 1, kx));
                  const size_t nx = nox(in, jn, p, t, q, m, kx);
                  noff[nx] = pop_off_[ox];
                  nst[nx] = pop_st_[ox];
                }
              }
              entries += sk_;
            }
        }
    }

  hat_ = std::move(nhat);
  push_ = std::move(npush);
  pop_off_ = std::move(noff);
  pop_st_ = std::move(nst);
  pop_base_ = std::move(nbase);
  word_.insert(word_.begin() + (l - 1), nu_);
  ledger_.touch(2 * entries);
  ledger_.step(entries);
}

void DcflEngine::grow_bound() {
  DM_REQUIRE(bound_ <= 32767, "dcfl engine: size bound exceeds table index width");
  const i64 len = size();
  SpecialK g2(bound_ * 2, theta_.h);
  const i64 s2 = g2.size();
  const i64 triN = len * (len + 1) / 2;
  std::vector<i32> npush(static_cast<size_t>(triN * nq_ * ng_ * s2), -1);
  const i64 inner2 = static_cast<i64>(nq_) * ng_ * nq_ * s2;
  std::vector<u16> noff(static_cast<size_t>(pop_base_.back() * inner2), 0);
  std::vector<i8> nst(static_cast<size_t>(pop_base_.back() * inner2), -1);

  i64 writes = 0;
  for (i64 j = 1; j <= len; ++j)
    for (i64 i = 1; i <= j; ++i)
      for (i32 p = 0; p < nq_; ++p)
        for (i32 t = 0; t < ng_; ++t) {
          for (i32 kx = 0; kx < s2; ++kx) {
            auto pp = push_any_impl(i, j, p, t, g2.values()[static_cast<size_t>(kx)]);
            npush[static_cast<size_t>(((tri(i, j) * nq_ + p) * ng_ + t) * s2 + kx)] =
                pp.has_value() ? static_cast<i32>(*pp) : -1;
            ++writes;
          }
          for (i32 q = 0; q < nq_; ++q)
            for (i64 m = j + 1; m <= len; ++m)
              for (i32 kx = 0; kx < s2; ++kx) {
                const PopResult pr =
                    pop_any_impl(i, j, p, t, q, m, g2.values()[static_cast<size_t>(kx)]);
                const i64 slot = pop_base_[static_cast<size_t>(tri(i, j))] + (m - j - 1);
                const size_t nx =
                    static_cast<size_t>((((slot * nq_ + p) * ng_ + t) * nq_ + q) * s2 + kx);
                noff[nx] = static_cast<u16>(pr.offset);
                nst[nx] = static_cast<i8>(pr.state);
                ++writes;
              }
        }

  bound_ *= 2;
  grid_ = g2;
  sk_ = s2;
  push_ = std::move(npush);
  pop_off_ = std::move(noff);
  pop_st_ = std::move(nst);
  anchor_memo_.clear();
  ledger_.touch(writes);
  ledger_.step(writes);
}

// ---------------------------------------------------------------------------
// Query

bool DcflEngine::query(i64 i, i64 j) {
  DM_REQUIRE(i >= 1 && i - 1 <= j && j <= size(), "query: bad window");
  ledger_.begin("query");
  bool acc;
  if (j < i) {
    acc = pda_.accepting(pda_.start);
    ledger_.touch(1);
  } else {
    const HatDelta& h = hat_at(i, j, pda_.start, pda_.init_stack);
    acc = !h.dead && h.dlen == j - i + 1 && pda_.accepting(h.end);
  }
  ledger_.round(1);
  ledger_.set_threads_live(1);
  ledger_.end();
  return acc;
}

// ---------------------------------------------------------------------------
// Stored-entry probes (uncharged)

HatDelta DcflEngine::hat_entry(i64 i, i64 j, i32 p, i32 tau) const {
  DM_REQUIRE(i >= 1 && i <= j && j <= size(), "hat_entry: bad window");
  DM_REQUIRE(p >= 0 && p < nq_ && tau >= 0 && tau < ng_, "hat_entry: bad configuration");
  return hat_[static_cast<size_t>(hat_index(i, j, p, tau))];
}

i64 DcflEngine::push_entry(i64 i, i64 j, i32 p, i32 tau, i64 k) const {
  DM_REQUIRE(i >= 1 && i <= j && j <= size(), "push_entry: bad window");
  DM_REQUIRE(p >= 0 && p < nq_ && tau >= 0 && tau < ng_, "push_entry: bad configuration");
  const i32 kx = grid_.index_of(k);
  DM_REQUIRE(kx >= 0, "push_entry: off-grid height");
  return push_[static_cast<size_t>(push_index(i, j, p, tau, kx))];
}

PopResult DcflEngine::pop_entry(i64 i, i64 j, i32 p, i32 tau, i32 q, i64 m, i64 k) const {
  DM_REQUIRE(i >= 1 && i <= j && j <= size(), "pop_entry: bad window");
  DM_REQUIRE(p >= 0 && p < nq_ && tau >= 0 && tau < ng_ && q >= 0 && q < nq_,
             "pop_entry: bad configuration");
  DM_REQUIRE(m > j && m <= size(), "pop_entry: bad suffix start");
  const i32 kx = grid_.index_of(k);
  DM_REQUIRE(kx >= 0, "pop_entry: off-grid depth");
  const size_t x = static_cast<size_t>(pop_index(i, j, p, tau, q, m, kx));
  return {static_cast<i64>(pop_off_[x]), static_cast<i32>(pop_st_[x])};
}

// ---------------------------------------------------------------------------
// Table fill and verification

void DcflEngine::fill_from_oracle() {
  const i64 len = size();
  const i64 triN = len * (len + 1) / 2;
  hat_.assign(static_cast<size_t>(triN * nq_ * ng_), HatDelta{});
  push_.assign(static_cast<size_t>(triN * nq_ * ng_ * sk_), -1);
  rebuild_pop_base();
  const i64 inner = static_cast<i64>(nq_) * ng_ * nq_ * sk_;
  pop_off_.assign(static_cast<size_t>(pop_base_.back() * inner), 0);
  pop_st_.assign(static_cast<size_t>(pop_base_.back() * inner), -1);

  ledger_.begin_init();

  std::vector<i64> lastv(static_cast<size_t>(len + 2), -1);
  std::vector<i32> stack, vstack;
  std::vector<i64> evOff;
  std::vector<i32> evSt;

  for (i64 i = 1; i <= len; ++i)
    for (i32 p = 0; p < nq_; ++p)
      for (i32 t = 0; t < ng_; ++t) {
        // One traced run fills the summaries and last-visit rows for every j.
        std::fill(lastv.begin(), lastv.end(), -1);
        lastv[1] = 0;
        stack.assign(1, t);
        HatDelta cur = synth_hat(p, t);
        for (i64 j = i; j <= len; ++j) {
          if (!cur.dead) {
            if (stack.empty()) {
              cur.dead = true;
            } else {
              const Rdpda::Move* mv =
                  pda_.move(cur.end, word_[static_cast<size_t>(j - 1)], stack.back());
              if (mv == nullptr) {
                cur.dead = true;
              } else {
                stack.pop_back();
                for (auto it = mv->push.rbegin(); it != mv->push.rend(); ++it)
                  stack.push_back(*it);
                cur.end = mv->state;
                cur.dlen = j - i + 1;
                cur.height = static_cast<i64>(stack.size());
                cur.top = stack.empty() ? -1 : stack.back();
                if (stack.empty() && cur.empty_pos == 0) {
                  cur.empty_pos = cur.dlen;
                  cur.empty_state = cur.end;
                } else if (!stack.empty()) {
                  lastv[stack.size()] = cur.dlen;
                }
              }
            }
          }
          hat_[static_cast<size_t>(hat_index(i, j, p, t))] = cur;
          const bool live = !cur.dead && cur.empty_pos == 0;
          if (live) {
            for (i32 kx = 0; kx < sk_; ++kx) {
              const i64 k = grid_.values()[static_cast<size_t>(kx)];
              if (k <= cur.height && lastv[static_cast<size_t>(k)] >= 0)
                push_[static_cast<size_t>(push_index(i, j, p, t, kx))] =
                    static_cast<i32>(lastv[static_cast<size_t>(k)]);
            }
          }
        }

        // Second pass: pop rows from every (window end, suffix start).
        stack.assign(1, t);
        i32 st = p;
        bool alive = true, emptied = false;
        for (i64 j = i; j <= len; ++j) {
          if (alive && !emptied) {
            const Rdpda::Move* mv =
                pda_.move(st, word_[static_cast<size_t>(j - 1)], stack.back());
            if (mv == nullptr) {
              alive = false;
            } else {
              stack.pop_back();
              for (auto it = mv->push.rbegin(); it != mv->push.rend(); ++it) stack.push_back(*it);
              st = mv->state;
              if (stack.empty()) emptied = true;
            }
          }
          if (!alive || emptied) continue;
          const i64 hh = static_cast<i64>(stack.size());
          for (i32 q = 0; q < nq_; ++q)
            for (i64 m = j + 1; m <= len; ++m) {
              vstack = stack;
              i32 r = q;
              evOff.assign(static_cast<size_t>(hh + 1), 0);
              evSt.assign(static_cast<size_t>(hh + 1), -1);
              i64 minh = hh;
              for (i64 x = m; x <= len; ++x) {
                if (vstack.empty()) break;
                const Rdpda::Move* mv =
                    pda_.move(r, word_[static_cast<size_t>(x - 1)], vstack.back());
                if (mv == nullptr) break;
                vstack.pop_back();
                for (auto it = mv->push.rbegin(); it != mv->push.rend(); ++it)
                  vstack.push_back(*it);
                r = mv->state;
                if (static_cast<i64>(vstack.size()) < minh) {
                  minh = static_cast<i64>(vstack.size());
                  evOff[static_cast<size_t>(hh - minh)] = x - m + 1;
                  evSt[static_cast<size_t>(hh - minh)] = r;
                }
                if (vstack.empty()) break;
              }
              for (i32 kx = 0; kx < sk_; ++kx) {
                const i64 k = grid_.values()[static_cast<size_t>(kx)];
                if (k <= hh && evOff[static_cast<size_t>(k)] != 0) {
                  const size_t px = static_cast<size_t>(pop_index(i, j, p, t, q, m, kx));
                  pop_off_[px] = static_cast<u16>(evOff[static_cast<size_t>(k)]);
                  pop_st_[px] = static_cast<i8>(evSt[static_cast<size_t>(k)]);
                }
              }
            }
        }
      }

  ledger_.touch(static_cast<i64>(hat_.size() + push_.size() + pop_off_.size()));
  ledger_.step(static_cast<i64>(hat_.size() + push_.size() + pop_off_.size()));
  ledger_.round(1);
  ledger_.set_threads_live(1);
  ledger_.end();
}

std::vector<std::string> DcflEngine::verify_tables(i64 max_faults) const {
  std::vector<std::string> faults;
  const i64 len = size();
  std::vector<i64> lastv(static_cast<size_t>(len + 2), -1);
  std::vector<i32> stack, vstack;
  std::vector<i64> evOff;
  std::vector<i32> evSt;

  auto fault = [&](const std::string& s) {
    if (static_cast<i64>(faults.size()) < max_faults) faults.push_back(s);
  };

  for (i64 i = 1; i <= len && static_cast<i64>(faults.size()) < max_faults; ++i)
    for (i32 p = 0; p < nq_; ++p)
      for (i32 t = 0; t < ng_; ++t) {
        std::fill(lastv.begin(), lastv.end(), -1);
        lastv[1] = 0;
        stack.assign(1, t);
        HatDelta cur = synth_hat(p, t);
        for (i64 j = i; j <= len; ++j) {
          if (!cur.dead) {
            if (stack.empty()) {
              cur.dead = true;
            } else {
              const Rdpda::Move* mv =
                  pda_.move(cur.end, word_[static_cast<size_t>(j - 1)], stack.back());
              if (mv == nullptr) {
                cur.dead = true;
              } else {
                stack.pop_back();
                for (auto it = mv->push.rbegin(); it != mv->push.rend(); ++it)
                  stack.push_back(*it);
                cur.end = mv->state;
                cur.dlen = j - i + 1;
                cur.height = static_cast<i64>(stack.size());
                cur.top = stack.empty() ? -1 : stack.back();
                if (stack.empty() && cur.empty_pos == 0) {
                  cur.empty_pos = cur.dlen;
                  cur.empty_state = cur.end;
                } else if (!stack.empty()) {
                  lastv[stack.size()] = cur.dlen;
                }
              }
            }
          }
          const HatDelta& got = hat_[static_cast<size_t>(hat_index(i, j, p, t))];
          if (!(got == cur))
            fault("hat(" + std::to_string(i) + "," + std::to_string(j) + "," + std::to_string(p) +
                  "," + std::to_string(t) + "): stored " + fmt_hat(got) + " oracle " +
                  fmt_hat(cur));
          const bool live = !cur.dead && cur.empty_pos == 0;
          for (i32 kx = 0; kx < sk_; ++kx) {
            const i64 k = grid_.values()[static_cast<size_t>(kx)];
            i64 want = -1;
            if (live && k <= cur.height && lastv[static_cast<size_t>(k)] >= 0)
              want = lastv[static_cast<size_t>(k)];
            const i64 got2 = push_[static_cast<size_t>(push_index(i, j, p, t, kx))];
            if (got2 != want)
              fault("push(" + std::to_string(i) + "," + std::to_string(j) + "," +
                    std::to_string(p) + "," + std::to_string(t) + ",k=" + std::to_string(k) +
                    "): stored " + std::to_string(got2) + " oracle " + std::to_string(want));
          }
        }

        stack.assign(1, t);
        i32 st = p;
        bool alive = true, emptied = false;
        for (i64 j = i; j <= len; ++j) {
          if (alive && !emptied) {
            const Rdpda::Move* mv =
                pda_.move(st, word_[static_cast<size_t>(j - 1)], stack.back());
            if (mv == nullptr) {
              alive = false;
            } else {
              stack.pop_back();
              for (auto it = mv->push.rbegin(); it != mv->push.rend(); ++it) stack.push_back(*it);
              st = mv->state;
              if (stack.empty()) emptied = true;
            }
          }
          const bool live = alive && !emptied;
          const i64 hh = live ? static_cast<i64>(stack.size()) : 0;
          for (i32 q = 0; q < nq_; ++q)
            for (i64 m = j + 1; m <= len; ++m) {
              evOff.assign(static_cast<size_t>(hh + 1), 0);
              evSt.assign(static_cast<size_t>(hh + 1), -1);
              if (live) {
                vstack = stack;
                i32 r = q;
                i64 minh = hh;
                for (i64 x = m; x <= len; ++x) {
                  if (vstack.empty()) break;
                  const Rdpda::Move* mv =
                      pda_.move(r, word_[static_cast<size_t>(x - 1)], vstack.back());
                  if (mv == nullptr) break;
                  vstack.pop_back();
                  for (auto it = mv->push.rbegin(); it != mv->push.rend(); ++it)
                    vstack.push_back(*it);
                  r = mv->state;
                  if (static_cast<i64>(vstack.size()) < minh) {
                    minh = static_cast<i64>(vstack.size());
                    evOff[static_cast<size_t>(hh - minh)] = x - m + 1;
                    evSt[static_cast<size_t>(hh - minh)] = r;
                  }
                  if (vstack.empty()) break;
                }
              }
              for (i32 kx = 0; kx < sk_; ++kx) {
                const i64 k = grid_.values()[static_cast<size_t>(kx)];
                PopResult want;
                if (k <= hh && evOff[static_cast<size_t>(k)] != 0)
                  want = {evOff[static_cast<size_t>(k)], evSt[static_cast<size_t>(k)]};
                const size_t px = static_cast<size_t>(pop_index(i, j, p, t, q, m, kx));
                const PopResult got{static_cast<i64>(pop_off_[px]),
                                    static_cast<i32>(pop_st_[px])};
                if (!(got == want))
                  fault("pop(" + std::to_string(i) + "," + std::to_string(j) + "," +
                        std::to_string(p) + "," + std::to_string(t) + ",q=" + std::to_string(q) +
                        ",m=" + std::to_string(m) + ",k=" + std::to_string(k) + "): stored " +
                        fmt_pop(got) + " oracle " + fmt_pop(want));
              }
            }
        }
      }
  return faults;
}

std::vector<std::string> DcflEngine::verify_sample(std::mt19937_64& rng, i64 rows,
                                                   i64 max_faults) const {
  std::vector<std::string> faults;
  const i64 len = size();
  if (len == 0) return faults;
  auto fault = [&](const std::string& s) {
    if (static_cast<i64>(faults.size()) < max_faults) faults.push_back(s);
  };
  std::uniform_int_distribution<i64> dpos(1, len);
  std::uniform_int_distribution<i32> dq(0, nq_ - 1);
  std::uniform_int_distribution<i32> dg(0, ng_ - 1);

  std::vector<i64> lastv(static_cast<size_t>(len + 2), -1);
  for (i64 rrow = 0; rrow < rows && static_cast<i64>(faults.size()) < max_faults; ++rrow) {
    i64 a = dpos(rng), b = dpos(rng);
    const i64 i = std::min(a, b);
    const i32 p = dq(rng);
    const i32 t = dg(rng);
    if (rrow % 2 == 0) {
      const i64 j = std::max(a, b);
      const PdaRun run = rdpda_run(pda_, word_, i - 1, j - 1, p, t);
      const HatDelta want = hat_from_run(run);
      const HatDelta& got = hat_[static_cast<size_t>(hat_index(i, j, p, t))];
      if (!(got == want))
        fault("hat(" + std::to_string(i) + "," + std::to_string(j) + "," + std::to_string(p) +
              "," + std::to_string(t) + "): stored " + fmt_hat(got) + " oracle " + fmt_hat(want));
      for (i32 kx = 0; kx < sk_; ++kx) {
        const i64 k = grid_.values()[static_cast<size_t>(kx)];
        auto want2 = oracle_push_pos(pda_, word_, i - 1, j - 1, p, t, k);
        const i64 w = want2.has_value() ? *want2 : -1;
        const i64 got2 = push_[static_cast<size_t>(push_index(i, j, p, t, kx))];
        if (got2 != w)
          fault("push(" + std::to_string(i) + "," + std::to_string(j) + "," + std::to_string(p) +
                "," + std::to_string(t) + ",k=" + std::to_string(k) + "): stored " +
                std::to_string(got2) + " oracle " + std::to_string(w));
      }
    } else {
      if (std::max(a, b) >= len) continue;
      const i64 j = std::max(a, b);
      std::uniform_int_distribution<i64> dm(j + 1, len);
      const i64 m = dm(rng);
      const i32 q = dq(rng);
      for (i32 kx = 0; kx < sk_; ++kx) {
        const i64 k = grid_.values()[static_cast<size_t>(kx)];
        const PopResult want =
            oracle_pop_pos(pda_, word_, i - 1, j - 1, p, t, q, m - 1, len - 1, k);
        const size_t px = static_cast<size_t>(pop_index(i, j, p, t, q, m, kx));
        const PopResult got{static_cast<i64>(pop_off_[px]), static_cast<i32>(pop_st_[px])};
        if (!(got == want))
          fault("pop(" + std::to_string(i) + "," + std::to_string(j) + "," + std::to_string(p) +
                "," + std::to_string(t) + ",q=" + std::to_string(q) + ",m=" + std::to_string(m) +
                ",k=" + std::to_string(k) + "): stored " + fmt_pop(got) + " oracle " +
                fmt_pop(want));
      }
    }
  }
  return faults;
}

}  // namespace dynmem
