#pragma once

#include <string>
#include <vector>

#include "dynmem/util.hpp"

namespace dynmem {

// Work accounting. One work unit = one stored-table entry read or write,
// plus a constant envelope for adjacent arithmetic. Structure navigation and
// other primitive operations are tallied separately as steps; exponent fits
// run on the work (touched-entry) column.
struct OpRecord {
  std::string op;
  i64 touched = 0;       // stored-table entries read or written
  i64 steps = 0;         // primitive steps (navigation, arithmetic batches)
  i64 rounds = 0;        // recomputation rounds executed during the op
  i64 threads_live = 0;  // live threads after the op
  i64 violations = 0;    // cumulative budget violations after the op
};

class WorkLedger {
 public:
  // Scoped mute: reads/writes performed by verification sweeps are not part
  // of the operation cost model.
  class MuteGuard {
   public:
    explicit MuteGuard(WorkLedger& l) : ledger_(l) { ++ledger_.mute_; }
    ~MuteGuard() { --ledger_.mute_; }
    MuteGuard(const MuteGuard&) = delete;
    MuteGuard& operator=(const MuteGuard&) = delete;

   private:
    WorkLedger& ledger_;
  };

  void begin(const std::string& tag) {
    DM_CHECK(!active_, "ledger op already active");
    cur_ = OpRecord{};
    cur_.op = tag;
    active_ = true;
  }
  // Init cost is recorded apart from the per-change records.
  void begin_init() {
    begin("init");
    init_active_ = true;
  }
  void end() {
    DM_CHECK(active_, "ledger end without begin");
    active_ = false;
    if (init_active_) {
      init_ = cur_;
      init_active_ = false;
    } else {
      ops_.push_back(cur_);
    }
  }

  void touch(i64 k = 1) {
    if (active_ && mute_ == 0) cur_.touched += k;
  }
  void step(i64 k = 1) {
    if (active_ && mute_ == 0) cur_.steps += k;
  }
  void round(i64 k = 1) {
    if (active_ && mute_ == 0) cur_.rounds += k;
  }
  void set_threads_live(i64 k) {
    if (active_) cur_.threads_live = k;
  }
  void set_violations(i64 k) {
    if (active_) cur_.violations = k;
  }
  // Raises the current op's work to at least `floor`; query charging uses
  // this to report a fixed envelope independent of tree shape.
  void touch_at_least(i64 floor) {
    if (active_ && mute_ == 0 && cur_.touched < floor) cur_.touched = floor;
  }

  bool muted() const { return mute_ > 0; }
  const std::vector<OpRecord>& ops() const { return ops_; }
  const OpRecord& init_record() const { return init_; }
  void clear_ops() { ops_.clear(); }

 private:
  std::vector<OpRecord> ops_;
  OpRecord init_;
  OpRecord cur_;
  bool active_ = false;
  bool init_active_ = false;
  int mute_ = 0;
};

}  // namespace dynmem
