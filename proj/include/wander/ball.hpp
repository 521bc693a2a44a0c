#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "wander/scale.hpp"

// Step-by-step propagation of a ball's diameter exponent along the itinerary
// 0..0 (m_0) 1..1 (M_0) 0..0 (m_1) ...  Inside B(0) at level m (center norm
// exponent c_m) a step is tame (diam' = diam + c_{m-1}) below the threshold
// (p/(p-1)) c_m, wild (diam' = 1 + p diam) strictly between the threshold and
// c_m, and undefined on the threshold itself.  Inside B(1) a step is affine
// (diam' = diam + 1).  The tame/wild choice is made by comparing exponents,
// never by consulting the schedule; the schedule's prediction (wild exactly at
// the start of special blocks) is then checked after the fact.

namespace wander::ball {

enum class Phase { zeros, ones };
enum class Rule { tame, wild, affine };
enum class StepError { boundary_case, ball_too_large };

const char* name(Phase ph);
const char* name(Rule r);
const char* name(StepError e);

struct BallState {
  long block = 0;
  Phase phase = Phase::zeros;
  long pos = 0;    // position inside the current phase
  long level = 0;  // m_i - pos while in zeros, 0 in ones
  Rat diam;
};

struct TraceEvent {
  long step;  // 0-based index of the applied step
  Rule rule;
  Rat diam_after;
  long block;
  Phase phase;
  long level;
};

struct StepFailure {
  StepError kind;
  long step;
};

struct RuleOutcome {
  Rule rule;
  Rat diam_after;
};

// Single-step rule arithmetic, independent of block bookkeeping.
std::variant<RuleOutcome, StepError> zero_step(const PrimeParams& pp, long level, const Rat& diam);
std::variant<RuleOutcome, StepError> one_step(const Rat& diam);

class Simulator {
 public:
  Simulator(const Schedule& sched, Rat d0);

  const BallState& state() const { return st_; }
  long steps_done() const { return step_; }
  // True right before the first step of a special block; fills s.
  bool at_special_checkpoint(std::size_t* s_out = nullptr) const;

  std::variant<TraceEvent, StepFailure> step();

 private:
  const Schedule& sched_;
  BallState st_;
  long step_ = 0;
};

struct Propagation {
  std::vector<TraceEvent> trace;  // complete up to trace_cap, checkpoints after
  BallState final_state;
  std::optional<StepFailure> failure;
  long steps_done = 0;
};

Propagation propagate(const Schedule& sched, const Rat& d0, long steps,
                      std::size_t trace_cap = static_cast<std::size_t>(-1));

// CSV with header: step,rule,diam,block_index,phase,level
std::string trace_csv(const Propagation& prop);

struct Checkpoint {
  long i;        // block index
  Int step;      // N_i
  std::size_t s; // passage index the closed form refers to
  bool special;
  Rat expected;
  Rat actual;
  bool pass;
};

struct VerifyReport {
  Rat t;
  Rat d0;
  std::vector<Checkpoint> checkpoints;
  std::vector<long> wild_steps;          // where the wild rule actually fired
  std::vector<long> expected_wild_steps; // N_{l_s(p-1)^2}
  bool wild_locus_ok = false;
  std::optional<StepFailure> failure;
  bool all_pass = false;
};

// Replays the orbit from d0 (default: the closed-form t) through block
// l_{s_max}(p-1)^2 and checks every N_i against the closed forms, exactly.
VerifyReport verify_diameter_theorem(const Schedule& sched, std::size_t s_max,
                                     const std::optional<Rat>& d0 = std::nullopt);

struct Certificate {
  Rat t;
  Rat t_prime;
  long budget = 0;
  bool escaped = false;
  long escape_step = -1;            // set when escaped
  std::vector<Rat> differences;     // t'_s - t_s at the special checkpoints reached
  std::size_t matched_checkpoints = 0;  // prefix of checkpoints preceded by identical rules
};

// Propagates the pair (t, t') in lockstep.  The run escapes when the larger
// ball violates a step precondition (it no longer fits inside its sphere or
// inside B(1)); t' = t is allowed as a degenerate control and never escapes.
// Throws std::invalid_argument when t' < t.
Certificate certify_component(const Schedule& sched, const Rat& t_prime, long budget);

}  // namespace wander::ball
