#include "wander/ball.hpp"

#include <sstream>
#include <stdexcept>

namespace wander::ball {

const char* name(Phase ph) { return ph == Phase::zeros ? "zero_block" : "one_block"; }

const char* name(Rule r) {
  switch (r) {
    case Rule::tame: return "tame";
    case Rule::wild: return "wild";
    default: return "affine";
  }
}

const char* name(StepError e) {
  return e == StepError::boundary_case ? "boundary_case" : "ball_too_large";
}

std::variant<RuleOutcome, StepError> zero_step(const PrimeParams& pp, long level, const Rat& diam) {
  if (level < 1) throw std::invalid_argument("zero_step: level must be >= 1");
  const long p = static_cast<long>(pp.p);
  Rat cm = rho_exponent(pp, level);
  if (diam >= cm) return StepError::ball_too_large;
  Rat threshold = make_rat(p, p - 1) * cm;
  if (diam == threshold) return StepError::boundary_case;
  if (diam < threshold)
    return RuleOutcome{Rule::tame, diam + rho_exponent(pp, level - 1)};
  return RuleOutcome{Rule::wild, 1 + p * diam};
}

std::variant<RuleOutcome, StepError> one_step(const Rat& diam) {
  if (diam >= 0) return StepError::ball_too_large;
  return RuleOutcome{Rule::affine, diam + 1};
}

namespace {

long to_long(const Int& v) {
  if (!v.fits_slong_p()) throw std::overflow_error("step count too large for this build");
  return v.get_si();
}

}  // namespace

Simulator::Simulator(const Schedule& sched, Rat d0) : sched_(sched) {
  st_.block = 0;
  st_.phase = Phase::zeros;
  st_.pos = 0;
  st_.level = to_long(sched.m(0));
  st_.diam = std::move(d0);
}

bool Simulator::at_special_checkpoint(std::size_t* s_out) const {
  return st_.phase == Phase::zeros && st_.pos == 0 && sched_.is_special(st_.block, s_out);
}

std::variant<TraceEvent, StepFailure> Simulator::step() {
  TraceEvent ev{step_, Rule::tame, Rat(), st_.block, st_.phase, st_.level};
  if (st_.phase == Phase::zeros) {
    auto out = zero_step(sched_.params(), st_.level, st_.diam);
    if (auto* err = std::get_if<StepError>(&out)) return StepFailure{*err, step_};
    auto& ok = std::get<RuleOutcome>(out);
    ev.rule = ok.rule;
    st_.diam = ok.diam_after;
    --st_.level;
    ++st_.pos;
    if (st_.pos == to_long(sched_.m(st_.block))) {
      st_.phase = Phase::ones;
      st_.pos = 0;
      st_.level = 0;
    }
  } else {
    auto out = one_step(st_.diam);
    if (auto* err = std::get_if<StepError>(&out)) return StepFailure{*err, step_};
    auto& ok = std::get<RuleOutcome>(out);
    ev.rule = ok.rule;
    st_.diam = ok.diam_after;
    ++st_.pos;
    if (st_.pos == to_long(sched_.M(st_.block))) {
      ++st_.block;
      st_.phase = Phase::zeros;
      st_.pos = 0;
      st_.level = to_long(sched_.m(st_.block));
    }
  }
  ev.diam_after = st_.diam;
  ++step_;
  return ev;
}

Propagation propagate(const Schedule& sched, const Rat& d0, long steps, std::size_t trace_cap) {
  if (steps < 0) throw std::invalid_argument("propagate: steps must be >= 0");
  Propagation out;
  Simulator sim(sched, d0);
  for (long n = 0; n < steps; ++n) {
    bool checkpoint = sim.at_special_checkpoint();
    auto res = sim.step();
    if (auto* fail = std::get_if<StepFailure>(&res)) {
      out.failure = *fail;
      break;
    }
    auto& ev = std::get<TraceEvent>(res);
    if (out.trace.size() < trace_cap || checkpoint) out.trace.push_back(ev);
  }
  out.final_state = sim.state();
  out.steps_done = sim.steps_done();
  return out;
}

std::string trace_csv(const Propagation& prop) {
  std::ostringstream os;
  os << "step,rule,diam,block_index,phase,level\n";
  for (const auto& ev : prop.trace)
    os << ev.step << ',' << name(ev.rule) << ',' << rat_str(ev.diam_after) << ',' << ev.block
       << ',' << name(ev.phase) << ',' << ev.level << '\n';
  return os.str();
}

VerifyReport verify_diameter_theorem(const Schedule& sched, std::size_t s_max,
                                     const std::optional<Rat>& d0) {
  if (s_max < 1) throw std::invalid_argument("verify_diameter_theorem: s_max must be >= 1");
  VerifyReport rep;
  rep.t = sched.t();
  rep.d0 = d0.value_or(rep.t);

  const long target_block = sched.special_block(s_max);
  const long target_steps = to_long(sched.N(target_block));

  // Closed-form value at N_i.  At a special block this is r_s + tail(s); in
  // between it is r_s plus the partial delta sum plus the full tau tail.
  std::vector<Rat> delta_prefix;  // running sum of delta over k < i
  delta_prefix.reserve(static_cast<std::size_t>(target_block) + 1);
  delta_prefix.push_back(Rat(0));
  for (long k = 0; k < target_block; ++k) delta_prefix.push_back(delta_prefix.back() + sched.delta(k));

  auto expected_at = [&](long i) -> Rat {
    std::size_t s;
    if (sched.is_special(i, &s)) return sched.r_exponent(s) + sched.tail_sum(s);
    std::size_t sl = sched.s_of_k(i - 1);
    Rat deltas = delta_prefix[static_cast<std::size_t>(i)] -
                 delta_prefix[static_cast<std::size_t>(sched.special_block(sl))];
    return sched.r_exponent(sl) + deltas + sched.tail_sum0(sl);
  };

  Simulator sim(sched, rep.d0);
  rep.all_pass = true;

  // Checkpoint 0 is the initial ball itself.
  rep.checkpoints.push_back(Checkpoint{0, Int(0), 0, true, rep.t, rep.d0, rep.d0 == rep.t});

  long next_i = 1;
  while (sim.steps_done() < target_steps) {
    auto res = sim.step();
    if (auto* fail = std::get_if<StepFailure>(&res)) {
      rep.failure = *fail;
      rep.all_pass = false;
      break;
    }
    auto& ev = std::get<TraceEvent>(res);
    if (ev.rule == Rule::wild) rep.wild_steps.push_back(ev.step);
    if (sim.steps_done() == to_long(sched.N(next_i))) {
      Rat want = expected_at(next_i);
      std::size_t s;
      bool special = sched.is_special(next_i, &s);
      rep.checkpoints.push_back(Checkpoint{next_i, sched.N(next_i), special ? s : sched.s_of_k(next_i - 1),
                                           special, want, sim.state().diam, sim.state().diam == want});
      ++next_i;
    }
  }

  for (std::size_t s = 0; sched.special_block(s) < target_block; ++s)
    rep.expected_wild_steps.push_back(to_long(sched.N(sched.special_block(s))));
  rep.wild_locus_ok = rep.wild_steps == rep.expected_wild_steps;

  for (const auto& cp : rep.checkpoints) rep.all_pass = rep.all_pass && cp.pass;
  rep.all_pass = rep.all_pass && rep.wild_locus_ok && !rep.failure;
  return rep;
}

Certificate certify_component(const Schedule& sched, const Rat& t_prime, long budget) {
  Certificate cert;
  cert.t = sched.t();
  cert.t_prime = t_prime;
  cert.budget = budget;
  if (t_prime < cert.t) throw std::invalid_argument("certify_component: t' must be >= t");
  if (budget < 0) throw std::invalid_argument("certify_component: budget must be >= 0");

  Simulator base(sched, cert.t);
  Simulator primed(sched, t_prime);
  bool rules_matched = true;

  while (base.steps_done() < budget) {
    if (base.at_special_checkpoint()) {
      cert.differences.push_back(primed.state().diam - base.state().diam);
      if (rules_matched) cert.matched_checkpoints = cert.differences.size();
    }
    auto res_p = primed.step();
    if (auto* fail = std::get_if<StepFailure>(&res_p)) {
      if (fail->kind == StepError::ball_too_large) {
        cert.escaped = true;
        cert.escape_step = fail->step;
        return cert;
      }
      throw std::runtime_error("certify_component: primed trace hit the excluded boundary at step " +
                               std::to_string(fail->step));
    }
    auto res_b = base.step();
    if (std::holds_alternative<StepFailure>(res_b))
      throw std::logic_error("certify_component: base trace violated a step precondition");
    if (std::get<TraceEvent>(res_b).rule != std::get<TraceEvent>(res_p).rule) rules_matched = false;
  }
  return cert;
}

}  // namespace wander::ball
