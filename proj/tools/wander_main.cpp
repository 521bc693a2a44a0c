// wander: exact verification CLI for wandering-ball diameters of
// P_a(z) = a z^p + (1-a) z^{p+1} over ultrametric fields.
//
// Exit codes: 0 all checks pass, 1 a mathematical check failed, 2 usage or
// configuration error.  All rationals cross this boundary as "num/den"
// strings; every report echoes the resolved configuration that produced it.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <string>

#include "wander/ball.hpp"
#include "wander/cantor.hpp"
#include "wander/field.hpp"
#include "wander/scale.hpp"

using json = nlohmann::ordered_json;
using namespace wander;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    if (text.empty() || text.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream f(out_path);
  if (!f) throw std::runtime_error("cannot open output file: " + out_path);
  f << text;
  if (text.empty() || text.back() != '\n') f << '\n';
}

json checkpoint_json(const ball::Checkpoint& cp) {
  return json{{"block", cp.i},
              {"step", cp.step.get_str()},
              {"s", cp.s},
              {"special", cp.special},
              {"expected", rat_str(cp.expected)},
              {"actual", rat_str(cp.actual)},
              {"pass", cp.pass}};
}

json trace_json(const ball::Propagation& prop) {
  json events = json::array();
  for (const auto& ev : prop.trace)
    events.push_back(json{{"step", ev.step},
                          {"rule", ball::name(ev.rule)},
                          {"diam", rat_str(ev.diam_after)},
                          {"block_index", ev.block},
                          {"phase", ball::name(ev.phase)},
                          {"level", ev.level}});
  return events;
}

json fieldlab_json(const field::LemmaReport& rep) {
  json failures = json::array();
  for (const auto& f : rep.failures)
    failures.push_back(json{{"trial", f.trial},
                            {"expected_v", f.expected_v},
                            {"actual_v", f.actual_v},
                            {"lhs", f.lhs},
                            {"rhs", f.rhs}});
  return json{{"config",
               {{"p", rep.config.p},
                {"e", rep.config.e},
                {"precision", rep.config.effective_prec()},
                {"v_a", rat_str(rep.config.v_a)},
                {"seed", rep.config.seed}}},
              {"check", rep.check},
              {"trials", rep.trials},
              {"passes", rep.passes},
              {"failures", failures},
              {"digest", rep.digest},
              {"wall_ms", rep.wall_ms}};
}

struct CommonOpts {
  unsigned long p = 2;
  std::string ells = "id";
  std::string format = "json";
  std::string out;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact wandering-ball diameter toolkit"};
  app.require_subcommand(1);

  CommonOpts opt;
  long s_max = 4;
  long steps = 0;
  std::string tprime, beta_text = ";tail=0", tau_text, d0_text;
  unsigned e = 1;
  long m_size = 1;
  int item = 3;
  long trials = 100;
  uint64_t seed = 0;
  std::string va_text = "-1";
  long prec = 0;

  auto* c_const = app.add_subcommand("constants", "exact family constants for a prime p");
  c_const->add_option("--p", opt.p, "prime p")->required();
  c_const->add_option("--format", opt.format)->check(CLI::IsMember({"json"}));
  c_const->add_option("--out", opt.out);

  auto* c_verify = app.add_subcommand("verify", "replay the orbit and check every closed form");
  c_verify->add_option("--p", opt.p)->required();
  c_verify->add_option("--ells", opt.ells, "index sequence: id or prefix=..;cycle=..");
  c_verify->add_option("--s-max", s_max, "verify through the s-max-th wild passage");
  c_verify->add_option("--format", opt.format)->check(CLI::IsMember({"json"}));
  c_verify->add_option("--out", opt.out);

  auto* c_trace = app.add_subcommand("trace", "emit the step-by-step diameter trace");
  c_trace->add_option("--p", opt.p)->required();
  c_trace->add_option("--ells", opt.ells);
  c_trace->add_option("--steps", steps)->required();
  c_trace->add_option("--d0", d0_text, "starting diameter exponent (default: t)");
  c_trace->add_option("--format", opt.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  c_trace->add_option("--out", opt.out);

  auto* c_cert = app.add_subcommand("certify", "drive a strictly larger ball until it escapes");
  c_cert->add_option("--p", opt.p)->required();
  c_cert->add_option("--ells", opt.ells);
  c_cert->add_option("--tprime", tprime, "diameter exponent t' >= t")->required();
  c_cert->add_option("--steps", steps, "step budget")->required();
  c_cert->add_option("--format", opt.format)->check(CLI::IsMember({"json"}));
  c_cert->add_option("--out", opt.out);

  auto* c_cantor = app.add_subcommand("cantor", "affine parametrization of attainable diameters");
  auto* c_ident = c_cantor->add_subcommand("identity", "check the affine identity for one beta");
  c_ident->add_option("--p", opt.p)->required();
  c_ident->add_option("--beta", beta_text, "bit sequence, e.g. 101;tail=0")->required();
  c_ident->add_option("--format", opt.format)->check(CLI::IsMember({"json"}));
  c_ident->add_option("--out", opt.out);

  auto* c_dec = app.add_subcommand("decompose", "base-B digit decomposition of tau");
  c_dec->add_option("--p", opt.p)->required();
  c_dec->add_option("--tau", tau_text, "rational in [0,1) with p-power denominator")->required();
  c_dec->add_option("--format", opt.format)->check(CLI::IsMember({"json"}));
  c_dec->add_option("--out", opt.out);

  auto* c_lab = app.add_subcommand("fieldlab", "randomized checks in a ramified extension");
  CLI::App* labs[3];
  labs[0] = c_lab->add_subcommand("lemma32", "one-step contraction/expansion rules");
  labs[1] = c_lab->add_subcommand("lemma42", "M-step parameter perturbation from B(1)");
  labs[2] = c_lab->add_subcommand("lemma43", "m-step parameter perturbation from |x| = rho_m");
  for (auto* lab : labs) {
    lab->add_option("--p", opt.p)->required();
    lab->add_option("--e", e, "ramification index");
    lab->add_option("--m", m_size, "level m (resp. step count M)");
    lab->add_option("--trials", trials);
    lab->add_option("--seed", seed)->required();
    lab->add_option("--va", va_text, "valuation of a (default -1)");
    lab->add_option("--prec", prec, "pi-adic precision (default 64e)");
    lab->add_option("--format", opt.format)->check(CLI::IsMember({"json"}));
    lab->add_option("--out", opt.out);
  }
  labs[0]->add_option("--item", item, "lemma item 1, 2 or 3")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    if (err.get_exit_code() == 0) return app.exit(err);
    app.exit(err);
    return kExitUsage;
  }

  try {
    if (*c_const) {
      PrimeParams pp = PrimeParams::for_prime(opt.p);
      auto cc = cantor::cantor_constants(pp);
      auto chain = cantor::inequality_chain(pp);
      json jchain = json::array();
      bool chain_ok = true;
      for (const auto& entry : chain) {
        chain_ok = chain_ok && entry.pass;
        jchain.push_back(json{{"what", entry.what}, {"lhs", entry.lhs}, {"rhs", entry.rhs}, {"pass", entry.pass}});
      }
      json out{{"config", {{"subcommand", "constants"}, {"p", opt.p}}},
               {"q", pp.q},
               {"kappa", rat_str(pp.kappa)},
               {"P", cc.P.get_str()},
               {"Q", cc.Q.get_str()},
               {"E", rat_str(cc.E)},
               {"F", rat_str(cc.F)},
               {"R", rat_str(cc.R)},
               {"Rprime", rat_str(cc.Rprime)},
               {"chain", jchain},
               {"all_pass", chain_ok}};
      emit(out.dump(2), opt.out);
      return chain_ok ? kExitPass : kExitCheckFailed;
    }

    if (*c_verify) {
      if (s_max < 1) throw CLI::ValidationError("--s-max must be >= 1");
      PrimeParams pp = PrimeParams::for_prime(opt.p);
      Schedule sched(pp, EllSpec::parse(opt.ells));
      auto rep = ball::verify_diameter_theorem(sched, static_cast<std::size_t>(s_max));
      json cps = json::array();
      for (const auto& cp : rep.checkpoints) cps.push_back(checkpoint_json(cp));
      json out{{"config", {{"subcommand", "verify"}, {"p", opt.p}, {"ells", sched.ells().str()}, {"s_max", s_max}}},
               {"t", rat_str(rep.t)},
               {"d0", rat_str(rep.d0)},
               {"checkpoints", cps},
               {"wild_steps", rep.wild_steps},
               {"expected_wild_steps", rep.expected_wild_steps},
               {"wild_locus_ok", rep.wild_locus_ok},
               {"all_pass", rep.all_pass}};
      if (rep.failure)
        out["failure"] = {{"kind", ball::name(rep.failure->kind)}, {"step", rep.failure->step}};
      emit(out.dump(2), opt.out);
      return rep.all_pass ? kExitPass : kExitCheckFailed;
    }

    if (*c_trace) {
      if (steps < 0) throw CLI::ValidationError("--steps must be >= 0");
      PrimeParams pp = PrimeParams::for_prime(opt.p);
      Schedule sched(pp, EllSpec::parse(opt.ells));
      Rat d0 = d0_text.empty() ? sched.t() : parse_rat(d0_text);
      auto prop = ball::propagate(sched, d0, steps);
      if (opt.format == "csv") {
        emit(ball::trace_csv(prop), opt.out);
      } else {
        json out{{"config",
                  {{"subcommand", "trace"},
                   {"p", opt.p},
                   {"ells", sched.ells().str()},
                   {"steps", steps},
                   {"d0", rat_str(d0)}}},
                 {"events", trace_json(prop)},
                 {"final_diam", rat_str(prop.final_state.diam)},
                 {"steps_done", prop.steps_done}};
        if (prop.failure)
          out["failure"] = {{"kind", ball::name(prop.failure->kind)}, {"step", prop.failure->step}};
        emit(out.dump(2), opt.out);
      }
      return prop.failure ? kExitCheckFailed : kExitPass;
    }

    if (*c_cert) {
      PrimeParams pp = PrimeParams::for_prime(opt.p);
      Schedule sched(pp, EllSpec::parse(opt.ells));
      auto cert = ball::certify_component(sched, parse_rat(tprime), steps);
      json diffs = json::array();
      for (const auto& d : cert.differences) diffs.push_back(rat_str(d));
      json out{{"config",
                {{"subcommand", "certify"},
                 {"p", opt.p},
                 {"ells", sched.ells().str()},
                 {"tprime", rat_str(cert.t_prime)},
                 {"budget", cert.budget}}},
               {"t", rat_str(cert.t)},
               {"verdict", cert.escaped ? "escapes" : "inconclusive"},
               {"escape_step", cert.escaped ? json(cert.escape_step) : json(nullptr)},
               {"differences", diffs},
               {"matched_checkpoints", cert.matched_checkpoints}};
      emit(out.dump(2), opt.out);
      return kExitPass;
    }

    if (*c_ident) {
      PrimeParams pp = PrimeParams::for_prime(opt.p);
      auto rep = cantor::verify_affine_identity(pp, cantor::BetaSeq::parse(beta_text));
      json out{{"config", {{"subcommand", "cantor identity"}, {"p", opt.p}, {"beta", rep.beta}}},
               {"affine", rat_str(rep.affine)},
               {"ef_form", rat_str(rep.ef_form)},
               {"series", rat_str(rep.series)},
               {"pass", rep.pass}};
      emit(out.dump(2), opt.out);
      return rep.pass ? kExitPass : kExitCheckFailed;
    }

    if (*c_dec) {
      PrimeParams pp = PrimeParams::for_prime(opt.p);
      auto dec = cantor::digit_decompose(parse_rat(tau_text), pp);
      json digits = json::array(), counts = json::array();
      for (const auto& d : dec.digits) digits.push_back(d.get_str());
      for (const auto& c : dec.counts) counts.push_back(c.get_str());
      json out{{"config", {{"subcommand", "decompose"}, {"p", opt.p}, {"tau", rat_str(dec.tau)}}},
               {"base", dec.base.get_str()},
               {"digits", digits},
               {"per_digit_counts", counts},
               {"reconstructed", rat_str(dec.reconstructed)},
               {"pass", dec.pass}};
      emit(out.dump(2), opt.out);
      return dec.pass ? kExitPass : kExitCheckFailed;
    }

    if (*labs[0] || *labs[1] || *labs[2]) {
      field::LabConfig cfg;
      cfg.p = opt.p;
      cfg.e = e;
      cfg.prec = prec;
      cfg.v_a = parse_rat(va_text);
      cfg.seed = seed;
      field::LemmaReport rep;
      if (*labs[0])
        rep = field::check_contraction_lemma(cfg, item, m_size, trials);
      else
        rep = field::check_perturbation_lemmas(cfg, *labs[1] ? 42 : 43, m_size, trials);
      emit(fieldlab_json(rep).dump(2), opt.out);
      return rep.all_pass() ? kExitPass : kExitCheckFailed;
    }
  } catch (const CLI::ValidationError& err) {
    std::cerr << err.what() << "\n";
    return kExitUsage;
  } catch (const field::grid_error& err) {
    std::cerr << "configuration error: " << err.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& err) {
    std::cerr << "usage error: " << err.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitCheckFailed;
  }
  return kExitUsage;
}
