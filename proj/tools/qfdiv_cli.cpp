// qfdiv: command-line front end for the divergence, conditional-entropy and
// property-suite routines. Exit codes: 0 success, 1 domain or usage error,
// 2 suite failure.

#include <CLI11.hpp>

#include <cstdint>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "qfdiv/qfdiv.hpp"

namespace {

using qfdiv::format_number;

qfdiv::DivergenceFunction family_function(const std::string& family, double alpha) {
  if (family == "kl") return qfdiv::make_kl_f();
  if (family == "tsallis") return qfdiv::make_tsallis_f(alpha);
  if (family == "custom") return qfdiv::make_harmonic_f(alpha);
  throw qfdiv::DomainError("unknown family '" + family + "'");
}

struct DivergenceArgs {
  std::string a, b, family = "tsallis";
  double alpha = 1.0;
  bool eps_sweep = false;
};

int run_divergence(const DivergenceArgs& args) {
  const auto a = qfdiv::read_density_file(args.a);
  const auto b = qfdiv::read_density_file(args.b);
  const auto f = family_function(args.family, args.alpha);
  if (!args.eps_sweep) {
    std::cout << qfdiv::quantum_f_divergence(a, b, f) << '\n';
    return 0;
  }
  const auto sweep = qfdiv::quantum_f_divergence_eps_sweep(a, b, f);
  for (std::size_t i = 0; i < sweep.eps.size(); ++i) {
    std::cout << "eps " << format_number(sweep.eps[i]) << ' ' << format_number(sweep.values[i]) << '\n';
  }
  std::cout << sweep.extrapolated << '\n';
  return 0;
}

struct CondentArgs {
  std::string state, family = "tsallis", method = "optimize";
  double alpha = 1.0;
  qfdiv::OptimizerOptions opts;
};

int run_condent(const CondentArgs& args) {
  const auto s = qfdiv::read_state_file(args.state);
  if (args.method == "closed") {
    double value = 0.0;
    if (args.family == "kl") {
      value = qfdiv::conditional_entropy_vn_closed(s);
    } else if (args.family == "tsallis") {
      value = qfdiv::conditional_tsallis(s, args.alpha);
    } else {
      throw qfdiv::DomainError("--method closed is available for the tsallis and kl families only");
    }
    std::cout << format_number(value) << '\n';
    return 0;
  }
  const auto report = qfdiv::conditional_entropy_optimize(s, family_function(args.family, args.alpha), args.opts);
  std::cout << format_number(report.value) << '\n';
  if (!report.converged) std::cerr << "warning: optimizer starts disagree beyond value_tol\n";
  return 0;
}

int run_bounds(const std::string& path, double alpha) {
  const auto s = qfdiv::read_state_file(path);
  const auto f = qfdiv::make_tsallis_f(alpha);
  const auto b = qfdiv::thm2_bounds(s, f);
  std::cout << "lower " << format_number(b.lower) << '\n'
            << "value " << format_number(qfdiv::conditional_tsallis(s, alpha)) << '\n'
            << "upper " << format_number(b.upper) << '\n';
  return 0;
}

int run_suite(const std::vector<std::string>& filter, std::uint64_t seed, const std::string& out) {
  qfdiv::SuiteConfig cfg;
  cfg.master_seed = seed;
  if (!filter.empty()) {
    const auto known = qfdiv::property_ids();
    for (const auto& id : filter) {
      if (std::find(known.begin(), known.end(), id) == known.end()) {
        throw qfdiv::DomainError("unknown property id '" + id + "'");
      }
    }
    cfg.filter = filter;
  }
  const auto reports = qfdiv::run_suite(cfg);
  const auto text = qfdiv::to_json(reports).dump(2);
  if (out.empty()) {
    std::cout << text << '\n';
  } else {
    std::ofstream f(out);
    if (!f) throw qfdiv::DomainError(out + ": cannot write file");
    f << text << '\n';
  }
  for (const auto& r : reports) {
    std::cerr << (r.passed() ? "PASS " : "FAIL ") << r.property_id << " trials=" << r.trials
              << " violations=" << r.violations << " worst_margin=" << format_number(r.worst_margin)
              << " ms=" << r.elapsed_ms << (r.error.empty() ? "" : " error=" + r.error) << '\n';
  }
  return qfdiv::suite_passed(reports) ? 0 : 2;
}

struct RandomArgs {
  std::string kind;
  std::vector<qfdiv::Index> dims;
  std::uint64_t seed = 0;
  std::string out;
  std::optional<qfdiv::Index> rank;
  std::vector<double> coeffs;
};

int run_random(const RandomArgs& args) {
  qfdiv::Rng rng(args.seed);
  if (args.kind == "state") {
    if (args.dims.empty()) throw qfdiv::DomainError("random state: --dims needs at least one dimension");
    qfdiv::Index d = 1;
    for (auto x : args.dims) d *= x;
    const auto rho = qfdiv::random_density(d, args.rank.value_or(d), rng);
    qfdiv::write_matrix_file(args.out, rho, args.dims.size() >= 2 ? args.dims : std::vector<qfdiv::Index>{});
  } else if (args.kind == "channel") {
    if (args.dims.size() < 2 || args.dims.size() > 3) {
      throw qfdiv::DomainError("random channel: --dims takes d_in d_out [env]");
    }
    const auto env = args.dims.size() == 3 ? args.dims[2] : args.dims[0] * args.dims[1];
    qfdiv::write_channel_file(args.out, qfdiv::random_channel(args.dims[0], args.dims[1], env, rng()));
  } else {
    if (args.dims.size() != 2) throw qfdiv::DomainError("random pure: --dims takes d_A d_B");
    std::vector<double> coeffs = args.coeffs;
    if (coeffs.empty()) {
      const auto k = std::min(args.dims[0], args.dims[1]);
      double n2 = 0.0;
      for (qfdiv::Index i = 0; i < k; ++i) {
        coeffs.push_back(0.05 + rng.uniform());
        n2 += coeffs.back() * coeffs.back();
      }
      for (auto& c : coeffs) c /= std::sqrt(n2);
    }
    const auto s = qfdiv::pure_bipartite_from_schmidt(coeffs, args.dims[0], args.dims[1], rng);
    qfdiv::write_matrix_file(args.out, s.rho(), s.dims());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum f-divergences and conditional entropies"};
  app.require_subcommand(1);

  DivergenceArgs div;
  auto* div_cmd = app.add_subcommand("divergence", "D_f(A||B) for two operators");
  div_cmd->add_option("--a", div.a, "Matrix file for A")->required();
  div_cmd->add_option("--b", div.b, "Matrix file for B")->required();
  div_cmd->add_option("--family", div.family)->check(CLI::IsMember({"tsallis", "kl"}));
  div_cmd->add_option("--alpha", div.alpha);
  div_cmd->add_flag("--eps-sweep", div.eps_sweep, "Also evaluate D_f(A||B + eps 1) and extrapolate");

  CondentArgs ce;
  auto* ce_cmd = app.add_subcommand("condent", "Conditional entropy H_f(A|B)");
  ce_cmd->add_option("--state", ce.state, "State file with \"dims\"")->required();
  ce_cmd->add_option("--family", ce.family)->check(CLI::IsMember({"tsallis", "kl", "custom"}));
  ce_cmd->add_option("--alpha", ce.alpha, "Tsallis order, or the custom family's parameter");
  ce_cmd->add_option("--method", ce.method)->check(CLI::IsMember({"optimize", "closed"}));
  ce_cmd->add_option("--starts", ce.opts.starts);
  ce_cmd->add_option("--seed", ce.opts.seed);
  ce_cmd->add_option("--value-tol", ce.opts.value_tol);
  ce_cmd->add_option("--max-iters", ce.opts.max_iters);
  ce_cmd->add_option("--fd-step", ce.opts.fd_step);

  std::string bounds_state;
  double bounds_alpha = 1.0;
  auto* bounds_cmd = app.add_subcommand("bounds", "Dimension bounds on the conditional Tsallis entropy");
  bounds_cmd->add_option("--state", bounds_state)->required();
  bounds_cmd->add_option("--alpha", bounds_alpha);

  std::vector<std::string> suite_filter;
  std::uint64_t suite_seed = 0;
  std::string suite_out;
  auto* suite_cmd = app.add_subcommand("suite", "Run the property suite");
  suite_cmd->add_option("--filter", suite_filter, "Property ids to run (repeatable)");
  suite_cmd->add_option("--seed", suite_seed);
  suite_cmd->add_option("--out", suite_out, "Write the JSON report here instead of stdout");

  RandomArgs rnd;
  auto* rnd_cmd = app.add_subcommand("random", "Write a seeded random state, channel or pure state");
  rnd_cmd->add_option("kind", rnd.kind)->required()->check(CLI::IsMember({"state", "channel", "pure"}));
  rnd_cmd->add_option("--dims", rnd.dims)->required();
  rnd_cmd->add_option("--seed", rnd.seed);
  rnd_cmd->add_option("--out", rnd.out)->required();
  rnd_cmd->add_option("--rank", rnd.rank);
  rnd_cmd->add_option("--coeffs", rnd.coeffs, "Schmidt coefficients for 'pure'");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help();
    return 1;
  }

  try {
    if (*div_cmd) return run_divergence(div);
    if (*ce_cmd) return run_condent(ce);
    if (*bounds_cmd) return run_bounds(bounds_state, bounds_alpha);
    if (*suite_cmd) return run_suite(suite_filter, suite_seed, suite_out);
    if (*rnd_cmd) return run_random(rnd);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
