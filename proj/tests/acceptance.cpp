// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "test_support.hpp"

using namespace qfdiv;
using namespace qfdiv::test;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;
};

class Checker {
 public:
  void expect(bool cond, const std::string& what) {
    if (!cond) {
      out_.ok = false;
      if (!out_.detail.empty()) out_.detail += "; ";
      out_.detail += what;
    }
  }
  void near(double got, double want, double tol, const std::string& what) {
    std::ostringstream s;
    s << what << " got " << format_number(got) << " want " << format_number(want) << " tol " << tol;
    expect(std::abs(got - want) <= tol, s.str());
  }
  void report(const PropertyReport& r) {
    std::ostringstream s;
    s << r.property_id << ": violations " << r.violations << "/" << r.trials << ", worst margin "
      << format_number(r.worst_margin) << (r.error.empty() ? "" : ", error " + r.error);
    expect(r.passed(), s.str());
    summary_ += (summary_.empty() ? "" : ", ") + r.property_id + " " + std::to_string(r.trials) + " checks";
  }
  void note(const std::string& s) { summary_ += (summary_.empty() ? "" : ", ") + s; }
  Outcome take() {
    if (out_.ok) out_.detail = summary_;
    return out_;
  }

 private:
  Outcome out_;
  std::string summary_;
};

int failures = 0;

void criterion(int id, const std::string& name, double budget_s, const std::function<void(Checker&)>& body) {
  Checker c;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(c);
  } catch (const std::exception& e) {
    c.expect(false, std::string("exception: ") + e.what());
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::ostringstream budget;
  budget << "runtime " << secs << " s exceeds " << budget_s << " s";
  c.expect(secs < budget_s, budget.str());
  const auto o = c.take();
  if (!o.ok) ++failures;
  std::printf("%s criterion %d: %s [%.2f s] %s\n", o.ok ? "PASS" : "FAIL", id, name.c_str(), secs, o.detail.c_str());
  std::fflush(stdout);
}

PropertyReport property(const std::string& id, std::uint64_t seed) {
  PropertyConfig cfg;
  cfg.seed = derive_seed(seed, id);
  return run_property(id, cfg);
}

}  // namespace

int main() {
  constexpr std::uint64_t kSeed = 20261016;

  criterion(1, "golden values", 1.0, [](Checker& c) {
    const auto bell = bell_state();
    c.near(conditional_tsallis(bell, 2.0), -1.0, 1e-9, "Bell H_2 closed");
    c.near(conditional_entropy_optimize(bell, make_tsallis_f(2.0), {}).value, -1.0, 1e-9, "Bell H_2 optimizer");
    c.near(conditional_entropy_vn_closed(bell), -0.693147180560, 1e-8, "Bell H_1 closed");
    c.near(conditional_entropy_optimize(bell, make_kl_f(), {}).value, -0.693147180560, 1e-8, "Bell H_1 optimizer");
    const BipartiteState product(kron(0.5 * identity(2), random_density(2, 2, 7)), {2, 2});
    c.near(conditional_tsallis(product, 2.0), 0.5, 1e-8, "product H_2 closed");
    c.near(conditional_entropy_optimize(product, make_tsallis_f(2.0), {}).value, 0.5, 1e-8, "product H_2 optimizer");
    const std::vector<double> p{0.5, 0.5};
    const std::vector<double> q{0.25, 0.75};
    c.near(csiszar_divergence(p, q, make_kl_f()).value(), 0.143841, 1e-6, "classical KL");
    c.note("Bell H_2, Bell H_1, product H_2, classical KL");
  });

  criterion(2, "divergence monotonicity under channels", 60.0,
            [&](Checker& c) { c.report(property("dpi", kSeed)); });

  criterion(3, "support restriction and extension independence", 60.0, [&](Checker& c) {
    Rng rng(derive_seed(kSeed, "criterion-3"));
    double worst_support = 0.0;
    double worst_delta = 0.0;
    const std::vector<DivergenceFunction> fs{make_tsallis_f(0.5), make_kl_f(), make_tsallis_f(2.0),
                                             make_harmonic_f(1.0)};
    for (int t = 0; t < 50; ++t) {
      const Index da = rng.uniform_int(2, 3);
      const Index db = rng.uniform_int(2, 3);
      const BipartiteState s(random_density(da * db, rng.uniform_int(1, da * db), rng), {da, db});
      const auto& f = fs[static_cast<std::size_t>(t) % fs.size()];
      OptimizerOptions opts;
      opts.seed = rng();
      const auto base = conditional_entropy_optimize(s, f, opts);
      const Operator pb = support_projector(s.reduced_b());
      worst_support = std::max(worst_support, max_abs(pb * base.sigma_star * pb - base.sigma_star));
      for (Index k : {1, 2, 4}) {
        const auto ext = conditional_entropy_optimize(embed_ancilla(s, k), f, opts);
        worst_delta = std::max(worst_delta, std::abs(ext.value - base.value));
        const Operator pbk = support_projector(embed_ancilla(s, k).reduced_b());
        worst_support = std::max(worst_support, max_abs(pbk * ext.sigma_star * pbk - ext.sigma_star));
      }
    }
    c.expect(worst_support <= 1e-8, "support residual " + format_number(worst_support));
    c.expect(worst_delta <= 1e-7, "padding delta " + format_number(worst_delta));
    c.note("50 states, max support residual " + format_number(worst_support, 3) + ", max padding delta " +
           format_number(worst_delta, 3));
  });

  criterion(4, "dimension bounds", 60.0, [&](Checker& c) {
    const auto r = property("thm2-bounds", kSeed);
    c.report(r);
    c.expect(r.trials >= 200, "fewer than 200 states");
    const auto b = thm2_bounds(bell_state(), make_kl_f());
    c.near(conditional_entropy_vn_closed(bell_state()), b.lower, 1e-8, "Bell lower-bound saturation");
  });

  criterion(5, "conditional monotonicity under channels and tracing", 60.0, [&](Checker& c) {
    c.report(property("conditional-dpi", kSeed));
    c.report(property("conditioning-reduces", kSeed));
  });

  criterion(6, "chain rule", 60.0, [&](Checker& c) { c.report(property("chain-rule", kSeed)); });

  criterion(7, "classical-register states", 120.0, [&](Checker& c) {
    c.report(property("mixture-lower", kSeed));
    c.report(property("mixture-exact", kSeed));
  });

  criterion(8, "cross-validation", 60.0, [&](Checker& c) {
    Rng rng(derive_seed(kSeed, "criterion-8"));
    double worst_sweep = 0.0;
    for (int t = 0; t < 50; ++t) {
      const Index d = rng.uniform_int(2, 4);
      const auto f = make_tsallis_f(std::vector<double>{0.5, 1.0, 1.5, 2.0}[t % 4]);
      const Operator a = random_density(d, d, rng);
      const Operator b = random_density(d, d, rng);
      const double sweep = quantum_f_divergence_eps_sweep(a, b, f).extrapolated.value();
      worst_sweep = std::max(worst_sweep, std::abs(sweep - quantum_f_divergence(a, b, f).value()));
    }
    c.expect(worst_sweep <= 1e-4, "eps sweep deviation " + format_number(worst_sweep));
    double worst_closed = 0.0;
    for (int t = 0; t < 200; ++t) {
      const Index d = rng.uniform_int(2, 4);
      const double alpha = std::vector<double>{0.3, 0.5, 1.5, 2.0}[t % 4];
      const Operator a = random_density(d, d, rng);
      const Operator b = random_density(d, d, rng);
      worst_closed = std::max(worst_closed, std::abs(tsallis_divergence_closed(a, b, alpha).value() -
                                                     quantum_f_divergence(a, b, make_tsallis_f(alpha)).value()));
    }
    c.expect(worst_closed <= 1e-9, "closed vs spectral " + format_number(worst_closed));
    c.note("eps sweep max dev " + format_number(worst_sweep, 3) + ", closed vs spectral max dev " +
           format_number(worst_closed, 3));
    c.report(property("alpha-continuity", kSeed));
  });

  criterion(9, "full suite via the command line", 300.0, [](Checker& c) {
    const std::string out = "acceptance_suite_report.json";
    const std::string cmd = std::string(QFDIV_CLI_PATH) + " suite --seed 42 --out " + out + " 2>/dev/null";
    const int status = std::system(cmd.c_str());
    c.expect(WEXITSTATUS(status) == 0, "exit code " + std::to_string(WEXITSTATUS(status)));
    std::ifstream in(out);
    const auto j = nlohmann::json::parse(in);
    c.expect(j.size() == 15, "report has " + std::to_string(j.size()) + " entries");
    for (const auto& e : j) c.expect(e["passed"].get<bool>(), e["property_id"].get<std::string>() + " failed");
    c.note("exit 0, " + std::to_string(j.size()) + " reports");
  });

  return failures == 0 ? 0 : 1;
}
