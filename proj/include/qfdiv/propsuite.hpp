#ifndef QFDIV_PROPSUITE_HPP
#define QFDIV_PROPSUITE_HPP

// Seeded property ensembles for the divergence and conditional-entropy
// inequalities. Each property records a signed margin per check:
// RHS - LHS for "LHS <= RHS" statements, -|residual| for identities. A check
// violates when its margin is below -tolerance.

#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "qfdiv/bipartite.hpp"
#include "qfdiv/channels.hpp"
#include "qfdiv/condent.hpp"
#include "qfdiv/errors.hpp"
#include "qfdiv/fdiv.hpp"
#include "qfdiv/linalg.hpp"
#include "qfdiv/random.hpp"

namespace qfdiv {

struct PropertyConfig {
  std::optional<int> trials;          // per alpha where the property sweeps alphas
  std::optional<Index> max_dim;       // cap on each local dimension
  std::optional<std::vector<double>> alphas;
  std::uint64_t seed = 0;
  std::optional<double> tolerance;
};

struct PropertyReport {
  std::string property_id;
  std::string statement;
  int trials = 0;
  int violations = 0;
  double worst_margin = std::numeric_limits<double>::infinity();
  double tolerance = 0.0;
  std::uint64_t seed = 0;
  long long elapsed_ms = 0;
  std::string error;

  bool passed() const { return error.empty() && violations == 0; }
};

namespace detail {

struct Resolved {
  int trials;
  Index max_dim;
  std::vector<double> alphas;
  double tolerance;
};

class MarginLog {
 public:
  explicit MarginLog(PropertyReport& r) : report_(r) {}

  void record(double margin) {
    ++report_.trials;
    if (std::isnan(margin) || margin < -report_.tolerance) ++report_.violations;
    if (std::isnan(margin)) {
      report_.worst_margin = -std::numeric_limits<double>::infinity();
    } else {
      report_.worst_margin = std::min(report_.worst_margin, margin);
    }
  }

  /// RHS - LHS for extended reals; inf <= inf counts as slack +inf.
  void record_leq(ExtendedReal lhs, ExtendedReal rhs) {
    if (rhs.is_infinite()) {
      record(std::numeric_limits<double>::infinity());
    } else if (lhs.is_infinite()) {
      record(-std::numeric_limits<double>::infinity());
    } else {
      record(rhs.value() - lhs.value());
    }
  }

  void record_equal(ExtendedReal a, ExtendedReal b) {
    if (a.is_infinite() && b.is_infinite()) {
      record(0.0);
    } else if (a.is_infinite() || b.is_infinite()) {
      record(-std::numeric_limits<double>::infinity());
    } else {
      record(-std::abs(a.value() - b.value()));
    }
  }

 private:
  PropertyReport& report_;
};

using Runner = std::function<void(const Resolved&, Rng&, MarginLog&)>;

struct PropertySpec {
  std::string id;
  std::string statement;
  int trials;
  Index max_dim;
  std::vector<double> alphas;
  double tolerance;
  Runner run;
};

inline Index draw_dim(Rng& rng, Index lo, Index hi) {
  return static_cast<Index>(rng.uniform_int(lo, std::max(lo, hi)));
}

inline Operator draw_state(Rng& rng, Index d) { return random_density(d, draw_dim(rng, 1, d), rng); }

inline BipartiteState draw_bipartite(Rng& rng, Index d_a, Index d_b) {
  return BipartiteState(draw_state(rng, d_a * d_b), {d_a, d_b});
}

inline std::vector<double> draw_distribution(Rng& rng, std::size_t n) {
  std::vector<double> p(n);
  double s = 0.0;
  for (auto& v : p) {
    v = 0.05 + rng.uniform();
    s += v;
  }
  for (auto& v : p) v /= s;
  return p;
}

/// State supported inside R(sigma).
inline Operator draw_state_inside(Rng& rng, const Operator& sigma) {
  const Operator p = support_projector(sigma);
  const Index d = sigma.rows();
  const Operator g = ginibre(d, draw_dim(rng, 1, d), rng);
  Operator rho = p * g * g.adjoint() * p;
  rho = 0.5 * (rho + rho.adjoint());
  return rho / real_trace(rho);
}

inline OptimizerOptions suite_optimizer(Rng& rng) {
  OptimizerOptions o;
  o.seed = rng();
  return o;
}

inline std::vector<PropertySpec> make_registry() {
  std::vector<PropertySpec> reg;

  reg.push_back({"dpi", "D_f(Phi(rho)||Phi(sigma)) <= D_f(rho||sigma) for channels Phi, f_alpha operator convex",
                 200, 4, {0.3, 0.5, 1.0, 1.5, 2.0}, 1e-8,
                 [](const Resolved& c, Rng& rng, MarginLog& log) {
                   for (double alpha : c.alphas) {
                     const auto f = make_tsallis_f(alpha);
                     for (int t = 0; t < c.trials; ++t) {
                       const Index d_in = draw_dim(rng, 2, c.max_dim);
                       const Index d_out = draw_dim(rng, 2, c.max_dim);
                       Index env = draw_dim(rng, 1, 3);
                       while (d_out * env < d_in) ++env;
                       const Operator rho = draw_state(rng, d_in);
                       const Operator sigma =
                           rng.uniform() < 0.75 ? random_density(d_in, d_in, rng) : draw_state(rng, d_in);
                       const auto phi = random_channel(d_in, d_out, env, rng());
                       log.record_leq(quantum_f_divergence(apply_channel(phi, rho), apply_channel(phi, sigma), f),
                                      quantum_f_divergence(rho, sigma, f));
                     }
                   }
                 }});

  reg.push_back({"thm2-bounds", "-tr f(d_B rho)/d_B <= H_f(rho|B) <= -tr f(rho)", 200, 4, {0.5, 1.0, 1.5, 2.0}, 1e-7,
                 [](const Resolved& c, Rng& rng, MarginLog& log) {
                   for (int t = 0; t < c.trials; ++t) {
                     const double alpha = c.alphas[t % c.alphas.size()];
                     const auto s = draw_bipartite(rng, draw_dim(rng, 2, c.max_dim), draw_dim(rng, 2, c.max_dim));
                     const double h = conditional_tsallis(s, alpha);
                     const auto b = thm2_bounds(s, make_tsallis_f(alpha));
                     log.record(std::min(h - b.lower, b.upper - h));
                   }
                 }});

  reg.push_back({"chain-rule", "H_alpha(rho_ABC|B) <= d_C^(1-alpha) H_alpha(rho_ABC|BC) + ln_alpha(d_C)", 100, 2,
                 {0.5, 1.0, 2.0}, 1e-7,
                 [](const Resolved& c, Rng& rng, MarginLog& log) {
                   const Index d = std::min<Index>(c.max_dim, 3);
                   for (double alpha : c.alphas) {
                     for (int t = 0; t < c.trials; ++t) {
                       const Index dc = d;
                       const BipartiteState abc(draw_state(rng, d * d * dc), {d, d, dc});
                       const double lhs = conditional_tsallis(condition_on_b_only(abc), alpha);
                       const double rhs = chain_rule_rhs(conditional_tsallis(abc, alpha), dc, alpha);
                       log.record(rhs - lhs);
                     }
                   }
                 }});

  reg.push_back({"mixture-exact",
                 "H_alpha(rho_ABY|BY) = ((sum_y p_y (1+(1-alpha)H_y)^(1/alpha))^alpha - 1)/(1-alpha)", 12, 2,
                 {0.5, 1.0, 1.5, 2.0}, 1e-6,
                 [](const Resolved& c, Rng& rng, MarginLog& log) {
                   for (int t = 0; t < c.trials; ++t) {
                     const double alpha = c.alphas[t % c.alphas.size()];
                     const std::size_t nblocks = t % 2 == 0 ? 2 : 3;
                     std::vector<BipartiteState> blocks;
                     std::vector<double> h;
                     for (std::size_t y = 0; y < nblocks; ++y) {
                       blocks.push_back(draw_bipartite(rng, 2, std::min<Index>(2, c.max_dim)));
                       h.push_back(conditional_tsallis(blocks.back(), alpha));
                     }
                     const auto p = draw_distribution(rng, nblocks);
                     const auto joint = build_classical_register_state(blocks, p);
                     const double closed = classical_register_closed_form(h, p, alpha);
                     const auto opt = conditional_entropy_optimize(joint, make_tsallis_f(alpha), suite_optimizer(rng));
                     log.record(-std::abs(closed - opt.value));
                     log.record(-std::abs(closed - conditional_tsallis(joint, alpha)));
                   }
                 }});

  reg.push_back({"mixture-lower", "sum_y p_y H_f(rho_ABy|B) <= H_f(rho_ABY|BY)", 100, 3, {0.5, 1.0, 1.5, 2.0}, 1e-7,
                 [](const Resolved& c, Rng& rng, MarginLog& log) {
                   for (int t = 0; t < c.trials; ++t) {
                     const double alpha = c.alphas[t % c.alphas.size()];
                     const std::size_t nblocks = static_cast<std::size_t>(rng.uniform_int(2, 3));
                     const Index d_a = draw_dim(rng, 2, c.max_dim);
                     std::vector<BipartiteState> blocks;
                     double lhs = 0.0;
                     const auto p = draw_distribution(rng, nblocks);
                     for (std::size_t y = 0; y < nblocks; ++y) {
                       blocks.push_back(draw_bipartite(rng, d_a, draw_dim(rng, 1, c.max_dim)));
                       lhs += p[y] * conditional_tsallis(blocks.back(), alpha);
                     }
                     const auto joint = build_classical_register_state(blocks, p);
                     log.record(conditional_tsallis(joint, alpha) - lhs);
                   }
                 }});

  reg.push_back({"pure-bounds", "ln_alpha(1/S) <= H_alpha(|AB>|B) <= ln_alpha(||rho_B||_inf) < 0 if entangled", 200, 4,
                 {0.5, 1.0, 1.5, 2.0}, 1e-9,
                 [](const Resolved& c, Rng& rng, MarginLog& log) {
                   for (int t = 0; t < c.trials; ++t) {
                     const double alpha = c.alphas[t % c.alphas.size()];
                     const Index d_a = draw_dim(rng, 2, c.max_dim);
                     const Index d_b = draw_dim(rng, 2, c.max_dim);
                     const Index k = draw_dim(rng, 1, std::min(d_a, d_b));
                     std::vector<double> coeffs(static_cast<std::size_t>(k));
                     const bool flat = t % 5 == 0;
                     double n2 = 0.0;
                     for (auto& x : coeffs) {
                       x = flat ? 1.0 : 0.05 + rng.uniform();
                       n2 += x * x;
                     }
                     double max2 = 0.0;
                     for (auto& x : coeffs) {
                       x /= std::sqrt(n2);
                       max2 = std::max(max2, x * x);
                     }
                     const auto s = pure_bipartite_from_schmidt(coeffs, d_a, d_b, rng);
                     const double h = conditional_tsallis(s, alpha);
                     const auto b = pure_state_bounds_tsallis(coeffs, alpha);
                     double margin = std::min(h - b.lower, b.upper - h);
                     if (max2 < 1.0 - 1e-9) margin = std::min(margin, -h);
                     log.record(margin);
                   }
                 }});

  reg.push_back({"product-identity", "H_alpha(rho_A (x) rho_B | B) = H_alpha(rho_A)", 50, 4, {0.3, 0.5, 1.0, 1.5, 2.0},
                 1e-9,
                 [](const Resolved& c, Rng& rng, MarginLog& log) {
                   for (int t = 0; t < c.trials; ++t) {
                     const double alpha = c.alphas[t % c.alphas.size()];
                     const Index d_a = draw_dim(rng, 2, c.max_dim);
                     const Index d_b = draw_dim(rng, 2, c.max_dim);
                     const Operator ra = draw_state(rng, d_a);
                     const Operator rb = draw_state(rng, d_b);
                     const BipartiteState s(kron(ra, rb), {d_a, d_b});
                     log.record(-std::abs(conditional_tsallis(s, alpha) - tsallis_entropy(ra, alpha)));
                   }
                 }});

  reg.push_back({"extension-independence",
                 "H_f(rho_AB|B) is unchanged by zero-padding H_B; the optimum is supported on R(rho_B)", 50, 3,
                 {0.5, 1.0, 2.0}, 1e-7,
                 [](const Resolved& c, Rng& rng, MarginLog& log) {
                   for (int t = 0; t < c.trials; ++t) {
                     const std::size_t which = static_cast<std::size_t>(t) % (c.alphas.size() + 1);
                     const auto f = which < c.alphas.size() ? make_tsallis_f(c.alphas[which]) : make_harmonic_f(1.0);
                     const auto s = draw_bipartite(rng, draw_dim(rng, 2, c.max_dim), draw_dim(rng, 2, c.max_dim));
                     const auto opts = suite_optimizer(rng);
                     const auto base = conditional_entropy_optimize(s, f, opts);
                     const Operator pb = support_projector(s.reduced_b());
                     log.record(-max_abs(pb * base.sigma_star * pb - base.sigma_star));
                     for (Index k : {1, 2, 4}) {
                       const auto padded = embed_ancilla(s, k);
                       const auto ext = conditional_entropy_optimize(padded, f, opts);
                       log.record(-std::abs(ext.value - base.value));
                       // No normalized sigma leaking into the padding beats the restricted optimum.
                       const Operator competitor = random_density(padded.d_b(), padded.d_b(), rng);
                       log.record_leq(ExtendedReal(-ext.value), divergence_to_product_reference(padded, competitor, f));
                     }
                   }
                 }});

  reg.push_back({"nonnegativity", "D_f(rho||sigma) >= 0 for normalized rho, sigma with R(rho) in R(sigma)", 500, 4,
                 {0.5, 1.0, 1.5, 2.0}, 1e-10,
                 [](const Resolved& c, Rng& rng, MarginLog& log) {
                   for (int t = 0; t < c.trials; ++t) {
                     const double alpha = c.alphas[t % c.alphas.size()];
                     const Index d = draw_dim(rng, 2, c.max_dim);
                     const Operator sigma = draw_state(rng, d);
                     const Operator rho = draw_state_inside(rng, sigma);
                     log.record_leq(ExtendedReal(0.0), quantum_f_divergence(rho, sigma, make_tsallis_f(alpha)));
                   }
                 }});

  reg.push_back({"homogeneity", "D_f(lambda A||lambda B) = lambda D_f(A||B)", 100, 4, {0.5, 1.0, 1.5, 2.0}, 1e-9,
                 [](const Resolved& c, Rng& rng, MarginLog& log) {
                   for (int t = 0; t < c.trials; ++t) {
                     const auto f = make_tsallis_f(c.alphas[t % c.alphas.size()]);
                     const Index d = draw_dim(rng, 2, c.max_dim);
                     const Operator b = draw_state(rng, d);
                     const Operator a = rng.uniform() < 0.8 ? draw_state_inside(rng, b) : draw_state(rng, d);
                     const auto base = quantum_f_divergence(a, b, f);
                     for (double lambda : {0.1, 0.5, 2.0}) {
                       log.record_equal(quantum_f_divergence(lambda * a, lambda * b, f), base.weighted(lambda));
                     }
                   }
                 }});

  reg.push_back({"orthogonal-additivity", "D_f(A1 (+) A2 || B1 (+) B2) = D_f(A1||B1) + D_f(A2||B2)", 100, 3,
                 {0.5, 1.0, 1.5, 2.0}, 1e-9,
                 [](const Resolved& c, Rng& rng, MarginLog& log) {
                   for (int t = 0; t < c.trials; ++t) {
                     const auto f = make_tsallis_f(c.alphas[t % c.alphas.size()]);
                     const Index d1 = draw_dim(rng, 1, c.max_dim);
                     const Index d2 = draw_dim(rng, 1, c.max_dim);
                     const double wa = rng.uniform(0.1, 0.9);
                     const double wb = rng.uniform(0.1, 0.9);
                     const Operator b1 = wb * draw_state(rng, d1);
                     const Operator b2 = (1.0 - wb) * draw_state(rng, d2);
                     const Operator a1 = wa * (rng.uniform() < 0.7 ? draw_state_inside(rng, b1) : draw_state(rng, d1));
                     const Operator a2 = (1.0 - wa) * draw_state_inside(rng, b2);
                     log.record_equal(quantum_f_divergence(direct_sum(a1, a2), direct_sum(b1, b2), f),
                                      quantum_f_divergence(a1, b1, f) + quantum_f_divergence(a2, b2, f));
                   }
                 }});

  reg.push_back({"conditioning-reduces", "H_f(rho_ABC|BC) <= H_f(rho_AB|B), rho_AB via the trace map on C", 100, 2,
                 {0.5, 1.0, 1.5, 2.0}, 1e-7,
                 [](const Resolved& c, Rng& rng, MarginLog& log) {
                   const Index d = std::min<Index>(c.max_dim, 3);
                   for (int t = 0; t < c.trials; ++t) {
                     const double alpha = c.alphas[t % c.alphas.size()];
                     const BipartiteState abc(draw_state(rng, d * d * d), {d, d, d});
                     log.record(conditional_tsallis(trace_out_c(abc), alpha) - conditional_tsallis(abc, alpha));
                   }
                 }});

  reg.push_back({"conditional-dpi", "H_f(rho_AB|B) <= H_f((id (x) Psi)(rho_AB)|B') for channels Psi on B", 100, 4,
                 {0.5, 1.0, 1.5, 2.0}, 1e-7,
                 [](const Resolved& c, Rng& rng, MarginLog& log) {
                   for (int t = 0; t < c.trials; ++t) {
                     const double alpha = c.alphas[t % c.alphas.size()];
                     const auto s = draw_bipartite(rng, draw_dim(rng, 2, c.max_dim), draw_dim(rng, 2, c.max_dim));
                     const Index d_out = draw_dim(rng, 2, c.max_dim);
                     Index env = draw_dim(rng, 1, 3);
                     while (d_out * env < s.d_b()) ++env;
                     const auto psi = random_channel(s.d_b(), d_out, env, rng());
                     log.record(conditional_tsallis(apply_on_b(s, psi), alpha) - conditional_tsallis(s, alpha));
                   }
                 }});

  reg.push_back({"alpha-continuity", "|H_alpha(rho|B) - H_1(rho|B)| <= 1e-3 at alpha = 1 +- 1e-4", 50, 4, {}, 0.0,
                 [](const Resolved& c, Rng& rng, MarginLog& log) {
                   for (int t = 0; t < c.trials; ++t) {
                     const auto s = draw_bipartite(rng, draw_dim(rng, 2, c.max_dim), draw_dim(rng, 2, c.max_dim));
                     const double h1 = conditional_entropy_vn_closed(s);
                     for (double alpha : {1.0 - 1e-4, 1.0 + 1e-4}) {
                       log.record(1e-3 - std::abs(conditional_tsallis(s, alpha) - h1));
                     }
                   }
                 }});

  reg.push_back({"closed-form-vs-optimizer", "closed-form conditional Tsallis entropy equals the optimizer value", 100, 4,
                 {0.3, 0.5, 1.5, 2.0}, 1e-6,
                 [](const Resolved& c, Rng& rng, MarginLog& log) {
                   for (int t = 0; t < c.trials; ++t) {
                     const double alpha = c.alphas[t % c.alphas.size()];
                     const auto s = draw_bipartite(rng, draw_dim(rng, 2, c.max_dim), draw_dim(rng, 2, c.max_dim));
                     const auto opt = conditional_entropy_optimize(s, make_tsallis_f(alpha), suite_optimizer(rng));
                     log.record(-std::abs(opt.value - conditional_tsallis(s, alpha)));
                   }
                 }});

  return reg;
}

inline const std::vector<PropertySpec>& registry() {
  static const std::vector<PropertySpec> reg = make_registry();
  return reg;
}

}  // namespace detail

inline std::vector<std::string> property_ids() {
  std::vector<std::string> ids;
  for (const auto& p : detail::registry()) ids.push_back(p.id);
  return ids;
}

/// Runs one registered property. Unknown ids throw DomainError; failures
/// inside the ensemble propagate.
inline PropertyReport run_property(const std::string& property_id, const PropertyConfig& config) {
  const auto& reg = detail::registry();
  const auto it = std::find_if(reg.begin(), reg.end(), [&](const auto& p) { return p.id == property_id; });
  if (it == reg.end()) throw DomainError("run_property: unknown property id '" + property_id + "'");

  const detail::Resolved resolved{config.trials.value_or(it->trials), config.max_dim.value_or(it->max_dim),
                                  config.alphas.value_or(it->alphas), config.tolerance.value_or(it->tolerance)};
  if (resolved.trials < 0 || resolved.max_dim < 2) throw DomainError("run_property: invalid trials or dimension cap");

  PropertyReport report;
  report.property_id = it->id;
  report.statement = it->statement;
  report.tolerance = resolved.tolerance;
  report.seed = config.seed;
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(config.seed);
  detail::MarginLog log(report);
  it->run(resolved, rng, log);
  report.elapsed_ms =
      std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

struct SuiteConfig {
  std::uint64_t master_seed = 0;
  /// Unset: every property. Set: only those listed (possibly none).
  std::optional<std::vector<std::string>> filter;
};

/// Runs the registered properties with per-property seeds
/// derive_seed(master_seed, id). Errors become failed reports.
inline std::vector<PropertyReport> run_suite(const SuiteConfig& config) {
  std::vector<PropertyReport> out;
  for (const auto& id : property_ids()) {
    if (config.filter && std::find(config.filter->begin(), config.filter->end(), id) == config.filter->end()) continue;
    PropertyConfig pc;
    pc.seed = derive_seed(config.master_seed, id);
    try {
      out.push_back(run_property(id, pc));
    } catch (const std::exception& e) {
      PropertyReport failed;
      failed.property_id = id;
      failed.seed = pc.seed;
      failed.error = e.what();
      out.push_back(std::move(failed));
    }
  }
  return out;
}

inline bool suite_passed(const std::vector<PropertyReport>& reports) {
  return std::all_of(reports.begin(), reports.end(), [](const auto& r) { return r.passed(); });
}

inline nlohmann::json to_json(const PropertyReport& r) {
  nlohmann::json j;
  j["property_id"] = r.property_id;
  j["statement"] = r.statement;
  j["trials"] = r.trials;
  j["violations"] = r.violations;
  if (std::isfinite(r.worst_margin)) {
    j["worst_margin"] = r.worst_margin;
  } else {
    j["worst_margin"] = format_number(r.worst_margin);
  }
  j["tolerance"] = r.tolerance;
  j["seed"] = r.seed;
  j["elapsed_ms"] = r.elapsed_ms;
  j["passed"] = r.passed();
  if (!r.error.empty()) j["error"] = r.error;
  return j;
}

inline nlohmann::json to_json(const std::vector<PropertyReport>& reports) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : reports) arr.push_back(to_json(r));
  return arr;
}

}  // namespace qfdiv

#endif  // QFDIV_PROPSUITE_HPP
