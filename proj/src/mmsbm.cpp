#include "blockstrat/mmsbm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "blockstrat/parallel.hpp"

namespace blockstrat {

namespace {

void check_dims(const MmsbmParams& params, const DecisionNetwork& network) {
  if (params.players() != network.players() || params.contexts() != network.contexts()) {
    throw std::invalid_argument(
        "parameters sized for " + std::to_string(params.players()) + " players x " +
        std::to_string(params.contexts()) + " contexts, network has " +
        std::to_string(network.players()) + " x " + std::to_string(network.contexts()));
  }
}

double up_probability(const MmsbmParams& params, std::size_t p, std::size_t c) {
  double total = 0.0;
  for (int k = 0; k < params.K; ++k) {
    const double tk = params.theta(p, k);
    if (tk == 0.0) continue;
    double inner = 0.0;
    for (int l = 0; l < params.L; ++l) inner += params.prob(k, l) * params.eta(c, l);
    total += tk * inner;
  }
  return total;
}

double down_probability(const MmsbmParams& params, std::size_t p, std::size_t c) {
  double total = 0.0;
  for (int k = 0; k < params.K; ++k) {
    const double tk = params.theta(p, k);
    if (tk == 0.0) continue;
    double inner = 0.0;
    for (int l = 0; l < params.L; ++l) inner += (1.0 - params.prob(k, l)) * params.eta(c, l);
    total += tk * inner;
  }
  return total;
}

double clamped_log(double x, double eps) { return std::log(std::clamp(x, eps, 1.0 - eps)); }

bool converged(double previous, double current, double rel_tolerance) {
  const double delta = std::abs(current - previous);
  return delta == 0.0 || delta < rel_tolerance * std::abs(current);
}

}  // namespace

void MmsbmParams::validate(double tol) const {
  if (K < 1 || L < 1) throw std::invalid_argument("K and L must be >= 1");
  if (theta.cols() != static_cast<std::size_t>(K) || eta.cols() != static_cast<std::size_t>(L) ||
      prob.rows() != static_cast<std::size_t>(K) || prob.cols() != static_cast<std::size_t>(L)) {
    throw std::invalid_argument("parameter matrices do not match K, L");
  }
  auto check_rows = [tol](const Matrix& m, const char* name) {
    for (std::size_t r = 0; r < m.rows(); ++r) {
      double sum = 0.0;
      for (double v : m.row(r)) {
        if (!(v >= 0.0 && v <= 1.0)) {
          throw std::invalid_argument(std::string(name) + " entry outside [0, 1]");
        }
        sum += v;
      }
      if (std::abs(sum - 1.0) > tol) {
        throw std::invalid_argument(std::string(name) + " row " + std::to_string(r) +
                                    " sums to " + std::to_string(sum));
      }
    }
  };
  check_rows(theta, "theta");
  check_rows(eta, "eta");
  for (double v : prob.values()) {
    if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument("prob entry outside [0, 1]");
  }
}

MmsbmParams random_params(std::size_t players, std::size_t contexts, int K, int L, Rng& rng) {
  MmsbmParams params{K, L, Matrix(players, K), Matrix(contexts, L), Matrix(K, L)};
  for (std::size_t p = 0; p < players; ++p) rng.simplex(params.theta.row(p));
  for (std::size_t c = 0; c < contexts; ++c) rng.simplex(params.eta.row(c));
  for (double& v : params.prob.values()) v = rng.uniform_open();
  return params;
}

double link_probability(const MmsbmParams& params, std::size_t player, std::size_t context,
                        Direction guess) {
  if (player >= params.players() || context >= params.contexts()) {
    throw std::out_of_range("link_probability: node index out of range");
  }
  return guess == Direction::Up ? up_probability(params, player, context)
                                : down_probability(params, player, context);
}

double log_posterior(const MmsbmParams& params, const DecisionNetwork& network, double eps) {
  check_dims(params, network);
  double total = 0.0;
  for (std::size_t p = 0; p < network.players(); ++p) {
    for (std::size_t c = 0; c < network.contexts(); ++c) {
      const int up = network.n_up(p, c), down = network.n_down(p, c);
      if (up == 0 && down == 0) continue;
      const double pu = up_probability(params, p, c);
      if (up) total += up * clamped_log(pu, eps);
      if (down) total += down * clamped_log(1.0 - pu, eps);
    }
  }
  return total;
}

EmStep em_step(const MmsbmParams& params, const DecisionNetwork& network, double eps) {
  check_dims(params, network);
  const int K = params.K, L = params.L;
  const std::size_t P = network.players(), C = network.contexts();

  Matrix theta_acc(P, K), eta_acc(C, L), mass_all(K, L), mass_up(K, L);
  std::vector<double> omega(static_cast<std::size_t>(K) * L);

  for (std::size_t p = 0; p < P; ++p) {
    for (std::size_t c = 0; c < C; ++c) {
      for (Direction g : {Direction::Up, Direction::Down}) {
        const int n = network.count(p, c, g);
        if (n == 0) continue;
        double norm = 0.0;
        for (int k = 0; k < K; ++k) {
          const double tk = params.theta(p, k);
          for (int l = 0; l < L; ++l) {
            const double pkl = g == Direction::Up ? params.prob(k, l) : 1.0 - params.prob(k, l);
            const double w = tk * pkl * params.eta(c, l);
            omega[k * L + l] = w;
            norm += w;
          }
        }
        // An observation with zero probability carries no information about
        // which cell produced it; spread it evenly.
        const double scale = norm > 0.0 ? n / norm : 0.0;
        const double flat = static_cast<double>(n) / (K * L);
        for (int k = 0; k < K; ++k) {
          for (int l = 0; l < L; ++l) {
            const double w = norm > 0.0 ? omega[k * L + l] * scale : flat;
            theta_acc(p, k) += w;
            eta_acc(c, l) += w;
            mass_all(k, l) += w;
            if (g == Direction::Up) mass_up(k, l) += w;
          }
        }
      }
    }
  }

  EmStep out{MmsbmParams{K, L, Matrix(P, K), Matrix(C, L), params.prob}, 0.0};
  for (std::size_t p = 0; p < P; ++p) {
    const int degree = network.player_degree(p);
    if (degree == 0) throw DataError("player node without observations");
    // The accumulated mass equals the degree up to rounding; dividing by it
    // keeps rows exactly on the simplex.
    double mass = 0.0;
    for (int k = 0; k < K; ++k) mass += theta_acc(p, k);
    for (int k = 0; k < K; ++k) out.params.theta(p, k) = theta_acc(p, k) / mass;
  }
  for (std::size_t c = 0; c < C; ++c) {
    const int degree = network.context_degree(c);
    if (degree == 0) throw DataError("context node without observations");
    double mass = 0.0;
    for (int l = 0; l < L; ++l) mass += eta_acc(c, l);
    for (int l = 0; l < L; ++l) out.params.eta(c, l) = eta_acc(c, l) / mass;
  }
  // A cell with no responsibility mass does not enter the bound; it keeps its value.
  for (int k = 0; k < K; ++k) {
    for (int l = 0; l < L; ++l) {
      if (mass_all(k, l) > 0.0) {
        out.params.prob(k, l) = std::min(1.0, mass_up(k, l) / mass_all(k, l));
      }
    }
  }
  out.log_posterior = log_posterior(out.params, network, eps);
  return out;
}

void FitConfig::validate() const {
  if (max_iterations < 1) throw std::invalid_argument("max_iterations must be >= 1");
  if (!(rel_tolerance > 0.0)) throw std::invalid_argument("rel_tolerance must be > 0");
  if (restarts < 1) throw std::invalid_argument("restarts must be >= 1");
  if (!(epsilon > 0.0 && epsilon < 0.5)) throw std::invalid_argument("epsilon must be in (0, 0.5)");
}

RunTrace run_em(MmsbmParams& params, const DecisionNetwork& network, const FitConfig& config) {
  RunTrace trace;
  double current = log_posterior(params, network, config.epsilon);
  trace.log_posteriors.push_back(current);
  while (trace.iterations < config.max_iterations) {
    EmStep next = em_step(params, network, config.epsilon);
    ++trace.iterations;
    params = std::move(next.params);
    trace.log_posteriors.push_back(next.log_posterior);
    const double previous = current;
    current = next.log_posterior;
    if (converged(previous, current, config.rel_tolerance)) {
      trace.converged = true;
      break;
    }
  }
  return trace;
}

FitResult fit(const DecisionNetwork& network, int K, int L, const FitConfig& config) {
  config.validate();
  if (K < 1 || L < 1) throw std::invalid_argument("K and L must be >= 1");
  if (network.empty()) throw DataError("cannot fit an empty network");

  FitResult result;
  auto& diag = result.diagnostics;
  if (static_cast<std::size_t>(K) > network.players()) {
    diag.warnings.push_back("K=" + std::to_string(K) + " exceeds " +
                            std::to_string(network.players()) + " players; clamped");
    K = static_cast<int>(network.players());
  }
  if (static_cast<std::size_t>(L) > network.contexts()) {
    diag.warnings.push_back("L=" + std::to_string(L) + " exceeds " +
                            std::to_string(network.contexts()) + " contexts; clamped");
    L = static_cast<int>(network.contexts());
  }
  diag.K = K;
  diag.L = L;

  const auto runs = static_cast<std::size_t>(config.restarts);
  std::vector<MmsbmParams> params(runs);
  diag.runs.resize(runs);
  parallel_for(runs, [&](std::size_t r) {
    const std::uint64_t seed = derive_seed(config.seed, r);
    Rng rng(seed);
    params[r] = random_params(network.players(), network.contexts(), K, L, rng);
    diag.runs[r] = run_em(params[r], network, config);
    diag.runs[r].seed = seed;
  });

  for (std::size_t r = 1; r < runs; ++r) {
    if (diag.runs[r].log_posteriors.back() > diag.runs[diag.best_run].log_posteriors.back()) {
      diag.best_run = r;
    }
  }
  for (std::size_t r = 0; r < runs; ++r) {
    if (!diag.runs[r].converged) {
      diag.warnings.push_back("restart " + std::to_string(r) + " did not converge within " +
                              std::to_string(config.max_iterations) + " iterations");
    }
  }
  result.params = std::move(params[diag.best_run]);
  result.log_posterior = diag.runs[diag.best_run].log_posteriors.back();
  return result;
}

Prediction predict(const MmsbmParams& params, std::optional<std::size_t> player,
                   std::optional<std::size_t> context) {
  if (!player || !context) return {Direction::Up, true};
  const double up = link_probability(params, *player, *context, Direction::Up);
  return {up >= 0.5 ? Direction::Up : Direction::Down, false};
}

Prediction predict(const MmsbmParams& params, const DecisionNetwork& network,
                   std::size_t external_player, int context_code) {
  return predict(params, network.player_slot(external_player), network.context_slot(context_code));
}

MmsbmParams permute_groups(const MmsbmParams& params, const std::vector<int>& player_perm,
                           const std::vector<int>& context_perm) {
  if (player_perm.size() != static_cast<std::size_t>(params.K) ||
      context_perm.size() != static_cast<std::size_t>(params.L)) {
    throw std::invalid_argument("permutation size mismatch");
  }
  MmsbmParams out{params.K, params.L, Matrix(params.players(), params.K),
                  Matrix(params.contexts(), params.L), Matrix(params.K, params.L)};
  for (std::size_t p = 0; p < params.players(); ++p) {
    for (int k = 0; k < params.K; ++k) out.theta(p, k) = params.theta(p, player_perm[k]);
  }
  for (std::size_t c = 0; c < params.contexts(); ++c) {
    for (int l = 0; l < params.L; ++l) out.eta(c, l) = params.eta(c, context_perm[l]);
  }
  for (int k = 0; k < params.K; ++k) {
    for (int l = 0; l < params.L; ++l) out.prob(k, l) = params.prob(player_perm[k], context_perm[l]);
  }
  return out;
}

}  // namespace blockstrat
