#include "blockstrat/strategy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace blockstrat {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

const std::vector<Feature> kBce = {Feature::B, Feature::C, Feature::E};

std::size_t column(Pattern b) { return static_cast<std::size_t>(b); }

Direction as_direction(int v) { return v == value::kUp ? Direction::Up : Direction::Down; }

}  // namespace

const char* to_string(Pattern b) {
  switch (b) {
    case Pattern::Exp: return "EXP";
    case Pattern::Wsls: return "WSLS";
    case Pattern::Ws: return "WS";
    case Pattern::Ls: return "LS";
    case Pattern::Rpt: return "RPT";
    case Pattern::Rptu: return "RPTU";
    case Pattern::Rptd: return "RPTD";
  }
  return "?";
}

const char* to_string(GroupLabel label) {
  switch (label) {
    case GroupLabel::Switch: return "SWITCH";
    case GroupLabel::Optimist: return "OPTIMIST";
    case GroupLabel::Repeat: return "REPEAT";
    case GroupLabel::Wsls: return "WSLS";
    case GroupLabel::Unlabeled: return "UNLABELED";
  }
  return "?";
}

const char* to_string(EntropyClass c) {
  switch (c) {
    case EntropyClass::Low: return "LOW";
    case EntropyClass::Medium: return "MEDIUM";
    case EntropyClass::High: return "HIGH";
  }
  return "?";
}

Matrix phat(const MmsbmParams& params) {
  Matrix out(params.K, params.contexts());
  for (int k = 0; k < params.K; ++k) {
    for (std::size_t c = 0; c < params.contexts(); ++c) {
      double sum = 0.0;
      for (int l = 0; l < params.L; ++l) sum += params.prob(k, l) * params.eta(c, l);
      out(k, c) = sum;
    }
  }
  return out;
}

std::optional<Direction> pattern_prescription(Pattern b, const ContextKey& context) {
  if (context.features != kBce) {
    throw std::invalid_argument("pattern prescriptions need a [B, C, E] context");
  }
  const Direction market = as_direction(context.values[0]);
  const bool right = context.values[1] == value::kRight;
  const int advice = context.values[2];
  const Direction previous_guess = right ? market : opposite(market);

  switch (b) {
    case Pattern::Exp:
      if (advice == value::kNotConsulted) return std::nullopt;
      return advice == value::kAdviceUp ? Direction::Up : Direction::Down;
    case Pattern::Wsls:
      return market;
    case Pattern::Ws:
      if (!right) return std::nullopt;
      return previous_guess;
    case Pattern::Ls:
      if (right) return std::nullopt;
      return opposite(previous_guess);
    case Pattern::Rpt:
      return previous_guess;
    case Pattern::Rptu:
      if (previous_guess != Direction::Up) return std::nullopt;
      return Direction::Up;
    case Pattern::Rptd:
      if (previous_guess != Direction::Down) return std::nullopt;
      return Direction::Down;
  }
  return std::nullopt;
}

Matrix group_exposure(const MmsbmParams& params, const DecisionNetwork& network) {
  if (params.players() != network.players() || params.contexts() != network.contexts()) {
    throw std::invalid_argument("parameters do not match the network");
  }
  Matrix exposure(params.K, network.contexts());
  for (std::size_t p = 0; p < network.players(); ++p) {
    for (std::size_t c = 0; c < network.contexts(); ++c) {
      const int n = network.total(p, c);
      if (n == 0) continue;
      for (int k = 0; k < params.K; ++k) exposure(k, c) += params.theta(p, k) * n;
    }
  }
  return exposure;
}

Matrix pattern_scores(const MmsbmParams& params, const DecisionNetwork& network) {
  if (network.schema().features() != kBce) {
    throw std::invalid_argument("pattern scores need a network built with schema BCE");
  }
  const Matrix projected = phat(params);
  const Matrix exposure = group_exposure(params, network);
  Matrix scores(params.K, kPatterns.size(), kNaN);

  for (Pattern b : kPatterns) {
    for (int k = 0; k < params.K; ++k) {
      double weight = 0.0, agreement = 0.0;
      for (std::size_t c = 0; c < network.contexts(); ++c) {
        const ContextKey key = network.schema().decode(network.context_code(c));
        const bool consulted = key.values[2] != value::kNotConsulted;
        if (consulted != (b == Pattern::Exp)) continue;
        const auto prescribed = pattern_prescription(b, key);
        if (!prescribed) continue;
        const double q = *prescribed == Direction::Up ? projected(k, c) : 1.0 - projected(k, c);
        weight += exposure(k, c);
        agreement += exposure(k, c) * (2.0 * q - 1.0);
      }
      if (weight > 0.0) scores(k, column(b)) = std::clamp(agreement / weight, -1.0, 1.0);
    }
  }
  return scores;
}

double signature_score(const Matrix& scores, std::size_t k, GroupLabel label) {
  const double rpt = scores(k, column(Pattern::Rpt));
  switch (label) {
    case GroupLabel::Switch:
    case GroupLabel::Repeat:
      return std::abs(rpt);
    case GroupLabel::Optimist:
      return std::min(std::abs(scores(k, column(Pattern::Rptu))),
                      std::abs(scores(k, column(Pattern::Rptd))));
    case GroupLabel::Wsls:
      return std::abs(scores(k, column(Pattern::Wsls)));
    case GroupLabel::Unlabeled:
      break;
  }
  return kNaN;
}

// Label rules (NaN scores never satisfy a rule):
//   SWITCH    M_RPT <= -0.5
//   OPTIMIST  M_RPTU >= 0.5 and M_RPTD <= -0.5
//   REPEAT    M_RPT >= 0.5
//   WSLS      M_WSLS >= 0.5 and -0.5 < M_RPT < 0.5
// When several rules match, the largest signature score wins.
std::vector<GroupLabel> label_groups(const Matrix& scores) {
  if (scores.cols() != kPatterns.size()) throw std::invalid_argument("score matrix needs 7 columns");
  std::vector<GroupLabel> labels;
  for (std::size_t k = 0; k < scores.rows(); ++k) {
    const double rpt = scores(k, column(Pattern::Rpt));
    const double rptu = scores(k, column(Pattern::Rptu));
    const double rptd = scores(k, column(Pattern::Rptd));
    const double wsls = scores(k, column(Pattern::Wsls));

    std::vector<GroupLabel> matches;
    if (rpt <= -0.5) matches.push_back(GroupLabel::Switch);
    if (rptu >= 0.5 && rptd <= -0.5) matches.push_back(GroupLabel::Optimist);
    if (rpt >= 0.5) matches.push_back(GroupLabel::Repeat);
    if (wsls >= 0.5 && rpt > -0.5 && rpt < 0.5) matches.push_back(GroupLabel::Wsls);

    GroupLabel best = GroupLabel::Unlabeled;
    double best_score = -1.0;
    for (GroupLabel m : matches) {
      const double s = signature_score(scores, k, m);
      if (s > best_score) {
        best = m;
        best_score = s;
      }
    }
    labels.push_back(best);
  }
  return labels;
}

double shannon_entropy(std::span<const double> weights) {
  double h = 0.0;
  for (double w : weights) {
    if (w > 0.0) h -= w * std::log(w);
  }
  return h;
}

EntropyReport entropy_classes(const MmsbmParams& params, const EntropyBoundaries& bounds) {
  EntropyReport report;
  const double max_entropy = std::log(static_cast<double>(params.K));
  for (std::size_t p = 0; p < params.players(); ++p) {
    const double h = shannon_entropy(params.theta.row(p));
    report.entropy.push_back(h);
    EntropyClass cls = EntropyClass::High;
    if (params.K == 1 || h < bounds.low * max_entropy) {
      cls = EntropyClass::Low;
    } else if (h < bounds.medium * max_entropy) {
      cls = EntropyClass::Medium;
    }
    report.classes.push_back(cls);
  }
  return report;
}

std::optional<double> balance(double repeat_weight, double switch_weight) {
  const double denominator = repeat_weight + switch_weight;
  if (!(denominator > 0.0)) return std::nullopt;
  return (repeat_weight - switch_weight) / denominator;
}

std::vector<std::optional<double>> repeat_switch_balance(const MmsbmParams& params,
                                                         const std::vector<GroupLabel>& labels,
                                                         double main_threshold) {
  if (labels.size() != static_cast<std::size_t>(params.K)) {
    throw std::invalid_argument("one label per player group required");
  }
  std::vector<std::optional<double>> out(params.players());
  for (std::size_t p = 0; p < params.players(); ++p) {
    auto row = params.theta.row(p);
    const auto main = static_cast<std::size_t>(std::max_element(row.begin(), row.end()) - row.begin());
    if (labels[main] != GroupLabel::Repeat && labels[main] != GroupLabel::Switch) continue;
    if (row[main] < main_threshold) continue;
    double repeat = 0.0, shift = 0.0;
    for (int k = 0; k < params.K; ++k) {
      if (labels[k] == GroupLabel::Repeat) repeat += row[k];
      if (labels[k] == GroupLabel::Switch) shift += row[k];
    }
    out[p] = balance(repeat, shift);
  }
  return out;
}

StrategyReport analyze(const MmsbmParams& params, const DecisionNetwork& network,
                       const EntropyBoundaries& bounds) {
  StrategyReport report;
  report.phat = phat(params);
  report.scores = pattern_scores(params, network);
  report.labels = label_groups(report.scores);
  report.entropy = entropy_classes(params, bounds);
  report.balance = repeat_switch_balance(params, report.labels);
  report.mean_membership.assign(params.K, 0.0);
  for (std::size_t p = 0; p < params.players(); ++p) {
    for (int k = 0; k < params.K; ++k) report.mean_membership[k] += params.theta(p, k);
  }
  if (params.players() > 0) {
    for (double& m : report.mean_membership) m /= static_cast<double>(params.players());
  }
  return report;
}

}  // namespace blockstrat
