#pragma once

// Interpretation of a fitted model on the [B, C, E] representation:
// context-projected guess probabilities, behavioral pattern scores, group
// labels, membership entropy and the repeat/switch balance.

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "blockstrat/contexts.hpp"
#include "blockstrat/matrix.hpp"
#include "blockstrat/mmsbm.hpp"
#include "blockstrat/network.hpp"

namespace blockstrat {

enum class Pattern { Exp, Wsls, Ws, Ls, Rpt, Rptu, Rptd };

inline constexpr std::array<Pattern, 7> kPatterns = {
    Pattern::Exp, Pattern::Wsls, Pattern::Ws,  Pattern::Ls,
    Pattern::Rpt, Pattern::Rptu, Pattern::Rptd,
};

const char* to_string(Pattern b);

enum class GroupLabel { Switch, Optimist, Repeat, Wsls, Unlabeled };
const char* to_string(GroupLabel label);

enum class EntropyClass { Low, Medium, High };
const char* to_string(EntropyClass c);

// phat(k, c) = sum_l prob(k, l) * eta(c, l): probability that group k
// guesses UP in context node c.
Matrix phat(const MmsbmParams& params);

// Direction prescribed by pattern b in a [B, C, E] context, or nullopt when
// the pattern does not apply there. Throws std::invalid_argument for keys of
// any other schema.
std::optional<Direction> pattern_prescription(Pattern b, const ContextKey& context);

// K x 7 matrix (columns in kPatterns order) of exposure-weighted agreement in
// [-1, 1]. EXP is scored on expert-consulted contexts only, every other
// pattern on not-consulted contexts only. NaN where the group has no exposure
// to an applicable context.
Matrix pattern_scores(const MmsbmParams& params, const DecisionNetwork& network);

// Exposure of each group to each context node: sum_p theta(p, k) * n(p, c).
Matrix group_exposure(const MmsbmParams& params, const DecisionNetwork& network);

// Group labels from score rows (see label rules in strategy.cpp).
std::vector<GroupLabel> label_groups(const Matrix& scores);

// Absolute signature score backing a label (NaN for UNLABELED).
double signature_score(const Matrix& scores, std::size_t group, GroupLabel label);

struct EntropyBoundaries {
  double low = 0.35;     // H < low * log K        -> LOW
  double medium = 0.70;  // H < medium * log K     -> MEDIUM, else HIGH
};

struct EntropyReport {
  std::vector<double> entropy;  // natural log
  std::vector<EntropyClass> classes;
};

double shannon_entropy(std::span<const double> weights);

EntropyReport entropy_classes(const MmsbmParams& params, const EntropyBoundaries& bounds = {});

// (repeat - switch) / (repeat + switch); nullopt when both are zero.
std::optional<double> balance(double repeat_weight, double switch_weight);

// D_p for players whose largest membership lies on a REPEAT or SWITCH group
// (and is at least `main_threshold`); nullopt marks ineligible players.
// Weights of several groups sharing a label are summed.
std::vector<std::optional<double>> repeat_switch_balance(const MmsbmParams& params,
                                                         const std::vector<GroupLabel>& labels,
                                                         double main_threshold = 0.0);

struct StrategyReport {
  Matrix phat;
  Matrix scores;
  std::vector<GroupLabel> labels;
  EntropyReport entropy;
  std::vector<std::optional<double>> balance;
  std::vector<double> mean_membership;  // average theta column per group
};

// Requires a network built with schema [B, C, E] and params fitted on it.
StrategyReport analyze(const MmsbmParams& params, const DecisionNetwork& network,
                       const EntropyBoundaries& bounds = {});

}  // namespace blockstrat
