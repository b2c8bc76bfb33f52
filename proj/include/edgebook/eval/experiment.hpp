#pragma once

#include <string>
#include <vector>

#include "edgebook/core/json_io.hpp"
#include "edgebook/core/types.hpp"
#include "edgebook/pipeline/pipeline.hpp"
#include "edgebook/provider/gateway.hpp"

namespace edgebook::eval {

// How the suggested rules of iteration 0 become codebook v1.
enum class RuleAcceptance { kAll, kNone, kFile };

[[nodiscard]] RuleAcceptance parse_rule_acceptance(const std::string& name);
[[nodiscard]] std::string rule_acceptance_name(RuleAcceptance acceptance);

// An expert's choice, read from {"accepted_merged_ids": [...], "rules": [...]}.
// Both keys are optional. Rules are written out in full and appended after
// the accepted suggestions.
struct AcceptanceSelection {
  std::vector<std::string> accepted_merged_ids;
  std::vector<EdgeCaseRule> rules;
};

[[nodiscard]] AcceptanceSelection parse_acceptance_selection(const Json& j);

struct IterationF1 {
  int iteration = 0;
  double f1 = 0.0;

  bool operator==(const IterationF1&) const = default;
};

struct EvalReport {
  std::string dataset_name;
  std::string acceptance;
  int positive_label = 0;
  std::vector<int> label_values;
  int n_docs = 0;
  int n_gold = 0;
  std::vector<IterationF1> iteration_f1;
  // deltas[i] = iteration_f1[i + 1].f1 - iteration_f1[i].f1
  std::vector<double> deltas;
  // One matrix per iteration, rows gold and columns predicted.
  std::vector<std::vector<std::vector<int>>> confusion;
  std::vector<EdgeCaseRule> accepted_rules;
  std::string provider_fingerprint;

  bool operator==(const EvalReport&) const = default;
};

// F1 values in [0, 1], one confusion matrix per iteration, deltas consistent.
void validate(const EvalReport& report);

void to_json(Json& j, const IterationF1& v);
void from_json(const Json& j, IterationF1& v);
void to_json(Json& j, const EvalReport& v);
void from_json(const Json& j, EvalReport& v);

struct ExperimentResult {
  EvalReport report;
  IterationRecord iteration0;
  IterationRecord iteration1;
  Codebook codebook_v1;
};

// Iteration 0 with codebook_v0, codebook v1 built from the accepted merged
// rules, then iteration 1 with v1. Nothing is persisted. The corpus must
// carry gold labels (NoGoldLabels otherwise). `selection` is required for
// kFile and must only name merged ids that iteration 0 produced.
[[nodiscard]] ExperimentResult run_two_iteration_experiment(
    provider::Gateway& gateway, const std::string& dataset_name,
    const std::vector<Document>& corpus, const Codebook& codebook_v0, RuleAcceptance acceptance,
    const AcceptanceSelection* selection = nullptr, const pipeline::PipelineConfig& cfg = {});

}  // namespace edgebook::eval
