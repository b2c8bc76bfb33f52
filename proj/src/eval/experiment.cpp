#include "edgebook/eval/experiment.hpp"

#include <algorithm>
#include <cmath>

#include "edgebook/core/codebook.hpp"
#include "edgebook/core/errors.hpp"

namespace edgebook::eval {

RuleAcceptance parse_rule_acceptance(const std::string& name) {
  if (name == "all") return RuleAcceptance::kAll;
  if (name == "none") return RuleAcceptance::kNone;
  if (name == "file") return RuleAcceptance::kFile;
  fail(ErrorCode::kInvalidArgument, "acceptance must be all, none or file, not '" + name + "'");
}

std::string rule_acceptance_name(RuleAcceptance acceptance) {
  switch (acceptance) {
    case RuleAcceptance::kAll:
      return "all";
    case RuleAcceptance::kNone:
      return "none";
    case RuleAcceptance::kFile:
      return "file";
  }
  return "all";
}

AcceptanceSelection parse_acceptance_selection(const Json& j) {
  if (!j.is_object()) fail(ErrorCode::kInvalidArgument, "acceptance file must be a JSON object");
  AcceptanceSelection out;
  try {
    if (j.contains("accepted_merged_ids")) {
      out.accepted_merged_ids = j.at("accepted_merged_ids").get<std::vector<std::string>>();
    }
    if (j.contains("rules")) out.rules = j.at("rules").get<std::vector<EdgeCaseRule>>();
  } catch (const Json::exception& e) {
    fail(ErrorCode::kInvalidArgument, std::string("bad acceptance file: ") + e.what());
  }
  return out;
}

void validate(const EvalReport& r) {
  if (r.confusion.size() != r.iteration_f1.size()) {
    fail(ErrorCode::kInvalidArgument, "one confusion matrix per iteration is required");
  }
  if (r.deltas.size() + 1 != r.iteration_f1.size() && !(r.iteration_f1.empty() && r.deltas.empty())) {
    fail(ErrorCode::kInvalidArgument, "deltas must have one entry fewer than iteration_f1");
  }
  for (const auto& it : r.iteration_f1) {
    if (!(it.f1 >= 0.0 && it.f1 <= 1.0)) fail(ErrorCode::kInvalidArgument, "F1 outside [0, 1]");
  }
  for (std::size_t i = 0; i < r.deltas.size(); ++i) {
    if (r.deltas[i] != r.iteration_f1[i + 1].f1 - r.iteration_f1[i].f1) {
      fail(ErrorCode::kInvalidArgument, "delta " + std::to_string(i) + " disagrees with F1 values");
    }
  }
}

void to_json(Json& j, const IterationF1& v) { j = Json{{"iteration", v.iteration}, {"f1", v.f1}}; }

void from_json(const Json& j, IterationF1& v) {
  v.iteration = j.at("iteration").get<int>();
  v.f1 = j.at("f1").get<double>();
}

void to_json(Json& j, const EvalReport& v) {
  j = Json{{"dataset_name", v.dataset_name},
           {"acceptance", v.acceptance},
           {"positive_label", v.positive_label},
           {"label_values", v.label_values},
           {"n_docs", v.n_docs},
           {"n_gold", v.n_gold},
           {"iteration_f1", v.iteration_f1},
           {"deltas", v.deltas},
           {"confusion", v.confusion},
           {"accepted_rules", v.accepted_rules},
           {"provider_fingerprint", v.provider_fingerprint}};
}

void from_json(const Json& j, EvalReport& v) {
  v.dataset_name = j.at("dataset_name").get<std::string>();
  v.acceptance = j.at("acceptance").get<std::string>();
  v.positive_label = j.at("positive_label").get<int>();
  v.label_values = j.at("label_values").get<std::vector<int>>();
  v.n_docs = j.at("n_docs").get<int>();
  v.n_gold = j.at("n_gold").get<int>();
  v.iteration_f1 = j.at("iteration_f1").get<std::vector<IterationF1>>();
  v.deltas = j.at("deltas").get<std::vector<double>>();
  v.confusion = j.at("confusion").get<std::vector<std::vector<std::vector<int>>>>();
  v.accepted_rules = j.at("accepted_rules").get<std::vector<EdgeCaseRule>>();
  v.provider_fingerprint = j.at("provider_fingerprint").get<std::string>();
  validate(v);
}

ExperimentResult run_two_iteration_experiment(provider::Gateway& gateway,
                                              const std::string& dataset_name,
                                              const std::vector<Document>& corpus,
                                              const Codebook& codebook_v0,
                                              RuleAcceptance acceptance,
                                              const AcceptanceSelection* selection,
                                              const pipeline::PipelineConfig& cfg) {
  if (acceptance == RuleAcceptance::kFile && selection == nullptr) {
    fail(ErrorCode::kInvalidArgument, "acceptance=file needs a selection");
  }
  if (std::none_of(corpus.begin(), corpus.end(), [](const Document& d) { return d.gold_label; })) {
    fail(ErrorCode::kNoGoldLabels, "the experiment needs gold labels");
  }

  ExperimentResult out;
  const std::string& task_id = codebook_v0.task_id;
  out.iteration0 = pipeline::compute_iteration(gateway, task_id, codebook_v0, corpus, cfg, 0);

  std::vector<EdgeCaseRule> accepted;
  if (acceptance == RuleAcceptance::kAll) {
    for (const auto& m : out.iteration0.merged) accepted.push_back(m.suggested_rule);
  } else if (acceptance == RuleAcceptance::kFile) {
    for (const auto& id : selection->accepted_merged_ids) {
      const auto it = std::find_if(out.iteration0.merged.begin(), out.iteration0.merged.end(),
                                   [&](const MergedEdgeCase& m) { return m.merged_id == id; });
      if (it == out.iteration0.merged.end()) {
        fail(ErrorCode::kInvalidArgument, "iteration 0 has no merged case '" + id + "'");
      }
      accepted.push_back(it->suggested_rule);
    }
    accepted.insert(accepted.end(), selection->rules.begin(), selection->rules.end());
  }
  out.codebook_v1 = compose_codebook(codebook_v0, accepted);
  out.iteration1 =
      pipeline::compute_iteration(gateway, task_id, out.codebook_v1, corpus, cfg, 1);

  auto& r = out.report;
  r.dataset_name = dataset_name;
  r.acceptance = rule_acceptance_name(acceptance);
  r.label_values = codebook_v0.label_values();
  r.n_docs = static_cast<int>(corpus.size());
  r.accepted_rules = dedupe_rules(accepted);
  r.provider_fingerprint = gateway.fingerprint();
  for (const IterationRecord* rec : {&out.iteration0, &out.iteration1}) {
    if (!rec->metrics) {
      fail(ErrorCode::kUnknownLabel, "gold labels outside the codebook's label set");
    }
    r.positive_label = rec->metrics->positive_label;
    r.n_gold = rec->metrics->n_gold;
    r.iteration_f1.push_back({rec->iteration, rec->metrics->positive_f1});
    r.confusion.push_back(rec->metrics->confusion);
  }
  r.deltas.push_back(r.iteration_f1[1].f1 - r.iteration_f1[0].f1);
  validate(r);
  return out;
}

}  // namespace edgebook::eval
