#pragma once

#include <map>
#include <string>
#include <vector>

#include "lpmod/engine/engine.hpp"

namespace lpmod {

struct TransformOptions {
  EvalOptions eval;
  /// Keep outputs whose ensures clauses failed.
  bool force = false;
};

struct TransformApplication {
  TransformRef transform;
  std::vector<ModelRef> inputs;
  /// Positional over the output signature; empty when withheld.
  std::vector<ModelRef> outputs;
  bool requires_held = false;
  bool ensures_held = false;
  ConformanceReport requires_report;
  ConformanceReport ensures_report;
  std::size_t store_size = 0;
};

/// ρ_{ε→label} over every fact.
std::set<Term> label_facts(const std::string& label, const std::set<Term>& facts);

/// N_j: new-kind facts under `label`, unlabeled and checked against `out`.
/// `table` is the table the store was computed under.
ModelRef extract_output(const FactStore& store, const SymbolTable& table, const std::string& label,
                        const DomainRef& out, const std::string& model_name);

/// Throws "domain-mismatch" unless the model's domain includes `want`.
void check_input(const CompiledModel& model, const SignatureEntry& want, const std::string& who);

TransformApplication apply_transform(const TransformRef& t, const std::vector<ModelRef>& inputs,
                                     const TransformOptions& opts = {});

struct SystemRun {
  /// Output label -> model.
  std::map<std::string, ModelRef> outputs;
  /// Every pipeline variable, inputs included.
  std::map<std::string, ModelRef> values;
  /// Step callees in execution order.
  std::vector<std::string> executed;
};

/// Runs the equations in dependency order. A failed contract aborts with
/// "requires-violation" or "ensures-violation" naming the step.
SystemRun run_system(const CompiledSystem& s, const std::map<std::string, ModelRef>& inputs,
                     const TransformOptions& opts = {});

/// Model source text with term-ordered facts.
std::string model_text(const CompiledModel& m);

}  // namespace lpmod
