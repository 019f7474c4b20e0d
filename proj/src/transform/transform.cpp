#include "lpmod/transform/transform.hpp"

#include <memory>

namespace lpmod {

std::set<Term> label_facts(const std::string& label, const std::set<Term>& facts) {
  RelabelingSpec rho{{}, {label}};
  std::set<Term> out;
  for (const auto& f : facts) out.insert(relabel_term(rho, f));
  return out;
}

ModelRef extract_output(const FactStore& store, const SymbolTable& table, const std::string& label,
                        const DomainRef& out, const std::string& model_name) {
  auto m = std::make_shared<CompiledModel>();
  m->name = model_name;
  m->domain = out;
  m->table = out->table();
  m->path = out->path;
  const Qualifiers prefix{label};
  const RelabelingSpec rho{prefix, {}};
  for (const auto& f : store.all()) {
    if (f.kind() != Term::Kind::Apply || !f.name().starts_with(prefix)) continue;
    const SymbolEntry* e = table.find(f.name());
    if (!e || e->kind != SymbolKind::New) continue;
    Term g = relabel_term(rho, f);
    const SymbolEntry* d = out->table().find(g.name());
    if (!d || d->kind != SymbolKind::New || !is_member(g, TypeExpr::ctor(g.name()), out->table()))
      throw Error(code::kExtraction,
                  "extracted fact " + g.str() + " is ill-typed in output domain " + out->name + " (label " + label +
                      ")");
    m->facts.insert(g);
  }
  return m;
}

void check_input(const CompiledModel& model, const SignatureEntry& want, const std::string& who) {
  if (!model.domain->lineage.count(want.domain->name))
    throw Error(code::kDomainMismatch, "model " + model.name + " is over " + model.domain->name + ", but " + who +
                                           " expects " + want.label + ":: " + want.domain->name);
}

TransformApplication apply_transform(const TransformRef& t, const std::vector<ModelRef>& inputs,
                                     const TransformOptions& opts) {
  if (inputs.size() != t->inputs.size())
    throw Error(code::kArity, t->name + " takes " + std::to_string(t->inputs.size()) + " input models, given " +
                                  std::to_string(inputs.size()));
  TransformApplication app;
  app.transform = t;
  app.inputs = inputs;
  std::set<Term> edb;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    check_input(*inputs[i], t->inputs[i], t->name);
    auto f = label_facts(t->inputs[i].label, inputs[i]->facts);
    edb.insert(f.begin(), f.end());
  }
  FactStore store = evaluate(t->program, edb, opts.eval);
  app.store_size = store.size();
  app.requires_report = clause_report(t->program, t->requires_goal, store, ClauseInfo::Kind::Requires);
  app.requires_held = app.requires_report.conforms;
  if (!app.requires_held) return app;
  app.ensures_report = clause_report(t->program, t->ensures_goal, store, ClauseInfo::Kind::Ensures);
  app.ensures_held = app.ensures_report.conforms;
  if (!app.ensures_held && !opts.force) return app;
  for (const auto& o : t->outputs)
    app.outputs.push_back(extract_output(store, t->program.table, o.label, o.domain, t->name + "_" + o.label));
  return app;
}

namespace {

std::string failed_clauses(const ConformanceReport& r) {
  std::string out;
  for (const auto& c : r.clauses) {
    if (c.holds) continue;
    out += (out.empty() ? "" : "; ") + c.clause.text;
  }
  return out;
}

std::string equation(const PipelineStep& st) {
  std::string out;
  for (std::size_t i = 0; i < st.outputs.size(); ++i) out += (i ? ", " : "") + st.outputs[i];
  out += " = " + st.callee + "(";
  for (std::size_t i = 0; i < st.args.size(); ++i) out += (i ? ", " : "") + st.args[i];
  return out + ")";
}

}  // namespace

SystemRun run_system(const CompiledSystem& s, const std::map<std::string, ModelRef>& inputs,
                     const TransformOptions& opts) {
  SystemRun run;
  for (const auto& in : s.inputs) {
    auto it = inputs.find(in.label);
    if (it == inputs.end())
      throw Error(code::kPipeline, "no model bound to input '" + in.label + "' of " + s.name);
    check_input(*it->second, in, s.name);
    run.values[in.label] = it->second;
  }
  for (const auto& st : s.steps) {
    std::vector<ModelRef> args;
    for (const auto& a : st.args) {
      auto it = run.values.find(a);
      if (it == run.values.end())
        throw Error(code::kPipeline, "pipeline variable '" + a + "' is unbound at " + equation(st), s.path, st.span);
      args.push_back(it->second);
    }
    std::vector<ModelRef> results;
    if (const auto* t = std::get_if<TransformRef>(&st.target)) {
      TransformApplication app = apply_transform(*t, args, opts);
      if (!app.requires_held)
        throw Error(code::kRequires,
                    "step " + equation(st) + ": requires violated: " + failed_clauses(app.requires_report), s.path,
                    st.span);
      if (!app.ensures_held && !opts.force)
        throw Error(code::kEnsures,
                    "step " + equation(st) + ": ensures violated: " + failed_clauses(app.ensures_report), s.path,
                    st.span);
      results = app.outputs;
    } else {
      const SystemRef& sub = std::get<SystemRef>(st.target);
      std::map<std::string, ModelRef> bound;
      for (std::size_t i = 0; i < sub->inputs.size(); ++i) bound[sub->inputs[i].label] = args[i];
      SystemRun inner = run_system(*sub, bound, opts);
      for (const auto& o : sub->outputs) results.push_back(inner.outputs.at(o.label));
    }
    for (std::size_t i = 0; i < st.outputs.size(); ++i) run.values[st.outputs[i]] = results[i];
    run.executed.push_back(st.callee);
  }
  for (const auto& o : s.outputs) run.outputs[o.label] = run.values.at(o.label);
  return run;
}

std::string model_text(const CompiledModel& m) {
  std::string out = "model " + m.name + " of " + m.domain->name + " {\n";
  for (const auto& f : m.facts) out += "  " + f.str() + ".\n";
  return out + "}\n";
}

}  // namespace lpmod
