#include "lpmod/cli/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <tuple>
#include <filesystem>
#include <fstream>
#include <json.hpp>

#include "lpmod/transform/transform.hpp"

namespace lpmod::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

struct Options {
  std::vector<std::string> load;
  bool json = false;
  std::size_t max_facts = 0;
  bool naive = false;
  bool force = false;
  std::string out_dir;
  std::string keep_dir;
  std::string target;
  std::vector<std::string> rest;
  std::string goal;
};

json diagnostic_json(const Diagnostic& d) {
  return json{{"path", d.path},
              {"line", d.line},
              {"col", d.col},
              {"severity", std::string(severity_name(d.severity))},
              {"code", d.code},
              {"message", d.message}};
}

std::vector<std::string> expand(const std::vector<std::string>& paths) {
  std::vector<std::string> files;
  for (const auto& p : paths) {
    if (fs::is_directory(p)) {
      std::vector<std::string> found;
      for (const auto& e : fs::recursive_directory_iterator(p))
        if (e.is_regular_file() && e.path().extension() == ".4ml") found.push_back(e.path().string());
      std::sort(found.begin(), found.end());
      files.insert(files.end(), found.begin(), found.end());
    } else {
      files.push_back(p);
    }
  }
  std::vector<std::string> unique;
  std::set<fs::path> seen;
  for (const auto& f : files) {
    std::error_code ec;
    fs::path c = fs::weakly_canonical(f, ec);
    if (seen.insert(ec ? fs::path(f) : c).second) unique.push_back(f);
  }
  return unique;
}

std::string kind_name(ModuleEnv::Kind k) {
  switch (k) {
    case ModuleEnv::Kind::Domain:
      return "domain";
    case ModuleEnv::Kind::Model:
      return "model";
    case ModuleEnv::Kind::Transform:
      return "transform";
    case ModuleEnv::Kind::System:
      return "transform system";
  }
  return "module";
}

json clause_json(const ClauseResult& c) {
  json j{{"symbol", c.clause.symbol.str()},
         {"kind", std::string(clause_kind_name(c.clause.kind))},
         {"module", c.clause.module},
         {"index", c.clause.index},
         {"text", c.clause.text},
         {"path", c.clause.path},
         {"line", c.clause.span.line},
         {"col", c.clause.span.col},
         {"holds", c.holds}};
  j["witness"] = c.witness ? json(c.witness->str()) : json(nullptr);
  return j;
}

json report_json(const ConformanceReport& r) {
  json clauses = json::array();
  for (const auto& c : r.clauses) clauses.push_back(clause_json(c));
  return json{{"goal", r.goal.str()}, {"holds", r.conforms}, {"clauses", clauses}};
}

void print_report(std::ostream& out, const ConformanceReport& r) {
  for (const auto& c : r.clauses) {
    out << "  " << (c.holds ? "[ok]  " : "[FAIL]") << " " << c.clause.module << " " << clause_kind_name(c.clause.kind)
        << " #" << c.clause.index << " (" << c.clause.path << ":" << c.clause.span.line << "): " << c.clause.text
        << "\n";
    if (c.witness) out << "         witness: " << c.witness->str() << "\n";
  }
}

void write_file(const fs::path& p, const std::string& text) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream f(p, std::ios::binary);
  if (!f) throw Error(code::kEvaluation, "cannot write " + p.string());
  f << text;
}

class Driver {
 public:
  Driver(const Options& o, std::ostream& out, std::ostream& err) : o_(o), out_(out), err_(err) {
    topts_.eval.max_facts = o.max_facts;
    topts_.eval.naive = o.naive;
    topts_.force = o.force;
  }

  void load(const std::vector<std::string>& extra = {}) {
    std::vector<std::string> all = o_.load;
    all.insert(all.end(), extra.begin(), extra.end());
    for (const auto& f : expand(all)) env_.load_file(f);
  }

  int check() {
    load(o_.rest);
    env_.elaborate_all();
    if (o_.json) {
      json diags = json::array();
      if (!env_.size())
        diags.push_back(diagnostic_json(Diagnostic{"", 0, 0, Severity::Warning, code::kNoModules, "no modules loaded"}));
      out_ << json{{"schema", "lpmod.check/1"}, {"modules", env_.size()}, {"diagnostics", diags}}.dump(2) << "\n";
      return kOk;
    }
    if (!env_.size()) {
      err_ << "warning: no modules loaded\n";
      return kOk;
    }
    std::map<std::string, int> counts;
    for (const auto& n : env_.names()) ++counts[kind_name(*env_.kind_of(n))];
    out_ << "ok: " << env_.size() << " modules";
    std::string sep = " (";
    for (const auto& [k, n] : counts) {
      out_ << sep << n << " " << k;
      sep = ", ";
    }
    out_ << ")\n";
    return kOk;
  }

  int conform() {
    load();
    ModelRef m = env_.model(o_.target);
    ConformanceReport r = check_conforms(*m, topts_.eval);
    if (o_.json) {
      json j{{"schema", "lpmod.conform/1"}, {"model", m->name}, {"domain", m->domain->name}, {"conforms", r.conforms}};
      j["clauses"] = report_json(r)["clauses"];
      out_ << j.dump(2) << "\n";
    } else {
      out_ << m->name << (r.conforms ? " conforms to " : " does not conform to ") << m->domain->name << "\n";
      print_report(out_, r);
    }
    return r.conforms ? kOk : kNonConforming;
  }

  int apply() {
    load();
    TransformRef t = env_.transform(o_.target);
    std::vector<ModelRef> inputs;
    for (const auto& n : o_.rest) inputs.push_back(env_.model(n));
    TransformApplication app = apply_transform(t, inputs, topts_);
    json outputs = json::array();
    for (std::size_t i = 0; i < app.outputs.size(); ++i)
      outputs.push_back(emit_model(*app.outputs[i], t->outputs[i].label, o_.out_dir));
    int code = !app.requires_held ? kRequiresViolated : !app.ensures_held ? kEnsuresViolated : kOk;
    if (o_.json) {
      json j{{"schema", "lpmod.apply/1"}, {"transform", t->name}, {"requires", report_json(app.requires_report)}};
      j["ensures"] = app.requires_held ? report_json(app.ensures_report) : json(nullptr);
      j["outputs"] = outputs;
      j["exit"] = code;
      out_ << j.dump(2) << "\n";
    } else {
      contract_text("requires", app.requires_report);
      if (app.requires_held) contract_text("ensures", app.ensures_report);
      if (code == kEnsuresViolated && !o_.force) err_ << "outputs withheld; pass --force to write them\n";
    }
    return code;
  }

  int run_pipeline() {
    load();
    SystemRef s = env_.system(o_.target);
    std::map<std::string, ModelRef> bound;
    for (const auto& b : o_.rest) {
      auto eq = b.find('=');
      if (eq == std::string::npos)
        throw Error(code::kPipeline, "input binding '" + b + "' must have the form label=model");
      bound[b.substr(0, eq)] = env_.model(b.substr(eq + 1));
    }
    SystemRun r;
    try {
      r = run_system(*s, bound, topts_);
    } catch (const Error& e) {
      if (e.code() == code::kRequires) return fail(e, kRequiresViolated);
      if (e.code() == code::kEnsures) return fail(e, kEnsuresViolated);
      throw;
    }
    json outputs = json::array();
    for (const auto& o : s->outputs) outputs.push_back(emit_model(*r.outputs.at(o.label), o.label, o_.out_dir));
    json kept = json::array();
    if (!o_.keep_dir.empty()) {
      for (const auto& [v, m] : r.values) {
        if (r.outputs.count(v)) continue;
        fs::path p = fs::path(o_.keep_dir) / (v + ".4ml");
        write_file(p, model_text(*m));
        kept.push_back(p.string());
        if (!o_.json) out_ << "kept " << p.string() << " (" << m->facts.size() << " facts)\n";
      }
    }
    if (o_.json) {
      json j{{"schema", "lpmod.run/1"}, {"system", s->name}, {"steps", r.executed}, {"outputs", outputs}};
      j["intermediates"] = kept;
      out_ << j.dump(2) << "\n";
    } else {
      out_ << "executed:";
      for (const auto& st : r.executed) out_ << " " << st;
      out_ << "\n";
    }
    return kOk;
  }

  int symbols() {
    load();
    const SymbolTable* t = nullptr;
    std::shared_ptr<const void> keep;
    auto kind = env_.kind_of(o_.target);
    if (!kind) throw Error(code::kUnknownModule, "unknown module '" + o_.target + "'");
    switch (*kind) {
      case ModuleEnv::Kind::Domain: {
        auto d = env_.domain(o_.target);
        keep = d;
        t = &d->table();
        break;
      }
      case ModuleEnv::Kind::Model: {
        auto m = env_.model(o_.target);
        keep = m;
        t = &m->table;
        break;
      }
      case ModuleEnv::Kind::Transform: {
        auto x = env_.transform(o_.target);
        keep = x;
        t = &x->program.table;
        break;
      }
      case ModuleEnv::Kind::System:
        throw Error(code::kUnknownModule, "transform system '" + o_.target + "' has no symbol table");
    }
    if (o_.json) {
      std::vector<std::pair<QualName, const SymbolEntry*>> sorted;
      for (const auto& [n, e] : t->entries())
        if (!e.internal) sorted.emplace_back(n, &e);
      // Same order as the text listing.
      std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
        return std::tie(a.first.qualifiers, a.first.base) < std::tie(b.first.qualifiers, b.first.base);
      });
      json rows = json::array();
      for (const auto& [n, ep] : sorted) {
        const SymbolEntry& e = *ep;
        rows.push_back(json{{"qualifiers", join_qualifiers(n.qualifiers)},
                            {"name", n.base},
                            {"kind", std::string(kind_symbol(e.kind))},
                            {"kind_word", std::string(kind_word(e.kind))},
                            {"arity", e.arity}});
      }
      out_ << json{{"schema", "lpmod.symbols/1"}, {"module", o_.target}, {"symbols", rows}}.dump(2) << "\n";
    } else {
      for (const auto& line : table_listing(*t)) out_ << line << "\n";
    }
    return kOk;
  }

  int query() {
    load();
    ModelRef m = env_.model(o_.target);
    auto rows = query_model(*m, o_.goal, topts_.eval);
    if (o_.json) {
      json bs = json::array();
      for (const auto& b : rows) {
        json row = json::object();
        for (const auto& [k, v] : b) row[k] = v.str();
        bs.push_back(row);
      }
      out_ << json{{"schema", "lpmod.query/1"}, {"model", m->name}, {"goal", o_.goal}, {"bindings", bs}}.dump(2)
           << "\n";
    } else if (rows.empty()) {
      out_ << "no answers\n";
    } else {
      for (const auto& b : rows) {
        if (b.empty()) {
          out_ << "yes\n";
          continue;
        }
        std::string sep;
        for (const auto& [k, v] : b) {
          out_ << sep << k << " = " << v.str();
          sep = ", ";
        }
        out_ << "\n";
      }
    }
    return rows.empty() ? kCompileOrNoAnswer : kOk;
  }

 private:
  int fail(const Error& e, int code) {
    if (o_.json)
      out_ << json{{"schema", "lpmod.error/1"}, {"diagnostics", json::array({diagnostic_json(e.diagnostic())})}}.dump(2)
           << "\n";
    else
      err_ << format_diagnostic(e.diagnostic()) << "\n";
    return code;
  }

  void contract_text(const char* what, const ConformanceReport& r) {
    out_ << what << ": " << (r.conforms ? "held" : "violated") << "\n";
    if (!r.conforms) print_report(out_, r);
  }

  json emit_model(const CompiledModel& m, const std::string& label, const std::string& dir) {
    json facts = json::array();
    for (const auto& f : m.facts) facts.push_back(f.str());
    json j{{"label", label}, {"model", m.name}, {"domain", m.domain->name}, {"facts", facts}};
    if (!dir.empty()) {
      fs::path p = fs::path(dir) / (label + ".4ml");
      write_file(p, model_text(m));
      j["path"] = p.string();
      if (!o_.json) out_ << "wrote " << p.string() << " (" << m.facts.size() << " facts)\n";
    } else if (!o_.json) {
      out_ << model_text(m);
    }
    return j;
  }

  const Options& o_;
  std::ostream& out_;
  std::ostream& err_;
  TransformOptions topts_;
  ModuleEnv env_;
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Module system over logic programs: check, conform, apply, run, symbols, query", "lpmod"};
  app.require_subcommand(1);
  auto common = [&](CLI::App* c) {
    c->add_option("-I,--load", o.load, "file or directory of .4ml sources (repeatable)")->allow_extra_args(false);
    c->add_flag("--json", o.json, "machine-readable output");
    c->add_option("--max-facts", o.max_facts, "fact cap (default LPMOD_MAX_FACTS or 1000000)");
    c->add_flag("--naive", o.naive, "naive fixpoint instead of semi-naive");
  };
  auto* check = app.add_subcommand("check", "parse and elaborate every module");
  common(check);
  check->add_option("files", o.rest, "additional source files");
  auto* conform = app.add_subcommand("conform", "check a model against its domain");
  common(conform);
  conform->add_option("model", o.target)->required();
  auto* apply = app.add_subcommand("apply", "apply a transform to input models");
  common(apply);
  apply->add_option("transform", o.target)->required();
  apply->add_option("models", o.rest)->required();
  apply->add_option("-o,--out", o.out_dir, "directory for output models");
  apply->add_flag("--force", o.force, "write outputs even when ensures fails");
  auto* runc = app.add_subcommand("run", "execute a transform system");
  common(runc);
  runc->add_option("system", o.target)->required();
  runc->add_option("bindings", o.rest, "label=model")->required();
  runc->add_option("-o,--out", o.out_dir, "directory for output models");
  runc->add_option("--keep-intermediates", o.keep_dir, "directory for intermediate models");
  runc->add_flag("--force", o.force, "continue past ensures failures");
  auto* symbols = app.add_subcommand("symbols", "list a module's symbol table");
  common(symbols);
  symbols->add_option("module", o.target)->required();
  auto* query = app.add_subcommand("query", "answer a goal over a model's fixpoint");
  common(query);
  query->add_option("model", o.target)->required();
  query->add_option("goal", o.goal)->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kCompileOrNoAnswer;
  }

  if (const char* v = std::getenv("LPMOD_MAX_FACTS"); v && !o.max_facts) o.max_facts = std::strtoull(v, nullptr, 10);

  Driver d(o, out, err);
  try {
    if (check->parsed()) return d.check();
    if (conform->parsed()) return d.conform();
    if (apply->parsed()) return d.apply();
    if (runc->parsed()) return d.run_pipeline();
    if (symbols->parsed()) return d.symbols();
    if (query->parsed()) return d.query();
  } catch (const Error& e) {
    if (o.json)
      out << json{{"schema", "lpmod.error/1"}, {"diagnostics", json::array({diagnostic_json(e.diagnostic())})}}.dump(2)
          << "\n";
    else
      err << format_diagnostic(e.diagnostic()) << "\n";
    if (e.code() == code::kRequires) return kRequiresViolated;
    if (e.code() == code::kEnsures) return kEnsuresViolated;
    return kCompileOrNoAnswer;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kInternal;
  }
  return kInternal;
}

}  // namespace lpmod::cli
