// Command-line front door: run programs, emit weakest-precondition
// obligations, and check agreement of the two semantics over finite carriers.

#include "wpcheck/checker.hpp"
#include "wpcheck/fixtures.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace {

using namespace wpcheck;

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("file not found: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Binding parse_param_args(const std::vector<std::string>& args, const SourceUnit& u, const Bounds& bounds) {
  Binding b;
  for (const auto& a : args) {
    auto eq = a.find('=');
    if (eq == std::string::npos) throw ParseError("expected --param name=TABLE, got " + a);
    std::string name = a.substr(0, eq);
    const TypeDesc* t = u.param_type(name);
    if (!t) throw ParseError("unknown parameter " + name);
    b[name] = parse_table_literal(a.substr(eq + 1), *t, u.domains, bounds);
  }
  return b;
}

FormulaPtr spec_or_fail(const SourceUnit& u, const std::string& name) {
  if (!u.spec(name)) throw ParseError("unknown spec " + name);
  return compile_spec(u, name);
}

// weakenings of a conjunction obtained by dropping one conjunct at a time;
// non-conjunctions weaken to ⊤
std::vector<FormulaPtr> drop_conjunct_weakenings(const FormulaPtr& p) {
  std::vector<FormulaPtr> out;
  if (p->tag != Formula::Tag::And || p->conjuncts.size() < 2) {
    out.push_back(f_top());
    return out;
  }
  for (std::size_t skip = 0; skip < p->conjuncts.size(); ++skip) {
    std::vector<FormulaPtr> rest;
    for (std::size_t i = 0; i < p->conjuncts.size(); ++i)
      if (i != skip) rest.push_back(p->conjuncts[i]);
    out.push_back(rest.size() == 1 ? rest[0] : f_and(rest));
  }
  return out;
}

int emit_report(const CheckReport& rep, const std::string& format) {
  if (format == "json")
    std::cout << report_to_json(rep).dump(2) << "\n";
  else
    std::cout << report_to_text(rep);
  return rep.pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"verification-condition engine for reader/writer/state programs"};
  app.require_subcommand(1);

  std::string file, input_text, spec_name, format = "text", mode, weaker_name, example_name, out_path;
  std::vector<std::string> param_args;
  bool do_simplify = false;
  std::size_t max_list_len = 4;
  int jobs = 1;
  unsigned seed = 0;

  auto* run_cmd = app.add_subcommand("run", "execute a program on a concrete input");
  run_cmd->add_option("file", file)->required();
  run_cmd->add_option("--input", input_text, "input pair, e.g. \"(e0 s0)\"")->required();
  run_cmd->add_option("--param", param_args, "parameter table, e.g. g=s0:just-w0,s1:nothing");

  auto* wp_cmd = app.add_subcommand("wp", "emit the weakest-precondition obligation for a spec");
  wp_cmd->add_option("file", file)->required();
  wp_cmd->add_option("--spec", spec_name)->required();
  wp_cmd->add_flag("--simplify", do_simplify);
  wp_cmd->add_option("--format", format)->check(CLI::IsMember({"text", "json"}));
  wp_cmd->add_option("--seed", seed, "fresh-name counter seed");

  auto* check_cmd = app.add_subcommand("check", "check agreement of the two semantics");
  check_cmd->add_option("file", file)->required();
  check_cmd->add_option("--spec", spec_name)->required();
  check_cmd->add_option("--mode", mode)
      ->required()
      ->check(CLI::IsMember({"sufficiency", "necessity", "both", "monotonicity", "extension"}));
  check_cmd->add_option("--weaker", weaker_name, "weaker spec for monotonicity (default: drop conjuncts)");
  check_cmd->add_option("--param", param_args);
  check_cmd->add_option("--max-list-len", max_list_len);
  check_cmd->add_option("--jobs", jobs);
  check_cmd->add_option("--seed", seed);
  check_cmd->add_option("--format", format)->check(CLI::IsMember({"text", "json"}));

  auto* simplify_cmd = app.add_subcommand("simplify", "print a spec formula after simplification");
  simplify_cmd->add_option("file", file)->required();
  simplify_cmd->add_option("--spec", spec_name)->required();

  auto* example_cmd = app.add_subcommand("example", "write a built-in example source file");
  example_cmd->add_option("name", example_name)->required()->check(CLI::IsMember({"paper-intro"}));
  example_cmd->add_option("--output", out_path, "destination path (default: ./paper_intro.east)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (example_cmd->parsed()) {
      std::string dest = out_path.empty() ? "paper_intro.east" : out_path;
      std::ofstream out(dest, std::ios::binary);
      if (!out) throw ParseError("cannot write " + dest);
      out << paper_intro_source();
      std::cout << dest << "\n";
      return 0;
    }

    auto unit = std::make_shared<SourceUnit>(parse_unit(slurp(file)));
    Bounds bounds;
    bounds.max_list_len = max_list_len;

    if (run_cmd->parsed()) {
      Binding params = parse_param_args(param_args, *unit, bounds);
      for (const auto& [n, t] : unit->params)
        if (!params.count(n)) throw ParseError("parameter " + n + " is unbound; pass --param");
      Input i = parse_input_literal(input_text, unit->domains);
      Output o = run(compile(unit, params), default_theory(), i);
      std::cout << output_to_string(o) << "\n";
      return 0;
    }

    if (wp_cmd->parsed()) {
      FormulaPtr spec = spec_or_fail(*unit, spec_name);
      FormulaPtr w = wp(compile(unit, {}), default_theory(), post_from_formula(spec),
                        make_wp_ctx(unit->param_sym_types(), seed));
      if (do_simplify) w = simplify(w);
      if (format == "json")
        std::cout << formula_to_json(w).dump(2) << "\n";
      else
        std::cout << print_formula(w) << "\n";
      return 0;
    }

    if (simplify_cmd->parsed()) {
      std::cout << print_formula(simplify(spec_or_fail(*unit, spec_name))) << "\n";
      return 0;
    }

    // check
    CheckOptions opt;
    opt.bounds = bounds;
    opt.fixed_params = parse_param_args(param_args, *unit, bounds);
    opt.jobs = jobs;
    opt.seed = seed;
    FormulaPtr spec = spec_or_fail(*unit, spec_name);

    if (mode == "sufficiency" || mode == "necessity" || mode == "both") {
      AgreementMode m = mode == "sufficiency" ? AgreementMode::Sufficiency
                        : mode == "necessity" ? AgreementMode::Necessity
                                              : AgreementMode::Both;
      return emit_report(check_agreement(*unit, spec, m, opt), format);
    }
    if (mode == "extension") return emit_report(check_extension_agreement(*unit, spec, opt), format);

    // monotonicity: spec against --weaker, or against its drop-one-conjunct
    // weakenings
    std::vector<FormulaPtr> weaker;
    if (!weaker_name.empty())
      weaker.push_back(spec_or_fail(*unit, weaker_name));
    else
      weaker = drop_conjunct_weakenings(spec);
    CheckReport merged;
    merged.mode = "monotonicity";
    for (const auto& w : weaker) {
      CheckReport r = check_monotonicity(*unit, spec, w, opt);
      merged.inputs_checked = r.inputs_checked;
      merged.params_checked = r.params_checked;
      merged.elapsed += r.elapsed;
      merged.counterexamples.insert(merged.counterexamples.end(), r.counterexamples.begin(),
                                    r.counterexamples.end());
    }
    return emit_report(merged, format);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
