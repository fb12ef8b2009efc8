#include <sepgroup/runner.hpp>

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <string>

namespace {

int execute(const std::string& verb, const std::string& path, const sepg::run_options& base,
            const std::string& format, const std::string& out) {
  sepg::run_options opt = base;
  opt.kinds = sepg::verb_kinds(verb);
  const sepg::scenario sc = sepg::load_scenario(path);
  const auto report = sepg::run_scenario(sc, opt);
  const std::string text = format == "text" ? sepg::render_text(report) : report.dump(2) + "\n";
  if (out.empty()) {
    std::cout << text;
  } else {
    std::ofstream f(out, std::ios::binary);
    if (!f) throw sepg::error("cannot write '" + out + "'");
    f << text;
    std::cerr << report.at("summary").get<std::string>() << "\n";
  }
  return report.at("passed").get<bool>() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Build and verify separable abelian groups from special ladder systems"};
  app.require_subcommand(1);

  sepg::run_options opt;
  std::size_t depth = 0;
  std::string stage, bound, format = "json", out;
  std::string path;

  for (const char* verb : {"validate", "build", "project", "equiv", "uniformize", "extend", "obstruct", "run"}) {
    auto* sub = app.add_subcommand(verb, std::string("run the scenario's ") + verb + " checks");
    sub->add_option("scenario", path, "scenario file")->required()->check(CLI::ExistingFile);
    sub->add_option("--depth", depth, "explored depth N (default: $SEPG_DEPTH, else 6)");
    sub->add_option("--stage", stage, "stage ordinal alpha, e.g. w^3*1");
    sub->add_option("--seed", opt.seed, "seed for randomized sweeps");
    sub->add_option("--bound", bound, "splitting search bound B");
    sub->add_option("--format", format, "report format")->check(CLI::IsMember({"json", "text"}));
    sub->add_option("--out", out, "write the report to a file");
  }
  CLI11_PARSE(app, argc, argv);

  try {
    if (depth) opt.depth = depth;
    if (!stage.empty()) opt.stage = sepg::ordinal::parse(stage);
    if (!bound.empty()) opt.bound = sepg::integer(bound);
    return execute(app.get_subcommands().front()->get_name(), path, opt, format, out);
  } catch (const sepg::parse_error& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const sepg::validation_error& e) {
    std::cerr << "invalid scenario: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument&) {
    std::cerr << "parse error: bad integer '" << bound << "'\n";
    return 2;
  } catch (const sepg::error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
